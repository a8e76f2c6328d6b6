//! Every runnable example must run to completion.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[path = $file]
        mod $name;

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(
    likelihood_equivalence,
    "../examples/likelihood_equivalence.rs"
);
example!(truncated_sampling, "../examples/truncated_sampling.rs");
example!(
    survival_deviance_gap,
    "../examples/survival_deviance_gap.rs"
);
example!(conjugate_check, "../examples/conjugate_check.rs");
example!(ae_model_comparison, "../examples/ae_model_comparison.rs");
example!(density_export, "../examples/density_export.rs");
example!(fit_from_config, "../examples/fit_from_config.rs");
