/// Acceptance rate the univariate random-walk proposals are tuned toward.
pub const TARGET_ACCEPTANCE: f64 = 0.44;

/// Robbins–Monro update of per-component proposal scales.
///
/// `acceptance[j]` is the fraction of accepted proposals for component `j`
/// over the last adaptation window and `round` counts windows from 1. Each
/// log-scale moves by `γ · (rate − 0.44)` with `γ = min(1, round^-1/2)`, so
/// the step size decays and the scales settle. Only call during burn-in.
pub fn adapt_step_sizes(scales: &mut [f64], acceptance: &[f64], round: usize) {
    let gamma = (1.0 / (round.max(1) as f64).sqrt()).min(1.0);
    for (scale, &rate) in scales.iter_mut().zip(acceptance) {
        let updated = (scale.ln() + gamma * (rate - TARGET_ACCEPTANCE)).exp();
        *scale = updated.clamp(1e-8, 1e4);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn high_acceptance_widens_low_acceptance_narrows() {
        let mut scales = vec![1.0, 1.0, 1.0];
        adapt_step_sizes(&mut scales, &[1.0, 0.0, TARGET_ACCEPTANCE], 4);
        assert!(scales[0] > 1.0);
        assert!(scales[1] < 1.0);
        assert_eq!(scales[2], 1.0);
    }

    #[test]
    fn step_decays_with_rounds() {
        let mut early = vec![1.0];
        let mut late = vec![1.0];
        adapt_step_sizes(&mut early, &[1.0], 1);
        adapt_step_sizes(&mut late, &[1.0], 100);
        assert!(early[0] > late[0]);
    }
}
