//! Draws from truncated exponential, normal and binomial distributions and
//! compares sample means with closed forms.

use censored_bayes::distributions::special::{ndtr, LN_SQRT_2PI};
use censored_bayes::distributions::DistributionFamily;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 50_000;

fn sample_mean(
    dist: &DistributionFamily,
    lo: f64,
    hi: f64,
    rng: &mut ChaCha8Rng,
) -> censored_bayes::Result<f64> {
    let mut total = 0.0;
    for _ in 0..DRAWS {
        total += dist.sample_truncated(lo, hi, rng)?;
    }
    Ok(total / DRAWS as f64)
}

pub fn run_example() -> censored_bayes::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    // memorylessness: Exp(λ) given Y > c has mean c + 1/λ
    let exp = DistributionFamily::exponential(0.5)?;
    let m = sample_mean(&exp, 3.0, f64::INFINITY, &mut rng)?;
    println!(
        "Exp(0.5) | Y > 3        mean {m:.4}  expected {:.4}",
        3.0 + 2.0
    );

    // standard normal on (a, b]: mean (φ(a) - φ(b)) / (Φ(b) - Φ(a))
    let normal = DistributionFamily::normal(0.0, 1.0)?;
    let (a, b) = (1.5, 4.0);
    let phi = |z: f64| (-0.5 * z * z - LN_SQRT_2PI).exp();
    let expected = (phi(a) - phi(b)) / (ndtr(b) - ndtr(a));
    let m = sample_mean(&normal, a, b, &mut rng)?;
    println!("N(0,1) | 1.5 < Y <= 4  mean {m:.4}  expected {expected:.4}");

    // far tail, where naive rejection would essentially never accept
    let m = sample_mean(&normal, 8.0, f64::INFINITY, &mut rng)?;
    println!("N(0,1) | Y > 8          mean {m:.4}  (just above 8)");

    // binomial below a reporting cutoff
    let binom = DistributionFamily::binomial(20, 0.3)?;
    let m = sample_mean(&binom, f64::NEG_INFINITY, 3.0, &mut rng)?;
    let mass: Vec<f64> = (0..=3)
        .map(|k| binom.log_pdf(k as f64).map(f64::exp))
        .collect::<Result<_, _>>()?;
    let expected = mass
        .iter()
        .enumerate()
        .map(|(k, p)| k as f64 * p)
        .sum::<f64>()
        / mass.iter().sum::<f64>();
    println!("Bin(20,0.3) | K <= 3    mean {m:.4}  expected {expected:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
