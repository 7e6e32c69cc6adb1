use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Sample-mean estimate of an observable with outcomes `±1` and mean `x`,
/// from `shots` Bernoulli((1+x)/2) draws mapped back to `[−1, 1]`.
pub fn shot_estimate(x: f64, shots: u64, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shot_estimate_with(x, shots, &mut rng)
}

pub(crate) fn shot_estimate_with(x: f64, shots: u64, rng: &mut impl rand::Rng) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    if !(x.abs() <= 1.0 + 1e-9) {
        return Err(Error::InvalidArgument(format!("expectation {x} outside [-1, 1]")));
    }
    let p = ((1.0 + x) / 2.0).clamp(0.0, 1.0);
    let hits = Binomial::new(shots, p).expect("probability in [0, 1]").sample(rng);
    Ok(2.0 * hits as f64 / shots as f64 - 1.0)
}
