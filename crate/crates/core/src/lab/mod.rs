//! Verifiers and experiments built on the expansion engine.

pub mod approx;
pub mod best;
pub mod enumerate;
pub mod fixtures;
pub mod identities;
pub mod khinchin;
pub mod suites;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent deterministic stream `task` of the master seed.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Mean, min and max of a sample (all `NaN` when empty).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Stats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Stats {
        let mut count = 0usize;
        let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for x in xs {
            count += 1;
            min = min.min(x);
            max = max.max(x);
            sum += x;
        }
        if count == 0 {
            return Stats { count, min: f64::NAN, max: f64::NAN, mean: f64::NAN };
        }
        Stats { count, min, max, mean: sum / count as f64 }
    }
}
