use ndarray::{s, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::NmfError;

/// Floor applied to every factor entry after each update.
pub const FACTOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NmfConfig {
    /// Latent dimension. `None` uses the number of frame rows, capped by the
    /// smaller matrix dimension.
    pub rank: Option<usize>,
    pub iterations: usize,
    /// Stop once the relative objective change drops below this.
    pub tolerance: f64,
}

impl Default for NmfConfig {
    fn default() -> Self {
        NmfConfig {
            rank: None,
            iterations: 200,
            tolerance: 1e-6,
        }
    }
}

/// `V ≈ W H` with `W` split into frame and command row blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationResult {
    pub w_frames: Array2<f64>,
    pub w_commands: Array2<f64>,
    pub h: Array2<f64>,
    /// Generalized KL divergence before the first update, then after each iteration.
    pub objective: Vec<f64>,
}

/// Generalized Kullback-Leibler divergence `D(V || WH)`.
pub fn kl_divergence(v: &Array2<f64>, wh: &Array2<f64>) -> f64 {
    v.iter()
        .zip(wh.iter())
        .map(|(&x, &y)| {
            if x > 0.0 {
                x * (x / y).ln() - x + y
            } else {
                y
            }
        })
        .sum()
}

/// Multiplicative-update NMF minimizing generalized KL divergence.
///
/// Factors start uniform in (0.1, 1.1) from a seeded generator. `frame_rows`
/// splits `W` into its frame block (top) and command block (bottom).
pub fn factorize(
    v: &Array2<f64>,
    frame_rows: usize,
    rank: usize,
    iterations: usize,
    tolerance: f64,
    seed: u64,
) -> Result<FactorizationResult, NmfError> {
    let (m, n) = v.dim();
    if rank == 0 || iterations == 0 {
        return Err(NmfError::InvalidArgument(
            "rank and iterations must be at least 1".to_string(),
        ));
    }
    if rank > m.min(n) {
        return Err(NmfError::RankTooLarge { rank, rows: m, cols: n });
    }
    if frame_rows > m {
        return Err(NmfError::InvalidArgument(format!(
            "{frame_rows} frame rows in a {m}-row matrix"
        )));
    }
    if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(NmfError::InvalidArgument("matrix entries must be finite and non-negative".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Array2::from_shape_fn((m, rank), |_| rng.random_range(0.1..1.1));
    let mut h = Array2::from_shape_fn((rank, n), |_| rng.random_range(0.1..1.1));

    let mut wh = w.dot(&h);
    let mut objective = vec![kl_divergence(v, &wh)];
    for _ in 0..iterations {
        // H <- H * (W^T (V / WH)) / (W^T 1)
        let ratio = ratio(v, &wh);
        let numer = w.t().dot(&ratio);
        let w_colsum = w.sum_axis(Axis(0));
        for ((r, c), x) in h.indexed_iter_mut() {
            *x = (*x * numer[[r, c]] / w_colsum[r]).max(FACTOR_FLOOR);
        }
        wh = w.dot(&h);

        // W <- W * ((V / WH) H^T) / (1 H^T)
        let ratio = self::ratio(v, &wh);
        let numer = ratio.dot(&h.t());
        let h_rowsum = h.sum_axis(Axis(1));
        for ((r, c), x) in w.indexed_iter_mut() {
            *x = (*x * numer[[r, c]] / h_rowsum[c]).max(FACTOR_FLOOR);
        }
        wh = w.dot(&h);

        let obj = kl_divergence(v, &wh);
        let prev = *objective.last().expect("non-empty");
        objective.push(obj);
        if (prev - obj).abs() <= tolerance * prev.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    Ok(FactorizationResult {
        w_frames: w.slice(s![..frame_rows, ..]).to_owned(),
        w_commands: w.slice(s![frame_rows.., ..]).to_owned(),
        h,
        objective,
    })
}

fn ratio(v: &Array2<f64>, wh: &Array2<f64>) -> Array2<f64> {
    let mut out = v.clone();
    out.zip_mut_with(wh, |x, &y| *x /= y);
    out
}

impl FactorizationResult {
    /// Rebuilds the full `W` from its two row blocks.
    pub fn w(&self) -> Array2<f64> {
        ndarray::concatenate(Axis(0), &[self.w_frames.view(), self.w_commands.view()])
            .expect("equal latent dimension")
    }

    /// Frobenius norm of `V - W H`.
    pub fn reconstruction_error(&self, v: &Array2<f64>) -> f64 {
        let wh = self.w().dot(&self.h);
        v.iter()
            .zip(wh.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}
