//! The quantum decoder on two backends and the cube-size search around it.
//!
//! Both backends run the same seven steps: sample `T = mk` phased cube states,
//! assemble their labels into `Â`, Fourier-transform a fresh label register,
//! apply `Â^{-1}`, let label digit `j` control `U_t^{ℓ_j}` on cube register `j`,
//! apply `Â`, and measure in the Fourier basis. The outcome is `-ŝ`.
//!
//! [`Backend::Dense`] simulates every step exactly. [`Backend::Structured`]
//! replaces the simulation with the eigenphase each register would kick back,
//! which is only meaningful when `t - A s ∈ [σ]^n` for a unique `s`; outside
//! that regime it refuses.

mod dense;
mod structured;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{DecodeInstance, INFINITE_BOUND};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldParams};
use crate::linalg::{FpMatrix, SingularReport};
use crate::metrics::manhattan_dist;
use crate::qsim::SigmaParam;
use crate::rng::substream;

pub use dense::{decode_dense, FULL_STATE_LIMIT};
pub use structured::{decode_structured, eigen_message};

/// Default cap on label-batch redraws.
pub const DEFAULT_MAX_ROUNDS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    Structured,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Dense => "dense",
            Backend::Structured => "structured",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Backend::Dense),
            "structured" => Ok(Backend::Structured),
            other => Err(Error::BadParams(format!("unknown backend {other:?}"))),
        }
    }
}

/// How the dense backend stores the composite register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DenseRepresentation {
    /// Full statevector up to [`FULL_STATE_LIMIT`] amplitudes, branch form above.
    #[default]
    Auto,
    Statevector,
    Branch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeOptions {
    pub seed: u64,
    pub max_rounds: usize,
    /// Check the eigenphase regime against `s_true` and cached `d` before running.
    pub assert_promise: bool,
    pub representation: DenseRepresentation,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            seed: 0,
            max_rounds: DEFAULT_MAX_ROUNDS,
            assert_promise: true,
            representation: DenseRepresentation::Auto,
        }
    }
}

impl DecodeOptions {
    pub fn with_seed(seed: u64) -> Self {
        DecodeOptions { seed, ..Self::default() }
    }
}

/// `T` labels as the columns of `Â`, with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMatrix {
    labels: Vec<Vec<u32>>,
    matrix: FpMatrix,
    inverse: FpMatrix,
    rounds: usize,
}

impl LabelMatrix {
    pub fn from_labels(p: u32, labels: Vec<Vec<u32>>) -> std::result::Result<Self, SingularReport> {
        let matrix = FpMatrix::from_columns(p, &labels).expect("labels are digit vectors");
        let inverse = matrix.inverse()?;
        Ok(LabelMatrix { labels, matrix, inverse, rounds: 1 })
    }

    pub fn labels(&self) -> &[Vec<u32>] {
        &self.labels
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &FpMatrix {
        &self.inverse
    }

    /// Label batches drawn, counting the accepted one.
    pub fn rounds(&self) -> usize {
        self.rounds
    }
}

/// Redraws whole batches from `draw` until the labels form an invertible `Â`.
pub(crate) fn draw_until_invertible<T>(
    p: u32,
    max_rounds: usize,
    mut draw: impl FnMut() -> Result<(Vec<Vec<u32>>, T)>,
) -> Result<(LabelMatrix, T)> {
    for round in 1..=max_rounds {
        let (labels, extra) = draw()?;
        if let Ok(mut lm) = LabelMatrix::from_labels(p, labels) {
            lm.rounds = round;
            return Ok((lm, extra));
        }
    }
    Err(Error::RetryBudgetExhausted(max_rounds))
}

fn uniform_labels<R: Rng + ?Sized>(p: u32, t: usize, rng: &mut R) -> Vec<Vec<u32>> {
    (0..t).map(|_| (0..t).map(|_| rng.gen_range(0..p)).collect()).collect()
}

/// Draws `T = mk` labels and redraws the batch until `Â` is invertible.
///
/// The dense backend obtains each label by running the sampler circuit; the
/// structured backend draws labels uniformly, which is the sampler's exact
/// label distribution whenever cubes are disjoint.
pub fn sample_label_matrix(
    instance: &DecodeInstance,
    sigma: SigmaParam,
    backend: Backend,
    seed: u64,
    max_rounds: usize,
) -> Result<LabelMatrix> {
    let field = instance.field();
    let t = field.m() * instance.code.k();
    let mut rng = substream(seed, 0);
    match backend {
        Backend::Structured => {
            draw_until_invertible(field.p(), max_rounds, || Ok((uniform_labels(field.p(), t, &mut rng), ())))
                .map(|(lm, ())| lm)
        }
        Backend::Dense => dense::sample_pcs_batch(&instance.code, sigma, max_rounds, &mut rng).map(|(lm, _)| lm),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub s_hat: Vec<FieldElement>,
    /// `ŝ` expanded to LSB-first digits in F_p^{mk}.
    pub s_hat_digits: Vec<u32>,
    pub sigma: SigmaParam,
    pub backend: Backend,
    pub rounds: usize,
    pub verified: bool,
    /// Dense backend only: exact distribution of the final label measurement.
    pub final_marginal: Option<Vec<f64>>,
}

impl DecodeResult {
    /// Probability of the most likely final outcome, when simulated.
    pub fn peak_probability(&self) -> Option<f64> {
        self.final_marginal.as_ref().map(|m| m.iter().cloned().fold(0.0, f64::max))
    }

    /// CLI-facing JSON; `wall_ms` is `null` when omitted.
    pub fn to_json(&self, wall_ms: Option<f64>) -> serde_json::Value {
        serde_json::json!({
            "s_hat": self.s_hat.iter().map(|x| x.image()).collect::<Vec<_>>(),
            "sigma_r": self.sigma.r(),
            "backend": self.backend.to_string(),
            "rounds": self.rounds,
            "verified": self.verified,
            "wall_ms": wall_ms,
        })
    }
}

/// `Δ_M(t, A ŝ) <= w`; an unbounded promise accepts everything.
pub fn verify_candidate(instance: &DecodeInstance, s_hat: &[FieldElement]) -> bool {
    if instance.w == INFINITE_BOUND {
        return true;
    }
    match instance.code.encode(s_hat) {
        Ok(c) => manhattan_dist(instance.field(), &instance.t, &c).is_ok_and(|d| d <= instance.w),
        Err(_) => false,
    }
}

/// Largest `σ = p^r`, `r < m`, with `σ n < d`.
pub fn select_sigma(field: &FieldParams, n: usize, d: u128) -> Option<SigmaParam> {
    (0..field.m())
        .rev()
        .find(|&r| field.pow_p(r).saturating_mul(n as u128) < d)
        .map(|r| SigmaParam::new(field, r).expect("r < m"))
}

/// Strict window `d/(pn) < σ < d/n`, in integers.
pub fn in_sigma_window(field: &FieldParams, n: usize, d: u128, sigma: SigmaParam) -> bool {
    let sn = sigma.sigma().saturating_mul(n as u128);
    sn < d && d < sn.saturating_mul(field.p() as u128)
}

/// `floor(d / (p n²))`, the promise radius under which the decoder is proven.
pub fn promise_bound(field: &FieldParams, n: usize, d: u128) -> u128 {
    d / (field.p() as u128 * (n as u128).pow(2))
}

/// Whether `t - A s ∈ [σ]^n`, the condition under which every phased cube
/// state is an eigenvector of `U_t` with eigenvalue `ω_p^{-â·ŝ}`.
pub fn in_eigen_regime(instance: &DecodeInstance, s: &[FieldElement], sigma: SigmaParam) -> Result<bool> {
    let c = instance.code.encode(s)?;
    let e = instance.field().sub_vec(&instance.t, &c)?;
    Ok(sigma.contains_all(&e))
}

/// Runs one backend at a fixed cube size.
pub fn decode(instance: &DecodeInstance, sigma: SigmaParam, backend: Backend, opts: &DecodeOptions) -> Result<DecodeResult> {
    match backend {
        Backend::Dense => decode_dense(instance, sigma, opts),
        Backend::Structured => decode_structured(instance, sigma, opts),
    }
}

/// Tries `σ = p^0, p^1, …, p^{m-1}` and returns the first verified answer.
pub fn sigma_search(instance: &DecodeInstance, backend: Backend, opts: &DecodeOptions) -> Result<DecodeResult> {
    let field = instance.field();
    for r in 0..field.m() {
        let sigma = SigmaParam::new(field, r)?;
        let run = DecodeOptions { assert_promise: false, seed: opts.seed.wrapping_add(r as u64), ..*opts };
        match decode(instance, sigma, backend, &run) {
            Ok(res) if res.verified => return Ok(res),
            Ok(_)
            | Err(Error::PromiseViolated(_))
            | Err(Error::OrthogonalityViolated(_))
            | Err(Error::RetryBudgetExhausted(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoSigmaSucceeded)
}

/// Maps a measured label outcome to `ŝ = -o`.
pub(crate) fn negate_outcome(field: &FieldParams, outcome: &[u32]) -> Result<(Vec<u32>, Vec<FieldElement>)> {
    let p = field.p();
    let digits: Vec<u32> = outcome.iter().map(|&o| (p - o) % p).collect();
    let s = field.collapse_vec(&digits)?;
    Ok((digits, s))
}

pub(crate) fn check_structure(instance: &DecodeInstance, sigma: SigmaParam) -> Result<()> {
    let field = instance.field();
    if sigma.r() >= field.m() || sigma.sigma() != field.pow_p(sigma.r()) {
        return Err(Error::BadParams("sigma does not belong to this field".into()));
    }
    if instance.code.k() == 0 {
        return Err(Error::BadParams("nothing to decode for k = 0".into()));
    }
    Ok(())
}
