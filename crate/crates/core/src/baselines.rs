//! Classical direct inversion on the most significant digits, invertibility
//! statistics, and the quantum/classical success-rate comparison.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codes::{gen_instance_with_coordinate_bound, random_code, DecodeInstance};
use crate::decoder::{sigma_search, verify_candidate, Backend, DecodeOptions};
use crate::error::{Error, Result};
use crate::gf::{expand_operator, make_field, FieldElement, FieldParams};
use crate::linalg::{FpMatrix, Solution};
use crate::rng::{random_vector, substream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InversionStatus {
    Recovered,
    Singular,
    Inconsistent,
}

/// Which top-digit rows enter the linear system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowPolicy {
    /// Every row whose digit index is at least the cutoff.
    All,
    /// Exactly `mk` rows, most significant digit level first.
    Square,
    /// The given number of rows, most significant digit level first.
    Count(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectInversionReport {
    pub r_used: usize,
    pub system_shape: (usize, usize),
    pub rank: usize,
    pub status: InversionStatus,
    pub s_hat: Option<Vec<FieldElement>>,
}

/// Row indices `i·m + d` of the expanded operator ordered by digit level
/// `d = m-1, m-2, …, r`, coordinates ascending within a level.
fn rows_by_significance(m: usize, n: usize, r: usize) -> Vec<usize> {
    (r..m).rev().flat_map(|d| (0..n).map(move |i| i * m + d)).collect()
}

/// Solves for `ŝ` from the top `m - r` digits of `t`, which equal those of
/// `A s` when every error coordinate is below `p^r`.
///
/// A candidate is returned only if it satisfies every top-digit row (not just
/// the selected ones) and passes the instance's distance check.
pub fn direct_inversion_decode(instance: &DecodeInstance, r: usize, policy: RowPolicy) -> Result<DirectInversionReport> {
    let field = instance.field();
    let (m, n, k) = (field.m(), instance.code.n(), instance.code.k());
    if r >= m {
        return Err(Error::OutOfRange(format!("cutoff {r} must be < m = {m}")));
    }
    let available = n * (m - r);
    let unknowns = m * k;
    if available < unknowns {
        return Err(Error::PreconditionUnmet(format!(
            "{available} top-digit equations cannot determine {unknowns} unknowns"
        )));
    }
    let ordered = rows_by_significance(m, n, r);
    let take = match policy {
        RowPolicy::All => available,
        RowPolicy::Square => unknowns,
        RowPolicy::Count(c) => c.clamp(unknowns, available),
    };
    let chosen = &ordered[..take];

    let expanded = expand_operator(instance.code.generator(), field)?;
    let t_digits = field.expand_vec(&instance.t);
    let system = expanded.matrix().select_rows(chosen);
    let rhs: Vec<u32> = chosen.iter().map(|&i| t_digits[i]).collect();
    let rank = system.rank();
    let report = |status, s_hat| DirectInversionReport {
        r_used: r,
        system_shape: system.shape(),
        rank,
        status,
        s_hat,
    };
    let x = match system.solve(&rhs)? {
        Solution::Unique(x) => x,
        Solution::Underdetermined { .. } => return Ok(report(InversionStatus::Singular, None)),
        Solution::Inconsistent if rank < unknowns => return Ok(report(InversionStatus::Singular, None)),
        Solution::Inconsistent => return Ok(report(InversionStatus::Inconsistent, None)),
    };
    let all_rows = expanded.matrix().select_rows(&ordered);
    let predicted = all_rows.mul_vec(&x)?;
    let consistent = ordered.iter().zip(&predicted).all(|(&i, &v)| t_digits[i] == v);
    let s_hat = field.collapse_vec(&x)?;
    if !consistent || !verify_candidate(instance, &s_hat) {
        return Ok(report(InversionStatus::Inconsistent, None));
    }
    Ok(report(InversionStatus::Recovered, Some(s_hat)))
}

/// `Π_{i=1}^{T} (1 - p^{-i})`, the probability that a uniform `T × T` matrix
/// over F_p is invertible.
pub fn invertibility_probability(p: u32, t: usize) -> f64 {
    (1..=t).map(|i| 1.0 - (p as f64).powi(-(i as i32))).product()
}

/// Empirical fraction of invertible uniform `T × T` matrices over F_p.
pub fn invertibility_stats(p: u32, t: usize, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::BadParams("trials must be >= 1".into()));
    }
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let data: Vec<u32> = (0..t * t).map(|_| rng.gen_range(0..p)).collect();
            let m = FpMatrix::from_vec(p, t, t, data).expect("entries below p");
            (m.rank() == t) as usize
        })
        .sum();
    Ok(hits as f64 / trials as f64)
}

/// `q^{1 - k/n} / 2`, the minimum distance a random code reaches with high
/// probability.
pub fn random_code_distance_bound(field: &FieldParams, n: usize, k: usize) -> f64 {
    (field.q() as f64).powf(1.0 - k as f64 / n as f64) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PromiseLevel {
    /// Per-coordinate error just below the quantum cube size.
    Tight,
    /// Error shrunk by a factor `n`, leaving the classical system room to
    /// take `β·mk` rows.
    Loose,
    /// Uniformly random error, far outside any unique-decoding radius.
    Beyond,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationConfig {
    pub p: u32,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// Row multiplier for the classical system at the loose level.
    pub beta: usize,
    pub levels: Vec<PromiseLevel>,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        SeparationConfig {
            p: 2,
            m: 12,
            n: 16,
            k: 2,
            trials: 200,
            seed: 0,
            beta: 2,
            levels: vec![PromiseLevel::Tight, PromiseLevel::Loose, PromiseLevel::Beyond],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationRow {
    pub p: u32,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub level: PromiseLevel,
    pub coord_bound: u128,
    pub sigma_r: usize,
    pub classical_cutoff: usize,
    pub classical_rows: usize,
    pub quantum_success: f64,
    pub classical_success: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Success rates of the structured quantum decoder and direct inversion on
/// matched random instances, one row per promise level.
pub fn separation_experiment(config: &SeparationConfig) -> Result<Vec<SeparationRow>> {
    let field = make_field(config.p, config.m, None)?;
    let (n, k, m) = (config.n, config.k, config.m);
    if config.trials == 0 || k == 0 || n < k {
        return Err(Error::BadParams("need trials >= 1 and n >= k >= 1".into()));
    }
    let d_est = random_code_distance_bound(&field, n, k).ceil() as u128;
    let quantum_r = (0..m)
        .rev()
        .find(|&r| field.pow_p(r) * (n as u128) < d_est)
        .ok_or_else(|| Error::BadParams(format!("no cube size fits below d/n with d ~ {d_est}")))?;
    let sigma_q = field.pow_p(quantum_r);
    let tight_bound = sigma_q - 1;

    config
        .levels
        .iter()
        .map(|&level| {
            let coord_bound = match level {
                PromiseLevel::Tight | PromiseLevel::Beyond => tight_bound,
                PromiseLevel::Loose => tight_bound / n as u128,
            };
            // smallest cutoff whose low digits absorb the error
            let cutoff = (0..m).find(|&r| coord_bound < field.pow_p(r)).unwrap_or(m - 1);
            let policy = match level {
                PromiseLevel::Loose => RowPolicy::Count(config.beta * m * k),
                _ => RowPolicy::Square,
            };
            let w = coord_bound * n as u128;
            let outcomes: Vec<(bool, bool, usize)> = (0..config.trials)
                .into_par_iter()
                .map(|i| {
                    let trial_seed = substream(config.seed, i as u64).gen::<u64>();
                    run_trial(&field, n, k, level, coord_bound, w, cutoff, policy, trial_seed)
                })
                .collect::<Result<_>>()?;
            let trials = outcomes.len() as f64;
            let quantum = outcomes.iter().filter(|o| o.0).count() as f64 / trials;
            let classical = outcomes.iter().filter(|o| o.1).count() as f64 / trials;
            Ok(SeparationRow {
                p: config.p,
                m,
                n,
                k,
                level,
                coord_bound,
                sigma_r: quantum_r,
                classical_cutoff: cutoff,
                classical_rows: outcomes.first().map_or(0, |o| o.2),
                quantum_success: quantum,
                classical_success: classical,
                trials: config.trials,
                seed: config.seed,
            })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    field: &FieldParams,
    n: usize,
    k: usize,
    level: PromiseLevel,
    coord_bound: u128,
    w: u128,
    cutoff: usize,
    policy: RowPolicy,
    seed: u64,
) -> Result<(bool, bool, usize)> {
    let code = random_code(field, n, k, seed)?;
    let (instance, s_true) = match level {
        PromiseLevel::Beyond => {
            let mut rng = substream(seed, 1);
            let s = random_vector(field, k, &mut rng);
            let t = random_vector(field, n, &mut rng);
            (DecodeInstance::new(code, t, w, None)?, s)
        }
        _ => {
            let inst = gen_instance_with_coordinate_bound(&code, coord_bound, w, seed)?;
            let s = inst.s_true.clone().expect("planted");
            (inst, s)
        }
    };
    let quantum = match sigma_search(&instance, Backend::Structured, &DecodeOptions::with_seed(seed)) {
        Ok(res) => res.s_hat == s_true,
        Err(Error::NoSigmaSucceeded) => false,
        Err(e) => return Err(e),
    };
    let report = direct_inversion_decode(&instance, cutoff, policy)?;
    let classical = report.status == InversionStatus::Recovered && report.s_hat.as_deref() == Some(&s_true[..]);
    Ok((quantum, classical, report.system_shape.0))
}

/// Writes the comparison table as CSV with a header row.
pub fn write_separation_csv<W: Write>(out: W, rows: &[SeparationRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}
