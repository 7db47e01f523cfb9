use super::{check_structure, draw_until_invertible, in_eigen_regime, negate_outcome, uniform_labels, verify_candidate, Backend, DecodeOptions, DecodeResult};
use crate::codes::DecodeInstance;
use crate::error::{Error, Result};
use crate::gf::{expand_operator, top_digit_submatrix};
use crate::linalg::Solution;
use crate::qsim::SigmaParam;
use crate::rng::substream;

/// Digits `û` of the unique `s` with `t - A s ∈ [σ]^n`.
///
/// That membership says the top `m - r` digits of `A s` and `t` agree, a linear
/// system over F_p. No solution means `U_t` has no common eigenbasis with the
/// phased cube states; several solutions mean two codewords share a cube.
pub fn eigen_message(instance: &DecodeInstance, sigma: SigmaParam) -> Result<Vec<u32>> {
    let field = instance.field();
    let expanded = expand_operator(instance.code.generator(), field)?;
    let rows = expanded.top_rows(sigma.r())?;
    let system = top_digit_submatrix(&expanded, sigma.r())?;
    let t_digits = field.expand_vec(&instance.t);
    let rhs: Vec<u32> = rows.iter().map(|&i| t_digits[i]).collect();
    match system.solve(&rhs)? {
        Solution::Unique(u) => Ok(u),
        Solution::Inconsistent => Err(Error::PromiseViolated(format!(
            "t is not within [{}]^n of any codeword",
            sigma.sigma()
        ))),
        Solution::Underdetermined { kernel_dim, .. } => Err(Error::PromiseViolated(format!(
            "{} messages share the cube around t (kernel dimension {kernel_dim})",
            (field.p() as u128).saturating_pow(kernel_dim as u32)
        ))),
    }
}

/// Analytic run: each register kicks back `ω_p^{-ℓ_j â_j·ŝ}` (a single
/// multiply-by-`ℓ` rather than `ℓ` shifts), the phases telescope to
/// `ω_p^{-ŝ·z}` and the final measurement returns `-ŝ` with certainty.
pub fn decode_structured(instance: &DecodeInstance, sigma: SigmaParam, opts: &DecodeOptions) -> Result<DecodeResult> {
    check_structure(instance, sigma)?;
    let field = instance.field();
    let p = field.p();
    let n = instance.code.n() as u128;
    if opts.assert_promise {
        if let Some(d) = instance.code.distance() {
            if sigma.sigma().saturating_mul(n) >= d {
                return Err(Error::PromiseViolated(format!(
                    "sigma * n = {} is not below d = {d}",
                    sigma.sigma() * n
                )));
            }
        }
        if let Some(s) = &instance.s_true {
            if !in_eigen_regime(instance, s, sigma)? {
                return Err(Error::PromiseViolated(format!(
                    "t - A s_true has a coordinate outside [{}]",
                    sigma.sigma()
                )));
            }
        }
    }
    let u = eigen_message(instance, sigma)?;

    let t = field.m() * instance.code.k();
    let mut rng = substream(opts.seed, 0);
    let (lm, ()) = draw_until_invertible(p, opts.max_rounds, || Ok((uniform_labels(p, t, &mut rng), ())))?;

    // θ_j = â_j · û: the eigenphase exponent of register j
    let theta = lm.matrix().transpose().mul_vec(&u)?;
    // Σ_j ℓ_j θ_j with ℓ = Â^{-1} z equals ((Â^{-1})ᵀ θ) · z, so the label
    // register ends in the Fourier state of -(Â^{-1})ᵀ θ
    let phase_vector = lm.inverse().transpose().mul_vec(&theta)?;
    let outcome: Vec<u32> = phase_vector.iter().map(|&x| (p - x) % p).collect();
    let (digits, s_hat) = negate_outcome(field, &outcome)?;
    debug_assert_eq!(digits, u);

    if !verify_candidate(instance, &s_hat) {
        return Err(Error::PromiseViolated(format!(
            "eigen-consistent message fails verification against w = {}",
            instance.w
        )));
    }
    Ok(DecodeResult {
        s_hat,
        s_hat_digits: digits,
        sigma,
        backend: Backend::Structured,
        rounds: lm.rounds(),
        verified: true,
        final_marginal: None,
    })
}
