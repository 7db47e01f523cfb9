use num_complex::Complex64;
use rand::Rng;

use super::{check_structure, draw_until_invertible, negate_outcome, verify_candidate, Backend, DecodeOptions, DecodeResult, DenseRepresentation, LabelMatrix};
use crate::codes::{DecodeInstance, LinearCode};
use crate::error::{Error, Result};
use crate::qsim::{check_orthogonality, label_digits, pcs_sampler_state, sample_index, BranchState, DenseState, Register, RegisterLayout, SigmaParam};
use crate::rng::substream;

/// Largest composite register simulated as a full statevector under
/// [`DenseRepresentation::Auto`].
pub const FULL_STATE_LIMIT: u128 = 1 << 20;

/// Runs the sampler circuit `T` times per batch until the labels are invertible.
pub(crate) fn sample_pcs_batch<R: Rng + ?Sized>(
    code: &LinearCode,
    sigma: SigmaParam,
    max_rounds: usize,
    rng: &mut R,
) -> Result<(LabelMatrix, Vec<Vec<Complex64>>)> {
    check_orthogonality(code, sigma)?;
    let field = code.field();
    let t = field.m() * code.k();
    // the pre-measurement state is the same for every sample
    let state = pcs_sampler_state(code, sigma)?;
    let marginal = state.marginal(Register::Label)?;
    draw_until_invertible(field.p(), max_rounds, || {
        let mut labels = Vec::with_capacity(t);
        let mut states = Vec::with_capacity(t);
        for _ in 0..t {
            let outcome = sample_index(&marginal, rng);
            let collapsed = state.collapse(Register::Label, outcome)?;
            labels.push(label_digits(field.p(), t, outcome));
            states.push(collapsed.slice_at_label(outcome)?);
        }
        Ok((labels, states))
    })
}

/// Every step simulated exactly, from preparing the phased cube states to the
/// final Fourier-basis measurement.
///
/// `U_t^ℓ` is applied as `ℓ` controlled shifts. The final outcome is sampled
/// from the exact marginal, which is also returned.
pub fn decode_dense(instance: &DecodeInstance, sigma: SigmaParam, opts: &DecodeOptions) -> Result<DecodeResult> {
    check_structure(instance, sigma)?;
    let code = &instance.code;
    let field = code.field();
    let t = field.m() * code.k();
    let mut rng = substream(opts.seed, 0);
    let (lm, states) = sample_pcs_batch(code, sigma, opts.max_rounds, &mut rng)?;

    let layout = RegisterLayout::new(field, code.n(), t, t);
    let full = match opts.representation {
        DenseRepresentation::Statevector => true,
        DenseRepresentation::Branch => false,
        DenseRepresentation::Auto => layout.dimension() <= FULL_STATE_LIMIT,
    };
    let marginal = if full {
        let mut state = DenseState::from_product(layout, 0, &states)?;
        state.qft_label(false)?;
        state.permute_label(lm.inverse())?;
        state.controlled_shift_power(field, &instance.t)?;
        state.permute_label(lm.matrix())?;
        state.qft_label(true)?;
        state.marginal(Register::Label)?
    } else {
        let mut state = BranchState::new(field, code.n(), t, states, &instance.t)?;
        state.qft_label()?;
        state.permute_label(lm.inverse())?;
        state.controlled_shift_power();
        state.permute_label(lm.matrix())?;
        state.inverse_fourier_marginal()
    };

    let outcome = sample_index(&marginal, &mut substream(opts.seed, 1));
    let (digits, s_hat) = negate_outcome(field, &label_digits(field.p(), t, outcome))?;
    if !verify_candidate(instance, &s_hat) {
        return Err(Error::PromiseViolated(format!(
            "measured candidate fails verification (outcome probability {:.3e})",
            marginal[outcome]
        )));
    }
    Ok(DecodeResult {
        s_hat,
        s_hat_digits: digits,
        sigma,
        backend: Backend::Dense,
        rounds: lm.rounds(),
        verified: true,
        final_marginal: Some(marginal),
    })
}
