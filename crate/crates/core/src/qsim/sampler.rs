use num_complex::Complex64;
use rand::Rng;

use super::{label_digits, DenseState, Register, RegisterLayout, SigmaParam};
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::FieldElement;

/// One measured phased cube state.
#[derive(Clone, Debug, PartialEq)]
pub struct PcsSample {
    /// LSB-first label `â ∈ F_p^{mk}`.
    pub label: Vec<u32>,
    pub label_index: usize,
    /// Exact label distribution before measurement.
    pub marginal: Vec<f64>,
    /// Normalised cube register after measurement.
    pub state: Vec<Complex64>,
}

/// Fails unless cubes around distinct codewords are disjoint.
pub(crate) fn check_orthogonality(code: &LinearCode, sigma: SigmaParam) -> Result<()> {
    let n = code.n() as u128;
    if let Some(d) = code.distance() {
        if d <= sigma.sigma().saturating_mul(n) {
            return Err(Error::OrthogonalityViolated(format!(
                "d = {d} <= sigma * n = {}",
                sigma.sigma() * n
            )));
        }
    }
    for c in 1..code.size() {
        let word = code.encode(&code.message(c))?;
        if sigma.contains_all(&word) {
            let images: Vec<u128> = word.iter().map(|x| x.image()).collect();
            return Err(Error::OrthogonalityViolated(format!(
                "nonzero codeword {images:?} lies inside [sigma]^n"
            )));
        }
    }
    Ok(())
}

/// The sampler circuit up to (not including) the label measurement.
///
/// 1. low-digit Fourier on the cube register gives `C_σ(0)`;
/// 2. Fourier on the message register gives the uniform superposition of `c`;
/// 3. controlled addition of `A c` into the cube register;
/// 4. reading `c ∈ F_q^k` as `ĉ ∈ F_p^{mk}` is the identity on this encoding;
/// 5. Fourier on the label register.
pub fn pcs_sampler_state(code: &LinearCode, sigma: SigmaParam) -> Result<DenseState> {
    let field = code.field();
    let layout = RegisterLayout::new(field, code.n(), field.m() * code.k(), 1);
    let mut state = DenseState::zero(layout)?;
    state.prep_cube(field, 0, &vec![FieldElement::ZERO; code.n()], sigma)?;
    state.qft_label(false)?;
    state.controlled_add_codeword(code, 0)?;
    state.qft_label(false)?;
    Ok(state)
}

/// Runs the sampler circuit and measures the label.
pub fn sample_pcs<R: Rng + ?Sized>(code: &LinearCode, sigma: SigmaParam, rng: &mut R) -> Result<PcsSample> {
    check_orthogonality(code, sigma)?;
    let state = pcs_sampler_state(code, sigma)?;
    let marginal = state.marginal(Register::Label)?;
    let (label_index, collapsed) = state.measure(Register::Label, rng)?;
    let layout = *collapsed.layout();
    Ok(PcsSample {
        label: label_digits(layout.p, layout.label_digits, label_index),
        label_index,
        marginal,
        state: collapsed.slice_at_label(label_index)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{make_field, FqMatrix};
    use crate::qsim::{inner, pcs_state, TOLERANCE};
    use crate::rng::seeded;

    #[test]
    fn sampler_output_matches_direct_pcs() {
        let f = make_field(2, 2, None).unwrap();
        let a = FqMatrix::from_images(&f, &[vec![1], vec![2], vec![3]]).unwrap();
        let code = LinearCode::new(f.clone(), a).unwrap().with_distance(4);
        let sigma = SigmaParam::new(&f, 0).unwrap();
        let mut rng = seeded(3);
        for _ in 0..8 {
            let s = sample_pcs(&code, sigma, &mut rng).unwrap();
            assert!(s.marginal.iter().all(|&x| (x - 0.25).abs() < 1e-12));
            let phi = pcs_state(&code, sigma, &s.label).unwrap();
            assert!(s.state.iter().zip(&phi).all(|(a, b)| (a - b).norm() < TOLERANCE));
            assert!((inner(&phi, &s.state).norm() - 1.0).abs() < TOLERANCE);
        }
    }

    #[test]
    fn overlapping_cubes_are_refused() {
        let f = make_field(2, 2, None).unwrap();
        let a = FqMatrix::from_images(&f, &[vec![1], vec![1]]).unwrap();
        let code = LinearCode::new(f.clone(), a).unwrap();
        let sigma = SigmaParam::new(&f, 1).unwrap();
        assert!(matches!(sample_pcs(&code, sigma, &mut seeded(0)), Err(Error::OrthogonalityViolated(_))));
        let code = code.with_distance(2);
        assert!(matches!(
            sample_pcs(&code, SigmaParam::new(&f, 0).unwrap(), &mut seeded(0)),
            Err(Error::OrthogonalityViolated(_))
        ));
    }
}
