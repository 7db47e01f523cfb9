use num_complex::Complex64;

use super::{register_index, roots_of_unity};
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldParams};

/// Cube side `σ = p^r`. The set `[σ]` of images below `σ` is exactly the
/// elements whose top `m - r` digits vanish, an additive subgroup of F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SigmaParam {
    r: usize,
    sigma: u128,
}

impl SigmaParam {
    pub fn new(field: &FieldParams, r: usize) -> Result<Self> {
        if r >= field.m() {
            return Err(Error::OutOfRange(format!("sigma exponent {r} must be < m = {}", field.m())));
        }
        Ok(SigmaParam { r, sigma: field.pow_p(r) })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn sigma(&self) -> u128 {
        self.sigma
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.image() < self.sigma
    }

    pub fn contains_all(&self, v: &[FieldElement]) -> bool {
        v.iter().all(|&a| self.contains(a))
    }
}

/// Every `z ∈ [σ]^n` in register-index order.
fn cube_points(n: usize, sigma: u128) -> impl Iterator<Item = Vec<FieldElement>> {
    let count = (sigma as usize).pow(n as u32);
    (0..count).map(move |mut c| {
        (0..n)
            .map(|_| {
                let z = FieldElement::from_image_unchecked((c % sigma as usize) as u128);
                c /= sigma as usize;
                z
            })
            .collect()
    })
}

/// `C_σ(y) = σ^{-n/2} Σ_{z ∈ [σ]^n} |y + z⟩` over one register.
pub fn cube_state(field: &FieldParams, n: usize, anchor: &[FieldElement], sigma: SigmaParam) -> Vec<Complex64> {
    let dim = (field.q() as usize).pow(n as u32);
    let amp = Complex64::new((sigma.sigma() as f64).powf(-(n as f64) / 2.0), 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for z in cube_points(n, sigma.sigma()) {
        let v: Vec<FieldElement> = anchor.iter().zip(&z).map(|(&a, &b)| field.add(a, b)).collect();
        out[register_index(field, &v)] += amp;
    }
    out
}

/// The phased cube state `Φ(â) = q^{-k/2} Σ_c ω_p^{â·ĉ} C_σ(A c)` for an
/// LSB-first label `â ∈ F_p^{mk}`.
pub fn pcs_state(code: &LinearCode, sigma: SigmaParam, label: &[u32]) -> Result<Vec<Complex64>> {
    let field = code.field();
    let (n, k) = (code.n(), code.k());
    if label.len() != field.m() * k {
        return Err(Error::LengthMismatch { expected: field.m() * k, got: label.len() });
    }
    let p = field.p();
    let roots = roots_of_unity(p);
    let dim = (field.q() as usize).pow(n as u32);
    let scale = (field.q() as f64).powf(-(k as f64) / 2.0);
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for c in 0..code.size() {
        let msg = code.message(c);
        let phase = field
            .expand_vec(&msg)
            .iter()
            .zip(label)
            .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p as u64);
        let weight = roots[phase as usize] * scale;
        let cube = cube_state(field, n, &code.encode(&msg)?, sigma);
        for (o, c) in out.iter_mut().zip(cube) {
            *o += weight * c;
        }
    }
    Ok(out)
}

/// `⟨C_σ(0)|C_σ(Δ)⟩ = Π_i |[σ] ∩ (Δ_i + [σ])| / σ`.
///
/// Because `[σ]` is a subgroup, each factor is `1` when `Δ_i ∈ [σ]` and `0`
/// otherwise.
pub fn cube_overlap(field: &FieldParams, delta: &[FieldElement], sigma: SigmaParam) -> Result<f64> {
    let mut out = 1.0;
    for &d in delta {
        field.check(d)?;
        let shared = if sigma.contains(d) { sigma.sigma() } else { 0 };
        out *= shared as f64 / sigma.sigma() as f64;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{make_field, FqMatrix};
    use crate::qsim::{inner, TOLERANCE};

    #[test]
    fn sigma_param_bounds() {
        let f = make_field(2, 4, None).unwrap();
        assert_eq!(SigmaParam::new(&f, 3).unwrap().sigma(), 8);
        assert!(SigmaParam::new(&f, 4).is_err());
        let s = SigmaParam::new(&f, 2).unwrap();
        assert!(s.contains(FieldElement::from_image_unchecked(3)));
        assert!(!s.contains(FieldElement::from_image_unchecked(4)));
    }

    #[test]
    fn overlap_examples() {
        let f = make_field(2, 2, None).unwrap();
        let s = SigmaParam::new(&f, 1).unwrap();
        let e = |x| f.elements(&[x]).unwrap();
        assert_eq!(cube_overlap(&f, &e(1), s).unwrap(), 1.0);
        // ‖Δ‖ = 2 = nσ yet the cubes {0,1} and {2,3} are disjoint
        assert_eq!(cube_overlap(&f, &e(2), s).unwrap(), 0.0);
        let a = cube_state(&f, 1, &e(0), s);
        let b = cube_state(&f, 1, &e(2), s);
        assert!(inner(&a, &b).norm() < TOLERANCE);
    }

    #[test]
    fn pcs_is_normalised_when_cubes_are_disjoint() {
        let f = make_field(2, 2, None).unwrap();
        let a = FqMatrix::from_images(&f, &[vec![1], vec![2], vec![3]]).unwrap();
        let code = LinearCode::new(f.clone(), a).unwrap();
        let s = SigmaParam::new(&f, 0).unwrap();
        for label in 0..4u32 {
            let phi = pcs_state(&code, s, &[label & 1, label >> 1]).unwrap();
            assert!((inner(&phi, &phi).re - 1.0).abs() < TOLERANCE);
        }
        assert!(pcs_state(&code, s, &[1]).is_err());
    }
}
