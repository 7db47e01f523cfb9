use num_complex::Complex64;

use super::{inner, label_digits, label_value, roots_of_unity, shift_table};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldParams};
use crate::linalg::FpMatrix;

/// Exact representation of `Σ_z α_z |z⟩ ⊗_j U_t^{ℓ_j(z)} ψ_j` for a fixed shift
/// `U_t`, without materialising the composite register.
///
/// This is the form the decoder's state keeps between the label Fourier
/// transforms, so it reproduces the full statevector exactly while its cost
/// grows with `p^T` instead of `p^T q^{nT}`.
#[derive(Clone, Debug)]
pub struct BranchState {
    p: u32,
    label_digits: usize,
    /// `powers[j][a] = U_t^a ψ_j`.
    powers: Vec<Vec<Vec<Complex64>>>,
    alpha: Vec<Complex64>,
    /// `exponents[z * R + j] = ℓ_j(z)`.
    exponents: Vec<u32>,
}

impl BranchState {
    /// `|0⟩_label ⊗ ψ_0 ⊗ … ⊗ ψ_{R-1}` with shift vector `t`.
    pub fn new(field: &FieldParams, n: usize, label_digits: usize, registers: Vec<Vec<Complex64>>, t: &[FieldElement]) -> Result<Self> {
        if t.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: t.len() });
        }
        if registers.len() > label_digits {
            return Err(Error::BadRegister("fewer label digits than cube registers".into()));
        }
        let dim = (field.q() as usize).pow(n as u32);
        if let Some(bad) = registers.iter().find(|r| r.len() != dim) {
            return Err(Error::LengthMismatch { expected: dim, got: bad.len() });
        }
        let table = shift_table(field, n, t);
        let p = field.p();
        let powers = registers
            .into_iter()
            .map(|psi| {
                let mut out = vec![psi];
                for _ in 1..p {
                    let prev = out.last().expect("nonempty");
                    let mut next = vec![Complex64::new(0.0, 0.0); dim];
                    for (v, &a) in prev.iter().enumerate() {
                        next[table[v]] = a;
                    }
                    out.push(next);
                }
                out
            })
            .collect::<Vec<_>>();
        let labels = (p as usize).pow(label_digits as u32);
        let mut alpha = vec![Complex64::new(0.0, 0.0); labels];
        alpha[0] = Complex64::new(1.0, 0.0);
        let exponents = vec![0; labels * powers.len()];
        Ok(BranchState { p, label_digits, powers, alpha, exponents })
    }

    fn registers(&self) -> usize {
        self.powers.len()
    }

    fn labels(&self) -> usize {
        self.alpha.len()
    }

    /// Forward Fourier on the label. Only defined while every branch carries
    /// the same cube-register state, which holds before any controlled shift.
    pub fn qft_label(&mut self) -> Result<()> {
        let r = self.registers();
        if (0..self.labels()).any(|z| self.exponents[z * r..(z + 1) * r] != self.exponents[..r]) {
            return Err(Error::BadRegister("label is entangled with the cube registers".into()));
        }
        let roots = roots_of_unity(self.p);
        let scale = (self.labels() as f64).powf(-0.5);
        let digits: Vec<Vec<u32>> = (0..self.labels()).map(|z| label_digits(self.p, self.label_digits, z)).collect();
        self.alpha = (0..self.labels())
            .map(|o| {
                (0..self.labels())
                    .map(|z| self.alpha[z] * roots[dot(&digits[o], &digits[z], self.p)])
                    .sum::<Complex64>()
                    * scale
            })
            .collect();
        Ok(())
    }

    /// `|z⟩ → |M z⟩` for invertible `M`.
    pub fn permute_label(&mut self, matrix: &FpMatrix) -> Result<()> {
        let t = self.label_digits;
        if matrix.shape() != (t, t) || matrix.p() != self.p {
            return Err(Error::BadShape(format!("expected a {t}x{t} matrix over F_{}", self.p)));
        }
        if matrix.rank() < t {
            return Err(Error::BadShape("label permutation is singular".into()));
        }
        let r = self.registers();
        let mut alpha = vec![Complex64::new(0.0, 0.0); self.labels()];
        let mut exponents = vec![0; self.exponents.len()];
        for z in 0..self.labels() {
            let target = label_value(self.p, &matrix.mul_vec(&label_digits(self.p, t, z))?);
            alpha[target] = self.alpha[z];
            exponents[target * r..(target + 1) * r].copy_from_slice(&self.exponents[z * r..(z + 1) * r]);
        }
        self.alpha = alpha;
        self.exponents = exponents;
        Ok(())
    }

    /// Register `j` receives `U_t^{z_j}` on branch `z`.
    pub fn controlled_shift_power(&mut self) {
        let r = self.registers();
        for z in 0..self.labels() {
            let digits = label_digits(self.p, self.label_digits, z);
            for j in 0..r {
                let e = &mut self.exponents[z * r + j];
                *e = (*e + digits[j]) % self.p;
            }
        }
    }

    /// Label distribution after an inverse Fourier transform on the label.
    pub fn inverse_fourier_marginal(&self) -> Vec<f64> {
        let p = self.p as usize;
        let r = self.registers();
        let gram: Vec<Vec<Complex64>> = self
            .powers
            .iter()
            .map(|pw| {
                let mut g = vec![Complex64::new(0.0, 0.0); p * p];
                for a in 0..p {
                    for b in 0..p {
                        g[a * p + b] = inner(&pw[a], &pw[b]);
                    }
                }
                g
            })
            .collect();
        let labels = self.labels();
        let kernel: Vec<Complex64> = (0..labels * labels)
            .map(|idx| {
                let (z, w) = (idx / labels, idx % labels);
                (0..r).fold(Complex64::new(1.0, 0.0), |acc, j| {
                    let a = self.exponents[z * r + j] as usize;
                    let b = self.exponents[w * r + j] as usize;
                    acc * gram[j][a * p + b]
                })
            })
            .collect();
        let roots = roots_of_unity(self.p);
        let digits: Vec<Vec<u32>> = (0..labels).map(|z| label_digits(self.p, self.label_digits, z)).collect();
        let scale = 1.0 / labels as f64;
        (0..labels)
            .map(|o| {
                let beta: Vec<Complex64> = (0..labels)
                    .map(|z| self.alpha[z] * roots[(p - dot(&digits[o], &digits[z], self.p)) % p])
                    .collect();
                let mut total = Complex64::new(0.0, 0.0);
                for z in 0..labels {
                    if beta[z].norm_sqr() == 0.0 {
                        continue;
                    }
                    for w in 0..labels {
                        total += beta[z].conj() * beta[w] * kernel[z * labels + w];
                    }
                }
                total.re * scale
            })
            .collect()
    }
}

fn dot(a: &[u32], b: &[u32], p: u32) -> usize {
    (a.iter().zip(b).map(|(&x, &y)| x as u64 * y as u64).sum::<u64>() % p as u64) as usize
}
