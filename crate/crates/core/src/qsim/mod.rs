//! Exact dense statevector simulation of qudit registers over F_p.
//!
//! A state lives on `T` label digits followed by `R` cube registers, each cube
//! register holding a vector in F_q^n as `n·m` digits. The basis index is the
//! base-p number whose slot `s` digit is read at weight `p^s`:
//!
//! * label digit `j` sits at slot `j`;
//! * digit `d` of coordinate `i` of cube register `j` sits at slot
//!   `T + j·n·m + i·m + d`.
//!
//! Within one cube register, the value of a vector `y` is therefore
//! `Σ_i ỹ_i q^i`.

mod branch;
mod cube;
mod dump;
mod sampler;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldParams};
use crate::linalg::FpMatrix;

pub use branch::BranchState;
pub use cube::{cube_overlap, cube_state, pcs_state, SigmaParam};
pub use dump::{read_state_dump, write_state_dump, DumpHeader, DUMP_FORMAT_VERSION};
pub use sampler::{pcs_sampler_state, sample_pcs, PcsSample};
pub(crate) use sampler::check_orthogonality;

/// Hard cap on the number of amplitudes a [`DenseState`] may hold.
pub const MAX_AMPLITUDES: u128 = 1 << 24;

/// Amplitude tolerance used throughout the simulator's self-checks.
pub const TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    pub p: u32,
    pub m: usize,
    pub n: usize,
    pub label_digits: usize,
    pub registers: usize,
}

/// Which part of the composite register an operation addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    Label,
    Cube(usize),
}

impl RegisterLayout {
    pub fn new(field: &FieldParams, n: usize, label_digits: usize, registers: usize) -> Self {
        RegisterLayout { p: field.p(), m: field.m(), n, label_digits, registers }
    }

    pub fn slots(&self) -> usize {
        self.label_digits + self.registers * self.n * self.m
    }

    /// `p^T · q^{nR}`, saturating.
    pub fn dimension(&self) -> u128 {
        (0..self.slots()).fold(1u128, |acc, _| acc.saturating_mul(self.p as u128))
    }

    pub fn register_slots(&self, reg: Register) -> Result<(usize, usize)> {
        match reg {
            Register::Label => Ok((0, self.label_digits)),
            Register::Cube(j) if j < self.registers => {
                Ok((self.label_digits + j * self.n * self.m, self.n * self.m))
            }
            Register::Cube(j) => Err(Error::BadRegister(format!(
                "cube register {j} does not exist ({} registers)",
                self.registers
            ))),
        }
    }

    fn check_field(&self, field: &FieldParams) -> Result<()> {
        if field.p() != self.p || field.m() != self.m {
            return Err(Error::FieldMismatch(format!(
                "layout is over p = {}, m = {}; field has p = {}, m = {}",
                self.p,
                self.m,
                field.p(),
                field.m()
            )));
        }
        Ok(())
    }
}

fn pow(p: u32, e: usize) -> usize {
    (p as usize).pow(e as u32)
}

/// Index of `y ∈ F_q^n` inside one cube register.
pub fn register_index(field: &FieldParams, y: &[FieldElement]) -> usize {
    let q = field.q() as usize;
    y.iter().rev().fold(0usize, |acc, a| acc * q + a.image() as usize)
}

/// Inverse of [`register_index`].
pub fn register_vector(field: &FieldParams, n: usize, mut index: usize) -> Vec<FieldElement> {
    let q = field.q() as usize;
    (0..n)
        .map(|_| {
            let a = FieldElement::from_image_unchecked((index % q) as u128);
            index /= q;
            a
        })
        .collect()
}

/// `table[v]` = index of `vec(v) + y` for every register value `v`.
pub fn shift_table(field: &FieldParams, n: usize, y: &[FieldElement]) -> Vec<usize> {
    let size = pow(field.p(), field.m() * n);
    (0..size)
        .into_par_iter()
        .map(|v| {
            let x = register_vector(field, n, v);
            let shifted: Vec<FieldElement> = x.iter().zip(y).map(|(&a, &b)| field.add(a, b)).collect();
            register_index(field, &shifted)
        })
        .collect()
}

/// `ω_p^e` for `e ∈ [0, p)`.
pub fn roots_of_unity(p: u32) -> Vec<Complex64> {
    (0..p)
        .map(|e| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / p as f64))
        .collect()
}

/// The p-point Fourier matrix `p^{-1/2} ω^{±ab}`, row-major.
fn fourier_matrix(p: u32, inverse: bool) -> Vec<Complex64> {
    let roots = roots_of_unity(p);
    let scale = 1.0 / (p as f64).sqrt();
    let mut out = Vec::with_capacity((p * p) as usize);
    for a in 0..p {
        for b in 0..p {
            let mut e = (a * b) % p;
            if inverse {
                e = (p - e) % p;
            }
            out.push(roots[e as usize] * scale);
        }
    }
    out
}

/// Inner product `⟨a|b⟩`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// The all-zero basis state.
    pub fn zero(layout: RegisterLayout) -> Result<Self> {
        let dim = layout.dimension();
        if dim > MAX_AMPLITUDES {
            return Err(Error::ScaleExceeded { amplitudes: dim, limit: MAX_AMPLITUDES });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim as usize];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { layout, amps })
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        let dim = layout.dimension();
        if dim > MAX_AMPLITUDES {
            return Err(Error::ScaleExceeded { amplitudes: dim, limit: MAX_AMPLITUDES });
        }
        if amps.len() as u128 != dim {
            return Err(Error::LengthMismatch { expected: dim as usize, got: amps.len() });
        }
        Ok(DenseState { layout, amps })
    }

    /// `|label⟩ ⊗ ψ_0 ⊗ … ⊗ ψ_{R-1}`, each `ψ_j` given over its register's `q^n` values.
    pub fn from_product(layout: RegisterLayout, label: usize, registers: &[Vec<Complex64>]) -> Result<Self> {
        if registers.len() != layout.registers {
            return Err(Error::LengthMismatch { expected: layout.registers, got: registers.len() });
        }
        let reg_dim = pow(layout.p, layout.n * layout.m);
        if let Some(bad) = registers.iter().find(|r| r.len() != reg_dim) {
            return Err(Error::LengthMismatch { expected: reg_dim, got: bad.len() });
        }
        let label_dim = pow(layout.p, layout.label_digits);
        if label >= label_dim {
            return Err(Error::BadRegister(format!("label value {label} >= {label_dim}")));
        }
        let mut state = Self::zero(layout)?;
        state.amps.par_iter_mut().enumerate().for_each(|(i, a)| {
            if i % label_dim != label {
                *a = Complex64::new(0.0, 0.0);
                return;
            }
            let mut rest = i / label_dim;
            let mut amp = Complex64::new(1.0, 0.0);
            for r in registers {
                amp *= r[rest % reg_dim];
                rest /= reg_dim;
            }
            *a = amp;
        });
        Ok(state)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// Applies a `p × p` unitary (row-major) to one digit slot.
    pub fn apply_slot_unitary(&mut self, slot: usize, u: &[Complex64]) -> Result<()> {
        let p = self.layout.p as usize;
        if slot >= self.layout.slots() {
            return Err(Error::BadRegister(format!("slot {slot} out of range")));
        }
        if u.len() != p * p {
            return Err(Error::LengthMismatch { expected: p * p, got: u.len() });
        }
        let stride = pow(self.layout.p, slot);
        self.amps.par_chunks_mut(stride * p).for_each(|block| {
            let mut buf = vec![Complex64::new(0.0, 0.0); p];
            for o in 0..stride {
                for (v, b) in buf.iter_mut().enumerate() {
                    *b = block[o + v * stride];
                }
                for a in 0..p {
                    block[o + a * stride] = (0..p).map(|b| u[a * p + b] * buf[b]).sum();
                }
            }
        });
        Ok(())
    }

    /// Z_p Fourier transform on one slot, `|b⟩ → p^{-1/2} Σ_a ω^{±ab} |a⟩`.
    pub fn digit_fourier(&mut self, slot: usize, inverse: bool) -> Result<()> {
        self.apply_slot_unitary(slot, &fourier_matrix(self.layout.p, inverse))
    }

    /// Fourier transform over Z_p^T on the label register, digit by digit.
    pub fn qft_label(&mut self, inverse: bool) -> Result<()> {
        let f = fourier_matrix(self.layout.p, inverse);
        for slot in 0..self.layout.label_digits {
            self.apply_slot_unitary(slot, &f)?;
        }
        Ok(())
    }

    /// Rewrites `amps[i] ← amps[src(i)]`; `src` must be a bijection.
    fn pull(&mut self, src: impl Fn(usize) -> usize + Sync) {
        let old = &self.amps;
        let new: Vec<Complex64> = (0..old.len()).into_par_iter().map(|i| old[src(i)]).collect();
        self.amps = new;
    }

    /// Stride and size of cube register `j` inside the basis index.
    fn cube_geometry(&self, j: usize) -> Result<(usize, usize)> {
        let (start, len) = self.layout.register_slots(Register::Cube(j))?;
        Ok((pow(self.layout.p, start), pow(self.layout.p, len)))
    }

    /// Prepares the cube state `C_σ(y)` on a register starting from `|0⟩`:
    /// Fourier on the `r` low digits of every coordinate, then the shift `U_y`.
    pub fn prep_cube(&mut self, field: &FieldParams, j: usize, anchor: &[FieldElement], sigma: SigmaParam) -> Result<()> {
        self.layout.check_field(field)?;
        let (start, _) = self.layout.register_slots(Register::Cube(j))?;
        let m = self.layout.m;
        let f = fourier_matrix(self.layout.p, false);
        for i in 0..self.layout.n {
            for d in 0..sigma.r() {
                self.apply_slot_unitary(start + i * m + d, &f)?;
            }
        }
        self.apply_shift(field, j, anchor, 1)
    }

    /// `U_x^ℓ` on cube register `j`: `|v⟩ → |v + ℓ·x⟩`.
    pub fn apply_shift(&mut self, field: &FieldParams, j: usize, x: &[FieldElement], power: u32) -> Result<()> {
        self.layout.check_field(field)?;
        self.check_vector(field, x)?;
        let (stride, size) = self.cube_geometry(j)?;
        let back: Vec<FieldElement> = x.iter().map(|&a| field.neg(field.scale(power, a))).collect();
        let table = shift_table(field, self.layout.n, &back);
        self.pull(|i| {
            let v = (i / stride) % size;
            i - v * stride + table[v] * stride
        });
        Ok(())
    }

    fn check_vector(&self, field: &FieldParams, x: &[FieldElement]) -> Result<()> {
        if x.len() != self.layout.n {
            return Err(Error::LengthMismatch { expected: self.layout.n, got: x.len() });
        }
        x.iter().try_for_each(|&a| field.check(a).map(|_| ()))
    }

    /// For every cube register `j`, applies `U_t^{ℓ_j}` where `ℓ_j` is label
    /// digit `j`, as `ℓ_j` successive controlled applications of `U_t`.
    pub fn controlled_shift_power(&mut self, field: &FieldParams, t: &[FieldElement]) -> Result<()> {
        self.layout.check_field(field)?;
        self.check_vector(field, t)?;
        if self.layout.label_digits < self.layout.registers {
            return Err(Error::BadRegister("fewer label digits than cube registers".into()));
        }
        let back: Vec<FieldElement> = t.iter().map(|&a| field.neg(a)).collect();
        let table = shift_table(field, self.layout.n, &back);
        let p = self.layout.p as usize;
        for j in 0..self.layout.registers {
            let (stride, size) = self.cube_geometry(j)?;
            let digit_stride = pow(self.layout.p, j);
            for rep in 1..p {
                let table = &table;
                self.pull(move |i| {
                    if (i / digit_stride) % p < rep {
                        return i;
                    }
                    let v = (i / stride) % size;
                    i - v * stride + table[v] * stride
                });
            }
        }
        Ok(())
    }

    /// `|c⟩_label |v⟩_j → |c⟩ |v + A c⟩`, reading the label as a message in F_q^k.
    pub fn controlled_add_codeword(&mut self, code: &LinearCode, j: usize) -> Result<()> {
        let field = code.field();
        self.layout.check_field(field)?;
        if code.n() != self.layout.n || code.k() * self.layout.m != self.layout.label_digits {
            return Err(Error::BadRegister(format!(
                "code [{}, {}] does not fit a layout with n = {} and {} label digits",
                code.n(),
                code.k(),
                self.layout.n,
                self.layout.label_digits
            )));
        }
        let (stride, size) = self.cube_geometry(j)?;
        let messages = pow(self.layout.p, self.layout.label_digits);
        // inverse tables: subtract A c
        let tables: Vec<Vec<usize>> = (0..messages)
            .map(|c| {
                let word = code.encode(&code.message(c as u128))?;
                let back: Vec<FieldElement> = word.iter().map(|&a| field.neg(a)).collect();
                Ok(shift_table(field, self.layout.n, &back))
            })
            .collect::<Result<_>>()?;
        self.pull(|i| {
            let c = i % messages;
            let v = (i / stride) % size;
            i - v * stride + tables[c][v] * stride
        });
        Ok(())
    }

    /// `|z⟩_label → |M z⟩_label` for an invertible `T × T` matrix over F_p.
    pub fn permute_label(&mut self, matrix: &FpMatrix) -> Result<()> {
        let t = self.layout.label_digits;
        if matrix.shape() != (t, t) || matrix.p() != self.layout.p {
            return Err(Error::BadShape(format!("expected a {t}x{t} matrix over F_{}", self.layout.p)));
        }
        let inv = matrix
            .inverse()
            .map_err(|r| Error::BadShape(format!("label permutation is singular (rank {})", r.rank)))?;
        let p = self.layout.p;
        let dim = pow(p, t);
        let src: Vec<usize> = (0..dim)
            .map(|z| {
                let digits = label_digits(p, t, z);
                label_value(p, &inv.mul_vec(&digits).expect("square"))
            })
            .collect();
        self.pull(|i| i - i % dim + src[i % dim]);
        Ok(())
    }

    /// Exact outcome distribution of measuring one register.
    pub fn marginal(&self, reg: Register) -> Result<Vec<f64>> {
        let (start, len) = self.layout.register_slots(reg)?;
        let stride = pow(self.layout.p, start);
        let size = pow(self.layout.p, len);
        let mut probs = vec![0.0; size];
        for (i, a) in self.amps.iter().enumerate() {
            probs[(i / stride) % size] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Projects onto `reg = outcome` and renormalises.
    pub fn collapse(&self, reg: Register, outcome: usize) -> Result<DenseState> {
        let (start, len) = self.layout.register_slots(reg)?;
        let stride = pow(self.layout.p, start);
        let size = pow(self.layout.p, len);
        if outcome >= size {
            return Err(Error::BadRegister(format!("outcome {outcome} >= {size}")));
        }
        let mut amps: Vec<Complex64> = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| if (i / stride) % size == outcome { a } else { Complex64::new(0.0, 0.0) })
            .collect();
        let norm = norm_sqr(&amps).sqrt();
        if norm < TOLERANCE {
            return Err(Error::BadRegister(format!("outcome {outcome} has probability zero")));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(DenseState { layout: self.layout, amps })
    }

    /// Samples a measurement outcome and returns it with the collapsed state.
    pub fn measure<R: Rng + ?Sized>(&self, reg: Register, rng: &mut R) -> Result<(usize, DenseState)> {
        let probs = self.marginal(reg)?;
        let outcome = sample_index(&probs, rng);
        Ok((outcome, self.collapse(reg, outcome)?))
    }

    /// Amplitudes of everything above the label register for a fixed label value.
    pub fn slice_at_label(&self, label: usize) -> Result<Vec<Complex64>> {
        let dim = pow(self.layout.p, self.layout.label_digits);
        if label >= dim {
            return Err(Error::BadRegister(format!("label value {label} >= {dim}")));
        }
        Ok(self.amps.iter().skip(label).step_by(dim).copied().collect())
    }
}

/// LSB-first digits of a label index.
pub fn label_digits(p: u32, t: usize, mut z: usize) -> Vec<u32> {
    (0..t)
        .map(|_| {
            let d = (z % p as usize) as u32;
            z /= p as usize;
            d
        })
        .collect()
}

pub fn label_value(p: u32, digits: &[u32]) -> usize {
    digits.iter().rev().fold(0usize, |acc, &d| acc * p as usize + d as usize)
}

/// Draws an index from a (possibly slightly unnormalised) distribution.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
