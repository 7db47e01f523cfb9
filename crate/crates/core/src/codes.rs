//! Linear codes over F_q, planted instances and brute-force oracles.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldParams, FqMatrix};
use crate::metrics::manhattan_dist;
use crate::rng::{random_vector, seeded};

/// Default cap on the number of enumerated messages.
pub const DEFAULT_BUDGET: u128 = 1 << 20;

/// Version of the instance JSON layout.
pub const INSTANCE_FORMAT_VERSION: u32 = 1;

/// Code generated by the columns of an `n × k` matrix of full column rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    field: FieldParams,
    generator: FqMatrix,
    min_distance: Option<u128>,
}

impl LinearCode {
    pub fn new(field: FieldParams, generator: FqMatrix) -> Result<Self> {
        generator.check_field(&field)?;
        let (n, k) = (generator.rows(), generator.cols());
        if k > n {
            return Err(Error::BadShape(format!("k = {k} exceeds n = {n}")));
        }
        let rank = generator.rank(&field);
        if rank < k {
            return Err(Error::BadShape(format!("generator has rank {rank} < k = {k}")));
        }
        Ok(LinearCode { field, generator, min_distance: None })
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    pub fn generator(&self) -> &FqMatrix {
        &self.generator
    }

    pub fn n(&self) -> usize {
        self.generator.rows()
    }

    pub fn k(&self) -> usize {
        self.generator.cols()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// Cached minimum distance, if computed or supplied.
    pub fn distance(&self) -> Option<u128> {
        self.min_distance
    }

    /// Records a known minimum distance without checking it.
    pub fn with_distance(mut self, d: u128) -> Self {
        self.min_distance = Some(d);
        self
    }

    /// Computes and caches the minimum distance; `None` means fewer than two codewords.
    pub fn compute_distance(&mut self, budget: u128) -> Result<Option<u128>> {
        let d = min_distance_bruteforce(self, budget)?;
        self.min_distance = d;
        Ok(d)
    }

    pub fn encode(&self, s: &[FieldElement]) -> Result<Vec<FieldElement>> {
        for &x in s {
            self.field.check(x)?;
        }
        self.generator.mul_vec(&self.field, s)
    }

    /// Number of codewords, `q^k`, saturating.
    pub fn size(&self) -> u128 {
        message_count(&self.field, self.k())
    }

    /// Message with integer index `Σ s̃_j q^j`.
    pub fn message(&self, index: u128) -> Vec<FieldElement> {
        let q = self.field.q();
        let mut x = index;
        (0..self.k())
            .map(|_| {
                let e = FieldElement::from_image_unchecked(x % q);
                x /= q;
                e
            })
            .collect()
    }
}

fn message_count(field: &FieldParams, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, _| acc.saturating_mul(field.q()))
}

fn check_budget(code: &LinearCode, budget: u128) -> Result<u128> {
    let needed = code.size();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(needed)
}

/// Uniform `n × k` generator, redrawn until it has rank `k`.
pub fn random_code(field: &FieldParams, n: usize, k: usize, seed: u64) -> Result<LinearCode> {
    if k == 0 || n < k {
        return Err(Error::BadShape(format!("need n >= k >= 1, got n = {n}, k = {k}")));
    }
    let mut rng = seeded(seed);
    loop {
        let data = random_vector(field, n * k, &mut rng);
        let generator = FqMatrix::new(n, k, data)?;
        if generator.rank(field) == k {
            return Ok(LinearCode { field: field.clone(), generator, min_distance: None });
        }
    }
}

/// Exact minimum Manhattan distance over all pairs of distinct codewords.
///
/// The metric is not translation invariant, so codeword norms are not enough.
/// Codewords are sorted by their first coordinate and each pair scan stops as
/// soon as that coordinate alone reaches the best distance found.
pub fn min_distance_bruteforce(code: &LinearCode, budget: u128) -> Result<Option<u128>> {
    let count = check_budget(code, budget)? as usize;
    if count < 2 || code.n() == 0 {
        return Ok(None);
    }
    let mut words: Vec<Vec<u128>> = (0..count as u128)
        .into_par_iter()
        .map(|i| {
            let c = code.encode(&code.message(i)).expect("message in field");
            c.into_iter().map(FieldElement::image).collect()
        })
        .collect();
    words.sort_unstable();
    let mut best = u128::MAX;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let lead = words[j][0] - words[i][0];
            if lead >= best {
                break;
            }
            let d: u128 = words[i].iter().zip(&words[j]).map(|(a, b)| a.abs_diff(*b)).sum();
            best = best.min(d);
        }
    }
    Ok(Some(best))
}

/// Closest codeword to `t` by exhaustive search. Ties go to the smallest message
/// index `Σ s̃_j q^j`.
pub fn nearest_codeword_oracle(
    code: &LinearCode,
    t: &[FieldElement],
    budget: u128,
) -> Result<(Vec<FieldElement>, u128)> {
    if t.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: t.len() });
    }
    for &x in t {
        code.field.check(x)?;
    }
    let count = check_budget(code, budget)?;
    let (dist, index) = (0..count)
        .into_par_iter()
        .map(|i| {
            let c = code.encode(&code.message(i)).expect("message in field");
            let d = manhattan_dist(&code.field, t, &c).expect("same length");
            (d, i)
        })
        .min()
        .expect("at least one message");
    Ok((code.message(index), dist))
}

/// A bounded decoding problem: find `s` with `Δ_M(t, A s) <= w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeInstance {
    pub code: LinearCode,
    pub t: Vec<FieldElement>,
    /// Promise bound in Manhattan units; `u128::MAX` means unbounded.
    pub w: u128,
    pub s_true: Option<Vec<FieldElement>>,
}

/// Unbounded promise.
pub const INFINITE_BOUND: u128 = u128::MAX;

impl DecodeInstance {
    pub fn new(code: LinearCode, t: Vec<FieldElement>, w: u128, s_true: Option<Vec<FieldElement>>) -> Result<Self> {
        if t.len() != code.n() {
            return Err(Error::LengthMismatch { expected: code.n(), got: t.len() });
        }
        for &x in &t {
            code.field.check(x)?;
        }
        if let Some(s) = &s_true {
            if s.len() != code.k() {
                return Err(Error::LengthMismatch { expected: code.k(), got: s.len() });
            }
            let dist = manhattan_dist(&code.field, &t, &code.encode(s)?)?;
            if dist > w {
                return Err(Error::PromiseViolated(format!(
                    "planted message is at distance {dist} > w = {w}"
                )));
            }
        }
        Ok(DecodeInstance { code, t, w, s_true })
    }

    pub fn field(&self) -> &FieldParams {
        self.code.field()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&InstanceFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s)?;
        file.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    field: FieldParams,
    n: usize,
    k: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<u128>>,
    t: Vec<u128>,
    /// `null` encodes an unbounded promise.
    w: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s_true: Option<Vec<u128>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<u128>,
}

impl From<&DecodeInstance> for InstanceFile {
    fn from(inst: &DecodeInstance) -> Self {
        let images = |v: &[FieldElement]| v.iter().map(|x| x.image()).collect::<Vec<_>>();
        InstanceFile {
            field: inst.code.field.clone(),
            n: inst.code.n(),
            k: inst.code.k(),
            a: inst.code.generator.to_images(),
            t: images(&inst.t),
            w: (inst.w != INFINITE_BOUND).then_some(inst.w),
            s_true: inst.s_true.as_deref().map(images),
            d: inst.code.min_distance,
        }
    }
}

impl TryFrom<InstanceFile> for DecodeInstance {
    type Error = Error;
    fn try_from(f: InstanceFile) -> Result<Self> {
        if f.a.len() != f.n || f.a.iter().any(|row| row.len() != f.k) {
            return Err(Error::BadShape(format!("\"A\" is not {}x{}", f.n, f.k)));
        }
        let generator = if f.n == 0 {
            FqMatrix::zeros(0, f.k)
        } else {
            FqMatrix::from_images(&f.field, &f.a)?
        };
        let mut code = LinearCode::new(f.field.clone(), generator)?;
        code.min_distance = f.d;
        let t = f.field.elements(&f.t)?;
        let s_true = f.s_true.map(|s| f.field.elements(&s)).transpose()?;
        DecodeInstance::new(code, t, f.w.unwrap_or(INFINITE_BOUND), s_true)
    }
}

/// Errors `e` on one coordinate that keep `|(c + e)~ - c̃| <= bound`.
fn admissible(field: &FieldParams, c: FieldElement, e: FieldElement, bound: u128) -> bool {
    field.add(c, e).image().abs_diff(c.image()) <= bound
}

/// Plants `t = A s + e` with `s` uniform and `e_i` uniform on the images in
/// `[0, floor(w/n)]` that move coordinate `i` by at most that much.
///
/// For p = 2 every image in the range qualifies. For odd p, adding a digit can
/// wrap it modulo p, so those draws are rejected to keep `Δ_M(t, A s) <= w`.
pub fn gen_instance(code: &LinearCode, w: u128, seed: u64) -> Result<DecodeInstance> {
    let bound = if code.n() == 0 { 0 } else { w / code.n() as u128 };
    gen_instance_with_coordinate_bound(code, bound, w, seed)
}

/// As [`gen_instance`] with an explicit per-coordinate bound; requires
/// `n · coord_bound <= w`.
pub fn gen_instance_with_coordinate_bound(
    code: &LinearCode,
    coord_bound: u128,
    w: u128,
    seed: u64,
) -> Result<DecodeInstance> {
    let field = code.field();
    if coord_bound.saturating_mul(code.n() as u128) > w {
        return Err(Error::BadParams(format!(
            "{} coordinates with error up to {coord_bound} can exceed w = {w}",
            code.n()
        )));
    }
    let bound = coord_bound.min(field.q() - 1);
    let mut rng = seeded(seed);
    let s = random_vector(field, code.k(), &mut rng);
    let c = code.encode(&s)?;
    let t = c
        .iter()
        .map(|&ci| loop {
            let e = FieldElement::from_image_unchecked(rng.gen_range(0..=bound));
            if admissible(field, ci, e, bound) {
                break field.add(ci, e);
            }
        })
        .collect();
    DecodeInstance::new(code.clone(), t, w, Some(s))
}

/// Plants `t = A s + e` with `Δ_M(t, A s) <= w` and no per-coordinate cap.
///
/// Coordinates are visited in random order, each taking a uniform share of
/// the remaining budget, so the error often concentrates on a few positions.
pub fn gen_instance_within_distance(code: &LinearCode, w: u128, seed: u64) -> Result<DecodeInstance> {
    let field = code.field();
    let n = code.n();
    let mut rng = seeded(seed);
    let s = random_vector(field, code.k(), &mut rng);
    let mut t = code.encode(&s)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut remaining = if w == INFINITE_BOUND { field.q() - 1 } else { w };
    for i in order {
        let c = t[i];
        let e = loop {
            let x = rng.gen_range(0..=remaining.min(field.q() - 1));
            let e = FieldElement::from_image_unchecked(x);
            if admissible(field, c, e, x) {
                break e;
            }
        };
        t[i] = field.add(c, e);
        remaining -= t[i].image().abs_diff(c.image());
    }
    DecodeInstance::new(code.clone(), t, w, Some(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn f4() -> FieldParams {
        make_field(2, 2, None).unwrap()
    }

    fn col_code(f: &FieldParams, col: &[u128]) -> LinearCode {
        let rows: Vec<Vec<u128>> = col.iter().map(|&x| vec![x]).collect();
        LinearCode::new(f.clone(), FqMatrix::from_images(f, &rows).unwrap()).unwrap()
    }

    #[test]
    fn encode_examples() {
        let f = f4();
        let code = col_code(&f, &[1, 2, 3]);
        let img = |v: Vec<FieldElement>| v.into_iter().map(|x| x.image()).collect::<Vec<_>>();
        assert_eq!(img(code.encode(&f.elements(&[0]).unwrap()).unwrap()), vec![0, 0, 0]);
        assert_eq!(img(code.encode(&f.elements(&[2]).unwrap()).unwrap()), vec![2, 3, 1]);
        assert_eq!(img(code.encode(&f.elements(&[3]).unwrap()).unwrap()), vec![3, 1, 2]);
        assert!(matches!(code.encode(&[]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn rank_deficient_generator_is_rejected() {
        let f = f4();
        let a = FqMatrix::from_images(&f, &[vec![1, 2], vec![2, 3]]).unwrap();
        // column 2 = x · column 1
        assert!(matches!(LinearCode::new(f, a), Err(Error::BadShape(_))));
    }

    #[test]
    fn min_distance_examples() {
        let f = f4();
        assert_eq!(min_distance_bruteforce(&col_code(&f, &[1, 2, 3]), DEFAULT_BUDGET).unwrap(), Some(4));
        let f16 = make_field(2, 4, None).unwrap();
        let rep = col_code(&f16, &[1, 1]);
        // independent pairwise enumeration
        let mut best = u128::MAX;
        for a in 0..16u128 {
            for b in a + 1..16 {
                best = best.min(2 * (b - a));
            }
        }
        assert_eq!(min_distance_bruteforce(&rep, DEFAULT_BUDGET).unwrap(), Some(best));
        let empty = LinearCode::new(f.clone(), FqMatrix::zeros(3, 0)).unwrap();
        assert_eq!(min_distance_bruteforce(&empty, DEFAULT_BUDGET).unwrap(), None);
        let big = random_code(&f16, 6, 6, 1).unwrap();
        assert!(matches!(min_distance_bruteforce(&big, DEFAULT_BUDGET), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn min_distance_matches_naive_pairs() {
        let f = make_field(3, 2, None).unwrap();
        for seed in 0..5 {
            let code = random_code(&f, 3, 2, seed).unwrap();
            let words: Vec<Vec<FieldElement>> =
                (0..code.size()).map(|i| code.encode(&code.message(i)).unwrap()).collect();
            let mut best = u128::MAX;
            for i in 0..words.len() {
                for j in i + 1..words.len() {
                    best = best.min(manhattan_dist(&f, &words[i], &words[j]).unwrap());
                }
            }
            assert_eq!(min_distance_bruteforce(&code, DEFAULT_BUDGET).unwrap(), Some(best));
        }
    }

    #[test]
    fn random_code_is_reproducible() {
        let f = make_field(2, 4, None).unwrap();
        assert_eq!(random_code(&f, 5, 2, 9).unwrap(), random_code(&f, 5, 2, 9).unwrap());
        let one = random_code(&f, 1, 1, 3).unwrap();
        assert!(!one.generator().get(0, 0).is_zero());
        assert!(random_code(&f, 1, 2, 0).is_err());
        assert!(random_code(&f, 1, 0, 0).is_err());
    }

    #[test]
    fn oracle_examples() {
        let f = f4();
        let code = col_code(&f, &[1, 2, 3]);
        let t = code.encode(&f.elements(&[3]).unwrap()).unwrap();
        assert_eq!(nearest_codeword_oracle(&code, &t, DEFAULT_BUDGET).unwrap(), (f.elements(&[3]).unwrap(), 0));
        let tie = col_code(&f, &[1, 1]);
        let t = f.elements(&[1, 2]).unwrap();
        // codewords (1,1) and (2,2) are both at distance 1
        let (s, d) = nearest_codeword_oracle(&tie, &t, DEFAULT_BUDGET).unwrap();
        assert_eq!(d, 1);
        assert_eq!(s, f.elements(&[1]).unwrap());
    }

    #[test]
    fn planted_instances_respect_the_bound() {
        let f = make_field(2, 4, None).unwrap();
        let code = random_code(&f, 4, 1, 2).unwrap();
        let zero = gen_instance(&code, 0, 7).unwrap();
        assert_eq!(zero.t, code.encode(zero.s_true.as_ref().unwrap()).unwrap());
        for (p, m) in [(2, 4), (3, 2), (5, 2)] {
            let f = make_field(p, m, None).unwrap();
            let code = random_code(&f, 3, 1, 11).unwrap();
            for seed in 0..200 {
                let inst = gen_instance(&code, 7, seed).unwrap();
                let c = code.encode(inst.s_true.as_ref().unwrap()).unwrap();
                assert!(manhattan_dist(&f, &inst.t, &c).unwrap() <= 7);
            }
        }
    }

    #[test]
    fn binary_error_images_are_uniform() {
        let f = make_field(2, 6, None).unwrap();
        let code = random_code(&f, 4, 1, 5).unwrap();
        let w = 4 * 7;
        let mut counts = [0usize; 8];
        let draws = 10_000 / 4;
        for seed in 0..draws {
            let inst = gen_instance(&code, w, seed as u64).unwrap();
            let c = code.encode(inst.s_true.as_ref().unwrap()).unwrap();
            for (t, c) in inst.t.iter().zip(&c) {
                counts[f.sub(*t, *c).image() as usize] += 1;
            }
        }
        let expected = (draws * 4) as f64 / 8.0;
        let chi2: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // 7 degrees of freedom, 0.1% critical value
        assert!(chi2 < 24.32, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn instance_json_round_trip() {
        let f = make_field(3, 2, None).unwrap();
        let code = random_code(&f, 3, 1, 4).unwrap();
        let inst = gen_instance(&code, 3, 1).unwrap();
        let json = inst.to_json().unwrap();
        let back = DecodeInstance::from_json(&json).unwrap();
        assert_eq!(back, inst);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["field", "n", "k", "A", "t", "w", "s_true"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let open = DecodeInstance::new(code, inst.t.clone(), INFINITE_BOUND, None).unwrap();
        assert!(open.to_json().unwrap().contains("\"w\":null"));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::gf::make_field;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn spread_errors_respect_the_distance_bound(
            p in prop_oneof![Just(2u32), Just(3), Just(5)], w in 0u128..40, seed in any::<u64>(),
        ) {
            let f = make_field(p, 3, None).unwrap();
            let code = random_code(&f, 6, 1, seed).unwrap();
            let inst = gen_instance_within_distance(&code, w, seed).unwrap();
            let c = code.encode(inst.s_true.as_ref().unwrap()).unwrap();
            prop_assert!(manhattan_dist(&f, &inst.t, &c).unwrap() <= w);
        }

        #[test]
        fn encoding_is_linear(p in prop_oneof![Just(2u32), Just(3), Just(5)], seed in any::<u64>()) {
            let f = make_field(p, 3, None).unwrap();
            let code = random_code(&f, 5, 2, seed).unwrap();
            let mut rng = seeded(seed ^ 7);
            let s1 = random_vector(&f, 2, &mut rng);
            let s2 = random_vector(&f, 2, &mut rng);
            let lhs = code.encode(&f.add_vec(&s1, &s2).unwrap()).unwrap();
            let rhs = f.add_vec(&code.encode(&s1).unwrap(), &code.encode(&s2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
