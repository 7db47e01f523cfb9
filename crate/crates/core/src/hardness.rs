//! Reduction from exact set cover to nearest-codeword distance.
//!
//! Each universe element becomes a block of `L` coordinates and each set adds
//! one tail coordinate. The target is all-ones on the universe blocks, so a
//! codeword close to it must either cover every block or leave one block of
//! `L` coordinates wrong.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{nearest_codeword_oracle, LinearCode};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldParams, FqMatrix};
use crate::metrics::manhattan_dist;

/// Set indices and universe elements are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    pub universe: usize,
    pub sets: Vec<Vec<usize>>,
    #[serde(rename = "K")]
    pub k: usize,
    pub c: f64,
}

impl SetCoverInstance {
    pub fn new(universe: usize, sets: Vec<Vec<usize>>, k: usize, c: f64) -> Result<Self> {
        let sc = SetCoverInstance { universe, sets, k, c };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.universe == 0 {
            return Err(Error::BadParams("universe must be nonempty".into()));
        }
        for (i, set) in self.sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::BadParams(format!("set {i} is empty")));
            }
            if let Some(&e) = set.iter().find(|&&e| e >= self.universe) {
                return Err(Error::BadParams(format!("set {i} contains {e}, outside 0..{}", self.universe)));
            }
        }
        Ok(())
    }

    /// `L = c·K`, required to be a positive integer.
    pub fn block_length(&self) -> Result<usize> {
        if self.k == 0 {
            return Err(Error::BadParams("K must be >= 1".into()));
        }
        let l = self.c * self.k as f64;
        let rounded = l.round();
        if !l.is_finite() || rounded < 1.0 || (l - rounded).abs() > 1e-9 {
            return Err(Error::BadParams(format!("c*K = {l} must be a positive integer")));
        }
        Ok(rounded as usize)
    }

    fn masks(&self) -> Vec<u64> {
        self.sets.iter().map(|s| s.iter().fold(0u64, |acc, &e| acc | 1 << e)).collect()
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.universe > 64 || self.sets.len() > 30 {
            return Err(Error::BudgetExceeded {
                needed: 1u128 << self.sets.len().min(127),
                budget: 1 << 30,
            });
        }
        Ok(())
    }

    /// Whether the listed sets are pairwise disjoint and cover the universe.
    pub fn is_exact_cover(&self, chosen: &[usize]) -> bool {
        let mut seen = vec![false; self.universe];
        for &i in chosen {
            let Some(set) = self.sets.get(i) else { return false };
            for &e in set {
                if std::mem::replace(&mut seen[e], true) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Size of the smallest cover, `None` if the sets miss some element.
    pub fn min_cover_size(&self) -> Result<Option<usize>> {
        self.check_enumerable()?;
        let masks = self.masks();
        let full = if self.universe == 64 { u64::MAX } else { (1u64 << self.universe) - 1 };
        Ok((0u64..1 << masks.len())
            .into_par_iter()
            .filter(|&sel| {
                let union = masks.iter().enumerate().filter(|(i, _)| sel >> i & 1 == 1).fold(0, |a, (_, &m)| a | m);
                union == full
            })
            .map(|sel| sel.count_ones() as usize)
            .min())
    }

    /// An exact cover with `size` sets, lowest selection mask first.
    pub fn find_exact_cover(&self, size: usize) -> Result<Option<Vec<usize>>> {
        self.check_enumerable()?;
        let n = self.sets.len();
        Ok((0u64..1 << n)
            .filter(|sel| sel.count_ones() as usize == size)
            .map(|sel| (0..n).filter(|i| sel >> i & 1 == 1).collect::<Vec<_>>())
            .find(|chosen| self.is_exact_cover(chosen)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sc: SetCoverInstance = serde_json::from_str(s)?;
        sc.validate()?;
        Ok(sc)
    }
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub field: FieldParams,
    pub block_length: usize,
    pub universe: usize,
    pub num_sets: usize,
    /// All-ones on the universe blocks, zero on the tail.
    pub target: Vec<FieldElement>,
    /// Column `i` is the indicator of set `i`'s blocks plus tail position `i`.
    pub basis: FqMatrix,
}

impl Gadget {
    pub fn dimension(&self) -> usize {
        self.block_length * self.universe + self.num_sets
    }

    /// The span of the basis as a code; full rank because of the tail.
    pub fn code(&self) -> Result<LinearCode> {
        LinearCode::new(self.field.clone(), self.basis.clone())
    }

    /// `Σ αᵢ bᵢ` for coefficient images `alpha`.
    pub fn combination(&self, alpha: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.basis.mul_vec(&self.field, alpha)
    }
}

pub fn build_gadget(sc: &SetCoverInstance, field: &FieldParams) -> Result<Gadget> {
    sc.validate()?;
    let l = sc.block_length()?;
    let (u, ns) = (sc.universe, sc.sets.len());
    let dim = l * u + ns;
    let mut cols = vec![vec![0u128; ns]; dim];
    for (i, set) in sc.sets.iter().enumerate() {
        for &e in set {
            for row in &mut cols[e * l..(e + 1) * l] {
                row[i] = 1;
            }
        }
        cols[l * u + i][i] = 1;
    }
    let basis = FqMatrix::from_images(field, &cols)?;
    let mut target = vec![FieldElement::default(); dim];
    for x in &mut target[..l * u] {
        *x = field.from_integer(1)?;
    }
    Ok(Gadget { field: field.clone(), block_length: l, universe: u, num_sets: ns, target, basis })
}

/// `min_α Δ_M(target, B α)` by enumerating all `q^{m'}` coefficient vectors.
pub fn gadget_distance_bruteforce(g: &Gadget, budget: u128) -> Result<u128> {
    let q = g.field.q();
    let needed = q.checked_pow(g.num_sets as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    (0..needed as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rest = idx as u128;
            let alpha: Vec<FieldElement> = (0..g.num_sets)
                .map(|_| {
                    let a = g.field.from_integer(rest % q).expect("below q");
                    rest /= q;
                    a
                })
                .collect();
            manhattan_dist(&g.field, &g.target, &g.combination(&alpha)?)
        })
        .try_reduce(|| u128::MAX, |a, b| Ok(a.min(b)))
}

/// Coefficients `p - 1` on the chosen sets, zero elsewhere.
pub fn cover_witness(g: &Gadget, cover: &[usize]) -> Result<Vec<FieldElement>> {
    let top = g.field.from_integer(g.field.p() as u128 - 1)?;
    let mut alpha = vec![FieldElement::default(); g.num_sets];
    for &i in cover {
        *alpha.get_mut(i).ok_or_else(|| Error::OutOfRange(format!("set index {i}")))? = top;
    }
    Ok(alpha)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapCase {
    Yes,
    No,
}

/// What is known about the set-cover side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverClaim {
    /// These sets form an exact cover of size `K`.
    ExactCover(Vec<usize>),
    /// Every cover has at least `c·K` sets (or none exists).
    AllCoversLarge,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub case: GapCase,
    pub opt: u128,
    /// `(p-1)·K` for YES, `c·K` for NO.
    pub bound: u128,
    /// Manhattan weight of `target + B α` for the `p - 1` witness.
    pub witness_weight: Option<u128>,
    /// Distance from the target to the span on the gadget code, via the
    /// generic nearest-codeword search.
    pub oracle_distance: u128,
    pub pass: bool,
}

/// Checks the distance gap by brute force.
///
/// YES: `OPT ≤ (p-1)K` and the witness weight is exactly `(p-1)K`.
/// NO: `OPT ≥ cK`. A claim that does not hold on the set-cover side is
/// `BadParams`; a gap that does not hold is `AssertionFailed`.
pub fn verify_gap(sc: &SetCoverInstance, g: &Gadget, claim: &CoverClaim, budget: u128) -> Result<GapReport> {
    let opt = gadget_distance_bruteforce(g, budget)?;
    let code = g.code()?;
    let (_, oracle_distance) = nearest_codeword_oracle(&code, &g.target, budget)?;
    if oracle_distance != opt {
        return Err(Error::AssertionFailed(format!(
            "span enumeration gives {opt}, nearest-codeword search gives {oracle_distance}"
        )));
    }
    let k = sc.k as u128;
    match claim {
        CoverClaim::ExactCover(cover) => {
            if cover.len() != sc.k || !sc.is_exact_cover(cover) {
                return Err(Error::BadParams(format!("{cover:?} is not an exact cover of size {}", sc.k)));
            }
            let bound = (g.field.p() as u128 - 1) * k;
            let alpha = cover_witness(g, cover)?;
            let shifted = g.field.add_vec(&g.target, &g.combination(&alpha)?)?;
            let weight = crate::metrics::manhattan_norm(&g.field, &shifted)?;
            if opt > bound || weight != bound {
                return Err(Error::AssertionFailed(format!(
                    "YES case: OPT = {opt}, witness weight = {weight}, expected bound {bound}"
                )));
            }
            Ok(GapReport { case: GapCase::Yes, opt, bound, witness_weight: Some(weight), oracle_distance, pass: true })
        }
        CoverClaim::AllCoversLarge => {
            let bound = (sc.c * sc.k as f64).ceil() as u128;
            if let Some(min) = sc.min_cover_size()? {
                if (min as u128) < bound {
                    return Err(Error::BadParams(format!("a cover of size {min} exists, below c*K = {bound}")));
                }
            }
            if opt < bound {
                return Err(Error::AssertionFailed(format!("NO case: OPT = {opt} < c*K = {bound}")));
            }
            Ok(GapReport { case: GapCase::No, opt, bound, witness_weight: None, oracle_distance, pass: true })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    const BUDGET: u128 = 1 << 22;

    fn images(f: &FieldParams, v: &[FieldElement]) -> Vec<u128> {
        v.iter().map(|&x| f.to_integer(x)).collect()
    }

    #[test]
    fn single_set_layout() {
        let f = make_field(2, 1, None).unwrap();
        let sc = SetCoverInstance::new(1, vec![vec![0]], 1, 1.0).unwrap();
        let g = build_gadget(&sc, &f).unwrap();
        assert_eq!(images(&f, &g.target), vec![1, 0]);
        assert_eq!(g.basis.to_images(), vec![vec![1], vec![1]]);
        assert_eq!(gadget_distance_bruteforce(&g, BUDGET).unwrap(), 1);
        let rep = verify_gap(&sc, &g, &CoverClaim::ExactCover(vec![0]), BUDGET).unwrap();
        assert_eq!((rep.opt, rep.bound, rep.witness_weight), (1, 1, Some(1)));
    }

    #[test]
    fn layout_shapes_and_tail() {
        let f = make_field(3, 1, None).unwrap();
        let sc = SetCoverInstance::new(3, vec![vec![0, 1], vec![2], vec![0], vec![1, 2]], 2, 2.0).unwrap();
        let g = build_gadget(&sc, &f).unwrap();
        assert_eq!(g.block_length, 4);
        assert_eq!(g.dimension(), 4 * 3 + 4);
        assert_eq!((g.basis.rows(), g.basis.cols()), (16, 4));
        assert!(images(&f, &g.target)[12..].iter().all(|&x| x == 0));
        // set 1 = {2}: block 2 and tail position 1
        let col: Vec<u128> = (0..16).map(|r| f.to_integer(g.basis.get(r, 1))).collect();
        let expected: Vec<u128> = (0..16).map(|r| u128::from((8..12).contains(&r) || r == 13)).collect();
        assert_eq!(col, expected);
    }

    #[test]
    fn zero_combination_is_target_weight() {
        let f = make_field(2, 1, None).unwrap();
        let sc = SetCoverInstance::new(3, vec![vec![0], vec![1, 2]], 1, 2.0).unwrap();
        let g = build_gadget(&sc, &f).unwrap();
        let zero = g.combination(&vec![FieldElement::default(); 2]).unwrap();
        assert_eq!(manhattan_dist(&f, &g.target, &zero).unwrap(), 2 * 3);
    }

    #[test]
    fn uncovered_element_forces_a_full_block() {
        let f = make_field(2, 1, None).unwrap();
        let sc = SetCoverInstance::new(3, vec![vec![0], vec![1]], 1, 3.0).unwrap();
        let g = build_gadget(&sc, &f).unwrap();
        let opt = gadget_distance_bruteforce(&g, BUDGET).unwrap();
        assert!(opt >= g.block_length as u128);
        let rep = verify_gap(&sc, &g, &CoverClaim::AllCoversLarge, BUDGET).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn odd_characteristic_witness_weight() {
        let f = make_field(3, 1, None).unwrap();
        let sc = SetCoverInstance::new(4, vec![vec![0, 1], vec![2, 3], vec![1, 2]], 2, 2.0).unwrap();
        let g = build_gadget(&sc, &f).unwrap();
        let rep = verify_gap(&sc, &g, &CoverClaim::ExactCover(vec![0, 1]), BUDGET).unwrap();
        assert_eq!(rep.witness_weight, Some(4));
        // coefficient 1 on the cover reaches distance K
        assert_eq!(rep.opt, 2);
    }

    #[test]
    fn rejections() {
        assert!(SetCoverInstance::new(2, vec![vec![]], 1, 1.0).is_err());
        assert!(SetCoverInstance::new(2, vec![vec![2]], 1, 1.0).is_err());
        let f = make_field(2, 1, None).unwrap();
        let k0 = SetCoverInstance::new(1, vec![vec![0]], 0, 1.0).unwrap();
        assert!(matches!(build_gadget(&k0, &f), Err(Error::BadParams(_))));
        let frac = SetCoverInstance::new(1, vec![vec![0]], 1, 1.5).unwrap();
        assert!(matches!(build_gadget(&frac, &f), Err(Error::BadParams(_))));
        let sc = SetCoverInstance::new(2, vec![vec![0], vec![1], vec![0, 1]], 1, 2.0).unwrap();
        let g = build_gadget(&sc, &f).unwrap();
        assert!(matches!(
            verify_gap(&sc, &g, &CoverClaim::ExactCover(vec![0]), BUDGET),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(verify_gap(&sc, &g, &CoverClaim::AllCoversLarge, BUDGET), Err(Error::BadParams(_))));
        assert!(matches!(gadget_distance_bruteforce(&g, 4), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn json_round_trip_uses_capital_k() {
        let sc = SetCoverInstance::new(3, vec![vec![0, 1], vec![2]], 2, 2.0).unwrap();
        let json = sc.to_json().unwrap();
        assert!(json.contains("\"K\": 2"));
        assert_eq!(SetCoverInstance::from_json(&json).unwrap(), sc);
        assert!(SetCoverInstance::from_json(r#"{"universe":1,"sets":[[5]],"K":1,"c":1}"#).is_err());
    }

    #[test]
    fn cover_helpers() {
        let sc = SetCoverInstance::new(4, vec![vec![0, 1], vec![2, 3], vec![1, 2], vec![0], vec![3]], 2, 2.0).unwrap();
        assert_eq!(sc.min_cover_size().unwrap(), Some(2));
        assert_eq!(sc.find_exact_cover(2).unwrap(), Some(vec![0, 1]));
        assert_eq!(sc.find_exact_cover(3).unwrap(), Some(vec![2, 3, 4]));
        assert!(!sc.is_exact_cover(&[0, 2, 1]));
        let gap = SetCoverInstance::new(2, vec![vec![0]], 1, 1.0).unwrap();
        assert_eq!(gap.min_cover_size().unwrap(), None);
    }
}
