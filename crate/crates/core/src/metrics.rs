//! Manhattan and Lee distances on F_q^n through integer images.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Manhattan,
    Lee,
}

impl MetricKind {
    /// Per-coordinate contribution for images `x`, `y` in a field of order `q`.
    #[inline]
    pub fn coordinate(self, q: u128, x: u128, y: u128) -> u128 {
        let d = x.abs_diff(y);
        match self {
            MetricKind::Manhattan => d,
            MetricKind::Lee => d.min(q - d),
        }
    }

    pub fn distance(self, field: &FieldParams, x: &[FieldElement], y: &[FieldElement]) -> Result<u128> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
        }
        let q = field.q();
        x.iter().zip(y).try_fold(0u128, |acc, (&a, &b)| {
            let (a, b) = (field.check(a)?, field.check(b)?);
            Ok(acc + self.coordinate(q, a.image(), b.image()))
        })
    }
}

/// `Σ |x̃_i - ỹ_i|` over the integers.
pub fn manhattan_dist(field: &FieldParams, x: &[FieldElement], y: &[FieldElement]) -> Result<u128> {
    MetricKind::Manhattan.distance(field, x, y)
}

/// `Σ x̃_i`.
pub fn manhattan_norm(field: &FieldParams, x: &[FieldElement]) -> Result<u128> {
    x.iter().try_fold(0u128, |acc, &a| Ok(acc + field.check(a)?.image()))
}

pub fn lee_dist(field: &FieldParams, x: &[FieldElement], y: &[FieldElement]) -> Result<u128> {
    MetricKind::Lee.distance(field, x, y)
}

/// Whether the top `m - r` digits of `x` and `y` agree.
pub fn digit_prefix_equal(field: &FieldParams, x: FieldElement, y: FieldElement, r: usize) -> Result<bool> {
    if r > field.m() {
        return Err(Error::OutOfRange(format!("cutoff {r} > m = {}", field.m())));
    }
    let (x, y) = (field.check(x)?, field.check(y)?);
    let sigma = field.pow_p(r);
    Ok(x.image() / sigma == y.image() / sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn v(f: &FieldParams, xs: &[u128]) -> Vec<FieldElement> {
        f.elements(xs).unwrap()
    }

    #[test]
    fn manhattan_examples() {
        let f5 = make_field(5, 1, None).unwrap();
        assert_eq!(manhattan_dist(&f5, &v(&f5, &[4]), &v(&f5, &[0])).unwrap(), 4);
        // shifting both sides by 1 changes the distance
        assert_eq!(manhattan_dist(&f5, &v(&f5, &[0]), &v(&f5, &[1])).unwrap(), 1);
        let f16 = make_field(2, 4, None).unwrap();
        assert_eq!(manhattan_dist(&f16, &v(&f16, &[1, 3]), &v(&f16, &[3, 1])).unwrap(), 4);
        let x = v(&f16, &[9, 0, 15]);
        assert_eq!(manhattan_dist(&f16, &x, &x).unwrap(), 0);
        let f4 = make_field(2, 2, None).unwrap();
        assert_eq!(manhattan_norm(&f4, &v(&f4, &[2, 3, 1])).unwrap(), 6);
        assert_eq!(manhattan_norm(&f4, &v(&f4, &[0, 0])).unwrap(), 0);
    }

    #[test]
    fn manhattan_is_not_shift_invariant() {
        for p in [3u32, 5, 7] {
            let f = make_field(p, 1, None).unwrap();
            let top = v(&f, &[p as u128 - 1]);
            let zero = v(&f, &[0]);
            let one = v(&f, &[1]);
            let shifted = vec![f.add(top[0], one[0])];
            assert_eq!(manhattan_dist(&f, &top, &zero).unwrap(), p as u128 - 1);
            assert_ne!(
                manhattan_dist(&f, &top, &zero).unwrap(),
                manhattan_dist(&f, &shifted, &one).unwrap()
            );
        }
    }

    #[test]
    fn errors_are_typed() {
        let f4 = make_field(2, 2, None).unwrap();
        let f8 = make_field(2, 3, None).unwrap();
        assert!(matches!(
            manhattan_dist(&f4, &v(&f4, &[1]), &v(&f4, &[1, 2])),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            manhattan_dist(&f4, &v(&f8, &[7]), &v(&f4, &[1])),
            Err(Error::FieldMismatch(_))
        ));
        assert!(matches!(
            digit_prefix_equal(&f4, FieldElement::ZERO, FieldElement::ONE, 3),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn lee_examples_and_bound() {
        let f16 = make_field(2, 4, None).unwrap();
        assert_eq!(lee_dist(&f16, &v(&f16, &[1]), &v(&f16, &[15])).unwrap(), 2);
        assert_eq!(lee_dist(&f16, &v(&f16, &[7]), &v(&f16, &[7])).unwrap(), 0);
        for a in 0..16 {
            for b in 0..16 {
                let (x, y) = (v(&f16, &[a]), v(&f16, &[b]));
                assert!(lee_dist(&f16, &x, &y).unwrap() <= manhattan_dist(&f16, &x, &y).unwrap());
            }
        }
    }

    #[test]
    fn lee_triangle_inequality_exhaustive() {
        for (p, m) in [(2, 3), (3, 2), (5, 1)] {
            let f = make_field(p, m, None).unwrap();
            let q = f.q();
            let d = |a: u128, b: u128| lee_dist(&f, &v(&f, &[a]), &v(&f, &[b])).unwrap();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(d(a, b), d(b, a));
                    for c in 0..q {
                        assert!(d(a, c) <= d(a, b) + d(b, c));
                    }
                }
            }
        }
    }

    #[test]
    fn digit_prefix_examples() {
        let f4 = make_field(2, 2, None).unwrap();
        let e = |x| f4.from_integer(x).unwrap();
        assert!(digit_prefix_equal(&f4, e(2), e(3), 1).unwrap());
        assert!(!digit_prefix_equal(&f4, e(0), e(2), 1).unwrap());
        for a in 0..4 {
            for b in 0..4 {
                assert!(digit_prefix_equal(&f4, e(a), e(b), 2).unwrap());
            }
        }
    }

    #[test]
    fn small_integer_distance_does_not_force_equal_prefixes() {
        // 1 = (1,0) and 2 = (0,1) are at distance 1 < 2^1, yet their top digits
        // differ and their field difference 3 has norm 3 > n·p^r = 2
        let f4 = make_field(2, 2, None).unwrap();
        let (x, y) = (v(&f4, &[1]), v(&f4, &[2]));
        assert_eq!(manhattan_dist(&f4, &x, &y).unwrap(), 1);
        assert!(!digit_prefix_equal(&f4, x[0], y[0], 1).unwrap());
        let diff = f4.sub_vec(&x, &y).unwrap();
        assert_eq!(manhattan_norm(&f4, &diff).unwrap(), 3);
    }

    #[test]
    fn equal_prefixes_bound_the_field_difference_exhaustively() {
        // the statement the decoder actually relies on: if every coordinate
        // shares its top m-r digits then x - y lies in [p^r]^n
        for (p, m) in [(2u32, 2usize), (2, 3), (3, 2), (2, 4)] {
            let f = make_field(p, m, None).unwrap();
            let q = f.q();
            for r in 0..m {
                let sigma = f.pow_p(r);
                for x0 in 0..q {
                    for y0 in 0..q {
                        for (x1, y1) in [(0, 0), (x0, y0), (q - 1, q - 1 - (q - 1) % sigma)] {
                            let x = v(&f, &[x0, x1]);
                            let y = v(&f, &[y0, y1]);
                            let all_equal = (0..2)
                                .all(|i| digit_prefix_equal(&f, x[i], y[i], r).unwrap());
                            if !all_equal {
                                continue;
                            }
                            let diff = f.sub_vec(&x, &y).unwrap();
                            assert!(diff.iter().all(|d| d.image() < sigma));
                            assert!(manhattan_norm(&f, &diff).unwrap() < 2 * sigma);
                        }
                    }
                }
            }
        }
    }
}
