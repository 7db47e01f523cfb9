use super::{FieldElement, FieldParams, FqMatrix};
use crate::error::{Error, Result};
use crate::linalg::FpMatrix;

/// An n×k matrix over F_{p^m} viewed as an (m·n)×(m·k) operator over F_p.
///
/// Row `i·m + d` is digit `d` of output coordinate `i`; column `j·m + e` is
/// digit `e` of input coordinate `j`. Block `(i, j)` is multiplication by
/// `A_ij` in the basis `(1, x, …, x^{m-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandedMatrix {
    m: usize,
    n: usize,
    k: usize,
    matrix: FpMatrix,
}

impl ExpandedMatrix {
    pub fn matrix(&self) -> &FpMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> FpMatrix {
        self.matrix
    }

    pub fn digits_per_coord(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `Ã · x̂`, collapsed back to F_q^n.
    pub fn apply(&self, field: &FieldParams, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: x.len() });
        }
        let y = self.matrix.mul_vec(&field.expand_vec(x))?;
        field.collapse_vec(&y)
    }

    /// Row indices of the most significant `m - r` digits of every output
    /// coordinate, coordinate-major.
    pub fn top_rows(&self, r: usize) -> Result<Vec<usize>> {
        if r >= self.m {
            return Err(Error::OutOfRange(format!("low-digit count {r} must be < m = {}", self.m)));
        }
        Ok((0..self.n)
            .flat_map(|i| (r..self.m).map(move |d| i * self.m + d))
            .collect())
    }
}

/// Block matrix of multiplication operators; satisfies `Ã x̂ = (A x)^`.
pub fn expand_operator(a: &FqMatrix, field: &FieldParams) -> Result<ExpandedMatrix> {
    a.check_field(field)?;
    let m = field.m();
    let (n, k) = (a.rows(), a.cols());
    let mut out = FpMatrix::zeros(field.p(), m * n, m * k);
    let basis: Vec<FieldElement> = (0..m)
        .map(|e| FieldElement::from_image_unchecked(field.pow_p(e)))
        .collect();
    for i in 0..n {
        for j in 0..k {
            let entry = a.get(i, j);
            if entry.is_zero() {
                continue;
            }
            for (e, &b) in basis.iter().enumerate() {
                let image = field.mul(entry, b);
                for (d, digit) in field.digits(image).into_iter().enumerate() {
                    out.set(i * m + d, j * m + e, digit);
                }
            }
        }
    }
    Ok(ExpandedMatrix { m, n, k, matrix: out })
}

/// Rows for the top `m - r` digits of each output coordinate, all columns kept.
pub fn top_digit_submatrix(e: &ExpandedMatrix, r: usize) -> Result<FpMatrix> {
    Ok(e.matrix.select_rows(&e.top_rows(r)?))
}

/// Restriction to the given digit positions on both sides: rows use
/// `row_digits` of every output coordinate, columns `col_digits` of every
/// input coordinate.
pub fn digit_block(e: &ExpandedMatrix, row_digits: &[usize], col_digits: &[usize]) -> Result<FpMatrix> {
    if let Some(&bad) = row_digits.iter().chain(col_digits).find(|&&d| d >= e.m) {
        return Err(Error::OutOfRange(format!("digit position {bad} >= m = {}", e.m)));
    }
    let rows: Vec<usize> = (0..e.n)
        .flat_map(|i| row_digits.iter().map(move |&d| i * e.m + d))
        .collect();
    let cols: Vec<usize> = (0..e.k)
        .flat_map(|j| col_digits.iter().map(move |&d| j * e.m + d))
        .collect();
    Ok(e.matrix.select_rows(&rows).select_cols(&cols))
}

/// Square restriction to the top `m - r` digits of inputs and outputs.
pub fn top_digit_block(e: &ExpandedMatrix, r: usize) -> Result<FpMatrix> {
    if r >= e.m {
        return Err(Error::OutOfRange(format!("low-digit count {r} must be < m = {}", e.m)));
    }
    let top: Vec<usize> = (r..e.m).collect();
    digit_block(e, &top, &top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn f4_operator() -> (FieldParams, FqMatrix) {
        let f = make_field(2, 2, Some(&[1, 1])).unwrap();
        let a = FqMatrix::from_images(&f, &[vec![1, 2], vec![3, 0]]).unwrap();
        (f, a)
    }

    #[test]
    fn f4_example_expands_to_known_operator() {
        let (f, a) = f4_operator();
        let e = expand_operator(&a, &f).unwrap();
        let expected = vec![
            vec![1, 0, 0, 1],
            vec![0, 1, 1, 1],
            vec![1, 1, 0, 0],
            vec![1, 0, 0, 0],
        ];
        assert_eq!(e.matrix().to_rows(), expected);
        // A is invertible over F_4, and so is its expansion
        assert_eq!(a.rank(&f), 2);
        assert_eq!(e.matrix().rank(), 4);
    }

    #[test]
    fn f4_top_digit_restrictions_are_singular() {
        let (f, a) = f4_operator();
        let e = expand_operator(&a, &f).unwrap();
        // digit position 0 on both sides: the low block
        let low = digit_block(&e, &[0], &[0]).unwrap();
        assert_eq!(low.to_rows(), vec![vec![1, 0], vec![1, 0]]);
        assert_eq!(low.rank(), 1);
        // most-significant-digit semantics
        let msb = top_digit_block(&e, 1).unwrap();
        assert_eq!(msb.to_rows(), vec![vec![1, 1], vec![0, 0]]);
        assert_eq!(msb.rank(), 1);
        // all columns kept: 2 x 4, too few rows to pin down 4 unknowns
        let rows = top_digit_submatrix(&e, 1).unwrap();
        assert_eq!(rows.shape(), (2, 4));
        assert_eq!(rows.to_rows(), vec![vec![0, 1, 1, 1], vec![1, 0, 0, 0]]);
    }

    #[test]
    fn identity_expands_to_identity() {
        let f = make_field(3, 3, None).unwrap();
        let e = expand_operator(&FqMatrix::identity(2), &f).unwrap();
        assert_eq!(e.matrix(), &FpMatrix::identity(3, 6));
    }

    #[test]
    fn submatrix_shapes_and_errors() {
        let f = make_field(2, 4, None).unwrap();
        let a = FqMatrix::from_images(&f, &[vec![3, 9], vec![1, 0], vec![7, 15]]).unwrap();
        let e = expand_operator(&a, &f).unwrap();
        assert_eq!(top_digit_submatrix(&e, 0).unwrap(), e.matrix().clone());
        assert_eq!(top_digit_submatrix(&e, 3).unwrap().shape(), (3, 8));
        assert!(matches!(top_digit_submatrix(&e, 4), Err(Error::OutOfRange(_))));
        let wrong = FqMatrix::from_images(&make_field(2, 5, None).unwrap(), &[vec![31]]).unwrap();
        assert!(matches!(expand_operator(&wrong, &f), Err(Error::FieldMismatch(_))));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::gf::make_field;
    use crate::rng::{random_vector, seeded};
    use proptest::prelude::*;

    fn random_matrix(f: &FieldParams, rows: usize, cols: usize, seed: u64) -> FqMatrix {
        let mut rng = seeded(seed);
        let data: Vec<Vec<u128>> =
            (0..rows).map(|_| random_vector(f, cols, &mut rng).iter().map(|x| x.image()).collect()).collect();
        FqMatrix::from_images(f, &data).unwrap()
    }

    proptest! {
        #[test]
        fn expansion_commutes_with_application(
            (p, m) in prop_oneof![Just((2u32, 5usize)), Just((3, 3)), Just((5, 2))],
            n in 1usize..5, k in 1usize..4, seed in any::<u64>(),
        ) {
            let f = make_field(p, m, None).unwrap();
            let a = random_matrix(&f, n, k, seed);
            let x = random_vector(&f, k, &mut seeded(seed ^ 1));
            let e = expand_operator(&a, &f).unwrap();
            let direct = f.expand_vec(&a.mul_vec(&f, &x).unwrap());
            prop_assert_eq!(&direct, &e.matrix().mul_vec(&f.expand_vec(&x)).unwrap());
            prop_assert_eq!(e.apply(&f, &x).unwrap(), a.mul_vec(&f, &x).unwrap());
        }

        #[test]
        fn expansion_is_multiplicative(
            (p, m) in prop_oneof![Just((2u32, 4usize)), Just((3, 2)), Just((7, 2))],
            seed in any::<u64>(),
        ) {
            let f = make_field(p, m, None).unwrap();
            let a = random_matrix(&f, 3, 2, seed);
            let b = random_matrix(&f, 2, 4, seed.wrapping_add(1));
            let ab = expand_operator(&a.mul(&f, &b).unwrap(), &f).unwrap();
            let ea = expand_operator(&a, &f).unwrap();
            let eb = expand_operator(&b, &f).unwrap();
            prop_assert_eq!(ab.matrix(), &ea.matrix().mul(eb.matrix()).unwrap());
        }
    }
}
