//! Exact rational Gaussian elimination: reduced row echelon form, rank,
//! kernel bases and the affine dependencies between matrix columns.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Dense matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigRational>>,
}

/// Basis of a null space. Every vector has one entry per matrix column.
pub type KernelBasis = Vec<Vec<BigRational>>;

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![vec![BigRational::zero(); cols]; rows] }
    }

    /// Builds a matrix from rows. All rows must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        RationalMatrix { rows: rows.len(), cols, data: rows }
    }

    pub fn from_integers(cols: usize, rows: &[Vec<BigInt>]) -> Self {
        let data = rows.iter().map(|r| r.iter().cloned().map(BigRational::from_integer).collect()).collect();
        RationalMatrix::from_rows(cols, data)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect();
        RationalMatrix::from_rows(cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r][c]
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r]
    }

    /// `[self | 1]`: a column of ones appended on the right.
    pub fn with_ones_column(&self) -> RationalMatrix {
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(BigRational::one());
                r
            })
            .collect();
        RationalMatrix { rows: self.rows, cols: self.cols + 1, data }
    }

    /// Columns reordered: column `i` of the result is column `order[i]`.
    pub fn permute_columns(&self, order: &[usize]) -> RationalMatrix {
        let data = self.data.iter().map(|r| order.iter().map(|&c| r[c].clone()).collect()).collect();
        RationalMatrix { rows: self.rows, cols: order.len(), data }
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        self.data.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // Smallest nonzero entry by numerator plus denominator size.
            let Some(p) = (r..self.rows)
                .filter(|&i| !m[i][c].is_zero())
                .min_by_key(|&i| m[i][c].numer().bits() + m[i][c].denom().bits())
            else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].recip();
            for v in m[r].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = m[r].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (RationalMatrix { rows: self.rows, cols: self.cols, data: m }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

/// A basis of `{v | M·v = 0}`, one vector per free column of the RREF.
pub fn kernel_basis(m: &RationalMatrix) -> KernelBasis {
    let (r, pivots) = m.rref();
    let free = (0..m.cols()).filter(|c| !pivots.contains(c));
    free.map(|f| {
        let mut v = vec![BigRational::zero(); m.cols()];
        v[f] = BigRational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -r.get(row, f).clone();
        }
        v
    })
    .collect()
}

/// An affine relation `column = Σ coeff·column + constant` among the
/// columns of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedColumn {
    pub column: usize,
    pub terms: Vec<(usize, BigRational)>,
    pub constant: BigRational,
}

/// Affine structure of the rows of `N` recovered from a kernel basis of
/// `[N | 1]`: a set of independent columns and, for every other column, its
/// value as an affine function of the independent ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineDependencies {
    pub independent: Vec<usize>,
    pub solved: Vec<SolvedColumn>,
}

/// Splits the `cols` columns of `N` into independent and solved ones, given
/// `basis = kernel_basis([N | 1])`. Leftmost columns are kept independent.
pub fn affine_dependencies(cols: usize, basis: &KernelBasis) -> AffineDependencies {
    if basis.is_empty() {
        return AffineDependencies { independent: (0..cols).collect(), solved: Vec::new() };
    }
    // Reverse the data columns so elimination pivots on the rightmost ones;
    // the constant column stays last.
    let order: Vec<usize> = (0..cols).rev().chain(core::iter::once(cols)).collect();
    let k = RationalMatrix::from_rows(cols + 1, basis.clone()).permute_columns(&order);
    let (r, pivots) = k.rref();
    let pivot_cols: Vec<usize> = pivots.iter().map(|&p| order[p]).collect();
    assert!(!pivot_cols.contains(&cols), "kernel basis is inconsistent with [N | 1]");
    let independent: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut solved: Vec<SolvedColumn> = pivots
        .iter()
        .enumerate()
        .map(|(row, &p)| {
            let terms = independent
                .iter()
                .filter_map(|&f| {
                    let pos = order.iter().position(|&o| o == f).unwrap_or(cols);
                    let coeff = -r.get(row, pos).clone();
                    (!coeff.is_zero()).then_some((f, coeff))
                })
                .collect();
            // Row reads: col + Σ e_f·f + e_c = 0, the constant column
            // holding e_c (the basis entry multiplying the ones column).
            SolvedColumn { column: order[p], terms, constant: -r.get(row, cols).clone() }
        })
        .collect();
    solved.sort_by_key(|s| s.column);
    AffineDependencies { independent, solved }
}

/// Independent columns of `N`, given a kernel basis of `[N | 1]`.
pub fn independent_columns(n: &RationalMatrix, basis: &KernelBasis) -> Vec<usize> {
    affine_dependencies(n.cols(), basis).independent
}

/// The shortest integer multiple of a rational vector: denominators cleared
/// by their lcm, then divided by the gcd of the numerators. The first
/// nonzero entry keeps its sign.
pub fn to_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// `(d, r)` such that every value is `r` modulo `d`, with `d` the largest
/// such integer. `None` when `d ≤ 1` or all values coincide.
pub fn divisibility_of_column(values: &[BigInt]) -> Option<(BigInt, BigInt)> {
    let first = values.first()?;
    let d = values.iter().fold(BigInt::zero(), |g, v| g.gcd(&(v - first)));
    if d <= BigInt::one() {
        return None;
    }
    let r = first.mod_floor(&d);
    Some((d, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }
    fn qv(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| q(x)).collect()
    }
    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn in_span(basis: &KernelBasis, v: &[BigRational]) -> bool {
        let mut rows = basis.clone();
        rows.push(v.to_vec());
        RationalMatrix::from_rows(v.len(), rows).rank() == basis.len()
    }

    #[test]
    fn dependent_bound_columns() {
        let n = RationalMatrix::from_i64(&[&[2, -2, 3], &[4, -4, 5], &[8, -8, 9]]);
        let m = n.with_ones_column();
        let b = kernel_basis(&m);
        assert_eq!(b.len(), 2);
        for v in &b {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        assert!(in_span(&b, &qv(&[1, 1, 0, 0])));
        assert!(in_span(&b, &qv(&[1, 0, -1, 1])));
        let deps = affine_dependencies(3, &b);
        assert_eq!(deps.independent, [0]);
        // v1 = -v0, v2 = v0 + 1
        assert_eq!(deps.solved[0], SolvedColumn { column: 1, terms: vec![(0, q(-1))], constant: q(0) });
        assert_eq!(deps.solved[1], SolvedColumn { column: 2, terms: vec![(0, q(1))], constant: q(1) });
    }

    #[test]
    fn full_closure_case_has_empty_kernel() {
        let n = RationalMatrix::from_i64(&[&[0, 6], &[6, 0], &[5, 5]]);
        assert!(kernel_basis(&n.with_ones_column()).is_empty());
        assert_eq!(independent_columns(&n, &Vec::new()), [0, 1]);
    }

    #[test]
    fn identity_has_empty_kernel() {
        assert!(kernel_basis(&RationalMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).is_empty());
    }

    #[test]
    fn duplicated_column_keeps_one_representative() {
        let n = RationalMatrix::from_i64(&[&[1, 1, 7], &[3, 3, 2], &[5, 5, 0]]);
        let b = kernel_basis(&n.with_ones_column());
        let deps = affine_dependencies(3, &b);
        assert_eq!(deps.independent, [0, 2]);
        // The dropped column is reproduced by the solved equality.
        let s = &deps.solved[0];
        assert_eq!(s.column, 1);
        for r in 0..n.rows() {
            let mut val = s.constant.clone();
            for (c, k) in &s.terms {
                val += k * n.get(r, *c);
            }
            assert_eq!(&val, n.get(r, 1));
        }
    }

    #[test]
    fn divisibility_examples() {
        assert_eq!(divisibility_of_column(&ints(&[2, 4, 8])), Some((2.into(), 0.into())));
        assert_eq!(divisibility_of_column(&ints(&[3, 7, 11])), Some((4.into(), 3.into())));
        assert_eq!(divisibility_of_column(&ints(&[5, 6])), None);
        assert_eq!(divisibility_of_column(&ints(&[5, 5])), None);
    }

    #[test]
    fn integer_scaling() {
        let v = vec![BigRational::new(1.into(), 2.into()), BigRational::new((-3).into(), 4.into()), q(0)];
        assert_eq!(to_integer_vector(&v), ints(&[2, -3, 0]));
    }
}
