//! Exact integer algebra for penalty-based pseudo-Boolean polynomials.
//!
//! For an `m x n` cost matrix `C`, every column `j` is ordered by a permutation
//! `pi_j` so that `c[pi_j(1)][j] <= ... <= c[pi_j(m)][j]`. With `delta_1j` the
//! column minimum and `delta_rj` the difference between neighbouring sorted
//! entries, the column contributes
//!
//! ```text
//! delta_1j + sum_{k=2..m} delta_kj * y[pi_j(1)] * ... * y[pi_j(k-1)]
//! ```
//!
//! and the polynomial of the matrix is the sum of those column polynomials with
//! monomials over the same variable set merged.
//!
//! Row indices are 0-based in the API. Canonical text output renders row `i`
//! as `y<i+1>`, so a 4-row matrix uses `y1..y4`.

use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

/// An `m x n` matrix of non-negative integer costs, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or(Error::EmptyMatrix { rows, cols })?;
        if entries.len() != expected {
            return Err(Error::EntryCount {
                rows,
                cols,
                expected,
                actual: entries.len(),
            });
        }
        // Aggregated coefficients are bounded by the sum of column maxima.
        let max_entry = entries.iter().copied().max().unwrap_or(0);
        let fits = u64::from(max_entry)
            .checked_mul(rows as u64)
            .and_then(|v| v.checked_mul(cols as u64))
            .is_some();
        if !fits {
            return Err(Error::Overflow {
                rows,
                cols,
                max_entry,
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::EntryCount {
                    rows: rows.len(),
                    cols,
                    expected: rows.len() * cols,
                    actual: entries.len() + row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = u32> + '_ {
        (0..self.rows).map(move |r| self.get(r, col))
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.entries
            .chunks(self.cols)
            .map(<[u32]>::to_vec)
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            entries.extend(self.column(c));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }
}

/// Per-column orderings of row indices that sort a cost matrix.
///
/// `get(rank, col)` is the 0-based row holding the `rank`-th smallest entry
/// of column `col`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMatrix {
    rows: usize,
    columns: Vec<Vec<usize>>,
}

impl PermutationMatrix {
    /// Wraps explicit column orderings, checking that each one is a
    /// permutation of `0..rows`.
    pub fn from_columns(rows: usize, columns: Vec<Vec<usize>>) -> Result<Self> {
        for (col, order) in columns.iter().enumerate() {
            let mut seen = vec![false; rows];
            if order.len() != rows {
                return Err(Error::InvalidPermutation { col });
            }
            for &r in order {
                if r >= rows || std::mem::replace(&mut seen[r], true) {
                    return Err(Error::InvalidPermutation { col });
                }
            }
        }
        Ok(Self { rows, columns })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, rank: usize, col: usize) -> usize {
        self.columns[col][rank]
    }

    pub fn column(&self, col: usize) -> &[usize] {
        &self.columns[col]
    }
}

/// First differences of the column-sorted matrix, row-major.
///
/// Row 0 holds the column minima.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl DeltaMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.entries
            .chunks(self.cols)
            .map(<[u32]>::to_vec)
            .collect()
    }
}

/// A coefficient times a product of Boolean variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    coefficient: u64,
    variables: Vec<u32>,
}

impl Monomial {
    /// Creates a monomial; variables are sorted and deduplicated since
    /// `y * y = y` for Boolean `y`.
    pub fn new(coefficient: u64, mut variables: Vec<u32>) -> Self {
        variables.sort_unstable();
        variables.dedup();
        Self {
            coefficient,
            variables,
        }
    }

    pub fn constant(coefficient: u64) -> Self {
        Self::new(coefficient, Vec::new())
    }

    pub fn coefficient(&self) -> u64 {
        self.coefficient
    }

    /// Sorted 0-based row indices.
    pub fn variables(&self) -> &[u32] {
        &self.variables
    }

    pub fn degree(&self) -> usize {
        self.variables.len()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        for v in &self.variables {
            write!(f, "*y{}", v + 1)?;
        }
        Ok(())
    }
}

/// Canonical order of variable sets: by degree, then colexicographically
/// (the largest variable decides first).
pub fn canonical_order(a: &[u32], b: &[u32]) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

/// A fully aggregated pseudo-Boolean polynomial in canonical order.
///
/// No two monomials share a variable set and no coefficient is zero, so two
/// polynomials are equal as functions exactly when their monomial lists are
/// equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PseudoBooleanPolynomial {
    source_rows: usize,
    monomials: Vec<Monomial>,
}

impl PseudoBooleanPolynomial {
    /// Runs the whole construction on a cost matrix: ordering, sorting,
    /// differencing and aggregation.
    pub fn from_matrix(matrix: &CostMatrix) -> Self {
        let pi = permutation_matrix(matrix);
        let sorted = sort_columns(matrix, &pi).expect("permutation built from this matrix");
        let delta = delta_matrix(&sorted).expect("columns sorted by construction");
        build_polynomial(&delta, &pi).expect("dimensions agree by construction")
    }

    /// Aggregates arbitrary monomials over `source_rows` variables.
    pub fn from_monomials(
        source_rows: usize,
        monomials: impl IntoIterator<Item = Monomial>,
    ) -> Result<Self> {
        let mut terms: Vec<Monomial> = monomials.into_iter().collect();
        if let Some(&index) = terms
            .iter()
            .flat_map(|m| m.variables.iter())
            .find(|&&v| v as usize >= source_rows)
        {
            return Err(Error::VariableIndex {
                index,
                rows: source_rows,
            });
        }
        terms.sort_unstable_by(|a, b| canonical_order(&a.variables, &b.variables));

        let mut merged: Vec<Monomial> = Vec::with_capacity(terms.len());
        let mut total: u64 = 0;
        for term in terms {
            total = total
                .checked_add(term.coefficient)
                .ok_or(Error::CoefficientOverflow)?;
            match merged.last_mut() {
                Some(last) if last.variables == term.variables => {
                    last.coefficient += term.coefficient;
                }
                _ => merged.push(term),
            }
        }
        merged.retain(|m| m.coefficient != 0);
        Ok(Self {
            source_rows,
            monomials: merged,
        })
    }

    /// Number of Boolean variables, i.e. rows of the source matrix.
    pub fn source_rows(&self) -> usize {
        self.source_rows
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Largest variable-set size; 0 for constant and empty polynomials.
    pub fn degree(&self) -> usize {
        // Canonical order puts the highest degree last.
        self.monomials.last().map_or(0, Monomial::degree)
    }

    pub fn constant_term(&self) -> u64 {
        self.monomials
            .first()
            .filter(|m| m.variables.is_empty())
            .map_or(0, |m| m.coefficient)
    }

    /// Value of the polynomial at a Boolean assignment of length `source_rows`.
    pub fn evaluate(&self, assignment: &[bool]) -> Result<u64> {
        if assignment.len() != self.source_rows {
            return Err(Error::AssignmentLength {
                expected: self.source_rows,
                actual: assignment.len(),
            });
        }
        Ok(self
            .monomials
            .iter()
            .filter(|m| m.variables.iter().all(|&v| assignment[v as usize]))
            .map(|m| m.coefficient)
            .sum())
    }

    /// Drops every monomial of degree greater than `max_degree`.
    pub fn truncate(&self, max_degree: TruncationThreshold) -> Self {
        Self {
            source_rows: self.source_rows,
            monomials: self
                .monomials
                .iter()
                .filter(|m| m.degree() <= max_degree.get() as usize)
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for PseudoBooleanPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Degree cut for the edge/blob decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TruncationThreshold(u32);

impl TruncationThreshold {
    pub const fn new(p: u32) -> Self {
        Self(p)
    }

    pub const fn get(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Edge,
    Blob,
}

/// Stable per-column argsort; equal values keep their original row order.
pub fn permutation_matrix(matrix: &CostMatrix) -> PermutationMatrix {
    let columns = (0..matrix.cols())
        .map(|c| {
            let mut order: Vec<usize> = (0..matrix.rows()).collect();
            order.sort_by_key(|&r| matrix.get(r, c));
            order
        })
        .collect();
    PermutationMatrix {
        rows: matrix.rows(),
        columns,
    }
}

/// Reorders every column of `matrix` by the matching column of `pi`.
pub fn sort_columns(matrix: &CostMatrix, pi: &PermutationMatrix) -> Result<CostMatrix> {
    check_dims(matrix.rows(), matrix.cols(), pi.rows(), pi.cols())?;
    let mut entries = vec![0; matrix.entries.len()];
    for c in 0..matrix.cols() {
        for (rank, &r) in pi.column(c).iter().enumerate() {
            entries[rank * matrix.cols() + c] = matrix.get(r, c);
        }
    }
    Ok(CostMatrix {
        rows: matrix.rows(),
        cols: matrix.cols(),
        entries,
    })
}

/// First differences down each column of a column-sorted matrix.
pub fn delta_matrix(sorted: &CostMatrix) -> Result<DeltaMatrix> {
    let cols = sorted.cols();
    let mut entries = Vec::with_capacity(sorted.entries.len());
    entries.extend_from_slice(sorted.row(0));
    for r in 1..sorted.rows() {
        for c in 0..cols {
            let diff = sorted
                .get(r, c)
                .checked_sub(sorted.get(r - 1, c))
                .ok_or(Error::UnsortedColumn { col: c, row: r })?;
            entries.push(diff);
        }
    }
    Ok(DeltaMatrix {
        rows: sorted.rows(),
        cols,
        entries,
    })
}

/// Expands every column into its monomials and merges them across columns.
pub fn build_polynomial(
    delta: &DeltaMatrix,
    pi: &PermutationMatrix,
) -> Result<PseudoBooleanPolynomial> {
    check_dims(delta.rows(), delta.cols(), pi.rows(), pi.cols())?;
    let rows = delta.rows();
    let mut terms = Vec::with_capacity(rows * delta.cols());
    let mut prefix: Vec<u32> = Vec::with_capacity(rows);
    for c in 0..delta.cols() {
        prefix.clear();
        for rank in 0..rows {
            let coefficient = u64::from(delta.get(rank, c));
            if coefficient > 0 {
                terms.push(Monomial {
                    coefficient,
                    variables: prefix.clone(),
                });
            }
            let var = pi.get(rank, c) as u32;
            let at = prefix.binary_search(&var).unwrap_or_else(|i| i);
            prefix.insert(at, var);
        }
    }
    PseudoBooleanPolynomial::from_monomials(rows, terms)
}

pub fn classify(degree: usize, p: TruncationThreshold) -> Class {
    if degree > p.get() as usize {
        Class::Edge
    } else {
        Class::Blob
    }
}

/// True when both polynomials carry the same monomials.
pub fn canonical_equal(a: &PseudoBooleanPolynomial, b: &PseudoBooleanPolynomial) -> bool {
    a.monomials == b.monomials
}

fn check_dims(rows: usize, cols: usize, other_rows: usize, other_cols: usize) -> Result<()> {
    if rows != other_rows || cols != other_cols {
        return Err(Error::DimensionMismatch {
            left_rows: rows,
            left_cols: cols,
            right_rows: other_rows,
            right_cols: other_cols,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> CostMatrix {
        CostMatrix::from_rows(&[[8, 8, 8, 5], [12, 7, 5, 7], [18, 2, 3, 1], [5, 18, 9, 8]]).unwrap()
    }

    fn one_based(pi: &PermutationMatrix) -> Vec<Vec<usize>> {
        (0..pi.rows())
            .map(|rank| (0..pi.cols()).map(|c| pi.get(rank, c) + 1).collect())
            .collect()
    }

    #[test]
    fn worked_example_permutation() {
        let pi = permutation_matrix(&worked());
        assert_eq!(
            one_based(&pi),
            vec![
                vec![4, 3, 3, 3],
                vec![1, 2, 2, 1],
                vec![2, 1, 1, 2],
                vec![3, 4, 4, 4]
            ]
        );
    }

    #[test]
    fn ties_keep_row_order() {
        let c = CostMatrix::from_rows(&[[99, 99], [99, 99]]).unwrap();
        assert_eq!(
            one_based(&permutation_matrix(&c)),
            vec![vec![1, 1], vec![2, 2]]
        );

        let c = CostMatrix::from_rows(&[[138], [139], [142], [142]]).unwrap();
        assert_eq!(permutation_matrix(&c).column(0), &[0, 1, 2, 3]);
    }

    #[test]
    fn worked_example_sorted_and_delta() {
        let c = worked();
        let pi = permutation_matrix(&c);
        let sorted = sort_columns(&c, &pi).unwrap();
        assert_eq!(
            sorted.to_rows(),
            vec![
                vec![5, 2, 3, 1],
                vec![8, 7, 5, 5],
                vec![12, 8, 8, 7],
                vec![18, 18, 9, 8]
            ]
        );
        let delta = delta_matrix(&sorted).unwrap();
        assert_eq!(
            delta.to_rows(),
            vec![
                vec![5, 2, 3, 1],
                vec![3, 5, 2, 4],
                vec![4, 1, 3, 2],
                vec![6, 10, 1, 1]
            ]
        );
    }

    #[test]
    fn sorted_constant_matrix_is_identity() {
        let c = CostMatrix::new(3, 3, vec![7; 9]).unwrap();
        assert_eq!(sort_columns(&c, &permutation_matrix(&c)).unwrap(), c);
    }

    #[test]
    fn constant_column_delta() {
        let c = CostMatrix::from_rows(&[[99], [99], [99], [99]]).unwrap();
        assert_eq!(
            delta_matrix(&c).unwrap().to_rows(),
            vec![vec![99], vec![0], vec![0], vec![0]]
        );
    }

    #[test]
    fn delta_rejects_decreasing_column() {
        let c = CostMatrix::from_rows(&[[1, 5], [2, 4]]).unwrap();
        assert_eq!(
            delta_matrix(&c),
            Err(Error::UnsortedColumn { col: 1, row: 1 })
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let c = worked();
        let other = permutation_matrix(&c.transpose().row_slice(0..3));
        assert!(matches!(
            sort_columns(&c, &other),
            Err(Error::DimensionMismatch { .. })
        ));
        let delta = delta_matrix(&sort_columns(&c, &permutation_matrix(&c)).unwrap()).unwrap();
        assert!(matches!(
            build_polynomial(&delta, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn worked_example_polynomial() {
        let poly = PseudoBooleanPolynomial::from_matrix(&worked());
        assert_eq!(
            poly.to_string(),
            "11 + 11*y3 + 3*y4 + 2*y1*y3 + 4*y2*y3 + 4*y1*y4 + 12*y1*y2*y3 + 6*y1*y2*y4"
        );
        assert_eq!(poly.len(), 8);
        assert_eq!(poly.degree(), 3);
        assert_eq!(poly.constant_term(), 11);
    }

    #[test]
    fn corner_evaluations_of_worked_example() {
        let poly = PseudoBooleanPolynomial::from_matrix(&worked());
        assert_eq!(poly.evaluate(&[false; 4]).unwrap(), 5 + 2 + 3 + 1);
        assert_eq!(poly.evaluate(&[true; 4]).unwrap(), 18 + 18 + 9 + 8);
        assert_eq!(
            poly.evaluate(&[true; 3]),
            Err(Error::AssignmentLength {
                expected: 4,
                actual: 3
            })
        );
    }

    #[test]
    fn truncation() {
        let poly = PseudoBooleanPolynomial::from_matrix(&worked());
        assert_eq!(
            poly.truncate(TruncationThreshold::new(1)).to_string(),
            "11 + 11*y3 + 3*y4"
        );
        assert_eq!(poly.truncate(TruncationThreshold::new(3)), poly);
        let constant =
            PseudoBooleanPolynomial::from_matrix(&CostMatrix::new(2, 2, vec![4; 4]).unwrap());
        assert_eq!(constant.truncate(TruncationThreshold::new(0)), constant);
    }

    #[test]
    fn classification_is_strict() {
        let p = |v| TruncationThreshold::new(v);
        assert_eq!(classify(3, p(2)), Class::Edge);
        assert_eq!(classify(0, p(0)), Class::Blob);
        for v in 0..6 {
            assert_eq!(classify(v as usize, p(v)), Class::Blob);
        }
    }

    #[test]
    fn variable_identity_matters() {
        let a = PseudoBooleanPolynomial::from_monomials(
            2,
            [Monomial::constant(550), Monomial::new(3, vec![0])],
        )
        .unwrap();
        let b = PseudoBooleanPolynomial::from_monomials(
            2,
            [Monomial::constant(550), Monomial::new(3, vec![1])],
        )
        .unwrap();
        assert!(canonical_equal(&a, &a));
        assert!(!canonical_equal(&a, &b));
    }

    #[test]
    fn from_monomials_merges_and_drops_zeros() {
        let poly = PseudoBooleanPolynomial::from_monomials(
            3,
            [
                Monomial::new(2, vec![2, 0]),
                Monomial::new(0, vec![1]),
                Monomial::new(5, vec![0, 2]),
                Monomial::constant(1),
            ],
        )
        .unwrap();
        assert_eq!(poly.to_string(), "1 + 7*y1*y3");
        assert_eq!(
            PseudoBooleanPolynomial::from_monomials(2, [Monomial::new(1, vec![2])]),
            Err(Error::VariableIndex { index: 2, rows: 2 })
        );
    }

    #[test]
    fn zero_matrix_gives_empty_polynomial() {
        let poly =
            PseudoBooleanPolynomial::from_matrix(&CostMatrix::new(3, 2, vec![0; 6]).unwrap());
        assert!(poly.is_empty());
        assert_eq!(poly.degree(), 0);
        assert_eq!(poly.to_string(), "0");
    }

    #[test]
    fn matrix_validation() {
        assert_eq!(
            CostMatrix::new(0, 3, vec![]),
            Err(Error::EmptyMatrix { rows: 0, cols: 3 })
        );
        assert!(matches!(
            CostMatrix::new(2, 2, vec![1, 2, 3]),
            Err(Error::EntryCount { .. })
        ));
        assert!(matches!(
            CostMatrix::from_rows(&[vec![1, 2], vec![3]]),
            Err(Error::EntryCount { .. })
        ));
    }

    #[test]
    fn permutation_validation() {
        assert!(PermutationMatrix::from_columns(3, vec![vec![2, 0, 1]]).is_ok());
        assert_eq!(
            PermutationMatrix::from_columns(3, vec![vec![0, 1, 2], vec![0, 0, 1]]),
            Err(Error::InvalidPermutation { col: 1 })
        );
    }

    impl CostMatrix {
        fn row_slice(&self, range: std::ops::Range<usize>) -> CostMatrix {
            let rows: Vec<Vec<u32>> = range.map(|r| self.row(r).to_vec()).collect();
            CostMatrix::from_rows(&rows).unwrap()
        }
    }
}
