//! Exact rational scalars, combinatorics, and dense rational linear algebra.
//!
//! Everything here is exact: no rounding and no overflow. Rationals are
//! big-integer fractions kept in lowest terms with a positive denominator,
//! and the `U^T D U` factorization reconstructs its input bit-for-bit.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Arbitrary-precision rational number, always reduced, denominator > 0.
pub type Rational = num_rational::BigRational;

#[derive(Debug, thiserror::Error)]
pub enum ExactError {
    #[error("matrix is not symmetric (entry ({0},{1}) differs from ({1},{0}))")]
    NotSymmetric(usize, usize),
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics on `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is 1.
/// This is the serialization used in every file format.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let s = s.trim();
    let err = || ExactError::ParseRational(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| err())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// `n!` exactly.
pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

/// Binomial coefficient `C(n, k)`; zero when `k < 0` or `k > n`.
pub fn binomial(n: usize, k: i64) -> Rational {
    if k < 0 || k as usize > n {
        return Rational::zero();
    }
    let k = k as usize;
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

/// Rising factorial (Pochhammer symbol): `(x)_0 = 1`,
/// `(x)_n = x (x+1) ... (x+n-1)`.
pub fn rising_factorial(x: &Rational, n: usize) -> Rational {
    let mut acc = Rational::one();
    for k in 0..n {
        acc *= x + rat(k as i64);
    }
    acc
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = Rational::one();
        }
        m
    }

    /// Builds a matrix from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.check_symmetric().is_ok()
    }

    fn check_symmetric(&self) -> Result<(), ExactError> {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return Err(ExactError::NotSymmetric(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, ExactError> {
        if self.cols != other.rows {
            return Err(ExactError::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()
        }))
    }

    /// The k x k leading principal submatrix.
    pub fn leading_principal(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self.get(i, j).clone())
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format_rational(self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Result of the Cholesky-type factorization `S - diag(delta) = -U^T D U`.
#[derive(Clone, Debug)]
pub struct UtduFactorization {
    /// Unit-upper-triangular factor.
    pub u: RationalMatrix,
    /// Nonnegative diagonal of D.
    pub d: Vec<Rational>,
    /// Diagonal shift applied to S (all zero unless repair kicked in).
    pub delta: Vec<Rational>,
    /// False only for `repair = false` on an input whose negation is not PSD.
    pub success: bool,
}

/// Exact position-fixed `U^T D U` factorization of `-S`, optionally with a
/// greedy per-pivot diagonal repair.
///
/// With `repair = false`: if `-S` is positive semidefinite the output
/// satisfies `S = -U^T D U` exactly with `d >= 0` and `delta = 0`;
/// otherwise `success` is false. With `repair = true` the smallest
/// per-pivot nonnegative shift is chosen greedily so that
/// `S - diag(delta) = -U^T D U` always holds: a nonpositive pivot whose
/// remaining row is all zero is lifted to exactly zero (column skipped),
/// and a nonpositive pivot with a nonzero remaining row is lifted to 1.
pub fn utdu_factorize(s: &RationalMatrix, repair: bool) -> Result<UtduFactorization, ExactError> {
    if s.rows() != s.cols() {
        return Err(ExactError::Dimension("square matrix required".into()));
    }
    s.check_symmetric()?;
    let n = s.rows();
    // Work on M = -S; eliminate in place.
    let mut m = RationalMatrix::from_fn(n, n, |i, j| -s.get(i, j));
    let mut u = RationalMatrix::identity(n);
    let mut d = vec![Rational::zero(); n];
    let mut delta = vec![Rational::zero(); n];

    for k in 0..n {
        let mut pivot = m.get(k, k).clone();
        let row_zero = ((k + 1)..n).all(|j| m.get(k, j).is_zero());
        if pivot.is_negative() || (pivot.is_zero() && !row_zero) {
            if !repair {
                return Ok(UtduFactorization {
                    u,
                    d,
                    delta,
                    success: false,
                });
            }
            if row_zero {
                delta[k] = -&pivot;
                pivot = Rational::zero();
            } else {
                delta[k] = Rational::one() - &pivot;
                pivot = Rational::one();
            }
        }
        if pivot.is_zero() {
            // d_k = 0, row of U stays e_k.
            continue;
        }
        d[k] = pivot.clone();
        for j in (k + 1)..n {
            *u.get_mut(k, j) = m.get(k, j) / &pivot;
        }
        for i in (k + 1)..n {
            for j in i..n {
                let upd = m.get(i, j) - m.get(k, i) * m.get(k, j) / &pivot;
                *m.get_mut(i, j) = upd.clone();
                if i != j {
                    *m.get_mut(j, i) = upd;
                }
            }
        }
    }
    Ok(UtduFactorization {
        u,
        d,
        delta,
        success: true,
    })
}

/// Exact test of whether `-S` is positive semidefinite, via pivot signs
/// with the zero-pivot/nonzero-row rule.
pub fn is_negative_semidefinite(s: &RationalMatrix) -> Result<bool, ExactError> {
    Ok(utdu_factorize(s, false)?.success)
}
