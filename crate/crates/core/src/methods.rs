//! Stability functions `R(Z) = Q(Z)^{-1} P(Z)` with exact rational
//! coefficients, and ways to construct them: Pade and Taylor formulas,
//! Butcher tableaus, and a small named registry.

use crate::exactnum::{
    factorial, parse_rational, rat, ExactError, Rational, RationalMatrix,
};
use num_traits::{One, Zero};

#[derive(Debug, thiserror::Error)]
pub enum MethodError {
    #[error(
        "unknown method {0:?}; valid names: euler-backward, crank-nicolson, qin-zhang, \
         kraaijevanger-spijker, pade:M,N, taylor:P"
    )]
    UnknownMethod(String),
    #[error("invalid butcher tableau: {0}")]
    BadTableau(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A rational approximation of `e^Z`: numerator coefficients `theta`
/// (degree `s_p`) and denominator coefficients `vartheta` (degree `s_q`),
/// both normalized to constant term 1 and padded to length `s + 1` with
/// `s = max(s_p, s_q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityFunction {
    pub name: String,
    pub theta: Vec<Rational>,
    pub vartheta: Vec<Rational>,
    pub s_p: usize,
    pub s_q: usize,
}

impl StabilityFunction {
    fn new(name: impl Into<String>, mut theta: Vec<Rational>, mut vartheta: Vec<Rational>) -> Self {
        let s_p = degree(&theta);
        let s_q = degree(&vartheta);
        let s = s_p.max(s_q);
        theta.resize(s + 1, Rational::zero());
        vartheta.resize(s + 1, Rational::zero());
        debug_assert!(theta[0].is_one() && vartheta[0].is_one());
        Self {
            name: name.into(),
            theta,
            vartheta,
            s_p,
            s_q,
        }
    }

    /// `max(s_p, s_q)`, the common padded degree.
    pub fn s(&self) -> usize {
        self.s_p.max(self.s_q)
    }

    /// True when the denominator is trivial (explicit method).
    pub fn is_explicit(&self) -> bool {
        self.s_q == 0
    }
}

fn degree(coeffs: &[Rational]) -> usize {
    coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// The (m, n) Pade approximation of the exponential:
/// `theta_i = (m+n-i)! m! / ((m+n)! i! (m-i)!)` and
/// `vartheta_i = (-1)^i (m+n-i)! n! / ((m+n)! i! (n-i)!)`.
pub fn make_pade(m: usize, n: usize) -> StabilityFunction {
    assert!(m + n >= 1, "pade requires m + n >= 1");
    let denom = factorial(m + n);
    let theta: Vec<Rational> = (0..=m)
        .map(|i| factorial(m + n - i) * factorial(m) / (&denom * factorial(i) * factorial(m - i)))
        .collect();
    let vartheta: Vec<Rational> = (0..=n)
        .map(|i| {
            let v = factorial(m + n - i) * factorial(n) / (&denom * factorial(i) * factorial(n - i));
            if i % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect();
    StabilityFunction::new(format!("pade:{m},{n}"), theta, vartheta)
}

/// Degree-p truncated Taylor expansion of the exponential (explicit).
pub fn make_taylor(p: usize) -> StabilityFunction {
    assert!(p >= 1, "taylor requires p >= 1");
    let theta: Vec<Rational> = (0..=p).map(|i| rat(1) / factorial(i)).collect();
    StabilityFunction::new(format!("taylor:{p}"), theta, vec![rat(1)])
}

/// Butcher coefficient arrays (A, b) of an RK method.
#[derive(Clone, Debug)]
pub struct ButcherTableau {
    pub a: RationalMatrix,
    pub b: Vec<Rational>,
}

impl ButcherTableau {
    pub fn new(a: RationalMatrix, b: Vec<Rational>) -> Result<Self, MethodError> {
        let s = a.rows();
        if a.cols() != s || b.len() != s || s == 0 {
            return Err(MethodError::BadTableau(format!(
                "A is {}x{} but b has length {}",
                a.rows(),
                a.cols(),
                b.len()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn stages(&self) -> usize {
        self.a.rows()
    }

    /// Parses the plain-text tableau format: line 1 is the stage count,
    /// the next `s` lines are the rows of A, the last line is b. Entries
    /// are whitespace-separated rationals; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, MethodError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let s: usize = lines
            .next()
            .ok_or_else(|| MethodError::BadTableau("empty input".into()))?
            .parse()
            .map_err(|_| MethodError::BadTableau("first line must be the stage count".into()))?;
        let parse_row = |line: &str| -> Result<Vec<Rational>, MethodError> {
            let row: Result<Vec<_>, _> = line.split_whitespace().map(parse_rational).collect();
            let row = row?;
            if row.len() != s {
                return Err(MethodError::BadTableau(format!(
                    "expected {s} entries per row, got {}",
                    row.len()
                )));
            }
            Ok(row)
        };
        let mut a_rows = Vec::with_capacity(s);
        for _ in 0..s {
            let line = lines
                .next()
                .ok_or_else(|| MethodError::BadTableau("missing rows of A".into()))?;
            a_rows.push(parse_row(line)?);
        }
        let b_line = lines
            .next()
            .ok_or_else(|| MethodError::BadTableau("missing b row".into()))?;
        let b = parse_row(b_line)?;
        if lines.next().is_some() {
            return Err(MethodError::BadTableau("trailing content".into()));
        }
        Self::new(RationalMatrix::from_rows(a_rows)?, b)
    }
}

/// Exact determinant by rational Gaussian elimination with row swaps.
fn determinant(m: &RationalMatrix) -> Rational {
    let n = m.rows();
    let mut a = m.to_row_vecs();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        for i in (k + 1)..n {
            let factor = &a[i][k] / &pivot;
            for j in k..n {
                let sub = &factor * &a[k][j];
                a[i][j] -= sub;
            }
        }
    }
    det
}

/// Coefficients of the unique degree < nodes.len() polynomial through the
/// given (node, value) pairs.
fn lagrange_coefficients(nodes: &[Rational], values: &[Rational]) -> Vec<Rational> {
    let n = nodes.len();
    let mut coeffs = vec![Rational::zero(); n];
    for i in 0..n {
        // Basis polynomial prod_{j != i} (z - x_j) / (x_i - x_j).
        let mut basis = vec![Rational::zero(); n];
        basis[0] = Rational::one();
        let mut scale = Rational::one();
        let mut deg = 0usize;
        for j in 0..n {
            if j == i {
                continue;
            }
            scale *= &nodes[i] - &nodes[j];
            for k in (0..=deg).rev() {
                let shifted = basis[k].clone();
                basis[k + 1] += &shifted;
                basis[k] = -&nodes[j] * shifted;
            }
            deg += 1;
        }
        let weight = &values[i] / scale;
        for k in 0..n {
            coeffs[k] += &basis[k] * &weight;
        }
    }
    coeffs
}

/// Stability function of an RK tableau:
/// `P(z) = det(I - zA + z 1 b^T)`, `Q(z) = det(I - zA)`, both computed
/// exactly by evaluation at `2*stages + 1` integer nodes followed by
/// Lagrange interpolation.
pub fn from_butcher(t: &ButcherTableau) -> StabilityFunction {
    let stages = t.stages();
    let n_nodes = 2 * stages + 1;
    let nodes: Vec<Rational> = (0..n_nodes)
        .map(|k| {
            // 0, 1, -1, 2, -2, ...
            let half = ((k + 1) / 2) as i64;
            rat(if k % 2 == 1 { half } else { -half })
        })
        .collect();
    let mut p_vals = Vec::with_capacity(n_nodes);
    let mut q_vals = Vec::with_capacity(n_nodes);
    for z in &nodes {
        let q_mat = RationalMatrix::from_fn(stages, stages, |i, j| {
            let mut e = -z * t.a.get(i, j);
            if i == j {
                e += Rational::one();
            }
            e
        });
        let p_mat = RationalMatrix::from_fn(stages, stages, |i, j| {
            let mut e = -z * t.a.get(i, j) + z * &t.b[j];
            if i == j {
                e += Rational::one();
            }
            e
        });
        q_vals.push(determinant(&q_mat));
        p_vals.push(determinant(&p_mat));
    }
    let theta = lagrange_coefficients(&nodes, &p_vals);
    let vartheta = lagrange_coefficients(&nodes, &q_vals);
    StabilityFunction::new("butcher", theta, vartheta)
}

/// Looks up a stability function by name. The grammar accepts the four
/// named classics plus `pade:M,N` and `taylor:P`.
pub fn builtin(name: &str) -> Result<StabilityFunction, MethodError> {
    let unknown = || MethodError::UnknownMethod(name.to_string());
    if let Some(args) = name.strip_prefix("pade:") {
        let (m, n) = args.split_once(',').ok_or_else(unknown)?;
        let m: usize = m.trim().parse().map_err(|_| unknown())?;
        let n: usize = n.trim().parse().map_err(|_| unknown())?;
        if m + n == 0 {
            return Err(unknown());
        }
        return Ok(make_pade(m, n));
    }
    if let Some(arg) = name.strip_prefix("taylor:") {
        let p: usize = arg.trim().parse().map_err(|_| unknown())?;
        if p == 0 {
            return Err(unknown());
        }
        return Ok(make_taylor(p));
    }
    match name {
        "euler-backward" => {
            let mut sf = make_pade(0, 1);
            sf.name = "euler-backward".into();
            Ok(sf)
        }
        "crank-nicolson" => {
            let mut sf = make_pade(1, 1);
            sf.name = "crank-nicolson".into();
            Ok(sf)
        }
        "qin-zhang" => {
            let a = RationalMatrix::from_rows(vec![
                vec![crate::exactnum::ratio(1, 4), rat(0)],
                vec![crate::exactnum::ratio(1, 2), crate::exactnum::ratio(1, 4)],
            ])?;
            let b = vec![crate::exactnum::ratio(1, 2), crate::exactnum::ratio(1, 2)];
            let mut sf = from_butcher(&ButcherTableau::new(a, b)?);
            sf.name = "qin-zhang".into();
            Ok(sf)
        }
        "kraaijevanger-spijker" => {
            let a = RationalMatrix::from_rows(vec![
                vec![crate::exactnum::ratio(1, 2), rat(0)],
                vec![crate::exactnum::ratio(-1, 2), rat(2)],
            ])?;
            let b = vec![crate::exactnum::ratio(-1, 2), crate::exactnum::ratio(3, 2)];
            let mut sf = from_butcher(&ButcherTableau::new(a, b)?);
            sf.name = "kraaijevanger-spijker".into();
            Ok(sf)
        }
        _ => Err(unknown()),
    }
}

/// Largest p such that the coefficients of `Q(z) e^z - P(z)` vanish
/// through degree p, i.e. `sum_l vartheta_l / (k-l)! = theta_k` exactly
/// for all `1 <= k <= p`. Search is capped at `2s + 2`.
pub fn approximation_order(sf: &StabilityFunction) -> usize {
    let s = sf.s();
    let mut p = 0;
    for k in 1..=(2 * s + 2) {
        let lhs: Rational = (0..=k.min(s))
            .map(|l| &sf.vartheta[l] / factorial(k - l))
            .sum();
        let rhs = if k <= s {
            sf.theta[k].clone()
        } else {
            Rational::zero()
        };
        if lhs != rhs {
            break;
        }
        p = k;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    #[test]
    fn pade_examples() {
        let sf = make_pade(1, 1);
        assert_eq!(sf.theta, vec![rat(1), ratio(1, 2)]);
        assert_eq!(sf.vartheta, vec![rat(1), ratio(-1, 2)]);

        let sf = make_pade(0, 3);
        assert_eq!(sf.vartheta, vec![rat(1), rat(-1), ratio(1, 2), ratio(-1, 6)]);
        assert_eq!(sf.theta, vec![rat(1), rat(0), rat(0), rat(0)]);

        let sf = make_pade(4, 1);
        assert_eq!(
            sf.theta,
            vec![rat(1), ratio(4, 5), ratio(3, 10), ratio(1, 15), ratio(1, 120)]
        );
        assert_eq!(sf.vartheta[..2], [rat(1), ratio(-1, 5)]);
        assert_eq!(sf.s_q, 1);
    }

    #[test]
    fn diagonal_pade_symmetry() {
        for s in 1..=20 {
            let sf = make_pade(s, s);
            for i in 0..=s {
                let sign = if i % 2 == 0 { rat(1) } else { rat(-1) };
                assert_eq!(sf.theta[i], sign * &sf.vartheta[i]);
            }
        }
    }

    #[test]
    fn taylor_examples() {
        assert_eq!(make_taylor(1).theta, vec![rat(1), rat(1)]);
        assert_eq!(make_taylor(2).theta, vec![rat(1), rat(1), ratio(1, 2)]);
        assert_eq!(
            make_taylor(4).theta,
            vec![rat(1), rat(1), ratio(1, 2), ratio(1, 6), ratio(1, 24)]
        );
        assert!(make_taylor(3).is_explicit());
    }

    #[test]
    fn butcher_qin_zhang() {
        let sf = builtin("qin-zhang").unwrap();
        assert_eq!(sf.theta, vec![rat(1), ratio(1, 2), ratio(1, 16)]);
        assert_eq!(sf.vartheta, vec![rat(1), ratio(-1, 2), ratio(1, 16)]);
    }

    #[test]
    fn butcher_kraaijevanger_spijker() {
        let sf = builtin("kraaijevanger-spijker").unwrap();
        assert_eq!(sf.theta, vec![rat(1), ratio(-3, 2), ratio(1, 2)]);
        assert_eq!(sf.vartheta, vec![rat(1), ratio(-5, 2), rat(1)]);
    }

    #[test]
    fn butcher_explicit_euler() {
        let t = ButcherTableau::new(
            RationalMatrix::from_rows(vec![vec![rat(0)]]).unwrap(),
            vec![rat(1)],
        )
        .unwrap();
        let sf = from_butcher(&t);
        assert_eq!(sf.theta, vec![rat(1), rat(1)]);
        assert_eq!(sf.vartheta, vec![rat(1), rat(0)]);
        assert_eq!(sf.s_q, 0);
    }

    #[test]
    fn builtin_names() {
        let sf = builtin("euler-backward").unwrap();
        assert_eq!(sf.theta, vec![rat(1), rat(0)]);
        assert_eq!(sf.vartheta, vec![rat(1), rat(-1)]);
        assert_eq!(builtin("pade:3,3").unwrap().s(), 3);
        assert_eq!(
            builtin("taylor:3").unwrap().theta,
            vec![rat(1), rat(1), ratio(1, 2), ratio(1, 6)]
        );
        assert!(matches!(
            builtin("runge"),
            Err(MethodError::UnknownMethod(_))
        ));
    }

    #[test]
    fn orders() {
        for s in 1..=5 {
            assert_eq!(approximation_order(&make_pade(s, s)), 2 * s);
            assert_eq!(approximation_order(&make_taylor(s)), s);
        }
        assert_eq!(approximation_order(&builtin("euler-backward").unwrap()), 1);
        for m in 0..=5 {
            for n in 0..=5 {
                if m + n >= 1 && m + n <= 10 {
                    assert_eq!(approximation_order(&make_pade(m, n)), m + n);
                }
            }
        }
    }

    #[test]
    fn tableau_parsing() {
        let text = "# Qin and Zhang\n2\n1/4 0\n1/2 1/4\n1/2 1/2\n";
        let t = ButcherTableau::parse(text).unwrap();
        assert_eq!(t.stages(), 2);
        let sf = from_butcher(&t);
        assert_eq!(sf.theta, vec![rat(1), ratio(1, 2), ratio(1, 16)]);
        assert!(ButcherTableau::parse("2\n1 0\n").is_err());
        assert!(ButcherTableau::parse("").is_err());
    }
}
