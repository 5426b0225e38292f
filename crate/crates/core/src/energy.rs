//! The discrete energy law of an arbitrary stability function: exact
//! coefficient matrices (alpha, beta, gamma), the shifted Cholesky-type
//! decomposition, the resulting stability classification, and a renderer
//! for the per-step energy identity.

use crate::exactnum::{is_negative_semidefinite, utdu_factorize, Rational, RationalMatrix};
use crate::methods::StabilityFunction;
use num_traits::{Signed, Zero};

/// Exact coefficients of the quadratic energy expansion:
/// `alpha_{i,j} = theta_i theta_j - vartheta_i vartheta_j` (size
/// `(s+1) x (s+1)`), the norm coefficients `beta` (length `s+1`), and the
/// semi-inner-product coefficient matrix `gamma` (size `s x s`).
#[derive(Clone, Debug)]
pub struct EnergyCoefficients {
    pub alpha: RationalMatrix,
    pub beta: Vec<Rational>,
    pub gamma: RationalMatrix,
}

/// Shifted decomposition `gamma - diag(delta) = -U~^T diag(d~) U~` with
/// `delta >= 0`, `d~ >= 0`, and `U~` unit upper triangular.
#[derive(Clone, Debug)]
pub struct EnergyDecomposition {
    pub delta: Vec<Rational>,
    pub d_tilde: Vec<Rational>,
    pub u_tilde: RationalMatrix,
    pub beta: Vec<Rational>,
}

/// Stability outcome derived from the energy law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// `||u^{n+1}|| <= ||u^n||` for every step size.
    UnconditionallyStrong,
    /// Strong stability under a step-size constraint `tau ||L|| <= lambda_0`.
    ConditionallyStrong,
    /// Only the weak bound `||u^{n+1}||^2 <= (1 + C lambda^kappa) ||u^n||^2`.
    WeakOnly(usize),
    /// Energy growth of order `lambda^kappa` for generic seminegative L.
    NotStronglyStable(usize),
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::UnconditionallyStrong => write!(f, "unconditionally-strong"),
            Self::ConditionallyStrong => write!(f, "conditionally-strong"),
            Self::WeakOnly(k) => write!(f, "weak({k})"),
            Self::NotStronglyStable(k) => write!(f, "not-strongly-stable({k})"),
        }
    }
}

/// The stability indices: `zeta` is the position of the first nonzero
/// `beta_k` (`None` when all vanish), `rho` the order of the largest
/// negative-semidefinite leading principal submatrix of gamma, and
/// `kappa = min(2 zeta, 2 rho + 1)`.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub zeta: Option<usize>,
    pub beta_zeta_sign: i8,
    pub rho: usize,
    pub kappa: usize,
    pub classification: Classification,
}

/// `(s+1) x (s+1)` symmetric matrix with entries
/// `theta_i theta_j - vartheta_i vartheta_j`.
pub fn alpha_matrix(sf: &StabilityFunction) -> RationalMatrix {
    let n = sf.s() + 1;
    RationalMatrix::from_fn(n, n, |i, j| {
        &sf.theta[i] * &sf.theta[j] - &sf.vartheta[i] * &sf.vartheta[j]
    })
}

/// The norm and semi-norm coefficients of the energy expansion:
/// `beta_k = sum_l alpha_{l,2k-l} (-1)^{k-l}` and
/// `gamma_{i,j} = sum_l (-1)^{min(i,j)+1-l} alpha_{l,i+j+1-l}`, both sums
/// over the range where the alpha indices stay inside `0..=s`.
pub fn beta_gamma(sf: &StabilityFunction) -> EnergyCoefficients {
    let s = sf.s();
    let alpha = alpha_matrix(sf);
    let beta: Vec<Rational> = (0..=s)
        .map(|k| {
            let lo = (2 * k).saturating_sub(s);
            let hi = (2 * k).min(s);
            (lo..=hi)
                .map(|l| {
                    let a = alpha.get(l, 2 * k - l).clone();
                    if (k as i64 - l as i64) % 2 == 0 {
                        a
                    } else {
                        -a
                    }
                })
                .sum()
        })
        .collect();
    let gamma = RationalMatrix::from_fn(s, s, |i, j| {
        let m = i.min(j);
        let lo = (i + j + 1).saturating_sub(s);
        let hi = m;
        if lo > hi {
            return Rational::zero();
        }
        (lo..=hi)
            .map(|l| {
                let a = alpha.get(l, i + j + 1 - l).clone();
                if (m + 1 - l) % 2 == 0 {
                    a
                } else {
                    -a
                }
            })
            .sum()
    });
    EnergyCoefficients { alpha, beta, gamma }
}

/// Shifted exact decomposition of gamma via the repaired `U^T D U`
/// factorization; `delta` is identically zero whenever gamma is already
/// negative semidefinite.
pub fn decompose(ec: &EnergyCoefficients) -> EnergyDecomposition {
    let f = utdu_factorize(&ec.gamma, true).expect("gamma is symmetric by construction");
    debug_assert!(f.success);
    EnergyDecomposition {
        delta: f.delta,
        d_tilde: f.d,
        u_tilde: f.u,
        beta: ec.beta.clone(),
    }
}

/// Stability indices and classification from the signs of `beta` and the
/// leading principal submatrices of gamma.
pub fn classify(ec: &EnergyCoefficients, _dec: &EnergyDecomposition) -> StabilityReport {
    let s = ec.gamma.rows();
    let zeta = ec.beta.iter().position(|b| !b.is_zero());
    let beta_zeta_sign = match zeta {
        Some(z) if ec.beta[z].is_positive() => 1,
        Some(_) => -1,
        None => 0,
    };
    let mut rho = 0;
    for r in 1..=s {
        if is_negative_semidefinite(&ec.gamma.leading_principal(r))
            .expect("gamma is symmetric by construction")
        {
            rho = r;
        } else {
            break;
        }
    }
    let kappa = match zeta {
        Some(z) => (2 * z).min(2 * rho + 1),
        None => 2 * rho + 1,
    };
    let all_beta_nonpositive = ec.beta.iter().all(|b| !b.is_positive());
    let gamma_nsd = rho == s;
    let classification = if all_beta_nonpositive && gamma_nsd {
        Classification::UnconditionallyStrong
    } else if beta_zeta_sign > 0 {
        Classification::NotStronglyStable(kappa)
    } else if let Some(z) = zeta {
        if z <= rho && beta_zeta_sign < 0 {
            Classification::ConditionallyStrong
        } else {
            Classification::WeakOnly(kappa)
        }
    } else {
        Classification::WeakOnly(kappa)
    };
    StabilityReport {
        zeta,
        beta_zeta_sign,
        rho,
        kappa,
        classification,
    }
}

/// Whether a term of the rendered identity is a plain norm or the
/// dissipation semi-norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermKind {
    Norm,
    Seminorm,
}

/// One additive term of the energy identity, as it appears on the
/// right-hand side of `||u^{n+1}||^2 - ||u^n||^2 = ...`. The argument is a
/// polynomial in `tau L` applied to `w = Q(tau L)^{-1} u^n`, stored as its
/// coefficient sequence (so `[1]` is `w` itself and a `d~` term carries the
/// corresponding row of `U~`).
#[derive(Clone, Debug)]
pub struct EnergyTerm {
    pub kind: TermKind,
    pub coefficient: Rational,
    pub tau_power: usize,
    pub operator_power: usize,
    pub argument: Vec<Rational>,
}

/// Ordered list of the nonzero terms of the identity: the `beta_k` norm
/// terms, then the `-d~_k` semi-norm terms, then the `+delta_k` semi-norm
/// terms.
pub fn energy_law_terms(
    _sf: &StabilityFunction,
    ec: &EnergyCoefficients,
    dec: &EnergyDecomposition,
) -> Vec<EnergyTerm> {
    let s = ec.gamma.rows();
    let mut terms = Vec::new();
    for (k, b) in ec.beta.iter().enumerate() {
        if !b.is_zero() {
            terms.push(EnergyTerm {
                kind: TermKind::Norm,
                coefficient: b.clone(),
                tau_power: 2 * k,
                operator_power: k,
                argument: vec![Rational::from_integer(1.into())],
            });
        }
    }
    for k in 0..s {
        if !dec.d_tilde[k].is_zero() {
            terms.push(EnergyTerm {
                kind: TermKind::Seminorm,
                coefficient: -&dec.d_tilde[k],
                tau_power: 2 * k + 1,
                operator_power: k,
                argument: (k..s).map(|j| dec.u_tilde.get(k, j).clone()).collect(),
            });
        }
    }
    for k in 0..s {
        if !dec.delta[k].is_zero() {
            terms.push(EnergyTerm {
                kind: TermKind::Seminorm,
                coefficient: dec.delta[k].clone(),
                tau_power: 2 * k + 1,
                operator_power: k,
                argument: vec![Rational::from_integer(1.into())],
            });
        }
    }
    terms
}

/// Pretty-prints the identity with `w` denoting `Q(tau L)^{-1} u^n`; the
/// semi-norm arguments are written out as polynomials in `tau L` applied
/// to `w`.
pub fn render_energy_law(terms: &[EnergyTerm]) -> String {
    use crate::exactnum::format_rational;
    use num_traits::One;
    if terms.is_empty() {
        return "|u^{n+1}|^2 - |u^n|^2 = 0".to_string();
    }
    let mut out = String::from("|u^{n+1}|^2 - |u^n|^2 =");
    for (idx, t) in terms.iter().enumerate() {
        let mag = t.coefficient.abs();
        let sign = if t.coefficient.is_negative() { "-" } else { "+" };
        if idx == 0 && sign == "-" {
            out.push_str(" -");
        } else if idx == 0 {
            // Leading plus is omitted.
        } else {
            out.push(' ');
            out.push_str(sign);
        }
        out.push(' ');
        if !mag.is_one() {
            out.push_str(&format!("({})", format_rational(&mag)));
        }
        match t.tau_power {
            0 => {}
            1 => out.push_str("t"),
            p => out.push_str(&format!("t^{p}")),
        }
        let arg = render_argument(t.operator_power, &t.argument);
        match t.kind {
            TermKind::Norm => out.push_str(&format!("|{arg}|^2")),
            TermKind::Seminorm => out.push_str(&format!("[{arg}]^2")),
        }
    }
    out
}

fn render_argument(op_power: usize, poly: &[Rational]) -> String {
    use crate::exactnum::format_rational;
    use num_traits::One;
    let prefix = match op_power {
        0 => String::new(),
        1 => "L".to_string(),
        p => format!("L^{p}"),
    };
    let is_plain = poly.len() == 1 && poly[0].is_one();
    if is_plain {
        return format!("{prefix}w");
    }
    let mut parts = Vec::new();
    for (d, c) in poly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let coeff = if c.is_one() && d > 0 {
            String::new()
        } else {
            format!("({})", format_rational(c))
        };
        let var = match d {
            0 => String::new(),
            1 => "(tL)".to_string(),
            _ => format!("(tL)^{d}"),
        };
        parts.push(format!("{coeff}{var}"));
    }
    format!("{prefix}[{}]w", parts.join(" + "))
}
