//! Closed-form quantities of the diagonal Pade energy law and exact
//! verifiers for every identity the unified decomposition rests on:
//! the explicit Cholesky-type factorization, its combinatorial lemma, the
//! extended-parameter machinery (theta, gamma, nu, varphi/phi/Phi), and
//! the Pochhammer identities used to manipulate them.
//!
//! The quantity `nu_{i,j}` carries a factor `sqrt(2i-1)`; everything here
//! works with its rational cofactor instead, pairing matched indices so
//! that products stay rational and no square root is ever materialized.

use crate::continuum::mu_hat;
use crate::exactnum::{binomial, factorial, rat, ratio, rising_factorial, Rational, RationalMatrix};
use num_traits::{One, Zero};

pub use crate::continuum::d_hat;

#[derive(Debug, thiserror::Error)]
pub enum PadeError {
    #[error("parameter {0} has 2x integral; the extended identities require 2x not in Z")]
    HalfIntegerParameter(String),
}

fn check_parameter(x: &Rational) -> Result<(), PadeError> {
    if (x * rat(2)).is_integer() {
        Err(PadeError::HalfIntegerParameter(x.to_string()))
    } else {
        Ok(())
    }
}

/// `theta_i = s!/(2s)! * (2s-i)!/(i!(s-i)!)` — the coefficients of the
/// (s,s) diagonal Pade numerator (the denominator has `(-1)^i theta_i`).
pub fn pade_theta(s: usize, i: usize) -> Rational {
    assert!(i <= s, "index out of range");
    factorial(s) * factorial(2 * s - i) / (factorial(2 * s) * factorial(i) * factorial(s - i))
}

/// Entry `mu_{i,j}` of the unit upper triangular factor of the diagonal
/// Pade decomposition; nonzero only for `i <= j` with `i = j (mod 2)`.
pub fn pade_mu(s: usize, i: usize, j: usize) -> Rational {
    assert!(i < s && j < s, "index out of range");
    if i > j || (j - i) % 2 != 0 {
        return Rational::zero();
    }
    let half_sum = (i + j) / 2;
    let half_diff = (j - i) / 2;
    factorial(s) * factorial(2 * i + 1) * factorial(2 * s + i - j)
        * factorial(s - 1 - half_sum)
        * factorial(half_sum)
        / (factorial(2 * s)
            * factorial(i)
            * factorial(i + j + 1)
            * factorial(s - 1 - j)
            * factorial(s - half_diff)
            * factorial(half_diff))
}

/// Entry `gamma_{i,j}` of the diagonal Pade coefficient matrix, evaluated
/// from the direct factorial summation (independent of the generic
/// alpha/beta/gamma route).
pub fn pade_gamma_direct(s: usize, i: usize, j: usize) -> Rational {
    assert!(i < s && j < s, "index out of range");
    if (i + j) % 2 != 0 {
        return Rational::zero();
    }
    let sign = if i % 2 == 0 { rat(2) } else { rat(-2) };
    let scale = factorial(s) / factorial(2 * s);
    let scale2 = &scale * &scale;
    let lo = (i + j + 1).saturating_sub(s);
    let hi = i.min(j);
    let total: Rational = (lo..=hi)
        .map(|l| {
            let term = factorial(2 * s - l) * factorial(2 * s - i - j - 1 + l)
                / (factorial(l)
                    * factorial(s - l)
                    * factorial(i + j + 1 - l)
                    * factorial(s + l - i - j - 1));
            if l % 2 == 0 {
                -term
            } else {
                term
            }
        })
        .sum();
    sign * scale2 * total
}

/// Residual `Upsilon + U^T diag(d_hat) U` with every factor taken from the
/// closed forms; the exact zero matrix certifies the decomposition.
pub fn verify_pade_cholesky(s: usize) -> RationalMatrix {
    let u = RationalMatrix::from_fn(s, s, |i, j| pade_mu(s, i, j));
    RationalMatrix::from_fn(s, s, |i, j| {
        let recon: Rational = (0..s).map(|k| d_hat(k) * u.get(k, i) * u.get(k, j)).sum();
        pade_gamma_direct(s, i, j) + recon
    })
}

/// Closed form of the alternating binomial sum:
/// `(s-1-(i+j)/2)! ((i+j)/2)! / ((s-(j-i)/2)! ((j-i)/2)!) * (s-j)` for
/// matching parity, zero otherwise.
fn binomial_sum_closed_form(s: usize, i: usize, j: usize) -> Rational {
    if i > j || (j - i) % 2 != 0 {
        return Rational::zero();
    }
    let half_sum = (i + j) / 2;
    let half_diff = (j - i) / 2;
    factorial(s - 1 - half_sum) * factorial(half_sum)
        * Rational::from_integer(((s - j) as i64).into())
        / (factorial(s - half_diff) * factorial(half_diff))
}

/// Checks the combinatorial identity behind the `mu` closed form:
/// `sum_l binom(s-l, j-l)^{-1} binom(2s-l, j-i-l) binom(i+j+1, l) (-1)^l`
/// equals [`binomial_sum_closed_form`] for all `0 <= i <= j <= s-1`.
pub fn verify_lemma_5_2(s: usize) -> bool {
    for j in 0..s {
        for i in 0..=j {
            let brute: Rational = (0..=(j - i))
                .map(|l| {
                    let term = binomial(2 * s - l, (j - i - l) as i64)
                        * binomial(i + j + 1, l as i64)
                        / binomial(s - l, (j - l) as i64);
                    if l % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .sum();
            if brute != binomial_sum_closed_form(s, i, j) {
                return false;
            }
        }
    }
    true
}

/// The extension of `theta_i` to a real parameter:
/// `theta_i^(x) = (1/i!) prod_{k<i} (x-k) / prod_{k<i} (2x-k)`. At
/// positive integers `x = s` this reproduces [`pade_theta`] for `i <= s`
/// and vanishes for `s < i < 2s`.
pub fn theta_extended(x: &Rational, i: usize) -> Rational {
    if i == 0 {
        return Rational::one();
    }
    let mut num = Rational::one();
    let mut den = Rational::one();
    for k in 0..i {
        let kr = rat(k as i64);
        num *= x - &kr;
        den *= x * rat(2) - kr;
    }
    num / (den * factorial(i))
}

/// The extension of the gamma entries:
/// `gamma_{p,q}^(x) = [(-1)^p + (-1)^q] sum_i (-1)^{i+1}
///  theta_i^(x) theta_{p+q+1-i}^(x)`.
pub fn gamma_extended(x: &Rational, p: usize, q: usize) -> Result<Rational, PadeError> {
    check_parameter(x)?;
    if (p + q) % 2 != 0 {
        return Ok(Rational::zero());
    }
    let sign = if p % 2 == 0 { rat(2) } else { rat(-2) };
    let total: Rational = (0..=p.min(q))
        .map(|i| {
            let term = theta_extended(x, i) * theta_extended(x, p + q + 1 - i);
            if i % 2 == 0 {
                -term
            } else {
                term
            }
        })
        .sum();
    Ok(sign * total)
}

/// Rational cofactor of `nu_{i,j}^(x) = sqrt(2i-1) * nu_cofactor(x,i,j)`,
/// written with rising factorials so it stays rational for every
/// admissible `x`; zero for `i > j` or mismatched parity.
pub fn nu_cofactor(x: &Rational, i: usize, j: usize) -> Result<Rational, PadeError> {
    check_parameter(x)?;
    if i > j || i == 0 || (j - i) % 2 != 0 {
        return Ok(Rational::zero());
    }
    Ok(if i % 2 == 0 {
        let (a, b) = (i / 2, j / 2);
        rat(2) * theta_extended(x, 2 * b)
            * rising_factorial(&(x * rat(2) - rat(2 * b as i64 - 1)), 2 * a)
            * rising_factorial(&rat(b as i64 - a as i64 + 1), 2 * a)
            / (rising_factorial(&(x - rat((b + a) as i64 - 1)), 2 * a)
                * rising_factorial(&rat(2 * b as i64 + 1), 2 * a))
    } else {
        let (a, b) = ((i + 1) / 2, (j + 1) / 2);
        rat(2) * theta_extended(x, 2 * b - 1)
            * rising_factorial(&(x * rat(2) - rat(2 * b as i64 - 2)), 2 * a - 1)
            * rising_factorial(&rat(b as i64 - a as i64 + 1), 2 * a - 1)
            / (rising_factorial(&(x - rat((b + a) as i64 - 2)), 2 * a - 1)
                * rising_factorial(&rat(2 * b as i64), 2 * a - 1))
    })
}

/// The same cofactor via the hypergeometric-style closed forms
/// (`nu_{2i,2j}` and `nu_{2i-1,2j-1}` expressed through `theta^(x)` and
/// four Pochhammer symbols) — an independent route used to cross-check
/// [`nu_cofactor`].
fn nu_cofactor_pochhammer(x: &Rational, i: usize, j: usize) -> Result<Rational, PadeError> {
    check_parameter(x)?;
    if i > j || i == 0 || (j - i) % 2 != 0 {
        return Ok(Rational::zero());
    }
    let half = ratio(1, 2);
    Ok(if i % 2 == 0 {
        let (a, b) = (i / 2, j / 2);
        let bj = rat(b as i64);
        rat(2) * rising_factorial(&(x + &half - &bj), a) * rising_factorial(&-&bj, a)
            / (rising_factorial(&(&bj - x), a) * rising_factorial(&(&half + &bj), a))
            * theta_extended(x, 2 * b)
    } else {
        let (a, b) = ((i + 1) / 2, (j + 1) / 2);
        let bj = rat(b as i64);
        rat(2) * rising_factorial(&(x + ratio(3, 2) - &bj), a - 1)
            * rising_factorial(&(rat(1) - &bj), a - 1)
            / (rising_factorial(&(&bj - x), a - 1) * rising_factorial(&(&half + &bj), a - 1))
            * theta_extended(x, 2 * b - 1)
    })
}

/// The base rational function `varphi_n(x; p, q)` of the telescoping
/// argument: a quotient of eight rising factorials.
pub fn varphi_n(x: &Rational, n: usize, p: usize, q: usize) -> Result<Rational, PadeError> {
    check_parameter(x)?;
    let (pr, qr) = (rat(p as i64), rat(q as i64));
    let num = rising_factorial(&(x + ratio(3, 2) - &pr), n)
        * rising_factorial(&(rat(1) - &pr), n)
        * rising_factorial(&(x + ratio(1, 2) - &qr), n)
        * rising_factorial(&-&qr, n);
    let den = rising_factorial(&(&pr - x + rat(1)), n)
        * rising_factorial(&(&pr + ratio(3, 2)), n)
        * rising_factorial(&(&qr - x + rat(1)), n)
        * rising_factorial(&(&qr + ratio(3, 2)), n);
    Ok(num / den)
}

fn common_denominator(x: &Rational, p: usize, q: usize) -> Rational {
    let (pr, qr) = (rat(p as i64), rat(q as i64));
    (x - &pr) * rat(2 * p as i64 + 1) * (x - &qr) * rat(2 * q as i64 + 1)
}

/// `phi_n = varphi_n * (C1 + C2) / ((x-p)(1+2p)(x-q)(1+2q))` with the two
/// quartic numerator factors C1, C2 of the telescoping identity.
pub fn phi_n(x: &Rational, n: usize, p: usize, q: usize) -> Result<Rational, PadeError> {
    let (ni, pi, qi) = (n as i64, p as i64, q as i64);
    let c1 = rat(4 * ni + 3) * (rat(1) + x - rat(2 * pi)) * rat(qi - ni)
        * (rat(1 + 2 * ni - 2 * qi) + x * rat(2));
    let c2 = rat(4 * ni + 1) * (x - rat(2 * qi)) * rat(1 + 2 * pi + 2 * ni) * (x - rat(pi + ni));
    Ok(varphi_n(x, n, p, q)? * (c1 + c2) / common_denominator(x, p, q))
}

/// `Phi_n = varphi_n * C3 / ((x-p)(1+2p)(x-q)(1+2q))` — the telescoping
/// antidifference of `phi_n`.
pub fn big_phi_n(x: &Rational, n: usize, p: usize, q: usize) -> Result<Rational, PadeError> {
    let (ni, pi, qi) = (n as i64, p as i64, q as i64);
    let c3 = (rat(ni + pi) - x) * rat(1 + 2 * pi + 2 * ni) * (rat(ni + qi) - x)
        * rat(1 + 2 * qi + 2 * ni);
    Ok(varphi_n(x, n, p, q)? * c3 / common_denominator(x, p, q))
}

/// Checks `F_{p,q}(x) = gamma_{p-1,q-1}^(x) + sum_i nu_{i,p} nu_{i,q} = 0`
/// exactly for all `1 <= p, q <= p_max` (products of `nu` are formed by
/// pairing the matched radical: `(2i-1) c_{i,p} c_{i,q}`).
pub fn verify_prop_5_5(x: &Rational, p_max: usize) -> Result<bool, PadeError> {
    for p in 1..=p_max {
        for q in 1..=p_max {
            let mut f = gamma_extended(x, p - 1, q - 1)?;
            for i in 1..=p.min(q) {
                f += rat(2 * i as i64 - 1) * nu_cofactor(x, i, p)? * nu_cofactor(x, i, q)?;
            }
            if !f.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks that the two independent closed forms for the `nu` cofactors
/// (rising-factorial rewrite vs. the `theta^(x)`-based hypergeometric
/// forms) agree exactly over `1 <= i <= i_max`, `1 <= j <= j_max`.
pub fn verify_lemma_5_6(x: &Rational, i_max: usize, j_max: usize) -> Result<bool, PadeError> {
    for i in 1..=i_max {
        for j in 1..=j_max {
            if nu_cofactor(x, i, j)? != nu_cofactor_pochhammer(x, i, j)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks the two finite-sum identities: `sum_{n<p} phi_n(x;p,q) = 1` for
/// all `p <= p_max`, `q <= q_max`, and the cross pairing
/// `sum_i nu_{i,p} nu_{i,q+1} + sum_i nu_{i,p+1} nu_{i,q}
///  = 2 theta_p^(x) theta_q^(x)` for `p = q+1 (mod 2)`.
pub fn verify_lemma_5_8_5_9(x: &Rational, p_max: usize, q_max: usize) -> Result<bool, PadeError> {
    for p in 1..=p_max {
        for q in 1..=q_max {
            let total: Rational = (0..p)
                .map(|n| phi_n(x, n, p, q))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .sum();
            if !total.is_one() {
                return Ok(false);
            }
            if (p + q) % 2 == 1 {
                let mut lhs = Rational::zero();
                for i in 1..=p.min(q + 1) {
                    lhs += rat(2 * i as i64 - 1) * nu_cofactor(x, i, p)? * nu_cofactor(x, i, q + 1)?;
                }
                for i in 1..=(p + 1).min(q) {
                    lhs += rat(2 * i as i64 - 1) * nu_cofactor(x, i, p + 1)? * nu_cofactor(x, i, q)?;
                }
                if lhs != rat(2) * theta_extended(x, p) * theta_extended(x, q) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Checks the three factorial/Pochhammer identities: the shift rule
/// `(x+n)! = x! (x+1)_n`, the duplication rule
/// `(x)_n = 2^n (x/2)_ceil ( (x+1)/2 )_floor`, and the reflection rule
/// `(x+i)!/(x-j)! = (-1)^j (-x)_j (x+1)_i`. The factorial-based rules are
/// tested at integer `x` (where factorials are defined exactly), the
/// duplication rule at every sample.
pub fn verify_pochhammer_identities(x_samples: &[Rational], n_max: usize) -> bool {
    // ID-2 at rational samples.
    for x in x_samples {
        let half_x = x / rat(2);
        let half_x1 = (x + rat(1)) / rat(2);
        for n in 0..=n_max {
            let lhs = rising_factorial(x, n);
            let rhs = rat(1 << n)
                * rising_factorial(&half_x, n.div_ceil(2))
                * rising_factorial(&half_x1, n / 2);
            if lhs != rhs {
                return false;
            }
        }
    }
    // ID-1 and ID-3 at integer x large enough that every factorial has a
    // nonnegative argument.
    let x0 = (n_max as i64).max(12);
    for xi in x0..=(x0 + 3) {
        let x = rat(xi);
        let fact = |m: i64| -> Rational {
            assert!(m >= 0);
            factorial(m as usize)
        };
        for n in 0..=n_max {
            if fact(xi + n as i64) != fact(xi) * rising_factorial(&(&x + rat(1)), n) {
                return false;
            }
        }
        for i in 0..=n_max {
            for j in 0..=n_max {
                let lhs = fact(xi + i as i64) / fact(xi - j as i64);
                let rhs = rising_factorial(&-&x, j) * rising_factorial(&(&x + rat(1)), i);
                let rhs = if j % 2 == 0 { rhs } else { -rhs };
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Checks that folding the continuous coefficients through the Pade
/// denominator reproduces the discrete ones:
/// `sum_{l=k}^{j} mu_hat_{k,l} vartheta_{j-l} = mu_{k,j}` for all
/// `k <= j <= s-1` (with `vartheta_i = (-1)^i theta_i`).
pub fn verify_theorem_5_3(s: usize) -> bool {
    for j in 0..s {
        for k in 0..=j {
            let folded: Rational = (k..=j)
                .map(|l| {
                    let v = mu_hat(k, l) * pade_theta(s, j - l);
                    if (j - l) % 2 == 0 {
                        v
                    } else {
                        -v
                    }
                })
                .sum();
            if folded != pade_mu(s, k, j) {
                return false;
            }
        }
    }
    true
}
