//! Series expansion of the continuous energy law of `du/dt = Lu`: the
//! exact coefficients `d_hat` and `mu_hat`, the Hilbert-matrix
//! decomposition behind them, and a truncated-series evaluator for
//! numerical validation against the matrix exponential.

use crate::exactnum::{factorial, Rational, RationalMatrix};
use crate::simulator::SeminegativeSystem;
use nalgebra::DVector;
use num_traits::{ToPrimitive, Zero};

/// `d_hat_k = (k!)^2 / ((2k)! (2k+1)!)`, the positive diagonal of the
/// decomposition; also the leading diagonal entries of the diagonal Pade
/// energy laws.
pub fn d_hat(k: usize) -> Rational {
    let f = factorial(k);
    &f * &f / (factorial(2 * k) * factorial(2 * k + 1))
}

/// `mu_hat_{k,j} = (2k+1)! j! / (k! (j-k)! (k+j+1)!)` for `j >= k`, zero
/// below the diagonal.
pub fn mu_hat(k: usize, j: usize) -> Rational {
    if j < k {
        return Rational::zero();
    }
    factorial(2 * k + 1) * factorial(j) / (factorial(k) * factorial(j - k) * factorial(k + j + 1))
}

/// The `(N+1) x (N+1)` matrix with entries `-1 / (i! j! (i+j+1))`, i.e.
/// the negated scaled Hilbert matrix of the continuous energy expansion.
pub fn hilbert_upsilon(n: usize) -> RationalMatrix {
    RationalMatrix::from_fn(n + 1, n + 1, |i, j| {
        -(factorial(i) * factorial(j) * Rational::from_integer(((i + j + 1) as i64).into()))
            .recip()
    })
}

/// Residual of the closed-form decomposition: `Upsilon_hat + U^T D U` with
/// `U = (mu_hat)` and `D = diag(d_hat)`; exact zero certifies the
/// factorization.
pub fn verify_hilbert_cholesky(n: usize) -> RationalMatrix {
    let dim = n + 1;
    let u = RationalMatrix::from_fn(dim, dim, |i, j| mu_hat(i, j));
    let mut residual = hilbert_upsilon(n);
    for i in 0..dim {
        for j in 0..dim {
            let entry: Rational = (0..dim).map(|k| d_hat(k) * u.get(k, i) * u.get(k, j)).sum();
            *residual.get_mut(i, j) += entry;
        }
    }
    residual
}

/// Truncation of the continuous energy-law series at order `N`:
/// `-sum_{k=0}^{N} d_hat_k tau^{2k+1} [L^k u_N^(k)]^2` with
/// `u_N^(k) = sum_{j=k}^{N} mu_hat_{k,j} (tau L)^{j-k} u`. Approximates
/// `|e^{tau L} u|^2 - |u|^2`.
pub fn truncated_energy_series(
    sys: &SeminegativeSystem,
    u: &DVector<f64>,
    tau: f64,
    n: usize,
) -> f64 {
    series_value(sys, u, tau, n, Some(n))
}

/// Variant of [`truncated_energy_series`] that truncates only the outer
/// `k` sum: the inner polynomial `u^(k)` is summed to numerical
/// convergence instead of being cut at `j = N`. The defect against the
/// matrix-exponential energy change then decays at the full order
/// `2N + 3` of the dropped outer terms.
pub fn energy_series_partial_sum(
    sys: &SeminegativeSystem,
    u: &DVector<f64>,
    tau: f64,
    n: usize,
) -> f64 {
    series_value(sys, u, tau, n, None)
}

fn series_value(
    sys: &SeminegativeSystem,
    u: &DVector<f64>,
    tau: f64,
    n: usize,
    inner_cap: Option<usize>,
) -> f64 {
    let l = &sys.l;
    let mut total = 0.0;
    for k in 0..=n {
        // u^(k) = sum_j mu_hat_{k,j} (tau L)^{j-k} u, then k extra powers
        // of L for the |L^k u^(k)| argument.
        let mut power = u.clone();
        let mut acc = DVector::zeros(u.len());
        let max_j = inner_cap.unwrap_or(usize::MAX);
        let mut j = k;
        loop {
            let coeff = mu_hat(k, j).to_f64().expect("small rational");
            acc += coeff * &power;
            if j >= max_j {
                break;
            }
            power = tau * (l * &power);
            // Open-ended inner sum: stop once the update is negligible.
            if inner_cap.is_none()
                && (coeff * power.norm() < 1e-18 * acc.norm() || j > k + 200)
            {
                break;
            }
            j += 1;
        }
        let mut arg = acc;
        for _ in 0..k {
            arg = l * arg;
        }
        let seminorm = -2.0 * arg.dot(&(l * &arg));
        let d_k = d_hat(k).to_f64().expect("small rational");
        total += d_k * tau.powi(2 * k as i32 + 1) * seminorm;
    }
    -total
}
