//! Double-precision time stepping `u^{n+1} = Q(tau L)^{-1} P(tau L) u^n`
//! on concrete seminegative systems, energy traces comparing measured and
//! theoretical dissipation, the matrix exponential reference, and the
//! convergence-study harness.

use crate::energy::EnergyDecomposition;
use crate::methods::{make_pade, StabilityFunction};
use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use rand::Rng;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("matrix {name:?} is not seminegative: margin {margin:.3e} exceeds tolerance {tol:.3e}")]
    NotSeminegative { name: String, margin: f64, tol: f64 },
    #[error("unknown example system {0:?}; valid names: example1, dg-advection, ldg-dispersion, skew2")]
    UnknownSystem(String),
    #[error("time step failed: Q(tau L) is numerically singular at tau*|L| = {tau_norm:.3e}")]
    SingularStep { tau_norm: f64 },
    #[error("dimension mismatch: system is {expected}-dimensional, vector has length {got}")]
    Dimension { expected: usize, got: usize },
    #[error("semi-norm of magnitude {value:.3e} is below the clamp threshold {threshold:.3e}")]
    NegativeSeminorm { value: f64, threshold: f64 },
}

/// A dense real matrix L with verified seminegativity (`v^T L v <= 0`),
/// plus the cached operator-norm estimate used for tolerances.
#[derive(Clone, Debug)]
pub struct SeminegativeSystem {
    pub l: DMatrix<f64>,
    pub dim: usize,
    pub name: String,
    /// Largest eigenvalue of `L + L^T`; at most `1e-12 * |L|`.
    pub seminegativity_margin: f64,
    /// Operator norm `|L|` estimated by power iteration on `L^T L`.
    pub op_norm: f64,
}

impl SeminegativeSystem {
    /// Wraps a matrix after checking `v^T L v <= 0` via the largest
    /// eigenvalue of the symmetric part.
    pub fn new(name: impl Into<String>, l: DMatrix<f64>) -> Result<Self, SimError> {
        let name = name.into();
        let dim = l.nrows();
        assert_eq!(dim, l.ncols(), "L must be square");
        let op_norm = operator_norm(&l);
        let sym = &l + l.transpose();
        let margin = nalgebra::SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-12 * op_norm.max(1.0);
        if margin > tol {
            return Err(SimError::NotSeminegative { name, margin, tol });
        }
        Ok(Self {
            l,
            dim,
            name,
            seminegativity_margin: margin,
            op_norm,
        })
    }

    /// `|v|^2 = -2 v^T L v`; tiny negative values from roundoff are
    /// clamped to zero, anything clearly negative is rejected.
    pub fn semi_norm_sq(&self, v: &DVector<f64>) -> Result<f64, SimError> {
        if v.len() != self.dim {
            return Err(SimError::Dimension {
                expected: self.dim,
                got: v.len(),
            });
        }
        let value = raw_semi_norm_sq(&self.l, v);
        if value >= 0.0 {
            return Ok(value);
        }
        let threshold = -1e-12 * self.op_norm.max(1.0) * v.norm_squared();
        if value >= threshold {
            Ok(0.0)
        } else {
            Err(SimError::NegativeSeminorm { value, threshold })
        }
    }
}

/// `-2 v^T L v` without the seminegativity clamp (used inside identities
/// where the sign is part of what is being measured).
fn raw_semi_norm_sq(l: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    -2.0 * v.dot(&(l * v))
}

/// `|L|` estimated by 100 power-iteration steps on `L^T L`.
fn operator_norm(l: &DMatrix<f64>) -> f64 {
    let n = l.nrows();
    if n == 0 {
        return 0.0;
    }
    let lt = l.transpose();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    // Deterministic perturbation so that v is not orthogonal to the
    // dominant eigenvector for structured matrices.
    for i in 0..n {
        v[i] += 1e-3 * ((i + 1) as f64).sin();
    }
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..100 {
        let w = &lt * (l * &v);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        v = w / norm;
    }
    lambda.sqrt()
}

/// Evaluates the polynomial with the given rational coefficients at
/// `tau L` (Horner in the matrix argument).
fn matrix_polynomial(coeffs: &[crate::Rational], l: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let n = l.nrows();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for c in coeffs.iter().rev() {
        acc = tau * (l * acc);
        let cf = c.to_f64().expect("coefficient fits in f64");
        for i in 0..n {
            acc[(i, i)] += cf;
        }
    }
    acc
}

/// One step of the method: solves `Q(tau L) u' = P(tau L) u` by dense LU
/// with partial pivoting.
pub fn step(
    sf: &StabilityFunction,
    sys: &SeminegativeSystem,
    tau: f64,
    u: &DVector<f64>,
) -> Result<DVector<f64>, SimError> {
    if u.len() != sys.dim {
        return Err(SimError::Dimension {
            expected: sys.dim,
            got: u.len(),
        });
    }
    let p = matrix_polynomial(&sf.theta, &sys.l, tau);
    let q = matrix_polynomial(&sf.vartheta, &sys.l, tau);
    let rhs = &p * u;
    let lu = q.lu();
    if !lu.is_invertible() {
        return Err(SimError::SingularStep {
            tau_norm: tau * sys.op_norm,
        });
    }
    lu.solve(&rhs).ok_or(SimError::SingularStep {
        tau_norm: tau * sys.op_norm,
    })
}

/// Solves `Q(tau L) w = u` for the intermediate vector `w` of the energy
/// identity.
fn solve_w(
    sf: &StabilityFunction,
    sys: &SeminegativeSystem,
    tau: f64,
    u: &DVector<f64>,
) -> Result<DVector<f64>, SimError> {
    let q = matrix_polynomial(&sf.vartheta, &sys.l, tau);
    let lu = q.lu();
    if !lu.is_invertible() {
        return Err(SimError::SingularStep {
            tau_norm: tau * sys.op_norm,
        });
    }
    lu.solve(u).ok_or(SimError::SingularStep {
        tau_norm: tau * sys.op_norm,
    })
}

/// The exact per-step energy drop `E_n - E_{n+1}` predicted by the energy
/// identity: with `w = Q(tau L)^{-1} u` and
/// `u^(k) = sum_j mu~_{k,j} (tau L)^{j-k} w`, returns
/// `-(sum beta_k tau^{2k} |L^k w|^2 - sum d~_k tau^{2k+1} [L^k u^(k)]^2
///   + sum delta_k tau^{2k+1} [L^k w]^2)`.
pub fn theoretical_drop(
    sf: &StabilityFunction,
    dec: &EnergyDecomposition,
    sys: &SeminegativeSystem,
    tau: f64,
    u: &DVector<f64>,
) -> Result<f64, SimError> {
    let s = dec.d_tilde.len();
    let l = &sys.l;
    let w = solve_w(sf, sys, tau, u)?;

    // Powers (tau L)^m w for m = 0..s.
    let mut tl_pows = Vec::with_capacity(s + 1);
    tl_pows.push(w.clone());
    for m in 1..=s {
        let next = tau * (l * &tl_pows[m - 1]);
        tl_pows.push(next);
    }

    let mut change = 0.0;
    for (k, b) in dec.beta.iter().enumerate() {
        if num_traits::Zero::is_zero(b) {
            continue;
        }
        // tau^{2k} |L^k w|^2 = |(tau L)^k w|^2 since tau > 0 enters evenly.
        let bk = b.to_f64().expect("coefficient fits in f64");
        change += bk * tl_pows[k].norm_squared();
    }
    for k in 0..s {
        let dk = dec.d_tilde[k].to_f64().expect("coefficient fits in f64");
        let deltak = dec.delta[k].to_f64().expect("coefficient fits in f64");
        if dk != 0.0 {
            let mut uk = DVector::zeros(sys.dim);
            for j in k..s {
                let m = dec.u_tilde.get(k, j).to_f64().expect("coefficient fits in f64");
                if m != 0.0 {
                    uk += m * &tl_pows[j - k];
                }
            }
            let mut arg = uk;
            for _ in 0..k {
                arg = l * arg;
            }
            change -= dk * tau.powi(2 * k as i32 + 1) * raw_semi_norm_sq(l, &arg);
        }
        if deltak != 0.0 {
            let mut arg = w.clone();
            for _ in 0..k {
                arg = l * arg;
            }
            change += deltak * tau.powi(2 * k as i32 + 1) * raw_semi_norm_sq(l, &arg);
        }
    }
    Ok(-change)
}

/// One record per time step: index, time, energy before the step, and the
/// measured and theoretical energy drops across it.
#[derive(Clone, Debug)]
pub struct TraceRecord {
    pub n: usize,
    pub t: f64,
    pub energy: f64,
    pub measured_drop: f64,
    pub theoretical_drop: f64,
}

/// The full per-step energy history of a simulation.
#[derive(Clone, Debug)]
pub struct EnergyTrace {
    pub records: Vec<TraceRecord>,
    /// Final state after the last step.
    pub u_final: DVector<f64>,
}

impl EnergyTrace {
    /// Largest `|measured - theoretical| / max(E_n, E_{n+1})` over the run.
    pub fn max_relative_gap(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in &self.records {
            let e_next = r.energy - r.measured_drop;
            let scale = r.energy.max(e_next).max(f64::MIN_POSITIVE);
            worst = worst.max((r.measured_drop - r.theoretical_drop).abs() / scale);
        }
        worst
    }
}

/// Runs `n_steps` steps recording measured and theoretical drops.
pub fn energy_trace(
    sf: &StabilityFunction,
    sys: &SeminegativeSystem,
    tau: f64,
    n_steps: usize,
    u0: &DVector<f64>,
) -> Result<EnergyTrace, SimError> {
    let ec = crate::energy::beta_gamma(sf);
    let dec = crate::energy::decompose(&ec);
    let mut u = u0.clone();
    let mut records = Vec::with_capacity(n_steps);
    for n in 0..n_steps {
        let e_n = u.norm_squared();
        let theo = theoretical_drop(sf, &dec, sys, tau, &u)?;
        let u_next = step(sf, sys, tau, &u)?;
        let measured = e_n - u_next.norm_squared();
        records.push(TraceRecord {
            n,
            t: n as f64 * tau,
            energy: e_n,
            measured_drop: measured,
            theoretical_drop: theo,
        });
        u = u_next;
    }
    Ok(EnergyTrace { records, u_final: u })
}

/// `e^{tL}` by scaling and squaring with the (13,13) Pade approximation;
/// the scaling count m is chosen so that `|tL / 2^m|_1 <= 0.5`.
pub fn matrix_exponential(l: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let n = l.nrows();
    let a = t * l;
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut m = 0u32;
    while norm1 / 2f64.powi(m as i32) > 0.5 {
        m += 1;
    }
    let scaled = &a / 2f64.powi(m as i32);
    let sf = make_pade(13, 13);
    let p = matrix_polynomial(&sf.theta, &scaled, 1.0);
    let q = matrix_polynomial(&sf.vartheta, &scaled, 1.0);
    let mut r = q.lu().solve(&p).expect("Pade denominator is nonsingular");
    for _ in 0..m {
        r = &r * &r;
    }
    r
}

/// The periodic lower-bidiagonal matrix with the given diagonal value,
/// unit subdiagonal, and wrap-around corner entry.
fn periodic_bidiagonal(n: usize, diag: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m[(0, n - 1)] = 1.0;
    m
}

/// Builds one of the bundled test systems. `n_d` is the cell count of the
/// two method-of-lines systems (default 20, mesh size `1/n_d`):
/// - `example1`: the fixed 3x3 upper-triangular system;
/// - `dg-advection`: piecewise-linear DG discretization of `psi_t + psi_x = 0`
///   (dimension `2 n_d`);
/// - `ldg-dispersion`: piecewise-constant local DG discretization of
///   `psi_t + psi_xxx = 0` (dimension `n_d`);
/// - `skew2`: the 2x2 rotation generator, an energy-preserving witness.
pub fn example_system(name: &str, n_d: Option<usize>) -> Result<SeminegativeSystem, SimError> {
    let n_d = n_d.unwrap_or(20);
    match name {
        "example1" => {
            let l = -DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 2.0, 0.0, 1.0, 2.0, 0.0, 0.0, 1.0]);
            SeminegativeSystem::new("example1", l)
        }
        "dg-advection" => {
            let dx = 1.0 / n_d as f64;
            let l1 = periodic_bidiagonal(n_d, -1.0);
            let l2 = periodic_bidiagonal(n_d, 1.0);
            let s3 = 3f64.sqrt();
            let mut l = DMatrix::zeros(2 * n_d, 2 * n_d);
            for i in 0..n_d {
                for j in 0..n_d {
                    l[(i, j)] = l1[(i, j)];
                    l[(i, n_d + j)] = s3 * l1[(i, j)];
                    let eye = if i == j { 1.0 } else { 0.0 };
                    l[(n_d + i, j)] = s3 * (2.0 * eye - l2[(i, j)]);
                    l[(n_d + i, n_d + j)] = -3.0 * l2[(i, j)];
                }
            }
            SeminegativeSystem::new("dg-advection", l / dx)
        }
        "ldg-dispersion" => {
            let dx = 1.0 / n_d as f64;
            let l1 = periodic_bidiagonal(n_d, -1.0);
            let l1t = l1.transpose();
            let l = (&l1 * &l1t * &l1t) / dx.powi(3);
            SeminegativeSystem::new("ldg-dispersion", l)
        }
        "skew2" => {
            let l = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
            SeminegativeSystem::new("skew2", l)
        }
        other => Err(SimError::UnknownSystem(other.to_string())),
    }
}

/// Initial vector for the bundled systems: the fixed 3-vector for
/// `example1`; cell averages of `sin(2 pi x)` (first block, second block
/// zero) for `dg-advection`; cell averages of `cos(2 pi x)` for
/// `ldg-dispersion`; `(1, 0)` for `skew2`.
pub fn example_initial(name: &str, n_d: Option<usize>) -> Result<DVector<f64>, SimError> {
    use std::f64::consts::TAU;
    let n_d = n_d.unwrap_or(20);
    let dx = 1.0 / n_d as f64;
    match name {
        "example1" => Ok(DVector::from_vec(vec![0.9134, 0.2785, 0.5469])),
        "dg-advection" => {
            let mut u = DVector::zeros(2 * n_d);
            for i in 0..n_d {
                let x0 = i as f64 * dx;
                let x1 = (i + 1) as f64 * dx;
                u[i] = ((TAU * x0).cos() - (TAU * x1).cos()) / (TAU * dx);
            }
            Ok(u)
        }
        "ldg-dispersion" => {
            let mut u = DVector::zeros(n_d);
            for i in 0..n_d {
                let x0 = i as f64 * dx;
                let x1 = (i + 1) as f64 * dx;
                u[i] = ((TAU * x1).sin() - (TAU * x0).sin()) / (TAU * dx);
            }
            Ok(u)
        }
        "skew2" => Ok(DVector::from_vec(vec![1.0, 0.0])),
        other => Err(SimError::UnknownSystem(other.to_string())),
    }
}

/// A random seminegative matrix `K - A^T A` with `K` skew-symmetric;
/// entries of `K` and `A` are uniform in [-1, 1].
pub fn random_seminegative<R: Rng>(dim: usize, rng: &mut R) -> SeminegativeSystem {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    let mut k = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v: f64 = rng.gen_range(-1.0..1.0);
            k[(i, j)] = v;
            k[(j, i)] = -v;
        }
    }
    let l = k - a.transpose() * &a;
    SeminegativeSystem::new("random", l).expect("construction is seminegative by design")
}

/// One row of a convergence table.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub l2_error: f64,
    pub order: Option<f64>,
    pub delta_e: f64,
    pub de_order: Option<f64>,
}

/// Runs the method to time `T` for each step size, comparing against the
/// matrix-exponential reference; orders are successive log ratios.
pub fn convergence_study(
    sf: &StabilityFunction,
    sys: &SeminegativeSystem,
    u0: &DVector<f64>,
    t_end: f64,
    taus: &[f64],
) -> Result<Vec<ConvergenceRow>, SimError> {
    let exact = matrix_exponential(&sys.l, t_end) * u0;
    let exact_de = exact.norm_squared() - u0.norm_squared();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(taus.len());
    for &tau in taus {
        let n_steps = (t_end / tau).round() as usize;
        let mut u = u0.clone();
        for _ in 0..n_steps {
            u = step(sf, sys, tau, &u)?;
        }
        let l2_error = (&u - &exact).norm();
        let num_de = u.norm_squared() - u0.norm_squared();
        let delta_e = (exact_de - num_de).abs();
        let (order, de_order) = match rows.last() {
            Some(prev) if prev.tau != tau => {
                let ratio = (prev.tau / tau).ln();
                (
                    Some((prev.l2_error / l2_error).ln() / ratio),
                    Some((prev.delta_e / delta_e).ln() / ratio),
                )
            }
            _ => (None, None),
        };
        rows.push(ConvergenceRow {
            tau,
            l2_error,
            order,
            delta_e,
            de_order,
        });
    }
    Ok(rows)
}
