//! End-to-end acceptance suite: one test per criterion, each printing a
//! single pass/fail line. Exact checks use big rationals; numerical checks
//! compare against the matrix exponential or the measured energy.

use nalgebra::DVector;
use rand::SeedableRng;
use rkenergy::continuum::{energy_series_partial_sum, verify_hilbert_cholesky};
use rkenergy::energy::{beta_gamma, decompose};
use rkenergy::exactnum::{rat, ratio, Rational, RationalMatrix};
use rkenergy::methods::{builtin, make_pade};
use rkenergy::pade::{
    pade_gamma_direct, verify_lemma_5_2, verify_lemma_5_6, verify_lemma_5_8_5_9,
    verify_pade_cholesky, verify_pochhammer_identities, verify_prop_5_5, verify_theorem_5_3,
};
use rkenergy::simulator::{
    energy_trace, example_initial, example_system, matrix_exponential, random_seminegative,
    step, SeminegativeSystem,
};

fn report(id: u32, label: &str, ok: bool) {
    println!("{} criterion {id}: {label}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {label}");
}

fn sample_parameters() -> Vec<Rational> {
    [(1, 3), (7, 5), (-5, 3), (22, 7), (101, 6)]
        .iter()
        .map(|&(n, d)| ratio(n, d))
        .collect()
}

fn mat(rows: Vec<Vec<Rational>>) -> RationalMatrix {
    RationalMatrix::from_rows(rows).unwrap()
}

#[test]
fn criterion_01_worked_example_golden_data() {
    struct Golden {
        method: &'static str,
        beta: Vec<Rational>,
        gamma: RationalMatrix,
        delta: Vec<Rational>,
        d_tilde: Vec<Rational>,
        u_tilde: RationalMatrix,
    }
    let cases = vec![
        Golden {
            method: "euler-backward",
            beta: vec![rat(0), rat(-1)],
            gamma: mat(vec![vec![rat(-1)]]),
            delta: vec![rat(0)],
            d_tilde: vec![rat(1)],
            u_tilde: RationalMatrix::identity(1),
        },
        Golden {
            method: "crank-nicolson",
            beta: vec![rat(0), rat(0)],
            gamma: mat(vec![vec![rat(-1)]]),
            delta: vec![rat(0)],
            d_tilde: vec![rat(1)],
            u_tilde: RationalMatrix::identity(1),
        },
        Golden {
            method: "qin-zhang",
            beta: vec![rat(0), rat(0), rat(0)],
            gamma: mat(vec![vec![rat(-1), rat(0)], vec![rat(0), ratio(-1, 16)]]),
            delta: vec![rat(0), rat(0)],
            // The diagonal factor of diag{-1, -1/16} under a unit upper
            // triangular factorization is diag{1, 1/16}, matching the
            // t^3 coefficient of the rendered identity.
            d_tilde: vec![rat(1), ratio(1, 16)],
            u_tilde: mat(vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]),
        },
        Golden {
            method: "kraaijevanger-spijker",
            beta: vec![rat(0), rat(-3), ratio(-3, 4)],
            gamma: mat(vec![
                vec![rat(-1), ratio(1, 2)],
                vec![ratio(1, 2), ratio(-7, 4)],
            ]),
            delta: vec![rat(0), rat(0)],
            d_tilde: vec![rat(1), ratio(3, 2)],
            u_tilde: mat(vec![vec![rat(1), ratio(-1, 2)], vec![rat(0), rat(1)]]),
        },
        Golden {
            method: "pade:0,3",
            beta: vec![rat(0), rat(0), ratio(1, 12), ratio(-1, 36)],
            gamma: mat(vec![
                vec![rat(-1), ratio(1, 2), ratio(-1, 6)],
                vec![ratio(1, 2), ratio(-1, 3), ratio(1, 6)],
                vec![ratio(-1, 6), ratio(1, 6), ratio(-1, 12)],
            ]),
            delta: vec![rat(0), rat(0), ratio(1, 36)],
            d_tilde: vec![rat(1), ratio(1, 12), rat(0)],
            u_tilde: mat(vec![
                vec![rat(1), ratio(-1, 2), ratio(1, 6)],
                vec![rat(0), rat(1), rat(-1)],
                vec![rat(0), rat(0), rat(1)],
            ]),
        },
        Golden {
            method: "pade:4,1",
            beta: vec![rat(0), rat(0), rat(0), ratio(-1, 1800), ratio(1, 14400)],
            gamma: mat(vec![
                vec![rat(-1), ratio(-3, 10), ratio(-1, 15), ratio(-1, 120)],
                vec![ratio(-3, 10), ratio(-13, 75), ratio(-9, 200), ratio(-1, 150)],
                vec![ratio(-1, 15), ratio(-9, 200), ratio(-1, 75), ratio(-1, 400)],
                vec![ratio(-1, 120), ratio(-1, 150), ratio(-1, 400), ratio(-1, 1800)],
            ]),
            delta: vec![rat(0), rat(0), rat(0), ratio(1, 14400)],
            d_tilde: vec![rat(1), ratio(1, 12), ratio(1, 720), rat(0)],
            u_tilde: mat(vec![
                vec![rat(1), ratio(3, 10), ratio(1, 15), ratio(1, 120)],
                vec![rat(0), rat(1), ratio(3, 10), ratio(1, 20)],
                vec![rat(0), rat(0), rat(1), ratio(1, 2)],
                vec![rat(0), rat(0), rat(0), rat(1)],
            ]),
        },
    ];
    let mut ok = true;
    for g in &cases {
        let ec = beta_gamma(&builtin(g.method).unwrap());
        let dec = decompose(&ec);
        let matches = ec.beta == g.beta
            && ec.gamma == g.gamma
            && dec.delta == g.delta
            && dec.d_tilde == g.d_tilde
            && dec.u_tilde == g.u_tilde;
        if !matches {
            eprintln!("golden mismatch for {}", g.method);
            ok = false;
        }
    }
    report(1, "worked-example coefficient matrices match exactly", ok);
}

#[test]
fn criterion_02_pade_cholesky_exact() {
    let mut ok = true;
    for s in 1..=20 {
        if !verify_pade_cholesky(s).is_zero() {
            ok = false;
        }
        for k in 0..s {
            if rkenergy::pade::d_hat(k) <= rat(0) {
                ok = false;
            }
        }
    }
    report(2, "closed-form Pade decomposition residual is zero for s <= 20", ok);
}

#[test]
fn criterion_03_gamma_cross_route() {
    let mut ok = true;
    for s in 1..=12 {
        let ec = beta_gamma(&make_pade(s, s));
        for i in 0..s {
            for j in 0..s {
                if pade_gamma_direct(s, i, j) != *ec.gamma.get(i, j) {
                    ok = false;
                }
            }
        }
    }
    report(3, "direct and generic gamma routes agree for s <= 12", ok);
}

#[test]
fn criterion_04_proposition_5_5() {
    let ok = sample_parameters()
        .iter()
        .all(|x| verify_prop_5_5(x, 10).unwrap());
    report(4, "extended decomposition identity F = 0 for p,q <= 10", ok);
}

#[test]
fn criterion_05_combinatorial_identity() {
    let ok = (1..=15).all(verify_lemma_5_2);
    report(5, "alternating binomial sum matches closed form for s <= 15", ok);
}

#[test]
fn criterion_06_nu_theta_relations_and_telescoping() {
    use rkenergy::pade::{big_phi_n, phi_n};
    let mut ok = true;
    for x in sample_parameters() {
        ok &= verify_lemma_5_6(&x, 10, 10).unwrap();
        ok &= verify_lemma_5_8_5_9(&x, 10, 10).unwrap();
        for p in 1..=10usize {
            for q in 1..=10usize {
                ok &= big_phi_n(&x, 0, p, q).unwrap() == rat(1);
                for n in p..=12 {
                    ok &= big_phi_n(&x, n, p, q).unwrap() == rat(0);
                }
                for n in 0..=12 {
                    let diff =
                        big_phi_n(&x, n + 1, p, q).unwrap() - big_phi_n(&x, n, p, q).unwrap();
                    ok &= diff == -phi_n(&x, n, p, q).unwrap();
                }
            }
        }
    }
    report(6, "nu/theta relations and telescoping sums hold at all samples", ok);
}

#[test]
fn criterion_07_pochhammer_identities() {
    let ok = verify_pochhammer_identities(&sample_parameters(), 10);
    report(7, "factorial/Pochhammer identities hold on the sample grid", ok);
}

#[test]
fn criterion_08_hilbert_cholesky() {
    let ok = (0..=20).all(|n| verify_hilbert_cholesky(n).is_zero());
    report(8, "Hilbert-matrix decomposition residual is zero for N <= 20", ok);
}

#[test]
fn criterion_09_coefficient_folding() {
    let ok = (1..=12).all(verify_theorem_5_3);
    report(9, "folded continuum coefficients equal discrete mu for s <= 12", ok);
}

#[test]
fn criterion_10_energy_identity_closure() {
    let methods = [
        "euler-backward",
        "crank-nicolson",
        "qin-zhang",
        "kraaijevanger-spijker",
        "pade:0,3",
        "pade:4,1",
        "pade:2,2",
        "taylor:1",
        "taylor:2",
    ];
    let mut systems = vec![example_system("example1", None).unwrap()];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for k in 0..10 {
        systems.push(random_seminegative(3 + (k % 6), &mut rng));
    }
    let mut ok = true;
    for name in methods {
        let sf = builtin(name).unwrap();
        for sys in &systems {
            let u0 = DVector::from_fn(sys.dim, |i, _| 0.5 + (i as f64 * 0.7).sin());
            for target in [0.1, 1.0, 5.0] {
                let tau = target / sys.op_norm;
                let trace = energy_trace(&sf, sys, tau, 50, &u0).unwrap();
                if trace.max_relative_gap() > 1e-10 {
                    eprintln!(
                        "closure gap {:.3e} for {name} on {} at tau|L| = {target}",
                        trace.max_relative_gap(),
                        sys.name
                    );
                    ok = false;
                }
            }
        }
    }
    report(10, "measured and theoretical drops agree to 1e-10 relative", ok);
}

#[test]
fn criterion_11_convergence_table() {
    let sys = example_system("example1", None).unwrap();
    let u0 = example_initial("example1", None).unwrap();
    let taus = [1.6, 0.8, 0.4, 0.2];
    // Printed reference values: (l2 error, order, delta E, de order).
    let table3: [(f64, Option<f64>, f64, Option<f64>); 3] = [
        (3.56e-6, None, 1.35e-7, None),
        (5.25e-8, Some(6.09), 1.98e-9, Some(6.09)),
        (8.07e-10, Some(6.02), 3.05e-11, Some(6.02)),
    ];
    let table4: [(f64, Option<f64>, f64, Option<f64>); 3] = [
        (2.77e-8, None, 1.07e-9, None),
        (1.12e-10, Some(7.96), 4.34e-12, Some(7.95)),
        (4.39e-13, Some(7.99), 1.71e-14, Some(7.99)),
    ];
    let start = std::time::Instant::now();
    let mut ok = true;
    for (s, table) in [(3usize, &table3), (4usize, &table4)] {
        let rows =
            rkenergy::simulator::convergence_study(&make_pade(s, s), &sys, &u0, 8.0, &taus)
                .unwrap();
        for (row, (l2, order, de, de_order)) in rows.iter().zip(table.iter()) {
            ok &= (row.l2_error - l2).abs() <= 0.05 * l2;
            ok &= (row.delta_e - de).abs() <= 0.05 * de;
            if let Some(o) = order {
                ok &= (row.order.unwrap() - o).abs() <= 0.15;
            }
            if let Some(o) = de_order {
                ok &= (row.de_order.unwrap() - o).abs() <= 0.15;
            }
        }
        if s == 4 {
            // The finest row sits near the roundoff floor; only the order
            // is checked, with a wide margin.
            ok &= (rows[3].order.unwrap() - 8.07).abs() <= 0.5;
        } else {
            ok &= (rows[3].l2_error - 1.26e-11).abs() <= 0.05 * 1.26e-11;
            ok &= (rows[3].order.unwrap() - 6.01).abs() <= 0.15;
        }
    }
    ok &= start.elapsed().as_secs_f64() < 1.0;
    report(11, "convergence table values and orders reproduce", ok);
}

#[test]
fn criterion_12_continuum_truncation_order() {
    let sys = example_system("example1", None).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    use rand::Rng;
    let u = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0f64));
    let taus = [0.2, 0.1, 0.05];
    let mut ok = true;
    for n in [1usize, 2] {
        let defects: Vec<f64> = taus
            .iter()
            .map(|&tau| {
                let exact =
                    (matrix_exponential(&sys.l, tau) * &u).norm_squared() - u.norm_squared();
                (exact - energy_series_partial_sum(&sys, &u, tau, n)).abs()
            })
            .collect();
        for pair in defects.windows(2) {
            let order = (pair[0] / pair[1]).log2();
            if order < 2.0 * n as f64 + 2.5 {
                eprintln!("N = {n}: observed order {order:.2}");
                ok = false;
            }
        }
    }
    report(12, "truncated-series defect order is at least 2N + 2.5", ok);
}

#[test]
fn criterion_13_method_of_lines_examples() {
    let sf = make_pade(2, 2);
    let mut ok = true;
    for name in ["dg-advection", "ldg-dispersion"] {
        let sys = example_system(name, Some(20)).unwrap();
        let u0 = example_initial(name, Some(20)).unwrap();
        let trace = energy_trace(&sf, &sys, 0.1, 40, &u0).unwrap();
        if !trace.records.iter().all(|r| r.measured_drop >= 0.0) {
            eprintln!("{name}: negative energy drop");
            ok = false;
        }
        if trace.max_relative_gap() > 1e-8 {
            eprintln!("{name}: closure gap {:.3e}", trace.max_relative_gap());
            ok = false;
        }
    }
    report(13, "method-of-lines systems decay monotonically with closure", ok);
}

#[test]
fn criterion_14_weak_instability_witness() {
    let sf = builtin("pade:0,3").unwrap();
    let sys = example_system("skew2", None).unwrap();
    let ec = beta_gamma(&sf);
    let dec = decompose(&ec);
    let tau = 0.1;
    let mut u = example_initial("skew2", None).unwrap();
    let mut ok = true;
    for _ in 0..50 {
        // w = Q(tau L)^{-1} u via one solve inside theoretical_drop's
        // machinery: recompute directly for the witness formula.
        let q = {
            let l = &sys.l;
            let mut acc = nalgebra::DMatrix::zeros(2, 2);
            for c in sf.vartheta.iter().rev() {
                acc = tau * (l * acc);
                let cf: f64 = num_traits::ToPrimitive::to_f64(c).unwrap();
                acc[(0, 0)] += cf;
                acc[(1, 1)] += cf;
            }
            acc
        };
        let w = q.lu().solve(&u).unwrap();
        let l2w = &sys.l * (&sys.l * &w);
        let l3w = &sys.l * &l2w;
        let predicted =
            tau.powi(4) / 12.0 * l2w.norm_squared() - tau.powi(6) / 36.0 * l3w.norm_squared();
        let u_next = step(&sf, &sys, tau, &u).unwrap();
        let growth = u_next.norm_squared() - u.norm_squared();
        ok &= growth > 0.0;
        ok &= (growth - predicted).abs() <= 1e-10 * predicted.abs();
        // The general identity must agree as well.
        let theo = rkenergy::simulator::theoretical_drop(&sf, &dec, &sys, tau, &u).unwrap();
        ok &= (growth + theo).abs() <= 1e-10 * predicted.abs();
        u = u_next;
    }
    report(14, "energy growth witness matches the closed form", ok);
}

#[test]
fn seminegativity_margins() {
    // Sanity companion to criteria 13/14: construction checks pass and the
    // margins are tiny relative to the operator norms.
    for name in ["example1", "dg-advection", "ldg-dispersion", "skew2"] {
        let sys: SeminegativeSystem = example_system(name, None).unwrap();
        assert!(sys.seminegativity_margin <= 1e-12 * sys.op_norm.max(1.0));
    }
}
