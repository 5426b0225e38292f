//! Command-line interface: energy-law analysis of a method, exact identity
//! verification sweeps, trajectory simulation with energy traces, and
//! convergence studies.
//!
//! Exit codes: 0 success, 1 verification or numerical failure, 2 usage
//! error.

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::SeedableRng;
use rkenergy::energy::{beta_gamma, decompose, classify, energy_law_terms, render_energy_law};
use rkenergy::exactnum::{format_rational, parse_rational, Rational, RationalMatrix};
use rkenergy::methods::{builtin, from_butcher, ButcherTableau, StabilityFunction};
use rkenergy::pade;
use rkenergy::simulator;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rkenergy", about = "Energy-law analysis of Runge-Kutta methods for seminegative systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the main output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Derive and print the energy law and stability classification of a method.
    Analyze {
        /// Method spec: euler-backward, crank-nicolson, qin-zhang,
        /// kraaijevanger-spijker, pade:M,N, taylor:P, or butcher:PATH.
        #[arg(long)]
        method: String,
    },
    /// Run exact verification sweeps over the closed-form identities.
    Verify {
        /// One of: pade-cholesky, cross-gamma, hilbert, lemma-5-2,
        /// theorem-5-3, identities, energy-closure, all.
        #[arg(long, default_value = "all")]
        scope: String,
        /// Upper bound for the Pade order s.
        #[arg(long, default_value_t = 10)]
        s_max: usize,
        /// Upper bound for the identity indices p, q.
        #[arg(long, default_value_t = 8)]
        p_max: usize,
        /// Upper bound for the Hilbert matrix size N.
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Comma-separated rational sample parameters (e.g. "1/3,7/5").
        #[arg(long)]
        samples: Option<String>,
    },
    /// Step a system in time and record the energy trace.
    Simulate {
        #[arg(long)]
        method: String,
        /// System: example1, dg-advection, ldg-dispersion, or skew2.
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
        #[arg(long, default_value_t = 4.0)]
        t_end: f64,
        /// Cell count of the method-of-lines systems.
        #[arg(long)]
        n_d: Option<usize>,
    },
    /// Run a convergence study against the matrix-exponential reference.
    Converge {
        #[arg(long)]
        method: String,
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 8.0)]
        t_end: f64,
        /// Comma-separated step sizes, largest first.
        #[arg(long, default_value = "1.6,0.8,0.4,0.2")]
        taus: String,
        #[arg(long)]
        n_d: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

enum CliError {
    Usage(String),
    Runtime(String),
}

fn resolve_method(spec: &str) -> Result<StabilityFunction, CliError> {
    if let Some(path) = spec.strip_prefix("butcher:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
        let tableau = ButcherTableau::parse(&text).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut sf = from_butcher(&tableau);
        sf.name = spec.to_string();
        return Ok(sf);
    }
    builtin(spec).map_err(|e| CliError::Usage(e.to_string()))
}

fn write_output(cli: &Cli, content: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Analyze { method } => cmd_analyze(cli, method),
        Command::Verify {
            scope,
            s_max,
            p_max,
            n_max,
            samples,
        } => cmd_verify(cli, scope, *s_max, *p_max, *n_max, samples.as_deref()),
        Command::Simulate {
            method,
            system,
            tau,
            t_end,
            n_d,
        } => cmd_simulate(cli, method, system, *tau, *t_end, *n_d),
        Command::Converge {
            method,
            system,
            t_end,
            taus,
            n_d,
        } => cmd_converge(cli, method, system, *t_end, taus, *n_d),
    }
}

fn rational_vec_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(format_rational(r))).collect())
}

fn rational_matrix_json(m: &RationalMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    (0..m.cols())
                        .map(|j| Value::String(format_rational(m.get(i, j))))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn format_matrix_text(m: &RationalMatrix) -> String {
    (0..m.rows())
        .map(|i| {
            let row: Vec<String> = (0..m.cols()).map(|j| format_rational(m.get(i, j))).collect();
            format!("    [{}]", row.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn cmd_analyze(cli: &Cli, method: &str) -> Result<ExitCode, CliError> {
    let sf = resolve_method(method)?;
    let ec = beta_gamma(&sf);
    let dec = decompose(&ec);
    let rep = classify(&ec, &dec);
    let terms = energy_law_terms(&sf, &ec, &dec);
    let content = match cli.format {
        Format::Json => {
            let v = json!({
                "method": sf.name,
                "s": sf.s(),
                "order": rkenergy::methods::approximation_order(&sf),
                "alpha": rational_matrix_json(&ec.alpha),
                "beta": rational_vec_json(&ec.beta),
                "gamma": rational_matrix_json(&ec.gamma),
                "delta": rational_vec_json(&dec.delta),
                "d_tilde": rational_vec_json(&dec.d_tilde),
                "u_tilde": rational_matrix_json(&dec.u_tilde),
                "zeta": rep.zeta.map(|z| json!(z)).unwrap_or(Value::Null),
                "rho": rep.rho,
                "kappa": rep.kappa,
                "classification": rep.classification.to_string(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
        _ => {
            let beta: Vec<String> = ec.beta.iter().map(format_rational).collect();
            let delta: Vec<String> = dec.delta.iter().map(format_rational).collect();
            let d: Vec<String> = dec.d_tilde.iter().map(format_rational).collect();
            let zeta = rep
                .zeta
                .map(|z| z.to_string())
                .unwrap_or_else(|| "inf".to_string());
            format!(
                "method: {} (s = {}, order {})\n\
                 beta: [{}]\n\
                 gamma:\n{}\n\
                 delta: [{}]\n\
                 d_tilde: [{}]\n\
                 u_tilde:\n{}\n\
                 zeta = {zeta}, rho = {}, kappa = {}\n\
                 classification: {}\n\
                 identity: {}\n",
                sf.name,
                sf.s(),
                rkenergy::methods::approximation_order(&sf),
                beta.join(", "),
                format_matrix_text(&ec.gamma),
                delta.join(", "),
                d.join(", "),
                format_matrix_text(&dec.u_tilde),
                rep.rho,
                rep.kappa,
                rep.classification,
                render_energy_law(&terms),
            )
        }
    };
    write_output(cli, &content)?;
    Ok(ExitCode::SUCCESS)
}

struct CheckResult {
    check: String,
    parameters: Value,
    passed: bool,
    counterexample: Option<Value>,
}

fn default_samples() -> Vec<Rational> {
    ["1/3", "7/5", "-5/3", "22/7", "101/6"]
        .iter()
        .map(|s| parse_rational(s).unwrap())
        .collect()
}

fn cmd_verify(
    cli: &Cli,
    scope: &str,
    s_max: usize,
    p_max: usize,
    n_max: usize,
    samples: Option<&str>,
) -> Result<ExitCode, CliError> {
    let samples: Vec<Rational> = match samples {
        Some(list) => list
            .split(',')
            .map(|t| parse_rational(t.trim()).map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<_, _>>()?,
        None => default_samples(),
    };
    let known = [
        "pade-cholesky",
        "cross-gamma",
        "hilbert",
        "lemma-5-2",
        "theorem-5-3",
        "identities",
        "energy-closure",
        "all",
    ];
    if !known.contains(&scope) {
        return Err(CliError::Usage(format!(
            "unknown scope {scope:?}; valid scopes: {}",
            known.join(", ")
        )));
    }
    let run_scope = |name: &str| scope == name || scope == "all";
    let mut results = Vec::new();

    if run_scope("pade-cholesky") {
        for s in 1..=s_max {
            results.push(CheckResult {
                check: "pade-cholesky".into(),
                parameters: json!({ "s": s }),
                passed: pade::verify_pade_cholesky(s).is_zero(),
                counterexample: None,
            });
        }
    }
    if run_scope("cross-gamma") {
        for s in 1..=s_max {
            let ec = beta_gamma(&rkenergy::methods::make_pade(s, s));
            let mut counterexample = None;
            'outer: for i in 0..s {
                for j in 0..s {
                    if pade::pade_gamma_direct(s, i, j) != *ec.gamma.get(i, j) {
                        counterexample = Some(json!({ "s": s, "i": i, "j": j }));
                        break 'outer;
                    }
                }
            }
            results.push(CheckResult {
                check: "cross-gamma".into(),
                parameters: json!({ "s": s }),
                passed: counterexample.is_none(),
                counterexample,
            });
        }
    }
    if run_scope("hilbert") {
        for n in 0..=n_max {
            results.push(CheckResult {
                check: "hilbert".into(),
                parameters: json!({ "N": n }),
                passed: rkenergy::continuum::verify_hilbert_cholesky(n).is_zero(),
                counterexample: None,
            });
        }
    }
    if run_scope("lemma-5-2") {
        for s in 1..=s_max {
            results.push(CheckResult {
                check: "lemma-5-2".into(),
                parameters: json!({ "s": s }),
                passed: pade::verify_lemma_5_2(s),
                counterexample: None,
            });
        }
    }
    if run_scope("theorem-5-3") {
        for s in 1..=s_max {
            results.push(CheckResult {
                check: "theorem-5-3".into(),
                parameters: json!({ "s": s }),
                passed: pade::verify_theorem_5_3(s),
                counterexample: None,
            });
        }
    }
    if run_scope("identities") {
        let to_err = |e: pade::PadeError| CliError::Usage(e.to_string());
        for x in &samples {
            let xs = format_rational(x);
            results.push(CheckResult {
                check: "nu-theta-relations".into(),
                parameters: json!({ "x": xs, "i_max": p_max, "j_max": p_max }),
                passed: pade::verify_lemma_5_6(x, p_max, p_max).map_err(to_err)?,
                counterexample: None,
            });
            results.push(CheckResult {
                check: "finite-sums".into(),
                parameters: json!({ "x": xs, "p_max": p_max, "q_max": p_max }),
                passed: pade::verify_lemma_5_8_5_9(x, p_max, p_max).map_err(to_err)?,
                counterexample: None,
            });
            results.push(CheckResult {
                check: "extended-decomposition".into(),
                parameters: json!({ "x": xs, "p_max": p_max }),
                passed: pade::verify_prop_5_5(x, p_max).map_err(to_err)?,
                counterexample: None,
            });
        }
        results.push(CheckResult {
            check: "pochhammer-identities".into(),
            parameters: json!({ "n_max": p_max }),
            passed: pade::verify_pochhammer_identities(&samples, p_max),
            counterexample: None,
        });
    }
    if run_scope("energy-closure") {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
        let methods = ["euler-backward", "crank-nicolson", "qin-zhang", "kraaijevanger-spijker"];
        for k in 0..5usize {
            let sys = simulator::random_seminegative(4 + k % 4, &mut rng);
            for name in methods {
                let sf = builtin(name).unwrap();
                let u0 = DVector::from_fn(sys.dim, |i, _| 0.5 + (i as f64 * 0.7).sin());
                let tau = 1.0 / sys.op_norm;
                let trace = simulator::energy_trace(&sf, &sys, tau, 30, &u0)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                let gap = trace.max_relative_gap();
                results.push(CheckResult {
                    check: "energy-closure".into(),
                    parameters: json!({ "method": name, "system": k, "seed": cli.seed }),
                    passed: gap <= 1e-10,
                    counterexample: (gap > 1e-10).then(|| json!({ "relative_gap": gap })),
                });
            }
        }
    }

    let mut content = String::new();
    let mut all_passed = true;
    for r in &results {
        all_passed &= r.passed;
        match cli.format {
            Format::Json => {
                let mut v = json!({
                    "check": r.check,
                    "parameters": r.parameters,
                    "status": if r.passed { "pass" } else { "fail" },
                });
                if let Some(ce) = &r.counterexample {
                    v["counterexample"] = ce.clone();
                }
                content.push_str(&serde_json::to_string(&v).unwrap());
                content.push('\n');
            }
            _ => {
                content.push_str(&format!(
                    "{} {} {}\n",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.check,
                    r.parameters
                ));
            }
        }
    }
    write_output(cli, &content)?;
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn csv_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_simulate(
    cli: &Cli,
    method: &str,
    system: &str,
    tau: f64,
    t_end: f64,
    n_d: Option<usize>,
) -> Result<ExitCode, CliError> {
    let sf = resolve_method(method)?;
    let sys = simulator::example_system(system, n_d)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let u0 = simulator::example_initial(system, n_d)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let n_steps = (t_end / tau).round().max(1.0) as usize;
    let trace = simulator::energy_trace(&sf, &sys, tau, n_steps, &u0)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let content = match cli.format {
        Format::Json => {
            let rows: Vec<Value> = trace
                .records
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "t": r.t,
                        "energy": r.energy,
                        "measured_drop": r.measured_drop,
                        "theoretical_drop": r.theoretical_drop,
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).unwrap())
        }
        _ => {
            let mut out = String::from("n,t,energy,measured_drop,theoretical_drop,rel_gap\n");
            for r in &trace.records {
                let e_next = r.energy - r.measured_drop;
                let scale = r.energy.max(e_next).max(f64::MIN_POSITIVE);
                let gap = (r.measured_drop - r.theoretical_drop).abs() / scale;
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.n,
                    csv_f64(r.t),
                    csv_f64(r.energy),
                    csv_f64(r.measured_drop),
                    csv_f64(r.theoretical_drop),
                    csv_f64(gap)
                ));
            }
            out
        }
    };
    write_output(cli, &content)?;
    let growth_steps = trace.records.iter().filter(|r| r.measured_drop < 0.0).count();
    eprintln!(
        "max relative gap between measured and theoretical drops: {:.3e}",
        trace.max_relative_gap()
    );
    if growth_steps > 0 {
        eprintln!("energy grew in {growth_steps} of {n_steps} steps");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_converge(
    cli: &Cli,
    method: &str,
    system: &str,
    t_end: f64,
    taus: &str,
    n_d: Option<usize>,
) -> Result<ExitCode, CliError> {
    let sf = resolve_method(method)?;
    let sys = simulator::example_system(system, n_d)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let u0 = simulator::example_initial(system, n_d)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let taus: Vec<f64> = taus
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid step size {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    let rows = simulator::convergence_study(&sf, &sys, &u0, t_end, &taus)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let content = match cli.format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "tau": r.tau,
                        "l2_error": r.l2_error,
                        "order": r.order,
                        "delta_E": r.delta_e,
                        "de_order": r.de_order,
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).unwrap())
        }
        _ => {
            let mut out = String::from("tau,l2_error,order,delta_E,de_order\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    csv_f64(r.tau),
                    csv_f64(r.l2_error),
                    r.order.map(csv_f64).unwrap_or_default(),
                    csv_f64(r.delta_e),
                    r.de_order.map(csv_f64).unwrap_or_default()
                ));
            }
            out
        }
    };
    write_output(cli, &content)?;
    Ok(ExitCode::SUCCESS)
}
