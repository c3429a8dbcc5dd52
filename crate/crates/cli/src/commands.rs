//! The scenario-driven commands and their artifacts.
//!
//! Exit codes: 0 success (integrable / within tolerance), 1 negative result
//! (not integrable, metrics over tolerance, gamma unavailable), 2 input
//! error. Artifacts are written under the output directory as
//! `<stem>.<artifact>.<ext>`; CSV uses a header row, comma separators, 17
//! significant digits and `\n` newlines, so reruns are byte-identical.

use std::fmt::Write as _;
use std::path::PathBuf;

use spinlie::grid::TimeGrid;
use spinlie::integrability::{
    analyze, exact_propagator, GammaChoice, IntegrabilityReport, Verdict,
};
use spinlie::liesys::{solve_fsys, AlgebraCurve, TargetCurve};
use spinlie::oracle::{
    compare, rk4_propagate, unitary_midpoint_propagate, ComparisonMetrics, Initial,
    PropagationResult,
};
use spinlie::spinrep::build_spin_operators;
use spinlie::su2::AGammaElement;
use spinlie::Error;

use crate::scenario::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Where and whether to write artifacts.
pub struct OutputContext {
    pub dir: PathBuf,
    pub stem: String,
}

impl OutputContext {
    fn path(&self, artifact: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{}.{artifact}.{ext}", self.stem))
    }

    fn write(&self, artifact: &str, ext: &str, content: &str) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.path(artifact, ext);
        std::fs::write(&path, content)?;
        Ok(path)
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_artifact(ctx: &OutputContext, artifact: &str, ext: &str, content: &str) -> Option<i32> {
    match ctx.write(artifact, ext, content) {
        Ok(path) => {
            println!("wrote {}", path.display());
            None
        }
        Err(e) => {
            eprintln!("cannot write {artifact}: {e}");
            Some(EXIT_CONFIG)
        }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Integrable => "integrable",
        Verdict::NotIntegrable => "not_integrable",
        Verdict::Degenerate => "degenerate",
    }
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::Value::Null
    }
}

fn report_text(scenario: &Scenario, report: &IntegrabilityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "spin: {} (dimension {})", scenario.spin, scenario.spin.dimension());
    let _ = writeln!(
        out,
        "grid: t in [{}, {}], {} steps (h = {:.6e})",
        scenario.grid.t0(),
        scenario.grid.t1(),
        scenario.grid.steps(),
        scenario.grid.step()
    );
    match report.gamma {
        Some(sol) => {
            let _ = writeln!(
                out,
                "gamma: {:.15} (branch {:?}, constancy residual {:.3e})",
                sol.gamma(),
                sol.branch(),
                sol.constancy_residual()
            );
        }
        None => {
            let _ = writeln!(out, "gamma: no constant solution found");
        }
    }
    let _ = writeln!(
        out,
        "residuals: algebraic_1 = {:.3e}, algebraic_2 = {:.3e}, differential = {:.3e}",
        report.r_algebraic_1, report.r_algebraic_2, report.r_differential
    );
    let _ = writeln!(out, "tolerance: {:.3e}", report.tolerance);
    if !report.d_samples.is_empty() {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &d in &report.d_samples {
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let _ = writeln!(out, "D range: [{lo:.12}, {hi:.12}]");
    }
    let _ = writeln!(out, "verdict: {}", verdict_name(report.verdict));
    out
}

fn report_json(report: &IntegrabilityReport) -> serde_json::Value {
    let gamma = report.gamma.map(|sol| {
        serde_json::json!({
            "value": sol.gamma(),
            "branch": match sol.branch() {
                spinlie::integrability::GammaBranch::Plus => "plus",
                spinlie::integrability::GammaBranch::Minus => "minus",
            },
            "constancy_residual": sol.constancy_residual(),
        })
    });
    let d_range = if report.d_samples.is_empty() {
        serde_json::Value::Null
    } else {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &d in &report.d_samples {
            lo = lo.min(d);
            hi = hi.max(d);
        }
        serde_json::json!([lo, hi])
    };
    serde_json::json!({
        "verdict": verdict_name(report.verdict),
        "gamma": gamma,
        "residuals": {
            "algebraic_1": finite_or_null(report.r_algebraic_1),
            "algebraic_2": finite_or_null(report.r_algebraic_2),
            "differential": finite_or_null(report.r_differential),
        },
        "tolerance": report.tolerance,
        "d_range": d_range,
    })
}

fn run_analysis(scenario: &Scenario) -> Result<IntegrabilityReport, Error> {
    analyze(
        &scenario.field,
        scenario.gamma,
        &scenario.grid,
        scenario.residual_tolerance,
    )
}

/// `check`: polar track, gamma, residuals, verdict.
pub fn cmd_check(scenario: &Scenario, ctx: &OutputContext) -> i32 {
    let report = match run_analysis(scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("check failed: {e}");
            return EXIT_CONFIG;
        }
    };
    let text = report_text(scenario, &report);
    print!("{text}");
    if scenario.wants("report") {
        if let Some(code) = write_artifact(ctx, "report", "txt", &text) {
            return code;
        }
    }
    if scenario.wants("result") {
        let json = serde_json::to_string_pretty(&report_json(&report)).unwrap();
        if let Some(code) = write_artifact(ctx, "result", "json", &(json + "\n")) {
            return code;
        }
    }
    if report.verdict == Verdict::Integrable {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn solved_gamma(scenario: &Scenario, report: &IntegrabilityReport) -> Option<f64> {
    match scenario.gamma {
        GammaChoice::Fixed(g) => Some(g),
        GammaChoice::Auto => report.gamma.map(|s| s.gamma()),
    }
}

/// `solve`: exact propagation CSV with columns t, state components, Theta, D.
pub fn cmd_solve(scenario: &Scenario, ctx: &OutputContext) -> i32 {
    let report = match run_analysis(scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("solve failed: {e}");
            return EXIT_CONFIG;
        }
    };
    if report.verdict != Verdict::Integrable {
        eprintln!(
            "not integrable (verdict {}); no CSV written",
            verdict_name(report.verdict)
        );
        return EXIT_NEGATIVE;
    }
    let gamma = solved_gamma(scenario, &report).expect("integrable verdict implies gamma");
    let prop = match exact_propagator(
        &scenario.field,
        gamma,
        scenario.spin,
        &scenario.grid,
        scenario.residual_tolerance,
    ) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("solve failed: {e}");
            return EXIT_CONFIG;
        }
    };
    let psi0 = scenario.initial_state();
    let dim = psi0.len();

    let mut csv = String::new();
    csv.push('t');
    for k in 0..dim {
        let _ = write!(csv, ",psi{k}_re,psi{k}_im");
    }
    csv.push_str(",theta,d\n");
    for t in scenario.grid.nodes() {
        let (u, theta, d) = match (|| -> Result<_, Error> {
            Ok((prop.unitary_at(t)?, prop.theta_at(t)?, prop.d_at(t)?))
        })() {
            Ok(v) => v,
            Err(e) => {
                eprintln!("solve failed at t = {t}: {e}");
                return EXIT_CONFIG;
            }
        };
        let psi = u.apply(&psi0);
        let mut row = fmt17(t);
        for k in 0..dim {
            let _ = write!(row, ",{},{}", fmt17(psi[k].re), fmt17(psi[k].im));
        }
        let _ = write!(row, ",{},{}", fmt17(theta), fmt17(d));
        csv.push_str(&row);
        csv.push('\n');
    }
    if scenario.wants("csv") {
        if let Some(code) = write_artifact(ctx, "solve", "csv", &csv) {
            return code;
        }
    }
    println!(
        "solved: gamma = {gamma:.15}, {} samples, final Theta = {:.12}",
        scenario.grid.len(),
        prop.theta_at(scenario.grid.t1()).unwrap_or(f64::NAN)
    );
    EXIT_OK
}

fn metrics_json(label: &str, m: &ComparisonMetrics) -> serde_json::Value {
    serde_json::json!({
        "pair": label,
        "max_state_error": m.max_state_error,
        "infidelity": m.infidelity,
        "max_operator_error": m.max_operator_error,
        "unitarity_defect": m.unitarity_defect,
    })
}

fn print_metrics(label: &str, m: &ComparisonMetrics) {
    println!(
        "{label}: max_state_error = {:.3e}, infidelity = {:.3e}, max_operator_error = {:.3e}, unitarity_defect = {:.3e}",
        m.max_state_error, m.infidelity, m.max_operator_error, m.unitarity_defect
    );
}

fn state_csv(result: &PropagationResult) -> String {
    let dim = result.samples()[0].nrows();
    let mut csv = String::from("t");
    for k in 0..dim {
        let _ = write!(csv, ",psi{k}_re,psi{k}_im");
    }
    csv.push('\n');
    for (t, s) in result.times().iter().zip(result.samples()) {
        let mut row = fmt17(*t);
        for k in 0..dim {
            let _ = write!(row, ",{},{}", fmt17(s[(k, 0)].re), fmt17(s[(k, 0)].im));
        }
        csv.push_str(&row);
        csv.push('\n');
    }
    csv
}

/// `oracle`: both numerical schemes, cross-scheme metrics, RK4 state CSV.
pub fn cmd_oracle(scenario: &Scenario, ctx: &OutputContext) -> i32 {
    let ops = build_spin_operators(scenario.spin);
    let run = || -> Result<_, Error> {
        let state = rk4_propagate(
            &scenario.field,
            &ops,
            Initial::State(scenario.initial_state()),
            &scenario.grid,
        )?;
        let rk4_op = rk4_propagate(&scenario.field, &ops, Initial::Identity, &scenario.grid)?;
        let mid_op = unitary_midpoint_propagate(&scenario.field, &ops, &scenario.grid)?;
        let metrics = compare(&rk4_op, &mid_op)?;
        Ok((state, metrics))
    };
    let (state, metrics) = match run() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("oracle failed: {e}");
            return EXIT_CONFIG;
        }
    };
    print_metrics("rk4 vs unitary_midpoint", &metrics);
    if scenario.wants("csv") {
        if let Some(code) = write_artifact(ctx, "oracle", "csv", &state_csv(&state)) {
            return code;
        }
    }
    if scenario.wants("metrics") {
        let json = serde_json::to_string_pretty(&metrics_json(
            "rk4 vs unitary_midpoint",
            &metrics,
        ))
        .unwrap();
        if let Some(code) = write_artifact(ctx, "oracle_metrics", "json", &(json + "\n")) {
            return code;
        }
    }
    EXIT_OK
}

/// `compare`: exact propagator against both oracle schemes; exit 0 iff the
/// exact-vs-RK4 infidelity is below the fidelity tolerance.
pub fn cmd_compare(scenario: &Scenario, ctx: &OutputContext) -> i32 {
    let report = match run_analysis(scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("compare failed: {e}");
            return EXIT_CONFIG;
        }
    };
    if report.verdict != Verdict::Integrable {
        eprintln!("not integrable (verdict {})", verdict_name(report.verdict));
        return EXIT_NEGATIVE;
    }
    let gamma = solved_gamma(scenario, &report).expect("integrable verdict implies gamma");
    let ops = build_spin_operators(scenario.spin);
    let run = || -> Result<_, Error> {
        let prop = exact_propagator(
            &scenario.field,
            gamma,
            scenario.spin,
            &scenario.grid,
            scenario.residual_tolerance,
        )?;
        let psi0 = scenario.initial_state();
        let exact = prop.propagate(Initial::State(psi0.clone()), &scenario.grid)?;
        let rk4 = rk4_propagate(
            &scenario.field,
            &ops,
            Initial::State(psi0),
            &scenario.grid,
        )?;
        let exact_op = prop.propagate(Initial::Identity, &scenario.grid)?;
        let mid_op = unitary_midpoint_propagate(&scenario.field, &ops, &scenario.grid)?;
        Ok((compare(&exact, &rk4)?, compare(&exact_op, &mid_op)?))
    };
    let (vs_rk4, vs_mid) = match run() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("compare failed: {e}");
            return EXIT_CONFIG;
        }
    };
    println!("gamma = {gamma:.15}");
    print_metrics("exact vs rk4", &vs_rk4);
    print_metrics("exact vs unitary_midpoint", &vs_mid);
    if scenario.wants("metrics") {
        let json = serde_json::to_string_pretty(&serde_json::json!([
            metrics_json("exact vs rk4", &vs_rk4),
            metrics_json("exact vs unitary_midpoint", &vs_mid),
        ]))
        .unwrap();
        if let Some(code) = write_artifact(ctx, "metrics", "json", &(json + "\n")) {
            return code;
        }
    }
    if vs_rk4.infidelity < scenario.fidelity_tolerance {
        EXIT_OK
    } else {
        eprintln!(
            "infidelity {:.3e} exceeds tolerance {:.3e}",
            vs_rk4.infidelity, scenario.fidelity_tolerance
        );
        EXIT_NEGATIVE
    }
}

/// `fsys`: solve the transformation system toward `D(t) a3` from
/// `A_gamma(phi(0))` and emit the coordinate trajectory.
///
/// Runs regardless of the verdict so closure (or its failure) can be
/// inspected; exits 1 only when no gamma is available.
pub fn cmd_fsys(scenario: &Scenario, ctx: &OutputContext) -> i32 {
    let report = match run_analysis(scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("fsys failed: {e}");
            return EXIT_CONFIG;
        }
    };
    let gamma = match solved_gamma(scenario, &report) {
        Some(g) => g,
        None => {
            eprintln!("no gamma available (verdict {})", verdict_name(report.verdict));
            return EXIT_NEGATIVE;
        }
    };
    if report.d_samples.is_empty() {
        eprintln!("degenerate field; transformation system undefined");
        return EXIT_NEGATIVE;
    }
    let run = || -> Result<String, Error> {
        let track = scenario.field.to_polar_track(&scenario.grid)?;
        let phi0 = track.samples()[0].phi;
        let g0 = AGammaElement::new(gamma, phi0)?.embed();
        let target = TargetCurve::AxisZ {
            d: spinlie::fields::Program::Table {
                times: scenario.grid.nodes().collect(),
                values: report.d_samples.clone(),
            },
        };
        let traj = solve_fsys(
            &AlgebraCurve::from_field(scenario.field.clone()),
            &target,
            &g0,
            &scenario.grid,
        )?;
        let mut csv = String::from("t,x1,x2,y1,y2,first_integral\n");
        for (t, g) in traj.times().iter().zip(traj.elements()) {
            let [x1, x2, y1, y2] = g.coordinates();
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                fmt17(*t),
                fmt17(x1),
                fmt17(x2),
                fmt17(y1),
                fmt17(y2),
                fmt17(g.first_integral())
            );
        }
        let mut worst_y1 = 0.0f64;
        for g in traj.elements() {
            worst_y1 = worst_y1.max(g.y1().abs());
        }
        println!(
            "fsys: gamma = {gamma:.15}, verdict {}, max |y1| = {worst_y1:.3e}",
            verdict_name(report.verdict)
        );
        Ok(csv)
    };
    match run() {
        Ok(csv) => {
            if scenario.wants("csv") {
                if let Some(code) = write_artifact(ctx, "fsys", "csv", &csv) {
                    return code;
                }
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("fsys failed: {e}");
            EXIT_CONFIG
        }
    }
}

/// Applies command-line overrides to a parsed scenario.
pub fn apply_overrides(
    scenario: &mut Scenario,
    steps: Option<usize>,
    gamma: Option<f64>,
    tolerance: Option<f64>,
    tolerance_is_fidelity: bool,
) -> Result<(), Error> {
    if let Some(steps) = steps {
        scenario.grid = TimeGrid::new(scenario.grid.t0(), scenario.grid.t1(), steps)?;
    }
    if let Some(g) = gamma {
        scenario.gamma = GammaChoice::Fixed(g);
    }
    if let Some(t) = tolerance {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "--tolerance must be positive, got {t}"
            )));
        }
        if tolerance_is_fidelity {
            scenario.fidelity_tolerance = t;
        } else {
            scenario.residual_tolerance = Some(t);
        }
    }
    Ok(())
}

