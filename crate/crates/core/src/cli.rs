//! Command-line front end. Every command prints one JSON report
//! `{command, config, checks, summary}`; exit code 0 when all checks pass,
//! 1 when a check fails or evaluation errors, 2 on usage errors.

use std::f64::consts::FRAC_PI_2;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::action_engine::{
    act_product, act_sphere, decompose, BasicConstruction, BundleAction, ProductSpherePoint, SpherePoint,
};
use crate::circleflow::{
    conjugacy_map, lift_double_cover, make_flow, CircleFlow, ConjugacyOutcome, FlowFunctionPair, FlowKind,
    ProjectiveLineFlow, VectorField,
};
use crate::error::Error;
use crate::ledger::{parabolic_dims, root_partition, table1_evaluated, ParabolicKind};
use crate::numkit::{norm, DenseMatrix, Tolerances};
use crate::orbit_lab::classify_orbit;
use crate::report::{all_pass, Check};
use crate::sopq::{algebra_element, GroupElement, Signature};
use crate::verify::{run_suite, Suite, SuiteConfig};

pub const SEED_ENV: &str = "ORTHOFLOW_SEED";

#[derive(Debug, Parser)]
#[command(name = "orthoflow", version, about = "SO°(p,q) actions from circle flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    #[arg(long, default_value_t = 3)]
    p: usize,
    #[arg(long, default_value_t = 3)]
    q: usize,
    /// Flow parameter n (Jacobians ∓2/n).
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Flow deformation parameter, |a| < 1.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Residual tolerance for algebraic identities.
    #[arg(long, allow_negative_numbers = true)]
    tol_algebraic: Option<f64>,
    /// Integrator error target.
    #[arg(long, allow_negative_numbers = true)]
    tol_ode: Option<f64>,
    /// Relative singular value cutoff for rank decisions.
    #[arg(long, allow_negative_numbers = true)]
    tol_rank: Option<f64>,
    /// Tolerance for comparing points of the action.
    #[arg(long, allow_negative_numbers = true)]
    tol_action: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Space {
    /// S^p × S^{q−1}, point given as v (p+1 values) then w (q values).
    Product,
    /// S^{p+q−1} with the four-fixed-point flow.
    Sphere,
    /// G ×_P S¹ at [e, φ].
    Bundle,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply exp(Σ c_i B_i) to a point.
    Act {
        #[command(flatten)]
        common: Common,
        /// Comma-separated coefficients over the algebra basis.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        /// Comma-separated point coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value_t = Space::Product)]
        space: Space,
    },
    /// Factor exp(Σ c_i B_i) = k m(θ) u against f e1 + ε1.
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        f: f64,
    },
    /// Build a flow and report on it.
    Flow {
        #[command(flatten)]
        common: Common,
        /// basicJ1 or basicJ1J2.
        #[arg(long, value_parser = parse_kind, default_value = "basicJ1")]
        make: FlowKind,
        /// Check f against the flow on a grid.
        #[arg(long)]
        validate: bool,
        /// Report the Jacobians and the principal-value invariant.
        #[arg(long)]
        invariants: bool,
        /// Compare against the flow with --target-n / --target-a.
        #[arg(long)]
        conjugacy: bool,
        #[arg(long)]
        target_n: Option<u32>,
        #[arg(long, allow_negative_numbers = true)]
        target_a: Option<f64>,
        /// Lift the projected four-fixed-point flow through the double cover.
        #[arg(long)]
        lift: bool,
    },
    /// Run a verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_suite, default_value = "all")]
        suite: Suite,
    },
    /// Integer tables: parabolic dimensions and the SO(p) subgroup table.
    Tables {
        #[arg(long)]
        parabolic: bool,
        #[arg(long)]
        table1: bool,
        /// Inclusive p range lo:hi.
        #[arg(long, default_value = "3:9", value_parser = parse_range)]
        range: (u32, u32),
    },
    /// Classify the orbit through a point.
    Orbit {
        #[command(flatten)]
        common: Common,
        /// Slice angle of the point.
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        /// Explicit product-sphere coordinates instead of a slice angle.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "phi")]
        point: Option<String>,
        #[arg(long, value_enum, default_value_t = Space::Product)]
        space: Space,
    },
}

fn parse_kind(s: &str) -> Result<FlowKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: u32 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo}"))?;
    let hi: u32 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi}"))?;
    if lo < 3 || hi < lo {
        return Err(format!("need 3 ≤ lo ≤ hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// What `dispatch` produced: exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: 2, stdout: String::new(), stderr: format!("usage error: {}\n", msg.into()) }
    }
}

struct Usage(String);

fn usage<T>(flag: &str, msg: impl std::fmt::Display) -> Result<T, Usage> {
    Err(Usage(format!("invalid value for {flag}: {msg}")))
}

/// f64 as a JSON number with 17 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON")
    } else {
        Value::String(x.to_string())
    }
}

/// Rewrites every non-integer number in `v` with 17 significant digits.
fn fix_numbers(v: &mut Value) {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            if text.contains(['.', 'e', 'E']) {
                if let Some(x) = n.as_f64() {
                    *v = num(x);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(fix_numbers),
        Value::Object(map) => map.values_mut().for_each(fix_numbers),
        _ => {}
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    let mut v = serde_json::to_value(x).expect("report values serialize");
    fix_numbers(&mut v);
    v
}

fn matrix_json(m: &DenseMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(|&x| num(x)).collect())).collect())
}

fn vector_json(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

fn check_json(c: &Check) -> Value {
    json!({ "name": c.name, "value": num(c.value), "threshold": num(c.threshold), "pass": c.pass })
}

struct Report {
    command: &'static str,
    config: Value,
    checks: Vec<Check>,
    summary: Map<String, Value>,
}

impl Report {
    fn new(command: &'static str, config: Value) -> Self {
        Self { command, config, checks: Vec::new(), summary: Map::new() }
    }

    fn put(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }

    fn fail(&mut self, err: &Error) {
        self.checks.push(Check::flag("evaluation", false));
        self.put("error", Value::String(err.to_string()));
    }

    fn finish(mut self) -> Outcome {
        let pass = all_pass(&self.checks);
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        self.summary.insert("pass".into(), Value::Bool(pass));
        self.summary.insert("failed".into(), json!(failed));
        let mut config = self.config;
        fix_numbers(&mut config);
        let doc = json!({
            "command": self.command,
            "config": config,
            "checks": self.checks.iter().map(check_json).collect::<Vec<_>>(),
            "summary": Value::Object(self.summary),
        });
        let text = serde_json::to_string_pretty(&doc).expect("report serializes");
        Outcome { code: if pass { 0 } else { 1 }, stdout: text + "\n", stderr: String::new() }
    }
}

struct Setup {
    sig: Signature,
    tol: Tolerances,
    common: Common,
}

impl Setup {
    fn new(mut common: Common, env_seed: Option<u64>) -> Result<Self, Usage> {
        if let Some(seed) = env_seed {
            common.seed = seed;
        }
        if common.p < 3 {
            return usage("--p", "must be at least 3");
        }
        if common.q < 3 {
            return usage("--q", "must be at least 3");
        }
        if common.n == 0 {
            return usage("--n", "must be at least 1");
        }
        if common.a.is_nan() || common.a.abs() >= 1.0 {
            return usage("--a", "must satisfy |a| < 1");
        }
        if common.samples == 0 {
            return usage("--samples", "must be at least 1");
        }
        let d = Tolerances::default();
        let tol = Tolerances {
            algebraic: common.tol_algebraic.unwrap_or(d.algebraic),
            ode: common.tol_ode.unwrap_or(d.ode),
            rank: common.tol_rank.unwrap_or(d.rank),
            action: common.tol_action.unwrap_or(d.action),
        };
        for (flag, t) in [
            ("--tol-algebraic", tol.algebraic),
            ("--tol-ode", tol.ode),
            ("--tol-rank", tol.rank),
            ("--tol-action", tol.action),
        ] {
            if !(t.is_finite() && t > 0.0) {
                return usage(flag, "must be positive and finite");
            }
        }
        let Ok(tol) = tol.validated() else {
            return usage("--tol-algebraic", "must not exceed --tol-action");
        };
        let sig = Signature::new(common.p, common.q).map_err(|e| Usage(e.to_string()))?;
        Ok(Self { sig, tol, common })
    }

    fn config(&self) -> Map<String, Value> {
        let c = &self.common;
        let mut m = Map::new();
        m.insert("p".into(), json!(c.p));
        m.insert("q".into(), json!(c.q));
        m.insert("n".into(), json!(c.n));
        m.insert("a".into(), num(c.a));
        m.insert("seed".into(), json!(c.seed));
        m.insert("samples".into(), json!(c.samples));
        m.insert(
            "tolerances".into(),
            json!({
                "algebraic": num(self.tol.algebraic),
                "ode": num(self.tol.ode),
                "rank": num(self.tol.rank),
                "action": num(self.tol.action),
            }),
        );
        m
    }

    fn flow(&self, kind: FlowKind) -> Result<CircleFlow, Usage> {
        make_flow(kind, self.common.n, self.common.a).map_err(|e| Usage(e.to_string()))
    }
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<f64>, Usage> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| Usage(format!("invalid value for {flag}: cannot parse '{}'", t.trim())))
        })
        .collect()
}

fn group_from(flag: &str, s: &str, sig: Signature) -> Result<GroupElement, Usage> {
    let c = parse_list(flag, s)?;
    if c.len() != sig.algebra_dim() {
        return usage(flag, format!("expected {} coefficients, got {}", sig.algebra_dim(), c.len()));
    }
    algebra_element(sig, &c).try_exp().map_err(|e| Usage(format!("invalid value for {flag}: {e}")))
}

fn product_point(flag: &str, s: &str, sig: Signature) -> Result<ProductSpherePoint, Usage> {
    let c = parse_list(flag, s)?;
    if c.len() != sig.n() + 1 {
        return usage(flag, format!("expected {} coordinates, got {}", sig.n() + 1, c.len()));
    }
    let (v, w) = c.split_at(sig.p() + 1);
    ProductSpherePoint::new(v.to_vec(), w.to_vec()).map_err(|e| Usage(format!("invalid value for {flag}: {e}")))
}

/// Runs the command line `argv` (program name first); `env_seed` is the raw
/// value of [`SEED_ENV`], which overrides `--seed`.
pub fn dispatch<I, T>(argv: I, env_seed: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let env_seed = match env_seed.map(|s| s.trim().parse::<u64>()) {
        None => None,
        Some(Ok(s)) => Some(s),
        Some(Err(_)) => {
            return Outcome::usage(format!("invalid value for {SEED_ENV}: '{}'", env_seed.unwrap_or_default()))
        }
    };
    match run(cli.command, env_seed) {
        Ok(out) => out,
        Err(Usage(msg)) => Outcome::usage(msg),
    }
}

fn run(command: Command, env_seed: Option<u64>) -> Result<Outcome, Usage> {
    match command {
        Command::Act { common, coeffs, point, space } => cmd_act(Setup::new(common, env_seed)?, &coeffs, &point, space),
        Command::Decompose { common, coeffs, f } => cmd_decompose(Setup::new(common, env_seed)?, &coeffs, f),
        Command::Flow { common, make, validate, invariants, conjugacy, target_n, target_a, lift } => {
            let s = Setup::new(common, env_seed)?;
            cmd_flow(s, make, FlowFlags { validate, invariants, conjugacy, target_n, target_a, lift })
        }
        Command::Verify { common, suite } => cmd_verify(Setup::new(common, env_seed)?, suite),
        Command::Tables { parabolic, table1, range } => cmd_tables(parabolic, table1, range),
        Command::Orbit { common, phi, point, space } => cmd_orbit(Setup::new(common, env_seed)?, phi, point, space),
    }
}

fn cmd_act(s: Setup, coeffs: &str, point: &str, space: Space) -> Result<Outcome, Usage> {
    let g = group_from("--coeffs", coeffs, s.sig)?;
    let mut config = s.config();
    config.insert("space".into(), to_json(&space));
    config.insert("coeffs".into(), vector_json(&parse_list("--coeffs", coeffs)?));
    config.insert("point".into(), vector_json(&parse_list("--point", point)?));
    let mut report = Report::new("act", Value::Object(config));
    match space {
        Space::Product => {
            let x = product_point("--point", point, s.sig)?;
            let pair = FlowFunctionPair::new(s.flow(FlowKind::BasicJ1)?);
            match act_product(&g, &x, &pair, &s.tol) {
                Ok(y) => {
                    let off = (norm(y.v()) - 1.0).abs().max((norm(y.w()) - 1.0).abs());
                    report.checks.push(Check::at_most("image on S^p × S^{q−1}", off, s.tol.algebraic));
                    report.put("image", vector_json(&y.embedding()));
                }
                Err(e) => report.fail(&e),
            }
        }
        Space::Sphere => {
            let c = parse_list("--point", point)?;
            if c.len() != s.sig.n() {
                return usage("--point", format!("expected {} coordinates, got {}", s.sig.n(), c.len()));
            }
            let y = SpherePoint::new(c).map_err(|e| Usage(format!("invalid value for --point: {e}")))?;
            let pair = FlowFunctionPair::new(s.flow(FlowKind::BasicJ1J2)?);
            match act_sphere(&g, &y, &pair, &s.tol) {
                Ok(z) => {
                    report.checks.push(Check::at_most(
                        "image on S^{p+q−1}",
                        (norm(z.coords()) - 1.0).abs(),
                        s.tol.algebraic,
                    ));
                    report.put("image", vector_json(z.coords()));
                }
                Err(e) => report.fail(&e),
            }
        }
        Space::Bundle => return usage("--space", "act supports product and sphere"),
    }
    Ok(report.finish())
}

fn cmd_decompose(s: Setup, coeffs: &str, f: f64) -> Result<Outcome, Usage> {
    let g = group_from("--coeffs", coeffs, s.sig)?;
    if !f.is_finite() {
        return usage("--f", "must be finite");
    }
    let mut config = s.config();
    config.insert("coeffs".into(), vector_json(&parse_list("--coeffs", coeffs)?));
    config.insert("f".into(), num(f));
    let mut report = Report::new("decompose", Value::Object(config));
    match decompose(&g, f, &s.tol) {
        Ok(d) => {
            report.checks.push(Check::at_most("‖k m(θ) u − g‖_F", d.reconstruction_residual(&g), s.tol.algebraic));
            report.checks.push(Check::at_least("runner-up margin", d.margin(), 10.0));
            report.put("theta", num(d.theta));
            report.put("k", matrix_json(d.k.matrix()));
            report.put("u", matrix_json(d.u.matrix()));
            report.put("gap", num(d.gap));
            report.put("branches", to_json(&d.branches));
        }
        Err(e) => report.fail(&e),
    }
    Ok(report.finish())
}

struct FlowFlags {
    validate: bool,
    invariants: bool,
    conjugacy: bool,
    target_n: Option<u32>,
    target_a: Option<f64>,
    lift: bool,
}

fn cmd_flow(s: Setup, kind: FlowKind, flags: FlowFlags) -> Result<Outcome, Usage> {
    let flow = s.flow(kind)?;
    let mut config = s.config();
    config.insert("kind".into(), Value::String(kind.name().into()));
    let mut report = Report::new("flow", Value::Object(config));
    report.checks.extend(flow.field_checks());
    report.put("zeros", vector_json(&flow.zeros()));
    if flags.validate {
        match FlowFunctionPair::new(flow).validate(24) {
            Ok(checks) => report.checks.extend(checks.into_iter().skip(flow.field_checks().len())),
            Err(e) => report.fail(&e),
        }
    }
    if flags.invariants {
        let jac = flow.jacobians();
        report.put("jacobians", vector_json(&jac));
        match flow.pv_global_invariant() {
            Ok(mu) => {
                report.put("mu_pv", num(mu));
                if kind == FlowKind::BasicJ1 {
                    let a = flow.a();
                    let closed = std::f64::consts::PI * a * flow.n() as f64 / (1.0 - a * a).sqrt();
                    report.checks.push(Check::at_most("μ_pv = π a n/√(1 − a²)", (mu - closed).abs(), 1e-6));
                }
            }
            Err(e) => report.fail(&e),
        }
    }
    if flags.conjugacy {
        let target_n = flags.target_n.unwrap_or(s.common.n);
        let target_a = flags.target_a.unwrap_or(s.common.a);
        let target = match make_flow(kind, target_n, target_a) {
            Ok(t) => t,
            Err(e) => return usage("--target-n/--target-a", e),
        };
        report.put("target", json!({ "n": target_n, "a": num(target_a) }));
        match conjugacy_map(flow, target) {
            Ok(ConjugacyOutcome::Conjugate(map)) => {
                report.checks.push(Check::at_most("conjugacy defect", map.defect, 1e-6));
                report.put("conjugate", Value::Bool(true));
            }
            Ok(ConjugacyOutcome::NotConjugate(cert)) => {
                report.put("conjugate", Value::Bool(false));
                report.put("certificate", json!({ "invariant": cert.invariant, "detail": cert.detail }));
            }
            Err(e) => report.fail(&e),
        }
    }
    if flags.lift {
        let defect =
            ProjectiveLineFlow::projection_of(&flow).and_then(lift_double_cover).and_then(|l| l.covering_defect(32));
        match defect {
            Ok(d) => report.checks.push(Check::at_most("covering defect", d, 1e-8)),
            Err(e) => report.fail(&e),
        }
    }
    Ok(report.finish())
}

fn cmd_verify(s: Setup, suite: Suite) -> Result<Outcome, Usage> {
    let mut config = s.config();
    config.insert("suite".into(), Value::String(suite.name().into()));
    let mut report = Report::new("verify", Value::Object(config));
    let cfg =
        SuiteConfig { tol: s.tol, ..SuiteConfig::new(s.sig, s.common.n, s.common.a, s.common.seed, s.common.samples) };
    match run_suite(suite, &cfg) {
        Ok(checks) => report.checks = checks,
        Err(e) => report.fail(&e),
    }
    report.put("suite", Value::String(suite.name().into()));
    Ok(report.finish())
}

fn cmd_tables(parabolic: bool, table1: bool, (lo, hi): (u32, u32)) -> Result<Outcome, Usage> {
    if !parabolic && !table1 {
        return Err(Usage("one of --parabolic or --table1 is required".into()));
    }
    let config = json!({ "parabolic": parabolic, "table1": table1, "range": [lo, hi] });
    let mut report = Report::new("tables", config);
    if parabolic {
        let mut rows = Vec::new();
        let (mut disagree, mut codim_off, mut partition_off) = (0, 0, 0);
        for p in lo..=hi {
            for q in lo.max(3)..=p {
                for kind in [ParabolicKind::NullLine, ParabolicKind::MaxIsotropic] {
                    let d = parabolic_dims(kind, p, q).map_err(|e| Usage(format!("invalid value for --range: {e}")))?;
                    disagree += usize::from(!d.agrees());
                    if kind == ParabolicKind::NullLine && d.codim != (p + q - 2) as u64 {
                        codim_off += 1;
                    }
                    rows.push(to_json(&d));
                }
                let (lhs, rhs) = root_partition(p, q);
                partition_off += usize::from(lhs != rhs);
            }
        }
        report.checks.push(Check::equals("closed form ≠ root count", disagree as f64, 0.0));
        report.checks.push(Check::equals("null-line codim ≠ p+q−2", codim_off as f64, 0.0));
        report.checks.push(Check::equals("root partition mismatches", partition_off as f64, 0.0));
        report.put("parabolic", Value::Array(rows));
    }
    if table1 {
        let rows = table1_evaluated(lo..=hi);
        let off = rows.iter().filter(|r| !r.matches_printed()).count();
        report.checks.push(Check::equals("table rows differing from printed values", off as f64, 0.0));
        report.put("table1", to_json(&rows));
    }
    Ok(report.finish())
}

fn cmd_orbit(s: Setup, phi: Option<f64>, point: Option<String>, space: Space) -> Result<Outcome, Usage> {
    let mut config = s.config();
    config.insert("space".into(), to_json(&space));
    let phi_value = phi.unwrap_or(FRAC_PI_2);
    if !phi_value.is_finite() {
        return usage("--phi", "must be finite");
    }
    let so_dim = s.sig.algebra_dim();
    let result = match space {
        Space::Product => {
            let x = match &point {
                Some(text) => {
                    config.insert("point".into(), vector_json(&parse_list("--point", text)?));
                    product_point("--point", text, s.sig)?
                }
                None => {
                    config.insert("phi".into(), num(phi_value));
                    ProductSpherePoint::slice(s.sig, phi_value)
                }
            };
            let action = BasicConstruction::new(s.sig, FlowFunctionPair::new(s.flow(FlowKind::BasicJ1)?), s.tol)
                .map_err(|e| Usage(e.to_string()))?;
            classify_orbit(&action, &x, &s.tol)
        }
        Space::Bundle => {
            if point.is_some() {
                return usage("--point", "bundle points are given by --phi");
            }
            config.insert("phi".into(), num(phi_value));
            let action =
                BundleAction::new(s.sig, s.flow(FlowKind::BasicJ1)?, s.tol).map_err(|e| Usage(e.to_string()))?;
            action.point(GroupElement::identity(s.sig), phi_value).and_then(|x| classify_orbit(&action, &x, &s.tol))
        }
        Space::Sphere => return usage("--space", "orbit supports product and bundle"),
    };
    let mut report = Report::new("orbit", Value::Object(config));
    match result {
        Ok(r) => {
            report.checks.push(Check::equals(
                "dimension + isotropy",
                (r.dimension + r.isotropy_dim) as f64,
                so_dim as f64,
            ));
            report.checks.push(Check::at_least("singular value gap", r.gap, 10.0));
            let mut orbit = to_json(&r);
            orbit["gap"] = num(r.gap);
            report.put("orbit", orbit);
        }
        Err(e) => report.fail(&e),
    }
    Ok(report.finish())
}
