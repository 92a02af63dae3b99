//! One function per experiment. Each returns a report and the plot-ready
//! tables it produced.

use heatlab_core::{
    one_d_beta_derivative, parabolic_limit, ray_limit, sandwich_check, strong_derivative, symmetric_derivative,
    two_ray_test, uniform_ratio_error, BallFamily, BetaReport, DerivativeReport, HeatField, Measure, ParabolicRay,
    ParabolicRegion, Point, Primitive, RegionLimitReport, Settings, SpaceTimePoint, TestFunction, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog;
use crate::config::ExperimentKind;
use crate::error::LabResult;
use crate::report::{limit_summary, status_label, verdict_label, ReportBuilder, VerificationReport};

/// Rows of numbers with a fixed header, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub reports: Vec<VerificationReport>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn push(&mut self, (report, tables): (VerificationReport, Vec<Table>)) {
        self.reports.push(report);
        self.tables.extend(tables);
    }

    pub fn extend(&mut self, other: Outcome) {
        self.reports.extend(other.reports);
        self.tables.extend(other.tables);
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }
}

pub type Run = (VerificationReport, Vec<Table>);

/// Tolerance of the counterexample assertions.
pub const COUNTEREXAMPLE_TOL: f64 = 1e-6;
/// Bound on dilation and translation residuals.
pub const IDENTITY_BOUND: f64 = 2e-8;
/// Evaluation tolerance on each side of the dilation and translation identities.
const IDENTITY_EVAL_TOL: f64 = 1e-9;
/// Times at which the uniform ratio error of the standard bump must decrease.
pub const RATIO_TIMES: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

pub fn fmt_point(p: &Point) -> String {
    if p.dim() == 1 {
        format!("{}", p.get(0))
    } else {
        let c: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        format!("({})", c.join(", "))
    }
}

fn strong_of(mu: &Measure, x0: &Point, s: &Settings) -> LabResult<DerivativeReport> {
    Ok(strong_derivative(mu, x0, &BallFamily::default_for(mu.dim())?, s)?)
}

pub fn derivative_summary(d: &DerivativeReport) -> Value {
    let balls: Vec<Value> = d
        .strong
        .iter()
        .map(|b| {
            json!({
                "center": b.ball.center,
                "radius": b.ball.radius,
                "limit": limit_summary(&b.limit),
            })
        })
        .collect();
    json!({
        "verdict": verdict_label(&d.verdict),
        "value": d.value,
        "spread": d.spread,
        "symmetric": limit_summary(&d.symmetric),
        "balls": balls,
        "note": d.note,
    })
}

fn region_summary(r: &RegionLimitReport) -> Value {
    let last = r.slices.last();
    json!({
        "aperture": r.region.aperture,
        "limit": limit_summary(&r.limit),
        "last_slice": last,
        "note": r.note,
    })
}

fn slice_table(name: &str, r: &RegionLimitReport) -> Table {
    Table {
        file: format!("{name}_slices_alpha_{}.csv", r.region.aperture),
        header: vec!["t_k".into(), "slice_inf".into(), "slice_sup".into()],
        rows: r.slices.iter().map(|s| vec![s.t, s.inf, s.sup]).collect(),
    }
}

fn ray_table(name: &str, tag: &str, samples: &[(f64, f64)]) -> Table {
    Table {
        file: format!("{name}_ray_{tag}.csv"),
        header: vec!["t_k".into(), "value".into()],
        rows: samples.iter().map(|&(t, v)| vec![t, v]).collect(),
    }
}

fn inputs(label: &str, mu: &Measure, x0: Option<&Point>, extra: Value) -> Value {
    let mut v = json!({ "measure": label, "definition": mu });
    if let Some(x0) = x0 {
        v["x0"] = json!(x0);
    }
    if let Value::Object(m) = extra {
        for (k, e) in m {
            v[k] = e;
        }
    }
    v
}

/// The value of `Wμ` when it is constant, i.e. for a multiple of Lebesgue
/// measure.
fn constant_field(mu: &Measure) -> Option<f64> {
    let mut level = 0.0;
    for t in mu.terms() {
        match (&t.primitive, t.window.is_empty()) {
            (Primitive::Lebesgue { level: l }, true) => level += l,
            _ => return None,
        }
    }
    Some(level)
}

/// `Wμ` on a list of space-time points, with certified errors.
pub fn run_eval_grid(name: &str, label: &str, mu: &Measure, points: &[SpaceTimePoint], s: &Settings) -> LabResult<Run> {
    let mut b = ReportBuilder::new(
        name,
        ExperimentKind::EvalGrid,
        inputs(label, mu, None, json!({ "points": points.len() })),
        s,
    );
    let field = HeatField::new(mu.clone(), s.tol_eval)?;
    let values = field.eval_grid(points)?;
    let max_err = values.iter().map(|e| e.error).fold(0.0, f64::max);
    b.check_at_most("largest certified error is within the evaluation tolerance", s.tol_eval, max_err);
    if let Some(level) = constant_field(mu) {
        let worst = values.iter().map(|e| (e.value - level).abs()).fold(0.0, f64::max);
        b.check_at_most(
            format!("a multiple of Lebesgue measure gives the constant field {level}"),
            s.tol_eval,
            worst,
        );
    }
    let lo = values.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    let hi = values.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
    b.evidence("min_value", json!(lo)).evidence("max_value", json!(hi));
    let n = mu.dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.extend(["t".to_string(), "value".to_string(), "certified_error".to_string()]);
    let rows = points
        .iter()
        .zip(&values)
        .map(|(p, e)| {
            let mut row = p.x.coords().to_vec();
            row.extend([p.t, e.value, e.error]);
            row
        })
        .collect();
    let table = Table {
        file: format!("{name}.csv"),
        header,
        rows,
    };
    Ok((b.finish(), vec![table]))
}

/// Maps a distribution-function report to a strong-derivative verdict and
/// compares the two.
fn beta_agreement(strong: &DerivativeReport, beta: &BetaReport, tol: f64) -> (Value, Value, bool) {
    let observed = beta.limit.converged_value();
    let expected = json!({ "verdict": verdict_label(&strong.verdict), "value": strong.value });
    let obs = json!({
        "verdict": if observed.is_some() { "exists" } else { "does_not_exist" },
        "status": status_label(beta.limit.status),
        "value": observed,
    });
    let passed = match (strong.verdict, observed) {
        (Verdict::Exists(a), Some(b)) => (a - b).abs() <= tol,
        (Verdict::DoesNotExist, None) => true,
        _ => false,
    };
    (expected, obs, passed)
}

/// Symmetric and strong derivatives at `x₀`, and in 1-D the derivative of
/// the distribution function.
pub fn run_derivative(name: &str, label: &str, mu: &Measure, x0: &Point, s: &Settings) -> LabResult<Run> {
    let mut b = ReportBuilder::new(name, ExperimentKind::Derivative, inputs(label, mu, Some(x0), json!({})), s);
    let strong = strong_of(mu, x0, s)?;
    b.evidence("strong_derivative", derivative_summary(&strong));
    if let Verdict::Exists(l) = strong.verdict {
        b.check_close(
            "symmetric derivative equals the strong derivative",
            l,
            strong.symmetric.converged_value(),
            s.tol_agree,
        );
    }
    if mu.dim() == 1 {
        let beta = one_d_beta_derivative(mu, x0.get(0), s)?;
        let (e, o, ok) = beta_agreement(&strong, &beta, s.tol_agree);
        b.check("distribution-function derivative matches the strong derivative", e, o, Some(s.tol_agree), ok);
        b.evidence(
            "distribution_function",
            json!({
                "right": limit_summary(&beta.right),
                "left": limit_summary(&beta.left),
                "limit": limit_summary(&beta.limit),
            }),
        );
    }
    b.note(strong.note.clone());
    Ok((b.finish(), Vec::new()))
}

/// Distribution-function derivative against the strong derivative over a
/// list of one-dimensional cases.
pub fn run_beta_sweep(name: &str, cases: &[(String, Measure, Point)], s: &Settings) -> LabResult<Run> {
    let mut b = ReportBuilder::new(
        name,
        ExperimentKind::Derivative,
        json!({ "cases": cases.iter().map(|c| json!({ "measure": c.0, "x0": c.2 })).collect::<Vec<_>>() }),
        s,
    );
    let results: Vec<(DerivativeReport, BetaReport)> = cases
        .par_iter()
        .map(|(_, mu, x0)| Ok((strong_of(mu, x0, s)?, one_d_beta_derivative(mu, x0.get(0), s)?)))
        .collect::<LabResult<_>>()?;
    let mut evidence = Vec::new();
    for ((label, _, x0), (strong, beta)) in cases.iter().zip(&results) {
        let (e, o, ok) = beta_agreement(strong, beta, s.tol_agree);
        b.check(
            format!("{label} at {}: distribution-function derivative matches the strong derivative", fmt_point(x0)),
            e,
            o,
            Some(s.tol_agree),
            ok,
        );
        evidence.push(json!({
            "measure": label,
            "x0": x0,
            "strong": derivative_summary(strong),
            "distribution_function": limit_summary(&beta.limit),
        }));
    }
    b.evidence("cases", json!(evidence));
    Ok((b.finish(), Vec::new()))
}

/// The limit along `t ↦ (x₀ + a√t, t)`, compared with the strong
/// derivative when that exists.
pub fn run_ray(name: &str, label: &str, mu: &Measure, ray: &ParabolicRay, s: &Settings) -> LabResult<Run> {
    let mut b = ReportBuilder::new(
        name,
        ExperimentKind::Ray,
        inputs(label, mu, Some(&ray.vertex), json!({ "direction": ray.direction })),
        s,
    );
    let lim = ray_limit(mu, ray, s)?;
    let strong = strong_of(mu, &ray.vertex, s)?;
    b.evidence("ray_limit", limit_summary(&lim));
    b.evidence("strong_derivative", derivative_summary(&strong));
    if let Verdict::Exists(l) = strong.verdict {
        b.check_close("ray limit equals the strong derivative", l, lim.converged_value(), s.tol_agree);
    } else {
        b.note("the strong derivative does not exist here, so no ray value is predicted");
    }
    let table = ray_table(name, &fmt_point(&ray.direction), &lim.samples);
    Ok((b.finish(), vec![table]))
}

/// Parabolic limits at several apertures. Checks that the limit exists
/// exactly when the strong derivative does, and that all apertures agree
/// once one converges.
pub fn run_parabolic_limit(name: &str, label: &str, mu: &Measure, x0: &Point, apertures: &[f64], s: &Settings) -> LabResult<Run> {
    let mut b = ReportBuilder::new(
        name,
        ExperimentKind::ParabolicLimit,
        inputs(label, mu, Some(x0), json!({ "apertures": apertures })),
        s,
    );
    let strong = strong_of(mu, x0, s)?;
    let limits: Vec<RegionLimitReport> = apertures
        .iter()
        .map(|&a| Ok(parabolic_limit(mu, &ParabolicRegion::new(*x0, a)?, s)?))
        .collect::<LabResult<_>>()?;
    let strong_exists = matches!(strong.verdict, Verdict::Exists(_));
    if strong.verdict != Verdict::Inconclusive {
        for r in &limits {
            b.check_label(
                format!("parabolic limit at aperture {} exists exactly when the strong derivative does", r.region.aperture),
                if strong_exists { "converged" } else { "not converged" },
                if r.limit.is_converged() { "converged" } else { "not converged" },
            );
        }
    }
    if let Some(first) = limits.iter().find(|r| r.limit.is_converged()) {
        let l = first.limit.value.expect("converged");
        for r in limits.iter().filter(|r| r.region.aperture != first.region.aperture) {
            b.check_close(
                format!(
                    "parabolic limit at aperture {} equals the limit at aperture {}",
                    r.region.aperture, first.region.aperture
                ),
                l,
                r.limit.converged_value(),
                s.tol_agree,
            );
        }
    }
    b.evidence("strong_derivative", derivative_summary(&strong));
    b.evidence("limits", json!(limits.iter().map(region_summary).collect::<Vec<_>>()));
    let tables = limits.iter().map(|r| slice_table(name, r)).collect();
    Ok((b.finish(), tables))
}

/// Whenever the strong derivative exists, the parabolic limit exists and
/// equals it at every aperture.
pub fn run_verify_forward(name: &str, label: &str, mu: &Measure, x0: &Point, apertures: &[f64], s: &Settings) -> LabResult<Run> {
    let mut b = ReportBuilder::new(
        name,
        ExperimentKind::VerifyForward,
        inputs(label, mu, Some(x0), json!({ "apertures": apertures })),
        s,
    );
    let strong = strong_of(mu, x0, s)?;
    b.evidence("strong_derivative", derivative_summary(&strong));
    let Verdict::Exists(l) = strong.verdict else {
        b.not_applicable(format!("strong derivative verdict is {}", verdict_label(&strong.verdict)));
        return Ok((b.finish(), Vec::new()));
    };
    let mut tables = Vec::new();
    let mut summaries = Vec::new();
    for &a in apertures {
        let r = parabolic_limit(mu, &ParabolicRegion::new(*x0, a)?, s)?;
        b.check_close(
            format!("parabolic limit at aperture {a} equals the strong derivative"),
            l,
            r.limit.converged_value(),
            s.tol_agree,
        );
        summaries.push(region_summary(&r));
        tables.push(slice_table(name, &r));
    }
    b.evidence("limits", json!(summaries));
    Ok((b.finish(), tables))
}

/// Whenever the parabolic limit exists at one aperture `η`, the strong
/// derivative exists with the same value, and so does the limit at every
/// other aperture.
pub fn run_verify_converse(name: &str, label: &str, mu: &Measure, x0: &Point, eta: f64, s: &Settings) -> LabResult<Run> {
    let mut b = ReportBuilder::new(
        name,
        ExperimentKind::VerifyConverse,
        inputs(label, mu, Some(x0), json!({ "eta": eta })),
        s,
    );
    let base = parabolic_limit(mu, &ParabolicRegion::new(*x0, eta)?, s)?;
    let mut summaries = vec![region_summary(&base)];
    let mut tables = vec![slice_table(name, &base)];
    let Some(l) = base.limit.converged_value() else {
        b.evidence("limits", json!(summaries));
        b.not_applicable(format!(
            "parabolic limit at aperture {eta} is {}",
            status_label(base.limit.status)
        ));
        return Ok((b.finish(), tables));
    };
    let strong = strong_of(mu, x0, s)?;
    b.check_label(
        format!("strong derivative exists given the limit at aperture {eta}"),
        "exists",
        verdict_label(&strong.verdict),
    );
    b.check_close(
        format!("strong derivative equals the limit at aperture {eta}"),
        l,
        strong.value,
        s.tol_agree,
    );
    for a in [eta / 4.0, 4.0 * eta, 16.0 * eta] {
        let r = parabolic_limit(mu, &ParabolicRegion::new(*x0, a)?, s)?;
        b.check_close(
            format!("parabolic limit at aperture {a} equals the limit at aperture {eta}"),
            l,
            r.limit.converged_value(),
            s.tol_agree,
        );
        summaries.push(region_summary(&r));
        tables.push(slice_table(name, &r));
    }
    b.evidence("strong_derivative", derivative_summary(&strong));
    b.evidence("limits", json!(summaries));
    Ok((b.finish(), tables))
}

fn two_ray_aperture(a1: f64, a2: f64) -> f64 {
    2.0 * (a1 * a1).max(a2 * a2).max(0.5)
}

/// Limits along two rays. Equal limits predict the strong derivative and
/// the full parabolic limit; different limits rule the parabolic limit out.
pub fn run_two_ray(
    name: &str,
    label: &str,
    mu: &Measure,
    x0: f64,
    (a1, a2): (f64, f64),
    expected_difference: Option<f64>,
    s: &Settings,
) -> LabResult<Run> {
    let vertex = Point::scalar(x0);
    let mut b = ReportBuilder::new(
        name,
        ExperimentKind::TwoRay,
        inputs(
            label,
            mu,
            Some(&vertex),
            json!({ "rays": [a1, a2], "expected_difference": expected_difference }),
        ),
        s,
    );
    let rep = two_ray_test(mu, x0, a1, a2, s)?;
    let alpha = two_ray_aperture(a1, a2);
    let full = parabolic_limit(mu, &ParabolicRegion::new(vertex, alpha)?, s)?;
    if let Some(e) = expected_difference {
        b.check_close("ray limits differ by the expected amount", e, rep.difference, s.tol_agree);
        if e > s.tol_agree {
            b.check_label("no limit is predicted", "none", if rep.predicted.is_some() { "some" } else { "none" });
        }
    }
    match rep.predicted {
        Some(l) => {
            let strong = strong_of(mu, &vertex, s)?;
            b.check_close("strong derivative equals the predicted limit", l, strong.value, s.tol_agree);
            b.check_close(
                format!("parabolic limit at aperture {alpha} equals the predicted limit"),
                l,
                full.limit.converged_value(),
                s.tol_agree,
            );
            b.evidence("strong_derivative", derivative_summary(&strong));
        }
        None if rep.difference.is_some_and(|d| d > s.tol_agree) => {
            b.check_label(
                format!("parabolic limit at aperture {alpha} does not exist when the rays disagree"),
                "not converged",
                if full.limit.is_converged() { "converged" } else { "not converged" },
            );
        }
        None => {
            b.note("a ray limit did not converge, so no comparison is made");
        }
    }
    b.evidence("first", limit_summary(&rep.first));
    b.evidence("second", limit_summary(&rep.second));
    b.evidence("difference", json!(rep.difference));
    b.evidence("predicted", json!(rep.predicted));
    b.evidence("parabolic", region_summary(&full));
    let tables = vec![
        ray_table(name, &a1.to_string(), &rep.first.samples),
        ray_table(name, &a2.to_string(), &rep.second.samples),
        slice_table(name, &full),
    ];
    Ok((b.finish(), tables))
}

/// `c_n M_HL(μ)(x₀) ≤ sup_t Wμ(x₀, t) ≤ sup_{P(x₀,α)} Wμ` over a list of
/// cases. Unbounded cases must be unbounded in all three quantities.
pub fn run_sandwich(name: &str, cases: &[(String, Measure, Point)], alpha: f64, s: &Settings) -> LabResult<Run> {
    let mut b = ReportBuilder::new(
        name,
        ExperimentKind::Sandwich,
        json!({
            "alpha": alpha,
            "cases": cases.iter().map(|c| json!({ "measure": c.0, "x0": c.2 })).collect::<Vec<_>>(),
        }),
        s,
    );
    let results: Vec<_> = cases
        .par_iter()
        .map(|(_, mu, x0)| sandwich_check(mu, x0, alpha, s))
        .collect::<heatlab_core::Result<_>>()?;
    let mut evidence = Vec::new();
    for ((label, _, x0), r) in cases.iter().zip(&results) {
        let at = format!("{label} at {}", fmt_point(x0));
        match (r.hl.value, r.parabolic.radial.value, r.parabolic.region.value) {
            (Some(m), Some(radial), Some(region)) => {
                b.check(
                    format!("{at}: c_n times the maximal function is at most the radial supremum"),
                    json!({ "at_most": radial + s.tol_max }),
                    json!(r.c_n * m),
                    Some(s.tol_max),
                    r.first_holds,
                );
                b.check(
                    format!("{at}: radial supremum is at most the region supremum"),
                    json!({ "at_most": region }),
                    json!(radial),
                    None,
                    r.second_holds,
                );
            }
            _ => {
                b.check(
                    format!("{at}: maximal function and both suprema are unbounded together"),
                    json!([true, true, true]),
                    json!([r.hl.unbounded, r.parabolic.radial.unbounded, r.parabolic.region.unbounded]),
                    None,
                    r.consistent,
                );
            }
        }
        evidence.push(json!({
            "measure": label,
            "x0": x0,
            "c_n": r.c_n,
            "maximal": r.hl.value,
            "maximal_radius": r.hl.argmax,
            "radial_sup": r.parabolic.radial.value,
            "region_sup": r.parabolic.region.value,
            "unbounded": r.hl.unbounded,
            "empirical_ratio": r.empirical_ratio,
        }));
    }
    b.evidence("cases", json!(evidence));
    Ok((b.finish(), Vec::new()))
}

/// `½ (1 + erf(a/2))`, the limit of `W(χ_[0,1] dm)(a√t, t)` as `t → 0`.
pub fn box_ray_oracle(a: f64) -> f64 {
    0.5 * (1.0 + heatlab_core::special::erf(0.5 * a))
}

/// `χ_[0,1] dm` at `0`: the symmetric derivative exists, the strong
/// derivative and the parabolic limit do not, and ray limits depend on the
/// ray.
pub fn run_counterexample(s: &Settings) -> LabResult<Run> {
    let tol = COUNTEREXAMPLE_TOL;
    let mu = catalog::measure("box_unit")?;
    let x0 = Point::scalar(0.0);
    let rays = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let apertures = [1.0, 4.0];
    let mut b = ReportBuilder::new(
        "counterexample",
        ExperimentKind::Counterexample,
        inputs("box_unit", &mu, Some(&x0), json!({ "rays": rays, "apertures": apertures })),
        s,
    );
    let sym = symmetric_derivative(&mu, &x0, s)?;
    b.check_close("symmetric derivative at 0 equals 1/2", 0.5, sym.converged_value(), tol);
    let strong = strong_of(&mu, &x0, s)?;
    b.check_label("strong derivative at 0 does not exist", "does_not_exist", verdict_label(&strong.verdict));
    for (centre, expected) in [(1.0, 1.0), (-1.0, 0.0)] {
        let witness = strong
            .strong
            .iter()
            .find(|bl| bl.ball.center.get(0) == centre && bl.ball.radius == 0.5)
            .map(|bl| bl.limit.converged_value());
        b.check_close(
            format!("quotient over r·B({centre}, 1/2) tends to {expected}"),
            expected,
            witness.flatten(),
            tol,
        );
    }
    let mut tables = Vec::new();
    let mut ray_evidence = Vec::new();
    for a in rays {
        let lim = ray_limit(&mu, &ParabolicRay::scalar(0.0, a), s)?;
        b.check_close(
            format!("ray limit with a = {a} equals (1 + erf(a/2))/2"),
            box_ray_oracle(a),
            lim.converged_value(),
            tol,
        );
        ray_evidence.push(json!({ "a": a, "limit": limit_summary(&lim) }));
        tables.push(ray_table("counterexample", &a.to_string(), &lim.samples));
    }
    let mut region_evidence = Vec::new();
    for a in apertures {
        let r = parabolic_limit(&mu, &ParabolicRegion::new(x0, a)?, s)?;
        b.check_label(
            format!("parabolic limit at aperture {a} does not converge"),
            "non_convergent",
            status_label(r.limit.status),
        );
        region_evidence.push(region_summary(&r));
        tables.push(slice_table("counterexample", &r));
    }
    b.evidence("strong_derivative", derivative_summary(&strong));
    b.evidence("rays", json!(ray_evidence));
    b.evidence("limits", json!(region_evidence));
    Ok((b.finish(), tables))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Draw {
    measure: &'static str,
    r: f64,
    shift: Vec<f64>,
    x: Vec<f64>,
    t: f64,
    /// Test function and time for the duality identity (1-D only).
    duality: Option<(TestFunction, f64)>,
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn draw(rng: &mut ChaCha8Rng) -> Draw {
    let name = catalog::NAMES[rng.random_range(0..catalog::NAMES.len())];
    let dim = catalog::measure(name).expect("catalog entry").dim();
    let r = uniform(rng, 0.25f64.ln(), 4.0f64.ln()).exp();
    let shift = (0..dim).map(|_| uniform(rng, -1.5, 1.5)).collect();
    let x = (0..dim).map(|_| uniform(rng, -2.0, 2.0)).collect();
    let t = uniform(rng, 0.05, 2.0);
    let duality = (dim == 1).then(|| {
        let f = if rng.random_bool(0.5) {
            TestFunction::Triangle {
                center: uniform(rng, -1.0, 1.0),
                half_width: uniform(rng, 0.2, 1.5),
                height: uniform(rng, 0.5, 2.0),
            }
        } else {
            TestFunction::RadialBump {
                center: Point::scalar(uniform(rng, -1.0, 1.0)),
                radius: uniform(rng, 0.3, 1.5),
                power: rng.random_range(2..=4),
                height: uniform(rng, 0.5, 2.0),
            }
        };
        (f, uniform(rng, 0.01, 1.0))
    });
    Draw {
        measure: name,
        r,
        shift,
        x,
        t,
        duality,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Residuals {
    dilation: f64,
    translation: f64,
    duality: Option<f64>,
}

fn residuals(d: &Draw, s: &Settings) -> LabResult<Residuals> {
    let mu = catalog::measure(d.measure)?;
    let p = SpaceTimePoint::new(Point::new(&d.x)?, d.t)?;
    let dilation = heatlab_core::heat::gw_field_dilate_check(&mu, d.r, &p, IDENTITY_EVAL_TOL)?;
    let translation = heatlab_core::heat::translation_check(&mu, &Point::new(&d.shift)?, &p, IDENTITY_EVAL_TOL)?;
    let duality = match &d.duality {
        Some((f, t)) => Some(heatlab_core::duality_check(f, &mu, *t, 0.5 * s.tol_dual)?.residual),
        None => None,
    };
    Ok(Residuals {
        dilation,
        translation,
        duality,
    })
}

/// Dilation, translation and duality identities over seeded random draws
/// from the catalog, and the decay of the uniform ratio error of the
/// standard bump.
pub fn run_identities(seed: u64, draws: usize, s: &Settings) -> LabResult<Run> {
    let mut b = ReportBuilder::new(
        "identities",
        ExperimentKind::Identities,
        json!({ "draws": draws, "ratio_times": RATIO_TIMES }),
        s,
    );
    b.seed(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let list: Vec<Draw> = (0..draws).map(|_| draw(&mut rng)).collect();
    let res: Vec<Residuals> = list.par_iter().map(|d| residuals(d, s)).collect::<LabResult<_>>()?;
    let max_of = |f: &dyn Fn(&Residuals) -> Option<f64>| res.iter().filter_map(f).fold(0.0, f64::max);
    let dil = max_of(&|r| Some(r.dilation));
    let tr = max_of(&|r| Some(r.translation));
    let du = max_of(&|r| r.duality);
    b.check_at_most("largest dilation residual", IDENTITY_BOUND, dil);
    b.check_at_most("largest translation residual", IDENTITY_BOUND, tr);
    b.check_at_most("largest duality residual", s.tol_dual, du);
    let bump = TestFunction::standard_bump();
    let ratios = RATIO_TIMES
        .iter()
        .map(|&t| uniform_ratio_error(&bump, t))
        .collect::<heatlab_core::Result<Vec<_>>>()?;
    for (t, r) in RATIO_TIMES.iter().zip(&ratios) {
        b.check_label(format!("uniform ratio error at t = {t} is certified"), "certified", if r.certified { "certified" } else { "uncertified" });
    }
    for i in 1..ratios.len() {
        let (prev, cur) = (ratios[i - 1].value, ratios[i].value);
        b.check(
            format!("uniform ratio error at t = {} is below its value at t = {}", RATIO_TIMES[i], RATIO_TIMES[i - 1]),
            json!({ "below": prev }),
            json!(cur),
            None,
            cur < prev,
        );
    }
    let per_draw: Vec<Value> = list
        .iter()
        .zip(&res)
        .map(|(d, r)| json!({ "draw": d, "residuals": r }))
        .collect();
    b.evidence("max_dilation", json!(dil));
    b.evidence("max_translation", json!(tr));
    b.evidence("max_duality", json!(du));
    b.evidence("uniform_ratio", json!(ratios));
    b.evidence("draws", json!(per_draw));
    Ok((b.finish(), Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_seeded() {
        let a: Vec<Draw> = {
            let mut r = ChaCha8Rng::seed_from_u64(3);
            (0..5).map(|_| draw(&mut r)).collect()
        };
        let b: Vec<Draw> = {
            let mut r = ChaCha8Rng::seed_from_u64(3);
            (0..5).map(|_| draw(&mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn two_ray_aperture_contains_both_rays() {
        let a = two_ray_aperture(1.0, -1.5);
        assert!(ParabolicRay::scalar(0.0, 1.0).lies_in(&ParabolicRegion::new(Point::scalar(0.0), a).unwrap()));
        assert!(ParabolicRay::scalar(0.0, -1.5).lies_in(&ParabolicRegion::new(Point::scalar(0.0), a).unwrap()));
    }

    #[test]
    fn constant_field_detection() {
        assert_eq!(constant_field(&Measure::lebesgue(2).unwrap()), Some(1.0));
        assert_eq!(constant_field(&catalog::measure("mixture").unwrap()), None);
    }
}
