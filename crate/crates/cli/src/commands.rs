use hypmass::asymptotics::{default_radii, verify_ah, AhOptions};
use hypmass::fit::log_ladder;
use hypmass::mass::{mass_vector, prop27_check, schwarzschild_mass, FluxBackground, FluxOptions};
use hypmass::ode::{
    build_decaying_solution, classify_growth, fundamental_pair, lemma_suite, particular_solution,
    seed_fan, Coefficient, GeodesicOptions, GrowthBands, GrowthLabel, OdeProblem, RemainderFit, Seed,
};
use hypmass::operators::{
    conformal_deform_radial, duality_residual, first_variation_check, radial_eigenfunction, random_pairs,
    DeformOptions, PotentialField, RadialOptions, RadialTarget, DEFAULT_EPSILONS,
};
use hypmass::quadrature::angular_grid;
use hypmass::rigidity::{
    divergence_form_check, sectional_ode_check, wang_identity_check, warped_fixture, SinhPotential, WarpBase,
    WarpedMetric,
};
use hypmass::{
    curvature_at, AnnulusQuadrature, Error, Family, Metric, MetricSpec, ScalarField, SchwarzschildLapse, SphereQuadrature,
    StaticPotential,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{parse_params, Command, Numeric, Validated};
use crate::report::{Check, Table};
use crate::CliError;

/// What a command produced, with its numeric settings and parameters resolved.
pub struct Outcome {
    pub numeric: Numeric,
    pub params: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

fn core<T>(r: hypmass::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        Error::InvalidParameter(_) | Error::Dimension(_) | Error::Unsupported(_) | Error::Quadrature(_) => {
            CliError::Schema(e.to_string())
        }
        e => CliError::Numerical(e.to_string()),
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn sphere(order: usize) -> Result<SphereQuadrature, CliError> {
    core(SphereQuadrature::new(order, 2 * order))
}

fn metric(cfg: &Validated) -> &MetricSpec {
    cfg.metric.as_ref().expect("validated configs carry a metric")
}

fn need_three(g: &MetricSpec, what: &str) -> Result<(), CliError> {
    if g.n != 3 {
        return Err(CliError::Schema(format!("{what} is implemented for n = 3")));
    }
    Ok(())
}

pub fn run_command(cfg: &Validated) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Mass => mass(cfg),
        Command::Curvature => curvature(cfg),
        Command::VerifyAh => verify(cfg),
        Command::DualityCheck => duality(cfg),
        Command::Eigenfunction => eigenfunction(cfg),
        Command::Deform => deform(cfg),
        Command::FirstVariation => first_variation(cfg),
        Command::OdeVerify => ode_verify(cfg),
        Command::Dichotomy => dichotomy(cfg),
        Command::RigidityCheck => rigidity(cfg),
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MassParams {
    #[serde(default)]
    background: FluxBackground,
}

fn mass(cfg: &Validated) -> Result<Outcome, CliError> {
    let g = metric(cfg);
    let p: MassParams = parse_params(&cfg.params)?;
    let numeric = Numeric {
        radii: Some(cfg.numeric.radii.clone().unwrap_or_else(|| log_ladder(20.0, 400.0, 8))),
        quad_order: Some(cfg.numeric.quad_order.unwrap_or(24)),
        tol: Some(cfg.numeric.tol.unwrap_or(1e-2)),
        ..Numeric::default()
    };
    let radii = numeric.radii.clone().unwrap();
    let tol = numeric.tol.unwrap();
    let opts = FluxOptions {
        quadrature: sphere(numeric.quad_order.unwrap())?,
        background: p.background,
    };
    let mv = core(mass_vector(g, &radii, &opts))?;
    // gaps are taken relative to at least the flux of unit mass, so vanishing
    // sides compare at the rounding level of the curvature at the outer radii
    let unit = schwarzschild_mass(g.n, 1.0);
    let ricci = core(prop27_check(g, &StaticPotential::lapse(g.n), &radii, &opts, tol, tol * unit))?;

    let mut checks = Vec::new();
    let spatial = mv.p[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match g.family {
        Family::Hyperbolic => {
            let all = mv.p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            checks.push(Check::at_most("mass_vector_max_abs", all, 1e-12));
        }
        Family::SchwarzschildAds { m } => {
            let oracle = schwarzschild_mass(g.n, m);
            let rel = if oracle != 0.0 { (mv.p[0] - oracle).abs() / oracle } else { mv.p[0].abs() };
            checks.push(Check::at_most("p0_relative_error", rel, tol));
            checks.push(Check::at_most("spatial_mass_max_abs", spatial, 1e-4));
        }
        _ => {}
    }
    let scale = ricci.lhs.abs().max(ricci.rhs.abs()).max(unit);
    checks.push(Check::at_most("ricci_flux_relative_gap", ricci.gap / scale, tol));

    let mut header = vec!["r".to_string()];
    header.extend((0..=g.n).map(|k| format!("I_{k}")));
    let mut table = Table {
        name: "mass".into(),
        header,
        rows: Vec::new(),
    };
    for (i, r) in radii.iter().enumerate() {
        let mut row = vec![*r];
        row.extend(mv.reports.iter().map(|rep| rep.values[i]));
        table.push(row);
    }
    let mut flux = Table::new("ricci_flux", &["r", "ricci", "mass"]);
    for (i, r) in radii.iter().enumerate() {
        flux.push(vec![*r, ricci.ricci.values[i], ricci.mass.values[i]]);
    }
    Ok(Outcome {
        numeric,
        params: to_value(&p),
        results: json!({ "mass_vector": mv, "ricci_flux": ricci }),
        checks,
        tables: vec![table, flux],
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurvatureParams {
    /// Explicit chart points; otherwise the radii times an angular grid.
    #[serde(default)]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default = "three")]
    per_angle: usize,
}

fn three() -> usize {
    3
}

impl Default for CurvatureParams {
    fn default() -> Self {
        CurvatureParams {
            points: None,
            per_angle: 3,
        }
    }
}

fn curvature(cfg: &Validated) -> Result<Outcome, CliError> {
    let g = metric(cfg);
    let n = g.n;
    let p: CurvatureParams = parse_params(&cfg.params)?;
    let numeric = Numeric {
        radii: Some(cfg.numeric.radii.clone().unwrap_or_else(|| vec![1.0, 2.0, 5.0, 10.0, 20.0])),
        tol: Some(cfg.numeric.tol.unwrap_or(1e-8)),
        ..Numeric::default()
    };
    let points = match &p.points {
        Some(pts) => pts.clone(),
        None => {
            let grid = angular_grid(n, p.per_angle);
            let mut pts = Vec::new();
            for r in numeric.radii.as_ref().unwrap() {
                pts.extend(grid.iter().map(|w| w.iter().map(|c| c * r).collect::<Vec<_>>()));
            }
            pts
        }
    };
    let mut header: Vec<String> = (0..n).map(|k| format!("x_{k}")).collect();
    header.extend(["r", "scalar", "scalar_excess", "ricci_excess_norm"].map(String::from));
    let mut table = Table {
        name: "curvature".into(),
        header,
        rows: Vec::new(),
    };
    let model = -((n * (n - 1)) as f64);
    let mut worst = 0.0f64;
    let mut worst_ricci = 0.0f64;
    for x in &points {
        let pack = core(curvature_at(g, x))?;
        let excess = pack.geometry.norm(&pack.ricci_excess());
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max((pack.scalar - model).abs());
        worst_ricci = worst_ricci.max(excess);
        let mut row = x.clone();
        row.extend([r, pack.scalar, pack.scalar - model, excess]);
        table.push(row);
    }
    let mut checks = Vec::new();
    if g.family == Family::Hyperbolic {
        checks.push(Check::at_most("scalar_curvature_deviation", worst, numeric.tol.unwrap()));
        checks.push(Check::at_most("ricci_excess_norm", worst_ricci, numeric.tol.unwrap()));
    }
    Ok(Outcome {
        numeric,
        params: to_value(&p),
        results: json!({
            "points": points.len(),
            "max_scalar_deviation": worst,
            "max_ricci_excess_norm": worst_ricci,
        }),
        checks,
        tables: vec![table],
    })
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AhParams {
    #[serde(default)]
    q_claimed: Option<f64>,
    #[serde(default)]
    angular_points: Option<usize>,
    #[serde(default)]
    rate_slack: Option<f64>,
}

fn verify(cfg: &Validated) -> Result<Outcome, CliError> {
    let g = metric(cfg);
    let mut p: AhParams = parse_params(&cfg.params)?;
    let d = AhOptions::default();
    let q = *p.q_claimed.get_or_insert(g.n as f64 - 0.5);
    let opts = AhOptions {
        angular_points: *p.angular_points.get_or_insert(d.angular_points),
        zero_tolerance: cfg.numeric.tol.unwrap_or(d.zero_tolerance),
        rate_slack: *p.rate_slack.get_or_insert(d.rate_slack),
    };
    let numeric = Numeric {
        radii: Some(cfg.numeric.radii.clone().unwrap_or_else(default_radii)),
        tol: Some(opts.zero_tolerance),
        ..Numeric::default()
    };
    let rep = core(verify_ah(g, q, numeric.radii.as_ref().unwrap(), &opts))?;
    let mut checks = Vec::new();
    let mut table = Table::new("verify_ah", &["r"]);
    let mut by_radius: Vec<Vec<f64>> = numeric.radii.as_ref().unwrap().iter().map(|r| vec![*r]).collect();
    for c in &rep.conditions {
        // an exactly vanishing quantity decays at every rate
        checks.push(Check::flag(&c.name, c.estimate.exponent().unwrap_or(f64::INFINITY), c.required, c.pass));
        table.header.push(c.name.clone());
        for (row, s) in by_radius.iter_mut().zip(c.estimate.samples()) {
            row.push(s.1);
        }
    }
    for row in by_radius {
        if row.len() == table.header.len() {
            table.push(row);
        }
    }
    Ok(Outcome {
        numeric,
        params: to_value(&p),
        results: to_value(&rep),
        checks,
        tables: vec![table],
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DualityParams {
    #[serde(default = "fifty")]
    pairs: usize,
}

fn fifty() -> usize {
    50
}

impl Default for DualityParams {
    fn default() -> Self {
        DualityParams { pairs: 50 }
    }
}

fn duality(cfg: &Validated) -> Result<Outcome, CliError> {
    let g = metric(cfg);
    need_three(g, "duality-check")?;
    let p: DualityParams = parse_params(&cfg.params)?;
    let numeric = Numeric {
        quad_order: Some(cfg.numeric.quad_order.unwrap_or(16)),
        radial_order: Some(cfg.numeric.radial_order.unwrap_or(32)),
        tol: Some(cfg.numeric.tol.unwrap_or(1e-6)),
        seed: Some(cfg.numeric.seed.unwrap_or(0)),
        ..Numeric::default()
    };
    let sph = sphere(numeric.quad_order.unwrap())?;
    let mut table = Table::new("duality", &["pair", "inner", "outer", "lhs", "rhs", "scale", "residual"]);
    let mut worst = 0.0f64;
    for (k, pair) in random_pairs(3, p.pairs, numeric.seed.unwrap()).iter().enumerate() {
        let quad = core(AnnulusQuadrature::new(pair.h.inner, pair.h.outer, numeric.radial_order.unwrap(), sph))?;
        let rep = core(duality_residual(g, &pair.h, &pair.u, &quad))?;
        worst = worst.max(rep.residual);
        table.push(vec![k as f64, pair.h.inner, pair.h.outer, rep.lhs, rep.rhs, rep.scale, rep.residual]);
    }
    Ok(Outcome {
        checks: vec![Check::at_most("max_duality_residual", worst, numeric.tol.unwrap())],
        numeric,
        params: to_value(&p),
        results: json!({ "pairs": p.pairs, "max_residual": worst }),
        tables: vec![table],
    })
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EigenParams {
    #[serde(default)]
    r_min: Option<f64>,
    #[serde(default)]
    r_max: Option<f64>,
}

fn off_axis(n: usize, r: f64) -> Vec<f64> {
    vec![r / (n as f64).sqrt(); n]
}

fn eigenfunction(cfg: &Validated) -> Result<Outcome, CliError> {
    let g = metric(cfg);
    let mut p: EigenParams = parse_params(&cfg.params)?;
    let d = RadialOptions::default();
    let opts = RadialOptions {
        nodes: cfg.numeric.radial_order.unwrap_or(d.nodes),
        r_min: p.r_min,
        r_max: *p.r_max.get_or_insert(d.r_max),
    };
    let numeric = Numeric {
        radial_order: Some(opts.nodes),
        tol: Some(cfg.numeric.tol.unwrap_or(1e-7)),
        ..Numeric::default()
    };
    let rep = core(radial_eigenfunction(g, 0, &opts))?;
    let mut table = Table::new("eigenfunction", &["r", "f0", "sqrt_1_plus_r2"]);
    for r in log_ladder(rep.r_min * (1.0 + 1e-9), rep.r_max * (1.0 - 1e-9), 64) {
        let f = core(rep.potential.value(&off_axis(g.n, r)))?;
        table.push(vec![r, f, (1.0 + r * r).sqrt()]);
    }
    let checks = vec![
        Check::at_most("eigen_residual_max", rep.residual_max, numeric.tol.unwrap()),
        Check::at_most("shooting_difference", rep.shooting_difference, 1e-6),
        Check::at_least("min_value", rep.min_value, f64::MIN_POSITIVE),
    ];
    Ok(Outcome {
        numeric,
        params: to_value(&p),
        results: to_value(&rep),
        checks,
        tables: vec![table],
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeformParams {
    #[serde(default = "default_amplitude")]
    amplitude: f64,
    #[serde(default = "two")]
    decay: f64,
    #[serde(default = "three")]
    newton_steps: usize,
    #[serde(default = "default_contraction")]
    min_contraction: f64,
    /// Steps whose residual is already below this count as converged.
    #[serde(default = "default_floor")]
    residual_floor: f64,
}

fn default_floor() -> f64 {
    1e-9
}

fn default_amplitude() -> f64 {
    0.05
}

fn two() -> f64 {
    2.0
}

fn default_contraction() -> f64 {
    10.0
}

impl Default for DeformParams {
    fn default() -> Self {
        DeformParams {
            amplitude: default_amplitude(),
            decay: 2.0,
            newton_steps: 3,
            min_contraction: default_contraction(),
            residual_floor: default_floor(),
        }
    }
}

fn deform(cfg: &Validated) -> Result<Outcome, CliError> {
    let g = metric(cfg);
    let p: DeformParams = parse_params(&cfg.params)?;
    let d = DeformOptions::default();
    let opts = DeformOptions {
        radial: RadialOptions {
            nodes: cfg.numeric.radial_order.unwrap_or(d.radial.nodes),
            ..d.radial
        },
        newton_steps: p.newton_steps,
        ..d
    };
    let numeric = Numeric {
        radial_order: Some(opts.radial.nodes),
        tol: Some(cfg.numeric.tol.unwrap_or(1e-6)),
        ..Numeric::default()
    };
    let target = RadialTarget {
        amplitude: p.amplitude,
        decay: p.decay,
    };
    let rep = core(conformal_deform_radial(g, &target, &opts))?;
    let mut checks = vec![Check::at_most("linear_residual", rep.linear_residual, numeric.tol.unwrap())];
    for (k, s) in rep.newton.iter().enumerate() {
        let pass = s.contraction >= p.min_contraction || s.residual <= p.residual_floor;
        checks.push(Check::flag(&format!("newton_contraction_{}", k + 1), s.contraction, p.min_contraction, pass));
    }
    let mut table = Table::new("deform", &["r", "phi", "u", "u_newton"]);
    for r in log_ladder(rep.u.r_min() * (1.0 + 1e-9), rep.u.r_max() * (1.0 - 1e-9), 64) {
        let u = core(rep.u.at_radius(r))?;
        let un = core(rep.newton_u.at_radius(r))?;
        table.push(vec![r, target.at(r), u, un]);
    }
    Ok(Outcome {
        numeric,
        params: to_value(&p),
        results: json!({
            "target": rep.target,
            "target_decay": rep.target_decay,
            "linear_residual": rep.linear_residual,
            "halved_grid_difference": rep.halved_grid_difference,
            "u_decay": rep.u_decay,
            "initial_residual": rep.initial_residual,
            "newton": rep.newton,
        }),
        checks,
        tables: vec![table],
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FirstVariationParams {
    #[serde(default)]
    potential: Option<StaticPotential>,
    /// Weight of the random perturbation.
    #[serde(default = "tenth")]
    amplitude: f64,
    #[serde(default = "default_epsilons")]
    epsilons: Vec<f64>,
    #[serde(default = "min_order")]
    min_order: f64,
}

fn tenth() -> f64 {
    0.1
}

fn default_epsilons() -> Vec<f64> {
    DEFAULT_EPSILONS.to_vec()
}

fn min_order() -> f64 {
    0.9
}

impl Default for FirstVariationParams {
    fn default() -> Self {
        FirstVariationParams {
            potential: None,
            amplitude: tenth(),
            epsilons: default_epsilons(),
            min_order: min_order(),
        }
    }
}

fn first_variation(cfg: &Validated) -> Result<Outcome, CliError> {
    let g = metric(cfg);
    need_three(g, "first-variation")?;
    let mut p: FirstVariationParams = parse_params(&cfg.params)?;
    let numeric = Numeric {
        quad_order: Some(cfg.numeric.quad_order.unwrap_or(12)),
        radial_order: Some(cfg.numeric.radial_order.unwrap_or(16)),
        tol: Some(cfg.numeric.tol.unwrap_or(1e-3)),
        seed: Some(cfg.numeric.seed.unwrap_or(11)),
        ..Numeric::default()
    };
    let v = p.potential.get_or_insert_with(|| StaticPotential::lapse(3)).clone();
    if v.dim() != 3 {
        return Err(CliError::Schema("potential needs 3 linear coefficients".into()));
    }
    let f = PotentialField::from_static(v);
    let h = random_pairs(3, 1, numeric.seed.unwrap())[0].h.clone().weighted(p.amplitude);
    let rep = core(first_variation_check(
        g,
        &f,
        &h,
        &p.epsilons,
        numeric.radial_order.unwrap(),
        sphere(numeric.quad_order.unwrap())?,
    ))?;
    let extrapolation = if rep.scale > 0.0 { (rep.extrapolated - rep.expected).abs() / rep.scale } else { 0.0 };
    let exact = rep.order.is_none();
    let checks = vec![
        Check::flag(
            "first_variation_order",
            rep.order.unwrap_or(f64::INFINITY),
            p.min_order,
            exact || rep.order.unwrap() >= p.min_order,
        ),
        Check::at_most("extrapolation_relative_error", extrapolation, numeric.tol.unwrap()),
    ];
    let mut table = Table::new("first_variation", &["epsilon", "quotient", "error"]);
    for k in 0..rep.epsilons.len() {
        table.push(vec![rep.epsilons[k], rep.quotients[k], rep.errors[k]]);
    }
    Ok(Outcome {
        numeric,
        params: to_value(&p),
        results: json!({ "perturbation": h, "report": rep }),
        checks,
        tables: vec![table],
    })
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OdeParams {
    /// Defaults to `u'' = u`.
    #[serde(default)]
    problem: Option<OdeProblem>,
    /// Size of the additional randomized suite.
    #[serde(default)]
    random_cases: usize,
}

fn ode_verify(cfg: &Validated) -> Result<Outcome, CliError> {
    let mut p: OdeParams = parse_params(&cfg.params)?;
    let horizon = cfg
        .numeric
        .horizon
        .or(p.problem.as_ref().map(|q| q.horizon))
        .unwrap_or(20.0);
    let numeric = Numeric {
        horizon: Some(horizon),
        tol: Some(cfg.numeric.tol.unwrap_or(0.1)),
        seed: Some(cfg.numeric.seed.unwrap_or(0)),
        ..Numeric::default()
    };
    let prob = p.problem.get_or_insert_with(|| OdeProblem::model(horizon));
    prob.horizon = horizon;
    let prob = prob.clone();
    core(prob.check_bounds())?;
    let pair = core(fundamental_pair(&prob))?;
    let half = core(fundamental_pair(&prob.with_horizon(horizon / 2.0)))?;
    let homogeneous = OdeProblem {
        f: Coefficient::zero(),
        ..prob.clone()
    };
    let dec = core(build_decaying_solution(&homogeneous))?;
    let ratio = pair.certificate / half.certificate;
    let bound = -2.0 / (pair.certificate * pair.certificate);
    let margin = pair.wronskian.iter().fold(f64::NEG_INFINITY, |m, w| m.max(w - bound));
    let decaying_ok = dec.monotone
        && dec.solution.u.iter().all(|u| *u > 0.0)
        && dec.solution.du.iter().all(|d| *d < 0.0);
    let mut checks = vec![
        Check::flag("wronskian_bound_margin", margin, hypmass::ode::problem::WRONSKIAN_SLACK, pair.wronskian_bound_holds),
        Check::flag("certificate_horizon_ratio", ratio, 2.0, (0.5..=2.0).contains(&ratio)),
        Check::flag("decaying_solution", *dec.solution.u.last().unwrap(), 0.0, decaying_ok),
    ];
    let mut results = json!({
        "certificate": pair.certificate,
        "certificate_half_horizon": half.certificate,
        "certificate_ratio": ratio,
        "wronskian_bound_holds": pair.wronskian_bound_holds,
        "exhaustion_j": pair.exhaustion_j,
        "decaying_monotone": dec.monotone,
    });
    let tol = numeric.tol.unwrap();
    if !prob.f.is_zero() {
        let ps = core(particular_solution(&prob))?;
        match ps.fit {
            RemainderFit::Exponential { relative_error, .. } => {
                checks.push(Check::at_most("remainder_exponent_relative_error", relative_error, tol))
            }
            RemainderFit::LinearTimesExp { residual, .. } => {
                checks.push(Check::at_most("remainder_profile_residual", residual, 0.05))
            }
            RemainderFit::Zero => {}
        }
        results["particular"] = json!({ "c1": ps.c1, "c2": ps.c2, "fit": ps.fit });
    }
    let mut tables = Vec::new();
    let mut t = Table::new("ode", &["t", "u1", "u2", "wronskian"]);
    for k in 0..pair.t.len() {
        t.push(vec![pair.t[k], pair.u1[k], pair.u2[k], pair.wronskian[k]]);
    }
    tables.push(t);
    if p.random_cases > 0 {
        let suite = core(lemma_suite(p.random_cases, numeric.seed.unwrap(), horizon))?;
        checks.extend([
            Check::at_most("suite_max_sign_changes", suite.max_sign_changes as f64, 1.0),
            Check::at_most("suite_comparison_failures", suite.comparison_failures as f64, 0.0),
            Check::at_most("suite_decaying_failures", suite.decaying_failures as f64, 0.0),
            Check::at_most("suite_wronskian_failures", suite.wronskian_failures as f64, 0.0),
            Check::flag(
                "suite_certificate_ratio_max",
                suite.certificate_ratio.1,
                2.0,
                suite.certificate_ratio.0 >= 0.5 && suite.certificate_ratio.1 <= 2.0,
            ),
            Check::at_most("suite_remainder_exponent_error", suite.worst_exponent_error, tol),
            Check::at_most("suite_resonant_profile_residual", suite.worst_resonant_residual, 0.05),
        ]);
        let mut lt = Table::new(
            "ode_suite",
            &["case", "d", "sign_changes", "comparison", "decaying", "certificate", "certificate_ratio", "remainder_metric"],
        );
        for c in &suite.cases {
            let metric = match c.remainder {
                RemainderFit::Exponential { relative_error, .. } => relative_error,
                RemainderFit::LinearTimesExp { residual, .. } => residual,
                RemainderFit::Zero => 0.0,
            };
            lt.push(vec![
                c.index as f64,
                c.perturbed.bounds.d,
                c.sign_changes as f64,
                c.comparison_holds as u8 as f64,
                c.decaying_ok as u8 as f64,
                c.certificate,
                c.certificate_ratio(),
                metric,
            ]);
        }
        tables.push(lt);
        results["suite"] = json!({
            "cases": p.random_cases,
            "max_sign_changes": suite.max_sign_changes,
            "comparison_failures": suite.comparison_failures,
            "decaying_failures": suite.decaying_failures,
            "wronskian_failures": suite.wronskian_failures,
            "max_certificate": suite.max_certificate,
            "certificate_ratio": suite.certificate_ratio,
            "worst_exponent_error": suite.worst_exponent_error,
            "worst_resonant_residual": suite.worst_resonant_residual,
            "resonant_cases": suite.resonant_cases,
        });
    }
    Ok(Outcome {
        numeric,
        params: to_value(&p),
        results,
        checks,
        tables,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SeedSpec {
    /// Outward radial seeds over a fan of directions.
    Fan { count: usize, radius: f64 },
    /// One outward seed on the positive `axis` (zero-based).
    Axis { axis: usize, radius: f64 },
    Explicit { seeds: Vec<Seed> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Expectation {
    /// At least one seed grows linearly.
    SomeLinearGrowth,
    AllLinearGrowth,
    AllDecay,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DichotomyParams {
    #[serde(default)]
    potential: Option<StaticPotential>,
    #[serde(default = "default_seeds")]
    seeds: SeedSpec,
    #[serde(default)]
    bands: GrowthBands,
    #[serde(default = "some_growth")]
    expect: Expectation,
}

fn default_seeds() -> SeedSpec {
    SeedSpec::Fan { count: 64, radius: 1.0 }
}

fn some_growth() -> Expectation {
    Expectation::SomeLinearGrowth
}

impl Default for DichotomyParams {
    fn default() -> Self {
        DichotomyParams {
            potential: None,
            seeds: default_seeds(),
            bands: GrowthBands::default(),
            expect: some_growth(),
        }
    }
}

fn dichotomy(cfg: &Validated) -> Result<Outcome, CliError> {
    let g = metric(cfg);
    let n = g.n;
    let mut p: DichotomyParams = parse_params(&cfg.params)?;
    let numeric = Numeric {
        horizon: Some(cfg.numeric.horizon.unwrap_or(10.0)),
        ..Numeric::default()
    };
    let v = p.potential.get_or_insert_with(|| StaticPotential::lapse(n)).clone();
    if v.dim() != n {
        return Err(CliError::Schema(format!("potential needs {n} linear coefficients")));
    }
    let seeds = match &p.seeds {
        SeedSpec::Fan { count, radius } => seed_fan(n, *count, *radius),
        SeedSpec::Axis { axis, radius } => {
            if *axis >= n {
                return Err(CliError::Schema(format!("axis {axis} out of range")));
            }
            let mut d = vec![0.0; n];
            d[*axis] = 1.0;
            vec![Seed {
                point: d.iter().map(|c| c * radius).collect(),
                direction: d,
            }]
        }
        SeedSpec::Explicit { seeds } => seeds.clone(),
    };
    let length = numeric.horizon.unwrap();
    let labels = core(classify_growth(g, &v, &seeds, length, &p.bands, &GeodesicOptions::default()))?;
    let growth = labels.iter().filter(|c| c.label == GrowthLabel::LinearGrowth).count();
    let decay = labels
        .iter()
        .filter(|c| matches!(c.label, GrowthLabel::Decay { .. } | GrowthLabel::DecayInfinite))
        .count();
    let check = match p.expect {
        Expectation::SomeLinearGrowth => Check::at_least("linear_growth_seeds", growth as f64, 1.0),
        Expectation::AllLinearGrowth => Check::at_least("linear_growth_seeds", growth as f64, seeds.len() as f64),
        Expectation::AllDecay => Check::at_least("decay_seeds", decay as f64, seeds.len() as f64),
    };
    let mut table = Table::new("dichotomy", &["seed", "t", "r", "v"]);
    for (k, c) in labels.iter().enumerate() {
        for s in &c.samples {
            table.push(vec![k as f64, s.0, s.1, s.2]);
        }
    }
    let per_seed: Vec<Value> = labels
        .iter()
        .map(|c| json!({ "seed": c.seed, "label": c.label, "slope": c.slope, "residual": c.residual }))
        .collect();
    Ok(Outcome {
        numeric,
        params: to_value(&p),
        results: json!({ "linear_growth": growth, "decay": decay, "seeds": per_seed }),
        checks: vec![check],
        tables: vec![table],
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RigidityPotential {
    Static { c0: f64, c: Vec<f64> },
    /// `√(1 + r² - 2m r^{2-n})` with the metric's mass parameter.
    SchwarzschildLapse,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RigidityParams {
    #[serde(default)]
    potential: Option<RigidityPotential>,
    #[serde(default)]
    inner: Option<f64>,
    #[serde(default = "ten")]
    outer: f64,
    /// Points for the divergence-form identity; defaults along the diagonal.
    #[serde(default)]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_step")]
    step: f64,
    #[serde(default = "round_sphere")]
    warped_base: WarpBase,
    /// Start of the sectional ODE curve on the warped fixture.
    #[serde(default = "default_start")]
    start: Vec<f64>,
    #[serde(default = "three_f")]
    length: f64,
    #[serde(default = "default_sample_step")]
    sample_step: f64,
}

fn ten() -> f64 {
    10.0
}

fn three_f() -> f64 {
    3.0
}

fn default_step() -> f64 {
    1e-3
}

fn default_sample_step() -> f64 {
    0.025
}

fn round_sphere() -> WarpBase {
    WarpBase::RoundSphere
}

fn default_start() -> Vec<f64> {
    vec![0.0, 0.3, -0.2]
}

impl Default for RigidityParams {
    fn default() -> Self {
        RigidityParams {
            potential: None,
            inner: None,
            outer: ten(),
            points: None,
            step: default_step(),
            warped_base: round_sphere(),
            start: default_start(),
            length: three_f(),
            sample_step: default_sample_step(),
        }
    }
}

fn rigidity(cfg: &Validated) -> Result<Outcome, CliError> {
    let g = metric(cfg);
    need_three(g, "rigidity-check")?;
    let mut p: RigidityParams = parse_params(&cfg.params)?;
    let numeric = Numeric {
        quad_order: Some(cfg.numeric.quad_order.unwrap_or(16)),
        radial_order: Some(cfg.numeric.radial_order.unwrap_or(48)),
        tol: Some(cfg.numeric.tol.unwrap_or(1e-8)),
        ..Numeric::default()
    };
    let tol = numeric.tol.unwrap();
    let choice = p
        .potential
        .get_or_insert_with(|| match g.family {
            Family::SchwarzschildAds { .. } => RigidityPotential::SchwarzschildLapse,
            _ => RigidityPotential::Static {
                c0: 1.0,
                c: vec![0.0; 3],
            },
        })
        .clone();
    let f: Box<dyn ScalarField> = match choice {
        RigidityPotential::Static { c0, c } => {
            if c.len() != 3 {
                return Err(CliError::Schema("potential needs 3 linear coefficients".into()));
            }
            Box::new(core(StaticPotential::new(c0, c))?)
        }
        RigidityPotential::SchwarzschildLapse => match g.family {
            Family::SchwarzschildAds { m } => Box::new(SchwarzschildLapse { n: 3, m }),
            _ => return Err(CliError::Schema("schwarzschild_lapse needs a schwarzschild_ads metric".into())),
        },
    };
    let inner = *p.inner.get_or_insert(g.horizon_radius().map_or(0.0, |h| 1.5 * h));
    let wang = core(wang_identity_check(
        g,
        f.as_ref(),
        inner,
        p.outer,
        numeric.radial_order.unwrap(),
        sphere(numeric.quad_order.unwrap())?,
    ))?;
    let points = p
        .points
        .get_or_insert_with(|| {
            [2.0, 4.0, 8.0]
                .iter()
                .map(|r| vec![0.6 * r, -0.48 * r, 0.64 * r])
                .collect()
        })
        .clone();
    let mut divergence = Vec::new();
    let mut div_worst = 0.0f64;
    for x in &points {
        let d = core(divergence_form_check(g, f.as_ref(), x, p.step))?;
        div_worst = div_worst.max(d.residual);
        divergence.push(d);
    }

    let warped = core(WarpedMetric::new(3, p.warped_base))?;
    let hessian_points = vec![vec![0.3, 0.2, -0.5], vec![-1.7, 0.5, 0.4], vec![2.5, -0.1, 0.3]];
    let fixture = core(warped_fixture(&warped, &p.start[1..], &hessian_points))?;
    let mixed = fixture.samples.iter().fold(0.0f64, |m, s| m.max((s.mixed + 1.0).abs()));
    let t8 = fixture.samples.iter().find(|s| s.t == 8.0).map(|s| (s.tangential + 1.0).abs()).unwrap_or(f64::NAN);
    let frame = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    let opts = GeodesicOptions {
        sample_step: p.sample_step,
        ..GeodesicOptions::default()
    };
    let sect = core(sectional_ode_check(&warped, &SinhPotential, &p.start, &frame, p.length, p.length, &opts))?;
    let tanh_error = sect.t.iter().zip(&sect.rho).fold(0.0f64, |m, (t, r)| m.max((r - t.tanh()).abs()));

    let mut checks = vec![
        Check::at_most("wang_gap", wang.gap, tol),
        Check::at_most("static_residual", wang.static_residual, hypmass::rigidity::identities::STATIC_THRESHOLD),
        Check::at_most("divergence_form_residual", div_worst, 1e-6),
        Check::at_most("warped_hessian_residual", fixture.hessian_residual, 1e-8),
        Check::at_most("warped_mixed_curvature", mixed, 1e-8),
        Check::at_most("warped_tangential_t8", t8, 1e-3),
        Check::at_most("sectional_rho_residual", sect.rho_residual, 1e-5),
        Check::at_most("sectional_k_residual", sect.k_residual, 1e-5),
        Check::at_most("sectional_mixed_residual", sect.mixed_residual, 1e-8),
        Check::at_most("sectional_f_fit_residual", sect.f_fit_residual, 1e-8),
    ];
    if p.warped_base == WarpBase::RoundSphere && p.start[0] == 0.0 {
        checks.push(Check::at_most("rho_tanh_error", tanh_error, 1e-6));
    }
    let mut st = Table::new("sectional", &["t", "f", "rho", "k"]);
    for k in 0..sect.t.len() {
        st.push(vec![sect.t[k], sect.f[k], sect.rho[k], sect.k[k]]);
    }
    let mut wt = Table::new("warped", &["t", "mixed", "tangential", "tangential_expected"]);
    for s in &fixture.samples {
        wt.push(vec![s.t, s.mixed, s.tangential, s.tangential_expected.unwrap_or(f64::NAN)]);
    }
    // the finite horizon cannot rule out the global exclusions
    let note = "curve checks cover a finite arc-length window only";
    Ok(Outcome {
        numeric,
        params: to_value(&p),
        results: json!({
            "wang": wang,
            "divergence_form": divergence,
            "warped": { "samples": fixture.samples, "hessian_residual": fixture.hessian_residual },
            "sectional": {
                "rho_residual": sect.rho_residual,
                "k_residual": sect.k_residual,
                "mixed_residual": sect.mixed_residual,
                "f_fit": sect.f_fit,
                "f_fit_residual": sect.f_fit_residual,
                "rho_constant": sect.rho_constant,
                "rho_profile_error": sect.rho_profile_error,
                "rho_tanh_error": tanh_error,
                "hessian_residual": sect.hessian_residual,
                "max_drift": sect.max_drift,
                "transport_drift": sect.transport_drift,
            },
            "note": note,
        }),
        checks,
        tables: vec![st, wt],
    })
}
