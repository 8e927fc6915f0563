//! One runner per experiment kind. Each writes its data files through an
//! [`Output`] and returns summary lines plus the derived parameters it used.

use std::fs;
use std::path::{Path, PathBuf};

use malab_core::estimates::{BochnerReport, DiffIneqReport, MomentFit};
use malab_core::io::write_field;
use malab_core::moduli::{a_q, empirical_modulus, IterationSum};
use malab_core::pogorelov::{gradient_profile, slope};
use malab_core::rhs::{draw, unit};
use malab_core::solver::refined_residual;
use malab_core::{
    check_bochner, check_diff_ineq, compare_companion, companion_psi, det_residual, exp_moment,
    grad_lp, iteration_sum, moment_fit, r_q, skoda, solve, solve_n1, verify_bounds, CompanionMap,
    DiniResult, Domain, EstimateReport, ModulusOfContinuity, MollifyReport, ParamSet,
    PogorelovPoint, RhsSpec, ScalarField, SolveReport, SolverConfig,
};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Experiment};
use crate::CliError;

/// Collects the files written by an experiment.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        fs::write(self.path(name), text + "\n")?;
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.path(name)).map_err(|e| CliError::Io(e.to_string()))?;
        w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
        for row in rows {
            w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn field(&mut self, stem: &str, field: &ScalarField, metadata: Value) -> Result<(), CliError> {
        let bin = self.path(&format!("{stem}.bin"));
        self.files.push(format!("{stem}.json"));
        write_field(&bin, field, metadata)?;
        Ok(())
    }
}

pub struct Outcome {
    pub summary: Vec<String>,
    /// Every parameter value derived during the run.
    pub derived: Value,
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Exact solve for `n = 1`, Newton-Krylov otherwise.
pub fn solve_any(f: &ScalarField, cfg: &SolverConfig) -> malab_core::Result<SolveReport> {
    if f.domain().n() == 1 {
        solve_n1(f)
    } else {
        solve(f, cfg)
    }
}

/// Short human-readable name of a modulus.
pub fn label(m: &ModulusOfContinuity) -> String {
    match m {
        ModulusOfContinuity::Hoelder { a, alpha } => format!("hoelder(a={a},alpha={alpha})"),
        ModulusOfContinuity::LogPower { a, beta } => format!("log_power(a={a},beta={beta})"),
        ModulusOfContinuity::Linear { l } => format!("linear(l={l})"),
        ModulusOfContinuity::Tabulated(t) => format!("tabulated({} points)", t.radii().len()),
        ModulusOfContinuity::Augmented { base } => format!("augmented({})", label(base)),
    }
}

fn map_label(m: &CompanionMap) -> String {
    match m {
        CompanionMap::LogShift => "log_shift".into(),
        CompanionMap::Power { s } => format!("power(s={s})"),
    }
}

pub fn run(cfg: &ExperimentConfig, out: &mut Output) -> Result<Outcome, CliError> {
    match &cfg.experiment {
        Experiment::Solve { refine } => run_solve(cfg, *refine, out),
        Experiment::MollifySweep {
            seeds,
            radii,
            modulus,
        } => run_mollify(cfg, *seeds, radii, modulus.as_ref(), out),
        Experiment::ModuliCheck { moduli, chi, c4, qs } => run_moduli(moduli, *chi, *c4, qs, out),
        Experiment::GradientLadder {
            refinements,
            ps,
            eps,
            kmax,
        } => run_ladder(cfg, refinements, ps, eps, *kmax, out),
        Experiment::DiffIneq => run_ineq(cfg, out),
        Experiment::SkodaCompanion { ps, maps } => run_skoda(cfg, ps, maps, out),
        Experiment::Pogorelov {
            dims,
            annuli,
            samples,
        } => run_pogorelov(cfg.effective_seed(), dims, *annuli, *samples, out),
    }
}

fn rhs_of(cfg: &ExperimentConfig) -> Result<RhsSpec, CliError> {
    cfg.effective_rhs().ok_or_else(|| CliError::Config {
        key: Some("rhs".into()),
        message: "missing rhs".into(),
    })
}

#[derive(Serialize)]
struct SolveData {
    n: usize,
    resolution: usize,
    residual_sup: f64,
    newton_iters: usize,
    min_eig_final: f64,
    compat_shift: f64,
    history: Vec<f64>,
    phi_sup_abs: f64,
    exact_error: Option<f64>,
    refined_residual: Option<f64>,
}

fn run_solve(cfg: &ExperimentConfig, refine: bool, out: &mut Output) -> Result<Outcome, CliError> {
    let d = cfg.domain()?;
    let rhs = rhs_of(cfg)?;
    let (f, exact) = rhs.build(&d)?;
    let rep = solve_any(&f, &cfg.solver)?;
    let exact_error = match &exact {
        Some(phi) => Some(phi.max_abs_diff(&rep.phi)?),
        None => None,
    };
    let refined = match (&rhs, refine) {
        (RhsSpec::Manufactured { potential }, true) => {
            let c = rep.compat_shift;
            Some(refined_residual(&rep.phi, |s| {
                Ok(potential.log_det_translated(&d, s)?.add_constant(c))
            })?)
        }
        _ => None,
    };
    out.field("rhs", &f, json!({"experiment": "solve", "field": "F"}))?;
    out.field("phi", &rep.phi, json!({"experiment": "solve", "field": "phi"}))?;
    let rows: Vec<Vec<String>> = rep
        .history
        .iter()
        .enumerate()
        .map(|(i, r)| vec![i.to_string(), num(*r)])
        .collect();
    out.csv("history.csv", &["iteration", "residual_sup"], &rows)?;
    let data = SolveData {
        n: d.n(),
        resolution: d.resolution(),
        residual_sup: rep.residual_sup,
        newton_iters: rep.newton_iters,
        min_eig_final: rep.min_eig_final,
        compat_shift: rep.compat_shift,
        history: rep.history.clone(),
        phi_sup_abs: rep.phi.sup_abs(),
        exact_error,
        refined_residual: refined,
    };
    out.json("report.json", &data)?;
    let mut summary = vec![
        format!("domain: n={} resolution={}", d.n(), d.resolution()),
        format!("residual_sup: {:e}", rep.residual_sup),
        format!("newton_iters: {}", rep.newton_iters),
        format!("min_eig_final: {:e}", rep.min_eig_final),
        format!("compat_shift: {:e}", rep.compat_shift),
    ];
    if let Some(e) = exact_error {
        summary.push(format!("exact_error: {e:e}"));
    }
    if let Some(r) = refined {
        summary.push(format!("refined_residual: {r:e}"));
    }
    Ok(Outcome {
        summary,
        derived: json!({"compat_shift": rep.compat_shift}),
    })
}

#[derive(Serialize)]
struct MollifySeed {
    seed: u64,
    modulus: String,
    grad_spread: f64,
    diff_spread: f64,
    report: MollifyReport,
}

fn run_mollify(
    cfg: &ExperimentConfig,
    seeds: u64,
    radii: &[f64],
    modulus: Option<&ModulusOfContinuity>,
    out: &mut Output,
) -> Result<Outcome, CliError> {
    let d = cfg.domain()?;
    let base = rhs_of(cfg)?;
    let start = cfg.effective_seed();
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut records = Vec::new();
    for i in 0..seeds {
        let seed = start.wrapping_add(i);
        let mut spec = base.clone();
        if let RhsSpec::Weierstrass { seed: s, .. } = &mut spec {
            *s = seed;
        }
        let (f, _) = spec.build(&d)?;
        let m = match modulus {
            Some(m) => m.clone(),
            None => ModulusOfContinuity::Tabulated(empirical_modulus(&f, &sorted)?),
        };
        let report = verify_bounds(&f, &m, &sorted)?;
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        let path = out.path(&format!("mollify_seed{seed}.csv"));
        fs::write(path, buf)?;
        records.push(MollifySeed {
            seed,
            modulus: label(&m),
            grad_spread: report.grad_spread(),
            diff_spread: report.diff_spread(),
            report,
        });
    }
    let worst_grad = records.iter().map(|r| r.grad_spread).fold(0.0, f64::max);
    let worst_diff = records.iter().map(|r| r.diff_spread).fold(0.0, f64::max);
    let kernel_constant = records[0].report.kernel_constant;
    out.json(
        "report.json",
        &json!({
            "n": d.n(),
            "resolution": d.resolution(),
            "kernel_constant": kernel_constant,
            "max_grad_spread": worst_grad,
            "max_diff_spread": worst_diff,
            "seeds": records,
        }),
    )?;
    let mut summary = vec![
        format!("domain: n={} resolution={}", d.n(), d.resolution()),
        format!("kernel_constant: {kernel_constant}"),
    ];
    for r in &records {
        summary.push(format!(
            "seed {}: grad_spread={:.4} diff_spread={:.4}",
            r.seed, r.grad_spread, r.diff_spread
        ));
        if !r.report.unresolved.is_empty() {
            summary.push(format!("seed {}: unresolved radii {:?}", r.seed, r.report.unresolved));
        }
    }
    Ok(Outcome {
        summary,
        derived: json!({"kernel_constant": kernel_constant, "radii": sorted}),
    })
}

#[derive(Serialize)]
struct RqEntry {
    q: f64,
    r_q: f64,
    a_q: f64,
}

#[derive(Serialize)]
struct ModulusEntry {
    modulus: String,
    spec: ModulusOfContinuity,
    dini2: DiniResult,
    iteration: IterationSum,
    r_q: Vec<RqEntry>,
}

fn run_moduli(
    moduli: &[ModulusOfContinuity],
    chi: f64,
    c4: f64,
    qs: &[f64],
    out: &mut Output,
) -> Result<Outcome, CliError> {
    let mut entries = Vec::new();
    for m in moduli {
        let iteration = iteration_sum(m, chi, c4)?;
        let r_q = qs
            .iter()
            .map(|&q| {
                let r = r_q(m, q, c4)?;
                Ok(RqEntry {
                    q,
                    r_q: r,
                    a_q: a_q(m, r, q, c4)?,
                })
            })
            .collect::<malab_core::Result<Vec<_>>>()?;
        entries.push(ModulusEntry {
            modulus: label(m),
            spec: m.clone(),
            dini2: m.dini2(),
            iteration,
            r_q,
        });
    }
    let opt = |v: Option<f64>| v.map(num).unwrap_or_else(|| "divergent".into());
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|e| {
            vec![
                e.modulus.clone(),
                opt(e.dini2.value()),
                opt(e.iteration.sum),
                opt(e.iteration.bound),
                opt(e.iteration.rescaled_bound),
                e.iteration.holds.to_string(),
                e.iteration.holds_rescaled.to_string(),
            ]
        })
        .collect();
    out.csv(
        "moduli.csv",
        &[
            "modulus",
            "dini2",
            "iteration_sum",
            "bound",
            "rescaled_bound",
            "holds",
            "holds_rescaled",
        ],
        &rows,
    )?;
    let rows: Vec<Vec<String>> = entries
        .iter()
        .flat_map(|e| {
            e.r_q
                .iter()
                .map(|r| vec![e.modulus.clone(), num(r.q), num(r.r_q), num(r.a_q)])
        })
        .collect();
    out.csv("rq.csv", &["modulus", "q", "r_q", "a_q"], &rows)?;
    out.json(
        "report.json",
        &json!({"chi": chi, "c4": c4, "moduli": entries}),
    )?;
    let summary = entries
        .iter()
        .map(|e| {
            format!(
                "{}: dini2={} iteration_sum={} holds={} holds_rescaled={}",
                e.modulus,
                opt(e.dini2.value()),
                opt(e.iteration.sum),
                e.iteration.holds,
                e.iteration.holds_rescaled
            )
        })
        .collect();
    let derived: Vec<Value> = entries
        .iter()
        .map(|e| json!({"modulus": e.modulus, "r_q": e.r_q}))
        .collect();
    Ok(Outcome {
        summary,
        derived: json!({"chi": chi, "c4": c4, "r_q": derived}),
    })
}

#[derive(Serialize)]
struct LadderLevel {
    levels: u32,
    residual_sup: f64,
    compat_shift: f64,
    params: ParamSet,
    estimates: EstimateReport,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a.max(b) / a.min(b)
    }
}

fn fit(l: &LadderLevel) -> &MomentFit {
    l.estimates.moment_fit.as_ref().expect("fit computed")
}

fn run_ladder(
    cfg: &ExperimentConfig,
    refinements: &[u32],
    ps: &[f64],
    eps: &[f64],
    kmax: u32,
    out: &mut Output,
) -> Result<Outcome, CliError> {
    let d = cfg.domain()?;
    let base = rhs_of(cfg)?;
    let mut levels = Vec::new();
    for &j in refinements {
        let mut spec = base.clone();
        if let RhsSpec::Weierstrass { levels, .. } = &mut spec {
            *levels = j;
        }
        let (f, _) = spec.build(&d)?;
        let rep = solve_any(&f, &cfg.solver)?;
        let params = ParamSet::auto(&rep.phi, &f).with_overrides(&cfg.params);
        let mut est = EstimateReport::default();
        for &p in ps {
            est.lp_ladder
                .push((p, grad_lp(&rep.phi, p, malab_core::Weight::Background)?));
        }
        for &e in eps {
            est.exp_moments.push((e, exp_moment(&rep.phi, e)?));
        }
        est.moment_fit = Some(moment_fit(&rep.phi, &f, params.k, kmax)?);
        out.field(
            &format!("phi_levels{j}"),
            &rep.phi,
            json!({"experiment": "gradient_ladder", "levels": j}),
        )?;
        levels.push(LadderLevel {
            levels: j,
            residual_sup: rep.residual_sup,
            compat_shift: rep.compat_shift,
            params,
            estimates: est,
        });
    }
    let rows: Vec<Vec<String>> = levels
        .iter()
        .flat_map(|l| {
            l.estimates
                .lp_ladder
                .iter()
                .map(move |(p, v)| vec![l.levels.to_string(), num(*p), num(*v)])
        })
        .collect();
    out.csv("ladder.csv", &["levels", "p", "lp_norm"], &rows)?;
    let rows: Vec<Vec<String>> = levels
        .iter()
        .flat_map(|l| {
            fit(l)
                .moments
                .iter()
                .map(move |(k, m)| vec![l.levels.to_string(), k.to_string(), num(*m)])
        })
        .collect();
    out.csv("moments.csv", &["levels", "k", "moment"], &rows)?;
    let mut comparisons = Vec::new();
    for w in levels.windows(2) {
        let lp: Vec<(f64, f64)> = w[0]
            .estimates
            .lp_ladder
            .iter()
            .zip(&w[1].estimates.lp_ladder)
            .map(|(a, b)| (a.0, ratio(a.1, b.1)))
            .collect();
        comparisons.push(json!({
            "from": w[0].levels,
            "to": w[1].levels,
            "lp_ratios": lp,
            "max_lp_ratio": lp.iter().map(|x| x.1).fold(1.0, f64::max),
            "l_ratio": ratio(fit(&w[0]).l, fit(&w[1]).l),
        }));
    }
    out.json(
        "report.json",
        &json!({
            "n": d.n(),
            "resolution": d.resolution(),
            "refinements": levels,
            "comparisons": comparisons,
        }),
    )?;
    let mut summary = vec![format!("domain: n={} resolution={}", d.n(), d.resolution())];
    for l in &levels {
        let norms: Vec<String> = l
            .estimates
            .lp_ladder
            .iter()
            .map(|(p, v)| format!("L{p}={v:.6e}"))
            .collect();
        summary.push(format!(
            "levels {}: residual={:e} {} L={:.6e}",
            l.levels,
            l.residual_sup,
            norms.join(" "),
            fit(l).l
        ));
    }
    for c in &comparisons {
        summary.push(format!(
            "levels {} -> {}: max_lp_ratio={:.4} l_ratio={:.4}",
            c["from"], c["to"], c["max_lp_ratio"], c["l_ratio"]
        ));
    }
    let derived: Vec<Value> = levels
        .iter()
        .map(|l| json!({"levels": l.levels, "params": l.params}))
        .collect();
    Ok(Outcome {
        summary,
        derived: json!({"params": derived}),
    })
}

#[derive(Serialize)]
struct IneqData {
    exact_pair: bool,
    compat_shift: f64,
    bochner: BochnerReport,
    bochner_relative: f64,
    diff_ineq: DiffIneqReport,
    diff_ineq_relative: f64,
}

/// `(φ, F, c)` from an exact manufactured pair or a solve.
fn solution_pair(
    cfg: &ExperimentConfig,
    d: &Domain,
) -> Result<(ScalarField, ScalarField, f64, bool), CliError> {
    let (f, exact) = rhs_of(cfg)?.build(d)?;
    Ok(match exact {
        Some(phi) => (phi, f, 0.0, true),
        None => {
            let rep = solve_any(&f, &cfg.solver)?;
            (rep.phi, f, rep.compat_shift, false)
        }
    })
}

fn run_ineq(cfg: &ExperimentConfig, out: &mut Output) -> Result<Outcome, CliError> {
    let d = cfg.domain()?;
    let (phi, f, c, exact_pair) = solution_pair(cfg, &d)?;
    let params = ParamSet::auto(&phi, &f).with_overrides(&cfg.params);
    let bochner = check_bochner(&phi, &f, c)?;
    let ineq = check_diff_ineq(&phi, &f, &params, c)?;
    let data = IneqData {
        exact_pair,
        compat_shift: c,
        bochner_relative: bochner.relative(),
        diff_ineq_relative: ineq.relative(),
        bochner,
        diff_ineq: ineq,
    };
    out.json("report.json", &data)?;
    let summary = vec![
        format!("domain: n={} resolution={}", d.n(), d.resolution()),
        format!("exact_pair: {exact_pair}"),
        format!(
            "bochner: mismatch={:e} relative={:e}",
            data.bochner.mismatch, data.bochner_relative
        ),
        format!(
            "diff_ineq: min_slack={:e} relative={:e}",
            data.diff_ineq.min_slack, data.diff_ineq_relative
        ),
        format!(
            "params: C={} delta={} K={}",
            params.c, params.delta, params.k
        ),
    ];
    Ok(Outcome {
        summary,
        derived: json!({"params": params}),
    })
}

#[derive(Serialize)]
struct CompanionEntry {
    map: String,
    spec: CompanionMap,
    a: f64,
    residual_sup: f64,
    compat_shift: f64,
    companion_min: f64,
}

fn run_skoda(
    cfg: &ExperimentConfig,
    ps: &[f64],
    maps: &[CompanionMap],
    out: &mut Output,
) -> Result<Outcome, CliError> {
    let d = cfg.domain()?;
    let (f, _) = rhs_of(cfg)?.build(&d)?;
    let rep = solve_any(&f, &cfg.solver)?;
    let params = ParamSet::auto(&rep.phi, &f).with_overrides(&cfg.params);
    let phi_n = rep.phi.add_constant(-rep.phi.sup());
    let mut est = EstimateReport::default();
    for &p in ps {
        est.skoda.push((p, skoda(&phi_n, p)?));
    }
    let mut companions = Vec::new();
    for (i, map) in maps.iter().enumerate() {
        let comp = companion_psi(&f, *map, &cfg.solver)?;
        let min = compare_companion(&phi_n, &comp.psi_normalized, params.eps)?;
        out.field(
            &format!("psi_{i}"),
            &comp.psi_normalized,
            json!({"experiment": "skoda_companion", "map": map}),
        )?;
        companions.push(CompanionEntry {
            map: map_label(map),
            spec: *map,
            a: comp.a,
            residual_sup: comp.report.residual_sup,
            compat_shift: comp.report.compat_shift,
            companion_min: min,
        });
    }
    est.companion_min = companions.iter().map(|c| c.companion_min).reduce(f64::min);
    out.field(
        "phi",
        &phi_n,
        json!({"experiment": "skoda_companion", "normalization": "sup = 0"}),
    )?;
    let mut buf = Vec::new();
    est.write_skoda_csv(&mut buf)?;
    fs::write(out.path("skoda.csv"), buf)?;
    let rows: Vec<Vec<String>> = companions
        .iter()
        .map(|c| vec![c.map.clone(), num(c.a), num(c.residual_sup), num(c.companion_min)])
        .collect();
    out.csv("companion.csv", &["map", "a", "residual_sup", "companion_min"], &rows)?;
    out.json(
        "report.json",
        &json!({
            "n": d.n(),
            "resolution": d.resolution(),
            "residual_sup": rep.residual_sup,
            "eps": params.eps,
            "skoda": est.skoda,
            "companions": companions,
        }),
    )?;
    let mut summary = vec![
        format!("domain: n={} resolution={}", d.n(), d.resolution()),
        format!("residual_sup: {:e}", rep.residual_sup),
    ];
    for (p, v) in &est.skoda {
        summary.push(format!("skoda p={p}: {v:.6e}"));
    }
    for c in &companions {
        summary.push(format!(
            "{}: A={:.12} residual={:e} companion_min={:.6e}",
            c.map, c.a, c.residual_sup, c.companion_min
        ));
    }
    Ok(Outcome {
        summary,
        derived: json!({"params": params}),
    })
}

#[derive(Serialize)]
struct PogorelovEntry {
    n: usize,
    exponent: f64,
    expected: f64,
    max_det_residual: f64,
    samples: usize,
}

/// Random point with `|z_i| ≤ √2` for `i < n` and `0.1 ≤ |z_n| ≤ 1`.
fn sample_point(seed: u64, n: usize, i: usize) -> Result<PogorelovPoint, CliError> {
    let stream = n as u64;
    let base = (i * (2 * n)) as u64;
    let u = |k: u64| unit(draw(seed, stream, base + k));
    let mut z: Vec<Complex64> = (0..n - 1)
        .map(|a| Complex64::new(2.0 * u(2 * a as u64) - 1.0, 2.0 * u(2 * a as u64 + 1) - 1.0))
        .collect();
    let r = 0.1 + 0.9 * u(2 * (n as u64 - 1));
    let th = 2.0 * std::f64::consts::PI * u(2 * (n as u64 - 1) + 1);
    z.push(Complex64::from_polar(r, th));
    Ok(PogorelovPoint::new(z)?)
}

fn run_pogorelov(
    seed: u64,
    dims: &[usize],
    annuli: u32,
    samples: usize,
    out: &mut Output,
) -> Result<Outcome, CliError> {
    let mut entries = Vec::new();
    for &n in dims {
        let profile = gradient_profile(n, annuli)?;
        let rows: Vec<Vec<String>> = profile
            .iter()
            .map(|s| vec![s.k.to_string(), num(s.radius), num(s.sup_grad)])
            .collect();
        out.csv(&format!("pogorelov_n{n}.csv"), &["k", "radius", "sup_grad"], &rows)?;
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            worst = worst.max(det_residual(&sample_point(seed, n, i)?));
        }
        entries.push(PogorelovEntry {
            n,
            exponent: slope(&profile),
            expected: 2.0 / n as f64 - 1.0,
            max_det_residual: worst,
            samples,
        });
    }
    out.json(
        "report.json",
        &json!({"seed": seed, "annuli": annuli, "dims": entries}),
    )?;
    let summary = entries
        .iter()
        .map(|e| {
            format!(
                "n={}: exponent={:.6} expected={:.6} max_det_residual={:e}",
                e.n, e.exponent, e.expected, e.max_det_residual
            )
        })
        .collect();
    Ok(Outcome {
        summary,
        derived: json!({"annuli": annuli, "samples": samples}),
    })
}
