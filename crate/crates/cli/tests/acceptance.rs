//! Acceptance suite. Prints one line per criterion and exits nonzero when a
//! criterion fails that is not listed in `KNOWN_UNATTAINABLE`.
//!
//! Run a subset with `cargo test -p malab-cli --test acceptance -- 3 7`.

use std::f64::consts::{E, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use malab_core::estimates::check_bochner;
use malab_core::moduli::{a_q, empirical_modulus, iteration_constant, iteration_constant_rescaled};
use malab_core::solver::{companion_rhs, refined_residual};
use malab_core::*;
use num_complex::Complex64;

/// Criteria that fail as stated; see the decisions ledger.
const KNOWN_UNATTAINABLE: &[u32] = &[7];

// Pinned tolerances.
const C1_TOL: f64 = 1e-10;
const C1_SECONDS: f64 = 5.0;
const C2_RESIDUAL: f64 = 1e-10;
const C2_PHI_ERR: f64 = 1e-7;
const C2_SECONDS: f64 = 180.0;
const C2_REFINED: f64 = 1e-6;
const C3_N1: f64 = 1e-8;
const C3_N2: f64 = 1e-6;
const C3_DECAY: f64 = 4.0;
/// Relative mismatch treated as the machine floor in the halving test.
const C3_FLOOR: f64 = 1e-12;
const C4_SLACK: f64 = -1e-6;
const C5_SPREAD: f64 = 10.0;
const C6_TOL: f64 = 1e-8;
const C7_AQ: f64 = 0.5 - 1e-9;
const C8_RATIO: f64 = 2.0;
/// Relative tolerance of the regression pins.
const C8_PIN_TOL: f64 = 1e-6;
const C9_DET: f64 = 1e-10;
const C9_EXP: f64 = 0.02;
const C10_RESIDUAL: f64 = 1e-10;
const C10_A: f64 = 1e-12;

/// `||∇φ||_{L^p}` for `p = 2, 4, 8, 16` at levels 2 and 3, and the fitted `L`
/// of each, recorded on the first run.
const C8_PINS: [[f64; 4]; 2] = [
    [1.7384522514e-2, 1.9107212629e-2, 2.1143312076e-2, 2.3295601316e-2],
    [1.7413242785e-2, 1.9152568326e-2, 2.1219119825e-2, 2.3419252725e-2],
];
const C8_L_PINS: [f64; 2] = [4.4883488340e-1, 4.4883497404e-1];

struct Verdict {
    pass: bool,
    detail: String,
    note: Option<String>,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
        note: None,
    }
}

fn c1() -> Verdict {
    let t = Instant::now();
    let d = make_domain(1, 128).unwrap();
    let f = ScalarField::from_fn(&d, |x| (1.0 + 0.5 * (2.0 * PI * x[0]).cos()).ln()).unwrap();
    let rep = solve_n1(&f).unwrap();
    let exact = ScalarField::from_fn(&d, |x| -(0.5 / (PI * PI)) * (2.0 * PI * x[0]).cos()).unwrap();
    let err = rep.phi.max_abs_diff(&exact).unwrap();
    let secs = t.elapsed().as_secs_f64();
    verdict(
        err <= C1_TOL && secs < C1_SECONDS,
        format!("n=1 exact solve res 128: sup_err={err:.3e} (tol {C1_TOL:e}), time={secs:.3}s (limit {C1_SECONDS}s)"),
    )
}

fn diagonal_potential() -> TrigPotential {
    TrigPotential::cosine(0.05, vec![1, 0, 0, 0]).with_term(0.05, vec![0, 0, 1, 0])
}

fn cross_potential() -> TrigPotential {
    TrigPotential::cosine(0.03, vec![1, 0, 1, 0])
}

fn c2() -> Verdict {
    let d = make_domain(2, 32).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, pot) in [("diagonal", diagonal_potential()), ("cross", cross_potential())] {
        let t = Instant::now();
        let (exact, f) = manufactured(&d, &pot).unwrap();
        let rep = solve(&f, &SolverConfig::default()).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let err = rep.phi.max_abs_diff(&exact).unwrap();
        let c = rep.compat_shift;
        let fine = refined_residual(&rep.phi, |s| Ok(pot.log_det_translated(&d, s)?.add_constant(c))).unwrap();
        pass &= rep.residual_sup <= C2_RESIDUAL && err <= C2_PHI_ERR && secs < C2_SECONDS && fine <= C2_REFINED;
        parts.push(format!(
            "{name}: residual={:.2e} phi_err={err:.2e} fine_residual={fine:.2e} iters={} c={c:.1e} time={secs:.1}s",
            rep.residual_sup, rep.newton_iters
        ));
    }
    verdict(
        pass,
        format!(
            "n=2 Newton res 32 (tol residual {C2_RESIDUAL:e}, phi {C2_PHI_ERR:e}, fine {C2_REFINED:e}, {C2_SECONDS}s): {}",
            parts.join("; ")
        ),
    )
}

/// Relative Bochner mismatch of a manufactured pair.
fn bochner_rel(n: usize, res: usize, pot: &TrigPotential) -> f64 {
    let d = make_domain(n, res).unwrap();
    let (phi, f) = manufactured(&d, pot).unwrap();
    check_bochner(&phi, &f, 0.0).unwrap().relative()
}

fn halving(n: usize, resolutions: &[usize], pot: &TrigPotential) -> (bool, Vec<f64>) {
    let rel: Vec<f64> = resolutions.iter().map(|&r| bochner_rel(n, r, pot)).collect();
    let ok = rel
        .windows(2)
        .all(|w| w[0] <= C3_FLOOR || w[0] / w[1] >= C3_DECAY);
    (ok, rel)
}

fn c3() -> Verdict {
    let n1_pot = TrigPotential::cosine(-0.04, vec![1, 0]).with_term(0.008, vec![1, 2]);
    let a = bochner_rel(1, 128, &n1_pot);
    let b = bochner_rel(2, 32, &diagonal_potential()).max(bochner_rel(2, 32, &cross_potential()));
    let (h1, s1) = halving(1, &[8, 16, 32, 64, 128], &n1_pot);
    let (h2, s2) = halving(2, &[8, 16, 32], &diagonal_potential());
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(" > ");
    verdict(
        a <= C3_N1 && b <= C3_N2 && h1 && h2,
        format!(
            "Bochner relative mismatch n=1 res 128: {a:.2e} (tol {C3_N1:e}), n=2 res 32 diagonal/cross: {b:.2e} (tol {C3_N2:e}); \
             halving (>= {C3_DECAY}x above {C3_FLOOR:e}) n=1: {} [{}], n=2: {} [{}]",
            fmt(&s1),
            if h1 { "ok" } else { "slow" },
            fmt(&s2),
            if h2 { "ok" } else { "slow" },
        ),
    )
}

fn c4() -> Verdict {
    let corpus: Vec<(usize, usize, TrigPotential)> = vec![
        (1, 64, TrigPotential::cosine(-0.5 / (PI * PI), vec![1, 0])),
        (1, 64, TrigPotential::cosine(-0.03, vec![1, 0]).with_term(0.005, vec![1, 1])),
        (1, 64, TrigPotential::cosine(0.005, vec![2, 3]).with_term(-0.004, vec![0, 1])),
        (2, 16, diagonal_potential()),
        (2, 16, cross_potential()),
        (2, 16, TrigPotential::cosine(0.005, vec![1, 0, 0, 0]).with_term(0.003, vec![0, 1, 1, 0])),
    ];
    let mut worst = f64::INFINITY;
    let mut setup_ok = true;
    for (n, res, pot) in &corpus {
        let d = make_domain(*n, *res).unwrap();
        let (phi, f) = manufactured(&d, pot).unwrap();
        let p = ParamSet::auto(&phi, &f);
        let sup_phi = phi.add_constant(-integrate(&phi)).sup_abs();
        setup_ok &= p.c0 == 0.0
            && (2.0 * p.delta * sup_phi - p.c / 2.0).abs() <= 1e-12 * p.c
            && p.k == (2 * n + 1) as f64
            && p.c / 4.0 * (-f.sup()).exp() > 2.0;
        let rep = check_diff_ineq(&phi, &f, &p, 0.0).unwrap();
        worst = worst.min(rep.relative());
    }
    verdict(
        worst >= C4_SLACK && setup_ok,
        format!(
            "differential inequality over {} manufactured pairs: min relative slack {worst:.3e} (tol {C4_SLACK:e}), auto parameters {}",
            corpus.len(),
            if setup_ok { "consistent" } else { "INCONSISTENT" }
        ),
    )
}

fn c5() -> Verdict {
    let d = make_domain(1, 256).unwrap();
    let radii: Vec<f64> = (2..=6).rev().map(|k| 2f64.powi(-k)).collect();
    let mut worst: (f64, f64) = (0.0, 0.0);
    let mut parts = Vec::new();
    let mut kernel = 0.0;
    for seed in 0..3 {
        let f = normalize_rhs(&weierstrass(&d, 0.5, 6, 0.5, seed).unwrap()).unwrap();
        let omega = ModulusOfContinuity::Tabulated(empirical_modulus(&f, &radii).unwrap());
        let rep = verify_bounds(&f, &omega, &radii).unwrap();
        assert!(rep.unresolved.is_empty());
        kernel = rep.kernel_constant;
        worst.0 = worst.0.max(rep.grad_spread());
        worst.1 = worst.1.max(rep.diff_spread());
        let gmax = rep.grad_products.iter().copied().fold(0.0, f64::max);
        let dmax = rep.diff_ratios.iter().copied().fold(0.0, f64::max);
        parts.push(format!(
            "seed {seed}: spreads {:.2}/{:.2}, max r|grad F_r|={gmax:.3}, max ratio={dmax:.3}",
            rep.grad_spread(),
            rep.diff_spread()
        ));
    }
    verdict(
        worst.0 <= C5_SPREAD && worst.1 <= C5_SPREAD,
        format!(
            "mollification n=1 res 256, r=2^-2..2^-6, empirical omega: max spreads grad {:.3} diff {:.3} (tol {C5_SPREAD}); K_rho={kernel:.6}; {}",
            worst.0,
            worst.1,
            parts.join("; ")
        ),
    )
}

fn c6() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.25, 0.5, 1.0] {
        let v = ModulusOfContinuity::hoelder(1.0, alpha).unwrap().dini2().value().unwrap();
        pass &= (v - 1.0 / (2.0 * alpha)).abs() <= C6_TOL;
        parts.push(format!("hoelder {alpha}: {v:.12}"));
    }
    let v = ModulusOfContinuity::linear(1.0).unwrap().dini2().value().unwrap();
    pass &= (v - 0.5).abs() <= C6_TOL;
    parts.push(format!("linear: {v:.12}"));
    let lp = ModulusOfContinuity::log_power(1.0, 0.5).unwrap().dini2();
    pass &= lp == DiniResult::Divergent;
    parts.push(format!("log_power 0.5: {lp:?}"));
    verdict(pass, format!("Dini oracles (tol {C6_TOL:e}): {}", parts.join(", ")))
}

fn finite_dini_family() -> Vec<(&'static str, ModulusOfContinuity)> {
    vec![
        ("hoelder 0.25", ModulusOfContinuity::hoelder(1.0, 0.25).unwrap()),
        ("hoelder 0.5", ModulusOfContinuity::hoelder(1.0, 0.5).unwrap()),
        ("hoelder 1", ModulusOfContinuity::hoelder(1.0, 1.0).unwrap()),
        ("linear 1", ModulusOfContinuity::linear(1.0).unwrap()),
        ("log_power 0.75", ModulusOfContinuity::log_power(1.0, 0.75).unwrap()),
        ("log_power 1", ModulusOfContinuity::log_power(1.0, 1.0).unwrap()),
    ]
}

fn c7() -> Verdict {
    let chi = 4.0 / 3.0;
    let c4 = 1.0;
    let mut failing = Vec::new();
    let mut rescaled_failing = Vec::new();
    let mut aq_ok = true;
    for (name, m) in finite_dini_family() {
        let it = iteration_sum(&m, chi, c4).unwrap();
        if !it.holds {
            failing.push(format!(
                "{name} (sum {:.3} > bound {:.3})",
                it.sum.unwrap_or(f64::INFINITY),
                it.bound.unwrap()
            ));
        }
        if !it.holds_rescaled {
            rescaled_failing.push(name);
        }
        for q in [9.0, 16.0, 100.0] {
            let r = r_q(&m, q, c4).unwrap();
            aq_ok &= a_q(&m, r, q, c4).unwrap() >= C7_AQ;
        }
    }
    let rq = r_q(&ModulusOfContinuity::linear(1.0).unwrap(), 9.0, 1.0).unwrap();
    let pass = failing.is_empty() && rq == 0.125 && aq_ok;
    let note = format!(
        "with the rescaled constant 16 c4^2 C = {:.4} every finite-Dini modulus {}",
        iteration_constant_rescaled(chi, c4),
        if rescaled_failing.is_empty() {
            "satisfies the bound".to_string()
        } else {
            format!("except {rescaled_failing:?} satisfies the bound")
        }
    );
    let mut v = verdict(
        pass,
        format!(
            "iteration sum <= C dini2 with C = {:.4} (chi 4/3): {}; r_q(linear,9,1) = {rq} (exact 0.125); A_q(r_q) >= 1/2 - 1e-9: {}",
            iteration_constant(chi),
            if failing.is_empty() {
                "all hold".to_string()
            } else {
                format!("violated by {}", failing.join(", "))
            },
            if aq_ok { "ok" } else { "violated" }
        ),
    );
    v.note = Some(note);
    v
}

fn c8() -> Verdict {
    let d = make_domain(2, 32).unwrap();
    let ps = [2.0, 4.0, 8.0, 16.0];
    let mut norms = Vec::new();
    let mut ls = Vec::new();
    for levels in [2u32, 3] {
        let f = normalize_rhs(&weierstrass(&d, 0.5, levels, 0.1, 11).unwrap()).unwrap();
        let rep = solve(&f, &SolverConfig::default()).unwrap();
        let k = ParamSet::auto(&rep.phi, &f).k;
        let row: Vec<f64> = ps
            .iter()
            .map(|&p| grad_lp(&rep.phi, p, Weight::Background).unwrap())
            .collect();
        ls.push(moment_fit(&rep.phi, &f, k, 8).unwrap().l);
        norms.push(row);
    }
    let ratio = |a: f64, b: f64| a.max(b) / a.min(b);
    let lp_ratio = (0..ps.len())
        .map(|i| ratio(norms[0][i], norms[1][i]))
        .fold(1.0, f64::max);
    let l_ratio = ratio(ls[0], ls[1]);
    let pinned = |v: f64, pin: f64| (v - pin).abs() <= C8_PIN_TOL * pin.abs();
    let pins_ok = (0..2).all(|j| {
        (0..ps.len()).all(|i| pinned(norms[j][i], C8_PINS[j][i])) && pinned(ls[j], C8_L_PINS[j])
    });
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.10e}")).collect::<Vec<_>>().join(", ");
    verdict(
        lp_ratio <= C8_RATIO && l_ratio <= C8_RATIO && pins_ok,
        format!(
            "gradient ladder n=2 res 32 levels 2 -> 3: max Lp ratio {lp_ratio:.4}, L ratio {l_ratio:.4} (tol {C8_RATIO}); \
             regression pins {} (levels 2: [{}] L={:.10e}; levels 3: [{}] L={:.10e})",
            if pins_ok { "match" } else { "DIFFER" },
            fmt(&norms[0]),
            ls[0],
            fmt(&norms[1]),
            ls[1]
        ),
    )
}

/// Deterministic sample in `[0, 1)`.
fn lcg(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn c9() -> Verdict {
    let mut state = 2024u64;
    let mut worst: f64 = 0.0;
    for n in [3usize, 4] {
        for _ in 0..100 {
            let mut z: Vec<Complex64> = (0..n - 1)
                .map(|_| Complex64::new(2.0 * lcg(&mut state) - 1.0, 2.0 * lcg(&mut state) - 1.0))
                .collect();
            let r = 0.1 + 0.9 * lcg(&mut state);
            z.push(Complex64::from_polar(r, 2.0 * PI * lcg(&mut state)));
            worst = worst.max(det_residual(&PogorelovPoint::new(z).unwrap()));
        }
    }
    let mut pass = worst <= C9_DET;
    let mut parts = Vec::new();
    for n in [2usize, 3, 4] {
        let e = gradient_exponent(n, 8).unwrap();
        let expect = 2.0 / n as f64 - 1.0;
        pass &= (e - expect).abs() <= C9_EXP;
        parts.push(format!("n={n}: {e:.5} (expected {expect:.5})"));
    }
    verdict(
        pass,
        format!(
            "singular solution: max det residual {worst:.2e} over 200 points (tol {C9_DET:e}); exponents (tol {C9_EXP}) {}",
            parts.join(", ")
        ),
    )
}

fn c10() -> Verdict {
    let d = make_domain(1, 128).unwrap();
    let maps = [CompanionMap::LogShift, CompanionMap::Power { s: 0.5 }];
    let mut pass = true;
    let mut worst_res: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    let mut skoda_ok = true;
    let run = |seed: u64| -> Vec<u64> {
        let f = normalize_rhs(&weierstrass(&d, 0.5, 5, 0.3, seed).unwrap()).unwrap();
        let phi = solve_n1(&f).unwrap().phi;
        let phi = phi.add_constant(-phi.sup());
        maps.iter()
            .map(|&m| {
                let psi = companion_psi(&f, m, &SolverConfig::default()).unwrap().psi_normalized;
                compare_companion(&phi, &psi, 0.25).unwrap().to_bits()
            })
            .collect()
    };
    for seed in 0..4 {
        let f = normalize_rhs(&weierstrass(&d, 0.5, 5, 0.3, seed).unwrap()).unwrap();
        let phi = solve_n1(&f).unwrap().phi;
        for p in [1.0, 2.0, 4.0] {
            skoda_ok &= skoda(&phi, p).map(f64::is_finite).unwrap_or(false);
        }
        for m in maps {
            let rep = companion_psi(&f, m, &SolverConfig::default()).unwrap();
            let (rhs, _) = companion_rhs(&f, m).unwrap();
            let res = residual(&rep.report.phi, &rhs).unwrap().sup_abs();
            worst_res = worst_res.max(res);
            // Plain left-to-right quadrature of e^F Φ(e^F).
            let mut acc = 0.0;
            for &v in f.values() {
                let t = v.exp();
                let phi_t = match m {
                    CompanionMap::LogShift => (E + t).ln(),
                    CompanionMap::Power { s } => t.powf(s),
                };
                acc += t * phi_t;
            }
            let direct = acc / f.len() as f64;
            worst_a = worst_a.max((direct - rep.a).abs());
        }
        let once = run(seed);
        let twice = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| run(seed));
        pass &= once == twice;
    }
    let reproducible = pass;
    pass &= worst_res <= C10_RESIDUAL && worst_a <= C10_A && skoda_ok;
    verdict(
        pass,
        format!(
            "companion n=1 corpus (4 seeds): max residual {worst_res:.2e} (tol {C10_RESIDUAL:e}), max |A - quadrature| {worst_a:.1e} (tol {C10_A:e}), \
             skoda finite: {skoda_ok}, companion_min bit-reproducible: {reproducible}"
        ),
    )
}

const C11_CONFIGS: &[(&str, &str)] = &[
    (
        "solve",
        r#"{"schema_version": 1, "experiment": {"kind": "solve"}, "domain": {"n": 2, "resolution": 8},
            "rhs": {"kind": "weierstrass", "alpha": 0.5, "levels": 1, "amplitude": 0.2, "seed": 1}}"#,
    ),
    (
        "mollify",
        r#"{"schema_version": 1, "experiment": {"kind": "mollify_sweep", "seeds": 2, "radii": [0.25, 0.125]},
            "domain": {"n": 1, "resolution": 64},
            "rhs": {"kind": "weierstrass", "alpha": 0.5, "levels": 4, "amplitude": 0.5, "seed": 0}}"#,
    ),
    ("moduli", r#"{"schema_version": 1, "experiment": {"kind": "moduli_check"}}"#),
    (
        "ladder",
        r#"{"schema_version": 1, "experiment": {"kind": "gradient_ladder", "refinements": [1, 2]},
            "domain": {"n": 2, "resolution": 16},
            "rhs": {"kind": "weierstrass", "alpha": 0.5, "levels": 1, "amplitude": 0.1, "seed": 4}}"#,
    ),
    (
        "ineq",
        r#"{"schema_version": 1, "experiment": {"kind": "diff_ineq"}, "domain": {"n": 2, "resolution": 8},
            "rhs": {"kind": "trig_poly", "amplitude": 0.2, "frequencies": [[1, 0, 0, 0], [0, 1, 1, 0]]}}"#,
    ),
    (
        "skoda",
        r#"{"schema_version": 1, "experiment": {"kind": "skoda_companion"}, "domain": {"n": 1, "resolution": 64},
            "rhs": {"kind": "weierstrass", "alpha": 0.5, "levels": 4, "amplitude": 0.3, "seed": 2}}"#,
    ),
    ("pogorelov", r#"{"schema_version": 1, "experiment": {"kind": "pogorelov", "samples": 20}}"#),
];

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn c11() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut bad = Vec::new();
    let mut files = 0;
    for (sub, text) in C11_CONFIGS {
        let cfg = tmp.path().join(format!("{sub}.json"));
        fs::write(&cfg, text).unwrap();
        let dirs: Vec<PathBuf> = ["a", "b", "c"]
            .iter()
            .map(|r| tmp.path().join(format!("{sub}_{r}")))
            .collect();
        for (dir, threads) in dirs.iter().zip(["1", "1", "4"]) {
            let o = Command::new(env!("CARGO_BIN_EXE_malab"))
                .args([*sub, "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()])
                .args(["--threads", threads, "--seed", "17"])
                .output()
                .unwrap();
            assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        }
        let first = data_files(&dirs[0]);
        files += first.len();
        if first != data_files(&dirs[1]) {
            bad.push(format!("{sub} (rerun)"));
        }
        if first != data_files(&dirs[2]) {
            bad.push(format!("{sub} (threads)"));
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "determinism: {} experiments, {files} data files compared across reruns and --threads 1 vs 4: {}",
            C11_CONFIGS.len(),
            if bad.is_empty() { "byte-identical".to_string() } else { format!("differ in {bad:?}") }
        ),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 11] = [
        (1, c1),
        (2, c2),
        (3, c3),
        (4, c4),
        (5, c5),
        (6, c6),
        (7, c7),
        (8, c8),
        (9, c9),
        (10, c10),
        (11, c11),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    let mut known = Vec::new();
    for (id, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {status}  {}", v.detail);
        if let Some(note) = &v.note {
            println!("              note: {note}");
        }
        if !v.pass {
            if KNOWN_UNATTAINABLE.contains(&id) {
                known.push(id);
            } else {
                unexpected.push(id);
            }
        }
    }
    if !known.is_empty() {
        println!("known unattainable as stated: {known:?}");
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
