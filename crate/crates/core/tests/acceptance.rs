//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use spinchain::analytic::antiresonance_coupling;
use spinchain::chain::{
    build_basis, build_hamiltonian, build_hamiltonian_direct, Boundary, ChainSpec,
};
use spinchain::eigen::{basis_state, eigh, propagate};
use spinchain::experiments::{
    fig4_run, run_doublet_check, run_fig5, run_ldp_table, run_root_census, CensusConfig,
    DoubletConfig, Fig4Config, Fig5Config, LdpTableConfig,
};
use spinchain::output::Table;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Multiples of 1/16 keep every matrix element exact in binary.
fn dyadic(rng: &mut impl Rng, lo: i32, hi: i32) -> f64 {
    rng.gen_range(lo..=hi) as f64 / 16.0
}

fn oracle_equality() -> Outcome {
    let start = Instant::now();
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for draw in 0..100 {
        for n in 4..=20 {
            for boundary in [Boundary::Open, Boundary::Closed] {
                let mut j = dyadic(&mut rng, -32, 32);
                if j == 0.0 {
                    j = 0.5;
                }
                let spec = ChainSpec::new(
                    n,
                    boundary,
                    j,
                    dyadic(&mut rng, -320, 320),
                    dyadic(&mut rng, -160, 160),
                    dyadic(&mut rng, -320, 320),
                    rng.gen_range(1..=n),
                )
                .unwrap();
                for k in [1, 2] {
                    let t = build_hamiltonian(&spec, k).unwrap();
                    let d = build_hamiltonian_direct(&spec, &build_basis(&spec, k).unwrap()).unwrap();
                    checked += 1;
                    if t.entries != d.entries || t.ground_energy != d.ground_energy {
                        mismatches.push(format!("draw {draw} N={n} {boundary} k={k}"));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches.is_empty() && secs < 10.0,
        format!(
            "{checked} sector matrices, {} mismatches, {secs:.2} s (limit 10 s){}",
            mismatches.len(),
            mismatches.first().map(|m| format!(", first: {m}")).unwrap_or_default()
        ),
    )
}

fn ldp_table() -> Outcome {
    let start = Instant::now();
    let r = run_ldp_table(&LdpTableConfig::default()).unwrap();
    let paired = r.table.len();
    let observed = r.summary("observed_levels").and_then(|v| v.as_u64()).unwrap_or(0);
    let worst = r.summary("max_residual").and_then(|v| v.as_f64()).unwrap_or(f64::INFINITY);
    outcome(
        paired == 97 && observed == 97 && worst <= 5e-3,
        format!(
            "{paired} paired / {observed} observed levels (want 97), max residual {worst:.3e} (limit 5e-3), {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn text_col<'a>(t: &'a Table, name: &str) -> Vec<&'a str> {
    t.column(name)
        .unwrap()
        .into_iter()
        .map(|c| c.as_str().unwrap_or(""))
        .collect()
}

fn localized_energies() -> Outcome {
    let r = run_doublet_check(&DoubletConfig::default()).unwrap();
    let t = &r.table;
    let gs: Vec<f64> = t.floats("g").unwrap().into_iter().flatten().collect();
    let kinds = text_col(t, "kind");
    let resid: Vec<f64> = t.floats("residual").unwrap().into_iter().flatten().collect();
    let tol: Vec<f64> = t.floats("tolerance").unwrap().into_iter().flatten().collect();
    let count = |g: f64, kind: &str| {
        gs.iter().zip(&kinds).filter(|(x, k)| **x == g && **k == kind).count()
    };
    let mut missing = Vec::new();
    for g in [8.0, 10.0, 16.0, 30.0] {
        for kind in ["defect_one_exc", "bp_doublet_plus", "bp_doublet_minus"] {
            if count(g, kind) != 1 {
                missing.push(format!("{kind}@g={g}"));
            }
        }
    }
    for g in [16.0, 30.0] {
        if count(g, "bp_surface") + count(g, "ldp_hybrid_surface") != 2 {
            missing.push(format!("surface@g={g}"));
        }
    }
    let failures = resid.iter().zip(&tol).filter(|(r, t)| r > t).count();
    let worst_ratio = resid.iter().zip(&tol).map(|(r, t)| r / t).fold(0.0, f64::max);
    outcome(
        missing.is_empty() && failures == 0,
        format!(
            "{} levels checked, {failures} over tolerance, worst residual/tolerance {worst_ratio:.3}{}",
            t.len(),
            if missing.is_empty() { String::new() } else { format!(", missing {missing:?}") }
        ),
    )
}

fn root_census() -> Outcome {
    let cfg = CensusConfig::default();
    let r = run_root_census(&cfg).unwrap();
    let t = &r.table;
    let checks = text_col(t, "check");
    let dev = t.floats("deviation").unwrap();
    let mut count_rows = 0;
    let mut count_bad = 0;
    let mut onset_rows = 0;
    let mut onset_bad = 0;
    let mut worst_onset: f64 = 0.0;
    for (c, d) in checks.iter().zip(&dev) {
        if *c == "count" {
            count_rows += 1;
            if *d != Some(0.0) {
                count_bad += 1;
            }
        } else {
            onset_rows += 1;
            match d {
                Some(x) if *x <= 1e-3 => worst_onset = worst_onset.max(*x),
                _ => onset_bad += 1,
            }
        }
    }
    let odd = checks.iter().filter(|c| **c == "odd_threshold").count();
    outcome(
        count_bad == 0 && onset_bad == 0 && odd == cfg.odd_sites.len() && onset_rows > 0,
        format!(
            "N in [{}, {}]: {count_rows} count rows ({count_bad} wrong); {onset_rows} onset/threshold rows ({onset_bad} off), worst offset {worst_onset:.1e} (limit 1e-3)",
            cfg.n_min, cfg.n_max
        ),
    )
}

fn fig5() -> Outcome {
    let r = run_fig5(&Fig5Config::default()).unwrap();
    let t = &r.table;
    let b = text_col(t, "boundary");
    let n: Vec<f64> = t.floats("N").unwrap().into_iter().flatten().collect();
    let g: Vec<f64> = t.floats("g").unwrap().into_iter().flatten().collect();
    let dsq = t.floats("deviation_sqrt").unwrap();
    let dinf = t.floats("deviation_infinite").unwrap();
    let mut sqrt_worst = (0.0, 0.0, 0.0);
    let mut sqrt_bad = 0;
    let mut inf_worst: f64 = 0.0;
    let mut inf_bad = 0;
    let mut series = std::collections::BTreeSet::new();
    for i in 0..t.len() {
        series.insert((b[i], n[i] as usize));
        if b[i] == "closed" && (n[i] as usize) % 2 == 0 && g[i].abs() <= 0.05 {
            let d = dsq[i].unwrap_or(f64::INFINITY);
            if d > sqrt_worst.0 {
                sqrt_worst = (d, n[i], g[i]);
            }
            if d > 0.05 {
                sqrt_bad += 1;
            }
        }
        if g[i].abs() >= 3.0 {
            let d = dinf[i].unwrap_or(f64::INFINITY);
            inf_worst = inf_worst.max(d);
            if d > 0.02 {
                inf_bad += 1;
            }
        }
    }
    outcome(
        sqrt_bad == 0 && inf_bad == 0 && series.len() == 4,
        format!(
            "{} series; square-root law worst {:.2}% at N={}, g={} (limit 5%, {sqrt_bad} over); large-g worst {:.2}% (limit 2%, {inf_bad} over)",
            series.len(),
            100.0 * sqrt_worst.0,
            sqrt_worst.1,
            sqrt_worst.2,
            100.0 * inf_worst
        ),
    )
}

fn antiresonance() -> Outcome {
    let start = Instant::now();
    let cfg = Fig4Config::default();
    let jd = cfg.j * cfg.delta;
    let res = fig4_run(&cfg, jd).unwrap();
    let non = fig4_run(&cfg, jd / 4.0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let reference = 2.0 * PI * cfg.delta / cfg.j;
    let period_ok = non
        .period
        .is_some_and(|p| p >= reference / 2.0 && p <= 2.0 * reference);
    let checks = [
        res.metric.leak_bp < 0.01,
        res.metric.leak_ldp > 0.5,
        non.metric.leak_ldp < 0.01,
        period_ok,
        secs < 1.0,
    ];
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "resonant leak_bp {:.4} (<0.01 {}), leak_ldp {:.4} (>0.5 {}); nonresonant leak_ldp {:.4} (<0.01 {}), period {} vs 2πΔ/J = {:.1} (x2 {}); {secs:.2} s (<1 s {})",
            res.metric.leak_bp,
            mark(checks[0]),
            res.metric.leak_ldp,
            mark(checks[1]),
            non.metric.leak_ldp,
            mark(checks[2]),
            non.period.map_or("none".to_string(), |p| format!("{p:.1}")),
            reference,
            mark(checks[3]),
            mark(checks[4]),
        ),
    )
}

fn coupling_zero() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(35);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let j: f64 = rng.gen_range(0.1..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let delta: f64 = rng.gen_range(-30.0..30.0);
        let c: f64 = rng.gen_range(-1.0..1.0);
        let g = j * delta - j * c;
        let spec = ChainSpec::builder(10, Boundary::Closed)
            .exchange(j)
            .anisotropy(delta)
            .defect(g, 5)
            .build()
            .unwrap();
        let theta = ((spec.j_delta() - spec.g()) / spec.j()).clamp(-1.0, 1.0).acos();
        worst = worst.max(antiresonance_coupling(&spec, theta).abs());
    }
    outcome(worst < 1e-12, format!("1000 resonant draws, max |coupling| {worst:.2e} (limit 1e-12)"))
}

fn hygiene() -> Outcome {
    let cfg = Fig4Config::default();
    let mut worst_eig: f64 = 0.0;
    let mut specs = Vec::new();
    for r in [0.25, 1.0] {
        specs.push(cfg.spec(r * cfg.j * cfg.delta).unwrap());
    }
    specs.push(
        ChainSpec::builder(30, Boundary::Closed)
            .anisotropy(20.0)
            .eps1(0.0)
            .defect(10.0, 15)
            .build()
            .unwrap(),
    );
    specs.push(
        ChainSpec::builder(24, Boundary::Open)
            .anisotropy(3.0)
            .eps1(0.5)
            .defect(-2.0, 7)
            .build()
            .unwrap(),
    );
    for spec in &specs {
        let d = eigh(&build_hamiltonian(spec, 2).unwrap()).unwrap();
        let norm = d.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        worst_eig = worst_eig.max(d.max_residual() / norm).max(d.orthonormality_error() / norm);
    }
    let mut worst_drift: f64 = 0.0;
    let mut worst_reversal: f64 = 0.0;
    for r in [0.25, 1.0] {
        let run = fig4_run(&cfg, r * cfg.j * cfg.delta).unwrap();
        worst_drift = worst_drift
            .max(run.trace.max_norm_drift())
            .max(run.trace.max_energy_drift());
        let d = eigh(&build_hamiltonian(&run.spec, 2).unwrap()).unwrap();
        let psi0 = basis_state(&d.basis, run.trace.labels[0]).unwrap();
        let forward = propagate(&d, &psi0, cfg.t_max).unwrap();
        let back = propagate(&d, &forward, -cfg.t_max).unwrap();
        let err = back
            .iter()
            .zip(&psi0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst_reversal = worst_reversal.max(err);
    }
    outcome(
        worst_eig <= 1e-10 && worst_drift <= 1e-10 && worst_reversal <= 1e-9,
        format!(
            "eigh residual/orthonormality {worst_eig:.1e}·‖H‖ (limit 1e-10), norm/energy drift {worst_drift:.1e} (limit 1e-10), time reversal {worst_reversal:.1e} (limit 1e-9)"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equality", oracle_equality),
        ("LDP table", ldp_table),
        ("localized-state energies", localized_energies),
        ("root census and bifurcations", root_census),
        ("localization length curves", fig5),
        ("antiresonance", antiresonance),
        ("coupling zero", coupling_zero),
        ("numerical hygiene", hygiene),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
