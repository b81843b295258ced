use spinchain::experiments::*;
use spinchain::output::{Cell, Table};

fn row_where<'a>(t: &'a Table, col: &str, x: f64) -> &'a [Cell] {
    let i = t.column_index(col).unwrap();
    t.records
        .iter()
        .find(|r| r[i].as_f64().is_some_and(|v| (v - x).abs() < 1e-12))
        .unwrap_or_else(|| panic!("no row with {col} = {x}"))
}

fn get<'a>(t: &Table, row: &'a [Cell], col: &str) -> &'a Cell {
    &row[t.column_index(col).unwrap()]
}

#[test]
fn fig2_threshold_and_asymptotes() {
    let cfg = Fig2Config {
        oracle_points: vec![0.8],
        ..Default::default()
    };
    let r = run_fig2(&cfg).unwrap();
    let t = &r.table;
    let half = row_where(t, "g_over_jdelta", 0.5);
    assert_eq!(get(t, half, "exists").as_bool(), Some(false));
    let above = row_where(t, "g_over_jdelta", 0.55);
    assert_eq!(get(t, above, "exists").as_bool(), Some(true));

    let eps = t.floats("eps_bp").unwrap();
    let x = t.floats("g_over_jdelta").unwrap();
    let far: Vec<f64> = x
        .iter()
        .zip(&eps)
        .filter(|(x, _)| x.unwrap() > 1.5)
        .map(|(_, e)| e.unwrap() + 2.0)
        .collect();
    assert!(far.windows(2).all(|w| w[1].abs() < w[0].abs()));
    assert!(far.last().unwrap().abs() < 0.3);
    assert!(t.column("asymptote_strong").unwrap().iter().all(|c| c.as_f64() == Some(-2.0)));

    let near = row_where(t, "g_over_jdelta", 0.95);
    let ratio = get(t, near, "eps_bp").as_f64().unwrap() / get(t, near, "asymptote_resonant").as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 0.01, "{ratio}");

    let spot = row_where(t, "g_over_jdelta", 0.8);
    assert_eq!(get(t, spot, "within_tolerance").as_bool(), Some(true));
    assert!((get(t, spot, "eps_bp").as_f64().unwrap() - 4.25).abs() < 1e-9);
}

#[test]
fn fig2_delta10_finite_size_residual() {
    let cfg = Fig2Config {
        delta: 10.0,
        grid: vec![0.8],
        oracle_points: vec![0.8],
        ..Default::default()
    };
    let r = run_fig2(&cfg).unwrap();
    let t = &r.table;
    let row = &t.records[0];
    let residual = get(t, row, "oracle_residual").as_f64().unwrap();
    // N = 40 oracle value; exceeds 0.05·|J/4Δ| = 1.25e-3 at this Δ.
    assert!((residual - 1.5068e-3).abs() < 1e-6, "{residual}");
    assert_eq!(get(t, row, "within_tolerance").as_bool(), Some(false));
}

#[test]
fn fig3_window_and_value() {
    let cfg = Fig3Config {
        oracle_points: vec![4.0],
        ..Default::default()
    };
    let r = run_fig3(&cfg).unwrap();
    let t = &r.table;
    for edge in [-1.0, 1.0, 0.5, 0.0] {
        assert_eq!(get(t, row_where(t, "detuning", edge), "exists").as_bool(), Some(false));
    }
    let four = row_where(t, "detuning", 4.0);
    assert!((get(t, four, "eps_ldp").as_f64().unwrap() - 4.25).abs() < 1e-12);
    assert!(get(t, four, "oracle_residual").as_f64().unwrap() < 0.025);
    let minus = row_where(t, "detuning", -2.0);
    assert!((get(t, minus, "eps_ldp").as_f64().unwrap() + 2.5).abs() < 1e-12);
}

#[test]
fn fig4_series_and_summary() {
    let r = run_fig4(&Fig4Config::default()).unwrap();
    let t = &r.table;
    assert_eq!(t.len(), 2 * 2001);
    let first = &t.records[0];
    assert_eq!(get(t, first, "t").as_f64(), Some(0.0));
    assert!((get(t, first, "p_initial").as_f64().unwrap() - 1.0).abs() < 1e-14);
    for n in t.floats("norm").unwrap() {
        assert!((n.unwrap() - 1.0).abs() < 1e-10);
    }
    assert_eq!(r.provenance.summary.len(), 2);
    let leak = r.summary("g=1.000000e1").unwrap()["leak_bp"].as_f64().unwrap();
    assert!(leak < 0.01);
}

#[test]
fn fig5_series_and_limits() {
    let r = run_fig5(&Fig5Config::default()).unwrap();
    let t = &r.table;
    let mut series = std::collections::BTreeSet::new();
    for row in &t.records {
        series.insert((get(t, row, "boundary").as_str().unwrap().to_string(), get(t, row, "N").as_f64().unwrap() as usize));
    }
    assert_eq!(series.len(), 4);
    for row in &t.records {
        let b = get(t, row, "boundary").as_str().unwrap();
        let n = get(t, row, "N").as_f64().unwrap();
        let g = get(t, row, "g").as_f64().unwrap();
        if b == "open" && n == 6.0 && g <= 0.1 {
            assert_eq!(get(t, row, "exists").as_bool(), Some(false));
        }
        if b == "closed" {
            assert_eq!(get(t, row, "exists").as_bool(), Some(true), "closed even N has no threshold");
        }
        if b == "closed" && n == 12.0 && g == 3.0 {
            assert!(get(t, row, "deviation_infinite").as_f64().unwrap() < 0.02);
        }
        if b == "closed" && n == 6.0 && g <= 0.02 {
            assert!(get(t, row, "deviation_sqrt").as_f64().unwrap() < 0.01);
        }
    }
}

#[test]
fn ldp_residual_shrinks_as_one_over_n() {
    for n in [40, 50] {
        let r = run_ldp_table(&LdpTableConfig {
            n_sites: n,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(r.table.len(), n - 3);
        assert!(r.table.floats("shift").unwrap().iter().all(|s| *s == Some(0.05)));
        let worst = r.summary("max_residual").unwrap().as_f64().unwrap();
        assert!((worst * n as f64 - 0.267).abs() < 0.01, "N={n}: {worst}");
    }
}

#[test]
fn small_census() {
    let cfg = CensusConfig {
        n_min: 5,
        n_max: 12,
        onset_sites: vec![12],
        odd_sites: vec![5],
        ..Default::default()
    };
    let r = run_root_census(&cfg).unwrap();
    let t = &r.table;
    for row in &t.records {
        let d = get(t, row, "deviation").as_f64().unwrap();
        match get(t, row, "check").as_str().unwrap() {
            "count" => assert_eq!(d, 0.0),
            _ => assert!(d <= 1e-3),
        }
    }
}

#[test]
fn doublet_check_rows() {
    let r = run_doublet_check(&DoubletConfig {
        g_values: vec![10.0],
        ..Default::default()
    })
    .unwrap();
    let kinds: Vec<&str> = r.table.column("kind").unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(kinds, vec!["bp_doublet_minus", "bp_doublet_plus", "defect_one_exc"]);
    assert!(r.table.column("within_tolerance").unwrap().iter().all(|c| c.as_bool() == Some(true)));
}

#[test]
fn localized_residuals_settle_with_chain_length() {
    let residuals = |n: usize| -> Vec<f64> {
        let r = run_doublet_check(&DoubletConfig {
            n_sites: n,
            g_values: vec![16.0, 30.0],
            ..Default::default()
        })
        .unwrap();
        r.table.floats("residual").unwrap().into_iter().map(Option::unwrap).collect()
    };
    let (a, b, c) = (residuals(16), residuals(24), residuals(40));
    assert_eq!(a.len(), c.len());
    for i in 0..c.len() {
        assert!((b[i] - c[i]).abs() <= (a[i] - c[i]).abs() + 1e-12, "row {i}: {a:?} {b:?} {c:?}");
    }
}

#[test]
fn reruns_are_identical_and_csv_round_trips() {
    let a = run_fig5(&Fig5Config::default()).unwrap();
    let b = run_fig5(&Fig5Config::default()).unwrap();
    assert_eq!(a.table.to_csv().unwrap(), b.table.to_csv().unwrap());
    assert_eq!(a.sidecar_json().unwrap(), b.sidecar_json().unwrap());

    let text = a.table.to_csv().unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let col = a.table.column_index("im_theta").unwrap();
    for (rec, row) in reader.records().zip(&a.table.records) {
        let rec = rec.unwrap();
        match row[col].as_f64() {
            Some(x) => assert_eq!(rec[col].parse::<f64>().unwrap(), x),
            None => assert!(rec[col].is_empty()),
        }
    }
}

#[test]
fn empty_grids_are_rejected() {
    let err = run_fig2(&Fig2Config {
        grid: vec![],
        ..Default::default()
    })
    .unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!("Fig7".parse::<ExperimentId>().is_err());
    assert_eq!("RootCensus".parse::<ExperimentId>().unwrap(), ExperimentId::RootCensus);
}
