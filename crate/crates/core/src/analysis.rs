//! Band assignment, localization fits and antiresonance diagnostics.

use serde::{Deserialize, Serialize};

use crate::analytic::{
    bp_band, bp_surface_state, doublet, ldp_band_window, ldp_hybrid_surface_state,
    two_magnon_band, BandKind, BandPrediction, LocalizedKind, LocalizedStatePrediction,
};
use crate::chain::{hop_targets, ChainSpec, SectorBasis, SiteTuple};
use crate::eigen::EvolutionTrace;
use crate::error::{Error, Result};

/// Amplitudes below this are treated as numerically absent.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

/// Half-width slack added to every band window, in units of |J|/|Δ|.
pub const WINDOW_SLACK: f64 = 3.0;

/// Surface-type states within this many |J| of g = JΔ use the hybrid formula.
pub const RESONANCE_WIDTH: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandGroup {
    /// More than one kind means overlapping windows were merged.
    pub kinds: Vec<BandKind>,
    pub lower: f64,
    pub upper: f64,
    pub indices: Vec<usize>,
    pub observed_min: Option<f64>,
    pub observed_max: Option<f64>,
}

impl BandGroup {
    pub fn merged(&self) -> bool {
        self.kinds.len() > 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizedMatch {
    pub index: usize,
    pub energy: f64,
    pub kind: LocalizedKind,
    pub predicted: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub bands: Vec<BandGroup>,
    pub localized_levels: Vec<LocalizedMatch>,
    pub unassigned: Vec<usize>,
    pub window_slack: f64,
}

impl BandReport {
    pub fn any_merged(&self) -> bool {
        self.bands.iter().any(BandGroup::merged)
    }

    pub fn band(&self, kind: BandKind) -> Option<&BandGroup> {
        self.bands.iter().find(|b| b.kinds.contains(&kind))
    }

    pub fn matches(&self, kind: LocalizedKind) -> impl Iterator<Item = &LocalizedMatch> {
        self.localized_levels.iter().filter(move |m| m.kind == kind)
    }
}

/// Whether the surface-type pair state should follow the resonant formula.
pub fn is_resonant(spec: &ChainSpec) -> bool {
    (spec.j_delta() - spec.g()).abs() <= RESONANCE_WIDTH * spec.j().abs()
}

/// Surface-type pair prediction for whichever regime the chain is in.
pub fn surface_pair_prediction(spec: &ChainSpec) -> Result<LocalizedStatePrediction> {
    if is_resonant(spec) {
        Ok(ldp_hybrid_surface_state(spec))
    } else {
        bp_surface_state(spec)
    }
}

/// Localized two-excitation levels with their expected multiplicity.
///
/// The trapped pair can sit on either side of the defect, hence two levels.
pub fn two_exc_localized_predictions(spec: &ChainSpec) -> Vec<(LocalizedStatePrediction, usize)> {
    let mut out = Vec::new();
    if spec.g() != 0.0 {
        if let Ok((plus, minus)) = doublet(spec) {
            out.push((plus, 1));
            out.push((minus, 1));
        }
        if spec.delta() != 0.0 {
            if let Ok(p) = surface_pair_prediction(spec) {
                if p.exists {
                    out.push((p, 2));
                }
            }
        }
    }
    out
}

/// Greedy nearest-level assignment of predictions to distinct eigenvalues.
pub fn match_localized(
    values: &[f64],
    predictions: &[(LocalizedStatePrediction, usize)],
    taken: &mut [bool],
) -> Vec<LocalizedMatch> {
    let mut out = Vec::new();
    for &(pred, count) in predictions {
        let Some(target) = pred.energy else { continue };
        for _ in 0..count {
            let best = values
                .iter()
                .enumerate()
                .filter(|(i, _)| !taken[*i])
                .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()));
            if let Some((i, &e)) = best {
                taken[i] = true;
                out.push(LocalizedMatch {
                    index: i,
                    energy: e,
                    kind: pred.kind,
                    predicted: target,
                    residual: e - target,
                });
            }
        }
    }
    out
}

fn window_slack(spec: &ChainSpec) -> f64 {
    WINDOW_SLACK * spec.j().abs() / spec.delta().abs().max(1.0)
}

/// Band windows of the two-excitation sector, overlaps merged.
pub fn two_exc_windows(spec: &ChainSpec) -> Vec<BandGroup> {
    let slack = window_slack(spec);
    let mut raw: Vec<BandPrediction> = vec![two_magnon_band(spec)];
    if let Some(ldp) = ldp_band_window(spec) {
        raw.push(ldp);
    }
    if spec.delta().abs() > 1.0 {
        if let Ok(bp) = bp_band(spec) {
            raw.push(bp);
        }
    }
    let mut groups: Vec<BandGroup> = raw
        .into_iter()
        .map(|b| BandGroup {
            kinds: vec![b.kind],
            lower: b.lower() - slack,
            upper: b.upper() + slack,
            indices: Vec::new(),
            observed_min: None,
            observed_max: None,
        })
        .collect();
    groups.sort_by(|a, b| a.lower.total_cmp(&b.lower));
    let mut merged: Vec<BandGroup> = Vec::new();
    for g in groups {
        match merged.last_mut() {
            Some(last) if g.lower <= last.upper => {
                last.upper = last.upper.max(g.upper);
                last.kinds.extend(g.kinds);
            }
            _ => merged.push(g),
        }
    }
    merged
}

/// Splits a two-excitation spectrum into bands, localized levels and the rest.
pub fn classify_bands(values: &[f64], spec: &ChainSpec) -> BandReport {
    let mut taken = vec![false; values.len()];
    let localized_levels = match_localized(values, &two_exc_localized_predictions(spec), &mut taken);
    let mut bands = two_exc_windows(spec);
    let mut unassigned = Vec::new();
    for (i, &e) in values.iter().enumerate() {
        if taken[i] {
            continue;
        }
        match bands.iter_mut().find(|b| e >= b.lower && e <= b.upper) {
            Some(b) => {
                b.indices.push(i);
                b.observed_min = Some(b.observed_min.map_or(e, |m: f64| m.min(e)));
                b.observed_max = Some(b.observed_max.map_or(e, |m: f64| m.max(e)));
            }
            None => unassigned.push(i),
        }
    }
    let report = BandReport {
        bands,
        localized_levels,
        unassigned,
        window_slack: window_slack(spec),
    };
    debug_assert!(is_partition(&report, values.len()));
    report
}

/// Every index in 0..n appears exactly once across the report.
pub fn is_partition(report: &BandReport, n: usize) -> bool {
    let mut seen = vec![0u32; n];
    let all = report
        .bands
        .iter()
        .flat_map(|b| b.indices.iter().copied())
        .chain(report.localized_levels.iter().map(|m| m.index))
        .chain(report.unassigned.iter().copied());
    for i in all {
        if i >= n {
            return false;
        }
        seen[i] += 1;
    }
    seen.iter().all(|&c| c == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationMeasure {
    pub im_theta_fit: f64,
    pub ipr: f64,
    pub peak_site: SiteTuple,
    /// π when neighbouring amplitudes predominantly alternate in sign, else 0.
    pub re_theta_flag: f64,
    pub usable_sites: usize,
}

/// Distance between basis states, on the ring metric for closed chains.
pub fn tuple_distance(spec: &ChainSpec, a: SiteTuple, b: SiteTuple) -> Option<usize> {
    let d = |x, y| spec.site_distance(x, y);
    match (a, b) {
        (SiteTuple::One(n), SiteTuple::One(m)) => Some(d(n, m)),
        (SiteTuple::Two(n, m), SiteTuple::Two(p, q)) => Some((d(n, p) + d(m, q)).min(d(n, q) + d(m, p))),
        _ => None,
    }
}

/// Exponential-decay fit of an eigenvector around a basis state.
///
/// The decay rate is the negated slope of a least-squares line through
/// ln max{|a_s| : dist(s, around) ≥ d} against d, which follows the
/// envelope of oscillating profiles.
pub fn measure_localization(
    vector: &[f64],
    basis: &SectorBasis,
    spec: &ChainSpec,
    around: SiteTuple,
) -> Result<LocalizationMeasure> {
    if vector.len() != basis.len() {
        return Err(Error::Dimension {
            expected: basis.len(),
            got: vector.len(),
        });
    }
    if basis.index_of(around).is_none() || basis.n_sites() != spec.n_sites() {
        return Err(Error::BasisMismatch);
    }
    let states = basis.states();
    let usable: Vec<(usize, f64)> = states
        .iter()
        .zip(vector)
        .filter(|(_, a)| a.abs() > AMPLITUDE_FLOOR)
        .map(|(&s, a)| (tuple_distance(spec, s, around).expect("same sector"), a.abs()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientSupport(usable.len()));
    }
    let max_d = usable.iter().map(|u| u.0).max().unwrap();
    let mut by_distance = vec![0.0f64; max_d + 1];
    for &(d, a) in &usable {
        by_distance[d] = by_distance[d].max(a);
    }
    // Upper envelope: running maximum from the far end inward.
    let mut points = Vec::new();
    let mut env = 0.0f64;
    for d in (0..=max_d).rev() {
        env = env.max(by_distance[d]);
        if env > 0.0 {
            points.push((d as f64, env.ln()));
        }
    }
    if points.len() < 2 {
        return Err(Error::InsufficientSupport(points.len()));
    }
    let slope = least_squares_slope(&points);

    let sum2: f64 = vector.iter().map(|a| a * a).sum();
    let ipr = vector.iter().map(|a| a.powi(4)).sum::<f64>() / (sum2 * sum2);
    let peak = vector
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| states[i])
        .unwrap();

    let mut signed = 0.0;
    for (i, &s) in states.iter().enumerate() {
        let ai = vector[i];
        if ai.abs() <= AMPLITUDE_FLOOR {
            continue;
        }
        for t in hop_targets(spec, s) {
            let j = basis.index_of(t).expect("hop stays in the sector");
            if j > i && vector[j].abs() > AMPLITUDE_FLOOR {
                signed += ai * vector[j];
            }
        }
    }
    Ok(LocalizationMeasure {
        im_theta_fit: (-slope).max(0.0),
        ipr,
        peak_site: peak,
        re_theta_flag: if signed < 0.0 { std::f64::consts::PI } else { 0.0 },
        usable_sites: usable.len(),
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Pairs followed in the antiresonance protocol, starting from (n0+1, n0+2):
/// the initial pair, the dissociated state (n0, n0+2) and the shifted pair (n0+2, n0+3).
pub fn antiresonance_labels(spec: &ChainSpec) -> [SiteTuple; 3] {
    let n0 = spec.n0() as isize;
    let pair = |a: isize, b: isize| {
        let (x, y) = (spec.wrap(a), spec.wrap(b));
        SiteTuple::Two(x.min(y), x.max(y))
    };
    [pair(n0 + 1, n0 + 2), pair(n0, n0 + 2), pair(n0 + 2, n0 + 3)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntiresonanceMetric {
    /// max_t |a(n0+2, n0+3)|².
    pub leak_bp: f64,
    /// max_t |a(n0, n0+2)|².
    pub leak_ldp: f64,
}

pub fn antiresonance_metric(trace: &EvolutionTrace, spec: &ChainSpec) -> Result<AntiresonanceMetric> {
    let [_, ldp, bp] = antiresonance_labels(spec);
    let max_of = |label: SiteTuple| -> Result<f64> {
        let s = trace
            .series(label)
            .ok_or_else(|| Error::MissingObservable(label.to_string()))?;
        Ok(s.iter().copied().fold(0.0, f64::max))
    };
    Ok(AntiresonanceMetric {
        leak_bp: max_of(bp)?,
        leak_ldp: max_of(ldp)?,
    })
}

/// Gaussian smoothing with the kernel renormalized near the ends.
pub fn gaussian_smooth(times: &[f64], values: &[f64], sigma: f64) -> Vec<f64> {
    times
        .iter()
        .map(|&t| {
            let (mut num, mut den) = (0.0, 0.0);
            for (&s, &v) in times.iter().zip(values) {
                let x = (s - t) / sigma;
                if x.abs() > 6.0 {
                    continue;
                }
                let w = (-0.5 * x * x).exp();
                num += w * v;
                den += w;
            }
            num / den
        })
        .collect()
}

/// Recurrence time of a return probability: the first maximum of the
/// smoothed series that follows its first minimum.
pub fn oscillation_period(times: &[f64], values: &[f64], sigma: f64) -> Option<f64> {
    let s = gaussian_smooth(times, values, sigma);
    let n = s.len();
    let first_min = (1..n.saturating_sub(1)).find(|&i| s[i] < s[i - 1] && s[i] <= s[i + 1])?;
    (first_min + 1..n.saturating_sub(1))
        .find(|&i| s[i] > s[i - 1] && s[i] >= s[i + 1])
        .map(|i| times[i])
}
