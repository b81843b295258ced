//! Closed-form energies, decrements and dispersion laws.
//!
//! Localized states carry a complex quasi-momentum θ with Re θ ∈ {0, π}
//! and Im θ > 0 equal to the reciprocal localization length.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{Boundary, ChainSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalizedKind {
    DefectOneExc,
    SurfaceOneExc,
    BPDoubletPlus,
    BPDoubletMinus,
    BPSurface,
    LDPHybridSurface,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizedStatePrediction {
    pub kind: LocalizedKind,
    pub exists: bool,
    pub energy: Option<f64>,
    /// Absent for the doublet, which is pinned to the defect without a decay law.
    pub theta: Option<Complex64>,
}

impl LocalizedStatePrediction {
    fn absent(kind: LocalizedKind) -> Self {
        Self {
            kind,
            exists: false,
            energy: None,
            theta: None,
        }
    }

    fn present(kind: LocalizedKind, energy: f64, theta: Option<Complex64>) -> Self {
        Self {
            kind,
            exists: true,
            energy: Some(energy),
            theta,
        }
    }

    pub fn im_theta(&self) -> Option<f64> {
        self.theta.map(|t| t.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BandKind {
    Magnon,
    TwoMagnon,
    LDP,
    BP,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPrediction {
    pub kind: BandKind,
    pub center: f64,
    pub half_width: f64,
}

impl BandPrediction {
    pub fn lower(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.lower() && e <= self.upper()
    }
}

fn step_phase(negative: bool) -> f64 {
    if negative {
        PI
    } else {
        0.0
    }
}

/// Single magnon, ε1 + J cos θ.
pub fn magnon_energy(spec: &ChainSpec, theta: f64) -> f64 {
    spec.eps1() + spec.j() * theta.cos()
}

pub fn magnon_band(spec: &ChainSpec) -> BandPrediction {
    BandPrediction {
        kind: BandKind::Magnon,
        center: spec.eps1(),
        half_width: spec.j().abs(),
    }
}

/// Two independent magnons, 2ε1 ± 2|J|.
pub fn two_magnon_band(spec: &ChainSpec) -> BandPrediction {
    BandPrediction {
        kind: BandKind::TwoMagnon,
        center: 2.0 * spec.eps1(),
        half_width: 2.0 * spec.j().abs(),
    }
}

/// One excitation on the defect and one magnon, including the J²/2g shift.
pub fn ldp_band_window(spec: &ChainSpec) -> Option<BandPrediction> {
    let g = spec.g();
    if g == 0.0 {
        return None;
    }
    Some(BandPrediction {
        kind: BandKind::LDP,
        center: 2.0 * spec.eps1() + g + spec.j().powi(2) / (2.0 * g),
        half_width: spec.j().abs(),
    })
}

/// Bottom of the bound-pair band offset, E_BP⁽⁰⁾ = 2ε1 + JΔ + J/2Δ.
pub fn bp_band_center(spec: &ChainSpec) -> Result<f64> {
    if spec.delta() == 0.0 {
        return Err(Error::Singular("bound pairs need Delta != 0".into()));
    }
    Ok(2.0 * spec.eps1() + spec.j_delta() + spec.j() / (2.0 * spec.delta()))
}

pub fn bp_band(spec: &ChainSpec) -> Result<BandPrediction> {
    Ok(BandPrediction {
        kind: BandKind::BP,
        center: bp_band_center(spec)?,
        half_width: (spec.j() / (2.0 * spec.delta())).abs(),
    })
}

/// Single excitation bound to the defect in an infinite chain.
pub fn defect_state(spec: &ChainSpec) -> LocalizedStatePrediction {
    let (g, j) = (spec.g(), spec.j());
    if g == 0.0 {
        return LocalizedStatePrediction::absent(LocalizedKind::DefectOneExc);
    }
    let ratio = g / j;
    let theta = Complex64::new(step_phase(ratio < 0.0), ratio.abs().asinh());
    let energy = spec.eps1() + g.signum() * (g * g + j * j).sqrt();
    LocalizedStatePrediction::present(LocalizedKind::DefectOneExc, energy, Some(theta))
}

/// Single excitation bound to an edge of an open chain.
pub fn surface_state(spec: &ChainSpec) -> LocalizedStatePrediction {
    let delta = spec.delta();
    if spec.boundary() != Boundary::Open || delta.abs() <= 1.0 {
        return LocalizedStatePrediction::absent(LocalizedKind::SurfaceOneExc);
    }
    let theta = Complex64::new(step_phase(delta < 0.0), delta.abs().ln());
    let energy = spec.eps1() + spec.j() * (delta * delta + 1.0) / (2.0 * delta);
    LocalizedStatePrediction::present(LocalizedKind::SurfaceOneExc, energy, Some(theta))
}

/// Bound-pair energy and internal decrement κ at total quasi-momentum θ.
///
/// κ is infinite at θ = π, where the pair collapses onto neighbouring sites.
pub fn bp_dispersion(spec: &ChainSpec, theta: f64) -> Result<(f64, f64)> {
    let delta = spec.delta();
    if delta.abs() <= 1.0 {
        return Err(Error::UndefinedPair(format!(
            "|Delta| = {} does not bind pairs",
            delta.abs()
        )));
    }
    let ratio = ((theta / 2.0).cos() / delta).abs();
    let kappa = -ratio.ln();
    if kappa < 0.0 {
        return Err(Error::UndefinedPair(format!("kappa = {kappa} at theta = {theta}")));
    }
    let e0 = bp_band_center(spec)?;
    Ok((e0 + spec.j() / (2.0 * delta) * theta.cos(), kappa))
}

/// LDP levels of a closed chain, θ_k = πk/(N−2) for k = 1..N−3.
pub fn ldp_band(spec: &ChainSpec) -> Vec<(f64, f64)> {
    let Some(window) = ldp_band_window(spec) else {
        return Vec::new();
    };
    let n = spec.n_sites();
    if n < 4 {
        return Vec::new();
    }
    (1..=n - 3)
        .map(|k| {
            let theta = PI * k as f64 / (n - 2) as f64;
            (theta, window.center + spec.j() * theta.cos())
        })
        .collect()
}

/// Symmetric (+) and antisymmetric (−) states of a pair sitting on the defect.
pub fn doublet(spec: &ChainSpec) -> Result<(LocalizedStatePrediction, LocalizedStatePrediction)> {
    let (j, g, jd) = (spec.j(), spec.g(), spec.j_delta());
    let detuning = jd + g;
    if detuning.abs() <= j.abs() {
        return Err(Error::Regime(format!(
            "|J*Delta + g| = {} must exceed |J| = {}",
            detuning.abs(),
            j.abs()
        )));
    }
    if spec.delta() == 0.0 {
        return Err(Error::Singular("doublet needs Delta != 0".into()));
    }
    let center =
        2.0 * spec.eps1() + g + jd + j * (2.0 * jd + g) / (4.0 * spec.delta() * detuning);
    let half_split = j * j / (4.0 * detuning);
    Ok((
        LocalizedStatePrediction::present(LocalizedKind::BPDoubletPlus, center + half_split, None),
        LocalizedStatePrediction::present(LocalizedKind::BPDoubletMinus, center - half_split, None),
    ))
}

/// Ratio q = (JΔ − g)/g that controls pairs bound next to the defect.
pub fn bp_q(spec: &ChainSpec) -> Result<f64> {
    let g = spec.g();
    if g == 0.0 {
        return Err(Error::Singular("q is undefined for g = 0".into()));
    }
    Ok((spec.j_delta() - g) / g)
}

/// Bound pair trapped next to the defect, nonresonant regime.
pub fn bp_surface_state(spec: &ChainSpec) -> Result<LocalizedStatePrediction> {
    let (j, g, jd, delta) = (spec.j(), spec.g(), spec.j_delta(), spec.delta());
    if g == jd {
        return Err(Error::Singular(
            "g = J*Delta is the resonant point; use the hybrid surface state".into(),
        ));
    }
    if delta == 0.0 {
        return Err(Error::Singular("bound pairs need Delta != 0".into()));
    }
    if g == 0.0 {
        return Ok(LocalizedStatePrediction::absent(LocalizedKind::BPSurface));
    }
    let q = (jd - g) / g;
    let im = -(q.abs().ln());
    if im <= 0.0 {
        return Ok(LocalizedStatePrediction::absent(LocalizedKind::BPSurface));
    }
    let hop = j / (4.0 * delta);
    let shift = j * g / (4.0 * delta * (jd - g));
    let energy = bp_band_center(spec)? + shift + hop * hop / shift;
    Ok(LocalizedStatePrediction::present(
        LocalizedKind::BPSurface,
        energy,
        Some(Complex64::new(step_phase(q < 0.0), im)),
    ))
}

/// Reduced pair-surface ordinate, (E − E_BP⁽⁰⁾)/(J/4Δ) = q + 1/q for the trapped pair.
pub fn bp_surface_offset(spec: &ChainSpec) -> Result<Option<f64>> {
    let pred = bp_surface_state(spec)?;
    let hop = spec.j() / (4.0 * spec.delta());
    Ok(match pred.energy {
        Some(e) => Some((e - bp_band_center(spec)?) / hop),
        None => None,
    })
}

/// LDP-like state hybridized with the pair band, resonant regime.
pub fn ldp_hybrid_surface_state(spec: &ChainSpec) -> LocalizedStatePrediction {
    let (j, g, jd) = (spec.j(), spec.g(), spec.j_delta());
    let a = 2.0 * (jd - g) / j;
    if a.abs() <= 1.0 {
        return LocalizedStatePrediction::absent(LocalizedKind::LDPHybridSurface);
    }
    let energy = 2.0 * spec.eps1() + jd + (j / 2.0).powi(2) / (jd - g);
    LocalizedStatePrediction::present(
        LocalizedKind::LDPHybridSurface,
        energy,
        Some(Complex64::new(step_phase(a < 0.0), a.abs().ln())),
    )
}

/// Reduced hybrid-surface ordinate, (E − 2ε1 − g)/(J/2).
pub fn ldp_hybrid_offset(spec: &ChainSpec) -> Option<f64> {
    ldp_hybrid_surface_state(spec)
        .energy
        .map(|e| (e - 2.0 * spec.eps1() - spec.g()) / (spec.j() / 2.0))
}

/// LDP ↔ BP coupling factor sin θ cos θ (JΔ − g − J cos θ), up to normalization.
pub fn antiresonance_coupling(spec: &ChainSpec, theta: f64) -> f64 {
    let c = theta.cos();
    theta.sin() * c * (spec.j_delta() - spec.g() - spec.j() * c)
}
