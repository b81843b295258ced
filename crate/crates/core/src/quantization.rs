//! Finite-chain quantization conditions solved as polynomials in z = e^{iθ}.
//!
//! Each condition is rewritten with −ig/(J sin θ) = (2g/J)·z/(z² − 1), giving
//! a real palindromic-type polynomial. Its roots come in reciprocal pairs
//! (θ, −θ); roots at z = ±1 (θ = 0, π) carry no physical state and are
//! divided out exactly before the remaining roots are paired.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::bp_band_center;
use crate::chain::{Boundary, ChainSpec};
use crate::error::{Error, Result};
use crate::poly::Poly;

pub const DEFAULT_TOL_IM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootSource {
    /// Single excitation in an open chain with a defect.
    OpenChain,
    /// Closed-chain standing waves with a node on the defect.
    ClosedNode,
    /// Closed-chain states with nonzero amplitude on the defect.
    ClosedChain,
    /// Bound pair scattered by the defect (nonresonant).
    BoundPairSurface,
    /// LDP hybridized with the pair band (resonant).
    Hybrid,
}

impl RootSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootSource::OpenChain => "open_chain",
            RootSource::ClosedNode => "closed_node",
            RootSource::ClosedChain => "closed_chain",
            RootSource::BoundPairSurface => "bound_pair_surface",
            RootSource::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for RootSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Extended,
    Localized,
    Spurious,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRoot {
    pub theta: Complex64,
    pub z: Complex64,
    pub classification: Classification,
    pub source: RootSource,
    pub energy: f64,
    /// |P(z)| / max|coefficient| of the undeflated polynomial.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<ThetaRoot>,
    pub spurious: Vec<ThetaRoot>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn localized(&self) -> impl Iterator<Item = &ThetaRoot> {
        self.roots
            .iter()
            .filter(|r| r.classification == Classification::Localized)
    }

    pub fn extended(&self) -> impl Iterator<Item = &ThetaRoot> {
        self.roots
            .iter()
            .filter(|r| r.classification == Classification::Extended)
    }

    pub fn localized_count(&self) -> usize {
        self.localized().count()
    }

    /// Energies of all physical roots, ascending.
    pub fn energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.roots.iter().map(|r| r.energy).collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Quantization solver carrying the Extended/Localized threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolver {
    pub tol_im: f64,
}

impl Default for RootSolver {
    fn default() -> Self {
        Self {
            tol_im: DEFAULT_TOL_IM,
        }
    }
}

/// Dispersion law attached to a condition: E = offset + scale·cos θ.
#[derive(Clone, Copy)]
struct Dispersion {
    offset: f64,
    scale: f64,
}

impl Dispersion {
    fn energy(&self, cos_theta: f64) -> f64 {
        self.offset + self.scale * cos_theta
    }
}

fn one_exc_dispersion(spec: &ChainSpec) -> Dispersion {
    Dispersion {
        offset: spec.eps1(),
        scale: spec.j(),
    }
}

fn require_boundary(spec: &ChainSpec, boundary: Boundary, what: &str) -> Result<()> {
    if spec.boundary() != boundary {
        return Err(Error::InvalidSpec(format!(
            "{what} applies to {boundary} chains, got a {} chain",
            spec.boundary()
        )));
    }
    Ok(())
}

fn cos_of(z: Complex64) -> f64 {
    ((z + z.inv()) / 2.0).re
}

impl RootSolver {
    pub fn new(tol_im: f64) -> Self {
        Self { tol_im }
    }

    fn classify(&self, theta: Complex64) -> Classification {
        if theta.im >= self.tol_im {
            Classification::Localized
        } else {
            Classification::Extended
        }
    }

    fn real_root(&self, theta: f64, source: RootSource, law: Dispersion) -> ThetaRoot {
        ThetaRoot {
            theta: Complex64::new(theta, 0.0),
            z: Complex64::from_polar(1.0, theta),
            classification: Classification::Extended,
            source,
            energy: law.energy(theta.cos()),
            residual: 0.0,
        }
    }

    /// Roots of `full` with ±1 removed, reduced to one representative per
    /// reciprocal pair.
    fn solve_polynomial(
        &self,
        full: &Poly,
        expected: usize,
        source: RootSource,
        law: Dispersion,
    ) -> Result<RootSet> {
        let deg = full.degree();
        if deg < 2 * expected {
            return Err(Error::RootCount {
                root_source: source,
                expected,
                found: deg / 2,
            });
        }
        let (deflated, removed) = full.deflate_unit_roots(deg - 2 * expected)?;
        let pairs = paired_roots(&deflated, source)?;
        let found: Vec<_> = pairs.into_iter().map(|p| (p, full)).collect();
        self.assemble(found, removed, expected, source, law)
    }

    /// Same as [`Self::solve_polynomial`] for a condition that splits into
    /// independent factors; ±1 roots are removed wherever they are exact.
    fn solve_factored(
        &self,
        factors: &[Poly],
        expected: usize,
        source: RootSource,
        law: Dispersion,
    ) -> Result<RootSet> {
        let mut found = Vec::new();
        let mut removed = Vec::new();
        for f in factors {
            let (deflated, r) = f.deflate_exact_unit_roots(1e-13);
            removed.extend(r);
            found.extend(paired_roots(&deflated, source)?.into_iter().map(|p| (p, f)));
        }
        self.assemble(found, removed, expected, source, law)
    }

    fn assemble(
        &self,
        pairs: Vec<((Complex64, Complex64), &Poly)>,
        removed: Vec<f64>,
        expected: usize,
        source: RootSource,
        law: Dispersion,
    ) -> Result<RootSet> {
        if pairs.len() != expected {
            return Err(Error::RootCount {
                root_source: source,
                expected,
                found: pairs.len(),
            });
        }
        let mut roots: Vec<ThetaRoot> = pairs
            .into_iter()
            .map(|((a, b), poly)| {
                let z = canonical_representative(a, b);
                let theta = canonical_theta(z);
                ThetaRoot {
                    theta,
                    z,
                    classification: self.classify(theta),
                    source,
                    energy: law.energy(cos_of(z)),
                    residual: poly.relative_residual(z),
                }
            })
            .collect();
        roots.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        let spurious = removed
            .into_iter()
            .map(|r| {
                let theta = if r > 0.0 { 0.0 } else { PI };
                ThetaRoot {
                    classification: Classification::Spurious,
                    ..self.real_root(theta, source, law)
                }
            })
            .collect();
        Ok(RootSet { roots, spurious })
    }

    /// Single excitation in an open chain: exactly N physical roots.
    pub fn open_chain(&self, spec: &ChainSpec) -> Result<RootSet> {
        require_boundary(spec, Boundary::Open, "the open-chain condition")?;
        let n = spec.n_sites();
        let law = one_exc_dispersion(spec);
        let delta = spec.delta();
        if spec.g() == 0.0 && delta.abs() == 1.0 {
            // Ideal isotropic chain: cos-type standing waves with θ = πk/N.
            let roots = (0..n)
                .map(|k| {
                    let t = PI * k as f64 / n as f64;
                    let theta = if delta > 0.0 { t } else { PI - t };
                    self.real_root(theta, RootSource::OpenChain, law)
                })
                .collect();
            return Ok(RootSet {
                roots,
                spurious: Vec::new(),
            });
        }
        if spec.g() == 0.0 {
            let factors = open_chain_factors(spec);
            return self.solve_factored(&factors, n, RootSource::OpenChain, law);
        }
        let p = open_chain_polynomial(spec);
        self.solve_polynomial(&p, n, RootSource::OpenChain, law)
    }

    /// Single excitation in a ring: node roots plus the defect condition, N in total.
    pub fn closed_chain(&self, spec: &ChainSpec) -> Result<RootSet> {
        require_boundary(spec, Boundary::Closed, "the closed-chain condition")?;
        let n = spec.n_sites();
        let law = one_exc_dispersion(spec);
        let node = (1..=(n - 1) / 2)
            .map(|k| self.real_root(2.0 * PI * k as f64 / n as f64, RootSource::ClosedNode, law));
        let mut set = if spec.g() == 0.0 {
            let roots = (0..=n / 2)
                .map(|k| {
                    self.real_root(2.0 * PI * k as f64 / n as f64, RootSource::ClosedChain, law)
                })
                .collect();
            RootSet {
                roots,
                spurious: Vec::new(),
            }
        } else {
            let p = closed_chain_polynomial(spec);
            self.solve_polynomial(&p, n / 2 + 1, RootSource::ClosedChain, law)?
        };
        set.roots.extend(node);
        set.roots.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        if set.roots.len() != n {
            return Err(Error::RootCount {
                root_source: RootSource::ClosedChain,
                expected: n,
                found: set.roots.len(),
            });
        }
        Ok(set)
    }

    /// Bound pair next to the defect in a ring: N − 2 physical roots.
    pub fn bp_surface(&self, spec: &ChainSpec) -> Result<RootSet> {
        require_boundary(spec, Boundary::Closed, "the bound-pair condition")?;
        let n = spec.n_sites();
        if n < 4 {
            return Err(Error::InvalidSpec("bound-pair condition needs N >= 4".into()));
        }
        let g = spec.g();
        if g == 0.0 {
            return Err(Error::Singular("q = (J*Delta - g)/g is undefined at g = 0".into()));
        }
        let q = (spec.j_delta() - g) / g;
        if q == 0.0 {
            return Err(Error::Singular(
                "q = 0 (g = J*Delta) is the resonant point".into(),
            ));
        }
        let law = Dispersion {
            offset: bp_band_center(spec)?,
            scale: spec.j() / (2.0 * spec.delta()),
        };
        self.solve_polynomial(&bp_polynomial(n, q), n - 2, RootSource::BoundPairSurface, law)
    }

    /// Resonant LDP/BP hybrid in a ring: N − 1 physical roots.
    pub fn hybrid(&self, spec: &ChainSpec) -> Result<RootSet> {
        require_boundary(spec, Boundary::Closed, "the hybrid condition")?;
        let n = spec.n_sites();
        let a = 2.0 * (spec.j_delta() - spec.g()) / spec.j();
        let law = Dispersion {
            offset: 2.0 * spec.eps1() + spec.g(),
            scale: spec.j(),
        };
        self.solve_polynomial(&hybrid_polynomial(n, a), n - 1, RootSource::Hybrid, law)
    }
}

pub fn solve_open_chain(spec: &ChainSpec) -> Result<RootSet> {
    RootSolver::default().open_chain(spec)
}

pub fn solve_closed_chain(spec: &ChainSpec) -> Result<RootSet> {
    RootSolver::default().closed_chain(spec)
}

pub fn solve_bp_surface(spec: &ChainSpec) -> Result<RootSet> {
    RootSolver::default().bp_surface(spec)
}

pub fn solve_hybrid(spec: &ChainSpec) -> Result<RootSet> {
    RootSolver::default().hybrid(spec)
}

/// Open chain: (z² − 1)A − (2g/J)zB divided by z², with u = z − Δ, t = 1 − Δz,
/// A = z^{2N+2}u² − z²t², B = z^{2N+2}u² + z²t² − tu(z^{N+2+p} + z^{N+2−p}),
/// p = N − 2n0 + 1. Without a defect this reduces to z^{2N}u² − t².
pub fn open_chain_polynomial(spec: &ChainSpec) -> Poly {
    let n = spec.n_sites();
    let delta = spec.delta();
    let u = Poly::new(vec![-delta, 1.0]);
    let t = Poly::new(vec![1.0, -delta]);
    let u2 = u.mul(&u);
    let t2 = t.mul(&t);
    if spec.g() == 0.0 {
        return Poly::monomial(1.0, 2 * n).mul(&u2).sub(&t2);
    }
    let p = n as isize - 2 * spec.n0() as isize + 1;
    let hi = Poly::monomial(1.0, 2 * n + 2).mul(&u2);
    let lo = Poly::monomial(1.0, 2).mul(&t2);
    let a = hi.sub(&lo);
    let cross = Poly::monomial(1.0, (n as isize + 2 + p) as usize)
        .add(&Poly::monomial(1.0, (n as isize + 2 - p) as usize))
        .mul(&t.mul(&u));
    let b = hi.add(&lo).sub(&cross);
    let z2m1 = Poly::new(vec![-1.0, 0.0, 1.0]);
    let full = z2m1
        .mul(&a)
        .sub(&Poly::monomial(2.0 * spec.g() / spec.j(), 1).mul(&b));
    // Every term carries at least z².
    debug_assert!(full.coeffs()[0] == 0.0 && full.coeffs()[1] == 0.0);
    Poly::new(full.coeffs()[2..].to_vec())
}

/// Without a defect the open-chain condition splits by mirror parity into
/// z^N u − t and z^N u + t, which keeps the two edge states apart.
pub fn open_chain_factors(spec: &ChainSpec) -> [Poly; 2] {
    let n = spec.n_sites();
    let delta = spec.delta();
    let zn_u = Poly::monomial(1.0, n).mul(&Poly::new(vec![-delta, 1.0]));
    let t = Poly::new(vec![1.0, -delta]);
    [zn_u.sub(&t), zn_u.add(&t)]
}

/// Closed chain: (z^N − 1)(z² − 1) − (2g/J)z(z^N + 1).
pub fn closed_chain_polynomial(spec: &ChainSpec) -> Poly {
    let n = spec.n_sites();
    let zn = Poly::monomial(1.0, n);
    let one = Poly::new(vec![1.0]);
    zn.sub(&one)
        .mul(&Poly::new(vec![-1.0, 0.0, 1.0]))
        .sub(&Poly::monomial(2.0 * spec.g() / spec.j(), 1).mul(&zn.add(&one)))
}

/// Bound pair: (1 − qz)² z^{2N−4} − (z − q)².
pub fn bp_polynomial(n: usize, q: f64) -> Poly {
    let a = Poly::new(vec![1.0, -q]);
    let b = Poly::new(vec![-q, 1.0]);
    a.mul(&a)
        .mul(&Poly::monomial(1.0, 2 * n - 4))
        .sub(&b.mul(&b))
}

/// Hybrid: z^{2N−2}(z − a)² − (az − 1)².
pub fn hybrid_polynomial(n: usize, a: f64) -> Poly {
    let za = Poly::new(vec![-a, 1.0]);
    let az1 = Poly::new(vec![-1.0, a]);
    Poly::monomial(1.0, 2 * n - 2)
        .mul(&za.mul(&za))
        .sub(&az1.mul(&az1))
}

fn paired_roots(p: &Poly, source: RootSource) -> Result<Vec<(Complex64, Complex64)>> {
    pair_reciprocal(&p.roots()?).ok_or_else(|| {
        Error::RootFinding(format!("{source}: roots do not form reciprocal pairs"))
    })
}

/// Greedy matching of roots into (z, 1/z) pairs by the cost |z·w − 1|.
fn pair_reciprocal(roots: &[Complex64]) -> Option<Vec<(Complex64, Complex64)>> {
    let n = roots.len();
    if n % 2 != 0 {
        return None;
    }
    let mut candidates = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            candidates.push(((roots[i] * roots[j] - 1.0).norm(), i, j));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    for (cost, i, j) in candidates {
        if used[i] || used[j] {
            continue;
        }
        if cost > 1e-4 {
            return None;
        }
        used[i] = true;
        used[j] = true;
        pairs.push((roots[i], roots[j]));
        if pairs.len() == n / 2 {
            break;
        }
    }
    Some(pairs)
}

/// Picks the member of {z, 1/z, z̄, 1/z̄} with |z| ≤ 1 and Im z ≥ 0.
fn canonical_representative(a: Complex64, b: Complex64) -> Complex64 {
    let mut z = if a.norm() <= b.norm() { a } else { b };
    if z.norm() > 1.0 {
        z = z.inv();
    }
    if z.im < 0.0 {
        z = z.conj();
    }
    z
}

/// θ = −i ln z with Re θ ∈ [0, π] and Im θ ≥ 0.
fn canonical_theta(z: Complex64) -> Complex64 {
    let theta = -Complex64::i() * z.ln();
    Complex64::new(theta.re.clamp(0.0, PI), theta.im.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_one_exc_transcribed;

    fn open(n: usize, delta: f64, g: f64, n0: usize) -> ChainSpec {
        ChainSpec::builder(n, Boundary::Open)
            .anisotropy(delta)
            .eps1(0.0)
            .defect(g, n0)
            .build()
            .unwrap()
    }

    fn ring(n: usize, g: f64) -> ChainSpec {
        ChainSpec::builder(n, Boundary::Closed)
            .anisotropy(10.0)
            .eps1(0.0)
            .defect(g, 1)
            .build()
            .unwrap()
    }

    fn assert_matches_spectrum(roots: &RootSet, spec: &ChainSpec, tol: f64) {
        let h = build_one_exc_transcribed(spec);
        let exact = crate::eigen::eigvalsh(&h.entries).unwrap();
        let e = roots.energies();
        assert_eq!(e.len(), exact.len());
        for (a, b) in e.iter().zip(&exact) {
            assert!((a - b).abs() < tol, "{a} vs {b}");
        }
    }

    #[test]
    fn open_chain_energies_are_the_spectrum() {
        for (n, delta, g, n0) in [
            (6, 10.0, 5.0, 3),
            (12, 10.0, 3.0, 6),
            (9, 0.5, -2.0, 2),
            (8, -3.0, 0.7, 8),
            (7, 1.0, 2.0, 4),
        ] {
            let s = open(n, delta, g, n0);
            let r = solve_open_chain(&s).unwrap();
            assert_eq!(r.len(), n);
            for root in &r.roots {
                assert!(root.residual < 1e-8, "{root:?}");
            }
            assert_matches_spectrum(&r, &s, 1e-9);
        }
    }

    #[test]
    fn open_chain_without_defect_ignores_position() {
        for delta in [10.0, 0.3, 1.0, -1.0] {
            let a = solve_open_chain(&open(10, delta, 0.0, 2)).unwrap();
            let b = solve_open_chain(&open(10, delta, 0.0, 7)).unwrap();
            for (x, y) in a.energies().iter().zip(b.energies()) {
                assert!((x - y).abs() < 1e-12);
            }
            assert_matches_spectrum(&a, &open(10, delta, 0.0, 2), 1e-9);
        }
    }

    #[test]
    fn open_chain_surface_and_defect_roots() {
        let r = solve_open_chain(&open(12, 10.0, 20.0, 6)).unwrap();
        let mut loc: Vec<f64> = r.localized().map(|t| t.theta.im).collect();
        loc.sort_by(f64::total_cmp);
        assert_eq!(loc.len(), 3);
        assert!((loc[0] - 10f64.ln()).abs() < 1e-3);
        assert!((loc[1] - 10f64.ln()).abs() < 1e-3);
        assert!((loc[2] - 20f64.asinh()).abs() < 2e-2 * 20f64.asinh());
        let weak = solve_open_chain(&open(6, 10.0, 0.1, 3)).unwrap();
        assert_eq!(weak.localized_count(), 2);
    }

    #[test]
    fn closed_chain_counts_and_spectrum() {
        for n in [5, 6, 11, 12] {
            for g in [0.0, 0.03, -0.5, 3.0] {
                let s = ring(n, g);
                let r = solve_closed_chain(&s).unwrap();
                assert_eq!(r.len(), n);
                assert!(r.localized_count() <= 1);
                assert_matches_spectrum(&r, &s, 1e-9);
            }
        }
    }

    #[test]
    fn closed_even_ring_square_root_law() {
        let (n, g) = (12, 0.01);
        let r = solve_closed_chain(&ring(n, g)).unwrap();
        let kappa = r.localized().next().unwrap().theta.im;
        let approx = (2.0 * g / n as f64).sqrt();
        assert!((kappa - approx).abs() < 0.05 * approx);
    }

    #[test]
    fn closed_odd_ring_threshold() {
        for n in [5usize, 7, 9] {
            let gmin = 2.0 / n as f64;
            assert_eq!(solve_closed_chain(&ring(n, -(gmin - 1e-3))).unwrap().localized_count(), 0);
            assert_eq!(solve_closed_chain(&ring(n, -(gmin + 1e-3))).unwrap().localized_count(), 1);
        }
        assert_eq!(solve_closed_chain(&ring(7, 1e-3)).unwrap().localized_count(), 1);
    }

    #[test]
    fn closed_chain_rejects_open_spec() {
        assert!(matches!(
            solve_closed_chain(&open(6, 1.0, 1.0, 1)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            solve_open_chain(&ring(6, 1.0)),
            Err(Error::InvalidSpec(_))
        ));
    }

    fn bp_spec(n: usize, q: f64) -> ChainSpec {
        // q = (JΔ − g)/g with J = 1, Δ = 20.
        let g = 20.0 / (1.0 + q);
        ChainSpec::builder(n, Boundary::Closed)
            .anisotropy(20.0)
            .eps1(0.0)
            .defect(g, 1)
            .build()
            .unwrap()
    }

    #[test]
    fn bound_pair_bifurcations() {
        assert_eq!(solve_bp_surface(&bp_spec(20, 1.5)).unwrap().localized_count(), 0);
        let r = solve_bp_surface(&bp_spec(20, 0.95)).unwrap();
        assert_eq!(r.len(), 18);
        assert_eq!(r.localized_count(), 1);
        assert_eq!(solve_bp_surface(&bp_spec(20, 0.85)).unwrap().localized_count(), 2);
        let neg = solve_bp_surface(&bp_spec(20, -0.5)).unwrap();
        assert!(neg.localized().all(|t| (t.theta.re - PI).abs() < 1e-9));
    }

    #[test]
    fn bound_pair_large_ring_limit() {
        let r = solve_bp_surface(&bp_spec(200, 0.5)).unwrap();
        assert_eq!(r.len(), 198);
        for t in r.localized() {
            assert!((t.theta.im - 2f64.ln()).abs() < 1e-3);
        }
        assert!(solve_bp_surface(&bp_spec(20, 0.0)).is_err());
    }

    #[test]
    fn hybrid_roots() {
        let spec = |n: usize, a: f64| {
            ChainSpec::builder(n, Boundary::Closed)
                .anisotropy(10.0)
                .eps1(0.0)
                .defect(10.0 - a / 2.0, 1)
                .build()
                .unwrap()
        };
        let r = solve_hybrid(&spec(30, 0.8)).unwrap();
        assert_eq!(r.len(), 29);
        assert_eq!(r.localized_count(), 0);
        let big = solve_hybrid(&spec(100, 4.0)).unwrap();
        // Trapped on either side of the defect: a tunnel-split pair of roots.
        let loc: Vec<_> = big.localized().collect();
        assert_eq!(loc.len(), 2);
        for t in loc {
            assert!((t.theta.im - 4f64.ln()).abs() < 1e-3);
        }
        let neg = solve_hybrid(&spec(40, -4.0)).unwrap();
        assert!((neg.localized().next().unwrap().theta.re - PI).abs() < 1e-12);
    }

    #[test]
    fn tolerance_knob_reclassifies() {
        let s = ring(12, 0.01);
        let strict = RootSolver::new(1.0).closed_chain(&s).unwrap();
        assert_eq!(strict.localized_count(), 0);
    }

    #[test]
    fn spurious_roots_are_reported() {
        let r = solve_open_chain(&open(6, 10.0, 1.0, 2)).unwrap();
        assert_eq!(r.spurious.len(), 4);
        assert!(r.spurious.iter().all(|t| t.classification == Classification::Spurious));
    }
}
