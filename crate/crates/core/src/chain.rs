//! Chain configuration and exact one-/two-excitation sector Hamiltonians.
//!
//! Sites are 1-based. Energies are counted from the all-down state, so the
//! vacuum of flipped spins sits at zero for both boundary conditions.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Closed,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Open => f.write_str("open"),
            Boundary::Closed => f.write_str("closed"),
        }
    }
}

/// Physical configuration of a chain with one detuned site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChainSpec", into = "RawChainSpec")]
pub struct ChainSpec {
    n_sites: usize,
    boundary: Boundary,
    j: f64,
    delta: f64,
    eps: f64,
    g: f64,
    n0: usize,
}

/// Wire form of [`ChainSpec`]; key names follow the physics notation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChainSpec {
    #[serde(rename = "N")]
    n: usize,
    boundary: Boundary,
    #[serde(rename = "J")]
    j: f64,
    #[serde(rename = "Delta")]
    delta: f64,
    eps: f64,
    g: f64,
    n0: usize,
}

impl TryFrom<RawChainSpec> for ChainSpec {
    type Error = Error;

    fn try_from(raw: RawChainSpec) -> Result<Self> {
        ChainSpec::new(raw.n, raw.boundary, raw.j, raw.delta, raw.eps, raw.g, raw.n0)
    }
}

impl From<ChainSpec> for RawChainSpec {
    fn from(s: ChainSpec) -> Self {
        RawChainSpec {
            n: s.n_sites,
            boundary: s.boundary,
            j: s.j,
            delta: s.delta,
            eps: s.eps,
            g: s.g,
            n0: s.n0,
        }
    }
}

impl ChainSpec {
    /// Validating constructor. Open chains need at least 2 sites, closed rings 3.
    pub fn new(
        n_sites: usize,
        boundary: Boundary,
        j: f64,
        delta: f64,
        eps: f64,
        g: f64,
        n0: usize,
    ) -> Result<Self> {
        let min_sites = match boundary {
            Boundary::Open => 2,
            Boundary::Closed => 3,
        };
        if n_sites < min_sites {
            return Err(Error::InvalidSpec(format!(
                "{boundary} chain needs at least {min_sites} sites, got {n_sites}"
            )));
        }
        if n0 == 0 || n0 > n_sites {
            return Err(Error::InvalidSpec(format!(
                "defect site n0={n0} outside 1..={n_sites}"
            )));
        }
        if j == 0.0 {
            return Err(Error::InvalidSpec("exchange constant J must be nonzero".into()));
        }
        for (name, v) in [("J", j), ("Delta", delta), ("eps", eps), ("g", g)] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self {
            n_sites,
            boundary,
            j,
            delta,
            eps,
            g,
            n0,
        })
    }

    /// Starts a builder with J = 1 and all other energies zero, defect on site 1.
    pub fn builder(n_sites: usize, boundary: Boundary) -> ChainSpecBuilder {
        ChainSpecBuilder {
            n_sites,
            boundary,
            j: 1.0,
            delta: 0.0,
            eps: 0.0,
            g: 0.0,
            n0: 1,
            eps1: None,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Energy of one flipped spin in the ideal infinite chain, ε − JΔ.
    pub fn eps1(&self) -> f64 {
        self.eps - self.j * self.delta
    }

    /// Ising coupling JΔ.
    pub fn j_delta(&self) -> f64 {
        self.j * self.delta
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.n_sites, self.boundary, self.j, self.delta, self.eps, g, self.n0)
    }

    pub fn with_sites(&self, n_sites: usize, n0: usize) -> Result<Self> {
        Self::new(n_sites, self.boundary, self.j, self.delta, self.eps, self.g, n0)
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Result<Self> {
        Self::new(self.n_sites, boundary, self.j, self.delta, self.eps, self.g, self.n0)
    }

    /// Nearest-neighbour bonds (a, b), a < b except for the ring bond (N, 1).
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<_> = (1..self.n_sites).map(|n| (n, n + 1)).collect();
        if self.boundary == Boundary::Closed {
            bonds.push((self.n_sites, 1));
        }
        bonds
    }

    /// On-site spin-flip energy ε⁽ⁿ⁾.
    pub fn site_energy(&self, n: usize) -> f64 {
        if n == self.n0 {
            self.eps + self.g
        } else {
            self.eps
        }
    }

    /// Distance between two sites; the ring metric on closed chains.
    pub fn site_distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        match self.boundary {
            Boundary::Open => d,
            Boundary::Closed => d.min(self.n_sites - d),
        }
    }

    /// Wraps an unwrapped (possibly out of range) site number onto 1..=N.
    pub fn wrap(&self, n: isize) -> usize {
        let len = self.n_sites as isize;
        ((n - 1).rem_euclid(len) + 1) as usize
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone)]
pub struct ChainSpecBuilder {
    n_sites: usize,
    boundary: Boundary,
    j: f64,
    delta: f64,
    eps: f64,
    g: f64,
    n0: usize,
    eps1: Option<f64>,
}

impl ChainSpecBuilder {
    pub fn exchange(mut self, j: f64) -> Self {
        self.j = j;
        self
    }

    pub fn anisotropy(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn site_energy(mut self, eps: f64) -> Self {
        self.eps = eps;
        self.eps1 = None;
        self
    }

    /// Fixes ε1 = ε − JΔ instead of ε; resolved against the final J and Δ.
    pub fn eps1(mut self, eps1: f64) -> Self {
        self.eps1 = Some(eps1);
        self
    }

    pub fn defect(mut self, g: f64, n0: usize) -> Self {
        self.g = g;
        self.n0 = n0;
        self
    }

    pub fn build(self) -> Result<ChainSpec> {
        let eps = self.eps1.map_or(self.eps, |e1| e1 + self.j * self.delta);
        ChainSpec::new(
            self.n_sites,
            self.boundary,
            self.j,
            self.delta,
            eps,
            self.g,
            self.n0,
        )
    }
}

/// Energy of the all-down state, E0 = −(Nε+g)/2 + (bonds)·JΔ/4.
pub fn ground_state_offset(spec: &ChainSpec) -> f64 {
    let bonds = match spec.boundary {
        Boundary::Open => spec.n_sites - 1,
        Boundary::Closed => spec.n_sites,
    } as f64;
    -(spec.n_sites as f64 * spec.eps + spec.g) / 2.0 + bonds * spec.j_delta() / 4.0
}

/// Positions of flipped spins: one site, or an ordered pair n < m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteTuple {
    One(usize),
    Two(usize, usize),
}

impl SiteTuple {
    /// Builds a tuple from an unordered list of one or two distinct sites.
    pub fn from_sites(sites: &[usize]) -> Option<Self> {
        match *sites {
            [n] => Some(SiteTuple::One(n)),
            [a, b] if a != b => Some(SiteTuple::Two(a.min(b), a.max(b))),
            _ => None,
        }
    }

    pub fn sites(&self) -> Vec<usize> {
        match *self {
            SiteTuple::One(n) => vec![n],
            SiteTuple::Two(n, m) => vec![n, m],
        }
    }

    pub fn contains(&self, site: usize) -> bool {
        match *self {
            SiteTuple::One(n) => n == site,
            SiteTuple::Two(n, m) => n == site || m == site,
        }
    }

    pub fn excitations(&self) -> usize {
        match self {
            SiteTuple::One(_) => 1,
            SiteTuple::Two(..) => 2,
        }
    }
}

impl fmt::Display for SiteTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteTuple::One(n) => write!(f, "({n})"),
            SiteTuple::Two(n, m) => write!(f, "({n},{m})"),
        }
    }
}

/// Lexicographically ordered basis of a fixed-excitation sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    n_sites: usize,
    excitations: usize,
    states: Vec<SiteTuple>,
}

impl SectorBasis {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn excitations(&self) -> usize {
        self.excitations
    }

    pub fn states(&self) -> &[SiteTuple] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dense index of a basis tuple, computed from its lexicographic rank.
    pub fn index_of(&self, t: SiteTuple) -> Option<usize> {
        let n_sites = self.n_sites;
        match (self.excitations, t) {
            (1, SiteTuple::One(n)) if (1..=n_sites).contains(&n) => Some(n - 1),
            (2, SiteTuple::Two(n, m)) if n >= 1 && n < m && m <= n_sites => {
                let before = (n - 1) * n_sites - (n - 1) * n / 2;
                Some(before + (m - n - 1))
            }
            _ => None,
        }
    }
}

pub fn build_basis(spec: &ChainSpec, excitations: usize) -> Result<SectorBasis> {
    let n_sites = spec.n_sites;
    let states = match excitations {
        1 => (1..=n_sites).map(SiteTuple::One).collect(),
        2 => (1..=n_sites)
            .flat_map(|n| (n + 1..=n_sites).map(move |m| SiteTuple::Two(n, m)))
            .collect(),
        k => return Err(Error::UnsupportedSector(k)),
    };
    Ok(SectorBasis {
        n_sites,
        excitations,
        states,
    })
}

/// Dense sector Hamiltonian with the all-down energy subtracted.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub basis: SectorBasis,
    pub entries: DenseMatrix,
    /// E0 that was subtracted from the diagonal.
    pub ground_energy: f64,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn get(&self, a: SiteTuple, b: SiteTuple) -> Option<f64> {
        let i = self.basis.index_of(a)?;
        let j = self.basis.index_of(b)?;
        Some(self.entries[(i, j)])
    }
}

/// Largest chain the bitmask-based direct builder accepts.
pub const MAX_DIRECT_SITES: usize = 128;

fn site_bit(n: usize) -> u128 {
    1u128 << (n - 1)
}

fn tuple_to_config(t: SiteTuple) -> u128 {
    t.sites().into_iter().fold(0, |acc, n| acc | site_bit(n))
}

fn config_to_tuple(config: u128) -> Option<SiteTuple> {
    let sites: Vec<usize> = (0..128)
        .filter(|b| config & (1u128 << b) != 0)
        .map(|b| b + 1)
        .collect();
    SiteTuple::from_sites(&sites)
}

#[derive(Clone, Copy)]
enum Pauli {
    X,
    Y,
    Z,
}

/// Acts with one Pauli matrix on `site`; spin up (bit set) is the +1 eigenstate of σᶻ.
fn apply_pauli(p: Pauli, site: usize, config: u128, amp: Complex64) -> (u128, Complex64) {
    let bit = site_bit(site);
    let up = config & bit != 0;
    match p {
        Pauli::X => (config ^ bit, amp),
        // σʸ|↑⟩ = i|↓⟩, σʸ|↓⟩ = −i|↑⟩
        Pauli::Y => (
            config ^ bit,
            amp * if up { Complex64::i() } else { -Complex64::i() },
        ),
        Pauli::Z => (config, if up { amp } else { -amp }),
    }
}

/// Image H|config⟩ in the full spin space, before subtracting E0.
///
/// Every Pauli string of the Hamiltonian is applied literally, so
/// amplitudes that leave the sector (σ⁺σ⁺ pieces of σˣσˣ + σʸσʸ) are
/// generated and must cancel.
pub fn apply_hamiltonian(spec: &ChainSpec, config: u128) -> HashMap<u128, Complex64> {
    let mut out: HashMap<u128, Complex64> = HashMap::new();
    let one = Complex64::new(1.0, 0.0);
    for n in 1..=spec.n_sites {
        let (c, a) = apply_pauli(Pauli::Z, n, config, one * (0.5 * spec.site_energy(n)));
        *out.entry(c).or_default() += a;
    }
    for (a, b) in spec.bonds() {
        for (p, coupling) in [
            (Pauli::X, spec.j),
            (Pauli::Y, spec.j),
            (Pauli::Z, spec.j_delta()),
        ] {
            let (c1, amp1) = apply_pauli(p, a, config, one * (coupling / 4.0));
            let (c2, amp2) = apply_pauli(p, b, c1, amp1);
            *out.entry(c2).or_default() += amp2;
        }
    }
    out.retain(|_, amp| amp.norm() != 0.0);
    out
}

/// Sector Hamiltonian obtained by applying the spin Hamiltonian to each basis state.
pub fn build_hamiltonian_direct(
    spec: &ChainSpec,
    basis: &SectorBasis,
) -> Result<HamiltonianMatrix> {
    if basis.n_sites != spec.n_sites {
        return Err(Error::BasisMismatch);
    }
    if spec.n_sites > MAX_DIRECT_SITES {
        return Err(Error::InvalidSpec(format!(
            "direct construction supports at most {MAX_DIRECT_SITES} sites"
        )));
    }
    let e0 = ground_state_offset(spec);
    let dim = basis.len();
    let mut h = DenseMatrix::zeros(dim);
    for (i, &state) in basis.states.iter().enumerate() {
        let image = apply_hamiltonian(spec, tuple_to_config(state));
        for (config, amp) in image {
            assert!(
                config.count_ones() as usize == basis.excitations,
                "Hamiltonian mixed sectors: {state} -> {config:#b}"
            );
            assert!(amp.im == 0.0, "non-real matrix element {amp} from {state}");
            let target = config_to_tuple(config)
                .and_then(|t| basis.index_of(t))
                .expect("in-sector configuration has a basis index");
            h[(target, i)] += amp.re;
        }
        h[(i, i)] -= e0;
    }
    Ok(HamiltonianMatrix {
        basis: basis.clone(),
        entries: h,
        ground_energy: e0,
    })
}

/// One-excitation Hamiltonian written out from the single-flip Schrödinger equation.
pub fn build_one_exc_transcribed(spec: &ChainSpec) -> HamiltonianMatrix {
    let basis = build_basis(spec, 1).expect("one-excitation basis");
    let n_sites = spec.n_sites;
    let half_j = spec.j / 2.0;
    let edge = spec.j_delta() / 2.0;
    let mut h = DenseMatrix::zeros(n_sites);
    for n in 1..=n_sites {
        let mut diag = spec.eps1();
        if n == spec.n0 {
            diag += spec.g;
        }
        if spec.boundary == Boundary::Open {
            if n == 1 {
                diag += edge;
            }
            if n == n_sites {
                diag += edge;
            }
        }
        h[(n - 1, n - 1)] = diag;
    }
    for (a, b) in spec.bonds() {
        h[(a - 1, b - 1)] = half_j;
        h[(b - 1, a - 1)] = half_j;
    }
    HamiltonianMatrix {
        basis,
        entries: h,
        ground_energy: ground_state_offset(spec),
    }
}

/// Whether sites n < m are nearest neighbours (including the ring bond).
fn adjacent(spec: &ChainSpec, n: usize, m: usize) -> bool {
    m == n + 1 || (spec.boundary == Boundary::Closed && n == 1 && m == spec.n_sites)
}

/// States reached from `t` by moving one excitation to a neighbouring empty site.
///
/// Closed rings use a(n, m) = a(m, n + N): each excitation hops in unwrapped
/// coordinates, moves onto an occupied site are dropped, and the result is
/// folded back onto an ordered pair.
pub fn hop_targets(spec: &ChainSpec, t: SiteTuple) -> Vec<SiteTuple> {
    let n_sites = spec.n_sites as isize;
    let closed = spec.boundary == Boundary::Closed;
    let inside = |a: isize| closed || (1..=n_sites).contains(&a);
    match t {
        SiteTuple::One(n) => {
            let n = n as isize;
            let mut out: Vec<SiteTuple> = [n - 1, n + 1]
                .into_iter()
                .filter(|&a| inside(a))
                .map(|a| SiteTuple::One(spec.wrap(a)))
                .collect();
            out.dedup();
            out
        }
        SiteTuple::Two(n, m) => {
            let (n, m) = (n as isize, m as isize);
            [(n - 1, m), (n + 1, m), (n, m - 1), (n, m + 1)]
                .into_iter()
                .filter(|&(a, b)| inside(a) && inside(b))
                .filter_map(|(a, b)| {
                    let (wa, wb) = (spec.wrap(a), spec.wrap(b));
                    (wa != wb).then(|| SiteTuple::Two(wa.min(wb), wa.max(wb)))
                })
                .collect()
        }
    }
}

/// Two-excitation Hamiltonian written out from the pair Schrödinger equation.
///
/// Open chains carry the JΔ/2 edge term of the one-excitation equation for
/// each excitation sitting on site 1 or N.
pub fn build_two_exc_transcribed(spec: &ChainSpec) -> HamiltonianMatrix {
    let basis = build_basis(spec, 2).expect("two-excitation basis");
    let n_sites = spec.n_sites;
    let half_j = spec.j / 2.0;
    let mut h = DenseMatrix::zeros(basis.len());
    for (i, &state) in basis.states.iter().enumerate() {
        let SiteTuple::Two(n, m) = state else {
            unreachable!("two-excitation basis holds pairs")
        };
        let mut diag = 2.0 * spec.eps1();
        if n == spec.n0 {
            diag += spec.g;
        }
        if m == spec.n0 {
            diag += spec.g;
        }
        if adjacent(spec, n, m) {
            diag += spec.j_delta();
        }
        if spec.boundary == Boundary::Open {
            if n == 1 {
                diag += spec.j_delta() / 2.0;
            }
            if m == n_sites {
                diag += spec.j_delta() / 2.0;
            }
        }
        h[(i, i)] = diag;

        for target in hop_targets(spec, state) {
            let j = basis.index_of(target).expect("pair inside the chain");
            h[(i, j)] = half_j;
        }
    }
    HamiltonianMatrix {
        basis,
        entries: h,
        ground_energy: ground_state_offset(spec),
    }
}

/// Transcribed Hamiltonian for the requested sector.
pub fn build_hamiltonian(spec: &ChainSpec, excitations: usize) -> Result<HamiltonianMatrix> {
    match excitations {
        1 => Ok(build_one_exc_transcribed(spec)),
        2 => Ok(build_two_exc_transcribed(spec)),
        k => Err(Error::UnsupportedSector(k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, boundary: Boundary, j: f64, delta: f64, eps: f64, g: f64, n0: usize) -> ChainSpec {
        ChainSpec::new(n, boundary, j, delta, eps, g, n0).unwrap()
    }

    #[test]
    fn ground_offset_examples() {
        let open = spec(4, Boundary::Open, 1.0, 2.0, 0.0, 0.0, 1);
        assert_eq!(ground_state_offset(&open), 1.5);
        let tiny = spec(2, Boundary::Open, 0.5, 0.0, 1.0, 0.0, 1);
        assert_eq!(ground_state_offset(&tiny), -1.0);
        let ring = spec(4, Boundary::Closed, 1.0, 2.0, 0.0, 0.0, 1);
        assert_eq!(ground_state_offset(&ring), 2.0);
    }

    #[test]
    fn ground_offset_matches_all_down_energy() {
        let s = spec(7, Boundary::Closed, 0.75, -1.5, 3.25, 0.5, 4);
        let image = apply_hamiltonian(&s, 0);
        assert_eq!(image.len(), 1);
        assert_eq!(image[&0].re, ground_state_offset(&s));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ChainSpec::new(6, Boundary::Open, 0.0, 1.0, 0.0, 0.0, 1).is_err());
        assert!(ChainSpec::new(6, Boundary::Open, 1.0, 1.0, 0.0, 0.0, 0).is_err());
        assert!(ChainSpec::new(6, Boundary::Open, 1.0, 1.0, 0.0, 0.0, 7).is_err());
        assert!(ChainSpec::new(2, Boundary::Closed, 1.0, 1.0, 0.0, 0.0, 1).is_err());
        assert!(ChainSpec::new(6, Boundary::Open, 1.0, f64::NAN, 0.0, 0.0, 1).is_err());
    }

    #[test]
    fn eps1_is_derived() {
        let s = spec(5, Boundary::Open, 2.0, 3.0, 10.0, 0.0, 1);
        assert_eq!(s.eps1(), 4.0);
    }

    #[test]
    fn basis_enumeration() {
        let s = spec(4, Boundary::Open, 1.0, 0.0, 0.0, 0.0, 1);
        let b1 = build_basis(&s, 1).unwrap();
        assert_eq!(b1.states(), &(1..=4).map(SiteTuple::One).collect::<Vec<_>>()[..]);
        let b2 = build_basis(&s, 2).unwrap();
        let expected: Vec<_> = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
            .iter()
            .map(|&(n, m)| SiteTuple::Two(n, m))
            .collect();
        assert_eq!(b2.states(), &expected[..]);
        let s10 = spec(10, Boundary::Closed, 1.0, 0.0, 0.0, 0.0, 1);
        let b = build_basis(&s10, 2).unwrap();
        assert_eq!(b.len(), 45);
        for (i, &t) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(t), Some(i));
        }
        assert!(matches!(build_basis(&s, 3), Err(Error::UnsupportedSector(3))));
        assert!(matches!(build_basis(&s, 0), Err(Error::UnsupportedSector(0))));
    }

    #[test]
    fn one_exc_open_three_sites() {
        let s = spec(3, Boundary::Open, 1.0, 2.0, 5.0, 0.0, 2);
        let b = build_basis(&s, 1).unwrap();
        let direct = build_hamiltonian_direct(&s, &b).unwrap();
        let expected = DenseMatrix::from_row_major(
            3,
            vec![4.0, 0.5, 0.0, 0.5, 3.0, 0.5, 0.0, 0.5, 4.0],
        );
        assert_eq!(direct.entries, expected);
        assert_eq!(build_one_exc_transcribed(&s).entries, expected);
    }

    #[test]
    fn two_exc_open_three_sites_edge_pair() {
        // (1,2): one antiparallel bond, i.e. 2ε1 + JΔ + JΔ/2 from the edge.
        let s = spec(3, Boundary::Open, 1.0, 2.0, 5.0, 0.0, 3);
        let b = build_basis(&s, 2).unwrap();
        let direct = build_hamiltonian_direct(&s, &b).unwrap();
        let e = direct.get(SiteTuple::Two(1, 2), SiteTuple::Two(1, 2)).unwrap();
        assert_eq!(e, 2.0 * s.eps1() + s.j_delta() + s.j_delta() / 2.0);
        assert_eq!(direct.entries, build_two_exc_transcribed(&s).entries);
    }

    #[test]
    fn closed_one_exc_diagonal_and_two_site_open() {
        let s = spec(5, Boundary::Closed, 1.0, 0.5, 1.0, 2.0, 3);
        let h = build_one_exc_transcribed(&s);
        let eps1 = s.eps1();
        let diag: Vec<f64> = (0..5).map(|i| h.entries[(i, i)]).collect();
        assert_eq!(diag, vec![eps1, eps1, eps1 + 2.0, eps1, eps1]);
        assert_eq!(h.entries[(0, 4)], 0.5);

        let two = spec(2, Boundary::Open, 0.8, 0.0, 0.0, 0.0, 1);
        let h2 = build_one_exc_transcribed(&two);
        assert_eq!(h2.entries[(0, 1)], 0.4);
        assert_eq!(h2.entries[(0, 0)], 0.0);
    }

    #[test]
    fn two_exc_pair_next_to_defect() {
        let s = spec(4, Boundary::Open, 1.0, 3.0, 4.0, 0.5, 2);
        let h = build_two_exc_transcribed(&s);
        let e = h.get(SiteTuple::Two(2, 3), SiteTuple::Two(2, 3)).unwrap();
        assert_eq!(e, 2.0 * s.eps1() + s.j_delta() + 0.5);
    }

    #[test]
    fn ring_wrap_pair_is_adjacent() {
        let s = spec(6, Boundary::Closed, 1.0, 2.5, 0.0, 0.0, 3);
        let h = build_two_exc_transcribed(&s);
        let wrap = h.get(SiteTuple::Two(1, 6), SiteTuple::Two(1, 6)).unwrap();
        assert_eq!(wrap, 2.0 * s.eps1() + s.j_delta());
        // (1,6) may hop to (2,6) and (1,5) but never onto itself.
        assert_eq!(h.get(SiteTuple::Two(1, 6), SiteTuple::Two(2, 6)), Some(0.5));
        assert_eq!(h.get(SiteTuple::Two(1, 6), SiteTuple::Two(1, 5)), Some(0.5));
        let b = build_basis(&s, 2).unwrap();
        let direct = build_hamiltonian_direct(&s, &b).unwrap();
        assert_eq!(direct.entries, h.entries);
    }

    #[test]
    fn direct_builder_never_leaves_sector() {
        let s = spec(5, Boundary::Closed, 1.25, -0.75, 2.0, 1.5, 2);
        for config in [0b00001u128, 0b00011, 0b10001, 0b01010] {
            let flips = config.count_ones();
            for c in apply_hamiltonian(&s, config).keys() {
                assert_eq!(c.count_ones(), flips);
            }
        }
    }

    #[test]
    fn basis_mismatch_rejected() {
        let s = spec(5, Boundary::Open, 1.0, 0.0, 0.0, 0.0, 1);
        let other = spec(6, Boundary::Open, 1.0, 0.0, 0.0, 0.0, 1);
        let b = build_basis(&other, 1).unwrap();
        assert!(matches!(build_hamiltonian_direct(&s, &b), Err(Error::BasisMismatch)));
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let s = spec(10, Boundary::Closed, 1.0, 10.0, 10.0, 2.5, 5);
        let js = s.to_json().unwrap();
        assert!(js.contains("\"N\":10") && js.contains("\"boundary\":\"closed\""));
        assert_eq!(ChainSpec::from_json(&js).unwrap(), s);
        let bad = r#"{"N":10,"boundary":"closed","J":1,"Delta":1,"eps":0,"g":0,"n0":1,"extra":1}"#;
        assert!(ChainSpec::from_json(bad).is_err());
        let zero_j = r#"{"N":10,"boundary":"open","J":0,"Delta":1,"eps":0,"g":0,"n0":1}"#;
        assert!(ChainSpec::from_json(zero_j).is_err());
    }

    #[test]
    fn off_diagonal_row_sums_bounded() {
        let s = spec(9, Boundary::Closed, -1.5, 2.0, 0.0, 1.0, 4);
        for k in [1, 2] {
            let h = build_hamiltonian(&s, k).unwrap();
            for i in 0..h.dim() {
                let off: f64 = (0..h.dim())
                    .filter(|&j| j != i)
                    .map(|j| h.entries[(i, j)].abs())
                    .sum();
                assert!(off <= 2.0 * s.j().abs() * k as f64 + 1e-15);
            }
            assert!(h.entries.is_symmetric());
        }
    }
}
