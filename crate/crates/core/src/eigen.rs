//! Dense symmetric eigensolver and eigenbasis time propagation.
//!
//! Householder reduction to tridiagonal form followed by implicit-shift QL.
//! Eigenvectors are stored as the rows of a row-major matrix so that the
//! plane rotations of the QL sweep touch contiguous memory.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{HamiltonianMatrix, SectorBasis, SiteTuple};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Row k is the unit eigenvector for `values[k]`.
    pub vectors: DenseMatrix,
}

/// Eigen decomposition of a sector Hamiltonian.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// Row k is the eigenvector for `values[k]`, in the basis below.
    pub vectors: DenseMatrix,
    pub basis: SectorBasis,
    pub hamiltonian: DenseMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        self.vectors.row(k)
    }

    /// max_k ‖H v_k − λ_k v_k‖.
    pub fn max_residual(&self) -> f64 {
        (0..self.dim())
            .map(|k| {
                let v = self.vector(k);
                let hv = self.hamiltonian.mul_vec(v);
                hv.iter()
                    .zip(v)
                    .map(|(a, b)| (a - self.values[k] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// max |VᵀV − I| entry.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                let dot: f64 = self.vector(a).iter().zip(self.vector(b)).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

pub fn eigh(h: &HamiltonianMatrix) -> Result<EigenDecomposition> {
    let SymmetricEigen { values, vectors } = eigh_dense(&h.entries)?;
    Ok(EigenDecomposition {
        values,
        vectors,
        basis: h.basis.clone(),
        hamiltonian: h.entries.clone(),
    })
}

pub fn eigh_dense(m: &DenseMatrix) -> Result<SymmetricEigen> {
    let n = m.dim();
    let mut a = m.clone();
    let (mut d, mut e, taus) = tridiagonalize(&mut a);
    let mut vt = accumulate_transposed(&a, &taus);
    tridiagonal_ql(&mut d, &mut e, Some(&mut vt))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = DenseMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.row_mut(dst).copy_from_slice(vt.row(src));
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &DenseMatrix) -> Result<Vec<f64>> {
    let mut a = m.clone();
    let (mut d, mut e, _) = tridiagonalize(&mut a);
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction using only the lower triangle of `a`.
///
/// Returns (diagonal, off-diagonal, τ). The reflector for column k is left
/// in `a[i][k]`, i > k, with H_k = I − τ_k v vᵀ.
fn tridiagonalize(a: &mut DenseMatrix) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut taus = vec![0.0; n];
    if n == 0 {
        return (d, e, taus);
    }
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        d[k] = a[(k, k)];
        let start = k + 1;
        let norm2: f64 = (start..n).map(|i| a[(i, k)].powi(2)).sum();
        let tail: f64 = norm2 - a[(start, k)].powi(2);
        if tail == 0.0 {
            e[k] = a[(start, k)];
            taus[k] = 0.0;
            for i in start..n {
                a[(i, k)] = if i == start { 1.0 } else { 0.0 };
            }
            continue;
        }
        let x0 = a[(start, k)];
        let alpha = -x0.signum() * norm2.sqrt();
        for i in start..n {
            v[i] = a[(i, k)];
        }
        v[start] -= alpha;
        let vtv: f64 = v[start..n].iter().map(|x| x * x).sum();
        let tau = 2.0 / vtv;
        e[k] = alpha;
        taus[k] = tau;

        // p = τ A22 v, reading the lower triangle row by row.
        p[start..n].iter_mut().for_each(|x| *x = 0.0);
        for i in start..n {
            let row = &a.row(i)[start..i];
            let vi = v[i];
            let mut acc = a[(i, i)] * vi;
            for (j, &aij) in row.iter().enumerate() {
                acc += aij * v[start + j];
                p[start + j] += aij * vi;
            }
            p[i] += acc;
        }
        for x in &mut p[start..n] {
            *x *= tau;
        }
        let kdot: f64 = p[start..n].iter().zip(&v[start..n]).map(|(a, b)| a * b).sum();
        let half = 0.5 * tau * kdot;
        for i in start..n {
            p[i] -= half * v[i];
        }
        // A22 −= v wᵀ + w vᵀ on the lower triangle (w stored in p).
        for i in start..n {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a.row_mut(i)[start..=i];
            for (j, aij) in row.iter_mut().enumerate() {
                *aij -= vi * p[start + j] + wi * v[start + j];
            }
        }
        for i in start..n {
            a[(i, k)] = v[i];
        }
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2, n - 2)];
        e[n - 2] = a[(n - 1, n - 2)];
    }
    d[n - 1] = a[(n - 1, n - 1)];
    e[n - 1] = 0.0;
    (d, e, taus)
}

/// Forms Qᵀ, Q = H_0 H_1 ⋯ H_{n−3}, from the stored reflectors.
fn accumulate_transposed(a: &DenseMatrix, taus: &[f64]) -> DenseMatrix {
    let n = a.dim();
    let mut q = DenseMatrix::identity(n);
    let mut w = vec![0.0; n];
    for k in (0..n.saturating_sub(2)).rev() {
        let tau = taus[k];
        if tau == 0.0 {
            continue;
        }
        let start = k + 1;
        w[start..n].iter_mut().for_each(|x| *x = 0.0);
        for i in start..n {
            let vi = a[(i, k)];
            if vi == 0.0 {
                continue;
            }
            for (wj, qij) in w[start..n].iter_mut().zip(&q.row(i)[start..n]) {
                *wj += vi * qij;
            }
        }
        for x in &mut w[start..n] {
            *x *= tau;
        }
        for i in start..n {
            let vi = a[(i, k)];
            if vi == 0.0 {
                continue;
            }
            for (qij, wj) in q.row_mut(i)[start..n].iter_mut().zip(&w[start..n]) {
                *qij -= vi * wj;
            }
        }
    }
    let mut qt = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            qt[(j, i)] = q[(i, j)];
        }
    }
    qt
}

/// Implicit QL on a symmetric tridiagonal matrix; e[i] couples i and i+1.
///
/// Rotations are applied to the rows of `vt` when given.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut vt: Option<&mut DenseMatrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let cap = 30 * n;
    let mut total = 0usize;
    e[n - 1] = 0.0;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total += 1;
            if total > cap {
                let residual = e.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
                return Err(Error::NoConvergence {
                    iterations: total - 1,
                    residual,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(vt) = vt.as_deref_mut() {
                    rotate_rows(vt, i, s, c);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn rotate_rows(vt: &mut DenseMatrix, i: usize, s: f64, c: f64) {
    let (lo, hi) = vt.adjacent_rows_mut(i);
    for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
        let f = *y;
        *y = s * *x + c * f;
        *x = c * *x - s * f;
    }
}

/// Sampled observables of a propagated state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub labels: Vec<SiteTuple>,
    /// `observables[i][t]` = |a(labels[i])|² at `times[t]`.
    pub observables: Vec<Vec<f64>>,
    pub norm: Vec<f64>,
    pub energy: Vec<f64>,
}

impl EvolutionTrace {
    pub fn series(&self, label: SiteTuple) -> Option<&[f64]> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| self.observables[i].as_slice())
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().fold(0.0, |m, n| m.max((n - 1.0).abs()))
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy.iter().fold(0.0, |m, e| m.max((e - e0).abs()))
    }
}

/// Allowed deviation of ‖ψ0‖ from one.
pub const NORM_TOLERANCE: f64 = 1e-9;

fn check_state(decomp: &EigenDecomposition, psi0: &[Complex64]) -> Result<()> {
    if psi0.len() != decomp.dim() {
        return Err(Error::Dimension {
            expected: decomp.dim(),
            got: psi0.len(),
        });
    }
    let norm = psi0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Unnormalized(norm));
    }
    Ok(())
}

/// Eigencomponents c_k = v_kᵀ ψ0.
fn project(decomp: &EigenDecomposition, psi0: &[Complex64]) -> Vec<Complex64> {
    (0..decomp.dim())
        .map(|k| {
            decomp
                .vector(k)
                .iter()
                .zip(psi0)
                .map(|(v, a)| a * v)
                .sum()
        })
        .collect()
}

fn state_at(decomp: &EigenDecomposition, coeffs: &[Complex64], t: f64) -> Vec<Complex64> {
    let n = decomp.dim();
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in coeffs.iter().enumerate() {
        let amp = c * Complex64::from_polar(1.0, -decomp.values[k] * t);
        for (p, v) in psi.iter_mut().zip(decomp.vector(k)) {
            *p += amp * v;
        }
    }
    psi
}

/// ψ(t) = V e^{−iΛt} Vᵀ ψ0 at a single time.
pub fn propagate(decomp: &EigenDecomposition, psi0: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    check_state(decomp, psi0)?;
    Ok(state_at(decomp, &project(decomp, psi0), t))
}

fn expectation(h: &DenseMatrix, psi: &[Complex64]) -> f64 {
    let n = psi.len();
    let mut acc = 0.0;
    for i in 0..n {
        let hpsi: Complex64 = h.row(i).iter().zip(psi).map(|(hij, a)| a * hij).sum();
        acc += (psi[i].conj() * hpsi).re;
    }
    acc
}

/// Samples |a(label)|², the norm and ⟨H⟩ on a time grid.
pub fn evolve(
    decomp: &EigenDecomposition,
    psi0: &[Complex64],
    times: &[f64],
    labels: &[SiteTuple],
) -> Result<EvolutionTrace> {
    check_state(decomp, psi0)?;
    let idx: Vec<usize> = labels
        .iter()
        .map(|&l| {
            decomp.basis.index_of(l).ok_or_else(|| {
                Error::MissingObservable(format!("{l} is not a basis state of this sector"))
            })
        })
        .collect::<Result<_>>()?;
    let coeffs = project(decomp, psi0);
    let mut observables = vec![Vec::with_capacity(times.len()); labels.len()];
    let mut norm = Vec::with_capacity(times.len());
    let mut energy = Vec::with_capacity(times.len());
    for &t in times {
        let psi = state_at(decomp, &coeffs, t);
        for (series, &i) in observables.iter_mut().zip(&idx) {
            series.push(psi[i].norm_sqr());
        }
        norm.push(psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt());
        energy.push(expectation(&decomp.hamiltonian, &psi));
    }
    Ok(EvolutionTrace {
        times: times.to_vec(),
        labels: labels.to_vec(),
        observables,
        norm,
        energy,
    })
}

/// Basis vector |t⟩ as a complex amplitude vector.
pub fn basis_state(basis: &SectorBasis, t: SiteTuple) -> Result<Vec<Complex64>> {
    let i = basis
        .index_of(t)
        .ok_or_else(|| Error::MissingObservable(format!("{t} is not in this sector")))?;
    let mut psi = vec![Complex64::new(0.0, 0.0); basis.len()];
    psi[i] = Complex64::new(1.0, 0.0);
    Ok(psi)
}
