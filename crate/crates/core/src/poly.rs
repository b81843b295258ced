//! Real-coefficient polynomials and their complex roots.
//!
//! Roots come from the eigenvalues of the balanced companion matrix
//! (shifted Hessenberg QR), followed by Newton polishing.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial stored as coefficients from the constant term upward.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    /// c·zᵏ.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let c = (0..len)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(0.0)
                    + other.coeffs.get(k).copied().unwrap_or(0.0)
            })
            .collect();
        Poly::new(c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// Synthetic division by (z − r); returns the quotient and remainder.
    pub fn divide_linear(&self, r: f64) -> (Poly, f64) {
        let n = self.degree();
        if n == 0 {
            return (Poly::new(vec![0.0]), self.coeffs[0]);
        }
        let mut q = vec![0.0; n];
        let mut carry = self.coeffs[n];
        for k in (0..n).rev() {
            q[k] = carry;
            carry = self.coeffs[k] + carry * r;
        }
        (Poly::new(q), carry)
    }

    /// Removes `count` factors of (z ∓ 1), each time picking the sign whose
    /// normalized residual is smaller and requiring it to be a genuine root.
    pub fn deflate_unit_roots(&self, count: usize) -> Result<(Poly, Vec<f64>)> {
        let mut p = self.clone();
        let mut removed = Vec::with_capacity(count);
        for _ in 0..count {
            let scale = p.abs_sum();
            let plus = p.eval_real(1.0).abs() / scale;
            let minus = p.eval_real(-1.0).abs() / scale;
            let r = if plus <= minus { 1.0 } else { -1.0 };
            let (q, rem) = p.divide_linear(r);
            if rem.abs() > 1e-8 * scale {
                return Err(Error::RootFinding(format!(
                    "expected a root at z = ±1 but |P(±1)|/Σ|c| = {:.3e}",
                    plus.min(minus)
                )));
            }
            removed.push(r);
            p = q;
        }
        Ok((p, removed))
    }

    /// Divides out (z ∓ 1) for as long as either is a root to relative `tol`.
    pub fn deflate_exact_unit_roots(&self, tol: f64) -> (Poly, Vec<f64>) {
        let mut p = self.clone();
        let mut removed = Vec::new();
        while p.degree() > 0 {
            let scale = p.abs_sum();
            let plus = p.eval_real(1.0).abs() / scale;
            let minus = p.eval_real(-1.0).abs() / scale;
            let r = if plus <= minus { 1.0 } else { -1.0 };
            if plus.min(minus) > tol {
                break;
            }
            p = p.divide_linear(r).0;
            removed.push(r);
        }
        (p, removed)
    }

    /// All complex roots, polished against this polynomial.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let zeros_at_origin = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        let reduced = Poly::new(self.coeffs[zeros_at_origin..].to_vec());
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
        if reduced.degree() > 0 {
            let raw = companion_eigenvalues(&reduced)?;
            roots.extend(raw.into_iter().map(|z| reduced.polish(z)));
        }
        Ok(roots)
    }

    /// Newton iteration that only accepts steps lowering |P|.
    pub fn polish(&self, mut z: Complex64) -> Complex64 {
        let (mut p, mut dp) = self.eval_with_derivative(z);
        for _ in 0..50 {
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            let candidate = z - step;
            let (pc, dpc) = self.eval_with_derivative(candidate);
            if !(pc.norm() < p.norm()) {
                break;
            }
            z = candidate;
            p = pc;
            dp = dpc;
            if step.norm() <= 1e-17 * z.norm().max(1.0) {
                break;
            }
        }
        z
    }

    /// |P(z)| relative to the largest coefficient.
    pub fn relative_residual(&self, z: Complex64) -> f64 {
        self.eval(z).norm() / self.max_abs_coeff()
    }
}

/// Eigenvalues of the companion matrix of a polynomial with nonzero constant term.
fn companion_eigenvalues(p: &Poly) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let lead = p.coeffs[n];
    // 1-based Hessenberg storage, row 0 / column 0 unused.
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    for k in 1..=n {
        a[1][k] = -p.coeffs[n - k] / lead;
    }
    for j in 2..=n {
        a[j][j - 1] = 1.0;
    }
    balance(&mut a, n);
    hessenberg_qr(&mut a, n)
}

fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 1..=n {
                    a[i][j] /= f;
                }
                for row in a.iter_mut().skip(1) {
                    row[i] *= f;
                }
            }
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Double-shift QR on an upper Hessenberg matrix (1-based), eigenvalues only.
fn hessenberg_qr(a: &mut [Vec<f64>], n: usize) -> Result<Vec<Complex64>> {
    const MAX_ITS: usize = 60;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = a[nn - 1][nn - 1];
                let mut w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITS {
                        return Err(Error::RootFinding(format!(
                            "companion QR stalled after {MAX_ITS} iterations"
                        )));
                    }
                    if its > 0 && its % 10 == 0 {
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    let mut z;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    for k in m..nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = if k != nn - 1 { a[k + 2][k - 1] } else { 0.0 };
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s == 0.0 {
                            continue;
                        }
                        if k == m {
                            if l != m {
                                a[k][k - 1] = -a[k][k - 1];
                            }
                        } else {
                            a[k][k - 1] = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for j in k..=nn {
                            p = a[k][j] + q * a[k + 1][j];
                            if k != nn - 1 {
                                p += r * a[k + 2][j];
                                a[k + 2][j] -= p * z;
                            }
                            a[k + 1][j] -= p * y;
                            a[k][j] -= p * x;
                        }
                        let mmin = nn.min(k + 3);
                        for i in l..=mmin {
                            p = x * a[i][k] + y * a[i][k + 1];
                            if k != nn - 1 {
                                p += z * a[i][k + 2];
                                a[i][k + 2] -= p * r;
                            }
                            a[i][k + 1] -= p * q;
                            a[i][k] -= p;
                        }
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn quadratic_real_roots() {
        let p = Poly::new(vec![2.0, -3.0, 1.0]);
        let r = sorted(p.roots().unwrap());
        assert!((r[0] - 1.0).norm() < 1e-14);
        assert!((r[1] - 2.0).norm() < 1e-14);
    }

    #[test]
    fn cyclotomic_roots() {
        let p = Poly::new({
            let mut c = vec![0.0; 13];
            c[0] = -1.0;
            c[12] = 1.0;
            c
        });
        let roots = p.roots().unwrap();
        assert_eq!(roots.len(), 12);
        for z in &roots {
            assert!((z.norm() - 1.0).abs() < 1e-13);
            assert!(p.relative_residual(*z) < 1e-13);
        }
        for k in 0..12 {
            let w = Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / 6.0);
            assert!(roots.iter().any(|z| (z - w).norm() < 1e-12));
        }
    }

    #[test]
    fn zero_root_and_trimming() {
        let p = Poly::new(vec![0.0, 0.0, -4.0, 0.0, 1.0, 0.0]);
        assert_eq!(p.degree(), 4);
        let r = p.roots().unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        assert!(r.iter().any(|z| (z - 2.0).norm() < 1e-14));
        assert!(r.iter().any(|z| (z + 2.0).norm() < 1e-14));
    }

    #[test]
    fn synthetic_division_and_deflation() {
        // (z − 1)²(z + 1)(z − 3)
        let p = Poly::new(vec![-1.0, 1.0])
            .mul(&Poly::new(vec![-1.0, 1.0]))
            .mul(&Poly::new(vec![1.0, 1.0]))
            .mul(&Poly::new(vec![-3.0, 1.0]));
        let (q, removed) = p.deflate_unit_roots(3).unwrap();
        assert_eq!(q.coeffs(), &[-3.0, 1.0]);
        let mut removed = removed;
        removed.sort_by(f64::total_cmp);
        assert_eq!(removed, vec![-1.0, 1.0, 1.0]);
        assert!(q.deflate_unit_roots(1).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = Poly::new(vec![1.0, -2.0, 0.5, 3.0, -1.0]);
        let z = Complex64::new(0.3, -0.7);
        let (_, dp) = p.eval_with_derivative(z);
        let h = 1e-6;
        let fd = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
        assert!((dp - fd).norm() < 1e-8);
    }

    proptest! {
        #[test]
        fn recovers_random_roots(seeds in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..12)) {
            // Build from conjugate pairs and reals so coefficients are real.
            let mut p = Poly::new(vec![1.0]);
            let mut expected = Vec::new();
            for (i, &(re, im)) in seeds.iter().enumerate() {
                if i % 2 == 0 {
                    p = p.mul(&Poly::new(vec![-re, 1.0]));
                    expected.push(Complex64::new(re, 0.0));
                } else {
                    let z = Complex64::new(re, im.abs() + 0.05);
                    p = p.mul(&Poly::new(vec![z.norm_sqr(), -2.0 * z.re, 1.0]));
                    expected.push(z);
                    expected.push(z.conj());
                }
            }
            let roots = p.roots().unwrap();
            prop_assert_eq!(roots.len(), expected.len());
            for z in &roots {
                prop_assert!(p.eval(*z).norm() <= 1e-9 * p.abs_sum() * (1.0 + z.norm()).powi(p.degree() as i32));
            }
        }
    }
}
