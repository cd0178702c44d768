//! Small dense complex linear algebra: fixed-size 2x2 / 3x3 matrices for
//! group elements, a Hermitian Jacobi eigensolver and a one-sided Jacobi
//! SVD for the commutant rank computations.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const C_ZERO: C64 = C64::new(0.0, 0.0);
pub const C_ONE: C64 = C64::new(1.0, 0.0);
pub const C_I: C64 = C64::new(0.0, 1.0);

/// Dense n x n complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    /// row-major, length n*n
    pub a: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            a: vec![C_ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = C_ONE;
        }
        m
    }

    pub fn from_rows(n: usize, rows: &[C64]) -> Self {
        assert_eq!(rows.len(), n * n);
        CMat {
            n,
            a: rows.to_vec(),
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.a[i * self.n + j] = v;
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[j * n + i] = self.a[i * n + j].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == C_ZERO {
                    continue;
                }
                for j in 0..n {
                    m.a[i * n + j] += aik * other.a[k * n + j];
                }
            }
        }
        m
    }

    pub fn add(&self, other: &CMat) -> CMat {
        let mut m = self.clone();
        for (x, y) in m.a.iter_mut().zip(other.a.iter()) {
            *x += *y;
        }
        m
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        let mut m = self.clone();
        for (x, y) in m.a.iter_mut().zip(other.a.iter()) {
            *x -= *y;
        }
        m
    }

    pub fn scale(&self, s: C64) -> CMat {
        let mut m = self.clone();
        for x in m.a.iter_mut() {
            *x *= s;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.a[i * self.n + i]).sum()
    }

    pub fn det(&self) -> C64 {
        match self.n {
            1 => self.a[0],
            2 => self.a[0] * self.a[3] - self.a[1] * self.a[2],
            3 => {
                let a = &self.a;
                a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                    + a[2] * (a[3] * a[7] - a[4] * a[6])
            }
            _ => panic!("det only implemented for n <= 3"),
        }
    }

    /// Max-norm of U^dagger U - I, the unitarity drift.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().mul(self);
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { C_ONE } else { C_ZERO };
                let d = (g.at(i, j) - target).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Re-orthonormalize the columns (modified Gram-Schmidt) and rescale
    /// the last column so the determinant is exactly unimodular, then
    /// divide the last column by the residual determinant phase so that
    /// det = 1 for special-unitary inputs.
    pub fn reunitarize_special(&mut self) {
        let n = self.n;
        // modified Gram-Schmidt on columns
        for j in 0..n {
            for k in 0..j {
                let mut dot = C_ZERO;
                for i in 0..n {
                    dot += self.at(i, k).conj() * self.at(i, j);
                }
                for i in 0..n {
                    let v = self.at(i, j) - dot * self.at(i, k);
                    self.set(i, j, v);
                }
            }
            let mut nrm = 0.0f64;
            for i in 0..n {
                nrm += self.at(i, j).norm_sqr();
            }
            let nrm = nrm.sqrt();
            for i in 0..n {
                let v = self.at(i, j) / nrm;
                self.set(i, j, v);
            }
        }
        // det is now a unit phase; push its inverse into the last column
        let d = self.det();
        let phase = d / d.norm();
        for i in 0..n {
            let v = self.at(i, n - 1) / phase;
            self.set(i, n - 1, v);
        }
    }

    /// Matrix exponential by scaling-and-squaring with a Taylor series.
    /// Adequate for the anti-Hermitian exponents used in proposals and
    /// octet tests (norms well below ~10).
    pub fn expm(&self) -> CMat {
        let n = self.n;
        let norm = self.max_abs() * n as f64;
        let mut squarings = 0u32;
        let mut scale = 1.0f64;
        while norm * scale > 0.25 {
            scale *= 0.5;
            squarings += 1;
        }
        let x = self.scale(C64::new(scale, 0.0));
        let mut term = CMat::identity(n);
        let mut sum = CMat::identity(n);
        for k in 1..=20 {
            term = term.mul(&x).scale(C64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }
}

/// Eigen-decomposition of a Hermitian matrix by the cyclic Jacobi method.
/// Returns (eigenvalues ascending, eigenvector matrix V with columns
/// matching the eigenvalue order), A = V diag(w) V^dagger.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.n;
    let mut h = a.clone();
    let mut v = CMat::identity(n);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += h.at(i, j).norm_sqr();
            }
        }
        if off < 1e-30 * (1.0 + h.max_abs() * h.max_abs()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = h.at(p, q);
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = h.at(p, p).re;
                let aqq = h.at(q, q).re;
                // unitary 2x2 rotation zeroing the (p,q) entry
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns rotation: new_p = c*p - s*conj(phase)... apply G
                // G = [[c, s*phase],[-s*conj(phase), c]] acting on (p,q)
                let sp = phase * s;
                for i in 0..n {
                    let hip = h.at(i, p);
                    let hiq = h.at(i, q);
                    h.set(i, p, hip * c - hiq * sp.conj());
                    h.set(i, q, hip * sp + hiq * c);
                }
                for j in 0..n {
                    let hpj = h.at(p, j);
                    let hqj = h.at(q, j);
                    h.set(p, j, hpj * c - hqj * sp);
                    h.set(q, j, hpj * sp.conj() + hqj * c);
                }
                for i in 0..n {
                    let vip = v.at(i, p);
                    let viq = v.at(i, q);
                    v.set(i, p, vip * c - viq * sp.conj());
                    v.set(i, q, vip * sp + viq * c);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let eig: Vec<f64> = (0..n).map(|i| h.at(i, i).re).collect();
    order.sort_by(|&i, &j| eig[i].partial_cmp(&eig[j]).unwrap());
    let w: Vec<f64> = order.iter().map(|&i| eig[i]).collect();
    let mut vs = CMat::zeros(n);
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            vs.set(i, newj, v.at(i, oldj));
        }
    }
    (w, vs)
}

/// Singular values of an m x n complex matrix (m >= n) by one-sided
/// Jacobi orthogonalization of the columns. Small singular values are
/// computed to high relative accuracy, which the commutant rank test
/// relies on.
pub fn singular_values(m: usize, n: usize, a: &[C64]) -> Vec<f64> {
    assert_eq!(a.len(), m * n);
    // column-major copy
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..m).map(|i| a[i * n + j]).collect())
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = C_ZERO;
                for i in 0..m {
                    app += cols[p][i].norm_sqr();
                    aqq += cols[q][i].norm_sqr();
                    apq += cols[p][i].conj() * cols[q][i];
                }
                if apq.norm() <= 1e-30 * (app * aqq).sqrt() + 1e-300 {
                    continue;
                }
                rotated = true;
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s;
                for i in 0..m {
                    let xp = cols[p][i];
                    let xq = cols[q][i];
                    cols[p][i] = xp * c - xq * sp.conj();
                    cols[q][i] = xp * sp + xq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for k in 0..(n + 1) / 2 {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut x = (core::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pd(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    (nodes, weights)
}

fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate f over [a, b] with composite Gauss-Legendre panels.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            total += w * half * f(mid + half * x);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigen_of_diagonal() {
        let mut a = CMat::zeros(3);
        a.set(0, 0, c(2.0, 0.0));
        a.set(1, 1, c(-1.0, 0.0));
        a.set(2, 2, c(0.5, 0.0));
        let (w, _) = hermitian_eigen(&a);
        assert_abs_diff_eq!(w[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(w[2], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn eigen_reconstructs_hermitian() {
        let a = CMat::from_rows(
            3,
            &[
                c(1.0, 0.0),
                c(0.3, 0.4),
                c(-0.2, 0.1),
                c(0.3, -0.4),
                c(-0.5, 0.0),
                c(0.6, -0.3),
                c(-0.2, -0.1),
                c(0.6, 0.3),
                c(0.25, 0.0),
            ],
        );
        let (w, v) = hermitian_eigen(&a);
        let mut d = CMat::zeros(3);
        for i in 0..3 {
            d.set(i, i, c(w[i], 0.0));
        }
        let rec = v.mul(&d).mul(&v.adjoint());
        assert!(rec.sub(&a).max_abs() < 1e-13);
        assert!(v.unitarity_defect() < 1e-13);
    }

    #[test]
    fn svd_detects_rank_deficiency() {
        // 4x3 matrix whose third column = col0 + col1
        let rows: Vec<C64> = (0..4)
            .flat_map(|i| {
                let x = c(1.0 + i as f64, 0.3 * i as f64);
                let y = c(-0.5 * i as f64, 1.0);
                [x, y, x + y]
            })
            .collect();
        let sv = singular_values(4, 3, &rows);
        assert_eq!(sv.len(), 3);
        assert!(sv[2] < 1e-14 * sv[0], "sv = {:?}", sv);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let v = integrate(|x| x * x * x * x, -1.0, 1.0, 1, 8);
        assert_abs_diff_eq!(v, 0.4, epsilon = 1e-14);
        let v = integrate(|x| (3.0 * x).sin(), 0.0, 2.0, 4, 16);
        assert_abs_diff_eq!(v, (1.0 - (6.0f64).cos()) / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn expm_of_antihermitian_is_unitary() {
        let h = CMat::from_rows(
            2,
            &[c(0.0, 0.4), c(0.3, 0.2), c(-0.3, 0.2), c(0.0, -0.4)],
        );
        let u = h.expm();
        assert!(u.unitarity_defect() < 1e-13);
    }
}
