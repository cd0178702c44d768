//! Structure-group arithmetic for U(1), SU(2) and SU(3): exact products
//! and inverses, Haar sampling, conjugacy-class coordinates, characters,
//! Laplacian spectral data and finite-difference derivatives along an
//! orthonormal Lie-algebra basis.

use alloc::vec::Vec;
use core::f64::consts::PI;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigen, CMat, C64, C_ONE, C_ZERO};
use crate::{Error, Result};

/// Unitarity / determinant drift tolerance; elements are re-unitarized
/// whenever an operation pushes them past this.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    U1,
    Su2,
    Su3,
}

impl GroupKind {
    /// Real dimension of the Lie algebra.
    pub fn algebra_dim(self) -> usize {
        match self {
            GroupKind::U1 => 1,
            GroupKind::Su2 => 3,
            GroupKind::Su3 => 8,
        }
    }

    pub fn matrix_dim(self) -> usize {
        match self {
            GroupKind::U1 => 1,
            GroupKind::Su2 => 2,
            GroupKind::Su3 => 3,
        }
    }
}

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [C64; 4]);

/// 3x3 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [C64; 9]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([C_ONE, C_ZERO, C_ZERO, C_ONE]);

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }

    pub fn adjoint(&self) -> Mat2 {
        let a = &self.0;
        Mat2([a[0].conj(), a[2].conj(), a[1].conj(), a[3].conj()])
    }

    pub fn trace(&self) -> C64 {
        self.0[0] + self.0[3]
    }

    pub fn det(&self) -> C64 {
        self.0[0] * self.0[3] - self.0[1] * self.0[2]
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::from_rows(2, &self.0)
    }

    pub fn from_cmat(m: &CMat) -> Mat2 {
        let mut a = [C_ZERO; 4];
        a.copy_from_slice(&m.a);
        Mat2(a)
    }
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([
        C_ONE, C_ZERO, C_ZERO, C_ZERO, C_ONE, C_ZERO, C_ZERO, C_ZERO, C_ONE,
    ]);

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let a = &self.0;
        let b = &o.0;
        let mut r = [C_ZERO; 9];
        for i in 0..3 {
            for j in 0..3 {
                r[3 * i + j] =
                    a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
            }
        }
        Mat3(r)
    }

    pub fn adjoint(&self) -> Mat3 {
        let a = &self.0;
        let mut r = [C_ZERO; 9];
        for i in 0..3 {
            for j in 0..3 {
                r[3 * i + j] = a[3 * j + i].conj();
            }
        }
        Mat3(r)
    }

    pub fn trace(&self) -> C64 {
        self.0[0] + self.0[4] + self.0[8]
    }

    pub fn det(&self) -> C64 {
        let a = &self.0;
        a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
            + a[2] * (a[3] * a[7] - a[4] * a[6])
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::from_rows(3, &self.0)
    }

    pub fn from_cmat(m: &CMat) -> Mat3 {
        let mut a = [C_ZERO; 9];
        a.copy_from_slice(&m.a);
        Mat3(a)
    }
}

/// An element of one of the three structure groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GroupElement {
    /// e^{i 2 pi theta}, theta kept in [0, 1)
    U1(f64),
    Su2(Mat2),
    Su3(Mat3),
}

/// Conjugacy-class coordinates.
///
/// - U1: the angle theta itself;
/// - SU2: x in [0, 1] with pi x = arccos(Tr g / 2);
/// - SU3: the two leading eigenphases (t1, t2) in (-pi, pi], sorted
///   descending (the canonical alcove representative); the third
///   eigenphase is -(t1 + t2) mod 2 pi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClassCoordinates {
    U1(f64),
    Su2(f64),
    Su3(f64, f64),
}

impl ClassCoordinates {
    pub fn kind(&self) -> GroupKind {
        match self {
            ClassCoordinates::U1(_) => GroupKind::U1,
            ClassCoordinates::Su2(_) => GroupKind::Su2,
            ClassCoordinates::Su3(_, _) => GroupKind::Su3,
        }
    }

    pub fn identity(kind: GroupKind) -> Self {
        match kind {
            GroupKind::U1 => ClassCoordinates::U1(0.0),
            GroupKind::Su2 => ClassCoordinates::Su2(0.0),
            GroupKind::Su3 => ClassCoordinates::Su3(0.0, 0.0),
        }
    }
}

fn mod1(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl GroupElement {
    pub fn kind(&self) -> GroupKind {
        match self {
            GroupElement::U1(_) => GroupKind::U1,
            GroupElement::Su2(_) => GroupKind::Su2,
            GroupElement::Su3(_) => GroupKind::Su3,
        }
    }

    pub fn identity(kind: GroupKind) -> Self {
        match kind {
            GroupKind::U1 => GroupElement::U1(0.0),
            GroupKind::Su2 => GroupElement::Su2(Mat2::IDENTITY),
            GroupKind::Su3 => GroupElement::Su3(Mat3::IDENTITY),
        }
    }

    /// Group product. Panics if the kinds differ (usage error).
    pub fn multiply(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::U1(a), GroupElement::U1(b)) => GroupElement::U1(mod1(a + b)),
            (GroupElement::Su2(a), GroupElement::Su2(b)) => {
                GroupElement::Su2(a.mul(b)).normalized()
            }
            (GroupElement::Su3(a), GroupElement::Su3(b)) => {
                GroupElement::Su3(a.mul(b)).normalized()
            }
            _ => panic!(
                "group kind mismatch: {:?} * {:?}",
                self.kind(),
                other.kind()
            ),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::U1(t) => GroupElement::U1(mod1(-t)),
            GroupElement::Su2(m) => GroupElement::Su2(m.adjoint()),
            GroupElement::Su3(m) => GroupElement::Su3(m.adjoint()),
        }
    }

    /// Max-norm unitarity drift; 0 for U1 (the angle is exact).
    pub fn unitarity_defect(&self) -> f64 {
        match self {
            GroupElement::U1(_) => 0.0,
            GroupElement::Su2(m) => m.to_cmat().unitarity_defect(),
            GroupElement::Su3(m) => m.to_cmat().unitarity_defect(),
        }
    }

    /// Re-unitarize (and fix the determinant) when the drift exceeds
    /// [`UNITARITY_TOL`].
    pub fn normalized(self) -> GroupElement {
        match self {
            GroupElement::U1(t) => GroupElement::U1(mod1(t)),
            GroupElement::Su2(m) => {
                let cm = m.to_cmat();
                if cm.unitarity_defect() > UNITARITY_TOL
                    || (cm.det() - C_ONE).norm() > UNITARITY_TOL
                {
                    let mut cm = cm;
                    cm.reunitarize_special();
                    GroupElement::Su2(Mat2::from_cmat(&cm))
                } else {
                    GroupElement::Su2(m)
                }
            }
            GroupElement::Su3(m) => {
                let cm = m.to_cmat();
                if cm.unitarity_defect() > UNITARITY_TOL
                    || (cm.det() - C_ONE).norm() > UNITARITY_TOL
                {
                    let mut cm = cm;
                    cm.reunitarize_special();
                    GroupElement::Su3(Mat3::from_cmat(&cm))
                } else {
                    GroupElement::Su3(m)
                }
            }
        }
    }

    /// Conjugate h g h^{-1}.
    pub fn conjugate_by(&self, h: &GroupElement) -> GroupElement {
        h.multiply(self).multiply(&h.inverse())
    }

    pub fn to_cmat(&self) -> CMat {
        match self {
            GroupElement::U1(t) => {
                let mut m = CMat::zeros(1);
                m.set(0, 0, C64::from_polar(1.0, 2.0 * PI * t));
                m
            }
            GroupElement::Su2(m) => m.to_cmat(),
            GroupElement::Su3(m) => m.to_cmat(),
        }
    }

    /// Largest entrywise distance to another element (for tests).
    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        match (self, other) {
            (GroupElement::U1(a), GroupElement::U1(b)) => {
                let d = (a - b).abs();
                d.min(1.0 - d)
            }
            (GroupElement::Su2(a), GroupElement::Su2(b)) => a
                .0
                .iter()
                .zip(b.0.iter())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max),
            (GroupElement::Su3(a), GroupElement::Su3(b)) => a
                .0
                .iter()
                .zip(b.0.iter())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max),
            _ => panic!("group kind mismatch in max_abs_diff"),
        }
    }
}

/// Draw an element from the normalized Haar measure.
pub fn haar_sample<R: Rng + ?Sized>(kind: GroupKind, rng: &mut R) -> GroupElement {
    match kind {
        GroupKind::U1 => GroupElement::U1(rng.gen::<f64>()),
        GroupKind::Su2 => {
            // uniform point on S^3 from four Gaussians
            let v: [f64; 4] = [
                gaussian(rng),
                gaussian(rng),
                gaussian(rng),
                gaussian(rng),
            ];
            let n = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let a = C64::new(v[0] / n, v[1] / n);
            let b = C64::new(v[2] / n, v[3] / n);
            GroupElement::Su2(Mat2([a, b, -b.conj(), a.conj()]))
        }
        GroupKind::Su3 => {
            // Gram-Schmidt on a complex Gaussian matrix (positive-diagonal
            // R convention), then push the determinant phase into the
            // last column.
            let mut z = CMat::zeros(3);
            for i in 0..3 {
                for j in 0..3 {
                    z.set(i, j, C64::new(gaussian(rng), gaussian(rng)));
                }
            }
            z.reunitarize_special();
            GroupElement::Su3(Mat3::from_cmat(&z)).normalized()
        }
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Class (alcove) coordinates of an element.
pub fn class_coordinates(g: &GroupElement) -> ClassCoordinates {
    match g {
        GroupElement::U1(t) => ClassCoordinates::U1(*t),
        GroupElement::Su2(m) => {
            let half_tr = 0.5 * m.trace().re;
            let x = half_tr.clamp(-1.0, 1.0).acos() / PI;
            ClassCoordinates::Su2(x)
        }
        GroupElement::Su3(m) => {
            let (t1, t2) = su3_eigenphases(m);
            ClassCoordinates::Su3(t1, t2)
        }
    }
}

/// Eigenphases of an SU(3) element, sorted descending in (-pi, pi];
/// returns the two leading ones.
fn su3_eigenphases(m: &Mat3) -> (f64, f64) {
    let u = m.to_cmat();
    let ud = u.adjoint();
    // Hermitian combination A + c B with A = (U+U^+)/2, B = (U-U^+)/(2i);
    // eigenvalues cos(phi) + c sin(phi) separate the eigenvectors for a
    // generic mixing constant c.
    let mixes = [0.7390851332151607, -0.4127419348180392];
    for (attempt, c) in mixes.iter().enumerate() {
        let mut h = CMat::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                let a = (u.at(i, j) + ud.at(i, j)) * 0.5;
                let b = (u.at(i, j) - ud.at(i, j)) * C64::new(0.0, -0.5);
                h.set(i, j, a + b * *c);
            }
        }
        let (_, v) = hermitian_eigen(&h);
        let d = v.adjoint().mul(&u).mul(&v);
        let mut off = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    off = off.max(d.at(i, j).norm());
                }
            }
        }
        if off >= 1e-8 && attempt + 1 < mixes.len() {
            continue;
        }
        let mut phases = [
            d.at(0, 0).arg(),
            d.at(1, 1).arg(),
            d.at(2, 2).arg(),
        ];
        // arg returns (-pi, pi]; canonicalize -pi to pi
        for p in phases.iter_mut() {
            if *p <= -PI {
                *p = PI;
            }
        }
        phases.sort_by(|a, b| b.partial_cmp(a).unwrap());
        return (phases[0], phases[1]);
    }
    unreachable!()
}

/// Irreducible-representation label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RepLabel {
    /// winding number n
    U1(i64),
    /// spin lambda stored as 2*lambda
    Su2 { twice_lambda: u32 },
    /// (p, q) with p, q >= 1; (1,1) is trivial
    Su3 { p: u32, q: u32 },
}

impl RepLabel {
    pub fn kind(&self) -> GroupKind {
        match self {
            RepLabel::U1(_) => GroupKind::U1,
            RepLabel::Su2 { .. } => GroupKind::Su2,
            RepLabel::Su3 { .. } => GroupKind::Su3,
        }
    }

    pub fn trivial(kind: GroupKind) -> Self {
        match kind {
            GroupKind::U1 => RepLabel::U1(0),
            GroupKind::Su2 => RepLabel::Su2 { twice_lambda: 0 },
            GroupKind::Su3 => RepLabel::Su3 { p: 1, q: 1 },
        }
    }

    pub fn is_trivial(&self) -> bool {
        *self == RepLabel::trivial(self.kind())
    }
}

/// Dimension d_Lambda (exact integer arithmetic).
pub fn dimension(label: &RepLabel) -> u64 {
    match label {
        RepLabel::U1(_) => 1,
        RepLabel::Su2 { twice_lambda } => *twice_lambda as u64 + 1,
        RepLabel::Su3 { p, q } => {
            let (p, q) = (*p as u64, *q as u64);
            p * q * (p + q) / 2
        }
    }
}

/// Laplacian eigenvalue c(Lambda) >= 0, with the convention
/// Delta chi = -c(Lambda) chi.
pub fn laplacian_eigenvalue(label: &RepLabel) -> f64 {
    match label {
        RepLabel::U1(n) => {
            let w = 2.0 * PI * *n as f64;
            w * w
        }
        RepLabel::Su2 { twice_lambda } => {
            let l = *twice_lambda as f64 / 2.0;
            0.5 * l * (l + 1.0)
        }
        RepLabel::Su3 { p, q } => {
            let (p, q) = (*p as f64, *q as f64);
            (p * p + q * q + p * q) / 3.0 - 1.0
        }
    }
}

/// Character chi_Lambda evaluated on class coordinates.
///
/// SU(2) uses the Chebyshev recursion for sin((2l+1)pi x)/sin(pi x) and
/// SU(3) the Jacobi-Trudi determinant in complete homogeneous symmetric
/// functions of the eigenvalues; both are polynomial in the class data,
/// so degenerate eigenphases need no special-casing.
pub fn character(label: &RepLabel, coords: &ClassCoordinates) -> C64 {
    assert_eq!(label.kind(), coords.kind(), "rep label / class kind mismatch");
    match (label, coords) {
        (RepLabel::U1(n), ClassCoordinates::U1(theta)) => {
            C64::from_polar(1.0, 2.0 * PI * *n as f64 * theta)
        }
        (RepLabel::Su2 { twice_lambda }, ClassCoordinates::Su2(x)) => {
            C64::new(chebyshev_u(*twice_lambda as usize, (PI * x).cos()), 0.0)
        }
        (RepLabel::Su3 { p, q }, ClassCoordinates::Su3(t1, t2)) => {
            let table = Su3CharacterTable::new(*t1, *t2, (p + q) as usize);
            table.character(*p, *q)
        }
        _ => unreachable!(),
    }
}

/// Chebyshev U_n(c) = sin((n+1) a)/sin(a) with c = cos(a).
fn chebyshev_u(n: usize, c: f64) -> f64 {
    let mut u0 = 1.0;
    let mut u1 = 2.0 * c;
    if n == 0 {
        return u0;
    }
    for _ in 2..=n {
        let u2 = 2.0 * c * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

/// Complete homogeneous symmetric functions h_k of the three SU(3)
/// eigenvalues, precomputed up to a cutoff so that a whole character
/// series can reuse one table.
pub struct Su3CharacterTable {
    h: Vec<C64>,
}

impl Su3CharacterTable {
    /// Build the table for eigenphases (t1, t2, -t1-t2), sufficient for
    /// all characters with p + q <= max_pq.
    pub fn new(t1: f64, t2: f64, max_pq: usize) -> Self {
        let e1 = C64::from_polar(1.0, t1) + C64::from_polar(1.0, t2)
            + C64::from_polar(1.0, -t1 - t2);
        let e2 = e1.conj();
        let kmax = max_pq; // need h up to (p+q-1)
        let mut h = Vec::with_capacity(kmax + 1);
        h.push(C_ONE);
        for k in 1..=kmax {
            let mut v = e1 * h[k - 1];
            if k >= 2 {
                v -= e2 * h[k - 2];
            }
            if k >= 3 {
                v += h[k - 3];
            }
            h.push(v);
        }
        Su3CharacterTable { h }
    }

    /// chi_{p,q} via the 2x2 Jacobi-Trudi determinant (two-row Schur
    /// function with lambda = (p+q-2, q-1)).
    pub fn character(&self, p: u32, q: u32) -> C64 {
        let l1 = (p + q - 2) as usize;
        let l2 = (q - 1) as usize;
        let h = |k: isize| -> C64 {
            if k < 0 {
                C_ZERO
            } else {
                self.h[k as usize]
            }
        };
        h(l1 as isize) * h(l2 as isize) - h(l1 as isize + 1) * h(l2 as isize - 1)
    }
}

/// Orthonormal Lie-algebra basis under the Ad-invariant inner product
/// normalized so that the Laplacian eigenvalues are exactly the c(Lambda)
/// of `laplacian_eigenvalue`.
///
/// - U1: the single generator d/d theta (unit speed in theta);
/// - SU2: xi_a = i sigma_a / (2 sqrt 2), orthonormal for (X,Y) = -4 Tr(XY);
/// - SU3: xi_k = i lambda_k / 2, orthonormal for (X,Y) = -2 Tr(XY).
pub struct LieAlgebraBasis {
    pub kind: GroupKind,
    /// scale s in the inner product (X,Y) = -s Tr(XY) (1 for U1, where
    /// the inner product is the plain product of theta-speeds).
    pub inner_product_scale: f64,
}

impl LieAlgebraBasis {
    pub fn new(kind: GroupKind) -> Self {
        let inner_product_scale = match kind {
            GroupKind::U1 => 1.0,
            GroupKind::Su2 => 4.0,
            GroupKind::Su3 => 2.0,
        };
        LieAlgebraBasis {
            kind,
            inner_product_scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.kind.algebra_dim()
    }

    /// Basis element as a complex matrix (anti-Hermitian, traceless for
    /// the matrix kinds; the 1x1 matrix (i 2 pi) for U1, i.e. unit theta
    /// speed on e^{i 2 pi theta}).
    pub fn generator(&self, index: usize) -> CMat {
        assert!(index < self.dim());
        match self.kind {
            GroupKind::U1 => {
                let mut m = CMat::zeros(1);
                m.set(0, 0, C64::new(0.0, 2.0 * PI));
                m
            }
            GroupKind::Su2 => {
                let s = pauli(index);
                let mut m = CMat::zeros(2);
                for i in 0..4 {
                    m.a[i] = s.0[i] * C64::new(0.0, 1.0 / (2.0 * (2.0f64).sqrt()));
                }
                m
            }
            GroupKind::Su3 => {
                let l = gell_mann(index);
                let mut m = CMat::zeros(3);
                for i in 0..9 {
                    m.a[i] = l.0[i] * C64::new(0.0, 0.5);
                }
                m
            }
        }
    }

    /// Gram matrix of the basis under the recorded inner product; should
    /// be the identity to 1e-12.
    pub fn gram(&self) -> Vec<f64> {
        let d = self.dim();
        let mut g = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                g.push(self.inner(&self.generator(i), &self.generator(j)));
            }
        }
        g
    }

    fn inner(&self, x: &CMat, y: &CMat) -> f64 {
        match self.kind {
            GroupKind::U1 => {
                // theta-speeds v = Im(x_00)/(2 pi)
                let vx = x.at(0, 0).im / (2.0 * PI);
                let vy = y.at(0, 0).im / (2.0 * PI);
                vx * vy
            }
            _ => -self.inner_product_scale * x.mul(y).trace().re,
        }
    }

    /// exp(t xi_index) in closed form.
    pub fn exp_generator(&self, index: usize, t: f64) -> GroupElement {
        assert!(index < self.dim());
        match self.kind {
            GroupKind::U1 => GroupElement::U1(mod1(t)),
            GroupKind::Su2 => {
                // exp(i a sigma) = cos a + i sin a sigma
                let a = t / (2.0 * (2.0f64).sqrt());
                let s = pauli(index);
                let (ca, sa) = (a.cos(), a.sin());
                let mut m = Mat2::IDENTITY;
                for i in 0..4 {
                    m.0[i] = Mat2::IDENTITY.0[i] * ca + s.0[i] * C64::new(0.0, sa);
                }
                GroupElement::Su2(m).normalized()
            }
            GroupKind::Su3 => {
                let a = 0.5 * t;
                let l = gell_mann(index);
                if index == 7 {
                    // lambda_8 is diagonal
                    let s3 = (3.0f64).sqrt();
                    let mut m = Mat3::IDENTITY;
                    m.0[0] = C64::from_polar(1.0, a / s3);
                    m.0[4] = C64::from_polar(1.0, a / s3);
                    m.0[8] = C64::from_polar(1.0, -2.0 * a / s3);
                    GroupElement::Su3(m)
                } else {
                    // lambda^3 = lambda for the first seven Gell-Manns:
                    // exp(i a L) = 1 + i sin(a) L + (cos(a)-1) L^2
                    let l2 = l.mul(&l);
                    let (ca, sa) = (a.cos(), a.sin());
                    let mut m = Mat3::IDENTITY;
                    for i in 0..9 {
                        m.0[i] = Mat3::IDENTITY.0[i] + l.0[i] * C64::new(0.0, sa)
                            + l2.0[i] * C64::new(ca - 1.0, 0.0);
                    }
                    GroupElement::Su3(m).normalized()
                }
            }
        }
    }

    /// exp(sum_k coeffs[k] xi_k); exact for U1/SU2, scaling-and-squaring
    /// Taylor (then re-unitarized) for SU3.
    pub fn exp_algebra(&self, coeffs: &[f64]) -> GroupElement {
        assert_eq!(coeffs.len(), self.dim());
        match self.kind {
            GroupKind::U1 => GroupElement::U1(mod1(coeffs[0])),
            GroupKind::Su2 => {
                // exp(i v.sigma) with v_a = coeffs_a/(2 sqrt 2)
                let v: Vec<f64> = coeffs
                    .iter()
                    .map(|c| c / (2.0 * (2.0f64).sqrt()))
                    .collect();
                let r = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
                if r < 1e-300 {
                    return GroupElement::identity(GroupKind::Su2);
                }
                let (cr, sr) = (r.cos(), r.sin());
                let mut m = Mat2::IDENTITY;
                for i in 0..4 {
                    m.0[i] = Mat2::IDENTITY.0[i] * cr;
                }
                for a in 0..3 {
                    let s = pauli(a);
                    for i in 0..4 {
                        m.0[i] += s.0[i] * C64::new(0.0, sr * v[a] / r);
                    }
                }
                GroupElement::Su2(m).normalized()
            }
            GroupKind::Su3 => {
                let mut x = CMat::zeros(3);
                for (k, c) in coeffs.iter().enumerate() {
                    let g = self.generator(k);
                    for i in 0..9 {
                        x.a[i] += g.a[i] * C64::new(*c, 0.0);
                    }
                }
                GroupElement::Su3(Mat3::from_cmat(&x.expm())).normalized()
            }
        }
    }
}

/// Central finite-difference derivative of f along basis direction
/// `index` at g: (d/dt) f(exp(t xi) g) at t = 0, error O(h^2).
pub fn directional_derivative<F: Fn(&GroupElement) -> C64>(
    f: F,
    basis: &LieAlgebraBasis,
    index: usize,
    g: &GroupElement,
    h: f64,
) -> C64 {
    let fp = f(&basis.exp_generator(index, h).multiply(g));
    let fm = f(&basis.exp_generator(index, -h).multiply(g));
    (fp - fm) / (2.0 * h)
}

/// Finite-difference group Laplacian: sum of second central differences
/// along the orthonormal basis. Satisfies
/// laplacian_apply(chi_Lambda, g) ~ -c(Lambda) chi_Lambda(g).
pub fn laplacian_apply<F: Fn(&GroupElement) -> C64>(
    f: F,
    basis: &LieAlgebraBasis,
    g: &GroupElement,
    h: f64,
) -> C64 {
    let f0 = f(g);
    let mut sum = C_ZERO;
    for index in 0..basis.dim() {
        let fp = f(&basis.exp_generator(index, h).multiply(g));
        let fm = f(&basis.exp_generator(index, -h).multiply(g));
        sum += (fp - 2.0 * f0 + fm) / (h * h);
    }
    sum
}

/// Default finite-difference steps (first / second derivative).
pub const FD_STEP_FIRST: f64 = 1e-4;
pub const FD_STEP_SECOND: f64 = 1e-3;

fn pauli(index: usize) -> Mat2 {
    let z = C_ZERO;
    let o = C_ONE;
    let i = C64::new(0.0, 1.0);
    match index {
        0 => Mat2([z, o, o, z]),
        1 => Mat2([z, -i, i, z]),
        2 => Mat2([o, z, z, -o]),
        _ => panic!("pauli index out of range"),
    }
}

/// Gell-Mann matrix lambda_{index+1}, index in 0..8.
pub fn gell_mann(index: usize) -> Mat3 {
    let z = C_ZERO;
    let o = C_ONE;
    let i = C64::new(0.0, 1.0);
    let s = 1.0 / (3.0f64).sqrt();
    match index {
        0 => Mat3([z, o, z, o, z, z, z, z, z]),
        1 => Mat3([z, -i, z, i, z, z, z, z, z]),
        2 => Mat3([o, z, z, z, -o, z, z, z, z]),
        3 => Mat3([z, z, o, z, z, z, o, z, z]),
        4 => Mat3([z, z, -i, z, z, z, i, z, z]),
        5 => Mat3([z, z, z, z, z, o, z, o, z]),
        6 => Mat3([z, z, z, z, z, -i, z, i, z]),
        7 => Mat3([
            o * s,
            z,
            z,
            z,
            o * s,
            z,
            z,
            z,
            C64::new(-2.0 * s, 0.0),
        ]),
        _ => panic!("gell-mann index out of range"),
    }
}

/// Totally symmetric d_{ijk} = (1/4) Tr({lambda_i, lambda_j} lambda_k),
/// computed once from the Gell-Mann matrices.
fn d_symbol() -> &'static [f64; 512] {
    use once_cell::race::OnceBox;
    static TABLE: OnceBox<[f64; 512]> = OnceBox::new();
    TABLE.get_or_init(|| {
        let mut t = alloc::boxed::Box::new([0.0f64; 512]);
        for i in 0..8 {
            for j in 0..8 {
                let li = gell_mann(i);
                let lj = gell_mann(j);
                let anti = {
                    let a = li.mul(&lj);
                    let b = lj.mul(&li);
                    let mut r = [C_ZERO; 9];
                    for k in 0..9 {
                        r[k] = a.0[k] + b.0[k];
                    }
                    Mat3(r)
                };
                for k in 0..8 {
                    let lk = gell_mann(k);
                    t[64 * i + 8 * j + k] = 0.25 * anti.mul(&lk).trace().re;
                }
            }
        }
        t
    })
}

/// Build the SU(3) element with octet vector a: U = exp(i a_k lambda_k),
/// evaluated through the invariant parametrization
/// U = u0 + u_k lambda_k, u_k = alpha a_k + beta d_{ijk} a_i a_j,
/// where u0 = (1/3) sum_n e^{i phi_n},
/// alpha = sum_n phi_n e^{i phi_n} / (3 phi_n^2 - I2),
/// beta = sum_n e^{i phi_n} / (3 phi_n^2 - I2),
/// and phi_n are the eigenvalues of a_k lambda_k (Cardano form in the
/// invariants I2 = a.a and I3 = d_{ijk} a_i a_j a_k).
///
/// Inputs with |3 phi_n^2 - I2| < 1e-9 for some n (degenerate spectrum)
/// are rejected with an explicit error.
pub fn su3_from_octet(a: &[f64; 8]) -> Result<GroupElement> {
    let i2: f64 = a.iter().map(|x| x * x).sum();
    if i2 == 0.0 {
        return Ok(GroupElement::identity(GroupKind::Su3));
    }
    let d = d_symbol();
    let mut i3 = 0.0f64;
    let mut k_vec = [0.0f64; 8]; // K_k = d_{ijk} a_i a_j
    for i in 0..8 {
        for j in 0..8 {
            let aij = a[i] * a[j];
            if aij == 0.0 {
                continue;
            }
            for k in 0..8 {
                let dv = d[64 * i + 8 * j + k];
                k_vec[k] += dv * aij;
            }
        }
    }
    for k in 0..8 {
        i3 += k_vec[k] * a[k];
    }

    let arg = ((3.0f64).sqrt() * i3 / i2.powf(1.5)).clamp(-1.0, 1.0);
    let base = arg.acos();
    let radius = 2.0 * (i2 / 3.0).sqrt();
    let mut phi = [0.0f64; 3];
    for n in 1..=3 {
        phi[n - 1] = radius * ((2.0 * PI * n as f64 + base) / 3.0).cos();
    }
    for (n, p) in phi.iter().enumerate() {
        let gap = (3.0 * p * p - i2).abs();
        if gap < 1e-9 {
            return Err(Error::DegenerateOctet { n: n + 1, value: gap });
        }
    }

    let mut u0 = C_ZERO;
    let mut alpha = C_ZERO;
    let mut beta = C_ZERO;
    for p in phi.iter() {
        let e = C64::from_polar(1.0, *p);
        let denom = 3.0 * p * p - i2;
        u0 += e / 3.0;
        alpha += e * *p / denom;
        beta += e / denom;
    }

    let mut m = Mat3::IDENTITY;
    for i in 0..9 {
        m.0[i] = Mat3::IDENTITY.0[i] * u0;
    }
    for k in 0..8 {
        let uk = alpha * a[k] + beta * k_vec[k];
        let l = gell_mann(k);
        for i in 0..9 {
            m.0[i] += l.0[i] * uk;
        }
    }

    // the unitarity of the raw parametrization is the correctness oracle
    let cm = m.to_cmat();
    if cm.unitarity_defect() > 1e-10 || (cm.det() - C_ONE).norm() > 1e-10 {
        return Err(Error::Domain(alloc::format!(
            "octet parametrization produced non-unitary output (defect {:e})",
            cm.unitarity_defect()
        )));
    }
    Ok(GroupElement::Su3(m).normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn u1_multiply_wraps() {
        let a = GroupElement::U1(0.3);
        let b = GroupElement::U1(0.9);
        match a.multiply(&b) {
            GroupElement::U1(t) => assert_abs_diff_eq!(t, 0.2, epsilon = 1e-15),
            _ => unreachable!(),
        }
        match GroupElement::U1(0.25).inverse() {
            GroupElement::U1(t) => assert_abs_diff_eq!(t, 0.75, epsilon = 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn identity_and_inverse_laws() {
        let mut r = rng(7);
        for kind in [GroupKind::U1, GroupKind::Su2, GroupKind::Su3] {
            let e = GroupElement::identity(kind);
            for _ in 0..20 {
                let g = haar_sample(kind, &mut r);
                assert!(e.multiply(&g).max_abs_diff(&g) < 1e-12);
                assert!(g.multiply(&g.inverse()).max_abs_diff(&e) < 1e-12);
                assert!(g.unitarity_defect() <= UNITARITY_TOL);
            }
        }
    }

    #[test]
    fn su2_class_coordinates() {
        let e = GroupElement::identity(GroupKind::Su2);
        match class_coordinates(&e) {
            ClassCoordinates::Su2(x) => assert_abs_diff_eq!(x, 0.0, epsilon = 1e-15),
            _ => unreachable!(),
        }
        let i = C64::new(0.0, 1.0);
        let g = GroupElement::Su2(Mat2([i, C_ZERO, C_ZERO, -i]));
        match class_coordinates(&g) {
            ClassCoordinates::Su2(x) => assert_abs_diff_eq!(x, 0.5, epsilon = 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn su3_identity_class() {
        let e = GroupElement::identity(GroupKind::Su3);
        match class_coordinates(&e) {
            ClassCoordinates::Su3(t1, t2) => {
                assert_abs_diff_eq!(t1, 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(t2, 0.0, epsilon = 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn class_coordinates_conjugation_invariant() {
        let mut r = rng(11);
        for kind in [GroupKind::Su2, GroupKind::Su3] {
            for _ in 0..200 {
                let g = haar_sample(kind, &mut r);
                let h = haar_sample(kind, &mut r);
                let c1 = class_coordinates(&g);
                let c2 = class_coordinates(&g.conjugate_by(&h));
                match (c1, c2) {
                    (ClassCoordinates::Su2(a), ClassCoordinates::Su2(b)) => {
                        assert_abs_diff_eq!(a, b, epsilon = 1e-10)
                    }
                    (ClassCoordinates::Su3(a1, a2), ClassCoordinates::Su3(b1, b2)) => {
                        assert_abs_diff_eq!(a1, b1, epsilon = 1e-10);
                        assert_abs_diff_eq!(a2, b2, epsilon = 1e-10);
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn su3_trace_relations() {
        // the returned pair must reproduce the trace of g through the
        // eigenphase sum with third phase -(t1+t2)
        let mut r = rng(13);
        for _ in 0..100 {
            let g = haar_sample(GroupKind::Su3, &mut r);
            let tr = g.to_cmat().trace();
            if let ClassCoordinates::Su3(t1, t2) = class_coordinates(&g) {
                let re = t1.cos() + t2.cos() + (t1 + t2).cos();
                let im = t1.sin() + t2.sin() - (t1 + t2).sin();
                assert_abs_diff_eq!(re, tr.re, epsilon = 1e-10);
                assert_abs_diff_eq!(im, tr.im, epsilon = 1e-10);
            } else {
                unreachable!()
            }
        }
    }

    #[test]
    fn dimensions_and_eigenvalues() {
        assert_eq!(dimension(&RepLabel::Su2 { twice_lambda: 1 }), 2);
        assert_eq!(dimension(&RepLabel::Su3 { p: 1, q: 1 }), 1);
        assert_eq!(dimension(&RepLabel::Su3 { p: 2, q: 1 }), 3);
        assert_eq!(dimension(&RepLabel::Su3 { p: 2, q: 2 }), 8);
        assert_abs_diff_eq!(
            laplacian_eigenvalue(&RepLabel::Su2 { twice_lambda: 1 }),
            0.375,
            epsilon = 0.0
        );
        assert_abs_diff_eq!(
            laplacian_eigenvalue(&RepLabel::Su3 { p: 2, q: 1 }),
            4.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            laplacian_eigenvalue(&RepLabel::Su3 { p: 1, q: 1 }),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn characters_at_identity_equal_dimension() {
        for label in [
            RepLabel::U1(3),
            RepLabel::Su2 { twice_lambda: 1 },
            RepLabel::Su2 { twice_lambda: 4 },
            RepLabel::Su3 { p: 2, q: 1 },
            RepLabel::Su3 { p: 2, q: 2 },
            RepLabel::Su3 { p: 4, q: 1 },
        ] {
            let c = character(&label, &ClassCoordinates::identity(label.kind()));
            assert_abs_diff_eq!(c.re, dimension(&label) as f64, epsilon = 1e-10);
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn su2_character_value() {
        // lambda = 1, x = 1/2: sin(3 pi/2)/sin(pi/2) = -1
        let c = character(
            &RepLabel::Su2 { twice_lambda: 2 },
            &ClassCoordinates::Su2(0.5),
        );
        assert_abs_diff_eq!(c.re, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn characters_are_class_functions() {
        let mut r = rng(17);
        for _ in 0..50 {
            let g = haar_sample(GroupKind::Su3, &mut r);
            let h = haar_sample(GroupKind::Su3, &mut r);
            let label = RepLabel::Su3 { p: 3, q: 2 };
            let a = character(&label, &class_coordinates(&g));
            let b = character(&label, &class_coordinates(&g.conjugate_by(&h)));
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn haar_character_orthogonality() {
        // |E[chi_L conj(chi_M)] - delta_LM| <= 5/sqrt(N)
        let n = 100_000usize;
        let tol = 5.0 / (n as f64).sqrt();
        let mut r = rng(23);
        let labels = [
            RepLabel::Su2 { twice_lambda: 1 },
            RepLabel::Su2 { twice_lambda: 2 },
        ];
        let mut acc = [[C_ZERO; 2]; 2];
        for _ in 0..n {
            let g = haar_sample(GroupKind::Su2, &mut r);
            let c = class_coordinates(&g);
            let chis: Vec<C64> = labels.iter().map(|l| character(l, &c)).collect();
            for i in 0..2 {
                for j in 0..2 {
                    acc[i][j] += chis[i] * chis[j].conj();
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                let mean = acc[i][j] / n as f64;
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (mean - expected).norm() < tol,
                    "E[chi_{i} chi_{j}^*] = {mean}, tol {tol}"
                );
            }
        }
    }

    #[test]
    fn haar_u1_mean_vanishes() {
        let n = 100_000usize;
        let mut r = rng(29);
        let mut acc = C_ZERO;
        for _ in 0..n {
            if let GroupElement::U1(t) = haar_sample(GroupKind::U1, &mut r) {
                acc += C64::from_polar(1.0, 2.0 * PI * t);
            }
        }
        assert!((acc / n as f64).norm() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn haar_su3_fundamental_second_moment() {
        // E |Tr g|^2 = 1
        let n = 100_000usize;
        let mut r = rng(31);
        let mut acc = 0.0;
        for _ in 0..n {
            let g = haar_sample(GroupKind::Su3, &mut r);
            acc += g.to_cmat().trace().norm_sqr();
        }
        let mean = acc / n as f64;
        assert!((mean - 1.0).abs() < 5.0 * (2.0 / n as f64).sqrt() + 0.02, "mean = {mean}");
    }

    #[test]
    fn basis_gram_is_identity() {
        for kind in [GroupKind::U1, GroupKind::Su2, GroupKind::Su3] {
            let basis = LieAlgebraBasis::new(kind);
            let g = basis.gram();
            let d = basis.dim();
            for i in 0..d {
                for j in 0..d {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(g[i * d + j], expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn directional_derivative_of_constant_vanishes() {
        let basis = LieAlgebraBasis::new(GroupKind::Su2);
        let g = GroupElement::identity(GroupKind::Su2);
        let d = directional_derivative(|_| C_ONE, &basis, 0, &g, FD_STEP_FIRST);
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn u1_even_function_critical_point() {
        let basis = LieAlgebraBasis::new(GroupKind::U1);
        let g = GroupElement::identity(GroupKind::U1);
        let f = |g: &GroupElement| match g {
            GroupElement::U1(t) => C64::new((2.0 * PI * t).cos(), 0.0),
            _ => unreachable!(),
        };
        let d = directional_derivative(f, &basis, 0, &g, FD_STEP_FIRST);
        assert!(d.norm() < 1e-7);
    }

    #[test]
    fn su2_directional_derivative_analytic() {
        // f = chi_{1/2} = 2 cos(pi x); along exp(t xi_3) from identity-ish
        // point g = exp(s xi_3): chi(exp((t+s) xi_3)) = 2 cos((t+s)/(2 sqrt 2))
        let basis = LieAlgebraBasis::new(GroupKind::Su2);
        let s = 0.7;
        let g = basis.exp_generator(2, s);
        let f = |g: &GroupElement| {
            character(&RepLabel::Su2 { twice_lambda: 1 }, &class_coordinates(g))
        };
        let d = directional_derivative(f, &basis, 2, &g, FD_STEP_FIRST);
        let analytic = -2.0 / (2.0 * (2.0f64).sqrt()) * (s / (2.0 * (2.0f64).sqrt())).sin();
        assert_abs_diff_eq!(d.re, analytic, epsilon = 1e-6);
    }

    #[test]
    fn laplacian_eigenvalue_check_su2() {
        let basis = LieAlgebraBasis::new(GroupKind::Su2);
        let mut r = rng(37);
        let label = RepLabel::Su2 { twice_lambda: 1 };
        for _ in 0..5 {
            let g = haar_sample(GroupKind::Su2, &mut r);
            let f = |g: &GroupElement| character(&label, &class_coordinates(g));
            let lap = laplacian_apply(f, &basis, &g, FD_STEP_SECOND);
            let expected = -laplacian_eigenvalue(&label) * f(&g);
            assert!(
                (lap - expected).norm() <= 1e-3 * expected.norm().max(0.1),
                "lap = {lap}, expected {expected}"
            );
        }
    }

    #[test]
    fn laplacian_eigenvalue_check_su3_identity() {
        let basis = LieAlgebraBasis::new(GroupKind::Su3);
        let label = RepLabel::Su3 { p: 2, q: 1 };
        let g = GroupElement::identity(GroupKind::Su3);
        let f = |g: &GroupElement| character(&label, &class_coordinates(g));
        let lap = laplacian_apply(f, &basis, &g, FD_STEP_SECOND);
        let expected = -(4.0 / 3.0) * 3.0;
        assert!((lap.re - expected).abs() <= 1e-3 * expected.abs());
        assert!(lap.im.abs() < 1e-6);
    }

    #[test]
    fn octet_unitarity_bulk() {
        let mut r = rng(41);
        let mut accepted = 0;
        for _ in 0..1000 {
            let mut a = [0.0f64; 8];
            for x in a.iter_mut() {
                *x = r.gen::<f64>() - 0.5;
            }
            let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let target = 0.1f64.sqrt() + r.gen::<f64>() * (2.0 - 0.1f64.sqrt());
            for x in a.iter_mut() {
                *x *= target / norm;
            }
            match su3_from_octet(&a) {
                Ok(g) => {
                    accepted += 1;
                    assert!(g.unitarity_defect() <= UNITARITY_TOL);
                }
                Err(Error::DegenerateOctet { .. }) => {}
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
        assert!(accepted > 900);
    }

    #[test]
    fn octet_small_vector_linearizes() {
        let eps = 1e-4;
        let a = [0.0, 0.0, eps, 0.0, 0.0, 0.0, 0.0, 0.0];
        let u = su3_from_octet(&a).unwrap();
        let l3 = gell_mann(2);
        let mut expected = Mat3::IDENTITY;
        for i in 0..9 {
            expected.0[i] = Mat3::IDENTITY.0[i] + l3.0[i] * C64::new(0.0, eps);
        }
        assert!(u.max_abs_diff(&GroupElement::Su3(expected)) < 10.0 * eps * eps);
    }

    #[test]
    fn octet_matches_matrix_exponential() {
        let mut r = rng(43);
        for _ in 0..50 {
            let mut a = [0.0f64; 8];
            for x in a.iter_mut() {
                *x = 0.8 * (r.gen::<f64>() - 0.5);
            }
            let u = match su3_from_octet(&a) {
                Ok(u) => u,
                Err(_) => continue,
            };
            // independent oracle: exp(i sum a_k lambda_k) via Taylor expm
            let mut x = CMat::zeros(3);
            for k in 0..8 {
                let l = gell_mann(k);
                for i in 0..9 {
                    x.a[i] += l.0[i] * C64::new(0.0, a[k]);
                }
            }
            let direct = GroupElement::Su3(Mat3::from_cmat(&x.expm())).normalized();
            assert!(u.max_abs_diff(&direct) < 1e-9);
        }
    }

    #[test]
    fn octet_eigenphases_match_phi() {
        let mut r = rng(47);
        for _ in 0..50 {
            let mut a = [0.0f64; 8];
            for x in a.iter_mut() {
                *x = 1.2 * (r.gen::<f64>() - 0.5);
            }
            let u = match su3_from_octet(&a) {
                Ok(u) => u,
                Err(_) => continue,
            };
            // recompute phi_n and compare with diagonalization, mod 2 pi
            let i2: f64 = a.iter().map(|x| x * x).sum();
            let d = super::d_symbol();
            let mut i3 = 0.0;
            for i in 0..8 {
                for j in 0..8 {
                    for k in 0..8 {
                        i3 += d[64 * i + 8 * j + k] * a[i] * a[j] * a[k];
                    }
                }
            }
            let arg = ((3.0f64).sqrt() * i3 / i2.powf(1.5)).clamp(-1.0, 1.0);
            let radius = 2.0 * (i2 / 3.0).sqrt();
            let mut phi: Vec<f64> = (1..=3)
                .map(|n| radius * ((2.0 * PI * n as f64 + arg.acos()) / 3.0).cos())
                .collect();
            // fold to (-pi, pi] and sort descending like the alcove rule
            for p in phi.iter_mut() {
                *p -= 2.0 * PI * ((*p + PI) / (2.0 * PI)).floor();
            }
            phi.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if let ClassCoordinates::Su3(t1, t2) = class_coordinates(&u) {
                assert_abs_diff_eq!(t1, phi[0], epsilon = 1e-9);
                assert_abs_diff_eq!(t2, phi[1], epsilon = 1e-9);
            } else {
                unreachable!()
            }
        }
    }
}
