//! Orbit-type strata of holonomy sets: numerical commutant dimension,
//! the stratum dictionaries of the SU(2) and SU(3) tables, randomized
//! in-stratum example constructions, and measure-intensity profiles.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::group::{ClassCoordinates, GroupElement, GroupKind, Mat2, Mat3};
use crate::heat::{heat_kernel, KernelParams};
use crate::linalg::{singular_values, C64};
use crate::{Error, Result};

/// Relative singular-value cutoff separating the commutant null space
/// from numerical noise.
pub const COMMUTANT_THRESHOLD: f64 = 1e-9;

/// A finite generator list for a holonomy group.
#[derive(Debug, Clone)]
pub struct HolonomySet {
    pub kind: GroupKind,
    pub elements: Vec<GroupElement>,
}

impl HolonomySet {
    pub fn new(elements: Vec<GroupElement>) -> Result<Self> {
        let kind = elements
            .first()
            .map(|g| g.kind())
            .ok_or_else(|| Error::Domain("empty holonomy set".into()))?;
        if kind == GroupKind::U1 {
            return Err(Error::Domain(
                "strata classification covers SU(2) and SU(3) only".into(),
            ));
        }
        if elements.iter().any(|g| g.kind() != kind) {
            return Err(Error::Domain("holonomy set of mixed group kinds".into()));
        }
        Ok(HolonomySet { kind, elements })
    }

    pub fn conjugated_by(&self, h: &GroupElement) -> HolonomySet {
        HolonomySet {
            kind: self.kind,
            elements: self
                .elements
                .iter()
                .map(|g| g.conjugate_by(h))
                .collect(),
        }
    }
}

/// Outcome of the commutant-dimension computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommutantReport {
    /// complex dimension of {X : Xh = hX for all generators h}
    pub dimension: usize,
    /// descending singular values of the stacked commutation operator
    pub singular_values: Vec<f64>,
    /// absolute threshold actually applied
    pub threshold: f64,
}

/// One row of the stratum tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumType {
    pub kind: GroupKind,
    pub index: u8,
    /// the isotropy group S_A
    pub isotropy: String,
    /// structure group H'_A of the maximal subbundle
    pub subbundle: String,
    pub commutant_dimension: usize,
}

fn stratum_row(kind: GroupKind, commutant_dim: usize) -> Option<(u8, &'static str, &'static str)> {
    match (kind, commutant_dim) {
        (GroupKind::Su2, 1) => Some((1, "Z_2", "SU(2)")),
        (GroupKind::Su2, 2) => Some((2, "U(1)", "U(1)")),
        (GroupKind::Su2, 4) => Some((3, "SU(2)", "Z_2")),
        (GroupKind::Su3, 1) => Some((1, "Z_3", "SU(3)")),
        (GroupKind::Su3, 2) => Some((2, "U(1)", "U(2)")),
        (GroupKind::Su3, 3) => Some((3, "U(1)xU(1)", "U(1)xU(1)")),
        (GroupKind::Su3, 5) => Some((4, "U(2)", "U(1)")),
        (GroupKind::Su3, 9) => Some((5, "SU(3)", "Z_3")),
        _ => None,
    }
}

/// Dimension of {X in M_n(C) : Xh = hX for all h in H}, computed as the
/// null-space dimension of the stacked maps X -> Xh - hX.
pub fn commutant_dimension(h: &HolonomySet) -> Result<CommutantReport> {
    let n = h.kind.matrix_dim();
    let n2 = n * n;
    let m = h.elements.len() * n2;
    // rows indexed by (generator, i, j); columns by (k, l):
    // (Xh - hX)_{ij} = sum_{kl} X_{kl} (delta_{ik} h_{lj} - h_{ik} delta_{lj})
    let mut a = alloc::vec![C64::new(0.0, 0.0); m * n2];
    for (gi, g) in h.elements.iter().enumerate() {
        let hm = g.to_cmat();
        for i in 0..n {
            for j in 0..n {
                let row = gi * n2 + i * n + j;
                for k in 0..n {
                    for l in 0..n {
                        let mut v = C64::new(0.0, 0.0);
                        if i == k {
                            v += hm.at(l, j);
                        }
                        if l == j {
                            v -= hm.at(i, k);
                        }
                        a[row * n2 + k * n + l] = v;
                    }
                }
            }
        }
    }
    let sv = singular_values(m, n2, &a);
    let max_sv = sv.first().copied().unwrap_or(0.0);
    if max_sv < 1e-12 {
        // every generator is central up to arithmetic residue (for
        // central h the operator is analytically zero): the commutant
        // is all of M_n
        return Ok(CommutantReport {
            dimension: n2,
            singular_values: sv,
            threshold: 1e-12,
        });
    }
    let threshold = COMMUTANT_THRESHOLD * max_sv;
    let mut rank = 0usize;
    for &s in &sv {
        if s > 0.1 * threshold && s < 10.0 * threshold {
            return Err(Error::IndeterminateCommutant {
                singular_value: s,
                threshold,
            });
        }
        if s >= threshold {
            rank += 1;
        }
    }
    Ok(CommutantReport {
        dimension: n2 - rank,
        singular_values: sv,
        threshold,
    })
}

/// Map a holonomy set to its stratum row via the commutant dictionary.
pub fn classify_stratum(h: &HolonomySet) -> Result<StratumType> {
    let report = commutant_dimension(h)?;
    let (index, isotropy, subbundle) =
        stratum_row(h.kind, report.dimension).ok_or_else(|| {
            Error::Domain(alloc::format!(
                "commutant dimension {} is outside the {:?} stratum dictionary",
                report.dimension,
                h.kind
            ))
        })?;
    Ok(StratumType {
        kind: h.kind,
        index,
        isotropy: isotropy.into(),
        subbundle: subbundle.into(),
        commutant_dimension: report.dimension,
    })
}

fn su2_from_axis_angle(axis: [f64; 3], theta: f64) -> GroupElement {
    // exp(-i theta/2 n.sigma) = cos(theta/2) I - i sin(theta/2) n.sigma
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let (nx, ny, nz) = (axis[0], axis[1], axis[2]);
    let m = Mat2([
        C64::new(c, -s * nz),
        C64::new(-s * ny, -s * nx),
        C64::new(s * ny, -s * nx),
        C64::new(c, s * nz),
    ]);
    GroupElement::Su2(m)
}

fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// An angle bounded away from the degenerate values 0, pi, 2 pi.
fn generic_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    0.4 + rng.gen::<f64>() * 2.0
}

fn su3_diag(p1: f64, p2: f64) -> GroupElement {
    let mut m = Mat3::IDENTITY;
    m.0[0] = C64::from_polar(1.0, p1);
    m.0[4] = C64::from_polar(1.0, p2);
    m.0[8] = C64::from_polar(1.0, -(p1 + p2));
    GroupElement::Su3(m)
}

/// The cyclic permutation (1 2 3), an SU(3) element whose combination
/// with a generic diagonal generates an irreducible set.
fn su3_cycle() -> GroupElement {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    GroupElement::Su3(Mat3([z, o, z, z, z, o, o, z, z]))
}

/// Embed b (2x2) as the upper block of a 3x3 matrix with lower entry d.
fn su3_block(b: &Mat2, d: C64) -> GroupElement {
    let z = C64::new(0.0, 0.0);
    GroupElement::Su3(Mat3([
        b.0[0], b.0[1], z, //
        b.0[2], b.0[3], z, //
        z, z, d,
    ]))
}

/// Construct a randomized generator set guaranteed to lie in the
/// requested stratum.
pub fn stratum_examples<R: Rng + ?Sized>(
    kind: GroupKind,
    index: u8,
    rng: &mut R,
) -> Result<HolonomySet> {
    let conj = crate::group::haar_sample(kind, rng);
    let elements: Vec<GroupElement> = match (kind, index) {
        (GroupKind::Su2, 1) => {
            // a generic rotation about z and one about x: any matrix
            // commuting with the first is diagonal; a diagonal matrix
            // commuting with the second is scalar
            alloc::vec![
                su2_from_axis_angle([0.0, 0.0, 1.0], generic_angle(rng)),
                su2_from_axis_angle([1.0, 0.0, 0.0], generic_angle(rng)),
            ]
        }
        (GroupKind::Su2, 2) => {
            // one radius: common random axis, generic angles
            let axis = random_axis(rng);
            alloc::vec![
                su2_from_axis_angle(axis, generic_angle(rng)),
                su2_from_axis_angle(axis, generic_angle(rng)),
            ]
        }
        (GroupKind::Su2, 3) => {
            // the two-point space {1, -1}
            let o = C64::new(-1.0, 0.0);
            let z = C64::new(0.0, 0.0);
            let minus = GroupElement::Su2(Mat2([o, z, z, o]));
            alloc::vec![GroupElement::identity(kind), minus]
        }
        (GroupKind::Su3, 1) => {
            // generic diagonal + 3-cycle: commutant of the pair is the
            // scalars
            let a = 0.4 + rng.gen::<f64>();
            let b = -1.1 - rng.gen::<f64>();
            alloc::vec![su3_diag(a, b), su3_cycle()]
        }
        (GroupKind::Su3, 2) => {
            // a common irreducible 2x2 block (times a phase) plus the
            // balancing third phase: commutant = c I_2 (+) d
            let phi1 = 0.3 + 0.4 * rng.gen::<f64>();
            let phi2 = -0.5 - 0.4 * rng.gen::<f64>();
            let block = |axis: [f64; 3], theta: f64, phi: f64| -> GroupElement {
                let g = su2_from_axis_angle(axis, theta);
                let m = match g {
                    GroupElement::Su2(m) => m,
                    _ => unreachable!(),
                };
                let z = C64::from_polar(1.0, phi);
                let scaled = Mat2([m.0[0] * z, m.0[1] * z, m.0[2] * z, m.0[3] * z]);
                su3_block(&scaled, C64::from_polar(1.0, -2.0 * phi))
            };
            alloc::vec![
                block([0.0, 0.0, 1.0], generic_angle(rng), phi1),
                block([1.0, 0.0, 0.0], generic_angle(rng), phi2),
            ]
        }
        (GroupKind::Su3, 3) => {
            // generic distinct diagonal phases: commutant = diagonal
            let a = 0.5 + 0.3 * rng.gen::<f64>();
            let b = -1.4 - 0.3 * rng.gen::<f64>();
            alloc::vec![su3_diag(a, b), su3_diag(0.7 * a, 0.9 * b)]
        }
        (GroupKind::Su3, 4) => {
            // scalar 2x2 block (+) phase: commutant = M_2 (+) C
            let mk = |phi: f64| {
                let z = C64::from_polar(1.0, phi);
                su3_block(
                    &Mat2([z, C64::new(0.0, 0.0), C64::new(0.0, 0.0), z]),
                    C64::from_polar(1.0, -2.0 * phi),
                )
            };
            alloc::vec![
                mk(0.4 + 0.4 * rng.gen::<f64>()),
                mk(-0.9 - 0.4 * rng.gen::<f64>()),
            ]
        }
        (GroupKind::Su3, 5) => {
            // the center Z_3
            let w = 2.0 * PI / 3.0;
            alloc::vec![su3_diag(w, w), GroupElement::identity(kind)]
        }
        _ => {
            return Err(Error::Domain(alloc::format!(
                "no stratum {index} for {kind:?}"
            )))
        }
    };
    let set = HolonomySet::new(elements)?;
    Ok(set.conjugated_by(&conj))
}

/// One point of a measure-intensity profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub parameter: f64,
    pub kernel_value: f64,
}

/// A one-parameter family inside the stratum approaching the identity
/// class point, with the heat kernel evaluated along it; parameter 0 is
/// the identity end.
pub fn stratum_measure_profile(
    kind: GroupKind,
    index: u8,
    beta: f64,
    n_points: usize,
) -> Result<Vec<ProfilePoint>> {
    let params = KernelParams::new(beta)?;
    if n_points < 2 {
        return Err(Error::Domain("profile needs at least two points".into()));
    }
    let mut out = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let t = i as f64 / (n_points - 1) as f64;
        let coords = match (kind, index) {
            // strata 1 and 2 reach the identity along a radius; their
            // class angle scales linearly with the parameter
            (GroupKind::Su2, 1) | (GroupKind::Su2, 2) => ClassCoordinates::Su2(0.8 * t),
            // the two-point space: the family sits at the identity
            (GroupKind::Su2, 3) => ClassCoordinates::Su2(0.0),
            (GroupKind::Su3, 1) | (GroupKind::Su3, 3) => {
                ClassCoordinates::Su3(0.9 * t, -1.3 * t)
            }
            (GroupKind::Su3, 2) => ClassCoordinates::Su3(0.8 * t, -0.8 * t),
            (GroupKind::Su3, 4) => ClassCoordinates::Su3(0.7 * t, 0.7 * t),
            (GroupKind::Su3, 5) => ClassCoordinates::Su3(0.0, 0.0),
            _ => {
                return Err(Error::Domain(alloc::format!(
                    "no stratum {index} for {kind:?}"
                )))
            }
        };
        out.push(ProfilePoint {
            parameter: t,
            kernel_value: heat_kernel(&coords, &params)?,
        });
    }
    Ok(out)
}

/// The partial order of stratum types by isotropy containment: the
/// pairs (lower, higher) where the lower stratum's isotropy group
/// contains a conjugate of the higher one's. SU2: 3 <= 2 <= 1; SU3:
/// 5 <= 4 <= 2 <= 1 and 5 <= 4 <= 3 <= 1 (strata 2 and 3 are left
/// unordered relative to each other).
pub fn stratum_order(kind: GroupKind) -> &'static [(u8, u8)] {
    match kind {
        GroupKind::Su2 => &[(3, 2), (2, 1), (3, 1)],
        GroupKind::Su3 => &[
            (5, 4),
            (4, 2),
            (4, 3),
            (2, 1),
            (3, 1),
            (5, 2),
            (5, 3),
            (5, 1),
            (4, 1),
        ],
        GroupKind::U1 => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::haar_sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn identity_commutant_is_full() {
        let h = HolonomySet::new(alloc::vec![GroupElement::identity(GroupKind::Su2)]).unwrap();
        assert_eq!(commutant_dimension(&h).unwrap().dimension, 4);
        let h = HolonomySet::new(alloc::vec![GroupElement::identity(GroupKind::Su3)]).unwrap();
        assert_eq!(commutant_dimension(&h).unwrap().dimension, 9);
    }

    #[test]
    fn diagonal_su2_commutant_is_two() {
        // diag(i, -i) = exp(-i (3 pi / 2)... use axis-angle with theta = pi
        let g = su2_from_axis_angle([0.0, 0.0, 1.0], PI);
        let h = HolonomySet::new(alloc::vec![g]).unwrap();
        assert_eq!(commutant_dimension(&h).unwrap().dimension, 2);
    }

    #[test]
    fn irreducible_su2_pair_commutant_is_one() {
        // exp(i pi sigma_1 / 4) and exp(i pi sigma_3 / 4)
        let g1 = su2_from_axis_angle([1.0, 0.0, 0.0], -PI / 2.0);
        let g2 = su2_from_axis_angle([0.0, 0.0, 1.0], -PI / 2.0);
        let h = HolonomySet::new(alloc::vec![g1, g2]).unwrap();
        assert_eq!(commutant_dimension(&h).unwrap().dimension, 1);
    }

    #[test]
    fn table_rows_su2() {
        let mut r = rng(1);
        let rows = [(1u8, "Z_2", "SU(2)"), (2, "U(1)", "U(1)"), (3, "SU(2)", "Z_2")];
        for (index, iso, sub) in rows {
            let h = stratum_examples(GroupKind::Su2, index, &mut r).unwrap();
            let s = classify_stratum(&h).unwrap();
            assert_eq!(s.index, index);
            assert_eq!(s.isotropy, iso);
            assert_eq!(s.subbundle, sub);
        }
    }

    #[test]
    fn table_rows_su3() {
        let mut r = rng(2);
        let rows = [
            (1u8, "Z_3", "SU(3)", 1usize),
            (2, "U(1)", "U(2)", 2),
            (3, "U(1)xU(1)", "U(1)xU(1)", 3),
            (4, "U(2)", "U(1)", 5),
            (5, "SU(3)", "Z_3", 9),
        ];
        for (index, iso, sub, dim) in rows {
            let h = stratum_examples(GroupKind::Su3, index, &mut r).unwrap();
            let s = classify_stratum(&h).unwrap();
            assert_eq!(s.index, index, "stratum {index}");
            assert_eq!(s.isotropy, iso);
            assert_eq!(s.subbundle, sub);
            assert_eq!(s.commutant_dimension, dim);
        }
    }

    #[test]
    fn round_trip_hundred_per_stratum() {
        let mut r = rng(3);
        for index in 1..=3u8 {
            for _ in 0..100 {
                let h = stratum_examples(GroupKind::Su2, index, &mut r).unwrap();
                assert_eq!(classify_stratum(&h).unwrap().index, index);
            }
        }
        for index in 1..=5u8 {
            for _ in 0..100 {
                let h = stratum_examples(GroupKind::Su3, index, &mut r).unwrap();
                assert_eq!(classify_stratum(&h).unwrap().index, index);
            }
        }
    }

    #[test]
    fn conjugation_invariance_exact() {
        let mut r = rng(4);
        for kind in [GroupKind::Su2, GroupKind::Su3] {
            let top = if kind == GroupKind::Su2 { 3 } else { 5 };
            for index in 1..=top {
                let h = stratum_examples(kind, index, &mut r).unwrap();
                let g = haar_sample(kind, &mut r);
                let hc = h.conjugated_by(&g);
                assert_eq!(
                    classify_stratum(&h).unwrap().index,
                    classify_stratum(&hc).unwrap().index
                );
            }
        }
    }

    #[test]
    fn adding_elements_never_increases_commutant() {
        let mut r = rng(5);
        for kind in [GroupKind::Su2, GroupKind::Su3] {
            for _ in 0..20 {
                let g1 = haar_sample(kind, &mut r);
                let g2 = haar_sample(kind, &mut r);
                let d1 = commutant_dimension(&HolonomySet::new(alloc::vec![g1]).unwrap())
                    .unwrap()
                    .dimension;
                let d2 =
                    commutant_dimension(&HolonomySet::new(alloc::vec![g1, g2]).unwrap())
                        .unwrap()
                        .dimension;
                assert!(d2 <= d1);
            }
        }
    }

    #[test]
    fn random_inputs_hit_the_dictionary() {
        let mut r = rng(6);
        for kind in [GroupKind::Su2, GroupKind::Su3] {
            let allowed: &[usize] = if kind == GroupKind::Su2 {
                &[1, 2, 4]
            } else {
                &[1, 2, 3, 5, 9]
            };
            for _ in 0..300 {
                let k = 1 + (r.gen::<u64>() % 3) as usize;
                let elements: Vec<GroupElement> =
                    (0..k).map(|_| haar_sample(kind, &mut r)).collect();
                let h = HolonomySet::new(elements).unwrap();
                match commutant_dimension(&h) {
                    Ok(rep) => assert!(
                        allowed.contains(&rep.dimension),
                       "{kind:?}: dimension {}",
                        rep.dimension
                    ),
                    Err(Error::IndeterminateCommutant { .. }) => {}
                    Err(e) => panic!("unexpected error {e:?}"),
                }
            }
        }
    }

    #[test]
    fn profiles_approach_identity_peak() {
        for kind in [GroupKind::Su2, GroupKind::Su3] {
            let top = if kind == GroupKind::Su2 { 3 } else { 5 };
            let params = KernelParams::new(0.05).unwrap();
            let idc = match kind {
                GroupKind::Su2 => ClassCoordinates::Su2(0.0),
                _ => ClassCoordinates::Su3(0.0, 0.0),
            };
            let peak = heat_kernel(&idc, &params).unwrap();
            for index in 1..=top {
                let curve = stratum_measure_profile(kind, index, 0.05, 16).unwrap();
                assert_eq!(curve.len(), 16);
                assert!((curve[0].kernel_value - peak).abs() < 1e-9 * peak);
                // strictly increasing toward the identity on moving
                // families (small beta, Gaussian shape)
                let moving = !matches!(
                    (kind, index),
                    (GroupKind::Su2, 3) | (GroupKind::Su3, 5)
                );
                if moving {
                    for w in curve.windows(2) {
                        assert!(w[1].kernel_value < w[0].kernel_value);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_order_spot_checks() {
        // the chains are reflexive-free pair lists; spot-check a few
        // containments by the commutant dictionary: a lower stratum has
        // a *larger* isotropy group, hence larger commutant dimension
        let dims_su2 = |i: u8| match i {
            1 => 1,
            2 => 2,
            3 => 4,
            _ => unreachable!(),
        };
        for &(lo, hi) in stratum_order(GroupKind::Su2) {
            assert!(dims_su2(lo) > dims_su2(hi));
        }
        let dims_su3 = |i: u8| match i {
            1 => 1,
            2 => 2,
            3 => 3,
            4 => 5,
            5 => 9,
            _ => unreachable!(),
        };
        for &(lo, hi) in stratum_order(GroupKind::Su3) {
            assert!(dims_su3(lo) > dims_su3(hi));
        }
    }

    #[test]
    fn u1_and_empty_rejected() {
        assert!(HolonomySet::new(alloc::vec![]).is_err());
        assert!(HolonomySet::new(alloc::vec![GroupElement::U1(0.3)]).is_err());
    }
}
