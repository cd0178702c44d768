//! The directed family of finite open square lattices: enumeration of
//! edges and plaquettes, one-plaquette-at-a-time refinement, coarsening
//! projections and cylindrical-function pullbacks.
//!
//! Coordinates are integer "ticks" at resolution a/2^{k+1} (half the
//! level-k edge), so that refined half-edges, interior edges and face
//! centers all live on the same integer grid. A full level-k lattice has
//! edges of length 2 ticks; a plaquette in the refinement mask
//! contributes split boundary edges and an interior cross of four
//! length-1 edges.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::group::{haar_sample, GroupElement, GroupKind};
use crate::{Error, Result};

pub const MAX_AXES: usize = 4;

/// Oriented lattice edge: base vertex in ticks, positive direction,
/// length in ticks (1 = refined half-edge or interior edge, 2 = full
/// level-k edge).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub v: [i64; MAX_AXES],
    pub dir: u8,
    pub len: u8,
}

impl Edge {
    pub fn endpoint(&self) -> [i64; MAX_AXES] {
        let mut w = self.v;
        w[self.dir as usize] += self.len as i64;
        w
    }
}

/// Elementary square face: base vertex in ticks, plane (mu, nu) with
/// mu < nu, side length in ticks (2 = unrefined level-k plaquette,
/// 1 = sub-plaquette of a refined one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Plaquette {
    pub v: [i64; MAX_AXES],
    pub mu: u8,
    pub nu: u8,
    pub size: u8,
}

/// A member of the directed set of lattices: level-k hypercubic grid of
/// `extent` coarse cells per axis plus a partial-refinement mask of
/// level-k plaquettes already subdivided once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeLevel {
    pub d: u8,
    pub a: f64,
    pub k: u32,
    pub extent: u32,
    pub mask: BTreeSet<Plaquette>,
}

impl LatticeLevel {
    pub fn new(d: u8, a: f64, k: u32, extent: u32) -> Result<Self> {
        if !(2..=4).contains(&d) {
            return Err(Error::Domain(alloc::format!("dimension must be 2..4, got {d}")));
        }
        if extent == 0 {
            return Err(Error::Domain("extent must be >= 1".into()));
        }
        if !(a > 0.0) {
            return Err(Error::Domain(alloc::format!("base edge length must be positive, got {a}")));
        }
        Ok(LatticeLevel {
            d,
            a,
            k,
            extent,
            mask: BTreeSet::new(),
        })
    }

    /// Level-k cells per axis.
    pub fn cells(&self) -> i64 {
        (self.extent as i64) << self.k
    }

    /// Ticks per axis (resolution a/2^{k+1}).
    pub fn ticks(&self) -> i64 {
        2 * self.cells()
    }

    fn in_vertex_range(&self, v: &[i64; MAX_AXES]) -> bool {
        let t = self.ticks();
        for ax in 0..MAX_AXES {
            if ax < self.d as usize {
                if v[ax] < 0 || v[ax] > t {
                    return false;
                }
            } else if v[ax] != 0 {
                return false;
            }
        }
        true
    }

    /// Grid plaquettes of the level-k lattice (size 2, even corners).
    fn grid_plaquette(&self, v: [i64; MAX_AXES], mu: u8, nu: u8) -> Option<Plaquette> {
        let t = self.ticks();
        if mu >= nu || nu >= self.d {
            return None;
        }
        if !self.in_vertex_range(&v) {
            return None;
        }
        if v.iter().any(|c| c % 2 != 0) {
            return None;
        }
        if v[mu as usize] + 2 > t || v[nu as usize] + 2 > t {
            return None;
        }
        Some(Plaquette { v, mu, nu, size: 2 })
    }

    /// Whether a level-k grid edge (even base, length 2) is split into
    /// halves because some adjacent plaquette is refined.
    pub fn grid_edge_split(&self, v: [i64; MAX_AXES], dir: u8) -> bool {
        for nu in 0..self.d {
            if nu == dir {
                continue;
            }
            for delta in [0i64, -2] {
                let mut w = v;
                w[nu as usize] += delta;
                let (pm, pn) = if dir < nu { (dir, nu) } else { (nu, dir) };
                if let Some(p) = self.grid_plaquette(w, pm, pn) {
                    if self.mask.contains(&p) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Membership test driven purely by (k, mask); enumeration and the
    /// coarsening walk both rely on it.
    pub fn contains_edge(&self, e: &Edge) -> bool {
        if e.dir >= self.d || !self.in_vertex_range(&e.v) || !self.in_vertex_range(&e.endpoint()) {
            return false;
        }
        let dir = e.dir as usize;
        let odd_axes: Vec<usize> = (0..self.d as usize)
            .filter(|&ax| ax != dir && e.v[ax] % 2 != 0)
            .collect();
        match e.len {
            2 => {
                odd_axes.is_empty()
                    && e.v[dir] % 2 == 0
                    && !self.grid_edge_split(e.v, e.dir)
            }
            1 => match odd_axes.len() {
                0 => {
                    // half of a split grid edge
                    let mut base = e.v;
                    base[dir] -= base[dir].rem_euclid(2);
                    self.in_vertex_range(&{
                        let mut b = base;
                        b[dir] += 2;
                        b
                    }) && self.grid_edge_split(base, e.dir)
                }
                1 => {
                    // interior edge of a refined plaquette
                    let other = odd_axes[0];
                    let mut corner = e.v;
                    corner[other] -= 1;
                    corner[dir] -= corner[dir].rem_euclid(2);
                    let (pm, pn) = if dir < other {
                        (dir as u8, other as u8)
                    } else {
                        (other as u8, dir as u8)
                    };
                    match self.grid_plaquette(corner, pm, pn) {
                        Some(p) => self.mask.contains(&p),
                        None => false,
                    }
                }
                _ => false,
            },
            _ => false,
        }
    }

    /// All edges, lexicographic by base vertex then direction.
    pub fn enumerate_edges(&self) -> Vec<Edge> {
        let mut edges = Vec::new();
        let t = self.ticks();
        // grid edges (split or whole)
        let d = self.d as usize;
        let mut v = [0i64; MAX_AXES];
        loop {
            if v.iter().take(d).all(|c| c % 2 == 0) {
                for dir in 0..d {
                    if v[dir] + 2 <= t {
                        if self.grid_edge_split(v, dir as u8) {
                            edges.push(Edge { v, dir: dir as u8, len: 1 });
                            let mut w = v;
                            w[dir] += 1;
                            edges.push(Edge { v: w, dir: dir as u8, len: 1 });
                        } else {
                            edges.push(Edge { v, dir: dir as u8, len: 2 });
                        }
                    }
                }
            }
            if !advance(&mut v, d, t) {
                break;
            }
        }
        // interior edges of refined plaquettes
        for p in &self.mask {
            let (mu, nu) = (p.mu as usize, p.nu as usize);
            for (along, across) in [(nu, mu), (mu, nu)] {
                for step in 0..2i64 {
                    let mut w = p.v;
                    w[across] += 1;
                    w[along] += step;
                    edges.push(Edge { v: w, dir: along as u8, len: 1 });
                }
            }
        }
        edges.sort();
        edges
    }

    /// All plaquettes, lexicographic by base vertex then plane.
    pub fn enumerate_plaquettes(&self) -> Vec<Plaquette> {
        let mut out = Vec::new();
        let d = self.d as usize;
        let t = self.ticks();
        let mut v = [0i64; MAX_AXES];
        loop {
            if v.iter().take(d).all(|c| c % 2 == 0) {
                for mu in 0..d {
                    for nu in (mu + 1)..d {
                        if let Some(p) = self.grid_plaquette(v, mu as u8, nu as u8) {
                            if self.mask.contains(&p) {
                                for i in 0..2i64 {
                                    for j in 0..2i64 {
                                        let mut w = v;
                                        w[mu] += i;
                                        w[nu] += j;
                                        out.push(Plaquette {
                                            v: w,
                                            mu: mu as u8,
                                            nu: nu as u8,
                                            size: 1,
                                        });
                                    }
                                }
                            } else {
                                out.push(p);
                            }
                        }
                    }
                }
            }
            if !advance(&mut v, d, t) {
                break;
            }
        }
        out.sort();
        out
    }

    /// Subdivide one unrefined level-k plaquette; refining the last one
    /// normalizes to the full level-(k+1) lattice with an empty mask.
    pub fn refine_once(&self, p: &Plaquette) -> Result<LatticeLevel> {
        if p.size != 2 || self.grid_plaquette(p.v, p.mu, p.nu) != Some(*p) {
            return Err(Error::InvalidPlaquette(alloc::format!(
                "not an unrefined level-{} plaquette: {p:?}",
                self.k
            )));
        }
        if self.mask.contains(p) {
            return Err(Error::InvalidPlaquette(alloc::format!(
                "plaquette already refined: {p:?}"
            )));
        }
        let mut next = self.clone();
        next.mask.insert(*p);
        Ok(next.normalized())
    }

    /// Collapse a full mask to the next level.
    pub fn normalized(self) -> LatticeLevel {
        let total = self.grid_plaquette_count();
        if self.mask.len() as i64 == total && total > 0 {
            LatticeLevel {
                d: self.d,
                a: self.a,
                k: self.k + 1,
                extent: self.extent,
                mask: BTreeSet::new(),
            }
        } else {
            self
        }
    }

    fn grid_plaquette_count(&self) -> i64 {
        let n = self.cells();
        let d = self.d as i64;
        d * (d - 1) / 2 * n * n * (n + 1).pow(self.d as u32 - 2)
    }

    /// Directed-set order: self <= fine (self is an ancestor).
    pub fn is_ancestor_of(&self, fine: &LatticeLevel) -> bool {
        if self.d != fine.d || self.extent != fine.extent || self.a != fine.a {
            return false;
        }
        if self.k < fine.k {
            return true;
        }
        self.k == fine.k && self.mask.is_subset(&fine.mask)
    }

    /// Least common refinement (the directed-set join).
    pub fn join(&self, other: &LatticeLevel) -> Result<LatticeLevel> {
        if self.d != other.d || self.extent != other.extent || self.a != other.a {
            return Err(Error::Domain("incompatible lattice families".into()));
        }
        use core::cmp::Ordering;
        Ok(match self.k.cmp(&other.k) {
            Ordering::Less => other.clone(),
            Ordering::Greater => self.clone(),
            Ordering::Equal => {
                let mut j = self.clone();
                j.mask.extend(other.mask.iter().copied());
                j.normalized()
            }
        })
    }
}

fn advance(v: &mut [i64; MAX_AXES], d: usize, t: i64) -> bool {
    for ax in (0..d).rev() {
        v[ax] += 2;
        if v[ax] <= t {
            return true;
        }
        v[ax] = 0;
    }
    false
}

/// A gauge configuration: one group element per edge, stored in
/// enumeration order.
#[derive(Debug, Clone)]
pub struct GaugeConfig {
    pub lattice: LatticeLevel,
    pub kind: GroupKind,
    edges: Vec<Edge>,
    index: BTreeMap<Edge, usize>,
    pub elements: Vec<GroupElement>,
}

impl GaugeConfig {
    pub fn identity(lattice: LatticeLevel, kind: GroupKind) -> Self {
        let edges = lattice.enumerate_edges();
        let index = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let elements = edges.iter().map(|_| GroupElement::identity(kind)).collect();
        GaugeConfig {
            lattice,
            kind,
            edges,
            index,
            elements,
        }
    }

    /// Rebuild from elements listed in enumeration order.
    pub fn from_elements(
        lattice: LatticeLevel,
        kind: GroupKind,
        elements: Vec<GroupElement>,
    ) -> Result<Self> {
        let edges = lattice.enumerate_edges();
        if edges.len() != elements.len() {
            return Err(Error::Domain(alloc::format!(
                "expected {} edge elements, got {}",
                edges.len(),
                elements.len()
            )));
        }
        if elements.iter().any(|g| g.kind() != kind) {
            return Err(Error::Domain("mixed group kinds in configuration".into()));
        }
        let index = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        Ok(GaugeConfig {
            lattice,
            kind,
            edges,
            index,
            elements,
        })
    }

    /// Product-Haar (kinematical) sample.
    pub fn sample_kinematical<R: Rng + ?Sized>(
        lattice: LatticeLevel,
        kind: GroupKind,
        rng: &mut R,
    ) -> Self {
        let mut c = GaugeConfig::identity(lattice, kind);
        for g in c.elements.iter_mut() {
            *g = haar_sample(kind, rng);
        }
        c
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn get(&self, e: &Edge) -> &GroupElement {
        &self.elements[self.index[e]]
    }

    pub fn set(&mut self, e: &Edge, g: GroupElement) {
        assert_eq!(g.kind(), self.kind, "group kind mismatch");
        let i = self.index[e];
        self.elements[i] = g;
    }

    pub fn edge_index(&self, e: &Edge) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Holonomy of the straight segment from `from`, `span` ticks along
    /// axis `dir`, path-ordered left to right (first edge leftmost).
    pub fn segment_holonomy(&self, from: [i64; MAX_AXES], dir: u8, span: i64) -> GroupElement {
        let mut pos = from;
        let mut traveled = 0i64;
        let mut acc: Option<GroupElement> = None;
        while traveled < span {
            let whole = Edge { v: pos, dir, len: 2 };
            let e = if self.lattice.contains_edge(&whole) {
                whole
            } else {
                let half = Edge { v: pos, dir, len: 1 };
                assert!(
                    self.lattice.contains_edge(&half),
                    "segment walks off the edge set at {pos:?} dir {dir}"
                );
                half
            };
            let g = *self.get(&e);
            acc = Some(match acc {
                None => g,
                Some(a) => a.multiply(&g),
            });
            pos[dir as usize] += e.len as i64;
            traveled += e.len as i64;
        }
        acc.unwrap_or_else(|| GroupElement::identity(self.kind))
    }

    /// Gauge transformation: for an edge from src to dst,
    /// g -> G(src) g G(dst)^{-1}; sites absent from the map act as the
    /// identity. Plaquette holonomies transform by conjugation at the
    /// base corner, so class coordinates are invariant.
    pub fn gauge_transform(&self, sites: &BTreeMap<[i64; MAX_AXES], GroupElement>) -> GaugeConfig {
        let mut out = self.clone();
        for (i, e) in self.edges.iter().enumerate() {
            let mut g = self.elements[i];
            if let Some(gs) = sites.get(&e.v) {
                g = gs.multiply(&g);
            }
            if let Some(gd) = sites.get(&e.endpoint()) {
                g = g.multiply(&gd.inverse());
            }
            out.elements[i] = g;
        }
        out
    }
}

impl LatticeLevel {
    /// Edges covering the straight segment from `from`, `span` ticks
    /// along `dir`, in path order.
    pub fn segment_edges(&self, from: [i64; MAX_AXES], dir: u8, span: i64) -> Vec<Edge> {
        let mut pos = from;
        let mut traveled = 0i64;
        let mut out = Vec::new();
        while traveled < span {
            let whole = Edge { v: pos, dir, len: 2 };
            let e = if self.contains_edge(&whole) {
                whole
            } else {
                Edge { v: pos, dir, len: 1 }
            };
            debug_assert!(self.contains_edge(&e));
            out.push(e);
            pos[dir as usize] += e.len as i64;
            traveled += e.len as i64;
        }
        out
    }

    /// The boundary edges of a plaquette (bottom, right, top, left
    /// sides concatenated in that order).
    pub fn plaquette_edges(&self, p: &Plaquette) -> Vec<Edge> {
        let s = p.size as i64;
        let mut v_right = p.v;
        v_right[p.mu as usize] += s;
        let mut v_top = p.v;
        v_top[p.nu as usize] += s;
        let mut out = self.segment_edges(p.v, p.mu, s);
        out.extend(self.segment_edges(v_right, p.nu, s));
        out.extend(self.segment_edges(v_top, p.mu, s));
        out.extend(self.segment_edges(p.v, p.nu, s));
        out
    }
}

/// Boundary holonomy U = h1 h2 h3^{-1} h4^{-1} with slots
/// (h1,h2,h3,h4) = (bottom, right, top, left); bottom and right are
/// traversed forward, top and left inverted.
pub fn plaquette_holonomy(c: &GaugeConfig, p: &Plaquette) -> GroupElement {
    let s = p.size as i64;
    let (mu, nu) = (p.mu, p.nu);
    let mut v_right = p.v;
    v_right[mu as usize] += s;
    let mut v_top = p.v;
    v_top[nu as usize] += s;
    let h1 = c.segment_holonomy(p.v, mu, s);
    let h2 = c.segment_holonomy(v_right, nu, s);
    let h3 = c.segment_holonomy(v_top, mu, s);
    let h4 = c.segment_holonomy(p.v, nu, s);
    h1.multiply(&h2).multiply(&h3.inverse()).multiply(&h4.inverse())
}

/// Projection pi_{Gamma Gamma'}: compose fine edge elements along each
/// coarse edge's segment (path order).
pub fn coarsen(c_fine: &GaugeConfig, l_coarse: &LatticeLevel) -> Result<GaugeConfig> {
    if !l_coarse.is_ancestor_of(&c_fine.lattice) {
        return Err(Error::NotAnAncestor(alloc::format!(
            "target (k={}, |mask|={}) is not an ancestor of source (k={}, |mask|={})",
            l_coarse.k,
            l_coarse.mask.len(),
            c_fine.lattice.k,
            c_fine.lattice.mask.len()
        )));
    }
    let scale = 1i64 << (c_fine.lattice.k - l_coarse.k);
    let mut out = GaugeConfig::identity(l_coarse.clone(), c_fine.kind);
    for e in l_coarse.enumerate_edges() {
        let mut from = e.v;
        for x in from.iter_mut() {
            *x *= scale;
        }
        let g = c_fine.segment_holonomy(from, e.dir, e.len as i64 * scale);
        out.set(&e, g);
    }
    Ok(out)
}

/// Config-valued function type used by the pullback / operator plumbing.
pub type ConfigFn = Rc<dyn Fn(&GaugeConfig) -> f64>;

/// Pullback pi* f: evaluate f on the coarsening of the argument.
pub fn pullback_function(f: ConfigFn, l_coarse: &LatticeLevel) -> ConfigFn {
    let l = l_coarse.clone();
    Rc::new(move |c_fine: &GaugeConfig| {
        let coarse = coarsen(c_fine, &l).expect("pullback requires an ancestor level");
        f(&coarse)
    })
}

/// Consistency defect of a pair of operators (Eq. (3.7a)-(3.7b) shape):
/// max over sample fine configs of |O_fine(pi* f) - pi*(O_coarse f)|.
/// Zero is expected for compatible pairs; the defect is reported, not
/// asserted.
pub fn verify_operator_consistency(
    o_coarse: &dyn Fn(ConfigFn) -> ConfigFn,
    o_fine: &dyn Fn(ConfigFn) -> ConfigFn,
    f: ConfigFn,
    l_coarse: &LatticeLevel,
    samples: &[GaugeConfig],
) -> f64 {
    let lhs = o_fine(pullback_function(f.clone(), l_coarse));
    let rhs = pullback_function(o_coarse(f), l_coarse);
    let mut defect = 0.0f64;
    for c in samples {
        defect = defect.max((lhs(c) - rhs(c)).abs());
    }
    defect
}
