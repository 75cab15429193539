//! Edge-qubit square lattices on the torus and on an open patch, plus the
//! region configurations used by the index and entropy computations.
//!
//! Vertex `(r, c)` sits in row `r`, column `c`. The horizontal edge `h(r, c)`
//! joins `(r, c)`–`(r, c+1)` and the vertical edge `v(r, c)` joins
//! `(r, c)`–`(r+1, c)`. Face `(r, c)` is bounded by `h(r, c)`, `h(r+1, c)`,
//! `v(r, c)` and `v(r, c+1)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{input_err, layout_err, Result};
use crate::gf2::BitVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Torus,
    Planar,
}

impl core::str::FromStr for Geometry {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(Geometry::Torus),
            "planar" => Ok(Geometry::Planar),
            other => Err(input_err!("unknown geometry '{other}' (expected torus or planar)")),
        }
    }
}

impl core::fmt::Display for Geometry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Geometry::Torus => "torus",
            Geometry::Planar => "planar",
        })
    }
}

pub type Vertex = (usize, usize);
pub type Face = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeDir {
    Horizontal,
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    geometry: Geometry,
    l: usize,
}

impl Lattice {
    pub fn new(geometry: Geometry, l: usize) -> Result<Self> {
        if l < 2 {
            return Err(input_err!("lattice size L must be at least 2, got {l}"));
        }
        Ok(Self { geometry, l })
    }

    pub fn torus(l: usize) -> Result<Self> {
        Self::new(Geometry::Torus, l)
    }

    pub fn planar(l: usize) -> Result<Self> {
        Self::new(Geometry::Planar, l)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn size(&self) -> usize {
        self.l
    }

    fn h_count(&self) -> usize {
        match self.geometry {
            Geometry::Torus => self.l * self.l,
            Geometry::Planar => self.l * (self.l - 1),
        }
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.h_count()
    }

    pub fn num_vertices(&self) -> usize {
        self.l * self.l
    }

    pub fn num_faces(&self) -> usize {
        match self.geometry {
            Geometry::Torus => self.l * self.l,
            Geometry::Planar => (self.l - 1) * (self.l - 1),
        }
    }

    /// Maps signed coordinates onto the lattice: wraps on the torus, `None`
    /// outside the patch.
    pub fn wrap(&self, r: isize, c: isize) -> Option<Vertex> {
        let l = self.l as isize;
        match self.geometry {
            Geometry::Torus => Some((r.rem_euclid(l) as usize, c.rem_euclid(l) as usize)),
            Geometry::Planar => ((0..l).contains(&r) && (0..l).contains(&c)).then_some((r as usize, c as usize)),
        }
    }

    /// Index of the horizontal edge leaving `(r, c)` to the right.
    pub fn h(&self, r: isize, c: isize) -> Option<usize> {
        let (r, c) = self.wrap(r, c)?;
        match self.geometry {
            Geometry::Torus => Some(2 * (r * self.l + c)),
            Geometry::Planar => (c + 1 < self.l).then(|| r * (self.l - 1) + c),
        }
    }

    /// Index of the vertical edge leaving `(r, c)` downwards.
    pub fn v(&self, r: isize, c: isize) -> Option<usize> {
        let (r, c) = self.wrap(r, c)?;
        match self.geometry {
            Geometry::Torus => Some(2 * (r * self.l + c) + 1),
            Geometry::Planar => (r + 1 < self.l).then(|| self.h_count() + r * self.l + c),
        }
    }

    /// Direction and anchor vertex of an edge.
    pub fn edge_anchor(&self, e: usize) -> (EdgeDir, Vertex) {
        assert!(e < self.num_qubits(), "edge {e} out of range");
        match self.geometry {
            Geometry::Torus => {
                let site = e / 2;
                let dir = if e.is_multiple_of(2) { EdgeDir::Horizontal } else { EdgeDir::Vertical };
                (dir, (site / self.l, site % self.l))
            }
            Geometry::Planar => {
                let hc = self.h_count();
                if e < hc {
                    (EdgeDir::Horizontal, (e / (self.l - 1), e % (self.l - 1)))
                } else {
                    let k = e - hc;
                    (EdgeDir::Vertical, (k / self.l, k % self.l))
                }
            }
        }
    }

    pub fn endpoints(&self, e: usize) -> [Vertex; 2] {
        let (dir, (r, c)) = self.edge_anchor(e);
        let (r, c) = (r as isize, c as isize);
        let far = match dir {
            EdgeDir::Horizontal => self.wrap(r, c + 1),
            EdgeDir::Vertical => self.wrap(r + 1, c),
        };
        [(r as usize, c as usize), far.expect("edge endpoint on lattice")]
    }

    pub fn edge_label(&self, e: usize) -> String {
        let (dir, (r, c)) = self.edge_anchor(e);
        match dir {
            EdgeDir::Horizontal => format!("h({r},{c})"),
            EdgeDir::Vertical => format!("v({r},{c})"),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.l).flat_map(move |r| (0..self.l).map(move |c| (r, c)))
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        let n = match self.geometry {
            Geometry::Torus => self.l,
            Geometry::Planar => self.l - 1,
        };
        (0..n).flat_map(move |r| (0..n).map(move |c| (r, c)))
    }

    pub fn vertex_index(&self, v: Vertex) -> usize {
        v.0 * self.l + v.1
    }

    /// Edges incident to a vertex: 4 on the torus, 2 or 3 on the patch boundary.
    pub fn star(&self, v: Vertex) -> Vec<usize> {
        let (r, c) = (v.0 as isize, v.1 as isize);
        let mut edges: Vec<usize> =
            [self.h(r, c), self.h(r, c - 1), self.v(r, c), self.v(r - 1, c)].into_iter().flatten().collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn plaquette(&self, f: Face) -> Vec<usize> {
        let (r, c) = (f.0 as isize, f.1 as isize);
        let mut edges: Vec<usize> = [self.h(r, c), self.h(r + 1, c), self.v(r, c), self.v(r, c + 1)]
            .into_iter()
            .map(|e| e.expect("face edges exist"))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn stars(&self) -> Vec<Vec<usize>> {
        self.vertices().map(|v| self.star(v)).collect()
    }

    pub fn plaquettes(&self) -> Vec<Vec<usize>> {
        self.faces().map(|f| self.plaquette(f)).collect()
    }

    /// Signed shortest displacement from `a` to `b` along one axis.
    fn axis_offset(&self, a: usize, b: usize) -> isize {
        let d = b as isize - a as isize;
        match self.geometry {
            Geometry::Planar => d,
            Geometry::Torus => {
                let l = self.l as isize;
                let d = d.rem_euclid(l);
                if 2 * d > l {
                    d - l
                } else {
                    d
                }
            }
        }
    }

    /// Shortest signed displacement `(dr, dc)` from `a` to `b`.
    pub fn offset(&self, a: Vertex, b: Vertex) -> (isize, isize) {
        (self.axis_offset(a.0, b.0), self.axis_offset(a.1, b.1))
    }

    /// Graph distance between vertices.
    pub fn distance(&self, a: Vertex, b: Vertex) -> usize {
        let (dr, dc) = self.offset(a, b);
        dr.unsigned_abs() + dc.unsigned_abs()
    }

    /// Twice the displacement of an edge midpoint from `center`, as integers.
    pub fn midpoint_offset2(&self, e: usize, center: Vertex) -> (isize, isize) {
        let (dir, anchor) = self.edge_anchor(e);
        let (dr, dc) = self.offset(center, anchor);
        match dir {
            EdgeDir::Horizontal => (2 * dr, 2 * dc + 1),
            EdgeDir::Vertical => (2 * dr + 1, 2 * dc),
        }
    }

    /// Vertices touched by any edge of the region.
    pub fn touched_vertices(&self, region: &Region) -> BTreeSet<Vertex> {
        region.iter().flat_map(|e| self.endpoints(e)).collect()
    }

    /// Edges with both endpoints in the vertex set.
    pub fn induced_edges(&self, vertices: &BTreeSet<Vertex>) -> Vec<usize> {
        (0..self.num_qubits()).filter(|&e| self.endpoints(e).iter().all(|v| vertices.contains(v))).collect()
    }

    /// Vertices `(r0 + i, c0 + j)` for `0 ≤ i, j ≤ side`, clipped to the patch.
    pub fn box_vertices(&self, origin: Vertex, side: usize) -> BTreeSet<Vertex> {
        let (r0, c0) = (origin.0 as isize, origin.1 as isize);
        let side = side.min(self.l - 1) as isize;
        (0..=side).flat_map(|i| (0..=side).filter_map(move |j| self.wrap(r0 + i, c0 + j))).collect()
    }

    /// Edges inside the box of the given side anchored at `origin`.
    pub fn box_region(&self, origin: Vertex, side: usize) -> Region {
        let edges = self.induced_edges(&self.box_vertices(origin, side));
        Region::new(format!("box{origin:?}+{side}"), self.num_qubits(), edges)
    }

    /// Edges whose endpoints both lie within graph distance `radius` of `center`.
    pub fn ball(&self, center: Vertex, radius: usize) -> Region {
        let verts: BTreeSet<Vertex> = self.vertices().filter(|&v| self.distance(center, v) <= radius).collect();
        Region::new(format!("ball{center:?}/{radius}"), self.num_qubits(), self.induced_edges(&verts))
    }

    /// Edges induced on vertices within Chebyshev distance `radius` of `center`.
    pub fn square(&self, center: Vertex, radius: usize) -> Region {
        let verts: BTreeSet<Vertex> = self
            .vertices()
            .filter(|&v| {
                let (dr, dc) = self.offset(center, v);
                dr.unsigned_abs().max(dc.unsigned_abs()) <= radius
            })
            .collect();
        Region::new(format!("square{center:?}/{radius}"), self.num_qubits(), self.induced_edges(&verts))
    }

    pub fn full_region(&self) -> Region {
        Region::new("all", self.num_qubits(), 0..self.num_qubits())
    }

    pub fn empty_region(&self) -> Region {
        Region::new("empty", self.num_qubits(), core::iter::empty())
    }
}

/// A named set of edge qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    name: String,
    edges: BitVec,
}

impl Region {
    pub fn new(name: impl Into<String>, n_qubits: usize, edges: impl IntoIterator<Item = usize>) -> Self {
        Self { name: name.into(), edges: BitVec::from_indices(n_qubits, edges) }
    }

    pub fn from_mask(name: impl Into<String>, edges: BitVec) -> Self {
        Self { name: name.into(), edges }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn mask(&self) -> &BitVec {
        &self.edges
    }

    pub fn n_qubits(&self) -> usize {
        self.edges.len()
    }

    pub fn len(&self) -> usize {
        self.edges.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_zero()
    }

    pub fn contains(&self, e: usize) -> bool {
        e < self.edges.len() && self.edges.get(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter_ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        let mut m = self.edges.clone();
        m.and_assign(&other.edges);
        m == self.edges
    }

    pub fn contains_all(&self, edges: &[usize]) -> bool {
        edges.iter().all(|&e| self.contains(e))
    }

    pub fn intersects(&self, edges: &[usize]) -> bool {
        edges.iter().any(|&e| self.contains(e))
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut m = self.edges.clone();
        m.or_assign(&other.edges);
        Region::from_mask(format!("{}∪{}", self.name, other.name), m)
    }

    pub fn intersection(&self, other: &Region) -> Region {
        let mut m = self.edges.clone();
        m.and_assign(&other.edges);
        Region::from_mask(format!("{}∩{}", self.name, other.name), m)
    }

    pub fn difference(&self, other: &Region) -> Region {
        let mut m = other.edges.clone();
        m.and_assign(&self.edges);
        m.xor_assign(&self.edges);
        Region::from_mask(format!("{}∖{}", self.name, other.name), m)
    }

    pub fn complement(&self) -> Region {
        let mut m = self.edges.clone();
        for i in 0..m.len() {
            m.flip(i);
        }
        let name = match self.name.strip_prefix('¬') {
            Some(inner) => inner.to_string(),
            None => format!("¬{}", self.name),
        };
        Region::from_mask(name, m)
    }
}

/// Number of stars and plaquettes cut by the region: partly inside, partly outside.
pub fn boundary_size(lat: &Lattice, r: &Region) -> usize {
    cut_generators(lat, r).len()
}

fn cut_generators(lat: &Lattice, r: &Region) -> Vec<Vec<usize>> {
    lat.stars()
        .into_iter()
        .chain(lat.plaquettes())
        .filter(|g| {
            let inside = g.iter().filter(|&&e| r.contains(e)).count();
            inside > 0 && inside < g.len()
        })
        .collect()
}

/// Connected components of the cut generators, adjacency being a shared edge.
pub fn boundary_components(lat: &Lattice, r: &Region) -> usize {
    let cut = cut_generators(lat, r);
    let mut parent: Vec<usize> = (0..cut.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut owner: Vec<Option<usize>> = vec![None; lat.num_qubits()];
    for (g, edges) in cut.iter().enumerate() {
        for &e in edges {
            match owner[e] {
                None => owner[e] = Some(g),
                Some(o) => {
                    let (a, b) = (find(&mut parent, o), find(&mut parent, g));
                    parent[a] = b;
                }
            }
        }
    }
    (0..cut.len()).filter(|&i| find(&mut parent, i) == i).count()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlobShape {
    /// Edges within graph distance `radius` of the center.
    #[default]
    Ball,
    /// The star of the center together with the face to its lower right.
    Cell,
}

/// Parameters of a region configuration, as read from layout documents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LayoutSpec {
    TwoBlob {
        centers: [[usize; 2]; 2],
        #[serde(default = "default_radius")]
        radius: usize,
        #[serde(default)]
        shape: BlobShape,
        /// Minimum vertex distance required between the blobs.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        separation: Option<usize>,
    },
    KitaevPreskill {
        center: [usize; 2],
        radius: usize,
    },
    LevinWen {
        center: [usize; 2],
        inner: usize,
        outer: usize,
    },
    Annulus {
        center: [usize; 2],
        inner: usize,
        outer: usize,
    },
    Rectangle {
        origin: [usize; 2],
        height: usize,
        width: usize,
    },
}

fn default_radius() -> usize {
    1
}

impl LayoutSpec {
    pub fn kind(&self) -> LayoutKind {
        match self {
            LayoutSpec::TwoBlob { .. } => LayoutKind::TwoBlob,
            LayoutSpec::KitaevPreskill { .. } => LayoutKind::KitaevPreskill,
            LayoutSpec::LevinWen { .. } => LayoutKind::LevinWen,
            LayoutSpec::Annulus { .. } => LayoutKind::Annulus,
            LayoutSpec::Rectangle { .. } => LayoutKind::Rectangle,
        }
    }

    /// Blobs at maximal torus separation with the given radius.
    pub fn default_two_blob(l: usize, radius: usize) -> Self {
        LayoutSpec::TwoBlob { centers: [[0, 0], [l / 2, l / 2]], radius, shape: BlobShape::Ball, separation: None }
    }

    /// Two cells a knight's move apart; fits the 18-qubit torus at `l = 3`.
    pub fn compact_two_blob(l: usize) -> Self {
        LayoutSpec::TwoBlob {
            centers: [[0, 0], [l / 3, 2 * l / 3]],
            radius: 1,
            shape: BlobShape::Cell,
            separation: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutKind {
    TwoBlob,
    KitaevPreskill,
    LevinWen,
    Annulus,
    Rectangle,
}

impl LayoutKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LayoutKind::TwoBlob => "two-blob",
            LayoutKind::KitaevPreskill => "kitaev-preskill",
            LayoutKind::LevinWen => "levin-wen",
            LayoutKind::Annulus => "annulus",
            LayoutKind::Rectangle => "rectangle",
        }
    }
}

/// Smallest region thickness, in edges, for which entropy combinations are
/// free of short-range leakage.
pub const MIN_THICKNESS: usize = 2;

#[derive(Clone, Debug)]
pub struct RegionLayout {
    pub spec: LayoutSpec,
    pub regions: Vec<Region>,
    /// Minimum vertex distance between the two blobs (two-blob only).
    pub separation: Option<usize>,
    /// Set when some region is thinner than [`MIN_THICKNESS`].
    pub sub_minimal: bool,
}

impl RegionLayout {
    pub fn kind(&self) -> LayoutKind {
        self.spec.kind()
    }

    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.name() == name)
    }
}

fn check_vertex(lat: &Lattice, v: [usize; 2]) -> Result<Vertex> {
    if v[0] >= lat.size() || v[1] >= lat.size() {
        return Err(layout_err!("vertex {:?} lies outside the L={} lattice", v, lat.size()));
    }
    Ok((v[0], v[1]))
}

fn blob(lat: &Lattice, center: Vertex, radius: usize, shape: BlobShape, name: &str) -> Result<Region> {
    let region = match shape {
        BlobShape::Ball => lat.ball(center, radius),
        BlobShape::Cell => {
            let (r, c) = center;
            let face = lat
                .wrap(r as isize, c as isize)
                .filter(|_| lat.geometry() == Geometry::Torus || (r + 1 < lat.size() && c + 1 < lat.size()))
                .ok_or_else(|| layout_err!("cell blob at {center:?} has no face to its lower right"))?;
            let mut edges = lat.star(center);
            edges.extend(lat.plaquette(face));
            Region::new(name, lat.num_qubits(), edges)
        }
    };
    Ok(region.named(name))
}

/// Sector of an edge midpoint around the face centre to the lower right of `center`.
///
/// Sector boundaries sit at 100°, 220° and 340° so that no edge midpoint lies
/// on one and only the central plaquette meets all three sectors.
fn sector(lat: &Lattice, e: usize, center: Vertex) -> usize {
    let (mr, mc) = lat.midpoint_offset2(e, center);
    // shift origin to the face centre, y pointing up
    let x = (mc - 1) as f64;
    let y = -((mr - 1) as f64);
    let mut angle = libm::atan2(y, x).to_degrees();
    if angle < 0.0 {
        angle += 360.0;
    }
    if (100.0..220.0).contains(&angle) {
        1
    } else if (220.0..340.0).contains(&angle) {
        2
    } else {
        0
    }
}

/// Builds and validates a region configuration.
pub fn make_layout(lat: &Lattice, spec: &LayoutSpec) -> Result<RegionLayout> {
    let n = lat.num_qubits();
    let l = lat.size();
    match spec {
        LayoutSpec::TwoBlob { centers, radius, shape, separation } => {
            let ca = check_vertex(lat, centers[0])?;
            let cb = check_vertex(lat, centers[1])?;
            let a = blob(lat, ca, *radius, *shape, "A")?;
            let b = blob(lat, cb, *radius, *shape, "B")?;
            if !a.intersection(&b).is_empty() {
                return Err(layout_err!("blobs around {ca:?} and {cb:?} overlap"));
            }
            let va = lat.touched_vertices(&a);
            let vb = lat.touched_vertices(&b);
            let sep = va
                .iter()
                .flat_map(|&x| vb.iter().map(move |&y| (x, y)))
                .map(|(x, y)| lat.distance(x, y))
                .min()
                .unwrap_or(0);
            if let Some(want) = separation {
                if sep < *want {
                    return Err(layout_err!("blob separation {sep} is below the required {want}"));
                }
            }
            let e = a.union(&b).complement().named("E");
            if e.is_empty() {
                return Err(layout_err!("blobs leave no room for E"));
            }
            Ok(RegionLayout { spec: spec.clone(), regions: vec![a, b, e], separation: Some(sep), sub_minimal: false })
        }
        LayoutSpec::KitaevPreskill { center, radius } => {
            let c = check_vertex(lat, *center)?;
            if lat.geometry() == Geometry::Torus && 2 * radius + 2 > l {
                return Err(layout_err!("disk of radius {radius} does not fit in L={l}"));
            }
            // disk centred on the face to the lower right of `c`
            let disk_verts: BTreeSet<Vertex> = lat
                .vertices()
                .filter(|&v| {
                    let (dr, dc) = lat.offset(c, v);
                    let r = *radius as isize;
                    (-r + 1..=r).contains(&dr) && (-r + 1..=r).contains(&dc)
                })
                .collect();
            let disk = lat.induced_edges(&disk_verts);
            if disk.is_empty() {
                return Err(layout_err!("disk of radius {radius} is empty"));
            }
            let mut parts = [Vec::new(), Vec::new(), Vec::new()];
            for e in disk {
                parts[sector(lat, e, c)].push(e);
            }
            let regions: Vec<Region> =
                ["A", "B", "C"].iter().zip(parts).map(|(name, p)| Region::new(*name, n, p)).collect();
            if regions.iter().any(Region::is_empty) {
                return Err(layout_err!("disk of radius {radius} is too small to split in three"));
            }
            Ok(RegionLayout { spec: spec.clone(), regions, separation: None, sub_minimal: *radius < MIN_THICKNESS })
        }
        LayoutSpec::LevinWen { center, inner, outer } | LayoutSpec::Annulus { center, inner, outer } => {
            let c = check_vertex(lat, *center)?;
            if inner >= outer || *inner == 0 {
                return Err(layout_err!("annulus needs 0 < inner < outer, got {inner}, {outer}"));
            }
            if lat.geometry() == Geometry::Torus && 2 * outer + 2 > l {
                return Err(layout_err!("annulus of outer radius {outer} does not fit in L={l}"));
            }
            let ring = lat.square(c, *outer).difference(&{
                // edges touching the hole are not part of the ring
                let hole: BTreeSet<Vertex> = lat
                    .vertices()
                    .filter(|&v| {
                        let (dr, dc) = lat.offset(c, v);
                        dr.unsigned_abs().max(dc.unsigned_abs()) < *inner
                    })
                    .collect();
                let touching: Vec<usize> =
                    (0..n).filter(|&e| lat.endpoints(e).iter().any(|v| hole.contains(v))).collect();
                Region::new("hole", n, touching)
            });
            let ring = ring.named("annulus");
            let sub_minimal = outer - inner < MIN_THICKNESS;
            if matches!(spec, LayoutSpec::Annulus { .. }) {
                let comps = boundary_components(lat, &ring);
                if comps != 2 {
                    return Err(layout_err!("annulus has {comps} boundary components, expected 2"));
                }
                return Ok(RegionLayout { spec: spec.clone(), regions: vec![ring], separation: None, sub_minimal });
            }
            // cuts: vertical strips of width 2 through the ring above and below the centre
            let cut = |upper: bool| -> Region {
                let edges: Vec<usize> = ring
                    .iter()
                    .filter(|&e| {
                        let (mr, mc) = lat.midpoint_offset2(e, c);
                        let side = if upper { mr < 0 } else { mr > 0 };
                        side && (-2..=2).contains(&mc)
                    })
                    .collect();
                Region::new("cut", n, edges)
            };
            let top = cut(true);
            let bottom = cut(false);
            let regions = vec![
                ring.clone(),
                ring.difference(&top).named("cut-top"),
                ring.difference(&bottom).named("cut-bottom"),
                ring.difference(&top).difference(&bottom).named("cut-both"),
            ];
            Ok(RegionLayout { spec: spec.clone(), regions, separation: None, sub_minimal })
        }
        LayoutSpec::Rectangle { origin, height, width } => {
            let o = check_vertex(lat, *origin)?;
            if *height == 0 || *width == 0 {
                return Err(layout_err!("rectangle needs positive height and width"));
            }
            let fits = match lat.geometry() {
                Geometry::Torus => height + 1 < l && width + 1 < l,
                Geometry::Planar => o.0 + height < l && o.1 + width < l,
            };
            if !fits {
                return Err(layout_err!("rectangle {height}x{width} at {o:?} does not fit in L={l}"));
            }
            let verts: BTreeSet<Vertex> = (0..=*height as isize)
                .flat_map(|i| (0..=*width as isize).filter_map(move |j| lat.wrap(o.0 as isize + i, o.1 as isize + j)))
                .collect();
            let rect = Region::new("rectangle", n, lat.induced_edges(&verts));
            let comps = boundary_components(lat, &rect);
            if lat.geometry() == Geometry::Torus && comps != 1 {
                return Err(layout_err!("rectangle has {comps} boundary components, expected 1"));
            }
            Ok(RegionLayout {
                spec: spec.clone(),
                regions: vec![rect],
                separation: None,
                sub_minimal: (*height).min(*width) < MIN_THICKNESS,
            })
        }
    }
}
