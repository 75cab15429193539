//! Stabilizer states over GF(2), toric-code ground states and string operators.

mod pauli;

use alloc::vec::Vec;

pub use pauli::PauliOperator;

use crate::error::{input_err, Result};
use crate::gf2::{self, BitMatrix, BitVec, SpanBasis};
use crate::lattice::{Face, Geometry, Lattice, Region, Vertex};

/// A pure stabilizer state given by independent commuting Hermitian generators,
/// one per qubit.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    n: usize,
    generators: Vec<PauliOperator>,
    span: SpanBasis,
}

impl StabilizerState {
    pub fn new(generators: Vec<PauliOperator>) -> Result<Self> {
        let n = generators.first().map_or(0, PauliOperator::n_qubits);
        if generators.len() != n {
            return Err(input_err!("{} generators for {n} qubits; a pure state needs one per qubit", generators.len()));
        }
        if let Some(g) = generators.iter().find(|g| g.n_qubits() != n) {
            return Err(input_err!("generator on {} qubits in an {n}-qubit state", g.n_qubits()));
        }
        if let Some(g) = generators.iter().find(|g| !g.is_hermitian()) {
            return Err(input_err!("generator {g} is not Hermitian"));
        }
        for (i, a) in generators.iter().enumerate() {
            if let Some(j) = generators[i + 1..].iter().position(|b| a.anticommutes(b)) {
                return Err(input_err!("generators {i} and {} anticommute", i + 1 + j));
            }
        }
        let mut span = SpanBasis::new(2 * n, n);
        for g in &generators {
            if !span.insert(&g.symplectic_vector()) {
                return Err(input_err!("generator {g} depends on the others"));
            }
        }
        Ok(Self { n, generators, span })
    }

    /// The computational basis state |0…0⟩.
    pub fn all_zero(n: usize) -> Self {
        Self::new((0..n).map(|q| PauliOperator::z_on(n, [q])).collect()).expect("single-qubit Z generators")
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    /// Product of the generators with the given indices.
    pub fn element(&self, indices: impl IntoIterator<Item = usize>) -> PauliOperator {
        indices.into_iter().fold(PauliOperator::identity(self.n), |acc, i| acc.mul(&self.generators[i]))
    }

    fn element_from_combo(&self, combo: &BitVec) -> PauliOperator {
        self.element(combo.iter_ones())
    }

    /// Exact expectation value: +1 if `p ∈ S`, −1 if `−p ∈ S`, 0 otherwise.
    pub fn expectation(&self, p: &PauliOperator) -> Result<i8> {
        if p.n_qubits() != self.n {
            return Err(input_err!("operator on {} qubits, state on {}", p.n_qubits(), self.n));
        }
        if !p.is_hermitian() {
            return Err(input_err!("operator {p} is not Hermitian"));
        }
        let Some(combo) = self.span.express(&p.symplectic_vector()) else {
            return Ok(0);
        };
        let s = self.element(combo);
        Ok(if s.phase() == p.phase() { 1 } else { -1 })
    }

    /// Whether the Pauli class of `p` (ignoring phase) lies in the group.
    pub fn contains_class(&self, p: &PauliOperator) -> bool {
        self.span.contains(&p.symplectic_vector())
    }

    /// Symplectic columns (x then z) of the qubits outside `r`.
    fn outside_columns(&self, r: &Region) -> Vec<usize> {
        let out: Vec<usize> = (0..self.n).filter(|&q| !r.contains(q)).collect();
        out.iter().copied().chain(out.iter().map(|&q| q + self.n)).collect()
    }

    /// Constraint matrix whose rows are the symplectic columns outside `r`
    /// and whose columns are the generators.
    fn outside_system(&self, r: &Region) -> BitMatrix {
        let cols = self.outside_columns(r);
        let sv: Vec<BitVec> = self.generators.iter().map(PauliOperator::symplectic_vector).collect();
        let rows =
            cols.iter().map(|&col| BitVec::from_indices(self.n, (0..self.n).filter(|&g| sv[g].get(col)))).collect();
        BitMatrix::from_rows(self.n, rows).expect("rows sized to generator count")
    }

    /// Basis of the subgroup `{s ∈ S : support(s) ⊆ r}`.
    pub fn subgroup_on(&self, r: &Region) -> Vec<PauliOperator> {
        gf2::nullspace(&self.outside_system(r)).iter().map(|c| self.element_from_combo(c)).collect()
    }

    /// Dimension over GF(2) of `{s ∈ S : support(s) ⊆ r}`.
    pub fn subgroup_dim(&self, r: &Region) -> usize {
        gf2::nullspace(&self.outside_system(r)).len()
    }

    /// Finds `s ∈ S` with `support(q·s) ⊆ r`, returning `s`.
    pub fn coset_support_feasible(&self, q: &PauliOperator, r: &Region) -> Option<PauliOperator> {
        let cols = self.outside_columns(r);
        let qv = q.symplectic_vector();
        let rhs = BitVec::from_indices(cols.len(), (0..cols.len()).filter(|&i| qv.get(cols[i])));
        let combo = gf2::solve(&self.outside_system(r), &rhs).expect("dimensions agree")?;
        Some(self.element_from_combo(&combo))
    }

    /// The state `v·ψ`: generators anticommuting with `v` change sign.
    pub fn conjugated_by(&self, v: &PauliOperator) -> StabilizerState {
        let generators =
            self.generators.iter().map(|g| if g.anticommutes(v) { g.negated() } else { g.clone() }).collect();
        StabilizerState { n: self.n, generators, span: self.span.clone() }
    }
}

/// X on the star of a vertex.
pub fn star_operator(lat: &Lattice, v: Vertex) -> PauliOperator {
    PauliOperator::x_on(lat.num_qubits(), lat.star(v))
}

/// Z on the boundary of a face.
pub fn plaquette_operator(lat: &Lattice, f: Face) -> PauliOperator {
    PauliOperator::z_on(lat.num_qubits(), lat.plaquette(f))
}

/// All star and plaquette operators, stars first.
pub fn local_generators(lat: &Lattice) -> Vec<PauliOperator> {
    lat.vertices().map(|v| star_operator(lat, v)).chain(lat.faces().map(|f| plaquette_operator(lat, f))).collect()
}

/// Z along row 0 and along column 0: the two non-contractible Z loops of the torus.
pub fn torus_z_logicals(lat: &Lattice) -> [PauliOperator; 2] {
    let n = lat.num_qubits();
    let l = lat.size() as isize;
    [
        PauliOperator::z_on(n, (0..l).map(|c| lat.h(0, c).expect("torus edge"))),
        PauliOperator::z_on(n, (0..l).map(|r| lat.v(r, 0).expect("torus edge"))),
    ]
}

/// X along the dual loops crossing row 0 and column 0 (conjugate to the Z logicals).
pub fn torus_x_logicals(lat: &Lattice) -> [PauliOperator; 2] {
    let n = lat.num_qubits();
    let l = lat.size() as isize;
    [
        PauliOperator::x_on(n, (0..l).map(|r| lat.h(r, 0).expect("torus edge"))),
        PauliOperator::x_on(n, (0..l).map(|c| lat.v(0, c).expect("torus edge"))),
    ]
}

/// Toric-code ground state: independent stars and plaquettes, plus on the
/// torus the two Z logicals with eigenvalue +1.
pub fn toric_ground_state(lat: &Lattice) -> StabilizerState {
    let n = lat.num_qubits();
    let mut span = SpanBasis::new(2 * n, 2 * n + 2);
    let mut gens = Vec::with_capacity(n);
    let extra = match lat.geometry() {
        Geometry::Torus => torus_z_logicals(lat).to_vec(),
        Geometry::Planar => Vec::new(),
    };
    for g in local_generators(lat).into_iter().chain(extra) {
        if span.insert(&g.symplectic_vector()) {
            gens.push(g);
        }
    }
    StabilizerState::new(gens).expect("toric generators are independent and commuting")
}

/// Number of encoded qubits: qubit count minus the rank of stars and plaquettes.
pub fn logical_count(lat: &Lattice) -> usize {
    let rows: Vec<BitVec> = local_generators(lat).iter().map(PauliOperator::symplectic_vector).collect();
    let m = BitMatrix::from_rows(2 * lat.num_qubits(), rows).expect("uniform rows");
    lat.num_qubits() - gf2::rank(&m)
}

/// A string operator path: a walk on vertices (Z-type), on faces (X-type),
/// or both (Y-type).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RibbonPath {
    Direct(Vec<Vertex>),
    Dual(Vec<Face>),
    Composite { direct: Vec<Vertex>, dual: Vec<Face> },
}

impl RibbonPath {
    /// First and last vertex (direct) or face (dual) of each walk.
    pub fn endpoints(&self) -> (Option<[Vertex; 2]>, Option<[Face; 2]>) {
        fn ends(w: &[(usize, usize)]) -> Option<[(usize, usize); 2]> {
            Some([*w.first()?, *w.last()?])
        }
        match self {
            RibbonPath::Direct(w) => (ends(w), None),
            RibbonPath::Dual(w) => (None, ends(w)),
            RibbonPath::Composite { direct, dual } => (ends(direct), ends(dual)),
        }
    }
}

fn step_edge(lat: &Lattice, a: Vertex, b: Vertex) -> Result<usize> {
    let (r, c) = (a.0 as isize, a.1 as isize);
    let e = match lat.offset(a, b) {
        (0, 1) => lat.h(r, c),
        (0, -1) => lat.h(r, c - 1),
        (1, 0) => lat.v(r, c),
        (-1, 0) => lat.v(r - 1, c),
        _ => None,
    };
    e.ok_or_else(|| input_err!("vertices {a:?} and {b:?} are not adjacent"))
}

fn dual_step_edge(lat: &Lattice, f: Face, g: Face) -> Result<usize> {
    let faces: Vec<Face> = lat.faces().collect();
    if !faces.contains(&f) || !faces.contains(&g) {
        return Err(input_err!("face {f:?} or {g:?} is not on the lattice"));
    }
    let (r, c) = (f.0 as isize, f.1 as isize);
    let e = match lat.offset(f, g) {
        (0, 1) => lat.v(r, c + 1),
        (0, -1) => lat.v(r, c),
        (1, 0) => lat.h(r + 1, c),
        (-1, 0) => lat.h(r, c),
        _ => None,
    };
    e.ok_or_else(|| input_err!("faces {f:?} and {g:?} are not adjacent"))
}

fn walk_edges(lat: &Lattice, walk: &[Vertex], dual: bool) -> Result<Vec<usize>> {
    let n = lat.size();
    if let Some(bad) = walk.iter().find(|p| p.0 >= n || p.1 >= n) {
        return Err(input_err!("path point {bad:?} lies outside the lattice"));
    }
    walk.windows(2).map(|w| if dual { dual_step_edge(lat, w[0], w[1]) } else { step_edge(lat, w[0], w[1]) }).collect()
}

/// The Pauli string of a path: Z on the edges of the vertex walk, X on the
/// edges crossed by the face walk. Edges visited twice cancel.
pub fn ribbon_operator(lat: &Lattice, path: &RibbonPath) -> Result<PauliOperator> {
    let n = lat.num_qubits();
    let z_of = |w: &[Vertex]| -> Result<PauliOperator> {
        let mut bits = BitVec::zeros(n);
        for e in walk_edges(lat, w, false)? {
            bits.flip(e);
        }
        Ok(PauliOperator::from_parts(BitVec::zeros(n), bits, 0))
    };
    let x_of = |w: &[Face]| -> Result<PauliOperator> {
        let mut bits = BitVec::zeros(n);
        for e in walk_edges(lat, w, true)? {
            bits.flip(e);
        }
        Ok(PauliOperator::from_parts(bits, BitVec::zeros(n), 0))
    };
    match path {
        RibbonPath::Direct(w) => z_of(w),
        RibbonPath::Dual(w) => x_of(w),
        RibbonPath::Composite { direct, dual } => Ok(x_of(dual)?.mul(&z_of(direct)?).hermitian_class()),
    }
}

/// Shortest walk from `a` to `b`, columns first then rows.
pub fn shortest_walk(lat: &Lattice, a: (usize, usize), b: (usize, usize)) -> Vec<(usize, usize)> {
    let (dr, dc) = lat.offset(a, b);
    let mut walk = Vec::with_capacity(dr.unsigned_abs() + dc.unsigned_abs() + 1);
    let (mut r, mut c) = (a.0 as isize, a.1 as isize);
    let wrap = |r: isize, c: isize| {
        let l = lat.size() as isize;
        (r.rem_euclid(l) as usize, c.rem_euclid(l) as usize)
    };
    walk.push(wrap(r, c));
    for _ in 0..dc.unsigned_abs() {
        c += dc.signum();
        walk.push(wrap(r, c));
    }
    for _ in 0..dr.unsigned_abs() {
        r += dr.signum();
        walk.push(wrap(r, c));
    }
    walk
}
