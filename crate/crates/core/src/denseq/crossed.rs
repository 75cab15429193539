//! Z2 x Z2 crossed product in its 4 x 4 block representation.
//!
//! The inner algebra is `N = M_2 ⊗ I_k` on `H = C^2 ⊗ C^k`. The group acts
//! through `V_g = u_g ⊗ u_g ⊗ I_{k/2}` with `u ∈ {I, X, Z, XZ}`, which
//! implements `Ad(u_g)` on `N` while lying outside it, so `M = N ∨ {V_g}`
//! is `M_2 ⊗ M_2 ⊗ I_{k/2}` and every element is uniquely `Σ_g A_g V_g`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{input_err, Result};

use super::{hermitian_eigenvalues, hermitian_function, max_abs, min_eigenvalue, CMatrix, C64, EIG_CUTOFF};

const D: usize = 2;

/// `Σ_g A_g V_g`, with group elements indexed `e, X, Z, Y` so that the
/// product is XOR of indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedElement {
    pub coeffs: [CMatrix; 4],
}

impl CrossedElement {
    pub fn zero() -> Self {
        Self { coeffs: core::array::from_fn(|_| CMatrix::zeros(D, D)) }
    }

    /// `A · V_e`.
    pub fn inner(a: CMatrix) -> Self {
        let mut x = Self::zero();
        x.coeffs[0] = a;
        x
    }

    /// `V_g`.
    pub fn group(g: usize) -> Self {
        let mut x = Self::zero();
        x.coeffs[g] = CMatrix::identity(D, D);
        x
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { coeffs: core::array::from_fn(|g| &self.coeffs[g] + &other.coeffs[g]) }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { coeffs: core::array::from_fn(|g| &self.coeffs[g] * s) }
    }
}

#[derive(Clone, Debug)]
pub struct CrossedProductModel {
    k: usize,
    /// `u_g` on the system factor.
    u: [CMatrix; 4],
    /// `V_g` on `C^2 ⊗ C^k`.
    v: [CMatrix; 4],
    /// `ψ ↦ (ψ, 0, 0, 0)`.
    iso: CMatrix,
    p0: CMatrix,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn paulis() -> [CMatrix; 4] {
    let i = CMatrix::identity(2, 2);
    let x = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
    let z = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let xz = &x * &z;
    [i, x, z, xz]
}

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Builds the model for system dimension `d` and multiplicity `k`.
pub fn build_crossed_product(d: usize, k: usize) -> Result<CrossedProductModel> {
    if d != D {
        return Err(input_err!("only d = 2 is supported, got {d}"));
    }
    if k == 0 || k % 2 == 1 || 4 * d * k > 64 {
        return Err(input_err!("multiplicity must be even with 4*d*k <= 64, got k = {k}"));
    }
    let u = paulis();
    let rest = CMatrix::identity(k / 2, k / 2);
    let v: [CMatrix; 4] = core::array::from_fn(|g| u[g].kronecker(&u[g]).kronecker(&rest));
    let dim = D * k;
    let mut iso = CMatrix::zeros(4 * dim, dim);
    iso.view_mut((0, 0), (dim, dim)).fill_with_identity();
    let mut m = CrossedProductModel { k, u, v, iso, p0: CMatrix::zeros(0, 0) };
    let avg = (0..4).fold(CrossedElement::zero(), |acc, g| acc.add(&CrossedElement::group(g))).scale(c(0.25));
    m.p0 = m.pi(&avg);
    Ok(m)
}

impl CrossedProductModel {
    pub fn d(&self) -> usize {
        D
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Dimension `4dk` of the represented space.
    pub fn represented_dim(&self) -> usize {
        4 * D * self.k
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.iso
    }

    pub fn p0(&self) -> &CMatrix {
        &self.p0
    }

    /// The group element `¼ Σ_g V_g` whose image is `P₀`.
    pub fn p0_element(&self) -> CrossedElement {
        (0..4).fold(CrossedElement::zero(), |acc, g| acc.add(&CrossedElement::group(g))).scale(c(0.25))
    }

    /// `α_g(A) = u_g A u_g†`.
    pub fn alpha(&self, g: usize, a: &CMatrix) -> CMatrix {
        &self.u[g] * a * self.u[g].adjoint()
    }

    pub fn mul(&self, x: &CrossedElement, y: &CrossedElement) -> CrossedElement {
        let mut out = CrossedElement::zero();
        for g in 0..4 {
            for h in 0..4 {
                out.coeffs[g ^ h] += &x.coeffs[g] * self.alpha(g, &y.coeffs[h]);
            }
        }
        out
    }

    pub fn adjoint(&self, x: &CrossedElement) -> CrossedElement {
        CrossedElement { coeffs: core::array::from_fn(|g| self.alpha(g, &x.coeffs[g].adjoint())) }
    }

    /// `E(Σ A_g V_g) = A_e`.
    pub fn expectation(&self, x: &CrossedElement) -> CrossedElement {
        CrossedElement::inner(x.coeffs[0].clone())
    }

    fn lift(&self, a: &CMatrix) -> CMatrix {
        a.kronecker(&CMatrix::identity(self.k, self.k))
    }

    /// The element as an operator on `C^2 ⊗ C^k`.
    pub fn operator(&self, x: &CrossedElement) -> CMatrix {
        (0..4).fold(CMatrix::zeros(D * self.k, D * self.k), |acc, g| acc + self.lift(&x.coeffs[g]) * &self.v[g])
    }

    /// Recovers `A_g` from an operator in `M`; input error if it is not in `M`.
    pub fn decompose(&self, op: &CMatrix) -> Result<CrossedElement> {
        let dim = D * self.k;
        if op.shape() != (dim, dim) {
            return Err(input_err!("operator must be {dim}x{dim}"));
        }
        let half = self.k / 2;
        let mut x = CrossedElement::zero();
        for g in 0..4 {
            // B_g = (1/k) Tr_mult[op (I ⊗ u_g† ⊗ I)], A_g = B_g u_g†
            let probe =
                CMatrix::identity(D, D).kronecker(&self.u[g].adjoint()).kronecker(&CMatrix::identity(half, half));
            let prod = op * probe;
            let b =
                CMatrix::from_fn(D, D, |s, t| (0..self.k).map(|m| prod[(s * self.k + m, t * self.k + m)]).sum::<C64>())
                    / c(self.k as f64);
            x.coeffs[g] = b * self.u[g].adjoint();
        }
        let err = max_abs(&(self.operator(&x) - op));
        if err > 1e-9 {
            return Err(input_err!("operator is not in the crossed product (residual {err:e})"));
        }
        Ok(x)
    }

    /// The 4 x 4 block matrix: block `(g, f)` is `α_g(A_{fg}) ⊗ I_k`.
    pub fn pi(&self, x: &CrossedElement) -> CMatrix {
        let b = D * self.k;
        let mut out = CMatrix::zeros(4 * b, 4 * b);
        for g in 0..4 {
            for f in 0..4 {
                let block = self.lift(&self.alpha(g, &x.coeffs[f ^ g]));
                out.view_mut((g * b, f * b), (b, b)).copy_from(&block);
            }
        }
        out
    }

    /// `R(N) = diag(N, N, N, N)`.
    pub fn correction(&self, n: &CMatrix) -> CMatrix {
        CMatrix::identity(4, 4).kronecker(n)
    }

    /// `E₁(A) = ¼ Σ_g π(V_g) A π(V_g)†`.
    pub fn twirl(&self, a: &CMatrix) -> CMatrix {
        (0..4).fold(CMatrix::zeros(a.nrows(), a.ncols()), |acc, g| {
            let w = self.pi(&CrossedElement::group(g));
            acc + &w * a * w.adjoint()
        }) / c(4.0)
    }

    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> CrossedElement {
        CrossedElement { coeffs: core::array::from_fn(|_| random_matrix(D, D, rng)) }
    }

    /// `Y Y†` for random `Y`, normalised to unit operator norm.
    pub fn random_positive(&self, rng: &mut ChaCha8Rng) -> CrossedElement {
        let y = self.random_element(rng);
        let p = self.mul(&y, &self.adjoint(&y));
        let top = hermitian_eigenvalues(&self.operator(&p)).last().copied().unwrap_or(1.0);
        p.scale(c(1.0 / top))
    }

    /// `Tr(π(x))/(4dk)`.
    pub fn tau(&self, x: &CrossedElement) -> f64 {
        x.coeffs[0].trace().re / D as f64
    }

    /// `-τ(ρ ln ρ)` in nats.
    pub fn tau_entropy(&self, rho: &CrossedElement) -> f64 {
        let dim = self.represented_dim() as f64;
        -hermitian_eigenvalues(&self.pi(rho))
            .iter()
            .filter(|&&l| l > EIG_CUTOFF)
            .map(|&l| l * libm::log(l))
            .sum::<f64>()
            / dim
    }

    /// The four Bell projections of `M ≅ M_2 ⊗ M_2`, where `E` is the
    /// identity tensored with the normalised trace.
    pub fn bell_povm(&self) -> Vec<CrossedElement> {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let vecs: [[f64; 4]; 4] = [[h, 0.0, 0.0, h], [h, 0.0, 0.0, -h], [0.0, h, h, 0.0], [0.0, h, -h, 0.0]];
        let rest = CMatrix::identity(self.k / 2, self.k / 2);
        vecs.iter()
            .map(|v| {
                let col = CMatrix::from_fn(4, 1, |r, _| c(v[r]));
                let proj = (&col * col.adjoint()).kronecker(&rest);
                self.decompose(&proj).expect("Bell projections lie in M")
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalExpectationReport {
    pub samples: usize,
    pub isometry_error: f64,
    pub homomorphism_error: f64,
    pub adjoint_error: f64,
    pub unital_error: f64,
    pub idempotent_error: f64,
    pub bimodule_error: f64,
    pub choi_min_eigenvalue: f64,
    pub projection_error: f64,
    pub twirl_error: f64,
    pub vg_kills: f64,
}

impl ConditionalExpectationReport {
    pub fn ok(&self) -> bool {
        let tol = 1e-10;
        [
            self.isometry_error,
            self.homomorphism_error,
            self.adjoint_error,
            self.unital_error,
            self.idempotent_error,
            self.bimodule_error,
            self.projection_error,
            self.twirl_error,
            self.vg_kills,
        ]
        .iter()
        .all(|&e| e <= tol)
            && self.choi_min_eigenvalue >= -tol
    }
}

/// Checks that `E` is a unital, idempotent, completely positive bimodule map
/// and that `π` is a *-representation.
pub fn conditional_expectation_check(
    m: &CrossedProductModel,
    samples: usize,
    seed: u64,
) -> ConditionalExpectationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let isometry_error = max_abs(&(m.iso.adjoint() * &m.iso - CMatrix::identity(D * m.k, D * m.k)));
    let one = CrossedElement::inner(CMatrix::identity(D, D));
    let unital_error = max_abs(&(m.expectation(&one).coeffs[0].clone() - CMatrix::identity(D, D)));
    let vg_kills = (1..4).map(|g| max_abs(&m.expectation(&CrossedElement::group(g)).coeffs[0])).fold(0.0, f64::max);
    let (mut hom, mut adj, mut idem, mut bimod, mut twirl) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let x = m.random_element(&mut rng);
        let y = m.random_element(&mut rng);
        let xy = m.mul(&x, &y);
        hom = hom.max(max_abs(&(m.pi(&xy) - m.pi(&x) * m.pi(&y))));
        hom = hom.max(max_abs(&(m.operator(&xy) - m.operator(&x) * m.operator(&y))));
        adj = adj.max(max_abs(&(m.pi(&m.adjoint(&x)) - m.pi(&x).adjoint())));
        let ex = m.expectation(&x);
        idem = idem.max(max_abs(&(m.expectation(&ex).coeffs[0].clone() - &ex.coeffs[0])));
        let a = CrossedElement::inner(random_matrix(D, D, &mut rng));
        let b = CrossedElement::inner(random_matrix(D, D, &mut rng));
        let lhs = m.expectation(&m.mul(&m.mul(&a, &x), &b));
        let rhs = m.mul(&m.mul(&a, &ex), &b);
        bimod = bimod.max(max_abs(&(lhs.coeffs[0].clone() - &rhs.coeffs[0])));
        let px = m.pi(&x);
        twirl = twirl.max(max_abs(&(m.twirl(&px) * &m.p0 - &m.p0 * &px * &m.p0)));
    }
    // Choi matrix over the matrix units of M ≅ M_4
    let rest = CMatrix::identity(m.k / 2, m.k / 2);
    let mut choi = CMatrix::zeros(4 * D, 4 * D);
    for i in 0..4 {
        for j in 0..4 {
            let mut unit = CMatrix::zeros(4, 4);
            unit[(i, j)] = c(1.0);
            let e = m.decompose(&unit.kronecker(&rest)).expect("matrix units lie in M");
            choi.view_mut((i * D, j * D), (D, D)).copy_from(&m.expectation(&e).coeffs[0]);
        }
    }
    let projection_error = max_abs(&(&m.p0 * &m.p0 - &m.p0)).max(max_abs(&(&m.p0 - m.p0.adjoint())));
    ConditionalExpectationReport {
        samples,
        isometry_error,
        homomorphism_error: hom,
        adjoint_error: adj,
        unital_error,
        idempotent_error: idem,
        bimodule_error: bimod,
        choi_min_eigenvalue: min_eigenvalue(&choi),
        projection_error,
        twirl_error: twirl,
        vg_kills,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PimsnerPopaReport {
    pub lambda: f64,
    pub index: f64,
    pub samples: usize,
    /// Smallest eigenvalue of `E(X) − λX` over the random positive samples.
    pub sample_min_eigenvalue: f64,
    pub identity_min_eigenvalue: f64,
    /// `max |E(P₀) − I/4|`.
    pub witness_error: f64,
    pub witness_min_eigenvalue: f64,
}

impl PimsnerPopaReport {
    pub fn ok(&self) -> bool {
        self.sample_min_eigenvalue >= -1e-9 && self.witness_error <= 1e-12 && self.witness_min_eigenvalue.abs() <= 1e-12
    }
}

/// Tests `E(X) ≥ X/4` on random positive `X`; `X = P₀` shows 1/4 is optimal.
pub fn pimsner_popa_check(m: &CrossedProductModel, samples: usize, seed: u64) -> PimsnerPopaReport {
    let lambda = 0.25;
    let gap = |x: &CrossedElement| min_eigenvalue(&(m.operator(&m.expectation(x)) - m.operator(x) * c(lambda)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample_min = (0..samples).map(|_| gap(&m.random_positive(&mut rng))).fold(f64::INFINITY, f64::min);
    let p = m.p0_element();
    let witness_error = max_abs(&(m.expectation(&p).coeffs[0].clone() - CMatrix::identity(D, D) * c(0.25)));
    PimsnerPopaReport {
        lambda,
        index: 1.0 / lambda,
        samples,
        sample_min_eigenvalue: sample_min,
        identity_min_eigenvalue: gap(&CrossedElement::inner(CMatrix::identity(D, D))),
        witness_error,
        witness_min_eigenvalue: gap(&p),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StinespringReport {
    pub samples: usize,
    pub isometry_error: f64,
    /// `max |E(X) − V†π(X)V|`.
    pub dilation_error: f64,
    /// `max |[R(N), π(X)]|` for `N` in `I ⊗ M_k`.
    pub commutant_error: f64,
    /// `max |V†R(N)V − N|`.
    pub correction_error: f64,
    pub span_rank: usize,
    pub represented_dim: usize,
}

impl StinespringReport {
    pub fn ok(&self) -> bool {
        self.isometry_error <= 1e-12
            && self.dilation_error <= 1e-12
            && self.commutant_error <= 1e-12
            && self.correction_error <= 1e-12
            && self.span_rank == self.represented_dim
    }
}

pub fn stinespring_verify(m: &CrossedProductModel, samples: usize, seed: u64) -> StinespringReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = D * m.k;
    let isometry_error = max_abs(&(m.iso.adjoint() * &m.iso - CMatrix::identity(dim, dim)));
    let (mut dil, mut comm, mut corr) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let x = m.random_element(&mut rng);
        let px = m.pi(&x);
        dil = dil.max(max_abs(&(m.operator(&m.expectation(&x)) - m.iso.adjoint() * &px * &m.iso)));
        let n = CMatrix::identity(D, D).kronecker(&random_matrix(m.k, m.k, &mut rng));
        let r = m.correction(&n);
        comm = comm.max(max_abs(&(&r * &px - &px * &r)));
        corr = corr.max(max_abs(&(m.iso.adjoint() * &r * &m.iso - &n)));
    }
    // span of π(e_ij V_g) V ψ over matrix units and basis vectors
    let mut cols = Vec::new();
    for g in 0..4 {
        for i in 0..D {
            for j in 0..D {
                let mut x = CrossedElement::zero();
                x.coeffs[g][(i, j)] = c(1.0);
                cols.push(m.pi(&x) * &m.iso);
            }
        }
    }
    let total: usize = cols.iter().map(|b| b.ncols()).sum();
    let mut span = CMatrix::zeros(4 * dim, total);
    let mut at = 0;
    for b in &cols {
        span.view_mut((0, at), (4 * dim, b.ncols())).copy_from(b);
        at += b.ncols();
    }
    let span_rank = hermitian_eigenvalues(&(&span * span.adjoint())).iter().filter(|&&l| l > 1e-9).count();
    StinespringReport {
        samples,
        isometry_error,
        dilation_error: dil,
        commutant_error: comm,
        correction_error: corr,
        span_rank,
        represented_dim: 4 * dim,
    }
}

/// `Σ_i τ(x_i) [S_τ(E(ρ_i)) − S_τ(ρ_i)]` with `ρ_i = x_i / τ(x_i)`, in nats.
pub fn entropy_gain(m: &CrossedProductModel, povm: &[CrossedElement]) -> Result<f64> {
    let total = povm.iter().fold(CrossedElement::zero(), |acc, x| acc.add(x));
    let err = max_abs(&(m.operator(&total) - CMatrix::identity(D * m.k, D * m.k)));
    if err > 1e-9 {
        return Err(input_err!("POVM elements sum to the identity only up to {err:e}"));
    }
    let mut value = 0.0;
    for x in povm {
        if min_eigenvalue(&m.operator(x)) < -1e-9 {
            return Err(input_err!("POVM element is not positive"));
        }
        let t = m.tau(x);
        if t <= EIG_CUTOFF {
            continue;
        }
        let rho = x.scale(c(1.0 / t));
        value += t * (m.tau_entropy(&m.expectation(&rho)) - m.tau_entropy(&rho));
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyGainReport {
    pub evaluations: usize,
    pub best_nats: f64,
    pub bound_nats: f64,
    pub max_excess: f64,
    pub bell_povm_nats: f64,
}

impl EntropyGainReport {
    pub fn within_bound(&self) -> bool {
        self.max_excess <= 1e-9
    }
}

/// Normalises positive elements into a POVM: `x_i ↦ S^{-1/2} x_i S^{-1/2}`.
fn normalise_povm(m: &CrossedProductModel, parts: &[CrossedElement]) -> Vec<CrossedElement> {
    let total = parts.iter().fold(CrossedElement::zero(), |acc, x| acc.add(x));
    let root = hermitian_function(&m.operator(&total), |l| 1.0 / libm::sqrt(l.max(1e-300)));
    let root = m.decompose(&root).expect("functional calculus stays in M");
    parts.iter().map(|x| m.mul(&m.mul(&root, x), &root)).collect()
}

/// Random POVMs followed by a seeded local ascent; every evaluation is
/// compared with `ln 4`.
pub fn entropy_gain_search(
    m: &CrossedProductModel,
    restarts: usize,
    ascent_steps: usize,
    seed: u64,
) -> EntropyGainReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = libm::log(4.0);
    let mut evaluations = 0;
    let mut best = f64::NEG_INFINITY;
    let mut max_excess = f64::NEG_INFINITY;
    let mut record = |v: f64, best: &mut f64| {
        evaluations += 1;
        *best = best.max(v);
        max_excess = max_excess.max(v - bound);
    };
    for r in 0..restarts {
        let outcomes = 2 + r % 5;
        let mut gens: Vec<CrossedElement> = (0..outcomes).map(|_| m.random_element(&mut rng)).collect();
        let score = |gens: &[CrossedElement]| {
            let parts: Vec<CrossedElement> = gens.iter().map(|y| m.mul(y, &m.adjoint(y))).collect();
            entropy_gain(m, &normalise_povm(m, &parts)).expect("normalised POVM")
        };
        let mut current = score(&gens);
        record(current, &mut best);
        let mut step = 0.3;
        for _ in 0..ascent_steps {
            let trial: Vec<CrossedElement> =
                gens.iter().map(|y| y.add(&m.random_element(&mut rng).scale(c(step)))).collect();
            let v = score(&trial);
            record(v, &mut best);
            if v > current {
                current = v;
                gens = trial;
            } else {
                step *= 0.95;
            }
        }
    }
    let bell = entropy_gain(m, &m.bell_povm()).expect("Bell projections form a POVM");
    record(bell, &mut best);
    EntropyGainReport { evaluations, best_nats: best, bound_nats: bound, max_excess, bell_povm_nats: bell }
}
