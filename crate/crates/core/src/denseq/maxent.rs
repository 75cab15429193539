//! Maximum-entropy states with prescribed marginals and irreducible correlations.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{capability_err, input_err, Error, Result};
use crate::gf2::BitVec;
use crate::stabilizer::PauliOperator;

use super::{
    embed_local, hermitian_eigen, hermitian_function, min_eigenvalue, partial_trace_density, pauli_matrix, trace_norm,
    vn_entropy, CMatrix, DensityMatrix, LogBase, C64, EIG_CUTOFF,
};

/// Largest register the solver accepts (dimension 256).
pub const MAX_ENTROPY_QUBITS: usize = 8;

#[derive(Clone, Debug)]
pub struct MarginalConstraint {
    pub qubits: Vec<usize>,
    pub marginal: DensityMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxEntropyOptions {
    /// Trace-norm residual accepted on every constraint.
    pub tolerance: f64,
    pub damping: f64,
    pub max_iterations: usize,
}

impl Default for MaxEntropyOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, damping: 0.5, max_iterations: 10_000 }
    }
}

#[derive(Clone, Debug)]
pub struct MaxEntropySolution {
    pub state: DensityMatrix,
    pub residual: f64,
    pub iterations: usize,
    pub entropy_bits: f64,
    /// Result of the perturbation spot check; `None` when the solution sits
    /// on the boundary of the state space and no interior direction exists.
    pub locally_maximal: Option<bool>,
}

/// `log` restricted to the range of `proj`, zero on its complement.
fn support_log(m: &CMatrix, proj: &CMatrix) -> CMatrix {
    let dim = m.nrows();
    let shifted = proj * m * proj + (CMatrix::identity(dim, dim) - proj);
    proj * hermitian_function(&shifted, |l| libm::log(l.max(1e-300))) * proj
}

fn support_projector(m: &CMatrix) -> CMatrix {
    hermitian_function(m, |l| if l > EIG_CUTOFF { 1.0 } else { 0.0 })
}

fn residual(rho: &DensityMatrix, n: usize, constraints: &[MarginalConstraint]) -> Result<f64> {
    let mut worst = 0.0f64;
    for c in constraints {
        let r = partial_trace_density(rho, n, &c.qubits)?;
        worst = worst.max(trace_norm(&(r.matrix() - c.marginal.matrix())));
    }
    Ok(worst)
}

/// Gibbs state `Q exp(Q† H Q) Q† / Z` on the subspace spanned by `q`.
fn gibbs(h: &CMatrix, q: &CMatrix) -> DensityMatrix {
    let reduced = q.adjoint() * h * q;
    let top = hermitian_eigen(&reduced).0.last().copied().unwrap_or(0.0);
    let e = hermitian_function(&reduced, |l| libm::exp(l - top));
    let z = e.trace();
    DensityMatrix::from_matrix_unchecked(q * (e / z) * q.adjoint())
}

/// Maximum-entropy state on `n` qubits reproducing every marginal.
///
/// Runs damped iterative scaling on `exp(Σ_j h_j ⊗ I)` restricted to the
/// intersection of the constraint supports: each sweep sets
/// `h_j += damping · (log σ_j − log ρ_j)` constraint by constraint.
pub fn max_entropy_state(
    n: usize,
    constraints: &[MarginalConstraint],
    opts: &MaxEntropyOptions,
) -> Result<MaxEntropySolution> {
    if n > MAX_ENTROPY_QUBITS {
        return Err(capability_err!("max-entropy solver is limited to {MAX_ENTROPY_QUBITS} qubits"));
    }
    let dim = 1usize << n;
    for c in constraints {
        if c.marginal.dim() != 1 << c.qubits.len() {
            return Err(input_err!("marginal on {:?} has dimension {}", c.qubits, c.marginal.dim()));
        }
        if c.qubits.len() == n {
            let full = partial_trace_density(&c.marginal, n, &invert(&c.qubits))?;
            return finish(n, full, constraints, 0, opts);
        }
    }
    let local_proj: Vec<CMatrix> = constraints.iter().map(|c| support_projector(c.marginal.matrix())).collect();
    let mut outside = CMatrix::zeros(dim, dim);
    for (c, p) in constraints.iter().zip(&local_proj) {
        let comp = CMatrix::identity(p.nrows(), p.ncols()) - p;
        outside += embed_local(&comp, n, &c.qubits)?;
    }
    let (values, vectors) = hermitian_eigen(&outside);
    let keep: Vec<usize> = (0..dim).filter(|&i| values[i] < 1e-9).collect();
    if keep.is_empty() {
        return Err(input_err!("marginals have no common support"));
    }
    let q = CMatrix::from_fn(dim, keep.len(), |r, c| vectors[(r, keep[c])]);
    let targets: Vec<CMatrix> =
        constraints.iter().zip(&local_proj).map(|(c, p)| support_log(c.marginal.matrix(), p)).collect();
    let mut terms: Vec<CMatrix> = local_proj.iter().map(|p| CMatrix::zeros(p.nrows(), p.ncols())).collect();
    let mut h = CMatrix::zeros(dim, dim);
    let mut rho = gibbs(&h, &q);
    let mut iterations = 0;
    loop {
        let res = residual(&rho, n, constraints)?;
        if res <= opts.tolerance {
            return finish(n, rho, constraints, iterations, opts);
        }
        if iterations >= opts.max_iterations {
            return Err(Error::Convergence { iterations, residual: res });
        }
        iterations += 1;
        for (j, c) in constraints.iter().enumerate() {
            let current = partial_trace_density(&rho, n, &c.qubits)?;
            let step = (&targets[j] - support_log(current.matrix(), &local_proj[j])) * C64::from(opts.damping);
            terms[j] += &step;
            h += embed_local(&step, n, &c.qubits)?;
            rho = gibbs(&h, &q);
        }
    }
}

/// Positions such that reading `qubits` in order gives qubit 0, 1, ...
fn invert(qubits: &[usize]) -> Vec<usize> {
    let mut inv = alloc::vec![0; qubits.len()];
    for (pos, &q) in qubits.iter().enumerate() {
        inv[q] = pos;
    }
    inv
}

fn finish(
    n: usize,
    state: DensityMatrix,
    constraints: &[MarginalConstraint],
    iterations: usize,
    opts: &MaxEntropyOptions,
) -> Result<MaxEntropySolution> {
    let residual = residual(&state, n, constraints)?;
    let entropy_bits = vn_entropy(&state, LogBase::Bits);
    let locally_maximal = local_check(n, &state, constraints, opts);
    Ok(MaxEntropySolution { state, residual, iterations, entropy_bits, locally_maximal })
}

/// Perturbs along random Pauli directions invisible to every constraint
/// and checks that the entropy does not rise.
fn local_check(
    n: usize,
    state: &DensityMatrix,
    constraints: &[MarginalConstraint],
    opts: &MaxEntropyOptions,
) -> Option<bool> {
    let low = min_eigenvalue(state.matrix());
    if low <= 1e-9 || n == 0 {
        return None;
    }
    let covered = |mask: usize| constraints.iter().any(|c| c.qubits.iter().fold(mask, |m, &q| m & !(1 << q)) == 0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let base = vn_entropy(state, LogBase::Nats);
    let mut tested = false;
    for _ in 0..8 {
        let (x, z): (usize, usize) = (rng.random_range(0..1 << n), rng.random_range(0..1 << n));
        if x | z == 0 || covered(x | z) {
            continue;
        }
        let p = PauliOperator::from_parts(
            BitVec::from_indices(n, (0..n).filter(|q| x >> q & 1 == 1)),
            BitVec::from_indices(n, (0..n).filter(|q| z >> q & 1 == 1)),
            0,
        )
        .hermitian_class();
        let dir = pauli_matrix(&p).ok()?;
        let eps = 0.5 * low;
        for sign in [1.0, -1.0] {
            let moved = DensityMatrix::from_matrix_unchecked(state.matrix() + &dir * C64::from(sign * eps));
            if vn_entropy(&moved, LogBase::Nats) > base + opts.tolerance.max(1e-12) {
                return Some(false);
            }
        }
        tested = true;
    }
    tested.then_some(true)
}

/// Every `l`-qubit marginal of `rho`.
pub fn marginals(rho: &DensityMatrix, n: usize, l: usize) -> Result<Vec<MarginalConstraint>> {
    let mut out = Vec::new();
    for mask in 0usize..1 << n {
        if mask.count_ones() as usize != l {
            continue;
        }
        let qubits: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        let marginal = partial_trace_density(rho, n, &qubits)?;
        out.push(MarginalConstraint { qubits, marginal });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxEntropyReport {
    pub k: usize,
    pub n_qubits: usize,
    /// `S(ρ̃⁽ˡ⁾)` in bits for `l = 0..=k`.
    pub entropies_bits: Vec<f64>,
    pub input_entropy_bits: f64,
    pub residual: f64,
    pub iterations: usize,
    /// `S(ρ̃⁽ᵏ⁻¹⁾) − S(ρ̃⁽ᵏ⁾)`, non-negative.
    pub correlation_bits: f64,
    pub locally_maximal: Option<bool>,
    #[serde(skip)]
    pub solution: Option<DensityMatrix>,
}

/// Correlation carried by the `k`-qubit marginals beyond the `(k−1)`-qubit ones.
pub fn irreducible_correlation(
    rho: &DensityMatrix,
    n: usize,
    k: usize,
    opts: &MaxEntropyOptions,
) -> Result<MaxEntropyReport> {
    if k == 0 || k > n {
        return Err(input_err!("marginal order k = {k} must lie in 1..={n}"));
    }
    if rho.dim() != 1 << n {
        return Err(input_err!("state of dimension {} is not an {n}-qubit state", rho.dim()));
    }
    let mut entropies = Vec::with_capacity(k + 1);
    let (mut residual, mut iterations, mut locally_maximal, mut solution) = (0.0f64, 0, None, None);
    for l in 0..=k {
        let sol = max_entropy_state(n, &marginals(rho, n, l)?, opts)?;
        entropies.push(sol.entropy_bits);
        residual = residual.max(sol.residual);
        iterations += sol.iterations;
        if l == k {
            locally_maximal = sol.locally_maximal;
            solution = Some(sol.state);
        }
    }
    Ok(MaxEntropyReport {
        k,
        n_qubits: n,
        correlation_bits: entropies[k - 1] - entropies[k],
        entropies_bits: entropies,
        input_entropy_bits: vn_entropy(rho, LogBase::Bits),
        residual,
        iterations,
        locally_maximal,
        solution,
    })
}
