use alloc::vec;
use alloc::vec::Vec;

use crate::error::{capability_err, input_err, Result};
use crate::gf2::{self, BitMatrix, BitVec};
use crate::lattice::Lattice;
use crate::stabilizer::{toric_ground_state, PauliOperator, StabilizerState};

use nalgebra::ComplexField;

use super::{
    hermitian_eigen, hermitian_eigenvalues, spectrum_entropy, unit_phase, CMatrix, DensityMatrix, LogBase, C64,
    EIG_CUTOFF, MAX_DENSE_QUBITS,
};

/// Amplitudes over the computational basis; qubit `q` is bit `q` of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

fn check_width(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(capability_err!("{n} qubits exceed the dense limit of {MAX_DENSE_QUBITS}"));
    }
    Ok(())
}

fn mask_of(v: &BitVec) -> usize {
    v.iter_ones().fold(0usize, |m, q| m | (1 << q))
}

fn i_power(k: u8) -> C64 {
    [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][(k % 4) as usize]
}

fn parity(x: usize) -> bool {
    x.count_ones() % 2 == 1
}

/// Gathers the bits of `b` at `positions` into a compact index.
fn gather(b: usize, positions: &[usize]) -> usize {
    positions.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((b >> q) & 1) << j))
}

fn check_qubits(n: usize, keep: &[usize]) -> Result<()> {
    let mut seen = 0usize;
    for &q in keep {
        if q >= n {
            return Err(input_err!("qubit {q} outside an {n}-qubit system"));
        }
        if seen >> q & 1 == 1 {
            return Err(input_err!("qubit {q} listed twice"));
        }
        seen |= 1 << q;
    }
    Ok(())
}

fn complement(n: usize, keep: &[usize]) -> Vec<usize> {
    (0..n).filter(|q| !keep.contains(q)).collect()
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_width(n)?;
        if index >> n != 0 {
            return Err(input_err!("basis index {index} needs more than {n} qubits"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        check_width(n)?;
        if amps.len() != 1 << n {
            return Err(input_err!("expected {} amplitudes, got {}", 1usize << n, amps.len()));
        }
        Ok(Self { n, amps })
    }

    /// The unique state fixed by every generator.
    ///
    /// Starts from a basis state consistent with the diagonal part of the
    /// group, so the product of projectors `(I + g)/2` cannot vanish.
    pub fn from_stabilizer(state: &StabilizerState) -> Result<Self> {
        let n = state.n_qubits();
        check_width(n)?;
        let gens = state.generators();
        let xs = BitMatrix::from_rows(n, gens.iter().map(|g| g.x().clone()).collect())?;
        let diagonal: Vec<PauliOperator> =
            gf2::nullspace(&xs.transpose()).iter().map(|c| state.element(c.iter_ones())).collect();
        let mut zrows = Vec::with_capacity(diagonal.len());
        let mut rhs = BitVec::zeros(diagonal.len());
        for (i, d) in diagonal.iter().enumerate() {
            zrows.push(d.z().clone());
            rhs.set(i, d.phase() == 2);
        }
        let start = match diagonal.len() {
            0 => BitVec::zeros(n),
            _ => gf2::solve(&BitMatrix::from_rows(n, zrows)?, &rhs)?
                .ok_or_else(|| input_err!("stabilizer group contains -I"))?,
        };
        let b0 = mask_of(&start);
        let mut psi = Self::basis(n, b0)?;
        for g in gens {
            let gp = psi.apply_pauli(g);
            psi.amps.iter_mut().zip(&gp.amps).for_each(|(a, b)| *a = (*a + b) * 0.5);
        }
        let norm = psi.norm();
        if norm < 1e-6 {
            return Err(input_err!("generators do not fix a common state"));
        }
        let fix = psi.amps[b0].conj() / (psi.amps[b0].modulus() * norm);
        psi.amps.iter_mut().for_each(|a| *a *= fix);
        Ok(psi)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amps.iter().map(|a| a.norm_sqr()).sum())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply_pauli(&self, p: &PauliOperator) -> StateVector {
        assert_eq!(p.n_qubits(), self.n, "Pauli width differs from register");
        let (xm, zm) = (mask_of(p.x()), mask_of(p.z()));
        let ph = i_power(p.phase());
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            out[b ^ xm] = if parity(zm & b) { -ph * a } else { ph * a };
        }
        StateVector { n: self.n, amps: out }
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &PauliOperator) -> C64 {
        self.matrix_element(p, self)
    }

    /// `⟨self|P|other⟩`.
    pub fn matrix_element(&self, p: &PauliOperator, other: &StateVector) -> C64 {
        let (xm, zm) = (mask_of(p.x()), mask_of(p.z()));
        let sum: C64 = other
            .amps
            .iter()
            .enumerate()
            .map(|(b, a)| {
                let t = self.amps[b ^ xm].conj() * a;
                if parity(zm & b) {
                    -t
                } else {
                    t
                }
            })
            .sum();
        sum * i_power(p.phase())
    }

    /// `(self + e^{iφ} other)` normalised.
    pub fn superpose(&self, other: &StateVector, phi: f64) -> StateVector {
        let w = unit_phase(phi);
        let mut amps: Vec<C64> = self.amps.iter().zip(&other.amps).map(|(a, b)| a + w * b).collect();
        let norm = libm::sqrt(amps.iter().map(|a| a.norm_sqr()).sum());
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector { n: self.n, amps }
    }

    /// Amplitudes reshaped with kept qubits as rows and the rest as columns.
    fn split(&self, keep: &[usize]) -> CMatrix {
        let rest = complement(self.n, keep);
        let mut m = CMatrix::zeros(1 << keep.len(), 1 << rest.len());
        for (b, a) in self.amps.iter().enumerate() {
            m[(gather(b, keep), gather(b, &rest))] = *a;
        }
        m
    }
}

pub fn statevector_ground(lat: &Lattice) -> Result<StateVector> {
    check_width(lat.num_qubits())?;
    StateVector::from_stabilizer(&toric_ground_state(lat))
}

/// Reduced state on `keep`, in the order given. Limited to 12 kept qubits.
pub fn partial_trace(psi: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    check_qubits(psi.n, keep)?;
    if keep.len() > 12 {
        return Err(capability_err!("explicit reduced states are limited to 12 qubits"));
    }
    let m = psi.split(keep);
    Ok(DensityMatrix::from_matrix_unchecked(&m * m.adjoint()))
}

/// Reduced state of a density matrix on `n` qubits.
pub fn partial_trace_density(rho: &DensityMatrix, n: usize, keep: &[usize]) -> Result<DensityMatrix> {
    check_qubits(n, keep)?;
    if rho.dim() != 1 << n {
        return Err(input_err!("density matrix of dimension {} is not an {n}-qubit state", rho.dim()));
    }
    let rest = complement(n, keep);
    let k = 1 << keep.len();
    let mut out = CMatrix::zeros(k, k);
    let m = rho.matrix();
    for r in 0..rho.dim() {
        let (rk, re) = (gather(r, keep), gather(r, &rest));
        for c in 0..rho.dim() {
            if gather(c, &rest) == re {
                out[(rk, gather(c, keep))] += m[(r, c)];
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// `h ⊗ I` with `h` acting on `keep`.
pub fn embed_local(h: &CMatrix, n: usize, keep: &[usize]) -> Result<CMatrix> {
    check_qubits(n, keep)?;
    if h.nrows() != 1 << keep.len() {
        return Err(input_err!("local operator does not match {} qubits", keep.len()));
    }
    let rest = complement(n, keep);
    let d = 1 << n;
    let mut out = CMatrix::zeros(d, d);
    for r in 0..d {
        let (rk, re) = (gather(r, keep), gather(r, &rest));
        for c in 0..d {
            if gather(c, &rest) == re {
                out[(r, c)] = h[(rk, gather(c, keep))];
            }
        }
    }
    Ok(out)
}

/// Dense matrix of a Pauli operator; up to 10 qubits.
pub fn pauli_matrix(p: &PauliOperator) -> Result<CMatrix> {
    let n = p.n_qubits();
    if n > 10 {
        return Err(capability_err!("dense Pauli matrices are limited to 10 qubits"));
    }
    let (xm, zm) = (mask_of(p.x()), mask_of(p.z()));
    let ph = i_power(p.phase());
    let mut m = CMatrix::zeros(1 << n, 1 << n);
    for b in 0..1usize << n {
        m[(b ^ xm, b)] = if parity(zm & b) { -ph } else { ph };
    }
    Ok(m)
}

/// Non-zero spectrum of the reduced state on `keep`, from whichever Gram
/// matrix is smaller.
pub fn reduced_spectrum(psi: &StateVector, keep: &[usize]) -> Result<Vec<f64>> {
    check_qubits(psi.n, keep)?;
    let m = psi.split(keep);
    let gram = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
    if gram.nrows() > 4096 {
        return Err(capability_err!("reduced state too large for the dense backend"));
    }
    Ok(hermitian_eigenvalues(&gram))
}

pub fn region_entropy_dense(psi: &StateVector, keep: &[usize], base: LogBase) -> Result<f64> {
    Ok(spectrum_entropy(&reduced_spectrum(psi, keep)?, base))
}

/// Reduced states of several pure states on `keep`, expressed in an
/// orthonormal basis of their joint support. Entropies, fidelities and trace
/// distances are unchanged by the compression.
pub fn reduced_ensemble(states: &[StateVector], keep: &[usize]) -> Result<Vec<DensityMatrix>> {
    let Some(first) = states.first() else {
        return Ok(Vec::new());
    };
    check_qubits(first.n, keep)?;
    let blocks: Vec<CMatrix> = states.iter().map(|s| s.split(keep)).collect();
    let rows = blocks[0].nrows();
    if rows <= 256 {
        return Ok(blocks.iter().map(|m| DensityMatrix::from_matrix_unchecked(m * m.adjoint())).collect());
    }
    let cols: usize = blocks.iter().map(|m| m.ncols()).sum();
    if cols > 2048 {
        return Err(capability_err!("joint support of {} states on {} qubits is too large", states.len(), keep.len()));
    }
    let mut stacked = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for m in &blocks {
        stacked.view_mut((0, at), (rows, m.ncols())).copy_from(m);
        at += m.ncols();
    }
    let (values, vectors) = hermitian_eigen(&(stacked.adjoint() * &stacked));
    let kept: Vec<usize> = (0..values.len()).filter(|&i| values[i] > EIG_CUTOFF).collect();
    let mut basis = CMatrix::zeros(rows, kept.len());
    for (j, &i) in kept.iter().enumerate() {
        let col = &stacked * vectors.column(i) / C64::from(libm::sqrt(values[i]));
        basis.set_column(j, &col);
    }
    Ok(blocks
        .iter()
        .map(|m| {
            let c = basis.adjoint() * m;
            DensityMatrix::from_matrix_unchecked(&c * c.adjoint())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denseq::{trace_distance, vn_entropy};
    use crate::entropy::region_entropy;
    use crate::lattice::Region;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliOperator {
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for q in 0..n {
            x.set(q, rng.random());
            z.set(q, rng.random());
        }
        PauliOperator::from_parts(x, z, 0).hermitian_class()
    }

    #[test]
    fn torus_two_ground_state() {
        let lat = Lattice::torus(2).unwrap();
        let psi = statevector_ground(&lat).unwrap();
        assert_eq!(psi.amplitudes().len(), 256);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        for g in toric_ground_state(&lat).generators() {
            let gp = psi.apply_pauli(g);
            let err = gp.amplitudes().iter().zip(psi.amplitudes()).map(|(a, b)| (a - b).modulus()).fold(0.0, f64::max);
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn torus_three_matches_stabilizer_expectations() {
        let lat = Lattice::torus(3).unwrap();
        let st = toric_ground_state(&lat);
        let psi = StateVector::from_stabilizer(&st).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut nontrivial = 0;
        for i in 0..100 {
            // half the samples drawn from the group itself so that ±1 values occur
            let p = if i % 2 == 0 {
                random_pauli(18, &mut rng)
            } else {
                let idx: Vec<usize> = (0..18).filter(|_| rng.random()).collect();
                let e = st.element(idx);
                if rng.random() {
                    e.negated()
                } else {
                    e
                }
            };
            let exact = f64::from(st.expectation(&p).unwrap());
            nontrivial += usize::from(exact != 0.0);
            assert!((psi.expectation(&p) - C64::from(exact)).modulus() < 1e-9);
        }
        assert!(nontrivial >= 40);
    }

    #[test]
    fn product_state_is_basis_state() {
        let st = StabilizerState::all_zero(4);
        let psi = StateVector::from_stabilizer(&st).unwrap();
        assert_eq!(psi, StateVector::basis(4, 0).unwrap());
        let flipped = st.conjugated_by(&PauliOperator::x_on(4, [1, 3]));
        assert_eq!(StateVector::from_stabilizer(&flipped).unwrap(), StateVector::basis(4, 0b1010).unwrap());
    }

    #[test]
    fn partial_traces() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let zero = C64::new(0.0, 0.0);
        let bell = StateVector::from_amplitudes(2, vec![C64::from(h), zero, zero, C64::from(h)]).unwrap();
        let r = partial_trace(&bell, &[0]).unwrap();
        assert!(trace_distance(&r, &DensityMatrix::maximally_mixed(2)) < 1e-12);
        let full = partial_trace(&bell, &[0, 1]).unwrap();
        assert!(trace_distance(&full, &DensityMatrix::pure(bell.amplitudes()).unwrap()) < 1e-12);
        assert!(partial_trace(&bell, &[2]).is_err());
        let lat = Lattice::torus(2).unwrap();
        let psi = statevector_ground(&lat).unwrap();
        assert!((vn_entropy(&partial_trace(&psi, &[0]).unwrap(), LogBase::Bits) - 1.0).abs() < 1e-12);
        let rho = DensityMatrix::pure(bell.amplitudes()).unwrap();
        let r2 = partial_trace_density(&rho, 2, &[1]).unwrap();
        assert!(trace_distance(&r2, &DensityMatrix::maximally_mixed(2)) < 1e-12);
    }

    #[test]
    fn dense_entropy_matches_stabilizer() {
        let lat = Lattice::torus(2).unwrap();
        let st = toric_ground_state(&lat);
        let psi = StateVector::from_stabilizer(&st).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let qs: Vec<usize> = (0..8).filter(|_| rng.random()).collect();
            let r = Region::new("probe", 8, qs.iter().copied());
            let exact = region_entropy(&st, &r) as f64;
            assert!((region_entropy_dense(&psi, &qs, LogBase::Bits).unwrap() - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn compressed_ensemble_preserves_distances() {
        let lat = Lattice::torus(3).unwrap();
        let psi = statevector_ground(&lat).unwrap();
        let other = psi.apply_pauli(&PauliOperator::x_on(18, [0]));
        let all: Vec<usize> = (0..18).collect();
        let full = reduced_ensemble(&[psi.clone(), other.clone()], &all).unwrap();
        assert_eq!(full[0].dim(), 2);
        assert!((trace_distance(&full[0], &full[1]) - 1.0).abs() < 1e-9);
        let keep: Vec<usize> = (0..10).collect();
        let part = reduced_ensemble(&[psi.clone(), other], &keep).unwrap();
        let direct = region_entropy_dense(&psi, &keep, LogBase::Bits).unwrap();
        assert!((vn_entropy(&part[0], LogBase::Bits) - direct).abs() < 1e-9);
        assert!((trace_distance(&part[0], &part[1]) - 1.0).abs() < 1e-9);
    }
}
