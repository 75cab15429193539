//! Dense complex linear algebra for small systems: state vectors, density
//! matrices, entropies, the crossed-product channel model and the
//! max-entropy solver.

mod crossed;
mod maxent;
mod secret;
mod state;

pub use crossed::*;
pub use maxent::*;
pub use secret::*;
pub use state::*;

use alloc::vec::Vec;
use core::str::FromStr;

use nalgebra::{Complex, ComplexField, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Largest register the dense backend accepts.
pub const MAX_DENSE_QUBITS: usize = 18;
/// Eigenvalues at or below this count as zero in `0 log 0`.
pub const EIG_CUTOFF: f64 = 1e-12;
const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    /// Multiplier turning a natural log into this base.
    pub fn scale(self) -> f64 {
        match self {
            LogBase::Bits => core::f64::consts::LOG2_E,
            LogBase::Nats => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Bits => "bits",
            LogBase::Nats => "nats",
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "bits" => Ok(LogBase::Bits),
            "e" | "nats" => Ok(LogBase::Nats),
            other => Err(input_err!("unknown log base '{other}' (expected 2 or e)")),
        }
    }
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `f(m)` for Hermitian `m` through its spectral decomposition.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let mut scaled = vectors.clone();
    for (c, &l) in values.iter().enumerate() {
        let s = f(l);
        scaled.column_mut(c).iter_mut().for_each(|x| *x *= s);
    }
    scaled * vectors.adjoint()
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// `e^{iφ}`.
pub fn unit_phase(phi: f64) -> C64 {
    C64::new(libm::cos(phi), libm::sin(phi))
}

/// Sum of singular values of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.modulus()))
}

/// `-Σ λ log λ` over a spectrum.
pub fn spectrum_entropy(values: &[f64], base: LogBase) -> f64 {
    let s: f64 = values.iter().filter(|&&l| l > EIG_CUTOFF).map(|&l| -l * libm::log(l)).sum();
    s * base.scale()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to 1e-10.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(input_err!("density matrix must be square and non-empty, got {}x{}", m.nrows(), m.ncols()));
        }
        let herm = max_abs(&(&m - m.adjoint()));
        if herm > STATE_TOL {
            return Err(input_err!("matrix is not Hermitian (deviation {herm:e})"));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(input_err!("trace is {tr}, expected 1"));
        }
        let low = min_eigenvalue(&m);
        if low < -STATE_TOL {
            return Err(input_err!("matrix has negative eigenvalue {low:e}"));
        }
        Ok(Self { m })
    }

    /// Skips validation; for matrices produced by trusted constructions.
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self { m }
    }

    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(input_err!("state vector has squared norm {norm}, expected 1"));
        }
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        Ok(Self { m: &v * v.adjoint() })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) / C64::from(dim as f64) }
    }

    /// Classical state with the given probabilities on the computational basis.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let m =
            CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(probs.len(), probs.iter().map(|&p| C64::from(p))));
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self { m: self.m.kronecker(&other.m) }
    }
}

pub fn vn_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    spectrum_entropy(&rho.eigenvalues(), base)
}

/// `S(ρ‖σ) = tr ρ(log ρ − log σ)`; `None` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix, base: LogBase) -> Option<f64> {
    let (mu, f) = hermitian_eigen(&sigma.m);
    let mut cross = 0.0;
    for (j, &m) in mu.iter().enumerate() {
        let col = f.column(j);
        let weight = (col.adjoint() * &rho.m * col)[(0, 0)].re;
        if m > EIG_CUTOFF {
            cross += weight * libm::log(m);
        } else if weight > 1e-10 {
            return None;
        }
    }
    let neg_s = -spectrum_entropy(&rho.eigenvalues(), LogBase::Nats);
    Some((neg_s - cross) * base.scale())
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    0.5 * trace_norm(&(&rho.m - &sigma.m))
}

#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(input_err!("ensemble is empty"));
        };
        let dim = first.1.dim();
        if members.iter().any(|(p, r)| *p < 0.0 || r.dim() != dim) {
            return Err(input_err!("ensemble needs non-negative weights and equal dimensions"));
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(input_err!("ensemble weights sum to {total}, expected 1"));
        }
        Ok(Self { members })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|r| (p, r)).collect())
    }

    pub fn members(&self) -> &[(f64, DensityMatrix)] {
        &self.members
    }

    pub fn average(&self) -> DensityMatrix {
        let dim = self.members[0].1.dim();
        let m = self.members.iter().fold(CMatrix::zeros(dim, dim), |acc, (p, r)| acc + &r.m * C64::from(*p));
        DensityMatrix { m }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolevoReport {
    pub chi: f64,
    pub average_entropy: f64,
    pub mean_member_entropy: f64,
    /// `Σ p_x S(ρ_x‖ρ̄)`, absent when a relative entropy diverges.
    pub relative_form: Option<f64>,
    pub identity_gap: Option<f64>,
    pub base: LogBase,
}

impl HolevoReport {
    pub fn identity_holds(&self) -> bool {
        self.identity_gap.is_none_or(|g| g <= 1e-9)
    }
}

/// Holevo quantity computed as an entropy difference and as an average
/// relative entropy to the mixture.
pub fn holevo_chi(e: &Ensemble, base: LogBase) -> HolevoReport {
    let avg = e.average();
    let average_entropy = vn_entropy(&avg, base);
    let mean_member_entropy: f64 = e.members.iter().map(|(p, r)| p * vn_entropy(r, base)).sum();
    let chi = average_entropy - mean_member_entropy;
    let relative_form = e
        .members
        .iter()
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, r)| relative_entropy(r, &avg, base).map(|s| p * s))
        .sum::<Option<f64>>();
    let identity_gap = relative_form.map(|r| (r - chi).abs());
    HolevoReport { chi, average_entropy, mean_member_entropy, relative_form, identity_gap, base }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn plus_state() -> DensityMatrix {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[c(h), c(h)]).unwrap()
    }

    #[test]
    fn entropies() {
        assert!(vn_entropy(&DensityMatrix::pure(&[c(1.0), c(0.0)]).unwrap(), LogBase::Bits).abs() < 1e-12);
        assert!((vn_entropy(&DensityMatrix::maximally_mixed(2), LogBase::Bits) - 1.0).abs() < 1e-12);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityMatrix::diagonal(&[(1.0 + s) / 2.0, (1.0 - s) / 2.0]).unwrap();
        assert!((vn_entropy(&rho, LogBase::Bits) - 0.60088).abs() < 1e-5);
    }

    #[test]
    fn holevo_examples() {
        let zero = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let one = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let r = holevo_chi(&Ensemble::uniform(vec![zero.clone(), one]).unwrap(), LogBase::Bits);
        assert!((r.chi - 1.0).abs() < 1e-12 && r.identity_holds());
        let r = holevo_chi(&Ensemble::uniform(vec![zero.clone(), plus_state()]).unwrap(), LogBase::Bits);
        assert!((r.chi - 0.60088).abs() < 1e-5 && r.identity_holds());
        let r = holevo_chi(&Ensemble::uniform(vec![plus_state(), plus_state()]).unwrap(), LogBase::Bits);
        assert!(r.chi.abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_support() {
        let zero = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(relative_entropy(&plus_state(), &zero, LogBase::Bits), None);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((relative_entropy(&zero, &mixed, LogBase::Bits).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_states() {
        assert!(DensityMatrix::diagonal(&[0.7, 0.7]).is_err());
        assert!(DensityMatrix::diagonal(&[1.5, -0.5]).is_err());
        let mut m = CMatrix::identity(2, 2) / c(2.0);
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix::new(m).is_err());
        assert!(Ensemble::new(vec![(0.4, plus_state())]).is_err());
    }
}
