use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{input_err, Result};
use crate::gf2::BitVec;

/// An n-qubit Pauli operator `i^phase · X^x Z^z`, with every X factor
/// written to the left of every Z factor.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x: BitVec,
    z: BitVec,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    /// Builds `i^phase · X^x Z^z` from raw parts.
    pub fn from_parts(x: BitVec, z: BitVec, phase: u8) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts differ in length");
        Self { x, z, phase: phase % 4 }
    }

    pub fn x_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self { x: BitVec::from_indices(n, qubits), z: BitVec::zeros(n), phase: 0 }
    }

    pub fn z_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self { x: BitVec::zeros(n), z: BitVec::from_indices(n, qubits), phase: 0 }
    }

    /// Hermitian product of Y on the given qubits.
    pub fn y_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        let x = BitVec::from_indices(n, qubits);
        let k = (x.count_ones() % 4) as u8;
        Self { z: x.clone(), x, phase: k }
    }

    /// Single-qubit Pauli `'I' | 'X' | 'Y' | 'Z'` on qubit `q`.
    pub fn single(n: usize, q: usize, kind: char) -> Result<Self> {
        if q >= n {
            return Err(input_err!("qubit {q} outside an {n}-qubit register"));
        }
        match kind {
            'I' => Ok(Self::identity(n)),
            'X' => Ok(Self::x_on(n, [q])),
            'Y' => Ok(Self::y_on(n, [q])),
            'Z' => Ok(Self::z_on(n, [q])),
            other => Err(input_err!("unknown Pauli letter '{other}'")),
        }
    }

    /// Parses strings such as `"XIZ"`, `"-YY"` or `"+iXZ"`; qubit 0 is the first letter.
    pub fn parse(s: &str) -> Result<Self> {
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (imag, rest) = match rest.strip_prefix('i') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let n = rest.chars().count();
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for (q, ch) in rest.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => x.set(q, true),
                'Z' => z.set(q, true),
                'Y' => {
                    x.set(q, true);
                    z.set(q, true);
                }
                other => return Err(input_err!("unknown Pauli letter '{other}' in \"{s}\"")),
            }
        }
        let coeff = 2 * u8::from(neg) + u8::from(imag);
        let ys = (x.and_count(&z) % 4) as u8;
        Ok(Self { x, z, phase: (coeff + ys) % 4 })
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &BitVec {
        &self.x
    }

    pub fn z(&self) -> &BitVec {
        &self.z
    }

    /// Exponent `k` in `i^k · X^x Z^z`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// Exponent `k` of the coefficient `i^k` in front of the tensor product
    /// of single-qubit I, X, Y, Z matrices.
    pub fn coefficient_power(&self) -> u8 {
        let ys = (self.x.and_count(&self.z) % 4) as u8;
        (self.phase + 4 - ys) % 4
    }

    pub fn is_hermitian(&self) -> bool {
        self.coefficient_power().is_multiple_of(2)
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn negated(&self) -> Self {
        Self { phase: (self.phase + 2) % 4, ..self.clone() }
    }

    pub fn times_i(&self, k: u8) -> Self {
        Self { phase: (self.phase + k) % 4, ..self.clone() }
    }

    /// Symplectic form `x·z' + z·x'`: false iff the operators commute.
    pub fn anticommutes(&self, other: &PauliOperator) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    pub fn commutes(&self, other: &PauliOperator) -> bool {
        !self.anticommutes(other)
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliOperator) -> PauliOperator {
        let swap = (2 * (self.z.and_count(&other.x) % 2)) as u8;
        let mut x = self.x.clone();
        x.xor_assign(&other.x);
        let mut z = self.z.clone();
        z.xor_assign(&other.z);
        PauliOperator { x, z, phase: (self.phase + other.phase + swap) % 4 }
    }

    pub fn mul_assign(&mut self, other: &PauliOperator) {
        *self = self.mul(other);
    }

    pub fn support(&self) -> Vec<usize> {
        let mut s = self.x.clone();
        s.or_assign(&self.z);
        s.iter_ones().collect()
    }

    pub fn support_mask(&self) -> BitVec {
        let mut s = self.x.clone();
        s.or_assign(&self.z);
        s
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones()
    }

    /// Concatenated `x ++ z` bits.
    pub fn symplectic_vector(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    /// Inverse of [`symplectic_vector`](Self::symplectic_vector), with phase 0.
    pub fn from_symplectic(v: &BitVec) -> Self {
        let n = v.len() / 2;
        Self { x: v.slice(0, n), z: v.slice(n, n), phase: 0 }
    }

    /// Hermitian representative of the same Pauli class, with coefficient +1.
    pub fn hermitian_class(&self) -> Self {
        let ys = (self.x.and_count(&self.z) % 4) as u8;
        Self { phase: ys, ..self.clone() }
    }

    /// Letter for qubit `q`.
    pub fn letter(&self, q: usize) -> char {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.coefficient_power() as usize];
        let body: String = (0..self.n_qubits()).map(|q| self.letter(q)).collect();
        write!(f, "{prefix}{body}")
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}
