use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{input_err, Result};
use crate::lattice::{Lattice, RegionLayout};
use crate::secretshare::{build_code_states, ChargeLabel, CodeStates};
use crate::stabilizer::toric_ground_state;

use super::{
    holevo_chi, reduced_ensemble, statevector_ground, trace_distance, Ensemble, HolevoReport, LogBase, StateVector,
};

/// Dense code states `V_i Ω` for the requested labels.
pub fn code_statevectors(code: &CodeStates, labels: &[ChargeLabel]) -> Result<Vec<StateVector>> {
    let omega = StateVector::from_stabilizer(&code.ground)?;
    labels
        .iter()
        .map(|l| {
            let class =
                code.classes.iter().find(|c| c.label == *l).ok_or_else(|| input_err!("no class {}", l.as_str()))?;
            Ok(omega.apply_pauli(&class.representative))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EveDistance {
    pub states: [ChargeLabel; 2],
    pub trace_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiReport {
    pub n_qubits: usize,
    pub labels: Vec<ChargeLabel>,
    pub chi_ab_bits: f64,
    pub chi_e_bits: f64,
    pub difference_bits: f64,
    pub eve_distances: Vec<EveDistance>,
    pub max_eve_distance: f64,
    pub ab: HolevoReport,
    pub e: HolevoReport,
}

/// Holevo information of the uniform code ensemble on A∪B and on E.
pub fn chi_secret_check(lat: &Lattice, layout: &RegionLayout, labels: &[ChargeLabel]) -> Result<ChiReport> {
    statevector_ground(lat).map(|_| ())?;
    let ground = toric_ground_state(lat);
    let code = build_code_states(lat, &ground, layout)?;
    if labels.is_empty() {
        return Err(input_err!("need at least one code state"));
    }
    let vectors = code_statevectors(&code, labels)?;
    let ab: Vec<usize> = code.alice.union(&code.bob).to_vec();
    let eve = code.eve.to_vec();
    let ab_states = reduced_ensemble(&vectors, &ab)?;
    let e_states = reduced_ensemble(&vectors, &eve)?;
    let mut eve_distances = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            let d = trace_distance(&e_states[i], &e_states[j]);
            eve_distances.push(EveDistance { states: [labels[i], labels[j]], trace_distance: d });
        }
    }
    let ab = holevo_chi(&Ensemble::uniform(ab_states)?, LogBase::Bits);
    let e = holevo_chi(&Ensemble::uniform(e_states)?, LogBase::Bits);
    Ok(ChiReport {
        n_qubits: lat.num_qubits(),
        labels: labels.to_vec(),
        chi_ab_bits: ab.chi,
        chi_e_bits: e.chi,
        difference_bits: ab.chi - e.chi,
        max_eve_distance: eve_distances.iter().map(|d| d.trace_distance).fold(0.0, f64::max),
        eve_distances,
        ab,
        e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_layout, LayoutSpec};

    #[test]
    fn chi_on_three_by_three_torus() {
        let lat = Lattice::torus(3).unwrap();
        let lay = make_layout(&lat, &LayoutSpec::compact_two_blob(3)).unwrap();
        let r = chi_secret_check(&lat, &lay, &ChargeLabel::ALL).unwrap();
        assert!((r.chi_ab_bits - 2.0).abs() < 1e-9, "{r:?}");
        assert!(r.chi_e_bits.abs() < 1e-9);
        assert!(r.max_eve_distance < 1e-9);
        assert!(r.ab.identity_holds() && r.e.identity_holds());
        let r = chi_secret_check(&lat, &lay, &[ChargeLabel::Vacuum]).unwrap();
        assert!(r.chi_ab_bits.abs() < 1e-12 && r.chi_e_bits.abs() < 1e-12);
    }

    #[test]
    fn too_large_for_dense() {
        let lat = Lattice::torus(4).unwrap();
        let lay = make_layout(&lat, &LayoutSpec::compact_two_blob(4)).unwrap();
        assert!(matches!(chi_secret_check(&lat, &lay, &ChargeLabel::ALL), Err(crate::Error::Capability(_))));
    }
}
