//! Exact entanglement entropies of stabilizer states and topological
//! entanglement entropy combinations. All entropies are in bits.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{input_err, Result};
use crate::lattice::{boundary_components, boundary_size, Lattice, LayoutKind, LayoutSpec, Region, RegionLayout};
use crate::stabilizer::StabilizerState;

/// `S(R) = |R| − dim{s ∈ S : support(s) ⊆ R}`.
pub fn region_entropy(state: &StabilizerState, r: &Region) -> usize {
    r.len() - state.subgroup_dim(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionEntropy {
    pub name: String,
    pub bits: i64,
    pub boundary: usize,
    pub components: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeeReport {
    pub kind: LayoutKind,
    pub entropies: Vec<RegionEntropy>,
    /// Signed entropy sum defining the topological term (layout combinations only).
    pub combination: Option<i64>,
    /// Topological entropy read off the combination or the fit.
    pub s_top_bits: f64,
    pub gamma_bits: f64,
    /// Area-law slope (fits only).
    pub beta: Option<f64>,
    /// Sum of squared fit residuals (fits only).
    pub residual: f64,
    /// Boundary-matched differences, one per annulus that has a match: `S_rect − S_annulus`
    /// when a single rectangle has the annulus's boundary size, otherwise
    /// `S_annulus − (S_r1 + S_r2 + S_r3)` for three rectangles whose boundary sizes add up to it.
    /// Either way the area terms cancel and `γ` is left.
    pub matched_gammas: Vec<i64>,
    pub sub_minimal: bool,
}

fn entropy_row(state: &StabilizerState, lat: &Lattice, r: &Region) -> RegionEntropy {
    RegionEntropy {
        name: r.name().to_string(),
        bits: region_entropy(state, r) as i64,
        boundary: boundary_size(lat, r),
        components: boundary_components(lat, r),
    }
}

/// Evaluates the Kitaev-Preskill or Levin-Wen combination on a layout.
pub fn tee_combination(state: &StabilizerState, lat: &Lattice, layout: &RegionLayout) -> Result<TeeReport> {
    let (terms, s_top_factor): (Vec<(Region, i64)>, i64) = match layout.kind() {
        LayoutKind::KitaevPreskill => {
            let [a, b, c] = [&layout.regions[0], &layout.regions[1], &layout.regions[2]];
            let ab = a.union(b).named("AB");
            let bc = b.union(c).named("BC");
            let ca = c.union(a).named("CA");
            let abc = ab.union(c).named("ABC");
            (vec_terms([(a.clone(), 1), (b.clone(), 1), (c.clone(), 1), (ab, -1), (bc, -1), (ca, -1), (abc, 1)]), 1)
        }
        LayoutKind::LevinWen => {
            let r = &layout.regions;
            (vec_terms([(r[0].clone(), 1), (r[1].clone(), -1), (r[2].clone(), -1), (r[3].clone(), 1)]), 2)
        }
        other => {
            return Err(input_err!(
                "entropy combinations need a kitaev-preskill or levin-wen layout, got {}",
                other.as_str()
            ))
        }
    };
    let entropies: Vec<RegionEntropy> = terms.iter().map(|(r, _)| entropy_row(state, lat, r)).collect();
    let combination: i64 = entropies.iter().zip(&terms).map(|(e, (_, sign))| sign * e.bits).sum();
    let s_top = -combination;
    Ok(TeeReport {
        kind: layout.kind(),
        entropies,
        combination: Some(combination),
        s_top_bits: s_top as f64,
        gamma_bits: s_top as f64 / s_top_factor as f64,
        beta: None,
        residual: 0.0,
        matched_gammas: Vec::new(),
        sub_minimal: layout.sub_minimal,
    })
}

fn vec_terms<const N: usize>(t: [(Region, i64); N]) -> Vec<(Region, i64)> {
    t.into_iter().collect()
}

/// Least-squares fit of `S = β|∂R| − n_∂ γ` over rectangles and annuli.
pub fn area_law_fit(
    state: &StabilizerState,
    lat: &Lattice,
    rectangles: &[LayoutSpec],
    annuli: &[LayoutSpec],
) -> Result<TeeReport> {
    if rectangles.len() < 2 {
        return Err(input_err!("area-law fit needs at least two rectangles, got {}", rectangles.len()));
    }
    let mut rects = Vec::new();
    for spec in rectangles {
        if spec.kind() != LayoutKind::Rectangle {
            return Err(input_err!("expected a rectangle, got {}", spec.kind().as_str()));
        }
        let layout = crate::lattice::make_layout(lat, spec)?;
        rects.push(entropy_row(state, lat, &layout.regions[0]));
    }
    let mut rings = Vec::new();
    let mut sub_minimal = false;
    for spec in annuli {
        if spec.kind() != LayoutKind::Annulus {
            return Err(input_err!("expected an annulus, got {}", spec.kind().as_str()));
        }
        let layout = crate::lattice::make_layout(lat, spec)?;
        sub_minimal |= layout.sub_minimal;
        rings.push(entropy_row(state, lat, &layout.regions[0]));
    }
    // normal equations for unknowns (β, γ) with rows (|∂|, −n_∂)
    let (mut saa, mut sab, mut sbb, mut sya, mut syb) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let points: Vec<(f64, f64, f64)> =
        rects.iter().chain(&rings).map(|e| (e.boundary as f64, -(e.components as f64), e.bits as f64)).collect();
    for &(a, b, y) in &points {
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        sya += y * a;
        syb += y * b;
    }
    let det = saa * sbb - sab * sab;
    let (beta, gamma) = if det.abs() < 1e-12 {
        // degenerate family (e.g. every region has zero boundary)
        if saa > 0.0 {
            (sya / saa, 0.0)
        } else {
            (0.0, 0.0)
        }
    } else {
        ((sya * sbb - syb * sab) / det, (saa * syb - sab * sya) / det)
    };
    let residual: f64 = points
        .iter()
        .map(|&(a, b, y)| {
            let r = beta * a + gamma * b - y;
            r * r
        })
        .sum();
    let matched_gammas = rings.iter().filter_map(|ring| matched_gap(&rects, ring)).collect();
    let mut entropies = rects;
    entropies.extend(rings);
    Ok(TeeReport {
        kind: if annuli.is_empty() { LayoutKind::Rectangle } else { LayoutKind::Annulus },
        entropies,
        combination: None,
        s_top_bits: gamma,
        gamma_bits: gamma,
        beta: Some(beta),
        residual: if residual.abs() < 1e-18 { 0.0 } else { residual },
        matched_gammas,
        sub_minimal,
    })
}

fn matched_gap(rects: &[RegionEntropy], ring: &RegionEntropy) -> Option<i64> {
    if let Some(r) = rects.iter().find(|r| r.boundary == ring.boundary) {
        return Some(r.bits - ring.bits);
    }
    // a ring too large for a matching rectangle on a small torus
    for (i, a) in rects.iter().enumerate() {
        for (j, b) in rects.iter().enumerate().skip(i) {
            for c in &rects[j..] {
                if a.boundary + b.boundary + c.boundary == ring.boundary {
                    return Some(ring.bits - a.bits - b.bits - c.bits);
                }
            }
        }
    }
    None
}

/// Square rectangles of side `k` for each `k` in `sides`, anchored at `origin`.
pub fn square_family(origin: [usize; 2], sides: impl IntoIterator<Item = usize>) -> Vec<LayoutSpec> {
    sides.into_iter().map(|k| LayoutSpec::Rectangle { origin, height: k, width: k }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_layout;
    use crate::stabilizer::toric_ground_state;
    use alloc::vec;

    #[test]
    fn trivial_regions() {
        let lat = Lattice::torus(4).unwrap();
        let st = toric_ground_state(&lat);
        assert_eq!(region_entropy(&st, &lat.empty_region()), 0);
        assert_eq!(region_entropy(&st, &lat.full_region()), 0);
        assert_eq!(region_entropy(&st, &Region::new("e", lat.num_qubits(), [3])), 1);
    }

    #[test]
    fn rectangle_entropy_closed_form() {
        let lat = Lattice::torus(10).unwrap();
        let st = toric_ground_state(&lat);
        for k in 1..=6 {
            let lay = make_layout(&lat, &LayoutSpec::Rectangle { origin: [1, 2], height: k, width: k }).unwrap();
            let r = &lay.regions[0];
            assert_eq!(region_entropy(&st, r), 4 * k - 1);
            assert_eq!(boundary_size(&lat, r), 8 * k);
        }
    }

    #[test]
    fn kitaev_preskill_and_levin_wen() {
        for l in [8usize, 12] {
            let lat = Lattice::torus(l).unwrap();
            let st = toric_ground_state(&lat);
            for c in [[3usize, 3usize], [0, 0], [5, 2]] {
                let kp = make_layout(&lat, &LayoutSpec::KitaevPreskill { center: c, radius: 3 }).unwrap();
                let rep = tee_combination(&st, &lat, &kp).unwrap();
                assert_eq!(rep.combination, Some(-1));
                assert_eq!(rep.gamma_bits, 1.0);
                let lw = make_layout(&lat, &LayoutSpec::LevinWen { center: c, inner: 1, outer: 3 }).unwrap();
                let rep = tee_combination(&st, &lat, &lw).unwrap();
                assert_eq!(rep.s_top_bits, 2.0);
                assert_eq!(rep.gamma_bits, 1.0);
            }
        }
    }

    #[test]
    fn thin_kitaev_preskill_is_flagged() {
        let lat = Lattice::torus(8).unwrap();
        let st = toric_ground_state(&lat);
        let kp = make_layout(&lat, &LayoutSpec::KitaevPreskill { center: [3, 3], radius: 1 }).unwrap();
        let rep = tee_combination(&st, &lat, &kp).unwrap();
        assert!(rep.sub_minimal);
        assert!(rep.combination.is_some());
        let ann = make_layout(&lat, &LayoutSpec::Annulus { center: [3, 3], inner: 1, outer: 3 }).unwrap();
        assert!(tee_combination(&st, &lat, &ann).is_err());
    }

    #[test]
    fn annulus_fit_is_exact() {
        let lat = Lattice::torus(12).unwrap();
        let st = toric_ground_state(&lat);
        let rects = square_family([1, 1], 1..=8);
        let ann = [LayoutSpec::Annulus { center: [6, 6], inner: 1, outer: 3 }];
        let rep = area_law_fit(&st, &lat, &rects, &ann).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert!((rep.gamma_bits - 1.0).abs() < 1e-12);
        assert!((rep.beta.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(rep.matched_gammas, vec![1]);
    }

    #[test]
    fn annulus_gap_from_three_rectangles() {
        // the matching 7x7 square does not fit at L = 8
        let lat = Lattice::torus(8).unwrap();
        let st = toric_ground_state(&lat);
        for c in [[3, 3], [4, 5]] {
            let ann = [LayoutSpec::Annulus { center: c, inner: 1, outer: 3 }];
            let rep = area_law_fit(&st, &lat, &square_family([1, 1], 1..=5), &ann).unwrap();
            assert_eq!(rep.matched_gammas, vec![1]);
            assert_eq!(rep.residual, 0.0);
        }
    }

    #[test]
    fn rectangle_only_fit() {
        let lat = Lattice::torus(12).unwrap();
        let st = toric_ground_state(&lat);
        let rep = area_law_fit(&st, &lat, &square_family([0, 0], 2..=5), &[]).unwrap();
        assert!((rep.gamma_bits - 1.0).abs() < 1e-12);
        assert_eq!(rep.residual, 0.0);
        assert!(area_law_fit(&st, &lat, &square_family([0, 0], [2]), &[]).is_err());
    }

    #[test]
    fn product_state_has_no_topological_term() {
        let lat = Lattice::torus(8).unwrap();
        let st = StabilizerState::all_zero(lat.num_qubits());
        let ann = [LayoutSpec::Annulus { center: [4, 4], inner: 1, outer: 3 }];
        let rep = area_law_fit(&st, &lat, &square_family([0, 0], 1..=4), &ann).unwrap();
        assert_eq!(rep.beta, Some(0.0));
        assert_eq!(rep.gamma_bits, 0.0);
    }

    proptest::proptest! {
        #[test]
        fn purity_and_subadditivity(seed in proptest::prelude::any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let lat = Lattice::torus(4).unwrap();
            let st = toric_ground_state(&lat);
            let n = lat.num_qubits();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut a = Vec::new();
            let mut b = Vec::new();
            for q in 0..n {
                match rng.random_range(0..3) {
                    0 => a.push(q),
                    1 => b.push(q),
                    _ => {}
                }
            }
            let (a, b) = (Region::new("a", n, a), Region::new("b", n, b));
            proptest::prop_assert_eq!(region_entropy(&st, &a), region_entropy(&st, &a.complement()));
            proptest::prop_assert!(region_entropy(&st, &a.union(&b)) <= region_entropy(&st, &a) + region_entropy(&st, &b));
        }
    }
}
