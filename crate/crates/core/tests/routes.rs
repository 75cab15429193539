//! The three finite routes to D² checked against each other through the public API.

use proptest::prelude::*;
use tqd_core::denseq::chi_secret_check;
use tqd_core::entropy::{area_law_fit, square_family, tee_combination};
use tqd_core::fusion::{quantum_dims, secret_ratio, FusionModel};
use tqd_core::lattice::{make_layout, Lattice, LayoutSpec};
use tqd_core::secretshare::{build_code_states, compute_index, ChargeLabel};
use tqd_core::stabilizer::toric_ground_state;

#[test]
fn toric_code_routes_agree() {
    let lat = Lattice::torus(8).unwrap();
    let st = toric_ground_state(&lat);
    let blobs = make_layout(&lat, &LayoutSpec::default_two_blob(8, 2)).unwrap();
    let index = compute_index(&lat, &st, &blobs, Some(3)).unwrap().index as f64;

    let kp = make_layout(&lat, &LayoutSpec::KitaevPreskill { center: [4, 4], radius: 3 }).unwrap();
    let gamma = tee_combination(&st, &lat, &kp).unwrap().gamma_bits;
    let from_entropy = 2f64.powf(2.0 * gamma);

    let toric = FusionModel::toric();
    let d2 = quantum_dims(&toric).unwrap().total_dim_sq;
    let ratio = secret_ratio(&toric, 6, 6, 6).unwrap().ratio.unwrap();

    let small = Lattice::torus(3).unwrap();
    let cells = make_layout(&small, &LayoutSpec::compact_two_blob(3)).unwrap();
    let chi = chi_secret_check(&small, &cells, &ChargeLabel::ALL).unwrap();

    assert_eq!(index, 4.0);
    assert_eq!(from_entropy, 4.0);
    assert!((d2 - 4.0).abs() < 1e-12);
    assert_eq!(ratio, 4.0);
    assert!((2f64.powf(chi.difference_bits) - index).abs() < 1e-9);
}

#[test]
fn fibonacci_ratio_tracks_total_dimension() {
    let fib = FusionModel::fibonacci();
    let d2 = quantum_dims(&fib).unwrap().total_dim_sq;
    let mut last = f64::INFINITY;
    for n in [10, 20, 30, 40] {
        let gap = (secret_ratio(&fib, n, n, n).unwrap().ratio.unwrap() - d2).abs();
        assert!(gap <= last);
        last = gap;
    }
    assert!(last < 1e-6);
}

#[test]
fn fit_and_combinations_share_gamma() {
    let lat = Lattice::torus(12).unwrap();
    let st = toric_ground_state(&lat);
    let ann = [LayoutSpec::Annulus { center: [6, 6], inner: 1, outer: 3 }];
    let fit = area_law_fit(&st, &lat, &square_family([1, 1], 1..=8), &ann).unwrap();
    let lw = make_layout(&lat, &LayoutSpec::LevinWen { center: [6, 6], inner: 1, outer: 3 }).unwrap();
    let lw = tee_combination(&st, &lat, &lw).unwrap();
    assert_eq!(fit.gamma_bits, lw.gamma_bits);
    assert_eq!(lw.s_top_bits, 2.0 * fit.gamma_bits);
}

#[test]
fn eve_learns_nothing_from_a_thin_region() {
    // blobs a single edge apart leave Eve a sliver of the 3x3 torus
    let lat = Lattice::torus(3).unwrap();
    let st = toric_ground_state(&lat);
    let mut tried = 0;
    for other in [[1usize, 1usize], [1, 2], [2, 1]] {
        let spec = LayoutSpec::TwoBlob {
            centers: [[0, 0], other],
            radius: 1,
            shape: tqd_core::lattice::BlobShape::Cell,
            separation: None,
        };
        let Ok(lay) = make_layout(&lat, &spec) else { continue };
        if build_code_states(&lat, &st, &lay).is_err() {
            continue;
        }
        let rep = chi_secret_check(&lat, &lay, &ChargeLabel::ALL).unwrap();
        assert!(rep.chi_e_bits.abs() < 1e-9, "{other:?}: {}", rep.chi_e_bits);
        assert!(rep.max_eve_distance < 1e-9);
        assert!((rep.chi_ab_bits - 2.0).abs() < 1e-9);
        tried += 1;
    }
    assert!(tried > 0);
}

#[test]
fn layout_document_fields() {
    let doc = r#"{"kind": "two-blob", "centers": [[0,0],[4,4]], "radius": 1}"#;
    let spec: LayoutSpec = serde_json::from_str(doc).unwrap();
    let lat = Lattice::torus(8).unwrap();
    let lay = make_layout(&lat, &spec).unwrap();
    assert!(lay.separation.unwrap() >= 4);
    assert!(serde_json::from_str::<LayoutSpec>(r#"{"kind": "two-blob", "centres": [[0,0],[4,4]]}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn index_ignores_placement(r0 in 0usize..8, c0 in 0usize..8, dr in 3usize..6, dc in 3usize..6, d in 2usize..4) {
        let lat = Lattice::torus(8).unwrap();
        let st = toric_ground_state(&lat);
        let spec = LayoutSpec::TwoBlob {
            centers: [[r0, c0], [(r0 + dr) % 8, (c0 + dc) % 8]],
            radius: 1,
            shape: Default::default(),
            separation: Some(4),
        };
        // placements closer than the separation are rejected up front
        if let Ok(lay) = make_layout(&lat, &spec) {
            let rep = compute_index(&lat, &st, &lay, Some(d)).unwrap();
            prop_assert_eq!(rep.index, 4);
            prop_assert_eq!(rep.kernel_bits, 2);
        }
    }
}
