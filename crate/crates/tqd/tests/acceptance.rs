//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tqd_core::denseq::{
    build_crossed_product, chi_secret_check, entropy_gain_search, irreducible_correlation, max_abs, pimsner_popa_check,
    region_entropy_dense, stinespring_verify, CMatrix, DensityMatrix, LogBase, MaxEntropyOptions, StateVector,
};
use tqd_core::entropy::{area_law_fit, region_entropy, square_family, tee_combination};
use tqd_core::fusion::{fusion_dims, secret_ratio, FusionModel};
use tqd_core::gf2::BitVec;
use tqd_core::lattice::{make_layout, Geometry, Lattice, LayoutSpec, Region};
use tqd_core::secretshare::{
    build_code_states, compute_index, encircling_region, superposition_check, verify_authorized, verify_unauthorized,
    ChargeLabel, EveProbeFamily,
};
use tqd_core::stabilizer::{logical_count, toric_ground_state, PauliOperator};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn index_reproduction() -> Result<String, String> {
    let configs: [(usize, [[usize; 2]; 2], usize); 6] = [
        (6, [[0, 0], [3, 3]], 1),
        (6, [[1, 2], [4, 5]], 1),
        (8, [[0, 0], [4, 4]], 2),
        (8, [[2, 1], [6, 5]], 1),
        (10, [[0, 0], [5, 5]], 2),
        (10, [[3, 1], [7, 7]], 1),
    ];
    let mut slowest = Duration::ZERO;
    let mut runs = 0;
    for (l, centers, radius) in configs {
        let lat = Lattice::torus(l).map_err(e)?;
        let st = toric_ground_state(&lat);
        let spec = LayoutSpec::TwoBlob { centers, radius, shape: Default::default(), separation: Some(4) };
        let lay = make_layout(&lat, &spec).map_err(e)?;
        for d in [2, 3] {
            let t = Instant::now();
            let rep = compute_index(&lat, &st, &lay, Some(d)).map_err(e)?;
            slowest = slowest.max(t.elapsed());
            runs += 1;
            ensure(rep.index == 4 && rep.kernel_bits == 2, || {
                format!("L={l} {centers:?} d={d}: index {} kernel {}", rep.index, rep.kernel_bits)
            })?;
        }
    }
    ensure(slowest < Duration::from_secs(10), || format!("slowest configuration took {slowest:?}"))?;
    Ok(format!("{runs} configurations, index 4, kernel 2 bits, slowest {slowest:.2?}"))
}

fn tee_reproduction() -> Result<String, String> {
    let mut count = 0;
    for l in [8usize, 12] {
        let lat = Lattice::torus(l).map_err(e)?;
        let st = toric_ground_state(&lat);
        for c in [[3usize, 3usize], [l / 2, l / 2 + 1]] {
            let ann = LayoutSpec::Annulus { center: c, inner: 1, outer: 3 };
            let fit = area_law_fit(&st, &lat, &square_family([1, 1], 1..=2 * l / 3), &[ann]).map_err(e)?;
            ensure(fit.matched_gammas == [1], || format!("L={l} {c:?}: annulus gap {:?}", fit.matched_gammas))?;
            ensure(fit.gamma_bits == 1.0 && fit.residual == 0.0, || {
                format!("L={l} {c:?}: fit gamma {} residual {}", fit.gamma_bits, fit.residual)
            })?;
            let kp = make_layout(&lat, &LayoutSpec::KitaevPreskill { center: c, radius: 3 }).map_err(e)?;
            let kp = tee_combination(&st, &lat, &kp).map_err(e)?;
            ensure(kp.combination == Some(-1) && kp.gamma_bits == 1.0, || {
                format!("L={l} {c:?}: KP {:?}", kp.combination)
            })?;
            let lw = make_layout(&lat, &LayoutSpec::LevinWen { center: c, inner: 1, outer: 3 }).map_err(e)?;
            let lw = tee_combination(&st, &lat, &lw).map_err(e)?;
            ensure(lw.s_top_bits == 2.0 && lw.combination == Some(-2) && lw.gamma_bits == 1.0, || {
                format!("L={l} {c:?}: LW {:?}", lw.combination)
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} positions: annulus gap 1, fit gamma 1, KP -1, LW topological term 2"))
}

fn ground_degeneracy() -> Result<String, String> {
    for l in 2..=10 {
        let k = logical_count(&Lattice::torus(l).map_err(e)?);
        ensure(k == 2, || format!("torus L={l}: {k} logical qubits"))?;
    }
    for l in 2..=6 {
        let k = logical_count(&Lattice::planar(l).map_err(e)?);
        ensure(k == 0, || format!("planar L={l}: {k} logical qubits"))?;
    }
    Ok("torus L=2..10 has 2 logical qubits, planar L=2..6 has none".into())
}

fn secret_sharing_verification() -> Result<String, String> {
    let lat = Lattice::torus(8).map_err(e)?;
    let st = toric_ground_state(&lat);
    let lay = make_layout(&lat, &LayoutSpec::default_two_blob(8, 2)).map_err(e)?;
    let code = build_code_states(&lat, &st, &lay).map_err(e)?;
    let family = EveProbeFamily::new(3, 7);
    let un = verify_unauthorized(&code, &family);
    ensure(un.clean(), || format!("{} violations, first {:?}", un.violations.len(), un.violations.first()))?;
    let auth = verify_authorized(&code).map_err(e)?;
    ensure(auth.distinct_alice == 4 && auth.distinct_bob == 4, || {
        format!("signatures: {} for Alice, {} for Bob", auth.distinct_alice, auth.distinct_bob)
    })?;
    let ring = verify_unauthorized(&code, &family.clone().with_region(encircling_region(&code)));
    let hit = ring.violations.iter().find(|v| v.region == "ring" && !v.witness.is_empty());
    let hit = hit.ok_or("encircling loop went undetected")?;
    Ok(format!("{} probe regions clean, 4 distinct signatures, ring witness for {:?}", un.regions_checked, hit.states))
}

/// Enumerates intermediate charges directly.
fn brute_force(m: &FusionModel, left: usize, charge: usize, total: usize) -> u128 {
    if left == 0 {
        return u128::from(charge == total);
    }
    let k = m.labels().len();
    let mut sum = 0;
    for s in 0..k {
        for c in 0..k {
            let w = u128::from(m.site()[s]) * u128::from(m.n(charge, s, c));
            if w > 0 {
                sum += w * brute_force(m, left - 1, c, total);
            }
        }
    }
    sum
}

fn fibonacci_counting() -> Result<String, String> {
    let t = Instant::now();
    let fib = FusionModel::fibonacci();
    for n in 0..=12 {
        let dims = fusion_dims(&fib, n).map_err(e)?;
        for (c, &d) in dims.iter().enumerate() {
            let b = brute_force(&fib, n, 0, c);
            ensure(d == b, || format!("n={n} charge {c}: {d} vs {b}"))?;
        }
    }
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let target = 1.0 + golden * golden;
    let r = secret_ratio(&fib, 30, 30, 30).map_err(e)?.ratio.ok_or("empty chain")?;
    ensure((r - target).abs() < 0.01, || format!("ratio {r} vs {target}"))?;
    let toric = secret_ratio(&FusionModel::toric(), 10, 10, 10).map_err(e)?;
    ensure(toric.dim_v_hat == 4 * toric.dim_v, || format!("toric {} / {}", toric.dim_v_hat, toric.dim_v))?;
    let el = t.elapsed();
    ensure(el < Duration::from_secs(1), || format!("took {el:?}"))?;
    Ok(format!("n<=12 enumerated, ratio {r:.6}, toric ratio exactly 4"))
}

fn chi_route() -> Result<String, String> {
    let lat = Lattice::torus(3).map_err(e)?;
    let lay = make_layout(&lat, &LayoutSpec::compact_two_blob(3)).map_err(e)?;
    let rep = chi_secret_check(&lat, &lay, &ChargeLabel::ALL).map_err(e)?;
    let tol = 1e-9;
    ensure((rep.chi_ab_bits - 2.0).abs() <= tol, || format!("chi_AB {}", rep.chi_ab_bits))?;
    ensure(rep.chi_e_bits.abs() <= tol, || format!("chi_E {}", rep.chi_e_bits))?;
    ensure(rep.max_eve_distance <= tol, || format!("Eve distance {}", rep.max_eve_distance))?;
    ensure((rep.difference_bits - 4f64.log2()).abs() <= tol, || format!("difference {}", rep.difference_bits))?;
    Ok(format!(
        "{} qubits: chi_AB {:.12}, chi_E {:.1e}, max Eve distance {:.1e}",
        rep.n_qubits, rep.chi_ab_bits, rep.chi_e_bits, rep.max_eve_distance
    ))
}

fn channel_suite() -> Result<String, String> {
    let m = build_crossed_product(2, 2).map_err(e)?;
    let st = stinespring_verify(&m, 200, 11);
    ensure(st.ok(), || format!("{st:?}"))?;
    let ep0 = m.expectation(&m.p0_element()).coeffs[0].clone();
    let quarter = CMatrix::identity(2, 2) * tqd_core::denseq::C64::new(0.25, 0.0);
    let witness = max_abs(&(ep0 - quarter));
    ensure(witness <= 1e-12, || format!("|E(P0) - I/4| = {witness}"))?;
    let pp = pimsner_popa_check(&m, 1000, 12);
    ensure(pp.samples == 1000 && pp.ok() && pp.lambda == 0.25 && pp.index == 4.0, || format!("{pp:?}"))?;
    let gain = entropy_gain_search(&m, 1000, 4, 13);
    let ln4 = 4f64.ln();
    ensure(gain.max_excess <= 1e-9 && gain.within_bound(), || format!("excess {}", gain.max_excess))?;
    ensure((gain.bell_povm_nats - ln4).abs() <= 1e-9, || format!("Bell POVM gain {}", gain.bell_povm_nats))?;
    Ok(format!(
        "dilation {:.1e}, correction {:.1e}, E(P0) error {witness:.1e}, {} POVMs best {:.9} nats",
        st.dilation_error, st.correction_error, gain.evaluations, gain.best_nats
    ))
}

fn irreducible_correlation_check() -> Result<String, String> {
    let even: Vec<f64> = (0..8u32).map(|i| if i.count_ones() % 2 == 0 { 0.25 } else { 0.0 }).collect();
    let opts = MaxEntropyOptions::default();
    let rep = irreducible_correlation(&DensityMatrix::diagonal(&even).map_err(e)?, 3, 3, &opts).map_err(e)?;
    ensure((rep.correlation_bits - 1.0).abs() <= 1e-6, || format!("parity C3 {}", rep.correlation_bits))?;
    ensure(rep.residual <= 1e-8, || format!("residual {}", rep.residual))?;
    let mut prod = vec![0.0; 8];
    prod[0] = 1.0;
    let p = irreducible_correlation(&DensityMatrix::diagonal(&prod).map_err(e)?, 3, 3, &opts).map_err(e)?;
    ensure(p.correlation_bits.abs() <= 1e-9, || format!("product C3 {}", p.correlation_bits))?;
    Ok(format!(
        "parity C3 {:.9} (residual {:.1e}), product C3 {:.1e}",
        rep.correlation_bits, rep.residual, p.correlation_bits
    ))
}

fn superselection() -> Result<String, String> {
    let lat = Lattice::torus(3).map_err(e)?;
    let st = toric_ground_state(&lat);
    let lay = make_layout(&lat, &LayoutSpec::compact_two_blob(3)).map_err(e)?;
    let code = build_code_states(&lat, &st, &lay).map_err(e)?;
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for (i, &a) in ChargeLabel::ALL.iter().enumerate() {
        for &b in &ChargeLabel::ALL[i + 1..] {
            let rep = superposition_check(&code, [a, b], 200, 17 + pairs).map_err(e)?;
            ensure(rep.samples >= 200 && rep.phases.len() >= 3, || "too few probes".into())?;
            ensure(rep.clean(), || format!("{a:?}/{b:?}: deviation {}", rep.max_deviation))?;
            worst = worst.max(rep.max_deviation);
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs x 200 operators x 3 phases, max deviation {worst:.1e}"))
}

fn cross_module_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut lattices = Vec::new();
    for geometry in [Geometry::Torus, Geometry::Planar] {
        for l in 2..=6 {
            if let Ok(lat) = Lattice::new(geometry, l) {
                if lat.num_qubits() <= 12 {
                    lattices.push(lat);
                }
            }
        }
    }
    ensure(!lattices.is_empty(), || "no lattice fits".into())?;
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for lat in &lattices {
        let n = lat.num_qubits();
        let st = toric_ground_state(lat);
        let psi = StateVector::from_stabilizer(&st).map_err(e)?;
        for _ in 0..100 {
            let x = BitVec::from_indices(n, (0..n).filter(|_| rng.random::<bool>()));
            let z = BitVec::from_indices(n, (0..n).filter(|_| rng.random::<bool>()));
            let mut p = PauliOperator::from_parts(x, z, 0).hermitian_class();
            if rng.random::<bool>() {
                p = p.negated();
            }
            let exact = f64::from(st.expectation(&p).map_err(e)?);
            let dense = psi.expectation(&p);
            worst = worst.max((dense.re - exact).abs()).max(dense.im.abs());
        }
        for _ in 0..20 {
            let r = Region::new("r", n, (0..n).filter(|_| rng.random::<bool>()));
            let exact = region_entropy(&st, &r) as f64;
            let dense = region_entropy_dense(&psi, &r.to_vec(), LogBase::Bits).map_err(e)?;
            worst = worst.max((dense - exact).abs());
        }
        names.push(format!("{}/L={}", lat.geometry(), lat.size()));
    }
    ensure(worst <= 1e-9, || format!("max disagreement {worst}"))?;
    Ok(format!("{}: max disagreement {worst:.1e}", names.join(", ")))
}

fn main() {
    let criteria: [(&str, Check, Option<Duration>); 10] = [
        ("index reproduction", index_reproduction, None),
        ("entanglement entropy", tee_reproduction, Some(Duration::from_secs(30))),
        ("ground degeneracy", ground_degeneracy, None),
        ("secret-sharing verification", secret_sharing_verification, None),
        ("fusion counting", fibonacci_counting, Some(Duration::from_secs(1))),
        ("holevo route", chi_route, Some(Duration::from_secs(120))),
        ("channel suite", channel_suite, Some(Duration::from_secs(60))),
        ("irreducible correlation", irreducible_correlation_check, Some(Duration::from_secs(60))),
        ("superselection", superselection, None),
        ("stabilizer vs dense", cross_module_oracle, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut res = check();
        let el = t.elapsed();
        if let (Ok(_), Some(b)) = (&res, budget) {
            if el > *b {
                res = Err(format!("over budget: {el:.2?} > {b:?}"));
            }
        }
        match res {
            Ok(msg) => println!("criterion {}: PASS {name} ({msg}; {el:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({msg}; {el:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
