use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tqd_core::denseq::{
    build_crossed_product, chi_secret_check, conditional_expectation_check, entropy_gain_search,
    irreducible_correlation, pimsner_popa_check, stinespring_verify, CMatrix, DensityMatrix, LogBase,
    MaxEntropyOptions, C64,
};
use tqd_core::entropy::{area_law_fit, square_family, tee_combination};
use tqd_core::fusion::{quantum_dims, secret_ratio, FusionModel, FusionModelSpec};
use tqd_core::lattice::{make_layout, Geometry, Lattice, LayoutSpec, RegionLayout};
use tqd_core::secretshare::{
    build_code_states, check_probe_region, collect_unauthorized, compute_index, encircling_region,
    encircling_threshold, probe_regions, superposition_check, verify_authorized, ChargeLabel, EveProbeFamily,
};
use tqd_core::stabilizer::toric_ground_state;

use crate::cli::{
    BlobArgs, ChannelArgs, ChiArgs, Cli, Command, CorrelationArgs, FusionArgs, IndexArgs, StatePreset, TeeArgs,
    TeeShape, VerifyArgs,
};
use crate::CliError;

/// Everything a command produces before it is wrapped into a report.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub inputs: Value,
    pub tolerances: Value,
    pub result: Value,
    pub violations: bool,
}

/// Layout document accepted by `--layout`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDocument {
    pub geometry: Geometry,
    #[serde(rename = "L")]
    pub l: usize,
    pub layout: LayoutSpec,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn parse_pair(s: &str) -> Result<[usize; 2], CliError> {
    let bad = || CliError::Input(format!("expected 'row,col', got '{s}'"));
    let mut it = s.split(',').map(|x| x.trim().parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(r)), Some(Ok(c)), None) => Ok([r, c]),
        _ => Err(bad()),
    }
}

fn parse_centers(s: &str) -> Result<[[usize; 2]; 2], CliError> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != 2 {
        return Err(CliError::Input(format!("expected two centres 'r,c;r,c', got '{s}'")));
    }
    Ok([parse_pair(parts[0])?, parse_pair(parts[1])?])
}

/// Lattice and layout from a document, or from the blob flags.
fn resolve_layout(
    geometry: Geometry,
    l: usize,
    blobs: &BlobArgs,
) -> Result<(LayoutDocument, Lattice, RegionLayout), CliError> {
    let doc = match (&blobs.layout, &blobs.centers) {
        (Some(path), _) => read_json::<LayoutDocument>(path)?,
        (None, Some(c)) => LayoutDocument {
            geometry,
            l,
            layout: LayoutSpec::TwoBlob {
                centers: parse_centers(c)?,
                radius: blobs.radius,
                shape: Default::default(),
                separation: None,
            },
        },
        (None, None) => LayoutDocument { geometry, l, layout: LayoutSpec::default_two_blob(l, blobs.radius) },
    };
    let lat = Lattice::new(doc.geometry, doc.l)?;
    let layout = make_layout(&lat, &doc.layout)?;
    Ok((doc, lat, layout))
}

fn base_suffix(base: LogBase) -> &'static str {
    base.as_str()
}

/// Converts a value in bits into the requested base.
fn from_bits(bits: f64, base: LogBase) -> f64 {
    match base {
        LogBase::Bits => bits,
        LogBase::Nats => bits * std::f64::consts::LN_2,
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let seed = cli.output.seed;
    let base = cli.output.base;
    match &cli.command {
        Command::Index(a) => index(a, base),
        Command::Verify(a) => verify(a, seed),
        Command::Tee(a) => tee(a, base),
        Command::Fusion(a) => fusion(a),
        Command::Channel(a) => channel(a, seed),
        Command::Chi(a) => chi(a, seed, base),
        Command::Correlation(a) => correlation(a, base),
    }
}

fn index(a: &IndexArgs, base: LogBase) -> Result<Outcome, CliError> {
    let (doc, lat, layout) = resolve_layout(a.lattice.geometry, a.lattice.l, &a.blobs)?;
    let ground = toric_ground_state(&lat);
    let d_max = (!a.unrestricted).then_some(a.dmax);
    let rep = compute_index(&lat, &ground, &layout, d_max)?;
    let mut result = to_value(&rep);
    result["separation"] = to_value(&layout.separation);
    result["log_index"] = json!(from_bits(rep.log_index_bits, base));
    result["base"] = json!(base_suffix(base));
    if a.threshold {
        result["encircling_threshold"] = to_value(&encircling_threshold(&lat, &ground, &layout)?);
    }
    Ok(Outcome {
        command: "index",
        inputs: json!({ "args": to_value(a), "layout": to_value(&doc) }),
        tolerances: json!({ "exact": true }),
        result,
        violations: false,
    })
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<Outcome, CliError> {
    let (doc, lat, layout) = resolve_layout(a.lattice.geometry, a.lattice.l, &a.blobs)?;
    let ground = toric_ground_state(&lat);
    let code = build_code_states(&lat, &ground, &layout)?;
    let mut family = EveProbeFamily::new(a.dmax, seed);
    family.sampled_products = a.samples;
    if a.encircle {
        family = family.with_region(encircling_region(&code));
    }
    let regions = probe_regions(&code, &family);
    let per_region: Vec<_> = regions.par_iter().map(|r| check_probe_region(&code, r)).collect();
    let unauthorized = collect_unauthorized(&family, per_region);
    let authorized = verify_authorized(&code)?;
    let violations = !unauthorized.clean() || !authorized.clean();
    Ok(Outcome {
        command: "verify",
        inputs: json!({ "args": to_value(a), "layout": to_value(&doc) }),
        tolerances: json!({ "exact": true }),
        result: json!({
            "unauthorized": to_value(&unauthorized),
            "authorized": to_value(&authorized),
            "violation_count": unauthorized.violations.len(),
        }),
        violations,
    })
}

fn tee(a: &TeeArgs, base: LogBase) -> Result<Outcome, CliError> {
    let lat = Lattice::torus(a.l)?;
    let ground = toric_ground_state(&lat);
    let center = match &a.center {
        Some(c) => parse_pair(c)?,
        None => [a.l / 2, a.l / 2],
    };
    let (rep, layouts) = match a.layout {
        TeeShape::Kp => {
            let spec = LayoutSpec::KitaevPreskill { center, radius: a.radius };
            (tee_combination(&ground, &lat, &make_layout(&lat, &spec)?)?, vec![spec])
        }
        TeeShape::Lw => {
            let spec = LayoutSpec::LevinWen { center, inner: a.inner, outer: a.outer };
            (tee_combination(&ground, &lat, &make_layout(&lat, &spec)?)?, vec![spec])
        }
        TeeShape::Annulus => {
            let max_side = a.max_side.unwrap_or(2 * a.l / 3).min(a.l.saturating_sub(2));
            let rects = square_family([1, 1], 1..=max_side);
            let ann = [LayoutSpec::Annulus { center, inner: a.inner, outer: a.outer }];
            let rep = area_law_fit(&ground, &lat, &rects, &ann)?;
            (rep, rects.into_iter().chain(ann).collect())
        }
    };
    let mut result = to_value(&rep);
    result["gamma"] = json!(from_bits(rep.gamma_bits, base));
    result["base"] = json!(base_suffix(base));
    Ok(Outcome {
        command: "tee",
        inputs: json!({ "args": to_value(a), "geometry": "torus", "layouts": to_value(&layouts) }),
        tolerances: json!({ "exact": true }),
        result,
        violations: false,
    })
}

/// Counts above `u64::MAX` are written as decimal strings.
fn count(v: u128) -> Value {
    match u64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

fn fusion(a: &FusionArgs) -> Result<Outcome, CliError> {
    let (model, source) = match &a.model_file {
        Some(path) => {
            let spec: FusionModelSpec = read_json(path)?;
            (FusionModel::from_spec(&spec)?, to_value(&spec))
        }
        None => (FusionModel::builtin(&a.model)?, json!(a.model)),
    };
    let counts = secret_ratio(&model, a.n_a, a.n_e, a.n_b)?;
    let dims = quantum_dims(&model)?;
    Ok(Outcome {
        command: "fusion",
        inputs: json!({ "args": to_value(a), "model": source }),
        tolerances: json!({ "power_iteration": 1e-15 }),
        result: json!({
            "model": counts.model,
            "nA": counts.n_a,
            "nE": counts.n_e,
            "nB": counts.n_b,
            "dim_v": count(counts.dim_v),
            "dim_v_hat": count(counts.dim_v_hat),
            "ratio": counts.ratio,
            "D2": dims.total_dim_sq,
            "quantum_dims": to_value(&dims),
        }),
        violations: false,
    })
}

fn channel(a: &ChannelArgs, seed: u64) -> Result<Outcome, CliError> {
    let m = build_crossed_product(2, a.k)?;
    let ce = conditional_expectation_check(&m, a.samples.min(200), seed);
    let pp = pimsner_popa_check(&m, a.samples, seed.wrapping_add(1));
    let st = stinespring_verify(&m, a.samples.min(200), seed.wrapping_add(2));
    let gain = entropy_gain_search(&m, a.restarts, a.ascent, seed.wrapping_add(3));
    let violations = !(ce.ok() && pp.ok() && st.ok() && gain.within_bound());
    Ok(Outcome {
        command: "channel",
        inputs: json!({ "args": to_value(a), "d": 2 }),
        tolerances: json!({ "algebraic": 1e-10, "entropy_bound": 1e-9, "units": "nats" }),
        result: json!({
            "index": pp.index,
            "log_index_nats": pp.index.ln(),
            "represented_dim": m.represented_dim(),
            "conditional_expectation": to_value(&ce),
            "pimsner_popa": to_value(&pp),
            "stinespring": to_value(&st),
            "entropy_gain": to_value(&gain),
        }),
        violations,
    })
}

fn chi(a: &ChiArgs, seed: u64, base: LogBase) -> Result<Outcome, CliError> {
    let labels: Vec<ChargeLabel> = a.states.split(',').map(|s| s.parse()).collect::<Result<_, _>>()?;
    let doc = match &a.layout {
        Some(path) => read_json::<LayoutDocument>(path)?,
        None => LayoutDocument { geometry: Geometry::Torus, l: a.l, layout: LayoutSpec::compact_two_blob(a.l) },
    };
    let lat = Lattice::new(doc.geometry, doc.l)?;
    let layout = make_layout(&lat, &doc.layout)?;
    let rep = chi_secret_check(&lat, &layout, &labels)?;
    let code = build_code_states(&lat, &toric_ground_state(&lat), &layout)?;
    let mut superposition = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            let pair_seed = seed.wrapping_add((i * labels.len() + j) as u64);
            superposition.push(superposition_check(&code, [labels[i], labels[j]], a.probes, pair_seed)?);
        }
    }
    let tol = 1e-9;
    let violations = rep.max_eve_distance > tol || superposition.iter().any(|s| !s.clean());
    let mut result = to_value(&rep);
    result["chi_ab"] = json!(from_bits(rep.chi_ab_bits, base));
    result["chi_e"] = json!(from_bits(rep.chi_e_bits, base));
    result["base"] = json!(base_suffix(base));
    result["superposition"] = to_value(&superposition);
    Ok(Outcome {
        command: "chi",
        inputs: json!({ "args": to_value(a), "layout": to_value(&doc) }),
        tolerances: json!({ "eve_distance": tol, "superposition": tol }),
        result,
        violations,
    })
}

/// Dense state document: real and imaginary parts of the density matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

fn state_from_document(doc: &StateDocument) -> Result<DensityMatrix, CliError> {
    let dim = 1usize
        .checked_shl(doc.n as u32)
        .filter(|_| doc.n < 16)
        .ok_or_else(|| CliError::Input(format!("n = {} is too large", doc.n)))?;
    let rows_ok = |m: &Vec<Vec<f64>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
    if !rows_ok(&doc.re) || !doc.im.as_ref().is_none_or(rows_ok) {
        return Err(CliError::Input(format!("state matrices must be {dim}x{dim} for n = {}", doc.n)));
    }
    let m = CMatrix::from_fn(dim, dim, |i, j| C64::new(doc.re[i][j], doc.im.as_ref().map_or(0.0, |im| im[i][j])));
    Ok(DensityMatrix::new(m)?)
}

fn preset_state(p: StatePreset, n: usize) -> Result<DensityMatrix, CliError> {
    if n == 0 || n > 8 {
        return Err(CliError::Input(format!("preset states need 1 <= n <= 8, got {n}")));
    }
    let dim = 1usize << n;
    let state = match p {
        StatePreset::EvenParity => {
            let even: Vec<f64> =
                (0..dim).map(|i| if (i as u32).count_ones().is_multiple_of(2) { 1.0 } else { 0.0 }).collect();
            let total: f64 = even.iter().sum();
            DensityMatrix::diagonal(&even.iter().map(|x| x / total).collect::<Vec<_>>())?
        }
        StatePreset::Product => {
            DensityMatrix::diagonal(&(0..dim).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect::<Vec<_>>())?
        }
        StatePreset::Bell | StatePreset::Ghz => {
            if p == StatePreset::Bell && n != 2 {
                return Err(CliError::Input(format!("the Bell state has 2 qubits, got --n {n}")));
            }
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let amps: Vec<C64> =
                (0..dim).map(|i| if i == 0 || i == dim - 1 { C64::new(h, 0.0) } else { C64::new(0.0, 0.0) }).collect();
            DensityMatrix::pure(&amps)?
        }
    };
    Ok(state)
}

fn correlation(a: &CorrelationArgs, base: LogBase) -> Result<Outcome, CliError> {
    let (rho, n, source) = match &a.state_file {
        Some(path) => {
            let doc: StateDocument = read_json(path)?;
            (state_from_document(&doc)?, doc.n, to_value(&doc))
        }
        None => {
            let n = if a.state == StatePreset::Bell { 2 } else { a.n };
            (preset_state(a.state, n)?, n, json!(a.state))
        }
    };
    let k = a.k.unwrap_or(n);
    let opts = MaxEntropyOptions { tolerance: a.tolerance, ..Default::default() };
    let rep = irreducible_correlation(&rho, n, k, &opts)?;
    let mut result = to_value(&rep);
    result["correlation"] = json!(from_bits(rep.correlation_bits, base));
    result["base"] = json!(base_suffix(base));
    Ok(Outcome {
        command: "correlation",
        inputs: json!({ "args": to_value(a), "state": source, "n": n, "k": k }),
        tolerances: to_value(&opts),
        result,
        violations: false,
    })
}
