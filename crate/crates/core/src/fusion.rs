//! Multiplicity-free fusion rules, quantum dimensions and fusion-tree counting.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{capability_err, input_err, Result};

/// Fusion table `N[a][b][c]` over labels, label 0 being the vacuum.
///
/// `site` is the object placed at every site of a chain, given as a
/// multiplicity per label. For Fibonacci it is `τ`; for the toric code it is
/// the sum of all four labels, so that chains can carry every charge.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionModel {
    name: String,
    labels: Vec<String>,
    dual: Vec<usize>,
    table: Vec<Vec<Vec<u32>>>,
    site: Vec<u32>,
}

/// JSON form: `{"labels": [...], "dual": {...}, "table": [[a, b, c], ...], "site": ...}`.
///
/// Each triple sets `N[a][b][c] = N[b][a][c] = 1`. Vacuum rows are implied,
/// and duals left out of `dual` are read off the table.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct FusionModelSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub labels: Vec<String>,
    #[serde(default)]
    pub dual: BTreeMap<String, String>,
    pub table: Vec<[String; 3]>,
    #[serde(default)]
    pub site: Option<SiteSpec>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SiteSpec {
    Label(String),
    Sum(Vec<String>),
}

impl FusionModel {
    pub fn fibonacci() -> Self {
        let spec = FusionModelSpec {
            name: Some("fibonacci".into()),
            labels: vec!["1".into(), "t".into()],
            dual: [("1", "1"), ("t", "t")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            table: vec![["t".into(), "t".into(), "1".into()], ["t".into(), "t".into(), "t".into()]],
            site: Some(SiteSpec::Label("t".into())),
        };
        Self::from_spec(&spec).expect("built-in table is valid")
    }

    /// Z2 x Z2 fusion on `1, e, m, f` with `f = e x m`.
    pub fn toric() -> Self {
        let labels = ["1", "e", "m", "f"];
        let mut table = Vec::new();
        for (i, a) in labels.iter().enumerate() {
            for (j, b) in labels.iter().enumerate() {
                table.push([a.to_string(), b.to_string(), labels[i ^ j].to_string()]);
            }
        }
        let spec = FusionModelSpec {
            name: Some("toric".into()),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            dual: labels.iter().map(|s| (s.to_string(), s.to_string())).collect(),
            table,
            site: Some(SiteSpec::Sum(labels.iter().map(|s| s.to_string()).collect())),
        };
        Self::from_spec(&spec).expect("built-in table is valid")
    }

    pub fn trivial() -> Self {
        let spec = FusionModelSpec {
            name: Some("trivial".into()),
            labels: vec!["1".into()],
            dual: [("1".to_string(), "1".to_string())].into_iter().collect(),
            table: vec![],
            site: None,
        };
        Self::from_spec(&spec).expect("built-in table is valid")
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "fibonacci" => Ok(Self::fibonacci()),
            "toric" => Ok(Self::toric()),
            "trivial" => Ok(Self::trivial()),
            other => Err(input_err!("unknown fusion model '{other}' (expected fibonacci, toric or trivial)")),
        }
    }

    pub fn from_spec(spec: &FusionModelSpec) -> Result<Self> {
        let n = spec.labels.len();
        if n == 0 {
            return Err(input_err!("fusion model needs at least the vacuum label"));
        }
        let index = |s: &str| spec.labels.iter().position(|l| l == s).ok_or_else(|| input_err!("unknown label '{s}'"));
        for (i, l) in spec.labels.iter().enumerate() {
            if spec.labels[..i].contains(l) {
                return Err(input_err!("label '{l}' listed twice"));
            }
        }
        let mut table = vec![vec![vec![0u32; n]; n]; n];
        for a in 0..n {
            table[0][a][a] = 1;
            table[a][0][a] = 1;
        }
        for [a, b, c] in &spec.table {
            let (a, b, c) = (index(a)?, index(b)?, index(c)?);
            table[a][b][c] = 1;
            table[b][a][c] = 1;
        }
        let mut dual = vec![usize::MAX; n];
        for (a, b) in &spec.dual {
            dual[index(a)?] = index(b)?;
        }
        // unlisted duals are read off the table: the unique b with a ⊗ b ∋ 1
        for a in 0..n {
            if dual[a] != usize::MAX {
                continue;
            }
            let mut found = (0..n).filter(|&b| table[a][b][0] > 0);
            match (found.next(), found.next()) {
                (Some(b), None) => dual[a] = b,
                _ => return Err(input_err!("label '{}' has no unique dual; list it under \"dual\"", spec.labels[a])),
            }
        }
        let mut site = vec![0u32; n];
        match &spec.site {
            Some(SiteSpec::Label(l)) => site[index(l)?] += 1,
            Some(SiteSpec::Sum(ls)) => {
                for l in ls {
                    site[index(l)?] += 1;
                }
            }
            None => site[if n > 1 { 1 } else { 0 }] = 1,
        }
        let model = Self {
            name: spec.name.clone().unwrap_or_else(|| "custom".into()),
            labels: spec.labels.clone(),
            dual,
            table,
            site,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks unit, commutativity, associativity and duality of the table.
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        let name = |a: usize| self.labels[a].as_str();
        for a in 0..n {
            for c in 0..n {
                if self.table[a][0][c] != u32::from(a == c) {
                    return Err(input_err!("vacuum does not act trivially on '{}'", name(a)));
                }
            }
            let d = self.dual[a];
            if self.dual[d] != a || self.table[a][d][0] != 1 {
                return Err(input_err!("'{}' and '{}' do not fuse to the vacuum exactly once", name(a), name(d)));
            }
            for b in 0..n {
                for c in 0..n {
                    if self.table[a][b][c] != self.table[b][a][c] {
                        return Err(input_err!("fusion of '{}' and '{}' is not commutative", name(a), name(b)));
                    }
                    if self.table[a][b][c] > 1 {
                        return Err(capability_err!("fusion multiplicities above 1 are not supported"));
                    }
                    if (a == 0 || b == 0) || c != 0 {
                        continue;
                    }
                    if self.table[a][b][0] == 1 && b != d {
                        return Err(input_err!("'{}' fuses to the vacuum with '{}', not its dual", name(a), name(b)));
                    }
                }
                for c in 0..n {
                    for d in 0..n {
                        let left: u32 = (0..n).map(|e| self.table[a][b][e] * self.table[e][c][d]).sum();
                        let right: u32 = (0..n).map(|f| self.table[b][c][f] * self.table[a][f][d]).sum();
                        if left != right {
                            return Err(input_err!(
                                "fusion is not associative on ('{}', '{}', '{}') -> '{}'",
                                name(a),
                                name(b),
                                name(c),
                                name(d)
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| input_err!("unknown label '{label}'"))
    }

    pub fn dual(&self, a: usize) -> usize {
        self.dual[a]
    }

    pub fn n(&self, a: usize, b: usize, c: usize) -> u32 {
        self.table[a][b][c]
    }

    pub fn site(&self) -> &[u32] {
        &self.site
    }

    /// `(N_a)_{bc} = N[a][b][c]`.
    pub fn fusion_matrix(&self, a: usize) -> Vec<Vec<u32>> {
        self.table[a].clone()
    }

    /// Transfer matrix of the site object: `T[b][c] = Σ_a site[a] N[a][b][c]`.
    pub fn site_transfer(&self) -> Vec<Vec<u32>> {
        let n = self.labels.len();
        let mut t = vec![vec![0u32; n]; n];
        for (a, &m) in self.site.iter().enumerate() {
            for b in 0..n {
                for c in 0..n {
                    t[b][c] += m * self.table[a][b][c];
                }
            }
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumDims {
    pub labels: Vec<String>,
    pub dims: Vec<f64>,
    pub total_dim_sq: f64,
    pub abelian: bool,
}

/// Perron-Frobenius eigenvalue of every fusion matrix, by power iteration
/// on `N_a + I` (which shares the eigenvector and has a strictly dominant
/// eigenvalue).
pub fn quantum_dims(model: &FusionModel) -> Result<QuantumDims> {
    model.validate()?;
    let n = model.labels.len();
    let mut dims = Vec::with_capacity(n);
    for a in 0..n {
        let m = &model.table[a];
        let mut v = vec![1.0f64; n];
        let mut lambda = 0.0;
        for _ in 0..100_000 {
            let mut w: Vec<f64> =
                (0..n).map(|b| v[b] + (0..n).map(|c| f64::from(m[b][c]) * v[c]).sum::<f64>()).collect();
            let norm = w.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            w.iter_mut().for_each(|x| *x /= norm);
            let delta = w.iter().zip(&v).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
            v = w;
            lambda = norm - 1.0;
            if delta < 1e-15 {
                break;
            }
        }
        dims.push(lambda);
    }
    let total_dim_sq = dims.iter().map(|d| d * d).sum();
    let abelian = dims.iter().all(|d| (d - 1.0).abs() < 1e-12);
    Ok(QuantumDims { labels: model.labels.clone(), dims, total_dim_sq, abelian })
}

/// Fusion-space dimensions for `n` site objects, indexed by total charge.
pub fn fusion_dims(model: &FusionModel, n: usize) -> Result<Vec<u128>> {
    let t = model.site_transfer();
    let k = t.len();
    let mut v = vec![0u128; k];
    v[0] = 1;
    for _ in 0..n {
        let mut w = vec![0u128; k];
        for b in 0..k {
            if v[b] == 0 {
                continue;
            }
            for c in 0..k {
                let add = v[b]
                    .checked_mul(u128::from(t[b][c]))
                    .and_then(|x| x.checked_add(w[c]))
                    .ok_or_else(|| capability_err!("fusion-space dimension for {n} sites exceeds 128 bits"))?;
                w[c] = add;
            }
        }
        v = w;
    }
    Ok(v)
}

/// Number of left-associated fusion trees of `n` site objects with the given total charge.
pub fn fusion_dim(model: &FusionModel, n: usize, total: &str) -> Result<u128> {
    let c = model.label_index(total)?;
    Ok(fusion_dims(model, n)?[c])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FusionCountResult {
    pub model: String,
    pub n_a: usize,
    pub n_e: usize,
    pub n_b: usize,
    pub dim_v: u128,
    pub dim_v_hat: u128,
    /// `None` when `dim_v` is zero.
    pub ratio: Option<f64>,
}

/// Counts chains with vacuum charge on each of A, E, B (`V`) against chains
/// where only the total is vacuum and E stays neutral (`V̂`).
pub fn secret_ratio(model: &FusionModel, n_a: usize, n_e: usize, n_b: usize) -> Result<FusionCountResult> {
    let (da, de, db) = (fusion_dims(model, n_a)?, fusion_dims(model, n_e)?, fusion_dims(model, n_b)?);
    let overflow = || capability_err!("chain counts exceed 128 bits");
    let dim_v = da[0].checked_mul(de[0]).and_then(|x| x.checked_mul(db[0])).ok_or_else(overflow)?;
    let mut dim_v_hat = 0u128;
    for c in 0..da.len() {
        let term = da[c].checked_mul(de[0]).and_then(|x| x.checked_mul(db[model.dual(c)])).ok_or_else(overflow)?;
        dim_v_hat = dim_v_hat.checked_add(term).ok_or_else(overflow)?;
    }
    let ratio = (dim_v > 0).then(|| dim_v_hat as f64 / dim_v as f64);
    Ok(FusionCountResult { model: model.name.clone(), n_a, n_e, n_b, dim_v, dim_v_hat, ratio })
}
