use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fock::truncated_dim;
use crate::lattice::LatticeSpec;
use crate::operators::{HoppingSpec, ModelSpec};

/// Lattice, hopping and the base parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Displacement `"z1,z2,…"` → `[re, im]`. Absent means nearest-neighbour
    /// `t̃_{±e_i} = −0.5`.
    pub hopping: Option<BTreeMap<String, [f64; 2]>>,
    #[serde(rename = "U")]
    pub u: f64,
    pub mu: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            d: 1,
            n: 2,
            hopping: None,
            u: 1.0,
            mu: 0.0,
            lambda: 0.5,
            beta: 1.0,
        }
    }
}

pub const DEFAULT_HOPPING: f64 = -0.5;

impl ModelConfig {
    /// Hopping on a lattice of linear size `n` (the map is re-wrapped per
    /// size).
    pub fn hopping_for(&self, n: usize) -> Result<HoppingSpec> {
        let lattice = LatticeSpec::new(self.d, n)?;
        match &self.hopping {
            None => Ok(HoppingSpec::nearest_neighbour(lattice, DEFAULT_HOPPING)),
            Some(map) => {
                let mut entries = Vec::with_capacity(map.len());
                for (key, [re, im]) in map {
                    let z: Vec<i64> = key
                        .split(',')
                        .map(|s| s.trim().parse::<i64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::Config(format!("bad hopping displacement {key:?}")))?;
                    if z.len() != self.d {
                        return Err(Error::Config(format!(
                            "hopping displacement {key:?} has {} components, d = {}",
                            z.len(),
                            self.d
                        )));
                    }
                    entries.push((z, Complex64::new(*re, *im)));
                }
                HoppingSpec::new(lattice, entries)
            }
        }
    }

    pub fn model(&self, n: usize, u: f64, mu: f64, lambda: f64, beta: f64) -> Result<ModelSpec> {
        ModelSpec::new(self.hopping_for(n)?, u, mu, lambda, beta)
    }

    pub fn base_model(&self) -> Result<ModelSpec> {
        self.model(self.n, self.u, self.mu, self.lambda, self.beta)
    }
}

/// Fixed list of cutoffs, or adaptive growth until `ρ_M`, `m_M` settle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase", deny_unknown_fields)]
pub enum CutoffConfig {
    Fixed { values: Vec<usize> },
    Adaptive { start: usize, max: usize, tolerance: f64 },
}

impl Default for CutoffConfig {
    fn default() -> Self {
        Self::Fixed { values: vec![4, 6] }
    }
}

/// Parameter grid for `verify`; `d` comes from the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub sizes: Vec<usize>,
    #[serde(rename = "U")]
    pub u: Vec<f64>,
    pub mu: Vec<f64>,
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            sizes: vec![2, 3, 4],
            u: vec![0.5, 1.0, 2.0],
            mu: vec![-1.0, 0.0, 1.0],
            lambda: vec![0.05, 0.2, 1.0],
            beta: vec![0.5, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksConfig {
    pub relative_samples: usize,
    pub relative_k: Vec<usize>,
    /// Cutoffs for the density band (lower bound needs convergence).
    pub band_cutoffs: Vec<usize>,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            relative_samples: 100,
            relative_k: vec![1, 2, 5],
            band_cutoffs: vec![4, 6, 8, 10],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CondensationConfig {
    /// `[d, N]` pairs.
    pub lattices: Vec<[usize; 2]>,
    pub lambdas: Vec<f64>,
    /// Nearest-neighbour amplitude.
    pub hopping: f64,
    pub start: usize,
    pub max: usize,
    pub tolerance: f64,
}

impl Default for CondensationConfig {
    fn default() -> Self {
        Self {
            lattices: vec![[1, 2], [1, 3], [1, 4], [2, 2], [2, 3]],
            lambdas: vec![0.5, 0.2, 0.1, 0.05],
            hopping: DEFAULT_HOPPING,
            start: 2,
            max: 30,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityScanConfig {
    pub mu0: f64,
    /// Sampled `λ` as fractions of `λ₀`.
    pub fractions: Vec<f64>,
    pub cutoff: usize,
}

impl Default for DensityScanConfig {
    fn default() -> Self {
        Self {
            mu0: 0.0,
            fractions: vec![0.5, 0.25],
            cutoff: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceScanConfig {
    pub cutoffs: Vec<usize>,
    pub tolerance: f64,
}

impl Default for ConvergenceScanConfig {
    fn default() -> Self {
        Self {
            cutoffs: (2..=10).collect(),
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KsumScanConfig {
    pub d: usize,
    #[serde(rename = "N")]
    pub sizes: Vec<usize>,
    pub m2: f64,
    pub alpha: f64,
}

impl Default for KsumScanConfig {
    fn default() -> Self {
        Self {
            d: 1,
            sizes: vec![8, 16, 32, 64],
            m2: 1.0,
            alpha: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScansConfig {
    pub condensation: CondensationConfig,
    pub density: DensityScanConfig,
    pub convergence: ConvergenceScanConfig,
    pub ksum: KsumScanConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub cutoff: CutoffConfig,
    pub grid: GridConfig,
    pub checks: ChecksConfig,
    pub scans: ScansConfig,
    pub seed: u64,
    pub cap: usize,
    pub output: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            cutoff: CutoffConfig::default(),
            grid: GridConfig::default(),
            checks: ChecksConfig::default(),
            scans: ScansConfig::default(),
            seed: 20240601,
            cap: 2500,
            output: PathBuf::from("bhl-out"),
            jobs: 0,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub cap: Option<usize>,
}

fn positive(name: &str, values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Config(format!("{name} must be > 0 (got {v})")));
    }
    Ok(())
}

fn finite(name: &str, values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Config(format!("{name} must be finite (got {v})")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Flag > file > default.
    pub fn apply(mut self, o: &Overrides) -> Self {
        if let Some(p) = &o.output {
            self.output = p.clone();
        }
        if let Some(j) = o.jobs {
            self.jobs = j;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(c) = o.cap {
            self.cap = c;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Fixed cutoffs, if the policy is fixed.
    pub fn fixed_cutoffs(&self) -> Option<&[usize]> {
        match &self.cutoff {
            CutoffConfig::Fixed { values } => Some(values),
            CutoffConfig::Adaptive { .. } => None,
        }
    }

    /// Everything that can be checked before a job starts.
    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        positive("U", &[m.u])?;
        positive("beta", &[m.beta])?;
        finite("mu, lambda", &[m.mu, m.lambda])?;
        positive("grid U", &self.grid.u)?;
        positive("grid beta", &self.grid.beta)?;
        finite("grid mu", &self.grid.mu)?;
        finite("grid lambda", &self.grid.lambda)?;
        if !(1..=3).contains(&m.d) {
            return Err(Error::Config(format!("d must be 1, 2 or 3 (got {})", m.d)));
        }
        let mut sizes = self.grid.sizes.clone();
        sizes.push(m.n);
        for &n in &sizes {
            if n < 2 {
                return Err(Error::Config(format!("N must be >= 2 (got {n})")));
            }
            self.model.hopping_for(n).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.cap == 0 {
            return Err(Error::Config("cap must be positive".into()));
        }
        match &self.cutoff {
            CutoffConfig::Fixed { values } => {
                if values.is_empty() {
                    return Err(Error::Config("fixed cutoff list is empty".into()));
                }
                if let Some(&v) = values.iter().find(|&&v| v < 2) {
                    return Err(Error::Config(format!("cutoffs must be >= 2 (got {v})")));
                }
                let top = *values.iter().max().unwrap();
                for &n in &sizes {
                    let sites = n.pow(m.d as u32);
                    // projection identities use a buffer of two extra quanta
                    let dim = truncated_dim(sites, top + 2);
                    if dim > self.cap as u128 {
                        return Err(Error::Config(format!(
                            "N = {n}, M = {top} (+2 buffer) needs dimension {dim} > cap {}",
                            self.cap
                        )));
                    }
                }
            }
            CutoffConfig::Adaptive { start, max, tolerance } => {
                if *start < 2 || max < start {
                    return Err(Error::Config("adaptive cutoff needs 2 <= start <= max".into()));
                }
                positive("cutoff tolerance", &[*tolerance])?;
            }
        }
        if self.checks.relative_k.contains(&0) {
            return Err(Error::Config("relative-bound K must be >= 1".into()));
        }
        let band = &self.checks.band_cutoffs;
        if band.is_empty() || band.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("band cutoffs must be non-empty and ascending".into()));
        }
        for &n in &self.grid.sizes {
            let dim = truncated_dim(n.pow(m.d as u32), *band.last().unwrap());
            if dim > self.cap as u128 {
                return Err(Error::Config(format!("band cutoff needs dimension {dim} > cap {}", self.cap)));
            }
        }
        let s = &self.scans;
        finite("condensation lambdas", &s.condensation.lambdas)?;
        if let Some(bad) = s.condensation.lattices.iter().find(|[d, n]| !(1..=3).contains(d) || *n < 2) {
            return Err(Error::Config(format!("bad condensation lattice {bad:?}")));
        }
        positive("condensation tolerance", &[s.condensation.tolerance])?;
        finite("condensation hopping", &[s.condensation.hopping])?;
        positive("density fractions", &s.density.fractions)?;
        if s.density.fractions.iter().any(|&f| f >= 1.0) {
            return Err(Error::Config("density fractions must lie in (0, 1)".into()));
        }
        let cv = &s.convergence.cutoffs;
        if cv.is_empty() || cv.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("convergence cutoffs must be non-empty and ascending".into()));
        }
        positive("ksum alpha", &[s.ksum.alpha])?;
        if s.ksum.m2.is_nan() || s.ksum.m2 < 0.0 || !(1..=2).contains(&s.ksum.d) {
            return Err(Error::Config("ksum needs m2 >= 0 and d in {1, 2}".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trip_and_hash() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let c = RunConfig::from_json(r#"{"model": {"U": 2.0}, "seed": 5}"#).unwrap();
        assert_eq!(c.model.u, 2.0);
        assert_eq!(c.model.beta, 1.0);
        assert_eq!(c.seed, 5);
        assert!(RunConfig::from_json(r#"{"modle": {}}"#).is_err());
    }

    #[test]
    fn validation_failures() {
        let bad_u = RunConfig::from_json(r#"{"model": {"U": 0.0}}"#).unwrap();
        assert!(matches!(bad_u.validate(), Err(Error::Config(_))));
        let bad_beta = RunConfig::from_json(r#"{"grid": {"beta": [-1.0]}}"#).unwrap();
        assert!(bad_beta.validate().is_err());
        let non_herm = RunConfig::from_json(r#"{"model": {"N": 5, "hopping": {"1": [0.0, 1.0], "-1": [0.0, 1.0]}}}"#).unwrap();
        assert!(non_herm.validate().is_err());
        let too_big = RunConfig::from_json(r#"{"cap": 100}"#).unwrap();
        assert!(too_big.validate().is_err());
    }

    #[test]
    fn hopping_map_and_overrides() {
        let c = RunConfig::from_json(r#"{"model": {"N": 4, "hopping": {"1": [-0.25, 0.0], "-1": [-0.25, 0.0]}}}"#)
            .unwrap();
        let h = c.model.hopping_for(2).unwrap();
        assert_eq!(h.amplitude(1), Complex64::new(-0.5, 0.0));
        let o = Overrides {
            seed: Some(9),
            jobs: Some(1),
            ..Default::default()
        };
        let c = c.apply(&o);
        assert_eq!((c.seed, c.jobs), (9, 1));
    }
}
