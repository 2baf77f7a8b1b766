//! Scenario files (TOML) and their conversion into library objects.

use crate::error::CliError;
use polariton::fock::{entangled_pair, product_pair, single_mode, AmplitudeRecord};
use polariton::{
    BlockScatteringMatrix, CMatrix64, CVector64, FrequencySector, Limits, ModeSpace, PolaritonState, PolaritonTuple,
    ScatteringScenario, Tolerances, ToyModel, C64,
};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(rename = "sector")]
    pub sectors: Vec<SectorSpec>,
    pub input: Option<InputSpec>,
    pub sweep: Option<SweepSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    pub tolerance: f64,
    pub state_tolerance: f64,
    pub n_max: usize,
    pub permanent_max: usize,
    pub dense_max: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        let limits = Limits::default();
        let tol = Tolerances::default();
        Self {
            seed: 0,
            tolerance: tol.unitary,
            state_tolerance: tol.state,
            n_max: limits.n_max,
            permanent_max: limits.permanent_max,
            dense_max: limits.dense_max,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSpec {
    pub frequency: f64,
    pub matrix: MatrixSpec,
}

type Entries = Vec<Vec<[f64; 2]>>;

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    Identity {
        n_s: usize,
    },
    Attenuator {
        t: f64,
        eta_e: f64,
        #[serde(default = "one")]
        n_s: usize,
    },
    LossyBeamsplitter {
        t: f64,
        r: f64,
        loss: f64,
        eta_e: f64,
    },
    RandomUnitary {
        n_s: usize,
        seed: Option<u64>,
    },
    RandomLossy {
        n_s: usize,
        seed: Option<u64>,
        loss_scale: f64,
        eta_e: f64,
    },
    /// Dilation of a supplied transmission block, rows outgoing.
    Dilation {
        transmission: Entries,
        eta_e: f64,
    },
    /// Full block matrix, rows outgoing, ordered s, e, m.
    Explicit {
        n_s: usize,
        n_e: usize,
        n_m: usize,
        z: Entries,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    /// One s-polariton in the `mode`-th s-mode (s-modes counted alone).
    SingleMode { mode: usize },
    ProductPair { phi: Vec<[f64; 2]> },
    EntangledPair { phi1: Vec<[f64; 2]>, phi2: Vec<[f64; 2]> },
    /// Explicit tuple amplitudes over global mode indices.
    Amplitudes { amplitude: Vec<AmplitudeEntry> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    #[serde(default)]
    pub s: Vec<usize>,
    #[serde(default)]
    pub e: Vec<usize>,
    #[serde(default)]
    pub m: Vec<usize>,
    pub value: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SweepParameter {
    Loss,
    EtaE,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Loss => "loss",
            SweepParameter::EtaE => "eta_e",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub steps: Option<usize>,
    #[serde(default = "half")]
    pub eta_e: f64,
    #[serde(default)]
    pub loss: f64,
}

fn half() -> f64 {
    0.5
}

impl SweepSpec {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        if let Some(v) = &self.values {
            return Ok(v.clone());
        }
        match (self.start, self.stop, self.steps) {
            (Some(a), Some(b), Some(n)) => Ok(linspace(a, b, n)),
            _ => Err(CliError::Parse("sweep: give either `values` or all of `start`, `stop`, `steps`".into())),
        }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Parse `0,0.1,0.2` or `start:stop:steps`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Parse(format!("--grid: cannot read `{what}`"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(s));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let steps = parts[2].trim().parse::<usize>().map_err(|_| bad(parts[2]))?;
        return Ok(linspace(num(parts[0])?, num(parts[1])?, steps));
    }
    text.split(',').map(num).collect()
}

/// Run-wide settings after command-line overrides.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub seed: u64,
    pub limits: Limits,
    pub tolerances: Tolerances,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if cfg.sectors.is_empty() {
            return Err(CliError::Parse("at least one [[sector]] is required".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn settings(&self, seed: Option<u64>, tolerance: Option<f64>) -> Settings {
        let r = &self.run;
        Settings {
            seed: seed.unwrap_or(r.seed),
            limits: Limits { n_max: r.n_max, permanent_max: r.permanent_max, dense_max: r.dense_max },
            tolerances: Tolerances { unitary: tolerance.unwrap_or(r.tolerance), state: r.state_tolerance },
        }
    }

    /// Mode space and per-sector matrices; unitarity is not checked here.
    pub fn matrices(&self, settings: &Settings) -> Result<(ModeSpace, Vec<BlockScatteringMatrix>), CliError> {
        let mut sectors = Vec::new();
        let mut mats = Vec::new();
        for (k, spec) in self.sectors.iter().enumerate() {
            let z = spec
                .matrix
                .build(settings.seed.wrapping_add(k as u64), settings.tolerances.unitary)
                .map_err(|e| e.context(format!("sector[{k}].matrix")))?;
            let (n_s, n_e, n_m) = z.dims();
            sectors.push(FrequencySector::new(spec.frequency, n_s, n_e, n_m));
            mats.push(z.with_sector(k));
        }
        let space = ModeSpace::new(sectors).map_err(|e| CliError::from(e).context("sector"))?;
        Ok((space, mats))
    }

    pub fn input(&self, space: &ModeSpace) -> Result<PolaritonState, CliError> {
        let spec = self.input.as_ref().ok_or_else(|| CliError::Parse("an [input] section is required".into()))?;
        spec.build(space).map_err(|e| e.context("input"))
    }

    pub fn scenario(&self, settings: &Settings) -> Result<ScatteringScenario, CliError> {
        let (space, mats) = self.matrices(settings)?;
        self.scenario_with(space, mats, settings)
    }

    pub fn scenario_with(
        &self,
        space: ModeSpace,
        mats: Vec<BlockScatteringMatrix>,
        settings: &Settings,
    ) -> Result<ScatteringScenario, CliError> {
        let psi = self.input(&space)?;
        Ok(ScatteringScenario::with_options(space, mats, psi, settings.limits, settings.tolerances)?)
    }
}

fn complex_matrix(rows: &Entries, what: &str) -> Result<CMatrix64, CliError> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(CliError::Validation(format!("{what}: rows have different lengths")));
    }
    Ok(CMatrix64::from_fn(n, m, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

fn complex_vector(v: &[[f64; 2]]) -> CVector64 {
    CVector64::from_iterator(v.len(), v.iter().map(|&[re, im]| C64::new(re, im)))
}

impl MatrixSpec {
    pub fn build(&self, default_seed: u64, tau: f64) -> Result<BlockScatteringMatrix, CliError> {
        let toy = match *self {
            MatrixSpec::Identity { n_s } => ToyModel::Identity { n_s },
            MatrixSpec::Attenuator { t, eta_e, n_s } => ToyModel::Attenuator { t, eta_e, n_s },
            MatrixSpec::LossyBeamsplitter { t, r, loss, eta_e } => ToyModel::LossyBeamsplitter { t, r, loss, eta_e },
            MatrixSpec::RandomUnitary { n_s, seed } => ToyModel::RandomUnitary { n_s, seed: seed.unwrap_or(default_seed) },
            MatrixSpec::RandomLossy { n_s, seed, loss_scale, eta_e } => {
                ToyModel::RandomLossy { n_s, seed: seed.unwrap_or(default_seed), loss_scale, eta_e }
            }
            MatrixSpec::Dilation { ref transmission, eta_e } => {
                let t = complex_matrix(transmission, "transmission")?;
                return Ok(BlockScatteringMatrix::dilate_transmission(&t, eta_e, tau)?);
            }
            MatrixSpec::Explicit { n_s, n_e, n_m, ref z } => {
                let z = complex_matrix(z, "z")?;
                return Ok(BlockScatteringMatrix::new(0, n_s, n_e, n_m, z)?);
            }
        };
        Ok(toy.build(tau)?)
    }
}

impl InputSpec {
    pub fn build(&self, space: &ModeSpace) -> Result<PolaritonState, CliError> {
        Ok(match self {
            InputSpec::SingleMode { mode } => single_mode(space, *mode)?.into(),
            InputSpec::ProductPair { phi } => product_pair(space, &complex_vector(phi))?.into(),
            InputSpec::EntangledPair { phi1, phi2 } => {
                entangled_pair(space, &complex_vector(phi1), &complex_vector(phi2))?.into()
            }
            InputSpec::Amplitudes { amplitude } => {
                if amplitude.is_empty() {
                    return Err(CliError::Validation("amplitude list is empty".into()));
                }
                let mut groups: BTreeMap<polariton::Signature, Vec<AmplitudeRecord>> = BTreeMap::new();
                for a in amplitude {
                    let tuple = PolaritonTuple::new(a.s.clone(), a.e.clone(), a.m.clone());
                    groups.entry(tuple.signature()).or_default().push(AmplitudeRecord {
                        tuple,
                        re: a.value[0],
                        im: a.value[1],
                    });
                }
                let mut state = PolaritonState::new();
                for records in groups.values() {
                    let (tensor, correction) = polariton::AmplitudeTensor::from_records(records)?;
                    if correction > 1e-8 {
                        log::warn!("input amplitudes symmetrised (largest change {correction:e})");
                    }
                    state.add(tensor);
                }
                state
            }
        })
    }

    /// `(phi1, phi2)` when the input is the entangled-pair preset.
    pub fn entangled_vectors(&self) -> Option<(CVector64, CVector64)> {
        match self {
            InputSpec::EntangledPair { phi1, phi2 } => Some((complex_vector(phi1), complex_vector(phi2))),
            _ => None,
        }
    }
}
