// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: typed sections, built-in profiles, provenance
//! tags, strict TOML loading and the hashed JSON result envelope.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::budget::{
    anchor_rates, raman_coherence_factor, spin_dephasing_beta, AlphaTable, NoiseParams, RatePoint, ScatteringModel,
};
use crate::error::{Error, Result};
use crate::gate::{calibrate_lightshift_amp, GateConfig, ShapeKind};
use crate::rbm::{NoiseModel1Q, RbPlan};
use crate::readout::ReadoutModel;
use crate::spinecho::SpinEchoConfig;

pub const PROFILE_NAMES: [&str; 3] = ["table1-100us", "fast-gate-3.8us", "rbm-paper"];

/// Where a parameter value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Experimental value taken as given.
    Measured,
    /// Back-solved so a model output matches a measured target.
    Calibrated,
    /// Choice made where no value is available.
    Assumed,
}

/// Apparatus constants kept as metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Apparatus {
    pub axial_freq_hz: f64,
    pub qubit_freq_hz: f64,
    pub zeeman_splitting_hz: f64,
    pub micromotion_freq_hz: f64,
    pub raman_detuning_hz: f64,
    pub magnetic_field_t: f64,
}

impl Default for Apparatus {
    fn default() -> Self {
        Self {
            axial_freq_hz: 1.95e6,
            qubit_freq_hz: 3.226e9,
            zeeman_splitting_hz: 0.686e6,
            micromotion_freq_hz: 30.0e6,
            raman_detuning_hz: -3.0e12,
            magnetic_field_t: 0.196e-3,
        }
    }
}

/// Parity-fringe pipeline settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParityStudy {
    pub contrast: f64,
    pub c0: f64,
    pub phi0: f64,
    pub psum: f64,
    pub n_phases: usize,
    pub shots: u64,
    pub n_datasets: usize,
    pub epsilon_se: f64,
    pub epsilon_se_err: f64,
}

impl Default for ParityStudy {
    fn default() -> Self {
        Self {
            contrast: 0.9953,
            c0: 0.0,
            phi0: 0.0,
            psum: 0.9997,
            n_phases: 16,
            shots: 1000,
            n_datasets: 500,
            epsilon_se: 1.4e-3,
            epsilon_se_err: 0.1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiGateSettings {
    pub per_gate_error: f64,
    pub drift_frac: f64,
    pub max_gates: usize,
}

impl Default for MultiGateSettings {
    fn default() -> Self {
        Self { per_gate_error: 1.5e-3, drift_frac: 0.005, max_gates: 21 }
    }
}

/// Gate-duration sweep for model curves and spin-echo scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Self { t_min: 3.8e-6, t_max: 520e-6, points: 41 }
    }
}

impl Sweep {
    /// Log-spaced durations from `t_min` to `t_max`.
    pub fn grid(&self) -> Vec<f64> {
        if self.points < 2 {
            return vec![self.t_min];
        }
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        (0..self.points).map(|i| (a + (b - a) * i as f64 / (self.points - 1) as f64).exp()).collect()
    }

    pub fn validate(&self, prefix: &str) -> Vec<String> {
        if self.t_min > 0.0 && self.t_max > self.t_min && self.points >= 1 {
            Vec::new()
        } else {
            vec![format!("{prefix}needs 0 < t_min < t_max and points >= 1")]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub gate: GateConfig,
    pub noise: NoiseParams,
    #[serde(default)]
    pub alphas: AlphaTable,
    /// Scattering rates against t_g; derived from `noise` at `gate.t_g` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scattering: Option<ScatteringModel>,
    #[serde(default)]
    pub spin_echo: SpinEchoConfig,
    #[serde(default)]
    pub readout: ReadoutModel,
    #[serde(default)]
    pub rb: RbPlan,
    #[serde(default)]
    pub rb_noise: NoiseModel1Q,
    #[serde(default)]
    pub parity: ParityStudy,
    #[serde(default)]
    pub multigate: MultiGateSettings,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub apparatus: Apparatus,
    #[serde(default)]
    pub provenance: BTreeMap<String, Provenance>,
}

impl ExperimentConfig {
    pub fn scattering_model(&self) -> ScatteringModel {
        self.scattering.clone().unwrap_or_else(|| {
            ScatteringModel::power_law(
                RatePoint {
                    t_g: self.gate.t_g,
                    raman_rate: self.noise.raman_rate,
                    rayleigh_rate: self.noise.rayleigh_deph_rate,
                },
                &[self.gate.t_g],
            )
        })
    }

    /// Every invariant violation, each prefixed with its key path.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (name, seed) in [("seed", self.seed), ("rb.seed", self.rb.seed)] {
            if seed > i64::MAX as u64 {
                v.push(format!("{name} must be <= {} to fit a TOML integer (got {seed})", i64::MAX));
            }
        }
        v.extend(self.gate.validate("gate."));
        v.extend(self.noise.validate("noise."));
        v.extend(self.alphas.validate("alphas."));
        if self.alphas.get(self.gate.loops).is_none() && self.noise.motional_tau.is_finite() {
            v.push(format!("alphas: no entry for gate.loops = {}", self.gate.loops));
        }
        if let Some(s) = &self.scattering {
            v.extend(s.validate("scattering."));
        }
        v.extend(self.spin_echo.validate("spin_echo."));
        v.extend(self.readout.validate("readout."));
        v.extend(self.rb.validate("rb."));
        v.extend(self.rb_noise.validate("rb_noise."));
        let p = &self.parity;
        if !(0.0..=1.0).contains(&p.contrast) || p.c0.abs() + p.contrast > 1.0 {
            v.push(format!("parity.contrast must satisfy 0 <= C and |C0| + C <= 1 (got {}, {})", p.contrast, p.c0));
        }
        if !(0.0..=1.0).contains(&p.psum) {
            v.push(format!("parity.psum must lie in [0, 1] (got {})", p.psum));
        }
        if p.n_phases < 8 || p.shots == 0 || p.n_datasets < 2 {
            v.push("parity needs n_phases >= 8, shots >= 1 and n_datasets >= 2".into());
        }
        if !(p.epsilon_se >= 0.0 && p.epsilon_se_err >= 0.0) {
            v.push("parity.epsilon_se and epsilon_se_err must be >= 0".into());
        }
        let m = &self.multigate;
        if !(m.per_gate_error >= 0.0 && m.per_gate_error < 0.5 && m.drift_frac.abs() < 0.05 && m.max_gates >= 3) {
            v.push("multigate needs 0 <= per_gate_error < 0.5, |drift_frac| < 0.05 and max_gates >= 3".into());
        }
        v.extend(self.sweep.validate("sweep."));
        let paths = self.numeric_paths();
        for key in self.provenance.keys() {
            if !paths.iter().any(|p| covers(key, p)) {
                v.push(format!("provenance.{key} does not name a numeric parameter"));
            }
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Key paths of all numeric values, excluding the provenance table itself.
    pub fn numeric_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(self) {
            for (k, v) in map {
                if k != "provenance" {
                    collect_paths(&k, &v, &mut out);
                }
            }
        }
        out
    }

    /// Numeric parameters with no provenance entry on themselves or an ancestor.
    pub fn missing_provenance(&self) -> Vec<String> {
        self.numeric_paths().into_iter().filter(|p| !self.provenance.keys().any(|k| covers(k, p))).collect()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    /// Lowercase hex SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

fn covers(key: &str, path: &str) -> bool {
    path == key || path.strip_prefix(key).is_some_and(|rest| rest.starts_with('.') || rest.starts_with('['))
}

fn collect_paths(prefix: &str, v: &serde_json::Value, out: &mut Vec<String>) {
    use serde_json::Value;
    match v {
        Value::Number(_) => out.push(prefix.to_string()),
        Value::Object(m) => {
            for (k, x) in m {
                collect_paths(&format!("{prefix}.{k}"), x, out);
            }
        }
        Value::Array(a) if a.iter().all(Value::is_number) => {
            if !a.is_empty() {
                out.push(prefix.to_string());
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                collect_paths(&format!("{prefix}[{i}]"), x, out);
            }
        }
        _ => {}
    }
}

/// Read and validate a TOML configuration; unknown keys are rejected.
pub fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = ExperimentConfig::from_toml(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    cfg.check()?;
    Ok(cfg)
}

/// Scattering error assigned to the 100 µs gate.
pub const SCATTERING_ANCHOR: f64 = 0.4e-3;
/// Fraction of the scattering anchor attributed to Raman scattering.
pub const RAMAN_FRACTION: f64 = 0.75;
/// Spin-dephasing error assigned to the 100 µs gate.
pub const SPIN_DEPHASING_ANCHOR: f64 = 0.2e-3;
/// Mean off-resonant error of unshaped pulses used to set Ω_ls.
pub const UNSHAPED_OFFRESONANT_TARGET: f64 = 4e-3;

fn tag(map: &mut BTreeMap<String, Provenance>, p: Provenance, keys: &[&str]) {
    for k in keys {
        map.insert((*k).to_string(), p);
    }
}

fn base_provenance() -> BTreeMap<String, Provenance> {
    use Provenance::*;
    let mut m = BTreeMap::new();
    tag(
        &mut m,
        Measured,
        &[
            "gate.eta_gate",
            "gate.eta_spec",
            "gate.t_g",
            "gate.loops",
            "gate.delta_g",
            "gate.ramp_time",
            "gate.carrier_reduction",
            "gate.raman_detuning_meta",
            "gate.axial_freq",
            "noise.nbar_gate",
            "noise.nbar_spec",
            "noise.heating_rate",
            "noise.motional_tau",
            "noise.intensity_drift_frac",
            "spin_echo.rabi_mw",
            "spin_echo.delta_f",
            "readout.detect_time",
            "readout.shelf_lifetime",
            "apparatus",
            "parity.contrast",
            "parity.psum",
            "parity.epsilon_se",
            "parity.epsilon_se_err",
            "multigate.per_gate_error",
            "multigate.drift_frac",
            "sweep.t_min",
            "sweep.t_max",
            "rb.n_sequences",
            "rb.shots",
            "rb.pulse_duration",
        ],
    );
    tag(
        &mut m,
        Calibrated,
        &[
            "gate.rabi",
            "gate.lightshift_amp",
            "noise.spin_dephasing_coeff",
            "noise.raman_rate",
            "noise.rayleigh_deph_rate",
            "scattering",
            "alphas",
            "readout.shelve_error",
            "readout.thresholds",
            "rb_noise.depolarizing_per_gate",
        ],
    );
    tag(
        &mut m,
        Assumed,
        &[
            "seed",
            "gate.optical_phase",
            "gate.detuning_trim",
            "spin_echo.phases",
            "readout.bright_rate",
            "readout.dark_rate",
            "readout.prep_error",
            "rb.sequence_lengths",
            "rb.seed",
            "rb.phase_offset",
            "rb_noise.detuning_error",
            "rb_noise.amplitude_error_frac",
            "rb_noise.measurement_error",
            "parity.c0",
            "parity.phi0",
            "parity.n_phases",
            "parity.shots",
            "parity.n_datasets",
            "multigate.max_gates",
            "sweep.points",
        ],
    );
    m
}

fn gate_for(t_g: f64, loops: u32, ramp_time: f64) -> Result<GateConfig> {
    let mut rect = GateConfig::new(100e-6, 2);
    rect.lightshift_amp = 0.0;
    let amp = calibrate_lightshift_amp(&rect, UNSHAPED_OFFRESONANT_TARGET, crate::budget::table::OFF_RESONANT_PHASES)?;
    let mut g = GateConfig::new(t_g, loops);
    g.shape = ShapeKind::SmoothRamp;
    g.ramp_time = ramp_time;
    g.lightshift_amp = amp;
    Ok(g)
}

/// Noise rates of the 100 µs anchor gate.
fn anchor_noise(anchor_gate: &GateConfig) -> Result<NoiseParams> {
    let f = raman_coherence_factor(anchor_gate)?;
    let (raman_rate, rayleigh_deph_rate) = anchor_rates(SCATTERING_ANCHOR, RAMAN_FRACTION, anchor_gate.t_g, f)?;
    Ok(NoiseParams {
        nbar_gate: 0.02,
        nbar_spec: 0.02,
        heating_rate: 2.2,
        motional_tau: 0.2,
        spin_dephasing_coeff: spin_dephasing_beta(SPIN_DEPHASING_ANCHOR, anchor_gate.t_g)?,
        raman_rate,
        rayleigh_deph_rate,
        intensity_drift_frac: 0.005,
        correlated_rayleigh: false,
    })
}

fn table1(name: &str) -> Result<ExperimentConfig> {
    let gate = gate_for(100e-6, 2, 1.5e-6)?;
    let noise = anchor_noise(&gate)?;
    let sweep = Sweep::default();
    let anchor = RatePoint { t_g: gate.t_g, raman_rate: noise.raman_rate, rayleigh_rate: noise.rayleigh_deph_rate };
    let mut grid = sweep.grid();
    grid.push(gate.t_g);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(ExperimentConfig {
        name: name.to_string(),
        seed: 1,
        scattering: Some(ScatteringModel::power_law(anchor, &grid)),
        gate,
        noise,
        alphas: AlphaTable::default(),
        spin_echo: SpinEchoConfig::default(),
        readout: ReadoutModel::default(),
        rb: RbPlan { seed: 1, ..RbPlan::default() },
        rb_noise: NoiseModel1Q::default(),
        parity: ParityStudy::default(),
        multigate: MultiGateSettings::default(),
        sweep,
        apparatus: Apparatus::default(),
        provenance: base_provenance(),
    })
}

/// Build a named profile.
pub fn builtin_profile(name: &str) -> Result<ExperimentConfig> {
    match name {
        "table1-100us" => table1(name),
        "fast-gate-3.8us" => {
            let mut cfg = table1(name)?;
            cfg.gate = gate_for(3.8e-6, 1, 0.2e-6)?;
            let (r, e) = cfg.scattering_model().rates(cfg.gate.t_g)?;
            cfg.noise.raman_rate = r;
            cfg.noise.rayleigh_deph_rate = e;
            cfg.alphas = AlphaTable::default();
            cfg.provenance.insert("gate.loops".into(), Provenance::Assumed);
            cfg.provenance.insert("gate.ramp_time".into(), Provenance::Assumed);
            Ok(cfg)
        }
        "rbm-paper" => {
            let mut cfg = table1(name)?;
            cfg.rb_noise = NoiseModel1Q::depolarizing(0.066e-3);
            Ok(cfg)
        }
        _ => Err(Error::Config(format!("unknown profile '{name}' (known: {})", PROFILE_NAMES.join(", ")))),
    }
}

/// All built-in profiles in [`PROFILE_NAMES`] order.
pub fn builtin_profiles() -> Result<Vec<ExperimentConfig>> {
    PROFILE_NAMES.iter().map(|n| builtin_profile(n)).collect()
}

/// JSON result record: outputs plus the configuration hash, seed and versions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub config_hash: String,
    pub seed: u64,
    pub outputs: serde_json::Value,
    pub versions: BTreeMap<String, String>,
}

impl ResultEnvelope {
    pub fn new<T: Serialize>(cfg: &ExperimentConfig, outputs: &T) -> Result<Self> {
        Ok(Self {
            config_hash: cfg.hash()?,
            seed: cfg.seed,
            outputs: serde_json::to_value(outputs)?,
            versions: BTreeMap::from([("iongate".to_string(), env!("CARGO_PKG_VERSION").to_string())]),
        })
    }
}
