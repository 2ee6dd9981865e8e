//! Experiment configuration: a strict TOML schema that maps onto the core
//! types. Unknown keys are rejected so typos fail loudly, and every
//! validation error names the offending field.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use nmrc_core::baseline::{DelayWindowConfig, SymbolEncoding};
use nmrc_core::efficiency::{cmos_reference, nanomagnet_reference, PlatformMetrics};
use nmrc_core::magnet::ParameterSet;
use nmrc_core::reservoir::{build_layout, LayoutKind, ReservoirLayout, SymbolProtocol};
use nmrc_core::tasks::{
    gen_boolean_dataset, gen_eca_observer_dataset, gen_waveform_dataset, Boundary, EcaConfig,
    TaskDataset,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Waveform,
    Boolean,
    EcaObserver,
    Baseline,
    Efficiency,
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Waveform => "waveform",
            TaskKind::Boolean => "boolean",
            TaskKind::EcaObserver => "eca-observer",
            TaskKind::Baseline => "baseline",
            TaskKind::Efficiency => "efficiency",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    /// waveform-grid | boolean-grid-35 | observer-grid-200 | custom;
    /// omitted means the task's canonical layout.
    pub kind: Option<String>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub symbol_period_s: Option<f64>,
    pub pulse_duration_s: Option<f64>,
    pub pulse_strength_t: Option<f64>,
    pub sample_offset_s: Option<f64>,
    pub extra_sample_offsets_s: Option<Vec<f64>>,
    pub polarization_cant_rad: Option<f64>,
}

impl ProtocolSection {
    pub fn build(&self, levels: u32) -> SymbolProtocol {
        let mut p = SymbolProtocol::standard_drive(levels);
        if let Some(v) = self.symbol_period_s {
            p.symbol_period_s = v;
        }
        if let Some(v) = self.pulse_duration_s {
            p.pulse_duration_s = v;
        }
        if let Some(v) = self.pulse_strength_t {
            p.pulse_strength_t = v;
        }
        if let Some(v) = self.sample_offset_s {
            p.sample_offset_s = v;
        }
        if let Some(v) = &self.extra_sample_offsets_s {
            p.extra_sample_offsets_s = v.clone();
        }
        if let Some(v) = self.polarization_cant_rad {
            p.polarization_cant_rad = v;
        }
        p
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    /// Named parameter set; defaults to coupled-pma.
    pub set: Option<String>,
    pub ms_a_per_m: Option<f64>,
    pub ku_j_per_m3: Option<f64>,
    pub diameter_m: Option<f64>,
    pub thickness_m: Option<f64>,
    pub pitch_m: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma_rad_per_s_t: Option<f64>,
    pub dt_s: Option<f64>,
    pub temperature_k: Option<f64>,
}

impl PhysicsSection {
    pub fn build(&self) -> Result<ParameterSet, CliError> {
        let name = self.set.as_deref().unwrap_or("coupled-pma");
        let mut params = ParameterSet::by_name(name).ok_or_else(|| {
            CliError::config(format!(
                "physics.set: unknown parameter set {name:?} (known: default-pma, coupled-pma)"
            ))
        })?;
        if let Some(v) = self.ms_a_per_m {
            params.ms_a_per_m = v;
        }
        if let Some(v) = self.ku_j_per_m3 {
            params.ku_j_per_m3 = v;
        }
        if let Some(v) = self.diameter_m {
            params.diameter_m = v;
        }
        if let Some(v) = self.thickness_m {
            params.thickness_m = v;
        }
        if let Some(v) = self.pitch_m {
            params.pitch_m = v;
        }
        if let Some(v) = self.alpha {
            params.alpha = v;
        }
        if let Some(v) = self.gamma_rad_per_s_t {
            params.gamma_rad_per_s_t = v;
        }
        if let Some(v) = self.dt_s {
            params.dt_s = v;
        }
        if let Some(v) = self.temperature_k {
            params.temperature_k = v;
        }
        params
            .llg_params()
            .validate()
            .map_err(|e| CliError::config(format!("physics: {e}")))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformSection {
    pub periods: usize,
}

impl Default for WaveformSection {
    fn default() -> Self {
        WaveformSection { periods: 50 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BooleanSection {
    pub word_bits: u32,
    pub stream_len: usize,
}

impl Default for BooleanSection {
    fn default() -> Self {
        BooleanSection { word_bits: 2, stream_len: 600 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EcaSection {
    pub rule: u16,
    pub width: usize,
    pub observe_stride: usize,
    pub steps: usize,
}

impl Default for EcaSection {
    fn default() -> Self {
        EcaSection { rule: 59, width: 24, observe_stride: 3, steps: 400 }
    }
}

impl EcaSection {
    pub fn build(&self, seed: u64) -> Result<EcaConfig, CliError> {
        if self.rule > 255 {
            return Err(CliError::config(format!(
                "eca.rule: {} is out of the 0-255 rule range",
                self.rule
            )));
        }
        Ok(EcaConfig {
            rule: self.rule as u8,
            width: self.width,
            boundary: Boundary::Periodic,
            steps: self.steps,
            observe_stride: self.observe_stride,
            seed,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineSection {
    /// Which task's dataset the delay-window model trains on.
    pub on: BaselineTask,
    pub window: usize,
    pub encoding: EncodingName,
}

impl Default for BaselineSection {
    fn default() -> Self {
        BaselineSection {
            on: BaselineTask::Boolean,
            window: 2,
            encoding: EncodingName::RawSymbol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineTask {
    Waveform,
    Boolean,
    EcaObserver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingName {
    RawSymbol,
    OneHot,
}

impl BaselineSection {
    pub fn delay_config(&self) -> DelayWindowConfig {
        DelayWindowConfig {
            window: self.window,
            encoding: match self.encoding {
                EncodingName::RawSymbol => SymbolEncoding::RawSymbol,
                EncodingName::OneHot => SymbolEncoding::OneHot,
            },
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    pub area_per_node_m2: Option<f64>,
    pub energy_per_update_j: Option<f64>,
    pub min_period_s: Option<f64>,
    pub node_count: Option<usize>,
}

impl MetricsSection {
    fn apply(&self, mut base: PlatformMetrics) -> PlatformMetrics {
        if let Some(v) = self.area_per_node_m2 {
            base.area_per_node_m2 = v;
        }
        if let Some(v) = self.energy_per_update_j {
            base.energy_per_update_j = v;
        }
        if let Some(v) = self.min_period_s {
            base.min_period_s = v;
        }
        if let Some(v) = self.node_count {
            base.node_count = v;
        }
        base
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfficiencySection {
    #[serde(default)]
    pub nanomagnet: MetricsSection,
    #[serde(default)]
    pub cmos: MetricsSection,
}

impl EfficiencySection {
    pub fn platforms(&self) -> (PlatformMetrics, PlatformMetrics) {
        (self.nanomagnet.apply(nanomagnet_reference()), self.cmos.apply(cmos_reference()))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub pulse_strength_t: Vec<f64>,
    #[serde(default)]
    pub pulse_duration_s: Vec<f64>,
    #[serde(default)]
    pub symbol_period_s: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Dense trajectory recording stride in integrator steps; off when
    /// omitted. The trajectory file grows quickly.
    pub trajectory_every_n_steps: Option<usize>,
    /// Compute the washout diagnostic (one extra full run).
    #[serde(default)]
    pub echo_check: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub layout: LayoutSection,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub physics: PhysicsSection,
    #[serde(default)]
    pub waveform: WaveformSection,
    #[serde(default)]
    pub boolean: BooleanSection,
    #[serde(default)]
    pub eca: EcaSection,
    #[serde(default)]
    pub baseline: BaselineSection,
    #[serde(default)]
    pub efficiency: EfficiencySection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_lambda() -> f64 {
    1e-6
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<(ExperimentConfig, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| {
            CliError::config(format!("config: cannot read {}: {e}", path.display()))
        })?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::config(format!("config: {} is not UTF-8: {e}", path.display())))?;
        let config = Self::parse(text)?;
        Ok((config, bytes))
    }

    /// Symbol alphabet size implied by the task.
    pub fn levels(&self) -> u32 {
        match self.task {
            TaskKind::Waveform => 4,
            _ => match (self.task, self.baseline.on) {
                (TaskKind::Baseline, BaselineTask::Waveform) => 4,
                _ => 2,
            },
        }
    }

    /// The simulated task behind this config; the baseline and efficiency
    /// tasks have none of their own (baseline reuses `baseline.on`).
    pub fn dataset(&self, seed: u64) -> Result<TaskDataset, CliError> {
        let kind = match self.task {
            TaskKind::Baseline => match self.baseline.on {
                BaselineTask::Waveform => TaskKind::Waveform,
                BaselineTask::Boolean => TaskKind::Boolean,
                BaselineTask::EcaObserver => TaskKind::EcaObserver,
            },
            other => other,
        };
        let ds = match kind {
            TaskKind::Waveform => gen_waveform_dataset(self.waveform.periods, seed),
            TaskKind::Boolean => {
                gen_boolean_dataset(self.boolean.word_bits, self.boolean.stream_len, seed)
            }
            TaskKind::EcaObserver => gen_eca_observer_dataset(&self.eca.build(seed)?),
            TaskKind::Baseline | TaskKind::Efficiency => {
                return Err(CliError::config("task: no dataset for this task"))
            }
        };
        ds.map_err(CliError::from)
    }

    pub fn build_layout(&self, params: &ParameterSet) -> Result<ReservoirLayout, CliError> {
        let default_kind = match self.task {
            TaskKind::Waveform => "waveform-grid",
            TaskKind::Boolean => "boolean-grid-35",
            TaskKind::EcaObserver => "observer-grid-200",
            TaskKind::Baseline | TaskKind::Efficiency => {
                return Err(CliError::config("layout: this task runs no reservoir"))
            }
        };
        let kind_name = self.layout.kind.as_deref().unwrap_or(default_kind);
        let kind = match kind_name {
            "waveform-grid" => LayoutKind::WaveformGrid {
                rows: self.layout.rows.unwrap_or(5),
                cols: self.layout.cols.unwrap_or(5),
            },
            "boolean-grid-35" => LayoutKind::BooleanGrid35,
            "observer-grid-200" => LayoutKind::ObserverGrid200,
            "custom" => {
                let file = self.layout.file.clone().ok_or_else(|| {
                    CliError::config("layout.file: required when layout.kind = \"custom\"")
                })?;
                LayoutKind::Custom(file)
            }
            other => {
                return Err(CliError::config(format!(
                    "layout.kind: unknown kind {other:?} (known: waveform-grid, boolean-grid-35, observer-grid-200, custom)"
                )))
            }
        };
        build_layout(&kind, params).map_err(CliError::from)
    }
}
