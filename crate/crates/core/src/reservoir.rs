//! Reservoir plumbing around the macrospin array: benchmark layouts, the
//! symbol drive protocol (spin-torque pulses), sequence execution with
//! per-symbol state sampling, seeded reset, and drive calibration.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::llg::{Integrator, SimState, SttDrive};
use crate::magnet::{Array, MagnetRole, ParameterSet};
use crate::rng;
use crate::vec3::Vec3;

/// Reset tilt applied to every magnet before relaxation, in radians (1
/// degree). The azimuth is seeded; the polar kick destabilizes the uniform
/// state so relaxation lands in a frustrated pattern determined by the seed.
pub const RESET_TILT_RAD: f64 = std::f64::consts::PI / 180.0;
/// Relaxation convergence threshold for reset, |dm/dt| in 1/s.
pub const RESET_TORQUE_TOL: f64 = 1e3;
const RESET_MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayoutKind {
    /// rows x cols grid, one input magnet at the center cell.
    WaveformGrid { rows: usize, cols: usize },
    /// 5 x 7 grid (35 magnets), single input at the center, 34 readouts.
    BooleanGrid35,
    /// 10 x 20 grid (200 magnets), 8 logical inputs each duplicated onto two
    /// separated magnets (16 input magnets), 184 readouts.
    ObserverGrid200,
    /// Layout loaded from a structured text file.
    Custom(PathBuf),
}

/// A validated array plus the input fan-out and readout index sets.
#[derive(Debug, Clone)]
pub struct ReservoirLayout {
    pub array: Array,
    /// One entry per logical input: the physical magnet ids it drives.
    input_groups: Vec<Vec<usize>>,
    readout_ids: Vec<usize>,
    /// (rows, cols) when the layout is a regular grid, for snapshot export.
    grid: Option<(usize, usize)>,
}

impl ReservoirLayout {
    pub fn new(
        array: Array,
        input_groups: Vec<Vec<usize>>,
        grid: Option<(usize, usize)>,
    ) -> Result<ReservoirLayout> {
        let n = array.len();
        let mut seen = vec![false; n];
        if input_groups.is_empty() {
            return Err(Error::InvalidLayout("layout has no logical inputs".into()));
        }
        for (g, group) in input_groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidLayout(format!("logical input {g} drives no magnets")));
            }
            for &id in group {
                if id >= n {
                    return Err(Error::InvalidLayout(format!(
                        "logical input {g} references magnet {id}, array has {n}"
                    )));
                }
                if seen[id] {
                    return Err(Error::InvalidLayout(format!(
                        "magnet {id} is assigned to more than one logical input"
                    )));
                }
                seen[id] = true;
            }
        }
        let readout_ids: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
        if readout_ids.is_empty() {
            return Err(Error::InvalidLayout("every magnet is an input; nothing to read out".into()));
        }
        Ok(ReservoirLayout { array, input_groups, readout_ids, grid })
    }

    pub fn n_logical_inputs(&self) -> usize {
        self.input_groups.len()
    }

    pub fn input_groups(&self) -> &[Vec<usize>] {
        &self.input_groups
    }

    pub fn input_ids(&self) -> Vec<usize> {
        self.input_groups.iter().flatten().copied().collect()
    }

    pub fn readout_ids(&self) -> &[usize] {
        &self.readout_ids
    }

    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        self.grid
    }
}

/// Builds one of the named grid layouts from a parameter set. Input magnets
/// carry the Input role; everything else is a readout magnet.
pub fn build_layout(kind: &LayoutKind, params: &ParameterSet) -> Result<ReservoirLayout> {
    match kind {
        LayoutKind::WaveformGrid { rows, cols } => {
            if *rows == 0 || *cols == 0 {
                return Err(Error::InvalidLayout("grid dimensions must be positive".into()));
            }
            let center = (rows / 2) * cols + cols / 2;
            grid_layout(params, *rows, *cols, &[vec![center]])
        }
        LayoutKind::BooleanGrid35 => {
            let (rows, cols) = (5, 7);
            let center = (rows / 2) * cols + cols / 2; // magnet 17 of 35
            grid_layout(params, rows, cols, &[vec![center]])
        }
        LayoutKind::ObserverGrid200 => {
            let (rows, cols) = (10, 20);
            // Each logical input drives two magnets on separated rows; the
            // copies are offset by one column so their influence cones
            // interleave.
            let groups: Vec<Vec<usize>> = (0..8)
                .map(|k| vec![2 * cols + (2 + 2 * k), 7 * cols + (3 + 2 * k)])
                .collect();
            grid_layout(params, rows, cols, &groups)
        }
        LayoutKind::Custom(path) => crate::io::load_layout(path),
    }
}

fn grid_layout(
    params: &ParameterSet,
    rows: usize,
    cols: usize,
    input_groups: &[Vec<usize>],
) -> Result<ReservoirLayout> {
    let input_set: Vec<usize> = input_groups.iter().flatten().copied().collect();
    let mut magnets = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            let role =
                if input_set.contains(&id) { MagnetRole::Input } else { MagnetRole::Readout };
            let pos = Vec3::new(c as f64 * params.pitch_m, r as f64 * params.pitch_m, 0.0);
            magnets.push(params.magnet_at(pos, role));
        }
    }
    ReservoirLayout::new(Array::new(magnets)?, input_groups.to_vec(), Some((rows, cols)))
}

/// Drive protocol for one symbol slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolProtocol {
    pub symbol_period_s: f64,
    /// Pulse occupies the start of the period.
    pub pulse_duration_s: f64,
    /// Full-scale spin-torque strength a_J in tesla.
    pub pulse_strength_t: f64,
    /// Symbols per logical input; 2 for binary.
    pub levels: u32,
    /// Primary sampling instant within the period; defaults to the period
    /// end.
    pub sample_offset_s: f64,
    /// Additional sampling instants within the period. Each extra tap
    /// appends another m_z block to the per-symbol sample, widening the
    /// feature vector: the flip cascade's intermediate states carry
    /// information the settled end-of-period state has already forgotten.
    pub extra_sample_offsets_s: Vec<f64>,
    /// Fixed cant of the polarization away from the z axis, radians. A few
    /// degrees keeps the torque finite when a magnet sits exactly
    /// antiparallel to the polarizer.
    pub polarization_cant_rad: f64,
}

impl SymbolProtocol {
    /// Benchmark drive for the coupled-pma operating point: an 8 mT
    /// half-period pulse switches the input within ~10 ns and the triggered
    /// flip cascade settles well before the period-end sample. A mid-period
    /// tap at pulse-off catches the cascade in flight.
    pub fn standard_drive(levels: u32) -> SymbolProtocol {
        SymbolProtocol {
            symbol_period_s: 32e-9,
            pulse_duration_s: 16e-9,
            pulse_strength_t: 8e-3,
            levels,
            sample_offset_s: 32e-9,
            extra_sample_offsets_s: vec![16e-9],
            polarization_cant_rad: 0.12,
        }
    }

    pub fn validate(&self, dt_s: f64) -> Result<()> {
        if !(self.symbol_period_s > 0.0) {
            return Err(Error::invalid_field("symbol_period_s", "must be > 0"));
        }
        if !(self.pulse_duration_s >= 0.0 && self.pulse_duration_s <= self.symbol_period_s) {
            return Err(Error::invalid_field(
                "pulse_duration_s",
                "must lie in [0, symbol_period_s]",
            ));
        }
        if !(self.sample_offset_s > 0.0 && self.sample_offset_s <= self.symbol_period_s) {
            return Err(Error::invalid_field(
                "sample_offset_s",
                "must lie in (0, symbol_period_s]",
            ));
        }
        for &extra in &self.extra_sample_offsets_s {
            if !(extra > 0.0 && extra <= self.symbol_period_s) {
                return Err(Error::invalid_field(
                    "extra_sample_offsets_s",
                    "every tap must lie in (0, symbol_period_s]",
                ));
            }
        }
        let steps = self.sample_steps(dt_s);
        if steps.len() != self.extra_sample_offsets_s.len() + 1 {
            return Err(Error::invalid_field(
                "extra_sample_offsets_s",
                "taps collide after rounding to whole time steps",
            ));
        }
        if !(self.pulse_strength_t >= 0.0) {
            return Err(Error::invalid_field("pulse_strength_t", "must be >= 0"));
        }
        if self.levels < 2 {
            return Err(Error::invalid_field("levels", "need at least 2 symbol levels"));
        }
        if !(self.polarization_cant_rad >= 0.0 && self.polarization_cant_rad < 0.5) {
            return Err(Error::invalid_field("polarization_cant_rad", "must lie in [0, 0.5)"));
        }
        if self.symbol_period_s < dt_s {
            return Err(Error::invalid_field("symbol_period_s", "shorter than one time step"));
        }
        Ok(())
    }

    pub fn steps_per_symbol(&self, dt_s: f64) -> usize {
        (self.symbol_period_s / dt_s).round().max(1.0) as usize
    }

    /// Readout values recorded per symbol per readout magnet.
    pub fn taps(&self) -> usize {
        self.extra_sample_offsets_s.len() + 1
    }

    fn pulse_steps(&self, dt_s: f64) -> usize {
        ((self.pulse_duration_s / dt_s).round() as usize).min(self.steps_per_symbol(dt_s))
    }

    /// Sampling steps within the period, ascending and deduplicated.
    fn sample_steps(&self, dt_s: f64) -> Vec<usize> {
        let max = self.steps_per_symbol(dt_s);
        let to_step = |offset: f64| ((offset / dt_s).round() as usize).clamp(1, max);
        let mut steps: Vec<usize> = self
            .extra_sample_offsets_s
            .iter()
            .copied()
            .chain(std::iter::once(self.sample_offset_s))
            .map(to_step)
            .collect();
        steps.sort_unstable();
        steps.dedup();
        steps
    }
}

/// Maps a symbol in [0, levels) to the signed drive on one logical input's
/// magnets. The top symbol is a full-strength pulse toward +z, the bottom
/// symbol the mirror pulse toward -z, intermediate symbols interpolate
/// linearly. The middle symbol of an odd level count produces no drive.
pub fn encode_symbol(
    symbol: u32,
    protocol: &SymbolProtocol,
    group: &[usize],
) -> Result<Vec<SttDrive>> {
    if symbol >= protocol.levels {
        return Err(Error::invalid_field(
            "symbol",
            format!("symbol {symbol} out of range for {} levels", protocol.levels),
        ));
    }
    let signed = 2.0 * symbol as f64 / (protocol.levels - 1) as f64 - 1.0;
    let strength = protocol.pulse_strength_t * signed.abs();
    let cant = protocol.polarization_cant_rad;
    let polarization =
        Vec3::new(cant.sin(), 0.0, cant.cos() * signed.signum()).normalized();
    Ok(group
        .iter()
        .map(|&magnet| SttDrive { magnet, strength_t: strength, polarization })
        .collect())
}

/// One per-symbol observation of the readout magnets.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSample {
    /// Instant of the last tap of this symbol.
    pub time_s: f64,
    pub symbol_index: usize,
    /// m_z of each readout magnet in layout readout order, one block per
    /// sampling tap in ascending tap order; values in [-1, 1].
    pub m_z: Vec<f64>,
}

/// Trajectory recording policy for run_sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recording {
    Off,
    /// Record the full magnetization every n steps (and the initial state).
    EveryN(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub time_s: f64,
    pub m: Vec<Vec3>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub samples: Vec<StateSample>,
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Drives the reservoir through a symbol sequence. `symbols` is time-major:
/// one row per symbol slot, one entry per logical input. Produces exactly
/// one sample per symbol, holding one readout block per sampling tap.
pub fn run_sequence(
    layout: &ReservoirLayout,
    protocol: &SymbolProtocol,
    integ: &mut Integrator,
    state: &mut SimState,
    symbols: &[Vec<u32>],
    b_ext: Vec3,
    recording: Recording,
) -> Result<RunRecord> {
    let dt = integ.params().dt_s;
    protocol.validate(dt)?;
    let steps = protocol.steps_per_symbol(dt);
    let pulse_steps = protocol.pulse_steps(dt);
    let sample_steps = protocol.sample_steps(dt);

    let mut samples = Vec::with_capacity(symbols.len());
    let mut trajectory = Vec::new();
    if let Recording::EveryN(n) = recording {
        if n == 0 {
            return Err(Error::invalid_field("recording", "stride must be > 0"));
        }
        trajectory.push(TrajectoryPoint { time_s: state.time_s, m: state.m.clone() });
    }

    let mut drives = Vec::new();
    for (t, row) in symbols.iter().enumerate() {
        if row.len() != layout.n_logical_inputs() {
            return Err(Error::DimensionMismatch(format!(
                "symbol row {t} has {} entries, layout has {} logical inputs",
                row.len(),
                layout.n_logical_inputs()
            )));
        }
        drives.clear();
        for (g, &sym) in row.iter().enumerate() {
            drives.extend(encode_symbol(sym, protocol, &layout.input_groups[g])?);
        }
        let mut m_z = Vec::with_capacity(sample_steps.len() * layout.readout_ids.len());
        let mut last_tap_time = state.time_s;
        for k in 0..steps {
            let active: &[SttDrive] = if k < pulse_steps { &drives } else { &[] };
            integ.step(&layout.array, state, active, b_ext)?;
            if let Recording::EveryN(n) = recording {
                if (k + 1) % n == 0 {
                    trajectory.push(TrajectoryPoint { time_s: state.time_s, m: state.m.clone() });
                }
            }
            if sample_steps.binary_search(&(k + 1)).is_ok() {
                m_z.extend(layout.readout_ids.iter().map(|&i| state.m[i].z));
                last_tap_time = state.time_s;
            }
        }
        samples.push(StateSample { time_s: last_tap_time, symbol_index: t, m_z });
    }
    Ok(RunRecord { samples, trajectory })
}

/// Deterministic initial condition: every magnet starts along +z with a
/// seeded 1-degree transverse kick, then the array relaxes with drives off.
/// In the frustrated coupling window the uniform state is unstable, so the
/// relaxed pattern is a seed-dependent checkerboard-like configuration.
pub fn reset(
    layout: &ReservoirLayout,
    integ: &mut Integrator,
    seed: u64,
    b_ext: Vec3,
) -> Result<SimState> {
    let mut rng = rng::from_seed(seed);
    let tilt = RESET_TILT_RAD;
    let dirs: Vec<Vec3> = (0..layout.array.len())
        .map(|_| {
            let phi = 2.0 * std::f64::consts::PI * rng::uniform01(&mut rng);
            Vec3::new(tilt.sin() * phi.cos(), tilt.sin() * phi.sin(), tilt.cos())
        })
        .collect();
    let mut state = SimState::from_directions(dirs);
    integ.relax(&layout.array, &mut state, b_ext, RESET_TORQUE_TOL, RESET_MAX_STEPS)?;
    state.time_s = 0.0;
    Ok(state)
}

/// Write-quality diagnostic. Drives symbol 1 then symbol 0 on every logical
/// input from a fresh reset and returns the minimum over both pulses of the
/// signed input magnetization at the instant each pulse ends (m_z for the
/// symbol-1 pulse, -m_z for the symbol-0 pulse). The write is judged at
/// pulse completion deliberately: in the coupled regime the array pulls a
/// written input back toward its texture during the free rest of the period,
/// and that relaxation is reservoir dynamics, not drive weakness. Values
/// near 1 mean clean writes; at or below 0 the pulse cannot even steer the
/// input sign.
pub fn write_saturation(
    layout: &ReservoirLayout,
    protocol: &SymbolProtocol,
    integ: &mut Integrator,
    seed: u64,
) -> Result<f64> {
    let dt = integ.params().dt_s;
    protocol.validate(dt)?;
    let steps = protocol.steps_per_symbol(dt);
    let pulse_steps = protocol.pulse_steps(dt);
    if pulse_steps == 0 {
        // No pulse window, nothing is ever written.
        return Ok(-1.0);
    }
    let input_ids = layout.input_ids();
    let mut state = reset(layout, integ, seed, Vec3::ZERO)?;
    let mut worst = f64::INFINITY;
    for (symbol, sign) in [(1u32, 1.0), (0u32, -1.0)] {
        let mut drives = Vec::new();
        for group in &layout.input_groups {
            drives.extend(encode_symbol(symbol, protocol, group)?);
        }
        for k in 0..steps {
            let active: &[SttDrive] = if k < pulse_steps { &drives } else { &[] };
            integ.step(&layout.array, &mut state, active, Vec3::ZERO)?;
            if k + 1 == pulse_steps {
                let reached = input_ids
                    .iter()
                    .map(|&i| sign * state.m[i].z)
                    .fold(f64::INFINITY, f64::min);
                worst = worst.min(reached);
            }
        }
    }
    Ok(worst)
}

/// Grid-searches pulse strength and duration (ascending, strength-major) and
/// returns the protocol of the weakest drive whose write pulses steer every
/// input magnet to signed m_z >= `target` at pulse completion for both
/// binary symbols, per [`write_saturation`].
pub fn calibrate_drive(
    layout: &ReservoirLayout,
    base: &SymbolProtocol,
    integ: &mut Integrator,
    strengths_t: &[f64],
    durations_s: &[f64],
    target: f64,
    seed: u64,
) -> Result<SymbolProtocol> {
    if strengths_t.is_empty() || durations_s.is_empty() {
        return Err(Error::invalid_field("calibration grid", "must be non-empty"));
    }
    let mut best = f64::NEG_INFINITY;
    for &strength in strengths_t {
        for &duration in durations_s {
            let candidate = SymbolProtocol {
                pulse_strength_t: strength,
                pulse_duration_s: duration,
                levels: 2,
                ..base.clone()
            };
            let worst = write_saturation(layout, &candidate, integ, seed)?;
            best = best.max(worst);
            if worst >= target {
                return Ok(candidate);
            }
        }
    }
    Err(Error::CalibrationFailed { target, best })
}

/// Echo-state diagnostic: L2 distance between the final readout samples of
/// two runs that differ only in the first symbol. Small values indicate the
/// initial perturbation has washed out. Reported, never asserted.
pub fn echo_state_distance(
    layout: &ReservoirLayout,
    protocol: &SymbolProtocol,
    integ: &mut Integrator,
    seed: u64,
    symbols: &[Vec<u32>],
) -> Result<f64> {
    if symbols.is_empty() {
        return Err(Error::DimensionMismatch("empty symbol sequence".into()));
    }
    let mut altered = symbols.to_vec();
    for s in altered[0].iter_mut() {
        *s = protocol.levels - 1 - *s;
    }
    let run = |integ: &mut Integrator, seq: &[Vec<u32>]| -> Result<Vec<f64>> {
        let mut state = reset(layout, integ, seed, Vec3::ZERO)?;
        let rec =
            run_sequence(layout, protocol, integ, &mut state, seq, Vec3::ZERO, Recording::Off)?;
        Ok(rec.samples.last().expect("non-empty sequence").m_z.clone())
    };
    let a = run(integ, symbols)?;
    let b = run(integ, &altered)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}
