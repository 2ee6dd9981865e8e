//! Subcommand implementations. Artifact contents are deterministic given
//! (config bytes, seed); stdout repeats the run summary for interactive use.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nmrc_core::baseline::run_baseline;
use nmrc_core::efficiency::{
    cmos_reference, nanomagnet_reference, ratio_report, PlatformMetrics,
};
use nmrc_core::io::{
    load_layout, samples_to_csv, snapshot_to_csv, symbols_to_csv, trajectory_to_csv,
};
use nmrc_core::llg::{Integrator, SimState};
use nmrc_core::magnet::ParameterSet;
use nmrc_core::reservoir::{
    build_layout, calibrate_drive, reset, LayoutKind, Recording, ReservoirLayout, SymbolProtocol,
};
use nmrc_core::tasks::{
    eca_observer_table, run_task, run_task_with, RunOptions, TaskDataset, TaskReport,
};
use nmrc_core::Vec3;

use crate::artifacts::{manifest_header, sha256_hex, ArtifactWriter};
use crate::config::{EncodingName, ExperimentConfig, TaskKind};
use crate::CliError;

pub fn cmd_run(
    config_path: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let (mut config, bytes) = ExperimentConfig::load(config_path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    let out_dir = resolve_out_dir(out, &config)?;
    let mut writer = ArtifactWriter::create(&out_dir)?;
    let digest = sha256_hex(&bytes);

    let summary = match config.task {
        TaskKind::Efficiency => {
            let (nano, cmos) = config.efficiency.platforms();
            write_efficiency(&mut writer, &nano, &cmos)?
        }
        TaskKind::Baseline => {
            let task = config.dataset(config.seed)?;
            let report = run_baseline(&task, &config.baseline.delay_config(), config.lambda)?;
            let mut text = report.summary();
            let _ = writeln!(text, "seed: {}", config.seed);
            let _ = writeln!(text, "window: {}", config.baseline.window);
            let _ = writeln!(text, "encoding: {}", encoding_name(config.baseline.encoding));
            writer.write("report.txt", &text)?;
            writer.write("per_target_accuracy.csv", &report.per_target_csv())?;
            writer.write("inputs.csv", &symbols_to_csv(&task.time_major_rows()))?;
            text
        }
        _ => {
            let run = run_reservoir(&config)?;
            write_reservoir_artifacts(&mut writer, &run, &config)?
        }
    };
    let dir = writer.finish(&manifest_header(&digest, Some(config.seed), config.task.name()))?;
    print!("{summary}");
    println!("artifacts: {}", dir.display());
    Ok(())
}

struct ReservoirRun {
    report: TaskReport,
    layout: ReservoirLayout,
    task: TaskDataset,
    protocol: SymbolProtocol,
    params: ParameterSet,
}

fn run_reservoir(config: &ExperimentConfig) -> Result<ReservoirRun, CliError> {
    let params = config.physics.build()?;
    let layout = config.build_layout(&params)?;
    let protocol = config.protocol.build(config.levels());
    protocol.validate(params.dt_s)?;
    let task = config.dataset(config.seed)?;
    let options = RunOptions {
        recording: match config.output.trajectory_every_n_steps {
            Some(n) => Recording::EveryN(n),
            None => Recording::Off,
        },
        echo_check: config.output.echo_check,
    };
    let report = run_task_with(&task, &layout, &protocol, &params, config.lambda, &options)?;
    Ok(ReservoirRun { report, layout, task, protocol, params })
}

fn write_reservoir_artifacts(
    writer: &mut ArtifactWriter,
    run: &ReservoirRun,
    config: &ExperimentConfig,
) -> Result<String, CliError> {
    let mut text = run.report.summary();
    let _ = writeln!(text, "seed: {}", config.seed);
    let _ = writeln!(text, "parameter_set: {}", run.params.name);
    let _ = writeln!(text, "n_magnets: {}", run.layout.array.len());
    let _ = writeln!(text, "readouts: {}", run.layout.readout_ids().len());
    let _ = writeln!(text, "taps_per_symbol: {}", run.protocol.taps());
    let _ = writeln!(text, "symbol_period_s: {:e}", run.protocol.symbol_period_s);
    let _ = writeln!(text, "pulse_duration_s: {:e}", run.protocol.pulse_duration_s);
    let _ = writeln!(text, "pulse_strength_t: {:e}", run.protocol.pulse_strength_t);
    writer.write("report.txt", &text)?;
    writer.write("per_target_accuracy.csv", &run.report.per_target_csv())?;
    writer
        .write("transient.csv", &samples_to_csv(&run.report.samples, run.layout.readout_ids()))?;
    writer.write("inputs.csv", &symbols_to_csv(&run.task.time_major_rows()))?;
    let initial = SimState::from_directions(run.report.initial_m.clone());
    let settled = SimState::from_directions(run.report.final_m.clone());
    writer.write("snapshot_initial.csv", &snapshot_to_csv(&run.layout, &initial))?;
    writer.write("snapshot_final.csv", &snapshot_to_csv(&run.layout, &settled))?;
    if !run.report.trajectory.is_empty() {
        writer.write(
            "trajectory.csv",
            &trajectory_to_csv(&run.report.trajectory, run.layout.array.len()),
        )?;
    }
    if config.task == TaskKind::EcaObserver {
        let table = eca_observer_table(&config.eca.build(config.seed)?)?;
        writer.write("eca_table.csv", &cells_to_csv(&table))?;
    }
    Ok(text)
}

fn cells_to_csv(table: &[Vec<u8>]) -> String {
    let mut out = String::new();
    for row in table {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn encoding_name(e: EncodingName) -> &'static str {
    match e {
        EncodingName::RawSymbol => "raw-symbol",
        EncodingName::OneHot => "one-hot",
    }
}

fn resolve_out_dir(cli: Option<&Path>, config: &ExperimentConfig) -> Result<PathBuf, CliError> {
    cli.map(Path::to_path_buf).or_else(|| config.out_dir.clone()).ok_or_else(|| {
        CliError::config("output directory: pass --out or set out_dir in the config")
    })
}

pub fn cmd_relax(
    layout_path: Option<&Path>,
    out: &Path,
    seed: u64,
    set: &str,
) -> Result<(), CliError> {
    let params = ParameterSet::by_name(set).ok_or_else(|| {
        CliError::config(format!(
            "--set: unknown parameter set {set:?} (known: default-pma, coupled-pma)"
        ))
    })?;
    let layout = match layout_path {
        Some(p) => load_layout(p)?,
        None => build_layout(&LayoutKind::BooleanGrid35, &params)?,
    };
    let mut writer = ArtifactWriter::create(out)?;
    let mut integ = Integrator::new(params.llg_params(), layout.array.len())?;
    let state = reset(&layout, &mut integ, seed, Vec3::ZERO)?;
    let summary = frustration_summary(&layout, &state, seed, &params);
    writer.write("relax_report.txt", &summary)?;
    writer.write("snapshot.csv", &snapshot_to_csv(&layout, &state))?;
    let dir = writer.finish(&manifest_header("-", Some(seed), "relax"))?;
    print!("{summary}");
    println!("artifacts: {}", dir.display());
    Ok(())
}

/// Counts adjacent pairs by relative spin orientation. Adjacency takes every
/// pair within 1.5x the closest spacing, so on a square grid sides and
/// diagonals both count; a checkerboard then reports its frustrated diagonal
/// pairs in the aligned count.
fn frustration_summary(
    layout: &ReservoirLayout,
    state: &SimState,
    seed: u64,
    params: &ParameterSet,
) -> String {
    let magnets = layout.array.magnets();
    let n = magnets.len();
    let mut min_d = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            min_d = min_d.min((magnets[i].position - magnets[j].position).norm());
        }
    }
    let cutoff = 1.5 * min_d;
    let mut aligned = 0usize;
    let mut antiparallel = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if (magnets[i].position - magnets[j].position).norm() <= cutoff {
                if state.m[i].z * state.m[j].z < 0.0 {
                    antiparallel += 1;
                } else {
                    aligned += 1;
                }
            }
        }
    }
    let pairs = aligned + antiparallel;
    let up = state.m.iter().filter(|m| m.z > 0.0).count();
    let mean_abs = state.m.iter().map(|m| m.z.abs()).sum::<f64>() / n as f64;
    let mut out = String::new();
    let _ = writeln!(out, "task: relax");
    let _ = writeln!(out, "parameter_set: {}", params.name);
    let _ = writeln!(out, "seed: {seed}");
    let _ = writeln!(out, "n_magnets: {n}");
    let _ = writeln!(out, "adjacent_pairs: {pairs}");
    let _ = writeln!(out, "antiparallel_adjacent: {antiparallel}");
    let _ = writeln!(out, "aligned_adjacent: {aligned}");
    let _ = writeln!(
        out,
        "antiparallel_fraction: {:.6}",
        if pairs == 0 { 0.0 } else { antiparallel as f64 / pairs as f64 }
    );
    let _ = writeln!(out, "up_count: {up}");
    let _ = writeln!(out, "mean_abs_mz: {mean_abs:.6}");
    out
}

pub fn cmd_sweep(
    config_path: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    threads: usize,
) -> Result<(), CliError> {
    if threads == 0 {
        return Err(CliError::config("--threads: must be at least 1"));
    }
    let (mut config, bytes) = ExperimentConfig::load(config_path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    if matches!(config.task, TaskKind::Baseline | TaskKind::Efficiency) {
        return Err(CliError::config(
            "sweep: task must drive the reservoir (waveform, boolean, eca-observer)",
        ));
    }
    let out_dir = resolve_out_dir(out, &config)?;
    let params = config.physics.build()?;
    let layout = config.build_layout(&params)?;
    let base = config.protocol.build(config.levels());
    let task = config.dataset(config.seed)?;

    let one_or = |grid: &[f64], base_v: f64| {
        if grid.is_empty() {
            vec![base_v]
        } else {
            grid.to_vec()
        }
    };
    let periods = one_or(&config.sweep.symbol_period_s, base.symbol_period_s);
    let durations_swept = !config.sweep.pulse_duration_s.is_empty();
    let durations = one_or(&config.sweep.pulse_duration_s, base.pulse_duration_s);
    let strengths = one_or(&config.sweep.pulse_strength_t, base.pulse_strength_t);
    let lambdas = one_or(&config.sweep.lambda, config.lambda);

    struct Point {
        period: f64,
        duration: f64,
        strength: f64,
        lambda: f64,
    }
    let mut points = Vec::new();
    for &period in &periods {
        for &duration in &durations {
            for &strength in &strengths {
                for &lambda in &lambdas {
                    points.push(Point { period, duration, strength, lambda });
                }
            }
        }
    }

    enum Row {
        Ok { mean: f64, min: f64 },
        Failed(String),
    }
    let results = run_parallel(&points, threads, |pt| {
        // Sampling instants follow a swept period so the taps keep their
        // position in the protocol; an unswept pulse duration scales along,
        // an explicitly swept one is taken literally.
        let scale = pt.period / base.symbol_period_s;
        let mut protocol = base.clone();
        protocol.symbol_period_s = pt.period;
        protocol.sample_offset_s = base.sample_offset_s * scale;
        for t in protocol.extra_sample_offsets_s.iter_mut() {
            *t *= scale;
        }
        protocol.pulse_duration_s =
            if durations_swept { pt.duration } else { base.pulse_duration_s * scale };
        protocol.pulse_strength_t = pt.strength;
        // A drive that cannot even steer the input signs makes the accuracy
        // column meaningless, so each point is gated on a short write probe
        // and an unwritable drive is recorded as this row's failure. The bar
        // is sign readability, not full saturation: weak-drive points are
        // exactly what a sweep is for.
        let saturates = Integrator::with_thermal_seed(
            params.llg_params(),
            layout.array.len(),
            task.seed,
        )
        .and_then(|mut integ| {
            calibrate_drive(
                &layout,
                &protocol,
                &mut integ,
                &[protocol.pulse_strength_t],
                &[protocol.pulse_duration_s],
                0.05,
                task.seed,
            )
        });
        if let Err(e) = saturates {
            return Row::Failed(e.to_string().replace(',', ";").replace('\n', " "));
        }
        match run_task(&task, &layout, &protocol, &params, pt.lambda) {
            Ok(report) => {
                let min =
                    report.per_target_accuracy.iter().copied().fold(f64::INFINITY, f64::min);
                Row::Ok { mean: report.mean_accuracy, min }
            }
            Err(e) => Row::Failed(e.to_string().replace(',', ";").replace('\n', " ")),
        }
    });

    let mut csv = String::from(
        "index,symbol_period_s,pulse_duration_s,pulse_strength_t,lambda,mean_accuracy,min_accuracy,status\n",
    );
    for (i, (pt, row)) in points.iter().zip(&results).enumerate() {
        let duration = if durations_swept {
            pt.duration
        } else {
            base.pulse_duration_s * pt.period / base.symbol_period_s
        };
        match row {
            Row::Ok { mean, min } => {
                let _ = writeln!(
                    csv,
                    "{i},{:e},{duration:e},{:e},{:e},{mean:e},{min:e},ok",
                    pt.period, pt.strength, pt.lambda
                );
            }
            Row::Failed(msg) => {
                let _ = writeln!(
                    csv,
                    "{i},{:e},{duration:e},{:e},{:e},,,{msg}",
                    pt.period, pt.strength, pt.lambda
                );
            }
        }
    }

    let best = results
        .iter()
        .enumerate()
        .filter_map(|(i, row)| match row {
            Row::Ok { mean, min } => Some((i, *mean, *min)),
            Row::Failed(_) => None,
        })
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal).then(
            // Ties go to the earlier grid point so reruns pick the same row.
            b.0.cmp(&a.0),
        ));

    let mut text = String::new();
    let _ = writeln!(text, "task: {}", config.task.name());
    let _ = writeln!(text, "points: {}", points.len());
    let _ = writeln!(
        text,
        "succeeded: {}",
        results.iter().filter(|r| matches!(r, Row::Ok { .. })).count()
    );
    match best {
        Some((i, mean, min)) => {
            let pt = &points[i];
            let duration = if durations_swept {
                pt.duration
            } else {
                base.pulse_duration_s * pt.period / base.symbol_period_s
            };
            let _ = writeln!(text, "best_index: {i}");
            let _ = writeln!(text, "best_symbol_period_s: {:e}", pt.period);
            let _ = writeln!(text, "best_pulse_duration_s: {duration:e}");
            let _ = writeln!(text, "best_pulse_strength_t: {:e}", pt.strength);
            let _ = writeln!(text, "best_lambda: {:e}", pt.lambda);
            let _ = writeln!(text, "best_mean_accuracy: {mean:.6}");
            let _ = writeln!(text, "best_min_accuracy: {min:.6}");
        }
        None => {
            let _ = writeln!(text, "best_index: none (every point failed)");
        }
    }

    let mut writer = ArtifactWriter::create(&out_dir)?;
    writer.write("sweep.csv", &csv)?;
    writer.write("sweep_report.txt", &text)?;
    let digest = sha256_hex(&bytes);
    let dir = writer.finish(&manifest_header(&digest, Some(config.seed), config.task.name()))?;
    print!("{text}");
    println!("artifacts: {}", dir.display());
    Ok(())
}

/// Runs `f` over `items` on a small worker pool; results come back in item
/// order regardless of scheduling.
fn run_parallel<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    let workers = threads.min(items.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let result = f(&items[i]);
                *slots[i].lock().expect("result slot") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().expect("result slot").expect("worker filled every slot"))
        .collect()
}

pub fn cmd_efficiency(config_path: Option<&Path>, out: &Path) -> Result<(), CliError> {
    let (nano, cmos, digest) = match config_path {
        Some(p) => {
            let (config, bytes) = ExperimentConfig::load(p)?;
            let (n, c) = config.efficiency.platforms();
            (n, c, sha256_hex(&bytes))
        }
        None => (nanomagnet_reference(), cmos_reference(), "-".to_string()),
    };
    let mut writer = ArtifactWriter::create(out)?;
    let summary = write_efficiency(&mut writer, &nano, &cmos)?;
    let dir = writer.finish(&manifest_header(&digest, None, "efficiency"))?;
    print!("{summary}");
    println!("artifacts: {}", dir.display());
    Ok(())
}

fn write_efficiency(
    writer: &mut ArtifactWriter,
    nano: &PlatformMetrics,
    cmos: &PlatformMetrics,
) -> Result<String, CliError> {
    let report = ratio_report(nano, cmos)?;
    let mut text = String::new();
    text.push_str(&platform_lines("candidate", nano));
    text.push_str(&platform_lines("reference", cmos));
    text.push_str(&report.summary());
    writer.write("efficiency_summary.txt", &text)?;
    writer.write("ratios.csv", &report.to_csv())?;
    Ok(text)
}

fn platform_lines(role: &str, m: &PlatformMetrics) -> String {
    format!(
        "{role}: {}\n{role}_nodes: {}\n{role}_area_per_node_m2: {:e}\n\
         {role}_energy_per_update_j: {:e}\n{role}_min_period_s: {:e}\n",
        m.name, m.node_count, m.area_per_node_m2, m.energy_per_update_j, m.min_period_s
    )
}
