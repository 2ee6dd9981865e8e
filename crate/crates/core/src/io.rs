//! File formats: layout files (TOML records), trajectory/snapshot/sample
//! CSVs, and symbol-stream CSVs. All floats are written in exponential
//! shortest-round-trip form so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llg::SimState;
use crate::magnet::{Array, MagnetRole, NanomagnetSpec};
use crate::reservoir::{ReservoirLayout, StateSample, TrajectoryPoint};
use crate::vec3::Vec3;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutFile {
    grid: Option<GridMeta>,
    #[serde(rename = "magnet")]
    magnets: Vec<MagnetRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridMeta {
    rows: usize,
    cols: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MagnetRecord {
    x_nm: f64,
    y_nm: f64,
    #[serde(default)]
    z_nm: f64,
    diameter_nm: f64,
    thickness_nm: f64,
    ms_a_per_m: f64,
    ku_j_per_m3: f64,
    /// Defaults to +z.
    easy_axis: Option<[f64; 3]>,
    /// Logical input index this magnet is driven by; absent for readout
    /// magnets.
    input: Option<usize>,
}

/// Parses a layout from TOML text. `origin` names the source in errors.
pub fn parse_layout(text: &str, origin: &str) -> Result<ReservoirLayout> {
    let file: LayoutFile = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        // toml errors carry line/column spans in their display form.
        detail: e.to_string(),
    })?;

    let mut magnets = Vec::with_capacity(file.magnets.len());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (id, rec) in file.magnets.iter().enumerate() {
        let axis = rec.easy_axis.map_or(Vec3::new(0.0, 0.0, 1.0), |a| Vec3::new(a[0], a[1], a[2]));
        let role = if rec.input.is_some() { MagnetRole::Input } else { MagnetRole::Readout };
        magnets.push(NanomagnetSpec {
            position: Vec3::new(rec.x_nm * 1e-9, rec.y_nm * 1e-9, rec.z_nm * 1e-9),
            diameter_m: rec.diameter_nm * 1e-9,
            thickness_m: rec.thickness_nm * 1e-9,
            ms_a_per_m: rec.ms_a_per_m,
            ku_j_per_m3: rec.ku_j_per_m3,
            easy_axis: axis,
            role,
        });
        if let Some(g) = rec.input {
            if groups.len() <= g {
                groups.resize(g + 1, Vec::new());
            }
            groups[g].push(id);
        }
    }
    if groups.is_empty() {
        return Err(Error::Parse {
            path: origin.to_string(),
            detail: "no magnet carries an `input` index".into(),
        });
    }
    for (g, group) in groups.iter().enumerate() {
        if group.is_empty() {
            return Err(Error::Parse {
                path: origin.to_string(),
                detail: format!("logical input {g} has no magnets (input indices must be dense)"),
            });
        }
    }
    let grid = file.grid.map(|g| (g.rows, g.cols));
    if let Some((rows, cols)) = grid {
        if rows * cols != magnets.len() {
            return Err(Error::Parse {
                path: origin.to_string(),
                detail: format!(
                    "grid is {rows} x {cols} but the file lists {} magnets",
                    magnets.len()
                ),
            });
        }
    }
    ReservoirLayout::new(Array::new(magnets)?, groups, grid)
}

pub fn load_layout(path: &Path) -> Result<ReservoirLayout> {
    let text = std::fs::read_to_string(path)?;
    parse_layout(&text, &path.display().to_string())
}

/// Serializes a layout back to the TOML record format.
pub fn layout_to_toml(layout: &ReservoirLayout) -> String {
    let mut input_of = vec![None; layout.array.len()];
    for (g, group) in layout.input_groups().iter().enumerate() {
        for &id in group {
            input_of[id] = Some(g);
        }
    }
    let records: Vec<MagnetRecord> = layout
        .array
        .magnets()
        .iter()
        .enumerate()
        .map(|(id, m)| MagnetRecord {
            x_nm: m.position.x * 1e9,
            y_nm: m.position.y * 1e9,
            z_nm: m.position.z * 1e9,
            diameter_nm: m.diameter_m * 1e9,
            thickness_nm: m.thickness_m * 1e9,
            ms_a_per_m: m.ms_a_per_m,
            ku_j_per_m3: m.ku_j_per_m3,
            easy_axis: Some([m.easy_axis.x, m.easy_axis.y, m.easy_axis.z]),
            input: input_of[id],
        })
        .collect();
    let file = LayoutFile {
        grid: layout.grid_dims().map(|(rows, cols)| GridMeta { rows, cols }),
        magnets: records,
    };
    toml::to_string(&file).expect("layout serialization cannot fail")
}

pub fn save_layout(layout: &ReservoirLayout, path: &Path) -> Result<()> {
    std::fs::write(path, layout_to_toml(layout))?;
    Ok(())
}

/// Trajectory CSV: `time_s, m0_x, m0_y, m0_z, m1_x, ...`.
pub fn trajectory_to_csv(points: &[TrajectoryPoint], n_magnets: usize) -> String {
    let mut out = String::new();
    out.push_str("time_s");
    for i in 0..n_magnets {
        let _ = write!(out, ",m{i}_x,m{i}_y,m{i}_z");
    }
    out.push('\n');
    for p in points {
        let _ = write!(out, "{:e}", p.time_s);
        for m in &p.m {
            let _ = write!(out, ",{:e},{:e},{:e}", m.x, m.y, m.z);
        }
        out.push('\n');
    }
    out
}

/// Per-symbol readout samples: `time_s, symbol_index, mz_<id>...` with one
/// column per readout magnet. With multiple sampling taps per symbol the
/// magnet columns repeat per tap as `mz_<id>_tap<k>`.
pub fn samples_to_csv(samples: &[StateSample], readout_ids: &[usize]) -> String {
    let taps = samples
        .first()
        .map_or(1, |s| (s.m_z.len() / readout_ids.len().max(1)).max(1));
    let mut out = String::new();
    out.push_str("time_s,symbol_index");
    for tap in 0..taps {
        for id in readout_ids {
            if taps == 1 {
                let _ = write!(out, ",mz_{id}");
            } else {
                let _ = write!(out, ",mz_{id}_tap{tap}");
            }
        }
    }
    out.push('\n');
    for s in samples {
        let _ = write!(out, "{:e},{}", s.time_s, s.symbol_index);
        for v in &s.m_z {
            let _ = write!(out, ",{:e}", v);
        }
        out.push('\n');
    }
    out
}

/// Snapshot of m_z. Grid layouts render as a rows x cols matrix of signed
/// values; other layouts fall back to one `x_m,y_m,z_m,m_z` row per magnet.
pub fn snapshot_to_csv(layout: &ReservoirLayout, state: &SimState) -> String {
    let mut out = String::new();
    match layout.grid_dims() {
        Some((rows, cols)) if rows * cols == state.m.len() => {
            for r in 0..rows {
                let row: Vec<String> =
                    (0..cols).map(|c| format!("{:e}", state.m[r * cols + c].z)).collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        _ => {
            out.push_str("x_m,y_m,z_m,m_z\n");
            for (spec, m) in layout.array.magnets().iter().zip(&state.m) {
                let _ = writeln!(
                    out,
                    "{:e},{:e},{:e},{:e}",
                    spec.position.x, spec.position.y, spec.position.z, m.z
                );
            }
        }
    }
    out
}

/// Symbol streams: one row per time step, one comma-separated column per
/// logical input.
pub fn symbols_to_csv(symbols: &[Vec<u32>]) -> String {
    let mut out = String::new();
    for row in symbols {
        let cells: Vec<String> = row.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn parse_symbols(text: &str, origin: &str) -> Result<Vec<Vec<u32>>> {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            let v = cell.trim().parse::<u32>().map_err(|e| Error::Parse {
                path: origin.to_string(),
                detail: format!("line {}: `{}`: {e}", lineno + 1, cell.trim()),
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    detail: format!(
                        "line {}: expected {} columns, found {}",
                        lineno + 1,
                        first.len(),
                        row.len()
                    ),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { path: origin.to_string(), detail: "no symbol rows".into() });
    }
    Ok(rows)
}

pub fn load_symbols(path: &Path) -> Result<Vec<Vec<u32>>> {
    let text = std::fs::read_to_string(path)?;
    parse_symbols(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnet::COUPLED_PMA;
    use crate::reservoir::{build_layout, LayoutKind};

    #[test]
    fn layout_toml_round_trips() {
        let layout = build_layout(&LayoutKind::BooleanGrid35, &COUPLED_PMA).unwrap();
        let text = layout_to_toml(&layout);
        let restored = parse_layout(&text, "roundtrip").unwrap();
        assert_eq!(restored.array.len(), 35);
        assert_eq!(restored.input_ids(), layout.input_ids());
        assert_eq!(restored.grid_dims(), Some((5, 7)));
        for (a, b) in layout.array.magnets().iter().zip(restored.array.magnets()) {
            assert!((a.position - b.position).norm() < 1e-18);
            assert_eq!(a.ku_j_per_m3, b.ku_j_per_m3);
        }
    }

    #[test]
    fn layout_parse_error_names_the_line() {
        let text = "[[magnet]]\nx_nm = \"oops\"\n";
        let err = parse_layout(text, "bad.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.toml"), "{msg}");
        assert!(msg.contains("line 2"), "missing line number: {msg}");
    }

    #[test]
    fn layout_without_inputs_is_rejected() {
        let text = "[[magnet]]\nx_nm = 0.0\ny_nm = 0.0\ndiameter_nm = 50.0\n\
                    thickness_nm = 10.0\nms_a_per_m = 8e5\nku_j_per_m3 = 3.7e3\n";
        assert!(parse_layout(text, "t").is_err());
    }

    #[test]
    fn unknown_layout_keys_are_rejected() {
        let text = "[[magnet]]\nx_nm = 0.0\ny_nm = 0.0\ndiameter_nm = 50.0\n\
                    thickness_nm = 10.0\nms_a_per_m = 8e5\nku_j_per_m3 = 3.7e3\n\
                    input = 0\nwobble = 1\n";
        let err = parse_layout(text, "t").unwrap_err();
        assert!(err.to_string().contains("wobble"), "{err}");
    }

    #[test]
    fn trajectory_csv_header_and_shape() {
        let points = vec![
            TrajectoryPoint { time_s: 0.0, m: vec![Vec3::new(0.0, 0.0, 1.0); 2] },
            TrajectoryPoint { time_s: 1e-12, m: vec![Vec3::new(0.0, 1.0, 0.0); 2] },
        ];
        let csv = trajectory_to_csv(&points, 2);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "time_s,m0_x,m0_y,m0_z,m1_x,m1_y,m1_z");
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn snapshot_uses_grid_matrix_form_for_grids() {
        let layout = build_layout(&LayoutKind::WaveformGrid { rows: 2, cols: 3 }, &COUPLED_PMA)
            .unwrap();
        let state = SimState::uniform_up(6);
        let csv = snapshot_to_csv(&layout, &state);
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(csv.lines().next().unwrap().split(',').count(), 3);
    }

    #[test]
    fn symbols_round_trip_and_reject_ragged_rows() {
        let symbols = vec![vec![0, 1, 2], vec![3, 0, 1]];
        let text = symbols_to_csv(&symbols);
        assert_eq!(parse_symbols(&text, "t").unwrap(), symbols);
        assert!(parse_symbols("0,1\n2\n", "t").is_err());
        assert!(parse_symbols("0,x\n", "t").is_err());
    }
}
