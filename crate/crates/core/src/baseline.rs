//! Delay-window linear baseline: the same ridge readout as the reservoir,
//! fed a tapped window of the raw input symbols instead of magnet states.
//! Shares the dataset's split, warm-up, and scoring so reports compare
//! side by side.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tasks::{fit_and_score, TaskDataset, TaskReport};

/// Feature encoding for one window slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolEncoding {
    /// Each slot contributes its symbol mapped linearly onto [-1, 1].
    RawSymbol,
    /// One indicator column per possible window word, per logical input.
    /// Makes every function of the window linear; the saturated reference.
    OneHot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayWindowConfig {
    /// Number of symbols visible at once, present included.
    pub window: usize,
    pub encoding: SymbolEncoding,
}

impl DelayWindowConfig {
    pub fn validate(&self, levels: u32) -> Result<()> {
        if self.window == 0 {
            return Err(Error::invalid_field("window", "window must be at least 1"));
        }
        if let SymbolEncoding::OneHot = self.encoding {
            let words = (levels as f64).powi(self.window as i32);
            if words > 1e6 {
                return Err(Error::invalid_field(
                    "window",
                    format!("one-hot would need {words:.0} columns per input"),
                ));
            }
        }
        Ok(())
    }
}

/// Builds the feature matrix: row t describes symbols t-window+1..t of every
/// logical input. Rows earlier than window-1 lack history; missing slots
/// read as symbol 0, and such rows must stay behind the warm-up mask.
pub fn embed(
    inputs: &[Vec<u32>],
    levels: u32,
    config: &DelayWindowConfig,
) -> Result<DMatrix<f64>> {
    config.validate(levels)?;
    let n = inputs.first().map_or(0, Vec::len);
    if n < config.window {
        return Err(Error::invalid_field("window", "window longer than the sequence"));
    }
    let per_input = match config.encoding {
        SymbolEncoding::RawSymbol => config.window,
        SymbolEncoding::OneHot => (levels as usize).pow(config.window as u32),
    };
    let mut x = DMatrix::zeros(n, inputs.len() * per_input);
    for (g, seq) in inputs.iter().enumerate() {
        for t in 0..n {
            match config.encoding {
                SymbolEncoding::RawSymbol => {
                    for k in 0..config.window {
                        let symbol = if t >= k { seq[t - k] } else { 0 };
                        let signed = 2.0 * symbol as f64 / (levels - 1) as f64 - 1.0;
                        x[(t, g * per_input + k)] = signed;
                    }
                }
                SymbolEncoding::OneHot => {
                    let mut word = 0usize;
                    for k in 0..config.window {
                        let symbol = if t >= k { seq[t - k] as usize } else { 0 };
                        word += symbol * (levels as usize).pow(k as u32);
                    }
                    x[(t, g * per_input + word)] = 1.0;
                }
            }
        }
    }
    Ok(x)
}

/// Fits and scores the delay-window model with the dataset's own split and
/// warm-up mask. The window may not see further back than the warm-up hides,
/// otherwise the baseline would score rows the reservoir never could.
pub fn run_baseline(
    task: &TaskDataset,
    config: &DelayWindowConfig,
    lambda: f64,
) -> Result<TaskReport> {
    if config.window > task.warmup + 1 {
        return Err(Error::invalid_field(
            "window",
            format!("window {} reaches past the warm-up of {}", config.window, task.warmup),
        ));
    }
    let features = embed(&task.inputs, task.levels, config)?;
    let mut report = fit_and_score(task, &features, lambda)?;
    report.task_name = format!("{}_baseline_w{}", task.name, config.window);
    Ok(report)
}
