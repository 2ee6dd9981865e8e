//! Closed-form ridge readout: W = (XᵀX + Λ)⁻¹XᵀY solved through a Cholesky
//! factorization of the normal matrix (never an explicit inverse), with an
//! optional augmented always-on bias feature that the regularizer skips.
//! One factorization serves any number of target columns.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Whether to append the constant bias feature before solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bias {
    /// Augment the feature matrix with an always-on column; the bias row of
    /// the weights is left unregularized.
    Augmented,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub lambda: f64,
    pub bias: Bias,
    /// (features [+ 1]) x targets; bias row last when present.
    weights: DMatrix<f64>,
    features: usize,
}

impl RidgeModel {
    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn n_features(&self) -> usize {
        self.features
    }

    pub fn n_targets(&self) -> usize {
        self.weights.ncols()
    }
}

fn augmented(x: &DMatrix<f64>, bias: Bias) -> DMatrix<f64> {
    match bias {
        Bias::None => x.clone(),
        Bias::Augmented => {
            let mut xa = DMatrix::zeros(x.nrows(), x.ncols() + 1);
            xa.view_mut((0, 0), (x.nrows(), x.ncols())).copy_from(x);
            xa.column_mut(x.ncols()).fill(1.0);
            xa
        }
    }
}

/// Fits the multi-output ridge weights. `features` is samples x features,
/// `targets` is samples x targets with matching row count. A singular
/// normal matrix (for example lambda = 0 with rank-deficient features)
/// is reported as an error rather than producing non-finite weights.
pub fn ridge_fit(
    features: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    lambda: f64,
    bias: Bias,
) -> Result<RidgeModel> {
    if features.nrows() != targets.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature rows vs {} target rows",
            features.nrows(),
            targets.nrows()
        )));
    }
    if features.nrows() == 0 || features.ncols() == 0 {
        return Err(Error::DimensionMismatch("empty feature matrix".into()));
    }
    if !(lambda >= 0.0) {
        return Err(Error::invalid_field("lambda", "must be >= 0"));
    }

    let xa = augmented(features, bias);
    let mut gram = xa.transpose() * &xa;
    let regularized_cols = features.ncols(); // bias column, if any, stays unregularized
    for k in 0..regularized_cols {
        gram[(k, k)] += lambda;
    }
    let rhs = xa.transpose() * targets;

    let chol = nalgebra::Cholesky::new(gram).ok_or(Error::RankDeficient { lambda })?;
    // Cholesky can numerically succeed on a singular matrix; a collapsed
    // pivot ratio is the same rank deficiency.
    let l = chol.l_dirty();
    let mut min_d = f64::INFINITY;
    let mut max_d: f64 = 0.0;
    for k in 0..l.nrows() {
        min_d = min_d.min(l[(k, k)]);
        max_d = max_d.max(l[(k, k)]);
    }
    if !(min_d > 1e-12 * max_d) {
        return Err(Error::RankDeficient { lambda });
    }

    let weights = chol.solve(&rhs);
    Ok(RidgeModel { lambda, bias, weights, features: features.ncols() })
}

/// Applies the model: returns samples x targets predictions.
pub fn predict(model: &RidgeModel, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if features.ncols() != model.features {
        return Err(Error::DimensionMismatch(format!(
            "model expects {} features, got {}",
            model.features,
            features.ncols()
        )));
    }
    Ok(augmented(features, model.bias) * &model.weights)
}

/// Per-target binary labels: prediction >= 0 maps to 1, else 0.
pub fn classify_sign(predictions: &DMatrix<f64>) -> Vec<Vec<u8>> {
    predictions
        .row_iter()
        .map(|row| row.iter().map(|&v| u8::from(v >= 0.0)).collect())
        .collect()
}

/// One class index per row: the column with the largest prediction, ties
/// resolved to the lowest index.
pub fn classify_argmax(predictions: &DMatrix<f64>) -> Vec<usize> {
    predictions
        .row_iter()
        .map(|row| {
            let mut best = 0;
            let mut best_v = row[0];
            for (j, &v) in row.iter().enumerate().skip(1) {
                if v > best_v {
                    best = j;
                    best_v = v;
                }
            }
            best
        })
        .collect()
}

/// Serializes the model: one metadata line, then one row per weight row
/// (bias last when present) with comma-separated columns.
pub fn model_to_csv(model: &RidgeModel) -> String {
    let mut out = String::new();
    let bias_flag = match model.bias {
        Bias::Augmented => 1,
        Bias::None => 0,
    };
    let _ = writeln!(
        out,
        "lambda={},features={},targets={},bias={}",
        model.lambda,
        model.features,
        model.n_targets(),
        bias_flag
    );
    for r in 0..model.weights.nrows() {
        let row: Vec<String> = (0..model.weights.ncols())
            .map(|c| format!("{}", model.weights[(r, c)]))
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn save_model(model: &RidgeModel, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_csv(model))?;
    Ok(())
}

pub fn model_from_csv(text: &str, origin: &str) -> Result<RidgeModel> {
    let parse_err = |detail: String| Error::Parse { path: origin.to_string(), detail };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty model file".into()))?;
    let mut lambda = None;
    let mut features = None;
    let mut targets = None;
    let mut bias = None;
    for part in header.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| parse_err(format!("malformed header entry `{part}`")))?;
        match key {
            "lambda" => lambda = Some(value.parse::<f64>()),
            "features" => features = Some(value.parse::<f64>().map(|v| v as usize)),
            "targets" => targets = Some(value.parse::<f64>().map(|v| v as usize)),
            "bias" => bias = Some(value.parse::<f64>().map(|v| v != 0.0)),
            other => return Err(parse_err(format!("unknown header key `{other}`"))),
        }
    }
    let lambda =
        lambda.ok_or_else(|| parse_err("missing lambda".into()))?.map_err(|e| parse_err(e.to_string()))?;
    let features = features
        .ok_or_else(|| parse_err("missing features".into()))?
        .map_err(|e| parse_err(e.to_string()))?;
    let targets = targets
        .ok_or_else(|| parse_err("missing targets".into()))?
        .map_err(|e| parse_err(e.to_string()))?;
    let bias = if bias.ok_or_else(|| parse_err("missing bias".into()))?.map_err(|e| parse_err(e.to_string()))? {
        Bias::Augmented
    } else {
        Bias::None
    };

    let rows = features + usize::from(bias == Bias::Augmented);
    let mut weights = DMatrix::zeros(rows, targets);
    let mut count = 0;
    for (r, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if r >= rows {
            return Err(parse_err(format!("expected {rows} weight rows, found more")));
        }
        let values: Vec<&str> = line.split(',').collect();
        if values.len() != targets {
            return Err(parse_err(format!(
                "row {}: expected {targets} columns, found {}",
                r + 2,
                values.len()
            )));
        }
        for (c, v) in values.iter().enumerate() {
            weights[(r, c)] = v
                .parse::<f64>()
                .map_err(|e| parse_err(format!("row {}, column {}: {e}", r + 2, c + 1)))?;
        }
        count += 1;
    }
    if count != rows {
        return Err(parse_err(format!("expected {rows} weight rows, found {count}")));
    }
    Ok(RidgeModel { lambda, bias, weights, features })
}

pub fn load_model(path: &Path) -> Result<RidgeModel> {
    let text = std::fs::read_to_string(path)?;
    model_from_csv(&text, &path.display().to_string())
}
