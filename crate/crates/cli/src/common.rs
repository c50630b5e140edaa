//! Shared plumbing: error-to-exit-code classification, input loading, model
//! resolution, and the run manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;

use actspace_core::{
    clip_bbox, parse_gps_csv, project, three_anchor_model, BoundingBox, Connectivity, Error,
    MixtureModel, PointSet,
};

/// CLI failures: usage errors exit 2, data errors exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data(message.into())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub fn parse_connectivity(value: u8) -> Result<Connectivity, CliError> {
    match value {
        4 => Ok(Connectivity::Four),
        8 => Ok(Connectivity::Eight),
        other => Err(CliError::usage(format!(
            "--connectivity must be 4 or 8, got {other}"
        ))),
    }
}

pub fn check_bandwidth(h: f64) -> Result<f64, CliError> {
    if !h.is_finite() || h <= 0.0 {
        return Err(CliError::usage(format!(
            "--bandwidth must be positive, got {h}"
        )));
    }
    Ok(h)
}

pub fn check_cell_size(bandwidth: f64, cell_size: Option<f64>) -> Result<f64, CliError> {
    let cell = cell_size.unwrap_or(bandwidth / 4.0);
    if !cell.is_finite() || cell <= 0.0 {
        return Err(CliError::usage(format!(
            "--cell-size must be positive, got {cell}"
        )));
    }
    Ok(cell)
}

pub fn check_step(step: f64) -> Result<f64, CliError> {
    if !step.is_finite() || step <= 0.0 || step > 0.5 {
        return Err(CliError::usage(format!(
            "--step must lie in (0, 0.5], got {step}"
        )));
    }
    Ok(step)
}

pub fn check_gammas(gammas: &[f64]) -> Result<(), CliError> {
    if gammas.is_empty() {
        return Err(CliError::usage("--gamma list is empty"));
    }
    for pair in gammas.windows(2) {
        if pair[1] <= pair[0] {
            return Err(CliError::usage(
                "--gamma levels must be strictly increasing",
            ));
        }
    }
    if gammas.iter().any(|g| !(0.0..=1.0).contains(g)) {
        return Err(CliError::usage("--gamma levels must lie in [0, 1]"));
    }
    Ok(())
}

pub fn parse_bbox(text: &str) -> Result<BoundingBox, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::usage(format!(
            "--bbox expects xmin,ymin,xmax,ymax, got `{text}`"
        )));
    }
    let mut vals = [0.0; 4];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|e| CliError::usage(format!("--bbox component `{p}`: {e}")))?;
    }
    BoundingBox::new(vals[0], vals[1], vals[2], vals[3]).map_err(|e| CliError::usage(e.to_string()))
}

/// Loads a model document, or the built-in three-anchor model when no path
/// is given.
pub fn load_model(path: Option<&Path>) -> Result<MixtureModel, CliError> {
    match path {
        None => Ok(three_anchor_model()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::data(format!("{}: {e}", p.display())))?;
            MixtureModel::from_json(&text).map_err(|e| CliError::data(e.to_string()))
        }
    }
}

/// A named planar point set ready for analysis.
pub struct NamedPoints {
    /// Device id for GPS input; None for plain point input.
    pub device: Option<String>,
    pub points: PointSet,
}

/// Loads an input CSV as planar point sets: plain `x,y` rows pass through,
/// GPS fixes are grouped per device and projected to meters around each
/// trajectory's centroid. Parse warnings go to stderr.
pub fn load_points(path: &Path, bbox: Option<BoundingBox>) -> Result<Vec<NamedPoints>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let header = text
        .lines()
        .next()
        .ok_or_else(|| CliError::data(format!("{}: empty file", path.display())))?
        .to_ascii_lowercase();
    let names: Vec<&str> = header.split(',').map(|s| s.trim()).collect();

    let mut sets = Vec::new();
    if names.contains(&"lat") && names.contains(&"lon") {
        let (trajectories, warnings) = parse_gps_csv(text.as_bytes())?;
        for w in &warnings {
            eprintln!("warning: line {}: {}", w.line, w.message);
        }
        for traj in &trajectories {
            sets.push(NamedPoints {
                device: Some(traj.device_id.clone()),
                points: project(traj, None),
            });
        }
    } else if names == ["x", "y"] {
        sets.push(NamedPoints {
            device: None,
            points: PointSet::from_csv(&text)?,
        });
    } else {
        return Err(CliError::data(format!(
            "{}: unrecognized header `{}`; expected `x,y` or `id,timestamp,lat,lon[,accuracy]`",
            path.display(),
            header.trim_end()
        )));
    }

    if let Some(b) = bbox {
        for set in &mut sets {
            set.points = clip_bbox(&set.points, b);
        }
    }
    for set in &sets {
        if set.points.is_empty() {
            return Err(CliError::data(match &set.device {
                Some(d) => format!("device {d}: no points remain after parsing/clipping"),
                None => "no points remain after parsing/clipping".to_string(),
            }));
        }
    }
    Ok(sets)
}

/// Everything needed to reproduce a run, written as `manifest.json` next to
/// the artifacts. Contains no timestamps or machine state, so reruns are
/// byte-identical.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    pub seed: u64,
    pub bandwidths: Vec<f64>,
    /// Absent when each bandwidth uses its own default of h/4.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell_size: Option<f64>,
    pub connectivity: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_step: Option<f64>,
    pub gammas: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
    pub outputs: Vec<String>,
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(manifest).map_err(|e| CliError::data(e.to_string()))?;
    text.push('\n');
    std::fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Filesystem-safe device directory name.
pub fn sanitize(device: &str) -> String {
    device
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn display_path(p: &Path) -> String {
    p.display().to_string()
}

pub fn model_label(path: Option<&PathBuf>) -> String {
    match path {
        Some(p) => display_path(p),
        None => "built-in".to_string(),
    }
}
