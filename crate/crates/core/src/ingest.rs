//! GPS fix ingestion: CSV parsing, time ordering, deduplication, and local
//! planar projection.
//!
//! The expected CSV header is `id,timestamp,lat,lon[,accuracy]`; columns are
//! resolved by name (case-insensitive) rather than position. Timestamps are
//! RFC 3339 / ISO-8601. Projection is a local equirectangular map to meters
//! around a reference coordinate, which is accurate at activity-space
//! extents; the time and visit order are discarded by projection.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{DateTime, Utc};

use crate::error::{Error, Result};
use crate::grid::{BoundingBox, Point};
use crate::kde::PointSet;

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GpsFix {
    pub device_id: String,
    pub timestamp: DateTime<Utc>,
    pub lat: f64,
    pub lon: f64,
    pub accuracy: Option<f64>,
}

/// Time-ascending fixes of one device; strictly increasing timestamps after
/// deduplication.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub device_id: String,
    pub fixes: Vec<GpsFix>,
}

/// Origin of the local projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReference {
    pub lat0: f64,
    pub lon0: f64,
}

/// A non-fatal parsing note, reported with the input line it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseWarning {
    pub line: u64,
    pub message: String,
}

/// Parses a GPS CSV stream into one trajectory per device.
///
/// Rows are grouped by id and stably sorted by timestamp. Exact duplicate
/// rows are dropped silently; distinct rows sharing (id, timestamp) keep the
/// first and emit a warning.
pub fn parse_gps_csv<R: Read>(reader: R) -> Result<(Vec<Trajectory>, Vec<ParseWarning>)> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    let col = |name: &str| -> Option<usize> {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let id_col = col("id").ok_or_else(|| Error::MissingColumn("id".into()))?;
    let ts_col = col("timestamp").ok_or_else(|| Error::MissingColumn("timestamp".into()))?;
    let lat_col = col("lat").ok_or_else(|| Error::MissingColumn("lat".into()))?;
    let lon_col = col("lon").ok_or_else(|| Error::MissingColumn("lon".into()))?;
    let acc_col = col("accuracy");

    let mut by_device: BTreeMap<String, Vec<(GpsFix, u64)>> = BTreeMap::new();
    for record in csv_reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| -> Result<&str> {
            record.get(i).ok_or_else(|| Error::InvalidRow {
                line,
                message: format!("missing column {i}"),
            })
        };

        let device_id = field(id_col)?.to_string();
        if device_id.is_empty() {
            return Err(Error::InvalidRow {
                line,
                message: "empty id".into(),
            });
        }
        let ts_text = field(ts_col)?;
        let timestamp = DateTime::parse_from_rfc3339(ts_text)
            .map_err(|e| Error::InvalidRow {
                line,
                message: format!("timestamp `{ts_text}`: {e}"),
            })?
            .with_timezone(&Utc);
        let parse_f64 = |name: &str, text: &str| -> Result<f64> {
            text.parse::<f64>().map_err(|e| Error::InvalidRow {
                line,
                message: format!("{name} `{text}`: {e}"),
            })
        };
        let lat = parse_f64("lat", field(lat_col)?)?;
        let lon = parse_f64("lon", field(lon_col)?)?;
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::InvalidRow {
                line,
                message: format!("latitude {lat} outside [-90, 90]"),
            });
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(Error::InvalidRow {
                line,
                message: format!("longitude {lon} outside [-180, 180]"),
            });
        }
        let accuracy = match acc_col {
            Some(i) => {
                let text = field(i)?;
                if text.is_empty() {
                    None
                } else {
                    let a = parse_f64("accuracy", text)?;
                    if a < 0.0 {
                        return Err(Error::InvalidRow {
                            line,
                            message: format!("accuracy {a} is negative"),
                        });
                    }
                    Some(a)
                }
            }
            None => None,
        };

        by_device.entry(device_id.clone()).or_default().push((
            GpsFix {
                device_id,
                timestamp,
                lat,
                lon,
                accuracy,
            },
            line,
        ));
    }

    let mut warnings = Vec::new();
    let mut trajectories = Vec::new();
    for (device_id, mut rows) in by_device {
        rows.sort_by_key(|(fix, _)| fix.timestamp);
        let mut fixes: Vec<GpsFix> = Vec::with_capacity(rows.len());
        for (fix, line) in rows {
            match fixes.last() {
                Some(prev) if prev.timestamp == fix.timestamp => {
                    if *prev != fix {
                        warnings.push(ParseWarning {
                            line,
                            message: format!(
                                "device {device_id}: dropped conflicting fix at {}; kept the first",
                                fix.timestamp.to_rfc3339()
                            ),
                        });
                    }
                }
                _ => fixes.push(fix),
            }
        }
        trajectories.push(Trajectory { device_id, fixes });
    }
    Ok((trajectories, warnings))
}

impl ProjectionReference {
    /// Coordinate centroid of a trajectory.
    pub fn centroid(traj: &Trajectory) -> Self {
        let n = traj.fixes.len().max(1) as f64;
        ProjectionReference {
            lat0: traj.fixes.iter().map(|f| f.lat).sum::<f64>() / n,
            lon0: traj.fixes.iter().map(|f| f.lon).sum::<f64>() / n,
        }
    }
}

/// Projects a trajectory to planar meters with a local equirectangular map;
/// the reference defaults to the trajectory's coordinate centroid. Fix order
/// is preserved, times are dropped.
pub fn project(traj: &Trajectory, reference: Option<ProjectionReference>) -> PointSet {
    let r = reference.unwrap_or_else(|| ProjectionReference::centroid(traj));
    let rad = std::f64::consts::PI / 180.0;
    let cos_lat0 = (r.lat0 * rad).cos();
    let points = traj
        .fixes
        .iter()
        .map(|f| {
            Point::new(
                (f.lon - r.lon0) * rad * EARTH_RADIUS_M * cos_lat0,
                (f.lat - r.lat0) * rad * EARTH_RADIUS_M,
            )
        })
        .collect();
    PointSet::new(points).expect("finite fixes project to finite points")
}

/// Keeps the points inside the box (boundaries inclusive), preserving order.
/// The result may be empty; evaluation operations reject empty sets.
pub fn clip_bbox(points: &PointSet, bbox: BoundingBox) -> PointSet {
    let kept = points
        .iter()
        .filter(|p| bbox.contains(**p))
        .cloned()
        .collect();
    PointSet::new(kept).expect("subsequence of finite points")
}
