//! Quartic-kernel density estimation at points and over whole grids.
//!
//! Evaluation is bucketed: sample points are hashed into square buckets of
//! side equal to the bandwidth, so any query only inspects the 3x3 bucket
//! neighborhood that can contain contributing samples. Contributions are
//! summed in ascending sample-index order, which makes the bucketed result
//! bit-identical to a direct sum over all samples.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Point, RasterGrid, ScalarField};

/// Smoothing bandwidth, in the coordinate unit of the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self> {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::InvalidBandwidth(h));
        }
        Ok(Bandwidth(h))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// The observed planar point set. May be empty after clipping; evaluation
/// operations reject empty sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::NonFinite {
                context: "point coordinates",
            });
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// `x,y` CSV with shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.x, p.y));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Malformed {
            what: "point csv",
            detail: "empty file".into(),
        })?;
        let cols: Vec<String> = header
            .split(',')
            .map(|s| s.trim().to_ascii_lowercase())
            .collect();
        if cols != ["x", "y"] {
            return Err(Error::Malformed {
                what: "point csv",
                detail: format!("expected header `x,y`, found `{header}`"),
            });
        }
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.unwrap_or("")
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidRow {
                        line: i as u64 + 2,
                        message: e.to_string(),
                    })
            };
            let x = parse(parts.next())?;
            let y = parse(parts.next())?;
            points.push(Point::new(x, y));
        }
        PointSet::new(points)
    }
}

/// The quartic (biweight) kernel: `(3/pi) (1 - u^2)^2` inside the unit
/// interval, zero outside.
pub fn quartic_kernel(u: f64) -> f64 {
    if u.abs() < 1.0 {
        let s = 1.0 - u * u;
        (3.0 / PI) * s * s
    } else {
        0.0
    }
}

/// Sample indices hashed by square buckets of side equal to the bandwidth.
///
/// Every point lands in exactly one bucket, and a disc of radius `h` around
/// any query intersects at most the 3x3 neighborhood of the query's bucket.
#[derive(Debug, Clone)]
pub struct SpatialBuckets {
    width: f64,
    map: HashMap<(i64, i64), Vec<u32>>,
}

impl SpatialBuckets {
    pub fn build(points: &PointSet, h: Bandwidth) -> Self {
        let width = h.get();
        let mut map: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            map.entry(Self::key(width, *p)).or_default().push(i as u32);
        }
        SpatialBuckets { width, map }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Total number of indexed sample points across all buckets.
    pub fn total_points(&self) -> usize {
        self.map.values().map(Vec::len).sum()
    }

    pub fn key(width: f64, p: Point) -> (i64, i64) {
        ((p.x / width).floor() as i64, (p.y / width).floor() as i64)
    }

    /// All sample indices in the 3x3 bucket neighborhood of `key`, ascending.
    /// Per-bucket lists are already ascending, so a sort of the concatenation
    /// restores the global sample order.
    pub fn gather_sorted(&self, key: (i64, i64), out: &mut Vec<u32>) {
        out.clear();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.map.get(&(key.0 + dx, key.1 + dy)) {
                    out.extend_from_slice(ids);
                }
            }
        }
        out.sort_unstable();
    }
}

/// A point set bound to a bandwidth, with its bucket index built once.
pub struct KernelDensity<'a> {
    points: &'a [Point],
    h: f64,
    h2: f64,
    buckets: SpatialBuckets,
}

impl<'a> KernelDensity<'a> {
    pub fn new(points: &'a PointSet, h: Bandwidth) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        Ok(KernelDensity {
            points: points.points(),
            h: h.get(),
            h2: h.get() * h.get(),
            buckets: SpatialBuckets::build(points, h),
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn buckets(&self) -> &SpatialBuckets {
        &self.buckets
    }

    /// Density estimate at one query point.
    pub fn density_at(&self, q: Point) -> f64 {
        let mut candidates = Vec::new();
        self.buckets
            .gather_sorted(SpatialBuckets::key(self.h, q), &mut candidates);
        self.sum_terms(&candidates, q)
    }

    // Normalized kernel sum over candidate indices (ascending). Only samples
    // strictly inside the radius-h disc contribute.
    fn sum_terms(&self, candidates: &[u32], q: Point) -> f64 {
        let mut acc = 0.0;
        for &i in candidates {
            let p = self.points[i as usize];
            let dx = q.x - p.x;
            let dy = q.y - p.y;
            let d2 = dx * dx + dy * dy;
            if d2 < self.h2 {
                let s = 1.0 - d2 / self.h2;
                acc += s * s;
            }
        }
        acc * (3.0 / (PI * self.h2)) / self.points.len() as f64
    }

    /// Density at every cell center of `grid`.
    ///
    /// Rows are evaluated in parallel; all cells whose centers share a bucket
    /// reuse one gathered candidate list. Results are identical to calling
    /// `density_at` per cell regardless of worker count.
    pub fn field(&self, grid: &RasterGrid) -> Result<ScalarField> {
        let ncols = grid.ncols();
        let rows: Vec<Vec<f64>> = (0..grid.nrows())
            .into_par_iter()
            .map(|row| {
                let mut vals = Vec::with_capacity(ncols);
                let mut cached_key = None;
                let mut candidates = Vec::new();
                for col in 0..ncols {
                    let center = grid
                        .cell_center(crate::grid::CellIndex::new(row, col))
                        .expect("cell index in range");
                    let key = SpatialBuckets::key(self.h, center);
                    if cached_key != Some(key) {
                        self.buckets.gather_sorted(key, &mut candidates);
                        cached_key = Some(key);
                    }
                    vals.push(self.sum_terms(&candidates, center));
                }
                vals
            })
            .collect();
        ScalarField::new(*grid, rows.concat())
    }

    /// Density at each sample point itself; each sample contributes to its
    /// own density.
    pub fn at_samples(&self) -> Vec<f64> {
        self.points
            .par_iter()
            .map(|p| self.density_at(*p))
            .collect()
    }
}

/// Density estimate at a single query point.
pub fn evaluate_kde(points: &PointSet, query: Point, h: Bandwidth) -> Result<f64> {
    Ok(KernelDensity::new(points, h)?.density_at(query))
}

/// Density field over a grid.
pub fn kde_field(points: &PointSet, grid: &RasterGrid, h: Bandwidth) -> Result<ScalarField> {
    KernelDensity::new(points, h)?.field(grid)
}

/// Density at each sample point.
pub fn kde_at_samples(points: &PointSet, h: Bandwidth) -> Result<Vec<f64>> {
    Ok(KernelDensity::new(points, h)?.at_samples())
}
