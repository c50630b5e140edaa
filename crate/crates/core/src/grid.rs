//! Rectangular raster geometry: bounding boxes, cell indexing, per-cell value
//! layers and boolean cell sets.
//!
//! The grid is row-major with row 0 at the bottom (lowest y). A point on a
//! shared cell edge belongs to the higher-index cell, except at the extent
//! maximum, which belongs to the last cell. That rule makes cell ownership a
//! partition of the covered extent and keeps every downstream computation
//! deterministic.

use crate::error::{Error, Result};

/// A planar point in the coordinate unit of the input data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Axis-aligned rectangle with strictly positive width and height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    xmin: f64,
    ymin: f64,
    xmax: f64,
    ymax: f64,
}

impl BoundingBox {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        let ok = xmin.is_finite() && ymin.is_finite() && xmax.is_finite() && ymax.is_finite();
        if !ok || xmin >= xmax || ymin >= ymax {
            return Err(Error::InvalidBoundingBox {
                xmin,
                ymin,
                xmax,
                ymax,
            });
        }
        Ok(BoundingBox {
            xmin,
            ymin,
            xmax,
            ymax,
        })
    }

    /// Smallest box containing every point, expanded by `margin` on all sides.
    /// A positive margin makes the box valid even for a single point.
    pub fn around_points<'a, I>(points: I, margin: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Point>,
    {
        let mut it = points.into_iter();
        let first = it.next().ok_or(Error::EmptyPointSet)?;
        let (mut xmin, mut ymin, mut xmax, mut ymax) = (first.x, first.y, first.x, first.y);
        for p in it {
            xmin = xmin.min(p.x);
            ymin = ymin.min(p.y);
            xmax = xmax.max(p.x);
            ymax = ymax.max(p.y);
        }
        BoundingBox::new(xmin - margin, ymin - margin, xmax + margin, ymax + margin)
    }

    pub fn xmin(&self) -> f64 {
        self.xmin
    }
    pub fn ymin(&self) -> f64 {
        self.ymin
    }
    pub fn xmax(&self) -> f64 {
        self.xmax
    }
    pub fn ymax(&self) -> f64 {
        self.ymax
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    /// Inclusive containment on all boundaries.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }
}

/// Zero-based (row, col) address of a grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellIndex {
    pub row: usize,
    pub col: usize,
}

impl CellIndex {
    pub fn new(row: usize, col: usize) -> Self {
        CellIndex { row, col }
    }
}

/// Uniform rectangular lattice covering a bounding box.
///
/// `ncols = ceil(width / cell_size)` and likewise for rows, so the last row
/// and column may overhang the box by less than one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterGrid {
    bbox: BoundingBox,
    cell_size: f64,
    ncols: usize,
    nrows: usize,
}

impl RasterGrid {
    pub fn new(bbox: BoundingBox, cell_size: f64) -> Result<Self> {
        if !cell_size.is_finite() || cell_size <= 0.0 {
            return Err(Error::InvalidCellSize(cell_size));
        }
        let ncols = (bbox.width() / cell_size).ceil().max(1.0) as usize;
        let nrows = (bbox.height() / cell_size).ceil().max(1.0) as usize;
        Ok(RasterGrid {
            bbox,
            cell_size,
            ncols,
            nrows,
        })
    }

    /// Build directly from a lower-left corner and explicit dimensions, as
    /// read back from an exported grid file.
    pub fn with_dims(
        xllcorner: f64,
        yllcorner: f64,
        cell_size: f64,
        ncols: usize,
        nrows: usize,
    ) -> Result<Self> {
        if !cell_size.is_finite() || cell_size <= 0.0 {
            return Err(Error::InvalidCellSize(cell_size));
        }
        if ncols == 0 || nrows == 0 {
            return Err(Error::InvalidCellSize(0.0));
        }
        let bbox = BoundingBox::new(
            xllcorner,
            yllcorner,
            xllcorner + ncols as f64 * cell_size,
            yllcorner + nrows as f64 * cell_size,
        )?;
        Ok(RasterGrid {
            bbox,
            cell_size,
            ncols,
            nrows,
        })
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncells(&self) -> usize {
        self.ncols * self.nrows
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_size * self.cell_size
    }

    pub fn total_area(&self) -> f64 {
        self.ncells() as f64 * self.cell_area()
    }

    /// Right edge of the covered extent (may overhang `bbox.xmax()`).
    pub fn extent_xmax(&self) -> f64 {
        self.bbox.xmin + self.ncols as f64 * self.cell_size
    }

    /// Top edge of the covered extent.
    pub fn extent_ymax(&self) -> f64 {
        self.bbox.ymin + self.nrows as f64 * self.cell_size
    }

    /// Cell containing `p` under the edge-ownership rule.
    pub fn locate(&self, p: Point) -> Result<CellIndex> {
        let outside = Error::PointOutsideGrid { x: p.x, y: p.y };
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(outside);
        }
        if p.x < self.bbox.xmin
            || p.y < self.bbox.ymin
            || p.x > self.extent_xmax()
            || p.y > self.extent_ymax()
        {
            return Err(outside);
        }
        let col = (((p.x - self.bbox.xmin) / self.cell_size).floor() as usize).min(self.ncols - 1);
        let row = (((p.y - self.bbox.ymin) / self.cell_size).floor() as usize).min(self.nrows - 1);
        Ok(CellIndex { row, col })
    }

    pub fn cell_center(&self, idx: CellIndex) -> Result<Point> {
        self.check_index(idx)?;
        Ok(Point {
            x: self.bbox.xmin + (idx.col as f64 + 0.5) * self.cell_size,
            y: self.bbox.ymin + (idx.row as f64 + 0.5) * self.cell_size,
        })
    }

    pub fn check_index(&self, idx: CellIndex) -> Result<()> {
        if idx.row >= self.nrows || idx.col >= self.ncols {
            return Err(Error::InvalidCellIndex {
                row: idx.row,
                col: idx.col,
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        Ok(())
    }

    /// Row-major offset of a cell.
    pub fn cell_id(&self, idx: CellIndex) -> usize {
        idx.row * self.ncols + idx.col
    }

    pub fn cell_at(&self, id: usize) -> CellIndex {
        CellIndex {
            row: id / self.ncols,
            col: id % self.ncols,
        }
    }
}

/// Convenience constructor matching the grid's role in the pipeline.
pub fn make_grid(bbox: BoundingBox, cell_size: f64) -> Result<RasterGrid> {
    RasterGrid::new(bbox, cell_size)
}

/// One finite value per grid cell, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: RasterGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: RasterGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.ncells() {
            return Err(Error::FieldSizeMismatch {
                got: values.len(),
                expected: grid.ncells(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "scalar field values",
            });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn grid(&self) -> &RasterGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: CellIndex) -> f64 {
        self.values[self.grid.cell_id(idx)]
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Value of the cell containing `p`.
    pub fn value_at_point(&self, p: Point) -> Result<f64> {
        Ok(self.value(self.grid.locate(p)?))
    }

    /// Cells whose value is at or above `tau`.
    pub fn cells_at_or_above(&self, tau: f64) -> CellSet {
        let membership = self.values.iter().map(|&v| v >= tau).collect();
        CellSet {
            grid: self.grid,
            membership,
        }
    }

    /// Serialize as an ESRI ASCII grid: six header lines, then rows
    /// top-to-bottom, space-separated, six significant digits.
    pub fn to_esri_ascii(&self) -> String {
        let g = &self.grid;
        let mut out = String::with_capacity(self.values.len() * 10 + 128);
        out.push_str(&format!("ncols {}\n", g.ncols));
        out.push_str(&format!("nrows {}\n", g.nrows));
        out.push_str(&format!("xllcorner {}\n", fmt_sig(g.bbox.xmin)));
        out.push_str(&format!("yllcorner {}\n", fmt_sig(g.bbox.ymin)));
        out.push_str(&format!("cellsize {}\n", fmt_sig(g.cell_size)));
        out.push_str("NODATA_value -9999\n");
        for row in (0..g.nrows).rev() {
            for col in 0..g.ncols {
                if col > 0 {
                    out.push(' ');
                }
                out.push_str(&fmt_sig(self.values[row * g.ncols + col]));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_esri_ascii(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut header = |key: &'static str| -> Result<f64> {
            let line = lines.next().ok_or(Error::Malformed {
                what: "esri ascii grid",
                detail: format!("missing header line `{key}`"),
            })?;
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap_or("");
            let value = parts.next().unwrap_or("");
            if !name.eq_ignore_ascii_case(key) {
                return Err(Error::Malformed {
                    what: "esri ascii grid",
                    detail: format!("expected header `{key}`, found `{name}`"),
                });
            }
            value.parse::<f64>().map_err(|e| Error::Malformed {
                what: "esri ascii grid",
                detail: format!("header `{key}`: {e}"),
            })
        };
        let ncols = header("ncols")? as usize;
        let nrows = header("nrows")? as usize;
        let xll = header("xllcorner")?;
        let yll = header("yllcorner")?;
        let cell = header("cellsize")?;
        let _nodata = header("NODATA_value")?;
        let grid = RasterGrid::with_dims(xll, yll, cell, ncols, nrows)?;

        let mut values = vec![0.0; ncols * nrows];
        let mut seen = 0usize;
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            if i >= nrows {
                return Err(Error::Malformed {
                    what: "esri ascii grid",
                    detail: "more data rows than nrows".into(),
                });
            }
            let row = nrows - 1 - i;
            let mut count = 0;
            for (col, token) in line.split_whitespace().enumerate() {
                if col >= ncols {
                    return Err(Error::Malformed {
                        what: "esri ascii grid",
                        detail: format!("row {i} has more than {ncols} columns"),
                    });
                }
                values[row * ncols + col] = token.parse().map_err(|e| Error::Malformed {
                    what: "esri ascii grid",
                    detail: format!("row {i} col {col}: {e}"),
                })?;
                count += 1;
            }
            if count != ncols {
                return Err(Error::Malformed {
                    what: "esri ascii grid",
                    detail: format!("row {i} has {count} columns, expected {ncols}"),
                });
            }
            seen += 1;
        }
        if seen != nrows {
            return Err(Error::Malformed {
                what: "esri ascii grid",
                detail: format!("found {seen} data rows, expected {nrows}"),
            });
        }
        ScalarField::new(grid, values)
    }
}

/// Set of grid cells, stored as one boolean per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSet {
    grid: RasterGrid,
    membership: Vec<bool>,
}

impl CellSet {
    pub fn new(grid: RasterGrid, membership: Vec<bool>) -> Result<Self> {
        if membership.len() != grid.ncells() {
            return Err(Error::FieldSizeMismatch {
                got: membership.len(),
                expected: grid.ncells(),
            });
        }
        Ok(CellSet { grid, membership })
    }

    pub fn empty(grid: RasterGrid) -> Self {
        let n = grid.ncells();
        CellSet {
            grid,
            membership: vec![false; n],
        }
    }

    pub fn full(grid: RasterGrid) -> Self {
        let n = grid.ncells();
        CellSet {
            grid,
            membership: vec![true; n],
        }
    }

    pub fn grid(&self) -> &RasterGrid {
        &self.grid
    }

    pub fn membership(&self) -> &[bool] {
        &self.membership
    }

    pub fn contains(&self, idx: CellIndex) -> bool {
        self.membership[self.grid.cell_id(idx)]
    }

    pub fn contains_id(&self, id: usize) -> bool {
        self.membership[id]
    }

    /// Number of member cells.
    pub fn count(&self) -> usize {
        self.membership.iter().filter(|&&m| m).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.cell_area()
    }

    pub fn is_subset_of(&self, other: &CellSet) -> bool {
        self.grid == other.grid
            && self
                .membership
                .iter()
                .zip(&other.membership)
                .all(|(&a, &b)| !a || b)
    }

    pub fn member_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.membership
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| if m { Some(i) } else { None })
    }

    /// 0/1 mask as a scalar field, for export.
    pub fn to_mask_field(&self) -> ScalarField {
        let values = self
            .membership
            .iter()
            .map(|&m| if m { 1.0 } else { 0.0 })
            .collect();
        ScalarField {
            grid: self.grid,
            values,
        }
    }
}

/// Plain-notation formatting with six significant digits, falling back to
/// scientific notation outside a readable magnitude range.
pub(crate) fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}
