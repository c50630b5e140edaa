//! A three-part generative model of an activity space: point masses at anchor
//! locations, uniform mass along road segments, and uniform mass over walk
//! rectangles. The model supports seeded sampling plus exact (analytic)
//! measures, dimensions, and population rankings, so estimators can be scored
//! without Monte Carlo error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellSet, Point};
use crate::kde::PointSet;

/// Seed for the sampling stream.
pub type Seed = u64;

/// Geometric tolerance for on-segment membership tests.
const GEOM_TOL: f64 = 1e-9;

/// Mass-sum slack when validating a model.
const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub y: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub ax: f64,
    pub ay: f64,
    pub bx: f64,
    pub by: f64,
    pub mass: f64,
}

impl Segment {
    pub fn length(&self) -> f64 {
        let dx = self.bx - self.ax;
        let dy = self.by - self.ay;
        (dx * dx + dy * dy).sqrt()
    }

    /// Mass per unit length.
    pub fn linear_density(&self) -> f64 {
        self.mass / self.length()
    }

    fn start(&self) -> Point {
        Point::new(self.ax, self.ay)
    }

    fn end(&self) -> Point {
        Point::new(self.bx, self.by)
    }

    fn point_at(&self, t: f64) -> Point {
        Point::new(
            self.ax + t * (self.bx - self.ax),
            self.ay + t * (self.by - self.ay),
        )
    }

    fn distance_to(&self, p: Point) -> f64 {
        let (vx, vy) = (self.bx - self.ax, self.by - self.ay);
        let len2 = vx * vx + vy * vy;
        let t = (((p.x - self.ax) * vx + (p.y - self.ay) * vy) / len2).clamp(0.0, 1.0);
        p.distance(self.point_at(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectRegion {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
    pub mass: f64,
}

impl RectRegion {
    pub fn area(&self) -> f64 {
        (self.xmax - self.xmin) * (self.ymax - self.ymin)
    }

    /// Mass per unit area.
    pub fn area_density(&self) -> f64 {
        self.mass / self.area()
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }
}

/// Which part of the model support an estimate is scored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportTarget {
    /// The anchor points only.
    Anchors,
    /// Anchor points plus road segments.
    AnchorsAndRoads,
}

/// Mixture of an atomic part (weight `pi[0]`), a segment part (`pi[1]`) and a
/// rectangle part (`pi[2]`). Each part's own masses sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureModel {
    pi: [f64; 3],
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
    rects: Vec<RectRegion>,
}

#[derive(Deserialize)]
struct RawModel {
    pi: [f64; 3],
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
    rects: Vec<RectRegion>,
}

impl MixtureModel {
    pub fn new(
        pi: [f64; 3],
        atoms: Vec<Atom>,
        segments: Vec<Segment>,
        rects: Vec<RectRegion>,
    ) -> Result<Self> {
        let model = MixtureModel {
            pi,
            atoms,
            segments,
            rects,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if self.pi.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return bad(format!("weights must be non-negative, got {:?}", self.pi));
        }
        let total: f64 = self.pi.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return bad(format!("weights sum to {total}, expected 1"));
        }
        let check_masses = |weight: f64, masses: &mut dyn Iterator<Item = f64>, what: &str| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for m in masses {
                if !m.is_finite() || m <= 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "{what} masses must be positive, got {m}"
                    )));
                }
                sum += m;
                count += 1;
            }
            if count == 0 && weight > 0.0 {
                return Err(Error::InvalidModel(format!(
                    "{what} list is empty but its weight is {weight}"
                )));
            }
            if count > 0 && (sum - 1.0).abs() > MASS_TOL {
                return Err(Error::InvalidModel(format!(
                    "{what} masses sum to {sum}, expected 1"
                )));
            }
            Ok(())
        };
        check_masses(self.pi[0], &mut self.atoms.iter().map(|a| a.mass), "atom")?;
        check_masses(
            self.pi[1],
            &mut self.segments.iter().map(|s| s.mass),
            "segment",
        )?;
        check_masses(
            self.pi[2],
            &mut self.rects.iter().map(|r| r.mass),
            "rectangle",
        )?;
        for a in &self.atoms {
            if !a.x.is_finite() || !a.y.is_finite() {
                return bad("atom coordinates must be finite".into());
            }
        }
        for s in &self.segments {
            if ![s.ax, s.ay, s.bx, s.by].iter().all(|v| v.is_finite()) {
                return bad("segment coordinates must be finite".into());
            }
            if s.length() <= 0.0 {
                return bad(format!(
                    "segment ({}, {})-({}, {}) has zero length",
                    s.ax, s.ay, s.bx, s.by
                ));
            }
        }
        for r in &self.rects {
            if ![r.xmin, r.ymin, r.xmax, r.ymax]
                .iter()
                .all(|v| v.is_finite())
            {
                return bad("rectangle coordinates must be finite".into());
            }
            if r.xmin >= r.xmax || r.ymin >= r.ymax {
                return bad(format!(
                    "rectangle ({}, {})-({}, {}) has no area",
                    r.xmin, r.ymin, r.xmax, r.ymax
                ));
            }
        }
        Ok(())
    }

    pub fn weights(&self) -> [f64; 3] {
        self.pi
    }
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }
    pub fn rects(&self) -> &[RectRegion] {
        &self.rects
    }

    /// Raw coordinate range of the full support (atoms, segment endpoints,
    /// rectangle corners): (xmin, ymin, xmax, ymax).
    pub fn support_bounds(&self) -> (f64, f64, f64, f64) {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for a in &self.atoms {
            xs.push(a.x);
            ys.push(a.y);
        }
        for s in &self.segments {
            xs.extend([s.ax, s.bx]);
            ys.extend([s.ay, s.by]);
        }
        for r in &self.rects {
            xs.extend([r.xmin, r.xmax]);
            ys.extend([r.ymin, r.ymax]);
        }
        let fold = |v: &[f64], init: f64, f: fn(f64, f64) -> f64| v.iter().cloned().fold(init, f);
        (
            fold(&xs, f64::INFINITY, f64::min),
            fold(&ys, f64::INFINITY, f64::min),
            fold(&xs, f64::NEG_INFINITY, f64::max),
            fold(&ys, f64::NEG_INFINITY, f64::max),
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawModel = serde_json::from_str(text)?;
        MixtureModel::new(raw.pi, raw.atoms, raw.segments, raw.rects)
    }

    /// Draws `n` independent samples. The draw order per sample is fixed:
    /// mixture component, then sub-distribution index, then position, so a
    /// given seed always yields the same sequence.
    pub fn sample(&self, n: usize, seed: Seed) -> Result<PointSet> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            let u = rng.gen::<f64>();
            let p = if u < self.pi[0] {
                let a = &self.atoms[categorical(&mut rng, self.atoms.iter().map(|a| a.mass))];
                Point::new(a.x, a.y)
            } else if u < self.pi[0] + self.pi[1] {
                let s = &self.segments[categorical(&mut rng, self.segments.iter().map(|s| s.mass))];
                s.point_at(rng.gen::<f64>())
            } else {
                let r = &self.rects[categorical(&mut rng, self.rects.iter().map(|r| r.mass))];
                let x = r.xmin + rng.gen::<f64>() * (r.xmax - r.xmin);
                let y = r.ymin + rng.gen::<f64>() * (r.ymax - r.ymin);
                Point::new(x, y)
            };
            points.push(p);
        }
        PointSet::new(points)
    }

    /// Per-part probability content of a cell set: (atom part, segment part,
    /// rectangle part), each in [0, 1], computed analytically.
    pub fn component_measures(&self, cells: &CellSet) -> [f64; 3] {
        let grid = cells.grid();
        let mut atom_mass = 0.0;
        for a in &self.atoms {
            if let Ok(idx) = grid.locate(Point::new(a.x, a.y)) {
                if cells.contains(idx) {
                    atom_mass += a.mass;
                }
            }
        }
        let mut seg_mass = 0.0;
        for s in &self.segments {
            seg_mass += s.mass * segment_fraction_in(s, cells);
        }
        let mut rect_mass = 0.0;
        for r in &self.rects {
            rect_mass += r.mass * rect_fraction_in(r, cells);
        }
        [atom_mass, seg_mass, rect_mass]
    }

    /// Total probability the model assigns to a cell set.
    pub fn true_measure(&self, cells: &CellSet) -> f64 {
        let m = self.component_measures(cells);
        self.pi[0] * m[0] + self.pi[1] * m[1] + self.pi[2] * m[2]
    }

    /// Probability mass of the symmetric difference between an estimated
    /// region and a support target. Mass of the target outside the estimate
    /// counts, plus mass inside the estimate carried by parts that are not in
    /// the target.
    pub fn symmetric_difference_error(&self, estimate: &CellSet, target: SupportTarget) -> f64 {
        let m = self.component_measures(estimate);
        match target {
            SupportTarget::Anchors => {
                self.pi[0] * (1.0 - m[0]) + self.pi[1] * m[1] + self.pi[2] * m[2]
            }
            SupportTarget::AnchorsAndRoads => {
                self.pi[0] * (1.0 - m[0]) + self.pi[1] * (1.0 - m[1]) + self.pi[2] * m[2]
            }
        }
    }

    /// Dimension of a point with respect to the model: 0 at an atom, 1 on a
    /// segment away from atoms, 2 elsewhere.
    pub fn dimension(&self, p: Point) -> u8 {
        if self.atoms.iter().any(|a| a.x == p.x && a.y == p.y) {
            return 0;
        }
        if self.segments.iter().any(|s| s.distance_to(p) <= GEOM_TOL) {
            return 1;
        }
        2
    }

    /// Population ranking of a point: the probability that a random draw from
    /// the model ranks at or below the point, ordering first by descending
    /// dimension and then by density within the dimension.
    pub fn true_alpha(&self, p: Point) -> f64 {
        match self.dimension(p) {
            0 => {
                let mass_here: f64 = self
                    .atoms
                    .iter()
                    .filter(|a| a.x == p.x && a.y == p.y)
                    .map(|a| a.mass)
                    .sum();
                let dominated: f64 = self
                    .atoms
                    .iter()
                    .filter(|a| a.mass <= mass_here)
                    .map(|a| a.mass)
                    .sum();
                self.pi[1] + self.pi[2] + self.pi[0] * dominated
            }
            1 => {
                let density_here: f64 = self
                    .segments
                    .iter()
                    .filter(|s| s.distance_to(p) <= GEOM_TOL)
                    .map(|s| s.linear_density())
                    .sum();
                let dominated: f64 = self
                    .segments
                    .iter()
                    .filter(|s| s.linear_density() <= density_here)
                    .map(|s| s.mass)
                    .sum();
                self.pi[2] + self.pi[1] * dominated
            }
            _ => {
                let density_here: f64 = self
                    .rects
                    .iter()
                    .filter(|r| r.contains(p))
                    .map(|r| r.area_density())
                    .sum();
                if density_here == 0.0 {
                    return 0.0;
                }
                let dominated: f64 = self
                    .rects
                    .iter()
                    .filter(|r| r.area_density() <= density_here)
                    .map(|r| r.mass)
                    .sum();
                self.pi[2] * dominated
            }
        }
    }
}

fn categorical<R: Rng>(rng: &mut R, masses: impl Iterator<Item = f64>) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    let mut last = 0;
    for (i, m) in masses.enumerate() {
        cum += m;
        last = i;
        if u < cum {
            return i;
        }
    }
    // Rounding can leave u just above the accumulated sum.
    last
}

/// Fraction of a segment's length lying in member cells. The segment is cut
/// at every grid line it crosses; each piece is attributed to the cell that
/// contains its midpoint, which applies the grid's edge-ownership rule to
/// pieces lying exactly on a cell boundary.
fn segment_fraction_in(seg: &Segment, cells: &CellSet) -> f64 {
    let grid = cells.grid();
    let cell = grid.cell_size();
    let (x0, y0) = (grid.bbox().xmin(), grid.bbox().ymin());
    let a = seg.start();
    let b = seg.end();

    let mut ts = vec![0.0, 1.0];
    let mut add_crossings = |pa: f64, pb: f64, origin: f64| {
        let (lo, hi) = if pa <= pb { (pa, pb) } else { (pb, pa) };
        if pa == pb {
            return;
        }
        let first = ((lo - origin) / cell).ceil() as i64;
        let last = ((hi - origin) / cell).floor() as i64;
        for k in first..=last {
            let coord = origin + k as f64 * cell;
            let t = (coord - pa) / (pb - pa);
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    };
    add_crossings(a.x, b.x, x0);
    add_crossings(a.y, b.y, y0);
    ts.sort_unstable_by(|p, q| p.partial_cmp(q).expect("finite parameters"));

    let mut fraction = 0.0;
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let mid = seg.point_at(0.5 * (t0 + t1));
        if let Ok(idx) = grid.locate(mid) {
            if cells.contains(idx) {
                fraction += t1 - t0;
            }
        }
    }
    fraction
}

/// Fraction of a rectangle's area lying in member cells, by exact overlap.
fn rect_fraction_in(rect: &RectRegion, cells: &CellSet) -> f64 {
    let grid = cells.grid();
    let cell = grid.cell_size();
    let (x0, y0) = (grid.bbox().xmin(), grid.bbox().ymin());

    let col_lo = (((rect.xmin - x0) / cell).floor().max(0.0)) as usize;
    let row_lo = (((rect.ymin - y0) / cell).floor().max(0.0)) as usize;
    if rect.xmax <= x0 || rect.ymax <= y0 {
        return 0.0;
    }
    let col_hi = (((rect.xmax - x0) / cell).ceil() as usize).min(grid.ncols());
    let row_hi = (((rect.ymax - y0) / cell).ceil() as usize).min(grid.nrows());

    let mut area = 0.0;
    for row in row_lo..row_hi {
        let cy0 = y0 + row as f64 * cell;
        let oy = (rect.ymax.min(cy0 + cell) - rect.ymin.max(cy0)).max(0.0);
        if oy == 0.0 {
            continue;
        }
        for col in col_lo..col_hi {
            let id = row * grid.ncols() + col;
            if !cells.contains_id(id) {
                continue;
            }
            let cx0 = x0 + col as f64 * cell;
            let ox = (rect.xmax.min(cx0 + cell) - rect.xmin.max(cx0)).max(0.0);
            area += ox * oy;
        }
    }
    area / rect.area()
}

/// The built-in benchmark model: three anchors (home, office, gym) joined by
/// straight roads, with walk rectangles around home and the gym-side anchor.
pub fn three_anchor_model() -> MixtureModel {
    MixtureModel::new(
        [0.6, 0.3, 0.1],
        vec![
            Atom {
                x: 0.0,
                y: 0.0,
                mass: 0.5,
            },
            Atom {
                x: 0.0,
                y: 2.0,
                mass: 0.3,
            },
            Atom {
                x: 2.0,
                y: 0.0,
                mass: 0.2,
            },
        ],
        vec![
            Segment {
                ax: 0.0,
                ay: 0.0,
                bx: 2.0,
                by: 0.0,
                mass: 0.3,
            },
            Segment {
                ax: 2.0,
                ay: 0.0,
                bx: 0.0,
                by: 2.0,
                mass: 0.2,
            },
            Segment {
                ax: 0.0,
                ay: 0.0,
                bx: 0.0,
                by: 2.0,
                mass: 0.5,
            },
        ],
        vec![
            RectRegion {
                xmin: -0.5,
                ymin: -0.5,
                xmax: 0.5,
                ymax: 0.5,
                mass: 0.7,
            },
            RectRegion {
                xmin: 1.6,
                ymin: -0.4,
                xmax: 2.4,
                ymax: 0.4,
                mass: 0.3,
            },
        ],
    )
    .expect("built-in model is valid")
}
