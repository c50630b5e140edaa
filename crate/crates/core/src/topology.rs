//! Connected components of level sets and the three summary curves:
//! mass-volume, Betti number, and persistence.
//!
//! Persistence uses a superlevel filtration of the rank field with a
//! union-find sweep. When two components merge, the seniority rule applies:
//! the component born at the higher ranking level survives and the younger
//! one dies at the merge level. Components still alive after the sweep die at
//! level 0, so the component of the global maximum has persistence equal to
//! the maximum ranking on the grid.

use crate::error::{Error, Result};
use crate::grid::{CellIndex, CellSet};
use crate::ranking::RankField;

/// Cell adjacency used for components and filtrations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &[(-1, 0), (0, -1), (0, 1), (1, 0)],
            Connectivity::Eight => &[
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ],
        }
    }
}

/// Per-cell component labels: members carry `Some(label)` with labels
/// `0..count` assigned in row-major order of first appearance.
#[derive(Debug, Clone)]
pub struct ComponentLabels {
    count: usize,
    labels: Vec<Option<u32>>,
}

impl ComponentLabels {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn labels(&self) -> &[Option<u32>] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> Option<u32> {
        self.labels[id]
    }
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            // Path halving.
            let grand = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = grand;
            i = grand;
        }
        i
    }

    /// Union by size; returns (surviving root, absorbed root), or None if the
    /// two were already joined.
    fn union(&mut self, a: u32, b: u32) -> Option<(u32, u32)> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        let (keep, drop) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[drop as usize] = keep;
        self.size[keep as usize] += self.size[drop as usize];
        Some((keep, drop))
    }
}

/// Labels the connected components of a cell set. The empty set has zero
/// components.
pub fn connected_components(cells: &CellSet, conn: Connectivity) -> ComponentLabels {
    let grid = cells.grid();
    let (nrows, ncols) = (grid.nrows() as i64, grid.ncols() as i64);
    let n = cells.membership().len();
    let mut uf = UnionFind::new(n);

    // Backward neighbors only: each is visited before the current cell in a
    // row-major scan.
    let backward: &[(i64, i64)] = match conn {
        Connectivity::Four => &[(0, -1), (-1, 0)],
        Connectivity::Eight => &[(0, -1), (-1, -1), (-1, 0), (-1, 1)],
    };

    for row in 0..nrows {
        for col in 0..ncols {
            let id = (row * ncols + col) as usize;
            if !cells.contains_id(id) {
                continue;
            }
            for (dr, dc) in backward {
                let (r, c) = (row + dr, col + dc);
                if r < 0 || c < 0 || r >= nrows || c >= ncols {
                    continue;
                }
                let nb = (r * ncols + c) as usize;
                if cells.contains_id(nb) {
                    uf.union(id as u32, nb as u32);
                }
            }
        }
    }

    let mut labels = vec![None; n];
    let mut root_label: Vec<Option<u32>> = vec![None; n];
    let mut count = 0u32;
    for (id, slot) in labels.iter_mut().enumerate() {
        if !cells.contains_id(id) {
            continue;
        }
        let root = uf.find(id as u32) as usize;
        let label = *root_label[root].get_or_insert_with(|| {
            let l = count;
            count += 1;
            l
        });
        *slot = Some(label);
    }
    ComponentLabels {
        count: count as usize,
        labels,
    }
}

/// A component of the superlevel filtration, recorded in ranking levels:
/// born at `birth_alpha`, absorbed (or finished) at `death_alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub birth_alpha: f64,
    pub death_alpha: f64,
    pub birth_cell: CellIndex,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.birth_alpha - self.death_alpha
    }
}

/// Runs the superlevel union-find filtration over a rank field.
///
/// Cells are processed in decreasing ranking; cells of equal ranking form one
/// batch handled in row-major order, with births assigned before unions.
/// Among components born at the same level, the elder is the one whose birth
/// cell comes first in row-major order. Cells ranked 0 never birth
/// components. Pairs come back sorted by descending persistence.
pub fn persistence_pairs(rank: &RankField, conn: Connectivity) -> Vec<PersistencePair> {
    let field = rank.field();
    let grid = field.grid();
    let values = field.values();
    let (nrows, ncols) = (grid.nrows() as i64, grid.ncols() as i64);
    let n = values.len();

    let mut order: Vec<u32> = (0..n as u32)
        .filter(|&i| values[i as usize] > 0.0)
        .collect();
    order.sort_unstable_by(|&a, &b| {
        values[b as usize]
            .partial_cmp(&values[a as usize])
            .expect("finite rank values")
            .then(a.cmp(&b))
    });

    let mut uf = UnionFind::new(n);
    // (birth level, row-major birth cell) carried by each live root.
    let mut birth: Vec<Option<(f64, u32)>> = vec![None; n];
    let mut activated = vec![false; n];
    let mut pairs = Vec::new();

    let neighbors = |id: u32, out: &mut Vec<u32>| {
        out.clear();
        let row = id as i64 / ncols;
        let col = id as i64 % ncols;
        for (dr, dc) in conn.offsets() {
            let (r, c) = (row + dr, col + dc);
            if r >= 0 && c >= 0 && r < nrows && c < ncols {
                out.push((r * ncols + c) as u32);
            }
        }
    };

    let mut nbuf = Vec::with_capacity(8);
    let mut start = 0;
    while start < order.len() {
        let level = values[order[start] as usize];
        let mut end = start;
        while end < order.len() && values[order[end] as usize] == level {
            end += 1;
        }
        let batch = &order[start..end];

        // Births first: a cell with no previously activated neighbor starts
        // a new component at this level.
        for &cell in batch {
            neighbors(cell, &mut nbuf);
            if !nbuf.iter().any(|&nb| activated[nb as usize]) {
                birth[cell as usize] = Some((level, cell));
            }
        }
        for &cell in batch {
            activated[cell as usize] = true;
        }

        // Unions second, in row-major batch order with a fixed neighbor
        // order, so merge outcomes are deterministic.
        for &cell in batch {
            neighbors(cell, &mut nbuf);
            for &nb in &nbuf {
                if !activated[nb as usize] {
                    continue;
                }
                let ra = uf.find(cell);
                let rb = uf.find(nb);
                if ra == rb {
                    continue;
                }
                let merged_birth = match (birth[ra as usize], birth[rb as usize]) {
                    (Some(a), Some(b)) => {
                        // Elder rule: higher birth level survives; equal
                        // levels fall to the earlier row-major birth cell.
                        let a_is_elder = a.0 > b.0 || (a.0 == b.0 && a.1 < b.1);
                        let (elder, younger) = if a_is_elder { (a, b) } else { (b, a) };
                        pairs.push(PersistencePair {
                            birth_alpha: younger.0,
                            death_alpha: level,
                            birth_cell: grid.cell_at(younger.1 as usize),
                        });
                        Some(elder)
                    }
                    (a, b) => a.or(b),
                };
                let (keep, _) = uf.union(ra, rb).expect("distinct roots");
                birth[keep as usize] = merged_birth;
            }
        }
        start = end;
    }

    // Survivors die at level 0.
    let mut seen_root = vec![false; n];
    for &cell in &order {
        let root = uf.find(cell) as usize;
        if seen_root[root] {
            continue;
        }
        seen_root[root] = true;
        let (b, cell0) = birth[root].expect("every surviving component was born");
        pairs.push(PersistencePair {
            birth_alpha: b,
            death_alpha: 0.0,
            birth_cell: grid.cell_at(cell0 as usize),
        });
    }

    pairs.sort_unstable_by(|a, b| {
        b.persistence()
            .partial_cmp(&a.persistence())
            .expect("finite persistence")
            .then(
                b.birth_alpha
                    .partial_cmp(&a.birth_alpha)
                    .expect("finite birth"),
            )
            .then(a.birth_cell.cmp(&b.birth_cell))
    });
    pairs
}

/// Which summary a curve carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    MassVolume,
    Betti,
    Persistence,
}

/// A sampled summary curve: strictly increasing levels in [0, 1] with one
/// value per level.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCurve {
    kind: CurveKind,
    levels: Vec<f64>,
    values: Vec<f64>,
}

impl SummaryCurve {
    pub fn new(kind: CurveKind, levels: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_levels(&levels)?;
        if levels.len() != values.len() {
            return Err(Error::InvalidLevels);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "summary curve values",
            });
        }
        Ok(SummaryCurve {
            kind,
            levels,
            values,
        })
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `level,value` CSV with six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,value\n");
        for (l, v) in self.levels.iter().zip(&self.values) {
            out.push_str(&format!("{l:.6},{v:.6}\n"));
        }
        out
    }
}

fn validate_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidLevels);
    }
    for (i, &l) in levels.iter().enumerate() {
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::InvalidLevels);
        }
        if i > 0 && l <= levels[i - 1] {
            return Err(Error::InvalidLevels);
        }
    }
    Ok(())
}

/// The default level grid: `step, 2*step, ...` strictly below 1.
pub fn default_levels(step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 || step > 0.5 {
        return Err(Error::InvalidLevelStep(step));
    }
    let mut levels = Vec::new();
    let mut k = 1u32;
    loop {
        let level = k as f64 * step;
        if level >= 1.0 - 1e-12 {
            break;
        }
        levels.push(level);
        k += 1;
    }
    Ok(levels)
}

/// Volume of the level set at each level: member-cell count times cell area.
pub fn mass_volume_curve(rank: &RankField, levels: &[f64]) -> Result<SummaryCurve> {
    validate_levels(levels)?;
    let values = levels
        .iter()
        .map(|&gamma| {
            let threshold = 1.0 - gamma;
            let count = rank
                .field()
                .values()
                .iter()
                .filter(|&&v| v >= threshold)
                .count();
            count as f64 * rank.field().grid().cell_area()
        })
        .collect();
    SummaryCurve::new(CurveKind::MassVolume, levels.to_vec(), values)
}

/// Number of connected components of the level set at each level.
pub fn betti_curve(rank: &RankField, levels: &[f64], conn: Connectivity) -> Result<SummaryCurve> {
    validate_levels(levels)?;
    let values = levels
        .iter()
        .map(|&gamma| {
            let cells = crate::ranking::level_set(rank, gamma).expect("validated level");
            connected_components(&cells, conn).count() as f64
        })
        .collect();
    SummaryCurve::new(CurveKind::Betti, levels.to_vec(), values)
}

/// Number of components with persistence at least `t`, for each threshold.
pub fn persistence_curve(pairs: &[PersistencePair], thresholds: &[f64]) -> Result<SummaryCurve> {
    validate_levels(thresholds)?;
    let values = thresholds
        .iter()
        .map(|&t| pairs.iter().filter(|p| p.persistence() >= t).count() as f64)
        .collect();
    SummaryCurve::new(CurveKind::Persistence, thresholds.to_vec(), values)
}

/// `birth_alpha,death_alpha,persistence,birth_row,birth_col` CSV.
pub fn pairs_to_csv(pairs: &[PersistencePair]) -> String {
    let mut out = String::from("birth_alpha,death_alpha,persistence,birth_row,birth_col\n");
    for p in pairs {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{},{}\n",
            p.birth_alpha,
            p.death_alpha,
            p.persistence(),
            p.birth_cell.row,
            p.birth_cell.col
        ));
    }
    out
}

/// Reads back a `level,value` curve CSV; extra columns are ignored.
pub fn parse_curve_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::Malformed {
        what: "curve csv",
        detail: "empty file".into(),
    })?;
    if !header.to_ascii_lowercase().starts_with("level,value") {
        return Err(Error::Malformed {
            what: "curve csv",
            detail: format!("unexpected header `{header}`"),
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut parse = |name: &str| -> Result<f64> {
            parts
                .next()
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidRow {
                    line: i as u64 + 2,
                    message: format!("{name}: {e}"),
                })
        };
        let level = parse("level")?;
        let value = parse("value")?;
        rows.push((level, value));
    }
    Ok(rows)
}

/// Reads back a persistence-pairs CSV.
pub fn parse_pairs_csv(text: &str) -> Result<Vec<PersistencePair>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::Malformed {
        what: "pairs csv",
        detail: "empty file".into(),
    })?;
    if header != "birth_alpha,death_alpha,persistence,birth_row,birth_col" {
        return Err(Error::Malformed {
            what: "pairs csv",
            detail: format!("unexpected header `{header}`"),
        });
    }
    let mut pairs = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::InvalidRow {
                line: i as u64 + 2,
                message: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let bad = |e: std::num::ParseFloatError| Error::InvalidRow {
            line: i as u64 + 2,
            message: e.to_string(),
        };
        let badint = |e: std::num::ParseIntError| Error::InvalidRow {
            line: i as u64 + 2,
            message: e.to_string(),
        };
        pairs.push(PersistencePair {
            birth_alpha: fields[0].trim().parse().map_err(bad)?,
            death_alpha: fields[1].trim().parse().map_err(bad)?,
            birth_cell: CellIndex::new(
                fields[3].trim().parse().map_err(badint)?,
                fields[4].trim().parse().map_err(badint)?,
            ),
        });
    }
    Ok(pairs)
}
