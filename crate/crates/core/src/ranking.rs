//! Density ranking: the fraction of observed samples whose estimated density
//! does not exceed the density at a given location, plus level sets of that
//! ranking.
//!
//! Ranking is invariant under positive rescaling of all densities, since only
//! the `<=` comparison against the sample densities enters. Ties take the
//! maximal rank (count with `<=`), with no randomization.

use crate::error::{Error, Result};
use crate::grid::{CellSet, ScalarField};

/// Sorted sample densities; answers ranking queries by binary search.
#[derive(Debug, Clone)]
pub struct RankingIndex {
    /// Sample densities in input order, kept so per-sample ranks can be
    /// reported against the original ordering.
    original: Vec<f64>,
    sorted: Vec<f64>,
}

impl RankingIndex {
    pub fn new(sample_densities: &[f64]) -> Result<Self> {
        if sample_densities.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if sample_densities.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::NonFinite {
                context: "sample densities",
            });
        }
        let mut sorted = sample_densities.to_vec();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite densities"));
        Ok(RankingIndex {
            original: sample_densities.to_vec(),
            sorted,
        })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sorted_densities(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples whose density is `<=` the given density.
    pub fn alpha_at(&self, density: f64) -> f64 {
        assert!(density.is_finite(), "ranking query must be finite");
        let count = self.sorted.partition_point(|&v| v <= density);
        count as f64 / self.sorted.len() as f64
    }

    /// Ranks of the samples themselves, in input order. Tied densities share
    /// the maximal rank, so the highest-density sample always ranks 1.
    pub fn sample_rankings(&self) -> Vec<f64> {
        self.original.iter().map(|&d| self.alpha_at(d)).collect()
    }
}

/// Builds the ranking index from the per-sample density estimates.
pub fn build_ranking_index(sample_densities: &[f64]) -> Result<RankingIndex> {
    RankingIndex::new(sample_densities)
}

/// A scalar field whose values are density rankings in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RankField(ScalarField);

impl RankField {
    pub fn new(field: ScalarField) -> Result<Self> {
        if let Some(&v) = field.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidRankValue(v));
        }
        Ok(RankField(field))
    }

    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    pub fn into_field(self) -> ScalarField {
        self.0
    }
}

/// Cell-wise ranking of a density field.
pub fn rank_field(index: &RankingIndex, density_field: &ScalarField) -> RankField {
    let values = density_field
        .values()
        .iter()
        .map(|&d| index.alpha_at(d))
        .collect();
    let field =
        ScalarField::new(*density_field.grid(), values).expect("same grid and finite ranks");
    RankField(field)
}

/// The level set at `gamma`: cells whose ranking is at least `1 - gamma`
/// (inclusive).
pub fn level_set(rank: &RankField, gamma: f64) -> Result<CellSet> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidLevel(gamma));
    }
    let threshold = 1.0 - gamma;
    Ok(rank.field().cells_at_or_above(threshold))
}

/// `index,alpha` CSV with six decimals.
pub fn rankings_to_csv(rankings: &[f64]) -> String {
    let mut out = String::from("index,alpha\n");
    for (i, a) in rankings.iter().enumerate() {
        out.push_str(&format!("{i},{a:.6}\n"));
    }
    out
}
