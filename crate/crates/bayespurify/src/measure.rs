//! Discrete measure spaces with two nested partitions.
//!
//! A player's type space is a finite grid of cells, each carrying a point in
//! some real box and a nonnegative mass. The fine partition (one cell per
//! index) stands in for the full type σ-algebra; a coarser partition, given
//! by per-cell labels, stands in for the payoff-relevant sub-σ-algebra.
//!
//! The continuum "nowhere equivalence" condition is replaced by a discrete
//! surrogate: every coarse cell must split into at least two fine cells of
//! positive mass. This is a surrogate, not the original condition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MASS_SUM_TOL: f64 = 1e-12;

/// One grid cell: a representative point and its probability mass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cell {
    pub point: Vec<f64>,
    pub mass: f64,
    pub coarse_label: usize,
}

/// Coarse partition derived from the per-cell labels: members and masses of
/// each coarse cell, ordered by ascending label.
#[derive(Debug, Clone)]
pub struct CoarsePartition {
    /// Fine-cell indices per coarse cell, ascending within each cell.
    members: Vec<Vec<usize>>,
    masses: Vec<f64>,
}

impl CoarsePartition {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self, coarse: usize) -> &[usize] {
        &self.members[coarse]
    }

    pub fn mass(&self, coarse: usize) -> f64 {
        self.masses[coarse]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// A player's discretized type space.
#[derive(Debug, Clone)]
pub struct DiscreteTypeSpace {
    pub name: String,
    cells: Vec<Cell>,
    /// Dense coarse index per fine cell (labels remapped to 0..C by
    /// ascending label value).
    coarse_of: Vec<usize>,
    coarse: CoarsePartition,
}

impl DiscreteTypeSpace {
    /// Build a space from cells, checking the mass and partition invariants.
    pub fn new(name: impl Into<String>, cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Invalid {
                what: "type space",
                reason: "no cells".into(),
            });
        }
        if cells.iter().any(|c| !c.mass.is_finite() || c.mass < 0.0) {
            return Err(Error::Invalid {
                what: "type space",
                reason: "cell masses must be finite and nonnegative".into(),
            });
        }
        let total: f64 = cells.iter().map(|c| c.mass).sum();
        if (total - 1.0).abs() > MASS_SUM_TOL {
            return Err(Error::Invalid {
                what: "type space",
                reason: format!("masses sum to {total:.17}, not 1"),
            });
        }
        let dim = cells[0].point.len();
        if cells.iter().any(|c| c.point.len() != dim) {
            return Err(Error::Invalid {
                what: "type space",
                reason: "cell points have mixed dimensions".into(),
            });
        }

        let mut labels: Vec<usize> = cells.iter().map(|c| c.coarse_label).collect();
        labels.sort_unstable();
        labels.dedup();
        let dense = |label: usize| labels.binary_search(&label).unwrap();

        let mut members = vec![Vec::new(); labels.len()];
        let mut masses = vec![0.0; labels.len()];
        let mut coarse_of = Vec::with_capacity(cells.len());
        for (idx, cell) in cells.iter().enumerate() {
            let d = dense(cell.coarse_label);
            coarse_of.push(d);
            members[d].push(idx);
            masses[d] += cell.mass;
        }
        for (d, group) in members.iter().enumerate() {
            if !group.iter().any(|&i| cells[i].mass > 0.0) {
                return Err(Error::Invalid {
                    what: "type space",
                    reason: format!("coarse cell {d} has no positive-mass fine cell"),
                });
            }
        }

        Ok(Self {
            name: name.into(),
            cells,
            coarse_of,
            coarse: CoarsePartition { members, masses },
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn point(&self, cell: usize) -> &[f64] {
        &self.cells[cell].point
    }

    pub fn mass(&self, cell: usize) -> f64 {
        self.cells[cell].mass
    }

    pub fn coarse(&self) -> &CoarsePartition {
        &self.coarse
    }

    /// Dense coarse index of a fine cell.
    pub fn coarse_of(&self, cell: usize) -> usize {
        self.coarse_of[cell]
    }

    /// Nowhere-equivalence surrogate: every coarse cell contains at least two
    /// fine cells of positive mass.
    pub fn splittable(&self) -> bool {
        self.coarse
            .members
            .iter()
            .all(|group| group.iter().filter(|&&i| self.cells[i].mass > 0.0).count() >= 2)
    }
}

/// Conditional expectation of `v` given the coarse partition.
///
/// Output is constant on each coarse cell, equal to the mass-weighted average
/// of `v` over that cell; coarse cells of zero mass get 0. Summation is in
/// ascending fine-cell order so results are reproducible.
pub fn conditional_expectation(v: &[f64], space: &DiscreteTypeSpace) -> Result<Vec<f64>> {
    if v.len() != space.len() {
        return Err(Error::LengthMismatch {
            what: "conditional_expectation values",
            expected: space.len(),
            got: v.len(),
        });
    }
    let coarse = space.coarse();
    let mut per_coarse = vec![0.0; coarse.len()];
    for (d, avg) in per_coarse.iter_mut().enumerate() {
        let mass = coarse.mass(d);
        if mass <= 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for &i in coarse.members(d) {
            acc += v[i] * space.mass(i);
        }
        *avg = acc / mass;
    }
    Ok((0..space.len()).map(|i| per_coarse[space.coarse_of(i)]).collect())
}

/// Regular conditional distribution of a pure strategy given the coarse
/// partition: row per coarse cell, column per action.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionalDistribution {
    /// `rows[d][a]` = mass fraction of coarse cell d mapped to action a.
    pub rows: Vec<Vec<f64>>,
    /// Coarse cells of zero mass, whose rows are all zeros.
    pub zero_mass_cells: Vec<usize>,
}

pub fn regular_conditional_distribution(
    strategy: &[usize],
    space: &DiscreteTypeSpace,
    action_count: usize,
) -> Result<ConditionalDistribution> {
    if strategy.len() != space.len() {
        return Err(Error::LengthMismatch {
            what: "pure strategy",
            expected: space.len(),
            got: strategy.len(),
        });
    }
    if let Some(&bad) = strategy.iter().find(|&&a| a >= action_count) {
        return Err(Error::IndexOutOfRange {
            what: "action index",
            index: bad,
            bound: action_count,
        });
    }
    let coarse = space.coarse();
    let mut rows = vec![vec![0.0; action_count]; coarse.len()];
    let mut zero_mass_cells = Vec::new();
    for d in 0..coarse.len() {
        let mass = coarse.mass(d);
        if mass <= 0.0 {
            zero_mass_cells.push(d);
            continue;
        }
        for &i in coarse.members(d) {
            rows[d][strategy[i]] += space.mass(i);
        }
        for p in rows[d].iter_mut() {
            *p /= mass;
        }
    }
    Ok(ConditionalDistribution { rows, zero_mass_cells })
}

/// Maximum over coarse cells D of |λ(E∩D) − λ(E)·λ(D)|.
///
/// Zero exactly when E takes the same conditional fraction of every coarse
/// cell, i.e. when the indicator of E is independent of the coarse partition.
pub fn independence_deviation(event: &[usize], space: &DiscreteTypeSpace) -> Result<f64> {
    if let Some(&bad) = event.iter().find(|&&i| i >= space.len()) {
        return Err(Error::IndexOutOfRange {
            what: "fine-cell index",
            index: bad,
            bound: space.len(),
        });
    }
    let mut in_event = vec![false; space.len()];
    for &i in event {
        in_event[i] = true;
    }
    let event_mass: f64 = (0..space.len())
        .filter(|&i| in_event[i])
        .map(|i| space.mass(i))
        .sum();
    let coarse = space.coarse();
    let mut worst = 0.0f64;
    for d in 0..coarse.len() {
        let mut inter = 0.0;
        for &i in coarse.members(d) {
            if in_event[i] {
                inter += space.mass(i);
            }
        }
        worst = worst.max((inter - event_mass * coarse.mass(d)).abs());
    }
    Ok(worst)
}

/// Result of the independent-supplement construction.
#[derive(Debug, Clone, Serialize)]
pub struct SupplementReport {
    /// Fine-cell partition, one entry per part, cells ascending.
    pub parts: Vec<Vec<usize>>,
    /// Mass of each part.
    pub part_masses: Vec<f64>,
    /// max over parts of max(independence_deviation, |mass − 1/k|).
    pub max_deviation: f64,
    /// False when some coarse cell has a single positive-mass fine cell, so
    /// an exact equal-measure independent partition cannot exist (surrogate
    /// of a nowhere-equivalence failure).
    pub exact_feasible: bool,
}

/// Greedy k-part partition approximating an independent supplement.
///
/// Fine cells are processed in ascending index order; within its coarse cell,
/// each fine cell goes to the part with the largest remaining mass gap toward
/// the proportional share λ(D)/k (ties to the lowest part index). On grids
/// with K equal-mass fine cells per coarse cell and k | K this is an exact
/// round-robin split with deviation 0.
pub fn independent_supplement(k: usize, space: &DiscreteTypeSpace) -> Result<SupplementReport> {
    if k < 2 {
        return Err(Error::Invalid {
            what: "supplement",
            reason: format!("k must be at least 2, got {k}"),
        });
    }
    let coarse = space.coarse();
    let exact_feasible = space.splittable();

    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
    // assigned[d][j]: mass of coarse cell d already given to part j.
    let mut assigned = vec![vec![0.0f64; k]; coarse.len()];
    for i in 0..space.len() {
        let d = space.coarse_of(i);
        let share = coarse.mass(d) / k as f64;
        let mut best = 0usize;
        let mut best_gap = f64::NEG_INFINITY;
        for (j, got) in assigned[d].iter().enumerate() {
            let gap = share - got;
            if gap > best_gap {
                best_gap = gap;
                best = j;
            }
        }
        assigned[d][best] += space.mass(i);
        parts[best].push(i);
    }

    let target = 1.0 / k as f64;
    let mut part_masses = Vec::with_capacity(k);
    let mut max_deviation = 0.0f64;
    for part in &parts {
        let mass: f64 = part.iter().map(|&i| space.mass(i)).sum();
        let dev = independence_deviation(part, space)?;
        max_deviation = max_deviation.max(dev).max((mass - target).abs());
        part_masses.push(mass);
    }

    Ok(SupplementReport {
        parts,
        part_masses,
        max_deviation,
        exact_feasible,
    })
}

/// Uniform 1-D grid helper: `n` cells on [lo, hi], equal masses, midpoint
/// points, coarse label = cell / cells_per_coarse.
pub fn uniform_grid_space(
    name: &str,
    n: usize,
    lo: f64,
    hi: f64,
    cells_per_coarse: usize,
) -> Result<DiscreteTypeSpace> {
    let h = (hi - lo) / n as f64;
    let cells = (0..n)
        .map(|c| Cell {
            point: vec![lo + (c as f64 + 0.5) * h],
            mass: 1.0 / n as f64,
            coarse_label: c / cells_per_coarse,
        })
        .collect();
    DiscreteTypeSpace::new(name, cells)
}
