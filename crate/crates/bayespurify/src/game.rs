//! Bayesian games on grids: players, type spaces, action grids, common
//! prior density and payoffs.
//!
//! The prior is stored as a density `q` with respect to the product of the
//! per-player marginals, either tabulated over type-profile tuples or in
//! conditionally-independent form (a mixture of per-player product
//! densities, one term per unobservable state).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DiscreteTypeSpace;

/// Finite action grid inside a real box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionGrid {
    points: Vec<Vec<f64>>,
}

impl ActionGrid {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid {
                what: "action grid",
                reason: "no points".into(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            for q in points.iter().skip(i + 1) {
                if p == q {
                    return Err(Error::Invalid {
                        what: "action grid",
                        reason: format!("duplicate point {p:?}"),
                    });
                }
            }
        }
        Ok(Self { points })
    }

    /// Uniform 1-D grid of `n` points on [lo, hi], endpoints included.
    pub fn uniform(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid {
                what: "action grid",
                reason: "no points".into(),
            });
        }
        let pts = if n == 1 {
            vec![vec![lo]]
        } else {
            (0..n)
                .map(|k| vec![lo + (hi - lo) * k as f64 / (n - 1) as f64])
                .collect()
        };
        Self::new(pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, a: usize) -> &[f64] {
        &self.points[a]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Index of the grid point closest to `x` (1-D grids), lowest index on
    /// ties.
    pub fn nearest(&self, x: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (a, p) in self.points.iter().enumerate() {
            let d = (p[0] - x).abs();
            if d < best_d {
                best_d = d;
                best = a;
            }
        }
        best
    }
}

/// One unobservable state of a conditionally-independent prior: weight and,
/// per player, the density of the state-conditional marginal with respect to
/// the player's own marginal, one value per fine cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CiState {
    pub tau: f64,
    pub densities: Vec<Vec<f64>>,
}

/// Common prior, as a density w.r.t. the product of marginals.
#[derive(Debug, Clone)]
pub enum PriorSpec {
    /// Flat row-major over type-profile tuples: player index ascending, cell
    /// index ascending within each player.
    Tabulated(Vec<f64>),
    ConditionallyIndependent(Vec<CiState>),
}

impl PriorSpec {
    pub fn states(&self) -> Option<&[CiState]> {
        match self {
            PriorSpec::ConditionallyIndependent(s) => Some(s),
            PriorSpec::Tabulated(_) => None,
        }
    }
}

/// Payoff evaluator over grid indices. Implementations capture whatever grid
/// coordinate tables they need at construction time.
pub trait PayoffFn: Send + Sync {
    fn eval(&self, player: usize, a: &[usize], t: &[usize]) -> f64;
}

/// Payoff storage: dense tensors (2-player scale) or an evaluator.
#[derive(Clone)]
pub enum Payoffs {
    /// Per player, flat row-major over (action profile, type profile):
    /// action indices ascending by player, then type indices ascending by
    /// player.
    Tabulated(Vec<Vec<f64>>),
    Custom(Arc<dyn PayoffFn>),
}

impl std::fmt::Debug for Payoffs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Payoffs::Tabulated(t) => write!(f, "Payoffs::Tabulated({} players)", t.len()),
            Payoffs::Custom(_) => write!(f, "Payoffs::Custom"),
        }
    }
}

/// Row-major flat index, first coordinate slowest.
pub fn flat_index(idx: &[usize], dims: &[usize]) -> usize {
    let mut out = 0;
    for (i, d) in idx.iter().zip(dims) {
        out = out * d + i;
    }
    out
}

/// Iterate all index tuples over `dims` in row-major order, reusing a
/// scratch buffer. Returns false when exhausted.
pub fn next_profile(idx: &mut [usize], dims: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// An n-player Bayesian game on grids.
#[derive(Debug, Clone)]
pub struct BayesGame {
    spaces: Vec<DiscreteTypeSpace>,
    actions: Vec<ActionGrid>,
    prior: PriorSpec,
    payoffs: Payoffs,
}

/// One line of a validation report.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationItem {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub items: Vec<ValidationItem>,
    pub passed: bool,
}

impl ValidationReport {
    fn push(&mut self, check: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.items.push(ValidationItem {
            check: check.into(),
            passed,
            detail: detail.into(),
        });
    }
}

impl BayesGame {
    pub fn new(
        spaces: Vec<DiscreteTypeSpace>,
        actions: Vec<ActionGrid>,
        prior: PriorSpec,
        payoffs: Payoffs,
    ) -> Result<Self> {
        let n = spaces.len();
        if n < 2 {
            return Err(Error::Invalid {
                what: "game",
                reason: format!("need at least 2 players, got {n}"),
            });
        }
        if actions.len() != n {
            return Err(Error::LengthMismatch {
                what: "action grids",
                expected: n,
                got: actions.len(),
            });
        }
        let type_dims: Vec<usize> = spaces.iter().map(|s| s.len()).collect();
        match &prior {
            PriorSpec::Tabulated(q) => {
                let want: usize = type_dims.iter().product();
                if q.len() != want {
                    return Err(Error::LengthMismatch {
                        what: "tabulated prior",
                        expected: want,
                        got: q.len(),
                    });
                }
            }
            PriorSpec::ConditionallyIndependent(states) => {
                if states.is_empty() {
                    return Err(Error::Invalid {
                        what: "prior",
                        reason: "no states".into(),
                    });
                }
                for (j, st) in states.iter().enumerate() {
                    if st.densities.len() != n {
                        return Err(Error::LengthMismatch {
                            what: "state densities",
                            expected: n,
                            got: st.densities.len(),
                        });
                    }
                    for (i, d) in st.densities.iter().enumerate() {
                        if d.len() != type_dims[i] {
                            return Err(Error::Invalid {
                                what: "prior",
                                reason: format!(
                                    "state {j}, player {i}: density length {} != {}",
                                    d.len(),
                                    type_dims[i]
                                ),
                            });
                        }
                    }
                }
            }
        }
        if let Payoffs::Tabulated(tensors) = &payoffs {
            if tensors.len() != n {
                return Err(Error::LengthMismatch {
                    what: "payoff tensors",
                    expected: n,
                    got: tensors.len(),
                });
            }
            let want: usize = actions.iter().map(|a| a.len()).product::<usize>()
                * type_dims.iter().product::<usize>();
            for (i, t) in tensors.iter().enumerate() {
                if t.len() != want {
                    return Err(Error::Invalid {
                        what: "payoff tensor",
                        reason: format!("player {i}: length {} != {want}", t.len()),
                    });
                }
            }
        }
        Ok(Self {
            spaces,
            actions,
            prior,
            payoffs,
        })
    }

    pub fn num_players(&self) -> usize {
        self.spaces.len()
    }

    pub fn space(&self, i: usize) -> &DiscreteTypeSpace {
        &self.spaces[i]
    }

    pub fn spaces(&self) -> &[DiscreteTypeSpace] {
        &self.spaces
    }

    pub fn action_grid(&self, i: usize) -> &ActionGrid {
        &self.actions[i]
    }

    pub fn action_grids(&self) -> &[ActionGrid] {
        &self.actions
    }

    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    pub fn payoffs(&self) -> &Payoffs {
        &self.payoffs
    }

    pub fn type_dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.len()).collect()
    }

    pub fn action_dims(&self) -> Vec<usize> {
        self.actions.iter().map(|a| a.len()).collect()
    }

    /// Raw payoff u_i at an (action profile, type profile) index pair.
    pub fn payoff(&self, player: usize, a: &[usize], t: &[usize]) -> f64 {
        match &self.payoffs {
            Payoffs::Tabulated(tensors) => {
                let adims = self.action_dims();
                let tdims = self.type_dims();
                let idx = flat_index(a, &adims) * tdims.iter().product::<usize>()
                    + flat_index(t, &tdims);
                tensors[player][idx]
            }
            Payoffs::Custom(f) => f.eval(player, a, t),
        }
    }

    /// Prior density q at a type-profile index tuple. For CI priors this is
    /// the mixture Σ_j τ_j ∏_ℓ q_ℓ^j(t_ℓ).
    pub fn density(&self, t: &[usize]) -> f64 {
        match &self.prior {
            PriorSpec::Tabulated(q) => q[flat_index(t, &self.type_dims())],
            PriorSpec::ConditionallyIndependent(states) => {
                let mut total = 0.0;
                for st in states {
                    let mut prod = st.tau;
                    for (i, &ti) in t.iter().enumerate() {
                        prod *= st.densities[i][ti];
                    }
                    total += prod;
                }
                total
            }
        }
    }

    /// Density-weighted payoff w_i = u_i · q.
    pub fn density_weighted_payoff(&self, player: usize, a: &[usize], t: &[usize]) -> f64 {
        self.payoff(player, a, t) * self.density(t)
    }

    /// Σ over opponents' cells of q(t_i, t_{-i}) · ∏_{ℓ≠i} λ_ℓ(t_ℓ), per fine
    /// cell of player `i`. Equals 1 everywhere when q is a proper density
    /// with the stated marginals.
    pub fn marginal_density(&self, player: usize) -> Vec<f64> {
        let n = self.num_players();
        let others: Vec<usize> = (0..n).filter(|&l| l != player).collect();
        let other_dims: Vec<usize> = others.iter().map(|&l| self.spaces[l].len()).collect();
        let mut out = vec![0.0; self.spaces[player].len()];
        let mut t = vec![0usize; n];
        for (ti, o) in out.iter_mut().enumerate() {
            t[player] = ti;
            let mut idx = vec![0usize; others.len()];
            let mut acc = 0.0;
            loop {
                let mut lam = 1.0;
                for (k, &l) in others.iter().enumerate() {
                    t[l] = idx[k];
                    lam *= self.spaces[l].mass(idx[k]);
                }
                acc += self.density(&t) * lam;
                if !next_profile(&mut idx, &other_dims) {
                    break;
                }
            }
            *o = acc;
        }
        out
    }

    /// Check all structural invariants. Failures are report items, never
    /// panics or errors.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport {
            items: Vec::new(),
            passed: true,
        };
        for (i, space) in self.spaces.iter().enumerate() {
            let total: f64 = space.cells().iter().map(|c| c.mass).sum();
            report.push(
                format!("player {i}: type masses sum to 1"),
                (total - 1.0).abs() <= 1e-12,
                format!("sum = {total:.17}"),
            );
            report.push(
                format!("player {i}: nowhere-equivalence surrogate"),
                space.splittable(),
                "every coarse cell needs >= 2 positive-mass fine cells".to_string(),
            );
        }
        match &self.prior {
            PriorSpec::Tabulated(_) => {
                let mut total = 0.0;
                let dims = self.type_dims();
                let mut t = vec![0usize; dims.len()];
                loop {
                    let mut lam = 1.0;
                    for (i, &ti) in t.iter().enumerate() {
                        lam *= self.spaces[i].mass(ti);
                    }
                    total += self.density(&t) * lam;
                    if !next_profile(&mut t, &dims) {
                        break;
                    }
                }
                report.push(
                    "prior: q integrates to 1",
                    (total - 1.0).abs() <= 1e-10,
                    format!("integral = {total:.17}"),
                );
            }
            PriorSpec::ConditionallyIndependent(states) => {
                let tau_sum: f64 = states.iter().map(|s| s.tau).sum();
                report.push(
                    "prior: state weights sum to 1",
                    (tau_sum - 1.0).abs() <= 1e-12,
                    format!("sum = {tau_sum:.17}"),
                );
                for (j, st) in states.iter().enumerate() {
                    for (i, dens) in st.densities.iter().enumerate() {
                        let nonneg = dens.iter().all(|&x| x >= 0.0);
                        report.push(
                            format!("prior state {j}, player {i}: density nonnegative"),
                            nonneg,
                            String::new(),
                        );
                        let integral: f64 = dens
                            .iter()
                            .enumerate()
                            .map(|(c, &x)| x * self.spaces[i].mass(c))
                            .sum();
                        report.push(
                            format!("prior state {j}, player {i}: density integrates to 1"),
                            (integral - 1.0).abs() <= 1e-10,
                            format!("integral = {integral:.17}"),
                        );
                    }
                }
            }
        }
        for i in 0..self.num_players() {
            let marg = self.marginal_density(i);
            let mut worst = 0.0f64;
            let mut worst_cell = 0;
            for (c, &m) in marg.iter().enumerate() {
                let dev = (m - 1.0).abs();
                if dev > worst {
                    worst = dev;
                    worst_cell = c;
                }
            }
            report.push(
                format!("player {i}: marginal density of q is 1"),
                worst <= 1e-6,
                format!("worst cell {worst_cell}, deviation {worst:.3e}"),
            );
        }
        report.push(
            "payoffs finite",
            self.payoffs_finite(),
            "sampled action/type profiles".to_string(),
        );
        report
    }

    /// |u_i| finite on a deterministic sample of profiles (full scan when the
    /// product space is small, strided otherwise).
    fn payoffs_finite(&self) -> bool {
        let adims = self.action_dims();
        let tdims = self.type_dims();
        let a_total: usize = adims.iter().product();
        let t_total: usize = tdims.iter().product();
        let a_step = a_total.div_ceil(256);
        let t_step = t_total.div_ceil(256);
        let unflatten = |mut flat: usize, dims: &[usize], out: &mut [usize]| {
            for k in (0..dims.len()).rev() {
                out[k] = flat % dims[k];
                flat /= dims[k];
            }
        };
        let mut a = vec![0usize; adims.len()];
        let mut t = vec![0usize; tdims.len()];
        let mut fa = 0;
        while fa < a_total {
            unflatten(fa, &adims, &mut a);
            let mut ft = 0;
            while ft < t_total {
                unflatten(ft, &tdims, &mut t);
                for i in 0..self.num_players() {
                    if !self.payoff(i, &a, &t).is_finite() {
                        return false;
                    }
                }
                ft += t_step;
            }
            fa += a_step;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::uniform_grid_space;

    struct OwnAction;
    impl PayoffFn for OwnAction {
        fn eval(&self, player: usize, a: &[usize], _t: &[usize]) -> f64 {
            a[player] as f64
        }
    }

    fn uniform_game() -> BayesGame {
        let spaces = vec![
            uniform_grid_space("t1", 4, 0.0, 1.0, 2).unwrap(),
            uniform_grid_space("t2", 4, 0.0, 1.0, 2).unwrap(),
        ];
        let actions = vec![
            ActionGrid::uniform(3, 0.0, 1.0).unwrap(),
            ActionGrid::uniform(3, 0.0, 1.0).unwrap(),
        ];
        let prior = PriorSpec::Tabulated(vec![1.0; 16]);
        BayesGame::new(spaces, actions, prior, Payoffs::Custom(Arc::new(OwnAction))).unwrap()
    }

    #[test]
    fn independent_uniform_prior_has_unit_density() {
        let game = uniform_game();
        assert_eq!(game.density(&[1, 2]), 1.0);
        assert_eq!(
            game.density_weighted_payoff(0, &[2, 1], &[0, 3]),
            game.payoff(0, &[2, 1], &[0, 3])
        );
        let marg = game.marginal_density(0);
        for m in marg {
            assert!((m - 1.0).abs() <= 1e-12);
        }
        assert!(game.validate().passed);
    }

    #[test]
    fn ci_density_matches_tabulated_mixture() {
        let spaces = vec![
            uniform_grid_space("t1", 2, 0.0, 1.0, 1).unwrap(),
            uniform_grid_space("t2", 2, 0.0, 1.0, 1).unwrap(),
        ];
        let states = vec![
            CiState {
                tau: 0.25,
                densities: vec![vec![0.5, 1.5], vec![1.0, 1.0]],
            },
            CiState {
                tau: 0.75,
                densities: vec![vec![1.0, 1.0], vec![2.0, 0.0]],
            },
        ];
        // Tabulate the same mixture by hand.
        let mut tab = vec![0.0; 4];
        for t1 in 0..2 {
            for t2 in 0..2 {
                let mut q = 0.0;
                for st in &states {
                    q += st.tau * st.densities[0][t1] * st.densities[1][t2];
                }
                tab[t1 * 2 + t2] = q;
            }
        }
        let actions = vec![
            ActionGrid::uniform(2, 0.0, 1.0).unwrap(),
            ActionGrid::uniform(2, 0.0, 1.0).unwrap(),
        ];
        let ci = BayesGame::new(
            spaces.clone(),
            actions.clone(),
            PriorSpec::ConditionallyIndependent(states),
            Payoffs::Custom(Arc::new(OwnAction)),
        )
        .unwrap();
        let tabbed = BayesGame::new(
            spaces,
            actions,
            PriorSpec::Tabulated(tab),
            Payoffs::Custom(Arc::new(OwnAction)),
        )
        .unwrap();
        for t1 in 0..2 {
            for t2 in 0..2 {
                let d = (ci.density(&[t1, t2]) - tabbed.density(&[t1, t2])).abs();
                assert!(d <= 1e-15);
            }
        }
    }

    #[test]
    fn validate_flags_bad_state_weights() {
        let spaces = vec![
            uniform_grid_space("t1", 2, 0.0, 1.0, 1).unwrap(),
            uniform_grid_space("t2", 2, 0.0, 1.0, 1).unwrap(),
        ];
        let states = vec![CiState {
            tau: 0.9,
            densities: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
        }];
        let game = BayesGame::new(
            spaces,
            vec![
                ActionGrid::uniform(2, 0.0, 1.0).unwrap(),
                ActionGrid::uniform(2, 0.0, 1.0).unwrap(),
            ],
            PriorSpec::ConditionallyIndependent(states),
            Payoffs::Custom(Arc::new(OwnAction)),
        )
        .unwrap();
        let report = game.validate();
        assert!(!report.passed);
        assert!(report
            .items
            .iter()
            .any(|it| it.check.contains("state weights") && !it.passed));
    }

    #[test]
    fn validate_flags_unsplittable_coarse_cell() {
        let spaces = vec![
            uniform_grid_space("t1", 2, 0.0, 1.0, 1).unwrap(), // one fine cell per coarse
            uniform_grid_space("t2", 2, 0.0, 1.0, 2).unwrap(),
        ];
        let game = BayesGame::new(
            spaces,
            vec![
                ActionGrid::uniform(2, 0.0, 1.0).unwrap(),
                ActionGrid::uniform(2, 0.0, 1.0).unwrap(),
            ],
            PriorSpec::Tabulated(vec![1.0; 4]),
            Payoffs::Custom(Arc::new(OwnAction)),
        )
        .unwrap();
        let report = game.validate();
        assert!(!report.passed);
        assert!(report
            .items
            .iter()
            .any(|it| it.check.contains("surrogate") && !it.passed));
    }

    #[test]
    fn scaling_payoff_scales_w_exactly() {
        let game = uniform_game();
        struct Scaled(f64);
        impl PayoffFn for Scaled {
            fn eval(&self, player: usize, a: &[usize], _t: &[usize]) -> f64 {
                self.0 * a[player] as f64
            }
        }
        let scaled = BayesGame::new(
            game.spaces().to_vec(),
            game.action_grids().to_vec(),
            PriorSpec::Tabulated(vec![1.0; 16]),
            Payoffs::Custom(Arc::new(Scaled(3.0))),
        )
        .unwrap();
        for a in 0..3 {
            let w = game.density_weighted_payoff(0, &[a, 1], &[2, 2]);
            let ws = scaled.density_weighted_payoff(0, &[a, 1], &[2, 2]);
            assert_eq!(ws, 3.0 * w);
        }
    }
}
