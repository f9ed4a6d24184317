//! Decompositions of density-weighted payoffs into coarse action-relevant
//! parts times action-irrelevant weights, their numerical verification, and
//! the constructor for conditionally-independent-state games.
//!
//! A decomposition holds J components; component j carries, per player i, a
//! part w^j_i over (action profile, type profile) that must be constant on
//! coarse-cell profiles, and per player ℓ a nonnegative weight vector ρ^j_ℓ
//! over fine cells. It reconstructs w_i(a,t) = Σ_j w^j_i(a,t)·∏_ℓ ρ^j_ℓ(t_ℓ).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{flat_index, next_profile, ActionGrid, BayesGame, CiState, PayoffFn, Payoffs, PriorSpec};
use crate::measure::DiscreteTypeSpace;

/// Action-relevant part of one component.
#[derive(Clone)]
pub enum ComponentPart {
    /// Per player, flat row-major over (action profile, type profile).
    Tabulated(Vec<Vec<f64>>),
    Custom(Arc<dyn PayoffFn>),
}

impl std::fmt::Debug for ComponentPart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentPart::Tabulated(_) => write!(f, "ComponentPart::Tabulated"),
            ComponentPart::Custom(_) => write!(f, "ComponentPart::Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DcpiComponent {
    pub w: ComponentPart,
    /// Per player, per fine cell.
    pub rho: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct DcpiDecomposition {
    components: Vec<DcpiComponent>,
    action_dims: Vec<usize>,
    type_dims: Vec<usize>,
}

impl DcpiDecomposition {
    pub fn new(game: &BayesGame, components: Vec<DcpiComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid {
                what: "decomposition",
                reason: "needs at least one component".into(),
            });
        }
        let n = game.num_players();
        let action_dims = game.action_dims();
        let type_dims = game.type_dims();
        let flat = action_dims.iter().product::<usize>() * type_dims.iter().product::<usize>();
        for (j, comp) in components.iter().enumerate() {
            if comp.rho.len() != n {
                return Err(Error::LengthMismatch {
                    what: "component rho",
                    expected: n,
                    got: comp.rho.len(),
                });
            }
            for (l, rho) in comp.rho.iter().enumerate() {
                if rho.len() != type_dims[l] {
                    return Err(Error::Invalid {
                        what: "decomposition",
                        reason: format!(
                            "component {j}, player {l}: rho length {} != {}",
                            rho.len(),
                            type_dims[l]
                        ),
                    });
                }
            }
            if let ComponentPart::Tabulated(tensors) = &comp.w {
                if tensors.len() != n || tensors.iter().any(|t| t.len() != flat) {
                    return Err(Error::Invalid {
                        what: "decomposition",
                        reason: format!("component {j}: w tensor shape mismatch"),
                    });
                }
            }
        }
        Ok(Self {
            components,
            action_dims,
            type_dims,
        })
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[DcpiComponent] {
        &self.components
    }

    pub fn rho(&self, component: usize, player: usize) -> &[f64] {
        &self.components[component].rho[player]
    }

    /// w^j_i at an index pair.
    pub fn part(&self, component: usize, player: usize, a: &[usize], t: &[usize]) -> f64 {
        match &self.components[component].w {
            ComponentPart::Tabulated(tensors) => {
                let idx = flat_index(a, &self.action_dims)
                    * self.type_dims.iter().product::<usize>()
                    + flat_index(t, &self.type_dims);
                tensors[player][idx]
            }
            ComponentPart::Custom(f) => f.eval(player, a, t),
        }
    }

    /// Σ_j w^j_i(a,t)·∏_ℓ ρ^j_ℓ(t_ℓ).
    pub fn reconstruct(&self, player: usize, a: &[usize], t: &[usize]) -> f64 {
        let mut total = 0.0;
        for (j, comp) in self.components.iter().enumerate() {
            let mut prod = self.part(j, player, a, t);
            for (l, &tl) in t.iter().enumerate() {
                prod *= comp.rho[l][tl];
            }
            total += prod;
        }
        total
    }
}

/// Per-(component, player) measurability summary.
#[derive(Debug, Clone, Serialize)]
pub struct SpreadEntry {
    pub component: usize,
    pub player: usize,
    /// Coarse-cell index per player.
    pub coarse_profile: Vec<usize>,
    /// Max over sampled action profiles of (max − min) of w^j_i over fine
    /// profiles inside this coarse profile.
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DcpiReport {
    /// Max over (a, t) of |w_i − Σ_j w^j_i ∏ ρ^j| per player.
    pub reconstruction_error: Vec<f64>,
    pub reconstruction_pass: bool,
    /// Largest within-coarse-profile spread over all components/players.
    pub max_measurability_spread: f64,
    /// Entries with spread > tol.
    pub measurability_violations: Vec<SpreadEntry>,
    /// (component, player, cell) with ρ < 0; checked strictly.
    pub negative_rho: Vec<(usize, usize, usize)>,
    /// Nowhere-equivalence surrogate per player.
    pub surrogate: Vec<bool>,
    pub tol: f64,
    pub pass: bool,
}

/// Options for [`verify_dcpi`]. `action_sample` caps how many action
/// profiles the scans visit (deterministic stride); `None` scans all.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub action_sample: Option<usize>,
}

pub fn verify_dcpi(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    tol: f64,
    opts: VerifyOptions,
) -> Result<DcpiReport> {
    let n = game.num_players();
    let adims = game.action_dims();
    let tdims = game.type_dims();
    if decomp.action_dims != adims || decomp.type_dims != tdims {
        return Err(Error::Invalid {
            what: "decomposition",
            reason: "shape does not match the game".into(),
        });
    }
    let a_total: usize = adims.iter().product();
    let a_step = match opts.action_sample {
        Some(cap) if cap > 0 => a_total.div_ceil(cap),
        _ => 1,
    };
    let unflatten = |mut flat: usize, dims: &[usize], out: &mut [usize]| {
        for k in (0..dims.len()).rev() {
            out[k] = flat % dims[k];
            flat /= dims[k];
        }
    };

    // (a) reconstruction error.
    let mut reconstruction_error = vec![0.0f64; n];
    {
        let mut a = vec![0usize; n];
        let mut fa = 0;
        while fa < a_total {
            unflatten(fa, &adims, &mut a);
            let mut t = vec![0usize; n];
            loop {
                for (i, err) in reconstruction_error.iter_mut().enumerate() {
                    let w = game.density_weighted_payoff(i, &a, &t);
                    let back = decomp.reconstruct(i, &a, &t);
                    *err = err.max((w - back).abs());
                }
                if !next_profile(&mut t, &tdims) {
                    break;
                }
            }
            fa += a_step;
        }
    }

    // (b) measurability: bucket fine profiles into coarse profiles.
    let coarse_dims: Vec<usize> = (0..n).map(|i| game.space(i).coarse().len()).collect();
    let coarse_total: usize = coarse_dims.iter().product();
    let mut spreads = vec![vec![0.0f64; coarse_total]; decomp.num_components() * n];
    {
        let mut lo = vec![f64::INFINITY; coarse_total];
        let mut hi = vec![f64::NEG_INFINITY; coarse_total];
        let mut coarse_idx = vec![0usize; n];
        for j in 0..decomp.num_components() {
            for i in 0..n {
                let slot = j * n + i;
                let mut a = vec![0usize; n];
                let mut fa = 0;
                while fa < a_total {
                    unflatten(fa, &adims, &mut a);
                    lo.fill(f64::INFINITY);
                    hi.fill(f64::NEG_INFINITY);
                    let mut t = vec![0usize; n];
                    loop {
                        for (l, &tl) in t.iter().enumerate() {
                            coarse_idx[l] = game.space(l).coarse_of(tl);
                        }
                        let d = flat_index(&coarse_idx, &coarse_dims);
                        let v = decomp.part(j, i, &a, &t);
                        lo[d] = lo[d].min(v);
                        hi[d] = hi[d].max(v);
                        if !next_profile(&mut t, &tdims) {
                            break;
                        }
                    }
                    for d in 0..coarse_total {
                        if hi[d] >= lo[d] {
                            spreads[slot][d] = spreads[slot][d].max(hi[d] - lo[d]);
                        }
                    }
                    fa += a_step;
                }
            }
        }
    }
    let mut max_measurability_spread = 0.0f64;
    let mut measurability_violations = Vec::new();
    for j in 0..decomp.num_components() {
        for i in 0..n {
            let slot = j * n + i;
            for d in 0..coarse_total {
                let s = spreads[slot][d];
                max_measurability_spread = max_measurability_spread.max(s);
                if s > tol {
                    let mut profile = vec![0usize; n];
                    unflatten(d, &coarse_dims, &mut profile);
                    measurability_violations.push(SpreadEntry {
                        component: j,
                        player: i,
                        coarse_profile: profile,
                        spread: s,
                    });
                }
            }
        }
    }

    // (c) strict nonnegativity of ρ.
    let mut negative_rho = Vec::new();
    for (j, comp) in decomp.components.iter().enumerate() {
        for (l, rho) in comp.rho.iter().enumerate() {
            for (c, &r) in rho.iter().enumerate() {
                if r < 0.0 {
                    negative_rho.push((j, l, c));
                }
            }
        }
    }

    // (d) surrogate status.
    let surrogate: Vec<bool> = (0..n).map(|i| game.space(i).splittable()).collect();

    let reconstruction_pass = reconstruction_error.iter().all(|&e| e <= tol);
    let pass = reconstruction_pass
        && max_measurability_spread <= tol
        && negative_rho.is_empty()
        && surrogate.iter().all(|&s| s);
    Ok(DcpiReport {
        reconstruction_error,
        reconstruction_pass,
        max_measurability_spread,
        measurability_violations,
        negative_rho,
        surrogate,
        tol,
        pass,
    })
}

/// State-dependent payoff u_i(a, t_0j, t) for conditionally-independent
/// games: player, state index, then grid indices.
pub trait StatePayoffFn: Send + Sync {
    fn eval(&self, player: usize, state: usize, a: &[usize], t: &[usize]) -> f64;
}

/// Transition probability ν(t_0j | t) over states at one type profile.
pub fn state_posterior(states: &[CiState], t: &[usize]) -> Result<Vec<f64>> {
    let mut terms = Vec::with_capacity(states.len());
    let mut den = 0.0;
    for st in states {
        let mut prod = st.tau;
        for (l, &tl) in t.iter().enumerate() {
            prod *= st.densities[l][tl];
        }
        terms.push(prod);
        den += prod;
    }
    if den <= 0.0 {
        return Err(Error::ZeroNuDenominator { profile: t.to_vec() });
    }
    for term in terms.iter_mut() {
        *term /= den;
    }
    Ok(terms)
}

struct CollapsedPayoff {
    states: Vec<CiState>,
    payoffs: Arc<dyn StatePayoffFn>,
}

impl PayoffFn for CollapsedPayoff {
    fn eval(&self, player: usize, a: &[usize], t: &[usize]) -> f64 {
        // Denominator positivity is checked at construction.
        let nu = state_posterior(&self.states, t).expect("positive denominator");
        let mut total = 0.0;
        for (j, weight) in nu.iter().enumerate() {
            total += self.payoffs.eval(player, j, a, t) * weight;
        }
        total
    }
}

struct ScaledStatePart {
    tau: f64,
    state: usize,
    payoffs: Arc<dyn StatePayoffFn>,
}

impl PayoffFn for ScaledStatePart {
    fn eval(&self, player: usize, a: &[usize], t: &[usize]) -> f64 {
        self.tau * self.payoffs.eval(player, self.state, a, t)
    }
}

/// Build the equivalent state-free game and its decomposition from a
/// conditionally-independent-state model: the collapsed payoff is
/// v_i(a,t) = Σ_j u_i(a,t_0j,t)·ν(t_0j|t), and the decomposition takes
/// w^j_i = τ^j·u_i(a,t_0j,t) with ρ^j_ℓ = q^j_ℓ.
pub fn build_dcpi_from_ci(
    spaces: Vec<DiscreteTypeSpace>,
    actions: Vec<ActionGrid>,
    states: Vec<CiState>,
    state_payoffs: Arc<dyn StatePayoffFn>,
) -> Result<(BayesGame, DcpiDecomposition)> {
    let n = spaces.len();
    let tdims: Vec<usize> = spaces.iter().map(|s| s.len()).collect();

    // ν denominator must be positive at every type profile.
    {
        let mut t = vec![0usize; n];
        loop {
            let mut den = 0.0;
            for st in &states {
                let mut prod = st.tau;
                for (l, &tl) in t.iter().enumerate() {
                    prod *= st.densities[l][tl];
                }
                den += prod;
            }
            if den <= 0.0 {
                return Err(Error::ZeroNuDenominator { profile: t.clone() });
            }
            if !next_profile(&mut t, &tdims) {
                break;
            }
        }
    }

    // u_i(a, t_0j, ·) must be constant on coarse-cell profiles. Checked on a
    // deterministic sample of action profiles; verify_dcpi re-checks on the
    // collapsed game at whatever resolution the caller asks for.
    {
        let adims: Vec<usize> = actions.iter().map(|g| g.len()).collect();
        let a_total: usize = adims.iter().product();
        let a_step = a_total.div_ceil(64);
        let coarse_dims: Vec<usize> = spaces.iter().map(|s| s.coarse().len()).collect();
        let coarse_total: usize = coarse_dims.iter().product();
        let mut lo = vec![f64::INFINITY; coarse_total];
        let mut hi = vec![f64::NEG_INFINITY; coarse_total];
        let unflatten = |mut flat: usize, dims: &[usize], out: &mut [usize]| {
            for k in (0..dims.len()).rev() {
                out[k] = flat % dims[k];
                flat /= dims[k];
            }
        };
        let mut coarse_idx = vec![0usize; n];
        for j in 0..states.len() {
            for i in 0..n {
                let mut a = vec![0usize; n];
                let mut fa = 0;
                let mut spread = 0.0f64;
                while fa < a_total {
                    unflatten(fa, &adims, &mut a);
                    lo.fill(f64::INFINITY);
                    hi.fill(f64::NEG_INFINITY);
                    let mut t = vec![0usize; n];
                    loop {
                        for (l, &tl) in t.iter().enumerate() {
                            coarse_idx[l] = spaces[l].coarse_of(tl);
                        }
                        let d = flat_index(&coarse_idx, &coarse_dims);
                        let v = state_payoffs.eval(i, j, &a, &t);
                        lo[d] = lo[d].min(v);
                        hi[d] = hi[d].max(v);
                        if !next_profile(&mut t, &tdims) {
                            break;
                        }
                    }
                    for d in 0..coarse_total {
                        if hi[d] >= lo[d] {
                            spread = spread.max(hi[d] - lo[d]);
                        }
                    }
                    fa += a_step;
                }
                if spread > 1e-9 {
                    return Err(Error::NonMeasurableStatePayoff {
                        player: i,
                        state: j,
                        spread,
                    });
                }
            }
        }
    }

    let collapsed = Payoffs::Custom(Arc::new(CollapsedPayoff {
        states: states.clone(),
        payoffs: Arc::clone(&state_payoffs),
    }));
    let game = BayesGame::new(
        spaces,
        actions,
        PriorSpec::ConditionallyIndependent(states.clone()),
        collapsed,
    )?;

    let components = states
        .iter()
        .enumerate()
        .map(|(j, st)| DcpiComponent {
            w: ComponentPart::Custom(Arc::new(ScaledStatePart {
                tau: st.tau,
                state: j,
                payoffs: Arc::clone(&state_payoffs),
            })),
            rho: st.densities.clone(),
        })
        .collect();
    let decomp = DcpiDecomposition::new(&game, components)?;
    Ok((game, decomp))
}

/// Residual of one decomposition: max of reconstruction error and
/// measurability spread, i.e. how far it is from witnessing the condition.
pub fn decomposition_residual(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    opts: VerifyOptions,
) -> Result<f64> {
    let report = verify_dcpi(game, decomp, f64::INFINITY, opts)?;
    let recon = report
        .reconstruction_error
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    Ok(recon.max(report.max_measurability_spread))
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualCurve {
    /// Component counts of the supplied family, ascending.
    pub component_counts: Vec<usize>,
    /// Best (running-minimum) residual achievable with up to that many
    /// components; nonincreasing by construction.
    pub best_residuals: Vec<f64>,
    /// Smallest member count whose best residual meets `tol`, if any.
    pub smallest_passing: Option<usize>,
    pub tol: f64,
}

/// Evaluate a family of candidate decompositions and report the best
/// residual per component count.
pub fn decomposition_residual_curve(
    game: &BayesGame,
    family: &[&DcpiDecomposition],
    tol: f64,
    opts: VerifyOptions,
) -> Result<ResidualCurve> {
    if family.is_empty() {
        return Err(Error::Invalid {
            what: "decomposition family",
            reason: "empty".into(),
        });
    }
    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(family.len());
    for d in family {
        entries.push((d.num_components(), decomposition_residual(game, d, opts)?));
    }
    entries.sort_by_key(|&(j, _)| j);
    let mut component_counts = Vec::with_capacity(entries.len());
    let mut best_residuals = Vec::with_capacity(entries.len());
    let mut running = f64::INFINITY;
    let mut smallest_passing = None;
    for (j, r) in entries {
        running = running.min(r);
        component_counts.push(j);
        best_residuals.push(running);
        if smallest_passing.is_none() && running <= tol {
            smallest_passing = Some(j);
        }
    }
    Ok(ResidualCurve {
        component_counts,
        best_residuals,
        smallest_passing,
        tol,
    })
}

/// Identity decomposition: J = 1, ρ ≡ 1, w¹_i = w_i. Only a valid witness
/// when w_i is itself measurable w.r.t. the coarse partitions.
pub fn identity_decomposition(game: &BayesGame) -> Result<DcpiDecomposition> {
    // Evaluates the game's own w; captured via a thread-safe clone.
    #[derive(Clone)]
    struct GameW(Arc<BayesGame>);
    impl PayoffFn for GameW {
        fn eval(&self, player: usize, a: &[usize], t: &[usize]) -> f64 {
            self.0.density_weighted_payoff(player, a, t)
        }
    }
    let rho: Vec<Vec<f64>> = game
        .type_dims()
        .iter()
        .map(|&len| vec![1.0; len])
        .collect();
    let part = ComponentPart::Custom(Arc::new(GameW(Arc::new(game.clone()))));
    DcpiDecomposition::new(game, vec![DcpiComponent { w: part, rho }])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::uniform_grid_space;

    struct StateGame;
    impl StatePayoffFn for StateGame {
        fn eval(&self, player: usize, state: usize, a: &[usize], t: &[usize]) -> f64 {
            // Depends on types only through coarse labels (2 cells / coarse).
            let coarse = t[player] / 2;
            (state as f64 + 1.0) * (a[0] as f64 - a[1] as f64) + coarse as f64
        }
    }

    fn two_state_inputs() -> (Vec<DiscreteTypeSpace>, Vec<ActionGrid>, Vec<CiState>) {
        let spaces = vec![
            uniform_grid_space("t1", 4, 0.0, 1.0, 2).unwrap(),
            uniform_grid_space("t2", 4, 0.0, 1.0, 2).unwrap(),
        ];
        let actions = vec![
            ActionGrid::uniform(3, 0.0, 1.0).unwrap(),
            ActionGrid::uniform(3, 0.0, 1.0).unwrap(),
        ];
        // Per-state per-player densities w.r.t. the mixture marginal, built
        // so that Σ_j τ^j q^j ≡ 1 per cell.
        let up = vec![0.5, 0.9, 1.1, 1.5];
        let down: Vec<f64> = up.iter().map(|x| 2.0 - x).collect();
        let states = vec![
            CiState {
                tau: 0.5,
                densities: vec![up.clone(), down.clone()],
            },
            CiState {
                tau: 0.5,
                densities: vec![down, up],
            },
        ];
        (spaces, actions, states)
    }

    #[test]
    fn posterior_rows_sum_to_one() {
        let (_, _, states) = two_state_inputs();
        for t1 in 0..4 {
            for t2 in 0..4 {
                let nu = state_posterior(&states, &[t1, t2]).unwrap();
                let sum: f64 = nu.iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_states_give_half_posterior() {
        let spaces_dims = 4;
        let states = vec![
            CiState {
                tau: 0.5,
                densities: vec![vec![1.0; spaces_dims], vec![1.0; spaces_dims]],
            },
            CiState {
                tau: 0.5,
                densities: vec![vec![1.0; spaces_dims], vec![1.0; spaces_dims]],
            },
        ];
        let nu = state_posterior(&states, &[1, 3]).unwrap();
        assert!((nu[0] - 0.5).abs() <= 1e-15);
        assert!((nu[1] - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn ci_constructor_reconstructs_exactly() {
        let (spaces, actions, states) = two_state_inputs();
        let (game, decomp) =
            build_dcpi_from_ci(spaces, actions, states.clone(), Arc::new(StateGame)).unwrap();
        assert!(game.validate().passed);
        // Pointwise identity v_i·q = Σ_j τ^j u_i(·,j,·) ∏ q^j.
        let mut worst = 0.0f64;
        for i in 0..2 {
            for a1 in 0..3 {
                for a2 in 0..3 {
                    for t1 in 0..4 {
                        for t2 in 0..4 {
                            let w = game.density_weighted_payoff(i, &[a1, a2], &[t1, t2]);
                            let mut direct = 0.0;
                            for (j, st) in states.iter().enumerate() {
                                direct += st.tau
                                    * StateGame.eval(i, j, &[a1, a2], &[t1, t2])
                                    * st.densities[0][t1]
                                    * st.densities[1][t2];
                            }
                            worst = worst.max((w - direct).abs());
                        }
                    }
                }
            }
        }
        assert!(worst <= 1e-12, "worst pointwise error {worst}");
        let report = verify_dcpi(&game, &decomp, 1e-10, VerifyOptions::default()).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn single_state_collapses_to_identity() {
        let spaces = vec![
            uniform_grid_space("t1", 4, 0.0, 1.0, 2).unwrap(),
            uniform_grid_space("t2", 4, 0.0, 1.0, 2).unwrap(),
        ];
        let actions = vec![
            ActionGrid::uniform(2, 0.0, 1.0).unwrap(),
            ActionGrid::uniform(2, 0.0, 1.0).unwrap(),
        ];
        let states = vec![CiState {
            tau: 1.0,
            densities: vec![vec![1.0; 4], vec![1.0; 4]],
        }];
        let (game, decomp) =
            build_dcpi_from_ci(spaces, actions, states, Arc::new(StateGame)).unwrap();
        for t1 in 0..4 {
            for t2 in 0..4 {
                let nu = state_posterior(game.prior().states().unwrap(), &[t1, t2]).unwrap();
                assert_eq!(nu, vec![1.0]);
                let u = game.payoff(0, &[1, 0], &[t1, t2]);
                assert_eq!(u, StateGame.eval(0, 0, &[1, 0], &[t1, t2]));
            }
        }
        let report = verify_dcpi(&game, &decomp, 1e-12, VerifyOptions::default()).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn non_measurable_state_payoff_is_rejected() {
        let (spaces, actions, states) = two_state_inputs();
        struct FineDependent;
        impl StatePayoffFn for FineDependent {
            fn eval(&self, _player: usize, _state: usize, _a: &[usize], t: &[usize]) -> f64 {
                t[0] as f64 // varies within coarse cells
            }
        }
        let err = build_dcpi_from_ci(spaces, actions, states, Arc::new(FineDependent));
        assert!(matches!(err, Err(Error::NonMeasurableStatePayoff { .. })));
    }

    #[test]
    fn rho_scaling_by_powers_of_two_is_exact() {
        let (spaces, actions, states) = two_state_inputs();
        let (game, decomp) =
            build_dcpi_from_ci(spaces, actions, states, Arc::new(StateGame)).unwrap();
        // Scale player 0's rho by 4 and the matching w by 1/4; powers of two
        // keep floating point exact.
        struct Quarter(Arc<dyn PayoffFn>);
        impl PayoffFn for Quarter {
            fn eval(&self, player: usize, a: &[usize], t: &[usize]) -> f64 {
                0.25 * self.0.eval(player, a, t)
            }
        }
        let components = decomp
            .components()
            .iter()
            .map(|c| {
                let mut rho = c.rho.clone();
                for r in rho[0].iter_mut() {
                    *r *= 4.0;
                }
                let w = match &c.w {
                    ComponentPart::Custom(f) => {
                        ComponentPart::Custom(Arc::new(Quarter(Arc::clone(f))) as Arc<dyn PayoffFn>)
                    }
                    ComponentPart::Tabulated(t) => ComponentPart::Tabulated(
                        t.iter()
                            .map(|v| v.iter().map(|x| 0.25 * x).collect())
                            .collect(),
                    ),
                };
                DcpiComponent { w, rho }
            })
            .collect();
        let scaled = DcpiDecomposition::new(&game, components).unwrap();
        for a1 in 0..3 {
            for t1 in 0..4 {
                let x = decomp.reconstruct(0, &[a1, 1], &[t1, 2]);
                let y = scaled.reconstruct(0, &[a1, 1], &[t1, 2]);
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn residual_curve_is_monotone() {
        let (spaces, actions, states) = two_state_inputs();
        let (game, decomp) =
            build_dcpi_from_ci(spaces, actions, states, Arc::new(StateGame)).unwrap();
        let ident = identity_decomposition(&game).unwrap();
        let curve = decomposition_residual_curve(
            &game,
            &[&ident, &decomp],
            1e-10,
            VerifyOptions::default(),
        )
        .unwrap();
        assert_eq!(curve.component_counts, vec![1, 2]);
        assert!(curve.best_residuals[0] >= curve.best_residuals[1]);
        assert_eq!(curve.smallest_passing, Some(2));
    }

    #[test]
    fn empty_family_is_an_error() {
        let (spaces, actions, states) = two_state_inputs();
        let (game, _) = build_dcpi_from_ci(spaces, actions, states, Arc::new(StateGame)).unwrap();
        assert!(decomposition_residual_curve(&game, &[], 1e-10, VerifyOptions::default()).is_err());
    }
}
