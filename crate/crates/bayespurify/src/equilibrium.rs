//! Expected and interim payoffs, best responses, ε-equilibrium gaps, and a
//! damped best-response (fictitious-play) solver for behavioral equilibria.
//!
//! The interim payoff has two routes: a direct conditional double sum over
//! opponents' types and actions, and a factorized route through a DCPI
//! decomposition that pools opponents per coarse cell under the component
//! measures. The two agree up to float noise whenever the decomposition
//! reconstructs the density-weighted payoff, and the direct route serves as
//! the oracle throughout the tests.

use crate::dcpi::DcpiDecomposition;
use crate::error::{Error, Result};
use crate::game::{next_profile, BayesGame};

/// Per-player behavioral strategies: a row-stochastic matrix fine cell ×
/// action for every player.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavioralProfile {
    rows: Vec<Vec<Vec<f64>>>,
}

impl BehavioralProfile {
    pub fn new(rows: Vec<Vec<Vec<f64>>>, game: &BayesGame) -> Result<Self> {
        if rows.len() != game.num_players() {
            return Err(Error::LengthMismatch {
                what: "behavioral profile players",
                expected: game.num_players(),
                got: rows.len(),
            });
        }
        for (i, player_rows) in rows.iter().enumerate() {
            if player_rows.len() != game.space(i).len() {
                return Err(Error::LengthMismatch {
                    what: "behavioral profile cells",
                    expected: game.space(i).len(),
                    got: player_rows.len(),
                });
            }
            for (c, row) in player_rows.iter().enumerate() {
                if row.len() != game.action_grid(i).len() {
                    return Err(Error::LengthMismatch {
                        what: "behavioral profile actions",
                        expected: game.action_grid(i).len(),
                        got: row.len(),
                    });
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > 1e-12 || row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(Error::Invalid {
                        what: "behavioral profile",
                        reason: format!("player {i}, cell {c}: row not a distribution"),
                    });
                }
            }
        }
        Ok(Self { rows })
    }

    /// Uniform mixing over every action at every cell.
    pub fn uniform(game: &BayesGame) -> Self {
        let rows = (0..game.num_players())
            .map(|i| {
                let a = game.action_grid(i).len();
                vec![vec![1.0 / a as f64; a]; game.space(i).len()]
            })
            .collect();
        Self { rows }
    }

    /// Dirac rows at a pure profile's choices.
    pub fn from_pure(pure: &PureProfile, game: &BayesGame) -> Self {
        let rows = (0..game.num_players())
            .map(|i| {
                let a = game.action_grid(i).len();
                pure.choices[i]
                    .iter()
                    .map(|&choice| {
                        let mut row = vec![0.0; a];
                        row[choice] = 1.0;
                        row
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn row(&self, player: usize, cell: usize) -> &[f64] {
        &self.rows[player][cell]
    }

    pub fn player(&self, player: usize) -> &[Vec<f64>] {
        &self.rows[player]
    }

    pub fn players(&self) -> &[Vec<Vec<f64>>] {
        &self.rows
    }

    pub fn rows_mut(&mut self) -> &mut Vec<Vec<Vec<f64>>> {
        &mut self.rows
    }
}

/// Per-player pure strategies: an action index per fine cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureProfile {
    pub choices: Vec<Vec<usize>>,
}

impl PureProfile {
    pub fn new(choices: Vec<Vec<usize>>, game: &BayesGame) -> Result<Self> {
        if choices.len() != game.num_players() {
            return Err(Error::LengthMismatch {
                what: "pure profile players",
                expected: game.num_players(),
                got: choices.len(),
            });
        }
        for (i, per_cell) in choices.iter().enumerate() {
            if per_cell.len() != game.space(i).len() {
                return Err(Error::LengthMismatch {
                    what: "pure profile cells",
                    expected: game.space(i).len(),
                    got: per_cell.len(),
                });
            }
            let bound = game.action_grid(i).len();
            if let Some(&bad) = per_cell.iter().find(|&&a| a >= bound) {
                return Err(Error::IndexOutOfRange {
                    what: "pure profile action",
                    index: bad,
                    bound,
                });
            }
        }
        Ok(Self { choices })
    }
}

/// Exact-grid expected payoff of a behavioral profile, per player.
pub fn expected_payoff(game: &BayesGame, profile: &BehavioralProfile) -> Vec<f64> {
    let n = game.num_players();
    let tdims = game.type_dims();
    let adims = game.action_dims();
    let mut out = vec![0.0; n];
    let mut t = vec![0usize; n];
    let mut a = vec![0usize; n];
    loop {
        let mut lam = 1.0;
        for (l, &tl) in t.iter().enumerate() {
            lam *= game.space(l).mass(tl);
        }
        if lam != 0.0 {
            a.fill(0);
            loop {
                let mut gprod = 1.0;
                for (l, &al) in a.iter().enumerate() {
                    gprod *= profile.rows[l][t[l]][al];
                    if gprod == 0.0 {
                        break;
                    }
                }
                if gprod != 0.0 {
                    let q = game.density(&t);
                    for (i, o) in out.iter_mut().enumerate() {
                        let w = game.payoff(i, &a, &t) * q;
                        *o += lam * (w * gprod);
                    }
                }
                if !next_profile(&mut a, &adims) {
                    break;
                }
            }
        }
        if !next_profile(&mut t, &tdims) {
            break;
        }
    }
    out
}

/// Exact-grid expected payoff of a pure profile, per player.
pub fn expected_payoff_pure(game: &BayesGame, profile: &PureProfile) -> Vec<f64> {
    let n = game.num_players();
    let tdims = game.type_dims();
    let mut out = vec![0.0; n];
    let mut t = vec![0usize; n];
    let mut a = vec![0usize; n];
    loop {
        let mut lam = 1.0;
        for (l, &tl) in t.iter().enumerate() {
            lam *= game.space(l).mass(tl);
        }
        if lam != 0.0 {
            for (l, &tl) in t.iter().enumerate() {
                a[l] = profile.choices[l][tl];
            }
            let q = game.density(&t);
            for (i, o) in out.iter_mut().enumerate() {
                *o += lam * (game.payoff(i, &a, &t) * q);
            }
        }
        if !next_profile(&mut t, &tdims) {
            break;
        }
    }
    out
}

/// Direct interim payoff of `player`: for every (own cell, own action), the
/// conditional double sum over opponents' cells and actions of
/// w_i(a,t) · ∏_{ℓ≠i} g_ℓ(t_ℓ;a_ℓ) · ∏_{ℓ≠i} λ_ℓ(t_ℓ).
pub fn interim_payoff_direct(
    game: &BayesGame,
    player: usize,
    profile: &BehavioralProfile,
) -> Vec<Vec<f64>> {
    let n = game.num_players();
    if n == 2 {
        return interim_direct_two_player(game, player, profile);
    }
    let own_cells = game.space(player).len();
    let own_actions = game.action_grid(player).len();
    let others: Vec<usize> = (0..n).filter(|&l| l != player).collect();
    let other_tdims: Vec<usize> = others.iter().map(|&l| game.space(l).len()).collect();
    let other_adims: Vec<usize> = others.iter().map(|&l| game.action_grid(l).len()).collect();
    let mut out = vec![vec![0.0; own_actions]; own_cells];
    let mut t = vec![0usize; n];
    let mut a = vec![0usize; n];
    for ti in 0..own_cells {
        t[player] = ti;
        let mut tidx = vec![0usize; others.len()];
        loop {
            let mut lam = 1.0;
            for (k, &l) in others.iter().enumerate() {
                t[l] = tidx[k];
                lam *= game.space(l).mass(tidx[k]);
            }
            if lam != 0.0 {
                let q = game.density(&t);
                let mut aidx = vec![0usize; others.len()];
                loop {
                    let mut gprod = 1.0;
                    for (k, &l) in others.iter().enumerate() {
                        a[l] = aidx[k];
                        gprod *= profile.rows[l][t[l]][aidx[k]];
                        if gprod == 0.0 {
                            break;
                        }
                    }
                    if gprod != 0.0 {
                        let weight = lam * gprod * q;
                        for (ai, slot) in out[ti].iter_mut().enumerate() {
                            a[player] = ai;
                            *slot += weight * game.payoff(player, &a, &t);
                        }
                    }
                    if !next_profile(&mut aidx, &other_adims) {
                        break;
                    }
                }
            }
            if !next_profile(&mut tidx, &other_tdims) {
                break;
            }
        }
    }
    out
}

fn interim_direct_two_player(
    game: &BayesGame,
    player: usize,
    profile: &BehavioralProfile,
) -> Vec<Vec<f64>> {
    let opp = 1 - player;
    let own_cells = game.space(player).len();
    let opp_cells = game.space(opp).len();
    let own_actions = game.action_grid(player).len();
    let opp_actions = game.action_grid(opp).len();
    let mut out = vec![vec![0.0; own_actions]; own_cells];
    let mut t = [0usize; 2];
    let mut a = [0usize; 2];
    for ti in 0..own_cells {
        t[player] = ti;
        let row_out = &mut out[ti];
        for to in 0..opp_cells {
            t[opp] = to;
            let lam = game.space(opp).mass(to);
            if lam == 0.0 {
                continue;
            }
            let ql = lam * game.density(&t);
            if ql == 0.0 {
                continue;
            }
            let grow = &profile.rows[opp][to];
            for (ao, &p) in grow.iter().enumerate().take(opp_actions) {
                if p == 0.0 {
                    continue;
                }
                a[opp] = ao;
                let weight = ql * p;
                for (ai, slot) in row_out.iter_mut().enumerate() {
                    a[player] = ai;
                    *slot += weight * game.payoff(player, &a, &t);
                }
            }
        }
    }
    out
}

/// Part values of a decomposition sampled at coarse-cell representative
/// profiles (each coarse cell's first fine cell), for every action profile.
/// Built once and reused across solver iterations: the parts are constant,
/// only the pooled opponent masses change.
pub struct CoarseParts {
    num_components: usize,
    adims: Vec<usize>,
    cdims: Vec<usize>,
    /// [j * n + i] -> flat [d_flat * A_total + a_flat].
    values: Vec<Vec<f64>>,
}

impl CoarseParts {
    pub fn build(game: &BayesGame, decomp: &DcpiDecomposition) -> Self {
        let n = game.num_players();
        let adims = game.action_dims();
        let cdims: Vec<usize> = (0..n).map(|i| game.space(i).coarse().len()).collect();
        let a_total: usize = adims.iter().product();
        let c_total: usize = cdims.iter().product();
        let num_components = decomp.num_components();
        let mut values = vec![vec![0.0; a_total * c_total]; num_components * n];
        let mut t = vec![0usize; n];
        let mut a = vec![0usize; n];
        let mut d = vec![0usize; n];
        for j in 0..num_components {
            for i in 0..n {
                let slot = &mut values[j * n + i];
                d.fill(0);
                let mut d_flat = 0;
                loop {
                    for (l, &dl) in d.iter().enumerate() {
                        t[l] = game.space(l).coarse().members(dl)[0];
                    }
                    a.fill(0);
                    let mut a_flat = 0;
                    loop {
                        slot[d_flat * a_total + a_flat] = decomp.part(j, i, &a, &t);
                        a_flat += 1;
                        if !next_profile(&mut a, &adims) {
                            break;
                        }
                    }
                    d_flat += 1;
                    if !next_profile(&mut d, &cdims) {
                        break;
                    }
                }
            }
        }
        Self {
            num_components,
            adims,
            cdims,
            values,
        }
    }
}

/// Pooled opponent masses per component and opponent:
/// m[j][k][D][a] = Σ_{t∈D} g_ℓ(t;a)·ρ^j_ℓ(t)·λ_ℓ(t) for the k-th opponent ℓ.
fn pool_opponents(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    others: &[usize],
    profile: &BehavioralProfile,
) -> Vec<Vec<Vec<Vec<f64>>>> {
    let num_j = decomp.num_components();
    let mut pooled = Vec::with_capacity(num_j);
    for j in 0..num_j {
        let mut per_opp = Vec::with_capacity(others.len());
        for &l in others {
            let coarse = game.space(l).coarse();
            let actions = game.action_grid(l).len();
            let mut m = vec![vec![0.0; actions]; coarse.len()];
            let rho = decomp.rho(j, l);
            for (d, bucket) in m.iter_mut().enumerate() {
                for &cell in coarse.members(d) {
                    let weight = rho[cell] * game.space(l).mass(cell);
                    if weight == 0.0 {
                        continue;
                    }
                    for (slot, &p) in bucket.iter_mut().zip(&profile.rows[l][cell]) {
                        *slot += p * weight;
                    }
                }
            }
            per_opp.push(m);
        }
        pooled.push(per_opp);
    }
    pooled
}

/// Component sums at coarse resolution: `S[j][D_i][a_i]` =
/// Σ_{D_{-i}} Σ_{a_{-i}} w^j_i(a, D) · ∏_{ℓ≠i} m_{jℓ}(D_ℓ, a_ℓ). These are
/// the component interim payoffs before the own weights ρ^j_i are applied;
/// they are constant across fine cells within a coarse cell.
pub fn component_sums(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    parts: &CoarseParts,
    player: usize,
    profile: &BehavioralProfile,
) -> Vec<Vec<Vec<f64>>> {
    let n = game.num_players();
    let others: Vec<usize> = (0..n).filter(|&l| l != player).collect();
    let pooled = pool_opponents(game, decomp, &others, profile);
    let num_j = parts.num_components;
    let own_actions = parts.adims[player];
    let own_coarse = parts.cdims[player];
    let a_total: usize = parts.adims.iter().product();
    let mut sums = vec![vec![vec![0.0; own_actions]; own_coarse]; num_j];

    if n == 2 {
        let opp = 1 - player;
        let opp_actions = parts.adims[opp];
        let opp_coarse = parts.cdims[opp];
        for j in 0..num_j {
            let vals = &parts.values[j * n + player];
            for di in 0..own_coarse {
                for dopp in 0..opp_coarse {
                    let d_flat = if player == 0 {
                        di * opp_coarse + dopp
                    } else {
                        dopp * own_coarse + di
                    };
                    let base = d_flat * a_total;
                    let m_row = &pooled[j][0][dopp];
                    for (ai, slot) in sums[j][di].iter_mut().enumerate() {
                        let mut acc = 0.0;
                        if player == 0 {
                            let row = &vals[base + ai * opp_actions..base + (ai + 1) * opp_actions];
                            for (w, &m) in row.iter().zip(m_row) {
                                acc += w * m;
                            }
                        } else {
                            for (ao, &m) in m_row.iter().enumerate() {
                                acc += vals[base + ao * own_actions + ai] * m;
                            }
                        }
                        *slot += acc;
                    }
                }
            }
        }
        return sums;
    }

    // Generic n: odometer over opponents' coarse cells and actions.
    let other_cdims: Vec<usize> = others.iter().map(|&l| parts.cdims[l]).collect();
    let other_adims: Vec<usize> = others.iter().map(|&l| parts.adims[l]).collect();
    let mut d = vec![0usize; n];
    let mut a = vec![0usize; n];
    for j in 0..num_j {
        for di in 0..own_coarse {
            d[player] = di;
            let mut didx = vec![0usize; others.len()];
            loop {
                for (k, &l) in others.iter().enumerate() {
                    d[l] = didx[k];
                }
                let d_flat = flat_index_slice(&d, &parts.cdims);
                let mut aidx = vec![0usize; others.len()];
                loop {
                    let mut mass = 1.0;
                    for (k, _) in others.iter().enumerate() {
                        mass *= pooled[j][k][didx[k]][aidx[k]];
                        if mass == 0.0 {
                            break;
                        }
                    }
                    if mass != 0.0 {
                        for (k, &l) in others.iter().enumerate() {
                            a[l] = aidx[k];
                        }
                        let vals = &parts.values[j * n + player];
                        for (ai, slot) in sums[j][di].iter_mut().enumerate() {
                            a[player] = ai;
                            let a_flat = flat_index_slice(&a, &parts.adims);
                            *slot += mass * vals[d_flat * a_total + a_flat];
                        }
                    }
                    if !next_profile(&mut aidx, &other_adims) {
                        break;
                    }
                }
                if !next_profile(&mut didx, &other_cdims) {
                    break;
                }
            }
        }
    }
    sums
}

fn flat_index_slice(idx: &[usize], dims: &[usize]) -> usize {
    let mut out = 0;
    for (i, d) in idx.iter().zip(dims) {
        out = out * d + i;
    }
    out
}

fn expand_to_fine(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    player: usize,
    sums: &[Vec<Vec<f64>>],
) -> Vec<Vec<f64>> {
    let own_cells = game.space(player).len();
    let own_actions = game.action_grid(player).len();
    let mut out = vec![vec![0.0; own_actions]; own_cells];
    for (ti, row) in out.iter_mut().enumerate() {
        let di = game.space(player).coarse_of(ti);
        for (j, per_j) in sums.iter().enumerate() {
            let r = decomp.rho(j, player)[ti];
            if r == 0.0 {
                continue;
            }
            for (ai, slot) in row.iter_mut().enumerate() {
                *slot += r * per_j[di][ai];
            }
        }
    }
    out
}

/// Factorized interim payoff through a DCPI decomposition:
/// V(t_i,a_i) = Σ_j ρ^j_i(t_i) Σ_{D_{-i}} Σ_{a_{-i}} w^j_i · ∏_{ℓ≠i} m_{jℓ},
/// where m_{jℓ}(D,a) pools g_ℓ(·;a)·ρ^j_ℓ·λ_ℓ over the coarse cell D and the
/// parts w^j are read at each coarse cell's first fine cell.
pub fn interim_payoff(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    player: usize,
    profile: &BehavioralProfile,
) -> Vec<Vec<f64>> {
    let parts = CoarseParts::build(game, decomp);
    let sums = component_sums(game, decomp, &parts, player, profile);
    expand_to_fine(game, decomp, player, &sums)
}

/// Same as [`interim_payoff`] with a prebuilt part cache.
pub fn interim_payoff_with_parts(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    parts: &CoarseParts,
    player: usize,
    profile: &BehavioralProfile,
) -> Vec<Vec<f64>> {
    let sums = component_sums(game, decomp, parts, player, profile);
    expand_to_fine(game, decomp, player, &sums)
}

/// Per-cell argmax of an interim matrix, ties to the lowest action index.
pub fn greedy_selection(interim: &[Vec<f64>]) -> Vec<usize> {
    interim
        .iter()
        .map(|row| {
            let mut best = 0;
            let mut best_v = f64::NEG_INFINITY;
            for (a, &v) in row.iter().enumerate() {
                if v > best_v {
                    best_v = v;
                    best = a;
                }
            }
            best
        })
        .collect()
}

fn gap_from_interim(
    game: &BayesGame,
    player: usize,
    profile: &BehavioralProfile,
    interim: &[Vec<f64>],
) -> f64 {
    let mut best_total = 0.0;
    let mut current_total = 0.0;
    for (ti, row) in interim.iter().enumerate() {
        let lam = game.space(player).mass(ti);
        if lam == 0.0 {
            continue;
        }
        let mut best = f64::NEG_INFINITY;
        let mut current = 0.0;
        for (a, &v) in row.iter().enumerate() {
            best = best.max(v);
            current += profile.rows[player][ti][a] * v;
        }
        best_total += lam * best;
        current_total += lam * current;
    }
    (best_total - current_total).max(0.0)
}

/// Best response of `player` against the opponents in `profile`: the
/// per-cell argmax strategy and the expected-payoff gain over the player's
/// own current strategy.
pub fn best_response(
    game: &BayesGame,
    decomp: Option<&DcpiDecomposition>,
    player: usize,
    profile: &BehavioralProfile,
) -> (Vec<usize>, f64) {
    let interim = match decomp {
        Some(d) => interim_payoff(game, d, player, profile),
        None => interim_payoff_direct(game, player, profile),
    };
    let choice = greedy_selection(&interim);
    let gap = gap_from_interim(game, player, profile, &interim);
    (choice, gap)
}

fn best_response_cached(
    game: &BayesGame,
    route: Option<(&DcpiDecomposition, &CoarseParts)>,
    player: usize,
    profile: &BehavioralProfile,
) -> (Vec<usize>, f64) {
    let interim = match route {
        Some((d, parts)) => interim_payoff_with_parts(game, d, parts, player, profile),
        None => interim_payoff_direct(game, player, profile),
    };
    let choice = greedy_selection(&interim);
    let gap = gap_from_interim(game, player, profile, &interim);
    (choice, gap)
}

/// Max gain any player can get from a unilateral pure deviation, computed
/// through the direct interim route. A profile is an ε-equilibrium iff the
/// max entry is ≤ ε.
pub fn epsilon_gap(game: &BayesGame, profile: &BehavioralProfile) -> Vec<f64> {
    (0..game.num_players())
        .map(|i| {
            let interim = interim_payoff_direct(game, i, profile);
            gap_from_interim(game, i, profile, &interim)
        })
        .collect()
}

pub fn epsilon_gap_pure(game: &BayesGame, profile: &PureProfile) -> Vec<f64> {
    epsilon_gap(game, &BehavioralProfile::from_pure(profile, game))
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub max_iters: usize,
    pub tol: f64,
    pub damping: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            tol: 1e-3,
            damping: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub gaps: Vec<f64>,
    pub converged: bool,
    pub profile: BehavioralProfile,
    pub seed: u64,
}

/// Damped fictitious play: every iteration each player computes a best
/// response to the current profile, and rows move toward the Dirac response
/// with step α_k = damping/(k+1). Convergence is declared when the max
/// best-response gap falls at or below `tol`; it is verified a posteriori by
/// [`epsilon_gap`]. Deterministic given the options.
pub fn solve_behavioral(
    game: &BayesGame,
    decomp: Option<&DcpiDecomposition>,
    opts: SolveOptions,
) -> SolveReport {
    let n = game.num_players();
    let parts = decomp.map(|d| (d, CoarseParts::build(game, d)));
    let route = parts.as_ref().map(|(d, p)| (*d, p));
    let mut profile = BehavioralProfile::uniform(game);
    let mut gaps = vec![f64::INFINITY; n];
    let mut iterations = 0;
    let mut converged = false;
    for k in 0..=opts.max_iters {
        let mut responses = Vec::with_capacity(n);
        for i in 0..n {
            let (choice, gap) = best_response_cached(game, route, i, &profile);
            gaps[i] = gap;
            responses.push(choice);
        }
        if gaps.iter().cloned().fold(0.0f64, f64::max) <= opts.tol {
            converged = true;
            break;
        }
        if k == opts.max_iters {
            break;
        }
        let alpha = opts.damping / (k as f64 + 1.0);
        for i in 0..n {
            for (cell, row) in profile.rows[i].iter_mut().enumerate() {
                for p in row.iter_mut() {
                    *p *= 1.0 - alpha;
                }
                row[responses[i][cell]] += alpha;
            }
        }
        iterations = k + 1;
    }
    SolveReport {
        iterations,
        gaps,
        converged,
        profile,
        seed: opts.seed,
    }
}
