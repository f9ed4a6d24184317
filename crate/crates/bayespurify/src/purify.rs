//! Conditional purification: convert a behavioral profile into a pure
//! profile that matches conditional action distributions on every coarse
//! cell, preserves expected payoffs up to a quantization residual, and never
//! leaves the behavioral supports.
//!
//! Exact purification needs atomless type spaces; on a finite grid the best
//! achievable is an ε-purification whose per-action mass error inside each
//! coarse cell is at most one fine-cell mass. The residual is a first-class
//! report field, not an afterthought.
//!
//! Per player and per coarse cell the continuous transportation relaxation
//! x(t,a) ∈ [0, λ(t)], Σ_a x(t,a) = λ(t), x = 0 off support has the exact
//! optimum x = λ·g (all targets met, objective 0), so the work is in the
//! integral rounding: a largest-remainder style assignment (largest remaining
//! action deficit first, ties to the lowest action index, cells in mass-then-
//! index order) followed by a deterministic local improvement sweep over
//! single-cell moves and pair swaps.

use rand::Rng;
use serde::Serialize;

use crate::dcpi::DcpiDecomposition;
use crate::equilibrium::{
    epsilon_gap, epsilon_gap_pure, interim_payoff_direct, solve_behavioral, BehavioralProfile,
    PureProfile, SolveOptions, SolveReport,
};
use crate::error::{Error, Result};
use crate::game::BayesGame;
use crate::rng::substream;

const MOMENT_WEIGHT: f64 = 1e-3;
const DEVIATION_SAMPLES: usize = 10;
const DEVIATION_TAG: u64 = 0xdeb1;

#[derive(Debug, Clone, Copy)]
pub struct PurifyOptions {
    /// supp g_i(t) = { a : g_i(t;a) > support_eps }.
    pub support_eps: f64,
    pub seed: u64,
}

impl Default for PurifyOptions {
    fn default() -> Self {
        Self {
            support_eps: 1e-12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayerPurifyReport {
    /// Per coarse cell: ½ Σ_a |assigned − target| / λ(D) (conditional TV).
    pub per_cell_tv: Vec<f64>,
    /// Per component k: Σ over coarse cells of |Σ_a V_k(D,a)·(assigned−target)|.
    pub moment_residuals: Vec<f64>,
    /// U_i(f) − U_i(g) over the fully purified profile.
    pub payoff_delta: f64,
    /// |U_i(h, f_{-i}) − U_i(h, g_{-i})| for seeded random deviations h.
    pub deviation_deltas: Vec<f64>,
    /// Coarse cells with a single fine cell but a nondegenerate behavioral
    /// row: purification cannot be exact there (nowhere-equivalence
    /// surrogate failure).
    pub surrogate_failures: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PurifyReport {
    pub per_player: Vec<PlayerPurifyReport>,
    pub seed: u64,
}

impl PurifyReport {
    pub fn max_conditional_tv(&self) -> f64 {
        self.per_player
            .iter()
            .flat_map(|p| p.per_cell_tv.iter().cloned())
            .fold(0.0, f64::max)
    }

    /// Σ over players and coarse cells of the absolute per-action mass error.
    pub fn total_mass_residual(&self, game: &BayesGame) -> f64 {
        self.per_player
            .iter()
            .enumerate()
            .map(|(i, p)| {
                p.per_cell_tv
                    .iter()
                    .enumerate()
                    .map(|(d, tv)| 2.0 * tv * game.space(i).coarse().mass(d))
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Interim moments of the components: V_k(D_i, a_i) per component k, coarse
/// cell and own action. These are constant across fine cells of a coarse
/// cell because the parts w^k are.
pub fn component_interim(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    player: usize,
    profile: &BehavioralProfile,
) -> Vec<Vec<Vec<f64>>> {
    let parts = crate::equilibrium::CoarseParts::build(game, decomp);
    crate::equilibrium::component_sums(game, decomp, &parts, player, profile)
}

struct CellProblem<'a> {
    game: &'a BayesGame,
    player: usize,
    /// Fine cells of the coarse cell, ascending.
    cells: Vec<usize>,
    /// Per local cell: supported action indices, ascending.
    supports: Vec<Vec<usize>>,
    /// Per-action fractional targets T_a = Σ λ(t)·g(t;a).
    targets: Vec<f64>,
    /// V_k(D, a) rows for the moment terms.
    moments: Vec<Vec<f64>>,
}

impl CellProblem<'_> {
    fn objective(&self, assigned: &[f64]) -> f64 {
        let mut tv = 0.0;
        for (a, &m) in assigned.iter().enumerate() {
            tv += (m - self.targets[a]).abs();
        }
        let mut moment = 0.0;
        for row in &self.moments {
            let mut dev = 0.0;
            for (a, &m) in assigned.iter().enumerate() {
                dev += row[a] * (m - self.targets[a]);
            }
            moment += dev.abs();
        }
        0.5 * tv + MOMENT_WEIGHT * moment
    }

    /// Deterministic rounding: largest-remaining-deficit assignment followed
    /// by a local improvement sweep (single moves, then swaps).
    fn solve(&self) -> Vec<usize> {
        let k = self.cells.len();
        let num_actions = self.targets.len();
        let mass = |local: usize| self.game.space(self.player).mass(self.cells[local]);

        // Mass-descending order, ties by ascending fine-cell index.
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| {
            mass(y)
                .partial_cmp(&mass(x))
                .unwrap()
                .then(self.cells[x].cmp(&self.cells[y]))
        });

        let mut assigned_mass = vec![0.0f64; num_actions];
        let mut choice = vec![usize::MAX; k];
        for &local in &order {
            let mut best_a = self.supports[local][0];
            let mut best_deficit = f64::NEG_INFINITY;
            for &a in &self.supports[local] {
                let deficit = self.targets[a] - assigned_mass[a];
                if deficit > best_deficit {
                    best_deficit = deficit;
                    best_a = a;
                }
            }
            choice[local] = best_a;
            assigned_mass[best_a] += mass(local);
        }

        // Local improvement on the rounding objective. First-improvement,
        // ascending cells/actions, so the result is deterministic. Column
        // sums are recomputed from the choices for every candidate;
        // incremental apply/revert would accumulate rounding drift.
        let recompute = |choice: &[usize]| {
            let mut sums = vec![0.0f64; num_actions];
            for (local, &a) in choice.iter().enumerate() {
                sums[a] += mass(local);
            }
            sums
        };
        let mut current = self.objective(&assigned_mass);
        for _ in 0..64 {
            let mut improved = false;
            for local in 0..k {
                let from = choice[local];
                for &to in &self.supports[local] {
                    if to == from {
                        continue;
                    }
                    choice[local] = to;
                    let candidate = self.objective(&recompute(&choice));
                    if candidate < current - 1e-15 {
                        current = candidate;
                        improved = true;
                        break;
                    }
                    choice[local] = from;
                }
            }
            for x in 0..k {
                for y in (x + 1)..k {
                    let (ax, ay) = (choice[x], choice[y]);
                    if ax == ay
                        || !self.supports[x].contains(&ay)
                        || !self.supports[y].contains(&ax)
                    {
                        continue;
                    }
                    choice.swap(x, y);
                    let candidate = self.objective(&recompute(&choice));
                    if candidate < current - 1e-15 {
                        current = candidate;
                        improved = true;
                    } else {
                        choice.swap(x, y);
                    }
                }
            }
            if !improved {
                break;
            }
        }
        choice
    }
}

/// Random behavioral deviation for one player (normalized uniforms).
pub fn random_deviation(game: &BayesGame, player: usize, seed: u64, sample: u64) -> Vec<Vec<f64>> {
    let mut rng = substream(seed, &[DEVIATION_TAG, player as u64, sample]);
    let actions = game.action_grid(player).len();
    (0..game.space(player).len())
        .map(|_| {
            let mut row: Vec<f64> = (0..actions).map(|_| rng.random::<f64>() + 1e-3).collect();
            let sum: f64 = row.iter().sum();
            for p in row.iter_mut() {
                *p /= sum;
            }
            row
        })
        .collect()
}

/// Expected payoff of playing `rows` against the opponents behind an interim
/// matrix: Σ_t λ(t) Σ_a rows(t;a)·V(t,a).
fn value_against(game: &BayesGame, player: usize, rows: &[Vec<f64>], interim: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (t, row) in rows.iter().enumerate() {
        let lam = game.space(player).mass(t);
        if lam == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (a, &p) in row.iter().enumerate() {
            if p != 0.0 {
                inner += p * interim[t][a];
            }
        }
        total += lam * inner;
    }
    total
}

/// |U_i(h, f_{-i}) − U_i(h, g_{-i})| for seeded random deviations h, from the
/// two precomputed interim matrices.
fn deviation_deltas(
    game: &BayesGame,
    player: usize,
    interim_f: &[Vec<f64>],
    interim_g: &[Vec<f64>],
    seed: u64,
) -> Vec<f64> {
    (0..DEVIATION_SAMPLES as u64)
        .map(|s| {
            let dev = random_deviation(game, player, seed, s);
            (value_against(game, player, &dev, interim_f)
                - value_against(game, player, &dev, interim_g))
            .abs()
        })
        .collect()
}

/// Conditionally purify `g`: per player and coarse cell, round the
/// fractional flow λ·g to an integral assignment within the behavioral
/// supports. Belief consistency is exact by construction.
pub fn purify(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    g: &BehavioralProfile,
    opts: PurifyOptions,
) -> Result<(PureProfile, PurifyReport)> {
    let n = game.num_players();
    let mut choices: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut partial: Vec<PlayerPurifyReport> = Vec::with_capacity(n);

    for i in 0..n {
        let space = game.space(i);
        let actions = game.action_grid(i).len();
        let moments = component_interim(game, decomp, i, g);
        let mut per_cell_tv = vec![0.0; space.coarse().len()];
        let mut moment_residuals = vec![0.0; decomp.num_components()];
        let mut surrogate_failures = Vec::new();
        let mut choice = vec![0usize; space.len()];

        for d in 0..space.coarse().len() {
            let cells: Vec<usize> = space.coarse().members(d).to_vec();
            let mut supports = Vec::with_capacity(cells.len());
            for &t in &cells {
                let supp: Vec<usize> = (0..actions)
                    .filter(|&a| g.row(i, t)[a] > opts.support_eps)
                    .collect();
                if supp.is_empty() {
                    return Err(Error::EmptySupport { player: i, cell: t });
                }
                supports.push(supp);
            }
            let positive_cells = cells.iter().filter(|&&t| space.mass(t) > 0.0).count();
            let nondegenerate = cells
                .iter()
                .zip(&supports)
                .any(|(&t, supp)| space.mass(t) > 0.0 && supp.len() > 1);
            if positive_cells == 1 && nondegenerate {
                surrogate_failures.push(d);
            }

            let mut targets = vec![0.0f64; actions];
            for &t in &cells {
                let lam = space.mass(t);
                for (a, &p) in g.row(i, t).iter().enumerate() {
                    if p > opts.support_eps {
                        targets[a] += lam * p;
                    }
                }
            }
            let moment_rows: Vec<Vec<f64>> =
                moments.iter().map(|per_j| per_j[d].clone()).collect();
            let problem = CellProblem {
                game,
                player: i,
                cells: cells.clone(),
                supports,
                targets: targets.clone(),
                moments: moment_rows.clone(),
            };
            let local_choice = problem.solve();
            let mut assigned = vec![0.0f64; actions];
            for (local, &t) in cells.iter().enumerate() {
                choice[t] = local_choice[local];
                assigned[local_choice[local]] += space.mass(t);
            }
            let dmass = space.coarse().mass(d);
            if dmass > 0.0 {
                let tv: f64 = assigned
                    .iter()
                    .zip(&targets)
                    .map(|(m, t)| (m - t).abs())
                    .sum();
                per_cell_tv[d] = 0.5 * tv / dmass;
            }
            for (k, row) in moment_rows.iter().enumerate() {
                let dev: f64 = row
                    .iter()
                    .zip(assigned.iter().zip(&targets))
                    .map(|(v, (m, t))| v * (m - t))
                    .sum();
                moment_residuals[k] += dev.abs();
            }
        }

        choices.push(choice);
        partial.push(PlayerPurifyReport {
            per_cell_tv,
            moment_residuals,
            payoff_delta: 0.0,
            deviation_deltas: Vec::new(),
            surrogate_failures,
        });
    }

    let pure = PureProfile::new(choices, game)?;
    let f_prof = BehavioralProfile::from_pure(&pure, game);
    for (i, player_report) in partial.iter_mut().enumerate() {
        let interim_f = interim_payoff_direct(game, i, &f_prof);
        let interim_g = interim_payoff_direct(game, i, g);
        let u_f = value_against(game, i, f_prof.player(i), &interim_f);
        let u_g = value_against(game, i, g.player(i), &interim_g);
        player_report.payoff_delta = u_f - u_g;
        player_report.deviation_deltas = deviation_deltas(game, i, &interim_f, &interim_g, opts.seed);
    }

    Ok((
        pure,
        PurifyReport {
            per_player: partial,
            seed: opts.seed,
        },
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct PurificationCheck {
    pub check: String,
    pub passed: bool,
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyPurificationReport {
    pub checks: Vec<PurificationCheck>,
    pub pass: bool,
}

/// Check the three purification properties at tolerance `tol`:
/// payoff equivalence (own payoffs and seeded unilateral deviations),
/// conditional distribution equivalence per coarse cell and grid action,
/// and exact belief consistency.
pub fn verify_purification(
    game: &BayesGame,
    g: &BehavioralProfile,
    f: &PureProfile,
    tol: f64,
    support_eps: f64,
    seed: u64,
) -> VerifyPurificationReport {
    type InterimPair = (Vec<Vec<f64>>, Vec<Vec<f64>>);
    let n = game.num_players();
    let f_prof = BehavioralProfile::from_pure(f, game);
    let mut checks = Vec::new();

    let interims: Vec<InterimPair> = (0..n)
        .map(|i| {
            (
                interim_payoff_direct(game, i, &f_prof),
                interim_payoff_direct(game, i, g),
            )
        })
        .collect();
    let worst_u = (0..n)
        .map(|i| {
            let u_f = value_against(game, i, f_prof.player(i), &interims[i].0);
            let u_g = value_against(game, i, g.player(i), &interims[i].1);
            (u_f - u_g).abs()
        })
        .fold(0.0f64, f64::max);
    checks.push(PurificationCheck {
        check: "payoff equivalence (own)".into(),
        passed: worst_u <= tol,
        worst: worst_u,
        detail: format!("max |U_i(f) − U_i(g)| = {worst_u:.3e}"),
    });

    let mut worst_dev = 0.0f64;
    for (i, (interim_f, interim_g)) in interims.iter().enumerate() {
        for delta in deviation_deltas(game, i, interim_f, interim_g, seed) {
            worst_dev = worst_dev.max(delta);
        }
    }
    checks.push(PurificationCheck {
        check: "payoff equivalence (sampled deviations)".into(),
        passed: worst_dev <= tol,
        worst: worst_dev,
        detail: format!("{DEVIATION_SAMPLES} deviations per player, max delta {worst_dev:.3e}"),
    });

    let mut worst_cd = 0.0f64;
    let mut worst_where = String::new();
    for i in 0..n {
        let space = game.space(i);
        let actions = game.action_grid(i).len();
        for d in 0..space.coarse().len() {
            let mut diff = vec![0.0f64; actions];
            for &t in space.coarse().members(d) {
                let lam = space.mass(t);
                for (a, slot) in diff.iter_mut().enumerate() {
                    *slot += lam * g.row(i, t)[a];
                }
                diff[f.choices[i][t]] -= lam;
            }
            for (a, &x) in diff.iter().enumerate() {
                if x.abs() > worst_cd {
                    worst_cd = x.abs();
                    worst_where = format!("player {i}, coarse cell {d}, action {a}");
                }
            }
        }
    }
    checks.push(PurificationCheck {
        check: "conditional distribution equivalence".into(),
        passed: worst_cd <= tol,
        worst: worst_cd,
        detail: format!("max |∫_D f − ∫_D g| = {worst_cd:.3e} at {worst_where}"),
    });

    let mut violations = Vec::new();
    for i in 0..n {
        for t in 0..game.space(i).len() {
            if game.space(i).mass(t) > 0.0 && g.row(i, t)[f.choices[i][t]] <= support_eps {
                violations.push(format!("player {i}, cell {t}"));
            }
        }
    }
    checks.push(PurificationCheck {
        check: "belief consistency".into(),
        passed: violations.is_empty(),
        worst: violations.len() as f64,
        detail: if violations.is_empty() {
            "every purified action lies in the behavioral support".into()
        } else {
            format!("violations at {}", violations.join("; "))
        },
    });

    let pass = checks.iter().all(|c| c.passed);
    VerifyPurificationReport { checks, pass }
}

#[derive(Debug, Clone)]
pub struct PurifiedEquilibrium {
    /// Present when the behavioral profile came from the solver.
    pub solve: Option<SolveReport>,
    /// The behavioral profile that was purified.
    pub behavioral: BehavioralProfile,
    pub purify: PurifyReport,
    pub pure: PureProfile,
    /// Direct-oracle gaps of the behavioral profile.
    pub behavioral_gaps: Vec<f64>,
    /// Direct-oracle gaps of the purified profile.
    pub pure_gaps: Vec<f64>,
    /// Payoff-scale constant C (max |w_i| over a deterministic profile
    /// sample) for the preservation bound gap(f) ≤ gap(g) + C·Σ residuals.
    pub bound_constant: f64,
    pub mass_residual: f64,
}

/// Max |w_i| over a deterministic stride of (action, type) profiles.
pub fn payoff_scale(game: &BayesGame) -> f64 {
    use crate::game::next_profile;
    let adims = game.action_dims();
    let tdims = game.type_dims();
    let a_total: usize = adims.iter().product();
    let a_step = a_total.div_ceil(128);
    let unflatten = |mut flat: usize, dims: &[usize], out: &mut [usize]| {
        for k in (0..dims.len()).rev() {
            out[k] = flat % dims[k];
            flat /= dims[k];
        }
    };
    let mut worst = 0.0f64;
    let mut a = vec![0usize; adims.len()];
    let mut fa = 0;
    while fa < a_total {
        unflatten(fa, &adims, &mut a);
        let mut t = vec![0usize; tdims.len()];
        loop {
            for i in 0..game.num_players() {
                worst = worst.max(game.density_weighted_payoff(i, &a, &t).abs());
            }
            if !next_profile(&mut t, &tdims) {
                break;
            }
        }
        fa += a_step;
    }
    worst
}

/// Solve for a behavioral ε-equilibrium, purify it, and measure both gaps
/// with the direct oracle.
pub fn purified_equilibrium(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    solve_opts: SolveOptions,
    purify_opts: PurifyOptions,
) -> Result<PurifiedEquilibrium> {
    let solve = solve_behavioral(game, Some(decomp), solve_opts);
    let behavioral = solve.profile.clone();
    let mut out = purify_profile(game, decomp, behavioral, purify_opts)?;
    out.solve = Some(solve);
    Ok(out)
}

/// Purify a supplied behavioral profile (no solving) and measure both gaps
/// with the direct oracle.
pub fn purify_profile(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    behavioral: BehavioralProfile,
    purify_opts: PurifyOptions,
) -> Result<PurifiedEquilibrium> {
    let (pure, purify_report) = purify(game, decomp, &behavioral, purify_opts)?;
    let behavioral_gaps = epsilon_gap(game, &behavioral);
    let pure_gaps = epsilon_gap_pure(game, &pure);
    let bound_constant = payoff_scale(game);
    let mass_residual = purify_report.total_mass_residual(game);
    Ok(PurifiedEquilibrium {
        solve: None,
        behavioral,
        purify: purify_report,
        pure,
        behavioral_gaps,
        pure_gaps,
        bound_constant,
        mass_residual,
    })
}
