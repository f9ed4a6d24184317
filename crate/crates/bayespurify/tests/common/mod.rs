#![allow(dead_code, clippy::needless_range_loop)]

//! Shared test infrastructure: random small-game generation, behavioral
//! profile sampling, and independent oracles.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bayespurify::dcpi::{build_dcpi_from_ci, DcpiDecomposition, StatePayoffFn};
use bayespurify::game::{ActionGrid, BayesGame, CiState};
use bayespurify::measure::{Cell, DiscreteTypeSpace};
use bayespurify::BehavioralProfile;

pub fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Random payoff values per (player, state, action profile, coarse
/// profile), measurable w.r.t. the coarse partitions by construction.
struct RandomStatePayoff {
    values: Vec<f64>,
    states: usize,
    actions: [usize; 2],
    coarse: [usize; 2],
    coarse_of: [Vec<usize>; 2],
}

impl StatePayoffFn for RandomStatePayoff {
    fn eval(&self, player: usize, state: usize, a: &[usize], t: &[usize]) -> f64 {
        let d0 = self.coarse_of[0][t[0]];
        let d1 = self.coarse_of[1][t[1]];
        let idx = ((((player * self.states + state) * self.actions[0] + a[0])
            * self.actions[1]
            + a[1])
            * self.coarse[0]
            + d0)
            * self.coarse[1]
            + d1;
        self.values[idx]
    }
}

/// Random two-player conditionally-independent game on small grids, with
/// its exact decomposition. Cells ≤ 8, actions ≤ 4, 1–2 states, positive
/// densities, mixture-consistent marginals.
pub fn random_ci_game(seed: u64, trial: u64) -> (BayesGame, DcpiDecomposition) {
    let mut rng = rng_for(seed, trial);
    let cells = 8usize;
    let coarse_factor = 4usize;
    let actions = [rng.random_range(2..=4usize), rng.random_range(2..=4usize)];
    let states = rng.random_range(1..=2usize);

    // Random per-state per-player mass vectors, normalized; the marginal is
    // the tau-mixture and the state densities are ratios against it.
    let taus: Vec<f64> = {
        let raw: Vec<f64> = (0..states).map(|_| rng.random::<f64>() + 0.2).collect();
        let sum: f64 = raw.iter().sum();
        raw.iter().map(|x| x / sum).collect()
    };
    let mut spaces = Vec::new();
    let mut state_densities: Vec<Vec<Vec<f64>>> = vec![Vec::new(); states]; // [j][player]
    for player in 0..2 {
        let masses_per_state: Vec<Vec<f64>> = (0..states)
            .map(|_| {
                let raw: Vec<f64> = (0..cells).map(|_| rng.random::<f64>() + 0.1).collect();
                let sum: f64 = raw.iter().sum();
                raw.iter().map(|x| x / sum).collect()
            })
            .collect();
        let lam: Vec<f64> = (0..cells)
            .map(|c| {
                (0..states)
                    .map(|j| taus[j] * masses_per_state[j][c])
                    .sum::<f64>()
            })
            .collect();
        let lam = {
            let sum: f64 = lam.iter().sum();
            lam.iter().map(|x| x / sum).collect::<Vec<f64>>()
        };
        for (j, per_state) in masses_per_state.iter().enumerate() {
            state_densities[j].push(
                per_state
                    .iter()
                    .zip(&lam)
                    .map(|(&p, &l)| p / l)
                    .collect(),
            );
        }
        let cell_vec: Vec<Cell> = (0..cells)
            .map(|c| Cell {
                point: vec![(2 * c + 1) as f64 / (2 * cells) as f64],
                mass: lam[c],
                coarse_label: c / coarse_factor,
            })
            .collect();
        spaces.push(DiscreteTypeSpace::new(format!("p{player}"), cell_vec).unwrap());
    }
    let ci_states: Vec<CiState> = (0..states)
        .map(|j| CiState {
            tau: taus[j],
            densities: state_densities[j].clone(),
        })
        .collect();

    let coarse = [cells / coarse_factor, cells / coarse_factor];
    let value_count = 2 * states * actions[0] * actions[1] * coarse[0] * coarse[1];
    let values: Vec<f64> = (0..value_count)
        .map(|_| rng.random::<f64>() * 2.0 - 1.0)
        .collect();
    let payoff = RandomStatePayoff {
        values,
        states,
        actions,
        coarse,
        coarse_of: [
            (0..cells).map(|c| c / coarse_factor).collect(),
            (0..cells).map(|c| c / coarse_factor).collect(),
        ],
    };
    let grids = vec![
        ActionGrid::uniform(actions[0], 0.0, 1.0).unwrap(),
        ActionGrid::uniform(actions[1], 0.0, 1.0).unwrap(),
    ];
    build_dcpi_from_ci(spaces, grids, ci_states, Arc::new(payoff)).unwrap()
}

/// Random behavioral profile with every entry bounded away from 0 and 1 so
/// perturbation tests have headroom.
pub fn random_profile(game: &BayesGame, seed: u64, trial: u64) -> BehavioralProfile {
    let mut rng = rng_for(seed.wrapping_add(0x9e37), trial);
    let rows = (0..game.num_players())
        .map(|i| {
            (0..game.space(i).len())
                .map(|_| {
                    let a = game.action_grid(i).len();
                    let mut row: Vec<f64> =
                        (0..a).map(|_| rng.random::<f64>() + 0.25).collect();
                    let sum: f64 = row.iter().sum();
                    for p in row.iter_mut() {
                        *p /= sum;
                    }
                    row
                })
                .collect()
        })
        .collect();
    BehavioralProfile::new(rows, game).unwrap()
}

/// A nonzero vector in the nullspace of the (J+1)×K moment matrix
/// M[j][t] = ρ^j(t)·λ(t) (row 0: ρ⁰ ≡ 1), by Gaussian elimination.
/// Returns `None` when the nullspace is trivial.
pub fn moment_nullspace_vector(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    player: usize,
    coarse_cell: usize,
) -> Option<Vec<f64>> {
    let members = game.space(player).coarse().members(coarse_cell);
    let k = members.len();
    let num_j = decomp.num_components();
    let rows = num_j + 1;
    if k <= rows {
        return None;
    }
    let mut m = vec![vec![0.0f64; k]; rows];
    for (col, &t) in members.iter().enumerate() {
        let lam = game.space(player).mass(t);
        m[0][col] = lam;
        for j in 0..num_j {
            m[j + 1][col] = decomp.rho(j, player)[t] * lam;
        }
    }
    // Row-reduce; record pivot columns.
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..k {
        if row >= rows {
            break;
        }
        let (best, best_val) = (row..rows)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if best_val < 1e-13 {
            continue;
        }
        m.swap(row, best);
        let p = m[row][col];
        for x in m[row].iter_mut() {
            *x /= p;
        }
        for r in 0..rows {
            if r != row && m[r][col] != 0.0 {
                let f = m[r][col];
                for c2 in 0..k {
                    m[r][c2] -= f * m[row][c2];
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free_col = (0..k).find(|c| !pivot_cols.contains(c))?;
    let mut delta = vec![0.0f64; k];
    delta[free_col] = 1.0;
    for (r, &pc) in pivot_cols.iter().enumerate() {
        delta[pc] = -m[r][free_col];
    }
    Some(delta)
}

/// Replace one opponent row-block with a strategy that has identical
/// regular conditional distributions under λ and under every component
/// measure ρ^j·λ, by shifting mass along a moment-nullspace direction
/// between the first two actions inside one coarse cell.
pub fn conditionally_equivalent_variant(
    game: &BayesGame,
    decomp: &DcpiDecomposition,
    profile: &BehavioralProfile,
    player: usize,
    coarse_cell: usize,
) -> Option<BehavioralProfile> {
    let delta = moment_nullspace_vector(game, decomp, player, coarse_cell)?;
    let members = game.space(player).coarse().members(coarse_cell);
    let mut rows: Vec<Vec<Vec<f64>>> = profile.players().to_vec();
    // Headroom-limited step so rows stay proper distributions.
    let mut limit = f64::INFINITY;
    for (local, &t) in members.iter().enumerate() {
        let d = delta[local];
        if d == 0.0 {
            continue;
        }
        let row = &rows[player][t];
        for (a, sign) in [(0usize, 1.0f64), (1usize, -1.0f64)] {
            let moved = sign * d;
            if moved > 0.0 {
                limit = limit.min((1.0 - row[a]) / moved);
            } else if moved < 0.0 {
                limit = limit.min(row[a] / -moved);
            }
        }
    }
    if !limit.is_finite() || limit <= 0.0 {
        return None;
    }
    let eps = 0.5 * limit;
    for (local, &t) in members.iter().enumerate() {
        let d = delta[local] * eps;
        rows[player][t][0] += d;
        rows[player][t][1] -= d;
    }
    Some(BehavioralProfile::new(rows, game).unwrap())
}

/// Zero-sum matrix game optimality certificate: returns the game value
/// guaranteed by `row_strategy` (its worst column payoff) and the cap
/// enforced by `col_strategy` (its best row payoff). The strategy pair is
/// optimal iff the two coincide — the linear-programming duality check.
pub fn zero_sum_certificate(
    matrix: &[Vec<f64>],
    row_strategy: &[f64],
    col_strategy: &[f64],
) -> (f64, f64) {
    let rows = matrix.len();
    let cols = matrix[0].len();
    let mut guarantee = f64::INFINITY;
    for c in 0..cols {
        let v: f64 = (0..rows).map(|r| row_strategy[r] * matrix[r][c]).sum();
        guarantee = guarantee.min(v);
    }
    let mut cap = f64::NEG_INFINITY;
    for row in matrix {
        let v: f64 = (0..cols).map(|c| row[c] * col_strategy[c]).sum();
        cap = cap.max(v);
    }
    (guarantee, cap)
}
