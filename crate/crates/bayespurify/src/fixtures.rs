//! Built-in games used as the test corpus.
//!
//! Where the source games leave payoff functions abstract ("bounded,
//! continuous"), the concrete formulas below are fixture choices, picked
//! smooth with interior best responses; they are documented as such and are
//! not data.
//!
//! Grid conventions: 1-D type spaces are uniform midpoint grids on \[0,1\]
//! with equal cell masses; 2-D type spaces are K×K product grids flattened
//! row-major (first coordinate slowest) with the coarse partition refining
//! only the first coordinate. Mixture priors are built from per-state
//! per-player mass vectors normalized exactly, so validation identities hold
//! to float precision rather than quadrature precision.

use std::sync::Arc;

use crate::dcpi::{
    build_dcpi_from_ci, identity_decomposition, ComponentPart, DcpiComponent, DcpiDecomposition,
    StatePayoffFn,
};
use crate::equilibrium::BehavioralProfile;
use crate::error::{Error, Result};
use crate::game::{ActionGrid, BayesGame, CiState, PayoffFn, Payoffs, PriorSpec};
use crate::measure::{Cell, DiscreteTypeSpace};

/// Common fixture knobs; `None` takes the per-fixture default.
#[derive(Debug, Clone, Default)]
pub struct FixtureParams {
    /// Fine cells per player (1-D types) or per dimension (2-D types).
    pub cells: Option<usize>,
    /// Fine cells per coarse cell (1-D types).
    pub coarse_factor: Option<usize>,
    /// Action grid size per player.
    pub actions: Option<usize>,
    /// Cycle length / branch count for cyclic and necessity.
    pub m: Option<usize>,
    /// State count for the all-pay fixture (1 = complete-information
    /// benchmark instance).
    pub states: Option<usize>,
}

/// A built fixture: the game, its decomposition when one is shipped, the
/// canonical behavioral profile where the construction names one, and the
/// continuous all-pay description used by the security probe.
pub struct Fixture {
    pub name: String,
    pub game: BayesGame,
    pub decomp: Option<DcpiDecomposition>,
    pub canonical: Option<BehavioralProfile>,
    pub allpay: Option<AllPaySpec>,
}

pub const FIXTURE_NAMES: [&str; 5] = ["example1", "cournot", "allpay", "cyclic", "necessity"];

pub fn fixture(name: &str, params: &FixtureParams) -> Result<Fixture> {
    match name {
        "example1" => {
            let cells = params.cells.unwrap_or(64);
            let cf = params.coarse_factor.unwrap_or(4);
            let actions = params.actions.unwrap_or(33);
            let (game, decomp) = example1(cells, cf, actions)?;
            Ok(Fixture {
                name: name.into(),
                game,
                decomp: Some(decomp),
                canonical: None,
                allpay: None,
            })
        }
        "cournot" => {
            let k = params.cells.unwrap_or(8);
            let actions = params.actions.unwrap_or(33);
            let (game, decomp) = cournot(k, actions)?;
            Ok(Fixture {
                name: name.into(),
                game,
                decomp: Some(decomp),
                canonical: None,
                allpay: None,
            })
        }
        "allpay" => {
            let states = params.states.unwrap_or(2);
            if states == 1 {
                let bids = params.actions.unwrap_or(64);
                let (game, decomp, spec) = allpay_complete_info(bids)?;
                Ok(Fixture {
                    name: name.into(),
                    game,
                    decomp: Some(decomp),
                    canonical: None,
                    allpay: Some(spec),
                })
            } else {
                let k = params.cells.unwrap_or(8);
                let actions = params.actions.unwrap_or(33);
                let (game, decomp, spec) = allpay(k, actions)?;
                Ok(Fixture {
                    name: name.into(),
                    game,
                    decomp: Some(decomp),
                    canonical: None,
                    allpay: Some(spec),
                })
            }
        }
        "cyclic" => {
            let m = params.m.unwrap_or(3);
            let cells = params.cells.unwrap_or(64);
            let cf = params.coarse_factor.unwrap_or(4);
            let actions = params.actions.unwrap_or(33);
            let game = cyclic(m, cells, cf, actions)?;
            Ok(Fixture {
                name: name.into(),
                game,
                decomp: None,
                canonical: None,
                allpay: None,
            })
        }
        "necessity" => {
            let m = params.m.unwrap_or(2);
            let cells = params.cells.unwrap_or(64);
            let cf = params.coarse_factor.unwrap_or(4);
            let (game, decomp, canonical) = necessity(m, cells, cf)?;
            Ok(Fixture {
                name: name.into(),
                game,
                decomp: Some(decomp),
                canonical: Some(canonical),
                allpay: None,
            })
        }
        // Test-only fixture, not part of the listed corpus.
        "dominant" => {
            let actions = params.actions.unwrap_or(5);
            let game = dominant(actions)?;
            let decomp = identity_decomposition(&game)?;
            Ok(Fixture {
                name: name.into(),
                game,
                decomp: Some(decomp),
                canonical: None,
                allpay: None,
            })
        }
        other => Err(Error::UnknownFixture(other.into())),
    }
}

fn midpoints(n: usize) -> Vec<f64> {
    (0..n).map(|c| (2 * c + 1) as f64 / (2 * n) as f64).collect()
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= sum;
    }
    v
}

/// 1-D space with the given (normalized) masses, coarse label c/cf.
fn line_space(name: &str, masses: Vec<f64>, cf: usize) -> Result<DiscreteTypeSpace> {
    let n = masses.len();
    let mids = midpoints(n);
    let cells = (0..n)
        .map(|c| Cell {
            point: vec![mids[c]],
            mass: masses[c],
            coarse_label: c / cf,
        })
        .collect();
    DiscreteTypeSpace::new(name, cells)
}

/// K×K product space over [0,1]^2 with the given masses, coarse by the
/// first coordinate.
fn square_space(name: &str, k: usize, masses: Vec<f64>) -> Result<DiscreteTypeSpace> {
    let mids = midpoints(k);
    let cells = (0..k * k)
        .map(|c| Cell {
            point: vec![mids[c / k], mids[c % k]],
            mass: masses[c],
            coarse_label: c / k,
        })
        .collect();
    DiscreteTypeSpace::new(name, cells)
}

// ---------------------------------------------------------------------------
// example1: two players on [0,1], prior ½(uniform ⊗ uniform) + ½(6 t₁ t₂²),
// action-only payoffs u₁(a) = −(a₁−a₂)², u₂(a) = −(a₁+a₂−1)². Ships the
// two-component decomposition with constants (½, 3).
// ---------------------------------------------------------------------------

struct Example1Payoff {
    a1: Vec<f64>,
    a2: Vec<f64>,
}

impl Example1Payoff {
    fn value(&self, player: usize, a: &[usize]) -> f64 {
        let x = self.a1[a[0]];
        let y = self.a2[a[1]];
        if player == 0 {
            -(x - y) * (x - y)
        } else {
            -(x + y - 1.0) * (x + y - 1.0)
        }
    }
}

impl PayoffFn for Example1Payoff {
    fn eval(&self, player: usize, a: &[usize], _t: &[usize]) -> f64 {
        self.value(player, a)
    }
}

struct ScaledExample1 {
    scale: f64,
    inner: Arc<Example1Payoff>,
}

impl PayoffFn for ScaledExample1 {
    fn eval(&self, player: usize, a: &[usize], _t: &[usize]) -> f64 {
        self.scale * self.inner.value(player, a)
    }
}

pub fn example1(
    cells: usize,
    coarse_factor: usize,
    actions: usize,
) -> Result<(BayesGame, DcpiDecomposition)> {
    example1_with_coarse(cells, coarse_factor, coarse_factor, actions)
}

/// example1 with independent coarse factors per player (coarse factor 1
/// makes that player's payoff-relevant partition equal to the full one).
pub fn example1_with_coarse(
    cells: usize,
    coarse_factor_1: usize,
    coarse_factor_2: usize,
    actions: usize,
) -> Result<(BayesGame, DcpiDecomposition)> {
    let n = cells;
    let h = 1.0 / n as f64;
    let mids = midpoints(n);
    // Per-state per-player mass vectors, normalized exactly.
    let p1: Vec<f64> = vec![h; n]; // uniform state
    let p2_1 = normalized(mids.iter().map(|&m| 2.0 * m * h).collect());
    let p2_2 = normalized(mids.iter().map(|&m| 3.0 * m * m * h).collect());

    let lam = |pa: &[f64], pb: &[f64]| -> Vec<f64> {
        normalized(
            pa.iter()
                .zip(pb)
                .map(|(&x, &y)| 0.5 * x + 0.5 * y)
                .collect(),
        )
    };
    let lam1 = lam(&p1, &p2_1);
    let lam2 = lam(&p1, &p2_2);
    let density = |p: &[f64], l: &[f64]| -> Vec<f64> {
        p.iter().zip(l).map(|(&x, &y)| x / y).collect()
    };
    let q1_1 = density(&p1, &lam1);
    let q1_2 = density(&p1, &lam2);
    let q2_1 = density(&p2_1, &lam1);
    let q2_2 = density(&p2_2, &lam2);

    let spaces = vec![
        line_space("t1", lam1, coarse_factor_1)?,
        line_space("t2", lam2, coarse_factor_2)?,
    ];
    let grid = ActionGrid::uniform(actions, 0.0, 1.0)?;
    let payoff = Arc::new(Example1Payoff {
        a1: grid.points().iter().map(|p| p[0]).collect(),
        a2: grid.points().iter().map(|p| p[0]).collect(),
    });
    let states = vec![
        CiState {
            tau: 0.5,
            densities: vec![q1_1.clone(), q1_2.clone()],
        },
        CiState {
            tau: 0.5,
            densities: vec![q2_1.clone(), q2_2.clone()],
        },
    ];
    let game = BayesGame::new(
        spaces,
        vec![grid.clone(), grid],
        PriorSpec::ConditionallyIndependent(states),
        Payoffs::Custom(payoff.clone()),
    )?;

    // Shipped two-component decomposition: w¹_i = ½·u_i with ρ¹ = q¹, and
    // w²_i = 3·u_i with ρ² = (q²₁/2, q²₂/3); the weights are the discrete
    // renderings of 1/(½+t₁), t₁/(½+t₁), 1/(½+1.5t₂²), t₂²/(½+1.5t₂²).
    let comp1 = DcpiComponent {
        w: ComponentPart::Custom(Arc::new(ScaledExample1 {
            scale: 0.5,
            inner: payoff.clone(),
        })),
        rho: vec![q1_1, q1_2],
    };
    let comp2 = DcpiComponent {
        w: ComponentPart::Custom(Arc::new(ScaledExample1 {
            scale: 3.0,
            inner: payoff,
        })),
        rho: vec![
            q2_1.iter().map(|x| x / 2.0).collect(),
            q2_2.iter().map(|x| x / 3.0).collect(),
        ],
    };
    let decomp = DcpiDecomposition::new(&game, vec![comp1, comp2])?;
    Ok((game, decomp))
}

/// The source density q(t₁,t₂) = (½+3t₁t₂²)/((½+t₁)(½+1.5t₂²)); the
/// discrete prior matches it to quadrature order.
pub fn example1_closed_form_density(t1: f64, t2: f64) -> f64 {
    (0.5 + 3.0 * t1 * t2 * t2) / ((0.5 + t1) * (0.5 + 1.5 * t2 * t2))
}

// ---------------------------------------------------------------------------
// cournot: two firms, states H (τ=1/3) and L (τ=2/3), 2-D types where only
// the first coordinate is payoff relevant. Fixture payoff
// u_i = a_i(θ + t₁₁ + t₂₁ − a₁ − a₂) − 0.1 a_i with θ(H)=2, θ(L)=1,
// quantities in [0,2].
// ---------------------------------------------------------------------------

struct CournotPayoff {
    bids: Vec<f64>,
    first_coord: Vec<Vec<f64>>, // per player, per fine cell
}

impl StatePayoffFn for CournotPayoff {
    fn eval(&self, player: usize, state: usize, a: &[usize], t: &[usize]) -> f64 {
        let theta = if state == 0 { 2.0 } else { 1.0 };
        let q1 = self.bids[a[0]];
        let q2 = self.bids[a[1]];
        let own = if player == 0 { q1 } else { q2 };
        let demand = theta + self.first_coord[0][t[0]] + self.first_coord[1][t[1]] - q1 - q2;
        own * demand - 0.1 * own
    }
}

pub fn cournot(cells_per_dim: usize, actions: usize) -> Result<(BayesGame, DcpiDecomposition)> {
    let k = cells_per_dim;
    let mids = midpoints(k);
    let vol = 1.0 / (k * k) as f64;
    // State H: uniform in t_{i1}, density ½+t_{i2}; state L: uniform × 2t_{i2}.
    let mut ph = Vec::with_capacity(k * k);
    let mut pl = Vec::with_capacity(k * k);
    for c in 0..k * k {
        let m2 = mids[c % k];
        ph.push((0.5 + m2) * vol);
        pl.push(2.0 * m2 * vol);
    }
    let ph = normalized(ph);
    let pl = normalized(pl);
    let lam = normalized(
        ph.iter()
            .zip(&pl)
            .map(|(&x, &y)| x / 3.0 + 2.0 * y / 3.0)
            .collect(),
    );
    let qh: Vec<f64> = ph.iter().zip(&lam).map(|(&x, &y)| x / y).collect();
    let ql: Vec<f64> = pl.iter().zip(&lam).map(|(&x, &y)| x / y).collect();

    let spaces = vec![
        square_space("firm1", k, lam.clone())?,
        square_space("firm2", k, lam)?,
    ];
    let grid = ActionGrid::uniform(actions, 0.0, 2.0)?;
    let payoff = Arc::new(CournotPayoff {
        bids: grid.points().iter().map(|p| p[0]).collect(),
        first_coord: spaces
            .iter()
            .map(|s| (0..s.len()).map(|c| s.point(c)[0]).collect())
            .collect(),
    });
    let states = vec![
        CiState {
            tau: 1.0 / 3.0,
            densities: vec![qh.clone(), qh],
        },
        CiState {
            tau: 2.0 / 3.0,
            densities: vec![ql.clone(), ql],
        },
    ];
    build_dcpi_from_ci(spaces, vec![grid.clone(), grid], states, payoff)
}

// ---------------------------------------------------------------------------
// all-pay auction: common values, general tie-breaking. Default instance:
// two bidders, two states with weights ½/½, state densities uniform and
// ∝ t_{i2}; ψ₁ = 1 + mean of first coordinates, ψ₂ = 0, φ_i = −a_i,
// ξ_i(a) = (1+a_i)/(2+Σ_{ℓ≠i} a_ℓ), bids in [0,2]. With `states == 1` the
// complete-information benchmark: value 1, cost = bid, equal tie weights,
// bids in [0,1].
// ---------------------------------------------------------------------------

/// Continuous description of the all-pay instance, used by the payoff
/// security probe (the discrete game is its midpoint rendering).
#[derive(Debug, Clone)]
pub struct AllPaySpec {
    pub n: usize,
    pub abar: f64,
    pub taus: Vec<f64>,
    /// Benchmark flavor: ψ₁ ≡ 1 and ξ ≡ 1.
    pub complete_info: bool,
}

impl AllPaySpec {
    pub fn num_states(&self) -> usize {
        self.taus.len()
    }

    /// Common winning value; depends on the state and first coordinates.
    pub fn psi1(&self, _state: usize, tfirst: &[f64], _a: &[f64]) -> f64 {
        if self.complete_info {
            1.0
        } else {
            1.0 + tfirst.iter().sum::<f64>() / tfirst.len() as f64
        }
    }

    /// Outside option when losing.
    pub fn psi2(&self, _state: usize, _tfirst: &[f64], _a: &[f64]) -> f64 {
        0.0
    }

    /// Cost of bidding (all-pay: sunk regardless of outcome).
    pub fn phi(&self, i: usize, _state: usize, _tfirst: &[f64], a: &[f64]) -> f64 {
        -a[i]
    }

    /// Tie-weight, increasing in own bid and decreasing in others'.
    pub fn xi(&self, i: usize, a: &[f64]) -> f64 {
        if self.complete_info {
            1.0
        } else {
            let others: f64 = a
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != i)
                .map(|(_, &x)| x)
                .sum();
            (1.0 + a[i]) / (2.0 + others)
        }
    }

    /// Per-player type density w.r.t. Lebesgue on \[0,1\]² for each state.
    pub fn type_density(&self, state: usize, _player: usize, t: &[f64]) -> f64 {
        if self.complete_info || state == 0 {
            1.0
        } else {
            2.0 * t[1]
        }
    }

    /// Posterior over states given the full continuous type profile.
    pub fn kappa(&self, types: &[Vec<f64>]) -> Vec<f64> {
        let mut terms = Vec::with_capacity(self.num_states());
        let mut den = 0.0;
        for (j, &tau) in self.taus.iter().enumerate() {
            let mut prod = tau;
            for (l, t) in types.iter().enumerate() {
                prod *= self.type_density(j, l, t);
            }
            terms.push(prod);
            den += prod;
        }
        for x in terms.iter_mut() {
            *x /= den;
        }
        terms
    }

    /// Auction payoff v_i at one state, with the tie-share rule.
    pub fn state_payoff(&self, i: usize, state: usize, tfirst: &[f64], a: &[f64]) -> f64 {
        let top = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let phi = self.phi(i, state, tfirst, a);
        if a[i] < top {
            return self.psi2(state, tfirst, a) + phi;
        }
        let mut winner_count = 0usize;
        let mut xi_sum = 0.0;
        for l in 0..a.len() {
            if a[l] == top {
                winner_count += 1;
                xi_sum += self.xi(l, a);
            }
        }
        if winner_count == 1 {
            self.psi1(state, tfirst, a) + phi
        } else {
            let share = self.xi(i, a) / xi_sum;
            share * self.psi1(state, tfirst, a)
                + (1.0 - share) * self.psi2(state, tfirst, a)
                + phi
        }
    }

    /// Full payoff u_i(t, a) = Σ_j v_i(t₀^j, t, a)·κ(t₀^j | t).
    pub fn payoff(&self, i: usize, types: &[Vec<f64>], a: &[f64]) -> f64 {
        let tfirst: Vec<f64> = types.iter().map(|t| t[0]).collect();
        let kappa = self.kappa(types);
        (0..self.num_states())
            .map(|j| self.state_payoff(i, j, &tfirst, a) * kappa[j])
            .sum()
    }
}

struct AllPayGridPayoff {
    spec: AllPaySpec,
    bids: Vec<f64>,
    first_coord: Vec<Vec<f64>>,
}

impl StatePayoffFn for AllPayGridPayoff {
    fn eval(&self, player: usize, state: usize, a: &[usize], t: &[usize]) -> f64 {
        // Stack buffers: this sits in the innermost solver loops.
        let n = a.len();
        debug_assert!(n <= 4);
        let mut bids = [0.0f64; 4];
        let mut tfirst = [0.0f64; 4];
        for l in 0..n {
            bids[l] = self.bids[a[l]];
            tfirst[l] = self.first_coord[l][t[l]];
        }
        self.spec
            .state_payoff(player, state, &tfirst[..n], &bids[..n])
    }
}

pub fn allpay(
    cells_per_dim: usize,
    actions: usize,
) -> Result<(BayesGame, DcpiDecomposition, AllPaySpec)> {
    let k = cells_per_dim;
    let mids = midpoints(k);
    let vol = 1.0 / (k * k) as f64;
    let p_uniform = normalized(vec![vol; k * k]);
    let p_tilted = normalized((0..k * k).map(|c| 2.0 * mids[c % k] * vol).collect());
    let lam = normalized(
        p_uniform
            .iter()
            .zip(&p_tilted)
            .map(|(&x, &y)| 0.5 * x + 0.5 * y)
            .collect(),
    );
    let q_uniform: Vec<f64> = p_uniform.iter().zip(&lam).map(|(&x, &y)| x / y).collect();
    let q_tilted: Vec<f64> = p_tilted.iter().zip(&lam).map(|(&x, &y)| x / y).collect();

    let spec = AllPaySpec {
        n: 2,
        abar: 2.0,
        taus: vec![0.5, 0.5],
        complete_info: false,
    };
    let spaces = vec![
        square_space("bidder1", k, lam.clone())?,
        square_space("bidder2", k, lam)?,
    ];
    let grid = ActionGrid::uniform(actions, 0.0, spec.abar)?;
    let payoff = Arc::new(AllPayGridPayoff {
        spec: spec.clone(),
        bids: grid.points().iter().map(|p| p[0]).collect(),
        first_coord: spaces
            .iter()
            .map(|s| (0..s.len()).map(|c| s.point(c)[0]).collect())
            .collect(),
    });
    let states = vec![
        CiState {
            tau: 0.5,
            densities: vec![q_uniform.clone(), q_uniform],
        },
        CiState {
            tau: 0.5,
            densities: vec![q_tilted.clone(), q_tilted],
        },
    ];
    let (game, decomp) = build_dcpi_from_ci(spaces, vec![grid.clone(), grid], states, payoff)?;
    Ok((game, decomp, spec))
}

/// Complete-information all-pay benchmark: value 1, cost = bid, equal tie
/// weights, bids on a uniform \[0,1\] grid. Types are two duplicate cells per
/// player so the splittability surrogate holds while payoffs ignore them.
pub fn allpay_complete_info(bids: usize) -> Result<(BayesGame, DcpiDecomposition, AllPaySpec)> {
    let spec = AllPaySpec {
        n: 2,
        abar: 1.0,
        taus: vec![1.0],
        complete_info: true,
    };
    let spaces = vec![degenerate_space("bidder1")?, degenerate_space("bidder2")?];
    let grid = ActionGrid::uniform(bids, 0.0, 1.0)?;
    let payoff = Arc::new(AllPayGridPayoff {
        spec: spec.clone(),
        bids: grid.points().iter().map(|p| p[0]).collect(),
        first_coord: spaces
            .iter()
            .map(|s| (0..s.len()).map(|c| s.point(c)[0]).collect())
            .collect(),
    });
    let states = vec![CiState {
        tau: 1.0,
        densities: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
    }];
    let (game, decomp) = build_dcpi_from_ci(spaces, vec![grid.clone(), grid], states, payoff)?;
    Ok((game, decomp, spec))
}

/// Two equal-mass cells in one coarse cell: payoff-irrelevant types that
/// still satisfy the splittability surrogate.
fn degenerate_space(name: &str) -> Result<DiscreteTypeSpace> {
    DiscreteTypeSpace::new(
        name,
        vec![
            Cell {
                point: vec![0.25, 0.25],
                mass: 0.5,
                coarse_label: 0,
            },
            Cell {
                point: vec![0.75, 0.75],
                mass: 0.5,
                coarse_label: 0,
            },
        ],
    )
}

// ---------------------------------------------------------------------------
// cyclic(m): two players on X = [0,1] with bump payoffs around the m points
// a_k = (2k−1)/(2m), r = 1/(4m), and the triangle prior on {l₁ ≤ l₂}. Off
// the bump region the payoff is γ − 2 = −7. The m×m restriction is the
// cyclic zero-sum matrix (1 diagonal, −1 successor, 0 otherwise).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CyclicGeometry {
    pub m: usize,
    pub centers: Vec<f64>,
    pub radius: f64,
}

impl CyclicGeometry {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            centers: (1..=m).map(|k| (2 * k - 1) as f64 / (2 * m) as f64).collect(),
            radius: 1.0 / (4 * m) as f64,
        }
    }

    /// Piecewise-linear tent: 1 on the closed r/2-ball, 0 outside the open
    /// r-ball.
    pub fn bump(&self, k: usize, x: f64) -> f64 {
        let d = (x - self.centers[k]).abs();
        let r = self.radius;
        if d <= r / 2.0 {
            1.0
        } else if d >= r {
            0.0
        } else {
            (r - d) / (r / 2.0)
        }
    }

    /// 0 on the closed r/2-balls, −5 outside the open r-balls, linear ramp
    /// between.
    pub fn floor_penalty(&self, x: f64) -> f64 {
        let r = self.radius;
        let dist = self
            .centers
            .iter()
            .map(|&c| ((x - c).abs() - r / 2.0).max(0.0))
            .fold(f64::INFINITY, f64::min);
        -5.0 * (dist / (r / 2.0)).min(1.0)
    }

    pub fn in_some_ball(&self, x: f64) -> bool {
        self.centers
            .iter()
            .any(|&c| (x - c).abs() < self.radius)
    }

    pub fn payoff(&self, player: usize, s1: f64, s2: f64) -> f64 {
        let m = self.m;
        let own = if player == 0 { s1 } else { s2 };
        let mut total = 0.0;
        for k in 0..m {
            let succ = (k + 1) % m;
            if player == 0 {
                let bk = self.bump(k, s1);
                if bk == 0.0 {
                    continue;
                }
                let d = (s1 - self.centers[k]).abs();
                total += bk * self.bump(k, s2) * (3.0 - d);
                total += bk * self.bump(succ, s2) * (1.0 - d);
                for l in 0..m {
                    if l != k && l != succ {
                        total += bk * self.bump(l, s2) * (2.0 - d);
                    }
                }
            } else {
                let bk = self.bump(k, s1);
                if bk == 0.0 {
                    continue;
                }
                total += bk * self.bump(succ, s2) * (3.0 - (s2 - self.centers[succ]).abs());
                total += bk * self.bump(k, s2) * (1.0 - (s2 - self.centers[k]).abs());
                for l in 0..m {
                    if l != k && l != succ {
                        total += bk * self.bump(l, s2) * (2.0 - (s2 - self.centers[l]).abs());
                    }
                }
            }
        }
        total + self.floor_penalty(own) - 2.0
    }
}

struct CyclicPayoff {
    geometry: CyclicGeometry,
    points: Vec<f64>,
}

impl PayoffFn for CyclicPayoff {
    fn eval(&self, player: usize, a: &[usize], _t: &[usize]) -> f64 {
        self.geometry.payoff(player, self.points[a[0]], self.points[a[1]])
    }
}

pub fn cyclic(m: usize, cells: usize, coarse_factor: usize, actions: usize) -> Result<BayesGame> {
    if m < 2 {
        return Err(Error::Invalid {
            what: "cyclic fixture",
            reason: "m must be at least 2".into(),
        });
    }
    let n = cells;
    let mids = midpoints(n);
    // Uniform mass on the closed triangle {t1 <= t2}, tabulated.
    let mut joint = vec![0.0f64; n * n];
    let mut total = 0.0;
    for c1 in 0..n {
        for c2 in 0..n {
            if mids[c1] <= mids[c2] {
                joint[c1 * n + c2] = 1.0;
                total += 1.0;
            }
        }
    }
    for x in joint.iter_mut() {
        *x /= total;
    }
    let mut lam1 = vec![0.0f64; n];
    let mut lam2 = vec![0.0f64; n];
    for c1 in 0..n {
        for c2 in 0..n {
            lam1[c1] += joint[c1 * n + c2];
            lam2[c2] += joint[c1 * n + c2];
        }
    }
    let mut q = vec![0.0f64; n * n];
    for c1 in 0..n {
        for c2 in 0..n {
            q[c1 * n + c2] = joint[c1 * n + c2] / (lam1[c1] * lam2[c2]);
        }
    }
    let spaces = vec![
        line_space("l1", lam1, coarse_factor)?,
        line_space("l2", lam2, coarse_factor)?,
    ];
    let grid = ActionGrid::uniform(actions, 0.0, 1.0)?;
    let payoff = Arc::new(CyclicPayoff {
        geometry: CyclicGeometry::new(m),
        points: grid.points().iter().map(|p| p[0]).collect(),
    });
    BayesGame::new(
        spaces,
        vec![grid.clone(), grid],
        PriorSpec::Tabulated(q),
        Payoffs::Custom(payoff),
    )
}

/// The m-action restriction of the cyclic game as a complete-information
/// game (duplicate type cells, unit density).
pub fn cyclic_matrix(m: usize) -> Result<BayesGame> {
    let geometry = CyclicGeometry::new(m);
    let points: Vec<Vec<f64>> = geometry.centers.iter().map(|&c| vec![c]).collect();
    let grid = ActionGrid::new(points)?;
    let payoff = Arc::new(CyclicPayoff {
        points: grid.points().iter().map(|p| p[0]).collect(),
        geometry,
    });
    let spaces = vec![degenerate_line("l1")?, degenerate_line("l2")?];
    BayesGame::new(
        spaces,
        vec![grid.clone(), grid],
        PriorSpec::Tabulated(vec![1.0; 4]),
        Payoffs::Custom(payoff),
    )
}

fn degenerate_line(name: &str) -> Result<DiscreteTypeSpace> {
    DiscreteTypeSpace::new(
        name,
        vec![
            Cell {
                point: vec![0.25],
                mass: 0.5,
                coarse_label: 0,
            },
            Cell {
                point: vec![0.75],
                mass: 0.5,
                coarse_label: 0,
            },
        ],
    )
}

// ---------------------------------------------------------------------------
// necessity(m): independent uniform types, payoff
// u_i = −∏_{j=0}^{m−1}(a_i − φ_i(t_i) − j)² on the grid {φ_D + j}, with the
// canonical m-point mixing strategy shipped alongside.
// ---------------------------------------------------------------------------

struct NecessityPayoff {
    m: usize,
    /// φ value per fine cell (constant on coarse cells).
    phi: Vec<Vec<f64>>,
    points: Vec<f64>,
}

impl PayoffFn for NecessityPayoff {
    fn eval(&self, player: usize, a: &[usize], t: &[usize]) -> f64 {
        let x = self.points[a[player]];
        let base = self.phi[player][t[player]];
        let mut prod = 1.0;
        for j in 0..self.m {
            let d = x - base - j as f64;
            prod *= d * d;
        }
        -prod
    }
}

pub fn necessity(
    m: usize,
    cells: usize,
    coarse_factor: usize,
) -> Result<(BayesGame, DcpiDecomposition, BehavioralProfile)> {
    if m < 2 {
        return Err(Error::Invalid {
            what: "necessity fixture",
            reason: "m must be at least 2".into(),
        });
    }
    if !cells.is_multiple_of(coarse_factor) {
        return Err(Error::Invalid {
            what: "necessity fixture",
            reason: "coarse_factor must divide cells".into(),
        });
    }
    let n = cells;
    let num_coarse = n / coarse_factor;
    // φ maps coarse cell D to its cumulative-mass midpoint (D+½)/M; the
    // pushforward of the uniform grid is exactly uniform over these values.
    let phi_of_coarse: Vec<f64> = (0..num_coarse)
        .map(|d| (2 * d + 1) as f64 / (2 * num_coarse) as f64)
        .collect();
    let phi_per_cell: Vec<f64> = (0..n).map(|c| phi_of_coarse[c / coarse_factor]).collect();

    // Action grid: every φ_D + j, sorted ascending (all distinct).
    let mut points = Vec::with_capacity(num_coarse * m);
    for j in 0..m {
        for &p in &phi_of_coarse {
            points.push(p + j as f64);
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let grid = ActionGrid::new(points.iter().map(|&p| vec![p]).collect())?;

    let masses = vec![1.0 / n as f64; n];
    let spaces = vec![
        line_space("t1", masses.clone(), coarse_factor)?,
        line_space("t2", masses, coarse_factor)?,
    ];
    let payoff = Arc::new(NecessityPayoff {
        m,
        phi: vec![phi_per_cell.clone(), phi_per_cell.clone()],
        points: points.clone(),
    });
    let game = BayesGame::new(
        spaces,
        vec![grid.clone(), grid],
        PriorSpec::Tabulated(vec![1.0; n * n]),
        Payoffs::Custom(payoff),
    )?;
    let decomp = identity_decomposition(&game)?;

    // Canonical profile: mix 1/m over {φ(t)+j}.
    let action_index = |value: f64| -> usize {
        points
            .iter()
            .position(|&p| (p - value).abs() < 1e-9)
            .expect("phi shifts are grid points")
    };
    let rows: Vec<Vec<Vec<f64>>> = (0..2)
        .map(|_| {
            (0..n)
                .map(|c| {
                    let mut row = vec![0.0; points.len()];
                    for j in 0..m {
                        row[action_index(phi_per_cell[c] + j as f64)] = 1.0 / m as f64;
                    }
                    row
                })
                .collect()
        })
        .collect();
    let canonical = BehavioralProfile::new(rows, &game)?;
    Ok((game, decomp, canonical))
}

// ---------------------------------------------------------------------------
// dominant: test-only fixture whose payoff is each player's own action
// value, so the last grid action strictly dominates.
// ---------------------------------------------------------------------------

struct OwnBid;
impl PayoffFn for OwnBid {
    fn eval(&self, player: usize, a: &[usize], _t: &[usize]) -> f64 {
        a[player] as f64
    }
}

pub fn dominant(actions: usize) -> Result<BayesGame> {
    let spaces = vec![degenerate_line("t1")?, degenerate_line("t2")?];
    let grid = ActionGrid::uniform(actions, 0.0, 1.0)?;
    BayesGame::new(
        spaces,
        vec![grid.clone(), grid],
        PriorSpec::Tabulated(vec![1.0; 4]),
        Payoffs::Custom(Arc::new(OwnBid)),
    )
}
