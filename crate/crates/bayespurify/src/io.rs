//! File formats: game description JSON, decomposition JSON, report JSON and
//! strategy CSV.
//!
//! Index conventions are row-major with player index ascending, then cell
//! index ascending: the tabulated prior is flat over type-profile tuples,
//! and payoff tensors are flat over (action profile, type profile) in the
//! same order. Strategy CSV rows are (player, cell_index, action_index,
//! probability).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dcpi::{ComponentPart, DcpiComponent, DcpiDecomposition};
use crate::equilibrium::{BehavioralProfile, PureProfile, SolveReport};
use crate::error::{Error, Result};
use crate::fixtures::{fixture, Fixture, FixtureParams};
use crate::game::{ActionGrid, BayesGame, CiState, Payoffs, PriorSpec};
use crate::measure::{Cell, DiscreteTypeSpace};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeSpaceFile {
    #[serde(default)]
    pub name: Option<String>,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionGridFile {
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorFile {
    Tabulated(Vec<f64>),
    Ci(Vec<CiState>),
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct FixtureParamsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_factor: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
}

impl FixtureParamsFile {
    pub fn to_params(&self) -> FixtureParams {
        FixtureParams {
            cells: self.cells,
            coarse_factor: self.coarse_factor,
            actions: self.actions,
            m: self.m,
            states: self.states,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PayoffsFile {
    Tabulated {
        tabulated: Vec<Vec<f64>>,
    },
    Fixture {
        fixture: String,
        #[serde(default)]
        params: FixtureParamsFile,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameFile {
    pub players: usize,
    pub type_spaces: Vec<TypeSpaceFile>,
    pub action_grids: Vec<ActionGridFile>,
    pub prior: PriorFile,
    pub payoffs: PayoffsFile,
}

impl GameFile {
    pub fn into_game(self) -> Result<BayesGame> {
        if self.players != self.type_spaces.len() {
            return Err(Error::LengthMismatch {
                what: "game file players",
                expected: self.players,
                got: self.type_spaces.len(),
            });
        }
        let spaces: Vec<DiscreteTypeSpace> = self
            .type_spaces
            .into_iter()
            .enumerate()
            .map(|(i, ts)| {
                DiscreteTypeSpace::new(ts.name.unwrap_or_else(|| format!("player{i}")), ts.cells)
            })
            .collect::<Result<_>>()?;
        let actions: Vec<ActionGrid> = self
            .action_grids
            .into_iter()
            .map(|g| ActionGrid::new(g.points))
            .collect::<Result<_>>()?;
        let prior = match self.prior {
            PriorFile::Tabulated(q) => PriorSpec::Tabulated(q),
            PriorFile::Ci(states) => PriorSpec::ConditionallyIndependent(states),
        };
        let payoffs = match self.payoffs {
            PayoffsFile::Tabulated { tabulated } => Payoffs::Tabulated(tabulated),
            PayoffsFile::Fixture { fixture: name, params } => {
                // The payoff evaluator of a named fixture family, applied to
                // this file's grids. Only families whose payoffs close over
                // grids alone are supported; state-posterior families
                // (cournot, allpay) must be loaded as whole fixtures. The
                // evaluator indexes the grids it was built with, so the
                // file's shapes must match the fixture's.
                let built = fixture(&name, &params.to_params())?;
                let fixture_adims: Vec<usize> =
                    built.game.action_grids().iter().map(|g| g.len()).collect();
                let file_adims: Vec<usize> = actions.iter().map(|g| g.len()).collect();
                let fixture_tdims = built.game.type_dims();
                let file_tdims: Vec<usize> = spaces.iter().map(|s| s.len()).collect();
                if fixture_adims != file_adims || fixture_tdims != file_tdims {
                    return Err(Error::Invalid {
                        what: "game file",
                        reason: format!(
                            "fixture payoff `{name}` has shape (types {fixture_tdims:?}, actions {fixture_adims:?}) but the file declares (types {file_tdims:?}, actions {file_adims:?}); adjust `params`"
                        ),
                    });
                }
                match built.game.payoffs() {
                    Payoffs::Custom(f) => Payoffs::Custom(f.clone()),
                    Payoffs::Tabulated(t) => Payoffs::Tabulated(t.clone()),
                }
            }
        };
        BayesGame::new(spaces, actions, prior, payoffs)
    }

    pub fn from_game(game: &BayesGame) -> Result<Self> {
        let payoffs = match game.payoffs() {
            Payoffs::Tabulated(t) => PayoffsFile::Tabulated {
                tabulated: t.clone(),
            },
            Payoffs::Custom(_) => {
                return Err(Error::Invalid {
                    what: "game file",
                    reason: "closure-backed payoffs cannot be tabulated into a file".into(),
                })
            }
        };
        Ok(GameFile {
            players: game.num_players(),
            type_spaces: game
                .spaces()
                .iter()
                .map(|s| TypeSpaceFile {
                    name: Some(s.name.clone()),
                    cells: s.cells().to_vec(),
                })
                .collect(),
            action_grids: game
                .action_grids()
                .iter()
                .map(|g| ActionGridFile {
                    points: g.points().to_vec(),
                })
                .collect(),
            prior: match game.prior() {
                PriorSpec::Tabulated(q) => PriorFile::Tabulated(q.clone()),
                PriorSpec::ConditionallyIndependent(s) => PriorFile::Ci(s.clone()),
            },
            payoffs,
        })
    }
}

pub fn load_game(path: &Path) -> Result<BayesGame> {
    let text = std::fs::read_to_string(path)?;
    let file: GameFile = serde_json::from_str(&text)?;
    file.into_game()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentFile {
    pub w: ComponentWFile,
    pub rho: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentWFile {
    Tabulated { tabulated: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecompFile {
    /// Use the decomposition shipped with a named fixture.
    Fixture {
        fixture: String,
        #[serde(default)]
        params: FixtureParamsFile,
    },
    Components {
        #[serde(rename = "J")]
        j: usize,
        components: Vec<ComponentFile>,
    },
}

impl DecompFile {
    pub fn into_decomposition(self, game: &BayesGame) -> Result<DcpiDecomposition> {
        match self {
            DecompFile::Fixture { fixture: name, params } => {
                let built: Fixture = fixture(&name, &params.to_params())?;
                built.decomp.ok_or(Error::MissingDecomposition)
            }
            DecompFile::Components { j, components } => {
                if j != components.len() {
                    return Err(Error::Invalid {
                        what: "decomposition file",
                        reason: format!("J = {j} but {} components", components.len()),
                    });
                }
                let components = components
                    .into_iter()
                    .map(|c| DcpiComponent {
                        w: match c.w {
                            ComponentWFile::Tabulated { tabulated } => {
                                ComponentPart::Tabulated(tabulated)
                            }
                        },
                        rho: c.rho,
                    })
                    .collect();
                DcpiDecomposition::new(game, components)
            }
        }
    }
}

pub fn load_decomposition(path: &Path, game: &BayesGame) -> Result<DcpiDecomposition> {
    let text = std::fs::read_to_string(path)?;
    let file: DecompFile = serde_json::from_str(&text)?;
    file.into_decomposition(game)
}

/// JSON rendering of a solve report:
/// {iterations, gaps, converged, profile: {"0": [[..]..], ..}, seed}.
pub fn solve_report_json(report: &SolveReport) -> serde_json::Value {
    let profile: BTreeMap<String, &[Vec<f64>]> = report
        .profile
        .players()
        .iter()
        .enumerate()
        .map(|(i, rows)| (i.to_string(), rows.as_slice()))
        .collect();
    serde_json::json!({
        "iterations": report.iterations,
        "gaps": report.gaps,
        "converged": report.converged,
        "profile": profile,
        "seed": report.seed,
    })
}

/// Strategy CSV: header then one row per (player, cell, action) with
/// positive probability.
pub fn write_strategy_csv<W: Write>(mut out: W, profile: &BehavioralProfile) -> Result<()> {
    writeln!(out, "player,cell_index,action_index,probability")?;
    for (i, rows) in profile.players().iter().enumerate() {
        for (cell, row) in rows.iter().enumerate() {
            for (action, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    writeln!(out, "{i},{cell},{action},{p}")?;
                }
            }
        }
    }
    Ok(())
}

/// Pure-strategy CSV in the same column layout, probability 1.
pub fn write_pure_csv<W: Write>(mut out: W, profile: &PureProfile) -> Result<()> {
    writeln!(out, "player,cell_index,action_index,probability")?;
    for (i, choices) in profile.choices.iter().enumerate() {
        for (cell, &action) in choices.iter().enumerate() {
            writeln!(out, "{i},{cell},{action},1")?;
        }
    }
    Ok(())
}

/// Parse a strategy CSV back into a behavioral profile for `game`.
/// Unlisted (player, cell, action) entries are zero; rows must come out as
/// probability distributions of the right shape.
pub fn read_strategy_csv(text: &str, game: &BayesGame) -> Result<BehavioralProfile> {
    let mut rows: Vec<Vec<Vec<f64>>> = (0..game.num_players())
        .map(|i| vec![vec![0.0; game.action_grid(i).len()]; game.space(i).len()])
        .collect();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("player")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse_err = |what: &'static str| Error::Invalid {
            what: "strategy csv",
            reason: format!("line {}: bad {what}: {line}", lineno + 1),
        };
        if fields.len() != 4 {
            return Err(parse_err("field count"));
        }
        let player: usize = fields[0].trim().parse().map_err(|_| parse_err("player"))?;
        let cell: usize = fields[1].trim().parse().map_err(|_| parse_err("cell"))?;
        let action: usize = fields[2].trim().parse().map_err(|_| parse_err("action"))?;
        let prob: f64 = fields[3].trim().parse().map_err(|_| parse_err("probability"))?;
        if player >= rows.len() || cell >= rows[player].len() || action >= rows[player][cell].len()
        {
            return Err(Error::Invalid {
                what: "strategy csv",
                reason: format!(
                    "line {}: index out of range for this game: {line}",
                    lineno + 1
                ),
            });
        }
        rows[player][cell][action] = prob;
    }
    BehavioralProfile::new(rows, game)
}
