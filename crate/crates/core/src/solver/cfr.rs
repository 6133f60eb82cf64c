use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::efg::{GameTree, Player};
use crate::error::{Error, Result};

use super::best_response::SequenceGame;
use super::profile::BehavioralProfile;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Vanilla CFR: simultaneous updates, uniform averaging.
    Cfr,
    /// CFR+: clipped regrets, alternating updates, linear averaging.
    #[default]
    CfrPlus,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cfr" => Ok(Variant::Cfr),
            "cfr_plus" | "cfr+" | "cfrplus" => Ok(Variant::CfrPlus),
            other => Err(Error::invalid(format!("unknown solver variant `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub variant: Variant,
    pub max_iterations: usize,
    pub target_eps: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { variant: Variant::CfrPlus, max_iterations: 100_000, target_eps: 1e-6 }
    }
}

/// Exploitability of the average profile is checked this often.
pub const CHECK_INTERVAL: usize = 64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub exploitability: f64,
    pub wall_time: Duration,
    /// `(iteration, exploitability)` at every check.
    pub checkpoints: Vec<(usize, f64)>,
}

/// Per-player regret-matching state over the player's sequences.
struct Learner {
    player: Player,
    regrets: Vec<f64>,
    /// Current behavioral strategy, per-sequence layout.
    current: Vec<f64>,
    /// Weighted sum of realization plans.
    average: Vec<f64>,
    weight: f64,
}

impl Learner {
    fn new(sg: &SequenceGame<'_>, player: Player) -> Self {
        let dim = sg.index.dimension(player);
        Self {
            player,
            regrets: vec![0.0; dim],
            current: sg.index.uniform(player),
            average: vec![0.0; dim],
            weight: 0.0,
        }
    }

    fn plan(&self, sg: &SequenceGame<'_>) -> Vec<f64> {
        sg.index.to_sequence_form(self.player, &self.current).expect("dimension fixed at construction")
    }

    /// One regret update against `opponent_plan`, accumulating the strategy
    /// that was played into the average with weight `w`.
    fn update(&mut self, sg: &SequenceGame<'_>, opponent_plan: &[f64], w: f64, clip: bool) -> Result<()> {
        let played = self.plan(sg);
        for (a, p) in self.average.iter_mut().zip(&played) {
            *a += w * p;
        }
        self.weight += w;

        let mut cfv = sg.gradient(self.player, opponent_plan)?;
        for &i in sg.index.infosets(self.player).iter().rev() {
            let i = i as usize;
            let base = sg.index.first_sequence(i);
            let n = sg.index.num_actions(i);
            let v: f64 = (base..base + n).map(|s| self.current[s] * cfv[s]).sum();
            for s in base..base + n {
                let r = self.regrets[s] + cfv[s] - v;
                self.regrets[s] = if clip { r.max(0.0) } else { r };
            }
            cfv[sg.index.parent(i)] += v;
        }
        self.regret_match(sg);
        Ok(())
    }

    fn regret_match(&mut self, sg: &SequenceGame<'_>) {
        for &i in sg.index.infosets(self.player) {
            let i = i as usize;
            let base = sg.index.first_sequence(i);
            let n = sg.index.num_actions(i);
            let positive: f64 = self.regrets[base..base + n].iter().map(|r| r.max(0.0)).sum();
            for s in base..base + n {
                self.current[s] = if positive > 0.0 { self.regrets[s].max(0.0) / positive } else { 1.0 / n as f64 };
            }
        }
    }

    fn average_plan(&self) -> Vec<f64> {
        self.average.iter().map(|a| a / self.weight).collect()
    }
}

/// Runs regret minimization on an already indexed game.
pub fn solve_indexed(sg: &SequenceGame<'_>, settings: &SolverSettings) -> Result<(BehavioralProfile, SolveReport)> {
    if settings.max_iterations == 0 {
        return Err(Error::invalid("max_iterations must be at least 1"));
    }
    let start = Instant::now();
    let mut learners = [Learner::new(sg, Player::One), Learner::new(sg, Player::Two)];
    let mut checkpoints = Vec::new();
    let mut eps = f64::INFINITY;
    let mut t = 0;
    while t < settings.max_iterations {
        t += 1;
        match settings.variant {
            Variant::CfrPlus => {
                let w = t as f64;
                let y = learners[1].plan(sg);
                learners[0].update(sg, &y, w, true)?;
                let x = learners[0].plan(sg);
                learners[1].update(sg, &x, w, true)?;
            }
            Variant::Cfr => {
                let x = learners[0].plan(sg);
                let y = learners[1].plan(sg);
                learners[0].update(sg, &y, 1.0, false)?;
                learners[1].update(sg, &x, 1.0, false)?;
            }
        }
        if t % CHECK_INTERVAL == 0 || t == settings.max_iterations {
            eps = sg.exploitability_of_plans(&learners[0].average_plan(), &learners[1].average_plan())?;
            checkpoints.push((t, eps));
            if eps <= settings.target_eps {
                break;
            }
        }
    }
    let b1 = sg.index.to_behavioral(Player::One, &learners[0].average_plan())?;
    let b2 = sg.index.to_behavioral(Player::Two, &learners[1].average_plan())?;
    let profile = BehavioralProfile::from_sequence_layout(sg.game, &sg.index, [&b1, &b2]);
    if eps.is_finite() {
        // Report the exploitability of exactly the profile being returned.
        eps = sg.exploitability(&profile)?;
    }
    let report = SolveReport { iterations: t, exploitability: eps, wall_time: start.elapsed(), checkpoints };
    Ok((profile, report))
}

/// Approximates a Nash equilibrium of `game` and returns the average profile.
/// Stops once the average profile's exploitability reaches
/// `settings.target_eps`, checked every [`CHECK_INTERVAL`] iterations.
pub fn solve(game: &GameTree, settings: &SolverSettings) -> Result<(BehavioralProfile, SolveReport)> {
    let sg = SequenceGame::new(game)?;
    solve_indexed(&sg, settings)
}
