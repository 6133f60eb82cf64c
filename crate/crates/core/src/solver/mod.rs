//! Equilibrium approximation by counterfactual regret minimization, best
//! responses, and exploitability.
//!
//! Everything runs on the sequence-form view: counterfactual values of a
//! player's sequences are the utility gradient `A y` (or `-Aᵀ x`) plus the
//! values of child infosets, accumulated bottom-up over the player's
//! infosets. This is the same quantity a tree-walking CFR computes, but one
//! iteration costs two sparse products instead of a full tree traversal.

mod best_response;
mod cfr;
mod profile;

pub use best_response::{best_response, exploitability, SequenceGame};
pub use cfr::{solve, solve_indexed, SolveReport, SolverSettings, Variant, CHECK_INTERVAL};
pub use profile::BehavioralProfile;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efg::Player;
    use crate::games::{build_kuhn, matching_pennies, KuhnSpec};

    #[test]
    fn pennies_converge_to_half() {
        let game = matching_pennies();
        let settings = SolverSettings { max_iterations: 10_000, target_eps: 1e-3, ..Default::default() };
        let (profile, report) = solve(&game, &settings).unwrap();
        assert!(report.exploitability <= 1e-3);
        for (_, probs) in profile.iter() {
            assert!((probs[0] - 0.5).abs() < 1e-3, "{probs:?}");
        }
    }

    #[test]
    fn exact_pennies_equilibrium_has_zero_exploitability() {
        let game = matching_pennies();
        let eq = BehavioralProfile::uniform(&game);
        assert!(exploitability(&game, &eq).unwrap().abs() < 1e-12);
        let (v, _) = best_response(&game, &eq, Player::One).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn one_iteration_is_uniform() {
        let game = build_kuhn(&KuhnSpec::new(3)).unwrap();
        for variant in [Variant::Cfr, Variant::CfrPlus] {
            let settings = SolverSettings { variant, max_iterations: 1, target_eps: 0.0 };
            let (profile, report) = solve(&game, &settings).unwrap();
            assert_eq!(report.iterations, 1);
            assert_eq!(profile, BehavioralProfile::uniform(&game));
        }
    }

    #[test]
    fn zero_iterations_rejected() {
        let game = matching_pennies();
        let settings = SolverSettings { max_iterations: 0, ..Default::default() };
        assert!(solve(&game, &settings).is_err());
    }

    #[test]
    fn solver_is_deterministic() {
        let game = build_kuhn(&KuhnSpec::new(4)).unwrap();
        let settings = SolverSettings { max_iterations: 500, target_eps: 0.0, ..Default::default() };
        let (a, _) = solve(&game, &settings).unwrap();
        let (b, _) = solve(&game, &settings).unwrap();
        for ((ka, va), (kb, vb)) in a.iter().zip(b.iter()) {
            assert_eq!(ka, kb);
            assert!(va.iter().zip(vb).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn best_response_fragment_attains_value() {
        let game = build_kuhn(&KuhnSpec::new(3)).unwrap();
        let sg = SequenceGame::new(&game).unwrap();
        let uniform = BehavioralProfile::uniform(&game);
        for player in Player::BOTH {
            let (value, fragment) = sg.best_response(&uniform, player).unwrap();
            let mut deviated = uniform.clone();
            deviated.extend(fragment);
            let achieved = player.sign() * sg.value(&deviated).unwrap();
            assert!((achieved - value).abs() < 1e-9);
        }
    }
}
