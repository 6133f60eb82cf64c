use std::collections::HashMap;

use super::map::AbstractionMap;
use crate::efg::{Domain, GameTree, InfosetKey, Observation};
use crate::error::{Error, Result};
use crate::solver::BehavioralProfile;

fn by_domain(maps: &[AbstractionMap]) -> Result<HashMap<Domain, &AbstractionMap>> {
    let mut out = HashMap::new();
    for m in maps {
        if out.insert(m.domain(), m).is_some() {
            return Err(Error::invalid(format!("two abstraction maps for `{}`", m.domain())));
        }
    }
    Ok(out)
}

fn relabel_key(key: &InfosetKey, maps: &HashMap<Domain, &AbstractionMap>) -> Result<InfosetKey> {
    let observations = key
        .observations
        .iter()
        .map(|obs| {
            maps.get(&obs.domain)
                .and_then(|m| m.label(&obs.token))
                .map(|token| Observation::new(obs.domain, token))
                .ok_or_else(|| Error::UncoveredObservation(format!("{}:{}", obs.domain, obs.token)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InfosetKey::new(key.player, observations, key.history.clone()))
}

/// The abstract-game image of an original infoset key.
pub fn abstract_key(key: &InfosetKey, maps: &[AbstractionMap]) -> Result<InfosetKey> {
    relabel_key(key, &by_domain(maps)?)
}

/// Replaces every observation in every infoset key by its bucket label,
/// merging infosets whose keys coincide. Topology, chance probabilities and
/// utilities are untouched.
pub fn abstract_game(game: &GameTree, maps: &[AbstractionMap]) -> Result<GameTree> {
    let maps = by_domain(maps)?;
    game.relabel_infosets(|key| relabel_key(key, &maps))
}

/// Plays the abstract strategy at every original infoset.
pub fn lift_strategy(
    abstract_profile: &BehavioralProfile,
    maps: &[AbstractionMap],
    original_game: &GameTree,
) -> Result<BehavioralProfile> {
    let maps = by_domain(maps)?;
    let mut lifted = BehavioralProfile::new();
    for key in original_game.infoset_keys() {
        let image = relabel_key(key, &maps)?.to_string();
        let probs = abstract_profile.get(&image).ok_or_else(|| Error::MissingInfoset(image.clone()))?;
        lifted.insert(key.to_string(), probs.to_vec());
    }
    Ok(lifted)
}
