//! Observation clustering and information abstraction.

mod baselines;
mod kmeans;
mod lift;
mod map;

pub use baselines::{
    embed_cluster_abstraction, hand_bucketing, hand_bucketing_map, leduc_hand_bucketing_maps, random_assignment,
    random_map,
};
pub use kmeans::{kmeans, ClusterResult, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use lift::{abstract_game, abstract_key, lift_strategy};
pub use map::{domain_tokens, game_domains, load_maps, observed_tokens, save_maps, AbstractionMap, Method};
