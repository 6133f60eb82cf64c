use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kmeans::{kmeans, DEFAULT_MAX_ITER, DEFAULT_TOL};
use super::map::{domain_tokens, AbstractionMap, Method};
use crate::efg::Domain;
use crate::embed::EmbeddingTable;
use crate::error::{Error, Result};
use crate::games::{parse_kuhn_token, strength_order, GameSpec, StrengthKind};

/// Independent uniform bucket for each of `n_items` items.
pub fn random_assignment(n_items: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_items).map(|_| rng.random_range(0..k)).collect())
}

/// Splits an ordering into `k` contiguous buckets whose sizes differ by at
/// most one, larger buckets first. Returns the bucket of each position.
pub fn hand_bucketing<T>(ordered_observations: &[T], k: usize) -> Result<Vec<usize>> {
    let n = ordered_observations.len();
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds the number of observations ({n})")));
    }
    let (base, extra) = (n / k, n % k);
    let mut out = Vec::with_capacity(n);
    for b in 0..k {
        let size = base + usize::from(b < extra);
        out.extend(std::iter::repeat_n(b, size));
    }
    Ok(out)
}

pub fn random_map(game: GameSpec, domain: Domain, k: usize, seed: u64) -> Result<AbstractionMap> {
    let tokens = domain_tokens(game, domain)?;
    let raw = random_assignment(tokens.len(), k, seed)?;
    AbstractionMap::from_assignment(domain, Method::Random, k, Some(seed), tokens, &raw)
}

/// Hand-bucketing map for one domain. Kuhn buckets the card ranks, which
/// both players share; Leduc buckets the domain's strength order.
pub fn hand_bucketing_map(game: GameSpec, domain: Domain, k: usize) -> Result<AbstractionMap> {
    let tokens = domain_tokens(game, domain)?;
    let raw = match (game, domain) {
        (GameSpec::Kuhn { num_cards }, Domain::KuhnDeal) => {
            let by_card = hand_bucketing(&strength_order(StrengthKind::Kuhn { num_cards }), k)?;
            tokens
                .iter()
                .map(|t| parse_kuhn_token(t).map(|(_, card)| by_card[card as usize]))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::invalid("malformed Kuhn deal token"))?
        }
        (GameSpec::Leduc { num_ranks }, _) => {
            let kind = match domain {
                Domain::LeducPreflop => StrengthKind::LeducPreflop { num_ranks },
                _ => StrengthKind::LeducFlop { num_ranks },
            };
            let order = strength_order(kind);
            let buckets = hand_bucketing(&order, k)?;
            let rank: std::collections::HashMap<&str, usize> = order.iter().map(String::as_str).zip(buckets).collect();
            tokens.iter().map(|t| rank[t.as_str()]).collect()
        }
        _ => unreachable!("domain_tokens rejects mismatched domains"),
    };
    AbstractionMap::from_assignment(domain, Method::HandBucketing, k, None, tokens, &raw)
}

/// Hand-bucketing maps for both Leduc rounds where the flop buckets refine
/// the preflop buckets: the (hole, public) texts whose hole card falls in one
/// preflop bucket are split into `k2` buckets of their own. `k1` and `k2`
/// are clamped to the number of observations available.
pub fn leduc_hand_bucketing_maps(num_ranks: u8, k1: usize, k2: usize) -> Result<[AbstractionMap; 2]> {
    if k1 == 0 || k2 == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let game = GameSpec::Leduc { num_ranks };
    let holes = domain_tokens(game, Domain::LeducPreflop)?;
    let k1 = k1.min(holes.len());
    let preflop = hand_bucketing_map(game, Domain::LeducPreflop, k1)?;

    let order = strength_order(StrengthKind::LeducFlop { num_ranks });
    let mut groups: Vec<Vec<&str>> = vec![Vec::new(); preflop.num_buckets()];
    for text in &order {
        // Card texts are two bytes, so the hole card is the first half.
        let hole = preflop.bucket(&text[..2]).ok_or_else(|| Error::UncoveredObservation(text.clone()))?;
        groups[hole].push(text);
    }
    let mut bucket_of = std::collections::HashMap::new();
    for (g, members) in groups.iter().enumerate() {
        for (text, b) in members.iter().zip(hand_bucketing(members, k2.min(members.len()))?) {
            bucket_of.insert(*text, g * k2 + b);
        }
    }
    let tokens = domain_tokens(game, Domain::LeducFlop)?;
    let raw: Vec<usize> = tokens.iter().map(|t| bucket_of[t.as_str()]).collect();
    let flop = AbstractionMap::from_assignment(Domain::LeducFlop, Method::HandBucketing, k1 * k2, None, tokens, &raw)?;
    Ok([preflop, flop])
}

/// Clusters the embedding vectors of every observation in `domain` with
/// k-means. Kuhn clusters all deal events of both players jointly.
pub fn embed_cluster_abstraction(
    table: &EmbeddingTable,
    game: GameSpec,
    domain: Domain,
    k: usize,
    seed: u64,
) -> Result<AbstractionMap> {
    let tokens = domain_tokens(game, domain)?;
    let points = table.lookup_all(&tokens)?;
    let result = kmeans(&points, k, seed, DEFAULT_MAX_ITER, DEFAULT_TOL)?;
    AbstractionMap::from_assignment(domain, Method::Kmeans, k, Some(seed), tokens, &result.assignments)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_sizes() {
        let sizes = |n: usize, k: usize| {
            let b = hand_bucketing(&vec![(); n], k).unwrap();
            let mut s = vec![0; k];
            b.iter().for_each(|&x| s[x] += 1);
            assert!(b.windows(2).all(|w| w[0] <= w[1]));
            s
        };
        assert_eq!(sizes(256, 4), vec![64; 4]);
        assert_eq!(sizes(26, 4), vec![7, 7, 6, 6]);
        assert_eq!(sizes(256, 256), vec![1; 256]);
        assert!(hand_bucketing(&[(); 3], 4).is_err());
    }

    #[test]
    fn random_is_seeded() {
        assert!(random_assignment(100, 1, 5).unwrap().iter().all(|&b| b == 0));
        assert_eq!(random_assignment(100, 7, 5).unwrap(), random_assignment(100, 7, 5).unwrap());
        assert_ne!(random_assignment(100, 7, 5).unwrap(), random_assignment(100, 7, 6).unwrap());
    }

    #[test]
    fn random_share_is_balanced() {
        let seeds = 1000;
        let total: usize =
            (0..seeds).map(|s| random_assignment(512, 2, s).unwrap().iter().filter(|&&b| b == 0).count()).sum();
        let share = total as f64 / (512 * seeds) as f64;
        let sigma = (0.25 / (512.0 * seeds as f64)).sqrt();
        assert!((share - 0.5).abs() < 5.0 * sigma, "{share}");
    }

    #[test]
    fn kuhn_hand_buckets_are_shared_by_players() {
        let game = GameSpec::Kuhn { num_cards: 8 };
        let map = hand_bucketing_map(game, Domain::KuhnDeal, 2).unwrap();
        assert_eq!(map.bucket("3?"), Some(0));
        assert_eq!(map.bucket("?3"), Some(0));
        assert_eq!(map.bucket("4?"), Some(1));
        assert_eq!(map.num_buckets(), 2);
    }

    #[test]
    fn leduc_hand_buckets_follow_strength() {
        let game = GameSpec::Leduc { num_ranks: 13 };
        let map = hand_bucketing_map(game, Domain::LeducPreflop, 13).unwrap();
        assert_eq!(map.bucket("2h"), map.bucket("2s"));
        assert_eq!(map.bucket("As"), Some(12));
        let flop = hand_bucketing_map(game, Domain::LeducFlop, 650).unwrap();
        assert_eq!(flop.bucket("AsAh"), Some(649));
    }

    #[test]
    fn nested_flop_buckets_refine_preflop() {
        let [pre, flop] = leduc_hand_bucketing_maps(13, 4, 3).unwrap();
        assert_eq!(pre.num_buckets(), 4);
        assert_eq!(flop.num_buckets(), 12);
        for t in flop.tokens() {
            let other = flop.tokens().iter().find(|u| flop.bucket(u) == flop.bucket(t)).unwrap();
            assert_eq!(pre.bucket(&t[..2]), pre.bucket(&other[..2]));
        }
        let [_, fine] = leduc_hand_bucketing_maps(13, 32, 32).unwrap();
        assert_eq!(fine.num_buckets(), 650);
    }
}
