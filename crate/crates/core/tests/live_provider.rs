//! Calls a real embedding provider. Opt in with
//! `GAMEABS_LIVE=openai|gemini cargo test --test live_provider -- --ignored`
//! and the provider's API key in its usual variable.

use gameabs::embed::{fetch_embeddings, transport_for, EmbeddingCache, ProviderConfig, ProviderKind};

#[test]
#[ignore = "needs network access and an API key"]
fn live_provider_embeds_card_texts() {
    let Ok(name) = std::env::var("GAMEABS_LIVE") else {
        eprintln!("GAMEABS_LIVE not set; skipping");
        return;
    };
    let provider: ProviderKind = name.parse().unwrap();
    let cfg = ProviderConfig::for_provider(provider);
    let texts: Vec<String> = ["Ace of Spades", "King of Hearts", "Two of Clubs"].map(String::from).into();
    let mut cache = EmbeddingCache::in_memory();
    let table = fetch_embeddings(&cfg, &texts, &mut cache, transport_for(&cfg, true).as_ref()).unwrap();
    assert_eq!(table.len(), 3);
    assert!(table.dim() > 16);
}
