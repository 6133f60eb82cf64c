//! Action embeddings: the shared table format, local GloVe training and
//! remote providers.

mod glove;
mod remote;
mod table;

pub use glove::{
    build_cooccurrence, fit_glove, glove_loss, train_corpus, train_glove, CoocTable, GloveModel, GloveParams,
};
pub use remote::{
    build_request, fetch_embeddings, hand_text_vocabulary, parse_response, transport_for, EmbeddingCache, HandTextKind,
    HashTransport, HttpRequest, HttpTransport, OfflineTransport, ProviderConfig, ProviderKind, Transport, MOCK_DIM,
};
pub use table::{EmbeddingTable, Provenance};
