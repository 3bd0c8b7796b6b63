//! Combining several parses of one sentence into one: constituent voting,
//! unsupervised switching, and naive Bayes hybridization and switching.

mod bayes;
mod switch;
mod vote;

pub use bayes::{
    bayes_hybrid, bayes_switch, bayes_train, BayesConfig, BayesKind, BayesModel, ContextFeature,
};
pub use switch::{distance_switch, penalized_similarity_switch, similarity_switch, SwitchDecision};
pub use vote::{check_no_crossing, constituent_vote, vote_counts, weighted_vote, VoteConfig};
