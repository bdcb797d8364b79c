//! Online ranking with discrete-choice feedback.
//!
//! Each round a learner outputs a ranking of `n` items, nature reveals a
//! score function over the items (the set of items a user chose, or a
//! negated reference ranking), and the learner pays the position loss of
//! its ranking. Regret is measured against the best fixed ranking in
//! hindsight.
//!
//! The main learner, [`learners::OnlineRank`], keeps cumulative scores and
//! samples its ranking from a randomized sorting procedure whose pairwise
//! marginals follow a two-action multiplicative-weights rule:
//!
//! ```
//! use onlinerank::prelude::*;
//!
//! let n = 10;
//! let horizon = 2000;
//! let config = LearnerConfig::auto(n, horizon, Setting::Single, SamplerKind::PlackettLuceGumbel)?;
//! let mut learner = OnlineRank::new(config);
//!
//! let mut nature = RngStream::new(7, 0);
//! let mut coins = RngStream::new(7, 1);
//! let sequence = uniform_single_choice(n, horizon, &mut nature)?;
//!
//! let mut total = 0.0;
//! for feedback in sequence.steps() {
//!     let ranking = learner.step(&mut coins)?;
//!     total += pairwise_loss(&ranking, feedback)?;
//!     learner.update(feedback)?;
//! }
//! let best = hindsight_best(&sequence)?;
//! let regret = total - total_pairwise_loss(&best, &sequence)?;
//! assert!(regret <= regret_bound_theorem1(n, horizon, 10.0));
//! # Ok::<(), onlinerank::Error>(())
//! ```
//!
//! The `book/` directory next to this crate walks through the ideas with
//! runnable examples; those examples are compiled and run as doctests of
//! this crate.

pub mod environments;
pub mod error;
pub mod evaluation;
pub mod feedback;
pub mod learners;
pub mod loss;
pub mod ranking;
pub mod rng;
pub mod samplers;
pub mod stats;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::environments::{
        load_trace, parse_trace, render_trace, spearman_sequence, uniform_general,
        uniform_k_choice, uniform_single_choice, write_trace, FeedbackSequence, Provenance,
        SpearmanMode,
    };
    pub use crate::error::{Error, Result};
    pub use crate::evaluation::{
        expected_step_loss_uniform, hindsight_best, marginal_test, regret_bound_theorem1,
        regret_lower_bound, total_pairwise_loss, BoundReport, MarginalReport, RunRecord,
    };
    pub use crate::feedback::{Feedback, FeedbackKind, Setting};
    pub use crate::learners::{
        eta_theorem1, fpl_step, mw_explicit_step, Fpl, FplConfig, Learner, LearnerConfig,
        LearnerKind, MwExplicit, OnlineRank,
    };
    pub use crate::loss::{
        pairwise_loss, pairwise_loss_term, position_loss, squared_spread,
        zero_indexed_position_loss,
    };
    pub use crate::ranking::{Item, ItemSet, Ranking};
    pub use crate::rng::RngStream;
    pub use crate::samplers::{
        pairwise_marginal, plackett_luce_gumbel, plackett_luce_sample, quicksort_sample,
        SamplerKind,
    };
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/losses.md")]
    mod losses {}
    #[doc = include_str!("../../../book/src/samplers.md")]
    mod samplers {}
    #[doc = include_str!("../../../book/src/learners.md")]
    mod learners {}
    #[doc = include_str!("../../../book/src/regret.md")]
    mod regret {}
    #[doc = include_str!("../../../book/src/spearman.md")]
    mod spearman {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
