//! collisim: a simulator and protocol library for a two-pair wireless packet
//! network whose receivers keep their collided receptions and decode them
//! later.
//!
//! Links switch on and off as independent Bernoulli(p) indicators and the
//! transmitters learn the state one slot late. Instead of discarding a
//! collision, a receiver stores it as an exact linear equation over the
//! packet unknowns; the transmitters then coordinate - through their delayed
//! state knowledge alone - to send combinations that settle many stored
//! equations at once.
//!
//! The crate provides:
//!
//! - [`field`]: exact arithmetic over GF(2^31 - 1) plus the rank /
//!   elimination / solvability kernel,
//! - [`channel`]: the four-link on/off channel, receiver states, and the
//!   canonical 16-case connectivity table,
//! - [`queues`]: the Phase-1 queue state machine with its deadline and
//!   halting rules,
//! - [`combiner`]: the two coding opportunities that rewrite queues between
//!   the phases,
//! - [`multicast`]: the Phase-2 random-linear delivery of the packets of
//!   common interest,
//! - [`decoder`]: receiver memory and elimination-based decoding,
//! - [`analysis`]: throughput regions, time predictions, the rank
//!   inequality checker and the concentration bound,
//! - [`harness`]: seeded experiments, baselines, CSV/trace emission and
//!   replay, all bit-reproducible,
//! - [`scenarios`]: small hand-built channel histories for study and tests.
//!
//! The `collisim` binary exposes the harness as a command line tool; see the
//! guide under `book/` for a narrative walk-through.
//!
//! ```
//! use collisim::analysis::capacity_region;
//! use collisim::packet::Probability;
//!
//! let region = capacity_region(Probability::HALF);
//! assert!(region.contains(0.45, 0.45, 1e-12));
//! assert!(!region.contains(0.46, 0.46, 1e-12));
//! ```

pub mod analysis;
pub mod channel;
pub mod combiner;
pub mod decoder;
pub mod error;
pub mod field;
pub mod harness;
pub mod multicast;
pub mod observe;
pub mod packet;
pub mod queues;
pub mod rng;
pub mod scenarios;

pub use error::{AnalysisError, ConfigError, TraceError};
pub use packet::{PacketId, PacketRecord, Probability, QueueTag, User};

// The guide's code blocks double as doc-tests so the book can never drift
// from the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(intro, "../../../book/src/intro.md");
    chapter!(model, "../../../book/src/model.md");
    chapter!(queues_and_cases, "../../../book/src/queues-and-cases.md");
    chapter!(coding_opportunities, "../../../book/src/coding-opportunities.md");
    chapter!(two_phase_strategy, "../../../book/src/two-phase-strategy.md");
    chapter!(regions_and_bounds, "../../../book/src/regions-and-bounds.md");
    chapter!(field_kernel, "../../../book/src/field-kernel.md");
    chapter!(cli_and_formats, "../../../book/src/cli-and-formats.md");
}
