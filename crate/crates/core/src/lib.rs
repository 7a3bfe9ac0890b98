//! Statement-level fault localization.
//!
//! Three localizers share one output currency, [`RankedList`]:
//!
//! * [`sbfl`] ranks statements by the Ochiai suspiciousness of their test
//!   coverage spectra.
//! * [`blues`] ranks statements by BM25 similarity to a bug report, first at
//!   file level and then within the most suspicious files.
//! * [`rafl`] fuses several ranked lists into one by minimizing a weighted
//!   sum of list distances with a cross-entropy Monte Carlo search. Fusing the
//!   spectrum and bug-report rankings this way is [`rafl::sbir_localize`].
//!
//! [`evalkit`] scores ranked lists against ground truth, and [`cli`] wires
//! everything to the `flrank` binary.

pub mod blues;
pub mod cli;
pub mod corpus;
pub mod evalkit;
pub mod rafl;
pub mod ranked;
pub mod sbfl;
pub mod textkit;

pub use ranked::{RankedEntry, RankedList, RankedListError};

/// Version of the on-disk bundle and ranked-list formats.
pub const FORMAT_VERSION: u32 = 1;
