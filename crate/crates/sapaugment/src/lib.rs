//! Sample-adaptive data augmentation for speech training loops.
//!
//! Instead of perturbing every training sample equally, the policies in this
//! crate rank the samples of a mini-batch by their current training loss and
//! map each rank through a regularized incomplete beta function to an
//! augmentation strength: easy samples (low loss) are perturbed strongly,
//! hard samples barely or not at all. Five augmentations are driven this way
//! — time masking, frequency masking and time stretching on log-mel feature
//! matrices, sample pairing and cutmix on raw waveforms — and the policy
//! hyper-parameters themselves are found by Gaussian-process Bayesian
//! optimization with constant-liar parallel suggestion.
//!
//! The crate is organized around that flow:
//!
//! - [`betafn`]: log-gamma and the regularized incomplete beta function.
//! - [`policy`]: loss ranking, the rank → λ policy law, selection draws.
//! - [`augment`]: the five transforms, the λ → parameter maps, the log-mel
//!   front end, WAV and feature-file I/O.
//! - [`pipeline`]: per-batch planning and application of all five policies.
//! - [`search`]: GP surrogate, expected improvement, constant-liar batch
//!   suggestion, trial history and JSONL logs.
//! - [`harness`]: a synthetic audio classification task whose validation
//!   accuracy serves as the search objective.
//! - [`cli`]: the `sapaug` command-line interface.
//!
//! See the `examples/` directory for one runnable walkthrough per module.

pub mod augment;
pub mod betafn;
pub mod cli;
mod error;
mod fsutil;
pub mod harness;
pub mod pipeline;
pub mod policy;
pub mod search;
pub mod seeding;

pub use error::{Error, Result};
