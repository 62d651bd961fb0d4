//! Erasure-coded distributed computing over binary (±1) linear codes.
//!
//! A job is split into `k` equal tasks, encoded into `n` worker tasks with an
//! (n, k) code, and the job completes as soon as a decodable subset of workers
//! has finished. Workers that have not finished by time `t` look exactly like
//! erasures of a memoryless channel, so code constructions, erasure decoders,
//! and channel analytics decide the whole performance story.
//!
//! The crate provides:
//!
//! * [`codes`] — Reed-Muller, polar, random ±1, real MDS, and uncoded
//!   generator matrices, plus BEC bit-channel polarization profiles.
//! * [`matrix`] — exact (fraction-free) integer linear algebra for the
//!   recoverability decisions, and floating singular-value routines for
//!   condition numbers.
//! * [`channel`] — erasure patterns, conditional failure profiles
//!   p_{n,k}(i), block-error curves.
//! * [`decoder`], [`map`], [`projective`], [`polar`] — the decoder trait and
//!   the block/bit-MAP, projective Reed-Muller, and polar successive
//!   cancellation decoders.
//! * [`analytics`] — closed-form, series, bound, and quadrature evaluations
//!   of the average execution time, plus optimal-k and optimal-rate searches.
//! * [`stability`] — condition-number experiments and end-to-end precision
//!   loss measurements.
//! * [`sim`] — the straggler simulator, including real encoded
//!   matrix-multiplication jobs.

pub mod analytics;
pub mod channel;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod map;
pub mod matrix;
pub mod polar;
pub mod projective;
pub mod rng;
pub mod sim;
pub mod stability;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
