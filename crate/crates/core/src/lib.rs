//! Finite-block-length simulation of random coding over classical-quantum
//! channels, decoded by cascades of three-outcome measurements that bisect
//! the codebook one label bit at a time.
//!
//! The layers, bottom up: [`linops`] for dense Hermitian algebra,
//! [`ensembles`] for channel outputs and codebooks, [`typicality`] for typical
//! projectors, [`decoders`] for the node measurements and baselines,
//! [`lemmas`] and [`chernoff`] for the supporting inequalities, and
//! [`harness`] for Monte Carlo sweeps.

pub mod chernoff;
pub mod decoders;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod lemmas;
pub mod linops;
pub mod random;
pub mod typicality;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/typicality.md")]
    mod typicality {}
    #[doc = include_str!("../../../book/src/decoders.md")]
    mod decoders {}
    #[doc = include_str!("../../../book/src/lemmas.md")]
    mod lemmas {}
    #[doc = include_str!("../../../book/src/chernoff.md")]
    mod chernoff {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
