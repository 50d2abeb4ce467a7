//! Exact enumeration, singularity analysis and uniform sampling of closed
//! lambda-terms whose De Bruijn indices, or whose number of De Bruijn levels,
//! are bounded by a constant `k`.

pub mod asymptotics;
pub mod error;
pub mod family;
pub mod oracle;
pub mod profile;
pub mod sampler;
pub mod series;
pub mod term;

pub use error::{Error, Result};
pub use family::{Family, FamilySpec, MarkSpec};
pub use series::{count_closed, distribution, exact_moments, Census};
pub use term::{level_histogram, parse_debruijn, render_debruijn, term_stats, to_lambda_dag, Term};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/terms.md")]
    mod terms {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/singularities.md")]
    mod singularities {}
    #[doc = include_str!("../../../book/src/profiles.md")]
    mod profiles {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
