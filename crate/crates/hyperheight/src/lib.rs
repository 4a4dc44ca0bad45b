pub mod cli;
pub mod curve_mumford;
pub mod error;
pub mod exact_algebra;
pub mod height_engine;
pub mod local_intersections;
pub mod place_select;
pub mod riemann_theta;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/curves-and-divisors.md")]
    mod curves_and_divisors {}
    #[doc = include_str!("../../../book/src/local-pairings.md")]
    mod local_pairings {}
    #[doc = include_str!("../../../book/src/archimedean.md")]
    mod archimedean {}
    #[doc = include_str!("../../../book/src/heights.md")]
    mod heights {}
    #[doc = include_str!("../../../book/src/reduction-data.md")]
    mod reduction_data {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
