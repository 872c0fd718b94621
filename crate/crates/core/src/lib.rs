//! Interior transmission eigenvalues and boundary localization for
//! radially stratified disks and balls.
//!
//! The guide in `book/` walks through the modules; its code blocks run as
//! doc-tests of this crate.

pub mod error;
pub mod localization;
pub mod media;
pub mod quadrature;
pub mod radial;
pub mod records;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub mod chapter0 {}
    #[doc = include_str!("../../../book/src/media.md")]
    pub mod chapter1 {}
    #[doc = include_str!("../../../book/src/radial.md")]
    pub mod chapter2 {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    pub mod chapter3 {}
    #[doc = include_str!("../../../book/src/localization.md")]
    pub mod chapter4 {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod chapter5 {}
}
