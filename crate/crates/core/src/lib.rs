//! Conditional entropy and coherent information for finite-dimensional and
//! Fock-truncated quantum states.
//!
//! States are [`DensityMatrix`] values over a labelled [`SubsystemLayout`];
//! composite indices are row-major with the last subsystem fastest. Entropies
//! are in nats.
//!
//! ```
//! use qcondent::{catalog, entropy};
//!
//! let bell = catalog::bell(2).unwrap().as_density();
//! let h = entropy::conditional_entropy(&bell, &["B"], &["A"]).unwrap();
//! assert!((h.to_f64() + std::f64::consts::LN_2).abs() < 1e-12);
//! ```

pub mod catalog;
pub mod channels;
pub mod entropy;
pub mod error;
pub mod extended;
pub mod harness;
pub mod io;
pub mod layout;
pub mod linalg;
pub mod random;
pub mod state;
pub mod tol;
pub mod truncation;

pub use channels::KrausChannel;
pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use layout::{Subsystem, SubsystemLayout};
pub use state::{DensityMatrix, PureState};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/entropies.md")]
    mod entropies {}
    #[doc = include_str!("../../../book/src/conditional.md")]
    mod conditional {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/truncation.md")]
    mod truncation {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
