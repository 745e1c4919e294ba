//! Computational laboratory for the Suzuki groups Sz(q).

pub mod error;
pub mod field;
pub mod group;
pub mod polycount;
pub mod rng;
pub mod runner;
pub mod sl2;
pub mod spectral;
pub mod suzuki;
pub mod walks;
pub mod words;

pub use error::{Error, Result};
pub use field::{Fe, Field};
pub use group::Group;
pub use suzuki::{BruhatParams, GroupIndex, Matrix4, Suzuki, SuzukiElement};
