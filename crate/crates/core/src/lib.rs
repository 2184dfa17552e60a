//! Privacy accounting for Report Noisy Max and private selection.

pub mod count_dist;
pub mod error;
pub mod numeric;
pub mod oracles;
pub mod pld;
pub mod profiles;
pub mod rnm;
pub mod scenarios;
pub mod selection;
pub mod validation;

pub use count_dist::{CountDistribution, CountFamily};
pub use error::{Error, Result};
pub use profiles::{PointDP, PrivacyProfile, RdpCurve};
