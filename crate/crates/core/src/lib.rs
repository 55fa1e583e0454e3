//! Reachability, coverability and inclusion for integer vector addition
//! systems with states and resets, decided through generalized Parikh images
//! and Presburger arithmetic.

pub mod backend;
pub mod encode;
pub mod gen;
pub mod model;
pub mod oracle;
pub mod pa;
pub mod par;
pub mod parikh;
