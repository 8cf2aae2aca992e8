//! Computations on the flag space of the real projective plane under
//! `PGL(3, R)`: loxodromic dynamics, ping-pong certificates for Schottky
//! configurations, gluing data for surgeries along anti-flag involutions,
//! and holonomy checks.

// `!(x > t)` is the NaN-rejecting form of `x <= t`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod export;
pub mod fixtures;
pub mod flag;
pub mod group;
pub mod holonomy;
pub mod linalg;
pub mod sample;
pub mod schottky;
pub mod spectral;
pub mod surgery;
pub mod tube;

pub use flag::{flag_distance, make_flag, Flag, FlagError, ProjLine, ProjPoint};
pub use group::{act, antiflag_involution, ext_act, ext_compose, kappa, theta, ExtElem, GroupElem, GroupError};
pub use linalg::{Mat3, Vec3};
pub use sample::{SampleError, SampledSet};
pub use spectral::{classify, one_param_power, Loxodromic, OneParameterGroup, Spectrum};
pub use tube::{Tube, TubeError};
