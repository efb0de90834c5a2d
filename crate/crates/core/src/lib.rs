//! Local-unitary orbit dimension of multi-qubit pure states.
//!
//! The orbit of `|ψ>` under `SU(2)^⊗n` has dimension `rank_R(M) − 1`, where
//! `M` stacks the action of the local `su(2)` generators on `|ψ>` together
//! with `−iψ`. From the same matrix this crate detects singlet pairs and
//! unentangled qubits and classifies minimum-orbit states by their pairing.

pub mod cli;
pub mod error;
pub mod json;
pub mod lie_action;
pub mod lu_group;
pub mod orbit_analysis;
pub mod rank_engine;
pub mod rng;
pub mod state_core;
mod svd;
pub mod verify;

pub use error::{Error, Result};
pub use orbit_analysis::{
    analyze, classify_min_orbit, detect_singlet_pairs, detect_unentangled, factor_state, is_minimum_orbit,
    min_orbit_dimension, orbit_dimension, pairing_equal, Classification, OrbitReport, SingletPairing,
};
pub use rank_engine::{Backend, RankOptions};
pub use state_core::{Mode, MultiIndex, StateVector};
