//! Physics-compliant multi-port network engine for tunably loaded wireless
//! channels.
//!
//! The crate models a radio environment as an N-port linear network whose
//! tunable ports are closed by load impedances. It provides:
//!
//! - impedance/scattering representations and conversions ([`network`]);
//! - partial termination and channel extraction ([`termination`]);
//! - load circuits built from wiring skeletons, their effective load
//!   matrices, and an independent nodal-analysis oracle ([`loadcircuit`]);
//! - cascading an environment with a load circuit, in both domains, plus
//!   the rewrite of an interconnected-load problem as a diagonal-load
//!   problem over the cascade ([`cascade`]);
//! - seeded generation of reciprocal passive instances ([`synth`]);
//! - discrete load optimization applied identically to both problem forms
//!   ([`optim`]);
//! - the shared JSON file format ([`json`]).
//!
//! Everything is a pure function over immutable values; all types are safe
//! to share across worker threads.

pub mod cascade;
pub mod error;
pub mod json;
pub mod linalg;
pub mod loadcircuit;
pub mod network;
pub mod optim;
pub mod partition;
pub mod synth;
pub mod termination;

pub use cascade::{cascade_z, map_to_dris, star_s, CascadeResult};
pub use error::{NetError, Result};
pub use linalg::CMatrix;
pub use loadcircuit::{
    build_named, build_skeleton, diagonal_shunt_z, effective_phi, named_skeleton,
    phi_nodal_oracle, LoadCircuit, Skeleton, Topology,
};
pub use network::{MultiportNetwork, PropertyReport, Rep, DEFAULT_Z0};
pub use optim::{
    coordinate_descent, evaluate, evaluate_direct_bdris, exhaustive, optimize_bdris,
    optimize_dris, Algorithm, LoadModel, Objective, OptimResult,
};
pub use partition::PortPartition;
pub use synth::{random_env, random_load_circuit, random_passive_loads, PartitionSpec, SynthConfig};
pub use termination::{channel, terminate_s, terminate_s_gamma, terminate_z, Channel, LoadVector, Route};
