//! Exact engine for weighted gain graphs over `Z^d`.
//!
//! The crate covers balance and closure, switching and contraction, the total
//! dichromatic polynomial, activities in the semimatroid of graph balance,
//! Möbius coloring counts, and lattice-point counting outside affinographic
//! arrangements, each paired with a brute-force oracle.

pub mod activities;
pub mod coloring;
pub mod dichromatic;
pub mod gain_graph;
pub mod io;
pub mod lattice;
pub mod mpoly;
pub mod orthotope;
pub mod switching;
pub mod verify;
pub mod weights;

pub use dichromatic::{q_graph, q_total_delcon, q_total_subset, Monomial, QPolynomial};
pub use gain_graph::{Edge, EdgeSet, GainGraph, GraphError};
pub use lattice::{LatticeBox, LatticeVector};
pub use switching::{top_switching, SwitchingFunction, WeightedGainGraph};
pub use weights::{ColorSet, ConeMinusFinite, DoubleWeight, FiniteList, MaxZd, SumZd, Weight};
