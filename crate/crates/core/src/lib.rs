//! Equivariant deformations of stable curves with finite group actions and
//! the isotrivial product surfaces built from them.

mod cyclotomic;

pub mod cli_io;
pub mod curve_graph;
pub mod equivariant_action;
pub mod family_checker;
pub mod finite_group;
pub mod parallel;
pub mod product_surface;
pub mod random;

pub use curve_graph::{DualGraph, GraphData, GraphError, T1Breakdown};
pub use equivariant_action::{ActionData, ActionError, CurveAction, EquivariantT1, QuotientSignature};
pub use finite_group::{FiniteGroup, GroupError, Perm, RotationChar, Subgroup};
