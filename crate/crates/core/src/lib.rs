//! Mechanics of locally conservative force fields on punctured planar
//! domains.
//!
//! A force 1-form that is closed but not exact has local potentials on
//! contractible charts but no global one. This crate builds those local
//! potentials on a chart atlas, extracts the constant overlap differences
//! (a Čech cocycle) and their exponentials (principal-bundle transition
//! functions), integrates the motion symplectically with per-chart energy
//! bookkeeping, and lifts trajectories to the universal cover where the
//! energy becomes global again. Exterior calculus on E³ and an expression
//! language for field components round it out.

pub mod atlas;
pub mod bundle;
pub mod cli;
pub mod cover;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod fields;
pub mod forms3;
pub mod geom;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
pub use geom::Vec2;
