//! Exact, resource-bounded algorithmic-information measures over the SBM-1
//! reference machine, plus the dynamical-system, open-ended-evolution and
//! metabiology experiments built on them.
//!
//! Every quantity is computed relative to explicit bounds (program length
//! `L`, step bound `tau`) and carries those bounds with it.

pub mod bits;
pub mod complexity;
pub mod dyadic;
pub mod dynsys;
pub mod enumerate;
pub mod metabio;
pub mod oee;
pub mod vm;
