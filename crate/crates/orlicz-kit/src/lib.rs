//! Young functions, Orlicz-Morrey ball norms, the maximal and fractional operators
//! `M`, `I_ρ`, `M_ρ` on sampled fields, condition evaluators, and a verification harness
//! that fits the constants of the associated inequalities.

pub mod ext;
pub mod grids;
pub mod par;
pub mod quad;
pub mod young_calc;
pub mod weights_kernels;
pub mod fields_norms;
pub mod corpus;
pub mod operators;
pub mod criteria;
pub mod verify_harness;
pub mod io;
