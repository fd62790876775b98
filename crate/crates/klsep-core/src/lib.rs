//! Exact-arithmetic Kazhdan-Lusztig combinatorics for finite Coxeter groups:
//! group enumeration, the KL basis and its W-graph, the inductive
//! separated-element pass, Bott-Samelson fixed-point combinatorics and
//! integer torsion certificates.

pub mod bott_samelson;
pub mod coxeter;
pub mod hecke;
pub mod laurent;
pub mod separation;
pub mod torsion;
pub mod wgraph;

pub use bott_samelson::{
    bb_cell_dim, fiber_fixed_points, normal_line_weight, subword_product, tcurve_weight,
    SubwordMask, Word,
};
pub use coxeter::{build_group, contains_pattern, CoxeterSpec, Elt, Family, GroupTable, Side};
pub use hecke::{kl_basis, KlTable};
pub use laurent::LaurentPoly;
pub use separation::{compute_fw, propagate, sigma_report, CharStatus, FwState, FwTable, SigmaReport};
pub use torsion::{
    cokernel_torsion, euler_class_d4, mult_matrix, smith_normal_form, IntMatrix, MonomialClass,
    Smith,
};
pub use wgraph::{build_wgraph, read_wg1, write_wg1, WGraph};
