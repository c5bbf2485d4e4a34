//! Gluing equations and Neumann–Zagier symplectic data for ideally
//! triangulated cusped 3-manifolds, for all `n >= 2`.
//!
//! Given an (abstract, possibly partially glued) triangulation by ideal
//! tetrahedra, this crate builds the degree-`n` shape coordinate system on
//! each tetrahedron, the exact skew form on those coordinates, the gluing
//! equation system, the peripheral (cusp) holonomy data, and the integer
//! symplectic quotient carrying the Neumann–Zagier pairing. Structural
//! statements are verified by exact integer linear algebra; a complementary
//! floating-point layer evaluates the coordinates on explicit flags,
//! checks the Lagrangian/rigidity properties of the shape locus, and solves
//! the `n = 2` gluing equations numerically.
//!
//! Modules:
//!
//! * [`intmat`] — exact integer matrices, Smith normal form, lattices.
//! * [`triangulation`] — tetrahedra, face matchings, edge/vertex classes,
//!   vertex links, boundary surface.
//! * [`links`] — CW structures on vertex links used by the peripheral maps.
//! * [`tetra`] — the degree-`n` point lattice on one tetrahedron and its
//!   skew form.
//! * [`gluing`] — internal point classes, the gluing equation system, and
//!   the symplectic complex built from it.
//! * [`peripheral`] — peripheral holonomy maps, the `h`/`g` comparison maps
//!   and their verification, homology of the symplectic quotient.
//! * [`flags`] — floating-point evaluation on flags, Lagrangian and
//!   rigidity checks, the `n = 2` numeric solver.
//! * [`config`] — centralized numeric tolerances.
//! * [`report`] — serializable check reports.

pub mod config;
pub mod flags;
pub mod gluing;
pub mod homology;
pub mod intmat;
pub mod links;
pub mod peripheral;
pub mod report;
pub mod tetra;
pub mod triangulation;
mod uf;
