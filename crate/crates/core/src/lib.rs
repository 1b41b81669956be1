//! Computational toolkit for diagram groups arising from geometrically fast
//! sets of bumps.
//!
//! A *bump* is an orientation-preserving homeomorphism of `[0,1]` with a
//! single orbital; a finite set of positive bumps is *geometrically fast*
//! when some choice of markers gives all bumps pairwise disjoint feet.  The
//! group generated by such a set depends only on the left-to-right order of
//! the feet, recorded combinatorially as a *dynamical diagram*.  This crate
//! compiles dynamical diagrams to semigroup presentations, represents group
//! elements as strand diagrams with dipole reduction to a normal form, and
//! cross-checks everything against an exact rational piecewise-linear
//! realization of the bumps.
//!
//! Module map:
//!
//! * [`presentation`] — semigroup presentations, words, elementary rewriting.
//! * [`strand`] — strand diagrams: composition, sum, inversion, dipole
//!   reduction, canonical keys, maximal-path labels.
//! * [`dynamical`] — dynamical diagrams: enumeration, irreducibility, the
//!   canonical partition, the presentation compiler, generator diagrams, the
//!   map from group words to reduced diagrams and its inverse factorization.
//! * [`plhomeo`] — exact piecewise-linear homeomorphisms of `[0,1]`: the
//!   independent oracle for the word problem, local reductions, conjugation
//!   moves on dynamical diagrams, and orbit search.
//! * [`moves`] — presentation transformations preserving the diagram group
//!   (Guba–Sapir moves), derivation scripts, and presentation equality up to
//!   renaming.
//! * [`wordgen`] — seeded generation of freely reduced random group words.

pub mod dynamical;
pub mod moves;
pub mod plhomeo;
pub mod presentation;
pub mod strand;
pub mod wordgen;

pub use dynamical::{DiagramGroup, DynamicalDiagram, GroupWord};
pub use presentation::{GenId, Presentation, Relation, Word};
pub use strand::StrandDiagram;
