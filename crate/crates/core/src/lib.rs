//! Explicit expander generating sets for finite simple groups, together with
//! the graph construction and numerical certification around them.
//!
//! The crate is organized bottom-up:
//!
//! * [`ffield`] and [`matrix`]: finite field and matrix arithmetic;
//! * [`groups`]: group elements, canonical keys, enumeration, point actions;
//! * [`gensets`]: the generating-set constructions;
//! * [`cayley`]: Cayley and Schreier graphs in CSR form;
//! * [`spectral`]: eigenvalue, expansion and diameter certificates;
//! * [`decomp`]: bounded-product and bounded-generation checks;
//! * [`pipeline`]: reproducible runs and family scans driven by a config.

pub mod cayley;
pub mod decomp;
pub mod ffield;
pub mod gensets;
pub mod groups;
pub mod matrix;
pub mod pipeline;
pub mod spectral;

pub use ffield::{make_field, Field, FieldElement, FieldError, FieldSpec};
pub use groups::{CanonicalKey, GroupElement, GroupError, GroupHandle, GroupTable, Perm, PointDomain};
pub use matrix::Matrix;
pub use cayley::{build_cayley, build_schreier, CayleyGraph, GraphError, GraphKind, SparseGraph};
pub use gensets::{GeneratingSet, GensetError, Generator};
pub use spectral::{LanczosOptions, SpectralError, SpectralReport};
