//! Fixtures shared by the benchmarks.

use forge_core::cayley::{build_cayley, build_schreier, SparseGraph};
use forge_core::ffield::Field;
use forge_core::gensets::{alt_generators, cube_embeddings, sl2_standard, CubeSpec};
use forge_core::groups::{PointDomain, DEFAULT_CAP};

/// Cayley graph of SL_2(F_p) with the standard generators.
pub fn sl2_graph(p: u64) -> SparseGraph {
    let set = sl2_standard(&Field::prime(p).unwrap());
    build_cayley(&set, DEFAULT_CAP).unwrap().graph
}

/// Schreier graph of the reduced cube construction over Alt(d) on d^m points.
pub fn cube_graph(d: usize, m: usize) -> SparseGraph {
    let spec = CubeSpec::reduced(d, m).unwrap();
    let cube = cube_embeddings(&spec, &alt_generators(d)).unwrap();
    build_schreier(&cube.set, &PointDomain::Points { n: spec.n }).unwrap()
}
