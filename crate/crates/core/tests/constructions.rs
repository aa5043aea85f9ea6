use forge_core::cayley::{build_cayley, build_schreier};
use forge_core::ffield::Field;
use forge_core::gensets::{
    alt_generators, cube_embeddings, nonsplit_torus, search_conjugator, sl3k_point_action,
    CubeSpec, SearchOptions,
};
use forge_core::groups::{PointDomain, DEFAULT_CAP};
use forge_core::spectral::dense_report;

#[test]
fn sl2_f9_torus_of_order_ten() {
    let f9 = Field::with_degree(3, 2).unwrap();
    let torus = nonsplit_torus(&f9, 2, DEFAULT_CAP).unwrap();
    assert_eq!(torus.order(), 10);
    let opts = SearchOptions {
        trials: 200,
        seed: 3,
        ..Default::default()
    };
    let s = search_conjugator(&torus, &f9, &opts).unwrap();
    assert!(s.lambda2 <= 19.0 / 20.0, "{}", s.lambda2);
    let cay = build_cayley(&s.set, DEFAULT_CAP).unwrap();
    assert_eq!(cay.graph.n(), 720);
    assert!((dense_report(&cay.graph).unwrap().lambda2 - s.lambda2).abs() < 1e-9);
}

#[test]
fn cube_with_one_axis_is_the_base_action() {
    let base = sl3k_point_action(1).unwrap();
    let spec = CubeSpec::reduced(7, 1).unwrap();
    let cube = cube_embeddings(&spec, &base).unwrap();
    let direct = build_schreier(&base, &PointDomain::Points { n: 7 }).unwrap();
    let via_cube = build_schreier(&cube.set, &PointDomain::Points { n: 7 }).unwrap();
    assert_eq!(direct.n(), via_cube.n());
    let a = dense_report(&direct).unwrap().lambda2;
    let b = dense_report(&via_cube).unwrap().lambda2;
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn small_cube_generates_a_transitive_even_group() {
    let spec = CubeSpec::reduced(5, 2).unwrap();
    let cube = cube_embeddings(&spec, &alt_generators(5)).unwrap();
    let g = build_schreier(&cube.set, &PointDomain::Points { n: 25 }).unwrap();
    assert!(g.is_connected());
    for gen in cube.set.group_elements() {
        assert!(gen.as_perm().unwrap().is_even());
    }
}
