//! Cross-module invariants: oracle equivalence on every fixture, boundary
//! algebra on arbitrary complexes, gamma monotonicity, determinism.

use betti_core::complex::SimplicialComplex;
use betti_core::dec::MeasureMode;
use betti_core::generate::Shape;
use betti_core::hodge::{
    betti_from_engine, betti_numbers_oracle, betti_via_cohomology, CohomologyOptions, HodgeEngine,
    RankMethod,
};
use betti_core::rank::StochasticRankConfig;
use proptest::prelude::*;

fn fixtures() -> Vec<(Shape, Vec<usize>)> {
    vec![
        (Shape::SphereTetra, vec![1, 0, 1]),
        (Shape::SphereIcosa, vec![1, 0, 1]),
        (Shape::Torus(3, 3), vec![1, 2, 1]),
        (Shape::Torus(4, 5), vec![1, 2, 1]),
        (Shape::GenusSurface { genus: 1, subdivisions: 2 }, vec![1, 2, 1]),
        (Shape::GenusSurface { genus: 2, subdivisions: 2 }, vec![1, 4, 1]),
        (Shape::ThreeTorus(3), vec![1, 3, 3, 1]),
    ]
}

#[test]
fn oracle_equivalence_every_fixture_every_degree() {
    for (shape, expected) in fixtures() {
        let k = shape.generate().unwrap();
        let oracle = betti_numbers_oracle(&k).unwrap();
        assert_eq!(oracle, expected, "{shape:?} oracle");
        for degree in 0..=k.dim() {
            let report =
                betti_via_cohomology(&k, degree, &CohomologyOptions::default()).unwrap();
            assert_eq!(report.betti, expected[degree], "{shape:?} degree {degree}");
            assert_eq!(report.normalized, expected[degree] as f64 / report.gamma as f64);
        }
    }
}

#[test]
fn euler_characteristic_equals_alternating_betti_sum() {
    for (shape, _) in fixtures() {
        let k = shape.generate().unwrap();
        let betti = betti_numbers_oracle(&k).unwrap();
        let alt: i64 = betti
            .iter()
            .enumerate()
            .map(|(r, &b)| if r % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        assert_eq!(alt, k.euler_characteristic(), "{shape:?}");
    }
}

#[test]
fn boundary_squared_zero_every_fixture() {
    for (shape, _) in fixtures() {
        let k = shape.generate().unwrap();
        for r in 2..=k.dim() {
            let prod = k.boundary_matrix(r - 1).unwrap().matmul(&k.boundary_matrix(r).unwrap());
            assert_eq!(prod.nnz(), 0, "{shape:?} B_{}B_{}", r - 1, r);
        }
    }
}

#[test]
fn incidence_sparsity_bounds() {
    for (shape, _) in fixtures() {
        let k = shape.generate().unwrap();
        let n = k.dim();
        let am = k.incidence_matrices();
        // top-degree F: each top cell has at most n+1 neighbors
        assert!(am.f[n].max_row_nnz() <= n + 1, "{shape:?} F_{n}");
        for r in 1..=n {
            // G_r rows have exactly r+1 entries
            assert_eq!(am.g[r].max_row_nnz(), r + 1, "{shape:?} G_{r} rows");
            assert!(am.g[r].nnz() == k.skeleton_size(r) * (r + 1));
        }
        // on a closed manifold the top G is column-wise 2-sparse
        assert_eq!(am.g[n].transpose().max_row_nnz(), 2, "{shape:?} G_{n} columns");
    }
}

#[test]
fn gamma_monotone_and_small_gamma_suffices() {
    let k = Shape::Torus(8, 8).generate().unwrap();
    let engine = HodgeEngine::new(&k, 1, MeasureMode::Uniform).unwrap();
    let beta = 2usize;
    for seed in 0..20u64 {
        let mut prev = 0usize;
        let mut gamma_star = None;
        for gamma in [1, 2, 4, 8, 10, 16, 64, 192] {
            let opts = CohomologyOptions { gamma: Some(gamma), seed, ..Default::default() };
            let report = betti_from_engine(&engine, &opts).unwrap();
            assert!(report.betti >= prev, "rank must be monotone in gamma (seed {seed})");
            prev = report.betti;
            if report.betti == beta && gamma_star.is_none() {
                gamma_star = Some(gamma);
            }
        }
        assert_eq!(prev, beta, "full gamma must recover beta (seed {seed})");
        let gs = gamma_star.expect("beta reached");
        assert!(gs <= beta + 8, "gamma* = {gs} too large (seed {seed})");
    }
}

#[test]
fn partial_gamma_on_genus_two_and_icosahedron() {
    let k = Shape::GenusSurface { genus: 2, subdivisions: 2 }.generate().unwrap();
    let opts = CohomologyOptions { gamma: Some(64), ..Default::default() };
    let report = betti_via_cohomology(&k, 1, &opts).unwrap();
    assert_eq!(report.betti, 4, "genus-2 beta_1 at gamma = 64");

    let icosa = Shape::SphereIcosa.generate().unwrap();
    let opts = CohomologyOptions { gamma: Some(20), ..Default::default() };
    let report = betti_via_cohomology(&icosa, 2, &opts).unwrap();
    assert_eq!(report.betti, 1, "icosahedron beta_2 at gamma = 20");
}

#[test]
fn generated_fixtures_are_closed_manifolds() {
    for (shape, _) in fixtures() {
        let k = shape.generate().unwrap();
        assert!(k.validate_closed_manifold().is_closed(), "{shape:?}");
    }
    let big = Shape::Torus(8, 8).generate().unwrap();
    assert!(big.validate_closed_manifold().is_closed());
}

#[test]
fn betti_seed_invariant_on_torus_8_8() {
    let k = Shape::Torus(8, 8).generate().unwrap();
    let engine = HodgeEngine::new(&k, 1, MeasureMode::Uniform).unwrap();
    for seed in 0..20u64 {
        let opts = CohomologyOptions { seed, ..Default::default() };
        assert_eq!(betti_from_engine(&engine, &opts).unwrap().betti, 2, "seed {seed}");
    }
}

#[test]
fn stochastic_deterministic_across_thread_pools() {
    let k = Shape::Torus(4, 4).generate().unwrap();
    let run_with_threads = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let opts = CohomologyOptions {
                method: RankMethod::Stochastic(StochasticRankConfig {
                    n_probes: 48,
                    cheb_degree: 64,
                    gap: 0.25,
                    seed: 11,
                }),
                seed: 11,
                ..Default::default()
            };
            betti_via_cohomology(&k, 1, &opts).unwrap()
        })
    };
    let a = run_with_threads(1);
    let b = run_with_threads(4);
    assert_eq!(a.normalized.to_bits(), b.normalized.to_bits());
    assert_eq!(a, b);
}

#[test]
fn geometric_mode_off_mesh_matches_oracle() {
    // regular octahedron: an equilateral closed surface with coordinates
    let coords = [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let faces = [
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("octa.off");
    let mut text = String::from("OFF\n6 8 12\n");
    for c in coords {
        text.push_str(&format!("{} {} {}\n", c[0], c[1], c[2]));
    }
    for f in faces {
        text.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
    }
    std::fs::write(&path, text).unwrap();
    let k = betti_core::io::read_off(&path).unwrap();
    assert!(k.validate_closed_manifold().is_closed());
    let opts = CohomologyOptions { mode: MeasureMode::Geometric, ..Default::default() };
    for (degree, want) in [(0usize, 1usize), (1, 0), (2, 1)] {
        let report = betti_via_cohomology(&k, degree, &opts).unwrap();
        assert_eq!(report.betti, want, "degree {degree}");
    }
}

#[test]
fn double_cover_of_annulus_euler_identity() {
    // annulus strip: two concentric triangles of 6 vertices
    let outer = [0usize, 1, 2];
    let inner = [3usize, 4, 5];
    let mut tops = Vec::new();
    for i in 0..3 {
        let (a, b) = (outer[i], outer[(i + 1) % 3]);
        let (c, d) = (inner[i], inner[(i + 1) % 3]);
        tops.push(vec![a, b, c]);
        tops.push(vec![b, c, d]);
    }
    let k = SimplicialComplex::build_from_simplexes(&tops, 6).unwrap();
    assert!(!k.validate_closed_manifold().is_closed());
    let boundary_edges = k.validate_closed_manifold().violations.len();
    // chi(boundary) = 0 for two circles: vertices = edges along the boundary
    let d = k.double_cover().unwrap();
    assert!(d.validate_closed_manifold().is_closed());
    let chi_boundary = 0i64;
    assert_eq!(d.euler_characteristic(), 2 * k.euler_characteristic() - chi_boundary);
    assert_eq!(boundary_edges, 6);
    // the double of an annulus is a torus
    assert_eq!(betti_numbers_oracle(&d).unwrap(), vec![1, 2, 1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Arbitrary closures are valid complexes with dd = 0 and closure
    /// idempotence.
    #[test]
    fn random_complex_boundary_algebra(
        tops in proptest::collection::vec(
            proptest::collection::btree_set(0usize..10, 2..=4),
            1..12,
        )
    ) {
        let tops: Vec<Vec<usize>> = tops.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut dedup = tops.clone();
        dedup.sort();
        dedup.dedup();
        let k = match SimplicialComplex::build_from_simplexes(&dedup, 10) {
            Ok(k) => k,
            Err(_) => return Ok(()),
        };
        for r in 2..=k.dim() {
            let b1 = k.boundary_matrix(r - 1).unwrap();
            let b2 = k.boundary_matrix(r).unwrap();
            prop_assert_eq!(b1.matmul(&b2).nnz(), 0);
        }
        // each column of B_r has exactly r+1 entries
        for r in 1..=k.dim() {
            let bt = k.boundary_matrix(r).unwrap().transpose();
            for j in 0..k.skeleton_size(r) {
                prop_assert_eq!(bt.row_nnz(j), r + 1);
            }
        }
        // oracle alternating sum equals the Euler characteristic
        let betti = betti_numbers_oracle(&k).unwrap();
        let alt: i64 = betti
            .iter()
            .enumerate()
            .map(|(r, &b)| if r % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        prop_assert_eq!(alt, k.euler_characteristic());
    }

    /// JSON round trip reproduces the complex exactly.
    #[test]
    fn json_round_trip(
        tops in proptest::collection::vec(
            proptest::collection::btree_set(0usize..8, 3..=3),
            1..8,
        )
    ) {
        let tops: Vec<Vec<usize>> = tops.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut dedup = tops;
        dedup.sort();
        dedup.dedup();
        let k = match SimplicialComplex::build_from_simplexes(&dedup, 8) {
            Ok(k) => k,
            Err(_) => return Ok(()),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.json");
        betti_core::io::write_complex_json(&k, &path).unwrap();
        let k2 = betti_core::io::read_complex_json(&path).unwrap();
        for r in 0..=k.dim() {
            prop_assert_eq!(k.skeleton(r), k2.skeleton(r));
        }
    }
}
