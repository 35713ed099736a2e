use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shadowcut::analysis::{
    all_norms_battery, brute_force_paths, check_certificate, check_ordering_coincide,
    parametric_path, sample_shadow_paths, shadow_polygon,
};
use shadowcut::constructions::random::random_instance;
use shadowcut::constructions::{
    canonicalize_w_to_e1, compress, deformed_cube, find_k_for_norm, fixed_c_variant, goldfarb_cube,
    many_from_one, random_regular_polyhedral, uniform_regular_k, CompressSpec,
};
use shadowcut::exact::{int, rat, Scalar};
use shadowcut::pivot::run_simplex;
use shadowcut::polytope::{
    enumerate_vertices, exhaustive_vertices, find_vertex, vertex_from_basis,
};
use shadowcut::{NormSpec, PivotRuleSpec, QVector};

/// Vertex coordinates of the deformed cube computed straight from its
/// definition: each coordinate sits at its lower or upper bound.
fn cube_vertices_by_formula(n: usize, eps: &Scalar, delta: &Scalar) -> BTreeSet<Vec<Scalar>> {
    (0..1u32 << n)
        .map(|bits| {
            let mut x: Vec<Scalar> = Vec::with_capacity(n);
            for k in 0..n {
                let mut coupling = int(0);
                if k >= 1 {
                    coupling += eps * &x[k - 1];
                }
                if k >= 2 {
                    coupling -= eps * delta * &x[k - 2];
                }
                x.push(if bits >> k & 1 == 0 {
                    coupling
                } else {
                    int(1) - coupling
                });
            }
            x
        })
        .collect()
}

#[test]
fn goldfarb_vertices_match_the_formula() {
    for n in 2..=5 {
        let g = goldfarb_cube(n, None).unwrap();
        let expected = cube_vertices_by_formula(n, &g.params.eps, &g.params.delta);
        let found: BTreeSet<Vec<Scalar>> = enumerate_vertices(&g.polytope, &g.start, 1 << 10)
            .unwrap()
            .into_iter()
            .map(|v| v.point.into_entries())
            .collect();
        assert_eq!(found, expected);
        assert_eq!(g.polytope, deformed_cube(n, &g.params));
    }
}

#[test]
fn goldfarb_paths_are_monotone_hamiltonian_walks() {
    for n in 2..=6 {
        let g = goldfarb_cube(n, None).unwrap();
        let path = parametric_path(&g.polytope, &g.spec).unwrap();
        assert_eq!(path.length, (1 << n) - 1);
        let distinct: BTreeSet<_> = path.vertices.iter().map(|v| v.tight.clone()).collect();
        assert_eq!(distinct.len(), 1 << n);
        for pair in path.vertices.windows(2) {
            let shared = pair[0]
                .tight
                .iter()
                .filter(|i| pair[1].tight.contains(i))
                .count();
            assert_eq!(shared, n - 1, "consecutive vertices must be adjacent");
            assert!(g.spec.c.dot(&pair[0].point) < g.spec.c.dot(&pair[1].point));
        }
        assert!(check_ordering_coincide(&g.polytope, &g.spec).unwrap());
    }
}

#[test]
fn goldfarb_three_cube_shadow() {
    let g = goldfarb_cube(3, None).unwrap();
    assert_eq!(g.polytope.num_facets(), 6);
    assert_eq!(shadow_polygon(&g.polytope, &g.spec).unwrap().hull_size, 8);
    let proj = g.spec.to_projection();
    let rec = run_simplex(
        &g.polytope,
        &proj.c,
        &g.start,
        &PivotRuleSpec::shadow(proj.clone()),
        100,
    )
    .unwrap();
    assert_eq!(rec.length, 7);
}

#[test]
fn many_from_one_facets_and_alpha() {
    for (n, facets, alpha) in [(3, 12, 7), (4, 16, 15)] {
        let g = goldfarb_cube(n, None).unwrap();
        let inst = many_from_one(&g.polytope, &g.spec).unwrap();
        assert_eq!(inst.polytope.num_facets(), facets);
        assert_eq!(inst.certificate.alpha, alpha);
        let check = check_certificate(&inst.polytope, &inst.a, &inst.b, &inst.certificate);
        assert!(check.ok, "{:?}", check.reasons);
    }
}

#[test]
fn fixed_c_uses_three_n_facets() {
    for (n, facets) in [(3, 9), (4, 12)] {
        let g = goldfarb_cube(n, None).unwrap();
        let inst = fixed_c_variant(&g.polytope, &g.spec).unwrap();
        assert_eq!(inst.polytope.num_facets(), facets);
        assert!(check_certificate(&inst.polytope, &inst.a, &inst.b, &inst.certificate).ok);
    }
}

#[test]
fn sampled_paths_respect_the_certificate() {
    let g = goldfarb_cube(3, None).unwrap();
    for inst in [
        many_from_one(&g.polytope, &g.spec).unwrap(),
        fixed_c_variant(&g.polytope, &g.spec).unwrap(),
    ] {
        let report = sample_shadow_paths(
            &inst.polytope,
            &inst.a,
            &inst.b,
            &inst.certificate,
            7,
            40,
            7,
        )
        .unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.min_length.unwrap() >= inst.certificate.alpha);
        assert_eq!(report.samples, 40);
    }
}

#[test]
fn tampered_certificates_are_rejected() {
    let g = goldfarb_cube(3, None).unwrap();
    let inst = many_from_one(&g.polytope, &g.spec).unwrap();
    let q = &inst.polytope;

    let mut cert = inst.certificate.clone();
    cert.epsilon = &cert.epsilon * int(2);
    assert!(!check_certificate(q, &inst.a, &inst.b, &cert).ok);

    let mut cert = inst.certificate.clone();
    cert.segment_points.swap(2, 3);
    assert!(!check_certificate(q, &inst.a, &inst.b, &cert).ok);

    let mut cert = inst.certificate.clone();
    cert.cones[3].tight = cert.cones[2].tight.clone();
    assert!(!check_certificate(q, &inst.a, &inst.b, &cert).ok);

    // the uncut cube does not carry the certificate's facets
    assert!(!check_certificate(&g.polytope, &inst.a, &inst.b, &inst.certificate).ok);
}

#[test]
fn ball_corners_stay_close_along_the_segment() {
    let g = goldfarb_cube(3, None).unwrap();
    let inst = many_from_one(&g.polytope, &g.spec).unwrap();
    let cert = &inst.certificate;
    let (w, c) = (&cert.segment_points[0], &cert.segment_points[cert.alpha]);
    let eps = &cert.epsilon;
    let corner = |center: &QVector, signs: u32| -> QVector {
        (0..3)
            .map(|i| {
                if signs >> i & 1 == 0 {
                    &center[i] + eps
                } else {
                    &center[i] - eps
                }
            })
            .collect()
    };
    for sw in 0..8 {
        for sc in 0..8 {
            let (w2, c2) = (corner(w, sw), corner(c, sc));
            for step in 0..=8 {
                let lam = rat(step, 8);
                let orig = w.scale(&lam).add(&c.scale(&(int(1) - &lam)));
                let moved = w2.scale(&lam).add(&c2.scale(&(int(1) - &lam)));
                assert!(moved.sub(&orig).linf_norm() <= *eps);
            }
        }
    }
}

#[test]
fn find_k_reaches_full_length_for_basic_norms() {
    let g = goldfarb_cube(3, None).unwrap();
    for norm in [NormSpec::l1(), NormSpec::l2(), NormSpec::linf()] {
        let (k, rec) = find_k_for_norm(&g.polytope, &g.spec, &g.start, &norm).unwrap();
        assert_eq!(rec.length, 7, "{norm} at k = {k}");
    }
}

#[test]
fn one_compression_serves_every_regular_norm() {
    let g = goldfarb_cube(3, None).unwrap();
    let (q, spec, _) = canonicalize_w_to_e1(&g.polytope, &g.spec.to_projection()).unwrap();
    let start = vertex_from_basis(&q, &g.start.tight).unwrap();
    let k = uniform_regular_k(&q, &spec, &start).unwrap();
    let (qc, c2) = compress(&q, &spec.c, &CompressSpec::new(spec.w.clone(), k).unwrap()).unwrap();
    let sc = vertex_from_basis(&qc, &start.tight).unwrap();
    let mut norms = vec![
        NormSpec::l1(),
        NormSpec::l2(),
        NormSpec::linf(),
        NormSpec::lp(rat(3, 2)).unwrap(),
        NormSpec::lp(int(10)).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    norms.extend((0..20).map(|_| random_regular_polyhedral(3, 3, &mut rng)));
    let report = all_norms_battery(&qc, &c2, &sc, &norms).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    assert_eq!((report.min_length, report.max_length), (Some(7), Some(7)));
}

#[test]
fn traversal_agrees_with_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..12 {
        let inst = random_instance(&mut rng).unwrap();
        let p = &inst.polytope;
        let a = enumerate_vertices(p, &find_vertex(p).unwrap(), 1 << 16).unwrap();
        let b = exhaustive_vertices(p, 1 << 20).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn brute_force_minimum_is_a_lower_bound_for_every_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..10 {
        let inst = random_instance(&mut rng).unwrap();
        let p = &inst.polytope;
        let proj = inst.spec.to_projection();
        let rules = [
            PivotRuleSpec::shadow(proj.clone()),
            PivotRuleSpec::dantzig(),
            PivotRuleSpec::greatest(),
            PivotRuleSpec::steepest(NormSpec::l2()),
        ];
        for rule in rules {
            let Ok(rec) = run_simplex(p, &proj.c, &inst.start, &rule, 10_000) else {
                continue;
            };
            let stats = brute_force_paths(p, &proj.c, &inst.start, rec.last(), 1 << 16).unwrap();
            assert!(stats.min_length.unwrap() <= rec.length);
            assert!(rec.length <= stats.max_length.unwrap());
        }
    }
}
