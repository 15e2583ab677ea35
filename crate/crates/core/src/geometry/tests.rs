use super::*;
use crate::levelset::{FnLevelSet, Surface};
use crate::mesh::BoxDomain;
use rand::Rng;

fn unit_cube() -> CartesianMesh {
    CartesianMesh::new(BoxDomain::new([0.0; 3], [1.0; 3]).unwrap(), 1).unwrap()
}

fn plane(n: [f64; 3], c: f64) -> Surface {
    Surface::Plane { normal: n, offset: c }
}

fn single(ls: &dyn LevelSet, rule: PlaneRule) -> Result<InterfaceElementData> {
    let m = unit_cube();
    let (_, mut g) = analyze_interface(&m, ls, &ClassifyOptions::default(), rule)?;
    if g.is_empty() {
        return Err(Error::MissingBasis(0));
    }
    Ok(g.remove(0))
}

#[test]
fn axis_plane_cuts_four_parallel_edges() {
    let d = single(&plane([1.0, 0.0, 0.0], 0.5), PlaneRule::Rules).unwrap();
    assert_eq!(d.point_edges, vec![0, 1, 2, 3]);
    for p in &d.points {
        assert!((p.x - 0.5).abs() < 1e-13);
    }
    assert_eq!(d.case, 3);
    assert_eq!(d.triangle, [0, 1, 2]);
    assert!((d.normal - Vec3::x()).norm() < 1e-14);
    let x = Vec3::new(0.9, 0.3, 0.2);
    assert!((d.plane_value(&x) - 0.4).abs() < 1e-13);
}

#[test]
fn corner_cut_is_case_one_equilateral() {
    let d = single(&plane([1.0, 1.0, 1.0], 0.5), PlaneRule::Rules).unwrap();
    assert_eq!(d.case, 1);
    assert_eq!(d.points.len(), 3);
    let expect = [Vec3::new(0.5, 0.0, 0.0), Vec3::new(0.0, 0.5, 0.0), Vec3::new(0.0, 0.0, 0.5)];
    for (p, q) in d.points.iter().zip(expect) {
        assert!((p - q).norm() < 1e-12);
    }
    assert!((d.max_angle_deg() - 60.0).abs() < 1e-9);
    assert!((d.normal - Vec3::repeat(1.0 / 3f64.sqrt())).norm() < 1e-12);
    assert!((d.centroid - Vec3::repeat(1.0 / 6.0)).norm() < 1e-12);
}

#[test]
fn sphere_roots_match_quadratic() {
    let m = CartesianMesh::new(BoxDomain::new([0.0; 3], [1.0; 3]).unwrap(), 1).unwrap();
    let r = 0.8;
    let ls = Surface::Sphere { center: [0.0; 3], radius: r };
    let cls = classify(&m, &ls, &ClassifyOptions::default()).unwrap();
    let hits = edge_intersections(&m, &cls, &ls, 0).unwrap();
    for (le, p) in hits {
        // edge from A = (ax, ay, az) along axis e: |A + t e|² = r²
        let a = unit_vertex(EDGES[le][0]);
        let e = EDGE_AXIS[le];
        let rest: f64 = (0..3).filter(|&k| k != e).map(|k| a[k] * a[k]).sum();
        let t = (r * r - rest).sqrt();
        assert!((p[e] - t).abs() < 1e-12, "edge {le}");
    }
}

#[test]
fn isolated_edge_is_case_two() {
    let ls = plane([0.4, 1.0, 1.0], 0.7);
    let d = single(&ls, PlaneRule::Rules).unwrap();
    assert_eq!(d.minus_mask, 0b0000_0011);
    assert_eq!(d.case, 2);
    // brute force: the three points farthest from the line y = z = 0
    let mut dist: Vec<(f64, usize)> =
        d.points.iter().enumerate().map(|(i, p)| (-(p.y * p.y + p.z * p.z).sqrt(), i)).collect();
    dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut want = [dist[0].1, dist[1].1, dist[2].1];
    want.sort_unstable();
    assert_eq!(d.triangle, want);
}

#[test]
fn l_shape_uses_parallel_edges() {
    let d = single(&plane([1.0, 1.0, 2.0], 1.5), PlaneRule::Rules).unwrap();
    assert_eq!(d.case, 4);
    assert_eq!(d.points.len(), 5);
    for i in d.triangle {
        assert_eq!(EDGE_AXIS[d.point_edges[i]], 2);
    }
}

#[test]
fn tripod_uses_orthogonal_edges() {
    let d = single(&plane([1.0, 1.0, 1.0], 1.5), PlaneRule::Rules).unwrap();
    assert_eq!(d.case, 5);
    assert_eq!(d.points.len(), 6);
    let mut axes = d.triangle.map(|i| EDGE_AXIS[d.point_edges[i]]);
    axes.sort_unstable();
    assert_eq!(axes, [0, 1, 2]);
    assert!(d.triangle.contains(&0));
    assert!((d.max_angle_deg() - 60.0).abs() < 1e-9);
}

#[test]
fn staircase_is_rejected() {
    // minus set {0, 1, 4, 6}
    let ls = FnLevelSet(|x: &Vec3| {
        let v = [0b0101_0011u8];
        let b = (x.x > 0.5) as usize + 2 * (x.y > 0.5) as usize + 4 * (x.z > 0.5) as usize;
        if v[0] >> b & 1 == 1 { -1.0 } else { 1.0 }
    });
    let m = unit_cube();
    let opts = ClassifyOptions { edge_samples: 0, ..Default::default() };
    let cls = classify(&m, &ls, &opts).unwrap();
    assert!(matches!(
        element_geometry(&m, &cls, &ls, 0, PlaneRule::Rules),
        Err(Error::NonCanonicalCut { mask: 0b0101_0011, .. })
    ));
}

#[test]
fn case_is_invariant_under_cube_symmetries() {
    for mask in 0..=255u8 {
        let c = case_of_mask(mask);
        for s in cube_symmetries() {
            assert_eq!(case_of_mask(apply_symmetry(&s, mask)), c);
        }
    }
}

fn random_plane(rng: &mut ChaCha8Rng) -> Surface {
    let n = loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if v.norm() > 0.1 {
            break v.normalize();
        }
    };
    let p = Vec3::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
    plane([n.x, n.y, n.z], n.dot(&p))
}

#[test]
fn max_angle_bound_on_random_cuts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    let mut worst = 0.0f64;
    for trial in 0..10_000 {
        let ls = if trial % 2 == 0 {
            random_plane(&mut rng)
        } else {
            let c = [rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0)];
            Surface::Sphere { center: c, radius: rng.gen_range(0.3..2.0) }
        };
        match single(&ls, PlaneRule::Rules) {
            Ok(d) => {
                checked += 1;
                worst = worst.max(d.max_angle_deg());
                for t in d.triangle_points() {
                    assert!(d.plane_value(&t).abs() < 1e-12);
                }
                assert!((d.normal.norm() - 1.0).abs() < 1e-14);
                assert!(d.normal.dot(&ls.gradient(&d.centroid)) > 0.0);
            }
            Err(Error::MaxAngleViolated { angle_deg, .. }) => panic!("angle {angle_deg}"),
            Err(_) => {}
        }
    }
    assert!(checked > 5000, "only {checked} interface elements");
    assert!(worst <= MAX_ANGLE_DEG);
}

#[test]
fn planar_orientation_matches_vertex_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let ls = random_plane(&mut rng);
        if let Ok(d) = single(&ls, PlaneRule::Rules) {
            for v in 0..8 {
                let w = ls.value(&d.vertices[v]);
                if w.abs() > 1e-9 {
                    assert_eq!(d.plane_value(&d.vertices[v]) < 0.0, w < 0.0);
                }
            }
            let (dist, dev) = geometry_diagnostics(&d, &ls, 4);
            assert!(dist < 1e-12 && dev < 1e-9, "{dist} {dev}");
        }
    }
}

#[test]
fn random_rule_is_seeded() {
    let ls = plane([1.0, 1.0, 1.0], 1.5);
    let a = single(&ls, PlaneRule::Random { seed: 42 }).unwrap();
    let b = single(&ls, PlaneRule::Random { seed: 42 }).unwrap();
    assert_eq!(a.triangle, b.triangle);
    let mut seen = std::collections::HashSet::new();
    for seed in 0..64 {
        seen.insert(single(&ls, PlaneRule::Random { seed }).unwrap().triangle);
    }
    assert!(seen.len() > 5);
}

#[test]
fn dump_lists_each_element() {
    let m = CartesianMesh::new(BoxDomain::symmetric_unit(), 6).unwrap();
    let ls = Surface::Sphere { center: [0.0; 3], radius: 0.5 };
    let (_, g) = analyze_interface(&m, &ls, &ClassifyOptions::default(), PlaneRule::Rules).unwrap();
    let text = dump_geometry(&g);
    assert_eq!(text.lines().count(), g.len());
    assert!(text.starts_with("element "));
}
