use super::*;
use crate::classify::ClassifyOptions;
use crate::geometry::{analyze_interface, PlaneRule};
use crate::levelset::{LevelSet, Surface};
use crate::mesh::BoxDomain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cube_data(ls: &Surface) -> Option<InterfaceElementData> {
    let m = CartesianMesh::new(BoxDomain::new([0.0; 3], [1.0; 3]).unwrap(), 1).unwrap();
    analyze_interface(&m, ls, &ClassifyOptions::default(), PlaneRule::Rules).ok()?.1.pop()
}

/// Volume of `{n·x < c}` in the unit cube by inclusion–exclusion.
fn halfspace_volume(n: [f64; 3], c: f64) -> f64 {
    let mut n = n;
    let mut c = c;
    for a in 0..3 {
        if n[a] < 0.0 {
            // x_a -> 1 − x_a
            c -= n[a];
            n[a] = -n[a];
        }
    }
    let mut v = 0.0;
    for b in 0..8 {
        let bits = [(b & 1) as f64, (b >> 1 & 1) as f64, (b >> 2 & 1) as f64];
        let s = c - (n[0] * bits[0] + n[1] * bits[1] + n[2] * bits[2]);
        let sign = if (b as u32).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        v += sign * s.max(0.0).powi(3);
    }
    v / (6.0 * n[0] * n[1] * n[2])
}

#[test]
fn half_cube_and_corner_volumes() {
    let d = cube_data(&Surface::Plane { normal: [1.0, 0.0, 0.0], offset: 0.5 }).unwrap();
    let c = decompose_cut_element(&d).unwrap();
    assert!((c.volume(Side::Minus) - 0.5).abs() < 1e-12);
    let d = cube_data(&Surface::Plane { normal: [1.0, 1.0, 1.0], offset: 0.5 }).unwrap();
    let c = decompose_cut_element(&d).unwrap();
    assert!((c.volume(Side::Minus) - 1.0 / 48.0).abs() < 1e-12);
    assert!((c.volume(Side::Plus) - 47.0 / 48.0).abs() < 1e-12);
}

#[test]
fn random_planes_match_inclusion_exclusion() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 2000 {
        let n = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if n.iter().any(|x: &f64| x.abs() < 1e-3) {
            continue;
        }
        let p = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        let c = n[0] * p[0] + n[1] * p[1] + n[2] * p[2];
        let ls = Surface::Plane { normal: n, offset: c };
        let Some(d) = cube_data(&ls) else { continue };
        let dec = decompose_cut_element(&d).unwrap();
        done += 1;
        let exact = halfspace_volume(n, c);
        assert!((dec.volume(Side::Minus) - exact).abs() < 1e-12, "case {} {:?} {}", d.case, n, c);
        for t in &dec.tets {
            assert_eq!(t.sign, 1.0);
            let g = t.p.iter().sum::<Vec3>() / 4.0;
            let w = ls.value(&g);
            if w.abs() > 1e-12 {
                assert_eq!(w < 0.0, t.side == Side::Minus);
            }
        }
        for f in 0..6 {
            if !dec.faces[f].is_empty() {
                let a: f64 = dec.faces[f].iter().map(|t| t.area()).sum();
                assert!((a - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn cubic_moments_agree_with_signed_cones() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rule = rules::default_tet();
    let mut done = 0;
    while done < 200 {
        let n = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let p = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        let ls = Surface::Plane { normal: n, offset: n[0] * p[0] + n[1] * p[1] + n[2] * p[2] };
        let Some(d) = cube_data(&ls) else { continue };
        done += 1;
        let dec = decompose_cut_element(&d).unwrap();
        let mut cones = dec.clone();
        let nn = Vec3::from(n).normalize();
        cones.tets = signed_cones(&d, &dec.interface, &nn);
        for (a, b, c) in [(0, 0, 0), (1, 0, 0), (1, 1, 1), (3, 0, 0), (0, 2, 1), (2, 0, 1)] {
            let mut g = |x: &Vec3, s: Side| {
                let v = x.x.powi(a) * x.y.powi(b) * x.z.powi(c);
                if s == Side::Minus { v } else { 2.0 * v }
            };
            let i1 = integrate_element(&dec, rule, &mut g);
            let i2 = integrate_element(&cones, rule, &mut g);
            assert!((i1 - i2).abs() < 1e-12, "{a}{b}{c}: {i1} {i2}");
        }
    }
}

#[test]
fn simple_integrals() {
    let d = cube_data(&Surface::Plane { normal: [1.0, 0.0, 0.0], offset: 0.5 }).unwrap();
    let dec = decompose_cut_element(&d).unwrap();
    let rule = rules::default_tet();
    let one = integrate_element(&dec, rule, &mut |_, _| 1.0);
    assert!((one - 1.0).abs() < 1e-13);
    let pw = integrate_element(&dec, rule, &mut |_, s| if s == Side::Minus { 1.0 } else { 2.0 });
    assert!((pw - 1.5).abs() < 1e-13);
    let x2: f64 = box_points(Vec3::zeros(), Vec3::repeat(1.0), rules::default_cube()).map(|(x, w)| w * x.x * x.x).sum();
    assert!((x2 - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn face_split_areas() {
    // plane y = 0.3 + 0.4 x cuts the z = 0 face into two trapezoids
    let ls = Surface::Plane { normal: [-0.4, 1.0, 0.0], offset: 0.3 };
    let d = cube_data(&ls).unwrap();
    let dec = decompose_cut_element(&d).unwrap();
    let tris = &dec.faces[4];
    let rule = rules::default_triangle();
    let total = integrate_face(tris, rule, &mut |_, _| 1.0);
    assert!((total - 1.0).abs() < 1e-13);
    let minus: f64 = tris.iter().filter(|t| t.side == Side::Minus).map(|t| t.area()).sum();
    assert!((minus - 0.5).abs() < 1e-12);
    let xm = integrate_face(tris, rule, &mut |x, s| if s == Side::Minus { x.x } else { 0.0 });
    // ∫₀¹ x (0.3 + 0.4x) dx
    assert!((xm - (0.15 + 0.4 / 3.0)).abs() < 1e-13);
}

#[test]
fn sphere_elements_conserve_volume() {
    let m = CartesianMesh::new(BoxDomain::symmetric_unit(), 20).unwrap();
    let ls = Surface::Sphere { center: [0.05, -0.02, 0.01], radius: 0.6 };
    let (_, geo) = analyze_interface(&m, &ls, &ClassifyOptions::default(), PlaneRule::Rules).unwrap();
    let vol = m.element_volume();
    for d in &geo {
        let dec = decompose_cut_element(d).unwrap();
        let total: f64 = dec.tets.iter().map(|t| t.sign * t.volume()).sum();
        assert!((total - vol).abs() < 1e-12 * vol);
        assert!(dec.tets.iter().all(|t| t.sign > 0.0), "fallback in element {}", d.element);
    }
}
