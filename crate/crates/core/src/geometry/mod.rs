//! Interface geometry of cut elements: intersection points, configuration
//! label, the plane triangle `K_T` and the plane data `(n̄, F, L)`.

mod cases;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::{classify, bisect, ClassifyOptions, EntityClassification, Side};
use crate::levelset::LevelSet;
use crate::mesh::CartesianMesh;
use crate::topology::{face_edges, EDGES, EDGE_AXIS, VERTEX_OFFSETS};
use crate::{Error, Result, Vec3};

pub use cases::{apply_symmetry, case_of_mask, cube_symmetries};

/// Slack allowed on the 135° bound.
pub const MAX_ANGLE_DEG: f64 = 135.0 + 1e-9;

/// How the plane triangle is picked among the intersection points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneRule {
    /// The case-by-case selection rules.
    Rules,
    /// A seeded random triple per element (deliberately poor planes).
    Random { seed: u64 },
}

#[derive(Debug, Clone)]
pub struct InterfaceElementData {
    pub element: usize,
    /// Element vertices in local order.
    pub vertices: [Vec3; 8],
    /// Intersection points and the local edge carrying each, ordered by edge.
    pub points: Vec<Vec3>,
    pub point_edges: Vec<usize>,
    pub case: u8,
    /// Indices into `points` of `D_{j1}, D_{j2}, D_{j3}`.
    pub triangle: [usize; 3],
    pub normal: Vec3,
    pub centroid: Vec3,
    /// Bit `b` set iff local vertex `b` is in Ω⁻.
    pub minus_mask: u8,
}

impl InterfaceElementData {
    pub fn anchor(&self) -> Vec3 {
        self.points[self.triangle[0]]
    }

    /// `L(X) = (X − D_{j1})·n̄`.
    pub fn plane_value(&self, x: &Vec3) -> f64 {
        (x - self.anchor()).dot(&self.normal)
    }

    pub fn triangle_points(&self) -> [Vec3; 3] {
        self.triangle.map(|i| self.points[i])
    }

    pub fn vertex_side(&self, v: usize) -> Side {
        if self.minus_mask >> v & 1 == 1 { Side::Minus } else { Side::Plus }
    }

    pub fn vertex_indices(&self, side: Side) -> Vec<usize> {
        (0..8).filter(|&v| self.vertex_side(v) == side).collect()
    }

    pub fn max_angle_deg(&self) -> f64 {
        max_angle_deg(&self.triangle_points())
    }
}

pub fn triangle_area(p: &[Vec3; 3]) -> f64 {
    0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm()
}

pub fn max_angle_deg(p: &[Vec3; 3]) -> f64 {
    let mut m = 0.0f64;
    for i in 0..3 {
        let a = p[(i + 1) % 3] - p[i];
        let b = p[(i + 2) % 3] - p[i];
        let c = (a.dot(&b) / (a.norm() * b.norm())).clamp(-1.0, 1.0);
        m = m.max(c.acos().to_degrees());
    }
    m
}

/// Intersection points on the sign-changing edges of an element, ordered by
/// local edge index.
pub fn edge_intersections(
    mesh: &CartesianMesh,
    cls: &EntityClassification,
    ls: &dyn LevelSet,
    element: usize,
) -> Result<Vec<(usize, Vec3)>> {
    let nodes = mesh.element_nodes(element);
    let gedges = mesh.element_edges(element);
    let mut out = Vec::new();
    for (le, [a, b]) in EDGES.iter().enumerate() {
        let (sa, sb) = (cls.node_side[nodes[*a]], cls.node_side[nodes[*b]]);
        if sa == sb {
            continue;
        }
        let p = match cls.edge_points.get(&gedges[le]) {
            Some(p) => *p,
            None => {
                let [ga, gb] = mesh.edge_nodes(gedges[le]);
                let (pa, pb) = (mesh.node_coords(ga), mesh.node_coords(gb));
                if cls.node_side[ga] == Side::Minus { bisect(ls, &pa, &pb) } else { bisect(ls, &pb, &pa) }
            }
        };
        out.push((le, p));
    }
    if !(3..=6).contains(&out.len()) {
        return Err(Error::UnresolvableElement {
            element,
            reason: format!("{} cut edges; expected between 3 and 6", out.len()),
        });
    }
    Ok(out)
}

pub fn classify_case(element: usize, minus_mask: u8) -> Result<u8> {
    case_of_mask(minus_mask).ok_or(Error::NonCanonicalCut { element, mask: minus_mask })
}

/// Order the cut edges into the closed polygon traced by the interface on
/// the element boundary. Returns positions into `cut_edges`.
pub fn intersection_cycle(element: usize, cut_edges: &[usize]) -> Result<Vec<usize>> {
    let k = cut_edges.len();
    let mut nbr: Vec<Vec<usize>> = vec![Vec::new(); k];
    for f in 0..6 {
        let on: Vec<usize> = face_edges(f)
            .iter()
            .filter_map(|e| cut_edges.iter().position(|c| c == e))
            .collect();
        match on.len() {
            0 => {}
            2 => {
                nbr[on[0]].push(on[1]);
                nbr[on[1]].push(on[0]);
            }
            n => {
                return Err(Error::UnresolvableElement {
                    element,
                    reason: format!("face {f} carries {n} intersection points"),
                })
            }
        }
    }
    if nbr.iter().any(|n| n.len() != 2) {
        return Err(Error::UnresolvableElement { element, reason: "open intersection polygon".into() });
    }
    let mut cycle = vec![0usize];
    let mut prev = usize::MAX;
    let mut cur = 0usize;
    loop {
        let next = if prev == usize::MAX {
            nbr[cur][0].min(nbr[cur][1])
        } else if nbr[cur][0] == prev {
            nbr[cur][1]
        } else {
            nbr[cur][0]
        };
        if next == 0 {
            break;
        }
        if cycle.len() >= k {
            break;
        }
        cycle.push(next);
        prev = cur;
        cur = next;
    }
    if cycle.len() != k {
        return Err(Error::UnresolvableElement {
            element,
            reason: "intersection points form more than one polygon".into(),
        });
    }
    Ok(cycle)
}

fn degenerate(p: &[Vec3; 3], h: f64) -> bool {
    triangle_area(p) < 1e-10 * h * h
}

/// Best non-degenerate triple by smallest maximum angle.
fn best_triple(element: usize, points: &[Vec3], h: f64) -> Result<[usize; 3]> {
    let k = points.len();
    let mut best: Option<([usize; 3], f64)> = None;
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let t = [points[a], points[b], points[c]];
                if degenerate(&t, h) {
                    continue;
                }
                let m = max_angle_deg(&t);
                if best.is_none_or(|(_, bm)| m < bm) {
                    best = Some(([a, b, c], m));
                }
            }
        }
    }
    best.map(|b| b.0).ok_or(Error::CollinearPoints(element))
}

fn line_distance(x: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let d = b - a;
    (x - a).cross(&d).norm() / d.norm()
}

/// Pick `K_T` by the configuration rules. `point_edges` must be sorted.
pub fn select_plane_triangle(
    element: usize,
    case: u8,
    minus_mask: u8,
    vertices: &[Vec3; 8],
    points: &[Vec3],
    point_edges: &[usize],
    h: f64,
) -> Result<[usize; 3]> {
    let k = points.len();
    let chosen: [usize; 3] = match case {
        1 => [0, 1, 2],
        2 => {
            // the isolated edge joins the two vertices of the minority side
            let minority = if minus_mask.count_ones() == 2 { minus_mask } else { !minus_mask };
            let vs: Vec<usize> = (0..8).filter(|v| minority >> v & 1 == 1).collect();
            let (a, b) = (vertices[vs[0]], vertices[vs[1]]);
            let mut order: Vec<usize> = (0..k).collect();
            // stable sort keeps lower edge index first on ties
            order.sort_by(|&i, &j| {
                line_distance(&points[j], &a, &b)
                    .partial_cmp(&line_distance(&points[i], &a, &b))
                    .unwrap()
            });
            let mut t = [order[0], order[1], order[2]];
            t.sort_unstable();
            t
        }
        3 => [0, 1, 2],
        4 => {
            let mut per_axis = [0; 3];
            for e in point_edges {
                per_axis[EDGE_AXIS[*e]] += 1;
            }
            let axis = per_axis.iter().position(|&c| c == 3).expect("case 4 has three parallel cut edges");
            let idx: Vec<usize> = (0..k).filter(|&i| EDGE_AXIS[point_edges[i]] == axis).collect();
            [idx[0], idx[1], idx[2]]
        }
        5 => {
            let cycle = intersection_cycle(element, point_edges)?;
            let t = [cycle[0], cycle[2], cycle[4]];
            let p = t.map(|i| points[i]);
            if degenerate(&p, h) {
                [cycle[1], cycle[3], cycle[5]]
            } else {
                t
            }
        }
        _ => unreachable!("case labels are 1..=5"),
    };
    let p = chosen.map(|i| points[i]);
    if degenerate(&p, h) {
        return best_triple(element, points, h);
    }
    Ok(chosen)
}

/// Random triple for the deliberately poor plane mode.
pub fn random_triangle(element: usize, seed: u64, points: &[Vec3], h: f64) -> Result<[usize; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (element as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let k = points.len();
    for _ in 0..64 {
        let a = rng.gen_range(0..k);
        let mut b = rng.gen_range(0..k - 1);
        if b >= a {
            b += 1;
        }
        let mut c = rng.gen_range(0..k - 2);
        for m in [a.min(b), a.max(b)] {
            if c >= m {
                c += 1;
            }
        }
        let mut t = [a, b, c];
        t.sort_unstable();
        if !degenerate(&t.map(|i| points[i]), h) {
            return Ok(t);
        }
    }
    best_triple(element, points, h)
}

/// Unit normal oriented from Ω⁻ to Ω⁺ and the centroid of the triangle.
pub fn plane_data(
    element: usize,
    tri: &[Vec3; 3],
    vertices: &[Vec3; 8],
    minus_mask: u8,
    ls: &dyn LevelSet,
    h: f64,
) -> Result<(Vec3, Vec3)> {
    if degenerate(tri, h) {
        return Err(Error::CollinearPoints(element));
    }
    let mut n = (tri[1] - tri[0]).cross(&(tri[2] - tri[0])).normalize();
    let f = (tri[0] + tri[1] + tri[2]) / 3.0;
    let g = ls.gradient(&f);
    let s = n.dot(&g);
    if s.abs() > 1e-8 * g.norm() {
        if s < 0.0 {
            n = -n;
        }
    } else {
        // the vertex farthest from the plane decides
        let far = (0..8)
            .max_by(|&a, &b| {
                (vertices[a] - tri[0]).dot(&n).abs().partial_cmp(&(vertices[b] - tri[0]).dot(&n).abs()).unwrap()
            })
            .unwrap();
        let l = (vertices[far] - tri[0]).dot(&n);
        let minus = minus_mask >> far & 1 == 1;
        if (l < 0.0) != minus {
            n = -n;
        }
    }
    Ok((n, f))
}

/// Geometry record of one interface element.
pub fn element_geometry(
    mesh: &CartesianMesh,
    cls: &EntityClassification,
    ls: &dyn LevelSet,
    element: usize,
    rule: PlaneRule,
) -> Result<InterfaceElementData> {
    let h = mesh.h();
    let hits = edge_intersections(mesh, cls, ls, element)?;
    let minus_mask = cls.minus_mask(mesh, element);
    let case = classify_case(element, minus_mask)?;
    let vertices = mesh.element_vertices(element);
    let points: Vec<Vec3> = hits.iter().map(|x| x.1).collect();
    let point_edges: Vec<usize> = hits.iter().map(|x| x.0).collect();
    let triangle = match rule {
        PlaneRule::Rules => {
            select_plane_triangle(element, case, minus_mask, &vertices, &points, &point_edges, h)?
        }
        PlaneRule::Random { seed } => random_triangle(element, seed, &points, h)?,
    };
    let tri = triangle.map(|i| points[i]);
    let (normal, centroid) = plane_data(element, &tri, &vertices, minus_mask, ls, h)?;
    let data = InterfaceElementData {
        element,
        vertices,
        points,
        point_edges,
        case,
        triangle,
        normal,
        centroid,
        minus_mask,
    };
    if rule == PlaneRule::Rules {
        let angle = data.max_angle_deg();
        if angle > MAX_ANGLE_DEG {
            return Err(Error::MaxAngleViolated { element, angle_deg: angle });
        }
    }
    Ok(data)
}

/// Geometry of every interface element, in element order.
pub fn build_interface_geometry(
    mesh: &CartesianMesh,
    cls: &EntityClassification,
    ls: &dyn LevelSet,
    rule: PlaneRule,
) -> Result<Vec<InterfaceElementData>> {
    let all: Vec<Result<InterfaceElementData>> = cls
        .interface_elements
        .par_iter()
        .map(|&e| element_geometry(mesh, cls, ls, e, rule))
        .collect();
    all.into_iter().collect()
}

/// Convenience wrapper: classify then build geometry.
pub fn analyze_interface(
    mesh: &CartesianMesh,
    ls: &dyn LevelSet,
    opts: &ClassifyOptions,
    rule: PlaneRule,
) -> Result<(EntityClassification, Vec<InterfaceElementData>)> {
    let cls = classify(mesh, ls, opts)?;
    let geo = build_interface_geometry(mesh, &cls, ls, rule)?;
    Ok((cls, geo))
}

/// Max distance from sampled points of Γ∩T to the plane, and the max
/// deviation `|n(X) − n̄|` of the true unit normal at those points.
pub fn geometry_diagnostics(data: &InterfaceElementData, ls: &dyn LevelSet, samples: usize) -> (f64, f64) {
    let cycle = match intersection_cycle(data.element, &data.point_edges) {
        Ok(c) => c,
        Err(_) => (0..data.points.len()).collect(),
    };
    let poly: Vec<Vec3> = cycle.iter().map(|&i| data.points[i]).collect();
    let c = poly.iter().sum::<Vec3>() / poly.len() as f64;
    let lo = data.vertices[0];
    let hi = data.vertices[7];
    let tol = 1e-12 * (hi - lo).norm();
    let (mut dmax, mut nmax) = (0.0f64, 0.0f64);
    let mut visit = |x: Vec3| {
        let mut y = x;
        for _ in 0..30 {
            let g = ls.gradient(&y);
            let step = ls.value(&y) / g.norm_squared();
            y -= g * step;
            if step.abs() * g.norm() < 1e-15 {
                break;
            }
        }
        if ls.value(&y).abs() > 1e-10 * ls.gradient(&y).norm() {
            return;
        }
        if (0..3).any(|a| y[a] < lo[a] - tol || y[a] > hi[a] + tol) {
            return;
        }
        dmax = dmax.max(data.plane_value(&y).abs());
        let n = ls.gradient(&y).normalize();
        nmax = nmax.max((n - data.normal).norm());
    };
    let m = samples.max(1);
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        for s in 0..=m {
            for t in 0..=(m - s) {
                let (u, v) = (s as f64 / m as f64, t as f64 / m as f64);
                visit(c + (a - c) * u + (b - c) * v);
            }
        }
    }
    (dmax, nmax)
}

/// Plain-text dump of the per-element geometry.
pub fn dump_geometry(data: &[InterfaceElementData]) -> String {
    let mut s = String::new();
    for d in data {
        let t = d.triangle_points();
        let _ = writeln!(
            s,
            "element {} case {} points {} triangle [{:?}] normal [{:.12e} {:.12e} {:.12e}] centroid [{:.12e} {:.12e} {:.12e}] max_angle {:.6}",
            d.element,
            d.case,
            d.points.len(),
            t.map(|p| [p.x, p.y, p.z]),
            d.normal.x,
            d.normal.y,
            d.normal.z,
            d.centroid.x,
            d.centroid.y,
            d.centroid.z,
            d.max_angle_deg()
        );
    }
    s
}

/// Local vertex coordinates in units of the element, handy for tests.
pub fn unit_vertex(v: usize) -> Vec3 {
    let o = VERTEX_OFFSETS[v];
    Vec3::new(o[0] as f64, o[1] as f64, o[2] as f64)
}

#[cfg(test)]
mod tests;
