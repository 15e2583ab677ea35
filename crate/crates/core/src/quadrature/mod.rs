//! Integration over cut hexahedra and cut faces.
//!
//! The interface is linearized inside each element: the intersection
//! polygon is fan-triangulated and every sub-cell bounded by it is split into
//! tetrahedra tagged with their side.

pub mod rules;

use crate::classify::{EntityClassification, Side};
use crate::geometry::{intersection_cycle, InterfaceElementData};
use crate::mesh::CartesianMesh;
use crate::topology::{face_edges, FACES, FACE_AXIS};
use crate::{Error, Result, Vec3};

pub use rules::QuadratureRule;

#[derive(Debug, Clone, Copy)]
pub struct Tet {
    pub p: [Vec3; 4],
    pub side: Side,
    /// `−1` only for the signed-cone fallback.
    pub sign: f64,
}

impl Tet {
    pub fn volume(&self) -> f64 {
        tet_volume(&self.p)
    }
}

pub fn tet_volume(p: &[Vec3; 4]) -> f64 {
    ((p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0])) / 6.0).abs()
}

fn signed_tet_volume(p: &[Vec3; 4]) -> f64 {
    (p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0])) / 6.0
}

#[derive(Debug, Clone, Copy)]
pub struct FaceTriangle {
    pub p: [Vec3; 3],
    pub side: Side,
}

impl FaceTriangle {
    pub fn area(&self) -> f64 {
        0.5 * (self.p[1] - self.p[0]).cross(&(self.p[2] - self.p[0])).norm()
    }
}

#[derive(Debug, Clone)]
pub struct CutDecomposition {
    pub element: usize,
    pub tets: Vec<Tet>,
    /// Side-tagged triangles of each local face (cut faces only).
    pub faces: [Vec<FaceTriangle>; 6],
    /// Linearized interface patch.
    pub interface: Vec<[Vec3; 3]>,
}

impl CutDecomposition {
    pub fn volume(&self, side: Side) -> f64 {
        self.tets.iter().filter(|t| t.side == side).map(|t| t.sign * t.volume()).sum()
    }
}

/// Split a convex quadrilateral with cyclic vertices at the cut points of
/// its edges. `cuts[i]` is the point on edge `(i, i+1)`.
pub fn split_face(verts: &[Vec3; 4], sides: &[Side; 4], cuts: &[Option<Vec3>; 4]) -> Vec<FaceTriangle> {
    let mut polys: [Vec<Vec3>; 2] = [Vec::new(), Vec::new()];
    let idx = |s: Side| if s == Side::Minus { 0 } else { 1 };
    for i in 0..4 {
        polys[idx(sides[i])].push(verts[i]);
        if let Some(d) = cuts[i] {
            polys[0].push(d);
            polys[1].push(d);
        }
    }
    let mut out = Vec::new();
    for (k, poly) in polys.iter().enumerate() {
        let side = if k == 0 { Side::Minus } else { Side::Plus };
        for i in 1..poly.len().saturating_sub(1) {
            let t = FaceTriangle { p: [poly[0], poly[i], poly[i + 1]], side };
            if t.area() > 0.0 {
                out.push(t);
            }
        }
    }
    out
}

fn local_face_split(data: &InterfaceElementData, f: usize) -> Vec<FaceTriangle> {
    let fv = FACES[f];
    let fe = face_edges(f);
    let verts = fv.map(|v| data.vertices[v]);
    let sides = fv.map(|v| data.vertex_side(v));
    let cuts = fe.map(|e| data.point_edges.iter().position(|x| *x == e).map(|i| data.points[i]));
    split_face(&verts, &sides, &cuts)
}

/// Side-tagged triangles of a global mesh face.
pub fn decompose_face(mesh: &CartesianMesh, cls: &EntityClassification, face: usize) -> Vec<FaceTriangle> {
    let [lower, upper] = mesh.face_elements(face);
    let el = upper.or(lower).expect("every face has an element");
    let lf = mesh.local_face(el, face).expect("element owns face");
    let nodes = mesh.element_nodes(el);
    let edges = mesh.element_edges(el);
    let fv = FACES[lf];
    let verts = fv.map(|v| mesh.node_coords(nodes[v]));
    let sides = fv.map(|v| cls.node_side[nodes[v]]);
    let cuts = face_edges(lf).map(|e| {
        let ge = edges[e];
        cls.edge_is_cut(mesh, ge).then(|| cls.edge_points[&ge])
    });
    split_face(&verts, &sides, &cuts)
}

fn prism_tets(a: [Vec3; 3], d: [Vec3; 3], side: Side, out: &mut Vec<Tet>, tiny: f64) {
    for p in [[a[0], a[1], a[2], d[0]], [a[1], a[2], d[0], d[1]], [a[2], d[0], d[1], d[2]]] {
        if tet_volume(&p) > tiny {
            out.push(Tet { p, side, sign: 1.0 });
        }
    }
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Clip a convex polygon by the halfplane `s·cross(q − p, x − p) ≥ 0`.
fn clip(poly: &[[f64; 2]], p: [f64; 2], q: [f64; 2], s: f64) -> Vec<[f64; 2]> {
    let f = |x: [f64; 2]| s * cross2([q[0] - p[0], q[1] - p[1]], [x[0] - p[0], x[1] - p[1]]);
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fa, fb) = (f(a), f(b));
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa > 0.0 && fb < 0.0) || (fa < 0.0 && fb > 0.0) {
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

struct Column<'a> {
    data: &'a InterfaceElementData,
    lo: Vec3,
    hi: Vec3,
    poly: &'a [Vec3],
    fan: &'a [[Vec3; 3]],
    /// Newell normal in the orientation of the polygon cycle.
    cycle_normal: Vec3,
    /// Same normal, oriented from Ω⁻ to Ω⁺.
    normal: Vec3,
}

impl Column<'_> {
    fn build(&self, e: usize, tiny: f64) -> Option<Vec<Tet>> {
        let (u, v) = ((e + 1) % 3, (e + 2) % 3);
        let ne = self.normal[e];
        let ce = self.cycle_normal[e];
        if ne.abs() < 1e-12 * self.normal.norm() {
            return None;
        }
        let h = (self.hi - self.lo).max();
        for t in self.fan {
            let a = cross2([t[1][u] - t[0][u], t[1][v] - t[0][v]], [t[2][u] - t[0][u], t[2][v] - t[0][v]]);
            if a * ce < -1e-14 * h * h {
                return None;
            }
        }
        let below = if ne > 0.0 { Side::Minus } else { Side::Plus };
        let mut tets = Vec::new();
        for t in self.fan {
            let mut a = *t;
            let mut b = *t;
            for k in 0..3 {
                a[k][e] = self.lo[e];
                b[k][e] = self.hi[e];
            }
            prism_tets(a, *t, below, &mut tets, tiny);
            prism_tets(b, *t, below.other(), &mut tets, tiny);
        }
        // columns outside the projected polygon, cut off by chords on the
        // bottom and top faces
        let tol = 1e-12 * h;
        let k = self.poly.len();
        let proj = |x: &Vec3| [x[u], x[v]];
        for i in 0..k {
            let (p, q) = (self.poly[i], self.poly[(i + 1) % k]);
            let level = if (p[e] - self.lo[e]).abs() < tol && (q[e] - self.lo[e]).abs() < tol {
                0
            } else if (p[e] - self.hi[e]).abs() < tol && (q[e] - self.hi[e]).abs() < tol {
                1
            } else {
                continue;
            };
            let (pp, qq) = (proj(&p), proj(&q));
            let d = [qq[0] - pp[0], qq[1] - pp[1]];
            if d[0].hypot(d[1]) < tol {
                continue;
            }
            let others: f64 = self
                .poly
                .iter()
                .map(|x| {
                    let r = proj(x);
                    cross2(d, [r[0] - pp[0], r[1] - pp[1]])
                })
                .sum();
            if others.abs() < tol * h {
                return None;
            }
            let s = -others.signum();
            let square = [
                [self.lo[u], self.lo[v]],
                [self.hi[u], self.lo[v]],
                [self.hi[u], self.hi[v]],
                [self.lo[u], self.hi[v]],
            ];
            let piece = clip(&square, pp, qq, s);
            if piece.len() < 3 {
                continue;
            }
            // side of the column from its deepest square corner
            let (ci, _) = square
                .iter()
                .enumerate()
                .map(|(ci, c)| (ci, s * cross2(d, [c[0] - pp[0], c[1] - pp[1]])))
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            let corner_bits = [[0, 0], [1, 0], [1, 1], [0, 1]][ci];
            let mut vb = [0usize; 3];
            vb[u] = corner_bits[0];
            vb[v] = corner_bits[1];
            vb[e] = level;
            let vertex = vb[0] + 2 * vb[1] + 4 * vb[2];
            let side = self.data.vertex_side(vertex);
            let lift = |x: [f64; 2], z: f64| {
                let mut p = Vec3::zeros();
                p[u] = x[0];
                p[v] = x[1];
                p[e] = z;
                p
            };
            for j in 1..piece.len() - 1 {
                let tri = [piece[0], piece[j], piece[j + 1]];
                let a = tri.map(|x| lift(x, self.lo[e]));
                let b = tri.map(|x| lift(x, self.hi[e]));
                prism_tets(a, b, side, &mut tets, tiny);
            }
        }
        Some(tets)
    }
}

fn outward_oriented(t: [Vec3; 3], n: &Vec3) -> [Vec3; 3] {
    if (t[1] - t[0]).cross(&(t[2] - t[0])).dot(n) < 0.0 {
        [t[0], t[2], t[1]]
    } else {
        t
    }
}

/// Signed cones over the closed boundary of each side; exact for any
/// closed surface but may use negative weights.
pub(crate) fn signed_cones(data: &InterfaceElementData, fan: &[[Vec3; 3]], normal: &Vec3) -> Vec<Tet> {
    let faces: [Vec<FaceTriangle>; 6] = std::array::from_fn(|f| local_face_split(data, f));
    let mut tets = Vec::new();
    for side in [Side::Minus, Side::Plus] {
        let mut tris: Vec<[Vec3; 3]> = Vec::new();
        for f in 0..6 {
            let mut n = Vec3::zeros();
            n[FACE_AXIS[f]] = if f % 2 == 0 { -1.0 } else { 1.0 };
            for t in faces[f].iter().filter(|t| t.side == side) {
                tris.push(outward_oriented(t.p, &n));
            }
        }
        let out_n = if side == Side::Minus { *normal } else { -normal };
        for t in fan {
            tris.push(outward_oriented(*t, &out_n));
        }
        let apex = data.vertices.iter().sum::<Vec3>() / 8.0;
        for t in tris {
            let p = [apex, t[0], t[1], t[2]];
            let v = signed_tet_volume(&p);
            if v != 0.0 {
                tets.push(Tet { p, side, sign: v.signum() });
            }
        }
    }
    tets
}

pub fn decompose_cut_element(data: &InterfaceElementData) -> Result<CutDecomposition> {
    let element = data.element;
    let lo = data.vertices[0];
    let hi = data.vertices[7];
    let total = (hi - lo).product();
    let cycle = intersection_cycle(element, &data.point_edges)?;
    let poly: Vec<Vec3> = cycle.iter().map(|&i| data.points[i]).collect();
    let k = poly.len();
    let c = poly.iter().sum::<Vec3>() / k as f64;
    let fan: Vec<[Vec3; 3]> = if k == 3 {
        vec![[poly[0], poly[1], poly[2]]]
    } else {
        (0..k).map(|i| [c, poly[i], poly[(i + 1) % k]]).collect()
    };
    let mut normal = Vec3::zeros();
    for i in 0..k {
        normal += (poly[i] - c).cross(&(poly[(i + 1) % k] - c));
    }
    // orient minus to plus using the vertex farthest from the mean plane
    let far = (0..8)
        .max_by(|&a, &b| {
            (data.vertices[a] - c).dot(&normal).abs().partial_cmp(&(data.vertices[b] - c).dot(&normal).abs()).unwrap()
        })
        .unwrap();
    let cycle_normal = normal;
    let lfar = (data.vertices[far] - c).dot(&normal);
    if (lfar < 0.0) != (data.vertex_side(far) == Side::Minus) {
        normal = -normal;
    }
    let faces: [Vec<FaceTriangle>; 6] = std::array::from_fn(|f| {
        let t = local_face_split(data, f);
        if t.iter().any(|x| x.side != t[0].side) { t } else { Vec::new() }
    });
    let tiny = 1e-15 * total;
    let col = Column { data, lo, hi, poly: &poly, fan: &fan, cycle_normal, normal };
    let mut axes = [0usize, 1, 2];
    axes.sort_by(|&a, &b| normal[b].abs().partial_cmp(&normal[a].abs()).unwrap());
    for e in axes {
        if let Some(tets) = col.build(e, tiny) {
            let vol: f64 = tets.iter().map(|t| t.volume()).sum();
            if (vol - total).abs() <= 1e-12 * total {
                return Ok(CutDecomposition { element, tets, faces, interface: fan });
            }
        }
    }
    log::debug!("element {element}: column decomposition failed, using signed cones");
    let tets = signed_cones(data, &fan, &normal);
    let vol: f64 = tets.iter().map(|t| t.sign * t.volume()).sum();
    if (vol - total).abs() <= 1e-12 * total {
        return Ok(CutDecomposition { element, tets, faces, interface: fan });
    }
    Err(Error::Decomposition {
        element,
        reason: format!("sub-cell volume {vol:.16e} differs from element volume {total:.16e}"),
    })
}

/// Physical quadrature points of a tetrahedron.
pub fn tet_points<'r>(t: &Tet, rule: &'r QuadratureRule) -> impl Iterator<Item = (Vec3, f64)> + 'r {
    let p = t.p;
    let w6 = 6.0 * t.volume() * t.sign;
    rule.points.iter().zip(&rule.weights).map(move |(x, w)| {
        (p[0] + (p[1] - p[0]) * x[0] + (p[2] - p[0]) * x[1] + (p[3] - p[0]) * x[2], w * w6)
    })
}

pub fn triangle_points<'r>(p: [Vec3; 3], rule: &'r QuadratureRule) -> impl Iterator<Item = (Vec3, f64)> + 'r {
    let w2 = (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(move |(x, w)| (p[0] + (p[1] - p[0]) * x[0] + (p[2] - p[0]) * x[1], w * w2))
}

/// Tensor points of an axis-aligned box.
pub fn box_points<'r>(lo: Vec3, hi: Vec3, rule: &'r QuadratureRule) -> impl Iterator<Item = (Vec3, f64)> + 'r {
    let d = hi - lo;
    let vol = d.product();
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(move |(x, w)| (lo + Vec3::new(x[0] * d.x, x[1] * d.y, x[2] * d.z), w * vol))
}

/// `∫_T g(X, side)` over a cut element.
pub fn integrate_element(
    decomp: &CutDecomposition,
    rule: &QuadratureRule,
    g: &mut dyn FnMut(&Vec3, Side) -> f64,
) -> f64 {
    let mut s = 0.0;
    for t in &decomp.tets {
        for (x, w) in tet_points(t, rule) {
            s += w * g(&x, t.side);
        }
    }
    s
}

/// `∫_F g(X, side)` over side-tagged face triangles.
pub fn integrate_face(
    tris: &[FaceTriangle],
    rule: &QuadratureRule,
    g: &mut dyn FnMut(&Vec3, Side) -> f64,
) -> f64 {
    let mut s = 0.0;
    for t in tris {
        for (x, w) in triangle_points(t.p, rule) {
            s += w * g(&x, t.side);
        }
    }
    s
}

#[cfg(test)]
mod tests;
