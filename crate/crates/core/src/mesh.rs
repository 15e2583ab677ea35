//! Uniform Cartesian hexahedral meshes over a box.
//!
//! Entities are indexed lexicographically with `x` fastest. Edges and faces
//! are grouped by axis: the edges along axis `a` (or the faces normal to
//! axis `a`) form one contiguous block.

use crate::topology::{EDGES, EDGE_AXIS, FACES, FACE_AXIS, VERTEX_OFFSETS};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDomain {
    lower: Vec3,
    upper: Vec3,
}

impl BoxDomain {
    pub fn new(lower: [f64; 3], upper: [f64; 3]) -> Result<Self> {
        for a in 0..3 {
            if upper[a] <= lower[a] || !lower[a].is_finite() || !upper[a].is_finite() {
                return Err(Error::InvalidMesh(format!(
                    "degenerate box: lower {lower:?} upper {upper:?}"
                )));
            }
        }
        Ok(BoxDomain { lower: Vec3::from(lower), upper: Vec3::from(upper) })
    }

    /// `(−1, 1)³`, the domain of all built-in benchmarks.
    pub fn symmetric_unit() -> Self {
        BoxDomain { lower: Vec3::repeat(-1.0), upper: Vec3::repeat(1.0) }
    }

    pub fn lower(&self) -> Vec3 {
        self.lower
    }

    pub fn upper(&self) -> Vec3 {
        self.upper
    }

    pub fn lengths(&self) -> Vec3 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone)]
pub struct CartesianMesh {
    domain: BoxDomain,
    n: usize,
    spacing: Vec3,
    h: f64,
}

impl CartesianMesh {
    pub fn new(domain: BoxDomain, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMesh("number of subdivisions must be positive".into()));
        }
        if n > 1500 {
            return Err(Error::InvalidMesh(format!("{n} subdivisions per axis overflow the index space")));
        }
        let spacing = domain.lengths() / n as f64;
        let h = spacing.max();
        Ok(CartesianMesh { domain, n, spacing, h })
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// Subdivisions per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Maximum edge length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn spacing(&self) -> Vec3 {
        self.spacing
    }

    pub fn element_volume(&self) -> f64 {
        self.spacing.product()
    }

    pub fn num_nodes(&self) -> usize {
        (self.n + 1).pow(3)
    }

    pub fn num_elements(&self) -> usize {
        self.n.pow(3)
    }

    pub fn num_edges(&self) -> usize {
        3 * self.n * (self.n + 1) * (self.n + 1)
    }

    pub fn num_faces(&self) -> usize {
        3 * (self.n + 1) * self.n * self.n
    }

    pub fn node_index(&self, ijk: [usize; 3]) -> usize {
        let m = self.n + 1;
        ijk[0] + m * (ijk[1] + m * ijk[2])
    }

    pub fn node_ijk(&self, node: usize) -> [usize; 3] {
        let m = self.n + 1;
        [node % m, (node / m) % m, node / (m * m)]
    }

    pub fn node_coords(&self, node: usize) -> Vec3 {
        let ijk = self.node_ijk(node);
        self.point_at(ijk)
    }

    fn point_at(&self, ijk: [usize; 3]) -> Vec3 {
        let lo = self.domain.lower;
        let up = self.domain.upper;
        let mut p = Vec3::zeros();
        for a in 0..3 {
            // exact at the far boundary
            p[a] = if ijk[a] == self.n {
                up[a]
            } else {
                lo[a] + ijk[a] as f64 * self.spacing[a]
            };
        }
        p
    }

    pub fn is_boundary_node(&self, node: usize) -> bool {
        self.node_ijk(node).iter().any(|&i| i == 0 || i == self.n)
    }

    pub fn element_index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.n * (ijk[1] + self.n * ijk[2])
    }

    pub fn element_ijk(&self, element: usize) -> [usize; 3] {
        let n = self.n;
        [element % n, (element / n) % n, element / (n * n)]
    }

    pub fn element_origin(&self, element: usize) -> Vec3 {
        self.point_at(self.element_ijk(element))
    }

    pub fn element_nodes(&self, element: usize) -> [usize; 8] {
        let [i, j, k] = self.element_ijk(element);
        let mut out = [0; 8];
        for (v, off) in VERTEX_OFFSETS.iter().enumerate() {
            out[v] = self.node_index([i + off[0], j + off[1], k + off[2]]);
        }
        out
    }

    pub fn element_vertices(&self, element: usize) -> [Vec3; 8] {
        let [i, j, k] = self.element_ijk(element);
        let mut out = [Vec3::zeros(); 8];
        for (v, off) in VERTEX_OFFSETS.iter().enumerate() {
            out[v] = self.point_at([i + off[0], j + off[1], k + off[2]]);
        }
        out
    }

    fn edge_dims(&self, axis: usize) -> [usize; 3] {
        let mut d = [self.n + 1; 3];
        d[axis] = self.n;
        d
    }

    fn face_dims(&self, axis: usize) -> [usize; 3] {
        let mut d = [self.n; 3];
        d[axis] = self.n + 1;
        d
    }

    /// Edge starting at node `ijk` and running along `axis`.
    pub fn edge_index(&self, axis: usize, ijk: [usize; 3]) -> usize {
        let d = self.edge_dims(axis);
        axis * self.n * (self.n + 1) * (self.n + 1) + ijk[0] + d[0] * (ijk[1] + d[1] * ijk[2])
    }

    pub fn edge_axis_ijk(&self, edge: usize) -> (usize, [usize; 3]) {
        let block = self.n * (self.n + 1) * (self.n + 1);
        let axis = edge / block;
        let r = edge % block;
        let d = self.edge_dims(axis);
        (axis, [r % d[0], (r / d[0]) % d[1], r / (d[0] * d[1])])
    }

    /// End nodes of an edge, lower coordinate first.
    pub fn edge_nodes(&self, edge: usize) -> [usize; 2] {
        let (axis, ijk) = self.edge_axis_ijk(edge);
        let mut end = ijk;
        end[axis] += 1;
        [self.node_index(ijk), self.node_index(end)]
    }

    pub fn face_index(&self, axis: usize, ijk: [usize; 3]) -> usize {
        let d = self.face_dims(axis);
        axis * (self.n + 1) * self.n * self.n + ijk[0] + d[0] * (ijk[1] + d[1] * ijk[2])
    }

    pub fn face_axis_ijk(&self, face: usize) -> (usize, [usize; 3]) {
        let block = (self.n + 1) * self.n * self.n;
        let axis = face / block;
        let r = face % block;
        let d = self.face_dims(axis);
        (axis, [r % d[0], (r / d[0]) % d[1], r / (d[0] * d[1])])
    }

    /// Elements on the low and high side of a face along its normal axis.
    pub fn face_elements(&self, face: usize) -> [Option<usize>; 2] {
        let (axis, ijk) = self.face_axis_ijk(face);
        let upper = (ijk[axis] < self.n).then(|| self.element_index(ijk));
        let lower = (ijk[axis] > 0).then(|| {
            let mut l = ijk;
            l[axis] -= 1;
            self.element_index(l)
        });
        [lower, upper]
    }

    pub fn face_is_boundary(&self, face: usize) -> bool {
        let [a, b] = self.face_elements(face);
        a.is_none() || b.is_none()
    }

    /// Global edges of an element in local edge order.
    pub fn element_edges(&self, element: usize) -> [usize; 12] {
        let [i, j, k] = self.element_ijk(element);
        let mut out = [0; 12];
        for (e, [a, _]) in EDGES.iter().enumerate() {
            let off = VERTEX_OFFSETS[*a];
            out[e] = self.edge_index(EDGE_AXIS[e], [i + off[0], j + off[1], k + off[2]]);
        }
        out
    }

    /// Global faces of an element in local face order.
    pub fn element_faces(&self, element: usize) -> [usize; 6] {
        let [i, j, k] = self.element_ijk(element);
        let mut out = [0; 6];
        for f in 0..6 {
            let axis = FACE_AXIS[f];
            let mut ijk = [i, j, k];
            ijk[axis] += f % 2;
            out[f] = self.face_index(axis, ijk);
        }
        out
    }

    /// Local face index of `face` within `element`, if the element owns it.
    pub fn local_face(&self, element: usize, face: usize) -> Option<usize> {
        self.element_faces(element).iter().position(|&f| f == face)
    }

    /// Four vertex coordinates of a face in cyclic order.
    pub fn face_vertices(&self, face: usize) -> [Vec3; 4] {
        let (axis, ijk) = self.face_axis_ijk(face);
        // a face is local face `2·axis` of the element it starts
        let lf = 2 * axis;
        let mut out = [Vec3::zeros(); 4];
        for (k, v) in FACES[lf].iter().enumerate() {
            let off = VERTEX_OFFSETS[*v];
            out[k] = self.point_at([ijk[0] + off[0], ijk[1] + off[1], ijk[2] + off[2]]);
        }
        out
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let (axis, _) = self.face_axis_ijk(face);
        self.spacing.product() / self.spacing[axis]
    }

    pub fn element_contains(&self, element: usize, x: &Vec3, tol: f64) -> bool {
        let o = self.element_origin(element);
        (0..3).all(|a| x[a] >= o[a] - tol && x[a] <= o[a] + self.spacing[a] + tol)
    }

    /// Element containing `x` (clamped onto the closed domain).
    pub fn locate(&self, x: &Vec3) -> usize {
        let mut ijk = [0; 3];
        for a in 0..3 {
            let t = ((x[a] - self.domain.lower[a]) / self.spacing[a]).floor();
            ijk[a] = (t.max(0.0) as usize).min(self.n - 1);
        }
        self.element_index(ijk)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> CartesianMesh {
        CartesianMesh::new(BoxDomain::new([0.0; 3], [1.0; 3]).unwrap(), n).unwrap()
    }

    #[test]
    fn single_element_counts() {
        let m = unit(1);
        assert_eq!(m.num_elements(), 1);
        assert_eq!(m.num_nodes(), 8);
        assert_eq!(m.num_faces(), 6);
        assert_eq!(m.num_edges(), 12);
    }

    #[test]
    fn symmetric_box_n20() {
        let m = CartesianMesh::new(BoxDomain::symmetric_unit(), 20).unwrap();
        assert_eq!(m.num_elements(), 8000);
        assert_eq!(m.num_nodes(), 9261);
        assert!((m.h() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn interior_face_count_by_enumeration() {
        let m = CartesianMesh::new(BoxDomain::symmetric_unit(), 2).unwrap();
        // brute force: a face is interior iff two distinct elements list it
        let mut owners = vec![0usize; m.num_faces()];
        for e in 0..m.num_elements() {
            for f in m.element_faces(e) {
                owners[f] += 1;
            }
        }
        assert_eq!(owners.iter().filter(|&&c| c == 2).count(), 12);
        assert_eq!(owners.iter().filter(|&&c| c == 1).count(), 24);
        for f in 0..m.num_faces() {
            let adj = m.face_elements(f).iter().flatten().count();
            assert_eq!(adj, owners[f]);
            assert_eq!(m.face_is_boundary(f), owners[f] == 1);
        }
    }

    #[test]
    fn edge_and_face_indices_round_trip() {
        let m = unit(3);
        for e in 0..m.num_edges() {
            let (axis, ijk) = m.edge_axis_ijk(e);
            assert_eq!(m.edge_index(axis, ijk), e);
        }
        for f in 0..m.num_faces() {
            let (axis, ijk) = m.face_axis_ijk(f);
            assert_eq!(m.face_index(axis, ijk), f);
        }
        // element edges connect its own nodes
        for el in 0..m.num_elements() {
            let nodes = m.element_nodes(el);
            for (le, ge) in m.element_edges(el).iter().enumerate() {
                let [a, b] = m.edge_nodes(*ge);
                assert_eq!([a, b], [nodes[EDGES[le][0]], nodes[EDGES[le][1]]]);
            }
            for (lf, gf) in m.element_faces(el).iter().enumerate() {
                assert!(m.face_elements(*gf).contains(&Some(el)));
                assert_eq!(m.local_face(el, *gf), Some(lf));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BoxDomain::new([0.0; 3], [1.0, 0.0, 1.0]).is_err());
        assert!(CartesianMesh::new(BoxDomain::symmetric_unit(), 0).is_err());
    }

    #[test]
    fn locate_finds_containing_element() {
        let m = CartesianMesh::new(BoxDomain::symmetric_unit(), 7).unwrap();
        let x = Vec3::new(0.13, -0.91, 0.99);
        let e = m.locate(&x);
        assert!(m.element_contains(e, &x, 0.0));
        assert_eq!(m.locate(&Vec3::repeat(1.0)), m.num_elements() - 1);
    }
}
