//! Sign classification of mesh entities against a level set.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::levelset::LevelSet;
use crate::mesh::CartesianMesh;
use crate::topology::{face_edges, EDGES};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Interface,
    NonInterface(Side),
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Nodes with `|w| < snap_rel · max|w|` are treated as lying in Ω⁻.
    pub snap_rel: f64,
    /// Interior samples per edge used to detect multiple crossings.
    pub edge_samples: usize,
    /// Reject interfaces that reach the domain boundary.
    pub strict_boundary: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { snap_rel: 1e-12, edge_samples: 3, strict_boundary: false }
    }
}

#[derive(Debug, Clone)]
pub struct EntityClassification {
    pub node_value: Vec<f64>,
    pub node_side: Vec<Side>,
    pub node_snapped: Vec<bool>,
    pub element_kind: Vec<ElementKind>,
    /// Interface elements in increasing order.
    pub interface_elements: Vec<usize>,
    /// Cut faces adjacent to an interface element.
    pub interface_faces: Vec<usize>,
    /// Cut edges adjacent to an interface element.
    pub interface_edges: Vec<usize>,
    /// Intersection point of every edge whose end nodes differ in sign.
    pub edge_points: HashMap<usize, Vec3>,
    /// Interface boundary faces (the interface reaches ∂Ω there).
    pub boundary_crossings: usize,
}

impl EntityClassification {
    pub fn is_interface(&self, element: usize) -> bool {
        self.element_kind[element] == ElementKind::Interface
    }

    /// Bit `b` set iff local vertex `b` lies in Ω⁻.
    pub fn minus_mask(&self, mesh: &CartesianMesh, element: usize) -> u8 {
        let mut mask = 0u8;
        for (b, nd) in mesh.element_nodes(element).iter().enumerate() {
            if self.node_side[*nd] == Side::Minus {
                mask |= 1 << b;
            }
        }
        mask
    }

    pub fn edge_is_cut(&self, mesh: &CartesianMesh, edge: usize) -> bool {
        let [a, b] = mesh.edge_nodes(edge);
        self.node_side[a] != self.node_side[b]
    }
}

/// Root of `w` on segment `a`–`b` by bisection, `a` in Ω⁻ and `b` in Ω⁺.
pub fn bisect(ls: &dyn LevelSet, a: &Vec3, b: &Vec3) -> Vec3 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if ls.value(&(a + (b - a) * mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    a + (b - a) * (0.5 * (lo + hi))
}

pub fn classify(
    mesh: &CartesianMesh,
    ls: &dyn LevelSet,
    opts: &ClassifyOptions,
) -> Result<EntityClassification> {
    let node_value: Vec<f64> = (0..mesh.num_nodes())
        .into_par_iter()
        .map(|i| ls.value(&mesh.node_coords(i)))
        .collect();
    if let Some(i) = node_value.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidMesh(format!("level set is not finite at node {i}")));
    }
    let scale = node_value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = opts.snap_rel * scale;
    let node_snapped: Vec<bool> = node_value.iter().map(|v| v.abs() < tol).collect();
    let node_side: Vec<Side> = node_value
        .iter()
        .zip(&node_snapped)
        .map(|(v, s)| if *s || *v < 0.0 { Side::Minus } else { Side::Plus })
        .collect();

    // every edge: sign changes along interior samples
    let samples = opts.edge_samples;
    let bad_edge = (0..mesh.num_edges()).into_par_iter().find_first(|&e| {
        let [a, b] = mesh.edge_nodes(e);
        let (pa, pb) = (mesh.node_coords(a), mesh.node_coords(b));
        let mut prev = node_side[a];
        let mut changes = 0;
        for s in 1..=samples + 1 {
            let side = if s == samples + 1 {
                node_side[b]
            } else {
                let t = s as f64 / (samples + 1) as f64;
                let v = ls.value(&(pa + (pb - pa) * t));
                if v < 0.0 || v.abs() < tol { Side::Minus } else { Side::Plus }
            };
            if side != prev {
                changes += 1;
                prev = side;
            }
        }
        changes > 1
    });
    if let Some(e) = bad_edge {
        return Err(Error::MeshTooCoarse(format!("edge {e} crosses the interface more than once")));
    }

    let element_kind: Vec<ElementKind> = (0..mesh.num_elements())
        .map(|el| {
            let nodes = mesh.element_nodes(el);
            let plus = nodes.iter().any(|&n| node_side[n] == Side::Plus);
            let minus_core = nodes.iter().any(|&n| node_side[n] == Side::Minus && !node_snapped[n]);
            let minus = nodes.iter().any(|&n| node_side[n] == Side::Minus);
            match (minus_core, plus) {
                (true, true) => ElementKind::Interface,
                (_, true) => ElementKind::NonInterface(Side::Plus),
                _ => {
                    debug_assert!(minus);
                    ElementKind::NonInterface(Side::Minus)
                }
            }
        })
        .collect();
    let interface_elements: Vec<usize> = (0..mesh.num_elements())
        .filter(|&e| element_kind[e] == ElementKind::Interface)
        .collect();

    let cut = |e: usize| {
        let [a, b] = mesh.edge_nodes(e);
        node_side[a] != node_side[b]
    };

    let mut iface_face = vec![false; mesh.num_faces()];
    let mut edge_set = Vec::new();
    for &el in &interface_elements {
        let edges = mesh.element_edges(el);
        for (lf, gf) in mesh.element_faces(el).iter().enumerate() {
            let n_cut = face_edges(lf).iter().filter(|&&le| cut(edges[le])).count();
            if n_cut == 4 {
                return Err(Error::MeshTooCoarse(format!(
                    "face {gf} of element {el} has all four edges cut"
                )));
            }
            if n_cut > 0 {
                iface_face[*gf] = true;
            }
        }
        for &ge in &edges {
            if cut(ge) {
                edge_set.push(ge);
            }
        }
    }
    edge_set.sort_unstable();
    edge_set.dedup();
    let interface_faces: Vec<usize> = (0..mesh.num_faces()).filter(|&f| iface_face[f]).collect();
    let boundary_crossings = interface_faces.iter().filter(|&&f| mesh.face_is_boundary(f)).count();
    if opts.strict_boundary && boundary_crossings > 0 {
        return Err(Error::InvalidMesh(format!(
            "interface meets the domain boundary on {boundary_crossings} faces"
        )));
    }

    // intersection points on all sign-changing edges of elements touching Γ
    let mut cut_edges: Vec<usize> = Vec::new();
    for el in 0..mesh.num_elements() {
        if matches!(element_kind[el], ElementKind::NonInterface(_)) {
            let nodes = mesh.element_nodes(el);
            let s0 = node_side[nodes[0]];
            if nodes.iter().all(|&n| node_side[n] == s0) {
                continue;
            }
        }
        for (le, ge) in mesh.element_edges(el).iter().enumerate() {
            let [a, b] = EDGES[le];
            let nodes = mesh.element_nodes(el);
            if node_side[nodes[a]] != node_side[nodes[b]] {
                cut_edges.push(*ge);
            }
        }
    }
    cut_edges.sort_unstable();
    cut_edges.dedup();
    let edge_points: HashMap<usize, Vec3> = cut_edges
        .par_iter()
        .map(|&e| {
            let [a, b] = mesh.edge_nodes(e);
            let (pa, pb) = (mesh.node_coords(a), mesh.node_coords(b));
            let p = if node_side[a] == Side::Minus { bisect(ls, &pa, &pb) } else { bisect(ls, &pb, &pa) };
            (e, p)
        })
        .collect();

    Ok(EntityClassification {
        node_value,
        node_side,
        node_snapped,
        element_kind,
        interface_elements,
        interface_faces,
        interface_edges: edge_set,
        edge_points,
        boundary_crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelset::{FnLevelSet, Surface};
    use crate::mesh::BoxDomain;

    fn mesh(n: usize) -> CartesianMesh {
        CartesianMesh::new(BoxDomain::symmetric_unit(), n).unwrap()
    }

    #[test]
    fn plane_between_nodes_cuts_one_layer() {
        let m = mesh(4);
        let ls = Surface::Plane { normal: [1.0, 0.0, 0.0], offset: 0.1 };
        let c = classify(&m, &ls, &ClassifyOptions::default()).unwrap();
        // x = 0.1 falls in the third slab of four
        assert_eq!(c.interface_elements.len(), 16);
        for &e in &c.interface_elements {
            assert_eq!(m.element_ijk(e)[0], 2);
        }
        assert_eq!(c.interface_edges.len(), 25);
        for p in c.edge_points.values() {
            assert!((p.x - 0.1).abs() < 1e-12);
        }
        // the four side faces of the slab lie on ∂Ω
        assert_eq!(c.boundary_crossings, 16);
    }

    #[test]
    fn plane_through_nodes_is_not_interface() {
        let m = mesh(4);
        let ls = Surface::Plane { normal: [1.0, 0.0, 0.0], offset: 0.0 };
        let c = classify(&m, &ls, &ClassifyOptions::default()).unwrap();
        assert!(c.interface_elements.is_empty());
        assert!(c.node_snapped.iter().filter(|s| **s).count() == 25);
    }

    #[test]
    fn double_crossing_edge_is_too_coarse() {
        let m = mesh(2);
        // thin slab straddling interior sample points of x-edges
        let ls = FnLevelSet(|x: &Vec3| (x.x - 0.5).abs() - 0.05);
        assert!(matches!(
            classify(&m, &ls, &ClassifyOptions::default()),
            Err(Error::MeshTooCoarse(_))
        ));
    }

    #[test]
    fn four_cut_face_is_too_coarse() {
        let m = mesh(1);
        // saddle: diagonal corners of the z = -1 face share a sign
        let ls = FnLevelSet(|x: &Vec3| x.x * x.y + 0.05 * x.z);
        assert!(matches!(
            classify(&m, &ls, &ClassifyOptions::default()),
            Err(Error::MeshTooCoarse(_))
        ));
    }

    #[test]
    fn strict_boundary_rejects_crossing() {
        let m = mesh(4);
        let ls = Surface::Plane { normal: [1.0, 0.0, 0.0], offset: 0.1 };
        let opts = ClassifyOptions { strict_boundary: true, ..Default::default() };
        assert!(classify(&m, &ls, &opts).is_err());
        let sphere = Surface::Sphere { center: [0.0; 3], radius: 0.5 };
        let c = classify(&m, &sphere, &opts).unwrap();
        assert_eq!(c.boundary_crossings, 0);
        assert!(!c.interface_elements.is_empty());
    }

    #[test]
    fn bisection_hits_sphere() {
        let s = Surface::Sphere { center: [0.0; 3], radius: 0.3 };
        let p = bisect(&s, &Vec3::zeros(), &Vec3::new(1.0, 0.0, 0.0));
        assert!((p.x - 0.3).abs() < 1e-12);
    }
}
