//! Local numbering of the reference hexahedron.
//!
//! Vertex `b = bx + 2·by + 4·bz` sits at `(bx, by, bz)`; edges are grouped by
//! axis (0–3 along x, 4–7 along y, 8–11 along z) and faces are
//! `x⁻, x⁺, y⁻, y⁺, z⁻, z⁺`.

pub const VERTEX_OFFSETS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [1, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
];

pub const EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [2, 3],
    [4, 5],
    [6, 7],
    [0, 2],
    [1, 3],
    [4, 6],
    [5, 7],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

pub const EDGE_AXIS: [usize; 12] = [0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2];

/// Face vertices listed in cyclic order around the face.
pub const FACES: [[usize; 4]; 6] = [
    [0, 2, 6, 4],
    [1, 3, 7, 5],
    [0, 1, 5, 4],
    [2, 3, 7, 6],
    [0, 1, 3, 2],
    [4, 5, 7, 6],
];

/// Normal axis of each local face.
pub const FACE_AXIS: [usize; 6] = [0, 0, 1, 1, 2, 2];

pub fn edge_between(a: usize, b: usize) -> Option<usize> {
    EDGES
        .iter()
        .position(|e| (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a))
}

/// The four local edges bounding each local face, in the face's cyclic order.
pub fn face_edges(face: usize) -> [usize; 4] {
    let v = FACES[face];
    let mut out = [0; 4];
    for i in 0..4 {
        out[i] = edge_between(v[i], v[(i + 1) % 4]).expect("face cycle uses cube edges");
    }
    out
}

/// The two local faces containing a local edge.
pub fn edge_faces(edge: usize) -> [usize; 2] {
    let mut out = [usize::MAX; 2];
    let mut k = 0;
    for f in 0..6 {
        if face_edges(f).contains(&edge) {
            out[k] = f;
            k += 1;
        }
    }
    debug_assert_eq!(k, 2);
    out
}
