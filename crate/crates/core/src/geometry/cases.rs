//! Canonical cut configurations of a hexahedron, keyed by minus-vertex mask.

use std::sync::OnceLock;

use crate::topology::VERTEX_OFFSETS;

/// Representative minus-vertex sets of the five admissible configurations.
const REPRESENTATIVES: [(u8, &[usize]); 5] = [
    (1, &[0]),
    (2, &[0, 1]),
    (3, &[0, 1, 2, 3]),
    (4, &[0, 1, 2]),
    (5, &[0, 1, 2, 4]),
];

/// The 48 symmetries of the cube as permutations of local vertices.
pub fn cube_symmetries() -> Vec<[usize; 8]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for flips in 0..8usize {
            let mut map = [0usize; 8];
            for (v, off) in VERTEX_OFFSETS.iter().enumerate() {
                let mut b = 0;
                for a in 0..3 {
                    let mut c = off[perm[a]];
                    if flips >> a & 1 == 1 {
                        c = 1 - c;
                    }
                    b |= c << a;
                }
                map[v] = b;
            }
            out.push(map);
        }
    }
    out
}

pub fn apply_symmetry(map: &[usize; 8], mask: u8) -> u8 {
    let mut out = 0u8;
    for v in 0..8 {
        if mask >> v & 1 == 1 {
            out |= 1 << map[v];
        }
    }
    out
}

fn table() -> &'static [u8; 256] {
    static TABLE: OnceLock<[u8; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0u8; 256];
        let syms = cube_symmetries();
        for (case, verts) in REPRESENTATIVES {
            let mask = verts.iter().fold(0u8, |m, v| m | 1 << v);
            for s in &syms {
                for m in [mask, !mask] {
                    t[apply_symmetry(s, m) as usize] = case;
                }
            }
        }
        t
    })
}

/// Configuration label 1..=5 of a minus-vertex mask, or `None` if the mask
/// is not one of the canonical cuts (including the uncut masks 0 and 255).
pub fn case_of_mask(mask: u8) -> Option<u8> {
    match table()[mask as usize] {
        0 => None,
        c => Some(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::EDGES;

    fn brute_cut_edges(mask: u8) -> usize {
        EDGES.iter().filter(|[a, b]| (mask >> a & 1) != (mask >> b & 1)).count()
    }

    #[test]
    fn symmetries_are_distinct_bijections() {
        let syms = cube_symmetries();
        assert_eq!(syms.len(), 48);
        for s in &syms {
            let mut seen = [false; 8];
            for &v in s {
                seen[v] = true;
            }
            assert!(seen.iter().all(|x| *x));
            // edges map to edges
            for [a, b] in EDGES {
                assert!(crate::topology::edge_between(s[a], s[b]).is_some());
            }
        }
        let mut uniq = syms.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 48);
    }

    #[test]
    fn orbit_sizes_and_cut_counts() {
        let mut counts = [0usize; 6];
        for m in 0..=255u8 {
            if let Some(c) = case_of_mask(m) {
                counts[c as usize] += 1;
                let expected = [0, 3, 4, 4, 5, 6][c as usize];
                assert_eq!(brute_cut_edges(m), expected, "mask {m:#010b}");
            }
        }
        // face and tripod orbits are closed under complement
        assert_eq!(counts, [0, 16, 24, 6, 48, 8]);
        assert_eq!(case_of_mask(0), None);
        assert_eq!(case_of_mask(255), None);
        // two opposite corners and a staircase are not canonical
        assert_eq!(case_of_mask(0b1000_0001), None);
        assert_eq!(case_of_mask(0b0101_0011), None);
    }
}
