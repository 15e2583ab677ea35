//! Assembly of the partially penalized IFE system.

use rayon::prelude::*;

use crate::classify::Side;
use crate::ife::TrilinearPoly;
use crate::problem::BenchmarkProblem;
use crate::quadrature::{box_points, decompose_face, rules, tet_points, triangle_points};
use crate::solver::{self, SolveStats, SolverKind, SolverOptions};
use crate::space::GlobalIFESpace;
use crate::sparse::CsrMatrix;
use crate::{Error, Result, Vec3};

/// Face measure dividing `σ⁰` in the jump penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyScaling {
    /// `σ⁰/|F|` with `|F|` the face area (an `h⁻²` weight).
    Area,
    /// `σ⁰/|F|^{1/2}`, i.e. `|F|` read as the face side length (an `h⁻¹` weight).
    #[default]
    Length,
}

/// `ε` selects the symmetric (−1), incomplete (0) or non-symmetric (+1)
/// variant; `σ⁰` scales the jump penalty `σ⁰/|F| ∫[u][v]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParameters {
    pub epsilon: f64,
    pub sigma0: f64,
    pub scaling: PenaltyScaling,
}

impl SchemeParameters {
    pub fn new(epsilon: i32, sigma0: f64) -> Result<Self> {
        if !(-1..=1).contains(&epsilon) {
            return Err(Error::Config(format!("epsilon must be -1, 0 or 1, got {epsilon}")));
        }
        if !(sigma0 >= 0.0 && sigma0.is_finite()) {
            return Err(Error::Config(format!("sigma0 must be non-negative, got {sigma0}")));
        }
        Ok(SchemeParameters { epsilon: f64::from(epsilon), sigma0, scaling: PenaltyScaling::Length })
    }

    /// `ε = −1` and `σ⁰ = factor·max β`.
    pub fn symmetric(factor: f64, beta_minus: f64, beta_plus: f64) -> Self {
        SchemeParameters { epsilon: -1.0, sigma0: factor * beta_minus.max(beta_plus), scaling: PenaltyScaling::Length }
    }

    pub fn with_scaling(self, scaling: PenaltyScaling) -> Self {
        SchemeParameters { scaling, ..self }
    }

    pub fn solver_kind(&self) -> SolverKind {
        if self.epsilon == -1.0 { SolverKind::Cg } else { SolverKind::BiCgStab }
    }
}

#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub constrained: Vec<bool>,
    pub penalty_faces: usize,
}

/// Interior faces that carry penalty terms.
pub fn penalty_faces(space: &GlobalIFESpace) -> Vec<usize> {
    space.cls.interface_faces.iter().copied().filter(|&f| !space.mesh.face_is_boundary(f)).collect()
}

struct Local {
    dofs: [usize; 16],
    n: usize,
    mat: [f64; 256],
    rhs: [f64; 16],
}

impl Local {
    fn new(n: usize) -> Self {
        Local { dofs: [0; 16], n, mat: [0.0; 256], rhs: [0.0; 16] }
    }
}

fn build_pattern(space: &GlobalIFESpace, faces: &[usize]) -> CsrMatrix {
    let mesh = &space.mesh;
    let m = mesh.n() + 1;
    let mut extra: Vec<(u32, u32)> = Vec::new();
    for &f in faces {
        let [Some(a), Some(b)] = mesh.face_elements(f) else { continue };
        let na = mesh.element_nodes(a);
        let nb = mesh.element_nodes(b);
        for &i in na.iter().chain(&nb) {
            for &j in na.iter().chain(&nb) {
                extra.push((i as u32, j as u32));
            }
        }
    }
    extra.sort_unstable();
    extra.dedup();
    let mut cursor = 0;
    let rows = (0..mesh.num_nodes()).map(move |node| {
        let [i, j, k] = mesh.node_ijk(node);
        let mut row: Vec<u32> = Vec::with_capacity(27);
        for kk in k.saturating_sub(1)..=(k + 1).min(m - 1) {
            for jj in j.saturating_sub(1)..=(j + 1).min(m - 1) {
                for ii in i.saturating_sub(1)..=(i + 1).min(m - 1) {
                    row.push(mesh.node_index([ii, jj, kk]) as u32);
                }
            }
        }
        let start = cursor;
        while cursor < extra.len() && extra[cursor].0 == node as u32 {
            cursor += 1;
        }
        if cursor > start {
            row.extend(extra[start..cursor].iter().map(|e| e.1));
            row.sort_unstable();
            row.dedup();
        }
        row
    });
    CsrMatrix::from_rows(rows)
}

/// `∫∇ψ_a·∇ψ_b` on an axis-aligned box.
pub fn reference_stiffness(spacing: Vec3) -> [[f64; 8]; 8] {
    let o = Vec3::zeros();
    let basis: [TrilinearPoly; 8] = std::array::from_fn(|i| TrilinearPoly::reference_basis(o, spacing, i));
    let mut k = [[0.0; 8]; 8];
    for (x, w) in box_points(o, spacing, rules::default_cube()) {
        let g = basis.map(|p| p.gradient(&x));
        for a in 0..8 {
            for b in 0..8 {
                k[a][b] += w * g[a].dot(&g[b]);
            }
        }
    }
    k
}

fn element_local(space: &GlobalIFESpace, problem: &BenchmarkProblem, kref: &[[f64; 8]; 8], e: usize) -> Local {
    let mesh = &space.mesh;
    let mut loc = Local::new(8);
    loc.dofs[..8].copy_from_slice(&mesh.element_nodes(e));
    match space.interface_slot(e) {
        None => {
            let side = space.element_side(e).expect("non-interface element");
            let beta = space.beta(side);
            for a in 0..8 {
                for b in 0..8 {
                    loc.mat[a * 16 + b] = beta * kref[a][b];
                }
            }
            let o = mesh.element_origin(e);
            let polys = space.shape_polys(e, side);
            for (x, w) in box_points(o, o + mesh.spacing(), rules::default_cube()) {
                let f = problem.f(&x, side);
                for a in 0..8 {
                    loc.rhs[a] += w * f * polys[a].value(&x);
                }
            }
        }
        Some(s) => {
            let b = &space.bases[s];
            let rule = rules::default_tet();
            for t in &space.decomps[s].tets {
                let polys = match t.side {
                    Side::Minus => &b.minus,
                    Side::Plus => &b.plus,
                };
                let beta = space.beta(t.side);
                for (x, w) in tet_points(t, rule) {
                    let g = polys.map(|p| p.gradient(&x));
                    let f = problem.f(&x, t.side);
                    for i in 0..8 {
                        for j in 0..8 {
                            loc.mat[i * 16 + j] += w * beta * g[i].dot(&g[j]);
                        }
                        loc.rhs[i] += w * f * polys[i].value(&x);
                    }
                }
            }
        }
    }
    loc
}

fn face_local(space: &GlobalIFESpace, params: &SchemeParameters, face: usize) -> Local {
    let mesh = &space.mesh;
    let [Some(t1), Some(t2)] = mesh.face_elements(face) else { unreachable!("interior face") };
    let (axis, _) = mesh.face_axis_ijk(face);
    let mut n = Vec3::zeros();
    n[axis] = 1.0;
    let mut loc = Local::new(16);
    loc.dofs[..8].copy_from_slice(&mesh.element_nodes(t1));
    loc.dofs[8..].copy_from_slice(&mesh.element_nodes(t2));
    let penalty = match params.scaling {
        PenaltyScaling::Area => params.sigma0 / mesh.face_area(face),
        PenaltyScaling::Length => params.sigma0 / mesh.face_area(face).sqrt(),
    };
    let polys = [
        [space.shape_polys(t1, Side::Minus), space.shape_polys(t1, Side::Plus)],
        [space.shape_polys(t2, Side::Minus), space.shape_polys(t2, Side::Plus)],
    ];
    let rule = rules::default_triangle();
    for tri in decompose_face(mesh, &space.cls, face) {
        let si = if tri.side == Side::Minus { 0 } else { 1 };
        let beta = space.beta(tri.side);
        for (x, w) in triangle_points(tri.p, rule) {
            let mut jump = [0.0; 16];
            let mut avg = [0.0; 16];
            for a in 0..8 {
                let p1 = &polys[0][si][a];
                let p2 = &polys[1][si][a];
                jump[a] = p1.value(&x);
                jump[8 + a] = -p2.value(&x);
                avg[a] = 0.5 * beta * p1.gradient(&x).dot(&n);
                avg[8 + a] = 0.5 * beta * p2.gradient(&x).dot(&n);
            }
            for a in 0..16 {
                for b in 0..16 {
                    // row a: test function, column b: trial function
                    loc.mat[a * 16 + b] +=
                        w * (-avg[b] * jump[a] + params.epsilon * avg[a] * jump[b] + penalty * jump[a] * jump[b]);
                }
            }
        }
    }
    loc
}

fn scatter(matrix: &mut CsrMatrix, rhs: &mut [f64], loc: &Local) {
    for a in 0..loc.n {
        let i = loc.dofs[a];
        rhs[i] += loc.rhs[a];
        for b in 0..loc.n {
            let v = loc.mat[a * 16 + b];
            if v != 0.0 {
                matrix.add(i, loc.dofs[b], v);
            }
        }
    }
}

pub fn assemble(space: &GlobalIFESpace, problem: &BenchmarkProblem, params: &SchemeParameters) -> Result<SparseSystem> {
    let mesh = &space.mesh;
    for &e in &space.cls.interface_elements {
        space.basis(e)?;
    }
    let faces = penalty_faces(space);
    let mut matrix = build_pattern(space, &faces);
    let mut rhs = vec![0.0; mesh.num_nodes()];
    let kref = reference_stiffness(mesh.spacing());
    // compute in parallel, accumulate sequentially for bit-stable results
    const BLOCK: usize = 4096;
    let ne = mesh.num_elements();
    for start in (0..ne).step_by(BLOCK) {
        let locals: Vec<Local> = (start..(start + BLOCK).min(ne))
            .into_par_iter()
            .map(|e| element_local(space, problem, &kref, e))
            .collect();
        for l in &locals {
            scatter(&mut matrix, &mut rhs, l);
        }
    }
    for chunk in faces.chunks(BLOCK) {
        let locals: Vec<Local> = chunk.par_iter().map(|&f| face_local(space, params, f)).collect();
        for l in &locals {
            scatter(&mut matrix, &mut rhs, l);
        }
    }
    Ok(SparseSystem { matrix, rhs, constrained: vec![false; mesh.num_nodes()], penalty_faces: faces.len() })
}

/// Boundary nodes with the exact solution on each node's side.
pub fn boundary_values(space: &GlobalIFESpace, problem: &BenchmarkProblem) -> Vec<(usize, f64)> {
    let mesh = &space.mesh;
    (0..mesh.num_nodes())
        .filter(|&i| mesh.is_boundary_node(i))
        .map(|i| (i, problem.g(&mesh.node_coords(i), space.cls.node_side[i])))
        .collect()
}

/// Row replacement for constrained nodes; with `symmetric`, constrained
/// columns are also eliminated into the right-hand side.
pub fn apply_dirichlet(sys: &mut SparseSystem, values: &[(usize, f64)], symmetric: bool) {
    let n = sys.matrix.dim();
    let mut g = vec![0.0; n];
    for &(i, v) in values {
        sys.constrained[i] = true;
        g[i] = v;
    }
    let m = &mut sys.matrix;
    for i in 0..n {
        let r = m.row_ptr[i]..m.row_ptr[i + 1];
        if sys.constrained[i] {
            for k in r {
                m.val[k] = if m.col[k] as usize == i { 1.0 } else { 0.0 };
            }
            sys.rhs[i] = g[i];
        } else if symmetric {
            for k in r {
                let j = m.col[k] as usize;
                if sys.constrained[j] {
                    sys.rhs[i] -= m.val[k] * g[j];
                    m.val[k] = 0.0;
                }
            }
        }
    }
}

pub fn solve(sys: &SparseSystem, opts: &SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
    solver::solve(&sys.matrix, &sys.rhs, None, opts)
}
