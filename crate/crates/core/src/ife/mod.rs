//! Local trilinear IFE spaces on interface elements.

use crate::classify::Side;
use crate::geometry::InterfaceElementData;
use crate::levelset::LevelSet;
use crate::{Error, Result, Vec3};

/// Trilinear polynomial in monomial form
/// `[1, qx, qy, qz, qx·qy, qy·qz, qx·qz, qx·qy·qz]` with `q = X − origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrilinearPoly {
    pub origin: Vec3,
    pub c: [f64; 8],
}

impl TrilinearPoly {
    pub fn zero(origin: Vec3) -> Self {
        TrilinearPoly { origin, c: [0.0; 8] }
    }

    /// Interpolant of nodal values on the box `origin + [0, spacing]`.
    pub fn from_nodal(origin: Vec3, spacing: Vec3, v: &[f64; 8]) -> Self {
        let (hx, hy, hz) = (spacing.x, spacing.y, spacing.z);
        TrilinearPoly {
            origin,
            c: [
                v[0],
                (v[1] - v[0]) / hx,
                (v[2] - v[0]) / hy,
                (v[4] - v[0]) / hz,
                (v[3] - v[1] - v[2] + v[0]) / (hx * hy),
                (v[6] - v[2] - v[4] + v[0]) / (hy * hz),
                (v[5] - v[1] - v[4] + v[0]) / (hx * hz),
                (v[7] - v[3] - v[5] - v[6] + v[1] + v[2] + v[4] - v[0]) / (hx * hy * hz),
            ],
        }
    }

    /// Standard nodal shape function `ψ_i`.
    pub fn reference_basis(origin: Vec3, spacing: Vec3, i: usize) -> Self {
        let mut v = [0.0; 8];
        v[i] = 1.0;
        Self::from_nodal(origin, spacing, &v)
    }

    pub fn value(&self, x: &Vec3) -> f64 {
        let q = x - self.origin;
        let c = &self.c;
        c[0] + c[1] * q.x + c[2] * q.y + c[3] * q.z
            + c[4] * q.x * q.y
            + c[5] * q.y * q.z
            + c[6] * q.x * q.z
            + c[7] * q.x * q.y * q.z
    }

    pub fn gradient(&self, x: &Vec3) -> Vec3 {
        let q = x - self.origin;
        let c = &self.c;
        Vec3::new(
            c[1] + c[4] * q.y + c[6] * q.z + c[7] * q.y * q.z,
            c[2] + c[4] * q.x + c[5] * q.z + c[7] * q.x * q.z,
            c[3] + c[5] * q.y + c[6] * q.x + c[7] * q.x * q.y,
        )
    }

    /// Hessian (zero diagonal for trilinear functions).
    pub fn hessian(&self, x: &Vec3) -> [[f64; 3]; 3] {
        let q = x - self.origin;
        let c = &self.c;
        let xy = c[4] + c[7] * q.z;
        let yz = c[5] + c[7] * q.x;
        let xz = c[6] + c[7] * q.y;
        [[0.0, xy, xz], [xy, 0.0, yz], [xz, yz, 0.0]]
    }

    pub fn nodal_values(&self, vertices: &[Vec3; 8]) -> [f64; 8] {
        vertices.map(|v| self.value(&v))
    }

    /// `self + a·((X − anchor)·n)`.
    pub fn add_affine(&self, a: f64, n: &Vec3, anchor: &Vec3) -> Self {
        let mut out = *self;
        out.c[0] += a * (self.origin - anchor).dot(n);
        out.c[1] += a * n.x;
        out.c[2] += a * n.y;
        out.c[3] += a * n.z;
        out
    }

    pub fn scaled_add(&self, a: f64, other: &TrilinearPoly) -> Self {
        debug_assert_eq!(self.origin, other.origin);
        let mut out = *self;
        for k in 0..8 {
            out.c[k] += a * other.c[k];
        }
        out
    }

    /// Coefficients of the second-order and cubic monomials.
    pub fn mixed_coefficients(&self) -> [f64; 4] {
        [self.c[4], self.c[5], self.c[6], self.c[7]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneData {
    pub normal: Vec3,
    pub anchor: Vec3,
    pub centroid: Vec3,
}

impl PlaneData {
    pub fn from_geometry(d: &InterfaceElementData) -> Self {
        PlaneData { normal: d.normal, anchor: d.anchor(), centroid: d.centroid }
    }

    pub fn l(&self, x: &Vec3) -> f64 {
        (x - self.anchor).dot(&self.normal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionDirection {
    MinusToPlus,
    PlusToMinus,
}

fn check_beta(bm: f64, bp: f64) -> Result<()> {
    if !(bm > 0.0 && bp > 0.0 && bm.is_finite() && bp.is_finite()) {
        return Err(Error::InvalidCoefficient(format!(
            "coefficients must be positive, got beta- = {bm}, beta+ = {bp}"
        )));
    }
    Ok(())
}

/// The extension operator matching value, flux at `F` and mixed terms across
/// the plane.
pub fn extension_apply(
    p: &TrilinearPoly,
    plane: &PlaneData,
    beta_minus: f64,
    beta_plus: f64,
    dir: ExtensionDirection,
) -> Result<TrilinearPoly> {
    check_beta(beta_minus, beta_plus)?;
    let ratio = match dir {
        ExtensionDirection::MinusToPlus => beta_minus / beta_plus,
        ExtensionDirection::PlusToMinus => beta_plus / beta_minus,
    };
    let a = (ratio - 1.0) * p.gradient(&plane.centroid).dot(&plane.normal);
    Ok(p.add_affine(a, &plane.normal, &plane.anchor))
}

/// `γ_i = ∇ψ_i(F)·n̄` and `δ_i = L(A_i)` over the vertices on `side`.
pub fn gamma_delta(
    data: &InterfaceElementData,
    plane: &PlaneData,
    side: Side,
) -> (Vec<usize>, Vec<f64>, Vec<f64>, f64) {
    let origin = data.vertices[0];
    let spacing = data.vertices[7] - data.vertices[0];
    let idx = data.vertex_indices(side);
    let gamma: Vec<f64> = idx
        .iter()
        .map(|&i| TrilinearPoly::reference_basis(origin, spacing, i).gradient(&plane.centroid).dot(&plane.normal))
        .collect();
    let delta: Vec<f64> = idx.iter().map(|&i| plane.l(&data.vertices[i])).collect();
    let gd = gamma.iter().zip(&delta).map(|(g, d)| g * d).sum();
    (idx, gamma, delta, gd)
}

#[derive(Debug, Clone)]
pub struct LocalIFEBasis {
    pub element: usize,
    pub vertices: [Vec3; 8],
    pub plane: PlaneData,
    pub beta_minus: f64,
    pub beta_plus: f64,
    /// Side with the larger coefficient; the other side is obtained from it
    /// by adding a multiple of `L`.
    pub base_side: Side,
    pub mu: f64,
    /// Vertices of the extended side with their `γ` and `δ`.
    pub ext_vertices: Vec<usize>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma_delta: f64,
    pub minus: [TrilinearPoly; 8],
    pub plus: [TrilinearPoly; 8],
    pub c0: [f64; 8],
}

impl LocalIFEBasis {
    pub fn build(data: &InterfaceElementData, beta_minus: f64, beta_plus: f64) -> Result<Self> {
        check_beta(beta_minus, beta_plus)?;
        let plane = PlaneData::from_geometry(data);
        let origin = data.vertices[0];
        let spacing = data.vertices[7] - data.vertices[0];
        let (base_side, ext_side, mu) = if beta_plus >= beta_minus {
            (Side::Plus, Side::Minus, beta_plus / beta_minus - 1.0)
        } else {
            (Side::Minus, Side::Plus, beta_minus / beta_plus - 1.0)
        };
        let (ext_vertices, gamma, delta, gd) = gamma_delta(data, &plane, ext_side);
        let grad_n: [f64; 8] = std::array::from_fn(|i| {
            TrilinearPoly::reference_basis(origin, spacing, i).gradient(&plane.centroid).dot(&plane.normal)
        });
        let denom = 1.0 + mu * gd;
        let mut minus = [TrilinearPoly::zero(origin); 8];
        let mut plus = minus;
        let mut c0s = [0.0; 8];
        for k in 0..8 {
            // Ξ for the unit nodal vector e_k
            let xi = grad_n[k];
            let c0 = mu * xi / denom;
            let mut base_vals = [0.0; 8];
            base_vals[k] = 1.0;
            for (j, &i) in ext_vertices.iter().enumerate() {
                base_vals[i] -= c0 * delta[j];
            }
            let base = TrilinearPoly::from_nodal(origin, spacing, &base_vals);
            let ext = base.add_affine(c0, &plane.normal, &plane.anchor);
            match base_side {
                Side::Plus => {
                    plus[k] = base;
                    minus[k] = ext;
                }
                Side::Minus => {
                    minus[k] = base;
                    plus[k] = ext;
                }
            }
            c0s[k] = c0;
        }
        Ok(LocalIFEBasis {
            element: data.element,
            vertices: data.vertices,
            plane,
            beta_minus,
            beta_plus,
            base_side,
            mu,
            ext_vertices,
            gamma,
            delta,
            gamma_delta: gd,
            minus,
            plus,
            c0: c0s,
        })
    }

    pub fn denominator(&self) -> f64 {
        1.0 + self.mu * self.gamma_delta
    }

    pub fn shape(&self, i: usize, side: Side) -> &TrilinearPoly {
        match side {
            Side::Minus => &self.minus[i],
            Side::Plus => &self.plus[i],
        }
    }

    /// The polynomial `Σ coeffs_i φ_i` on one side.
    pub fn combine(&self, coeffs: &[f64; 8], side: Side) -> TrilinearPoly {
        let mut p = TrilinearPoly::zero(self.vertices[0]);
        for i in 0..8 {
            p = p.scaled_add(coeffs[i], self.shape(i, side));
        }
        p
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        let lo = self.vertices[0];
        let hi = self.vertices[7];
        let tol = 1e-12 * (hi - lo).max();
        (0..3).all(|a| x[a] >= lo[a] - tol && x[a] <= hi[a] + tol)
    }
}

/// Value and gradient of an IFE function, with the side taken from the
/// true interface.
pub fn evaluate_ife(
    basis: &LocalIFEBasis,
    coeffs: &[f64; 8],
    x: &Vec3,
    ls: &dyn LevelSet,
) -> Result<(f64, Vec3)> {
    if !basis.contains(x) {
        return Err(Error::OutsideElement { element: basis.element, point: [x.x, x.y, x.z] });
    }
    let side = if ls.value(x) < 0.0 { Side::Minus } else { Side::Plus };
    let p = basis.combine(coeffs, side);
    Ok((p.value(x), p.gradient(x)))
}

/// Nodal coefficients of the IFE interpolant; `u` receives the side of each
/// node after snapping.
pub fn lagrange_interpolate(
    mesh: &crate::mesh::CartesianMesh,
    cls: &crate::classify::EntityClassification,
    u: &dyn Fn(&Vec3, Side) -> f64,
) -> Vec<f64> {
    (0..mesh.num_nodes()).map(|i| u(&mesh.node_coords(i), cls.node_side[i])).collect()
}
