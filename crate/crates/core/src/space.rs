//! The global IFE space: one degree of freedom per mesh node, standard
//! trilinear shape functions away from the interface and IFE shape functions
//! on interface elements.

use rayon::prelude::*;

use crate::classify::{ClassifyOptions, ElementKind, EntityClassification, Side};
use crate::geometry::{analyze_interface, InterfaceElementData, PlaneRule};
use crate::ife::{LocalIFEBasis, TrilinearPoly};
use crate::levelset::LevelSet;
use crate::mesh::CartesianMesh;
use crate::quadrature::{decompose_cut_element, CutDecomposition};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone)]
pub struct SpaceOptions {
    pub classify: ClassifyOptions,
    pub rule: PlaneRule,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        SpaceOptions { classify: ClassifyOptions::default(), rule: PlaneRule::Rules }
    }
}

#[derive(Debug, Clone)]
pub struct GlobalIFESpace {
    pub mesh: CartesianMesh,
    pub cls: EntityClassification,
    pub geometry: Vec<InterfaceElementData>,
    pub bases: Vec<LocalIFEBasis>,
    pub decomps: Vec<CutDecomposition>,
    pub beta_minus: f64,
    pub beta_plus: f64,
    slot: Vec<u32>,
}

#[derive(Debug, Clone, Default)]
pub struct GeometrySummary {
    pub interface_elements: usize,
    pub case_counts: [usize; 5],
    pub max_angle_deg: f64,
    pub min_denominator: f64,
    pub max_gamma_delta: f64,
    pub min_gamma_delta: f64,
    /// Largest `h⁻¹‖δ‖_∞ − 7.43·γᵀδ`; nonpositive when the bound holds.
    pub max_delta_bound_residual: f64,
    pub snapped_nodes: usize,
    pub boundary_crossings: usize,
    pub cone_fallbacks: usize,
}

impl GlobalIFESpace {
    pub fn build(
        mesh: &CartesianMesh,
        ls: &dyn LevelSet,
        beta_minus: f64,
        beta_plus: f64,
        opts: &SpaceOptions,
    ) -> Result<Self> {
        let (cls, geometry) = analyze_interface(mesh, ls, &opts.classify, opts.rule)?;
        let bases = geometry
            .par_iter()
            .map(|d| LocalIFEBasis::build(d, beta_minus, beta_plus))
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let decomps = geometry
            .par_iter()
            .map(decompose_cut_element)
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let mut slot = vec![u32::MAX; mesh.num_elements()];
        for (i, d) in geometry.iter().enumerate() {
            slot[d.element] = i as u32;
        }
        Ok(GlobalIFESpace { mesh: mesh.clone(), cls, geometry, bases, decomps, beta_minus, beta_plus, slot })
    }

    pub fn num_dofs(&self) -> usize {
        self.mesh.num_nodes()
    }

    pub fn beta(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.beta_minus,
            Side::Plus => self.beta_plus,
        }
    }

    /// Index into `geometry`/`bases`/`decomps` for an interface element.
    pub fn interface_slot(&self, element: usize) -> Option<usize> {
        match self.slot[element] {
            u32::MAX => None,
            s => Some(s as usize),
        }
    }

    pub fn basis(&self, element: usize) -> Result<&LocalIFEBasis> {
        self.interface_slot(element).map(|s| &self.bases[s]).ok_or(Error::MissingBasis(element))
    }

    /// Side of a non-interface element.
    pub fn element_side(&self, element: usize) -> Option<Side> {
        match self.cls.element_kind[element] {
            ElementKind::NonInterface(s) => Some(s),
            ElementKind::Interface => None,
        }
    }

    /// The eight shape functions of an element restricted to one side.
    pub fn shape_polys(&self, element: usize, side: Side) -> [TrilinearPoly; 8] {
        match self.interface_slot(element) {
            Some(s) => match side {
                Side::Minus => self.bases[s].minus,
                Side::Plus => self.bases[s].plus,
            },
            None => {
                let o = self.mesh.element_origin(element);
                let h = self.mesh.spacing();
                std::array::from_fn(|i| TrilinearPoly::reference_basis(o, h, i))
            }
        }
    }

    pub fn local_coefficients(&self, element: usize, coeffs: &[f64]) -> [f64; 8] {
        self.mesh.element_nodes(element).map(|n| coeffs[n])
    }

    /// `Σ c_i φ_i` on one side of an element.
    pub fn element_function(&self, element: usize, coeffs: &[f64], side: Side) -> TrilinearPoly {
        let c = self.local_coefficients(element, coeffs);
        let polys = self.shape_polys(element, side);
        let mut p = TrilinearPoly::zero(polys[0].origin);
        for i in 0..8 {
            p = p.scaled_add(c[i], &polys[i]);
        }
        p
    }

    /// Value and gradient of a global IFE function; the side comes from the
    /// true interface.
    pub fn evaluate(&self, coeffs: &[f64], x: &Vec3, ls: &dyn LevelSet) -> (f64, Vec3) {
        let e = self.mesh.locate(x);
        let side = if ls.value(x) < 0.0 { Side::Minus } else { Side::Plus };
        let p = self.element_function(e, coeffs, side);
        (p.value(x), p.gradient(x))
    }

    pub fn summary(&self) -> GeometrySummary {
        let mut s = GeometrySummary {
            interface_elements: self.geometry.len(),
            min_denominator: f64::INFINITY,
            min_gamma_delta: f64::INFINITY,
            max_delta_bound_residual: f64::NEG_INFINITY,
            snapped_nodes: self.cls.node_snapped.iter().filter(|x| **x).count(),
            boundary_crossings: self.cls.boundary_crossings,
            ..Default::default()
        };
        for (d, b) in self.geometry.iter().zip(&self.bases) {
            s.case_counts[d.case as usize - 1] += 1;
            s.max_angle_deg = s.max_angle_deg.max(d.max_angle_deg());
            s.min_denominator = s.min_denominator.min(b.denominator());
            s.max_gamma_delta = s.max_gamma_delta.max(b.gamma_delta);
            s.min_gamma_delta = s.min_gamma_delta.min(b.gamma_delta);
            let h = (d.vertices[7] - d.vertices[0]).max();
            let dmax = b.delta.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            s.max_delta_bound_residual = s.max_delta_bound_residual.max(dmax / h - 7.43 * b.gamma_delta);
        }
        s.cone_fallbacks = self.decomps.iter().filter(|c| c.tets.iter().any(|t| t.sign < 0.0)).count();
        s
    }

    /// Element-wise numbering of the discontinuous counterpart of this space
    /// (eight independent coefficients per element).
    pub fn broken_dofs(&self) -> BrokenDofMap {
        BrokenDofMap { elements: self.mesh.num_elements() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BrokenDofMap {
    elements: usize,
}

impl BrokenDofMap {
    pub fn num_dofs(&self) -> usize {
        8 * self.elements
    }

    pub fn dof(&self, element: usize, local: usize) -> usize {
        8 * element + local
    }

    /// Element-wise coefficients of a continuous nodal vector.
    pub fn from_nodal(&self, mesh: &CartesianMesh, coeffs: &[f64]) -> Vec<f64> {
        (0..self.elements).flat_map(|e| mesh.element_nodes(e).map(|n| coeffs[n])).collect()
    }
}
