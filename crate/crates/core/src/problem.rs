//! Benchmark interface problems with closed-form solutions.

use std::f64::consts::PI;

use crate::classify::Side;
use crate::levelset::{LevelSet, Surface};
use crate::scalar::{Jet, Scalar};
use crate::{Error, Result, Vec3};

/// Exact solutions, written once over [`Scalar`].
#[derive(Debug, Clone, PartialEq)]
pub enum ExactSolution {
    /// `u^s = r₀|X|⁵/β^s`, plus `r₀⁶(1/β⁻ − 1/β⁺)` on Ω⁺.
    Sphere { r0: f64 },
    /// `u^s = w/β^s` for the problem's own level set.
    LevelSetOverBeta,
    /// `u^s = w/β^s + t·X`; with `w` affine and `t ⟂ ∇w` this is piecewise
    /// linear and satisfies both jump conditions.
    PlanePatch { tangent: [f64; 3] },
}

#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    pub name: String,
    pub surface: Surface,
    pub beta_minus: f64,
    pub beta_plus: f64,
    pub exact: ExactSolution,
    /// Interpretation notes echoed to the run log.
    pub notes: Vec<String>,
}

impl BenchmarkProblem {
    pub fn beta(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.beta_minus,
            Side::Plus => self.beta_plus,
        }
    }

    pub fn side_of(&self, x: &Vec3) -> Side {
        if self.surface.value(x) < 0.0 { Side::Minus } else { Side::Plus }
    }

    pub fn eval<S: Scalar>(&self, x: [S; 3], side: Side) -> S {
        let b = self.beta(side);
        match &self.exact {
            ExactSolution::Sphere { r0 } => {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                let r5 = r2 * r2 * r2.sqrt();
                let base = r5 * (*r0 / b);
                match side {
                    Side::Minus => base,
                    Side::Plus => base + r0.powi(6) * (1.0 / self.beta_minus - 1.0 / self.beta_plus),
                }
            }
            ExactSolution::LevelSetOverBeta => self.surface.eval(x) * (1.0 / b),
            ExactSolution::PlanePatch { tangent } => {
                self.surface.eval(x) * (1.0 / b) + x[0] * tangent[0] + x[1] * tangent[1] + x[2] * tangent[2]
            }
        }
    }

    pub fn u(&self, x: &Vec3, side: Side) -> f64 {
        self.eval([x[0], x[1], x[2]], side)
    }

    pub fn jet(&self, x: &Vec3, side: Side) -> Jet {
        self.eval(Jet::variables([x[0], x[1], x[2]]), side)
    }

    pub fn grad(&self, x: &Vec3, side: Side) -> Vec3 {
        let j = self.jet(x, side);
        Vec3::new(j.g[0], j.g[1], j.g[2])
    }

    /// `f = −∇·(β∇u)` on the given side.
    pub fn f(&self, x: &Vec3, side: Side) -> f64 {
        match &self.exact {
            // closed form: −30 r₀ |X|³
            ExactSolution::Sphere { r0 } => -30.0 * r0 * x.norm().powi(3),
            _ => -self.beta(side) * self.jet(x, side).laplacian(),
        }
    }

    /// Boundary data from the exact solution on the node's side.
    pub fn g(&self, x: &Vec3, side: Side) -> f64 {
        self.u(x, side)
    }
}

pub const PROBLEM_NAMES: [&str; 3] = ["sphere", "orthocircle", "torus_sphere"];

pub fn builtin_problem(name: &str, beta_minus: f64, beta_plus: f64) -> Result<BenchmarkProblem> {
    let (surface, exact, notes) = match name {
        "sphere" => {
            let r0 = PI / 6.0;
            (Surface::Sphere { center: [0.0; 3], radius: r0 }, ExactSolution::Sphere { r0 }, vec![])
        }
        "orthocircle" => (
            Surface::Orthocircle { k: 1e-3, rho: 0.15, major: 1.0, minor: 0.3 },
            ExactSolution::LevelSetOverBeta,
            vec!["the orthocircle tubes extend past the box; interface faces on the boundary are allowed".into()],
        ),
        "torus_sphere" => (
            Surface::SphereTorus { center: [0.3, 0.0, 0.0], rho: 0.5, major: 1.0, minor: 0.3 },
            ExactSolution::LevelSetOverBeta,
            vec![
                "interpretation: u^s = w1*w2/beta^s with w1 the sphere and w2 the torus level set".into(),
                "interpretation: beta- applies where w1*w2 < 0 (inside the sphere or the torus), beta+ elsewhere"
                    .into(),
                "the torus tube extends past the box; interface faces on the boundary are allowed".into(),
            ],
        ),
        other => return Err(Error::UnknownProblem(other.to_string())),
    };
    Ok(BenchmarkProblem { name: name.to_string(), surface, beta_minus, beta_plus, exact, notes })
}

/// Planar interface `n·X = c` with the piecewise-linear exact solution.
pub fn plane_patch(normal: [f64; 3], offset: f64, beta_minus: f64, beta_plus: f64) -> BenchmarkProblem {
    let n = Vec3::from(normal);
    // a tangent direction with non-trivial components
    let mut t = Vec3::new(0.3, -0.7, 0.5);
    t -= n * (t.dot(&n) / n.norm_squared());
    BenchmarkProblem {
        name: "plane".into(),
        surface: Surface::Plane { normal, offset },
        beta_minus,
        beta_plus,
        exact: ExactSolution::PlanePatch { tangent: [t.x, t.y, t.z] },
        notes: vec![],
    }
}

/// Sphere of arbitrary radius and center with `u^s = w/β^s`.
pub fn custom_sphere(center: [f64; 3], radius: f64, beta_minus: f64, beta_plus: f64) -> BenchmarkProblem {
    BenchmarkProblem {
        name: "custom_sphere".into(),
        surface: Surface::Sphere { center, radius },
        beta_minus,
        beta_plus,
        exact: ExactSolution::LevelSetOverBeta,
        notes: vec![],
    }
}
