//! Level-set descriptions of the interface `Γ = {w = 0}` with `w < 0` on `Ω⁻`.

use crate::scalar::{Jet, Scalar};
use crate::Vec3;

pub trait LevelSet: Send + Sync {
    fn value(&self, x: &Vec3) -> f64;

    /// Gradient of the level set; central differences unless overridden.
    fn gradient(&self, x: &Vec3) -> Vec3 {
        let step = 1e-6 * (1.0 + x.norm());
        let mut g = Vec3::zeros();
        for a in 0..3 {
            let mut xp = *x;
            let mut xm = *x;
            xp[a] += step;
            xm[a] -= step;
            g[a] = (self.value(&xp) - self.value(&xm)) / (2.0 * step);
        }
        g
    }
}

/// Closure-backed level set, mostly for tests and ad-hoc geometries.
pub struct FnLevelSet<F>(pub F);

impl<F> LevelSet for FnLevelSet<F>
where
    F: Fn(&Vec3) -> f64 + Send + Sync,
{
    fn value(&self, x: &Vec3) -> f64 {
        (self.0)(x)
    }
}

/// Torus around the `x₁` axis: `(|X|² + R² − r²)² − 4R²(x₂² + x₃²)`; the
/// other two orientations permute the axes.
fn torus<S: Scalar>(x: [S; 3], axis: usize, major: f64, minor: f64) -> S {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let s = r2 + (major * major - minor * minor);
    let (a, b) = match axis {
        0 => (x[1], x[2]),
        1 => (x[0], x[2]),
        _ => (x[0], x[1]),
    };
    s * s - (a * a + b * b) * (4.0 * major * major)
}

/// Closed-form surfaces used by the built-in problems.
#[derive(Debug, Clone, PartialEq)]
pub enum Surface {
    /// `w = n·X − offset`.
    Plane { normal: [f64; 3], offset: f64 },
    /// `w = |X − c| − r`.
    Sphere { center: [f64; 3], radius: f64 },
    /// `w = k (w₁ w₂ w₃ − ρ)` with three orthogonal tori of radii `(R, r)`.
    Orthocircle { k: f64, rho: f64, major: f64, minor: f64 },
    /// `w = w₁ w₂` with `w₁ = |X − c|² − ρ²` and `w₂` a torus about `x₁`.
    SphereTorus { center: [f64; 3], rho: f64, major: f64, minor: f64 },
}

impl Surface {
    pub fn eval<S: Scalar>(&self, x: [S; 3]) -> S {
        match self {
            Surface::Plane { normal, offset } => {
                x[0] * normal[0] + x[1] * normal[1] + x[2] * normal[2] - *offset
            }
            Surface::Sphere { center, radius } => {
                let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
                (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() - *radius
            }
            Surface::Orthocircle { k, rho, major, minor } => {
                let p = torus(x, 0, *major, *minor)
                    * torus(x, 1, *major, *minor)
                    * torus(x, 2, *major, *minor);
                (p - *rho) * *k
            }
            Surface::SphereTorus { center, rho, major, minor } => {
                self.component(x, 0, center, *rho, *major, *minor)
                    * self.component(x, 1, center, *rho, *major, *minor)
            }
        }
    }

    fn component<S: Scalar>(
        &self,
        x: [S; 3],
        which: usize,
        center: &[f64; 3],
        rho: f64,
        major: f64,
        minor: f64,
    ) -> S {
        if which == 0 {
            let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
            d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - rho * rho
        } else {
            torus(x, 0, major, minor)
        }
    }

    /// Individual factors `(w₁, w₂)` of a [`Surface::SphereTorus`].
    pub fn sphere_torus_factors<S: Scalar>(&self, x: [S; 3]) -> Option<(S, S)> {
        match self {
            Surface::SphereTorus { center, rho, major, minor } => Some((
                self.component(x, 0, center, *rho, *major, *minor),
                self.component(x, 1, center, *rho, *major, *minor),
            )),
            _ => None,
        }
    }

    pub fn jet(&self, x: &Vec3) -> Jet {
        self.eval(Jet::variables([x[0], x[1], x[2]]))
    }
}

impl LevelSet for Surface {
    fn value(&self, x: &Vec3) -> f64 {
        self.eval([x[0], x[1], x[2]])
    }

    fn gradient(&self, x: &Vec3) -> Vec3 {
        let j = self.jet(x);
        Vec3::new(j.g[0], j.g[1], j.g[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_gradient_is_radial() {
        let s = Surface::Sphere { center: [0.0; 3], radius: 0.5 };
        let x = Vec3::new(0.3, -0.4, 1.2);
        let g = s.gradient(&x);
        assert!((g - x / x.norm()).norm() < 1e-14);
        assert!((s.value(&x) - (x.norm() - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn analytic_gradient_matches_default_fd() {
        let s = Surface::Orthocircle { k: 1e-3, rho: 0.15, major: 1.0, minor: 0.3 };
        let x = Vec3::new(0.21, 0.77, -0.35);
        let fd = FnLevelSet(|p: &Vec3| s.value(p)).gradient(&x);
        let g = s.gradient(&x);
        assert!((fd - g).norm() < 1e-8 * g.norm().max(1e-3));
    }
}
