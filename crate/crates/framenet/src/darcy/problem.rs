use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::darcy::{coords_to_field, field_to_coords, solve_darcy, DarcySolution, ScalarField, TorusGrid};
use crate::erm::{torus_rate, TorusPipeline};
use crate::error::{Error, Result};
use crate::hilbert::{sample_uniform_cube, torus_basis, ScalingMap, TorusBasis};

/// Serializable description of a Darcy learning problem on the torus.
///
/// `r0` and `r` default to the values selected by the torus rate for the
/// smoothness `s`; `radius` defaults to the largest value for which the
/// worst-case coercivity bound holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DarcyConfig {
    pub d: usize,
    pub n_per_dim: usize,
    pub s: f64,
    pub t0: f64,
    pub tau2: f64,
    pub r0: Option<f64>,
    pub r: Option<f64>,
    pub abar: f64,
    pub a_min: f64,
    pub radius: Option<f64>,
    pub input_modes: usize,
    pub output_modes: usize,
    pub tol: f64,
}

impl Default for DarcyConfig {
    fn default() -> Self {
        Self {
            d: 2,
            n_per_dim: 32,
            s: 4.0,
            t0: 0.0,
            tau2: 0.25,
            r0: None,
            r: None,
            abar: 2.0,
            a_min: 0.5,
            radius: None,
            input_modes: 9,
            output_modes: 9,
            tol: 1e-10,
        }
    }
}

impl DarcyConfig {
    /// Resolved `(r0, r)`.
    pub fn exponents(&self) -> Result<(f64, f64)> {
        match (self.r0, self.r) {
            (Some(r0), Some(r)) => Ok((r0, r)),
            _ => {
                let rate = torus_rate(self.s, self.d, self.t0, self.tau2, TorusPipeline::L2)?;
                Ok((self.r0.unwrap_or(rate.r0), self.r.unwrap_or(rate.r)))
            }
        }
    }

    pub fn build(&self) -> Result<DarcyProblem> {
        let grid = TorusGrid::new(self.d, self.n_per_dim)?;
        if self.input_modes == 0 || self.output_modes == 0 {
            return Err(Error::input("mode counts must be positive"));
        }
        let (r0, r) = self.exponents()?;
        let needed = self.input_modes.max(self.output_modes);
        let mut cutoff = 1;
        while torus_basis(self.d, cutoff, 0.0)?.len() < needed {
            cutoff += 1;
        }
        let x_basis = torus_basis(self.d, cutoff, r0)?.truncate(self.input_modes)?;
        let y_basis = torus_basis(self.d, cutoff, self.t0)?.truncate(self.output_modes)?;
        let abar = ScalarField::constant(grid, self.abar);
        let f = default_source(grid);
        let bound = coercivity_sum(&x_basis, r);
        let radius = match self.radius {
            Some(radius) => radius,
            None => (self.abar - self.a_min) / bound,
        };
        let scaling = ScalingMap::new(radius, r, x_basis.theta.clone())?;
        DarcyProblem::new(grid, abar, self.a_min, f, x_basis, scaling, y_basis, self.tol)
    }
}

/// `sin(2 pi x_1) + sin(2 pi x_2)` (only the first term when `d = 1`).
pub(crate) fn default_source(grid: TorusGrid) -> ScalarField {
    grid.sample(|x| x.iter().take(2).map(|v| (2.0 * PI * v).sin()).sum())
}

/// `sum_k theta_k^r ||psi_k||_inf`, so that every coefficient in the cube of
/// radius `R` gives a field bounded by `R` times this sum.
fn coercivity_sum(basis: &TorusBasis, r: f64) -> f64 {
    basis.theta.values().iter().enumerate().map(|(k, t)| t.powf(r) * basis.psi_sup_norm(k)).sum()
}

/// Ground-truth operator mapping input coordinates `x` (in the shifted input
/// basis) to output coordinates of the solution `u` of
/// `-div((abar + a(x)) grad u) = f`.
#[derive(Clone, Debug)]
pub struct DarcyProblem {
    pub grid: TorusGrid,
    pub abar: ScalarField,
    pub a_min: f64,
    pub f: ScalarField,
    pub x_basis: TorusBasis,
    pub scaling: ScalingMap,
    pub y_basis: TorusBasis,
    pub tol: f64,
}

impl DarcyProblem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: TorusGrid,
        abar: ScalarField,
        a_min: f64,
        f: ScalarField,
        x_basis: TorusBasis,
        scaling: ScalingMap,
        y_basis: TorusBasis,
        tol: f64,
    ) -> Result<Self> {
        if abar.grid != grid || f.grid != grid {
            return Err(Error::input("fields must live on the problem grid"));
        }
        if scaling.len() != x_basis.len() {
            return Err(Error::Dimension { expected: x_basis.len(), got: scaling.len() });
        }
        crate::darcy::check_resolution(&x_basis, &grid)?;
        crate::darcy::check_resolution(&y_basis, &grid)?;
        if !(a_min > 0.0) {
            return Err(Error::input("a_min must be positive"));
        }
        let worst = scaling.radius * coercivity_sum(&x_basis, scaling.r);
        let slack = abar.min() - a_min;
        if worst > slack * (1.0 + 1e-12) {
            return Err(Error::Coercivity(format!(
                "radius {} allows perturbations of size {worst:.4e} but abar - a_min = {slack:.4e}",
                scaling.radius
            )));
        }
        Ok(Self { grid, abar, a_min, f, x_basis, scaling, y_basis, tol })
    }

    pub fn input_modes(&self) -> usize {
        self.x_basis.len()
    }

    pub fn output_modes(&self) -> usize {
        self.y_basis.len()
    }

    /// Total permeability `abar + a` for input coordinates `x`.
    pub fn permeability(&self, x: &[f64]) -> Result<ScalarField> {
        coords_to_field(x, &self.x_basis, &self.grid)?.add(&self.abar)
    }

    pub fn solve(&self, x: &[f64]) -> Result<DarcySolution> {
        let a = self.permeability(x)?;
        let a_min = a.min();
        if !(a_min > self.a_min) {
            return Err(Error::Coercivity(format!("permeability minimum {a_min:.4e} is below {}", self.a_min)));
        }
        solve_darcy(&a, &self.f, self.tol)
    }

    /// Output coordinates of the solution for input coordinates `x`.
    pub fn operator(&self, x: &[f64]) -> Result<Vec<f64>> {
        let sol = self.solve(x)?;
        field_to_coords(&sol.u, &self.y_basis)
    }

    /// The operator composed with the cube scaling, for `u` in `[-1, 1]^K`.
    pub fn operator_cube(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.operator(&self.scaling.unscale(u)?)
    }

    /// One draw `(u, x)` of the uniform cube point and its input coordinates.
    pub fn sample_input<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>)> {
        let u = sample_uniform_cube(self.input_modes(), rng);
        let x = self.scaling.unscale(&u)?;
        Ok((u, x))
    }
}
