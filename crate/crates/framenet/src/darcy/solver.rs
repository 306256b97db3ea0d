use crate::darcy::{ScalarField, Spectral};
use crate::error::{Error, Result};

/// Default relative residual tolerance of the conjugate-gradient solver.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Mean-zero solution of the periodic Darcy problem with solver diagnostics.
#[derive(Clone, Debug)]
pub struct DarcySolution {
    pub u: ScalarField,
    pub iterations: usize,
    /// Final residual norm relative to the projected right-hand side.
    pub relative_residual: f64,
}

fn check_pair(a: &ScalarField, f: &ScalarField) -> Result<()> {
    if a.grid != f.grid {
        return Err(Error::input("permeability and source live on different grids"));
    }
    Ok(())
}

fn apply_operator(sp: &Spectral, a: &[f64], u: &[f64]) -> Vec<f64> {
    let mut flux = sp.gradient(u);
    for f in &mut flux {
        for (v, ai) in f.iter_mut().zip(a) {
            *v *= ai;
        }
    }
    sp.divergence(&flux).into_iter().map(|v| -v).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `-div(a grad u) = f` for mean-zero `u` with Fourier-preconditioned
/// conjugate gradients.
///
/// `a` is the total permeability and must be strictly positive. `f` must have
/// zero mean. Components of `f` in the kernel of the discrete gradient (the
/// pure Nyquist modes) are discarded.
pub fn solve_darcy(a: &ScalarField, f: &ScalarField, tol: f64) -> Result<DarcySolution> {
    check_pair(a, f)?;
    let a_min = a.min();
    if !(a_min > 0.0) {
        return Err(Error::Coercivity(format!("permeability minimum {a_min:.3e} is not positive")));
    }
    let f_mean = f.mean();
    let f_scale = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if f_mean.abs() > 1e-10 * f_scale {
        return Err(Error::input(format!("source must have zero mean, got {f_mean:.3e}")));
    }
    if !(tol > 0.0) {
        return Err(Error::input("solver tolerance must be positive"));
    }
    let grid = a.grid;
    let sp = Spectral::new(grid);
    let b = sp.project(&f.values);
    let b_norm = dot(&b, &b).sqrt();
    let mut u = vec![0.0; grid.len()];
    if b_norm == 0.0 {
        return Ok(DarcySolution { u: ScalarField::new(grid, u)?, iterations: 0, relative_residual: 0.0 });
    }
    let a_mean = a.mean();
    let precondition = |r: &[f64]| sp.inverse_laplacian(r, a_mean);
    let mut r = b.clone();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let max_iter = 10 * grid.len();
    for it in 1..=max_iter {
        let ap = apply_operator(&sp, &a.values, &p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Solver(format!("operator lost positivity at iteration {it}")));
        }
        let alpha = rz / pap;
        for i in 0..u.len() {
            u[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = dot(&r, &r).sqrt() / b_norm;
        if rel <= tol {
            let u = sp.project(&u);
            return Ok(DarcySolution { u: ScalarField::new(grid, u)?, iterations: it, relative_residual: rel });
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.len() {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver(format!("conjugate gradients did not reach {tol:.1e} in {max_iter} iterations")))
}

/// Source `-div(a grad u)` for a prescribed solution, with its mean removed.
pub fn manufactured_rhs(a: &ScalarField, u: &ScalarField) -> Result<ScalarField> {
    check_pair(a, u)?;
    let sp = Spectral::new(a.grid);
    let mut f = apply_operator(&sp, &a.values, &u.values);
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    f.iter_mut().for_each(|v| *v -= mean);
    ScalarField::new(a.grid, f)
}

/// Energy `int a |grad u|^2` and work `int f u` on the unit torus.
///
/// For a converged solution both numbers agree up to the solver tolerance.
pub fn energy(a: &ScalarField, u: &ScalarField, f: &ScalarField) -> Result<(f64, f64)> {
    check_pair(a, u)?;
    check_pair(a, f)?;
    let sp = Spectral::new(a.grid);
    let grad = sp.gradient(&u.values);
    let n = a.values.len() as f64;
    let e = (0..a.values.len())
        .map(|i| a.values[i] * grad.iter().map(|g| g[i] * g[i]).sum::<f64>())
        .sum::<f64>()
        / n;
    Ok((e, f.dot(u)))
}
