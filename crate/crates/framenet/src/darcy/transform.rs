use crate::darcy::{ScalarField, TorusGrid};
use crate::error::{Error, Result};
use crate::hilbert::{xi_1d, TorusBasis};

/// Requires the grid to resolve every retained mode without aliasing.
pub fn check_resolution(basis: &TorusBasis, grid: &TorusGrid) -> Result<()> {
    if basis.d != grid.d {
        return Err(Error::Dimension { expected: grid.d, got: basis.d });
    }
    if 2 * basis.cutoff >= grid.n {
        return Err(Error::input(format!(
            "grid with {} points per axis cannot resolve modes up to cutoff {}",
            grid.n, basis.cutoff
        )));
    }
    Ok(())
}

/// `table[j][i] = xi_j(i / n)`.
fn table(max_index: usize, n: usize) -> Vec<Vec<f64>> {
    (0..=max_index).map(|j| (0..n).map(|i| xi_1d(j, i as f64 / n as f64)).collect()).collect()
}

fn mode_values(mode: &[usize], tab: &[Vec<f64>], grid: &TorusGrid) -> Vec<f64> {
    (0..grid.len())
        .map(|idx| grid.indices(idx).iter().zip(mode).map(|(&i, &j)| tab[j][i]).product())
        .collect()
}

/// L2 coefficients `<field, xi_k>` of a grid field, computed by the exact
/// trapezoidal quadrature.
pub fn field_to_xi(field: &ScalarField, basis: &TorusBasis) -> Result<Vec<f64>> {
    check_resolution(basis, &field.grid)?;
    let tab = table(basis.max_index(), field.grid.n);
    let n = field.grid.len() as f64;
    Ok(basis
        .modes
        .iter()
        .map(|mode| {
            mode_values(mode, &tab, &field.grid).iter().zip(&field.values).map(|(m, v)| m * v).sum::<f64>() / n
        })
        .collect())
}

/// Grid values of `sum_k coeffs[k] xi_k`.
pub fn xi_to_field(coeffs: &[f64], basis: &TorusBasis, grid: &TorusGrid) -> Result<ScalarField> {
    check_resolution(basis, grid)?;
    if coeffs.len() > basis.len() {
        return Err(Error::Dimension { expected: basis.len(), got: coeffs.len() });
    }
    let tab = table(basis.max_index(), grid.n);
    let mut values = vec![0.0; grid.len()];
    for (mode, c) in basis.modes.iter().zip(coeffs) {
        if *c == 0.0 {
            continue;
        }
        for (v, m) in values.iter_mut().zip(mode_values(mode, &tab, grid)) {
            *v += c * m;
        }
    }
    ScalarField::new(*grid, values)
}

/// Coordinates of a grid field in the shifted-space basis `psi_k`.
pub fn field_to_coords(field: &ScalarField, basis: &TorusBasis) -> Result<Vec<f64>> {
    let xi = field_to_xi(field, basis)?;
    Ok(xi.into_iter().enumerate().map(|(k, c)| c / basis.weight(k)).collect())
}

/// Grid values of `sum_k coords[k] psi_k`.
pub fn coords_to_field(coords: &[f64], basis: &TorusBasis, grid: &TorusGrid) -> Result<ScalarField> {
    let xi: Vec<f64> = coords.iter().enumerate().map(|(k, c)| c * basis.weight(k)).collect();
    xi_to_field(&xi, basis, grid)
}
