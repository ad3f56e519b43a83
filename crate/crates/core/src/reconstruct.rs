//! Rebuild a group-valued field from a flat reduced field, and quantify the
//! obstruction via discrete holonomy.
//!
//! Edge transport is the midpoint rule paired with the right logarithmic
//! derivative: ς(x + h e_μ) = exp(h·σ_μ(x + ½h e_μ))·ς(x), second-order
//! accurate. The reconstructed family over base values is ς_b = T(x)·b, so
//! two reconstructions differ by the constant ς_{b₂}(x)⁻¹ ς_{b₁}(x) = b₂⁻¹b₁.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{expm, logm, GroupElement};
use crate::connection::{flatness_report, ReducedField};
use crate::error::{Error, Result};
use crate::grid::GroupField;

/// Holonomy diagnostic: the worst plaquette.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HolonomyReport {
    pub max_defect: f64,
    pub node: Vec<usize>,
    pub axes: (usize, usize),
}

fn algebra_matrix(sigma: &ReducedField, coeffs: &DVector<f64>) -> Result<DMatrix<f64>> {
    let basis = sigma
        .algebra
        .matrix_basis()
        .ok_or(crate::error::Error::NoMatrixBasis)?;
    let d = basis[0].nrows();
    let mut out = DMatrix::zeros(d, d);
    for (alpha, b) in basis.iter().enumerate() {
        out += coeffs[alpha] * b;
    }
    Ok(out)
}

/// Midpoint-rule edge transport from `flat` one step up along `axis`.
fn edge_transport(sigma: &ReducedField, flat: usize, axis: usize) -> Result<DMatrix<f64>> {
    let grid = sigma.grid();
    let h = grid.spacing(axis);
    let mi = grid.multi_index(flat);
    let mut up = mi.clone();
    up[axis] += 1;
    let up_flat = grid.flat_index(&up);
    let mid = 0.5 * (sigma.coeffs(axis, flat) + sigma.coeffs(axis, up_flat));
    Ok(expm(&(algebra_matrix(sigma, &mid)? * h)))
}

/// Integrate a flat reduced field to a group-valued field with
/// ς(x₀) = `base` at the first node. Nodes are filled in row-major order,
/// each reached from its predecessor along the last nonzero axis.
///
/// Fails with `NotFlat` when the order-0 flatness defect exceeds `flat_tol`.
pub fn reconstruct(
    sigma: &ReducedField,
    base: &GroupElement,
    flat_tol: f64,
) -> Result<GroupField> {
    let report = flatness_report(sigma, 0, flat_tol)?;
    if !report.pass {
        return Err(Error::NotFlat {
            defect: report.max_defect,
            tol: flat_tol,
            node: report.node,
        });
    }
    let grid = sigma.grid().clone();
    let d = base.mat.nrows();
    let mut data = vec![DMatrix::<f64>::zeros(0, 0); grid.n_nodes()];
    data[0] = base.mat.clone();
    for flat in 1..grid.n_nodes() {
        let mi = grid.multi_index(flat);
        let axis = (0..grid.dim())
            .rev()
            .find(|&a| mi[a] > 0)
            .expect("nonzero node has a nonzero coordinate");
        let mut prev = mi.clone();
        prev[axis] -= 1;
        let prev_flat = grid.flat_index(&prev);
        let u = edge_transport(sigma, prev_flat, axis)?;
        data[flat] = u * &data[prev_flat];
    }
    debug_assert_eq!(data[0].nrows(), d);
    GroupField::new(grid, data)
}

/// Worst plaquette defect: for each node and axis pair, the coefficient
/// sup-norm of log of the loop product comparing the two edge-transport
/// paths around an elementary face. Zero for n = 1 grids.
pub fn holonomy_defect(sigma: &ReducedField) -> Result<HolonomyReport> {
    let grid = sigma.grid().clone();
    let n = grid.dim();
    if n < 2 {
        return Ok(HolonomyReport {
            max_defect: 0.0,
            node: vec![0; n],
            axes: (0, 0),
        });
    }
    let mut worst = HolonomyReport {
        max_defect: 0.0,
        node: vec![0; n],
        axes: (0, 1),
    };
    for flat in 0..grid.n_nodes() {
        let mi = grid.multi_index(flat);
        for mu in 0..n {
            for nu in (mu + 1)..n {
                if mi[mu] + 1 >= grid.size(mu) || mi[nu] + 1 >= grid.size(nu) {
                    continue;
                }
                let mut up_mu = mi.clone();
                up_mu[mu] += 1;
                let mut up_nu = mi.clone();
                up_nu[nu] += 1;
                // path A: along μ then ν; path B: along ν then μ
                let a = edge_transport(sigma, grid.flat_index(&up_mu), nu)?
                    * edge_transport(sigma, flat, mu)?;
                let b = edge_transport(sigma, grid.flat_index(&up_nu), mu)?
                    * edge_transport(sigma, flat, nu)?;
                let b_inv = b.try_inverse().ok_or_else(|| {
                    Error::LogDomain("singular plaquette transport".into())
                })?;
                let loop_log = logm(&(b_inv * a)).map_err(|e| match e {
                    Error::LogDomain(msg) => {
                        Error::LogDomain(format!("plaquette at {mi:?}: {msg}"))
                    }
                    other => other,
                })?;
                let defect = sigma.algebra.coefficients_of(&loop_log)?.amax();
                if defect > worst.max_defect {
                    worst = HolonomyReport {
                        max_defect: defect,
                        node: mi.clone(),
                        axes: (mu, nu),
                    };
                }
            }
        }
    }
    Ok(worst)
}
