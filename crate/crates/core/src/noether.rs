//! Reduced Noether current and its discrete divergence.
//!
//! The current density components coincide with the Euler–Lagrange form of
//! the reduced Lagrangian,
//!
//!   J^μ_α = Σ_{|J|=0}^{k−1} (−1)^{|J|} ∂^J( ∂l̂/∂A^α_{μ,J} ),
//!
//! computed per basis direction ξ = B_α (the full dual-valued current). The
//! conservation law is ∂_μ J^μ_α = 0 on critical fields. An overall constant
//! factor appearing in some derivations is dropped; conservation is
//! scale-invariant.

use std::sync::Arc;

use crate::connection::ReducedField;
use crate::ep::el_form_fields;
use crate::error::{Error, Result};
use crate::grid::{diff_axis, Grid, ScalarField};
use crate::lagrangian::LagrangianDescriptor;

/// Current density samples J^μ_α, node-major, μ-major within a node.
#[derive(Debug, Clone)]
pub struct CurrentField {
    pub grid: Arc<Grid>,
    pub n: usize,
    pub m: usize,
    pub data: Vec<f64>,
}

impl CurrentField {
    pub fn value(&self, flat: usize, mu: usize, alpha: usize) -> f64 {
        self.data[(flat * self.n + mu) * self.m + alpha]
    }

    /// J^μ_α as a scalar field.
    pub fn component(&self, mu: usize, alpha: usize) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            data: (0..self.grid.n_nodes())
                .map(|f| self.value(f, mu, alpha))
                .collect(),
        }
    }
}

/// Noether current of a reduced Lagrangian along σ.
pub fn noether_current(
    lagrangian: &LagrangianDescriptor,
    sigma: &ReducedField,
) -> Result<CurrentField> {
    let n = sigma.n();
    let m = sigma.algebra.dim();
    let grid = sigma.grid().clone();
    let el = el_form_fields(lagrangian, sigma)?;
    let mut data = vec![0.0; grid.n_nodes() * n * m];
    for mu in 0..n {
        for alpha in 0..m {
            let f = &el[mu * m + alpha];
            for flat in 0..grid.n_nodes() {
                data[(flat * n + mu) * m + alpha] = f.data[flat];
            }
        }
    }
    Ok(CurrentField { grid, n, m, data })
}

/// Discrete divergence ∂_μ J^μ_α, one scalar field per α.
pub fn divergence_defect(current: &CurrentField) -> Result<Vec<ScalarField>> {
    if current.grid.dim() != current.n {
        return Err(Error::Invalid(
            "current has wrong number of direction components".into(),
        ));
    }
    let mut out = Vec::with_capacity(current.m);
    for alpha in 0..current.m {
        let mut acc = ScalarField::zeros(current.grid.clone());
        for mu in 0..current.n {
            let d = diff_axis(&current.component(mu, alpha), mu);
            for (a, v) in acc.data.iter_mut().zip(&d.data) {
                *a += v;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LieAlgebra;
    use crate::connection::ReducedField;
    use crate::ep::{spline_lagrangian, spline_residual_k2, SplineParams};
    use crate::grid::AlgebraField;

    fn abelian_sigma(n_nodes: usize, f: impl Fn(f64) -> f64) -> ReducedField {
        let alg = LieAlgebra::named("abelian:1").unwrap();
        let grid = Grid::new(vec![(0.0, 1.0)], vec![n_nodes]).unwrap();
        let c = AlgebraField::from_fn(grid, 1, |x| vec![f(x[0])]);
        ReducedField::new(alg, vec![c]).unwrap()
    }

    #[test]
    fn quadratic_sigma_has_constant_current() {
        // l̂ = ½(σ′)², σ = t²: J¹ = −σ″ = −2, defect 0 at interior nodes
        let alg = LieAlgebra::named("abelian:1").unwrap();
        let sigma = abelian_sigma(17, |t| t * t);
        let params = SplineParams::new(vec![1.0], vec![0.0], 2).unwrap();
        let lag = spline_lagrangian(&alg, params).unwrap();
        let j = noether_current(&lag, &sigma).unwrap();
        let grid = sigma.grid().clone();
        for flat in 0..17 {
            if grid.is_interior(&[flat], 2) {
                assert!((j.value(flat, 0, 0) + 2.0).abs() < 1e-12);
            }
        }
        let defect = divergence_defect(&j).unwrap();
        for flat in 0..17 {
            if grid.is_interior(&[flat], 3) {
                assert!(defect[0].data[flat].abs() < 1e-11);
            }
        }
    }

    #[test]
    fn cubic_sigma_current_and_defect() {
        // σ = t³: J¹ = −6t, defect −6
        let alg = LieAlgebra::named("abelian:1").unwrap();
        let sigma = abelian_sigma(33, |t| t * t * t);
        let params = SplineParams::new(vec![1.0], vec![0.0], 2).unwrap();
        let lag = spline_lagrangian(&alg, params).unwrap();
        let j = noether_current(&lag, &sigma).unwrap();
        let grid = sigma.grid().clone();
        for flat in 0..33 {
            if grid.is_interior(&[flat], 2) {
                let t = grid.position(&[flat])[0];
                assert!((j.value(flat, 0, 0) + 6.0 * t).abs() < 1e-11);
            }
        }
        let defect = divergence_defect(&j).unwrap();
        for flat in 0..33 {
            if grid.is_interior(&[flat], 3) {
                assert!((defect[0].data[flat] + 6.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_current_for_critical_fiberwise_lagrangian() {
        // l̂ = ½τ‖σ‖² independent of jets, at σ = 0: J = 0
        let alg = LieAlgebra::named("so3").unwrap();
        let grid = Grid::new(vec![(0.0, 1.0)], vec![9]).unwrap();
        let c = AlgebraField::zeros(grid, 3);
        let sigma = ReducedField::new(alg.clone(), vec![c]).unwrap();
        let params = SplineParams::new(vec![1.0], vec![1.0], 1).unwrap();
        let lag = spline_lagrangian(&alg, params).unwrap();
        let j = noether_current(&lag, &sigma).unwrap();
        assert!(j.data.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn abelian_divergence_equals_minus_spline_residual() {
        // ∂_μ J^μ = −(spline residual) nodewise for abelian algebras
        let alg = LieAlgebra::named("abelian:1").unwrap();
        let sigma = abelian_sigma(33, |t| (2.0 * t).sin() * 0.4 + t * t);
        let params = SplineParams::new(vec![1.0], vec![0.7], 2).unwrap();
        let lag = spline_lagrangian(&alg, params.clone()).unwrap();
        let j = noether_current(&lag, &sigma).unwrap();
        let defect = divergence_defect(&j).unwrap();
        let res = spline_residual_k2(&sigma, &params).unwrap();
        for flat in 0..33 {
            assert!(
                (defect[0].data[flat] + res.data[flat]).abs() < 1e-10,
                "node {flat}: {} vs {}",
                defect[0].data[flat],
                -res.data[flat]
            );
        }
    }
}
