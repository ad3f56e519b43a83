//! Reduction of group-valued fields to algebra-valued connection coefficients,
//! curvature, and flatness diagnostics.
//!
//! `reduce` produces the right logarithmic derivative σ_μ = (∂_μς)ς⁻¹ from
//! symmetrized log-transitions. A field of the form ς(x) then satisfies the
//! discrete Maurer–Cartan identity, so its curvature
//!
//!   F_{μν} = ½(∂_μσ_ν − ∂_νσ_μ − [σ_μ, σ_ν])
//!
//! vanishes to O(h²). The bracket enters with the sign matching the right
//! trivialization; left-trivialized conventions flip it.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{logm, LieAlgebra};
use crate::error::{Error, Result};
use crate::grid::{partial_algebra, AlgebraField, Grid, GroupField};
use crate::multi_index::{multi_indices, multinomial, MultiIndex};

/// The coordinates σ = σ_μ dx^μ of a reduced section: one algebra-valued
/// field per base axis, on a shared grid.
#[derive(Debug, Clone)]
pub struct ReducedField {
    pub algebra: Arc<LieAlgebra>,
    pub components: Vec<AlgebraField>,
}

impl ReducedField {
    pub fn new(algebra: Arc<LieAlgebra>, components: Vec<AlgebraField>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("reduced field needs n ≥ 1 components".into()));
        }
        let grid = components[0].grid.clone();
        if components.len() != grid.dim() {
            return Err(Error::Invalid(format!(
                "{} components for a {}-dimensional grid",
                components.len(),
                grid.dim()
            )));
        }
        for c in &components {
            if c.grid != grid {
                return Err(Error::GridMismatch);
            }
            if c.m != algebra.dim() {
                return Err(Error::DimensionMismatch {
                    expected: algebra.dim(),
                    got: c.m,
                });
            }
        }
        Ok(ReducedField {
            algebra,
            components,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.components[0].grid
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn coeffs(&self, mu: usize, flat: usize) -> DVector<f64> {
        DVector::from_column_slice(self.components[mu].coeffs(flat))
    }
}

/// Curvature components F_{μν}, μ < ν.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    pub algebra: Arc<LieAlgebra>,
    pub pairs: Vec<(usize, usize)>,
    pub fields: Vec<AlgebraField>,
}

impl CurvatureField {
    pub fn component(&self, mu: usize, nu: usize) -> Option<&AlgebraField> {
        self.pairs
            .iter()
            .position(|&(a, b)| (a, b) == (mu, nu))
            .map(|i| &self.fields[i])
    }
}

/// Flatness diagnostic: sup of |F^α_{μν,J}| over nodes and components for
/// |J| ≤ jet_order.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FlatnessReport {
    pub max_defect: f64,
    pub node: Vec<usize>,
    pub axes: (usize, usize),
    pub jet_index: Vec<usize>,
    pub jet_order: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Log of the transition ς(to)·ς(from)⁻¹ in basis coefficients.
fn transition_log(
    algebra: &LieAlgebra,
    field: &GroupField,
    from: usize,
    to: usize,
) -> Result<DVector<f64>> {
    let inv = field.data[from].clone().try_inverse().ok_or_else(|| {
        Error::LogDomain("singular group element in transition".to_string())
    })?;
    let t = &field.data[to] * inv;
    let l = logm(&t)?;
    algebra.coefficients_of(&l)
}

/// Per-axis edge logs E_i = log(ς_{i+1}·ς_i⁻¹), stored at the flat index of
/// the edge's left node (slots without a right neighbor stay zero).
pub(crate) fn edge_logs(
    algebra: &LieAlgebra,
    field: &GroupField,
    axis: usize,
) -> Result<Vec<f64>> {
    let grid = &field.grid;
    let m = algebra.dim();
    let mut out = vec![0.0; grid.n_nodes() * m];
    for flat in 0..grid.n_nodes() {
        let mi = grid.multi_index(flat);
        if mi[axis] + 1 < grid.size(axis) {
            let mut up = mi.clone();
            up[axis] += 1;
            let e = transition_log(algebra, field, flat, grid.flat_index(&up))?;
            out[flat * m..(flat + 1) * m].copy_from_slice(e.as_slice());
        }
    }
    Ok(out)
}

/// σ_μ at a node from edge logs: symmetrized in the interior,
/// (4·E_first − E_double)/(2h) at the boundary (both O(h²)).
pub(crate) fn sigma_from_edges(
    algebra: &LieAlgebra,
    field: &GroupField,
    axis: usize,
    edges: &[f64],
    flat: usize,
) -> Result<DVector<f64>> {
    let grid = &field.grid;
    let m = algebra.dim();
    let n_ax = grid.size(axis);
    let h = grid.spacing(axis);
    let mi = grid.multi_index(flat);
    let i = mi[axis];
    let edge = |off: isize| -> DVector<f64> {
        let mut q = mi.clone();
        q[axis] = (i as isize + off) as usize;
        let f = grid.flat_index(&q);
        DVector::from_column_slice(&edges[f * m..(f + 1) * m])
    };
    let node_at = |j: usize| -> usize {
        let mut q = mi.clone();
        q[axis] = j;
        grid.flat_index(&q)
    };
    if i > 0 && i + 1 < n_ax {
        Ok((edge(-1) + edge(0)) / (2.0 * h))
    } else if i == 0 {
        let dbl = transition_log(algebra, field, node_at(0), node_at(2))?;
        Ok((4.0 * edge(0) - dbl) / (2.0 * h))
    } else {
        let dbl = transition_log(algebra, field, node_at(n_ax - 3), node_at(n_ax - 1))?;
        Ok((4.0 * edge(-1) - dbl) / (2.0 * h))
    }
}

/// Reduce a group-valued field to σ = σ_μ dx^μ (right logarithmic
/// derivative, O(h²) accurate).
pub fn reduce(algebra: &Arc<LieAlgebra>, field: &GroupField) -> Result<ReducedField> {
    let grid = field.grid.clone();
    let m = algebra.dim();
    let mut components = Vec::with_capacity(grid.dim());
    for axis in 0..grid.dim() {
        let edges = edge_logs(algebra, field, axis)?;
        let mut data = vec![0.0; grid.n_nodes() * m];
        for flat in 0..grid.n_nodes() {
            let s = sigma_from_edges(algebra, field, axis, &edges, flat)?;
            data[flat * m..(flat + 1) * m].copy_from_slice(s.as_slice());
        }
        components.push(AlgebraField::new(grid.clone(), m, data)?);
    }
    ReducedField::new(algebra.clone(), components)
}

/// F_{μν} = ½(∂_μσ_ν − ∂_νσ_μ − [σ_μ, σ_ν]) for all μ < ν.
pub fn curvature(sigma: &ReducedField) -> Result<CurvatureField> {
    let grid = sigma.grid().clone();
    let n = sigma.n();
    let m = sigma.algebra.dim();
    let mut pairs = Vec::new();
    let mut fields = Vec::new();
    for mu in 0..n {
        for nu in (mu + 1)..n {
            let d_mu_s_nu = partial_algebra(&sigma.components[nu], &MultiIndex::unit(n, mu))?;
            let d_nu_s_mu = partial_algebra(&sigma.components[mu], &MultiIndex::unit(n, nu))?;
            let mut data = vec![0.0; grid.n_nodes() * m];
            for flat in 0..grid.n_nodes() {
                let br = sigma
                    .algebra
                    .bracket(&sigma.coeffs(mu, flat), &sigma.coeffs(nu, flat))?;
                for alpha in 0..m {
                    data[flat * m + alpha] = 0.5
                        * (d_mu_s_nu.data[flat * m + alpha]
                            - d_nu_s_mu.data[flat * m + alpha]
                            - br[alpha]);
                }
            }
            pairs.push((mu, nu));
            fields.push(AlgebraField::new(grid.clone(), m, data)?);
        }
    }
    Ok(CurvatureField {
        algebra: sigma.algebra.clone(),
        pairs,
        fields,
    })
}

/// Jet-prolonged flatness defect: sup over nodes, pairs μ<ν, |J| ≤ jet_order
/// and components of
///
///   F^α_{μν,J} = ½(∂^{J+1_μ}σ^α_ν − ∂^{J+1_ν}σ^α_μ
///                  − Σ_{I≤J} binom(J,I) [∂^Iσ_μ, ∂^{J−I}σ_ν]^α),
///
/// compared against `tolerance`.
pub fn flatness_report(
    sigma: &ReducedField,
    jet_order: usize,
    tolerance: f64,
) -> Result<FlatnessReport> {
    let grid = sigma.grid().clone();
    let n = sigma.n();
    let m = sigma.algebra.dim();
    let mut worst = (0.0f64, vec![0usize; grid.dim()], (0usize, 0usize), MultiIndex::zero(n));

    // cache ∂^I σ_μ for all |I| ≤ jet_order + 1
    let idx_all = multi_indices(n, jet_order + 1);
    let mut deriv: Vec<Vec<AlgebraField>> = Vec::with_capacity(n);
    for mu in 0..n {
        let mut per = Vec::with_capacity(idx_all.len());
        for j in &idx_all {
            per.push(partial_algebra(&sigma.components[mu], j)?);
        }
        deriv.push(per);
    }
    let rank = |j: &MultiIndex| idx_all.iter().position(|x| x == j).unwrap();

    for j in multi_indices(n, jet_order) {
        for mu in 0..n {
            for nu in (mu + 1)..n {
                let d_mu = &deriv[nu][rank(&j.plus_unit(mu))];
                let d_nu = &deriv[mu][rank(&j.plus_unit(nu))];
                // bracket sum Σ_{I≤J} binom(J,I) [∂^I σ_μ, ∂^{J−I} σ_ν]
                let subs = j.sub_indices();
                for flat in 0..grid.n_nodes() {
                    let mut br_sum = DVector::zeros(m);
                    for i_idx in &subs {
                        let w = multinomial(&j, i_idx)? as f64;
                        let a = DVector::from_column_slice(
                            deriv[mu][rank(i_idx)].coeffs(flat),
                        );
                        let b = DVector::from_column_slice(
                            deriv[nu][rank(&j.sub(i_idx)?)].coeffs(flat),
                        );
                        br_sum += w * sigma.algebra.bracket(&a, &b)?;
                    }
                    for alpha in 0..m {
                        let f = 0.5
                            * (d_mu.data[flat * m + alpha]
                                - d_nu.data[flat * m + alpha]
                                - br_sum[alpha]);
                        if f.abs() > worst.0 {
                            worst = (
                                f.abs(),
                                grid.multi_index(flat),
                                (mu, nu),
                                j.clone(),
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(FlatnessReport {
        max_defect: worst.0,
        node: worst.1,
        axes: worst.2,
        jet_index: worst.3.entries().to_vec(),
        jet_order,
        tolerance,
        pass: worst.0 <= tolerance,
    })
}

/// Group field ς(x) = exp(x¹ξ)·exp(x²η)·… (one exponential factor per axis).
pub fn exponential_product_field(
    algebra: &Arc<LieAlgebra>,
    grid: Arc<Grid>,
    directions: &[DVector<f64>],
) -> Result<GroupField> {
    let d = algebra.matrix_dim().ok_or(Error::NoMatrixBasis)?;
    let mut data = Vec::with_capacity(grid.n_nodes());
    for flat in 0..grid.n_nodes() {
        let x = grid.position(&grid.multi_index(flat));
        let mut g = DMatrix::identity(d, d);
        for (axis, dir) in directions.iter().enumerate() {
            g *= algebra.exp(&(dir.clone() * x[axis]))?.mat;
        }
        data.push(g);
    }
    GroupField::new(grid, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraVector;
    use crate::grid::Grid;

    fn e(i: usize) -> AlgebraVector {
        AlgebraVector::from_fn(3, |k, _| if k == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn reduce_one_parameter_subgroup_is_exact() {
        let alg = LieAlgebra::named("so3").unwrap();
        let grid = Grid::new(vec![(0.0, 1.0), (0.0, 1.0)], vec![9, 7]).unwrap();
        let xi = AlgebraVector::from_row_slice(&[0.4, -0.1, 0.8]);
        let field =
            exponential_product_field(&alg, grid.clone(), &[xi.clone(), AlgebraVector::zeros(3)])
                .unwrap();
        let sigma = reduce(&alg, &field).unwrap();
        for flat in 0..grid.n_nodes() {
            let s0 = sigma.coeffs(0, flat);
            let s1 = sigma.coeffs(1, flat);
            assert!((s0 - &xi).amax() < 1e-10);
            assert!(s1.amax() < 1e-10);
        }
    }

    #[test]
    fn reduce_abelian_is_gradient() {
        let alg = LieAlgebra::named("abelian:1").unwrap();
        let grid = Grid::new(vec![(0.0, 1.0)], vec![33]).unwrap();
        let phi = |x: f64| (2.0 * x).sin() * 0.3;
        let data = (0..33)
            .map(|i| {
                let x = grid.position(&[i])[0];
                DMatrix::from_row_slice(1, 1, &[phi(x).exp()])
            })
            .collect();
        let field = GroupField::new(grid.clone(), data).unwrap();
        let sigma = reduce(&alg, &field).unwrap();
        for i in 0..33 {
            let x = grid.position(&[i])[0];
            let want = 0.6 * (2.0 * x).cos();
            assert!(
                (sigma.coeffs(0, i)[0] - want).abs() < 2e-3,
                "node {i}: {} vs {want}",
                sigma.coeffs(0, i)[0]
            );
        }
    }

    #[test]
    fn reduce_constant_field_is_zero() {
        let alg = LieAlgebra::named("se2").unwrap();
        let grid = Grid::new(vec![(0.0, 1.0)], vec![9]).unwrap();
        let g = alg.exp(&AlgebraVector::from_row_slice(&[0.3, 1.0, -0.5])).unwrap();
        let field = GroupField::constant(grid, g.mat);
        let sigma = reduce(&alg, &field).unwrap();
        assert!(sigma.components[0].data.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn curvature_abelian_examples() {
        let alg = LieAlgebra::named("abelian:1").unwrap();
        let grid = Grid::new(vec![(0.0, 1.0), (0.0, 1.0)], vec![9, 9]).unwrap();
        // σ_1 = x², σ_2 = x¹ → F = 0 exactly at interior nodes
        let s1 = AlgebraField::from_fn(grid.clone(), 1, |x| vec![x[1]]);
        let s2 = AlgebraField::from_fn(grid.clone(), 1, |x| vec![x[0]]);
        let sigma = ReducedField::new(alg.clone(), vec![s1, s2]).unwrap();
        let f = curvature(&sigma).unwrap();
        for flat in 0..grid.n_nodes() {
            if grid.is_interior(&grid.multi_index(flat), 1) {
                assert!(f.fields[0].data[flat].abs() < 1e-13);
            }
        }
        // σ_1 = 0, σ_2 = x¹ → F = ½
        let s1 = AlgebraField::zeros(grid.clone(), 1);
        let s2 = AlgebraField::from_fn(grid.clone(), 1, |x| vec![x[0]]);
        let sigma = ReducedField::new(alg, vec![s1, s2]).unwrap();
        let f = curvature(&sigma).unwrap();
        for flat in 0..grid.n_nodes() {
            if grid.is_interior(&grid.multi_index(flat), 1) {
                assert!((f.fields[0].data[flat] - 0.5).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn curvature_constant_so3_pair() {
        // constant σ = (e1, e2): F_12 = −½ e3 in the right trivialization
        let alg = LieAlgebra::named("so3").unwrap();
        let grid = Grid::new(vec![(0.0, 1.0), (0.0, 1.0)], vec![7, 7]).unwrap();
        let s1 = AlgebraField::from_fn(grid.clone(), 3, |_| vec![1.0, 0.0, 0.0]);
        let s2 = AlgebraField::from_fn(grid.clone(), 3, |_| vec![0.0, 1.0, 0.0]);
        let sigma = ReducedField::new(alg, vec![s1, s2]).unwrap();
        let f = curvature(&sigma).unwrap();
        for flat in 0..grid.n_nodes() {
            let c = f.fields[0].coeffs(flat);
            assert!((c[2] + 0.5).abs() < 1e-14);
            assert!(c[0].abs() < 1e-14 && c[1].abs() < 1e-14);
        }
        // the defect is 0.5 at every node and flatness fails
        let sigma2 = ReducedField::new(
            LieAlgebra::named("so3").unwrap(),
            vec![
                AlgebraField::from_fn(grid.clone(), 3, |_| vec![1.0, 0.0, 0.0]),
                AlgebraField::from_fn(grid, 3, |_| vec![0.0, 1.0, 0.0]),
            ],
        )
        .unwrap();
        let report = flatness_report(&sigma2, 0, 1e-6).unwrap();
        assert!(!report.pass);
        assert!((report.max_defect - 0.5).abs() < 1e-12);
    }

    #[test]
    fn holonomic_fields_are_flat_to_discretization() {
        let alg = LieAlgebra::named("so3").unwrap();
        let xi = AlgebraVector::from_row_slice(&[0.3, -0.2, 0.5]);
        let eta = AlgebraVector::from_row_slice(&[-0.4, 0.1, 0.2]);
        let mut defects = Vec::new();
        for &n in &[9usize, 17, 33] {
            let grid = Grid::new(vec![(0.0, 1.0), (0.0, 1.0)], vec![n, n]).unwrap();
            let field =
                exponential_product_field(&alg, grid, &[xi.clone(), eta.clone()]).unwrap();
            let sigma = reduce(&alg, &field).unwrap();
            let report = flatness_report(&sigma, 0, 1.0).unwrap();
            defects.push(report.max_defect);
        }
        let slope = (defects[0] / defects[2]).log2() / 2.0;
        assert!(
            slope >= 1.9,
            "flatness defect slope {slope}, defects {defects:?}"
        );
    }

    #[test]
    fn abelian_constant_sigma_flat_exactly() {
        let alg = LieAlgebra::named("abelian:2").unwrap();
        let grid = Grid::new(vec![(0.0, 1.0), (0.0, 1.0)], vec![7, 7]).unwrap();
        let s1 = AlgebraField::from_fn(grid.clone(), 2, |_| vec![0.7, -0.2]);
        let s2 = AlgebraField::from_fn(grid, 2, |_| vec![0.1, 0.4]);
        let sigma = ReducedField::new(alg, vec![s1, s2]).unwrap();
        let report = flatness_report(&sigma, 0, 1e-14).unwrap();
        assert!(report.pass);
        assert_eq!(report.max_defect, 0.0);
    }

    #[test]
    fn jet_prolonged_flatness_matches_partial_for_abelian() {
        // abelian: F_{μν,J} = ∂^J F_{μν} exactly (brackets vanish)
        let alg = LieAlgebra::named("abelian:1").unwrap();
        let grid = Grid::new(vec![(0.0, 1.0), (0.0, 1.0)], vec![9, 9]).unwrap();
        let s1 = AlgebraField::from_fn(grid.clone(), 1, |x| vec![x[1] * x[1]]);
        let s2 = AlgebraField::zeros(grid.clone(), 1);
        let sigma = ReducedField::new(alg, vec![s1, s2]).unwrap();
        // F_12 = ½(0 − 2x²) = −x²; ∂_{(0,1)}F = −1; defect with |J| ≤ 1 is
        // attained there
        let report = flatness_report(&sigma, 1, 1e9).unwrap();
        let f = curvature(&sigma).unwrap();
        let df = partial_algebra(&f.fields[0], &MultiIndex::new(vec![0, 1])).unwrap();
        let mut want: f64 = 0.0;
        for flat in 0..grid.n_nodes() {
            want = want.max(f.fields[0].data[flat].abs());
            want = want.max(df.data[flat].abs());
        }
        assert!((report.max_defect - want).abs() < 1e-12);
    }
}
