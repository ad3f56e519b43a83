//! Reduced (Euler–Poincaré) field equations.
//!
//! `ep_general` evaluates, for a black-box reduced Lagrangian l̂ of order k,
//! the dual-coefficient residual
//!
//!   R_α = Σ_μ [ ∂_μ E^μ_α + c^γ_{βα} σ^β_μ E^μ_γ ],
//!   E^μ_α = Σ_{|J|≤k−1} (−1)^{|J|} ∂^J( ∂l̂/∂A^α_{μ,J} ∘ j^{k−1}σ ),
//!
//! the divergence-minus-coadjoint form taken in the right trivialization
//! σ = (∂ς)ς⁻¹. `spline_residual_k2` is the closed k=2 spline/elastica form;
//! as algebra-valued fields the two are related by
//!
//!   spline_residual = −♯(ep_general)     (see the sign-convention tags).
//!
//! The coadjoint term carries the opposite sign in left-trivialized
//! conventions; the sign here is the one whose zero set matches critical
//! points of the action on group fields with σ the right logarithmic
//! derivative.

use std::sync::Arc;

use nalgebra::DVector;

use crate::algebra::LieAlgebra;
use crate::connection::ReducedField;
use crate::dual::{Dual, Scalar};
use crate::error::{Error, Result};
use crate::euler_lagrange::{coefficient_fields, jet_tables};
use crate::grid::{diff_axis, partial_algebra, AlgebraField, ScalarField};
use crate::lagrangian::{DerivStrategy, JetFunction, JetLayout, LagrangianDescriptor};
use crate::multi_index::MultiIndex;

/// Sign convention tag of `ep_general`: dual components of the
/// divergence-minus-coadjoint Euler–Lagrange form.
pub const EP_GENERAL_SIGN_CONVENTION: &str = "euler-lagrange-dual";
/// Sign convention tag of `spline_residual_k2`/`spline_residual_biinvariant`:
/// sharped and negated relative to `ep_general`, matching the printed form of
/// the spline field equations.
pub const SPLINE_SIGN_CONVENTION: &str = "negated-sharp-of-euler-lagrange-dual";

/// Cost weights of the spline/elastica Lagrangian
/// l̂ = ½ Σ_μ κ^μ ‖ξ_μ^{k−1}‖² + ½ Σ_μ τ^μ ‖σ_μ‖².
#[derive(Debug, Clone)]
pub struct SplineParams {
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub order: usize,
}

impl SplineParams {
    pub fn new(kappa: Vec<f64>, tau: Vec<f64>, order: usize) -> Result<Self> {
        if kappa.len() != tau.len() {
            return Err(Error::DimensionMismatch {
                expected: kappa.len(),
                got: tau.len(),
            });
        }
        if order < 1 {
            return Err(Error::Invalid("spline order must be ≥ 1".into()));
        }
        if kappa.iter().all(|&k| k == 0.0) {
            return Err(Error::Invalid("at least one κ^μ must be nonzero".into()));
        }
        Ok(SplineParams { kappa, tau, order })
    }

    pub fn n(&self) -> usize {
        self.kappa.len()
    }
}

/// ∂l̂/∂A^α_{μ,J} along the (k−1)-jet of σ, one scalar field per layout slot.
#[derive(Debug, Clone)]
pub struct JetPartialTable {
    pub layout: JetLayout,
    pub m: usize,
    pub fields: Vec<ScalarField>,
}

impl JetPartialTable {
    pub fn field(&self, mu: usize, alpha: usize, rank: usize) -> &ScalarField {
        &self.fields[self.layout.slot_connection(self.m, mu, alpha, rank)]
    }
}

fn sigma_component_fields(sigma: &ReducedField) -> Vec<ScalarField> {
    let m = sigma.algebra.dim();
    let mut fields = Vec::with_capacity(sigma.n() * m);
    for mu in 0..sigma.n() {
        for alpha in 0..m {
            fields.push(sigma.components[mu].component(alpha));
        }
    }
    fields
}

/// Assemble jet coordinates A^α_{μ,J} = ∂^J σ^α_μ and differentiate l̂ with
/// respect to each of them.
pub fn jet_partials(
    lagrangian: &LagrangianDescriptor,
    sigma: &ReducedField,
) -> Result<JetPartialTable> {
    let m = sigma.algebra.dim();
    let fields = sigma_component_fields(sigma);
    let tables = jet_tables(&fields, &lagrangian.layout)?;
    let coeffs = coefficient_fields(lagrangian, &tables)?;
    Ok(JetPartialTable {
        layout: lagrangian.layout.clone(),
        m,
        fields: coeffs,
    })
}

/// The Euler–Lagrange form components E^μ_α = Σ_J (−1)^{|J|} ∂^J(P^J_{μ,α})
/// of the reduced Lagrangian, μ-major. These are also the Noether current
/// density components.
pub fn el_form_fields(
    lagrangian: &LagrangianDescriptor,
    sigma: &ReducedField,
) -> Result<Vec<ScalarField>> {
    let partials = jet_partials(lagrangian, sigma)?;
    let grid = sigma.grid().clone();
    let m = sigma.algebra.dim();
    let mut out = Vec::with_capacity(sigma.n() * m);
    for mu in 0..sigma.n() {
        for alpha in 0..m {
            let mut acc = ScalarField::zeros(grid.clone());
            for (rank, j) in partials.layout.indices.iter().enumerate() {
                let term = crate::grid::partial(partials.field(mu, alpha, rank), j)?;
                let sign = if j.order() % 2 == 0 { 1.0 } else { -1.0 };
                for (a, t) in acc.data.iter_mut().zip(&term.data) {
                    *a += sign * t;
                }
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// General Euler–Poincaré residual for a black-box reduced Lagrangian;
/// returns the dual components R_α as scalar fields.
pub fn ep_general(
    lagrangian: &LagrangianDescriptor,
    sigma: &ReducedField,
) -> Result<Vec<ScalarField>> {
    let n = sigma.n();
    let m = sigma.algebra.dim();
    let grid = sigma.grid().clone();
    let el = el_form_fields(lagrangian, sigma)?;
    let mut out = vec![ScalarField::zeros(grid.clone()); m];
    for mu in 0..n {
        // divergence part ∂_μ E^μ_α
        for alpha in 0..m {
            let d = diff_axis(&el[mu * m + alpha], mu);
            for (o, v) in out[alpha].data.iter_mut().zip(&d.data) {
                *o += v;
            }
        }
        // coadjoint part c^γ_{βα} σ^β_μ E^μ_γ
        for flat in 0..grid.n_nodes() {
            let s = sigma.coeffs(mu, flat);
            for alpha in 0..m {
                let mut acc = 0.0;
                for gamma in 0..m {
                    let e = el[mu * m + gamma].data[flat];
                    if e != 0.0 {
                        for beta in 0..m {
                            acc += sigma.algebra.struct_const(gamma, beta, alpha) * s[beta] * e;
                        }
                    }
                }
                out[alpha].data[flat] += acc;
            }
        }
    }
    Ok(out)
}

/// Interior margin at which `ep_general` is free of one-sided stencils.
pub fn ep_interior_margin(order: usize) -> usize {
    2 * order
}

// ---------------------------------------------------------------------------
// ξ-chain and the spline Lagrangian
// ---------------------------------------------------------------------------

fn ad_s<S: Scalar>(alg: &LieAlgebra, x: &[S], y: &[S]) -> Vec<S> {
    let m = alg.dim();
    let mut out = vec![S::zero(); m];
    for alpha in 0..m {
        let mut acc = S::zero();
        for beta in 0..m {
            for gamma in 0..m {
                let c = alg.struct_const(alpha, beta, gamma);
                if c != 0.0 {
                    acc = acc + (x[beta] * y[gamma]).scale(c);
                }
            }
        }
        out[alpha] = acc;
    }
    out
}

fn ad_dagger_s<S: Scalar>(alg: &LieAlgebra, x: &[S], y: &[S]) -> Vec<S> {
    let m = alg.dim();
    let g = alg.metric();
    let g_inv = alg.metric_inv();
    // gy = g·y
    let mut gy = vec![S::zero(); m];
    for i in 0..m {
        let mut acc = S::zero();
        for j in 0..m {
            acc = acc + y[j].scale(g[(i, j)]);
        }
        gy[i] = acc;
    }
    // t_δ = Σ_{γβ} c^γ_{βδ} x^β gy_γ  (= (ad_x)ᵀ g y)
    let mut t = vec![S::zero(); m];
    for delta in 0..m {
        let mut acc = S::zero();
        for gamma in 0..m {
            for beta in 0..m {
                let c = alg.struct_const(gamma, beta, delta);
                if c != 0.0 {
                    acc = acc + (x[beta] * gy[gamma]).scale(c);
                }
            }
        }
        t[delta] = acc;
    }
    // out = g⁻¹ t
    let mut out = vec![S::zero(); m];
    for i in 0..m {
        let mut acc = S::zero();
        for j in 0..m {
            acc = acc + t[j].scale(g_inv[(i, j)]);
        }
        out[i] = acc;
    }
    out
}

fn inner_s<S: Scalar>(alg: &LieAlgebra, x: &[S], y: &[S]) -> S {
    let m = alg.dim();
    let g = alg.metric();
    let mut acc = S::zero();
    for i in 0..m {
        for j in 0..m {
            let c = g[(i, j)];
            if c != 0.0 {
                acc = acc + (x[i] * y[j]).scale(c);
            }
        }
    }
    acc
}

fn binom_f(n: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// The covariant-derivative chain used by the spline Lagrangian, as a jet
/// tableau: given the same-axis derivatives a[r] = ∂_μ^r σ_μ, compute
/// d[j][r] = ∂_μ^r ξ_μ^j with
///
///   ξ_μ^0 = σ_μ,
///   ξ_μ^j = ∂_μ ξ_μ^{j−1} + ½(ad†_{σ_μ} ξ^{j−1} + ad†_{ξ^{j−1}} σ_μ − ad_{σ_μ} ξ^{j−1}),
///
/// propagating derivatives through the bilinear terms by the Leibniz rule.
fn xi_tableau<S: Scalar>(alg: &LieAlgebra, a: &[Vec<S>], chain_len: usize) -> Vec<Vec<Vec<S>>> {
    // d[j][r]; r ranges over 0..=(a.len()-1-j)
    let max_r = a.len() - 1;
    let mut d: Vec<Vec<Vec<S>>> = Vec::with_capacity(chain_len);
    d.push(a.to_vec());
    for j in 1..chain_len {
        let prev = &d[j - 1];
        let mut cur = Vec::new();
        for r in 0..=(max_r - j) {
            let mut v = prev[r + 1].clone();
            for s in 0..=r {
                let w = 0.5 * binom_f(r, s);
                let t1 = ad_dagger_s(alg, &a[s], &prev[r - s]);
                let t2 = ad_dagger_s(alg, &prev[r - s], &a[s]);
                let t3 = ad_s(alg, &a[s], &prev[r - s]);
                for i in 0..v.len() {
                    v[i] = v[i] + (t1[i] + t2[i] - t3[i]).scale(w);
                }
            }
            cur.push(v);
        }
        d.push(cur);
    }
    d
}

/// The spline/elastica reduced Lagrangian as a jet evaluator.
pub struct SplineLagrangian {
    algebra: Arc<LieAlgebra>,
    params: SplineParams,
    layout: JetLayout,
}

impl SplineLagrangian {
    fn eval_generic<S: Scalar>(&self, jets: &[S]) -> S {
        let m = self.algebra.dim();
        let k = self.params.order;
        let n = self.params.n();
        let mut total = S::zero();
        for mu in 0..n {
            let mut a: Vec<Vec<S>> = Vec::with_capacity(k);
            for r in 0..k {
                let j = if r == 0 {
                    MultiIndex::zero(n)
                } else {
                    MultiIndex::new(
                        (0..n).map(|ax| if ax == mu { r } else { 0 }).collect(),
                    )
                };
                let rank = self.layout.rank_of(&j).expect("axis jet in layout");
                let row: Vec<S> = (0..m)
                    .map(|alpha| jets[self.layout.slot_connection(m, mu, alpha, rank)])
                    .collect();
                a.push(row);
            }
            let d = xi_tableau(&self.algebra, &a, k);
            let xi_top = &d[k - 1][0];
            let kappa = self.params.kappa[mu];
            if kappa != 0.0 {
                total = total + inner_s(&self.algebra, xi_top, xi_top).scale(0.5 * kappa);
            }
            let tau = self.params.tau[mu];
            if tau != 0.0 {
                total = total + inner_s(&self.algebra, &a[0], &a[0]).scale(0.5 * tau);
            }
        }
        total
    }
}

impl JetFunction for SplineLagrangian {
    fn eval_f64(&self, _x: &[f64], jets: &[f64]) -> f64 {
        self.eval_generic(jets)
    }
    fn eval_dual(&self, _x: &[Dual], jets: &[Dual]) -> Dual {
        self.eval_generic(jets)
    }
}

/// Build the order-k spline/elastica Lagrangian descriptor on n base axes.
pub fn spline_lagrangian(
    algebra: &Arc<LieAlgebra>,
    params: SplineParams,
) -> Result<LagrangianDescriptor> {
    let n = params.n();
    let k = params.order;
    let layout = JetLayout::new(n, k - 1, n * algebra.dim());
    let eval = SplineLagrangian {
        algebra: algebra.clone(),
        params,
        layout: layout.clone(),
    };
    Ok(LagrangianDescriptor::new(
        k,
        layout,
        DerivStrategy::DualForward,
        Arc::new(eval),
    ))
}

/// Field-level ξ-chain: per axis μ the fields ξ_μ^0, …, ξ_μ^{k−1}, with
/// stencil derivatives between chain members. No summation over μ occurs
/// inside a chain.
pub fn xi_chain(sigma: &ReducedField, order: usize) -> Result<Vec<Vec<AlgebraField>>> {
    let n = sigma.n();
    let m = sigma.algebra.dim();
    let grid = sigma.grid().clone();
    let mut out = Vec::with_capacity(n);
    for mu in 0..n {
        let mut chain = vec![sigma.components[mu].clone()];
        for _ in 1..order {
            let prev = chain.last().unwrap();
            let dprev = partial_algebra(prev, &MultiIndex::unit(n, mu))?;
            let mut data = vec![0.0; grid.n_nodes() * m];
            for flat in 0..grid.n_nodes() {
                let s = sigma.coeffs(mu, flat);
                let p = DVector::from_column_slice(prev.coeffs(flat));
                let half = 0.5
                    * (sigma.algebra.ad_dagger(&s, &p)? + sigma.algebra.ad_dagger(&p, &s)?
                        - sigma.algebra.bracket(&s, &p)?);
                for alpha in 0..m {
                    data[flat * m + alpha] = dprev.data[flat * m + alpha] + half[alpha];
                }
            }
            chain.push(AlgebraField::new(grid.clone(), m, data)?);
        }
        out.push(chain);
    }
    Ok(out)
}

/// Closed-form k=2 spline/elastica residual (algebra-valued):
///
///   Σ_μ κ^μ (∂_μ + ad†_{σ_μ})(ad†_{η_μ}σ_μ + ad_{η_μ}σ_μ + ∂_μη_μ)
///   − τ^μ (∂_μ + ad†_{σ_μ}) σ_μ,       η_μ = ∂_μσ_μ + ad†_{σ_μ}σ_μ.
///
/// Its zero set is the critical set of the k=2 spline action; equal to
/// −♯(ep_general) on the same Lagrangian.
pub fn spline_residual_k2(sigma: &ReducedField, params: &SplineParams) -> Result<AlgebraField> {
    if params.order != 2 {
        return Err(Error::Invalid(format!(
            "closed-form spline residual requires k = 2, got {}",
            params.order
        )));
    }
    if params.n() != sigma.n() {
        return Err(Error::DimensionMismatch {
            expected: sigma.n(),
            got: params.n(),
        });
    }
    let alg = sigma.algebra.clone();
    let grid = sigma.grid().clone();
    let m = alg.dim();
    let mut out = AlgebraField::zeros(grid.clone(), m);
    for mu in 0..sigma.n() {
        let unit = MultiIndex::unit(sigma.n(), mu);
        let ds = partial_algebra(&sigma.components[mu], &unit)?;
        // η = ∂σ + ad†_σ σ
        let mut eta = AlgebraField::zeros(grid.clone(), m);
        for flat in 0..grid.n_nodes() {
            let s = sigma.coeffs(mu, flat);
            let add = alg.ad_dagger(&s, &s)?;
            for alpha in 0..m {
                eta.data[flat * m + alpha] = ds.data[flat * m + alpha] + add[alpha];
            }
        }
        let deta = partial_algebra(&eta, &unit)?;
        // W = ad†_η σ + ad_η σ + ∂η
        let mut w = AlgebraField::zeros(grid.clone(), m);
        for flat in 0..grid.n_nodes() {
            let s = sigma.coeffs(mu, flat);
            let e = DVector::from_column_slice(eta.coeffs(flat));
            let v = alg.ad_dagger(&e, &s)? + alg.bracket(&e, &s)?;
            for alpha in 0..m {
                w.data[flat * m + alpha] = v[alpha] + deta.data[flat * m + alpha];
            }
        }
        let dw = partial_algebra(&w, &unit)?;
        let kappa = params.kappa[mu];
        let tau = params.tau[mu];
        for flat in 0..grid.n_nodes() {
            let s = sigma.coeffs(mu, flat);
            let wv = DVector::from_column_slice(w.coeffs(flat));
            let adw = alg.ad_dagger(&s, &wv)?;
            let ev = DVector::from_column_slice(eta.coeffs(flat));
            for alpha in 0..m {
                out.data[flat * m + alpha] +=
                    kappa * (dw.data[flat * m + alpha] + adw[alpha]) - tau * ev[alpha];
            }
        }
    }
    Ok(out)
}

/// k=2 residual specialized to bi-invariant metrics:
///
///   Σ_μ κ^μ (∂³_μσ_μ − [σ_μ, ∂²_μσ_μ]) − τ^μ ∂_μσ_μ.
///
/// Errors with `NotBiInvariant` when the detector fails.
pub fn spline_residual_biinvariant(
    sigma: &ReducedField,
    params: &SplineParams,
) -> Result<AlgebraField> {
    if params.order != 2 {
        return Err(Error::Invalid(format!(
            "bi-invariant spline residual requires k = 2, got {}",
            params.order
        )));
    }
    let alg = sigma.algebra.clone();
    if !alg.is_bi_invariant() {
        return Err(Error::NotBiInvariant {
            residual: alg.bi_invariance_residual(),
        });
    }
    let grid = sigma.grid().clone();
    let m = alg.dim();
    let mut out = AlgebraField::zeros(grid.clone(), m);
    for mu in 0..sigma.n() {
        let unit = MultiIndex::unit(sigma.n(), mu);
        let d1 = partial_algebra(&sigma.components[mu], &unit)?;
        let d2 = partial_algebra(&d1, &unit)?;
        let d3 = partial_algebra(&d2, &unit)?;
        let kappa = params.kappa[mu];
        let tau = params.tau[mu];
        for flat in 0..grid.n_nodes() {
            let s = sigma.coeffs(mu, flat);
            let dd = DVector::from_column_slice(d2.coeffs(flat));
            let br = alg.bracket(&s, &dd)?;
            for alpha in 0..m {
                out.data[flat * m + alpha] += kappa
                    * (d3.data[flat * m + alpha] - br[alpha])
                    - tau * d1.data[flat * m + alpha];
            }
        }
    }
    Ok(out)
}
