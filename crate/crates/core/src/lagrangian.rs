//! Lagrangian descriptors: a jet-coordinate layout plus an evaluator that can
//! be differentiated with respect to each jet coordinate, either exactly
//! (forward-mode duals) or by central differences.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dual::{Dual, Scalar};
use crate::error::{Error, Result};
use crate::multi_index::{multi_indices, MultiIndex};

/// Index map for jet coordinates: `comps` field components, each carrying one
/// value per multi-index with |J| ≤ `order`, graded-lexicographically ordered.
///
/// For scalar fields y^α the component index is α; for reduced fields σ_μ the
/// component index is μ·m + α.
#[derive(Debug, Clone)]
pub struct JetLayout {
    pub n: usize,
    pub order: usize,
    pub comps: usize,
    pub indices: Vec<MultiIndex>,
    rank: HashMap<Vec<usize>, usize>,
}

impl JetLayout {
    pub fn new(n: usize, order: usize, comps: usize) -> Self {
        let indices = multi_indices(n, order);
        let rank = indices
            .iter()
            .enumerate()
            .map(|(r, j)| (j.entries().to_vec(), r))
            .collect();
        JetLayout {
            n,
            order,
            comps,
            indices,
            rank,
        }
    }

    pub fn n_indices(&self) -> usize {
        self.indices.len()
    }

    pub fn slots(&self) -> usize {
        self.comps * self.indices.len()
    }

    pub fn rank_of(&self, j: &MultiIndex) -> Option<usize> {
        self.rank.get(j.entries()).copied()
    }

    pub fn slot(&self, comp: usize, j_rank: usize) -> usize {
        comp * self.indices.len() + j_rank
    }

    /// Slot of the connection coordinate A^α_{μ,J} (components μ-major).
    pub fn slot_connection(&self, m: usize, mu: usize, alpha: usize, j_rank: usize) -> usize {
        debug_assert_eq!(self.comps % m, 0);
        self.slot(mu * m + alpha, j_rank)
    }
}

/// How the evaluator is differentiated with respect to jet coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivStrategy {
    /// Forward-mode dual numbers; exact, needs a generic evaluator.
    DualForward,
    /// Central difference with step `eps_scale · max(1, |coordinate|)`.
    CentralDiff { eps_scale: f64 },
}

impl DerivStrategy {
    pub fn central_default() -> Self {
        DerivStrategy::CentralDiff {
            eps_scale: f64::EPSILON.cbrt(),
        }
    }
}

/// An evaluator usable at `f64` and at [`Dual`] arguments. Implementers
/// normally delegate both methods to one generic function over
/// [`Scalar`](crate::dual::Scalar).
pub trait JetFunction: Send + Sync {
    fn eval_f64(&self, x: &[f64], jets: &[f64]) -> f64;
    fn eval_dual(&self, x: &[Dual], jets: &[Dual]) -> Dual;
}

/// Adapter for plain-`f64` closures; restricted to the central-difference
/// strategy.
pub struct NumericFn<F>(pub F);

impl<F> JetFunction for NumericFn<F>
where
    F: Fn(&[f64], &[f64]) -> f64 + Send + Sync,
{
    fn eval_f64(&self, x: &[f64], jets: &[f64]) -> f64 {
        (self.0)(x, jets)
    }
    fn eval_dual(&self, _x: &[Dual], _jets: &[Dual]) -> Dual {
        unreachable!("numeric evaluators are differentiated by central differences")
    }
}

/// Order-k Lagrangian (or reduced Lagrangian) on jet coordinates.
#[derive(Clone)]
pub struct LagrangianDescriptor {
    pub order: usize,
    pub layout: JetLayout,
    pub strategy: DerivStrategy,
    evaluator: Arc<dyn JetFunction>,
}

impl std::fmt::Debug for LagrangianDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LagrangianDescriptor")
            .field("order", &self.order)
            .field("slots", &self.layout.slots())
            .field("strategy", &self.strategy)
            .finish()
    }
}

impl LagrangianDescriptor {
    pub fn new(
        order: usize,
        layout: JetLayout,
        strategy: DerivStrategy,
        evaluator: Arc<dyn JetFunction>,
    ) -> Self {
        LagrangianDescriptor {
            order,
            layout,
            strategy,
            evaluator,
        }
    }

    /// Descriptor from a plain closure; forces central differences.
    pub fn from_fn<F>(order: usize, layout: JetLayout, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        LagrangianDescriptor {
            order,
            layout,
            strategy: DerivStrategy::central_default(),
            evaluator: Arc::new(NumericFn(f)),
        }
    }

    pub fn value(&self, x: &[f64], jets: &[f64]) -> f64 {
        self.evaluator.eval_f64(x, jets)
    }

    /// ∂L/∂(jet slot) for every slot, at the given point.
    pub fn partials(&self, x: &[f64], jets: &[f64], out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.layout.slots());
        match self.strategy {
            DerivStrategy::DualForward => {
                let xd: Vec<Dual> = x.iter().map(|&v| Dual::constant(v)).collect();
                let mut jd: Vec<Dual> = jets.iter().map(|&v| Dual::constant(v)).collect();
                for s in 0..out.len() {
                    jd[s] = Dual::variable(jets[s]);
                    let r = self.evaluator.eval_dual(&xd, &jd);
                    jd[s] = Dual::constant(jets[s]);
                    out[s] = r.eps;
                }
            }
            DerivStrategy::CentralDiff { eps_scale } => {
                let mut work = jets.to_vec();
                for s in 0..out.len() {
                    let v = jets[s];
                    let eps = eps_scale * v.abs().max(1.0);
                    work[s] = v + eps;
                    let fp = self.evaluator.eval_f64(x, &work);
                    work[s] = v - eps;
                    let fm = self.evaluator.eval_f64(x, &work);
                    work[s] = v;
                    out[s] = (fp - fm) / (2.0 * eps);
                }
            }
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLagrangian { node: vec![] });
        }
        Ok(())
    }
}

/// A polynomial in the jet coordinates, for tests and the CLI's analytic
/// families: sum of coefficient · Π slot^power terms.
#[derive(Debug, Clone)]
pub struct JetPolynomial {
    pub terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl JetPolynomial {
    fn eval_generic<S: Scalar>(&self, jets: &[S]) -> S {
        let mut acc = S::zero();
        for (coeff, factors) in &self.terms {
            let mut t = S::from_f64(*coeff);
            for &(slot, pow) in factors {
                t = t * jets[slot].powi(pow as i32);
            }
            acc = acc + t;
        }
        acc
    }
}

impl JetFunction for JetPolynomial {
    fn eval_f64(&self, _x: &[f64], jets: &[f64]) -> f64 {
        self.eval_generic(jets)
    }
    fn eval_dual(&self, _x: &[Dual], jets: &[Dual]) -> Dual {
        self.eval_generic(jets)
    }
}
