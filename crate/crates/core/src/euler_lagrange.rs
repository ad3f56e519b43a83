//! The general higher-order Euler–Lagrange residual
//!
//!   R_α = Σ_{|J|=0}^{k} (−1)^{|J|} ∂^J( ∂L/∂y^α_J ∘ j^k y )
//!
//! computed in three stages: discrete jet tables of the fields, pointwise
//! differentiation of the Lagrangian with respect to each jet coordinate, and
//! the outer discrete ∂^J on the resulting coefficient fields.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{partial, ScalarField};
use crate::lagrangian::{JetLayout, LagrangianDescriptor};

/// Discrete jet tables: `partial(fields[comp], J)` for every layout slot,
/// slot-major.
pub fn jet_tables(fields: &[ScalarField], layout: &JetLayout) -> Result<Vec<ScalarField>> {
    debug_assert_eq!(fields.len(), layout.comps);
    let mut out = Vec::with_capacity(layout.slots());
    for comp in 0..layout.comps {
        for j in &layout.indices {
            out.push(partial(&fields[comp], j)?);
        }
    }
    Ok(out)
}

/// The fields P_slot(x) = ∂L/∂(slot) evaluated along the jet tables.
pub fn coefficient_fields(
    descriptor: &LagrangianDescriptor,
    tables: &[ScalarField],
) -> Result<Vec<ScalarField>> {
    let grid = tables[0].grid.clone();
    let slots = descriptor.layout.slots();
    debug_assert_eq!(tables.len(), slots);
    let rows: Vec<Result<Vec<f64>>> = (0..grid.n_nodes())
        .into_par_iter()
        .map(|node| {
            let x = grid.position(&grid.multi_index(node));
            let jets: Vec<f64> = tables.iter().map(|t| t.data[node]).collect();
            let value = descriptor.value(&x, &jets);
            if !value.is_finite() {
                return Err(Error::NonFiniteLagrangian {
                    node: grid.multi_index(node),
                });
            }
            let mut row = vec![0.0; slots];
            descriptor.partials(&x, &jets, &mut row).map_err(|e| match e {
                Error::NonFiniteLagrangian { .. } => Error::NonFiniteLagrangian {
                    node: grid.multi_index(node),
                },
                other => other,
            })?;
            Ok(row)
        })
        .collect();
    let mut fields = vec![ScalarField::zeros(grid.clone()); slots];
    for (node, row) in rows.into_iter().enumerate() {
        let row = row?;
        for (s, v) in row.into_iter().enumerate() {
            fields[s].data[node] = v;
        }
    }
    Ok(fields)
}

/// Euler–Lagrange residual of an order-k Lagrangian over m scalar fields.
/// Returns one residual field per α. Values within `2k` nodes of the boundary
/// carry one-sided stencil error; interior nodes are second-order accurate.
pub fn el_residual(
    descriptor: &LagrangianDescriptor,
    fields: &[ScalarField],
) -> Result<Vec<ScalarField>> {
    let layout = &descriptor.layout;
    if fields.len() != layout.comps {
        return Err(Error::DimensionMismatch {
            expected: layout.comps,
            got: fields.len(),
        });
    }
    let grid = fields[0].grid.clone();
    for f in fields {
        if f.grid != grid {
            return Err(Error::GridMismatch);
        }
    }
    let tables = jet_tables(fields, layout)?;
    let coeffs = coefficient_fields(descriptor, &tables)?;
    let mut out = Vec::with_capacity(layout.comps);
    for alpha in 0..layout.comps {
        let mut acc = ScalarField::zeros(grid.clone());
        for (rank, j) in layout.indices.iter().enumerate() {
            let term = partial(&coeffs[layout.slot(alpha, rank)], j)?;
            let sign = if j.order() % 2 == 0 { 1.0 } else { -1.0 };
            for (a, t) in acc.data.iter_mut().zip(&term.data) {
                *a += sign * t;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Interior margin at which `el_residual` values are free of one-sided
/// boundary stencils.
pub fn el_interior_margin(order: usize) -> usize {
    2 * order
}
