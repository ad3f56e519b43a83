//! Uniform rectangular grids on boxes in R^n and the field types sampled on
//! them, plus the discrete coordinate derivatives.
//!
//! Derivatives are composed second-order central differences per axis, with
//! second-order one-sided stencils within one node of the boundary. Interior
//! values of `partial` are exact on polynomials of degree ≤ 2 per applied
//! stencil.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;

/// Maximum total derivative order the stencil machinery accepts.
pub const MAX_STENCIL_ORDER: usize = 6;

/// Uniform grid on Π [a_μ, b_μ] with N_μ nodes per axis.
///
/// Node storage is row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    extents: Vec<(f64, f64)>,
    sizes: Vec<usize>,
    spacings: Vec<f64>,
    strides: Vec<usize>,
    n_nodes: usize,
}

impl Grid {
    pub fn new(extents: Vec<(f64, f64)>, sizes: Vec<usize>) -> Result<Arc<Grid>> {
        if extents.is_empty() || extents.len() != sizes.len() {
            return Err(Error::Invalid(format!(
                "grid needs matching extents/sizes, got {} and {}",
                extents.len(),
                sizes.len()
            )));
        }
        let mut spacings = Vec::with_capacity(sizes.len());
        for (axis, (&(a, b), &n)) in extents.iter().zip(&sizes).enumerate() {
            if n < 3 {
                return Err(Error::Invalid(format!(
                    "axis {axis}: at least 3 nodes required, got {n}"
                )));
            }
            let h = (b - a) / (n - 1) as f64;
            if !(h > 0.0) {
                return Err(Error::Invalid(format!(
                    "axis {axis}: nonpositive spacing from extent [{a}, {b}]"
                )));
            }
            spacings.push(h);
        }
        let mut strides = vec![1usize; sizes.len()];
        for axis in (0..sizes.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * sizes[axis + 1];
        }
        let n_nodes = sizes.iter().product();
        Ok(Arc::new(Grid {
            extents,
            sizes,
            spacings,
            strides,
            n_nodes,
        }))
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn size(&self, axis: usize) -> usize {
        self.sizes[axis]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacings[axis]
    }

    pub fn extent(&self, axis: usize) -> (f64, f64) {
        self.extents[axis]
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacings.iter().cloned().fold(0.0, f64::max)
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut rem = flat;
        self.strides
            .iter()
            .map(|&s| {
                let i = rem / s;
                rem %= s;
                i
            })
            .collect()
    }

    pub fn position(&self, multi: &[usize]) -> Vec<f64> {
        multi
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.extents[axis].0 + i as f64 * self.spacings[axis])
            .collect()
    }

    /// Composite-trapezoid quadrature weight of a node (product rule).
    pub fn quadrature_weight(&self, multi: &[usize]) -> f64 {
        multi
            .iter()
            .enumerate()
            .map(|(axis, &i)| {
                let edge = i == 0 || i + 1 == self.sizes[axis];
                self.spacings[axis] * if edge { 0.5 } else { 1.0 }
            })
            .product()
    }

    /// True if the node is at distance ≥ `margin` from every face.
    pub fn is_interior(&self, multi: &[usize], margin: usize) -> bool {
        multi
            .iter()
            .enumerate()
            .all(|(axis, &i)| i >= margin && i + margin < self.sizes[axis])
    }

    /// Flat indices of all nodes, row-major.
    pub fn node_count_check(&self, len: usize) -> Result<()> {
        if len != self.n_nodes {
            return Err(Error::Invalid(format!(
                "field has {len} samples, grid has {} nodes",
                self.n_nodes
            )));
        }
        Ok(())
    }
}

/// Iterate multi-indices of all nodes in row-major order.
pub fn iter_nodes(grid: &Grid) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..grid.n_nodes()).map(|f| grid.multi_index(f))
}

/// Real-valued samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Arc<Grid>,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, data: Vec<f64>) -> Result<Self> {
        grid.node_count_check(data.len())?;
        Ok(ScalarField { grid, data })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.n_nodes();
        ScalarField {
            grid,
            data: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let data = (0..grid.n_nodes())
            .map(|i| f(&grid.position(&grid.multi_index(i))))
            .collect();
        ScalarField { grid, data }
    }

    pub fn sup_norm_interior(&self, margin: usize) -> f64 {
        (0..self.grid.n_nodes())
            .filter(|&i| self.grid.is_interior(&self.grid.multi_index(i), margin))
            .map(|i| self.data[i].abs())
            .fold(0.0, f64::max)
    }
}

/// Lie-algebra-valued samples: one length-m coefficient vector per node,
/// node-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraField {
    pub grid: Arc<Grid>,
    pub m: usize,
    pub data: Vec<f64>,
}

impl AlgebraField {
    pub fn new(grid: Arc<Grid>, m: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.n_nodes() * m {
            return Err(Error::Invalid(format!(
                "algebra field has {} values, expected {}",
                data.len(),
                grid.n_nodes() * m
            )));
        }
        Ok(AlgebraField { grid, m, data })
    }

    pub fn zeros(grid: Arc<Grid>, m: usize) -> Self {
        let n = grid.n_nodes() * m;
        AlgebraField {
            grid,
            m,
            data: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Arc<Grid>, m: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let mut data = Vec::with_capacity(grid.n_nodes() * m);
        for i in 0..grid.n_nodes() {
            let v = f(&grid.position(&grid.multi_index(i)));
            assert_eq!(v.len(), m);
            data.extend_from_slice(&v);
        }
        AlgebraField { grid, m, data }
    }

    pub fn coeffs(&self, flat: usize) -> &[f64] {
        &self.data[flat * self.m..(flat + 1) * self.m]
    }

    pub fn coeffs_mut(&mut self, flat: usize) -> &mut [f64] {
        &mut self.data[flat * self.m..(flat + 1) * self.m]
    }

    /// Component α as a scalar field.
    pub fn component(&self, alpha: usize) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            data: (0..self.grid.n_nodes())
                .map(|i| self.data[i * self.m + alpha])
                .collect(),
        }
    }

    pub fn from_components(components: &[ScalarField]) -> Result<Self> {
        let m = components.len();
        let grid = components[0].grid.clone();
        for c in components {
            if c.grid != grid {
                return Err(Error::GridMismatch);
            }
        }
        let mut data = vec![0.0; grid.n_nodes() * m];
        for (alpha, c) in components.iter().enumerate() {
            for i in 0..grid.n_nodes() {
                data[i * m + alpha] = c.data[i];
            }
        }
        Ok(AlgebraField { grid, m, data })
    }

    pub fn sup_norm_interior(&self, margin: usize) -> f64 {
        (0..self.grid.n_nodes())
            .filter(|&i| self.grid.is_interior(&self.grid.multi_index(i), margin))
            .flat_map(|i| self.coeffs(i).iter().map(|v| v.abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }
}

/// Group-valued samples: one d×d matrix per node.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupField {
    pub grid: Arc<Grid>,
    pub d: usize,
    pub data: Vec<DMatrix<f64>>,
}

impl GroupField {
    pub fn new(grid: Arc<Grid>, data: Vec<DMatrix<f64>>) -> Result<Self> {
        grid.node_count_check(data.len())?;
        let d = data[0].nrows();
        for m in &data {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Invalid("ragged group field".into()));
            }
        }
        Ok(GroupField { grid, d, data })
    }

    pub fn constant(grid: Arc<Grid>, value: DMatrix<f64>) -> Self {
        let n = grid.n_nodes();
        GroupField {
            grid,
            d: value.nrows(),
            data: vec![value; n],
        }
    }

    pub fn at(&self, flat: usize) -> &DMatrix<f64> {
        &self.data[flat]
    }
}

fn check_stencil(grid: &Grid, j: &MultiIndex) -> Result<()> {
    if j.order() > MAX_STENCIL_ORDER {
        return Err(Error::StencilTooWide {
            axis: 0,
            order: j.order(),
            size: 0,
            max_order: MAX_STENCIL_ORDER,
        });
    }
    for (axis, &r) in j.entries().iter().enumerate() {
        if r > 0 && grid.size(axis) < 3 {
            return Err(Error::StencilTooWide {
                axis,
                order: r,
                size: grid.size(axis),
                max_order: MAX_STENCIL_ORDER,
            });
        }
    }
    Ok(())
}

/// One application of the second-order first-derivative stencil along `axis`:
/// central in the interior, one-sided 3-point at the two boundary nodes.
pub fn diff_axis(f: &ScalarField, axis: usize) -> ScalarField {
    let grid = &f.grid;
    let n = grid.size(axis);
    let h = grid.spacing(axis);
    let stride = {
        let mut s = 1usize;
        for a in (axis + 1)..grid.dim() {
            s *= grid.size(a);
        }
        s
    };
    let mut out = vec![0.0; f.data.len()];
    let line_count = grid.n_nodes() / n;
    for line in 0..line_count {
        // base flat index of the line's first node
        let block = line / stride;
        let offset = line % stride;
        let base = block * stride * n + offset;
        let at = |i: usize| f.data[base + i * stride];
        for i in 0..n {
            let v = if i == 0 {
                (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
            } else if i + 1 == n {
                (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h)
            } else {
                (at(i + 1) - at(i - 1)) / (2.0 * h)
            };
            out[base + i * stride] = v;
        }
    }
    ScalarField {
        grid: f.grid.clone(),
        data: out,
    }
}

/// Discrete ∂^J: the first-derivative stencil composed J_μ times per axis.
pub fn partial(f: &ScalarField, j: &MultiIndex) -> Result<ScalarField> {
    check_stencil(&f.grid, j)?;
    let mut cur = f.clone();
    for (axis, &r) in j.entries().iter().enumerate() {
        for _ in 0..r {
            cur = diff_axis(&cur, axis);
        }
    }
    Ok(cur)
}

/// Componentwise `partial` on an algebra-valued field.
pub fn partial_algebra(f: &AlgebraField, j: &MultiIndex) -> Result<AlgebraField> {
    let comps: Vec<ScalarField> = (0..f.m)
        .map(|alpha| partial(&f.component(alpha), j))
        .collect::<Result<_>>()?;
    AlgebraField::from_components(&comps)
}
