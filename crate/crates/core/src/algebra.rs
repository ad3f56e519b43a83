//! Lie algebra and matrix-group services.
//!
//! A [`LieAlgebra`] is validated from a [`LieAlgebraSpec`] (structure
//! constants c^α_{βγ} with [B_β, B_γ] = c^α_{βγ} B_α, a nondegenerate metric,
//! and optionally a matrix basis realizing the constants). All operators are
//! derived from the cached ad-matrices and the metric:
//!
//!   bracket(ξ,η)^α = c^α_{βγ} ξ^β η^γ
//!   ad†_ξ  = g⁻¹ (ad_ξ)ᵀ g          (metric adjoint)
//!   coad_ξ = (ad_ξ)ᵀ                 (so that ad†_ξ(ζ) = ♯ coad_ξ(♭ζ))
//!
//! The coadjoint sign convention is pinned by the ♭/♯ compatibility identity;
//! conventions with an extra minus exist in the literature.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type AlgebraVector = DVector<f64>;

/// A group element as an invertible d×d matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub mat: DMatrix<f64>,
}

impl GroupElement {
    pub fn new(mat: DMatrix<f64>) -> Self {
        GroupElement { mat }
    }

    pub fn identity(d: usize) -> Self {
        GroupElement {
            mat: DMatrix::identity(d, d),
        }
    }
}

/// Raw algebra data, prior to validation.
#[derive(Debug, Clone)]
pub struct LieAlgebraSpec {
    pub dim: usize,
    /// c[α][β][γ] flattened α-major: index (α·m + β)·m + γ.
    pub struct_consts: Vec<f64>,
    pub metric: DMatrix<f64>,
    pub matrix_basis: Option<Vec<DMatrix<f64>>>,
}

impl LieAlgebraSpec {
    pub fn c(&self, alpha: usize, beta: usize, gamma: usize) -> f64 {
        self.struct_consts[(alpha * self.dim + beta) * self.dim + gamma]
    }
}

/// Validated algebra handle. Immutable after construction; operations are
/// pure and safe to share across threads.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    spec: LieAlgebraSpec,
    metric_inv: DMatrix<f64>,
    /// ad_basis[β] is the m×m matrix of ad_{B_β}: (ad_basis[β])_{αγ} = c^α_{βγ}.
    ad_basis: Vec<DMatrix<f64>>,
    /// Least-squares projector from vec(d×d) onto basis coefficients.
    basis_pinv: Option<DMatrix<f64>>,
    name: Option<String>,
    bi_invariance_residual: f64,
}

const ALGEBRA_TOL: f64 = 1e-12;

impl LieAlgebra {
    /// Validate a spec and build the handle (the spec's `make_algebra`).
    pub fn new(spec: LieAlgebraSpec) -> Result<Arc<LieAlgebra>> {
        Self::with_name(spec, None)
    }

    fn with_name(spec: LieAlgebraSpec, name: Option<String>) -> Result<Arc<LieAlgebra>> {
        let m = spec.dim;
        if m == 0 {
            return Err(Error::Invalid("algebra dimension must be positive".into()));
        }
        if spec.struct_consts.len() != m * m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m * m,
                got: spec.struct_consts.len(),
            });
        }
        if spec.metric.nrows() != m || spec.metric.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: spec.metric.nrows(),
            });
        }

        // antisymmetry c^α_{βγ} = −c^α_{γβ}
        for alpha in 0..m {
            for beta in 0..m {
                for gamma in 0..m {
                    let r = spec.c(alpha, beta, gamma) + spec.c(alpha, gamma, beta);
                    if r.abs() > ALGEBRA_TOL {
                        return Err(Error::AntisymmetryViolation {
                            alpha,
                            beta,
                            gamma,
                            residual: r.abs(),
                        });
                    }
                }
            }
        }
        // Jacobi: Σ_λ (c^λ_{βγ} c^α_{λδ} + c^λ_{γδ} c^α_{λβ} + c^λ_{δβ} c^α_{λγ}) = 0
        for beta in 0..m {
            for gamma in 0..m {
                for delta in 0..m {
                    for alpha in 0..m {
                        let mut s = 0.0;
                        for lambda in 0..m {
                            s += spec.c(lambda, beta, gamma) * spec.c(alpha, lambda, delta)
                                + spec.c(lambda, gamma, delta) * spec.c(alpha, lambda, beta)
                                + spec.c(lambda, delta, beta) * spec.c(alpha, lambda, gamma);
                        }
                        if s.abs() > ALGEBRA_TOL {
                            return Err(Error::JacobiViolation {
                                beta,
                                gamma,
                                delta,
                                residual: s.abs(),
                            });
                        }
                    }
                }
            }
        }
        // metric: symmetric, nondegenerate
        let sym_res = (&spec.metric - spec.metric.transpose()).amax();
        if sym_res > ALGEBRA_TOL {
            return Err(Error::Invalid(format!(
                "metric not symmetric (residual {sym_res:.3e})"
            )));
        }
        let det = spec.metric.clone().determinant();
        if det.abs() <= 1e-12 {
            return Err(Error::DegenerateMetric {
                det: det.abs(),
                tol: 1e-12,
            });
        }
        let metric_inv = spec
            .metric
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateMetric { det: 0.0, tol: 1e-12 })?;

        // matrix basis reproduces the constants
        let mut basis_pinv = None;
        if let Some(basis) = &spec.matrix_basis {
            if basis.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: basis.len(),
                });
            }
            let d = basis[0].nrows();
            for b in basis {
                if b.nrows() != d || b.ncols() != d {
                    return Err(Error::Invalid("ragged matrix basis".into()));
                }
            }
            for beta in 0..m {
                for gamma in 0..m {
                    let mut comm = &basis[beta] * &basis[gamma] - &basis[gamma] * &basis[beta];
                    for alpha in 0..m {
                        comm -= spec.c(alpha, beta, gamma) * &basis[alpha];
                    }
                    let r = comm.amax();
                    if r > ALGEBRA_TOL {
                        return Err(Error::BasisMismatch {
                            beta,
                            gamma,
                            residual: r,
                        });
                    }
                }
            }
            // stack vec(B_α) as columns; pinv = (BᵀB)⁻¹Bᵀ
            let mut b = DMatrix::zeros(d * d, m);
            for (alpha, mat) in basis.iter().enumerate() {
                for (i, v) in mat.iter().enumerate() {
                    b[(i, alpha)] = *v;
                }
            }
            let gram = b.transpose() * &b;
            let gram_inv = gram
                .try_inverse()
                .ok_or_else(|| Error::Invalid("matrix basis is linearly dependent".into()))?;
            basis_pinv = Some(gram_inv * b.transpose());
        }

        let mut ad_basis = Vec::with_capacity(m);
        for beta in 0..m {
            let mut mat = DMatrix::zeros(m, m);
            for alpha in 0..m {
                for gamma in 0..m {
                    mat[(alpha, gamma)] = spec.c(alpha, beta, gamma);
                }
            }
            ad_basis.push(mat);
        }

        let mut alg = LieAlgebra {
            spec,
            metric_inv,
            ad_basis,
            basis_pinv,
            name,
            bi_invariance_residual: 0.0,
        };
        alg.bi_invariance_residual = alg.compute_bi_invariance_residual();
        Ok(Arc::new(alg))
    }

    /// Bundled algebras: `so3`, `heisenberg3`, `se2`, `abelian:<m>`.
    pub fn named(name: &str) -> Result<Arc<LieAlgebra>> {
        let spec = named_spec(name)?;
        Self::with_name(spec, Some(name.to_string()))
    }

    pub fn known_names() -> &'static [&'static str] {
        &["so3", "heisenberg3", "se2", "abelian:<m>"]
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.spec.metric
    }

    pub fn metric_inv(&self) -> &DMatrix<f64> {
        &self.metric_inv
    }

    pub fn struct_const(&self, alpha: usize, beta: usize, gamma: usize) -> f64 {
        self.spec.c(alpha, beta, gamma)
    }

    pub fn matrix_basis(&self) -> Option<&[DMatrix<f64>]> {
        self.spec.matrix_basis.as_deref()
    }

    /// Side length of the matrix representation, if any.
    pub fn matrix_dim(&self) -> Option<usize> {
        self.spec.matrix_basis.as_ref().map(|b| b[0].nrows())
    }

    fn check_dim(&self, v: &AlgebraVector) -> Result<()> {
        if v.len() != self.spec.dim {
            return Err(Error::DimensionMismatch {
                expected: self.spec.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// The matrix of ad_ξ = [ξ, ·] on coefficients.
    pub fn ad_matrix(&self, xi: &AlgebraVector) -> DMatrix<f64> {
        let m = self.spec.dim;
        let mut out = DMatrix::zeros(m, m);
        for beta in 0..m {
            let c = xi[beta];
            if c != 0.0 {
                out += c * &self.ad_basis[beta];
            }
        }
        out
    }

    /// [ξ, η]^α = c^α_{βγ} ξ^β η^γ.
    pub fn bracket(&self, xi: &AlgebraVector, eta: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(xi)?;
        self.check_dim(eta)?;
        Ok(self.ad_matrix(xi) * eta)
    }

    /// Metric adjoint ad†_ξ(ζ), the unique η with g(ad_ξ χ, ζ) = g(χ, η).
    pub fn ad_dagger(&self, xi: &AlgebraVector, zeta: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(xi)?;
        self.check_dim(zeta)?;
        Ok(&self.metric_inv * (self.ad_matrix(xi).transpose() * (&self.spec.metric * zeta)))
    }

    /// Coadjoint action on dual coefficients: coad_ξ(μ) = (ad_ξ)ᵀ μ, so that
    /// ad†_ξ(ζ) = ♯(coad_ξ(♭ζ)) exactly.
    pub fn coad(&self, xi: &AlgebraVector, mu: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(xi)?;
        self.check_dim(mu)?;
        Ok(self.ad_matrix(xi).transpose() * mu)
    }

    pub fn flat(&self, xi: &AlgebraVector) -> AlgebraVector {
        &self.spec.metric * xi
    }

    pub fn sharp(&self, mu: &AlgebraVector) -> AlgebraVector {
        &self.metric_inv * mu
    }

    pub fn inner(&self, xi: &AlgebraVector, eta: &AlgebraVector) -> f64 {
        (xi.transpose() * &self.spec.metric * eta)[(0, 0)]
    }

    pub fn norm_sq(&self, xi: &AlgebraVector) -> f64 {
        self.inner(xi, xi)
    }

    fn compute_bi_invariance_residual(&self) -> f64 {
        let m = self.spec.dim;
        let mut worst: f64 = 0.0;
        for beta in 0..m {
            for gamma in 0..m {
                let b = AlgebraVector::from_fn(m, |i, _| if i == beta { 1.0 } else { 0.0 });
                let g = AlgebraVector::from_fn(m, |i, _| if i == gamma { 1.0 } else { 0.0 });
                let lhs = self.ad_dagger(&b, &g).unwrap() + self.bracket(&b, &g).unwrap();
                worst = worst.max(lhs.amax());
            }
        }
        worst
    }

    /// Detector for ad†_ξ = −ad_ξ (ad-invariance of the metric).
    pub fn bi_invariance_residual(&self) -> f64 {
        self.bi_invariance_residual
    }

    pub fn is_bi_invariant(&self) -> bool {
        self.bi_invariance_residual <= ALGEBRA_TOL
    }

    /// Matrix exponential of Σ ξ^α B_α.
    pub fn exp(&self, xi: &AlgebraVector) -> Result<GroupElement> {
        self.check_dim(xi)?;
        let basis = self.spec.matrix_basis.as_ref().ok_or(Error::NoMatrixBasis)?;
        let d = basis[0].nrows();
        let mut mat = DMatrix::zeros(d, d);
        for (alpha, b) in basis.iter().enumerate() {
            mat += xi[alpha] * b;
        }
        Ok(GroupElement::new(expm(&mat)))
    }

    /// Principal matrix logarithm projected onto basis coefficients.
    pub fn log(&self, g: &GroupElement) -> Result<AlgebraVector> {
        let l = self.log_matrix(&g.mat)?;
        self.coefficients_of(&l)
    }

    /// Principal logarithm as a matrix (no projection).
    pub fn log_matrix(&self, mat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if self.spec.matrix_basis.is_none() {
            return Err(Error::NoMatrixBasis);
        }
        logm(mat)
    }

    /// Coefficients of an algebra-valued matrix w.r.t. the basis.
    pub fn coefficients_of(&self, mat: &DMatrix<f64>) -> Result<AlgebraVector> {
        let pinv = self.basis_pinv.as_ref().ok_or(Error::NoMatrixBasis)?;
        let d2 = mat.nrows() * mat.ncols();
        let v = DVector::from_fn(d2, |i, _| mat[(i % mat.nrows(), i / mat.nrows())]);
        let coeffs = pinv * v;
        // reject logs that left the algebra span
        let basis = self.spec.matrix_basis.as_ref().unwrap();
        let mut recon = DMatrix::zeros(mat.nrows(), mat.ncols());
        for (alpha, b) in basis.iter().enumerate() {
            recon += coeffs[alpha] * b;
        }
        let res = (&recon - mat).amax();
        if res > 1e-8 * (1.0 + mat.amax()) {
            return Err(Error::LogDomain(format!(
                "matrix is not in the algebra span (residual {res:.3e})"
            )));
        }
        Ok(coeffs)
    }

    /// Membership residual of a matrix in the named group, when known.
    pub fn group_membership_residual(&self, mat: &DMatrix<f64>) -> Option<f64> {
        let name = self.name.as_deref()?;
        let d = mat.nrows();
        if name == "so3" {
            let r = (mat.transpose() * mat - DMatrix::identity(d, d)).amax();
            let det = mat.clone().determinant();
            return Some(r.max((det - 1.0).abs()));
        }
        if name == "heisenberg3" {
            let mut r: f64 = 0.0;
            for i in 0..d {
                for j in 0..d {
                    if i == j {
                        r = r.max((mat[(i, j)] - 1.0).abs());
                    } else if i > j {
                        r = r.max(mat[(i, j)].abs());
                    }
                }
            }
            return Some(r);
        }
        if name == "se2" {
            let rot = mat.view((0, 0), (2, 2));
            let mut r = (rot.transpose() * rot - DMatrix::identity(2, 2)).amax();
            r = r.max((mat[(2, 2)] - 1.0).abs());
            r = r.max(mat[(2, 0)].abs()).max(mat[(2, 1)].abs());
            return Some(r);
        }
        if name.starts_with("abelian") {
            let mut r: f64 = 0.0;
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        r = r.max(mat[(i, j)].abs());
                    } else if mat[(i, i)] <= 0.0 {
                        r = r.max(1.0);
                    }
                }
            }
            return Some(r);
        }
        None
    }
}

fn named_spec(name: &str) -> Result<LieAlgebraSpec> {
    if let Some(rest) = name.strip_prefix("abelian:") {
        let m: usize = rest
            .parse()
            .map_err(|_| Error::Invalid(format!("bad abelian dimension in {name:?}")))?;
        if m == 0 {
            return Err(Error::Invalid("abelian dimension must be positive".into()));
        }
        let mut basis = Vec::with_capacity(m);
        for alpha in 0..m {
            let mut b = DMatrix::zeros(m, m);
            b[(alpha, alpha)] = 1.0;
            basis.push(b);
        }
        return Ok(LieAlgebraSpec {
            dim: m,
            struct_consts: vec![0.0; m * m * m],
            metric: DMatrix::identity(m, m),
            matrix_basis: Some(basis),
        });
    }
    let c = |consts: &mut Vec<f64>, m: usize, alpha: usize, beta: usize, gamma: usize, v: f64| {
        consts[(alpha * m + beta) * m + gamma] = v;
        consts[(alpha * m + gamma) * m + beta] = -v;
    };
    match name {
        "so3" => {
            let m = 3;
            let mut consts = vec![0.0; 27];
            c(&mut consts, m, 2, 0, 1, 1.0); // [e1,e2] = e3
            c(&mut consts, m, 0, 1, 2, 1.0); // [e2,e3] = e1
            c(&mut consts, m, 1, 2, 0, 1.0); // [e3,e1] = e2
            let b1 = DMatrix::from_row_slice(3, 3, &[0., 0., 0., 0., 0., -1., 0., 1., 0.]);
            let b2 = DMatrix::from_row_slice(3, 3, &[0., 0., 1., 0., 0., 0., -1., 0., 0.]);
            let b3 = DMatrix::from_row_slice(3, 3, &[0., -1., 0., 1., 0., 0., 0., 0., 0.]);
            Ok(LieAlgebraSpec {
                dim: m,
                struct_consts: consts,
                metric: DMatrix::identity(3, 3),
                matrix_basis: Some(vec![b1, b2, b3]),
            })
        }
        "heisenberg3" => {
            let m = 3;
            let mut consts = vec![0.0; 27];
            c(&mut consts, m, 2, 0, 1, 1.0); // [e1,e2] = e3, center e3
            let b1 = DMatrix::from_row_slice(3, 3, &[0., 1., 0., 0., 0., 0., 0., 0., 0.]);
            let b2 = DMatrix::from_row_slice(3, 3, &[0., 0., 0., 0., 0., 1., 0., 0., 0.]);
            let b3 = DMatrix::from_row_slice(3, 3, &[0., 0., 1., 0., 0., 0., 0., 0., 0.]);
            Ok(LieAlgebraSpec {
                dim: m,
                struct_consts: consts,
                metric: DMatrix::identity(3, 3),
                matrix_basis: Some(vec![b1, b2, b3]),
            })
        }
        "se2" => {
            let m = 3;
            let mut consts = vec![0.0; 27];
            c(&mut consts, m, 2, 0, 1, 1.0); // [rot, tx] = ty
            c(&mut consts, m, 1, 0, 2, -1.0); // [rot, ty] = −tx
            let b1 = DMatrix::from_row_slice(3, 3, &[0., -1., 0., 1., 0., 0., 0., 0., 0.]);
            let b2 = DMatrix::from_row_slice(3, 3, &[0., 0., 1., 0., 0., 0., 0., 0., 0.]);
            let b3 = DMatrix::from_row_slice(3, 3, &[0., 0., 0., 0., 0., 1., 0., 0., 0.]);
            Ok(LieAlgebraSpec {
                dim: m,
                struct_consts: consts,
                metric: DMatrix::identity(3, 3),
                matrix_basis: Some(vec![b1, b2, b3]),
            })
        }
        _ => Err(Error::Invalid(format!(
            "unknown group key {name:?}; known keys: so3, heisenberg3, se2, abelian:<m>"
        ))),
    }
}

/// Matrix exponential by scaling-and-squaring with a Taylor kernel.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    let norm = a.amax();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / 2f64.powi(s as i32);
    let mut term = DMatrix::identity(d, d);
    let mut sum = DMatrix::identity(d, d);
    for k in 1..=40 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.amax() <= 1e-18 * sum.amax() {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Principal square root by the Denman–Beavers iteration.
fn sqrtm_db(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::identity(d, d);
    for _ in 0..60 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogDomain("singular iterate in matrix square root".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogDomain("singular iterate in matrix square root".into()))?;
        let y_next = 0.5 * (&y + z_inv);
        let z_next = 0.5 * (&z + y_inv);
        let delta = (&y_next - &y).amax();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * (1.0 + y.amax()) {
            break;
        }
    }
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::LogDomain(
            "square root iteration diverged".into(),
        ));
    }
    let res = (&y * &y - a).amax();
    if res > 1e-10 * (1.0 + a.amax()) {
        return Err(Error::LogDomain(format!(
            "square root iteration did not converge (residual {res:.3e})"
        )));
    }
    Ok(y)
}

/// Principal matrix logarithm by inverse scaling-and-squaring: repeated
/// square roots until ‖A − I‖ is small, then the alternating series for
/// log(I + X), then scaling back.
pub fn logm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::Invalid("logm needs a square matrix".into()));
    }
    if !a.iter().all(|v| v.is_finite()) {
        return Err(Error::LogDomain("non-finite matrix entries".into()));
    }
    let det = a.clone().determinant();
    if !(det.abs() > 1e-300) {
        return Err(Error::LogDomain("matrix is singular".into()));
    }
    let eye = DMatrix::identity(d, d);
    let mut cur = a.clone();
    let mut s = 0u32;
    while (&cur - &eye).amax() > 0.25 {
        if s >= 40 {
            return Err(Error::LogDomain(
                "inverse scaling did not reach the series domain".into(),
            ));
        }
        cur = sqrtm_db(&cur)?;
        s += 1;
    }
    let x = &cur - &eye;
    let mut power = x.clone();
    let mut sum = x.clone();
    for k in 2..=80 {
        power = &power * &x;
        let term = &power / (k as f64) * if k % 2 == 0 { -1.0 } else { 1.0 };
        sum += &term;
        if power.amax() / k as f64 <= 1e-18 * (1.0 + sum.amax()) {
            break;
        }
    }
    let log = sum * 2f64.powi(s as i32);
    if !log.iter().all(|v| v.is_finite()) {
        return Err(Error::LogDomain("logarithm series diverged".into()));
    }
    let res = (expm(&log) - a).amax();
    if res > 1e-8 * (1.0 + a.amax()) {
        return Err(Error::LogDomain(format!(
            "principal-branch validation failed (residual {res:.3e})"
        )));
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: usize, i: usize) -> AlgebraVector {
        AlgebraVector::from_fn(m, |k, _| if k == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn so3_validates_and_brackets_match_matrix_commutators() {
        let alg = LieAlgebra::named("so3").unwrap();
        let basis = alg.matrix_basis().unwrap().to_vec();
        for beta in 0..3 {
            for gamma in 0..3 {
                let comm = &basis[beta] * &basis[gamma] - &basis[gamma] * &basis[beta];
                let br = alg.bracket(&e(3, beta), &e(3, gamma)).unwrap();
                let mut recon = DMatrix::zeros(3, 3);
                for alpha in 0..3 {
                    recon += br[alpha] * &basis[alpha];
                }
                assert!((comm - recon).amax() < 1e-14);
            }
        }
        let r = alg.bracket(&e(3, 0), &e(3, 1)).unwrap();
        assert!((r - e(3, 2)).amax() < 1e-15);
    }

    #[test]
    fn abelian_and_affine_pass_jacobi() {
        let abelian = LieAlgebraSpec {
            dim: 2,
            struct_consts: vec![0.0; 8],
            metric: DMatrix::identity(2, 2),
            matrix_basis: None,
        };
        assert!(LieAlgebra::new(abelian).is_ok());

        // affine(1): [B1, B2] = B2 — satisfies Jacobi
        let mut consts = vec![0.0; 8];
        consts[(1 * 2 + 0) * 2 + 1] = 1.0;
        consts[(1 * 2 + 1) * 2 + 0] = -1.0;
        let affine = LieAlgebraSpec {
            dim: 2,
            struct_consts: consts,
            metric: DMatrix::identity(2, 2),
            matrix_basis: None,
        };
        assert!(LieAlgebra::new(affine).is_ok());
    }

    #[test]
    fn jacobi_violation_is_reported() {
        // c^1_{12} = 1 and c^2_{13} = 1 violate Jacobi at (1,2,3)
        let m = 3;
        let mut consts = vec![0.0; 27];
        consts[(0 * m + 0) * m + 1] = 1.0;
        consts[(0 * m + 1) * m + 0] = -1.0;
        consts[(1 * m + 0) * m + 2] = 1.0;
        consts[(1 * m + 2) * m + 0] = -1.0;
        let spec = LieAlgebraSpec {
            dim: m,
            struct_consts: consts,
            metric: DMatrix::identity(3, 3),
            matrix_basis: None,
        };
        assert!(matches!(
            LieAlgebra::new(spec).err(),
            Some(Error::JacobiViolation { .. })
        ));
    }

    #[test]
    fn antisymmetry_violation_is_reported() {
        let mut consts = vec![0.0; 8];
        consts[(0 * 2 + 0) * 2 + 0] = 1.0; // c^1_{11} ≠ 0
        let spec = LieAlgebraSpec {
            dim: 2,
            struct_consts: consts,
            metric: DMatrix::identity(2, 2),
            matrix_basis: None,
        };
        assert!(matches!(
            LieAlgebra::new(spec).err(),
            Some(Error::AntisymmetryViolation { .. })
        ));
    }

    #[test]
    fn degenerate_metric_rejected() {
        let spec = LieAlgebraSpec {
            dim: 2,
            struct_consts: vec![0.0; 8],
            metric: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
            matrix_basis: None,
        };
        assert!(matches!(
            LieAlgebra::new(spec).err(),
            Some(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn bracket_antisymmetric_and_heisenberg_center() {
        let alg = LieAlgebra::named("heisenberg3").unwrap();
        let xi = AlgebraVector::from_row_slice(&[0.3, -1.2, 0.7]);
        assert!(alg.bracket(&xi, &xi).unwrap().amax() < 1e-15);
        assert!(alg.bracket(&e(3, 0), &e(3, 2)).unwrap().amax() < 1e-15);
    }

    // ad† examples, checked against the defining m×m linear system.
    fn ad_dagger_oracle(alg: &LieAlgebra, xi: &AlgebraVector, zeta: &AlgebraVector) -> AlgebraVector {
        // solve g·η = (ad_ξ)ᵀ g ζ
        let rhs = alg.ad_matrix(xi).transpose() * (alg.metric() * zeta);
        alg.metric().clone().lu().solve(&rhs).unwrap()
    }

    #[test]
    fn ad_dagger_matches_linear_system_oracle() {
        let so3 = LieAlgebra::named("so3").unwrap();
        let got = so3.ad_dagger(&e(3, 0), &e(3, 1)).unwrap();
        assert!((&got + e(3, 2)).amax() < 1e-14, "ad†(e1,e2) = −e3, got {got}");

        let h3 = LieAlgebra::named("heisenberg3").unwrap();
        let got = h3.ad_dagger(&e(3, 0), &e(3, 2)).unwrap();
        assert!((&got - e(3, 1)).amax() < 1e-14, "ad†(e1,e3) = e2, got {got}");

        for alg in [so3, h3] {
            for seed in 0..5u32 {
                let xi = AlgebraVector::from_fn(3, |i, _| ((seed as f64 + 1.3) * (i as f64 + 0.7)).sin());
                let zeta = AlgebraVector::from_fn(3, |i, _| ((seed as f64 - 0.4) * (i as f64 + 1.9)).cos());
                let got = alg.ad_dagger(&xi, &zeta).unwrap();
                let want = ad_dagger_oracle(&alg, &xi, &zeta);
                assert!((got - want).amax() < 1e-13);
            }
        }
    }

    #[test]
    fn coad_consistent_with_musical_isomorphisms() {
        let so3 = LieAlgebra::named("so3").unwrap();
        // coad(e1, e2♭) = −e3♭ with the identity metric
        let got = so3.coad(&e(3, 0), &so3.flat(&e(3, 1))).unwrap();
        assert!((&got + so3.flat(&e(3, 2))).amax() < 1e-14);
        // coad(ξ, ξ♭) = 0 for a bi-invariant metric
        let xi = AlgebraVector::from_row_slice(&[0.4, -0.2, 1.1]);
        assert!(so3.coad(&xi, &so3.flat(&xi)).unwrap().amax() < 1e-14);
        // ad†_ξ(ζ) = ♯ coad_ξ (♭ζ) on a non-bi-invariant algebra
        let h3 = LieAlgebra::named("heisenberg3").unwrap();
        let zeta = AlgebraVector::from_row_slice(&[-0.3, 0.9, 0.5]);
        let lhs = h3.ad_dagger(&xi, &zeta).unwrap();
        let rhs = h3.sharp(&h3.coad(&xi, &h3.flat(&zeta)).unwrap());
        assert!((lhs - rhs).amax() < 1e-14);
    }

    #[test]
    fn musicals_scale_and_invert() {
        let mut spec = named_spec("so3").unwrap();
        spec.metric = DMatrix::from_row_slice(3, 3, &[2., 0., 0., 0., 1., 0., 0., 0., 1.]);
        let alg = LieAlgebra::new(spec).unwrap();
        let f = alg.flat(&e(3, 0));
        assert!((f - 2.0 * e(3, 0)).amax() < 1e-15);
        for seed in 0..100u32 {
            let xi = AlgebraVector::from_fn(3, |i, _| ((seed as f64) * 0.37 + i as f64).sin());
            assert!((alg.sharp(&alg.flat(&xi)) - xi).amax() < 1e-14);
        }
    }

    #[test]
    fn adjointness_identity_random_vectors() {
        for name in ["so3", "heisenberg3", "se2", "abelian:3"] {
            let alg = LieAlgebra::named(name).unwrap();
            for seed in 0..20u32 {
                let s = seed as f64;
                let xi = AlgebraVector::from_fn(3, |i, _| (s * 0.61 + i as f64 * 1.7).sin());
                let eta = AlgebraVector::from_fn(3, |i, _| (s * 0.23 - i as f64 * 0.9).cos());
                let zeta = AlgebraVector::from_fn(3, |i, _| (s * 1.11 + i as f64 * 0.4).sin());
                let lhs = alg.inner(&alg.bracket(&xi, &eta).unwrap(), &zeta);
                let rhs = alg.inner(&eta, &alg.ad_dagger(&xi, &zeta).unwrap());
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bi_invariance_detector() {
        let mut spec = named_spec("so3").unwrap();
        spec.metric *= 2.5;
        let so3 = LieAlgebra::new(spec).unwrap();
        assert!(so3.is_bi_invariant());
        let h3 = LieAlgebra::named("heisenberg3").unwrap();
        assert!(!h3.is_bi_invariant());
        assert!(h3.bi_invariance_residual() > 0.5);
    }

    #[test]
    fn exp_zero_is_identity() {
        let alg = LieAlgebra::named("se2").unwrap();
        let g = alg.exp(&AlgebraVector::zeros(3)).unwrap();
        assert!((g.mat - DMatrix::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn exp_so3_quarter_turn_matches_rodrigues() {
        let alg = LieAlgebra::named("so3").unwrap();
        let g = alg.exp(&(std::f64::consts::FRAC_PI_2 * e(3, 2))).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[0., -1., 0., 1., 0., 0., 0., 0., 1.]);
        assert!((g.mat - want).amax() < 1e-14);
    }

    #[test]
    fn heisenberg_exp_log_is_exact() {
        // nilpotent of degree 3: the series terminates, log∘exp is exact
        let alg = LieAlgebra::named("heisenberg3").unwrap();
        let xi = AlgebraVector::from_row_slice(&[1.7, -2.3, 0.9]);
        let g = alg.exp(&xi).unwrap();
        // truncated-series oracle: exp(M) = I + M + M²/2
        let basis = alg.matrix_basis().unwrap();
        let m_mat = 1.7 * &basis[0] - 2.3 * &basis[1] + 0.9 * &basis[2];
        let oracle = DMatrix::identity(3, 3) + &m_mat + 0.5 * &m_mat * &m_mat;
        assert!((&g.mat - oracle).amax() < 1e-14);
        let back = alg.log(&g).unwrap();
        assert!((back - xi).amax() < 1e-12);
    }

    #[test]
    fn exp_log_round_trip_within_injectivity_radius() {
        for name in ["so3", "se2", "heisenberg3", "abelian:3"] {
            let alg = LieAlgebra::named(name).unwrap();
            for seed in 0..30u32 {
                let s = seed as f64;
                let xi = AlgebraVector::from_fn(3, |i, _| 0.8 * (s * 0.77 + i as f64 * 2.1).sin());
                let back = alg.log(&alg.exp(&xi).unwrap()).unwrap();
                assert!((back - xi).amax() < 1e-10, "{name} round trip failed");
            }
        }
    }

    #[test]
    fn log_rejects_half_turn() {
        let alg = LieAlgebra::named("so3").unwrap();
        // rotation by π: eigenvalues {1, −1, −1}, outside the principal branch
        let g = alg.exp(&(std::f64::consts::PI * e(3, 0))).unwrap();
        assert!(alg.log(&g).is_err());
    }

    #[test]
    fn membership_residuals() {
        let so3 = LieAlgebra::named("so3").unwrap();
        let g = so3.exp(&AlgebraVector::from_row_slice(&[0.2, 0.4, -0.3])).unwrap();
        assert!(so3.group_membership_residual(&g.mat).unwrap() < 1e-12);
        let bad = DMatrix::from_row_slice(3, 3, &[1., 0.2, 0., 0., 1., 0., 0., 0., 1.]);
        assert!(so3.group_membership_residual(&bad).unwrap() > 0.1);
    }

    #[test]
    fn unknown_group_key_lists_known() {
        let err = LieAlgebra::named("su5").unwrap_err().to_string();
        assert!(err.contains("so3"));
    }
}
