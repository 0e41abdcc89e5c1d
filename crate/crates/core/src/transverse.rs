//! Transverse symbol of the strip operator: closed-form solution bases,
//! dispersion determinants, kernel vectors, normalized mode profiles and a
//! Hermite finite-element solver for `𝓛(λ)φ = g` on (0, 1).
//!
//! For a fixed exponent `λ`, `e^{λx}φ(y)` solves `Δ²u − k⁴u = 0` iff
//! `(λ² + ∂yy)²φ − k⁴φ = 0`. All closed forms here are written through
//! `w± = λ² ± k²` with `cos(√w y)` and `sin(√w y)/√w`, both entire in `w`, so
//! nothing depends on the square-root branch and `λ⁴ = k⁴` is a removable
//! point rather than a singular one.

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::hermite::{element_matrices, EndConstraint, HermiteGrid1D};
use crate::numerics::{csqrt, re, sinc, GaussRule, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Edge condition on the lateral boundaries `y = 0` and `y = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// `u = Mu = 0`, equivalently `u = u_yy = 0` on straight edges.
    SimplySupported,
    /// `u = ∂n u = 0`.
    Clamped,
}

/// `θ_p(y) = √2 sin(πpy)`.
pub fn theta(p: usize, y: f64) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidParameter("theta: p must be at least 1".into()));
    }
    Ok(SQRT_2 * (PI * p as f64 * y).sin())
}

/// `θ_p` and its first three derivatives. Panics on `p = 0`.
pub fn theta_derivs(p: usize, y: f64) -> [f64; 4] {
    assert!(p >= 1, "theta index starts at 1");
    let w = PI * p as f64;
    let (s, c) = (w * y).sin_cos();
    [SQRT_2 * s, SQRT_2 * w * c, -SQRT_2 * w * w * s, -SQRT_2 * w * w * w * c]
}

/// Values and derivatives (orders 0..=3) of a pair of basis functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisPair {
    pub first: [C64; 4],
    pub second: [C64; 4],
}

/// `(cos(√w y), sin(√w y)/√w)`.
fn trig(w: C64, y: f64) -> (C64, C64) {
    let z = csqrt(w) * y;
    (z.cos(), sinc(z) * y)
}

/// Clamped-at-zero basis `a₁, a₂` with a general complex `k²`.
pub(crate) fn basis_a_ksq(lambda: C64, k_sq: C64, y: f64) -> BasisPair {
    let l2 = lambda * lambda;
    let (wp, wm) = (l2 + k_sq, l2 - k_sq);
    let (cp, sp) = trig(wp, y);
    let (cm, sm) = trig(wm, y);
    let a1 = [sp - sm, cp - cm, -wp * sp + wm * sm, -wp * cp + wm * cm];
    let a2 = [a1[1], a1[2], a1[3], wp * wp * sp - wm * wm * sm];
    BasisPair { first: a1, second: a2 }
}

/// `a₁(y) = sin(√(λ²+k²)y)/√(λ²+k²) − sin(√(λ²−k²)y)/√(λ²−k²)` and
/// `a₂ = a₁'`, which satisfy `φ(0) = φ'(0) = 0`.
///
/// The `sin z / z` form is evaluated by a series near `z = 0`, so the
/// function stays accurate through `λ⁴ = k⁴`, where it reduces to the
/// `b`-basis of [`basis_clamped_b`].
pub fn basis_clamped_a(lambda: C64, k: f64, y: f64) -> BasisPair {
    basis_a_ksq(lambda, re(k * k), y)
}

/// `b₁(y) = sin(√2λy)/(√2λ) − y`, `b₂(y) = cos(√2λy) − 1`, the basis used
/// when `λ⁴ = k⁴`.
pub fn basis_clamped_b(lambda: C64, k: f64, y: f64) -> Result<BasisPair> {
    let k4 = k.powi(4);
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidParameter("basis_clamped_b: lambda = 0".into()));
    }
    if (lambda.powi(4) - k4).norm() > 1e-6 * k4 {
        return Err(Error::InvalidParameter(format!(
            "basis_clamped_b: lambda = {lambda} does not satisfy lambda^4 = k^4"
        )));
    }
    let w = 2.0 * lambda * lambda;
    let (cw, sw) = trig(w, y);
    let b1 = [sw - y, cw - 1.0, -w * sw, -w * cw];
    let b2 = [cw - 1.0, -w * sw, -w * cw, w * w * sw];
    Ok(BasisPair { first: b1, second: b2 })
}

/// Basis vanishing with its second derivative at `y = 0`:
/// `sin(√(λ²±k²) y)/√(λ²±k²)`.
pub(crate) fn basis_simply_ksq(lambda: C64, k_sq: C64, y: f64) -> BasisPair {
    let l2 = lambda * lambda;
    let mut out = [[C64::new(0.0, 0.0); 4]; 2];
    for (slot, w) in out.iter_mut().zip([l2 + k_sq, l2 - k_sq]) {
        let (cw, sw) = trig(w, y);
        *slot = [sw, cw, -w * sw, -w * cw];
    }
    BasisPair { first: out[0], second: out[1] }
}

fn basis_ksq(lambda: C64, k_sq: C64, bc: BoundaryKind, y: f64) -> BasisPair {
    match bc {
        BoundaryKind::Clamped => basis_a_ksq(lambda, k_sq, y),
        BoundaryKind::SimplySupported => basis_simply_ksq(lambda, k_sq, y),
    }
}

/// The 2×2 system imposing the conditions at `y = 1`.
///
/// Clamped: rows `φ(1)`, `φ'(1)` on the `a`-basis (the matrix 𝔸(λ)).
/// Simply supported: rows `φ(1)`, `φ''(1)`.
pub(crate) fn dispersion_matrix_ksq(lambda: C64, k_sq: C64, bc: BoundaryKind) -> [[C64; 2]; 2] {
    let b = basis_ksq(lambda, k_sq, bc, 1.0);
    let d = match bc {
        BoundaryKind::Clamped => 1,
        BoundaryKind::SimplySupported => 2,
    };
    [[b.first[0], b.second[0]], [b.first[d], b.second[d]]]
}

pub fn dispersion_matrix(lambda: C64, k: f64, bc: BoundaryKind) -> [[C64; 2]; 2] {
    dispersion_matrix_ksq(lambda, re(k * k), bc)
}

/// 𝔹(λ) for `λ⁴ = k⁴`.
pub fn dispersion_matrix_b(lambda: C64, k: f64) -> Result<[[C64; 2]; 2]> {
    let b = basis_clamped_b(lambda, k, 1.0)?;
    Ok([[b.first[0], b.second[0]], [b.first[1], b.second[1]]])
}

pub(crate) fn det_dispersion_ksq(lambda: C64, k_sq: C64, bc: BoundaryKind) -> C64 {
    match bc {
        BoundaryKind::Clamped => {
            let a = dispersion_matrix_ksq(lambda, k_sq, bc);
            a[0][0] * a[1][1] - a[0][1] * a[1][0]
        }
        BoundaryKind::SimplySupported => {
            let l2 = lambda * lambda;
            sinc(csqrt(l2 + k_sq)) * sinc(csqrt(l2 - k_sq))
        }
    }
}

/// Dispersion function whose zeros are exactly the modal exponents.
///
/// Clamped: `det 𝔸(λ)`. Simply supported:
/// `sinc√(λ²+k²) · sinc√(λ²−k²)`, which vanishes exactly at `±iη_p` and
/// `±γ_p`. The plain `sin·sin` product would add the spurious zeros
/// `λ = ±k, ±ik` and is not single valued.
pub fn det_dispersion(lambda: C64, k: f64, bc: BoundaryKind) -> C64 {
    det_dispersion_ksq(lambda, re(k * k), bc)
}

/// Magnitude used to judge whether a determinant is "small": the product of
/// the row norms of the 2×2 system (Hadamard's bound).
pub(crate) fn det_scale_ksq(lambda: C64, k_sq: C64, bc: BoundaryKind) -> f64 {
    match bc {
        BoundaryKind::Clamped => {
            let a = dispersion_matrix_ksq(lambda, k_sq, bc);
            let r0 = (a[0][0].norm_sqr() + a[0][1].norm_sqr()).sqrt();
            let r1 = (a[1][0].norm_sqr() + a[1][1].norm_sqr()).sqrt();
            (r0 * r1).max(f64::MIN_POSITIVE)
        }
        BoundaryKind::SimplySupported => {
            let l2 = lambda * lambda;
            let f = |w: C64| {
                let s = csqrt(w);
                (1.0 + s.im.abs()).exp() / (1.0 + s.norm())
            };
            f(l2 + k_sq) * f(l2 - k_sq)
        }
    }
}

/// Clamped propagating dispersion function on `λ = iτk`, `τ ∈ [0, 1]`:
///
/// `h_k(τ) = (√((1−τ²)/(1+τ²)) − √((1+τ²)/(1−τ²))) sin α sinh β − (2 − 2 cos α cosh β)`
/// with `α = k√(1−τ²)`, `β = k√(1+τ²)`. It coincides with `det 𝔸(iτk)`.
/// At `τ = 1` the value is the continuous limit.
pub fn h_k(tau: f64, k: f64) -> f64 {
    let alpha = k * (1.0 - tau * tau).max(0.0).sqrt();
    let beta = k * (1.0 + tau * tau).sqrt();
    let sa = crate::numerics::sinc_real(alpha);
    (alpha / beta) * alpha.sin() * beta.sinh() - beta * sa * beta.sinh() - 2.0
        + 2.0 * alpha.cos() * beta.cosh()
}

/// `h_k(τ) / cosh(k√(1+τ²))`: same zeros, no overflow for large `k`.
pub fn h_k_scaled(tau: f64, k: f64) -> f64 {
    let alpha = k * (1.0 - tau * tau).max(0.0).sqrt();
    let beta = k * (1.0 + tau * tau).sqrt();
    let sa = crate::numerics::sinc_real(alpha);
    let th = beta.tanh();
    let sech = 2.0 * (-beta).exp() / (1.0 + (-2.0 * beta).exp());
    (alpha / beta) * alpha.sin() * th - beta * sa * th - 2.0 * sech + 2.0 * alpha.cos()
}

/// Kernel of the 2×2 dispersion system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelVector {
    /// Unit right singular vector for the smallest singular value, with its
    /// first nonzero entry made real positive.
    pub coeffs: [C64; 2],
    /// Singular values, smallest first.
    pub sigma: [f64; 2],
    /// Both singular values vanish: every combination of the two basis
    /// functions is a mode (geometric multiplicity two).
    pub degenerate: bool,
}

impl KernelVector {
    pub fn dimension(&self) -> usize {
        if self.degenerate {
            2
        } else {
            1
        }
    }
}

/// Singular values (ascending) and right singular vectors of a complex 2×2.
fn svd2(a: [[C64; 2]; 2]) -> ([f64; 2], [[C64; 2]; 2]) {
    // AᴴA = [[p, q], [q̄, r]]
    let p = a[0][0].norm_sqr() + a[1][0].norm_sqr();
    let r = a[0][1].norm_sqr() + a[1][1].norm_sqr();
    let q = a[0][0].conj() * a[0][1] + a[1][0].conj() * a[1][1];
    let half = 0.5 * (p - r);
    let disc = (half * half + q.norm_sqr()).sqrt();
    let big = 0.5 * (p + r) + disc;
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).norm();
    let smax = big.sqrt();
    let smin = if smax > 0.0 { det / smax } else { 0.0 };
    // Dominant eigenvector of AᴴA: two algebraically equivalent candidates,
    // keep the better conditioned one.
    let c1 = [q, re(big - p)];
    let c2 = [re(big - r), q.conj()];
    let n1 = (c1[0].norm_sqr() + c1[1].norm_sqr()).sqrt();
    let n2 = (c2[0].norm_sqr() + c2[1].norm_sqr()).sqrt();
    let v1 = if n1 >= n2 && n1 > 0.0 {
        [c1[0] / n1, c1[1] / n1]
    } else if n2 > 0.0 {
        [c2[0] / n2, c2[1] / n2]
    } else {
        [re(1.0), re(0.0)]
    };
    let v0 = [-v1[1].conj(), v1[0].conj()];
    ([smin, smax], [v0, v1])
}

/// Rotate so that the first entry above `tol·‖v‖` is real positive.
fn fix_phase(v: [C64; 2]) -> [C64; 2] {
    let nrm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let lead = if v[0].norm() > 1e-12 * nrm { v[0] } else { v[1] };
    let ph = lead.conj() / lead.norm();
    [v[0] * ph, v[1] * ph]
}

pub(crate) fn kernel_vector_ksq(lambda: C64, k_sq: C64, bc: BoundaryKind) -> Result<KernelVector> {
    let a = dispersion_matrix_ksq(lambda, k_sq, bc);
    let ([smin, smax], [v0, _]) = svd2(a);
    let reference = 1.0 + lambda.norm_sqr() + k_sq.norm();
    let degenerate = smax <= 1e-8 * reference;
    if !degenerate && smin > 1e-6 * smax {
        return Err(Error::NotAnEigenvalue { lambda, sigma_min: smin, sigma_max: smax });
    }
    let coeffs = if degenerate { [re(1.0), re(0.0)] } else { fix_phase(v0) };
    Ok(KernelVector { coeffs, sigma: [smin, smax], degenerate })
}

/// Kernel vector of the dispersion system at an eigenvalue `λ`.
///
/// Fails with [`Error::NotAnEigenvalue`] when the smallest singular value is
/// not negligible against the largest. At points of `𝒦 × Λ_part` both
/// singular values vanish; the result is then flagged `degenerate`.
pub fn kernel_vector(lambda: C64, k: f64, bc: BoundaryKind) -> Result<KernelVector> {
    kernel_vector_ksq(lambda, re(k * k), bc)
}

/// A transverse profile `φ` with `e^{λx}φ(y)` solving the homogeneous problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseMode {
    pub lambda: C64,
    pub k_sq: C64,
    pub bc: BoundaryKind,
    /// Coefficients on the closed-form basis, normalization included.
    pub kernel_coeffs: [C64; 2],
    /// Positive factor that was applied to the unit kernel vector.
    pub norm_constant: f64,
    /// `λ ∈ iℝ∖{0}` at real `k`: normalized by the energy flux
    /// `4|η|∫(|φ'|² + η²|φ|²) = 1`; otherwise `∫|φ|² = 1`.
    pub propagating: bool,
}

fn profile_integrals(eval: &dyn Fn(f64) -> [C64; 4]) -> (f64, f64) {
    let rule = GaussRule::new(16);
    let mut l2 = 0.0;
    let mut d1 = 0.0;
    for (y, w) in rule.composite(0.0, 1.0, 16) {
        let v = eval(y);
        l2 += w * v[0].norm_sqr();
        d1 += w * v[1].norm_sqr();
    }
    (l2, d1)
}

impl TransverseMode {
    /// Modes for the eigenvalue `λ`: one in general, two orthonormal ones when
    /// the kernel is degenerate.
    pub fn at(lambda: C64, k: f64, bc: BoundaryKind) -> Result<Vec<TransverseMode>> {
        Self::at_ksq(lambda, re(k * k), bc)
    }

    pub(crate) fn at_ksq(lambda: C64, k_sq: C64, bc: BoundaryKind) -> Result<Vec<TransverseMode>> {
        let kv = kernel_vector_ksq(lambda, k_sq, bc)?;
        let propagating = k_sq.im == 0.0
            && lambda.norm() > 0.0
            && lambda.re.abs() <= 1e-12 * lambda.norm();
        if kv.degenerate {
            // Gram-Schmidt on the two basis functions in L²(0, 1).
            let raw = |c: [C64; 2]| TransverseMode {
                lambda,
                k_sq,
                bc,
                kernel_coeffs: c,
                norm_constant: 1.0,
                propagating: false,
            };
            let e1 = raw([re(1.0), re(0.0)]);
            let e2 = raw([re(0.0), re(1.0)]);
            let (n1, _) = profile_integrals(&|y| e1.eval(y));
            let u1 = raw([re(1.0 / n1.sqrt()), re(0.0)]);
            let rule = GaussRule::new(16);
            let mut ip = C64::new(0.0, 0.0);
            for (y, w) in rule.composite(0.0, 1.0, 16) {
                ip += w * e2.eval(y)[0] * u1.eval(y)[0].conj();
            }
            let w2 = raw([-ip * u1.kernel_coeffs[0], re(1.0)]);
            let (n2, _) = profile_integrals(&|y| w2.eval(y));
            let s = 1.0 / n2.sqrt();
            let u2 = raw([w2.kernel_coeffs[0] * s, re(s)]);
            return Ok(vec![u1, u2]);
        }
        let unit = TransverseMode {
            lambda,
            k_sq,
            bc,
            kernel_coeffs: kv.coeffs,
            norm_constant: 1.0,
            propagating,
        };
        let (l2, d1) = profile_integrals(&|y| unit.eval(y));
        let scale = if propagating {
            let eta = lambda.im.abs();
            1.0 / (4.0 * eta * (d1 + eta * eta * l2)).sqrt()
        } else {
            1.0 / l2.sqrt()
        };
        Ok(vec![TransverseMode {
            kernel_coeffs: [kv.coeffs[0] * scale, kv.coeffs[1] * scale],
            norm_constant: scale,
            ..unit
        }])
    }

    /// `φ` and its derivatives up to order 3 at `y`.
    pub fn eval(&self, y: f64) -> [C64; 4] {
        let b = basis_ksq(self.lambda, self.k_sq, self.bc, y);
        let mut out = [C64::new(0.0, 0.0); 4];
        for (d, o) in out.iter_mut().enumerate() {
            *o = self.kernel_coeffs[0] * b.first[d] + self.kernel_coeffs[1] * b.second[d];
        }
        out
    }

    /// `(∫|φ|², ∫|φ'|²)`.
    pub fn norms(&self) -> (f64, f64) {
        profile_integrals(&|y| self.eval(y))
    }
}

/// Right-hand side of a transverse solve.
pub enum SymbolRhs<'a> {
    /// A function `g(y)`; the load `∫ g ψ` is formed by Gauss quadrature.
    Function(&'a dyn Fn(f64) -> C64),
    /// An already assembled load vector in the grid's global numbering.
    Load(&'a [C64]),
}

/// Assembled transverse operator on a Hermite grid, reusable across `λ`.
///
/// The bilinear form `∫(λ²φ + φ'')(λ²ψ + ψ'') − k⁴φψ` is expanded as
/// `(λ⁴ − k⁴)M − 2λ²G + K`, so only three real matrices are stored.
#[derive(Debug, Clone)]
pub struct SymbolOperator {
    pub grid: HermiteGrid1D,
    m: Vec<[f64; 4]>,
    g: Vec<[f64; 4]>,
    k: Vec<[f64; 4]>,
}

impl SymbolOperator {
    pub fn new(grid: HermiteGrid1D) -> Self {
        // Global matrices stored as 7 diagonals (offsets −3..=3) per row,
        // of which only 4 are kept thanks to symmetry: offsets 0..=3.
        let n = grid.n_dofs();
        let (me, ge, ke) = element_matrices(grid.h());
        let mut m = vec![[0.0; 4]; n];
        let mut g = vec![[0.0; 4]; n];
        let mut k = vec![[0.0; 4]; n];
        for e in 0..grid.n_elems {
            let dofs = grid.element_dofs(e);
            for a in 0..4 {
                for b in a..4 {
                    let (i, off) = (dofs[a], dofs[b] - dofs[a]);
                    m[i][off] += me[a][b];
                    g[i][off] += ge[a][b];
                    k[i][off] += ke[a][b];
                }
            }
        }
        SymbolOperator { grid, m, g, k }
    }

    pub fn clamped(n_elems: usize) -> Self {
        SymbolOperator::new(HermiteGrid1D::new(n_elems, EndConstraint::ValueAndSlope))
    }

    pub fn simply_supported(n_elems: usize) -> Self {
        SymbolOperator::new(HermiteGrid1D::new(n_elems, EndConstraint::Value))
    }

    /// Reduced (free-dof) banded matrix of the form at `(λ, k⁴)`.
    pub fn matrix(&self, lambda: C64, k4: C64) -> BandedMatrix {
        let l2 = lambda * lambda;
        let cm = l2 * l2 - k4;
        let cg = -2.0 * l2;
        let n = self.grid.n_free();
        let mut a = BandedMatrix::zeros(n, 3, 3);
        for i in 0..self.grid.n_dofs() {
            let Some(fi) = self.grid.free_index(i) else { continue };
            for off in 0..4 {
                let j = i + off;
                if j >= self.grid.n_dofs() {
                    break;
                }
                let Some(fj) = self.grid.free_index(j) else { continue };
                let v = cm * self.m[i][off] + cg * self.g[i][off] + self.k[i][off];
                a.add(fi, fj, v);
                if off > 0 {
                    a.add(fj, fi, v);
                }
            }
        }
        a
    }

    /// Solve for the global coefficient vector given a global load vector.
    pub fn solve_load(&self, lambda: C64, k4: C64, load: &[C64]) -> Result<Vec<C64>> {
        let a = self.matrix(lambda, k4);
        let lu = a.factor().ok_or(Error::NearSingularSymbol { lambda, estimate: f64::INFINITY })?;
        if lu.pivot_ratio > 1e14 {
            return Err(Error::NearSingularSymbol { lambda, estimate: lu.pivot_ratio });
        }
        let mut rhs = vec![C64::new(0.0, 0.0); self.grid.n_free()];
        for (i, &b) in load.iter().enumerate() {
            if let Some(fi) = self.grid.free_index(i) {
                rhs[fi] = b;
            }
        }
        lu.solve_in_place(&mut rhs);
        Ok(self.grid.expand(&rhs))
    }

    /// Apply the form: `(A(λ)φ)_i = B(φ, ψ_i)` in the global numbering,
    /// constrained rows set to zero.
    pub fn apply(&self, lambda: C64, k4: C64, coef: &[C64]) -> Vec<C64> {
        let l2 = lambda * lambda;
        let cm = l2 * l2 - k4;
        let cg = -2.0 * l2;
        let n = self.grid.n_dofs();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for off in 0..4 {
                let j = i + off;
                if j >= n {
                    break;
                }
                let v = cm * self.m[i][off] + cg * self.g[i][off] + self.k[i][off];
                out[i] += v * coef[j];
                if off > 0 {
                    out[j] += v * coef[i];
                }
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            if self.grid.free_index(i).is_none() {
                *o = C64::new(0.0, 0.0);
            }
        }
        out
    }
}

impl SymbolOperator {
    fn apply_stored(&self, mat: &[[f64; 4]], coef: &[C64]) -> Vec<C64> {
        let n = self.grid.n_dofs();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for (off, &v) in mat[i].iter().enumerate() {
                let j = i + off;
                if j >= n {
                    break;
                }
                out[i] += v * coef[j];
                if off > 0 {
                    out[j] += v * coef[i];
                }
            }
        }
        out
    }

    /// `M c` with `M_ij = ∫ψ_i ψ_j`, global numbering, no constraints applied.
    pub fn mass_apply(&self, coef: &[C64]) -> Vec<C64> {
        self.apply_stored(&self.m, coef)
    }

    /// `G c` with `G_ij = ∫ψ_i' ψ_j'`.
    pub fn slope_apply(&self, coef: &[C64]) -> Vec<C64> {
        self.apply_stored(&self.g, coef)
    }
}

/// Galerkin solution of `𝓛(λ)φ = g` with essential conditions of `bc` at both
/// ends; returns the global Hermite coefficients (value, slope per node).
pub fn solve_symbol(
    lambda: C64,
    k: f64,
    rhs: SymbolRhs<'_>,
    grid: &HermiteGrid1D,
) -> Result<Vec<C64>> {
    let op = SymbolOperator::new(grid.clone());
    let load = match rhs {
        SymbolRhs::Function(g) => grid.load_vector(g, 4),
        SymbolRhs::Load(b) => b.to_vec(),
    };
    op.solve_load(lambda, re(k.powi(4)), &load)
}
