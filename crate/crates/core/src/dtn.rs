//! Dirichlet-to-Neumann blocks for the simply supported strip.
//!
//! On a cross-section `Σ_{±L}` the traces are expanded as
//! `u = Σ g_p θ_p`, `∂_n u = Σ h_p θ_p`, and the outgoing extension has
//! `(Nu, Mu)_p = T_p (g_p, h_p)`. Both ends use the same `T_p`.

use crate::error::{Error, Result};
use crate::numerics::{C64, I};
use crate::spectrum::{check_not_threshold, eta, gamma};
use crate::transverse::BoundaryKind;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default number of transverse modes kept in the truncated operator.
pub const DEFAULT_P_MAX: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Sign of the outward normal: `+1` at `x = L`, `−1` at `x = −L`.
    pub fn normal_sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

pub(crate) fn check_nu(nu: f64) -> Result<()> {
    if (0.0..1.0).contains(&nu) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("Poisson ratio must lie in [0, 1), got {nu}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtnBlock {
    pub p: usize,
    /// `μ_p = π²p²`.
    pub mu: f64,
    pub eta: C64,
    pub gamma: f64,
    pub t: [[C64; 2]; 2],
}

/// `T_p = [[iγη(γ−iη), iγη−νμ], [iγη−νμ, −(γ−iη)]]`.
///
/// For `p > ⌊k/π⌋`, `η_p = iβ_p` and every entry is real.
pub fn dtn_block(p: usize, k: f64, nu: f64) -> Result<DtnBlock> {
    if p == 0 {
        return Err(Error::InvalidParameter("mode index starts at 1".into()));
    }
    check_nu(nu)?;
    check_not_threshold(k, BoundaryKind::SimplySupported)?;
    Ok(block_unchecked(p, k, nu))
}

fn block_unchecked(p: usize, k: f64, nu: f64) -> DtnBlock {
    let mu = (PI * p as f64).powi(2);
    let e = eta(p, k);
    let g = gamma(p, k);
    let ige = I * g * e;
    let off = ige - nu * mu;
    let t = [[ige * (g - I * e), off], [off, -(g - I * e)]];
    DtnBlock { p, mu, eta: e, gamma: g, t }
}

impl DtnBlock {
    /// `(Nu_p, Mu_p) = T_p (g_p, h_p)`.
    pub fn apply(&self, g: C64, h: C64) -> (C64, C64) {
        (self.t[0][0] * g + self.t[0][1] * h, self.t[1][0] * g + self.t[1][1] * h)
    }

    /// Mode amplitudes `(a_p, b_p)` of `a e^{iη s} + b e^{−γ s}` (with `s` the
    /// outward distance from the section) from its traces.
    pub fn outgoing_amplitudes(&self, g: C64, h: C64) -> (C64, C64) {
        let d = self.gamma + I * self.eta;
        ((self.gamma * g + h) / d, (I * self.eta * g - h) / d)
    }

    /// Traces of `a e^{iη s} + b e^{−γ s}`: `g = a + b`, `h = iηa − γb`.
    pub fn traces_of(&self, a: C64, b: C64) -> (C64, C64) {
        (a + b, I * self.eta * a - self.gamma * b)
    }

    pub fn is_propagating(&self) -> bool {
        self.eta.im == 0.0 && self.eta.re > 0.0
    }
}

/// The blocks `T_1..T_{P_max}` for one `(k, ν)`.
#[derive(Debug, Clone)]
pub struct DtnOperator {
    pub k: f64,
    pub nu: f64,
    pub blocks: Vec<DtnBlock>,
}

impl DtnOperator {
    pub fn new(k: f64, nu: f64, p_max: usize) -> Result<Self> {
        if p_max == 0 {
            return Err(Error::InvalidParameter("P_max must be at least 1".into()));
        }
        check_nu(nu)?;
        check_not_threshold(k, BoundaryKind::SimplySupported)?;
        let blocks = (1..=p_max).map(|p| block_unchecked(p, k, nu)).collect();
        Ok(DtnOperator { k, nu, blocks })
    }

    pub fn p_max(&self) -> usize {
        self.blocks.len()
    }

    /// Number of propagating modes.
    pub fn n_propagating(&self) -> usize {
        self.blocks.iter().filter(|b| b.is_propagating()).count()
    }
}

/// Modal trace coefficients on one cross-section, indexed `p = 1..P_max`
/// (stored from index 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCoefficients {
    pub side: Side,
    pub g: Vec<C64>,
    pub h: Vec<C64>,
}

impl TraceCoefficients {
    pub fn new(side: Side, g: Vec<C64>, h: Vec<C64>) -> Result<Self> {
        if g.len() != h.len() {
            return Err(Error::InvalidParameter(format!(
                "trace coefficient lengths differ: {} vs {}",
                g.len(),
                h.len()
            )));
        }
        Ok(TraceCoefficients { side, g, h })
    }

    pub fn zeros(side: Side, p_max: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); p_max];
        TraceCoefficients { side, g: z.clone(), h: z }
    }

    pub fn p_max(&self) -> usize {
        self.g.len()
    }
}

/// `(Nu_p, Mu_p)` for every mode present in `tc`.
pub fn apply_dtn(tc: &TraceCoefficients, k: f64, nu: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    let op = DtnOperator::new(k, nu, tc.p_max().max(1))?;
    let mut n_out = Vec::with_capacity(tc.p_max());
    let mut m_out = Vec::with_capacity(tc.p_max());
    for (b, (&g, &h)) in op.blocks.iter().zip(tc.g.iter().zip(&tc.h)) {
        let (n, m) = b.apply(g, h);
        n_out.push(n);
        m_out.push(m);
    }
    Ok((n_out, m_out))
}

/// `t(u, u)` together with the pieces of `−Re t` and `Im t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormT {
    pub value: C64,
    /// `u_p = −γη²|g|² + γ|h|² + 2νμ Re(g h̄)` for the propagating modes,
    /// left section first.
    pub propagating_terms: Vec<f64>,
    /// `v_p = γβ(γ+β)|g|² + (γ+β)|h|² + 2(γβ+νμ) Re(g h̄)` for the rest.
    pub evanescent_terms: Vec<f64>,
    /// `Σ η_p |γ_p g_p + h_p|²` over the propagating modes of both sections.
    pub flux: f64,
}

/// Sesquilinear `t(u, v) = Σ_sides Σ_p (T_p (g,h)(u)) · conj((g,h)(v))`.
pub fn form_t_pair(
    u: [&TraceCoefficients; 2],
    v: [&TraceCoefficients; 2],
    k: f64,
    nu: f64,
) -> Result<C64> {
    let p_max = u.iter().chain(&v).map(|t| t.p_max()).max().unwrap_or(0).max(1);
    let op = DtnOperator::new(k, nu, p_max)?;
    let mut total = C64::new(0.0, 0.0);
    for (tu, tv) in u.iter().zip(&v) {
        for (p, b) in op.blocks.iter().enumerate().take(tu.p_max().min(tv.p_max())) {
            let (n, m) = b.apply(tu.g[p], tu.h[p]);
            total += n * tv.g[p].conj() + m * tv.h[p].conj();
        }
    }
    Ok(total)
}

/// `t(u, u)` for traces on both sections.
pub fn form_t(left: &TraceCoefficients, right: &TraceCoefficients, k: f64, nu: f64) -> Result<FormT> {
    let p_max = left.p_max().max(right.p_max()).max(1);
    let op = DtnOperator::new(k, nu, p_max)?;
    let mut value = C64::new(0.0, 0.0);
    let mut propagating_terms = Vec::new();
    let mut evanescent_terms = Vec::new();
    let mut flux = 0.0;
    for tc in [left, right] {
        for (b, (&g, &h)) in op.blocks.iter().zip(tc.g.iter().zip(&tc.h)) {
            let re_gh = (g * h.conj()).re;
            let (gg, hh) = (g.norm_sqr(), h.norm_sqr());
            let gm = b.gamma;
            if b.is_propagating() {
                let (n, m) = b.apply(g, h);
                value += n * g.conj() + m * h.conj();
            } else {
                // Real symmetric block: the form is real, so skip the complex
                // products whose rounding would leak into Im t.
                value += b.t[0][0].re * gg + b.t[1][1].re * hh + 2.0 * b.t[0][1].re * re_gh;
            }
            if b.is_propagating() {
                let e = b.eta.re;
                propagating_terms.push(-gm * e * e * gg + gm * hh + 2.0 * op.nu * b.mu * re_gh);
                flux += e * (gm * g + h).norm_sqr();
            } else {
                let beta = b.eta.im;
                evanescent_terms.push(
                    gm * beta * (gm + beta) * gg + (gm + beta) * hh + 2.0 * (gm * beta + op.nu * b.mu) * re_gh,
                );
            }
        }
    }
    Ok(FormT { value, propagating_terms, evanescent_terms, flux })
}

/// `c₁²` with `−Re t(u,u) ≥ −c₁² Σ|g_p|²`: the largest of
/// `γ_pη_p² + ν²μ_p²/γ_p` over propagating `p ≤ p_max` and `k³`.
pub fn lower_bound_constant(k: f64, nu: f64, p_max: usize) -> Result<f64> {
    let op = DtnOperator::new(k, nu, p_max)?;
    Ok(op
        .blocks
        .iter()
        .filter(|b| b.is_propagating())
        .map(|b| b.gamma * b.eta.re * b.eta.re + nu * nu * b.mu * b.mu / b.gamma)
        .fold(k.powi(3), f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, re};

    fn mat_mul(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    /// The unsimplified product of the boundary-operator matrix and the
    /// trace inversion.
    fn product_form(p: usize, k: f64, nu: f64) -> [[C64; 2]; 2] {
        let mu = (PI * p as f64).powi(2);
        let e = eta(p, k);
        let g = re(gamma(p, k));
        let left = [
            [I * e * e * e + I * (2.0 - nu) * mu * e, g * g * g - (2.0 - nu) * mu * g],
            [-(e * e + nu * mu), g * g - nu * mu],
        ];
        let inv = [[g, re(1.0)], [I * e, re(-1.0)]];
        let d = g + I * e;
        let prod = mat_mul(left, inv);
        prod.map(|row| row.map(|z| z / d))
    }

    #[test]
    fn closed_form_matches_product_form() {
        for (p, k) in [(1, 5.0), (2, 5.0), (3, 7.5), (40, 5.0)] {
            let b = dtn_block(p, k, 0.3).unwrap();
            let o = product_form(p, k, 0.3);
            let scale = 1.0 + b.t.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((b.t[i][j] - o[i][j]).norm() < 1e-12 * scale, "p={p} ({i},{j})");
                }
            }
            assert_eq!(b.t[0][1], b.t[1][0]);
        }
    }

    #[test]
    fn first_entry_has_positive_imaginary_part() {
        let b = dtn_block(1, 5.0, 0.3).unwrap();
        let g = b.gamma;
        let e = b.eta.re;
        assert!((b.t[0][0].im - g * e * g).abs() < 1e-12 * g * g * e);
        assert!(b.t[0][0].im > 0.0);
    }

    #[test]
    fn rightgoing_mode_traces_give_its_boundary_operators() {
        let (k, nu) = (5.0, 0.3);
        for p in 1..=3 {
            let b = dtn_block(p, k, nu).unwrap();
            let e = b.eta;
            // u = e^{iη(x−L)} sin(πpy) at x = L: u_x = iη u, u_yy = −μ u.
            let mu = b.mu;
            let m_direct = (I * e) * (I * e) + nu * (-mu);
            let u_xxx = (I * e).powi(3);
            let u_xyy = I * e * (-mu);
            let n_direct = -(u_xxx + (2.0 - nu) * u_xyy);
            let (n, m) = b.apply(re(1.0), I * e);
            assert!((n - n_direct).norm() < 1e-10 * n_direct.norm().max(1.0), "p={p}");
            assert!((m - m_direct).norm() < 1e-10 * m_direct.norm().max(1.0), "p={p}");
        }
    }

    #[test]
    fn amplitudes_round_trip() {
        let op = DtnOperator::new(5.0, 0.3, 6).unwrap();
        for b in &op.blocks {
            let (a, bb) = (c(0.3, -1.2), c(-0.7, 0.4));
            let (g, h) = b.traces_of(a, bb);
            let (a2, b2) = b.outgoing_amplitudes(g, h);
            assert!((a - a2).norm() < 1e-12 && (bb - b2).norm() < 1e-12);
        }
    }

    #[test]
    fn large_index_is_finite() {
        let op = DtnOperator::new(5.0, 0.3, 200).unwrap();
        assert!(op.blocks.iter().all(|b| b.t.iter().flatten().all(|z| z.is_finite())));
        assert_eq!(op.n_propagating(), 1);
        let b = &op.blocks[199];
        assert!(b.t.iter().flatten().all(|z| z.im == 0.0));
    }

    #[test]
    fn threshold_and_nu_are_validated() {
        assert!(matches!(dtn_block(1, PI, 0.3), Err(Error::ThresholdWavenumber { .. })));
        assert!(dtn_block(1, 5.0, 1.0).is_err());
        assert!(dtn_block(0, 5.0, 0.3).is_err());
    }

    #[test]
    fn zero_traces_map_to_zero() {
        let tc = TraceCoefficients::zeros(Side::Right, 5);
        let (n, m) = apply_dtn(&tc, 5.0, 0.3).unwrap();
        assert!(n.iter().chain(&m).all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn evanescent_content_has_no_flux() {
        let mut tc = TraceCoefficients::zeros(Side::Right, 8);
        for p in 1..8 {
            tc.g[p] = c(p as f64, -1.0);
            tc.h[p] = c(0.5, p as f64);
        }
        let left = TraceCoefficients::zeros(Side::Left, 8);
        let f = form_t(&left, &tc, 5.0, 0.3).unwrap();
        assert!(f.value.im.abs() < 1e-14 * f.value.norm());
    }
}
