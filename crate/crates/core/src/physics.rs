//! Velocities of the propagating modes and their fate under weak damping.
//!
//! With `k² = ω/c` the dispersion branch `η_p(k)` gives `v_g = ∂ω/∂η`.
//! Differentiating `det 𝔸(iη; k) = 0` and integrating by parts in `y`
//! turns `∂η/∂k` into mode integrals, so for the flux-normalized profile
//! (`4η(∫|φ'|² + η²∫|φ|²) = 1`)
//!
//! `v_g(W_p^±) = ±2c / (4k² ∫|φ_p|²)`.
//!
//! Damping `γ` replaces `k⁴` by `k⁴ + iγ/c²`; every propagating exponent
//! `iη_p` then moves into the left half plane, which is how the outgoing
//! direction is selected.

use crate::error::{Error, Result};
use crate::numerics::{re, C64, I};
use crate::spectrum::propagating_etas;
use crate::transverse::{det_dispersion_ksq, BoundaryKind, TransverseMode};
use serde::{Deserialize, Serialize};

/// `c = √(D/ρh)`; angular frequency `ω = ck²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSpeed {
    pub c: f64,
}

impl Default for WaveSpeed {
    fn default() -> Self {
        WaveSpeed { c: 1.0 }
    }
}

impl WaveSpeed {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("wave speed c must be positive, got {c}")));
        }
        Ok(WaveSpeed { c })
    }

    /// From flexural rigidity `D`, density `ρ` and thickness `h`.
    pub fn from_plate(d: f64, rho: f64, h: f64) -> Result<Self> {
        if !(d > 0.0 && rho > 0.0 && h > 0.0) {
            return Err(Error::InvalidParameter(format!("plate constants must be positive: D = {d}, rho = {rho}, h = {h}")));
        }
        Self::new((d / (rho * h)).sqrt())
    }

    pub fn omega(&self, k: f64) -> f64 {
        self.c * k * k
    }

    pub fn wavenumber(&self, omega: f64) -> f64 {
        (omega / self.c).sqrt()
    }
}

fn check_speed(c: f64) -> Result<()> {
    WaveSpeed::new(c).map(|_| ())
}

fn eta_of(p: usize, k: f64, bc: BoundaryKind) -> Result<f64> {
    let etas = propagating_etas(k, bc)?;
    etas.get(p.wrapping_sub(1)).copied().ok_or(Error::NotPropagating { p, k })
}

/// `∫|φ_p|²` for the flux-normalized profile.
pub fn normalized_mass(p: usize, k: f64, bc: BoundaryKind) -> Result<f64> {
    let eta = eta_of(p, k, bc)?;
    let mode = TransverseMode::at(I * eta, k, bc)?.remove(0);
    Ok(mode.norms().0)
}

/// Group velocity of `W_p^+`; `W_p^−` travels at the opposite velocity.
///
/// `p = 1` is the mode with the largest `η`.
pub fn group_velocity(p: usize, k: f64, bc: BoundaryKind, c: f64) -> Result<f64> {
    check_speed(c)?;
    match bc {
        // ω = c(η² + (pπ)²) with the modes numbered the same way.
        BoundaryKind::SimplySupported => Ok(2.0 * c * eta_of(p, k, bc)?),
        BoundaryKind::Clamped => Ok(2.0 * c / (4.0 * k * k * normalized_mass(p, k, bc)?)),
    }
}

/// Phase velocity `ω/η_p` of `W_p^+`.
pub fn phase_velocity(p: usize, k: f64, bc: BoundaryKind, c: f64) -> Result<f64> {
    check_speed(c)?;
    Ok(c * k * k / eta_of(p, k, bc)?)
}

/// Exponent `iη_p^γ` of the damped problem together with how well it is
/// separated from its neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampedExponent {
    pub gamma: f64,
    pub lambda: C64,
    /// Smallest distance from `η_p` to another propagating `η_q`.
    pub min_gap: f64,
    /// The gap is below 1e-3, so only the trust radius kept the branch.
    pub close_modes: bool,
}

impl DampedExponent {
    /// `η_p^γ = −iλ`.
    pub fn eta(&self) -> C64 {
        -I * self.lambda
    }
}

/// Closeness below which the continuation result is flagged.
pub const CLOSE_MODE_GAP: f64 = 1e-3;

fn min_gap(etas: &[f64], p: usize, k: f64) -> f64 {
    let eta = etas[p - 1];
    let others = etas.iter().enumerate().filter(|&(i, _)| i != p - 1).map(|(_, e)| (e - eta).abs());
    // With a single mode the neighbours are −η_p and the evanescent
    // exponents near the origin; η_p itself bounds their distance.
    others.fold(eta.min(k), f64::min)
}

fn newton_step(lambda: C64, k_sq: C64, bc: BoundaryKind) -> C64 {
    let f = |z: C64| det_dispersion_ksq(z, k_sq, bc);
    let h = 1e-5 * (1.0 + lambda.norm());
    let d = (f(lambda + h) - f(lambda - h)) / (2.0 * h);
    f(lambda) / d
}

/// Newton from `seed` at fixed damping; fails when the iterate leaves the
/// disc of radius `radius` around the seed.
fn newton(seed: C64, k_sq: C64, bc: BoundaryKind, gamma: f64, radius: f64) -> Result<C64> {
    let mut z = seed;
    for _ in 0..50 {
        let step = newton_step(z, k_sq, bc);
        z -= step;
        if (z - seed).norm() > radius || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::ContinuationLost { gamma, step: (z - seed).norm(), radius });
        }
        if step.norm() <= 1e-12 * z.norm() {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence(format!("damped exponent at gamma = {gamma:e}")))
}

/// `iη_p^γ` for `(k^γ)⁴ = k⁴ + iγ/c²`, by Newton continuation from `iη_p`
/// through `γ/10ⁿ, …, γ/10, γ`.
pub fn damped_exponent(p: usize, k: f64, gamma: f64, c: f64, bc: BoundaryKind) -> Result<DampedExponent> {
    check_speed(c)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("damping must be non-negative, got {gamma}")));
    }
    if gamma > 0.1 * c * c * k.powi(4) {
        return Err(Error::InvalidParameter(format!("damping {gamma} exceeds 0.1·c²k⁴; the continuation is only meant for weak damping")));
    }
    let etas = propagating_etas(k, bc)?;
    if p == 0 || p > etas.len() {
        return Err(Error::NotPropagating { p, k });
    }
    let gap = min_gap(&etas, p, k);
    let mut lambda = I * etas[p - 1];
    if gamma > 0.0 {
        let radius = 0.5 * gap;
        // First rung small enough that iη_p is an excellent seed.
        let floor = 1e-9 * c * c * k.powi(4);
        let mut rungs = vec![gamma];
        while *rungs.last().unwrap() / 10.0 >= floor {
            let next = rungs.last().unwrap() / 10.0;
            rungs.push(next);
        }
        for &g in rungs.iter().rev() {
            let k_sq = (re(k.powi(4)) + I * (g / (c * c))).sqrt();
            lambda = newton(lambda, k_sq, bc, g, radius)?;
        }
    }
    Ok(DampedExponent { gamma, lambda, min_gap: gap, close_modes: gap < CLOSE_MODE_GAP })
}

/// `∂(iη_p^γ)/∂γ` at `γ = 0`, from the group velocity:
/// `−(1/(4c²k³)) ∂η/∂k = −∫|φ_p|²/c²`.
pub fn damping_slope(p: usize, k: f64, c: f64, bc: BoundaryKind) -> Result<f64> {
    check_speed(c)?;
    Ok(-normalized_mass(p, k, bc)? / (c * c))
}

/// `η_p^γ` along a decreasing sequence of dampings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionTrajectory {
    pub p: usize,
    pub k: f64,
    pub c: f64,
    pub gammas: Vec<f64>,
    pub eta_gamma: Vec<C64>,
    /// The undamped `η_p`.
    pub limit: f64,
    pub min_gap: f64,
    pub close_modes: bool,
}

impl AbsorptionTrajectory {
    /// `|η_p^γ − η_p|` along the sequence.
    pub fn distances(&self) -> Vec<f64> {
        self.eta_gamma.iter().map(|e| (e - self.limit).norm()).collect()
    }

    /// Every damped exponent lies in the left half plane and the distances
    /// to the limit shrink strictly along the sequence.
    pub fn is_limiting_absorption(&self) -> bool {
        let left = self.eta_gamma.iter().all(|e| (I * e).re < 0.0);
        let d = self.distances();
        left && d.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn absorption_trajectory(p: usize, k: f64, bc: BoundaryKind, c: f64, gammas: &[f64]) -> Result<AbsorptionTrajectory> {
    if gammas.is_empty() || gammas.iter().any(|g| !(*g > 0.0)) || gammas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("dampings must be positive and strictly decreasing".into()));
    }
    let mut eta_gamma = Vec::with_capacity(gammas.len());
    let mut gap = f64::INFINITY;
    for &g in gammas {
        let d = damped_exponent(p, k, g, c, bc)?;
        gap = d.min_gap;
        eta_gamma.push(d.eta());
    }
    Ok(AbsorptionTrajectory {
        p,
        k,
        c,
        gammas: gammas.to_vec(),
        eta_gamma,
        limit: eta_of(p, k, bc)?,
        min_gap: gap,
        close_modes: gap < CLOSE_MODE_GAP,
    })
}

/// Decades `10^hi, 10^(hi−1), …, 10^lo` for `hi > lo`.
pub fn decades(hi: i32, lo: i32) -> Vec<f64> {
    (lo..=hi).rev().map(|e| 10f64.powi(e)).collect()
}
