//! Modal exponents `Λ`, threshold wavenumbers, propagating-mode counts,
//! multiplicities and the degenerate wavenumber set `𝒦`.

use crate::error::{Error, Result};
use crate::numerics::{brent, c, derivative5, re, second_derivative5, C64, I};
use crate::transverse::{det_dispersion, det_scale_ksq, h_k_scaled, kernel_vector, BoundaryKind};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

/// Tolerance for "k sits on a threshold".
pub const THRESHOLD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExponentClass {
    /// `λ ∈ iℝ∖{0}`.
    Propagating,
    /// `λ ∈ ℝ∖{0}`.
    RealEvanescent,
    Complex,
    Zero,
}

/// One eigenvalue of the transverse symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalExponent {
    pub lambda: C64,
    pub class: ExponentClass,
    pub geom_mult: usize,
    pub alg_mult: usize,
    /// Transverse index `p` when it is known (simply supported modes and the
    /// propagating clamped modes, numbered by decreasing `|λ|`).
    pub index: Option<usize>,
}

pub fn classify(lambda: C64) -> ExponentClass {
    let scale = 1e-10 * (1.0 + lambda.norm());
    if lambda.norm() < scale {
        ExponentClass::Zero
    } else if lambda.re.abs() < scale {
        ExponentClass::Propagating
    } else if lambda.im.abs() < scale {
        ExponentClass::RealEvanescent
    } else {
        ExponentClass::Complex
    }
}

/// Threshold wavenumbers: the `k` at which `λ = 0` is an exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub bc: BoundaryKind,
    pub k: Vec<f64>,
    /// `π/2 + nπ`, the large-`n` asymptote of the clamped thresholds.
    pub asymptote: Vec<f64>,
}

/// `cos k − 1/cosh k`, written without overflow.
fn clamped_threshold_fn(k: f64) -> f64 {
    let e = (-k).exp();
    k.cos() - 2.0 * e / (1.0 + e * e)
}

/// First `n_max` thresholds: `nπ` (simply supported) or the roots of
/// `cos k cosh k = 1` (clamped), each bracketed in `(nπ − 1, nπ + 2)`.
pub fn thresholds(bc: BoundaryKind, n_max: usize) -> Result<ThresholdTable> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("thresholds: n_max must be at least 1".into()));
    }
    let asymptote: Vec<f64> = (1..=n_max).map(|n| FRAC_PI_2 + n as f64 * PI).collect();
    let k = match bc {
        BoundaryKind::SimplySupported => (1..=n_max).map(|n| n as f64 * PI).collect(),
        BoundaryKind::Clamped => {
            let mut out = Vec::with_capacity(n_max);
            for n in 1..=n_max {
                let (a, b) = (n as f64 * PI - 1.0, n as f64 * PI + 2.0);
                let root = brent(clamped_threshold_fn, a, b, 1e-15)
                    .ok_or(Error::BracketFailure { index: n })?;
                // Newton polish on the scaled residual.
                let mut x = root;
                for _ in 0..3 {
                    let e = (-x).exp();
                    let sech = 2.0 * e / (1.0 + e * e);
                    let tanh = (1.0 - e * e) / (1.0 + e * e);
                    let d = -x.sin() + sech * tanh;
                    let step = clamped_threshold_fn(x) / d;
                    if !step.is_finite() || step.abs() > 1e-8 {
                        break;
                    }
                    x -= step;
                }
                if clamped_threshold_fn(x).abs() > 1e-13 {
                    return Err(Error::NoConvergence(format!("threshold {n}: residual too large")));
                }
                out.push(x);
            }
            out
        }
    };
    Ok(ThresholdTable { bc, k, asymptote })
}

/// Fail if `k` is within [`THRESHOLD_TOL`] of a threshold of `bc`.
pub fn check_not_threshold(k: f64, bc: BoundaryKind) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("k must be positive and finite, got {k}")));
    }
    let n = (k / PI).floor() as usize + 2;
    let table = thresholds(bc, n)?;
    for &t in &table.k {
        if (k - t).abs() < THRESHOLD_TOL {
            return Err(Error::ThresholdWavenumber { k, threshold: t, tol: THRESHOLD_TOL });
        }
    }
    Ok(())
}

/// `η_p = √(k² − π²p²)` on the branch `Im ≥ 0`.
pub fn eta(p: usize, k: f64) -> C64 {
    crate::numerics::csqrt(re(k * k - (PI * p as f64).powi(2)))
}

/// `γ_p = √(k² + π²p²)`.
pub fn gamma(p: usize, k: f64) -> f64 {
    (k * k + (PI * p as f64).powi(2)).sqrt()
}

/// Number of propagating simply supported modes, `n = ⌊k/π⌋`.
pub fn simply_supported_count(k: f64) -> usize {
    (k / PI).floor() as usize
}

/// `{±iη_p, ±γ_p : 1 ≤ p ≤ p_max}`.
pub fn simply_supported_exponents(k: f64, p_max: usize) -> Result<Vec<ModalExponent>> {
    check_not_threshold(k, BoundaryKind::SimplySupported)?;
    let mut out = Vec::with_capacity(4 * p_max);
    for p in 1..=p_max {
        let e = eta(p, k);
        let g = gamma(p, k);
        for lambda in [I * e, -I * e, re(g), re(-g)] {
            out.push(ModalExponent {
                lambda,
                class: classify(lambda),
                geom_mult: 1,
                alg_mult: 1,
                index: Some(p),
            });
        }
    }
    Ok(out)
}

/// Roots `τ ∈ (0, 1)` of `h_k`, in increasing order.
pub fn clamped_propagating_taus(k: f64) -> Result<Vec<f64>> {
    check_not_threshold(k, BoundaryKind::Clamped)?;
    let mut n = 2048usize;
    loop {
        let samples: Vec<f64> = (0..=n).map(|i| h_k_scaled(i as f64 / n as f64, k)).collect();
        let cells: Vec<usize> = (0..n)
            .filter(|&i| samples[i] == 0.0 || samples[i] * samples[i + 1] < 0.0)
            .collect();
        let crowded = cells.windows(2).any(|w| w[1] - w[0] <= 1);
        if crowded && n < (1 << 18) {
            n *= 2;
            continue;
        }
        let mut taus = Vec::with_capacity(cells.len());
        for &i in &cells {
            let (a, b) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            let t = brent(|t| h_k_scaled(t, k), a, b, 1e-16)
                .ok_or(Error::BracketFailure { index: i })?;
            taus.push(t);
        }
        return Ok(taus);
    }
}

/// Propagating clamped exponents `±iτk`, as pairs sorted by decreasing `|λ|`
/// (index `p = 1` is the fastest oscillating mode).
pub fn clamped_propagating(k: f64) -> Result<Vec<ModalExponent>> {
    let taus = clamped_propagating_taus(k)?;
    let mut out = Vec::with_capacity(2 * taus.len());
    for (p, &t) in taus.iter().rev().enumerate() {
        for lambda in [I * (t * k), -I * (t * k)] {
            out.push(ModalExponent {
                lambda,
                class: ExponentClass::Propagating,
                geom_mult: 1,
                alg_mult: 1,
                index: Some(p + 1),
            });
        }
    }
    Ok(out)
}

/// Positive `η_p` of the propagating modes, `η_1 > η_2 > …`.
pub fn propagating_etas(k: f64, bc: BoundaryKind) -> Result<Vec<f64>> {
    match bc {
        BoundaryKind::SimplySupported => {
            check_not_threshold(k, bc)?;
            Ok((1..=simply_supported_count(k)).map(|p| eta(p, k).re).collect())
        }
        BoundaryKind::Clamped => {
            Ok(clamped_propagating_taus(k)?.iter().rev().map(|t| t * k).collect())
        }
    }
}

/// Rectangle in ℂ to scan, with the bow-tie parameters that justify it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    /// Radius beyond which eigenvalues satisfy `|Re λ| ≥ δ|Im λ|`.
    pub rho: f64,
    pub delta: f64,
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
}

impl SearchRegion {
    /// `ρ = 2k + 10`, `δ = 0.2`, box `[−ρ, ρ]²`.
    pub fn default_for(k: f64) -> Self {
        let rho = 2.0 * k + 10.0;
        SearchRegion { rho, delta: 0.2, re_range: (-rho, rho), im_range: (-rho, rho) }
    }

    pub fn boxed(re_range: (f64, f64), im_range: (f64, f64)) -> Self {
        let rho = re_range.0.abs().max(re_range.1.abs()).hypot(im_range.0.abs().max(im_range.1.abs()));
        SearchRegion { rho, delta: 0.2, re_range, im_range }
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn diam(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    fn center(&self) -> C64 {
        c(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.x0 - slack && z.re <= self.x1 + slack && z.im >= self.y0 - slack && z.im <= self.y1 + slack
    }
}

/// Argument-principle root finder for an analytic function on rectangles.
struct ArgumentPrinciple<'a> {
    f: &'a dyn Fn(C64) -> C64,
    scale: &'a dyn Fn(C64) -> f64,
}

impl ArgumentPrinciple<'_> {
    /// Winding number of `f` along the boundary of `r`, or `None` when `f`
    /// comes too close to zero on the boundary.
    fn winding(&self, r: &Rect) -> Option<i64> {
        let corners = [c(r.x0, r.y0), c(r.x1, r.y0), c(r.x1, r.y1), c(r.x0, r.y1)];
        let mut total = 0.0;
        for e in 0..4 {
            let (za, zb) = (corners[e], corners[(e + 1) % 4]);
            let segs = 16;
            let mut prev_z = za;
            let mut prev_f = self.eval_checked(za)?;
            for j in 1..=segs {
                let z = za + (zb - za) * (j as f64 / segs as f64);
                let fz = self.eval_checked(z)?;
                total += self.arg_change(prev_z, prev_f, z, fz, 0)?;
                prev_z = z;
                prev_f = fz;
            }
        }
        Some((total / (2.0 * PI)).round() as i64)
    }

    fn eval_checked(&self, z: C64) -> Option<C64> {
        let v = (self.f)(z);
        if !v.is_finite() || v.norm() < 1e-12 * (self.scale)(z) {
            None
        } else {
            Some(v)
        }
    }

    fn arg_change(&self, za: C64, fa: C64, zb: C64, fb: C64, depth: usize) -> Option<f64> {
        let d = (fb / fa).arg();
        if d.abs() < PI / 8.0 || depth > 40 {
            return Some(d);
        }
        let zm = 0.5 * (za + zb);
        let fm = self.eval_checked(zm)?;
        Some(self.arg_change(za, fa, zm, fm, depth + 1)? + self.arg_change(zm, fm, zb, fb, depth + 1)?)
    }

    fn newton(&self, z0: C64) -> Option<C64> {
        let mut z = z0;
        for _ in 0..60 {
            let h = re(1e-5 * (1.0 + z.norm()));
            let d = derivative5(&|w| (self.f)(w), z, h);
            let step = (self.f)(z) / d;
            if !step.is_finite() {
                return None;
            }
            z -= step;
            if step.norm() < 1e-14 * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        let v = (self.f)(z);
        (v.norm() < 1e-10 * (self.scale)(z)).then_some(z)
    }

    /// Roots inside `r` with multiplicities.
    fn roots(&self, r: Rect, winding: i64, out: &mut Vec<(C64, i64)>) -> Result<()> {
        if winding <= 0 {
            return Ok(());
        }
        if r.diam() < 0.5 {
            if let Some(z) = self.newton(r.center()) {
                if winding == 1 && r.contains(z, 0.0) {
                    out.push((z, 1));
                    return Ok(());
                }
            }
            if r.diam() < 1e-7 {
                out.push((r.center(), winding));
                return Ok(());
            }
        }
        const FRACS: [f64; 5] = [0.5, 0.4637, 0.5413, 0.4219, 0.5781];
        for (attempt, &fr) in FRACS.iter().enumerate() {
            let xm = r.x0 + fr * (r.x1 - r.x0);
            let ym = r.y0 + (1.0 - fr) * (r.y1 - r.y0);
            let kids = [
                Rect { x0: r.x0, x1: xm, y0: r.y0, y1: ym },
                Rect { x0: xm, x1: r.x1, y0: r.y0, y1: ym },
                Rect { x0: r.x0, x1: xm, y0: ym, y1: r.y1 },
                Rect { x0: xm, x1: r.x1, y0: ym, y1: r.y1 },
            ];
            let ws: Option<Vec<i64>> = kids.iter().map(|k| self.winding(k)).collect();
            let Some(ws) = ws else {
                if attempt + 1 == FRACS.len() {
                    return Err(Error::ContourThroughZero { attempts: FRACS.len() });
                }
                continue;
            };
            if ws.iter().sum::<i64>() != winding && attempt + 1 < FRACS.len() {
                continue;
            }
            for (kid, w) in kids.iter().zip(ws) {
                self.roots(*kid, w, out)?;
            }
            return Ok(());
        }
        Ok(())
    }
}

/// Zeros of the dispersion function inside `region`'s box, by winding
/// numbers on recursively subdivided rectangles and Newton polishing.
///
/// The returned multiplicity is the winding number of the smallest box that
/// isolated the zero. Results are sorted by `(Re λ, Im λ)`.
pub fn complex_exponents(k: f64, bc: BoundaryKind, region: &SearchRegion) -> Result<Vec<ModalExponent>> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let f = move |z: C64| det_dispersion(z, k, bc);
    let scale = move |z: C64| det_scale_ksq(z, re(k * k), bc);
    let ap = ArgumentPrinciple { f: &f, scale: &scale };
    let mut rect = Rect {
        x0: region.re_range.0,
        x1: region.re_range.1,
        y0: region.im_range.0,
        y1: region.im_range.1,
    };
    let mut winding = None;
    for attempt in 0..5 {
        if let Some(w) = ap.winding(&rect) {
            winding = Some(w);
            break;
        }
        let eps = 1e-7 * (attempt + 1) as f64 * (1.0 + rect.diam());
        rect = Rect { x0: rect.x0 - eps, x1: rect.x1 + 1.3 * eps, y0: rect.y0 - 0.7 * eps, y1: rect.y1 + eps };
    }
    let winding = winding.ok_or(Error::ContourThroughZero { attempts: 5 })?;
    let mut found = Vec::new();
    ap.roots(rect, winding, &mut found)?;
    let mut out: Vec<ModalExponent> = found
        .into_iter()
        .map(|(z, m)| {
            let lambda = clean(z);
            let geom = kernel_vector(lambda, k, bc).map(|kv| kv.dimension()).unwrap_or(1);
            ModalExponent {
                lambda,
                class: classify(lambda),
                geom_mult: geom,
                alg_mult: m as usize,
                index: None,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.lambda.re, a.lambda.im).partial_cmp(&(b.lambda.re, b.lambda.im)).unwrap()
    });
    Ok(out)
}

/// Snap parts that are zero to rounding.
fn clean(z: C64) -> C64 {
    let tol = 1e-12 * (1.0 + z.norm());
    c(if z.re.abs() < tol { 0.0 } else { z.re }, if z.im.abs() < tol { 0.0 } else { z.im })
}

/// Order of the zero of the dispersion function at the eigenvalue `λ`.
///
/// 1 when the 5-point derivative exceeds `1e-6·scale`; 2 when the first
/// derivative vanishes (as it must at `λ = 0` by evenness) but the second
/// does not; [`Error::Inconclusive`] when both sit near the rounding floor.
pub fn algebraic_multiplicity(lambda: C64, k: f64, bc: BoundaryKind) -> Result<usize> {
    let f = |z: C64| det_dispersion(z, k, bc);
    let h = re(1e-3 * (1.0 + lambda.norm()));
    let size = (0..8)
        .map(|j| {
            let z = lambda + h * 2.0 * C64::from_polar(1.0, j as f64 * PI / 4.0);
            det_scale_ksq(z, re(k * k), bc)
        })
        .fold(0.0, f64::max);
    let deriv_scale = size / (1.0 + lambda.norm());
    let noise1 = f64::EPSILON * size / h.re;
    let noise2 = noise1 / h.re;
    let d1 = derivative5(&f, lambda, h).norm();
    if d1 > 10.0 * noise1 && d1 > 1e-6 * deriv_scale {
        return Ok(1);
    }
    let d2 = second_derivative5(&f, lambda, h).norm();
    if d2 > 10.0 * noise2 && d2 > 1e-6 * deriv_scale / (1.0 + lambda.norm()) {
        return Ok(2);
    }
    Err(Error::Inconclusive { lambda, derivative: d1, noise: noise1 })
}

/// Membership of `k` in `𝒦 = {π√(m²−n²)/√2 : m > n ≥ 1, m − n even}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub k: f64,
    pub member: bool,
    /// Pairs `(m, n)` with `|π√(m²−n²)/√2 − k| < 1e-9`.
    pub pairs: Vec<(usize, usize)>,
    /// `π√(m²+n²)/√2` for each pair: exponents with a two-dimensional kernel.
    pub lambda_part: Vec<f64>,
}

pub fn degenerate_k(k: f64) -> DegeneracyReport {
    let tol = 1e-9;
    let kk = |m: usize, n: usize| PI * ((m * m - n * n) as f64).sqrt() / SQRT_2;
    let mut pairs = Vec::new();
    let mut n = 1;
    // Smallest value for a given n is reached at m = n + 2.
    while kk(n + 2, n) <= k + tol {
        let mut m = n + 2;
        while kk(m, n) <= k + tol {
            if (kk(m, n) - k).abs() < tol {
                pairs.push((m, n));
            }
            m += 2;
        }
        n += 1;
    }
    let lambda_part = pairs
        .iter()
        .map(|&(m, n)| PI * ((m * m + n * n) as f64).sqrt() / SQRT_2)
        .collect();
    DegeneracyReport { k, member: !pairs.is_empty(), pairs, lambda_part }
}
