//! Scattering of propagating modes by a rectangular hole in a simply
//! supported strip.
//!
//! For an incident mode `u_i`, the total field is `u = v + ζu_i` where `ζ(x)`
//! is an even cut-off equal to 1 near `Σ_{±L}` and `v` is the outgoing
//! solution of `(Δ² − k⁴)v = −(Δ² − k⁴)(ζu_i)`. The source is supported in
//! the transition bands of `ζ` only.

use crate::cutoff::EvenCutoff;
use crate::dtn::{DtnOperator, Side, TraceCoefficients, DEFAULT_P_MAX};
use crate::error::{Error, Result};
use crate::fem::{EndCondition, FemProblem, PlateField, StripMesh};
use crate::numerics::{C64, I};
use crate::spectrum::{check_not_threshold, eta, simply_supported_count};
use crate::transverse::BoundaryKind;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Direction of travel of an incident mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `w_p^+ ∝ e^{+iη_p x}`, travelling to the right.
    Plus,
    /// `w_p^− ∝ e^{−iη_p x}`, travelling to the left.
    Minus,
}

/// `w_p^± = (2η_p)^{−1/2} e^{±iη_p x} θ_p(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentMode {
    pub p: usize,
    pub direction: Direction,
    pub k: f64,
    pub eta: f64,
}

impl IncidentMode {
    pub fn new(p: usize, direction: Direction, k: f64) -> Result<Self> {
        if p == 0 || p > simply_supported_count(k) {
            return Err(Error::NotPropagating { p, k });
        }
        Ok(IncidentMode { p, direction, k, eta: eta(p, k).re })
    }

    /// `±iη_p`.
    pub fn exponent(&self) -> C64 {
        match self.direction {
            Direction::Plus => I * self.eta,
            Direction::Minus => -I * self.eta,
        }
    }

    pub fn amplitude(&self) -> f64 {
        (2.0 * self.eta).powf(-0.5)
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        let th = SQRT_2 * (PI * self.p as f64 * y).sin();
        (self.exponent() * x).exp() * (self.amplitude() * th)
    }
}

/// Default cut-off for a strip of half-length `l`: transition on
/// `[0.7L, 0.9L]`.
pub fn default_cutoff(l: f64) -> EvenCutoff {
    EvenCutoff { x0: 0.7 * l, width: 0.2 * l }
}

/// Check that the transition bands `±[x₀, x₀ + w]` lie inside `(−L, L)` and
/// miss the hole.
pub fn check_cutoff(zeta: &EvenCutoff, mesh: &StripMesh) -> Result<()> {
    let (a, b) = zeta.band();
    if !(a > 0.0 && b < mesh.l && zeta.width > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cut-off band [{a}, {b}] must lie inside (0, {})",
            mesh.l
        )));
    }
    if let Some(h) = &mesh.hole {
        for (lo, hi) in [(a, b), (-b, -a)] {
            if lo < h.x1 && hi > h.x0 {
                return Err(Error::CutoffOverlapsHole { band_start: lo, band_end: hi });
            }
        }
    }
    Ok(())
}

/// `f = −(Δ² − k⁴)(ζ u_i)`, expanded exactly:
/// `f = −u_i [Σ_{j=1}^{4} C(4,j) ζ^{(j)} σ^{4−j} − 2μ(2ζ'σ + ζ'')]`
/// with `σ = ±iη_p`, `μ = π²p²`.
pub fn lifted_source<'a>(mode: &'a IncidentMode, zeta: &'a EvenCutoff) -> impl Fn(f64, f64) -> C64 + Sync + 'a {
    let sigma = mode.exponent();
    let mu = (PI * mode.p as f64).powi(2);
    move |x, y| {
        let z = zeta.eval(x);
        if z[1] == 0.0 && z[2] == 0.0 && z[3] == 0.0 && z[4] == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let binom = [0.0, 4.0, 6.0, 4.0, 1.0];
        let mut acc = C64::new(0.0, 0.0);
        for j in 1..=4 {
            acc += binom[j] * z[j] * sigma.powi(4 - j as i32);
        }
        acc -= 2.0 * mu * (2.0 * z[1] * sigma + z[2]);
        -mode.eval(x, y) * acc
    }
}

/// Outgoing amplitudes on one section: `a_p` of `e^{iη_p s}θ_p` and `b_p` of
/// `e^{−γ_p s}θ_p`, with `s` the outward distance from the section.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalAmplitudes {
    pub side: Side,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
}

/// Invert the trace relations mode by mode.
pub fn amplitudes_from_traces(tc: &TraceCoefficients, k: f64, nu: f64) -> Result<ModalAmplitudes> {
    let op = DtnOperator::new(k, nu, tc.p_max().max(1))?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (blk, (&g, &h)) in op.blocks.iter().zip(tc.g.iter().zip(&tc.h)) {
        let (ap, bp) = blk.outgoing_amplitudes(g, h);
        a.push(ap);
        b.push(bp);
    }
    Ok(ModalAmplitudes { side: tc.side, a, b })
}

/// Amplitudes of the first `n` modes of `field` on `side`.
pub fn extract_outgoing(field: &PlateField, side: Side, k: f64, n: usize) -> Result<ModalAmplitudes> {
    amplitudes_from_traces(&field.traces(side, n), k, field.nu)
}

/// Scattering matrix and its defects.
///
/// Row `p` (`1 ≤ p ≤ n`) is the incidence `w_p^−` from the right, row `n + p`
/// the incidence `w_p^+` from the left. Column `m` holds the coefficient of
/// `w_m^+` leaving on the right, column `n + m` that of `w_m^−` leaving on
/// the left. Stored 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringMatrix {
    pub k: f64,
    pub n: usize,
    #[serde(rename = "S_re")]
    pub s_re: Vec<Vec<f64>>,
    #[serde(rename = "S_im")]
    pub s_im: Vec<Vec<f64>>,
    pub unitarity_defect: f64,
    pub symmetry_defect: f64,
}

impl ScatteringMatrix {
    pub fn from_entries(k: f64, n: usize, s: &[Vec<C64>]) -> Self {
        let m = 2 * n;
        let mut unit = 0.0;
        let mut sym = 0.0;
        for i in 0..m {
            for j in 0..m {
                let mut acc: C64 = (0..m).map(|l| s[i][l] * s[j][l].conj()).sum();
                if i == j {
                    acc -= 1.0;
                }
                unit += acc.norm_sqr();
                sym += (s[i][j] - s[j][i]).norm_sqr();
            }
        }
        ScatteringMatrix {
            k,
            n,
            s_re: s.iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            s_im: s.iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
            unitarity_defect: unit.sqrt(),
            symmetry_defect: sym.sqrt(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        C64::new(self.s_re[i][j], self.s_im[i][j])
    }

    /// `Σ_j |s_ij|²` for each row: the energy carried away by incidence `i`.
    pub fn row_energy(&self) -> Vec<f64> {
        (0..2 * self.n).map(|i| (0..2 * self.n).map(|j| self.entry(i, j).norm_sqr()).sum()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ScatteringConfig {
    pub nu: f64,
    pub p_max: usize,
    /// `None` selects [`default_cutoff`].
    pub cutoff: Option<EvenCutoff>,
    /// Gauss points per direction and element for the load vectors.
    pub quad: usize,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        ScatteringConfig { nu: 0.3, p_max: DEFAULT_P_MAX, cutoff: None, quad: 6 }
    }
}

/// Solve the `2n` scattering problems with one factorisation and assemble `𝕊`.
pub fn scattering_matrix(k: f64, mesh: StripMesh, cfg: &ScatteringConfig) -> Result<ScatteringMatrix> {
    check_not_threshold(k, BoundaryKind::SimplySupported)?;
    let n = simply_supported_count(k);
    if n == 0 {
        return Err(Error::InvalidParameter(format!("no propagating mode at k = {k} < π")));
    }
    let zeta = cfg.cutoff.unwrap_or_else(|| default_cutoff(mesh.l));
    check_cutoff(&zeta, &mesh)?;
    let l = mesh.l;
    let problem = FemProblem::new(mesh, k, cfg.nu, BoundaryKind::SimplySupported, EndCondition::Dtn)?
        .with_p_max(cfg.p_max.max(n));
    let system = problem.assemble()?;
    let factored = system.factor()?;

    let incidences: Vec<IncidentMode> = (1..=n)
        .map(|p| IncidentMode::new(p, Direction::Minus, k))
        .chain((1..=n).map(|p| IncidentMode::new(p, Direction::Plus, k)))
        .collect::<Result<_>>()?;
    let rhs: Vec<Vec<C64>> = incidences
        .iter()
        .map(|m| system.load_vector(&lifted_source(m, &zeta), cfg.quad))
        .collect();
    let fields = factored.solve_many(&rhs)?;

    let s: Vec<Vec<C64>> = incidences.iter().zip(&fields).map(|(mode, v)| scattering_row(v, mode, l)).collect::<Result<_>>()?;
    Ok(ScatteringMatrix::from_entries(k, n, &s))
}

/// Row of `𝕊` for one incidence, from the FE solution `v` of the lifted
/// problem on `(−l, l)`: entries `m` and `n + m` are the amplitudes of
/// `w_m^+` leaving on the right and `w_m^−` leaving on the left.
pub fn scattering_row(v: &PlateField, mode: &IncidentMode, l: f64) -> Result<Vec<C64>> {
    let k = mode.k;
    let n = simply_supported_count(k);
    let right = extract_outgoing(v, Side::Right, k, n)?;
    let left = extract_outgoing(v, Side::Left, k, n)?;
    let mut s = vec![C64::new(0.0, 0.0); 2 * n];
    for m in 0..n {
        let e = eta(m + 1, k).re;
        let scale = (2.0 * e).sqrt() * (-I * e * l).exp();
        s[m] = right.a[m] * scale;
        s[n + m] = left.a[m] * scale;
    }
    // ζu_i is itself outgoing on the side it travels towards.
    match mode.direction {
        Direction::Plus => s[mode.p - 1] += 1.0,
        Direction::Minus => s[n + mode.p - 1] += 1.0,
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::RectHole;

    #[test]
    fn lifted_source_vanishes_outside_the_bands_and_for_constant_cutoff() {
        let mode = IncidentMode::new(1, Direction::Plus, 5.0).unwrap();
        let zeta = EvenCutoff { x0: 0.7, width: 0.2 };
        let f = lifted_source(&mode, &zeta);
        for x in [-1.5, -0.95, -0.5, 0.0, 0.69, 0.91, 1.2] {
            assert_eq!(f(x, 0.3), C64::new(0.0, 0.0), "x = {x}");
        }
        assert!(f(0.8, 0.3).norm() > 0.0 && f(-0.8, 0.3).norm() > 0.0);
        // Band placed beyond the evaluation window: ζ ≡ 0 there, so f ≡ 0.
        let far = EvenCutoff { x0: 10.0, width: 0.2 };
        let g = lifted_source(&mode, &far);
        assert_eq!(g(0.5, 0.5), C64::new(0.0, 0.0));
    }

    #[test]
    fn lifted_source_matches_finite_differences() {
        let mode = IncidentMode::new(1, Direction::Minus, 5.0).unwrap();
        let zeta = EvenCutoff { x0: 0.7, width: 0.2 };
        let f = lifted_source(&mode, &zeta);
        let v = |x: f64, y: f64| zeta.eval(x)[0] * mode.eval(x, y);
        let (x, y) = (0.78, 0.41);
        // Δ²v − k⁴v by nested 3-point differences, Richardson-extrapolated in h.
        let stencil = |h: f64| {
            let d2x = |g: &dyn Fn(f64, f64) -> C64, x: f64, y: f64| (g(x + h, y) - 2.0 * g(x, y) + g(x - h, y)) / (h * h);
            let d2y = |g: &dyn Fn(f64, f64) -> C64, x: f64, y: f64| (g(x, y + h) - 2.0 * g(x, y) + g(x, y - h)) / (h * h);
            let lap = |x: f64, y: f64| d2x(&v, x, y) + d2y(&v, x, y);
            let bih = d2x(&lap, x, y) + d2y(&lap, x, y);
            -(bih - 625.0 * v(x, y))
        };
        let want = (4.0 * stencil(2e-3) - stencil(4e-3)) / 3.0;
        assert!((f(x, y) - want).norm() < 1e-5 * want.norm(), "{} vs {want}", f(x, y));
    }

    #[test]
    fn cutoff_band_must_miss_the_hole() {
        let mesh = StripMesh::new(1.0, 20, 10, Some(RectHole::new(-0.8, 0.3, 0.8, 0.7))).unwrap();
        let e = check_cutoff(&default_cutoff(1.0), &mesh).unwrap_err();
        assert!(matches!(e, Error::CutoffOverlapsHole { .. }));
        assert!(e.is_validation());
    }

    #[test]
    fn amplitudes_round_trip_from_analytic_traces() {
        let (k, nu) = (7.0, 0.3);
        let op = DtnOperator::new(k, nu, 6).unwrap();
        let a: Vec<C64> = (0..6).map(|p| C64::new(0.2 * p as f64, 1.0 - 0.1 * p as f64)).collect();
        let b: Vec<C64> = (0..6).map(|p| C64::new(-0.3, 0.05 * p as f64)).collect();
        let (mut g, mut h) = (Vec::new(), Vec::new());
        for (blk, (&ap, &bp)) in op.blocks.iter().zip(a.iter().zip(&b)) {
            let (gp, hp) = blk.traces_of(ap, bp);
            g.push(gp);
            h.push(hp);
        }
        let tc = TraceCoefficients::new(Side::Left, g, h).unwrap();
        let out = amplitudes_from_traces(&tc, k, nu).unwrap();
        for p in 0..6 {
            assert!((out.a[p] - a[p]).norm() < 1e-12 && (out.b[p] - b[p]).norm() < 1e-12);
        }
    }

    #[test]
    fn non_propagating_incidence_is_rejected() {
        assert!(matches!(IncidentMode::new(2, Direction::Plus, 5.0), Err(Error::NotPropagating { .. })));
    }
}
