#![allow(dead_code)]

use kl_strip::fem::{EndCondition, FemProblem, StripMesh};
use kl_strip::numerics::{re, GaussRule};
use kl_strip::{BoundaryKind, C64};
use std::f64::consts::PI;

/// u = sin²(π(x+L)/2L) sin²(πy) on (−L, L) × (0, 1), clamped on every edge.
pub struct Manufactured {
    pub l: f64,
    pub k: f64,
}

impl Manufactured {
    fn a(&self) -> f64 {
        PI / (2.0 * self.l)
    }

    pub fn source(&self, x: f64, y: f64) -> f64 {
        let a = self.a();
        let cx = (2.0 * a * (x + self.l)).cos();
        let cy = (2.0 * PI * y).cos();
        let (xx, yy) = ((1.0 - cx) / 2.0, (1.0 - cy) / 2.0);
        let (x2, y2) = (2.0 * a * a * cx, 2.0 * PI * PI * cy);
        let (x4, y4) = (-8.0 * a.powi(4) * cx, -8.0 * PI.powi(4) * cy);
        x4 * yy + 2.0 * x2 * y2 + xx * y4 - self.k.powi(4) * xx * yy
    }

    /// `(u_xx, u_xy, u_yy)`.
    pub fn hessian(&self, x: f64, y: f64) -> [C64; 3] {
        let a = self.a();
        let s = 2.0 * a * (x + self.l);
        let t = 2.0 * PI * y;
        let (xx, yy) = ((1.0 - s.cos()) / 2.0, (1.0 - t.cos()) / 2.0);
        [
            re(2.0 * a * a * s.cos() * yy),
            re(a * s.sin() * PI * t.sin()),
            re(xx * 2.0 * PI * PI * t.cos()),
        ]
    }
}

pub fn h2_errors(k: f64) -> Vec<(f64, f64)> {
    let m = Manufactured { l: 0.5, k };
    [4usize, 8, 16, 32]
        .iter()
        .map(|&n| {
            let mesh = StripMesh::new(m.l, n, n, None).unwrap();
            let sys = FemProblem::new(mesh, k, 0.3, BoundaryKind::Clamped, EndCondition::Clamped)
                .unwrap()
                .assemble()
                .unwrap();
            let b = sys.load_vector(&|x, y| re(m.source(x, y)), 6);
            let u = sys.solve(&b).unwrap();
            let e = u.h2_seminorm_error_sq(|x, y| m.hessian(x, y), 6).sqrt();
            (1.0 / n as f64, e)
        })
        .collect()
}


fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &a)| i as f64 * a).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `u = Σ_m A_m (1 − x²)⁵ q_m(x) sin(mπy)` on `(−1, 1) × (0, 1)`: zero with
/// its gradient on `x = ±1`, zero on `y ∈ {0, 1}`.
pub struct SineField {
    /// `(m, A_m, coefficients of q_m)`.
    pub terms: Vec<(usize, C64, Vec<f64>)>,
}

impl SineField {
    /// `(u_xx, u_xy, u_yy)`.
    fn hessian(&self, x: f64, y: f64) -> [C64; 3] {
        let mut envelope = vec![1.0];
        for _ in 0..5 {
            envelope = poly_mul(&envelope, &[1.0, 0.0, -1.0]);
        }
        let mut h = [C64::new(0.0, 0.0); 3];
        for (m, a, q) in &self.terms {
            let c0 = poly_mul(&envelope, q);
            let c1 = poly_deriv(&c0);
            let c2 = poly_deriv(&c1);
            let w = *m as f64 * PI;
            let (s, c) = ((w * y).sin(), (w * y).cos());
            h[0] += a * poly_eval(&c2, x) * s;
            h[1] += a * poly_eval(&c1, x) * w * c;
            h[2] -= a * poly_eval(&c0, x) * w * w * s;
        }
        h
    }

    /// `(∫ |u_xx|² + 2|u_xy|² + |u_yy|², ∫ |Δu|²)`.
    pub fn hessian_and_laplacian_norms(&self) -> (f64, f64) {
        let rule = GaussRule::new(16);
        let xq = rule.composite(-1.0, 1.0, 8);
        let yq = rule.composite(0.0, 1.0, 8);
        let (mut hess, mut lap) = (0.0, 0.0);
        for &(x, wx) in &xq {
            for &(y, wy) in &yq {
                let [xx, xy, yy] = self.hessian(x, y);
                hess += wx * wy * (xx.norm_sqr() + 2.0 * xy.norm_sqr() + yy.norm_sqr());
                lap += wx * wy * (xx + yy).norm_sqr();
            }
        }
        (hess, lap)
    }
}
