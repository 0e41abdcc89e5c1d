//! C¹ cubic Hermite elements on the transverse interval (0, 1).

use crate::numerics::{GaussRule, C64};

/// Cubic Hermite shape functions on an element of length `h`, evaluated at
/// the local coordinate `t ∈ [0, 1]`. Row `d` holds the `d`-th physical
/// derivative of the four local functions (left value, left slope, right
/// value, right slope).
pub fn hermite_shapes(t: f64, h: f64) -> [[f64; 4]; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    let ref_vals = [
        [1.0 - 3.0 * t2 + 2.0 * t3, t - 2.0 * t2 + t3, 3.0 * t2 - 2.0 * t3, -t2 + t3],
        [-6.0 * t + 6.0 * t2, 1.0 - 4.0 * t + 3.0 * t2, 6.0 * t - 6.0 * t2, -2.0 * t + 3.0 * t2],
        [-6.0 + 12.0 * t, -4.0 + 6.0 * t, 6.0 - 12.0 * t, -2.0 + 6.0 * t],
        [12.0, 6.0, -12.0, 6.0],
    ];
    let mut out = [[0.0; 4]; 4];
    let mut dscale = 1.0;
    for d in 0..4 {
        for f in 0..4 {
            let slope_scale = if f % 2 == 1 { h } else { 1.0 };
            out[d][f] = ref_vals[d][f] * slope_scale * dscale;
        }
        dscale /= h;
    }
    out
}

/// Essential conditions at `y = 0` and `y = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndConstraint {
    /// `φ = 0`.
    Value,
    /// `φ = φ' = 0`.
    ValueAndSlope,
}

/// Uniform Hermite grid on (0, 1) with value and slope degrees of freedom.
///
/// Global numbering: node `i` owns dofs `2i` (value) and `2i + 1` (slope).
/// Constrained dofs stay in the numbering and are always zero; `free` maps
/// them to the reduced unknowns.
#[derive(Debug, Clone)]
pub struct HermiteGrid1D {
    pub n_elems: usize,
    pub nodes: Vec<f64>,
    pub constraint: EndConstraint,
    free: Vec<Option<usize>>,
    n_free: usize,
}

impl HermiteGrid1D {
    pub fn new(n_elems: usize, constraint: EndConstraint) -> Self {
        assert!(n_elems >= 2, "need at least two elements");
        let nodes: Vec<f64> = (0..=n_elems).map(|i| i as f64 / n_elems as f64).collect();
        let ndof = 2 * (n_elems + 1);
        let mut free = vec![None; ndof];
        let mut n_free = 0;
        for (dof, slot) in free.iter_mut().enumerate() {
            let node = dof / 2;
            let is_slope = dof % 2 == 1;
            let at_end = node == 0 || node == n_elems;
            let constrained =
                at_end && (!is_slope || constraint == EndConstraint::ValueAndSlope);
            if !constrained {
                *slot = Some(n_free);
                n_free += 1;
            }
        }
        HermiteGrid1D { n_elems, nodes, constraint, free, n_free }
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_elems as f64
    }

    pub fn n_dofs(&self) -> usize {
        2 * (self.n_elems + 1)
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn free_index(&self, dof: usize) -> Option<usize> {
        self.free[dof]
    }

    /// Global dofs of element `e`.
    pub fn element_dofs(&self, e: usize) -> [usize; 4] {
        [2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3]
    }

    /// Element index and local coordinate of `y`.
    pub fn locate(&self, y: f64) -> (usize, f64) {
        let h = self.h();
        let e = ((y / h).floor() as isize).clamp(0, self.n_elems as isize - 1) as usize;
        (e, (y - self.nodes[e]) / h)
    }

    /// Derivatives 0..=3 of the field with global coefficients `coef` at `y`.
    pub fn eval(&self, coef: &[C64], y: f64) -> [C64; 4] {
        let (e, t) = self.locate(y);
        let sh = hermite_shapes(t, self.h());
        let dofs = self.element_dofs(e);
        let mut out = [C64::new(0.0, 0.0); 4];
        for (d, o) in out.iter_mut().enumerate() {
            for f in 0..4 {
                *o += coef[dofs[f]] * sh[d][f];
            }
        }
        out
    }

    /// Expand a reduced solution vector to the global numbering.
    pub fn expand(&self, reduced: &[C64]) -> Vec<C64> {
        self.free
            .iter()
            .map(|f| f.map_or(C64::new(0.0, 0.0), |i| reduced[i]))
            .collect()
    }

    /// Global load vector `∫ g ψ_i` using `quad_pts` Gauss points per element.
    pub fn load_vector<F: Fn(f64) -> C64>(&self, g: F, quad_pts: usize) -> Vec<C64> {
        let rule = GaussRule::new(quad_pts);
        let h = self.h();
        let mut b = vec![C64::new(0.0, 0.0); self.n_dofs()];
        for e in 0..self.n_elems {
            let dofs = self.element_dofs(e);
            for (t, w) in rule.on(0.0, 1.0) {
                let y = self.nodes[e] + t * h;
                let sh = hermite_shapes(t, h);
                let gv = g(y) * (w * h);
                for f in 0..4 {
                    b[dofs[f]] += gv * sh[0][f];
                }
            }
        }
        b
    }

    /// Quadrature points and weights covering (0, 1), `pts` per element.
    pub fn quadrature(&self, pts: usize) -> Vec<(f64, f64)> {
        GaussRule::new(pts).composite(0.0, 1.0, self.n_elems)
    }
}

/// Element matrices on an element of length `h`: mass `∫φψ`, slope
/// `∫φ'ψ'` and curvature `∫φ''ψ''`, exact by 4-point Gauss.
pub fn element_matrices(h: f64) -> ([[f64; 4]; 4], [[f64; 4]; 4], [[f64; 4]; 4]) {
    let rule = GaussRule::new(4);
    let mut m = [[0.0; 4]; 4];
    let mut g = [[0.0; 4]; 4];
    let mut k = [[0.0; 4]; 4];
    for (t, w) in rule.on(0.0, 1.0) {
        let sh = hermite_shapes(t, h);
        for a in 0..4 {
            for b in 0..4 {
                m[a][b] += w * h * sh[0][a] * sh[0][b];
                g[a][b] += w * h * sh[1][a] * sh[1][b];
                k[a][b] += w * h * sh[2][a] * sh[2][b];
            }
        }
    }
    (m, g, k)
}
