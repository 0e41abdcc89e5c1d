use super::mesh::StripMesh;
use crate::dtn::{Side, TraceCoefficients};
use crate::error::Result;
use crate::hermite::hermite_shapes;
use crate::numerics::{GaussRule, C64};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// Straight boundary pieces of `Ω_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `x = −L`.
    Left,
    /// `x = L`.
    Right,
    /// `y = 0`.
    Bottom,
    /// `y = 1`.
    Top,
}

/// Partial derivatives `∂ₓ^a ∂ᵧ^b u` for `a, b ≤ 3`, stored as `d[a][b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub d: [[C64; 4]; 4],
}

impl Derivatives {
    pub fn get(&self, dx: usize, dy: usize) -> C64 {
        self.d[dx][dy]
    }

    pub fn value(&self) -> C64 {
        self.d[0][0]
    }

    pub fn laplacian(&self) -> C64 {
        self.d[2][0] + self.d[0][2]
    }
}

/// Local shape index `(x function, y function)` for local node `n` and dof `d`.
///
/// Local nodes are (left-bottom, right-bottom, left-top, right-top); dofs
/// are `(u, u_x, u_y, u_xy)`. The 1D functions follow
/// [`hermite_shapes`] (left value, left slope, right value, right slope).
pub(crate) fn shape_index(node: usize, dof: usize) -> (usize, usize) {
    let (a, b) = (node % 2, node / 2);
    let xs = if dof == 1 || dof == 3 { 1 } else { 0 };
    let ys = if dof >= 2 { 1 } else { 0 };
    (2 * a + xs, 2 * b + ys)
}

/// Solved finite element field: four nodal values `(u, u_x, u_y, u_xy)` per
/// mesh node (zero on inactive or constrained nodes).
#[derive(Debug, Clone)]
pub struct PlateField {
    pub mesh: Arc<StripMesh>,
    pub nu: f64,
    pub nodal: Vec<[C64; 4]>,
}

impl PlateField {
    pub fn zeros(mesh: Arc<StripMesh>, nu: f64) -> Self {
        let n = mesh.n_nodes();
        PlateField { mesh, nu, nodal: vec![[C64::new(0.0, 0.0); 4]; n] }
    }

    /// Nodal interpolant of a smooth function given by its
    /// `(u, u_x, u_y, u_xy)`.
    pub fn interpolate(mesh: Arc<StripMesh>, nu: f64, f: impl Fn(f64, f64) -> [C64; 4]) -> Self {
        let nodal = (0..mesh.n_nodes())
            .map(|id| {
                if mesh.node_active(id) {
                    let (x, y) = mesh.node_coords(id);
                    f(x, y)
                } else {
                    [C64::new(0.0, 0.0); 4]
                }
            })
            .collect();
        PlateField { mesh, nu, nodal }
    }

    /// All derivatives up to third order in each variable at `(x, y)`; `None`
    /// outside the plate.
    pub fn eval(&self, x: f64, y: f64) -> Option<Derivatives> {
        let (ex, ey, tx, ty) = self.mesh.locate(x, y)?;
        Some(self.eval_local(ex, ey, tx, ty))
    }

    pub(crate) fn eval_local(&self, ex: usize, ey: usize, tx: f64, ty: f64) -> Derivatives {
        let sx = hermite_shapes(tx, self.mesh.hx);
        let sy = hermite_shapes(ty, self.mesh.hy);
        let nodes = self.mesh.element_nodes(ex, ey);
        let mut d = [[C64::new(0.0, 0.0); 4]; 4];
        for (ln, &node) in nodes.iter().enumerate() {
            for dof in 0..4 {
                let c = self.nodal[node][dof];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let (ix, iy) = shape_index(ln, dof);
                for (a, row) in d.iter_mut().enumerate() {
                    for (b, slot) in row.iter_mut().enumerate() {
                        *slot += c * (sx[a][ix] * sy[b][iy]);
                    }
                }
            }
        }
        Derivatives { d }
    }

    /// `(Mu, Nu)` on a straight edge with `n` the outward normal:
    /// `Mu = u_nn + ν u_ss`, `Nu = −(u_nnn + (2 − ν) u_nss)`.
    /// `t` is the abscissa along the edge (`y` on the ends, `x` on the sides).
    pub fn boundary_operators(&self, edge: Edge, t: f64) -> Option<(C64, C64)> {
        let nu = self.nu;
        let l = self.mesh.l;
        let (x, y) = match edge {
            Edge::Left => (-l, t),
            Edge::Right => (l, t),
            Edge::Bottom => (t, 0.0),
            Edge::Top => (t, 1.0),
        };
        let dv = self.eval(x, y)?;
        let g = |a, b| dv.get(a, b);
        Some(match edge {
            Edge::Right => (g(2, 0) + nu * g(0, 2), -(g(3, 0) + (2.0 - nu) * g(1, 2))),
            Edge::Left => (g(2, 0) + nu * g(0, 2), g(3, 0) + (2.0 - nu) * g(1, 2)),
            Edge::Top => (g(0, 2) + nu * g(2, 0), -(g(0, 3) + (2.0 - nu) * g(2, 1))),
            Edge::Bottom => (g(0, 2) + nu * g(2, 0), g(0, 3) + (2.0 - nu) * g(2, 1)),
        })
    }

    /// Modal coefficients `g_p = ∫ u θ_p`, `h_p = ∫ ∂_n u θ_p` on `Σ_{±L}`.
    pub fn traces(&self, side: Side, p_max: usize) -> TraceCoefficients {
        let proj = super::edge_projections(&self.mesh, p_max);
        let i = match side {
            Side::Left => 0,
            Side::Right => self.mesh.nx,
        };
        let s = side.normal_sign();
        let mut g = vec![C64::new(0.0, 0.0); p_max];
        let mut h = vec![C64::new(0.0, 0.0); p_max];
        for j in 0..=self.mesh.ny {
            let n = self.nodal[self.mesh.node_id(i, j)];
            for p in 0..p_max {
                let (pv, ps) = (proj[p][2 * j], proj[p][2 * j + 1]);
                g[p] += n[0] * pv + n[2] * ps;
                h[p] += s * (n[1] * pv + n[3] * ps);
            }
        }
        TraceCoefficients { side, g, h }
    }

    /// Squared `H²` seminorm of `u_h − u` where `exact(x, y)` returns
    /// `(u_xx, u_xy, u_yy)`: `∫ |e_xx|² + 2|e_xy|² + |e_yy|²`.
    pub fn h2_seminorm_error_sq(&self, exact: impl Fn(f64, f64) -> [C64; 3], quad: usize) -> f64 {
        let rule = GaussRule::new(quad);
        let m = &self.mesh;
        let mut total = 0.0;
        for (ex, ey) in m.elements() {
            for (tx, wx) in rule.on(0.0, 1.0) {
                for (ty, wy) in rule.on(0.0, 1.0) {
                    let dv = self.eval_local(ex, ey, tx, ty);
                    let x = -m.l + (ex as f64 + tx) * m.hx;
                    let y = (ey as f64 + ty) * m.hy;
                    let e = exact(x, y);
                    let w = wx * wy * m.hx * m.hy;
                    total += w
                        * ((dv.get(2, 0) - e[0]).norm_sqr()
                            + 2.0 * (dv.get(1, 1) - e[1]).norm_sqr()
                            + (dv.get(0, 2) - e[2]).norm_sqr());
                }
            }
        }
        total
    }

    /// CSV samples `x,y,re_u,im_u` on an `nxs × nys` grid with 12 significant
    /// digits; points in the hole are skipped.
    pub fn write_csv(&self, path: &Path, nxs: usize, nys: usize) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "x,y,re_u,im_u")?;
        let l = self.mesh.l;
        for i in 0..nxs {
            let x = -l + 2.0 * l * i as f64 / (nxs - 1).max(1) as f64;
            for j in 0..nys {
                let y = j as f64 / (nys - 1).max(1) as f64;
                if let Some(d) = self.eval(x, y) {
                    let u = d.value();
                    writeln!(out, "{:.11e},{:.11e},{:.11e},{:.11e}", x, y, u.re, u.im)?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }
}
