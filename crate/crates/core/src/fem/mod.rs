//! Bogner-Fox-Schmit (bicubic Hermite) plate elements on `Ω_L`, with the
//! simply supported DtN coupling on `Σ_{±L}`.
//!
//! The discrete problem is `a(u, v) − k⁴(u, v) − t(u, v) = (f, v)` with
//! `a(u,v) = ∫ νΔuΔv̄ + (1−ν)(u_xx v̄_xx + 2u_xy v̄_xy + u_yy v̄_yy)`. All
//! basis functions are real, so the system matrix is complex symmetric.

mod blocktri;
mod field;
mod mesh;

pub use field::{Derivatives, Edge, PlateField};
pub use mesh::{RectHole, StripMesh};

use crate::dtn::{check_nu, DtnOperator, Side, DEFAULT_P_MAX};
use crate::error::{Error, Result};
use crate::hermite::hermite_shapes;
use crate::numerics::{GaussRule, C64};
use crate::transverse::BoundaryKind;
use blocktri::BlockTridiagLu;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// Condition imposed on the end sections `x = ±L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndCondition {
    /// Outgoing radiation through the DtN operator (simply supported strips only).
    Dtn,
    Clamped,
    SimplySupported,
    /// Natural conditions `Mu = Nu = 0`.
    Free,
}

/// Relative residual accepted after the sparse solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Maps `(node, local dof)` to unknown indices; constrained and inactive
/// dofs have no index.
#[derive(Debug, Clone)]
pub struct DofMap {
    index: Vec<Option<usize>>,
    n_free: usize,
}

impl DofMap {
    pub fn build(mesh: &StripMesh, lateral: BoundaryKind, ends: EndCondition) -> Self {
        let mut index = vec![None; 4 * mesh.n_nodes()];
        let mut n_free = 0;
        for i in 0..=mesh.nx {
            for j in 0..=mesh.ny {
                let id = mesh.node_id(i, j);
                if !mesh.node_active(id) {
                    continue;
                }
                let mut fixed = [false; 4];
                if j == 0 || j == mesh.ny {
                    match lateral {
                        // u = 0 along the edge forces u_x = 0 too.
                        BoundaryKind::SimplySupported => {
                            fixed[0] = true;
                            fixed[1] = true;
                        }
                        BoundaryKind::Clamped => fixed = [true; 4],
                    }
                }
                if i == 0 || i == mesh.nx {
                    match ends {
                        EndCondition::Clamped => fixed = [true; 4],
                        EndCondition::SimplySupported => {
                            fixed[0] = true;
                            fixed[2] = true;
                        }
                        EndCondition::Dtn | EndCondition::Free => {}
                    }
                }
                for (d, &f) in fixed.iter().enumerate() {
                    if !f {
                        index[4 * id + d] = Some(n_free);
                        n_free += 1;
                    }
                }
            }
        }
        DofMap { index, n_free }
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn get(&self, node: usize, dof: usize) -> Option<usize> {
        self.index[4 * node + dof]
    }

    /// First unknown of every mesh column `x = x_i`, followed by `n_free`.
    /// Columns without unknowns are dropped.
    pub fn column_offsets(&self, mesh: &StripMesh) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(mesh.nx + 2);
        for i in 0..=mesh.nx {
            let first = (0..=mesh.ny).flat_map(|j| (0..4).map(move |d| (j, d))).find_map(|(j, d)| self.get(mesh.node_id(i, j), d));
            if let Some(f) = first {
                offsets.push(f);
            }
        }
        offsets.push(self.n_free);
        offsets
    }
}

/// Compressed sparse column matrix with summed duplicates.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub vals: Vec<C64>,
}

impl SparseMatrix {
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, C64)>) -> Self {
        t.sort_by_key(|&(i, j, _)| (j, i));
        let mut col_ptr = vec![0usize; n + 1];
        let mut row_idx = Vec::with_capacity(t.len());
        let mut vals: Vec<C64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                row_idx.push(i);
                vals.push(v);
                col_ptr[j + 1] += 1;
                last = Some((i, j));
            }
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        SparseMatrix { n, col_ptr, row_idx, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        match self.row_idx[range.clone()].binary_search(&i) {
            Ok(pos) => self.vals[range.start + pos],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for (j, &xj) in x.iter().enumerate() {
            for idx in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.row_idx[idx]] += self.vals[idx] * xj;
            }
        }
        y
    }

    /// `max |A_ij − A_ji| / max |A_ij|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for j in 0..self.n {
            for idx in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[idx];
                scale = scale.max(self.vals[idx].norm());
                worst = worst.max((self.vals[idx] - self.get(j, i)).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Matrix Market coordinate format (1-based indices).
    pub fn write_matrix_market(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(out, "{} {} {}", self.n, self.n, self.nnz())?;
        for j in 0..self.n {
            for idx in self.col_ptr[j]..self.col_ptr[j + 1] {
                let v = self.vals[idx];
                writeln!(out, "{} {} {:.17e} {:.17e}", self.row_idx[idx] + 1, j + 1, v.re, v.im)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// 16×16 element stiffness (plate form) and mass matrices on an
/// `hx × hy` rectangle. Local index `4·node + dof`.
pub fn element_matrices(hx: f64, hy: f64, nu: f64) -> (Vec<[f64; 16]>, Vec<[f64; 16]>) {
    let rule = GaussRule::new(4);
    let mut k = vec![[0.0; 16]; 16];
    let mut m = vec![[0.0; 16]; 16];
    let idx: Vec<(usize, usize)> = (0..16).map(|l| field::shape_index(l / 4, l % 4)).collect();
    for (tx, wx) in rule.on(0.0, 1.0) {
        let sx = hermite_shapes(tx, hx);
        for (ty, wy) in rule.on(0.0, 1.0) {
            let sy = hermite_shapes(ty, hy);
            let w = wx * wy * hx * hy;
            let d = |l: usize, a: usize, b: usize| sx[a][idx[l].0] * sy[b][idx[l].1];
            for r in 0..16 {
                let (rxx, ryy, rxy, r0) = (d(r, 2, 0), d(r, 0, 2), d(r, 1, 1), d(r, 0, 0));
                for c in 0..16 {
                    let (cxx, cyy, cxy, c0) = (d(c, 2, 0), d(c, 0, 2), d(c, 1, 1), d(c, 0, 0));
                    k[r][c] += w
                        * (rxx * cxx + ryy * cyy + nu * (rxx * cyy + ryy * cxx) + 2.0 * (1.0 - nu) * rxy * cxy);
                    m[r][c] += w * r0 * c0;
                }
            }
        }
    }
    (k, m)
}

/// `∫ ψ θ_p dy` for every 1D Hermite function `ψ` of the `y`-grid of `mesh`
/// (index `2j` value, `2j + 1` slope at node `j`), for `p = 1..p_max`.
/// Uses `max(8, p + 4)` Gauss points per element.
pub(crate) fn edge_projections(mesh: &StripMesh, p_max: usize) -> Vec<Vec<f64>> {
    let hy = mesh.hy;
    (1..=p_max)
        .map(|p| {
            let rule = GaussRule::new((p + 4).max(8));
            let mut out = vec![0.0; 2 * (mesh.ny + 1)];
            for e in 0..mesh.ny {
                for (t, w) in rule.on(0.0, 1.0) {
                    let y = (e as f64 + t) * hy;
                    let th = SQRT_2 * (PI * p as f64 * y).sin() * w * hy;
                    let s = hermite_shapes(t, hy);
                    for f in 0..4 {
                        out[2 * e + f] += s[0][f] * th;
                    }
                }
            }
            out
        })
        .collect()
}

/// Modal trace functionals of the unknowns on one end section.
#[derive(Debug, Clone)]
pub struct SideCoupling {
    pub side: Side,
    /// `g_p(φ_i)` as sparse vectors `(unknown, value)`, one per mode.
    pub wg: Vec<Vec<(usize, f64)>>,
    /// `h_p(φ_i) = ∫ ∂_n φ_i θ_p`.
    pub wh: Vec<Vec<(usize, f64)>>,
}

/// The rank-structured DtN term `−t(·,·)` of the system matrix.
#[derive(Debug, Clone)]
pub struct DtnCoupling {
    pub operator: DtnOperator,
    pub sides: Vec<SideCoupling>,
}

impl DtnCoupling {
    /// Entries `−Σ_p w(i)ᵀ T_p w(j)`.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for sc in &self.sides {
            for (p, b) in self.operator.blocks.iter().enumerate() {
                let w = [&sc.wg[p], &sc.wh[p]];
                for (a, wa) in w.iter().enumerate() {
                    for (bb, wb) in w.iter().enumerate() {
                        let t = b.t[a][bb];
                        for &(i, vi) in wa.iter() {
                            for &(j, vj) in wb.iter() {
                                out.push((i, j, -t * (vi * vj)));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn assemble_dtn_coupling(
    mesh: &StripMesh,
    dofs: &DofMap,
    k: f64,
    nu: f64,
    p_max: usize,
) -> Result<DtnCoupling> {
    let operator = DtnOperator::new(k, nu, p_max)?;
    let proj = edge_projections(mesh, p_max);
    let mut sides = Vec::with_capacity(2);
    for side in [Side::Left, Side::Right] {
        let i = if side == Side::Left { 0 } else { mesh.nx };
        let s = side.normal_sign();
        let mut wg = Vec::with_capacity(p_max);
        let mut wh = Vec::with_capacity(p_max);
        for pr in &proj {
            let mut g = Vec::new();
            let mut h = Vec::new();
            for j in 0..=mesh.ny {
                let node = mesh.node_id(i, j);
                let (pv, ps) = (pr[2 * j], pr[2 * j + 1]);
                for (dof, val, target) in [(0, pv, 0), (2, ps, 0), (1, s * pv, 1), (3, s * ps, 1)] {
                    if let Some(idx) = dofs.get(node, dof) {
                        if target == 0 {
                            g.push((idx, val));
                        } else {
                            h.push((idx, val));
                        }
                    }
                }
            }
            wg.push(g);
            wh.push(h);
        }
        sides.push(SideCoupling { side, wg, wh });
    }
    Ok(DtnCoupling { operator, sides })
}

/// A finite element discretisation of the plate on `Ω_L`.
#[derive(Debug, Clone)]
pub struct FemProblem {
    pub mesh: Arc<StripMesh>,
    pub k: f64,
    pub nu: f64,
    pub lateral: BoundaryKind,
    pub ends: EndCondition,
    pub p_max: usize,
}

impl FemProblem {
    pub fn new(mesh: StripMesh, k: f64, nu: f64, lateral: BoundaryKind, ends: EndCondition) -> Result<Self> {
        check_nu(nu)?;
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("k must be non-negative, got {k}")));
        }
        if ends == EndCondition::Dtn && lateral != BoundaryKind::SimplySupported {
            return Err(Error::InvalidParameter(
                "the DtN end condition exists only for simply supported strips".into(),
            ));
        }
        Ok(FemProblem { mesh: Arc::new(mesh), k, nu, lateral, ends, p_max: DEFAULT_P_MAX })
    }

    pub fn with_p_max(mut self, p_max: usize) -> Self {
        self.p_max = p_max;
        self
    }

    /// Volume part `a − k⁴(·,·)` plus, for [`EndCondition::Dtn`], `−t`.
    pub fn assemble(&self) -> Result<AssembledSystem> {
        let mut sys = assemble_plate(self.mesh.clone(), self.nu, self.k, self.lateral, self.ends);
        if self.ends == EndCondition::Dtn {
            let c = assemble_dtn_coupling(&self.mesh, &sys.dofs, self.k, self.nu, self.p_max)?;
            let mut t = sys.triplets();
            t.extend(c.triplets());
            sys.matrix = SparseMatrix::from_triplets(sys.dofs.n_free(), t);
            sys.dtn = Some(c);
        }
        Ok(sys)
    }
}

/// Complex symmetric system `A = K − k⁴M − T` on the free unknowns.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub mesh: Arc<StripMesh>,
    pub dofs: DofMap,
    pub matrix: SparseMatrix,
    pub k: f64,
    pub nu: f64,
    pub dtn: Option<DtnCoupling>,
}

/// Element-to-unknown map: unknown index (or `None`) for local dof `4·node + dof`.
fn element_map(mesh: &StripMesh, dofs: &DofMap, ex: usize, ey: usize) -> [Option<usize>; 16] {
    let nodes = mesh.element_nodes(ex, ey);
    let mut map = [None; 16];
    for (ln, &n) in nodes.iter().enumerate() {
        for d in 0..4 {
            map[4 * ln + d] = dofs.get(n, d);
        }
    }
    map
}

/// Volume part only: `a(·,·) − k⁴(·,·)` with the essential conditions.
pub fn assemble_plate(
    mesh: Arc<StripMesh>,
    nu: f64,
    k: f64,
    lateral: BoundaryKind,
    ends: EndCondition,
) -> AssembledSystem {
    let dofs = DofMap::build(&mesh, lateral, ends);
    let (ke, me) = element_matrices(mesh.hx, mesh.hy, nu);
    let k4 = k.powi(4);
    let blocks: Vec<Vec<(usize, usize, C64)>> = mesh
        .elements()
        .par_iter()
        .map(|&(ex, ey)| {
            let map = element_map(&mesh, &dofs, ex, ey);
            let mut t = Vec::with_capacity(256);
            for r in 0..16 {
                let Some(i) = map[r] else { continue };
                for c in 0..16 {
                    let Some(j) = map[c] else { continue };
                    t.push((i, j, C64::new(ke[r][c] - k4 * me[r][c], 0.0)));
                }
            }
            t
        })
        .collect();
    let t: Vec<_> = blocks.into_iter().flatten().collect();
    let matrix = SparseMatrix::from_triplets(dofs.n_free(), t);
    AssembledSystem { mesh, dofs, matrix, k, nu, dtn: None }
}

impl AssembledSystem {
    fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let m = &self.matrix;
        let mut t = Vec::with_capacity(m.nnz());
        for j in 0..m.n {
            for idx in m.col_ptr[j]..m.col_ptr[j + 1] {
                t.push((m.row_idx[idx], j, m.vals[idx]));
            }
        }
        t
    }

    pub fn n_unknowns(&self) -> usize {
        self.dofs.n_free()
    }

    /// `∫ f φ_i` with a `quad × quad` Gauss rule per element.
    pub fn load_vector(&self, f: &(dyn Fn(f64, f64) -> C64 + Sync), quad: usize) -> Vec<C64> {
        let mesh = &self.mesh;
        let rule = GaussRule::new(quad);
        let idx: Vec<(usize, usize)> = (0..16).map(|l| field::shape_index(l / 4, l % 4)).collect();
        let parts: Vec<([Option<usize>; 16], [C64; 16])> = mesh
            .elements()
            .par_iter()
            .map(|&(ex, ey)| {
                let mut loc = [C64::new(0.0, 0.0); 16];
                for (tx, wx) in rule.on(0.0, 1.0) {
                    let sx = hermite_shapes(tx, mesh.hx);
                    let x = -mesh.l + (ex as f64 + tx) * mesh.hx;
                    for (ty, wy) in rule.on(0.0, 1.0) {
                        let y = (ey as f64 + ty) * mesh.hy;
                        let fv = f(x, y);
                        if fv == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let sy = hermite_shapes(ty, mesh.hy);
                        let w = fv * (wx * wy * mesh.hx * mesh.hy);
                        for (l, slot) in loc.iter_mut().enumerate() {
                            *slot += w * (sx[0][idx[l].0] * sy[0][idx[l].1]);
                        }
                    }
                }
                (element_map(mesh, &self.dofs, ex, ey), loc)
            })
            .collect();
        let mut b = vec![C64::new(0.0, 0.0); self.n_unknowns()];
        for (map, loc) in parts {
            for (m, v) in map.iter().zip(loc) {
                if let Some(i) = m {
                    b[*i] += v;
                }
            }
        }
        b
    }

    /// Unknown vector of a field (its values on free dofs).
    pub fn restrict(&self, field: &PlateField) -> Vec<C64> {
        let mut x = vec![C64::new(0.0, 0.0); self.n_unknowns()];
        for node in 0..self.mesh.n_nodes() {
            for d in 0..4 {
                if let Some(i) = self.dofs.get(node, d) {
                    x[i] = field.nodal[node][d];
                }
            }
        }
        x
    }

    pub fn expand(&self, x: &[C64]) -> PlateField {
        let mut f = PlateField::zeros(self.mesh.clone(), self.nu);
        for node in 0..self.mesh.n_nodes() {
            for d in 0..4 {
                if let Some(i) = self.dofs.get(node, d) {
                    f.nodal[node][d] = x[i];
                }
            }
        }
        f
    }

    pub fn factor(&self) -> Result<FactoredSystem<'_>> {
        let lu = BlockTridiagLu::factor(&self.matrix, self.dofs.column_offsets(&self.mesh))?;
        Ok(FactoredSystem { system: self, lu })
    }

    /// Factor and solve in one go.
    pub fn solve(&self, rhs: &[C64]) -> Result<PlateField> {
        self.factor()?.solve(rhs)
    }
}

/// A factorised system, reusable for many right-hand sides.
pub struct FactoredSystem<'a> {
    pub system: &'a AssembledSystem,
    lu: BlockTridiagLu,
}

impl FactoredSystem<'_> {
    fn raw_solve(&self, rhs: &[C64]) -> Vec<C64> {
        let mut m = faer::Mat::<C64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        self.lu.solve_in_place(&self.system.matrix, &mut m);
        (0..rhs.len()).map(|i| m[(i, 0)]).collect()
    }

    /// Solve with one step of iterative refinement, then require
    /// `‖Ax − b‖ / ‖b‖ < 1e-10`.
    pub fn solve_vector(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        let a = &self.system.matrix;
        let bn = crate::numerics::norm2(rhs);
        if bn == 0.0 {
            return Ok(vec![C64::new(0.0, 0.0); rhs.len()]);
        }
        let mut x = self.raw_solve(rhs);
        let residual = |x: &[C64]| -> Vec<C64> { a.matvec(x).iter().zip(rhs).map(|(ax, b)| b - ax).collect() };
        let mut r = residual(&x);
        if crate::numerics::norm2(&r) > 1e-14 * bn {
            let dx = self.raw_solve(&r);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
            r = residual(&x);
        }
        let rel = crate::numerics::norm2(&r) / bn;
        if !rel.is_finite() || rel >= RESIDUAL_TOL {
            return Err(Error::SingularSystem(format!(
                "relative residual {rel:e} after refinement (trapped mode or threshold nearby?)"
            )));
        }
        Ok(x)
    }

    pub fn solve(&self, rhs: &[C64]) -> Result<PlateField> {
        Ok(self.system.expand(&self.solve_vector(rhs)?))
    }

    /// Several right-hand sides against the same factorisation, in parallel.
    pub fn solve_many(&self, rhs: &[Vec<C64>]) -> Result<Vec<PlateField>> {
        rhs.par_iter().map(|b| self.solve(b)).collect()
    }
}
