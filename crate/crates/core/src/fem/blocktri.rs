//! Block tridiagonal LU for strip matrices.
//!
//! Unknowns are numbered column by column in `x`, and elements only couple
//! neighbouring mesh columns, so the system is block tridiagonal with blocks
//! of size about `4(ny + 1)`. Eliminating left to right keeps one dense
//! Schur complement per column: memory is `O(nx·m²)` and there is no fill
//! outside the band. The DtN blocks live inside the first and last diagonal
//! blocks. Each Schur complement gets a row-pivoted dense LU.

use super::SparseMatrix;
use crate::error::{Error, Result};
use crate::numerics::C64;
use faer::linalg::matmul::matmul;
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Accum, Mat, MatMut, Par};

pub(crate) struct BlockTridiagLu {
    offsets: Vec<usize>,
    schur: Vec<PartialPivLu<C64>>,
}

fn block_of(offsets: &[usize], i: usize) -> usize {
    offsets.partition_point(|&o| o <= i) - 1
}

/// Dense copy of `A[rows(bi), cols(bj)]`.
fn dense_block(a: &SparseMatrix, offsets: &[usize], bi: usize, bj: usize) -> Mat<C64> {
    let (r0, r1) = (offsets[bi], offsets[bi + 1]);
    let (c0, c1) = (offsets[bj], offsets[bj + 1]);
    let mut m = Mat::<C64>::zeros(r1 - r0, c1 - c0);
    for j in c0..c1 {
        for idx in a.col_ptr[j]..a.col_ptr[j + 1] {
            let i = a.row_idx[idx];
            if (r0..r1).contains(&i) {
                m[(i - r0, j - c0)] = a.vals[idx];
            }
        }
    }
    m
}

/// `y[rows(bi)] −= A[rows(bi), cols(bj)] · x` for `x` living on `cols(bj)`.
fn sub_block_product(a: &SparseMatrix, offsets: &[usize], bi: usize, bj: usize, x: &Mat<C64>, mut y: MatMut<'_, C64>) {
    let (r0, r1) = (offsets[bi], offsets[bi + 1]);
    let c0 = offsets[bj];
    for j in c0..offsets[bj + 1] {
        for idx in a.col_ptr[j]..a.col_ptr[j + 1] {
            let i = a.row_idx[idx];
            if (r0..r1).contains(&i) {
                let v = a.vals[idx];
                for c in 0..x.ncols() {
                    y[(i - r0, c)] -= v * x[(j - c0, c)];
                }
            }
        }
    }
}

impl BlockTridiagLu {
    /// `offsets` are the first unknown of every block plus `n` at the end.
    pub(crate) fn factor(a: &SparseMatrix, offsets: Vec<usize>) -> Result<Self> {
        let nb = offsets.len() - 1;
        for j in 0..a.n {
            let bj = block_of(&offsets, j);
            for idx in a.col_ptr[j]..a.col_ptr[j + 1] {
                if block_of(&offsets, a.row_idx[idx]).abs_diff(bj) > 1 {
                    return Err(Error::SingularSystem("matrix is not block tridiagonal in the column ordering".into()));
                }
            }
        }
        let mut schur = Vec::with_capacity(nb);
        let mut s = dense_block(a, &offsets, 0, 0);
        for b in 0..nb {
            let lu = s.partial_piv_lu();
            if b + 1 < nb {
                // S_{b+1} = A_{b+1,b+1} − A_{b+1,b} S_b⁻¹ A_{b,b+1}
                let mut x = dense_block(a, &offsets, b, b + 1);
                lu.solve_in_place(x.as_mut());
                let lower = dense_block(a, &offsets, b + 1, b);
                s = dense_block(a, &offsets, b + 1, b + 1);
                matmul(s.as_mut(), Accum::Add, lower.as_ref(), x.as_ref(), C64::new(-1.0, 0.0), Par::Seq);
            }
            schur.push(lu);
        }
        Ok(BlockTridiagLu { offsets, schur })
    }

    /// Solve for all columns of `rhs` in place.
    pub(crate) fn solve_in_place(&self, a: &SparseMatrix, rhs: &mut Mat<C64>) {
        let o = &self.offsets;
        let nb = self.schur.len();
        // Forward sweep: y_b = b_b − A_{b,b−1} S_{b−1}⁻¹ y_{b−1}.
        for b in 1..nb {
            let mut t = rhs.as_ref().subrows(o[b - 1], o[b] - o[b - 1]).to_owned();
            self.schur[b - 1].solve_in_place(t.as_mut());
            sub_block_product(a, o, b, b - 1, &t, rhs.as_mut().subrows_mut(o[b], o[b + 1] - o[b]));
        }
        // Back sweep: x_b = S_b⁻¹ (y_b − A_{b,b+1} x_{b+1}).
        for b in (0..nb).rev() {
            if b + 1 < nb {
                let next = rhs.as_ref().subrows(o[b + 1], o[b + 2] - o[b + 1]).to_owned();
                sub_block_product(a, o, b, b + 1, &next, rhs.as_mut().subrows_mut(o[b], o[b + 1] - o[b]));
            }
            self.schur[b].solve_in_place(rhs.as_mut().subrows_mut(o[b], o[b + 1] - o[b]));
        }
    }
}
