//! Complex banded matrices with partial-pivoting LU, sized for the small
//! transverse systems (bandwidth 3, a few hundred unknowns).

use crate::numerics::C64;

/// Banded matrix in LAPACK `gb` layout: column-major with `2·kl + ku + 1`
/// rows so that pivoting fill fits in place.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<C64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        BandedMatrix { n, kl, ku, ld, ab: vec![C64::new(0.0, 0.0); ld * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + self.ku >= j && i <= j + self.kl, "({i},{j}) outside band");
        j * self.ld + self.kl + self.ku + i - j
    }

    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        let s = self.slot(i, j);
        self.ab[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if i + self.ku < j || i > j + self.kl {
            C64::new(0.0, 0.0)
        } else {
            self.ab[self.slot(i, j)]
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.ab[self.slot(i, j)] * x[j];
            }
        }
        y
    }

    /// In-place LU with partial pivoting. Returns `None` on an exactly zero pivot.
    pub fn factor(mut self) -> Option<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut piv = vec![0usize; n];
        let kv = ku + kl;
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = 0;
            let mut best = -1.0;
            for i in 0..=km {
                let v = self.ab[j * self.ld + kv + i].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[j] = j + p;
            if best == 0.0 {
                return None;
            }
            ju = ju.max((j + ku + p).min(n - 1));
            if p != 0 {
                for col in j..=ju {
                    let a = col * self.ld + kv + j - col;
                    let b = col * self.ld + kv + j + p - col;
                    self.ab.swap(a, b);
                }
            }
            let inv = C64::new(1.0, 0.0) / self.ab[j * self.ld + kv];
            for i in 1..=km {
                self.ab[j * self.ld + kv + i] *= inv;
            }
            for col in (j + 1)..=ju {
                let ujc = self.ab[col * self.ld + kv + j - col];
                if ujc == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 1..=km {
                    let lij = self.ab[j * self.ld + kv + i];
                    self.ab[col * self.ld + kv + j + i - col] -= lij * ujc;
                }
            }
        }
        let diag: Vec<f64> = (0..n).map(|j| self.ab[j * self.ld + kv].norm()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        Some(BandedLu { m: self, piv, pivot_ratio: max / min })
    }
}

/// Factorized banded matrix.
#[derive(Debug, Clone)]
pub struct BandedLu {
    m: BandedMatrix,
    piv: Vec<usize>,
    /// Ratio of largest to smallest pivot modulus; a cheap conditioning proxy.
    pub pivot_ratio: f64,
}

impl BandedLu {
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let m = &self.m;
        let (n, kl, kv) = (m.n, m.kl, m.ku + m.kl);
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            for i in 1..=km {
                b[j + i] -= m.ab[j * m.ld + kv + i] * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= m.ab[j * m.ld + kv];
            let bj = b[j];
            let lo = j.saturating_sub(kv);
            for (i, bi) in b.iter_mut().enumerate().take(j).skip(lo) {
                *bi -= m.ab[j * m.ld + kv + i - j] * bj;
            }
        }
    }
}
