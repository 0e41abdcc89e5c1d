use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Axis-aligned rectangular hole `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectHole {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl RectHole {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        RectHole { x0, y0, x1, y1 }
    }

    /// Parse `"x0,y0,x1,y1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match v {
            Ok(v) if v.len() == 4 => Ok(RectHole::new(v[0], v[1], v[2], v[3])),
            _ => Err(Error::InvalidParameter(format!("hole must be x0,y0,x1,y1, got {s:?}"))),
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x > self.x0 && x < self.x1 && y > self.y0 && y < self.y1
    }
}

/// Uniform rectangular mesh of `Ω_L = (−L, L) × (0, 1)`, optionally minus a
/// hole aligned with mesh lines.
///
/// Node `(i, j)` sits at `(−L + i·hx, j·hy)` and has id `i·(ny + 1) + j`.
#[derive(Debug, Clone)]
pub struct StripMesh {
    pub l: f64,
    pub nx: usize,
    pub ny: usize,
    pub hole: Option<RectHole>,
    pub hx: f64,
    pub hy: f64,
    active_elem: Vec<bool>,
    active_node: Vec<bool>,
}

fn on_grid(v: f64, origin: f64, h: f64) -> bool {
    let t = (v - origin) / h;
    (t - t.round()).abs() < 1e-9
}

impl StripMesh {
    pub fn new(l: f64, nx: usize, ny: usize, hole: Option<RectHole>) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidParameter(format!("half-length L must be positive, got {l}")));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidParameter(format!("mesh needs nx, ny >= 2, got {nx} x {ny}")));
        }
        let hx = 2.0 * l / nx as f64;
        let hy = 1.0 / ny as f64;
        if let Some(h) = &hole {
            if !(h.x0 < h.x1 && h.y0 < h.y1) {
                return Err(Error::InvalidParameter(format!("empty hole {h:?}")));
            }
            if !(h.x0 > -l && h.x1 < l && h.y0 > 0.0 && h.y1 < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "hole {h:?} must lie strictly inside (-{l}, {l}) x (0, 1)"
                )));
            }
            if ![h.x0, h.x1].iter().all(|&x| on_grid(x, -l, hx)) || ![h.y0, h.y1].iter().all(|&y| on_grid(y, 0.0, hy)) {
                return Err(Error::InvalidParameter(format!(
                    "hole {h:?} is not aligned with the mesh lines (hx = {hx}, hy = {hy})"
                )));
            }
        }
        let mut active_elem = vec![true; nx * ny];
        if let Some(h) = &hole {
            for ex in 0..nx {
                for ey in 0..ny {
                    let xc = -l + (ex as f64 + 0.5) * hx;
                    let yc = (ey as f64 + 0.5) * hy;
                    if h.contains(xc, yc) {
                        active_elem[ex * ny + ey] = false;
                    }
                }
            }
        }
        let mut active_node = vec![false; (nx + 1) * (ny + 1)];
        for ex in 0..nx {
            for ey in 0..ny {
                if active_elem[ex * ny + ey] {
                    for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                        active_node[(ex + a) * (ny + 1) + ey + b] = true;
                    }
                }
            }
        }
        Ok(StripMesh { l, nx, ny, hole, hx, hy, active_elem, active_node })
    }

    pub fn n_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn node_id(&self, i: usize, j: usize) -> usize {
        i * (self.ny + 1) + j
    }

    pub fn node_coords(&self, id: usize) -> (f64, f64) {
        let (i, j) = (id / (self.ny + 1), id % (self.ny + 1));
        (-self.l + i as f64 * self.hx, j as f64 * self.hy)
    }

    pub fn element_active(&self, ex: usize, ey: usize) -> bool {
        self.active_elem[ex * self.ny + ey]
    }

    pub fn node_active(&self, id: usize) -> bool {
        self.active_node[id]
    }

    /// Active elements as `(ex, ey)` in increasing id order.
    pub fn elements(&self) -> Vec<(usize, usize)> {
        (0..self.nx)
            .flat_map(|ex| (0..self.ny).map(move |ey| (ex, ey)))
            .filter(|&(ex, ey)| self.element_active(ex, ey))
            .collect()
    }

    /// Node ids of element `(ex, ey)` ordered (left-bottom, right-bottom,
    /// left-top, right-top).
    pub fn element_nodes(&self, ex: usize, ey: usize) -> [usize; 4] {
        [
            self.node_id(ex, ey),
            self.node_id(ex + 1, ey),
            self.node_id(ex, ey + 1),
            self.node_id(ex + 1, ey + 1),
        ]
    }

    /// Element containing `(x, y)` with local coordinates, or `None` outside
    /// the mesh or inside the hole.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize, f64, f64)> {
        let tol = 1e-12;
        if x < -self.l - tol || x > self.l + tol || y < -tol || y > 1.0 + tol {
            return None;
        }
        let fx = (x + self.l) / self.hx;
        let fy = y / self.hy;
        let ex = (fx.floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let ey = (fy.floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        let (tx, ty) = (fx - ex as f64, fy - ey as f64);
        if self.element_active(ex, ey) {
            return Some((ex, ey, tx, ty));
        }
        // On a hole edge a neighbouring active element may still own the point.
        for (dx, dy) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
            let (nx_, ny_) = (ex as isize + dx, ey as isize + dy);
            if nx_ < 0 || ny_ < 0 || nx_ >= self.nx as isize || ny_ >= self.ny as isize {
                continue;
            }
            let (tx2, ty2) = (fx - nx_ as f64, fy - ny_ as f64);
            if (-1e-9..=1.0 + 1e-9).contains(&tx2)
                && (-1e-9..=1.0 + 1e-9).contains(&ty2)
                && self.element_active(nx_ as usize, ny_ as usize)
            {
                return Some((nx_ as usize, ny_ as usize, tx2, ty2));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hole_validation() {
        assert!(StripMesh::new(1.5, 160, 40, Some(RectHole::new(-0.3, 0.4, 0.3, 0.7))).is_ok());
        // Touches the end section.
        assert!(StripMesh::new(1.0, 20, 10, Some(RectHole::new(-1.0, 0.4, 0.3, 0.7))).is_err());
        // Off the mesh lines.
        assert!(StripMesh::new(1.0, 20, 10, Some(RectHole::new(-0.33, 0.4, 0.3, 0.7))).is_err());
        assert!(RectHole::parse("1,2,3").is_err());
        assert_eq!(RectHole::parse("-0.3, 0.4,0.3,0.7").unwrap(), RectHole::new(-0.3, 0.4, 0.3, 0.7));
    }

    #[test]
    fn hole_removes_elements_and_interior_nodes() {
        let m = StripMesh::new(1.0, 10, 10, Some(RectHole::new(-0.2, 0.3, 0.2, 0.7))).unwrap();
        assert_eq!(m.elements().len(), 100 - 2 * 4);
        // (0, 0.5) is strictly inside the hole.
        let centre = m.node_id(5, 5);
        assert!(!m.node_active(centre));
        // Hole corner stays active.
        assert!(m.node_active(m.node_id(4, 3)));
        assert!(m.locate(0.0, 0.5).is_none());
        assert!(m.locate(-0.2, 0.5).is_some());
    }
}
