//! C⁴ cut-off functions of `x` built from the degree-9 smoothstep.

/// `S(t) = 126t⁵ − 420t⁶ + 540t⁷ − 315t⁸ + 70t⁹` clamped to [0, 1], with its
/// first four derivatives. `S` is C⁴ at both ends of the ramp.
pub fn smoothstep9(t: f64) -> [f64; 5] {
    smoothstep(4, t)
}

/// Smoothstep that is C^`order` at both ends: the normalized antiderivative
/// of `tᴺ(1 − t)ᴺ`, a polynomial of degree `2N + 1`. Value and four derivatives.
///
/// Evaluated in Bernstein form, `S(t) = Σ_{j>N} C(2N+1, j) tʲ(1 − t)^{2N+1−j}`,
/// since the monomial coefficients cancel badly once `N` grows.
pub fn smoothstep(order: u32, t: f64) -> [f64; 5] {
    if t <= 0.0 {
        return [0.0; 5];
    }
    if t >= 1.0 {
        return [1.0, 0.0, 0.0, 0.0, 0.0];
    }
    let n = order as i32;
    let binom = |a: i32, b: i32| -> f64 {
        if b < 0 || b > a {
            return 0.0;
        }
        (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
    };
    // (N)_j = N!/(N − j)!, zero once j > N.
    let falling = |a: i32, j: i32| -> f64 {
        if j > a {
            return 0.0;
        }
        (0..j).fold(1.0, |acc, i| acc * (a - i) as f64)
    };
    let pow = |x: f64, e: i32| if e < 0 { 0.0 } else { x.powi(e) };
    let u = 1.0 - t;
    let mut out = [0.0; 5];
    out[0] = (n + 1..=2 * n + 1).map(|j| binom(2 * n + 1, j) * pow(t, j) * pow(u, 2 * n + 1 - j)).sum();
    let scale = (2 * n + 1) as f64 * binom(2 * n, n);
    for d in 1..5 {
        // d^m/dt^m [tᴺ(1 − t)ᴺ] by Leibniz, m = d − 1.
        let m = d as i32 - 1;
        let v: f64 = (0..=m)
            .map(|j| {
                let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
                binom(m, j) * falling(n, j) * pow(t, n - j) * falling(n, m - j) * pow(u, n - m + j) * sign
            })
            .sum();
        out[d] = scale * v;
    }
    out
}

/// One-sided ramp `x ↦ S((s·x − a)/w)` with orientation `s = ±1`.
///
/// With `s = +1` the ramp is 0 for `x ≤ a` and 1 for `x ≥ a + w`; with
/// `s = −1` it is the mirror image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    pub start: f64,
    pub width: f64,
    pub orientation: f64,
    /// Smoothness at the ends of the ramp, see [`smoothstep`].
    pub order: u32,
}

impl Ramp {
    pub fn rising(start: f64, width: f64) -> Self {
        Ramp { start, width, orientation: 1.0, order: 4 }
    }

    /// Mirror of [`Ramp::rising`]: 1 for `x ≤ −start − width`, 0 for `x ≥ −start`.
    pub fn falling(start: f64, width: f64) -> Self {
        Ramp { start, width, orientation: -1.0, order: 4 }
    }

    /// χ⁺ of the clamped construction: 0 for `x ≤ L`, 1 for `x ≥ 2L`.
    pub fn chi_plus(l: f64) -> Self {
        Ramp::rising(l, l)
    }

    /// χ⁻: 1 for `x ≤ −2L`, 0 for `x ≥ −L`.
    pub fn chi_minus(l: f64) -> Self {
        Ramp::falling(l, l)
    }

    pub fn with_order(self, order: u32) -> Self {
        Ramp { order, ..self }
    }

    /// Value and four x-derivatives.
    pub fn eval(&self, x: f64) -> [f64; 5] {
        let s = smoothstep(self.order, (self.orientation * x - self.start) / self.width);
        let mut out = [0.0; 5];
        let mut scale = 1.0;
        for d in 0..5 {
            out[d] = s[d] * scale;
            scale *= self.orientation / self.width;
        }
        out
    }

    /// Interval on which derivatives may be nonzero.
    pub fn transition(&self) -> (f64, f64) {
        let a = self.start * self.orientation;
        let b = (self.start + self.width) * self.orientation;
        (a.min(b), a.max(b))
    }
}

/// Even cut-off `ζ(x) = S((|x| − x₀)/w)`: 0 near the origin, 1 for `|x| ≥ x₀ + w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenCutoff {
    pub x0: f64,
    pub width: f64,
}

impl EvenCutoff {
    pub fn eval(&self, x: f64) -> [f64; 5] {
        if x >= 0.0 {
            Ramp::rising(self.x0, self.width).eval(x)
        } else {
            Ramp::falling(self.x0, self.width).eval(x)
        }
    }

    /// Right-hand transition band `[x₀, x₀ + w]`; the left one is its mirror.
    pub fn band(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_matches_finite_differences() {
        let h = 1e-5;
        for &t in &[0.1, 0.37, 0.5, 0.81] {
            let s = smoothstep9(t);
            let sp = smoothstep9(t + h);
            let sm = smoothstep9(t - h);
            for d in 0..4 {
                let fd = (sp[d] - sm[d]) / (2.0 * h);
                assert!((fd - s[d + 1]).abs() < 1e-5 * (1.0 + s[d + 1].abs()), "t={t} d={d}");
            }
        }
    }

    #[test]
    fn general_order_reduces_to_the_degree_nine_step() {
        for &t in &[0.13, 0.5, 0.77] {
            let p = t * t * t * t * t * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))));
            assert!((smoothstep(4, t)[0] - p).abs() < 1e-14);
        }
        for order in [1, 6, 10] {
            assert!((smoothstep(order, 0.5)[0] - 0.5).abs() < 1e-13);
            assert!((smoothstep(order, 0.3)[0] + smoothstep(order, 0.7)[0] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn smoothstep_is_c4_at_the_ends() {
        let lo = smoothstep9(1e-9);
        let hi = smoothstep9(1.0 - 1e-9);
        for d in 0..5 {
            assert!(lo[d].abs() < 1e-4, "d={d}");
        }
        assert!((hi[0] - 1.0).abs() < 1e-12);
        for d in 1..5 {
            assert!(hi[d].abs() < 1e-4, "d={d}");
        }
        assert!((smoothstep9(0.5)[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chi_pair_mirrors() {
        let l = 0.7;
        let (p, m) = (Ramp::chi_plus(l), Ramp::chi_minus(l));
        for &x in &[0.2, 0.9, 1.1, 1.5] {
            let a = p.eval(x);
            let b = m.eval(-x);
            for d in 0..5 {
                let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
                assert!((a[d] - sign * b[d]).abs() < 1e-12);
            }
        }
        assert_eq!(p.eval(2.0 * l)[0], 1.0);
        assert_eq!(m.eval(-2.0 * l)[0], 1.0);
        assert_eq!(m.transition(), (-2.0 * l, -l));
    }
}
