//! Mean of `log |x - c|` for `x` uniform on an axis-parallel rectangle, and
//! its gradient in `c`, in closed form.

/// Beyond this many half-extents the second-order far-field expansion is used.
const FAR_FIELD: f64 = 256.0;

/// `x y log(x^2 + y^2)`, continuous at the axes.
fn xy_log(x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        0.0
    } else {
        x * y * (x * x + y * y).ln()
    }
}

/// `x^2 atan(y / x)`, continuous at `x = 0`.
fn sq_atan(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x * (y / x).atan()
    }
}

/// Antiderivative of `log(x^2 + y^2)` in both variables.
fn antiderivative(x: f64, y: f64) -> f64 {
    xy_log(x, y) - 3.0 * x * y + sq_atan(x, y) + sq_atan(y, x)
}

/// Antiderivative in `v` of `log(a^2 + v^2) / 2`.
fn half_log_antiderivative(a: f64, v: f64) -> f64 {
    let log_term = if v == 0.0 { 0.0 } else { v * (a * a + v * v).ln() };
    let atan_term = if a == 0.0 { 0.0 } else { 2.0 * a * (v / a).atan() };
    0.5 * (log_term - 2.0 * v + atan_term)
}

/// Mean of `log |x - c|` over the rectangle centred at `(cx, cy)` relative
/// to `c` with half-extents `(hx, hy)`; `(dx, dy)` is the rectangle centre
/// minus `c`. Zero extents give the point value `log |d|`.
pub fn mean_log_distance(dx: f64, dy: f64, hx: f64, hy: f64) -> f64 {
    let h = hx.max(hy);
    let d2 = dx * dx + dy * dy;
    if h == 0.0 || d2 > (FAR_FIELD * h) * (FAR_FIELD * h) {
        // log|x| is harmonic, so the quadratic term reduces to the Hessian
        // contracted with the covariance diag(hx^2/3, hy^2/3).
        let point = 0.5 * d2.ln();
        if h == 0.0 {
            return point;
        }
        let (nx2, ny2) = (dx * dx / d2, dy * dy / d2);
        return point + ((hx * hx) * (1.0 - 2.0 * nx2) + (hy * hy) * (1.0 - 2.0 * ny2)) / (6.0 * d2);
    }
    let (x1, x2, y1, y2) = (dx - hx, dx + hx, dy - hy, dy + hy);
    let total = antiderivative(x2, y2) - antiderivative(x1, y2) - antiderivative(x2, y1) + antiderivative(x1, y1);
    0.5 * total / (4.0 * hx * hy)
}

/// Gradient in `c` of [`mean_log_distance`], i.e. minus the mean of
/// `(x - c) / |x - c|^2`.
pub fn mean_log_distance_grad(dx: f64, dy: f64, hx: f64, hy: f64) -> (f64, f64) {
    let h = hx.max(hy);
    let d2 = dx * dx + dy * dy;
    if h == 0.0 || d2 > (FAR_FIELD * h) * (FAR_FIELD * h) {
        if d2 == 0.0 {
            return (0.0, 0.0);
        }
        return (-dx / d2, -dy / d2);
    }
    let (x1, x2, y1, y2) = (dx - hx, dx + hx, dy - hy, dy + hy);
    let area = 4.0 * hx * hy;
    let gx = half_log_antiderivative(x2, y2) - half_log_antiderivative(x2, y1) - half_log_antiderivative(x1, y2)
        + half_log_antiderivative(x1, y1);
    let gy = half_log_antiderivative(y2, x2) - half_log_antiderivative(y2, x1) - half_log_antiderivative(y1, x2)
        + half_log_antiderivative(y1, x1);
    (-gx / area, -gy / area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn midpoint_mean(dx: f64, dy: f64, hx: f64, hy: f64, n: usize) -> f64 {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                let x = dx - hx + (2.0 * a as f64 + 1.0) * hx / n as f64;
                let y = dy - hy + (2.0 * b as f64 + 1.0) * hy / n as f64;
                s += 0.5 * (x * x + y * y).ln();
            }
        }
        s / (n * n) as f64
    }

    #[test]
    fn matches_quadrature() {
        for &(dx, dy, hx, hy) in
            &[(0.3, -0.2, 0.1, 0.05), (0.0, 0.0, 0.2, 0.1), (0.05, 0.0, 0.1, 0.3), (2.0, 1.0, 0.01, 0.02)]
        {
            let exact = mean_log_distance(dx, dy, hx, hy);
            let approx = midpoint_mean(dx, dy, hx, hy, 1000);
            assert!((exact - approx).abs() < 1e-4, "{dx} {dy}: {exact} vs {approx}");
        }
    }

    #[test]
    fn far_field_is_continuous() {
        let (hx, hy) = (1e-3, 5e-4);
        let d = FAR_FIELD * hx;
        let near = mean_log_distance(d * (1.0 - 1e-13), 0.0, hx, hy);
        let far = mean_log_distance(d * (1.0 + 1e-13), 0.0, hx, hy);
        assert!((near - far).abs() < 1e-9);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for &(dx, dy, hx, hy) in &[(0.3, -0.2, 0.1, 0.05), (0.02, 0.01, 0.1, 0.3), (0.0, 0.0, 0.2, 0.1)] {
            let e = 1e-6;
            // The mean depends on c through d = centre - c.
            let fx = -(mean_log_distance(dx + e, dy, hx, hy) - mean_log_distance(dx - e, dy, hx, hy)) / (2.0 * e);
            let fy = -(mean_log_distance(dx, dy + e, hx, hy) - mean_log_distance(dx, dy - e, hx, hy)) / (2.0 * e);
            let (gx, gy) = mean_log_distance_grad(dx, dy, hx, hy);
            assert!((gx - fx).abs() < 1e-6 && (gy - fy).abs() < 1e-6, "({gx}, {gy}) vs ({fx}, {fy})");
        }
    }
}
