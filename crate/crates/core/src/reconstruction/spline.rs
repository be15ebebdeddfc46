//! Natural cubic spline with complex values on arbitrary increasing knots.

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<Complex64>,
    /// Second derivatives at the knots.
    curvature: Vec<Complex64>,
}

impl CubicSpline {
    /// # Panics
    /// If fewer than two knots are given, lengths differ, or knots are not strictly increasing.
    pub fn natural(knots: Vec<f64>, values: Vec<Complex64>) -> Self {
        let n = knots.len();
        assert!(n >= 2 && values.len() == n, "spline needs matching knots and values");
        assert!(knots.windows(2).all(|w| w[1] > w[0]), "spline knots must increase");
        let zero = Complex64::new(0.0, 0.0);
        let mut curvature = vec![zero; n];
        if n > 2 {
            // Interior equations h_{i-1} M_{i-1} + 2(h_{i-1}+h_i) M_i + h_i M_{i+1} = 6 (Δ_i − Δ_{i-1}).
            let m = n - 2;
            let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
            let slope: Vec<Complex64> = (0..n - 1).map(|i| (values[i + 1] - values[i]) / h[i]).collect();
            let mut diag: Vec<f64> = (0..m).map(|i| 2.0 * (h[i] + h[i + 1])).collect();
            let mut rhs: Vec<Complex64> = (0..m).map(|i| (slope[i + 1] - slope[i]) * 6.0).collect();
            for i in 1..m {
                let f = h[i] / diag[i - 1];
                diag[i] -= f * h[i];
                let prev = rhs[i - 1];
                rhs[i] -= prev * f;
            }
            curvature[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                curvature[i + 1] = (rhs[i] - curvature[i + 2] * h[i + 1]) / diag[i];
            }
        }
        Self {
            knots,
            values,
            curvature,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Value and first derivative; zero outside the knot range.
    pub fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let n = self.knots.len();
        if !(x >= self.knots[0] && x <= self.knots[n - 1]) {
            return (zero, zero);
        }
        let i = self.knots.partition_point(|&k| k <= x).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        let value = y0 * a + y1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0);
        let deriv = (y1 - y0) / h + (m1 * (3.0 * b * b - 1.0) - m0 * (3.0 * a * a - 1.0)) * (h / 6.0);
        (value, deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_functions_exactly() {
        let knots: Vec<f64> = vec![0.0, 0.3, 1.0, 1.7, 2.0];
        let vals = knots.iter().map(|&x| Complex64::new(2.0 * x - 1.0, -x)).collect();
        let s = CubicSpline::natural(knots, vals);
        let (v, d) = s.eval(1.234);
        assert!((v - Complex64::new(1.468, -1.234)).norm() < 1e-14);
        assert!((d - Complex64::new(2.0, -1.0)).norm() < 1e-14);
        assert_eq!(s.eval(2.5).0, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn second_order_accurate_interior() {
        let err = |n: usize| {
            let knots: Vec<f64> = (0..=n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect();
            let vals = knots.iter().map(|&x| Complex64::new(x.sin(), 0.0)).collect();
            let s = CubicSpline::natural(knots, vals);
            (0..50)
                .map(|i| 0.5 + 2.0 * i as f64 / 50.0)
                .map(|x| (s.eval(x).1.re - x.cos()).abs())
                .fold(0.0, f64::max)
        };
        assert!(err(20) / err(40) > 3.5);
    }
}
