//! Not-a-knot cubic spline on a strictly increasing grid.

use crate::error::{FewBodyError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    uniform_step: Option<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(FewBodyError::ShapeMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if n < 4 {
            return Err(FewBodyError::InvalidParams(format!(
                "cubic spline needs at least 4 knots, got {n}"
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FewBodyError::InvalidParams(
                "spline knots must be strictly increasing".into(),
            ));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(FewBodyError::InvalidParams(
                "spline values must be finite".into(),
            ));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Tridiagonal system for the interior second derivatives M_1..M_{n-2};
        // the not-a-knot conditions express M_0 and M_{n-1} through their
        // neighbours and are substituted into the first and last rows.
        let k = n - 2;
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for r in 0..k {
            let i = r + 1;
            sub[r] = h[i - 1];
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            sup[r] = h[i];
            rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
        }
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        sup[0] -= h0 * h0 / h1;
        let (ha, hb) = (h[n - 3], h[n - 2]);
        diag[k - 1] += hb * (ha + hb) / ha;
        sub[k - 1] -= hb * hb / ha;

        for r in 1..k {
            let w = sub[r] / diag[r - 1];
            diag[r] -= w * sup[r - 1];
            rhs[r] -= w * rhs[r - 1];
        }
        let mut m = vec![0.0; n];
        m[k] = rhs[k - 1] / diag[k - 1];
        for r in (0..k - 1).rev() {
            m[r + 1] = (rhs[r] - sup[r] * m[r + 2]) / diag[r];
        }
        m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
        m[n - 1] = ((ha + hb) * m[n - 2] - hb * m[n - 3]) / ha;

        let step = (x[n - 1] - x[0]) / (n - 1) as f64;
        let uniform = h.iter().all(|hi| (hi - step).abs() <= 1e-9 * step);
        Ok(Self {
            x,
            y,
            m,
            uniform_step: uniform.then_some(step),
        })
    }

    pub fn min_x(&self) -> f64 {
        self.x[0]
    }

    pub fn max_x(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    fn interval(&self, t: f64) -> usize {
        let last = self.x.len() - 2;
        match self.uniform_step {
            Some(step) => (((t - self.x[0]) / step).floor().max(0.0) as usize).min(last),
            None => self
                .x
                .partition_point(|&xi| xi <= t)
                .saturating_sub(1)
                .min(last),
        }
    }

    /// Evaluates the spline; outside the knot range the boundary cubic is extended.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let a = self.x[i + 1] - t;
        let b = t - self.x[i];
        self.m[i] * a * a * a / (6.0 * h)
            + self.m[i + 1] * b * b * b / (6.0 * h)
            + (self.y[i] / h - self.m[i] * h / 6.0) * a
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }
}
