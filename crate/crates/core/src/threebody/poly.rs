//! Polynomials in two variables and their Gaussian expectations.

pub(crate) const MAX_DEG: usize = 6;
const N: usize = MAX_DEG + 1;

/// `Σ c[i][j] x^i y^j` with total degree at most [`MAX_DEG`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Poly2 {
    c: [[f64; N]; N],
    /// Upper bound on the total degree.
    deg: usize,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self {
            c: [[0.0; N]; N],
            deg: 0,
        }
    }

    pub fn constant(v: f64) -> Self {
        let mut p = Self::zero();
        p.c[0][0] = v;
        p
    }

    /// `w[0] x + w[1] y`.
    pub fn linear(w: [f64; 2]) -> Self {
        let mut p = Self::zero();
        p.c[1][0] = w[0];
        p.c[0][1] = w[1];
        p.deg = 1;
        p
    }

    pub fn pow(self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| acc.mul(&self))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(
            self.deg + other.deg <= MAX_DEG,
            "polynomial degree exceeds {MAX_DEG}"
        );
        let mut out = Self::zero();
        out.deg = self.deg + other.deg;
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                let a = self.c[i][j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..=other.deg {
                    for l in 0..=other.deg - k {
                        out.c[i + k][j + l] += a * other.c[k][l];
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        out.deg = self.deg.max(other.deg);
        for i in 0..=other.deg {
            for j in 0..=other.deg - i {
                out.c[i][j] += other.c[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.c.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    /// Partial derivative with respect to variable `var` (0 → x, 1 → y).
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        out.deg = self.deg.saturating_sub(1);
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                let v = self.c[i][j];
                if v == 0.0 {
                    continue;
                }
                match var {
                    0 if i > 0 => out.c[i - 1][j] += v * i as f64,
                    1 if j > 0 => out.c[i][j - 1] += v * j as f64,
                    _ => {}
                }
            }
        }
        out
    }

    #[cfg(test)]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                if self.c[i][j] != 0.0 {
                    s += self.c[i][j] * x.powi(i as i32) * y.powi(j as i32);
                }
            }
        }
        s
    }

    /// `E[p(v)]` for `v ~ N(0, cov)`.
    pub fn expectation(&self, cov: &[[f64; 2]; 2]) -> f64 {
        if self.deg == 0 {
            return self.c[0][0];
        }
        let m = Moments::new(cov, self.deg);
        let mut s = 0.0;
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                if self.c[i][j] != 0.0 {
                    s += self.c[i][j] * m.get(i, j);
                }
            }
        }
        s
    }

    /// Coefficients `q_k` of `E[p(v) | w·v = u] = Σ q_k u^k` for `v ~ N(0, cov)`.
    pub fn conditional(&self, cov: &[[f64; 2]; 2], w: [f64; 2]) -> [f64; N] {
        let sw = [
            cov[0][0] * w[0] + cov[0][1] * w[1],
            cov[1][0] * w[0] + cov[1][1] * w[1],
        ];
        let var = w[0] * sw[0] + w[1] * sw[1];
        let mean = [sw[0] / var, sw[1] / var];
        let residual = [
            [
                cov[0][0] - sw[0] * sw[0] / var,
                cov[0][1] - sw[0] * sw[1] / var,
            ],
            [
                cov[1][0] - sw[1] * sw[0] / var,
                cov[1][1] - sw[1] * sw[1] / var,
            ],
        ];
        let mut q = [0.0; N];
        if self.deg == 0 {
            q[0] = self.c[0][0];
            return q;
        }
        let m = Moments::new(&residual, self.deg);
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                let v = self.c[i][j];
                if v == 0.0 {
                    continue;
                }
                // (mean_x u + z_x)^i (mean_y u + z_y)^j
                for a in 0..=i {
                    for b in 0..=j {
                        let rest = m.get(i - a, j - b);
                        if rest == 0.0 {
                            continue;
                        }
                        q[a + b] += v
                            * binomial(i, a)
                            * binomial(j, b)
                            * mean[0].powi(a as i32)
                            * mean[1].powi(b as i32)
                            * rest;
                    }
                }
            }
        }
        q
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Table of `E[x^p y^q]` for a centred bivariate Gaussian, by Stein's recursion.
struct Moments {
    m: [[f64; N]; N],
}

impl Moments {
    /// Moments up to total degree `deg`.
    fn new(cov: &[[f64; 2]; 2], deg: usize) -> Self {
        let mut m = [[0.0; N]; N];
        m[0][0] = 1.0;
        for total in 1..=deg {
            for p in 0..=total {
                let q = total - p;
                m[p][q] = if p > 0 {
                    let a = if p >= 2 {
                        (p - 1) as f64 * cov[0][0] * m[p - 2][q]
                    } else {
                        0.0
                    };
                    let b = if q >= 1 {
                        q as f64 * cov[0][1] * m[p - 1][q - 1]
                    } else {
                        0.0
                    };
                    a + b
                } else if q >= 2 {
                    (q - 1) as f64 * cov[1][1] * m[0][q - 2]
                } else {
                    0.0
                };
            }
        }
        Self { m }
    }

    fn get(&self, p: usize, q: usize) -> f64 {
        self.m[p][q]
    }
}
