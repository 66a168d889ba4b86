use std::path::Path;

use super::spline::CubicSpline;
use crate::error::{FewBodyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    CubicSpline,
}

/// Potential sampled on a grid. Zero beyond the last grid point.
#[derive(Debug, Clone)]
pub struct TabulatedPotential {
    r: Vec<f64>,
    v: Vec<f64>,
    rule: Interpolation,
    spline: Option<CubicSpline>,
}

impl TabulatedPotential {
    pub fn new(r: Vec<f64>, v: Vec<f64>, rule: Interpolation) -> Result<Self> {
        if r.len() != v.len() {
            return Err(FewBodyError::ShapeMismatch {
                expected: r.len(),
                got: v.len(),
            });
        }
        if r.len() < 2 {
            return Err(FewBodyError::InvalidParams(
                "tabulated potential needs at least 2 points".into(),
            ));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FewBodyError::InvalidParams(
                "tabulated r grid must be strictly increasing".into(),
            ));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(FewBodyError::InvalidParams(
                "tabulated values must be finite".into(),
            ));
        }
        let spline = match rule {
            Interpolation::CubicSpline => Some(CubicSpline::new(r.clone(), v.clone())?),
            Interpolation::Linear => None,
        };
        Ok(Self { r, v, rule, spline })
    }

    /// Parses whitespace-separated `r V` pairs; `#` starts a comment.
    pub fn parse(text: &str, rule: Interpolation) -> Result<Self> {
        let mut r = Vec::new();
        let mut v = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(FewBodyError::InvalidParams(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    FewBodyError::InvalidParams(format!(
                        "line {}: cannot parse `{s}`: {e}",
                        lineno + 1
                    ))
                })
            };
            r.push(parse(fields[0])?);
            v.push(parse(fields[1])?);
        }
        Self::new(r, v, rule)
    }

    pub fn load(path: impl AsRef<Path>, rule: Interpolation) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| FewBodyError::InvalidParams(format!("{}: {e}", path.display())))?;
        Self::parse(&text, rule)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn rule(&self) -> Interpolation {
        self.rule
    }

    pub fn grid(&self) -> (&[f64], &[f64]) {
        (&self.r, &self.v)
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        let v = self.v.iter().map(|x| x * factor).collect();
        Self::new(self.r.clone(), v, self.rule).expect("scaling preserves validity")
    }

    pub fn eval(&self, r: f64) -> f64 {
        let last = self.r.len() - 1;
        if r > self.r[last] {
            return 0.0;
        }
        match &self.spline {
            Some(s) => s.eval(r),
            None => {
                let i = self
                    .r
                    .partition_point(|&x| x <= r)
                    .saturating_sub(1)
                    .min(last - 1);
                let t = (r - self.r[i]) / (self.r[i + 1] - self.r[i]);
                self.v[i] + t * (self.v[i + 1] - self.v[i])
            }
        }
    }
}
