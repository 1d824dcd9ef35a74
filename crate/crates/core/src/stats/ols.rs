use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::correlation::t_two_sided_p;
use crate::error::{Error, Result};

pub const INTERCEPT: &str = "const";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CovarianceType {
    /// Homoskedastic `σ²(XᵀX)⁻¹`.
    #[default]
    Classical,
    /// White sandwich estimator with the `n/(n-k)` small-sample factor.
    Hc1,
}

/// Named regressor columns; an intercept is always prepended.
#[derive(Debug, Clone, Default)]
pub struct Design {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Design {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn column(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.names.push(name.into());
        self.columns.push(values);
        self
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult {
    /// Term names in design order, intercept first.
    pub terms: Vec<String>,
    pub coefficients: BTreeMap<String, f64>,
    pub std_errors: BTreeMap<String, f64>,
    pub t_stats: BTreeMap<String, f64>,
    pub p_values: BTreeMap<String, f64>,
    pub r_squared: f64,
    pub n_obs: usize,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn coef(&self, term: &str) -> f64 {
        self.coefficients.get(term).copied().unwrap_or(f64::NAN)
    }
}

/// Least squares through a QR factorisation of `[1 | X]`.
pub fn ols(design: &Design, y: &[f64], cov: CovarianceType) -> Result<RegressionResult> {
    let n = y.len();
    for c in &design.columns {
        if c.len() != n {
            return Err(Error::LengthMismatch(c.len(), n));
        }
    }
    let k = design.columns.len() + 1;
    if n < k + 1 {
        return Err(Error::InsufficientObservations { needed: k + 1, got: n });
    }
    if y.iter().chain(design.columns.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite observation".into()));
    }
    let x = DMatrix::from_fn(n, k, |i, j| if j == 0 { 1.0 } else { design.columns[j - 1][i] });
    let yv = DVector::from_column_slice(y);

    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..k).map(|j| x.column(j).norm()).fold(0.0, f64::max);
    if (0..k).any(|j| r[(j, j)].abs() <= 1e-10 * scale.max(1.0)) {
        return Err(Error::RankDeficient);
    }
    let qty = qr.q().transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;
    let resid = &yv - &x * &beta;
    let ssr = resid.norm_squared();
    let df = (n - k) as f64;

    let r_inv = r.solve_upper_triangular(&DMatrix::identity(k, k)).ok_or(Error::RankDeficient)?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let vcov = match cov {
        CovarianceType::Classical => xtx_inv * (ssr / df),
        CovarianceType::Hc1 => {
            let mut meat = DMatrix::zeros(k, k);
            for i in 0..n {
                let xi = x.row(i).transpose();
                meat += &xi * xi.transpose() * resid[i].powi(2);
            }
            &xtx_inv * meat * &xtx_inv * (n as f64 / df)
        }
    };

    let mean_y = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    let r_squared = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 0.0 };

    let terms: Vec<String> = std::iter::once(INTERCEPT.to_string()).chain(design.names.iter().cloned()).collect();
    let mut out = RegressionResult {
        terms: terms.clone(),
        coefficients: BTreeMap::new(),
        std_errors: BTreeMap::new(),
        t_stats: BTreeMap::new(),
        p_values: BTreeMap::new(),
        r_squared,
        n_obs: n,
        residuals: resid.iter().copied().collect(),
    };
    for (j, name) in terms.into_iter().enumerate() {
        let b = beta[j];
        let se = vcov[(j, j)].max(0.0).sqrt();
        let (t, p) = if se > 0.0 {
            let t = b / se;
            (t, t_two_sided_p(t, df))
        } else if b == 0.0 {
            (0.0, 1.0)
        } else {
            (b.signum() * f64::INFINITY, 0.0)
        };
        out.coefficients.insert(name.clone(), b);
        out.std_errors.insert(name.clone(), se);
        out.t_stats.insert(name.clone(), t);
        out.p_values.insert(name, p);
    }
    Ok(out)
}
