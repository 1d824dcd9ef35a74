use serde::Serialize;
use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// A correlation coefficient with its two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub coefficient: f64,
    pub p_value: f64,
    pub n: usize,
}

fn check_lengths(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < min {
        return Err(Error::InsufficientObservations { needed: min, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite observation".into()));
    }
    Ok(())
}

/// Two-sided p-value of a Student t statistic.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Two-sided p-value of a standard normal statistic.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample correlation; p from the t-transform with `n - 2` degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    check_lengths(x, y, 3)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantSeries);
    }
    let mut r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    // An exact linear relation can land a few ulps short of ±1.
    if 1.0 - r.abs() <= 4.0 * f64::EPSILON {
        r = r.signum();
    }
    let n = x.len();
    let df = (n - 2) as f64;
    let p_value = if r.abs() == 1.0 {
        0.0
    } else {
        t_two_sided_p(r * (df / (1.0 - r * r)).sqrt(), df)
    };
    Ok(Correlation { coefficient: r, p_value, n })
}

/// Tie statistics of a sorted sequence: `Σ t(t-1)/2`, `Σ t(t-1)(t-2)`,
/// `Σ t(t-1)(2t+5)` over groups of equal values.
fn tie_stats(sorted: &[f64]) -> (f64, f64, f64) {
    let (mut pairs, mut v1, mut v2) = (0.0, 0.0, 0.0);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        pairs += t * (t - 1.0) / 2.0;
        v1 += t * (t - 1.0) * (t - 2.0);
        v2 += t * (t - 1.0) * (2.0 * t + 5.0);
        i = j;
    }
    (pairs, v1, v2)
}

/// Stable merge sort returning the number of inversions.
fn count_inversions(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = count_inversions(&mut v[..mid], buf) + count_inversions(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Kendall tau-b in `O(n log n)`; p from the normal approximation with the
/// tie-adjusted variance of the concordant-minus-discordant count.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<Correlation> {
    check_lengths(x, y, 3)?;
    let n = x.len();
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let (x_ties, x_v1, x_v2) = tie_stats(&xs);
    let mut joint_ties = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pairs[j] == pairs[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        joint_ties += t * (t - 1.0) / 2.0;
        i = j;
    }
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = count_inversions(&mut ys, &mut Vec::with_capacity(n)) as f64;
    let (y_ties, y_v1, y_v2) = tie_stats(&ys);

    let nf = n as f64;
    let total = nf * (nf - 1.0) / 2.0;
    if x_ties == total || y_ties == total {
        return Err(Error::AllTied);
    }
    let s = total - x_ties - y_ties + joint_ties - 2.0 * swaps;
    let tau = (s / ((total - x_ties).sqrt() * (total - y_ties).sqrt())).clamp(-1.0, 1.0);

    let m = nf * (nf - 1.0);
    let var = (m * (2.0 * nf + 5.0) - x_v2 - y_v2) / 18.0
        + 2.0 * x_ties * y_ties / m
        + x_v1 * y_v1 / (9.0 * m * (nf - 2.0));
    let p_value = if var > 0.0 { normal_two_sided_p(s / var.sqrt()) } else { 1.0 };
    Ok(Correlation { coefficient: tau, p_value, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pearson_anchors() {
        let r = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(r.coefficient, 1.0);
        assert_eq!(r.p_value, 0.0);
        let r = pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(r.coefficient, -1.0, epsilon = 1e-12);
        let r = pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert_abs_diff_eq!(r.coefficient, 0.5, epsilon = 1e-12);
        // t = 0.5·sqrt(1/0.75), one degree of freedom: p = 1 - 2·atan(t)/π
        let t: f64 = 0.5 / 0.75f64.sqrt();
        assert_abs_diff_eq!(r.p_value, 1.0 - 2.0 * t.atan() / std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn pearson_errors() {
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::ConstantSeries));
        assert_eq!(pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]), Err(Error::LengthMismatch(2, 3)));
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn kendall_anchors() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(kendall_tau(&x, &x).unwrap().coefficient, 1.0, epsilon = 1e-12);
        let rev = [4.0, 3.0, 2.0, 1.0];
        assert_abs_diff_eq!(kendall_tau(&x, &rev).unwrap().coefficient, -1.0, epsilon = 1e-12);
        let y = [1.0, 3.0, 2.0, 4.0];
        assert_abs_diff_eq!(kendall_tau(&x, &y).unwrap().coefficient, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn kendall_all_tied() {
        assert_eq!(kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::AllTied));
    }

    #[test]
    fn inversions() {
        let mut v = vec![3.0, 1.0, 2.0, 1.0];
        assert_eq!(count_inversions(&mut v, &mut Vec::new()), 4);
        assert_eq!(v, [1.0, 1.0, 2.0, 3.0]);
    }
}
