use std::collections::HashSet;
use std::hash::Hash;

use crate::error::{Error, Result};

pub const DEFAULT_RBO_P: f64 = 0.9;

fn check_unique<T: Eq + Hash>(list: &[T]) -> Result<()> {
    let mut seen = HashSet::with_capacity(list.len());
    if list.iter().all(|x| seen.insert(x)) {
        Ok(())
    } else {
        Err(Error::DuplicateIds)
    }
}

/// Extrapolated rank-biased overlap of two duplicate-free rankings, which
/// may differ in length. Identical rankings score 1, disjoint ones 0.
pub fn rbo<T: Eq + Hash>(a: &[T], b: &[T], p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("rbo persistence {p} outside (0,1)")));
    }
    check_unique(a)?;
    check_unique(b)?;
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let (s, l) = (short.len(), long.len());
    if s == 0 {
        return Ok(if l == 0 { 1.0 } else { 0.0 });
    }

    let mut seen_short: HashSet<&T> = HashSet::with_capacity(s);
    let mut seen_long: HashSet<&T> = HashSet::with_capacity(l);
    let mut overlap = 0usize;
    let mut x_s = 0usize;
    let mut sum = 0.0;
    let mut weight = 1.0;
    for d in 1..=l {
        weight *= p;
        let from_long = &long[d - 1];
        if d <= s {
            let from_short = &short[d - 1];
            if from_short == from_long {
                overlap += 1;
            } else {
                overlap += usize::from(seen_long.contains(from_short));
                overlap += usize::from(seen_short.contains(from_long));
            }
            seen_short.insert(from_short);
        } else {
            overlap += usize::from(seen_short.contains(from_long));
        }
        seen_long.insert(from_long);
        if d == s {
            x_s = overlap;
        }
        let (df, xd) = (d as f64, overlap as f64);
        sum += xd / df * weight;
        if d > s {
            sum += x_s as f64 * (df - s as f64) / (s as f64 * df) * weight;
        }
    }
    let x_l = overlap as f64;
    let tail = ((x_l - x_s as f64) / l as f64 + x_s as f64 / s as f64) * weight;
    Ok(((1.0 - p) / p * sum + tail).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn anchors() {
        let a = ["a", "b", "c"];
        assert_abs_diff_eq!(rbo(&a, &a, 0.9).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rbo(&a, &["x", "y", "z"], 0.9).unwrap(), 0.0, epsilon = 1e-12);
        // depths: X1=0, X2=2, X3=3 → (0.1/0.9)·(0.81 + 0.729) + 0.729
        assert_abs_diff_eq!(rbo(&a, &["b", "a", "c"], 0.9).unwrap(), 0.9, epsilon = 1e-12);
    }

    #[test]
    fn uneven_lengths() {
        let v = rbo(&["a", "b"], &["a", "b", "c", "d"], 0.5).unwrap();
        assert!(v > 0.0 && v <= 1.0);
        assert_eq!(v, rbo(&["a", "b", "c", "d"], &["a", "b"], 0.5).unwrap());
    }

    #[test]
    fn errors() {
        assert_eq!(rbo(&["a", "a"], &["a"], 0.9), Err(Error::DuplicateIds));
        assert!(rbo(&["a"], &["a"], 1.0).is_err());
        assert_eq!(rbo::<&str>(&[], &[], 0.9).unwrap(), 1.0);
    }
}
