//! Jensen-Shannon divergence with size-proportional mixture weights and its
//! additive per-word decomposition.
//!
//! All logarithms are base 2, so the divergence of a two-component mixture
//! lies in `[0, 1]`. With `M = π1·P + π2·Q`:
//!
//! ```text
//! JSD(P‖Q) = π1·KL(P‖M) + π2·KL(Q‖M)
//!          = Σ_w [ -m_w log2 m_w + π1 p_w log2 p_w + π2 q_w log2 q_w ]
//! ```
//!
//! [`jsd`] evaluates the first form and [`jsd_decomposed`] the second; the
//! two agree to rounding error.

use std::cmp::Ordering;
use std::collections::btree_map;
use std::iter::Peekable;

use serde::Serialize;

use crate::corpus::TokenDistribution;
use crate::error::{Error, Result};

/// Mixture weights `(π1, π2)` with `π1 + π2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureWeights {
    pi1: f64,
    pi2: f64,
}

impl MixtureWeights {
    pub fn new(pi1: f64) -> Result<Self> {
        if !(pi1 > 0.0 && pi1 < 1.0) {
            return Err(Error::InvalidParameter(format!("mixture weight {pi1} outside (0,1)")));
        }
        Ok(Self { pi1, pi2: 1.0 - pi1 })
    }

    /// `(0.5, 0.5)`.
    pub fn equal() -> Self {
        Self { pi1: 0.5, pi2: 0.5 }
    }

    /// Weights proportional to the token totals the two distributions were
    /// estimated from.
    pub fn proportional(p: &TokenDistribution, q: &TokenDistribution) -> Self {
        Self::from_sizes(p.token_total(), q.token_total())
    }

    pub fn from_sizes(p_total: usize, q_total: usize) -> Self {
        let total = (p_total + q_total) as f64;
        let pi1 = p_total as f64 / total;
        Self { pi1, pi2: q_total as f64 / total }
    }

    pub fn pi1(&self) -> f64 {
        self.pi1
    }

    pub fn pi2(&self) -> f64 {
        self.pi2
    }

    pub fn swapped(&self) -> Self {
        Self { pi1: self.pi2, pi2: self.pi1 }
    }
}

/// Which distribution a word's divergence is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `p_w > q_w`: the word is more prominent in P.
    P,
    /// `q_w > p_w`: the word is more prominent in Q.
    Q,
    Neutral,
}

/// One additive term of the divergence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordContribution {
    pub lemma: String,
    /// Bits, never negative.
    pub value: f64,
    pub attributed_to: Side,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Walks the union of two sorted supports.
struct Union<'a> {
    p: Peekable<btree_map::Iter<'a, String, f64>>,
    q: Peekable<btree_map::Iter<'a, String, f64>>,
}

impl<'a> Iterator for Union<'a> {
    type Item = (&'a str, f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let order = match (self.p.peek(), self.q.peek()) {
            (None, None) => return None,
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (Some((a, _)), Some((b, _))) => a.cmp(b),
        };
        Some(match order {
            Ordering::Less => {
                let (w, p) = self.p.next()?;
                (w.as_str(), *p, 0.0)
            }
            Ordering::Greater => {
                let (w, q) = self.q.next()?;
                (w.as_str(), 0.0, *q)
            }
            Ordering::Equal => {
                let (w, p) = self.p.next()?;
                let (_, q) = self.q.next()?;
                (w.as_str(), *p, *q)
            }
        })
    }
}

fn union<'a>(p: &'a TokenDistribution, q: &'a TokenDistribution) -> Union<'a> {
    Union { p: p.probs().iter().peekable(), q: q.probs().iter().peekable() }
}

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// `π1·KL(P‖M) + π2·KL(Q‖M)` in bits, clamped to `[0, 1]`.
pub fn jsd(p: &TokenDistribution, q: &TokenDistribution, w: MixtureWeights) -> f64 {
    let mut acc = CompensatedSum::default();
    for (_, pw, qw) in union(p, q) {
        if pw == qw {
            continue;
        }
        let m = w.pi1 * pw + w.pi2 * qw;
        if pw > 0.0 {
            acc.add(w.pi1 * pw * (pw / m).log2());
        }
        if qw > 0.0 {
            acc.add(w.pi2 * qw * (qw / m).log2());
        }
    }
    acc.value().clamp(0.0, 1.0)
}

/// Per-word term `-m log2 m + π1 p log2 p + π2 q log2 q`, floored at zero.
pub fn word_term(pw: f64, qw: f64, w: MixtureWeights) -> f64 {
    if pw == qw {
        return 0.0;
    }
    let m = w.pi1 * pw + w.pi2 * qw;
    (-xlog2x(m) + w.pi1 * xlog2x(pw) + w.pi2 * xlog2x(qw)).max(0.0)
}

/// Total divergence and the contribution of every word in the union of
/// supports, in lemma order.
pub fn jsd_decomposed(
    p: &TokenDistribution,
    q: &TokenDistribution,
    w: MixtureWeights,
) -> (f64, Vec<WordContribution>) {
    let mut acc = CompensatedSum::default();
    let contributions: Vec<WordContribution> = union(p, q)
        .map(|(lemma, pw, qw)| {
            let value = word_term(pw, qw, w);
            acc.add(value);
            let attributed_to = match pw.partial_cmp(&qw) {
                Some(Ordering::Greater) => Side::P,
                Some(Ordering::Less) => Side::Q,
                _ => Side::Neutral,
            };
            WordContribution { lemma: lemma.to_string(), value, attributed_to }
        })
        .collect();
    (acc.value(), contributions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(entries: &[(&str, f64)]) -> TokenDistribution {
        TokenDistribution::from_probs(entries.iter().map(|(w, p)| (*w, *p)), 10).unwrap()
    }

    #[test]
    fn identical_is_zero() {
        let p = dist(&[("a", 1.0)]);
        assert_eq!(jsd(&p, &p, MixtureWeights::equal()), 0.0);
        let p = dist(&[("a", 0.3), ("b", 0.7)]);
        assert_eq!(jsd(&p, &p, MixtureWeights::new(0.37).unwrap()), 0.0);
        let (total, parts) = jsd_decomposed(&p, &p, MixtureWeights::equal());
        assert_eq!(total, 0.0);
        assert!(parts.iter().all(|c| c.value == 0.0 && c.attributed_to == Side::Neutral));
    }

    #[test]
    fn disjoint_is_one() {
        let p = dist(&[("a", 1.0)]);
        let q = dist(&[("b", 1.0)]);
        assert_abs_diff_eq!(jsd(&p, &q, MixtureWeights::equal()), 1.0, epsilon = 1e-15);
        let (total, parts) = jsd_decomposed(&p, &q, MixtureWeights::equal());
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].lemma, "a");
        assert_abs_diff_eq!(parts[0].value, 0.5, epsilon = 1e-15);
        assert_eq!(parts[0].attributed_to, Side::P);
        assert_eq!(parts[1].lemma, "b");
        assert_abs_diff_eq!(parts[1].value, 0.5, epsilon = 1e-15);
        assert_eq!(parts[1].attributed_to, Side::Q);
    }

    #[test]
    fn half_overlap_reference_value() {
        // 1.5 - (3/4)·log2(3) evaluated independently
        let p = dist(&[("a", 0.5), ("b", 0.5)]);
        let q = dist(&[("a", 1.0)]);
        let v = jsd(&p, &q, MixtureWeights::equal());
        assert_abs_diff_eq!(v, 0.311_278_124_459_132_8, epsilon = 1e-12);
        let (total, _) = jsd_decomposed(&p, &q, MixtureWeights::equal());
        assert_abs_diff_eq!(total, v, epsilon = 1e-12);
    }

    #[test]
    fn weights() {
        assert!(MixtureWeights::new(0.0).is_err());
        assert!(MixtureWeights::new(1.0).is_err());
        let w = MixtureWeights::from_sizes(6, 2);
        assert_eq!((w.pi1(), w.pi2()), (0.75, 0.25));
        assert_abs_diff_eq!(w.pi1() + w.pi2(), 1.0, epsilon = 1e-12);
        assert_eq!(w.swapped().pi1(), 0.25);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10_000 {
            s.add(1e-16);
        }
        assert_abs_diff_eq!(s.value(), 1.0 + 1e-12, epsilon = 1e-18);
    }
}
