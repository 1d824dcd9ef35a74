//! Brute-force reference implementations used as test oracles.
//!
//! Everything here is written directly from the definitions with dense
//! vectors and quadratic loops, shares no code with the main crate, and
//! favours obviousness over speed.

use std::collections::{BTreeSet, HashMap};

/// Shannon entropy in bits of a dense probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|x| **x > 0.0).map(|x| x * x.log2()).sum::<f64>()
}

/// Mixture-weighted JSD via `H(M) - π1 H(P) - π2 H(Q)`.
pub fn jsd_dense(p: &[f64], q: &[f64], pi1: f64) -> f64 {
    let pi2 = 1.0 - pi1;
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| pi1 * a + pi2 * b).collect();
    entropy(&m) - pi1 * entropy(p) - pi2 * entropy(q)
}

/// Sorted vocabulary of several token lists.
pub fn vocab(lists: &[&[String]]) -> Vec<String> {
    let set: BTreeSet<&String> = lists.iter().flat_map(|l| l.iter()).collect();
    set.into_iter().cloned().collect()
}

/// Relative frequencies of `tokens` over `vocab`.
pub fn dense_dist(tokens: &[String], vocab: &[String]) -> Vec<f64> {
    let n = tokens.len() as f64;
    vocab.iter().map(|w| tokens.iter().filter(|t| *t == w).count() as f64 / n).collect()
}

pub fn strings(tokens: &[&str]) -> Vec<String> {
    tokens.iter().map(|s| s.to_string()).collect()
}

/// JSD of two token lists with weights proportional to their lengths.
pub fn jsd_tokens_proportional(p: &[String], q: &[String]) -> f64 {
    let v = vocab(&[p, q]);
    let pi1 = p.len() as f64 / (p.len() + q.len()) as f64;
    jsd_dense(&dense_dist(p, &v), &dense_dist(q, &v), pi1)
}

/// JSD of two token lists with equal weights.
pub fn jsd_tokens_equal(p: &[String], q: &[String]) -> f64 {
    let v = vocab(&[p, q]);
    jsd_dense(&dense_dist(p, &v), &dense_dist(q, &v), 0.5)
}

/// Per-word term `-m log m + π1 p log p + π2 q log q`, together with which
/// side holds more mass (+1 for P, -1 for Q, 0 tied).
pub fn word_terms(p: &[String], q: &[String], pi1: f64) -> Vec<(String, f64, i8)> {
    let v = vocab(&[p, q]);
    let (dp, dq) = (dense_dist(p, &v), dense_dist(q, &v));
    let pi2 = 1.0 - pi1;
    let xl = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    v.into_iter()
        .enumerate()
        .map(|(i, w)| {
            let m = pi1 * dp[i] + pi2 * dq[i];
            let side = if dp[i] > dq[i] {
                1
            } else if dq[i] > dp[i] {
                -1
            } else {
                0
            };
            (w, -xl(m) + pi1 * xl(dp[i]) + pi2 * xl(dq[i]), side)
        })
        .collect()
}

fn concat_except(docs: &[Vec<String>], skip: Option<usize>) -> Vec<String> {
    docs.iter().enumerate().filter(|(i, _)| Some(*i) != skip).flat_map(|(_, d)| d.clone()).collect()
}

/// Mean of all strictly positive per-word terms over leave-one-out folds
/// (held-out document against the concatenation of the rest).
pub fn loo_threshold(docs: &[Vec<String>]) -> f64 {
    let mut positives = Vec::new();
    for i in 0..docs.len() {
        let rest = concat_except(docs, Some(i));
        let pi1 = rest.len() as f64 / (rest.len() + docs[i].len()) as f64;
        positives.extend(word_terms(&rest, &docs[i], pi1).into_iter().map(|t| t.1).filter(|v| *v > 1e-15));
    }
    if positives.is_empty() {
        0.0
    } else {
        positives.iter().sum::<f64>() / positives.len() as f64
    }
}

/// (appearance, disappearance) of `variation` against the knowledge docs.
pub fn newness_parts(docs: &[Vec<String>], variation: &[String]) -> (f64, f64) {
    let eps = loo_threshold(docs);
    let kb = concat_except(docs, None);
    let pi1 = kb.len() as f64 / (kb.len() + variation.len()) as f64;
    let terms = word_terms(&kb, variation, pi1);
    let appear = terms.iter().filter(|t| t.2 == -1 && t.1 > eps).count() as f64;
    let disappear = terms.iter().filter(|t| t.2 == 1 && t.1 > eps).count() as f64;
    let vq: BTreeSet<&String> = variation.iter().collect();
    let vp: BTreeSet<&String> = kb.iter().collect();
    (appear / vq.len() as f64, disappear / vp.len() as f64)
}

pub fn uniqueness(docs: &[Vec<String>], variation: &[String]) -> f64 {
    jsd_tokens_proportional(&concat_except(docs, None), variation)
}

pub fn difference(docs: &[Vec<String>], variation: &[String]) -> f64 {
    let mut pair = Vec::new();
    for i in 0..docs.len() {
        for j in i + 1..docs.len() {
            pair.push(jsd_tokens_equal(&docs[i], &docs[j]));
        }
    }
    let eps = pair.iter().sum::<f64>() / pair.len() as f64;
    let far = docs.iter().filter(|d| jsd_tokens_equal(d, variation) > eps).count();
    far as f64 / docs.len() as f64
}

/// Positive PMI of unordered pairs within `window - 1` positions, keyed by
/// the sorted pair.
pub fn ppmi(seqs: &[Vec<String>], window: usize) -> HashMap<(String, String), f64> {
    let mut uni: HashMap<&str, f64> = HashMap::new();
    let mut pairs: HashMap<(String, String), f64> = HashMap::new();
    let mut n_uni = 0.0;
    let mut n_pair = 0.0;
    for s in seqs {
        for t in s {
            *uni.entry(t).or_default() += 1.0;
            n_uni += 1.0;
        }
        for i in 0..s.len() {
            for j in 0..s.len() {
                if j > i && j - i < window {
                    let key =
                        if s[i] <= s[j] { (s[i].clone(), s[j].clone()) } else { (s[j].clone(), s[i].clone()) };
                    *pairs.entry(key).or_default() += 1.0;
                    n_pair += 1.0;
                }
            }
        }
    }
    pairs
        .into_iter()
        .filter_map(|((a, b), c)| {
            let v = ((c / n_pair) / ((uni[a.as_str()] / n_uni) * (uni[b.as_str()] / n_uni))).log2();
            (v > 0.0).then_some(((a, b), v))
        })
        .collect()
}

pub fn new_surprise(kb: &[Vec<String>], var: &[String], window: usize) -> f64 {
    let k = ppmi(kb, window);
    let v = ppmi(&[var.to_vec()], window);
    if v.is_empty() {
        return 0.0;
    }
    v.keys().filter(|p| !k.contains_key(*p)).count() as f64 / v.len() as f64
}

fn row(m: &HashMap<(String, String), f64>, w: &str, vocab: &[String]) -> Vec<f64> {
    vocab
        .iter()
        .map(|u| {
            let key = if w <= u.as_str() { (w.to_string(), u.clone()) } else { (u.clone(), w.to_string()) };
            m.get(&key).copied().unwrap_or(0.0)
        })
        .collect()
}

pub fn divergent_surprise(kb: &[Vec<String>], var: &[String], window: usize) -> f64 {
    let k = ppmi(kb, window);
    let v = ppmi(&[var.to_vec()], window);
    let kb_words: BTreeSet<&String> = kb.iter().flatten().collect();
    let var_words: BTreeSet<&String> = var.iter().collect();
    let all: Vec<String> = kb_words.union(&var_words).map(|s| s.to_string()).collect();
    let mut values = Vec::new();
    for w in kb_words.intersection(&var_words) {
        let (rk, rv) = (row(&k, w, &all), row(&v, w, &all));
        let (sk, sv) = (rk.iter().sum::<f64>(), rv.iter().sum::<f64>());
        if sk > 0.0 && sv > 0.0 {
            let pk: Vec<f64> = rk.iter().map(|x| x / sk).collect();
            let pv: Vec<f64> = rv.iter().map(|x| x / sv).collect();
            values.push(jsd_dense(&pk, &pv, 0.5));
        }
    }
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Tau-b by enumerating all pairs.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    let (mut c, mut d, mut tx, mut ty) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let sx = (x[i] - x[j]).signum() * f64::from(x[i] != x[j]);
            let sy = (y[i] - y[j]).signum() * f64::from(y[i] != y[j]);
            if sx == 0.0 && sy == 0.0 {
                continue;
            } else if sx == 0.0 {
                tx += 1.0;
            } else if sy == 0.0 {
                ty += 1.0;
            } else if sx == sy {
                c += 1.0;
            } else {
                d += 1.0;
            }
        }
    }
    (c - d) / ((c + d + tx) * (c + d + ty)).sqrt()
}

/// Extrapolated RBO from explicit prefix-set intersections at every depth.
pub fn rbo_ext(a: &[&str], b: &[&str], p: f64) -> f64 {
    let (s, l) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let overlap = |d: usize| {
        let ps: BTreeSet<&str> = s.iter().take(d).copied().collect();
        let pl: BTreeSet<&str> = l.iter().take(d).copied().collect();
        ps.intersection(&pl).count() as f64
    };
    let (sn, ln) = (s.len(), l.len());
    let xs = overlap(sn);
    let xl = overlap(ln);
    let mut sum = 0.0;
    for d in 1..=ln {
        sum += overlap(d) / d as f64 * p.powi(d as i32);
    }
    for d in sn + 1..=ln {
        sum += xs * (d - sn) as f64 / (sn * d) as f64 * p.powi(d as i32);
    }
    (1.0 - p) / p * sum + ((xl - xs) / ln as f64 + xs / sn as f64) * p.powi(ln as i32)
}

/// Modularity by the double sum `(1/2m) Σ_ij (A_ij - k_i k_j / 2m) δ(c_i, c_j)`.
pub fn modularity(weights: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = weights.len();
    let k: Vec<f64> = weights.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += weights[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `n` items as restricted-growth label vectors.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, labels: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            rec(i + 1, n, labels, max.max(l), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    let mut labels = vec![0];
    rec(1, n, &mut labels, 0, &mut out);
    out
}

/// Highest modularity over all partitions.
pub fn best_modularity(weights: &[Vec<f64>]) -> f64 {
    all_partitions(weights.len()).iter().map(|l| modularity(weights, l)).fold(f64::MIN, f64::max)
}

/// Least squares by solving the normal equations with Gauss-Jordan
/// elimination; `x` holds rows of regressors (intercept included by caller).
pub fn ols_normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = x[0].len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (row, yi) in x.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += row[i] * row[j];
            }
            a[i][k] += row[i] * yi;
        }
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        let d = a[c][c];
        for v in a[c].iter_mut() {
            *v /= d;
        }
        for r in 0..k {
            if r != c {
                let f = a[r][c];
                let pivot_row = a[c].clone();
                for (v, pv) in a[r].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    a.iter().map(|r| r[k]).collect()
}

/// Great-circle distance through the chord between unit vectors.
pub fn great_circle_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64, radius: f64) -> f64 {
    let v = |lat: f64, lon: f64| {
        let (la, lo) = (lat.to_radians(), lon.to_radians());
        [la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin()]
    };
    let (a, b) = (v(lat1, lon1), v(lat2, lon2));
    let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    2.0 * radius * (chord / 2.0).min(1.0).asin()
}
