//! Country clusters from typical-ingredient overlap, via greedy modularity
//! maximisation on a Jaccard-weighted graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus::Document;
use crate::error::{Error, Result};

/// Fraction of each country's distinct ingredients kept as "typical".
pub const DEFAULT_TOP_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryCluster {
    pub members: BTreeSet<String>,
    /// This community's term of the partition modularity.
    pub modularity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clustering {
    pub clusters: Vec<CountryCluster>,
    pub modularity: f64,
}

impl Clustering {
    pub fn cluster_of(&self, iso: &str) -> Option<usize> {
        self.clusters.iter().position(|c| c.members.contains(iso))
    }
}

/// Undirected weighted graph over countries (sorted ISO codes).
#[derive(Debug, Clone, PartialEq)]
pub struct CountryGraph {
    pub nodes: Vec<String>,
    /// Dense symmetric weights, zero diagonal.
    pub weights: Vec<Vec<f64>>,
}

impl CountryGraph {
    pub fn new(nodes: Vec<String>, weights: Vec<Vec<f64>>) -> Self {
        Self { nodes, weights }
    }

    fn strength(&self, i: usize) -> f64 {
        self.weights[i].iter().sum()
    }

    fn total_strength(&self) -> f64 {
        (0..self.nodes.len()).map(|i| self.strength(i)).sum()
    }
}

pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Typical ingredients per country: the top `fraction` of distinct
/// ingredients by document frequency (at least one), keeping everything tied
/// with the last one admitted.
pub fn typical_ingredients(docs: &[Document], fraction: f64) -> Result<BTreeMap<String, BTreeSet<String>>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("top fraction {fraction} outside (0,1]")));
    }
    let mut freq: BTreeMap<String, BTreeMap<&str, usize>> = BTreeMap::new();
    for doc in docs {
        let Some(c) = &doc.country else { continue };
        let counts = freq.entry(c.clone()).or_default();
        for ing in &doc.ingredients {
            *counts.entry(ing.as_str()).or_insert(0) += 1;
        }
    }
    if freq.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(freq
        .into_iter()
        .map(|(country, counts)| {
            let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            let typical = if ranked.is_empty() {
                BTreeSet::new()
            } else {
                let k = ((fraction * ranked.len() as f64).round() as usize).clamp(1, ranked.len());
                let cutoff = ranked[k - 1].1;
                ranked.iter().take_while(|(_, n)| *n >= cutoff).map(|(w, _)| w.to_string()).collect()
            };
            (country, typical)
        })
        .collect())
}

pub fn ingredient_graph(typical: &BTreeMap<String, BTreeSet<String>>) -> CountryGraph {
    let nodes: Vec<String> = typical.keys().cloned().collect();
    let sets: Vec<&BTreeSet<String>> = typical.values().collect();
    let n = nodes.len();
    let mut weights = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = jaccard(sets[i], sets[j]);
            weights[i][j] = w;
            weights[j][i] = w;
        }
    }
    CountryGraph::new(nodes, weights)
}

/// Per-community modularity terms `W_in/m - (D_c/2m)^2` for a partition given
/// as node-index sets; zero everywhere for an edgeless graph.
fn community_terms(graph: &CountryGraph, partition: &[Vec<usize>]) -> Vec<f64> {
    let two_m = graph.total_strength();
    if two_m <= 0.0 {
        return vec![0.0; partition.len()];
    }
    partition
        .iter()
        .map(|c| {
            let mut internal = 0.0;
            for (x, &i) in c.iter().enumerate() {
                for &j in &c[x + 1..] {
                    internal += graph.weights[i][j];
                }
            }
            let degree: f64 = c.iter().map(|&i| graph.strength(i)).sum();
            2.0 * internal / two_m - (degree / two_m).powi(2)
        })
        .collect()
}

/// Newman modularity of a partition given as node-index sets.
pub fn modularity(graph: &CountryGraph, partition: &[Vec<usize>]) -> f64 {
    community_terms(graph, partition).iter().sum()
}

/// Greedy agglomeration: start from singletons and repeatedly merge the pair
/// of communities with the largest modularity gain while the gain is
/// positive. Ties go to the pair whose members sort first.
pub fn greedy_modularity(graph: &CountryGraph) -> Vec<Vec<usize>> {
    let n = graph.nodes.len();
    let mut communities: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let two_m = graph.total_strength();
    if two_m <= 0.0 {
        return communities;
    }
    let mut degree: Vec<f64> = (0..n).map(|i| graph.strength(i) / two_m).collect();
    let mut between: Vec<Vec<f64>> =
        graph.weights.iter().map(|row| row.iter().map(|w| w / two_m).collect()).collect();
    loop {
        let k = communities.len();
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..k {
            for b in a + 1..k {
                if between[a][b] <= 0.0 {
                    continue;
                }
                let gain = 2.0 * (between[a][b] - degree[a] * degree[b]);
                if best.is_none_or(|(g, _, _)| gain > g + 1e-12) {
                    best = Some((gain, a, b));
                }
            }
        }
        let Some((gain, a, b)) = best else { break };
        if gain <= 1e-12 {
            break;
        }
        let moved = communities.remove(b);
        communities[a].extend(moved);
        communities[a].sort_unstable();
        degree[a] += degree.remove(b);
        let row_b = between.remove(b);
        for (r, row) in between.iter_mut().enumerate() {
            let vb = row.remove(b);
            if r != a {
                row[a] += vb;
            }
        }
        for c in 0..k - 1 {
            let bc = if c < b { row_b[c] } else { row_b[c + 1] };
            if c != a {
                between[a][c] += bc;
            }
        }
        between[a][a] = 0.0;
        // communities stay ordered by their smallest member
        let mut order: Vec<usize> = (0..communities.len()).collect();
        order.sort_by_key(|&i| communities[i][0]);
        communities = order.iter().map(|&i| communities[i].clone()).collect();
        degree = order.iter().map(|&i| degree[i]).collect();
        between = order.iter().map(|&i| order.iter().map(|&j| between[i][j]).collect()).collect();
    }
    communities
}

/// Cluster countries by the overlap of their typical ingredients.
pub fn country_clusters(docs: &[Document], top_fraction: f64) -> Result<Clustering> {
    let typical = typical_ingredients(docs, top_fraction)?;
    let graph = ingredient_graph(&typical);
    let partition = greedy_modularity(&graph);
    let terms = community_terms(&graph, &partition);
    let clusters: Vec<CountryCluster> = partition
        .iter()
        .zip(&terms)
        .map(|(c, &q)| CountryCluster {
            members: c.iter().map(|&i| graph.nodes[i].clone()).collect(),
            modularity: q,
        })
        .collect();
    Ok(Clustering { clusters, modularity: terms.iter().sum() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn doc(id: &str, country: &str, ings: &[&str]) -> Document {
        Document::from_lemmas(id, &["x"]).unwrap().with_country(country).with_ingredients(ings)
    }

    #[test]
    fn two_blocks() {
        let docs = vec![
            doc("1", "AA", &["olive", "lemon"]),
            doc("2", "BB", &["olive", "lemon"]),
            doc("3", "CC", &["chili", "corn"]),
            doc("4", "DD", &["chili", "corn"]),
        ];
        let c = country_clusters(&docs, 1.0).unwrap();
        assert_eq!(c.clusters.len(), 2);
        assert_eq!(c.cluster_of("AA"), c.cluster_of("BB"));
        assert_ne!(c.cluster_of("AA"), c.cluster_of("CC"));
        assert_abs_diff_eq!(c.modularity, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn single_country_is_singleton() {
        let c = country_clusters(&[doc("1", "AA", &["olive"])], 0.2).unwrap();
        assert_eq!(c.clusters.len(), 1);
        assert_eq!(c.modularity, 0.0);
    }

    #[test]
    fn no_edges_gives_singletons() {
        let docs = vec![doc("1", "AA", &["a"]), doc("2", "BB", &["b"]), doc("3", "CC", &["c"])];
        let c = country_clusters(&docs, 0.2).unwrap();
        assert_eq!(c.clusters.len(), 3);
        assert_eq!(c.modularity, 0.0);
    }

    #[test]
    fn typical_ties_are_kept() {
        let docs = vec![doc("1", "AA", &["a", "b", "c", "d", "e"])];
        // five distinct ingredients, all tied: every one is admitted
        let t = typical_ingredients(&docs, 0.2).unwrap();
        assert_eq!(t["AA"].len(), 5);
        let docs = vec![doc("1", "AA", &["a", "b"]), doc("2", "AA", &["a", "c", "d", "e"])];
        let t = typical_ingredients(&docs, 0.2).unwrap();
        assert_eq!(t["AA"].iter().collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn errors() {
        assert_eq!(country_clusters(&[], 0.2), Err(Error::EmptyCorpus));
        assert!(country_clusters(&[doc("1", "AA", &["a"])], 0.0).is_err());
    }
}
