//! Seeded random instances used by the property suite and the benches.

use rand::Rng;

use crate::graph::WeightedGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    pub min_vertices: usize,
    pub max_vertices: usize,
    /// Upper end of the edge weight range `(0, max_weight]`.
    pub max_weight: f64,
    /// Measure range `(min_measure, max_measure]`.
    pub min_measure: f64,
    pub max_measure: f64,
    /// Killing range `[0, max_killing]`.
    pub max_killing: f64,
    /// Probability that the whole graph gets `c = 0`.
    pub killing_zero_prob: f64,
    pub connected: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            min_vertices: 1,
            max_vertices: 12,
            max_weight: 2.0,
            min_measure: 0.1,
            max_measure: 2.0,
            max_killing: 1.0,
            killing_zero_prob: 0.0,
            connected: false,
        }
    }
}

/// Uniform on the half-open interval `(lo, hi]`.
fn open_closed<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    hi - (hi - lo) * rng.random::<f64>()
}

pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, cfg: &CorpusConfig) -> WeightedGraph {
    let n = rng.random_range(cfg.min_vertices.max(1)..=cfg.max_vertices.max(cfg.min_vertices.max(1)));
    let density: f64 = rng.random_range(0.15..0.9);
    let zero_c = rng.random::<f64>() < cfg.killing_zero_prob;
    let c: Vec<f64> = (0..n)
        .map(|_| if zero_c { 0.0 } else { cfg.max_killing * rng.random::<f64>() })
        .collect();
    let m: Vec<f64> = (0..n).map(|_| open_closed(rng, cfg.min_measure, cfg.max_measure)).collect();
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    if cfg.connected {
        for y in 1..n {
            let x = rng.random_range(0..y);
            present[x][y] = true;
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if present[x][y] || rng.random::<f64>() < density {
                edges.push((x, y, open_closed(rng, 0.0, cfg.max_weight)));
            }
        }
    }
    WeightedGraph::new(&c, &m, &edges).expect("random graph satisfies the axioms")
}

/// Random nonempty subset of `0..n`, sorted.
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    assert!(n > 0);
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.random::<bool>()).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// Random function with values in `[0, scale)`, roughly a third of them zero.
pub fn random_nonnegative<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random::<f64>() < 0.3 { 0.0 } else { scale * rng.random::<f64>() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64;

    #[test]
    fn ranges_respected() {
        let mut rng = Pcg64::seed_from_u64(11);
        for _ in 0..200 {
            let g = random_graph(&mut rng, &CorpusConfig { connected: true, ..Default::default() });
            assert!(g.len() >= 1 && g.len() <= 12);
            assert!(g.is_connected());
            assert!(g.edges().iter().all(|e| e.2 > 0.0 && e.2 <= 2.0));
            assert!(g.measure().iter().all(|&m| m > 0.1 && m <= 2.0));
            assert!(g.killing().iter().all(|&c| (0.0..=1.0).contains(&c)));
        }
    }
}
