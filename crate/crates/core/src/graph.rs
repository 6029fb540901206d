//! Finite weighted graphs `(V, b, c, m)`, their formal Laplacian and the
//! associated quadratic form.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One vertex record of a [`GraphInput`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub label: String,
    pub c: f64,
    pub m: f64,
}

/// Graph data exactly as supplied by a user, before any axiom is enforced.
///
/// Edge entries are kept in the order and orientation they were listed in,
/// so asymmetric or duplicated input can be reported by [`validate`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GraphInput {
    pub vertices: Vec<VertexSpec>,
    pub entries: Vec<(usize, usize, f64)>,
}

impl GraphInput {
    /// Unlabelled input with vertices `0..n`, labels are the indices.
    pub fn new(c: &[f64], m: &[f64]) -> Self {
        assert_eq!(c.len(), m.len());
        let vertices = c
            .iter()
            .zip(m)
            .enumerate()
            .map(|(i, (&c, &m))| VertexSpec { label: i.to_string(), c, m })
            .collect();
        GraphInput { vertices, entries: Vec::new() }
    }

    pub fn edge(mut self, x: usize, y: usize, b: f64) -> Self {
        self.entries.push((x, y, b));
        self
    }

    pub fn build(&self) -> Result<WeightedGraph> {
        WeightedGraph::from_input(self)
    }
}

/// A violated weighted-graph axiom.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    /// `b(x, y) != b(y, x)`.
    Symmetry { x: usize, y: usize, forward: f64, backward: f64 },
    /// An entry `b(x, x)` was listed.
    SelfLoop { x: usize },
    /// The same unordered pair was listed more than once.
    DuplicateEdge { x: usize, y: usize },
    NegativeWeight { x: usize, y: usize },
    NegativeKilling { x: usize },
    /// `m(x) <= 0`, the measure must have full support.
    Measure { x: usize },
    NonFinite { x: usize },
    EndpointOutOfRange { x: usize, y: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Symmetry { x, y, forward, backward } => {
                write!(f, "symmetry: b({x},{y}) = {forward} but b({y},{x}) = {backward}")
            }
            Violation::SelfLoop { x } => write!(f, "zero diagonal: entry b({x},{x}) listed"),
            Violation::DuplicateEdge { x, y } => write!(f, "duplicate edge ({x},{y})"),
            Violation::NegativeWeight { x, y } => write!(f, "nonnegativity: b({x},{y}) < 0"),
            Violation::NegativeKilling { x } => write!(f, "nonnegativity: c({x}) < 0"),
            Violation::Measure { x } => write!(f, "full support: m({x}) <= 0"),
            Violation::NonFinite { x } => write!(f, "non-finite value at vertex {x}"),
            Violation::EndpointOutOfRange { x, y } => write!(f, "edge ({x},{y}) has unknown endpoint"),
        }
    }
}

/// Checks every axiom of a weighted graph with measure. Violations are data:
/// an empty list means the input describes a valid graph.
pub fn validate(input: &GraphInput) -> Vec<Violation> {
    let n = input.vertices.len();
    let mut out = Vec::new();
    for (x, v) in input.vertices.iter().enumerate() {
        if !v.c.is_finite() || !v.m.is_finite() {
            out.push(Violation::NonFinite { x });
            continue;
        }
        if v.c < 0.0 {
            out.push(Violation::NegativeKilling { x });
        }
        if v.m <= 0.0 {
            out.push(Violation::Measure { x });
        }
    }
    // unordered pair -> list of (forward?, weight)
    let mut pairs: BTreeMap<(usize, usize), Vec<(bool, f64)>> = BTreeMap::new();
    for &(x, y, b) in &input.entries {
        if x >= n || y >= n {
            out.push(Violation::EndpointOutOfRange { x, y });
            continue;
        }
        if !b.is_finite() {
            out.push(Violation::NonFinite { x });
            continue;
        }
        if x == y {
            out.push(Violation::SelfLoop { x });
            continue;
        }
        if b < 0.0 {
            out.push(Violation::NegativeWeight { x, y });
        }
        let key = (x.min(y), x.max(y));
        pairs.entry(key).or_default().push((x < y, b));
    }
    for ((x, y), listed) in pairs {
        if listed.len() < 2 {
            continue;
        }
        let fwd = listed.iter().find(|e| e.0).map(|e| e.1);
        let bwd = listed.iter().find(|e| !e.0).map(|e| e.1);
        match (fwd, bwd) {
            (Some(f), Some(b)) if f != b => {
                out.push(Violation::Symmetry { x, y, forward: f, backward: b })
            }
            _ => out.push(Violation::DuplicateEdge { x, y }),
        }
    }
    out
}

/// An immutable, validated finite weighted graph.
///
/// Vertices are dense indices `0..n`. Edges are stored once with `x < y`
/// (zero weights dropped) and a symmetric adjacency is derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    killing: Vec<f64>,
    measure: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, f64)>,
}

impl WeightedGraph {
    pub fn from_input(input: &GraphInput) -> Result<Self> {
        let violations = validate(input);
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations));
        }
        let edges = input
            .entries
            .iter()
            .filter(|e| e.2 != 0.0 && e.0 != e.1)
            .map(|&(x, y, b)| (x.min(y), x.max(y), b))
            .collect();
        Ok(Self::assemble(
            input.vertices.iter().map(|v| v.label.clone()).collect(),
            input.vertices.iter().map(|v| v.c).collect(),
            input.vertices.iter().map(|v| v.m).collect(),
            edges,
        ))
    }

    /// Convenience constructor for index-labelled graphs.
    pub fn new(c: &[f64], m: &[f64], edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut input = GraphInput::new(c, m);
        input.entries.extend_from_slice(edges);
        Self::from_input(&input)
    }

    /// Path `0 - 1 - ... - (n-1)` with unit weights, `c = 0`, `m = 1`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        Self::new(&vec![0.0; n], &vec![1.0; n], &edges).expect("path graph is valid")
    }

    fn assemble(
        labels: Vec<String>,
        killing: Vec<f64>,
        measure: Vec<f64>,
        mut edges: Vec<(usize, usize, f64)>,
    ) -> Self {
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let n = labels.len();
        let mut lists: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(x, y, b) in &edges {
            lists[x].push((y, b));
            lists[y].push((x, b));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut adjacency = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for mut l in lists {
            l.sort_by_key(|e| e.0);
            adjacency.extend(l);
            offsets.push(adjacency.len());
        }
        WeightedGraph { labels, killing, measure, edges, offsets, adjacency }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn killing(&self) -> &[f64] {
        &self.killing
    }

    /// Edges with `x < y` and `b > 0`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[self.offsets[x]..self.offsets[x + 1]]
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        let nb = self.neighbors(x);
        match nb.binary_search_by_key(&y, |e| e.0) {
            Ok(i) => nb[i].1,
            Err(_) => 0.0,
        }
    }

    fn check(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(x.to_string()))
        }
    }

    /// `n(x) = sum_y b(x,y) + c(x)` and `d(x) = n(x) / m(x)`.
    pub fn weighted_degree(&self, x: usize) -> Result<(f64, f64)> {
        self.check(x)?;
        let n = self.full_degree(x);
        Ok((n, n / self.measure[x]))
    }

    pub(crate) fn full_degree(&self, x: usize) -> f64 {
        self.neighbors(x).iter().map(|e| e.1).sum::<f64>() + self.killing[x]
    }

    /// `n(x)` for every vertex.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.len()).map(|x| self.full_degree(x)).collect()
    }

    /// Averaged degrees `d(x) = n(x)/m(x)`.
    pub fn averaged_degrees(&self) -> Vec<f64> {
        (0..self.len()).map(|x| self.full_degree(x) / self.measure[x]).collect()
    }

    /// The same graph with a different measure.
    pub fn with_measure(&self, measure: Vec<f64>) -> Result<Self> {
        if measure.len() != self.len() {
            return Err(Error::InvalidArgument("measure length mismatch".into()));
        }
        if let Some(x) = measure.iter().position(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidGraph(vec![Violation::Measure { x }]));
        }
        let mut g = self.clone();
        g.measure = measure;
        Ok(g)
    }

    /// The graph with measure `m = n`; every averaged degree becomes one.
    pub fn normalized(&self) -> Result<Self> {
        self.with_measure(self.degrees())
    }

    /// Moves the killing term onto edges to an added vertex `inf` (the last
    /// index). The new vertex has measure one and the result has `c = 0`.
    pub fn fold_killing(&self) -> (Self, usize) {
        let inf = self.len();
        let mut labels = self.labels.clone();
        labels.push("inf".to_string());
        let mut measure = self.measure.clone();
        measure.push(1.0);
        let mut edges = self.edges.clone();
        for (x, &c) in self.killing.iter().enumerate() {
            if c > 0.0 {
                edges.push((x, inf, c));
            }
        }
        (Self::assemble(labels, vec![0.0; inf + 1], measure, edges), inf)
    }

    /// Blocks of vertices joined by `b`-positive paths, each block sorted,
    /// blocks ordered by their smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut block = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < block.len() {
                let x = block[i];
                for &(y, _) in self.neighbors(x) {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        block.push(y);
                    }
                }
                i += 1;
            }
            block.sort_unstable();
            out.push(block);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Pointwise `L~u(x) = (1/m(x)) sum_y b(x,y)(u(x)-u(y)) + c(x)/m(x) u(x)`.
    pub fn apply_formal_laplacian(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.len());
        (0..self.len())
            .map(|x| {
                let flux: f64 = self.neighbors(x).iter().map(|&(y, b)| b * (u[x] - u[y])).sum();
                (flux + self.killing[x] * u[x]) / self.measure[x]
            })
            .collect()
    }

    /// `Q(u) = 1/2 sum_{x,y} b(x,y)(u(x)-u(y))^2 + sum_x c(x) u(x)^2`.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        self.form(u, u)
    }

    /// The bilinear form `Q(u, v)`.
    pub fn form(&self, u: &[f64], v: &[f64]) -> f64 {
        assert_eq!(u.len(), self.len());
        assert_eq!(v.len(), self.len());
        let edges: f64 = self
            .edges
            .iter()
            .map(|&(x, y, b)| b * (u[x] - u[y]) * (v[x] - v[y]))
            .sum();
        let kill: f64 = (0..self.len()).map(|x| self.killing[x] * u[x] * v[x]).sum();
        edges + kill
    }

    /// `<u, v>_m = sum_x m(x) u(x) v(x)`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.measure).map(|((a, b), m)| a * b * m).sum()
    }

    /// `sup_x d(x)`.
    pub fn sup_averaged_degree(&self) -> f64 {
        self.averaged_degrees().into_iter().fold(0.0, f64::max)
    }
}

/// A real function of finite support on a vertex universe.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VertexFunction {
    values: BTreeMap<usize, f64>,
}

impl VertexFunction {
    pub fn new() -> Self {
        Self::default()
    }

    /// From values on vertices `0..values.len()`; zeros are not stored.
    pub fn from_dense(values: &[f64]) -> Self {
        let mut f = Self::new();
        for (x, &v) in values.iter().enumerate() {
            f.set(x, v);
        }
        f
    }

    pub fn set(&mut self, x: usize, v: f64) {
        if v == 0.0 {
            self.values.remove(&x);
        } else {
            self.values.insert(x, v);
        }
    }

    pub fn get(&self, x: usize) -> f64 {
        self.values.get(&x).copied().unwrap_or(0.0)
    }

    /// Vertices where the function is nonzero, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(&x, &v)| (x, v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

impl FromIterator<(usize, f64)> for VertexFunction {
    fn from_iter<I: IntoIterator<Item = (usize, f64)>>(iter: I) -> Self {
        let mut f = Self::new();
        for (x, v) in iter {
            f.set(x, v);
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_graph, CorpusConfig};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64;

    fn two_vertex() -> WeightedGraph {
        WeightedGraph::new(&[0.0, 0.0], &[1.0, 1.0], &[(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn validate_accepts_valid_graph() {
        let input = GraphInput::new(&[0.0, 0.0], &[1.0, 1.0]).edge(0, 1, 1.0);
        assert!(validate(&input).is_empty());
    }

    #[test]
    fn validate_reports_asymmetry() {
        let input = GraphInput::new(&[0.0, 0.0], &[1.0, 1.0]).edge(0, 1, 1.0).edge(1, 0, 2.0);
        assert_eq!(
            validate(&input),
            vec![Violation::Symmetry { x: 0, y: 1, forward: 1.0, backward: 2.0 }]
        );
    }

    #[test]
    fn validate_reports_zero_measure() {
        let input = GraphInput::new(&[0.0, 0.0], &[0.0, 1.0]).edge(0, 1, 1.0);
        assert_eq!(validate(&input), vec![Violation::Measure { x: 0 }]);
        assert!(matches!(input.build(), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn validate_reports_duplicates_and_loops() {
        let input = GraphInput::new(&[0.0, 0.0], &[1.0, 1.0])
            .edge(0, 1, 1.0)
            .edge(0, 1, 1.0)
            .edge(1, 1, 3.0);
        let v = validate(&input);
        assert!(v.contains(&Violation::DuplicateEdge { x: 0, y: 1 }));
        assert!(v.contains(&Violation::SelfLoop { x: 1 }));
    }

    #[test]
    fn weighted_degree_examples() {
        let p = WeightedGraph::path(3);
        assert_eq!(p.weighted_degree(1).unwrap(), (2.0, 2.0));
        let iso = WeightedGraph::new(&[2.0], &[1.0], &[]).unwrap();
        assert_eq!(iso.weighted_degree(0).unwrap(), (2.0, 2.0));
        let g = WeightedGraph::new(&[0.0, 0.0], &[4.0, 1.0], &[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.weighted_degree(0).unwrap(), (1.0, 0.25));
        assert!(matches!(g.weighted_degree(7), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn fold_killing_moves_c_to_infinity() {
        let g = WeightedGraph::new(&[2.0], &[1.0], &[]).unwrap();
        let (f, inf) = g.fold_killing();
        assert_eq!(inf, 1);
        assert_eq!(f.weight(0, inf), 2.0);
        assert!(f.killing().iter().all(|&c| c == 0.0));
        assert_eq!(f.measure()[inf], 1.0);

        let p = WeightedGraph::path(3);
        let (fp, inf) = p.fold_killing();
        assert!(fp.neighbors(inf).is_empty());
        assert_eq!(fp.edges(), p.edges());
    }

    #[test]
    fn fold_killing_preserves_form() {
        let mut rng = Pcg64::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_graph(&mut rng, &CorpusConfig::default());
            let u: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.7).sin()).collect();
            let (f, _) = g.fold_killing();
            let mut ue = u.clone();
            ue.push(0.0);
            assert_relative_eq!(g.quadratic_form(&u), f.quadratic_form(&ue), max_relative = 1e-13);
        }
    }

    #[test]
    fn components() {
        assert_eq!(WeightedGraph::path(3).connected_components(), vec![vec![0, 1, 2]]);
        let two = WeightedGraph::new(&[0.0; 4], &[1.0; 4], &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(two.connected_components().len(), 2);
        let zero = WeightedGraph::new(&[0.0; 2], &[1.0; 2], &[(0, 1, 0.0)]).unwrap();
        assert_eq!(zero.connected_components(), vec![vec![0], vec![1]]);
        assert!(zero.edges().is_empty());
    }

    #[test]
    fn formal_laplacian_examples() {
        assert_eq!(two_vertex().apply_formal_laplacian(&[1.0, 0.0]), vec![1.0, -1.0]);
        assert_eq!(WeightedGraph::path(3).apply_formal_laplacian(&[5.0; 3]), vec![0.0; 3]);
        let iso = WeightedGraph::new(&[2.0], &[1.0], &[]).unwrap();
        assert_eq!(iso.apply_formal_laplacian(&[3.0]), vec![6.0]);
    }

    #[test]
    fn quadratic_form_examples() {
        assert_eq!(two_vertex().quadratic_form(&[1.0, 0.0]), 1.0);
        let p = WeightedGraph::path(3);
        let u = [0.3, -1.2, 2.5];
        let lu = p.apply_formal_laplacian(&u);
        assert_relative_eq!(p.quadratic_form(&u), p.inner(&lu, &u), max_relative = 1e-12);
        // indicator of W = {0, 2}: two unit edges leave W
        assert_eq!(p.quadratic_form(&[1.0, 0.0, 1.0]), 2.0);
    }

    #[test]
    fn vertex_function_support() {
        let f = VertexFunction::from_dense(&[0.0, 2.0, 0.0, 1.0]);
        assert_eq!(f.support().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(f.get(2), 0.0);
    }

    proptest! {
        #[test]
        fn form_invariants(seed in any::<u64>()) {
            let mut rng = Pcg64::seed_from_u64(seed);
            let g = random_graph(&mut rng, &CorpusConfig::default());
            let n = g.len();
            let u: Vec<f64> = (0..n).map(|i| ((seed as f64) * 1e-9 + i as f64).sin() * 3.0).collect();
            let v: Vec<f64> = (0..n).map(|i| ((i * i) as f64 + 0.5).cos()).collect();

            // polarization symmetry
            let quv = 0.25 * (g.quadratic_form(&add(&u, &v, 1.0)) - g.quadratic_form(&add(&u, &v, -1.0)));
            let qvu = 0.25 * (g.quadratic_form(&add(&v, &u, 1.0)) - g.quadratic_form(&add(&v, &u, -1.0)));
            prop_assert!((quv - qvu).abs() <= 1e-12 * (1.0 + quv.abs()));

            // nonnegativity and consistency with L~
            let q = g.quadratic_form(&u);
            prop_assert!(q >= 0.0);
            let lu = g.apply_formal_laplacian(&u);
            prop_assert!((q - g.inner(&lu, &u)).abs() <= 1e-12 * q.max(1.0));

            // normal contractions
            let clip: Vec<f64> = u.iter().map(|t| t.clamp(0.0, 1.0)).collect();
            let abs: Vec<f64> = u.iter().map(|t| t.abs()).collect();
            prop_assert!(g.quadratic_form(&clip) <= q + 1e-12);
            prop_assert!(g.quadratic_form(&abs) <= q + 1e-12);
        }

        #[test]
        fn form_vanishes_exactly_on_locally_constant(seed in any::<u64>()) {
            let mut rng = Pcg64::seed_from_u64(seed);
            let cfg = CorpusConfig { killing_zero_prob: 1.0, ..CorpusConfig::default() };
            let g = random_graph(&mut rng, &cfg);
            let mut u = vec![0.0; g.len()];
            for (k, block) in g.connected_components().iter().enumerate() {
                for &x in block {
                    u[x] = k as f64 + 1.5;
                }
            }
            prop_assert!(g.quadratic_form(&u).abs() <= 1e-12);
        }
    }

    fn add(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + s * y).collect()
    }
}
