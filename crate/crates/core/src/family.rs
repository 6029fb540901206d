//! Graph families: generators for finite and infinite weighted graphs that
//! can produce any finite piece together with the exact full degrees.
//!
//! Rays and spherically symmetric trees are both radial families: the
//! weights, killing and measure depend only on the generation of a vertex.
//! A ray is the tree with branching one. Vertices of radial families are
//! numbered in breadth-first order starting at the root `0`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::io::GraphFile;

fn one() -> f64 {
    1.0
}

/// A nonnegative sequence indexed by generation `k = 0, 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Law {
    /// `value`
    Const { value: f64 },
    /// `scale * (k + 1)^power`
    Poly {
        power: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `scale * ratio^k`
    Geometric {
        ratio: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

impl Law {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            Law::Const { value } => value,
            Law::Poly { power, scale } => scale * ((k + 1) as f64).powf(power),
            Law::Geometric { ratio, scale } => scale * ratio.powi(k.min(i32::MAX as usize) as i32),
        }
    }

    /// Supremum over all generations, `None` when unbounded.
    pub fn sup(&self) -> Option<f64> {
        match *self {
            Law::Const { value } => Some(value),
            Law::Poly { power, scale } => (power <= 0.0).then_some(scale),
            Law::Geometric { ratio, scale } => (ratio <= 1.0).then_some(scale),
        }
    }

    /// Infimum over all generations.
    pub fn inf(&self) -> f64 {
        match *self {
            Law::Const { value } => value,
            Law::Poly { power, scale } => {
                if power < 0.0 {
                    0.0
                } else {
                    scale
                }
            }
            Law::Geometric { ratio, scale } => {
                if ratio < 1.0 {
                    0.0
                } else {
                    scale
                }
            }
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        let ok = match *self {
            Law::Const { value } => value.is_finite() && value >= 0.0,
            Law::Poly { power, scale } => power.is_finite() && scale.is_finite() && scale >= 0.0,
            Law::Geometric { ratio, scale } => {
                ratio.is_finite() && ratio >= 0.0 && scale.is_finite() && scale >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{what} law has invalid parameters: {self:?}")))
        }
    }
}

/// Vertex measure of a radial family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureLaw {
    Const { value: f64 },
    Poly {
        power: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Geometric {
        ratio: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `m = scale * n`, the full weighted degree.
    Normalized {
        #[serde(default = "one")]
        scale: f64,
    },
}

impl Default for MeasureLaw {
    fn default() -> Self {
        MeasureLaw::Const { value: 1.0 }
    }
}

impl MeasureLaw {
    fn as_law(&self) -> Option<Law> {
        match *self {
            MeasureLaw::Const { value } => Some(Law::Const { value }),
            MeasureLaw::Poly { power, scale } => Some(Law::Poly { power, scale }),
            MeasureLaw::Geometric { ratio, scale } => Some(Law::Geometric { ratio, scale }),
            MeasureLaw::Normalized { .. } => None,
        }
    }
}

fn zero_law() -> Law {
    Law::Const { value: 0.0 }
}

/// Properties a family declares about itself.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Declared {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_measure_lower_bound: Option<f64>,
}

/// Serialized description of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FamilySpec {
    #[serde(rename = "ray")]
    Ray {
        weight_law: Law,
        #[serde(default)]
        measure_law: MeasureLaw,
        #[serde(default = "zero_law")]
        killing_law: Law,
        #[serde(default)]
        declared: Declared,
    },
    #[serde(rename = "spherically-symmetric-tree", alias = "tree")]
    Tree {
        branching: Vec<usize>,
        weight_law: Law,
        #[serde(default)]
        measure_law: MeasureLaw,
        #[serde(default = "zero_law")]
        killing_law: Law,
        #[serde(default)]
        declared: Declared,
    },
    #[serde(rename = "explicit-finite", alias = "explicit")]
    Explicit {
        graph: GraphFile,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    ExplicitFinite,
    Ray,
    SphericallySymmetricTree,
}

/// Radial family: weights and measures depend on the generation only.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFamily {
    branching: Vec<usize>,
    weight: Law,
    measure: MeasureLaw,
    killing: Law,
    declared: Declared,
    /// Breadth-first offsets of each generation, `None` for a ray.
    offsets: Option<Vec<usize>>,
}

impl RadialFamily {
    pub fn ray(weight: Law, measure: MeasureLaw, killing: Law) -> Result<Self> {
        Self::tree(vec![1], weight, measure, killing)
    }

    pub fn tree(branching: Vec<usize>, weight: Law, measure: MeasureLaw, killing: Law) -> Result<Self> {
        if branching.is_empty() || branching.contains(&0) {
            return Err(Error::InvalidArgument("branching numbers must be >= 1".into()));
        }
        weight.validate("weight")?;
        killing.validate("killing")?;
        match &measure {
            MeasureLaw::Normalized { scale } if !(*scale > 0.0) => {
                return Err(Error::InvalidArgument("normalized measure scale must be > 0".into()))
            }
            m => {
                if let Some(l) = m.as_law() {
                    l.validate("measure")?;
                }
            }
        }
        let offsets = if branching.iter().all(|&k| k == 1) {
            None
        } else {
            let mut offsets = vec![0usize];
            let mut size = 1usize;
            let mut g = 0;
            loop {
                let next = match offsets[g].checked_add(size) {
                    Some(v) => v,
                    None => break,
                };
                offsets.push(next);
                size = match size.checked_mul(branching[g % branching.len()]) {
                    Some(v) => v,
                    None => break,
                };
                g += 1;
            }
            Some(offsets)
        };
        Ok(RadialFamily { branching, weight, measure, killing, declared: Declared::default(), offsets })
    }

    pub fn with_declared(mut self, declared: Declared) -> Self {
        self.declared = declared;
        self
    }

    pub fn is_ray(&self) -> bool {
        self.offsets.is_none()
    }

    pub fn branching_at(&self, g: usize) -> usize {
        self.branching[g % self.branching.len()]
    }

    /// Number of generations whose children are addressable.
    fn max_generation(&self) -> usize {
        match &self.offsets {
            None => usize::MAX - 1,
            Some(o) => o.len() - 2,
        }
    }

    pub fn generation(&self, x: usize) -> Result<usize> {
        match &self.offsets {
            None => Ok(x),
            Some(o) => {
                if x >= *o.last().unwrap() {
                    return Err(Error::OutsideUniverse(x));
                }
                Ok(o.partition_point(|&v| v <= x) - 1)
            }
        }
    }

    /// First vertex of generation `g`.
    pub fn generation_start(&self, g: usize) -> Result<usize> {
        match &self.offsets {
            None => Ok(g),
            Some(o) => o.get(g).copied().filter(|_| g + 1 < o.len()).ok_or(Error::OutsideUniverse(usize::MAX)),
        }
    }

    /// Edge weight between generation `g` and `g + 1`.
    pub fn edge_weight(&self, g: usize) -> f64 {
        self.weight.at(g)
    }

    pub fn killing_at(&self, g: usize) -> f64 {
        self.killing.at(g)
    }

    /// Full degree of any vertex in generation `g`.
    pub fn degree_at(&self, g: usize) -> f64 {
        let down = if g > 0 { self.weight.at(g - 1) } else { 0.0 };
        self.branching_at(g) as f64 * self.weight.at(g) + down + self.killing.at(g)
    }

    pub fn measure_at(&self, g: usize) -> f64 {
        match &self.measure {
            MeasureLaw::Normalized { scale } => scale * self.degree_at(g),
            other => other.as_law().unwrap().at(g),
        }
    }

    fn neighbors(&self, x: usize) -> Result<Vec<(usize, f64)>> {
        let g = self.generation(x)?;
        let mut out = Vec::new();
        match &self.offsets {
            None => {
                if g > 0 {
                    out.push((x - 1, self.weight.at(g - 1)));
                }
                if g == usize::MAX {
                    return Err(Error::OutsideUniverse(x));
                }
                out.push((x + 1, self.weight.at(g)));
            }
            Some(o) => {
                let i = x - o[g];
                if g > 0 {
                    let k = self.branching_at(g - 1);
                    out.push((o[g - 1] + i / k, self.weight.at(g - 1)));
                }
                if g > self.max_generation() {
                    return Err(Error::OutsideUniverse(x));
                }
                let k = self.branching_at(g);
                let w = self.weight.at(g);
                let first = i
                    .checked_mul(k)
                    .and_then(|v| v.checked_add(o[g + 1]))
                    .ok_or(Error::OutsideUniverse(x))?;
                for j in 0..k {
                    out.push((first + j, w));
                }
            }
        }
        out.retain(|e| e.1 > 0.0);
        Ok(out)
    }

    /// Closed-form `sup d` when every law involved is bounded.
    fn sup_d_bound(&self) -> Option<f64> {
        if let MeasureLaw::Normalized { scale } = self.measure {
            return Some(1.0 / scale);
        }
        let m_inf = self.uniform_measure_lower_bound()?;
        let w = self.weight.sup()?;
        let c = self.killing.sup()?;
        let kmax = *self.branching.iter().max().unwrap() as f64;
        Some(((kmax + 1.0) * w + c) / m_inf)
    }

    fn uniform_measure_lower_bound(&self) -> Option<f64> {
        if let Some(b) = self.declared.uniform_measure_lower_bound {
            return Some(b);
        }
        match &self.measure {
            MeasureLaw::Normalized { .. } => None,
            m => {
                let inf = m.as_law().unwrap().inf();
                (inf > 0.0).then_some(inf)
            }
        }
    }
}

/// A weighted graph given either explicitly or through a generator.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphFamily {
    Explicit { graph: WeightedGraph, root: usize, distance: Vec<usize> },
    Radial(RadialFamily),
}

impl GraphFamily {
    pub fn explicit(graph: WeightedGraph) -> Self {
        Self::explicit_rooted(graph, 0)
    }

    pub fn explicit_rooted(graph: WeightedGraph, root: usize) -> Self {
        let distance = bfs_distances(&graph, root);
        GraphFamily::Explicit { graph, root, distance }
    }

    /// Ray `0 - 1 - 2 - ...` with `b(n, n+1) = (n+1)^power`, `m = 1`, `c = 0`.
    pub fn poly_ray(power: f64) -> Self {
        GraphFamily::Radial(
            RadialFamily::ray(Law::Poly { power, scale: 1.0 }, MeasureLaw::default(), zero_law())
                .expect("valid ray"),
        )
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        match spec {
            FamilySpec::Ray { weight_law, measure_law, killing_law, declared } => Ok(GraphFamily::Radial(
                RadialFamily::ray(weight_law.clone(), measure_law.clone(), killing_law.clone())?
                    .with_declared(declared.clone()),
            )),
            FamilySpec::Tree { branching, weight_law, measure_law, killing_law, declared } => {
                Ok(GraphFamily::Radial(
                    RadialFamily::tree(
                        branching.clone(),
                        weight_law.clone(),
                        measure_law.clone(),
                        killing_law.clone(),
                    )?
                    .with_declared(declared.clone()),
                ))
            }
            FamilySpec::Explicit { graph, root } => {
                let g = graph.to_graph()?;
                let r = match root {
                    Some(label) => g.index_of(label).ok_or_else(|| Error::UnknownVertex(label.clone()))?,
                    None => 0,
                };
                if g.is_empty() {
                    return Err(Error::InvalidArgument("graph has no vertices".into()));
                }
                Ok(Self::explicit_rooted(g, r))
            }
        }
    }

    /// Serializable description, used to embed inputs in reports.
    pub fn to_spec(&self) -> FamilySpec {
        match self {
            GraphFamily::Explicit { graph, root, .. } => FamilySpec::Explicit {
                graph: GraphFile::from_graph(graph),
                root: Some(graph.label(*root).to_string()),
            },
            GraphFamily::Radial(r) if r.is_ray() => FamilySpec::Ray {
                weight_law: r.weight.clone(),
                measure_law: r.measure.clone(),
                killing_law: r.killing.clone(),
                declared: r.declared.clone(),
            },
            GraphFamily::Radial(r) => FamilySpec::Tree {
                branching: r.branching.clone(),
                weight_law: r.weight.clone(),
                measure_law: r.measure.clone(),
                killing_law: r.killing.clone(),
                declared: r.declared.clone(),
            },
        }
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            GraphFamily::Explicit { .. } => FamilyKind::ExplicitFinite,
            GraphFamily::Radial(r) if r.is_ray() => FamilyKind::Ray,
            GraphFamily::Radial(_) => FamilyKind::SphericallySymmetricTree,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GraphFamily::Explicit { .. })
    }

    pub fn as_graph(&self) -> Option<&WeightedGraph> {
        match self {
            GraphFamily::Explicit { graph, .. } => Some(graph),
            _ => None,
        }
    }

    pub fn as_radial(&self) -> Option<&RadialFamily> {
        match self {
            GraphFamily::Radial(r) => Some(r),
            _ => None,
        }
    }

    pub fn root(&self) -> usize {
        match self {
            GraphFamily::Explicit { root, .. } => *root,
            GraphFamily::Radial(_) => 0,
        }
    }

    pub fn check(&self, x: usize) -> Result<()> {
        match self {
            GraphFamily::Explicit { graph, .. } => {
                if x < graph.len() {
                    Ok(())
                } else {
                    Err(Error::UnknownVertex(x.to_string()))
                }
            }
            GraphFamily::Radial(r) => r.generation(x).map(|_| ()),
        }
    }

    /// `b`-positive neighbors of `x`, sorted by vertex id.
    pub fn neighbors(&self, x: usize) -> Result<Vec<(usize, f64)>> {
        match self {
            GraphFamily::Explicit { graph, .. } => {
                self.check(x)?;
                Ok(graph.neighbors(x).to_vec())
            }
            GraphFamily::Radial(r) => r.neighbors(x),
        }
    }

    pub fn killing(&self, x: usize) -> Result<f64> {
        match self {
            GraphFamily::Explicit { graph, .. } => {
                self.check(x)?;
                Ok(graph.killing()[x])
            }
            GraphFamily::Radial(r) => Ok(r.killing_at(r.generation(x)?)),
        }
    }

    pub fn measure(&self, x: usize) -> Result<f64> {
        match self {
            GraphFamily::Explicit { graph, .. } => {
                self.check(x)?;
                Ok(graph.measure()[x])
            }
            GraphFamily::Radial(r) => {
                let m = r.measure_at(r.generation(x)?);
                if m > 0.0 && m.is_finite() {
                    Ok(m)
                } else {
                    Err(Error::InvalidArgument(format!("measure at vertex {x} is not positive")))
                }
            }
        }
    }

    /// Exact `n(x) = sum_y b(x,y) + c(x)` over the whole (possibly infinite)
    /// graph.
    pub fn full_degree(&self, x: usize) -> Result<f64> {
        match self {
            GraphFamily::Explicit { graph, .. } => {
                self.check(x)?;
                Ok(graph.full_degree(x))
            }
            GraphFamily::Radial(r) => Ok(r.degree_at(r.generation(x)?)),
        }
    }

    /// `(n(x), d(x))`.
    pub fn weighted_degree(&self, x: usize) -> Result<(f64, f64)> {
        let n = self.full_degree(x)?;
        Ok((n, n / self.measure(x)?))
    }

    /// Combinatorial distance from the root, `None` if unreachable.
    pub fn distance_from_root(&self, x: usize) -> Result<Option<usize>> {
        match self {
            GraphFamily::Explicit { distance, .. } => {
                self.check(x)?;
                Ok(Some(distance[x]).filter(|&d| d != usize::MAX))
            }
            GraphFamily::Radial(r) => Ok(Some(r.generation(x)?)),
        }
    }

    pub fn label(&self, x: usize) -> String {
        match self {
            GraphFamily::Explicit { graph, .. } => graph.label(x).to_string(),
            GraphFamily::Radial(_) => x.to_string(),
        }
    }

    /// Resolves a user supplied vertex name: labels for explicit graphs,
    /// breadth-first indices for generated families.
    pub fn resolve(&self, name: &str) -> Result<usize> {
        let name = name.trim();
        let x = match self {
            GraphFamily::Explicit { graph, .. } => {
                graph.index_of(name).ok_or_else(|| Error::UnknownVertex(name.to_string()))?
            }
            GraphFamily::Radial(_) => {
                name.parse::<usize>().map_err(|_| Error::UnknownVertex(name.to_string()))?
            }
        };
        self.check(x)?;
        Ok(x)
    }

    /// Combinatorial ball of radius `r` around `center` along `b`-positive
    /// edges, sorted by (distance from `center`, id).
    pub fn ball(&self, center: usize, r: usize) -> Result<Vec<usize>> {
        self.check(center)?;
        if let GraphFamily::Radial(rf) = self {
            if rf.is_ray() && center == 0 {
                // a zero edge weight disconnects the rest of the ray
                let reach = (0..r).take_while(|&g| rf.edge_weight(g) > 0.0).count();
                return Ok((0..=reach).collect());
            }
        }
        let mut seen = std::collections::HashSet::new();
        let mut layers = vec![vec![center]];
        seen.insert(center);
        for _ in 0..r {
            let mut next = Vec::new();
            for &x in layers.last().unwrap() {
                for (y, _) in self.neighbors(x)? {
                    if seen.insert(y) {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            layers.push(next);
        }
        Ok(layers.concat())
    }

    /// Declared or closed-form bound `C >= sup d`, if the family has one.
    pub fn sup_d_bound(&self) -> Option<f64> {
        match self {
            GraphFamily::Explicit { graph, .. } => Some(graph.sup_averaged_degree()),
            GraphFamily::Radial(r) => r.sup_d_bound(),
        }
    }

    pub fn uniform_measure_lower_bound(&self) -> Option<f64> {
        match self {
            GraphFamily::Explicit { graph, .. } => {
                Some(graph.measure().iter().copied().fold(f64::INFINITY, f64::min))
            }
            GraphFamily::Radial(r) => r.uniform_measure_lower_bound(),
        }
    }
}

fn bfs_distances(g: &WeightedGraph, root: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.len()];
    if root >= g.len() {
        return dist;
    }
    dist[root] = 0;
    let mut q = VecDeque::from([root]);
    while let Some(x) = q.pop_front() {
        for &(y, _) in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
        }
    }
    dist
}

/// Outcome of the condition (A) check: every infinite path must carry
/// infinite measure. A finite computation can never refute it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionA {
    Satisfied,
    SatisfiedByBound,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionAReport {
    pub verdict: ConditionA,
    pub measure_lower_bound: Option<f64>,
    /// Per sampled path: partial measure sums at half the cutoff and at the
    /// cutoff.
    pub partial_sums: Vec<(f64, f64)>,
    pub growth_threshold: f64,
}

/// Relative growth of the partial measure sum between `cutoff/2` and
/// `cutoff` that counts as a divergent trend.
pub const CONDITION_A_GROWTH: f64 = 0.05;

pub fn condition_a_diagnostic(fam: &GraphFamily, ray_samples: usize, cutoff: usize) -> ConditionAReport {
    let bound = fam.uniform_measure_lower_bound().filter(|&b| b > 0.0);
    if bound.is_some() {
        return ConditionAReport {
            verdict: ConditionA::SatisfiedByBound,
            measure_lower_bound: bound,
            partial_sums: Vec::new(),
            growth_threshold: CONDITION_A_GROWTH,
        };
    }
    let mut rng = Pcg64::seed_from_u64(0x5eed_a11);
    let mut sums = Vec::new();
    let half = cutoff / 2;
    for _ in 0..ray_samples.max(1) {
        // random walk that never revisits, moving away from the root
        let mut x = fam.root();
        let mut total = 0.0;
        let mut at_half = 0.0;
        let mut ok = true;
        for step in 0..cutoff {
            match fam.measure(x) {
                Ok(m) => total += m,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
            if step + 1 == half {
                at_half = total;
            }
            let here = fam.distance_from_root(x).ok().flatten().unwrap_or(0);
            let outward: Vec<usize> = match fam.neighbors(x) {
                Ok(nb) => nb
                    .into_iter()
                    .map(|e| e.0)
                    .filter(|&y| fam.distance_from_root(y).ok().flatten().map_or(false, |d| d > here))
                    .collect(),
                Err(_) => Vec::new(),
            };
            if outward.is_empty() {
                ok = false;
                break;
            }
            x = outward[rng.random_range(0..outward.len())];
        }
        if ok {
            sums.push((at_half, total));
        }
    }
    let trend = !sums.is_empty()
        && sums.iter().all(|&(h, f)| h > 0.0 && (f - h) >= CONDITION_A_GROWTH * h);
    ConditionAReport {
        verdict: if trend { ConditionA::Satisfied } else { ConditionA::Unknown },
        measure_lower_bound: None,
        partial_sums: sums,
        growth_threshold: CONDITION_A_GROWTH,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree2() -> GraphFamily {
        GraphFamily::Radial(
            RadialFamily::tree(vec![2], Law::Const { value: 1.0 }, MeasureLaw::default(), zero_law()).unwrap(),
        )
    }

    #[test]
    fn ray_degrees_are_closed_form() {
        let ray = GraphFamily::poly_ray(3.0);
        assert_eq!(ray.full_degree(0).unwrap(), 1.0);
        assert_eq!(ray.full_degree(2).unwrap(), 8.0 + 27.0);
        assert_eq!(ray.neighbors(2).unwrap(), vec![(1, 8.0), (3, 27.0)]);
    }

    #[test]
    fn tree_indexing() {
        let t = tree2();
        assert_eq!(t.neighbors(0).unwrap(), vec![(1, 1.0), (2, 1.0)]);
        assert_eq!(t.neighbors(2).unwrap(), vec![(0, 1.0), (5, 1.0), (6, 1.0)]);
        assert_eq!(t.full_degree(0).unwrap(), 2.0);
        assert_eq!(t.full_degree(5).unwrap(), 3.0);
        let r = t.as_radial().unwrap();
        assert_eq!(r.generation(6).unwrap(), 2);
        assert_eq!(r.generation(7).unwrap(), 3);
        // every neighbor relation is symmetric
        for x in 0..40 {
            for (y, b) in t.neighbors(x).unwrap() {
                assert!(t.neighbors(y).unwrap().contains(&(x, b)));
            }
        }
    }

    #[test]
    fn tree_universe_is_bounded() {
        let t = tree2();
        let r = t.as_radial().unwrap();
        let last = *r.offsets.as_ref().unwrap().last().unwrap();
        assert!(matches!(t.check(last), Err(Error::OutsideUniverse(_))));
    }

    #[test]
    fn balls() {
        let ray = GraphFamily::poly_ray(0.0);
        assert_eq!(ray.ball(0, 2).unwrap(), vec![0, 1, 2]);
        assert_eq!(ray.ball(3, 1).unwrap(), vec![3, 2, 4]);
        assert_eq!(tree2().ball(0, 2).unwrap().len(), 7);
        let p = GraphFamily::explicit(WeightedGraph::path(3));
        assert_eq!(p.ball(1, 5).unwrap(), vec![1, 0, 2]);
    }

    #[test]
    fn normalized_measure_gives_unit_degree() {
        let f = GraphFamily::Radial(
            RadialFamily::ray(Law::Const { value: 1.0 }, MeasureLaw::Normalized { scale: 1.0 }, zero_law())
                .unwrap(),
        );
        for x in 0..10 {
            assert_eq!(f.weighted_degree(x).unwrap().1, 1.0);
        }
        assert_eq!(f.sup_d_bound(), Some(1.0));
    }

    #[test]
    fn condition_a() {
        let ray = GraphFamily::poly_ray(1.0);
        assert_eq!(condition_a_diagnostic(&ray, 3, 100).verdict, ConditionA::SatisfiedByBound);
        let p = GraphFamily::explicit(WeightedGraph::path(3));
        assert_eq!(condition_a_diagnostic(&p, 3, 100).verdict, ConditionA::SatisfiedByBound);
        let geo = GraphFamily::Radial(
            RadialFamily::ray(
                Law::Const { value: 1.0 },
                MeasureLaw::Geometric { ratio: 0.5, scale: 1.0 },
                zero_law(),
            )
            .unwrap(),
        );
        assert_eq!(condition_a_diagnostic(&geo, 3, 200).verdict, ConditionA::Unknown);
        let slow = GraphFamily::Radial(
            RadialFamily::ray(
                Law::Const { value: 1.0 },
                MeasureLaw::Poly { power: -0.5, scale: 1.0 },
                zero_law(),
            )
            .unwrap(),
        );
        assert_eq!(condition_a_diagnostic(&slow, 3, 400).verdict, ConditionA::Satisfied);
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"kind":"ray","weight_law":{"type":"poly","power":3.0,"scale":1.0},
            "measure_law":{"type":"const","value":1.0},"killing_law":{"type":"const","value":0.0}}"#;
        let spec: FamilySpec = serde_json::from_str(json).unwrap();
        let fam = GraphFamily::from_spec(&spec).unwrap();
        assert_eq!(fam, GraphFamily::poly_ray(3.0));
        assert_eq!(fam.to_spec(), spec);
        let tree: FamilySpec =
            serde_json::from_str(r#"{"kind":"tree","branching":[2,3],"weight_law":{"type":"const","value":1}}"#)
                .unwrap();
        let t = GraphFamily::from_spec(&tree).unwrap();
        assert_eq!(t.neighbors(1).unwrap().len(), 4);
    }
}
