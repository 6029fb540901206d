//! Boundary measures, isoperimetric constants and the co-area formulas.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::GraphFamily;
use crate::graph::VertexFunction;
use crate::par;
use crate::section::section;

/// Largest set handled by exact enumeration.
pub const ENUMERATION_CAP: usize = 24;

/// Relative tolerance under which two ratios count as tied.
const TIE: f64 = 1e-12;

/// Low bits of a subset mask that are walked in Gray code order from a
/// freshly computed base, bounding the drift of the incremental sums.
const GRAY_BITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureChoice {
    /// The vertex measure `m`.
    M,
    /// The full degree `n`.
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySpec {
    pub w: Vec<usize>,
    pub boundary_measure: f64,
    pub volume_m: f64,
    pub volume_n: f64,
}

fn as_set(fam: &GraphFamily, w: &[usize]) -> Result<Vec<usize>> {
    let mut v = w.to_vec();
    v.sort_unstable();
    v.dedup();
    for &x in &v {
        fam.check(x)?;
    }
    Ok(v)
}

/// `|dW| = sum_{x in W, y not in W} b(x,y) + sum_{x in W} c(x)`.
pub fn boundary_measure(fam: &GraphFamily, w: &[usize]) -> Result<f64> {
    let w = as_set(fam, w)?;
    let inside: HashSet<usize> = w.iter().copied().collect();
    let mut total = 0.0;
    for &x in &w {
        total += fam.killing(x)?;
        for (y, b) in fam.neighbors(x)? {
            if !inside.contains(&y) {
                total += b;
            }
        }
    }
    Ok(total)
}

/// Edge boundary without the killing term.
pub fn edge_boundary(fam: &GraphFamily, w: &[usize]) -> Result<f64> {
    let w = as_set(fam, w)?;
    let mut c = 0.0;
    for &x in &w {
        c += fam.killing(x)?;
    }
    Ok(boundary_measure(fam, &w)? - c)
}

pub fn boundary_spec(fam: &GraphFamily, w: &[usize]) -> Result<BoundarySpec> {
    let w = as_set(fam, w)?;
    let mut volume_m = 0.0;
    let mut volume_n = 0.0;
    for &x in &w {
        volume_m += fam.measure(x)?;
        volume_n += fam.full_degree(x)?;
    }
    Ok(BoundarySpec { boundary_measure: boundary_measure(fam, &w)?, volume_m, volume_n, w })
}

fn volume(fam: &GraphFamily, w: &[usize], choice: MeasureChoice) -> Result<f64> {
    let mut v = 0.0;
    for &x in w {
        v += match choice {
            MeasureChoice::M => fam.measure(x)?,
            MeasureChoice::N => fam.full_degree(x)?,
        };
    }
    Ok(v)
}

/// Ratio problem `min_W (sum_{x in W} s(x) - sum_{x,y in W, x != y} B(x,y)) / sum_{x in W} w(x)`
/// over nonempty `W` with positive weight, where `s(x)` already contains
/// the internal row sums.
struct RatioProblem {
    k: usize,
    s: Vec<f64>,
    b: Vec<Vec<f64>>,
    w: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Best {
    ratio: f64,
    card: u32,
    mask: u32,
}

fn better(a: &Best, b: &Best) -> bool {
    let scale = a.ratio.abs().max(b.ratio.abs());
    if (a.ratio - b.ratio).abs() > TIE * scale {
        return a.ratio < b.ratio;
    }
    match a.card.cmp(&b.card) {
        Ordering::Less => true,
        Ordering::Greater => false,
        // lowest differing element decides the lexicographic order
        Ordering::Equal => {
            let d = a.mask ^ b.mask;
            d != 0 && a.mask & (d & d.wrapping_neg()) != 0
        }
    }
}

impl RatioProblem {
    fn from_scratch(&self, mask: u32) -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.k {
            if mask >> i & 1 == 1 {
                num += self.s[i];
                den += self.w[i];
                for j in 0..self.k {
                    if mask >> j & 1 == 1 {
                        num -= self.b[i][j];
                    }
                }
            }
        }
        (num, den)
    }

    /// Exact numerator as a sum of nonnegative terms.
    fn exact_numerator(&self, mask: u32, out: &[f64]) -> f64 {
        let mut num = 0.0;
        for i in 0..self.k {
            if mask >> i & 1 == 1 {
                num += out[i];
                for j in 0..self.k {
                    if mask >> j & 1 == 0 {
                        num += self.b[i][j];
                    }
                }
            }
        }
        num
    }

    fn chunk(&self, high: u32, low_bits: usize) -> Option<Best> {
        let base = high << low_bits;
        let (mut num, mut den) = self.from_scratch(base);
        let mut inner: Vec<f64> = (0..self.k)
            .map(|x| (0..self.k).filter(|&y| base >> y & 1 == 1).map(|y| self.b[x][y]).sum())
            .collect();
        let mut mask = base;
        let mut best: Option<Best> = None;
        let consider = |mask: u32, num: f64, den: f64, best: &mut Option<Best>| {
            if mask != 0 && den > 0.0 {
                let cand = Best { ratio: num / den, card: mask.count_ones(), mask };
                if best.as_ref().map_or(true, |b| better(&cand, b)) {
                    *best = Some(cand);
                }
            }
        };
        consider(mask, num, den, &mut best);
        for i in 1u32..(1u32 << low_bits) {
            let x = i.trailing_zeros() as usize;
            let adding = mask >> x & 1 == 0;
            if adding {
                num += self.s[x] - 2.0 * inner[x];
                den += self.w[x];
                mask |= 1 << x;
                for (y, v) in inner.iter_mut().enumerate() {
                    *v += self.b[y][x];
                }
            } else {
                mask &= !(1 << x);
                for (y, v) in inner.iter_mut().enumerate() {
                    *v -= self.b[y][x];
                }
                num -= self.s[x] - 2.0 * inner[x];
                den -= self.w[x];
            }
            consider(mask, num, den, &mut best);
        }
        best
    }

    fn solve(&self) -> Option<Best> {
        let low = self.k.min(GRAY_BITS);
        let high = self.k - low;
        let chunks = par::map_range(1usize << high, |h| self.chunk(h as u32, low));
        chunks.into_iter().flatten().fold(None, |acc: Option<Best>, c| match acc {
            Some(a) if !better(&c, &a) => Some(a),
            _ => Some(c),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaResult {
    pub alpha: f64,
    /// Minimizing subset, sorted ids.
    pub minimizer: Vec<usize>,
    pub measure: MeasureChoice,
    pub subsets: u64,
}

struct Local {
    ids: Vec<usize>,
    /// Weight leaving `U` plus killing, per vertex.
    out: Vec<f64>,
    killing: Vec<f64>,
    b: Vec<Vec<f64>>,
}

fn localize(fam: &GraphFamily, u: &[usize]) -> Result<Local> {
    let ids = as_set(fam, u)?;
    if ids.is_empty() {
        return Err(Error::InvalidArgument("the vertex set must be nonempty".into()));
    }
    if ids.len() > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { size: ids.len(), cap: ENUMERATION_CAP });
    }
    let pos: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let k = ids.len();
    let mut b = vec![vec![0.0; k]; k];
    let mut out = vec![0.0; k];
    let mut killing = vec![0.0; k];
    for (i, &x) in ids.iter().enumerate() {
        killing[i] = fam.killing(x)?;
        out[i] = killing[i];
        for (y, w) in fam.neighbors(x)? {
            match pos.get(&y) {
                Some(&j) => b[i][j] = w,
                None => out[i] += w,
            }
        }
    }
    Ok(Local { ids, out, killing, b })
}

impl Local {
    fn problem(&self, out: &[f64], w: Vec<f64>) -> RatioProblem {
        let s = (0..self.ids.len()).map(|i| out[i] + self.b[i].iter().sum::<f64>()).collect();
        RatioProblem { k: self.ids.len(), s, b: self.b.clone(), w }
    }

    fn members(&self, mask: u32) -> Vec<usize> {
        (0..self.ids.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.ids[i]).collect()
    }
}

/// Exact `alpha(U) = min_{W in U} |dW| / measure(W)` by enumerating every
/// nonempty subset. Ties are broken by cardinality, then lexicographically.
pub fn alpha_exact(fam: &GraphFamily, u: &[usize], choice: MeasureChoice) -> Result<AlphaResult> {
    let loc = localize(fam, u)?;
    let w = loc
        .ids
        .iter()
        .map(|&x| match choice {
            MeasureChoice::M => fam.measure(x),
            MeasureChoice::N => fam.full_degree(x),
        })
        .collect::<Result<Vec<_>>>()?;
    let prob = loc.problem(&loc.out, w);
    let subsets = (1u64 << loc.ids.len()) - 1;
    let best = prob.solve().ok_or_else(|| {
        Error::InvalidArgument("every subset has zero volume; the ratio is undefined".into())
    })?;
    let num = prob.exact_numerator(best.mask, &loc.out);
    let den = prob.from_scratch(best.mask).1;
    Ok(AlphaResult { alpha: num / den, minimizer: loc.members(best.mask), measure: choice, subsets })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaGamma {
    pub beta: f64,
    pub beta_minimizer: Vec<usize>,
    pub gamma: f64,
    pub gamma_minimizer: Vec<usize>,
    /// Volumes are sums of the full degree `n`, the vertex measure is
    /// taken to be identically one.
    pub volume: &'static str,
    /// The boundary excludes the killing term.
    pub boundary: &'static str,
}

/// `beta_U = min |dW|_b / vol(W)` with the edge boundary only and
/// `gamma_U = min c(W) / vol(W)`, `vol = sum n`.
pub fn beta_gamma(fam: &GraphFamily, u: &[usize]) -> Result<BetaGamma> {
    let loc = localize(fam, u)?;
    let vol = loc.ids.iter().map(|&x| fam.full_degree(x)).collect::<Result<Vec<_>>>()?;
    let edge_out: Vec<f64> = loc.out.iter().zip(&loc.killing).map(|(o, c)| o - c).collect();
    let beta_prob = loc.problem(&edge_out, vol.clone());
    let gamma_prob = RatioProblem {
        k: loc.ids.len(),
        s: loc.killing.clone(),
        b: vec![vec![0.0; loc.ids.len()]; loc.ids.len()],
        w: vol,
    };
    let undefined = || Error::InvalidArgument("every subset has zero volume; the ratio is undefined".into());
    let bb = beta_prob.solve().ok_or_else(undefined)?;
    let gb = gamma_prob.solve().ok_or_else(undefined)?;
    let beta = beta_prob.exact_numerator(bb.mask, &edge_out) / beta_prob.from_scratch(bb.mask).1;
    let gamma = gamma_prob.from_scratch(gb.mask);
    Ok(BetaGamma {
        beta,
        beta_minimizer: loc.members(bb.mask),
        gamma: gamma.0 / gamma.1,
        gamma_minimizer: loc.members(gb.mask),
        volume: "n (m = 1)",
        boundary: "edges only",
    })
}

/// Region on which an upper bound for `alpha` is sought.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region {
    Finite { vertices: Vec<usize> },
    /// Everything except `deleted`, explored around `root`.
    Complement { deleted: Vec<usize>, root: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaUpper {
    pub value: f64,
    pub witness: Vec<usize>,
    pub candidates: usize,
    pub measure: MeasureChoice,
    pub kind: &'static str,
}

/// Upper bound for `alpha(U)`: the best ratio over balls inside `U`, sweep
/// sets of the ground state of `L_U` and greedily grown sets. `budget`
/// bounds the size of candidate sets and of the explored window.
pub fn alpha_upper(fam: &GraphFamily, region: &Region, choice: MeasureChoice, budget: usize) -> Result<AlphaUpper> {
    let budget = budget.max(1);
    let window: Vec<usize> = match region {
        Region::Finite { vertices } => as_set(fam, vertices)?,
        Region::Complement { deleted, root } => {
            let deleted = as_set(fam, deleted)?;
            let mut reach = 0;
            for &x in &deleted {
                reach = reach.max(distance(fam, *root, x)?);
            }
            let gone: HashSet<usize> = deleted.into_iter().collect();
            fam.ball(*root, reach + budget)?.into_iter().filter(|x| !gone.contains(x)).collect()
        }
    };
    if window.is_empty() {
        return Err(Error::InvalidArgument("region has no vertices in the explored window".into()));
    }
    let inside: HashSet<usize> = window.iter().copied().collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut tried = 0;
    let mut offer = |w: Vec<usize>, best: &mut Option<(f64, Vec<usize>)>| -> Result<()> {
        let vol = volume(fam, &w, choice)?;
        if vol <= 0.0 {
            return Ok(());
        }
        tried += 1;
        let r = boundary_measure(fam, &w)? / vol;
        if best.as_ref().map_or(true, |b| r < b.0) {
            let mut w = w;
            w.sort_unstable();
            *best = Some((r, w));
        }
        Ok(())
    };

    // balls inside the region around the first `budget` window vertices
    for &center in window.iter().take(budget) {
        let mut last = 0;
        for r in 0..=budget {
            let ball: Vec<usize> = fam.ball(center, r)?.into_iter().filter(|x| inside.contains(x)).collect();
            if ball.len() == last || ball.len() > budget {
                break;
            }
            last = ball.len();
            offer(ball, &mut best)?;
        }
    }

    // sweep sets of the ground state on the window
    let sec = section(fam, &window)?;
    let psi = if sec.is_dense() {
        let sd = sec.spectral()?;
        sd.vectors().column(0).iter().copied().collect::<Vec<_>>()
    } else {
        crate::linalg::bottom_eigenpair(&sec.symmetric_sparse())?.1
    };
    let mut order: Vec<(f64, usize)> = sec
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &x)| ((psi[i] / sec.measure()[i].sqrt()).abs(), x))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for k in 1..=order.len().min(budget) {
        offer(order[..k].iter().map(|e| e.1).collect(), &mut best)?;
    }

    // greedy growth from the best few singletons
    let mut singles: Vec<(f64, usize)> = Vec::new();
    for &x in &window {
        let vol = volume(fam, &[x], choice)?;
        if vol > 0.0 {
            singles.push((boundary_measure(fam, &[x])? / vol, x));
        }
    }
    singles.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for &(_, seed) in singles.iter().take(4) {
        let mut w: BTreeSet<usize> = BTreeSet::from([seed]);
        while w.len() < budget {
            let frontier: BTreeSet<usize> = w
                .iter()
                .map(|&x| fam.neighbors(x))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .map(|e| e.0)
                .filter(|y| inside.contains(y) && !w.contains(y))
                .collect();
            let mut step: Option<(f64, usize)> = None;
            for y in frontier {
                let mut cand: Vec<usize> = w.iter().copied().collect();
                cand.push(y);
                let vol = volume(fam, &cand, choice)?;
                if vol <= 0.0 {
                    continue;
                }
                let r = boundary_measure(fam, &cand)? / vol;
                if step.map_or(true, |s| r < s.0) {
                    step = Some((r, y));
                }
            }
            match step {
                Some((_, y)) => {
                    w.insert(y);
                    offer(w.iter().copied().collect(), &mut best)?;
                }
                None => break,
            }
        }
    }

    let (value, witness) = best.ok_or_else(|| Error::InvalidArgument("no candidate set has positive volume".into()))?;
    Ok(AlphaUpper { value, witness, candidates: tried, measure: choice, kind: "UPPER-BOUND" })
}

fn distance(fam: &GraphFamily, from: usize, to: usize) -> Result<usize> {
    if from == fam.root() {
        if let Some(d) = fam.distance_from_root(to)? {
            return Ok(d);
        }
    }
    let mut r = 0;
    loop {
        let ball = fam.ball(from, r)?;
        if ball.contains(&to) {
            return Ok(r);
        }
        if r > 0 && ball.len() == fam.ball(from, r - 1)?.len() {
            return Err(Error::InvalidArgument(format!("vertex {to} is not reachable from {from}")));
        }
        r += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coarea {
    pub lhs: f64,
    pub rhs: f64,
}

impl Coarea {
    pub fn relative_error(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).abs() / scale
        }
    }
}

fn levels(f: &VertexFunction) -> Result<Vec<f64>> {
    let mut vals = Vec::new();
    for (x, v) in f.iter() {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("function value {v} at vertex {x} is not a finite nonnegative number")));
        }
        vals.push(v);
    }
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    Ok(vals)
}

/// Both sides of the first co-area formula with the killing term counted as
/// boundary: `1/2 sum b |f(x)-f(y)| + sum c |f|` and `int_0^inf |d{f > t}| dt`.
pub fn coarea_first(fam: &GraphFamily, f: &VertexFunction, enclosure: &[usize]) -> Result<Coarea> {
    let levels = levels(f)?;
    let encl: HashSet<usize> = enclosure.iter().copied().collect();
    let mut lhs = 0.0;
    for (x, fx) in f.iter() {
        fam.check(x)?;
        if !encl.contains(&x) {
            return Err(Error::EnclosureTooSmall { vertex: x, neighbor: x });
        }
        lhs += fam.killing(x)? * fx;
        for (y, b) in fam.neighbors(x)? {
            if !encl.contains(&y) {
                return Err(Error::EnclosureTooSmall { vertex: x, neighbor: y });
            }
            let fy = f.get(y);
            // each unordered pair once
            if fy == 0.0 || x < y {
                lhs += b * (fx - fy).abs();
            }
        }
    }
    let mut rhs = 0.0;
    let mut prev = 0.0;
    for &v in &levels {
        let omega: Vec<usize> = f.iter().filter(|e| e.1 >= v).map(|e| e.0).collect();
        rhs += (v - prev) * boundary_measure(fam, &omega)?;
        prev = v;
    }
    Ok(Coarea { lhs, rhs })
}

/// Both sides of the layer cake formula `sum m f = int_0^inf m({f > t}) dt`.
pub fn coarea_second(fam: &GraphFamily, f: &VertexFunction) -> Result<Coarea> {
    let levels = levels(f)?;
    let mut lhs = 0.0;
    for (x, v) in f.iter() {
        lhs += fam.measure(x)? * v;
    }
    let mut rhs = 0.0;
    let mut prev = 0.0;
    for &v in &levels {
        let omega: Vec<usize> = f.iter().filter(|e| e.1 >= v).map(|e| e.0).collect();
        rhs += (v - prev) * volume(fam, &omega, MeasureChoice::M)?;
        prev = v;
    }
    Ok(Coarea { lhs, rhs })
}
