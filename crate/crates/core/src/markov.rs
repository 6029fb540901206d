//! The continuous-time jump process generated by `-L`.
//!
//! At `x` the particle waits an exponential time with rate `d(x) = n(x)/m(x)`,
//! then jumps to `y` with probability `b(x,y)/n(x)` or is killed with
//! probability `c(x)/n(x)`. A trajectory that performs `explosion_threshold`
//! jumps before the horizon is recorded as exploded.
//!
//! On spherically symmetric trees with branching the simulation runs on the
//! generation chain, which carries the same law for explosion, killing and
//! survival. Outcome states are then generations.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp1};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{GraphFamily, RadialFamily};
use crate::heat::MonteCarloCheck;
use crate::par;
use crate::section::{section, DirichletSection};

pub const DEFAULT_EXPLOSION_THRESHOLD: u64 = 1_000_000;
pub const MIN_EXPLOSION_THRESHOLD: u64 = 10_000;
/// Largest number of precomputed birth-death states.
const TABLE_CAP: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexJumps {
    pub vertex: usize,
    pub rate: f64,
    /// `(neighbor, probability)`
    pub jump_prob: Vec<(usize, f64)>,
    pub kill_prob: f64,
    /// `n(x) = 0`: the particle never moves.
    pub absorbing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpParameters {
    pub vertices: Vec<VertexJumps>,
}

impl JumpParameters {
    pub fn get(&self, x: usize) -> Option<&VertexJumps> {
        self.vertices.iter().find(|v| v.vertex == x)
    }
}

/// Jump parameters of the whole family at the vertices of `k`. Neighbors
/// outside `k` are kept.
pub fn jump_parameters(fam: &GraphFamily, k: &[usize]) -> Result<JumpParameters> {
    let mut vertices = Vec::with_capacity(k.len());
    for &x in k {
        let n = fam.full_degree(x)?;
        let m = fam.measure(x)?;
        let c = fam.killing(x)?;
        let nb = fam.neighbors(x)?;
        if n > 0.0 {
            vertices.push(VertexJumps {
                vertex: x,
                rate: n / m,
                jump_prob: nb.into_iter().map(|(y, b)| (y, b / n)).collect(),
                kill_prob: c / n,
                absorbing: false,
            });
        } else {
            vertices.push(VertexJumps { vertex: x, rate: 0.0, jump_prob: Vec::new(), kill_prob: 0.0, absorbing: true });
        }
    }
    Ok(JumpParameters { vertices })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Alive { state: usize },
    Killed { t: f64, state: usize },
    Exploded { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpace {
    Vertex,
    Generation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryBatch {
    pub seed: u64,
    pub x0: usize,
    pub n_samples: usize,
    pub t_horizon: f64,
    pub explosion_threshold: u64,
    pub state_space: StateSpace,
    pub outcomes: Vec<Outcome>,
    pub jump_counts: Vec<u64>,
}

impl TrajectoryBatch {
    /// `(alive, killed, exploded)`
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for o in &self.outcomes {
            match o {
                Outcome::Alive { .. } => c.0 += 1,
                Outcome::Killed { .. } => c.1 += 1,
                Outcome::Exploded { .. } => c.2 += 1,
            }
        }
        c
    }

    pub fn total_jumps(&self) -> u64 {
        self.jump_counts.iter().sum()
    }
}

/// Per-trajectory generator.
pub type StreamRng = Xoshiro256PlusPlus;

/// Independent generator for trajectory `index`: the xoshiro state is
/// filled by splitmix64 started from a hash of `(seed, index)`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut s = splitmix(seed ^ splitmix(index ^ 0x6a09_e667_f3bc_c908));
    let mut state = [0u8; 32];
    for chunk in state.chunks_exact_mut(8) {
        s = s.wrapping_add(0x9e37_79b9_7f4a_7c15);
        chunk.copy_from_slice(&splitmix(s).to_le_bytes());
    }
    StreamRng::from_seed(state)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Next state after a jump, `None` when killed.
trait Chain: Sync {
    /// `1 / rate`, infinite for absorbing states.
    fn inv_rate(&self, x: usize) -> f64;
    fn next(&self, x: usize, u: f64) -> Option<usize>;
}

/// Finite chain in local indices. Jumps leaving the vertex set count as
/// killing.
struct TableChain {
    inv_rate: Vec<f64>,
    kill: Vec<f64>,
    /// Cumulative jump probabilities after the kill mass.
    cum: Vec<Vec<(f64, usize)>>,
}

impl TableChain {
    fn from_section(sec: &DirichletSection) -> Self {
        let n = sec.len();
        let mut nb: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, b) in sec.edges() {
            nb[i].push((j, b));
            nb[j].push((i, b));
        }
        let mut inv_rate = Vec::with_capacity(n);
        let mut kill = Vec::with_capacity(n);
        let mut cum = Vec::with_capacity(n);
        for i in 0..n {
            let deg = sec.degree()[i];
            if deg <= 0.0 {
                inv_rate.push(f64::INFINITY);
                kill.push(0.0);
                cum.push(Vec::new());
                continue;
            }
            inv_rate.push(sec.measure()[i] / deg);
            let k = (sec.killing()[i] + sec.flux()[i]) / deg;
            kill.push(k);
            let mut acc = k;
            let mut row: Vec<(f64, usize)> = nb[i]
                .iter()
                .map(|&(j, b)| {
                    acc += b / deg;
                    (acc, j)
                })
                .collect();
            if let Some(last) = row.last_mut() {
                // guard against rounding at the top end
                last.0 = f64::INFINITY;
            }
            cum.push(row);
        }
        TableChain { inv_rate, kill, cum }
    }
}

impl Chain for TableChain {
    fn inv_rate(&self, x: usize) -> f64 {
        self.inv_rate[x]
    }

    fn next(&self, x: usize, u: f64) -> Option<usize> {
        if u < self.kill[x] {
            return None;
        }
        let row = &self.cum[x];
        if row.is_empty() {
            return None;
        }
        let k = row.partition_point(|e| e.0 <= u);
        Some(row[k.min(row.len() - 1)].1)
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    inv_rate: f64,
    down: f64,
    /// `down + up`; the rest is killing.
    up: f64,
    /// `down` and `1 - kill` as 64-bit fixed point, `2^64` meaning one.
    down_fix: u128,
    up_fix: u128,
}

fn fixed(p: f64) -> u128 {
    if p >= 1.0 {
        1 << 64
    } else {
        (p.max(0.0) * 18_446_744_073_709_551_616.0) as u64 as u128
    }
}

/// Leading threshold bytes shared by the states `lo..=hi`.
#[derive(Debug, Clone, Copy)]
struct Lead {
    d0: u64,
    u0: u64,
    lo: usize,
    hi: usize,
    absorbing: bool,
}

impl Lead {
    fn of(s: &Step, g: usize) -> Self {
        Lead {
            d0: (s.down_fix >> 56) as u64,
            u0: (s.up_fix >> 56) as u64,
            lo: g,
            hi: g,
            absorbing: s.inv_rate == f64::INFINITY,
        }
    }

    fn same(&self, other: &Lead) -> bool {
        !self.absorbing && !other.absorbing && self.d0 == other.d0 && self.u0 == other.u0
    }
}

/// Generation chain of a radial family.
struct BirthDeath<'a> {
    fam: &'a RadialFamily,
    table: Vec<Step>,
    /// Maximal runs of consecutive states with equal leading bytes. Inside a
    /// run the common case of a move needs no table lookup.
    leads: Vec<Lead>,
}

impl<'a> BirthDeath<'a> {
    fn step_at(fam: &RadialFamily, g: usize) -> Step {
        let n = fam.degree_at(g);
        if !(n > 0.0) {
            return Step { inv_rate: f64::INFINITY, down: 0.0, up: 0.0, down_fix: 0, up_fix: 0 };
        }
        let down = if g > 0 { fam.edge_weight(g - 1) / n } else { 0.0 };
        let up = fam.branching_at(g) as f64 * fam.edge_weight(g) / n;
        let kill = fam.killing_at(g) / n;
        Step {
            inv_rate: fam.measure_at(g) / n,
            down,
            up: down + up,
            down_fix: fixed(down),
            up_fix: fixed(1.0 - kill),
        }
    }

    fn new(fam: &'a RadialFamily, reach: usize) -> Self {
        let len = reach.min(TABLE_CAP);
        let table = par::map_range(len, |g| Self::step_at(fam, g));
        let mut leads: Vec<Lead> = table.iter().enumerate().map(|(g, s)| Lead::of(s, g)).collect();
        let mut i = 0;
        while i < leads.len() {
            let mut j = i;
            while j + 1 < leads.len() && leads[j + 1].same(&leads[i]) {
                j += 1;
            }
            for l in &mut leads[i..=j] {
                l.lo = i;
                l.hi = j;
            }
            i = j + 1;
        }
        BirthDeath { fam, table, leads }
    }

    #[inline]
    fn lead(&self, g: usize) -> Lead {
        match self.leads.get(g) {
            Some(l) => *l,
            None => Lead::of(&Self::step_at(self.fam, g), g),
        }
    }

    #[inline]
    fn step(&self, g: usize) -> Step {
        match self.table.get(g) {
            Some(s) => *s,
            None => Self::step_at(self.fam, g),
        }
    }
}

impl Chain for BirthDeath<'_> {
    fn inv_rate(&self, x: usize) -> f64 {
        self.step(x).inv_rate
    }

    #[inline]
    fn next(&self, x: usize, u: f64) -> Option<usize> {
        let s = self.step(x);
        // 0 down, 1 up, 2 killed; the direction is random so avoid a branch
        let d = (u >= s.down) as usize + (u >= s.up) as usize;
        if d == 2 {
            None
        } else {
            Some(x + 2 * d - 1)
        }
    }
}

fn run<C: Chain>(chain: &C, x0: usize, horizon: f64, threshold: u64, rng: &mut StreamRng) -> (Outcome, u64) {
    let mut x = x0;
    let mut t = 0.0;
    let mut jumps = 0u64;
    loop {
        let ir = chain.inv_rate(x);
        if ir == f64::INFINITY {
            return (Outcome::Alive { state: x }, jumps);
        }
        let e: f64 = rng.sample(Exp1);
        t += e * ir;
        if t >= horizon {
            return (Outcome::Alive { state: x }, jumps);
        }
        match chain.next(x, rng.random::<f64>()) {
            None => return (Outcome::Killed { t, state: x }, jumps),
            Some(y) => {
                x = y;
                jumps += 1;
                if jumps >= threshold {
                    return (Outcome::Exploded { t }, jumps);
                }
            }
        }
    }
}

/// Lazily consumed random bytes.
#[derive(Clone, Copy)]
struct Bits {
    word: u64,
    left: u32,
}

impl Bits {
    #[inline]
    fn byte(&mut self, rng: &mut StreamRng) -> u64 {
        if self.left == 0 {
            self.word = rng.random();
            self.left = 8;
        }
        self.left -= 1;
        let b = self.word >> 56;
        self.word <<= 8;
        b
    }
}

/// Region of a uniform `u` relative to the step thresholds: 0 below
/// `down`, 1 below `1 - kill`, 2 otherwise. The leading byte `b` of `u`
/// settles the comparison unless it ties with a threshold's leading byte,
/// in which case the remaining bits are drawn.
#[inline]
fn region(lead: &Lead, b: u64, exact: impl FnOnce() -> Step, rng: &mut StreamRng) -> usize {
    if b != lead.d0 && b != lead.u0 {
        (b > lead.d0) as usize + (b > lead.u0) as usize
    } else {
        let s = exact();
        let u = ((b << 56) | (rng.random::<u64>() >> 8)) as u128;
        (u >= s.down_fix) as usize + (u >= s.up_fix) as usize
    }
}

const BYTES: u64 = 0x0101_0101_0101_0101;
const EVEN: u64 = 0x00ff_00ff_00ff_00ff;
const CARRY: u64 = 0x0100_0100_0100_0100;

/// Bit `i` set when byte `i` of `w` exceeds `d0 < 256`, or `None` when some
/// byte equals `d0` or reaches `u0`. Bytes are added in 16-bit lanes so the
/// comparison shows up as a carry into bit 8 of each lane.
#[inline(always)]
fn clean_moves(w: u64, d0: u64, u0: u64) -> Option<u64> {
    let t = w ^ (d0 * BYTES);
    let tie = t.wrapping_sub(BYTES) & !t & (BYTES << 7);
    let e = w & EVEN;
    let o = (w >> 8) & EVEN;
    let kill = if u0 < 256 { (256 - u0) * (BYTES & EVEN) } else { 0 };
    if tie != 0 || ((e + kill) | (o + kill)) & CARRY != 0 {
        return None;
    }
    let k = (255 - d0) * (BYTES & EVEN);
    let m = (((e + k) & CARRY) >> 8) | ((o + k) & CARRY);
    Some(m.wrapping_mul(0x0102_0408_1020_4080) >> 56)
}

const FIRST_BLOCK: u64 = 16;
const MAX_BLOCK: u64 = 1 << 16;

/// Block simulation of the generation chain.
///
/// The jump chain is advanced a block at a time without holding times.
/// Given the visit counts `v_k` of the block, the time spent in state `k` is
/// `Gamma(v_k, 1) / rate_k`, independently over `k`. Only in the block where
/// the horizon is crossed are the individual holding times needed; they are
/// recovered by splitting each per-state total with uniform Dirichlet
/// weights, which is their exact conditional law.
fn run_blocks(chain: &BirthDeath, x0: usize, horizon: f64, threshold: u64, rng: &mut StreamRng) -> (Outcome, u64) {
    SCRATCH.with(|cell| {
        let scratch = &mut *cell.borrow_mut();
        scratch.reserve();
        run_blocks_in(scratch, chain, x0, horizon, threshold, rng)
    })
}

/// Per-thread buffers of the block simulation, sized for the largest block.
#[derive(Default)]
struct Scratch {
    counts: Vec<u32>,
    totals: Vec<f64>,
    sums: Vec<f64>,
}

impl Scratch {
    fn reserve(&mut self) {
        let n = 2 * MAX_BLOCK as usize + 1;
        if self.counts.len() < n {
            self.counts.resize(n, 0);
            self.totals.resize(n, 0.0);
            self.sums.resize(n, 0.0);
        }
    }
}

thread_local! {
    static SCRATCH: std::cell::RefCell<Scratch> = std::cell::RefCell::new(Scratch::default());
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WalkEnd {
    Full,
    Killed,
    Absorbed,
}

/// Advances the jump chain by up to `want` visits, reporting each visited
/// state. Returns the number of visits and how the walk stopped; `span`
/// is widened to cover every visited state, possibly with some margin.
#[inline(always)]
fn walk(
    chain: &BirthDeath,
    x: &mut usize,
    want: usize,
    rng: &mut StreamRng,
    bits: &mut Bits,
    span: &mut (usize, usize),
    mut visit: impl FnMut(usize),
) -> (usize, WalkEnd) {
    let mut visits = 0;
    let mut lead = chain.lead(*x);
    while visits < want {
        span.0 = span.0.min(x.saturating_sub(8));
        span.1 = span.1.max(*x + 8);
        if *x < lead.lo || *x > lead.hi {
            lead = chain.lead(*x);
        }
        if lead.absorbing {
            visit(*x);
            return (visits + 1, WalkEnd::Absorbed);
        }
        // eight moves from one word when they cannot leave the run and no
        // byte needs more than its leading bits
        if bits.left == 0 && lead.d0 < 256 && *x >= lead.lo + 8 && *x + 8 <= lead.hi && visits + 8 <= want {
            let w: u64 = rng.random();
            if let Some(ups) = clean_moves(w, lead.d0, lead.u0) {
                for i in 0..8 {
                    visit(*x);
                    *x = *x + 2 * ((ups >> i) & 1) as usize - 1;
                }
                visits += 8;
                continue;
            }
            bits.word = w;
            bits.left = 8;
        }
        visit(*x);
        visits += 1;
        let b = bits.byte(rng);
        let here = *x;
        let r = region(&lead, b, || chain.step(here), rng);
        if r == 2 {
            return (visits, WalkEnd::Killed);
        }
        *x = *x + 2 * r - 1;
    }
    (visits, WalkEnd::Full)
}

fn run_blocks_in(
    sc: &mut Scratch,
    chain: &BirthDeath,
    x0: usize,
    horizon: f64,
    threshold: u64,
    rng: &mut StreamRng,
) -> (Outcome, u64) {
    let mut x = x0;
    let mut t = 0.0;
    let mut jumps = 0u64;
    let mut len = FIRST_BLOCK;
    let mut bits = Bits { word: 0, left: 0 };
    loop {
        let want = len.min(threshold - jumps) as usize;
        let start = x;
        let base = x.saturating_sub(want);
        let saved = (rng.clone(), bits);
        let counts = &mut sc.counts;
        let mut span = (start, start);
        let (visits, end) = walk(chain, &mut x, want, rng, &mut bits, &mut span, |y| counts[y - base] += 1);
        let (lo, hi) = (span.0.max(base) - base, span.1.min(start + visits) - base);
        let moved = if end == WalkEnd::Full { visits } else { visits - 1 };
        let mut elapsed = 0.0;
        for k in lo..=hi {
            let c = sc.counts[k];
            if c > 0 {
                let g: f64 = if c == 1 {
                    rng.sample(Exp1)
                } else {
                    rand_distr::Gamma::new(c as f64, 1.0).unwrap().sample(rng)
                };
                sc.totals[k] = g * chain.step(base + k).inv_rate;
                elapsed += sc.totals[k];
            }
        }
        sc.counts[lo..=hi].fill(0);
        if t + elapsed < horizon {
            t += elapsed;
            jumps += moved as u64;
            if end == WalkEnd::Killed {
                return (Outcome::Killed { t, state: x }, jumps);
            }
            if jumps >= threshold {
                return (Outcome::Exploded { t }, jumps);
            }
            len = (len * 2).min(MAX_BLOCK);
            continue;
        }
        // the horizon falls inside this block: replay it to recover the path
        let (mut replay_rng, mut replay_bits) = saved;
        let mut path = Vec::with_capacity(visits);
        let mut y0 = start;
        walk(chain, &mut y0, want, &mut replay_rng, &mut replay_bits, &mut (0, 0), |y| path.push(y));
        debug_assert_eq!(path.len(), visits);
        let e: Vec<f64> = (0..visits).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        sc.sums[lo..=hi].fill(0.0);
        for (i, &y) in path.iter().enumerate() {
            sc.sums[y - base] += e[i];
        }
        for (i, &y) in path.iter().enumerate() {
            let k = y - base;
            let h = if sc.totals[k] == f64::INFINITY { f64::INFINITY } else { e[i] * sc.totals[k] / sc.sums[k] };
            t += h;
            // the last visit absorbs rounding in the partial sums
            if t >= horizon || i + 1 == visits {
                return (Outcome::Alive { state: y }, jumps + i as u64);
            }
        }
        unreachable!("nonempty block");
    }
}

fn batch<C: Chain>(chain: &C, x0: usize, horizon: f64, n: usize, seed: u64, threshold: u64) -> (Vec<Outcome>, Vec<u64>) {
    let res = par::map_range(n, |i| run(chain, x0, horizon, threshold, &mut stream(seed, i as u64)));
    res.into_iter().unzip()
}

/// Simulates `n_samples` trajectories from `x0` up to `t_horizon`.
pub fn simulate(
    fam: &GraphFamily,
    x0: usize,
    t_horizon: f64,
    n_samples: usize,
    seed: u64,
    explosion_threshold: u64,
) -> Result<TrajectoryBatch> {
    if explosion_threshold < MIN_EXPLOSION_THRESHOLD {
        return Err(Error::InvalidArgument(format!(
            "explosion threshold must be at least {MIN_EXPLOSION_THRESHOLD}"
        )));
    }
    simulate_unchecked(fam, x0, t_horizon, n_samples, seed, explosion_threshold)
}

fn simulate_unchecked(
    fam: &GraphFamily,
    x0: usize,
    t_horizon: f64,
    n_samples: usize,
    seed: u64,
    threshold: u64,
) -> Result<TrajectoryBatch> {
    if !(t_horizon >= 0.0) || !t_horizon.is_finite() {
        return Err(Error::InvalidArgument("horizon must be finite and >= 0".into()));
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    fam.check(x0)?;
    let (state_space, (outcomes, jump_counts)) = match fam {
        GraphFamily::Explicit { graph, .. } => {
            let all: Vec<usize> = (0..graph.len()).collect();
            let sec = section(fam, &all)?;
            let chain = TableChain::from_section(&sec);
            let local = sec.position(x0).unwrap();
            let (mut o, j) = batch(&chain, local, t_horizon, n_samples, seed, threshold);
            for out in &mut o {
                match out {
                    Outcome::Alive { state } | Outcome::Killed { state, .. } => *state = sec.vertices()[*state],
                    Outcome::Exploded { .. } => {}
                }
            }
            (StateSpace::Vertex, (o, j))
        }
        GraphFamily::Radial(r) => {
            let g0 = r.generation(x0)?;
            let reach = (g0 as u64).saturating_add(threshold).saturating_add(1);
            let chain = BirthDeath::new(r, usize::try_from(reach).unwrap_or(usize::MAX));
            let space = if r.is_ray() { StateSpace::Vertex } else { StateSpace::Generation };
            let res = par::map_range(n_samples, |i| {
                run_blocks(&chain, g0, t_horizon, threshold, &mut stream(seed, i as u64))
            });
            (space, res.into_iter().unzip())
        }
    };
    Ok(TrajectoryBatch {
        seed,
        x0,
        n_samples,
        t_horizon,
        explosion_threshold: threshold,
        state_space,
        outcomes,
        jump_counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatEstimate {
    pub m_hat: f64,
    pub alive_hat: f64,
    pub killed_hat: f64,
    pub exploded_hat: f64,
    /// Binomial standard error of the exploded fraction.
    pub se: f64,
    /// `3 * se`
    pub ci: f64,
}

pub fn estimate_heat_quantities(batch: &TrajectoryBatch) -> Result<HeatEstimate> {
    if batch.outcomes.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let n = batch.outcomes.len() as f64;
    let (a, k, e) = batch.counts();
    let exploded_hat = e as f64 / n;
    let se = (exploded_hat * (1.0 - exploded_hat) / n).sqrt();
    Ok(HeatEstimate {
        m_hat: (a + k) as f64 / n,
        alive_hat: a as f64 / n,
        killed_hat: k as f64 / n,
        exploded_hat,
        se,
        ci: 3.0 * se,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionEstimate {
    pub x: usize,
    pub y: usize,
    pub t: f64,
    pub samples: usize,
    /// Estimated probability of being at `y` at time `t`, started at `x`,
    /// for the process killed on leaving `K`.
    pub p: f64,
    pub se: f64,
}

/// Monte Carlo estimate of `P_x(X_t = y)` for the chain restricted to `K`.
/// Exits from `K` are counted as killing, so the estimate targets
/// `exp(-t L_K) delta_y (x)`.
pub fn transition_estimate(
    fam: &GraphFamily,
    k: &[usize],
    x: usize,
    y: usize,
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<TransitionEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument("t must be finite and >= 0".into()));
    }
    let sec = section(fam, k)?;
    let (Some(i), Some(j)) = (sec.position(x), sec.position(y)) else {
        return Err(Error::InvalidArgument("x and y must lie in K".into()));
    };
    let chain = TableChain::from_section(&sec);
    let (outcomes, _) = batch(&chain, i, t, n_samples, seed, u64::MAX);
    let hits = outcomes.iter().filter(|o| matches!(o, Outcome::Alive { state } if *state == j)).count();
    let n = n_samples as f64;
    let p = hits as f64 / n;
    Ok(TransitionEstimate { x, y, t, samples: n_samples, p, se: (p * (1.0 - p) / n).sqrt() })
}

/// Compares `1 - exploded fraction` against a matrix value of `M_t(x0)`.
pub fn montecarlo_check(
    fam: &GraphFamily,
    x0: usize,
    t: f64,
    samples: usize,
    seed: u64,
    explosion_threshold: u64,
    m_matrix: f64,
) -> Result<MonteCarloCheck> {
    let b = simulate(fam, x0, t, samples, seed, explosion_threshold)?;
    let est = estimate_heat_quantities(&b)?;
    Ok(MonteCarloCheck {
        t,
        samples,
        seed,
        explosion_threshold,
        exploded_fraction: est.exploded_hat,
        m_hat: est.m_hat,
        ci: est.ci,
        m_matrix,
        agrees: (est.m_hat - m_matrix).abs() <= est.ci.max(3.0 / samples as f64),
    })
}
