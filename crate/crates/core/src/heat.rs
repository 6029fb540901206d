//! Heat content, the largest bounded `alpha`-harmonic function and the
//! stochastic completeness verdict, all computed on Dirichlet sections.
//!
//! On a section `K` the heat content is
//! `M_t = exp(-t L_K) 1 + int_0^t exp(-s L_K) (c/m) ds`, evaluated exactly
//! through the eigendecomposition. The function `v_K = (L_K + alpha)^{-1} g_K`
//! solves `(L + alpha) v = 0` on `K` with `v = 1` outside, and decreases to the
//! largest bounded `alpha`-harmonic function `w` as `K` grows.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::GraphFamily;
use crate::par;
use crate::section::{phi, DirichletSection, Exhaustion, SpectralDecomposition};

/// Values of `M_t` at a set of probe vertices on one section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatContentCurve {
    pub radius: usize,
    pub size: usize,
    pub times: Vec<f64>,
    pub probes: Vec<usize>,
    /// `[time][probe]`, `None` when the probe lies outside the section.
    pub semigroup_term: Vec<Vec<Option<f64>>>,
    pub killed_term: Vec<Vec<Option<f64>>>,
    pub m_values: Vec<Vec<Option<f64>>>,
}

/// `(exp(-t L_K) 1, int_0^t exp(-s L_K)(c/m) ds)` on the whole section.
pub fn heat_content_on(sec: &DirichletSection, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    sec.evolve(t, &sec.ones(), Some(&sec.killing_ratio()))
}

/// Cheap point evaluation of `M_t(x)` from a fixed eigendecomposition.
#[derive(Debug, Clone)]
pub struct HeatProbe {
    lambda: Vec<f64>,
    ones: Vec<f64>,
    killing: Vec<f64>,
}

impl HeatProbe {
    pub fn new(sd: &SpectralDecomposition, sec: &DirichletSection, i: usize) -> Self {
        HeatProbe {
            lambda: sd.values().iter().map(|l| l.max(0.0)).collect(),
            ones: sd.probe_weights(i, &sec.ones()),
            killing: sd.probe_weights(i, &sec.killing_ratio()),
        }
    }

    /// `(semigroup term, killed term)` at time `t`.
    pub fn terms(&self, t: f64) -> (f64, f64) {
        if t == 0.0 {
            return (self.ones.iter().sum(), 0.0);
        }
        let mut a = 0.0;
        let mut b = 0.0;
        for k in 0..self.lambda.len() {
            a += self.ones[k] * (-t * self.lambda[k]).exp();
            b += self.killing[k] * phi(t, self.lambda[k]);
        }
        (a, b)
    }

    pub fn m(&self, t: f64) -> f64 {
        let (a, b) = self.terms(t);
        a + b
    }
}

pub fn heat_content(
    fam: &GraphFamily,
    exhaustion: &Exhaustion,
    times: &[f64],
    probes: &[usize],
) -> Result<Vec<HeatContentCurve>> {
    if times.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be finite and >= 0".into()));
    }
    for &x in probes {
        fam.check(x)?;
    }
    let sections = exhaustion.sections(fam)?;
    let curves = par::map_range(sections.len(), |idx| -> Result<HeatContentCurve> {
        let sec = &sections[idx];
        let mut semigroup_term = Vec::with_capacity(times.len());
        let mut killed_term = Vec::with_capacity(times.len());
        let mut m_values = Vec::with_capacity(times.len());
        if sec.is_dense() {
            let sd = sec.spectral()?;
            let probes_local: Vec<Option<HeatProbe>> =
                probes.iter().map(|&x| sec.position(x).map(|i| HeatProbe::new(&sd, sec, i))).collect();
            for &t in times {
                let terms: Vec<Option<(f64, f64)>> =
                    probes_local.iter().map(|p| p.as_ref().map(|p| p.terms(t))).collect();
                semigroup_term.push(terms.iter().map(|o| o.map(|v| v.0)).collect());
                killed_term.push(terms.iter().map(|o| o.map(|v| v.1)).collect());
                m_values.push(terms.iter().map(|o| o.map(|v| v.0 + v.1)).collect());
            }
        } else {
            for &t in times {
                let (a, b) = heat_content_on(sec, t)?;
                let at = |v: &[f64]| -> Vec<Option<f64>> {
                    probes.iter().map(|&x| sec.position(x).map(|i| v[i])).collect()
                };
                semigroup_term.push(at(&a));
                killed_term.push(at(&b));
                let m: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
                m_values.push(at(&m));
            }
        }
        Ok(HeatContentCurve {
            radius: exhaustion.radii[idx],
            size: sec.len(),
            times: times.to_vec(),
            probes: probes.to_vec(),
            semigroup_term,
            killed_term,
            m_values,
        })
    });
    curves.into_iter().collect()
}

/// `v_K` on one section of an exhaustion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSection {
    pub radius: usize,
    pub size: usize,
    pub root_value: f64,
    pub max_value: f64,
    /// `(vertex, v_K(vertex))` in section order.
    pub values: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSequence {
    pub alpha: f64,
    pub root: usize,
    pub sections: Vec<HarmonicSection>,
    /// Largest increase of `v_K` on common vertices between consecutive
    /// sections; positive values contradict monotonicity.
    pub max_increase: f64,
    pub nonincreasing: bool,
}

/// `v_K = (L_K + alpha)^{-1} g_K`.
pub fn harmonic_on(sec: &DirichletSection, alpha: f64) -> Result<Vec<f64>> {
    sec.resolvent_apply(alpha, &sec.boundary())
}

pub fn largest_alpha_harmonic(fam: &GraphFamily, alpha: f64, exhaustion: &Exhaustion) -> Result<HarmonicSequence> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let sections = exhaustion.sections(fam)?;
    let root = exhaustion.root;
    let vs = par::map_slice(&sections, |sec| harmonic_on(sec, alpha));
    let mut out = Vec::with_capacity(sections.len());
    for ((sec, v), &radius) in sections.iter().zip(vs).zip(&exhaustion.radii) {
        let v = v?;
        let root_value = sec.position(root).map_or(1.0, |i| v[i]);
        out.push(HarmonicSection {
            radius,
            size: sec.len(),
            root_value,
            max_value: v.iter().copied().fold(0.0, f64::max),
            values: sec.vertices().iter().copied().zip(v).collect(),
        });
    }
    let mut max_increase = f64::NEG_INFINITY;
    for w in out.windows(2) {
        let next: std::collections::HashMap<usize, f64> = w[1].values.iter().copied().collect();
        for &(x, v) in &w[0].values {
            if let Some(&u) = next.get(&x) {
                max_increase = max_increase.max(u - v);
            }
        }
    }
    if max_increase == f64::NEG_INFINITY {
        max_increase = 0.0;
    }
    Ok(HarmonicSequence { alpha, root, sections: out, nonincreasing: max_increase <= 1e-12, max_increase })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "SC")]
    Sc,
    #[serde(rename = "SI")]
    Si,
    #[serde(rename = "UNDECIDED")]
    Undecided,
}

/// Declared thresholds of the verdict rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictRule {
    /// `v` below this counts as zero.
    pub tol: f64,
    /// Number of trailing decrement ratios that must show geometric decay.
    pub window: usize,
    /// Largest admissible extrapolated remaining decrease, relative to the
    /// last value.
    pub stabilization: f64,
}

impl Default for VerdictRule {
    fn default() -> Self {
        VerdictRule { tol: 1e-6, window: 3, stabilization: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trend {
    pub root_values: Vec<f64>,
    pub decrements: Vec<f64>,
    /// Successive decrement ratios `delta_{i+1} / delta_i`.
    pub ratios: Vec<f64>,
    /// Geometric bound for the remaining decrease, when the trailing
    /// ratios stay below one.
    pub extrapolated_tail: Option<f64>,
    pub verdict: Verdict,
}

/// Classifies a nonincreasing sequence of root values.
///
/// SC when the last value is below `tol`. SI when the last `window`
/// decrement ratios are all below one, the geometric tail bound
/// `delta_last * rho / (1 - rho)` is at most `stabilization` times the last
/// value, and the last value minus that tail still exceeds `tol`.
/// Otherwise UNDECIDED.
pub fn classify(root_values: &[f64], rule: &VerdictRule) -> Trend {
    let decrements: Vec<f64> = root_values.windows(2).map(|w| w[0] - w[1]).collect();
    let ratios: Vec<f64> = decrements
        .windows(2)
        .map(|w| if w[0] == 0.0 && w[1] == 0.0 { 0.0 } else { w[1] / w[0] })
        .collect();
    let last = root_values.last().copied().unwrap_or(f64::NAN);
    let mut tail = None;
    let verdict = if last < rule.tol {
        Verdict::Sc
    } else if rule.window > 0 && ratios.len() >= rule.window {
        let recent = &ratios[ratios.len() - rule.window..];
        let rho = recent.iter().copied().fold(0.0, f64::max);
        let geometric = recent.iter().all(|r| r.is_finite() && (0.0..1.0).contains(r));
        if geometric && *decrements.last().unwrap() >= 0.0 {
            let t = decrements.last().unwrap() * rho / (1.0 - rho);
            tail = Some(t);
            if t <= rule.stabilization * last && last - t > rule.tol {
                Verdict::Si
            } else {
                Verdict::Undecided
            }
        } else {
            Verdict::Undecided
        }
    } else {
        Verdict::Undecided
    };
    Trend { root_values: root_values.to_vec(), decrements, ratios, extrapolated_tail: tail, verdict }
}

/// Monte Carlo cross-check attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloCheck {
    pub t: f64,
    pub samples: usize,
    pub seed: u64,
    pub explosion_threshold: u64,
    pub exploded_fraction: f64,
    pub m_hat: f64,
    /// Three binomial standard errors.
    pub ci: f64,
    pub m_matrix: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticVerdict {
    pub alpha: f64,
    pub rule: VerdictRule,
    pub radii: Vec<usize>,
    pub v_sequence: HarmonicSequence,
    pub trend: Trend,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_alpha: Option<SecondAlpha>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarloCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondAlpha {
    pub alpha: f64,
    pub trend: Trend,
    pub verdict: Verdict,
    /// Both verdicts decided and different: a numerical red flag.
    pub disagreement: bool,
}

pub fn stochastic_verdict(
    fam: &GraphFamily,
    alpha: f64,
    exhaustion: &Exhaustion,
    rule: &VerdictRule,
    second_alpha: Option<f64>,
) -> Result<StochasticVerdict> {
    if !(rule.tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let seq = largest_alpha_harmonic(fam, alpha, exhaustion)?;
    let roots: Vec<f64> = seq.sections.iter().map(|s| s.root_value).collect();
    let trend = classify(&roots, rule);
    let verdict = trend.verdict;
    let second = match second_alpha {
        Some(a2) => {
            let s2 = largest_alpha_harmonic(fam, a2, exhaustion)?;
            let r2: Vec<f64> = s2.sections.iter().map(|s| s.root_value).collect();
            let t2 = classify(&r2, rule);
            let decided = |v: Verdict| v != Verdict::Undecided;
            Some(SecondAlpha {
                alpha: a2,
                verdict: t2.verdict,
                disagreement: decided(verdict) && decided(t2.verdict) && verdict != t2.verdict,
                trend: t2,
            })
        }
        None => None,
    };
    Ok(StochasticVerdict {
        alpha,
        rule: *rule,
        radii: exhaustion.radii.clone(),
        v_sequence: seq,
        trend,
        verdict,
        second_alpha: second,
        montecarlo: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureProbe {
    pub vertex: usize,
    pub quadrature: f64,
    pub v: f64,
    pub discrepancy: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureCheck {
    pub alpha: f64,
    pub radius: usize,
    pub size: usize,
    pub t_max: f64,
    pub panels: usize,
    pub probes: Vec<QuadratureProbe>,
    pub max_discrepancy: f64,
}

/// Compares `int_0^{t_max} alpha exp(-alpha t) (1 - M_t) dt` with `v_K` on the
/// largest section of the exhaustion. The integral is split into `panels`
/// equal panels, each integrated by adaptive double exponential quadrature.
pub fn w_quadrature_crosscheck(
    fam: &GraphFamily,
    alpha: f64,
    exhaustion: &Exhaustion,
    t_max: f64,
    panels: usize,
    probes: &[usize],
) -> Result<QuadratureCheck> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    if !((-alpha * t_max).exp() < 1e-10) {
        return Err(Error::InvalidArgument(format!(
            "t_max = {t_max} is too small: exp(-alpha t_max) must be below 1e-10"
        )));
    }
    let panels = panels.max(1);
    let k = exhaustion.sets.last().expect("nonempty exhaustion");
    let sec = crate::section::section(fam, k)?;
    let sd = sec.spectral()?;
    let v = harmonic_on(&sec, alpha)?;
    let probes: Vec<usize> = if probes.is_empty() { vec![exhaustion.root] } else { probes.to_vec() };
    let h = t_max / panels as f64;
    let mut out = Vec::new();
    for &x in &probes {
        let i = sec.position(x).ok_or_else(|| Error::InvalidArgument(format!("probe {x} is outside the section")))?;
        let hp = HeatProbe::new(&sd, &sec, i);
        let f = |t: f64| alpha * (-alpha * t).exp() * (1.0 - hp.m(t));
        let mut total = 0.0;
        let mut err = 0.0;
        let mut evals = 0u64;
        for p in 0..panels {
            let o = quadrature::double_exponential::integrate(f, p as f64 * h, (p + 1) as f64 * h, 1e-14 / panels as f64);
            total += o.integral;
            err += o.error_estimate;
            evals += o.num_function_evaluations as u64;
        }
        if !(err <= 1e-9) {
            return Err(Error::Quadrature(format!("error estimate {err:.3e} at vertex {x}")));
        }
        out.push(QuadratureProbe {
            vertex: x,
            quadrature: total,
            v: v[i],
            discrepancy: (total - v[i]).abs(),
            error_estimate: err,
            evaluations: evals,
        });
    }
    let max_discrepancy = out.iter().map(|p| p.discrepancy).fold(0.0, f64::max);
    Ok(QuadratureCheck {
        alpha,
        radius: *exhaustion.radii.last().unwrap(),
        size: sec.len(),
        t_max,
        panels,
        probes: out,
        max_discrepancy,
    })
}

/// Max-norm difference between `M_{t+s}` and
/// `exp(-s L_K) M_t + int_0^s exp(-r L_K)(c/m) dr` on one section.
pub fn semigroup_identity_check(sec: &DirichletSection, t: f64, s: f64) -> Result<f64> {
    let (a, b) = heat_content_on(sec, t + s)?;
    let (c, d) = heat_content_on(sec, t)?;
    let mt: Vec<f64> = c.iter().zip(&d).map(|(p, q)| p + q).collect();
    let (e, f) = sec.evolve(s, &mt, Some(&sec.killing_ratio()))?;
    Ok((0..sec.len()).map(|i| ((a[i] + b[i]) - (e[i] + f[i])).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossProbe {
    pub vertex: usize,
    pub t: f64,
    pub m: f64,
    /// Change of `M` from the previous section.
    pub change: f64,
    pub stabilized: bool,
    pub loss: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossReport {
    pub tol: f64,
    pub radius: usize,
    pub probes: Vec<LossProbe>,
    /// Stabilized probes with `M < 1 - tol`.
    pub witnesses: Vec<usize>,
    /// Probes without visible loss although a witness exists.
    pub violations: Vec<usize>,
    pub passed: bool,
}

/// If one stabilized probe shows `M_t(x) < 1 - tol`, every other probe must
/// show `1 - M > tol'` where `tol'` is its own change between the last two
/// sections (at least `1e-14`).
pub fn loss_propagation_check(
    fam: &GraphFamily,
    exhaustion: &Exhaustion,
    probes: &[(usize, f64)],
    tol: f64,
) -> Result<LossReport> {
    let sections = exhaustion.sections(fam)?;
    let last = sections.last().expect("nonempty exhaustion");
    let connected = match fam.as_graph() {
        Some(g) => g.is_connected(),
        None => last.is_connected(),
    };
    if !connected {
        return Err(Error::Hypothesis("the graph must be connected".into()));
    }
    let prev = if sections.len() >= 2 { Some(&sections[sections.len() - 2]) } else { None };
    let value = |sec: &DirichletSection, x: usize, t: f64| -> Result<Option<f64>> {
        match sec.position(x) {
            None => Ok(None),
            Some(i) => {
                let (a, b) = heat_content_on(sec, t)?;
                Ok(Some(a[i] + b[i]))
            }
        }
    };
    let mut out = Vec::new();
    for &(x, t) in probes {
        fam.check(x)?;
        let m = value(last, x, t)?.ok_or_else(|| Error::InvalidArgument(format!("probe {x} is outside the section")))?;
        let before = match prev {
            Some(p) => value(p, x, t)?,
            None => None,
        };
        let change = before.map_or(f64::INFINITY, |b| (m - b).abs());
        let stabilized = change <= tol;
        out.push(LossProbe { vertex: x, t, m, change, stabilized, loss: stabilized && m < 1.0 - tol });
    }
    let witnesses: Vec<usize> = out.iter().enumerate().filter(|e| e.1.loss).map(|e| e.0).collect();
    let violations: Vec<usize> = if witnesses.is_empty() {
        Vec::new()
    } else {
        out.iter()
            .enumerate()
            .filter(|(_, p)| !(1.0 - p.m > p.change.max(1e-14)))
            .map(|e| e.0)
            .collect()
    };
    Ok(LossReport {
        tol,
        radius: *exhaustion.radii.last().unwrap(),
        passed: violations.is_empty(),
        probes: out,
        witnesses,
        violations,
    })
}

/// Condition number of `L_K + alpha`; finite values certify that
/// `(L_K + alpha) u = 0` only has the trivial solution.
pub fn uniqueness_report(sec: &DirichletSection, alpha: f64) -> Result<f64> {
    let sd = sec.spectral()?;
    let v = sd.values();
    Ok((v[v.len() - 1] + alpha) / (v[0].max(0.0) + alpha))
}
