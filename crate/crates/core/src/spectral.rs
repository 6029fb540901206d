//! Eigenvalues of Dirichlet sections, boundedness, two-sided isoperimetric
//! eigenvalue bounds and estimates of the bottom of the essential spectrum.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::GraphFamily;
use crate::isoperimetry::{alpha_exact, alpha_upper, MeasureChoice, Region, ENUMERATION_CAP};
use crate::par;
use crate::section::{section, DirichletSection};

/// Eigenvalues within this distance of zero are reported as zero.
pub const ZERO_CLAMP: f64 = 1e-10;

/// Sorted eigenvalues of the section, clamped at zero.
pub fn eigenvalues(sec: &DirichletSection) -> Result<Vec<f64>> {
    let sd = sec.spectral()?;
    let mut out = Vec::with_capacity(sd.values().len());
    for &l in sd.values() {
        if l < -ZERO_CLAMP {
            return Err(Error::Solver(format!("negative eigenvalue {l:e} of a positive semidefinite matrix")));
        }
        out.push(if l.abs() <= ZERO_CLAMP { 0.0 } else { l });
    }
    Ok(out)
}

/// A nonnegative quantity that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum BoundednessVerdict {
    BoundedWitnessed,
    UnboundedTrend,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub probe_size: usize,
    /// `sup d` over the probe.
    pub probe_sup_d: f64,
    /// Largest `d` per distance shell of the probe, nearest shell first.
    pub shell_sup_d: Vec<f64>,
    /// Witnessed `sup d` over the whole graph, when known.
    pub sup_d: Extended,
    /// `2 sup d`, the operator norm bound.
    pub bound_2c: Extended,
    /// Largest eigenvalue of the full operator, explicit graphs only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator_norm: Option<f64>,
    pub verdict: BoundednessVerdict,
}

pub fn boundedness_report(fam: &GraphFamily, probe: &[usize]) -> Result<BoundednessReport> {
    if probe.is_empty() {
        return Err(Error::InvalidArgument("the probe must be nonempty".into()));
    }
    let mut keyed = Vec::with_capacity(probe.len());
    for &x in probe {
        let d = fam.full_degree(x)? / fam.measure(x)?;
        keyed.push((fam.distance_from_root(x)?.unwrap_or(usize::MAX), d));
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut shell_sup_d: Vec<f64> = Vec::new();
    let mut last = None;
    for (dist, d) in keyed {
        if last == Some(dist) {
            let s = shell_sup_d.last_mut().unwrap();
            *s = s.max(d);
        } else {
            shell_sup_d.push(d);
            last = Some(dist);
        }
    }
    let probe_sup_d = shell_sup_d.iter().copied().fold(0.0, f64::max);
    let bound = fam.sup_d_bound();
    let operator_norm = match fam {
        GraphFamily::Explicit { graph, .. } if graph.len() <= crate::DENSE_CAP => {
            let all: Vec<usize> = (0..graph.len()).collect();
            Some(eigenvalues(&section(fam, &all)?)?.last().copied().unwrap_or(0.0))
        }
        _ => None,
    };
    let growing = shell_sup_d.len() >= 3
        && shell_sup_d.windows(2).all(|w| w[1] >= w[0])
        && shell_sup_d.last() > shell_sup_d.first();
    let verdict = if bound.is_some() {
        BoundednessVerdict::BoundedWitnessed
    } else if growing {
        BoundednessVerdict::UnboundedTrend
    } else {
        BoundednessVerdict::Inconclusive
    };
    let sup_d = bound.map_or(Extended::Infinite, Extended::Finite);
    Ok(BoundednessReport {
        probe_size: probe.len(),
        probe_sup_d,
        shell_sup_d,
        bound_2c: bound.map_or(Extended::Infinite, |c| Extended::Finite(2.0 * c)),
        sup_d: if bound.is_some() { sup_d } else { Extended::Infinite },
        operator_norm,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, v: f64, slack: f64) -> bool {
        v >= self.lo - slack && v <= self.hi + slack
    }

    /// Smallest signed distance of `v` to the interval ends, negative when
    /// `v` lies outside.
    pub fn slack(&self, v: f64) -> f64 {
        (v - self.lo).min(self.hi - v)
    }
}

/// Upper end may be infinite when `D_U` is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sandwich {
    pub d_u: f64,
    pub big_d_u: Extended,
    pub alpha_n: f64,
    pub alpha_m: f64,
    pub n_band: Interval,
    /// Only when `D_U` is finite.
    pub m_band: Option<Interval>,
}

const RANGE_TOL: f64 = 1e-12;

/// `[d_U (1 - sqrt(1 - a_n^2)), D_U (1 + sqrt(1 - a_n^2))]` and, for finite
/// `D_U`, `[D_U - sqrt(D_U^2 - a_m^2), D_U + sqrt(D_U^2 - a_m^2)]`.
pub fn sandwich_bounds(d_u: f64, big_d_u: Extended, alpha_n: f64, alpha_m: f64) -> Result<Sandwich> {
    if !(alpha_n >= 0.0 && alpha_n <= 1.0 + RANGE_TOL) {
        return Err(Error::InvalidArgument(format!("alpha_n = {alpha_n} must lie in [0, 1]")));
    }
    if !(alpha_m >= 0.0) {
        return Err(Error::InvalidArgument(format!("alpha_m = {alpha_m} must be >= 0")));
    }
    let root_n = (1.0 - alpha_n.min(1.0).powi(2)).max(0.0).sqrt();
    let n_band = Interval {
        lo: d_u * (1.0 - root_n),
        hi: match big_d_u {
            Extended::Finite(d) => d * (1.0 + root_n),
            Extended::Infinite => f64::INFINITY,
        },
    };
    let m_band = match big_d_u {
        Extended::Finite(d) => {
            if alpha_m > d * (1.0 + RANGE_TOL) {
                return Err(Error::InvalidArgument(format!("alpha_m = {alpha_m} exceeds D_U = {d}")));
            }
            let r = (d * d - alpha_m * alpha_m).max(0.0).sqrt();
            Some(Interval { lo: d - r, hi: d + r })
        }
        Extended::Infinite => None,
    };
    Ok(Sandwich { d_u, big_d_u, alpha_n, alpha_m, n_band, m_band })
}

/// Sandwich for a section with `d_U`, `D_U` taken over its vertices.
pub fn cheeger_sandwich(sec: &DirichletSection, alpha_n: f64, alpha_m: f64) -> Result<Sandwich> {
    let d = sec.averaged_degree();
    let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = d.iter().copied().fold(0.0, f64::max);
    sandwich_bounds(lo, Extended::Finite(hi), alpha_n, alpha_m)
}

/// `alpha` with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaValue {
    pub value: f64,
    /// `exact` by enumeration or `upper-bound` from candidate sets.
    pub kind: &'static str,
    pub witness: Vec<usize>,
}

impl AlphaValue {
    pub fn is_exact(&self) -> bool {
        self.kind == "exact"
    }
}

/// Exact when `|U| <= 24`, otherwise an upper bound.
pub fn alpha_value(fam: &GraphFamily, u: &[usize], choice: MeasureChoice, budget: usize) -> Result<AlphaValue> {
    if u.len() <= ENUMERATION_CAP {
        let a = alpha_exact(fam, u, choice)?;
        Ok(AlphaValue { value: a.alpha, kind: "exact", witness: a.minimizer })
    } else {
        let a = alpha_upper(fam, &Region::Finite { vertices: u.to_vec() }, choice, budget)?;
        Ok(AlphaValue { value: a.value, kind: "upper-bound", witness: a.witness })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub vertices: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    pub bottom: f64,
    pub top: f64,
    pub alpha_m: AlphaValue,
    pub alpha_n: AlphaValue,
    pub d_u: f64,
    pub big_d_u: Extended,
    pub sandwich: Sandwich,
    /// Smallest slack of the spectrum inside each band, negative on a
    /// violation. Bands built from upper bounds of `alpha` are not
    /// guaranteed to hold.
    pub n_slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_slack: Option<f64>,
    /// `min eig <= alpha_m <= d_U`
    pub chain_holds: bool,
}

pub fn spectral_report(fam: &GraphFamily, u: &[usize], budget: usize) -> Result<SpectralReport> {
    let sec = section(fam, u)?;
    let ev = eigenvalues(&sec)?;
    let alpha_m = alpha_value(fam, u, MeasureChoice::M, budget)?;
    let alpha_n = alpha_value(fam, u, MeasureChoice::N, budget)?;
    let sandwich = cheeger_sandwich(&sec, alpha_n.value, alpha_m.value)?;
    let bottom = ev[0];
    let top = *ev.last().unwrap();
    let n_slack = sandwich.n_band.slack(bottom).min(sandwich.n_band.slack(top));
    let m_slack = sandwich.m_band.map(|b| b.slack(bottom).min(b.slack(top)));
    let tol = 1e-10;
    Ok(SpectralReport {
        vertices: sec.vertices().to_vec(),
        bottom,
        top,
        d_u: sandwich.d_u,
        big_d_u: sandwich.big_d_u,
        chain_holds: bottom <= alpha_m.value + tol && alpha_m.value <= sandwich.d_u + tol,
        eigenvalues: ev,
        alpha_m,
        alpha_n,
        sandwich,
        n_slack,
        m_slack,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssentialPoint {
    pub outer_radius: usize,
    pub inner_radius: Option<usize>,
    pub size: usize,
    pub bottom: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssentialEstimate {
    /// `EMPTY-ESSENTIAL` for finite graphs, else `UPPER-APPROXIMATION`.
    pub flag: &'static str,
    pub root: usize,
    pub deleted: usize,
    pub points: Vec<EssentialPoint>,
    /// Nonincreasing in the outer radius.
    pub monotone: bool,
    pub assumption: &'static str,
}

const COMPACT_PERTURBATION: &str =
    "L and L restricted to V minus K are assumed to be compact perturbations of each other (locally finite family)";

fn bottom_of(fam: &GraphFamily, set: &[usize]) -> Result<Option<(usize, f64)>> {
    if set.is_empty() {
        return Ok(None);
    }
    let sec = section(fam, set)?;
    let b = sec.bottom_eigenvalue()?;
    Ok(Some((sec.len(), if b.abs() <= ZERO_CLAMP { 0.0 } else { b })))
}

/// `inf sigma(L_{B_R \ K})` for each outer radius `R`; the sequence decreases
/// to `inf sigma(L_{V \ K})`.
pub fn essential_spectrum_estimate(
    fam: &GraphFamily,
    root: usize,
    deleted: &[usize],
    outer_radii: &[usize],
) -> Result<EssentialEstimate> {
    fam.check(root)?;
    for &x in deleted {
        fam.check(x)?;
    }
    if fam.is_finite() {
        return Ok(EssentialEstimate {
            flag: "EMPTY-ESSENTIAL",
            root,
            deleted: deleted.len(),
            points: Vec::new(),
            monotone: true,
            assumption: "finite-dimensional operator",
        });
    }
    let removed: std::collections::HashSet<usize> = deleted.iter().copied().collect();
    let results = par::map_slice(outer_radii, |&r| -> Result<Option<EssentialPoint>> {
        let set: Vec<usize> = fam.ball(root, r)?.into_iter().filter(|x| !removed.contains(x)).collect();
        Ok(bottom_of(fam, &set)?.map(|(size, bottom)| EssentialPoint { outer_radius: r, inner_radius: None, size, bottom }))
    });
    let points: Vec<EssentialPoint> = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let mut sorted = points.clone();
    sorted.sort_by_key(|p| p.outer_radius);
    let monotone = sorted.windows(2).all(|w| w[1].bottom <= w[0].bottom * (1.0 + 1e-9) + 1e-12);
    Ok(EssentialEstimate {
        flag: "UPPER-APPROXIMATION",
        root,
        deleted: removed.len(),
        points,
        monotone,
        assumption: COMPACT_PERTURBATION,
    })
}

/// `inf sigma(L_{B_R \ B_r})` for growing inner radii `r` at a fixed outer
/// radius; nondecreasing in `r`.
pub fn essential_inner_sweep(
    fam: &GraphFamily,
    root: usize,
    inner_radii: &[usize],
    outer_radius: usize,
) -> Result<EssentialEstimate> {
    fam.check(root)?;
    if fam.is_finite() {
        return essential_spectrum_estimate(fam, root, &[], &[outer_radius]);
    }
    let results = par::map_slice(inner_radii, |&r| -> Result<Option<EssentialPoint>> {
        let inner: std::collections::HashSet<usize> = fam.ball(root, r)?.into_iter().collect();
        let set: Vec<usize> = fam.ball(root, outer_radius)?.into_iter().filter(|x| !inner.contains(x)).collect();
        Ok(bottom_of(fam, &set)?.map(|(size, bottom)| EssentialPoint {
            outer_radius,
            inner_radius: Some(r),
            size,
            bottom,
        }))
    });
    let points: Vec<EssentialPoint> = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let monotone = points.windows(2).all(|w| w[1].bottom >= w[0].bottom * (1.0 - 1e-9) - 1e-12);
    Ok(EssentialEstimate {
        flag: "UPPER-APPROXIMATION",
        root,
        deleted: 0,
        points,
        monotone,
        assumption: COMPACT_PERTURBATION,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum EmptinessVerdict {
    EssentialLikelyEmpty,
    EssentialLikelyNonempty,
    Inconclusive,
    EmptyEssential,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmptinessStep {
    pub radius: usize,
    /// `inf d` over the sampled shell outside the ball.
    pub d_outside: f64,
    /// Upper bound for `alpha_n` of the complement of the ball.
    pub alpha_n_upper: f64,
    /// `inf sigma` of the annulus between the ball and the sampled shell.
    pub bottom: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmptinessReport {
    pub shell_width: usize,
    pub steps: Vec<EmptinessStep>,
    pub verdict: EmptinessVerdict,
    pub note: &'static str,
    pub assumption: &'static str,
}

/// Growth factor of `inf d` across the radii that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 4.0;
/// Relative change of `inf d` over the last radii that counts as bounded.
pub const BOUNDED_CHANGE: f64 = 1e-3;

/// Trend diagnostic for the emptiness of the essential spectrum. For each
/// radius `r` the vertices with distance in `(r, r + shell_width]` stand in
/// for `V \ B_r`.
pub fn emptiness_diagnostic(
    fam: &GraphFamily,
    root: usize,
    radii: &[usize],
    shell_width: usize,
    budget: usize,
) -> Result<EmptinessReport> {
    fam.check(root)?;
    let note = "trend diagnostic on finite data, not a proof";
    if fam.is_finite() {
        return Ok(EmptinessReport {
            shell_width,
            steps: Vec::new(),
            verdict: EmptinessVerdict::EmptyEssential,
            note,
            assumption: "finite-dimensional operator",
        });
    }
    let width = shell_width.max(1);
    let results = par::map_slice(radii, |&r| -> Result<EmptinessStep> {
        let inner = fam.ball(root, r)?;
        let inner_set: std::collections::HashSet<usize> = inner.iter().copied().collect();
        let shell: Vec<usize> =
            fam.ball(root, r + width)?.into_iter().filter(|x| !inner_set.contains(x)).collect();
        let mut d_outside = f64::INFINITY;
        for &x in &shell {
            d_outside = d_outside.min(fam.full_degree(x)? / fam.measure(x)?);
        }
        let alpha = alpha_upper(fam, &Region::Complement { deleted: inner, root }, MeasureChoice::N, budget)?;
        let bottom = bottom_of(fam, &shell)?.map_or(f64::NAN, |b| b.1);
        Ok(EmptinessStep { radius: r, d_outside, alpha_n_upper: alpha.value, bottom })
    });
    let steps: Vec<EmptinessStep> = results.into_iter().collect::<Result<_>>()?;
    let verdict = if steps.len() < 3 {
        EmptinessVerdict::Inconclusive
    } else {
        let d: Vec<f64> = steps.iter().map(|s| s.d_outside).collect();
        let b: Vec<f64> = steps.iter().map(|s| s.bottom).collect();
        let n = d.len();
        let increasing = d.windows(2).all(|w| w[1] >= w[0]) && b.windows(2).all(|w| w[1] >= w[0]);
        let flat = (d[n - 1] - d[n - 3]).abs() <= BOUNDED_CHANGE * d[n - 1].abs().max(1e-300);
        if increasing && d[n - 1] >= DIVERGENCE_FACTOR * d[0] && b[n - 1] > b[0] {
            EmptinessVerdict::EssentialLikelyEmpty
        } else if flat {
            EmptinessVerdict::EssentialLikelyNonempty
        } else {
            EmptinessVerdict::Inconclusive
        }
    };
    Ok(EmptinessReport { shell_width: width, steps, verdict, note, assumption: COMPACT_PERTURBATION })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use crate::{Law, MeasureLaw};
    use approx::assert_relative_eq;

    fn path3() -> GraphFamily {
        GraphFamily::explicit(WeightedGraph::path(3))
    }

    #[test]
    fn eigenvalue_examples() {
        let two = GraphFamily::explicit(WeightedGraph::path(2));
        let ev = eigenvalues(&section(&two, &[0, 1]).unwrap()).unwrap();
        assert_eq!(ev[0], 0.0);
        assert_relative_eq!(ev[1], 2.0, epsilon = 1e-14);
        let ev = eigenvalues(&section(&path3(), &[0, 1]).unwrap()).unwrap();
        assert_relative_eq!(ev[0], (3.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_relative_eq!(ev[1], (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        let one = GraphFamily::explicit(WeightedGraph::new(&[1.0], &[1.0], &[]).unwrap());
        assert_eq!(eigenvalues(&section(&one, &[0]).unwrap()).unwrap(), vec![1.0]);
    }

    #[test]
    fn boundedness_examples() {
        let two = GraphFamily::explicit(WeightedGraph::path(2));
        let r = boundedness_report(&two, &[0, 1]).unwrap();
        assert_eq!(r.sup_d, Extended::Finite(1.0));
        assert_eq!(r.bound_2c, Extended::Finite(2.0));
        assert_relative_eq!(r.operator_norm.unwrap(), 2.0, epsilon = 1e-14);
        assert_eq!(r.verdict, BoundednessVerdict::BoundedWitnessed);
        let linear = GraphFamily::poly_ray(1.0);
        let r = boundedness_report(&linear, &linear.ball(0, 50).unwrap()).unwrap();
        assert_eq!(r.verdict, BoundednessVerdict::UnboundedTrend);
        assert_eq!(r.probe_sup_d, 101.0);
        let flat = GraphFamily::poly_ray(0.0);
        let r = boundedness_report(&flat, &flat.ball(0, 10).unwrap()).unwrap();
        assert_eq!(r.verdict, BoundednessVerdict::BoundedWitnessed);
        assert_eq!(r.sup_d, Extended::Finite(2.0));
    }

    #[test]
    fn sandwich_examples() {
        let sec = section(&path3(), &[0, 1]).unwrap();
        let s = cheeger_sandwich(&sec, 1.0 / 3.0, 0.5).unwrap();
        assert_relative_eq!(s.n_band.lo, 0.0572, epsilon = 1e-4);
        assert_relative_eq!(s.n_band.hi, 3.8856, epsilon = 1e-4);
        let m = s.m_band.unwrap();
        assert_relative_eq!(m.lo, 0.0635, epsilon = 1e-4);
        assert_relative_eq!(m.hi, 3.9365, epsilon = 1e-4);
        let s = cheeger_sandwich(&sec, 1.0, 0.5).unwrap();
        assert_eq!((s.n_band.lo, s.n_band.hi), (1.0, 2.0));
        assert!(cheeger_sandwich(&sec, 1.5, 0.5).is_err());
        assert!(cheeger_sandwich(&sec, 0.5, 2.5).is_err());
        let s = sandwich_bounds(1.0, Extended::Infinite, 0.5, 0.5).unwrap();
        assert!(s.m_band.is_none() && s.n_band.hi.is_infinite());
        let r = spectral_report(&path3(), &[0, 1], 64).unwrap();
        assert_relative_eq!(r.alpha_n.value, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(r.alpha_m.value, 0.5, epsilon = 1e-15);
        assert!(r.chain_holds && r.n_slack >= 0.0 && r.m_slack.unwrap() >= 0.0);
    }

    #[test]
    fn essential_examples() {
        let e = essential_spectrum_estimate(&path3(), 0, &[], &[1, 2]).unwrap();
        assert_eq!(e.flag, "EMPTY-ESSENTIAL");
        let flat = GraphFamily::poly_ray(0.0);
        let k = flat.ball(0, 5).unwrap();
        let e = essential_spectrum_estimate(&flat, 0, &k, &[10, 20, 40, 80]).unwrap();
        assert!(e.monotone);
        let b: Vec<f64> = e.points.iter().map(|p| p.bottom).collect();
        assert!(b.windows(2).all(|w| w[1] < w[0]) && b[3] < 2e-3);
        let cubic = GraphFamily::poly_ray(3.0);
        let e = essential_inner_sweep(&cubic, 0, &[0, 1, 2, 3], 200).unwrap();
        assert!(e.monotone);
        assert!(e.points.windows(2).all(|w| w[1].bottom > w[0].bottom));
    }

    #[test]
    fn emptiness_examples() {
        let cubic = GraphFamily::poly_ray(3.0);
        let r = emptiness_diagnostic(&cubic, 0, &[4, 8, 16, 32], 16, 32).unwrap();
        assert_eq!(r.verdict, EmptinessVerdict::EssentialLikelyEmpty);
        let flat = GraphFamily::poly_ray(0.0);
        let r = emptiness_diagnostic(&flat, 0, &[4, 8, 16, 32], 16, 32).unwrap();
        assert_eq!(r.verdict, EmptinessVerdict::EssentialLikelyNonempty);
        let normalized = GraphFamily::Radial(
            crate::family::RadialFamily::ray(
                Law::Poly { power: 2.0, scale: 1.0 },
                MeasureLaw::Normalized { scale: 1.0 },
                Law::Const { value: 0.0 },
            )
            .unwrap(),
        );
        let r = emptiness_diagnostic(&normalized, 0, &[4, 8, 16, 32], 16, 32).unwrap();
        assert!(r.steps.iter().all(|s| (s.d_outside - 1.0).abs() < 1e-15));
        assert_eq!(r.verdict, EmptinessVerdict::EssentialLikelyNonempty);
    }
}
