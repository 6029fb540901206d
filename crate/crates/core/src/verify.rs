//! Property suite over random or user supplied finite graphs.
//!
//! Every property maps one instance to a nonnegative discrepancy (zero when
//! the property holds exactly) or skips it when its hypotheses fail. A
//! property passes when the largest discrepancy stays within its tolerance.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use serde::Serialize;

use crate::corpus::{random_graph, random_nonnegative, random_subset, CorpusConfig};
use crate::error::{Error, Result};
use crate::family::GraphFamily;
use crate::graph::{validate, GraphInput, VertexFunction, WeightedGraph};
use crate::heat::{harmonic_on, heat_content_on, semigroup_identity_check};
use crate::isoperimetry::{alpha_exact, coarea_first, coarea_second, MeasureChoice};
use crate::par;
use crate::section::{section, DirichletSection};
use crate::spectral::{cheeger_sandwich, eigenvalues, ZERO_CLAMP};

/// `(name, tolerance, description)`
pub const PROPERTIES: &[(&str, f64, &str)] = &[
    ("symmetry", 0.0, "input satisfies every weighted-graph axiom"),
    ("coarea", 1e-12, "both co-area identities, relative error"),
    ("chain", 1e-10, "min eig(L_U) <= alpha_m(U) <= d_U"),
    ("sandwich", 1e-9, "spectrum of L_U inside both isoperimetric bands"),
    ("isoperimetric", 1e-9, "Q^2 - 2|phi|_n^2 Q + alpha^2 |phi|_m^4 <= 0 for alpha_m and for m = n"),
    ("normalized", 1e-9, "spectrum for m = n inside [1 - r, 1 + r], r = sqrt(1 - alpha_n^2)"),
    ("amenability", 0.0, "min eig(L_U) = 0 iff alpha_m(U) = 0"),
    ("boundedness", 1e-10, "|L| <= 2 sup d"),
    ("monotonicity", 1e-10, "resolvent and semigroup grow with the domain"),
    ("resolvent", 1e-10, "alpha R 1 + R (g + c/m) = 1"),
    ("positivity", 0.0, "resolvent and semigroup positivity improving on connected sections"),
    ("heat", 1e-10, "0 <= M_t <= 1, M_t and v_K monotone, v_K identity"),
    ("semigroup", 1e-10, "M_{t+s} = exp(-sL) M_t + int_0^s exp(-rL) c/m dr"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub instances: usize,
    pub max_vertices: usize,
    pub seed: u64,
    /// Restrict to these property names.
    pub only: Option<Vec<String>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { instances: 200, max_vertices: 12, seed: 0, only: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub property: &'static str,
    pub description: &'static str,
    pub instances: usize,
    pub skipped: usize,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub messages: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub source: &'static str,
    pub seed: u64,
    pub properties: Vec<PropertyOutcome>,
    pub passed: bool,
}

type Check = fn(&WeightedGraph, &mut Pcg64) -> Result<Option<f64>>;

fn check_of(name: &str) -> Check {
    match name {
        "symmetry" => symmetry,
        "coarea" => coarea,
        "chain" => chain,
        "sandwich" => sandwich,
        "isoperimetric" => isoperimetric,
        "normalized" => normalized,
        "amenability" => amenability,
        "boundedness" => boundedness,
        "monotonicity" => monotonicity,
        "resolvent" => resolvent,
        "positivity" => positivity,
        "heat" => heat,
        "semigroup" => semigroup,
        _ => unreachable!("unknown property"),
    }
}

fn selected(opts: &VerifyOptions) -> Result<Vec<&'static (&'static str, f64, &'static str)>> {
    match &opts.only {
        None => Ok(PROPERTIES.iter().collect()),
        Some(names) => names
            .iter()
            .map(|n| {
                PROPERTIES
                    .iter()
                    .find(|p| p.0 == n.as_str())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown property {n:?}")))
            })
            .collect(),
    }
}

/// Runs the suite on `input` (every instance uses the same graph with fresh
/// random subsets and functions) or, without input, on random graphs.
/// Invalid input fails `symmetry` and skips everything else.
pub fn verify(input: Option<&GraphInput>, opts: &VerifyOptions) -> Result<VerifySummary> {
    let props = selected(opts)?;
    let cfg = CorpusConfig { max_vertices: opts.max_vertices.max(1), killing_zero_prob: 0.25, ..Default::default() };
    let fixed: Option<std::result::Result<WeightedGraph, Vec<String>>> = input.map(|inp| {
        let v = validate(inp);
        if v.is_empty() {
            inp.build().map_err(|e| vec![e.to_string()])
        } else {
            Err(v.iter().map(|x| x.to_string()).collect())
        }
    });
    let mut outcomes = Vec::new();
    for (pi, &&(name, tol, description)) in props.iter().enumerate() {
        if let Some(Err(violations)) = &fixed {
            let failed = name == "symmetry";
            outcomes.push(PropertyOutcome {
                property: name,
                description,
                instances: usize::from(failed),
                skipped: usize::from(!failed),
                max_discrepancy: if failed { violations.len() as f64 } else { 0.0 },
                tolerance: tol,
                verdict: if failed { "FAIL" } else { "SKIPPED" },
                messages: if failed { violations.clone() } else { vec!["invalid input".into()] },
            });
            continue;
        }
        let check = check_of(name);
        let results = par::map_range(opts.instances, |i| -> Result<Option<f64>> {
            let mut rng = Pcg64::seed_from_u64(opts.seed ^ ((pi as u64) << 40) ^ (i as u64).wrapping_mul(0x9e37_79b9));
            match &fixed {
                Some(Ok(g)) => check(g, &mut rng),
                _ => {
                    let g = random_graph(&mut rng, &cfg);
                    check(&g, &mut rng)
                }
            }
        });
        let mut max = 0.0f64;
        let mut done = 0;
        let mut skipped = 0;
        let mut messages = Vec::new();
        for r in results {
            match r {
                Ok(Some(d)) => {
                    done += 1;
                    max = max.max(if d.is_nan() { f64::INFINITY } else { d });
                }
                Ok(None) => skipped += 1,
                Err(e) => {
                    done += 1;
                    max = f64::INFINITY;
                    if messages.len() < 5 {
                        messages.push(e.to_string());
                    }
                }
            }
        }
        outcomes.push(PropertyOutcome {
            property: name,
            description,
            instances: done,
            skipped,
            max_discrepancy: max,
            tolerance: tol,
            verdict: if max <= tol { "PASS" } else { "FAIL" },
            messages,
        });
    }
    let passed = outcomes.iter().all(|o| o.verdict != "FAIL");
    Ok(VerifySummary { source: if input.is_some() { "input" } else { "random" }, seed: opts.seed, properties: outcomes, passed })
}

/// `None` when `n` vanishes on `U`, where the ratio is undefined.
fn alpha_n(fam: &GraphFamily, u: &[usize]) -> Result<Option<f64>> {
    for &x in u {
        if fam.full_degree(x)? > 0.0 {
            return Ok(Some(alpha_exact(fam, u, MeasureChoice::N)?.alpha));
        }
    }
    Ok(None)
}

fn fam(g: &WeightedGraph) -> GraphFamily {
    GraphFamily::explicit(g.clone())
}

fn all(g: &WeightedGraph) -> Vec<usize> {
    (0..g.len()).collect()
}

fn symmetry(g: &WeightedGraph, _: &mut Pcg64) -> Result<Option<f64>> {
    let mut input = GraphInput::new(g.killing(), g.measure());
    for &(x, y, b) in g.edges() {
        input = input.edge(x, y, b);
    }
    let mut bad = validate(&input).len();
    for x in 0..g.len() {
        for &(y, b) in g.neighbors(x) {
            if g.weight(y, x) != b {
                bad += 1;
            }
        }
    }
    Ok(Some(bad as f64))
}

fn coarea(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let f = VertexFunction::from_dense(&random_nonnegative(rng, g.len(), 3.0));
    let fam = fam(g);
    let a = coarea_first(&fam, &f, &all(g))?;
    let b = coarea_second(&fam, &f)?;
    Ok(Some(a.relative_error().max(b.relative_error())))
}

fn chain(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let fam = fam(g);
    let u = random_subset(rng, g.len());
    let sec = section(&fam, &u)?;
    let bottom = eigenvalues(&sec)?[0];
    let a = alpha_exact(&fam, &u, MeasureChoice::M)?.alpha;
    let d_u = sec.averaged_degree().into_iter().fold(f64::INFINITY, f64::min);
    Ok(Some((bottom - a).max(a - d_u).max(0.0)))
}

fn sandwich(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let fam = fam(g);
    let u = random_subset(rng, g.len());
    let sec = section(&fam, &u)?;
    let ev = eigenvalues(&sec)?;
    let Some(an) = alpha_n(&fam, &u)? else { return Ok(None) };
    let am = alpha_exact(&fam, &u, MeasureChoice::M)?.alpha;
    let s = cheeger_sandwich(&sec, an, am)?;
    let mut worst = 0.0f64;
    for &l in &ev {
        worst = worst.max(-s.n_band.slack(l));
        if let Some(m) = s.m_band {
            worst = worst.max(-m.slack(l));
        }
    }
    Ok(Some(worst))
}

/// `Q(phi)` on a section, `phi` given in section order.
fn form(sec: &DirichletSection, phi: &[f64]) -> f64 {
    let lphi = sec.laplacian() * nalgebra::DVector::from_column_slice(phi);
    (0..sec.len()).map(|i| sec.measure()[i] * phi[i] * lphi[i]).sum()
}

fn isoperimetric_residual(g: &WeightedGraph, u: &[usize], phi: &[f64], choice: MeasureChoice) -> Result<f64> {
    let fam = fam(g);
    let sec = section(&fam, u)?;
    let n2: f64 = (0..sec.len()).map(|i| sec.degree()[i] * phi[i] * phi[i]).sum();
    if n2 == 0.0 {
        return Ok(0.0);
    }
    let scale = n2.sqrt();
    let phi: Vec<f64> = phi.iter().map(|v| v / scale).collect();
    let q = form(&sec, &phi);
    let m2: f64 = (0..sec.len()).map(|i| sec.measure()[i] * phi[i] * phi[i]).sum();
    let a = alpha_exact(&fam, u, choice)?.alpha;
    let w = match choice {
        MeasureChoice::M => m2,
        MeasureChoice::N => 1.0,
    };
    Ok((q * q - 2.0 * q + a * a * w * w).max(0.0))
}

fn isoperimetric(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let u = random_subset(rng, g.len());
    let phi: Vec<f64> = (0..u.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let r1 = isoperimetric_residual(g, &u, &phi, MeasureChoice::M)?;
    if alpha_n(&fam(g), &u)?.is_none() {
        return Ok(Some(r1));
    }
    let r2 = isoperimetric_residual(g, &u, &phi, MeasureChoice::N)?;
    Ok(Some(r1.max(r2)))
}

fn normalized(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    if g.degrees().iter().any(|&n| n <= 0.0) {
        return Ok(None);
    }
    let h = g.normalized()?;
    let fam = fam(&h);
    let u = random_subset(rng, h.len());
    let ev = eigenvalues(&section(&fam, &u)?)?;
    let a = alpha_exact(&fam, &u, MeasureChoice::N)?.alpha;
    let r = (1.0 - a.min(1.0).powi(2)).sqrt();
    Ok(Some(ev.iter().map(|&l| (1.0 - r - l).max(l - 1.0 - r)).fold(0.0, f64::max)))
}

fn amenability(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let fam = fam(g);
    // whole components make alpha = 0 reachable when c vanishes there
    let comps = g.connected_components();
    let u = if rng.random::<bool>() {
        comps[rng.random_range(0..comps.len())].clone()
    } else {
        random_subset(rng, g.len())
    };
    let bottom = eigenvalues(&section(&fam, &u)?)?[0];
    let a = alpha_exact(&fam, &u, MeasureChoice::M)?.alpha;
    Ok(Some(if (bottom <= ZERO_CLAMP) == (a == 0.0) { 0.0 } else { 1.0 }))
}

fn boundedness(g: &WeightedGraph, _: &mut Pcg64) -> Result<Option<f64>> {
    let ev = eigenvalues(&section(&fam(g), &all(g))?)?;
    Ok(Some((ev.last().unwrap() - 2.0 * g.sup_averaged_degree()).max(0.0)))
}

fn nested(g: &WeightedGraph, rng: &mut Pcg64) -> (Vec<usize>, Vec<usize>) {
    let big = random_subset(rng, g.len());
    let small: Vec<usize> = big.iter().copied().filter(|_| rng.random::<f64>() < 0.6).collect();
    let small = if small.is_empty() { vec![big[0]] } else { small };
    (small, big)
}

fn monotonicity(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let fam = fam(g);
    let (small, big) = nested(g, rng);
    let s1 = section(&fam, &small)?;
    let s2 = section(&fam, &big)?;
    let f1 = random_nonnegative(rng, s1.len(), 1.0);
    let f2 = s2.vector(|x| s1.position(x).map_or(0.0, |i| f1[i]));
    let alpha = rng.random_range(0.05..5.0);
    let t = rng.random_range(0.0..3.0);
    let (r1, r2) = (s1.resolvent_apply(alpha, &f1)?, s2.resolvent_apply(alpha, &f2)?);
    let (e1, e2) = (s1.semigroup_apply(t, &f1)?, s2.semigroup_apply(t, &f2)?);
    let mut worst = 0.0f64;
    for (i, &x) in s1.vertices().iter().enumerate() {
        let j = s2.position(x).unwrap();
        worst = worst.max(r1[i] - r2[j]).max(e1[i] - e2[j]);
    }
    Ok(Some(worst))
}

fn resolvent(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let sec = section(&fam(g), &random_subset(rng, g.len()))?;
    let alpha = rng.random_range(0.05..5.0);
    let r = sec.resolvent(alpha)?;
    let a = r.apply(&sec.ones());
    let h: Vec<f64> = sec.boundary().iter().zip(sec.killing_ratio()).map(|(g, c)| g + c).collect();
    let b = r.apply(&h);
    Ok(Some((0..sec.len()).map(|i| (alpha * a[i] + b[i] - 1.0).abs()).fold(0.0, f64::max)))
}

fn positivity(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let sec = section(&fam(g), &random_subset(rng, g.len()))?;
    if !sec.is_connected() {
        return Ok(None);
    }
    Ok(Some(if sec.positivity_certificate(1.0, 1.0).certified() { 0.0 } else { 1.0 }))
}

fn heat(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let fam = fam(g);
    let (small, big) = nested(g, rng);
    let s1 = section(&fam, &small)?;
    let s2 = section(&fam, &big)?;
    let t = rng.random_range(0.0..4.0);
    let alpha = rng.random_range(0.1..4.0);
    let (a1, b1) = heat_content_on(&s1, t)?;
    let (a2, b2) = heat_content_on(&s2, t)?;
    let v1 = harmonic_on(&s1, alpha)?;
    let v2 = harmonic_on(&s2, alpha)?;
    let mut worst = 0.0f64;
    for j in 0..s2.len() {
        let m = a2[j] + b2[j];
        worst = worst.max(-m).max(m - 1.0).max(-v2[j]).max(v2[j] - 1.0);
    }
    for (i, &x) in s1.vertices().iter().enumerate() {
        let j = s2.position(x).unwrap();
        worst = worst.max((a1[i] + b1[i]) - (a2[j] + b2[j])).max(v2[j] - v1[i]);
    }
    let r = s2.resolvent(alpha)?;
    let ra = r.apply(&s2.ones());
    let rc = r.apply(&s2.killing_ratio());
    for j in 0..s2.len() {
        worst = worst.max((v2[j] - (1.0 - alpha * ra[j] - rc[j])).abs());
    }
    Ok(Some(worst))
}

fn semigroup(g: &WeightedGraph, rng: &mut Pcg64) -> Result<Option<f64>> {
    let sec = section(&fam(g), &random_subset(rng, g.len()))?;
    let t = rng.random_range(0.0..3.0);
    let s = rng.random_range(0.0..3.0);
    Ok(Some(semigroup_identity_check(&sec, t, s)?))
}
