//! Acceptance criteria at their pinned sizes and tolerances. Each test prints
//! one `criterion N: PASS|FAIL` line and the tests run one at a time so the
//! runtime limits measure a single criterion.

use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use graphlap::corpus::{random_graph, random_nonnegative, random_subset, CorpusConfig};
use graphlap::graph::VertexFunction;
use graphlap::heat::{heat_content, heat_content_on, stochastic_verdict, w_quadrature_crosscheck, Verdict, VerdictRule};
use graphlap::isoperimetry::{alpha_exact, coarea_first, coarea_second, MeasureChoice};
use graphlap::markov::{estimate_heat_quantities, simulate, DEFAULT_EXPLOSION_THRESHOLD};
use graphlap::section::{ball_exhaustion, section};
use graphlap::spectral::{cheeger_sandwich, eigenvalues, essential_inner_sweep, essential_spectrum_estimate, ZERO_CLAMP};
use graphlap::{GraphFamily, WeightedGraph};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Prints the verdict line and fails the test on FAIL.
fn report(id: &str, pass: bool, limit: Option<f64>, start: Instant, detail: String) {
    let secs = start.elapsed().as_secs_f64();
    let in_time = limit.is_none_or(|l| secs < l);
    let ok = pass && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" (limit {l} s)"));
    println!("criterion {id}: {} [{detail}; {secs:.2} s{budget}]", if ok { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its runtime limit: {secs:.2} s");
}

fn explicit(g: &WeightedGraph) -> GraphFamily {
    GraphFamily::explicit(g.clone())
}

fn ray(power: f64) -> GraphFamily {
    GraphFamily::poly_ray(power)
}

#[test]
fn criterion_01_coarea() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = Pcg64::seed_from_u64(1);
    let cfg = CorpusConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = random_graph(&mut rng, &cfg);
        let fam = explicit(&g);
        let f = VertexFunction::from_dense(&random_nonnegative(&mut rng, g.len(), 5.0));
        let all: Vec<usize> = (0..g.len()).collect();
        let a = coarea_first(&fam, &f, &all).unwrap();
        let b = coarea_second(&fam, &f).unwrap();
        worst = worst.max(a.relative_error()).max(b.relative_error());
    }
    report("1", worst < 1e-12, Some(10.0), start, format!("max relative error {worst:e} over 1000 graphs"));
}

#[test]
fn criterion_02_chain() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = Pcg64::seed_from_u64(2);
    let cfg = CorpusConfig::default();
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = random_graph(&mut rng, &cfg);
        let fam = explicit(&g);
        let u = random_subset(&mut rng, g.len());
        let sec = section(&fam, &u).unwrap();
        let bottom = eigenvalues(&sec).unwrap()[0];
        let a = alpha_exact(&fam, &u, MeasureChoice::M).unwrap().alpha;
        let d_u = sec.averaged_degree().into_iter().fold(f64::INFINITY, f64::min);
        let excess = (bottom - a).max(a - d_u);
        worst = worst.max(excess);
        if excess > 1e-10 {
            violations += 1;
        }
    }
    report("2", violations == 0, Some(30.0), start, format!("{violations} violations, worst excess {worst:e}"));
}

#[test]
fn criterion_03_sandwich() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = Pcg64::seed_from_u64(3);
    let cfg = CorpusConfig::default();
    let mut min_slack = f64::INFINITY;
    let mut m_bands = 0;
    let mut done = 0;
    while done < 500 {
        let g = random_graph(&mut rng, &cfg);
        let fam = explicit(&g);
        let u = random_subset(&mut rng, g.len());
        // alpha_n needs n > 0 somewhere on U
        if u.iter().all(|&x| g.degrees()[x] == 0.0) {
            continue;
        }
        done += 1;
        let sec = section(&fam, &u).unwrap();
        let an = alpha_exact(&fam, &u, MeasureChoice::N).unwrap().alpha;
        let am = alpha_exact(&fam, &u, MeasureChoice::M).unwrap().alpha;
        let s = cheeger_sandwich(&sec, an, am).unwrap();
        for l in eigenvalues(&sec).unwrap() {
            min_slack = min_slack.min(s.n_band.slack(l));
            if let Some(b) = s.m_band {
                min_slack = min_slack.min(b.slack(l));
            }
        }
        m_bands += usize::from(s.m_band.is_some());
    }
    report(
        "3",
        min_slack >= -1e-9,
        Some(60.0),
        start,
        format!("min slack {min_slack:e}, m-band checked on {m_bands}/500"),
    );
}

#[test]
fn criterion_04_amenability() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = Pcg64::seed_from_u64(4);
    // half of the sample without killing so that both sides of the
    // equivalence occur
    let cfg = CorpusConfig { max_vertices: 8, killing_zero_prob: 0.5, ..Default::default() };
    let (mut connected, mut zeros, mut bad_iff, mut bad_converse) = (0, 0, 0, 0);
    for _ in 0..200 {
        let g = random_graph(&mut rng, &cfg);
        let fam = explicit(&g);
        let u: Vec<usize> = (0..g.len()).collect();
        let bottom = eigenvalues(&section(&fam, &u).unwrap()).unwrap()[0];
        let a = alpha_exact(&fam, &u, MeasureChoice::M).unwrap().alpha;
        let zero_eig = bottom.abs() <= ZERO_CLAMP;
        if a == 0.0 && !zero_eig {
            bad_converse += 1;
        }
        if g.is_connected() {
            connected += 1;
            zeros += usize::from(a == 0.0);
            if zero_eig != (a == 0.0) {
                bad_iff += 1;
            }
        }
    }
    report(
        "4",
        bad_iff == 0 && bad_converse == 0 && zeros > 0 && zeros < connected,
        None,
        start,
        format!("{connected} connected graphs, {zeros} with alpha = 0, {bad_iff} iff failures, {bad_converse} converse failures"),
    );
}

#[test]
fn criterion_05_boundedness() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = Pcg64::seed_from_u64(5);
    let cfg = CorpusConfig::default();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let g = random_graph(&mut rng, &cfg);
        let ev = eigenvalues(&section(&explicit(&g), &(0..g.len()).collect::<Vec<_>>()).unwrap()).unwrap();
        worst = worst.max(ev.last().unwrap() - 2.0 * g.sup_averaged_degree());
    }
    let two = WeightedGraph::new(&[0.0, 0.0], &[1.0, 1.0], &[(0, 1, 1.0)]).unwrap();
    let norm = *eigenvalues(&section(&explicit(&two), &[0, 1]).unwrap()).unwrap().last().unwrap();
    let sharp = norm == 2.0 && two.sup_averaged_degree() == 1.0;
    report(
        "5",
        worst <= 1e-10 && sharp,
        None,
        start,
        format!("max |L| - 2 sup d = {worst:e}; two-vertex norm {norm}"),
    );
}

#[test]
fn criterion_06_monotonicity() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = Pcg64::seed_from_u64(6);
    let cfg = CorpusConfig { min_vertices: 2, ..Default::default() };
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let g = random_graph(&mut rng, &cfg);
        let fam = explicit(&g);
        let big = random_subset(&mut rng, g.len());
        let mut small: Vec<usize> = big.iter().copied().filter(|_| rng.random::<f64>() < 0.6).collect();
        if small.is_empty() {
            small.push(big[0]);
        }
        let s1 = section(&fam, &small).unwrap();
        let s2 = section(&fam, &big).unwrap();
        let f1 = random_nonnegative(&mut rng, s1.len(), 1.0);
        let f2 = s2.vector(|x| s1.position(x).map_or(0.0, |i| f1[i]));
        let alpha = rng.random_range(0.05..5.0);
        let t = rng.random_range(0.0..3.0);
        let (r1, r2) = (s1.resolvent_apply(alpha, &f1).unwrap(), s2.resolvent_apply(alpha, &f2).unwrap());
        let (e1, e2) = (s1.semigroup_apply(t, &f1).unwrap(), s2.semigroup_apply(t, &f2).unwrap());
        for (i, &x) in s1.vertices().iter().enumerate() {
            let j = s2.position(x).unwrap();
            worst = worst.max(r1[i] - r2[j]).max(e1[i] - e2[j]);
        }
    }
    // resolvent along an exhaustion of an infinite family: nondecreasing in K
    let fam = ray(1.0);
    let ex = ball_exhaustion(&fam, 0, &[4, 8, 16, 32, 64, 128]).unwrap();
    let roots: Vec<f64> = ex
        .sections(&fam)
        .unwrap()
        .iter()
        .map(|s| s.resolvent_apply(1.0, &s.ones()).unwrap()[0])
        .collect();
    let seq_drop = roots.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    report(
        "6",
        worst <= 1e-10 && seq_drop <= 1e-10,
        None,
        start,
        format!("max violation {worst:e} on 200 pairs; resolvent sequence at root {roots:?}"),
    );
}

#[test]
fn criterion_07_positivity() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = Pcg64::seed_from_u64(7);
    let cfg = CorpusConfig { connected: true, ..Default::default() };
    let (mut done, mut certified, mut min_entry) = (0, 0, f64::INFINITY);
    while done < 200 {
        let g = random_graph(&mut rng, &cfg);
        let fam = explicit(&g);
        let k = random_subset(&mut rng, g.len());
        let sec = section(&fam, &k).unwrap();
        if !sec.is_connected() {
            continue;
        }
        done += 1;
        let r = sec.resolvent(1.0).unwrap().matrix();
        let p = sec.spectral().unwrap().semigroup_matrix(1.0);
        min_entry = min_entry.min(r.min()).min(p.min());
        certified += usize::from(sec.positivity_certificate(1.0, 1.0).certified());
    }
    report(
        "7",
        min_entry > 0.0 && certified == 200,
        None,
        start,
        format!("min entry {min_entry:e}, {certified}/200 certified"),
    );
}

const RADII: [usize; 6] = [16, 32, 64, 128, 256, 512];

#[test]
fn criterion_08_dichotomy() {
    let _g = serial();
    let start = Instant::now();
    let rule = VerdictRule { tol: 1e-6, ..Default::default() };
    let v1 = stochastic_verdict(&ray(1.0), 1.0, &ball_exhaustion(&ray(1.0), 0, &RADII).unwrap(), &rule, None).unwrap();
    let v3 = stochastic_verdict(&ray(3.0), 1.0, &ball_exhaustion(&ray(3.0), 0, &RADII).unwrap(), &rule, None).unwrap();
    report(
        "8",
        v1.verdict == Verdict::Sc && v3.verdict == Verdict::Si,
        Some(60.0),
        start,
        format!(
            "p=1 {:?} (v = {:e}), p=3 {:?} (v = {})",
            v1.verdict,
            v1.trend.root_values.last().unwrap(),
            v3.verdict,
            v3.trend.root_values.last().unwrap()
        ),
    );
}

/// Agreement to `digits` significant digits.
fn same_digits(a: f64, b: f64, digits: i32) -> bool {
    let round = |x: f64| {
        let e = x.abs().log10().floor() as i32 - digits + 1;
        (x / 10f64.powi(e)).round() * 10f64.powi(e)
    };
    round(a) == round(b)
}

#[test]
fn criterion_08b_si_value_four_digits() {
    let _g = serial();
    let start = Instant::now();
    let fam = ray(3.0);
    let rule = VerdictRule { tol: 1e-6, ..Default::default() };
    let v = stochastic_verdict(&fam, 1.0, &ball_exhaustion(&fam, 0, &RADII).unwrap(), &rule, None).unwrap();
    let r = &v.trend.root_values;
    let (a, b) = (r[r.len() - 2], r[r.len() - 1]);
    report(
        "8b",
        same_digits(a, b, 4),
        Some(60.0),
        start,
        format!("v(0) = {a} at R = 256, {b} at R = 512"),
    );
}

#[test]
fn criterion_09_quadrature() {
    let _g = serial();
    let start = Instant::now();
    let fam = ray(3.0);
    let ex = ball_exhaustion(&fam, 0, &[512]).unwrap();
    let q = w_quadrature_crosscheck(&fam, 1.0, &ex, 40.0, 40, &[0]).unwrap();
    report("9", q.max_discrepancy < 1e-6, None, start, format!("discrepancy {:e}", q.max_discrepancy));
}

#[test]
fn criterion_10_montecarlo() {
    let _g = serial();
    let start = Instant::now();
    let fam = ray(3.0);
    let n = 100_000;
    let curve = heat_content(&fam, &ball_exhaustion(&fam, 0, &[512]).unwrap(), &[1.0], &[0]).unwrap();
    let m = curve[0].m_values[0][0].unwrap();
    let batch = simulate(&fam, 0, 1.0, n, 42, DEFAULT_EXPLOSION_THRESHOLD).unwrap();
    let est = estimate_heat_quantities(&batch).unwrap();
    let p = est.exploded_hat;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    let gap = ((1.0 - p) - m).abs();
    let flat = simulate(&ray(1.0), 0, 1.0, n, 43, DEFAULT_EXPLOSION_THRESHOLD).unwrap();
    let flat_exploded = flat.counts().2;
    report(
        "10",
        gap < 4.0 * se && flat_exploded == 0,
        Some(120.0),
        start,
        format!("1 - exploded = {}, M_1(0) = {m}, gap {gap:e} vs 4 SE {:e}; p=1 explosions {flat_exploded}", 1.0 - p, 4.0 * se),
    );
}

#[test]
fn criterion_11_killing() {
    let _g = serial();
    let start = Instant::now();
    let g = WeightedGraph::new(&[2.0], &[1.0], &[]).unwrap();
    let fam = explicit(&g);
    let sec = section(&fam, &[0]).unwrap();
    let mut worst = 0.0f64;
    for t in [0.0, 0.1, 0.5, 1.0, 2.0, 10.0] {
        let (a, b) = heat_content_on(&sec, t).unwrap();
        worst = worst.max((a[0] + b[0] - 1.0).abs());
    }
    let n = 100_000;
    let batch = simulate(&fam, 0, 1.0, n, 11, DEFAULT_EXPLOSION_THRESHOLD).unwrap();
    let killed = batch.counts().1 as f64 / n as f64;
    let p = 1.0 - (-2.0f64).exp();
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    report(
        "11",
        worst <= 1e-15 && (killed - p).abs() <= 3.0 * sigma,
        None,
        start,
        format!("max |M_t - 1| = {worst:e}; killed {killed} vs {p:.6} (3 sigma {:e})", 3.0 * sigma),
    );
}

#[test]
fn criterion_12_derivatives() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = Pcg64::seed_from_u64(12);
    let cfg = CorpusConfig { min_vertices: 5, max_vertices: 5, connected: true, ..Default::default() };
    let g = random_graph(&mut rng, &cfg);
    let g = g.with_measure(vec![1.0; 5]).unwrap();
    let fam = explicit(&g);
    let sec = section(&fam, &[0, 1, 2, 3, 4]).unwrap();
    let t = 1e-3;
    let p = sec.spectral().unwrap().semigroup_matrix(t);
    let bmax = g.edges().iter().map(|e| e.2).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for i in 0..5 {
        let x = sec.vertices()[i];
        for j in 0..5 {
            let y = sec.vertices()[j];
            let slope = (p[(i, j)] - if i == j { 1.0 } else { 0.0 }) / t;
            let err = if i == j {
                let n = g.degrees()[x];
                (slope + n).abs() / n
            } else {
                let b = g.weight(x, y);
                // pairs without an edge: absolute error on the scale of the weights
                if b > 0.0 { (slope - b).abs() / b } else { slope.abs() / bmax }
            };
            worst = worst.max(err);
        }
    }
    report("12", worst < 1e-2, None, start, format!("max relative error {worst:e}"));
}

#[test]
fn criterion_13_p1_essential_trend() {
    let _g = serial();
    let start = Instant::now();
    let fam = ray(1.0);
    let deleted = fam.ball(0, 5).unwrap();
    let e = essential_spectrum_estimate(&fam, 0, &deleted, &[25, 50, 100, 200]).unwrap();
    let seq: Vec<f64> = e.points.iter().map(|p| p.bottom).collect();
    let decreasing = seq.windows(2).all(|w| w[1] < w[0]);
    report(
        "13",
        decreasing && *seq.last().unwrap() < 0.05,
        Some(60.0),
        start,
        format!("p=1 sequence {seq:?}"),
    );
}

#[test]
fn criterion_13b_p3_exceeds_100_by_r5() {
    let _g = serial();
    let start = Instant::now();
    let fam = ray(3.0);
    let e = essential_inner_sweep(&fam, 0, &[0, 1, 2, 3, 4, 5], 200).unwrap();
    let seq: Vec<f64> = e.points.iter().map(|p| p.bottom).collect();
    let increasing = seq.windows(2).all(|w| w[1] > w[0]);
    report(
        "13b",
        increasing && *seq.last().unwrap() > 100.0,
        Some(60.0),
        start,
        format!("p=3 inf sigma outside ball(r), r = 0..5: {seq:?}"),
    );
}
