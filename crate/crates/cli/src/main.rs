use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use graphlap::family::FamilySpec;
use graphlap::graph::VertexFunction;
use graphlap::heat::{heat_content, stochastic_verdict, w_quadrature_crosscheck, VerdictRule};
use graphlap::io::InputFile;
use graphlap::isoperimetry::{beta_gamma, boundary_spec, coarea_first, coarea_second, MeasureChoice, ENUMERATION_CAP};
use graphlap::markov::{estimate_heat_quantities, montecarlo_check, simulate, DEFAULT_EXPLOSION_THRESHOLD};
use graphlap::section::{ball_exhaustion, section};
use graphlap::spectral::{
    alpha_value, boundedness_report, emptiness_diagnostic, essential_inner_sweep, essential_spectrum_estimate,
    spectral_report,
};
use graphlap::verify::{verify, VerifyOptions};
use graphlap::{Error, GraphFamily, GraphInput, MeasureLaw};

mod cli_error;
use cli_error::Failure;

#[derive(Parser, Debug)]
#[command(name = "graphlap", version, about = "Laplacians, isoperimetry and heat flow on weighted graphs")]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "GRAPHLAP_THREADS")]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the manifest. Reports then differ between runs.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Input {
    /// Graph file or family spec.
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    /// Family spec or graph file.
    #[arg(long)]
    family: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Measure {
    /// As given.
    M,
    /// Replaced by the full degree.
    N,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Region {
    /// Comma separated vertex ids.
    #[arg(long, value_delimiter = ',', conflicts_with = "radius")]
    section: Option<Vec<String>>,
    /// Ball of this radius around the root.
    #[arg(long)]
    radius: Option<usize>,
    /// Root for `--radius`, defaults to the family root.
    #[arg(long)]
    root: Option<String>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Spectrum of a Dirichlet section with isoperimetric bounds.
    Spectrum {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        region: Region,
        #[arg(long, value_enum, default_value = "m")]
        measure: Measure,
        /// Bottom of the spectrum along balls of these radii.
        #[arg(long, value_delimiter = ',')]
        exhaustion: Vec<usize>,
        /// Candidate sets for upper bounds on large sections.
        #[arg(long, default_value_t = 4096)]
        budget: usize,
    },
    /// Isoperimetric constants of a finite set.
    Cheeger {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        region: Region,
        #[arg(long, value_enum, default_value = "m")]
        measure: Measure,
        #[arg(long, default_value_t = 4096)]
        budget: usize,
    },
    /// Both co-area identities for a finitely supported function.
    Coarea {
        #[command(flatten)]
        input: Input,
        /// JSON object mapping vertex ids to values.
        #[arg(long)]
        function: PathBuf,
    },
    /// Bottom of the spectrum outside a deleted set.
    Essential {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        root: Option<String>,
        /// Delete the ball of this radius.
        #[arg(long, conflicts_with = "delete")]
        delete_radius: Option<usize>,
        /// Delete these vertices.
        #[arg(long, value_delimiter = ',')]
        delete: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        outer: Vec<usize>,
        /// Also sweep inner radii at the largest outer radius.
        #[arg(long, value_delimiter = ',')]
        inner: Vec<usize>,
        /// Also run the emptiness trend diagnostic at these radii.
        #[arg(long, value_delimiter = ',')]
        emptiness: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        shell_width: usize,
        #[arg(long, default_value_t = 4096)]
        budget: usize,
    },
    /// Heat content M_t on an exhaustion.
    Heat {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        radii: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
        times: Vec<f64>,
        /// Probe vertices, default the root.
        #[arg(long, value_delimiter = ',')]
        probes: Vec<String>,
        /// Cross-check the resolvent against a quadrature of M_t at this alpha.
        #[arg(long)]
        quadrature_alpha: Option<f64>,
        #[arg(long, default_value_t = 40.0)]
        t_max: f64,
        #[arg(long, default_value_t = 40)]
        panels: usize,
    },
    /// Stochastic completeness verdict from bounded alpha-harmonic functions.
    Stochastic {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
        radii: Vec<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 3)]
        window: usize,
        /// Extrapolated tail must stay below this fraction of the last value.
        #[arg(long, default_value_t = 0.1)]
        stabilization: f64,
        /// Repeat the decision at a second alpha.
        #[arg(long)]
        alpha2: Option<f64>,
        /// Monte Carlo check of M_t at the root with this many samples.
        #[arg(long, default_value_t = 0)]
        montecarlo: usize,
        #[arg(long, default_value_t = 1.0)]
        montecarlo_t: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EXPLOSION_THRESHOLD)]
        explosion_threshold: u64,
    },
    /// Monte Carlo trajectories of the killed jump process.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EXPLOSION_THRESHOLD)]
        explosion_threshold: u64,
        /// Include every trajectory outcome.
        #[arg(long)]
        outcomes: bool,
    },
    /// Property suite on random graphs or on the given graph.
    Verify {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 12)]
        max_vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Report axiom violations of the input instead of rejecting it.
        #[arg(long)]
        allow_invalid: bool,
    },
}

#[derive(Serialize)]
struct InputHash {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    command: &'static str,
    config: Value,
    inputs: Vec<InputHash>,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    threads: usize,
    parallel: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

/// Loaded input files and their hashes.
#[derive(Default)]
struct Loader {
    hashes: Vec<InputHash>,
}

impl Loader {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        self.hashes.push(InputHash { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        String::from_utf8(bytes).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    }

    fn input_file(&mut self, input: &Input) -> Result<InputFile, Failure> {
        let path = input
            .graph
            .as_ref()
            .or(input.family.as_ref())
            .ok_or_else(|| Failure::input("one of --graph or --family is required"))?;
        Ok(InputFile::parse(&self.read(path)?)?)
    }

    fn family(&mut self, input: &Input, measure: Measure) -> Result<GraphFamily, Failure> {
        let file = self.input_file(input)?;
        let fam = file.family()?;
        Ok(match measure {
            Measure::M => fam,
            Measure::N => normalize(&fam)?,
        })
    }
}

fn normalize(fam: &GraphFamily) -> Result<GraphFamily, Error> {
    match fam {
        GraphFamily::Explicit { graph, .. } => Ok(GraphFamily::explicit_rooted(graph.normalized()?, fam.root())),
        GraphFamily::Radial(_) => {
            let mut spec = fam.to_spec();
            match &mut spec {
                FamilySpec::Ray { measure_law, .. } | FamilySpec::Tree { measure_law, .. } => {
                    *measure_law = MeasureLaw::Normalized { scale: 1.0 }
                }
                FamilySpec::Explicit { .. } => unreachable!(),
            }
            GraphFamily::from_spec(&spec)
        }
    }
}

fn resolve_all(fam: &GraphFamily, names: &[String]) -> Result<Vec<usize>, Error> {
    let mut v = names.iter().map(|n| fam.resolve(n)).collect::<Result<Vec<_>, _>>()?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn root_of(fam: &GraphFamily, root: &Option<String>) -> Result<usize, Error> {
    root.as_deref().map_or(Ok(fam.root()), |r| fam.resolve(r))
}

fn region(fam: &GraphFamily, r: &Region) -> Result<Vec<usize>, Failure> {
    match (&r.section, r.radius) {
        (Some(names), _) => Ok(resolve_all(fam, names)?),
        (None, Some(radius)) => Ok(fam.ball(root_of(fam, &r.root)?, radius)?),
        (None, None) => match fam.as_graph() {
            Some(g) => Ok((0..g.len()).collect()),
            None => Err(Failure::input("an infinite family needs --section or --radius")),
        },
    }
}

fn labels(fam: &GraphFamily, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| fam.label(x)).collect()
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn run(command: &Command, loader: &mut Loader) -> Result<(Value, bool), Failure> {
    let report = match command {
        Command::Spectrum { input, region: r, measure, exhaustion, budget } => {
            let fam = loader.family(input, *measure)?;
            let u = region(&fam, r)?;
            let sec = section(&fam, &u)?;
            let report = spectral_report(&fam, &u, *budget)?;
            let root = root_of(&fam, &r.root)?;
            let sequence = exhaustion
                .iter()
                .map(|&radius| -> Result<Value, Error> {
                    let s = section(&fam, &fam.ball(root, radius)?)?;
                    Ok(json!({"radius": radius, "size": s.len(), "bottom": s.bottom_eigenvalue()?}))
                })
                .collect::<Result<Vec<_>, _>>()?;
            json!({
                "section": labels(&fam, &u),
                "d": sec.averaged_degree(),
                "spectral": report,
                "boundedness": boundedness_report(&fam, &u)?,
                "exhaustion": sequence,
            })
        }
        Command::Cheeger { input, region: r, measure, budget } => {
            let fam = loader.family(input, *measure)?;
            let u = region(&fam, r)?;
            let alpha_m = alpha_value(&fam, &u, MeasureChoice::M, *budget)?;
            let alpha_n = alpha_value(&fam, &u, MeasureChoice::N, *budget)?;
            let bg = if u.len() <= ENUMERATION_CAP { Some(beta_gamma(&fam, &u)?) } else { None };
            json!({
                "section": labels(&fam, &u),
                "alpha_m": alpha_m,
                "alpha_n": alpha_n,
                "minimizer_m": boundary_spec(&fam, &alpha_m.witness)?,
                "minimizer_n": boundary_spec(&fam, &alpha_n.witness)?,
                "beta_gamma": bg,
            })
        }
        Command::Coarea { input, function } => {
            let fam = loader.family(input, Measure::M)?;
            let values: std::collections::BTreeMap<String, f64> = serde_json::from_str(&loader.read(function)?)?;
            let mut f = VertexFunction::new();
            let mut enclosure = Vec::new();
            for (name, &v) in &values {
                let x = fam.resolve(name)?;
                f.set(x, v);
                enclosure.push(x);
                enclosure.extend(fam.neighbors(x)?.into_iter().map(|e| e.0));
            }
            enclosure.sort_unstable();
            enclosure.dedup();
            let first = coarea_first(&fam, &f, &enclosure)?;
            let second = if values.values().all(|&v| v >= 0.0) { Some(coarea_second(&fam, &f)?) } else { None };
            json!({
                "support": values.len(),
                "first": first,
                "first_relative_error": first.relative_error(),
                "second": second,
                "second_relative_error": second.map(|c| c.relative_error()),
            })
        }
        Command::Essential { input, root, delete_radius, delete, outer, inner, emptiness, shell_width, budget } => {
            let fam = loader.family(input, Measure::M)?;
            let root = root_of(&fam, root)?;
            let deleted = match delete_radius {
                Some(r) => fam.ball(root, *r)?,
                None => resolve_all(&fam, delete)?,
            };
            let estimate = essential_spectrum_estimate(&fam, root, &deleted, outer)?;
            let sweep = match inner.is_empty() {
                true => None,
                false => Some(essential_inner_sweep(&fam, root, inner, *outer.iter().max().unwrap())?),
            };
            let diag = match emptiness.is_empty() {
                true => None,
                false => Some(emptiness_diagnostic(&fam, root, emptiness, *shell_width, *budget)?),
            };
            json!({
                "deleted": labels(&fam, &deleted),
                "sequence": estimate.points.iter().map(|p| p.bottom).collect::<Vec<_>>(),
                "estimate": estimate,
                "inner_sweep": sweep,
                "emptiness": diag,
            })
        }
        Command::Heat { input, radii, times, probes, quadrature_alpha, t_max, panels } => {
            let fam = loader.family(input, Measure::M)?;
            let ex = ball_exhaustion(&fam, fam.root(), radii)?;
            let probes = if probes.is_empty() { vec![fam.root()] } else { resolve_all(&fam, probes)? };
            let curves = heat_content(&fam, &ex, times, &probes)?;
            let quad = match quadrature_alpha {
                Some(a) => Some(w_quadrature_crosscheck(&fam, *a, &ex, *t_max, *panels, &probes)?),
                None => None,
            };
            json!({"probes": labels(&fam, &probes), "curves": curves, "quadrature": quad})
        }
        Command::Stochastic {
            input,
            alpha,
            radii,
            tol,
            window,
            stabilization,
            alpha2,
            montecarlo,
            montecarlo_t,
            seed,
            explosion_threshold,
        } => {
            let fam = loader.family(input, Measure::M)?;
            let ex = ball_exhaustion(&fam, fam.root(), radii)?;
            let rule = VerdictRule { tol: *tol, window: *window, stabilization: *stabilization };
            let mut v = stochastic_verdict(&fam, *alpha, &ex, &rule, *alpha2)?;
            if *montecarlo > 0 {
                let last = ball_exhaustion(&fam, fam.root(), &radii[radii.len() - 1..])?;
                let curve = heat_content(&fam, &last, &[*montecarlo_t], &[fam.root()])?;
                let m = curve[0].m_values[0][0].expect("root lies in every ball");
                v.montecarlo =
                    Some(montecarlo_check(&fam, fam.root(), *montecarlo_t, *montecarlo, *seed, *explosion_threshold, m)?);
            }
            to_value(v)
        }
        Command::Simulate { input, x0, t, samples, seed, explosion_threshold, outcomes } => {
            let fam = loader.family(input, Measure::M)?;
            let x0 = root_of(&fam, x0)?;
            let batch = simulate(&fam, x0, *t, *samples, *seed, *explosion_threshold)?;
            let est = estimate_heat_quantities(&batch)?;
            let (alive, killed, exploded) = batch.counts();
            json!({
                "x0": fam.label(x0),
                "t_horizon": batch.t_horizon,
                "n_samples": batch.n_samples,
                "seed": batch.seed,
                "explosion_threshold": batch.explosion_threshold,
                "state_space": batch.state_space,
                "alive": alive,
                "killed": killed,
                "exploded": exploded,
                "total_jumps": batch.total_jumps(),
                "estimate": est,
                "outcomes": if *outcomes { Some(&batch.outcomes) } else { None },
            })
        }
        Command::Verify { graph, instances, max_vertices, seed, only, allow_invalid } => {
            let raw = match graph {
                Some(p) => Some(raw_input(&loader.read(p)?)?),
                None => None,
            };
            if let (Some(inp), false) = (&raw, allow_invalid) {
                let v = graphlap::graph::validate(inp);
                if !v.is_empty() {
                    return Err(Error::InvalidGraph(v).into());
                }
            }
            let opts = VerifyOptions {
                instances: *instances,
                max_vertices: *max_vertices,
                seed: *seed,
                only: if only.is_empty() { None } else { Some(only.clone()) },
            };
            let summary = verify(raw.as_ref(), &opts)?;
            let ok = summary.passed;
            return Ok((to_value(summary), ok));
        }
    };
    Ok((report, true))
}

/// Graph input without the axiom checks.
fn raw_input(text: &str) -> Result<GraphInput, Failure> {
    match InputFile::parse(text)? {
        InputFile::Graph(g) => Ok(g.to_input()?),
        InputFile::Family(FamilySpec::Explicit { graph, .. }) => Ok(graph.to_input()?),
        InputFile::Family(_) => Err(Failure::input("verify needs an explicit finite graph")),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum { .. } => "spectrum",
        Command::Cheeger { .. } => "cheeger",
        Command::Coarea { .. } => "coarea",
        Command::Essential { .. } => "essential",
        Command::Heat { .. } => "heat",
        Command::Stochastic { .. } => "stochastic",
        Command::Simulate { .. } => "simulate",
        Command::Verify { .. } => "verify",
    }
}

fn seed_of(c: &Command) -> Option<u64> {
    match c {
        Command::Stochastic { seed, montecarlo, .. } if *montecarlo > 0 => Some(*seed),
        Command::Simulate { seed, .. } | Command::Verify { seed, .. } => Some(*seed),
        _ => None,
    }
}

fn configure_threads(n: Option<usize>) -> Result<(), Failure> {
    #[cfg(feature = "parallel")]
    if let Some(n) = n {
        if n == 0 {
            return Err(Failure::input("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::input(e.to_string()))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main_inner(cli: Cli) -> Result<bool, Failure> {
    configure_threads(cli.threads)?;
    let start = Instant::now();
    let mut loader = Loader::default();
    let (report, ok) = run(&cli.command, &mut loader)?;
    let manifest = RunManifest {
        command: command_name(&cli.command),
        config: config_of(&cli.command),
        inputs: loader.hashes,
        version: env!("CARGO_PKG_VERSION"),
        seed: seed_of(&cli.command),
        threads: graphlap::par::current_threads(),
        parallel: graphlap::par::is_parallel(),
        seconds: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let doc = json!({"manifest": manifest, "report": report});
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(ok)
}

/// Every option as resolved by the parser, defaults included.
fn config_of(c: &Command) -> Value {
    match to_value(c) {
        Value::Object(mut m) => m.remove(command_name(c)).unwrap_or(Value::Null),
        other => other,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("graphlap: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
