use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gcx::gcomplex::{basis_bounded, sectors, solve_mc, FlavorSpec};
use gcx::graphcore::{self, FilterSet, DEFAULT_ENUM_BOUND};
use gcx::integrals::{
    mc_weight_h, mc_weight_halfplane, mc_weight_rd, BumpPropagator, HalfPlaneGraph, McConfig, Propagator, SphereKind,
    WeightEstimate, DEFAULT_THETA0,
};
use gcx::polytopes::{face_poset, Family};
use gcx::props::PropGraph;
use gcx::verify;
use gcx::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "gcx", version, about = "graph complexes, biassociahedra and configuration-space weights")]
struct Cli {
    /// seed for every stochastic step
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo samples per weight
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,
    /// sampling threads; results do not depend on this
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// largest vertex count a job may touch
    #[arg(long, global = true, env = "GCX_MAX_VERTICES", default_value_t = 8)]
    max_vertices: usize,
    /// largest sample budget a job may request
    #[arg(long, global = true, env = "GCX_MAX_SAMPLES", default_value_t = 100_000_000)]
    max_samples: u64,
    /// support margin of the bump propagator
    #[arg(long, global = true, default_value_t = DEFAULT_THETA0)]
    theta0: f64,
    /// output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// canonical basis of a graph complex at k vertices and l edges
    Basis {
        k: usize,
        l: usize,
        /// dfGC_d, dGC_d, fGCor_d or GCor_d
        flavor: String,
        /// extra filters: connected, oriented, min-valence-2, in-and-out,
        /// no-11-bivalent, no-triangle, no-adjacent-bivalent, max-valence-3, hat
        #[arg(long, default_value = "")]
        filters: String,
    },
    /// Maurer–Cartan element through a vertex count, with its defect
    McSolve {
        flavor: String,
        /// defaults to --max-vertices
        vertices: Option<usize>,
    },
    /// face poset of a biassociahedron (K) or bipermutahedron (P)
    Polytope {
        m: usize,
        n: usize,
        family: String,
        /// include cells and covers
        #[arg(long)]
        poset: bool,
    },
    /// Monte Carlo weights of the graphs in a file, one per line, as CSV
    Weights {
        graph_file: PathBuf,
        #[arg(long, value_enum, default_value_t = Space::Rd)]
        space: Space,
        /// ambient dimension for rd; read from each graph when absent
        #[arg(long)]
        d: Option<usize>,
        /// sphere propagator for d = 3
        #[arg(long, value_enum, default_value_t = Kind::Zonal)]
        propagator: Kind,
    },
    /// run the acceptance checks
    Verify {
        /// comma-separated criterion numbers (all when absent)
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Space {
    Rd,
    Halfplane,
    #[value(name = "H", alias = "h")]
    H,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Zonal,
    Nu,
}

enum Fail {
    Verify(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::Io(e.to_string())
    }
}

fn resource(msg: String) -> Fail {
    Fail::Lib(Error::Resource(msg))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn merge(a: FilterSet, b: FilterSet) -> FilterSet {
    FilterSet {
        connected: a.connected || b.connected,
        oriented: a.oriented || b.oriented,
        min_valence_2: a.min_valence_2 || b.min_valence_2,
        in_and_out: a.in_and_out || b.in_and_out,
        no_11_bivalent: a.no_11_bivalent || b.no_11_bivalent,
        no_triangle: a.no_triangle || b.no_triangle,
        no_adjacent_bivalent: a.no_adjacent_bivalent || b.no_adjacent_bivalent,
        max_valence_3: a.max_valence_3 || b.max_valence_3,
    }
}

fn cmd_basis(cli: &Cli, k: usize, l: usize, flavor: &str, filters: &str) -> Result<String, Fail> {
    if k > cli.max_vertices {
        return Err(resource(format!("{k} vertices above the limit {}", cli.max_vertices)));
    }
    let f: FlavorSpec = flavor.parse()?;
    let extra = FilterSet::parse_list(filters)?;
    let all = merge(f.filters(), extra);
    let classes = if extra == FilterSet::none() {
        basis_bounded(&f, k, l, DEFAULT_ENUM_BOUND)?
    } else {
        graphcore::enumerate_graphs_bounded(k, l, f.d, &all, DEFAULT_ENUM_BOUND)?
    };
    let mut s = String::new();
    for c in &classes {
        s.push_str(&c.graph.encode(f.d));
        s.push('\n');
    }
    Ok(s)
}

fn cmd_mc_solve(cli: &Cli, flavor: &str, vertices: Option<usize>) -> Result<String, Fail> {
    let n = vertices.unwrap_or(cli.max_vertices);
    if n > cli.max_vertices {
        return Err(resource(format!("{n} vertices above the limit {}", cli.max_vertices)));
    }
    let f: FlavorSpec = flavor.parse()?;
    let sol = solve_mc(&f, n, DEFAULT_ENUM_BOUND)?;
    let parse = |s: String| serde_json::from_str::<serde_json::Value>(&s).expect("library emits valid JSON");
    let terms: Vec<serde_json::Value> = sol
        .terms
        .iter()
        .map(|(k, v)| serde_json::json!({ "vertices": k, "classes": v.len(), "terms": parse(v.to_json()) }))
        .collect();
    let sectors: Vec<String> = sectors(&sol.defect).keys().map(|(k, e)| format!("{k},{e}")).collect();
    let doc = serde_json::json!({
        "flavor": f.to_string(),
        "max_vertices": n,
        "components": terms,
        "defect": { "through_vertices": n + 1, "classes": sol.defect.len(), "sectors": sectors },
    });
    let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    if !sol.defect.is_zero() {
        emit(&cli.out, &text)?;
        return Err(Fail::Verify(format!("defect has {} classes", sol.defect.len())));
    }
    Ok(text)
}

fn cmd_polytope(cli: &Cli, m: usize, n: usize, family: &str, poset: bool) -> Result<String, Fail> {
    if m + n > cli.max_vertices + 2 {
        return Err(resource(format!("arity {m}+{n} above the limit")));
    }
    let fam: Family = family.parse()?;
    let p = face_poset(m, n, fam)?;
    let mut doc = serde_json::json!({
        "family": format!("{fam:?}"),
        "m": m,
        "n": n,
        "f_vector": p.f_vector(),
        "graded": p.is_graded(),
        "diamond": p.diamond(),
        "boundary_squares_to_zero": p.boundary_squares_to_zero(),
    });
    if poset {
        doc["poset"] = serde_json::from_str(&p.to_json()).expect("library emits valid JSON");
    }
    Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n")
}

fn estimate_line(
    cli: &Cli,
    line: &str,
    space: Space,
    d: Option<usize>,
    kind: Kind,
    bump: &BumpPropagator,
    cfg: &McConfig,
) -> Result<(usize, WeightEstimate), Error> {
    let kind = match kind {
        Kind::Zonal => SphereKind::Zonal,
        Kind::Nu => SphereKind::NuPlus,
    };
    let too_big = |v: usize| Error::Resource(format!("{v} vertices above the limit {}", cli.max_vertices));
    match space {
        Space::Rd => {
            let (gd, g) = graphcore::decode(line)?;
            let dim = d.unwrap_or(gd as usize);
            if g.k > cli.max_vertices {
                return Err(too_big(g.k));
            }
            let prop = Propagator::new(dim, bump.clone(), kind)?;
            Ok((dim, mc_weight_rd(&g, dim, &prop, cfg)?))
        }
        Space::Halfplane => {
            let g = HalfPlaneGraph::decode(line)?;
            if g.aerial + g.boundary > cli.max_vertices {
                return Err(too_big(g.aerial + g.boundary));
            }
            Ok((2, mc_weight_halfplane(&g, bump, cfg)?))
        }
        Space::H => {
            let g = PropGraph::decode(line)?;
            if g.k + g.m + g.n > cli.max_vertices {
                return Err(too_big(g.k + g.m + g.n));
            }
            Ok((3, mc_weight_h(&g, bump, cfg)?))
        }
    }
}

fn cmd_weights(cli: &Cli, file: &PathBuf, space: Space, d: Option<usize>, kind: Kind) -> Result<String, Fail> {
    if cli.samples > cli.max_samples {
        return Err(resource(format!("{} samples above the limit {}", cli.samples, cli.max_samples)));
    }
    let text = fs::read_to_string(file).map_err(|e| Fail::Io(format!("{}: {e}", file.display())))?;
    let bump = BumpPropagator::new(cli.theta0)?;
    let cfg = McConfig { samples: cli.samples, seed: cli.seed, workers: cli.workers };
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Fail::Io(e.to_string());
    w.write_record(["graph", "d", "mean", "stderr", "samples", "seed"]).map_err(csv_err)?;
    let mut failures = 0;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        match estimate_line(cli, line, space, d, kind, &bump, &cfg) {
            Ok((dim, e)) => {
                let row = [e.graph, dim.to_string(), e.mean.to_string(), e.stderr.to_string(), e.samples.to_string(), e.seed.to_string()];
                w.write_record(&row).map_err(csv_err)?;
            }
            Err(Error::Resource(m)) => return Err(resource(m)),
            Err(e) => {
                eprintln!("gcx: {line}: {e}");
                failures += 1;
                let row = [line.to_string(), d.map(|x| x.to_string()).unwrap_or_default(), "NaN".into(), "NaN".into(), "0".into(), cli.seed.to_string()];
                w.write_record(&row).map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Fail::Io(e.to_string()))?;
    let out = String::from_utf8(bytes).expect("csv of utf-8 fields");
    if failures > 0 {
        emit(&cli.out, &out)?;
        return Err(Fail::Lib(Error::Sampling(format!("{failures} rows failed"))));
    }
    Ok(out)
}

fn cmd_verify(cli: &Cli, only: &[usize]) -> Result<String, Fail> {
    let opts = verify::Options { seed: cli.seed, workers: cli.workers, theta0: cli.theta0 };
    let ids: Vec<usize> = if only.is_empty() { (1..=verify::CRITERIA).collect() } else { only.to_vec() };
    let mut text = String::new();
    let mut failed = 0;
    for id in ids {
        let o = verify::run(id, &opts);
        eprintln!("{} ({:.1}s)", o.line(), o.seconds);
        text.push_str(&o.line());
        text.push('\n');
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        emit(&cli.out, &text)?;
        return Err(Fail::Verify(format!("{failed} criteria failed")));
    }
    Ok(text)
}

fn run(cli: &Cli) -> Result<String, Fail> {
    if cli.workers == 0 || cli.max_vertices == 0 || cli.max_samples == 0 {
        return Err(Fail::Lib(Error::Invalid("resource bounds and workers must be positive".into())));
    }
    match &cli.cmd {
        Cmd::Basis { k, l, flavor, filters } => cmd_basis(cli, *k, *l, flavor, filters),
        Cmd::McSolve { flavor, vertices } => cmd_mc_solve(cli, flavor, *vertices),
        Cmd::Polytope { m, n, family, poset } => cmd_polytope(cli, *m, *n, family, *poset),
        Cmd::Weights { graph_file, space, d, propagator } => cmd_weights(cli, graph_file, *space, *d, *propagator),
        Cmd::Verify { only } => cmd_verify(cli, only),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|text| emit(&cli.out, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Verify(m)) => {
            eprintln!("gcx: verification failed: {m}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Fail::Lib(Error::Resource(m))) => {
            eprintln!("gcx: resource guard: {m}");
            ExitCode::from(EXIT_RESOURCE)
        }
        Err(Fail::Lib(e @ Error::NotExact { .. })) => {
            eprintln!("gcx: {e}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Fail::Lib(e)) => {
            eprintln!("gcx: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
        Err(Fail::Io(m)) => {
            eprintln!("gcx: {m}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
