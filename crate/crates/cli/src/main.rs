use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use npol::cone::is_normal;
use npol::gallery::{self, EllipsoidSpec};
use npol::io::{self, Format};
use npol::jump::{self, CertifyMode, CertifyOptions, Conclusion, JumpVerdict};
use npol::search::{self, SearchConfig, StartMode, Strategy};
use npol::{Error, LatticePolytope, LatticeVector};

#[derive(Parser)]
#[command(name = "npol", version, about = "Normal lattice polytopes, jumps and maximality certificates")]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Text,
    Json,
}

impl From<Fmt> for Format {
    fn from(f: Fmt) -> Self {
        match f {
            Fmt::Text => Format::Text,
            Fmt::Json => Format::Json,
        }
    }
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false, args = ["input", "gallery"])]
struct Input {
    /// Vertex file (text, or JSON when the name ends in .json).
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Named polytope, see `npol gallery`.
    #[arg(long, value_name = "NAME")]
    gallery: Option<String>,
}

#[derive(Args)]
struct Output {
    /// Output format; also the input format unless the input name ends in .json.
    #[arg(long, value_enum)]
    format: Option<Fmt>,
    /// Write the result here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Vertices and facet inequalities.
    Hull {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Lattice points of P or of a dilation kP.
    Points {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[arg(long, default_value_t = 1)]
        dilate: i64,
    },
    /// Normality test with a witness on failure.
    Normal {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Lattice strata around P up to a height.
    Strata {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[arg(long, default_value_t = 1)]
        max_height: i64,
    },
    /// Facet widths and multiplicities.
    Widths {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Accepted jumps up to a height, or the verdict for one point.
    Jumps {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[arg(long, default_value_t = 1, conflicts_with = "point")]
        max_height: i64,
        /// Test only this point, e.g. `0,1,2`.
        #[arg(long, value_name = "COORDS")]
        point: Option<String>,
    },
    /// Decide maximality by testing every candidate within the height bound.
    CertifyMax {
        #[command(flatten)]
        input: Input,
        /// Certificate JSON.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Plain-text log with one line per survivor.
        #[arg(long, value_name = "PATH")]
        log: Option<PathBuf>,
        /// Resume from and write progress to this file.
        #[arg(long, value_name = "PATH")]
        checkpoint: Option<PathBuf>,
        /// Keep going after the first accepted jump.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Randomized search for maximal polytopes.
    Search {
        /// Start every run here instead of at a random polytope.
        #[arg(long = "in", value_name = "PATH", conflicts_with = "gallery")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "NAME")]
        gallery: Option<String>,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// h1, vol, mult or mixed.
        #[arg(long, default_value = "mixed")]
        strategy: String,
        #[arg(long, value_enum, default_value = "walk")]
        start: Start,
        #[arg(long, default_value_t = 100)]
        max_points: usize,
        /// Height cap while searching (default 1 + width).
        #[arg(long, value_name = "N", conflicts_with = "exhaustive")]
        search_height_cap: Option<i64>,
        /// Search up to the full height bound.
        #[arg(long)]
        exhaustive: bool,
        /// Report JSON.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Chain logs.
        #[arg(long, value_name = "PATH")]
        log: Option<PathBuf>,
    },
    /// List the named polytopes, or print one.
    Gallery {
        name: Option<String>,
        #[arg(long, value_enum)]
        format: Option<Fmt>,
    },
    /// Hull of the lattice points of a ball or an axis-aligned ellipsoid.
    Ellipsoid {
        #[arg(long, conflicts_with = "semi_axes")]
        ball: Option<i64>,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Comma-separated rationals, e.g. `3/2,2,5/2`.
        #[arg(long, required_unless_present = "ball")]
        semi_axes: Option<String>,
        /// Comma-separated rationals; the origin by default.
        #[arg(long)]
        center: Option<String>,
        /// Also test normality and two-point decomposition.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Start {
    Walk,
    Parallelotope,
    Simplex,
}

fn load(input: &Input, format: Option<Fmt>) -> Result<LatticePolytope, Error> {
    match (&input.input, &input.gallery) {
        (Some(path), _) => {
            let fmt = format.map(Format::from).or_else(|| {
                (path.extension().and_then(|e| e.to_str()) == Some("json")).then_some(Format::Json)
            });
            LatticePolytope::convex_hull(&io::read_file(path, fmt)?)
        }
        (None, Some(name)) => gallery::by_name(name),
        (None, None) => unreachable!("clap requires a source"),
    }
}

fn require_normal(p: &LatticePolytope) -> Result<(), Error> {
    match is_normal(p).witness {
        None => Ok(()),
        Some((degree, w)) => Err(Error::NotNormal { degree, witness: w.into_inner() }),
    }
}

fn emit(out: Option<&Path>, s: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, s)?,
        None => print!("{s}"),
    }
    Ok(())
}

fn json_text(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).expect("plain data") + "\n"
}

fn point_rows(points: &[LatticeVector]) -> String {
    let mut s = String::new();
    for x in points {
        let row: Vec<String> = x.iter().map(|c| c.to_string()).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    s
}

fn parse_point(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::InvalidArgument(format!("`{t}` is not an integer"))))
        .collect()
}

fn verdict_json(z: &[i64], v: &JumpVerdict) -> serde_json::Value {
    json!({
        "z": z,
        "verdict": v.reason().map_or("accepted".to_string(), |r| r.to_string()),
        "witness": v.witness(),
    })
}

fn hull(p: &LatticePolytope, fmt: Fmt) -> String {
    match fmt {
        Fmt::Json => json_text(json!({
            "dim": p.dim(),
            "vertices": p.vertices(),
            "facets": p.facets(),
        })),
        Fmt::Text => {
            let mut s = io::to_text(p.vertices());
            for f in p.facets() {
                writeln!(s, "# facet {} . x + {} >= 0", LatticeVector::new(f.alpha.clone()), f.beta).unwrap();
            }
            s
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    match cli.command {
        Command::Hull { input, output } => {
            let p = load(&input, output.format)?;
            emit(output.out.as_deref(), &hull(&p, output.format.unwrap_or(Fmt::Text)))
        }
        Command::Points { input, output, dilate } => {
            let p = load(&input, output.format)?;
            if dilate < 1 {
                return Err(Error::InvalidArgument("--dilate must be positive".into()));
            }
            let pts = p.lattice_points_dilated(dilate);
            let s = match output.format.unwrap_or(Fmt::Text) {
                Fmt::Json => json_text(json!({ "dilation": dilate, "count": pts.len(), "points": pts })),
                Fmt::Text => format!("points {}\n{}", pts.len(), point_rows(&pts)),
            };
            emit(output.out.as_deref(), &s)
        }
        Command::Normal { input, output } => {
            let p = load(&input, output.format)?;
            let v = is_normal(&p);
            let n = p.lattice_points().len();
            let s = match (output.format.unwrap_or(Fmt::Text), &v.witness) {
                (Fmt::Json, w) => json_text(json!({
                    "normal": w.is_none(),
                    "lattice_points": n,
                    "witness": w.as_ref().map(|(k, x)| json!({ "degree": k, "point": x })),
                })),
                (Fmt::Text, None) => format!("normal, {n} lattice points\n"),
                (Fmt::Text, Some((k, x))) => {
                    format!("not normal, {n} lattice points; {x} in degree {k} is not a sum of {k} lattice points\n")
                }
            };
            emit(output.out.as_deref(), &s)
        }
        Command::Strata { input, output, max_height } => {
            let p = load(&input, output.format)?;
            let strata: Vec<_> = (1..=max_height).map(|j| p.stratum(j)).collect();
            let s = match output.format.unwrap_or(Fmt::Text) {
                Fmt::Json => json_text(json!(strata
                    .iter()
                    .map(|st| json!({ "height": st.height, "count": st.points.len(), "points": st.points }))
                    .collect::<Vec<_>>())),
                Fmt::Text => {
                    let mut s = String::new();
                    for st in &strata {
                        writeln!(s, "stratum {}: {} points", st.height, st.points.len()).unwrap();
                        s.push_str(&point_rows(&st.points));
                    }
                    s
                }
            };
            emit(output.out.as_deref(), &s)
        }
        Command::Widths { input, output } => {
            let p = load(&input, output.format)?;
            let mult = p.facet_multiplicities();
            let s = match output.format.unwrap_or(Fmt::Text) {
                Fmt::Json => json_text(json!({
                    "width": p.width(),
                    "facets": p.facets().iter().zip(p.widths()).zip(&mult)
                        .map(|((f, w), m)| json!({ "facet": f, "width": w, "multiplicity": m }))
                        .collect::<Vec<_>>(),
                })),
                Fmt::Text => {
                    let mut s = String::new();
                    for (i, ((f, w), m)) in p.facets().iter().zip(p.widths()).zip(&mult).enumerate() {
                        writeln!(s, "facet {i}: alpha={} beta={} width={w} mult={m}", LatticeVector::new(f.alpha.clone()), f.beta)
                            .unwrap();
                    }
                    writeln!(s, "width {}", p.width()).unwrap();
                    s
                }
            };
            emit(output.out.as_deref(), &s)
        }
        Command::Jumps { input, output, max_height, point } => {
            let p = load(&input, output.format)?;
            require_normal(&p)?;
            let fmt = output.format.unwrap_or(Fmt::Text);
            let s = if let Some(z) = point {
                let z = parse_point(&z)?;
                let v = jump::is_jump(&p, &z)?;
                match fmt {
                    Fmt::Json => json_text(verdict_json(&z, &v)),
                    Fmt::Text => {
                        let z = LatticeVector::new(z);
                        match (v.reason(), v.witness()) {
                            (None, _) => format!("{z}: accepted, height {}\n", p.height_of(&z)),
                            (Some(r), Some(w)) => format!("{z}: rejected ({r}), witness {w}\n"),
                            (Some(r), None) => format!("{z}: rejected ({r})\n"),
                        }
                    }
                }
            } else {
                if max_height < 1 {
                    return Err(Error::InvalidArgument("--max-height must be positive".into()));
                }
                let found = search::accepted_jumps(&p, search::search_bounds(&p, Some(max_height)));
                match fmt {
                    Fmt::Json => json_text(json!(found
                        .iter()
                        .map(|z| json!({ "z": z, "height": p.height_of(z) }))
                        .collect::<Vec<_>>())),
                    Fmt::Text => {
                        let mut s = format!("jumps {}\n", found.len());
                        for z in &found {
                            writeln!(s, "{z} height {}", p.height_of(z)).unwrap();
                        }
                        s
                    }
                }
            };
            emit(output.out.as_deref(), &s)
        }
        Command::CertifyMax { input, out, log, checkpoint, exhaustive } => {
            let p = load(&input, None)?;
            require_normal(&p)?;
            let opts = CertifyOptions {
                mode: if exhaustive { CertifyMode::Exhaustive } else { CertifyMode::Search },
                checkpoint,
                ..Default::default()
            };
            let cert = jump::certify_maximal(&p, &opts)?;
            if let Some(path) = out {
                std::fs::write(path, cert.to_json()? + "\n")?;
            }
            if let Some(path) = log {
                std::fs::write(path, cert.to_log())?;
            }
            let accepted = cert.verdicts.iter().filter(|v| v.accepted()).count();
            println!("candidates {}", cert.candidate_count);
            println!("survivors {}", cert.point_filter_survivors);
            println!("accepted {accepted}");
            match &cert.conclusion {
                Conclusion::Maximal => println!("conclusion maximal"),
                Conclusion::NotMaximal { z } => println!("conclusion not maximal, jump {z} of height {}", p.height_of(z)),
            }
            Ok(())
        }
        Command::Search {
            input,
            gallery,
            dim,
            seed,
            runs,
            strategy,
            start,
            max_points,
            search_height_cap,
            exhaustive,
            out,
            log,
        } => {
            let start_p = match (input, gallery) {
                (None, None) => None,
                (i, g) => Some(load(&Input { input: i, gallery: g }, None)?),
            };
            let dim = start_p.as_ref().map_or(dim, |p| p.dim());
            if let Some(p) = &start_p {
                require_normal(p)?;
            }
            let config = SearchConfig {
                dim,
                seed,
                runs,
                strategy: strategy.parse::<Strategy>()?,
                start_mode: match start {
                    Start::Walk => StartMode::UnimodularWalk,
                    Start::Parallelotope => StartMode::ShrunkParallelotope,
                    Start::Simplex => StartMode::RandomSimplex,
                },
                max_lattice_points: max_points,
                search_height_cap: if exhaustive { Some(i64::MAX) } else { search_height_cap },
                ..Default::default()
            };
            let report = search::run_search_from(&config, start_p.as_ref())?;
            println!("runs {}", report.runs_attempted);
            println!("restarts {}", report.stats.restarts);
            println!("rejected starts {}", report.stats.rejected_starts);
            for (h, n) in &report.stats.jump_heights {
                println!("jumps of height {h}: {n}");
            }
            println!("maximal {}", report.maximal.len());
            for m in &report.maximal {
                println!("run {}: {} vertices, {} lattice points", m.run, m.polytope.vertices().len(), m.polytope.lattice_points().len());
                print!("{}", point_rows(m.polytope.vertices()));
            }
            if let Some(path) = out {
                let v = json!({
                    "config": config,
                    "stats": report.stats,
                    "maximal": report.maximal.iter().map(|m| json!({ "run": m.run, "certificate": m.certificate })).collect::<Vec<_>>(),
                });
                std::fs::write(path, json_text(v))?;
            }
            if let Some(path) = log {
                let mut s = String::new();
                for (run, chain) in report.chains.iter().enumerate() {
                    writeln!(s, "run {run}").unwrap();
                    for line in chain {
                        writeln!(s, "  {line}").unwrap();
                    }
                }
                std::fs::write(path, s)?;
            }
            Ok(())
        }
        Command::Gallery { name, format } => match name {
            None => {
                println!("P4 P5 P4prime        maximal polytopes");
                println!("cross<k>             cross-polytope, e.g. cross2");
                println!("ball<r>              lattice hull of a 3-ball, e.g. ball2");
                println!("empty<p>-<q>         empty tetrahedron, e.g. empty3-2");
                println!("dark                 pentagon with a dark vertex");
                println!("order-gap            normal P with a normal Q inside");
                println!("order-gap-q          the Q of order-gap");
                Ok(())
            }
            Some(name) => {
                let p = gallery::by_name(&name)?;
                print!("{}", io::write(p.vertices(), format.unwrap_or(Fmt::Text).into()));
                Ok(())
            }
        },
        Command::Ellipsoid { ball, dim, semi_axes, center, check, output } => {
            let spec = match (ball, semi_axes) {
                (Some(r), _) => {
                    if r < 1 {
                        return Err(Error::InvalidArgument("--ball must be positive".into()));
                    }
                    EllipsoidSpec::ball(dim, r)
                }
                (None, Some(axes)) => {
                    let axes = gallery::parse_rationals(&axes)?;
                    let center = match center {
                        Some(c) => gallery::parse_rationals(&c)?,
                        None => gallery::parse_rationals(&vec!["0"; axes.len()].join(","))?,
                    };
                    EllipsoidSpec::axis_aligned(&axes, &center)?
                }
                (None, None) => unreachable!("clap requires --ball or --semi-axes"),
            };
            let p = gallery::ellipsoid_hull(&spec)?;
            let fmt = output.format.unwrap_or(Fmt::Text);
            let checks = check.then(|| (is_normal(&p).is_normal(), gallery::two_point_decomposition_check(&p)));
            let s = match fmt {
                Fmt::Json => json_text(json!({
                    "dim": p.dim(),
                    "vertices": p.vertices(),
                    "lattice_points": p.lattice_points().len(),
                    "normal": checks.map(|c| c.0),
                    "two_point_decomposition": checks.map(|c| c.1),
                })),
                Fmt::Text => {
                    let mut s = io::to_text(p.vertices());
                    writeln!(s, "# lattice points {}", p.lattice_points().len()).unwrap();
                    if let Some((n, t)) = checks {
                        writeln!(s, "# normal {}", if n { "yes" } else { "no" }).unwrap();
                        writeln!(s, "# two-point decomposition {}", if t { "yes" } else { "no" }).unwrap();
                    }
                    s
                }
            };
            emit(output.out.as_deref(), &s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::UnknownPolytope(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
