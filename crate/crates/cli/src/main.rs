use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use multisect::constructions::{
    bisection_from_heegaard, bisection_from_trisection, boundary_invariants, double_bisection, genus_lower_bound,
    glue_bisections, insert_parallel_sectors, lens_diagram, merge_adjacent_sectors, CapChoice, GluePlan,
};
use multisect::diagrams::{connected_sum, mirror, stabilize, GeometricHeegaardDiagram, MultisectionDiagram};
use multisect::freewords::Word;
use multisect::io::{parse_hd, parse_msd, write_hd, write_msd};
use multisect::nielsen::{distinguish, flip_check, SearchLimits, Verdict};
use multisect::presentations::{abelianization, tietze_simplify, GroupPresentation, DEFAULT_TIETZE_BUDGET};
use multisect::render::render_svg;
use multisect::report::RunReport;

#[derive(Parser)]
#[command(name = "multisect", version, about = "Build and check multisection diagrams of 4-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Io {
    /// Input file; standard input when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Heegaard (HD) or multisection (MSD) diagram.
    Construct {
        #[command(subcommand)]
        op: ConstructOp,
        #[command(flatten)]
        io: Io,
    },
    /// Check every sector of an MSD file. Exit 0 iff all are verified.
    Validate {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = DEFAULT_TIETZE_BUDGET)]
        budget: usize,
    },
    /// Simplified fundamental group presentation of an HD or MSD file.
    Pi1 {
        #[command(flatten)]
        io: Io,
    },
    /// Abelian invariants of an HD or MSD file and of the MSD boundary.
    Homology {
        #[command(flatten)]
        io: Io,
    },
    /// Compare two generating tuples up to Nielsen equivalence.
    /// Exit 0 Distinct, 10 SameOrbit, 20 Inconclusive.
    Distinguish(DistinguishArgs),
    /// Schematic SVG chord diagram of an MSD file.
    Render {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConstructOp {
    /// Genus-1 diagram of the lens space L(p,q).
    Lens {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// Connected sum of the input HD with a second HD.
    Sum {
        #[arg(long)]
        with: PathBuf,
    },
    Mirror,
    Stabilize,
    /// Bisection of (M minus a ball) x I from a Heegaard diagram.
    Bisect,
    /// Bisection obtained from a trisection by dropping one sector.
    TrisectRestrict {
        #[arg(long)]
        drop: usize,
    },
    /// Closed 4-section from a bisection.
    Double,
    /// Insert parallel sectors after a system.
    Insert {
        #[arg(long)]
        position: usize,
        #[arg(long)]
        count: usize,
    },
    /// Glue copies of the bisection of a Heegaard diagram, optionally capped.
    Glue {
        #[arg(long)]
        copies: usize,
        /// `auto`, `none`, or a path to an MSD bisection.
        #[arg(long, default_value = "none")]
        cap: String,
    },
    /// Merge the two sectors adjacent to a system.
    Merge {
        #[arg(long)]
        system: usize,
    },
}

#[derive(Args)]
struct DistinguishArgs {
    /// Presentation file (`gens n` then one relator per line).
    #[arg(long, conflicts_with = "diagram", required_unless_present = "diagram")]
    presentation: Option<PathBuf>,
    /// Comma-separated words, e.g. "g1, g2^-1 g1".
    #[arg(long, requires = "presentation")]
    t1: Option<String>,
    #[arg(long, requires = "presentation")]
    t2: Option<String>,
    /// MSD bisection: compare the spine tuples of its two sectors.
    #[arg(long)]
    diagram: Option<PathBuf>,
    /// Largest finite abelian quotient order searched.
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// A usage or input problem, reported with exit code 2.
#[derive(Debug)]
struct Failure(anyhow::Error);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> std::result::Result<u8, Failure> {
    let line = command_line(std::env::args().skip(1));
    let res = match cli.command {
        Command::Construct { op, io } => construct(op, &io).map(|_| 0),
        Command::Validate { io, budget } => cmd_validate(&io, budget, &line),
        Command::Pi1 { io } => cmd_pi1(&io, &line).map(|_| 0),
        Command::Homology { io } => cmd_homology(&io, &line).map(|_| 0),
        Command::Distinguish(args) => cmd_distinguish(&args, &line),
        Command::Render { io, svg } => cmd_render(&io, svg.as_deref()).map(|_| 0),
    };
    res.map_err(Failure)
}

/// Program name and arguments as typed, independent of the install path.
fn command_line(args: impl Iterator<Item = String>) -> String {
    let mut parts = vec!["multisect".to_string()];
    parts.extend(args.map(|a| if a.contains(char::is_whitespace) { format!("\"{a}\"") } else { a }));
    parts.join(" ")
}

fn read_input(io: &Io) -> Result<(String, String)> {
    match &io.input {
        Some(p) => Ok((
            p.display().to_string(),
            fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
            Ok(("<stdin>".to_string(), s))
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

enum Diagram {
    Heegaard(GeometricHeegaardDiagram),
    Multi(MultisectionDiagram),
}

fn parse_any(name: &str, text: &str) -> Result<Diagram> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    if first == Some("HD 1") {
        Ok(Diagram::Heegaard(parse_hd(text).with_context(|| name.to_string())?))
    } else {
        Ok(Diagram::Multi(parse_msd(text).with_context(|| name.to_string())?))
    }
}

fn read_hd(io: &Io) -> Result<GeometricHeegaardDiagram> {
    let (name, text) = read_input(io)?;
    parse_hd(&text).with_context(|| name)
}

fn read_msd(io: &Io) -> Result<MultisectionDiagram> {
    let (name, text) = read_input(io)?;
    parse_msd(&text).with_context(|| name)
}

fn emit_hd(io: &Io, h: &GeometricHeegaardDiagram) -> Result<()> {
    eprintln!("genus {}", h.genus());
    write_output(io.output.as_deref(), &write_hd(h))
}

fn emit_msd(io: &Io, d: &MultisectionDiagram) -> Result<()> {
    let types: Vec<String> = d.types().iter().map(|k| k.to_string()).collect();
    eprintln!("genus {} types {}", d.genus(), types.join(" "));
    write_output(io.output.as_deref(), &write_msd(d))
}

fn construct(op: ConstructOp, io: &Io) -> Result<()> {
    match op {
        ConstructOp::Lens { p, q } => emit_hd(io, &lens_diagram(p, q)?),
        ConstructOp::Sum { with } => {
            let other = parse_hd(&fs::read_to_string(&with)?).with_context(|| with.display().to_string())?;
            emit_hd(io, &connected_sum(&read_hd(io)?, &other))
        }
        ConstructOp::Mirror => emit_hd(io, &mirror(&read_hd(io)?)),
        ConstructOp::Stabilize => emit_hd(io, &stabilize(&read_hd(io)?)),
        ConstructOp::Bisect => emit_msd(io, &bisection_from_heegaard(&read_hd(io)?)?),
        ConstructOp::TrisectRestrict { drop } => emit_msd(io, &bisection_from_trisection(&read_msd(io)?, drop)?),
        ConstructOp::Double => emit_msd(io, &double_bisection(&read_msd(io)?)?),
        ConstructOp::Insert { position, count } => {
            emit_msd(io, &insert_parallel_sectors(&read_msd(io)?, position, count)?)
        }
        ConstructOp::Glue { copies, cap } => {
            let cap = match cap.as_str() {
                "auto" => CapChoice::Auto,
                "none" => CapChoice::None,
                path => CapChoice::Diagram(
                    parse_msd(&fs::read_to_string(path).with_context(|| format!("reading {path}"))?)
                        .with_context(|| path.to_string())?,
                ),
            };
            emit_msd(io, &glue_bisections(&GluePlan::new(read_hd(io)?, copies, cap))?)
        }
        ConstructOp::Merge { system } => emit_msd(io, &merge_adjacent_sectors(&read_msd(io)?, system)?),
    }
}

fn cmd_validate(io: &Io, budget: usize, line: &str) -> Result<u8> {
    let (name, text) = read_input(io)?;
    let d = parse_msd(&text).with_context(|| name.clone())?;
    let v = d.validate(budget)?;
    let mut r = RunReport::new(line);
    r.input(&name, text.as_bytes());
    r.section("validation", v.to_string());
    write_output(io.output.as_deref(), &r.render())?;
    Ok(if v.all_verified() { 0 } else { 1 })
}

fn pi1_of(d: &Diagram) -> Result<GroupPresentation> {
    Ok(match d {
        Diagram::Heegaard(h) => h.pi1(),
        Diagram::Multi(m) => m.pi1()?,
    })
}

fn cmd_pi1(io: &Io, line: &str) -> Result<()> {
    let (name, text) = read_input(io)?;
    let p = pi1_of(&parse_any(&name, &text)?)?;
    let s = tietze_simplify(&p, DEFAULT_TIETZE_BUDGET);
    let mut r = RunReport::new(line);
    r.input(&name, text.as_bytes());
    r.section("pi1", s.presentation.to_text());
    r.section("abelianization", abelianization(&p).to_string());
    write_output(io.output.as_deref(), &r.render())
}

fn cmd_homology(io: &Io, line: &str) -> Result<()> {
    let (name, text) = read_input(io)?;
    let d = parse_any(&name, &text)?;
    let mut r = RunReport::new(line);
    r.input(&name, text.as_bytes());
    r.section("h1", abelianization(&pi1_of(&d)?).to_string());
    if let Diagram::Multi(m) = &d {
        if let Some(b) = boundary_invariants(m)? {
            r.section("boundary h1", b.to_string());
        }
        if let Some(g) = genus_lower_bound(m)? {
            r.section(
                "genus bound",
                format!("boundary rank {} achieved genus {} sharp {}", g.boundary_rank, g.achieved, g.is_sharp()),
            );
        }
    }
    write_output(io.output.as_deref(), &r.render())
}

fn parse_tuple(text: &str, rank: usize) -> Result<Vec<Word>> {
    text.split(',')
        .map(|w| Word::parse(w.trim(), rank).map_err(|m| anyhow!("tuple `{text}`: {m}")))
        .collect()
}

fn cmd_distinguish(args: &DistinguishArgs, line: &str) -> Result<u8> {
    let mut limits = SearchLimits::default();
    if let Some(b) = args.bound {
        limits.max_quotient_order = b;
    }
    let mut r = RunReport::new(line);
    let cert = if let Some(path) = &args.diagram {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let d = parse_msd(&text).with_context(|| path.display().to_string())?;
        r.input(path.display().to_string(), text.as_bytes());
        flip_check(&d, &limits)?
    } else {
        let path = args.presentation.as_ref().expect("clap enforces presentation or diagram");
        let (Some(t1), Some(t2)) = (&args.t1, &args.t2) else {
            bail!("--t1 and --t2 are required with --presentation");
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let p = GroupPresentation::parse(&text).with_context(|| path.display().to_string())?;
        r.input(path.display().to_string(), text.as_bytes());
        let rank = p.generator_count();
        let (a, b) = (parse_tuple(t1, rank)?, parse_tuple(t2, rank)?);
        r.section("tuples", format!("t1: {}\nt2: {}", t1, t2));
        distinguish(&p, &a, &b, &limits)?
    };
    r.section("certificate", cert.report());
    write_output(args.output.as_deref(), &r.render())?;
    Ok(match cert.verdict {
        Verdict::Distinct => 0,
        Verdict::SameOrbit => 10,
        Verdict::Inconclusive => 20,
    })
}

fn cmd_render(io: &Io, svg: Option<&Path>) -> Result<()> {
    let svg_text = render_svg(&read_msd(io)?);
    write_output(svg.or(io.output.as_deref()), &svg_text)
}
