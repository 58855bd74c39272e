use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use simplex_embed::chamber_search::{
    finite_maximal_parabolics, replay_not_found, search_embedding, EmbeddingCertificate, SearchOptions, SearchReport,
    Verdict,
};
use simplex_embed::diagrams::{
    classify, crystallographic_variants, enumerate_simplicial, format_diagram, named_diagram, parse_diagram_text,
    visual_subgroup, CoxeterDiagram, DynkinDiagram, EdgeMark, Label, LabelSet, VisualVertex,
};
use simplex_embed::diophantine::{
    anchored_systems, build_with_norm, find_obstruction, search_witness, DiophAnchor, DiophSystem,
};
use simplex_embed::lorentz::{Realization, VertexKind};
use simplex_embed::pipeline::{
    build_lattice, closure, export, verify_evidence, Catalog, Config, EdgeStatus, Evidence, Format, LatticeEdge, Store,
};
use simplex_embed::roots::{
    check_subsystem, compose_towers, lift_all_variants, lift_embedding, RootSystemSpec, SubsystemCertificate,
    SubsystemOutcome, TowerCertificate,
};
use simplex_embed::scalars::set_sign_start_bits;

const EXIT_OK: u8 = 0;
const EXIT_NOT_EXISTS: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_FAILED: u8 = 3;
const EXIT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(name = "simplex-embed", version, about = "Embeddings between hyperbolic simplicial reflection groups")]
struct Cli {
    /// TOML config file (precision, safeguard limits, worker count).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the diagrams in a text file.
    Classify { file: PathBuf },
    /// List hyperbolic simplex diagrams of a rank (all ranks if omitted).
    Enumerate(EnumerateArgs),
    /// Chamber search for an embedding of H into G.
    Embed(EmbedArgs),
    /// Shrink an edge of G into one generator.
    Visual(VisualArgs),
    /// Diophantine obstructions and witnesses for crystallographic G.
    Dioph(DiophArgs),
    /// Check that integer vectors are simple roots of a root subsystem.
    Subsystem {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        roots: PathBuf,
    },
    /// Lift an embedding certificate to a root subsystem.
    Lift {
        #[arg(long)]
        cert: PathBuf,
        /// Dynkin diagram file for G, or `all` for every variant.
        #[arg(long)]
        variant: String,
        /// Dynkin diagram file for H.
        #[arg(long)]
        h_variant: Option<PathBuf>,
    },
    /// Build or extend a lattice store and print it.
    Lattice(LatticeArgs),
    /// Re-verify a stored certificate, report, evidence document, edge or store.
    Verify { file: PathBuf },
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, conflicts_with = "ideal")]
    compact: bool,
    /// Only simplices all of whose vertices are ideal.
    #[arg(long)]
    ideal: bool,
    /// Allowed labels, e.g. `3,4,6,inf` (required for rank 3 listings
    /// other than `--ideal`).
    #[arg(long)]
    labels: Option<String>,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    h: String,
    #[arg(long)]
    g: String,
    #[arg(long)]
    all: bool,
    #[arg(long)]
    max_chambers: Option<usize>,
    /// Vertex of H (1-based) whose generator is searched for.
    #[arg(long)]
    missing_vertex: Option<usize>,
    /// Write the full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VisualArgs {
    #[arg(long)]
    g: String,
    /// Edge to shrink, `i,j` (1-based).
    #[arg(long)]
    shrink: String,
    /// Generators to keep: `*` for the new one and 1-based vertices.
    #[arg(long)]
    keep: Option<String>,
}

#[derive(Args)]
struct DiophArgs {
    #[arg(long)]
    h: String,
    #[arg(long)]
    g: String,
    /// `HV:COEFFS` or `HV:vK` (1-based): H vertex HV goes to the given
    /// root of G. Repeat for each anchor generator.
    #[arg(long)]
    anchor: Vec<String>,
    /// The vertex of H whose generator is unknown (1-based).
    #[arg(long)]
    missing: Option<usize>,
    /// Comma-separated moduli.
    #[arg(long)]
    moduli: Option<String>,
    /// Coordinate bound for the witness search.
    #[arg(long)]
    bound: Option<i64>,
    /// Index of the crystallographic variant of G (0-based).
    #[arg(long, default_value_t = 0)]
    variant: usize,
    /// Squared length of the unknown root (default: every root length of G).
    #[arg(long)]
    norm: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LatticeArgs {
    /// Store directory (created if needed).
    #[arg(long)]
    build: PathBuf,
    #[arg(long, default_value = "json")]
    out: String,
    #[arg(long)]
    max_rank: Option<usize>,
    /// Restrict the catalog to these names (comma-separated); default is
    /// the built-in catalog.
    #[arg(long)]
    names: Option<String>,
    #[arg(long)]
    max_chambers: Option<usize>,
}

struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_ERROR, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn fail(msg: impl Into<String>) -> Failure {
    Failure(EXIT_ERROR, msg.into())
}

/// A diagram from a file path or a name.
fn load_spec(spec: &str) -> Result<(CoxeterDiagram, String, Option<DynkinDiagram>), Failure> {
    let p = Path::new(spec);
    if p.is_file() {
        let text = fs::read_to_string(p)?;
        let parsed = parse_diagram_text(&text)?;
        let first = parsed.into_iter().next().ok_or_else(|| fail(format!("{spec}: no diagram")))?;
        let name = first.name.clone().unwrap_or_else(|| spec.to_string());
        return Ok((first.diagram, name, first.dynkin));
    }
    Ok((named_diagram(spec)?, spec.to_string(), None))
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), Failure> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| fail(format!("bad list item {x:?}"))))
        .collect()
}

fn one_based(v: usize, n: usize, what: &str) -> Result<usize, Failure> {
    if v == 0 || v > n {
        return Err(fail(format!("{what} {v} out of range 1..={n}")));
    }
    Ok(v - 1)
}

fn cmd_classify(file: &Path, json: bool) -> Outcome {
    let parsed = parse_diagram_text(&fs::read_to_string(file)?)?;
    #[derive(Serialize)]
    struct Row {
        name: Option<String>,
        rank: usize,
        class: simplex_embed::diagrams::DiagramClass,
        ideal_vertices: Option<Vec<usize>>,
        crystallographic_variants: Vec<Vec<u32>>,
    }
    let rows: Vec<Row> = parsed
        .iter()
        .map(|p| {
            let class = classify(&p.diagram);
            let ideal = Realization::new(&p.diagram, None)
                .ok()
                .map(|r| (0..r.rank()).filter(|&v| r.vertices[v].kind == VertexKind::Ideal).map(|v| v + 1).collect());
            Row {
                name: p.name.clone(),
                rank: p.diagram.rank(),
                class,
                ideal_vertices: ideal,
                crystallographic_variants: crystallographic_variants(&p.diagram).into_iter().map(|v| v.norms).collect(),
            }
        })
        .collect();
    if json {
        print_json(&rows)?;
    } else {
        for r in &rows {
            let name = r.name.as_deref().unwrap_or("-");
            println!(
                "{name}: rank {} {:?} signature {:?} ideal vertices {:?} variants {:?}",
                r.rank, r.class.tag, r.class.signature, r.ideal_vertices, r.crystallographic_variants
            );
        }
    }
    Ok(EXIT_OK)
}

fn ideal_name(d: &CoxeterDiagram) -> Option<&'static str> {
    let id = simplex_embed::pipeline::diagram_id(d);
    simplex_embed::diagrams::NAMED_DIAGRAMS
        .iter()
        .copied()
        .find(|n| named_diagram(n).is_ok_and(|x| simplex_embed::pipeline::diagram_id(&x) == id))
}

fn cmd_enumerate(a: &EnumerateArgs, json: bool) -> Outcome {
    let ranks: Vec<usize> = match a.rank {
        Some(r) => vec![r],
        None if a.ideal || a.compact => (3..=11).collect(),
        None => (4..=11).collect(),
    };
    let mut out: Vec<(usize, CoxeterDiagram)> = Vec::new();
    for rank in ranks {
        let labels = match (&a.labels, rank) {
            (Some(s), _) => {
                let mut v = Vec::new();
                for t in s.split(',') {
                    v.push(t.trim().parse::<Label>().map_err(|e| fail(e.to_string()))?);
                }
                LabelSet::Restricted(v)
            }
            // an ideal triangle has three zero angles; a compact one needs
            // finite labels, which are unbounded in rank 3
            (None, 3) if a.ideal => LabelSet::Restricted(vec![Label::INF]),
            (None, 3) => return Err(fail("rank 3 needs --labels (there are infinitely many triangle groups)")),
            (None, _) => LabelSet::Unrestricted,
        };
        for d in enumerate_simplicial(rank, &labels)? {
            let keep = match Realization::new(&d, None) {
                Ok(r) if a.ideal => r.vertices.iter().all(|v| v.kind == VertexKind::Ideal),
                Ok(r) if a.compact => r.is_compact(),
                Ok(_) => true,
                Err(_) => false,
            };
            if keep {
                out.push((rank, d));
            }
        }
    }
    if json {
        #[derive(Serialize)]
        struct Row<'a> {
            rank: usize,
            name: Option<&'a str>,
            diagram: &'a CoxeterDiagram,
        }
        let rows: Vec<Row> = out.iter().map(|(r, d)| Row { rank: *r, name: ideal_name(d), diagram: d }).collect();
        print_json(&rows)?;
    } else {
        for (_, d) in &out {
            print!("{}", format_diagram(d, ideal_name(d), None));
            println!();
        }
        eprintln!("{} diagram(s)", out.len());
    }
    Ok(EXIT_OK)
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Found => EXIT_OK,
        Verdict::NotFound => EXIT_NOT_EXISTS,
        Verdict::Inapplicable | Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn cmd_embed(a: &EmbedArgs, cfg: &Config, json: bool) -> Outcome {
    let (h, hn, _) = load_spec(&a.h)?;
    let (g, gn, _) = load_spec(&a.g)?;
    let missing_vertex = a.missing_vertex.map(|v| one_based(v, h.rank(), "vertex")).transpose()?;
    let opts = SearchOptions { max_chambers: a.max_chambers.unwrap_or(cfg.max_chambers), all: a.all, missing_vertex };
    let report = search_embedding(&h, &g, &opts)?;
    if let Some(p) = &a.out {
        write_json(p, &report)?;
    }
    if json {
        print_json(&report)?;
        return Ok(verdict_code(report.verdict));
    }
    let word = match report.verdict {
        Verdict::Found => "exists",
        Verdict::NotFound => "not-exists",
        Verdict::Inapplicable => "inapplicable",
        Verdict::Inconclusive => "inconclusive",
    };
    println!("{hn} in {gn}: {word}");
    if let Some(idx) = &report.area_index {
        println!(
            "area/π: H {} G {} ratio {}",
            idx.h_area_over_pi, idx.g_area_over_pi, idx.ratio
        );
    }
    if let Some(j) = report.missing_vertex {
        println!("missing vertex {}, {} anchor(s)", j + 1, report.stats.anchors);
    }
    for run in &report.runs {
        println!(
            "  anchor {:?}: {:?}, R in [{:.6}, {:.6}], {} chambers, {} pruned, {} mirrors, {} pruning witnesses",
            run.anchor.g_vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
            run.outcome,
            run.radius.r.lo,
            run.radius.r.hi,
            run.chambers_expanded,
            run.chambers_pruned,
            run.mirrors_tested,
            run.frontier.len()
        );
    }
    for (k, c) in report.certificates.iter().enumerate() {
        let ok = c.verify().is_ok();
        println!("  certificate {k}: re-verified {}", if ok { "ok" } else { "FAILED" });
        for (i, r) in c.roots.iter().enumerate() {
            let coords: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            println!("    u{} = ({})", i + 1, coords.join(", "));
        }
    }
    if let Some(n) = &report.note {
        println!("note: {n}");
    }
    Ok(verdict_code(report.verdict))
}

fn cmd_visual(a: &VisualArgs, json: bool) -> Outcome {
    let (g, _, _) = load_spec(&a.g)?;
    let n = g.rank();
    let e: Vec<usize> = parse_list(&a.shrink)?;
    if e.len() != 2 {
        return Err(fail("--shrink takes two vertices i,j"));
    }
    let (i, j) = (one_based(e[0], n, "vertex")?, one_based(e[1], n, "vertex")?);
    let keep: Option<Vec<VisualVertex>> = match &a.keep {
        None => None,
        Some(s) => Some(
            s.split(',')
                .map(|t| match t.trim() {
                    "*" => Ok(VisualVertex::Star),
                    x => x
                        .parse::<usize>()
                        .map_err(|_| fail(format!("bad vertex {x:?}")))
                        .and_then(|v| one_based(v, n, "vertex"))
                        .map(VisualVertex::Original),
                })
                .collect::<Result<_, _>>()?,
        ),
    };
    let vs = visual_subgroup(&g, (i, j), keep.as_deref()).ok_or_else(|| fail("not an edge, or a bad keep list"))?;
    if json {
        print_json(&vs)?;
        return Ok(EXIT_OK);
    }
    let name = |v: &VisualVertex| match v {
        VisualVertex::Star => "*".to_string(),
        VisualVertex::Original(k) => (k + 1).to_string(),
    };
    println!("generators: {}", vs.vertices.iter().map(name).collect::<Vec<_>>().join(" "));
    for a in 0..vs.vertices.len() {
        for b in a + 1..vs.vertices.len() {
            let mark = match vs.marks[a][b] {
                Some(EdgeMark::Label(l)) if l == Label::TWO => continue,
                Some(EdgeMark::Label(l)) => l.to_string(),
                Some(EdgeMark::Dotted) => "dotted".into(),
                Some(EdgeMark::Irregular) => "irregular".into(),
                None => continue,
            };
            println!("  {} - {}: {mark}", name(&vs.vertices[a]), name(&vs.vertices[b]));
        }
    }
    let class = classify(&vs.diagram);
    if vs.is_simplex_candidate() {
        println!("diagram: {:?}", class.tag);
    } else {
        println!("dotted pairs present: not a simplex diagram");
    }
    Ok(EXIT_OK)
}

fn parse_anchor(s: &str, n: usize, h_rank: usize) -> Result<(usize, Vec<i64>), Failure> {
    let (hv, rest) = s.split_once(':').ok_or_else(|| fail(format!("anchor {s:?} is not HV:COEFFS")))?;
    let hv = one_based(hv.trim().parse().map_err(|_| fail(format!("bad vertex in {s:?}")))?, h_rank, "H vertex")?;
    let rest = rest.trim();
    let coeffs = match rest.strip_prefix('v') {
        Some(k) => {
            let k = one_based(k.parse().map_err(|_| fail(format!("bad root in {s:?}")))?, n, "root")?;
            (0..n).map(|i| (i == k) as i64).collect()
        }
        None => parse_list::<i64>(rest)?,
    };
    if coeffs.len() != n {
        return Err(fail(format!("anchor {s:?} needs {n} coefficients")));
    }
    Ok((hv, coeffs))
}

#[derive(Serialize)]
struct DiophRow {
    system: DiophSystem,
    obstruction: Option<simplex_embed::diophantine::Obstruction>,
    witness: Option<simplex_embed::diophantine::WitnessSearch>,
}

fn cmd_dioph(a: &DiophArgs, cfg: &Config, json: bool) -> Outcome {
    let (h, hn, _) = load_spec(&a.h)?;
    let (g, gn, gdyn) = load_spec(&a.g)?;
    let variant = match gdyn {
        Some(d) => d,
        None => crystallographic_variants(&g)
            .into_iter()
            .nth(a.variant)
            .ok_or_else(|| fail(format!("{gn} has no crystallographic variant {}", a.variant)))?,
    };
    let moduli = match &a.moduli {
        Some(s) => parse_list::<u64>(s)?,
        None => cfg.moduli.clone(),
    };
    let bound = a.bound.unwrap_or(cfg.witness_bound);
    let n = g.rank();
    let systems: Vec<DiophSystem> = if a.anchor.is_empty() {
        let missing = match a.missing {
            Some(m) => one_based(m, h.rank(), "vertex")?,
            None => *finite_maximal_parabolics(&h)
                .first()
                .ok_or_else(|| fail("H has no finite vertex; give --missing and --anchor"))?,
        };
        let mut s = anchored_systems(&variant, &h, missing);
        if let Some(q) = a.norm {
            s.retain(|x| x.norm == q);
        }
        s
    } else {
        let mut h_vertices = Vec::new();
        let mut roots = Vec::new();
        for s in &a.anchor {
            let (hv, r) = parse_anchor(s, n, h.rank())?;
            h_vertices.push(hv);
            roots.push(r);
        }
        let missing = match a.missing {
            Some(m) => one_based(m, h.rank(), "vertex")?,
            None => (0..h.rank())
                .find(|v| !h_vertices.contains(v))
                .ok_or_else(|| fail("every vertex of H is anchored"))?,
        };
        let anchor = DiophAnchor { missing, h_vertices, roots };
        let mut norms: Vec<i64> = match a.norm {
            Some(q) => vec![q],
            None => variant.norms.iter().map(|&q| q as i64).collect(),
        };
        norms.sort_unstable();
        norms.dedup();
        let mut out = Vec::new();
        for q in norms {
            match build_with_norm(&variant, &h, &anchor, q) {
                Ok(s) => out.push(s),
                Err(e) => eprintln!("norm {q}: {e}"),
            }
        }
        out
    };
    if systems.is_empty() {
        return Err(Failure(EXIT_INCONCLUSIVE, "no anchored system".into()));
    }
    let mut rows = Vec::new();
    for sys in systems {
        let obstruction = find_obstruction(&sys, &moduli);
        let witness = obstruction.is_none().then(|| search_witness(&sys, bound));
        rows.push(DiophRow { system: sys, obstruction, witness });
    }
    let all_obstructed = rows.iter().all(|r| r.obstruction.is_some());
    let any_real = rows.iter().any(|r| {
        r.witness
            .as_ref()
            .and_then(|w| w.witness.as_ref())
            .is_some_and(|w| w.root == simplex_embed::roots::RootKind::Real)
    });
    if let Some(p) = &a.out {
        write_json(p, &rows)?;
    }
    if json {
        print_json(&rows)?;
    } else {
        println!("{hn} in {gn} (lengths {:?})", variant.norms);
        for (k, r) in rows.iter().enumerate() {
            println!("system {k}:");
            for eq in r.system.equations() {
                println!("  {eq}");
            }
            if let Some(o) = &r.obstruction {
                for line in o.derivation.iter().skip(r.system.equations().len()) {
                    println!("  {line}");
                }
                println!("  obstruction: {:?} modulus {}", o.kind, o.modulus);
            }
            if let Some(w) = &r.witness {
                match &w.witness {
                    Some(x) => println!("  witness k = {:?} ({:?})", x.coefficients, x.root),
                    None => println!("  no witness"),
                }
                println!("  {}", w.note);
            }
        }
    }
    Ok(if any_real {
        EXIT_OK
    } else if all_obstructed {
        EXIT_NOT_EXISTS
    } else {
        EXIT_INCONCLUSIVE
    })
}

fn read_roots(path: &Path) -> Result<Vec<Vec<i64>>, Failure> {
    let text = fs::read_to_string(path)?;
    if let Ok(v) = serde_json::from_str::<Vec<Vec<i64>>>(&text) {
        return Ok(v);
    }
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<i64>().map_err(|_| fail(format!("bad coefficient {t:?}"))))
                .collect()
        })
        .collect()
}

fn load_dynkin(path: &Path) -> Result<DynkinDiagram, Failure> {
    let parsed = parse_diagram_text(&fs::read_to_string(path)?)?;
    let p = parsed.into_iter().next().ok_or_else(|| fail("no diagram"))?;
    match p.dynkin {
        Some(d) => Ok(d),
        None => crystallographic_variants(&p.diagram)
            .into_iter()
            .next()
            .filter(|_| p.diagram.is_simply_laced())
            .ok_or_else(|| fail("give arrows for a diagram with several root lengths")),
    }
}

fn outcome_code(o: &SubsystemOutcome) -> u8 {
    match o {
        SubsystemOutcome::Certified(_) => EXIT_OK,
        SubsystemOutcome::DifferenceIsRoot { .. } => EXIT_NOT_EXISTS,
    }
}

fn print_outcome(o: &SubsystemOutcome, json: bool) -> Result<(), Failure> {
    if json {
        return print_json(o);
    }
    match o {
        SubsystemOutcome::Certified(c) => {
            println!("root subsystem with Cartan matrix {:?}", c.cartan);
            println!("norms {:?}, hyperbolic {}", c.norms, c.hyperbolic);
        }
        SubsystemOutcome::DifferenceIsRoot { i, j, difference, kind } => {
            println!("β{} − β{} = {:?} is a {:?} root: not a root subsystem", i + 1, j + 1, difference, kind);
        }
    }
    Ok(())
}

fn cmd_subsystem(spec: &Path, roots: &Path, json: bool) -> Outcome {
    let s = RootSystemSpec::new(load_dynkin(spec)?);
    let betas = read_roots(roots)?;
    let o = check_subsystem(&s, &betas)?;
    print_outcome(&o, json)?;
    Ok(outcome_code(&o))
}

/// An embedding certificate from a certificate, search report or
/// evidence document.
fn read_certificate(path: &Path) -> Result<EmbeddingCertificate, Failure> {
    let text = fs::read_to_string(path)?;
    if let Ok(c) = serde_json::from_str::<EmbeddingCertificate>(&text) {
        return Ok(c);
    }
    if let Ok(r) = serde_json::from_str::<SearchReport>(&text) {
        return r.certificates.into_iter().next().ok_or_else(|| fail("report has no certificate"));
    }
    if let Ok(ev) = serde_json::from_str::<Evidence>(&text) {
        return match ev {
            Evidence::Identity { certificate }
            | Evidence::Imported { certificate }
            | Evidence::Visual { certificate, .. }
            | Evidence::DiophantineWitness { certificate, .. } => Ok(certificate),
            Evidence::Search { report } => report.certificates.into_iter().next().ok_or_else(|| fail("no certificate")),
            Evidence::Composed { certificate: Some(c), .. } => Ok(c),
            _ => Err(fail("evidence carries no certificate")),
        };
    }
    Err(fail(format!("{}: not a certificate", path.display())))
}

fn cmd_lift(cert: &Path, variant: &str, h_variant: Option<&Path>, json: bool) -> Outcome {
    let c = read_certificate(cert)?;
    c.verify()?;
    if variant == "all" {
        let mut worst = EXIT_OK;
        for (v, r) in lift_all_variants(&c) {
            println!("variant {:?}:", v.norms);
            match r {
                Ok(o) => {
                    print_outcome(&o, json)?;
                    worst = worst.max(outcome_code(&o));
                }
                Err(e) => {
                    println!("  lift failed: {e}");
                    worst = EXIT_FAILED;
                }
            }
        }
        return Ok(worst);
    }
    let gv = load_dynkin(Path::new(variant))?;
    let hv = h_variant.map(load_dynkin).transpose()?;
    let o = lift_embedding(&c, &gv, hv.as_ref()).map_err(|e| Failure(EXIT_FAILED, e.to_string()))?;
    print_outcome(&o, json)?;
    Ok(outcome_code(&o))
}

fn lattice_config(a: &LatticeArgs, cfg: &Config) -> Config {
    let mut c = cfg.clone();
    if let Some(r) = a.max_rank {
        c.max_rank = r;
    }
    if let Some(m) = a.max_chambers {
        c.lattice_max_chambers = m;
    }
    c
}

fn cmd_lattice(a: &LatticeArgs, cfg: &Config) -> Outcome {
    let format: Format = a.out.parse()?;
    let cfg = lattice_config(a, cfg);
    let catalog = match &a.names {
        None => Catalog::builtin(cfg.max_rank),
        Some(list) => {
            let mut c = Catalog::new();
            for name in list.split(';').flat_map(split_names) {
                let (d, _, _) = load_spec(&name)?;
                c.insert(&d, &[&name])?;
            }
            c.insert(&named_diagram(simplex_embed::pipeline::RANK_TWO)?, &[simplex_embed::pipeline::RANK_TWO])?;
            c
        }
    };
    let mut store = Store::open(&a.build)?;
    let (mut lattice, failures) = store.load_checked(false)?;
    for (s, t, m) in &failures {
        eprintln!("edge {s} -> {t}: {m}");
    }
    build_lattice(&catalog, &cfg, &mut lattice);
    closure(&mut lattice);
    store.save(&lattice)?;
    let bytes = export(&lattice, format)?;
    use std::io::Write;
    std::io::stdout().write_all(&bytes)?;
    if format == Format::Json {
        println!();
    }
    let count = |s: EdgeStatus| lattice.edges.iter().filter(|e| e.status == s).count();
    eprintln!(
        "{} entries, {} exists, {} not-exists, {} inconclusive",
        lattice.entries.len(),
        count(EdgeStatus::Exists),
        count(EdgeStatus::NotExists),
        count(EdgeStatus::Inconclusive)
    );
    Ok(EXIT_OK)
}

/// Split a comma-separated list of names, keeping commas inside brackets.
fn split_names(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn verify_store(dir: &Path) -> Outcome {
    let store = Store::open(dir)?;
    let (l, failures) = store.load_checked(true)?;
    for (s, t, m) in &failures {
        println!("FAIL {s} -> {t}: {m}");
    }
    let negatives = l.edges.iter().filter(|e| e.status == EdgeStatus::NotExists).count();
    println!("{} edges checked, {} not-exists replayed, {} failure(s)", l.edges.len(), negatives, failures.len());
    Ok(if failures.is_empty() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_verify(path: &Path) -> Outcome {
    if path.is_dir() {
        return verify_store(path);
    }
    let text = fs::read_to_string(path)?;
    let bad = |m: String| Failure(EXIT_FAILED, m);
    if let Ok(edge) = serde_json::from_str::<LatticeEdge>(&text) {
        let root = path
            .parent()
            .and_then(Path::parent)
            .ok_or_else(|| fail("an edge file must sit in a store's edges/ directory"))?;
        let store = Store::open(root)?;
        let ev = store.load_evidence(&edge.evidence)?;
        if ev.hash() != edge.evidence {
            return Err(bad("evidence hash mismatch".into()));
        }
        let entry = |id: &str| -> Result<CoxeterDiagram, Failure> {
            let p = root.join("entries").join(format!("{id}.json"));
            let e: simplex_embed::pipeline::CatalogEntry = serde_json::from_str(&fs::read_to_string(p)?)?;
            Ok(e.diagram)
        };
        let s = verify_evidence(&ev, &entry(&edge.sub)?, &entry(&edge.sup)?, true).map_err(bad)?;
        if s != edge.status && edge.status != EdgeStatus::Inconclusive {
            return Err(bad(format!("evidence supports {s:?}, edge claims {:?}", edge.status)));
        }
        println!("ok: {:?} edge {} -> {} re-verified", edge.status, edge.sub, edge.sup);
        return Ok(EXIT_OK);
    }
    if let Ok(ev) = serde_json::from_str::<Evidence>(&text) {
        let (h, g) = evidence_pair(&ev).ok_or_else(|| bad("evidence does not name its pair; verify the edge instead".into()))?;
        let s = verify_evidence(&ev, &h, &g, true).map_err(bad)?;
        println!("ok: evidence supports {s:?}");
        return Ok(EXIT_OK);
    }
    if let Ok(r) = serde_json::from_str::<SearchReport>(&text) {
        match r.verdict {
            Verdict::Found => {
                for c in &r.certificates {
                    c.verify().map_err(|e| bad(e.to_string()))?;
                }
                println!("ok: {} certificate(s) re-verified", r.certificates.len());
            }
            Verdict::NotFound => {
                replay_not_found(&r).map_err(bad)?;
                let w: usize = r.runs.iter().map(|x| x.frontier.len()).sum();
                println!("ok: not-found replayed ({} runs, {w} pruning witnesses)", r.runs.len());
            }
            v => println!("report verdict {v:?}: nothing to verify"),
        }
        return Ok(EXIT_OK);
    }
    if let Ok(c) = serde_json::from_str::<EmbeddingCertificate>(&text) {
        c.verify().map_err(|e| bad(e.to_string()))?;
        println!("ok: certificate re-verified");
        return Ok(EXIT_OK);
    }
    if let Ok(t) = serde_json::from_str::<TowerCertificate>(&text) {
        let again = compose_towers(&t.links).map_err(|e| bad(e.to_string()))?;
        if again.composite != t.composite {
            return Err(bad("composite does not match its links".into()));
        }
        println!("ok: tower of {} link(s) re-verified", t.links.len());
        return Ok(EXIT_OK);
    }
    if let Ok(c) = serde_json::from_str::<SubsystemCertificate>(&text) {
        c.verify().map_err(|e| bad(e.to_string()))?;
        println!("ok: subsystem certificate re-verified");
        return Ok(EXIT_OK);
    }
    if let Ok(rows) = serde_json::from_str::<Vec<serde_json::Value>>(&text) {
        return verify_dioph_rows(&rows).map_err(bad);
    }
    Err(fail(format!("{}: unrecognized document", path.display())))
}

fn evidence_pair(ev: &Evidence) -> Option<(CoxeterDiagram, CoxeterDiagram)> {
    match ev {
        Evidence::Identity { certificate }
        | Evidence::Imported { certificate }
        | Evidence::Visual { certificate, .. }
        | Evidence::DiophantineWitness { certificate, .. }
        | Evidence::Composed { certificate: Some(certificate), .. } => {
            Some((certificate.target.clone(), certificate.ambient.clone()))
        }
        Evidence::Search { report } => Some((report.h.clone(), report.g.clone())),
        _ => None,
    }
}

/// Replay the rows written by `dioph --out`.
fn verify_dioph_rows(rows: &[serde_json::Value]) -> Result<u8, String> {
    let mut code = EXIT_OK;
    for (k, v) in rows.iter().enumerate() {
        let sys: DiophSystem =
            serde_json::from_value(v["system"].clone()).map_err(|e| format!("row {k}: {e}"))?;
        if let Ok(o) = serde_json::from_value::<simplex_embed::diophantine::Obstruction>(v["obstruction"].clone()) {
            if !o.replay(&sys) {
                return Err(format!("row {k}: obstruction does not replay"));
            }
            println!("ok: system {k} obstructed ({:?}, modulus {})", o.kind, o.modulus);
            continue;
        }
        if let Ok(w) = serde_json::from_value::<simplex_embed::diophantine::WitnessSearch>(v["witness"].clone()) {
            match w.witness {
                Some(x) if sys.satisfied_by(&x.coefficients) => println!("ok: system {k} witness solves it"),
                Some(_) => return Err(format!("row {k}: witness does not solve the system")),
                None => {
                    println!("system {k}: open");
                    code = EXIT_INCONCLUSIVE;
                }
            }
        }
    }
    Ok(code)
}

fn run(cli: Cli) -> Outcome {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    set_sign_start_bits(cfg.precision_bits);
    if cfg.workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global();
    }
    match &cli.command {
        Command::Classify { file } => cmd_classify(file, cli.json),
        Command::Enumerate(a) => cmd_enumerate(a, cli.json),
        Command::Embed(a) => cmd_embed(a, &cfg, cli.json),
        Command::Visual(a) => cmd_visual(a, cli.json),
        Command::Dioph(a) => cmd_dioph(a, &cfg, cli.json),
        Command::Subsystem { spec, roots } => cmd_subsystem(spec, roots, cli.json),
        Command::Lift { cert, variant, h_variant } => cmd_lift(cert, variant, h_variant.as_deref(), cli.json),
        Command::Lattice(a) => cmd_lattice(a, &cfg),
        Command::Verify { file } => cmd_verify(file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
