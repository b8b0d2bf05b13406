use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use silem::format::fixed9;
use silem::learning::{
    abstraction_tree_for, build_data_space, knowledge_tree, AbstractionMode, DataSpace, FeatureCatalog, PointRequest,
};
use silem::optimize::{brute_force_2d, brute_force_kd, minimize_kd};
use silem::tree::ROOT;
use silem::{info_report, EncodingTree, Error, ErrorClass, Graph, SimilarityMatrix};

/// Structural information toolkit.
///
/// Formats:
///   graph       edge list, one `u v [weight]` per line, `#` starts a comment
///   tree        JSON, internal nodes {"children": [...]}, leaves {"vertex": "id"}
///   similarity  CSV, first row and first column hold the ids in the same order
///   features    JSON {"id": {"syntax": [...], "semantics": [...]}}
///   point       JSON {"id": "...", "sims": {"id": w}, "syntax": [...], "semantics": [...]}
///
/// Exit codes: 0 ok, 1 parse error, 2 invariant violation, 3 size guard.
#[derive(Parser)]
#[command(name = "silem", version, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One-dimensional entropy, a full report for a given tree, or a greedy
    /// minimization at a height cap.
    Entropy {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, conflicts_with = "dim")]
        tree: Option<PathBuf>,
        /// Height cap for greedy minimization.
        #[arg(long)]
        dim: Option<usize>,
        /// Where to write the minimized tree (with --dim).
        #[arg(long, requires = "dim")]
        out: Option<PathBuf>,
        /// Where to write the greedy move log (with --dim).
        #[arg(long, requires = "dim")]
        trace: Option<PathBuf>,
    },
    /// Exact optimum by exhaustive search on small graphs.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Builds a data space from a similarity matrix.
    Build {
        #[arg(long)]
        similarity: PathBuf,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long, default_value = "syntax")]
        mode: AbstractionMode,
        #[arg(long)]
        out_graph: PathBuf,
        #[arg(long)]
        out_space: PathBuf,
    },
    /// Inserts a new point into a data space.
    Insert {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Knowledge tree and tree of abstractions of a decoder.
    Knowledge {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value = "syntax")]
        mode: AbstractionMode,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Parse => 1,
                ErrorClass::Invariant => 2,
                ErrorClass::Guard => 3,
            })
        }
    }
}

fn write(path: &Path, contents: &str) -> silem::Result<()> {
    let mut text = contents.to_owned();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    Ok(std::fs::write(path, text)?)
}

fn modules(out: &mut String, g: &Graph, t: &EncodingTree) {
    for (i, &m) in t.node(ROOT).children().iter().enumerate() {
        let members: Vec<&str> = t.node(m).marker().iter().map(|v| g.id(v)).collect();
        let _ = writeln!(out, "module {i}: {}", members.join(" "));
    }
}

fn run(command: Command) -> silem::Result<String> {
    let mut out = String::new();
    match command {
        Command::Entropy { graph, tree, dim, out: tree_out, trace } => {
            let g: Graph = Graph::load(graph)?;
            if let Some(path) = tree {
                let t = EncodingTree::from_document(&g, &std::fs::read_to_string(path)?)?;
                out.push_str(&info_report(&g, &t)?.to_text());
            } else if let Some(k) = dim {
                let r = minimize_kd(&g, k)?;
                let _ = writeln!(out, "h1 {}", fixed9(g.one_dim_entropy()));
                let _ = writeln!(out, "h_k {}", fixed9(r.entropy));
                let _ = writeln!(out, "height {}", r.tree.height());
                let _ = writeln!(out, "moves {}", r.trace.len());
                modules(&mut out, &g, &r.tree);
                if let Some(path) = tree_out {
                    write(&path, &r.tree.to_document(&g))?;
                }
                if let Some(path) = trace {
                    write(&path, &r.trace_text())?;
                }
            } else {
                let _ = writeln!(out, "h1 {}", fixed9(g.one_dim_entropy()));
            }
        }
        Command::Oracle { graph, height, out: tree_out } => {
            let g: Graph = Graph::load(graph)?;
            let r = match height {
                0 | 1 => return Err(Error::Argument(format!("height must be at least 2, got {height}"))),
                2 => brute_force_2d(&g)?,
                k => brute_force_kd(&g, k)?,
            };
            let _ = writeln!(out, "h_opt {}", fixed9(r.entropy));
            let _ = writeln!(out, "height {}", r.tree.height());
            modules(&mut out, &g, &r.tree);
            if let Some(path) = tree_out {
                write(&path, &r.tree.to_document(&g))?;
            }
        }
        Command::Build { similarity, height, features, mode, out_graph, out_space } => {
            let sim: SimilarityMatrix = SimilarityMatrix::load(similarity)?;
            let catalog = match features {
                Some(path) => FeatureCatalog::load(path)?,
                None => FeatureCatalog::empty_for(sim.ids()),
            };
            let built = build_data_space(&sim, &catalog, height, mode)?;
            let _ = writeln!(out, "kappa decoding");
            for row in &built.sweep {
                let _ = writeln!(out, "{} {}", row.k, fixed9(row.decoding));
            }
            let space = &built.space;
            let _ = writeln!(out, "kappa0 {}", space.construction_k());
            let _ = writeln!(out, "entropy {}", fixed9(space.entropy()));
            modules(&mut out, space.graph(), space.decoder());
            write(&out_graph, &space.graph().to_edge_list())?;
            write(&out_space, &space.to_json())?;
        }
        Command::Insert { space, point, out: space_out } => {
            let space: DataSpace = DataSpace::load(space)?;
            let request = PointRequest::load(point)?;
            let ins = request.insert_into(&space)?;
            if ins.choice.fallback {
                let _ = writeln!(out, "abstraction: root (fallback)");
            } else {
                let tokens: Vec<&str> = ins.abstraction.iter().map(String::as_str).collect();
                let path = space.abstractions().path(ins.choice.node);
                let _ = writeln!(out, "abstraction: {path} [{}]", tokens.join(" "));
            }
            let _ = writeln!(out, "target: {}", ins.target);
            for row in &ins.sweep {
                let _ = writeln!(out, "attach {} {}", row.k, fixed9(row.decoding));
            }
            let _ = writeln!(out, "k: {}", ins.k);
            let _ = writeln!(out, "module: {}", ins.module);
            let _ = writeln!(out, "entropy_before: {}", fixed9(ins.entropy_before));
            let _ = writeln!(out, "entropy_after: {}", fixed9(ins.entropy_after));
            write(&space_out, &ins.space.to_json())?;
        }
        Command::Knowledge { graph, tree, features, mode, out: doc_out } => {
            let g: Graph = Graph::load(graph)?;
            let t = EncodingTree::from_document(&g, &std::fs::read_to_string(tree)?)?;
            let catalog = FeatureCatalog::load(features)?;
            let kt = knowledge_tree(&g, &t, &catalog)?;
            let at = abstraction_tree_for(&g, &t, &catalog, mode)?;
            at.check_strict_growth()?;
            let root: Vec<&str> = kt.features(ROOT).iter().map(String::as_str).collect();
            let _ = writeln!(out, "root: [{}]", root.join(" "));
            let _ = writeln!(out, "knowledge nodes {}", t.len());
            let _ = writeln!(out, "abstraction nodes {}", at.len());
            let doc = format!(
                "{{\n\"knowledge\": {},\n\"abstractions\": {}\n}}",
                kt.to_document(&g),
                at.to_document(&g)
            );
            write(&doc_out, &doc)?;
        }
    }
    Ok(out)
}
