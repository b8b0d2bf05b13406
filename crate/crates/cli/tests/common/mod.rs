//! Command-line cases shared by the golden and acceptance tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    /// Files written under the scratch directory that belong to the golden.
    pub outputs: &'static [&'static str],
}

pub const CASES: &[Case] = &[
    Case { name: "entropy_h1", args: &["entropy", "--graph", "@barbell.txt"], outputs: &[] },
    Case { name: "entropy_k4", args: &["entropy", "--graph", "@k4.txt"], outputs: &[] },
    Case {
        name: "entropy_tree",
        args: &["entropy", "--graph", "@barbell.txt", "--tree", "@barbell_split.json"],
        outputs: &[],
    },
    Case {
        name: "entropy_dim2",
        args: &["entropy", "--graph", "@barbell.txt", "--dim", "2", "--out", "%tree.json", "--trace", "%trace.txt"],
        outputs: &["tree.json", "trace.txt"],
    },
    Case { name: "entropy_dim3", args: &["entropy", "--graph", "@barbell.txt", "--dim", "3"], outputs: &[] },
    Case {
        name: "oracle_barbell",
        args: &["oracle", "--graph", "@barbell.txt", "--height", "2", "--out", "%tree.json"],
        outputs: &["tree.json"],
    },
    Case { name: "oracle_p3", args: &["oracle", "--graph", "@p3.txt", "--height", "2"], outputs: &[] },
    Case { name: "oracle_barbell_h3", args: &["oracle", "--graph", "@barbell.txt", "--height", "3"], outputs: &[] },
    Case { name: "oracle_guard", args: &["oracle", "--graph", "@ring12.txt", "--height", "2"], outputs: &[] },
    Case {
        name: "build_blocks2",
        args: &[
            "build", "--similarity", "@blocks2.csv", "--height", "2", "--features", "@blocks2_features.json",
            "--out-graph", "%graph.txt", "--out-space", "%space.json",
        ],
        outputs: &["graph.txt", "space.json"],
    },
    Case {
        name: "build_blocks3",
        args: &["build", "--similarity", "@blocks3.csv", "--height", "2", "--out-graph", "%g.txt", "--out-space", "%s.json"],
        outputs: &[],
    },
    Case {
        name: "build_uniform",
        args: &["build", "--similarity", "@uniform.csv", "--height", "2", "--out-graph", "%g.txt", "--out-space", "%s.json"],
        outputs: &[],
    },
    Case {
        name: "build_asymmetric",
        args: &["build", "--similarity", "@asymmetric.csv", "--height", "2", "--out-graph", "%g.txt", "--out-space", "%s.json"],
        outputs: &[],
    },
    Case {
        name: "build_zero",
        args: &["build", "--similarity", "@zero.csv", "--height", "2", "--out-graph", "%g.txt", "--out-space", "%s.json"],
        outputs: &[],
    },
    Case {
        name: "insert_block",
        args: &["insert", "--space", "@blocks2_space.json", "--point", "@point_block.json", "--out", "%space.json"],
        outputs: &["space.json"],
    },
    Case {
        name: "insert_featureless",
        args: &["insert", "--space", "@blocks2_space.json", "--point", "@point_featureless.json", "--out", "%space.json"],
        outputs: &[],
    },
    Case {
        name: "insert_zero",
        args: &["insert", "--space", "@blocks2_space.json", "--point", "@point_zero.json", "--out", "%space.json"],
        outputs: &[],
    },
    Case {
        name: "insert_duplicate",
        args: &["insert", "--space", "@blocks2_space.json", "--point", "@point_duplicate.json", "--out", "%space.json"],
        outputs: &[],
    },
    Case {
        name: "knowledge_worked",
        args: &[
            "knowledge", "--graph", "@worked.txt", "--tree", "@worked_tree.json", "--features",
            "@worked_features.json", "--out", "%trees.json",
        ],
        outputs: &["trees.json"],
    },
    Case {
        name: "knowledge_star",
        args: &[
            "knowledge", "--graph", "@worked.txt", "--tree", "@worked_star.json", "--features",
            "@worked_features.json", "--out", "%trees.json",
        ],
        outputs: &["trees.json"],
    },
    Case {
        name: "knowledge_empty",
        args: &[
            "knowledge", "--graph", "@worked.txt", "--tree", "@worked_tree.json", "--features",
            "@empty_features.json", "--out", "%trees.json",
        ],
        outputs: &[],
    },
    Case { name: "unknown_flag", args: &["entropy", "--graph", "@barbell.txt", "--bogus"], outputs: &[] },
];

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"))
}

/// Runs a case in a fresh scratch directory and renders everything it
/// produced.
pub fn render(case: &Case) -> String {
    let scratch = tempfile::tempdir().unwrap();
    let args: Vec<String> = case
        .args
        .iter()
        .map(|a| {
            if let Some(f) = a.strip_prefix('@') {
                fixtures().join(f).display().to_string()
            } else if let Some(f) = a.strip_prefix('%') {
                scratch.path().join(f).display().to_string()
            } else {
                a.to_string()
            }
        })
        .collect();
    let output = Command::new(env!("CARGO_BIN_EXE_silem")).args(&args).output().unwrap();
    let mut text = String::new();
    let _ = writeln!(text, "exit: {}", output.status.code().unwrap_or(-1));
    let _ = write!(text, "--- stdout\n{}", String::from_utf8_lossy(&output.stdout));
    let _ = write!(text, "--- stderr\n{}", String::from_utf8_lossy(&output.stderr));
    for f in case.outputs {
        let body = std::fs::read_to_string(scratch.path().join(f)).unwrap_or_else(|_| "<missing>\n".into());
        let _ = write!(text, "--- file {f}\n{body}");
    }
    text
}
