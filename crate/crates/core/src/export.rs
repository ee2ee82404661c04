//! JSON, DOT and CSV artifacts. Output is byte-stable for fixed inputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::endgame::EndgameState;
use crate::graph::{labels, AdjacencyOracle, VertexId, Window};
use crate::rays::Horizon;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "dot" => Ok(Self::Dot),
            "csv" => Ok(Self::Csv),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Dot => "dot",
            Self::Csv => "csv",
        }
    }
}

#[derive(Serialize)]
struct WindowJson {
    center: String,
    radius: u32,
    certified_radius: u32,
    vertices: Vec<String>,
    edges: Vec<[String; 2]>,
}

pub fn window_json(window: &Window) -> String {
    let oracle = window.oracle_arc().as_ref();
    let doc = WindowJson {
        center: oracle.vertex_label(window.center()),
        radius: window.radius(),
        certified_radius: window.certified_radius(),
        vertices: labels(oracle, window.vertices()),
        edges: window
            .edges()
            .into_iter()
            .map(|(u, v)| [oracle.vertex_label(u), oracle.vertex_label(v)])
            .collect(),
    };
    to_json(&doc)
}

/// DOT with every vertex labelled by its distance from the center.
pub fn window_dot(window: &Window) -> String {
    let oracle = window.oracle_arc().as_ref();
    let mut out = String::from("graph window {\n");
    for &v in window.vertices() {
        let depth = window.depth(v).unwrap_or(0);
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{}\\n{}\"];",
            oracle.vertex_label(v),
            oracle.vertex_label(v),
            depth
        );
    }
    for (u, v) in window.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\";",
            oracle.vertex_label(u),
            oracle.vertex_label(v)
        );
    }
    out.push_str("}\n");
    out
}

/// Common report envelope for every construction.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub construction: String,
    pub inputs: BTreeMap<String, String>,
    pub horizon: Horizon,
    pub certification: String,
    pub elements: Vec<String>,
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl Report {
    pub fn new(construction: &str, horizon: Horizon) -> Self {
        Self {
            construction: construction.to_string(),
            inputs: BTreeMap::new(),
            horizon,
            certification: "Truncated".to_string(),
            elements: Vec::new(),
            verdict: None,
            details: None,
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable report");
    s.push('\n');
    s
}

/// DOT of the ball `vertices` with members of each named set filled in its
/// own colour; vertices in several sets get the first.
pub fn overlay_dot(
    oracle: &dyn AdjacencyOracle,
    vertices: &[VertexId],
    sets: &[(String, Vec<VertexId>)],
) -> String {
    const COLORS: [&str; 6] = [
        "lightblue",
        "salmon",
        "palegreen",
        "khaki",
        "plum",
        "orange",
    ];
    let mut out = String::from("graph overlay {\n  node [style=filled, fillcolor=white];\n");
    for (i, (name, _)) in sets.iter().enumerate() {
        let _ = writeln!(out, "  // {}: {}", COLORS[i % COLORS.len()], name);
    }
    for &v in vertices {
        let member: Vec<usize> = sets
            .iter()
            .enumerate()
            .filter(|(_, (_, s))| s.contains(&v))
            .map(|(i, _)| i)
            .collect();
        let label = oracle.vertex_label(v);
        match member.first() {
            Some(&i) => {
                let names: Vec<&str> = member.iter().map(|&j| sets[j].0.as_str()).collect();
                let _ = writeln!(
                    out,
                    "  \"{label}\" [fillcolor={}, tooltip=\"{}\"];",
                    COLORS[i % COLORS.len()],
                    names.join(",")
                );
            }
            None => {
                let _ = writeln!(out, "  \"{label}\";");
            }
        }
    }
    for (i, &u) in vertices.iter().enumerate() {
        for w in oracle.neighbors(u) {
            if let Some(j) = vertices.iter().position(|&x| x == w) {
                if i < j {
                    let _ = writeln!(
                        out,
                        "  \"{}\" -- \"{}\";",
                        oracle.vertex_label(u),
                        oracle.vertex_label(w)
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// CSV with header `n,s_n,|T_n|,g_n,k_n,|H_n|`.
pub fn endgame_csv(oracle: &dyn AdjacencyOracle, state: &EndgameState) -> Result<String> {
    let gen_labels = oracle.generator_labels().ok_or(Error::NotCayley)?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["n", "s_n", "|T_n|", "g_n", "k_n", "|H_n|"])
        .map_err(csv_error)?;
    for row in &state.rows {
        let s = row.s_n.render(gen_labels);
        writer
            .write_record([
                row.n.to_string(),
                if s.is_empty() { "e".to_string() } else { s },
                row.t_n.len().to_string(),
                oracle.vertex_label(row.g_n),
                row.k_n.to_string(),
                row.h_n.len().to_string(),
            ])
            .map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_artifact(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}
