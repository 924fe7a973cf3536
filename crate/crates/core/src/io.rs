//! Edge-list and transaction file formats.
//!
//! Edge lists hold one `u v` pair of whitespace-separated labels per line.
//! Lines starting with `#` or `%` are comments. A line with a single label
//! declares a node without edges, which is how saved graphs keep isolated
//! nodes. Labels are remapped to dense ids in order of first appearance.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::trust::TransactionMatrices;

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph<W = f64> {
    pub graph: Graph<W>,
    /// Original label of each dense id.
    pub labels: Vec<String>,
    pub duplicates: usize,
    pub self_loops: usize,
}

impl<W: Copy> LoadedGraph<W> {
    pub fn id_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label_index(&self) -> HashMap<&str, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect()
    }
}

fn is_comment(line: &str) -> bool {
    line.starts_with('#') || line.starts_with('%')
}

pub fn load_edge_list<W: Copy>(path: impl AsRef<Path>) -> Result<LoadedGraph<W>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}

/// Parses edge-list text; `origin` only labels error messages.
pub fn parse_edge_list<W: Copy>(text: &str, origin: impl Into<PathBuf>) -> Result<LoadedGraph<W>> {
    let origin = origin.into();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut intern = |label: &str| -> usize {
        if let Some(&id) = index.get(label) {
            return id;
        }
        let id = labels.len();
        index.insert(label.to_owned(), id);
        labels.push(label.to_owned());
        id
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [a] => {
                intern(a);
            }
            [a, b] => {
                let (a, b) = (intern(a), intern(b));
                pairs.push((a, b));
            }
            _ => {
                return Err(Error::Parse {
                    path: origin,
                    line: lineno + 1,
                    message: format!("expected `u v`, found {} fields", tokens.len()),
                })
            }
        }
    }
    let mut graph = Graph::new(labels.len());
    let (mut duplicates, mut self_loops) = (0, 0);
    for (a, b) in pairs {
        if a == b {
            self_loops += 1;
        } else if !graph.add_edge(a, b)? {
            duplicates += 1;
        }
    }
    Ok(LoadedGraph {
        graph,
        labels,
        duplicates,
        self_loops,
    })
}

/// Renders `g` in the edge-list format. Without labels, dense ids are used.
pub fn format_edge_list<W: Copy>(g: &Graph<W>, labels: Option<&[String]>) -> String {
    let name = |x: usize| -> String {
        match labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    };
    let mut out = String::new();
    let _ = writeln!(out, "# nodes {} edges {}", g.node_count(), g.edge_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {}", name(e.u), name(e.v));
    }
    for x in (0..g.node_count()).filter(|&x| g.degree(x) == 0) {
        let _ = writeln!(out, "{}", name(x));
    }
    out
}

pub fn save_edge_list<W: Copy>(
    g: &Graph<W>,
    labels: Option<&[String]>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_edge_list(g, labels)).map_err(|e| Error::io(path, e))
}

/// Reads `i,j,T_ij,U_ij` rows. Node references go through `resolve`, which
/// maps a label to a dense id. Each row sets both `(i, j)` and `(j, i)`.
pub fn load_transactions<F>(
    path: impl AsRef<Path>,
    n: usize,
    resolve: F,
) -> Result<TransactionMatrices>
where
    F: Fn(&str) -> Option<usize>,
{
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_transactions(&text, path, n, resolve)
}

pub fn parse_transactions<F>(
    text: &str,
    origin: impl Into<PathBuf>,
    n: usize,
    resolve: F,
) -> Result<TransactionMatrices>
where
    F: Fn(&str) -> Option<usize>,
{
    let origin = origin.into();
    let err = |line: usize, message: String| Error::Parse {
        path: origin.clone(),
        line,
        message,
    };
    let mut tm = TransactionMatrices::new(n);
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [i, j, s, f] = fields.as_slice() else {
            return Err(err(
                lineno + 1,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        };
        let node = |label: &str| {
            resolve(label).ok_or_else(|| err(lineno + 1, format!("unknown node `{label}`")))
        };
        let count = |field: &str| {
            field
                .parse::<u64>()
                .map_err(|e| err(lineno + 1, format!("bad count `{field}`: {e}")))
        };
        let (i, j) = (node(i)?, node(j)?);
        tm.set(i, j, count(s)?, count(f)?)
            .map_err(|e| err(lineno + 1, e.to_string()))?;
    }
    Ok(tm)
}
