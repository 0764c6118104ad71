//! Tab-separated edge-list reader and writer.
//!
//! One `src<TAB>dst` pair per line with dense 0-based ids. An optional
//! `#nodes N` line fixes the node count; any other line starting with `#`
//! is a comment.

use std::io::{BufRead, Write};

use super::AdjacencyMatrix;
use crate::error::{Error, Result};

pub fn load_edge_list<R: BufRead>(reader: R) -> Result<AdjacencyMatrix> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            if let Some(count) = rest.strip_prefix("nodes") {
                let n = count
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse { line: line_no, msg: format!("bad node-count header: {e}") })?;
                declared = Some(n);
            }
            continue;
        }
        let mut fields = line.split(['\t', ' ']).filter(|s| !s.is_empty());
        let (src, dst) = match (fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(d), None) => (s, d),
            _ => return Err(Error::Parse { line: line_no, msg: format!("expected `src<TAB>dst`, got {line:?}") }),
        };
        let src = parse_id(src, line_no)?;
        let dst = parse_id(dst, line_no)?;
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        edges.push((src, dst));
    }

    let n_nodes = match (declared, max_id) {
        (Some(n), Some(m)) if m >= n => return Err(Error::Domain(format!("node id {m} exceeds declared count {n}"))),
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };
    Ok(AdjacencyMatrix::from_edges(n_nodes, edges))
}

fn parse_id(field: &str, line: usize) -> Result<usize> {
    let v: i64 = field.parse().map_err(|e| Error::Parse { line, msg: format!("invalid node id {field:?}: {e}") })?;
    usize::try_from(v).map_err(|_| Error::Domain(format!("line {line}: negative node id {v}")))
}

/// Writes `adj` with a `#nodes` header so isolated trailing nodes survive.
pub fn write_edge_list<W: Write>(adj: &AdjacencyMatrix, mut out: W) -> Result<()> {
    writeln!(out, "#nodes {}", adj.n_nodes())?;
    for (i, j) in adj.edges() {
        writeln!(out, "{i}\t{j}")?;
    }
    Ok(())
}

/// Reads a `node<TAB>value` sidecar file into a dense label vector.
pub fn load_labels<R: BufRead>(reader: R, n_nodes: usize) -> Result<Vec<usize>> {
    let mut labels = vec![None; n_nodes];
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(['\t', ' ']).filter(|s| !s.is_empty());
        let (node, label) = match (fields.next(), fields.next()) {
            (Some(a), Some(b)) => (parse_id(a, line_no)?, parse_id(b, line_no)?),
            _ => return Err(Error::Parse { line: line_no, msg: "expected `node<TAB>cluster`".into() }),
        };
        if node >= n_nodes {
            return Err(Error::Domain(format!("line {line_no}: node {node} out of range")));
        }
        labels[node] = Some(label);
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::Domain(format!("node {i} has no label"))))
        .collect()
}

pub fn write_labels<W: Write>(labels: &[usize], mut out: W) -> Result<()> {
    for (i, c) in labels.iter().enumerate() {
        writeln!(out, "{i}\t{c}")?;
    }
    Ok(())
}

/// Reads one node id per line.
pub fn load_node_list<R: BufRead>(reader: R) -> Result<Vec<usize>> {
    let mut nodes = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        nodes.push(parse_id(line, idx + 1)?);
    }
    Ok(nodes)
}
