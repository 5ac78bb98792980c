use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::synthdata::{Dataset, Graph};

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), line, msg: msg.into() }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-blank, non-`#` lines with their 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Loads an external graph dataset.
///
/// * edges: two whitespace-separated 0-based node ids per line
/// * features: one comma-separated row per node; the row count defines `n`
/// * labels: one integer in `{0, 1}` per line
///
/// The graph is symmetrized and every node gets a self-loop. Blank lines and
/// lines starting with `#` are skipped. Mixture signs are unknown for external
/// data and are set to 0.
pub fn load_graph_dataset(edge_path: &Path, feature_path: &Path, label_path: &Path) -> Result<(Dataset, Graph)> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (no, line) in records(&read(feature_path)?) {
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>().map_err(|e| parse_err(feature_path, no, format!("bad feature '{f}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(feature_path, no, format!("expected {} features, found {}", first.len(), row.len())));
            }
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::degenerate(format!("{} has no feature rows", feature_path.display())));
    }
    let d = rows[0].len();
    let x = Array2::from_shape_vec((n, d), rows.concat()).map_err(|e| Error::shape(e.to_string()))?;

    let mut eps = Vec::with_capacity(n);
    for (no, line) in records(&read(label_path)?) {
        match line.parse::<i64>() {
            Ok(v @ (0 | 1)) => eps.push(v as u8),
            Ok(v) => return Err(parse_err(label_path, no, format!("label {v} is not 0 or 1"))),
            Err(e) => return Err(parse_err(label_path, no, format!("bad label '{line}': {e}"))),
        }
    }
    if eps.len() != n {
        return Err(Error::shape(format!("{} labels for {} feature rows", eps.len(), n)));
    }

    let mut edges = Vec::new();
    for (no, line) in records(&read(edge_path)?) {
        let ids: Vec<&str> = line.split_whitespace().collect();
        if ids.len() != 2 {
            return Err(parse_err(edge_path, no, format!("expected 2 node ids, found {}", ids.len())));
        }
        let mut pair = [0usize; 2];
        for (slot, id) in pair.iter_mut().zip(&ids) {
            *slot = id.parse().map_err(|e| parse_err(edge_path, no, format!("bad node id '{id}': {e}")))?;
            if *slot >= n {
                return Err(parse_err(edge_path, no, format!("node id {slot} out of range for {n} nodes")));
            }
        }
        edges.push((pair[0], pair[1]));
    }
    let g = Graph::from_edges(n, &edges)?;
    Ok((Dataset { x, eps, eta: vec![0; n] }, g))
}

/// Writes `edges.txt`, `features.csv`, `labels.txt` and `signs.txt` into `dir`
/// in the layout read by [`load_graph_dataset`]. Self-loops are implied and
/// not written. Returns the paths in that order.
pub fn write_instance(dir: &Path, ds: &Dataset, g: &Graph) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut edges = String::new();
    for i in 0..g.n() {
        for &j in g.neighbors(i).iter().filter(|&&j| j > i) {
            let _ = writeln!(edges, "{i} {j}");
        }
    }
    let mut features = String::new();
    for row in ds.x.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(features, "{}", cells.join(","));
    }
    let lines = |v: &[u8]| v.iter().map(|b| format!("{b}\n")).collect::<String>();
    let files = [
        ("edges.txt", edges),
        ("features.csv", features),
        ("labels.txt", lines(&ds.eps)),
        ("signs.txt", lines(&ds.eta)),
    ];
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
