//! Text formats read and written by the command-line tool.
//!
//! * Edge lists: one edge per line, whitespace separated `src dst [weight] [layer]`, `#`
//!   starts a comment, an optional header line is skipped.
//! * Correspondences: CSV with header `corr_A,corr_B,seed`. Seed files and truth files use the
//!   same layout, the `seed` column being optional.
//! * Matrices: dense CSV without header, or `row,col,value` triplets.
//!
//! Vertex indices are 0-based unless `one_based` is set. Reals are written with 17
//! significant digits so that files read back bit for bit.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::frame::{make_match, Details, MatchResult, SeedSet};
use crate::graph::{graph_from_edge_list, EdgeRecord, Graph, LayeredGraph, ParsedGraph};
use crate::{Error, Result};

pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let p = path.as_ref();
    fs::read_to_string(p).map_err(|e| Error::Io {
        path: p.display().to_string(),
        msg: e.to_string(),
    })
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let p = path.as_ref();
    fs::write(p, text).map_err(|e| Error::Io {
        path: p.display().to_string(),
        msg: e.to_string(),
    })
}

/// 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(name: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: name.to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_index(tok: &str, one_based: bool, name: &str, line: usize) -> Result<usize> {
    let v: usize = tok
        .parse()
        .map_err(|_| parse_err(name, line, format!("'{tok}' is not a vertex index")))?;
    if one_based {
        v.checked_sub(1)
            .ok_or_else(|| parse_err(name, line, "vertex index 0 in a one-based file"))
    } else {
        Ok(v)
    }
}

fn parse_real(tok: &str, name: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| parse_err(name, line, format!("'{tok}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(name, line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListOptions {
    pub directed: bool,
    pub loops: bool,
    pub one_based: bool,
    /// Order of the graph; one more than the largest index when `None`.
    pub n: Option<usize>,
    /// 1-based column holding the layer label.
    pub layer_column: usize,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            directed: false,
            loops: false,
            one_based: false,
            n: None,
            layer_column: 4,
        }
    }
}

/// Parses edge-list text; `name` is used in error messages.
pub fn parse_edge_list(text: &str, name: &str, opts: &EdgeListOptions) -> Result<ParsedGraph> {
    if opts.layer_column < 3 {
        return Err(Error::InvalidArgument("the layer column must be 3 or later".into()));
    }
    let mut records = Vec::new();
    let mut seen_data = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if !seen_data && toks[0].parse::<usize>().is_err() {
            // header
            seen_data = true;
            continue;
        }
        seen_data = true;
        if toks.len() < 2 {
            return Err(parse_err(name, line, "expected at least two columns"));
        }
        let src = parse_index(toks[0], opts.one_based, name, line)?;
        let dst = parse_index(toks[1], opts.one_based, name, line)?;
        let mut rec = EdgeRecord::new(src, dst);
        let lc = opts.layer_column - 1;
        for (c, tok) in toks.iter().enumerate().skip(2) {
            if c == lc {
                rec = rec.in_layer(*tok);
            } else if c == 2 {
                rec.weight = Some(parse_real(tok, name, line)?);
            } else {
                return Err(parse_err(name, line, format!("unexpected column {}", c + 1)));
            }
        }
        records.push(rec);
    }
    let max = records.iter().map(|r| r.src.max(r.dst) + 1).max().unwrap_or(0);
    let n = match opts.n {
        Some(n) if n < max => {
            return Err(Error::VertexOutOfRange { vertex: max - 1, n });
        }
        Some(n) => n,
        None => max,
    };
    graph_from_edge_list(&records, n, opts.directed, opts.loops).map_err(|e| match e {
        Error::Parse { .. } | Error::Io { .. } => e,
        other => parse_err(name, 0, other.to_string()),
    })
}

pub fn read_edge_list(path: impl AsRef<Path>, opts: &EdgeListOptions) -> Result<ParsedGraph> {
    let p = path.as_ref();
    parse_edge_list(&read_text(p)?, &p.display().to_string(), opts)
}

/// Edge-list text for `g`; undirected edges are written once. Layers are labelled 1, 2, ...
/// in the fourth column when there is more than one. Every line carries a weight column when
/// any layer is weighted.
pub fn format_edge_list(g: &LayeredGraph, one_based: bool) -> String {
    let off = one_based as usize;
    let weighted = g.layers().iter().any(Graph::is_weighted);
    let mut out = String::new();
    for (l, layer) in g.layers().iter().enumerate() {
        for (i, j, w) in layer.edges() {
            out.push_str(&format!("{} {}", i + off, j + off));
            if weighted {
                out.push_str(&format!(" {w}"));
            }
            if g.len() > 1 {
                if !weighted {
                    out.push_str(" 1");
                }
                out.push_str(&format!(" {}", l + 1));
            }
            out.push('\n');
        }
    }
    out
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes())
}

/// Rows of a CSV file as trimmed string fields, with their line numbers. A first row whose
/// first field is not a number is treated as a header and dropped.
fn csv_rows(text: &str, name: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rows = Vec::new();
    for rec in csv_reader(text).records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(name, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if fields.iter().all(String::is_empty) {
            continue;
        }
        if rows.is_empty() && fields[0].parse::<f64>().is_err() {
            continue;
        }
        rows.push((line, fields));
    }
    Ok(rows)
}

fn parse_flag(tok: &str, name: &str, line: usize) -> Result<bool> {
    match tok.to_ascii_lowercase().as_str() {
        "1" | "true" | "t" | "yes" => Ok(true),
        "0" | "false" | "f" | "no" | "" => Ok(false),
        _ => Err(parse_err(name, line, format!("'{tok}' is not a seed flag"))),
    }
}

/// Pairs with their seed flags from correspondence-style CSV text.
pub fn parse_pairs(text: &str, name: &str, one_based: bool) -> Result<Vec<((usize, usize), bool)>> {
    csv_rows(text, name)?
        .into_iter()
        .map(|(line, f)| {
            if f.len() < 2 {
                return Err(parse_err(name, line, "expected at least two columns"));
            }
            let a = parse_index(&f[0], one_based, name, line)?;
            let b = parse_index(&f[1], one_based, name, line)?;
            let seed = match f.get(2) {
                Some(t) => parse_flag(t, name, line)?,
                None => false,
            };
            Ok(((a, b), seed))
        })
        .collect()
}

/// Seed pairs: every row of the file is a seed.
pub fn parse_seeds(text: &str, name: &str, one_based: bool, n_a: usize, n_b: usize) -> Result<SeedSet> {
    let pairs = parse_pairs(text, name, one_based)?.into_iter().map(|p| p.0).collect();
    SeedSet::new(pairs, n_a, n_b)
}

/// A correspondence file back into a match for graphs of orders `nnodes`.
pub fn parse_correspondence(
    text: &str,
    name: &str,
    one_based: bool,
    nnodes: (usize, usize),
) -> Result<MatchResult> {
    let rows = parse_pairs(text, name, one_based)?;
    let seeds = SeedSet::new(
        rows.iter().filter(|r| r.1).map(|r| r.0).collect(),
        nnodes.0,
        nnodes.1,
    )?;
    make_match(rows.into_iter().map(|r| r.0).collect(), nnodes, &seeds, None, Details::new())
}

/// `truth[a]` for every A vertex; vertices absent from the file get `n_b` ("no partner").
pub fn parse_truth(text: &str, name: &str, one_based: bool, n_a: usize, n_b: usize) -> Result<Vec<usize>> {
    let mut truth = vec![n_b; n_a];
    for ((a, b), _) in parse_pairs(text, name, one_based)? {
        if a >= n_a {
            return Err(Error::VertexOutOfRange { vertex: a, n: n_a });
        }
        truth[a] = b;
    }
    Ok(truth)
}

pub fn format_correspondence(m: &MatchResult, one_based: bool) -> String {
    let off = one_based as usize;
    let mut out = String::from("corr_A,corr_B,seed\n");
    for (&(a, b), &s) in m.corr().iter().zip(m.seeds_mask()) {
        out.push_str(&format!("{},{},{}\n", a + off, b + off, s as u8));
    }
    out
}

pub fn parse_dense(text: &str, name: &str) -> Result<DMatrix<f64>> {
    let rows = csv_rows(text, name)?;
    let ncols = rows.first().map_or(0, |r| r.1.len());
    let mut data = Vec::with_capacity(rows.len() * ncols);
    for (line, f) in &rows {
        if f.len() != ncols {
            return Err(parse_err(name, *line, format!("expected {ncols} columns, found {}", f.len())));
        }
        for tok in f {
            data.push(parse_real(tok, name, *line)?);
        }
    }
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &data))
}

pub fn format_dense(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_real(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `row,col,value` triplets. Repeated positions are an error.
pub fn parse_triplets(text: &str, name: &str, one_based: bool) -> Result<Vec<(usize, usize, f64)>> {
    let mut seen = std::collections::HashSet::new();
    csv_rows(text, name)?
        .into_iter()
        .map(|(line, f)| {
            if f.len() != 3 {
                return Err(parse_err(name, line, "expected row,col,value"));
            }
            let i = parse_index(&f[0], one_based, name, line)?;
            let j = parse_index(&f[1], one_based, name, line)?;
            if !seen.insert((i, j)) {
                return Err(parse_err(name, line, format!("repeated entry ({},{})", f[0], f[1])));
            }
            Ok((i, j, parse_real(&f[2], name, line)?))
        })
        .collect()
}

pub fn triplets_to_dense(t: &[(usize, usize, f64)], nrows: usize, ncols: usize) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(nrows, ncols);
    for &(i, j, v) in t {
        if i >= nrows {
            return Err(Error::VertexOutOfRange { vertex: i, n: nrows });
        }
        if j >= ncols {
            return Err(Error::VertexOutOfRange { vertex: j, n: ncols });
        }
        m[(i, j)] = v;
    }
    Ok(m)
}

/// Row-stochastic prior from candidate lists: row `a` holds `1 / (number of candidates of a)`
/// on each candidate of `a`, then everything is multiplied by `scale`.
pub fn similarity_from_candidates(pairs: &[(usize, usize)], n_a: usize, n_b: usize, scale: f64) -> Result<DMatrix<f64>> {
    let mut counts = vec![0usize; n_a];
    for &(a, b) in pairs {
        if a >= n_a {
            return Err(Error::VertexOutOfRange { vertex: a, n: n_a });
        }
        if b >= n_b {
            return Err(Error::VertexOutOfRange { vertex: b, n: n_b });
        }
        counts[a] += 1;
    }
    let mut s = DMatrix::zeros(n_a, n_b);
    for &(a, b) in pairs {
        s[(a, b)] = scale / counts[a] as f64;
    }
    Ok(s)
}
