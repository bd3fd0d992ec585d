//! CSV readers and writers for samples, edge lists, signal matrices and result tables.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::jecd::{Role, Sample, SampleSet};

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

fn parse<T: std::str::FromStr>(field: &str, line: u64) -> Result<T> {
    field.parse().map_err(|_| Error::Parse(format!("line {line}: cannot parse '{field}'")))
}

/// Reads `vertex,time,value,role` rows (header optional) into one set per role.
pub fn read_samples<R: Read>(r: R) -> Result<Vec<SampleSet<f64>>> {
    let mut sets: Vec<SampleSet<f64>> = Vec::new();
    for (i, rec) in reader(r).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && rec.get(0).is_some_and(|f| f.parse::<usize>().is_err()) {
            continue;
        }
        if rec.len() < 4 {
            return Err(Error::Parse(format!("line {line}: expected vertex,time,value,role")));
        }
        let s = Sample { vertex: parse(&rec[0], line)?, time: parse(&rec[1], line)?, value: parse(&rec[2], line)? };
        let role: Role = rec[3].parse()?;
        match sets.iter_mut().find(|set| set.role == role) {
            Some(set) => set.samples.push(s),
            None => sets.push(SampleSet::new(vec![s], role)),
        }
    }
    Ok(sets)
}

pub fn write_samples<W: Write>(w: W, sets: &[&SampleSet<f64>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["vertex", "time", "value", "role"])?;
    for set in sets {
        for s in &set.samples {
            out.write_record([s.vertex.to_string(), s.time.to_string(), s.value.to_string(), set.role.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads an undirected edge list `source,target[,weight]`; `index_base` is 0 or 1.
pub fn read_edges<R: Read>(r: R, index_base: usize, n: Option<usize>) -> Result<Graph<f64>> {
    if index_base > 1 {
        return Err(Error::Config("index base must be 0 or 1".into()));
    }
    let mut edges = Vec::new();
    for (i, rec) in reader(r).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && rec.get(0).is_some_and(|f| f.parse::<usize>().is_err()) {
            continue;
        }
        if rec.len() < 2 {
            return Err(Error::Parse(format!("line {line}: expected source,target[,weight]")));
        }
        let a: usize = parse(&rec[0], line)?;
        let b: usize = parse(&rec[1], line)?;
        if a < index_base || b < index_base {
            return Err(Error::Parse(format!("line {line}: index below base {index_base}")));
        }
        let w: f64 = match rec.get(2) {
            Some(f) if !f.is_empty() => parse(f, line)?,
            _ => 1.0,
        };
        edges.push((a - index_base, b - index_base, w));
    }
    let inferred = edges.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(0);
    Graph::from_edges(n.unwrap_or(inferred), &edges)
}

pub fn read_edges_file(path: &Path, index_base: usize, n: Option<usize>) -> Result<Graph<f64>> {
    read_edges(std::fs::File::open(path)?, index_base, n)
}

/// Plain numeric matrix, one row per line.
pub fn read_matrix<R: Read>(r: R) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in reader(r).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        rows.push(rec.iter().map(|f| parse(f, line)).collect::<Result<_>>()?);
    }
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() || cols == 0 {
        return Err(Error::InsufficientData);
    }
    if let Some(r) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn write_matrix<W: Write>(w: W, m: &DMatrix<f64>) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..m.nrows() {
        out.write_record(m.row(i).iter().map(|v| v.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `# config-hash: <hash>`, a header row, then the rows.
pub fn write_table<W: Write>(mut w: W, hash: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    writeln!(w, "# config-hash: {hash}")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r)?;
    }
    out.flush()?;
    Ok(())
}
