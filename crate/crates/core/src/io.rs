//! Graph export and import as two CSV tables.
//!
//! `edges.csv` holds `source,target,layer` with layer `R` (relationship) or
//! `C` (comment). `nodes.csv` holds `id,p,m,f,state` with state `S`
//! (unpublished) or `I` (published). Floats are written in shortest
//! round-trip form, so re-importing reproduces the graph exactly.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Layer, NodeAttributes, NodeId, SocialGraph, SpreadState};

pub const EDGES_FILE: &str = "edges.csv";
pub const NODES_FILE: &str = "nodes.csv";

pub fn write_edges<W: Write>(graph: &SocialGraph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "source,target,layer")?;
    for layer in [Layer::Relationship, Layer::Comment] {
        for (a, b) in graph.edges(layer) {
            writeln!(w, "{a},{b},{}", layer.tag())?;
        }
    }
    Ok(())
}

pub fn write_nodes<W: Write>(graph: &SocialGraph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "id,p,m,f,state")?;
    for v in graph.nodes() {
        let a = graph.attributes(v);
        let s = graph.state(v).state.code();
        writeln!(w, "{v},{},{},{},{s}", a.viewpoint, a.emotion, a.faith)?;
    }
    Ok(())
}

/// Write `edges.csv` and `nodes.csv` into `dir`, creating it if needed.
pub fn export_graph(graph: &SocialGraph, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut e = BufWriter::new(File::create(dir.join(EDGES_FILE))?);
    write_edges(graph, &mut e)?;
    e.flush()?;
    let mut n = BufWriter::new(File::create(dir.join(NODES_FILE))?);
    write_nodes(graph, &mut n)?;
    n.flush()?;
    Ok(())
}

fn reader<R: Read>(r: R, header: &[&str]) -> Result<csv::Reader<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let got = rdr.headers().map_err(|e| Error::Data(e.to_string()))?;
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::Data(format!(
            "expected header `{}`, got `{}`",
            header.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(rdr)
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    k: usize,
    row: usize,
    table: &str,
) -> Result<T> {
    rec[k]
        .parse()
        .map_err(|_| Error::Data(format!("{table} row {row}: bad value `{}`", &rec[k])))
}

/// Rebuild a graph from a node table and an edge list. Node ids must be
/// exactly `0..n` in order; duplicate edges are rejected.
pub fn read_graph<N: Read, E: Read>(nodes: N, edges: E) -> Result<SocialGraph> {
    let mut attrs = Vec::new();
    let mut published = Vec::new();
    for (k, rec) in reader(nodes, &["id", "p", "m", "f", "state"])?
        .records()
        .enumerate()
    {
        let rec = rec.map_err(|e| Error::Data(e.to_string()))?;
        let row = k + 1;
        let id: usize = field(&rec, 0, row, "nodes")?;
        if id != k {
            return Err(Error::Data(format!(
                "nodes row {row}: expected id {k}, got {id}"
            )));
        }
        let a = NodeAttributes {
            viewpoint: field(&rec, 1, row, "nodes")?,
            emotion: field(&rec, 2, row, "nodes")?,
            faith: field(&rec, 3, row, "nodes")?,
        };
        if !(a.viewpoint > 0.0
            && a.viewpoint < 1.0
            && a.faith > 0.0
            && a.faith < 1.0
            && a.emotion.abs() < 1.0)
        {
            return Err(Error::Data(format!(
                "nodes row {row}: attribute out of range"
            )));
        }
        attrs.push(a);
        match &rec[4] {
            "I" => published.push(id),
            "S" => {}
            other => {
                return Err(Error::Data(format!(
                    "nodes row {row}: unknown state `{other}`"
                )))
            }
        }
    }
    let mut g = SocialGraph::from_attributes(attrs);
    for id in published {
        g.state_mut(NodeId::from(id)).state = SpreadState::Published;
    }
    for (k, rec) in reader(edges, &["source", "target", "layer"])?
        .records()
        .enumerate()
    {
        let rec = rec.map_err(|e| Error::Data(e.to_string()))?;
        let row = k + 1;
        let a = NodeId(field(&rec, 0, row, "edges")?);
        let b = NodeId(field(&rec, 1, row, "edges")?);
        let added = match Layer::from_tag(&rec[2]) {
            Some(Layer::Relationship) => g.add_relationship_edge(a, b)?,
            Some(Layer::Comment) => g.add_comment_edge(a, b)?,
            None => {
                return Err(Error::Data(format!(
                    "edges row {row}: unknown layer `{}`",
                    &rec[2]
                )))
            }
        };
        if !added {
            return Err(Error::Data(format!(
                "edges row {row}: duplicate edge {a} -> {b}"
            )));
        }
    }
    Ok(g)
}

/// Inverse of [`export_graph`].
pub fn import_graph(dir: &Path) -> Result<SocialGraph> {
    read_graph(
        File::open(dir.join(NODES_FILE))?,
        File::open(dir.join(EDGES_FILE))?,
    )
}
