use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Network;
use crate::error::{Error, Result};

pub const GRAPH_FORMAT: &str = "sitnet-graph-v1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    format: String,
    root: usize,
    sink: Option<usize>,
    vertices: usize,
    edges: Vec<(usize, usize, f64)>,
}

pub(crate) fn to_canonical_json(net: &Network) -> String {
    let file = GraphFile {
        format: GRAPH_FORMAT.to_string(),
        root: net.root(),
        sink: net.sink(),
        vertices: net.vertex_count(),
        edges: net.edges().iter().map(|e| (e.u, e.v, e.conductance)).collect(),
    };
    let mut text = serde_json::to_string(&file).expect("graph serialization cannot fail");
    text.push('\n');
    text
}

impl Network {
    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        if file.format != GRAPH_FORMAT {
            return Err(Error::format(
                "graph file",
                format!("expected format {GRAPH_FORMAT:?}, found {:?}", file.format),
            ));
        }
        let sorted = file.edges.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1))
            && file.edges.iter().all(|&(u, v, _)| u < v);
        if !sorted {
            log::warn!("graph file edges are not in canonical order; they will be normalized");
        }
        let (net, merged) = Network::build(file.vertices, file.edges, file.root, file.sink)?;
        if merged > 0 {
            log::warn!("merged {merged} duplicate edge(s) by summing conductances");
        }
        Ok(net)
    }
}

pub fn read_network(path: impl AsRef<Path>) -> Result<Network> {
    Network::from_json(&fs::read_to_string(path)?)
}

pub fn write_network(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, net.to_json())?;
    Ok(())
}
