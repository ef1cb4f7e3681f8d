//! Graph arguments: a JSON file or inline JSON, or a shorthand.
//!
//! | form            | graph                                   |
//! |-----------------|-----------------------------------------|
//! | `empty`         | no vertices                             |
//! | `a2loop`        | the `a²` cycle, based at a vertex       |
//! | `words:W1,W2`   | folded Stallings graph of `⟨W1, W2⟩`    |
//! | `based:W1,W2`   | based core of `⟨W1, W2⟩`                |
//! | `core:W1,W2`    | core of `⟨W1, W2⟩` (no basepoint)       |

use stallings_core::graph::{based_core, core, stallings_graph, BasedGraph, GraphJson, LabeledGraph, VertexId};
use stallings_core::word::parse_word_list;
use stallings_core::{Error, Result};

pub struct GraphArg {
    pub graph: LabeledGraph,
    pub basepoint: Option<VertexId>,
}

impl GraphArg {
    pub fn based(self, what: &str) -> Result<BasedGraph> {
        let b = self.basepoint.ok_or_else(|| Error::InvalidInput(format!("{what} needs a basepoint")))?;
        BasedGraph::new(self.graph, b)
    }
}

fn from_based(b: BasedGraph) -> GraphArg {
    GraphArg { basepoint: Some(b.basepoint()), graph: b.into_graph() }
}

pub fn load(spec: &str, rank: usize) -> Result<GraphArg> {
    let words = |s: &str| -> Result<BasedGraph> { stallings_graph(&parse_word_list(s, rank)?, rank) };
    if spec == "empty" {
        return Ok(GraphArg { graph: LabeledGraph::empty(rank), basepoint: None });
    }
    if spec == "a2loop" {
        return Ok(from_based(based_core(&words("aa")?)));
    }
    if let Some(rest) = spec.strip_prefix("words:") {
        return Ok(from_based(words(rest)?));
    }
    if let Some(rest) = spec.strip_prefix("based:") {
        return Ok(from_based(based_core(&words(rest)?)));
    }
    if let Some(rest) = spec.strip_prefix("core:") {
        return Ok(GraphArg { graph: core(words(rest)?.graph()), basepoint: None });
    }
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| Error::InvalidInput(format!("{spec}: {e}")))?
    };
    let (graph, basepoint) = serde_json::from_str::<GraphJson>(&text)?.into_graph()?;
    Ok(GraphArg { graph, basepoint })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthands() {
        assert!(load("empty", 3).unwrap().graph.is_empty());
        let a2 = load("a2loop", 2).unwrap();
        assert_eq!((a2.graph.vertex_count(), a2.graph.edge_count()), (2, 2));
        let c = load("core:baB", 2).unwrap();
        assert_eq!(c.graph.vertex_count(), 1);
        assert!(c.basepoint.is_none());
        assert_eq!(load("based:baB", 2).unwrap().graph.vertex_count(), 2);
        let json = load("words:ab", 2).unwrap().graph.to_json();
        assert_eq!(load(&json, 2).unwrap().graph.edge_count(), 2);
        assert!(load("/nonexistent.json", 2).is_err());
    }
}
