//! JSON network and pair files.
//!
//! ```text
//! {"vertices": ["a", "b"], "origin": "a", "edges": [{"u": "a", "v": "b", "c": 1.0}]}
//! {"vertices": [...], "origin": "...", "b_edges": [...], "c_edges": [...]}
//! ```
//!
//! Unknown fields are rejected and every conductance must be positive.
//! Written files carry conductances with 17 significant digits so that they
//! re-parse bit-exactly.

use serde::{Deserialize, Serialize};

use crate::comparison::ConductancePair;
use crate::error::Error;
use crate::graph::{validate, Network, Violation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: String,
    pub v: String,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub vertices: Vec<String>,
    pub origin: String,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub vertices: Vec<String>,
    pub origin: String,
    pub b_edges: Vec<EdgeRecord>,
    pub c_edges: Vec<EdgeRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    /// Malformed JSON or schema mismatch; carries serde's line and column.
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("edge ({u},{v}): conductance must be positive, got {c}")]
    NonPositive { u: String, v: String, c: f64 },
    #[error("{0}")]
    Network(#[from] Error),
}

fn triples(edges: &[EdgeRecord]) -> std::result::Result<Vec<(&str, &str, f64)>, ParseError> {
    edges
        .iter()
        .map(|e| {
            if e.c > 0.0 && e.c.is_finite() {
                Ok((e.u.as_str(), e.v.as_str(), e.c))
            } else {
                Err(ParseError::NonPositive {
                    u: e.u.clone(),
                    v: e.v.clone(),
                    c: e.c,
                })
            }
        })
        .collect()
}

impl NetworkFile {
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Every violated invariant, connectivity included.
    pub fn violations(&self) -> std::result::Result<Vec<Violation>, ParseError> {
        Ok(validate(
            &self.vertices,
            &self.origin,
            &triples(&self.edges)?,
        ))
    }

    pub fn to_network(&self) -> std::result::Result<Network, ParseError> {
        Ok(Network::new(
            &self.vertices,
            &self.origin,
            &triples(&self.edges)?,
        )?)
    }

    pub fn from_network(network: &Network) -> Self {
        NetworkFile {
            vertices: network.vertices().to_vec(),
            origin: network.origin_id().to_string(),
            edges: records(network),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!(
            "  \"vertices\": {},\n",
            string_array(&self.vertices)
        ));
        out.push_str(&format!("  \"origin\": {},\n", json_string(&self.origin)));
        out.push_str(&format!("  \"edges\": {}\n}}\n", edge_array(&self.edges)));
        out
    }
}

impl PairFile {
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_pair(&self) -> std::result::Result<ConductancePair, ParseError> {
        let b = Network::new(&self.vertices, &self.origin, &triples(&self.b_edges)?)?;
        let c = Network::new(&self.vertices, &self.origin, &triples(&self.c_edges)?)?;
        Ok(ConductancePair::new(b, c)?)
    }

    pub fn from_pair(pair: &ConductancePair) -> Self {
        PairFile {
            vertices: pair.c().vertices().to_vec(),
            origin: pair.c().origin_id().to_string(),
            b_edges: records(pair.b()),
            c_edges: records(pair.c()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!(
            "  \"vertices\": {},\n",
            string_array(&self.vertices)
        ));
        out.push_str(&format!("  \"origin\": {},\n", json_string(&self.origin)));
        out.push_str(&format!("  \"b_edges\": {},\n", edge_array(&self.b_edges)));
        out.push_str(&format!(
            "  \"c_edges\": {}\n}}\n",
            edge_array(&self.c_edges)
        ));
        out
    }
}

fn records(network: &Network) -> Vec<EdgeRecord> {
    network
        .edges()
        .map(|(i, j, c)| EdgeRecord {
            u: network.vertex(i).to_string(),
            v: network.vertex(j).to_string(),
            c,
        })
        .collect()
}

/// Decimal text with 17 significant digits, dot separator.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn string_array(items: &[String]) -> String {
    let parts: Vec<String> = items.iter().map(|s| json_string(s)).collect();
    format!("[{}]", parts.join(", "))
}

fn edge_array(edges: &[EdgeRecord]) -> String {
    if edges.is_empty() {
        return "[]".to_string();
    }
    let parts: Vec<String> = edges
        .iter()
        .map(|e| {
            format!(
                "    {{\"u\": {}, \"v\": {}, \"c\": {}}}",
                json_string(&e.u),
                json_string(&e.v),
                format_f64(e.c)
            )
        })
        .collect();
    format!("[\n{}\n  ]", parts.join(",\n"))
}
