//! JSON storage for networks (`.relu.json`).
//!
//! Weights and biases are stored exactly as `"p/q"` strings; the
//! accompanying `*_f64` fields are informational and ignored on load.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{validate_net, Connection, NetViolation, Neuron, ReluNet, Role};
use crate::num::{ratio_string, Rational, Scalar};

#[derive(Debug, Error)]
pub enum NetIoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid network: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<NetViolation>),
}

#[derive(Serialize, Deserialize)]
struct NeuronRecord {
    id: usize,
    layer: usize,
    #[serde(with = "ratio_string")]
    bias: Rational,
    #[serde(default, skip_deserializing)]
    bias_f64: f64,
    role: Role,
}

#[derive(Serialize, Deserialize)]
struct ArcRecord {
    src: usize,
    dst: usize,
    #[serde(with = "ratio_string")]
    weight: Rational,
    #[serde(default, skip_deserializing)]
    weight_f64: f64,
}

#[derive(Deserialize)]
struct Document {
    neurons: Vec<NeuronRecord>,
    arcs: Vec<ArcRecord>,
}

fn record_lines<R: Serialize>(records: impl Iterator<Item = R>) -> String {
    records
        .map(|r| {
            format!(
                "    {}",
                serde_json::to_string(&r).expect("record serialization cannot fail")
            )
        })
        .collect::<Vec<_>>()
        .join(",\n")
}

/// Writes one neuron or arc per line, in id and arc order.
pub fn serialize(net: &ReluNet) -> String {
    let neurons = record_lines(net.neurons.iter().map(|v| NeuronRecord {
        id: v.id,
        layer: v.layer,
        bias_f64: v.bias.to_f64(),
        bias: v.bias.clone(),
        role: v.role,
    }));
    let arcs = record_lines(net.arcs.iter().map(|c| ArcRecord {
        src: c.src,
        dst: c.dst,
        weight_f64: c.weight.to_f64(),
        weight: c.weight.clone(),
    }));
    format!("{{\n  \"neurons\": [\n{neurons}\n  ],\n  \"arcs\": [\n{arcs}\n  ]\n}}\n")
}

/// Parses and validates a network document.
pub fn deserialize(doc: &str) -> Result<ReluNet, NetIoError> {
    let parsed: Document = serde_json::from_str(doc).map_err(|e| NetIoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let net = ReluNet {
        neurons: parsed
            .neurons
            .into_iter()
            .map(|r| Neuron {
                id: r.id,
                layer: r.layer,
                bias: r.bias,
                role: r.role,
            })
            .collect(),
        arcs: parsed
            .arcs
            .into_iter()
            .map(|r| Connection {
                src: r.src,
                dst: r.dst,
                weight: r.weight,
            })
            .collect(),
    };
    let violations = validate_net(&net);
    if !violations.is_empty() {
        return Err(NetIoError::Invalid(violations));
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::min_two_net;
    use crate::num::ratio;

    #[test]
    fn roundtrip_min_two_net() {
        let net = min_two_net();
        assert_eq!(deserialize(&serialize(&net)).unwrap(), net);
    }

    #[test]
    fn rationals_are_exact_strings() {
        let mut net = min_two_net();
        net.arcs[0].weight = ratio(-1, 3);
        let doc = serialize(&net);
        assert!(doc.contains("\"weight\":\"-1/3\""));
        assert_eq!(deserialize(&doc).unwrap(), net);
    }

    #[test]
    fn truncated_document_is_a_parse_error() {
        let doc = serialize(&min_two_net());
        let cut = &doc[..doc.len() / 2];
        assert!(matches!(deserialize(cut), Err(NetIoError::Parse { .. })));
    }

    #[test]
    fn invalid_network_is_rejected_on_load() {
        let doc = r#"{"neurons":[{"id":0,"layer":0,"bias":"0","role":"input"},
            {"id":1,"layer":1,"bias":"0","role":"hidden"}],"arcs":[]}"#;
        assert!(matches!(deserialize(doc), Err(NetIoError::Invalid(_))));
    }
}
