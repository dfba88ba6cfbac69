//! Interchange formats: qbsolv-style `.qubo` text and JSON for QUBO and Ising models.
//!
//! The text format:
//!
//! ```text
//! c any comment
//! c offset 60
//! p qubo 0 <max nodes> <node lines> <coupler lines>
//! 0 0 -7
//! 0 1 4
//! ```
//!
//! The constant term has no slot in the original format, so it rides in a
//! `c offset <value>` comment that other readers ignore.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::penalty::PenaltyWeights;
use crate::qubo::Qubo;

/// Canonical text export: nonzero linear lines ascending, then couplers in
/// lexicographic `(i, j)` order.
pub fn export_qubo(q: &Qubo) -> String {
    let nodes: Vec<(usize, f64)> = q
        .linear()
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, v)| v != 0.0)
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "c offset {}", q.offset());
    let _ = writeln!(out, "p qubo 0 {} {} {}", q.n(), nodes.len(), q.quadratic().len());
    for (i, v) in nodes {
        let _ = writeln!(out, "{i} {i} {v}");
    }
    for (&(i, j), &v) in q.quadratic() {
        let _ = writeln!(out, "{i} {j} {v}");
    }
    out
}

pub fn parse_qubo(text: &str) -> Result<Qubo> {
    let err = |line: usize, message: String| Error::Parse { line, message };
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut offset = 0.0;
    let mut offset_seen = false;
    let mut linear: Vec<f64> = Vec::new();
    let mut linear_seen = BTreeSet::new();
    let mut couplers = Vec::new();
    let mut coupler_seen = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "c" => {
                if fields.get(1) == Some(&"offset") {
                    if offset_seen {
                        return Err(err(line_no, "duplicate offset comment".into()));
                    }
                    let v = fields
                        .get(2)
                        .and_then(|s| s.parse::<f64>().ok())
                        .ok_or_else(|| err(line_no, format!("bad offset line {line:?}")))?;
                    offset = v;
                    offset_seen = true;
                }
            }
            "p" => {
                if header.is_some() {
                    return Err(err(line_no, "second header line".into()));
                }
                if fields.len() != 6 || fields[1] != "qubo" {
                    return Err(err(
                        line_no,
                        "header must read `p qubo <topology> <max nodes> <nodes> <couplers>`".into(),
                    ));
                }
                let nums: Vec<usize> = fields[3..]
                    .iter()
                    .map(|s| s.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err(line_no, format!("bad header counts in {line:?}")))?;
                header = Some((nums[0], nums[1], nums[2], line_no));
                linear = vec![0.0; nums[0]];
            }
            _ if fields[0].starts_with('c') => {}
            _ => {
                let Some((n, _, _, _)) = header else {
                    return Err(err(line_no, "entry before header line".into()));
                };
                if fields.len() != 3 {
                    return Err(err(line_no, format!("expected `i j value`, got {line:?}")));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| err(line_no, format!("bad index {:?}", fields[0])))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| err(line_no, format!("bad index {:?}", fields[1])))?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| err(line_no, format!("bad value {:?}", fields[2])))?;
                if !v.is_finite() {
                    return Err(err(line_no, format!("non-finite value {:?}", fields[2])));
                }
                if i >= n || j >= n {
                    return Err(err(line_no, format!("index out of declared range 0..{n}")));
                }
                if i == j {
                    if !linear_seen.insert(i) {
                        return Err(err(line_no, format!("duplicate linear entry for {i}")));
                    }
                    linear[i] = v;
                } else {
                    if i > j {
                        return Err(err(line_no, format!("coupler ({i}, {j}) must have i < j")));
                    }
                    if !coupler_seen.insert((i, j)) {
                        return Err(err(line_no, format!("duplicate coupler ({i}, {j})")));
                    }
                    couplers.push(((i, j), v));
                }
            }
        }
    }

    let Some((_, nodes, n_couplers, header_line)) = header else {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `p qubo` header line".into(),
        });
    };
    if linear_seen.len() != nodes || coupler_seen.len() != n_couplers {
        return Err(err(
            header_line,
            format!(
                "header declares {nodes} nodes and {n_couplers} couplers, found {} and {}",
                linear_seen.len(),
                coupler_seen.len()
            ),
        ));
    }
    Qubo::from_parts(linear, couplers, offset)
}

/// Where a model came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub instance_hash: String,
    pub instance: String,
    pub weights: PenaltyWeights,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase")]
enum JsonModel {
    Qubo {
        n: usize,
        offset: f64,
        linear: Vec<f64>,
        couplers: Vec<(usize, usize, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metadata: Option<Provenance>,
    },
    Ising {
        n: usize,
        offset: f64,
        h: Vec<f64>,
        couplings: Vec<(usize, usize, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metadata: Option<Provenance>,
    },
}

/// A model read from any supported interchange format.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Qubo(Qubo),
    Ising(IsingModel),
}

pub fn qubo_to_json(q: &Qubo, metadata: Option<Provenance>) -> String {
    let doc = JsonModel::Qubo {
        n: q.n(),
        offset: q.offset(),
        linear: q.linear().to_vec(),
        couplers: q.quadratic().iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
        metadata,
    };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

pub fn ising_to_json(m: &IsingModel, metadata: Option<Provenance>) -> String {
    let doc = JsonModel::Ising {
        n: m.n(),
        offset: m.offset(),
        h: m.fields().to_vec(),
        couplings: m.couplings().iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
        metadata,
    };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

/// Parses a JSON document produced by [`qubo_to_json`] or [`ising_to_json`].
pub fn parse_json(text: &str) -> Result<(Model, Option<Provenance>)> {
    let doc: JsonModel = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let check = |n: usize, len: usize| {
        if n == len {
            Ok(())
        } else {
            Err(Error::Format(format!("n = {n} but {len} linear terms given")))
        }
    };
    match doc {
        JsonModel::Qubo {
            n,
            offset,
            linear,
            couplers,
            metadata,
        } => {
            check(n, linear.len())?;
            let q = Qubo::from_parts(linear, couplers.into_iter().map(|(i, j, v)| ((i, j), v)), offset)?;
            Ok((Model::Qubo(q), metadata))
        }
        JsonModel::Ising {
            n,
            offset,
            h,
            couplings,
            metadata,
        } => {
            check(n, h.len())?;
            let m = IsingModel::from_parts(h, couplings.into_iter().map(|(i, j, v)| ((i, j), v)), offset)?;
            Ok((Model::Ising(m), metadata))
        }
    }
}

/// Reads either format, deciding by the first non-blank character.
pub fn parse_any(text: &str) -> Result<(Model, Option<Provenance>)> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        Ok((Model::Qubo(parse_qubo(text)?), None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Qubo {
        Qubo::from_parts(vec![-7.0, 0.0, 2.5], [((0, 1), 4.0), ((0, 2), -0.125)], 12.0).unwrap()
    }

    #[test]
    fn export_layout() {
        let text = export_qubo(&sample());
        assert_eq!(
            text,
            "c offset 12\np qubo 0 3 2 2\n0 0 -7\n2 2 2.5\n0 1 4\n0 2 -0.125\n"
        );
        assert_eq!(parse_qubo(&text).unwrap(), sample());
    }

    #[test]
    fn accepts_comments_and_blank_lines() {
        let text = "c hello\ncomment line\n\np qubo 0 2 1 1\n1 1 3\n0 1 -1\n";
        let q = parse_qubo(text).unwrap();
        assert_eq!(q.linear(), &[0.0, 3.0]);
        assert_eq!(q.coupler(0, 1), -1.0);
        assert_eq!(q.offset(), 0.0);
    }

    #[test]
    fn duplicate_coupler_names_line() {
        let text = "p qubo 0 3 0 2\n0 1 1\n0 1 2\n";
        match parse_qubo(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("duplicate"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("0 0 1\n", 1),
            ("p qubo 0 2 1 0\n2 2 1\n", 2),
            ("p qubo 0 2 1 0\n1 0 1\n", 2),
            ("p qubo 0 2 1 0\n0 0 x\n", 2),
            ("p qubo 0 2 1 0\n0 0\n", 2),
            ("p qubo 0 2 2 0\n0 0 1\n", 1),
            ("p qubo 0 2 1 0\np qubo 0 2 1 0\n", 2),
            ("p qubo 0 2 2 0\n0 0 1\n0 0 1\n", 3),
            ("c offset\np qubo 0 1 0 0\n", 1),
        ];
        for (text, expected) in cases {
            match parse_qubo(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, expected, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
        assert!(parse_qubo("c nothing\n").is_err());
    }

    #[test]
    fn json_round_trip() {
        let q = sample();
        let meta = Provenance {
            instance_hash: "abc".into(),
            instance: "board 1x1".into(),
            weights: PenaltyWeights::default(),
        };
        let text = qubo_to_json(&q, Some(meta.clone()));
        let (model, back) = parse_any(&text).unwrap();
        assert_eq!(model, Model::Qubo(q.clone()));
        assert_eq!(back, Some(meta));

        let m = crate::ising::to_ising(&q);
        let (model, none) = parse_any(&ising_to_json(&m, None)).unwrap();
        assert_eq!(model, Model::Ising(m));
        assert!(none.is_none());
    }

    #[test]
    fn json_rejects_inconsistent_n() {
        let text = r#"{"format":"qubo","n":3,"offset":0,"linear":[1.0],"couplers":[]}"#;
        assert!(parse_json(text).is_err());
        let text = r#"{"format":"qubo","n":1,"offset":0,"linear":[1.0],"couplers":[[0,0,1.0]]}"#;
        assert!(parse_json(text).is_err());
    }

    #[test]
    fn empty_model() {
        let q = Qubo::new(0);
        let text = export_qubo(&q);
        assert_eq!(text, "c offset 0\np qubo 0 0 0 0\n");
        assert_eq!(parse_qubo(&text).unwrap(), q);
    }
}
