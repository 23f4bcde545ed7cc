//! JSON documents for posets and certificates, and DOT export.
//!
//! A poset document lists node labels, the cover pairs `[lower, upper]` of
//! the explicit order, and the classes:
//!
//! ```json
//! {
//!   "nodes": ["m", "t", "t1", "t2"],
//!   "covers": [["t", "m"], ["t1", "t"], ["t2", "t"]],
//!   "classes": [
//!     {"up": ["m"], "low": "t1", "card": "aleph0"},
//!     {"up": ["m"], "low": "t2", "card": "aleph0"}
//!   ]
//! }
//! ```
//!
//! Any order pairs are accepted on input; output always lists exactly the
//! covers, with nodes, covers and classes sorted, so equal posets serialize
//! to identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::card::CardTag;
use crate::error::DocumentError;
use crate::map::{ClassFlow, PosetMap};
use crate::poset::{ClassKey, NodeId, SkeletonPoset};
use crate::transform::SplittingCertificate;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDocument {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub covers: Vec<(String, String)>,
    #[serde(default)]
    pub classes: Vec<ClassDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDocument {
    pub up: Vec<String>,
    pub low: String,
    pub card: CardTag,
}

impl PosetDocument {
    pub fn from_poset(p: &SkeletonPoset) -> Self {
        PosetDocument {
            nodes: p.nodes().iter().map(ToString::to_string).collect(),
            covers: p
                .covers()
                .into_iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            classes: p
                .classes()
                .iter()
                .map(|c| ClassDocument {
                    up: c.key.ups.iter().map(ToString::to_string).collect(),
                    low: c.key.low.to_string(),
                    card: c.card,
                })
                .collect(),
        }
    }

    pub fn to_poset(&self) -> Result<SkeletonPoset, DocumentError> {
        if self.nodes.is_empty() {
            return Err(DocumentError::Empty);
        }
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n) {
                return Err(DocumentError::DuplicateLabel(n.clone()));
            }
        }
        let mut b = SkeletonPoset::builder().nodes(self.nodes.iter().cloned());
        for (x, y) in &self.covers {
            b.add_le(x.clone(), y.clone());
        }
        for c in &self.classes {
            b.add_class(ClassKey::new(c.up.iter().cloned(), c.low.clone()), c.card);
        }
        Ok(b.build()?)
    }
}

pub fn parse(text: &str) -> Result<SkeletonPoset, DocumentError> {
    let doc: PosetDocument = serde_json::from_str(text)?;
    doc.to_poset()
}

pub fn serialize(p: &SkeletonPoset) -> String {
    to_pretty(&PosetDocument::from_poset(p))
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassKeyDocument {
    pub up: Vec<String>,
    pub low: String,
}

impl From<&ClassKey> for ClassKeyDocument {
    fn from(k: &ClassKey) -> Self {
        ClassKeyDocument {
            up: k.ups.iter().map(ToString::to_string).collect(),
            low: k.low.to_string(),
        }
    }
}

impl From<&ClassKeyDocument> for ClassKey {
    fn from(d: &ClassKeyDocument) -> Self {
        ClassKey::new(d.up.iter().cloned(), d.low.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowDocument {
    pub source: ClassKeyDocument,
    pub target: ClassKeyDocument,
    pub card: CardTag,
}

/// A splitting certificate without its two posets, which travel as
/// separate poset documents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub split_node: String,
    pub fiber: Vec<String>,
    pub node_map: BTreeMap<String, String>,
    #[serde(default)]
    pub class_map: Vec<FlowDocument>,
}

impl CertificateDocument {
    pub fn from_certificate(c: &SplittingCertificate) -> Self {
        CertificateDocument {
            split_node: c.split_node.to_string(),
            fiber: c.fiber.iter().map(ToString::to_string).collect(),
            node_map: c
                .map
                .node_map
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            class_map: c
                .map
                .class_map
                .iter()
                .map(|f| FlowDocument {
                    source: (&f.source).into(),
                    target: (&f.target).into(),
                    card: f.card,
                })
                .collect(),
        }
    }

    pub fn to_certificate(&self, upper: SkeletonPoset, lower: SkeletonPoset) -> SplittingCertificate {
        let node_map = self
            .node_map
            .iter()
            .map(|(a, b)| (NodeId::from(a.as_str()), NodeId::from(b.as_str())))
            .collect();
        let flows = self.class_map.iter().map(|f| ClassFlow {
            source: (&f.source).into(),
            target: (&f.target).into(),
            card: f.card,
        });
        SplittingCertificate {
            split_node: self.split_node.as_str().into(),
            fiber: self.fiber.iter().map(|n| NodeId::from(n.as_str())).collect(),
            map: PosetMap::new(upper, lower, node_map, flows),
        }
    }
}

pub fn serialize_certificate(c: &SplittingCertificate) -> String {
    to_pretty(&CertificateDocument::from_certificate(c))
}

/// Reads a certificate document and attaches it to its two posets. The
/// result is not verified.
pub fn parse_certificate(
    text: &str,
    upper: SkeletonPoset,
    lower: SkeletonPoset,
) -> Result<SplittingCertificate, DocumentError> {
    let doc: CertificateDocument = serde_json::from_str(text)?;
    Ok(doc.to_certificate(upper, lower))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram in DOT. Explicit nodes are boxes and each class is one
/// ellipse labelled with its size, drawn between its low node and its ups.
/// A cover `a < b` is omitted when a class already sits between `a` and `b`.
pub fn export_dot(p: &SkeletonPoset) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=box];\n");
    for n in p.nodes() {
        let _ = writeln!(out, "  {};", quote(n.as_str()));
    }
    for (i, c) in p.classes().iter().enumerate() {
        let _ = writeln!(out, "  class{i} [shape=ellipse, label={}];", quote(&c.card.to_string()));
    }
    for (a, b) in p.covers() {
        if p.classes_above(&a).any(|c| c.key.ups.contains(&b)) {
            continue;
        }
        let _ = writeln!(out, "  {} -> {};", quote(a.as_str()), quote(b.as_str()));
    }
    for (i, c) in p.classes().iter().enumerate() {
        let _ = writeln!(out, "  {} -> class{i};", quote(c.key.low.as_str()));
        for u in &c.key.ups {
            let _ = writeln!(out, "  class{i} -> {};", quote(u.as_str()));
        }
    }
    out.push_str("}\n");
    out
}
