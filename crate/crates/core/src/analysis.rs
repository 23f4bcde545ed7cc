//! K-poset axioms and the structural invariants built on them.

use std::collections::BTreeSet;
use std::fmt;

use crate::card::CardTag;
use crate::error::{AnalysisError, PosetError};
use crate::poset::{ClassKey, NodeId, SkeletonPoset, VNode};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum KAxiom {
    /// The poset has no nodes at all.
    Nonempty,
    /// Finitely many minimal and height-two nodes.
    FiniteExtremes,
    /// Two minimal nodes have finitely many minimal upper bounds.
    FiniteMub,
    /// Every chain `u > v > w` has infinitely many nodes in `[u/w]`.
    InfiniteChainClass,
    /// `|[u/w]|` is zero or the size of the whole poset.
    Proper,
}

impl fmt::Display for KAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KAxiom::Nonempty => "nonempty",
            KAxiom::FiniteExtremes => "finite extremes",
            KAxiom::FiniteMub => "finite mub",
            KAxiom::InfiniteChainClass => "infinite chain class",
            KAxiom::Proper => "proper",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KViolation {
    pub axiom: KAxiom,
    pub witness: Vec<NodeId>,
    pub detail: String,
}

impl fmt::Display for KViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.axiom, self.detail)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KReport {
    pub is_k: bool,
    pub is_proper: bool,
    pub poset_card: CardTag,
    pub violations: Vec<KViolation>,
}

impl fmt::Display for KReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k-poset: {}", self.is_k)?;
        writeln!(f, "proper: {}", self.is_proper)?;
        writeln!(f, "card: {}", self.poset_card)?;
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

fn ensure_valid(p: &SkeletonPoset) -> Result<(), AnalysisError> {
    let v = p.validate();
    if v.is_empty() {
        Ok(())
    } else {
        Err(PosetError::Invalid(v).into())
    }
}

/// `|[u/w]|`: nodes whose strict up-set is `{u}` and strict down-set `{w}`.
pub fn chain_class_card(p: &SkeletonPoset, u: &NodeId, w: &NodeId) -> CardTag {
    let explicit = p
        .nodes()
        .iter()
        .filter(|x| {
            let above: Vec<_> = p.nodes().iter().filter(|y| p.lt(x, y)).collect();
            let below: Vec<_> = p.nodes().iter().filter(|y| p.lt(y, x)).collect();
            above == [u] && below == [w] && p.classes_above(x).next().is_none() && p.classes_below(x).next().is_none()
        })
        .count();
    CardTag::Finite(explicit as u64) + p.class_card(&ClassKey::new([u.clone()], w.clone()))
}

/// Whether some chain `u > v > w` exists, `v` explicit or anonymous.
pub fn has_two_chain(p: &SkeletonPoset, u: &NodeId, w: &NodeId) -> bool {
    p.nodes().iter().any(|v| p.lt(w, v) && p.lt(v, u)) || p.classes_above(w).any(|c| c.key.ups.contains(u))
}

fn two_chain_witness(p: &SkeletonPoset, u: &NodeId, w: &NodeId) -> Vec<NodeId> {
    match p.nodes().iter().find(|v| p.lt(w, v) && p.lt(v, u)) {
        Some(v) => vec![u.clone(), v.clone(), w.clone()],
        None => vec![u.clone(), w.clone()],
    }
}

/// Checks the three K-poset conditions and properness in one pass.
///
/// Condition 1 cannot fail for a valid skeleton, since minimal and height-two
/// nodes are always explicit, and condition 2 cannot fail because class
/// members dominate a single minimal node. Both are still evaluated.
pub fn check_k(p: &SkeletonPoset) -> Result<KReport, AnalysisError> {
    ensure_valid(p)?;
    let poset_card = p.cardinality();
    let mut k_violations = Vec::new();
    if p.is_empty() {
        k_violations.push(KViolation {
            axiom: KAxiom::Nonempty,
            witness: vec![],
            detail: "the empty poset is not a K-poset".into(),
        });
        return Ok(KReport {
            is_k: false,
            is_proper: false,
            poset_card,
            violations: k_violations,
        });
    }

    // Explicit nodes are finitely many and class members sit at height one,
    // so condition 1 holds as soon as the skeleton is valid.
    let heights = p.heights();

    let minimals = p.minimal_nodes();
    for (i, a) in minimals.iter().enumerate() {
        for b in &minimals[i + 1..] {
            let bounds = p.mub(&[a.clone(), b.clone()])?;
            if let Some(VNode::Class(k)) = bounds.iter().find(|v| matches!(v, VNode::Class(_))) {
                if p.class_card(k).is_infinite() {
                    k_violations.push(KViolation {
                        axiom: KAxiom::FiniteMub,
                        witness: vec![a.clone(), b.clone()],
                        detail: format!("mub{{{a},{b}}} contains the infinite class {k}"),
                    });
                }
            }
        }
    }

    let maxima_h2: Vec<&NodeId> = p
        .nodes()
        .iter()
        .zip(&heights)
        .filter(|(_, &h)| h == 2)
        .map(|(n, _)| n)
        .collect();
    for u in &maxima_h2 {
        for w in &minimals {
            if !has_two_chain(p, u, w) {
                continue;
            }
            let c = chain_class_card(p, u, w);
            if c.is_finite() {
                k_violations.push(KViolation {
                    axiom: KAxiom::InfiniteChainClass,
                    witness: two_chain_witness(p, u, w),
                    detail: format!("chain from {w} to {u} but [{u}/{w}] has size {c}"),
                });
            }
        }
    }

    let mut proper_violations = Vec::new();
    for u in p.maximal_nodes() {
        for w in &minimals {
            let c = chain_class_card(p, &u, w);
            if !c.is_zero() && c != poset_card {
                proper_violations.push(KViolation {
                    axiom: KAxiom::Proper,
                    witness: vec![u.clone(), w.clone()],
                    detail: format!("[{u}/{w}] has size {c}, poset has size {poset_card}"),
                });
            }
        }
    }

    let is_k = k_violations.is_empty();
    let is_proper = is_k && proper_violations.is_empty();
    k_violations.extend(proper_violations);
    Ok(KReport {
        is_k,
        is_proper,
        poset_card,
        violations: k_violations,
    })
}

/// Same report as [`check_k`]. A non-K input yields `is_proper = false` with
/// the K violations listed rather than an error, so callers always see every
/// reason at once.
pub fn check_proper(p: &SkeletonPoset) -> Result<KReport, AnalysisError> {
    check_k(p)
}

/// Errors unless `p` is a proper K-poset.
pub fn require_proper(p: &SkeletonPoset) -> Result<KReport, AnalysisError> {
    let r = check_k(p)?;
    if !r.is_k {
        return Err(AnalysisError::NotK(r.violations));
    }
    if !r.is_proper {
        return Err(AnalysisError::NotProper(r.violations));
    }
    Ok(r)
}

/// Minimal nodes plus explicit height-one nodes above at least two of them.
pub fn script_h(p: &SkeletonPoset) -> BTreeSet<NodeId> {
    let heights = p.heights();
    p.nodes()
        .iter()
        .zip(heights)
        .filter(|(n, h)| match h {
            0 => true,
            1 => p.nodes().iter().filter(|w| p.lt(w, n)).count() >= 2,
            _ => false,
        })
        .map(|(n, _)| n.clone())
        .collect()
}

/// The unique maximal node, which must be explicit.
pub fn single_max(p: &SkeletonPoset) -> Result<NodeId, AnalysisError> {
    let maxima = p.maximal_nodes();
    let count = p.maximal_count();
    if count != CardTag::Finite(1) {
        return Err(AnalysisError::NotSingleMax(count.to_string()));
    }
    match maxima.into_iter().next() {
        Some(m) => Ok(m),
        None => Err(AnalysisError::NotSingleMax("one anonymous maximal node".into())),
    }
}

/// `Λ_V` in ascending label order.
pub fn lambda_set(v: &SkeletonPoset) -> Result<Vec<NodeId>, AnalysisError> {
    let m = single_max(v)?;
    if v.height(&m)? == 0 {
        return Err(AnalysisError::HeightZero(m));
    }
    Ok(lambda_of(v, &m))
}

fn lambda_of(v: &SkeletonPoset, m: &NodeId) -> Vec<NodeId> {
    let heights = v.heights();
    let mut h_star = script_h(v);
    h_star.remove(m);
    let anchors: BTreeSet<&NodeId> = h_star
        .iter()
        .filter(|n| heights[v.index_of(n).expect("own node")] == 1)
        .collect();
    h_star
        .iter()
        .filter(|x| anchors.contains(x) || !anchors.iter().any(|g| v.le(x, g)))
        .cloned()
        .collect()
}

pub fn d_value(v: &SkeletonPoset) -> Result<usize, AnalysisError> {
    Ok(lambda_set(v)?.len())
}

fn check_top(p: &SkeletonPoset, m: &NodeId) -> Result<(), AnalysisError> {
    if !p.is_maximal(m) {
        p.index_of(m)?;
        return Err(AnalysisError::NotMaximal(m.clone()));
    }
    if p.height(m)? == 0 {
        return Err(AnalysisError::HeightZero(m.clone()));
    }
    Ok(())
}

/// `d` of the down-closure of the maximal node `m`.
pub fn d_local(p: &SkeletonPoset, m: &NodeId) -> Result<usize, AnalysisError> {
    check_top(p, m)?;
    let l = p.down_closure(m)?;
    Ok(lambda_of(&l, m).len())
}

/// Explicit maximal nodes of positive height with `d_local > 1`, ascending.
pub fn non_simple_maxima(p: &SkeletonPoset) -> Result<Vec<NodeId>, AnalysisError> {
    require_proper(p)?;
    let heights = p.heights();
    let mut out = Vec::new();
    for m in p.maximal_nodes() {
        if heights[p.index_of(&m)?] > 0 && d_local(p, &m)? > 1 {
            out.push(m);
        }
    }
    Ok(out)
}

pub fn e_count(p: &SkeletonPoset) -> Result<usize, AnalysisError> {
    Ok(non_simple_maxima(p)?.len())
}

pub fn is_simple(p: &SkeletonPoset) -> Result<bool, AnalysisError> {
    Ok(e_count(p)? == 0)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Classification {
    Point,
    Fan(CardTag),
    Tent { k: usize, card: CardTag },
    NotSimpleSingleMax { d: usize, lambda: Vec<NodeId> },
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Point => f.write_str("point"),
            Classification::Fan(card) => write!(f, "fan card={card}"),
            Classification::Tent { k, card } => write!(f, "tent k={k} card={card}"),
            Classification::NotSimpleSingleMax { d, lambda } => {
                let names: Vec<&str> = lambda.iter().map(NodeId::as_str).collect();
                write!(f, "not-simple d={d} lambda={}", names.join(","))
            }
        }
    }
}

/// Shape of a proper K-poset with one maximal node.
pub fn classify_single_max(v: &SkeletonPoset) -> Result<Classification, AnalysisError> {
    require_proper(v)?;
    let count = v.maximal_count();
    if count != CardTag::Finite(1) {
        return Err(AnalysisError::NotSingleMax(count.to_string()));
    }
    let Some(m) = v.maximal_nodes().into_iter().next() else {
        // The only maximal node is a single anonymous member over one
        // minimal node.
        return Ok(Classification::Fan(CardTag::Finite(1)));
    };
    match v.dim() {
        0 => Ok(Classification::Point),
        dim => {
            let lambda = lambda_of(v, &m);
            if lambda.len() != 1 {
                Ok(Classification::NotSimpleSingleMax {
                    d: lambda.len(),
                    lambda,
                })
            } else if dim == 1 {
                Ok(Classification::Fan(CardTag::Finite(1)))
            } else {
                Ok(Classification::Tent {
                    k: v.minimal_nodes().len(),
                    card: v.cardinality(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(labels: &[&str]) -> BTreeSet<NodeId> {
        labels.iter().map(|s| NodeId::from(*s)).collect()
    }

    fn list(labels: &[&str]) -> Vec<NodeId> {
        labels.iter().map(|s| NodeId::from(*s)).collect()
    }

    #[test]
    fn tent_is_proper() {
        let r = check_proper(&fixtures::aleph0_tent()).unwrap();
        assert!(r.is_k && r.is_proper, "{r:?}");
        assert_eq!(r.poset_card, CardTag::Aleph0);
    }

    #[test]
    fn bare_chain_breaks_condition_three() {
        let p = SkeletonPoset::builder()
            .nodes(["m", "v", "w"])
            .le("w", "v")
            .le("v", "m")
            .build()
            .unwrap();
        let r = check_k(&p).unwrap();
        assert!(!r.is_k);
        assert_eq!(r.violations[0].axiom, KAxiom::InfiniteChainClass);
        assert_eq!(r.violations[0].witness, list(&["m", "v", "w"]));
    }

    #[test]
    fn point_and_fan_are_proper() {
        for p in [
            fixtures::point(),
            fixtures::fan(CardTag::Finite(1)),
            fixtures::fan(CardTag::Beta),
        ] {
            let r = check_proper(&p).unwrap();
            assert!(r.is_k && r.is_proper, "{r:?}");
        }
    }

    #[test]
    fn finite_class_is_not_proper() {
        let p = SkeletonPoset::builder()
            .nodes(["m", "t", "t1", "t2"])
            .le("t1", "t")
            .le("t2", "t")
            .le("t", "m")
            .class(["m"], "t1", CardTag::Finite(5))
            .class(["m"], "t2", CardTag::Aleph0)
            .build()
            .unwrap();
        let r = check_proper(&p).unwrap();
        assert!(!r.is_proper);
        assert!(r
            .violations
            .iter()
            .any(|v| v.axiom == KAxiom::Proper && v.witness == list(&["m", "t1"])));
    }

    #[test]
    fn empty_poset_is_rejected() {
        let r = check_k(&SkeletonPoset::empty()).unwrap();
        assert!(!r.is_k);
        assert_eq!(r.violations[0].axiom, KAxiom::Nonempty);
    }

    #[test]
    fn script_h_examples() {
        assert_eq!(script_h(&fixtures::aleph0_tent()), set(&["t", "t1", "t2"]));
        assert_eq!(script_h(&fixtures::fan(CardTag::Finite(1))), set(&["u"]));
        let p = SkeletonPoset::builder()
            .nodes(["u1", "u2", "h"])
            .le("u1", "h")
            .le("u2", "h")
            .build()
            .unwrap();
        assert_eq!(script_h(&p), set(&["h", "u1", "u2"]));
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_set(&fixtures::aleph0_tent()).unwrap(), list(&["t"]));
        assert_eq!(lambda_set(&fixtures::fan(CardTag::Finite(1))).unwrap(), list(&["u"]));
        assert_eq!(lambda_set(&fixtures::d2_example()).unwrap(), list(&["h1", "h2"]));
        assert!(matches!(
            lambda_set(&fixtures::two_tents()),
            Err(AnalysisError::NotSingleMax(_))
        ));
        assert!(matches!(
            lambda_set(&fixtures::point()),
            Err(AnalysisError::HeightZero(_))
        ));
    }

    #[test]
    fn d_and_e() {
        let tent = fixtures::aleph0_tent();
        assert_eq!(d_local(&tent, &"m".into()).unwrap(), 1);
        assert_eq!(d_local(&fixtures::d2_example(), &"m".into()).unwrap(), 2);
        assert_eq!(d_local(&fixtures::fan(CardTag::Finite(1)), &"m".into()).unwrap(), 1);
        assert!(matches!(d_local(&tent, &"t".into()), Err(AnalysisError::NotMaximal(_))));

        assert_eq!(e_count(&tent).unwrap(), 0);
        assert_eq!(e_count(&fixtures::d2_example()).unwrap(), 1);
        assert_eq!(e_count(&fixtures::two_d2_examples()).unwrap(), 2);
        assert!(is_simple(&fixtures::tent(3, CardTag::Beta)).unwrap());
        assert!(!is_simple(&fixtures::d2_example()).unwrap());
        assert!(is_simple(&fixtures::point()).unwrap());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify_single_max(&fixtures::aleph0_tent()).unwrap(),
            Classification::Tent {
                k: 2,
                card: CardTag::Aleph0
            }
        );
        assert_eq!(classify_single_max(&fixtures::point()).unwrap(), Classification::Point);
        assert_eq!(
            classify_single_max(&fixtures::fan(CardTag::Finite(1))).unwrap(),
            Classification::Fan(CardTag::Finite(1))
        );
        let c = classify_single_max(&fixtures::d2_example()).unwrap();
        assert_eq!(c.to_string(), "not-simple d=2 lambda=h1,h2");
        assert!(matches!(
            classify_single_max(&fixtures::two_tents()),
            Err(AnalysisError::NotSingleMax(_))
        ));
    }

    #[test]
    fn classification_text() {
        assert_eq!(
            Classification::Tent {
                k: 2,
                card: CardTag::Aleph0
            }
            .to_string(),
            "tent k=2 card=aleph0"
        );
        assert_eq!(Classification::Fan(CardTag::Finite(1)).to_string(), "fan card=finite:1");
    }
}
