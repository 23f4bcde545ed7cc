use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{verify_splitting, SplitViolation, SplittingCertificate};
use crate::analysis::d_local;
use crate::card::CardTag;
use crate::error::TransformError;
use crate::map::{ClassFlow, PosetMap};
use crate::poset::{ClassKey, NodeId, SkeletonPoset};

/// The poset `Y` built by [`expand`] and the map `g: Y -> Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub poset: SkeletonPoset,
    pub map: PosetMap,
}

/// Extends `f: X -> Z` to `g: Y -> Z`, where `Y` is `X` together with the
/// part of `Z` that `f` misses.
///
/// Inside `X` and inside `Z ∖ f(X)` the order is inherited; `x ∈ X` lies
/// below `z ∉ f(X)` iff `f(x) <= z`. Requires that everything below an
/// image `f(x)` is itself an image, classes included.
pub fn expand(f: &PosetMap) -> Result<Expansion, TransformError> {
    f.check_poset_map()?;
    let (x, z) = (&f.source, &f.target);
    let image: BTreeSet<&NodeId> = f.node_map.values().collect();

    for c in z.classes() {
        let inc = f.incoming(&c.key);
        if !inc.is_zero() && inc != c.card {
            return Err(TransformError::PartialClassImage(format!(
                "{} has size {} but receives {}",
                c.key, c.card, inc
            )));
        }
    }
    for n in x.nodes() {
        let fx = &f.node_map[n];
        if let Some(w) = z.nodes().iter().find(|w| z.le(w, fx) && !image.contains(w)) {
            return Err(TransformError::DownSet {
                node: n.clone(),
                below: w.to_string(),
            });
        }
        if let Some(c) = z.classes_below(fx).find(|c| f.incoming(&c.key).is_zero()) {
            return Err(TransformError::DownSet {
                node: n.clone(),
                below: c.key.to_string(),
            });
        }
    }

    let rest: Vec<&NodeId> = z.nodes().iter().filter(|w| !image.contains(w)).collect();
    if let Some(clash) = rest.iter().find(|w| x.contains(w)) {
        return Err(TransformError::LabelCollision((*clash).clone()));
    }
    let rest_set: BTreeSet<&NodeId> = rest.iter().copied().collect();

    let mut nodes: Vec<NodeId> = x
        .nodes()
        .iter()
        .cloned()
        .chain(rest.iter().map(|w| (*w).clone()))
        .collect();
    nodes.sort();
    let n = nodes.len();
    let in_x = |a: &NodeId| x.contains(a);
    // Where a node of Y sits inside Z.
    let in_z = |a: &NodeId| -> NodeId {
        if in_x(a) {
            f.node_map[a].clone()
        } else {
            a.clone()
        }
    };
    let mut le = vec![false; n * n];
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            le[i * n + j] = match (in_x(a), in_x(b)) {
                (true, true) => x.le(a, b),
                (false, false) => z.le(a, b),
                (true, false) => z.le(&in_z(a), b),
                (false, true) => false,
            };
        }
    }

    let mut classes: BTreeMap<ClassKey, CardTag> = BTreeMap::new();
    let mut flows = Vec::new();
    let mut add = |key: ClassKey, target: &ClassKey, card: CardTag| {
        let slot = classes.entry(key.clone()).or_default();
        *slot = *slot + card;
        flows.push(ClassFlow {
            source: key,
            target: target.clone(),
            card,
        });
    };
    for flow in &f.class_map {
        let mut ups = flow.source.ups.clone();
        ups.extend(flow.target.ups.iter().filter(|u| rest_set.contains(u)).cloned());
        add(
            ClassKey {
                ups,
                low: flow.source.low.clone(),
            },
            &flow.target,
            flow.card,
        );
    }
    for c in z.classes() {
        if !f.incoming(&c.key).is_zero() {
            continue;
        }
        let low = if rest_set.contains(&c.key.low) {
            c.key.low.clone()
        } else {
            match f.preimage(&c.key.low)[..] {
                [ref only] => only.clone(),
                ref many => {
                    return Err(TransformError::Unrepresentable(format!(
                        "members of {} would sit above {} nodes",
                        c.key,
                        many.len()
                    )))
                }
            }
        };
        add(
            ClassKey {
                ups: c.key.ups.clone(),
                low,
            },
            &c.key,
            c.card,
        );
    }

    let y = SkeletonPoset::from_closed(nodes, le, classes);
    if let Some(first) = y.validate().into_iter().next() {
        return Err(TransformError::Unrepresentable(first.to_string()));
    }
    let node_map: BTreeMap<NodeId, NodeId> = y.nodes().iter().map(|a| (a.clone(), in_z(a))).collect();
    let map = PosetMap::new(y.clone(), z.clone(), node_map, flows);
    Ok(Expansion { poset: y, map })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExpansionViolation {
    /// `g` does not agree with `f` on `X`.
    Restriction(String),
    /// A node whose image is maximal lost maximality or its local `d`.
    Maximality(String),
    /// `g` fails to be a splitting map.
    Splitting(SplitViolation),
}

impl fmt::Display for ExpansionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpansionViolation::Restriction(s) => write!(f, "restriction: {s}"),
            ExpansionViolation::Maximality(s) => write!(f, "maximality: {s}"),
            ExpansionViolation::Splitting(v) => write!(f, "splitting: {v}"),
        }
    }
}

/// Checks the guarantees of [`expand`] literally.
///
/// * `g` restricted to `X` is `f`: same images, same order on `X`, and every
///   flow of `f` reappears in `g` from the class that absorbed it.
/// * A maximal node `n` of `X` of positive height with `f(n)` maximal stays
///   maximal in `Y` with the same local `d`.
/// * When `split` names a split node of `Z` and a fiber, and `f` splits its
///   image there, `g` is a splitting map.
pub fn check_expansion(
    f: &PosetMap,
    e: &Expansion,
    split: Option<(&NodeId, &BTreeSet<NodeId>)>,
) -> Result<Vec<ExpansionViolation>, TransformError> {
    let (x, z, y, g) = (&f.source, &f.target, &e.poset, &e.map);
    let mut out = Vec::new();
    for a in x.nodes() {
        if g.image(a) != f.image(a) {
            out.push(ExpansionViolation::Restriction(format!(
                "{a} maps to {:?} under g but {:?} under f",
                g.image(a),
                f.image(a)
            )));
        }
        for b in x.nodes() {
            if x.le(a, b) != y.le(a, b) {
                out.push(ExpansionViolation::Restriction(format!(
                    "order between {a} and {b} changed"
                )));
            }
        }
    }
    for flow in &f.class_map {
        let carried: CardTag = g
            .class_map
            .iter()
            .filter(|h| {
                h.target == flow.target
                    && h.source.low == flow.source.low
                    && flow.source.ups.iter().eq(h.source.ups.iter().filter(|u| x.contains(u)))
            })
            .map(|h| h.card)
            .sum();
        if carried != flow.card {
            out.push(ExpansionViolation::Restriction(format!(
                "f sends {} members of {} to {}, g sends {}",
                flow.card, flow.source, flow.target, carried
            )));
        }
    }

    for n in x.maximal_nodes() {
        if x.height(&n)? == 0 || !z.is_maximal(&f.node_map[&n]) {
            continue;
        }
        if !y.is_maximal(&n) {
            out.push(ExpansionViolation::Maximality(format!("{n} is no longer maximal")));
            continue;
        }
        let (dx, dy) = (d_local(x, &n)?, d_local(y, &n)?);
        if dx != dy {
            out.push(ExpansionViolation::Maximality(format!(
                "d at {n} went from {dx} to {dy}"
            )));
        }
    }

    if let Some((m, fiber)) = split {
        let cert = SplittingCertificate {
            split_node: m.clone(),
            fiber: fiber.clone(),
            map: g.clone(),
        };
        out.extend(verify_splitting(&cert).into_iter().map(ExpansionViolation::Splitting));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::transform::split_at_reserving;

    #[test]
    fn identity_expands_to_itself() {
        let z = fixtures::two_tents();
        let f = PosetMap::identity(&z);
        let e = expand(&f).unwrap();
        assert_eq!(e.poset, z);
        assert_eq!(e.map, f);
        assert_eq!(check_expansion(&f, &e, None).unwrap(), vec![]);
    }

    #[test]
    fn missing_down_set_element_is_reported() {
        let z = fixtures::aleph0_tent();
        let x = SkeletonPoset::builder().node("t").build().unwrap();
        let f = PosetMap::new(x, z, [("t".into(), "t".into())].into(), []);
        match expand(&f) {
            Err(TransformError::DownSet { node, below }) => {
                assert_eq!(node, NodeId::from("t"));
                assert_eq!(below, "t1");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn local_split_extends_to_whole_poset() {
        // d = 2 example with an extra tent hanging off u1.
        let z = SkeletonPoset::builder()
            .nodes(["u1", "u2", "h1", "h2", "m", "n"])
            .le("u1", "h1")
            .le("u2", "h1")
            .le("u1", "h2")
            .le("u2", "h2")
            .le("h1", "m")
            .le("h2", "m")
            .le("u1", "n")
            .class(["m"], "u1", CardTag::Beta)
            .class(["m"], "u2", CardTag::Beta)
            .class(["n"], "u1", CardTag::Beta)
            .class(["m", "n"], "u1", CardTag::Finite(2))
            .build()
            .unwrap();
        let m = NodeId::from("m");
        let l = z.down_closure(&m).unwrap();
        let incl = PosetMap::inclusion(&l, &z).unwrap();
        let reserved = z.nodes().iter().cloned().collect();
        let local = split_at_reserving(&l, &m, &reserved).unwrap();
        let f = local.map.then(&incl).unwrap();
        let e = expand(&f).unwrap();
        let v = check_expansion(&f, &e, Some((&m, &local.fiber))).unwrap();
        assert_eq!(v, vec![]);
        assert!(e.poset.contains(&"n".into()));
        assert!(e.poset.is_maximal(&"n".into()));
    }
}
