use std::collections::{BTreeMap, BTreeSet};

use super::SplittingCertificate;
use crate::error::TransformError;
use crate::map::{ClassFlow, PosetMap};
use crate::poset::{ClassKey, NodeId, SkeletonPoset};

/// Identifies the maximal nodes in `fiber` to a single node. Returns the
/// quotient and the certificate that `u` splits it at the new node.
pub fn glue(
    u: &SkeletonPoset,
    fiber: &BTreeSet<NodeId>,
) -> Result<(SkeletonPoset, SplittingCertificate), TransformError> {
    glue_as(u, fiber, None)
}

/// [`glue`] with an explicit label for the glued node.
///
/// Without one, a single-node fiber keeps its label, a fiber `m#1, m#2, …`
/// produced by a split goes back to `m` when that label is free, and any
/// other fiber is named by joining its labels with `+`.
pub fn glue_as(
    u: &SkeletonPoset,
    fiber: &BTreeSet<NodeId>,
    name: Option<&NodeId>,
) -> Result<(SkeletonPoset, SplittingCertificate), TransformError> {
    if fiber.is_empty() {
        return Err(TransformError::EmptyFiber);
    }
    for n in fiber {
        if !u.is_maximal(n) {
            u.index_of(n)?;
            return Err(TransformError::FiberNotMaximal(n.clone()));
        }
        if u.height(n)? == 0 {
            return Err(TransformError::FiberHeightZero(n.clone()));
        }
    }
    let taken = |l: &NodeId| u.contains(l) && !fiber.contains(l);
    let glued = match name {
        Some(l) if taken(l) => return Err(TransformError::LabelCollision(l.clone())),
        Some(l) => l.clone(),
        None => default_name(fiber, &taken),
    };

    let image = |n: &NodeId| if fiber.contains(n) { glued.clone() } else { n.clone() };
    let mut b = SkeletonPoset::builder();
    b.add_node(glued.clone());
    for x in u.nodes() {
        b.add_node(image(x));
    }
    for (x, y) in u.covers() {
        b.add_le(image(&x), image(&y));
    }
    let mut flows = Vec::new();
    for c in u.classes() {
        let key = ClassKey {
            ups: c.key.ups.iter().map(image).collect(),
            low: c.key.low.clone(),
        };
        b.add_class(key.clone(), c.card);
        flows.push(ClassFlow {
            source: c.key.clone(),
            target: key,
            card: c.card,
        });
    }
    let v = b.build()?;
    let node_map: BTreeMap<NodeId, NodeId> = u.nodes().iter().map(|x| (x.clone(), image(x))).collect();
    let cert = SplittingCertificate {
        split_node: glued,
        fiber: fiber.clone(),
        map: PosetMap::new(u.clone(), v.clone(), node_map, flows),
    };
    Ok((v, cert))
}

fn default_name(fiber: &BTreeSet<NodeId>, taken: &dyn Fn(&NodeId) -> bool) -> NodeId {
    if fiber.len() == 1 {
        return fiber.iter().next().expect("nonempty").clone();
    }
    let bases: BTreeSet<&str> = fiber
        .iter()
        .filter_map(|n| {
            let (base, idx) = n.as_str().rsplit_once('#')?;
            idx.parse::<u32>().ok().map(|_| base)
        })
        .collect();
    if let [base] = bases.into_iter().collect::<Vec<_>>()[..] {
        let all_indexed = fiber.iter().all(|n| n.as_str().starts_with(&format!("{base}#")));
        let candidate = NodeId::from(base);
        if all_indexed && !taken(&candidate) {
            return candidate;
        }
    }
    let joined = fiber.iter().map(NodeId::as_str).collect::<Vec<_>>().join("+");
    let mut candidate = NodeId::new(joined.clone());
    let mut k = 1;
    while taken(&candidate) {
        candidate = NodeId::new(format!("{joined}#{k}"));
        k += 1;
    }
    candidate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::iso::{is_isomorphic, iso_check};
    use crate::transform::{split_at, verify_splitting};

    #[test]
    fn gluing_undoes_the_split() {
        let v = fixtures::d2_example();
        let c = split_at(&v, &"m".into()).unwrap();
        let (back, cert) = glue(c.upper(), &c.fiber).unwrap();
        assert_eq!(back, v);
        assert_eq!(cert.split_node, NodeId::from("m"));
        assert_eq!(verify_splitting(&cert), vec![]);
    }

    #[test]
    fn singleton_fiber_is_an_isomorphism() {
        let t = fixtures::aleph0_tent();
        let (v, cert) = glue(&t, &["m".into()].into()).unwrap();
        assert!(iso_check(&v, &t).is_ok());
        assert_eq!(verify_splitting(&cert), vec![]);
    }

    #[test]
    fn gluing_two_tents_merges_their_classes() {
        let two = fixtures::two_tents();
        let (v, _) = glue(&two, &["m".into(), "n".into()].into()).unwrap();
        assert_eq!(v.nodes(), &[NodeId::from("m+n"), "u".into()]);
        let want = SkeletonPoset::builder()
            .nodes(["u", "top"])
            .le("u", "top")
            .class(["top"], "u", crate::CardTag::Beta)
            .build()
            .unwrap();
        assert!(is_isomorphic(&v, &want));
    }

    #[test]
    fn bad_fibers_are_rejected() {
        let t = fixtures::aleph0_tent();
        assert!(matches!(glue(&t, &BTreeSet::new()), Err(TransformError::EmptyFiber)));
        assert!(matches!(
            glue(&t, &["t".into()].into()),
            Err(TransformError::FiberNotMaximal(_))
        ));
        let p = fixtures::antichain(&["a", "b"]);
        assert!(matches!(
            glue(&p, &["a".into()].into()),
            Err(TransformError::FiberHeightZero(_))
        ));
        assert!(matches!(
            glue_as(&fixtures::two_tents(), &["m".into()].into(), Some(&"u".into())),
            Err(TransformError::LabelCollision(_))
        ));
    }
}
