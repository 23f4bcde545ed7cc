use std::collections::{BTreeMap, BTreeSet};

use super::SplittingCertificate;
use crate::analysis::{has_two_chain, lambda_set, require_proper, script_h, single_max};
use crate::card::CardTag;
use crate::error::{AnalysisError, TransformError};
use crate::map::{ClassFlow, PosetMap};
use crate::poset::{ClassKey, NodeId, SkeletonPoset};

/// Splits the single maximal node `m` of `v` into one node per element of
/// `Λ_V`, so that each new maximal node has local `d` equal to one, then
/// refines the result back into a proper K-poset.
///
/// When `Λ_V` has one element there is nothing to split and the identity
/// certificate is returned.
pub fn split_at(v: &SkeletonPoset, m: &NodeId) -> Result<SplittingCertificate, TransformError> {
    split_at_reserving(v, m, &BTreeSet::new())
}

/// The splitting [`split_at`] builds before [`refine`]. Its upper poset may
/// lack the classes a proper K-poset needs.
pub fn split_unrefined(v: &SkeletonPoset, m: &NodeId) -> Result<SplittingCertificate, TransformError> {
    construct(v, m, &BTreeSet::new())
}

/// [`split_at`], keeping fresh labels clear of `reserved` as well.
pub(crate) fn split_at_reserving(
    v: &SkeletonPoset,
    m: &NodeId,
    reserved: &BTreeSet<NodeId>,
) -> Result<SplittingCertificate, TransformError> {
    let cert = construct(v, m, reserved)?;
    if cert.fiber.len() == 1 {
        return Ok(cert);
    }
    refine(&cert)
}

fn construct(
    v: &SkeletonPoset,
    m: &NodeId,
    reserved: &BTreeSet<NodeId>,
) -> Result<SplittingCertificate, TransformError> {
    require_proper(v)?;
    let top = single_max(v)?;
    if top != *m {
        v.index_of(m)?;
        return Err(AnalysisError::NotMaximal(m.clone()).into());
    }
    if v.height(m)? == 0 {
        return Err(AnalysisError::HeightZero(m.clone()).into());
    }
    let lambda = lambda_set(v)?;
    if lambda.len() <= 1 {
        return Ok(SplittingCertificate::trivial(v, m));
    }
    let fresh = fresh_labels(m, lambda.len(), |l| v.contains(l) || reserved.contains(l));

    let heights = v.heights();
    let mut h_star = script_h(v);
    h_star.remove(m);
    let anchors: BTreeSet<&NodeId> = h_star
        .iter()
        .filter(|n| heights[v.index_of(n).expect("own node")] == 1)
        .collect();

    // Indices i with x <= m_i.
    let targets = |x: &NodeId| -> Result<BTreeSet<usize>, TransformError> {
        let below: Vec<usize> = (0..lambda.len()).filter(|&i| v.le(&lambda[i], x)).collect();
        match below[..] {
            [j] => Ok([j].into()),
            [] => {
                let mins: Vec<&NodeId> = v.nodes().iter().filter(|w| v.is_minimal(w) && v.le(w, x)).collect();
                let [base] = mins[..] else {
                    return Err(TransformError::Unrepresentable(format!(
                        "{x} meets no branch anchor and lies above {} minimal nodes",
                        mins.len()
                    )));
                };
                Ok((0..lambda.len())
                    .filter(|&i| anchors.contains(&lambda[i]) && v.le(base, &lambda[i]))
                    .collect())
            }
            _ => Err(TransformError::Unrepresentable(format!(
                "{x} lies above several branch anchors"
            ))),
        }
    };

    let mut b = SkeletonPoset::builder();
    let mut node_map = BTreeMap::new();
    for x in v.nodes().iter().filter(|x| *x != m) {
        b.add_node(x.clone());
        node_map.insert(x.clone(), x.clone());
        for i in targets(x)? {
            b.add_le(x.clone(), fresh[i].clone());
        }
    }
    for (x, y) in v.covers() {
        if y != *m {
            b.add_le(x, y);
        }
    }
    for f in &fresh {
        b.add_node(f.clone());
        node_map.insert(f.clone(), m.clone());
    }
    let mut flows = Vec::new();
    for c in v.classes() {
        let t = targets(&c.key.low)?;
        if t.is_empty() {
            return Err(TransformError::Unrepresentable(format!(
                "members of {} would lose every maximal node above them",
                c.key
            )));
        }
        let key = ClassKey {
            ups: t.into_iter().map(|i| fresh[i].clone()).collect(),
            low: c.key.low.clone(),
        };
        b.add_class(key.clone(), c.card);
        flows.push(ClassFlow {
            source: key,
            target: c.key.clone(),
            card: c.card,
        });
    }
    let w = b.build()?;
    Ok(SplittingCertificate {
        split_node: m.clone(),
        fiber: fresh.into_iter().collect(),
        map: PosetMap::new(w, v.clone(), node_map, flows),
    })
}

/// `m#1, m#2, …`, skipping labels for which `taken` holds.
pub(crate) fn fresh_labels(m: &NodeId, n: usize, taken: impl Fn(&NodeId) -> bool) -> Vec<NodeId> {
    (1..)
        .map(|k| NodeId::new(format!("{m}#{k}")))
        .filter(|l| !taken(l))
        .take(n)
        .collect()
}

/// Enlarges every class `({u}, w)` sitting on a chain of length two in the
/// upper poset to the size of the lower poset, routing the new members onto
/// the matching class below. The lower poset must be a proper K-poset and
/// the certificate must already verify.
pub fn refine(cert: &SplittingCertificate) -> Result<SplittingCertificate, TransformError> {
    let v = cert.lower();
    require_proper(v)?;
    if let Some(first) = super::verify_splitting(cert).into_iter().next() {
        return Err(TransformError::Unverified(first.to_string()));
    }
    let w = cert.upper();
    let beta = v.cardinality();
    let mut classes: BTreeMap<ClassKey, CardTag> = w.classes().iter().map(|c| (c.key.clone(), c.card)).collect();
    let mut flows = cert.map.class_map.clone();
    let phi = &cert.map.node_map;
    let minimals = w.minimal_nodes();
    for u in w.maximal_nodes() {
        for low in &minimals {
            if !has_two_chain(w, &u, low) {
                continue;
            }
            let key = ClassKey::new([u.clone()], low.clone());
            if classes.get(&key) == Some(&beta) {
                continue;
            }
            let target = ClassKey::new([phi[&u].clone()], phi[low].clone());
            let tc = v.class_card(&target);
            if !tc.is_infinite() {
                return Err(TransformError::FiniteTarget {
                    class: target.to_string(),
                    card: tc,
                });
            }
            classes.insert(key.clone(), beta);
            flows.retain(|f| f.source != key);
            flows.push(ClassFlow {
                source: key,
                target,
                card: beta,
            });
        }
    }
    Ok(SplittingCertificate {
        split_node: cert.split_node.clone(),
        fiber: cert.fiber.clone(),
        map: PosetMap::new(w.with_classes(classes), v.clone(), phi.clone(), flows),
    })
}
