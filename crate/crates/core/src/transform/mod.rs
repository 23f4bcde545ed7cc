//! Splitting maps and the constructions that produce or consume them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::analysis::d_local;
use crate::error::TransformError;
use crate::map::PosetMap;
use crate::poset::{NodeId, SkeletonPoset};

mod expand;
mod glue;
mod simplify;
mod split;

pub use expand::{check_expansion, expand, Expansion, ExpansionViolation};
pub use glue::{glue, glue_as};
pub use simplify::{simplify, ChainStage, SimplifyingChain};
pub use split::{refine, split_at, split_unrefined};

pub(crate) use split::split_at_reserving;

/// A map `φ: U -> V` that splits the maximal node `split_node` of `V` into
/// the maximal nodes `fiber` of `U` and is a bijection everywhere else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingCertificate {
    pub split_node: NodeId,
    pub fiber: BTreeSet<NodeId>,
    pub map: PosetMap,
}

impl SplittingCertificate {
    pub fn upper(&self) -> &SkeletonPoset {
        &self.map.source
    }

    pub fn lower(&self) -> &SkeletonPoset {
        &self.map.target
    }

    /// The identity on `v`, splitting `m` into itself.
    pub fn trivial(v: &SkeletonPoset, m: &NodeId) -> Self {
        SplittingCertificate {
            split_node: m.clone(),
            fiber: [m.clone()].into(),
            map: PosetMap::identity(v),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SplitViolationKind {
    InvalidPoset,
    Fiber,
    Totality,
    FiberSize,
    Surjectivity,
    Monotonicity,
    ClassCoherence,
    ClassCard,
    Lifting,
    Dimension,
    MinimalNodes,
}

impl fmt::Display for SplitViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitViolationKind::InvalidPoset => "invalid-poset",
            SplitViolationKind::Fiber => "fiber",
            SplitViolationKind::Totality => "totality",
            SplitViolationKind::FiberSize => "fiber-size",
            SplitViolationKind::Surjectivity => "surjectivity",
            SplitViolationKind::Monotonicity => "monotonicity",
            SplitViolationKind::ClassCoherence => "class-coherence",
            SplitViolationKind::ClassCard => "class-card",
            SplitViolationKind::Lifting => "lifting",
            SplitViolationKind::Dimension => "dimension",
            SplitViolationKind::MinimalNodes => "minimal-nodes",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitViolation {
    pub kind: SplitViolationKind,
    pub detail: String,
}

impl fmt::Display for SplitViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

struct Report(Vec<SplitViolation>);

impl Report {
    fn push(&mut self, kind: SplitViolationKind, detail: impl Into<String>) {
        self.0.push(SplitViolation {
            kind,
            detail: detail.into(),
        });
    }
}

/// Every way in which `cert` fails to be a splitting map. Explicit nodes are
/// checked pairwise; anonymous members are checked class by class through
/// the flows.
pub fn verify_splitting(cert: &SplittingCertificate) -> Vec<SplitViolation> {
    use SplitViolationKind::*;
    let mut r = Report(Vec::new());
    let (u, v, phi) = (cert.upper(), cert.lower(), &cert.map);
    for (side, p) in [("upper", u), ("lower", v)] {
        for x in p.validate() {
            r.push(InvalidPoset, format!("{side}: {x}"));
        }
    }
    if !r.0.is_empty() {
        return r.0;
    }

    let m = &cert.split_node;
    if !v.contains(m) {
        r.push(Fiber, format!("split node {m} is not a node of the lower poset"));
        return r.0;
    }
    if !v.is_maximal(m) {
        r.push(Fiber, format!("split node {m} is not maximal"));
    } else if v.height(m).unwrap_or(0) == 0 {
        r.push(Fiber, format!("split node {m} has height zero"));
    }
    if cert.fiber.is_empty() {
        r.push(Fiber, "fiber is empty");
    }
    for n in &cert.fiber {
        if !u.contains(n) {
            r.push(Fiber, format!("fiber node {n} is not a node of the upper poset"));
        } else if !u.is_maximal(n) {
            r.push(Fiber, format!("fiber node {n} is not maximal"));
        } else if u.height(n).unwrap_or(0) == 0 {
            r.push(Fiber, format!("fiber node {n} has height zero"));
        }
    }

    for n in u.nodes() {
        match phi.image(n) {
            None => r.push(Totality, format!("{n} has no image")),
            Some(t) if !v.contains(t) => r.push(Totality, format!("{n} maps to unknown node {t}")),
            Some(_) => {}
        }
    }
    for n in phi.node_map.keys() {
        if !u.contains(n) {
            r.push(Totality, format!("map mentions unknown source node {n}"));
        }
    }
    if r.0.iter().any(|x| x.kind == Totality) {
        return r.0;
    }

    let mut pre: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (s, t) in &phi.node_map {
        pre.entry(t).or_default().push(s);
    }
    let over_m: BTreeSet<NodeId> = pre.get(m).into_iter().flatten().map(|n| (*n).clone()).collect();
    if over_m != cert.fiber {
        r.push(
            FiberSize,
            format!("preimage of {m} is {:?}, fiber is {:?}", over_m, cert.fiber),
        );
    }
    for y in v.nodes() {
        if y == m {
            continue;
        }
        match pre.get(y).map_or(0, Vec::len) {
            0 => r.push(Surjectivity, format!("{y} has no preimage")),
            1 => {}
            k => r.push(FiberSize, format!("{y} has {k} preimages {:?}", pre[y])),
        }
    }

    let img = |n: &NodeId| &phi.node_map[n];
    for a in u.nodes() {
        for b in u.nodes() {
            if u.le(a, b) && !v.le(img(a), img(b)) {
                r.push(
                    Monotonicity,
                    format!("{a} <= {b} but {} is not below {}", img(a), img(b)),
                );
            }
        }
    }

    for f in &phi.class_map {
        if u.class(&f.source).is_none() {
            r.push(ClassCoherence, format!("flow from unknown class {}", f.source));
            continue;
        }
        if v.class(&f.target).is_none() {
            r.push(ClassCoherence, format!("flow into unknown class {}", f.target));
            continue;
        }
        if *img(&f.source.low) != f.target.low {
            r.push(
                ClassCoherence,
                format!("members of {} land in {} above a different node", f.source, f.target),
            );
        }
        let ups: BTreeSet<NodeId> = f.source.ups.iter().map(|x| img(x).clone()).collect();
        if !ups.is_subset(&f.target.ups) {
            r.push(
                Monotonicity,
                format!(
                    "members of {} land in {}, which is not below all of {:?}",
                    f.source, f.target, ups
                ),
            );
        }
        if !f.target.ups.is_subset(&ups) {
            r.push(
                Lifting,
                format!("members of {} land in {} but lie below fewer nodes", f.source, f.target),
            );
        }
    }
    for c in u.classes() {
        let out = phi.outgoing(&c.key);
        if out != c.card {
            r.push(
                ClassCard,
                format!("class {} has size {} but maps {}", c.key, c.card, out),
            );
        }
    }
    for c in v.classes() {
        let inc = phi.incoming(&c.key);
        if inc.is_zero() {
            r.push(Surjectivity, format!("class {} has no preimage", c.key));
        } else if inc != c.card {
            r.push(
                ClassCard,
                format!("class {} has size {} but receives {}", c.key, c.card, inc),
            );
        }
    }

    for x in u.nodes() {
        for y in v.nodes() {
            if !v.le(img(x), y) {
                continue;
            }
            let lifted = pre.get(y).into_iter().flatten().any(|y2| u.le(x, y2));
            if !lifted {
                r.push(Lifting, format!("{x} maps below {y} but lies below no preimage of {y}"));
            }
        }
        // Anonymous targets: a member of K above img(x) must have a preimage
        // above x, so every class flowing into K must sit on x.
        for c in v.classes_above(img(x)) {
            for f in phi.flows_into(&c.key) {
                if f.source.low != *x {
                    r.push(
                        Lifting,
                        format!("{x} maps below {} but members of {} are not above {x}", c.key, f.source),
                    );
                }
            }
        }
    }

    if u.dim() != v.dim() {
        r.push(Dimension, format!("upper has dimension {}, lower {}", u.dim(), v.dim()));
    }
    let min_img: BTreeSet<NodeId> = u.minimal_nodes().iter().map(|n| img(n).clone()).collect();
    let min_v: BTreeSet<NodeId> = v.minimal_nodes().into_iter().collect();
    if min_img != min_v {
        r.push(
            MinimalNodes,
            format!("minimal nodes map onto {min_img:?}, lower has {min_v:?}"),
        );
    }
    r.0
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DMismatch {
    pub node: NodeId,
    pub upper: usize,
    pub lower: usize,
}

impl fmt::Display for DMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d at {} is {} above but {} below", self.node, self.upper, self.lower)
    }
}

/// Compares local `d` values at every maximal node of positive height
/// outside the fiber with those at its image.
pub fn check_d_preservation(cert: &SplittingCertificate) -> Result<Vec<DMismatch>, TransformError> {
    if let Some(first) = verify_splitting(cert).into_iter().next() {
        return Err(TransformError::Unverified(first.to_string()));
    }
    let u = cert.upper();
    let mut out = Vec::new();
    for n in u.maximal_nodes() {
        if cert.fiber.contains(&n) || u.height(&n)? == 0 {
            continue;
        }
        let image = &cert.map.node_map[&n];
        let (a, b) = (d_local(u, &n)?, d_local(cert.lower(), image)?);
        if a != b {
            out.push(DMismatch {
                node: n,
                upper: a,
                lower: b,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn trivial_certificate_verifies() {
        for p in [fixtures::aleph0_tent(), fixtures::d2_example()] {
            let c = SplittingCertificate::trivial(&p, &"m".into());
            assert_eq!(verify_splitting(&c), vec![]);
            assert_eq!(check_d_preservation(&c).unwrap(), vec![]);
        }
    }

    #[test]
    fn collapsing_two_nodes_breaks_fiber_sizes() {
        let t = fixtures::aleph0_tent();
        let mut c = SplittingCertificate::trivial(&t, &"m".into());
        c.map.node_map.insert("t2".into(), "t1".into());
        let v = verify_splitting(&c);
        assert!(v.iter().any(|x| x.kind == SplitViolationKind::FiberSize), "{v:?}");
    }

    #[test]
    fn unverified_certificate_is_refused() {
        let t = fixtures::aleph0_tent();
        let mut c = SplittingCertificate::trivial(&t, &"m".into());
        c.fiber.clear();
        assert!(matches!(check_d_preservation(&c), Err(TransformError::Unverified(_))));
    }
}
