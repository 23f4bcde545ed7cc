//! Maps between skeleton posets.
//!
//! Explicit nodes map to explicit nodes. Anonymous members are moved in
//! bulk by class flows: a flow sends `card` members of a source class onto
//! members of a target class. A map is a bijection between two unions of
//! classes exactly when, for every class on either side, the flows leaving
//! or entering it add up to its cardinality.

use std::collections::{BTreeMap, BTreeSet};

use crate::card::CardTag;
use crate::error::MapError;
use crate::poset::{ClassKey, NodeId, SkeletonPoset};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClassFlow {
    pub source: ClassKey,
    pub target: ClassKey,
    pub card: CardTag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetMap {
    pub source: SkeletonPoset,
    pub target: SkeletonPoset,
    pub node_map: BTreeMap<NodeId, NodeId>,
    /// Sorted; at most one flow per (source, target) pair.
    pub class_map: Vec<ClassFlow>,
}

impl PosetMap {
    pub fn new(
        source: SkeletonPoset,
        target: SkeletonPoset,
        node_map: BTreeMap<NodeId, NodeId>,
        flows: impl IntoIterator<Item = ClassFlow>,
    ) -> Self {
        PosetMap {
            source,
            target,
            node_map,
            class_map: normalize_flows(flows),
        }
    }

    pub fn identity(p: &SkeletonPoset) -> Self {
        let node_map = p.nodes().iter().map(|n| (n.clone(), n.clone())).collect();
        let flows = p.classes().iter().map(|c| ClassFlow {
            source: c.key.clone(),
            target: c.key.clone(),
            card: c.card,
        });
        PosetMap::new(p.clone(), p.clone(), node_map, flows)
    }

    /// Inclusion of `sub` into `sup`, where `sub` was cut out of `sup` by
    /// [`SkeletonPoset::restrict`]. Each class of `sub` is spread back over
    /// the classes of `sup` it was merged from.
    pub fn inclusion(sub: &SkeletonPoset, sup: &SkeletonPoset) -> Result<Self, MapError> {
        let mut node_map = BTreeMap::new();
        for n in sub.nodes() {
            sup.index_of(n)?;
            node_map.insert(n.clone(), n.clone());
        }
        let kept: BTreeSet<&NodeId> = sub.nodes().iter().collect();
        let mut flows = Vec::new();
        for c in sub.classes() {
            let origins: Vec<_> = sup
                .classes()
                .iter()
                .filter(|o| {
                    o.key.low == c.key.low && o.key.ups.iter().filter(|u| kept.contains(u)).eq(c.key.ups.iter())
                })
                .collect();
            let total: CardTag = origins.iter().map(|o| o.card).sum();
            if total != c.card {
                return Err(MapError::Unbalanced(format!(
                    "class {} has size {} but its origins add up to {}",
                    c.key, c.card, total
                )));
            }
            flows.extend(origins.into_iter().map(|o| ClassFlow {
                source: c.key.clone(),
                target: o.key.clone(),
                card: o.card,
            }));
        }
        Ok(PosetMap::new(sub.clone(), sup.clone(), node_map, flows))
    }

    pub fn image(&self, n: &NodeId) -> Option<&NodeId> {
        self.node_map.get(n)
    }

    pub fn preimage(&self, v: &NodeId) -> Vec<NodeId> {
        self.node_map
            .iter()
            .filter(|(_, t)| *t == v)
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn image_set<'a>(&self, nodes: impl IntoIterator<Item = &'a NodeId>) -> Result<BTreeSet<NodeId>, MapError> {
        nodes
            .into_iter()
            .map(|n| self.image(n).cloned().ok_or_else(|| MapError::Unmapped(n.clone())))
            .collect()
    }

    pub fn flows_from<'a>(&'a self, key: &'a ClassKey) -> impl Iterator<Item = &'a ClassFlow> + 'a {
        self.class_map.iter().filter(move |f| f.source == *key)
    }

    pub fn flows_into<'a>(&'a self, key: &'a ClassKey) -> impl Iterator<Item = &'a ClassFlow> + 'a {
        self.class_map.iter().filter(move |f| f.target == *key)
    }

    pub fn outgoing(&self, key: &ClassKey) -> CardTag {
        self.flows_from(key).map(|f| f.card).sum()
    }

    pub fn incoming(&self, key: &ClassKey) -> CardTag {
        self.flows_into(key).map(|f| f.card).sum()
    }

    /// Checks that the map is a total, monotone poset map whose flows are
    /// coherent with the node map: a flow `k -> K` needs
    /// `K.low = f(k.low)` and `f(k.ups) ⊆ K.ups`.
    pub fn check_poset_map(&self) -> Result<(), MapError> {
        for n in self.source.nodes() {
            let img = self.image(n).ok_or_else(|| MapError::Unmapped(n.clone()))?;
            self.target.index_of(img)?;
        }
        let nodes = self.source.nodes();
        for a in nodes {
            for b in nodes {
                if self.source.le(a, b) && !self.target.le(&self.node_map[a], &self.node_map[b]) {
                    return Err(MapError::NotMonotone(format!(
                        "{a} <= {b} but {} is not below {}",
                        self.node_map[a], self.node_map[b]
                    )));
                }
            }
        }
        for c in self.source.classes() {
            if self.outgoing(&c.key) != c.card {
                return Err(MapError::Unbalanced(format!(
                    "class {} has size {} but sends {}",
                    c.key,
                    c.card,
                    self.outgoing(&c.key)
                )));
            }
        }
        for f in &self.class_map {
            if self.source.class(&f.source).is_none() {
                return Err(MapError::Unbalanced(format!("flow from unknown class {}", f.source)));
            }
            if self.target.class(&f.target).is_none() {
                return Err(MapError::Unbalanced(format!("flow into unknown class {}", f.target)));
            }
            if self.node_map[&f.source.low] != f.target.low {
                return Err(MapError::NotMonotone(format!(
                    "members of {} sit above {} but land in {}",
                    f.source, self.node_map[&f.source.low], f.target
                )));
            }
            let ups = self.image_set(&f.source.ups)?;
            if !ups.is_subset(&f.target.ups) {
                return Err(MapError::NotMonotone(format!(
                    "members of {} sit below {:?} but land in {}",
                    f.source, ups, f.target
                )));
            }
        }
        Ok(())
    }

    /// `next ∘ self`. Members passing through an intermediate class are
    /// routed with [`transport`], so the intermediate class must be exactly
    /// filled by `self` and exactly emptied by `next`.
    pub fn then(&self, next: &PosetMap) -> Result<PosetMap, MapError> {
        let mut node_map = BTreeMap::new();
        for (a, b) in &self.node_map {
            let c = next.image(b).ok_or_else(|| MapError::Unmapped(b.clone()))?;
            node_map.insert(a.clone(), c.clone());
        }
        let mut flows = Vec::new();
        let middle: BTreeSet<&ClassKey> = self.class_map.iter().map(|f| &f.target).collect();
        for k in middle {
            let sources: Vec<(ClassKey, CardTag)> = self.flows_into(k).map(|f| (f.source.clone(), f.card)).collect();
            let targets: Vec<(ClassKey, CardTag)> = next.flows_from(k).map(|f| (f.target.clone(), f.card)).collect();
            let routed = transport(&sources, &targets).ok_or_else(|| {
                MapError::Unbalanced(format!("class {k} is not passed through exactly by the composite"))
            })?;
            flows.extend(
                routed
                    .into_iter()
                    .map(|(source, target, card)| ClassFlow { source, target, card }),
            );
        }
        Ok(PosetMap::new(self.source.clone(), next.target.clone(), node_map, flows))
    }
}

pub(crate) fn normalize_flows(flows: impl IntoIterator<Item = ClassFlow>) -> Vec<ClassFlow> {
    let mut merged: BTreeMap<(ClassKey, ClassKey), CardTag> = BTreeMap::new();
    for f in flows {
        if f.card.is_zero() {
            continue;
        }
        let slot = merged.entry((f.source, f.target)).or_default();
        *slot = *slot + f.card;
    }
    merged
        .into_iter()
        .map(|((source, target), card)| ClassFlow { source, target, card })
        .collect()
}

/// Splits supplies over demands when both sides have the same total.
///
/// Finite totals use the north-west corner rule. For an infinite total `κ`
/// one supply `s*` and one demand `d*` of size `κ` exist; every other supply
/// drains into `d*` and every other demand is served from `s*`, which is
/// consistent because `κ + λ = κ` for every `λ <= κ`.
pub fn transport<S: Clone, T: Clone>(
    supplies: &[(S, CardTag)],
    demands: &[(T, CardTag)],
) -> Option<Vec<(S, T, CardTag)>> {
    let total: CardTag = supplies.iter().map(|s| s.1).sum();
    if total != demands.iter().map(|d| d.1).sum::<CardTag>() {
        return None;
    }
    let mut out = Vec::new();
    match total {
        CardTag::Finite(_) => {
            let as_u64 = |c: CardTag| match c {
                CardTag::Finite(n) => n,
                _ => unreachable!("finite total"),
            };
            let mut left: Vec<u64> = demands.iter().map(|d| as_u64(d.1)).collect();
            let mut j = 0;
            for (s, c) in supplies {
                let mut have = as_u64(*c);
                while have > 0 {
                    while left[j] == 0 {
                        j += 1;
                    }
                    let moved = have.min(left[j]);
                    out.push((s.clone(), demands[j].0.clone(), CardTag::Finite(moved)));
                    have -= moved;
                    left[j] -= moved;
                }
            }
        }
        kappa => {
            let s_star = supplies.iter().position(|s| s.1 == kappa)?;
            let d_star = demands.iter().position(|d| d.1 == kappa)?;
            for (i, (s, c)) in supplies.iter().enumerate() {
                if i != s_star && !c.is_zero() {
                    out.push((s.clone(), demands[d_star].0.clone(), *c));
                }
            }
            for (j, (d, c)) in demands.iter().enumerate() {
                if j != d_star && !c.is_zero() {
                    out.push((supplies[s_star].0.clone(), d.clone(), *c));
                }
            }
            out.push((supplies[s_star].0.clone(), demands[d_star].0.clone(), kappa));
        }
    }
    Some(out)
}
