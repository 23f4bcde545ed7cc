//! Isomorphism testing by signature-pruned backtracking.

use std::collections::BTreeMap;
use std::fmt;

use crate::card::CardTag;
use crate::map::{ClassFlow, PosetMap};
use crate::poset::{ClassKey, NodeId, SkeletonPoset};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NotIsomorphic {
    pub reason: String,
}

impl fmt::Display for NotIsomorphic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not isomorphic: {}", self.reason)
    }
}

impl std::error::Error for NotIsomorphic {}

fn refute(reason: impl Into<String>) -> NotIsomorphic {
    NotIsomorphic { reason: reason.into() }
}

// (is low, card, number of ups) for one class a node takes part in.
type Incidence = (bool, CardTag, usize);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Signature {
    height: u8,
    below: usize,
    above: usize,
    classes: Vec<Incidence>,
}

fn signatures(p: &SkeletonPoset) -> Vec<Signature> {
    let heights = p.heights();
    (0..p.len())
        .map(|i| {
            let n = &p.nodes()[i];
            let mut classes: Vec<Incidence> = p
                .classes()
                .iter()
                .filter_map(|c| {
                    if c.key.low == *n {
                        Some((true, c.card, c.key.ups.len()))
                    } else if c.key.ups.contains(n) {
                        Some((false, c.card, c.key.ups.len()))
                    } else {
                        None
                    }
                })
                .collect();
            classes.sort();
            Signature {
                height: heights[i],
                below: p.below_idx(i).count(),
                above: p.above_idx(i).count(),
                classes,
            }
        })
        .collect()
}

/// Finds an isomorphism `p -> q`: a bijection on explicit nodes that
/// preserves and reflects the order and carries every class onto a class of
/// the same cardinality.
pub fn iso_check(p: &SkeletonPoset, q: &SkeletonPoset) -> Result<PosetMap, NotIsomorphic> {
    if p.len() != q.len() {
        return Err(refute(format!("{} explicit nodes against {}", p.len(), q.len())));
    }
    if p.classes().len() != q.classes().len() {
        return Err(refute(format!(
            "{} classes against {}",
            p.classes().len(),
            q.classes().len()
        )));
    }
    let sp = signatures(p);
    let sq = signatures(q);
    let mut a = sp.clone();
    let mut b = sq.clone();
    a.sort();
    b.sort();
    if a != b {
        return Err(refute("node signatures differ"));
    }

    // Assign rare signatures first to cut the search early.
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by_key(|&i| (sp.iter().filter(|s| **s == sp[i]).count(), i));

    let mut search = Search {
        p,
        q,
        sp: &sp,
        sq: &sq,
        order: &order,
        assign: vec![usize::MAX; p.len()],
        used: vec![false; q.len()],
    };
    if !search.run(0) {
        return Err(refute("no order- and class-preserving bijection exists"));
    }
    let node_map: BTreeMap<NodeId, NodeId> = (0..p.len())
        .map(|i| (p.nodes()[i].clone(), q.nodes()[search.assign[i]].clone()))
        .collect();
    let flows: Vec<ClassFlow> = p
        .classes()
        .iter()
        .map(|c| ClassFlow {
            source: c.key.clone(),
            target: image_key(&c.key, &node_map),
            card: c.card,
        })
        .collect();
    Ok(PosetMap::new(p.clone(), q.clone(), node_map, flows))
}

pub fn is_isomorphic(p: &SkeletonPoset, q: &SkeletonPoset) -> bool {
    iso_check(p, q).is_ok()
}

fn image_key(k: &ClassKey, node_map: &BTreeMap<NodeId, NodeId>) -> ClassKey {
    ClassKey {
        ups: k.ups.iter().map(|u| node_map[u].clone()).collect(),
        low: node_map[&k.low].clone(),
    }
}

struct Search<'a> {
    p: &'a SkeletonPoset,
    q: &'a SkeletonPoset,
    sp: &'a [Signature],
    sq: &'a [Signature],
    order: &'a [usize],
    assign: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return self.classes_match();
        }
        let i = self.order[depth];
        for j in 0..self.q.len() {
            if self.used[j] || self.sp[i] != self.sq[j] || !self.consistent(depth, i, j) {
                continue;
            }
            self.assign[i] = j;
            self.used[j] = true;
            if self.run(depth + 1) {
                return true;
            }
            self.used[j] = false;
            self.assign[i] = usize::MAX;
        }
        false
    }

    fn consistent(&self, depth: usize, i: usize, j: usize) -> bool {
        self.order[..depth].iter().all(|&k| {
            let l = self.assign[k];
            self.p.le_idx(i, k) == self.q.le_idx(j, l) && self.p.le_idx(k, i) == self.q.le_idx(l, j)
        })
    }

    fn classes_match(&self) -> bool {
        let node = |i: usize| &self.q.nodes()[self.assign[i]];
        self.p.classes().iter().all(|c| {
            let key = ClassKey {
                ups: c
                    .key
                    .ups
                    .iter()
                    .map(|u| node(self.p.index_of(u).expect("own node")).clone())
                    .collect(),
                low: node(self.p.index_of(&c.key.low).expect("own node")).clone(),
            };
            self.q.class_card(&key) == c.card
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn relabel(p: &SkeletonPoset, f: impl Fn(&str) -> String) -> SkeletonPoset {
        let mut b = SkeletonPoset::builder();
        for n in p.nodes() {
            b.add_node(f(n.as_str()));
        }
        for (x, y) in p.covers() {
            b.add_le(f(x.as_str()), f(y.as_str()));
        }
        for c in p.classes() {
            b.add_class(
                ClassKey::new(c.key.ups.iter().map(|u| f(u.as_str())), f(c.key.low.as_str())),
                c.card,
            );
        }
        b.build().unwrap()
    }

    #[test]
    fn relabelled_copy_is_isomorphic() {
        let t = fixtures::aleph0_tent();
        let r = relabel(&t, |s| format!("z{}", s.chars().rev().collect::<String>()));
        let w = iso_check(&t, &r).unwrap();
        w.check_poset_map().unwrap();
        assert_eq!(w.node_map[&NodeId::from("m")], NodeId::from("zm"));
    }

    #[test]
    fn card_tags_are_invariants() {
        let a = fixtures::tent(2, CardTag::Aleph0);
        let b = fixtures::tent(2, CardTag::Beta);
        assert!(iso_check(&a, &b).is_err());
    }

    #[test]
    fn symmetric_and_reflexive() {
        for p in [
            fixtures::d2_example(),
            fixtures::two_tents(),
            fixtures::two_d2_examples(),
        ] {
            assert!(is_isomorphic(&p, &p));
            let r = relabel(&p, |s| format!("{s}'"));
            assert!(is_isomorphic(&p, &r));
            assert!(is_isomorphic(&r, &p));
        }
    }

    #[test]
    fn class_placement_matters() {
        // Same explicit order, classes on different minimal nodes.
        let base = || {
            SkeletonPoset::builder()
                .nodes(["a", "b", "m", "n"])
                .le("a", "m")
                .le("b", "m")
                .le("b", "n")
        };
        let p = base().class(["m"], "a", CardTag::Beta).build().unwrap();
        let q = base().class(["m"], "b", CardTag::Beta).build().unwrap();
        assert!(iso_check(&p, &q).is_err());
    }
}
