use std::collections::BTreeSet;

use crate::poset::{ClassKey, NodeId, SkeletonPoset, VNode};

/// Members materialized per class. Class members are pairwise
/// incomparable, so three of them expose every pattern the checked
/// predicates can observe.
pub const TRUNCATION: usize = 3;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Elem {
    Node(NodeId),
    Member(ClassKey, usize),
}

impl Elem {
    fn project(&self) -> VNode {
        match self {
            Elem::Node(n) => VNode::Node(n.clone()),
            Elem::Member(k, _) => VNode::Class(k.clone()),
        }
    }
}

/// A finite poset given by its elements and full order matrix.
#[derive(Clone, Debug)]
pub struct Materialized {
    pub elems: Vec<Elem>,
    le: Vec<Vec<bool>>,
}

impl Materialized {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i][j]
    }

    fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.le[i][j]
    }

    fn position(&self, n: &NodeId) -> Option<usize> {
        self.elems.iter().position(|e| *e == Elem::Node(n.clone()))
    }

    /// Longest chain ending at `i`, found by walking every chain down.
    fn height(&self, i: usize) -> usize {
        fn walk(m: &Materialized, top: usize, len: usize, best: &mut usize) {
            *best = (*best).max(len);
            for j in 0..m.len() {
                if m.lt(j, top) {
                    walk(m, j, len + 1, best);
                }
            }
        }
        let mut best = 0;
        walk(self, i, 0, &mut best);
        best
    }

    fn minimal(&self, i: usize) -> bool {
        (0..self.len()).all(|j| !self.lt(j, i))
    }

    fn maximal(&self, i: usize) -> bool {
        (0..self.len()).all(|j| !self.lt(i, j))
    }
}

/// Writes out `cap` members per infinite class (fewer for small finite
/// classes) and the order between all elements.
pub fn materialize(p: &SkeletonPoset, cap: usize) -> Materialized {
    let mut elems: Vec<Elem> = p.nodes().iter().cloned().map(Elem::Node).collect();
    for c in p.classes() {
        for k in 0..c.card.truncated(cap) {
            elems.push(Elem::Member(c.key.clone(), k));
        }
    }
    let le = elems
        .iter()
        .map(|a| {
            elems
                .iter()
                .map(|b| match (a, b) {
                    (Elem::Node(x), Elem::Node(y)) => p.le(x, y),
                    (Elem::Node(x), Elem::Member(k, _)) => *x == k.low,
                    (Elem::Member(k, _), Elem::Node(y)) => k.ups.contains(y),
                    (Elem::Member(k, i), Elem::Member(l, j)) => k == l && i == j,
                })
                .collect()
        })
        .collect();
    Materialized { elems, le }
}

pub fn brute_height(p: &SkeletonPoset, u: &NodeId) -> Option<usize> {
    let m = materialize(p, 2);
    m.position(u).map(|i| m.height(i))
}

fn bounds(p: &SkeletonPoset, set: &[NodeId], upper: bool) -> Option<BTreeSet<VNode>> {
    if set.is_empty() {
        return None;
    }
    let m = materialize(p, TRUNCATION);
    let idx: Vec<usize> = set.iter().map(|a| m.position(a)).collect::<Option<_>>()?;
    let common: Vec<usize> = (0..m.len())
        .filter(|&x| idx.iter().all(|&a| if upper { m.le(a, x) } else { m.le(x, a) }))
        .collect();
    Some(
        common
            .iter()
            .filter(|&&x| !common.iter().any(|&y| if upper { m.lt(y, x) } else { m.lt(x, y) }))
            .map(|&x| m.elems[x].project())
            .collect(),
    )
}

/// `min { x : x >= a for all a in set }`, or `None` for an empty or
/// unknown set.
pub fn brute_mub(p: &SkeletonPoset, set: &[NodeId]) -> Option<BTreeSet<VNode>> {
    bounds(p, set, true)
}

pub fn brute_mlb(p: &SkeletonPoset, set: &[NodeId]) -> Option<BTreeSet<VNode>> {
    bounds(p, set, false)
}

fn script_h_idx(m: &Materialized) -> (Vec<usize>, Vec<usize>) {
    let heights: Vec<usize> = (0..m.len()).map(|i| m.height(i)).collect();
    let h: Vec<usize> = (0..m.len())
        .filter(|&x| {
            m.minimal(x) || (heights[x] == 1 && (0..m.len()).filter(|&w| m.minimal(w) && m.lt(w, x)).count() >= 2)
        })
        .collect();
    (h, heights)
}

pub fn brute_script_h(p: &SkeletonPoset) -> BTreeSet<VNode> {
    let m = materialize(p, TRUNCATION);
    script_h_idx(&m).0.into_iter().map(|i| m.elems[i].project()).collect()
}

/// `Λ` straight from its definition, or a reason why it is undefined.
pub fn brute_lambda(p: &SkeletonPoset) -> Result<BTreeSet<VNode>, String> {
    let m = materialize(p, TRUNCATION);
    let maxima: Vec<usize> = (0..m.len()).filter(|&i| m.maximal(i)).collect();
    let [top] = maxima[..] else {
        return Err(format!("{} maximal elements", maxima.len()));
    };
    let (h, heights) = script_h_idx(&m);
    if heights[top] == 0 {
        return Err("maximal element has height zero".into());
    }
    let h_star: Vec<usize> = h.into_iter().filter(|&x| x != top).collect();
    let anchors: Vec<usize> = h_star.iter().copied().filter(|&x| heights[x] == 1).collect();
    Ok(h_star
        .iter()
        .filter(|&&x| anchors.contains(&x) || !anchors.iter().any(|&g| m.le(x, g)))
        .map(|&x| m.elems[x].project())
        .collect())
}

pub fn brute_connected(p: &SkeletonPoset) -> bool {
    let m = materialize(p, 1);
    if m.is_empty() {
        return true;
    }
    let mut seen = vec![false; m.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        let next: Vec<usize> = (0..m.len())
            .filter(|&j| !seen[j] && (m.le(i, j) || m.le(j, i)))
            .collect();
        for j in next {
            seen[j] = true;
            stack.push(j);
        }
    }
    seen.into_iter().all(|s| s)
}

/// Tries every bijection between the explicit nodes.
pub fn brute_iso(p: &SkeletonPoset, q: &SkeletonPoset) -> bool {
    let n = p.nodes().len();
    if n != q.nodes().len() || p.classes().len() != q.classes().len() {
        return false;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if is_iso_under(p, q, &perm) {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn is_iso_under(p: &SkeletonPoset, q: &SkeletonPoset, perm: &[usize]) -> bool {
    let (pn, qn) = (p.nodes(), q.nodes());
    let img = |x: &NodeId| &qn[perm[pn.iter().position(|y| y == x).expect("own node")]];
    for a in pn {
        for b in pn {
            if p.le(a, b) != q.le(img(a), img(b)) {
                return false;
            }
        }
    }
    p.classes().iter().all(|c| {
        let key = ClassKey {
            ups: c.key.ups.iter().map(|u| img(u).clone()).collect(),
            low: img(&c.key.low).clone(),
        };
        q.classes().iter().any(|d| d.key == key && d.card == c.card)
    })
}

pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
