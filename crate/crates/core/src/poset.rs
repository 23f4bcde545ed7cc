//! Skeleton posets: a finite set of explicit nodes plus anonymous height-one
//! classes that carry a symbolic cardinality.
//!
//! The poset a skeleton denotes is its explicit nodes together with
//! `card` anonymous members per class. Each member of the class keyed
//! `(ups, low)` lies strictly above `low`, strictly below every node in
//! `ups`, and is incomparable to everything else. Members therefore always
//! have height one and dominate exactly one minimal node.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::card::CardTag;
use crate::error::PosetError;

/// Label of an explicit node. Labels are unique within one poset and
/// compare by string order, which fixes every enumeration order in the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Self {
        NodeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Identity of an anonymous class: the maximal nodes above its members and
/// the one minimal node below them.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ClassKey {
    pub ups: BTreeSet<NodeId>,
    pub low: NodeId,
}

impl ClassKey {
    pub fn new<I, S>(ups: I, low: impl Into<NodeId>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<NodeId>,
    {
        ClassKey {
            ups: ups.into_iter().map(Into::into).collect(),
            low: low.into(),
        }
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[{")?;
        for (i, u) in self.ups.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{u}")?;
        }
        write!(f, "}}/{}]", self.low)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassRecord {
    pub key: ClassKey,
    pub card: CardTag,
}

impl ClassRecord {
    pub fn new(key: ClassKey, card: CardTag) -> Self {
        ClassRecord { key, card }
    }

    pub fn ups(&self) -> &BTreeSet<NodeId> {
        &self.key.ups
    }

    pub fn low(&self) -> &NodeId {
        &self.key.low
    }
}

/// A node of the denoted poset: an explicit node, or a handle standing for
/// any one member of a class (all members of a class compare alike).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VNode {
    Node(NodeId),
    Class(ClassKey),
}

impl VNode {
    pub fn node(label: impl Into<NodeId>) -> Self {
        VNode::Node(label.into())
    }

    pub fn as_node(&self) -> Option<&NodeId> {
        match self {
            VNode::Node(n) => Some(n),
            VNode::Class(_) => None,
        }
    }
}

impl fmt::Display for VNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VNode::Node(n) => write!(f, "{n}"),
            VNode::Class(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Axiom {
    Reflexivity,
    Antisymmetry,
    Transitivity,
    Dimension,
    ClassWellFormedness,
    KeyUniqueness,
    UnknownNode,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Reflexivity => "reflexivity",
            Axiom::Antisymmetry => "antisymmetry",
            Axiom::Transitivity => "transitivity",
            Axiom::Dimension => "dimension",
            Axiom::ClassWellFormedness => "class well-formedness",
            Axiom::KeyUniqueness => "key uniqueness",
            Axiom::UnknownNode => "unknown node",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<NodeId>,
    pub detail: String,
}

impl Violation {
    fn new(axiom: Axiom, witness: Vec<NodeId>, detail: impl Into<String>) -> Self {
        Violation {
            axiom,
            witness,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.axiom, self.detail)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SkeletonPoset {
    nodes: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    // Row-major n*n matrix; le[i * n + j] iff nodes[i] <= nodes[j].
    le: Vec<bool>,
    // Sorted by key. Unique in every validated poset.
    classes: Vec<ClassRecord>,
}

impl SkeletonPoset {
    pub fn builder() -> PosetBuilder {
        PosetBuilder::default()
    }

    pub fn empty() -> Self {
        SkeletonPoset::default()
    }

    /// Takes `pairs` literally as the order relation: no closure, no
    /// reflexive pairs added and no checks. Use [`SkeletonPoset::validate`]
    /// to find out what is wrong with the candidate.
    pub fn from_relation_unchecked<N, P, C>(nodes: N, pairs: P, classes: C) -> Self
    where
        N: IntoIterator<Item = NodeId>,
        P: IntoIterator<Item = (NodeId, NodeId)>,
        C: IntoIterator<Item = ClassRecord>,
    {
        let nodes: Vec<NodeId> = nodes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let index: BTreeMap<NodeId, usize> = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let n = nodes.len();
        let mut le = vec![false; n * n];
        for (a, b) in pairs {
            if let (Some(&i), Some(&j)) = (index.get(&a), index.get(&b)) {
                le[i * n + j] = true;
            }
        }
        let mut classes: Vec<ClassRecord> = classes.into_iter().collect();
        classes.sort_by(|a, b| a.key.cmp(&b.key));
        SkeletonPoset {
            nodes,
            index,
            le,
            classes,
        }
    }

    /// Builds from an already closed relation matrix and merged classes.
    pub(crate) fn from_closed(nodes: Vec<NodeId>, le: Vec<bool>, classes: BTreeMap<ClassKey, CardTag>) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(le.len(), nodes.len() * nodes.len());
        let index = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        SkeletonPoset {
            nodes,
            index,
            le,
            classes: classes
                .into_iter()
                .map(|(key, card)| ClassRecord { key, card })
                .collect(),
        }
    }

    /// Same explicit order, different classes. Not validated.
    pub(crate) fn with_classes(&self, classes: BTreeMap<ClassKey, CardTag>) -> Self {
        SkeletonPoset::from_closed(self.nodes.clone(), self.le.clone(), classes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.classes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn classes(&self) -> &[ClassRecord] {
        &self.classes
    }

    pub fn contains(&self, u: &NodeId) -> bool {
        self.index.contains_key(u)
    }

    pub fn index_of(&self, u: &NodeId) -> Result<usize, PosetError> {
        self.index
            .get(u)
            .copied()
            .ok_or_else(|| PosetError::UnknownNode(u.clone()))
    }

    pub fn class(&self, key: &ClassKey) -> Option<&ClassRecord> {
        self.classes
            .binary_search_by(|c| c.key.cmp(key))
            .ok()
            .map(|i| &self.classes[i])
    }

    /// Cardinality recorded for `key`, zero when there is no such class.
    pub fn class_card(&self, key: &ClassKey) -> CardTag {
        self.class(key).map_or(CardTag::ZERO, |c| c.card)
    }

    pub(crate) fn le_idx(&self, i: usize, j: usize) -> bool {
        self.le[i * self.nodes.len() + j]
    }

    pub(crate) fn lt_idx(&self, i: usize, j: usize) -> bool {
        i != j && self.le_idx(i, j)
    }

    /// `a <= b` among explicit nodes; false when either is unknown.
    pub fn le(&self, a: &NodeId, b: &NodeId) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.le_idx(i, j),
            _ => false,
        }
    }

    pub fn lt(&self, a: &NodeId, b: &NodeId) -> bool {
        a != b && self.le(a, b)
    }

    /// Order on the denoted poset. Two class handles compare only when they
    /// are the same handle.
    pub fn vle(&self, a: &VNode, b: &VNode) -> bool {
        match (a, b) {
            (VNode::Node(x), VNode::Node(y)) => self.le(x, y),
            (VNode::Node(x), VNode::Class(k)) => *x == k.low,
            (VNode::Class(k), VNode::Node(y)) => k.ups.contains(y),
            (VNode::Class(k), VNode::Class(l)) => k == l,
        }
    }

    fn check_vnode(&self, v: &VNode) -> Result<(), PosetError> {
        match v {
            VNode::Node(n) => self.index_of(n).map(|_| ()),
            VNode::Class(k) => match self.class(k) {
                Some(_) => Ok(()),
                None => Err(PosetError::UnknownNode(NodeId::new(k.to_string()))),
            },
        }
    }

    pub(crate) fn below_idx(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&i| self.lt_idx(i, j))
    }

    pub(crate) fn above_idx(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&j| self.lt_idx(i, j))
    }

    /// Classes whose members lie above `u`.
    pub fn classes_above<'a>(&'a self, u: &'a NodeId) -> impl Iterator<Item = &'a ClassRecord> + 'a {
        self.classes.iter().filter(move |c| c.key.low == *u)
    }

    /// Classes whose members lie below `u`.
    pub fn classes_below<'a>(&'a self, u: &'a NodeId) -> impl Iterator<Item = &'a ClassRecord> + 'a {
        self.classes.iter().filter(move |c| c.key.ups.contains(u))
    }

    pub fn is_minimal(&self, u: &NodeId) -> bool {
        match self.index.get(u) {
            Some(&j) => self.below_idx(j).next().is_none(),
            None => false,
        }
    }

    pub fn is_maximal(&self, u: &NodeId) -> bool {
        match self.index.get(u) {
            Some(&i) => self.above_idx(i).next().is_none() && self.classes_above(u).next().is_none(),
            None => false,
        }
    }

    pub fn minimal_nodes(&self) -> Vec<NodeId> {
        self.nodes.iter().filter(|u| self.is_minimal(u)).cloned().collect()
    }

    /// Explicit maximal nodes, ascending label order.
    pub fn maximal_nodes(&self) -> Vec<NodeId> {
        self.nodes.iter().filter(|u| self.is_maximal(u)).cloned().collect()
    }

    /// Classes whose members are themselves maximal (empty `ups`).
    pub fn anonymous_maxima(&self) -> impl Iterator<Item = &ClassRecord> {
        self.classes.iter().filter(|c| c.key.ups.is_empty())
    }

    /// Number of maximal nodes of the denoted poset.
    pub fn maximal_count(&self) -> CardTag {
        let explicit = CardTag::Finite(self.maximal_nodes().len() as u64);
        explicit + self.anonymous_maxima().map(|c| c.card).sum()
    }

    /// Heights of all explicit nodes, indexed like [`SkeletonPoset::nodes`].
    pub fn heights(&self) -> Vec<u8> {
        let n = self.nodes.len();
        // In a closed order, sorting by the size of the strict down-set
        // yields a linear extension.
        let mut order: Vec<usize> = (0..n).collect();
        let down: Vec<usize> = (0..n).map(|j| self.below_idx(j).count()).collect();
        order.sort_by_key(|&j| down[j]);
        let mut h = vec![0u8; n];
        for &j in &order {
            let mut best = 0u8;
            for i in self.below_idx(j) {
                best = best.max(h[i].saturating_add(1));
            }
            if self.classes_below(&self.nodes[j]).next().is_some() {
                best = best.max(2);
            }
            h[j] = best;
        }
        h
    }

    /// Length of the longest chain strictly below `u`.
    pub fn height(&self, u: &NodeId) -> Result<u8, PosetError> {
        let i = self.index_of(u)?;
        Ok(self.heights()[i])
    }

    /// Height of a node of the denoted poset; class members have height one.
    pub fn vheight(&self, v: &VNode) -> Result<u8, PosetError> {
        match v {
            VNode::Node(n) => self.height(n),
            VNode::Class(_) => {
                self.check_vnode(v)?;
                Ok(1)
            }
        }
    }

    pub fn dim(&self) -> u8 {
        let explicit = self.heights().into_iter().max().unwrap_or(0);
        if self.classes.is_empty() {
            explicit
        } else {
            explicit.max(1)
        }
    }

    /// Size of the denoted poset: explicit nodes plus every class.
    pub fn cardinality(&self) -> CardTag {
        CardTag::Finite(self.nodes.len() as u64) + self.classes.iter().map(|c| c.card).sum()
    }

    /// `G(v)`, or `G(v)*` when `strict`.
    pub fn up_set(&self, v: &VNode, strict: bool) -> Result<BTreeSet<VNode>, PosetError> {
        self.check_vnode(v)?;
        let mut out = BTreeSet::new();
        match v {
            VNode::Node(u) => {
                let i = self.index_of(u)?;
                for j in 0..self.nodes.len() {
                    if self.le_idx(i, j) && !(strict && i == j) {
                        out.insert(VNode::Node(self.nodes[j].clone()));
                    }
                }
                out.extend(self.classes_above(u).map(|c| VNode::Class(c.key.clone())));
            }
            VNode::Class(k) => {
                out.extend(k.ups.iter().cloned().map(VNode::Node));
                if !strict {
                    out.insert(v.clone());
                }
            }
        }
        Ok(out)
    }

    /// `L(v)`, or `L(v)*` when `strict`.
    pub fn down_set(&self, v: &VNode, strict: bool) -> Result<BTreeSet<VNode>, PosetError> {
        self.check_vnode(v)?;
        let mut out = BTreeSet::new();
        match v {
            VNode::Node(u) => {
                let j = self.index_of(u)?;
                for i in 0..self.nodes.len() {
                    if self.le_idx(i, j) && !(strict && i == j) {
                        out.insert(VNode::Node(self.nodes[i].clone()));
                    }
                }
                out.extend(self.classes_below(u).map(|c| VNode::Class(c.key.clone())));
            }
            VNode::Class(k) => {
                out.insert(VNode::Node(k.low.clone()));
                if !strict {
                    out.insert(v.clone());
                }
            }
        }
        Ok(out)
    }

    fn all_vnodes(&self) -> impl Iterator<Item = VNode> + '_ {
        self.nodes
            .iter()
            .cloned()
            .map(VNode::Node)
            .chain(self.classes.iter().map(|c| VNode::Class(c.key.clone())))
    }

    fn check_bound_args(&self, set: &[NodeId]) -> Result<(), PosetError> {
        if set.is_empty() {
            return Err(PosetError::EmptySet);
        }
        for a in set {
            self.index_of(a)?;
        }
        Ok(())
    }

    /// Minimal upper bounds of `set`.
    pub fn mub(&self, set: &[NodeId]) -> Result<BTreeSet<VNode>, PosetError> {
        self.check_bound_args(set)?;
        let bounds: Vec<VNode> = self
            .all_vnodes()
            .filter(|v| set.iter().all(|a| self.vle(&VNode::Node(a.clone()), v)))
            .collect();
        Ok(self.extremal(&bounds, true))
    }

    /// Maximal lower bounds of `set`.
    pub fn mlb(&self, set: &[NodeId]) -> Result<BTreeSet<VNode>, PosetError> {
        self.check_bound_args(set)?;
        let bounds: Vec<VNode> = self
            .all_vnodes()
            .filter(|v| set.iter().all(|a| self.vle(v, &VNode::Node(a.clone()))))
            .collect();
        Ok(self.extremal(&bounds, false))
    }

    fn extremal(&self, items: &[VNode], minimal: bool) -> BTreeSet<VNode> {
        items
            .iter()
            .filter(|v| {
                !items
                    .iter()
                    .any(|w| w != *v && if minimal { self.vle(w, v) } else { self.vle(v, w) })
            })
            .cloned()
            .collect()
    }

    /// Induced sub-poset on the nodes accepted by `keep`.
    ///
    /// A class survives when `keep` accepts its handle and its low node; its
    /// `ups` shrink to the surviving explicit nodes. Classes whose low node
    /// is dropped cannot be represented and are dropped with it. Classes
    /// that collide after shrinking are merged by cardinal addition.
    pub fn restrict<F>(&self, keep: F) -> SkeletonPoset
    where
        F: Fn(&VNode) -> bool,
    {
        let kept: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| keep(&VNode::Node(self.nodes[i].clone())))
            .collect();
        let kept_set: BTreeSet<&NodeId> = kept.iter().map(|&i| &self.nodes[i]).collect();
        let nodes: Vec<NodeId> = kept.iter().map(|&i| self.nodes[i].clone()).collect();
        let m = kept.len();
        let mut le = vec![false; m * m];
        for (a, &i) in kept.iter().enumerate() {
            for (b, &j) in kept.iter().enumerate() {
                le[a * m + b] = self.le_idx(i, j);
            }
        }
        let mut classes: BTreeMap<ClassKey, CardTag> = BTreeMap::new();
        for c in &self.classes {
            if !kept_set.contains(&c.key.low) || !keep(&VNode::Class(c.key.clone())) {
                continue;
            }
            let key = ClassKey {
                ups: c.key.ups.iter().filter(|u| kept_set.contains(u)).cloned().collect(),
                low: c.key.low.clone(),
            };
            let slot = classes.entry(key).or_default();
            *slot = *slot + c.card;
        }
        SkeletonPoset::from_closed(nodes, le, classes)
    }

    /// `L(m)` as a standalone poset.
    pub fn down_closure(&self, m: &NodeId) -> Result<SkeletonPoset, PosetError> {
        self.index_of(m)?;
        let top = VNode::Node(m.clone());
        Ok(self.restrict(|v| self.vle(v, &top)))
    }

    /// Whether the comparability graph of the denoted poset is connected.
    /// The empty poset counts as connected.
    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(parent, a), find(parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        };
        for i in 0..n {
            for j in self.above_idx(i).collect::<Vec<_>>() {
                union(&mut parent, i, j);
            }
        }
        for c in &self.classes {
            let Some(&low) = self.index.get(&c.key.low) else {
                continue;
            };
            for u in &c.key.ups {
                if let Some(&j) = self.index.get(u) {
                    union(&mut parent, low, j);
                }
            }
        }
        let roots: BTreeSet<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        roots.len() <= 1
    }

    /// Cover pairs `(lower, upper)` of the explicit order.
    pub fn covers(&self) -> Vec<(NodeId, NodeId)> {
        let n = self.nodes.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.lt_idx(i, j) && !(0..n).any(|k| self.lt_idx(i, k) && self.lt_idx(k, j)) {
                    out.push((self.nodes[i].clone(), self.nodes[j].clone()));
                }
            }
        }
        out.sort();
        out
    }

    /// Every broken structural invariant. Empty iff the skeleton is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.nodes.len();
        let mut out = Vec::new();
        let name = |i: usize| self.nodes[i].clone();

        for i in 0..n {
            if !self.le_idx(i, i) {
                out.push(Violation::new(
                    Axiom::Reflexivity,
                    vec![name(i)],
                    format!("{} <= {} is missing", name(i), name(i)),
                ));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.le_idx(i, j) && self.le_idx(j, i) {
                    out.push(Violation::new(
                        Axiom::Antisymmetry,
                        vec![name(i), name(j)],
                        format!("{} <= {} and {} <= {}", name(i), name(j), name(j), name(i)),
                    ));
                }
            }
        }
        'trans: for i in 0..n {
            for j in 0..n {
                if !self.le_idx(i, j) {
                    continue;
                }
                for k in 0..n {
                    if self.le_idx(j, k) && !self.le_idx(i, k) {
                        out.push(Violation::new(
                            Axiom::Transitivity,
                            vec![name(i), name(j), name(k)],
                            format!(
                                "{} <= {} <= {} but not {} <= {}",
                                name(i),
                                name(j),
                                name(k),
                                name(i),
                                name(k)
                            ),
                        ));
                        // One witness is enough; a broken relation tends to
                        // produce a cascade.
                        break 'trans;
                    }
                }
            }
        }
        let order_ok = out.is_empty();

        if order_ok {
            // Longest explicit chains; four distinct nodes in a chain is too many.
            let mut heights = vec![0usize; n];
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&j| self.below_idx(j).count());
            for &j in &order {
                heights[j] = self.below_idx(j).map(|i| heights[i] + 1).max().unwrap_or(0);
                if heights[j] > 2 {
                    let chain = self.chain_below(j, &heights);
                    out.push(Violation::new(
                        Axiom::Dimension,
                        chain.iter().map(|&i| name(i)).collect(),
                        format!("explicit chain of length {} below {}", heights[j], name(j)),
                    ));
                }
            }
        }

        for w in self.classes.windows(2) {
            if w[0].key == w[1].key {
                out.push(Violation::new(
                    Axiom::KeyUniqueness,
                    w[0].key.ups.iter().cloned().chain([w[0].key.low.clone()]).collect(),
                    format!("class {} recorded twice", w[0].key),
                ));
            }
        }
        for c in &self.classes {
            let key = &c.key;
            let mut witness: Vec<NodeId> = key.ups.iter().cloned().collect();
            witness.push(key.low.clone());
            if let Some(unknown) = witness.iter().find(|u| !self.contains(u)) {
                out.push(Violation::new(
                    Axiom::ClassWellFormedness,
                    witness.clone(),
                    format!("class {key} refers to unknown node {unknown}"),
                ));
                continue;
            }
            if c.card.is_zero() {
                out.push(Violation::new(
                    Axiom::ClassWellFormedness,
                    witness.clone(),
                    format!("class {key} is empty"),
                ));
            }
            for u in &key.ups {
                if !self.lt(&key.low, u) {
                    out.push(Violation::new(
                        Axiom::ClassWellFormedness,
                        vec![key.low.clone(), u.clone()],
                        format!("class {key}: low {} is not below {u}", key.low),
                    ));
                }
            }
            if order_ok {
                if !self.is_minimal(&key.low) {
                    out.push(Violation::new(
                        Axiom::Dimension,
                        witness.clone(),
                        format!("class {key}: low {} is not minimal", key.low),
                    ));
                }
                for u in &key.ups {
                    if !self.is_maximal(u) {
                        out.push(Violation::new(
                            Axiom::Dimension,
                            witness.clone(),
                            format!("class {key}: {u} is not maximal"),
                        ));
                    }
                }
            }
        }
        out
    }

    fn chain_below(&self, top: usize, heights: &[usize]) -> Vec<usize> {
        let mut chain = vec![top];
        let mut cur = top;
        while heights[cur] > 0 {
            let next = self
                .below_idx(cur)
                .find(|&i| heights[i] + 1 == heights[cur])
                .expect("height witness");
            chain.push(next);
            cur = next;
        }
        chain.reverse();
        chain
    }
}

/// Collects nodes, order pairs and classes, then closes the order.
#[derive(Clone, Debug, Default)]
pub struct PosetBuilder {
    nodes: BTreeSet<NodeId>,
    pairs: Vec<(NodeId, NodeId)>,
    classes: Vec<ClassRecord>,
}

impl PosetBuilder {
    pub fn node(mut self, label: impl Into<NodeId>) -> Self {
        self.nodes.insert(label.into());
        self
    }

    pub fn nodes<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<NodeId>,
    {
        self.nodes.extend(labels.into_iter().map(Into::into));
        self
    }

    /// Declares `lower <= upper`; both nodes must also be added.
    pub fn le(mut self, lower: impl Into<NodeId>, upper: impl Into<NodeId>) -> Self {
        self.pairs.push((lower.into(), upper.into()));
        self
    }

    pub fn class<I, S>(mut self, ups: I, low: impl Into<NodeId>, card: CardTag) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<NodeId>,
    {
        self.classes.push(ClassRecord::new(ClassKey::new(ups, low), card));
        self
    }

    pub fn add_node(&mut self, label: impl Into<NodeId>) {
        self.nodes.insert(label.into());
    }

    pub fn add_le(&mut self, lower: impl Into<NodeId>, upper: impl Into<NodeId>) {
        self.pairs.push((lower.into(), upper.into()));
    }

    pub fn add_class(&mut self, key: ClassKey, card: CardTag) {
        self.classes.push(ClassRecord::new(key, card));
    }

    /// Closes the order reflexively and transitively, merges classes with
    /// equal keys by cardinal addition, and validates.
    pub fn build(self) -> Result<SkeletonPoset, PosetError> {
        let nodes: Vec<NodeId> = self.nodes.into_iter().collect();
        let index: BTreeMap<&NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let n = nodes.len();
        let mut unknown = Vec::new();
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        for (a, b) in &self.pairs {
            match (index.get(a), index.get(b)) {
                (Some(&i), Some(&j)) => le[i * n + j] = true,
                _ => {
                    let missing = if index.contains_key(a) { b } else { a };
                    unknown.push(Violation::new(
                        Axiom::UnknownNode,
                        vec![missing.clone()],
                        format!("relation {a} <= {b} mentions undeclared node {missing}"),
                    ));
                }
            }
        }
        if !unknown.is_empty() {
            return Err(PosetError::Invalid(unknown));
        }
        for k in 0..n {
            for i in 0..n {
                if le[i * n + k] {
                    for j in 0..n {
                        if le[k * n + j] {
                            le[i * n + j] = true;
                        }
                    }
                }
            }
        }
        let mut classes: BTreeMap<ClassKey, CardTag> = BTreeMap::new();
        for c in self.classes {
            let slot = classes.entry(c.key).or_default();
            *slot = *slot + c.card;
        }
        let poset = SkeletonPoset::from_closed(nodes, le, classes);
        let violations = poset.validate();
        if violations.is_empty() {
            Ok(poset)
        } else {
            Err(PosetError::Invalid(violations))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ids(labels: &[&str]) -> BTreeSet<VNode> {
        labels.iter().map(|l| VNode::node(*l)).collect()
    }

    #[test]
    fn tent_heights() {
        let t = fixtures::aleph0_tent();
        assert_eq!(t.height(&"t".into()).unwrap(), 1);
        assert_eq!(t.height(&"m".into()).unwrap(), 2);
        assert_eq!(t.height(&"t1".into()).unwrap(), 0);
        assert_eq!(t.dim(), 2);
        assert!(t.height(&"nope".into()).is_err());
    }

    #[test]
    fn point_height() {
        let p = fixtures::point();
        assert_eq!(p.height(&"x".into()).unwrap(), 0);
        assert_eq!(p.dim(), 0);
    }

    #[test]
    fn class_handles_have_height_one() {
        let t = fixtures::aleph0_tent();
        let k = VNode::Class(ClassKey::new(["m"], "t1"));
        assert_eq!(t.vheight(&k).unwrap(), 1);
        // A class alone lifts its up node to height two.
        let p = SkeletonPoset::builder()
            .nodes(["u", "m"])
            .le("u", "m")
            .class(["m"], "u", CardTag::Beta)
            .build()
            .unwrap();
        assert_eq!(p.height(&"m".into()).unwrap(), 2);
    }

    #[test]
    fn tent_up_and_down_sets() {
        let t = fixtures::aleph0_tent();
        let mut want = ids(&["t", "t1", "t2"]);
        want.insert(VNode::Class(ClassKey::new(["m"], "t1")));
        want.insert(VNode::Class(ClassKey::new(["m"], "t2")));
        assert_eq!(t.down_set(&VNode::node("m"), true).unwrap(), want);

        let mut want = ids(&["t", "m"]);
        want.insert(VNode::Class(ClassKey::new(["m"], "t1")));
        assert_eq!(t.up_set(&VNode::node("t1"), true).unwrap(), want);

        assert!(t.down_set(&VNode::node("t2"), true).unwrap().is_empty());

        let k = VNode::Class(ClassKey::new(["m"], "t1"));
        assert_eq!(t.up_set(&k, true).unwrap(), ids(&["m"]));
        assert_eq!(t.down_set(&k, true).unwrap(), ids(&["t1"]));
    }

    #[test]
    fn mub_examples() {
        let t = fixtures::aleph0_tent();
        assert_eq!(t.mub(&["t1".into(), "t2".into()]).unwrap(), ids(&["t"]));
        assert_eq!(t.mub(&["t1".into()]).unwrap(), ids(&["t1"]));
        assert_eq!(t.mlb(&["m".into()]).unwrap(), ids(&["m"]));
        assert_eq!(t.mlb(&["t1".into(), "t2".into()]).unwrap(), BTreeSet::new());
        assert!(matches!(t.mub(&[]), Err(PosetError::EmptySet)));

        let pair = fixtures::antichain(&["a", "b"]);
        assert!(pair.mub(&["a".into(), "b".into()]).unwrap().is_empty());
    }

    #[test]
    fn mlb_reports_shared_classes() {
        let p = SkeletonPoset::builder()
            .nodes(["u", "m", "n"])
            .le("u", "m")
            .le("u", "n")
            .class(["m"], "u", CardTag::Beta)
            .class(["n"], "u", CardTag::Beta)
            .class(["m", "n"], "u", CardTag::Finite(3))
            .build()
            .unwrap();
        let want: BTreeSet<VNode> = [VNode::Class(ClassKey::new(["m", "n"], "u"))].into();
        assert_eq!(p.mlb(&["m".into(), "n".into()]).unwrap(), want);
    }

    #[test]
    fn restrict_examples() {
        let t = fixtures::aleph0_tent();
        assert_eq!(t.down_closure(&"m".into()).unwrap(), t);
        assert!(t.restrict(|_| false).is_empty());

        let two = fixtures::two_tents();
        let left = two.down_closure(&"m".into()).unwrap();
        let want = SkeletonPoset::builder()
            .nodes(["u", "m"])
            .le("u", "m")
            .class(["m"], "u", CardTag::Beta)
            .build()
            .unwrap();
        assert_eq!(left, want);
    }

    #[test]
    fn restrict_merges_shrunken_classes() {
        let p = SkeletonPoset::builder()
            .nodes(["u", "m", "n"])
            .le("u", "m")
            .le("u", "n")
            .class(["m"], "u", CardTag::Aleph0)
            .class(["m", "n"], "u", CardTag::Finite(3))
            .build()
            .unwrap();
        let l = p.down_closure(&"m".into()).unwrap();
        assert_eq!(l.classes().len(), 1);
        assert_eq!(l.class_card(&ClassKey::new(["m"], "u")), CardTag::Aleph0);
    }

    #[test]
    fn connectivity() {
        assert!(fixtures::aleph0_tent().is_connected());
        assert!(fixtures::point().is_connected());
        assert!(!fixtures::antichain(&["a", "b"]).is_connected());
        // Two points joined only through a shared class are connected.
        let p = SkeletonPoset::builder().nodes(["u", "m"]).le("u", "m").build().unwrap();
        assert!(p.is_connected());
    }

    #[test]
    fn validate_examples() {
        assert!(fixtures::aleph0_tent().validate().is_empty());

        let a = NodeId::from("a");
        let b = NodeId::from("b");
        let cand = SkeletonPoset::from_relation_unchecked(
            [a.clone(), b.clone()],
            [
                (a.clone(), a.clone()),
                (b.clone(), b.clone()),
                (a.clone(), b.clone()),
                (b.clone(), a.clone()),
            ],
            [],
        );
        let v = cand.validate();
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].axiom, Axiom::Antisymmetry);

        let cand = SkeletonPoset::from_relation_unchecked(
            [a.clone(), b.clone()],
            [(a.clone(), a.clone()), (b.clone(), b.clone())],
            [ClassRecord::new(ClassKey::new(["b"], "a"), CardTag::Aleph0)],
        );
        let v = cand.validate();
        assert!(v.iter().any(|x| x.axiom == Axiom::ClassWellFormedness), "{v:?}");
    }

    #[test]
    fn validate_catches_each_axiom() {
        let n = |s: &str| NodeId::from(s);
        // Missing reflexive pair.
        let v = SkeletonPoset::from_relation_unchecked([n("a")], [], []).validate();
        assert_eq!(v[0].axiom, Axiom::Reflexivity);
        // a <= b <= c without a <= c.
        let refl = [(n("a"), n("a")), (n("b"), n("b")), (n("c"), n("c"))];
        let v = SkeletonPoset::from_relation_unchecked(
            [n("a"), n("b"), n("c")],
            refl.iter().cloned().chain([(n("a"), n("b")), (n("b"), n("c"))]),
            [],
        )
        .validate();
        assert_eq!(v[0].axiom, Axiom::Transitivity);
        // Four-element chain.
        let err = SkeletonPoset::builder()
            .nodes(["a", "b", "c", "d"])
            .le("a", "b")
            .le("b", "c")
            .le("c", "d")
            .build()
            .unwrap_err();
        let PosetError::Invalid(v) = err else { panic!() };
        assert!(v.iter().any(|x| x.axiom == Axiom::Dimension));
        // Class whose up node is not maximal.
        let err = SkeletonPoset::builder()
            .nodes(["a", "b", "c"])
            .le("a", "b")
            .le("b", "c")
            .class(["b"], "a", CardTag::Aleph0)
            .build()
            .unwrap_err();
        let PosetError::Invalid(v) = err else { panic!() };
        assert!(v.iter().any(|x| x.axiom == Axiom::Dimension));
        // Empty class.
        let err = SkeletonPoset::builder()
            .nodes(["a", "b"])
            .le("a", "b")
            .class(["b"], "a", CardTag::ZERO)
            .build()
            .unwrap_err();
        let PosetError::Invalid(v) = err else { panic!() };
        assert_eq!(v[0].axiom, Axiom::ClassWellFormedness);
        // Duplicate keys in an unchecked candidate.
        let k = ClassRecord::new(ClassKey::new(["b"], "a"), CardTag::Aleph0);
        let v = SkeletonPoset::from_relation_unchecked(
            [n("a"), n("b")],
            [(n("a"), n("a")), (n("b"), n("b")), (n("a"), n("b"))],
            [k.clone(), k],
        )
        .validate();
        assert!(v.iter().any(|x| x.axiom == Axiom::KeyUniqueness));
    }

    #[test]
    fn builder_rejects_cycles_and_unknown_labels() {
        let err = SkeletonPoset::builder()
            .nodes(["a", "b"])
            .le("a", "b")
            .le("b", "a")
            .build()
            .unwrap_err();
        let PosetError::Invalid(v) = err else { panic!() };
        assert_eq!(v[0].axiom, Axiom::Antisymmetry);

        let err = SkeletonPoset::builder().node("a").le("a", "zz").build().unwrap_err();
        let PosetError::Invalid(v) = err else { panic!() };
        assert_eq!(v[0].axiom, Axiom::UnknownNode);
    }

    #[test]
    fn builder_merges_duplicate_keys() {
        let p = SkeletonPoset::builder()
            .nodes(["u", "m"])
            .le("u", "m")
            .class(["m"], "u", CardTag::Finite(2))
            .class(["m"], "u", CardTag::Finite(3))
            .build()
            .unwrap();
        assert_eq!(p.classes().len(), 1);
        assert_eq!(p.class_card(&ClassKey::new(["m"], "u")), CardTag::Finite(5));
    }

    #[test]
    fn covers_are_the_hasse_diagram() {
        let t = fixtures::aleph0_tent();
        let c: Vec<(String, String)> = t
            .covers()
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(
            c,
            vec![
                ("t".into(), "m".into()),
                ("t1".into(), "t".into()),
                ("t2".into(), "t".into())
            ]
        );
    }
}
