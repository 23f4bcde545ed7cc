//! Seeded generation of proper K-posets.
//!
//! The random source is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Each draw takes one `next_u64()`: a draw from
//! `[0, n)` is `next_u64() % n` and a coin flip is `next_u64() & 1 == 1`.
//! Draws happen in exactly the order written in [`gen_proper`], so another
//! implementation following the same steps reproduces the same posets.

use std::collections::BTreeSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::card::CardTag;
use crate::error::PosetError;
use crate::poset::{ClassKey, NodeId, SkeletonPoset};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GenParams {
    /// Minimal nodes `u0, u1, …`.
    pub n_min: usize,
    /// Height-two maximal nodes `m0, m1, …`.
    pub n_max2: usize,
    /// Height-one nodes `h0, h1, …`, each above at least two minimal nodes.
    pub n_h: usize,
    /// Size of every class a chain of length two requires.
    pub card: CardTag,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unsatisfiable parameters: {0}")]
    Unsatisfiable(String),
    #[error("enumeration of {0} nodes exceeds the budget")]
    Budget(usize),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

struct Draws(ChaCha8Rng);

impl Draws {
    fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    fn coin(&mut self) -> bool {
        self.0.next_u64() & 1 == 1
    }
}

/// Builds a random proper K-poset.
///
/// 1. For each `h_j` in order, each `u_i` in order joins its down-set on a
///    coin flip; while fewer than two are chosen, `u_{below(n_min)}` is added.
/// 2. Without height-two maxima, every minimal node under no `h` gets a
///    class `(∅, u_i)` of size `card` (none when `card` is zero).
/// 3. Otherwise, for each `m_k` in order: each `h_j` in order joins `H_k` on
///    a coin flip, then each `u_i` in order joins `U_k` when `below(3) == 0`.
///    Each `h_j` in no `H_k` joins `H_{below(n_max2)}`; each `u_i` still
///    below no `m` joins `U_{below(n_max2)}`; each `m_k` with empty `H_k` and
///    `U_k` gets `u_{below(n_min)}` in `U_k`. Every minimal `w` below `m_k`
///    gets the class `({m_k}, w)` of size `card`. Finally, for each pair
///    `k < l` and each shared minimal `w` in order, `below(4) == 0` adds the
///    class `({m_k, m_l}, w)` of size `[finite:1, finite:2, card][below(3)]`.
pub fn gen_proper(params: &GenParams) -> Result<SkeletonPoset, GenError> {
    let GenParams {
        n_min,
        n_max2,
        n_h,
        card,
        seed,
    } = *params;
    if n_min == 0 {
        return Err(GenError::Unsatisfiable("at least one minimal node is needed".into()));
    }
    if n_h > 0 && n_min < 2 {
        return Err(GenError::Unsatisfiable(
            "height-one branch nodes need two minimal nodes".into(),
        ));
    }
    if n_max2 > 0 && !card.is_infinite() {
        return Err(GenError::Unsatisfiable(format!(
            "height-two maxima need infinite classes, got {card}"
        )));
    }
    let mut rng = Draws(ChaCha8Rng::seed_from_u64(seed));
    let u: Vec<NodeId> = (0..n_min).map(|i| NodeId::new(format!("u{i}"))).collect();
    let h: Vec<NodeId> = (0..n_h).map(|j| NodeId::new(format!("h{j}"))).collect();
    let m: Vec<NodeId> = (0..n_max2).map(|k| NodeId::new(format!("m{k}"))).collect();

    let mut h_down: Vec<BTreeSet<usize>> = Vec::with_capacity(n_h);
    for _ in 0..n_h {
        let mut s: BTreeSet<usize> = (0..n_min).filter(|_| rng.coin()).collect();
        while s.len() < 2 {
            s.insert(rng.below(n_min));
        }
        h_down.push(s);
    }

    let mut b = SkeletonPoset::builder()
        .nodes(u.iter().cloned())
        .nodes(h.iter().cloned())
        .nodes(m.iter().cloned());
    for (j, s) in h_down.iter().enumerate() {
        for &i in s {
            b.add_le(u[i].clone(), h[j].clone());
        }
    }

    if n_max2 == 0 {
        if !card.is_zero() {
            for (i, ui) in u.iter().enumerate() {
                if !h_down.iter().any(|s| s.contains(&i)) {
                    b.add_class(ClassKey::new(Vec::<NodeId>::new(), ui.clone()), card);
                }
            }
        }
        return Ok(b.build()?);
    }

    let mut hs: Vec<BTreeSet<usize>> = Vec::with_capacity(n_max2);
    let mut us: Vec<BTreeSet<usize>> = Vec::with_capacity(n_max2);
    for _ in 0..n_max2 {
        hs.push((0..n_h).filter(|_| rng.coin()).collect());
        us.push((0..n_min).filter(|_| rng.below(3) == 0).collect());
    }
    for j in 0..n_h {
        if !hs.iter().any(|s| s.contains(&j)) {
            let k = rng.below(n_max2);
            hs[k].insert(j);
        }
    }
    let minimals_below = |hs: &[BTreeSet<usize>], us: &[BTreeSet<usize>], k: usize| -> BTreeSet<usize> {
        let mut out = us[k].clone();
        for &j in &hs[k] {
            out.extend(h_down[j].iter().copied());
        }
        out
    };
    for i in 0..n_min {
        if !(0..n_max2).any(|k| minimals_below(&hs, &us, k).contains(&i)) {
            let k = rng.below(n_max2);
            us[k].insert(i);
        }
    }
    for k in 0..n_max2 {
        if hs[k].is_empty() && us[k].is_empty() {
            let i = rng.below(n_min);
            us[k].insert(i);
        }
    }

    let below: Vec<BTreeSet<usize>> = (0..n_max2).map(|k| minimals_below(&hs, &us, k)).collect();
    for k in 0..n_max2 {
        for &j in &hs[k] {
            b.add_le(h[j].clone(), m[k].clone());
        }
        for &i in &us[k] {
            b.add_le(u[i].clone(), m[k].clone());
        }
        for &i in &below[k] {
            b.add_class(ClassKey::new([m[k].clone()], u[i].clone()), card);
        }
    }
    for k in 0..n_max2 {
        for l in k + 1..n_max2 {
            for &i in below[k].intersection(&below[l]) {
                if rng.below(4) == 0 {
                    let c = [CardTag::Finite(1), CardTag::Finite(2), card][rng.below(3)];
                    b.add_class(ClassKey::new([m[k].clone(), m[l].clone()], u[i].clone()), c);
                }
            }
        }
    }
    Ok(b.build()?)
}
