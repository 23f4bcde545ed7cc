use std::collections::BTreeSet;

use super::brute::next_permutation;
use super::generate::GenError;
use crate::card::CardTag;
use crate::poset::{ClassKey, NodeId, SkeletonPoset};

pub const MAX_ENUMERATION_NODES: usize = 5;

const LABELS: [&str; MAX_ENUMERATION_NODES] = ["a", "b", "c", "d", "e"];
const DECORATIONS: [CardTag; 2] = [CardTag::Finite(1), CardTag::Aleph0];
const MAX_CLASSES: usize = 3;

/// Every skeleton with exactly `n` explicit nodes, one per isomorphism
/// type.
///
/// The explicit part ranges over all orders of dimension at most two. Each
/// pair `(u, w)` with `u` of explicit height two, `w` minimal and `w < u`
/// may carry a class `({u}, w)` of size one or `aleph0`, with at most three
/// classes in total.
pub fn enumerate_skeletons(n: usize) -> Result<Vec<SkeletonPoset>, GenError> {
    if n > MAX_ENUMERATION_NODES {
        return Err(GenError::Budget(n));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut lt = vec![vec![false; n]; n];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            lt[i][j] = mask >> b & 1 == 1;
        }
        if !transitive(&lt) || has_long_chain(&lt) {
            continue;
        }
        let eligible: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |w| (u, w)))
            .filter(|&(u, w)| {
                let tall = (0..n).any(|x| lt[x][u] && (0..n).any(|y| lt[y][x]));
                tall && lt[w][u] && (0..n).all(|x| !lt[x][w])
            })
            .collect();
        for deco in decorations(eligible.len()) {
            let classes: Vec<(usize, usize, CardTag)> = eligible
                .iter()
                .zip(&deco)
                .filter_map(|(&(u, w), c)| c.map(|c| (u, w, c)))
                .collect();
            if seen.insert(canonical(&lt, &classes)) {
                out.push(build(&lt, &classes));
            }
        }
    }
    Ok(out)
}

fn transitive(lt: &[Vec<bool>]) -> bool {
    let n = lt.len();
    (0..n).all(|i| (0..n).all(|j| !lt[i][j] || (0..n).all(|k| !lt[j][k] || lt[i][k])))
}

fn has_long_chain(lt: &[Vec<bool>]) -> bool {
    let n = lt.len();
    (0..n).any(|a| (0..n).any(|b| lt[a][b] && (0..n).any(|c| lt[b][c] && (0..n).any(|d| lt[c][d]))))
}

fn decorations(slots: usize) -> Vec<Vec<Option<CardTag>>> {
    let mut out = vec![vec![]];
    for _ in 0..slots {
        out = out
            .into_iter()
            .flat_map(|d: Vec<Option<CardTag>>| {
                std::iter::once(None)
                    .chain(DECORATIONS.iter().copied().map(Some))
                    .map(move |c| {
                        let mut e = d.clone();
                        e.push(c);
                        e
                    })
            })
            .filter(|d| d.iter().flatten().count() <= MAX_CLASSES)
            .collect();
    }
    out
}

type Canonical = (Vec<bool>, Vec<(usize, usize, CardTag)>);

fn canonical(lt: &[Vec<bool>], classes: &[(usize, usize, CardTag)]) -> Canonical {
    let n = lt.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Canonical> = None;
    loop {
        let mut rel = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                rel[perm[i] * n + perm[j]] = lt[i][j];
            }
        }
        let mut cls: Vec<(usize, usize, CardTag)> = classes.iter().map(|&(u, w, c)| (perm[u], perm[w], c)).collect();
        cls.sort();
        let cand = (rel, cls);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.expect("at least one permutation")
}

fn build(lt: &[Vec<bool>], classes: &[(usize, usize, CardTag)]) -> SkeletonPoset {
    let n = lt.len();
    let mut b = SkeletonPoset::builder().nodes(LABELS[..n].iter().copied());
    for i in 0..n {
        for j in 0..n {
            if lt[i][j] {
                b = b.le(LABELS[i], LABELS[j]);
            }
        }
    }
    for &(u, w, c) in classes {
        b.add_class(ClassKey::new([NodeId::from(LABELS[u])], LABELS[w]), c);
    }
    b.build().expect("enumerated skeleton is valid")
}
