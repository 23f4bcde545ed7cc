//! Small named posets used throughout the tests and the CLI examples.

use crate::card::CardTag;
use crate::poset::{NodeId, SkeletonPoset};

fn build(b: crate::poset::PosetBuilder) -> SkeletonPoset {
    b.build().expect("fixture is a valid skeleton")
}

pub fn point() -> SkeletonPoset {
    build(SkeletonPoset::builder().node("x"))
}

pub fn antichain(labels: &[&str]) -> SkeletonPoset {
    build(SkeletonPoset::builder().nodes(labels.iter().copied()))
}

/// A fan over the minimal node `u`. A fan of size one is stored with an
/// explicit top `m`; larger fans keep their maximal nodes anonymous.
pub fn fan(card: CardTag) -> SkeletonPoset {
    if card == CardTag::Finite(1) {
        build(SkeletonPoset::builder().nodes(["u", "m"]).le("u", "m"))
    } else {
        build(
            SkeletonPoset::builder()
                .node("u")
                .class(Vec::<NodeId>::new(), "u", card),
        )
    }
}

/// The tent on minimal nodes `t1..tk`: `t` above all of them, `m` on top,
/// and one class of size `card` between each `ti` and `m`.
pub fn tent(k: usize, card: CardTag) -> SkeletonPoset {
    assert!(k >= 1);
    let mut b = SkeletonPoset::builder().nodes(["m", "t"]).le("t", "m");
    for i in 1..=k {
        let ti = format!("t{i}");
        b = b.node(ti.as_str()).le(ti.as_str(), "t").class(["m"], ti.as_str(), card);
    }
    build(b)
}

/// The countable tent on two minimal nodes.
pub fn aleph0_tent() -> SkeletonPoset {
    tent(2, CardTag::Aleph0)
}

/// Two height-two maxima `m`, `n` over one shared minimal node `u`.
pub fn two_tents() -> SkeletonPoset {
    build(
        SkeletonPoset::builder()
            .nodes(["u", "m", "n"])
            .le("u", "m")
            .le("u", "n")
            .class(["m"], "u", CardTag::Beta)
            .class(["n"], "u", CardTag::Beta),
    )
}

/// Minimal nodes `u1`, `u2`; `h1`, `h2` each above both; top `m`. The top
/// has two branch anchors, `h1` and `h2`.
pub fn d2_example() -> SkeletonPoset {
    d2_named("", CardTag::Beta)
}

/// [`d2_example`] with every label prefixed, for building disjoint unions.
pub fn d2_named(prefix: &str, card: CardTag) -> SkeletonPoset {
    build(d2_builder(SkeletonPoset::builder(), prefix, card))
}

fn d2_builder(mut b: crate::poset::PosetBuilder, prefix: &str, card: CardTag) -> crate::poset::PosetBuilder {
    let l = |s: &str| format!("{prefix}{s}");
    for u in ["u1", "u2"] {
        for h in ["h1", "h2"] {
            b = b.le(l(u), l(h));
        }
        b = b.class([l("m")], l(u), card);
    }
    for h in ["h1", "h2"] {
        b = b.le(l(h), l("m"));
    }
    b.nodes(["u1", "u2", "h1", "h2", "m"].map(l))
}

/// Two disjoint copies of [`d2_example`], labelled `a.*` and `b.*`.
pub fn two_d2_examples() -> SkeletonPoset {
    let b = d2_builder(SkeletonPoset::builder(), "a.", CardTag::Beta);
    build(d2_builder(b, "b.", CardTag::Beta))
}
