//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL
//! line for each and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kposet::analysis::non_simple_maxima;
use kposet::fixtures;
use kposet::io::{parse, parse_certificate, serialize, serialize_certificate, PosetDocument};
use kposet::oracle::{
    brute_height, brute_iso, brute_lambda, brute_mlb, brute_mub, brute_script_h, enumerate_skeletons, gen_proper,
    GenParams, MAX_ENUMERATION_NODES,
};
use kposet::{
    check_d_preservation, check_expansion, check_k, classify_single_max, d_local, d_value, e_count, expand, glue,
    is_simple, iso_check, lambda_set, refine, script_h, simplify, split_at, split_unrefined, verify_splitting, CardTag,
    Classification, NodeId, PosetMap, SkeletonPoset, SplittingCertificate, VNode,
};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

type Outcome = Result<String, String>;

/// Everything the criteria produce that later criteria inspect again.
#[derive(Default)]
struct Touched {
    posets: Vec<SkeletonPoset>,
    certs: Vec<SplittingCertificate>,
    /// Single-max instances with `d` in 2..=4 and their certificates.
    split_suite: Vec<(SkeletonPoset, SplittingCertificate)>,
    /// Instances with `e` in 1..=4.
    simplify_suite: Vec<SkeletonPoset>,
}

impl Touched {
    fn poset(&mut self, p: &SkeletonPoset) {
        self.posets.push(p.clone());
    }

    fn cert(&mut self, c: &SplittingCertificate) {
        self.poset(c.upper());
        self.poset(c.lower());
        self.certs.push(c.clone());
    }
}

fn e<E: std::fmt::Display>(context: impl std::fmt::Display) -> impl FnOnce(E) -> String {
    move |err| format!("{context}: {err}")
}

fn ids(labels: &[&str]) -> BTreeSet<NodeId> {
    labels.iter().map(|s| NodeId::from(*s)).collect()
}

fn card_for(seed: u64) -> CardTag {
    if seed.is_multiple_of(2) {
        CardTag::Beta
    } else {
        CardTag::Aleph0
    }
}

const TENT_DOCUMENT: &str = r#"{
  "nodes": ["m", "t", "t1", "t2"],
  "covers": [["t", "m"], ["t1", "t"], ["t2", "t"]],
  "classes": [
    {"up": ["m"], "low": "t1", "card": "aleph0"},
    {"up": ["m"], "low": "t2", "card": "aleph0"}
  ]
}"#;

fn figure(t: &mut Touched) -> Outcome {
    let p = parse(TENT_DOCUMENT).map_err(e("parse"))?;
    t.poset(&p);
    let report = check_k(&p).map_err(e("check_k"))?;
    ensure!(report.is_k && report.is_proper, "report:\n{report}");
    ensure!(script_h(&p) == ids(&["t1", "t2", "t"]), "H = {:?}", script_h(&p));
    let lambda = lambda_set(&p).map_err(e("lambda"))?;
    ensure!(lambda == vec![NodeId::from("t")], "lambda = {lambda:?}");
    ensure!(d_value(&p) == Ok(1), "d = {:?}", d_value(&p));
    let c = classify_single_max(&p).map_err(e("classify"))?;
    ensure!(
        c == Classification::Tent {
            k: 2,
            card: CardTag::Aleph0
        },
        "classified as {c}"
    );
    Ok(format!("{c}"))
}

fn classification(t: &mut Touched) -> Outcome {
    let mut cases = vec![
        (fixtures::point(), Classification::Point),
        (
            fixtures::fan(CardTag::Finite(1)),
            Classification::Fan(CardTag::Finite(1)),
        ),
    ];
    for k in 1..=4 {
        for card in [CardTag::Aleph0, CardTag::Beta] {
            cases.push((fixtures::tent(k, card), Classification::Tent { k, card }));
        }
    }
    // Generated shapes: a point, a one-element fan and one-minimal tents.
    let gen = |n_min, n_max2, card, seed| {
        gen_proper(&GenParams {
            n_min,
            n_max2,
            n_h: 0,
            card,
            seed,
        })
    };
    cases.push((gen(1, 0, CardTag::ZERO, 0).map_err(e("gen"))?, Classification::Point));
    cases.push((
        gen(1, 0, CardTag::Finite(1), 0).map_err(e("gen"))?,
        Classification::Fan(CardTag::Finite(1)),
    ));
    for card in [CardTag::Aleph0, CardTag::Beta] {
        cases.push((
            gen(1, 1, card, 0).map_err(e("gen"))?,
            Classification::Tent { k: 1, card },
        ));
    }
    let shapes = cases.len();
    for (p, want) in cases {
        t.poset(&p);
        let got = classify_single_max(&p).map_err(e(format!("classify {want}")))?;
        ensure!(got == want, "expected {want}, got {got}\n{}", serialize(&p));
    }

    let mut not_simple = 0;
    for seed in 0..200u64 {
        let n_min = 1 + (seed % 5) as usize;
        let params = GenParams {
            n_min,
            n_max2: 1,
            n_h: if n_min < 2 { 0 } else { (seed / 5 % 4) as usize },
            card: card_for(seed),
            seed,
        };
        let p = gen_proper(&params).map_err(e(format!("{params:?}")))?;
        t.poset(&p);
        let c = classify_single_max(&p).map_err(e(format!("classify {params:?}")))?;
        let d = d_value(&p).map_err(e("d"))?;
        let flagged = matches!(c, Classification::NotSimpleSingleMax { .. });
        ensure!(flagged == (d > 1), "seed {seed}: {c} with d = {d}");
        if let Classification::NotSimpleSingleMax { d: cd, .. } = c {
            ensure!(cd == d, "seed {seed}: reported d {cd}, computed {d}");
            not_simple += 1;
        }
    }
    Ok(format!("{shapes} shapes, 200 random ({not_simple} not simple)"))
}

fn split_params(seed: u64) -> GenParams {
    GenParams {
        n_min: 2 + (seed % 4) as usize,
        n_max2: 1,
        n_h: 1 + (seed / 4 % 4) as usize,
        card: card_for(seed),
        seed,
    }
}

fn splitting(t: &mut Touched) -> Outcome {
    let m = NodeId::from("m0");
    let mut seed = 0u64;
    while t.split_suite.len() < 100 {
        ensure!(seed < 100_000, "only {} instances with d in 2..=4", t.split_suite.len());
        let params = split_params(seed);
        seed += 1;
        let v = gen_proper(&params).map_err(e(format!("{params:?}")))?;
        let d = d_value(&v).map_err(e("d"))?;
        if !(2..=4).contains(&d) {
            continue;
        }
        let lambda = lambda_set(&v).map_err(e("lambda"))?;
        let cert = split_at(&v, &m).map_err(e(format!("split {params:?}")))?;
        let violations = verify_splitting(&cert);
        ensure!(violations.is_empty(), "{params:?}: {}", violations[0]);
        ensure!(cert.fiber.len() == d, "{params:?}: fiber {:?} for d = {d}", cert.fiber);
        let u = cert.upper();
        for (i, a) in lambda.iter().enumerate() {
            let mi = NodeId::new(format!("m0#{}", i + 1));
            ensure!(cert.fiber.contains(&mi), "{params:?}: {mi} missing from fiber");
            ensure!(
                d_local(u, &mi) == Ok(1),
                "{params:?}: d at {mi} is {:?}",
                d_local(u, &mi)
            );
            let local = u.down_closure(&mi).map_err(e("down-closure"))?;
            let got = lambda_set(&local).map_err(e("local lambda"))?;
            ensure!(
                got == vec![a.clone()],
                "{params:?}: lambda below {mi} is {got:?}, expected {a}"
            );
        }
        let raw = split_unrefined(&v, &m).map_err(e("unrefined split"))?;
        let refined = refine(&raw).map_err(e("refine"))?;
        ensure!(
            script_h(raw.upper()) == script_h(refined.upper()),
            "{params:?}: refinement changed H"
        );
        ensure!(refined == cert, "{params:?}: split differs from refined construction");
        t.poset(&v);
        t.cert(&raw);
        t.cert(&cert);
        t.split_suite.push((v, cert));
    }
    Ok(format!("100 instances from {seed} seeds"))
}

fn simplify_params(seed: u64) -> GenParams {
    GenParams {
        n_min: 2 + (seed / 4 % 4) as usize,
        n_max2: 1 + (seed % 4) as usize,
        n_h: 1 + (seed / 16 % 5) as usize,
        card: card_for(seed),
        seed,
    }
}

fn simplification(t: &mut Touched) -> Outcome {
    let mut seed = 0u64;
    let mut by_e = [0usize; 5];
    while t.simplify_suite.len() < 100 {
        ensure!(
            seed < 100_000,
            "only {} instances with e in 1..=4",
            t.simplify_suite.len()
        );
        let params = simplify_params(seed);
        seed += 1;
        let v = gen_proper(&params).map_err(e(format!("{params:?}")))?;
        let e0 = e_count(&v).map_err(e("e"))?;
        if !(1..=4).contains(&e0) {
            continue;
        }
        by_e[e0] += 1;
        let chain = simplify(&v).map_err(e(format!("simplify {params:?}")))?;
        let seq = chain.e_sequence().map_err(e("e-sequence"))?;
        ensure!(seq[0] == e0 && seq.last() == Some(&0), "{params:?}: e-sequence {seq:?}");
        ensure!(seq.windows(2).all(|w| w[0] > w[1]), "{params:?}: e-sequence {seq:?}");
        ensure!(chain.len() <= e0, "{params:?}: {} steps for e = {e0}", chain.len());
        ensure!(
            is_simple(chain.simplification()) == Ok(true),
            "{params:?}: final stage not simple"
        );
        for stage in &chain.stages {
            let r = check_k(&stage.poset).map_err(e("check_k"))?;
            ensure!(r.is_proper, "{params:?}: stage not proper\n{r}");
            t.poset(&stage.poset);
        }
        for cert in chain.certificates() {
            let violations = verify_splitting(cert);
            ensure!(violations.is_empty(), "{params:?}: {}", violations[0]);
            t.cert(cert);
        }
        t.simplify_suite.push(v);
    }
    Ok(format!("100 instances, e = 1..4: {:?}", &by_e[1..]))
}

fn gluing(t: &mut Touched) -> Outcome {
    let suite = t.split_suite.clone();
    for (v, cert) in &suite {
        let (q, back) = glue(cert.upper(), &cert.fiber).map_err(e("glue"))?;
        iso_check(&q, v).map_err(e(format!("glue(split) vs input\n{}", serialize(v))))?;
        let violations = verify_splitting(&back);
        ensure!(violations.is_empty(), "gluing certificate: {}", violations[0]);
        t.cert(&back);

        let m = NodeId::from("m0");
        let (same, trivial) = glue(v, &[m.clone()].into()).map_err(e("singleton glue"))?;
        ensure!(same == *v, "singleton gluing changed the poset");
        ensure!(
            trivial.map.node_map.iter().all(|(a, b)| a == b) && trivial.map.node_map.len() == v.len(),
            "singleton gluing is not the identity on nodes"
        );
        ensure!(
            verify_splitting(&trivial).is_empty(),
            "singleton gluing does not verify"
        );
        iso_check(&same, v).map_err(e("singleton glue"))?;
        t.cert(&trivial);
    }
    Ok(format!("{} round trips", suite.len()))
}

fn expansion(t: &mut Touched) -> Outcome {
    let suite = t.simplify_suite.clone();
    let (mut split_cases, mut inclusion_cases) = (0, 0);
    for z in &suite {
        for n in z.maximal_nodes() {
            if z.height(&n).map_err(e("height"))? == 0 {
                continue;
            }
            let x = z.down_closure(&n).map_err(e("down-closure"))?;
            let inclusion = PosetMap::inclusion(&x, z).map_err(e("inclusion"))?;
            let ex = expand(&inclusion).map_err(e(format!("expand inclusion at {n}")))?;
            let bad = check_expansion(&inclusion, &ex, None).map_err(e("check"))?;
            ensure!(bad.is_empty(), "inclusion at {n}: {}", bad[0]);
            ensure!(
                iso_check(&ex.poset, z).is_ok(),
                "expanding an inclusion at {n} is not Z"
            );
            t.poset(&ex.poset);
            inclusion_cases += 1;
        }
        for n in non_simple_maxima(z).map_err(e("non-simple"))? {
            let x = z.down_closure(&n).map_err(e("down-closure"))?;
            let local = split_at(&x, &n).map_err(e("local split"))?;
            let f = local
                .map
                .then(&PosetMap::inclusion(&x, z).map_err(e("inclusion"))?)
                .map_err(e("compose"))?;
            let ex = expand(&f).map_err(e(format!("expand split at {n}")))?;
            let bad = check_expansion(&f, &ex, Some((&n, &local.fiber))).map_err(e("check"))?;
            ensure!(bad.is_empty(), "split at {n}: {}", bad[0]);
            for mi in &local.fiber {
                ensure!(ex.poset.is_maximal(mi), "{mi} not maximal after expansion");
                ensure!(d_local(&ex.poset, mi) == Ok(1), "d at {mi} changed");
            }
            t.poset(&ex.poset);
            split_cases += 1;
        }
    }
    Ok(format!("{split_cases} local splittings, {inclusion_cases} inclusions"))
}

fn as_vnodes<'a>(it: impl IntoIterator<Item = &'a NodeId>) -> BTreeSet<VNode> {
    it.into_iter().cloned().map(VNode::Node).collect()
}

fn oracles(t: &mut Touched) -> Outcome {
    let mut total = 0;
    let mut by_size = Vec::new();
    for n in 1..=MAX_ENUMERATION_NODES {
        let all = enumerate_skeletons(n).map_err(e("enumerate"))?;
        by_size.push(all.len());
        for p in &all {
            total += 1;
            t.poset(p);
            let nodes = p.nodes().to_vec();
            for u in &nodes {
                let h = p.height(u).map_err(e("height"))? as usize;
                ensure!(brute_height(p, u) == Some(h), "height of {u} in\n{}", serialize(p));
            }
            for (i, a) in nodes.iter().enumerate() {
                for b in &nodes[i..] {
                    let set = if a == b {
                        vec![a.clone()]
                    } else {
                        vec![a.clone(), b.clone()]
                    };
                    let mub = p.mub(&set).map_err(e("mub"))?;
                    ensure!(brute_mub(p, &set) == Some(mub), "mub {set:?} in\n{}", serialize(p));
                    let mlb = p.mlb(&set).map_err(e("mlb"))?;
                    ensure!(brute_mlb(p, &set) == Some(mlb), "mlb {set:?} in\n{}", serialize(p));
                }
            }
            ensure!(
                as_vnodes(&script_h(p)) == brute_script_h(p),
                "H differs on\n{}",
                serialize(p)
            );
            match (lambda_set(p), brute_lambda(p)) {
                (Ok(l), Ok(b)) => ensure!(as_vnodes(&l) == b, "lambda {l:?} vs {b:?} on\n{}", serialize(p)),
                (Err(_), Err(_)) => {}
                (l, b) => return Err(format!("lambda {l:?} vs {b:?} on\n{}", serialize(p))),
            }
        }
        // Distinct enumerated skeletons are pairwise non-isomorphic; a
        // relabelled copy is isomorphic.
        for (i, p) in all.iter().enumerate() {
            let copy = relabel(p);
            ensure!(
                iso_check(p, &copy).is_ok() && brute_iso(p, &copy),
                "relabelled copy of\n{}",
                serialize(p)
            );
            for q in &all[i + 1..] {
                let fast = iso_check(p, q).is_ok();
                ensure!(
                    fast == brute_iso(p, q),
                    "iso disagrees on\n{}\n{}",
                    serialize(p),
                    serialize(q)
                );
                ensure!(!fast, "enumeration repeats an isomorphism type");
            }
        }
    }

    for cert in &t.certs {
        let (u, v) = (cert.upper(), cert.lower());
        ensure!(u.dim() == v.dim(), "dimension {} above, {} below", u.dim(), v.dim());
        let mins: BTreeSet<NodeId> = u.minimal_nodes().iter().map(|n| cert.map.node_map[n].clone()).collect();
        ensure!(
            mins == v.minimal_nodes().into_iter().collect(),
            "minimal nodes not preserved"
        );
        let bad = check_d_preservation(cert).map_err(e("d preservation"))?;
        ensure!(bad.is_empty(), "{}", bad[0]);
    }
    Ok(format!("{total} skeletons {by_size:?}, {} certificates", t.certs.len()))
}

/// Copy of `p` with every label prefixed and the node order reversed.
fn relabel(p: &SkeletonPoset) -> SkeletonPoset {
    let name = |s: &str| format!("z{s}");
    let mut doc = PosetDocument::from_poset(p);
    doc.nodes = doc.nodes.iter().rev().map(|s| name(s)).collect();
    for (a, b) in &mut doc.covers {
        *a = name(a);
        *b = name(b);
    }
    for c in &mut doc.classes {
        c.up = c.up.iter().map(|s| name(s)).collect();
        c.low = name(&c.low);
    }
    doc.to_poset().expect("relabelled copy is valid")
}

fn serialization(t: &mut Touched) -> Outcome {
    for p in &t.posets {
        let text = serialize(p);
        let back = parse(&text).map_err(e(format!("reparse\n{text}")))?;
        ensure!(back == *p, "round trip changed\n{text}");
        ensure!(serialize(&back) == text, "second serialization differs\n{text}");

        // The same poset written differently: every order pair, reversed.
        let mut doc = PosetDocument::from_poset(p);
        doc.nodes.reverse();
        doc.covers = p
            .nodes()
            .iter()
            .flat_map(|a| {
                p.nodes()
                    .iter()
                    .filter(|b| p.lt(a, b))
                    .map(|b| (a.to_string(), b.to_string()))
            })
            .rev()
            .collect();
        doc.classes.reverse();
        let other = doc.to_poset().map_err(e("rewritten document"))?;
        ensure!(serialize(&other) == text, "equal posets serialize differently\n{text}");
    }
    for c in &t.certs {
        let back = parse_certificate(&serialize_certificate(c), c.upper().clone(), c.lower().clone())
            .map_err(e("certificate"))?;
        ensure!(back == *c, "certificate round trip changed {}", c.split_node);
    }
    Ok(format!("{} posets, {} certificates", t.posets.len(), t.certs.len()))
}

type Criterion = fn(&mut Touched) -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion, u64); 8] = [
        ("tent figure", figure, 1),
        ("point/fan/tent classification", classification, 30),
        ("splitting at the maximal node", splitting, 60),
        ("simplifying chains", simplification, 60),
        ("gluing round trip", gluing, 60),
        ("expansion", expansion, 30),
        ("oracle agreement", oracles, 120),
        ("serialization", serialization, 30),
    ];
    let mut touched = Touched::default();
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&mut touched);
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(note) if took > Duration::from_secs(limit) => Err(format!("{note}; took longer than {limit} s")),
            other => other,
        };
        match outcome {
            Ok(note) => println!("criterion {}: PASS {name} ({:.2} s) {note}", i + 1, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({:.2} s) {why}", i + 1, took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
