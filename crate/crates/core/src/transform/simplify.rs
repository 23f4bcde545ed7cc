use std::collections::BTreeSet;

use super::{expand, refine, split_at_reserving, SplittingCertificate};
use crate::analysis::{e_count, non_simple_maxima, require_proper};
use crate::error::{AnalysisError, TransformError};
use crate::map::PosetMap;
use crate::poset::{NodeId, SkeletonPoset};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStage {
    pub poset: SkeletonPoset,
    /// Splitting of this stage onto the next one; `None` for the input.
    pub cert: Option<SplittingCertificate>,
}

/// Stages ordered from the simplification down to the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplifyingChain {
    pub stages: Vec<ChainStage>,
}

impl SimplifyingChain {
    /// Number of splittings.
    pub fn len(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn simplification(&self) -> &SkeletonPoset {
        &self.stages[0].poset
    }

    pub fn original(&self) -> &SkeletonPoset {
        &self.stages[self.stages.len() - 1].poset
    }

    pub fn certificates(&self) -> impl Iterator<Item = &SplittingCertificate> {
        self.stages.iter().filter_map(|s| s.cert.as_ref())
    }

    /// `e` of every stage, starting from the input.
    pub fn e_sequence(&self) -> Result<Vec<usize>, AnalysisError> {
        self.stages.iter().rev().map(|s| e_count(&s.poset)).collect()
    }
}

/// Splits non-simple maximal nodes one at a time, smallest label first,
/// until the poset is simple.
///
/// Each step splits the down-closure of the chosen node, extends that local
/// splitting to the whole poset and refines the result.
pub fn simplify(v: &SkeletonPoset) -> Result<SimplifyingChain, TransformError> {
    require_proper(v)?;
    let mut posets = vec![v.clone()];
    let mut certs: Vec<SplittingCertificate> = Vec::new();
    let mut bad = non_simple_maxima(v)?;
    while let Some(n) = bad.first().cloned() {
        let current = &posets[posets.len() - 1];
        let cert = split_once(current, &n)?;
        let next_bad = non_simple_maxima(cert.upper())?;
        if next_bad.len() >= bad.len() {
            return Err(TransformError::Unverified(format!(
                "splitting {n} left {} non-simple maximal nodes",
                next_bad.len()
            )));
        }
        posets.push(cert.upper().clone());
        certs.push(cert);
        bad = next_bad;
    }
    let mut stages = Vec::with_capacity(posets.len());
    let mut certs = certs.into_iter().rev();
    for poset in posets.into_iter().rev() {
        stages.push(ChainStage {
            poset,
            cert: certs.next(),
        });
    }
    Ok(SimplifyingChain { stages })
}

fn split_once(current: &SkeletonPoset, n: &NodeId) -> Result<SplittingCertificate, TransformError> {
    let local_poset = current.down_closure(n)?;
    let inclusion = PosetMap::inclusion(&local_poset, current)?;
    let reserved: BTreeSet<NodeId> = current.nodes().iter().cloned().collect();
    let local = split_at_reserving(&local_poset, n, &reserved)?;
    let f = local.map.then(&inclusion)?;
    let e = expand(&f)?;
    refine(&SplittingCertificate {
        split_node: n.clone(),
        fiber: local.fiber,
        map: e.map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_proper, is_simple};
    use crate::fixtures;
    use crate::transform::verify_splitting;

    #[test]
    fn simple_input_gives_empty_chain() {
        let c = simplify(&fixtures::aleph0_tent()).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.e_sequence().unwrap(), vec![0]);
        assert!(c.stages[0].cert.is_none());
    }

    #[test]
    fn d2_example_needs_one_step() {
        let c = simplify(&fixtures::d2_example()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.e_sequence().unwrap(), vec![1, 0]);
        assert!(is_simple(c.simplification()).unwrap());
        assert_eq!(c.simplification().maximal_nodes().len(), 2);
    }

    #[test]
    fn two_copies_need_two_steps() {
        let c = simplify(&fixtures::two_d2_examples()).unwrap();
        assert_eq!(c.e_sequence().unwrap(), vec![2, 1, 0]);
        for s in &c.stages {
            assert!(check_proper(&s.poset).unwrap().is_proper);
        }
        for cert in c.certificates() {
            assert_eq!(verify_splitting(cert), vec![]);
        }
    }
}
