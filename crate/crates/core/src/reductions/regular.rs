//! Regularization of women-arrival problems to `|W1| <= |W2| = |U|`.
//!
//! Women left single in the second stage get a private dummy man each, and
//! men left single in the second stage get a private dummy woman each. Every
//! dummy is ranked below all real persons by the other side, and a dummy and
//! its partner rank each other first among dummies. Single persons therefore
//! keep the power to block real pairs, each stage's stable matchings are
//! exactly the original ones plus a fixed set of dummy pairs, and divorce
//! counts are unchanged.
//!
//! Women single in the first stage stay single in the second, so their dummy
//! men are present and paired with them in both stages.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::instance::{Instance, ManId, WomanId};
use crate::lattice::{deferred_acceptance, Proposers};
use crate::matching::Matching;
use crate::problem::{TwoStageProblem, Variant};
use crate::twostage::is_regular;

use super::{fresh_ids, ReductionCert};

pub fn regularize(p: &TwoStageProblem) -> Result<(TwoStageProblem, ReductionCert)> {
    p.require(Variant::WomenArrive)?;
    if is_regular(p) {
        return Ok((p.clone(), ReductionCert::default()));
    }
    let (s1, s2) = (p.stage1(), p.stage2());
    let m1 = deferred_acceptance(s1, Proposers::Men);
    let m2 = deferred_acceptance(s2, Proposers::Men);
    let single_women: Vec<WomanId> = s2
        .women()
        .iter()
        .copied()
        .filter(|w| m2.husband(*w).is_none())
        .collect();
    let single_men: Vec<ManId> = s2.men().iter().copied().filter(|u| m2.wife(*u).is_none()).collect();
    let (next_man, next_woman) = fresh_ids(p);

    let dummy_men: Vec<ManId> = (0..single_women.len() as u32).map(|i| ManId(next_man + i)).collect();
    let dummy_women: Vec<WomanId> = (0..single_men.len() as u32).map(|i| WomanId(next_woman + i)).collect();

    let (mut ml, mut wl) = s2.lists();
    // dummy men: own woman first, then the other single women, then the rest
    for (k, &t) in dummy_men.iter().enumerate() {
        let mut list = vec![single_women[k]];
        list.extend(single_women.iter().copied().filter(|&w| w != single_women[k]));
        list.extend(s2.women().iter().copied().filter(|w| !single_women.contains(w)));
        list.extend(dummy_women.iter().copied());
        ml.push((t, list));
    }
    for (w, list) in &mut wl {
        list.extend(tail_with_own_first(
            &dummy_men,
            single_women.iter().position(|x| x == w),
        ));
    }
    // dummy women: only in stage 2
    for (u, list) in &mut ml {
        if dummy_men.contains(u) {
            continue;
        }
        list.extend(tail_with_own_first(
            &dummy_women,
            single_men.iter().position(|x| x == u),
        ));
    }
    for (k, &d) in dummy_women.iter().enumerate() {
        let mut list = vec![single_men[k]];
        list.extend(s2.men().iter().copied().filter(|&u| u != single_men[k]));
        list.extend(dummy_men.iter().copied());
        wl.push((d, list));
    }
    let stage2 = Instance::new(ml, wl)?;

    let mut men1: Vec<ManId> = s1.men().to_vec();
    men1.extend(dummy_men.iter().copied());
    let stage1 = stage2.restrict(&men1, s1.women())?;

    let single_at_1: BTreeSet<WomanId> = s1
        .women()
        .iter()
        .copied()
        .filter(|w| m1.husband(*w).is_none())
        .collect();
    let pinned = |k: usize| (dummy_men[k], single_women[k]);
    let forced_stage1 = Matching::from_pairs(
        (0..dummy_men.len())
            .map(pinned)
            .filter(|(_, w)| single_at_1.contains(w)),
    )?;
    let mut forced_stage2 = Matching::from_pairs((0..dummy_men.len()).map(pinned))?;
    for (k, &d) in dummy_women.iter().enumerate() {
        forced_stage2.insert(single_men[k], d)?;
    }

    let cert = ReductionCert {
        added_men: dummy_men.into_iter().collect(),
        added_women: dummy_women.into_iter().collect(),
        forced_stage1,
        forced_stage2,
    };
    Ok((TwoStageProblem::new(Variant::WomenArrive, stage1, stage2)?, cert))
}

/// Dummies in index order, with the person's own dummy (if any) moved first.
fn tail_with_own_first<T: Copy + PartialEq>(dummies: &[T], own: Option<usize>) -> Vec<T> {
    match own {
        None => dummies.to_vec(),
        Some(k) => {
            let mut v = vec![dummies[k]];
            v.extend(dummies.iter().copied().filter(|d| *d != dummies[k]));
            v
        }
    }
}
