//! Departures as arrivals: each departing man stays in the second stage but
//! is pinned to a fresh woman who arrives for him alone. The pair is a
//! mutual first choice, so it appears in every stable matching, and the
//! remaining persons see exactly the original second stage.
//!
//! The fresh woman of `ū` ranks `ū` first and every other man after him in
//! index order; every other man ranks the fresh women last in index order.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::instance::{Instance, ManId, WomanId};
use crate::matching::Matching;
use crate::problem::{TwoStageProblem, Variant};

use super::{fresh_ids, ReductionCert};

/// Men-leaving problem to an equivalent women-arrival problem.
pub fn reduce_leaving(p: &TwoStageProblem) -> Result<(TwoStageProblem, ReductionCert)> {
    p.require(Variant::MenLeave)?;
    pin_departures(p)
}

/// Leave-and-arrive problem to an equivalent women-arrival problem. Women
/// arriving in the original keep arriving; departing men rank them after
/// their first-stage list.
pub fn reduce_leave_arrive(p: &TwoStageProblem) -> Result<(TwoStageProblem, ReductionCert)> {
    p.require(Variant::LeaveAndArrive)?;
    pin_departures(p)
}

fn pin_departures(p: &TwoStageProblem) -> Result<(TwoStageProblem, ReductionCert)> {
    let (s1, s2) = (p.stage1(), p.stage2());
    let staying: BTreeSet<ManId> = s2.men().iter().copied().collect();
    let leaving: Vec<ManId> = s1.men().iter().copied().filter(|u| !staying.contains(u)).collect();
    let arriving: Vec<WomanId> = s2.women().iter().copied().filter(|w| !s1.has_woman(*w)).collect();
    let (_, next_woman) = fresh_ids(p);
    let fresh: Vec<WomanId> = (0..leaving.len() as u32).map(|i| WomanId(next_woman + i)).collect();

    let mut ml = Vec::new();
    for &u in s1.men() {
        let list = match leaving.iter().position(|&x| x == u) {
            Some(k) => {
                let mut l = vec![fresh[k]];
                l.extend(s1.man_list(u).unwrap());
                l.extend(arriving.iter().copied());
                l.extend(fresh.iter().copied().filter(|&w| w != fresh[k]));
                l
            }
            None => {
                let mut l = s2.man_list(u).unwrap();
                l.extend(fresh.iter().copied());
                l
            }
        };
        ml.push((u, list));
    }
    let mut wl = Vec::new();
    for &w in s2.women() {
        let list = if s1.has_woman(w) {
            s1.woman_list(w).unwrap()
        } else {
            let mut l = s2.woman_list(w).unwrap();
            l.extend(leaving.iter().copied());
            l
        };
        wl.push((w, list));
    }
    for (k, &w) in fresh.iter().enumerate() {
        let mut l = vec![leaving[k]];
        l.extend(s1.men().iter().copied().filter(|&u| u != leaving[k]));
        wl.push((w, l));
    }
    let stage2 = Instance::new(ml, wl)?;
    let reduced = TwoStageProblem::new(Variant::WomenArrive, s1.clone(), stage2)?;
    let cert = ReductionCert {
        added_men: BTreeSet::new(),
        added_women: fresh.iter().copied().collect(),
        forced_stage1: Matching::new(),
        forced_stage2: Matching::from_pairs(leaving.iter().copied().zip(fresh.iter().copied()))?,
    };
    Ok((reduced, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_stable;

    fn three_men_two_women() -> Instance {
        Instance::new(
            vec![
                (ManId(1), vec![WomanId(1), WomanId(2)]),
                (ManId(2), vec![WomanId(2), WomanId(1)]),
                (ManId(3), vec![WomanId(1), WomanId(2)]),
            ],
            vec![
                (WomanId(1), vec![ManId(3), ManId(1), ManId(2)]),
                (WomanId(2), vec![ManId(1), ManId(3), ManId(2)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn no_departure_adds_nothing() {
        let s = three_men_two_women();
        let p = TwoStageProblem::new(Variant::MenLeave, s.clone(), s.clone()).unwrap();
        let (q, cert) = reduce_leaving(&p).unwrap();
        assert!(cert.is_identity());
        assert_eq!(q.stage2(), &s);
    }

    #[test]
    fn departing_man_is_pinned_in_every_stable_matching() {
        let s1 = three_men_two_women();
        let women = [WomanId(1), WomanId(2)];
        let s2 = s1.restrict(&[ManId(1), ManId(2)], &women).unwrap();
        let p = TwoStageProblem::new(Variant::MenLeave, s1, s2).unwrap();
        let (q, cert) = reduce_leaving(&p).unwrap();
        assert_eq!(q.stage2().women().len(), 3);
        let bar = *cert.added_women.iter().next().unwrap();
        for m in enumerate_stable(q.stage2(), None).unwrap() {
            assert!(m.contains(ManId(3), bar));
        }
    }

    #[test]
    fn variant_is_checked() {
        let s = three_men_two_women();
        let p = TwoStageProblem::new(Variant::WomenArrive, s.clone(), s).unwrap();
        assert!(reduce_leaving(&p).is_err());
        assert!(reduce_leave_arrive(&p).is_err());
    }
}
