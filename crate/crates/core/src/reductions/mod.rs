//! Problem transformations: regularization, reduction of departures to
//! arrivals, and the seat expansion of many-to-one college admission.

mod college;
mod leaving;
mod regular;

pub use college::{
    brute_force_college, college_divorces, enumerate_stable_assignments, expand_college, is_stable_assignment,
    opt_two_stage_college, project_assignment, Assignment, CollegeInstance, CollegeSolution, SeatMap, StudentId,
    TwoStageCollegeProblem, UniversityId,
};
pub use leaving::{reduce_leave_arrive, reduce_leaving};
pub use regular::regularize;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::instance::{ManId, WomanId};
use crate::matching::Matching;
use crate::problem::{TwoStageProblem, Variant};
use crate::twostage::{opt_two_stage, TwoStageSolution};

/// How a transformed problem relates to its source.
///
/// Original persons keep their identifiers; added persons get fresh ones.
/// The forced pairs belong to every stable matching of the corresponding
/// transformed stage, so lifting adds them and projecting drops every pair
/// that touches an added person.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionCert {
    pub added_men: BTreeSet<ManId>,
    pub added_women: BTreeSet<WomanId>,
    pub forced_stage1: Matching,
    pub forced_stage2: Matching,
}

impl ReductionCert {
    pub fn is_identity(&self) -> bool {
        self.added_men.is_empty() && self.added_women.is_empty()
    }

    pub fn lift_stage1(&self, m: &Matching) -> Result<Matching> {
        m.union_disjoint(&self.forced_stage1)
    }

    pub fn lift_stage2(&self, m: &Matching) -> Result<Matching> {
        m.union_disjoint(&self.forced_stage2)
    }

    pub fn project(&self, m: &Matching) -> Matching {
        m.filter(|u, w| !self.added_men.contains(&u) && !self.added_women.contains(&w))
    }
}

/// Optimal two-stage solution for any variant: departures are reduced to
/// arrivals first and the second matching is projected back.
pub fn solve_two_stage(p: &TwoStageProblem) -> Result<TwoStageSolution> {
    let (reduced, cert) = match p.variant() {
        Variant::WomenArrive => return opt_two_stage(p),
        Variant::MenLeave => reduce_leaving(p)?,
        Variant::LeaveAndArrive => reduce_leave_arrive(p)?,
    };
    let sol = opt_two_stage(&reduced)?;
    Ok(TwoStageSolution::new(sol.m1, cert.project(&sol.m2)))
}

/// Smallest unused identifiers on each side across both stages.
pub(crate) fn fresh_ids(p: &TwoStageProblem) -> (u32, u32) {
    let m = p
        .stage1()
        .men()
        .iter()
        .chain(p.stage2().men())
        .map(|u| u.0 + 1)
        .max()
        .unwrap_or(0);
    let w = p
        .stage1()
        .women()
        .iter()
        .chain(p.stage2().women())
        .map(|w| w.0 + 1)
        .max()
        .unwrap_or(0);
    (m, w)
}
