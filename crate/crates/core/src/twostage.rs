//! The optimal online two-stage algorithm, the dominance transform behind
//! its optimality, and the brute-force optimum it is checked against.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::diff::{classify_components, Component, CycleKind, Source};
use crate::error::{Error, Result};
use crate::instance::{Instance, ManId, PersonId};
use crate::lattice::{deferred_acceptance, enumerate_stable_with, max_weight_stable, Backend, Proposers, WeightFn};
use crate::matching::{divorces, ensure_stable, Matching};
use crate::problem::{TwoStageProblem, Variant};
use crate::reductions::regularize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoStageSolution {
    pub m1: Matching,
    pub m2: Matching,
    pub divorce_count: usize,
}

impl TwoStageSolution {
    pub fn new(m1: Matching, m2: Matching) -> Self {
        let divorce_count = divorces(&m1, &m2);
        TwoStageSolution { m1, m2, divorce_count }
    }
}

/// First-round decision. Sees only the first-round market.
pub fn stage1_choice(stage1: &Instance) -> Matching {
    deferred_acceptance(stage1, Proposers::Men)
}

/// Second-round decision: the stable matching keeping as many first-round
/// pairs as possible (weight 1 on each kept pair).
pub fn stage2_choice(stage1_result: &Matching, stage2: &Instance) -> Matching {
    max_weight_stable(stage2, &WeightFn::indicator(stage1_result))
}

/// Men-optimal first, overlap-maximizing second. Optimal for the
/// women-arrival problem; other variants go through
/// [`crate::reductions::solve_two_stage`].
pub fn opt_two_stage(p: &TwoStageProblem) -> Result<TwoStageSolution> {
    p.require(Variant::WomenArrive)?;
    let m1 = stage1_choice(p.stage1());
    let m2 = stage2_choice(&m1, p.stage2());
    Ok(TwoStageSolution::new(m1, m2))
}

/// Backend that keeps the oracle independent of the rotation machinery
/// whenever the instance is small enough.
pub(crate) fn oracle_backend(inst: &Instance) -> Backend {
    if inst.men().len() <= 7 && inst.women().len() <= 7 {
        Backend::Exhaustive
    } else {
        Backend::Rotation
    }
}

/// Minimum of `|M1 \ M2|` over all pairs of stable matchings, by
/// enumeration. `cap` bounds `|Δ1| * |Δ2|`. Ties go to the lexicographically
/// smallest pair.
pub fn brute_force_optimum(p: &TwoStageProblem, cap: Option<usize>) -> Result<(TwoStageSolution, usize)> {
    let d1 = enumerate_stable_with(p.stage1(), oracle_backend(p.stage1()), cap)?;
    let d2 = enumerate_stable_with(p.stage2(), oracle_backend(p.stage2()), cap)?;
    if let Some(c) = cap {
        if d1.len() * d2.len() > c {
            return Err(Error::CapExceeded {
                cap: c,
                found: d1.len() * d2.len(),
            });
        }
    }
    let mut best: Option<(usize, &Matching, &Matching)> = None;
    for a in &d1 {
        for b in &d2 {
            let d = divorces(a, b);
            if best.is_none_or(|(x, _, _)| d < x) {
                best = Some((d, a, b));
            }
        }
    }
    let (d, a, b) = best.expect("every instance has a stable matching");
    Ok((TwoStageSolution::new(a.clone(), b.clone()), d))
}

/// True if every man of `inst` likes his partner in `a` at least as much as
/// his partner in `b`. Being unmatched is worse than any partner.
pub fn men_dominates(inst: &Instance, a: &Matching, b: &Matching) -> bool {
    first_undominated(inst, a, b).is_none()
}

fn first_undominated(inst: &Instance, a: &Matching, b: &Matching) -> Option<ManId> {
    let rank = |m: &Matching, u: ManId| m.wife(u).and_then(|w| inst.man_rank(u, w)).unwrap_or(usize::MAX);
    inst.men().iter().copied().find(|&u| rank(a, u) > rank(b, u))
}

/// Persons breaking the coherence of an arrival problem: men matched in `m1`
/// but not in `m2`, and first-stage women single in `m1` but matched in `m2`.
/// Empty whenever both matchings are stable.
pub fn coherence_violations(p: &TwoStageProblem, m1: &Matching, m2: &Matching) -> Vec<PersonId> {
    let men = p
        .stage1()
        .men()
        .iter()
        .copied()
        .filter(|&u| m1.wife(u).is_some() && m2.wife(u).is_none());
    let women = p
        .stage1()
        .women()
        .iter()
        .copied()
        .filter(|&w| m1.husband(w).is_none() && m2.husband(w).is_some());
    men.map(PersonId::from).chain(women.map(PersonId::from)).collect()
}

/// Checks `|W1| <= |W2| = |U|` for a women-arrival problem.
pub fn is_regular(p: &TwoStageProblem) -> bool {
    p.variant() == Variant::WomenArrive
        && p.stage1().women().len() <= p.stage2().women().len()
        && p.stage2().women().len() == p.stage2().men().len()
}

/// Given stable `m1`, `m1_prime` (first stage) with `m1_prime` men-dominating
/// `m1`, and stable `m2` (second stage), builds a second-stage matching for
/// `m1_prime` that is stable and breaks no more pairs than `(m1, m2)`.
///
/// Construction: keep `m1_prime ∩ m2`; in `G(m1_prime, m2)` take the `m2`
/// edges of every path and type I cycle, and the `m1_prime` edges of every
/// type II cycle. The problem must be regular. All guarantees are checked
/// and reported as `PostconditionViolated` if they fail.
pub fn dominance_transform(p: &TwoStageProblem, m1: &Matching, m2: &Matching, m1_prime: &Matching) -> Result<Matching> {
    p.require(Variant::WomenArrive)?;
    if !is_regular(p) {
        return Err(Error::NotRegular(format!(
            "|W1| = {}, |W2| = {}, |U| = {}",
            p.stage1().women().len(),
            p.stage2().women().len(),
            p.stage2().men().len()
        )));
    }
    let (s1, s2) = (p.stage1(), p.stage2());
    ensure_stable(s1, m1)?;
    ensure_stable(s1, m1_prime)?;
    ensure_stable(s2, m2)?;
    if m2.len() != s2.men().len() {
        return Err(Error::NotRegular("second-stage matching is not perfect".into()));
    }
    if let Some(u) = first_undominated(s1, m1_prime, m1) {
        return Err(Error::NotDominating(u));
    }

    let g = classify_components(s2, m1_prime, m2)?;
    let mut out = m1_prime.intersection(m2);
    for comp in &g.components {
        let take = match comp {
            Component::Path { .. }
            | Component::Cycle {
                kind: Some(CycleKind::TypeI),
                ..
            } => Source::Second,
            Component::Cycle { .. } => Source::First,
        };
        for (u, w, s) in comp.edge_pairs() {
            if s == take {
                out.insert(u, w)?;
            }
        }
    }

    let fail = |msg: String| Err(Error::PostconditionViolated(msg));
    if out.len() != s2.men().len() {
        return fail(format!("transformed matching {out} is not perfect"));
    }
    if let Err(e) = ensure_stable(s2, &out) {
        return fail(format!("transformed matching is not stable: {e}"));
    }
    let (before, after) = (divorces(m1, m2), divorces(m1_prime, &out));
    if after > before {
        return fail(format!("divorces grew from {before} to {after}"));
    }
    let moved = |a: &Matching, b: &Matching| -> BTreeSet<ManId> {
        a.pairs().filter(|&(u, w)| !b.contains(u, w)).map(|(u, _)| u).collect()
    };
    if !moved(m1_prime, &out).is_subset(&moved(m1, m2)) {
        return fail("a man divorced after the transform without divorcing before it".into());
    }
    if let Some(u) = first_undominated(s2, &out, m2) {
        return fail(format!(
            "transformed matching does not men-dominate the original at {u}"
        ));
    }
    Ok(out)
}

/// [`dominance_transform`] for any women-arrival problem: regularizes,
/// transforms the lifted matchings, and projects the result back.
pub fn dominance_transform_lifted(
    p: &TwoStageProblem,
    m1: &Matching,
    m2: &Matching,
    m1_prime: &Matching,
) -> Result<Matching> {
    p.require(Variant::WomenArrive)?;
    let (rp, cert) = regularize(p)?;
    let out = dominance_transform(
        &rp,
        &cert.lift_stage1(m1)?,
        &cert.lift_stage2(m2)?,
        &cert.lift_stage1(m1_prime)?,
    )?;
    Ok(cert.project(&out))
}
