//! Staged problems: a sequence of instances sharing identifiers.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, ManId, PersonId, WomanId};

/// How the rosters change from one stage to the next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Men fixed, women may arrive.
    WomenArrive,
    /// Women fixed, men may leave.
    MenLeave,
    /// Men may leave and women may arrive.
    LeaveAndArrive,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::WomenArrive => "women-arrive",
            Variant::MenLeave => "men-leave",
            Variant::LeaveAndArrive => "leave-arrive",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "women-arrive" => Ok(Variant::WomenArrive),
            "men-leave" => Ok(Variant::MenLeave),
            "leave-arrive" => Ok(Variant::LeaveAndArrive),
            _ => Err(Error::InvalidParameter(format!("unknown variant `{s}`"))),
        }
    }
}

/// Checks that stage `to` may follow stage `from` under `variant`, including
/// that shared persons rank shared persons identically.
pub(crate) fn check_transition(variant: Variant, a: &Instance, b: &Instance, from: usize, to: usize) -> Result<()> {
    let (ma, mb): (BTreeSet<ManId>, BTreeSet<ManId>) =
        (a.men().iter().copied().collect(), b.men().iter().copied().collect());
    let (wa, wb): (BTreeSet<WomanId>, BTreeSet<WomanId>) =
        (a.women().iter().copied().collect(), b.women().iter().copied().collect());
    let nest = |detail: String| Error::Nesting {
        variant: variant.to_string(),
        detail,
    };
    let (men_ok, women_ok) = match variant {
        Variant::WomenArrive => (ma == mb, wa.is_subset(&wb)),
        Variant::MenLeave => (mb.is_subset(&ma), wa == wb),
        Variant::LeaveAndArrive => (mb.is_subset(&ma), wa.is_subset(&wb)),
    };
    if !men_ok {
        return Err(nest(format!("men of stage {to} do not fit men of stage {from}")));
    }
    if !women_ok {
        return Err(nest(format!("women of stage {to} do not fit women of stage {from}")));
    }
    let shared_m: BTreeSet<ManId> = ma.intersection(&mb).copied().collect();
    let shared_w: BTreeSet<WomanId> = wa.intersection(&wb).copied().collect();
    let drift = |p: PersonId| Error::PreferenceDrift { person: p, from, to };
    for &u in &shared_m {
        let la: Vec<_> = a
            .man_list(u)
            .unwrap()
            .into_iter()
            .filter(|w| shared_w.contains(w))
            .collect();
        let lb: Vec<_> = b
            .man_list(u)
            .unwrap()
            .into_iter()
            .filter(|w| shared_w.contains(w))
            .collect();
        if la != lb {
            return Err(drift(u.into()));
        }
    }
    for &w in &shared_w {
        let la: Vec<_> = a
            .woman_list(w)
            .unwrap()
            .into_iter()
            .filter(|u| shared_m.contains(u))
            .collect();
        let lb: Vec<_> = b
            .woman_list(w)
            .unwrap()
            .into_iter()
            .filter(|u| shared_m.contains(u))
            .collect();
        if la != lb {
            return Err(drift(w.into()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStageProblem {
    variant: Variant,
    stage1: Instance,
    stage2: Instance,
}

impl TwoStageProblem {
    pub fn new(variant: Variant, stage1: Instance, stage2: Instance) -> Result<Self> {
        check_transition(variant, &stage1, &stage2, 1, 2)?;
        Ok(TwoStageProblem {
            variant,
            stage1,
            stage2,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn stage1(&self) -> &Instance {
        &self.stage1
    }

    pub fn stage2(&self) -> &Instance {
        &self.stage2
    }

    pub(crate) fn require(&self, v: Variant) -> Result<()> {
        if self.variant != v {
            return Err(Error::VariantMismatch {
                expected: v.to_string(),
                found: self.variant.to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiStageProblem {
    variant: Variant,
    stages: Vec<Instance>,
}

impl MultiStageProblem {
    pub fn new(variant: Variant, stages: Vec<Instance>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidParameter(
                "a staged problem needs at least one stage".into(),
            ));
        }
        for t in 1..stages.len() {
            check_transition(variant, &stages[t - 1], &stages[t], t, t + 1)?;
        }
        Ok(MultiStageProblem { variant, stages })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn stages(&self) -> &[Instance] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Stages `t` and `t + 1` (0-based) as a two-stage problem.
    pub fn transition(&self, t: usize) -> TwoStageProblem {
        TwoStageProblem {
            variant: self.variant,
            stage1: self.stages[t].clone(),
            stage2: self.stages[t + 1].clone(),
        }
    }

    pub(crate) fn require(&self, v: Variant) -> Result<()> {
        if self.variant != v {
            return Err(Error::VariantMismatch {
                expected: v.to_string(),
                found: self.variant.to_string(),
            });
        }
        Ok(())
    }
}

impl From<TwoStageProblem> for MultiStageProblem {
    fn from(p: TwoStageProblem) -> Self {
        MultiStageProblem {
            variant: p.variant,
            stages: vec![p.stage1, p.stage2],
        }
    }
}
