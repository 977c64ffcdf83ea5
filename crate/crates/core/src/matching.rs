//! Matchings, blocking pairs, stability and divorce counting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::{Instance, ManId, WomanId};

/// A set of man-woman pairs with every person in at most one pair.
///
/// Ordering is lexicographic on the sorted pair list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    wife: BTreeMap<ManId, WomanId>,
    husband: BTreeMap<WomanId, ManId>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (ManId, WomanId)>>(pairs: I) -> Result<Self> {
        let mut m = Matching::new();
        for (u, w) in pairs {
            m.insert(u, w)?;
        }
        Ok(m)
    }

    /// Shorthand for tests and fixtures: `Matching::of(&[(1, 1), (2, 3)])`.
    pub fn of(pairs: &[(u32, u32)]) -> Self {
        Matching::from_pairs(pairs.iter().map(|&(u, w)| (ManId(u), WomanId(w)))).expect("well-formed pair list")
    }

    pub fn insert(&mut self, u: ManId, w: WomanId) -> Result<()> {
        if self.wife.contains_key(&u) {
            return Err(Error::MalformedMatching(u.into()));
        }
        if self.husband.contains_key(&w) {
            return Err(Error::MalformedMatching(w.into()));
        }
        self.wife.insert(u, w);
        self.husband.insert(w, u);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.wife.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wife.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (ManId, WomanId)> + '_ {
        self.wife.iter().map(|(u, w)| (*u, *w))
    }

    pub fn contains(&self, u: ManId, w: WomanId) -> bool {
        self.wife.get(&u) == Some(&w)
    }

    pub fn wife(&self, u: ManId) -> Option<WomanId> {
        self.wife.get(&u).copied()
    }

    pub fn husband(&self, w: WomanId) -> Option<ManId> {
        self.husband.get(&w).copied()
    }

    pub fn men(&self) -> impl Iterator<Item = ManId> + '_ {
        self.wife.keys().copied()
    }

    pub fn women(&self) -> impl Iterator<Item = WomanId> + '_ {
        self.husband.keys().copied()
    }

    /// Pairs of `self` that also belong to `other`.
    pub fn intersection(&self, other: &Matching) -> Matching {
        self.filter(|u, w| other.contains(u, w))
    }

    pub fn filter(&self, mut keep: impl FnMut(ManId, WomanId) -> bool) -> Matching {
        let mut out = Matching::new();
        for (u, w) in self.pairs() {
            if keep(u, w) {
                out.insert(u, w).expect("subset of a matching");
            }
        }
        out
    }

    pub fn union_disjoint(&self, other: &Matching) -> Result<Matching> {
        let mut out = self.clone();
        for (u, w) in other.pairs() {
            out.insert(u, w)?;
        }
        Ok(out)
    }

    /// Fails with `UnknownPerson` if some pair mentions a person absent from
    /// `inst`.
    pub fn check_against(&self, inst: &Instance) -> Result<()> {
        for (u, w) in self.pairs() {
            if !inst.has_man(u) {
                return Err(Error::UnknownPerson(u.into()));
            }
            if !inst.has_woman(w) {
                return Err(Error::UnknownPerson(w.into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (u, w)) in self.pairs().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({u},{w})")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Matching {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.pairs())
    }
}

impl<'de> Deserialize<'de> for Matching {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<(ManId, WomanId)> = Vec::deserialize(d)?;
        Matching::from_pairs(pairs).map_err(serde::de::Error::custom)
    }
}

/// Dense view of a matching against one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dense {
    pub wife: Vec<Option<usize>>,
    pub husband: Vec<Option<usize>>,
}

impl Dense {
    pub fn empty(inst: &Instance) -> Self {
        Dense {
            wife: vec![None; inst.n_men()],
            husband: vec![None; inst.n_women()],
        }
    }

    pub fn from_matching(inst: &Instance, m: &Matching) -> Result<Self> {
        let mut d = Dense::empty(inst);
        for (u, w) in m.pairs() {
            let i = inst.man_index(u).ok_or(Error::UnknownPerson(u.into()))?;
            let j = inst.woman_index(w).ok_or(Error::UnknownPerson(w.into()))?;
            d.wife[i] = Some(j);
            d.husband[j] = Some(i);
        }
        Ok(d)
    }

    pub fn to_matching(&self, inst: &Instance) -> Matching {
        Matching::from_pairs(
            self.wife
                .iter()
                .enumerate()
                .filter_map(|(i, w)| w.map(|j| (inst.man_at(i), inst.woman_at(j)))),
        )
        .expect("dense matchings are injective")
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.wife[i] = Some(j);
        self.husband[j] = Some(i);
    }

    /// True if woman `j` would rather have man `i` than her current state.
    pub fn woman_wants(&self, inst: &Instance, j: usize, i: usize) -> bool {
        match self.husband[j] {
            None => true,
            Some(cur) => inst.wrank(j, i) < inst.wrank(j, cur),
        }
    }

    pub fn first_blocking_pair(&self, inst: &Instance) -> Option<(usize, usize)> {
        for i in 0..inst.n_men() {
            for &j in inst.mpref(i) {
                if self.wife[i] == Some(j) {
                    break;
                }
                if self.woman_wants(inst, j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// All pairs outside `m` in which both persons prefer each other to their
/// situation in `m`; an unmatched person prefers anyone to being alone.
pub fn blocking_pairs(inst: &Instance, m: &Matching) -> Result<BTreeSet<(ManId, WomanId)>> {
    let d = Dense::from_matching(inst, m)?;
    let mut out = BTreeSet::new();
    for i in 0..inst.n_men() {
        for &j in inst.mpref(i) {
            if d.wife[i] == Some(j) {
                break;
            }
            if d.woman_wants(inst, j, i) {
                out.insert((inst.man_at(i), inst.woman_at(j)));
            }
        }
    }
    Ok(out)
}

pub fn is_stable(inst: &Instance, m: &Matching) -> Result<bool> {
    Ok(Dense::from_matching(inst, m)?.first_blocking_pair(inst).is_none())
}

/// Like [`is_stable`] but returns the first blocking pair as an error.
pub fn ensure_stable(inst: &Instance, m: &Matching) -> Result<()> {
    let d = Dense::from_matching(inst, m)?;
    match d.first_blocking_pair(inst) {
        None => Ok(()),
        Some((i, j)) => Err(Error::NotStable(inst.man_at(i), inst.woman_at(j))),
    }
}

/// `|m1 \ m2|`: pairs of `m1` missing from `m2`.
pub fn divorces(m1: &Matching, m2: &Matching) -> usize {
    m1.pairs().filter(|&(u, w)| !m2.contains(u, w)).count()
}

/// Total weight of a matching under a pair weight function.
pub fn total_weight(m: &Matching, weight: impl Fn(ManId, WomanId) -> i64) -> i64 {
    m.pairs().map(|(u, w)| weight(u, w)).sum()
}
