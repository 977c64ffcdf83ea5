//! Persons and single-stage stable-marriage instances.
//!
//! Identifiers are plain integers per side and keep their meaning across
//! stages, so the same `ManId` can be looked up in every stage of a problem.
//! Internally an instance stores dense positions (men and women sorted by id)
//! and inverse-permutation rank tables, so every "prefers a to b" query is a
//! pair of array lookups.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ManId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WomanId(pub u32);

impl fmt::Display for ManId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

impl fmt::Display for WomanId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// Men sort before women.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Man,
    Woman,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PersonId {
    pub side: Side,
    pub index: u32,
}

impl PersonId {
    pub fn man(index: u32) -> Self {
        PersonId { side: Side::Man, index }
    }

    pub fn woman(index: u32) -> Self {
        PersonId {
            side: Side::Woman,
            index,
        }
    }
}

impl From<ManId> for PersonId {
    fn from(m: ManId) -> Self {
        PersonId::man(m.0)
    }
}

impl From<WomanId> for PersonId {
    fn from(w: WomanId) -> Self {
        PersonId::woman(w.0)
    }
}

impl fmt::Display for PersonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Man => write!(f, "u{}", self.index),
            Side::Woman => write!(f, "w{}", self.index),
        }
    }
}

/// Each man with his ranked list of women, best first.
pub type ManLists = Vec<(ManId, Vec<WomanId>)>;
/// Each woman with her ranked list of men, best first.
pub type WomanLists = Vec<(WomanId, Vec<ManId>)>;

/// One stage of a stable-marriage market: both rosters and complete strict
/// preference lists on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    men: Vec<ManId>,
    women: Vec<WomanId>,
    man_prefs: Vec<Vec<usize>>,
    woman_prefs: Vec<Vec<usize>>,
    man_rank: Vec<Vec<usize>>,
    woman_rank: Vec<Vec<usize>>,
    man_pos: HashMap<ManId, usize>,
    woman_pos: HashMap<WomanId, usize>,
}

impl Instance {
    /// Builds an instance from per-person ranked lists. The rosters are the
    /// keys of the two lists; each list must be a permutation of the other
    /// side's roster.
    pub fn new(man_lists: ManLists, woman_lists: WomanLists) -> Result<Self> {
        let mut men: Vec<ManId> = man_lists.iter().map(|(m, _)| *m).collect();
        let mut women: Vec<WomanId> = woman_lists.iter().map(|(w, _)| *w).collect();
        men.sort_unstable();
        women.sort_unstable();
        if let Some(d) = men.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::DuplicatePerson(d[0].into()));
        }
        if let Some(d) = women.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::DuplicatePerson(d[0].into()));
        }
        let man_pos: HashMap<ManId, usize> = men.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let woman_pos: HashMap<WomanId, usize> = women.iter().enumerate().map(|(i, w)| (*w, i)).collect();

        let mut man_prefs = vec![Vec::new(); men.len()];
        for (m, list) in man_lists {
            man_prefs[man_pos[&m]] = dense_list(m.into(), &list, &woman_pos, |w| (*w).into())?;
        }
        let mut woman_prefs = vec![Vec::new(); women.len()];
        for (w, list) in woman_lists {
            woman_prefs[woman_pos[&w]] = dense_list(w.into(), &list, &man_pos, |m| (*m).into())?;
        }
        let man_rank = man_prefs.iter().map(|p| inverse(p)).collect();
        let woman_rank = woman_prefs.iter().map(|p| inverse(p)).collect();
        Ok(Instance {
            men,
            women,
            man_prefs,
            woman_prefs,
            man_rank,
            woman_rank,
            man_pos,
            woman_pos,
        })
    }

    /// Convenience constructor with men `0..man_lists.len()` and women
    /// `0..woman_lists.len()`, lists given as raw indices.
    pub fn from_indices(man_lists: Vec<Vec<u32>>, woman_lists: Vec<Vec<u32>>) -> Result<Self> {
        let ml = man_lists
            .into_iter()
            .enumerate()
            .map(|(i, l)| (ManId(i as u32), l.into_iter().map(WomanId).collect()))
            .collect();
        let wl = woman_lists
            .into_iter()
            .enumerate()
            .map(|(i, l)| (WomanId(i as u32), l.into_iter().map(ManId).collect()))
            .collect();
        Instance::new(ml, wl)
    }

    pub fn men(&self) -> &[ManId] {
        &self.men
    }

    pub fn women(&self) -> &[WomanId] {
        &self.women
    }

    pub fn has_man(&self, m: ManId) -> bool {
        self.man_pos.contains_key(&m)
    }

    pub fn has_woman(&self, w: WomanId) -> bool {
        self.woman_pos.contains_key(&w)
    }

    pub fn man_list(&self, m: ManId) -> Option<Vec<WomanId>> {
        let i = *self.man_pos.get(&m)?;
        Some(self.man_prefs[i].iter().map(|&j| self.women[j]).collect())
    }

    pub fn woman_list(&self, w: WomanId) -> Option<Vec<ManId>> {
        let j = *self.woman_pos.get(&w)?;
        Some(self.woman_prefs[j].iter().map(|&i| self.men[i]).collect())
    }

    /// 0 is the top choice.
    pub fn man_rank(&self, m: ManId, w: WomanId) -> Option<usize> {
        Some(self.man_rank[*self.man_pos.get(&m)?][*self.woman_pos.get(&w)?])
    }

    pub fn woman_rank(&self, w: WomanId, m: ManId) -> Option<usize> {
        Some(self.woman_rank[*self.woman_pos.get(&w)?][*self.man_pos.get(&m)?])
    }

    /// Sub-instance on the given rosters; each list keeps its relative order.
    pub fn restrict(&self, men: &[ManId], women: &[WomanId]) -> Result<Instance> {
        for m in men {
            if !self.has_man(*m) {
                return Err(Error::UnknownPerson((*m).into()));
            }
        }
        for w in women {
            if !self.has_woman(*w) {
                return Err(Error::UnknownPerson((*w).into()));
            }
        }
        let ml = men
            .iter()
            .map(|m| {
                let list = self.man_list(*m).unwrap();
                (*m, list.into_iter().filter(|w| women.contains(w)).collect())
            })
            .collect();
        let wl = women
            .iter()
            .map(|w| {
                let list = self.woman_list(*w).unwrap();
                (*w, list.into_iter().filter(|m| men.contains(m)).collect())
            })
            .collect();
        Instance::new(ml, wl)
    }

    /// All lists as id vectors, men first, in ascending id order.
    pub fn lists(&self) -> (ManLists, WomanLists) {
        let ml = self.men.iter().map(|m| (*m, self.man_list(*m).unwrap())).collect();
        let wl = self.women.iter().map(|w| (*w, self.woman_list(*w).unwrap())).collect();
        (ml, wl)
    }

    pub(crate) fn n_men(&self) -> usize {
        self.men.len()
    }

    pub(crate) fn n_women(&self) -> usize {
        self.women.len()
    }

    pub(crate) fn man_at(&self, i: usize) -> ManId {
        self.men[i]
    }

    pub(crate) fn woman_at(&self, j: usize) -> WomanId {
        self.women[j]
    }

    pub(crate) fn man_index(&self, m: ManId) -> Option<usize> {
        self.man_pos.get(&m).copied()
    }

    pub(crate) fn woman_index(&self, w: WomanId) -> Option<usize> {
        self.woman_pos.get(&w).copied()
    }

    pub(crate) fn mpref(&self, i: usize) -> &[usize] {
        &self.man_prefs[i]
    }

    pub(crate) fn wpref(&self, j: usize) -> &[usize] {
        &self.woman_prefs[j]
    }

    pub(crate) fn mrank(&self, i: usize, j: usize) -> usize {
        self.man_rank[i][j]
    }

    pub(crate) fn wrank(&self, j: usize, i: usize) -> usize {
        self.woman_rank[j][i]
    }
}

fn dense_list<T: Copy + Eq + std::hash::Hash>(
    owner: PersonId,
    list: &[T],
    pos: &HashMap<T, usize>,
    to_person: impl Fn(&T) -> PersonId,
) -> Result<Vec<usize>> {
    let mut seen = vec![false; pos.len()];
    let mut out = Vec::with_capacity(list.len());
    for x in list {
        let p = *pos.get(x).ok_or_else(|| Error::UnknownPerson(to_person(x)))?;
        if seen[p] {
            return Err(Error::DuplicateRank {
                person: owner,
                entry: to_person(x),
            });
        }
        seen[p] = true;
        out.push(p);
    }
    if out.len() != pos.len() {
        return Err(Error::IncompleteList {
            person: owner,
            expected: pos.len(),
            found: out.len(),
        });
    }
    Ok(out)
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (r, &x) in perm.iter().enumerate() {
        inv[x] = r;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_are_inverse_of_lists() {
        let inst = Instance::from_indices(vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(inst.man_rank(ManId(0), WomanId(1)), Some(0));
        assert_eq!(inst.man_rank(ManId(0), WomanId(0)), Some(1));
        assert_eq!(inst.woman_rank(WomanId(1), ManId(1)), Some(0));
    }

    #[test]
    fn rejects_truncated_list() {
        let err = Instance::from_indices(vec![vec![0]], vec![vec![0], vec![0]]).unwrap_err();
        assert_eq!(
            err,
            Error::IncompleteList {
                person: PersonId::man(0),
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn rejects_duplicate_rank() {
        let err = Instance::from_indices(vec![vec![0, 0]], vec![vec![0], vec![0]]).unwrap_err();
        assert_eq!(
            err,
            Error::DuplicateRank {
                person: PersonId::man(0),
                entry: PersonId::woman(0)
            }
        );
    }

    #[test]
    fn rejects_unknown_and_duplicate_people() {
        let err = Instance::from_indices(vec![vec![3]], vec![vec![0]]).unwrap_err();
        assert_eq!(err, Error::UnknownPerson(PersonId::woman(3)));
        let err = Instance::new(
            vec![(ManId(1), vec![WomanId(1)]), (ManId(1), vec![WomanId(1)])],
            vec![(WomanId(1), vec![ManId(1)])],
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicatePerson(PersonId::man(1)));
    }

    #[test]
    fn restriction_keeps_relative_order() {
        let inst = Instance::from_indices(
            vec![vec![2, 0, 1], vec![0, 1, 2]],
            vec![vec![1, 0], vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let sub = inst.restrict(&[ManId(0), ManId(1)], &[WomanId(0), WomanId(2)]).unwrap();
        assert_eq!(sub.man_list(ManId(0)).unwrap(), vec![WomanId(2), WomanId(0)]);
        assert_eq!(sub.woman_list(WomanId(2)).unwrap(), vec![ManId(1), ManId(0)]);
    }

    #[test]
    fn empty_sides_are_allowed() {
        let inst = Instance::new(vec![], vec![(WomanId(1), vec![])]).unwrap();
        assert!(inst.men().is_empty());
        assert_eq!(inst.women(), &[WomanId(1)]);
    }
}
