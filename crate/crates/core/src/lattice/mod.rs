//! The lattice of stable matchings of one instance: deferred acceptance,
//! enumeration, the rotation poset and maximum-weight stable matching.

mod flow;
mod mwsm;
mod rotation;

pub use mwsm::{max_weight_stable, WeightFn};
pub use rotation::{build_rotation_poset, Rotation, RotationPoset};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matching::{Dense, Matching};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Proposers {
    Men,
    Women,
}

/// Gale-Shapley deferred acceptance. Returns the proposer-optimal stable
/// matching (and so the receiver-pessimal one).
pub fn deferred_acceptance(inst: &Instance, proposers: Proposers) -> Matching {
    dense_deferred_acceptance(inst, proposers).to_matching(inst)
}

pub(crate) fn dense_deferred_acceptance(inst: &Instance, proposers: Proposers) -> Dense {
    let mut d = Dense::empty(inst);
    match proposers {
        Proposers::Men => {
            let husband = propose(inst.n_men(), inst.n_women(), |i| inst.mpref(i), |j, i| inst.wrank(j, i));
            for (j, h) in husband.into_iter().enumerate() {
                if let Some(i) = h {
                    d.set(i, j);
                }
            }
        }
        Proposers::Women => {
            let wife = propose(inst.n_women(), inst.n_men(), |j| inst.wpref(j), |i, j| inst.mrank(i, j));
            for (i, w) in wife.into_iter().enumerate() {
                if let Some(j) = w {
                    d.set(i, j);
                }
            }
        }
    }
    d
}

/// Returns, for each receiver, the proposer it holds at the end.
fn propose<'a>(
    n_prop: usize,
    n_recv: usize,
    pref: impl Fn(usize) -> &'a [usize],
    rank: impl Fn(usize, usize) -> usize,
) -> Vec<Option<usize>> {
    let mut held: Vec<Option<usize>> = vec![None; n_recv];
    let mut next = vec![0usize; n_prop];
    let mut free: Vec<usize> = (0..n_prop).rev().collect();
    while let Some(p) = free.pop() {
        let list = pref(p);
        if next[p] == list.len() {
            continue;
        }
        let r = list[next[p]];
        next[p] += 1;
        match held[r] {
            None => held[r] = Some(p),
            Some(q) if rank(r, p) < rank(r, q) => {
                held[r] = Some(p);
                free.push(q);
            }
            Some(_) => free.push(p),
        }
    }
    held
}

/// How [`enumerate_stable_with`] finds the stable matchings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    /// Every matching (including partial ones) filtered by stability.
    /// Reference oracle; refuses instances with more than 8 persons a side.
    Exhaustive,
    /// Closed subsets of the rotation poset.
    #[default]
    Rotation,
}

/// Largest side accepted by [`Backend::Exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// All stable matchings, sorted, via the rotation poset.
pub fn enumerate_stable(inst: &Instance, cap: Option<usize>) -> Result<Vec<Matching>> {
    enumerate_stable_with(inst, Backend::Rotation, cap)
}

pub fn enumerate_stable_with(inst: &Instance, backend: Backend, cap: Option<usize>) -> Result<Vec<Matching>> {
    let mut out = match backend {
        Backend::Exhaustive => exhaustive(inst, cap)?,
        Backend::Rotation => {
            let poset = build_rotation_poset(inst);
            poset
                .closed_subsets(cap)?
                .iter()
                .map(|s| poset.matching_of(s))
                .collect()
        }
    };
    out.sort();
    out.dedup();
    Ok(out)
}

fn exhaustive(inst: &Instance, cap: Option<usize>) -> Result<Vec<Matching>> {
    if inst.n_men() > EXHAUSTIVE_LIMIT || inst.n_women() > EXHAUSTIVE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "exhaustive enumeration is limited to {EXHAUSTIVE_LIMIT} persons per side"
        )));
    }
    let mut found = BTreeSet::new();
    let mut d = Dense::empty(inst);
    exhaustive_rec(inst, 0, &mut d, &mut found, cap)?;
    Ok(found.into_iter().collect())
}

fn exhaustive_rec(
    inst: &Instance,
    i: usize,
    d: &mut Dense,
    found: &mut BTreeSet<Matching>,
    cap: Option<usize>,
) -> Result<()> {
    if i == inst.n_men() {
        if d.first_blocking_pair(inst).is_none() {
            found.insert(d.to_matching(inst));
            if let Some(c) = cap {
                if found.len() > c {
                    return Err(Error::CapExceeded {
                        cap: c,
                        found: found.len(),
                    });
                }
            }
        }
        return Ok(());
    }
    exhaustive_rec(inst, i + 1, d, found, cap)?;
    for j in 0..inst.n_women() {
        if d.husband[j].is_none() {
            d.set(i, j);
            exhaustive_rec(inst, i + 1, d, found, cap)?;
            d.wife[i] = None;
            d.husband[j] = None;
        }
    }
    Ok(())
}
