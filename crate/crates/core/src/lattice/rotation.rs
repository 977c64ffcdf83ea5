//! Rotations and their precedence order.
//!
//! Unequal sides are handled by padding the short side with dummy persons
//! ranked below every real person, with a common order among dummies. The
//! padded instance has the same stable matchings as the original plus a fixed
//! dummy assignment, so rotations never touch a dummy and closed subsets of
//! the padded poset are in bijection with the original stable matchings.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::{Instance, ManId, WomanId};
use crate::matching::Matching;

/// A cyclic exchange `(u_0, w_0), ..., (u_{r-1}, w_{r-1})`. Eliminating it
/// moves each `u_i` from `w_i` to `w_{i+1 mod r}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rotation {
    pub pairs: Vec<(ManId, WomanId)>,
}

impl Rotation {
    /// Pairs after elimination.
    pub fn produced(&self) -> impl Iterator<Item = (ManId, WomanId)> + '_ {
        let r = self.pairs.len();
        (0..r).map(move |i| (self.pairs[i].0, self.pairs[(i + 1) % r].1))
    }

    /// Change in total weight when this rotation is eliminated.
    pub fn weight_delta(&self, f: impl Fn(ManId, WomanId) -> i64) -> i64 {
        let gained: i64 = self.produced().map(|(u, w)| f(u, w)).sum();
        let lost: i64 = self.pairs.iter().map(|&(u, w)| f(u, w)).sum();
        gained - lost
    }
}

/// Rotations listed in the order of one maximal elimination chain from the
/// men-optimal matching, which is a linear extension of the precedence
/// order.
#[derive(Clone, Debug)]
pub struct RotationPoset {
    rotations: Vec<Rotation>,
    preds: Vec<BTreeSet<usize>>,
    men_optimal: Matching,
}

impl RotationPoset {
    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    /// Generating edges `(a, b)`: rotation `a` must be eliminated before `b`.
    /// Always `a < b`; the order itself is the transitive closure.
    pub fn precedence(&self) -> Vec<(usize, usize)> {
        self.preds
            .iter()
            .enumerate()
            .flat_map(|(b, ps)| ps.iter().map(move |&a| (a, b)))
            .collect()
    }

    pub fn predecessors(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        self.preds[b].iter().copied()
    }

    pub fn men_optimal(&self) -> &Matching {
        &self.men_optimal
    }

    /// A set is closed if it contains every predecessor of each member.
    pub fn is_closed(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().all(|&b| self.preds[b].iter().all(|a| set.contains(a)))
    }

    /// The stable matching reached by eliminating a closed set from the
    /// men-optimal matching.
    pub fn matching_of(&self, closed: &BTreeSet<usize>) -> Matching {
        debug_assert!(self.is_closed(closed));
        let mut wife: std::collections::BTreeMap<ManId, WomanId> = self.men_optimal.pairs().collect();
        for &k in closed {
            for (u, w) in self.rotations[k].produced() {
                wife.insert(u, w);
            }
        }
        Matching::from_pairs(wife).expect("rotation elimination preserves a matching")
    }

    /// Every closed subset, as sorted index sets. Fails once more than `cap`
    /// subsets have been produced.
    pub fn closed_subsets(&self, cap: Option<usize>) -> Result<Vec<BTreeSet<usize>>> {
        let mut out = Vec::new();
        let mut cur = BTreeSet::new();
        self.closed_rec(0, &mut cur, &mut out, cap)?;
        Ok(out)
    }

    fn closed_rec(
        &self,
        k: usize,
        cur: &mut BTreeSet<usize>,
        out: &mut Vec<BTreeSet<usize>>,
        cap: Option<usize>,
    ) -> Result<()> {
        if k == self.rotations.len() {
            out.push(cur.clone());
            if let Some(c) = cap {
                if out.len() > c {
                    return Err(Error::CapExceeded {
                        cap: c,
                        found: out.len(),
                    });
                }
            }
            return Ok(());
        }
        self.closed_rec(k + 1, cur, out, cap)?;
        if self.preds[k].iter().all(|a| cur.contains(a)) {
            cur.insert(k);
            self.closed_rec(k + 1, cur, out, cap)?;
            cur.remove(&k);
        }
        Ok(())
    }
}

struct Padded {
    n: usize,
    real_men: usize,
    real_women: usize,
    mpref: Vec<Vec<usize>>,
    mrank: Vec<Vec<usize>>,
    wrank: Vec<Vec<usize>>,
}

impl Padded {
    fn new(inst: &Instance) -> Self {
        let (nm, nw) = (inst.n_men(), inst.n_women());
        let n = nm.max(nw);
        let mut mpref: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                if i < nm {
                    inst.mpref(i).to_vec()
                } else {
                    (0..nw).collect()
                }
            })
            .collect();
        let mut wpref: Vec<Vec<usize>> = (0..n)
            .map(|j| {
                if j < nw {
                    inst.wpref(j).to_vec()
                } else {
                    (0..nm).collect()
                }
            })
            .collect();
        for l in &mut mpref {
            l.extend(nw..n);
        }
        for l in &mut wpref {
            l.extend(nm..n);
        }
        let inv = |p: &Vec<usize>| {
            let mut r = vec![0; p.len()];
            for (k, &x) in p.iter().enumerate() {
                r[x] = k;
            }
            r
        };
        let mrank = mpref.iter().map(inv).collect();
        let wrank = wpref.iter().map(inv).collect();
        Padded {
            n,
            real_men: nm,
            real_women: nw,
            mpref,
            mrank,
            wrank,
        }
    }

    /// Deferred acceptance on the padded square instance; returns wife per man.
    fn deferred_acceptance(&self, men_propose: bool) -> Vec<usize> {
        let n = self.n;
        let mut held: Vec<Option<usize>> = vec![None; n];
        let mut next = vec![0usize; n];
        let mut free: Vec<usize> = (0..n).rev().collect();
        let wpref: Vec<Vec<usize>> = if men_propose {
            Vec::new()
        } else {
            (0..n)
                .map(|j| {
                    let mut l: Vec<usize> = (0..n).collect();
                    l.sort_by_key(|&i| self.wrank[j][i]);
                    l
                })
                .collect()
        };
        while let Some(p) = free.pop() {
            let r = if men_propose {
                self.mpref[p][next[p]]
            } else {
                wpref[p][next[p]]
            };
            next[p] += 1;
            let better = |a: usize, b: usize| {
                if men_propose {
                    self.wrank[r][a] < self.wrank[r][b]
                } else {
                    self.mrank[r][a] < self.mrank[r][b]
                }
            };
            match held[r] {
                None => held[r] = Some(p),
                Some(q) if better(p, q) => {
                    held[r] = Some(p);
                    free.push(q);
                }
                Some(_) => free.push(p),
            }
        }
        let mut wife = vec![0; n];
        for (r, h) in held.into_iter().enumerate() {
            let p = h.expect("square complete instance matches everyone");
            if men_propose {
                wife[p] = r;
            } else {
                wife[r] = p;
            }
        }
        wife
    }
}

/// Finds all rotations along one maximal chain from the men-optimal to the
/// women-optimal matching and derives the precedence edges.
pub fn build_rotation_poset(inst: &Instance) -> RotationPoset {
    let pad = Padded::new(inst);
    let n = pad.n;
    let mut wife = pad.deferred_acceptance(true);
    let target = pad.deferred_acceptance(false);
    let mut husband = vec![0; n];
    for (i, &j) in wife.iter().enumerate() {
        husband[j] = i;
    }

    let men_optimal = Matching::from_pairs(
        (0..pad.real_men)
            .filter(|&i| wife[i] < pad.real_women)
            .map(|i| (inst.man_at(i), inst.woman_at(wife[i]))),
    )
    .expect("injective");

    // rotation index that last moved each man
    let mut last_move: Vec<Option<usize>> = vec![None; n];
    // each woman's partners over time, with the rotation that brought them
    let mut history: Vec<Vec<(usize, Option<usize>)>> = (0..n).map(|j| vec![(husband[j], None)]).collect();

    let mut dense_rotations: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut preds: Vec<BTreeSet<usize>> = Vec::new();

    loop {
        let mut s = vec![None; n];
        for i in 0..n {
            if wife[i] == target[i] {
                continue;
            }
            let start = pad.mrank[i][wife[i]] + 1;
            s[i] = pad.mpref[i][start..]
                .iter()
                .copied()
                .find(|&j| pad.wrank[j][i] < pad.wrank[j][husband[j]]);
            debug_assert!(s[i].is_some());
        }
        let Some(start) = (0..n).find(|&i| s[i].is_some()) else {
            break;
        };
        // walk next(m) = husband of s(m) until a man repeats
        let mut pos = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut cur = start;
        while pos[cur] == usize::MAX {
            pos[cur] = walk.len();
            walk.push(cur);
            cur = husband[s[cur].expect("next stays among movable men")];
        }
        let cycle: Vec<usize> = walk[pos[cur]..].to_vec();
        let rot: Vec<(usize, usize)> = cycle.iter().map(|&i| (i, wife[i])).collect();
        let idx = dense_rotations.len();

        let mut ps = BTreeSet::new();
        for (k, &(i, wi)) in rot.iter().enumerate() {
            if let Some(p) = last_move[i] {
                ps.insert(p);
            }
            let next_w = rot[(k + 1) % rot.len()].1;
            let (lo, hi) = (pad.mrank[i][wi] + 1, pad.mrank[i][next_w]);
            for &j in &pad.mpref[i][lo..hi] {
                // the rotation after which j first held someone she prefers to i
                let crossing = history[j].iter().find(|(h, _)| pad.wrank[j][*h] < pad.wrank[j][i]);
                if let Some((_, Some(p))) = crossing {
                    ps.insert(*p);
                }
            }
        }
        ps.remove(&idx);
        preds.push(ps);

        for k in 0..rot.len() {
            let (i, _) = rot[k];
            let j = rot[(k + 1) % rot.len()].1;
            wife[i] = j;
            husband[j] = i;
            last_move[i] = Some(idx);
            history[j].push((i, Some(idx)));
        }
        dense_rotations.push(rot);
    }

    let rotations = dense_rotations
        .into_iter()
        .map(|rot| Rotation {
            pairs: rot
                .into_iter()
                .map(|(i, j)| {
                    debug_assert!(i < pad.real_men && j < pad.real_women, "dummy inside a rotation");
                    (inst.man_at(i), inst.woman_at(j))
                })
                .collect(),
        })
        .collect();
    RotationPoset {
        rotations,
        preds,
        men_optimal,
    }
}
