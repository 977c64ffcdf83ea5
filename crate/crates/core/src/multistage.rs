//! More than two rounds: online policies, the chained two-stage strategy,
//! the exact offline optimum, and the three-round adversary that defeats
//! every deterministic online algorithm.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, ManId, WomanId};
use crate::lattice::{deferred_acceptance, enumerate_stable_with, Proposers};
use crate::matching::{divorces, is_stable, Matching};
use crate::problem::{MultiStageProblem, Variant};
use crate::twostage::{dominance_transform_lifted, oracle_backend, stage1_choice, stage2_choice};

/// A deterministic online algorithm. Each call sees the current market and
/// the previous choice, never a later stage.
pub trait OnlinePolicy {
    fn name(&self) -> &str;
    fn first(&mut self, stage: &Instance) -> Matching;
    fn next(&mut self, previous: &Matching, stage: &Instance) -> Matching;
}

/// Men-optimal first, then the stable matching keeping most previous pairs.
#[derive(Clone, Copy, Debug, Default)]
pub struct Greedy;

/// Men-optimal matching at every stage, ignoring history.
#[derive(Clone, Copy, Debug, Default)]
pub struct MenOptimal;

/// Women-optimal matching at every stage, ignoring history.
#[derive(Clone, Copy, Debug, Default)]
pub struct WomenOptimal;

impl OnlinePolicy for Greedy {
    fn name(&self) -> &str {
        "greedy"
    }

    fn first(&mut self, stage: &Instance) -> Matching {
        stage1_choice(stage)
    }

    fn next(&mut self, previous: &Matching, stage: &Instance) -> Matching {
        stage2_choice(previous, stage)
    }
}

impl OnlinePolicy for MenOptimal {
    fn name(&self) -> &str {
        "men-optimal"
    }

    fn first(&mut self, stage: &Instance) -> Matching {
        deferred_acceptance(stage, Proposers::Men)
    }

    fn next(&mut self, _: &Matching, stage: &Instance) -> Matching {
        deferred_acceptance(stage, Proposers::Men)
    }
}

impl OnlinePolicy for WomenOptimal {
    fn name(&self) -> &str {
        "women-optimal"
    }

    fn first(&mut self, stage: &Instance) -> Matching {
        deferred_acceptance(stage, Proposers::Women)
    }

    fn next(&mut self, _: &Matching, stage: &Instance) -> Matching {
        deferred_acceptance(stage, Proposers::Women)
    }
}

/// Policy by name: `greedy`, `men-optimal` or `women-optimal`.
pub fn policy_by_name(name: &str) -> Result<Box<dyn OnlinePolicy + Send>> {
    match name {
        "greedy" => Ok(Box::new(Greedy)),
        "men-optimal" => Ok(Box::new(MenOptimal)),
        "women-optimal" => Ok(Box::new(WomenOptimal)),
        _ => Err(Error::InvalidParameter(format!("unknown policy `{name}`"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiStageSolution {
    pub matchings: Vec<Matching>,
    pub per_transition: Vec<usize>,
    pub total_divorces: usize,
}

impl MultiStageSolution {
    pub fn new(matchings: Vec<Matching>) -> Self {
        let per_transition: Vec<usize> = matchings.windows(2).map(|w| divorces(&w[0], &w[1])).collect();
        let total_divorces = per_transition.iter().sum();
        MultiStageSolution {
            matchings,
            per_transition,
            total_divorces,
        }
    }
}

fn checked(stage: usize, inst: &Instance, m: Matching) -> Result<Matching> {
    match is_stable(inst, &m) {
        Ok(true) => Ok(m),
        _ => Err(Error::ProtocolViolation { stage }),
    }
}

/// Feeds the stages to `policy` one at a time and checks each answer.
pub fn run_online(p: &MultiStageProblem, policy: &mut dyn OnlinePolicy) -> Result<MultiStageSolution> {
    let stages = p.stages();
    let mut out = vec![checked(1, &stages[0], policy.first(&stages[0]))?];
    for (t, inst) in stages.iter().enumerate().skip(1) {
        let m = policy.next(out.last().unwrap(), inst);
        out.push(checked(t + 1, inst, m)?);
    }
    Ok(MultiStageSolution::new(out))
}

/// The two-stage optimal algorithm applied transition by transition.
pub fn greedy_chain(p: &MultiStageProblem) -> Result<MultiStageSolution> {
    p.require(Variant::WomenArrive)?;
    run_online(p, &mut Greedy)
}

fn stable_sets(p: &MultiStageProblem, cap: Option<usize>) -> Result<Vec<Vec<Matching>>> {
    let sets = p
        .stages()
        .iter()
        .map(|s| enumerate_stable_with(s, oracle_backend(s), cap))
        .collect::<Result<Vec<_>>>()?;
    if let Some(c) = cap {
        let product = sets.iter().try_fold(1usize, |acc, d| acc.checked_mul(d.len()));
        match product {
            Some(x) if x <= c => {}
            _ => {
                return Err(Error::CapExceeded {
                    cap: c,
                    found: product.unwrap_or(usize::MAX),
                })
            }
        }
    }
    Ok(sets)
}

/// Exact offline optimum by dynamic programming over the stable matchings
/// of each stage. `cap` bounds the product of the stage set sizes.
pub fn brute_force_multistage(p: &MultiStageProblem, cap: Option<usize>) -> Result<MultiStageSolution> {
    let sets = stable_sets(p, cap)?;
    Ok(optimal_path(&sets, None))
}

/// Offline optimum among sequences starting with `first`.
pub fn brute_force_multistage_from(
    p: &MultiStageProblem,
    first: &Matching,
    cap: Option<usize>,
) -> Result<MultiStageSolution> {
    let sets = stable_sets(p, cap)?;
    if !sets[0].contains(first) {
        return Err(Error::InvalidParameter(format!(
            "{first} is not stable in the first stage"
        )));
    }
    Ok(optimal_path(&sets, Some(first)))
}

fn optimal_path(sets: &[Vec<Matching>], first: Option<&Matching>) -> MultiStageSolution {
    // cost[t][j]: cheapest prefix ending in sets[t][j]; back[t][j]: its predecessor
    let mut cost: Vec<Vec<usize>> = vec![sets[0]
        .iter()
        .map(|m| if first.is_none_or(|f| f == m) { 0 } else { usize::MAX })
        .collect()];
    let mut back: Vec<Vec<usize>> = vec![vec![0; sets[0].len()]];
    for t in 1..sets.len() {
        let (mut c, mut b) = (Vec::new(), Vec::new());
        for m in &sets[t] {
            let mut best = (usize::MAX, 0);
            for (i, prev) in sets[t - 1].iter().enumerate() {
                if cost[t - 1][i] == usize::MAX {
                    continue;
                }
                let x = cost[t - 1][i] + divorces(prev, m);
                if x < best.0 {
                    best = (x, i);
                }
            }
            c.push(best.0);
            b.push(best.1);
        }
        cost.push(c);
        back.push(b);
    }
    let last = sets.len() - 1;
    let mut j = (0..sets[last].len())
        .min_by_key(|&j| cost[last][j])
        .expect("stable sets are never empty");
    let mut picks = vec![sets[last][j].clone()];
    for t in (1..sets.len()).rev() {
        j = back[t][j];
        picks.push(sets[t - 1][j].clone());
    }
    picks.reverse();
    MultiStageSolution::new(picks)
}

/// Given a feasible sequence and a first-stage `m1_prime` men-dominating its
/// first matching, builds a sequence from `m1_prime` that is no more costly,
/// by applying the two-stage dominance transform along every transition.
pub fn iterate_dominance(p: &MultiStageProblem, seq: &[Matching], m1_prime: &Matching) -> Result<Vec<Matching>> {
    p.require(Variant::WomenArrive)?;
    if seq.len() != p.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} matchings, got {}",
            p.len(),
            seq.len()
        )));
    }
    let mut out = vec![m1_prime.clone()];
    for t in 0..p.len() - 1 {
        let next = dominance_transform_lifted(&p.transition(t), &seq[t], &seq[t + 1], &out[t])?;
        out.push(next);
    }
    Ok(out)
}

/// The block on `k` men and women where `u_i` ranks `w_i, w_{i+1}, ...` and
/// `w_i` ranks `u_{i+1}, u_i, u_{i-1}, ...`, indices cyclic in `1..=k`. Its
/// only stable matchings are `{(u_i, w_i)}` and `{(u_{i+1}, w_i)}`.
pub fn cyclic_block(k: u32) -> Result<Instance> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "cyclic block needs at least 2 persons per side, got {k}"
        )));
    }
    let cyc = |i: i64| (i - 1).rem_euclid(k as i64) as u32 + 1;
    let men = (1..=k)
        .map(|i| (ManId(i), (0..k).map(|d| WomanId(cyc((i + d) as i64))).collect()))
        .collect();
    let women = (1..=k)
        .map(|i| {
            let list = (0..k).map(|d| ManId(cyc(i as i64 + 1 - d as i64))).collect();
            (WomanId(i), list)
        })
        .collect();
    Instance::new(men, women)
}

/// `{(u_i, w_i)}` on the block of size `k`.
pub fn block_men_optimal(k: u32) -> Matching {
    Matching::from_pairs((1..=k).map(|i| (ManId(i), WomanId(i)))).expect("perfect matching")
}

/// `{(u_{i+1}, w_i)}` on the block of size `k`.
pub fn block_women_optimal(k: u32) -> Matching {
    Matching::from_pairs((1..=k).map(|i| (ManId(i % k + 1), WomanId(i)))).expect("perfect matching")
}

/// First two stages of the adversary on `n >= 3` men: stage 2 is the block
/// of size `n - 1` plus `u_n`, who ranks `w_1 .. w_{n-1}` and is ranked last
/// by every woman; stage 1 keeps only `w_1`.
pub fn adversary_stages12(n: u32) -> Result<(Instance, Instance)> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("adversary needs n >= 3, got {n}")));
    }
    let (mut ml, mut wl) = cyclic_block(n - 1)?.lists();
    ml.push((ManId(n), (1..n).map(WomanId).collect()));
    for (_, list) in &mut wl {
        list.push(ManId(n));
    }
    let s2 = Instance::new(ml, wl)?;
    let men: Vec<ManId> = (1..=n).map(ManId).collect();
    let s1 = s2.restrict(&men, &[WomanId(1)])?;
    Ok((s1, s2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdversaryCase {
    /// The algorithm kept the men-optimal block matching.
    #[serde(rename = "case-1")]
    Case1,
    /// The algorithm kept the women-optimal block matching.
    #[serde(rename = "case-2")]
    Case2,
}

impl fmt::Display for AdversaryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdversaryCase::Case1 => "case-1",
            AdversaryCase::Case2 => "case-2",
        })
    }
}

/// Third stage answering the algorithm's second-stage choice. `w_n` arrives.
///
/// Against the men-optimal choice she ranks `u_n` first and sits last in
/// every list, so the women-optimal choice extends at no cost. Against the
/// women-optimal choice she is second for `u_1 .. u_{n-1}`, last for `u_n`,
/// and ranks men by index, which leaves `{(u_i, w_i)}` as the only stable
/// matching.
pub fn adversary3(n: u32, choice: &Matching) -> Result<(AdversaryCase, Instance)> {
    let (_, s2) = adversary_stages12(n)?;
    if !is_stable(&s2, choice)? {
        return Err(Error::ProtocolViolation { stage: 2 });
    }
    let case = if *choice == block_men_optimal(n - 1) {
        AdversaryCase::Case1
    } else if *choice == block_women_optimal(n - 1) {
        AdversaryCase::Case2
    } else {
        return Err(Error::InvalidParameter(format!(
            "{choice} is not a stable matching of the second stage"
        )));
    };
    let wn = WomanId(n);
    let (mut ml, mut wl) = s2.lists();
    for (u, list) in &mut ml {
        if case == AdversaryCase::Case2 && u.0 < n {
            list.insert(1, wn);
        } else {
            list.push(wn);
        }
    }
    let her = match case {
        AdversaryCase::Case1 => std::iter::once(n).chain(1..n).map(ManId).collect(),
        AdversaryCase::Case2 => (1..=n).map(ManId).collect(),
    };
    wl.push((wn, her));
    Ok((case, Instance::new(ml, wl)?))
}

/// Online cost over offline cost. Unbounded when the offline cost is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Ratio {
    Finite(f64),
    Unbounded,
}

impl Ratio {
    pub fn of(alg: usize, opt: usize) -> Self {
        if opt == 0 {
            Ratio::Unbounded
        } else {
            Ratio::Finite(alg as f64 / opt as f64)
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(x) => write!(f, "{x:.3}"),
            Ratio::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdversaryTranscript {
    pub n: u32,
    pub policy: String,
    pub case: AdversaryCase,
    pub matchings: Vec<Matching>,
    pub offline: Vec<Matching>,
    pub alg_cost: usize,
    pub opt_cost: usize,
    pub ratio: Ratio,
}

/// Plays the three-round adversary against `policy`.
pub fn run_adversary_experiment(n: u32, policy: &mut dyn OnlinePolicy) -> Result<AdversaryTranscript> {
    let (s1, s2) = adversary_stages12(n)?;
    let m1 = checked(1, &s1, policy.first(&s1))?;
    let m2 = checked(2, &s2, policy.next(&m1, &s2))?;
    let (case, s3) = adversary3(n, &m2)?;
    let m3 = checked(3, &s3, policy.next(&m2, &s3))?;
    let alg = MultiStageSolution::new(vec![m1, m2, m3]);
    let realized = MultiStageProblem::new(Variant::WomenArrive, vec![s1, s2, s3])?;
    let opt = brute_force_multistage(&realized, None)?;
    Ok(AdversaryTranscript {
        n,
        policy: policy.name().to_string(),
        case,
        ratio: Ratio::of(alg.total_divorces, opt.total_divorces),
        alg_cost: alg.total_divorces,
        opt_cost: opt.total_divorces,
        matchings: alg.matchings,
        offline: opt.matchings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_stable;

    #[test]
    fn block_has_two_stable_matchings() {
        for k in 2..=6 {
            let b = cyclic_block(k).unwrap();
            let all = enumerate_stable(&b, None).unwrap();
            assert_eq!(all.len(), 2);
            assert!(all.contains(&block_men_optimal(k)));
            assert!(all.contains(&block_women_optimal(k)));
            assert_eq!(deferred_acceptance(&b, Proposers::Men), block_men_optimal(k));
        }
        assert!(cyclic_block(1).is_err());
    }

    #[test]
    fn block_lists_follow_the_cyclic_pattern() {
        let b = cyclic_block(4).unwrap();
        let w = |v: &[u32]| v.iter().map(|&i| WomanId(i)).collect::<Vec<_>>();
        let u = |v: &[u32]| v.iter().map(|&i| ManId(i)).collect::<Vec<_>>();
        assert_eq!(b.man_list(ManId(2)).unwrap(), w(&[2, 3, 4, 1]));
        assert_eq!(b.woman_list(WomanId(1)).unwrap(), u(&[2, 1, 4, 3]));
        assert_eq!(b.woman_list(WomanId(4)).unwrap(), u(&[1, 4, 3, 2]));
    }

    #[test]
    fn first_stage_is_forced() {
        let (s1, s2) = adversary_stages12(4).unwrap();
        assert_eq!(enumerate_stable(&s1, None).unwrap(), vec![Matching::of(&[(2, 1)])]);
        assert_eq!(enumerate_stable(&s2, None).unwrap().len(), 2);
    }

    #[test]
    fn case_two_stage_three_is_rigid() {
        let (case, s3) = adversary3(4, &block_women_optimal(3)).unwrap();
        assert_eq!(case, AdversaryCase::Case2);
        let all = enumerate_stable(&s3, None).unwrap();
        assert_eq!(all, vec![Matching::of(&[(1, 1), (2, 2), (3, 3), (4, 4)])]);
    }

    #[test]
    fn case_one_extends_the_other_choice() {
        let (case, s3) = adversary3(4, &block_men_optimal(3)).unwrap();
        assert_eq!(case, AdversaryCase::Case1);
        let mut ext = block_women_optimal(3);
        ext.insert(ManId(4), WomanId(4)).unwrap();
        assert!(is_stable(&s3, &ext).unwrap());
    }

    #[test]
    fn adversary_costs() {
        let t = run_adversary_experiment(4, &mut Greedy).unwrap();
        assert_eq!((t.case, t.alg_cost, t.opt_cost), (AdversaryCase::Case2, 3, 1));
        let t = run_adversary_experiment(4, &mut MenOptimal).unwrap();
        assert_eq!(t.case, AdversaryCase::Case1);
        assert!(t.alg_cost >= 1);
        assert_eq!((t.opt_cost, t.ratio), (0, Ratio::Unbounded));
    }

    #[test]
    fn chain_of_equal_stages_costs_nothing() {
        let b = cyclic_block(3).unwrap();
        let p = MultiStageProblem::new(Variant::WomenArrive, vec![b.clone(), b.clone(), b]).unwrap();
        let sol = greedy_chain(&p).unwrap();
        assert_eq!(sol.total_divorces, 0);
        assert_eq!(brute_force_multistage(&p, None).unwrap().total_divorces, 0);
    }

    #[test]
    fn restricted_optimum_and_cap() {
        let (s1, s2) = adversary_stages12(4).unwrap();
        let (_, s3) = adversary3(4, &block_women_optimal(3)).unwrap();
        let p = MultiStageProblem::new(Variant::WomenArrive, vec![s1, s2, s3]).unwrap();
        let m1 = Matching::of(&[(2, 1)]);
        assert_eq!(brute_force_multistage_from(&p, &m1, None).unwrap().total_divorces, 1);
        assert!(brute_force_multistage_from(&p, &Matching::of(&[(1, 1)]), None).is_err());
        assert!(matches!(
            brute_force_multistage(&p, Some(1)),
            Err(Error::CapExceeded { .. })
        ));
    }

    struct Liar;

    impl OnlinePolicy for Liar {
        fn name(&self) -> &str {
            "liar"
        }
        fn first(&mut self, _: &Instance) -> Matching {
            Matching::new()
        }
        fn next(&mut self, _: &Matching, _: &Instance) -> Matching {
            Matching::new()
        }
    }

    #[test]
    fn unstable_answers_are_protocol_violations() {
        assert_eq!(
            run_adversary_experiment(3, &mut Liar).unwrap_err(),
            Error::ProtocolViolation { stage: 1 }
        );
    }
}
