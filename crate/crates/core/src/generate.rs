//! Seeded random problems. Every generator draws from a caller-supplied
//! random source; [`rng_from_seed`] gives the reproducible ChaCha8 stream
//! used by the command-line tool and the test corpora.
//!
//! Persons are numbered from 1. Preference lists are independent uniform
//! permutations, drawn men first, then women, each in id order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, ManId, WomanId};
use crate::problem::{MultiStageProblem, TwoStageProblem, Variant};
use crate::reductions::{CollegeInstance, StudentId, TwoStageCollegeProblem, UniversityId};

/// Name of the generator stream, recorded in generated files.
pub const RNG_NAME: &str = "chacha8-v1";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn shuffled<T: Clone, R: Rng + ?Sized>(rng: &mut R, items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}

/// Complete random instance on men `1..=n_men` and women `1..=n_women`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n_men: u32, n_women: u32) -> Instance {
    let men: Vec<ManId> = (1..=n_men).map(ManId).collect();
    let women: Vec<WomanId> = (1..=n_women).map(WomanId).collect();
    let ml = men.iter().map(|&u| (u, shuffled(rng, &women))).collect();
    let wl = women.iter().map(|&w| (w, shuffled(rng, &men))).collect();
    Instance::new(ml, wl).expect("random permutations form a valid instance")
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

/// Women `1..=w1` present first, `w1+1..=w2` arriving.
pub fn random_women_arrive<R: Rng + ?Sized>(rng: &mut R, n_men: u32, w1: u32, w2: u32) -> Result<TwoStageProblem> {
    check(w1 <= w2, || {
        format!("first-stage women {w1} exceed second-stage women {w2}")
    })?;
    let s2 = random_instance(rng, n_men, w2);
    let men: Vec<ManId> = (1..=n_men).map(ManId).collect();
    let women: Vec<WomanId> = (1..=w1).map(WomanId).collect();
    let s1 = s2.restrict(&men, &women)?;
    TwoStageProblem::new(Variant::WomenArrive, s1, s2)
}

/// `n1 - n2` randomly chosen men leave; women fixed.
pub fn random_men_leave<R: Rng + ?Sized>(rng: &mut R, n1: u32, n2: u32, n_women: u32) -> Result<TwoStageProblem> {
    random_leave_arrive_as(rng, Variant::MenLeave, n1, n2, n_women, n_women)
}

/// `n1 - n2` random men leave and `w2 - w1` random women arrive.
pub fn random_leave_arrive<R: Rng + ?Sized>(
    rng: &mut R,
    n1: u32,
    n2: u32,
    w1: u32,
    w2: u32,
) -> Result<TwoStageProblem> {
    random_leave_arrive_as(rng, Variant::LeaveAndArrive, n1, n2, w1, w2)
}

fn random_leave_arrive_as<R: Rng + ?Sized>(
    rng: &mut R,
    variant: Variant,
    n1: u32,
    n2: u32,
    w1: u32,
    w2: u32,
) -> Result<TwoStageProblem> {
    check(n2 <= n1, || {
        format!("second-stage men {n2} exceed first-stage men {n1}")
    })?;
    check(w1 <= w2, || {
        format!("first-stage women {w1} exceed second-stage women {w2}")
    })?;
    let full = random_instance(rng, n1, w2);
    let mut men = shuffled(rng, full.men());
    men.truncate(n2 as usize);
    men.sort();
    let mut women = shuffled(rng, full.women());
    women.truncate(w1 as usize);
    women.sort();
    let s1 = full.restrict(full.men(), &women)?;
    let s2 = full.restrict(&men, full.women())?;
    TwoStageProblem::new(variant, s1, s2)
}

/// Arrival problem with `sizes[t]` women present at stage `t`.
pub fn random_multistage<R: Rng + ?Sized>(rng: &mut R, n_men: u32, sizes: &[u32]) -> Result<MultiStageProblem> {
    check(!sizes.is_empty(), || "at least one stage is required".into())?;
    check(sizes.windows(2).all(|w| w[0] <= w[1]), || {
        format!("stage sizes {sizes:?} must not decrease")
    })?;
    let full = random_instance(rng, n_men, *sizes.last().unwrap());
    let stages = sizes
        .iter()
        .map(|&k| full.restrict(full.men(), &(1..=k).map(WomanId).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    MultiStageProblem::new(Variant::WomenArrive, stages)
}

/// Universities `1..=n_unis` with capacities uniform in `1..=max_cap`.
pub fn random_college<R: Rng + ?Sized>(
    rng: &mut R,
    n_unis: u32,
    max_cap: usize,
    n_students: u32,
) -> Result<CollegeInstance> {
    check(max_cap >= 1, || "capacities must be at least 1".into())?;
    let unis: Vec<UniversityId> = (1..=n_unis).map(UniversityId).collect();
    let studs: Vec<StudentId> = (1..=n_students).map(StudentId).collect();
    let ul = unis
        .iter()
        .map(|&c| (c, rng.gen_range(1..=max_cap), shuffled(rng, &studs)))
        .collect();
    let sl = studs.iter().map(|&s| (s, shuffled(rng, &unis))).collect();
    CollegeInstance::new(ul, sl)
}

/// Students `1..=s1` apply first, `s1+1..=s2` arrive.
pub fn random_two_stage_college<R: Rng + ?Sized>(
    rng: &mut R,
    n_unis: u32,
    max_cap: usize,
    s1: u32,
    s2: u32,
) -> Result<TwoStageCollegeProblem> {
    check(s1 <= s2, || {
        format!("first-stage students {s1} exceed second-stage students {s2}")
    })?;
    let full = random_college(rng, n_unis, max_cap, s2)?;
    let first = restrict_students(&full, s1)?;
    TwoStageCollegeProblem::new(first, full)
}

fn restrict_students(ci: &CollegeInstance, k: u32) -> Result<CollegeInstance> {
    let keep = |s: &StudentId| s.0 <= k;
    let ul = ci
        .universities()
        .map(|c| {
            (
                c,
                ci.capacity(c).unwrap(),
                ci.university_list(c).unwrap().iter().copied().filter(keep).collect(),
            )
        })
        .collect();
    let sl = ci
        .students()
        .filter(keep)
        .map(|s| (s, ci.student_list(s).unwrap().to_vec()))
        .collect();
    CollegeInstance::new(ul, sl)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let a = random_instance(&mut rng_from_seed(17), 5, 5);
        let b = random_instance(&mut rng_from_seed(17), 5, 5);
        assert_eq!(a, b);
        assert_ne!(a, random_instance(&mut rng_from_seed(18), 5, 5));
    }

    #[test]
    fn problem_shapes() {
        let mut rng = rng_from_seed(1);
        let p = random_women_arrive(&mut rng, 4, 2, 5).unwrap();
        assert_eq!((p.stage1().women().len(), p.stage2().women().len()), (2, 5));
        let p = random_men_leave(&mut rng, 4, 2, 3).unwrap();
        assert_eq!((p.stage1().men().len(), p.stage2().men().len()), (4, 2));
        let p = random_leave_arrive(&mut rng, 4, 3, 2, 4).unwrap();
        assert_eq!(p.variant(), Variant::LeaveAndArrive);
        assert_eq!(p.stage1().women().len(), 2);
        let p = random_multistage(&mut rng, 3, &[1, 2, 3]).unwrap();
        assert_eq!(p.len(), 3);
        assert!(random_women_arrive(&mut rng, 3, 4, 2).is_err());
    }

    #[test]
    fn college_shapes() {
        let mut rng = rng_from_seed(2);
        let p = random_two_stage_college(&mut rng, 3, 2, 2, 5).unwrap();
        assert_eq!(p.stage1().students().count(), 2);
        assert_eq!(p.stage2().students().count(), 5);
        assert!(p
            .stage2()
            .universities()
            .all(|c| (1..=2).contains(&p.stage2().capacity(c).unwrap())));
    }
}
