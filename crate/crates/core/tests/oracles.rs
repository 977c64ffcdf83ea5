//! Cross-checks between independent ways of computing the same thing.

use std::collections::BTreeSet;

use rand::Rng;
use stagematch::generate::{
    random_college, random_leave_arrive, random_men_leave, random_multistage, random_two_stage_college, rng_from_seed,
};
use stagematch::multistage::{block_men_optimal, block_women_optimal};
use stagematch::{
    adversary3, adversary_stages12, brute_force_college, brute_force_multistage, brute_force_multistage_from,
    brute_force_optimum, college_divorces, cyclic_block, deferred_acceptance, divorces, enumerate_stable_assignments,
    enumerate_stable_with, expand_college, greedy_chain, is_stable, iterate_dominance, opt_two_stage_college,
    project_assignment, reduce_leave_arrive, reduce_leaving, run_adversary_experiment, AdversaryCase, Assignment,
    Backend, Greedy, Instance, Matching, MenOptimal, Proposers, Ratio, WomenOptimal,
};

fn exhaustive(inst: &Instance) -> Vec<Matching> {
    enumerate_stable_with(inst, Backend::Exhaustive, None).unwrap()
}

#[test]
fn seat_expansion_matches_direct_assignment_enumeration() {
    for seed in 0..300 {
        let mut rng = rng_from_seed(seed);
        let (unis, cap, students) = (rng.gen_range(1..=3), rng.gen_range(1..=2), rng.gen_range(0..=5));
        let ci = random_college(&mut rng, unis, cap, students).unwrap();
        let (inst, seats) = expand_college(&ci);
        let via_seats: BTreeSet<Assignment> = exhaustive(&inst)
            .iter()
            .map(|m| project_assignment(&seats, m))
            .collect();
        let direct: BTreeSet<Assignment> = enumerate_stable_assignments(&ci, None).unwrap().into_iter().collect();
        assert_eq!(via_seats, direct, "seed {seed}");
    }
}

#[test]
fn college_algorithm_matches_assignment_brute_force() {
    for seed in 0..200 {
        let mut rng = rng_from_seed(seed);
        let s2 = rng.gen_range(1..=5);
        let s1 = rng.gen_range(0..=s2);
        let p = random_two_stage_college(&mut rng, 3, 2, s1, s2).unwrap();
        let sol = opt_two_stage_college(&p).unwrap();
        assert_eq!(sol.divorce_count, college_divorces(&sol.a1, &sol.a2));
        let (_, best) = brute_force_college(&p, None).unwrap();
        assert_eq!(sol.divorce_count, best, "seed {seed}");
    }
}

#[test]
fn dynamic_program_matches_cartesian_product() {
    for seed in 0..150 {
        let mut rng = rng_from_seed(seed);
        let n = rng.gen_range(1..=4);
        let a = rng.gen_range(0..=n);
        let b = rng.gen_range(a..=n + 1);
        let c = rng.gen_range(b..=n + 1);
        let p = random_multistage(&mut rng, n, &[a, b, c]).unwrap();
        let sets: Vec<Vec<Matching>> = p.stages().iter().map(exhaustive).collect();
        let mut best = usize::MAX;
        let mut best_from_top = usize::MAX;
        let top = deferred_acceptance(&p.stages()[0], Proposers::Men);
        for x in &sets[0] {
            for y in &sets[1] {
                for z in &sets[2] {
                    let cost = divorces(x, y) + divorces(y, z);
                    best = best.min(cost);
                    if *x == top {
                        best_from_top = best_from_top.min(cost);
                    }
                }
            }
        }
        let dp = brute_force_multistage(&p, None).unwrap();
        assert_eq!(dp.total_divorces, best, "seed {seed}");
        assert_eq!(
            brute_force_multistage_from(&p, &top, None).unwrap().total_divorces,
            best_from_top
        );
        // Starting from the men-optimal matching never hurts the offline optimum.
        assert_eq!(best_from_top, best, "seed {seed}");

        let moved = iterate_dominance(&p, &dp.matchings, &top).unwrap();
        let cost = |s: &[Matching]| s.windows(2).map(|w| divorces(&w[0], &w[1])).sum::<usize>();
        assert!(cost(&moved) <= cost(&dp.matchings), "seed {seed}");
        for (inst, m) in p.stages().iter().zip(&moved) {
            assert!(is_stable(inst, m).unwrap());
        }
        assert!(greedy_chain(&p).unwrap().total_divorces >= best);
    }
}

#[test]
fn reductions_preserve_the_optimum() {
    for seed in 0..300 {
        let mut rng = rng_from_seed(seed);
        // Reductions add one woman per departing man; stay within exhaustive range.
        let n1 = rng.gen_range(1..=4);
        let n2 = rng.gen_range(0..=n1);
        let w2 = rng.gen_range(1..=4);
        let (p, reduced) = if seed % 2 == 0 {
            let p = random_men_leave(&mut rng, n1, n2, w2).unwrap();
            let r = reduce_leaving(&p).unwrap();
            (p, r)
        } else {
            let w1 = rng.gen_range(0..=w2);
            let p = random_leave_arrive(&mut rng, n1, n2, w1, w2).unwrap();
            let r = reduce_leave_arrive(&p).unwrap();
            (p, r)
        };
        let (rp, cert) = reduced;
        assert_eq!(
            brute_force_optimum(&p, None).unwrap().1,
            brute_force_optimum(&rp, None).unwrap().1,
            "seed {seed}"
        );
        // Projection maps the reduced second stage onto the original one.
        let projected: BTreeSet<Matching> = exhaustive(rp.stage2()).iter().map(|m| cert.project(m)).collect();
        assert_eq!(
            projected,
            exhaustive(p.stage2()).into_iter().collect::<BTreeSet<_>>(),
            "seed {seed}"
        );
    }
}

#[test]
fn cyclic_blocks_have_exactly_the_two_extreme_matchings() {
    for k in 2..=7 {
        let b = cyclic_block(k).unwrap();
        let all: BTreeSet<Matching> = exhaustive(&b).into_iter().collect();
        assert_eq!(
            all,
            BTreeSet::from([block_men_optimal(k), block_women_optimal(k)]),
            "k = {k}"
        );
    }
}

#[test]
fn adversary_figures() {
    for n in 3..=7 {
        let (s1, s2) = adversary_stages12(n).unwrap();
        assert_eq!(exhaustive(&s1).len(), 1);
        assert_eq!(exhaustive(&s2).len(), 2);

        let t = run_adversary_experiment(n, &mut Greedy).unwrap();
        assert_eq!(
            (t.case, t.alg_cost, t.opt_cost),
            (AdversaryCase::Case2, n as usize - 1, 1),
            "n = {n}"
        );
        assert_eq!(t.ratio, Ratio::Finite(n as f64 - 1.0));
        let t = run_adversary_experiment(n, &mut MenOptimal).unwrap();
        assert_eq!(t.case, AdversaryCase::Case1);
        assert!(t.alg_cost >= 1);
        assert_eq!((t.opt_cost, t.ratio), (0, Ratio::Unbounded));
        let t = run_adversary_experiment(n, &mut WomenOptimal).unwrap();
        assert_eq!(t.case, AdversaryCase::Case2);
        assert_eq!((t.alg_cost, t.opt_cost), (n as usize - 1, 1));

        // Whatever the second-round choice, the run ends up paying.
        let m1 = &exhaustive(&s1)[0];
        for choice in exhaustive(&s2) {
            let (case, s3) = adversary3(n, &choice).unwrap();
            let after = exhaustive(&s3);
            let alg = divorces(m1, &choice) + after.iter().map(|m| divorces(&choice, m)).min().unwrap();
            match case {
                AdversaryCase::Case1 => assert!(alg >= 1),
                AdversaryCase::Case2 => assert_eq!(alg, n as usize - 1),
            }
        }
    }
}
