//! Acceptance suite. Every criterion is an exact comparison against an
//! independent oracle (exhaustive enumeration of stable matchings or of
//! assignments); a single mismatch fails it. Prints one line per criterion
//! and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use stagematch::generate::{
    random_instance, random_leave_arrive, random_men_leave, random_multistage, random_two_stage_college,
    random_women_arrive, rng_from_seed,
};
use stagematch::{
    brute_force_college, brute_force_multistage, brute_force_multistage_from, brute_force_optimum, classify_components,
    coherence_violations, cyclic_block, deferred_acceptance, dominance_transform, enumerate_stable,
    enumerate_stable_with, is_stable, iterate_dominance, max_weight_stable, men_dominates, opt_two_stage,
    opt_two_stage_college, run_adversary_experiment, solve_two_stage, AdversaryCase, Backend, Greedy, ManId, Matching,
    MenOptimal, Proposers, TwoStageProblem, WeightFn, WomanId, WomenOptimal,
};

struct Outcome {
    checked: usize,
    failures: Vec<String>,
}

impl Outcome {
    fn from_items(items: Vec<(usize, Vec<String>)>) -> Self {
        Outcome {
            checked: items.iter().map(|x| x.0).sum(),
            failures: items.into_iter().flat_map(|x| x.1).collect(),
        }
    }
}

/// Runs `f(seed)` for `count` consecutive seeds in parallel. `f` returns
/// how many checks it made and what went wrong.
fn corpus(base: u64, count: u64, f: impl Fn(u64) -> (usize, Vec<String>) + Sync + Send) -> Outcome {
    Outcome::from_items((base..base + count).into_par_iter().map(f).collect())
}

fn stable_set(inst: &stagematch::Instance) -> Vec<Matching> {
    enumerate_stable_with(inst, Backend::Exhaustive, None).expect("small instance")
}

fn two_stage_optimality() -> Outcome {
    corpus(1_000_000, 1000, |seed| {
        let mut rng = rng_from_seed(seed);
        let n = rng.gen_range(1..=6);
        let w2 = rng.gen_range(1..=6);
        let w1 = rng.gen_range(0..=w2);
        let p = random_women_arrive(&mut rng, n, w1, w2).unwrap();
        let ours = opt_two_stage(&p).unwrap();
        let (_, best) = brute_force_optimum(&p, None).unwrap();
        let mut bad = Vec::new();
        if ours.divorce_count != best {
            bad.push(format!(
                "seed {seed}: algorithm {} vs optimum {best}",
                ours.divorce_count
            ));
        }
        if !is_stable(p.stage1(), &ours.m1).unwrap() || !is_stable(p.stage2(), &ours.m2).unwrap() {
            bad.push(format!("seed {seed}: unstable output"));
        }
        (1, bad)
    })
}

fn reductions_optimality() -> Outcome {
    corpus(2_000_000, 1000, |seed| {
        let mut rng = rng_from_seed(seed);
        let n1 = rng.gen_range(1..=6);
        let n2 = rng.gen_range(0..=n1);
        let p = if seed % 2 == 0 {
            let w = rng.gen_range(1..=6);
            random_men_leave(&mut rng, n1, n2, w).unwrap()
        } else {
            let w2 = rng.gen_range(1..=6);
            let w1 = rng.gen_range(0..=w2);
            random_leave_arrive(&mut rng, n1, n2, w1, w2).unwrap()
        };
        let ours = solve_two_stage(&p).unwrap();
        let (_, best) = brute_force_optimum(&p, None).unwrap();
        let mut bad = Vec::new();
        if ours.divorce_count != best {
            bad.push(format!(
                "seed {seed} ({}): algorithm {} vs optimum {best}",
                p.variant(),
                ours.divorce_count
            ));
        }
        if !is_stable(p.stage1(), &ours.m1).unwrap() || !is_stable(p.stage2(), &ours.m2).unwrap() {
            bad.push(format!("seed {seed}: unstable output"));
        }
        (1, bad)
    })
}

fn regular_problem(seed: u64) -> TwoStageProblem {
    let mut rng = rng_from_seed(seed);
    let n = rng.gen_range(1..=6);
    let w1 = rng.gen_range(0..=n);
    random_women_arrive(&mut rng, n, w1, n).unwrap()
}

fn dominance_property() -> Outcome {
    corpus(3_000_000, 1000, |seed| {
        let p = regular_problem(seed);
        let (d1, d2) = (stable_set(p.stage1()), stable_set(p.stage2()));
        let mut bad = Vec::new();
        let mut checked = 0;
        for m1 in &d1 {
            for m1p in d1.iter().filter(|m| men_dominates(p.stage1(), m, m1)) {
                for m2 in &d2 {
                    checked += 1;
                    match dominance_transform(&p, m1, m2, m1p) {
                        Ok(out) => {
                            let stable = is_stable(p.stage2(), &out).unwrap();
                            let fewer = stagematch::divorces(m1p, &out) <= stagematch::divorces(m1, m2);
                            if !stable || !fewer {
                                bad.push(format!("seed {seed}: stable {stable}, inequality {fewer}"));
                            }
                        }
                        Err(e) => bad.push(format!("seed {seed}: {e}")),
                    }
                }
            }
        }
        (checked, bad)
    })
}

fn coherence() -> Outcome {
    // random problems with at most 5 men and 5 women, every stable pair
    let random = corpus(4_000_000, 1000, |seed| {
        let mut rng = rng_from_seed(seed);
        let n = rng.gen_range(1..=5);
        let w2 = rng.gen_range(1..=5);
        let w1 = rng.gen_range(0..=w2);
        check_coherence(&random_women_arrive(&mut rng, n, w1, w2).unwrap(), seed)
    });
    // every preference profile with up to 3 men and 3 women, every first-stage roster
    let shapes = [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (1, 3), (3, 1)];
    let exhaustive: Vec<(usize, Vec<String>)> = shapes
        .iter()
        .flat_map(|&(n, k)| {
            let (pm, pw) = (permutations(k), permutations(n));
            let total = (pm.len() as u64).pow(n as u32) * (pw.len() as u64).pow(k as u32);
            (0..total).map(move |code| (n, k, code))
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(n, k, code)| {
            let (pm, pw) = (permutations(k), permutations(n));
            let mut c = code;
            let mut take = |perms: &Vec<Vec<u32>>| {
                let v = perms[(c % perms.len() as u64) as usize].clone();
                c /= perms.len() as u64;
                v
            };
            let ml: Vec<Vec<u32>> = (0..n).map(|_| take(&pm)).collect();
            let wl: Vec<Vec<u32>> = (0..k).map(|_| take(&pw)).collect();
            let s2 = stagematch::Instance::from_indices(ml, wl).unwrap();
            let men: Vec<ManId> = (0..n as u32).map(ManId).collect();
            let mut checked = 0;
            let mut bad = Vec::new();
            for mask in 0..(1u32 << k) {
                let roster: Vec<WomanId> = (0..k as u32).filter(|j| mask >> j & 1 == 1).map(WomanId).collect();
                let s1 = s2.restrict(&men, &roster).unwrap();
                let p = TwoStageProblem::new(stagematch::Variant::WomenArrive, s1, s2.clone()).unwrap();
                let (c, b) = check_coherence(&p, code);
                checked += c;
                bad.extend(b);
            }
            (checked, bad)
        })
        .collect();
    let mut out = random;
    let more = Outcome::from_items(exhaustive);
    out.checked += more.checked;
    out.failures.extend(more.failures);
    out
}

fn permutations(k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, (k - 1) as u32);
            out.push(v);
        }
    }
    out
}

fn check_coherence(p: &TwoStageProblem, tag: u64) -> (usize, Vec<String>) {
    let (d1, d2) = (stable_set(p.stage1()), stable_set(p.stage2()));
    let mut bad = Vec::new();
    for m1 in &d1 {
        for m2 in &d2 {
            let v = coherence_violations(p, m1, m2);
            if !v.is_empty() {
                bad.push(format!("problem {tag}: {m1} -> {m2} breaks {v:?}"));
            }
        }
    }
    (d1.len() * d2.len(), bad)
}

fn structure() -> Outcome {
    corpus(3_000_000, 1000, |seed| {
        let p = regular_problem(seed);
        let (d1, d2) = (stable_set(p.stage1()), stable_set(p.stage2()));
        let mut bad = Vec::new();
        for m1 in &d1 {
            for m2 in &d2 {
                if let Err(e) = classify_components(p.stage2(), m1, m2) {
                    bad.push(format!("seed {seed}: {e}"));
                }
            }
        }
        (d1.len() * d2.len(), bad)
    })
}

fn lower_bound() -> Outcome {
    let mut items = Vec::new();
    for n in 3..=7u32 {
        let mut bad = Vec::new();
        let h = run_adversary_experiment(n, &mut MenOptimal).unwrap();
        if h.case != AdversaryCase::Case1 || h.opt_cost != 0 || h.alg_cost < 1 {
            bad.push(format!(
                "n {n}, case 1: {:?} alg {} opt {}",
                h.case, h.alg_cost, h.opt_cost
            ));
        }
        for f in [
            run_adversary_experiment(n, &mut Greedy).unwrap(),
            run_adversary_experiment(n, &mut WomenOptimal).unwrap(),
        ] {
            if f.case != AdversaryCase::Case2 || f.opt_cost != 1 || f.alg_cost != (n - 1) as usize {
                bad.push(format!(
                    "n {n}, case 2 ({}): alg {} opt {}",
                    f.policy, f.alg_cost, f.opt_cost
                ));
            }
        }
        items.push((3, bad));
    }
    Outcome::from_items(items)
}

fn multistage_dominance() -> Outcome {
    corpus(5_000_000, 300, |seed| {
        let mut rng = rng_from_seed(seed);
        let n = rng.gen_range(1..=5);
        let a = rng.gen_range(0..=5);
        let b = rng.gen_range(a..=5);
        let c = rng.gen_range(b.max(1)..=5);
        let p = random_multistage(&mut rng, n, &[a, b, c]).unwrap();
        let mut bad = Vec::new();
        let free = brute_force_multistage(&p, None).unwrap().total_divorces;
        let men_opt = deferred_acceptance(&p.stages()[0], Proposers::Men);
        let pinned = brute_force_multistage_from(&p, &men_opt, None).unwrap().total_divorces;
        if pinned != free {
            bad.push(format!("seed {seed}: optimum {free}, from men-optimal {pinned}"));
        }
        let sets: Vec<Vec<Matching>> = p.stages().iter().map(stable_set).collect();
        let mut checked = 1;
        for m1 in &sets[0] {
            for m2 in &sets[1] {
                for m3 in &sets[2] {
                    let seq = vec![m1.clone(), m2.clone(), m3.clone()];
                    let cost = stagematch::MultiStageSolution::new(seq.clone()).total_divorces;
                    for m1p in sets[0].iter().filter(|m| men_dominates(&p.stages()[0], m, m1)) {
                        checked += 1;
                        match iterate_dominance(&p, &seq, m1p) {
                            Ok(out) => {
                                let ok = out.iter().zip(p.stages()).all(|(m, s)| is_stable(s, m).unwrap());
                                let new = stagematch::MultiStageSolution::new(out).total_divorces;
                                if !ok || new > cost {
                                    bad.push(format!("seed {seed}: stable {ok}, cost {new} > {cost}"));
                                }
                            }
                            Err(e) => bad.push(format!("seed {seed}: {e}")),
                        }
                    }
                }
            }
        }
        (checked, bad)
    })
}

fn mwsm() -> Outcome {
    corpus(6_000_000, 1000, |seed| {
        let mut rng = rng_from_seed(seed);
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=6);
        let inst = random_instance(&mut rng, n, k);
        let mut f = WeightFn::new();
        for u in inst.men() {
            for w in inst.women() {
                f.set(*u, *w, rng.gen_range(-5..=5));
            }
        }
        let weight = |m: &Matching| m.pairs().map(|(u, w)| f.get(u, w)).sum::<i64>();
        let best = stable_set(&inst).iter().map(weight).max().unwrap();
        let ours = max_weight_stable(&inst, &f);
        let mut bad = Vec::new();
        if !is_stable(&inst, &ours).unwrap() || weight(&ours) != best {
            bad.push(format!("seed {seed}: weight {} vs maximum {best}", weight(&ours)));
        }
        (1, bad)
    })
}

fn cyclic_cardinality() -> Outcome {
    let items = (2..=7u32)
        .map(|k| {
            let b = cyclic_block(k).unwrap();
            let rot = enumerate_stable(&b, None).unwrap().len();
            let exh = stable_set(&b).len();
            let bad = if rot == 2 && exh == 2 {
                vec![]
            } else {
                vec![format!("k {k}: {rot} (rotations), {exh} (exhaustive)")]
            };
            (1, bad)
        })
        .collect();
    Outcome::from_items(items)
}

fn college() -> Outcome {
    corpus(7_000_000, 300, |seed| {
        let mut rng = rng_from_seed(seed);
        let unis = rng.gen_range(1..=3);
        let cap = rng.gen_range(1..=2);
        let s2 = rng.gen_range(1..=5);
        let s1 = rng.gen_range(0..=s2);
        let p = random_two_stage_college(&mut rng, unis, cap, s1, s2).unwrap();
        let ours = opt_two_stage_college(&p).unwrap();
        let (_, best) = brute_force_college(&p, None).unwrap();
        let mut bad = Vec::new();
        if ours.divorce_count != best {
            bad.push(format!(
                "seed {seed}: algorithm {} vs optimum {best}",
                ours.divorce_count
            ));
        }
        if !stagematch::is_stable_assignment(p.stage1(), &ours.a1)
            || !stagematch::is_stable_assignment(p.stage2(), &ours.a2)
        {
            bad.push(format!("seed {seed}: unstable assignment"));
        }
        (1, bad)
    })
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "two-stage arrivals: algorithm equals brute-force optimum",
            two_stage_optimality,
        ),
        (
            "departures via reductions: algorithm equals brute-force optimum",
            reductions_optimality,
        ),
        ("dominance transform: stable and no more divorces", dominance_property),
        ("coherence of matched men and single women", coherence),
        ("difference-graph structure on regular problems", structure),
        ("three-stage adversary figures", lower_bound),
        ("men-optimal start and iterated dominance", multistage_dominance),
        ("maximum-weight stable matching equals enumeration maximum", mwsm),
        ("cyclic block has exactly two stable matchings", cyclic_cardinality),
        ("college admission: algorithm equals brute-force optimum", college),
    ];
    let mut all_ok = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let ok = out.failures.is_empty();
        all_ok &= ok;
        println!(
            "criterion {:>2}: {} - {name} ({} checks, {} failures, {:.1}s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            out.checked,
            out.failures.len(),
            start.elapsed().as_secs_f64()
        );
        for f in out.failures.iter().take(5) {
            println!("    {f}");
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
