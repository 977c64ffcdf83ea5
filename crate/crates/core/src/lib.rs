//! Online two-stage stable matching with a minimum number of divorces.
//!
//! The crate computes, for markets that change between two rounds (women
//! arriving, men leaving, or both, plus the many-to-one college variant),
//! a pair of stable matchings with the fewest broken pairs while choosing the
//! first matching without knowledge of the second round. Supporting pieces:
//! the stable-marriage lattice (deferred acceptance, rotations, maximum-weight
//! stable matching), difference graphs, instance reductions, exhaustive
//! oracles, and the three-stage adversary showing that no online algorithm is
//! competitive beyond two stages.

pub mod cli;
pub mod diff;
pub mod error;
pub mod generate;
pub mod instance;
pub mod lattice;
pub mod matching;
pub mod multistage;
pub mod problem;
pub mod reductions;
pub mod twostage;

pub use diff::{classify_components, diff_graph, Component, CycleKind, DiffGraph, Source};
pub use error::{Error, Result};
pub use instance::{Instance, ManId, ManLists, PersonId, Side, WomanId, WomanLists};
pub use lattice::{
    build_rotation_poset, deferred_acceptance, enumerate_stable, enumerate_stable_with, max_weight_stable, Backend,
    Proposers, Rotation, RotationPoset, WeightFn,
};
pub use matching::{blocking_pairs, divorces, ensure_stable, is_stable, Matching};
pub use multistage::{
    adversary3, adversary_stages12, brute_force_multistage, brute_force_multistage_from, cyclic_block, greedy_chain,
    iterate_dominance, policy_by_name, run_adversary_experiment, run_online, AdversaryCase, AdversaryTranscript,
    Greedy, MenOptimal, MultiStageSolution, OnlinePolicy, Ratio, WomenOptimal,
};
pub use problem::{MultiStageProblem, TwoStageProblem, Variant};
pub use reductions::{
    brute_force_college, college_divorces, enumerate_stable_assignments, expand_college, is_stable_assignment,
    opt_two_stage_college, project_assignment, reduce_leave_arrive, reduce_leaving, regularize, solve_two_stage,
    Assignment, CollegeInstance, CollegeSolution, ReductionCert, SeatMap, StudentId, TwoStageCollegeProblem,
    UniversityId,
};
pub use twostage::{
    brute_force_optimum, coherence_violations, dominance_transform, dominance_transform_lifted, is_regular,
    men_dominates, opt_two_stage, stage1_choice, stage2_choice, TwoStageSolution,
};
