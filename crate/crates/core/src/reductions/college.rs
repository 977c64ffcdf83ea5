//! Many-to-one college admission. Universities with capacity `c` become `c`
//! interchangeable seats, students rank the seats of a university in
//! ascending order, and seat-level matchings project back to assignments.
//! Moving between seats of one university is not a divorce.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, ManId, WomanId};
use crate::lattice::{deferred_acceptance, max_weight_stable, Proposers, WeightFn};
use crate::matching::Matching;
use crate::problem::{TwoStageProblem, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UniversityId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StudentId(pub u32);

impl fmt::Display for UniversityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Display for StudentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// Student to university. Unassigned students are absent.
pub type Assignment = BTreeMap<StudentId, UniversityId>;

#[derive(Clone, Debug, PartialEq, Eq)]
struct University {
    id: UniversityId,
    capacity: usize,
    prefs: Vec<StudentId>,
}

/// A validated college-admission market with complete strict preferences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollegeInstance {
    universities: Vec<University>,
    students: Vec<(StudentId, Vec<UniversityId>)>,
}

fn is_permutation<T: Ord + Copy>(list: &[T], roster: &BTreeSet<T>) -> bool {
    list.len() == roster.len() && list.iter().copied().collect::<BTreeSet<T>>() == *roster
}

impl CollegeInstance {
    pub fn new(
        universities: Vec<(UniversityId, usize, Vec<StudentId>)>,
        students: Vec<(StudentId, Vec<UniversityId>)>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let uset: BTreeSet<UniversityId> = universities.iter().map(|u| u.0).collect();
        let sset: BTreeSet<StudentId> = students.iter().map(|s| s.0).collect();
        if uset.len() != universities.len() {
            return bad("duplicate university".into());
        }
        if sset.len() != students.len() {
            return bad("duplicate student".into());
        }
        for (c, cap, list) in &universities {
            if *cap == 0 {
                return bad(format!("university {c} has capacity 0"));
            }
            if !is_permutation(list, &sset) {
                return bad(format!("preference list of {c} must rank every student exactly once"));
            }
        }
        for (s, list) in &students {
            if !is_permutation(list, &uset) {
                return bad(format!(
                    "preference list of {s} must rank every university exactly once"
                ));
            }
        }
        let mut universities: Vec<University> = universities
            .into_iter()
            .map(|(id, capacity, prefs)| University { id, capacity, prefs })
            .collect();
        universities.sort_by_key(|u| u.id);
        let mut students = students;
        students.sort_by_key(|s| s.0);
        Ok(CollegeInstance { universities, students })
    }

    pub fn universities(&self) -> impl Iterator<Item = UniversityId> + '_ {
        self.universities.iter().map(|u| u.id)
    }

    pub fn students(&self) -> impl Iterator<Item = StudentId> + '_ {
        self.students.iter().map(|s| s.0)
    }

    fn university(&self, c: UniversityId) -> Option<&University> {
        self.universities.iter().find(|u| u.id == c)
    }

    pub fn capacity(&self, c: UniversityId) -> Option<usize> {
        self.university(c).map(|u| u.capacity)
    }

    pub fn university_list(&self, c: UniversityId) -> Option<&[StudentId]> {
        self.university(c).map(|u| u.prefs.as_slice())
    }

    pub fn student_list(&self, s: StudentId) -> Option<&[UniversityId]> {
        self.students.iter().find(|x| x.0 == s).map(|x| x.1.as_slice())
    }

    fn university_rank(&self, c: UniversityId, s: StudentId) -> Option<usize> {
        self.university_list(c)?.iter().position(|&x| x == s)
    }

    fn student_rank(&self, s: StudentId, c: UniversityId) -> Option<usize> {
        self.student_list(s)?.iter().position(|&x| x == c)
    }
}

/// Correspondence between seats and the men of an expanded instance. Seats
/// are numbered from 1 in university order, then in seat order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeatMap {
    seats: Vec<(UniversityId, usize)>,
}

impl SeatMap {
    fn build(ci: &CollegeInstance) -> Self {
        let seats = ci
            .universities
            .iter()
            .flat_map(|u| (1..=u.capacity).map(move |j| (u.id, j)))
            .collect();
        SeatMap { seats }
    }

    pub fn len(&self) -> usize {
        self.seats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seats.is_empty()
    }

    /// University and seat number (from 1) behind an expanded man.
    pub fn seat_of(&self, m: ManId) -> Option<(UniversityId, usize)> {
        (m.0 as usize).checked_sub(1).and_then(|i| self.seats.get(i)).copied()
    }

    pub fn man_of(&self, c: UniversityId, seat: usize) -> Option<ManId> {
        self.seats
            .iter()
            .position(|&x| x == (c, seat))
            .map(|i| ManId(i as u32 + 1))
    }

    /// Men standing for the seats of `c`, in seat order.
    pub fn seats_of(&self, c: UniversityId) -> Vec<ManId> {
        (0..self.seats.len())
            .filter(|&i| self.seats[i].0 == c)
            .map(|i| ManId(i as u32 + 1))
            .collect()
    }
}

/// One-to-one expansion. Students keep their numbers as women.
pub fn expand_college(ci: &CollegeInstance) -> (Instance, SeatMap) {
    let map = SeatMap::build(ci);
    let woman = |s: StudentId| WomanId(s.0);
    let men = (0..map.len())
        .map(|i| {
            let (c, _) = map.seats[i];
            (
                ManId(i as u32 + 1),
                ci.university_list(c).unwrap().iter().map(|&s| woman(s)).collect(),
            )
        })
        .collect();
    let women = ci
        .students
        .iter()
        .map(|(s, list)| (woman(*s), list.iter().flat_map(|&c| map.seats_of(c)).collect()))
        .collect();
    let inst = Instance::new(men, women).expect("expansion of a valid college instance is valid");
    (inst, map)
}

pub fn project_assignment(map: &SeatMap, m: &Matching) -> Assignment {
    m.pairs()
        .filter_map(|(u, w)| map.seat_of(u).map(|(c, _)| (StudentId(w.0), c)))
        .collect()
}

/// Students assigned in `a1` whose university differs in `a2`.
pub fn college_divorces(a1: &Assignment, a2: &Assignment) -> usize {
    a1.iter().filter(|(s, c)| a2.get(s) != Some(c)).count()
}

/// Direct capacity-aware stability test, independent of the seat expansion.
/// False also when `a` mentions unknown persons or overfills a university.
pub fn is_stable_assignment(ci: &CollegeInstance, a: &Assignment) -> bool {
    let mut admitted: BTreeMap<UniversityId, Vec<StudentId>> = BTreeMap::new();
    for (&s, &c) in a {
        if ci.student_list(s).is_none() || ci.capacity(c).is_none() {
            return false;
        }
        admitted.entry(c).or_default().push(s);
    }
    for u in &ci.universities {
        let list = admitted.get(&u.id).map(Vec::as_slice).unwrap_or(&[]);
        if list.len() > u.capacity {
            return false;
        }
    }
    for (s, _) in &ci.students {
        let current = a.get(s).map(|&c| ci.student_rank(*s, c).unwrap()).unwrap_or(usize::MAX);
        for u in &ci.universities {
            if ci.student_rank(*s, u.id).unwrap() >= current {
                continue;
            }
            let list = admitted.get(&u.id).map(Vec::as_slice).unwrap_or(&[]);
            if list.len() < u.capacity {
                return false;
            }
            let mine = ci.university_rank(u.id, *s).unwrap();
            if list.iter().any(|&t| ci.university_rank(u.id, t).unwrap() > mine) {
                return false;
            }
        }
    }
    true
}

/// Every stable assignment, by trying all student-to-university maps.
/// Exponential; `cap` bounds the number of candidate maps.
pub fn enumerate_stable_assignments(ci: &CollegeInstance, cap: Option<usize>) -> Result<Vec<Assignment>> {
    let unis: Vec<UniversityId> = ci.universities().collect();
    let studs: Vec<StudentId> = ci.students().collect();
    let base = unis.len() + 1;
    let total = (0..studs.len()).try_fold(1usize, |acc, _| acc.checked_mul(base));
    if let Some(c) = cap {
        match total {
            Some(t) if t <= c => {}
            _ => {
                return Err(Error::CapExceeded {
                    cap: c,
                    found: total.unwrap_or(usize::MAX),
                })
            }
        }
    }
    let total = total.ok_or_else(|| Error::InvalidParameter("too many candidate assignments".into()))?;
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut a = Assignment::new();
        for &s in &studs {
            let pick = code % base;
            code /= base;
            if pick > 0 {
                a.insert(s, unis[pick - 1]);
            }
        }
        if is_stable_assignment(ci, &a) {
            out.push(a);
        }
    }
    Ok(out)
}

/// Two rounds of admission: universities and capacities fixed, students may
/// arrive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStageCollegeProblem {
    stage1: CollegeInstance,
    stage2: CollegeInstance,
}

impl TwoStageCollegeProblem {
    pub fn new(stage1: CollegeInstance, stage2: CollegeInstance) -> Result<Self> {
        let caps = |ci: &CollegeInstance| ci.universities.iter().map(|u| (u.id, u.capacity)).collect::<Vec<_>>();
        if caps(&stage1) != caps(&stage2) {
            return Err(Error::CollegeMismatch("universities or capacities differ".into()));
        }
        let s2: BTreeSet<StudentId> = stage2.students().collect();
        if let Some(s) = stage1.students().find(|s| !s2.contains(s)) {
            return Err(Error::CollegeMismatch(format!(
                "student {s} leaves after the first stage"
            )));
        }
        let p = TwoStageCollegeProblem { stage1, stage2 };
        p.expanded()?;
        Ok(p)
    }

    pub fn stage1(&self) -> &CollegeInstance {
        &self.stage1
    }

    pub fn stage2(&self) -> &CollegeInstance {
        &self.stage2
    }

    /// The seat-level arrival problem. Both stages share one seat map.
    pub fn expanded(&self) -> Result<(TwoStageProblem, SeatMap)> {
        let (i1, map) = expand_college(&self.stage1);
        let (i2, _) = expand_college(&self.stage2);
        Ok((TwoStageProblem::new(Variant::WomenArrive, i1, i2)?, map))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollegeSolution {
    pub a1: Assignment,
    pub a2: Assignment,
    pub divorce_count: usize,
}

impl CollegeSolution {
    pub fn new(a1: Assignment, a2: Assignment) -> Self {
        let divorce_count = college_divorces(&a1, &a2);
        CollegeSolution { a1, a2, divorce_count }
    }
}

/// Seat-optimal first round; second round maximizes the number of students
/// kept at their first-round university (weight 1 on each of its seats).
pub fn opt_two_stage_college(p: &TwoStageCollegeProblem) -> Result<CollegeSolution> {
    let (q, map) = p.expanded()?;
    let m1 = deferred_acceptance(q.stage1(), Proposers::Men);
    let a1 = project_assignment(&map, &m1);
    let mut f = WeightFn::new();
    for (&s, &c) in &a1 {
        for seat in map.seats_of(c) {
            f.set(seat, WomanId(s.0), 1);
        }
    }
    let m2 = max_weight_stable(q.stage2(), &f);
    Ok(CollegeSolution::new(a1, project_assignment(&map, &m2)))
}

/// Minimum assignment-level divorces over all pairs of stable assignments,
/// using [`enumerate_stable_assignments`] on each stage. `cap` is passed to
/// each enumeration.
pub fn brute_force_college(p: &TwoStageCollegeProblem, cap: Option<usize>) -> Result<(CollegeSolution, usize)> {
    let d1 = enumerate_stable_assignments(&p.stage1, cap)?;
    let d2 = enumerate_stable_assignments(&p.stage2, cap)?;
    let mut best: Option<(usize, &Assignment, &Assignment)> = None;
    for a in &d1 {
        for b in &d2 {
            let d = college_divorces(a, b);
            if best.is_none_or(|(x, _, _)| d < x) {
                best = Some((d, a, b));
            }
        }
    }
    let (d, a, b) = best.expect("every college instance has a stable assignment");
    Ok((CollegeSolution::new(a.clone(), b.clone()), d))
}
