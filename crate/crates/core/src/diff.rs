//! Difference graphs of two matchings and the path/cycle classification
//! that holds when the two matchings are stable in consecutive stages.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, ManId, PersonId, Side, WomanId};
use crate::matching::Matching;

/// Which input matching an edge comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Source {
    First,
    Second,
}

/// Cycle orientation relative to the (first, second) roles.
///
/// `TypeI`: every man prefers his partner in the second matching and every
/// woman her partner in the first. `TypeII`: the reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CycleKind {
    TypeI,
    TypeII,
}

/// `edges[k]` joins `vertices[k]` and `vertices[k + 1]` (wrapping for cycles).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Component {
    Path {
        vertices: Vec<PersonId>,
        edges: Vec<Source>,
    },
    Cycle {
        vertices: Vec<PersonId>,
        edges: Vec<Source>,
        kind: Option<CycleKind>,
    },
}

impl Component {
    pub fn vertices(&self) -> &[PersonId] {
        match self {
            Component::Path { vertices, .. } | Component::Cycle { vertices, .. } => vertices,
        }
    }

    pub fn edges(&self) -> &[Source] {
        match self {
            Component::Path { edges, .. } | Component::Cycle { edges, .. } => edges,
        }
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self, Component::Cycle { .. })
    }

    /// Edges as (man, woman, source) triples in traversal order.
    pub fn edge_pairs(&self) -> Vec<(ManId, WomanId, Source)> {
        let v = self.vertices();
        let n = v.len();
        self.edges()
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let (a, b) = (v[k], v[(k + 1) % n]);
                let (man, woman) = if a.side == Side::Man { (a, b) } else { (b, a) };
                (ManId(man.index), WomanId(woman.index), *s)
            })
            .collect()
    }
}

/// Non-isolated components of the graph whose edge set is `M △ M'`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiffGraph {
    pub components: Vec<Component>,
}

impl DiffGraph {
    pub fn paths(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| !c.is_cycle())
    }

    pub fn cycles(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.is_cycle())
    }

    pub fn edge_count(&self) -> usize {
        self.components.iter().map(|c| c.edges().len()).sum()
    }
}

type Adjacency = BTreeMap<PersonId, Vec<(PersonId, Source)>>;

fn adjacency(m: &Matching, m_prime: &Matching) -> Adjacency {
    let mut adj: Adjacency = BTreeMap::new();
    let mut add = |u: ManId, w: WomanId, s: Source| {
        adj.entry(u.into()).or_default().push((w.into(), s));
        adj.entry(w.into()).or_default().push((u.into(), s));
    };
    for (u, w) in m.pairs().filter(|&(u, w)| !m_prime.contains(u, w)) {
        add(u, w, Source::First);
    }
    for (u, w) in m_prime.pairs().filter(|&(u, w)| !m.contains(u, w)) {
        add(u, w, Source::Second);
    }
    adj
}

/// Walks from `start` along the edge leaving with source `first`, alternating,
/// until it reaches an end or comes back to `start`.
fn walk(adj: &Adjacency, start: PersonId, first: Source) -> (Vec<PersonId>, Vec<Source>, bool) {
    let mut vertices = vec![start];
    let mut edges = Vec::new();
    let mut cur = start;
    let mut want = first;
    loop {
        let next = adj[&cur].iter().find(|(_, s)| *s == want).copied();
        let Some((v, s)) = next else {
            return (vertices, edges, false);
        };
        edges.push(s);
        if v == start {
            return (vertices, edges, true);
        }
        vertices.push(v);
        cur = v;
        want = match want {
            Source::First => Source::Second,
            Source::Second => Source::First,
        };
    }
}

/// Decomposes `m △ m_prime` into alternating paths and cycles.
///
/// Paths start at their smaller endpoint in (side, index) order. Cycles start
/// at their smallest man and leave him along his `m` edge. Components are
/// listed by first vertex. Persons untouched by the symmetric difference are
/// omitted.
pub fn diff_graph(m: &Matching, m_prime: &Matching) -> DiffGraph {
    let adj = adjacency(m, m_prime);
    let mut seen: BTreeSet<PersonId> = BTreeSet::new();
    let mut components = Vec::new();
    for (&v, nbrs) in &adj {
        if nbrs.len() == 1 && !seen.contains(&v) {
            let (vertices, edges, _) = walk(&adj, v, nbrs[0].1);
            seen.extend(vertices.iter().copied());
            components.push(Component::Path { vertices, edges });
        }
    }
    for &v in adj.keys() {
        if seen.contains(&v) {
            continue;
        }
        // every remaining vertex has degree 2; the smallest one is a man
        let (vertices, edges, closed) = walk(&adj, v, Source::First);
        debug_assert!(closed);
        seen.extend(vertices.iter().copied());
        components.push(Component::Cycle {
            vertices,
            edges,
            kind: None,
        });
    }
    components.sort_by_key(|c| c.vertices()[0]);
    DiffGraph { components }
}

/// Builds `G(m1, m2)` and tags every cycle `TypeI` or `TypeII`, checking the
/// structure that stability forces: each cycle is uniformly one of the two
/// kinds, each path starts and ends with an `m2` edge, and the internal
/// vertices of a path follow the `TypeI` pattern.
///
/// `inst` must contain every person of both matchings (the later stage).
pub fn classify_components(inst: &Instance, m1: &Matching, m2: &Matching) -> Result<DiffGraph> {
    m1.check_against(inst)?;
    m2.check_against(inst)?;
    let mut g = diff_graph(m1, m2);
    for comp in &mut g.components {
        match comp {
            Component::Cycle { vertices, kind, .. } => {
                let mut pattern = None;
                for &v in vertices.iter() {
                    let p = prefers_second(inst, m1, m2, v);
                    match pattern {
                        None => pattern = Some(p),
                        Some(q) if q != p => {
                            return Err(Error::StructureViolation(format!(
                                "cycle through {} mixes type I and type II preferences at {v}",
                                vertices[0]
                            )))
                        }
                        _ => {}
                    }
                }
                *kind = Some(if pattern == Some(true) {
                    CycleKind::TypeI
                } else {
                    CycleKind::TypeII
                });
            }
            Component::Path { vertices, edges } => {
                if edges[0] != Source::Second || edges[edges.len() - 1] != Source::Second {
                    return Err(Error::StructureViolation(format!(
                        "path starting at {} has an extremal edge outside the second matching",
                        vertices[0]
                    )));
                }
                for &v in &vertices[1..vertices.len() - 1] {
                    if !prefers_second(inst, m1, m2, v) {
                        return Err(Error::StructureViolation(format!(
                            "internal path vertex {v} breaks the type I preference pattern"
                        )));
                    }
                }
            }
        }
    }
    Ok(g)
}

/// True if `v` matches the type I pattern: a man preferring his `m2` partner,
/// or a woman preferring her `m1` partner. `v` must be matched in both.
fn prefers_second(inst: &Instance, m1: &Matching, m2: &Matching, v: PersonId) -> bool {
    match v.side {
        Side::Man => {
            let u = ManId(v.index);
            let (a, b) = (m1.wife(u).unwrap(), m2.wife(u).unwrap());
            inst.man_rank(u, b).unwrap() < inst.man_rank(u, a).unwrap()
        }
        Side::Woman => {
            let w = WomanId(v.index);
            let (a, b) = (m1.husband(w).unwrap(), m2.husband(w).unwrap());
            inst.woman_rank(w, a).unwrap() < inst.woman_rank(w, b).unwrap()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_matchings_have_no_components() {
        let m = Matching::of(&[(1, 1), (2, 2)]);
        assert!(diff_graph(&m, &m).components.is_empty());
    }

    #[test]
    fn single_alternation_is_a_path() {
        let g = diff_graph(&Matching::of(&[(1, 1)]), &Matching::of(&[(1, 2)]));
        assert_eq!(
            g.components,
            vec![Component::Path {
                vertices: vec![PersonId::woman(1), PersonId::man(1), PersonId::woman(2)],
                edges: vec![Source::First, Source::Second],
            }]
        );
    }

    #[test]
    fn cycle_starts_at_smallest_man_along_first_edge() {
        let m = Matching::of(&[(1, 1), (2, 2), (3, 3)]);
        let mp = Matching::of(&[(2, 1), (3, 2), (1, 3)]);
        let g = diff_graph(&m, &mp);
        assert_eq!(g.components.len(), 1);
        let c = &g.components[0];
        assert!(c.is_cycle());
        assert_eq!(
            c.vertices(),
            &[
                PersonId::man(1),
                PersonId::woman(1),
                PersonId::man(2),
                PersonId::woman(2),
                PersonId::man(3),
                PersonId::woman(3)
            ]
        );
        assert_eq!(c.edges()[0], Source::First);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn mixed_cycle_is_a_structure_violation() {
        // u1 prefers w2, u2 prefers w2: the swap cycle cannot be uniform
        let inst = Instance::from_indices(vec![vec![1, 0], vec![1, 0]], vec![vec![0, 1], vec![0, 1]]).unwrap();
        let m1 = Matching::of(&[(0, 0), (1, 1)]);
        let m2 = Matching::of(&[(0, 1), (1, 0)]);
        assert!(matches!(
            classify_components(&inst, &m1, &m2),
            Err(Error::StructureViolation(_))
        ));
    }

    #[test]
    fn path_ending_in_first_edge_is_rejected() {
        let inst = Instance::from_indices(vec![vec![0, 1]], vec![vec![0], vec![0]]).unwrap();
        let m1 = Matching::of(&[(0, 0)]);
        let m2 = Matching::of(&[(0, 1)]);
        assert!(matches!(
            classify_components(&inst, &m1, &m2),
            Err(Error::StructureViolation(_))
        ));
    }
}
