//! Maximum-weight stable matching as a maximum-weight closed set of the
//! rotation poset, solved by a project-selection min cut.

use std::collections::{BTreeSet, HashMap};

use crate::instance::{Instance, ManId, WomanId};
use crate::matching::Matching;

use super::flow::FlowNetwork;
use super::rotation::build_rotation_poset;

/// Integer weights on man-woman pairs; unlisted pairs weigh 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightFn {
    weights: HashMap<(ManId, WomanId), i64>,
}

impl WeightFn {
    pub fn new() -> Self {
        Self::default()
    }

    /// Weight 1 on every pair of `m`, 0 elsewhere.
    pub fn indicator(m: &Matching) -> Self {
        let mut f = WeightFn::new();
        for (u, w) in m.pairs() {
            f.set(u, w, 1);
        }
        f
    }

    pub fn set(&mut self, u: ManId, w: WomanId, weight: i64) {
        if weight == 0 {
            self.weights.remove(&(u, w));
        } else {
            self.weights.insert((u, w), weight);
        }
    }

    pub fn get(&self, u: ManId, w: WomanId) -> i64 {
        self.weights.get(&(u, w)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((ManId, WomanId), i64)> + '_ {
        self.weights.iter().map(|(k, v)| (*k, *v))
    }

    pub fn weight_of(&self, m: &Matching) -> i64 {
        m.pairs().map(|(u, w)| self.get(u, w)).sum()
    }
}

impl FromIterator<((ManId, WomanId), i64)> for WeightFn {
    fn from_iter<I: IntoIterator<Item = ((ManId, WomanId), i64)>>(iter: I) -> Self {
        let mut f = WeightFn::new();
        for ((u, w), x) in iter {
            f.set(u, w, x);
        }
        f
    }
}

/// A stable matching of maximum total weight.
///
/// Starts from the men-optimal matching and eliminates the inclusion-minimal
/// maximum-weight closed set of rotations, so among optimal matchings the
/// one nearest the men-optimal end of the lattice is returned.
pub fn max_weight_stable(inst: &Instance, f: &WeightFn) -> Matching {
    let poset = build_rotation_poset(inst);
    let k = poset.len();
    let deltas: Vec<i64> = poset
        .rotations()
        .iter()
        .map(|r| r.weight_delta(|u, w| f.get(u, w)))
        .collect();
    let (s, t) = (k, k + 1);
    let inf = deltas.iter().map(|d| d.abs()).sum::<i64>() + 1;
    let mut net = FlowNetwork::new(k + 2);
    for (v, &d) in deltas.iter().enumerate() {
        if d > 0 {
            net.add_arc(s, v, d);
        } else if d < 0 {
            net.add_arc(v, t, -d);
        }
    }
    for (a, b) in poset.precedence() {
        // choosing b forces its predecessor a
        net.add_arc(b, a, inf);
    }
    net.max_flow(s, t);
    let side = net.source_side(s);
    let chosen: BTreeSet<usize> = (0..k).filter(|&v| side[v]).collect();
    poset.matching_of(&chosen)
}
