//! Dinic max-flow on integer capacities, with source-side min-cut recovery.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    cap: i64,
    rev: usize,
}

pub(crate) struct FlowNetwork {
    graph: Vec<Vec<Arc>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            graph: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) {
        debug_assert!(cap >= 0);
        let (rf, rt) = (self.graph[to].len(), self.graph[from].len());
        self.graph[from].push(Arc { to, cap, rev: rf });
        self.graph[to].push(Arc {
            to: from,
            cap: 0,
            rev: rt,
        });
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for a in &self.graph[v] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[v] + 1;
                    q.push_back(a.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, f: i64) -> i64 {
        if v == t {
            return f;
        }
        while self.iter[v] < self.graph[v].len() {
            let a = self.graph[v][self.iter[v]];
            if a.cap > 0 && self.level[v] < self.level[a.to] {
                let d = self.dfs(a.to, t, f.min(a.cap));
                if d > 0 {
                    self.graph[v][self.iter[v]].cap -= d;
                    self.graph[a.to][a.rev].cap += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }

    /// Vertices reachable from `s` in the residual graph. After `max_flow`
    /// this is the inclusion-minimal source side over all minimum cuts.
    pub fn source_side(&mut self, s: usize) -> Vec<bool> {
        self.bfs(s);
        self.level.iter().map(|&l| l >= 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_network() {
        let mut g = FlowNetwork::new(4);
        g.add_arc(0, 1, 3);
        g.add_arc(0, 2, 2);
        g.add_arc(1, 2, 1);
        g.add_arc(1, 3, 2);
        g.add_arc(2, 3, 3);
        assert_eq!(g.max_flow(0, 3), 5);
        assert_eq!(g.source_side(0), vec![true, false, false, false]);
    }

    #[test]
    fn bottleneck_cut() {
        let mut g = FlowNetwork::new(4);
        g.add_arc(0, 1, 10);
        g.add_arc(1, 2, 1);
        g.add_arc(2, 3, 10);
        assert_eq!(g.max_flow(0, 3), 1);
        assert_eq!(g.source_side(0), vec![true, true, false, false]);
    }
}
