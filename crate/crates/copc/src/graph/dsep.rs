//! d-separation on DAGs via the reachability algorithm: a path is blocked at
//! a non-collider inside the conditioning set and at a collider whose
//! descendants (itself included) all avoid it.

use super::Pdag;

impl Pdag {
    /// Ancestors of every vertex in `of`, including the vertices themselves.
    pub fn ancestors_of_set(&self, of: &[usize]) -> Vec<bool> {
        let mut anc = vec![false; self.n()];
        let mut stack: Vec<usize> = Vec::new();
        for &v in of {
            if !anc[v] {
                anc[v] = true;
                stack.push(v);
            }
        }
        while let Some(v) = stack.pop() {
            for p in self.parents(v) {
                if !anc[p] {
                    anc[p] = true;
                    stack.push(p);
                }
            }
        }
        anc
    }

    /// Are `x` and `y` d-separated given `s` in this DAG? Only directed marks
    /// are considered; callers must pass an acyclic directed graph with
    /// `x != y` and neither endpoint inside `s`.
    pub fn d_separated(&self, x: usize, y: usize, s: &[usize]) -> bool {
        assert_ne!(x, y, "d-separation needs distinct endpoints");
        assert!(
            !s.contains(&x) && !s.contains(&y),
            "endpoints must not be conditioned on"
        );
        let n = self.n();
        let mut in_s = vec![false; n];
        for &v in s {
            in_s[v] = true;
        }
        let anc_s = self.ancestors_of_set(s);

        // State (v, dir): dir = true when the trail reaches v against an
        // arrow (from a child), false when along an arrow (from a parent).
        let mut visited = vec![[false; 2]; n];
        let mut stack: Vec<(usize, bool)> = vec![(x, true)];
        while let Some((v, up)) = stack.pop() {
            if visited[v][up as usize] {
                continue;
            }
            visited[v][up as usize] = true;
            if v == y {
                return false;
            }
            if up {
                if !in_s[v] {
                    for p in self.parents(v) {
                        stack.push((p, true));
                    }
                    for c in self.children(v) {
                        stack.push((c, false));
                    }
                }
            } else {
                if !in_s[v] {
                    for c in self.children(v) {
                        stack.push((c, false));
                    }
                }
                if anc_s[v] {
                    // Collider at v opened by the conditioning set.
                    for p in self.parents(v) {
                        stack.push((p, true));
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Vertex;
    use itertools::Itertools;

    fn dag(n: usize, edges: &[(usize, usize)]) -> Pdag {
        let vs = (0..n)
            .map(|i| Vertex::new(i, format!("X{i}"), 1))
            .collect();
        let mut g = Pdag::new(vs).unwrap();
        for &(u, v) in edges {
            g.set_directed(u, v);
        }
        g
    }

    /// Brute-force oracle: enumerate every simple path between x and y and
    /// check the blocking conditions triple by triple.
    fn d_separated_oracle(g: &Pdag, x: usize, y: usize, s: &[usize]) -> bool {
        fn paths(g: &Pdag, from: usize, to: usize) -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut path = vec![from];
            let mut on_path = vec![false; g.n()];
            on_path[from] = true;
            fn rec(
                g: &Pdag,
                to: usize,
                path: &mut Vec<usize>,
                on_path: &mut Vec<bool>,
                out: &mut Vec<Vec<usize>>,
            ) {
                let last = *path.last().unwrap();
                if last == to {
                    out.push(path.clone());
                    return;
                }
                for v in g.adjacencies(last) {
                    if !on_path[v] {
                        on_path[v] = true;
                        path.push(v);
                        rec(g, to, path, on_path, out);
                        path.pop();
                        on_path[v] = false;
                    }
                }
            }
            rec(g, to, &mut path, &mut on_path, &mut out);
            out
        }

        let anc_s = g.ancestors_of_set(s);
        for path in paths(g, x, y) {
            let mut blocked = false;
            for w in path.windows(3) {
                let (a, m, b) = (w[0], w[1], w[2]);
                let collider = g.has_directed(a, m) && g.has_directed(b, m);
                if collider {
                    if !anc_s[m] {
                        blocked = true;
                        break;
                    }
                } else if s.contains(&m) {
                    blocked = true;
                    break;
                }
            }
            if !blocked {
                return false;
            }
        }
        true
    }

    #[test]
    fn chain_blocked_by_middle() {
        let g = dag(3, &[(0, 2), (2, 1)]);
        assert!(g.d_separated(0, 1, &[2]));
        assert!(!g.d_separated(0, 1, &[]));
    }

    #[test]
    fn collider_opens_when_conditioned() {
        let g = dag(3, &[(0, 2), (1, 2)]);
        assert!(g.d_separated(0, 1, &[]));
        assert!(!g.d_separated(0, 1, &[2]));
    }

    #[test]
    fn collider_descendant_opens_path() {
        // X -> Z <- Y, Z -> W: conditioning on W opens the collider.
        let g = dag(4, &[(0, 2), (1, 2), (2, 3)]);
        assert!(g.d_separated(0, 1, &[]));
        assert!(!g.d_separated(0, 1, &[3]));
    }

    #[test]
    fn five_node_chain_with_collider() {
        // Xi -> Xj -> Xk -> Xm <- Xl: the collider at Xm closes Xi .. Xl.
        let g = dag(5, &[(0, 1), (1, 2), (2, 3), (4, 3)]);
        assert!(g.d_separated(0, 4, &[]));
        assert!(!g.d_separated(0, 4, &[3]));
        assert!(!g.d_separated(0, 3, &[]));
    }

    #[test]
    fn agrees_with_path_enumeration_oracle_exhaustively() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..40 {
            let n = 4 + (trial % 4); // 4..=7 nodes
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = dag(n, &edges);
            for x in 0..n {
                for y in (x + 1)..n {
                    let rest: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
                    for k in 0..=rest.len() {
                        for s in rest.iter().copied().combinations(k) {
                            assert_eq!(
                                g.d_separated(x, y, &s),
                                d_separated_oracle(&g, x, y, &s),
                                "graph {g:?}, x={x}, y={y}, s={s:?}"
                            );
                        }
                    }
                }
            }
        }
    }
}
