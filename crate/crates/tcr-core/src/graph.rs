//! Small directed-graph utilities shared by the constraint and coordination
//! modules: Tarjan strongly connected components, condensation and boolean
//! reachability closure. All graphs here are adjacency lists over `0..n`.

use alloc::vec;
use alloc::vec::Vec;

/// Tarjan SCC. Components are returned in reverse topological order and each
/// component's vertex list is sorted ascending for determinism.
pub fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut state = Tarjan {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![usize::MAX; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.idx[v] == usize::MAX {
            state.connect(v, adj);
        }
    }
    for comp in &mut state.comps {
        comp.sort_unstable();
    }
    state.comps
}

struct Tarjan {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<usize>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

impl Tarjan {
    // Iterative to keep stack depth independent of graph size.
    fn connect(&mut self, root: usize, adj: &[Vec<usize>]) {
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next == 0 {
                self.idx[v] = self.index;
                self.low[v] = self.index;
                self.index += 1;
                self.stack.push(v);
                self.on_stack[v] = true;
            }
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if self.idx[w] == usize::MAX {
                    call.push((w, 0));
                } else if self.on_stack[w] {
                    self.low[v] = self.low[v].min(self.idx[w]);
                }
            } else {
                if self.low[v] == self.idx[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = self.stack.pop().expect("tarjan stack underflow");
                        self.on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    self.comps.push(comp);
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    self.low[parent] = self.low[parent].min(self.low[v]);
                }
            }
        }
    }
}

/// Map vertex -> component id for a component list.
pub fn component_of(comps: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut of = vec![usize::MAX; n];
    for (cid, comp) in comps.iter().enumerate() {
        for &v in comp {
            of[v] = cid;
        }
    }
    of
}

/// Condensation DAG over component ids (deduplicated, sorted edges).
pub fn condensation(adj: &[Vec<usize>], comp_of: &[usize], ncomp: usize) -> Vec<Vec<usize>> {
    let mut dag = vec![Vec::new(); ncomp];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            let (cu, cv) = (comp_of[u], comp_of[v]);
            if cu != cv {
                dag[cu].push(cv);
            }
        }
    }
    for out in &mut dag {
        out.sort_unstable();
        out.dedup();
    }
    dag
}

/// Reflexive-transitive reachability closure as a dense boolean matrix.
pub fn reachability(adj: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut reach = vec![vec![false; n]; n];
    for s in 0..n {
        let mut todo = vec![s];
        reach[s][s] = true;
        while let Some(u) = todo.pop() {
            for &v in &adj[u] {
                if !reach[s][v] {
                    reach[s][v] = true;
                    todo.push(v);
                }
            }
        }
    }
    reach
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_two_cycles_and_bridge() {
        // 0 <-> 1 -> 2 <-> 3
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2]];
        let comps = tarjan_scc(&adj);
        assert_eq!(comps.len(), 2);
        assert!(comps.contains(&vec![0, 1]));
        assert!(comps.contains(&vec![2, 3]));
        let of = component_of(&comps, 4);
        let dag = condensation(&adj, &of, comps.len());
        assert_eq!(dag[of[0]], vec![of[2]]);
        assert!(dag[of[2]].is_empty());
    }

    #[test]
    fn reach_closure() {
        let adj = vec![vec![1], vec![2], vec![], vec![0]];
        let r = reachability(&adj);
        assert!(r[3][2]);
        assert!(r[0][0]);
        assert!(!r[2][0]);
    }
}
