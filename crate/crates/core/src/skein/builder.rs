//! Assembly of new diagrams out of pieces joined by links.
//!
//! Auxiliary nodes stand for points that disappear once chains are resolved.
//! Every auxiliary node must end up with exactly two links and every real dart
//! with exactly one; closed chains of auxiliary nodes become free loops.

use super::{Diagram, End, Vertex};
use crate::error::{Error, Result};
use crate::twobox::Side;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    /// Slot of a vertex of the diagram being built.
    V(usize, usize),
    /// Boundary point of the diagram being built.
    B(usize),
    Aux(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Builder {
    vertices: Vec<Vertex>,
    boundary: usize,
    boundary_side: Side,
    free_loops: usize,
    links: Vec<(Node, Node)>,
    n_aux: usize,
}

/// Host darts as seen from a builder.
pub(crate) struct HostMap {
    node: Vec<Option<Node>>,
}

impl HostMap {
    pub fn node(&self, d: usize) -> Node {
        self.node[d].expect("dart was deleted")
    }
}

impl Builder {
    pub fn new(boundary: usize, boundary_side: Side) -> Self {
        Builder {
            vertices: vec![],
            boundary,
            boundary_side,
            free_loops: 0,
            links: vec![],
            n_aux: 0,
        }
    }

    pub fn add_vertex(&mut self, v: Vertex) -> usize {
        self.vertices.push(v);
        self.vertices.len() - 1
    }

    pub fn aux(&mut self) -> Node {
        self.n_aux += 1;
        Node::Aux(self.n_aux - 1)
    }

    pub fn link(&mut self, a: Node, b: Node) {
        self.links.push((a, b));
    }

    /// Copy `host` except for `removed` vertices and `deleted` darts.
    ///
    /// Kept vertices keep their relative order. Darts of removed vertices
    /// that are not deleted become auxiliary nodes, ready to be linked.
    pub fn import(&mut self, host: &Diagram, removed: &[usize], deleted: &[usize], boundary_to_aux: bool) -> HostMap {
        let vmap: Vec<Option<usize>> = host
            .vertices
            .iter()
            .enumerate()
            .map(|(v, x)| (!removed.contains(&v)).then(|| self.add_vertex(x.clone())))
            .collect();
        let node: Vec<Option<Node>> = (0..host.n_darts())
            .map(|d| {
                if deleted.contains(&d) {
                    return None;
                }
                Some(match host.end(d) {
                    End::V(v, s) => match vmap[v] {
                        Some(w) => Node::V(w, s),
                        None => self.aux(),
                    },
                    End::B(_) if boundary_to_aux => self.aux(),
                    End::B(k) => Node::B(k),
                })
            })
            .collect();
        for d in 0..host.n_darts() {
            let p = host.pairing[d];
            if let (true, Some(a), Some(b)) = (d < p, node[d], node[p]) {
                self.link(a, b);
            }
        }
        self.free_loops += host.free_loops;
        HostMap { node }
    }

    pub fn build(self) -> Result<Diagram> {
        let nvd = 4 * self.vertices.len();
        let nterm = nvd + self.boundary;
        let idx = |n: Node| -> Result<usize> {
            match n {
                Node::V(v, s) if v < self.vertices.len() && s < 4 => Ok(4 * v + s),
                Node::B(k) if k < self.boundary => Ok(nvd + k),
                Node::Aux(i) if i < self.n_aux => Ok(nterm + i),
                _ => Err(Error::InvariantViolation(format!("builder node {n:?} out of range"))),
            }
        };
        let total = nterm + self.n_aux;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
        for &(a, b) in &self.links {
            let (i, j) = (idx(a)?, idx(b)?);
            adj[i].push(j);
            adj[j].push(i);
        }
        for (i, a) in adj.iter().enumerate() {
            let want = if i < nterm { 1 } else { 2 };
            if a.len() != want {
                return Err(Error::InvariantViolation(format!(
                    "builder node {i} has degree {} (expected {want})",
                    a.len()
                )));
            }
        }
        let mut pairing = vec![usize::MAX; nterm];
        let mut seen = vec![false; total];
        for start in 0..nterm {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let (mut prev, mut cur) = (start, adj[start][0]);
            while cur >= nterm {
                seen[cur] = true;
                let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                prev = cur;
                cur = next;
            }
            seen[cur] = true;
            pairing[start] = cur;
            pairing[cur] = start;
        }
        let mut loops = self.free_loops;
        for start in nterm..total {
            if seen[start] {
                continue;
            }
            loops += 1;
            let (mut prev, mut cur) = (usize::MAX, start);
            while !seen[cur] {
                seen[cur] = true;
                let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
                prev = cur;
                cur = next;
            }
        }
        let d = Diagram {
            vertices: self.vertices,
            boundary: self.boundary,
            boundary_side: self.boundary_side,
            pairing,
            free_loops: loops,
        };
        debug_assert!(d.validate().is_ok(), "{:?}", d.validate());
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aux_cycle_becomes_loop() {
        let mut b = Builder::new(0, Side::Plus);
        let (x, y) = (b.aux(), b.aux());
        b.link(x, y);
        b.link(y, x);
        let d = b.build().unwrap();
        assert_eq!(d.free_loops, 1);
    }

    #[test]
    fn chain_resolves() {
        let mut b = Builder::new(2, Side::Plus);
        let (x, y, z) = (b.aux(), b.aux(), b.aux());
        b.link(Node::B(0), x);
        b.link(x, y);
        b.link(y, z);
        b.link(z, Node::B(1));
        let d = b.build().unwrap();
        assert_eq!(d.pairing, vec![1, 0]);
        assert_eq!(d.free_loops, 0);
    }

    #[test]
    fn dangling_rejected() {
        let mut b = Builder::new(2, Side::Plus);
        let x = b.aux();
        b.link(Node::B(0), x);
        b.link(Node::B(1), x);
        b.link(Node::B(1), Node::B(0));
        assert!(b.build().is_err());
    }
}
