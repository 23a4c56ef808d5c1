use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// Exact combinatorial counts of a polygon complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    /// Defined only for closed, connected, consistently oriented surfaces.
    pub genus: Option<u32>,
    /// Undirected edges on a single face.
    pub boundary_edges: usize,
    /// Undirected edges on three or more faces.
    pub nonmanifold_edges: usize,
    /// Two-face edges traversed in the same direction by both faces.
    pub misoriented_edges: usize,
    pub connected: bool,
}

impl TopologyReport {
    pub fn is_closed_orientable(&self) -> bool {
        self.boundary_edges == 0 && self.nonmanifold_edges == 0 && self.misoriented_edges == 0
    }
}

/// Counts over the vertices actually referenced by `faces`.
pub fn topology_check(faces: &[Vec<usize>]) -> TopologyReport {
    let verts: BTreeSet<usize> = faces.iter().flatten().copied().collect();
    let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for f in faces {
        for i in 0..f.len() {
            *directed.entry((f[i], f[(i + 1) % f.len()])).or_insert(0) += 1;
        }
    }
    let mut undirected: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for (&(a, b), &c) in &directed {
        let e = undirected.entry((a.min(b), a.max(b))).or_insert((0, 0));
        if a < b {
            e.0 += c;
        } else {
            e.1 += c;
        }
    }
    let (mut boundary, mut nonmanifold, mut misoriented) = (0, 0, 0);
    for &(fwd, back) in undirected.values() {
        match fwd + back {
            1 => boundary += 1,
            2 if fwd != 1 => misoriented += 1,
            2 => {}
            _ => nonmanifold += 1,
        }
    }

    // Union-find over vertices through edges.
    let index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for &(a, b) in undirected.keys() {
        let (ra, rb) = (root(&mut parent, index[&a]), root(&mut parent, index[&b]));
        parent[ra] = rb;
    }
    let components = (0..verts.len()).filter(|&i| root(&mut parent, i) == i).count();
    let connected = components <= 1;

    let euler = verts.len() as i64 - undirected.len() as i64 + faces.len() as i64;
    let closed = boundary == 0 && nonmanifold == 0 && misoriented == 0;
    let genus = (closed && connected && euler <= 2 && (2 - euler) % 2 == 0).then(|| ((2 - euler) / 2) as u32);
    TopologyReport {
        vertices: verts.len(),
        edges: undirected.len(),
        faces: faces.len(),
        euler,
        genus,
        boundary_edges: boundary,
        nonmanifold_edges: nonmanifold,
        misoriented_edges: misoriented,
        connected,
    }
}
