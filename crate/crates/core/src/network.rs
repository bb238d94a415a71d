//! Undirected multigraphs with positive arc lengths and a distinguished home
//! node, plus the shortest-path and structural queries the solvers need.

use std::collections::{HashMap, HashSet};

use log::warn;

use crate::error::{Error, Result};
use crate::netfile::NetworkDescription;
use crate::scalar::Scalar;

pub type NodeId = usize;
pub type ArcId = usize;

/// Absolute tolerance used when deciding whether an arc lies on a shortest path.
pub const SHORTEST_PATH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Arc<T> {
    pub label: String,
    pub ends: (NodeId, NodeId),
    pub length: T,
}

impl<T> Arc<T> {
    /// The endpoint opposite `v`. `v` must be one of the arc's ends.
    #[inline]
    pub fn other(&self, v: NodeId) -> NodeId {
        if self.ends.0 == v {
            self.ends.1
        } else {
            self.ends.0
        }
    }

    #[inline]
    pub fn touches(&self, v: NodeId) -> bool {
        self.ends.0 == v || self.ends.1 == v
    }
}

/// A validated network. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Network<T> {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    arcs: Vec<Arc<T>>,
    incidence: Vec<Vec<ArcId>>,
    home: NodeId,
}

impl<T: Scalar> Network<T> {
    /// Validates a description and builds the network.
    ///
    /// Nodes are numbered in order of first appearance (home first).
    pub fn build(desc: &NetworkDescription) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, NodeId> = HashMap::new();
        let mut intern = |name: &str| -> Result<NodeId> {
            validate_token(name, "node")?;
            if let Some(&id) = index.get(name) {
                return Ok(id);
            }
            let id = names.len();
            names.push(name.to_string());
            index.insert(name.to_string(), id);
            Ok(id)
        };

        let home = intern(&desc.home)?;
        let mut arcs = Vec::with_capacity(desc.arcs.len());
        let mut seen_ids = HashSet::new();
        for a in &desc.arcs {
            validate_token(&a.id, "arc")?;
            if !seen_ids.insert(a.id.as_str()) {
                return Err(Error::Validation(format!("duplicate arc id `{}`", a.id)));
            }
            if !(a.length.is_finite() && a.length > 0.0) {
                return Err(Error::Validation(format!(
                    "arc `{}` has nonpositive or non-finite length {}",
                    a.id, a.length
                )));
            }
            if a.u == a.v {
                return Err(Error::Validation(format!(
                    "arc `{}` is a self-loop at `{}`",
                    a.id, a.u
                )));
            }
            let u = intern(&a.u)?;
            let v = intern(&a.v)?;
            arcs.push(Arc {
                label: a.id.clone(),
                ends: (u, v),
                length: T::lit(a.length),
            });
        }

        let mut incidence = vec![Vec::new(); names.len()];
        for (id, arc) in arcs.iter().enumerate() {
            incidence[arc.ends.0].push(id);
            incidence[arc.ends.1].push(id);
        }
        if incidence[home].is_empty() {
            return Err(Error::Validation(format!(
                "home `{}` has no incident arcs",
                names[home]
            )));
        }

        let net = Self {
            names,
            index,
            arcs,
            incidence,
            home,
        };
        if let Some(v) = net.first_unreachable_from(home, None) {
            return Err(Error::Validation(format!(
                "network is disconnected: `{}` is not connected to home `{}`",
                net.names[v], net.names[home]
            )));
        }
        if net.find_bridges_and_cuts().cuts.contains(&home) {
            warn!("home node `{}` is a cut node", net.names[home]);
        }
        Ok(net)
    }

    /// Returns the first node (by id) not connected to `from`, optionally
    /// ignoring one arc.
    fn first_unreachable_from(&self, from: NodeId, skip_arc: Option<ArcId>) -> Option<NodeId> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &a in &self.incidence[v] {
                if Some(a) == skip_arc {
                    continue;
                }
                let w = self.arcs[a].other(v);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    /// Connectivity test with one arc removed.
    pub fn is_connected_without_arc(&self, arc: ArcId) -> bool {
        self.first_unreachable_from(0, Some(arc)).is_none()
    }
}

impl<T> Network<T> {
    #[inline]
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    #[inline]
    pub fn home(&self) -> NodeId {
        self.home
    }

    #[inline]
    pub fn arc(&self, id: ArcId) -> &Arc<T> {
        &self.arcs[id]
    }

    pub fn arcs(&self) -> &[Arc<T>] {
        &self.arcs
    }

    /// Arc ids incident to `v`; parallel arcs appear separately.
    #[inline]
    pub fn incident(&self, v: NodeId) -> &[ArcId] {
        &self.incidence[v]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.incidence[v].len()
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v]
    }

    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.names.len()
    }

    /// A node of degree at least two other than home.
    #[inline]
    pub fn is_branch(&self, v: NodeId) -> bool {
        v != self.home && self.degree(v) >= 2
    }

    pub fn classify(&self) -> NodeClassification {
        let degree: Vec<usize> = self.incidence.iter().map(Vec::len).collect();
        let branch = self.nodes().filter(|&v| self.is_branch(v)).collect();
        let leaves = self
            .nodes()
            .filter(|&v| v != self.home && degree[v] == 1)
            .collect();
        NodeClassification {
            branch,
            leaves,
            degree,
        }
    }

    /// Bridges and articulation points via Tarjan low-links keyed on arc ids,
    /// so parallel arcs are never reported as bridges.
    pub fn find_bridges_and_cuts(&self) -> BridgesAndCuts {
        let n = self.node_count();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0usize;
        let mut bridges = Vec::new();
        let mut is_cut = vec![false; n];

        // Iterative DFS: (node, arc used to enter, next incidence index).
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            let mut root_children = 0usize;
            let mut stack: Vec<(NodeId, Option<ArcId>, usize)> = vec![(root, None, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(frame) = stack.last_mut() {
                let (v, parent_arc, ref mut next) = *frame;
                if *next < self.incidence[v].len() {
                    let a = self.incidence[v][*next];
                    *next += 1;
                    if Some(a) == parent_arc {
                        continue;
                    }
                    let w = self.arcs[a].other(v);
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        if v == root {
                            root_children += 1;
                        }
                        stack.push((w, Some(a), 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let (Some(a), Some(&(u, _, _))) = (parent_arc, stack.last()) {
                        low[u] = low[u].min(low[v]);
                        if low[v] > disc[u] {
                            bridges.push(a);
                        }
                        if u != root && low[v] >= disc[u] {
                            is_cut[u] = true;
                        }
                    }
                }
            }
            if root_children > 1 {
                is_cut[root] = true;
            }
        }
        bridges.sort_unstable();
        BridgesAndCuts {
            bridges,
            cuts: (0..n).filter(|&v| is_cut[v]).collect(),
        }
    }
}

fn validate_token(s: &str, what: &str) -> Result<()> {
    let ok = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || (what == "arc" && (c == '_' || c == '-')));
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!("invalid {what} identifier `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeClassification {
    pub branch: Vec<NodeId>,
    pub leaves: Vec<NodeId>,
    /// Degree per node id, counting parallel arcs separately.
    pub degree: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgesAndCuts {
    pub bridges: Vec<ArcId>,
    pub cuts: Vec<NodeId>,
}

/// Distances to a target node and, for each node, the incident arcs that lie
/// on some shortest path to it.
#[derive(Debug, Clone)]
pub struct ShortestPathData<T> {
    pub target: NodeId,
    pub distance: Vec<T>,
    pub correct_arcs: Vec<Vec<ArcId>>,
}

impl<T: Scalar> ShortestPathData<T> {
    pub fn is_correct(&self, v: NodeId, arc: ArcId) -> bool {
        self.correct_arcs[v].contains(&arc)
    }
}

/// Shortest paths toward home.
pub fn shortest_paths<T: Scalar>(net: &Network<T>) -> ShortestPathData<T> {
    shortest_paths_to(net, net.home())
}

/// Dijkstra toward an arbitrary target. Quadratic selection keeps the scalar
/// type unconstrained by `Ord`; networks here are desk-sized.
pub fn shortest_paths_to<T: Scalar>(net: &Network<T>, target: NodeId) -> ShortestPathData<T> {
    let n = net.node_count();
    let mut distance = vec![T::infinity(); n];
    let mut done = vec![false; n];
    distance[target] = T::zero();
    for _ in 0..n {
        let Some(v) = (0..n)
            .filter(|&v| !done[v] && distance[v].is_finite())
            .min_by(|&a, &b| distance[a].partial_cmp(&distance[b]).unwrap())
        else {
            break;
        };
        done[v] = true;
        for &a in net.incident(v) {
            let w = net.arc(a).other(v);
            let cand = distance[v] + net.arc(a).length;
            if cand < distance[w] {
                distance[w] = cand;
            }
        }
    }

    let tol = T::lit(SHORTEST_PATH_TOLERANCE);
    let correct_arcs = (0..n)
        .map(|v| {
            if v == target {
                return Vec::new();
            }
            net.incident(v)
                .iter()
                .copied()
                .filter(|&a| {
                    let arc = net.arc(a);
                    (arc.length + distance[arc.other(v)] - distance[v]).abs() <= tol
                })
                .collect()
        })
        .collect();
    ShortestPathData {
        target,
        distance,
        correct_arcs,
    }
}
