//! Exact expected hitting times.
//!
//! For a fixed direction vector and trust policy the walk is an absorbing
//! Markov chain; its expected hitting times solve a linear system. Expected
//! travel times average those solutions over the direction space.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::network::{shortest_paths, ArcId, Network, NodeId};
use crate::pointer::{
    enumerate_direction_space_capped, DirectionVector, WeightedDirectionSpace,
    DEFAULT_ENUMERATION_CAP,
};
use crate::scalar::{is_probability, Scalar};

/// Direction spaces at least this large are solved on the rayon pool.
const PARALLEL_SPACE_THRESHOLD: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum TrustPolicy<T> {
    /// Same trust at every branch node.
    Uniform(T),
    /// Trust indexed by node degree.
    ByDegree(BTreeMap<usize, T>),
}

impl<T: Scalar> TrustPolicy<T> {
    pub fn by_degree(pairs: impl IntoIterator<Item = (usize, T)>) -> Self {
        TrustPolicy::ByDegree(pairs.into_iter().collect())
    }

    pub fn trust_at_degree(&self, degree: usize) -> Result<T> {
        let q = match self {
            TrustPolicy::Uniform(q) => *q,
            TrustPolicy::ByDegree(map) => *map.get(&degree).ok_or(Error::MissingTrust(degree))?,
        };
        if is_probability(q) {
            Ok(q)
        } else {
            Err(Error::OutOfRange(format!("trust {q} not in [0, 1]")))
        }
    }

    /// Checks that every branch degree of `net` has a trust in `[0, 1]`.
    pub fn validate_for(&self, net: &Network<T>) -> Result<()> {
        for v in net.nodes().filter(|&v| net.is_branch(v)) {
            self.trust_at_degree(net.degree(v))?;
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Display for TrustPolicy<T> {
    /// Comma-free rendering, safe inside a CSV field.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrustPolicy::Uniform(q) => write!(f, "uniform({q})"),
            TrustPolicy::ByDegree(map) => {
                write!(f, "degree(")?;
                for (i, (k, q)) in map.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{k}={q}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Expected time to the target from every node; `+inf` where the target is
/// not reached almost surely.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile<T> {
    pub target: NodeId,
    pub time: Vec<T>,
    /// Max-norm residual of the solved linear system (zero for averages).
    pub residual: T,
}

impl<T: Scalar> TimeProfile<T> {
    #[inline]
    pub fn at(&self, v: NodeId) -> T {
        self.time[v]
    }
}

/// One-step law of the walk at `v`, in incidence order.
///
/// At a branch node the pointer arc gets `q` and each other arc
/// `(1 - q) / (n - 1)`. Nodes without a pointer (leaves, and home when it is
/// not absorbing) choose uniformly, which at a leaf is a forced reflection.
pub fn step_distribution<T: Scalar>(
    net: &Network<T>,
    d: &DirectionVector,
    policy: &TrustPolicy<T>,
    v: NodeId,
) -> Result<Vec<(ArcId, T)>> {
    let arcs = net.incident(v);
    let n = arcs.len();
    match d.pointer(v) {
        Some(pointer) if net.is_branch(v) => {
            let q = policy.trust_at_degree(n)?;
            let other = (T::one() - q) / T::from_usize_lossy(n - 1);
            Ok(arcs
                .iter()
                .map(|&a| (a, if a == pointer { q } else { other }))
                .collect())
        }
        _ => {
            let w = T::one() / T::from_usize_lossy(n);
            Ok(arcs.iter().map(|&a| (a, w)).collect())
        }
    }
}

/// Hitting times to home for one direction vector.
pub fn hitting_times_for_direction<T: Scalar>(
    net: &Network<T>,
    d: &DirectionVector,
    policy: &TrustPolicy<T>,
) -> Result<TimeProfile<T>> {
    hitting_times_to(net, d, policy, net.home())
}

/// Hitting times to an arbitrary absorbing `target` for one direction vector.
/// The pointers in `d` are used as given.
pub fn hitting_times_to<T: Scalar>(
    net: &Network<T>,
    d: &DirectionVector,
    policy: &TrustPolicy<T>,
    target: NodeId,
) -> Result<TimeProfile<T>> {
    let n = net.node_count();
    // Outgoing (neighbour, probability, length) with zero-probability moves dropped.
    let mut steps: Vec<Vec<(NodeId, T, T)>> = vec![Vec::new(); n];
    for v in net.nodes().filter(|&v| v != target) {
        steps[v] = step_distribution(net, d, policy, v)?
            .into_iter()
            .filter(|&(_, w)| w > T::zero())
            .map(|(a, w)| (net.arc(a).other(v), w, net.arc(a).length))
            .collect();
    }

    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (v, out) in steps.iter().enumerate() {
        for &(w, _, _) in out {
            preds[w].push(v);
        }
    }
    let backward = |seeds: Vec<NodeId>| {
        let mut mark = vec![false; n];
        for &s in &seeds {
            mark[s] = true;
        }
        let mut stack = seeds;
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                if !mark[v] {
                    mark[v] = true;
                    stack.push(v);
                }
            }
        }
        mark
    };
    // A node has finite time iff it cannot reach any node that cannot reach
    // the target.
    let reaches_target = backward(vec![target]);
    let stuck: Vec<NodeId> = (0..n).filter(|&v| !reaches_target[v]).collect();
    let infinite = backward(stuck);

    let unknowns: Vec<NodeId> = (0..n).filter(|&v| v != target && !infinite[v]).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in unknowns.iter().enumerate() {
        slot[v] = k;
    }
    let mut a = DenseMatrix::identity(unknowns.len());
    let mut b = vec![T::zero(); unknowns.len()];
    for (k, &v) in unknowns.iter().enumerate() {
        for &(w, prob, len) in &steps[v] {
            b[k] = b[k] + prob * len;
            if w != target {
                debug_assert!(!infinite[w]);
                a.add(k, slot[w], -prob);
            }
        }
    }
    let x = a.solve(&b).map_err(|col| Error::SingularSystem {
        node: net.name(unknowns[col]).to_string(),
    })?;
    let residual = a.residual(&x, &b);

    let mut time = vec![T::infinity(); n];
    time[target] = T::zero();
    for (k, &v) in unknowns.iter().enumerate() {
        time[v] = x[k];
    }
    Ok(TimeProfile {
        target,
        time,
        residual,
    })
}

/// Exact solver over an enumerated direction space. Reuse one instance when
/// evaluating many policies at the same reliability.
#[derive(Debug, Clone)]
pub struct ExactSolver<'a, T> {
    net: &'a Network<T>,
    space: WeightedDirectionSpace<T>,
}

impl<'a, T: Scalar> ExactSolver<'a, T> {
    pub fn new(net: &'a Network<T>, p: T) -> Result<Self> {
        Self::with_cap(net, p, DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(net: &'a Network<T>, p: T, cap: u128) -> Result<Self> {
        let spd = shortest_paths(net);
        let space = enumerate_direction_space_capped(net, &spd, p, cap)?;
        Ok(Self { net, space })
    }

    pub fn network(&self) -> &'a Network<T> {
        self.net
    }

    pub fn reliability(&self) -> T {
        self.space.reliability
    }

    pub fn space(&self) -> &WeightedDirectionSpace<T> {
        &self.space
    }

    /// Per-direction profiles for every positive-weight direction vector.
    fn weighted_profiles(
        &self,
        policy: &TrustPolicy<T>,
        target: NodeId,
    ) -> Result<Vec<(T, TimeProfile<T>)>> {
        policy.validate_for(self.net)?;
        let solve = |(d, w): &(DirectionVector, T)| {
            hitting_times_to(self.net, d, policy, target).map(|prof| (*w, prof))
        };
        let live = self.space.entries.iter().filter(|e| e.1 > T::zero());
        if self.space.len() >= PARALLEL_SPACE_THRESHOLD {
            let live: Vec<_> = live.collect();
            live.into_par_iter().map(solve).collect()
        } else {
            live.map(solve).collect()
        }
    }

    /// Averaged profile to `target`. `residual` is the largest
    /// per-direction residual.
    pub fn profile_to(&self, policy: &TrustPolicy<T>, target: NodeId) -> Result<TimeProfile<T>> {
        let mut time = vec![T::zero(); self.net.node_count()];
        let mut residual = T::zero();
        for (w, prof) in self.weighted_profiles(policy, target)? {
            residual = residual.max(prof.residual);
            for (acc, t) in time.iter_mut().zip(&prof.time) {
                *acc = if t.is_infinite() { T::infinity() } else { *acc + w * *t };
            }
        }
        Ok(TimeProfile {
            target,
            time,
            residual,
        })
    }

    pub fn profile(&self, policy: &TrustPolicy<T>) -> Result<TimeProfile<T>> {
        self.profile_to(policy, self.net.home())
    }

    /// Expected time from `start` to home.
    pub fn expected_time(&self, policy: &TrustPolicy<T>, start: NodeId) -> Result<T> {
        self.expected_time_between(policy, start, self.net.home())
    }

    /// Expected time from `from` until `to` is first reached. Pointers keep
    /// indicating shortest paths to the network's home, not to `to`.
    pub fn expected_time_between(
        &self,
        policy: &TrustPolicy<T>,
        from: NodeId,
        to: NodeId,
    ) -> Result<T> {
        if from == to {
            return Ok(T::zero());
        }
        let mut total = T::zero();
        for (w, prof) in self.weighted_profiles(policy, to)? {
            let t = prof.at(from);
            if t.is_infinite() {
                return Ok(T::infinity());
            }
            total = total + w * t;
        }
        Ok(total)
    }
}

pub fn expected_time<T: Scalar>(
    net: &Network<T>,
    p: T,
    policy: &TrustPolicy<T>,
    start: NodeId,
) -> Result<T> {
    ExactSolver::new(net, p)?.expected_time(policy, start)
}

pub fn expected_time_between<T: Scalar>(
    net: &Network<T>,
    p: T,
    policy: &TrustPolicy<T>,
    from: NodeId,
    to: NodeId,
) -> Result<T> {
    ExactSolver::new(net, p)?.expected_time_between(policy, from, to)
}
