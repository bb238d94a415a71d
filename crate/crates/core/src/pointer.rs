//! Direction vectors and the measure induced on them by pointer reliability.
//!
//! A direction vector fixes one pointer arc at every branch node. It is drawn
//! once per journey and held fixed; expected times are conditioned on it and
//! then averaged with the weights computed here.

use rand::Rng;

use crate::error::{Error, Result};
use crate::network::{ArcId, Network, NodeId, ShortestPathData};
use crate::scalar::{is_probability, Scalar};

/// Default limit on the number of enumerated direction vectors.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectionVector {
    /// Indexed by node id; `Some` exactly at branch nodes.
    pointers: Vec<Option<ArcId>>,
}

impl DirectionVector {
    /// Builds a vector from `(branch node, arc)` pairs. Checks incidence.
    pub fn from_pairs<T: Scalar>(
        net: &Network<T>,
        pairs: impl IntoIterator<Item = (NodeId, ArcId)>,
    ) -> Result<Self> {
        let mut pointers = vec![None; net.node_count()];
        for (v, a) in pairs {
            if !net.is_branch(v) {
                return Err(Error::Validation(format!(
                    "`{}` is not a branch node",
                    net.name(v)
                )));
            }
            if !net.arc(a).touches(v) {
                return Err(Error::Validation(format!(
                    "arc `{}` is not incident to `{}`",
                    net.arc(a).label,
                    net.name(v)
                )));
            }
            pointers[v] = Some(a);
        }
        if let Some(v) = net
            .nodes()
            .find(|&v| net.is_branch(v) && pointers[v].is_none())
        {
            return Err(Error::Validation(format!(
                "no pointer given for branch node `{}`",
                net.name(v)
            )));
        }
        Ok(Self { pointers })
    }

    #[inline]
    pub fn pointer(&self, v: NodeId) -> Option<ArcId> {
        self.pointers[v]
    }
}

#[derive(Debug, Clone)]
pub struct WeightedDirectionSpace<T> {
    pub branch_nodes: Vec<NodeId>,
    pub entries: Vec<(DirectionVector, T)>,
    pub reliability: T,
}

impl<T: Scalar> WeightedDirectionSpace<T> {
    pub fn total_weight(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, (_, w)| acc + *w)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_reliability<T: Scalar>(p: T) -> Result<()> {
    if is_probability(p) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("reliability {p} not in [0, 1]")))
    }
}

/// Probability that the pointer at branch node `v` indicates each incident arc,
/// in incidence order.
///
/// Correct arcs share `p` equally and the remaining arcs share `1 - p`. When
/// every incident arc is correct they share the whole mass uniformly.
pub fn node_pointer_distribution<T: Scalar>(
    net: &Network<T>,
    spd: &ShortestPathData<T>,
    v: NodeId,
    p: T,
) -> Vec<(ArcId, T)> {
    let arcs = net.incident(v);
    let n_correct = spd.correct_arcs[v].len();
    let n_wrong = arcs.len() - n_correct;
    arcs.iter()
        .map(|&a| {
            let w = if n_wrong == 0 {
                T::one() / T::from_usize_lossy(arcs.len())
            } else if spd.is_correct(v, a) {
                p / T::from_usize_lossy(n_correct)
            } else {
                (T::one() - p) / T::from_usize_lossy(n_wrong)
            };
            (a, w)
        })
        .collect()
}

/// Number of direction vectors, i.e. the product of branch-node degrees.
pub fn direction_space_size<T: Scalar>(net: &Network<T>) -> u128 {
    net.nodes()
        .filter(|&v| net.is_branch(v))
        .fold(1u128, |acc, v| acc.saturating_mul(net.degree(v) as u128))
}

pub fn enumerate_direction_space<T: Scalar>(
    net: &Network<T>,
    spd: &ShortestPathData<T>,
    p: T,
) -> Result<WeightedDirectionSpace<T>> {
    enumerate_direction_space_capped(net, spd, p, DEFAULT_ENUMERATION_CAP)
}

/// All direction vectors with product weights, in odometer order over the
/// branch nodes (last node varies fastest).
pub fn enumerate_direction_space_capped<T: Scalar>(
    net: &Network<T>,
    spd: &ShortestPathData<T>,
    p: T,
    cap: u128,
) -> Result<WeightedDirectionSpace<T>> {
    check_reliability(p)?;
    let count = direction_space_size(net);
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let branch_nodes: Vec<NodeId> = net.nodes().filter(|&v| net.is_branch(v)).collect();
    let per_node: Vec<Vec<(ArcId, T)>> = branch_nodes
        .iter()
        .map(|&v| node_pointer_distribution(net, spd, v, p))
        .collect();

    let mut entries = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; branch_nodes.len()];
    loop {
        let mut pointers = vec![None; net.node_count()];
        let mut weight = T::one();
        for (k, &v) in branch_nodes.iter().enumerate() {
            let (a, w) = per_node[k][digits[k]];
            pointers[v] = Some(a);
            weight = weight * w;
        }
        entries.push((DirectionVector { pointers }, weight));

        // Advance the odometer.
        let mut k = branch_nodes.len();
        loop {
            if k == 0 {
                return Ok(WeightedDirectionSpace {
                    branch_nodes,
                    entries,
                    reliability: p,
                });
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < per_node[k].len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Draws direction vectors i.i.d. per node. Cumulative tables are built once.
#[derive(Debug, Clone)]
pub struct PointerSampler {
    node_count: usize,
    tables: Vec<(NodeId, Vec<(ArcId, f64)>)>,
}

impl PointerSampler {
    pub fn new<T: Scalar>(net: &Network<T>, spd: &ShortestPathData<T>, p: T) -> Result<Self> {
        check_reliability(p)?;
        let tables = net
            .nodes()
            .filter(|&v| net.is_branch(v))
            .map(|v| {
                let mut acc = 0.0;
                let cdf = node_pointer_distribution(net, spd, v, p)
                    .into_iter()
                    .map(|(a, w)| {
                        acc += w.as_f64();
                        (a, acc)
                    })
                    .collect();
                (v, cdf)
            })
            .collect();
        Ok(Self {
            node_count: net.node_count(),
            tables,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DirectionVector {
        let mut pointers = vec![None; self.node_count];
        for (v, cdf) in &self.tables {
            let u: f64 = rng.gen();
            // Zero-weight arcs are never chosen: the strict comparison skips
            // entries whose cumulative mass did not grow.
            let pick = cdf
                .iter()
                .find(|&&(_, c)| u < c)
                .or_else(|| cdf.iter().rev().find(|w| w.1 > 0.0))
                .map(|&(a, _)| a);
            pointers[*v] = pick;
        }
        DirectionVector { pointers }
    }
}

pub fn sample_direction_vector<T: Scalar, R: Rng + ?Sized>(
    net: &Network<T>,
    spd: &ShortestPathData<T>,
    p: T,
    rng: &mut R,
) -> Result<DirectionVector> {
    Ok(PointerSampler::new(net, spd, p)?.sample(rng))
}
