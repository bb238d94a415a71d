//! Closed-form travel times for stars, bridge nodes, trees and lines.

use crate::error::{Error, Result};
use crate::hitting::TrustPolicy;
use crate::network::{Network, NodeId};
use crate::scalar::{is_probability, Scalar};

/// Below this distance from the removable singularity `p = (n - 1) / n` the
/// optimal star trust is reported as exactly one half.
const STAR_SINGULARITY_BAND: f64 = 1e-9;

/// Below this `|1 - z|` the unit-line crossing time is summed term by term
/// instead of using the geometric closed form.
const UNIT_LINE_SUM_BAND: f64 = 1e-3;

fn open_trust<T: Scalar>(q: T) -> Result<()> {
    if q > T::zero() && q < T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("trust {q} must lie strictly inside (0, 1)")))
    }
}

fn reliability<T: Scalar>(p: T) -> Result<()> {
    if is_probability(p) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("reliability {p} not in [0, 1]")))
    }
}

/// Star with centre of degree `n = rays.len() + 1`: one ray of length `c` to
/// home and `n - 1` further rays to leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct StarSpec<T> {
    pub c: T,
    pub rays: Vec<T>,
}

impl<T: Scalar> StarSpec<T> {
    pub fn new(c: T, rays: Vec<T>) -> Result<Self> {
        if rays.is_empty() {
            return Err(Error::OutOfRange("a star needs at least one non-home ray".into()));
        }
        if !(c > T::zero()) || rays.iter().any(|&r| !(r > T::zero())) {
            return Err(Error::OutOfRange("star ray lengths must be positive".into()));
        }
        Ok(Self { c, rays })
    }

    pub fn degree(&self) -> usize {
        self.rays.len() + 1
    }

    pub fn alpha_sum(&self) -> T {
        self.rays.iter().fold(T::zero(), |a, &r| a + r)
    }
}

/// Bridge arc `XH` of length `c`; `return_times[i]` is the expected time to
/// come back to `X` after leaving by its `i`-th other arc.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeSpec<T> {
    pub c: T,
    pub return_times: Vec<T>,
}

impl<T: Scalar> BridgeSpec<T> {
    pub fn degree(&self) -> usize {
        self.return_times.len() + 1
    }

    pub fn beta_sum(&self) -> T {
        self.return_times.iter().fold(T::zero(), |a, &r| a + r)
    }
}

/// Multiplier `M(n, p, q) = (p - 2q + q² + nq - npq) / (q (1 - q) (n - 1))`.
pub fn bridge_m<T: Scalar>(n: usize, p: T, q: T) -> Result<T> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("degree {n} < 2")));
    }
    reliability(p)?;
    open_trust(q)?;
    let nf = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    let num = p - two * q + q * q + nf * q - nf * p * q;
    Ok(num / (q * (T::one() - q) * (nf - T::one())))
}

/// Expected time from the centre of a star to home under trust `q`.
pub fn star_time<T: Scalar>(s: &StarSpec<T>, p: T, q: T) -> Result<T> {
    Ok(s.c + T::lit(2.0) * bridge_m(s.degree(), p, q)? * s.alpha_sum())
}

/// Time from `X` to home across a bridge: `c + M β`.
pub fn bridge_time<T: Scalar>(b: &BridgeSpec<T>, p: T, q: T) -> Result<T> {
    if b.return_times.is_empty() {
        return Err(Error::OutOfRange("bridge node needs at least one other arc".into()));
    }
    Ok(b.c + bridge_m(b.degree(), p, q)? * b.beta_sum())
}

/// Optimal trust at a degree-`n` node whose home arc is a bridge.
///
/// Evaluated as `p / (p + sqrt((n - 1) p (1 - p)))`, the rationalised form of
/// `(p - sqrt(n - 1) sqrt(p (1 - p))) / (1 - n (1 - p))`, which has no
/// cancellation near `p = (n - 1) / n`.
pub fn star_optimal_trust<T: Scalar>(n: usize, p: T) -> Result<T> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("degree {n} < 2")));
    }
    reliability(p)?;
    if p == T::zero() {
        return Ok(T::zero());
    }
    let nf = T::from_usize_lossy(n);
    if (T::one() - nf * (T::one() - p)).abs() < T::lit(STAR_SINGULARITY_BAND) {
        return Ok(T::lit(0.5));
    }
    let s = ((nf - T::one()) * p * (T::one() - p)).sqrt();
    Ok(p / (p + s))
}

/// Expected times to home on a tree, computed leaf-upward with the bridge
/// recursion `S(i) = λ(i, s(i)) + M(k(i)) Σ_{j ∈ a(i)} (λ(j, i) + S(j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSolution<T> {
    pub policy: TrustPolicy<T>,
    /// Expected time from each node to home.
    pub time: Vec<T>,
    /// `S(i)`, expected time from `i` to its successor; zero at home.
    pub increment: Vec<T>,
    /// Successor toward home; `None` at home.
    pub successor: Vec<Option<NodeId>>,
}

/// Tree times for any policy whose branch-node trusts lie in `(0, 1)`.
pub fn tree_profile<T: Scalar>(
    net: &Network<T>,
    p: T,
    policy: &TrustPolicy<T>,
) -> Result<TreeSolution<T>> {
    reliability(p)?;
    let n = net.node_count();
    if net.arc_count() + 1 != n {
        return Err(Error::NotATree(format!(
            "{} arcs on {} nodes",
            net.arc_count(),
            n
        )));
    }

    // Breadth-first from home gives successors and a parent-before-child order.
    let home = net.home();
    let mut successor = vec![None; n];
    let mut up_length = vec![T::zero(); n];
    let mut order = vec![home];
    let mut seen = vec![false; n];
    seen[home] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &a in net.incident(v) {
            let w = net.arc(a).other(v);
            if !seen[w] {
                seen[w] = true;
                successor[w] = Some(v);
                up_length[w] = net.arc(a).length;
                order.push(w);
            }
        }
    }

    let mut increment = vec![T::zero(); n];
    // Σ over antecedents of (λ(j, i) + S(j)), accumulated child-first.
    let mut returns = vec![T::zero(); n];
    for &v in order.iter().rev() {
        let Some(s) = successor[v] else { continue };
        increment[v] = if net.is_branch(v) {
            let k = net.degree(v);
            let q = policy.trust_at_degree(k)?;
            up_length[v] + bridge_m(k, p, q)? * returns[v]
        } else {
            up_length[v]
        };
        returns[s] = returns[s] + up_length[v] + increment[v];
    }

    let mut time = vec![T::zero(); n];
    for &v in &order {
        if let Some(s) = successor[v] {
            time[v] = increment[v] + time[s];
        }
    }
    Ok(TreeSolution {
        policy: policy.clone(),
        time,
        increment,
        successor,
    })
}

/// Optimal counting policy on a tree (`q_k = q̄_k(p)` for every branch
/// degree) with the resulting times.
pub fn tree_solve_counting<T: Scalar>(net: &Network<T>, p: T) -> Result<TreeSolution<T>> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::OutOfRange(format!("reliability {p} must lie in (0, 1)")));
    }
    let mut degrees: Vec<usize> = net
        .nodes()
        .filter(|&v| net.is_branch(v))
        .map(|v| net.degree(v))
        .collect();
    degrees.sort_unstable();
    degrees.dedup();
    let policy = TrustPolicy::ByDegree(
        degrees
            .into_iter()
            .map(|k| star_optimal_trust(k, p).map(|q| (k, q)))
            .collect::<Result<_>>()?,
    );
    tree_profile(net, p, &policy)
}

/// Geometric factor `z = (q² - 2pq + p) / (q (1 - q))` of a line; equals
/// `M(2, p, q)`.
pub fn line_z<T: Scalar>(p: T, q: T) -> Result<T> {
    reliability(p)?;
    open_trust(q)?;
    Ok((q * q - T::lit(2.0) * p * q + p) / (q * (T::one() - q)))
}

/// `z` at the optimal trust, `2 sqrt(p (1 - p))`. Defined on all of `[0, 1]`.
pub fn optimal_line_z<T: Scalar>(p: T) -> Result<T> {
    reliability(p)?;
    Ok(T::lit(2.0) * (p * (T::one() - p)).sqrt())
}

/// Increments `S(0), …, S(m - 1)` for arc lengths `a_0, …, a_{m-1}` via
/// `S(j) = a_j + (a_{j-1} + S(j-1)) z`, `S(0) = a_0`.
pub fn line_increments_with_z<T: Scalar>(lengths: &[T], z: T) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(lengths.len());
    for (j, &a) in lengths.iter().enumerate() {
        let s = match j {
            0 => a,
            _ => a + (lengths[j - 1] + out[j - 1]) * z,
        };
        out.push(s);
    }
    out
}

pub fn line_increments<T: Scalar>(lengths: &[T], p: T, q: T) -> Result<Vec<T>> {
    Ok(line_increments_with_z(lengths, line_z(p, q)?))
}

/// `S(j) = T(j, j + 1)` on a line with leaf `0`.
pub fn line_increment<T: Scalar>(lengths: &[T], j: usize, p: T, q: T) -> Result<T> {
    if j >= lengths.len() {
        return Err(Error::OutOfRange(format!(
            "increment {j} needs arc {j}, line has {} arcs",
            lengths.len()
        )));
    }
    Ok(line_increments(&lengths[..=j], p, q)?[j])
}

/// `T(0, j)` as the sum of increments `S(0) + … + S(j - 1)`.
pub fn line_cross_time_with_z<T: Scalar>(lengths: &[T], j: usize, z: T) -> Result<T> {
    if j > lengths.len() {
        return Err(Error::OutOfRange(format!(
            "node {j} is beyond a line with {} arcs",
            lengths.len()
        )));
    }
    Ok(line_increments_with_z(&lengths[..j], z)
        .into_iter()
        .fold(T::zero(), |a, s| a + s))
}

pub fn line_cross_time<T: Scalar>(lengths: &[T], j: usize, p: T, q: T) -> Result<T> {
    line_cross_time_with_z(lengths, j, line_z(p, q)?)
}

/// Optimal `T(0, j)` on a unit line:
/// `(j - j z² + 2 z (z^j - 1)) / (1 - z)²` with `z = 2 sqrt(p (1 - p))`.
/// At `p = 1/2` this is the random-walk value `j²`.
pub fn unit_line_cross_time<T: Scalar>(j: usize, p: T) -> Result<T> {
    let z = optimal_line_z(p)?;
    let jf = T::from_usize_lossy(j);
    let one = T::one();
    if (one - z).abs() < T::lit(UNIT_LINE_SUM_BAND) {
        // j + 2 Σ_{i=1}^{j-1} (j - i) z^i
        let mut acc = jf;
        let mut zi = one;
        for i in 1..j {
            zi = zi * z;
            acc = acc + T::lit(2.0) * T::from_usize_lossy(j - i) * zi;
        }
        return Ok(acc);
    }
    let zj = z.powi(j as i32);
    Ok((jf - jf * z * z + T::lit(2.0) * z * (zj - one)) / ((one - z) * (one - z)))
}
