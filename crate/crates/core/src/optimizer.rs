//! Trust optimisation over the exact solver.
//!
//! Scalar problems are solved by a coarse grid followed by golden-section
//! refinement of the best grid cell. Degree-indexed (counting) policies are
//! optimised by coordinate descent over the same scalar routine.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::closed_form::star_optimal_trust;
use crate::error::{Error, Result};
use crate::hitting::{ExactSolver, TrustPolicy};
use crate::network::{Network, NodeId};
use crate::scalar::Scalar;

/// Uniform trusts are searched in `[TRUST_CLAMP, 1 - TRUST_CLAMP]`.
pub const TRUST_CLAMP: f64 = 1e-4;
pub const GRID_POINTS: usize = 101;
/// Width of the final golden-section bracket.
pub const REFINE_TOLERANCE: f64 = 1e-6;
/// Coordinate descent stops once no coordinate moves more than this.
pub const SWEEP_TOLERANCE: f64 = 1e-6;
pub const MAX_SWEEPS: usize = 100;
/// Grid values within this of the minimum count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    pub grid_points: usize,
    pub refinement_iterations: usize,
    /// Coordinate-descent sweeps; zero in uniform mode.
    pub sweeps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub policy: TrustPolicy<T>,
    pub value: T,
    pub start: NodeId,
    pub diagnostics: Diagnostics,
    /// Largest linear-system residual at the optimum.
    pub residual: T,
}

impl<T: Scalar> OptimizationResult<T> {
    /// `(degree, trust)` pairs; a uniform policy reports degree 0.
    pub fn coordinates(&self) -> Vec<(usize, T)> {
        match &self.policy {
            TrustPolicy::Uniform(q) => vec![(0, *q)],
            TrustPolicy::ByDegree(map) => map.iter().map(|(&k, &q)| (k, q)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrustMode {
    Uniform,
    Counting,
}

/// Result of a scalar minimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMinimum<T> {
    pub x: T,
    pub value: T,
    pub grid_points: usize,
    pub iterations: usize,
}

/// Maps NaN and negative values to `+inf`. Expected times are nonnegative; a
/// negative solve result only appears when trusts near 0 or 1 push the
/// linear system past double-precision conditioning (times beyond ~1e16).
fn sanitize<T: Scalar>(v: T) -> T {
    if v.is_nan() || v < T::zero() {
        T::infinity()
    } else {
        v
    }
}

/// Minimises `f` over `[lo, hi]`: evaluates a grid of [`GRID_POINTS`] points
/// (in parallel), then golden-section refines between the neighbours of the
/// best grid point. Ties on the grid go to the smallest `x`. Non-finite
/// values and negative values are treated as `+inf`. The grid endpoints are candidates too, so a
/// minimum sitting exactly on `lo` or `hi` is returned exactly.
pub fn minimize_scalar<T, F>(f: F, lo: T, hi: T) -> Result<ScalarMinimum<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<T> + Sync,
{
    let last = GRID_POINTS - 1;
    let step = (hi - lo) / T::from_usize_lossy(last);
    let xs: Vec<T> = (0..GRID_POINTS)
        .map(|i| if i == last { hi } else { lo + step * T::from_usize_lossy(i) })
        .collect();
    let ys: Vec<T> = xs
        .par_iter()
        .map(|&x| f(x).map(sanitize))
        .collect::<Result<_>>()?;

    let min = ys.iter().copied().fold(T::infinity(), T::min);
    let best = ys
        .iter()
        .position(|&y| y <= min + T::lit(TIE_TOLERANCE))
        .unwrap_or(0);
    let (mut best_x, mut best_y) = (xs[best], ys[best]);

    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(last)];
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = sanitize(f(c)?);
    let mut fd = sanitize(f(d)?);
    let mut iterations = 0;
    while b - a > T::lit(REFINE_TOLERANCE) {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sanitize(f(c)?);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sanitize(f(d)?);
        }
    }
    let mid = (a + b) / T::lit(2.0);
    let fm = sanitize(f(mid)?);
    // The grid point survives only if strictly better (boundary optima).
    for (x, y) in [(mid, fm), (c, fc), (d, fd)] {
        if y < best_y {
            best_x = x;
            best_y = y;
        }
    }
    Ok(ScalarMinimum {
        x: best_x,
        value: best_y,
        grid_points: GRID_POINTS,
        iterations,
    })
}

/// Distinct degrees of branch nodes, ascending.
pub fn branch_degrees<T: Scalar>(net: &Network<T>) -> Vec<usize> {
    let mut degrees: Vec<usize> = net
        .nodes()
        .filter(|&v| net.is_branch(v))
        .map(|v| net.degree(v))
        .collect();
    degrees.sort_unstable();
    degrees.dedup();
    degrees
}

/// Best uniform trust from `start`, reusing an existing solver.
pub fn optimize_uniform_with<T: Scalar>(
    solver: &ExactSolver<'_, T>,
    start: NodeId,
) -> Result<OptimizationResult<T>> {
    let eps = T::lit(TRUST_CLAMP);
    let m = minimize_scalar(
        |q| solver.expected_time(&TrustPolicy::Uniform(q), start),
        eps,
        T::one() - eps,
    )?;
    finish(
        solver,
        TrustPolicy::Uniform(m.x),
        start,
        Diagnostics {
            grid_points: m.grid_points,
            refinement_iterations: m.iterations,
            sweeps: 0,
        },
    )
}

pub fn optimize_uniform<T: Scalar>(
    net: &Network<T>,
    p: T,
    start: NodeId,
) -> Result<OptimizationResult<T>> {
    optimize_uniform_with(&ExactSolver::new(net, p)?, start)
}

/// Coordinate descent over degree-indexed trusts in `[0, 1]`, starting from
/// `initial` or from the star-optimal trusts `q̄_k(p)`.
pub fn optimize_counting_with<T: Scalar>(
    solver: &ExactSolver<'_, T>,
    start: NodeId,
    initial: Option<&BTreeMap<usize, T>>,
) -> Result<OptimizationResult<T>> {
    let net = solver.network();
    let p = solver.reliability();
    let degrees = branch_degrees(net);
    let mut trust: BTreeMap<usize, T> = degrees
        .iter()
        .map(|&k| {
            let warm = initial.and_then(|m| m.get(&k).copied());
            let q = match warm {
                Some(q) => q,
                None => star_optimal_trust(k, p)?,
            };
            Ok((k, q))
        })
        .collect::<Result<_>>()?;

    let mut diagnostics = Diagnostics::default();
    loop {
        if diagnostics.sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence { sweeps: MAX_SWEEPS });
        }
        diagnostics.sweeps += 1;
        let mut max_change = T::zero();
        for &k in &degrees {
            let m = minimize_scalar(
                |q| {
                    let mut trial = trust.clone();
                    trial.insert(k, q);
                    solver.expected_time(&TrustPolicy::ByDegree(trial), start)
                },
                T::zero(),
                T::one(),
            )?;
            diagnostics.grid_points += m.grid_points;
            diagnostics.refinement_iterations += m.iterations;
            let old = trust.insert(k, m.x).unwrap();
            max_change = max_change.max((m.x - old).abs());
        }
        if max_change < T::lit(SWEEP_TOLERANCE) {
            break;
        }
    }
    finish(solver, TrustPolicy::ByDegree(trust), start, diagnostics)
}

pub fn optimize_counting<T: Scalar>(
    net: &Network<T>,
    p: T,
    start: NodeId,
) -> Result<OptimizationResult<T>> {
    optimize_counting_with(&ExactSolver::new(net, p)?, start, None)
}

fn finish<T: Scalar>(
    solver: &ExactSolver<'_, T>,
    policy: TrustPolicy<T>,
    start: NodeId,
    diagnostics: Diagnostics,
) -> Result<OptimizationResult<T>> {
    let profile = solver.profile(&policy)?;
    let value = profile.at(start);
    if !value.is_finite() {
        return Err(Error::DegeneratePolicy(format!(
            "no trust gives a finite expected time from {}",
            solver.network().name(start)
        )));
    }
    Ok(OptimizationResult {
        policy,
        value,
        start,
        diagnostics,
        residual: profile.residual,
    })
}

/// One optimisation per reliability in `p_grid`. Counting mode warm-starts
/// each coordinate descent from the previous optimum; the uniform search is
/// global at every point.
pub fn trust_curve<T: Scalar>(
    net: &Network<T>,
    p_grid: &[T],
    start: NodeId,
    mode: TrustMode,
) -> Result<Vec<(T, OptimizationResult<T>)>> {
    let mut rows = Vec::with_capacity(p_grid.len());
    let mut warm: Option<BTreeMap<usize, T>> = None;
    for &p in p_grid {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::OutOfRange(format!("curve reliability {p} not in (0, 1)")));
        }
        let solver = ExactSolver::new(net, p)?;
        let res = match mode {
            TrustMode::Uniform => optimize_uniform_with(&solver, start)?,
            TrustMode::Counting => {
                let r = optimize_counting_with(&solver, start, warm.as_ref())?;
                if let TrustPolicy::ByDegree(m) = &r.policy {
                    warm = Some(m.clone());
                }
                r
            }
        };
        rows.push((p, res));
    }
    Ok(rows)
}

/// Reliability where the uniform optima from `a` and `b` coincide, found by
/// bisection on `q̂_a(p) - q̂_b(p)` over `[lo, hi]` to width `tol`.
/// Returns the crossover and the common optimal trust there.
pub fn uniform_crossover<T: Scalar>(
    net: &Network<T>,
    a: NodeId,
    b: NodeId,
    lo: T,
    hi: T,
    tol: T,
) -> Result<(T, T)> {
    let gap = |p: T| -> Result<(T, T)> {
        let solver = ExactSolver::new(net, p)?;
        let qa = uniform_trust(&optimize_uniform_with(&solver, a)?);
        let qb = uniform_trust(&optimize_uniform_with(&solver, b)?);
        Ok((qa - qb, (qa + qb) / T::lit(2.0)))
    };
    let (mut lo, mut hi) = (lo, hi);
    let (g_lo, _) = gap(lo)?;
    let (g_hi, _) = gap(hi)?;
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::OutOfRange(format!(
            "optimal trusts do not cross on [{lo}, {hi}]"
        )));
    }
    let mut q = T::zero();
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        let (g, qm) = gap(mid)?;
        q = qm;
        if g.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(((lo + hi) / T::lit(2.0), q))
}

fn uniform_trust<T: Scalar>(r: &OptimizationResult<T>) -> T {
    match r.policy {
        TrustPolicy::Uniform(q) => q,
        TrustPolicy::ByDegree(_) => unreachable!("uniform optimiser returns a uniform policy"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{star_time, tree_solve_counting, StarSpec};
    use crate::fixtures::{line_network, star_network, Fixture};

    fn q_of(r: &OptimizationResult<f64>) -> f64 {
        uniform_trust(r)
    }

    #[test]
    fn scalar_minimizer_basics() {
        let m = minimize_scalar(|x: f64| Ok((x - 0.3141).powi(2)), 0.0, 1.0).unwrap();
        assert!((m.x - 0.3141).abs() < 1e-6);
        // Minimum on the boundary is returned exactly.
        let m = minimize_scalar(|x: f64| Ok(2.0 - x), 0.0, 1.0).unwrap();
        assert_eq!(m.x, 1.0);
        let m = minimize_scalar(|x: f64| Ok(x), 0.0, 1.0).unwrap();
        assert_eq!(m.x, 0.0);
        // Constant: ties go to the smallest grid point.
        let m = minimize_scalar(|_: f64| Ok(2.0), 0.25, 0.75).unwrap();
        assert_eq!(m.x, 0.25);
    }

    #[test]
    fn triangle_uniform_optima() {
        let tri = Fixture::Triangle.network::<f64>();
        let (a, b) = (tri.node("A").unwrap(), tri.node("B").unwrap());
        let ra = optimize_uniform(&tri, 0.75, a).unwrap();
        let rb = optimize_uniform(&tri, 0.75, b).unwrap();
        assert!((q_of(&ra) - 0.68).abs() < 1e-2);
        assert!((q_of(&rb) - 0.72).abs() < 1e-2);
        let ra = optimize_uniform(&tri, 0.96, a).unwrap();
        let rb = optimize_uniform(&tri, 0.96, b).unwrap();
        assert!((q_of(&ra) - 0.885).abs() < 1e-2);
        assert!((q_of(&rb) - 0.879).abs() < 1e-2);
        assert!(q_of(&ra) > q_of(&rb));
    }

    #[test]
    fn spike_uniform_and_counting() {
        let spike = Fixture::CircleWithSpike.network::<f64>();
        let x = spike.node("X").unwrap();
        let a = spike.node("A").unwrap();
        let rx = optimize_uniform(&spike, 0.75, x).unwrap();
        assert!((q_of(&rx) - 0.56).abs() < 5e-3);
        assert!((rx.value - 5.38).abs() < 1e-2);
        let ra = optimize_uniform(&spike, 0.75, a).unwrap();
        assert!((q_of(&ra) - 0.57108).abs() < 5e-3);
        assert!((ra.value - 6.85).abs() < 1e-2);

        let rc = optimize_counting(&spike, 0.75, x).unwrap();
        let TrustPolicy::ByDegree(m) = &rc.policy else { panic!() };
        assert_eq!(m[&2], 1.0);
        assert!((m[&3] - 0.55051).abs() < 1e-4);
        assert!((rc.value - 5.056).abs() < 2e-3);
    }

    #[test]
    fn tree_uniform_and_quartic_numerators() {
        let tree = Fixture::Tree.network::<f64>();
        let (a, b) = (tree.node("A").unwrap(), tree.node("B").unwrap());
        let ra = optimize_uniform(&tree, 0.75, a).unwrap();
        let rb = optimize_uniform(&tree, 0.75, b).unwrap();
        assert!((q_of(&ra) - 0.590).abs() < 5e-3 && (ra.value - 8.057).abs() < 1e-2);
        assert!((q_of(&rb) - 0.573).abs() < 5e-3 && (rb.value - 5.283).abs() < 1e-2);

        let num_a = |p: f64, q: f64| {
            (3.0 - 5.0 * p) * q.powi(4)
                + (23.0 * p - 12.0 * p * p - 7.0) * q.powi(3)
                + (15.0 * p * p - 15.0 * p) * q * q
                + (5.0 * p - 9.0 * p * p) * q
                + 2.0 * p * p
        };
        let num_b = |p: f64, q: f64| {
            (1.0 - p) * q.powi(4)
                + (15.0 * p - 12.0 * p * p - 5.0) * q.powi(3)
                + (15.0 * p * p - 9.0 * p) * q * q
                + (3.0 * p - 9.0 * p * p) * q
                + 2.0 * p * p
        };
        for p in [0.25, 0.5, 0.75] {
            let solver = ExactSolver::new(&tree, p).unwrap();
            let qa = q_of(&optimize_uniform_with(&solver, a).unwrap());
            let qb = q_of(&optimize_uniform_with(&solver, b).unwrap());
            assert!(num_a(p, qa).abs() < 1e-6, "p={p}");
            assert!(num_b(p, qb).abs() < 1e-6, "p={p}");
            assert!(qa > qb);
        }
    }

    #[test]
    fn counting_on_trees_matches_closed_form() {
        let tree = Fixture::Tree.network::<f64>();
        for p in [0.6, 0.75, 0.9] {
            let exact = tree_solve_counting(&tree, p).unwrap();
            let TrustPolicy::ByDegree(want) = &exact.policy else { panic!() };
            for start in [tree.node("A").unwrap(), tree.node("B").unwrap()] {
                let r = optimize_counting(&tree, p, start).unwrap();
                let TrustPolicy::ByDegree(got) = &r.policy else { panic!() };
                // Only coordinates that matter from `start` are identified.
                if start == tree.node("A").unwrap() {
                    for (k, q) in want {
                        assert!((got[k] - q).abs() < 1e-4, "p={p} k={k}");
                    }
                } else {
                    assert!((got[&3] - want[&3]).abs() < 1e-4);
                }
                let rel = (r.value - exact.time[start]).abs() / exact.time[start];
                assert!(rel < 1e-6, "p={p}");
            }
        }
    }

    #[test]
    fn stars_and_lines_match_closed_form() {
        for n in 2..=5usize {
            let rays: Vec<f64> = (0..n - 1).map(|i| 0.5 + i as f64 * 0.7).collect();
            let star = star_network::<f64>(1.3, &rays);
            let centre = star.node("I").unwrap();
            let spec = StarSpec::new(1.3, rays.clone()).unwrap();
            for p in [0.6, 0.9] {
                let want = star_optimal_trust(n, p).unwrap();
                let r = optimize_uniform(&star, p, centre).unwrap();
                assert!((q_of(&r) - want).abs() < 1e-4, "n={n} p={p}");
                let t = star_time(&spec, p, want).unwrap();
                assert!((r.value - t).abs() / t < 1e-6);
                let c = optimize_counting(&star, p, centre).unwrap();
                assert!((c.coordinates()[0].1 - want).abs() < 1e-4);
            }
        }
        let line = line_network::<f64>(&[1.0; 5], 5);
        let want = star_optimal_trust(2, 0.75).unwrap();
        let solver = ExactSolver::new(&line, 0.75).unwrap();
        for j in 0..5 {
            let start = line.node(&j.to_string()).unwrap();
            let r = optimize_uniform_with(&solver, start).unwrap();
            assert!((q_of(&r) - want).abs() < 1e-4, "start {j}");
        }
    }

    #[test]
    fn cycles() {
        let c3 = Fixture::Cycle3.network::<f64>();
        let solver = ExactSolver::new(&c3, 0.75).unwrap();
        let qa = q_of(&optimize_uniform_with(&solver, c3.node("A").unwrap()).unwrap());
        let qb = q_of(&optimize_uniform_with(&solver, c3.node("B").unwrap()).unwrap());
        assert!((qa - 0.78676).abs() < 5e-4);
        assert!((qa - qb).abs() < 1e-5);

        let c4 = Fixture::Cycle4.network::<f64>();
        let solver = ExactSolver::new(&c4, 0.75).unwrap();
        let qa = q_of(&optimize_uniform_with(&solver, c4.node("A").unwrap()).unwrap());
        let qc = q_of(&optimize_uniform_with(&solver, c4.node("C").unwrap()).unwrap());
        assert!((qa - qc).abs() > 1e-3, "{qa} vs {qc}");
    }

    #[test]
    fn uniform_optimum_is_interior() {
        for f in Fixture::ALL {
            let net = f.network::<f64>();
            for v in net.nodes().filter(|&v| net.is_branch(v)) {
                let q = q_of(&optimize_uniform(&net, 0.7, v).unwrap());
                assert!(q > 2.0 * TRUST_CLAMP && q < 1.0 - 2.0 * TRUST_CLAMP, "{f:?} {} {q}", net.name(v));
            }
        }
    }

    #[test]
    fn optimal_time_nonincreasing_in_p() {
        let grid: Vec<f64> = (0..=11).map(|i| 0.55 + 0.04 * i as f64).collect();
        for f in Fixture::ALL {
            let net = f.network::<f64>();
            let start = net
                .nodes()
                .filter(|&v| v != net.home())
                .max_by(|&a, &b| {
                    crate::network::shortest_paths(&net).distance[a]
                        .partial_cmp(&crate::network::shortest_paths(&net).distance[b])
                        .unwrap()
                })
                .unwrap();
            let curve = trust_curve(&net, &grid, start, TrustMode::Uniform).unwrap();
            for w in curve.windows(2) {
                assert!(w[1].1.value <= w[0].1.value + 1e-9, "{f:?} at p={}", w[1].0);
            }
        }
    }

    #[test]
    fn star_curve_and_warm_start() {
        let star = star_network::<f64>(1.0, &[1.0, 2.0]);
        let centre = star.node("I").unwrap();
        let grid = [0.2, 0.4, 0.6, 0.8];
        for mode in [TrustMode::Uniform, TrustMode::Counting] {
            let curve = trust_curve(&star, &grid, centre, mode).unwrap();
            for (p, r) in curve {
                let want = star_optimal_trust(3, p).unwrap();
                assert!((r.coordinates()[0].1 - want).abs() < 1e-4, "{mode:?} p={p}");
            }
        }
        assert!(trust_curve(&star, &[0.0], centre, TrustMode::Uniform).is_err());
    }

    #[test]
    fn triangle_crossover() {
        let tri = Fixture::Triangle.network::<f64>();
        let (a, b) = (tri.node("A").unwrap(), tri.node("B").unwrap());
        let (p, q) = uniform_crossover(&tri, a, b, 0.90, 0.95, 1e-4).unwrap();
        assert!((0.90..=0.95).contains(&p));
        assert!((p - 0.925).abs() < 2e-3, "{p}");
        assert!((q - 0.84).abs() < 1e-2, "{q}");
    }

    #[test]
    fn cap_exceeded_propagates() {
        let tri = Fixture::Triangle.network::<f64>();
        let solver = ExactSolver::with_cap(&tri, 0.75, 1);
        assert!(matches!(solver, Err(Error::CapExceeded { .. })));
    }
}
