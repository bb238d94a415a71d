//! First-to-home game on the three-node line `0 - 1 - 2`, home at `2`.
//!
//! Both players read the same pointer at node 1, correct with probability
//! `p`. Player I trusts it with probability `q`, Player II with `r`. The
//! payoff is the probability that Player I reaches home first.
//!
//! * Symmetric start: both begin at node 1 and move simultaneously; a tie at
//!   home is settled by a fair coin.
//! * Asymmetric start: I begins at node 1 and II at node 0, so they are
//!   never at node 1 together and ties cannot occur.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::optimizer::minimize_scalar;
use crate::scalar::{is_probability, Scalar};
use crate::simulate::block_rng;

const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameMode {
    Symmetric,
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameRegime {
    SymmetricStart,
    /// `p >= 4/5`: I always follows the pointer.
    AsymHighP,
    /// `1/2 < p < 4/5`: I trusts with `Q(p)`.
    AsymMidP,
    /// `p = 1/2`: both players walk at random.
    AsymRandomWalk,
}

impl GameRegime {
    pub fn label(self) -> &'static str {
        match self {
            GameRegime::SymmetricStart => "symmetric",
            GameRegime::AsymHighP => "asym-high-p",
            GameRegime::AsymMidP => "asym-mid-p",
            GameRegime::AsymRandomWalk => "asym-random-walk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GamePayoff<T> {
    pub p: T,
    pub q: T,
    pub r: T,
    /// Probability that Player I wins.
    pub v: T,
}

impl<T: Scalar> GamePayoff<T> {
    pub fn evaluate(mode: GameMode, p: T, q: T, r: T) -> Result<Self> {
        let v = match mode {
            GameMode::Symmetric => symmetric_payoff(p, q, r)?,
            GameMode::Asymmetric => asymmetric_payoff(p, q, r)?,
        };
        Ok(Self { p, q, r, v })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameSolution<T> {
    pub regime: GameRegime,
    pub q_star: T,
    pub r_star: T,
    pub value: T,
}

fn check_probabilities<T: Scalar>(p: T, q: T, r: T) -> Result<()> {
    for (name, x) in [("p", p), ("q", q), ("r", r)] {
        if !is_probability(x) {
            return Err(Error::OutOfRange(format!("{name} = {x} not in [0, 1]")));
        }
    }
    Ok(())
}

/// Symmetric-start payoff
/// `p (2q - qr) / (2q + 2r - 2qr) + (1 - p) (1 - q + r - qr) / (2 (1 - qr))`.
///
/// A component with positive weight and a vanishing denominator describes
/// play that never ends (`q = r = 0` with a correct pointer, `q = r = 1`
/// with a wrong one) and is reported as [`Error::DegeneratePolicy`].
pub fn symmetric_payoff<T: Scalar>(p: T, q: T, r: T) -> Result<T> {
    check_probabilities(p, q, r)?;
    let (one, two) = (T::one(), T::lit(2.0));
    let mut v = T::zero();
    if p > T::zero() {
        let den = two * q + two * r - two * q * r;
        if den == T::zero() {
            return Err(Error::DegeneratePolicy(
                "neither player ever moves home along a correct pointer".into(),
            ));
        }
        v = v + p * (two * q - q * r) / den;
    }
    if p < one {
        let den = two * (one - q * r);
        if den == T::zero() {
            return Err(Error::DegeneratePolicy(
                "both players always follow a wrong pointer".into(),
            ));
        }
        v = v + (one - p) * (one - q + r - q * r) / den;
    }
    Ok(v)
}

/// Asymmetric-start payoff `p q / (q + r - qr) + (1 - p) (1 - q) / (1 - qr)`.
///
/// When a component's denominator vanishes neither player ever reaches home
/// in that component, so I does not win it: `q = r = 0` gives `v = 1 - p`
/// and `q = r = 1` gives `v = p`.
pub fn asymmetric_payoff<T: Scalar>(p: T, q: T, r: T) -> Result<T> {
    check_probabilities(p, q, r)?;
    let one = T::one();
    let den_plus = q + r * (one - q);
    let plus = if den_plus == T::zero() { T::zero() } else { q / den_plus };
    let den_minus = one - q * r;
    let minus = if den_minus == T::zero() { T::zero() } else { (one - q) / den_minus };
    Ok(p * plus + (one - p) * minus)
}

/// Symmetric equilibrium trust, the rationalised
/// `(-1 + p + sqrt(1 - 3p + 3p²)) / (2p - 1)`. Finite at `p = 1/2`.
pub fn symmetric_equilibrium_trust<T: Scalar>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::OutOfRange(format!("reliability {p} not in (0, 1)")));
    }
    let one = T::one();
    let root = (one - T::lit(3.0) * p + T::lit(3.0) * p * p).sqrt();
    Ok(p / (root + one - p))
}

pub fn symmetric_equilibrium<T: Scalar>(p: T) -> Result<GameSolution<T>> {
    let q = symmetric_equilibrium_trust(p)?;
    Ok(GameSolution {
        regime: GameRegime::SymmetricStart,
        q_star: q,
        r_star: q,
        value: T::lit(0.5),
    })
}

/// `Q(p) = (1 + p - 3 sqrt(p (1 - p))) / (2p - 1)`, evaluated as
/// `(5p - 1) / (1 + p + 3 sqrt(p (1 - p)))`.
pub fn asymmetric_trust<T: Scalar>(p: T) -> T {
    let root = (p * (T::one() - p)).sqrt();
    (T::lit(5.0) * p - T::one()) / (T::one() + p + T::lit(3.0) * root)
}

/// `f(p, q) = -1 + 5p - 2q - 2pq - q² + 2pq²`, whose sign change in `q` marks
/// I's optimal trust in the asymmetric game.
pub fn asymmetric_first_order<T: Scalar>(p: T, q: T) -> T {
    let two = T::lit(2.0);
    -T::one() + T::lit(5.0) * p - two * q - two * p * q - q * q + two * p * q * q
}

pub fn asymmetric_equilibrium<T: Scalar>(p: T) -> Result<GameSolution<T>> {
    let half = T::lit(0.5);
    if !(p >= half && p <= T::one()) {
        return Err(Error::OutOfRange(format!(
            "asymmetric game needs 1/2 <= p <= 1, got {p}"
        )));
    }
    let (regime, q_star, value) = if p == half {
        (GameRegime::AsymRandomWalk, half, T::lit(2.0) / T::lit(3.0))
    } else if p >= T::lit(0.8) {
        (GameRegime::AsymHighP, T::one(), p)
    } else {
        let value = T::lit(4.0) / T::lit(3.0) * (T::one() - (p * (T::one() - p)).sqrt());
        (GameRegime::AsymMidP, asymmetric_trust(p), value)
    };
    Ok(GameSolution {
        regime,
        q_star,
        r_star: half,
        value,
    })
}

pub fn equilibrium<T: Scalar>(mode: GameMode, p: T) -> Result<GameSolution<T>> {
    match mode {
        GameMode::Symmetric => symmetric_equilibrium(p),
        GameMode::Asymmetric => asymmetric_equilibrium(p),
    }
}

/// Equilibrium on `net`, which must be the three-node line with home at an
/// end. Other networks are rejected.
pub fn equilibrium_on<T: Scalar>(
    net: &Network<T>,
    mode: GameMode,
    p: T,
) -> Result<GameSolution<T>> {
    let h = net.home();
    let is_line3 = net.node_count() == 3
        && net.arc_count() == 2
        && net.degree(h) == 1
        && net.nodes().any(|v| v != h && net.degree(v) == 2);
    if !is_line3 {
        return Err(Error::UnsupportedGameNetwork(format!(
            "games are defined on the three-node line only ({} nodes, {} arcs)",
            net.node_count(),
            net.arc_count()
        )));
    }
    equilibrium(mode, p)
}

/// Best responses on `grid`: `r̂(q)` minimises I's payoff for each `q`,
/// `q̂(r)` maximises it for each `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurves<T> {
    pub r_given_q: Vec<(T, T)>,
    pub q_given_r: Vec<(T, T)>,
}

pub fn best_response_r<T: Scalar>(mode: GameMode, p: T, q: T) -> Result<T> {
    let m = minimize_scalar(
        |r| GamePayoff::evaluate(mode, p, q, r).map(|g| g.v),
        T::zero(),
        T::one(),
    )?;
    Ok(m.x)
}

pub fn best_response_q<T: Scalar>(mode: GameMode, p: T, r: T) -> Result<T> {
    let m = minimize_scalar(
        |q| GamePayoff::evaluate(mode, p, q, r).map(|g| T::one() - g.v),
        T::zero(),
        T::one(),
    )?;
    Ok(m.x)
}

pub fn best_response_curves<T: Scalar>(
    p: T,
    mode: GameMode,
    grid: &[T],
) -> Result<ResponseCurves<T>> {
    if let Some(x) = grid.iter().find(|&&x| !(x > T::zero() && x < T::one())) {
        return Err(Error::OutOfRange(format!("response grid point {x} not in (0, 1)")));
    }
    Ok(ResponseCurves {
        r_given_q: grid
            .iter()
            .map(|&q| best_response_r(mode, p, q).map(|r| (q, r)))
            .collect::<Result<_>>()?,
        q_given_r: grid
            .iter()
            .map(|&r| best_response_q(mode, p, r).map(|q| (r, q)))
            .collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameSimulation {
    /// Fraction of finished plays won by Player I (ties count one half).
    pub win_rate: f64,
    pub std_error: f64,
    pub completed: usize,
    /// Plays stopped after `max_steps` without a winner.
    pub censored: usize,
}

/// Monte Carlo play of the game. One pointer is drawn per play and both
/// players move every time step. Plays are grouped in blocks of 1024 with
/// one rng stream per block.
pub fn simulate_game(
    mode: GameMode,
    p: f64,
    q: f64,
    r: f64,
    n_plays: usize,
    seed: u64,
    max_steps: usize,
) -> Result<GameSimulation> {
    check_probabilities(p, q, r)?;
    if n_plays == 0 {
        return Err(Error::OutOfRange("n_plays must be at least 1".into()));
    }
    const HOME: u8 = 2;
    let play = |rng: &mut rand_chacha::ChaCha8Rng| -> Option<f64> {
        let correct = rng.gen::<f64>() < p;
        let mut at = match mode {
            GameMode::Symmetric => [1u8, 1u8],
            GameMode::Asymmetric => [1u8, 0u8],
        };
        for _ in 0..max_steps {
            for (pos, trust) in at.iter_mut().zip([q, r]) {
                *pos = if *pos == 0 {
                    1
                } else {
                    let follow = rng.gen::<f64>() < trust;
                    if follow == correct {
                        HOME
                    } else {
                        0
                    }
                };
            }
            match (at[0] == HOME, at[1] == HOME) {
                (true, true) => {
                    assert!(mode == GameMode::Symmetric, "tie in the asymmetric game");
                    return Some(if rng.gen::<bool>() { 1.0 } else { 0.0 });
                }
                (true, false) => return Some(1.0),
                (false, true) => return Some(0.0),
                (false, false) => {}
            }
        }
        None
    };

    let blocks = n_plays.div_ceil(BLOCK);
    let per_block: Vec<(f64, usize, usize)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK.min(n_plays - b * BLOCK);
            let (mut wins, mut done, mut censored) = (0.0, 0, 0);
            for _ in 0..count {
                match play(&mut rng) {
                    Some(w) => {
                        wins += w;
                        done += 1;
                    }
                    None => censored += 1,
                }
            }
            (wins, done, censored)
        })
        .collect();
    let (wins, completed, censored) = per_block
        .into_iter()
        .fold((0.0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let win_rate = if completed == 0 { f64::NAN } else { wins / completed as f64 };
    // Bernoulli standard error; with ties the true one is slightly smaller.
    let std_error = (win_rate * (1.0 - win_rate) / completed as f64).sqrt();
    Ok(GameSimulation {
        win_rate,
        std_error,
        completed,
        censored,
    })
}
