use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use satnav_core::closed_form::{line_cross_time_with_z, line_increments_with_z, line_z, optimal_line_z};
use satnav_core::fixtures::star_network;
use satnav_core::game::{best_response_curves, equilibrium, simulate_game, GameMode};
use satnav_core::optimizer::{branch_degrees, trust_curve, TrustMode};
use satnav_core::simulate::{simulate, SimulationConfig};
use satnav_core::{Error, ExactSolver, Fixture, Network, NetworkDescription, NodeId, TrustPolicy};
use thiserror::Error as ThisError;

use crate::args::{
    Command, FixturesArgs, GameArgs, GameModeArg, LineArgs, ModeArg, NetworkArgs, OptimizeArgs,
    OutputArgs, ReliabilityArgs, SolveArgs,
};

/// Plays longer than this many steps are censored in game simulations.
const GAME_MAX_STEPS: usize = 1_000_000;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot write output: {0}")]
    Write(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::CapExceeded { .. }) => 3,
            CliError::Core(Error::SingularSystem { .. } | Error::NonConvergence { .. }) => 4,
            CliError::Write(_) => 4,
            _ => 2,
        }
    }

    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(Error::CapExceeded { .. }) => {
                Some("rerun with --simulate <N_WALKS> to estimate times by Monte Carlo")
            }
            _ => None,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(command: &Command) -> CliResult<()> {
    match command {
        Command::Solve(a) => emit(&a.output, solve(a)?),
        Command::Optimize(a) => emit(&a.output, optimize(a)?),
        Command::Line(a) => emit(&a.output, line(a)?),
        Command::Game(a) => emit(&a.output, game(a)?),
        Command::Fixtures(a) => fixtures(a),
    }
}

fn header(seed: u64) -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!(
        "# satnav {}\n# command: satnav {}\n# seed: {seed}\n",
        env!("CARGO_PKG_VERSION"),
        args.join(" ")
    )
}

fn emit(out: &OutputArgs, body: String) -> CliResult<()> {
    let text = header(out.seed) + &body;
    write_text(out.out.as_deref(), &text)
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Write(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Write(e.to_string()))
        }
    }
}

fn load_network(a: &NetworkArgs) -> CliResult<Network<f64>> {
    if let Some(path) = &a.net {
        let text = fs::read_to_string(path).map_err(|e| CliError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        return Ok(Network::build(&NetworkDescription::parse(&text)?)?);
    }
    if let Some(name) = &a.fixture {
        let f = Fixture::from_name(name).ok_or_else(|| {
            CliError::Usage(format!("unknown fixture `{name}`; see `satnav fixtures`"))
        })?;
        return Ok(f.network());
    }
    if let Some(n) = a.star {
        if n < 2 {
            return Err(CliError::Usage(format!("--star needs at least 2 rays, got {n}")));
        }
        return Ok(star_network(1.0, &vec![1.0; n - 1]));
    }
    Err(CliError::Usage("give one of --net, --fixture or --star".into()))
}

fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Parses `lo:hi:step` into an increasing grid including both ends.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("grid `{spec}` is not lo:hi:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CliError::Usage(format!(
            "grid `{spec}` needs lo <= hi and step > 0"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| tidy(lo + step * i as f64)).collect())
}

fn reliabilities(a: &ReliabilityArgs) -> CliResult<Vec<f64>> {
    let grid = match (&a.p, &a.curve) {
        (Some(p), None) => vec![*p],
        (p, Some(c)) => {
            if p.is_some() {
                eprintln!("warning: --p is ignored when --curve is given");
            }
            parse_grid(c)?
        }
        (None, None) => return Err(CliError::Usage("give --p or --curve".into())),
    };
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(CliError::Usage(format!("reliability {p} not in [0, 1]")));
    }
    Ok(grid)
}

fn solve(a: &SolveArgs) -> CliResult<String> {
    let net = load_network(&a.network)?;
    let ps = reliabilities(&a.reliability)?;
    let degree_trusts = a.degree_trusts();
    let policy = match (a.q, degree_trusts.is_empty()) {
        (Some(q), _) => TrustPolicy::Uniform(q),
        (None, false) => TrustPolicy::by_degree(degree_trusts),
        (None, true) => return Err(CliError::Usage("give --q or --q2 ... --q9".into())),
    };
    policy.validate_for(&net)?;
    let target = match &a.to {
        Some(name) => net.node(name)?,
        None => net.home(),
    };
    let starts: Vec<NodeId> = match &a.start {
        Some(name) => vec![net.node(name)?],
        None => net.nodes().filter(|&v| v != target).collect(),
    };

    let mut out = String::from("start,to,p,policy,time");
    if a.simulate.is_some() {
        out.push_str(",sim_mean,sim_se,sim_censored");
    }
    out.push('\n');
    for &p in &ps {
        let solver = match ExactSolver::new(&net, p) {
            Ok(s) => Some(s),
            Err(Error::CapExceeded { .. }) if a.simulate.is_some() => None,
            Err(e) => return Err(e.into()),
        };
        for &start in &starts {
            let time = match &solver {
                Some(s) => s.expected_time_between(&policy, start, target)?.to_string(),
                None => String::new(),
            };
            write!(
                out,
                "{},{},{p},{policy},{time}",
                net.name(start),
                net.name(target)
            )
            .unwrap();
            if let Some(n) = a.simulate {
                let mut cfg = SimulationConfig::new(n, a.output.seed);
                cfg.target = Some(target);
                let sim = simulate(&net, p, &policy, start, &cfg)?;
                write!(out, ",{},{},{}", sim.mean, sim.std_error, sim.censored).unwrap();
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn optimize(a: &OptimizeArgs) -> CliResult<String> {
    let net = load_network(&a.network)?;
    let ps = reliabilities(&a.reliability)?;
    let start = match (&a.start, a.network.star) {
        (Some(name), _) => net.node(name)?,
        (None, Some(_)) => net.node("I")?,
        (None, None) => return Err(CliError::Usage("give --start".into())),
    };
    let (mode, label) = match a.mode {
        ModeArg::Uniform => (TrustMode::Uniform, "uniform"),
        ModeArg::Counting => (TrustMode::Counting, "counting"),
    };
    let degrees = branch_degrees(&net);
    let mut out = String::from("p,start,mode");
    match mode {
        TrustMode::Uniform => out.push_str(",q"),
        TrustMode::Counting => {
            for k in &degrees {
                write!(out, ",q{k}").unwrap();
            }
        }
    }
    out.push_str(",value\n");
    for (p, r) in trust_curve(&net, &ps, start, mode)? {
        write!(out, "{p},{},{label}", net.name(start)).unwrap();
        for (_, q) in r.coordinates() {
            write!(out, ",{q}").unwrap();
        }
        writeln!(out, ",{}", r.value).unwrap();
    }
    Ok(out)
}

fn line(a: &LineArgs) -> CliResult<String> {
    let ps = reliabilities(&a.reliability)?;
    let (lengths, last) = match &a.lengths {
        Some(ls) if !ls.is_empty() => {
            if let Some(l) = ls.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
                return Err(CliError::Usage(format!("arc length {l} must be positive")));
            }
            (ls.clone(), ls.len())
        }
        Some(_) => return Err(CliError::Usage("--lengths is empty".into())),
        None => (vec![1.0; a.max_j + 1], a.max_j),
    };
    let mut out = String::from("p,z,j,T0j,Sj\n");
    for &p in &ps {
        let z = match a.q {
            Some(q) => line_z(p, q)?,
            None => optimal_line_z(p)?,
        };
        let incs = line_increments_with_z(&lengths, z);
        for j in 0..=last {
            let t = line_cross_time_with_z(&lengths, j, z)?;
            let s = incs.get(j).map(f64::to_string).unwrap_or_default();
            writeln!(out, "{p},{z},{j},{t},{s}").unwrap();
        }
    }
    Ok(out)
}

fn game(a: &GameArgs) -> CliResult<String> {
    let ps = reliabilities(&a.reliability)?;
    let (mode, label) = match a.mode {
        GameModeArg::Symmetric => (GameMode::Symmetric, "symmetric"),
        GameModeArg::Asymmetric => (GameMode::Asymmetric, "asymmetric"),
    };
    let mut out = String::from("p,mode,regime,q_hat,r_hat,value");
    if a.simulate.is_some() {
        out.push_str(",sim_win_rate,sim_se");
    }
    out.push('\n');
    for &p in &ps {
        let s = equilibrium(mode, p)?;
        write!(
            out,
            "{p},{label},{},{},{},{}",
            s.regime.label(),
            s.q_star,
            s.r_star,
            s.value
        )
        .unwrap();
        if let Some(n) = a.simulate {
            let sim = simulate_game(mode, p, s.q_star, s.r_star, n, a.output.seed, GAME_MAX_STEPS)?;
            write!(out, ",{},{}", sim.win_rate, sim.std_error).unwrap();
        }
        out.push('\n');
    }
    if a.responses {
        if !(a.grid > 0.0 && a.grid < 1.0) {
            return Err(CliError::Usage(format!("--grid {} not in (0, 1)", a.grid)));
        }
        let grid: Vec<f64> = (1..)
            .map(|i| tidy(a.grid * i as f64))
            .take_while(|&x| x < 1.0 - 1e-12)
            .collect();
        out.push_str("# best responses\np,curve,x,best_response\n");
        for &p in &ps {
            let c = best_response_curves(p, mode, &grid)?;
            for (q, r) in c.r_given_q {
                writeln!(out, "{p},r_given_q,{q},{r}").unwrap();
            }
            for (r, q) in c.q_given_r {
                writeln!(out, "{p},q_given_r,{r},{q}").unwrap();
            }
        }
    }
    Ok(out)
}

fn fixtures(a: &FixturesArgs) -> CliResult<()> {
    let text = match &a.name {
        None => {
            let mut out = String::from("name,nodes,arcs,home,summary\n");
            for f in Fixture::ALL {
                let net = f.network::<f64>();
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    f.name(),
                    net.node_count(),
                    net.arc_count(),
                    net.name(net.home()),
                    f.summary()
                )
                .unwrap();
            }
            header(0) + &out
        }
        Some(name) => {
            let f = Fixture::from_name(name)
                .ok_or_else(|| CliError::Usage(format!("unknown fixture `{name}`")))?;
            if a.json {
                f.description().to_json() + "\n"
            } else {
                format!("# {}\n{}", f.summary(), f.description().to_text())
            }
        }
    };
    write_text(a.out.as_deref(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("0.5:1:0.25").unwrap(), vec![0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.5:0.5:0.1").unwrap(), vec![0.5]);
        assert!(parse_grid("0.5:0.4:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
        let g = parse_grid("0.05:0.95:0.05").unwrap();
        assert_eq!(g.len(), 19);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exit_codes() {
        let cap = CliError::Core(Error::CapExceeded { count: 10, cap: 1 });
        assert_eq!(cap.exit_code(), 3);
        assert!(cap.hint().is_some());
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(Error::NonConvergence { sweeps: 100 }).exit_code(), 4);
    }
}
