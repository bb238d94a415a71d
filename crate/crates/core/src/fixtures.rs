//! Built-in example networks used for regression runs.

use crate::netfile::{ArcDescription, NetworkDescription};
use crate::network::Network;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixture {
    /// Triangle A, B, C = H with AB = BC = 1 and AC = 3.
    Triangle,
    /// Node A joined to X by two parallel arcs of lengths 1 and 2, and XH = 1.
    CircleWithSpike,
    /// Unit tree: leaf 2-A-B-H with leaf 1 hanging off B.
    Tree,
    /// Unit line 0-1-..-7 with home 7.
    UnitLine,
    /// Unit cycle H, A, B.
    Cycle3,
    /// Unit cycle H, A, C, B; C is antipodal to H.
    Cycle4,
}

impl Fixture {
    pub const ALL: [Fixture; 6] = [
        Fixture::Triangle,
        Fixture::CircleWithSpike,
        Fixture::Tree,
        Fixture::UnitLine,
        Fixture::Cycle3,
        Fixture::Cycle4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Triangle => "triangle",
            Fixture::CircleWithSpike => "spike",
            Fixture::Tree => "tree",
            Fixture::UnitLine => "line7",
            Fixture::Cycle3 => "c3",
            Fixture::Cycle4 => "c4",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Fixture::Triangle => "triangle A-B-C=H; AB=BC=1; AC=3",
            Fixture::CircleWithSpike => "circle with spike: A=X by arcs of length 1 and 2; XH=1",
            Fixture::Tree => "unit tree with branch nodes A (deg 2) and B (deg 3)",
            Fixture::UnitLine => "unit line 0..7 with home 7",
            Fixture::Cycle3 => "unit cycle H-A-B",
            Fixture::Cycle4 => "unit cycle H-A-C-B",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn description(self) -> NetworkDescription {
        let arcs: &[(&str, &str, &str, f64)] = match self {
            Fixture::Triangle => &[("AB", "A", "B", 1.0), ("BC", "B", "C", 1.0), ("AC", "A", "C", 3.0)],
            Fixture::CircleWithSpike => &[
                ("XH", "X", "H", 1.0),
                ("short", "A", "X", 1.0),
                ("long", "A", "X", 2.0),
            ],
            Fixture::Tree => &[
                ("A2", "A", "2", 1.0),
                ("AB", "A", "B", 1.0),
                ("B1", "B", "1", 1.0),
                ("BH", "B", "H", 1.0),
            ],
            Fixture::UnitLine => return line_description(&[1.0; 7], 7),
            Fixture::Cycle3 => &[("HA", "H", "A", 1.0), ("AB", "A", "B", 1.0), ("BH", "B", "H", 1.0)],
            Fixture::Cycle4 => &[
                ("HA", "H", "A", 1.0),
                ("AC", "A", "C", 1.0),
                ("CB", "C", "B", 1.0),
                ("BH", "B", "H", 1.0),
            ],
        };
        let home = match self {
            Fixture::Triangle => "C",
            _ => "H",
        };
        NetworkDescription {
            home: home.into(),
            arcs: arcs
                .iter()
                .map(|&(id, u, v, length)| ArcDescription {
                    id: id.into(),
                    u: u.into(),
                    v: v.into(),
                    length,
                })
                .collect(),
        }
    }

    pub fn network<T: Scalar>(self) -> Network<T> {
        Network::build(&self.description()).expect("built-in fixture is valid")
    }
}

/// Line with nodes `0..=lengths.len()`, arc `i` joining `i` and `i + 1`.
pub fn line_description(lengths: &[f64], home: usize) -> NetworkDescription {
    assert!(home <= lengths.len());
    NetworkDescription {
        home: home.to_string(),
        arcs: lengths
            .iter()
            .enumerate()
            .map(|(i, &length)| ArcDescription {
                id: format!("e{i}"),
                u: i.to_string(),
                v: (i + 1).to_string(),
                length,
            })
            .collect(),
    }
}

pub fn line_network<T: Scalar>(lengths: &[f64], home: usize) -> Network<T> {
    Network::build(&line_description(lengths, home)).expect("valid line")
}

/// Star with centre `I`, home ray of length `home_ray` and further rays to
/// leaves `L1, L2, ..`.
pub fn star_description(home_ray: f64, rays: &[f64]) -> NetworkDescription {
    let mut arcs = vec![ArcDescription {
        id: "IH".into(),
        u: "I".into(),
        v: "H".into(),
        length: home_ray,
    }];
    for (i, &length) in rays.iter().enumerate() {
        arcs.push(ArcDescription {
            id: format!("r{}", i + 1),
            u: "I".into(),
            v: format!("L{}", i + 1),
            length,
        });
    }
    NetworkDescription {
        home: "H".into(),
        arcs,
    }
}

pub fn star_network<T: Scalar>(home_ray: f64, rays: &[f64]) -> Network<T> {
    Network::build(&star_description(home_ray, rays)).expect("valid star")
}

/// The three-node line `{0, 1, 2 = H}` used by the treasure hunt.
pub fn game_line<T: Scalar>() -> Network<T> {
    line_network(&[1.0, 1.0], 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build_and_round_trip_by_name() {
        for f in Fixture::ALL {
            let net = f.network::<f64>();
            assert!(net.node_count() >= 3);
            assert_eq!(Fixture::from_name(f.name()), Some(f));
        }
        assert_eq!(Fixture::from_name("nope"), None);
    }
}
