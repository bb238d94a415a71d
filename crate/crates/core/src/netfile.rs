//! Network description files.
//!
//! Two encodings of the same content are accepted.
//!
//! Line-oriented text:
//!
//! ```text
//! # comment
//! home C
//! arc AB A B 1
//! arc BC B C 1
//! arc AC A C 3
//! ```
//!
//! Tokens are separated by ASCII whitespace. Blank lines and lines whose first
//! non-blank character is `#` are ignored. Exactly one `home` line is required.
//!
//! JSON object:
//!
//! ```json
//! {"home": "C", "arcs": [{"id": "AB", "u": "A", "v": "B", "length": 1.0}]}
//! ```
//!
//! A document whose first non-blank character is `{` is read as JSON.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDescription {
    pub id: String,
    pub u: String,
    pub v: String,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDescription {
    pub home: String,
    pub arcs: Vec<ArcDescription>,
}

impl NetworkDescription {
    /// Parses either encoding, detected by the first non-blank character.
    pub fn parse(input: &str) -> Result<Self> {
        if input.trim_start().starts_with('{') {
            Self::from_json(input)
        } else {
            Self::from_text(input)
        }
    }

    pub fn from_json(input: &str) -> Result<Self> {
        serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_text(input: &str) -> Result<Self> {
        let mut home = None;
        let mut arcs = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = lineno + 1;
            let tokens: Vec<&str> = line.split_ascii_whitespace().collect();
            match tokens.as_slice() {
                ["home", node] => {
                    if home.replace(node.to_string()).is_some() {
                        return Err(Error::Parse(format!("line {lineno}: second `home` line")));
                    }
                }
                ["arc", id, u, v, length] => {
                    let length: f64 = length.parse().map_err(|_| {
                        Error::Parse(format!("line {lineno}: bad arc length `{length}`"))
                    })?;
                    arcs.push(ArcDescription {
                        id: id.to_string(),
                        u: u.to_string(),
                        v: v.to_string(),
                        length,
                    });
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "line {lineno}: expected `home <node>` or `arc <id> <u> <v> <length>`, got `{line}`"
                    )))
                }
            }
        }
        let home = home.ok_or_else(|| Error::Parse("missing `home` line".into()))?;
        Ok(Self { home, arcs })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("home {}\n", self.home);
        for a in &self.arcs {
            out.push_str(&format!("arc {} {} {} {}\n", a.id, a.u, a.v, a.length));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("description serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_text_with_comments() {
        let d = NetworkDescription::parse(
            "# triangle\n\nhome C\narc AB A B 1\n  arc BC B C 1 \narc AC A C 3\n",
        )
        .unwrap();
        assert_eq!(d.home, "C");
        assert_eq!(d.arcs.len(), 3);
        assert_eq!(d.arcs[2].length, 3.0);
    }

    #[test]
    fn parses_json() {
        let d = NetworkDescription::parse(
            r#" {"home":"H","arcs":[{"id":"e","u":"I","v":"H","length":5}]}"#,
        )
        .unwrap();
        assert_eq!(d.arcs[0].length, 5.0);
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in [
            "arc a I H 1\n",
            "home H\nhome I\n",
            "home H\narc a I H one\n",
            "home H\nedge a I H 1\n",
            "home H\narc a I H\n",
        ] {
            assert!(
                matches!(NetworkDescription::parse(bad), Err(Error::Parse(_))),
                "{bad:?}"
            );
        }
        assert!(NetworkDescription::parse(r#"{"home":"H","arcs":[],"x":1}"#).is_err());
    }

    proptest! {
        #[test]
        fn text_and_json_round_trip(
            arcs in prop::collection::vec(("[A-Za-z0-9]{1,4}", "[A-Z]{1,3}", "[a-z]{1,3}", 0.001f64..1e6), 0..8)
        ) {
            let desc = NetworkDescription {
                home: "H".into(),
                arcs: arcs.into_iter().map(|(id, u, v, length)| ArcDescription { id, u, v, length }).collect(),
            };
            prop_assert_eq!(&NetworkDescription::parse(&desc.to_text()).unwrap(), &desc);
            prop_assert_eq!(&NetworkDescription::parse(&desc.to_json()).unwrap(), &desc);
        }
    }
}
