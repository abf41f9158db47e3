use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    GroupInfo,
    Anyons,
    Subgroups,
    Lagrangian,
    Excitations,
    Defects,
    QuditDim,
    LatticeAudit,
    Gsd,
    Logical,
    ChargeProject,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GroupInfo => "group-info",
            Command::Anyons => "anyons",
            Command::Subgroups => "subgroups",
            Command::Lagrangian => "lagrangian",
            Command::Excitations => "excitations",
            Command::Defects => "defects",
            Command::QuditDim => "qudit-dim",
            Command::LatticeAudit => "lattice-audit",
            Command::Gsd => "gsd",
            Command::Logical => "logical",
            Command::ChargeProject => "charge-project",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RimGauge {
    /// Edge gauge projectors only on rim edges outside every plaquette.
    #[default]
    Dangling,
    /// Edge gauge projectors on every rim edge (does not commute).
    All,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn is_default<T: Default + PartialEq>(x: &T) -> bool {
    *x == T::default()
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub rim_gauge: RimGauge,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tunnels: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command, group: &str) -> RunConfig {
        RunConfig {
            command,
            group: group.to_string(),
            subgroup: None,
            subgroup2: None,
            lattice: None,
            format: Format::Json,
            tolerance: DEFAULT_TOLERANCE,
            threads: None,
            method: None,
            rim_gauge: RimGauge::Dangling,
            tunnels: Vec::new(),
            loops: Vec::new(),
            hole: None,
            offset: None,
            ring: None,
        }
    }

    pub fn parse(s: &str) -> Result<RunConfig, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = RunConfig::new(Command::Logical, "cyclic:3");
        c.lattice = Some("annulus:3x3".into());
        c.subgroup = Some("trivial".into());
        c.tunnels = vec!["C0-pi1".into()];
        c.threads = Some(2);
        let s = c.to_json();
        let back = RunConfig::parse(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::parse(r#"{"command": "gsd", "group": "cyclic:2"}"#).unwrap();
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.tolerance, DEFAULT_TOLERANCE);
        assert_eq!(RunConfig::parse(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = RunConfig::parse(r#"{"command": "gsd", "group": "cyclic:2", "colour": 1}"#);
        assert!(err.is_err());
        assert!(RunConfig::parse(r#"{"command": "nope", "group": "cyclic:2"}"#).is_err());
    }

    mod round_trip_props {
        use super::*;
        use proptest::prelude::*;

        fn command() -> impl Strategy<Value = Command> {
            proptest::sample::select(Command::value_variants().to_vec())
        }

        fn text() -> impl Strategy<Value = String> {
            "[ -~]{0,12}"
        }

        prop_compose! {
            fn config()(
                command in command(),
                group in text(),
                subgroup in proptest::option::of(text()),
                subgroup2 in proptest::option::of(text()),
                lattice in proptest::option::of(text()),
                format in proptest::sample::select(vec![Format::Json, Format::Csv, Format::Pretty]),
                tolerance in 0.0..1.0f64,
                threads in proptest::option::of(1..64usize),
                method in proptest::option::of(text()),
                all in any::<bool>(),
                tunnels in proptest::collection::vec(text(), 0..3),
                loops in proptest::collection::vec(text(), 0..3),
                hole in proptest::option::of(0..8usize),
                offset in proptest::option::of(0..8usize),
                ring in proptest::option::of(1..8usize),
            ) -> RunConfig {
                RunConfig {
                    command, group, subgroup, subgroup2, lattice, format, tolerance, threads, method,
                    rim_gauge: if all { RimGauge::All } else { RimGauge::Dangling },
                    tunnels, loops, hole, offset, ring,
                }
            }
        }

        proptest! {
            #[test]
            fn serialize_then_parse_is_identity(c in config()) {
                let s = c.to_json();
                let back = RunConfig::parse(&s).unwrap();
                prop_assert_eq!(&back, &c);
                prop_assert_eq!(back.to_json(), s);
            }
        }
    }
}
