//! JSON experiment configs and their validation.
//!
//! Every rejection names the offending field as a path such as `params.norm`
//! or `group[1]`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use mvframe_core::space::{MAX_AMBIENT_DIM, MAX_MATRIX_SIDE};
use mvframe_core::{GroupSpec, SpaceSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Identity,
    IPlusT,
    Neumann,
    SqrtChain,
    JordanParts,
    UnitaryParts,
    CartesianUnitaries,
    Polar,
    HolubForward,
    HolubConverse,
    Counterexamples,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::Identity => "identity",
            Construction::IPlusT => "i_plus_t",
            Construction::Neumann => "neumann",
            Construction::SqrtChain => "sqrt_chain",
            Construction::JordanParts => "jordan_parts",
            Construction::UnitaryParts => "unitary_parts",
            Construction::CartesianUnitaries => "cartesian_unitaries",
            Construction::Polar => "polar",
            Construction::HolubForward => "holub_forward",
            Construction::HolubConverse => "holub_converse",
            Construction::Counterexamples => "counterexamples",
        }
    }

    /// Parameters each construction understands.
    fn accepted_params(self) -> &'static [&'static str] {
        match self {
            Construction::IPlusT => &["power_terms", "with_s", "commuting"],
            Construction::Neumann => &["norm"],
            Construction::SqrtChain => &["n", "spectrum"],
            Construction::HolubConverse => &["spectrum"],
            _ => &[],
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Construction-specific parameters. Which ones apply depends on the
/// construction; the rest must be absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// `sqrt_chain`: sweep the chain length over `1..=n` (default 8).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// `neumann`: operator norm of the random `T`, in `(0, 1)` (default 0.9).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<f64>,
    /// `i_plus_t`: also build `I + T + ... + T^k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_terms: Option<u32>,
    /// `i_plus_t`: also build `I + S` and `I + T + S` (default true).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub with_s: Option<bool>,
    /// `i_plus_t`: also build `I + TS` for a commuting `S` (default true).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commuting: Option<bool>,
    /// `sqrt_chain`, `holub_converse`: spectrum `[lo, hi]` of the random `T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<[f64; 2]>,
}

impl Params {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.n.is_some() {
            out.push("n");
        }
        if self.norm.is_some() {
            out.push("norm");
        }
        if self.power_terms.is_some() {
            out.push("power_terms");
        }
        if self.with_s.is_some() {
            out.push("with_s");
        }
        if self.commuting.is_some() {
            out.push("commuting");
        }
        if self.spectrum.is_some() {
            out.push("spectrum");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: Vec<usize>,
    pub s: usize,
    pub r: usize,
    pub construction: Construction,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Output path prefix: files are `<output>.report.json` and so on.
    pub output: String,
}

/// Named tolerances and their defaults.
pub const TOLERANCE_DEFAULTS: [(&str, f64); 6] = [
    ("adjointability", 1e-10),
    ("bounds", 1e-7),
    ("frame", 1e-8),
    ("reconstruction", 1e-8),
    ("residual", 1e-8),
    ("unitary", 1e-8),
];

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    /// Relative slack for matrix-adjointability checks.
    pub adjointability: f64,
    /// Agreement of measured and predicted frame bounds.
    pub bounds: f64,
    /// Relative slack for frame bounds against the Riesz interval.
    pub frame: f64,
    pub reconstruction: f64,
    /// Relative residuals of identities (polar factors, positivity maps).
    pub residual: f64,
    /// Unitarity and Parseval distance of unitary generators.
    pub unitary: f64,
}

impl Tolerances {
    fn resolve(overrides: &BTreeMap<String, f64>) -> Result<Self, CliError> {
        for (name, value) in overrides {
            if !TOLERANCE_DEFAULTS.iter().any(|(k, _)| k == name) {
                let known: Vec<_> = TOLERANCE_DEFAULTS.iter().map(|(k, _)| *k).collect();
                return Err(config_error(format!("tolerances.{name}"), format!("unknown tolerance; expected one of {known:?}")));
            }
            if !(value.is_finite() && *value > 0.0 && *value < 1.0) {
                return Err(config_error(format!("tolerances.{name}"), "must be a number in (0, 1)"));
            }
        }
        let get = |name: &str| {
            overrides
                .get(name)
                .copied()
                .unwrap_or_else(|| TOLERANCE_DEFAULTS.iter().find(|(k, _)| *k == name).unwrap().1)
        };
        Ok(Tolerances {
            adjointability: get("adjointability"),
            bounds: get("bounds"),
            frame: get("frame"),
            reconstruction: get("reconstruction"),
            residual: get("residual"),
            unitary: get("unitary"),
        })
    }
}

/// A config that passed validation, with its derived objects.
#[derive(Clone, Debug)]
pub struct Validated {
    pub config: ExperimentConfig,
    pub spec: SpaceSpec,
    pub tolerances: Tolerances,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config { path: path.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path == "." { String::new() } else { path }, e.inner().to_string())
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn validate(self) -> Result<Validated, CliError> {
        if self.group.is_empty() {
            return Err(config_error("group", "must list at least one cyclic order"));
        }
        for (i, &n) in self.group.iter().enumerate() {
            if n == 0 {
                return Err(config_error(format!("group[{i}]"), "orders must be at least 1"));
            }
        }
        let group = GroupSpec::new(self.group.clone()).map_err(|e| config_error("group", e.to_string()))?;
        for (field, v) in [("s", self.s), ("r", self.r)] {
            if v == 0 || v > MAX_MATRIX_SIDE {
                return Err(config_error(field, format!("must be between 1 and {MAX_MATRIX_SIDE}")));
            }
        }
        let dim = self.s * self.r * group.size();
        if dim > MAX_AMBIENT_DIM {
            return Err(config_error("group", format!("ambient dimension s*r*|G| = {dim} exceeds {MAX_AMBIENT_DIM}")));
        }
        let spec = SpaceSpec::new(group, self.s, self.r).map_err(|e| config_error("", e.to_string()))?;

        if self.construction == Construction::Counterexamples {
            if self.s != 2 || self.r != 2 {
                return Err(config_error("construction", "counterexamples require s = r = 2"));
            }
        } else if !self.r.is_multiple_of(self.s) {
            return Err(config_error("r", format!("must be a multiple of s = {} for a matrix-valued basis", self.s)));
        }

        let accepted = self.construction.accepted_params();
        for name in self.params.present() {
            if !accepted.contains(&name) {
                return Err(config_error(
                    format!("params.{name}"),
                    format!("not used by construction {}", self.construction),
                ));
            }
        }
        if let Some(n) = self.params.n {
            if !(1..=30).contains(&n) {
                return Err(config_error("params.n", "must be between 1 and 30"));
            }
        }
        if let Some(norm) = self.params.norm {
            if !(norm.is_finite() && norm > 0.0 && norm < 1.0) {
                return Err(config_error("params.norm", "must lie strictly between 0 and 1"));
            }
        }
        if let Some(k) = self.params.power_terms {
            if !(1..=16).contains(&k) {
                return Err(config_error("params.power_terms", "must be between 1 and 16"));
            }
        }
        if let Some([lo, hi]) = self.params.spectrum {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi && hi <= 1e6) {
                return Err(config_error("params.spectrum", "must be [lo, hi] with 0 < lo <= hi <= 1e6"));
            }
        }
        if self.output.trim().is_empty() {
            return Err(config_error("output", "must be a nonempty path prefix"));
        }
        let tolerances = Tolerances::resolve(&self.tolerances)?;
        Ok(Validated { config: self, spec, tolerances })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "group": [4], "s": 2, "r": 2, "construction": "identity", "seed": 7, "output": "out/run"
        })
    }

    fn parse(v: serde_json::Value) -> Result<Validated, CliError> {
        ExperimentConfig::from_json_str(&v.to_string())?.validate()
    }

    fn path_of(err: CliError) -> String {
        match err {
            CliError::Config { path, .. } => path,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_is_valid() {
        let v = parse(base()).unwrap();
        assert_eq!(v.spec.ambient_dim(), 16);
        assert_eq!(v.tolerances.frame, 1e-8);
        assert_eq!(v.config.params, Params::default());
    }

    #[test]
    fn construction_names() {
        for name in ["i_plus_t", "sqrt_chain", "holub_converse", "cartesian_unitaries"] {
            let mut v = base();
            v["construction"] = name.into();
            assert_eq!(parse(v).unwrap().config.construction.name(), name);
        }
    }

    #[test]
    fn errors_carry_field_paths() {
        let mut v = base();
        v["construction"] = "newton".into();
        assert_eq!(path_of(parse(v).unwrap_err()), "construction");

        let mut v = base();
        v["group"] = serde_json::json!([4, 0]);
        assert_eq!(path_of(parse(v).unwrap_err()), "group[1]");

        let mut v = base();
        v["params"] = serde_json::json!({"norm": 0.5});
        assert_eq!(path_of(parse(v).unwrap_err()), "params.norm");

        let mut v = base();
        v["construction"] = "neumann".into();
        v["params"] = serde_json::json!({"norm": 1.5});
        assert_eq!(path_of(parse(v).unwrap_err()), "params.norm");

        let mut v = base();
        v["params"] = serde_json::json!({"bogus": 1});
        assert_eq!(path_of(parse(v).unwrap_err()), "params.bogus");

        let mut v = base();
        v["tolerances"] = serde_json::json!({"frame": 1e-8, "speed": 1.0});
        assert_eq!(path_of(parse(v).unwrap_err()), "tolerances.speed");

        let mut v = base();
        v["s"] = serde_json::json!("two");
        assert_eq!(path_of(parse(v).unwrap_err()), "s");

        let mut v = base();
        v["r"] = 3.into();
        assert_eq!(path_of(parse(v).unwrap_err()), "r");

        let mut v = base();
        v["extra"] = 1.into();
        assert!(parse(v).is_err());
    }

    #[test]
    fn counterexamples_need_two_by_two() {
        let mut v = base();
        v["construction"] = "counterexamples".into();
        v["s"] = 1.into();
        assert_eq!(path_of(parse(v).unwrap_err()), "construction");
    }

    #[test]
    fn dimension_cap() {
        let mut v = base();
        v["group"] = serde_json::json!([4096]);
        assert_eq!(path_of(parse(v).unwrap_err()), "group");
    }
}
