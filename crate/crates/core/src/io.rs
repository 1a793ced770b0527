//! JSON state, ensemble and ground-truth files.
//!
//! Amplitudes are `[re, im]` pairs in big-endian qubit order (qubit 0 is the
//! most significant bit of the basis index), declared by the header field
//! `"bit_order": "q0-most-significant"`.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classify::{Ensemble, EnsemblePayload, EnsembleTerm};
use crate::error::{Error, Result};
use crate::partitions::IntegerPartition;
use crate::statecore::PureState;

pub const FORMAT_VERSION: u32 = 1;
pub const BIT_ORDER: &str = "q0-most-significant";

/// Norm defects up to this are corrected silently.
pub const SILENT_RENORM_LIMIT: f64 = 1e-6;
/// Norm defects up to this are corrected with a warning; above it, refused.
pub const WARN_RENORM_LIMIT: f64 = 1e-3;
/// Allowed `|sum p - 1|` in an ensemble file.
pub const ENSEMBLE_PROB_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bit_order: Option<String>,
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

/// A state read from disk, after the norm policy has been applied.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedState {
    pub state: PureState,
    /// `|sum |a|^2 - 1|` as read.
    pub norm_defect: f64,
    pub warning: Option<String>,
}

fn check_header(format_version: Option<u32>, bit_order: Option<&str>) -> Result<()> {
    if let Some(v) = format_version {
        if v != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format_version {v}")));
        }
    }
    if let Some(order) = bit_order {
        if order != BIT_ORDER {
            return Err(Error::Format(format!(
                "bit_order {order:?} is not {BIT_ORDER:?}"
            )));
        }
    }
    Ok(())
}

impl StateFile {
    pub fn from_state(state: &PureState) -> Self {
        Self {
            format_version: Some(FORMAT_VERSION),
            bit_order: Some(BIT_ORDER.to_string()),
            n: state.n_qubits(),
            amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    /// Validates the header and length, then applies the norm policy:
    /// silent renormalization up to 1e-6, renormalization with a warning up
    /// to 1e-3, refusal above.
    pub fn into_state(self) -> Result<LoadedState> {
        check_header(self.format_version, self.bit_order.as_deref())?;
        if self.n == 0
            || self.n >= usize::BITS as usize
            || self.amplitudes.len() != 1usize << self.n
        {
            return Err(Error::Format(format!(
                "n = {} requires 2^n amplitudes, found {}",
                self.n,
                self.amplitudes.len()
            )));
        }
        crate::statecore::check_cap(self.n)?;
        let amps: Vec<Complex64> = self
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Format("non-finite amplitude".into()));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let norm_defect = (norm_sqr - 1.0).abs();
        if norm_defect > WARN_RENORM_LIMIT || !norm_defect.is_finite() {
            return Err(Error::NormDefect {
                defect: norm_defect,
                limit: WARN_RENORM_LIMIT,
            });
        }
        let warning = (norm_defect > SILENT_RENORM_LIMIT)
            .then(|| format!("state norm defect {norm_defect:e}; renormalized"));
        Ok(LoadedState {
            state: PureState::normalized(self.n, amps)?,
            norm_defect,
            warning,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleTermFile {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub n: usize,
    pub terms: Vec<EnsembleTermFile>,
}

impl EnsembleFile {
    /// Builds the in-memory ensemble. Any violation (bad probabilities,
    /// partitions not summing to `n`, malformed or badly normalized states)
    /// is an error.
    pub fn into_ensemble(self) -> Result<Ensemble> {
        check_header(self.format_version, None)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, t) in self.terms.into_iter().enumerate() {
            let payload = match (t.partition, t.state) {
                (Some(parts), None) => {
                    let p = IntegerPartition::from_parts(parts)?;
                    if p.total() != self.n {
                        return Err(Error::InvalidEnsemble(format!(
                            "term {k}: partition {p} does not sum to {}",
                            self.n
                        )));
                    }
                    EnsemblePayload::Partition(p)
                }
                (None, Some(s)) => EnsemblePayload::State(s.into_state()?.state),
                _ => {
                    return Err(Error::InvalidEnsemble(format!(
                        "term {k} must have exactly one of \"partition\" or \"state\""
                    )))
                }
            };
            terms.push(EnsembleTerm {
                probability: t.p,
                payload,
            });
        }
        Ensemble::with_tolerance(self.n, terms, ENSEMBLE_PROB_TOL)
    }
}

/// Ground truth written next to a constructed state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub format_version: u32,
    pub n: usize,
    pub shape: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    pub p: usize,
    pub expected_index: usize,
    pub lu_seed: Option<u64>,
    pub perm: Option<Vec<usize>>,
}

/// `dir/name.json` -> `dir/name.truth.json`.
pub fn truth_path(state_path: &Path) -> PathBuf {
    let stem = state_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    state_path.with_file_name(format!("{stem}.truth.json"))
}

/// Pretty JSON with a trailing newline. Struct fields keep declaration order
/// and floats use the shortest round-trip representation.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable document");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    fs::write(path, to_json_string(value))
}

pub fn read_state_file(path: &Path) -> Result<LoadedState> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    parse_state(&text)
}

pub fn parse_state(text: &str) -> Result<LoadedState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_state()
}

pub fn read_ensemble_file(path: &Path) -> Result<Ensemble> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    parse_ensemble(&text)
}

pub fn parse_ensemble(text: &str) -> Result<Ensemble> {
    let file: EnsembleFile =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_ensemble()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ensemble_index;
    use crate::construct::ghz;

    #[test]
    fn state_round_trip() {
        let g = ghz(3).unwrap();
        let text = to_json_string(&StateFile::from_state(&g));
        assert!(text
            .starts_with("{\n  \"format_version\": 1,\n  \"bit_order\": \"q0-most-significant\""));
        let loaded = parse_state(&text).unwrap();
        assert_eq!(loaded.state, g);
        assert!(loaded.warning.is_none());
    }

    #[test]
    fn norm_policy() {
        let body = |scale: f64| format!(r#"{{"n":1,"amplitudes":[[{scale},0.0],[0.0,0.0]]}}"#);
        let silent = parse_state(&body(1.0 + 1e-7)).unwrap();
        assert!(silent.warning.is_none());
        assert!((silent.state.norm_sqr() - 1.0).abs() < 1e-15);
        let warned = parse_state(&body(1.0 + 1e-4)).unwrap();
        assert!(warned.warning.is_some());
        assert!(matches!(
            parse_state(&body(1.01)),
            Err(Error::NormDefect { .. })
        ));
    }

    #[test]
    fn malformed_states() {
        assert!(matches!(
            parse_state(r#"{"n":2,"amplitudes":[[1,0]]}"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_state(r#"{"n":1,"amplitudes":[[1,0],[0"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_state(r#"{"n":1,"bit_order":"q0-least-significant","amplitudes":[[1,0],[0,0]]}"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_state(r#"{"format_version":2,"n":1,"amplitudes":[[1,0],[0,0]]}"#),
            Err(Error::Format(_))
        ));
        assert!(parse_state(r#"{"n":0,"amplitudes":[[1,0]]}"#).is_err());
    }

    #[test]
    fn ensembles() {
        let e = parse_ensemble(
            r#"{"n":3,"terms":[{"p":0.5,"partition":[3]},{"p":0.5,"state":{"n":3,"amplitudes":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}}]}"#,
        )
        .unwrap();
        assert_eq!(ensemble_index(&e, 1e-9).unwrap(), 1.0);

        assert!(parse_ensemble(r#"{"n":3,"terms":[{"p":0.9,"partition":[3]}]}"#).is_err());
        assert!(parse_ensemble(r#"{"n":3,"terms":[{"p":1.0,"partition":[2]}]}"#).is_err());
        assert!(parse_ensemble(r#"{"n":3,"terms":[{"p":1.0}]}"#).is_err());
        // within the file tolerance of 1e-6
        assert!(parse_ensemble(
            r#"{"n":2,"terms":[{"p":0.5000004,"partition":[2]},{"p":0.5,"partition":[1,1]}]}"#
        )
        .is_ok());
    }

    #[test]
    fn truth_paths() {
        assert_eq!(
            truth_path(Path::new("out/s.json")),
            PathBuf::from("out/s.truth.json")
        );
        assert_eq!(truth_path(Path::new("s")), PathBuf::from("s.truth.json"));
    }
}
