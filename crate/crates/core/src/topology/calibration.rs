use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use super::{CouplingMap, TopologyError};

/// Fidelities for every component of a device at one point in time. Files store error rates
/// `e`; they are converted to fidelities `1 - e` on load.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationSnapshot {
    pub timestamp: DateTime<FixedOffset>,
    pub single_qubit: Vec<f64>,
    pub cx: BTreeMap<(usize, usize), f64>,
    pub readout: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CalibrationFile {
    timestamp: String,
    single_qubit_error: BTreeMap<String, f64>,
    cx_error: BTreeMap<String, f64>,
    readout_error: BTreeMap<String, f64>,
}

fn parse_qubit(key: &str) -> Result<usize, TopologyError> {
    key.trim()
        .parse()
        .map_err(|_| TopologyError::Schema(format!("`{key}` is not a qubit index")))
}

fn parse_edge(key: &str) -> Result<(usize, usize), TopologyError> {
    let (a, b) = key
        .split_once('-')
        .ok_or_else(|| TopologyError::Schema(format!("`{key}` is not an edge key `u-v`")))?;
    let (a, b) = (parse_qubit(a)?, parse_qubit(b)?);
    Ok((a.min(b), a.max(b)))
}

fn to_fidelity(what: &'static str, component: String, error: f64) -> Result<f64, TopologyError> {
    if !(0.0..=1.0).contains(&error) {
        return Err(TopologyError::OutOfRange {
            what,
            component,
            value: error,
        });
    }
    Ok(1.0 - error)
}

fn per_qubit(
    what: &'static str,
    entries: &BTreeMap<String, f64>,
    map: &CouplingMap,
) -> Result<Vec<f64>, TopologyError> {
    let n = map.num_qubits();
    let mut out = vec![None; n];
    for (k, &e) in entries {
        let q = parse_qubit(k)?;
        if q >= n {
            return Err(TopologyError::QubitOutOfRange {
                qubit: q,
                num_qubits: n,
            });
        }
        out[q] = Some(to_fidelity(what, format!("qubit {q}"), e)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(q, f)| {
            f.ok_or(TopologyError::MissingCalibration {
                what,
                component: format!("qubit {q}"),
            })
        })
        .collect()
}

impl CalibrationSnapshot {
    /// Same fidelity for every component of each class.
    pub fn uniform(
        map: &CouplingMap,
        timestamp: DateTime<FixedOffset>,
        single_qubit: f64,
        cx: f64,
        readout: f64,
    ) -> Self {
        Self {
            timestamp,
            single_qubit: vec![single_qubit; map.num_qubits()],
            cx: map.edges().iter().map(|&e| (e, cx)).collect(),
            readout: vec![readout; map.num_qubits()],
        }
    }

    pub fn cx_fidelity(&self, a: usize, b: usize) -> Option<f64> {
        self.cx.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn from_json(text: &str, map: &CouplingMap) -> Result<Self, TopologyError> {
        let f: CalibrationFile = serde_json::from_str(text)?;
        let timestamp = DateTime::parse_from_rfc3339(&f.timestamp)
            .map_err(|_| TopologyError::Timestamp(f.timestamp.clone()))?;
        let single_qubit = per_qubit("single-qubit error", &f.single_qubit_error, map)?;
        let readout = per_qubit("readout error", &f.readout_error, map)?;
        let mut cx = BTreeMap::new();
        for (k, &e) in &f.cx_error {
            let (a, b) = parse_edge(k)?;
            if !map.has_edge(a, b) {
                return Err(TopologyError::UnknownEdge(a, b));
            }
            cx.insert((a, b), to_fidelity("cx error", format!("edge {a}-{b}"), e)?);
        }
        if let Some(&(a, b)) = map.edges().iter().find(|e| !cx.contains_key(e)) {
            return Err(TopologyError::MissingCalibration {
                what: "cx error",
                component: format!("edge {a}-{b}"),
            });
        }
        Ok(Self {
            timestamp,
            single_qubit,
            cx,
            readout,
        })
    }

    /// File representation (error rates) of this snapshot.
    pub fn to_json(&self) -> String {
        let f = CalibrationFile {
            timestamp: self.timestamp.to_rfc3339(),
            single_qubit_error: self
                .single_qubit
                .iter()
                .enumerate()
                .map(|(q, f)| (q.to_string(), 1.0 - f))
                .collect(),
            cx_error: self
                .cx
                .iter()
                .map(|(&(a, b), f)| (format!("{a}-{b}"), 1.0 - f))
                .collect(),
            readout_error: self
                .readout
                .iter()
                .enumerate()
                .map(|(q, f)| (q.to_string(), 1.0 - f))
                .collect(),
        };
        serde_json::to_string_pretty(&f).expect("serializable")
    }
}

pub fn load_calibration(
    path: impl AsRef<Path>,
    map: &CouplingMap,
) -> Result<CalibrationSnapshot, TopologyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TopologyError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    CalibrationSnapshot::from_json(&text, map)
}

/// Every `*.json` snapshot in `dir`, ordered by timestamp (file name breaks ties).
pub fn load_calibration_series(
    dir: impl AsRef<Path>,
    map: &CouplingMap,
) -> Result<Vec<CalibrationSnapshot>, TopologyError> {
    let dir = dir.as_ref();
    let io = |source| TopologyError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut snaps = paths
        .iter()
        .map(|p| load_calibration(p, map))
        .collect::<Result<Vec<_>, _>>()?;
    snaps.sort_by_key(|s| s.timestamp);
    Ok(snaps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_qubit_map() -> CouplingMap {
        CouplingMap::new("pair", 2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn error_rate_becomes_fidelity() {
        let text = r#"{"timestamp":"2022-05-01T10:00:00Z",
            "single_qubit_error":{"0":0.001,"1":0.002},
            "cx_error":{"1-0":0.01},
            "readout_error":{"0":0.02,"1":0.03}}"#;
        let s = CalibrationSnapshot::from_json(text, &two_qubit_map()).unwrap();
        assert!((s.cx_fidelity(0, 1).unwrap() - 0.99).abs() < 1e-15);
        assert!((s.readout[1] - 0.97).abs() < 1e-15);
    }

    #[test]
    fn missing_readout_names_qubit() {
        let m = CouplingMap::line(4);
        let text = r#"{"timestamp":"2022-05-01T10:00:00Z",
            "single_qubit_error":{"0":0,"1":0,"2":0,"3":0},
            "cx_error":{"0-1":0,"1-2":0,"2-3":0},
            "readout_error":{"0":0,"1":0,"2":0}}"#;
        let err = CalibrationSnapshot::from_json(text, &m).unwrap_err();
        assert!(err.to_string().contains("qubit 3"), "{err}");
    }

    #[test]
    fn rejects_unknown_edge_and_bad_rate() {
        let m = two_qubit_map();
        let unknown = r#"{"timestamp":"2022-05-01T10:00:00Z","single_qubit_error":{"0":0,"1":0},
            "cx_error":{"0-1":0,"0-2":0},"readout_error":{"0":0,"1":0}}"#;
        assert!(CalibrationSnapshot::from_json(unknown, &m).is_err());
        let bad = r#"{"timestamp":"2022-05-01T10:00:00Z","single_qubit_error":{"0":1.5,"1":0},
            "cx_error":{"0-1":0},"readout_error":{"0":0,"1":0}}"#;
        assert!(matches!(
            CalibrationSnapshot::from_json(bad, &m),
            Err(TopologyError::OutOfRange { .. })
        ));
    }

    #[test]
    fn series_is_time_ordered() {
        let m = two_qubit_map();
        let dir = tempfile::tempdir().unwrap();
        let t = |s: &str| DateTime::parse_from_rfc3339(s).unwrap();
        let late = CalibrationSnapshot::uniform(&m, t("2022-05-02T00:00:00Z"), 0.9, 0.9, 0.9);
        let early = CalibrationSnapshot::uniform(&m, t("2022-05-01T00:00:00Z"), 0.8, 0.8, 0.8);
        std::fs::write(dir.path().join("a.json"), late.to_json()).unwrap();
        std::fs::write(dir.path().join("b.json"), early.to_json()).unwrap();
        let s = load_calibration_series(dir.path(), &m).unwrap();
        assert_eq!(s[0].timestamp, early.timestamp);
        assert_eq!(s[1].timestamp, late.timestamp);
    }
}
