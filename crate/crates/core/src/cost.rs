//! Expected wall-clock cost of transpiling a whole variational run, staged versus
//! per-circuit transpilation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("stage time {name} = {value} is negative or not finite")]
    BadTime { name: &'static str, value: f64 },
    #[error("scenario needs 1 <= m <= N_A, got N_A = {n_a}, m = {m}")]
    BadScenario { n_a: usize, m: usize },
}

/// Mean seconds per invocation of each stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub tapt: f64,
    pub nam: f64,
    pub r#do: f64,
}

impl StageTimes {
    pub fn validate(&self) -> Result<(), CostError> {
        for (name, value) in [("tapt", self.tapt), ("nam", self.nam), ("do", self.r#do)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(CostError::BadTime { name, value });
            }
        }
        Ok(())
    }

    /// Means over recorded per-invocation timings; an empty list counts as zero.
    pub fn from_samples(tapt: &[f64], nam: &[f64], r#do: &[f64]) -> Self {
        let mean = |xs: &[f64]| {
            if xs.is_empty() {
                0.0
            } else {
                xs.iter().sum::<f64>() / xs.len() as f64
            }
        };
        Self {
            tapt: mean(tapt),
            nam: mean(nam),
            r#do: mean(r#do),
        }
    }
}

/// `n_a` circuits, calibration changes every `m` of them, `mu_sf` seconds per circuit for the
/// single-pass baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunScenario {
    pub n_a: usize,
    pub m: usize,
    pub mu_sf: f64,
}

impl RunScenario {
    pub fn validate(&self) -> Result<(), CostError> {
        if self.n_a == 0 || self.m == 0 || self.m > self.n_a {
            return Err(CostError::BadScenario {
                n_a: self.n_a,
                m: self.m,
            });
        }
        if !(self.mu_sf.is_finite() && self.mu_sf >= 0.0) {
            return Err(CostError::BadTime {
                name: "mu_sf",
                value: self.mu_sf,
            });
        }
        Ok(())
    }
}

pub fn total_baseline(sc: &RunScenario) -> Result<f64, CostError> {
    sc.validate()?;
    Ok(sc.mu_sf * sc.n_a as f64)
}

/// One placement-and-routing run, one re-match per calibration period and one
/// decompose-and-optimise run per circuit.
pub fn total_ca(t: &StageTimes, sc: &RunScenario) -> Result<f64, CostError> {
    t.validate()?;
    sc.validate()?;
    let rematches = sc.n_a.div_ceil(sc.m) as f64;
    Ok(t.tapt + t.nam * rematches + t.r#do * sc.n_a as f64)
}

/// Percent change of the staged total against the baseline; negative means faster. Zero when
/// the baseline is zero.
pub fn savings(t: &StageTimes, sc: &RunScenario) -> Result<f64, CostError> {
    let base = total_baseline(sc)?;
    let ca = total_ca(t, sc)?;
    Ok(if base == 0.0 {
        0.0
    } else {
        100.0 * (ca - base) / base
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceTimes {
    pub device: String,
    pub stages: StageTimes,
    pub mu_sf: f64,
}

/// Measured mean stage times on four 27-qubit IBM devices, used as defaults by `cost`.
pub fn reference_devices() -> Vec<DeviceTimes> {
    let d = |name: &str, tapt, nam, r#do, mu_sf| DeviceTimes {
        device: name.into(),
        stages: StageTimes { tapt, nam, r#do },
        mu_sf,
    };
    vec![
        d("ibmq_ehningen", 18.13, 4.41, 2.26, 30.00),
        d("ibm_auckland", 22.92, 3.44, 2.31, 27.94),
        d("ibm_cairo", 23.07, 3.59, 3.13, 25.90),
        d("ibm_hanoi", 17.44, 4.37, 2.50, 29.89),
    ]
}

/// One row of the report: changing calibration (`m = m_cer`) and fixed calibration
/// (`m = N_A`) against the baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub n_a: usize,
    pub device: String,
    pub ca_cer: f64,
    pub ca_fer: f64,
    pub baseline: f64,
    pub savings_cer: f64,
    pub savings_fer: f64,
}

pub fn cost_report(
    devices: &[DeviceTimes],
    n_as: &[usize],
    m_cer: usize,
) -> Result<Vec<CostRow>, CostError> {
    let mut rows = Vec::new();
    for &n_a in n_as {
        for d in devices {
            let cer = RunScenario {
                n_a,
                m: m_cer.min(n_a),
                mu_sf: d.mu_sf,
            };
            let fer = RunScenario {
                n_a,
                m: n_a,
                mu_sf: d.mu_sf,
            };
            rows.push(CostRow {
                n_a,
                device: d.device.clone(),
                ca_cer: total_ca(&d.stages, &cer)?,
                ca_fer: total_ca(&d.stages, &fer)?,
                baseline: total_baseline(&cer)?,
                savings_cer: savings(&d.stages, &cer)?,
                savings_fer: savings(&d.stages, &fer)?,
            });
        }
    }
    Ok(rows)
}

pub fn render_text(rows: &[CostRow]) -> String {
    let mut s = format!(
        "{:>5}  {:<16} {:>10} {:>10} {:>10} {:>9} {:>9}\n",
        "N_A", "device", "CA-CER", "CA-FER", "baseline", "dCER%", "dFER%"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>5}  {:<16} {:>10.2} {:>10.2} {:>10.2} {:>9.2} {:>9.2}",
            r.n_a, r.device, r.ca_cer, r.ca_fer, r.baseline, r.savings_cer, r.savings_fer
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ehningen() -> StageTimes {
        StageTimes {
            tapt: 18.13,
            nam: 4.41,
            r#do: 2.26,
        }
    }

    #[test]
    fn baseline_edges() {
        assert_eq!(
            total_baseline(&RunScenario {
                n_a: 1,
                m: 1,
                mu_sf: 7.5
            })
            .unwrap(),
            7.5
        );
        assert_eq!(
            total_baseline(&RunScenario {
                n_a: 3,
                m: 1,
                mu_sf: 0.0
            })
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn ceiling_counts_partial_periods() {
        let t = StageTimes {
            tapt: 0.0,
            nam: 1.0,
            r#do: 0.0,
        };
        assert_eq!(
            total_ca(
                &t,
                &RunScenario {
                    n_a: 11,
                    m: 5,
                    mu_sf: 1.0
                }
            )
            .unwrap(),
            3.0
        );
    }

    #[test]
    fn fixed_calibration_is_cheapest() {
        let t = ehningen();
        let fer = total_ca(
            &t,
            &RunScenario {
                n_a: 40,
                m: 40,
                mu_sf: 30.0,
            },
        )
        .unwrap();
        for m in 1..=40 {
            assert!(
                total_ca(
                    &t,
                    &RunScenario {
                        n_a: 40,
                        m,
                        mu_sf: 30.0
                    }
                )
                .unwrap()
                    >= fer
            );
        }
    }

    #[test]
    fn equal_totals_save_nothing() {
        let t = StageTimes {
            tapt: 0.0,
            nam: 0.0,
            r#do: 2.0,
        };
        assert_eq!(
            savings(
                &t,
                &RunScenario {
                    n_a: 4,
                    m: 4,
                    mu_sf: 2.0
                }
            )
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let t = ehningen();
        assert!(total_ca(
            &t,
            &RunScenario {
                n_a: 5,
                m: 0,
                mu_sf: 1.0
            }
        )
        .is_err());
        assert!(total_ca(
            &t,
            &RunScenario {
                n_a: 5,
                m: 6,
                mu_sf: 1.0
            }
        )
        .is_err());
        let bad = StageTimes { tapt: -1.0, ..t };
        assert!(matches!(
            bad.validate(),
            Err(CostError::BadTime { name: "tapt", .. })
        ));
    }
}
