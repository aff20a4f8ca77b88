use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CircuitError;

/// Wrap an angle into `(-pi, pi]`. Angles already in range are returned untouched so the
/// operation is exactly idempotent.
pub fn normalize_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let two_pi = 2.0 * PI;
    let mut r = angle.rem_euclid(two_pi);
    if r > PI {
        r -= two_pi;
    }
    if r <= -PI {
        r += two_pi;
    }
    r
}

/// A rotation angle: either a literal (radians) or a linear form `coeff * symbol + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamExpr {
    coeff: f64,
    symbol: Option<String>,
    offset: f64,
}

impl ParamExpr {
    pub fn literal(value: f64) -> Self {
        Self {
            coeff: 0.0,
            symbol: None,
            offset: value,
        }
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        Self::linear(1.0, name, 0.0)
    }

    pub fn linear(coeff: f64, name: impl Into<String>, offset: f64) -> Self {
        Self {
            coeff,
            symbol: Some(name.into()),
            offset,
        }
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn symbol_name(&self) -> Option<&str> {
        self.symbol.as_deref()
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_bound(&self) -> bool {
        self.symbol.is_none()
    }

    /// Literal value, if the expression carries no free symbol.
    pub fn value(&self) -> Option<f64> {
        self.is_bound().then_some(self.offset)
    }

    pub fn bind(&self, binding: &HashMap<String, f64>) -> Result<ParamExpr, CircuitError> {
        match &self.symbol {
            None => Ok(ParamExpr::literal(normalize_angle(self.offset))),
            Some(name) => {
                let v = binding
                    .get(name)
                    .ok_or_else(|| CircuitError::UnboundParameter(name.clone()))?;
                Ok(ParamExpr::literal(normalize_angle(
                    self.coeff * v + self.offset,
                )))
            }
        }
    }

    /// `self + shift` where `shift` is a literal.
    pub fn shifted(&self, shift: f64) -> ParamExpr {
        let mut out = self.clone();
        out.offset += shift;
        if out.symbol.is_none() {
            out.offset = normalize_angle(out.offset);
        }
        out
    }

    pub fn negated(&self) -> ParamExpr {
        Self {
            coeff: -self.coeff,
            symbol: self.symbol.clone(),
            offset: -self.offset,
        }
    }

    /// Sum of two expressions, when the result is still a single-symbol linear form.
    pub fn try_add(&self, other: &ParamExpr) -> Option<ParamExpr> {
        let symbol = match (&self.symbol, &other.symbol) {
            (None, None) => {
                return Some(ParamExpr::literal(normalize_angle(
                    self.offset + other.offset,
                )))
            }
            (Some(a), Some(b)) if a != b => return None,
            (Some(a), _) | (_, Some(a)) => a.clone(),
        };
        Some(ParamExpr {
            coeff: self.coeff + other.coeff,
            symbol: Some(symbol),
            offset: self.offset + other.offset,
        })
    }

    pub(crate) fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        if let Some(s) = &self.symbol {
            out.insert(s.clone());
        }
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.symbol {
            None => write!(f, "{:?}", self.offset),
            Some(name) => {
                if self.coeff == 1.0 {
                    write!(f, "{name}")?;
                } else {
                    write!(f, "{:?}*{name}", self.coeff)?;
                }
                if self.offset != 0.0 || self.offset.is_sign_negative() {
                    write!(f, " + {:?}", self.offset)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_keeps_range_and_wraps() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(0.3), 0.3);
        assert!((normalize_angle(-PI) - PI).abs() < 1e-15);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(2.0 * PI + 0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn linear_form_binds() {
        let e = ParamExpr::linear(2.0, "theta", 0.0);
        let b = HashMap::from([("theta".to_string(), 1.15)]);
        assert_eq!(e.bind(&b).unwrap(), ParamExpr::literal(2.3));
    }

    #[test]
    fn missing_symbol_is_named() {
        let e = ParamExpr::symbol("gamma_1");
        match e.bind(&HashMap::new()) {
            Err(CircuitError::UnboundParameter(s)) => assert_eq!(s, "gamma_1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn add_refuses_mixed_symbols() {
        let a = ParamExpr::symbol("a");
        let b = ParamExpr::symbol("b");
        assert!(a.try_add(&b).is_none());
        let s = a.try_add(&ParamExpr::literal(0.5)).unwrap();
        assert_eq!(s, ParamExpr::linear(1.0, "a", 0.5));
    }
}
