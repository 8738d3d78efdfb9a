use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const DEFAULT_D_MAX_CM: f64 = 5.4;
pub const DEFAULT_COUPLING_EXPONENT: f64 = 3.0;

/// Near-field power model between the reader antenna and a tag.
///
/// Strength follows `(1 + (d/d_max)^2)^(-k/2)`, a loop-antenna falloff with
/// strength 1 at contact. Whether a tag runs is a hard threshold at `d_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldModel {
    pub d_max_cm: f64,
    pub coupling_exponent: f64,
}

impl Default for FieldModel {
    fn default() -> Self {
        FieldModel {
            d_max_cm: DEFAULT_D_MAX_CM,
            coupling_exponent: DEFAULT_COUPLING_EXPONENT,
        }
    }
}

impl FieldModel {
    pub fn new(d_max_cm: f64, coupling_exponent: f64) -> Result<Self, Error> {
        if !(d_max_cm.is_finite() && d_max_cm > 0.0) {
            return Err(Error::Config(format!(
                "d_max_cm must be > 0, got {d_max_cm}"
            )));
        }
        if !(coupling_exponent.is_finite() && coupling_exponent > 0.0) {
            return Err(Error::Config(format!(
                "coupling_exponent must be > 0, got {coupling_exponent}"
            )));
        }
        Ok(FieldModel {
            d_max_cm,
            coupling_exponent,
        })
    }

    pub fn field_strength(&self, distance_cm: f64) -> Result<f64, Error> {
        if !(distance_cm.is_finite() && distance_cm >= 0.0) {
            return Err(Error::NegativeDistance(distance_cm));
        }
        let ratio = distance_cm / self.d_max_cm;
        Ok((1.0 + ratio * ratio).powf(-self.coupling_exponent / 2.0))
    }

    /// Inclusive at `d_max`. Invalid distances are never powered.
    pub fn powered(&self, distance_cm: f64) -> bool {
        distance_cm.is_finite() && distance_cm >= 0.0 && distance_cm <= self.d_max_cm
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strength_normalisation_and_threshold_value() {
        let fm = FieldModel::default();
        assert_eq!(fm.field_strength(0.0).unwrap(), 1.0);
        let at_max = fm.field_strength(5.4).unwrap();
        // 2^(-3/2)
        assert!((at_max - 0.353_553_390_593_273_8).abs() < 1e-12);
        assert!(fm.field_strength(-0.1).is_err());
        assert!(fm.field_strength(f64::NAN).is_err());
    }

    #[test]
    fn powered_boundaries() {
        let fm = FieldModel::default();
        assert!(fm.powered(0.0));
        assert!(fm.powered(2.0));
        assert!(fm.powered(5.4));
        assert!(!fm.powered(6.0));
        assert!(!fm.powered(-1.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldModel::new(0.0, 3.0).is_err());
        assert!(FieldModel::new(5.4, -1.0).is_err());
    }
}
