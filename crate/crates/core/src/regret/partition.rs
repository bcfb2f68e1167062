use serde::{Deserialize, Serialize};

use crate::dynamics::kl_divergence;
use crate::{Error, Result};

/// Finite partition of a player's own simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum Partition {
    Singleton,
    /// `k` equal intervals on the first coordinate: `[0, 1/k), ...,
    /// [(k-1)/k, 1]`.
    IntervalBins { k: usize },
    /// Cell 0 holds `|KL(p | center) - reference| <= eps`, cell 1 the rest.
    KlBands {
        center: Vec<f64>,
        reference: f64,
        eps: f64,
    },
}

impl Partition {
    pub fn intervals(k: usize) -> Self {
        Partition::IntervalBins { k }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Partition::Singleton => Ok(()),
            Partition::IntervalBins { k } if *k >= 1 => Ok(()),
            Partition::IntervalBins { .. } => Err(Error::Input("interval partition needs k >= 1".into())),
            Partition::KlBands { center, reference, eps } => {
                if center.iter().any(|&c| !(c > 0.0)) {
                    return Err(Error::Input("KL band center must be interior".into()));
                }
                if !(*eps > 0.0 && *reference >= 0.0) {
                    return Err(Error::Input("KL band needs eps > 0 and reference >= 0".into()));
                }
                Ok(())
            }
        }
    }

    pub fn bins(&self) -> usize {
        match self {
            Partition::Singleton => 1,
            Partition::IntervalBins { k } => *k,
            Partition::KlBands { .. } => 2,
        }
    }

    /// Cell containing the strategy `p`.
    pub fn bin_of(&self, p: &[f64]) -> usize {
        match self {
            Partition::Singleton => 0,
            Partition::IntervalBins { k } => ((p[0] * *k as f64).floor().max(0.0) as usize).min(k - 1),
            Partition::KlBands { center, reference, eps } => {
                if (kl_divergence(p, center) - reference).abs() <= *eps {
                    0
                } else {
                    1
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_cells_are_half_open_with_closed_top() {
        let p = Partition::intervals(10);
        assert_eq!(p.bins(), 10);
        assert_eq!(p.bin_of(&[0.0, 1.0]), 0);
        assert_eq!(p.bin_of(&[0.0999, 0.9001]), 0);
        assert_eq!(p.bin_of(&[0.5, 0.5]), 5);
        assert_eq!(p.bin_of(&[1.0, 0.0]), 9);
        let two = Partition::intervals(2);
        assert_eq!(two.bin_of(&[0.25, 0.75]), 0);
        assert_eq!(two.bin_of(&[0.75, 0.25]), 1);
    }

    #[test]
    fn kl_band_membership() {
        let third = 1.0 / 3.0;
        let p = Partition::KlBands { center: vec![third; 3], reference: 0.1, eps: 0.01 };
        assert_eq!(p.bin_of(&[third; 3]), 1);
        // find a point at KL distance ~0.1 along a ray
        let q = [0.6, 0.2, 0.2];
        let d = kl_divergence(&q, &[third; 3]);
        let on = Partition::KlBands { center: vec![third; 3], reference: d, eps: 1e-9 };
        assert_eq!(on.bin_of(&q), 0);
        assert!(p.validate().is_ok());
        assert!(Partition::IntervalBins { k: 0 }.validate().is_err());
    }

    #[test]
    fn json_form() {
        let p: Partition = serde_json::from_str(r#"{"scheme":"interval_bins","k":10}"#).unwrap();
        assert_eq!(p, Partition::intervals(10));
        assert!(serde_json::from_str::<Partition>(r#"{"scheme":"interval_bins","k":2,"m":1}"#).is_err());
        let back: Partition = serde_json::from_str(&serde_json::to_string(&Partition::Singleton).unwrap()).unwrap();
        assert_eq!(back, Partition::Singleton);
    }
}
