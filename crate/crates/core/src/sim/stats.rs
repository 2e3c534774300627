//! Two-sample statistics for comparing questionnaire groups from their
//! published summaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadKind {
    /// `spread` is a standard deviation.
    Sd,
    /// `spread` is already a variance.
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurveySample {
    pub n: u32,
    pub mean: f64,
    pub spread: f64,
    pub spread_kind: SpreadKind,
}

impl SurveySample {
    pub fn sd(n: u32, mean: f64, sd: f64) -> Self {
        Self {
            n,
            mean,
            spread: sd,
            spread_kind: SpreadKind::Sd,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("sample size {} is below 2", self.n)));
        }
        if !(self.spread > 0.0) || !self.spread.is_finite() || !self.mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample spread must be positive and finite, got {}",
                self.spread
            )));
        }
        Ok(())
    }

    pub fn variance(&self) -> f64 {
        match self.spread_kind {
            SpreadKind::Sd => self.spread * self.spread,
            SpreadKind::Variance => self.spread,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub significant: bool,
}

/// Welch's unequal-variance t statistic for `b` against `a`. Significant
/// when `t` falls outside the closed `critical_band`.
pub fn welch_t(a: &SurveySample, b: &SurveySample, critical_band: (f64, f64)) -> Result<WelchResult> {
    a.validate()?;
    b.validate()?;
    let (lo, hi) = critical_band;
    if !(lo <= hi) {
        return Err(Error::InvalidParameter(format!("critical band [{lo}, {hi}] is empty")));
    }
    let se = (a.variance() / f64::from(a.n) + b.variance() / f64::from(b.n)).sqrt();
    let t = (b.mean - a.mean) / se;
    Ok(WelchResult {
        t,
        significant: t < lo || t > hi,
    })
}

/// Relative change from `baseline` to `treatment`, in percent.
pub fn improvement_pct(baseline: f64, treatment: f64) -> Result<f64> {
    if !(baseline > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "baseline must be positive, got {baseline}"
        )));
    }
    Ok(100.0 * (treatment - baseline) / baseline)
}

/// Two groups plus the two-sided critical band to test against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplesFile {
    pub a: SurveySample,
    pub b: SurveySample,
    pub critical_band: (f64, f64),
}

impl SamplesFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("samples file", e))
    }

    pub fn evaluate(&self) -> Result<WelchResult> {
        welch_t(&self.a, &self.b, self.critical_band)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BAND: (f64, f64) = (-1.997, 1.997);

    #[test]
    fn identical_samples_give_zero() {
        let s = SurveySample::sd(30, 5.0, 1.2);
        let r = welch_t(&s, &s, BAND).unwrap();
        assert_eq!(r.t, 0.0);
        assert!(!r.significant);
    }

    #[test]
    fn variance_reading_of_the_table() {
        // sqrt(1.351/33 + 1.753/30) = 0.315228..., 1.15 / that = 3.64815...
        let a = SurveySample {
            spread_kind: SpreadKind::Variance,
            ..SurveySample::sd(33, 4.45, 1.351)
        };
        let b = SurveySample {
            spread_kind: SpreadKind::Variance,
            ..SurveySample::sd(30, 5.60, 1.753)
        };
        let t = welch_t(&a, &b, BAND).unwrap().t;
        let oracle = (5.60 - 4.45) / (1.351f64 / 33.0 + 1.753 / 30.0).sqrt();
        assert!((t - oracle).abs() < 1e-12);
        assert!((t - 3.648).abs() < 5e-4);
    }

    #[test]
    fn invalid_samples_are_rejected() {
        let good = SurveySample::sd(10, 1.0, 1.0);
        assert!(welch_t(&SurveySample::sd(1, 1.0, 1.0), &good, BAND).is_err());
        assert!(welch_t(&SurveySample::sd(10, 1.0, 0.0), &good, BAND).is_err());
        assert!(welch_t(&good, &good, (1.0, -1.0)).is_err());
    }

    #[test]
    fn improvements() {
        assert!((improvement_pct(2.0, 3.0).unwrap() - 50.0).abs() < 1e-12);
        assert_eq!(improvement_pct(4.2, 4.2).unwrap(), 0.0);
        assert!(improvement_pct(0.0, 3.0).is_err());
        assert!(improvement_pct(-1.0, 3.0).is_err());
    }

    #[test]
    fn samples_file_parses() {
        let f = SamplesFile::from_json(
            r#"{"a":{"n":5,"mean":1,"spread":1,"spread_kind":"sd"},
                "b":{"n":5,"mean":2,"spread":1,"spread_kind":"variance"},
                "critical_band":[-2.3,2.3]}"#,
        )
        .unwrap();
        assert_eq!(f.b.spread_kind, SpreadKind::Variance);
        assert!(SamplesFile::from_json("{\"a\": 3}").is_err());
    }

    fn sample() -> impl Strategy<Value = SurveySample> {
        (2u32..200, 1.0f64..7.0, 0.1f64..3.0).prop_map(|(n, m, s)| SurveySample::sd(n, m, s))
    }

    proptest! {
        #[test]
        fn swapping_samples_negates_t(a in sample(), b in sample()) {
            let ab = welch_t(&a, &b, BAND).unwrap().t;
            let ba = welch_t(&b, &a, BAND).unwrap().t;
            prop_assert!((ab + ba).abs() < 1e-12);
        }
    }
}
