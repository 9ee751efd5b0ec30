//! Utility models over the budget simplex and the preference they induce.
//!
//! Every model is anchored at an ideal allocation `p` and scores a candidate
//! `q`; larger scores are better. Scores are computed exactly whenever the
//! model parameters allow it, so exact ties are reported as ties.

use std::cmp::Ordering;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::domain::{BudgetAllocation, ISSUES};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UtilityError {
    #[error("Leontief utility is undefined when the ideal has a zero entry (issue {index})")]
    LeontiefZeroIdeal { index: usize },
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("{0} has no distance form")]
    UnsupportedKind(ModelKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    L1,
    L2,
    Leontief,
    WeightedAsymmetric,
    MonotoneAsymmetric,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::L1 => "l1",
            ModelKind::L2 => "l2",
            ModelKind::Leontief => "leontief",
            ModelKind::WeightedAsymmetric => "weighted_asymmetric",
            ModelKind::MonotoneAsymmetric => "monotone_asymmetric",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(ModelKind::L1),
            "l2" => Ok(ModelKind::L2),
            "leontief" => Ok(ModelKind::Leontief),
            "weighted_asymmetric" => Ok(ModelKind::WeightedAsymmetric),
            "monotone_asymmetric" => Ok(ModelKind::MonotoneAsymmetric),
            other => Err(format!("unknown utility model `{other}`")),
        }
    }
}

/// A utility function `U(p, q)`.
///
/// The asymmetric models take free-signed weights: with `a_j = b_j = -1` the
/// weighted model coincides with the negated ℓ1 distance. In the monotone
/// model the loss term is subtracted, so positive `loss_weights` penalize
/// losses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UtilityModel {
    L1,
    L2,
    Leontief,
    WeightedAsymmetric {
        gain_weights: [f64; ISSUES],
        loss_weights: [f64; ISSUES],
    },
    MonotoneAsymmetric {
        gain_weights: [f64; ISSUES],
        loss_weights: [f64; ISSUES],
        gain_exponent: f64,
        loss_exponent: f64,
    },
}

/// A utility value, exact when the model allows it.
#[derive(Clone, Debug, PartialEq)]
pub enum Score {
    Exact(Ratio<i128>),
    Real(f64),
}

impl Score {
    pub fn to_f64(&self) -> f64 {
        match self {
            Score::Exact(r) => ratio_to_f64(r),
            Score::Real(x) => *x,
        }
    }

    /// Exact comparison when both sides are exact, float comparison otherwise.
    pub fn compare(&self, other: &Score) -> Ordering {
        match (self, other) {
            (Score::Exact(a), Score::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }

    /// `w1 * self + w2 * other`.
    pub fn weighted_sum(&self, w1: f64, other: &Score, w2: f64) -> Score {
        match (self, other, exact_decimal(w1), exact_decimal(w2)) {
            (Score::Exact(a), Score::Exact(b), Some(x), Some(y)) => Score::Exact(a * x + b * y),
            _ => Score::Real(w1 * self.to_f64() + w2 * other.to_f64()),
        }
    }
}

fn ratio_to_f64(r: &Ratio<i128>) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Interprets a float as a decimal with at most six fractional digits.
fn exact_decimal(x: f64) -> Option<Ratio<i128>> {
    const SCALE: f64 = 1_000_000.0;
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let scaled = x * SCALE;
    let rounded = scaled.round();
    ((scaled - rounded).abs() <= 1e-6 * scaled.abs().max(1.0))
        .then(|| Ratio::new(rounded as i128, SCALE as i128))
}

/// Small non-negative integer exponents are evaluated exactly.
fn exact_exponent(x: f64) -> Option<u32> {
    (x.fract() == 0.0 && (1.0..=8.0).contains(&x)).then_some(x as u32)
}

/// The three-way outcome of comparing two options.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    First,
    Second,
    Tie,
}

impl Preference {
    pub fn flipped(self) -> Preference {
        match self {
            Preference::First => Preference::Second,
            Preference::Second => Preference::First,
            Preference::Tie => Preference::Tie,
        }
    }
}

impl UtilityModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            UtilityModel::L1 => ModelKind::L1,
            UtilityModel::L2 => ModelKind::L2,
            UtilityModel::Leontief => ModelKind::Leontief,
            UtilityModel::WeightedAsymmetric { .. } => ModelKind::WeightedAsymmetric,
            UtilityModel::MonotoneAsymmetric { .. } => ModelKind::MonotoneAsymmetric,
        }
    }

    /// Weighted model with the same gain and loss weight on every issue.
    pub fn weighted_uniform(gain: f64, loss: f64) -> Self {
        UtilityModel::WeightedAsymmetric {
            gain_weights: [gain; ISSUES],
            loss_weights: [loss; ISSUES],
        }
    }

    pub fn validate(&self) -> Result<(), UtilityError> {
        let finite = |ws: &[f64; ISSUES], name: &str| {
            if ws.iter().all(|w| w.is_finite()) {
                Ok(())
            } else {
                Err(UtilityError::InvalidParams(format!("{name} must be finite")))
            }
        };
        match self {
            UtilityModel::L1 | UtilityModel::L2 | UtilityModel::Leontief => Ok(()),
            UtilityModel::WeightedAsymmetric {
                gain_weights,
                loss_weights,
            } => {
                finite(gain_weights, "gain_weights")?;
                finite(loss_weights, "loss_weights")
            }
            UtilityModel::MonotoneAsymmetric {
                gain_weights,
                loss_weights,
                gain_exponent,
                loss_exponent,
            } => {
                finite(gain_weights, "gain_weights")?;
                finite(loss_weights, "loss_weights")?;
                for (name, e) in [("gain_exponent", gain_exponent), ("loss_exponent", loss_exponent)]
                {
                    if !(e.is_finite() && *e > 0.0) {
                        return Err(UtilityError::InvalidParams(format!(
                            "{name} must be finite and positive"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Whether the model is undefined at ideals with a zero entry.
    pub fn requires_all_positive(&self) -> bool {
        matches!(self, UtilityModel::Leontief)
    }

    /// `U(p, q)` as an exact or real score.
    pub fn score(&self, p: &BudgetAllocation, q: &BudgetAllocation) -> Result<Score, UtilityError> {
        self.validate()?;
        let diffs: [Ratio<i128>; ISSUES] =
            std::array::from_fn(|j| q.get(j).to_ratio() - p.get(j).to_ratio());
        match self {
            UtilityModel::L1 => Ok(Score::Exact(-diffs.iter().map(|d| d.abs()).sum::<Ratio<i128>>())),
            UtilityModel::L2 => Ok(Score::Exact(
                -diffs.iter().map(|d| d * d).sum::<Ratio<i128>>(),
            )),
            UtilityModel::Leontief => {
                let mut best: Option<Ratio<i128>> = None;
                for j in 0..ISSUES {
                    let pj = p.get(j).to_ratio();
                    if pj.is_zero() {
                        return Err(UtilityError::LeontiefZeroIdeal { index: j });
                    }
                    let r = q.get(j).to_ratio() / pj;
                    best = Some(match best {
                        Some(b) if b <= r => b,
                        _ => r,
                    });
                }
                Ok(Score::Exact(best.expect("non-empty")))
            }
            UtilityModel::WeightedAsymmetric {
                gain_weights,
                loss_weights,
            } => {
                let exact: Option<Vec<(Ratio<i128>, Ratio<i128>)>> = (0..ISSUES)
                    .map(|j| Some((exact_decimal(gain_weights[j])?, exact_decimal(loss_weights[j])?)))
                    .collect();
                match exact {
                    Some(ws) => {
                        let mut total = Ratio::zero();
                        for (d, (a, b)) in diffs.iter().zip(ws) {
                            if d.is_positive() {
                                total += a * d;
                            } else {
                                total += b * -d;
                            }
                        }
                        Ok(Score::Exact(total))
                    }
                    None => {
                        let mut total = 0.0;
                        for j in 0..ISSUES {
                            let d = ratio_to_f64(&diffs[j]);
                            total += gain_weights[j] * d.max(0.0) + loss_weights[j] * (-d).max(0.0);
                        }
                        Ok(Score::Real(total))
                    }
                }
            }
            UtilityModel::MonotoneAsymmetric {
                gain_weights,
                loss_weights,
                gain_exponent,
                loss_exponent,
            } => {
                let exact = (|| {
                    let r = exact_exponent(*gain_exponent)?;
                    let s = exact_exponent(*loss_exponent)?;
                    let mut total = Ratio::zero();
                    for (j, d) in diffs.iter().enumerate() {
                        let a = exact_decimal(gain_weights[j])?;
                        let b = exact_decimal(loss_weights[j])?;
                        if d.is_positive() {
                            total += a * d.pow(r as i32);
                        } else if d.is_negative() {
                            total -= b * (-d).pow(s as i32);
                        }
                    }
                    Some(total)
                })();
                match exact {
                    Some(total) => Ok(Score::Exact(total)),
                    None => {
                        let mut total = 0.0;
                        for j in 0..ISSUES {
                            let d = ratio_to_f64(&diffs[j]);
                            if d > 0.0 {
                                total += gain_weights[j] * d.powf(*gain_exponent);
                            } else if d < 0.0 {
                                total -= loss_weights[j] * (-d).powf(*loss_exponent);
                            }
                        }
                        Ok(Score::Real(total))
                    }
                }
            }
        }
    }

    /// `U(p, q)` as a float.
    pub fn evaluate(&self, p: &BudgetAllocation, q: &BudgetAllocation) -> Result<f64, UtilityError> {
        self.score(p, q).map(|s| s.to_f64())
    }

    /// Which of `q1`, `q2` the model prefers for ideal `p`.
    pub fn prefer(
        &self,
        p: &BudgetAllocation,
        q1: &BudgetAllocation,
        q2: &BudgetAllocation,
    ) -> Result<Preference, UtilityError> {
        let u1 = self.score(p, q1)?;
        let u2 = self.score(p, q2)?;
        Ok(match u1.compare(&u2) {
            Ordering::Greater => Preference::First,
            Ordering::Less => Preference::Second,
            Ordering::Equal => Preference::Tie,
        })
    }

    /// The non-negative distance behind the ℓ1 and ℓ2 models.
    pub fn distance_variant(
        &self,
        p: &BudgetAllocation,
        q: &BudgetAllocation,
    ) -> Result<f64, UtilityError> {
        match self {
            UtilityModel::L1 => Ok(-self.evaluate(p, q)?),
            UtilityModel::L2 => Ok((-self.evaluate(p, q)?).sqrt()),
            other => Err(UtilityError::UnsupportedKind(other.kind())),
        }
    }
}

/// Free-function form of [`UtilityModel::evaluate`].
pub fn evaluate(
    model: &UtilityModel,
    p: &BudgetAllocation,
    q: &BudgetAllocation,
) -> Result<f64, UtilityError> {
    model.evaluate(p, q)
}

/// Free-function form of [`UtilityModel::prefer`].
pub fn prefer(
    model: &UtilityModel,
    p: &BudgetAllocation,
    q1: &BudgetAllocation,
    q2: &BudgetAllocation,
) -> Result<Preference, UtilityError> {
    model.prefer(p, q1, q2)
}

/// Free-function form of [`UtilityModel::distance_variant`].
pub fn distance_variant(
    model: &UtilityModel,
    p: &BudgetAllocation,
    q: &BudgetAllocation,
) -> Result<f64, UtilityError> {
    model.distance_variant(p, q)
}
