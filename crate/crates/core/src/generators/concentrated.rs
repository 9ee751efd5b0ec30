use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::domain::{rotate, round_ratio_points, BudgetAllocation, DeviationVector, ISSUES};
use crate::question::{Generator, Provenance, Question};

use super::{question_id, GenError};

pub const MAGNITUDE_LEVELS: u8 = 4;

/// Fallback concentrated-loss vectors, one per magnitude level, each for the
/// first issue. The second option uses the negated vector, and both are
/// rotated to the target issue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FallbackVectors(pub Vec<DeviationVector>);

/// Half-step vectors `(-k, k/2, k/2)` for level `k`.
pub fn default_fallback_vectors() -> FallbackVectors {
    FallbackVectors(
        (1..=MAGNITUDE_LEVELS as i64)
            .map(|k| {
                DeviationVector::new([
                    Amount::from_points(-k),
                    Amount::from_hundredths(50 * k),
                    Amount::from_hundredths(50 * k),
                ])
                .expect("zero-sum")
            })
            .collect(),
    )
}

/// `max(1, round(min p / 10))` in whole points, rounding half away from zero.
pub fn x_base(p: &BudgetAllocation) -> i64 {
    round_ratio_points(p.min_entry().to_ratio() / Ratio::from_integer(10)).max(1)
}

/// Concentrated loss of `2x` at `category`, offset by gains of `x`.
fn concentrated_loss(x: Amount, category: usize) -> DeviationVector {
    let base = DeviationVector::new([x * -2, x, x]).expect("zero-sum");
    rotate(&base, category)
}

/// The pair `(p + d, p - d)` where `d` is the concentrated-loss vector of
/// magnitude `x` at `category`.
pub fn concentrated_pair(
    p: &BudgetAllocation,
    x: Amount,
    category: usize,
) -> Option<(BudgetAllocation, BudgetAllocation)> {
    let d = concentrated_loss(x, category);
    Some((p.shifted(&d).ok()?, p.shifted(&d.negated()).ok()?))
}

/// Twelve questions: for each issue, one per magnitude level, with the
/// concentrated-loss option first.
pub fn gen_concentrated_vs_distributed(
    p: &BudgetAllocation,
    fallback: &FallbackVectors,
) -> Result<Vec<Question>, GenError> {
    if fallback.0.len() != MAGNITUDE_LEVELS as usize {
        return Err(GenError::InvalidConfig(format!(
            "expected {MAGNITUDE_LEVELS} fallback vectors, found {}",
            fallback.0.len()
        )));
    }
    let xb = x_base(p);
    let mut out = Vec::with_capacity(ISSUES * MAGNITUDE_LEVELS as usize);
    for category in 0..ISSUES {
        for level in 1..=MAGNITUDE_LEVELS {
            let x = Amount::from_points(level as i64 * xb);
            let mut prov = Provenance::new(Generator::ConcentratedVsDistributed);
            prov.category = Some(category);
            prov.level = Some(level);
            let (a, b) = match concentrated_pair(p, x, category) {
                Some(pair) => {
                    prov.magnitude = Some(x);
                    pair
                }
                None => {
                    let d = rotate(&fallback.0[level as usize - 1], category);
                    let pair = p.shifted(&d).ok().zip(p.shifted(&d.negated()).ok());
                    let pair = pair.ok_or(GenError::FallbackExhausted { category, level })?;
                    prov.fallback = true;
                    prov.magnitude = Some(Amount::from_hundredths(d.l1_norm().hundredths() / 4));
                    pair
                }
            };
            out.push(Question::pairwise(question_id(out.len()), a, b, prov));
        }
    }
    Ok(out)
}
