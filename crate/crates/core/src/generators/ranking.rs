use num_rational::Ratio;

use crate::amount::{Amount, Weight};
use crate::domain::{rotate, round_ratio_points, BudgetAllocation, DeviationVector, ISSUES};
use crate::question::{Generator, Provenance, Question, ShiftDirection};

use super::{checked, question_id, GenError};

/// Shift sizes relative to the smallest ideal entry, in hundredths.
pub const RANKING_LAMBDAS: [u8; 2] = [20, 40];

/// `max(1, round(λ · min p))` in whole points, rounding half away from zero.
pub fn x_lambda(p: &[Amount; ISSUES], lambda: Weight) -> i64 {
    let min = *p.iter().min().expect("non-empty");
    let scaled = min.to_ratio() * Ratio::new(lambda.hundredths() as i128, 100);
    round_ratio_points(scaled).max(1)
}

/// `p` plus each cyclic shift of the base vector, as raw vectors.
pub fn cyclic_shift_options(
    p: &[Amount; ISSUES],
    x: i64,
    direction: ShiftDirection,
) -> [[Amount; ISSUES]; ISSUES] {
    let sign = match direction {
        ShiftDirection::Pd => 1,
        ShiftDirection::Nd => -1,
    };
    let lead = sign * (ISSUES as i64 - 1) * x;
    let base = DeviationVector::from_points([lead, -sign * x, -sign * x]).expect("zero-sum");
    std::array::from_fn(|j| {
        let d = rotate(&base, j);
        std::array::from_fn(|i| p[i] + d.get(i))
    })
}

/// The ranking question whose options are `p` plus every cyclic shift of the
/// base vector for `direction` at magnitude `x`.
pub fn cyclic_question(
    p: &BudgetAllocation,
    x: i64,
    direction: ShiftDirection,
    lambda: Weight,
    index: usize,
) -> Result<Question, GenError> {
    let raw = cyclic_shift_options(p.entries(), x, direction);
    let options = checked(raw.into_iter().map(BudgetAllocation::new))?;
    let mut prov = Provenance::new(Generator::CyclicRanking);
    prov.lambda = Some(lambda);
    prov.magnitude = Some(Amount::from_points(x));
    prov.direction = Some(direction);
    Ok(Question::ranking(question_id(index), options, prov))
}

/// Four ranking questions: positive shifts at both λ, then negative shifts.
pub fn gen_cyclic_asymmetry_ranking(p: &BudgetAllocation) -> Result<Vec<Question>, GenError> {
    let mut out = Vec::with_capacity(4);
    for direction in [ShiftDirection::Pd, ShiftDirection::Nd] {
        for h in RANKING_LAMBDAS {
            let lambda = Weight::from_hundredths(h).expect("valid weight");
            let x = x_lambda(p.entries(), lambda);
            out.push(cyclic_question(p, x, direction, lambda, out.len())?);
        }
    }
    Ok(out)
}
