use num_rational::Ratio;

use crate::amount::{Amount, Weight};
use crate::domain::{argmax, round_half_even, validate_allocation, BudgetAllocation, ISSUES};
use crate::question::{Generator, Provenance, Question};
use crate::rng::{stream, GridSampler, REJECTION_CAP};

use super::{question_id, GenError};

/// Mixing weights in hundredths; 0.5 appears twice.
pub const DEFAULT_LAMBDAS: [u8; 10] = [10, 20, 30, 40, 50, 50, 60, 70, 80, 90];

/// Rounds a sum-100 vector to the multiples-of-5 grid.
///
/// The first two entries are rounded to integers (ties to even), the last is
/// set so the sum is 100, every entry is rounded to the nearest multiple of
/// 5, and a remaining discrepancy is absorbed by the largest entry.
pub fn round_to_grid5(c: &[Amount; ISSUES]) -> Result<BudgetAllocation, GenError> {
    let mut v = [0i128; ISSUES];
    for j in 0..ISSUES - 1 {
        v[j] = round_half_even(c[j].to_ratio());
    }
    v[ISSUES - 1] = 100 - v[..ISSUES - 1].iter().sum::<i128>();
    for x in v.iter_mut() {
        *x = round_half_even(Ratio::new(*x, 5)) * 5;
    }
    if v.iter().sum::<i128>() != 100 {
        let j = argmax(&v);
        v[j] = 100 - (v.iter().sum::<i128>() - v[j]);
    }
    let entries = v.map(|x| Amount::from_points(x as i64));
    validate_allocation(&entries, true)
        .map_err(|source| GenError::InvalidOptions { option: 1, source })
}

/// The question `(q, c)` with `c = λp + (1-λ)q`, rounded to the grid when
/// `round` is set.
pub fn convex_question(
    p: &BudgetAllocation,
    q: &BudgetAllocation,
    lambda: Weight,
    round: bool,
    index: usize,
) -> Result<Question, GenError> {
    let exact = p
        .blend(q, lambda)
        .map_err(|source| GenError::InvalidOptions { option: 1, source })?;
    let c = if round {
        round_to_grid5(exact.entries())?
    } else {
        exact
    };
    let generator = if round {
        Generator::RoundedConvexCombination
    } else {
        Generator::ConvexCombination
    };
    let mut prov = Provenance::new(generator);
    prov.lambda = Some(lambda);
    Ok(Question::pairwise(question_id(index), *q, c, prov))
}

/// One question per λ, each against a fresh random allocation.
///
/// Draws whose combination coincides with the random allocation are redrawn;
/// with `avoid_peak`, so are draws whose combination equals the ideal.
pub fn gen_convex_combinations(
    p: &BudgetAllocation,
    lambdas: &[Weight],
    round: bool,
    avoid_peak: bool,
    seed: u64,
) -> Result<Vec<Question>, GenError> {
    let sampler = GridSampler::grid5();
    let generator = if round {
        Generator::RoundedConvexCombination
    } else {
        Generator::ConvexCombination
    };
    let mut out = Vec::with_capacity(lambdas.len());
    for (index, &lambda) in lambdas.iter().enumerate() {
        let mut rng = stream(seed, "convex", index as u64);
        let mut found = None;
        for _ in 0..REJECTION_CAP {
            let q = sampler.sample(&mut rng);
            let question = convex_question(p, &q, lambda, round, index)?;
            let c = question.allocations().expect("pairwise")[1];
            if c == q || (avoid_peak && c == *p) {
                continue;
            }
            found = Some(question);
            break;
        }
        out.push(found.ok_or(GenError::GenerationExhausted {
            generator,
            attempts: REJECTION_CAP,
        })?);
    }
    Ok(out)
}
