use crate::domain::BudgetAllocation;
use crate::question::{Generator, Provenance, Question, QuestionBattery};
use crate::rng::{stream, GridSampler, REJECTION_CAP};

use super::GenError;

/// Inserts two checks pairing `p` with a random other allocation: one at the
/// front and one in the middle of the original questions. The ideal is the
/// first generator option; shuffling randomizes its displayed side.
pub fn insert_alertness_checks(
    mut battery: QuestionBattery,
    p: &BudgetAllocation,
    seed: u64,
) -> Result<QuestionBattery, GenError> {
    let sampler = GridSampler::grid5();
    let mut checks = Vec::with_capacity(2);
    for i in 0..2u64 {
        let mut rng = stream(seed, "alertness", i);
        let other = (0..REJECTION_CAP)
            .map(|_| sampler.sample(&mut rng))
            .find(|q| q != p)
            .ok_or(GenError::GenerationExhausted {
                generator: Generator::Alertness,
                attempts: REJECTION_CAP,
            })?;
        let mut q = Question::pairwise(
            format!("alert-{i}"),
            *p,
            other,
            Provenance::new(Generator::Alertness),
        );
        q.is_alertness = true;
        checks.push(q);
    }
    let n = battery.questions.len();
    let second = checks.pop().expect("two checks");
    let first = checks.pop().expect("two checks");
    battery.questions.insert(0, first);
    battery.questions.insert(1 + n / 2, second);
    Ok(battery)
}
