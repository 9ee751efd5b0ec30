use crate::domain::{deviation, BudgetAllocation};
use crate::question::{BiennialOption, Generator, Provenance, Question};
use crate::rng::{stream, GridSampler, REJECTION_CAP};

use super::{question_id, GenError};

/// The balancing allocation `2p - r`, whose two-year average with `r` is `p`.
pub(crate) fn balancing(p: &BudgetAllocation, r: &BudgetAllocation) -> Option<BudgetAllocation> {
    p.shifted(&deviation(r, p)).ok()
}

/// The sub-poll question for random allocation `r`; the ideal-first option is
/// always first.
///
/// 1. `(p, r)` vs `(r, p)`
/// 2. `(r, p)` vs `(r, q)`
/// 3. `(p, r)` vs `(q, r)`
pub fn biennial_question(
    p: &BudgetAllocation,
    r: &BudgetAllocation,
    sub_poll: u8,
    index: usize,
) -> Option<Question> {
    let q = balancing(p, r)?;
    let (a, b) = match sub_poll {
        1 => (BiennialOption::new(*p, *r), BiennialOption::new(*r, *p)),
        2 => (BiennialOption::new(*r, *p), BiennialOption::new(*r, q)),
        3 => (BiennialOption::new(*p, *r), BiennialOption::new(q, *r)),
        _ => return None,
    };
    let mut prov = Provenance::new(Generator::Biennial);
    prov.sub_poll = Some(sub_poll);
    prov.set_index = Some(index / 3);
    Some(Question::biennial(question_id(index), a, b, prov))
}

/// Draws `r ≠ p` with a valid balancing allocation from stream `label`.
pub(crate) fn sample_round(
    p: &BudgetAllocation,
    seed: u64,
    label: &str,
    round: usize,
    generator: Generator,
) -> Result<BudgetAllocation, GenError> {
    let sampler = GridSampler::grid5();
    let mut rng = stream(seed, label, round as u64);
    for _ in 0..REJECTION_CAP {
        let r = sampler.sample(&mut rng);
        if r != *p && balancing(p, &r).is_some() {
            return Ok(r);
        }
    }
    Err(GenError::GenerationExhausted {
        generator,
        attempts: REJECTION_CAP,
    })
}

/// `3k` questions cycling through sub-polls 1, 2, 3 with one random
/// allocation per round.
pub fn gen_biennial(p: &BudgetAllocation, k: usize, seed: u64) -> Result<Vec<Question>, GenError> {
    let mut out = Vec::with_capacity(3 * k);
    for round in 0..k {
        let r = sample_round(p, seed, "biennial", round, Generator::Biennial)?;
        for sub_poll in 1..=3 {
            out.push(biennial_question(p, &r, sub_poll, out.len()).expect("balancing checked"));
        }
    }
    Ok(out)
}
