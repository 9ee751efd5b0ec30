use rand::Rng;

use crate::domain::{deviation, rotate, BudgetAllocation, ISSUES};
use crate::question::{Generator, Provenance, Question};
use crate::rng::{stream, GridSampler};

use super::{checked, question_id, GenError};

/// The rotated poll set for base pair `(q1, q2)`: one question per rotation of
/// both deviations from `p`. Fails when any rotation leaves the simplex.
pub fn project_set(
    p: &BudgetAllocation,
    q1: &BudgetAllocation,
    q2: &BudgetAllocation,
    set_index: usize,
    first_index: usize,
) -> Result<Vec<Question>, GenError> {
    let d1 = deviation(p, q1);
    let d2 = deviation(p, q2);
    (0..ISSUES)
        .map(|j| {
            let options = checked([p.shifted(&rotate(&d1, j)), p.shifted(&rotate(&d2, j))])?;
            let mut prov = Provenance::new(Generator::ProjectSymmetry);
            prov.set_index = Some(set_index);
            prov.rotation = Some(j);
            Ok(Question::pairwise(
                question_id(first_index + j),
                options[0],
                options[1],
                prov,
            ))
        })
        .collect()
}

/// The sign poll set for base pair `(q1, q2)`: the pair itself and the pair
/// with both deviations from `p` negated.
pub fn sign_set(
    p: &BudgetAllocation,
    q1: &BudgetAllocation,
    q2: &BudgetAllocation,
    set_index: usize,
    first_index: usize,
) -> Result<Vec<Question>, GenError> {
    let d1 = deviation(p, q1);
    let d2 = deviation(p, q2);
    let negated = checked([p.shifted(&d1.negated()), p.shifted(&d2.negated())])?;
    let mut out = Vec::with_capacity(2);
    for (j, (a, b)) in [(*q1, *q2), (negated[0], negated[1])].into_iter().enumerate() {
        let mut prov = Provenance::new(Generator::SignSymmetry);
        prov.set_index = Some(set_index);
        prov.sign = Some(if j == 0 { 1 } else { -1 });
        out.push(Question::pairwise(question_id(first_index + j), a, b, prov));
    }
    Ok(out)
}

fn rotations_valid(p: &BudgetAllocation, q: &BudgetAllocation) -> bool {
    let d = deviation(p, q);
    (0..ISSUES).all(|j| p.shifted(&rotate(&d, j)).is_ok())
}

fn negation_valid(p: &BudgetAllocation, q: &BudgetAllocation) -> bool {
    p.shifted(&deviation(p, q).negated()).is_ok()
}

/// Draws `k` base pairs uniformly among distinct grid allocations other
/// than `p` that pass `admissible`, the same law as rejection sampling
/// without its misses.
/// Builds the questions of one set from the ideal, the two drawn points, the
/// set index and the running question count.
type BuildSet =
    fn(&BudgetAllocation, &BudgetAllocation, &BudgetAllocation, usize, usize) -> Result<Vec<Question>, GenError>;

fn gen_sets(
    p: &BudgetAllocation,
    k: usize,
    seed: u64,
    label: &str,
    generator: Generator,
    admissible: fn(&BudgetAllocation, &BudgetAllocation) -> bool,
    build: BuildSet,
) -> Result<Vec<Question>, GenError> {
    let candidates: Vec<BudgetAllocation> = GridSampler::grid5()
        .points()
        .iter()
        .filter(|q| *q != p && admissible(p, q))
        .copied()
        .collect();
    let n = candidates.len();
    if n < 2 {
        return Err(GenError::GenerationExhausted {
            generator,
            attempts: 0,
        });
    }
    let mut out = Vec::new();
    for set_index in 0..k {
        let mut rng = stream(seed, label, set_index as u64);
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        out.extend(build(p, &candidates[i], &candidates[j], set_index, out.len())?);
    }
    Ok(out)
}

/// `k` project-symmetry sets of three questions each.
pub fn gen_project_symmetry(
    p: &BudgetAllocation,
    k: usize,
    seed: u64,
) -> Result<Vec<Question>, GenError> {
    gen_sets(p, k, seed, "project", Generator::ProjectSymmetry, rotations_valid, project_set)
}

/// `k` sign-symmetry sets of two questions each.
pub fn gen_sign_symmetry(
    p: &BudgetAllocation,
    k: usize,
    seed: u64,
) -> Result<Vec<Question>, GenError> {
    gen_sets(p, k, seed, "sign", Generator::SignSymmetry, negation_valid, sign_set)
}
