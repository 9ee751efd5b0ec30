use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::domain::{BudgetAllocation, DeviationVector, ISSUES};
use crate::question::{BiennialOption, Generator, Provenance, Question};
use crate::rng::{stream, REJECTION_CAP};

use super::biennial::{balancing, sample_round};
use super::{question_id, GenError};

/// How a change vector `q` is split into `q1 + q2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    /// Each non-pivot coordinate `j` contributes `x_j e_j - x_j e_pivot`,
    /// where the pivot is a zero coordinate if there is one and otherwise
    /// the coordinate whose sign differs from the other two.
    #[default]
    ConcentratedPivot,
    /// `q1 = [x1, 0, -x1]`, `q2 = [0, x2, -x2]`.
    LastCoordinate,
}

fn pivot(x: &[Amount; ISSUES]) -> usize {
    if let Some(j) = x.iter().position(|v| *v == Amount::ZERO) {
        return j;
    }
    let positives = x.iter().filter(|v| v.is_positive()).count();
    let odd_positive = positives == 1;
    x.iter()
        .position(|v| v.is_positive() == odd_positive)
        .expect("three nonzero entries summing to zero have a sign minority")
}

/// Splits `q` into two vectors summing to it.
pub fn split(q: &DeviationVector, rule: SplitRule) -> (DeviationVector, DeviationVector) {
    let x = q.deltas();
    let part = |j: usize, k: usize| {
        let mut v = [Amount::ZERO; ISSUES];
        v[j] = x[j];
        v[k] = -x[j];
        DeviationVector::new(v).expect("zero-sum")
    };
    match rule {
        SplitRule::LastCoordinate => (part(0, 2), part(1, 2)),
        SplitRule::ConcentratedPivot => {
            let pv = pivot(x);
            let others: Vec<usize> = (0..ISSUES).filter(|&j| j != pv).collect();
            (part(others[0], pv), part(others[1], pv))
        }
    }
}

fn rotate_left(q: &DeviationVector, steps: usize) -> DeviationVector {
    let mut d = *q.deltas();
    d.rotate_left(steps % ISSUES);
    DeviationVector::new(d).expect("zero-sum")
}

/// The six experimental questions for base vector `q`: for each rotation,
/// `(p, p+q)` vs `(p+q1, p+q2)` and the same with every vector negated.
/// Returns `None` when any derived allocation is invalid or a split part is
/// zero.
pub fn triangle_questions(
    p: &BudgetAllocation,
    q: &DeviationVector,
    rule: SplitRule,
    set_index: usize,
    first_index: usize,
) -> Option<Vec<Question>> {
    if q.is_zero() {
        return None;
    }
    let mut out = Vec::with_capacity(6);
    for rotation in 0..ISSUES {
        let rq = rotate_left(q, rotation);
        let (q1, q2) = split(&rq, rule);
        if q1.is_zero() || q2.is_zero() {
            return None;
        }
        for sign in [1i8, -1] {
            let (vq, v1, v2) = if sign > 0 {
                (rq, q1, q2)
            } else {
                (rq.negated(), q1.negated(), q2.negated())
            };
            let concentrated = BiennialOption::new(*p, p.shifted(&vq).ok()?);
            let split_option = BiennialOption::new(p.shifted(&v1).ok()?, p.shifted(&v2).ok()?);
            let mut prov = Provenance::new(Generator::TriangleSplit);
            prov.set_index = Some(set_index);
            prov.rotation = Some(rotation);
            prov.sign = Some(sign);
            out.push(Question::biennial(
                question_id(first_index + out.len()),
                concentrated,
                split_option,
                prov,
            ));
        }
    }
    Some(out)
}

/// Largest multiple of 5 not exceeding the room every entry has to move.
fn max_step(p: &BudgetAllocation) -> i64 {
    let room = p
        .entries()
        .iter()
        .map(|e| (*e).min(Amount::TOTAL - *e))
        .min()
        .expect("non-empty");
    room.hundredths() / 500
}

/// Two screening questions (ideal versus balancing allocation with year 1
/// fixed, then year 2 fixed) followed by six questions per base vector.
pub fn gen_triangle_split(
    p: &BudgetAllocation,
    k: usize,
    rule: SplitRule,
    seed: u64,
) -> Result<Vec<Question>, GenError> {
    let mut out = Vec::with_capacity(2 + 6 * k);
    for (i, fixed_year) in [1u8, 2].into_iter().enumerate() {
        let r = sample_round(p, seed, "triangle-screen", i, Generator::TriangleSplit)?;
        let q = balancing(p, &r).expect("checked by sampler");
        let (a, b) = if fixed_year == 1 {
            (BiennialOption::new(r, *p), BiennialOption::new(r, q))
        } else {
            (BiennialOption::new(*p, r), BiennialOption::new(q, r))
        };
        let mut prov = Provenance::new(Generator::TriangleSplit);
        prov.screening = true;
        prov.sub_poll = Some(fixed_year + 1);
        out.push(Question::biennial(question_id(out.len()), a, b, prov));
    }
    let steps = max_step(p);
    let exhausted = GenError::GenerationExhausted {
        generator: Generator::TriangleSplit,
        attempts: REJECTION_CAP,
    };
    if steps == 0 {
        return Err(exhausted);
    }
    for set_index in 0..k {
        let mut rng = stream(seed, "triangle", set_index as u64);
        let mut found = None;
        for _ in 0..REJECTION_CAP {
            let x1 = rng.random_range(-steps..=steps) * 5;
            let x2 = rng.random_range(-steps..=steps) * 5;
            let x3 = -x1 - x2;
            if x3.abs() > steps * 5 {
                continue;
            }
            let q = DeviationVector::from_points([x1, x2, x3]).expect("zero-sum");
            if let Some(qs) = triangle_questions(p, &q, rule, set_index, out.len()) {
                found = Some(qs);
                break;
            }
        }
        match found {
            Some(qs) => out.extend(qs),
            None => return Err(exhausted),
        }
    }
    Ok(out)
}
