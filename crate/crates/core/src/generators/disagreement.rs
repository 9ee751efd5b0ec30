use std::cmp::Ordering;

use rand::Rng;

use crate::domain::BudgetAllocation;
use crate::question::{Generator, Provenance, Question};
use crate::rng::{stream, GridSampler, REJECTION_CAP};
use crate::utility::{Score, UtilityModel};

use super::{question_id, GenError};

/// `k` pairs on which `model_a` strictly prefers the first option and
/// `model_b` strictly prefers the second.
///
/// Random pairs are drawn uniformly from the grid; a draw on which the models
/// disagree in the other orientation is kept with its options swapped, which
/// leaves the sampling law unchanged. When the draws run out, the
/// disagreeing pairs are enumerated and one is picked uniformly.
/// Evaluation errors (e.g. Leontief at a zero ideal) surface up front.
pub fn gen_model_disagreement(
    p: &BudgetAllocation,
    model_a: &UtilityModel,
    model_b: &UtilityModel,
    k: usize,
    seed: u64,
) -> Result<Vec<Question>, GenError> {
    let points = GridSampler::grid5().points().to_vec();
    let score = |m: &UtilityModel| -> Result<Vec<Score>, GenError> {
        points.iter().map(|q| Ok(m.score(p, q)?)).collect()
    };
    let (sa, sb) = (score(model_a)?, score(model_b)?);
    // orientation of a disagreeing pair (i, j): true when a prefers i
    let disagree = |i: usize, j: usize| match (sa[i].compare(&sa[j]), sb[i].compare(&sb[j])) {
        (Ordering::Greater, Ordering::Less) => Some(true),
        (Ordering::Less, Ordering::Greater) => Some(false),
        _ => None,
    };
    let n = points.len();
    let mut out = Vec::with_capacity(k);
    let mut enumerated: Option<Vec<(usize, usize)>> = None;
    for index in 0..k {
        let mut rng = stream(seed, "disagreement", index as u64);
        let mut found = None;
        for _ in 0..REJECTION_CAP {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            if let Some(a_first) = disagree(i, j) {
                found = Some(if a_first { (i, j) } else { (j, i) });
                break;
            }
        }
        if found.is_none() {
            let pairs = enumerated.get_or_insert_with(|| {
                (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter_map(|(i, j)| disagree(i, j).map(|a_first| if a_first { (i, j) } else { (j, i) }))
                    .collect()
            });
            if !pairs.is_empty() {
                found = Some(pairs[rng.random_range(0..pairs.len())]);
            }
        }
        let (i, j) = found.ok_or(GenError::GenerationExhausted {
            generator: Generator::ModelDisagreement,
            attempts: REJECTION_CAP,
        })?;
        let mut prov = Provenance::new(Generator::ModelDisagreement);
        prov.models = Some([model_a.kind(), model_b.kind()]);
        out.push(Question::pairwise(question_id(index), points[i], points[j], prov));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::Preference;

    #[test]
    fn predicate_holds() {
        let p = BudgetAllocation::from_points([30, 30, 40]).unwrap();
        let qs = gen_model_disagreement(&p, &UtilityModel::L1, &UtilityModel::Leontief, 10, 5)
            .unwrap();
        assert_eq!(qs.len(), 10);
        for q in qs {
            let o = q.allocations().unwrap();
            assert_eq!(UtilityModel::L1.prefer(&p, &o[0], &o[1]).unwrap(), Preference::First);
            assert_eq!(
                UtilityModel::Leontief.prefer(&p, &o[0], &o[1]).unwrap(),
                Preference::Second
            );
        }
    }

    #[test]
    fn rare_disagreement_is_found() {
        let p = BudgetAllocation::from_points([30, 30, 40]).unwrap();
        let qs = gen_model_disagreement(&p, &UtilityModel::L1, &UtilityModel::L2, 10, 9).unwrap();
        for q in qs {
            let o = q.allocations().unwrap();
            assert_eq!(UtilityModel::L1.prefer(&p, &o[0], &o[1]).unwrap(), Preference::First);
            assert_eq!(UtilityModel::L2.prefer(&p, &o[0], &o[1]).unwrap(), Preference::Second);
        }
    }

    #[test]
    fn identical_models_exhaust() {
        let p = BudgetAllocation::from_points([30, 30, 40]).unwrap();
        let err = gen_model_disagreement(&p, &UtilityModel::L1, &UtilityModel::L1, 1, 5);
        assert!(matches!(err, Err(GenError::GenerationExhausted { .. })));
    }
}
