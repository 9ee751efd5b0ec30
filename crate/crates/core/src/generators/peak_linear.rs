use crate::amount::Weight;
use crate::domain::BudgetAllocation;
use crate::question::{Generator, Provenance, Question};

use super::{checked, question_id, GenError};

/// The extreme allocations, labelled A, B and C in reports.
pub const EXTREMES: [[i64; 3]; 3] = [[10, 10, 80], [10, 80, 10], [80, 10, 10]];

/// Blend weights toward the ideal, in hundredths.
pub const PEAK_LINEAR_LAMBDAS: [u8; 3] = [25, 50, 75];

const PAIRS: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

/// Twelve questions: the three pairs of extremes, then the same pairs after
/// blending every extreme toward the ideal at each λ.
pub fn gen_peak_linear(p: &BudgetAllocation) -> Result<Vec<Question>, GenError> {
    let extremes: Vec<BudgetAllocation> = EXTREMES
        .iter()
        .map(|v| BudgetAllocation::from_points(*v).expect("valid extreme"))
        .collect();
    let mut out = Vec::with_capacity(12);
    let mut push = |vs: &[BudgetAllocation], lambda: Option<Weight>| {
        for pair in PAIRS {
            let mut prov = Provenance::new(Generator::PeakLinear);
            prov.lambda = lambda;
            prov.pair = Some(pair);
            let index = out.len();
            out.push(Question::pairwise(
                question_id(index),
                vs[pair[0]],
                vs[pair[1]],
                prov,
            ));
        }
    };
    push(&extremes, None);
    for h in PEAK_LINEAR_LAMBDAS {
        let lambda = Weight::from_hundredths(h).expect("valid weight");
        let blended = checked(extremes.iter().map(|v| p.blend(v, lambda)))?;
        push(&blended, Some(lambda));
    }
    Ok(out)
}
