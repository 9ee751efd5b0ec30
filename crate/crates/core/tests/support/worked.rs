//! Worked examples from the published tables, checked against the library.
//! Each check returns a short summary or the first mismatch.
#![allow(dead_code)]

use std::time::Instant;

use budgetpoll_core::domain::{BudgetAllocation, DeviationVector};
use budgetpoll_core::generators::{
    concentrated_pair, convex_question, cyclic_shift_options, project_set, triangle_questions, x_base,
    x_lambda, SplitRule, RANKING_LAMBDAS,
};
use budgetpoll_core::question::{BiennialOption, ShiftDirection};
use budgetpoll_core::{Amount, Preference, UtilityModel, Weight};

pub type Outcome = Result<String, String>;

fn a(v: [i64; 3]) -> BudgetAllocation {
    BudgetAllocation::from_points(v).unwrap()
}

fn dec(v: [&str; 3]) -> BudgetAllocation {
    BudgetAllocation::new(v.map(|s| s.parse::<Amount>().unwrap())).unwrap()
}

fn w(h: u8) -> Weight {
    Weight::from_hundredths(h).unwrap()
}

fn close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want} ± {tol}"))
    }
}

fn same<T: PartialEq + std::fmt::Debug>(label: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{label}: got {got:?}, expected {want:?}"))
    }
}

/// Distances and ratios of the introduction and the head-to-head poll
/// illustrations.
pub fn utility_values() -> Outcome {
    let start = Instant::now();
    let dist = |m: &UtilityModel, p, q| m.distance_variant(&a(p), &a(q)).map_err(|e| e.to_string());
    let leontief = |p, q| UtilityModel::Leontief.evaluate(&a(p), &a(q)).map_err(|e| e.to_string());
    let p = [30, 30, 40];
    for (q, l1, l2) in [
        ([75, 5, 20], 90.0, 55.23),
        ([30, 70, 0], 80.0, 56.57),
        ([45, 50, 5], 70.0, 43.01),
        ([10, 5, 85], 90.0, 55.23),
    ] {
        close(&format!("l1 {q:?}"), dist(&UtilityModel::L1, p, q)?, l1, 0.0)?;
        close(&format!("l2 {q:?}"), dist(&UtilityModel::L2, p, q)?, l2, 0.01)?;
    }
    close("leontief [45,50,5]", leontief(p, [45, 50, 5])?, 0.125, 0.005)?;
    close("leontief [10,5,85]", leontief(p, [10, 5, 85])?, 0.17, 0.005)?;

    let p = [50, 30, 20];
    let qs = [[41, 30, 29], [43, 40, 17], [43, 26, 31]];
    for (q, (l1, ratio)) in qs.iter().zip([(18.0, 0.82), (20.0, 0.85), (22.0, 0.86)]) {
        close(&format!("l1 {q:?}"), dist(&UtilityModel::L1, p, *q)?, l1, 0.0)?;
        close(&format!("leontief {q:?}"), leontief(p, *q)?, ratio, 0.005)?;
    }
    for (q, sq) in qs.iter().zip([162.0f64, 158.0, 186.0]) {
        close(&format!("l2 {q:?}"), dist(&UtilityModel::L2, p, *q)?, sq.sqrt(), 1e-9)?;
    }
    let best = |m: &UtilityModel| -> Result<usize, String> {
        let mut best = 0;
        for i in 1..3 {
            if m.prefer(&a(p), &a(qs[i]), &a(qs[best])).map_err(|e| e.to_string())? == Preference::First {
                best = i;
            }
        }
        Ok(best)
    };
    same("l1 favourite", best(&UtilityModel::L1)?, 0)?;
    same("l2 favourite", best(&UtilityModel::L2)?, 1)?;
    same("leontief favourite", best(&UtilityModel::Leontief)?, 2)?;
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("19 values within tolerance in {elapsed:?}"))
}

/// Every row of the convex-combination example, plus the rounded variant.
pub fn convex_examples() -> Outcome {
    let p = a([30, 40, 30]);
    let rows: [(u8, [i64; 3], [&str; 3]); 10] = [
        (10, [20, 60, 20], ["21", "58", "21"]),
        (20, [25, 35, 40], ["26", "36", "38"]),
        (30, [40, 20, 40], ["37", "26", "37"]),
        (40, [10, 70, 20], ["18", "58", "24"]),
        (50, [50, 30, 20], ["40", "35", "25"]),
        (50, [60, 15, 25], ["45", "27.5", "27.5"]),
        (60, [35, 45, 20], ["32", "42", "26"]),
        (70, [40, 50, 10], ["33", "43", "24"]),
        (80, [20, 40, 40], ["28", "40", "32"]),
        (90, [45, 25, 30], ["31.5", "38.5", "30"]),
    ];
    for (i, (lambda, q, c)) in rows.iter().enumerate() {
        let question = convex_question(&p, &a(*q), w(*lambda), false, i).map_err(|e| e.to_string())?;
        same(
            &format!("λ={} q={q:?}", f64::from(*lambda) / 100.0),
            question.allocations().unwrap().to_vec(),
            vec![a(*q), dec(*c)],
        )?;
    }
    let rounded = convex_question(&p, &a([45, 25, 30]), w(90), true, 0).map_err(|e| e.to_string())?;
    same("rounded λ=0.9", rounded.allocations().unwrap()[1], a([30, 40, 30]))?;
    Ok("10 rows and the rounded [30, 40, 30]".into())
}

/// The four cyclic-shift ranking questions for p = (85, 15, 5).
pub fn cyclic_examples() -> Outcome {
    let p = [85, 15, 5].map(Amount::from_points);
    let expected = [
        [[87, 14, 4], [84, 17, 4], [84, 14, 7]],
        [[89, 13, 3], [83, 19, 3], [83, 13, 9]],
        [[83, 16, 6], [86, 13, 6], [86, 16, 3]],
        [[81, 17, 7], [87, 11, 7], [87, 17, 1]],
    ];
    let mut i = 0;
    for direction in [ShiftDirection::Pd, ShiftDirection::Nd] {
        for h in RANKING_LAMBDAS {
            let x = x_lambda(&p, w(h));
            let got = cyclic_shift_options(&p, x, direction);
            same(
                &format!("question {}", i + 1),
                got,
                expected[i].map(|v| v.map(Amount::from_points)),
            )?;
            i += 1;
        }
    }
    Ok("4 questions".into())
}

/// Magnitude level 2 on the first issue for p = (60, 30, 10).
pub fn concentrated_example() -> Outcome {
    let p = a([60, 30, 10]);
    let x = Amount::from_points(2 * x_base(&p));
    let pair = concentrated_pair(&p, x, 0).ok_or("no pair")?;
    same("pair", pair, (a([56, 32, 12]), a([64, 28, 8])))?;
    Ok("(56, 32, 12) vs (64, 28, 8)".into())
}

/// Project-symmetry rotations and the triangle split for p = (30, 30, 40).
pub fn symmetry_and_triangle_examples() -> Outcome {
    let p = a([30, 30, 40]);
    let set = project_set(&p, &a([50, 34, 16]), &a([20, 25, 55]), 0, 0).map_err(|e| e.to_string())?;
    same("rotation 1", set[1].allocations().unwrap().to_vec(), vec![a([6, 50, 44]), a([45, 20, 35])])?;
    same("rotation 2", set[2].allocations().unwrap().to_vec(), vec![a([34, 6, 60]), a([25, 45, 30])])?;
    let q = DeviationVector::from_points([-20, 10, 10]).unwrap();
    let qs = triangle_questions(&p, &q, SplitRule::default(), 0, 0).ok_or("no triangle questions")?;
    same(
        "triangle options",
        qs[0].biennial_options().unwrap().to_vec(),
        vec![
            BiennialOption::new(a([30, 30, 40]), a([10, 40, 50])),
            BiennialOption::new(a([20, 40, 40]), a([20, 30, 50])),
        ],
    )?;
    Ok("rotations 1 and 2, split (20, 40, 40) + (20, 30, 50)".into())
}

/// All generator examples together.
pub fn generator_examples() -> Outcome {
    let parts = [
        convex_examples()?,
        cyclic_examples()?,
        concentrated_example()?,
        symmetry_and_triangle_examples()?,
    ];
    Ok(parts.join("; "))
}
