//! Budget-simplex types: allocations, ideal budgets, deviation vectors and
//! issue sets, plus validation, rescaling and deviation arithmetic.

use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::amount::{Amount, Weight};

/// Number of issues in every poll.
pub const ISSUES: usize = 3;

/// Grid step used for "multiples of 5" allocations.
pub const GRID_STEP: i64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("expected {expected} entries, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("entries sum to {sum}, not 100")]
    SumMismatch { sum: Amount },
    #[error("entry {index} is {value}, outside [0, 100]")]
    OutOfRange { index: usize, value: Amount },
    #[error("entry {index} is {value}, not a multiple of 5")]
    OffGrid { index: usize, value: Amount },
    #[error("entry {index} is {value}; rescale expects non-negative inputs")]
    NegativeInput { index: usize, value: Amount },
    #[error("no positive entry to rescale")]
    AllZero,
    #[error("entry {index} is {value}; ideal budgets use whole percentage points")]
    NonIntegral { index: usize, value: Amount },
    #[error("the budget must be allocated to at least two issues")]
    TooFewPositive,
    #[error("issue {index} has a zero budget; this poll needs every issue funded")]
    ZeroEntry { index: usize },
    #[error("deviation entries sum to {sum}, not 0")]
    NonZeroSum { sum: Amount },
    #[error("weighted combination is not representable in hundredths")]
    Inexact,
    #[error("invalid issue set: {0}")]
    InvalidIssueSet(String),
}

/// A point on the budget simplex: three non-negative shares summing to 100.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Amount; ISSUES]", into = "[Amount; ISSUES]")]
pub struct BudgetAllocation([Amount; ISSUES]);

impl BudgetAllocation {
    /// Validates `entries` without the grid constraint.
    pub fn new(entries: [Amount; ISSUES]) -> Result<Self, DomainError> {
        validate_allocation(&entries, false)
    }

    /// Convenience constructor from whole points.
    pub fn from_points(points: [i64; ISSUES]) -> Result<Self, DomainError> {
        Self::new(points.map(Amount::from_points))
    }

    pub fn entries(&self) -> &[Amount; ISSUES] {
        &self.0
    }

    pub fn get(&self, index: usize) -> Amount {
        self.0[index]
    }

    pub fn is_grid5(&self) -> bool {
        self.0.iter().all(|a| a.is_multiple_of(GRID_STEP))
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|a| a.is_whole())
    }

    pub fn positive_count(&self) -> usize {
        self.0.iter().filter(|a| a.is_positive()).count()
    }

    pub fn min_entry(&self) -> Amount {
        *self.0.iter().min().expect("non-empty")
    }

    /// `weight * self + (1 - weight) * other`, exactly.
    pub fn blend(&self, other: &BudgetAllocation, weight: Weight) -> Result<Self, DomainError> {
        let mut out = [Amount::ZERO; ISSUES];
        for (j, slot) in out.iter_mut().enumerate() {
            let a = self.0[j].scale_by(weight).ok_or(DomainError::Inexact)?;
            let b = other.0[j]
                .scale_by(weight.complement())
                .ok_or(DomainError::Inexact)?;
            *slot = a + b;
        }
        Self::new(out)
    }

    /// `self + d`, validated.
    pub fn shifted(&self, d: &DeviationVector) -> Result<Self, DomainError> {
        let mut out = self.0;
        for (slot, delta) in out.iter_mut().zip(d.0.iter()) {
            *slot += *delta;
        }
        Self::new(out)
    }

    pub fn to_f64(&self) -> [f64; ISSUES] {
        self.0.map(Amount::to_f64)
    }
}

impl TryFrom<[Amount; ISSUES]> for BudgetAllocation {
    type Error = DomainError;
    fn try_from(entries: [Amount; ISSUES]) -> Result<Self, Self::Error> {
        Self::new(entries)
    }
}

impl From<BudgetAllocation> for [Amount; ISSUES] {
    fn from(a: BudgetAllocation) -> Self {
        a.0
    }
}

impl fmt::Display for BudgetAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.0[0], self.0[1], self.0[2])
    }
}

/// Checks length, range, grid and sum constraints, in that order.
pub fn validate_allocation(raw: &[Amount], grid5: bool) -> Result<BudgetAllocation, DomainError> {
    let entries: [Amount; ISSUES] = raw.try_into().map_err(|_| DomainError::WrongLength {
        expected: ISSUES,
        found: raw.len(),
    })?;
    for (index, &value) in entries.iter().enumerate() {
        if value.is_negative() || value > Amount::TOTAL {
            return Err(DomainError::OutOfRange { index, value });
        }
    }
    if grid5 {
        if let Some((index, &value)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_multiple_of(GRID_STEP))
        {
            return Err(DomainError::OffGrid { index, value });
        }
    }
    let sum: Amount = entries.iter().sum();
    if sum != Amount::TOTAL {
        return Err(DomainError::SumMismatch { sum });
    }
    Ok(BudgetAllocation(entries))
}

/// Rounds a rational to the nearest integer, ties to even.
pub(crate) fn round_half_even(x: Ratio<i128>) -> i128 {
    let floor = x.floor();
    let frac = x - floor;
    let half = Ratio::new(1, 2);
    let f = floor.to_integer();
    if frac > half || (frac == half && f.rem_euclid(2) != 0) {
        f + 1
    } else {
        f
    }
}

/// Rounds a rational to the nearest integer, ties away from zero.
pub(crate) fn round_half_away(x: Ratio<i128>) -> i128 {
    let magnitude = x.abs();
    let floor = magnitude.floor();
    let r = if magnitude - floor >= Ratio::new(1, 2) {
        floor.to_integer() + 1
    } else {
        floor.to_integer()
    };
    if x.is_negative() {
        -r
    } else {
        r
    }
}

/// Index of the largest entry, lowest index among ties.
pub(crate) fn argmax<T: Ord + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Normalizes raw non-negative inputs to a sum-100 allocation on the
/// multiples-of-5 grid.
///
/// Entries are scaled to sum to 100 and rounded to the nearest multiple of 5
/// (ties to even). A positive input never rounds down to zero: it keeps at
/// least one grid step. The largest rounded entry (lowest index on ties) then
/// absorbs whatever residual is left so the sum is exact.
pub fn rescale(raw: &[Amount]) -> Result<BudgetAllocation, DomainError> {
    if raw.len() != ISSUES {
        return Err(DomainError::WrongLength {
            expected: ISSUES,
            found: raw.len(),
        });
    }
    if let Some((index, &value)) = raw.iter().enumerate().find(|(_, v)| v.is_negative()) {
        return Err(DomainError::NegativeInput { index, value });
    }
    let sum: i128 = raw.iter().map(|a| a.hundredths() as i128).sum();
    if sum == 0 {
        return Err(DomainError::AllZero);
    }
    let step = GRID_STEP as i128;
    let mut grid = [0i128; ISSUES];
    for (slot, value) in grid.iter_mut().zip(raw) {
        // share in points, divided by the grid step
        let steps = Ratio::new(value.hundredths() as i128 * 100, sum * step);
        let mut rounded = round_half_even(steps) * step;
        if rounded == 0 && value.is_positive() {
            rounded = step;
        }
        *slot = rounded;
    }
    let residual = 100 - grid.iter().sum::<i128>();
    if residual != 0 {
        let j = argmax(&grid);
        grid[j] += residual;
    }
    let entries = grid.map(|v| Amount::from_points(v as i64));
    validate_allocation(&entries, true)
}

/// A participant's ideal allocation (their peak).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdealBudget {
    pub participant_id: String,
    pub allocation: BudgetAllocation,
}

impl IdealBudget {
    /// Requires whole-point entries and at least two funded issues.
    pub fn new(
        participant_id: impl Into<String>,
        allocation: BudgetAllocation,
    ) -> Result<Self, DomainError> {
        if let Some((index, &value)) = allocation
            .entries()
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_whole())
        {
            return Err(DomainError::NonIntegral { index, value });
        }
        if allocation.positive_count() < 2 {
            return Err(DomainError::TooFewPositive);
        }
        Ok(IdealBudget {
            participant_id: participant_id.into(),
            allocation,
        })
    }

    /// Fails with `ZeroEntry` when some issue is unfunded.
    pub fn check_all_positive(&self) -> Result<(), DomainError> {
        match self
            .allocation
            .entries()
            .iter()
            .position(|a| !a.is_positive())
        {
            Some(index) => Err(DomainError::ZeroEntry { index }),
            None => Ok(()),
        }
    }

    pub fn peak(&self) -> &BudgetAllocation {
        &self.allocation
    }
}

/// A zero-sum change applied to an allocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Amount; ISSUES]", into = "[Amount; ISSUES]")]
pub struct DeviationVector([Amount; ISSUES]);

impl DeviationVector {
    pub fn new(deltas: [Amount; ISSUES]) -> Result<Self, DomainError> {
        let sum: Amount = deltas.iter().sum();
        if sum != Amount::ZERO {
            return Err(DomainError::NonZeroSum { sum });
        }
        Ok(DeviationVector(deltas))
    }

    pub fn from_points(points: [i64; ISSUES]) -> Result<Self, DomainError> {
        Self::new(points.map(Amount::from_points))
    }

    pub fn zero() -> Self {
        DeviationVector([Amount::ZERO; ISSUES])
    }

    pub fn deltas(&self) -> &[Amount; ISSUES] {
        &self.0
    }

    pub fn get(&self, index: usize) -> Amount {
        self.0[index]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|d| *d == Amount::ZERO)
    }

    pub fn negated(&self) -> Self {
        DeviationVector(self.0.map(|d| -d))
    }

    pub fn l1_norm(&self) -> Amount {
        self.0.iter().map(|d| d.abs()).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> Amount {
        self.0.iter().map(|d| d.abs()).max().expect("non-empty")
    }
}

impl TryFrom<[Amount; ISSUES]> for DeviationVector {
    type Error = DomainError;
    fn try_from(deltas: [Amount; ISSUES]) -> Result<Self, Self::Error> {
        Self::new(deltas)
    }
}

impl From<DeviationVector> for [Amount; ISSUES] {
    fn from(d: DeviationVector) -> Self {
        d.0
    }
}

impl std::ops::Add for DeviationVector {
    type Output = DeviationVector;
    fn add(self, rhs: DeviationVector) -> DeviationVector {
        let mut out = self.0;
        for (slot, d) in out.iter_mut().zip(rhs.0) {
            *slot += d;
        }
        DeviationVector(out)
    }
}

impl fmt::Display for DeviationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_one = |a: Amount| {
            if a.is_positive() {
                format!("+{a}")
            } else {
                a.to_string()
            }
        };
        write!(
            f,
            "[{}, {}, {}]",
            fmt_one(self.0[0]),
            fmt_one(self.0[1]),
            fmt_one(self.0[2])
        )
    }
}

/// `q - p`, entrywise.
pub fn deviation(p: &BudgetAllocation, q: &BudgetAllocation) -> DeviationVector {
    let mut out = [Amount::ZERO; ISSUES];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = q.get(j) - p.get(j);
    }
    DeviationVector(out)
}

/// Cyclic rotation moving every entry `steps` positions to the right.
pub fn rotate(d: &DeviationVector, steps: usize) -> DeviationVector {
    let mut out = d.0;
    out.rotate_right(steps % ISSUES);
    DeviationVector(out)
}

/// Whether an issue set describes national ministries or municipal projects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    National,
    Municipal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIssueSet")]
pub struct IssueSet {
    names: [String; ISSUES],
    scope: Scope,
}

#[derive(Deserialize)]
struct RawIssueSet {
    names: Vec<String>,
    scope: Scope,
}

impl TryFrom<RawIssueSet> for IssueSet {
    type Error = DomainError;
    fn try_from(raw: RawIssueSet) -> Result<Self, Self::Error> {
        IssueSet::new(raw.names, raw.scope)
    }
}

impl IssueSet {
    pub fn new(names: Vec<String>, scope: Scope) -> Result<Self, DomainError> {
        let names: [String; ISSUES] = names.try_into().map_err(|v: Vec<String>| {
            DomainError::InvalidIssueSet(format!("expected {ISSUES} issues, found {}", v.len()))
        })?;
        if names.iter().any(|n| n.trim().is_empty()) {
            return Err(DomainError::InvalidIssueSet("empty issue label".into()));
        }
        for i in 0..ISSUES {
            for j in i + 1..ISSUES {
                if names[i] == names[j] {
                    return Err(DomainError::InvalidIssueSet(format!(
                        "duplicate issue label `{}`",
                        names[i]
                    )));
                }
            }
        }
        Ok(IssueSet { names, scope })
    }

    /// Health, Education and Defense ministries.
    pub fn national() -> Self {
        IssueSet {
            names: ["Health".into(), "Education".into(), "Defense".into()],
            scope: Scope::National,
        }
    }

    /// Schools, help for the needy and cultural events.
    pub fn municipal() -> Self {
        IssueSet {
            names: [
                "Schools".into(),
                "Help for the needy".into(),
                "Cultural events".into(),
            ],
            scope: Scope::Municipal,
        }
    }

    pub fn names(&self) -> &[String; ISSUES] {
        &self.names
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }
}

/// Exact `value / unit` rounded half away from zero, as whole points.
pub(crate) fn round_ratio_points(value: Ratio<i128>) -> i64 {
    round_half_away(value).to_i64().expect("bounded")
}
