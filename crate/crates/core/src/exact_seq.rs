//! Rank deduction on long exact sequences of finite-dimensional vector spaces.
//!
//! A sequence `V_0 -> V_1 -> ... -> V_n` is described only by the dimensions of
//! its terms. The unknowns are the ranks `r_i` of the maps `V_i -> V_{i+1}`.
//! Exactness at a node `i` means `dim V_i - r_i = r_{i-1}`, with `r_{-1} = 0`
//! when the sequence starts with `0 -> V_0`, and `r_n = 0` when the sequence
//! stops with `V_n -> 0`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Largest number of candidate rank tuples the exhaustive search will visit.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("a sequence needs at least two terms, got {0}")]
    EmptySequence(usize),
    #[error("dimension at position {index} is negative ({value})")]
    NegativeDimension { index: usize, value: i64 },
    #[error("exhaustive search would visit {size} rank tuples (limit {limit})")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
}

/// Dimensions of the terms of a long exact sequence plus its end markers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExactSequenceSpec {
    dims: Vec<usize>,
    left_closed: bool,
    right_open: bool,
}

impl ExactSequenceSpec {
    pub fn new(dims: Vec<usize>, left_closed: bool, right_open: bool) -> Result<Self, SequenceError> {
        if dims.len() < 2 {
            return Err(SequenceError::EmptySequence(dims.len()));
        }
        Ok(Self {
            dims,
            left_closed,
            right_open,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn left_closed(&self) -> bool {
        self.left_closed
    }

    pub fn right_open(&self) -> bool {
        self.right_open
    }

    /// Number of maps, one less than the number of terms.
    pub fn map_count(&self) -> usize {
        self.dims.len() - 1
    }

    /// Largest rank the map `V_i -> V_{i+1}` can have.
    pub fn max_rank(&self, map: usize) -> usize {
        self.dims[map].min(self.dims[map + 1])
    }

    /// Whether exactness is imposed at term `node`.
    pub fn is_exact_at(&self, node: usize) -> bool {
        if node == 0 {
            self.left_closed
        } else if node == self.dims.len() - 1 {
            !self.right_open
        } else {
            true
        }
    }

    /// Checks a rank tuple against the bounds and every exactness condition.
    pub fn admits(&self, ranks: &[usize]) -> bool {
        if ranks.len() != self.map_count() {
            return false;
        }
        if ranks.iter().enumerate().any(|(i, &r)| r > self.max_rank(i)) {
            return false;
        }
        (0..self.dims.len()).filter(|&node| self.is_exact_at(node)).all(|node| {
            let incoming = if node == 0 { 0 } else { ranks[node - 1] };
            let outgoing = ranks.get(node).copied().unwrap_or(0);
            self.dims[node] == incoming + outgoing
        })
    }

    /// Alternating sum of the dimensions, `dim V_0 - dim V_1 + ...`.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// Validating constructor for sequences read from untyped input.
pub fn build_sequence(dims: &[i64], left_closed: bool, right_open: bool) -> Result<ExactSequenceSpec, SequenceError> {
    let dims = dims
        .iter()
        .enumerate()
        .map(|(index, &value)| usize::try_from(value).map_err(|_| SequenceError::NegativeDimension { index, value }))
        .collect::<Result<Vec<_>, _>>()?;
    ExactSequenceSpec::new(dims, left_closed, right_open)
}

/// Rank tuple `(r_0, ..., r_{n-1})`.
pub type RankProfile = Vec<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Injective,
    Surjective,
    Zero,
}

impl Property {
    pub fn holds(self, source: usize, target: usize, rank: usize) -> bool {
        match self {
            Property::Injective => rank == source,
            Property::Surjective => rank == target,
            Property::Zero => rank == 0,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Injective => "injective",
            Property::Surjective => "surjective",
            Property::Zero => "zero",
        })
    }
}

/// How a property behaves across all feasible profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Forcing {
    /// Holds in every feasible profile.
    Always,
    /// Fails in every feasible profile.
    Never,
    /// Holds in some profiles and fails in others.
    Varies,
}

impl Forcing {
    fn from_counts(holds: usize, total: usize) -> Self {
        if holds == total {
            Forcing::Always
        } else if holds == 0 {
            Forcing::Never
        } else {
            Forcing::Varies
        }
    }
}

/// One-word summary of a map's classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ForcedBijective,
    ForcedZero,
    ForcedInjective,
    ForcedSurjective,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ForcedBijective => "forced bijective",
            Verdict::ForcedZero => "forced zero",
            Verdict::ForcedInjective => "forced injective",
            Verdict::ForcedSurjective => "forced surjective",
            Verdict::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapClassification {
    pub map: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub injective: Forcing,
    pub surjective: Forcing,
    pub zero: Forcing,
    /// The rank, when it is the same in every profile.
    pub forced_rank: Option<usize>,
}

impl MapClassification {
    pub fn forcing(&self, property: Property) -> Forcing {
        match property {
            Property::Injective => self.injective,
            Property::Surjective => self.surjective,
            Property::Zero => self.zero,
        }
    }

    pub fn verdict(&self) -> Verdict {
        use Forcing::Always;
        match (self.injective, self.surjective, self.zero) {
            (Always, Always, _) => Verdict::ForcedBijective,
            (_, _, Always) => Verdict::ForcedZero,
            (Always, _, _) => Verdict::ForcedInjective,
            (_, Always, _) => Verdict::ForcedSurjective,
            _ => Verdict::Undetermined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankSolution {
    pub spec: ExactSequenceSpec,
    /// Feasible rank tuples in lexicographic order.
    pub profiles: BTreeSet<RankProfile>,
    /// Empty when the sequence is infeasible.
    pub classification: Vec<MapClassification>,
}

impl RankSolution {
    pub fn from_profiles(spec: ExactSequenceSpec, profiles: BTreeSet<RankProfile>) -> Self {
        let classification = if profiles.is_empty() {
            Vec::new()
        } else {
            classify(&spec, &profiles)
        };
        Self {
            spec,
            profiles,
            classification,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !self.profiles.is_empty()
    }

    pub fn map(&self, index: usize) -> Option<&MapClassification> {
        self.classification.get(index)
    }
}

fn classify(spec: &ExactSequenceSpec, profiles: &BTreeSet<RankProfile>) -> Vec<MapClassification> {
    let total = profiles.len();
    (0..spec.map_count())
        .map(|map| {
            let (source, target) = (spec.dims[map], spec.dims[map + 1]);
            let count = |p: Property| profiles.iter().filter(|r| p.holds(source, target, r[map])).count();
            let ranks: BTreeSet<usize> = profiles.iter().map(|r| r[map]).collect();
            MapClassification {
                map,
                source_dim: source,
                target_dim: target,
                injective: Forcing::from_counts(count(Property::Injective), total),
                surjective: Forcing::from_counts(count(Property::Surjective), total),
                zero: Forcing::from_counts(count(Property::Zero), total),
                forced_rank: if ranks.len() == 1 { ranks.first().copied() } else { None },
            }
        })
        .collect()
}

/// Solves for every feasible rank profile.
///
/// Exactness at an interior node gives `r_i = dim V_i - r_{i-1}`, so the whole
/// profile is determined by `r_0`. With a closed left end `r_0 = dim V_0`;
/// otherwise each admissible `r_0` is propagated and the survivors kept.
pub fn solve_ranks(spec: &ExactSequenceSpec) -> RankSolution {
    let dims = &spec.dims;
    let maps = spec.map_count();
    let first: Vec<usize> = if spec.left_closed {
        vec![dims[0]]
    } else {
        (0..=spec.max_rank(0)).collect()
    };

    let mut profiles = BTreeSet::new();
    'start: for r0 in first {
        if r0 > spec.max_rank(0) {
            continue;
        }
        let mut ranks = Vec::with_capacity(maps);
        ranks.push(r0);
        for node in 1..maps {
            let Some(r) = dims[node].checked_sub(ranks[node - 1]) else {
                continue 'start;
            };
            if r > spec.max_rank(node) {
                continue 'start;
            }
            ranks.push(r);
        }
        if !spec.right_open && ranks[maps - 1] != dims[maps] {
            continue;
        }
        profiles.insert(ranks);
    }
    RankSolution::from_profiles(spec.clone(), profiles)
}

/// Size of the exhaustive search space, `prod (min(d_i, d_{i+1}) + 1)`.
pub fn search_space_size(spec: &ExactSequenceSpec) -> u128 {
    (0..spec.map_count()).fold(1u128, |acc, i| acc.saturating_mul(spec.max_rank(i) as u128 + 1))
}

/// Enumerates every rank tuple within the bounds and keeps those that satisfy
/// all exactness conditions. Independent of [`solve_ranks`].
pub fn brute_force_profiles(spec: &ExactSequenceSpec) -> Result<BTreeSet<RankProfile>, SequenceError> {
    let size = search_space_size(spec);
    if size > BRUTE_FORCE_LIMIT {
        return Err(SequenceError::SearchSpaceTooLarge {
            size,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let maps = spec.map_count();
    let mut ranks = vec![0usize; maps];
    let mut found = BTreeSet::new();
    loop {
        if spec.admits(&ranks) {
            found.insert(ranks.clone());
        }
        // odometer increment, last position fastest
        let mut pos = maps;
        loop {
            if pos == 0 {
                return Ok(found);
            }
            pos -= 1;
            if ranks[pos] < spec.max_rank(pos) {
                ranks[pos] += 1;
                break;
            }
            ranks[pos] = 0;
        }
    }
}

/// A statement about one map that can be checked against a solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapClaim {
    pub map: usize,
    pub label: String,
    pub property: Property,
    /// `true`: the property is claimed to hold in every solution.
    /// `false`: the property is claimed not to be forced.
    pub forced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub claim: MapClaim,
    pub actual: Forcing,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.claim;
        if c.forced {
            write!(
                f,
                "claimed {} forced {}, but the constraints give {:?}",
                c.label, c.property, self.actual
            )
        } else {
            write!(
                f,
                "claimed {} not forced {}, but every feasible profile makes it {}",
                c.label, c.property, c.property
            )
        }
    }
}

/// Claims whose forcing status disagrees with `solution`. An infeasible
/// solution contradicts nothing.
pub fn check_claims(solution: &RankSolution, claims: &[MapClaim]) -> Vec<Discrepancy> {
    claims
        .iter()
        .filter_map(|claim| {
            let actual = solution.map(claim.map)?.forcing(claim.property);
            let agrees = (actual == Forcing::Always) == claim.forced;
            (!agrees).then(|| Discrepancy {
                claim: claim.clone(),
                actual,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dims: &[usize], left_closed: bool, right_open: bool) -> ExactSequenceSpec {
        ExactSequenceSpec::new(dims.to_vec(), left_closed, right_open).unwrap()
    }

    #[test]
    fn rejects_short_and_negative() {
        assert_eq!(build_sequence(&[3], true, true), Err(SequenceError::EmptySequence(1)));
        assert_eq!(build_sequence(&[], true, true), Err(SequenceError::EmptySequence(0)));
        assert_eq!(
            build_sequence(&[1, -2, 1], true, true),
            Err(SequenceError::NegativeDimension { index: 1, value: -2 })
        );
        assert!(build_sequence(&[0, 0], true, false).is_ok());
    }

    #[test]
    fn elliptic_sequence_is_rigid() {
        let sol = solve_ranks(&spec(&[1, 2, 1, 1, 1], true, true));
        assert_eq!(sol.profiles.iter().collect::<Vec<_>>(), vec![&vec![1, 1, 0, 1]]);
        let verdicts: Vec<_> = sol.classification.iter().map(|c| c.verdict()).collect();
        assert_eq!(
            verdicts,
            vec![
                Verdict::ForcedInjective,
                Verdict::ForcedSurjective,
                Verdict::ForcedZero,
                Verdict::ForcedBijective,
            ]
        );
        assert_eq!(sol.map(3).unwrap().injective, Forcing::Always);
    }

    #[test]
    fn zeros_around_nonzero_space_is_infeasible() {
        let sol = solve_ranks(&spec(&[0, 5, 0], true, false));
        assert!(!sol.is_feasible());
        assert!(sol.classification.is_empty());
    }

    #[test]
    fn short_exact_iso() {
        let sol = solve_ranks(&spec(&[2, 2], true, false));
        assert_eq!(sol.profiles.into_iter().collect::<Vec<_>>(), vec![vec![2]]);
    }

    #[test]
    fn nonzero_euler_characteristic_is_infeasible() {
        let s = spec(&[1, 1, 1], true, false);
        assert_eq!(s.euler_characteristic(), 1);
        assert!(!solve_ranks(&s).is_feasible());
        assert!(brute_force_profiles(&s).unwrap().is_empty());
    }

    #[test]
    fn open_left_end_leaves_first_rank_free() {
        let sol = solve_ranks(&spec(&[2, 3], false, true));
        assert_eq!(sol.profiles.len(), 3);
        let c = sol.map(0).unwrap();
        assert_eq!(c.verdict(), Verdict::Undetermined);
        assert_eq!(c.zero, Forcing::Varies);
        assert_eq!(c.surjective, Forcing::Never);
        assert_eq!(c.forced_rank, None);
    }

    #[test]
    fn brute_force_respects_limit() {
        let s = spec(&[9; 9], false, true);
        assert!(matches!(
            brute_force_profiles(&s),
            Err(SequenceError::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn claims_are_compared_against_forcing() {
        let sol = solve_ranks(&spec(&[1, 2, 1, 1, 1], true, true));
        let claim = |forced| MapClaim {
            map: 3,
            label: "gamma".into(),
            property: Property::Injective,
            forced,
        };
        assert!(check_claims(&sol, &[claim(true)]).is_empty());
        let d = check_claims(&sol, &[claim(false)]);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].actual, Forcing::Always);
    }
}
