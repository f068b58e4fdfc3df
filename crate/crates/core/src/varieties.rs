//! Singularity varieties `V_(T, r)`: membership by rank, and the binomial
//! defining equations in the `Delta_ij` of wheel-type families for lines.

use std::fmt;

use crate::arrangement::{Arrangement, Sample};
use crate::discriminantal::{dependency_rows, intersection_rank};
use crate::error::{Error, Result};
use crate::presentation::{MinNuAbove, Presentation};
use crate::prime_field::FieldMode;
use crate::scalar::{primitive_integer_vector, Scalar};
use crate::subset::Subset;

pub const DEFAULT_SOLVE_BUDGET: usize = 200;
const SOLVE_HEIGHT: i64 = 12;

/// The pair `(T, r)` naming `V_(T, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyQuery {
    pub presentation: Presentation,
    pub r: usize,
}

impl VarietyQuery {
    pub fn new(presentation: Presentation, r: usize) -> Self {
        VarietyQuery { presentation, r }
    }

    /// `V_T`: `r = min { nu(T') : T' in P, T < T' } - 1`, computed now.
    pub fn defining(presentation: Presentation, budget: usize) -> Result<Self> {
        let r = default_r(&presentation, budget)?;
        Ok(VarietyQuery { presentation, r })
    }
}

pub fn default_r(t: &Presentation, budget: usize) -> Result<usize> {
    match t.min_nu_above(budget)? {
        MinNuAbove::Found(v) => Ok(v - 1),
        MinNuAbove::NoStrictUpperBound => Err(Error::InvalidArgument(format!(
            "{t} has no strict upper bound in P, so V_T is undefined"
        ))),
        MinNuAbove::Unresolved { .. } => Err(Error::BudgetExceeded { budget }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipVerdict {
    pub member: bool,
    /// Rank of `bigcap_{S in T} D_S`. Negative verdicts in a prime field
    /// carry the prime-field rank, a lower bound for the rational one;
    /// positive verdicts are always confirmed over the rationals.
    pub rank_certificate: usize,
    pub r: usize,
    pub field: FieldMode,
}

pub fn membership(
    a: &Arrangement,
    q: &VarietyQuery,
    field: FieldMode,
) -> Result<MembershipVerdict> {
    check_family_fits(a, &q.presentation)?;
    if let FieldMode::Prime(fp) = field {
        let rows = dependency_rows(a, q.presentation.members())?;
        if let Ok(reduced) = rows
            .iter()
            .map(|r| fp.reduce_vec(r))
            .collect::<Result<Vec<_>>>()
        {
            let rank = fp.rank_of_rows(&reduced);
            if rank > q.r {
                return Ok(MembershipVerdict {
                    member: false,
                    rank_certificate: rank,
                    r: q.r,
                    field,
                });
            }
        }
    }
    let rank = intersection_rank(a, &q.presentation)?;
    Ok(MembershipVerdict {
        member: rank <= q.r,
        rank_certificate: rank,
        r: q.r,
        field: FieldMode::Rational,
    })
}

fn check_family_fits(a: &Arrangement, t: &Presentation) -> Result<()> {
    match t.union().largest() {
        Some(m) if m > a.n() => Err(Error::IndexOutOfRange { index: m, n: a.n() }),
        _ => Ok(()),
    }
}

/// `prod Delta(plus) - prod Delta(minus)` for lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaBinomial {
    pub plus: Vec<(usize, usize)>,
    pub minus: Vec<(usize, usize)>,
}

impl DeltaBinomial {
    pub fn evaluate(&self, a: &Arrangement) -> Result<Scalar> {
        let prod = |pairs: &[(usize, usize)]| -> Result<Scalar> {
            pairs.iter().map(|&(i, j)| a.delta(i, j)).product()
        };
        Ok(prod(&self.plus)? - prod(&self.minus)?)
    }

    /// Smallest index occurring exactly once in each product; the binomial
    /// is linear in that normal.
    pub fn linear_index(&self) -> Option<usize> {
        let count = |pairs: &[(usize, usize)], x: usize| {
            pairs
                .iter()
                .map(|&(i, j)| (i == x) as usize + (j == x) as usize)
                .sum::<usize>()
        };
        let max = self
            .plus
            .iter()
            .chain(&self.minus)
            .map(|&(i, j)| i.max(j))
            .max()?;
        (1..=max).find(|&x| count(&self.plus, x) == 1 && count(&self.minus, x) == 1)
    }

    pub fn max_index(&self) -> usize {
        self.plus
            .iter()
            .chain(&self.minus)
            .map(|&(i, j)| i.max(j))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for DeltaBinomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = |pairs: &[(usize, usize)]| -> String {
            pairs
                .iter()
                .map(|&(i, j)| format!("D{i},{j}"))
                .collect::<Vec<_>>()
                .join("*")
        };
        write!(f, "{} - {}", mono(&self.plus), mono(&self.minus))
    }
}

/// Rim `(i_1, ..., i_m)` (cyclic) and hubs `(j_1, ..., j_m)` of a possibly
/// degenerated wheel with triangles `{i_l, i_{l+1}, j_l}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WheelLabeling {
    pub rim: Vec<usize>,
    pub hubs: Vec<usize>,
}

impl WheelLabeling {
    pub fn new(rim: Vec<usize>, hubs: Vec<usize>) -> Result<Self> {
        let w = WheelLabeling { rim, hubs };
        w.check()?;
        Ok(w)
    }

    fn check(&self) -> Result<()> {
        let m = self.rim.len();
        if m < 3 || self.hubs.len() != m {
            return Err(Error::InvalidLabeling(format!(
                "rim of length {m} with {} hubs",
                self.hubs.len()
            )));
        }
        let rim = Subset::from_indices(self.rim.iter().copied())
            .map_err(|e| Error::InvalidLabeling(e.to_string()))?;
        if rim.len() != m {
            return Err(Error::InvalidLabeling(
                "rim indices must be distinct".into(),
            ));
        }
        let hubs = Subset::from_indices(self.hubs.iter().copied())
            .map_err(|e| Error::InvalidLabeling(e.to_string()))?;
        if !(rim & hubs).is_empty() {
            return Err(Error::InvalidLabeling(
                "an index is both rim and hub".into(),
            ));
        }
        Ok(())
    }

    /// `W_{2n}`: rim `1, 3, ..., 2n-1`, hubs `2, 4, ..., 2n`.
    pub fn wheel(n2: usize) -> Result<Self> {
        let m = n2 / 2;
        WheelLabeling::new(
            (1..=m).map(|l| 2 * l - 1).collect(),
            (1..=m).map(|l| 2 * l).collect(),
        )
    }

    /// Twin wheel: rim `2, 4, ..., 2n`, hubs `3, 5, ..., 2n-1, 1`.
    pub fn twin_wheel(n2: usize) -> Result<Self> {
        let m = n2 / 2;
        WheelLabeling::new(
            (1..=m).map(|l| 2 * l).collect(),
            (1..=m).map(|l| (2 * l) % n2 + 1).collect(),
        )
    }

    /// `L_{2n+2}` as a degenerated wheel: rim `1, ..., 2n`, hubs alternating
    /// `2n+1, 2n+2`.
    pub fn ladder(size: usize) -> Result<Self> {
        let m = size - 2;
        WheelLabeling::new(
            (1..=m).collect(),
            (1..=m)
                .map(|l| if l % 2 == 1 { m + 1 } else { m + 2 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.rim.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rim.is_empty()
    }

    fn next_rim(&self, l: usize) -> usize {
        self.rim[(l + 1) % self.rim.len()]
    }

    /// `prod_l Delta_{j_l i_l} - prod_l Delta_{j_l i_{l+1}}`.
    pub fn binomial(&self) -> DeltaBinomial {
        let m = self.len();
        DeltaBinomial {
            plus: (0..m).map(|l| (self.hubs[l], self.rim[l])).collect(),
            minus: (0..m).map(|l| (self.hubs[l], self.next_rim(l))).collect(),
        }
    }

    pub fn max_index(&self) -> usize {
        self.rim
            .iter()
            .chain(&self.hubs)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Triangles plus the hub set, closed in Q(n, 2).
    pub fn presentation(&self, n: usize) -> Result<Presentation> {
        let m = self.len();
        let mut members: Vec<Subset> = (0..m)
            .map(|l| Subset::from_indices([self.rim[l], self.next_rim(l), self.hubs[l]]))
            .collect::<Result<_>>()?;
        let hubs = Subset::from_indices(self.hubs.iter().copied())?;
        if hubs.len() > 2 {
            members.push(hubs);
        }
        Presentation::new(n, 2, crate::presentation::merge_closure(members, 2))
    }

    /// The interleaved cyclic line order `i_1, j_1, i_2, j_2, ...`.
    fn cyclic_order(&self) -> Vec<usize> {
        self.rim
            .iter()
            .zip(&self.hubs)
            .flat_map(|(&i, &j)| [i, j])
            .collect()
    }
}

fn check_lines(a: &Arrangement, max_index: usize) -> Result<()> {
    if a.k() != 2 {
        return Err(Error::WrongRank {
            expected: 2,
            found: a.k(),
        });
    }
    if max_index > a.n() {
        return Err(Error::IndexOutOfRange {
            index: max_index,
            n: a.n(),
        });
    }
    Ok(())
}

/// Evaluates the wheel binomial. For `plain` wheels the lines must also be
/// pairwise non-parallel at cyclic distance one and two along
/// `i_1, j_1, i_2, j_2, ...`; otherwise consecutive rim lines and each rim
/// line with its hubs must be non-parallel.
pub fn wheel_poly(a: &Arrangement, w: &WheelLabeling, plain: bool) -> Result<Scalar> {
    w.check()?;
    check_lines(a, w.max_index())?;
    let parallel = |i: usize, j: usize| a.delta(i, j).map(|d| d.is_zero());
    if plain {
        let order = w.cyclic_order();
        let len = order.len();
        for p in 0..len {
            for step in [1, 2] {
                let (i, j) = (order[p], order[(p + step) % len]);
                if parallel(i, j)? {
                    return Err(Error::InvalidLabeling(format!(
                        "H_{i} and H_{j} are parallel"
                    )));
                }
            }
        }
    } else {
        for l in 0..w.len() {
            let (i, i2, j) = (w.rim[l], w.next_rim(l), w.hubs[l]);
            for (x, y) in [(i, i2), (i, j), (i2, j)] {
                if parallel(x, y)? {
                    return Err(Error::InvalidLabeling(format!(
                        "H_{x} and H_{y} are parallel"
                    )));
                }
            }
        }
    }
    w.binomial().evaluate(a)
}

/// `prod_{i<=n} Delta_{2i,2n+2} Delta_{2i-1,2n+1}
///  - prod_{i<=n} Delta_{2i,2n+1} Delta_{2i-1,2n+2}` on `2n + 2` lines.
pub fn ladder_binomial(n: usize) -> DeltaBinomial {
    let (a, b) = (2 * n + 1, 2 * n + 2);
    DeltaBinomial {
        plus: (1..=n).flat_map(|i| [(2 * i, b), (2 * i - 1, a)]).collect(),
        minus: (1..=n).flat_map(|i| [(2 * i, a), (2 * i - 1, b)]).collect(),
    }
}

pub fn ladder_poly(a: &Arrangement, n: usize) -> Result<Scalar> {
    if a.n() != 2 * n + 2 {
        return Err(Error::DimensionMismatch(format!(
            "the ladder equation for n = {n} needs {} lines, got {}",
            2 * n + 2,
            a.n()
        )));
    }
    check_lines(a, 2 * n + 2)?;
    ladder_binomial(n).evaluate(a)
}

/// `Delta_16 Delta_24 Delta_35 - Delta_15 Delta_26 Delta_34` on the given
/// six labels.
pub fn crapo_binomial(l: [usize; 6]) -> DeltaBinomial {
    let d = |x: usize, y: usize| (l[x - 1], l[y - 1]);
    DeltaBinomial {
        plus: vec![d(1, 6), d(2, 4), d(3, 5)],
        minus: vec![d(1, 5), d(2, 6), d(3, 4)],
    }
}

/// `Delta_14 Delta_16 Delta_27 Delta_35 - Delta_17 Delta_15 Delta_26 Delta_34`
/// on the given seven labels.
pub fn quintic_binomial(l: [usize; 7]) -> DeltaBinomial {
    let d = |x: usize, y: usize| (l[x - 1], l[y - 1]);
    DeltaBinomial {
        plus: vec![d(1, 4), d(1, 6), d(2, 7), d(3, 5)],
        minus: vec![d(1, 7), d(1, 5), d(2, 6), d(3, 4)],
    }
}

pub fn crapo_poly(a: &Arrangement, six: [usize; 6]) -> Result<Scalar> {
    check_lines(a, six.iter().copied().max().unwrap_or(0))?;
    crapo_binomial(six).evaluate(a)
}

pub fn quintic_poly(a: &Arrangement, seven: [usize; 7]) -> Result<Scalar> {
    check_lines(a, seven.iter().copied().max().unwrap_or(0))?;
    quintic_binomial(seven).evaluate(a)
}

/// A family of line configurations with a binomial defining equation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `W_{2n}`, by its size `2n`.
    Wheel(usize),
    TwinWheel(usize),
    /// `L_{2n+2}`, by its size.
    Ladder(usize),
    /// A degenerated wheel on `[n]`.
    Degenerated {
        labeling: WheelLabeling,
        n: usize,
    },
}

impl Family {
    /// The five families of minimal non-very generic intersections for eight
    /// lines, with the names used on the command line.
    pub fn eight_line_families() -> Vec<(&'static str, Family)> {
        let dw = |rim: &[usize], hubs: &[usize], n: usize| Family::Degenerated {
            labeling: WheelLabeling::new(rim.to_vec(), hubs.to_vec()).expect("valid labeling"),
            n,
        };
        vec![
            ("W6", Family::Wheel(6)),
            ("Wd8_4", dw(&[1, 3, 5, 7], &[2, 4, 6, 4], 7)),
            ("W8", Family::Wheel(8)),
            ("L8", Family::Ladder(8)),
            ("DW10", dw(&[1, 3, 5, 7, 8], &[2, 4, 6, 4, 6], 8)),
        ]
    }

    /// Looks up `W<2n>`, `T<2n>` (twin), `L<2n+2>` or one of the five
    /// eight-line names.
    pub fn by_name(name: &str) -> Option<Family> {
        if let Some((_, f)) = Self::eight_line_families()
            .into_iter()
            .find(|(n, _)| *n == name)
        {
            return Some(f);
        }
        let (kind, rest) = name.split_at_checked(1)?;
        let size: usize = rest.parse().ok()?;
        let f = match kind {
            "W" => Family::Wheel(size),
            "T" => Family::TwinWheel(size),
            "L" => Family::Ladder(size),
            _ => return None,
        };
        f.presentation().ok().map(|_| f)
    }

    pub fn ground(&self) -> usize {
        match self {
            Family::Wheel(s) | Family::TwinWheel(s) | Family::Ladder(s) => *s,
            Family::Degenerated { n, .. } => *n,
        }
    }

    pub fn labeling(&self) -> Result<WheelLabeling> {
        match self {
            Family::Wheel(s) => WheelLabeling::wheel(*s),
            Family::TwinWheel(s) => WheelLabeling::twin_wheel(*s),
            Family::Ladder(s) => WheelLabeling::ladder(*s),
            Family::Degenerated { labeling, .. } => Ok(labeling.clone()),
        }
    }

    pub fn presentation(&self) -> Result<Presentation> {
        match self {
            Family::Wheel(s) => Presentation::wheel(*s),
            Family::TwinWheel(s) => Presentation::twin_wheel(*s),
            Family::Ladder(s) => Presentation::ladder(*s),
            Family::Degenerated { labeling, n } => labeling.presentation(*n),
        }
    }

    pub fn binomial(&self) -> Result<DeltaBinomial> {
        match self {
            Family::Ladder(s) => {
                Presentation::ladder(*s)?;
                Ok(ladder_binomial((s - 2) / 2))
            }
            _ => Ok(self.labeling()?.binomial()),
        }
    }

    fn is_plain_wheel(&self) -> bool {
        matches!(self, Family::Wheel(_) | Family::TwinWheel(_))
    }

    /// The defining binomial evaluated on `a` (labels are the identity).
    pub fn evaluate(&self, a: &Arrangement) -> Result<Scalar> {
        match self {
            Family::Ladder(s) => ladder_poly(a, (s - 2) / 2),
            _ => wheel_poly(a, &self.labeling()?, self.is_plain_wheel()),
        }
    }
}

/// A generic arrangement of `family.ground()` lines on which the family's
/// binomial vanishes: all lines are drawn at random, then the one line in
/// which the binomial is linear is replaced by the solution of that linear
/// equation.
pub fn solve_on_variety(family: &Family, seed: u64) -> Result<Sample> {
    solve_on_variety_with_budget(family, seed, DEFAULT_SOLVE_BUDGET)
}

pub fn solve_on_variety_with_budget(family: &Family, seed: u64, budget: usize) -> Result<Sample> {
    let poly = family.binomial()?;
    let n = family.ground();
    let free = poly.linear_index().ok_or_else(|| {
        Error::InvalidArgument("the binomial is not linear in any single line".into())
    })?;
    for attempt in 0..budget {
        let draw_seed = seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(attempt as u64);
        let base = Arrangement::random_generic(n, 2, draw_seed, SOLVE_HEIGHT)?.arrangement;
        let e1 = base.replace(free, vec![Scalar::one(), Scalar::zero()])?;
        let e2 = base.replace(free, vec![Scalar::zero(), Scalar::one()])?;
        let (p0, p1) = (poly.evaluate(&e1)?, poly.evaluate(&e2)?);
        let v = primitive_integer_vector(&[p1, -p0]);
        if v.iter().all(Scalar::is_zero) {
            continue;
        }
        let a = base.replace(free, v)?;
        if a.is_generic() && poly.evaluate(&a)?.is_zero() {
            return Ok(Sample {
                arrangement: a,
                resamples: attempt,
            });
        }
    }
    Err(Error::RetryBudgetExhausted {
        budget,
        context: "no generic arrangement on the variety".into(),
    })
}
