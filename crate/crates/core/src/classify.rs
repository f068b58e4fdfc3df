//! Desk-scale classification for lines (`k = 2`): enumeration of minimal
//! candidate families up to relabeling, the eight-line report, and the audit
//! of a single arrangement against every candidate labeling.

use std::collections::HashSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::Arrangement;
use crate::canonical::canonical_form;
use crate::discriminantal::{dependency_space, intersection_rank_of};
use crate::error::{Error, Result};
use crate::matrix::integer_rank;
use crate::presentation::{Presentation, DEFAULT_SEARCH_BUDGET};
use crate::prime_field::{FieldMode, PrimeField};
use crate::scalar::{primitive_integer_vector, Scalar};
use crate::subset::Subset;
use crate::varieties::{default_r, Family};

/// Largest ground set the enumeration and the audit accept.
pub const MAX_DESK_N: usize = 9;

/// Printed with every audit: an empty hit list is not a certificate.
pub const AUDIT_SCOPE_NOTE: &str =
    "no hit means no non-very generic witness within the searched family bound, not very genericity";

fn check_bounds(n: usize, k: usize) -> Result<()> {
    if k != 2 || n > MAX_DESK_N {
        return Err(Error::BoundsExceeded(format!(
            "classification needs k = 2 and n <= {MAX_DESK_N}, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Worker pool, capped by `DISCRARR_THREADS` when set to a positive integer.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var("DISCRARR_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

/// Whether a family of lines passes the structural filter on its own union
/// of size `n'`: every point in at least two members and
/// `ceil(2n'/3) <= nu <= n' - 2`.
pub fn is_structural(t: &Presentation) -> bool {
    let union = t.union();
    let n1 = union.len();
    let nu = t.nu();
    let covered_twice = union
        .iter()
        .all(|x| t.members().iter().filter(|s| s.contains(x)).count() >= 2);
    t.k() == 2 && t.validate_q() && covered_twice && 3 * nu >= 2 * n1 && nu + 2 <= n1
}

/// Canonical representatives of every structural family of lines with union
/// size at most `nprime_max`, on ground `[n']`, in and out of P.
///
/// Families are grown one member at a time from canonical representatives;
/// a new member may use old points not already paired in a member plus a run
/// of fresh points, so every family arises up to relabeling.
pub fn enumerate_structural(nprime_max: usize) -> Result<Vec<Presentation>> {
    check_bounds(nprime_max, 2)?;
    let cap = nprime_max;
    if cap < 3 {
        return Ok(Vec::new());
    }
    let mut frontier: HashSet<Presentation> = HashSet::new();
    for size in 3..=cap {
        if size - 2 <= cap - 2 {
            frontier.insert(Presentation::new(size, 2, [Subset::full(size)])?);
        }
    }
    let mut found: HashSet<Presentation> = HashSet::new();
    while !frontier.is_empty() {
        let next: HashSet<Presentation> = frontier
            .par_iter()
            .map(|t| extensions(t, cap))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        found.extend(frontier.into_iter().filter(is_structural));
        frontier = next;
    }
    let mut out: Vec<Presentation> = found.into_iter().collect();
    out.sort_by(|a, b| (a.n(), a).cmp(&(b.n(), b)));
    Ok(out)
}

fn extensions(t: &Presentation, cap: usize) -> Result<Vec<Presentation>> {
    let m = t.n();
    let budget = (cap - 2) - t.nu();
    let mut out = Vec::new();
    for bits in 0u64..(1 << m) {
        let a = Subset::from_bits(bits);
        if t.members().iter().any(|s| (*s & a).len() > 1) {
            continue;
        }
        for fresh in 0..=(cap - m) {
            let size = a.len() + fresh;
            if size < 3 || size - 2 > budget {
                continue;
            }
            let member = (m + 1..=m + fresh).fold(a, |acc, x| acc.with(x));
            let grown = Presentation::new(
                m + fresh,
                2,
                t.members().iter().copied().chain(std::iter::once(member)),
            )?;
            out.push(canonical_form(&grown)?.presentation);
        }
    }
    Ok(out)
}

/// Orbit representatives of the structural families outside P with union
/// size at most `min(n, nprime_max)`.
pub fn enumerate_candidates(n: usize, k: usize, nprime_max: usize) -> Result<Vec<Presentation>> {
    check_bounds(n, k)?;
    Ok(enumerate_structural(n.min(nprime_max))?
        .into_iter()
        .filter(|t| !t.is_in_p())
        .collect())
}

/// Name of a family up to relabeling: one of the five eight-line names when
/// it matches, its canonical text otherwise.
pub fn family_name(t: &Presentation) -> Result<String> {
    let c = canonical_form(t)?.presentation;
    for (name, f) in Family::eight_line_families() {
        let p = f.presentation()?;
        let p = Presentation::new(p.union().len(), 2, p.members().iter().copied())?;
        if canonical_form(&p)?.presentation == c {
            return Ok(name.to_string());
        }
    }
    Ok(c.to_text())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EightLineHit {
    pub family: String,
    /// `labels[i - 1]` is the line carrying the family's label `i`.
    pub labels: Vec<usize>,
    pub presentation: Presentation,
    pub r: usize,
    pub rank: usize,
    pub member: bool,
}

/// Every relabeling into `[8]` of the five eight-line families (one per
/// image family) whose defining binomial vanishes on `a`.
pub fn eight_line_report(a: &Arrangement) -> Result<Vec<EightLineHit>> {
    if a.n() != 8 || a.k() != 2 {
        return Err(Error::InvalidArgument(format!(
            "the eight-line report needs 8 lines in rank 2, got n = {}, k = {}",
            a.n(),
            a.k()
        )));
    }
    if !a.is_generic() {
        return Err(Error::NotGeneric);
    }
    let delta: Vec<Vec<Scalar>> = (1..=8)
        .map(|i| {
            (1..=8)
                .map(|j| {
                    if i == j {
                        Ok(Scalar::zero())
                    } else {
                        a.delta(i, j)
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let pool = worker_pool()?;
    let mut hits = Vec::new();
    for (name, family) in Family::eight_line_families() {
        let base = family.presentation()?;
        let poly = family.binomial()?;
        let g = family.ground();
        let r = default_r(&base.with_context(8, 2)?, DEFAULT_SEARCH_BUDGET)?;
        let mut seen = HashSet::new();
        let mut maps = Vec::new();
        for sigma in injections(g, 8) {
            let image = image_of(base.members(), &sigma);
            if seen.insert(image) {
                maps.push(sigma);
            }
        }
        let found: Vec<EightLineHit> = pool.install(|| {
            maps.par_iter()
                .filter(|sigma| {
                    let prod = |pairs: &[(usize, usize)]| -> Scalar {
                        pairs
                            .iter()
                            .map(|&(i, j)| delta[sigma[i - 1] - 1][sigma[j - 1] - 1].clone())
                            .product()
                    };
                    (prod(&poly.plus) - prod(&poly.minus)).is_zero()
                })
                .map(|sigma| {
                    let presentation =
                        Presentation::new(8, 2, base.members().iter().map(|s| s.map(sigma)))?;
                    let rank = intersection_rank_of(a, presentation.members())?;
                    Ok(EightLineHit {
                        family: name.to_string(),
                        labels: sigma.clone(),
                        presentation,
                        r,
                        rank,
                        member: rank <= r,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let mut found = found;
        found.sort_by(|x, y| x.labels.cmp(&y.labels));
        hits.extend(found);
    }
    Ok(hits)
}

/// All injective maps `[m] -> [n]` as image lists, in lexicographic order.
fn injections(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_injection(m, n, |sigma| out.push(sigma.to_vec()));
    out
}

/// Sorted member bitmasks of the image of `members` under `sigma`.
fn image_of(members: &[Subset], sigma: &[usize]) -> Vec<u64> {
    let mut image: Vec<u64> = members.iter().map(|s| s.map(sigma).bits()).collect();
    image.sort_unstable();
    image
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditHit {
    /// Family name up to relabeling.
    pub family: String,
    /// Canonical representative on `[n']`.
    pub canonical: Presentation,
    /// `labels[c]` is the line carrying canonical label `c + 1`.
    pub labels: Vec<usize>,
    /// The labeled family on the arrangement's ground set.
    pub presentation: Presentation,
    pub r: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub field: FieldMode,
    pub nprime_max: usize,
    pub families: usize,
    /// Injections of canonical labels into `[n]` scanned, before image dedupe.
    pub labelings: usize,
    pub hits: Vec<AuditHit>,
}

/// Tests every labeling into `[n]` of every structural family with union
/// size at most `nprime_max` against `r = nu - 1`.
///
/// Ranks are screened in a prime field; since reduction can only lower the
/// rank, no hit is missed. Over `FieldMode::Rational` every screened hit is
/// confirmed exactly; over a prime field the prime-field rank is reported.
pub fn audit_arrangement(
    a: &Arrangement,
    nprime_max: usize,
    field: FieldMode,
) -> Result<AuditReport> {
    check_bounds(a.n(), a.k())?;
    if !a.is_generic() {
        return Err(Error::NotGeneric);
    }
    let n = a.n();
    let fp = match &field {
        FieldMode::Prime(fp) => *fp,
        FieldMode::Rational => PrimeField::default(),
    };
    let mut rows = DependencyRows {
        modular: vec![Vec::new(); 1 << n],
        integer: vec![Vec::new(); 1 << n],
    };
    for bits in 0u64..(1 << n) {
        let s = Subset::from_bits(bits);
        if s.len() >= 3 {
            let integer: Vec<Vec<Scalar>> = dependency_space(a, s)?
                .basis
                .iter()
                .map(|v| primitive_integer_vector(v))
                .collect();
            rows.modular[bits as usize] = integer
                .iter()
                .map(|v| fp.reduce_vec(v))
                .collect::<Result<Vec<_>>>()?
                .concat();
            rows.integer[bits as usize] = integer
                .iter()
                .map(|v| v.iter().map(|x| x.numer().clone()).collect())
                .collect();
        }
    }
    let families = enumerate_structural(n.min(nprime_max))?;
    let pool = worker_pool()?;
    let per_family: Vec<(usize, Vec<AuditHit>)> = pool.install(|| {
        families
            .par_iter()
            .map(|t| audit_family(a, t, &rows, &fp, field.is_rational()))
            .collect::<Result<Vec<_>>>()
    })?;
    let labelings = per_family.iter().map(|(c, _)| c).sum();
    let mut hits: Vec<AuditHit> = per_family.into_iter().flat_map(|(_, h)| h).collect();
    hits.sort_by(|x, y| {
        (x.canonical.n(), &x.canonical, &x.presentation).cmp(&(
            y.canonical.n(),
            &y.canonical,
            &y.presentation,
        ))
    });
    Ok(AuditReport {
        field,
        nprime_max,
        families: families.len(),
        labelings,
        hits,
    })
}

/// Dependency covectors of every subset, indexed by bitmask: reduced modulo
/// the screening prime (row-major) and as primitive integer rows.
struct DependencyRows {
    modular: Vec<Vec<u64>>,
    integer: Vec<Vec<Vec<BigInt>>>,
}

fn audit_family(
    a: &Arrangement,
    t: &Presentation,
    rows: &DependencyRows,
    fp: &PrimeField,
    confirm: bool,
) -> Result<(usize, Vec<AuditHit>)> {
    let n = a.n();
    let r = t.nu() - 1;
    let name = family_name(t)?;
    let plan = LabelingPlan::new(t);
    let mut state = ScanState {
        n,
        sigma: vec![0; t.n()],
        used: vec![false; n],
        basis: Vec::new(),
        pivots: Vec::new(),
        scratch: Vec::new(),
        seen: HashSet::new(),
        scanned: 0,
        candidates: Vec::new(),
    };
    state.scan(&plan, &rows.modular, fp, r, 0);
    let mut hits = Vec::new();
    for (sigma, image, screened) in state.candidates {
        let members: Vec<Subset> = image.iter().map(|&b| Subset::from_bits(b)).collect();
        let rank = if confirm {
            let stacked: Vec<Vec<BigInt>> = image
                .iter()
                .flat_map(|&b| rows.integer[b as usize].iter().cloned())
                .collect();
            integer_rank(&stacked)
        } else {
            screened
        };
        if rank <= r {
            hits.push(AuditHit {
                family: name.clone(),
                canonical: t.clone(),
                labels: sigma,
                presentation: Presentation::new(n, 2, members)?,
                r,
                rank,
            });
        }
    }
    Ok((state.scanned, hits))
}

/// Points of a family in the order members first use them, and the members
/// completed once each prefix of that order is labeled.
struct LabelingPlan {
    members: Vec<Subset>,
    order: Vec<usize>,
    completed: Vec<Vec<usize>>,
}

impl LabelingPlan {
    fn new(t: &Presentation) -> Self {
        let mut order: Vec<usize> = Vec::new();
        for s in t.members() {
            for x in s.iter() {
                if !order.contains(&x) {
                    order.push(x);
                }
            }
        }
        let mut completed = vec![Vec::new(); order.len() + 1];
        for (j, s) in t.members().iter().enumerate() {
            let depth = s
                .iter()
                .map(|x| order.iter().position(|&y| y == x).unwrap() + 1)
                .max()
                .unwrap_or(0);
            completed[depth].push(j);
        }
        LabelingPlan {
            members: t.members().to_vec(),
            order,
            completed,
        }
    }
}

struct ScanState {
    n: usize,
    sigma: Vec<usize>,
    used: Vec<bool>,
    basis: Vec<u64>,
    pivots: Vec<usize>,
    scratch: Vec<u64>,
    seen: HashSet<u128>,
    scanned: usize,
    candidates: Vec<(Vec<usize>, Vec<u64>, usize)>,
}

impl ScanState {
    fn leaf(&mut self, plan: &LabelingPlan, rank: usize) {
        self.scanned += 1;
        let image = image_of(&plan.members, &self.sigma);
        if self.seen.insert(pack(&image, self.n)) {
            self.candidates.push((self.sigma.clone(), image, rank));
        }
    }

    /// Labels the `depth`-th planned point, pushing the dependency rows of
    /// every member completed by it; the basis is restored on return.
    fn scan(
        &mut self,
        plan: &LabelingPlan,
        rows: &[Vec<u64>],
        fp: &PrimeField,
        r: usize,
        depth: usize,
    ) {
        if depth == plan.order.len() {
            if self.pivots.len() <= r {
                self.leaf(plan, self.pivots.len());
            } else {
                self.scanned += 1;
            }
            return;
        }
        let point = plan.order[depth];
        for x in 1..=self.n {
            if self.used[x - 1] {
                continue;
            }
            self.used[x - 1] = true;
            self.sigma[point - 1] = x;
            let (len, rank) = (self.basis.len(), self.pivots.len());
            if depth + 1 == plan.order.len() && plan.completed[depth + 1].len() == 1 {
                let mask = plan.members[plan.completed[depth + 1][0]]
                    .map(&self.sigma)
                    .bits();
                let new_rows = &rows[mask as usize];
                if new_rows.len() == self.n {
                    // One row left: the leaf needs only its independence.
                    let grows =
                        fp.is_independent(&self.basis, &self.pivots, new_rows, &mut self.scratch);
                    if rank + grows as usize <= r {
                        self.leaf(plan, rank + grows as usize);
                    } else {
                        self.scanned += 1;
                    }
                    self.used[x - 1] = false;
                    continue;
                }
            }
            for &j in &plan.completed[depth + 1] {
                let mask = plan.members[j].map(&self.sigma).bits();
                for row in rows[mask as usize].chunks(self.n) {
                    fp.push_reduced(&mut self.basis, &mut self.pivots, row);
                }
            }
            self.scan(plan, rows, fp, r, depth + 1);
            self.basis.truncate(len);
            self.pivots.truncate(rank);
            self.used[x - 1] = false;
        }
    }
}

/// Exact key of a sorted image; `members * n <= 128` holds within the desk
/// bounds since a structural family has at most `n - 2` members.
fn pack(image: &[u64], n: usize) -> u128 {
    debug_assert!(image.len() * n <= 128);
    image.iter().fold(0u128, |acc, &b| (acc << n) | b as u128)
}

fn for_each_injection(m: usize, n: usize, mut f: impl FnMut(&[usize])) {
    fn go(
        m: usize,
        n: usize,
        used: &mut [bool],
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if cur.len() == m {
            f(cur);
            return;
        }
        for x in 1..=n {
            if !used[x - 1] {
                used[x - 1] = true;
                cur.push(x);
                go(m, n, used, cur, f);
                cur.pop();
                used[x - 1] = false;
            }
        }
    }
    if m <= n {
        go(
            m,
            n,
            &mut vec![false; n],
            &mut Vec::with_capacity(m),
            &mut f,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> Presentation {
        Presentation::parse(text, None, 2).unwrap()
    }

    #[test]
    fn small_unions_give_only_the_six_wheel() {
        let c = enumerate_candidates(6, 2, 6).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(family_name(&c[0]).unwrap(), "W6");
    }

    #[test]
    fn injections_count() {
        assert_eq!(injections(3, 5).len(), 60);
        assert_eq!(injections(0, 4), vec![Vec::<usize>::new()]);
        assert!(injections(4, 3).is_empty());
    }

    #[test]
    fn structural_filter() {
        assert!(is_structural(&p("123,156,246,345")));
        assert!(!is_structural(&p("123,345")));
        assert!(!is_structural(&p("123,145,167,246,257,347,356")));
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(matches!(
            enumerate_candidates(10, 2, 10),
            Err(Error::BoundsExceeded(_))
        ));
        assert!(matches!(
            enumerate_candidates(8, 3, 8),
            Err(Error::BoundsExceeded(_))
        ));
    }
}
