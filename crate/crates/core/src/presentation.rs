//! Families of index sets: the posets Q(n, k) and P(n, k), the rank function
//! nu, the BBA-condition, degenerations and the named wheel/ladder families.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::arrangement::drop_index;
use crate::error::{Error, Result};
use crate::subset::{combinations, Subset, MAX_GROUND};

pub const DEFAULT_SEARCH_BUDGET: usize = 1_000_000;

/// A family of subsets of `[n]` with no member containing another, stored in
/// canonical order (by size, then lexicographically).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Presentation {
    n: usize,
    k: usize,
    members: Vec<Subset>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbaVerdict {
    pub ok: bool,
    /// A smallest subfamily `T'` with `|T'| > 1` and
    /// `nu({union T'}) <= nu(T')`, present iff `!ok`.
    pub witness: Option<Presentation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinNuAbove {
    Found(usize),
    /// `T` is maximal in Q: nothing in P lies strictly above it.
    NoStrictUpperBound,
    Unresolved {
        visited: usize,
    },
}

impl MinNuAbove {
    pub fn value(self) -> Option<usize> {
        match self {
            MinNuAbove::Found(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degeneration {
    pub presentation: Presentation,
    pub gamma: usize,
}

fn union_of(members: &[Subset]) -> Subset {
    members.iter().fold(Subset::EMPTY, |acc, &s| acc | s)
}

fn nu_of(members: &[Subset], k: usize) -> usize {
    members.iter().map(|s| s.len().saturating_sub(k)).sum()
}

fn pairwise_share_below(members: &[Subset], k: usize) -> bool {
    members
        .iter()
        .enumerate()
        .all(|(i, a)| members[i + 1..].iter().all(|b| (*a & *b).len() < k))
}

/// Condition (P) for a family already known to be in Q.
fn satisfies_p(members: &[Subset], k: usize) -> bool {
    smallest_p_violation(members, k).is_none()
}

/// Smallest subfamily (as indices into `members`) violating (P), searching
/// sizes in increasing order and lexicographically within a size.
fn smallest_p_violation(members: &[Subset], k: usize) -> Option<Vec<usize>> {
    let m = members.len();
    if m > MAX_GROUND {
        return None;
    }
    for size in 2..=m {
        for pick in combinations(m, size) {
            let chosen: Vec<Subset> = pick.iter().map(|i| members[i - 1]).collect();
            let u = union_of(&chosen).len();
            if u.saturating_sub(k) <= nu_of(&chosen, k) {
                return Some(pick.iter().map(|i| i - 1).collect());
            }
        }
    }
    None
}

impl Presentation {
    /// Deduplicates and sorts; rejects indices outside `[n]` and families
    /// where one member contains another.
    pub fn new<I: IntoIterator<Item = Subset>>(n: usize, k: usize, members: I) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::BoundsExceeded(format!("ground set of size {n}")));
        }
        let mut members: Vec<Subset> = members.into_iter().collect();
        members.sort();
        members.dedup();
        for s in &members {
            if s.is_empty() {
                return Err(Error::InvalidPresentation("empty member".into()));
            }
            if let Some(m) = s.largest().filter(|&m| m > n) {
                return Err(Error::IndexOutOfRange { index: m, n });
            }
        }
        for (i, a) in members.iter().enumerate() {
            if let Some(b) = members[i + 1..].iter().find(|b| a.is_subset(**b)) {
                return Err(Error::InvalidPresentation(format!(
                    "member {a} is contained in {b}"
                )));
            }
        }
        Ok(Presentation { n, k, members })
    }

    pub fn from_lists(n: usize, k: usize, lists: &[&[usize]]) -> Result<Self> {
        let members = lists
            .iter()
            .map(|l| Subset::from_indices(l.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(n, k, members)
    }

    /// Parses `"123,156,246"` or `"[1 2 13],[4 5 6]"` (forms may be mixed).
    /// The ground set defaults to the largest index that occurs.
    pub fn parse(text: &str, n: Option<usize>, k: usize) -> Result<Self> {
        let bad = |offset: usize, message: String| Error::Parse { offset, message };
        let bytes = text.as_bytes();
        let mut members = Vec::new();
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        skip_ws(&mut pos);
        if pos == bytes.len() {
            return Presentation::new(n.unwrap_or(0), k, []);
        }
        loop {
            skip_ws(&mut pos);
            let start = pos;
            let mut indices = Vec::new();
            if bytes.get(pos) == Some(&b'[') {
                pos += 1;
                loop {
                    skip_ws(&mut pos);
                    match bytes.get(pos) {
                        Some(b']') => {
                            pos += 1;
                            break;
                        }
                        Some(c) if c.is_ascii_digit() => {
                            let s = pos;
                            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                                pos += 1;
                            }
                            let v: usize = text[s..pos]
                                .parse()
                                .map_err(|_| bad(s, "index too large".into()))?;
                            indices.push((v, s));
                        }
                        Some(_) => return Err(bad(pos, "expected an index or ']'".into())),
                        None => return Err(bad(pos, "unterminated '['".into())),
                    }
                }
            } else {
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    indices.push(((bytes[pos] - b'0') as usize, pos));
                    pos += 1;
                }
            }
            if indices.is_empty() {
                return Err(bad(start, "expected a member".into()));
            }
            for &(v, at) in &indices {
                if v == 0 || v > MAX_GROUND {
                    return Err(bad(at, format!("index {v} outside 1..={MAX_GROUND}")));
                }
            }
            let mut seen = Subset::EMPTY;
            for &(v, at) in &indices {
                if seen.contains(v) {
                    return Err(bad(at, format!("index {v} repeated in a member")));
                }
                seen = seen.with(v);
            }
            members.push((seen, start));
            skip_ws(&mut pos);
            match bytes.get(pos) {
                None => break,
                Some(b',') => pos += 1,
                Some(_) => return Err(bad(pos, "expected ','".into())),
            }
        }
        let max = members
            .iter()
            .filter_map(|(s, _)| s.largest())
            .max()
            .unwrap_or(0);
        let n = n.unwrap_or(max);
        if max > n {
            let at = members
                .iter()
                .find(|(s, _)| s.largest() == Some(max))
                .map_or(0, |m| m.1);
            return Err(bad(at, format!("index {max} exceeds ground set size {n}")));
        }
        Presentation::new(n, k, members.into_iter().map(|(s, _)| s))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn union(&self) -> Subset {
        union_of(&self.members)
    }

    /// Same family over a different ground set or rank.
    pub fn with_context(&self, n: usize, k: usize) -> Result<Self> {
        Presentation::new(n, k, self.members.iter().copied())
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.members.iter().map(|s| s.to_vec()).collect()
    }

    /// Text form; bracketed groups iff `n >= 10`.
    pub fn to_text(&self) -> String {
        let wide = self.n >= 10;
        let parts: Vec<String> = self.members.iter().map(|s| s.format(wide)).collect();
        parts.join(",")
    }

    /// (Q0), (Q1) and (Q2) for `(n, k)`.
    pub fn validate_q(&self) -> bool {
        let q0 = self.members.iter().enumerate().all(|(i, a)| {
            self.members
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !a.is_subset(*b))
        });
        let q1 = self.members.iter().all(|s| s.len() > self.k);
        q0 && q1 && pairwise_share_below(&self.members, self.k)
    }

    pub fn nu(&self) -> usize {
        nu_of(&self.members, self.k)
    }

    /// `self <= other` in Q: every member lies inside some member of `other`.
    pub fn leq(&self, other: &Presentation) -> bool {
        self.members
            .iter()
            .all(|a| other.members.iter().any(|b| a.is_subset(*b)))
    }

    pub fn bba_check(&self) -> Result<BbaVerdict> {
        if !self.validate_q() {
            return Err(Error::InvalidPresentation(format!(
                "{} is not in Q({}, {})",
                self.to_text(),
                self.n,
                self.k
            )));
        }
        Ok(match smallest_p_violation(&self.members, self.k) {
            None => BbaVerdict {
                ok: true,
                witness: None,
            },
            Some(idx) => BbaVerdict {
                ok: false,
                witness: Some(Presentation {
                    n: self.n,
                    k: self.k,
                    members: idx.into_iter().map(|i| self.members[i]).collect(),
                }),
            },
        })
    }

    pub fn is_in_p(&self) -> bool {
        self.validate_q() && satisfies_p(&self.members, self.k)
    }

    /// `min { nu(T') : T' in P(n, k), T < T' }`.
    ///
    /// Any strict upper bound `T'` in P can be shrunk, without leaving P or
    /// increasing nu, to the family of block unions of the partition of `T`
    /// induced by containment in `T'`. So the minimum is taken over
    /// non-trivial partitions of the members, plus, when `T` is itself in P,
    /// the value `nu(T) + 1` of a one-element enlargement or one extra
    /// `(k + 1)`-set.
    pub fn min_nu_above(&self, budget: usize) -> Result<MinNuAbove> {
        if !self.validate_q() {
            return Err(Error::InvalidPresentation(format!(
                "{} is not in Q({}, {})",
                self.to_text(),
                self.n,
                self.k
            )));
        }
        let mut search = PartitionSearch {
            members: &self.members,
            k: self.k,
            blocks: Vec::new(),
            best: None,
            visited: 0,
            budget,
            exceeded: false,
        };
        if self.is_in_p() && self.discrete_step_exists() {
            search.best = Some(self.nu() + 1);
        }
        search.run(0);
        if search.exceeded {
            return Ok(MinNuAbove::Unresolved {
                visited: search.visited,
            });
        }
        Ok(match search.best {
            Some(v) => MinNuAbove::Found(v),
            None => MinNuAbove::NoStrictUpperBound,
        })
    }

    fn discrete_step_exists(&self) -> bool {
        let k = self.k;
        let ground = Subset::full(self.n);
        for (i, s) in self.members.iter().enumerate() {
            for x in (ground - *s).iter() {
                let mut m = self.members.clone();
                m[i] = s.with(x);
                if pairwise_share_below(&m, k) && satisfies_p(&m, k) {
                    return true;
                }
            }
        }
        for e in combinations(self.n, k + 1) {
            if self.members.iter().any(|s| (*s & e).len() >= k) {
                continue;
            }
            let mut m = self.members.clone();
            m.push(e);
            if satisfies_p(&m, k) {
                return true;
            }
        }
        false
    }

    /// `T_{from -> to}`: `from` is replaced by `to`, `k`-sets are dropped, the
    /// family is closed in Q by merging members that share `k` or more
    /// indices, and the ground set is renumbered without `from`.
    ///
    /// The merge closure is the least element of Q above the replaced family:
    /// any Q element above it must put members sharing `k` indices into one
    /// common member.
    pub fn degenerate(&self, from: usize, to: usize) -> Result<Degeneration> {
        let n = self.n;
        if !(1..=n).contains(&from) || !(1..=n).contains(&to) || from == to {
            return Err(Error::InvalidArgument(format!(
                "degeneration {from} -> {to} needs distinct indices in 1..={n}"
            )));
        }
        let gamma = self
            .members
            .iter()
            .filter(|s| s.contains(from) && s.contains(to))
            .count();
        let replaced: Vec<Subset> = self
            .members
            .iter()
            .map(|&s| {
                if s.contains(from) {
                    s.without(from).with(to)
                } else {
                    s
                }
            })
            .filter(|s| s.len() != self.k)
            .collect();
        let closed = merge_closure(replaced, self.k);
        let presentation = Presentation::new(
            n - 1,
            self.k,
            closed.into_iter().map(|s| drop_index(s, from)),
        )?;
        Ok(Degeneration {
            presentation,
            gamma,
        })
    }

    /// Relabels `i` to `sigma[i - 1]`.
    pub fn permute(&self, sigma: &[usize]) -> Result<Presentation> {
        let n = self.n;
        let mut seen = vec![false; n];
        if sigma.len() != n
            || sigma
                .iter()
                .any(|&s| s == 0 || s > n || std::mem::replace(&mut seen[s - 1], true))
        {
            return Err(Error::InvalidArgument("not a permutation of [n]".into()));
        }
        Presentation::new(n, self.k, self.members.iter().map(|s| s.map(sigma)))
    }

    /// `W_{2n}`: triangles `{2i-1, 2i, 2i+1}` around the rim plus the hub set
    /// of even indices.
    pub fn wheel(n2: usize) -> Result<Presentation> {
        let m = check_wheel_size(n2)?;
        let wrap = |i: usize| (i - 1) % n2 + 1;
        let mut members: Vec<Subset> = (1..=m)
            .map(|i| set(&[2 * i - 1, 2 * i, wrap(2 * i + 1)]))
            .collect();
        members.push(set(&(1..=m).map(|i| 2 * i).collect::<Vec<_>>()));
        Presentation::new(n2, 2, members)
    }

    /// The twin wheel: triangles `{2i, 2i+1, 2i+2}` plus the odd indices.
    pub fn twin_wheel(n2: usize) -> Result<Presentation> {
        let m = check_wheel_size(n2)?;
        let wrap = |i: usize| (i - 1) % n2 + 1;
        let mut members: Vec<Subset> = (1..=m)
            .map(|i| set(&[2 * i, wrap(2 * i + 1), wrap(2 * i + 2)]))
            .collect();
        members.push(set(&(1..=m).map(|i| 2 * i - 1).collect::<Vec<_>>()));
        Presentation::new(n2, 2, members)
    }

    /// `L_{2n+2}` on `[2n + 2]`.
    pub fn ladder(size: usize) -> Result<Presentation> {
        if size < 8 || size % 2 == 1 || size > MAX_GROUND {
            return Err(Error::InvalidArgument(format!(
                "ladders need an even size of at least 8, got {size}"
            )));
        }
        let m = (size - 2) / 2;
        let (a, b) = (2 * m + 1, 2 * m + 2);
        let mut members: Vec<Subset> = (1..=m).map(|i| set(&[2 * i - 1, 2 * i, a])).collect();
        members.extend((1..m).map(|i| set(&[2 * i, 2 * i + 1, b])));
        members.push(set(&[1, 2 * m, b]));
        Presentation::new(size, 2, members)
    }
}

fn set(v: &[usize]) -> Subset {
    Subset::from_indices(v.iter().copied()).expect("indices in range")
}

fn check_wheel_size(n2: usize) -> Result<usize> {
    if n2 < 6 || n2 % 2 == 1 || n2 > MAX_GROUND {
        return Err(Error::InvalidArgument(format!(
            "wheels need an even size of at least 6, got {n2}"
        )));
    }
    Ok(n2 / 2)
}

/// Merges members sharing at least `k` indices and drops contained members
/// until neither applies.
pub fn merge_closure(mut members: Vec<Subset>, k: usize) -> Vec<Subset> {
    loop {
        members.sort();
        members.dedup();
        let mut changed = false;
        'scan: for i in 0..members.len() {
            for j in 0..members.len() {
                if i == j {
                    continue;
                }
                let (a, b) = (members[i], members[j]);
                if a.is_subset(b) {
                    members.remove(i);
                    changed = true;
                    break 'scan;
                }
                if (a & b).len() >= k {
                    members[i] = a | b;
                    members.remove(j);
                    changed = true;
                    break 'scan;
                }
            }
        }
        if !changed {
            return members;
        }
    }
}

struct PartitionSearch<'a> {
    members: &'a [Subset],
    k: usize,
    blocks: Vec<(Subset, usize)>,
    best: Option<usize>,
    visited: usize,
    budget: usize,
    exceeded: bool,
}

impl PartitionSearch<'_> {
    fn cost(&self) -> usize {
        self.blocks.iter().map(|(u, _)| u.len() - self.k).sum()
    }

    fn run(&mut self, next: usize) {
        if self.exceeded {
            return;
        }
        self.visited += 1;
        if self.visited > self.budget {
            self.exceeded = true;
            return;
        }
        let cost = self.cost();
        if self.best.is_some_and(|b| cost >= b) {
            return;
        }
        if next == self.members.len() {
            if self.blocks.iter().all(|&(_, size)| size == 1) {
                return;
            }
            let unions: Vec<Subset> = self.blocks.iter().map(|&(u, _)| u).collect();
            if satisfies_p(&unions, self.k) {
                self.best = Some(cost);
            }
            return;
        }
        let s = self.members[next];
        for b in 0..self.blocks.len() {
            let (old, size) = self.blocks[b];
            let merged = old | s;
            let clash = self
                .blocks
                .iter()
                .enumerate()
                .any(|(c, &(u, _))| c != b && (u & merged).len() >= self.k);
            if clash {
                continue;
            }
            self.blocks[b] = (merged, size + 1);
            self.run(next + 1);
            self.blocks[b] = (old, size);
        }
        if self.blocks.iter().all(|&(u, _)| (u & s).len() < self.k) {
            self.blocks.push((s, 1));
            self.run(next + 1);
            self.blocks.pop();
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} (n={}, k={})", self.to_text(), self.n, self.k)
    }
}

impl Serialize for Presentation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_lists().serialize(serializer)
    }
}
