//! Canonical forms of families of index sets under relabeling.
//!
//! Points of the union are colored by iterated refinement (a point's color is
//! refined by the multiset of member signatures it lies in), then ties are
//! broken by individualizing each point of the first non-trivial cell in turn.
//! The canonical form is the least serialization over all leaves of that
//! search tree, so it depends only on the isomorphism class.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::presentation::Presentation;
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// The family relabeled onto `[m]`, `m = |union|`.
    pub presentation: Presentation,
    /// `labels[c]` is the original index that received canonical label `c + 1`.
    pub labels: Vec<usize>,
}

impl CanonicalForm {
    /// Relabeling of the canonical ground set into the original one, as the
    /// image list `sigma` with `sigma[c] = labels[c]`.
    pub fn embedding(&self) -> &[usize] {
        &self.labels
    }
}

pub fn canonical_form(t: &Presentation) -> Result<CanonicalForm> {
    let points = t.union().to_vec();
    let m = points.len();
    let local: Vec<Vec<usize>> = t
        .members()
        .iter()
        .map(|s| {
            s.iter()
                .map(|x| points.binary_search(&x).expect("in union"))
                .collect()
        })
        .collect();
    let mut incidence = vec![Vec::new(); m];
    for (j, member) in local.iter().enumerate() {
        for &p in member {
            incidence[p].push(j);
        }
    }
    let search = Search {
        members: &local,
        incidence: &incidence,
        m,
    };
    let colors = search.refine(vec![0; m]);
    let mut best: Option<(Vec<Subset>, Vec<usize>)> = None;
    search.explore(colors, &mut best);
    let (members, order) = best.expect("the search tree has at least one leaf");
    let presentation = Presentation::new(m, t.k(), members)?;
    let labels = order.into_iter().map(|p| points[p]).collect();
    Ok(CanonicalForm {
        presentation,
        labels,
    })
}

pub fn is_isomorphic(a: &Presentation, b: &Presentation) -> Result<bool> {
    if a.len() != b.len() || a.union().len() != b.union().len() || a.k() != b.k() {
        return Ok(false);
    }
    Ok(canonical_form(a)?.presentation == canonical_form(b)?.presentation)
}

struct Search<'a> {
    members: &'a [Vec<usize>],
    incidence: &'a [Vec<usize>],
    m: usize,
}

impl Search<'_> {
    /// Refines until stable. Colors are dense ranks, ordered by
    /// (previous color, signature), so refinement never reorders cells.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        loop {
            let classes = distinct(&colors);
            let member_sig: Vec<Vec<usize>> = self
                .members
                .iter()
                .map(|s| {
                    let mut c: Vec<usize> = s.iter().map(|&p| colors[p]).collect();
                    c.sort_unstable();
                    c
                })
                .collect();
            let keys: Vec<(usize, Vec<Vec<usize>>)> = (0..self.m)
                .map(|p| {
                    let mut sig: Vec<Vec<usize>> = self.incidence[p]
                        .iter()
                        .map(|&j| member_sig[j].clone())
                        .collect();
                    sig.sort();
                    (colors[p], sig)
                })
                .collect();
            let ranks: BTreeMap<&(usize, Vec<Vec<usize>>), usize> = {
                let mut sorted: Vec<&(usize, Vec<Vec<usize>>)> = keys.iter().collect();
                sorted.sort();
                sorted.dedup();
                sorted
                    .into_iter()
                    .enumerate()
                    .map(|(r, key)| (key, r))
                    .collect()
            };
            colors = keys.iter().map(|key| ranks[key]).collect();
            if distinct(&colors) == classes {
                return colors;
            }
        }
    }

    fn explore(&self, colors: Vec<usize>, best: &mut Option<(Vec<Subset>, Vec<usize>)>) {
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (p, &c) in colors.iter().enumerate() {
            cells.entry(c).or_default().push(p);
        }
        let Some((&target, cell)) = cells.iter().find(|(_, cell)| cell.len() > 1) else {
            self.leaf(&colors, best);
            return;
        };
        for &p in cell {
            // Shift every color at or above `target` up by one, then put `p`
            // alone below the rest of its former cell.
            let shifted: Vec<usize> = colors
                .iter()
                .enumerate()
                .map(|(q, &c)| match c.cmp(&target) {
                    std::cmp::Ordering::Less => c,
                    std::cmp::Ordering::Equal if q == p => c,
                    _ => c + 1,
                })
                .collect();
            self.explore(self.refine(shifted), best);
        }
    }

    fn leaf(&self, colors: &[usize], best: &mut Option<(Vec<Subset>, Vec<usize>)>) {
        let mut members: Vec<Subset> = self
            .members
            .iter()
            .map(|s| {
                s.iter()
                    .fold(Subset::EMPTY, |acc, &p| acc.with(colors[p] + 1))
            })
            .collect();
        members.sort();
        if best.as_ref().is_none_or(|(b, _)| members < *b) {
            let mut order = vec![0; self.m];
            for (p, &c) in colors.iter().enumerate() {
                order[c] = p;
            }
            *best = Some((members, order));
        }
    }
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}
