//! Central (multi)arrangements given by their normal covectors.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::subset::{combinations, Subset, MAX_GROUND};

pub const DEFAULT_SAMPLE_BUDGET: usize = 1000;

/// An ordered multiset of nonzero covectors `alpha_1, ..., alpha_n` in `K^k`.
/// Parallel and repeated normals are allowed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Arrangement {
    k: usize,
    normals: Vec<Vec<Scalar>>,
    essential: bool,
}

/// A minimal dependent set of normals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Circuit(Subset);

impl Circuit {
    pub fn indices(self) -> Subset {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.len()
    }

    pub fn is_empty(self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Output of [`Arrangement::random_generic`].
#[derive(Clone, Debug)]
pub struct Sample {
    pub arrangement: Arrangement,
    pub resamples: usize,
}

fn rank_of_columns(k: usize, cols: &[&Vec<Scalar>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Scalar>> = cols.iter().map(|c| (*c).clone()).collect();
    Matrix::from_rows_with_cols(&rows, k)
        .expect("normals have length k")
        .rank()
}

impl Arrangement {
    pub fn new(k: usize, normals: Vec<Vec<Scalar>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "ambient rank k must be at least 1".into(),
            ));
        }
        if normals.is_empty() {
            return Err(Error::InvalidArgument(
                "an arrangement needs at least one hyperplane".into(),
            ));
        }
        if normals.len() > MAX_GROUND {
            return Err(Error::BoundsExceeded(format!(
                "{} hyperplanes, at most {MAX_GROUND} supported",
                normals.len()
            )));
        }
        for (i, a) in normals.iter().enumerate() {
            if a.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "normal {} has {} coordinates, expected {k}",
                    i + 1,
                    a.len()
                )));
            }
            if a.iter().all(Scalar::is_zero) {
                return Err(Error::ZeroNormal(i + 1));
            }
        }
        Ok(Self::assemble(k, normals))
    }

    fn assemble(k: usize, normals: Vec<Vec<Scalar>>) -> Self {
        let refs: Vec<&Vec<Scalar>> = normals.iter().collect();
        let essential = rank_of_columns(k, &refs) == k;
        Arrangement {
            k,
            normals,
            essential,
        }
    }

    /// Reads the `k x n` matrix whose columns are the normals, row by row,
    /// as it is usually displayed.
    pub fn from_int_matrix(rows: &[&[i64]]) -> Result<Self> {
        let k = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        let normals = (0..n)
            .map(|j| rows.iter().map(|r| Scalar::from_int(r[j])).collect())
            .collect();
        Arrangement::new(k, normals)
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        Arrangement::new(m.rows(), (0..m.cols()).map(|j| m.column(j)).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.normals.len()
    }

    pub fn is_essential(&self) -> bool {
        self.essential
    }

    pub fn normals(&self) -> &[Vec<Scalar>] {
        &self.normals
    }

    /// The `i`-th normal, 1-based.
    pub fn normal(&self, i: usize) -> Result<&[Scalar]> {
        self.check_index(i)?;
        Ok(&self.normals[i - 1])
    }

    /// The `k x n` matrix with the normals as columns.
    pub fn matrix(&self) -> Matrix {
        Matrix::from_rows_with_cols(&self.normals, self.k)
            .expect("normals have length k")
            .transpose()
    }

    pub fn ground(&self) -> Subset {
        Subset::full(self.n())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(())
    }

    fn check_subset(&self, s: Subset) -> Result<()> {
        match s.largest() {
            Some(m) if m > self.n() => Err(Error::IndexOutOfRange {
                index: m,
                n: self.n(),
            }),
            _ => Ok(()),
        }
    }

    /// Dimension of the span of the normals indexed by `s`.
    pub fn rank_of(&self, s: Subset) -> usize {
        let cols: Vec<&Vec<Scalar>> = s.iter().map(|i| &self.normals[i - 1]).collect();
        rank_of_columns(self.k, &cols)
    }

    pub fn is_independent(&self, s: Subset) -> bool {
        self.rank_of(s) == s.len()
    }

    /// All circuits. Every circuit has at most `k + 1` elements, so only
    /// subsets up to that size are inspected.
    pub fn circuits(&self) -> Vec<Circuit> {
        let n = self.n();
        let mut dependent: BTreeSet<u64> = BTreeSet::new();
        let mut out = Vec::new();
        for size in 1..=(self.k + 1).min(n) {
            for s in combinations(n, size) {
                if s.iter().any(|i| dependent.contains(&s.without(i).bits())) {
                    dependent.insert(s.bits());
                    continue;
                }
                if !self.is_independent(s) {
                    dependent.insert(s.bits());
                    out.push(Circuit(s));
                }
            }
        }
        out.sort();
        out
    }

    /// Accepts `s` as a [`Circuit`] after checking minimal dependence.
    pub fn circuit(&self, s: Subset) -> Result<Circuit> {
        self.check_subset(s)?;
        let ok = s.len() >= 2
            && !self.is_independent(s)
            && s.iter().all(|i| self.is_independent(s.without(i)));
        if ok {
            Ok(Circuit(s))
        } else {
            Err(Error::NotACircuit(s.to_string()))
        }
    }

    /// Every subset of size `min(n, k)` is independent, i.e. every circuit
    /// has exactly `k + 1` elements.
    pub fn is_generic(&self) -> bool {
        let r = self.k.min(self.n());
        combinations(self.n(), r)
            .into_iter()
            .all(|s| self.is_independent(s))
    }

    pub fn delta(&self, i: usize, j: usize) -> Result<Scalar> {
        if self.k != 2 {
            return Err(Error::WrongRank {
                expected: 2,
                found: self.k,
            });
        }
        let a = self.normal(i)?;
        let b = self.normal(j)?;
        Ok(&a[0] * &b[1] - &a[1] * &b[0])
    }

    /// Determinant of the columns indexed by `s`, in increasing order.
    pub fn maximal_minor(&self, s: Subset) -> Result<Scalar> {
        if s.len() != self.k {
            return Err(Error::WrongSubsetSize {
                expected: self.k,
                found: s.len(),
            });
        }
        self.check_subset(s)?;
        let cols: Vec<Vec<Scalar>> = s.iter().map(|i| self.normals[i - 1].clone()).collect();
        Matrix::from_rows_with_cols(&cols, self.k)?
            .transpose()
            .det()
    }

    /// Removes `H_i`; later hyperplanes shift down by one. Deleting the only
    /// hyperplane leaves an empty, non-essential arrangement.
    pub fn delete(&self, i: usize) -> Result<Arrangement> {
        self.check_index(i)?;
        let mut normals = self.normals.clone();
        normals.remove(i - 1);
        Ok(Self::assemble(self.k, normals))
    }

    /// Restriction to `H_i` as a rank `k - 1` multiarrangement on the other
    /// `n - 1` hyperplanes, in the coordinates of the echelon kernel basis of
    /// `alpha_i`.
    pub fn restrict(&self, i: usize) -> Result<Arrangement> {
        self.check_index(i)?;
        if self.k < 2 {
            return Err(Error::WrongRank {
                expected: 2,
                found: self.k,
            });
        }
        if self.n() < 2 {
            return Err(Error::InvalidArgument(
                "restriction of a single hyperplane is empty".into(),
            ));
        }
        let alpha = Matrix::from_rows(&[self.normals[i - 1].clone()])?;
        let basis = alpha.kernel_basis();
        let mut normals = Vec::with_capacity(self.n() - 1);
        for (j, a) in self.normals.iter().enumerate() {
            if j + 1 == i {
                continue;
            }
            let image: Vec<Scalar> = basis.iter().map(|b| crate::scalar::dot(a, b)).collect();
            if image.iter().all(Scalar::is_zero) {
                return Err(Error::InvalidArgument(format!(
                    "H_{} is parallel to H_{i}; its restriction is not a hyperplane",
                    j + 1
                )));
            }
            normals.push(image);
        }
        Arrangement::new(self.k - 1, normals)
    }

    /// The representative with identity block in columns `1..=k`, an all-ones
    /// column `k + 1` and an all-ones last row.
    pub fn normal_form(&self) -> Result<Arrangement> {
        if !self.is_generic() || !self.essential {
            return Err(Error::NotGeneric);
        }
        let k = self.k;
        let n = self.n();
        let m = self.matrix();
        let mut block = Matrix::zeros(k, k);
        for r in 0..k {
            for c in 0..k {
                block.set(r, c, m.get(r, c).clone());
            }
        }
        let inv = block.inverse()?.ok_or(Error::NotGeneric)?;
        let mut cols: Vec<Vec<Scalar>> = (0..n)
            .map(|j| inv.mul_vec(&m.column(j)).expect("square block"))
            .collect();
        if n > k {
            // row scaling by 1/v_r, then column r rescaled back to e_r
            let v = cols[k].clone();
            for col in cols.iter_mut().skip(k) {
                for r in 0..k {
                    col[r] = &col[r] / &v[r];
                }
            }
            for col in cols.iter_mut().skip(k + 1) {
                let last = col[k - 1].clone();
                for x in col.iter_mut() {
                    *x = &*x / &last;
                }
            }
        }
        Arrangement::new(k, cols)
    }

    /// Relabels so that hyperplane `i` becomes hyperplane `sigma[i - 1]`.
    pub fn permute(&self, sigma: &[usize]) -> Result<Arrangement> {
        let n = self.n();
        let mut seen = vec![false; n];
        if sigma.len() != n
            || sigma
                .iter()
                .any(|&s| s == 0 || s > n || std::mem::replace(&mut seen[s - 1], true))
        {
            return Err(Error::InvalidArgument("not a permutation of [n]".into()));
        }
        let mut normals = vec![Vec::new(); n];
        for (i, a) in self.normals.iter().enumerate() {
            normals[sigma[i] - 1] = a.clone();
        }
        Ok(Arrangement {
            k: self.k,
            normals,
            essential: self.essential,
        })
    }

    /// Multiplies normal `i` by the nonzero scalar `c`.
    pub fn scale_normal(&self, i: usize, c: &Scalar) -> Result<Arrangement> {
        self.check_index(i)?;
        if c.is_zero() {
            return Err(Error::InvalidArgument("scaling by zero".into()));
        }
        let mut out = self.clone();
        for x in out.normals[i - 1].iter_mut() {
            *x = &*x * c;
        }
        Ok(out)
    }

    /// Applies `alpha -> g * alpha` to every normal for an invertible `g`.
    pub fn transform(&self, g: &Matrix) -> Result<Arrangement> {
        if g.rows() != self.k || g.cols() != self.k || g.det()?.is_zero() {
            return Err(Error::InvalidArgument(
                "transformation must be an invertible k x k matrix".into(),
            ));
        }
        let normals = self
            .normals
            .iter()
            .map(|a| g.mul_vec(a))
            .collect::<Result<Vec<_>>>()?;
        Arrangement::new(self.k, normals)
    }

    pub fn push(&self, normal: Vec<Scalar>) -> Result<Arrangement> {
        let mut normals = self.normals.clone();
        normals.push(normal);
        Arrangement::new(self.k, normals)
    }

    pub fn replace(&self, i: usize, normal: Vec<Scalar>) -> Result<Arrangement> {
        self.check_index(i)?;
        let mut normals = self.normals.clone();
        normals[i - 1] = normal;
        Arrangement::new(self.k, normals)
    }

    /// Seeded generic arrangement with integer entries in `[-height, height]`,
    /// resampled until generic and essential.
    pub fn random_generic(n: usize, k: usize, seed: u64, height: i64) -> Result<Sample> {
        Self::random_generic_with_budget(n, k, seed, height, DEFAULT_SAMPLE_BUDGET)
    }

    pub fn random_generic_with_budget(
        n: usize,
        k: usize,
        seed: u64,
        height: i64,
        budget: usize,
    ) -> Result<Sample> {
        if k == 0 || n < k {
            return Err(Error::InvalidArgument(format!(
                "n = {n} < k = {k}: the arrangement cannot be essential"
            )));
        }
        if height < 1 {
            return Err(Error::InvalidArgument("height must be at least 1".into()));
        }
        if n > MAX_GROUND {
            return Err(Error::BoundsExceeded(format!(
                "n = {n} exceeds {MAX_GROUND}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for attempt in 0..budget {
            let normals: Vec<Vec<Scalar>> = (0..n)
                .map(|_| {
                    (0..k)
                        .map(|_| Scalar::from_int(rng.gen_range(-height..=height)))
                        .collect()
                })
                .collect();
            if normals.iter().any(|a| a.iter().all(Scalar::is_zero)) {
                continue;
            }
            let a = Self::assemble(k, normals);
            if a.essential && a.is_generic() {
                return Ok(Sample {
                    arrangement: a,
                    resamples: attempt,
                });
            }
        }
        Err(Error::RetryBudgetExhausted {
            budget,
            context: format!("no generic ({n}, {k}) arrangement at height {height}"),
        })
    }
}

/// Circuits of a restriction to `H_i` predicted from the circuits of the
/// original arrangement: the minimal members of `{C - i : i in C}` together
/// with `{C : i not in C}`, renumbered to `[n - 1]`.
pub fn restricted_circuits(circuits: &[Circuit], i: usize) -> Vec<Subset> {
    let candidates: BTreeSet<Subset> = circuits.iter().map(|c| c.indices().without(i)).collect();
    let mut out: Vec<Subset> = candidates
        .iter()
        .copied()
        .filter(|s| !candidates.iter().any(|t| t != s && t.is_subset(*s)))
        .map(|s| drop_index(s, i))
        .collect();
    out.sort();
    out
}

/// Circuits of the deletion of `H_i`: those avoiding `i`, renumbered.
pub fn deleted_circuits(circuits: &[Circuit], i: usize) -> Vec<Subset> {
    let mut out: Vec<Subset> = circuits
        .iter()
        .filter(|c| !c.indices().contains(i))
        .map(|c| drop_index(c.indices(), i))
        .collect();
    out.sort();
    out
}

/// Renumbers a subset avoiding `i` after removing `i` from the ground set.
pub fn drop_index(s: Subset, i: usize) -> Subset {
    let low = s.bits() & ((1u64 << (i - 1)) - 1);
    let high = (s.bits() >> i) << (i - 1);
    Subset::from_bits(low | high)
}

impl fmt::Debug for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Arrangement(k={}; ", self.k)?;
        for (i, a) in self.normals.iter().enumerate() {
            let parts: Vec<String> = a.iter().map(ToString::to_string).collect();
            write!(f, "{}({})", if i == 0 { "" } else { " " }, parts.join(","))?;
        }
        write!(f, ")")
    }
}
