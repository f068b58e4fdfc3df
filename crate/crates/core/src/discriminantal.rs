//! The discriminantal arrangement B(A) in the space of translations `K^n`.
//!
//! A subspace `D_S` is represented through its annihilator, the space of
//! linear dependencies among the normals indexed by `S`. Ranks of
//! intersections are ranks of unions of these annihilators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::presentation::Presentation;
use crate::scalar::{dot, Scalar};
use crate::subset::{combinations, Subset};

pub const DEFAULT_REPRESENTATIVE_BUDGET: usize = 64;

/// A translation `t`: hyperplane `i` becomes `{x : alpha_i(x) = t_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TranslationVector {
    pub t: Vec<Scalar>,
}

impl TranslationVector {
    pub fn new(t: Vec<Scalar>) -> Self {
        TranslationVector { t }
    }

    pub fn zero(n: usize) -> Self {
        TranslationVector {
            t: vec![Scalar::zero(); n],
        }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        TranslationVector {
            t: v.iter().map(|&x| Scalar::from_int(x)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Normal covector of the hyperplane `D_C` for a circuit `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitNormal {
    pub circuit: Subset,
    pub coefficients: Vec<Scalar>,
}

/// Basis of the dependencies `{c : sum_{i in S} c_i alpha_i = 0}`, embedded
/// in `K^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencySpace {
    pub subset: Subset,
    pub basis: Vec<Vec<Scalar>>,
}

impl DependencySpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn check_translation(a: &Arrangement, t: &TranslationVector) -> Result<()> {
    if t.len() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "translation of length {} for {} hyperplanes",
            t.len(),
            a.n()
        )));
    }
    Ok(())
}

/// For a circuit of size `k + 1` the coefficients are the signed maximal
/// minors of the Laplace expansion along the first row of
/// `(e*_{i_1} .. e*_{i_{k+1}} ; alpha_{i_1} .. alpha_{i_{k+1}})`. Smaller
/// circuits get the unique dependency with coefficient 1 on the largest index.
pub fn circuit_normal(a: &Arrangement, c: Subset) -> Result<CircuitNormal> {
    a.circuit(c)?;
    let mut coefficients = vec![Scalar::zero(); a.n()];
    if c.len() == a.k() + 1 {
        for (j, i) in c.iter().enumerate() {
            let minor = a.maximal_minor(c.without(i))?;
            coefficients[i - 1] = if j % 2 == 0 { minor } else { -minor };
        }
    } else {
        let space = dependency_space(a, c)?;
        let v = &space.basis[0];
        let last = v[c.largest().expect("circuit is nonempty") - 1].clone();
        for i in c.iter() {
            coefficients[i - 1] = &v[i - 1] / &last;
        }
    }
    Ok(CircuitNormal {
        circuit: c,
        coefficients,
    })
}

pub fn dependency_space(a: &Arrangement, s: Subset) -> Result<DependencySpace> {
    if let Some(m) = s.largest().filter(|&m| m > a.n()) {
        return Err(Error::IndexOutOfRange { index: m, n: a.n() });
    }
    let idx = s.to_vec();
    if idx.is_empty() {
        return Ok(DependencySpace {
            subset: s,
            basis: Vec::new(),
        });
    }
    let cols: Vec<Vec<Scalar>> = idx.iter().map(|&i| a.normals()[i - 1].clone()).collect();
    let m = Matrix::from_rows_with_cols(&cols, a.k())?.transpose();
    let basis = m
        .kernel_basis()
        .into_iter()
        .map(|v| {
            let mut full = vec![Scalar::zero(); a.n()];
            for (x, &i) in v.into_iter().zip(&idx) {
                full[i - 1] = x;
            }
            full
        })
        .collect();
    Ok(DependencySpace { subset: s, basis })
}

/// Stacked dependency covectors of every member of `family`.
pub fn dependency_rows(a: &Arrangement, family: &[Subset]) -> Result<Vec<Vec<Scalar>>> {
    let mut rows = Vec::new();
    for &s in family {
        rows.extend(dependency_space(a, s)?.basis);
    }
    Ok(rows)
}

/// Rank of `bigcap_{S in family} D_S`, i.e. its codimension in `K^n`.
pub fn intersection_rank_of(a: &Arrangement, family: &[Subset]) -> Result<usize> {
    let rows = dependency_rows(a, family)?;
    if rows.is_empty() {
        return Ok(0);
    }
    Ok(Matrix::from_rows_with_cols(&rows, a.n())?.rank())
}

pub fn intersection_rank(a: &Arrangement, t: &Presentation) -> Result<usize> {
    intersection_rank_of(a, t.members())
}

/// Whether the translated hyperplanes indexed by `s` share a point.
pub fn translation_in_ds(a: &Arrangement, t: &TranslationVector, s: Subset) -> Result<bool> {
    check_translation(a, t)?;
    let space = dependency_space(a, s)?;
    Ok(space.basis.iter().all(|c| dot(c, &t.t).is_zero()))
}

/// The maximal dependent index sets whose translated hyperplanes meet.
///
/// Each such set is the set of all hyperplanes through the flat cut out by
/// some basis of the normals, so it suffices to solve one system per basis.
pub fn canonical_presentation(a: &Arrangement, t: &TranslationVector) -> Result<Presentation> {
    check_translation(a, t)?;
    let n = a.n();
    let r = a.rank_of(a.ground());
    let mut found: Vec<Subset> = Vec::new();
    for basis in combinations(n, r) {
        if !a.is_independent(basis) {
            continue;
        }
        let rows: Vec<Vec<Scalar>> = basis.iter().map(|i| a.normals()[i - 1].clone()).collect();
        let rhs: Vec<Scalar> = basis.iter().map(|i| t.t[i - 1].clone()).collect();
        let x = Matrix::from_rows_with_cols(&rows, a.k())?
            .solve(&rhs)?
            .expect("independent rows are always consistent");
        let through: Subset =
            Subset::from_indices((1..=n).filter(|&j| dot(&a.normals()[j - 1], &x) == t.t[j - 1]))?;
        if through.len() > r && !found.contains(&through) {
            found.push(through);
        }
    }
    Presentation::new(n, a.k(), found)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Representative {
    Found(TranslationVector),
    /// No sampled point realized the family exactly. `achieved` is the
    /// presentation of the last sample; it is strictly above the target when
    /// the target's intersection is degenerate.
    NotFound {
        achieved: Presentation,
        seed: u64,
        attempts: usize,
    },
}

/// Searches `bigcap_{S in t} D_S` for a translation whose canonical
/// presentation is exactly `t`. The first attempt is `0`; later attempts are
/// random integer combinations of a kernel basis with growing height.
pub fn representative(
    a: &Arrangement,
    t: &Presentation,
    seed: u64,
    budget: usize,
) -> Result<Representative> {
    let rows = dependency_rows(a, t.members())?;
    let n = a.n();
    let basis = if rows.is_empty() {
        Matrix::identity(n).rows_as_vectors()
    } else {
        Matrix::from_rows_with_cols(&rows, n)?.kernel_basis()
    };
    let target = t.with_context(n, a.k())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut achieved = None;
    for attempt in 0..budget.max(1) {
        let mut v = vec![Scalar::zero(); n];
        if attempt > 0 {
            let h = 1 + attempt as i64;
            for b in &basis {
                let c = Scalar::from_int(rng.gen_range(-h..=h));
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &(&c * y);
                }
            }
        }
        let w = TranslationVector::new(v);
        let p = canonical_presentation(a, &w)?;
        if p == target {
            return Ok(Representative::Found(w));
        }
        achieved = Some(p);
    }
    Ok(Representative::NotFound {
        achieved: achieved.expect("at least one attempt"),
        seed,
        attempts: budget.max(1),
    })
}
