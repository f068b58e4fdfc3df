//! Arithmetic modulo a word-sized prime, used only to screen rank
//! computations before exact confirmation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_PRIME: u64 = 2_147_483_647;

const MIN_MODULUS: u64 = 1 << 20;
const MAX_MODULUS: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        // Both factors are reduced, so the product fits in 64 bits.
        return a * b % m;
    }
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; these bases are exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p <= MIN_MODULUS || p >= MAX_MODULUS || !is_prime(p) {
            return Err(Error::BadModulus(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Inverse of a nonzero residue, by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> u64 {
        // The modulus is below 2^62, so every quantity fits in an i64.
        let (mut r0, mut r1) = (self.p as i64, (a % self.p) as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1, "zero has no inverse");
        s0.rem_euclid(self.p as i64) as u64
    }

    fn reduce_int(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let mut r = v % &m;
        if r < BigInt::zero() {
            r += &m;
        }
        r.to_u64().expect("residue fits in u64")
    }

    /// Image of a rational; fails when the denominator vanishes mod `p`.
    pub fn reduce(&self, x: &Scalar) -> Result<u64> {
        let den = self.reduce_int(x.denom());
        if den == 0 {
            return Err(Error::NotReducible {
                value: x.to_string(),
                modulus: self.p,
            });
        }
        Ok(mul_mod(self.reduce_int(x.numer()), self.inv(den), self.p))
    }

    pub fn reduce_vec(&self, v: &[Scalar]) -> Result<Vec<u64>> {
        v.iter().map(|x| self.reduce(x)).collect()
    }

    /// Rank of the given rows; destroys them.
    pub fn rank_in_place(&self, rows: &mut [Vec<u64>]) -> usize {
        let p = self.p;
        let cols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows.len() {
                break;
            }
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
                continue;
            };
            rows.swap(rank, piv);
            let inv = self.inv(rows[rank][c]);
            for x in rows[rank][c..].iter_mut() {
                *x = mul_mod(*x, inv, p);
            }
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            for row in tail.iter_mut() {
                let f = row[c];
                if f == 0 {
                    continue;
                }
                for j in c..cols {
                    let sub = mul_mod(f, pivot_row[j], p);
                    row[j] = if row[j] >= sub {
                        row[j] - sub
                    } else {
                        row[j] + p - sub
                    };
                }
            }
            rank += 1;
        }
        rank
    }

    /// Rank of a row-major matrix with `cols` columns; destroys it.
    pub fn rank_flat(&self, data: &mut [u64], cols: usize) -> usize {
        let p = self.p;
        let rows = data.len().checked_div(cols).unwrap_or(0);
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| data[r * cols + c] != 0) else {
                continue;
            };
            if piv != rank {
                for j in c..cols {
                    data.swap(rank * cols + j, piv * cols + j);
                }
            }
            let inv = self.inv(data[rank * cols + c]);
            for j in c..cols {
                data[rank * cols + j] = mul_mod(data[rank * cols + j], inv, p);
            }
            for r in rank + 1..rows {
                let f = data[r * cols + c];
                if f == 0 {
                    continue;
                }
                for j in c..cols {
                    let sub = mul_mod(f, data[rank * cols + j], p);
                    let x = data[r * cols + j];
                    data[r * cols + j] = if x >= sub { x - sub } else { x + p - sub };
                }
            }
            rank += 1;
        }
        rank
    }

    /// Reduces `row` against an echelon basis (row-major, `cols` wide) and
    /// appends it when it is independent. Every stored row vanishes on the
    /// pivots of the rows before it, so truncating the basis undoes pushes.
    pub fn push_reduced(&self, basis: &mut Vec<u64>, pivots: &mut Vec<usize>, row: &[u64]) -> bool {
        let p = self.p;
        let cols = row.len();
        let start = basis.len();
        basis.extend_from_slice(row);
        let (done, tail) = basis.split_at_mut(start);
        reduce_against(done, pivots, tail, p);
        let Some(c) = (0..cols).find(|&j| basis[start + j] != 0) else {
            basis.truncate(start);
            return false;
        };
        let inv = self.inv(basis[start + c]);
        for j in 0..cols {
            basis[start + j] = mul_mod(basis[start + j], inv, p);
        }
        pivots.push(c);
        true
    }

    /// Whether `row` is independent of an echelon basis built by
    /// `push_reduced`; `scratch` is overwritten.
    pub fn is_independent(
        &self,
        basis: &[u64],
        pivots: &[usize],
        row: &[u64],
        scratch: &mut Vec<u64>,
    ) -> bool {
        scratch.clear();
        scratch.extend_from_slice(row);
        reduce_against(basis, pivots, scratch, self.p);
        scratch.iter().any(|&x| x != 0)
    }

    pub fn rank_of_rows(&self, rows: &[Vec<u64>]) -> usize {
        let mut owned = rows.to_vec();
        self.rank_in_place(&mut owned)
    }
}

/// Subtracts from `row` the multiples of the basis rows that clear their
/// pivots, in order.
fn reduce_against(basis: &[u64], pivots: &[usize], row: &mut [u64], p: u64) {
    let cols = row.len();
    for (i, &c) in pivots.iter().enumerate() {
        let f = row[c];
        if f == 0 {
            continue;
        }
        let b = &basis[i * cols..(i + 1) * cols];
        for (x, &y) in row.iter_mut().zip(b) {
            let sub = mul_mod(f, y, p);
            *x = if *x >= sub { *x - sub } else { *x + p - sub };
        }
    }
}

/// Which field a rank verdict is computed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum FieldMode {
    #[default]
    Rational,
    Prime(PrimeField),
}

impl FieldMode {
    pub fn is_rational(&self) -> bool {
        matches!(self, FieldMode::Rational)
    }

    /// Short tag used in reports: `"Q"` or `"Fp"`.
    pub fn tag(&self) -> &'static str {
        match self {
            FieldMode::Rational => "Q",
            FieldMode::Prime(_) => "Fp",
        }
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

/// Serialized as its report tag, `"Q"` or `"Fp"`.
impl Serialize for FieldMode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.tag())
    }
}

impl fmt::Display for FieldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldMode::Rational => write!(f, "Q"),
            FieldMode::Prime(fp) => write!(f, "Fp:{}", fp.p),
        }
    }
}

impl FromStr for FieldMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" => Ok(FieldMode::Rational),
            "Fp" => Ok(FieldMode::Prime(PrimeField { p: DEFAULT_PRIME })),
            _ => {
                let Some(rest) = s.strip_prefix("Fp:") else {
                    return Err(Error::Parse {
                        offset: 0,
                        message: format!("unknown field {s:?}, expected Q or Fp:<prime>"),
                    });
                };
                let p: u64 = rest.parse().map_err(|_| Error::Parse {
                    offset: 3,
                    message: format!("invalid modulus {rest:?}"),
                })?;
                Ok(FieldMode::Prime(PrimeField::new(p)?))
            }
        }
    }
}
