//! Exact integer vectors and matrices.
//!
//! All entries are arbitrary-precision; matrix powers in the finite-order
//! test overflow machine words quickly, so nothing here uses fixed-width
//! arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Column vector with exact integer entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn zeros(len: usize) -> Self {
        IntVector(vec![BigInt::zero(); len])
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.len(), other.len());
        IntVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntVector({:?})", self.0.iter().map(|e| e.to_string()).collect::<Vec<_>>())
    }
}

/// Coordinate-wise floor division with remainder: `v = n*q + rem`, every
/// remainder entry in `{0, …, n-1}`.
pub fn divmod_vec(v: &IntVector, n: u64) -> (IntVector, IntVector) {
    assert!(n >= 2, "modulus must be at least 2");
    let n = BigInt::from(n);
    let mut q = Vec::with_capacity(v.len());
    let mut rem = Vec::with_capacity(v.len());
    for e in &v.0 {
        let (d, r) = e.div_mod_floor(&n);
        q.push(d);
        rem.push(r);
    }
    (IntVector(q), IntVector(rem))
}

/// Square or rectangular matrix with exact integer entries, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "matrix shape {rows}x{cols} does not match {} entries",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&e| BigInt::from(e)))
            .collect();
        IntMatrix::new(r, c, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix {
            rows: n,
            cols: n,
            data: vec![BigInt::zero(); n * n],
        };
        for i in 0..n {
            *m.get_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.get(i, j).is_one()
                    } else {
                        self.get(i, j).is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix {
            rows: self.rows,
            cols: other.cols,
            data: vec![BigInt::zero(); self.rows * other.cols],
        };
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.get(k, j);
                    *out.get_mut(i, j) += prod;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scalar_mul(&self, s: i64) -> IntMatrix {
        let s = BigInt::from(s);
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e * &s).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> IntMatrix {
        assert!(self.is_square());
        let mut acc = IntMatrix::identity(self.rows);
        let mut sq = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &IntVector) -> IntVector {
        assert_eq!(self.cols, v.len());
        IntVector(
            (0..self.rows)
                .map(|i| {
                    (0..self.cols)
                        .map(|j| self.get(i, j) * &v.0[j])
                        .sum::<BigInt>()
                })
                .collect(),
        )
    }

    /// `v + M x` for a letter vector `x` with small nonnegative entries.
    pub fn affine_image(&self, v: &IntVector, x: &[usize]) -> IntVector {
        assert_eq!(self.cols, x.len());
        assert_eq!(self.rows, v.len());
        IntVector(
            (0..self.rows)
                .map(|i| {
                    let mut acc = v.0[i].clone();
                    for (j, &xj) in x.iter().enumerate() {
                        if xj != 0 {
                            acc += self.get(i, j) * BigInt::from(xj);
                        }
                    }
                    acc
                })
                .collect(),
        )
    }

    /// Max norm `n(M) = max_i sum_j |m_ij|`.
    pub fn max_norm(&self) -> BigInt {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).abs()).sum::<BigInt>())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn max_norm_usize(&self) -> Result<usize> {
        let n = self.max_norm();
        usize::try_from(&n)
            .map_err(|_| Error::InvalidInput(format!("max norm {n} does not fit in usize")))
    }

    /// Exact determinant (Bareiss fraction-free elimination).
    pub fn det(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero());
                    m[i][j] = q;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        sign * m[n - 1][n - 1].clone()
    }

    /// Monic characteristic polynomial `det(xI - M)`, coefficients low to
    /// high (Faddeev–LeVerrier; the divisions are exact over the integers).
    pub fn char_poly(&self) -> Vec<BigInt> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs_high_first = vec![BigInt::one()];
        let mut a = self.clone();
        for k in 1..=n {
            let c = -a.trace() / BigInt::from(k as u64);
            coeffs_high_first.push(c.clone());
            if k < n {
                let mut shifted = a;
                for i in 0..n {
                    *shifted.get_mut(i, i) += &c;
                }
                a = self.mul(&shifted);
            }
        }
        coeffs_high_first.reverse();
        coeffs_high_first
    }

    pub fn trace(&self) -> BigInt {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i).clone()).sum()
    }

    /// True iff no power of `M` is the identity.
    ///
    /// `M` has finite order iff its characteristic polynomial is a product of
    /// cyclotomic polynomials `Phi_d` with `phi(d) <= r`, and `M^L = I` for
    /// `L` the lcm of the occurring indices. Both halves are checked exactly.
    pub fn has_infinite_order(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        if self.det().is_zero() {
            return Err(Error::DegenerateMatrix);
        }
        let r = self.rows;
        let mut poly = self.char_poly();
        let mut indices: Vec<u64> = Vec::new();
        // phi(d) >= sqrt(d/2), so phi(d) <= r forces d <= 2r^2.
        for d in 1..=(2 * r * r).max(2) {
            if euler_phi(d) > r {
                continue;
            }
            let phi_d = cyclotomic(d);
            while let Some(q) = poly_div_exact(&poly, &phi_d) {
                poly = q;
                if !indices.contains(&(d as u64)) {
                    indices.push(d as u64);
                }
            }
        }
        let fully_cyclotomic = poly.len() == 1 && poly[0].is_one();
        if !fully_cyclotomic {
            return Ok(true);
        }
        let order_bound = indices.iter().fold(1u64, |acc, d| acc.lcm(d));
        Ok(!self.pow(order_bound).is_identity())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Permutation matrix `C` with `(Cx)_i = x_{sigma(i)}`, i.e. row `i` carries
/// a 1 in column `sigma(i)`.
///
/// The convention is the one that makes the coordinate rule
/// `mu_v(x)_i = (x_{sigma(i)} + v_i) mod p` hold; it is pinned by a unit
/// test rather than left implicit.
pub fn permutation_matrix(sigma: &Permutation) -> IntMatrix {
    let r = sigma.len();
    let mut m = IntMatrix {
        rows: r,
        cols: r,
        data: vec![BigInt::zero(); r * r],
    };
    for i in 0..r {
        *m.get_mut(i, sigma.apply(i)) = BigInt::one();
    }
    m
}

fn euler_phi(n: usize) -> usize {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Cyclotomic polynomial `Phi_d`, coefficients low to high, computed by
/// exact division of `x^d - 1` by the proper-divisor cyclotomics.
fn cyclotomic(d: usize) -> Vec<BigInt> {
    let mut num = vec![BigInt::zero(); d + 1];
    num[0] = -BigInt::one();
    num[d] = BigInt::one();
    for e in 1..d {
        if d % e == 0 {
            let phi_e = cyclotomic(e);
            num = poly_div_exact(&num, &phi_e).expect("cyclotomic division is exact");
        }
    }
    num
}

/// Divides `num` by the monic polynomial `den`; `None` unless the division
/// is exact.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    debug_assert!(den.last().map(BigInt::is_one).unwrap_or(false));
    if num.len() < den.len() {
        return None;
    }
    let mut rem = num.to_vec();
    let qlen = num.len() - den.len() + 1;
    let mut quot = vec![BigInt::zero(); qlen];
    for qi in (0..qlen).rev() {
        let coeff = rem[qi + den.len() - 1].clone();
        if !coeff.is_zero() {
            for (di, d) in den.iter().enumerate() {
                let prod = &coeff * d;
                rem[qi + di] -= prod;
            }
        }
        quot[qi] = coeff;
    }
    if rem.iter().all(BigInt::is_zero) {
        Some(quot)
    } else {
        None
    }
}

// JSON encoding: {"rows": [[...], ...]} with entries as plain numbers when
// they fit in 64 bits and decimal strings otherwise.

fn entry_to_value(e: &BigInt) -> serde_json::Value {
    match i64::try_from(e) {
        Ok(v) => serde_json::Value::from(v),
        Err(_) => serde_json::Value::from(e.to_string()),
    }
}

fn entry_from_value(v: &serde_json::Value) -> std::result::Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(format!("non-integer entry {n}"))
            }
        }
        serde_json::Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| format!("bad integer string {s:?}")),
        other => Err(format!("bad matrix entry {other}")),
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let rows: Vec<Vec<serde_json::Value>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| entry_to_value(self.get(i, j))).collect())
            .collect();
        let mut map = serializer.serialize_map(Some(1))?;
        map.serialize_entry("rows", &rows)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Dto {
            rows: Vec<Vec<serde_json::Value>>,
        }
        let dto = Dto::deserialize(deserializer)?;
        let r = dto.rows.len();
        let c = dto.rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 || dto.rows.iter().any(|row| row.len() != c) {
            return Err(de::Error::custom("matrix rows must be non-empty and rectangular"));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in &dto.rows {
            for v in row {
                data.push(entry_from_value(v).map_err(de::Error::custom)?);
            }
        }
        IntMatrix::new(r, c, data).map_err(de::Error::custom)
    }
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(entry_to_value))
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<serde_json::Value>::deserialize(deserializer)?;
        let entries = values
            .iter()
            .map(entry_from_value)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(de::Error::custom)?;
        Ok(IntVector(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows_i64(rows).unwrap()
    }

    #[test]
    fn max_norm_examples() {
        assert_eq!(m(&[vec![2, 1], vec![1, 0]]).max_norm(), BigInt::from(3));
        assert_eq!(IntMatrix::identity(4).max_norm(), BigInt::from(1));
        assert_eq!(m(&[vec![0, -1], vec![1, 0]]).max_norm(), BigInt::from(1));
    }

    #[test]
    fn divmod_floor_convention() {
        let (q, r) = divmod_vec(&IntVector::from_i64(&[-1, 5]), 3);
        assert_eq!(q, IntVector::from_i64(&[-1, 1]));
        assert_eq!(r, IntVector::from_i64(&[2, 2]));

        let (q, r) = divmod_vec(&IntVector::from_i64(&[0, 0]), 2);
        assert_eq!(q, IntVector::from_i64(&[0, 0]));
        assert_eq!(r, IntVector::from_i64(&[0, 0]));

        let (q, r) = divmod_vec(&IntVector::from_i64(&[-4]), 2);
        assert_eq!(q, IntVector::from_i64(&[-2]));
        assert_eq!(r, IntVector::from_i64(&[0]));
    }

    #[test]
    fn permutation_matrix_examples() {
        let id = permutation_matrix(&Permutation::identity(3));
        assert!(id.is_identity());
        let swap = permutation_matrix(&Permutation::new(vec![1, 0]).unwrap());
        assert_eq!(swap, m(&[vec![0, 1], vec![1, 0]]));
    }

    #[test]
    fn permutation_matrix_coordinate_rule() {
        // (Cx)_i == x_{sigma(i)} for every x in {0,...,p-1}^r, r <= 3.
        for p in [2usize, 3, 5] {
            for sigma in [
                Permutation::standard_cycle(3),
                Permutation::new(vec![1, 0, 2]).unwrap(),
                Permutation::identity(3),
            ] {
                let c = permutation_matrix(&sigma);
                for x in crate::words::words_of_length(p, 3) {
                    let image = c.affine_image(&IntVector::zeros(3), &x);
                    for i in 0..3 {
                        assert_eq!(image.0[i], BigInt::from(x[sigma.apply(i)]));
                    }
                }
            }
        }
    }

    #[test]
    fn det_examples() {
        assert_eq!(m(&[vec![2, 1], vec![1, 0]]).det(), BigInt::from(-1));
        assert_eq!(m(&[vec![1, 2], vec![2, 4]]).det(), BigInt::zero());
        assert_eq!(IntMatrix::identity(5).det(), BigInt::one());
        assert_eq!(
            m(&[vec![3, 1, 0], vec![0, 3, 1], vec![1, 0, 3]]).det(),
            BigInt::from(28)
        );
    }

    #[test]
    fn char_poly_examples() {
        // x^2 - 2x - 1
        assert_eq!(
            m(&[vec![2, 1], vec![1, 0]]).char_poly(),
            vec![BigInt::from(-1), BigInt::from(-2), BigInt::from(1)]
        );
        // x^2 + 1
        assert_eq!(
            m(&[vec![0, -1], vec![1, 0]]).char_poly(),
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)]
        );
    }

    #[test]
    fn cyclotomic_small() {
        let to_i64 = |p: Vec<BigInt>| {
            p.iter()
                .map(|c| i64::try_from(c).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(to_i64(cyclotomic(1)), vec![-1, 1]);
        assert_eq!(to_i64(cyclotomic(2)), vec![1, 1]);
        assert_eq!(to_i64(cyclotomic(3)), vec![1, 1, 1]);
        assert_eq!(to_i64(cyclotomic(4)), vec![1, 0, 1]);
        assert_eq!(to_i64(cyclotomic(6)), vec![1, -1, 1]);
        assert_eq!(to_i64(cyclotomic(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn infinite_order_examples() {
        assert!(m(&[vec![2, 1], vec![1, 0]]).has_infinite_order().unwrap());
        assert!(!m(&[vec![0, -1], vec![1, 0]]).has_infinite_order().unwrap());
        assert!(!IntMatrix::identity(3).has_infinite_order().unwrap());
        assert!(matches!(
            m(&[vec![1, 2], vec![2, 4]]).has_infinite_order(),
            Err(Error::DegenerateMatrix)
        ));
    }

    #[test]
    fn infinite_order_brute_force_agreement() {
        // Every 2x2 matrix with entries in {-2,...,2} and nonzero determinant:
        // compare against "some power M^k = I with k <= 24".
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    for d in -2i64..=2 {
                        let mat = m(&[vec![a, b], vec![c, d]]);
                        if mat.det().is_zero() {
                            continue;
                        }
                        let mut power = IntMatrix::identity(2);
                        let mut finite = false;
                        for _ in 1..=24 {
                            power = power.mul(&mat);
                            if power.is_identity() {
                                finite = true;
                                break;
                            }
                        }
                        assert_eq!(
                            mat.has_infinite_order().unwrap(),
                            !finite,
                            "disagreement on {mat:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn serde_number_and_string_entries() {
        let mat = m(&[vec![2, 1], vec![1, 0]]);
        let s = serde_json::to_string(&mat).unwrap();
        assert_eq!(s, r#"{"rows":[[2,1],[1,0]]}"#);
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, mat);

        let huge: IntMatrix =
            serde_json::from_str(r#"{"rows":[["123456789012345678901234567890"]]}"#).unwrap();
        let round = serde_json::to_string(&huge).unwrap();
        assert_eq!(round, r#"{"rows":[["123456789012345678901234567890"]]}"#);
    }
}
