//! Dense matrices over a prime field `F_p` with `p < 2^63`.

use std::fmt;

use rand::Rng;

pub const DEFAULT_PRIME: u64 = 2_305_843_009_213_693_951;

/// The prime field `F_p`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Field {
    p: u64,
}

impl Field {
    /// `None` unless `p` is an odd prime below `2^63`.
    pub fn new(p: u64) -> Option<Field> {
        (p > 2 && p < (1 << 63) && is_prime(p)).then_some(Field { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.p)
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        powmod(a, self.p - 2, self.p)
    }

    /// Image of a small signed integer.
    pub fn from_i64(&self, a: i64) -> u64 {
        let r = a.rem_euclid(self.p as i64);
        r as u64
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Row-major dense matrix with entries in `0..p`.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(&row);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat, k: &Field) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(l, j)];
                    if b != 0 {
                        out[(i, j)] = k.add(out[(i, j)], k.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat, k: &Field) -> Mat {
        self.zip(other, |a, b| k.add(a, b))
    }

    pub fn sub(&self, other: &Mat, k: &Field) -> Mat {
        self.zip(other, |a, b| k.sub(a, b))
    }

    pub fn scale(&self, c: u64, k: &Field) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| k.mul(a, c)).collect() }
    }

    fn zip(&self, other: &Mat, op: impl Fn(u64, u64) -> u64) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn flatten(&self) -> &[u64] {
        &self.data
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self, k: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self[(i, c)] != 0) else {
                continue;
            };
            self.swap_rows(r, piv);
            let inv = k.inv(self[(r, c)]);
            for j in c..self.cols {
                self[(r, j)] = k.mul(self[(r, j)], inv);
            }
            for i in 0..self.rows {
                let factor = self[(i, c)];
                if i == r || factor == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = k.mul(factor, self[(r, j)]);
                    self[(i, j)] = k.sub(self[(i, j)], v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self, k: &Field) -> usize {
        self.clone().rref(k).len()
    }

    /// Basis of the right null space `{v : self·v = 0}`.
    pub fn kernel(&self, k: &Field) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref(k);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0; self.cols];
                v[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = k.neg(m[(r, fc)]);
                }
                v
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = u64;
    fn index(&self, (i, j): (usize, usize)) -> &u64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        Ok(())
    }
}

/// Rank of a list of vectors of equal length.
pub fn span_rank(vectors: &[Vec<u64>], k: &Field) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Mat::from_rows(vectors.to_vec()).rank(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SMALL: u64 = 101;

    #[test]
    fn primes() {
        assert!(is_prime(DEFAULT_PRIME));
        assert!(is_prime(4_611_686_018_427_387_847));
        assert!(!is_prime(DEFAULT_PRIME - 2));
        assert!(!is_prime(561));
        assert!(Field::new(4).is_none());
        assert!(Field::new(2).is_none());
        assert!(Field::new(u64::MAX - 58).is_none());
    }

    #[test]
    fn field_ops() {
        let k = Field::new(DEFAULT_PRIME).unwrap();
        let a = k.from_i64(-1);
        assert_eq!(a, DEFAULT_PRIME - 1);
        assert_eq!(k.mul(a, a), 1);
        assert_eq!(k.mul(12345, k.inv(12345)), 1);
        assert_eq!(k.add(a, 1), 0);
        assert_eq!(k.sub(0, 1), a);
    }

    #[test]
    fn rank_and_kernel() {
        let k = Field::new(SMALL).unwrap();
        let m = Mat::from_rows(vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(m.rank(&k), 2);
        let ker = m.kernel(&k);
        assert_eq!(ker.len(), 1);
        let v = Mat::from_rows(ker.to_vec()).transpose();
        assert!(m.mul(&v, &k).is_zero());
        assert_eq!(Mat::zeros(2, 3).kernel(&k).len(), 3);
        assert_eq!(Mat::identity(4).rank(&k), 4);
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in proptest::collection::vec(proptest::collection::vec(0u64..5, 5), 1..6)) {
            let k = Field::new(SMALL).unwrap();
            let m = Mat::from_rows(rows);
            let ker = m.kernel(&k);
            prop_assert_eq!(m.rank(&k) + ker.len(), m.cols);
            for v in &ker {
                let col = Mat::from_rows(v.iter().map(|&x| vec![x]).collect());
                prop_assert!(m.mul(&col, &k).is_zero());
            }
            prop_assert_eq!(m.rank(&k), m.transpose().rank(&k));
        }
    }
}
