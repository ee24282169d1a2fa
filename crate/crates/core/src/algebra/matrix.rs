//! Dense exact matrices.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::field::{Field, Scalar};
use crate::error::{Error, Result};

/// Dense `rows × cols` matrix over an exact field, entries row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Reduced row-echelon data of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProfile {
    pub rank: usize,
    pub rref: ExactMatrix,
    pub pivots: Vec<usize>,
}

/// Eventual periodicity of `a, a^2, a^3, …` over a finite field.
///
/// `a^(m + period) = a^m` for all `m >= preperiod`, with both minimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerTail {
    pub preperiod: usize,
    pub period: usize,
    /// `a^preperiod, …, a^(preperiod + period - 1)`.
    pub cycle: Vec<ExactMatrix>,
}

impl PowerTail {
    /// The unique idempotent among the cycle powers: `a^j` with `period | j`.
    pub fn cycle_idempotent(&self) -> &ExactMatrix {
        let offset = (self.period - self.preperiod % self.period) % self.period;
        &self.cycle[offset]
    }

    /// Exponent of `cycle[i]`.
    pub fn exponent(&self, i: usize) -> usize {
        self.preperiod + i
    }
}

/// `a = p · [I_r 0; 0 0] · q` with `p`, `q` invertible and
/// `b = q⁻¹ · [I_r 0; 0 0]ᵀ · p⁻¹`, so that `aba = a`, `bab = b` and both
/// `ab`, `ba` are rank-`r` idempotents.
#[derive(Clone, Debug)]
pub struct RankFactorization {
    pub rank: usize,
    pub p: ExactMatrix,
    pub q: ExactMatrix,
    pub inner_inverse: ExactMatrix,
}

/// Row-reduce `rows` in place to reduced echelon form; returns pivot columns.
pub(crate) fn rref_in_place(field: &Field, rows: &mut Vec<Vec<Scalar>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(&rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = field.mul(x, &inv);
        }
        for i in 0..rows.len() {
            if i != r && !field.is_zero(&rows[i][c]) {
                let factor = rows[i][c].clone();
                for j in c..ncols {
                    let t = field.mul(&factor, &rows[r][j]);
                    rows[i][j] = field.sub(&rows[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : rows · x = 0}`, one vector per free column, in column order.
pub(crate) fn null_space(field: &Field, rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut r = rows.to_vec();
    let pivots = rref_in_place(field, &mut r, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (row, &pc) in r.iter().zip(&pivots) {
            v[pc] = field.neg(&row[free]);
        }
        basis.push(v);
    }
    basis
}

impl ExactMatrix {
    pub fn new(field: Field, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ExactMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// Matrix unit `E_ij` of size `rows × cols`.
    pub fn unit_rect(field: &Field, rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        m.data[i * cols + j] = field.one();
        m
    }

    /// Square matrix unit `E_ij` (0-based indices).
    pub fn unit(field: &Field, n: usize, i: usize, j: usize) -> Self {
        Self::unit_rect(field, n, n, i, j)
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let m = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::new(field.clone(), m, k, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from integer entries.
    pub fn from_ints<R: AsRef<[i64]>>(field: &Field, rows: &[R]) -> Self {
        let rows: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| field.from_int(x)).collect())
            .collect();
        Self::from_rows(field, rows).expect("rectangular integer rows")
    }

    pub fn diagonal(field: &Field, diag: &[Scalar]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(field, n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = d.clone();
        }
        m
    }

    /// Inverse of `vectorize` for an `n × n` matrix.
    pub fn from_vector(field: &Field, n: usize, v: Vec<Scalar>) -> Result<Self> {
        Self::new(field.clone(), n, n, v)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    /// Row-major entry vector.
    pub fn vectorize(&self) -> Vec<Scalar> {
        self.data.clone()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        self.data.chunks(self.cols.max(1)).map(<[_]>::to_vec).take(self.rows).collect()
    }

    fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedFields(format!("{} vs {}", self.field, other.field)));
        }
        Ok(())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self.data[i * self.cols + l];
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = f.mul(a, &rhs.data[l * rhs.cols + j]);
                    let idx = i * rhs.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &t);
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_field(rhs)?;
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::ShapeMismatch("addition of differently shaped matrices".into()));
        }
        let f = &self.field;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| f.add(a, b)).collect();
        Ok(ExactMatrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let f = &self.field;
        ExactMatrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.mul(s, a)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("trace of a non-square matrix".into()));
        }
        let f = &self.field;
        Ok((0..self.rows).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i))))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_idempotent(&self) -> bool {
        self.is_square() && &(self * self) == self
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = Self::identity(&self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn rank_profile(&self) -> RankProfile {
        let mut rows = self.row_vecs();
        let pivots = rref_in_place(&self.field, &mut rows, self.cols);
        let rank = pivots.len();
        rows.resize(self.rows, vec![self.field.zero(); self.cols]);
        let rref = ExactMatrix::from_rows(&self.field, rows)
            .unwrap_or_else(|_| ExactMatrix::zeros(&self.field, self.rows, self.cols));
        RankProfile { rank, rref, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rank_profile().rank
    }

    /// Row reduction of `[self | I]`; returns `(E, R)` with `E · self = R`, `R` in
    /// reduced echelon form and `E` invertible.
    fn reduce_with_transform(&self) -> (ExactMatrix, RankProfile) {
        let f = &self.field;
        let m = self.rows;
        let k = self.cols;
        let mut rows: Vec<Vec<Scalar>> = self
            .row_vecs()
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.extend((0..m).map(|j| if i == j { f.one() } else { f.zero() }));
                r
            })
            .collect();
        // Pivots restricted to the left block: eliminate only over the first k columns
        // but keep every row so the transform stays square.
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..k {
            let Some(pr) = (r..m).find(|&i| !f.is_zero(&rows[i][c])) else {
                continue;
            };
            rows.swap(r, pr);
            let inv = f.inv(&rows[r][c]).unwrap();
            for x in rows[r].iter_mut() {
                *x = f.mul(x, &inv);
            }
            for i in 0..m {
                if i != r && !f.is_zero(&rows[i][c]) {
                    let factor = rows[i][c].clone();
                    for j in 0..k + m {
                        let t = f.mul(&factor, &rows[r][j]);
                        rows[i][j] = f.sub(&rows[i][j], &t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let left: Vec<Vec<Scalar>> = rows.iter().map(|row| row[..k].to_vec()).collect();
        let right: Vec<Vec<Scalar>> = rows.iter().map(|row| row[k..].to_vec()).collect();
        let rref = if k == 0 {
            ExactMatrix::zeros(f, m, 0)
        } else {
            ExactMatrix::from_rows(f, left).unwrap()
        };
        let e = if m == 0 {
            ExactMatrix::zeros(f, 0, 0)
        } else {
            ExactMatrix::from_rows(f, right).unwrap()
        };
        let rank = pivots.len();
        (e, RankProfile { rank, rref, pivots })
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let (e, prof) = self.reduce_with_transform();
        if prof.rank < self.rows {
            return Err(Error::Singular);
        }
        Ok(e)
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let mut rows = self.row_vecs();
        let mut det = f.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !f.is_zero(&rows[i][c])) else {
                return Ok(f.zero());
            };
            if pr != c {
                rows.swap(c, pr);
                det = f.neg(&det);
            }
            det = f.mul(&det, &rows[c][c]);
            let inv = f.inv(&rows[c][c]).unwrap();
            for i in c + 1..n {
                if !f.is_zero(&rows[i][c]) {
                    let factor = f.mul(&rows[i][c], &inv);
                    for j in c..n {
                        let t = f.mul(&factor, &rows[c][j]);
                        rows[i][j] = f.sub(&rows[i][j], &t);
                    }
                }
            }
        }
        Ok(det)
    }

    /// Factor `self = P · [I_r 0; 0 0] · Q` and return `b = Q⁻¹ · [I_r 0; 0 0]ᵀ · P⁻¹`.
    ///
    /// `P⁻¹` is the row-reduction transform `E` (so `E · self = R`), and `Q⁻¹ = Π ·
    /// [I_r −X; 0 I]` where `Π` moves the pivot columns of `R` to the front and `X`
    /// is the non-pivot part of `R`'s top rows.
    pub fn rank_factorization(&self) -> RankFactorization {
        let f = &self.field;
        let (m, k) = (self.rows, self.cols);
        let (e, prof) = self.reduce_with_transform();
        let r = prof.rank;
        let non_pivots: Vec<usize> = (0..k).filter(|c| !prof.pivots.contains(c)).collect();
        let order: Vec<usize> = prof.pivots.iter().chain(&non_pivots).copied().collect();
        // Π: column j of R·Π is column order[j] of R.
        let mut perm = ExactMatrix::zeros(f, k, k);
        for (j, &src) in order.iter().enumerate() {
            perm.set(src, j, f.one());
        }
        // [I_r −X; 0 I] with X = rows 0..r of R at the non-pivot columns.
        let mut shear = ExactMatrix::identity(f, k);
        for i in 0..r {
            for (jj, &c) in non_pivots.iter().enumerate() {
                shear.set(i, r + jj, f.neg(prof.rref.get(i, c)));
            }
        }
        let q_inv = &perm * &shear;
        let mut j_km = ExactMatrix::zeros(f, k, m);
        for i in 0..r {
            j_km.set(i, i, f.one());
        }
        let inner_inverse = &(&q_inv * &j_km) * &e;
        let p = e.inverse().expect("row transform is invertible");
        let q = q_inv.inverse().expect("column transform is invertible");
        RankFactorization {
            rank: r,
            p,
            q,
            inner_inverse,
        }
    }

    /// Preperiod and period of the power sequence, by stored-sequence comparison.
    pub fn power_tail(&self) -> Result<PowerTail> {
        self.field.require_finite("power_tail")?;
        if !self.is_square() {
            return Err(Error::ShapeMismatch("power tail of a non-square matrix".into()));
        }
        let mut seen: HashMap<Vec<Scalar>, usize> = HashMap::new();
        let mut powers: Vec<ExactMatrix> = Vec::new();
        let mut cur = self.clone();
        let mut exp = 1;
        loop {
            if let Some(&first) = seen.get(&cur.data) {
                let cycle = powers[first - 1..].to_vec();
                return Ok(PowerTail {
                    preperiod: first,
                    period: exp - first,
                    cycle,
                });
            }
            seen.insert(cur.data.clone(), exp);
            let next = &cur * self;
            powers.push(cur);
            cur = next;
            exp += 1;
        }
    }

    /// `(trace, determinant)` of a 2×2 matrix; the characteristic polynomial is
    /// `x² − trace·x + det`.
    pub fn char_poly_2x2(&self) -> Result<(Scalar, Scalar)> {
        if self.rows != 2 || self.cols != 2 {
            return Err(Error::ShapeMismatch("expected a 2x2 matrix".into()));
        }
        let f = &self.field;
        let det = f.sub(
            &f.mul(self.get(0, 0), self.get(1, 1)),
            &f.mul(self.get(0, 1), self.get(1, 0)),
        );
        Ok((self.trace()?, det))
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;

    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.checked_mul(rhs).expect("matrix product")
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;

    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.checked_add(rhs).expect("matrix sum")
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;

    fn neg(self) -> ExactMatrix {
        let f = &self.field;
        ExactMatrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.neg(a)).collect(),
        }
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;

    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        self + &(-rhs)
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.field.format(self.get(i, j)))?;
            }
            write!(f, "]")?;
        }
        write!(f, "] over {}", self.field)
    }
}
