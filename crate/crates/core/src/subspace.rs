//! Subspaces of `M_n(F)` in canonical form, lattice operations and the trace-form
//! orthogonal complement.
//!
//! Matrices are identified with their row-major vectorizations in `F^(n²)`. A
//! subspace stores the reduced row-echelon basis of those vectors, so two
//! subspaces are equal exactly when their representations are.

use std::fmt;

use crate::algebra::matrix::{null_space, rref_in_place};
use crate::algebra::{ExactMatrix, Field, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatSubspace {
    field: Field,
    n: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl MatSubspace {
    pub fn zero(field: &Field, n: usize) -> Self {
        MatSubspace {
            field: field.clone(),
            n,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &Field, n: usize) -> Self {
        let vecs = (0..n * n)
            .map(|i| {
                let mut v = vec![field.zero(); n * n];
                v[i] = field.one();
                v
            })
            .collect();
        Self::from_vectors(field, n, vecs).expect("unit vectors")
    }

    /// Span of vectorized matrices given directly as length-`n²` vectors.
    pub fn from_vectors(field: &Field, n: usize, mut vecs: Vec<Vec<Scalar>>) -> Result<Self> {
        if let Some(v) = vecs.iter().find(|v| v.len() != n * n) {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} in M_{n}",
                v.len()
            )));
        }
        let pivots = rref_in_place(field, &mut vecs, n * n);
        Ok(MatSubspace {
            field: field.clone(),
            n,
            basis: vecs,
            pivots,
        })
    }

    /// Linear span of `n × n` matrices.
    pub fn span_of(field: &Field, n: usize, mats: &[ExactMatrix]) -> Result<Self> {
        for m in mats {
            if m.field() != field {
                return Err(Error::MixedFields(format!("{} in a {field} span", m.field())));
            }
            if m.rows() != n || m.cols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "{}x{} matrix in M_{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Self::from_vectors(field, n, mats.iter().map(ExactMatrix::vectorize).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Matrix side `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.n * self.n - self.dim()
    }

    pub fn is_full(&self) -> bool {
        self.codim() == 0
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn basis(&self) -> Vec<ExactMatrix> {
        self.basis
            .iter()
            .map(|v| ExactMatrix::from_vector(&self.field, self.n, v.clone()).unwrap())
            .collect()
    }

    /// `Σ coords[i] · basis[i]`.
    pub fn element(&self, coords: &[Scalar]) -> ExactMatrix {
        assert_eq!(coords.len(), self.dim());
        let f = &self.field;
        let mut v = vec![f.zero(); self.n * self.n];
        for (c, b) in coords.iter().zip(&self.basis) {
            if f.is_zero(c) {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                *x = f.add(x, &f.mul(c, y));
            }
        }
        ExactMatrix::from_vector(f, self.n, v).unwrap()
    }

    fn check_matrix(&self, a: &ExactMatrix) -> Result<()> {
        if a.field() != &self.field {
            return Err(Error::MixedFields(format!("{} vs {}", a.field(), self.field)));
        }
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix tested against M_{}",
                a.rows(),
                a.cols(),
                self.n
            )));
        }
        Ok(())
    }

    /// Basis coordinates of `a`, or `None` when `a ∉ S`.
    ///
    /// With a reduced echelon basis the coordinate of `basis[i]` is the entry of
    /// `a` at `pivots[i]`; membership is then a residual check.
    pub fn coordinates(&self, a: &ExactMatrix) -> Result<Option<Vec<Scalar>>> {
        self.check_matrix(a)?;
        let v = a.entries();
        let coords: Vec<Scalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let rebuilt = self.element(&coords);
        Ok((rebuilt.entries() == v).then_some(coords))
    }

    pub fn contains(&self, a: &ExactMatrix) -> Result<bool> {
        Ok(self.coordinates(a)?.is_some())
    }

    pub fn is_subspace_of(&self, other: &MatSubspace) -> Result<bool> {
        self.check_compatible(other)?;
        for b in self.basis() {
            if !other.contains(&b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_compatible(&self, other: &MatSubspace) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedFields(format!("{} vs {}", self.field, other.field)));
        }
        if self.n != other.n {
            return Err(Error::ShapeMismatch(format!("M_{} vs M_{}", self.n, other.n)));
        }
        Ok(())
    }

    /// `{b : Tr(b·x) = 0 for all x ∈ S}`.
    ///
    /// `Tr(b·x) = Σ b_ij x_ji`, i.e. the dot product of `vec(b)` with `vec(xᵀ)`.
    pub fn trace_orthogonal(&self) -> MatSubspace {
        let rows: Vec<Vec<Scalar>> = self
            .basis()
            .iter()
            .map(|x| x.transpose().vectorize())
            .collect();
        let ns = null_space(&self.field, &rows, self.n * self.n);
        Self::from_vectors(&self.field, self.n, ns).unwrap()
    }

    pub fn sum(&self, other: &MatSubspace) -> Result<MatSubspace> {
        self.check_compatible(other)?;
        let vecs = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::from_vectors(&self.field, self.n, vecs)
    }

    /// `S + F·w`.
    pub fn extend(&self, w: &ExactMatrix) -> Result<MatSubspace> {
        self.check_matrix(w)?;
        let mut vecs = self.basis.clone();
        vecs.push(w.vectorize());
        Self::from_vectors(&self.field, self.n, vecs)
    }

    /// Intersection via the kernel of `(α, β) ↦ Σ αᵢ sᵢ − Σ βⱼ tⱼ`.
    pub fn intersect(&self, other: &MatSubspace) -> Result<MatSubspace> {
        self.check_compatible(other)?;
        let f = &self.field;
        let d1 = self.dim();
        let d2 = other.dim();
        let big = self.n * self.n;
        // Columns are the generators; rows are coordinates of F^(n²).
        let rows: Vec<Vec<Scalar>> = (0..big)
            .map(|c| {
                self.basis
                    .iter()
                    .map(|s| s[c].clone())
                    .chain(other.basis.iter().map(|t| f.neg(&t[c])))
                    .collect()
            })
            .collect();
        let kernel = null_space(f, &rows, d1 + d2);
        let vecs = kernel
            .into_iter()
            .map(|k| self.element(&k[..d1]).vectorize())
            .collect();
        Self::from_vectors(f, self.n, vecs)
    }

    /// One representative `w` per line of the quotient `M_n / S`.
    ///
    /// The unit matrices at the non-pivot coordinates span a complement of `S`;
    /// the directions are the normalized vectors of that complement (first nonzero
    /// coefficient 1) in lexicographic order of their coefficient indices.
    pub fn extension_directions(&self) -> Result<ExtensionDirections> {
        let q = self.field.require_finite("extension_directions")?;
        if self.is_full() {
            return Err(Error::ImproperSubspace);
        }
        let free: Vec<usize> = (0..self.n * self.n)
            .filter(|c| !self.pivots.contains(c))
            .collect();
        Ok(ExtensionDirections {
            field: self.field.clone(),
            n: self.n,
            free,
            q,
            lead: 0,
            tail: Vec::new(),
            started: false,
        })
    }

    /// Number of lines in the quotient, `(q^c − 1)/(q − 1)`.
    pub fn extension_direction_count(&self) -> Option<u128> {
        let q = self.field.order()? as u128;
        let c = self.codim() as u32;
        Some((q.pow(c) - 1) / (q - 1))
    }
}

/// Iterator over quotient-line representatives; see
/// [`MatSubspace::extension_directions`].
pub struct ExtensionDirections {
    field: Field,
    n: usize,
    free: Vec<usize>,
    q: u64,
    lead: usize,
    /// Coefficient indices after the leading 1.
    tail: Vec<u64>,
    started: bool,
}

impl Iterator for ExtensionDirections {
    type Item = ExactMatrix;

    fn next(&mut self) -> Option<ExactMatrix> {
        let m = self.free.len();
        if !self.started {
            self.started = true;
            self.lead = 0;
            self.tail = vec![0; m - 1];
        } else {
            // Odometer on the tail, last coordinate fastest.
            let mut i = self.tail.len();
            loop {
                if i == 0 {
                    self.lead += 1;
                    if self.lead >= m {
                        return None;
                    }
                    self.tail = vec![0; m - 1 - self.lead];
                    break;
                }
                i -= 1;
                self.tail[i] += 1;
                if self.tail[i] < self.q {
                    break;
                }
                self.tail[i] = 0;
            }
        }
        let f = &self.field;
        let mut v = vec![f.zero(); self.n * self.n];
        v[self.free[self.lead]] = f.one();
        for (k, &c) in self.tail.iter().enumerate() {
            v[self.free[self.lead + 1 + k]] = f.element(c);
        }
        Some(ExactMatrix::from_vector(f, self.n, v).unwrap())
    }
}

impl fmt::Debug for MatSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatSubspace")
            .field("field", &self.field)
            .field("n", &self.n)
            .field("basis", &self.basis())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn e(field: &Field, n: usize, i: usize, j: usize) -> ExactMatrix {
        ExactMatrix::unit(field, n, i, j)
    }

    #[test]
    fn span_examples() {
        let f5 = f(5);
        let s = MatSubspace::span_of(&f5, 2, &[e(&f5, 2, 0, 0), e(&f5, 2, 0, 0).scale(&f5.from_int(3))])
            .unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(MatSubspace::span_of(&f5, 2, &[]).unwrap().dim(), 0);

        let f3 = f(3);
        let gens = [
            e(&f3, 2, 0, 1),
            e(&f3, 2, 1, 0),
            &e(&f3, 2, 0, 0) - &e(&f3, 2, 1, 1),
            ExactMatrix::identity(&f3, 2),
        ];
        let s = MatSubspace::span_of(&f3, 2, &gens).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s, MatSubspace::full(&f3, 2));
    }

    #[test]
    fn span_errors() {
        let f5 = f(5);
        let f3 = f(3);
        assert!(matches!(
            MatSubspace::span_of(&f5, 2, &[e(&f3, 2, 0, 0)]),
            Err(Error::MixedFields(_))
        ));
        assert!(matches!(
            MatSubspace::span_of(&f5, 2, &[e(&f5, 3, 0, 0)]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn contains_examples() {
        let f5 = f(5);
        let h = MatSubspace::span_of(&f5, 2, &[ExactMatrix::identity(&f5, 2)])
            .unwrap()
            .trace_orthogonal();
        assert!(h.contains(&e(&f5, 2, 0, 1)).unwrap());
        assert!(!h.contains(&e(&f5, 2, 0, 0)).unwrap());
        let z = MatSubspace::zero(&f5, 2);
        assert!(z.contains(&ExactMatrix::zeros(&f5, 2, 2)).unwrap());
    }

    #[test]
    fn orthogonal_of_identity() {
        let f5 = f(5);
        let h = MatSubspace::span_of(&f5, 2, &[ExactMatrix::identity(&f5, 2)])
            .unwrap()
            .trace_orthogonal();
        assert_eq!(h.dim(), 3);
        for b in h.basis() {
            assert!(f5.is_zero(&b.trace().unwrap()));
        }
        let f2 = f(2);
        let h2 = MatSubspace::span_of(&f2, 2, &[ExactMatrix::identity(&f2, 2)])
            .unwrap()
            .trace_orthogonal();
        assert!(h2.contains(&ExactMatrix::identity(&f2, 2)).unwrap());
        assert_eq!(MatSubspace::zero(&f5, 3).trace_orthogonal(), MatSubspace::full(&f5, 3));
    }

    #[test]
    fn sum_and_intersection() {
        let f3 = f(3);
        let a = MatSubspace::span_of(&f3, 2, &[e(&f3, 2, 0, 0), e(&f3, 2, 0, 1)]).unwrap();
        let b = MatSubspace::span_of(&f3, 2, &[e(&f3, 2, 0, 1), e(&f3, 2, 1, 0)]).unwrap();
        let i = a.intersect(&b).unwrap();
        assert_eq!(i, MatSubspace::span_of(&f3, 2, &[e(&f3, 2, 0, 1)]).unwrap());
        assert_eq!(a.sum(&b).unwrap().dim() + i.dim(), a.dim() + b.dim());

        let z = MatSubspace::zero(&f3, 2);
        assert_eq!(a.sum(&z).unwrap(), a);
        let c = MatSubspace::span_of(&f3, 2, &[e(&f3, 2, 0, 0)]).unwrap();
        let d = MatSubspace::span_of(&f3, 2, &[e(&f3, 2, 1, 1)]).unwrap();
        assert_eq!(c.intersect(&d).unwrap().dim(), 0);
    }

    #[test]
    fn direction_counts() {
        let f5 = f(5);
        let h = MatSubspace::span_of(&f5, 2, &[ExactMatrix::identity(&f5, 2)])
            .unwrap()
            .trace_orthogonal();
        assert_eq!(h.extension_directions().unwrap().count(), 1);
        let plane = MatSubspace::span_of(&f5, 2, &[e(&f5, 2, 0, 0), e(&f5, 2, 1, 1)]).unwrap();
        assert_eq!(plane.extension_directions().unwrap().count(), 6);
        let f7 = f(7);
        let line = MatSubspace::span_of(&f7, 2, &[e(&f7, 2, 0, 1)]).unwrap();
        assert_eq!(line.extension_directions().unwrap().count(), 57);
        assert_eq!(line.extension_direction_count(), Some(57));
    }

    #[test]
    fn direction_errors() {
        let f3 = f(3);
        assert!(matches!(
            MatSubspace::full(&f3, 2).extension_directions(),
            Err(Error::ImproperSubspace)
        ));
        let q = Field::rationals();
        assert!(matches!(
            MatSubspace::zero(&q, 2).extension_directions(),
            Err(Error::UnsupportedField(_))
        ));
    }

    #[test]
    fn directions_give_distinct_extensions() {
        let f3 = f(3);
        let s = MatSubspace::span_of(&f3, 2, &[e(&f3, 2, 0, 1)]).unwrap();
        let exts: HashSet<MatSubspace> = s
            .extension_directions()
            .unwrap()
            .map(|w| s.extend(&w).unwrap())
            .collect();
        assert_eq!(exts.len(), 13);
    }
}
