//! Packed `u32` kernels for exhaustive scans over finite fields.

use crate::algebra::field::FiniteArith;
use crate::algebra::matrix::null_space;
use crate::algebra::{ExactMatrix, Field, Scalar};
use crate::error::{Error, Result};
use crate::subspace::MatSubspace;

pub(crate) fn pack(m: &ExactMatrix) -> Vec<u32> {
    m.entries()
        .iter()
        .map(|x| match x {
            Scalar::Finite(v) => *v,
            _ => panic!("packing a matrix over an infinite field"),
        })
        .collect()
}

pub(crate) fn unpack(field: &Field, n: usize, v: &[u32]) -> ExactMatrix {
    ExactMatrix::from_vector(field, n, v.iter().map(|&x| Scalar::Finite(x)).collect()).unwrap()
}

/// `q^e`, saturating into `u128`.
pub(crate) fn count(q: u64, e: usize) -> u128 {
    (q as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}

pub(crate) fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// A subspace of `M_n(F_q)` with packed basis and defining equations.
pub(crate) struct PackedSpace<'a> {
    pub q: u64,
    pub n: usize,
    pub arith: FiniteArith<'a>,
    pub basis: Vec<Vec<u32>>,
    /// Rows `u` of the annihilator: `x ∈ S ⟺ u·x = 0` for all rows.
    pub equations: Vec<Vec<u32>>,
}

impl<'a> PackedSpace<'a> {
    pub fn new(s: &'a MatSubspace) -> Result<Self> {
        let field = s.field();
        let q = field.require_finite("exhaustive scan")?;
        let arith = field.finite_arith().unwrap();
        let n = s.n();
        let basis: Vec<Vec<u32>> = s.basis().iter().map(pack).collect();
        let equations = null_space(field, s.basis_vectors(), n * n)
            .iter()
            .map(|u| {
                u.iter()
                    .map(|x| match x {
                        Scalar::Finite(v) => *v,
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect();
        Ok(PackedSpace {
            q,
            n,
            arith,
            basis,
            equations,
        })
    }

    #[inline]
    pub fn contains(&self, x: &[u32]) -> bool {
        self.equations.iter().all(|u| {
            u.iter()
                .zip(x)
                .fold(0, |acc, (&a, &b)| self.arith.add(acc, self.arith.mul(a, b)))
                == 0
        })
    }

    #[inline]
    pub fn mul_into(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for k in 0..n {
                    acc = self.arith.add(acc, self.arith.mul(a[i * n + k], b[k * n + j]));
                }
                out[i * n + j] = acc;
            }
        }
    }

    #[inline]
    pub fn is_idempotent(&self, x: &[u32]) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for k in 0..n {
                    acc = self.arith.add(acc, self.arith.mul(x[i * n + k], x[k * n + j]));
                }
                if acc != x[i * n + j] {
                    return false;
                }
            }
        }
        true
    }

    /// Visit every nonzero element `Σ cᵢ·bᵢ` with coefficient tuples in
    /// lexicographic order (first coordinate most significant) until `visit`
    /// returns true; returns that element.
    pub fn find_element(&self, mut visit: impl FnMut(&[u32]) -> bool) -> Option<Vec<u32>> {
        let d = self.basis.len();
        if d == 0 {
            return None;
        }
        let len = self.n * self.n;
        // multiples[i][c] = c · basis[i]
        let multiples: Vec<Vec<Vec<u32>>> = self
            .basis
            .iter()
            .map(|b| {
                (0..self.q as u32)
                    .map(|c| b.iter().map(|&x| self.arith.mul(c, x)).collect())
                    .collect()
            })
            .collect();
        let mut coeffs = vec![0u32; d];
        // prefix[i] = Σ_{j < i} multiples[j][coeffs[j]]
        let mut prefix = vec![vec![0u32; len]; d + 1];
        let mut dirty_from = 0;
        loop {
            // advance the odometer (the all-zero tuple is skipped)
            let mut i = d;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                coeffs[i] += 1;
                if (coeffs[i] as u64) < self.q {
                    break;
                }
                coeffs[i] = 0;
            }
            dirty_from = dirty_from.min(i);
            for k in dirty_from..d {
                let (head, tail) = prefix.split_at_mut(k + 1);
                let m = &multiples[k][coeffs[k] as usize];
                for ((out, &a), &b) in tail[0].iter_mut().zip(&head[k]).zip(m) {
                    *out = self.arith.add(a, b);
                }
            }
            dirty_from = d;
            if visit(&prefix[d]) {
                return Some(prefix[d].clone());
            }
        }
    }
}

/// Every matrix of `M_n(F_q)` in index order (entry 0 most significant).
pub(crate) fn all_matrices(q: u64, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let len = n * n;
    let total = count(q, len);
    (0..total).map(move |mut idx| {
        let mut v = vec![0u32; len];
        for slot in v.iter_mut().rev() {
            *slot = (idx % q as u128) as u32;
            idx /= q as u128;
        }
        v
    })
}
