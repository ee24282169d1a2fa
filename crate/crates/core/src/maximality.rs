//! Explicit idempotent witnesses for one-step extensions of two-block family
//! members, and maximality certificates assembled from them.
//!
//! For `V` in the family and `w ∉ V` the engine produces a nonzero idempotent
//! `Q` and a scalar `c` with `Q − c·w ∈ V`, so `V + F·w` is not an MS.

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::algebra::{ExactMatrix, Field, Scalar};
use crate::constructions::{Construction, TwoBlockFamily};
use crate::error::{Error, Result};
use crate::literal::{matrix_to_value, scalar_to_literal};
use crate::mscore::{DirectionEvidence, ExtensionOutcome, MaximalityVerdict, MsStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WitnessCase {
    /// `w` reduces into the centralizer; `Q = I`.
    Central,
    /// Reduced `w` has `w_0 ∈ Λ^⊥` and `w_1 ≠ 0`.
    Case1,
    /// As `Case1` with `w_1 = 0`, run on the transposed configuration.
    Case1Transposed,
    /// Reduced `w` has `w_0 ∉ Λ^⊥`.
    Case2,
}

/// A self-verified idempotent in `V + F·w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessBundle {
    pub direction: ExactMatrix,
    /// `w` minus its `e_1 M e_3` and `e_3 M e_2` components split as
    /// `w_0 + w_1 + w_2` with `w_0 ∈ Z`, `w_1 ∈ e_3 M e_1`, `w_2 ∈ e_2 M e_3`.
    pub w0: ExactMatrix,
    pub w1: ExactMatrix,
    pub w2: ExactMatrix,
    pub case: WitnessCase,
    /// `Q − coefficient·w ∈ V`.
    pub coefficient: Scalar,
    pub beta: Option<Scalar>,
    /// Rank of the block the inner inverse was taken of.
    pub rank: Option<usize>,
    /// Inner inverse partner: `w_1 v w_1 = w_1`, `v w_1 v = v` (with `w_2` in
    /// place of `w_1` for the transposed case).
    pub v: Option<ExactMatrix>,
    pub alpha: Option<Scalar>,
    pub x0: Option<ExactMatrix>,
    pub q: ExactMatrix,
}

impl WitnessBundle {
    fn field(&self) -> &Field {
        self.q.field()
    }

    pub fn to_json(&self) -> Value {
        let f = self.field();
        let s = |x: &Option<Scalar>| x.as_ref().map(|x| scalar_to_literal(f, x));
        let m = |x: &Option<ExactMatrix>| x.as_ref().map(matrix_to_value);
        json!({
            "direction": matrix_to_value(&self.direction),
            "w0": matrix_to_value(&self.w0),
            "w1": matrix_to_value(&self.w1),
            "w2": matrix_to_value(&self.w2),
            "case": self.case,
            "coefficient": scalar_to_literal(f, &self.coefficient),
            "beta": s(&self.beta),
            "rank": self.rank,
            "v": m(&self.v),
            "alpha": s(&self.alpha),
            "x0": m(&self.x0),
            "q": matrix_to_value(&self.q),
        })
    }

    /// Re-check every contract of the bundle against `family`.
    pub fn verify(&self, family: &TwoBlockFamily) -> Result<()> {
        let fail = |what: &str| Err(Error::InternalContractViolation(format!("{:?}: {what}", self.case)));
        let f = family.field();
        let q = &self.q;
        if q.is_zero() || !q.is_idempotent() {
            return fail("Q is not a nonzero idempotent");
        }
        if !family.subspace.contains(&(q - &self.direction.scale(&self.coefficient)))? {
            return fail("Q - c*w is not in V");
        }
        if &(&self.w0 + &self.w1) + &self.w2 != reduce(family, &self.direction) {
            return fail("decomposition does not reassemble the reduced direction");
        }
        let lambda = &family.lambda;
        let n3 = f.from_int(family.ranks[2] as i64);
        match self.case {
            WitnessCase::Central => {
                if !self.w1.is_zero() || !self.w2.is_zero() || q != &ExactMatrix::identity(f, family.n()) {
                    return fail("central branch shape");
                }
            }
            WitnessCase::Case1 | WitnessCase::Case1Transposed => {
                let (Some(beta), Some(r), Some(v)) = (&self.beta, self.rank, &self.v) else {
                    return fail("missing Case 1 parameters");
                };
                let partner = if self.case == WitnessCase::Case1 { &self.w1 } else { &self.w2 };
                if &(&(partner * v) * partner) != partner || &(&(v * partner) * v) != v {
                    return fail("inner inverse identities");
                }
                if !(v * partner).is_idempotent() || !(partner * v).is_idempotent() {
                    return fail("v*w and w*v are not idempotent");
                }
                let one_plus = f.add(&f.one(), beta);
                if f.is_zero(&one_plus) {
                    return fail("beta = -1");
                }
                if self.coefficient != f.inv(&one_plus)? {
                    return fail("coefficient is not (1 + beta)^-1");
                }
                // Tr(ΛQ) = σ_2 n_3 + (σ_1 − σ_2)·β·r/(β + 1)
                let law = f.add(
                    &f.mul(&family.sigma2, &n3),
                    &f.div(
                        &f.mul(
                            &f.mul(&f.sub(&family.sigma1, &family.sigma2), beta),
                            &f.from_int(r as i64),
                        ),
                        &one_plus,
                    )?,
                );
                if (lambda * q).trace()? != law {
                    return fail("trace law for Tr(ΛQ)");
                }
                let w_tilde = &self.w1 + &self.w2;
                if !f.is_zero(&(lambda * &(q - &w_tilde.scale(&self.coefficient))).trace()?) {
                    return fail("Tr(Λ(Q - c*w)) != 0");
                }
                if q.trace()? != n3 {
                    return fail("Tr(Q) != n_3");
                }
            }
            WitnessCase::Case2 => {
                let (Some(alpha), Some(x0)) = (&self.alpha, &self.x0) else {
                    return fail("missing Case 2 parameters");
                };
                if f.is_zero(alpha) || &self.coefficient != alpha {
                    return fail("alpha is zero or not the coefficient");
                }
                let z_part = centralizer_part(family, x0);
                if &z_part != x0 || !f.is_zero(&(lambda * x0).trace()?) {
                    return fail("x_0 is not in Λ^⊥ ∩ Z");
                }
                if &(&self.w0.scale(alpha) + x0) != &family.e3 {
                    return fail("alpha*w_0 + x_0 != e_3");
                }
                if !family.subspace.contains(&(&self.w2 * &self.w1))? {
                    return fail("w_2 w_1 is not in V");
                }
            }
        }
        Ok(())
    }
}

impl Serialize for WitnessBundle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// `w − e_1 w e_3 − e_3 w e_2`.
fn reduce(family: &TwoBlockFamily, w: &ExactMatrix) -> ExactMatrix {
    let a = &(&family.e1 * w) * &family.e3;
    let b = &(&family.e3 * w) * &family.e2;
    &(w - &a) - &b
}

/// Component in `Z = (e_1+e_2) M (e_1+e_2) ⊕ e_3 M e_3`.
fn centralizer_part(family: &TwoBlockFamily, w: &ExactMatrix) -> ExactMatrix {
    let e12 = &family.e1 + &family.e2;
    &(&(&e12 * w) * &e12) + &(&(&family.e3 * w) * &family.e3)
}

/// Produce a verified nonzero idempotent in `V + F·w`.
pub fn maximality_witness(family: &TwoBlockFamily, w: &ExactMatrix) -> Result<WitnessBundle> {
    if family.subspace.contains(w)? {
        return Err(Error::DirectionInV);
    }
    let bundle = witness_unchecked(family, w)?;
    bundle.verify(family)?;
    Ok(bundle)
}

fn witness_unchecked(family: &TwoBlockFamily, w: &ExactMatrix) -> Result<WitnessBundle> {
    let f = family.field().clone();
    let n = family.n();
    let reduced = reduce(family, w);
    let w0 = centralizer_part(family, &reduced);
    let w1 = &(&family.e3 * &reduced) * &family.e1;
    let w2 = &(&family.e2 * &reduced) * &family.e3;
    let lambda = &family.lambda;
    let n3 = f.from_int(family.ranks[2] as i64);
    let base = WitnessBundle {
        direction: w.clone(),
        w0: w0.clone(),
        w1: w1.clone(),
        w2: w2.clone(),
        case: WitnessCase::Central,
        coefficient: f.zero(),
        beta: None,
        rank: None,
        v: None,
        alpha: None,
        x0: None,
        q: ExactMatrix::identity(&f, n),
    };
    let tr_w0 = (lambda * &w0).trace()?;

    if w1.is_zero() && w2.is_zero() {
        // I − γ·w_0 ∈ Z ∩ Λ^⊥ for γ = Tr(Λ)/Tr(Λw_0)
        if f.is_zero(&tr_w0) {
            return Err(Error::InternalContractViolation("central direction lies in V".into()));
        }
        let gamma = f.div(&lambda.trace()?, &tr_w0)?;
        return Ok(WitnessBundle {
            coefficient: gamma,
            ..base
        });
    }

    if f.is_zero(&tr_w0) {
        if w1.is_zero() {
            let t = family.transpose()?;
            let inner = witness_unchecked(&t, &w.transpose())?;
            debug_assert_eq!(inner.case, WitnessCase::Case1);
            return Ok(WitnessBundle {
                case: WitnessCase::Case1Transposed,
                coefficient: inner.coefficient,
                beta: inner.beta,
                rank: inner.rank,
                v: inner.v.map(|v| v.transpose()),
                q: inner.q.transpose(),
                ..base
            });
        }
        let fac = w1.rank_factorization();
        let r = fac.rank;
        let v = &(&family.e1 * &fac.inner_inverse) * &family.e3;
        let denom = f.add(
            &f.mul(&f.from_int(r as i64), &family.sigma1),
            &f.mul(&f.from_int(family.ranks[2] as i64 - r as i64), &family.sigma2),
        );
        let beta = f.neg(&f.div(&f.mul(&family.sigma2, &n3), &denom)?);
        let one_plus = f.add(&f.one(), &beta);
        let inv = f.inv(&one_plus)?;
        let e3 = &family.e3;
        let left = &(e3 + &w2) + &v.scale(&beta);
        let right = e3 + &w1;
        let tail = (e3 - &(&w1 * &v)).scale(&beta);
        let q = (&(&left * &right) + &tail).scale(&inv);
        return Ok(WitnessBundle {
            case: WitnessCase::Case1,
            coefficient: inv,
            beta: Some(beta),
            rank: Some(r),
            v: Some(v),
            q,
            ..base
        });
    }

    // α·w_0 + x_0 = e_3 with x_0 ∈ Λ^⊥ ∩ Z: pairing with Λ forces α = σ_2 n_3 / Tr(Λw_0).
    let alpha = f.div(&f.mul(&family.sigma2, &n3), &tr_w0)?;
    let x0 = &family.e3 - &w0.scale(&alpha);
    let q = &(&(&family.e3 + &w1.scale(&alpha)) + &w2.scale(&alpha)) + &(&w2 * &w1).scale(&f.mul(&alpha, &alpha));
    Ok(WitnessBundle {
        case: WitnessCase::Case2,
        coefficient: alpha.clone(),
        alpha: Some(alpha),
        x0: Some(x0),
        q,
        ..base
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertificationMode {
    /// Every output of `extension_directions` (finite fields).
    Exhaustive,
    /// A complement basis plus all pairwise sums (any field).
    SpotCheck,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CaseCounts {
    pub central: usize,
    pub case1: usize,
    pub case1_transposed: usize,
    pub case2: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalityCertificate {
    pub mode: CertificationMode,
    pub label: &'static str,
    pub directions: usize,
    pub cases: CaseCounts,
    pub bundles: Vec<WitnessBundle>,
}

impl MaximalityCertificate {
    /// The equivalent brute-force style verdict.
    pub fn verdict(&self) -> MaximalityVerdict {
        MaximalityVerdict {
            is_maximal: true,
            status: MsStatus::MsProper,
            evidence: self
                .bundles
                .iter()
                .map(|b| DirectionEvidence {
                    direction: b.direction.clone(),
                    outcome: ExtensionOutcome::Idempotent(b.q.clone()),
                })
                .collect(),
        }
    }
}

/// Directions spanning a complement of `v`, plus their pairwise sums.
fn spot_check_directions(family: &TwoBlockFamily) -> Vec<ExactMatrix> {
    let v = &family.subspace;
    let f = v.field();
    let n = v.n();
    let free: Vec<ExactMatrix> = (0..n * n)
        .filter(|c| !v.pivots().contains(c))
        .map(|c| ExactMatrix::unit(f, n, c / n, c % n))
        .collect();
    let mut out = free.clone();
    for i in 0..free.len() {
        for j in i + 1..free.len() {
            out.push(&free[i] + &free[j]);
        }
    }
    out
}

/// Witness every extension direction of a family member.
pub fn certify_maximal(family: &TwoBlockFamily, mode: CertificationMode, budget: u64) -> Result<MaximalityCertificate> {
    family.certify()?;
    let directions: Vec<ExactMatrix> = match mode {
        CertificationMode::Exhaustive => {
            let count = family
                .subspace
                .extension_direction_count()
                .ok_or_else(|| Error::UnsupportedField("exhaustive certification needs a finite field".into()))?;
            if count > budget as u128 {
                return Err(Error::BudgetExceeded { needed: count, budget });
            }
            family.subspace.extension_directions()?.collect()
        }
        CertificationMode::SpotCheck => spot_check_directions(family),
    };
    let bundles = directions
        .par_iter()
        .map(|w| {
            maximality_witness(family, w).map_err(|e| match e {
                Error::InternalContractViolation(m) => {
                    Error::InternalContractViolation(format!("direction {w:?}: {m}"))
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cases = CaseCounts::default();
    for b in &bundles {
        match b.case {
            WitnessCase::Central => cases.central += 1,
            WitnessCase::Case1 => cases.case1 += 1,
            WitnessCase::Case1Transposed => cases.case1_transposed += 1,
            WitnessCase::Case2 => cases.case2 += 1,
        }
    }
    Ok(MaximalityCertificate {
        mode,
        label: match mode {
            CertificationMode::Exhaustive => "exhaustive",
            CertificationMode::SpotCheck => "theorem-backed spot check",
        },
        directions: bundles.len(),
        cases,
        bundles,
    })
}

/// Recognize a certified construction as a two-block family member.
///
/// Two singleton parts `e_a` (lower `f`) and `e_b` give the member with
/// `e_1 = 0, e_2 = e_a, e_3 = e_b`; a grouped two-part frame is read directly.
/// Anything with more parts is refused.
pub fn family_of(c: &Construction) -> Result<TwoBlockFamily> {
    let g = &c.frame;
    if g.part_count() != 2 {
        return Err(Error::FamilyMismatch(format!(
            "{} parts; the maximality engine needs exactly two",
            g.part_count()
        )));
    }
    let (lo, hi) = if g.f_values[0] < g.f_values[1] { (0, 1) } else { (1, 0) };
    let f = g.frame.field();
    let n = g.frame.n();
    let fam = TwoBlockFamily::from_frame(
        ExactMatrix::zeros(f, n, n),
        g.part_idempotents[lo].clone(),
        g.part_idempotents[hi].clone(),
        c.lambda.sigmas[lo].clone(),
        c.lambda.sigmas[hi].clone(),
    )?;
    if fam.subspace != c.subspace {
        return Err(Error::FamilyMismatch("subspace is not the two-block member of its frame".into()));
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{block_triangular, corner_family};
    use crate::mscore::{is_maximal_ms, DEFAULT_BUDGET};

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn corner() -> TwoBlockFamily {
        let f = f5();
        corner_family(2, 1, f.one(), f.from_int(2), &f).unwrap()
    }

    #[test]
    fn case1_example() {
        let fam = corner();
        let f = f5();
        let b = maximality_witness(&fam, &ExactMatrix::unit(&f, 2, 1, 0)).unwrap();
        assert_eq!(b.case, WitnessCase::Case1);
        assert_eq!(b.v, Some(ExactMatrix::unit(&f, 2, 0, 1)));
        assert_eq!(b.beta, Some(f.from_int(3)));
        assert_eq!(b.q, ExactMatrix::from_ints(&f, &[[2, 2], [4, 4]]));
        assert_eq!(b.coefficient, f.from_int(4));
    }

    #[test]
    fn central_example() {
        let fam = corner();
        let f = f5();
        let b = maximality_witness(&fam, &ExactMatrix::unit(&f, 2, 1, 1)).unwrap();
        assert_eq!(b.case, WitnessCase::Central);
        assert_eq!(b.q, ExactMatrix::identity(&f, 2));
        assert_eq!(b.coefficient, f.from_int(4));
    }

    #[test]
    fn case2_example() {
        let fam = corner();
        let f = f5();
        let w = ExactMatrix::from_ints(&f, &[[0, 0], [1, 1]]);
        let b = maximality_witness(&fam, &w).unwrap();
        assert_eq!(b.case, WitnessCase::Case2);
        assert_eq!(b.alpha, Some(f.one()));
        assert!(b.x0.as_ref().unwrap().is_zero());
        assert_eq!(b.q, w);
    }

    #[test]
    fn direction_in_v_is_rejected() {
        let fam = corner();
        let f = f5();
        assert!(matches!(
            maximality_witness(&fam, &ExactMatrix::unit(&f, 2, 0, 1)),
            Err(Error::DirectionInV)
        ));
    }

    #[test]
    fn exhaustive_corner_agrees_with_brute_force() {
        let fam = corner();
        let cert = certify_maximal(&fam, CertificationMode::Exhaustive, DEFAULT_BUDGET).unwrap();
        assert_eq!(cert.directions, 6);
        assert!(is_maximal_ms(&fam.subspace, DEFAULT_BUDGET).unwrap().is_maximal);
    }

    #[test]
    fn three_block_family_hits_every_case() {
        let f7 = Field::prime(7).unwrap();
        let fam = TwoBlockFamily::standard(1, 1, 1, f7.one(), f7.from_int(2), &f7).unwrap();
        let cert = certify_maximal(&fam, CertificationMode::Exhaustive, DEFAULT_BUDGET).unwrap();
        assert_eq!(cert.directions, 57);
        assert!(cert.cases.central > 0);
        assert!(cert.cases.case1 > 0);
        assert!(cert.cases.case1_transposed > 0);
        assert!(cert.cases.case2 > 0);
    }

    #[test]
    fn spot_check_over_rationals() {
        let q = Field::rationals();
        let fam = TwoBlockFamily::standard(1, 1, 2, q.one(), q.from_int(3), &q).unwrap();
        let cert = certify_maximal(&fam, CertificationMode::SpotCheck, DEFAULT_BUDGET).unwrap();
        let k = fam.subspace.codim();
        assert_eq!(cert.directions, k + k * (k - 1) / 2);
        assert_eq!(cert.label, "theorem-backed spot check");
    }

    #[test]
    fn family_guard() {
        let f7 = Field::prime(7).unwrap();
        let ints = |xs: &[i64]| xs.iter().map(|&x| f7.from_int(x)).collect::<Vec<_>>();
        let c3 = block_triangular(&[1, 1, 1], &ints(&[1, 2, 3]), &f7).unwrap();
        assert!(matches!(family_of(&c3), Err(Error::FamilyMismatch(_))));
        let c2 = block_triangular(&[1, 2], &ints(&[1, 2]), &f7).unwrap();
        let fam = family_of(&c2).unwrap();
        certify_maximal(&fam, CertificationMode::Exhaustive, DEFAULT_BUDGET).unwrap();
    }
}
