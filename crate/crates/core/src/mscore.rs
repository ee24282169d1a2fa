//! MS verdicts: the idempotent criterion, a literal brute-force checker of the
//! defining property, the trace-zero hyperplane, and maximality by exhaustive
//! extension.
//!
//! A proper subspace of `M_n(F)` is an MS iff it contains no nonzero idempotent.
//! [`ms_by_definition`] decides the same question without using that fact, which
//! is what makes the two usable as oracles for each other.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{ExactMatrix, Field};
use crate::error::Result;
use crate::scan::{self, PackedSpace};
use crate::subspace::MatSubspace;

/// Default cap on the number of elements an exhaustive scan may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MsStatus {
    #[serde(rename = "MS_Proper")]
    MsProper,
    #[serde(rename = "MS_FullAlgebra")]
    MsFullAlgebra,
    #[serde(rename = "NotMS")]
    NotMs,
}

impl MsStatus {
    pub fn is_ms(self) -> bool {
        self != MsStatus::NotMs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    IdempotentScan,
    DefinitionBruteForce,
    StructuralCertificate,
}

/// A failing instance of the defining property: all powers of `a` lie in `V`
/// but `b·a^exponent·c ∉ V` for an `exponent` on the eventual cycle of `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefinitionCounterexample {
    pub a: ExactMatrix,
    pub b: ExactMatrix,
    pub c: ExactMatrix,
    pub exponent: usize,
    pub preperiod: usize,
    pub period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MsVerdict {
    pub status: MsStatus,
    /// Nonzero idempotent in `V`; present iff `status == NotMs`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExactMatrix>,
    pub method: Method,
    pub evidence: Vec<DefinitionCounterexample>,
}

impl MsVerdict {
    fn ms(status: MsStatus, method: Method) -> Self {
        MsVerdict {
            status,
            witness: None,
            method,
            evidence: Vec::new(),
        }
    }

    /// Re-check the witness against `v`: `e² = e`, `e ≠ 0`, `e ∈ v`.
    pub fn verify_witness(&self, v: &MatSubspace) -> Result<bool> {
        match (&self.status, &self.witness) {
            (MsStatus::NotMs, Some(e)) => {
                Ok(e.is_idempotent() && !e.is_zero() && v.contains(e)?)
            }
            (MsStatus::NotMs, None) => Ok(false),
            (_, w) => Ok(w.is_none()),
        }
    }
}

/// What adding one direction to a subspace produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "idempotent")]
pub enum ExtensionOutcome {
    /// `V + F·w` contains this nonzero idempotent.
    Idempotent(ExactMatrix),
    /// `V + F·w` is the whole algebra.
    FullAlgebra,
    /// `V + F·w` is a proper idempotent-free subspace: `V` is not maximal.
    IdempotentFree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectionEvidence {
    pub direction: ExactMatrix,
    pub outcome: ExtensionOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalityVerdict {
    pub is_maximal: bool,
    /// The MS verdict of `V` itself.
    pub status: MsStatus,
    /// Ordered as `extension_directions`; stops at the first idempotent-free
    /// extension when `V` is not maximal.
    pub evidence: Vec<DirectionEvidence>,
}

/// First nonzero idempotent of `s` in lexicographic coefficient order, or `None`.
pub fn find_idempotent(s: &MatSubspace, budget: u64) -> Result<Option<ExactMatrix>> {
    let packed = PackedSpace::new(s)?;
    scan::check_budget(scan::count(packed.q, s.dim()), budget)?;
    Ok(packed
        .find_element(|x| packed.is_idempotent(x))
        .map(|e| scan::unpack(s.field(), s.n(), &e)))
}

/// Verdict from the idempotent criterion.
pub fn ms_by_idempotent_criterion(s: &MatSubspace, budget: u64) -> Result<MsVerdict> {
    if s.is_full() {
        return Ok(MsVerdict::ms(MsStatus::MsFullAlgebra, Method::IdempotentScan));
    }
    Ok(match find_idempotent(s, budget)? {
        None => MsVerdict::ms(MsStatus::MsProper, Method::IdempotentScan),
        Some(e) => MsVerdict {
            status: MsStatus::NotMs,
            witness: Some(e),
            method: Method::IdempotentScan,
            evidence: Vec::new(),
        },
    })
}

/// Verdict for a subspace over any field from an explicitly supplied candidate.
///
/// Over infinite fields no exhaustive scan exists, so this only ever refutes:
/// it returns `NotMs` when `candidate` is a nonzero idempotent in `s`, and `None`
/// otherwise.
pub fn refute_with_candidate(s: &MatSubspace, candidate: &ExactMatrix) -> Result<Option<MsVerdict>> {
    if candidate.is_idempotent() && !candidate.is_zero() && s.contains(candidate)? && !s.is_full() {
        return Ok(Some(MsVerdict {
            status: MsStatus::NotMs,
            witness: Some(candidate.clone()),
            method: Method::IdempotentScan,
            evidence: Vec::new(),
        }));
    }
    Ok(None)
}

/// Literal brute force of the defining property over a finite field.
///
/// `a` qualifies iff `a^m ∈ V` for every `m ≥ 1`; by eventual periodicity it is
/// enough to check `m < preperiod + period`. For a qualifying `a`, the required
/// `N` exists iff `b·a^m·c ∈ V` for every `b, c` and every `m` on the cycle.
/// On failure the witness is the idempotent power of `a` on its cycle, which is
/// nonzero (otherwise the cycle is `{0}`) and lies in `V`.
pub fn ms_by_definition(s: &MatSubspace, budget: u64) -> Result<MsVerdict> {
    let field = s.field().clone();
    let packed = PackedSpace::new(s)?;
    let n = s.n();
    let len = n * n;
    scan::check_budget(scan::count(packed.q, 2 * len), budget)?;
    if s.is_full() {
        return Ok(MsVerdict::ms(MsStatus::MsFullAlgebra, Method::DefinitionBruteForce));
    }
    let all: Vec<Vec<u32>> = scan::all_matrices(packed.q, n).collect();
    // cycle element -> failing (b, c), or None when every product stays in V
    let mut cache: HashMap<Vec<u32>, Option<(usize, usize)>> = HashMap::new();
    let mut tmp = vec![0u32; len];
    let mut prod = vec![0u32; len];
    for a_vec in &all {
        let a = scan::unpack(&field, n, a_vec);
        let tail = a.power_tail()?;
        let mut power = a.clone();
        let mut qualifies = true;
        for m in 1..tail.preperiod + tail.period {
            if m > 1 {
                power = &power * &a;
            }
            if !packed.contains(&scan::pack(&power)) {
                qualifies = false;
                break;
            }
        }
        if !qualifies {
            continue;
        }
        for (i, x) in tail.cycle.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let xv = scan::pack(x);
            let failure = *cache.entry(xv.clone()).or_insert_with(|| {
                for (bi, b) in all.iter().enumerate() {
                    packed.mul_into(b, &xv, &mut tmp);
                    for (ci, c) in all.iter().enumerate() {
                        packed.mul_into(&tmp, c, &mut prod);
                        if !packed.contains(&prod) {
                            return Some((bi, ci));
                        }
                    }
                }
                None
            });
            if let Some((bi, ci)) = failure {
                return Ok(MsVerdict {
                    status: MsStatus::NotMs,
                    witness: Some(tail.cycle_idempotent().clone()),
                    method: Method::DefinitionBruteForce,
                    evidence: vec![DefinitionCounterexample {
                        a,
                        b: scan::unpack(&field, n, &all[bi]),
                        c: scan::unpack(&field, n, &all[ci]),
                        exponent: tail.exponent(i),
                        preperiod: tail.preperiod,
                        period: tail.period,
                    }],
                });
            }
        }
    }
    Ok(MsVerdict::ms(MsStatus::MsProper, Method::DefinitionBruteForce))
}

/// `H = I_n^⊥`, the trace-zero matrices.
pub fn trace_zero_space(n: usize, field: &Field) -> MatSubspace {
    MatSubspace::span_of(field, n, &[ExactMatrix::identity(field, n)])
        .expect("identity spans a line")
        .trace_orthogonal()
}

/// Maximality among proper MSs, by checking every one-step extension.
pub fn is_maximal_ms(s: &MatSubspace, budget: u64) -> Result<MaximalityVerdict> {
    let verdict = ms_by_idempotent_criterion(s, budget)?;
    if verdict.status != MsStatus::MsProper {
        return Ok(MaximalityVerdict {
            is_maximal: false,
            status: verdict.status,
            evidence: Vec::new(),
        });
    }
    let mut evidence = Vec::new();
    for w in s.extension_directions()? {
        let ext = s.extend(&w)?;
        let outcome = if ext.is_full() {
            ExtensionOutcome::FullAlgebra
        } else {
            match find_idempotent(&ext, budget)? {
                Some(e) => ExtensionOutcome::Idempotent(e),
                None => ExtensionOutcome::IdempotentFree,
            }
        };
        let escaped = outcome == ExtensionOutcome::IdempotentFree;
        evidence.push(DirectionEvidence {
            direction: w,
            outcome,
        });
        if escaped {
            return Ok(MaximalityVerdict {
                is_maximal: false,
                status: verdict.status,
                evidence,
            });
        }
    }
    Ok(MaximalityVerdict {
        is_maximal: true,
        status: verdict.status,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn e(field: &Field, i: usize, j: usize) -> ExactMatrix {
        ExactMatrix::unit(field, 2, i, j)
    }

    fn span(field: &Field, mats: &[ExactMatrix]) -> MatSubspace {
        MatSubspace::span_of(field, 2, mats).unwrap()
    }

    #[test]
    fn find_idempotent_examples() {
        let f2 = f(2);
        let s = span(&f2, &[e(&f2, 0, 0)]);
        assert_eq!(find_idempotent(&s, DEFAULT_BUDGET).unwrap(), Some(e(&f2, 0, 0)));

        let f3 = f(3);
        assert_eq!(find_idempotent(&span(&f3, &[e(&f3, 0, 1)]), DEFAULT_BUDGET).unwrap(), None);

        let x = &e(&f2, 0, 0) + &e(&f2, 0, 1);
        assert_eq!(find_idempotent(&span(&f2, &[x.clone()]), DEFAULT_BUDGET).unwrap(), Some(x));
    }

    #[test]
    fn scan_is_lexicographic() {
        // span{E11, E22} over F_3: tuples (0,1) -> E22 comes before (1,0) -> E11
        let f3 = f(3);
        let s = span(&f3, &[e(&f3, 0, 0), e(&f3, 1, 1)]);
        assert_eq!(find_idempotent(&s, DEFAULT_BUDGET).unwrap(), Some(e(&f3, 1, 1)));
    }

    #[test]
    fn scan_budget_and_field_errors() {
        let f5 = f(5);
        let h = trace_zero_space(2, &f5);
        assert!(matches!(
            find_idempotent(&h, 100),
            Err(Error::BudgetExceeded { needed: 125, budget: 100 })
        ));
        let q = Field::rationals();
        assert!(matches!(
            find_idempotent(&trace_zero_space(2, &q), DEFAULT_BUDGET),
            Err(Error::UnsupportedField(_))
        ));
    }

    #[test]
    fn criterion_examples() {
        let f5 = f(5);
        let v = ms_by_idempotent_criterion(&trace_zero_space(2, &f5), DEFAULT_BUDGET).unwrap();
        assert_eq!(v.status, MsStatus::MsProper);

        let f2 = f(2);
        let h2 = trace_zero_space(2, &f2);
        let v = ms_by_idempotent_criterion(&h2, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.status, MsStatus::NotMs);
        assert_eq!(v.witness, Some(ExactMatrix::identity(&f2, 2)));
        assert!(v.verify_witness(&h2).unwrap());

        let f3 = f(3);
        let v = ms_by_idempotent_criterion(&MatSubspace::full(&f3, 2), DEFAULT_BUDGET).unwrap();
        assert_eq!(v.status, MsStatus::MsFullAlgebra);
    }

    #[test]
    fn definition_examples() {
        let f2 = f(2);
        let v = ms_by_definition(&span(&f2, &[e(&f2, 0, 1)]), DEFAULT_BUDGET).unwrap();
        assert_eq!(v.status, MsStatus::MsProper);

        let s = span(&f2, &[e(&f2, 0, 0)]);
        let v = ms_by_definition(&s, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.status, MsStatus::NotMs);
        assert!(v.verify_witness(&s).unwrap());
        let cx = &v.evidence[0];
        let prod = &(&cx.b * &cx.a.pow(cx.exponent as u64)) * &cx.c;
        assert!(!s.contains(&prod).unwrap());

        let f3 = f(3);
        let v = ms_by_definition(&MatSubspace::zero(&f3, 2), DEFAULT_BUDGET).unwrap();
        assert_eq!(v.status, MsStatus::MsProper);
    }

    #[test]
    fn trace_zero_examples() {
        assert_eq!(trace_zero_space(2, &f(5)).dim(), 3);
        assert!(trace_zero_space(2, &f(2))
            .contains(&ExactMatrix::identity(&f(2), 2))
            .unwrap());
        assert_eq!(trace_zero_space(3, &f(7)).dim(), 8);
    }

    #[test]
    fn maximality_examples() {
        let f5 = f(5);
        let v = is_maximal_ms(&trace_zero_space(2, &f5), DEFAULT_BUDGET).unwrap();
        assert!(v.is_maximal);
        assert_eq!(v.evidence.len(), 1);
        assert_eq!(v.evidence[0].outcome, ExtensionOutcome::FullAlgebra);

        let f2 = f(2);
        let v = is_maximal_ms(&span(&f2, &[e(&f2, 0, 1)]), DEFAULT_BUDGET).unwrap();
        assert!(!v.is_maximal);
        assert_eq!(v.evidence.last().unwrap().outcome, ExtensionOutcome::IdempotentFree);

        let v = is_maximal_ms(&MatSubspace::zero(&f5, 2), DEFAULT_BUDGET).unwrap();
        assert!(!v.is_maximal);
    }

    #[test]
    fn not_ms_is_never_maximal() {
        let f2 = f(2);
        let v = is_maximal_ms(&trace_zero_space(2, &f2), DEFAULT_BUDGET).unwrap();
        assert!(!v.is_maximal);
        assert_eq!(v.status, MsStatus::NotMs);
    }

    #[test]
    fn candidate_refutation_over_rationals() {
        let q = Field::rationals();
        let s = span(&q, &[e(&q, 0, 0), e(&q, 0, 1)]);
        let v = refute_with_candidate(&s, &e(&q, 0, 0)).unwrap().unwrap();
        assert_eq!(v.status, MsStatus::NotMs);
        assert!(refute_with_candidate(&s, &e(&q, 0, 1)).unwrap().is_none());
    }
}
