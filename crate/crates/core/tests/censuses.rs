//! Whole-census checks over small prime fields.

use mzspace::census::{debondt_sample, ms_census, oracle_compare_sampled};
use mzspace::classify2::{predicted_maximal, trace_nonzero_report, Clause};
use mzspace::mscore::{is_maximal_ms, DEFAULT_BUDGET};
use mzspace::{Field, MsStatus};

fn prime(p: u64) -> Field {
    Field::prime(p).unwrap()
}

#[test]
fn counts_and_heredity() {
    for p in [2, 3] {
        let r = ms_census(2, &prime(p), false, DEFAULT_BUDGET).unwrap();
        assert!(r.counts_match_gaussian, "F_{p}");
        assert!(r.heredity_holds, "F_{p}");
        assert_eq!(r.dimensions.last().unwrap().subspaces, 1);
        let full = r.entries.last().unwrap();
        assert_eq!(full.status, MsStatus::MsFullAlgebra);
        assert!(!full.maximal);
    }
}

#[test]
fn trace_nonzero_elements_of_ms_are_invertible() {
    for p in [2, 3] {
        let r = ms_census(2, &prime(p), false, DEFAULT_BUDGET).unwrap();
        for s in r.ms().filter(|s| !s.is_full()) {
            let rep = trace_nonzero_report(s, DEFAULT_BUDGET).unwrap();
            assert!(rep.invertibility_holds(), "F_{p}: {s:?}");
        }
    }
}

#[test]
fn maximal_entries_cannot_grow() {
    let r = ms_census(2, &prime(3), false, DEFAULT_BUDGET).unwrap();
    let maximal: Vec<_> = r.maximal().collect();
    assert!(!maximal.is_empty());
    for m in &maximal {
        for other in r.ms().filter(|s| !s.is_full()) {
            if other.dim() > m.dim() {
                assert!(!m.is_subspace_of(other).unwrap());
            }
        }
    }
}

#[test]
fn f3_prediction_for_split_clauses() {
    let r = ms_census(2, &prime(3), true, DEFAULT_BUDGET).unwrap();
    let c = r.classification.unwrap();
    for clause in &c.clauses {
        if clause.clause != Clause::UnipotentLine {
            assert_eq!(clause.maximal, clause.members, "{:?}", clause.clause);
        }
    }
    for e in &c.extras {
        assert!(e.irreducible_witness.is_some());
    }
}

#[test]
fn f2_prediction_is_all_maximal() {
    let f2 = prime(2);
    for p in predicted_maximal(&f2).unwrap() {
        assert!(is_maximal_ms(&p.subspace, DEFAULT_BUDGET).unwrap().is_maximal, "{:?}", p.clause);
    }
}

#[test]
fn reports_are_deterministic() {
    let a = serde_json::to_string(&ms_census(2, &prime(2), true, DEFAULT_BUDGET).unwrap()).unwrap();
    let b = serde_json::to_string(&ms_census(2, &prime(2), true, DEFAULT_BUDGET).unwrap()).unwrap();
    assert_eq!(a, b);
    let s1 = serde_json::to_string(&debondt_sample(&prime(5), 3, 20, 7, DEFAULT_BUDGET).unwrap()).unwrap();
    let s2 = serde_json::to_string(&debondt_sample(&prime(5), 3, 20, 7, DEFAULT_BUDGET).unwrap()).unwrap();
    assert_eq!(s1, s2);
}

#[test]
fn sampled_oracle_agrees_on_3x3() {
    let r = oracle_compare_sampled(3, &prime(2), 30, 3, DEFAULT_BUDGET).unwrap();
    assert!(r.agreement);
    assert_eq!(r.sampling.unwrap().samples, 30);
}

#[test]
fn sampled_oracle_agrees_on_f5() {
    let r = oracle_compare_sampled(2, &prime(5), 500, 5, DEFAULT_BUDGET).unwrap();
    assert!(r.agreement, "{:?}", r.disagreements);
    assert_eq!(r.proper_checked, 500);
}
