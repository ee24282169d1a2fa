//! Exhaustive subspace enumeration over `F_q` and the censuses built on it.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{ExactMatrix, Field, Scalar};
use crate::classify2::{elements_of, predicted_maximal, spectrum_kind, Clause, PredictedFamily, SpectrumKind};
use crate::error::{Error, Result};
use crate::mscore::{find_idempotent, is_maximal_ms, ms_by_definition, ms_by_idempotent_criterion, trace_zero_space, MsStatus};
use crate::scan;
use crate::subspace::MatSubspace;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Number of `k`-dimensional subspaces of `F_q^d`.
pub fn gaussian_binomial(d: usize, k: usize, q: u64) -> u128 {
    if k > d {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((d - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Reduced row-echelon bases of all `k`-dimensional subspaces of `F_q^d`:
/// pivot sets in lexicographic order, then free entries in odometer order.
pub struct EchelonSubspaces {
    field: Field,
    q: u64,
    d: usize,
    k: usize,
    pivots: Option<Vec<usize>>,
    /// `(row, column)` of each free entry for the current pivot set.
    free: Vec<(usize, usize)>,
    values: Vec<u64>,
    fresh: bool,
}

impl EchelonSubspaces {
    fn load_free(&mut self) {
        let p = self.pivots.as_ref().unwrap();
        self.free = p
            .iter()
            .enumerate()
            .flat_map(|(row, &pc)| ((pc + 1)..self.d).filter(|c| !p.contains(c)).map(move |c| (row, c)))
            .collect();
        self.values = vec![0; self.free.len()];
        self.fresh = true;
    }

    fn next_pivots(&mut self) -> bool {
        let (d, k) = (self.d, self.k);
        let p = self.pivots.as_mut().unwrap();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if p[i] < d - k + i {
                p[i] += 1;
                for j in i + 1..k {
                    p[j] = p[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    fn current(&self) -> Vec<Vec<Scalar>> {
        let f = &self.field;
        let p = self.pivots.as_ref().unwrap();
        let mut rows = vec![vec![f.zero(); self.d]; self.k];
        for (row, &pc) in p.iter().enumerate() {
            rows[row][pc] = f.one();
        }
        for (&(row, c), &v) in self.free.iter().zip(&self.values) {
            rows[row][c] = f.element(v);
        }
        rows
    }
}

impl Iterator for EchelonSubspaces {
    type Item = Vec<Vec<Scalar>>;

    fn next(&mut self) -> Option<Self::Item> {
        self.pivots.as_ref()?;
        if self.fresh {
            self.fresh = false;
            return Some(self.current());
        }
        let mut i = self.values.len();
        while i > 0 {
            i -= 1;
            self.values[i] += 1;
            if self.values[i] < self.q {
                return Some(self.current());
            }
            self.values[i] = 0;
        }
        if self.next_pivots() {
            self.load_free();
            self.fresh = false;
            Some(self.current())
        } else {
            self.pivots = None;
            None
        }
    }
}

/// Every `k`-dimensional subspace of `F_q^d` exactly once.
pub fn enumerate_subspaces(field: &Field, d: usize, k: usize, budget: u64) -> Result<EchelonSubspaces> {
    let q = field.require_finite("subspace enumeration")?;
    if k > d {
        return Err(Error::ShapeMismatch(format!("dimension {k} exceeds ambient {d}")));
    }
    scan::check_budget(scan::count(q, k * (d - k)), budget)?;
    let mut it = EchelonSubspaces {
        field: field.clone(),
        q,
        d,
        k,
        pivots: Some((0..k).collect()),
        free: Vec::new(),
        values: Vec::new(),
        fresh: true,
    };
    it.load_free();
    Ok(it)
}

/// All `k`-dimensional subspaces of `M_n(F_q)`.
pub fn matrix_subspaces(field: &Field, n: usize, k: usize, budget: u64) -> Result<Vec<MatSubspace>> {
    enumerate_subspaces(field, n * n, k, budget)?
        .map(|rows| MatSubspace::from_vectors(field, n, rows))
        .collect()
}

/// A random `k`-dimensional subspace: uniform pivot set, uniform free entries.
/// Not uniform over subspaces.
pub fn random_subspace(field: &Field, n: usize, k: usize, rng: &mut impl Rng) -> Result<MatSubspace> {
    let q = field.require_finite("random subspace")?;
    let d = n * n;
    let mut pivots = rand::seq::index::sample(rng, d, k).into_vec();
    pivots.sort_unstable();
    let mut rows = vec![vec![field.zero(); d]; k];
    for (row, &pc) in pivots.iter().enumerate() {
        rows[row][pc] = field.one();
        for c in pc + 1..d {
            if !pivots.contains(&c) {
                rows[row][c] = field.element(rng.random_range(0..q));
            }
        }
    }
    MatSubspace::from_vectors(field, n, rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub subspace: MatSubspace,
    pub definition: MsStatus,
    pub criterion: MsStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub field: Field,
    pub n: usize,
    /// All subspaces enumerated, including the full algebra.
    pub total_subspaces: usize,
    pub proper_checked: usize,
    /// Proper subspaces the two oracles both call MS.
    pub ms_count: usize,
    pub sampling: Option<Sampling>,
    pub disagreements: Vec<Disagreement>,
    pub agreement: bool,
}

fn compare_one(s: &MatSubspace, budget: u64) -> Result<Option<Disagreement>> {
    let def = ms_by_definition(s, budget)?;
    let crit = ms_by_idempotent_criterion(s, budget)?;
    Ok((def.status != crit.status).then(|| Disagreement {
        subspace: s.clone(),
        definition: def.status,
        criterion: crit.status,
    }))
}

fn oracle_report(field: &Field, n: usize, subs: Vec<MatSubspace>, total: usize, sampling: Option<Sampling>, budget: u64) -> Result<OracleReport> {
    let proper: Vec<MatSubspace> = subs.into_iter().filter(|s| !s.is_full()).collect();
    let results = proper
        .par_iter()
        .map(|s| {
            let d = compare_one(s, budget)?;
            let ms = d.is_none() && ms_by_idempotent_criterion(s, budget)?.status.is_ms();
            Ok((d, ms))
        })
        .collect::<Result<Vec<_>>>()?;
    let ms_count = results.iter().filter(|(_, ms)| *ms).count();
    let disagreements: Vec<Disagreement> = results.into_iter().filter_map(|(d, _)| d).collect();
    Ok(OracleReport {
        schema_version: SCHEMA_VERSION,
        field: field.clone(),
        n,
        total_subspaces: total,
        proper_checked: proper.len(),
        ms_count,
        sampling,
        agreement: disagreements.is_empty(),
        disagreements,
    })
}

/// Run the definition checker and the idempotent criterion on every proper
/// subspace of `M_n(F_q)`.
pub fn oracle_compare(n: usize, field: &Field, budget: u64) -> Result<OracleReport> {
    let mut subs = Vec::new();
    for k in 0..=n * n {
        subs.extend(matrix_subspaces(field, n, k, budget)?);
    }
    let total = subs.len();
    oracle_report(field, n, subs, total, None, budget)
}

/// As [`oracle_compare`] on `samples` seeded random proper subspaces.
pub fn oracle_compare_sampled(n: usize, field: &Field, samples: usize, seed: u64, budget: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = n * n;
    let subs = (0..samples)
        .map(|_| {
            let k = rng.random_range(0..d);
            random_subspace(field, n, k, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    oracle_report(field, n, subs, samples, Some(Sampling { samples, seed }), budget)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionCounts {
    pub dim: usize,
    pub subspaces: usize,
    pub expected: u128,
    pub ms: usize,
    pub maximal: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub subspace: MatSubspace,
    pub status: MsStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExactMatrix>,
    pub maximal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseStatus {
    pub clause: Clause,
    pub closure_dependent: bool,
    pub members: usize,
    pub maximal: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extra {
    pub subspace: MatSubspace,
    /// A trace-nonzero element with no eigenvalue in the field.
    pub irreducible_witness: Option<ExactMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationComparison {
    pub predicted: usize,
    pub clauses: Vec<ClauseStatus>,
    /// Predicted members that are not maximal MSs.
    pub misses: Vec<PredictedFamily>,
    /// Maximal MSs that are not predicted.
    pub extras: Vec<Extra>,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub schema_version: u32,
    pub field: Field,
    pub n: usize,
    pub dimensions: Vec<DimensionCounts>,
    pub counts_match_gaussian: bool,
    /// Every hyperplane of every MS is an MS.
    pub heredity_holds: bool,
    pub entries: Vec<CensusEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationComparison>,
}

impl CensusReport {
    pub fn maximal(&self) -> impl Iterator<Item = &MatSubspace> {
        self.entries.iter().filter(|e| e.maximal).map(|e| &e.subspace)
    }

    pub fn ms(&self) -> impl Iterator<Item = &MatSubspace> {
        self.entries.iter().filter(|e| e.status.is_ms()).map(|e| &e.subspace)
    }
}

/// A trace-nonzero element of `v` whose characteristic polynomial has no
/// root in the field.
pub fn irreducible_witness(v: &MatSubspace) -> Result<Option<ExactMatrix>> {
    let f = v.field();
    for a in elements_of(v)? {
        if !f.is_zero(&a.trace()?) && spectrum_kind(&a)? == Some(SpectrumKind::Irreducible) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Every hyperplane of `v`, as subspaces of the ambient algebra.
fn hyperplanes(v: &MatSubspace, budget: u64) -> Result<Vec<MatSubspace>> {
    let f = v.field();
    let k = v.dim();
    enumerate_subspaces(f, k, k - 1, budget)?
        .map(|coords| {
            let mats: Vec<ExactMatrix> = coords.iter().map(|c| v.element(c)).collect();
            MatSubspace::span_of(f, v.n(), &mats)
        })
        .collect()
}

/// MS status and maximality of every subspace of `M_n(F_q)`, with witnesses.
pub fn ms_census(n: usize, field: &Field, compare_classification: bool, budget: u64) -> Result<CensusReport> {
    let q = field.require_finite("census")?;
    let d = n * n;
    let mut entries = Vec::new();
    let mut dimensions = Vec::new();
    for k in 0..=d {
        let subs = matrix_subspaces(field, n, k, budget)?;
        let level = subs
            .par_iter()
            .map(|s| {
                let verdict = ms_by_idempotent_criterion(s, budget)?;
                let maximal = verdict.status == MsStatus::MsProper && is_maximal_ms(s, budget)?.is_maximal;
                Ok(CensusEntry {
                    subspace: s.clone(),
                    status: verdict.status,
                    witness: verdict.witness,
                    maximal,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        dimensions.push(DimensionCounts {
            dim: k,
            subspaces: level.len(),
            expected: gaussian_binomial(d, k, q),
            ms: level.iter().filter(|e| e.status == MsStatus::MsProper).count(),
            maximal: level.iter().filter(|e| e.maximal).count(),
        });
        entries.extend(level);
    }
    let counts_match_gaussian = dimensions.iter().all(|c| c.subspaces as u128 == c.expected);

    let status: HashMap<&MatSubspace, MsStatus> = entries.iter().map(|e| (&e.subspace, e.status)).collect();
    let heredity_holds = entries
        .par_iter()
        .filter(|e| e.status == MsStatus::MsProper && e.subspace.dim() > 0)
        .map(|e| -> Result<bool> {
            Ok(hyperplanes(&e.subspace, budget)?
                .iter()
                .all(|h| status.get(h).is_some_and(|s| s.is_ms())))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);

    let classification = if compare_classification && n == 2 {
        Some(compare_with_prediction(&entries, field)?)
    } else {
        None
    };
    Ok(CensusReport {
        schema_version: SCHEMA_VERSION,
        field: field.clone(),
        n,
        dimensions,
        counts_match_gaussian,
        heredity_holds,
        entries,
        classification,
    })
}

fn compare_with_prediction(entries: &[CensusEntry], field: &Field) -> Result<ClassificationComparison> {
    let predicted = predicted_maximal(field)?;
    let maximal: HashSet<&MatSubspace> = entries.iter().filter(|e| e.maximal).map(|e| &e.subspace).collect();
    let predicted_set: HashSet<&MatSubspace> = predicted.iter().map(|p| &p.subspace).collect();
    let mut clauses: Vec<ClauseStatus> = Vec::new();
    for p in &predicted {
        let hit = maximal.contains(&p.subspace) as usize;
        match clauses.iter_mut().find(|c| c.clause == p.clause) {
            Some(c) => {
                c.members += 1;
                c.maximal += hit;
            }
            None => clauses.push(ClauseStatus {
                clause: p.clause,
                closure_dependent: p.closure_dependent,
                members: 1,
                maximal: hit,
            }),
        }
    }
    let misses: Vec<PredictedFamily> = predicted
        .iter()
        .filter(|p| !maximal.contains(&p.subspace))
        .cloned()
        .collect();
    let extras = entries
        .iter()
        .filter(|e| e.maximal && !predicted_set.contains(&e.subspace))
        .map(|e| {
            Ok(Extra {
                subspace: e.subspace.clone(),
                irreducible_witness: irreducible_witness(&e.subspace)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationComparison {
        predicted: predicted.len(),
        exact: misses.is_empty() && extras.is_empty(),
        clauses,
        misses,
        extras,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleOutcome {
    pub subspace: MatSubspace,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idempotent: Option<ExactMatrix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeBondtReport {
    pub schema_version: u32,
    pub field: Field,
    pub n: usize,
    pub codim: usize,
    pub sampling: Sampling,
    /// Draws discarded for lying inside the trace-zero hyperplane.
    pub resampled: usize,
    pub with_idempotent: usize,
    pub counterexamples: Vec<MatSubspace>,
    pub outcomes: Vec<SampleOutcome>,
}

/// Seeded random subspaces of codimension `n − 1` in `M_n(F_q)` that are not
/// inside the trace-zero hyperplane, each scanned for a nonzero idempotent.
/// When `char F ≥ n`, every such subspace is expected to contain one.
pub fn debondt_sample(field: &Field, n: usize, samples: usize, seed: u64, budget: u64) -> Result<DeBondtReport> {
    field.require_finite("sampled check")?;
    let p = field.characteristic() as usize;
    if p < n {
        return Err(Error::HypothesisFailed(format!("characteristic {p} is below n = {n}")));
    }
    let codim = n - 1;
    let dim = n * n - codim;
    let h = trace_zero_space(n, field);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn = Vec::with_capacity(samples);
    let mut resampled = 0;
    while drawn.len() < samples {
        let s = random_subspace(field, n, dim, &mut rng)?;
        if s.is_subspace_of(&h)? {
            resampled += 1;
            continue;
        }
        drawn.push(s);
    }
    let outcomes = drawn
        .into_par_iter()
        .map(|s| {
            let idempotent = find_idempotent(&s, budget)?;
            Ok(SampleOutcome { subspace: s, idempotent })
        })
        .collect::<Result<Vec<_>>>()?;
    let counterexamples: Vec<MatSubspace> = outcomes
        .iter()
        .filter(|o| o.idempotent.is_none())
        .map(|o| o.subspace.clone())
        .collect();
    Ok(DeBondtReport {
        schema_version: SCHEMA_VERSION,
        field: field.clone(),
        n,
        codim,
        sampling: Sampling { samples, seed },
        resampled,
        with_idempotent: outcomes.len() - counterexamples.len(),
        counterexamples,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mscore::DEFAULT_BUDGET;

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(4, 1, 3), 40);
        assert_eq!(gaussian_binomial(4, 2, 5), 806);
        assert_eq!(gaussian_binomial(4, 0, 7), 1);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_subspaces(&f(2), 4, 2, DEFAULT_BUDGET).unwrap().count(), 35);
        assert_eq!(enumerate_subspaces(&f(3), 4, 1, DEFAULT_BUDGET).unwrap().count(), 40);
        let zero: Vec<_> = enumerate_subspaces(&f(3), 4, 0, DEFAULT_BUDGET).unwrap().collect();
        assert_eq!(zero, vec![Vec::<Vec<Scalar>>::new()]);
        assert_eq!(enumerate_subspaces(&f(2), 3, 3, DEFAULT_BUDGET).unwrap().count(), 1);
    }

    #[test]
    fn enumeration_is_distinct() {
        let subs = matrix_subspaces(&f(3), 2, 2, DEFAULT_BUDGET).unwrap();
        let set: HashSet<_> = subs.iter().cloned().collect();
        assert_eq!(set.len(), 130);
    }

    #[test]
    fn enumeration_budget() {
        assert!(matches!(
            enumerate_subspaces(&f(5), 9, 4, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn oracle_f2() {
        let r = oracle_compare(2, &f(2), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.total_subspaces, 67);
        assert_eq!(r.proper_checked, 66);
        assert!(r.agreement);
    }

    #[test]
    fn hyperplane_counts() {
        let r = ms_census(2, &f(3), false, DEFAULT_BUDGET).unwrap();
        assert!(r.counts_match_gaussian);
        assert!(r.heredity_holds);
        assert_eq!(r.dimensions[3].ms, 1);
        let h = trace_zero_space(2, &f(3));
        assert!(r.entries.iter().any(|e| e.subspace == h && e.maximal));
    }

    #[test]
    fn debondt_empty_and_hypothesis() {
        let r = debondt_sample(&f(5), 3, 0, 1, DEFAULT_BUDGET).unwrap();
        assert!(r.outcomes.is_empty());
        assert!(matches!(debondt_sample(&f(2), 3, 1, 1, DEFAULT_BUDGET), Err(Error::HypothesisFailed(_))));
    }
}
