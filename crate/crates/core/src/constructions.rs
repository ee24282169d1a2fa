//! Idempotent frames, weight projections, the structural MS certificate, and
//! builders for the block-triangular families.
//!
//! A frame `e_1, …, e_t` of orthogonal idempotents summing to `I` splits
//! `M_n = ⊕ e_i M e_j`. Grouping the frame into parts `P` and giving each part a
//! rational value `f(P)` turns the block `e_P M e_Q` into the weight space of
//! `ε_P − ε_Q`, positive when `f(P) > f(Q)`.

use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::algebra::{ExactMatrix, Field, Scalar};
use crate::error::{Error, Result};
use crate::mscore::{Method, MsStatus, MsVerdict};
use crate::subspace::MatSubspace;

/// Orthogonal idempotents summing to the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdempotentFrame {
    pub idempotents: Vec<ExactMatrix>,
    pub ranks: Vec<usize>,
}

impl IdempotentFrame {
    /// Validate an arbitrary frame; every member must be a nonzero idempotent.
    pub fn new(idempotents: Vec<ExactMatrix>) -> Result<Self> {
        let first = idempotents
            .first()
            .ok_or_else(|| Error::InvalidFrame("empty frame".into()))?;
        let field = first.field().clone();
        let n = first.rows();
        let mut sum = ExactMatrix::zeros(&field, n, n);
        for (i, e) in idempotents.iter().enumerate() {
            if e.field() != &field || e.rows() != n || e.cols() != n {
                return Err(Error::InvalidFrame(format!("member {i} has the wrong shape or field")));
            }
            if e.is_zero() || !e.is_idempotent() {
                return Err(Error::InvalidFrame(format!("member {i} is not a nonzero idempotent")));
            }
            for (j, other) in idempotents.iter().enumerate() {
                if i != j && !(e * other).is_zero() {
                    return Err(Error::InvalidFrame(format!("members {i} and {j} are not orthogonal")));
                }
            }
            sum = &sum + e;
        }
        if sum != ExactMatrix::identity(&field, n) {
            return Err(Error::InvalidFrame("members do not sum to the identity".into()));
        }
        let ranks = idempotents.iter().map(ExactMatrix::rank).collect();
        Ok(IdempotentFrame { idempotents, ranks })
    }

    /// Coordinate-block idempotents with the given (positive) ranks.
    pub fn standard(field: &Field, ranks: &[usize]) -> Result<Self> {
        if ranks.is_empty() || ranks.contains(&0) {
            return Err(Error::InvalidFrame(format!("block ranks must be positive, got {ranks:?}")));
        }
        Ok(IdempotentFrame {
            idempotents: block_idempotents(field, ranks),
            ranks: ranks.to_vec(),
        })
    }

    pub fn field(&self) -> &Field {
        self.idempotents[0].field()
    }

    pub fn n(&self) -> usize {
        self.idempotents[0].rows()
    }

    pub fn len(&self) -> usize {
        self.idempotents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idempotents.is_empty()
    }

    /// Conjugate every member by `g`: `e ↦ g·e·g⁻¹`.
    pub fn conjugate(&self, g: &ExactMatrix) -> Result<Self> {
        let g_inv = g.inverse()?;
        IdempotentFrame::new(self.idempotents.iter().map(|e| &(g * e) * &g_inv).collect())
    }
}

/// Coordinate-block idempotents for the given block sizes; a zero size gives
/// the zero matrix.
pub fn block_idempotents(field: &Field, sizes: &[usize]) -> Vec<ExactMatrix> {
    let n: usize = sizes.iter().sum();
    let mut start = 0;
    sizes
        .iter()
        .map(|&k| {
            let mut e = ExactMatrix::zeros(field, n, n);
            for i in start..start + k {
                e.set(i, i, field.one());
            }
            start += k;
            e
        })
        .collect()
}

fn serialize_rationals<S: Serializer>(v: &[Rational64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| format!("{}/{}", r.numer(), r.denom())))
}

/// A frame partitioned into parts, each with a rational `f`-value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupedFrame {
    pub frame: IdempotentFrame,
    pub parts: Vec<Vec<usize>>,
    #[serde(serialize_with = "serialize_rationals")]
    pub f_values: Vec<Rational64>,
    /// `e_P = Σ_{i∈P} e_i`.
    #[serde(skip)]
    pub part_idempotents: Vec<ExactMatrix>,
}

impl GroupedFrame {
    pub fn new(frame: IdempotentFrame, parts: Vec<Vec<usize>>, f_values: Vec<Rational64>) -> Result<Self> {
        if parts.len() != f_values.len() {
            return Err(Error::InvalidFrame("one f-value per part required".into()));
        }
        let mut seen = vec![false; frame.len()];
        for part in &parts {
            if part.is_empty() {
                return Err(Error::InvalidFrame("empty part".into()));
            }
            for &i in part {
                if i >= frame.len() || seen[i] {
                    return Err(Error::InvalidFrame(format!("parts do not partition the frame (index {i})")));
                }
                seen[i] = true;
            }
        }
        if seen.contains(&false) {
            return Err(Error::InvalidFrame("parts do not cover the frame".into()));
        }
        for (i, a) in f_values.iter().enumerate() {
            if f_values[..i].contains(a) {
                return Err(Error::InvalidFrame(format!("repeated f-value {a}")));
            }
        }
        let field = frame.field().clone();
        let n = frame.n();
        let part_idempotents = parts
            .iter()
            .map(|p| {
                p.iter()
                    .fold(ExactMatrix::zeros(&field, n, n), |acc, &i| &acc + &frame.idempotents[i])
            })
            .collect();
        Ok(GroupedFrame {
            frame,
            parts,
            f_values,
            part_idempotents,
        })
    }

    /// Every member its own part, with `f(ε_i) = i` (1-based).
    pub fn singletons(frame: IdempotentFrame) -> Self {
        let t = frame.len();
        GroupedFrame::new(
            frame,
            (0..t).map(|i| vec![i]).collect(),
            (1..=t as i64).map(Rational64::from_integer).collect(),
        )
        .expect("singleton grouping is valid")
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    pub fn part_rank(&self, p: usize) -> usize {
        self.parts[p].iter().map(|&i| self.frame.ranks[i]).sum()
    }

    /// Ordered part pairs `(P, Q)` with `f(P) > f(Q)`; the block `e_P M e_Q` is
    /// the weight space of `ε_P − ε_Q`.
    pub fn positive_weights(&self) -> Vec<(usize, usize)> {
        let s = self.part_count();
        let mut out = Vec::new();
        for p in 0..s {
            for q in 0..s {
                if self.f_values[p] > self.f_values[q] {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// `Σ_P e_P M e_P`, the centralizer of the torus.
    pub fn centralizer(&self) -> MatSubspace {
        let field = self.frame.field();
        let n = self.frame.n();
        let gens: Vec<ExactMatrix> = self
            .part_idempotents
            .iter()
            .flat_map(|e| block_generators(e, e))
            .collect();
        MatSubspace::span_of(field, n, &gens).expect("frame matrices share a field")
    }
}

/// Spanning set `{l·E_ij·r}` of `l·M·r`.
pub fn block_generators(l: &ExactMatrix, r: &ExactMatrix) -> Vec<ExactMatrix> {
    let field = l.field();
    let n = l.rows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let m = &(l * &ExactMatrix::unit(field, n, i, j)) * r;
            if !m.is_zero() {
                out.push(m);
            }
        }
    }
    out
}

/// `l·M·r` as a subspace.
pub fn block_space(l: &ExactMatrix, r: &ExactMatrix) -> MatSubspace {
    MatSubspace::span_of(l.field(), l.rows(), &block_generators(l, r)).expect("shared field")
}

/// `e_P·a·e_Q`.
pub fn weight_project(a: &ExactMatrix, g: &GroupedFrame, from_part: usize, to_part: usize) -> Result<ExactMatrix> {
    let ep = g
        .part_idempotents
        .get(from_part)
        .ok_or(Error::InvalidPart(from_part))?;
    let eq = g.part_idempotents.get(to_part).ok_or(Error::InvalidPart(to_part))?;
    Ok(&(ep * a) * eq)
}

/// `π_0(a) = Σ_P e_P·a·e_P`.
pub fn project_zero_weight(a: &ExactMatrix, g: &GroupedFrame) -> ExactMatrix {
    let n = a.rows();
    g.part_idempotents
        .iter()
        .fold(ExactMatrix::zeros(a.field(), n, n), |acc, e| &acc + &(&(e * a) * e))
}

/// `Λ = Σ σ_P e_P` over a grouped frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaSpec {
    #[serde(skip)]
    pub sigmas: Vec<Scalar>,
    pub matrix: ExactMatrix,
}

impl LambdaSpec {
    pub fn new(g: &GroupedFrame, sigmas: Vec<Scalar>) -> Result<Self> {
        if sigmas.len() != g.part_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} sigmas for {} parts",
                sigmas.len(),
                g.part_count()
            )));
        }
        let field = g.frame.field();
        let n = g.frame.n();
        let matrix = sigmas
            .iter()
            .zip(&g.part_idempotents)
            .fold(ExactMatrix::zeros(field, n, n), |acc, (s, e)| &acc + &e.scale(s));
        Ok(LambdaSpec { sigmas, matrix })
    }

    /// `Λ^⊥ = {x : Tr(Λx) = 0}`.
    pub fn orthogonal(&self) -> MatSubspace {
        MatSubspace::span_of(self.matrix.field(), self.matrix.rows(), &[self.matrix.clone()])
            .expect("single matrix")
            .trace_orthogonal()
    }
}

/// Check `Σ σ_i·k_i ≠ 0` in `F` for every integer tuple `0 ≤ k_i ≤ bounds[i]`,
/// not all zero. Returns the number of tuples checked.
pub fn sigma_condition(field: &Field, sigmas: &[Scalar], bounds: &[usize]) -> Result<usize> {
    let mut k = vec![0usize; bounds.len()];
    let mut checked = 0;
    loop {
        let mut i = bounds.len();
        loop {
            if i == 0 {
                return Ok(checked);
            }
            i -= 1;
            k[i] += 1;
            if k[i] <= bounds[i] {
                break;
            }
            k[i] = 0;
        }
        let total = sigmas
            .iter()
            .zip(&k)
            .fold(field.zero(), |acc, (s, &ki)| field.add(&acc, &field.mul(s, &field.from_int(ki as i64))));
        checked += 1;
        if field.is_zero(&total) {
            return Err(Error::SigmaConditionFailed(format!(
                "k = {k:?} gives Σ σ·k = 0 (σ = [{}])",
                sigmas.iter().map(|s| field.format(s)).collect::<Vec<_>>().join(", ")
            )));
        }
    }
}

/// The verified hypotheses of the weight-space MS criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralCertificate {
    pub part_ranks: Vec<usize>,
    /// Number of nonzero rank tuples for which `Σ σ_P k_P ≠ 0` was checked.
    pub sigma_tuples_checked: usize,
    /// Basis elements `v` checked for `Tr(Λv) = Tr(Λπ_0(v)) = 0`.
    pub containment_checked: usize,
    pub positive_weights: Vec<(usize, usize)>,
    /// Products `π_ω(v)·π_{−ω′}(v′)` checked to vanish.
    pub products_checked: usize,
}

impl StructuralCertificate {
    pub fn verdict(&self, v: &MatSubspace) -> MsVerdict {
        MsVerdict {
            status: if v.is_full() {
                MsStatus::MsFullAlgebra
            } else {
                MsStatus::MsProper
            },
            witness: None,
            method: Method::StructuralCertificate,
            evidence: Vec::new(),
        }
    }
}

/// Verify that `v` is an MS through the weight-space criterion:
///
/// 1. `Tr(Λe) ≠ 0` for every nonzero idempotent `e` of the centralizer, checked
///    as `Σ σ_P k_P ≠ 0` over rank tuples (an idempotent of a block has trace
///    equal to its rank);
/// 2. `V ⊆ Λ^⊥` and `π_0(V) ⊆ Λ^⊥`;
/// 3. `π_ω(V)·π_{−ω′}(V) = 0` for all positive weights `ω, ω′`.
pub fn certify_weight_conditions(v: &MatSubspace, g: &GroupedFrame, lambda: &LambdaSpec) -> Result<StructuralCertificate> {
    let field = v.field();
    if g.frame.field() != field || g.frame.n() != v.n() {
        return Err(Error::MixedFields(format!(
            "frame over {} (n = {}), subspace over {field} (n = {})",
            g.frame.field(),
            g.frame.n(),
            v.n()
        )));
    }
    let part_ranks: Vec<usize> = (0..g.part_count()).map(|p| g.part_rank(p)).collect();
    let sigma_tuples_checked = sigma_condition(field, &lambda.sigmas, &part_ranks)
        .map_err(|e| Error::HypothesisFailed(format!("sigma condition: {e}")))?;

    let basis = v.basis();
    for (i, b) in basis.iter().enumerate() {
        if !field.is_zero(&(&lambda.matrix * b).trace()?) {
            return Err(Error::HypothesisFailed(format!("containment: basis element {i} is not in Λ^⊥")));
        }
        let p0 = project_zero_weight(b, g);
        if !field.is_zero(&(&lambda.matrix * &p0).trace()?) {
            return Err(Error::HypothesisFailed(format!(
                "containment: π_0 of basis element {i} is not in Λ^⊥"
            )));
        }
    }

    let weights = g.positive_weights();
    let mut products_checked = 0;
    for &(p, q) in &weights {
        let plus: Vec<ExactMatrix> = basis
            .iter()
            .map(|b| weight_project(b, g, p, q))
            .collect::<Result<_>>()?;
        for &(p2, q2) in &weights {
            // −ω′ is the block (Q′, P′)
            let minus: Vec<ExactMatrix> = basis
                .iter()
                .map(|b| weight_project(b, g, q2, p2))
                .collect::<Result<_>>()?;
            for (i, x) in plus.iter().enumerate() {
                for (j, y) in minus.iter().enumerate() {
                    products_checked += 1;
                    if !(x * y).is_zero() {
                        return Err(Error::HypothesisFailed(format!(
                            "product vanishing: weights ({p},{q}) and -({p2},{q2}) on basis pair ({i},{j})"
                        )));
                    }
                }
            }
        }
    }
    Ok(StructuralCertificate {
        part_ranks,
        sigma_tuples_checked,
        containment_checked: basis.len(),
        positive_weights: weights,
        products_checked,
    })
}

/// A constructed subspace together with the data that certifies it.
#[derive(Clone, Debug, Serialize)]
pub struct Construction {
    pub subspace: MatSubspace,
    pub frame: GroupedFrame,
    pub lambda: LambdaSpec,
    pub certificate: StructuralCertificate,
}

/// Block lower-triangular subspace: `(M_0 ∩ Λ^⊥) ⊕ ⊕_{i>j} e_i M e_j` for the
/// coordinate-block frame with the given ranks and `Λ = Σ σ_i e_i`.
pub fn block_triangular(ranks: &[usize], sigmas: &[Scalar], field: &Field) -> Result<Construction> {
    if ranks.len() != sigmas.len() {
        return Err(Error::ShapeMismatch("one sigma per block required".into()));
    }
    sigma_condition(field, sigmas, ranks)?;
    let g = GroupedFrame::singletons(IdempotentFrame::standard(field, ranks)?);
    let lambda = LambdaSpec::new(&g, sigmas.to_vec())?;
    let mut v = g.centralizer().intersect(&lambda.orthogonal())?;
    for (p, q) in g.positive_weights() {
        v = v.sum(&block_space(&g.part_idempotents[p], &g.part_idempotents[q]))?;
    }
    let certificate = certify_weight_conditions(&v, &g, &lambda)?;
    Ok(Construction {
        subspace: v,
        frame: g,
        lambda,
        certificate,
    })
}

/// `U = F·(u + w) + V` for a block-triangular `V` with at least three blocks,
/// `u ∈ e_1 M e_2`, `w ∈ e_2 M e_3`, `uw ≠ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct ChainExtension {
    pub subspace: MatSubspace,
    pub base_dim: usize,
    /// Every element of `U` has zero `(1,3)` block; an idempotent `α(u+w) + v`
    /// would then force `α²uw = 0`.
    pub corner_vanishes: bool,
}

pub fn chain_extension(base: &Construction, u: &ExactMatrix, w: &ExactMatrix) -> Result<ChainExtension> {
    let g = &base.frame;
    if g.part_count() < 3 {
        return Err(Error::FamilyMismatch("chain extension needs at least three blocks".into()));
    }
    let e = &g.part_idempotents;
    if &(&(&e[0] * u) * &e[1]) != u {
        return Err(Error::BadBlocks("u must lie in e_1 M e_2".into()));
    }
    if &(&(&e[1] * w) * &e[2]) != w {
        return Err(Error::BadBlocks("w must lie in e_2 M e_3".into()));
    }
    if (u * w).is_zero() {
        return Err(Error::ProductZero);
    }
    let v = &base.subspace;
    let u_plus_w = u + w;
    if v.contains(&u_plus_w)? {
        return Err(Error::InternalContractViolation("u + w already lies in V".into()));
    }
    let ext = v.extend(&u_plus_w)?;
    let corner_vanishes = ext.basis().iter().all(|b| (&(&e[0] * b) * &e[2]).is_zero());
    Ok(ChainExtension {
        subspace: ext,
        base_dim: v.dim(),
        corner_vanishes,
    })
}

/// The two-block family: a frame `e_1, e_2, e_3` (one of `e_1, e_2` may be
/// zero), `Λ = σ_1(e_1 + e_2) + σ_2 e_3`, and
/// `V = (Z ∩ Λ^⊥) + e_1 M e_3 + e_3 M e_2` with
/// `Z = (e_1+e_2) M (e_1+e_2) ⊕ e_3 M e_3`.
#[derive(Clone, Debug, Serialize)]
pub struct TwoBlockFamily {
    pub e1: ExactMatrix,
    pub e2: ExactMatrix,
    pub e3: ExactMatrix,
    pub ranks: [usize; 3],
    #[serde(skip)]
    pub sigma1: Scalar,
    #[serde(skip)]
    pub sigma2: Scalar,
    pub lambda: ExactMatrix,
    pub subspace: MatSubspace,
}

impl TwoBlockFamily {
    /// Coordinate-block frame with block sizes `n1, n2, n3`.
    pub fn standard(n1: usize, n2: usize, n3: usize, sigma1: Scalar, sigma2: Scalar, field: &Field) -> Result<Self> {
        let [e1, e2, e3]: [ExactMatrix; 3] = block_idempotents(field, &[n1, n2, n3]).try_into().unwrap();
        Self::from_frame(e1, e2, e3, sigma1, sigma2)
    }

    /// Arbitrary frame; `e_3` and at least one of `e_1, e_2` must be nonzero.
    pub fn from_frame(e1: ExactMatrix, e2: ExactMatrix, e3: ExactMatrix, sigma1: Scalar, sigma2: Scalar) -> Result<Self> {
        let members: Vec<ExactMatrix> = [&e1, &e2, &e3].into_iter().filter(|e| !e.is_zero()).cloned().collect();
        if e3.is_zero() || (e1.is_zero() && e2.is_zero()) {
            return Err(Error::InvalidFrame("e_3 and one of e_1, e_2 must be nonzero".into()));
        }
        IdempotentFrame::new(members)?;
        let field = e3.field().clone();
        let ranks = [e1.rank(), e2.rank(), e3.rank()];
        if sigma1 == sigma2 {
            return Err(Error::SigmaConditionFailed("σ_1 = σ_2".into()));
        }
        sigma_condition(&field, &[sigma1.clone(), sigma2.clone()], &[ranks[0] + ranks[1], ranks[2]])?;
        let e12 = &e1 + &e2;
        let lambda = &e12.scale(&sigma1) + &e3.scale(&sigma2);
        let n = e3.rows();
        let z_gens: Vec<ExactMatrix> = block_generators(&e12, &e12)
            .into_iter()
            .chain(block_generators(&e3, &e3))
            .collect();
        let z = MatSubspace::span_of(&field, n, &z_gens)?;
        let lambda_perp = MatSubspace::span_of(&field, n, &[lambda.clone()])?.trace_orthogonal();
        let subspace = z
            .intersect(&lambda_perp)?
            .sum(&block_space(&e1, &e3))?
            .sum(&block_space(&e3, &e2))?;
        Ok(TwoBlockFamily {
            e1,
            e2,
            e3,
            ranks,
            sigma1,
            sigma2,
            lambda,
            subspace,
        })
    }

    pub fn field(&self) -> &Field {
        self.e3.field()
    }

    pub fn n(&self) -> usize {
        self.e3.rows()
    }

    /// Expected codimension `(n_1 + n_2)·n_3 + 1`.
    pub fn expected_codim(&self) -> usize {
        (self.ranks[0] + self.ranks[1]) * self.ranks[2] + 1
    }

    /// The nonzero members grouped as `{e_1, e_2}`, `{e_3}` with `f = (1, 3)`.
    pub fn grouped_frame(&self) -> GroupedFrame {
        let mut members = Vec::new();
        let mut low = Vec::new();
        for e in [&self.e1, &self.e2] {
            if !e.is_zero() {
                low.push(members.len());
                members.push(e.clone());
            }
        }
        let high = vec![members.len()];
        members.push(self.e3.clone());
        GroupedFrame::new(
            IdempotentFrame::new(members).expect("validated at construction"),
            vec![low, high],
            vec![Rational64::from_integer(1), Rational64::from_integer(3)],
        )
        .expect("two parts with distinct values")
    }

    pub fn lambda_spec(&self) -> LambdaSpec {
        LambdaSpec::new(&self.grouped_frame(), vec![self.sigma1.clone(), self.sigma2.clone()])
            .expect("two sigmas for two parts")
    }

    pub fn certify(&self) -> Result<StructuralCertificate> {
        certify_weight_conditions(&self.subspace, &self.grouped_frame(), &self.lambda_spec())
    }

    /// The configuration `e_1′ = e_2ᵀ, e_2′ = e_1ᵀ, e_3′ = e_3ᵀ` with the same
    /// sigmas; its subspace is `Vᵀ`.
    pub fn transpose(&self) -> Result<Self> {
        Self::from_frame(
            self.e2.transpose(),
            self.e1.transpose(),
            self.e3.transpose(),
            self.sigma1.clone(),
            self.sigma2.clone(),
        )
    }

    pub fn construction(&self) -> Result<Construction> {
        Ok(Construction {
            subspace: self.subspace.clone(),
            frame: self.grouped_frame(),
            lambda: self.lambda_spec(),
            certificate: self.certify()?,
        })
    }
}

/// The corner family: `e_1` the rank-`r` leading coordinate idempotent,
/// `e_2 = I − e_1`, `V = span{σ_1 e_1 + σ_2 e_2, e_1 M e_2}^⊥`. This is the
/// two-block family with a zero middle block.
pub fn corner_family(n: usize, r: usize, sigma1: Scalar, sigma2: Scalar, field: &Field) -> Result<TwoBlockFamily> {
    if r == 0 || r >= n {
        return Err(Error::RankOutOfRange { r, n });
    }
    let family = TwoBlockFamily::standard(r, 0, n - r, sigma1.clone(), sigma2.clone(), field)?;
    let [e1, _, e2]: [ExactMatrix; 3] = block_idempotents(field, &[r, 0, n - r]).try_into().unwrap();
    let mut gens = vec![&e1.scale(&sigma1) + &e2.scale(&sigma2)];
    gens.extend(block_generators(&e1, &e2));
    let direct = MatSubspace::span_of(field, n, &gens)?.trace_orthogonal();
    if direct != family.subspace {
        return Err(Error::InternalContractViolation(
            "orthogonal-complement form disagrees with the two-block form".into(),
        ));
    }
    Ok(family)
}
