//! The `2×2` case: spectrum checks on trace-nonzero elements, generators for
//! the known maximal families, and the base-change example where an MS stops
//! being one after adjoining a square root.

use std::collections::HashSet;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{ExactMatrix, Field, Scalar};
use crate::error::{Error, Result};
use crate::literal::{field_to_value, matrix_to_value, scalar_to_literal, subspace_to_value};
use crate::mscore::{
    is_maximal_ms, ms_by_idempotent_criterion, refute_with_candidate, trace_zero_space, Method, MsStatus,
    MsVerdict,
};
use crate::scan::{self, PackedSpace};
use crate::subspace::MatSubspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpectrumKind {
    /// Characteristic polynomial has no root in the field.
    Irreducible,
    /// A double eigenvalue.
    Repeated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumViolation {
    pub element: ExactMatrix,
    pub kind: SpectrumKind,
}

/// Facts about trace-nonzero elements of a `2×2` MS.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceNonzeroReport {
    pub elements_checked: usize,
    pub trace_nonzero: usize,
    /// A singular trace-nonzero element. Its scaled copy would be an
    /// idempotent, so for an MS this is always absent.
    pub singular_element: Option<ExactMatrix>,
    /// Only for planes: trace-nonzero elements without two distinct
    /// eigenvalues in the field. Expected over fields that are not
    /// algebraically closed.
    pub spectrum_violations: Option<Vec<SpectrumViolation>>,
}

impl TraceNonzeroReport {
    pub fn invertibility_holds(&self) -> bool {
        self.singular_element.is_none()
    }

    pub fn spectra_split(&self) -> Option<bool> {
        self.spectrum_violations.as_ref().map(Vec::is_empty)
    }
}

/// Classify the spectrum of a `2×2` matrix over its field: `None` when it has
/// two distinct eigenvalues in the field.
pub fn spectrum_kind(a: &ExactMatrix) -> Result<Option<SpectrumKind>> {
    let f = a.field();
    let (t, d) = a.char_poly_2x2()?;
    let mut roots = 0;
    let mut double = false;
    for x in f.elements() {
        // x² − t·x + d
        let val = f.add(&f.sub(&f.mul(&x, &x), &f.mul(&t, &x)), &d);
        if f.is_zero(&val) {
            roots += 1;
            // derivative 2x − t vanishes at a double root
            if f.is_zero(&f.sub(&f.add(&x, &x), &t)) {
                double = true;
            }
        }
    }
    Ok(match (roots, double) {
        (0, _) => Some(SpectrumKind::Irreducible),
        (_, true) => Some(SpectrumKind::Repeated),
        _ => None,
    })
}

/// All elements of a subspace over a finite field, zero first, then in the
/// lexicographic coefficient order.
pub(crate) fn elements_of(v: &MatSubspace) -> Result<Vec<ExactMatrix>> {
    let packed = PackedSpace::new(v)?;
    let mut out = vec![ExactMatrix::zeros(v.field(), v.n(), v.n())];
    packed.find_element(|x| {
        out.push(scan::unpack(v.field(), v.n(), x));
        false
    });
    Ok(out)
}

/// Check every trace-nonzero element of an MS `v ⊆ M_2(F_q)`: it must be
/// invertible; for planes, also report whether its eigenvalues are distinct
/// and lie in `F_q`.
pub fn trace_nonzero_report(v: &MatSubspace, budget: u64) -> Result<TraceNonzeroReport> {
    if v.n() != 2 {
        return Err(Error::ShapeMismatch("expected a subspace of 2x2 matrices".into()));
    }
    if !ms_by_idempotent_criterion(v, budget)?.status.is_ms() {
        return Err(Error::NotAnMs);
    }
    let f = v.field();
    let elements = elements_of(v)?;
    let mut report = TraceNonzeroReport {
        elements_checked: elements.len(),
        trace_nonzero: 0,
        singular_element: None,
        spectrum_violations: (v.dim() == 2).then(Vec::new),
    };
    for a in elements {
        if f.is_zero(&a.trace()?) {
            continue;
        }
        report.trace_nonzero += 1;
        if report.singular_element.is_none() && f.is_zero(&a.determinant()?) {
            report.singular_element = Some(a.clone());
        }
        if let Some(list) = report.spectrum_violations.as_mut() {
            if let Some(kind) = spectrum_kind(&a)? {
                list.push(SpectrumViolation { element: a, kind });
            }
        }
    }
    Ok(report)
}

/// `span{λ_1 e_1 + λ_2 e_2, e_1 M e_2}` with `e_i = g·E_ii·g⁻¹`.
pub fn split_plane(lambda1: &Scalar, lambda2: &Scalar, g: &ExactMatrix) -> Result<MatSubspace> {
    let f = g.field();
    if g.rows() != 2 || g.cols() != 2 {
        return Err(Error::ShapeMismatch("conjugator must be 2x2".into()));
    }
    if f.is_zero(lambda1) || f.is_zero(lambda2) || lambda1 == lambda2 || f.is_zero(&f.add(lambda1, lambda2)) {
        return Err(Error::ParameterViolation(format!(
            "need distinct nonzero λ with nonzero sum, got ({}, {})",
            f.format(lambda1),
            f.format(lambda2)
        )));
    }
    let g_inv = g.inverse()?;
    let conj = |m: &ExactMatrix| &(g * m) * &g_inv;
    let e1 = conj(&ExactMatrix::unit(f, 2, 0, 0));
    let e2 = conj(&ExactMatrix::unit(f, 2, 1, 1));
    let nil = conj(&ExactMatrix::unit(f, 2, 0, 1));
    MatSubspace::span_of(f, 2, &[&e1.scale(lambda1) + &e2.scale(lambda2), nil])
}

/// `span{I + c}` for a nonzero `c` with `c² = 0`.
pub fn unipotent_line(c: &ExactMatrix) -> Result<MatSubspace> {
    if c.rows() != 2 || c.cols() != 2 {
        return Err(Error::ShapeMismatch("expected a 2x2 matrix".into()));
    }
    if c.is_zero() || !(c * c).is_zero() {
        return Err(Error::NotNilpotent);
    }
    let f = c.field();
    MatSubspace::span_of(f, 2, &[&ExactMatrix::identity(f, 2) + c])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Clause {
    /// `I^⊥` (odd characteristic).
    TraceZeroHyperplane,
    /// `(λ_1 e_1 + λ_2 e_2) + e_1 M e_2`.
    SplitDiagonalPlusNilpotent,
    /// `F(I + c)`, `c` a nonzero square-zero matrix (odd characteristic).
    UnipotentLine,
    /// Planes of `I^⊥` avoiding `I` (characteristic 2).
    Char2PlaneInH,
}

impl Clause {
    /// Whether maximality of this clause is only known over algebraically
    /// closed fields.
    pub fn closure_dependent(self) -> bool {
        self == Clause::UnipotentLine
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredictedFamily {
    pub clause: Clause,
    pub closure_dependent: bool,
    pub subspace: MatSubspace,
}

fn sort_key(s: &MatSubspace) -> (usize, Vec<Vec<Scalar>>) {
    (s.dim(), s.basis_vectors().to_vec())
}

/// The invertible `2×2` matrices over a finite field, in index order.
pub fn general_linear_2(field: &Field) -> Result<Vec<ExactMatrix>> {
    let q = field.require_finite("GL_2 enumeration")?;
    scan::all_matrices(q, 2)
        .map(|v| scan::unpack(field, 2, &v))
        .filter_map(|m| match m.determinant() {
            Ok(d) if field.is_zero(&d) => None,
            Ok(_) => Some(Ok(m)),
            Err(e) => Some(Err(e)),
        })
        .collect()
}

/// The maximal MSs of `M_2` predicted by the classification over an
/// algebraically closed field, specialized to the finite field `field`,
/// deduplicated and ordered by clause, then dimension, then canonical basis.
pub fn predicted_maximal(field: &Field) -> Result<Vec<PredictedFamily>> {
    let q = field.require_finite("predicted families")?;
    let char2 = field.characteristic() == 2;
    let mut out: Vec<PredictedFamily> = Vec::new();
    let mut push = |clause: Clause, mut subs: Vec<MatSubspace>| {
        let mut seen = HashSet::new();
        subs.retain(|s| seen.insert(s.clone()));
        subs.sort_by_key(sort_key);
        out.extend(subs.into_iter().map(|subspace| PredictedFamily {
            clause,
            closure_dependent: clause.closure_dependent(),
            subspace,
        }));
    };
    let h = trace_zero_space(2, field);
    let identity = ExactMatrix::identity(field, 2);

    if !char2 {
        push(Clause::TraceZeroHyperplane, vec![h.clone()]);
    }

    let gl2 = general_linear_2(field)?;
    let scalars: Vec<Scalar> = field.elements().collect();
    let mut planes = Vec::new();
    for l1 in &scalars {
        for l2 in &scalars {
            if field.is_zero(l1) || field.is_zero(l2) || l1 == l2 || field.is_zero(&field.add(l1, l2)) {
                continue;
            }
            for g in &gl2 {
                planes.push(split_plane(l1, l2, g)?);
            }
        }
    }
    push(Clause::SplitDiagonalPlusNilpotent, planes);

    if char2 {
        let elems = elements_of(&h)?;
        let mut planes = Vec::new();
        for (i, x) in elems.iter().enumerate().skip(1) {
            for y in elems.iter().skip(i + 1) {
                let p = MatSubspace::span_of(field, 2, &[x.clone(), y.clone()])?;
                if p.dim() == 2 && !p.contains(&identity)? {
                    planes.push(p);
                }
            }
        }
        push(Clause::Char2PlaneInH, planes);
    } else {
        let lines = scan::all_matrices(q, 2)
            .map(|v| scan::unpack(field, 2, &v))
            .filter(|c| !c.is_zero() && (c * c).is_zero())
            .map(|c| unipotent_line(&c))
            .collect::<Result<Vec<_>>>()?;
        push(Clause::UnipotentLine, lines);
    }
    Ok(out)
}

/// `V = span{diag(1, s), [[0,1],[1,0]]}` over `K` with `s` a nonsquare, and
/// its extension to `L = K[t]/(t² − s)`, where it picks up an idempotent.
#[derive(Clone, Debug)]
pub struct BaseChangeDemo {
    pub base: Field,
    pub s: Scalar,
    pub a: ExactMatrix,
    pub b: ExactMatrix,
    pub v: MatSubspace,
    pub base_verdict: MsVerdict,
    pub maximal_over_base: bool,
    /// How maximality over `K` was established.
    pub maximality_method: &'static str,
    pub extension: Field,
    pub sqrt_s: Scalar,
    pub u: MatSubspace,
    /// `(1+s)⁻¹(a + √s·b)`.
    pub c: ExactMatrix,
    pub extension_verdict: MsVerdict,
}

impl BaseChangeDemo {
    pub fn to_json(&self) -> Value {
        json!({
            "base_field": field_to_value(&self.base),
            "s": scalar_to_literal(&self.base, &self.s),
            "a": matrix_to_value(&self.a),
            "b": matrix_to_value(&self.b),
            "V": subspace_to_value(&self.v),
            "base_verdict": self.base_verdict,
            "maximal_over_base": self.maximal_over_base,
            "maximality_method": self.maximality_method,
            "extension_field": field_to_value(&self.extension),
            "sqrt_s": scalar_to_literal(&self.extension, &self.sqrt_s),
            "U": subspace_to_value(&self.u),
            "c": matrix_to_value(&self.c),
            "c_is_idempotent": self.c.is_idempotent(),
            "extension_verdict": self.extension_verdict,
        })
    }
}

impl Serialize for BaseChangeDemo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

fn lift_matrix(l: &Field, k: &Field, m: &ExactMatrix) -> Result<ExactMatrix> {
    let data = m.entries().iter().map(|x| l.lift(k, x)).collect::<Result<Vec<_>>>()?;
    ExactMatrix::new(l.clone(), m.rows(), m.cols(), data)
}

pub fn base_change_demo(base: &Field, s: &Scalar, budget: u64) -> Result<BaseChangeDemo> {
    let k = base;
    if k.degree() != 1 {
        return Err(Error::UnsupportedField(format!("base field {k} must be prime or the rationals")));
    }
    if k.is_zero(s) || k.is_one(s) {
        return Err(Error::ExcludedParameter);
    }
    if k.is_square(s) == Some(true) {
        return Err(Error::SquareParameter);
    }
    if k.is_one(&k.neg(s)) {
        return Err(Error::ExcludedParameter);
    }
    let a = ExactMatrix::diagonal(k, &[k.one(), s.clone()]);
    let b = ExactMatrix::from_ints(k, &[[0, 1], [1, 0]]);
    let v = MatSubspace::span_of(k, 2, &[a.clone(), b.clone()])?;
    let h = trace_zero_space(2, k);

    let (base_verdict, maximal_over_base, maximality_method) = if k.is_finite() {
        let verdict = ms_by_idempotent_criterion(&v, budget)?;
        let maximal = is_maximal_ms(&v, budget)?.is_maximal;
        (verdict, maximal, "exhaustive extension scan")
    } else {
        // det(x·a + y·b) = s·x² − y² vanishes only at x = y = 0 since s is a
        // nonsquare, so every nonzero element is invertible; the only invertible
        // idempotent is I, and I = x·a + y·b forces s = 1.
        let verdict = MsVerdict {
            status: MsStatus::MsProper,
            witness: None,
            method: Method::StructuralCertificate,
            evidence: Vec::new(),
        };
        // Odd characteristic: I^⊥ is the only MS of codimension 1 and V ⊄ I^⊥.
        let maximal = !v.is_subspace_of(&h)?;
        (verdict, maximal, "unique codimension-one MS is the trace-zero hyperplane")
    };

    let neg_s = k.neg(s);
    let extension = if k.is_finite() {
        let p = k.characteristic();
        let c0 = k.index_of(&neg_s);
        Field::extension(p, &[c0, 0, 1])?
    } else {
        let c0 = k.coefficients(&neg_s).remove(0);
        Field::rational_extension(vec![c0, BigRational::from_integer(0.into()), BigRational::from_integer(1.into())])?
    };
    let l = &extension;
    let sqrt_s = l.generator()?;
    let (al, bl) = (lift_matrix(l, k, &a)?, lift_matrix(l, k, &b)?);
    let u = MatSubspace::span_of(l, 2, &[al.clone(), bl.clone()])?;
    let one_plus_s = l.add(&l.one(), &l.lift(k, s)?);
    let c = (&al + &bl.scale(&sqrt_s)).scale(&l.inv(&one_plus_s)?);
    let extension_verdict = refute_with_candidate(&u, &c)?.ok_or_else(|| {
        Error::InternalContractViolation("(1+s)^-1 (a + sqrt(s) b) is not an idempotent of U".into())
    })?;
    Ok(BaseChangeDemo {
        base: k.clone(),
        s: s.clone(),
        a,
        b,
        v,
        base_verdict,
        maximal_over_base,
        maximality_method,
        extension: extension.clone(),
        sqrt_s,
        u,
        c,
        extension_verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::corner_family;
    use crate::mscore::{find_idempotent, DEFAULT_BUDGET};

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn trace_nonzero_examples() {
        let f5 = f(5);
        let v = corner_family(2, 1, f5.one(), f5.from_int(2), &f5).unwrap().subspace;
        let r = trace_nonzero_report(&v, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.elements_checked, 25);
        assert!(r.invertibility_holds());
        assert_eq!(r.spectra_split(), Some(true));

        let demo = base_change_demo(&f5, &f5.from_int(2), DEFAULT_BUDGET).unwrap();
        let r = trace_nonzero_report(&demo.v, DEFAULT_BUDGET).unwrap();
        assert!(r.invertibility_holds());
        let a_plus_b = &demo.a + &demo.b;
        let hit = r
            .spectrum_violations
            .unwrap()
            .into_iter()
            .find(|x| x.element == a_plus_b)
            .unwrap();
        assert_eq!(hit.kind, SpectrumKind::Repeated);

        let line = MatSubspace::span_of(&f5, 2, &[ExactMatrix::unit(&f5, 2, 0, 1)]).unwrap();
        let r = trace_nonzero_report(&line, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.trace_nonzero, 0);
        assert_eq!(r.spectrum_violations, None);

        let h2 = trace_zero_space(2, &f(2));
        assert!(matches!(trace_nonzero_report(&h2, DEFAULT_BUDGET), Err(Error::NotAnMs)));
    }

    #[test]
    fn split_plane_examples() {
        let f5 = f(5);
        let i2 = ExactMatrix::identity(&f5, 2);
        let p = split_plane(&f5.one(), &f5.from_int(2), &i2).unwrap();
        let expected = MatSubspace::span_of(
            &f5,
            2,
            &[ExactMatrix::from_ints(&f5, &[[1, 0], [0, 2]]), ExactMatrix::unit(&f5, 2, 0, 1)],
        )
        .unwrap();
        assert_eq!(p, expected);
        assert!(matches!(
            split_plane(&f5.one(), &f5.from_int(4), &i2),
            Err(Error::ParameterViolation(_))
        ));

        let f7 = f(7);
        let g = ExactMatrix::from_ints(&f7, &[[1, 1], [0, 1]]);
        let p = split_plane(&f7.one(), &f7.from_int(2), &g).unwrap();
        assert_eq!(ms_by_idempotent_criterion(&p, DEFAULT_BUDGET).unwrap().status, MsStatus::MsProper);
    }

    #[test]
    fn split_plane_is_conjugated_corner_member() {
        let f7 = f(7);
        let g = ExactMatrix::from_ints(&f7, &[[2, 1], [3, 4]]);
        let (l1, l2) = (f7.from_int(3), f7.from_int(5));
        let p = split_plane(&l1, &l2, &g).unwrap();
        let corner = corner_family(2, 1, f7.neg(&l2), l1.clone(), &f7).unwrap().subspace;
        let g_inv = g.inverse().unwrap();
        let conj: Vec<ExactMatrix> = corner.basis().iter().map(|b| &(&g * b) * &g_inv).collect();
        assert_eq!(p, MatSubspace::span_of(&f7, 2, &conj).unwrap());
    }

    #[test]
    fn unipotent_line_examples() {
        let f5 = f(5);
        // Over F_5 the line sits in the idempotent-free plane
        // span{I + E12, [[0,1],[1,3]]}, whose elements off the line have
        // irreducible characteristic polynomials.
        let line = unipotent_line(&ExactMatrix::unit(&f5, 2, 0, 1)).unwrap();
        assert!(!is_maximal_ms(&line, DEFAULT_BUDGET).unwrap().is_maximal);
        let plane = line.extend(&ExactMatrix::from_ints(&f5, &[[0, 1], [1, 3]])).unwrap();
        assert_eq!(find_idempotent(&plane, DEFAULT_BUDGET).unwrap(), None);

        let f2 = f(2);
        let line = unipotent_line(&ExactMatrix::unit(&f2, 2, 0, 1)).unwrap();
        let verdict = is_maximal_ms(&line, DEFAULT_BUDGET).unwrap();
        assert_eq!(verdict.status, MsStatus::MsProper);
        assert!(!verdict.is_maximal);

        assert!(matches!(unipotent_line(&ExactMatrix::unit(&f5, 2, 0, 0)), Err(Error::NotNilpotent)));
    }

    #[test]
    fn predicted_counts() {
        let p3 = predicted_maximal(&f(3)).unwrap();
        assert!(!p3.iter().any(|x| x.clause == Clause::SplitDiagonalPlusNilpotent));
        assert_eq!(p3.iter().filter(|x| x.clause == Clause::UnipotentLine).count(), 8);

        let p2 = predicted_maximal(&f(2)).unwrap();
        assert_eq!(p2.len(), 4);
        assert!(p2.iter().all(|x| x.clause == Clause::Char2PlaneInH));

        let p5 = predicted_maximal(&f(5)).unwrap();
        assert_eq!(p5.iter().filter(|x| x.clause == Clause::TraceZeroHyperplane).count(), 1);
        assert!(p5.iter().any(|x| x.clause == Clause::SplitDiagonalPlusNilpotent));
    }

    #[test]
    fn base_change_finite() {
        let f5 = f(5);
        let demo = base_change_demo(&f5, &f5.from_int(2), DEFAULT_BUDGET).unwrap();
        assert_eq!(demo.base_verdict.status, MsStatus::MsProper);
        assert!(demo.maximal_over_base);
        assert_eq!(demo.extension.order(), Some(25));
        assert!(demo.c.is_idempotent());
        assert_eq!(demo.extension_verdict.status, MsStatus::NotMs);
        // c = 2(a + √2·b)
        let l = &demo.extension;
        let two = l.from_int(2);
        let expected = (&ExactMatrix::diagonal(l, &[l.one(), two.clone()])
            + &ExactMatrix::from_ints(l, &[[0, 1], [1, 0]]).scale(&demo.sqrt_s))
            .scale(&two);
        assert_eq!(demo.c, expected);

        assert!(matches!(base_change_demo(&f5, &f5.from_int(4), DEFAULT_BUDGET), Err(Error::SquareParameter)));
        assert!(matches!(base_change_demo(&f5, &f5.one(), DEFAULT_BUDGET), Err(Error::ExcludedParameter)));
        let f7 = f(7);
        assert!(matches!(base_change_demo(&f7, &f7.from_int(-1), DEFAULT_BUDGET), Err(Error::ExcludedParameter)));
    }

    #[test]
    fn base_change_rational() {
        let q = Field::rationals();
        let demo = base_change_demo(&q, &q.from_int(2), DEFAULT_BUDGET).unwrap();
        assert_eq!(demo.base_verdict.method, Method::StructuralCertificate);
        assert!(demo.maximal_over_base);
        assert!(demo.c.is_idempotent());
        assert_eq!(demo.extension_verdict.status, MsStatus::NotMs);
        assert!(matches!(base_change_demo(&q, &q.from_int(9), DEFAULT_BUDGET), Err(Error::SquareParameter)));
    }
}
