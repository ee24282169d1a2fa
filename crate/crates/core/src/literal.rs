//! JSON literal formats.
//!
//! * field: `{"p": int, "k": int, "modulus": [coeff, …]?}` with `p = 0` for the
//!   rationals and the modulus given as ascending coefficients of a monic
//!   polynomial (present iff `k > 1`);
//! * matrix: the field keys plus `"rows": [[scalar, …], …]`;
//! * subspace: `{"field": field, "n": int, "basis": [matrix, …]}`.
//!
//! Scalars are integers over a prime field, `"num/den"` strings over the
//! rationals, and ascending coefficient lists over extensions. Emitted subspace
//! literals always carry the canonical basis.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::algebra::{ExactMatrix, Field, FieldSpec, Scalar};
use crate::error::{Error, Result};
use crate::subspace::MatSubspace;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct FieldLiteral {
    p: u64,
    #[serde(default = "default_degree")]
    k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<Vec<Value>>,
}

fn default_degree() -> u32 {
    1
}

fn rational_literal(x: &BigRational) -> Value {
    Value::String(format!("{}/{}", x.numer(), x.denom()))
}

/// Parse an integer or `"num/den"` string as a rational.
pub fn parse_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else if let Some(u) = n.as_u64() {
                Ok(BigRational::from_integer(u.into()))
            } else {
                Err(Error::Literal(format!("non-integer number {n}")))
            }
        }
        Value::String(s) => {
            let s = s.trim();
            let parse = |t: &str| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::Literal(format!("bad integer {t:?}: {e}")))
            };
            match s.split_once('/') {
                Some((num, den)) => {
                    let den = parse(den)?;
                    if den == BigInt::from(0) {
                        return Err(Error::Literal(format!("zero denominator in {s:?}")));
                    }
                    Ok(BigRational::new(parse(num)?, den))
                }
                None => Ok(BigRational::from_integer(parse(s)?)),
            }
        }
        other => Err(Error::Literal(format!("expected a number, got {other}"))),
    }
}

impl FieldLiteral {
    fn from_spec(spec: &FieldSpec) -> Self {
        let modulus = spec.modulus.as_ref().map(|m| {
            m.iter()
                .map(|c| {
                    if spec.characteristic > 0 {
                        Value::from(c.numer().to_string().parse::<u64>().unwrap())
                    } else {
                        rational_literal(c)
                    }
                })
                .collect()
        });
        FieldLiteral {
            p: spec.characteristic,
            k: spec.extension_degree,
            modulus,
        }
    }

    fn to_field(&self) -> Result<Field> {
        let modulus = match &self.modulus {
            Some(m) => Some(m.iter().map(parse_rational).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        Field::from_spec(&FieldSpec {
            characteristic: self.p,
            extension_degree: self.k,
            modulus,
        })
    }
}

pub fn scalar_to_literal(field: &Field, x: &Scalar) -> Value {
    match x {
        Scalar::Finite(v) if field.degree() == 1 => Value::from(*v),
        Scalar::Rational(r) => rational_literal(r),
        Scalar::Finite(_) => Value::Array(
            field
                .coefficients(x)
                .iter()
                .map(|c| Value::from(c.numer().to_string().parse::<u64>().unwrap()))
                .collect(),
        ),
        Scalar::RationalExt(c) => Value::Array(c.iter().map(rational_literal).collect()),
    }
}

pub fn scalar_from_literal(field: &Field, v: &Value) -> Result<Scalar> {
    match v {
        Value::Array(items) => {
            let coeffs = items.iter().map(parse_rational).collect::<Result<Vec<_>>>()?;
            field.from_coefficients(&coeffs)
        }
        other => field.from_rational(&parse_rational(other)?),
    }
}

/// Parse a field literal (`{"p":…, "k":…, "modulus":…}`).
pub fn field_from_value(v: &Value) -> Result<Field> {
    let lit: FieldLiteral =
        serde_json::from_value(v.clone()).map_err(|e| Error::Literal(e.to_string()))?;
    lit.to_field()
}

pub fn field_to_value(field: &Field) -> Value {
    serde_json::to_value(FieldLiteral::from_spec(field.spec())).unwrap()
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldLiteral::from_spec(self).serialize(s)
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FieldLiteral::deserialize(d)?.to_field().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixLiteral {
    #[serde(flatten)]
    field: FieldLiteral,
    rows: Vec<Vec<Value>>,
}

/// Parse a matrix given over a known field; the literal's own field keys, if
/// any, must agree.
pub fn matrix_from_value(v: &Value, field: Option<&Field>) -> Result<ExactMatrix> {
    let rows_v = v
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Literal("matrix literal needs \"rows\"".into()))?;
    let own = if v.get("p").is_some() {
        Some(field_from_value(v)?)
    } else {
        None
    };
    let field = match (own, field) {
        (Some(a), Some(b)) if &a != b => {
            return Err(Error::MixedFields(format!("matrix over {a}, expected {b}")))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b.clone(),
        (None, None) => return Err(Error::Literal("matrix literal needs a field".into())),
    };
    let rows = rows_v
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Literal("matrix row must be an array".into()))?
                .iter()
                .map(|x| scalar_from_literal(&field, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ExactMatrix::from_rows(&field, rows)
}

pub fn matrix_to_value(m: &ExactMatrix) -> Value {
    let rows = m
        .row_vecs()
        .iter()
        .map(|r| r.iter().map(|x| scalar_to_literal(m.field(), x)).collect())
        .collect();
    serde_json::to_value(MatrixLiteral {
        field: FieldLiteral::from_spec(m.field().spec()),
        rows,
    })
    .unwrap()
}

impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_value(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        matrix_from_value(&v, None).map_err(D::Error::custom)
    }
}

pub fn subspace_from_value(v: &Value) -> Result<MatSubspace> {
    let field = field_from_value(
        v.get("field")
            .ok_or_else(|| Error::Literal("subspace literal needs \"field\"".into()))?,
    )?;
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Literal("subspace literal needs \"n\"".into()))? as usize;
    let basis = v
        .get("basis")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Literal("subspace literal needs \"basis\"".into()))?
        .iter()
        .map(|m| matrix_from_value(m, Some(&field)))
        .collect::<Result<Vec<_>>>()?;
    MatSubspace::span_of(&field, n, &basis)
}

pub fn subspace_to_value(s: &MatSubspace) -> Value {
    serde_json::json!({
        "field": field_to_value(s.field()),
        "n": s.n(),
        "basis": s.basis().iter().map(matrix_to_value).collect::<Vec<_>>(),
    })
}

impl Serialize for MatSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        subspace_to_value(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatSubspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        subspace_from_value(&v).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn prime_matrix_round_trip() {
        let f5 = Field::prime(5).unwrap();
        let m = ExactMatrix::from_ints(&f5, &[[1, 2], [3, 4]]);
        let v = matrix_to_value(&m);
        assert_eq!(v, json!({"p": 5, "k": 1, "rows": [[1, 2], [3, 4]]}));
        assert_eq!(matrix_from_value(&v, None).unwrap(), m);
    }

    #[test]
    fn rational_literals() {
        let v = json!({"p": 0, "k": 1, "rows": [["1/2", 3], ["-4/6", "0"]]});
        let m = matrix_from_value(&v, None).unwrap();
        let out = matrix_to_value(&m);
        assert_eq!(out["rows"], json!([["1/2", "3/1"], ["-2/3", "0/1"]]));
    }

    #[test]
    fn extension_literals() {
        let v = json!({"p": 5, "k": 2, "modulus": [3, 0, 1], "rows": [[[1, 2], 0], [[0, 1], [4]]]});
        let m = matrix_from_value(&v, None).unwrap();
        let f = m.field().clone();
        assert_eq!(f.order(), Some(25));
        let t = f.generator().unwrap();
        assert_eq!(m.get(1, 0), &t);
        let back = matrix_to_value(&m);
        assert_eq!(back["rows"][0][0], json!([1, 2]));
        assert_eq!(back["rows"][1][1], json!([4, 0]));
        assert_eq!(matrix_from_value(&back, None).unwrap(), m);
    }

    #[test]
    fn subspace_round_trip_is_canonical() {
        let v = json!({
            "field": {"p": 3, "k": 1},
            "n": 2,
            "basis": [
                {"p": 3, "k": 1, "rows": [[1, 1], [0, 0]]},
                {"p": 3, "k": 1, "rows": [[2, 0], [0, 0]]}
            ]
        });
        let s = subspace_from_value(&v).unwrap();
        assert_eq!(s.dim(), 2);
        let emitted = subspace_to_value(&s);
        assert_eq!(emitted["basis"][0]["rows"], json!([[1, 0], [0, 0]]));
        assert_eq!(subspace_from_value(&emitted).unwrap(), s);
    }

    #[test]
    fn rejects_mixed_fields_and_bad_scalars() {
        let v = json!({
            "field": {"p": 3, "k": 1},
            "n": 2,
            "basis": [{"p": 5, "k": 1, "rows": [[1, 0], [0, 0]]}]
        });
        assert!(matches!(subspace_from_value(&v), Err(Error::MixedFields(_))));
        let bad = json!({"p": 0, "k": 1, "rows": [["1/0"]]});
        assert!(matrix_from_value(&bad, None).is_err());
        let bad_field = json!({"p": 6, "k": 1, "rows": [[1]]});
        assert!(matrix_from_value(&bad_field, None).is_err());
    }
}
