//! Value tables: `.rf` rank-function files and `.qv` q-value files.
//!
//! ```toml
//! version = 1
//! presentation = "a3.trc"   # optional, relative to this file
//!
//! [coefficients]            # or [object_values]
//! T1 = "1"
//! T2 = 0
//! ```
//!
//! In a `.qv` file every value is a module element: a bare integer, a list
//! of coefficients of `1, q, q², …`, or `{ low = -1, coeffs = [...] }`.
//! Missing coefficients are zero; missing object values stay unknown.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Deserialize;
use toml::Spanned;
use trirank::category::ObjectId;
use trirank::qrank::{Element, Instance};
use trirank::{CategoryPresentation, RankFunction, Scalar};

use crate::format::{parse_scalar, Coeff, ParseError, FORMAT_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Coefficients,
    ObjectValues,
}

impl TableKind {
    fn key(self) -> &'static str {
        match self {
            TableKind::Coefficients => "coefficients",
            TableKind::ObjectValues => "object_values",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry<T> {
    pub object: String,
    pub value: T,
    pub line: usize,
    pub column: usize,
}

/// A parsed table whose object names are not yet resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueFile<T> {
    pub presentation: Option<String>,
    pub kind: TableKind,
    pub entries: Vec<Entry<T>>,
}

pub type RankFile = ValueFile<Scalar>;
pub type QValueFile = ValueFile<Element>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile<V> {
    version: Spanned<i64>,
    presentation: Option<String>,
    coefficients: Option<Spanned<BTreeMap<Spanned<String>, V>>>,
    object_values: Option<Spanned<BTreeMap<Spanned<String>, V>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawElement {
    Int(i64),
    Dense(Vec<Coeff>),
    Shifted { low: i64, coeffs: Vec<Coeff> },
}

fn parse_file<V, T>(
    text: &str,
    value: impl Fn(&V, usize) -> Result<T, ParseError>,
) -> Result<ValueFile<T>, ParseError>
where
    V: for<'de> Deserialize<'de>,
{
    let raw: RawFile<V> = toml::from_str(text).map_err(|e| ParseError::at(text, e.span(), e.message()))?;
    if *raw.version.get_ref() != FORMAT_VERSION {
        return Err(ParseError::at(
            text,
            Some(raw.version.span()),
            format!("unsupported version {}, expected {FORMAT_VERSION}", raw.version.get_ref()),
        ));
    }
    let (kind, table) = match (raw.coefficients, raw.object_values) {
        (Some(t), None) => (TableKind::Coefficients, t),
        (None, Some(t)) => (TableKind::ObjectValues, t),
        (Some(_), Some(t)) => {
            return Err(ParseError::at(
                text,
                Some(t.span()),
                "give either [coefficients] or [object_values], not both",
            ))
        }
        (None, None) => return Err(ParseError::at(text, None, "missing [coefficients] or [object_values] table")),
    };
    let mut entries: Vec<(usize, Entry<T>)> = Vec::new();
    for (name, v) in table.into_inner() {
        let at = name.span().start;
        let (line, column) = position(text, at);
        entries.push((
            at,
            Entry {
                object: name.into_inner(),
                value: value(&v, at)?,
                line,
                column,
            },
        ));
    }
    entries.sort_by_key(|(offset, _)| *offset);
    Ok(ValueFile {
        presentation: raw.presentation,
        kind,
        entries: entries.into_iter().map(|(_, e)| e).collect(),
    })
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let e = ParseError::at(text, Some(offset..offset), "");
    (e.line, e.column)
}

pub fn parse_rank_file(text: &str) -> Result<RankFile, ParseError> {
    parse_file(text, |c: &Spanned<Coeff>, _| parse_scalar(c, text))
}

/// Elements are kept unreduced; [`QValueFile::resolve_elements`] reduces
/// them for an instance.
pub fn parse_qvalue_file(text: &str) -> Result<QValueFile, ParseError> {
    let integer = |c: &Coeff, at: usize| -> Result<BigInt, ParseError> {
        let s = match c {
            Coeff::Int(v) => Some(Scalar::from_integer((*v).into())),
            Coeff::Str(s) => s.trim().parse::<Scalar>().ok(),
        };
        match s {
            Some(s) if s.is_integer() => Ok(s.to_integer()),
            _ => Err(ParseError::at(text, Some(at..at), "q-values must have integer coefficients")),
        }
    };
    let terms = |low: i64, coeffs: &[Coeff], at: usize| -> Result<Element, ParseError> {
        let mut out = Vec::with_capacity(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            out.push((low + i as i64, integer(c, at)?));
        }
        Ok(Instance::Laurent.element(out))
    };
    parse_file(text, |v: &RawElement, at| match v {
        RawElement::Int(i) => Ok(Instance::Laurent.constant(*i)),
        RawElement::Dense(cs) => terms(0, cs, at),
        RawElement::Shifted { low, coeffs } => terms(*low, coeffs, at),
    })
}

impl<T: Clone> ValueFile<T> {
    /// One slot per object of `p`, in object order.
    pub fn resolve(&self, p: &CategoryPresentation) -> Result<Vec<Option<T>>, ParseError> {
        let mut out: Vec<Option<T>> = vec![None; p.num_objects()];
        for e in &self.entries {
            let x: ObjectId = p.object(&e.object).map_err(|_| ParseError {
                line: e.line,
                column: e.column,
                message: format!("unknown object {:?}", e.object),
            })?;
            out[x] = Some(e.value.clone());
        }
        Ok(out)
    }
}

impl QValueFile {
    pub fn resolve_elements(&self, p: &CategoryPresentation, inst: Instance) -> Result<Vec<Option<Element>>, ParseError> {
        Ok(self
            .resolve(p)?
            .into_iter()
            .map(|v| v.map(|e| inst.element(e.terms().iter().map(|(k, c)| (*k, c.clone())))))
            .collect())
    }
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Canonical `.rf` text listing every coefficient in object order.
pub fn serialize_rank_function(rho: &RankFunction, presentation: Option<&str>) -> String {
    let p = rho.category();
    let mut s = format!("version = {FORMAT_VERSION}\n");
    if let Some(path) = presentation {
        writeln!(s, "presentation = {}", quote(path)).unwrap();
    }
    writeln!(s, "\n[{}]", TableKind::Coefficients.key()).unwrap();
    for (x, c) in rho.coefficients().iter().enumerate() {
        writeln!(s, "{} = {}", quote(p.name(x)), quote(&c.to_string())).unwrap();
    }
    s
}
