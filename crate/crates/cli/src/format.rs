//! The `.trc` presentation format.
//!
//! ```toml
//! version = 1
//! field = "QQ"
//! period = 2
//! objects = ["T1", "S-1T1"]
//! sigma = ["S-1T1", "T1"]
//!
//! [generators]
//! every_indecomposable = true
//! objects = []
//!
//! [[hom]]
//! from = "T1"
//! to = "T1"
//! dim = 1
//! identity = ["1"]
//!
//! [[hom]]
//! from = "S-1T1"
//! to = "S-1T1"
//! dim = 1
//! identity = ["1"]
//!
//! [[compose]]
//! path = ["T1", "T1", "T1"]
//! entries = [[0, 0, 0, "1"]]
//!
//! [[compose]]
//! path = ["S-1T1", "S-1T1", "S-1T1"]
//! entries = [[0, 0, 0, "1"]]
//!
//! [[sigma_map]]
//! from = "T1"
//! to = "T1"
//! rows = [["1"]]
//!
//! [[sigma_map]]
//! from = "S-1T1"
//! to = "S-1T1"
//! rows = [["1"]]
//!
//! [[triangle]]
//! name = "ar_T1"
//! f = { source = ["S-1T1"], target = [], blocks = [] }
//! g = { source = [], target = ["T1"], blocks = [[]] }
//! h = { source = ["T1"], target = ["T1"], blocks = [[["1"]]] }
//!
//! [[morphism]]
//! name = "conn_T1"
//! source = ["T1"]
//! target = ["T1"]
//! blocks = [[["1"]]]
//! ```
//!
//! Unlisted hom spaces are zero. `sigma_map` for `(X, Y)` is the matrix of
//! `Hom(X,Y) -> Hom(ΣX,ΣY)`. Coefficients are rationals written as
//! strings (`"-3/2"`) or bare integers.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::Range;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;
use trirank::category::{CompositionEntry, Generators, MorphismMatrix, ObjectExpr, PresentationData, TrianglePresentation};
use trirank::{CategoryPresentation, Matrix, Scalar};

pub const FORMAT_VERSION: i64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(text: &str, span: Option<Range<usize>>, message: impl Into<String>) -> Self {
        let (line, column) = span.map_or((1, 1), |s| line_col(text, s.start));
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
pub(crate) enum Coeff {
    Int(i64),
    Str(String),
}

pub(crate) fn parse_scalar(c: &Spanned<Coeff>, text: &str) -> Result<Scalar, ParseError> {
    match c.get_ref() {
        Coeff::Int(v) => Ok(Scalar::from_integer((*v).into())),
        Coeff::Str(s) => s
            .trim()
            .parse::<Scalar>()
            .map_err(|_| ParseError::at(text, Some(c.span()), format!("expected a rational number, found {s:?}"))),
    }
}

type Name = Spanned<String>;
type RawBlocks = Spanned<Vec<Vec<Vec<Spanned<Coeff>>>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPresentation {
    version: Spanned<i64>,
    #[serde(default = "default_field")]
    field: String,
    period: Option<usize>,
    objects: Vec<Name>,
    sigma: Spanned<Vec<Name>>,
    #[serde(default)]
    generators: RawGenerators,
    #[serde(default)]
    hom: Vec<Spanned<RawHom>>,
    #[serde(default)]
    compose: Vec<Spanned<RawCompose>>,
    #[serde(default)]
    sigma_map: Vec<Spanned<RawSigmaMap>>,
    #[serde(default)]
    triangle: Vec<RawTriangle>,
    #[serde(default)]
    morphism: Vec<RawNamedMorphism>,
}

fn default_field() -> String {
    "QQ".into()
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGenerators {
    #[serde(default)]
    every_indecomposable: bool,
    #[serde(default)]
    objects: Vec<Name>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHom {
    from: Name,
    to: Name,
    dim: usize,
    identity: Option<Vec<Spanned<Coeff>>>,
}

/// `(g index, f index, result index, coefficient)`.
type RawEntry = (usize, usize, usize, Spanned<Coeff>);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompose {
    path: Spanned<Vec<Name>>,
    entries: Vec<Spanned<RawEntry>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSigmaMap {
    from: Name,
    to: Name,
    rows: Vec<Vec<Spanned<Coeff>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawMorphism {
    source: Vec<Name>,
    target: Vec<Name>,
    blocks: RawBlocks,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTriangle {
    name: String,
    f: RawMorphism,
    g: RawMorphism,
    h: RawMorphism,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNamedMorphism {
    name: String,
    source: Vec<Name>,
    target: Vec<Name>,
    blocks: RawBlocks,
}

struct Resolver<'a> {
    text: &'a str,
    index: HashMap<String, usize>,
}

impl Resolver<'_> {
    fn object(&self, name: &Name) -> Result<usize, ParseError> {
        self.index
            .get(name.get_ref())
            .copied()
            .ok_or_else(|| ParseError::at(self.text, Some(name.span()), format!("unknown object {:?}", name.get_ref())))
    }

    fn expr(&self, names: &[Name]) -> Result<ObjectExpr, ParseError> {
        names.iter().map(|n| self.object(n)).collect::<Result<_, _>>().map(ObjectExpr::new)
    }

    fn scalars(&self, cs: &[Spanned<Coeff>]) -> Result<Vec<Scalar>, ParseError> {
        cs.iter().map(|c| parse_scalar(c, self.text)).collect()
    }

    fn morphism(&self, m: &RawMorphism, dims: &[Vec<usize>]) -> Result<MorphismMatrix, ParseError> {
        self.matrix(&m.source, &m.target, &m.blocks, dims)
    }

    fn matrix(
        &self,
        source: &[Name],
        target: &[Name],
        raw_blocks: &RawBlocks,
        dims: &[Vec<usize>],
    ) -> Result<MorphismMatrix, ParseError> {
        let source = self.expr(source)?;
        let target = self.expr(target)?;
        let err = |msg: String| ParseError::at(self.text, Some(raw_blocks.span()), msg);
        if raw_blocks.get_ref().len() != target.len() {
            return Err(err(format!(
                "expected {} block rows (one per target summand), found {}",
                target.len(),
                raw_blocks.get_ref().len()
            )));
        }
        let mut blocks = Vec::with_capacity(target.len());
        for (j, row) in raw_blocks.get_ref().iter().enumerate() {
            if row.len() != source.len() {
                return Err(err(format!(
                    "block row {j} needs {} entries (one per source summand), found {}",
                    source.len(),
                    row.len()
                )));
            }
            let mut out_row = Vec::with_capacity(row.len());
            for (i, b) in row.iter().enumerate() {
                let d = dims[source.summands()[i]][target.summands()[j]];
                if b.len() != d {
                    return Err(err(format!("block ({j},{i}) needs {d} coefficients, found {}", b.len())));
                }
                out_row.push(self.scalars(b)?);
            }
            blocks.push(out_row);
        }
        Ok(MorphismMatrix::new(source, target, blocks))
    }
}

/// Parses and structurally checks a presentation.
pub fn parse_presentation(text: &str) -> Result<CategoryPresentation, ParseError> {
    let raw: RawPresentation = toml::from_str(text).map_err(|e| ParseError::at(text, e.span(), e.message()))?;
    if *raw.version.get_ref() != FORMAT_VERSION {
        return Err(ParseError::at(
            text,
            Some(raw.version.span()),
            format!("unsupported format version {}, expected {FORMAT_VERSION}", raw.version.get_ref()),
        ));
    }
    let mut index = HashMap::new();
    for (i, name) in raw.objects.iter().enumerate() {
        if index.insert(name.get_ref().clone(), i).is_some() {
            return Err(ParseError::at(
                text,
                Some(name.span()),
                format!("duplicate object name {:?}", name.get_ref()),
            ));
        }
    }
    let r = Resolver { text, index };
    let n = raw.objects.len();

    if raw.sigma.get_ref().len() != n {
        return Err(ParseError::at(
            text,
            Some(raw.sigma.span()),
            format!("sigma lists {} images for {n} objects", raw.sigma.get_ref().len()),
        ));
    }
    let sigma = raw.sigma.get_ref().iter().map(|s| r.object(s)).collect::<Result<Vec<_>, _>>()?;

    let mut hom_dims = vec![vec![0; n]; n];
    let mut identities: Vec<Option<Vec<Scalar>>> = vec![None; n];
    let mut seen_hom = vec![vec![false; n]; n];
    for h in &raw.hom {
        let (x, y) = (r.object(&h.get_ref().from)?, r.object(&h.get_ref().to)?);
        if std::mem::replace(&mut seen_hom[x][y], true) {
            return Err(ParseError::at(text, Some(h.span()), "hom space listed twice"));
        }
        hom_dims[x][y] = h.get_ref().dim;
        match (&h.get_ref().identity, x == y) {
            (Some(id), true) => identities[x] = Some(r.scalars(id)?),
            (None, true) => return Err(ParseError::at(text, Some(h.span()), "endomorphism space needs an identity")),
            (Some(_), false) => {
                return Err(ParseError::at(text, Some(h.span()), "identity given for a hom space between different objects"))
            }
            (None, false) => {}
        }
    }
    let identities = identities
        .into_iter()
        .enumerate()
        .map(|(x, id)| {
            id.ok_or_else(|| {
                ParseError::at(text, Some(raw.objects[x].span()), format!("no [[hom]] entry for End({})", raw.objects[x].get_ref()))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut composition: BTreeMap<(usize, usize, usize), Vec<CompositionEntry>> = BTreeMap::new();
    for c in &raw.compose {
        let path = c.get_ref().path.get_ref();
        if path.len() != 3 {
            return Err(ParseError::at(
                text,
                Some(c.get_ref().path.span()),
                "path must list three objects X, Y, Z",
            ));
        }
        let (x, y, z) = (r.object(&path[0])?, r.object(&path[1])?, r.object(&path[2])?);
        let (dg, df, dh) = (hom_dims[y][z], hom_dims[x][y], hom_dims[x][z]);
        let entries = composition.entry((x, y, z)).or_default();
        for e in &c.get_ref().entries {
            let (g, f, h, coeff) = e.get_ref();
            if *g >= dg || *f >= df || *h >= dh {
                return Err(ParseError::at(
                    text,
                    Some(e.span()),
                    format!("entry ({g}, {f}, {h}) out of range for hom dimensions ({dg}, {df}, {dh})"),
                ));
            }
            entries.push(CompositionEntry {
                g: *g,
                f: *f,
                h: *h,
                coeff: parse_scalar(coeff, text)?,
            });
        }
    }

    let mut sigma_maps = BTreeMap::new();
    for s in &raw.sigma_map {
        let (x, y) = (r.object(&s.get_ref().from)?, r.object(&s.get_ref().to)?);
        let (rows, cols) = (hom_dims[sigma[x]][sigma[y]], hom_dims[x][y]);
        let data = &s.get_ref().rows;
        if data.len() != rows || data.iter().any(|row| row.len() != cols) {
            return Err(ParseError::at(text, Some(s.span()), format!("sigma matrix must be {rows}x{cols}")));
        }
        let m_rows = data.iter().map(|row| r.scalars(row)).collect::<Result<Vec<_>, _>>()?;
        let m = Matrix::from_rows(cols, m_rows).expect("checked shape");
        if sigma_maps.insert((x, y), m).is_some() {
            return Err(ParseError::at(text, Some(s.span()), "sigma matrix listed twice"));
        }
    }
    for x in 0..n {
        for y in 0..n {
            let (rows, cols) = (hom_dims[sigma[x]][sigma[y]], hom_dims[x][y]);
            if (rows > 0 || cols > 0) && !sigma_maps.contains_key(&(x, y)) {
                return Err(ParseError::at(
                    text,
                    Some(raw.sigma.span()),
                    format!(
                        "missing [[sigma_map]] for ({}, {})",
                        raw.objects[x].get_ref(),
                        raw.objects[y].get_ref()
                    ),
                ));
            }
        }
    }

    let triangles = raw
        .triangle
        .iter()
        .map(|t| {
            Ok(TrianglePresentation {
                name: t.name.clone(),
                f: r.morphism(&t.f, &hom_dims)?,
                g: r.morphism(&t.g, &hom_dims)?,
                h: r.morphism(&t.h, &hom_dims)?,
            })
        })
        .collect::<Result<Vec<_>, ParseError>>()?;
    let morphisms = raw
        .morphism
        .iter()
        .map(|m| Ok((m.name.clone(), r.matrix(&m.source, &m.target, &m.blocks, &hom_dims)?)))
        .collect::<Result<Vec<_>, ParseError>>()?;
    let generators = Generators {
        every_indecomposable: raw.generators.every_indecomposable,
        objects: raw
            .generators
            .objects
            .iter()
            .map(|g| r.object(g))
            .collect::<Result<_, _>>()?,
    };

    let data = PresentationData {
        objects: raw.objects.iter().map(|o| o.get_ref().clone()).collect(),
        hom_dims,
        composition,
        identities,
        sigma,
        sigma_maps,
        triangles,
        morphisms,
        generators,
        field: raw.field,
        period: raw.period,
    };
    CategoryPresentation::new(data).map_err(|e| ParseError::at(text, None, e.to_string()))
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn name_list(p: &CategoryPresentation, e: &ObjectExpr) -> String {
    let names: Vec<String> = e.summands().iter().map(|&x| quote(p.name(x))).collect();
    format!("[{}]", names.join(", "))
}

fn scalar_list(v: &[Scalar]) -> String {
    let items: Vec<String> = v.iter().map(|c| quote(&c.to_string())).collect();
    format!("[{}]", items.join(", "))
}

fn blocks(m: &MorphismMatrix) -> String {
    let rows: Vec<String> = m
        .blocks()
        .iter()
        .map(|row| format!("[{}]", row.iter().map(|b| scalar_list(b)).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn inline_morphism(p: &CategoryPresentation, m: &MorphismMatrix) -> String {
    format!(
        "{{ source = {}, target = {}, blocks = {} }}",
        name_list(p, m.source()),
        name_list(p, m.target()),
        blocks(m)
    )
}

/// Canonical text form; `parse_presentation` inverts it exactly.
pub fn serialize_presentation(p: &CategoryPresentation) -> String {
    let d = p.data();
    let n = p.num_objects();
    let mut s = String::new();
    let names = |xs: &mut dyn Iterator<Item = usize>| {
        format!("[{}]", xs.map(|x| quote(p.name(x))).collect::<Vec<_>>().join(", "))
    };
    writeln!(s, "version = {FORMAT_VERSION}").unwrap();
    writeln!(s, "field = {}", quote(&d.field)).unwrap();
    if let Some(period) = d.period {
        writeln!(s, "period = {period}").unwrap();
    }
    writeln!(s, "objects = {}", names(&mut (0..n))).unwrap();
    writeln!(s, "sigma = {}", names(&mut (0..n).map(|x| p.sigma(x)))).unwrap();

    writeln!(s, "\n[generators]").unwrap();
    writeln!(s, "every_indecomposable = {}", d.generators.every_indecomposable).unwrap();
    writeln!(s, "objects = {}", names(&mut d.generators.objects.iter().copied())).unwrap();

    for x in 0..n {
        for y in 0..n {
            let dim = p.hom_dim(x, y);
            if dim == 0 {
                continue;
            }
            writeln!(s, "\n[[hom]]\nfrom = {}\nto = {}\ndim = {dim}", quote(p.name(x)), quote(p.name(y))).unwrap();
            if x == y {
                writeln!(s, "identity = {}", scalar_list(p.identity_vector(x))).unwrap();
            }
        }
    }
    for ((x, y, z), entries) in &d.composition {
        let items: Vec<String> = entries
            .iter()
            .map(|e| format!("[{}, {}, {}, {}]", e.g, e.f, e.h, quote(&e.coeff.to_string())))
            .collect();
        writeln!(
            s,
            "\n[[compose]]\npath = {}\nentries = [{}]",
            names(&mut [*x, *y, *z].into_iter()),
            items.join(", ")
        )
        .unwrap();
    }
    for ((x, y), m) in &d.sigma_maps {
        if m.rows() == 0 && m.cols() == 0 {
            continue;
        }
        let rows: Vec<String> = m.to_rows().iter().map(|r| scalar_list(r)).collect();
        writeln!(
            s,
            "\n[[sigma_map]]\nfrom = {}\nto = {}\nrows = [{}]",
            quote(p.name(*x)),
            quote(p.name(*y)),
            rows.join(", ")
        )
        .unwrap();
    }
    for t in &d.triangles {
        writeln!(
            s,
            "\n[[triangle]]\nname = {}\nf = {}\ng = {}\nh = {}",
            quote(&t.name),
            inline_morphism(p, &t.f),
            inline_morphism(p, &t.g),
            inline_morphism(p, &t.h)
        )
        .unwrap();
    }
    for (name, m) in &d.morphisms {
        writeln!(
            s,
            "\n[[morphism]]\nname = {}\nsource = {}\ntarget = {}\nblocks = {}",
            quote(name),
            name_list(p, m.source()),
            name_list(p, m.target()),
            blocks(m)
        )
        .unwrap();
    }
    s
}
