//! The document format: a list of named blocks.
//!
//! ```text
//! # comment
//! CATEGORY C
//! OBJECTS
//!   a b
//! MORPHISMS
//!   id_a: a -> a
//!   id_b: b -> b
//!   f: a -> b
//! IDENTITIES
//!   a: id_a
//!   b: id_b
//! COMPOSE
//!   f o id_a = f
//!
//! FUNCTOR N: C -> C
//! OBJECTS
//!   a -> b
//! MORPHISMS
//!   f -> id_b
//!
//! TRANSFORMATION eta: id(C) => N
//!   a: f
//!
//! MONAD T: N eta
//! COMONAD W: M psi
//! REFLECTOR r: T          (functor table into the fixed subcategory of T)
//! COREFLECTOR q: W
//!
//! SPEC s
//! BASE C
//! FIBER a
//!   ELEMENTS lo hi
//!   BOTTOM lo
//!   TOP hi
//!   lo <= hi
//! ACTION f
//!   lo -> lo
//!   hi -> hi
//! ```
//!
//! Tokens are separated by whitespace, so names may contain any other
//! character except `#`. The same blocks have a JSON encoding with one
//! object per block, tagged by `kind`.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub blocks: Vec<Block>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Block {
    Category(CategoryBlock),
    Functor(FunctorBlock),
    Transformation(TransformationBlock),
    Monad(MonadBlock),
    Comonad(MonadBlock),
    Reflector(AdjointBlock),
    Coreflector(AdjointBlock),
    Spec(SpecBlock),
}

impl Block {
    pub fn name(&self) -> &str {
        match self {
            Block::Category(b) => &b.name,
            Block::Functor(b) => &b.name,
            Block::Transformation(b) => &b.name,
            Block::Monad(b) | Block::Comonad(b) => &b.name,
            Block::Reflector(b) | Block::Coreflector(b) => &b.name,
            Block::Spec(b) => &b.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Block::Category(_) => "category",
            Block::Functor(_) => "functor",
            Block::Transformation(_) => "transformation",
            Block::Monad(_) => "monad",
            Block::Comonad(_) => "comonad",
            Block::Reflector(_) => "reflector",
            Block::Coreflector(_) => "coreflector",
            Block::Spec(_) => "spec",
        }
    }

    /// 1-based line of the block header; 0 for documents not read from text.
    pub fn line(&self) -> usize {
        match self {
            Block::Category(b) => b.line,
            Block::Functor(b) => b.line,
            Block::Transformation(b) => b.line,
            Block::Monad(b) | Block::Comonad(b) => b.line,
            Block::Reflector(b) | Block::Coreflector(b) => b.line,
            Block::Spec(b) => b.line,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDecl {
    pub name: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityDecl {
    pub object: String,
    pub morphism: String,
}

/// `g o f = h`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposeDecl {
    pub g: String,
    pub f: String,
    pub h: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mapping {
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryBlock {
    pub name: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDecl>,
    pub identities: Vec<IdentityDecl>,
    pub compose: Vec<ComposeDecl>,
    #[serde(skip)]
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorBlock {
    pub name: String,
    pub source: String,
    pub target: String,
    pub objects: Vec<Mapping>,
    pub morphisms: Vec<Mapping>,
    #[serde(skip)]
    pub line: usize,
}

/// `source` and `target` name functors, or `id(C)` for an identity functor.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformationBlock {
    pub name: String,
    pub source: String,
    pub target: String,
    pub components: Vec<Mapping>,
    #[serde(skip)]
    pub line: usize,
}

/// A monad (functor + unit) or comonad (functor + counit).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadBlock {
    pub name: String,
    pub functor: String,
    pub transformation: String,
    #[serde(skip)]
    pub line: usize,
}

/// A candidate (co)reflector for a named (co)monad, as a functor table from
/// the ambient category into its fixed subcategory.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjointBlock {
    pub name: String,
    pub of: String,
    pub objects: Vec<Mapping>,
    pub morphisms: Vec<Mapping>,
    #[serde(skip)]
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberBlock {
    pub object: String,
    pub elements: Vec<String>,
    pub bottom: Option<String>,
    pub top: Option<String>,
    /// Generating relations `a <= b`; the order is their closure.
    pub relations: Vec<Mapping>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionBlock {
    pub morphism: String,
    pub map: Vec<Mapping>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecBlock {
    pub name: String,
    pub base: String,
    pub fibers: Vec<FiberBlock>,
    pub actions: Vec<ActionBlock>,
    #[serde(skip)]
    pub line: usize,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, i: usize, message: impl Into<String>) -> ParseError {
        let column = self
            .tokens
            .get(i)
            .map(|t| t.column)
            .unwrap_or_else(|| self.tokens.last().map(|t| t.column + t.text.chars().count()).unwrap_or(1));
        ParseError {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn tok(&self, i: usize, what: &str) -> Result<&'a str, ParseError> {
        self.tokens
            .get(i)
            .map(|t| t.text)
            .ok_or_else(|| self.err(i, format!("expected {what}")))
    }

    fn keyword(&self, i: usize, kw: &str) -> Result<(), ParseError> {
        match self.tokens.get(i) {
            Some(t) if t.text == kw => Ok(()),
            Some(t) => Err(self.err(i, format!("expected `{kw}`, found `{}`", t.text))),
            None => Err(self.err(i, format!("expected `{kw}`"))),
        }
    }

    /// A token of the form `name:`.
    fn label(&self, i: usize) -> Result<&'a str, ParseError> {
        let t = self.tok(i, "a name followed by `:`")?;
        match t.strip_suffix(':') {
            Some(name) if !name.is_empty() => Ok(name),
            _ => Err(self.err(i, format!("expected a name followed by `:`, found `{t}`"))),
        }
    }

    fn end(&self, n: usize) -> Result<(), ParseError> {
        match self.tokens.get(n) {
            None => Ok(()),
            Some(t) => Err(self.err(n, format!("unexpected `{}`", t.text))),
        }
    }

    fn arrow(&self, arrow: &str) -> Result<Mapping, ParseError> {
        let from = self.tok(0, "a name")?;
        self.keyword(1, arrow)?;
        let to = self.tok(2, "a name")?;
        self.end(3)?;
        Ok(Mapping {
            from: from.into(),
            to: to.into(),
        })
    }
}

fn lex(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start: Option<usize> = None;
            for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (true, Some(s)) => {
                        tokens.push(Token {
                            text: &content[s..pos],
                            column: content[..s].chars().count() + 1,
                        });
                        start = None;
                    }
                    (false, None) => start = Some(pos),
                    _ => {}
                }
            }
            Line { number: i + 1, tokens }
        })
        .filter(|l| !l.tokens.is_empty())
        .collect()
}

const BLOCK_KEYWORDS: [&str; 8] = [
    "CATEGORY",
    "FUNCTOR",
    "TRANSFORMATION",
    "MONAD",
    "COMONAD",
    "REFLECTOR",
    "COREFLECTOR",
    "SPEC",
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Objects,
    Morphisms,
    Identities,
    Compose,
    Components,
    Fiber,
    Action,
}

/// Parse either encoding; JSON is recognised by a leading `{`.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    if text.trim_start().starts_with('{') {
        return parse_json(text);
    }
    parse_text(text)
}

pub fn parse_json(text: &str) -> Result<Document, ParseError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.blocks.is_empty() {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: "empty document".into(),
        });
    }
    Ok(doc)
}

pub fn parse_text(text: &str) -> Result<Document, ParseError> {
    let lines = lex(text);
    if lines.is_empty() {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: "empty document".into(),
        });
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut section = Section::None;
    for line in &lines {
        let head = line.tokens[0].text;
        if BLOCK_KEYWORDS.contains(&head) {
            blocks.push(parse_header(line)?);
            section = Section::None;
            continue;
        }
        let Some(block) = blocks.last_mut() else {
            return Err(line.err(0, format!("expected a block header such as CATEGORY, found `{head}`")));
        };
        section = parse_body_line(block, section, line)?;
    }
    for block in &blocks {
        if let Block::Spec(s) = block {
            if s.base.is_empty() {
                return Err(ParseError {
                    line: s.line,
                    column: 1,
                    message: format!("spec {} has no BASE line", s.name),
                });
            }
        }
    }
    Ok(Document { blocks })
}

fn parse_header(line: &Line<'_>) -> Result<Block, ParseError> {
    let n = line.number;
    Ok(match line.tokens[0].text {
        "CATEGORY" => {
            let name = line.tok(1, "a category name")?;
            line.end(2)?;
            Block::Category(CategoryBlock {
                name: name.into(),
                line: n,
                ..Default::default()
            })
        }
        "FUNCTOR" => {
            let name = line.label(1)?;
            let source = line.tok(2, "a source category")?;
            line.keyword(3, "->")?;
            let target = line.tok(4, "a target category")?;
            line.end(5)?;
            Block::Functor(FunctorBlock {
                name: name.into(),
                source: source.into(),
                target: target.into(),
                line: n,
                ..Default::default()
            })
        }
        "TRANSFORMATION" => {
            let name = line.label(1)?;
            let source = line.tok(2, "a source functor")?;
            line.keyword(3, "=>")?;
            let target = line.tok(4, "a target functor")?;
            line.end(5)?;
            Block::Transformation(TransformationBlock {
                name: name.into(),
                source: source.into(),
                target: target.into(),
                line: n,
                ..Default::default()
            })
        }
        kw @ ("MONAD" | "COMONAD") => {
            let m = MonadBlock {
                name: line.label(1)?.into(),
                functor: line.tok(2, "a functor name")?.into(),
                transformation: line.tok(3, "a transformation name")?.into(),
                line: n,
            };
            line.end(4)?;
            if kw == "MONAD" {
                Block::Monad(m)
            } else {
                Block::Comonad(m)
            }
        }
        kw @ ("REFLECTOR" | "COREFLECTOR") => {
            let a = AdjointBlock {
                name: line.label(1)?.into(),
                of: line.tok(2, "a (co)monad name")?.into(),
                line: n,
                ..Default::default()
            };
            line.end(3)?;
            if kw == "REFLECTOR" {
                Block::Reflector(a)
            } else {
                Block::Coreflector(a)
            }
        }
        _ => {
            let name = line.tok(1, "a spec name")?;
            line.end(2)?;
            Block::Spec(SpecBlock {
                name: name.into(),
                line: n,
                ..Default::default()
            })
        }
    })
}

fn section_keyword(block: &Block, head: &str) -> Option<Section> {
    match (block, head) {
        (Block::Category(_) | Block::Functor(_) | Block::Reflector(_) | Block::Coreflector(_), "OBJECTS") => {
            Some(Section::Objects)
        }
        (Block::Category(_) | Block::Functor(_) | Block::Reflector(_) | Block::Coreflector(_), "MORPHISMS") => {
            Some(Section::Morphisms)
        }
        (Block::Category(_), "IDENTITIES") => Some(Section::Identities),
        (Block::Category(_), "COMPOSE") => Some(Section::Compose),
        (Block::Transformation(_), "COMPONENTS") => Some(Section::Components),
        (Block::Spec(_), "FIBER") => Some(Section::Fiber),
        (Block::Spec(_), "ACTION") => Some(Section::Action),
        _ => None,
    }
}

fn parse_body_line(block: &mut Block, section: Section, line: &Line<'_>) -> Result<Section, ParseError> {
    let head = line.tokens[0].text;
    if let (Block::Spec(s), "BASE") = (&mut *block, head) {
        if !s.base.is_empty() {
            return Err(line.err(0, "BASE given twice"));
        }
        if !s.fibers.is_empty() || !s.actions.is_empty() {
            return Err(line.err(0, "BASE must come before FIBER and ACTION"));
        }
        s.base = line.tok(1, "a base category")?.into();
        line.end(2)?;
        return Ok(Section::None);
    }
    if let Some(next) = section_keyword(block, head) {
        match (&mut *block, next) {
            (Block::Spec(s), Section::Fiber) => {
                let object = line.tok(1, "a base object")?;
                line.end(2)?;
                s.fibers.push(FiberBlock {
                    object: object.into(),
                    ..Default::default()
                });
            }
            (Block::Spec(s), Section::Action) => {
                let morphism = line.tok(1, "a base morphism")?;
                line.end(2)?;
                s.actions.push(ActionBlock {
                    morphism: morphism.into(),
                    map: Vec::new(),
                });
            }
            _ => line.end(1)?,
        }
        return Ok(next);
    }
    match block {
        Block::Category(c) => match section {
            Section::Objects => c.objects.extend(line.tokens.iter().map(|t| t.text.to_string())),
            Section::Morphisms => {
                let name = line.label(0)?;
                let src = line.tok(1, "a source object")?;
                line.keyword(2, "->")?;
                let dst = line.tok(3, "a target object")?;
                line.end(4)?;
                c.morphisms.push(MorphismDecl {
                    name: name.into(),
                    src: src.into(),
                    dst: dst.into(),
                });
            }
            Section::Identities => {
                let object = line.label(0)?;
                let morphism = line.tok(1, "an identity morphism")?;
                line.end(2)?;
                c.identities.push(IdentityDecl {
                    object: object.into(),
                    morphism: morphism.into(),
                });
            }
            Section::Compose => {
                let g = line.tok(0, "a morphism")?;
                line.keyword(1, "o")?;
                let f = line.tok(2, "a morphism")?;
                line.keyword(3, "=")?;
                let h = line.tok(4, "a morphism")?;
                line.end(5)?;
                c.compose.push(ComposeDecl {
                    g: g.into(),
                    f: f.into(),
                    h: h.into(),
                });
            }
            _ => return Err(line.err(0, "expected OBJECTS, MORPHISMS, IDENTITIES or COMPOSE")),
        },
        Block::Functor(FunctorBlock { objects, morphisms, .. })
        | Block::Reflector(AdjointBlock { objects, morphisms, .. })
        | Block::Coreflector(AdjointBlock { objects, morphisms, .. }) => match section {
            Section::Objects => objects.push(line.arrow("->")?),
            Section::Morphisms => morphisms.push(line.arrow("->")?),
            _ => return Err(line.err(0, "expected OBJECTS or MORPHISMS")),
        },
        Block::Transformation(t) => {
            let object = line.label(0)?;
            let component = line.tok(1, "a component morphism")?;
            line.end(2)?;
            t.components.push(Mapping {
                from: object.into(),
                to: component.into(),
            });
            return Ok(Section::Components);
        }
        Block::Monad(_) | Block::Comonad(_) => {
            return Err(line.err(0, "a (co)monad is a single header line"));
        }
        Block::Spec(s) => match section {
            Section::Fiber => {
                let fiber = s.fibers.last_mut().expect("fiber section");
                match head {
                    "ELEMENTS" => fiber.elements.extend(line.tokens[1..].iter().map(|t| t.text.to_string())),
                    "BOTTOM" | "TOP" => {
                        let x = line.tok(1, "an element")?;
                        line.end(2)?;
                        let slot = if head == "BOTTOM" { &mut fiber.bottom } else { &mut fiber.top };
                        if slot.is_some() {
                            return Err(line.err(0, format!("{head} given twice")));
                        }
                        *slot = Some(x.into());
                    }
                    _ => {
                        // a <= b <= c ...
                        if line.tokens.len() < 3 || line.tokens.len().is_multiple_of(2) {
                            return Err(line.err(line.tokens.len(), "expected `a <= b`"));
                        }
                        for i in (1..line.tokens.len()).step_by(2) {
                            line.keyword(i, "<=")?;
                            fiber.relations.push(Mapping {
                                from: line.tokens[i - 1].text.into(),
                                to: line.tokens[i + 1].text.into(),
                            });
                        }
                    }
                }
            }
            Section::Action => {
                let m = line.arrow("->")?;
                s.actions.last_mut().expect("action section").map.push(m);
            }
            _ => return Err(line.err(0, "expected BASE, FIBER or ACTION")),
        },
    }
    Ok(section)
}

impl fmt::Display for Document {
    /// Canonical text encoding.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            write_block(&mut s, block)?;
        }
        out.write_str(&s)
    }
}

fn write_mappings(s: &mut String, header: &str, items: &[Mapping]) -> fmt::Result {
    if !items.is_empty() {
        writeln!(s, "{header}")?;
        for m in items {
            writeln!(s, "  {} -> {}", m.from, m.to)?;
        }
    }
    Ok(())
}

fn write_block(s: &mut String, block: &Block) -> fmt::Result {
    match block {
        Block::Category(c) => {
            writeln!(s, "CATEGORY {}", c.name)?;
            writeln!(s, "OBJECTS")?;
            for o in &c.objects {
                writeln!(s, "  {o}")?;
            }
            if !c.morphisms.is_empty() {
                writeln!(s, "MORPHISMS")?;
                for m in &c.morphisms {
                    writeln!(s, "  {}: {} -> {}", m.name, m.src, m.dst)?;
                }
            }
            if !c.identities.is_empty() {
                writeln!(s, "IDENTITIES")?;
                for i in &c.identities {
                    writeln!(s, "  {}: {}", i.object, i.morphism)?;
                }
            }
            if !c.compose.is_empty() {
                writeln!(s, "COMPOSE")?;
                for k in &c.compose {
                    writeln!(s, "  {} o {} = {}", k.g, k.f, k.h)?;
                }
            }
        }
        Block::Functor(f) => {
            writeln!(s, "FUNCTOR {}: {} -> {}", f.name, f.source, f.target)?;
            write_mappings(s, "OBJECTS", &f.objects)?;
            write_mappings(s, "MORPHISMS", &f.morphisms)?;
        }
        Block::Transformation(t) => {
            writeln!(s, "TRANSFORMATION {}: {} => {}", t.name, t.source, t.target)?;
            for c in &t.components {
                writeln!(s, "  {}: {}", c.from, c.to)?;
            }
        }
        Block::Monad(m) => writeln!(s, "MONAD {}: {} {}", m.name, m.functor, m.transformation)?,
        Block::Comonad(m) => writeln!(s, "COMONAD {}: {} {}", m.name, m.functor, m.transformation)?,
        Block::Reflector(a) | Block::Coreflector(a) => {
            let kw = if matches!(block, Block::Reflector(_)) { "REFLECTOR" } else { "COREFLECTOR" };
            writeln!(s, "{kw} {}: {}", a.name, a.of)?;
            write_mappings(s, "OBJECTS", &a.objects)?;
            write_mappings(s, "MORPHISMS", &a.morphisms)?;
        }
        Block::Spec(sp) => {
            writeln!(s, "SPEC {}", sp.name)?;
            writeln!(s, "BASE {}", sp.base)?;
            for f in &sp.fibers {
                writeln!(s, "FIBER {}", f.object)?;
                writeln!(s, "  ELEMENTS {}", f.elements.join(" "))?;
                if let Some(b) = &f.bottom {
                    writeln!(s, "  BOTTOM {b}")?;
                }
                if let Some(t) = &f.top {
                    writeln!(s, "  TOP {t}")?;
                }
                for r in &f.relations {
                    writeln!(s, "  {} <= {}", r.from, r.to)?;
                }
            }
            for a in &sp.actions {
                writeln!(s, "ACTION {}", a.morphism)?;
                for m in &a.map {
                    writeln!(s, "  {} -> {}", m.from, m.to)?;
                }
            }
        }
    }
    Ok(())
}

impl Document {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}
