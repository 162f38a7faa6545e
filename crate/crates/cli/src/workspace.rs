//! Loaded artifacts, keyed by kind and name, each with its validation outcome.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use catmn_core::fibered::{validate_spec, FiberedSpec, Poset};
use catmn_core::fincat::validate_category;
use catmn_core::functor::{validate_functor, validate_nat};
use catmn_core::monad::{
    check_idempotent_comonad, check_idempotent_monad, fixed_subcategory_comonad, fixed_subcategory_monad,
    verify_coreflection, verify_reflection, ComonadDatum, CoreflectionPackage, MonadDatum, ReflectionPackage,
};
use catmn_core::{CatError, Category, Functor, Mor, NatTrans, Obj, ValidationReport};
use thiserror::Error;

use crate::syntax::{
    Block, CategoryBlock, ComposeDecl, Document, FiberBlock, FunctorBlock, IdentityDecl, Mapping,
    MonadBlock, MorphismDecl, SpecBlock, TransformationBlock,
};

/// A document that parsed but refers to something that does not exist or
/// does not fit.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {kind} {name}: {message}")]
pub struct LoadError {
    pub line: usize,
    pub kind: &'static str,
    pub name: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub file: Option<PathBuf>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Valid,
    Invalid,
    /// Not checked because something it is built on failed.
    Unvalidated { because: String },
}

/// Validation outcome of one block, in document order.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub validator: &'static str,
    pub kind: &'static str,
    pub name: String,
    pub status: Status,
    pub report: ValidationReport,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.status == Status::Valid
    }
}

#[derive(Clone, Debug)]
pub struct Entry<T> {
    /// `None` when the artifact cannot even be assembled because a
    /// dependency failed (e.g. the fixed subcategory of a non-idempotent monad).
    pub value: Option<T>,
    pub provenance: Provenance,
    pub status: Status,
}

impl<T> Entry<T> {
    fn usable(&self) -> bool {
        self.status == Status::Valid
    }
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub categories: BTreeMap<String, Entry<Arc<Category>>>,
    pub functors: BTreeMap<String, Entry<Functor>>,
    pub transformations: BTreeMap<String, Entry<NatTrans>>,
    pub monads: BTreeMap<String, Entry<MonadDatum>>,
    pub comonads: BTreeMap<String, Entry<ComonadDatum>>,
    pub reflectors: BTreeMap<String, Entry<ReflectionPackage>>,
    pub coreflectors: BTreeMap<String, Entry<CoreflectionPackage>>,
    pub specs: BTreeMap<String, Entry<FiberedSpec>>,
    /// `(spec name, base category name)` in document order.
    pub spec_order: Vec<(String, String)>,
    pub outcomes: Vec<Outcome>,
}

struct Ctx<'a> {
    line: usize,
    kind: &'static str,
    name: &'a str,
}

impl Ctx<'_> {
    fn err(&self, message: impl Into<String>) -> LoadError {
        LoadError {
            line: self.line,
            kind: self.kind,
            name: self.name.to_string(),
            message: message.into(),
        }
    }

    fn cat(&self, e: CatError) -> LoadError {
        self.err(e.to_string())
    }
}

fn lookup<'a, T>(map: &'a BTreeMap<String, Entry<T>>, ctx: &Ctx<'_>, kind: &str, name: &str) -> Result<&'a Entry<T>, LoadError> {
    map.get(name)
        .ok_or_else(|| ctx.err(format!("unknown {kind} {name}")))
}

/// Map name-keyed tables onto index handles, requiring every source item
/// to be covered exactly once.
fn table<T: Copy>(
    ctx: &Ctx<'_>,
    what: &str,
    sources: &[String],
    entries: &[Mapping],
    resolve: impl Fn(&str) -> Option<T>,
) -> Result<Vec<T>, LoadError> {
    let mut given: HashMap<&str, &str> = HashMap::new();
    for m in entries {
        if given.insert(&m.from, &m.to).is_some() {
            return Err(ctx.err(format!("{what} {} is mapped twice", m.from)));
        }
        if !sources.iter().any(|s| s == &m.from) {
            return Err(ctx.err(format!("unknown {what} {}", m.from)));
        }
    }
    sources
        .iter()
        .map(|s| {
            let to = given
                .get(s.as_str())
                .ok_or_else(|| ctx.err(format!("{what} {s} is not mapped")))?;
            resolve(to).ok_or_else(|| ctx.err(format!("{what} {s} is sent to unknown {to}")))
        })
        .collect()
}

fn object_names(c: &Category) -> Vec<String> {
    c.objects().map(|o| c.obj_id(o).to_string()).collect()
}

fn morphism_names(c: &Category) -> Vec<String> {
    c.morphisms().map(|m| c.mor_id(m).to_string()).collect()
}

fn functor_table(
    ctx: &Ctx<'_>,
    source: &Arc<Category>,
    target: &Arc<Category>,
    objects: &[Mapping],
    morphisms: &[Mapping],
) -> Result<Functor, LoadError> {
    let on_obj = table(ctx, "object", &object_names(source), objects, |n| target.obj(n).ok())?;
    let on_mor = table(ctx, "morphism", &morphism_names(source), morphisms, |n| target.mor(n).ok())?;
    Functor::new(source.clone(), target.clone(), on_obj, on_mor).map_err(|e| ctx.cat(e))
}

pub fn build_category(c: &CategoryBlock) -> Result<Category, CatError> {
    let mut b = Category::builder();
    for o in &c.objects {
        b.object(o.clone());
    }
    for m in &c.morphisms {
        b.morphism(m.name.clone(), m.src.clone(), m.dst.clone());
    }
    for i in &c.identities {
        b.identity(i.object.clone(), i.morphism.clone());
    }
    for k in &c.compose {
        b.compose(k.g.clone(), k.f.clone(), k.h.clone());
    }
    b.build()
}

/// Canonical block: label order throughout, and composites with an
/// identity that the builder would fill in anyway left out.
pub fn category_block(name: &str, c: &Category) -> CategoryBlock {
    let implied = |g: Mor, f: Mor, h: Mor| (c.is_identity(g) && h == f) || (c.is_identity(f) && h == g);
    CategoryBlock {
        name: name.to_string(),
        objects: object_names(c),
        morphisms: c
            .morphisms()
            .map(|m| MorphismDecl {
                name: c.mor_id(m).to_string(),
                src: c.obj_id(c.src(m)).to_string(),
                dst: c.obj_id(c.dst(m)).to_string(),
            })
            .collect(),
        identities: c
            .objects()
            .filter_map(|o| {
                c.identity(o).map(|m| IdentityDecl {
                    object: c.obj_id(o).to_string(),
                    morphism: c.mor_id(m).to_string(),
                })
            })
            .collect(),
        compose: c
            .composition_table()
            .into_iter()
            .filter(|&(g, f, h)| !implied(g, f, h))
            .map(|(g, f, h)| ComposeDecl {
                g: c.mor_id(g).to_string(),
                f: c.mor_id(f).to_string(),
                h: c.mor_id(h).to_string(),
            })
            .collect(),
        line: 0,
    }
}

pub fn build_spec(s: &SpecBlock, base: &Arc<Category>) -> Result<FiberedSpec, String> {
    let mut fibers = BTreeMap::new();
    for f in &s.fibers {
        if fibers.contains_key(&f.object) {
            return Err(format!("fiber over {} given twice", f.object));
        }
        fibers.insert(f.object.clone(), fiber_poset(f)?);
    }
    let mut actions = BTreeMap::new();
    for a in &s.actions {
        let mut map = BTreeMap::new();
        for m in &a.map {
            if map.insert(m.from.clone(), m.to.clone()).is_some() {
                return Err(format!("action of {} maps {} twice", a.morphism, m.from));
            }
        }
        if actions.insert(a.morphism.clone(), map).is_some() {
            return Err(format!("action of {} given twice", a.morphism));
        }
    }
    FiberedSpec::from_named(base.clone(), fibers, actions).map_err(|e| e.to_string())
}

fn fiber_poset(f: &FiberBlock) -> Result<Poset, String> {
    let index = |name: &str| {
        f.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| format!("fiber over {} has no element {name}", f.object))
    };
    let relations = f
        .relations
        .iter()
        .map(|r| Ok((index(&r.from)?, index(&r.to)?)))
        .collect::<Result<Vec<_>, String>>()?;
    let bottom = f.bottom.as_deref().map(index).transpose()?;
    let top = f.top.as_deref().map(index).transpose()?;
    Poset::generated(f.elements.clone(), &relations, bottom, top).map_err(|e| format!("fiber over {}: {e}", f.object))
}

/// Canonical spec block: covering relations only, identity actions left out
/// unless they are not identities.
pub fn spec_block(name: &str, base_name: &str, s: &FiberedSpec) -> SpecBlock {
    let base = s.base();
    let fibers = base
        .objects()
        .map(|b| {
            let p = s.fiber(b);
            FiberBlock {
                object: base.obj_id(b).to_string(),
                elements: p.elements().to_vec(),
                bottom: p.bottom().map(|i| p.element(i).to_string()),
                top: p.top().map(|i| p.element(i).to_string()),
                relations: p
                    .covers()
                    .into_iter()
                    .map(|(a, c)| Mapping {
                        from: p.element(a).to_string(),
                        to: p.element(c).to_string(),
                    })
                    .collect(),
            }
        })
        .collect();
    let actions = base
        .morphisms()
        .filter(|&f| !(base.is_identity(f) && s.action(f).iter().enumerate().all(|(k, &v)| k == v)))
        .map(|f| {
            let (p, q) = (s.fiber(base.src(f)), s.fiber(base.dst(f)));
            crate::syntax::ActionBlock {
                morphism: base.mor_id(f).to_string(),
                map: s
                    .action(f)
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| Mapping {
                        from: p.element(k).to_string(),
                        to: q.element(v).to_string(),
                    })
                    .collect(),
            }
        })
        .collect();
    SpecBlock {
        name: name.to_string(),
        base: base_name.to_string(),
        fibers,
        actions,
        line: 0,
    }
}

/// The base category block followed by the spec block.
pub fn spec_document(name: &str, base_name: &str, s: &FiberedSpec) -> Document {
    Document {
        blocks: vec![
            Block::Category(category_block(base_name, s.base())),
            Block::Spec(spec_block(name, base_name, s)),
        ],
    }
}

/// Resolve `id(C)` or a functor name.
fn functor_ref(ws: &Workspace, ctx: &Ctx<'_>, name: &str) -> Result<(Functor, Vec<String>, bool), LoadError> {
    if let Some(cat) = name.strip_prefix("id(").and_then(|r| r.strip_suffix(')')) {
        let e = lookup(&ws.categories, ctx, "category", cat)?;
        let c = e.value.clone().expect("categories are always assembled");
        return Ok((Functor::identity(c), vec![cat.to_string()], e.usable()));
    }
    let e = lookup(&ws.functors, ctx, "functor", name)?;
    let f = e.value.clone().expect("functors are always assembled");
    Ok((f, vec![name.to_string()], e.usable()))
}

impl Workspace {
    pub fn load(doc: &Document, file: Option<&Path>) -> Result<Workspace, LoadError> {
        let mut ws = Workspace::default();
        for block in &doc.blocks {
            ws.add(block, file)?;
        }
        Ok(ws)
    }

    fn record(
        &mut self,
        validator: &'static str,
        block: &Block,
        blocked_by: Option<String>,
        report: impl FnOnce() -> ValidationReport,
    ) -> Status {
        let (status, report) = match blocked_by {
            Some(dep) => (Status::Unvalidated { because: dep }, ValidationReport::new()),
            None => {
                let r = report();
                (if r.is_empty() { Status::Valid } else { Status::Invalid }, r)
            }
        };
        self.outcomes.push(Outcome {
            validator,
            kind: block.kind(),
            name: block.name().to_string(),
            status: status.clone(),
            report,
        });
        status
    }

    fn add(&mut self, block: &Block, file: Option<&Path>) -> Result<(), LoadError> {
        let ctx = Ctx {
            line: block.line(),
            kind: block.kind(),
            name: block.name(),
        };
        let provenance = Provenance {
            file: file.map(Path::to_path_buf),
            line: block.line(),
        };
        let duplicate = match block {
            Block::Category(_) => self.categories.contains_key(ctx.name),
            Block::Functor(_) => self.functors.contains_key(ctx.name),
            Block::Transformation(_) => self.transformations.contains_key(ctx.name),
            Block::Monad(_) => self.monads.contains_key(ctx.name),
            Block::Comonad(_) => self.comonads.contains_key(ctx.name),
            Block::Reflector(_) => self.reflectors.contains_key(ctx.name),
            Block::Coreflector(_) => self.coreflectors.contains_key(ctx.name),
            Block::Spec(_) => self.specs.contains_key(ctx.name),
        };
        if duplicate {
            return Err(ctx.err(format!("a {} with this name already exists", ctx.kind)));
        }
        match block {
            Block::Category(cb) => {
                let c = Arc::new(build_category(cb).map_err(|e| ctx.cat(e))?);
                let status = self.record("validate_category", block, None, || validate_category(&c));
                self.categories.insert(cb.name.clone(), Entry { value: Some(c), provenance, status });
            }
            Block::Functor(fb) => self.add_functor(block, fb, &ctx, provenance)?,
            Block::Transformation(tb) => self.add_transformation(block, tb, &ctx, provenance)?,
            Block::Monad(mb) => {
                let (f, t, blocked) = self.monad_parts(mb, &ctx)?;
                let d = MonadDatum::new(f, t).map_err(|e| ctx.cat(e))?;
                let status = self.record("check_idempotent_monad", block, blocked, || check_idempotent_monad(&d));
                self.monads.insert(mb.name.clone(), Entry { value: Some(d), provenance, status });
            }
            Block::Comonad(mb) => {
                let (f, t, blocked) = self.monad_parts(mb, &ctx)?;
                let d = ComonadDatum::new(f, t).map_err(|e| ctx.cat(e))?;
                let status = self.record("check_idempotent_comonad", block, blocked, || check_idempotent_comonad(&d));
                self.comonads.insert(mb.name.clone(), Entry { value: Some(d), provenance, status });
            }
            Block::Reflector(ab) => {
                let m = lookup(&self.monads, &ctx, "monad", &ab.of)?;
                let (value, blocked) = if m.usable() {
                    let pkg = fixed_subcategory_monad(m.value.as_ref().expect("assembled")).map_err(|e| ctx.cat(e))?;
                    let f = functor_table(&ctx, pkg.ambient(), pkg.subcategory(), &ab.objects, &ab.morphisms)?;
                    (Some(pkg.with_adjoint(f).map_err(|e| ctx.cat(e))?), None)
                } else {
                    (None, Some(ab.of.clone()))
                };
                let status = self.record("verify_reflection", block, blocked, || {
                    verify_reflection(value.as_ref().expect("assembled"))
                });
                self.reflectors.insert(ab.name.clone(), Entry { value, provenance, status });
            }
            Block::Coreflector(ab) => {
                let m = lookup(&self.comonads, &ctx, "comonad", &ab.of)?;
                let (value, blocked) = if m.usable() {
                    let pkg =
                        fixed_subcategory_comonad(m.value.as_ref().expect("assembled")).map_err(|e| ctx.cat(e))?;
                    let f = functor_table(&ctx, pkg.ambient(), pkg.subcategory(), &ab.objects, &ab.morphisms)?;
                    (Some(pkg.with_adjoint(f).map_err(|e| ctx.cat(e))?), None)
                } else {
                    (None, Some(ab.of.clone()))
                };
                let status = self.record("verify_coreflection", block, blocked, || {
                    verify_coreflection(value.as_ref().expect("assembled"))
                });
                self.coreflectors.insert(ab.name.clone(), Entry { value, provenance, status });
            }
            Block::Spec(sb) => {
                let base = lookup(&self.categories, &ctx, "category", &sb.base)?;
                let blocked = (!base.usable()).then(|| sb.base.clone());
                let c = base.value.clone().expect("assembled");
                let spec = build_spec(sb, &c).map_err(|m| ctx.err(m))?;
                let status = self.record("validate_spec", block, blocked, || validate_spec(&spec));
                self.specs.insert(sb.name.clone(), Entry { value: Some(spec), provenance, status });
                self.spec_order.push((sb.name.clone(), sb.base.clone()));
            }
        }
        Ok(())
    }

    fn add_functor(&mut self, block: &Block, fb: &FunctorBlock, ctx: &Ctx<'_>, provenance: Provenance) -> Result<(), LoadError> {
        let s = lookup(&self.categories, ctx, "category", &fb.source)?;
        let t = lookup(&self.categories, ctx, "category", &fb.target)?;
        let blocked = [(&fb.source, s), (&fb.target, t)]
            .into_iter()
            .find(|(_, e)| !e.usable())
            .map(|(n, _)| n.clone());
        let (s, t) = (s.value.clone().expect("assembled"), t.value.clone().expect("assembled"));
        let f = functor_table(ctx, &s, &t, &fb.objects, &fb.morphisms)?;
        let status = self.record("validate_functor", block, blocked, || validate_functor(&f));
        self.functors.insert(fb.name.clone(), Entry { value: Some(f), provenance, status });
        Ok(())
    }

    fn add_transformation(
        &mut self,
        block: &Block,
        tb: &TransformationBlock,
        ctx: &Ctx<'_>,
        provenance: Provenance,
    ) -> Result<(), LoadError> {
        let (src, d1, ok1) = functor_ref(self, ctx, &tb.source)?;
        let (dst, d2, ok2) = functor_ref(self, ctx, &tb.target)?;
        let blocked = match (ok1, ok2) {
            (true, true) => None,
            (false, _) => Some(d1[0].clone()),
            _ => Some(d2[0].clone()),
        };
        let c = src.source().clone();
        let d = src.target().clone();
        let comps = table(ctx, "object", &object_names(&c), &tb.components, |n| d.mor(n).ok())?;
        let alpha = NatTrans::new(src, dst, comps).map_err(|e| ctx.cat(e))?;
        let status = self.record("validate_nat", block, blocked, || validate_nat(&alpha));
        self.transformations
            .insert(tb.name.clone(), Entry { value: Some(alpha), provenance, status });
        Ok(())
    }

    fn monad_parts(&self, mb: &MonadBlock, ctx: &Ctx<'_>) -> Result<(Functor, NatTrans, Option<String>), LoadError> {
        let f = lookup(&self.functors, ctx, "functor", &mb.functor)?;
        let t = lookup(&self.transformations, ctx, "transformation", &mb.transformation)?;
        let blocked = if !f.usable() {
            Some(mb.functor.clone())
        } else if !t.usable() {
            Some(mb.transformation.clone())
        } else {
            None
        };
        Ok((f.value.clone().expect("assembled"), t.value.clone().expect("assembled"), blocked))
    }

    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(Outcome::passed)
    }

    /// The named spec, or the first one in the document.
    pub fn spec(&self, name: Option<&str>) -> Option<(&str, &Entry<FiberedSpec>)> {
        let name = match name {
            Some(n) => n,
            None => self.spec_order.first()?.0.as_str(),
        };
        self.specs.get_key_value(name).map(|(k, v)| (k.as_str(), v))
    }

    /// Objects fixed by some valid monad (resp. comonad) on `c`.
    pub fn fixed_objects(&self, c: &Arc<Category>) -> (Vec<bool>, Vec<bool>) {
        let mut by_monad = vec![false; c.num_objects()];
        let mut by_comonad = vec![false; c.num_objects()];
        for e in self.monads.values().filter(|e| e.usable()) {
            let d = e.value.as_ref().expect("assembled");
            if Arc::ptr_eq(d.category(), c) {
                for x in c.objects() {
                    by_monad[x.index()] |= c.is_isomorphism(d.unit().component(x));
                }
            }
        }
        for e in self.comonads.values().filter(|e| e.usable()) {
            let d = e.value.as_ref().expect("assembled");
            if Arc::ptr_eq(d.category(), c) {
                for x in c.objects() {
                    by_comonad[x.index()] |= c.is_isomorphism(d.counit().component(x));
                }
            }
        }
        (by_monad, by_comonad)
    }
}

/// Name of the object at `o`, for report lines.
pub fn obj_names(c: &Category, objs: impl IntoIterator<Item = Obj>) -> Vec<String> {
    objs.into_iter().map(|o| c.obj_id(o).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_text;
    use catmn_core::fibered::{canonical_c2, random_spec, Limits};

    #[test]
    fn spec_documents_round_trip() {
        let s = canonical_c2();
        let doc = spec_document("c2", "C2", &s);
        let text = doc.to_string();
        let again = parse_text(&text).unwrap();
        assert_eq!(again.to_string(), text);
        let ws = Workspace::load(&again, None).unwrap();
        assert!(ws.all_passed());
        assert_eq!(ws.specs["c2"].value.as_ref().unwrap(), &s);
    }

    #[test]
    fn random_specs_round_trip_structurally() {
        for seed in 0..30 {
            let s = random_spec(seed, Limits::default()).unwrap();
            let doc = spec_document("r", "B", &s);
            let ws = Workspace::load(&parse_text(&doc.to_string()).unwrap(), None).unwrap();
            assert_eq!(ws.specs["r"].value.as_ref().unwrap(), &s, "seed {seed}");
        }
    }

    #[test]
    fn unknown_references_are_load_errors() {
        let doc = parse_text("FUNCTOR F: C -> C\n").unwrap();
        let err = Workspace::load(&doc, None).unwrap_err();
        assert_eq!(err.message, "unknown category C");
        assert_eq!(err.line, 1);
    }

    #[test]
    fn conflicting_composites_are_load_errors() {
        let doc = parse_text("CATEGORY C\nOBJECTS\n a\nMORPHISMS\n i: a -> a\n e: a -> a\nCOMPOSE\n e o e = i\n e o e = e\n")
            .unwrap();
        let err = Workspace::load(&doc, None).unwrap_err();
        assert!(err.message.contains("e o e"), "{err}");
    }

    #[test]
    fn dependents_of_invalid_blocks_are_marked_unvalidated() {
        // (e o z) o e = z but e o (z o e) = e.
        let text = "\
CATEGORY C
OBJECTS
  a
MORPHISMS
  id_a: a -> a
  e: a -> a
  z: a -> a
IDENTITIES
  a: id_a
COMPOSE
  e o e = z
  e o z = e
  z o e = z
  z o z = z
FUNCTOR F: C -> C
OBJECTS
  a -> a
MORPHISMS
  id_a -> id_a
  e -> e
  z -> z
";
        let ws = Workspace::load(&parse_text(text).unwrap(), None).unwrap();
        assert_eq!(ws.outcomes[0].status, Status::Invalid);
        assert!(ws.outcomes[0].report.has_check("associativity"));
        assert_eq!(ws.outcomes[1].status, Status::Unvalidated { because: "C".into() });
        assert!(!ws.all_passed());
    }
}
