//! Finite categories presented by a total composition table.
//!
//! Objects and morphisms carry string labels ([`ObjId`], [`MorId`]); the
//! engine itself works with dense index handles ([`Obj`], [`Mor`]). Indices
//! follow lexicographic label order, so iterating in index order is the
//! same as iterating in label order and every emitted list is deterministic.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{CatError, Result};
use crate::functor::Functor;
use crate::report::ValidationReport;
use crate::sweep;

/// Default size guardrail, overridable through `CATMN_MAX_MORPHISMS`.
pub const DEFAULT_MAX_MORPHISMS: usize = 10_000;

/// The morphism-count bound applied when building categories.
pub fn max_morphisms() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("CATMN_MAX_MORPHISMS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_MORPHISMS)
    })
}

macro_rules! label {
    ($name:ident) => {
        #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

label!(ObjId);
label!(MorId);

macro_rules! handle {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }

            pub fn from_index(i: usize) -> Self {
                $name(i as u32)
            }
        }
    };
}

handle!(Obj);
handle!(Mor);

#[derive(Clone, Debug, PartialEq, Eq)]
struct MorphismData {
    id: MorId,
    src: Obj,
    dst: Obj,
}

#[derive(Clone, Debug)]
pub struct Category {
    objects: Vec<ObjId>,
    morphisms: Vec<MorphismData>,
    identities: Vec<Option<Mor>>,
    compose: HashMap<(Mor, Mor), Mor>,

    obj_index: HashMap<ObjId, Obj>,
    mor_index: HashMap<MorId, Mor>,
    outgoing: Vec<Vec<Mor>>,
    incoming: Vec<Vec<Mor>>,
    homs: HashMap<(Obj, Obj), Vec<Mor>>,
}

impl PartialEq for Category {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.compose == other.compose
    }
}

impl Eq for Category {}

impl Category {
    pub fn builder() -> CategoryBuilder {
        CategoryBuilder::default()
    }

    /// One object, one identity morphism.
    pub fn terminal() -> Category {
        let mut b = Category::builder();
        b.object("*").morphism("id_*", "*", "*").identity("*", "id_*");
        b.build().expect("terminal category")
    }

    /// The thin category of a finite preorder. `leq(i, j)` must be reflexive
    /// and transitive for the result to be a category; the morphism `i -> j`
    /// is labelled `a<=b`.
    pub fn from_preorder(elements: &[&str], leq: impl Fn(usize, usize) -> bool) -> Result<Category> {
        let mut b = Category::builder();
        for e in elements {
            b.object(*e);
        }
        for (i, a) in elements.iter().enumerate() {
            for (j, c) in elements.iter().enumerate() {
                if leq(i, j) {
                    b.morphism(format!("{a}<={c}"), *a, *c);
                }
            }
            b.identity(*a, format!("{a}<={a}"));
        }
        b.build()
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = Obj> + Clone + '_ {
        (0..self.objects.len()).map(Obj::from_index)
    }

    pub fn morphisms(&self) -> impl ExactSizeIterator<Item = Mor> + Clone + '_ {
        (0..self.morphisms.len()).map(Mor::from_index)
    }

    pub fn obj_id(&self, o: Obj) -> &ObjId {
        &self.objects[o.index()]
    }

    pub fn mor_id(&self, m: Mor) -> &MorId {
        &self.morphisms[m.index()].id
    }

    pub fn obj(&self, name: &str) -> Result<Obj> {
        self.obj_index
            .get(&ObjId::from(name))
            .copied()
            .ok_or_else(|| CatError::UnknownObject(name.to_string()))
    }

    pub fn mor(&self, name: &str) -> Result<Mor> {
        self.mor_index
            .get(&MorId::from(name))
            .copied()
            .ok_or_else(|| CatError::UnknownMorphism(name.to_string()))
    }

    pub fn src(&self, m: Mor) -> Obj {
        self.morphisms[m.index()].src
    }

    pub fn dst(&self, m: Mor) -> Obj {
        self.morphisms[m.index()].dst
    }

    /// The declared identity of `o`, if any.
    pub fn identity(&self, o: Obj) -> Option<Mor> {
        self.identities[o.index()]
    }

    /// The identity of `o`; only call on validated categories.
    pub fn id(&self, o: Obj) -> Mor {
        self.identities[o.index()]
            .unwrap_or_else(|| panic!("object `{}` has no identity", self.obj_id(o)))
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        self.identities[self.src(m).index()] == Some(m)
    }

    /// `g ∘ f`, as recorded in the composition table.
    pub fn compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        self.compose.get(&(g, f)).copied()
    }

    /// Composite of a path given in application order, `[f, g, h]` meaning `h ∘ g ∘ f`.
    pub fn compose_path(&self, path: &[Mor]) -> Option<Mor> {
        let (first, rest) = path.split_first()?;
        rest.iter().try_fold(*first, |acc, &next| self.compose(next, acc))
    }

    /// Every recorded composition entry `(g, f, g∘f)`, in index order.
    pub fn composition_table(&self) -> Vec<(Mor, Mor, Mor)> {
        let mut t: Vec<_> = self.compose.iter().map(|(&(g, f), &h)| (g, f, h)).collect();
        t.sort_by_key(|&(g, f, _)| (f, g));
        t
    }

    pub fn hom(&self, a: Obj, b: Obj) -> &[Mor] {
        self.homs.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Hom-set by labels, lexicographically ordered.
    pub fn hom_set(&self, a: &str, b: &str) -> Result<Vec<MorId>> {
        let (a, b) = (self.obj(a)?, self.obj(b)?);
        Ok(self.hom(a, b).iter().map(|&m| self.mor_id(m).clone()).collect())
    }

    pub fn outgoing(&self, o: Obj) -> &[Mor] {
        &self.outgoing[o.index()]
    }

    pub fn incoming(&self, o: Obj) -> &[Mor] {
        &self.incoming[o.index()]
    }

    pub fn is_thin(&self) -> bool {
        self.homs.values().all(|h| h.len() <= 1)
    }

    /// A two-sided inverse of `m`, found by search over `hom(dst, src)`.
    pub fn inverse(&self, m: Mor) -> Option<Mor> {
        let (x, y) = (self.src(m), self.dst(m));
        let (idx, idy) = (self.identity(x)?, self.identity(y)?);
        self.hom(y, x)
            .iter()
            .copied()
            .find(|&g| self.compose(g, m) == Some(idx) && self.compose(m, g) == Some(idy))
    }

    pub fn is_isomorphism(&self, m: Mor) -> bool {
        self.inverse(m).is_some()
    }

    pub fn is_isomorphism_named(&self, name: &str) -> Result<bool> {
        Ok(self.is_isomorphism(self.mor(name)?))
    }

    /// Every object has exactly one morphism into `x`.
    pub fn is_final(&self, x: Obj) -> bool {
        self.objects().all(|a| self.hom(a, x).len() == 1)
    }

    /// `x` has exactly one morphism into every object.
    pub fn is_initial(&self, x: Obj) -> bool {
        self.objects().all(|b| self.hom(x, b).len() == 1)
    }

    pub fn is_final_named(&self, name: &str) -> Result<bool> {
        Ok(self.is_final(self.obj(name)?))
    }

    pub fn is_initial_named(&self, name: &str) -> Result<bool> {
        Ok(self.is_initial(self.obj(name)?))
    }

    /// Same labels, reversed arrows, `(g ∘ f)^op = f^op ∘ g^op`.
    /// Indices are preserved, so `c.opposite().opposite() == c`.
    pub fn opposite(&self) -> Category {
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| MorphismData {
                id: m.id.clone(),
                src: m.dst,
                dst: m.src,
            })
            .collect();
        let compose = self.compose.iter().map(|(&(g, f), &h)| ((f, g), h)).collect();
        Category::assemble(self.objects.clone(), morphisms, self.identities.clone(), compose)
    }

    /// A copy with every object and morphism label prefixed by `prefix`.
    pub fn relabeled(&self, prefix: &str) -> Category {
        let objects = self
            .objects
            .iter()
            .map(|o| ObjId::new(format!("{prefix}{o}")))
            .collect();
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| MorphismData {
                id: MorId::new(format!("{prefix}{}", m.id)),
                src: m.src,
                dst: m.dst,
            })
            .collect();
        // A common prefix preserves lexicographic order, so indices carry over.
        Category::assemble(objects, morphisms, self.identities.clone(), self.compose.clone())
    }

    pub fn validate(&self) -> ValidationReport {
        validate_category(self)
    }

    fn assemble(
        objects: Vec<ObjId>,
        morphisms: Vec<MorphismData>,
        identities: Vec<Option<Mor>>,
        compose: HashMap<(Mor, Mor), Mor>,
    ) -> Category {
        let obj_index = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), Obj::from_index(i)))
            .collect();
        let mor_index = morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.clone(), Mor::from_index(i)))
            .collect();
        let mut outgoing = vec![Vec::new(); objects.len()];
        let mut incoming = vec![Vec::new(); objects.len()];
        let mut homs: HashMap<(Obj, Obj), Vec<Mor>> = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            let h = Mor::from_index(i);
            outgoing[m.src.index()].push(h);
            incoming[m.dst.index()].push(h);
            homs.entry((m.src, m.dst)).or_default().push(h);
        }
        Category {
            objects,
            morphisms,
            identities,
            compose,
            obj_index,
            mor_index,
            outgoing,
            incoming,
            homs,
        }
    }
}

/// Collects labels, resolves them and assembles a [`Category`].
///
/// Missing composites are completed where they are forced: composing with a
/// declared identity, or landing in a hom-set with a single element. Anything
/// still missing after that is left for [`validate_category`] to report.
#[derive(Clone, Debug, Default)]
pub struct CategoryBuilder {
    objects: Vec<String>,
    morphisms: Vec<(String, String, String)>,
    identities: Vec<(String, String)>,
    compose: Vec<(String, String, String)>,
    limit: Option<usize>,
}

impl CategoryBuilder {
    pub fn object(&mut self, name: impl Into<String>) -> &mut Self {
        self.objects.push(name.into());
        self
    }

    pub fn morphism(
        &mut self,
        name: impl Into<String>,
        src: impl Into<String>,
        dst: impl Into<String>,
    ) -> &mut Self {
        self.morphisms.push((name.into(), src.into(), dst.into()));
        self
    }

    pub fn identity(&mut self, object: impl Into<String>, morphism: impl Into<String>) -> &mut Self {
        self.identities.push((object.into(), morphism.into()));
        self
    }

    /// Record `g ∘ f = h`.
    pub fn compose(
        &mut self,
        g: impl Into<String>,
        f: impl Into<String>,
        h: impl Into<String>,
    ) -> &mut Self {
        self.compose.push((g.into(), f.into(), h.into()));
        self
    }

    /// Override the morphism-count guardrail for this category only.
    pub fn limit(&mut self, limit: usize) -> &mut Self {
        self.limit = Some(limit);
        self
    }

    pub fn build(&self) -> Result<Category> {
        let limit = self.limit.unwrap_or_else(max_morphisms);
        if self.morphisms.len() > limit {
            return Err(CatError::TooLarge {
                count: self.morphisms.len(),
                limit,
            });
        }

        let mut names: Vec<&String> = self.objects.iter().collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(CatError::Duplicate {
                kind: "object",
                name: w[0].clone(),
            });
        }
        let objects: Vec<ObjId> = names.into_iter().map(|s| ObjId::new(s.clone())).collect();
        let obj_of: HashMap<&str, Obj> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), Obj::from_index(i)))
            .collect();
        let lookup_obj = |s: &str| {
            obj_of
                .get(s)
                .copied()
                .ok_or_else(|| CatError::UnknownObject(s.to_string()))
        };

        let mut mors: Vec<&(String, String, String)> = self.morphisms.iter().collect();
        mors.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = mors.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(CatError::Duplicate {
                kind: "morphism",
                name: w[0].0.clone(),
            });
        }
        let mut morphisms = Vec::with_capacity(mors.len());
        for (name, s, d) in mors {
            morphisms.push(MorphismData {
                id: MorId::new(name.clone()),
                src: lookup_obj(s)?,
                dst: lookup_obj(d)?,
            });
        }
        let mor_of: HashMap<&str, Mor> = morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.as_str(), Mor::from_index(i)))
            .collect();
        let lookup_mor = |s: &str| {
            mor_of
                .get(s)
                .copied()
                .ok_or_else(|| CatError::UnknownMorphism(s.to_string()))
        };

        let mut identities = vec![None; objects.len()];
        for (o, m) in &self.identities {
            let o = lookup_obj(o)?;
            let m = lookup_mor(m)?;
            if identities[o.index()].replace(m).is_some_and(|prev| prev != m) {
                return Err(CatError::Duplicate {
                    kind: "identity for object",
                    name: objects[o.index()].to_string(),
                });
            }
        }

        let mut compose = HashMap::new();
        for (g, f, h) in &self.compose {
            let key = (lookup_mor(g)?, lookup_mor(f)?);
            let h = lookup_mor(h)?;
            if compose.insert(key, h).is_some_and(|prev| prev != h) {
                return Err(CatError::Duplicate {
                    kind: "composite",
                    name: format!("{g} o {f}"),
                });
            }
        }

        let mut cat = Category::assemble(objects, morphisms, identities, compose);
        cat.complete_composition();
        Ok(cat)
    }
}

impl Category {
    fn complete_composition(&mut self) {
        let mut fill = Vec::new();
        for f in self.morphisms() {
            let (x, y) = (self.src(f), self.dst(f));
            for &g in self.outgoing(y) {
                if self.compose.contains_key(&(g, f)) {
                    continue;
                }
                let z = self.dst(g);
                let forced = if self.typed_identity(f) {
                    Some(g)
                } else if self.typed_identity(g) {
                    Some(f)
                } else {
                    match self.hom(x, z) {
                        [only] => Some(*only),
                        _ => None,
                    }
                };
                if let Some(h) = forced {
                    fill.push(((g, f), h));
                }
            }
        }
        self.compose.extend(fill);
    }

    fn typed_identity(&self, m: Mor) -> bool {
        self.is_identity(m) && self.src(m) == self.dst(m)
    }
}

/// Check the category axioms exhaustively.
///
/// Check names: `identity.missing`, `identity.typing`, `identity.left`,
/// `identity.right`, `compose.missing`, `compose.domain`, `compose.typing`,
/// `associativity`.
pub fn validate_category(c: &Category) -> ValidationReport {
    let mut report = ValidationReport::new();
    let name = |m: Mor| c.mor_id(m).as_str();

    for o in c.objects() {
        match c.identity(o) {
            None => report.push("identity.missing", format!("object {} has no identity", c.obj_id(o))),
            Some(i) if c.src(i) != o || c.dst(i) != o => report.push(
                "identity.typing",
                format!("identity {} of {} is not an endomorphism of it", name(i), c.obj_id(o)),
            ),
            Some(_) => {}
        }
    }

    for (&(g, f), &h) in &c.compose {
        if c.dst(f) != c.src(g) {
            report.push(
                "compose.domain",
                format!("{} o {} = {} recorded for a non-composable pair", name(g), name(f), name(h)),
            );
        } else if c.src(h) != c.src(f) || c.dst(h) != c.dst(g) {
            report.push(
                "compose.typing",
                format!(
                    "{} o {} = {}, but {} : {} -> {} should be {} -> {}",
                    name(g),
                    name(f),
                    name(h),
                    name(h),
                    c.obj_id(c.src(h)),
                    c.obj_id(c.dst(h)),
                    c.obj_id(c.src(f)),
                    c.obj_id(c.dst(g))
                ),
            );
        }
    }

    let morphisms: Vec<Mor> = c.morphisms().collect();
    let found = sweep::flat_map(&morphisms, |&f| {
        let mut out = Vec::new();
        let (x, y) = (c.src(f), c.dst(f));
        if let Some(idx) = c.identity(x) {
            if c.compose(f, idx) != Some(f) {
                out.push(crate::Violation::new(
                    "identity.right",
                    format!("{} o {} != {}", name(f), name(idx), name(f)),
                ));
            }
        }
        if let Some(idy) = c.identity(y) {
            if c.compose(idy, f) != Some(f) {
                out.push(crate::Violation::new(
                    "identity.left",
                    format!("{} o {} != {}", name(idy), name(f), name(f)),
                ));
            }
        }
        for &g in c.outgoing(y) {
            let Some(gf) = c.compose(g, f) else {
                out.push(crate::Violation::new(
                    "compose.missing",
                    format!("no composite recorded for {} o {}", name(g), name(f)),
                ));
                continue;
            };
            for &h in c.outgoing(c.dst(g)) {
                let left = c.compose(h, gf);
                let right = c.compose(h, g).and_then(|hg| c.compose(hg, f));
                if left != right {
                    let show = |m: Option<Mor>| m.map_or("<undefined>", name).to_string();
                    out.push(crate::Violation::new(
                        "associativity",
                        format!(
                            "{h} o ({g} o {f}) = {} but ({h} o {g}) o {f} = {}",
                            show(left),
                            show(right),
                            h = name(h),
                            g = name(g),
                            f = name(f)
                        ),
                    ));
                }
            }
        }
        out
    });
    report.extend(ValidationReport::from_violations(found));
    report
}

/// The full subcategory on `objs` together with its inclusion functor.
/// Labels are kept, so a morphism of the subcategory has the same name as
/// its image under the inclusion.
pub fn full_subcategory(c: &Arc<Category>, objs: &[Obj]) -> Result<(Arc<Category>, Functor)> {
    let keep: BTreeSet<Obj> = objs.iter().copied().collect();
    if let Some(bad) = keep.iter().find(|o| o.index() >= c.num_objects()) {
        return Err(CatError::UnknownObject(format!("#{}", bad.index())));
    }
    let mut b = Category::builder();
    b.limit(usize::MAX);
    for &o in &keep {
        b.object(c.obj_id(o).as_str());
        if let Some(i) = c.identity(o) {
            b.identity(c.obj_id(o).as_str(), c.mor_id(i).as_str());
        }
    }
    let kept = |m: Mor| keep.contains(&c.src(m)) && keep.contains(&c.dst(m));
    for m in c.morphisms().filter(|&m| kept(m)) {
        b.morphism(c.mor_id(m).as_str(), c.obj_id(c.src(m)).as_str(), c.obj_id(c.dst(m)).as_str());
    }
    for (g, f, h) in c.composition_table() {
        if kept(g) && kept(f) && kept(h) {
            b.compose(c.mor_id(g).as_str(), c.mor_id(f).as_str(), c.mor_id(h).as_str());
        }
    }
    let sub = Arc::new(b.build()?);
    let obj_map = sub
        .objects()
        .map(|o| c.obj(sub.obj_id(o).as_str()))
        .collect::<Result<Vec<_>>>()?;
    let mor_map = sub
        .morphisms()
        .map(|m| c.mor(sub.mor_id(m).as_str()))
        .collect::<Result<Vec<_>>>()?;
    let inclusion = Functor::new(sub.clone(), c.clone(), obj_map, mor_map)?;
    Ok((sub, inclusion))
}

/// [`full_subcategory`] by object labels.
pub fn full_subcategory_named(c: &Arc<Category>, names: &[&str]) -> Result<(Arc<Category>, Functor)> {
    let objs = names.iter().map(|n| c.obj(n)).collect::<Result<Vec<_>>>()?;
    full_subcategory(c, &objs)
}
