//! Functors, contravariant functors and natural transformations.
//!
//! Functor tables are materialized: an object map and a morphism map over
//! index handles. A contravariant functor `C -> D` is stored as an ordinary
//! functor `C^op -> D`, so there is a single law-checking path.

use std::sync::Arc;

use crate::error::{CatError, Result};
use crate::fincat::{Category, Mor, Obj};
use crate::report::ValidationReport;

/// Structural equality, with a pointer fast path.
pub fn same_category(a: &Arc<Category>, b: &Arc<Category>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Clone, Debug)]
pub struct Functor {
    source: Arc<Category>,
    target: Arc<Category>,
    obj_map: Vec<Obj>,
    mor_map: Vec<Mor>,
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.obj_map == other.obj_map
            && self.mor_map == other.mor_map
            && same_category(&self.source, &other.source)
            && same_category(&self.target, &other.target)
    }
}

impl Eq for Functor {}

impl Functor {
    pub fn new(
        source: Arc<Category>,
        target: Arc<Category>,
        obj_map: Vec<Obj>,
        mor_map: Vec<Mor>,
    ) -> Result<Functor> {
        if obj_map.len() != source.num_objects() || mor_map.len() != source.num_morphisms() {
            return Err(CatError::Mismatch(format!(
                "functor table has {} objects / {} morphisms, source has {} / {}",
                obj_map.len(),
                mor_map.len(),
                source.num_objects(),
                source.num_morphisms()
            )));
        }
        if obj_map.iter().any(|o| o.index() >= target.num_objects())
            || mor_map.iter().any(|m| m.index() >= target.num_morphisms())
        {
            return Err(CatError::Mismatch("functor table points outside its target".into()));
        }
        Ok(Functor {
            source,
            target,
            obj_map,
            mor_map,
        })
    }

    pub fn from_fns(
        source: Arc<Category>,
        target: Arc<Category>,
        on_obj: impl Fn(Obj) -> Obj,
        on_mor: impl Fn(Mor) -> Mor,
    ) -> Result<Functor> {
        let obj_map = source.objects().map(on_obj).collect();
        let mor_map = source.morphisms().map(on_mor).collect();
        Functor::new(source, target, obj_map, mor_map)
    }

    pub fn identity(c: Arc<Category>) -> Functor {
        Functor {
            obj_map: c.objects().collect(),
            mor_map: c.morphisms().collect(),
            source: c.clone(),
            target: c,
        }
    }

    pub fn source(&self) -> &Arc<Category> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Category> {
        &self.target
    }

    pub fn obj(&self, o: Obj) -> Obj {
        self.obj_map[o.index()]
    }

    pub fn mor(&self, m: Mor) -> Mor {
        self.mor_map[m.index()]
    }

    pub fn obj_map(&self) -> &[Obj] {
        &self.obj_map
    }

    pub fn mor_map(&self) -> &[Mor] {
        &self.mor_map
    }

    pub fn is_endofunctor(&self) -> bool {
        same_category(&self.source, &self.target)
    }

    pub fn is_identity(&self) -> bool {
        self.is_endofunctor()
            && self.obj_map.iter().enumerate().all(|(i, o)| o.index() == i)
            && self.mor_map.iter().enumerate().all(|(i, m)| m.index() == i)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Functor) -> Result<Functor> {
        compose_functors(next, self)
    }

    /// Same tables, re-targeted at `target`, which must contain the image
    /// under the same labels (used to corestrict onto a full subcategory).
    pub fn corestrict(&self, target: Arc<Category>) -> Result<Functor> {
        let obj_map = self
            .obj_map
            .iter()
            .map(|&o| target.obj(self.target.obj_id(o).as_str()))
            .collect::<Result<Vec<_>>>()?;
        let mor_map = self
            .mor_map
            .iter()
            .map(|&m| target.mor(self.target.mor_id(m).as_str()))
            .collect::<Result<Vec<_>>>()?;
        Functor::new(self.source.clone(), target, obj_map, mor_map)
    }
}

/// `g ∘ f`.
pub fn compose_functors(g: &Functor, f: &Functor) -> Result<Functor> {
    if !same_category(&f.target, &g.source) {
        return Err(CatError::Mismatch(
            "cannot compose functors: target of the first is not the source of the second".into(),
        ));
    }
    Ok(Functor {
        source: f.source.clone(),
        target: g.target.clone(),
        obj_map: f.obj_map.iter().map(|&o| g.obj(o)).collect(),
        mor_map: f.mor_map.iter().map(|&m| g.mor(m)).collect(),
    })
}

/// Check names: `typing`, `identity`, `composition`.
pub fn validate_functor(func: &Functor) -> ValidationReport {
    let (c, d) = (&*func.source, &*func.target);
    let mut report = ValidationReport::new();
    for m in c.morphisms() {
        let fm = func.mor(m);
        let (fs, ft) = (func.obj(c.src(m)), func.obj(c.dst(m)));
        if d.src(fm) != fs || d.dst(fm) != ft {
            report.push(
                "typing",
                format!(
                    "{} : {} -> {} is sent to {} : {} -> {}, expected {} -> {}",
                    c.mor_id(m),
                    c.obj_id(c.src(m)),
                    c.obj_id(c.dst(m)),
                    d.mor_id(fm),
                    d.obj_id(d.src(fm)),
                    d.obj_id(d.dst(fm)),
                    d.obj_id(fs),
                    d.obj_id(ft)
                ),
            );
        }
    }
    for o in c.objects() {
        let (Some(i), Some(j)) = (c.identity(o), d.identity(func.obj(o))) else {
            continue;
        };
        if func.mor(i) != j {
            report.push(
                "identity",
                format!("{} is sent to {}, not to {}", c.mor_id(i), d.mor_id(func.mor(i)), d.mor_id(j)),
            );
        }
    }
    for (g, f, h) in c.composition_table() {
        if c.dst(f) != c.src(g) {
            continue;
        }
        let image = d.compose(func.mor(g), func.mor(f));
        if image != Some(func.mor(h)) {
            report.push(
                "composition",
                format!(
                    "F({} o {}) = {} but F({}) o F({}) = {}",
                    c.mor_id(g),
                    c.mor_id(f),
                    d.mor_id(func.mor(h)),
                    c.mor_id(g),
                    c.mor_id(f),
                    image.map_or("<undefined>".to_string(), |m| d.mor_id(m).to_string())
                ),
            );
        }
    }
    report
}

/// A functor `C -> D` reversing arrows, stored as a functor `C^op -> D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContravariantFunctor {
    functor: Functor,
    source: Arc<Category>,
}

impl ContravariantFunctor {
    /// Wrap `functor : source^op -> D`.
    pub fn new(source: Arc<Category>, functor: Functor) -> Result<Self> {
        if **functor.source() != source.opposite() {
            return Err(CatError::Mismatch(
                "underlying functor of a contravariant functor must start at the opposite category".into(),
            ));
        }
        Ok(ContravariantFunctor { functor, source })
    }

    pub fn from_fns(
        source: Arc<Category>,
        target: Arc<Category>,
        on_obj: impl Fn(Obj) -> Obj,
        on_mor: impl Fn(Mor) -> Mor,
    ) -> Result<Self> {
        // The opposite shares index handles with `source`.
        let op = Arc::new(source.opposite());
        let functor = Functor::from_fns(op, target, on_obj, on_mor)?;
        Ok(ContravariantFunctor { functor, source })
    }

    pub fn source(&self) -> &Arc<Category> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Category> {
        self.functor.target()
    }

    /// The underlying covariant functor out of the opposite category.
    pub fn functor(&self) -> &Functor {
        &self.functor
    }

    pub fn obj(&self, o: Obj) -> Obj {
        self.functor.obj(o)
    }

    /// Image of `m : x -> y`, a morphism `F y -> F x`.
    pub fn mor(&self, m: Mor) -> Mor {
        self.functor.mor(m)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_functor(&self.functor)
    }

    /// `self ∘ other` for two contravariant functors: a covariant functor.
    pub fn after_contra(&self, other: &ContravariantFunctor) -> Result<Functor> {
        if !same_category(other.target(), &self.source) {
            return Err(CatError::Mismatch("contravariant composite: categories do not line up".into()));
        }
        Functor::from_fns(
            other.source.clone(),
            self.target().clone(),
            |o| self.obj(other.obj(o)),
            |m| self.mor(other.mor(m)),
        )
    }

    /// `self ∘ inner` for a covariant `inner`: contravariant again.
    pub fn after(&self, inner: &Functor) -> Result<ContravariantFunctor> {
        if !same_category(inner.target(), &self.source) {
            return Err(CatError::Mismatch("contravariant composite: categories do not line up".into()));
        }
        ContravariantFunctor::from_fns(
            inner.source().clone(),
            self.target().clone(),
            |o| self.obj(inner.obj(o)),
            |m| self.mor(inner.mor(m)),
        )
    }

    /// `outer ∘ self` for a covariant `outer`: contravariant again.
    pub fn then(&self, outer: &Functor) -> Result<ContravariantFunctor> {
        if !same_category(self.target(), outer.source()) {
            return Err(CatError::Mismatch("contravariant composite: categories do not line up".into()));
        }
        ContravariantFunctor::from_fns(
            self.source.clone(),
            outer.target().clone(),
            |o| outer.obj(self.obj(o)),
            |m| outer.mor(self.mor(m)),
        )
    }
}

/// A natural transformation between two parallel functors, with one
/// component per object of their common source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans {
    source: Functor,
    target: Functor,
    components: Vec<Mor>,
}

impl NatTrans {
    pub fn new(source: Functor, target: Functor, components: Vec<Mor>) -> Result<NatTrans> {
        if !same_category(source.source(), target.source()) || !same_category(source.target(), target.target())
        {
            return Err(CatError::Mismatch("natural transformation between non-parallel functors".into()));
        }
        if components.len() != source.source().num_objects()
            || components.iter().any(|m| m.index() >= source.target().num_morphisms())
        {
            return Err(CatError::Mismatch("natural transformation has a malformed component table".into()));
        }
        Ok(NatTrans {
            source,
            target,
            components,
        })
    }

    pub fn from_fn(source: Functor, target: Functor, component: impl Fn(Obj) -> Mor) -> Result<NatTrans> {
        let components = source.source().objects().map(component).collect();
        NatTrans::new(source, target, components)
    }

    pub fn identity(f: Functor) -> NatTrans {
        let d = f.target().clone();
        let components = f.obj_map().iter().map(|&o| d.id(o)).collect();
        NatTrans {
            source: f.clone(),
            target: f,
            components,
        }
    }

    pub fn source(&self) -> &Functor {
        &self.source
    }

    pub fn target(&self) -> &Functor {
        &self.target
    }

    /// The category components live in.
    pub fn category(&self) -> &Arc<Category> {
        self.source.target()
    }

    pub fn component(&self, o: Obj) -> Mor {
        self.components[o.index()]
    }

    pub fn components(&self) -> &[Mor] {
        &self.components
    }

    /// Replace a single component, keeping the functors.
    pub fn with_component(&self, o: Obj, m: Mor) -> Result<NatTrans> {
        let mut components = self.components.clone();
        components[o.index()] = m;
        NatTrans::new(self.source.clone(), self.target.clone(), components)
    }

    /// Identity transformation in the strict sense: equal functors and
    /// identity components, compared by identifier.
    pub fn is_identity(&self) -> bool {
        let d = self.category();
        self.source == self.target
            && self
                .source
                .source()
                .objects()
                .all(|o| d.identity(self.source.obj(o)) == Some(self.component(o)))
    }

    /// `next ∘ self` (vertical).
    pub fn then(&self, next: &NatTrans) -> Result<NatTrans> {
        if self.target != next.source {
            return Err(CatError::Mismatch("vertical composite: functors do not line up".into()));
        }
        let d = self.category();
        let components = self
            .source
            .source()
            .objects()
            .map(|o| {
                d.compose(next.component(o), self.component(o))
                    .ok_or_else(|| CatError::Mismatch("vertical composite: component not composable".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        NatTrans::new(self.source.clone(), next.target.clone(), components)
    }

    /// Componentwise inverse, materialized by search.
    pub fn inverse(&self) -> Result<NatTrans> {
        let d = self.category();
        let components = self
            .components
            .iter()
            .map(|&m| {
                d.inverse(m).ok_or_else(|| {
                    CatError::Mismatch(format!("component {} has no inverse", d.mor_id(m)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        NatTrans::new(self.target.clone(), self.source.clone(), components)
    }
}

/// Check names: `component.typing`, `naturality`.
pub fn validate_nat(alpha: &NatTrans) -> ValidationReport {
    let (f, g) = (&alpha.source, &alpha.target);
    let c = f.source();
    let d = f.target();
    let mut report = ValidationReport::new();
    for x in c.objects() {
        let a = alpha.component(x);
        if d.src(a) != f.obj(x) || d.dst(a) != g.obj(x) {
            report.push(
                "component.typing",
                format!(
                    "component at {} is {} : {} -> {}, expected {} -> {}",
                    c.obj_id(x),
                    d.mor_id(a),
                    d.obj_id(d.src(a)),
                    d.obj_id(d.dst(a)),
                    d.obj_id(f.obj(x)),
                    d.obj_id(g.obj(x))
                ),
            );
        }
    }
    for m in c.morphisms() {
        let (x, y) = (c.src(m), c.dst(m));
        let top = d.compose(alpha.component(y), f.mor(m));
        let bottom = d.compose(g.mor(m), alpha.component(x));
        if top.is_none() || top != bottom {
            report.push(
                "naturality",
                format!(
                    "square for {} : {} -> {} does not commute",
                    c.mor_id(m),
                    c.obj_id(x),
                    c.obj_id(y)
                ),
            );
        }
    }
    report
}

/// Errors if `alpha` is not a valid transformation.
pub fn is_natural_iso(alpha: &NatTrans) -> Result<bool> {
    let report = validate_nat(alpha);
    if !report.is_empty() {
        return Err(CatError::invalid("natural transformation", report));
    }
    let d = alpha.category();
    Ok(alpha.components.iter().all(|&m| d.is_isomorphism(m)))
}

/// `F α`: component `F(α_x)`. For `α : G ⇒ H` with `G, H : C -> D` and `F : D -> E`.
pub fn whisker_left(func: &Functor, alpha: &NatTrans) -> Result<NatTrans> {
    let source = alpha.source.then(func)?;
    let target = alpha.target.then(func)?;
    let components = alpha.components.iter().map(|&m| func.mor(m)).collect();
    NatTrans::new(source, target, components)
}

/// `α F`: component `α_{F x}`. For `α : G ⇒ H` with `G, H : D -> E` and `F : C -> D`.
pub fn whisker_right(alpha: &NatTrans, func: &Functor) -> Result<NatTrans> {
    let source = func.then(&alpha.source)?;
    let target = func.then(&alpha.target)?;
    let components = func.obj_map().iter().map(|&o| alpha.component(o)).collect();
    NatTrans::new(source, target, components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Arc<Category> {
        Arc::new(Category::from_preorder(&["a", "b", "c"], |i, j| i <= j).unwrap())
    }

    fn constant_to_top(c: &Arc<Category>) -> Functor {
        let top = c.obj("c").unwrap();
        Functor::from_fns(c.clone(), c.clone(), |_| top, |_| c.id(top)).unwrap()
    }

    #[test]
    fn identity_functor_is_valid() {
        let c = chain3();
        assert!(validate_functor(&Functor::identity(c)).is_empty());
    }

    #[test]
    fn constant_functor_to_terminal_is_valid() {
        let c = chain3();
        let t = Arc::new(Category::terminal());
        let star = t.obj("*").unwrap();
        let k = Functor::from_fns(c, t.clone(), |_| star, |_| t.id(star)).unwrap();
        assert!(validate_functor(&k).is_empty());
    }

    #[test]
    fn redirected_morphism_breaks_a_law() {
        // Non-thin target so there is a parallel morphism to redirect to.
        let mut b = Category::builder();
        b.object("x").morphism("ix", "x", "x").identity("x", "ix");
        b.morphism("e", "x", "x").compose("e", "e", "e");
        let c = Arc::new(b.build().unwrap());
        assert!(c.validate().is_empty());
        let (ix, e) = (c.mor("ix").unwrap(), c.mor("e").unwrap());
        let bad = Functor::from_fns(c.clone(), c.clone(), |o| o, |m| if m == ix { e } else { m }).unwrap();
        let r = validate_functor(&bad);
        assert!(r.has_check("identity"), "{r}");
    }

    #[test]
    fn composing_with_identity() {
        let c = chain3();
        let k = constant_to_top(&c);
        let id = Functor::identity(c);
        assert_eq!(compose_functors(&k, &id).unwrap(), k);
        assert_eq!(compose_functors(&id, &k).unwrap(), k);
    }

    #[test]
    fn opposite_functors_compose_to_identity() {
        let c = chain3();
        let op = Arc::new(c.opposite());
        let to_op = ContravariantFunctor::from_fns(c.clone(), op.clone(), |o| o, |m| m).unwrap();
        let back = ContravariantFunctor::from_fns(op.clone(), c.clone(), |o| o, |m| m).unwrap();
        assert!(to_op.validate().is_empty());
        let round = back.after_contra(&to_op).unwrap();
        assert!(round.is_identity());
        assert!(validate_functor(&round).is_empty());
    }

    #[test]
    fn unit_to_top_is_natural_and_not_iso() {
        let c = chain3();
        let k = constant_to_top(&c);
        let top = c.obj("c").unwrap();
        let eta = NatTrans::from_fn(Functor::identity(c.clone()), k.clone(), |x| c.hom(x, top)[0]).unwrap();
        assert!(validate_nat(&eta).is_empty());
        assert!(!is_natural_iso(&eta).unwrap());

        // Redirect one component so it no longer lands on the top.
        let a = c.obj("a").unwrap();
        let bad = eta.with_component(a, c.mor("a<=b").unwrap()).unwrap();
        let r = validate_nat(&bad);
        assert!(r.has_check("component.typing"), "{r}");
        assert!(is_natural_iso(&bad).is_err());
    }

    #[test]
    fn identity_transformation_is_natural_iso() {
        let c = chain3();
        let id = NatTrans::identity(Functor::identity(c));
        assert!(validate_nat(&id).is_empty());
        assert!(is_natural_iso(&id).unwrap());
        assert!(id.is_identity());
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn whiskering_with_identity_functor_is_a_no_op() {
        let c = chain3();
        let k = constant_to_top(&c);
        let top = c.obj("c").unwrap();
        let eta = NatTrans::from_fn(Functor::identity(c.clone()), k, |x| c.hom(x, top)[0]).unwrap();
        let id = Functor::identity(c);
        assert_eq!(whisker_left(&id, &eta).unwrap(), eta);
        assert_eq!(whisker_right(&eta, &id).unwrap(), eta);
    }

    #[test]
    fn whiskering_interchange() {
        let c = chain3();
        let k = constant_to_top(&c);
        let top = c.obj("c").unwrap();
        let eta = NatTrans::from_fn(Functor::identity(c.clone()), k.clone(), |x| c.hom(x, top)[0]).unwrap();
        let lhs = whisker_left(&k, &whisker_right(&eta, &k).unwrap()).unwrap();
        let rhs = whisker_right(&whisker_left(&k, &eta).unwrap(), &k).unwrap();
        assert_eq!(lhs, rhs);
        // K η and η K both collapse to the identity of the top object.
        assert!(whisker_left(&k, &eta).unwrap().is_identity());
        assert!(whisker_right(&eta, &k).unwrap().is_identity());
    }

    #[test]
    fn vertical_composition_and_inverse() {
        let c = Arc::new(Category::from_preorder(&["a", "b"], |_, _| true).unwrap());
        let (a, b) = (c.obj("a").unwrap(), c.obj("b").unwrap());
        let swap = Functor::from_fns(
            c.clone(),
            c.clone(),
            |o| if o == a { b } else { a },
            |m| {
                let (s, t) = (c.src(m), c.dst(m));
                let flip = |o| if o == a { b } else { a };
                c.hom(flip(s), flip(t))[0]
            },
        )
        .unwrap();
        assert!(validate_functor(&swap).is_empty());
        let alpha = NatTrans::from_fn(Functor::identity(c.clone()), swap.clone(), |x| {
            c.hom(x, swap.obj(x))[0]
        })
        .unwrap();
        assert!(validate_nat(&alpha).is_empty());
        assert!(is_natural_iso(&alpha).unwrap());
        let inv = alpha.inverse().unwrap();
        assert!(validate_nat(&inv).is_empty());
        assert!(alpha.then(&inv).unwrap().is_identity());
    }
}
