//! Idempotent monads and comonads and their fixed subcategories.
//!
//! For an idempotent monad `(N, η)` the objects whose unit component is an
//! isomorphism form a reflective full subcategory, with `N` corestricted as
//! the reflector. Dually the objects with invertible counit component form a
//! coreflective subcategory. Idempotence is always checked: the constructors
//! refuse data that fail [`check_idempotent_monad`] or
//! [`check_idempotent_comonad`].

use std::sync::Arc;

use crate::error::{CatError, Result};
use crate::fincat::{full_subcategory, Category, Mor, Obj};
use crate::functor::{validate_functor, validate_nat, whisker_left, whisker_right, Functor, NatTrans};
use crate::report::{ValidationReport, Violation};
use crate::sweep;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonadDatum {
    functor: Functor,
    unit: NatTrans,
}

impl MonadDatum {
    /// `unit` must run from the identity functor to `functor`.
    pub fn new(functor: Functor, unit: NatTrans) -> Result<Self> {
        if !functor.is_endofunctor() {
            return Err(CatError::Mismatch("monad functor is not an endofunctor".into()));
        }
        if *unit.source() != Functor::identity(functor.source().clone()) || *unit.target() != functor {
            return Err(CatError::Mismatch("monad unit must run from the identity functor to N".into()));
        }
        Ok(MonadDatum { functor, unit })
    }

    pub fn identity(c: Arc<Category>) -> Self {
        let id = Functor::identity(c);
        MonadDatum {
            unit: NatTrans::identity(id.clone()),
            functor: id,
        }
    }

    pub fn category(&self) -> &Arc<Category> {
        self.functor.source()
    }

    pub fn functor(&self) -> &Functor {
        &self.functor
    }

    pub fn unit(&self) -> &NatTrans {
        &self.unit
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComonadDatum {
    functor: Functor,
    counit: NatTrans,
}

impl ComonadDatum {
    /// `counit` must run from `functor` to the identity functor.
    pub fn new(functor: Functor, counit: NatTrans) -> Result<Self> {
        if !functor.is_endofunctor() {
            return Err(CatError::Mismatch("comonad functor is not an endofunctor".into()));
        }
        if *counit.target() != Functor::identity(functor.source().clone()) || *counit.source() != functor {
            return Err(CatError::Mismatch("comonad counit must run from M to the identity functor".into()));
        }
        Ok(ComonadDatum { functor, counit })
    }

    pub fn identity(c: Arc<Category>) -> Self {
        let id = Functor::identity(c);
        ComonadDatum {
            counit: NatTrans::identity(id.clone()),
            functor: id,
        }
    }

    pub fn category(&self) -> &Arc<Category> {
        self.functor.source()
    }

    pub fn functor(&self) -> &Functor {
        &self.functor
    }

    pub fn counit(&self) -> &NatTrans {
        &self.counit
    }
}

fn push_non_isos(report: &mut ValidationReport, check: &str, alpha: &NatTrans) {
    let c = alpha.source().source();
    let d = alpha.category();
    for x in c.objects() {
        let m = alpha.component(x);
        if !d.is_isomorphism(m) {
            report.push(
                check,
                format!("component at {} ({}) is not an isomorphism", c.obj_id(x), d.mor_id(m)),
            );
        }
    }
}

/// Empty iff the unit is natural and both `ηN` and `Nη` are natural isomorphisms.
///
/// Check names: `functor.*`, `unit.*`, `idempotence.unit_N`, `idempotence.N_unit`.
pub fn check_idempotent_monad(d: &MonadDatum) -> ValidationReport {
    let mut report = ValidationReport::new();
    report.extend_scoped("functor", validate_functor(&d.functor));
    report.extend_scoped("unit", validate_nat(&d.unit));
    if !report.is_empty() {
        return report;
    }
    match (whisker_right(&d.unit, &d.functor), whisker_left(&d.functor, &d.unit)) {
        (Ok(eta_n), Ok(n_eta)) => {
            push_non_isos(&mut report, "idempotence.unit_N", &eta_n);
            push_non_isos(&mut report, "idempotence.N_unit", &n_eta);
        }
        (Err(e), _) | (_, Err(e)) => report.push("idempotence", e.to_string()),
    }
    report
}

/// Dual of [`check_idempotent_monad`].
///
/// Check names: `functor.*`, `counit.*`, `idempotence.counit_M`, `idempotence.M_counit`.
pub fn check_idempotent_comonad(d: &ComonadDatum) -> ValidationReport {
    let mut report = ValidationReport::new();
    report.extend_scoped("functor", validate_functor(&d.functor));
    report.extend_scoped("counit", validate_nat(&d.counit));
    if !report.is_empty() {
        return report;
    }
    match (whisker_right(&d.counit, &d.functor), whisker_left(&d.functor, &d.counit)) {
        (Ok(psi_m), Ok(m_psi)) => {
            push_non_isos(&mut report, "idempotence.counit_M", &psi_m);
            push_non_isos(&mut report, "idempotence.M_counit", &m_psi);
        }
        (Err(e), _) | (_, Err(e)) => report.push("idempotence", e.to_string()),
    }
    report
}

/// The reflective subcategory of an idempotent monad.
#[derive(Clone, Debug)]
pub struct ReflectionPackage {
    monad: MonadDatum,
    subcategory: Arc<Category>,
    inclusion: Functor,
    reflector: Functor,
    /// Inverse of `η_x` for each ambient object `x` in the subcategory.
    unit_inverses: Vec<Option<Mor>>,
}

/// The coreflective subcategory of an idempotent comonad.
#[derive(Clone, Debug)]
pub struct CoreflectionPackage {
    comonad: ComonadDatum,
    subcategory: Arc<Category>,
    inclusion: Functor,
    coreflector: Functor,
    counit_inverses: Vec<Option<Mor>>,
}

fn invertible_components(alpha: &NatTrans) -> Vec<Option<Mor>> {
    let c = alpha.category();
    alpha.components().iter().map(|&m| c.inverse(m)).collect()
}

pub fn fixed_subcategory_monad(d: &MonadDatum) -> Result<ReflectionPackage> {
    let report = check_idempotent_monad(d);
    if !report.is_empty() {
        return Err(CatError::invalid("idempotent monad", report));
    }
    let c = d.category();
    let unit_inverses = invertible_components(&d.unit);
    let fixed: Vec<Obj> = c.objects().filter(|x| unit_inverses[x.index()].is_some()).collect();
    let (subcategory, inclusion) = full_subcategory(c, &fixed)?;
    let reflector = d.functor.corestrict(subcategory.clone())?;
    Ok(ReflectionPackage {
        monad: d.clone(),
        subcategory,
        inclusion,
        reflector,
        unit_inverses,
    })
}

pub fn fixed_subcategory_comonad(d: &ComonadDatum) -> Result<CoreflectionPackage> {
    let report = check_idempotent_comonad(d);
    if !report.is_empty() {
        return Err(CatError::invalid("idempotent comonad", report));
    }
    let c = d.category();
    let counit_inverses = invertible_components(&d.counit);
    let fixed: Vec<Obj> = c.objects().filter(|x| counit_inverses[x.index()].is_some()).collect();
    let (subcategory, inclusion) = full_subcategory(c, &fixed)?;
    let coreflector = d.functor.corestrict(subcategory.clone())?;
    Ok(CoreflectionPackage {
        comonad: d.clone(),
        subcategory,
        inclusion,
        coreflector,
        counit_inverses,
    })
}

macro_rules! package_accessors {
    ($ty:ident, $datum:ident, $datum_ty:ty, $adjoint:ident, $inverses:ident) => {
        impl $ty {
            pub fn $datum(&self) -> &$datum_ty {
                &self.$datum
            }

            pub fn ambient(&self) -> &Arc<Category> {
                self.$datum.category()
            }

            pub fn subcategory(&self) -> &Arc<Category> {
                &self.subcategory
            }

            pub fn inclusion(&self) -> &Functor {
                &self.inclusion
            }

            pub fn $adjoint(&self) -> &Functor {
                &self.$adjoint
            }

            /// Cached inverse of the (co)unit component at an ambient object.
            pub fn component_inverse(&self, x: Obj) -> Option<Mor> {
                self.$inverses[x.index()]
            }

            /// Ambient objects belonging to the fixed subcategory.
            pub fn fixed_objects(&self) -> Vec<Obj> {
                self.inclusion.obj_map().to_vec()
            }

            /// The subcategory handle of an ambient morphism between fixed objects.
            pub fn to_sub(&self, m: Mor) -> Result<Mor> {
                self.subcategory.mor(self.ambient().mor_id(m).as_str())
            }

            pub fn to_sub_obj(&self, x: Obj) -> Result<Obj> {
                self.subcategory.obj(self.ambient().obj_id(x).as_str())
            }

            /// Swap in a different functor into the subcategory, e.g. a table
            /// read from a file. Only the shape is checked here.
            pub fn with_adjoint(&self, functor: Functor) -> Result<Self> {
                if !crate::functor::same_category(functor.source(), self.ambient())
                    || !crate::functor::same_category(functor.target(), &self.subcategory)
                {
                    return Err(CatError::Mismatch(
                        "replacement must run from the ambient category to the fixed subcategory".into(),
                    ));
                }
                let mut p = self.clone();
                p.$adjoint = functor;
                Ok(p)
            }
        }
    };
}

package_accessors!(ReflectionPackage, monad, MonadDatum, reflector, unit_inverses);
package_accessors!(CoreflectionPackage, comonad, ComonadDatum, coreflector, counit_inverses);

fn check_factorization(report: &mut ValidationReport, inclusion: &Functor, adjoint: &Functor, whole: &Functor) {
    let Ok(composite) = adjoint.then(inclusion) else {
        report.push("factorization", "inclusion and adjoint are not composable");
        return;
    };
    let c = whole.source();
    let d = whole.target();
    for x in c.objects() {
        if composite.obj(x) != whole.obj(x) {
            report.push(
                "factorization",
                format!(
                    "object {}: {} via the subcategory, {} directly",
                    c.obj_id(x),
                    d.obj_id(composite.obj(x)),
                    d.obj_id(whole.obj(x))
                ),
            );
        }
    }
    for m in c.morphisms() {
        if composite.mor(m) != whole.mor(m) {
            report.push(
                "factorization",
                format!(
                    "morphism {}: {} via the subcategory, {} directly",
                    c.mor_id(m),
                    d.mor_id(composite.mor(m)),
                    d.mor_id(whole.mor(m))
                ),
            );
        }
    }
}

/// Sweep the universal property of the unit.
///
/// For every ambient `x`, fixed `y` and `f : x -> y` there must be exactly one
/// `g : N x -> y` with `g ∘ η_x = f`, and it must equal `η_y⁻¹ ∘ N f` where
/// `N f` is read through the package's reflector.
///
/// Check names: `factorization`, `universal.none`, `universal.multiple`,
/// `universal.closed_form`.
pub fn verify_reflection(p: &ReflectionPackage) -> ValidationReport {
    let c = p.ambient().clone();
    let mut report = ValidationReport::new();
    check_factorization(&mut report, &p.inclusion, &p.reflector, &p.monad.functor);

    let unit = &p.monad.unit;
    let fixed = p.fixed_objects();
    let xs: Vec<Obj> = c.objects().collect();
    let found = sweep::flat_map(&xs, |&x| {
        let mut out = Vec::new();
        let eta_x = unit.component(x);
        let nx = p.inclusion.obj(p.reflector.obj(x));
        for &y in &fixed {
            let inv_y = p.unit_inverses[y.index()];
            for &f in c.hom(x, y) {
                let lifts: Vec<Mor> = c
                    .hom(nx, y)
                    .iter()
                    .copied()
                    .filter(|&g| c.compose(g, eta_x) == Some(f))
                    .collect();
                let witness = || format!("x = {}, y = {}, f = {}", c.obj_id(x), c.obj_id(y), c.mor_id(f));
                match lifts.as_slice() {
                    [] => out.push(Violation::new("universal.none", format!("{}: no mediating morphism", witness()))),
                    [g] => {
                        let nf = p.inclusion.mor(p.reflector.mor(f));
                        let closed = inv_y.and_then(|inv| c.compose(inv, nf));
                        if closed != Some(*g) {
                            out.push(Violation::new(
                                "universal.closed_form",
                                format!(
                                    "{}: mediating morphism is {}, but the inverse unit composed with the reflected morphism gives {}",
                                    witness(),
                                    c.mor_id(*g),
                                    closed.map_or("<undefined>".to_string(), |m| c.mor_id(m).to_string())
                                ),
                            ));
                        }
                    }
                    many => out.push(Violation::new(
                        "universal.multiple",
                        format!("{}: {} mediating morphisms", witness(), many.len()),
                    )),
                }
            }
        }
        out
    });
    report.extend(ValidationReport::from_violations(found));
    report
}

/// Dual sweep: for fixed `x`, ambient `y` and `f : x -> y`, exactly one
/// `g : x -> M y` with `ψ_y ∘ g = f`, equal to `M f ∘ ψ_x⁻¹`.
pub fn verify_coreflection(p: &CoreflectionPackage) -> ValidationReport {
    let c = p.ambient().clone();
    let mut report = ValidationReport::new();
    check_factorization(&mut report, &p.inclusion, &p.coreflector, &p.comonad.functor);

    let counit = &p.comonad.counit;
    let fixed = p.fixed_objects();
    let found = sweep::flat_map(&fixed, |&x| {
        let mut out = Vec::new();
        let inv_x = p.counit_inverses[x.index()];
        for y in c.objects() {
            let psi_y = counit.component(y);
            let my = p.inclusion.obj(p.coreflector.obj(y));
            for &f in c.hom(x, y) {
                let lifts: Vec<Mor> = c
                    .hom(x, my)
                    .iter()
                    .copied()
                    .filter(|&g| c.compose(psi_y, g) == Some(f))
                    .collect();
                let witness = || format!("x = {}, y = {}, f = {}", c.obj_id(x), c.obj_id(y), c.mor_id(f));
                match lifts.as_slice() {
                    [] => out.push(Violation::new("universal.none", format!("{}: no mediating morphism", witness()))),
                    [g] => {
                        let mf = p.inclusion.mor(p.coreflector.mor(f));
                        let closed = inv_x.and_then(|inv| c.compose(mf, inv));
                        if closed != Some(*g) {
                            out.push(Violation::new(
                                "universal.closed_form",
                                format!(
                                    "{}: mediating morphism is {}, but the coreflected morphism composed with the inverse counit gives {}",
                                    witness(),
                                    c.mor_id(*g),
                                    closed.map_or("<undefined>".to_string(), |m| c.mor_id(m).to_string())
                                ),
                            ));
                        }
                    }
                    many => out.push(Violation::new(
                        "universal.multiple",
                        format!("{}: {} mediating morphisms", witness(), many.len()),
                    )),
                }
            }
        }
        out
    });
    report.extend(ValidationReport::from_violations(found));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Arc<Category> {
        Arc::new(Category::from_preorder(&["a", "b", "c"], |i, j| i <= j).unwrap())
    }

    /// Reflection onto the top of a chain: N collapses everything to `c`.
    fn to_top(c: &Arc<Category>) -> MonadDatum {
        let top = c.obj("c").unwrap();
        let n = Functor::from_fns(c.clone(), c.clone(), |_| top, |_| c.id(top)).unwrap();
        let eta = NatTrans::from_fn(Functor::identity(c.clone()), n.clone(), |x| c.hom(x, top)[0]).unwrap();
        MonadDatum::new(n, eta).unwrap()
    }

    fn to_bottom(c: &Arc<Category>) -> ComonadDatum {
        let bot = c.obj("a").unwrap();
        let m = Functor::from_fns(c.clone(), c.clone(), |_| bot, |_| c.id(bot)).unwrap();
        let psi = NatTrans::from_fn(m.clone(), Functor::identity(c.clone()), |x| c.hom(bot, x)[0]).unwrap();
        ComonadDatum::new(m, psi).unwrap()
    }

    #[test]
    fn identity_monad_and_comonad() {
        let c = chain3();
        let m = MonadDatum::identity(c.clone());
        assert!(check_idempotent_monad(&m).is_empty());
        let p = fixed_subcategory_monad(&m).unwrap();
        assert_eq!(**p.subcategory(), *c);
        assert!(verify_reflection(&p).is_empty());

        let w = ComonadDatum::identity(c.clone());
        assert!(check_idempotent_comonad(&w).is_empty());
        let q = fixed_subcategory_comonad(&w).unwrap();
        assert_eq!(**q.subcategory(), *c);
        assert!(verify_coreflection(&q).is_empty());
    }

    #[test]
    fn reflection_onto_top() {
        let c = chain3();
        let m = to_top(&c);
        assert!(check_idempotent_monad(&m).is_empty());
        let p = fixed_subcategory_monad(&m).unwrap();
        assert_eq!(p.subcategory().num_objects(), 1);
        assert!(verify_reflection(&p).is_empty());
        for x in p.fixed_objects() {
            assert!(c.is_isomorphism(m.unit().component(x)));
        }
    }

    #[test]
    fn coreflection_onto_bottom() {
        let c = chain3();
        let w = to_bottom(&c);
        assert!(check_idempotent_comonad(&w).is_empty());
        let q = fixed_subcategory_comonad(&w).unwrap();
        assert_eq!(q.fixed_objects(), vec![c.obj("a").unwrap()]);
        assert!(verify_coreflection(&q).is_empty());
    }

    #[test]
    fn comonad_functor_with_reversed_unit_is_rejected() {
        // The bottom-collapsing functor with unit components pointing the wrong way.
        let c = chain3();
        let bot = c.obj("a").unwrap();
        let m = Functor::from_fns(c.clone(), c.clone(), |_| bot, |_| c.id(bot)).unwrap();
        let reversed = NatTrans::from_fn(Functor::identity(c.clone()), m.clone(), |x| {
            c.hom(x, bot).first().copied().unwrap_or_else(|| c.hom(bot, x)[0])
        })
        .unwrap();
        let d = MonadDatum::new(m, reversed).unwrap();
        let r = check_idempotent_monad(&d);
        assert!(!r.is_empty());
        assert!(r.has_check("unit"), "{r}");
        assert!(fixed_subcategory_monad(&d).is_err());
    }

    #[test]
    fn counit_redirected_away_from_bottom_is_rejected() {
        let c = chain3();
        let w = to_bottom(&c);
        let cc = c.obj("c").unwrap();
        let bad = w.counit().with_component(cc, c.mor("b<=c").unwrap()).unwrap();
        let d = ComonadDatum::new(w.functor().clone(), bad).unwrap();
        assert!(!check_idempotent_comonad(&d).is_empty());
    }

    #[test]
    fn corrupted_reflector_is_caught_by_the_sweep() {
        // Two parallel arrows x -> y; identity monad, reflector swaps f1 for f2.
        let mut b = Category::builder();
        b.object("x").object("y");
        b.morphism("ix", "x", "x").morphism("iy", "y", "y");
        b.identity("x", "ix").identity("y", "iy");
        b.morphism("f1", "x", "y").morphism("f2", "x", "y");
        let c = Arc::new(b.build().unwrap());
        assert!(c.validate().is_empty());
        let p = fixed_subcategory_monad(&MonadDatum::identity(c.clone())).unwrap();
        assert!(verify_reflection(&p).is_empty());

        let sub = p.subcategory().clone();
        let (f1, f2) = (c.mor("f1").unwrap(), c.mor("f2").unwrap());
        let swapped = Functor::from_fns(c.clone(), sub, |o| o, |m| if m == f1 { f2 } else { m }).unwrap();
        let r = verify_reflection(&p.with_adjoint(swapped).unwrap());
        assert!(r.has_check("universal.closed_form"), "{r}");
        assert!(r.has_check("factorization"), "{r}");
        assert!(r.to_string().contains("f = f1"));
    }
}
