//! Moving idempotent (co)monads across a contravariant equivalence.
//!
//! Given contravariant `F : C -> D`, `G : D -> C` and a natural iso
//! `θ : 1_D ⇒ FG`, an idempotent monad `(N, η)` on `C` induces an idempotent
//! comonad `(T, δ)` on `D` with `T = FNG` and `δ_x = θ_x⁻¹ ∘ F(η_{Gx})`.
//! Dually an idempotent comonad `(M, ψ)` induces an idempotent monad
//! `(S, ε)` with `S = FMG` and `ε_x = F(ψ_{Gx}) ∘ θ_x`. Monads become
//! comonads because `F` reverses arrows.

use std::sync::Arc;

use crate::error::{CatError, Result};
use crate::fincat::{Category, Mor, Obj};
use crate::functor::{same_category, validate_nat, whisker_left, ContravariantFunctor, Functor, NatTrans};
use crate::monad::{check_idempotent_comonad, check_idempotent_monad, ComonadDatum, MonadDatum};
use crate::report::ValidationReport;

/// Contravariant `F : C -> D`, `G : D -> C` with natural isos
/// `θ : 1_D ⇒ FG` and `θ̄ : 1_C ⇒ GF`.
///
/// Only `θ` enters the transport formulas. `θ̄` is validated as a natural
/// isomorphism too; no triangle coherence between the two is required.
#[derive(Clone, Debug)]
pub struct ContravariantEquivalence {
    f: ContravariantFunctor,
    g: ContravariantFunctor,
    theta: NatTrans,
    theta_bar: NatTrans,
}

impl ContravariantEquivalence {
    pub fn new(
        f: ContravariantFunctor,
        g: ContravariantFunctor,
        theta: NatTrans,
        theta_bar: NatTrans,
    ) -> Result<ContravariantEquivalence> {
        if !same_category(f.source(), g.target()) || !same_category(f.target(), g.source()) {
            return Err(CatError::Mismatch("F and G must run between the same two categories".into()));
        }
        let fg = f.after_contra(&g)?;
        let gf = g.after_contra(&f)?;
        let expect = |alpha: &NatTrans, comp: &Functor, name: &str| {
            if !alpha.source().is_identity() || alpha.target() != comp {
                Err(CatError::Mismatch(format!("{name} must run from the identity to the round trip")))
            } else {
                Ok(())
            }
        };
        expect(&theta, &fg, "theta")?;
        expect(&theta_bar, &gf, "theta_bar")?;
        Ok(ContravariantEquivalence {
            f,
            g,
            theta,
            theta_bar,
        })
    }

    /// `C ≃ D^op` where `D` is `C^op` with every label prefixed by `op:`.
    /// Both functors and both isos are the identity on index handles.
    pub fn relabeled_opposite(c: &Arc<Category>) -> ContravariantEquivalence {
        let d = Arc::new(c.opposite().relabeled("op:"));
        let f = ContravariantFunctor::from_fns(c.clone(), d.clone(), |o| o, |m| m).expect("F");
        let g = ContravariantFunctor::from_fns(d.clone(), c.clone(), |o| o, |m| m).expect("G");
        let theta = NatTrans::identity(f.after_contra(&g).expect("FG"));
        let theta_bar = NatTrans::identity(g.after_contra(&f).expect("GF"));
        ContravariantEquivalence::new(f, g, theta, theta_bar).expect("relabeled opposite")
    }

    pub fn c(&self) -> &Arc<Category> {
        self.f.source()
    }

    pub fn d(&self) -> &Arc<Category> {
        self.f.target()
    }

    pub fn f(&self) -> &ContravariantFunctor {
        &self.f
    }

    pub fn g(&self) -> &ContravariantFunctor {
        &self.g
    }

    pub fn theta(&self) -> &NatTrans {
        &self.theta
    }

    pub fn theta_bar(&self) -> &NatTrans {
        &self.theta_bar
    }

    pub fn with_theta(&self, theta: NatTrans) -> Result<ContravariantEquivalence> {
        ContravariantEquivalence::new(self.f.clone(), self.g.clone(), theta, self.theta_bar.clone())
    }

    /// `F ∘ E ∘ G` for an endofunctor `E` of `C`, materialized as a table.
    pub fn conjugate(&self, e: &Functor) -> Result<Functor> {
        if !same_category(e.source(), self.c()) || !e.is_endofunctor() {
            return Err(CatError::Mismatch("conjugation needs an endofunctor of C".into()));
        }
        let (f, g) = (&self.f, &self.g);
        Functor::from_fns(
            self.d().clone(),
            self.d().clone(),
            |x| f.obj(e.obj(g.obj(x))),
            |u| f.mor(e.mor(g.mor(u))),
        )
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

/// Check names: `F.*`, `G.*`, `theta.*`, `theta.iso`, `theta_bar.*`, `theta_bar.iso`.
pub fn validate_equivalence(e: &ContravariantEquivalence) -> ValidationReport {
    let mut report = ValidationReport::new();
    report.extend_scoped("F", e.f.validate());
    report.extend_scoped("G", e.g.validate());
    if !report.is_empty() {
        return report;
    }
    for (name, alpha) in [("theta", &e.theta), ("theta_bar", &e.theta_bar)] {
        let laws = validate_nat(alpha);
        if laws.is_empty() {
            push_non_isos(&mut report, &format!("{name}.iso"), alpha);
        }
        report.extend_scoped(name, laws);
    }
    report
}

fn require(context: &str, report: ValidationReport) -> Result<()> {
    if report.is_empty() {
        Ok(())
    } else {
        Err(CatError::invalid(context, report))
    }
}

fn theta_inverse(e: &ContravariantEquivalence, x: Obj) -> Mor {
    e.d().inverse(e.theta.component(x)).expect("theta is componentwise invertible")
}

/// `(T, δ)` on `D` from an idempotent monad `(N, η)` on `C`.
pub fn induce_comonad(e: &ContravariantEquivalence, m: &MonadDatum) -> Result<ComonadDatum> {
    require("equivalence", validate_equivalence(e))?;
    if !same_category(m.category(), e.c()) {
        return Err(CatError::Mismatch("the monad does not live on the source of F".into()));
    }
    require("monad", check_idempotent_monad(m))?;
    let d = e.d();
    let t = e.conjugate(m.functor())?;
    let delta = NatTrans::from_fn(t.clone(), Functor::identity(d.clone()), |x| {
        let f_eta = e.f.mor(m.unit().component(e.g.obj(x)));
        d.compose(theta_inverse(e, x), f_eta).expect("composable")
    })?;
    let datum = ComonadDatum::new(t, delta)?;
    require("induced comonad", check_idempotent_comonad(&datum))?;
    Ok(datum)
}

/// `(S, ε)` on `D` from an idempotent comonad `(M, ψ)` on `C`.
pub fn induce_monad(e: &ContravariantEquivalence, c: &ComonadDatum) -> Result<MonadDatum> {
    require("equivalence", validate_equivalence(e))?;
    if !same_category(c.category(), e.c()) {
        return Err(CatError::Mismatch("the comonad does not live on the source of F".into()));
    }
    require("comonad", check_idempotent_comonad(c))?;
    let d = e.d();
    let s = e.conjugate(c.functor())?;
    let epsilon = NatTrans::from_fn(Functor::identity(d.clone()), s.clone(), |x| {
        let f_psi = e.f.mor(c.counit().component(e.g.obj(x)));
        d.compose(f_psi, e.theta.component(x)).expect("composable")
    })?;
    let datum = MonadDatum::new(s, epsilon)?;
    require("induced monad", check_idempotent_monad(&datum))?;
    Ok(datum)
}

#[derive(Clone, Debug)]
pub struct TransportResult {
    pub induced_comonad: ComonadDatum,
    pub induced_monad: MonadDatum,
}

pub fn transport(e: &ContravariantEquivalence, m: &MonadDatum, c: &ComonadDatum) -> Result<TransportResult> {
    Ok(TransportResult {
        induced_comonad: induce_comonad(e, m)?,
        induced_monad: induce_monad(e, c)?,
    })
}

fn all_isos(alpha: &NatTrans) -> bool {
    let d = alpha.category();
    alpha.components().iter().all(|&m| d.is_isomorphism(m))
}

/// Whenever `Nψ` is a natural iso on `C`, `Tε` must be one on `D`; whenever
/// `Mη` is, `Sδ` must be. A failed antecedent is recorded as a note.
///
/// Check names: `result.comonad`, `result.monad`, `transfer.T_unit`,
/// `transfer.S_counit`, `transfer`.
pub fn verify_transfer(
    e: &ContravariantEquivalence,
    m: &MonadDatum,
    c: &ComonadDatum,
    r: &TransportResult,
) -> ValidationReport {
    let mut report = ValidationReport::new();
    let (t, s) = (r.induced_comonad.functor(), r.induced_monad.functor());
    match (e.conjugate(m.functor()), e.conjugate(c.functor())) {
        (Ok(t2), Ok(s2)) => {
            if &t2 != t {
                report.push("result.comonad", "induced comonad functor is not F N G");
            }
            if &s2 != s {
                report.push("result.monad", "induced monad functor is not F M G");
            }
        }
        (Err(err), _) | (_, Err(err)) => {
            report.push("transfer", err.to_string());
            return report;
        }
    }

    let sides = (
        whisker_left(m.functor(), c.counit()),
        whisker_left(c.functor(), m.unit()),
        whisker_left(t, r.induced_monad.unit()),
        whisker_left(s, r.induced_comonad.counit()),
    );
    let (n_psi, m_eta, t_eps, s_delta) = match sides {
        (Ok(a), Ok(b), Ok(x), Ok(y)) => (a, b, x, y),
        (Err(err), ..) | (_, Err(err), ..) | (_, _, Err(err), _) | (.., Err(err)) => {
            report.push("transfer", err.to_string());
            return report;
        }
    };
    if all_isos(&n_psi) {
        push_non_isos(&mut report, "transfer.T_unit", &t_eps);
    } else {
        report.note("N psi is not a natural isomorphism on C; the T epsilon implication holds vacuously");
    }
    if all_isos(&m_eta) {
        push_non_isos(&mut report, "transfer.S_counit", &s_delta);
    } else {
        report.note("M eta is not a natural isomorphism on C; the S delta implication holds vacuously");
    }
    report
}

/// Finite Stone duality between two finite sets and their powerset
/// Boolean algebras.
///
/// `C` has the sets `{1}` and `{1,2}` with all functions; `D` has `P{1}`
/// and `P{1,2}` with every map preserving `0, 1, ∧, ∨, ¬`, found by
/// exhaustive search. `F` takes preimages, `G` takes homomorphisms into the
/// two-element algebra `P{1}`, `θ` is evaluation into the double dual.
pub mod powerset {
    use super::*;

    /// Set sizes of the two objects, in label order of both categories
    /// (`{1,2}` sorts before `{1}`).
    const SIZES: [usize; 2] = [2, 1];

    fn set_name(n: usize) -> &'static str {
        match n {
            1 => "{1}",
            _ => "{1,2}",
        }
    }

    fn alg_name(n: usize) -> String {
        format!("P{}", set_name(n))
    }

    /// A function `{1..a} -> {1..b}` as its list of images (1-based).
    fn fn_name(a: usize, b: usize, images: &[usize]) -> String {
        let imgs: String = images.iter().map(|i| i.to_string()).collect();
        format!("{}->{}:{imgs}", set_name(a), set_name(b))
    }

    /// A map `P{1..a} -> P{1..b}` as the image mask of each source mask.
    fn hom_name(a: usize, b: usize, table: &[usize]) -> String {
        let imgs: Vec<String> = table.iter().map(|m| format!("{m:0b$b}")).collect();
        format!("{}->{}:{}", alg_name(a), alg_name(b), imgs.join(","))
    }

    fn functions(a: usize, b: usize) -> Vec<Vec<usize>> {
        (0..b.pow(a as u32))
            .map(|mut code| {
                (0..a)
                    .map(|_| {
                        let i = code % b + 1;
                        code /= b;
                        i
                    })
                    .collect()
            })
            .collect()
    }

    /// Every map `2^a -> 2^b` (on bitmasks) preserving the Boolean operations.
    pub fn boolean_homs(a: usize, b: usize) -> Vec<Vec<usize>> {
        let (sa, sb) = (1usize << a, 1usize << b);
        let (fa, fb) = (sa - 1, sb - 1);
        let mut out = Vec::new();
        for code in 0..sb.pow(sa as u32) {
            let mut c = code;
            let h: Vec<usize> = (0..sa)
                .map(|_| {
                    let v = c % sb;
                    c /= sb;
                    v
                })
                .collect();
            let ok = h[0] == 0
                && h[fa] == fb
                && (0..sa).all(|x| h[fa ^ x] == fb ^ h[x])
                && (0..sa).all(|x| (0..sa).all(|y| h[x & y] == h[x] & h[y] && h[x | y] == h[x] | h[y]));
            if ok {
                out.push(h);
            }
        }
        out
    }

    pub fn finite_sets() -> Arc<Category> {
        let mut b = Category::builder();
        for &a in &SIZES {
            b.object(set_name(a));
            let id: Vec<usize> = (1..=a).collect();
            b.identity(set_name(a), fn_name(a, a, &id));
            for &t in &SIZES {
                for f in functions(a, t) {
                    b.morphism(fn_name(a, t, &f), set_name(a), set_name(t));
                }
            }
        }
        for &a in &SIZES {
            for &m in &SIZES {
                for &z in &SIZES {
                    for f in functions(a, m) {
                        for g in functions(m, z) {
                            let h: Vec<usize> = f.iter().map(|&i| g[i - 1]).collect();
                            b.compose(fn_name(m, z, &g), fn_name(a, m, &f), fn_name(a, z, &h));
                        }
                    }
                }
            }
        }
        Arc::new(b.build().expect("finite sets"))
    }

    pub fn boolean_algebras() -> Arc<Category> {
        let mut b = Category::builder();
        for &a in &SIZES {
            b.object(alg_name(a));
            let id: Vec<usize> = (0..1usize << a).collect();
            b.identity(alg_name(a), hom_name(a, a, &id));
            for &t in &SIZES {
                for h in boolean_homs(a, t) {
                    b.morphism(hom_name(a, t, &h), alg_name(a), alg_name(t));
                }
            }
        }
        for &a in &SIZES {
            for &m in &SIZES {
                for &z in &SIZES {
                    for f in boolean_homs(a, m) {
                        for g in boolean_homs(m, z) {
                            let h: Vec<usize> = f.iter().map(|&x| g[x]).collect();
                            b.compose(hom_name(m, z, &g), hom_name(a, m, &f), hom_name(a, z, &h));
                        }
                    }
                }
            }
        }
        Arc::new(b.build().expect("Boolean algebras"))
    }

    /// Size of the set (or of the generating set of the algebra) at `o`.
    fn size(o: Obj) -> usize {
        SIZES[o.index()]
    }

    /// Points of `G(P{1..a})`: the homomorphisms `P{1..a} -> P{1}`, in
    /// label order; point `i` (1-based) is the `i`-th of them.
    fn points(a: usize) -> Vec<Vec<usize>> {
        let mut hs = boolean_homs(a, 1);
        hs.sort_by_key(|h| hom_name(a, 1, h));
        hs
    }

    fn preimage(f: &[usize], b: usize) -> Vec<usize> {
        (0..1usize << b)
            .map(|s| {
                f.iter()
                    .enumerate()
                    .filter(|&(_, &img)| s >> (img - 1) & 1 == 1)
                    .fold(0, |acc, (x, _)| acc | 1 << x)
            })
            .collect()
    }

    /// The duality, with `C` = finite sets and `D` = Boolean algebras.
    pub fn equivalence() -> Result<ContravariantEquivalence> {
        let c = finite_sets();
        let d = boolean_algebras();
        let decode_fn = |m: Mor| -> Vec<usize> {
            let name = c.mor_id(m).as_str();
            let digits = name.rsplit(':').next().unwrap_or_default();
            digits.chars().map(|ch| ch.to_digit(10).unwrap_or(0) as usize).collect()
        };
        let decode_hom = |m: Mor| -> Vec<usize> {
            let name = d.mor_id(m).as_str();
            let table = name.rsplit(':').next().unwrap_or_default();
            table.split(',').map(|t| usize::from_str_radix(t, 2).unwrap_or(0)).collect()
        };
        let find = |cat: &Category, name: String| cat.mor(&name).expect("morphism present by exhaustiveness");

        // F(f : X -> Y) = preimage : P(Y) -> P(X)
        let f = ContravariantFunctor::from_fns(c.clone(), d.clone(), |o| o, |m| {
            let (a, b) = (size(c.src(m)), size(c.dst(m)));
            find(&d, hom_name(b, a, &preimage(&decode_fn(m), b)))
        })?;
        // G(h : A -> B) = precomposition Hom(B, 2) -> Hom(A, 2)
        let g = ContravariantFunctor::from_fns(d.clone(), c.clone(), |o| o, |m| {
            let (a, b) = (size(d.src(m)), size(d.dst(m)));
            let h = decode_hom(m);
            let (pa, pb) = (points(a), points(b));
            let images: Vec<usize> = pb
                .iter()
                .map(|phi| {
                    let pulled: Vec<usize> = h.iter().map(|&x| phi[x]).collect();
                    pa.iter().position(|p| *p == pulled).expect("homomorphism") + 1
                })
                .collect();
            find(&c, fn_name(b, a, &images))
        })?;
        let fg = f.after_contra(&g)?;
        let gf = g.after_contra(&f)?;
        // θ_A(s) = { i : φ_i(s) = 1 }
        let theta = NatTrans::from_fn(Functor::identity(d.clone()), fg, |o| {
            let a = size(o);
            let pts = points(a);
            let table: Vec<usize> = (0..1usize << a)
                .map(|s| pts.iter().enumerate().filter(|(_, p)| p[s] == 1).fold(0, |acc, (i, _)| acc | 1 << i))
                .collect();
            find(&d, hom_name(a, pts.len(), &table))
        })?;
        // θ̄_X(x) = evaluation at x
        let theta_bar = NatTrans::from_fn(Functor::identity(c.clone()), gf, |o| {
            let a = size(o);
            let pts = points(a);
            let images: Vec<usize> = (0..a)
                .map(|x| {
                    let ev: Vec<usize> = (0..1usize << a).map(|s| s >> x & 1).collect();
                    pts.iter().position(|p| *p == ev).expect("evaluation") + 1
                })
                .collect();
            find(&c, fn_name(a, pts.len(), &images))
        })?;
        ContravariantEquivalence::new(f, g, theta, theta_bar)
    }

    /// Every set collapsed to `{1}`, unit the unique map into it.
    pub fn terminal_monad(c: &Arc<Category>) -> Result<MonadDatum> {
        let one = c.obj(set_name(1))?;
        let to_one = |x: Obj| c.hom(x, one)[0];
        let n = Functor::from_fns(c.clone(), c.clone(), |_| one, |_| c.id(one))?;
        let eta = NatTrans::from_fn(Functor::identity(c.clone()), n.clone(), to_one)?;
        MonadDatum::new(n, eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibered::{build_final_monad, build_initial_comonad, build_total_category, canonical_c2};

    #[test]
    fn relabeled_opposite_is_valid() {
        let t = build_total_category(&canonical_c2()).unwrap();
        let e = ContravariantEquivalence::relabeled_opposite(t.total());
        assert!(validate_equivalence(&e).is_empty());
        assert!(e.d().obj_id(Obj::from_index(0)).as_str().starts_with("op:"));
    }

    #[test]
    fn swapped_theta_component_is_rejected() {
        let e = powerset::equivalence().unwrap();
        let d = e.d().clone();
        let x = d.obj("P{1,2}").unwrap();
        let theta = e.theta();
        let bad = d
            .hom(x, theta.target().obj(x))
            .iter()
            .copied()
            .find(|&m| !d.is_isomorphism(m))
            .unwrap();
        let e2 = e.with_theta(theta.with_component(x, bad).unwrap()).unwrap();
        let r = validate_equivalence(&e2);
        assert!(r.has_check("theta"), "{r}");
    }

    #[test]
    fn identity_monad_transports_to_identity_comonad() {
        let t = build_total_category(&canonical_c2()).unwrap();
        let e = ContravariantEquivalence::relabeled_opposite(t.total());
        let m = MonadDatum::identity(t.total().clone());
        let w = induce_comonad(&e, &m).unwrap();
        assert!(w.functor().is_identity());
        assert!(w.counit().is_identity());
    }

    #[test]
    fn fibered_pair_transfers() {
        let t = build_total_category(&canonical_c2()).unwrap();
        let (n, m) = (build_final_monad(&t).unwrap(), build_initial_comonad(&t).unwrap());
        let e = ContravariantEquivalence::relabeled_opposite(t.total());
        let r = transport(&e, &n, &m).unwrap();
        let report = verify_transfer(&e, &n, &m, &r);
        assert!(report.is_empty(), "{report}");
        assert!(report.notes().is_empty());
    }

    #[test]
    fn powerset_duality_is_an_equivalence() {
        let e = powerset::equivalence().unwrap();
        assert_eq!(e.c().num_morphisms(), 8);
        assert_eq!(e.d().num_morphisms(), 8);
        let r = validate_equivalence(&e);
        assert!(r.is_empty(), "{r}");
    }

    #[test]
    fn terminal_monad_on_sets_becomes_a_comonad_on_algebras() {
        let e = powerset::equivalence().unwrap();
        let n = powerset::terminal_monad(e.c()).unwrap();
        assert!(check_idempotent_monad(&n).is_empty());
        let w = induce_comonad(&e, &n).unwrap();
        let two = e.d().obj("P{1}").unwrap();
        assert!(e.d().objects().all(|x| w.functor().obj(x) == two));
        let c = ComonadDatum::identity(e.c().clone());
        let r = transport(&e, &n, &c).unwrap();
        let report = verify_transfer(&e, &n, &c, &r);
        assert!(report.is_empty(), "{report}");
        assert_eq!(report.notes().len(), 1);
    }
}
