//! Total categories over a base, with a bounded poset over every base object.
//!
//! A [`FiberedSpec`] assigns to each base object `b` a finite poset with a
//! designated bottom and top, and to each base morphism `f : b -> b'` a
//! monotone map between the posets. The total category has objects `(b, k)`
//! and a single morphism `(b, k) -> (b', k')` over `f` exactly when
//! `f·k <= k'`. Over identities this is the poset itself, so each fiber is
//! thin, with the top final and the bottom initial.
//!
//! Sending every object to the top of its fiber gives an idempotent monad;
//! sending it to the bottom gives an idempotent comonad. On morphisms both
//! are defined by searching for the unique lift over the same base morphism
//! that makes the unit (or counit) square commute.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CatError, Result};
use crate::fincat::{Category, Mor, Obj};
use crate::functor::{validate_functor, Functor, NatTrans};
use crate::monad::{check_idempotent_comonad, check_idempotent_monad, ComonadDatum, MonadDatum};
use crate::report::ValidationReport;

/// A finite order with (optionally) designated bottom and top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    leq: Vec<Vec<bool>>,
    bottom: Option<usize>,
    top: Option<usize>,
}

impl Poset {
    /// Order generated by `relations` (reflexive-transitive closure).
    pub fn generated(
        elements: Vec<String>,
        relations: &[(usize, usize)],
        bottom: Option<usize>,
        top: Option<usize>,
    ) -> Result<Poset> {
        let n = elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(CatError::Mismatch(format!("order relation ({a}, {b}) out of range")));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            let row_k = leq[k].clone();
            for row in leq.iter_mut() {
                if row[k] {
                    for (cell, &through) in row.iter_mut().zip(&row_k) {
                        *cell |= through;
                    }
                }
            }
        }
        Poset::from_matrix(elements, leq, bottom, top)
    }

    /// Order given as a full matrix; not closed or checked.
    pub fn from_matrix(
        elements: Vec<String>,
        leq: Vec<Vec<bool>>,
        bottom: Option<usize>,
        top: Option<usize>,
    ) -> Result<Poset> {
        let n = elements.len();
        if n == 0 {
            return Err(CatError::Mismatch("a fiber needs at least one element".into()));
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(CatError::Mismatch("order matrix does not match the element list".into()));
        }
        if bottom.is_some_and(|b| b >= n) || top.is_some_and(|t| t >= n) {
            return Err(CatError::Mismatch("designated bottom/top out of range".into()));
        }
        let mut sorted = elements.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(CatError::Duplicate {
                kind: "fiber element",
                name: w[0].clone(),
            });
        }
        Ok(Poset {
            elements,
            leq,
            bottom,
            top,
        })
    }

    /// `names[0] < names[1] < ...`, bottom first, top last.
    pub fn chain(names: &[&str]) -> Poset {
        let n = names.len();
        Poset::from_matrix(
            names.iter().map(|s| s.to_string()).collect(),
            (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect(),
            Some(0),
            Some(n - 1),
        )
        .expect("chain")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn bottom(&self) -> Option<usize> {
        self.bottom
    }

    pub fn top(&self) -> Option<usize> {
        self.top
    }

    pub fn without_top(mut self) -> Poset {
        self.top = None;
        self
    }

    pub fn without_bottom(mut self) -> Poset {
        self.bottom = None;
        self
    }

    /// Covering pairs `a < b` with nothing strictly between, sorted by name.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let lt = |a: usize, b: usize| a != b && self.leq[a][b];
        let mut out: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| lt(a, b) && !(0..n).any(|m| lt(a, m) && lt(m, b)))
            .collect();
        out.sort_by(|x, y| (&self.elements[x.0], &self.elements[x.1]).cmp(&(&self.elements[y.0], &self.elements[y.1])));
        out
    }

    /// Check names: `order.reflexive`, `order.transitive`, `order.cycle`,
    /// `fiber.bottom.missing`, `fiber.bottom`, `fiber.top.missing`, `fiber.top`.
    pub fn validate(&self) -> ValidationReport {
        let n = self.len();
        let name = |i: usize| self.elements[i].as_str();
        let mut report = ValidationReport::new();
        for i in 0..n {
            if !self.leq[i][i] {
                report.push("order.reflexive", format!("{} is not below itself", name(i)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !self.leq[i][j] {
                    continue;
                }
                if let Some(k) = (0..n).find(|&k| self.leq[j][k] && !self.leq[i][k]) {
                    report.push(
                        "order.transitive",
                        format!("{} <= {} <= {} but not {} <= {}", name(i), name(j), name(k), name(i), name(k)),
                    );
                }
            }
        }
        // Antisymmetry: report each class of mutually comparable elements once.
        let mut seen = vec![false; n];
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let class: Vec<usize> = (0..n).filter(|&j| self.leq[i][j] && self.leq[j][i]).collect();
            for &j in &class {
                seen[j] = true;
            }
            if class.len() > 1 {
                let mut names: Vec<&str> = class.iter().map(|&j| name(j)).collect();
                names.sort();
                let first = names[0];
                report.push("order.cycle", format!("cycle {} <= {first}", names.join(" <= ")));
            }
        }
        match self.bottom {
            None => report.push("fiber.bottom.missing", "no designated bottom"),
            Some(b) => {
                for j in (0..n).filter(|&j| !self.leq[b][j]) {
                    report.push("fiber.bottom", format!("bottom {} is not below {}", name(b), name(j)));
                }
            }
        }
        match self.top {
            None => report.push("fiber.top.missing", "no designated top"),
            Some(t) => {
                for j in (0..n).filter(|&j| !self.leq[j][t]) {
                    report.push("fiber.top", format!("top {} is not above {}", name(t), name(j)));
                }
            }
        }
        report
    }
}

/// Base category, a poset per base object and a monotone map per base morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberedSpec {
    base: Arc<Category>,
    fibers: Vec<Poset>,
    actions: Vec<Vec<usize>>,
}

impl FiberedSpec {
    /// `fibers` is indexed by base object, `actions` by base morphism; each
    /// action lists the image of every source-fiber element.
    pub fn new(base: Arc<Category>, fibers: Vec<Poset>, actions: Vec<Vec<usize>>) -> Result<FiberedSpec> {
        if fibers.len() != base.num_objects() {
            return Err(CatError::Mismatch(format!(
                "{} fibers for {} base objects",
                fibers.len(),
                base.num_objects()
            )));
        }
        if actions.len() != base.num_morphisms() {
            return Err(CatError::Mismatch(format!(
                "{} actions for {} base morphisms",
                actions.len(),
                base.num_morphisms()
            )));
        }
        for f in base.morphisms() {
            let (s, d) = (&fibers[base.src(f).index()], &fibers[base.dst(f).index()]);
            let a = &actions[f.index()];
            if a.len() != s.len() || a.iter().any(|&k| k >= d.len()) {
                return Err(CatError::Mismatch(format!(
                    "action of {} does not map fiber {} into fiber {}",
                    base.mor_id(f),
                    base.obj_id(base.src(f)),
                    base.obj_id(base.dst(f))
                )));
            }
        }
        Ok(FiberedSpec { base, fibers, actions })
    }

    /// Build from labels. Identity actions may be omitted; every other base
    /// morphism needs a complete element-to-element table.
    pub fn from_named(
        base: Arc<Category>,
        fibers: BTreeMap<String, Poset>,
        actions: BTreeMap<String, BTreeMap<String, String>>,
    ) -> Result<FiberedSpec> {
        let mut by_obj = Vec::with_capacity(base.num_objects());
        for b in base.objects() {
            let p = fibers
                .get(base.obj_id(b).as_str())
                .ok_or_else(|| CatError::Mismatch(format!("no fiber given over {}", base.obj_id(b))))?;
            by_obj.push(p.clone());
        }
        if let Some(extra) = fibers.keys().find(|k| base.obj(k).is_err()) {
            return Err(CatError::UnknownObject(extra.clone()));
        }
        if let Some(extra) = actions.keys().find(|k| base.mor(k).is_err()) {
            return Err(CatError::UnknownMorphism(extra.clone()));
        }
        let mut tables = Vec::with_capacity(base.num_morphisms());
        for f in base.morphisms() {
            let (s, d) = (&by_obj[base.src(f).index()], &by_obj[base.dst(f).index()]);
            let name = base.mor_id(f).as_str();
            let table = match actions.get(name) {
                None if base.is_identity(f) => (0..s.len()).collect(),
                None => return Err(CatError::Mismatch(format!("no action given for {name}"))),
                Some(map) => {
                    let mut t = Vec::with_capacity(s.len());
                    for k in s.elements() {
                        let img = map
                            .get(k)
                            .ok_or_else(|| CatError::Mismatch(format!("action of {name} does not say where {k} goes")))?;
                        t.push(d.index_of(img).ok_or_else(|| {
                            CatError::Mismatch(format!("action of {name} sends {k} to unknown element {img}"))
                        })?);
                    }
                    if let Some(extra) = map.keys().find(|k| s.index_of(k).is_none()) {
                        return Err(CatError::Mismatch(format!(
                            "action of {name} mentions {extra}, which is not in its source fiber"
                        )));
                    }
                    t
                }
            };
            tables.push(table);
        }
        FiberedSpec::new(base, by_obj, tables)
    }

    pub fn base(&self) -> &Arc<Category> {
        &self.base
    }

    pub fn fiber(&self, b: Obj) -> &Poset {
        &self.fibers[b.index()]
    }

    pub fn fibers(&self) -> &[Poset] {
        &self.fibers
    }

    pub fn action(&self, f: Mor) -> &[usize] {
        &self.actions[f.index()]
    }

    pub fn with_fiber(&self, b: Obj, p: Poset) -> Result<FiberedSpec> {
        let mut fibers = self.fibers.clone();
        fibers[b.index()] = p;
        FiberedSpec::new(self.base.clone(), fibers, self.actions.clone())
    }

    pub fn with_action(&self, f: Mor, table: Vec<usize>) -> Result<FiberedSpec> {
        let mut actions = self.actions.clone();
        actions[f.index()] = table;
        FiberedSpec::new(self.base.clone(), self.fibers.clone(), actions)
    }

    /// Number of total-category morphisms, counted straight from the
    /// definition without building anything.
    pub fn total_morphism_count(&self) -> usize {
        self.base
            .morphisms()
            .map(|f| {
                let (s, d) = (self.fiber(self.base.src(f)), self.fiber(self.base.dst(f)));
                let a = self.action(f);
                (0..s.len())
                    .map(|k| (0..d.len()).filter(|&k2| d.leq(a[k], k2)).count())
                    .sum::<usize>()
            })
            .sum()
    }
}

/// Check names: `base.*`, `order.*`, `fiber.*`, `action.identity`,
/// `action.composition`, `action.monotone`, `action.bottom`.
/// Fiber-level witnesses start with `over <base object>:`.
pub fn validate_spec(s: &FiberedSpec) -> ValidationReport {
    let base = &s.base;
    let mut report = ValidationReport::new();
    report.extend_scoped("base", base.validate());

    for b in base.objects() {
        for v in s.fiber(b).validate().violations() {
            report.push(v.check.clone(), format!("over {}: {}", base.obj_id(b), v.witness));
        }
    }

    for f in base.morphisms() {
        let (src, dst) = (base.src(f), base.dst(f));
        let (p, q) = (s.fiber(src), s.fiber(dst));
        let a = s.action(f);
        let fname = base.mor_id(f);
        if base.is_identity(f) && a.iter().enumerate().any(|(k, &img)| k != img) {
            report.push("action.identity", format!("action of identity {fname} is not the identity map"));
        }
        for k in 0..p.len() {
            for k2 in 0..p.len() {
                if p.leq(k, k2) && !q.leq(a[k], a[k2]) {
                    report.push(
                        "action.monotone",
                        format!(
                            "action of {fname} is not monotone: {} <= {} but {} is not below {}",
                            p.element(k),
                            p.element(k2),
                            q.element(a[k]),
                            q.element(a[k2])
                        ),
                    );
                }
            }
        }
        if let (Some(bot), Some(bot2)) = (p.bottom(), q.bottom()) {
            if a[bot] != bot2 {
                report.push(
                    "action.bottom",
                    format!(
                        "action of {fname} sends bottom {} to {}, not to bottom {}",
                        p.element(bot),
                        q.element(a[bot]),
                        q.element(bot2)
                    ),
                );
            }
        }
    }

    for (g, f, h) in base.composition_table() {
        if base.dst(f) != base.src(g) {
            continue;
        }
        let (af, ag, ah) = (s.action(f), s.action(g), s.action(h));
        let p = s.fiber(base.src(f));
        for (k, &fk) in af.iter().enumerate() {
            if ag.get(fk) != ah.get(k) {
                report.push(
                    "action.composition",
                    format!(
                        "base pair {} o {}: composite action differs at {}",
                        base.mor_id(g),
                        base.mor_id(f),
                        p.element(k)
                    ),
                );
                break;
            }
        }
    }
    report
}

/// Violations that only concern the designated extremes; the total category
/// itself does not depend on them.
fn concerns_extremes(check: &str) -> bool {
    check.starts_with("fiber.top") || check.starts_with("fiber.bottom") || check == "action.bottom"
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Top,
    Bottom,
}

impl Extreme {
    fn name(self) -> &'static str {
        match self {
            Extreme::Top => "top",
            Extreme::Bottom => "bottom",
        }
    }
}

/// A total category with its projection to the base and the designated
/// extremal object of every fiber.
#[derive(Clone, Debug)]
pub struct TotalCategory {
    total: Arc<Category>,
    projection: Functor,
    decoding: Vec<(Obj, String)>,
    tops: Vec<Option<Obj>>,
    bottoms: Vec<Option<Obj>>,
}

impl TotalCategory {
    /// Assemble from parts, e.g. for hand-built totals that are not thin.
    /// `tops` and `bottoms` are indexed by base object.
    pub fn new(
        projection: Functor,
        decoding: Vec<(Obj, String)>,
        tops: Vec<Option<Obj>>,
        bottoms: Vec<Option<Obj>>,
    ) -> Result<TotalCategory> {
        let total = projection.source().clone();
        let base = projection.target();
        if decoding.len() != total.num_objects()
            || tops.len() != base.num_objects()
            || bottoms.len() != base.num_objects()
        {
            return Err(CatError::Mismatch("total category parts have inconsistent sizes".into()));
        }
        for (x, (b, _)) in decoding.iter().enumerate() {
            if projection.obj(Obj::from_index(x)) != *b {
                return Err(CatError::Mismatch(format!(
                    "object {} decodes to a base object other than its projection",
                    total.obj_id(Obj::from_index(x))
                )));
            }
        }
        Ok(TotalCategory {
            total,
            projection,
            decoding,
            tops,
            bottoms,
        })
    }

    pub fn total(&self) -> &Arc<Category> {
        &self.total
    }

    pub fn base(&self) -> &Arc<Category> {
        self.projection.target()
    }

    pub fn projection(&self) -> &Functor {
        &self.projection
    }

    /// `(base object, fiber element)` of a total object.
    pub fn decode(&self, x: Obj) -> (Obj, &str) {
        let (b, k) = &self.decoding[x.index()];
        (*b, k)
    }

    pub fn extreme(&self, b: Obj, which: Extreme) -> Option<Obj> {
        match which {
            Extreme::Top => self.tops[b.index()],
            Extreme::Bottom => self.bottoms[b.index()],
        }
    }

    /// Morphisms lying over an identity of the base.
    pub fn is_vertical(&self, m: Mor) -> bool {
        self.base().is_identity(self.projection.mor(m))
    }

    /// The vertical morphisms `x -> top` (or `bottom -> x`).
    fn vertical_to_extreme(&self, x: Obj, which: Extreme) -> Option<Vec<Mor>> {
        let e = self.extreme(self.projection.obj(x), which)?;
        let hom = match which {
            Extreme::Top => self.total.hom(x, e),
            Extreme::Bottom => self.total.hom(e, x),
        };
        Some(hom.iter().copied().filter(|&m| self.is_vertical(m)).collect())
    }

    /// Every `v` over the same base morphism as `u : x -> y` between the
    /// extremes of their fibers, making the unit (top) or counit (bottom)
    /// square commute. `unit` holds the chosen vertical components.
    fn lifts(&self, u: Mor, which: Extreme, unit: &[Mor]) -> Vec<Mor> {
        let c = &self.total;
        let (x, y) = (c.src(u), c.dst(u));
        let (Some(ex), Some(ey)) = (
            self.extreme(self.projection.obj(x), which),
            self.extreme(self.projection.obj(y), which),
        ) else {
            return Vec::new();
        };
        let over = self.projection.mor(u);
        c.hom(ex, ey)
            .iter()
            .copied()
            .filter(|&v| self.projection.mor(v) == over)
            .filter(|&v| match which {
                // v ∘ η_x = η_y ∘ u
                Extreme::Top => c.compose(v, unit[x.index()]).is_some_and(|l| c.compose(unit[y.index()], u) == Some(l)),
                // ψ_y ∘ v = u ∘ ψ_x
                Extreme::Bottom => {
                    c.compose(unit[y.index()], v).is_some_and(|l| c.compose(u, unit[x.index()]) == Some(l))
                }
            })
            .collect()
    }

    fn extremal_components(&self, which: Extreme) -> Result<Vec<Mor>> {
        let base = self.base();
        for b in base.objects() {
            if self.extreme(b, which).is_none() {
                return Err(CatError::MissingExtremal {
                    base: base.obj_id(b).to_string(),
                    which: which.name(),
                });
            }
        }
        self.total
            .objects()
            .map(|x| {
                let found = self.vertical_to_extreme(x, which).unwrap_or_default();
                match found.as_slice() {
                    [m] => Ok(*m),
                    _ => Err(CatError::Lift {
                        morphism: format!("<vertical at {}>", self.total.obj_id(x)),
                        which: which.name(),
                        count: found.len(),
                    }),
                }
            })
            .collect()
    }

    fn extremal_functor(&self, which: Extreme, components: &[Mor]) -> Result<Functor> {
        let c = self.total.clone();
        let on_obj: Vec<Obj> = c
            .objects()
            .map(|x| self.extreme(self.projection.obj(x), which).expect("checked"))
            .collect();
        let on_mor = c
            .morphisms()
            .map(|u| {
                let found = self.lifts(u, which, components);
                match found.as_slice() {
                    [v] => Ok(*v),
                    _ => Err(CatError::Lift {
                        morphism: c.mor_id(u).to_string(),
                        which: which.name(),
                        count: found.len(),
                    }),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Functor::new(c.clone(), c, on_obj, on_mor)
    }
}

pub fn build_total_category(s: &FiberedSpec) -> Result<TotalCategory> {
    let report = validate_spec(s);
    let blocking: Vec<_> = report
        .violations()
        .iter()
        .filter(|v| !concerns_extremes(&v.check))
        .cloned()
        .collect();
    if !blocking.is_empty() {
        return Err(CatError::invalid("fibered spec", ValidationReport::from_violations(blocking)));
    }

    let base = &s.base;
    let obj_name = |b: Obj, k: usize| format!("({},{})", base.obj_id(b), s.fiber(b).element(k));
    let mor_name = |f: Mor, k: usize, k2: usize| {
        let (p, q) = (s.fiber(base.src(f)), s.fiber(base.dst(f)));
        format!("{}:{}>{}", base.mor_id(f), p.element(k), q.element(k2))
    };

    let count = s.total_morphism_count();
    let limit = crate::fincat::max_morphisms();
    if count > limit {
        return Err(CatError::TooLarge { count, limit });
    }

    let mut b = Category::builder();
    for o in base.objects() {
        let p = s.fiber(o);
        for k in 0..p.len() {
            b.object(obj_name(o, k));
            if let Some(id) = base.identity(o) {
                b.identity(obj_name(o, k), mor_name(id, k, k));
            }
        }
    }
    // Morphisms over f, keyed for composition: (f, k, k2).
    let mut over: HashMap<Mor, Vec<(usize, usize)>> = HashMap::new();
    for f in base.morphisms() {
        let (src, dst) = (base.src(f), base.dst(f));
        let q = s.fiber(dst);
        let a = s.action(f);
        for (k, &ak) in a.iter().enumerate() {
            for k2 in (0..q.len()).filter(|&k2| q.leq(ak, k2)) {
                b.morphism(mor_name(f, k, k2), obj_name(src, k), obj_name(dst, k2));
                over.entry(f).or_default().push((k, k2));
            }
        }
    }
    for (g, f, h) in base.composition_table() {
        if base.dst(f) != base.src(g) {
            continue;
        }
        let (Some(fs), Some(gs)) = (over.get(&f), over.get(&g)) else {
            continue;
        };
        for &(k, k1) in fs {
            for &(_, k2) in gs.iter().filter(|&&(m, _)| m == k1) {
                b.compose(mor_name(g, k1, k2), mor_name(f, k, k1), mor_name(h, k, k2));
            }
        }
    }
    b.limit(limit);
    let total = Arc::new(b.build()?);

    let mut decoding = Vec::with_capacity(total.num_objects());
    let mut lookup = HashMap::new();
    for o in base.objects() {
        let p = s.fiber(o);
        for k in 0..p.len() {
            lookup.insert(obj_name(o, k), (o, k));
        }
    }
    for x in total.objects() {
        let (o, k) = lookup[total.obj_id(x).as_str()];
        decoding.push((o, s.fiber(o).element(k).to_string()));
    }
    let mut over_of = HashMap::new();
    for (f, pairs) in &over {
        for &(k, k2) in pairs {
            over_of.insert(mor_name(*f, k, k2), *f);
        }
    }
    let projection = Functor::new(
        total.clone(),
        base.clone(),
        decoding.iter().map(|(o, _)| *o).collect(),
        total.morphisms().map(|m| over_of[total.mor_id(m).as_str()]).collect(),
    )?;

    let pick = |which: fn(&Poset) -> Option<usize>| -> Result<Vec<Option<Obj>>> {
        base.objects()
            .map(|o| which(s.fiber(o)).map(|k| total.obj(&obj_name(o, k))).transpose())
            .collect()
    };
    let tops = pick(Poset::top)?;
    let bottoms = pick(Poset::bottom)?;
    TotalCategory::new(projection, decoding, tops, bottoms)
}

/// `(b, k) ↦ (b, top_b)`, unit = the vertical morphisms to the tops, and
/// morphisms sent to their unique lift between tops.
pub fn build_final_monad(t: &TotalCategory) -> Result<MonadDatum> {
    let eta = t.extremal_components(Extreme::Top)?;
    let n = t.extremal_functor(Extreme::Top, &eta)?;
    let unit = NatTrans::new(Functor::identity(t.total.clone()), n.clone(), eta)?;
    let datum = MonadDatum::new(n, unit)?;
    let report = check_idempotent_monad(&datum);
    if !report.is_empty() {
        return Err(CatError::invalid("fiber-top monad", report));
    }
    Ok(datum)
}

/// `(b, k) ↦ (b, bottom_b)`, counit = the vertical morphisms from the bottoms.
pub fn build_initial_comonad(t: &TotalCategory) -> Result<ComonadDatum> {
    let psi = t.extremal_components(Extreme::Bottom)?;
    let m = t.extremal_functor(Extreme::Bottom, &psi)?;
    let counit = NatTrans::new(m.clone(), Functor::identity(t.total.clone()), psi)?;
    let datum = ComonadDatum::new(m, counit)?;
    let report = check_idempotent_comonad(&datum);
    if !report.is_empty() {
        return Err(CatError::invalid("fiber-bottom comonad", report));
    }
    Ok(datum)
}

/// Sweep every morphism for unique lifts to both extremes.
///
/// Check names: `extreme.missing`, `vertical.top`, `vertical.bottom`,
/// `lift.top`, `lift.bottom`, `projection.*`.
pub fn check_extension_property(t: &TotalCategory) -> ValidationReport {
    let c = &t.total;
    let base = t.base();
    let mut report = ValidationReport::new();
    report.extend_scoped("projection", validate_functor(&t.projection));
    for which in [Extreme::Top, Extreme::Bottom] {
        let mut missing = false;
        for b in base.objects() {
            if t.extreme(b, which).is_none() {
                missing = true;
                report.push("extreme.missing", format!("fiber over {} has no {}", base.obj_id(b), which.name()));
            }
        }
        if missing {
            continue;
        }
        let mut components = Vec::with_capacity(c.num_objects());
        let mut complete = true;
        for x in c.objects() {
            let found = t.vertical_to_extreme(x, which).unwrap_or_default();
            if found.len() != 1 {
                complete = false;
                report.push(
                    format!("vertical.{}", which.name()),
                    format!("{}: {} vertical morphisms to the {}", c.obj_id(x), found.len(), which.name()),
                );
            }
            components.push(found.first().copied().unwrap_or(Mor::from_index(0)));
        }
        if !complete {
            continue;
        }
        for u in c.morphisms() {
            let n = t.lifts(u, which, &components).len();
            if n != 1 {
                report.push(
                    format!("lift.{}", which.name()),
                    format!("{}: {} lifts", c.mor_id(u), n),
                );
            }
        }
    }
    report
}

/// Size bounds for [`random_spec`]. `max_base_morphisms` counts
/// non-identity base morphisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_base_objects: usize,
    pub max_base_morphisms: usize,
    pub max_fiber: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_base_objects: 4,
            max_base_morphisms: 6,
            max_fiber: 5,
        }
    }
}

/// A pseudo-random spec, a pure function of `(seed, limits)`.
///
/// The base is the free category on a random acyclic multigraph (so any
/// choice of edge actions extends uniquely to a functorial action along
/// paths). Fibers are random subfamilies of a Boolean lattice ordered by
/// inclusion, always containing the empty set and the full set. Edge actions
/// are random monotone maps that keep bottoms at bottoms.
pub fn random_spec(seed: u64, limits: Limits) -> Result<FiberedSpec> {
    if limits.max_base_objects == 0 {
        return Err(CatError::Limits("the base needs at least one object".into()));
    }
    if limits.max_fiber == 0 {
        return Err(CatError::Limits("fibers need at least one element".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=limits.max_base_objects);

    // Edges i -> j with i < j, at most two parallel copies per pair.
    let mut slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).flat_map(move |j| [(i, j), (i, j)]))
        .collect();
    slots.shuffle(&mut rng);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for slot in slots {
        if !rng.random_bool(0.5) {
            continue;
        }
        edges.push(slot);
        if paths(n, &edges).len() > limits.max_base_morphisms {
            edges.pop();
        }
    }
    let all_paths = paths(n, &edges);

    let obj = |i: usize| format!("b{i}");
    let edge_name = |e: usize| format!("e{e}");
    // A path is a list of edge indices in application order; its name lists
    // them in composition order, `e2.e0` for e2 ∘ e0.
    let path_name = |p: &[usize]| p.iter().rev().map(|&e| edge_name(e)).collect::<Vec<_>>().join(".");

    let mut b = Category::builder();
    for i in 0..n {
        b.object(obj(i)).morphism(format!("id_{}", obj(i)), obj(i), obj(i));
        b.identity(obj(i), format!("id_{}", obj(i)));
    }
    for p in &all_paths {
        let (s, d) = (edges[p[0]].0, edges[*p.last().unwrap()].1);
        b.morphism(path_name(p), obj(s), obj(d));
    }
    for p in &all_paths {
        for q in &all_paths {
            if edges[*p.last().unwrap()].1 == edges[q[0]].0 {
                let pq: Vec<usize> = p.iter().chain(q).copied().collect();
                b.compose(path_name(q), path_name(p), path_name(&pq));
            }
        }
    }
    let base = Arc::new(b.build()?);

    let fibers: Vec<Poset> = (0..n).map(|_| random_fiber(&mut rng, limits.max_fiber)).collect();
    let edge_actions: Vec<Vec<usize>> = edges
        .iter()
        .map(|&(s, d)| random_monotone(&mut rng, &fibers[s], &fibers[d]))
        .collect();

    let mut actions = vec![Vec::new(); base.num_morphisms()];
    for (i, fiber) in fibers.iter().enumerate() {
        let id = base.mor(&format!("id_{}", obj(i)))?;
        actions[id.index()] = (0..fiber.len()).collect();
    }
    for p in &all_paths {
        let start = edges[p[0]].0;
        let table = (0..fibers[start].len())
            .map(|k| p.iter().fold(k, |acc, &e| edge_actions[e][acc]))
            .collect();
        actions[base.mor(&path_name(p))?.index()] = table;
    }
    FiberedSpec::new(base, fibers, actions)
}

/// All non-empty paths in an acyclic multigraph, each as edge indices.
fn paths(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = (0..edges.len()).map(|e| vec![e]).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            let end = edges[*p.last().unwrap()].1;
            for (e, &(s, _)) in edges.iter().enumerate() {
                if s == end {
                    let mut q = p.clone();
                    q.push(e);
                    next.push(q);
                }
            }
        }
        out.append(&mut frontier);
        frontier = next;
        // Edges go from lower to higher indices, so paths have < n edges.
        debug_assert!(frontier.iter().all(|p| p.len() < n.max(1)));
    }
    out
}

fn random_fiber(rng: &mut ChaCha8Rng, max: usize) -> Poset {
    let size = rng.random_range(1..=max);
    if size == 1 {
        return Poset::chain(&["k0"]);
    }
    let mut bits = 3;
    while (1usize << bits) - 2 < size - 2 {
        bits += 1;
    }
    let full = (1usize << bits) - 1;
    let mut middle: Vec<usize> = (1..full).collect();
    middle.shuffle(rng);
    let mut masks = vec![0, full];
    masks.extend(middle.into_iter().take(size - 2));
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let names = masks.iter().map(|m| format!("k{m:0bits$b}")).collect();
    let leq = masks
        .iter()
        .map(|&a| masks.iter().map(|&b| a & b == a).collect())
        .collect();
    Poset::from_matrix(names, leq, Some(0), Some(masks.len() - 1)).expect("random fiber")
}

/// Elements are visited in a linear extension; each picks uniformly among
/// the targets above the images of everything already below it.
fn random_monotone(rng: &mut ChaCha8Rng, from: &Poset, to: &Poset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..from.len()).collect();
    order.sort_by_key(|&k| (0..from.len()).filter(|&j| from.leq(j, k)).count());
    let mut image = vec![usize::MAX; from.len()];
    for k in order {
        if Some(k) == from.bottom() {
            image[k] = to.bottom().unwrap_or(0);
            continue;
        }
        let lower: Vec<usize> = (0..from.len())
            .filter(|&j| j != k && from.leq(j, k))
            .map(|j| image[j])
            .collect();
        let candidates: Vec<usize> = (0..to.len()).filter(|&q| lower.iter().all(|&l| to.leq(l, q))).collect();
        image[k] = candidates[rng.random_range(0..candidates.len())];
    }
    image
}

/// Two base objects `b0 -> b1`, a three-element chain over `b0` and a
/// two-element chain over `b1`; `f` sends `bot0, mid0` to `bot1` and `top0`
/// to `top1`.
pub fn canonical_c2() -> FiberedSpec {
    let mut b = Category::builder();
    b.object("b0").object("b1");
    b.morphism("id_b0", "b0", "b0").morphism("id_b1", "b1", "b1");
    b.identity("b0", "id_b0").identity("b1", "id_b1");
    b.morphism("f", "b0", "b1");
    let base = Arc::new(b.build().expect("C2 base"));
    let fibers = BTreeMap::from([
        ("b0".to_string(), Poset::chain(&["bot0", "mid0", "top0"])),
        ("b1".to_string(), Poset::chain(&["bot1", "top1"])),
    ]);
    let f = BTreeMap::from([
        ("bot0".to_string(), "bot1".to_string()),
        ("mid0".to_string(), "bot1".to_string()),
        ("top0".to_string(), "top1".to_string()),
    ]);
    FiberedSpec::from_named(base, fibers, BTreeMap::from([("f".to_string(), f)])).expect("C2 spec")
}

/// One base object with a one-element fiber.
pub fn trivial_spec() -> FiberedSpec {
    let mut b = Category::builder();
    b.object("b").morphism("id_b", "b", "b").identity("b", "id_b");
    let base = Arc::new(b.build().expect("trivial base"));
    FiberedSpec::from_named(
        base,
        BTreeMap::from([("b".to_string(), Poset::chain(&["k"]))]),
        BTreeMap::new(),
    )
    .expect("trivial spec")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c2_counts() {
        let s = canonical_c2();
        assert!(validate_spec(&s).is_empty());
        let t = build_total_category(&s).unwrap();
        assert_eq!(t.total().num_objects(), 5);
        assert_eq!(t.total().num_morphisms(), 14);
        assert_eq!(s.total_morphism_count(), 14);
        assert!(t.total().validate().is_empty());
    }

    #[test]
    fn cyclic_fiber_is_named() {
        let p = Poset::generated(vec!["a".into(), "b".into(), "c".into()], &[(0, 1), (1, 2), (2, 0)], Some(0), Some(2))
            .unwrap();
        let r = p.validate();
        assert!(r.has_check("order.cycle"));
        assert!(r.to_string().contains("cycle a <= b <= c <= a"), "{r}");
    }

    #[test]
    fn poset_covers() {
        let p = Poset::chain(&["x", "y", "z"]);
        let names: Vec<(&str, &str)> = p.covers().iter().map(|&(a, b)| (p.element(a), p.element(b))).collect();
        assert_eq!(names, vec![("x", "y"), ("y", "z")]);
    }

    #[test]
    fn paths_in_a_diamond() {
        // 0 -> 1 -> 3 and 0 -> 2 -> 3
        let e = [(0, 1), (1, 3), (0, 2), (2, 3)];
        assert_eq!(paths(4, &e).len(), 6);
    }

    #[test]
    fn random_fibers_are_bounded_lattices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_fiber(&mut rng, 5);
            assert!(p.validate().is_empty(), "{}", p.validate());
            assert!(p.len() <= 5);
        }
    }
}
