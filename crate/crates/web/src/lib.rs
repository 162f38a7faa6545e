//! Browser demo: seeded random fibered categories, drawn as SVG, with the
//! maximal-normal pipeline and transport run on them.
//!
//! Every export takes plain numbers and returns a string, so the page needs
//! no bindings beyond `wasm-bindgen`'s own glue. Failures come back as
//! `Err(message)`, which JavaScript sees as a thrown string.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use catmn_core::fibered::{
    build_final_monad, build_initial_comonad, build_total_category, random_spec, FiberedSpec, Limits, TotalCategory,
};
use catmn_core::maxnormal::run_mn_pipeline;
use catmn_core::monad::{fixed_subcategory_comonad, fixed_subcategory_monad, ComonadDatum, MonadDatum};
use catmn_core::transport::{powerset, transport, verify_transfer, ContravariantEquivalence};
use catmn_core::{Category, Mor, Obj};
use wasm_bindgen::prelude::*;

const CELL_W: f64 = 150.0;
const CELL_H: f64 = 70.0;
const MARGIN: f64 = 40.0;
const RADIUS: f64 = 16.0;

struct Instance {
    spec: FiberedSpec,
    total: TotalCategory,
    monad: MonadDatum,
    comonad: ComonadDatum,
}

fn limits(max_base: u32, max_fiber: u32) -> Limits {
    Limits {
        max_base_objects: max_base as usize,
        max_fiber: max_fiber as usize,
        ..Limits::default()
    }
}

fn instance(seed: u32, max_base: u32, max_fiber: u32) -> Result<Instance, String> {
    let spec = random_spec(u64::from(seed), limits(max_base, max_fiber)).map_err(|e| e.to_string())?;
    let total = build_total_category(&spec).map_err(|e| e.to_string())?;
    let monad = build_final_monad(&total).map_err(|e| e.to_string())?;
    let comonad = build_initial_comonad(&total).map_err(|e| e.to_string())?;
    Ok(Instance { spec, total, monad, comonad })
}

fn fixed_sets(inst: &Instance) -> Result<(BTreeSet<Obj>, BTreeSet<Obj>), String> {
    let n = fixed_subcategory_monad(&inst.monad).map_err(|e| e.to_string())?;
    let m = fixed_subcategory_comonad(&inst.comonad).map_err(|e| e.to_string())?;
    Ok((n.fixed_objects().into_iter().collect(), m.fixed_objects().into_iter().collect()))
}

/// Length of the longest chain below each element.
fn ranks(p: &catmn_core::fibered::Poset) -> Vec<usize> {
    let mut rank = vec![0; p.len()];
    // Longest chains have at most `len` links, so `len` relaxation rounds suffice.
    for _ in 0..p.len() {
        for (a, b) in p.covers() {
            rank[b] = rank[b].max(rank[a] + 1);
        }
    }
    rank
}

/// Morphisms that are neither identities nor composites of two non-identities.
fn generators(c: &Category) -> Vec<Mor> {
    let composites: BTreeSet<Mor> = c
        .composition_table()
        .into_iter()
        .filter(|&(g, f, _)| !c.is_identity(g) && !c.is_identity(f))
        .map(|(_, _, h)| h)
        .collect();
    c.morphisms().filter(|&m| !c.is_identity(m) && !composites.contains(&m)).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn names(c: &Category, xs: &BTreeSet<Obj>) -> String {
    xs.iter().map(|&x| c.obj_id(x).as_str()).collect::<Vec<_>>().join(" ")
}

/// The total category of a random spec: one column per base object, fiber
/// elements stacked by rank, Hasse edges inside fibers and the least lift of
/// each base morphism between them. Objects fixed by the fiber-top monad are
/// ringed, objects fixed by the fiber-bottom comonad are shaded.
#[wasm_bindgen]
pub fn render_total_svg(seed: u32, max_base: u32, max_fiber: u32) -> Result<String, String> {
    let inst = instance(seed, max_base, max_fiber)?;
    let (tops, bottoms) = fixed_sets(&inst)?;
    let (spec, t) = (&inst.spec, &inst.total);
    let base = spec.base();

    // (rank, slot within the rank, elements of that rank) per fiber element
    let mut pos = Vec::new();
    let mut height = 0usize;
    for b in base.objects() {
        let rank = ranks(spec.fiber(b));
        let mut seen = vec![0usize; rank.len() + 1];
        let slots: Vec<usize> = rank
            .iter()
            .map(|&r| {
                seen[r] += 1;
                seen[r] - 1
            })
            .collect();
        height = height.max(rank.iter().max().map_or(0, |&r| r + 1));
        pos.push(rank.iter().zip(slots).map(|(&r, slot)| (r, slot, seen[r])).collect::<Vec<_>>());
    }
    let width = base.num_objects();
    let w = 2.0 * MARGIN + CELL_W * width as f64;
    let h = 2.0 * MARGIN + CELL_H * height as f64 + 20.0;
    let xy = |b: Obj, k: usize| {
        let (r, slot, count) = pos[b.index()][k];
        let x = MARGIN + CELL_W * (b.index() as f64 + 0.5) + (slot as f64 - (count - 1) as f64 / 2.0) * 2.5 * RADIUS;
        let y = h - MARGIN - CELL_H * (r as f64 + 0.5);
        (x, y)
    };

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#).unwrap();
    writeln!(s, r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/></marker></defs>"##).unwrap();
    for b in base.objects() {
        let x = MARGIN + CELL_W * (b.index() as f64 + 0.5);
        writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle" font-weight="bold">{}</text>"#, h - 12.0, escape(base.obj_id(b).as_str())).unwrap();
    }
    let edge = |s: &mut String, (x1, y1): (f64, f64), (x2, y2): (f64, f64), class: &str| {
        let (dx, dy) = (x2 - x1, y2 - y1);
        let len = (dx * dx + dy * dy).sqrt().max(1e-9);
        let (ux, uy) = (dx / len, dy / len);
        writeln!(
            s,
            r##"<line class="{class}" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#555" marker-end="url(#arrow)"/>"##,
            x1 + ux * RADIUS,
            y1 + uy * RADIUS,
            x2 - ux * RADIUS,
            y2 - uy * RADIUS
        )
        .unwrap();
    };
    for b in base.objects() {
        for (lo, hi) in spec.fiber(b).covers() {
            edge(&mut s, xy(b, lo), xy(b, hi), "vertical");
        }
    }
    for f in generators(base) {
        let (src, dst) = (base.src(f), base.dst(f));
        for (k, &image) in spec.action(f).iter().enumerate() {
            edge(&mut s, xy(src, k), xy(dst, image), "lift");
        }
    }
    for x in t.total().objects() {
        let (b, element) = t.decode(x);
        let k = spec.fiber(b).index_of(element).expect("decoded element belongs to its fiber");
        let (cx, cy) = xy(b, k);
        let fill = if bottoms.contains(&x) { "#cfd8e3" } else { "white" };
        writeln!(s, r##"<circle cx="{cx:.1}" cy="{cy:.1}" r="{RADIUS}" fill="{fill}" stroke="#222"/>"##).unwrap();
        if tops.contains(&x) {
            writeln!(s, r##"<circle cx="{cx:.1}" cy="{cy:.1}" r="{}" fill="none" stroke="#222"/>"##, RADIUS + 4.0).unwrap();
        }
        writeln!(s, r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, cy + 4.0, escape(element)).unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Sizes, fixed objects and the outcome of each pipeline stage.
#[wasm_bindgen]
pub fn mn_summary(seed: u32, max_base: u32, max_fiber: u32) -> Result<String, String> {
    let inst = instance(seed, max_base, max_fiber)?;
    let (tops, bottoms) = fixed_sets(&inst)?;
    let (base, c) = (inst.spec.base(), inst.total.total());
    let mut s = String::new();
    writeln!(s, "seed {seed}").unwrap();
    writeln!(s, "base: {} objects, {} morphisms", base.num_objects(), base.num_morphisms()).unwrap();
    writeln!(s, "total category: {} objects, {} morphisms", c.num_objects(), c.num_morphisms()).unwrap();
    writeln!(s, "fixed by monad: {}", names(c, &tops)).unwrap();
    writeln!(s, "fixed by comonad: {}", names(c, &bottoms)).unwrap();
    let run = run_mn_pipeline(&inst.monad, &inst.comonad);
    for stage in &run.stages {
        let verdict = if stage.report.is_empty() { "ok".to_string() } else { format!("FAIL ({})", stage.report.len()) };
        writeln!(s, "{:<20} {verdict}", stage.name).unwrap();
    }
    writeln!(s, "result: {}", if run.passed() { "pass" } else { "FAIL" }).unwrap();
    Ok(s)
}

/// Transport across the relabeled opposite of the seeded instance
/// (`mode = "relabel-opposite"`) or across the built-in powerset duality
/// (`mode = "powerset-duality-demo"`, seed ignored).
#[wasm_bindgen]
pub fn transport_summary(seed: u32, max_base: u32, max_fiber: u32, mode: &str) -> Result<String, String> {
    let (e, n, m) = match mode {
        "relabel-opposite" => {
            let inst = instance(seed, max_base, max_fiber)?;
            let e = ContravariantEquivalence::relabeled_opposite(inst.total.total());
            (e, inst.monad, inst.comonad)
        }
        "powerset-duality-demo" => {
            let e = powerset::equivalence().map_err(|e| e.to_string())?;
            let n = powerset::terminal_monad(e.c()).map_err(|e| e.to_string())?;
            let m = ComonadDatum::identity(e.c().clone());
            (e, n, m)
        }
        other => return Err(format!("unknown mode {other}")),
    };
    let r = transport(&e, &n, &m).map_err(|e| e.to_string())?;
    let d = e.d();
    let t_fixed: BTreeSet<Obj> = fixed_subcategory_comonad(&r.induced_comonad)
        .map_err(|e| e.to_string())?
        .fixed_objects()
        .into_iter()
        .collect();
    let s_fixed: BTreeSet<Obj> = fixed_subcategory_monad(&r.induced_monad)
        .map_err(|e| e.to_string())?
        .fixed_objects()
        .into_iter()
        .collect();
    let report = verify_transfer(&e, &n, &m, &r);
    let mut s = String::new();
    writeln!(s, "mode {mode}").unwrap();
    writeln!(s, "C: {} objects, {} morphisms", e.c().num_objects(), e.c().num_morphisms()).unwrap();
    writeln!(s, "D: {} objects, {} morphisms", d.num_objects(), d.num_morphisms()).unwrap();
    writeln!(s, "fixed by induced comonad T: {}", names(d, &t_fixed)).unwrap();
    writeln!(s, "fixed by induced monad S: {}", names(d, &s_fixed)).unwrap();
    writeln!(s, "transfer: {}", if report.is_empty() { "ok".to_string() } else { report.to_string() }).unwrap();
    for note in report.notes() {
        writeln!(s, "  note: {note}").unwrap();
    }
    let run = run_mn_pipeline(&r.induced_monad, &r.induced_comonad);
    let verdict = match run.failed_stage() {
        None if run.passed() => "pass".to_string(),
        Some(stage) => format!("stops at {}", stage.name),
        None => "incomplete".to_string(),
    };
    writeln!(s, "pipeline on D: {verdict}").unwrap();
    Ok(s)
}
