//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use catmn_cli::commands::{
    cmd_export_dot, cmd_mn_check, cmd_random, cmd_transport, cmd_validate, load, mn_check_spec, TransportMode,
};
use catmn_cli::workspace::Status;
use catmn_core::fibered::{
    build_final_monad, build_initial_comonad, build_total_category, canonical_c2, random_spec, FiberedSpec, Limits,
    TotalCategory,
};
use catmn_core::functor::{whisker_left, whisker_right};
use catmn_core::maxnormal::{
    build_mn_equivalence, check_mn_hypotheses, run_mn_pipeline, verify_adjoint_equivalence, verify_factorizations,
    MNPair,
};
use catmn_core::monad::{
    check_idempotent_comonad, check_idempotent_monad, fixed_subcategory_comonad, fixed_subcategory_monad,
    verify_coreflection, verify_reflection, ComonadDatum, MonadDatum,
};
use catmn_core::transport::{transport, verify_transfer, ContravariantEquivalence};
use catmn_core::{Category, NatTrans, Obj};

const INSTANCES: u64 = 200;
const TRANSPORTED: u64 = 50;
const TIME_BUDGET: Duration = Duration::from_secs(10);
const MIN_CORRUPT_FIXTURES: usize = 10;

struct Instance {
    seed: u64,
    total: TotalCategory,
    monad: MonadDatum,
    comonad: ComonadDatum,
}

type Verdict = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn instance(seed: u64) -> Result<Instance, String> {
    let spec = random_spec(seed, Limits::default()).map_err(|e| format!("seed {seed}: {e}"))?;
    let total = build_total_category(&spec).map_err(|e| format!("seed {seed}: {e}"))?;
    let monad = build_final_monad(&total).map_err(|e| format!("seed {seed}: {e}"))?;
    let comonad = build_initial_comonad(&total).map_err(|e| format!("seed {seed}: {e}"))?;
    Ok(Instance { seed, total, monad, comonad })
}

fn criterion_1(instances: &mut Vec<Instance>) -> Verdict {
    let start = Instant::now();
    for seed in 0..INSTANCES {
        let inst = instance(seed)?;
        let (rm, rc) = (check_idempotent_monad(&inst.monad), check_idempotent_comonad(&inst.comonad));
        ensure(rm.is_empty(), || format!("seed {seed}: monad: {rm}"))?;
        ensure(rc.is_empty(), || format!("seed {seed}: comonad: {rc}"))?;
        instances.push(inst);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < TIME_BUDGET, || format!("took {elapsed:.2?}, budget {TIME_BUDGET:?}"))?;
    let morphisms: usize = instances.iter().map(|i| i.total.total().num_morphisms()).sum();
    Ok(format!("{INSTANCES} instances, {morphisms} total morphisms, {elapsed:.2?} (budget {TIME_BUDGET:?})"))
}

fn criterion_2(instances: &[Instance]) -> Verdict {
    for i in instances {
        let refl = fixed_subcategory_monad(&i.monad).map_err(|e| format!("seed {}: {e}", i.seed))?;
        let corefl = fixed_subcategory_comonad(&i.comonad).map_err(|e| format!("seed {}: {e}", i.seed))?;
        let (r, c) = (verify_reflection(&refl), verify_coreflection(&corefl));
        ensure(r.is_empty(), || format!("seed {}: reflection: {r}", i.seed))?;
        ensure(c.is_empty(), || format!("seed {}: coreflection: {c}", i.seed))?;
    }
    Ok(format!("{} instances, every universal sweep unique and in closed form", instances.len()))
}

/// Objects final within their own fiber, found by counting hom-sets.
fn fiberwise_final(t: &TotalCategory) -> BTreeSet<Obj> {
    let c = t.total();
    let fiber = |x: Obj| t.projection().obj(x);
    c.objects()
        .filter(|&x| {
            c.objects().filter(|&y| fiber(y) == fiber(x)).all(|y| {
                c.hom(y, x).iter().filter(|&&m| t.is_vertical(m)).count() == 1
            })
        })
        .collect()
}

fn fiberwise_initial(t: &TotalCategory) -> BTreeSet<Obj> {
    let c = t.total();
    let fiber = |x: Obj| t.projection().obj(x);
    c.objects()
        .filter(|&x| {
            c.objects().filter(|&y| fiber(y) == fiber(x)).all(|y| {
                c.hom(x, y).iter().filter(|&&m| t.is_vertical(m)).count() == 1
            })
        })
        .collect()
}

fn criterion_3(instances: &[Instance]) -> Verdict {
    for i in instances {
        let pair = MNPair::new(&i.monad, &i.comonad).map_err(|e| format!("seed {}: {e}", i.seed))?;
        let h = check_mn_hypotheses(&pair);
        ensure(h.is_empty(), || format!("seed {}: hypotheses: {h}", i.seed))?;
        let e = build_mn_equivalence(&pair).map_err(|e| format!("seed {}: {e}", i.seed))?;
        let a = verify_adjoint_equivalence(&e);
        ensure(a.is_empty(), || format!("seed {}: adjoint equivalence: {a}", i.seed))?;
        let f = verify_factorizations(&pair, &e);
        ensure(f.is_empty(), || format!("seed {}: factorizations: {f}", i.seed))?;
    }

    let c2 = instance_from(&canonical_c2())?;
    let pair = MNPair::new(&c2.monad, &c2.comonad).map_err(|e| e.to_string())?;
    let n_fixed: BTreeSet<Obj> = pair.reflection().fixed_objects().into_iter().collect();
    let m_fixed: BTreeSet<Obj> = pair.coreflection().fixed_objects().into_iter().collect();
    ensure(n_fixed.len() == 2 && m_fixed.len() == 2, || {
        format!("C2 fixed subcategories have {} and {} objects", n_fixed.len(), m_fixed.len())
    })?;
    ensure(n_fixed == fiberwise_final(&c2.total), || "C2 monad fixes something other than fiber tops".into())?;
    ensure(m_fixed == fiberwise_initial(&c2.total), || "C2 comonad fixes something other than fiber bottoms".into())?;
    let e = build_mn_equivalence(&pair).map_err(|e| e.to_string())?;
    for (name, f) in [("forward", &e.forward), ("backward", &e.backward)] {
        let image: BTreeSet<Obj> = f.source().objects().map(|x| f.obj(x)).collect();
        ensure(
            f.source().num_objects() == f.target().num_objects() && image.len() == f.target().num_objects(),
            || format!("C2 {name} functor is not object-bijective"),
        )?;
    }
    Ok(format!("{} instances; C2: 2 + 2 fixed objects, object-bijective both ways", instances.len()))
}

fn instance_from(spec: &FiberedSpec) -> Result<Instance, String> {
    let total = build_total_category(spec).map_err(|e| e.to_string())?;
    let monad = build_final_monad(&total).map_err(|e| e.to_string())?;
    let comonad = build_initial_comonad(&total).map_err(|e| e.to_string())?;
    Ok(Instance { seed: 0, total, monad, comonad })
}

/// Every component is the identity of its object, by identifier.
fn is_identity_by_id(c: &Category, alpha: &NatTrans) -> bool {
    c.objects().all(|x| {
        let comp = alpha.component(x);
        c.identity(alpha.source().obj(x)).is_some_and(|id| c.mor_id(comp) == c.mor_id(id))
            && alpha.source().obj(x) == alpha.target().obj(x)
    })
}

fn criterion_4(instances: &[Instance]) -> Verdict {
    for i in instances {
        let c = i.total.total();
        let (n, eta) = (i.monad.functor(), i.monad.unit());
        let (m, psi) = (i.comonad.functor(), i.comonad.counit());
        let whiskered = [
            ("N eta", whisker_left(n, eta)),
            ("eta N", whisker_right(eta, n)),
            ("M psi", whisker_left(m, psi)),
            ("psi M", whisker_right(psi, m)),
            ("N psi", whisker_left(n, psi)),
            ("M eta", whisker_left(m, eta)),
        ];
        for (name, alpha) in whiskered {
            let alpha = alpha.map_err(|e| format!("seed {}: {name}: {e}", i.seed))?;
            ensure(is_identity_by_id(c, &alpha), || format!("seed {}: {name} is not the identity", i.seed))?;
        }
    }
    Ok(format!("{} instances x 6 whiskerings, exact identifier equality", instances.len()))
}

fn criterion_5(instances: &[Instance]) -> Verdict {
    for i in instances.iter().take(TRANSPORTED as usize) {
        let e = ContravariantEquivalence::relabeled_opposite(i.total.total());
        let r = transport(&e, &i.monad, &i.comonad).map_err(|e| format!("seed {}: {e}", i.seed))?;
        let tc = check_idempotent_comonad(&r.induced_comonad);
        ensure(tc.is_empty(), || format!("seed {}: induced comonad: {tc}", i.seed))?;
        let sm = check_idempotent_monad(&r.induced_monad);
        ensure(sm.is_empty(), || format!("seed {}: induced monad: {sm}", i.seed))?;
        let v = verify_transfer(&e, &i.monad, &i.comonad, &r);
        ensure(v.is_empty() && v.notes().is_empty(), || format!("seed {}: transfer: {v}", i.seed))?;
        let run = run_mn_pipeline(&r.induced_monad, &r.induced_comonad);
        ensure(run.passed(), || {
            let stage = run.failed_stage().map_or("incomplete", |s| s.name);
            format!("seed {}: pipeline on the opposite fails at {stage}", i.seed)
        })?;
    }
    Ok(format!("{TRANSPORTED} instances transported, pipeline passes on the opposite"))
}

fn expectation(path: &Path) -> Result<(String, String), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let header = text
        .lines()
        .find_map(|l| l.strip_prefix("# expect: "))
        .ok_or_else(|| format!("{}: no expect header", path.display()))?;
    let mut words = header.split_whitespace();
    match (words.next(), words.next(), words.next()) {
        (Some(v), Some(c), None) => Ok((v.to_string(), c.to_string())),
        _ => Err(format!("{}: malformed expect header", path.display())),
    }
}

fn criterion_6() -> Verdict {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures().join("corrupt"))
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.path()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    paths.sort();
    ensure(paths.len() >= MIN_CORRUPT_FIXTURES, || {
        format!("only {} corrupted fixtures, need {MIN_CORRUPT_FIXTURES}", paths.len())
    })?;
    let mut validators = BTreeSet::new();
    for p in &paths {
        let file = p.file_name().unwrap().to_string_lossy().into_owned();
        let (validator, check) = expectation(p)?;
        let (_, ws) = load(p).map_err(|e| format!("{file}: {e}"))?;
        let failed: Vec<_> = ws.outcomes.iter().filter(|o| o.status == Status::Invalid).collect();
        let [o] = failed.as_slice() else {
            return Err(format!("{file}: {} validators failed, expected exactly 1", failed.len()));
        };
        ensure(o.validator == validator, || format!("{file}: detected by {}, expected {validator}", o.validator))?;
        ensure(o.report.has_check(&check), || format!("{file}: no {check} violation in {}", o.report))?;
        ensure(o.report.violations().iter().all(|v| !v.witness.is_empty()), || format!("{file}: empty witness"))?;
        let out = cmd_validate(p).map_err(|e| format!("{file}: {e}"))?;
        ensure(out.code != 0, || format!("{file}: validate passed"))?;
        let witness = &o.report.violations()[0].witness;
        ensure(out.text.contains(witness.as_str()), || format!("{file}: report omits the witness"))?;
        validators.insert(validator);
    }
    for p in ["canonical_c2.spec", "trivial.spec", "reflection.cat", "coreflection.cat"] {
        let out = cmd_validate(&fixtures().join(p)).map_err(|e| format!("{p}: {e}"))?;
        ensure(out.code == 0, || format!("positive control {p} fails:\n{}", out.text))?;
    }
    Ok(format!(
        "{} corrupted files, 0 false passes, {} distinct validators; 4 positive controls pass",
        paths.len(),
        validators.len()
    ))
}

/// Every report the CLI produces for the fixtures and a handful of random specs.
fn all_reports() -> Result<Vec<String>, String> {
    let err = |e: catmn_cli::commands::CliError| e.to_string();
    let mut out = Vec::new();
    let mut files: Vec<PathBuf> = vec![
        fixtures().join("canonical_c2.spec"),
        fixtures().join("trivial.spec"),
        fixtures().join("reflection.cat"),
        fixtures().join("coreflection.cat"),
    ];
    let mut corrupt: Vec<PathBuf> =
        std::fs::read_dir(fixtures().join("corrupt")).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    corrupt.sort();
    files.extend(corrupt);
    for f in &files {
        out.push(cmd_validate(f).map_err(err)?.text);
        out.push(cmd_export_dot(f, None).map_err(err)?.text);
    }
    for f in &files[..2] {
        out.push(cmd_mn_check(f, None).map_err(err)?.text);
        for mode in [TransportMode::RelabelOpposite, TransportMode::PowersetDualityDemo] {
            out.push(cmd_transport(f, mode, None).map_err(err)?.text);
        }
    }
    for seed in 0..20 {
        out.push(cmd_random(seed, Limits::default(), false).map_err(err)?.text);
        let spec = random_spec(seed, Limits::default()).map_err(|e| e.to_string())?;
        out.push(mn_check_spec(&format!("random{seed}"), &spec).text);
    }
    Ok(out)
}

fn in_pool(threads: usize) -> Result<Vec<String>, String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?
        .install(all_reports)
}

fn criterion_7() -> Verdict {
    let first = all_reports()?;
    let second = all_reports()?;
    ensure(first == second, || "reports differ between two runs".into())?;
    let one = in_pool(1)?;
    let four = in_pool(4)?;
    ensure(one == first && four == first, || "reports differ across thread counts".into())?;
    for seed in 0..INSTANCES {
        let a = random_spec(seed, Limits::default()).map_err(|e| e.to_string())?;
        let b = random_spec(seed, Limits::default()).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("random_spec({seed}) is not reproducible"))?;
    }
    let bytes: usize = first.iter().map(String::len).sum();
    Ok(format!(
        "{} reports ({bytes} bytes) identical over 2 runs and 1/4 threads; {INSTANCES} seeds reproducible",
        first.len()
    ))
}

fn main() -> ExitCode {
    let mut instances = Vec::new();
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    results.push((1, "idempotent monad and comonad laws", criterion_1(&mut instances)));
    let have = instances.len() == INSTANCES as usize;
    let need = || Err::<String, _>("instances unavailable (criterion 1 failed)".to_string());
    results.push((2, "reflection and coreflection sweeps", if have { criterion_2(&instances) } else { need() }));
    results.push((3, "maximal-normal equivalence", if have { criterion_3(&instances) } else { need() }));
    results.push((4, "whiskered identities", if have { criterion_4(&instances) } else { need() }));
    results.push((5, "transport across the opposite", if have { criterion_5(&instances) } else { need() }));
    results.push((6, "negative controls", criterion_6()));
    results.push((7, "determinism", criterion_7()));

    let mut ok = true;
    for (n, name, verdict) in &results {
        match verdict {
            Ok(detail) => println!("PASS criterion {n}: {name}: {detail}"),
            Err(why) => {
                ok = false;
                println!("FAIL criterion {n}: {name}: {why}");
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
