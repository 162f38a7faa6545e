use catmn_core::fibered::{build_total_category, random_spec, Limits};
use catmn_web::{mn_summary, render_total_svg, transport_summary};

fn total_objects(seed: u32) -> usize {
    let spec = random_spec(u64::from(seed), Limits::default()).unwrap();
    build_total_category(&spec).unwrap().total().num_objects()
}

#[test]
fn svg_has_one_node_per_object_and_a_ring_per_fiber_top() {
    for seed in 0..20 {
        let svg = render_total_svg(seed, 4, 5).unwrap();
        assert!(svg.starts_with("<svg ") && svg.ends_with("</svg>\n"));
        let n = total_objects(seed);
        let spec = random_spec(u64::from(seed), Limits::default()).unwrap();
        let fibers = spec.base().num_objects();
        assert_eq!(svg.matches("<circle").count(), n + fibers, "seed {seed}");
        assert_eq!(svg.matches(r##"fill="#cfd8e3""##).count(), fibers, "seed {seed}");
        assert_eq!(svg.matches("<text").count(), n + fibers);
    }
}

#[test]
fn svg_is_deterministic() {
    assert_eq!(render_total_svg(7, 4, 5).unwrap(), render_total_svg(7, 4, 5).unwrap());
    assert_ne!(render_total_svg(7, 4, 5).unwrap(), render_total_svg(8, 4, 5).unwrap());
}

#[test]
fn svg_coordinates_are_finite() {
    let svg = render_total_svg(3, 4, 5).unwrap();
    assert!(!svg.contains("NaN") && !svg.contains("inf"));
}

#[test]
fn summaries_pass_on_random_instances() {
    for seed in 0..20 {
        let s = mn_summary(seed, 4, 5).unwrap();
        assert!(s.ends_with("result: pass\n"), "seed {seed}:\n{s}");
        let t = transport_summary(seed, 4, 5, "relabel-opposite").unwrap();
        assert!(t.contains("transfer: ok\n") && t.ends_with("pipeline on D: pass\n"), "seed {seed}:\n{t}");
    }
}

#[test]
fn powerset_mode_reports_the_vacuous_antecedent() {
    let t = transport_summary(0, 4, 5, "powerset-duality-demo").unwrap();
    assert!(t.contains("fixed by induced comonad T: P{1}\n"), "{t}");
    assert!(t.contains("fixed by induced monad S: P{1,2} P{1}\n"), "{t}");
    assert!(t.contains("note: M eta"), "{t}");
    assert!(t.ends_with("pipeline on D: stops at mn_hypotheses\n"), "{t}");
}

#[test]
fn bad_arguments_are_errors() {
    assert!(render_total_svg(0, 0, 5).is_err());
    assert!(mn_summary(0, 4, 0).is_err());
    assert!(transport_summary(0, 4, 5, "sideways").unwrap_err().contains("sideways"));
}
