use std::collections::BTreeSet;

use proptest::prelude::*;

use plansym::abstraction::{pool, quotient};
use plansym::benchmarks;
use plansym::canonical::{canonical_form, canonical_labeling, refine, OrderedPartition};
use plansym::object_graph::{ColorLegend, Encoding};
use plansym::wl::{fwl2_histograms, wl1_histograms, Aggregation};
use plansym::{expand, load_task, ColoredGraph, State};

fn graph(max_n: usize, max_colors: u32) -> impl Strategy<Value = ColoredGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let colors = prop::collection::vec(0..max_colors, n);
        let edges = prop::collection::vec((0..n as u32, 0..n as u32), 0..=n * 2);
        (colors, edges).prop_map(|(c, e)| ColoredGraph::new(c, e))
    })
}

fn with_permutation(max_n: usize, max_colors: u32) -> impl Strategy<Value = (ColoredGraph, Vec<u32>)> {
    graph(max_n, max_colors).prop_flat_map(|g| {
        let ids: Vec<u32> = (0..g.num_vertices() as u32).collect();
        (Just(g), Just(ids).prop_shuffle())
    })
}

proptest! {
    #[test]
    fn canonical_form_ignores_vertex_names((g, perm) in with_permutation(14, 3)) {
        prop_assert_eq!(canonical_form(&g), canonical_form(&g.relabel(&perm)));
    }

    #[test]
    fn labeling_is_a_bijection_onto_the_form(g in graph(12, 3)) {
        let (lab, form, _) = canonical_labeling(&g);
        let mut seen = lab.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..g.num_vertices() as u32).collect::<Vec<_>>());
        // Relabeling by the canonical labeling is a fixed point.
        prop_assert_eq!(canonical_form(&g.relabel(&lab)), form);
    }

    #[test]
    fn refinement_is_equitable_and_finer(g in graph(16, 3)) {
        let p = refine(&g, &OrderedPartition::from_colors(g.colors()));
        for cell in p.cells() {
            let sig = |v: u32| {
                let mut s: Vec<u32> = g.neighbors(v).iter().map(|&u| p.cell_of(u)).collect();
                s.sort_unstable();
                s
            };
            prop_assert!(cell.iter().all(|&v| sig(v) == sig(cell[0]) && g.color(v) == g.color(cell[0])));
        }
    }

    #[test]
    fn histograms_are_isomorphism_invariant((g, perm) in with_permutation(10, 2)) {
        let h = g.relabel(&perm);
        for agg in Aggregation::ALL {
            let r = wl1_histograms(&[&g, &h], agg);
            prop_assert_eq!(&r.histograms[0], &r.histograms[1]);
            let r = fwl2_histograms(&[&g, &h], agg, 64).unwrap();
            prop_assert_eq!(&r.histograms[0], &r.histograms[1]);
        }
    }

    #[test]
    fn finer_refinements_never_merge_more(a in graph(8, 2), b in graph(8, 2)) {
        let eq = |r: plansym::wl::WlResult| r.histograms[0] == r.histograms[1];
        let wl1_m = eq(wl1_histograms(&[&a, &b], Aggregation::Multiset));
        let wl1_s = eq(wl1_histograms(&[&a, &b], Aggregation::Set));
        let fwl_m = eq(fwl2_histograms(&[&a, &b], Aggregation::Multiset, 64).unwrap());
        let fwl_s = eq(fwl2_histograms(&[&a, &b], Aggregation::Set, 64).unwrap());
        prop_assert!(!fwl_m || wl1_m);
        prop_assert!(!fwl_s || wl1_s);
        prop_assert!(!wl1_m || wl1_s);
        prop_assert!(!fwl_m || fwl_s);
        // Equal canonical forms imply equal histograms everywhere.
        if canonical_form(&a) == canonical_form(&b) {
            prop_assert!(wl1_s && wl1_m && fwl_m && fwl_s);
        }
    }

    #[test]
    fn state_dump_round_trips(bits in prop::collection::vec(any::<bool>(), 64)) {
        let t = load_task(benchmarks::GRIPPER_DOMAIN, &benchmarks::gripper_problem(3)).unwrap();
        let fluents = (0..t.num_atoms() as u32).filter(|&a| !t.is_constant_atom(a));
        let s = State::with_constant_atoms(&t, fluents.zip(bits.iter().cycle()).filter(|(_, &b)| b).map(|(a, _)| a));
        let text = s.atom_names(&t).join("\n");
        prop_assert_eq!(State::parse_text(&t, &text).unwrap(), s);
    }
}

#[test]
fn quotient_is_idempotent() {
    // Quotienting the representatives again gives the same class set.
    let t = load_task(benchmarks::BLOCKS_DOMAIN, benchmarks::BLOCKS_FOUR).unwrap();
    let ts = expand(&t, 10_000).unwrap();
    let am = quotient(&ts, &t).unwrap();
    let mut reduced = ts.clone();
    let reps: Vec<usize> = am.classes.iter().map(|c| c.representative.state).collect();
    reduced.states = reps.iter().map(|&i| ts.states[i].clone()).collect();
    reduced.goal_flags = reps.iter().map(|&i| ts.goal_flags[i]).collect();
    reduced.vstar = reps.iter().map(|&i| ts.vstar[i]).collect();
    reduced.succ = vec![Vec::new(); reps.len()];
    reduced.initial = 0;
    let again = quotient(&reduced, &t).unwrap();
    let forms = |a: &plansym::abstraction::Abstraction| a.classes.iter().map(|c| c.form.clone()).collect::<BTreeSet<_>>();
    assert_eq!(again.num_classes(), am.num_classes());
    assert_eq!(forms(&again), forms(&am));
}

#[test]
fn pooled_classes_never_exceed_states() {
    for b in benchmarks::all() {
        let tasks: Vec<_> = b.instances.iter().map(|i| load_task(b.domain, i).unwrap()).collect();
        let systems: Vec<_> = tasks.iter().map(|t| expand(t, 100_000).unwrap()).collect();
        let pairs: Vec<_> = tasks.iter().zip(&systems).collect();
        let am = pool(&pairs).unwrap();
        assert!(am.num_classes() <= am.num_states(), "{}", b.name);
        let per_instance: usize = (0..tasks.len()).map(|i| am.classes_in_instance(i)).sum();
        assert!(am.num_classes() <= per_instance, "{}", b.name);
    }
}

#[test]
fn goal_marking_only_splits_goal_colors() {
    let t = load_task(benchmarks::FERRY_DOMAIN, benchmarks::FERRY_SWAP).unwrap();
    let legend = ColorLegend::for_task(&t);
    let s = State::from_fluent_names(&t, benchmarks::FERRY_SWAP_PAIR[1]).unwrap();
    let plain = plansym::object_graph::build_object_graph(&s, &t, Encoding::Plain, &legend).graph;
    let marked = plansym::object_graph::build_object_graph(&s, &t, Encoding::GoalMarking, &legend).graph;
    assert_eq!(plain.num_vertices(), marked.num_vertices());
    assert_eq!(plain.edges().collect::<Vec<_>>(), marked.edges().collect::<Vec<_>>());
    let differ: Vec<usize> = (0..plain.num_vertices()).filter(|&v| plain.colors()[v] != marked.colors()[v]).collect();
    assert!(!differ.is_empty());
    for v in differ {
        let key = format!("{}", legend.key(plain.colors()[v]));
        assert!(key.contains("_g"), "{key}");
    }
}
