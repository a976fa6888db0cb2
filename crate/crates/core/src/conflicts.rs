//! Pairs of non-isomorphic classes that color refinement fails to separate.
//!
//! An E-conflict is a pair of distinct classes with equal stable
//! histograms; a V-conflict is an E-conflict whose classes have different
//! optimal costs (an infinite and a finite cost differ; two infinite costs
//! do not).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::abstraction::{pool, Abstraction, StateRef};
use crate::object_graph::{build_object_graph, ColorLegend, Encoding};
use crate::pddl::GroundTask;
use crate::state_space::{expand, format_vstar, TransitionSystem};
use crate::wl::{histograms, Aggregation, Algorithm, ColorHistogram, RunOptions, DEFAULT_FWL2_MAX_VERTICES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AnalysisConfig {
    pub algorithm: Algorithm,
    pub encoding: Encoding,
    pub aggregation: Aggregation,
}

impl AnalysisConfig {
    /// Table order: multiset columns first, then set columns; within each,
    /// 1-WL, 2-FWL, then both again with goal marking.
    pub fn all() -> Vec<AnalysisConfig> {
        let mut out = Vec::new();
        for aggregation in Aggregation::ALL {
            for encoding in Encoding::ALL {
                for algorithm in [Algorithm::Wl1, Algorithm::Fwl2] {
                    out.push(AnalysisConfig { algorithm, encoding, aggregation });
                }
            }
        }
        out
    }

    /// `1-WL`, `2-FWL + G`, ...
    pub fn label(&self) -> String {
        match self.encoding {
            Encoding::Plain => self.algorithm.label().to_string(),
            Encoding::GoalMarking => format!("{} + G", self.algorithm.label()),
        }
    }

    /// `multiset/1-WL`, column prefix in CSV output.
    pub fn column(&self) -> String {
        let agg = match self.aggregation {
            Aggregation::Multiset => "multiset",
            Aggregation::Set => "set",
        };
        format!("{agg}/{}", self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConflictOptions {
    pub max_witnesses: usize,
    pub fwl2_max_vertices: usize,
}

impl Default for ConflictOptions {
    fn default() -> Self {
        ConflictOptions {
            max_witnesses: 10,
            fwl2_max_vertices: DEFAULT_FWL2_MAX_VERTICES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub class_a: u32,
    pub class_b: u32,
    pub rep_a: StateRef,
    pub rep_b: StateRef,
    pub vstar_a: String,
    pub vstar_b: String,
    pub v_conflict: bool,
    /// Digest of the shared histogram.
    pub histogram: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedClass {
    pub class: u32,
    pub vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConflictReport {
    pub config: AnalysisConfig,
    pub label: String,
    /// Histograms shared by two or more classes.
    pub buckets: usize,
    pub e_pairs: u64,
    pub v_pairs: u64,
    /// Lowest class-id pairs first.
    pub witnesses: Vec<Witness>,
    /// Classes left out because their graphs exceed the 2-FWL cap.
    pub skipped: Vec<SkippedClass>,
    /// Non-singleton groups of classes with equal histograms, each sorted.
    #[serde(skip)]
    pub groups: Vec<Vec<u32>>,
}

impl ConflictReport {
    /// True if `a` and `b` share a histogram.
    pub fn confused(&self, a: u32, b: u32) -> bool {
        a != b && self.groups.iter().any(|g| g.contains(&a) && g.contains(&b))
    }
}

/// Groups the representatives of `am` by their stable histogram under
/// `config` and counts conflicting pairs.
///
/// Classes are first bucketed by vertex count and initial color counts,
/// which no refinement can merge; singleton buckets are never refined.
pub fn find_conflicts(
    am: &Abstraction,
    tasks: &[&GroundTask],
    systems: &[&TransitionSystem],
    config: AnalysisConfig,
    opts: &ConflictOptions,
) -> ConflictReport {
    let mut report = ConflictReport {
        config,
        label: config.label(),
        buckets: 0,
        e_pairs: 0,
        v_pairs: 0,
        witnesses: Vec::new(),
        skipped: Vec::new(),
        groups: Vec::new(),
    };
    let Some(first) = tasks.first() else {
        return report;
    };
    let legend = ColorLegend::for_task(first);
    let graphs: Vec<_> = am
        .classes
        .par_iter()
        .map(|c| {
            let r = c.representative;
            build_object_graph(&systems[r.instance].states[r.state], tasks[r.instance], config.encoding, &legend).graph
        })
        .collect();

    // Keyed by vertex count and initial color counts.
    let mut buckets: BTreeMap<_, Vec<u32>> = BTreeMap::new();
    for (id, g) in graphs.iter().enumerate() {
        if config.algorithm == Algorithm::Fwl2 && g.num_vertices() > opts.fwl2_max_vertices {
            report.skipped.push(SkippedClass {
                class: id as u32,
                vertices: g.num_vertices(),
            });
            continue;
        }
        buckets.entry((g.num_vertices(), g.color_counts())).or_default().push(id as u32);
    }
    let buckets: Vec<Vec<u32>> = buckets.into_values().filter(|b| b.len() > 1).collect();

    let run_opts = RunOptions { stop_when_separated: true };
    let mut groups: Vec<(Vec<u32>, ColorHistogram)> = buckets
        .par_iter()
        .flat_map_iter(|members| {
            let gs: Vec<_> = members.iter().map(|&c| &graphs[c as usize]).collect();
            let result = histograms(config.algorithm, &gs, config.aggregation, usize::MAX, run_opts)
                .expect("cap checked before bucketing");
            let mut by_hist: HashMap<ColorHistogram, Vec<u32>> = HashMap::new();
            for (h, &c) in result.histograms.into_iter().zip(members) {
                by_hist.entry(h).or_default().push(c);
            }
            by_hist
                .into_iter()
                .filter(|(_, g)| g.len() > 1)
                .map(|(h, g)| (g, h))
                .collect::<Vec<_>>()
        })
        .collect();
    for (g, _) in &mut groups {
        g.sort_unstable();
    }
    groups.sort();

    let mut pairs: Vec<(u32, u32, &ColorHistogram)> = Vec::new();
    for (g, h) in &groups {
        report.buckets += 1;
        for (i, &a) in g.iter().enumerate() {
            for &b in &g[i + 1..] {
                report.e_pairs += 1;
                let v = am.classes[a as usize].vstar != am.classes[b as usize].vstar;
                if v {
                    report.v_pairs += 1;
                }
                pairs.push((a, b, h));
            }
        }
    }
    pairs.sort_by_key(|&(a, b, _)| (a, b));
    report.witnesses = pairs
        .into_iter()
        .take(opts.max_witnesses)
        .map(|(a, b, h)| {
            let (ca, cb) = (&am.classes[a as usize], &am.classes[b as usize]);
            Witness {
                class_a: a,
                class_b: b,
                rep_a: ca.representative,
                rep_b: cb.representative,
                vstar_a: format_vstar(ca.vstar),
                vstar_b: format_vstar(cb.vstar),
                v_conflict: ca.vstar != cb.vstar,
                histogram: h.digest_hex(),
            }
        })
        .collect();
    report.groups = groups.into_iter().map(|(g, _)| g).collect();
    report
}

/// One row of the conflict table.
#[derive(Debug, Clone, Serialize)]
pub struct DomainReport {
    pub domain: String,
    pub instances: usize,
    pub states: usize,
    pub classes: usize,
    /// Instances left out, with the reason.
    pub notices: Vec<String>,
    pub reports: Vec<ConflictReport>,
}

impl DomainReport {
    pub fn csv_header(configs: &[AnalysisConfig]) -> String {
        let mut h = String::from("domain,instances,states,classes");
        for c in configs {
            let col = c.column();
            let _ = write!(h, ",{col}/E,{col}/V");
        }
        h
    }

    pub fn csv_row(&self) -> String {
        let mut row = format!("{},{},{},{}", self.domain, self.instances, self.states, self.classes);
        for r in &self.reports {
            let _ = write!(row, ",{},{}", r.e_pairs, r.v_pairs);
        }
        row
    }

    pub fn report(&self, config: AnalysisConfig) -> Option<&ConflictReport> {
        self.reports.iter().find(|r| r.config == config)
    }
}

/// Expands every task, pools the reachable states and runs each
/// configuration. Instances whose expansion exceeds `state_cap` are left
/// out with a notice.
pub fn analyze_domain(
    domain: &str,
    tasks: &[GroundTask],
    configs: &[AnalysisConfig],
    state_cap: usize,
    opts: &ConflictOptions,
) -> Result<DomainReport, crate::Error> {
    let mut notices = Vec::new();
    let mut kept: Vec<&GroundTask> = Vec::new();
    let mut systems = Vec::new();
    for task in tasks {
        match expand(task, state_cap) {
            Ok(ts) => {
                kept.push(task);
                systems.push(ts);
            }
            Err(e) => notices.push(format!("{}: {e}", task.instance_name)),
        }
    }
    let systems: Vec<&TransitionSystem> = systems.iter().collect();
    let pairs: Vec<_> = kept.iter().copied().zip(systems.iter().copied()).collect();
    let am = pool(&pairs)?;
    let reports = configs
        .iter()
        .map(|&c| find_conflicts(&am, &kept, &systems, c, opts))
        .collect();
    Ok(DomainReport {
        domain: domain.to_string(),
        instances: kept.len(),
        states: am.num_states(),
        classes: am.num_classes(),
        notices,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::quotient;
    use crate::benchmarks;
    use crate::pddl::load_task;

    fn wl1(encoding: Encoding) -> AnalysisConfig {
        AnalysisConfig {
            algorithm: Algorithm::Wl1,
            encoding,
            aggregation: Aggregation::Multiset,
        }
    }

    #[test]
    fn table_order_and_labels() {
        let labels: Vec<String> = AnalysisConfig::all().iter().map(|c| c.column()).collect();
        assert_eq!(
            labels,
            [
                "multiset/1-WL",
                "multiset/2-FWL",
                "multiset/1-WL + G",
                "multiset/2-FWL + G",
                "set/1-WL",
                "set/2-FWL",
                "set/1-WL + G",
                "set/2-FWL + G"
            ]
        );
    }

    #[test]
    fn gripper_has_no_conflicts() {
        let t = load_task(benchmarks::GRIPPER_DOMAIN, &benchmarks::gripper_problem(2)).unwrap();
        let ts = expand(&t, 1000).unwrap();
        let am = quotient(&ts, &t).unwrap();
        for c in AnalysisConfig::all() {
            let r = find_conflicts(&am, &[&t], &[&ts], c, &ConflictOptions::default());
            assert_eq!((r.e_pairs, r.v_pairs), (0, 0), "{}", c.column());
        }
    }

    #[test]
    fn blocks_pair_is_a_plain_v_conflict_resolved_by_goal_marking() {
        let t = load_task(benchmarks::BLOCKS_DOMAIN, benchmarks::BLOCKS_FOUR).unwrap();
        let ts = expand(&t, 10_000).unwrap();
        let am = quotient(&ts, &t).unwrap();
        let ids = benchmarks::BLOCKS_FIGURE_PAIR.map(|atoms| {
            let s = crate::state_space::State::from_fluent_names(&t, atoms).unwrap();
            am.class_of[0][ts.state_index(&s).unwrap()]
        });
        let opts = ConflictOptions::default();
        let plain = find_conflicts(&am, &[&t], &[&ts], wl1(Encoding::Plain), &opts);
        assert!(plain.confused(ids[0], ids[1]));
        assert!(plain.v_pairs >= 1);
        let marked = find_conflicts(&am, &[&t], &[&ts], wl1(Encoding::GoalMarking), &opts);
        assert!(!marked.confused(ids[0], ids[1]));
    }

    #[test]
    fn witnesses_are_capped_and_sorted() {
        let t = load_task(benchmarks::BLOCKS_DOMAIN, benchmarks::BLOCKS_FOUR).unwrap();
        let ts = expand(&t, 10_000).unwrap();
        let am = quotient(&ts, &t).unwrap();
        let opts = ConflictOptions {
            max_witnesses: 2,
            ..ConflictOptions::default()
        };
        let r = find_conflicts(&am, &[&t], &[&ts], wl1(Encoding::Plain), &opts);
        assert!(r.witnesses.len() <= 2);
        let keys: Vec<(u32, u32)> = r.witnesses.iter().map(|w| (w.class_a, w.class_b)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(keys.iter().all(|(a, b)| a < b));
    }

    #[test]
    fn fwl2_cap_skips_large_classes() {
        let t = load_task(benchmarks::GRIPPER_DOMAIN, &benchmarks::gripper_problem(1)).unwrap();
        let ts = expand(&t, 100).unwrap();
        let am = quotient(&ts, &t).unwrap();
        let opts = ConflictOptions {
            max_witnesses: 0,
            fwl2_max_vertices: 3,
        };
        let c = AnalysisConfig {
            algorithm: Algorithm::Fwl2,
            ..wl1(Encoding::Plain)
        };
        let r = find_conflicts(&am, &[&t], &[&ts], c, &opts);
        assert_eq!(r.skipped.len(), am.num_classes());
    }

    #[test]
    fn empty_domain_row() {
        let r = analyze_domain("none", &[], &AnalysisConfig::all(), 10, &ConflictOptions::default()).unwrap();
        assert_eq!(r.csv_row(), "none,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0");
        assert_eq!(DomainReport::csv_header(&[wl1(Encoding::Plain)]), "domain,instances,states,classes,multiset/1-WL/E,multiset/1-WL/V");
    }

    #[test]
    fn over_cap_instances_are_noted() {
        let tasks: Vec<GroundTask> = [1, 3]
            .iter()
            .map(|&n| load_task(benchmarks::GRIPPER_DOMAIN, &benchmarks::gripper_problem(n)).unwrap())
            .collect();
        let r = analyze_domain("gripper", &tasks, &[wl1(Encoding::Plain)], 20, &ConflictOptions::default()).unwrap();
        assert_eq!(r.instances, 1);
        assert_eq!(r.states, 8);
        assert_eq!(r.notices.len(), 1);
    }
}
