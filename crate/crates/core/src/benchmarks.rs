//! Small benchmark tasks bundled with the crate, plus pairs of states that
//! are known to be hard for color refinement.

pub const GRIPPER_DOMAIN: &str = include_str!("../benchmarks/gripper/domain.pddl");
pub const BLOCKS_DOMAIN: &str = include_str!("../benchmarks/blocks/domain.pddl");
pub const BLOCKS_FOUR: &str = include_str!("../benchmarks/blocks/four.pddl");
pub const BLOCKS_THREE: &str = include_str!("../benchmarks/blocks/three.pddl");
pub const FERRY_DOMAIN: &str = include_str!("../benchmarks/ferry/domain.pddl");
pub const FERRY_SWAP: &str = include_str!("../benchmarks/ferry/swap.pddl");
pub const FERRY_THREE_CARS: &str = include_str!("../benchmarks/ferry/three-cars.pddl");
pub const LOGISTICS_DOMAIN: &str = include_str!("../benchmarks/logistics/domain.pddl");
pub const LOGISTICS_TWO_CITIES: &str = include_str!("../benchmarks/logistics/two-cities.pddl");
pub const GRID_DOMAIN: &str = include_str!("../benchmarks/grid/domain.pddl");
pub const GRID_KEY_SWAP: &str = include_str!("../benchmarks/grid/key-swap.pddl");

/// Gripper with `n` balls in `rooma`, all to be moved to `roomb`.
pub fn gripper_problem(n: usize) -> String {
    let balls: Vec<String> = (1..=n).map(|i| format!("ball{i}")).collect();
    let at: Vec<String> = balls.iter().map(|b| format!("(at {b} rooma)")).collect();
    let goal: Vec<String> = balls.iter().map(|b| format!("(at {b} roomb)")).collect();
    format!(
        "(define (problem gripper-{n})\n  (:domain gripper)\n  (:objects rooma roomb - room left right - gripper {} - ball)\n  (:init (at-robot rooma) (free left) (free right) {})\n  (:goal (and {})))\n",
        balls.join(" "),
        at.join(" "),
        goal.join(" ")
    )
}

/// Reachable states of [`gripper_problem`]: two robot positions times the
/// ball placements with at most one ball per gripper.
pub fn gripper_reachable_states(n: usize) -> u64 {
    let n = n as u64;
    let p = |k: u64| if k > n { 0 } else { 1u64 << (n - k) };
    let none_held = p(0);
    let one_held = 2 * n * p(1);
    let two_held = if n >= 2 { n * (n - 1) * p(2) } else { 0 };
    2 * (none_held + one_held + two_held)
}

/// Fluent atoms of the goal state and of the crossed state (the initial
/// state) of [`BLOCKS_FOUR`].
pub const BLOCKS_FIGURE_PAIR: [&[&str]; 2] = [
    &["on(b2,b3)", "on(b1,b4)", "on-table(b3)", "on-table(b4)", "clear(b1)", "clear(b2)"],
    &["on(b1,b3)", "on(b2,b4)", "on-table(b3)", "on-table(b4)", "clear(b1)", "clear(b2)"],
];

/// Both cars delivered, and both at each other's destination.
pub const FERRY_SWAP_PAIR: [&[&str]; 2] = [
    &["at-ferry(l3)", "empty-ferry", "at(c1,l1)", "at(c2,l2)"],
    &["at-ferry(l3)", "empty-ferry", "at(c1,l2)", "at(c2,l1)"],
];

/// Each package in its home truck, and in the other city's truck.
pub const LOGISTICS_PAIR: [&[&str]; 2] = [
    &["at(t1,l1)", "at(t2,l2)", "at(a1,l1)", "at(a2,l2)", "in(p1,t1)", "in(p2,t2)"],
    &["at(t1,l1)", "at(t2,l2)", "at(a1,l1)", "at(a2,l2)", "in(p1,t2)", "in(p2,t1)"],
];

const GRID_OPEN: [&str; 7] = [
    "open(p10)", "open(p20)", "open(p01)", "open(p11)", "open(p21)", "open(p02)", "open(p12)",
];

/// Each key next to its target cell, and next to the other key's target.
pub fn grid_pair() -> [Vec<&'static str>; 2] {
    let mk = |k1: &'static str, k2: &'static str| {
        let mut v = vec!["at-robot(p11)", "arm-empty", k1, k2];
        v.extend(GRID_OPEN);
        v
    };
    [mk("at(k1,p21)", "at(k2,p01)"), mk("at(k1,p01)", "at(k2,p21)")]
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: &'static str,
    pub domain: &'static str,
    pub instances: Vec<String>,
}

/// Every bundled domain with its instances.
pub fn all() -> Vec<Benchmark> {
    vec![
        Benchmark {
            name: "gripper",
            domain: GRIPPER_DOMAIN,
            instances: (1..=5).map(gripper_problem).collect(),
        },
        Benchmark {
            name: "blocks3ops",
            domain: BLOCKS_DOMAIN,
            instances: vec![BLOCKS_THREE.to_string(), BLOCKS_FOUR.to_string()],
        },
        Benchmark {
            name: "ferry",
            domain: FERRY_DOMAIN,
            instances: vec![FERRY_SWAP.to_string(), FERRY_THREE_CARS.to_string()],
        },
        Benchmark {
            name: "logistics",
            domain: LOGISTICS_DOMAIN,
            instances: vec![LOGISTICS_TWO_CITIES.to_string()],
        },
        Benchmark {
            name: "grid",
            domain: GRID_DOMAIN,
            instances: vec![GRID_KEY_SWAP.to_string()],
        },
    ]
}
