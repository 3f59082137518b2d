use graphflow_core::graph::{generate, io, DirichletSubgraph, Exhaustion, NodeId};
use graphflow_core::sampling::{instance_rng, uniform_function, GraphSampler};
use graphflow_core::stationary::{solve_resolvent, ResolventProblem, SolveOptions};
use graphflow_core::{Nonlinearity, WeightedGraph};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let g = GraphSampler::up_to(15).sample(&mut instance_rng(seed, 0));
        let text = io::to_json_string(&g).unwrap();
        prop_assert_eq!(io::from_json_str(&text).unwrap(), g);
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    let g = GraphSampler::up_to(9).sample(&mut instance_rng(11, 0));
    io::save(&g, &file).unwrap();
    let back = io::load(&file).unwrap();
    assert_eq!(back.as_finite(), Some(&g));
}

#[test]
fn generator_examples() {
    let p = generate("path:3").unwrap();
    let f = p.as_finite().unwrap();
    assert_eq!((f.len(), f.edge_count()), (3, 2));

    let z = generate("lattice:Z^1").unwrap();
    let ball = Exhaustion::new(&z, &NodeId::new(vec![0]), 2).unwrap();
    let mut nodes: Vec<i64> = ball.set(2).unwrap().iter().map(|x| x.coords()[0]).collect();
    nodes.sort();
    assert_eq!(nodes, vec![-2, -1, 0, 1, 2]);

    let t = generate("tree:3").unwrap();
    let ball = Exhaustion::new(&t, &NodeId::default(), 1).unwrap();
    assert_eq!(ball.set(1).unwrap().len(), 4);

    assert!(generate("torus:4").is_err());
    assert!(generate("path:x").is_err());
}

#[test]
fn solve_reports_serialize_identically() {
    let run = || {
        let g: WeightedGraph = GraphSampler::up_to(12).sample(&mut instance_rng(5, 1)).into();
        let sub = DirichletSubgraph::whole(&g).unwrap();
        let data = uniform_function(&mut instance_rng(5, 2), sub.window(), -1.0, 1.0);
        let nl = Nonlinearity::power_absorption(2.0).unwrap();
        let prob = ResolventProblem::new(&sub, &nl, 0.7, &data).unwrap();
        serde_json::to_string(&solve_resolvent(&prob, &SolveOptions::default()).unwrap()).unwrap()
    };
    assert_eq!(run(), run());
}
