use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reserve_match::flow::{choice_flow, crucial_vector};
use reserve_match::gen::{random_small_instance, SmallLimits};
use reserve_match::graph::{choice_graph, GraphContext};
use reserve_match::oracle::{enumerate_maximal_diversity_matchings, oracle_choice_from};
use reserve_match::oracle::OracleBudget;
use reserve_match::verify::verify_all;

#[test]
fn backends_match_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..300 {
        let inst = random_small_instance(&mut rng, &SmallLimits::default());
        let md = enumerate_maximal_diversity_matchings(&inst).unwrap();
        let want = oracle_choice_from(&inst, &md);
        let crucial = crucial_vector(&inst).unwrap();
        assert_eq!(crucial.alpha, md.max_min_ratio(&inst), "alpha on case {i}: {inst:?}");
        let flow = choice_flow(&inst, &crucial).unwrap();
        assert_eq!(flow.selected, want, "flow on case {i}");
        let ctx = GraphContext::new(&inst).unwrap();
        let (gc, seed) = ctx.crucial_vector().unwrap();
        assert_eq!(gc, crucial);
        let graph = choice_graph(&inst, &gc, &seed).unwrap();
        assert_eq!(graph.selected, want, "graph on case {i}");
        assert!(verify_all(&inst, &want, &OracleBudget::default()).unwrap().all_pass());
    }
}

#[test]
fn backends_agree_beyond_oracle_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let limits = SmallLimits { max_students: 40, max_types: 4, max_rank: 4, max_capacity: 25, max_seats: 60 };
    for i in 0..400 {
        let inst = random_small_instance(&mut rng, &limits);
        let flow = reserve_match::solve(&inst, reserve_match::Backend::Flow).unwrap();
        let graph = reserve_match::solve(&inst, reserve_match::Backend::Graph).unwrap();
        assert_eq!(flow.selected, graph.selected, "case {i}");
        assert_eq!(flow.alpha, graph.alpha, "case {i}");
    }
}
