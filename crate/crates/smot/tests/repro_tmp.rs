use smot::experiment::build_game24_machine;
use smot::game24::{self, Game24State};
use smot::sm::{Solvability, StateKey};

#[test]
fn inspect_chain() {
    let corpus = game24::vendored_problems();
    let sm = build_game24_machine(&corpus[..900]);
    let k = StateKey::new("3/4 1 6");
    println!("verdict({k}) = {:?}", sm.query_solvability(&k));
    println!("conducive transitions of {k}:");
    for sol in sm.query_conducive(&k) {
        println!("  {} -> {}   (target verdict {:?})", sol.label, sol.target, sm.query_solvability(&sol.target));
    }
    println!("all transitions of {k}:");
    for (sol, p) in sm.transitions(&k) {
        println!("  [{p:?}] {} -> {}", sol.label, sol.target);
    }
    for key in ["1/4 6", "24", "23/4 6", "27/4"] {
        let k = StateKey::new(key);
        let truth = Game24State::parse_key(&k).map(|s| s.brute_force_solvable());
        println!("verdict({key}) = {:?} oracle={:?}", sm.query_solvability(&k), truth);
    }
}
