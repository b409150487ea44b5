//! Dual model sets: the models a stepwise search must test next, given
//! what it has accepted or rejected so far. The rejection dual of a set
//! holds the maximal models below none of its members; the acceptance dual
//! holds the minimal class members above none of them.
//!
//! ```bash
//! cargo run --example dual_sets
//! ```

use symlat::classes::ModelClass;
use symlat::graph::{ColouredGraph, Label};
use symlat::search::{dual_set, Direction, ModelSet, Reduction};

fn main() {
    let labels: Vec<Label> = (1..=4).map(Label::Int).collect();

    // Start from the saturated model, as a search does.
    let unit = ColouredGraph::unit(labels.clone()).unwrap();
    let singleton = ModelSet::from_models(Reduction::Minimal, [unit.clone()]).unwrap();

    let reject = dual_set(ModelClass::B, &singleton, Direction::Reject).unwrap();
    println!(
        "rejection dual of the saturated model over B: {} members",
        reject.len()
    );
    for m in reject.members().iter().take(3) {
        println!("  {}", serde_json::to_string(&m.to_json_value()).unwrap());
    }
    println!("  ...");

    // Acceptance duals grow from the bottom instead.
    let zero = ColouredGraph::zero(labels.clone()).unwrap();
    let bottom = ModelSet::from_models(Reduction::Maximal, [zero]).unwrap();
    let accept = dual_set(ModelClass::B, &bottom, Direction::Accept).unwrap();
    println!(
        "\nacceptance dual of the empty model over B: {} members",
        accept.len()
    );

    // Duals of a two-element set combine the singleton duals.
    let chain = ColouredGraph::new(
        labels.clone(),
        labels.iter().map(|l| vec![l.clone()]).collect(),
        vec![
            vec![(Label::Int(1), Label::Int(2))],
            vec![(Label::Int(2), Label::Int(3))],
            vec![(Label::Int(3), Label::Int(4))],
        ],
    )
    .unwrap();
    let pair = ModelSet::from_models(Reduction::Minimal, [unit, chain]).unwrap();
    let reject_pair = dual_set(ModelClass::B, &pair, Direction::Reject).unwrap();
    println!(
        "\nrejection dual of a two-model set over B: {} members",
        reject_pair.len()
    );

    // Over the permutation-generated class the duals come from a scan of
    // the full lattice on four vertices.
    let sat = ModelSet::from_models(
        Reduction::Minimal,
        [ColouredGraph::unit(labels).unwrap()],
    )
    .unwrap();
    let reject_pi = dual_set(ModelClass::Pi, &sat, Direction::Reject).unwrap();
    println!(
        "\nrejection dual of the saturated model over Pi: {} members",
        reject_pi.len()
    );
}
