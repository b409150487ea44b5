//! Each colouring class supports a supremum operator: the least refinement
//! of a colouring inside the class. The classes are closed under meets, so
//! the operator is well defined and idempotent.
//!
//! ```bash
//! cargo run --example suprema
//! ```

use symlat::classes::{in_class, sup, ModelClass};
use symlat::graph::{enumerate_coloured_graphs, ColouredGraph, Label};

fn main() {
    // A colouring that is in none of the four classes.
    let g = ColouredGraph::new(
        (1..=4).map(Label::Int).collect(),
        vec![
            vec![Label::Int(1), Label::Int(2)],
            vec![Label::Int(3)],
            vec![Label::Int(4)],
        ],
        vec![
            vec![
                (Label::Int(1), Label::Int(3)),
                (Label::Int(2), Label::Int(4)),
                (Label::Int(3), Label::Int(4)),
            ],
            vec![(Label::Int(1), Label::Int(2))],
        ],
    )
    .unwrap();
    println!("g: {}", serde_json::to_string(&g.to_json_value()).unwrap());

    for class in [ModelClass::B, ModelClass::P, ModelClass::R, ModelClass::Pi] {
        let s = sup(class, &g).unwrap();
        println!(
            "\nsup over {class}: {}",
            serde_json::to_string(&s.to_json_value()).unwrap()
        );
        println!(
            "  g in {class}: {}, sup in {class}: {}, g <= sup: {}, idempotent: {}",
            in_class(class, &g).unwrap(),
            in_class(class, &s).unwrap(),
            g.leq(&s).unwrap(),
            sup(class, &s).unwrap() == s
        );
    }

    // Minimality, checked against a full scan: no class member above g
    // sits strictly below the supremum.
    let labels: Vec<Label> = (1..=4).map(Label::Int).collect();
    let class = ModelClass::Pi;
    let s = sup(class, &g).unwrap();
    let smaller = enumerate_coloured_graphs(&labels, false)
        .unwrap()
        .filter(|h| in_class(class, h).unwrap() && g.leq(h).unwrap() && !s.leq(h).unwrap())
        .count();
    println!("\nclass members above g but not above sup over {class}: {smaller}");
}
