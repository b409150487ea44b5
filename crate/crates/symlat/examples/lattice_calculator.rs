//! Lattice arithmetic on coloured graphs: the partial order, meets and
//! joins, and a triple showing the lattice is not distributive.
//!
//! ```bash
//! cargo run --example lattice_calculator
//! ```

use symlat::graph::{ColouredGraph, Label};

fn cg(vclasses: &[&[i64]], eclasses: &[&[(i64, i64)]]) -> ColouredGraph {
    ColouredGraph::new(
        (1..=4).map(Label::Int).collect(),
        vclasses
            .iter()
            .map(|b| b.iter().map(|&v| Label::Int(v)).collect())
            .collect(),
        eclasses
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&(a, x)| (Label::Int(a), Label::Int(x)))
                    .collect()
            })
            .collect(),
    )
    .unwrap()
}

fn show(name: &str, g: &ColouredGraph) {
    println!("{name}: {}", serde_json::to_string(&g.to_json_value()).unwrap());
}

fn main() {
    // Two colourings of a four-cycle, one with an extra chord.
    let a = cg(
        &[&[1, 3], &[2, 4]],
        &[&[(1, 2), (3, 4)], &[(1, 4), (2, 3)]],
    );
    let b = cg(
        &[&[1, 3], &[2], &[4]],
        &[&[(1, 2), (2, 3)], &[(1, 4), (3, 4)], &[(1, 3)]],
    );
    show("a", &a);
    show("b", &b);
    println!("a <= b: {}, b <= a: {}", a.leq(&b).unwrap(), b.leq(&a).unwrap());
    show("a meet b", &a.meet(&b).unwrap());
    show("a join b", &a.join(&b).unwrap());

    // The order has a top (every vertex and edge its own class) and a
    // bottom (no edges, all vertices exchangeable).
    let labels: Vec<Label> = (1..=4).map(Label::Int).collect();
    let unit = ColouredGraph::unit(labels.clone()).unwrap();
    let zero = ColouredGraph::zero(labels).unwrap();
    println!(
        "zero <= a <= unit: {}",
        zero.leq(&a).unwrap() && a.leq(&unit).unwrap()
    );

    // Distributivity fails: g join (h meet k) need not equal
    // (g join h) meet (g join k).
    let g = cg(&[&[1, 2, 4], &[3]], &[&[(1, 2), (1, 4), (2, 4)]]);
    let h = cg(&[&[2, 3, 4], &[1]], &[&[(2, 3), (2, 4), (3, 4)]]);
    let k = cg(
        &[&[1, 3], &[2, 4]],
        &[&[(1, 2), (1, 4), (2, 3), (3, 4)]],
    );
    let lhs = g.join(&h.meet(&k).unwrap()).unwrap();
    let rhs = g.join(&h).unwrap().meet(&g.join(&k).unwrap()).unwrap();
    show("g join (h meet k)", &lhs);
    show("(g join h) meet (g join k)", &rhs);
    println!("distributive here: {}", lhs == rhs);
}
