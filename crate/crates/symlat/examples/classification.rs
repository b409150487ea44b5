//! The four colouring classes: edge regular (B), vertex regular (P),
//! regular (R) and permutation generated (Pi), with the census of all
//! colourings on four vertices.
//!
//! ```bash
//! cargo run --example classification
//! ```

use symlat::classes::{classification_counts, classify};
use symlat::graph::{ColouredGraph, Label};
use symlat::search::enumerate_pi_lattice;

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

fn report(name: &str, g: &ColouredGraph) {
    let c = classify(g).unwrap();
    println!(
        "{name}: B={} P={} R={} Pi={}",
        c.edge_regular, c.vertex_regular, c.regular, c.permutation_generated
    );
}

fn main() {
    // A symmetric four-cycle: generated by the permutation (13)(24).
    let cycle = cg(
        &[&[1, 3], &[2, 4]],
        &[&[(1, 2), (3, 4)], &[(1, 4), (2, 3)]],
    );
    report("cycle with opposite pairs", &cycle);

    // Edge regular but not vertex regular: the edge class skips over the
    // vertex pairing.
    let edge_only = cg(
        &[&[1, 2], &[3, 4]],
        &[&[(1, 3), (1, 4)]],
    );
    report("edge-regular colouring", &edge_only);

    // Vertex regular but not edge regular: one class for all six edges,
    // with an asymmetric vertex pairing.
    let vertex_only = cg(
        &[&[1, 2], &[3], &[4]],
        &[&[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]],
    );
    report("vertex-regular colouring", &vertex_only);

    // In none of the classes.
    let skew = cg(
        &[&[1, 2], &[3], &[4]],
        &[&[(1, 3), (2, 4)], &[(3, 4)]],
    );
    report("unclassifiable colouring", &skew);

    // The census over all colourings of four vertices.
    let labels: Vec<Label> = (1..=4).map(Label::Int).collect();
    let counts = classification_counts(&labels, false).unwrap();
    println!(
        "\ncensus on 4 vertices: total={} B={} P={} R={} Pi={}",
        counts.total, counts.edge_regular, counts.vertex_regular, counts.regular,
        counts.permutation_generated
    );

    // On four vertices the regular and permutation-generated classes agree;
    // the whole lattice can be listed.
    let lattice = enumerate_pi_lattice(&labels).unwrap();
    let complete = lattice
        .iter()
        .filter(|g| g.edges().len() == 6)
        .count();
    println!(
        "permutation-generated lattice: {} members, {} on the complete graph",
        lattice.len(),
        complete
    );
}
