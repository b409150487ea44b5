//! Counting the model space: set partitions, Bell numbers and the number
//! of coloured graphs per vertex count.
//!
//! ```bash
//! cargo run --example counting
//! ```

use symlat::graph::{enumerate_coloured_graphs, Label};
use symlat::partition::{bell, model_count, SetPartition};

fn main() {
    println!("partitions of small ground sets (Bell numbers):");
    for d in 0..=8 {
        println!("  bell({d}) = {}", bell(d));
    }

    println!("\ncoloured graphs on n vertices:");
    for n in 1..=7 {
        println!("  n = {n}: {}", model_count(n));
    }

    // The count is a sum over edge sets; enumerating confirms it for n = 4.
    let labels: Vec<Label> = (1..=4).map(Label::Int).collect();
    let enumerated = enumerate_coloured_graphs(&labels, false)
        .unwrap()
        .count();
    println!("\nenumeration over 4 vertices visits {enumerated} colourings");

    // Partitions themselves are first-class values with a lattice order.
    let ground: Vec<i64> = (1..=4).collect();
    let fine = SetPartition::atoms(ground.clone());
    let pairs = SetPartition::new(ground.clone(), vec![vec![1, 3], vec![2, 4]]).unwrap();
    println!(
        "\n{{1}}{{2}}{{3}}{{4}} refines {{1,3}}{{2,4}}: {}",
        fine.is_finer(&pairs).unwrap()
    );
    println!(
        "their join has {} blocks, their meet {}",
        fine.join(&pairs).unwrap().num_blocks(),
        fine.meet(&pairs).unwrap().num_blocks()
    );
}
