//! Maximum-likelihood fitting of a concentration model whose parameters
//! are tied by a graph colouring, with the comparison statistics used for
//! model selection.
//!
//! ```bash
//! cargo run --example model_fit
//! ```

use std::path::Path;

use symlat::gaussian::{fit_rcon, Divisor, GaussianData};
use symlat::graph::{ColouredGraph, Label};

fn t(s: &str) -> Label {
    Label::Text(s.into())
}

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/frets.csv");
    let data = GaussianData::from_data_csv(
        std::fs::File::open(&path).expect("bundled fixture"),
        Divisor::NMinus1,
    )
    .unwrap();
    println!(
        "data: {} observations of {:?}",
        data.num_observations(),
        data.names().iter().map(Label::to_string).collect::<Vec<_>>()
    );

    // Full symmetry between the two measurement pairs: two vertex classes
    // and a single class for the four cross edges.
    let vertices: Vec<Label> = ["B1", "B2", "L1", "L2"].iter().map(|s| t(s)).collect();
    let symmetric = ColouredGraph::new(
        vertices.clone(),
        vec![vec![t("B1"), t("B2")], vec![t("L1"), t("L2")]],
        vec![vec![
            (t("B1"), t("L1")),
            (t("B1"), t("L2")),
            (t("B2"), t("L1")),
            (t("B2"), t("L2")),
        ]],
    )
    .unwrap();

    let fit = fit_rcon(&symmetric, &data).unwrap();
    println!("\nsymmetric model:");
    println!("  converged in {} iterations", fit.iterations);
    println!("  parameters: {}", fit.num_params);
    println!("  log-likelihood: {:.4}", fit.loglik);
    println!(
        "  deviance {:.4} on {} df, p = {:.4}",
        fit.deviance, fit.df, fit.p_value
    );
    println!("  bic: {:.4}", fit.bic);
    for (id, value) in &fit.lambda {
        println!("  lambda[{id}] = {:.6}", value);
    }
    println!("  fitted concentration matrix:");
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:9.5}", fit.khat[(i, j)])).collect();
        println!("    {}", row.join(" "));
    }

    // The saturated model reproduces the sample concentrations exactly and
    // prices every parameter; the symmetric model trades fit for size.
    let saturated = ColouredGraph::unit(vertices).unwrap();
    let full = fit_rcon(&saturated, &data).unwrap();
    println!("\nsaturated model: {} parameters, bic {:.4}", full.num_params, full.bic);
    println!(
        "symmetric model is preferred by bic: {}",
        fit.bic < full.bic
    );
}
