//! Lattices of vertex- and edge-coloured graphs for Gaussian models with
//! equality constraints.
//!
//! A coloured graph, meaning an undirected graph together with a partition
//! of its vertices and a partition of its edges, encodes a Gaussian
//! concentration model in which entries of K = Σ⁻¹ are equal within colour
//! classes. This crate provides:
//!
//! - set partitions with their complete (non-distributive) lattice,
//!   enumeration by restricted-growth strings, and Bell-number counting
//!   ([`partition`]);
//! - coloured graphs, the model-inclusion partial order, and the lattice
//!   meet/join on colourings ([`graph`]);
//! - the four colouring classes (edge regular, vertex regular, regular, and
//!   permutation-generated) with membership predicates, permutation-group
//!   machinery, equitable refinement over factor graphs, and the four
//!   supremum operators ([`classes`]);
//! - RCON maximum-likelihood fitting by damped Newton ascent, deviance/BIC
//!   statistics, and RCOR matrix construction ([`gaussian`]);
//! - stepwise model selection over the edge-regular and
//!   permutation-generated lattices, driven by rejection duals, with
//!   explicit dual generators and a brute-force lattice backend
//!   ([`search`]);
//! - a thin command-line front end ([`cli`]).
//!
//! Most capabilities have a runnable demo under `examples/`.

pub mod classes;
pub mod cli;
pub mod gaussian;
pub mod graph;
pub mod partition;
pub mod search;
