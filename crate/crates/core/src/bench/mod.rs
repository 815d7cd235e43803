//! Benchmark families and the dropped-equation experiment.

mod experiment;
mod systems;

pub use experiment::{
    projectivize, run_dropped_equation_experiment, BenchReport, Experiment, ExperimentConfig, Method,
};

pub use systems::{
    gen_banded_quadrics, gen_cyclic, gen_katsura, gen_mle_symmetric, random_data, MleSystem,
};
