//! The experiments behind each acceptance criterion.

mod characters;
mod kernels;
mod torus;

use std::collections::BTreeMap;
use std::time::Instant;

use grauert_core::{GramRoute, GroupSpec, IsotypicBasis, KernelField, Resolution, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cache::Cache;
use crate::config::{Experiment, ExperimentConfig};
use crate::error::RunResult;
use crate::report::Report;

/// Runs one experiment. Deterministic given `(config, seed)`.
pub fn run(config: &ExperimentConfig, cache: &Cache) -> RunResult<Report> {
    config.validate()?;
    let start = Instant::now();
    let (h0, m0) = (cache.hits(), cache.misses());
    let mut report = Report::new(config);
    match config.experiment {
        Experiment::TorusExample => torus::torus_example(config, cache, &mut report)?,
        Experiment::Scaling => torus::scaling(config, cache, &mut report)?,
        Experiment::KirillovCheck => characters::kirillov_check(config, cache, &mut report)?,
        Experiment::Orthogonality => characters::orthogonality(config, &mut report)?,
        Experiment::KernelDiagonal => kernels::kernel_diagonal(config, cache, &mut report)?,
        Experiment::RapidDecay => kernels::rapid_decay(config, cache, &mut report)?,
        Experiment::HusimiBound => kernels::husimi_bound(config, cache, &mut report)?,
        Experiment::LpNorm => kernels::lp_norm(config, cache, &mut report)?,
    }
    report.timings.insert("total_s".into(), start.elapsed().as_secs_f64());
    report.cache_hits = cache.hits() - h0;
    report.cache_misses = cache.misses() - m0;
    Ok(report)
}

/// Independent, replayable random stream `stream` of the run seed.
pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub(crate) fn timed<T>(timings: &mut BTreeMap<String, f64>, label: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    timings.insert(format!("{label}_s"), t.elapsed().as_secs_f64());
    out
}

/// Kernel field for `kλ` at radius `τ`, with the Gram matrix from the cache.
pub(crate) fn field(
    cache: &Cache,
    spec: &GroupSpec,
    lambda: &Weight,
    k: usize,
    tau: f64,
    res: Resolution,
    route: GramRoute,
) -> RunResult<KernelField> {
    let basis = IsotypicBasis::new(spec, lambda, k)?;
    let grid = grauert_core::x_tau_grid(spec, tau, res)?;
    let gram = cache.gram(&basis, &grid, route)?;
    Ok(KernelField::from_gram(basis, grid, gram, route)?)
}

/// Exact SU(2) resolution for `kλ`, with config overrides.
pub(crate) fn su2_resolution(config: &ExperimentConfig, lambda: &Weight, k: usize) -> Resolution {
    config.resolution_or(Resolution::exact_for_su2(k * lambda.lattice[0] as usize))
}
