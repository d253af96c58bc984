use std::f64::consts::PI;

use grauert_core::asymptotics::{
    decay_fit, predicted_poisson_scaled, predicted_szego_scaled, torus_norm_leading_log, Displacements, Prediction,
    PredictionInputs, PredictionKind,
};
use grauert_core::sampling::random_unit_vector;
use grauert_core::{GramRoute, GroupKind, IsotypicBasis, Resolution, TubePoint, C64};

use super::{field, rng, su2_resolution, timed};
use crate::cache::Cache;
use crate::config::ExperimentConfig;
use crate::error::RunResult;
use crate::report::{CriterionResult, FitLine, FitRecord, PlotKind, Report, Series, Table};

fn ray_point(lambda: &[f64], norm: f64, tau: f64) -> TubePoint {
    let d = lambda.len();
    let theta: Vec<f64> = (0..d).map(|i| 0.3 - 0.7 * i as f64).collect();
    let omega: Vec<f64> = lambda.iter().map(|l| -l / norm).collect();
    TubePoint::torus_polar(&theta, tau, &omega)
}

/// Worked example on `T^d`: plateau (AC1), norm asymptotics (AC2) and
/// off-ray decay (AC3).
pub fn torus_example(config: &ExperimentConfig, cache: &Cache, report: &mut Report) -> RunResult<()> {
    let spec = config.spec()?;
    let lambda = spec.weight(&config.lambda)?;
    let tau = config.tau;
    let d = spec.dim;
    let plateau_target = (2.0 * PI).powi(-(d as i32));
    let x = ray_point(&lambda.covector, lambda.norm, tau);
    let res = config.resolution_or(Resolution::new(1, 64, 256));

    // AC1: e^{−2kτ‖λ‖}|φ̃|² on the ray
    let mut worst_plateau: f64 = 0.0;
    let mut plateau = Table::new("plateau", &["k", "tempered_density", "rel_err"]);
    for &k in config.ks() {
        let basis = IsotypicBasis::new(&spec, &lambda, k)?;
        let (l, v) = basis.evaluate_scaled(&x)?;
        debug_assert_eq!(l, k as f64 * tau * lambda.norm);
        let val = v[0].norm_sqr();
        let err = (val / plateau_target - 1.0).abs();
        worst_plateau = worst_plateau.max(err);
        plateau.push(vec![k as f64, val, err]);
    }
    report.criteria.push(
        CriterionResult::at_most("AC1", "torus tempered density on the ray equals (2π)^{-d}", worst_plateau, 1e-12)
            .with_detail(format!("k = {}..{}", config.ks()[0], config.ks().last().unwrap())),
    );

    // AC2: quadrature norm against e^{2kτ‖λ‖}(τπ/k‖λ‖)^{(d−1)/2}
    let mut main = Table::new("norm", &["k", "exact_norm", "paper_leading", "ratio"]);
    let mut ratio_series = Series { name: "norm ratio".into(), x: vec![], y: vec![], fit: None };
    let mut worst_scaled: f64 = 0.0;
    timed(&mut report.timings, "ac2", || -> RunResult<()> {
        for &k in config.ks() {
            let f = field(cache, &spec, &lambda, k, tau, res, GramRoute::Dense)?;
            let lead_log = torus_norm_leading_log(d, tau, lambda.norm, k);
            let scaled = f.gram.inner[(0, 0)].re;
            let ratio = scaled * (f.gram.log_scale - lead_log).exp();
            main.push(vec![k as f64, scaled * f.gram.log_scale.exp(), lead_log.exp(), ratio]);
            ratio_series.x.push(k as f64);
            ratio_series.y.push(ratio);
            if k >= 16 {
                worst_scaled = worst_scaled.max((ratio - 1.0).abs() * k as f64);
            }
            if k == *config.ks().last().unwrap() {
                report.warnings.extend(f.warnings.clone());
            }
        }
        Ok(())
    })?;
    report.criteria.push(
        CriterionResult::at_most("AC2", "torus norm ratio satisfies |ratio − 1| ≤ 2/k for k ≥ 16", worst_scaled, 2.0)
            .with_detail("measured is max_k k·|ratio − 1|"),
    );
    let inputs = PredictionInputs::from_spec(&spec, &lambda, tau, &x)?;
    for &k in config.ks() {
        let lead_log = torus_norm_leading_log(d, tau, lambda.norm, k);
        let prefactor = (tau * PI / lambda.norm).powf((d as f64 - 1.0) / 2.0);
        report.predictions.push(Prediction {
            kind: PredictionKind::TorusNorm,
            k,
            value: C64::from(lead_log.exp()),
            exponent: PredictionKind::TorusNorm.exponent(d, spec.rank),
            prefactor,
            inputs,
        });
    }

    // AC3: off-ray tempered diagonal and its exponential rate
    let n_omega = config.samples.unwrap_or(8);
    let mut r = rng(config.seed, 3);
    let mut off = Table::new("off-ray", &["sample", "k", "tempered_diagonal", "exact", "rel_err"]);
    let (mut worst_diag, mut worst_rate): (f64, f64) = (0.0, 0.0);
    for j in 0..n_omega {
        let omega = random_unit_vector(d, &mut r);
        let y = TubePoint::torus_polar(&vec![0.1; d], tau, &omega);
        let pair: f64 = lambda.covector.iter().zip(&omega).map(|(l, w)| -l * w).sum();
        let rate = 2.0 * tau * (pair - lambda.norm);
        let mut samples = Vec::new();
        for &k in config.ks() {
            let basis = IsotypicBasis::new(&spec, &lambda, k)?;
            let p = basis.poisson(&y, &y)?.re;
            let exact = plateau_target * (rate * k as f64).exp();
            let err = (p / exact - 1.0).abs();
            worst_diag = worst_diag.max(err);
            off.push(vec![j as f64, k as f64, p, exact, err]);
            samples.push((k as f64, p));
        }
        let fit = decay_fit(&samples)?;
        worst_rate = worst_rate.max((fit.rate - rate).abs());
        let mut rec = FitRecord::new(
            &format!("off-ray sample {j}"),
            &[("rate", fit.rate), ("exact_rate", rate), ("r2", fit.exponential_r2), ("slope_drop", fit.slope_drop)],
        );
        rec.model = Some(format!("{:?}", fit.model));
        report.fits.push(rec);
    }
    report.criteria.push(
        CriterionResult::new(
            "AC3",
            "torus off-ray tempered diagonal exact to 1e-9 and fitted rate to 1e-6",
            worst_diag,
            1e-9,
            worst_diag <= 1e-9 && worst_rate <= 1e-6,
        )
        .with_detail(format!("{n_omega} directions; max rate error {worst_rate:.2e}")),
    );

    report.tables = vec![main, plateau, off];
    report.series.push(ratio_series);
    report.plot_kind = Some(PlotKind::Ratio);
    Ok(())
}

/// Measured diagonals against the leading terms: exact on the torus ray,
/// convergent ratios on SU(2).
pub fn scaling(config: &ExperimentConfig, cache: &Cache, report: &mut Report) -> RunResult<()> {
    let spec = config.spec()?;
    let lambda = spec.weight(&config.lambda)?;
    let tau = config.tau;
    let zero = Displacements::default();
    let x = match spec.name {
        GroupKind::Torus { .. } => ray_point(&lambda.covector, lambda.norm, tau),
        GroupKind::Su2 => grauert_core::sampling::random_tube_point(&spec, tau, &mut rng(config.seed, 1)),
    };
    let inputs = PredictionInputs::from_spec(&spec, &lambda, tau, &x)?;
    let mut table =
        Table::new("scaling", &["k", "szego", "pred_szego", "szego_ratio", "poisson", "pred_poisson", "poisson_ratio"]);
    let mut sz_series = Series { name: "Π / prediction".into(), x: vec![], y: vec![], fit: None };
    let mut po_series = Series { name: "P / prediction".into(), x: vec![], y: vec![], fit: None };
    let (mut worst_exact, mut worst_ratio): (f64, f64) = (0.0, 0.0);
    for &k in config.ks() {
        let res = match spec.name {
            GroupKind::Torus { .. } => config.resolution_or(Resolution::new(1, 64, 256)),
            GroupKind::Su2 => su2_resolution(config, &lambda, k),
        };
        let f = field(cache, &spec, &lambda, k, tau, res, GramRoute::Factorized)?;
        let sz = f.szego(&x, &x)?.re;
        let po = f.poisson(&x, &x)?.re;
        let psz = predicted_szego_scaled(&inputs, k, &zero)?;
        let ppo = predicted_poisson_scaled(&inputs, k, &zero)?;
        let (rs, rp) = (sz / psz.value.re, po / ppo.value.re);
        table.push(vec![k as f64, sz, psz.value.re, rs, po, ppo.value.re, rp]);
        sz_series.x.push(k as f64);
        sz_series.y.push(rs);
        po_series.x.push(k as f64);
        po_series.y.push(rp);
        worst_exact = worst_exact.max((rp - 1.0).abs());
        if k >= 16 {
            worst_ratio = worst_ratio.max((rs - 1.0).abs() * k as f64);
        }
        report.predictions.push(psz);
        report.predictions.push(ppo);
    }
    match spec.name {
        GroupKind::Torus { .. } => {
            report.criteria.push(CriterionResult::at_most(
                "PROP-torus-exactness",
                "predicted Poisson diagonal equals the torus ray value for every k",
                worst_exact,
                1e-10,
            ));
            report.criteria.push(
                CriterionResult::at_most(
                    "AC2-scaling",
                    "Szegő ratio to prediction within 2/k for k ≥ 16",
                    worst_ratio,
                    2.0,
                )
                .with_detail("measured is max_k k·|ratio − 1|"),
            );
        }
        GroupKind::Su2 => {
            report.criteria.push(
                CriterionResult::at_most(
                    "AC9-scaling",
                    "Szegő ratio to prediction within 2.5/k for k ≥ 16",
                    worst_ratio,
                    2.5,
                )
                .with_detail("measured is max_k k·|ratio − 1|"),
            );
            let last = *po_series.y.last().unwrap();
            report.notes.push(format!(
                "Poisson ratio is {last:.4} at k = {}; the closed form gives the limit 2τ/sinh 2τ = {:.4}, \
                 a constant factor between the measured and predicted leading coefficients",
                config.ks().last().unwrap(),
                2.0 * tau / (2.0 * tau).sinh()
            ));
        }
    }
    report.fits.push(FitRecord::new("scaling", &[("tau", tau)]));
    sz_series.fit = None::<FitLine>;
    report.tables.push(table);
    report.series.push(sz_series);
    report.series.push(po_series);
    report.plot_kind = Some(PlotKind::Ratio);
    Ok(())
}
