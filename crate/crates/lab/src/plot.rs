//! SVG rendering of report series.

use std::path::Path;

use plotters::prelude::*;

use crate::error::{RunError, RunResult};
use crate::report::{PlotKind, Report, Series};

const COLORS: [RGBColor; 6] = [BLUE, RED, GREEN, MAGENTA, CYAN, BLACK];

fn err(e: impl std::fmt::Display) -> RunError {
    RunError::Plot(e.to_string())
}

/// Coordinates on the plotted axes: log10 where the kind calls for it.
fn transform(kind: PlotKind, x: f64, y: f64) -> Option<(f64, f64)> {
    let (x, y) = match kind {
        PlotKind::LogLog => (x.log10(), y.log10()),
        PlotKind::Semilog => (x, y.log10()),
        PlotKind::Ratio => (x, y),
    };
    (x.is_finite() && y.is_finite()).then_some((x, y))
}

/// Fitted line at `x` on the plotted axes; fits are in natural logs.
fn fit_at(kind: PlotKind, s: &Series, x: f64) -> Option<(f64, f64)> {
    let f = s.fit?;
    let ln_y = match kind {
        PlotKind::LogLog => f.slope * x.ln() + f.intercept,
        PlotKind::Semilog => f.slope * x + f.intercept,
        PlotKind::Ratio => return None,
    };
    transform(kind, x, ln_y.exp())
}

/// Renders the report's series as `kind` to `path`.
pub fn plot(report: &Report, kind: PlotKind, path: &Path) -> RunResult<()> {
    if report.series.is_empty() {
        return Err(RunError::Plot(format!("report '{}' has no series to plot", report.experiment)));
    }
    let points: Vec<Vec<(f64, f64)>> = report
        .series
        .iter()
        .map(|s| s.x.iter().zip(&s.y).filter_map(|(&x, &y)| transform(kind, x, y)).collect())
        .collect();
    if points.iter().all(Vec::is_empty) {
        return Err(RunError::Plot("series contain no plottable points".into()));
    }
    let all = points.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if kind == PlotKind::Ratio {
        y0 = y0.min(1.0);
        y1 = y1.max(1.0);
    }
    let pad = |a: f64, b: f64| if b > a { 0.05 * (b - a) } else { 0.5 };
    let (px, py) = (pad(x0, x1), pad(y0, y1));

    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(err)?;
    let (xl, yl) = match kind {
        PlotKind::LogLog => ("log10 x", "log10 y"),
        PlotKind::Semilog => ("x", "log10 y"),
        PlotKind::Ratio => ("x", "ratio"),
    };
    let mut chart = ChartBuilder::on(&root)
        .caption(&report.experiment, ("sans-serif", 24))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0 - px..x1 + px, y0 - py..y1 + py)
        .map_err(err)?;
    chart.configure_mesh().x_desc(xl).y_desc(yl).draw().map_err(err)?;

    for (i, (s, pts)) in report.series.iter().zip(&points).enumerate() {
        let color = COLORS[i % COLORS.len()];
        chart
            .draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))
            .map_err(err)?
            .label(s.name.clone())
            .legend(move |(x, y)| Circle::new((x, y), 3, color.filled()));
        let fitted: Vec<_> = s.x.iter().filter_map(|&x| fit_at(kind, s, x)).collect();
        if !fitted.is_empty() {
            chart.draw_series(LineSeries::new(fitted, color.stroke_width(1))).map_err(err)?;
        }
    }
    if kind == PlotKind::Ratio {
        chart.draw_series(LineSeries::new([(x0 - px, 1.0), (x1 + px, 1.0)], BLACK.stroke_width(1))).map_err(err)?;
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw().map_err(err)?;
    root.present().map_err(err)?;
    Ok(())
}

/// Plots with the report's own kind, if it has one.
pub fn plot_default(report: &Report, dir: &Path) -> RunResult<Option<std::path::PathBuf>> {
    let Some(kind) = report.plot_kind else { return Ok(None) };
    let path = dir.join(format!("{}.svg", report.experiment));
    plot(report, kind, &path)?;
    Ok(Some(path))
}
