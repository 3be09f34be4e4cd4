//! Plot-ready distribution data: per-group histograms and Gaussian kernel
//! density estimates. Nothing is rendered here.

use serde::Serialize;

use crate::dataset::{Dataset, Diagnostic};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub bin_width: f64,
    pub grid_points: usize,
    /// Multiplies the Silverman bandwidth.
    pub bandwidth_scale: f64,
    pub density: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            bin_width: 1.0,
            grid_points: 256,
            bandwidth_scale: 1.0,
            density: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `counts.len() + 1` ascending edges; bins are `[edge_i, edge_{i+1})`,
    /// except that the pooled maximum always falls in the last bin.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Density {
    pub bandwidth: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub component: String,
    pub group: String,
    pub count: usize,
    pub histogram: Histogram,
    pub density: Option<Density>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotData {
    pub series: Vec<Series>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Diagnostic>,
}

pub fn histogram(sorted: &[f64], bin_width: f64) -> Histogram {
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    let start = (lo / bin_width).floor() * bin_width;
    let bins = (((hi - start) / bin_width).floor() as usize + 1).max(1);
    let edges = (0..=bins).map(|i| start + i as f64 * bin_width).collect();
    let mut counts = vec![0usize; bins];
    for &q in sorted {
        let i = (((q - start) / bin_width).floor() as usize).min(bins - 1);
        counts[i] += 1;
    }
    Histogram { edges, counts }
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    match sorted.get(i + 1) {
        Some(next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}

/// Silverman's rule of thumb, `0.9 · min(σ, IQR / 1.34) · n^(-1/5)`, with σ the
/// sample standard deviation. Falls back to σ alone when the IQR is zero.
/// `None` when fewer than two samples or σ = 0.
pub fn silverman_bandwidth(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    if n < 2 {
        return None;
    }
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let var = sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    if sd.is_nan() || sd <= 0.0 {
        return None;
    }
    let iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Some(0.9 * spread * (n as f64).powf(-0.2))
}

/// Gaussian KDE on `grid_points` evenly spaced points spanning four bandwidths
/// beyond the data range.
pub fn gaussian_kde(sorted: &[f64], bandwidth: f64, grid_points: usize) -> Density {
    let lo = sorted[0] - 4.0 * bandwidth;
    let hi = sorted[sorted.len() - 1] + 4.0 * bandwidth;
    let step = (hi - lo) / (grid_points - 1) as f64;
    let norm = 1.0 / (sorted.len() as f64 * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let x: Vec<f64> = (0..grid_points).map(|i| lo + i as f64 * step).collect();
    let y = x
        .iter()
        .map(|&xi| {
            sorted
                .iter()
                .map(|&q| {
                    let z = (xi - q) / bandwidth;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect();
    Density { bandwidth, x, y }
}

pub fn plot_data(dataset: &Dataset, opts: &PlotOptions) -> Result<PlotData> {
    if !(opts.bin_width.is_finite() && opts.bin_width > 0.0) {
        return Err(Error::Config(format!("bin width must be > 0, got {}", opts.bin_width)));
    }
    if opts.grid_points < 2 {
        return Err(Error::Config("density grid needs at least 2 points".into()));
    }
    if !(opts.bandwidth_scale.is_finite() && opts.bandwidth_scale > 0.0) {
        return Err(Error::Config(format!(
            "bandwidth scale must be > 0, got {}",
            opts.bandwidth_scale
        )));
    }
    let mut series = Vec::new();
    let mut warnings = Vec::new();
    for grouped in dataset.grouped()? {
        for (label, sorted) in grouped.groups() {
            let density = if opts.density {
                match silverman_bandwidth(sorted) {
                    Some(h) => Some(gaussian_kde(sorted, h * opts.bandwidth_scale, opts.grid_points)),
                    None => {
                        warnings.push(Diagnostic::warning(
                            format!("{}/{}", grouped.component_id(), label),
                            "zero spread: density skipped, histogram only",
                        ));
                        None
                    }
                }
            } else {
                None
            };
            series.push(Series {
                component: grouped.component_id().to_owned(),
                group: label.to_owned(),
                count: sorted.len(),
                histogram: histogram(sorted, opts.bin_width),
                density,
            });
        }
    }
    Ok(PlotData { series, warnings })
}

pub fn render_json(data: &PlotData) -> String {
    let mut s = serde_json::to_string_pretty(data).expect("plot values are finite");
    s.push('\n');
    s
}

/// Long format: `component,group,series,x,width,value`. Histogram rows use the
/// left bin edge and bin width; density rows leave `width` empty.
pub fn render_csv(data: &PlotData) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::parse("csv output", e.to_string());
    w.write_record(["component", "group", "series", "x", "width", "value"])
        .map_err(to_err)?;
    for s in &data.series {
        let h = &s.histogram;
        for (i, c) in h.counts.iter().enumerate() {
            let width = h.edges[i + 1] - h.edges[i];
            w.write_record([
                s.component.as_str(),
                s.group.as_str(),
                "histogram",
                &h.edges[i].to_string(),
                &width.to_string(),
                &c.to_string(),
            ])
            .map_err(to_err)?;
        }
        if let Some(d) = &s.density {
            for (x, y) in d.x.iter().zip(&d.y) {
                w.write_record([
                    s.component.as_str(),
                    s.group.as_str(),
                    "density",
                    &x.to_string(),
                    "",
                    &y.to_string(),
                ])
                .map_err(to_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::parse("csv output", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::read_json;

    fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
        x.windows(2)
            .zip(y.windows(2))
            .map(|(xs, ys)| (xs[1] - xs[0]) * (ys[0] + ys[1]) / 2.0)
            .sum()
    }

    #[test]
    fn histogram_conserves_counts() {
        let h = histogram(&[1.0, 1.5, 2.0, 4.99, 5.0], 1.0);
        assert_eq!(h.edges, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(h.counts, vec![2, 1, 0, 1, 1]);
        let h = histogram(&[0.0, 10.0], 2.5);
        assert_eq!(h.counts.iter().sum::<usize>(), 2);
    }

    #[test]
    fn single_valued_group_has_one_bin_and_no_density() {
        let ds = read_json(r#"{"components":{"q":{"A":[7,7,7],"B":[1,2,3,9]}}}"#.as_bytes(), None).unwrap();
        let p = plot_data(&ds, &PlotOptions::default()).unwrap();
        let a = &p.series[0];
        assert_eq!(a.histogram.counts.iter().filter(|c| **c > 0).count(), 1);
        assert!(a.density.is_none());
        assert_eq!(p.warnings.len(), 1);
        assert!(p.series[1].density.is_some());
    }

    #[test]
    fn density_integrates_to_one() {
        let ds = read_json(
            r#"{"components":{"q":{"A":[50,52,55,60,61,61,62,70],"B":[80,81,83,90,95,99,100,100,100]}}}"#.as_bytes(),
            None,
        )
        .unwrap();
        let p = plot_data(&ds, &PlotOptions::default()).unwrap();
        for s in &p.series {
            let d = s.density.as_ref().unwrap();
            assert!(d.y.iter().all(|v| *v >= 0.0));
            let area = trapezoid(&d.x, &d.y);
            assert!((0.98..=1.02).contains(&area), "{area}");
        }
    }

    #[test]
    fn silverman_matches_hand_value() {
        // sd = sqrt(2.5), IQR = 2 -> min(1.5811, 1.4925) = 1.4925
        let h = silverman_bandwidth(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let expected = 0.9 * (2.0 / 1.34) * 5f64.powf(-0.2);
        assert!((h - expected).abs() < 1e-12);
        assert!(silverman_bandwidth(&[3.0]).is_none());
    }

    #[test]
    fn bad_options_rejected() {
        let ds = read_json(r#"{"components":{"q":{"A":[1],"B":[2]}}}"#.as_bytes(), None).unwrap();
        let bad = PlotOptions { bin_width: 0.0, ..Default::default() };
        assert!(plot_data(&ds, &bad).is_err());
        let bad = PlotOptions { grid_points: 1, ..Default::default() };
        assert!(plot_data(&ds, &bad).is_err());
    }
}
