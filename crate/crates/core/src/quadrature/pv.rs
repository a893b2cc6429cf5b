use std::f64::consts::TAU;

use num_complex::Complex64;

use super::chart::Shape;
use super::{integrate_scaled, Domain, ProductIntegrand, ProductOptions, PvInfo, QuadConfig, QuadResult};
use crate::error::{Error, Result};

/// Declared punctures of each factor domain.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Punctures {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl Punctures {
    pub fn is_empty(&self) -> bool {
        self.a.is_empty() && self.b.is_empty()
    }
}

/// Value at 0 of the polynomial through `(x_i, y_i)`.
pub(crate) fn neville_at_zero(x: &[f64], y: &[Complex64]) -> Complex64 {
    let mut p = y.to_vec();
    let n = x.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (p[i + 1] * x[i] - p[i] * x[i + k]) / (x[i] - x[i + k]);
        }
    }
    p[0]
}

fn lebesgue_at_zero(x: &[f64]) -> f64 {
    (0..x.len())
        .map(|i| {
            (0..x.len())
                .filter(|&j| j != i)
                .map(|j| (x[j] / (x[i] - x[j])).abs())
                .product::<f64>()
        })
        .sum()
}

fn probe_points(shape: &Shape) -> Vec<Complex64> {
    let chart = shape.base_chart();
    match chart.dim() {
        0 => vec![chart.map(&[]).pts[0].0],
        1 => [0.23, 0.51, 0.77].iter().map(|&x| chart.map(&[x]).pts[0].0).collect(),
        _ => [[0.23, 0.31], [0.51, 0.77], [0.77, 0.13]]
            .iter()
            .map(|x| chart.map(x).pts[0].0)
            .collect(),
    }
}

fn around(shape: &Shape, a: Complex64, eps: f64) -> Vec<Complex64> {
    match shape {
        Shape::Interval { .. } => vec![a + eps, a - eps],
        _ => (0..8)
            .map(|k| a + Complex64::from_polar(eps, TAU * (k as f64 + 0.5) / 8.0))
            .collect(),
    }
}

/// Rejects punctures where |f| grows faster than a simple pole, estimated
/// from the decay exponent of the mean |f| on circles of radius ε.
fn growth_probe<I: ProductIntegrand + ?Sized>(
    f: &I,
    sa: &Shape,
    sb: &Shape,
    punctures: &Punctures,
    epsilons: &[f64],
) -> Result<()> {
    let sides = [(&punctures.a, sa, sb, false), (&punctures.b, sb, sa, true)];
    for (points, own, other, swapped) in sides {
        let others = probe_points(other);
        for &a in points.iter() {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for &eps in epsilons {
                let mut total = 0.0;
                let mut count = 0.0;
                for u in around(own, a, eps) {
                    for &v in &others {
                        let val = if swapped { f.eval(v, u) } else { f.eval(u, v) };
                        total += val.norm();
                        count += 1.0;
                    }
                }
                let mean = total / count;
                if mean > 0.0 && mean.is_finite() {
                    xs.push(eps.ln());
                    ys.push(mean.ln());
                }
            }
            if xs.len() < 2 {
                continue;
            }
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            let order = -sxy / sxx;
            if order > 1.5 {
                return Err(Error::PvNotConverging {
                    reason: format!(
                        "integrand grows like |u - a|^-{order:.2} at puncture {a}; only simple poles have a principal value"
                    ),
                });
            }
        }
    }
    Ok(())
}

pub(super) fn integrate<I: ProductIntegrand + ?Sized>(
    f: &I,
    a: &Domain,
    b: &Domain,
    punctures: &Punctures,
    cfg: &QuadConfig,
    opts: ProductOptions,
) -> Result<QuadResult> {
    if punctures.is_empty() {
        return integrate_scaled(f, a, b, punctures, None, cfg, opts);
    }
    let sa = a.shape(cfg, 1.0)?;
    let sb = b.shape(cfg, 1.0)?;
    growth_probe(f, &sa, &sb, punctures, &cfg.pv_epsilons)?;

    let inner = cfg.with_tol(cfg.tol / 100.0);
    let runs = cfg
        .pv_epsilons
        .iter()
        .map(|&eps| integrate_scaled(f, a, b, punctures, Some(eps), &inner, opts))
        .collect::<Result<Vec<_>>>()?;
    // Removing an ε-disk around a simple pole changes the integral by a
    // series in ε²; a symmetric ε-gap on an interval by a series in ε.
    let planar = [(&punctures.a, &sa), (&punctures.b, &sb)]
        .iter()
        .all(|(p, s)| p.is_empty() || s.base_chart().dim() == 2);
    let eps: Vec<f64> = cfg
        .pv_epsilons
        .iter()
        .map(|&e| if planar { e * e } else { e })
        .collect();
    let values: Vec<Complex64> = runs.iter().map(|r| r.value).collect();
    let m = values.len();
    let extrapolants: Vec<Complex64> = (0..m)
        .map(|j| neville_at_zero(&eps[m - 1 - j..], &values[m - 1 - j..]))
        .collect();
    let value = extrapolants[m - 1];
    let scale = value.norm().max(1.0);
    let spread = if m >= 2 {
        (extrapolants[m - 1] - extrapolants[m - 2]).norm()
    } else {
        f64::INFINITY
    };
    if m >= 2 && spread > cfg.tol * scale {
        return Err(Error::PvNotConverging {
            reason: format!(
                "last two extrapolants differ by {spread:e} (> tol·max(1,|value|) = {:e})",
                cfg.tol * scale
            ),
        });
    }
    let inner_err = runs.iter().map(|r| r.err_estimate).fold(0.0, f64::max);
    let err_estimate = if m >= 2 { spread } else { 0.0 } + lebesgue_at_zero(&eps) * inner_err;
    let last = runs.last().expect("at least one epsilon");
    Ok(QuadResult {
        value,
        err_estimate,
        panels_evaluated: runs.iter().map(|r| r.panels_evaluated).sum(),
        tail_estimate: last.tail_estimate,
        converged: m >= 2 && runs.iter().all(|r| r.converged) && err_estimate <= cfg.tol * scale,
        truncation: last.truncation.clone(),
        pv: Some(PvInfo {
            epsilons: cfg.pv_epsilons.clone(),
            values,
            extrapolants,
        }),
    })
}
