//! Global adaptive tensor Gauss–Legendre over boxes.
//!
//! Panels live in a `Vec` whose order is fixed by construction (children
//! replace their parent in place), every round evaluates new panels with an
//! order-preserving parallel map, and totals are pairwise sums in index
//! order. The result therefore does not depend on the worker count.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

use super::QuadConfig;
use crate::error::{Error, Result};

/// Total integrand evaluations allowed in one run before giving up.
const EVAL_BUDGET: usize = 400_000_000;

pub(crate) trait BoxIntegrand: Sync {
    fn dim(&self) -> usize;
    /// Integrand (Jacobians included) at `x` inside a box of `region`, and
    /// the distance between the curve points it couples (∞ if none).
    fn eval(&self, region: usize, x: &[f64]) -> Result<(Complex64, f64)>;
}

#[derive(Clone, Debug)]
pub(crate) struct Region {
    pub tag: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct EngineOut {
    pub value: Complex64,
    pub err: f64,
    pub panels_evaluated: usize,
    pub converged: bool,
}

struct Rule {
    lo_nodes: Vec<(f64, f64)>,
    hi_nodes: Vec<(f64, f64)>,
    /// Legendre P_{m−1}, P_{m−2} at the high-order nodes on [−1, 1].
    tail_basis: Vec<[f64; 2]>,
}

fn unit_nodes(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("positive order"));
    let mut pairs: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .into_iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

fn legendre(k: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if k == 0 {
        return p0;
    }
    for j in 1..k {
        let p2 = ((2 * j + 1) as f64 * t * p1 - j as f64 * p0) / (j + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

impl Rule {
    fn new(order: usize) -> Rule {
        let lo_nodes = unit_nodes(order);
        let hi_nodes = unit_nodes(order + 4);
        let m = hi_nodes.len();
        let tail_basis = hi_nodes
            .iter()
            .map(|&(x, _)| {
                let t = 2.0 * x - 1.0;
                [legendre(m - 1, t), legendre(m - 2, t)]
            })
            .collect();
        Rule {
            lo_nodes,
            hi_nodes,
            tail_basis,
        }
    }
}

#[derive(Clone, Debug)]
struct Panel {
    tag: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    depth: u32,
    value: Complex64,
    err: f64,
    split_axis: usize,
    distance: f64,
}

impl Panel {
    fn priority(&self) -> f64 {
        if self.distance.is_finite() {
            self.err * (1.0 + 1.0 / self.distance.max(1e-300))
        } else {
            self.err
        }
    }
}

struct Grid<'a> {
    nodes: &'a [(f64, f64)],
    dim: usize,
}

impl Grid<'_> {
    /// Visits every tensor node: `visit(multi_index, x, weight)`.
    fn for_each(
        &self,
        lo: &[f64],
        hi: &[f64],
        mut visit: impl FnMut(&[usize], &[f64], f64) -> Result<()>,
    ) -> Result<()> {
        let n = self.nodes.len();
        let d = self.dim;
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        loop {
            let mut w = 1.0;
            for a in 0..d {
                let (t, wt) = self.nodes[idx[a]];
                let width = hi[a] - lo[a];
                x[a] = lo[a] + width * t;
                w *= wt * width;
            }
            visit(&idx, &x, w)?;
            let mut a = 0;
            loop {
                if a == d {
                    return Ok(());
                }
                idx[a] += 1;
                if idx[a] < n {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }
}

fn eval_panel(f: &dyn BoxIntegrand, rule: &Rule, tag: usize, lo: Vec<f64>, hi: Vec<f64>, depth: u32) -> Result<Panel> {
    let d = f.dim();
    let mut distance = f64::INFINITY;

    let mut q_lo = Complex64::new(0.0, 0.0);
    Grid {
        nodes: &rule.lo_nodes,
        dim: d,
    }
    .for_each(&lo, &hi, |_, x, w| {
        let (v, dist) = f.eval(tag, x)?;
        distance = distance.min(dist);
        q_lo += v * w;
        Ok(())
    })?;

    let m = rule.hi_nodes.len();
    let mut marginals = vec![vec![Complex64::new(0.0, 0.0); m]; d];
    let mut q_hi = Complex64::new(0.0, 0.0);
    Grid {
        nodes: &rule.hi_nodes,
        dim: d,
    }
    .for_each(&lo, &hi, |idx, x, w| {
        let (v, dist) = f.eval(tag, x)?;
        distance = distance.min(dist);
        let vw = v * w;
        q_hi += vw;
        for a in 0..d {
            let wa = rule.hi_nodes[idx[a]].1 * (hi[a] - lo[a]);
            marginals[a][idx[a]] += vw / wa;
        }
        Ok(())
    })?;

    let mut split_axis = 0;
    let mut best = -1.0;
    for a in 0..d {
        let width = hi[a] - lo[a];
        let mut c = [Complex64::new(0.0, 0.0); 2];
        for (i, g) in marginals[a].iter().enumerate() {
            let w = rule.hi_nodes[i].1 * width;
            c[0] += g * w * rule.tail_basis[i][0];
            c[1] += g * w * rule.tail_basis[i][1];
        }
        let indicator = (2 * m - 1) as f64 * c[0].norm() + (2 * m - 3) as f64 * c[1].norm();
        if indicator > best {
            best = indicator;
            split_axis = a;
        }
    }
    if best <= 0.0 {
        split_axis = (0..d)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
            .unwrap_or(0);
    }

    Ok(Panel {
        tag,
        lo,
        hi,
        depth,
        value: q_hi,
        err: (q_hi - q_lo).norm(),
        split_axis,
        distance,
    })
}

/// Sum in a fixed binary tree over index order.
pub(crate) fn pairwise_sum<T: Copy + std::ops::Add<Output = T>>(v: &[T], zero: T) -> T {
    match v.len() {
        0 => zero,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2], zero) + pairwise_sum(&v[n / 2..], zero),
    }
}

fn panel_evals(order: usize, d: usize) -> usize {
    order.pow(d as u32) + (2 * order).pow(d as u32)
}

/// Integrates over the union of `regions` to `cfg.tol` relative accuracy.
pub(crate) fn run(f: &dyn BoxIntegrand, regions: &[Region], cfg: &QuadConfig) -> Result<EngineOut> {
    let go = || run_inner(f, regions, cfg);
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(go),
        None => go(),
    }
}

fn run_inner(f: &dyn BoxIntegrand, regions: &[Region], cfg: &QuadConfig) -> Result<EngineOut> {
    let rule = Rule::new(cfg.panel_order);
    let per_panel = panel_evals(cfg.panel_order, f.dim());
    let mut panels: Vec<Panel> = regions
        .par_iter()
        .map(|r| eval_panel(f, &rule, r.tag, r.lo.clone(), r.hi.clone(), 0))
        .collect::<Result<_>>()?;
    let mut evaluated = panels.len();

    loop {
        let values: Vec<Complex64> = panels.iter().map(|p| p.value).collect();
        let errs: Vec<f64> = panels.iter().map(|p| p.err).collect();
        let value = pairwise_sum(&values, Complex64::new(0.0, 0.0));
        let err = pairwise_sum(&errs, 0.0);
        let min_distance = panels.iter().map(|p| p.distance).fold(f64::INFINITY, f64::min);
        if min_distance < super::MIN_SEPARATION {
            return Err(Error::CurvesTooClose { distance: min_distance });
        }
        let budget = cfg.tol * value.norm().max(1.0);
        let done = |converged| EngineOut {
            value,
            err,
            panels_evaluated: evaluated,
            converged,
        };
        if err <= budget {
            return Ok(done(true));
        }
        let mut order: Vec<usize> = (0..panels.len()).filter(|&i| panels[i].depth < cfg.max_depth).collect();
        let splittable: f64 = order.iter().map(|&i| panels[i].err).sum();
        if order.is_empty() || splittable <= budget / 2.0 {
            return Ok(done(false));
        }
        order.sort_by(|&a, &b| panels[b].priority().total_cmp(&panels[a].priority()).then(a.cmp(&b)));
        let mut selected = vec![false; panels.len()];
        let mut remaining = splittable;
        let mut count = 0;
        for &i in &order {
            if remaining <= budget / 2.0 && count > 0 {
                break;
            }
            selected[i] = true;
            remaining -= panels[i].err;
            count += 1;
        }
        if (evaluated + 2 * count) * per_panel > EVAL_BUDGET {
            return Ok(done(false));
        }

        let jobs: Vec<(usize, Vec<f64>, Vec<f64>, u32)> = panels
            .iter()
            .enumerate()
            .filter(|&(i, _)| selected[i])
            .flat_map(|(_, p)| {
                let a = p.split_axis;
                let mid = 0.5 * (p.lo[a] + p.hi[a]);
                let mut hi_left = p.hi.clone();
                hi_left[a] = mid;
                let mut lo_right = p.lo.clone();
                lo_right[a] = mid;
                [
                    (p.tag, p.lo.clone(), hi_left, p.depth + 1),
                    (p.tag, lo_right, p.hi.clone(), p.depth + 1),
                ]
            })
            .collect();
        let mut children = jobs
            .into_par_iter()
            .map(|(tag, lo, hi, depth)| eval_panel(f, &rule, tag, lo, hi, depth))
            .collect::<Result<Vec<_>>>()?
            .into_iter();
        evaluated += 2 * count;

        let mut next = Vec::with_capacity(panels.len() + count);
        for (i, p) in panels.into_iter().enumerate() {
            if selected[i] {
                next.push(children.next().expect("two children per split"));
                next.push(children.next().expect("two children per split"));
            } else {
                next.push(p);
            }
        }
        panels = next;
    }
}
