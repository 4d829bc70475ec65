//! Numerical integration over the principal stratum of two-dimensional quotients.
//!
//! Each built-in example comes with a hand-made chart: a map from a parameter
//! box into `Z_prin` that is transverse to the orbits and meets almost every
//! orbit exactly once. A basic form pulls back along the chart to a form on the
//! box whose integral is the integral over `X_prin`. Everything here is `f64`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::actions::{GroupDatum, LinearAction};
use crate::error::{Error, Result};
use crate::form::Form;
use crate::linalg::det_f64;
use crate::poly::to_f64;
use crate::random::rng;

/// Form with `f64` coefficients, for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledForm {
    pub degree: usize,
    comps: Vec<(Vec<usize>, Vec<(Vec<u16>, f64)>)>,
}

impl CompiledForm {
    pub fn new(a: &Form) -> Self {
        let comps = a
            .components()
            .map(|(idx, c)| (idx.clone(), c.terms().map(|(m, q)| (m.0.clone(), to_f64(q))).collect()))
            .collect();
        CompiledForm { degree: a.degree(), comps }
    }

    /// `a_x(v₁, …, v_k)`.
    pub fn eval(&self, x: &[f64], vectors: &[&[f64]]) -> f64 {
        let k = self.degree;
        let mut powers = [[1.0f64; 12]; 8];
        let small = x.len() <= 8;
        if small {
            for (row, &xi) in powers.iter_mut().zip(x) {
                for e in 1..12 {
                    row[e] = row[e - 1] * xi;
                }
            }
        }
        let mut total = 0.0;
        for (idx, terms) in &self.comps {
            let mut c = 0.0;
            for (e, q) in terms {
                let mut t = *q;
                for (i, &p) in e.iter().enumerate() {
                    if p > 0 {
                        t *= if small && p < 12 { powers[i][p as usize] } else { x[i].powi(p as i32) };
                    }
                }
                c += t;
            }
            if c == 0.0 {
                continue;
            }
            let minor = match k {
                0 => 1.0,
                1 => vectors[0][idx[0]],
                2 => vectors[0][idx[0]] * vectors[1][idx[1]] - vectors[0][idx[1]] * vectors[1][idx[0]],
                _ => det_f64((0..k).map(|r| idx.iter().map(|&i| vectors[r][i]).collect()).collect()),
            };
            total += c * minor;
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ChartKind {
    /// `S¹` with weights `(1, w)` on `ℂ²` at `½(|z₁|² + w|z₂|²) = c`.
    WeightedCircle { w1: f64, w2: f64, c: f64 },
    /// Weights `(1, −1)` at level 0.
    Cone11,
    /// `ℂ/ℤ_k`.
    Cyclic { k: f64 },
}

/// Chart `(u₁, u₂) ↦ P(u)` of `X_prin`; `u₁` is the radial parameter.
#[derive(Debug, Clone)]
pub struct QuotientChart {
    pub example: String,
    kind: ChartKind,
    pub bounds: [(f64, f64); 2],
    pub compact: bool,
    fields: Vec<Vec<Vec<(Vec<u16>, f64)>>>,
}

impl QuotientChart {
    /// Built-in atlas. `cp1` and `teardrop` use the slice `z₂ > 0`, the cones
    /// polar coordinates on a fundamental sector out to distance 4 from the
    /// apex; each misses a null set.
    pub fn for_action(action: &LinearAction) -> Result<Self> {
        let fields = action
            .basis_fields()
            .iter()
            .map(|v| v.components().iter().map(|p| p.terms().map(|(m, q)| (m.0.clone(), to_f64(q))).collect()).collect())
            .collect();
        let (kind, bounds, compact) = match &action.group {
            GroupDatum::Torus { weights } if action.n() == 2 && weights.len() == 1 => {
                let w = &weights[0];
                let level = to_f64(&action.level[0]);
                if w[0] == 1 && w[1] >= 1 && level < 0.0 {
                    let w2 = w[1] as f64;
                    let kind = ChartKind::WeightedCircle { w1: 1.0, w2, c: -level };
                    (kind, [(0.0, FRAC_PI_2), (0.0, 2.0 * PI / w2)], true)
                } else if w[0] == 1 && w[1] == -1 && level == 0.0 {
                    (ChartKind::Cone11, [(0.0, 4.0 * std::f64::consts::FRAC_1_SQRT_2), (0.0, 2.0 * PI)], false)
                } else {
                    return Err(Error::Integration(format!("no chart atlas for `{}`", action.name)));
                }
            }
            GroupDatum::Finite { elements, .. } if action.n() == 1 => {
                let k = elements.len() as f64;
                (ChartKind::Cyclic { k }, [(0.0, 4.0), (0.0, 2.0 * PI / k)], false)
            }
            _ => return Err(Error::Integration(format!("no chart atlas for `{}`", action.name))),
        };
        Ok(QuotientChart { example: action.name.clone(), kind, bounds, compact, fields })
    }

    pub fn area(&self) -> f64 {
        (self.bounds[0].1 - self.bounds[0].0) * (self.bounds[1].1 - self.bounds[1].0)
    }

    pub fn point(&self, u: [f64; 2]) -> Vec<f64> {
        let [s, p] = u;
        match self.kind {
            ChartKind::WeightedCircle { w1, w2, c } => {
                let (a1, a2) = ((2.0 * c / w1).sqrt(), (2.0 * c / w2).sqrt());
                vec![a1 * s.sin() * p.cos(), a1 * s.sin() * p.sin(), a2 * s.cos(), 0.0]
            }
            ChartKind::Cone11 => vec![s, 0.0, s * p.cos(), s * p.sin()],
            ChartKind::Cyclic { .. } => vec![s * p.cos(), s * p.sin()],
        }
    }

    /// `∂P/∂u₁`, `∂P/∂u₂`.
    pub fn tangents(&self, u: [f64; 2]) -> [Vec<f64>; 2] {
        let [s, p] = u;
        match self.kind {
            ChartKind::WeightedCircle { w1, w2, c } => {
                let (a1, a2) = ((2.0 * c / w1).sqrt(), (2.0 * c / w2).sqrt());
                [
                    vec![a1 * s.cos() * p.cos(), a1 * s.cos() * p.sin(), -a2 * s.sin(), 0.0],
                    vec![-a1 * s.sin() * p.sin(), a1 * s.sin() * p.cos(), 0.0, 0.0],
                ]
            }
            ChartKind::Cone11 => [vec![1.0, 0.0, p.cos(), p.sin()], vec![0.0, 0.0, -s * p.sin(), s * p.cos()]],
            ChartKind::Cyclic { .. } => [vec![p.cos(), p.sin()], vec![-s * p.sin(), s * p.cos()]],
        }
    }

    /// `ω_prin(∂₁P, ∂₂P)`, the Liouville density `ω^n/n!` for `n = 1`.
    pub fn liouville_density(&self, u: [f64; 2]) -> f64 {
        let [a, b] = self.tangents(u);
        (0..a.len() / 2).map(|i| a[2 * i] * b[2 * i + 1] - a[2 * i + 1] * b[2 * i]).sum()
    }

    /// Area density of `σ = ω(·, J·)` on horizontal projections of the tangents.
    pub fn riemannian_density(&self, u: [f64; 2]) -> f64 {
        let x = self.point(u);
        let mut orbit: Vec<Vec<f64>> = Vec::new();
        for f in &self.fields {
            let mut v: Vec<f64> = f.iter().map(|terms| eval_terms(terms, &x)).collect();
            for o in &orbit {
                let c = dot(&v, o);
                v.iter_mut().zip(o).for_each(|(a, b)| *a -= c * b);
            }
            let n = dot(&v, &v).sqrt();
            if n > 1e-300 {
                v.iter_mut().for_each(|a| *a /= n);
                orbit.push(v);
            }
        }
        let hor: Vec<Vec<f64>> = self
            .tangents(u)
            .into_iter()
            .map(|mut t| {
                for o in &orbit {
                    let c = dot(&t, o);
                    t.iter_mut().zip(o).for_each(|(a, b)| *a -= c * b);
                }
                t
            })
            .collect();
        let g = [[dot(&hor[0], &hor[0]), dot(&hor[0], &hor[1])], [dot(&hor[1], &hor[0]), dot(&hor[1], &hor[1])]];
        (g[0][0] * g[1][1] - g[0][1] * g[1][0]).max(0.0).sqrt()
    }

    /// Speed of the radial curve `u₁ ↦ P(u₁, u₂)`; it is horizontal in every chart.
    fn radial_speed(&self, s: f64) -> f64 {
        match self.kind {
            ChartKind::WeightedCircle { w1, w2, c } => ((2.0 * c / w1) * s.cos().powi(2) + (2.0 * c / w2) * s.sin().powi(2)).sqrt(),
            ChartKind::Cone11 => std::f64::consts::SQRT_2,
            ChartKind::Cyclic { .. } => 1.0,
        }
    }

    /// Whether the chart has a singular point at `u₁ = 0`.
    pub fn has_singular_point(&self) -> bool {
        match self.kind {
            ChartKind::WeightedCircle { w2, .. } => w2 > 1.0,
            ChartKind::Cone11 => true,
            ChartKind::Cyclic { k } => k > 1.0,
        }
    }

    /// Quotient distance to the singular point, with its `u₁`-derivative.
    pub fn singular_distance(&self, s: f64) -> Option<(f64, f64)> {
        if !self.has_singular_point() {
            return None;
        }
        let d = match self.kind {
            ChartKind::WeightedCircle { .. } => gauss_legendre(|t| self.radial_speed(t), 0.0, s),
            _ => self.radial_speed(0.0) * s,
        };
        Some((d, self.radial_speed(s)))
    }

    /// `u₁` at which the distance to the singular point equals `r`, if inside the box.
    pub fn radius_to_parameter(&self, r: f64) -> Option<f64> {
        let (lo, hi) = self.bounds[0];
        let (dmax, _) = self.singular_distance(hi)?;
        if r <= 0.0 || r >= dmax {
            return None;
        }
        let (mut a, mut b) = (lo, hi);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if self.singular_distance(m).unwrap().0 < r {
                a = m;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    }
}

fn eval_terms(terms: &[(Vec<u16>, f64)], x: &[f64]) -> f64 {
    terms.iter().map(|(e, q)| e.iter().zip(x).fold(*q, |acc, (&p, xi)| acc * xi.powi(p as i32))).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const GL20: [(f64, f64); 10] = [
    (0.076_526_521_133_497_33, 0.152_753_387_130_725_85),
    (0.227_785_851_141_645_08, 0.149_172_986_472_603_75),
    (0.373_706_088_715_419_56, 0.142_096_109_318_382_05),
    (0.510_867_001_950_827_1, 0.131_688_638_449_176_63),
    (0.636_053_680_726_515_0, 0.118_194_531_961_518_42),
    (0.746_331_906_460_150_8, 0.101_930_119_817_240_44),
    (0.839_116_971_822_218_8, 0.083_276_741_576_704_75),
    (0.912_234_428_251_325_9, 0.062_672_048_334_109_06),
    (0.963_971_927_277_913_8, 0.040_601_429_800_386_94),
    (0.993_128_599_185_094_9, 0.017_614_007_139_152_12),
];

fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL20.iter().map(|&(x, w)| w * (f(m - h * x) + f(m + h * x))).sum::<f64>() * h
}

const K15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const G7_WEIGHTS: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Gauss–Kronrod 7–15 on `[a, b]`: value and `|K15 − G7|`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(m);
    let mut k = K15_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * K15_NODES[i];
        let s = f(m - x) + f(m + x);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod with fixed breakpoints.
pub fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> (f64, f64) {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    let mut parts: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    for _ in 0..2000 {
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let val: f64 = parts.iter().map(|p| p.2).sum();
        if err <= tol.max(1e-14 * val.abs()) {
            break;
        }
        let (i, _) = parts.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).unwrap();
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    (pairwise(&parts.iter().map(|p| p.2).collect::<Vec<_>>()), parts.iter().map(|p| p.3).sum())
}

/// Pairwise summation, deterministic for a fixed order.
pub fn pairwise(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise(&v[..n / 2]) + pairwise(&v[n / 2..]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Iterated adaptive quadrature over the chart box; `breaks` split the radial parameter.
pub fn quadrature(chart: &QuotientChart, f: &(impl Fn([f64; 2]) -> f64 + Sync), breaks: &[f64], tol: f64) -> Estimate {
    let [(a, b), (c, d)] = chart.bounds;
    let inner_err = std::cell::Cell::new(0.0);
    let count = std::cell::Cell::new(0usize);
    let (value, outer_err) = adaptive(
        |s| {
            let (v, e) = adaptive(
                |p| {
                    count.set(count.get() + 1);
                    f([s, p])
                },
                c,
                d,
                &[],
                tol / (b - a),
            );
            inner_err.set(inner_err.get() + e * 1e-2);
            v
        },
        a,
        b,
        breaks,
        tol,
    );
    Estimate { value, error: outer_err + inner_err.get().min(tol), evaluations: count.get() }
}

/// Stratified Monte Carlo: one jittered sample per cell of an `m × m` grid.
///
/// The error estimate uses differences of horizontally adjacent cells, which
/// bounds the within-cell variance for integrands that are smooth at grid scale.
pub fn monte_carlo(chart: &QuotientChart, f: &(impl Fn([f64; 2]) -> f64 + Sync), m: usize, seed: u64) -> Estimate {
    let [e] = monte_carlo_n(chart, &|u| [f(u)], m, seed);
    e
}

/// Several integrands on the same samples.
pub fn monte_carlo_n<const N: usize>(
    chart: &QuotientChart,
    f: &(impl Fn([f64; 2]) -> [f64; N] + Sync),
    m: usize,
    seed: u64,
) -> [Estimate; N] {
    let [(a, b), (c, d)] = chart.bounds;
    let (hs, hp) = ((b - a) / m as f64, (d - c) / m as f64);
    let rows: Vec<[(f64, f64); N]> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let vals: Vec<[f64; N]> = (0..m)
                .map(|j| {
                    let s = a + (i as f64 + r.gen::<f64>()) * hs;
                    let p = c + (j as f64 + r.gen::<f64>()) * hp;
                    f([s, p])
                })
                .collect();
            std::array::from_fn(|n| {
                let col: Vec<f64> = vals.iter().map(|v| v[n]).collect();
                let var: f64 = col.chunks_exact(2).map(|w| (w[0] - w[1]).powi(2)).sum();
                (pairwise(&col), var)
            })
        })
        .collect();
    let cell = hs * hp;
    std::array::from_fn(|n| {
        let value = pairwise(&rows.iter().map(|r| r[n].0).collect::<Vec<_>>()) * cell;
        let var: f64 = rows.iter().map(|r| r[n].1).sum();
        Estimate { value, error: 3.0 * var.sqrt() * cell, evaluations: m * m }
    })
}

/// `χ(x / stretch)` with a C² ramp: 0 on `[0, ¼]`, 1 on `[1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffFamily {
    pub stretch: f64,
}

impl Default for CutoffFamily {
    fn default() -> Self {
        CutoffFamily { stretch: 1.0 }
    }
}

impl CutoffFamily {
    pub fn profile(&self, x: f64) -> f64 {
        let t = ((x / self.stretch - 0.25) / 0.75).clamp(0.0, 1.0);
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }

    pub fn profile_derivative(&self, x: f64) -> f64 {
        let t = (x / self.stretch - 0.25) / 0.75;
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        30.0 * t * t * (1.0 - t) * (1.0 - t) / (0.75 * self.stretch)
    }

    /// `χ_k = χ₁ ∘ ρ_k` at quotient distance `r` from the singular set.
    pub fn chi(&self, k: f64, r: f64) -> f64 {
        self.profile(k * r)
    }

    /// Parameter values where `χ_k` stops being constant.
    pub fn breakpoints(&self, chart: &QuotientChart, k: f64) -> Vec<f64> {
        [0.25, 1.0].iter().filter_map(|t| chart.radius_to_parameter(t * self.stretch / k)).collect()
    }
}

/// Duistermaat–Heckman volume of `ℂ²` reduced by weights `(w₁, w₂)` at `½Σwᵢ|zᵢ|² = c`.
pub fn duistermaat_heckman(w1: f64, w2: f64, c: f64) -> f64 {
    2.0 * PI * c / (w1 * w2)
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrationReport {
    pub example: String,
    pub quadrature: Estimate,
    pub monte_carlo: Estimate,
    /// The two estimates agree within their combined error bars.
    pub agree: bool,
    /// `|α| ≤ |α̃|` (pointwise norm on `X_prin` against the ambient norm) at every probe.
    pub ambient_bound_holds: bool,
    pub seed: u64,
}

fn check_top(chart: &QuotientChart, a: &Form) -> Result<()> {
    if a.degree() != 2 {
        return Err(Error::Degree(format!("{} is two-dimensional; got a {}-form", chart.example, a.degree())));
    }
    Ok(())
}

/// `∫_{X_prin} α` for a basic top-degree form.
pub fn integrate(action: &LinearAction, a: &Form, mc_grid: usize, seed: u64) -> Result<IntegrationReport> {
    let chart = QuotientChart::for_action(action)?;
    check_top(&chart, a)?;
    let c = CompiledForm::new(a);
    let f = |u: [f64; 2]| {
        let [t1, t2] = chart.tangents(u);
        c.eval(&chart.point(u), &[&t1, &t2])
    };
    let quadrature = quadrature(&chart, &f, &[], 1e-10);
    let monte_carlo = monte_carlo(&chart, &f, mc_grid, seed);
    let agree = (quadrature.value - monte_carlo.value).abs() <= quadrature.error + monte_carlo.error + 1e-12;
    let ambient_bound_holds = probe_grid(&chart, 24).into_iter().all(|u| {
        let x = chart.point(u);
        let mu = chart.liouville_density(u).abs();
        if mu < 1e-12 {
            return true;
        }
        let pointwise = f(u).abs() / mu;
        let ambient: f64 = c
            .comps
            .iter()
            .map(|(_, t)| eval_terms(t, &x).powi(2))
            .sum::<f64>()
            .sqrt();
        pointwise <= ambient * (1.0 + 1e-9) + 1e-12
    });
    Ok(IntegrationReport { example: chart.example.clone(), quadrature, monte_carlo, agree, ambient_bound_holds, seed })
}

fn probe_grid(chart: &QuotientChart, m: usize) -> Vec<[f64; 2]> {
    let [(a, b), (c, d)] = chart.bounds;
    (0..m)
        .flat_map(|i| (0..m).map(move |j| [a + (b - a) * (i as f64 + 0.5) / m as f64, c + (d - c) * (j as f64 + 0.5) / m as f64]))
        .collect()
}

/// Maximal relative gap between Liouville and Riemannian densities at probe points.
pub fn density_consistency(action: &LinearAction, probes: usize, seed: u64) -> Result<f64> {
    let chart = QuotientChart::for_action(action)?;
    let [(a, b), (c, d)] = chart.bounds;
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let u = [a + (b - a) * r.gen_range(0.01..0.99), c + (d - c) * r.gen::<f64>()];
        let (l, g) = (chart.liouville_density(u), chart.riemannian_density(u));
        worst = worst.max((l - g).abs() / g.abs().max(1e-300));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct StokesReport {
    pub example: String,
    /// `k` of the cutoff `χ_k`, absent without singular points.
    pub cutoff_index: Option<u32>,
    pub quadrature_residual: f64,
    pub quadrature_normalizer: f64,
    pub quadrature_ratio: f64,
    pub monte_carlo_residual: f64,
    pub monte_carlo_normalizer: f64,
    pub monte_carlo_ratio: f64,
    pub samples: usize,
    pub seed: u64,
}

impl StokesReport {
    pub fn passes(&self, mc_tol: f64, quad_tol: f64) -> bool {
        self.monte_carlo_ratio < mc_tol && self.quadrature_ratio < quad_tol
    }
}

/// `|∫ dγ| / ∫ |dγ| μ` for `γ = χ_k β` with `β` a basic `1`-form.
pub fn stokes_check(action: &LinearAction, beta: &Form, cutoff: &CutoffFamily, k: u32, mc_grid: usize, seed: u64) -> Result<StokesReport> {
    let chart = QuotientChart::for_action(action)?;
    if beta.degree() != 1 {
        return Err(Error::Degree(format!("γ must be a 1-form on {}; got degree {}", chart.example, beta.degree())));
    }
    let b = CompiledForm::new(beta);
    let db = CompiledForm::new(&beta.d());
    let singular = chart.has_singular_point();
    let kf = k as f64;
    // d(χ_k β)(∂₁, ∂₂) = χ_k' δ' β(∂₂) + χ_k dβ(∂₁, ∂₂)
    let f = |u: [f64; 2]| {
        let x = chart.point(u);
        let [t1, t2] = chart.tangents(u);
        let body = db.eval(&x, &[&t1, &t2]);
        match chart.singular_distance(u[0]).filter(|_| singular) {
            Some((r, dr)) => {
                let chi = cutoff.chi(kf, r);
                let dchi = cutoff.profile_derivative(kf * r) * kf * dr;
                let edge = if dchi == 0.0 { 0.0 } else { dchi * b.eval(&x, &[&t2]) };
                edge + chi * body
            }
            None => body,
        }
    };
    let abs = |u: [f64; 2]| f(u).abs();
    let breaks = if singular { cutoff.breakpoints(&chart, kf) } else { vec![] };
    let qa = quadrature(&chart, &abs, &breaks, 1e-8);
    let q = quadrature(&chart, &f, &breaks, 1e-11 * qa.value.max(1e-300));
    let [m, ma] = monte_carlo_n(&chart, &|u| {
        let v = f(u);
        [v, v.abs()]
    }, mc_grid, seed);
    let ratio = |v: f64, n: f64| if n == 0.0 { 0.0 } else { v.abs() / n };
    Ok(StokesReport {
        example: chart.example.clone(),
        cutoff_index: singular.then_some(k),
        quadrature_residual: q.value.abs(),
        quadrature_normalizer: qa.value,
        quadrature_ratio: ratio(q.value, qa.value),
        monte_carlo_residual: m.value.abs(),
        monte_carlo_normalizer: ma.value,
        monte_carlo_ratio: ratio(m.value, ma.value),
        samples: mc_grid * mc_grid,
        seed,
    })
}

/// `∫ χ_k μ` (or `∫ (1 − χ_k) μ` when `complement`).
fn cutoff_volume(chart: &QuotientChart, cutoff: &CutoffFamily, k: f64, complement: bool) -> Estimate {
    let f = |u: [f64; 2]| {
        let mu = chart.liouville_density(u);
        let chi = chart.singular_distance(u[0]).map_or(1.0, |(r, _)| cutoff.chi(k, r));
        if complement {
            (1.0 - chi) * mu
        } else {
            chi * mu
        }
    };
    let breaks = if chart.has_singular_point() { cutoff.breakpoints(chart, k) } else { vec![] };
    let mut b = breaks.clone();
    // integrand vanishes beyond the support; split there as well
    if complement {
        b.extend(chart.radius_to_parameter(cutoff.stretch / k));
    }
    quadrature(chart, &f, &b, 1e-13)
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport {
    pub example: String,
    pub ks: Vec<u32>,
    /// `vol(X_prin ∖ S_k)` measured as `∫ χ_k μ`.
    pub volumes: Vec<f64>,
    pub errors: Vec<f64>,
    pub monotone: bool,
    pub last_relative_increment: f64,
    /// Richardson limit assuming `vol(S_k) ∝ k⁻²`.
    pub extrapolated: f64,
    pub total: f64,
}

pub fn volume_finiteness(action: &LinearAction, cutoff: &CutoffFamily, kmax: u32) -> Result<VolumeReport> {
    let chart = QuotientChart::for_action(action)?;
    if !chart.compact {
        return Err(Error::Integration(format!("{} is not compact", chart.example)));
    }
    let kmax = kmax.max(1);
    let ks: Vec<u32> = (1..=kmax).collect();
    let est: Vec<Estimate> = ks.par_iter().map(|&k| cutoff_volume(&chart, cutoff, k as f64, false)).collect();
    let volumes: Vec<f64> = est.iter().map(|e| e.value).collect();
    let errors: Vec<f64> = est.iter().map(|e| e.error).collect();
    let monotone = volumes.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let n = volumes.len();
    let last_relative_increment = if n > 1 { (volumes[n - 1] - volumes[n - 2]).abs() / volumes[n - 1].abs() } else { 0.0 };
    let extrapolated = if n > 1 {
        let (a, b) = ((n as f64).powi(2), ((n - 1) as f64).powi(2));
        (a * volumes[n - 1] - b * volumes[n - 2]) / (a - b)
    } else {
        volumes[0]
    };
    let total = quadrature(&chart, &|u| chart.liouville_density(u), &[], 1e-13).value;
    Ok(VolumeReport { example: chart.example.clone(), ks, volumes, errors, monotone, last_relative_increment, extrapolated, total })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeScalingReport {
    pub example: String,
    pub ks: Vec<u32>,
    /// `vol(S_k)_prin` measured as `∫ (1 − χ_k) μ`.
    pub volumes: Vec<f64>,
    pub slope: f64,
    pub expected: f64,
    pub stretch: f64,
}

/// Least-squares slope of `log vol(S_k)` against `log k` over `k = 1..=kmax`.
pub fn cone_scaling_experiment(action: &LinearAction, cutoff: &CutoffFamily, kmax: u32) -> Result<ConeScalingReport> {
    let chart = QuotientChart::for_action(action)?;
    if !chart.has_singular_point() {
        return Err(Error::Integration(format!("{} has no singular stratum", chart.example)));
    }
    let ks: Vec<u32> = (1..=kmax.max(2)).collect();
    let volumes: Vec<f64> = ks.par_iter().map(|&k| cutoff_volume(&chart, cutoff, k as f64, true).value).collect();
    let xs: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
    let ys: Vec<f64> = volumes.iter().map(|v| v.ln()).collect();
    Ok(ConeScalingReport {
        example: chart.example.clone(),
        slope: least_squares_slope(&xs, &ys),
        ks,
        volumes,
        // the singular set is a point of a 2-dimensional quotient
        expected: -2.0,
        stretch: cutoff.stretch,
    })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingReport {
    pub example: String,
    pub k: usize,
    pub n: usize,
    /// `∫ ω^k ∧ ω^{n−k} / n!`.
    pub value: f64,
    pub error: f64,
    pub oracle: Option<f64>,
    pub nonzero: bool,
}

/// Pairs `ω^k` with `ω^{n−k}`; a nonzero value certifies both classes nonzero.
pub fn symplectic_class_pairing(action: &LinearAction, k: usize, mc_grid: usize, seed: u64) -> Result<PairingReport> {
    let chart = QuotientChart::for_action(action)?;
    if !chart.compact {
        return Err(Error::Integration(format!("{} is not compact", chart.example)));
    }
    let n = 1;
    if k > n {
        return Err(Error::Degree(format!("k = {k} exceeds n = {n}")));
    }
    let omega = action.omega();
    let power = |e: usize| (0..e).fold(Form::constant(action.layout(), crate::poly::q(1)), |acc, _| acc.wedge(&omega));
    let top = power(k).wedge(&power(n - k));
    let rep = integrate(action, &top, mc_grid, seed)?;
    let error = rep.quadrature.error + rep.monte_carlo.error;
    let oracle = match &action.group {
        GroupDatum::Torus { weights } => {
            Some(duistermaat_heckman(weights[0][0] as f64, weights[0][1] as f64, -to_f64(&action.level[0])))
        }
        _ => None,
    };
    Ok(PairingReport {
        example: chart.example.clone(),
        k,
        n,
        value: rep.quadrature.value,
        error,
        oracle,
        nonzero: rep.quadrature.value.abs() > error && rep.agree,
    })
}

/// CSV table `k,volume,error` for plotting.
pub fn volume_csv(r: &VolumeReport) -> String {
    let mut out = String::from("k,volume,error\n");
    for ((k, v), e) in r.ks.iter().zip(&r.volumes).zip(&r.errors) {
        out.push_str(&format!("{k},{v:.15e},{e:.3e}\n"));
    }
    out
}

pub fn scaling_csv(r: &ConeScalingReport) -> String {
    let mut out = String::from("k,volume\n");
    for (k, v) in r.ks.iter().zip(&r.volumes) {
        out.push_str(&format!("{k},{v:.15e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::builtin;

    #[test]
    fn profile_is_c2_ramp() {
        let c = CutoffFamily::default();
        assert_eq!(c.profile(0.2), 0.0);
        assert_eq!(c.profile(1.5), 1.0);
        assert!((c.profile(0.625) - 0.5).abs() < 1e-15);
        let h = 1e-6;
        let num = (c.profile(0.5 + h) - c.profile(0.5 - h)) / (2.0 * h);
        assert!((num - c.profile_derivative(0.5)).abs() < 1e-6);
    }

    #[test]
    fn gauss_kronrod_on_polynomials_and_kinks() {
        let (v, e) = adaptive(|x| x.powi(5), 0.0, 2.0, &[], 1e-12);
        assert!((v - 64.0 / 6.0).abs() < 1e-12 && e < 1e-10);
        let (v, _) = adaptive(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], 1e-12);
        assert!((v - 0.29).abs() < 1e-12);
    }

    #[test]
    fn densities_agree() {
        for a in crate::actions::all_builtins() {
            assert!(density_consistency(&a, 200, 1).unwrap() < 1e-9, "{}", a.name);
        }
    }

    #[test]
    fn distances_match_cone_geometry() {
        let cone = QuotientChart::for_action(&builtin("cone11", 0).unwrap()).unwrap();
        assert!((cone.singular_distance(0.5).unwrap().0 - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        let tear = QuotientChart::for_action(&builtin("teardrop", 0).unwrap()).unwrap();
        let s = tear.radius_to_parameter(0.3).unwrap();
        assert!((tear.singular_distance(s).unwrap().0 - 0.3).abs() < 1e-12);
        assert!(QuotientChart::for_action(&builtin("cp1", 0).unwrap()).unwrap().singular_distance(0.2).is_none());
    }

    #[test]
    fn zero_form_integrates_to_zero() {
        let a = builtin("cp1", 0).unwrap();
        let r = integrate(&a, &Form::zero(a.layout(), 2), 20, 1).unwrap();
        assert_eq!(r.quadrature.value, 0.0);
        assert!(integrate(&a, &Form::zero(a.layout(), 1), 20, 1).is_err());
    }

    #[test]
    fn cyclic_cone_scaling_is_exact() {
        let a = builtin("zk-cone", 4).unwrap();
        let r = cone_scaling_experiment(&a, &CutoffFamily::default(), 8).unwrap();
        assert!((r.slope + 2.0).abs() < 1e-8, "{}", r.slope);
        assert!(cone_scaling_experiment(&builtin("cp1", 0).unwrap(), &CutoffFamily::default(), 4).is_err());
    }
}
