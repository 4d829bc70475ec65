//! Verification batches behind the `suite` subcommand and the acceptance test.

use std::fmt;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use sympq_core::actions::{all_builtins, builtin, LinearAction};
use sympq_core::error::{Error, Result};
use sympq_core::form::{Form, PolyMap, VectorField};
use sympq_core::homotopy::{chain_homotopy_check, equivariance_identities_check, poincare_verify, random_equivariant_homotopy};
use sympq_core::induction::{circle_bundle, cyclic_bundle, induced_space, verify_extension_lemma, verify_functoriality, verify_reduction_in_stages, BundleSpec};
use sympq_core::integration::{cone_scaling_experiment, stokes_check, symplectic_class_pairing, volume_finiteness, CutoffFamily};
use sympq_core::model::{Filtration, Frame, Model, Sample};
use sympq_core::poly::{q, qr, Layout, Poly};
use sympq_core::quotient::{cohomology_with, quotient_basis, SamplingPolicy, DEFAULT_SEED};
use sympq_core::random::{self, combination, rng, Rng64};
use sympq_core::stratification::{sample_points, strata_of_z};

pub const SUITES: [&str; 7] = ["poincare", "stokes", "restrict", "induction", "appendix", "cohomology", "all"];

/// Run configuration; every field has a default so a config file may be partial.
#[derive(Debug, Clone)]
pub struct Config {
    /// Restricts a suite to one example instead of its default list.
    pub example: Option<LinearAction>,
    pub max_degree: u32,
    /// Monte Carlo sample count.
    pub samples: usize,
    /// Randomized cases per batch.
    pub cases: Option<usize>,
    pub seed: u64,
    pub kmax: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config { example: None, max_degree: 8, samples: 1_000_000, cases: None, seed: DEFAULT_SEED, kmax: 32 }
    }
}

impl Config {
    pub fn mc_grid(&self) -> usize {
        ((self.samples as f64).sqrt().round() as usize).max(2)
    }

    fn examples(&self, defaults: &[&str]) -> Vec<LinearAction> {
        match &self.example {
            Some(a) => vec![a.clone()],
            None => defaults.iter().map(|n| builtin(n, 3).expect("built-in")).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: Value) -> Self {
        Check { name: name.into(), passed, detail }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", if self.passed { "PASS" } else { "FAIL" }, self.name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// `L_X` from the coordinate formula `L_X(c dx_I) = X(c) dx_I + c Σ dx_{i₁} ∧ … ∧ dX_{iₚ} ∧ …`.
pub fn lie_by_components(a: &Form, x: &VectorField) -> Form {
    let l = a.layout();
    let dx: Vec<Form> = x.components().iter().map(|c| Form::function(c.clone()).d()).collect();
    let mut out = Form::zero(l, a.degree());
    for (idx, c) in a.components() {
        let mut xc = Poly::zero(l);
        for (j, xj) in x.components().iter().enumerate() {
            xc += &(xj * &c.partial(j));
        }
        out = out.add(&Form::monomial(l, idx, xc).expect("indices"));
        for p in 0..idx.len() {
            let mut term = Form::function(c.clone());
            for (r, &i) in idx.iter().enumerate() {
                let factor = if r == p { dx[i].clone() } else { Form::dx(l, i) };
                term = term.wedge(&factor);
            }
            out = out.add(&term);
        }
    }
    out
}

fn random_layout(r: &mut Rng64) -> Layout {
    match r.gen_range(0..4) {
        0 => Layout::linear(2),
        1 => Layout::linear(3),
        2 => Layout::linear(4),
        _ => Layout::with_angles(2, 1),
    }
}

/// d² = 0, wedge associativity and graded commutativity, the Cartan formula,
/// and functoriality of pullback, each on `cases` random inputs.
pub fn check_algebra(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let (mut dd, mut assoc, mut comm, mut cartan, mut functor, mut leibniz) = (0, 0, 0, 0, 0, 0);
    for _ in 0..cases {
        let l = random_layout(&mut r);
        let dim = l.dim();
        let (ka, kb, kc) = (r.gen_range(0..=dim), r.gen_range(0..=dim), r.gen_range(0..=dim));
        let a = random::form(&mut r, l, ka, 3, 3);
        let b = random::form(&mut r, l, kb, 3, 3);
        let c = random::form(&mut r, l, kc, 2, 2);
        dd += a.d().d().is_zero() as usize;
        let left = a.wedge(&b).wedge(&c);
        let right = a.wedge(&b.wedge(&c));
        assoc += (left == right) as usize;
        let sign = if ka * kb % 2 == 1 { q(-1) } else { q(1) };
        comm += (a.wedge(&b) == b.wedge(&a).scale(&sign)) as usize;
        let lead = if ka % 2 == 1 { q(-1) } else { q(1) };
        leibniz += (a.wedge(&b).d() == a.d().wedge(&b).add(&a.wedge(&b.d()).scale(&lead))) as usize;
        let x = random::vector_field(&mut r, l, 2, 2);
        cartan += (a.lie(&x) == lie_by_components(&a, &x)) as usize;
        // (g ∘ f)^* = f^* g^* and d f^* = f^* d on linear layouts
        let (s, m, t) = (Layout::linear(r.gen_range(1..=3)), Layout::linear(r.gen_range(1..=3)), Layout::linear(r.gen_range(1..=3)));
        let f = random::poly_map(&mut r, s, m, 2, 2);
        let g = random::poly_map(&mut r, m, t, 2, 2);
        let k = r.gen_range(0..=t.dim());
        let w = random::form(&mut r, t, k, 2, 2);
        let composed = g.compose(&f).expect("dims");
        functor += (w.pullback(&composed) == w.pullback(&g).pullback(&f) && w.d().pullback(&g) == w.pullback(&g).d()) as usize;
    }
    let all = [dd, assoc, comm, leibniz, cartan, functor].iter().all(|&n| n == cases);
    Check::new(
        "exact algebra identities",
        all,
        json!({"cases": cases, "d_squared": dd, "wedge_associative": assoc, "graded_commutative": comm,
               "leibniz": leibniz, "cartan": cartan, "pullback_functorial": functor}),
    )
}

/// `dΦ^ξ = i(ξ_M)ω` for every built-in action and basis `ξ`.
pub fn check_moment() -> Check {
    let mut detail = Vec::new();
    let mut all = true;
    for a in all_builtins() {
        let rep = a.verify_moment_condition();
        let ok = rep.holds;
        all &= ok;
        detail.push(json!({"example": a.name, "holds": ok, "per_component": rep.per_component}));
    }
    Check::new("moment identity", all, Value::Array(detail))
}

/// Φ-basic forms are horizontal on every lower stratum and ideal elements restrict to zero there.
pub fn check_restrict(action: &LinearAction, forms: usize, points: usize, seed: u64) -> Result<Check> {
    let mut r = rng(seed);
    let strat = strata_of_z(action);
    let lower: Vec<usize> = strat.lower_strata().map(|s| s.id).collect();
    let policy = SamplingPolicy::with_seed(seed).with_cap(60);
    let top = 2 * action.n();
    let reps: Vec<Vec<Form>> = (0..=top)
        .map(|k| quotient_basis(action, k, 3, &policy).map(|bs| bs.into_iter().flat_map(|b| b.reps).collect()))
        .collect::<Result<_>>()?;
    let invariant: Vec<Vec<Form>> = (0..=top)
        .map(|k| {
            action
                .candidate_blocks(k, Filtration::CoefficientDegree, 2)
                .map(|bs| bs.into_iter().flat_map(|(_, f)| f).collect())
        })
        .collect::<Result<_>>()?;
    let moment = action.moment();
    let l = action.layout();
    let random_ideal = |r: &mut Rng64, k: usize| -> Form {
        if moment.is_empty() {
            return Form::zero(l, k);
        }
        let phi = &moment[r.gen_range(0..moment.len())];
        let mut out = combination(r, l, k, &invariant[k]).mul_function(phi);
        if k > 0 {
            let dphi = Form::function(phi.clone()).d();
            out = out.add(&dphi.wedge(&combination(r, l, k - 1, &invariant[k - 1])));
        }
        out
    };
    let fields = action.basis_fields();
    let mut frames: Vec<Frame> = Vec::new();
    for &s in &lower {
        for p in sample_points(action, &strat, s, points, seed)? {
            frames.push(Frame::new(Sample { values: p.point, tangent: p.tangent_basis }, &fields, l));
        }
    }
    let (mut basic_ok, mut ideal_ok) = (0, 0);
    for _ in 0..forms {
        let k = r.gen_range(0..=top);
        let basic = combination(&mut r, l, k, &reps[k]).add(&random_ideal(&mut r, k));
        let ideal = random_ideal(&mut r, k);
        let (b_ok, i_ok) = frames
            .par_iter()
            .map(|f| (f.contract(&basic).iter().all(Zero::is_zero), f.restrict(&ideal).iter().all(Zero::is_zero)))
            .reduce(|| (true, true), |a, b| (a.0 && b.0, a.1 && b.1));
        basic_ok += b_ok as usize;
        ideal_ok += i_ok as usize;
    }
    let evaluations = 2 * forms * frames.len();
    Ok(Check::new(
        format!("restriction to lower strata ({})", action.name),
        basic_ok == forms && ideal_ok == forms,
        json!({"example": action.name, "lower_strata": lower, "forms": forms, "points": points,
               "basic_horizontal": basic_ok, "ideal_vanishes": ideal_ok, "evaluations": evaluations}),
    ))
}

/// `F₁^* − F₀^* = κd + dκ` and the equivariance identities on random pairs.
pub fn check_homotopy(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let actions = all_builtins();
    let (mut chain, mut group, mut contraction) = (0, 0, 0);
    for i in 0..cases {
        let a = &actions[i % actions.len()];
        let f = random_equivariant_homotopy(a, &mut r);
        let k = r.gen_range(0..=a.layout().dim());
        let gamma = random::form(&mut r, a.layout(), k, 2, 3);
        chain += chain_homotopy_check(&f, &gamma) as usize;
        let eq = equivariance_identities_check(&f, &gamma, a);
        group += eq.group as usize;
        contraction += eq.contraction as usize;
    }
    Check::new(
        "chain homotopy and equivariance identities",
        chain == cases && group == cases && contraction == cases,
        json!({"cases": cases, "chain_homotopy": chain, "group": group, "contraction": contraction}),
    )
}

/// Poincaré lemma at truncation `max`, stable at `max + 2`.
pub fn check_poincare(action: &LinearAction, max: u32, seed: u64) -> Result<Check> {
    let rep = poincare_verify(action, max, &SamplingPolicy::with_seed(seed))?;
    let mut expected = vec![0; rep.betti.len()];
    expected[0] = 1;
    let passed = rep.passed && rep.betti == expected && rep.betti_next[..expected.len().min(rep.betti_next.len())] == expected[..expected.len().min(rep.betti_next.len())];
    Ok(Check::new(format!("Poincaré lemma ({}, D = {max})", action.name), passed, serde_json::to_value(&rep)?))
}

/// Reduction in stages for `(S¹, ℤ_k, ℂ)`.
pub fn check_induction(k: u32, max: u32, seed: u64) -> Result<Check> {
    let m = induced_space(&cyclic_bundle(k)?)?;
    let rep = verify_reduction_in_stages(&m, max, &SamplingPolicy::with_seed(seed))?;
    let passed = rep.bijective && rep.chain_map && rep.moment_compatible && rep.d_squared_zero;
    Ok(Check::new(format!("reduction in stages (S¹ ⊃ ℤ{k}, D = {max})"), passed, serde_json::to_value(&rep)?))
}

/// Functoriality maps used by the appendix batch: `(name, source, target, j)`.
pub fn functor_cases() -> Result<Vec<(String, BundleSpec, BundleSpec, PolyMap)>> {
    let mut out = Vec::new();
    let cyc = cyclic_bundle(3)?;
    let fl = cyc.fibre_layout();
    out.push(("identity (ℤ3)".into(), cyc.clone(), cyc.clone(), PolyMap::identity(fl)));
    // a I + b g commutes with g
    let g = match &cyc.fibre.group {
        sympq_core::actions::GroupDatum::Finite { generators, .. } => generators[0].clone(),
        _ => unreachable!(),
    };
    let (a, b) = (q(2), qr(-1, 3));
    let m: Vec<Vec<_>> = (0..2).map(|i| (0..2).map(|j| &g[i][j] * &b + if i == j { a.clone() } else { q(0) }).collect()).collect();
    out.push(("linear a + b g (ℤ3)".into(), cyc.clone(), cyc.clone(), PolyMap::linear_map(2, &m)));
    let circ = circle_bundle(vec![1], qr(1, 2))?;
    let fl = circ.fibre_layout();
    let (x, y) = (Poly::var(fl, 0), Poly::var(fl, 1));
    out.push(("identity (S¹)".into(), circ.clone(), circ.clone(), PolyMap::identity(fl)));
    // multiplication by 2 − 3i
    let lin = vec![&x.scale(&q(2)) + &y.scale(&q(3)), &y.scale(&q(2)) - &x.scale(&q(3))];
    out.push(("complex scalar (S¹)".into(), circ.clone(), circ.clone(), PolyMap::new(fl, fl, lin, vec![]).map_err(|e| Error::Bundle(e.to_string()))?));
    let wide = circle_bundle(vec![1, 0], qr(1, 2))?;
    let rho = &x.pow(2) + &y.pow(2);
    out.push((
        "inclusion p ↦ (p, 0) (S¹)".into(),
        circ.clone(),
        wide.clone(),
        PolyMap::new(fl, wide.fibre_layout(), vec![x.clone(), y.clone(), Poly::zero(fl), Poly::zero(fl)], vec![])?,
    ));
    out.push((
        "nonlinear p ↦ (p, |p|²) (S¹)".into(),
        circ,
        wide.clone(),
        PolyMap::new(fl, wide.fibre_layout(), vec![x, y, rho, Poly::zero(fl)], vec![])?,
    ));
    Ok(out)
}

/// Extension lemma (1)-(3) with the negative control, and functoriality.
pub fn check_appendix(cases: usize, seed: u64) -> Result<Vec<Check>> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for (name, spec) in [("S¹ ⊃ ℤ3, F = ℂ", cyclic_bundle(3)?), ("T² ⊃ S¹, F = ℂ", circle_bundle(vec![1], qr(1, 2))?)] {
        let rep = verify_extension_lemma(&spec, cases, 3, &mut r)?;
        out.push(Check::new(format!("extension lemma ({name})"), rep.passed, serde_json::to_value(&rep)?));
    }
    let fcases = functor_cases()?;
    let per = cases.div_ceil(fcases.len());
    let mut detail = Vec::new();
    let mut all = true;
    for (name, s, t, j) in &fcases {
        let rep = verify_functoriality(s, t, j, per, 2, &mut r)?;
        all &= rep.holds;
        detail.push(json!({"map": name, "cases": rep.cases, "holds": rep.holds}));
    }
    out.push(Check::new("functoriality of the extension", all, Value::Array(detail)));
    Ok(out)
}

/// Random compactly supported `γ = χ_k β` with `β` a combination of basic 1-forms.
pub fn check_stokes(action: &LinearAction, count: usize, samples: usize, seed: u64) -> Result<Check> {
    let policy = SamplingPolicy::with_seed(seed);
    let reps: Vec<Form> = quotient_basis(action, 1, 3, &policy)?.into_iter().flat_map(|b| b.reps).collect();
    let grid = ((samples as f64).sqrt().round() as usize).max(2);
    let mut r = rng(seed);
    let cutoff = CutoffFamily::default();
    let (mut worst_mc, mut worst_quad) = (0.0f64, 0.0f64);
    let mut passed = true;
    for i in 0..count {
        let beta = combination(&mut r, action.layout(), 1, &reps);
        let rep = stokes_check(action, &beta, &cutoff, 1 + (i as u32 % 4), grid, seed.wrapping_add(i as u64))?;
        worst_mc = worst_mc.max(rep.monte_carlo_ratio);
        worst_quad = worst_quad.max(rep.quadrature_ratio);
        passed &= rep.passes(1e-3, 1e-6);
    }
    Ok(Check::new(
        format!("Stokes ({})", action.name),
        passed,
        json!({"example": action.name, "forms": count, "samples": grid * grid, "worst_monte_carlo_ratio": worst_mc, "worst_quadrature_ratio": worst_quad}),
    ))
}

/// `∫ ω` against the Duistermaat–Heckman value.
pub fn check_pairing(action: &LinearAction, samples: usize, seed: u64) -> Result<Check> {
    let grid = ((samples as f64).sqrt().round() as usize).max(2);
    let rep = symplectic_class_pairing(action, 1, grid, seed)?;
    let rel = rep.oracle.map(|o| (rep.value - o).abs() / o.abs());
    let passed = rep.nonzero && rel.is_some_and(|e| e < 5e-3);
    let mut detail = serde_json::to_value(&rep)?;
    detail["relative_error"] = json!(rel);
    Ok(Check::new(format!("symplectic class pairing ({})", action.name), passed, detail))
}

pub fn check_cone_scaling(action: &LinearAction, kmax: u32) -> Result<Check> {
    let rep = cone_scaling_experiment(action, &CutoffFamily::default(), kmax)?;
    let passed = (rep.slope - rep.expected).abs() < 0.05;
    Ok(Check::new(format!("cone scaling ({})", action.name), passed, json!({"example": rep.example, "slope": rep.slope, "expected": rep.expected, "kmax": kmax})))
}

pub fn check_volume(action: &LinearAction, kmax: u32) -> Result<Check> {
    let rep = volume_finiteness(action, &CutoffFamily::default(), kmax)?;
    let passed = rep.monotone && rep.last_relative_increment < 1e-3;
    Ok(Check::new(
        format!("volume finiteness ({})", action.name),
        passed,
        json!({"example": rep.example, "kmax": kmax, "monotone": rep.monotone, "last_relative_increment": rep.last_relative_increment,
               "last_volume": rep.volumes.last(), "extrapolated": rep.extrapolated, "total": rep.total}),
    ))
}

/// Truncated cohomology with its stability check; passes when `d² = 0`.
pub fn check_cohomology(action: &LinearAction, max: u32, seed: u64) -> Result<Check> {
    let filt = action.default_filtration();
    let rep = cohomology_with(action, filt, max, &SamplingPolicy::with_seed(seed), true)?;
    Ok(Check::new(format!("truncated cohomology ({}, D = {max})", action.name), rep.d_squared_zero, serde_json::to_value(&rep)?))
}

fn poincare_suite(c: &Config) -> Result<Vec<Check>> {
    c.examples(&["cone11", "z3-cone"]).iter().map(|a| check_poincare(a, c.max_degree, c.seed)).collect()
}

fn stokes_suite(c: &Config) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let count = c.cases.unwrap_or(20);
    for a in c.examples(&["teardrop", "cp1"]) {
        out.push(check_stokes(&a, count, c.samples, c.seed)?);
        out.push(check_pairing(&a, c.samples, c.seed)?);
    }
    for a in c.examples(&["teardrop", "z3-cone"]) {
        out.push(check_cone_scaling(&a, 64)?);
    }
    for a in c.examples(&["teardrop"]) {
        out.push(check_volume(&a, c.kmax)?);
    }
    Ok(out)
}

fn restrict_suite(c: &Config) -> Result<Vec<Check>> {
    let mut out = vec![check_moment()];
    let forms = c.cases.unwrap_or(500);
    for a in c.examples(&["cp1", "teardrop", "cone11", "z3-cone"]) {
        out.push(check_restrict(&a, forms, 100, c.seed)?);
    }
    Ok(out)
}

fn cohomology_suite(c: &Config) -> Result<Vec<Check>> {
    let cases = c.cases.unwrap_or(1000);
    let mut out = vec![check_algebra(cases, c.seed), check_homotopy(cases, c.seed)];
    let max = c.max_degree.min(4);
    for a in c.examples(&["cp1", "teardrop"]) {
        out.push(check_cohomology(&a, max, c.seed)?);
    }
    Ok(out)
}

/// Runs a named suite; unknown names are a configuration error.
pub fn run_suite(name: &str, config: &Config) -> Result<SuiteReport> {
    let checks = match name {
        "poincare" => poincare_suite(config)?,
        "stokes" => stokes_suite(config)?,
        "restrict" => restrict_suite(config)?,
        "induction" => vec![check_induction(3, config.max_degree.min(6), config.seed)?],
        "appendix" => check_appendix(config.cases.unwrap_or(200), config.seed)?,
        "cohomology" => cohomology_suite(config)?,
        "all" => {
            let mut v = Vec::new();
            for s in &SUITES[..SUITES.len() - 1] {
                v.extend(run_suite(s, config)?.checks);
            }
            v
        }
        other => return Err(Error::UnknownExample(format!("suite `{other}` (expected one of {})", SUITES.join(", ")))),
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { suite: name.to_string(), seed: config.seed, checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_lie_derivative_matches_on_a_rotation() {
        let l = Layout::linear(2);
        let (x, y) = (Poly::var(l, 0), Poly::var(l, 1));
        let rot = VectorField::new(l, vec![-&y, x.clone()]).unwrap();
        let area = Form::dx(l, 0).wedge(&Form::dx(l, 1));
        assert!(lie_by_components(&area, &rot).is_zero());
        let r2 = Form::function(&x.pow(2) + &y.pow(2));
        assert!(lie_by_components(&r2, &rot).is_zero());
        assert_eq!(lie_by_components(&Form::function(x), &rot), Form::function(-&y));
    }

    #[test]
    fn small_batches_pass() {
        assert!(check_algebra(20, 1).passed);
        assert!(check_moment().passed);
        assert!(check_homotopy(8, 2).passed);
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &Config::default()).is_err());
    }
}
