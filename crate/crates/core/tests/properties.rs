//! Property tests for the algebraic and geometric invariants.

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use sympq_core::actions::{all_builtins, builtin, LinearAction};
use sympq_core::form::{Form, PolyMap, VectorField};
use sympq_core::homotopy::{kappa, Homotopy};
use sympq_core::induction::{circle_bundle, cyclic_bundle, verify_extension_lemma};
use sympq_core::integration::QuotientChart;
use sympq_core::linalg::rank;
use sympq_core::model::{Filtration, Model};
use sympq_core::poly::{q, qr, Layout, Poly, Q};
use sympq_core::quotient::{in_ideal, is_phi_basic, quotient_basis, SamplingPolicy};
use sympq_core::random::{self, combination, rng, small_rational};
use sympq_core::stratification::{locate, sample_points, strata_of_z};

fn layout_for(code: u8) -> Layout {
    match code % 6 {
        0 => Layout::linear(2),
        1 => Layout::linear(3),
        2 => Layout::linear(4),
        3 => Layout::linear(6),
        4 => Layout::linear(8),
        _ => Layout::with_angles(2, 1),
    }
}

/// `L_X(c dx_I) = X(c) dx_I + c Σₚ dx_{i₁} ∧ … ∧ d(X_{iₚ}) ∧ …`, written out independently of Cartan.
fn lie_oracle(a: &Form, x: &VectorField) -> Form {
    let l = a.layout();
    let mut out = Form::zero(l, a.degree());
    for (idx, c) in a.components() {
        let mut xc = Poly::zero(l);
        for (j, xj) in x.components().iter().enumerate() {
            xc += &(xj * &c.partial(j));
        }
        out = out.add(&Form::monomial(l, idx, xc).unwrap());
        for p in 0..idx.len() {
            let mut term = Form::function(c.clone());
            for (r, &i) in idx.iter().enumerate() {
                let factor = if r == p { Form::function(x.components()[i].clone()).d() } else { Form::dx(l, i) };
                term = term.wedge(&factor);
            }
            out = out.add(&term);
        }
    }
    out
}

fn rational_point(r: &mut random::Rng64, n: usize) -> Vec<Q> {
    (0..n).map(|_| small_rational(r)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn d_squared_vanishes(seed: u64, code: u8, k in 0usize..9, deg in 0u32..=6) {
        let l = layout_for(code);
        let a = random::form(&mut rng(seed), l, k.min(l.dim()), deg, 3);
        prop_assert!(a.d().d().is_zero());
    }

    #[test]
    fn wedge_is_associative_and_graded_commutative(seed: u64, code: u8) {
        let l = layout_for(code);
        let mut r = rng(seed);
        let (ka, kb, kc) = (r.gen_range(0..=l.dim()), r.gen_range(0..=l.dim()), r.gen_range(0..=2));
        let a = random::form(&mut r, l, ka, 3, 3);
        let b = random::form(&mut r, l, kb, 3, 3);
        let c = random::form(&mut r, l, kc.min(l.dim()), 2, 2);
        prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
        let sign = if ka * kb % 2 == 1 { q(-1) } else { q(1) };
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(&sign));
    }

    #[test]
    fn cartan_formula(seed: u64, code: u8) {
        let l = layout_for(code);
        let mut r = rng(seed);
        let k = r.gen_range(0..=l.dim());
        let a = random::form(&mut r, l, k, 3, 3);
        let x = random::vector_field(&mut r, l, 2, 2);
        prop_assert_eq!(a.lie(&x), lie_oracle(&a, &x));
    }

    #[test]
    fn pullback_commutes_with_d_and_wedge(seed: u64, ns in 1usize..4, nt in 1usize..4) {
        let (s, t) = (Layout::linear(ns), Layout::linear(nt));
        let mut r = rng(seed);
        let f = random::poly_map(&mut r, s, t, 2, 2);
        let (ka, kb) = (r.gen_range(0..=nt), r.gen_range(0..=nt));
        let a = random::form(&mut r, t, ka, 2, 2);
        let b = random::form(&mut r, t, kb, 2, 2);
        prop_assert_eq!(a.d().pullback(&f), a.pullback(&f).d());
        prop_assert_eq!(a.wedge(&b).pullback(&f), a.pullback(&f).wedge(&b.pullback(&f)));
    }

    #[test]
    fn evaluation_is_alternating_and_multilinear(seed: u64, code: u8) {
        let l = layout_for(code);
        prop_assume!(l.angles == 0);
        let mut r = rng(seed);
        let k = r.gen_range(1..=l.dim().min(3));
        let a = random::form(&mut r, l, k, 2, 3);
        let x = rational_point(&mut r, l.dim());
        let mut vs: Vec<Vec<Q>> = (0..k).map(|_| rational_point(&mut r, l.dim())).collect();
        let base = a.evaluate(&x, &vs);
        if k >= 2 {
            let mut swapped = vs.clone();
            swapped.swap(0, 1);
            prop_assert_eq!(a.evaluate(&x, &swapped), -base.clone());
            let mut repeated = vs.clone();
            repeated[1] = repeated[0].clone();
            prop_assert!(a.evaluate(&x, &repeated).is_zero());
        }
        let w = rational_point(&mut r, l.dim());
        let c = small_rational(&mut r);
        let mut with_w = vs.clone();
        with_w[0] = w.clone();
        let other = a.evaluate(&x, &with_w);
        vs[0] = vs[0].iter().zip(&w).map(|(v, w)| v + &c * w).collect();
        prop_assert_eq!(a.evaluate(&x, &vs), base + c * other);
    }

    #[test]
    fn json_tree_round_trips(seed: u64, code: u8) {
        let l = layout_for(code);
        let mut r = rng(seed);
        let k = r.gen_range(0..=l.dim());
        let a = random::form(&mut r, l, k, 3, 4);
        prop_assert_eq!(Form::from_json(&a.to_json()).unwrap(), a);
    }
}

fn action_for(code: u8) -> LinearAction {
    let all = all_builtins();
    all[code as usize % all.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneous_euler_identity(seed: u64, n in 1usize..4, p in 0u32..4) {
        let l = Layout::linear(n);
        let mut r = rng(seed);
        let k = r.gen_range(0..=n);
        prop_assume!(p + k as u32 > 0);
        // only monomials of coefficient degree exactly p
        let raw = random::form(&mut r, l, k, p, 4);
        let g = Form::from_components(l, k, raw.components().map(|(i, c)| {
            let c = Poly::from_terms(l, c.terms().filter(|(m, _)| m.degree() == p).map(|(m, v)| (m.clone(), v.clone())));
            (i.clone(), c)
        })).unwrap();
        let h = Homotopy::radial(n);
        let kg = kappa(&h, &g);
        prop_assert!(kg.is_zero() || kg.degree() + 1 == k);
        prop_assert_eq!(kappa(&h, &g.d()).add(&kg.d()), g);
    }

    #[test]
    fn torus_fields_are_symplectic(code: u8) {
        let a = action_for(code);
        let w = a.omega();
        prop_assert!(a.is_invariant(&w));
        for xi in a.basis_fields() {
            prop_assert!(w.lie(&xi).is_zero());
        }
        if let Ok(m) = a.moment_map() {
            for phi in m.components {
                prop_assert!(a.is_invariant(&Form::function(phi)));
            }
        }
    }

    #[test]
    fn averaging_is_an_idempotent_projection(seed: u64, k in 0u32..7) {
        let a = builtin("zk-cone", [2, 3, 4, 6][(seed % 4) as usize]).unwrap();
        let mut r = rng(seed);
        let deg = r.gen_range(0..=2);
        let f = random::form(&mut r, a.layout(), deg, k.min(4), 3);
        let avg = a.average(&f).unwrap();
        prop_assert!(a.is_invariant(&avg));
        prop_assert_eq!(a.average(&avg).unwrap(), avg);
    }

    #[test]
    fn stratum_samples_locate_and_stay_tangent(code: u8, seed: u64) {
        let a = action_for(code);
        let strat = strata_of_z(&a);
        let moments: Vec<Form> = a.moment().into_iter().map(|p| Form::function(p).d()).collect();
        for s in &strat.strata {
            for sample in sample_points(&a, &strat, s.id, 3, seed).unwrap() {
                prop_assert_eq!(locate(&strat, &a, &sample.point), Some(s.id));
                for v in &sample.tangent_basis {
                    for dphi in &moments {
                        prop_assert!(dphi.evaluate(&sample.point, std::slice::from_ref(v)).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn densities_agree(code: u8, s in 0.01f64..0.99, t in 0.01f64..0.99) {
        let a = action_for(code);
        let chart = QuotientChart::for_action(&a).unwrap();
        let [(a0, a1), (b0, b1)] = chart.bounds;
        let u = [a0 + s * (a1 - a0), b0 + t * (b1 - b0)];
        let (l, g) = (chart.liouville_density(u), chart.riemannian_density(u));
        prop_assert!((l - g).abs() <= 1e-9 * l.abs().max(1.0), "{} vs {}", l, g);
    }

    #[test]
    fn projection_changes_e_but_not_the_verdicts(seed: u64, c in -3i64..4) {
        let base = circle_bundle(vec![1], qr(1, 2)).unwrap();
        let other = base.with_projection(vec![q(1), q(c)]).unwrap();
        let mut r = rng(seed);
        let l = base.fibre_layout();
        let x = Poly::var(l, 0);
        let y = Poly::var(l, 1);
        let a = Form::dx(l, 1).mul_function(&x).sub(&Form::dx(l, 0).mul_function(&y));
        prop_assert_ne!(base.extension(&a).unwrap(), other.extension(&a).unwrap());
        prop_assert!(verify_extension_lemma(&other, 3, 2, &mut r).unwrap().passed);
    }
}

#[test]
fn principal_stratum_is_the_unique_maximum() {
    for a in all_builtins() {
        let strat = strata_of_z(&a);
        let p = strat.principal().expect("principal stratum");
        assert_eq!(strat.strata.iter().filter(|s| s.is_principal).count(), 1);
        for s in &strat.strata {
            assert!(strat.leq(s.id, p.id), "{}", a.name);
            assert!(s.dimension <= p.dimension);
        }
    }
}

#[test]
fn stratum_dimension_matches_a_rank_count() {
    // dim = dim V^H − rank(dΦ restricted to V^H), at ten samples per stratum
    for a in all_builtins() {
        let strat = strata_of_z(&a);
        let dphi: Vec<Form> = a.moment().into_iter().map(|p| Form::function(p).d()).collect();
        for s in &strat.strata {
            for sample in sample_points(&a, &strat, s.id, 10, 5).unwrap() {
                let cols: Vec<Vec<Q>> = s
                    .fixed_basis
                    .iter()
                    .map(|v| dphi.iter().map(|f| f.evaluate(&sample.point, std::slice::from_ref(v))).collect())
                    .collect();
                let r = if dphi.is_empty() { 0 } else { rank(&cols, dphi.len()) };
                assert_eq!(s.fixed_basis.len() - r, s.dimension, "{} stratum {}", a.name, s.id);
                assert_eq!(sample.tangent_basis.len(), s.dimension);
            }
        }
    }
}

fn small_policy(seed: u64) -> SamplingPolicy {
    SamplingPolicy::with_seed(seed).with_cap(40)
}

#[test]
fn basic_and_ideal_are_closed_under_d() {
    let mut r = rng(17);
    for a in all_builtins() {
        let l = a.layout();
        for k in 0..2 * a.n() {
            let reps: Vec<Form> = quotient_basis(&a, k, 2, &small_policy(3)).unwrap().into_iter().flat_map(|b| b.reps).collect();
            let g = combination(&mut r, l, k, &reps);
            assert!(is_phi_basic(&a, &g.d(), &small_policy(4)).unwrap().member);
            if let Some(phi) = a.moment().first() {
                let inv: Vec<Form> = a.candidate_blocks(k, Filtration::CoefficientDegree, 1).unwrap().into_iter().flat_map(|(_, f)| f).collect();
                let ideal = combination(&mut r, l, k, &inv).mul_function(phi);
                assert!(in_ideal(&a, &ideal, &small_policy(5)).unwrap().member);
                assert!(in_ideal(&a, &ideal.d(), &small_policy(6)).unwrap().member);
            }
        }
    }
}

#[test]
fn ideal_verdicts_do_not_depend_on_the_samples() {
    let mut r = rng(23);
    for name in ["cp1", "cone11"] {
        let a = builtin(name, 0).unwrap();
        let l = a.layout();
        let phi = a.moment()[0].clone();
        let inv: Vec<Form> = a.candidate_blocks(1, Filtration::CoefficientDegree, 2).unwrap().into_iter().flat_map(|(_, f)| f).collect();
        for i in 0..500 {
            let mut g = combination(&mut r, l, 1, &inv);
            if i % 2 == 0 {
                g = g.mul_function(&phi);
            }
            let v1 = in_ideal(&a, &g, &SamplingPolicy::with_seed(1000 + i).with_cap(12)).unwrap().member;
            let v2 = in_ideal(&a, &g, &SamplingPolicy::with_seed(9000 + i).with_cap(12)).unwrap().member;
            assert_eq!(v1, v2, "{name} {g}");
        }
    }
}

#[test]
fn constants_survive_in_degree_zero() {
    for a in all_builtins() {
        let b = quotient_basis(&a, 0, 2, &small_policy(1)).unwrap();
        let reps: Vec<Form> = b.into_iter().flat_map(|b| b.reps).collect();
        assert!(!reps.is_empty());
        assert!(is_phi_basic(&a, &Form::constant(a.layout(), Q::one()), &small_policy(2)).unwrap().member);
    }
}

#[test]
fn cyclic_extension_lemma_with_every_order() {
    let mut r = rng(2);
    for k in [2, 3, 4, 6] {
        assert!(verify_extension_lemma(&cyclic_bundle(k).unwrap(), 10, 2, &mut r).unwrap().passed, "k = {k}");
    }
}

#[test]
fn identity_pullback_is_identity() {
    let l = Layout::linear(4);
    let a = random::form(&mut rng(1), l, 2, 3, 5);
    assert_eq!(a.pullback(&PolyMap::identity(l)), a);
}
