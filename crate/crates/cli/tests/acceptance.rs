//! The eleven acceptance criteria at their stated sizes and tolerances.
//!
//! Run with `cargo test -p sympq-cli --test acceptance -- --nocapture` to see
//! one line per criterion. Oracles live here, computed independently of the
//! library: the moment map from the weights, Duistermaat–Heckman volumes, the
//! cone exponent and the Betti numbers of a contractible quotient.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use serde_json::Value;
use sympq_cli::suite::{self, Check};
use sympq_core::actions::{all_builtins, builtin, GroupDatum};
use sympq_core::form::{Form, VectorField};
use sympq_core::poly::{qr, Layout, Poly, Q};

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    elapsed: Duration,
    budget: Duration,
    summary: String,
}

fn run(id: usize, title: &'static str, budget_secs: u64, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t0 = Instant::now();
    let (passed, summary) = f();
    let elapsed = t0.elapsed();
    let budget = Duration::from_secs(budget_secs);
    Outcome { id, title, passed: passed && elapsed < budget, elapsed, budget, summary }
}

fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn count(c: &Check, key: &str) -> u64 {
    c.detail[key].as_u64().unwrap_or(0)
}

/// `Φ^ξ = −½ Σ wᵢ|zᵢ|² − λ` and `ξ_M = Σ wᵢ(−yᵢ∂xᵢ + xᵢ∂yᵢ)`, built from the weights alone.
fn moment_oracle() -> (bool, String) {
    let mut lines = Vec::new();
    let mut ok = true;
    for a in all_builtins() {
        let GroupDatum::Torus { weights } = &a.group else {
            lines.push(format!("{}: no moment map", a.name));
            continue;
        };
        let l = Layout::linear(2 * a.n());
        let omega = (0..a.n()).fold(Form::zero(l, 2), |acc, i| acc.add(&Form::dx(l, 2 * i).wedge(&Form::dx(l, 2 * i + 1))));
        let lib = a.moment_map().expect("torus moment map");
        for (j, w) in weights.iter().enumerate() {
            let mut phi = Poly::constant(l, -a.level[j].clone());
            let mut comps = vec![Poly::zero(l); 2 * a.n()];
            for (i, &wi) in w.iter().enumerate() {
                let (x, y) = (Poly::var(l, 2 * i), Poly::var(l, 2 * i + 1));
                let wq = Q::from_integer(wi.into());
                phi += &(&x.pow(2) + &y.pow(2)).scale(&(-wq.clone() * qr(1, 2)));
                comps[2 * i] = y.scale(&-wq.clone());
                comps[2 * i + 1] = x.scale(&wq);
            }
            let xi = VectorField::new(l, comps).unwrap();
            let holds = Form::function(phi.clone()).d() == omega.interior(&xi);
            let agrees = lib.components[j] == phi && a.basis_fields()[j] == xi;
            ok &= holds && agrees && a.verify_moment_condition().holds;
            lines.push(format!("{}[{j}]: identity {holds}, library agrees {agrees}", a.name));
        }
    }
    (ok, lines.join("; "))
}

#[test]
fn acceptance() {
    let seed = 7;
    let mut out = Vec::new();

    out.push(run(1, "exact algebra suite (1000 cases each)", 60, || {
        let c = suite::check_algebra(1000, seed);
        let keys = ["d_squared", "wedge_associative", "graded_commutative", "cartan", "pullback_functorial"];
        let ok = keys.iter().all(|k| count(&c, k) == 1000);
        (ok, c.detail.to_string())
    }));

    out.push(run(2, "moment identity dΦ^ξ = i(ξ_M)ω", 1, moment_oracle));

    out.push(run(3, "restriction to lower strata (500 forms, 100 points)", 300, || {
        let checks: Vec<Check> = all_builtins().iter().map(|a| suite::check_restrict(a, 500, 100, seed).unwrap()).collect();
        let ok = all_pass(&checks) && checks.iter().all(|c| count(c, "basic_horizontal") == 500 && count(c, "ideal_vanishes") == 500);
        (ok, checks.iter().map(|c| format!("{}: {}", c.name, c.passed)).collect::<Vec<_>>().join(", "))
    }));

    out.push(run(4, "chain homotopy and equivariance (1000 pairs)", 300, || {
        let c = suite::check_homotopy(1000, seed);
        let ok = ["chain_homotopy", "group", "contraction"].iter().all(|k| count(&c, k) == 1000);
        (ok, c.detail.to_string())
    }));

    out.push(run(5, "Poincaré lemma, cone11 and ℤ3-cone at D = 8 → 10", 600, || {
        let mut ok = true;
        let mut lines = Vec::new();
        for name in ["cone11", "z3-cone"] {
            let c = suite::check_poincare(&builtin(name, 3).unwrap(), 8, seed).unwrap();
            let betti: Vec<u64> = c.detail["betti"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
            let next: Vec<u64> = c.detail["betti_next"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
            // a cone is contractible: (1, 0, 0, …)
            let trivial = |b: &[u64]| b.first() == Some(&1) && b[1..].iter().all(|&x| x == 0);
            let verified = c.detail["primitives_verified"] == c.detail["closed"].as_array().map(|v| {
                let mut v = v.clone();
                v[0] = Value::from(0);
                Value::Array(v)
            }).unwrap();
            ok &= c.passed && trivial(&betti) && trivial(&next) && verified;
            lines.push(format!("{name}: betti {betti:?} → {next:?}, primitives {}", c.detail["primitives_verified"]));
        }
        (ok, lines.join("; "))
    }));

    out.push(run(6, "reduction in stages (S¹ ⊃ ℤ3, F = ℂ) at D = 6", 600, || {
        let c = suite::check_induction(3, 6, seed).unwrap();
        let d = &c.detail;
        let ok = c.passed && d["dims_x"] == d["dims_y"] && d["rank_r"] == d["dims_x"] && d["chain_map"] == Value::Bool(true);
        (ok, format!("dims {} / {}, rank {}", d["dims_x"], d["dims_y"], d["rank_r"]))
    }));

    out.push(run(7, "extension lemma and functoriality (200 cases)", 300, || {
        let checks = suite::check_appendix(200, seed).unwrap();
        let negative = checks.iter().take(2).all(|c| c.detail["negative_control"] == Value::Bool(true));
        (all_pass(&checks) && negative && checks.len() == 3, checks.iter().map(|c| format!("{}: {}", c.name, c.passed)).collect::<Vec<_>>().join(", "))
    }));

    out.push(run(8, "Stokes, 20 forms each on teardrop and cp1 (MC 10⁶, quadrature)", 600, || {
        let mut ok = true;
        let mut lines = Vec::new();
        for name in ["teardrop", "cp1"] {
            let c = suite::check_stokes(&builtin(name, 0).unwrap(), 20, 1_000_000, seed).unwrap();
            let mc = c.detail["worst_monte_carlo_ratio"].as_f64().unwrap();
            let quad = c.detail["worst_quadrature_ratio"].as_f64().unwrap();
            ok &= mc < 1e-3 && quad < 1e-6 && count(&c, "samples") >= 1_000_000;
            lines.push(format!("{name}: MC {mc:.2e}, quadrature {quad:.2e}"));
        }
        (ok, lines.join("; "))
    }));

    out.push(run(9, "∫ω against Duistermaat–Heckman within 0.5%", 300, || {
        let mut ok = true;
        let mut lines = Vec::new();
        // vol = 2π c / (w₁ w₂) for the circle reduction of ℂ² at ½Σwᵢ|zᵢ|² = c
        for (name, w1, w2, c) in [("cp1", 1.0, 1.0, 1.0), ("teardrop", 1.0, 2.0, 1.0)] {
            let oracle = 2.0 * PI * c / (w1 * w2);
            let chk = suite::check_pairing(&builtin(name, 0).unwrap(), 1_000_000, seed).unwrap();
            let value = chk.detail["value"].as_f64().unwrap();
            let err = chk.detail["error"].as_f64().unwrap();
            let rel = (value - oracle).abs() / oracle;
            ok &= rel < 5e-3 && value.abs() > err;
            lines.push(format!("{name}: {value:.9} vs {oracle:.9} (rel {rel:.1e}, ±{err:.1e})"));
        }
        (ok, lines.join("; "))
    }));

    out.push(run(10, "cone scaling slope −2m ± 0.05", 300, || {
        let mut ok = true;
        let mut lines = Vec::new();
        for name in ["teardrop", "z3-cone", "z4-cone"] {
            let c = suite::check_cone_scaling(&builtin(name, 0).unwrap(), 64).unwrap();
            let slope = c.detail["slope"].as_f64().unwrap();
            // the quotients are 2-dimensional (m = 1)
            ok &= (slope + 2.0).abs() < 0.05;
            lines.push(format!("{name}: {slope:.4}"));
        }
        (ok, lines.join("; "))
    }));

    out.push(run(11, "excluded-neighbourhood volumes on teardrop converge", 120, || {
        let c = suite::check_volume(&builtin("teardrop", 0).unwrap(), 32).unwrap();
        let inc = c.detail["last_relative_increment"].as_f64().unwrap();
        let ok = c.detail["monotone"] == Value::Bool(true) && inc < 1e-3;
        (ok, format!("increment at k = 32: {inc:.2e}, extrapolated {}", c.detail["extrapolated"]))
    }));

    println!();
    for o in &out {
        println!(
            "{} criterion {:>2}: {} [{:.1?} / {:?}] {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.elapsed,
            o.budget,
            o.summary
        );
    }
    let failed: Vec<usize> = out.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
