//! Homotopy operators and allowable maps between linear models.
//!
//! A homotopy `F : V × [0,1] → V'` is a polynomial map whose source has one
//! extra linear coordinate `t` in the last slot. The operator
//! `κ_F γ = ∫₀¹ i(∂/∂t) F^*γ dt` is computed symbolically, so
//! `F₁^* − F₀^* = κ_F d + d κ_F` holds as an exact identity.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::actions::{GroupDatum, LinearAction, Matrix};
use crate::error::{Error, Result};
use crate::form::{Form, PolyMap, VectorField};
use crate::linalg::{rank, Echelon};
use crate::model::{Filtration, Frame};
use crate::poly::{Layout, Poly, Q};
use crate::quotient::{basic_on_pool, ideal_on_pool, interpolation_count, SamplePool, SamplingPolicy, TruncatedComplex};
use crate::random::{small_rational, Rng64};
use crate::stratification::{principal_samples, strata_of_z, tangent_basis};

/// Polynomial homotopy with the parameter as last source coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Homotopy {
    pub map: PolyMap,
}

impl Homotopy {
    pub fn new(map: PolyMap) -> Result<Self> {
        if map.source().linear == 0 || map.source().angles != 0 || map.target().angles != 0 {
            return Err(Error::Dimension("homotopies act between linear spaces with a trailing parameter".into()));
        }
        Ok(Homotopy { map })
    }

    /// Space dimension of the source without `t`.
    pub fn source_dim(&self) -> usize {
        self.map.source().linear - 1
    }

    pub fn source_layout(&self) -> Layout {
        Layout::linear(self.source_dim())
    }

    pub fn target_layout(&self) -> Layout {
        self.map.target()
    }

    fn t_var(&self) -> usize {
        self.source_dim()
    }

    /// `F(v, t) = t v`.
    pub fn radial(dim: usize) -> Self {
        let l = Layout::linear(dim + 1);
        let t = Poly::var(l, dim);
        let linear = (0..dim).map(|i| &Poly::var(l, i) * &t).collect();
        Homotopy { map: PolyMap::new(l, Layout::linear(dim), linear, vec![]).expect("radial") }
    }

    /// `F(v, t) = v`.
    pub fn constant(dim: usize) -> Self {
        let l = Layout::linear(dim + 1);
        let linear = (0..dim).map(|i| Poly::var(l, i)).collect();
        Homotopy { map: PolyMap::new(l, Layout::linear(dim), linear, vec![]).expect("constant") }
    }

    /// `F_t` for a fixed rational `t`.
    pub fn at(&self, t: &Q) -> PolyMap {
        let src = self.source_layout();
        let mut images: Vec<Poly> = (0..self.source_dim()).map(|i| Poly::var(src, i)).collect();
        images.push(Poly::constant(src, t.clone()));
        let linear = self.map.linear_components().iter().map(|p| p.compose(src, &images)).collect();
        PolyMap::new(src, self.target_layout(), linear, vec![]).expect("slice")
    }

    /// `∂F/∂t` as polynomials on `V × ℝ`.
    pub fn velocity(&self) -> Vec<Poly> {
        self.map.linear_components().iter().map(|p| p.diff_var(self.t_var())).collect()
    }

    /// Components of `F(z, t)` as univariate polynomials in `t` (coefficients low to high).
    fn path(&self, z: &[Q]) -> Vec<Vec<Q>> {
        let t_layout = Layout::linear(1);
        let mut images: Vec<Poly> = z.iter().map(|x| Poly::constant(t_layout, x.clone())).collect();
        images.push(Poly::var(t_layout, 0));
        self.map
            .linear_components()
            .iter()
            .map(|p| {
                let u = p.compose(t_layout, &images);
                let deg = u.degree().unwrap_or(0) as usize;
                let mut coeffs = vec![Q::zero(); deg + 1];
                for (m, c) in u.terms() {
                    coeffs[m.0[0] as usize] = c.clone();
                }
                trim(coeffs)
            })
            .collect()
    }
}

/// Dilation `v ↦ s v`.
pub fn dilation(dim: usize, s: &Q) -> PolyMap {
    let l = Layout::linear(dim);
    let linear = (0..dim).map(|i| Poly::var(l, i).scale(s)).collect();
    PolyMap::new(l, l, linear, vec![]).expect("dilation")
}

/// `κ_F γ = ∫₀¹ i(∂/∂t) F^*γ dt`.
pub fn kappa(f: &Homotopy, gamma: &Form) -> Form {
    let src = f.source_layout();
    if gamma.degree() == 0 {
        return Form::zero(src, 0);
    }
    let pulled = gamma.pullback(&f.map);
    let dt = VectorField::coordinate(f.map.source(), f.t_var());
    let contracted = pulled.interior(&dt);
    let comps: Vec<(Vec<usize>, Poly)> = contracted
        .components()
        .map(|(idx, c)| (idx.clone(), c.integrate_unit(f.t_var(), src)))
        .collect();
    Form::from_components(src, gamma.degree() - 1, comps).expect("indices avoid t")
}

/// Both sides of `F₁^*γ − F₀^*γ = κ dγ + d κγ`.
pub fn chain_homotopy_sides(f: &Homotopy, gamma: &Form) -> (Form, Form) {
    let one = Q::one();
    let zero = Q::zero();
    let lhs = gamma.pullback(&f.at(&one)).sub(&gamma.pullback(&f.at(&zero)));
    let rhs = kappa(f, &gamma.d()).add(&kappa(f, gamma).d());
    (lhs, rhs)
}

pub fn chain_homotopy_check(f: &Homotopy, gamma: &Form) -> bool {
    let (l, r) = chain_homotopy_sides(f, gamma);
    l == r
}

fn block_diag_t(g: &Matrix) -> Matrix {
    let n = g.len();
    let mut m = vec![vec![Q::zero(); n + 1]; n + 1];
    for i in 0..n {
        m[i][..n].clone_from_slice(&g[i]);
    }
    m[n][n] = Q::one();
    m
}

/// Field on `V × ℝ` with zero `t` component.
fn lift_field(v: &VectorField, layout: Layout) -> VectorField {
    let n = v.layout().dim();
    let var_map: Vec<usize> = (0..n).collect();
    let mut comps: Vec<Poly> = v.components().iter().map(|p| p.embed(layout, &var_map)).collect();
    while comps.len() < layout.dim() {
        comps.push(Poly::zero(layout));
    }
    VectorField::new(layout, comps).expect("lift")
}

/// `df(X) = Y ∘ f` as polynomial identities.
fn pushes_forward(f: &PolyMap, x: &VectorField, y: &VectorField) -> bool {
    let jac = f.jacobian();
    let images = f.coefficient_images();
    jac.iter().zip(y.components()).all(|(row, yi)| {
        let mut lhs = Poly::zero(f.source());
        for (dj, xj) in row.iter().zip(x.components()) {
            lhs += &(dj * xj);
        }
        lhs == yi.compose(f.source(), &images)
    })
}

fn same_group(src: &LinearAction, dst: &LinearAction) -> bool {
    match (&src.group, &dst.group) {
        (GroupDatum::Torus { weights: a }, GroupDatum::Torus { weights: b }) => a.len() == b.len(),
        (GroupDatum::Finite { elements: a, .. }, GroupDatum::Finite { elements: b, .. }) => a.len() == b.len(),
        _ => false,
    }
}

/// Equivariance of a map: infinitesimally for tori, on generators otherwise.
pub fn is_equivariant_map(f: &PolyMap, src: &LinearAction, dst: &LinearAction) -> bool {
    if !same_group(src, dst) {
        return false;
    }
    match (&src.group, &dst.group) {
        (GroupDatum::Torus { .. }, GroupDatum::Torus { .. }) => src
            .basis_fields()
            .iter()
            .zip(dst.basis_fields())
            .all(|(x, y)| pushes_forward(f, &lift_field(x, f.source()), &y)),
        _ => src.generators().iter().zip(dst.generators()).all(|(g, h)| {
            let gs = if f.source().linear == g.len() { g.clone() } else { block_diag_t(g) };
            let lhs = f.compose(&PolyMap::linear_map(f.source().linear, &gs)).expect("dims");
            let rhs = PolyMap::linear_map(dst.layout().linear, h).compose(f).expect("dims");
            lhs == rhs
        }),
    }
}

pub fn is_equivariant_homotopy(f: &Homotopy, src: &LinearAction, dst: &LinearAction) -> bool {
    is_equivariant_map(&f.map, src, dst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceReport {
    /// `κ(g^*γ) = g^*(κγ)` for generators.
    pub group: bool,
    /// `κ(i(ξ)γ) = −i(ξ)(κγ)` for basis fields.
    pub contraction: bool,
}

pub fn equivariance_identities_check(f: &Homotopy, gamma: &Form, action: &LinearAction) -> EquivarianceReport {
    let n = action.layout().dim();
    let group = action.generators().iter().all(|g| {
        let gm = PolyMap::linear_map(n, g);
        kappa(f, &gamma.pullback(&gm)) == kappa(f, gamma).pullback(&gm)
    });
    let contraction = action
        .basis_fields()
        .iter()
        .all(|xi| kappa(f, &gamma.interior(xi)) == kappa(f, gamma).interior(xi).neg());
    EquivarianceReport { group, contraction }
}

/// Random equivariant homotopy of `V` to itself.
///
/// Tori: each plane is multiplied by a complex polynomial in `t` and the
/// invariants `|zⱼ|²`. Finite groups: `a(t) v + b(t) g v + c(t) q(v) v` with
/// `g` a generator and `q` an averaged quadratic.
pub fn random_equivariant_homotopy(action: &LinearAction, rng: &mut Rng64) -> Homotopy {
    let n = action.n();
    let l = Layout::linear(2 * n + 1);
    let t = Poly::var(l, 2 * n);
    let rho = |j: usize| &Poly::var(l, 2 * j).pow(2) + &Poly::var(l, 2 * j + 1).pow(2);
    let rand_poly = |rng: &mut Rng64| {
        let mut p = Poly::constant(l, small_rational(rng));
        p += &t.scale(&small_rational(rng));
        if rng.gen_bool(0.5) {
            p += &t.pow(2).scale(&small_rational(rng));
        }
        if rng.gen_bool(0.4) {
            let j = rng.gen_range(0..n.max(1));
            p += &(&t * &rho(j)).scale(&small_rational(rng));
        }
        p
    };
    let linear = match &action.group {
        GroupDatum::Torus { .. } => {
            let mut out = Vec::with_capacity(2 * n);
            for i in 0..n {
                let a = rand_poly(rng);
                let b = rand_poly(rng);
                let (x, y) = (Poly::var(l, 2 * i), Poly::var(l, 2 * i + 1));
                out.push(&(&a * &x) - &(&b * &y));
                out.push(&(&b * &x) + &(&a * &y));
            }
            out
        }
        GroupDatum::Finite { generators, .. } => {
            let g = generators.first().cloned().unwrap_or_else(|| crate::actions::identity(2 * n));
            let ls = action.layout();
            let q0 = action
                .average(&Form::function(&Poly::var(ls, 0).pow(2) + &Poly::var(ls, 1).pow(2)))
                .expect("finite");
            let qv = q0.component(&[]).cloned().unwrap_or_else(|| Poly::zero(ls));
            let var_map: Vec<usize> = (0..ls.nvars()).collect();
            let q_lift = qv.embed(l, &var_map);
            let a = &Poly::constant(l, small_rational(rng)) + &t.scale(&small_rational(rng));
            let b = &t.scale(&small_rational(rng)) + &t.pow(2).scale(&small_rational(rng));
            let c = t.scale(&small_rational(rng));
            (0..2 * n)
                .map(|i| {
                    let v = Poly::var(l, i);
                    let mut gv = Poly::zero(l);
                    for (j, gij) in g[i].iter().enumerate() {
                        gv += &Poly::var(l, j).scale(gij);
                    }
                    &(&(&a * &v) + &(&b * &gv)) + &(&(&c * &q_lift) * &v)
                })
                .collect()
        }
    };
    Homotopy { map: PolyMap::new(l, Layout::linear(2 * n), linear, vec![]).expect("homotopy") }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllowabilityReport {
    /// Condition (1): equivariance.
    pub equivariant: bool,
    /// Condition (2): `f(Z) ⊂ Z'` (for homotopies: for every non-exceptional grid `t`).
    pub preserves_fibre: bool,
    /// Condition (3): stratum tangency (for homotopies: of the `t`-velocity).
    pub tangency: bool,
    /// Parameter values where the stratum of `F_t(z)` jumps, within `[0, 1]`.
    pub exceptional_t: Vec<String>,
    pub witnesses: Vec<String>,
    pub samples: usize,
    pub allowable: bool,
}

fn in_span(basis: &[Vec<Q>], v: &[Q]) -> bool {
    let mut e = Echelon::new(v.len());
    for b in basis {
        e.insert(b.clone());
    }
    e.contains(v)
}

fn fmt_point(v: &[Q]) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn map_conditions(
    f: &PolyMap,
    src: &LinearAction,
    dst: &LinearAction,
    points: &[(Vec<Q>, Vec<Vec<Q>>)],
    witnesses: &mut Vec<String>,
) -> (bool, bool) {
    let quadrics: Vec<Poly> = dst.zero_fibre_quadrics().iter().map(|q| q.compose(f.source(), &f.coefficient_images())).collect();
    let jac = f.jacobian();
    let mut fibre = true;
    let mut tangency = true;
    for (z, tangent) in points {
        if let Some(qv) = quadrics.iter().map(|q| q.eval(z)).find(|v| !v.is_zero()) {
            fibre = false;
            if witnesses.len() < 4 {
                witnesses.push(format!("f(Z) ⊄ Z': quadric = {qv} at {}", fmt_point(z)));
            }
            continue;
        }
        let fz = f.eval_linear(z);
        let Ok(target_tangent) = tangent_basis(dst, &fz) else {
            fibre = false;
            continue;
        };
        for t in tangent {
            let image: Vec<Q> = jac
                .iter()
                .map(|row| row.iter().zip(t).map(|(p, x)| p.eval(z) * x).sum())
                .collect();
            if !in_span(&target_tangent, &image) {
                tangency = false;
                if witnesses.len() < 4 {
                    witnesses.push(format!("df(v) not tangent to the image stratum at {}", fmt_point(z)));
                }
                break;
            }
        }
    }
    let _ = src;
    (fibre, tangency)
}

fn src_points(src: &LinearAction, count: usize, seed: u64) -> Result<Vec<(Vec<Q>, Vec<Vec<Q>>)>> {
    let strat = strata_of_z(src);
    Ok(principal_samples(src, &strat, count, seed)?
        .into_iter()
        .map(|s| (s.point, s.tangent_basis))
        .collect())
}

/// Conditions (1)–(3) for a polynomial map.
pub fn check_allowable_map(f: &PolyMap, src: &LinearAction, dst: &LinearAction, policy: &SamplingPolicy) -> Result<AllowabilityReport> {
    let equivariant = is_equivariant_map(f, src, dst);
    let d = f.linear_components().iter().filter_map(Poly::degree).max().unwrap_or(1) * 2;
    let count = interpolation_count(d, strata_of_z(src).principal().map_or(0, |p| p.dimension)).min(policy.cap).min(40);
    let points = src_points(src, count, policy.seed)?;
    let mut witnesses = Vec::new();
    if !equivariant {
        witnesses.push("map does not commute with the action".into());
    }
    let (preserves_fibre, tangency) = map_conditions(f, src, dst, &points, &mut witnesses);
    Ok(AllowabilityReport {
        equivariant,
        preserves_fibre,
        tangency,
        exceptional_t: vec![],
        witnesses,
        samples: points.len(),
        allowable: equivariant && preserves_fibre && tangency,
    })
}

fn trim(mut v: Vec<Q>) -> Vec<Q> {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn is_zero_poly(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Remainder of univariate division.
fn poly_rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !is_zero_poly(&r) {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= &f * bi;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !is_zero_poly(&b) {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn divisors(n: &num_bigint::BigInt) -> Option<Vec<num_bigint::BigInt>> {
    let n: u64 = n.abs().try_into().ok()?;
    if n == 0 {
        return Some(vec![]);
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if d > 2_000_000 {
            return None;
        }
        if n % d == 0 {
            out.push(d.into());
            if d * d != n {
                out.push((n / d).into());
            }
        }
        d += 1;
    }
    Some(out)
}

fn eval_uni(p: &[Q], t: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
}

/// Rational roots in `[0, 1]` by the rational root theorem.
fn rational_roots_unit(p: &[Q]) -> Vec<Q> {
    let mut p = trim(p.to_vec());
    if p.len() <= 1 {
        return vec![];
    }
    let mut roots = Vec::new();
    if p[0].is_zero() {
        roots.push(Q::zero());
        while p.len() > 1 && p[0].is_zero() {
            p.remove(0);
        }
    }
    if p.len() > 1 {
        let l = p.iter().fold(num_bigint::BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let ints: Vec<num_bigint::BigInt> = p.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
        if let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(ints.last().unwrap())) {
            for a in &ps {
                for b in &qs {
                    let cand = Q::new(a.clone(), b.clone());
                    if cand <= Q::one() && eval_uni(&p, &cand).is_zero() && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Parameter values in `[0,1]` where the orbit type of `F_t(z)` can jump.
fn exceptional_times(f: &Homotopy, dst: &LinearAction, z: &[Q]) -> Vec<Q> {
    let path = f.path(z);
    let mut out = Vec::new();
    let mut push_roots = |g: Vec<Q>| {
        if g.len() > 1 {
            for r in rational_roots_unit(&g) {
                if !out.contains(&r) {
                    out.push(r);
                }
            }
        }
    };
    match &dst.group {
        GroupDatum::Torus { .. } => {
            for i in 0..dst.n() {
                let (x, y) = (&path[2 * i], &path[2 * i + 1]);
                if is_zero_poly(x) && is_zero_poly(y) {
                    continue;
                }
                push_roots(poly_gcd(x, y));
            }
        }
        GroupDatum::Finite { elements, .. } => {
            for g in elements.iter().filter(|g| **g != crate::actions::identity(g.len())) {
                let mut acc: Vec<Q> = vec![Q::zero()];
                for (i, row) in g.iter().enumerate() {
                    let mut comp = vec![Q::zero(); path.iter().map(Vec::len).max().unwrap_or(1)];
                    for (j, gij) in row.iter().enumerate() {
                        let coef = if i == j { gij - Q::one() } else { gij.clone() };
                        for (c, pj) in comp.iter_mut().zip(&path[j]) {
                            *c += &coef * pj;
                        }
                    }
                    acc = poly_gcd(&acc, &comp);
                }
                if !is_zero_poly(&acc) {
                    push_roots(acc);
                }
            }
        }
    }
    out.sort();
    out
}

/// Conditions (1), (2′), (3′) for a homotopy.
pub fn check_allowable_homotopy(f: &Homotopy, src: &LinearAction, dst: &LinearAction, policy: &SamplingPolicy) -> Result<AllowabilityReport> {
    let equivariant = is_equivariant_homotopy(f, src, dst);
    let points = src_points(src, 12, policy.seed)?;
    let mut witnesses = Vec::new();
    if !equivariant {
        witnesses.push("homotopy does not commute with the action".into());
    }
    let mut exceptional: Vec<Q> = Vec::new();
    for (z, _) in &points {
        for t in exceptional_times(f, dst, z) {
            if !exceptional.contains(&t) {
                exceptional.push(t);
            }
        }
    }
    exceptional.sort();
    let grid: Vec<Q> = [(0, 1), (1, 7), (1, 3), (1, 2), (5, 8), (6, 7), (1, 1)]
        .iter()
        .map(|&(a, b)| Q::new(a.into(), b.into()))
        .collect();
    let mut preserves_fibre = true;
    let mut tangency = true;
    let velocity = f.velocity();
    for t in &grid {
        let ft = f.at(t);
        let mut w = Vec::new();
        let (fib, tan) = map_conditions(&ft, src, dst, &points, &mut w);
        let exceptional_here = exceptional.contains(t);
        if !exceptional_here {
            preserves_fibre &= fib;
            tangency &= tan;
            for s in w {
                if witnesses.len() < 6 {
                    witnesses.push(format!("t = {t}: {s}"));
                }
            }
        }
        // (3′): the velocity is tangent to the stratum through F_t(z)
        for (z, _) in &points {
            let fz = ft.eval_linear(z);
            let Ok(tb) = tangent_basis(dst, &fz) else { continue };
            let mut zt = z.clone();
            zt.push(t.clone());
            let vel: Vec<Q> = velocity.iter().map(|p| p.eval(&zt)).collect();
            if !in_span(&tb, &vel) && !exceptional_here {
                tangency = false;
                if witnesses.len() < 6 {
                    witnesses.push(format!("t = {t}: velocity leaves the stratum at {}", fmt_point(z)));
                }
                break;
            }
        }
    }
    Ok(AllowabilityReport {
        equivariant,
        preserves_fibre,
        tangency,
        exceptional_t: exceptional.iter().map(ToString::to_string).collect(),
        witnesses,
        samples: points.len(),
        allowable: equivariant && preserves_fibre && tangency,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubcomplexVerdict {
    pub input_basic: bool,
    pub output_basic: bool,
    pub input_ideal: bool,
    pub output_ideal: bool,
    pub holds: bool,
}

/// `κ` maps Φ-basic forms to Φ-basic forms and the ideal into itself.
pub fn kappa_preserves_subcomplex(f: &Homotopy, gamma: &Form, action: &LinearAction, pool: &SamplePool) -> SubcomplexVerdict {
    let k = kappa(f, gamma);
    let input_basic = basic_on_pool(action, pool, gamma);
    let output_basic = basic_on_pool(action, pool, &k);
    let input_ideal = input_basic && ideal_on_pool(pool, gamma);
    let output_ideal = ideal_on_pool(pool, &k);
    SubcomplexVerdict {
        input_basic,
        output_basic,
        input_ideal,
        output_ideal,
        holds: (!input_basic || output_basic) && (!input_ideal || output_ideal),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareReport {
    pub action: String,
    pub truncation: u32,
    pub betti: Vec<usize>,
    pub betti_next: Vec<usize>,
    /// Closed classes per degree at the truncation.
    pub closed: Vec<usize>,
    /// Closed classes of positive degree whose κ-primitive was verified.
    pub primitives_verified: Vec<usize>,
    pub constants_only_in_degree_zero: bool,
    pub stable: bool,
    pub passed: bool,
}

/// Every closed class of positive degree is `d` of its radial κ-primitive modulo the ideal.
pub fn poincare_verify(action: &LinearAction, max: u32, policy: &SamplingPolicy) -> Result<PoincareReport> {
    if !action.level_is_zero() {
        return Err(Error::InvalidAction("the Poincaré lemma is stated for level 0".into()));
    }
    let c = TruncatedComplex::build(action, Filtration::ScalingWeight, max, policy)?;
    let next = TruncatedComplex::build(action, Filtration::ScalingWeight, max + 2, policy)?;
    let radial = Homotopy::radial(action.layout().dim());
    let zero_point = vec![Q::zero(); action.layout().nvars()];
    let mut closed = Vec::new();
    let mut verified = Vec::new();
    let mut constants_ok = true;
    for k in 0..c.blocks.len() {
        let classes = c.closed_classes(k);
        closed.push(classes.len());
        let mut ok = 0;
        for (_, z) in &classes {
            if k == 0 {
                let value = z.component(&[]).map_or(Q::zero(), |p| p.eval(&zero_point));
                let shifted = z.sub(&Form::constant(z.layout(), value));
                if !ideal_on_pool(&c.pool, &shifted) {
                    constants_ok = false;
                }
                continue;
            }
            let p = kappa(&radial, z);
            if basic_on_pool(action, &c.pool, &p) && ideal_on_pool(&c.pool, &p.d().sub(z)) {
                ok += 1;
            }
        }
        verified.push(ok);
    }
    let betti = c.betti();
    let betti_next = next.betti();
    let trivial = betti.first() == Some(&1) && betti.iter().skip(1).all(|&b| b == 0);
    let all_verified = closed.iter().zip(&verified).skip(1).all(|(a, b)| a == b);
    let stable = betti == betti_next;
    Ok(PoincareReport {
        action: action.name.clone(),
        truncation: max,
        passed: trivial && all_verified && constants_ok && stable && c.d_squared_vanishes(),
        betti,
        betti_next,
        closed,
        primitives_verified: verified,
        constants_only_in_degree_zero: constants_ok,
        stable,
    })
}

/// Rank of `F^*` on a finite family, used for reports.
pub fn pullback_rank(f: &PolyMap, forms: &[Form]) -> usize {
    let images: Vec<Form> = forms.iter().map(|g| g.pullback(f)).collect();
    let coords = crate::model::coordinates(&images);
    let n = coords.first().map_or(0, Vec::len);
    rank(&coords, n)
}

/// Frames of an action's principal stratum (shared by property batches).
pub fn frames_for(action: &LinearAction, count: usize, seed: u64) -> Result<Vec<Frame>> {
    Ok(SamplePool::new(action, count, seed)?.frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::builtin;
    use crate::poly::{q, qr};
    use crate::random::{self, rng};

    fn l2() -> Layout {
        Layout::linear(2)
    }

    #[test]
    fn radial_kappa_examples() {
        let f = Homotopy::radial(2);
        let area = Form::dx(l2(), 0).wedge(&Form::dx(l2(), 1));
        let expected = Form::dx(l2(), 1)
            .mul_function(&Poly::var(l2(), 0))
            .sub(&Form::dx(l2(), 0).mul_function(&Poly::var(l2(), 1)))
            .scale(&qr(1, 2));
        assert_eq!(kappa(&f, &area), expected);
        assert_eq!(kappa(&f, &Form::dx(l2(), 0)), Form::function(Poly::var(l2(), 0)));
        assert!(kappa(&f, &Form::constant(l2(), q(3))).is_zero());
        assert!(chain_homotopy_check(&f, &area));
    }

    #[test]
    fn euler_identity_on_homogeneous_pieces() {
        let f = Homotopy::radial(4);
        let mut r = rng(5);
        for _ in 0..20 {
            let g = random::form(&mut r, Layout::linear(4), 2, 3, 3);
            let (lhs, rhs) = chain_homotopy_sides(&f, &g);
            assert_eq!(lhs, rhs);
            // F₀ is the zero map, so the left side is γ minus its constant 0-form part
            assert_eq!(lhs, g);
        }
    }

    #[test]
    fn random_homotopies_are_equivariant() {
        let mut r = rng(9);
        for a in crate::actions::all_builtins() {
            for _ in 0..3 {
                let h = random_equivariant_homotopy(&a, &mut r);
                assert!(is_equivariant_homotopy(&h, &a, &a), "{}", a.name);
                let g = random::form(&mut r, a.layout(), 2, 2, 3);
                assert!(chain_homotopy_check(&h, &g));
                let e = equivariance_identities_check(&h, &g, &a);
                assert!(e.group && e.contraction, "{}", a.name);
            }
        }
    }

    #[test]
    fn dilations_are_allowable() {
        let cone = builtin("cone11", 0).unwrap();
        let p = SamplingPolicy::with_seed(2);
        assert!(check_allowable_map(&dilation(4, &qr(3, 2)), &cone, &cone, &p).unwrap().allowable);
        assert!(check_allowable_map(&dilation(4, &q(0)), &cone, &cone, &p).unwrap().allowable);
        let skew = PolyMap::linear_map(4, &[
            vec![q(1), q(1), q(0), q(0)],
            vec![q(0), q(1), q(0), q(0)],
            vec![q(0), q(0), q(1), q(0)],
            vec![q(0), q(0), q(0), q(1)],
        ]);
        assert!(!check_allowable_map(&skew, &cone, &cone, &p).unwrap().equivariant);
    }

    #[test]
    fn homotopy_allowability() {
        let cone = builtin("cone11", 0).unwrap();
        let p = SamplingPolicy::with_seed(2);
        let rad = check_allowable_homotopy(&Homotopy::radial(4), &cone, &cone, &p).unwrap();
        assert!(rad.allowable);
        assert_eq!(rad.exceptional_t, vec!["0".to_string()]);
        assert!(check_allowable_homotopy(&Homotopy::constant(4), &cone, &cone, &p).unwrap().allowable);
        // scales z1 alone: equivariant, but the velocity leaves Z at t = 0
        let l = Layout::linear(5);
        let t = Poly::var(l, 4);
        let s = &Poly::one(l) + &t;
        let bad = PolyMap::new(
            l,
            Layout::linear(4),
            vec![&Poly::var(l, 0) * &s, &Poly::var(l, 1) * &s, Poly::var(l, 2), Poly::var(l, 3)],
            vec![],
        )
        .unwrap();
        let rep = check_allowable_homotopy(&Homotopy::new(bad).unwrap(), &cone, &cone, &p).unwrap();
        assert!(rep.equivariant && !rep.tangency && !rep.allowable);
        assert!(!rep.witnesses.is_empty());
    }

    #[test]
    fn univariate_helpers() {
        // t² − t/2 = t (t − 1/2)
        let p = vec![q(0), qr(-1, 2), q(1)];
        assert_eq!(rational_roots_unit(&p), vec![q(0), qr(1, 2)]);
        let a = vec![q(-1), q(0), q(1)];
        let b = vec![q(-1), q(1)];
        assert_eq!(poly_gcd(&a, &b).len(), 2);
    }

    #[test]
    fn poincare_on_small_truncation() {
        let cone = builtin("cone11", 0).unwrap();
        let r = poincare_verify(&cone, 3, &SamplingPolicy::with_seed(4).with_cap(60)).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(poincare_verify(&builtin("cp1", 0).unwrap(), 2, &SamplingPolicy::default()).is_err());
    }
}
