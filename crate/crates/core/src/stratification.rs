//! Orbit-type strata of the zero fibre `Z = Φ⁻¹(0)`.
//!
//! For a torus, a point is described by its support (the planes where it is
//! nonzero) and by `ρᵢ = |zᵢ|²`. `Z` is the polyhedron `{ρ ≥ 0 : Wρ = −2λ}`
//! lifted to `ℂⁿ`; realizable supports are unions of vertex supports and
//! extreme-ray supports. The stabilizer of a point with support `S` is the
//! annihilator of the lattice spanned by the weight columns in `S`, so it is
//! recorded by the Hermite normal form of that lattice. For a finite group,
//! strata come from the lattice of fixed subspaces.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::actions::{mat_mul, mat_vec, GroupDatum, LinearAction, Matrix};
use crate::error::{Error, Result};
use crate::linalg::{combinations, hermite_rows, kernel, rank, saturation_index, solve_columns};
use crate::poly::{q, Q};

/// Stabilizer of a point, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StabilizerDescriptor {
    /// Annihilator in `T^r` of the lattice with the given Hermite basis.
    Torus { lattice: Vec<Vec<i64>>, rank: usize, continuous_dim: usize, finite_order: u64 },
    /// Conjugacy-minimal sorted element list.
    Finite { elements: Vec<Matrix> },
}

impl StabilizerDescriptor {
    pub fn is_trivial(&self) -> bool {
        match self {
            StabilizerDescriptor::Torus { continuous_dim, finite_order, .. } => *continuous_dim == 0 && *finite_order == 1,
            StabilizerDescriptor::Finite { elements } => elements.len() == 1,
        }
    }

    /// Short human description, e.g. `trivial`, `ℤ2`, `T^1`, `T^1 × (order 2)`.
    pub fn describe(&self) -> String {
        match self {
            StabilizerDescriptor::Torus { continuous_dim: 0, finite_order: 1, .. } => "trivial".into(),
            StabilizerDescriptor::Torus { continuous_dim: 0, finite_order, .. } => format!("Z{finite_order}"),
            StabilizerDescriptor::Torus { continuous_dim, finite_order: 1, .. } => format!("T^{continuous_dim}"),
            StabilizerDescriptor::Torus { continuous_dim, finite_order, .. } => {
                format!("T^{continuous_dim} x (order {finite_order})")
            }
            StabilizerDescriptor::Finite { elements } if elements.len() == 1 => "trivial".into(),
            StabilizerDescriptor::Finite { elements } => format!("subgroup of order {}", elements.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratumDescriptor {
    pub id: usize,
    pub stabilizer: StabilizerDescriptor,
    /// Torus: realizable supports in this stratum (the last one is maximal).
    pub supports: Vec<Vec<usize>>,
    /// Torus: planes fixed by the stabilizer.
    pub fixed_planes: Vec<usize>,
    /// Basis of the stabilizer-fixed subspace.
    pub fixed_basis: Vec<Vec<Q>>,
    pub dimension: usize,
    pub is_principal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stratification {
    pub strata: Vec<StratumDescriptor>,
    /// Covering relations `(a, b)` of the closure order, `a < b`.
    pub hasse: Vec<(usize, usize)>,
    pub warnings: Vec<String>,
    leq: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratumSample {
    pub point: Vec<Q>,
    pub stratum: usize,
    pub tangent_basis: Vec<Vec<Q>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumReport {
    pub id: usize,
    pub stabilizer: String,
    pub supports: Vec<Vec<usize>>,
    pub dimension: usize,
    pub principal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratificationReport {
    pub action: String,
    pub strata: Vec<StratumReport>,
    pub hasse: Vec<(usize, usize)>,
    pub warnings: Vec<String>,
}

impl Stratification {
    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn principal(&self) -> Option<&StratumDescriptor> {
        self.strata.iter().find(|s| s.is_principal)
    }

    /// Closure order `a ≤ b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lower_strata(&self) -> impl Iterator<Item = &StratumDescriptor> {
        self.strata.iter().filter(|s| !s.is_principal)
    }

    pub fn report(&self, action: &LinearAction) -> StratificationReport {
        StratificationReport {
            action: action.name.clone(),
            strata: self
                .strata
                .iter()
                .map(|s| StratumReport {
                    id: s.id,
                    stabilizer: s.stabilizer.describe(),
                    supports: s.supports.clone(),
                    dimension: s.dimension,
                    principal: s.is_principal,
                })
                .collect(),
            hasse: self.hasse.clone(),
            warnings: self.warnings.clone(),
        }
    }

    fn from_parts(mut strata: Vec<StratumDescriptor>, leq_fn: impl Fn(&StratumDescriptor, &StratumDescriptor) -> bool, warnings: Vec<String>) -> Self {
        strata.sort_by(|a, b| a.dimension.cmp(&b.dimension).then(b.stabilizer.cmp(&a.stabilizer)));
        for (i, s) in strata.iter_mut().enumerate() {
            s.id = i;
        }
        let n = strata.len();
        let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a == b || leq_fn(&strata[a], &strata[b])).collect()).collect();
        let mut hasse = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a][b] && !(0..n).any(|c| c != a && c != b && leq[a][c] && leq[c][b]) {
                    hasse.push((a, b));
                }
            }
        }
        Stratification { strata, hasse, warnings, leq }
    }
}

fn support_of(point: &[Q]) -> Vec<usize> {
    (0..point.len() / 2)
        .filter(|&i| !point[2 * i].is_zero() || !point[2 * i + 1].is_zero())
        .collect()
}

fn torus_lattice(weights: &[Vec<i64>], support: &[usize]) -> StabilizerDescriptor {
    let r = weights.len();
    let cols: Vec<Vec<i64>> = support.iter().map(|&i| weights.iter().map(|row| row[i]).collect()).collect();
    let lattice = if cols.is_empty() || r == 0 { vec![] } else { hermite_rows(&cols) };
    let rk = lattice.len();
    StabilizerDescriptor::Torus {
        finite_order: saturation_index(&lattice),
        lattice,
        rank: r,
        continuous_dim: r - rk,
    }
}

fn fixed_planes(weights: &[Vec<i64>], lattice: &[Vec<i64>], n: usize) -> Vec<usize> {
    (0..n)
        .filter(|&j| {
            let col: Vec<i64> = weights.iter().map(|row| row[j]).collect();
            if col.iter().all(|&x| x == 0) {
                return true;
            }
            !lattice.is_empty() && crate::linalg::in_lattice(lattice, &col)
        })
        .collect()
}

fn plane_basis(planes: &[usize], n: usize) -> Vec<Vec<Q>> {
    let mut out = Vec::new();
    for &p in planes {
        for c in [2 * p, 2 * p + 1] {
            let mut v = vec![Q::zero(); 2 * n];
            v[c] = Q::one();
            out.push(v);
        }
    }
    out
}

fn stabilizer_elements(elements: &[Matrix], point: &[Q]) -> Vec<Matrix> {
    elements.iter().filter(|g| mat_vec(g, point) == point).cloned().collect()
}

fn inverse_in(elements: &[Matrix], g: &Matrix) -> Matrix {
    let id = crate::actions::identity(g.len());
    elements.iter().find(|h| mat_mul(g, h) == id).expect("closed group").clone()
}

/// Conjugacy-minimal sorted representative of a subgroup.
fn canonical_subgroup(elements: &[Matrix], sub: &[Matrix]) -> Vec<Matrix> {
    let mut best: Option<Vec<Matrix>> = None;
    for g in elements {
        let gi = inverse_in(elements, g);
        let mut conj: Vec<Matrix> = sub.iter().map(|h| mat_mul(&mat_mul(g, h), &gi)).collect();
        conj.sort();
        if best.as_ref().is_none_or(|b| conj < *b) {
            best = Some(conj);
        }
    }
    best.unwrap_or_default()
}

/// Fixed subspace of a set of matrices.
fn fixed_subspace(dim: usize, mats: &[Matrix]) -> Vec<Vec<Q>> {
    let mut rows = Vec::new();
    for g in mats {
        for (i, row) in g.iter().enumerate() {
            let mut r = row.clone();
            r[i] -= Q::one();
            rows.push(r);
        }
    }
    kernel(&rows, dim)
}

/// Stabilizer of `point`, canonicalized.
pub fn orbit_type(action: &LinearAction, point: &[Q]) -> StabilizerDescriptor {
    match &action.group {
        GroupDatum::Torus { weights } => torus_lattice(weights, &support_of(point)),
        GroupDatum::Finite { elements, .. } => StabilizerDescriptor::Finite {
            elements: canonical_subgroup(elements, &stabilizer_elements(elements, point)),
        },
    }
}

/// Vertices and extreme rays of `{ρ ≥ 0 : Wρ = c}`.
pub(crate) fn polyhedron(weights: &[Vec<i64>], c: &[Q], n: usize) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
    let cols: Vec<Vec<Q>> = (0..n).map(|i| weights.iter().map(|row| q(row[i])).collect()).collect();
    let rk = rank(&cols, weights.len());
    let mut vertices: Vec<Vec<Q>> = Vec::new();
    for basis in combinations(n, rk) {
        let sub: Vec<Vec<Q>> = basis.iter().map(|&i| cols[i].clone()).collect();
        if rank(&sub, weights.len()) != rk {
            continue;
        }
        if let Some(x) = solve_columns(&sub, c) {
            if x.iter().all(|v| !v.is_negative()) {
                let mut rho = vec![Q::zero(); n];
                for (&i, v) in basis.iter().zip(x) {
                    rho[i] = v;
                }
                if !vertices.contains(&rho) {
                    vertices.push(rho);
                }
            }
        }
    }
    let mut rays: Vec<Vec<Q>> = Vec::new();
    for size in 1..=(rk + 1).min(n) {
        for circuit in combinations(n, size) {
            let rows: Vec<Vec<Q>> = weights.iter().map(|row| circuit.iter().map(|&i| q(row[i])).collect()).collect();
            let ker = kernel(&rows, size);
            if ker.len() != 1 {
                continue;
            }
            let v = &ker[0];
            let pos = v.iter().all(|x| x.is_positive());
            let neg = v.iter().all(|x| x.is_negative());
            if !(pos || neg) {
                continue;
            }
            let mut rho = vec![Q::zero(); n];
            for (&i, x) in circuit.iter().zip(v) {
                rho[i] = if pos { x.clone() } else { -x.clone() };
            }
            if !rays.contains(&rho) {
                rays.push(rho);
            }
        }
    }
    (vertices, rays)
}

fn supp(v: &[Q]) -> BTreeSet<usize> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i).collect()
}

/// Orbit-type stratification of `Z`.
pub fn strata_of_z(action: &LinearAction) -> Stratification {
    match &action.group {
        GroupDatum::Torus { weights } => torus_strata(action, weights),
        GroupDatum::Finite { elements, .. } => finite_strata(action, elements),
    }
}

fn torus_strata(action: &LinearAction, weights: &[Vec<i64>]) -> Stratification {
    let n = action.n();
    let c: Vec<Q> = action.level.iter().map(|l| -q(2) * l).collect();
    let (vertices, rays) = polyhedron(weights, &c, n);
    if vertices.is_empty() {
        return Stratification::from_parts(vec![], |_, _| false, vec![format!("level set of {} is empty", action.name)]);
    }
    let vsupp: Vec<BTreeSet<usize>> = vertices.iter().map(|v| supp(v)).collect();
    let rsupp: Vec<BTreeSet<usize>> = rays.iter().map(|v| supp(v)).collect();
    let mut supports: BTreeSet<BTreeSet<usize>> = vsupp.iter().cloned().collect();
    loop {
        let mut grown = supports.clone();
        for s in &supports {
            for t in vsupp.iter().chain(&rsupp) {
                grown.insert(s.union(t).copied().collect());
            }
        }
        if grown.len() == supports.len() {
            break;
        }
        supports = grown;
    }
    let mut groups: BTreeMap<StabilizerDescriptor, Vec<Vec<usize>>> = BTreeMap::new();
    for s in supports {
        let s: Vec<usize> = s.into_iter().collect();
        groups.entry(torus_lattice(weights, &s)).or_default().push(s);
    }
    let all: BTreeSet<usize> = groups.values().flatten().flatten().copied().collect();
    let mut strata = Vec::new();
    for (stab, mut sups) in groups {
        sups.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let smax = sups.last().unwrap().clone();
        let StabilizerDescriptor::Torus { lattice, .. } = &stab else { unreachable!() };
        let planes = fixed_planes(weights, lattice, n);
        let rows: Vec<Vec<Q>> = weights.iter().map(|row| smax.iter().map(|&i| q(row[i])).collect()).collect();
        let rk = if smax.is_empty() { 0 } else { rank(&rows, smax.len()) };
        strata.push(StratumDescriptor {
            id: 0,
            is_principal: smax.iter().copied().collect::<BTreeSet<_>>() == all,
            fixed_basis: plane_basis(&planes, n),
            dimension: 2 * planes.len() - rk,
            fixed_planes: planes,
            supports: sups,
            stabilizer: stab,
        });
    }
    let subset = |a: &StratumDescriptor, b: &StratumDescriptor| {
        let sa = a.supports.last().unwrap();
        let sb = b.supports.last().unwrap();
        sa.iter().all(|i| sb.contains(i))
    };
    Stratification::from_parts(strata, subset, vec![])
}

fn span_contains(basis: &[Vec<Q>], v: &[Q]) -> bool {
    let mut e = crate::linalg::Echelon::new(v.len());
    for b in basis {
        e.insert(b.clone());
    }
    e.contains(v)
}

fn finite_strata(action: &LinearAction, elements: &[Matrix]) -> Stratification {
    let dim = 2 * action.n();
    // fixed subspaces U with their pointwise stabilizers H_U, closed under intersection
    let mut found: BTreeMap<Vec<Matrix>, Vec<Vec<Q>>> = BTreeMap::new();
    let id = vec![crate::actions::identity(dim)];
    found.insert(id.clone(), fixed_subspace(dim, &id));
    let mut frontier: Vec<Vec<Matrix>> = vec![id];
    while let Some(h) = frontier.pop() {
        for g in elements {
            if h.contains(g) {
                continue;
            }
            let mut gens = h.clone();
            gens.push(g.clone());
            let u = fixed_subspace(dim, &gens);
            let hu: Vec<Matrix> = elements
                .iter()
                .filter(|k| u.iter().all(|v| mat_vec(k, v) == *v))
                .cloned()
                .collect();
            if !found.contains_key(&hu) {
                found.insert(hu.clone(), u);
                frontier.push(hu);
            }
        }
    }
    let mut warnings = Vec::new();
    let mut classes: BTreeMap<Vec<Matrix>, (Vec<Matrix>, Vec<Vec<Q>>)> = BTreeMap::new();
    for (h, u) in &found {
        for (h2, u2) in &found {
            if h2.len() > h.len() && u.len() == u2.len() + 1 && u2.iter().all(|v| span_contains(u, v)) {
                warnings.push(format!(
                    "fixed subspace of dimension {} minus a hyperplane may be disconnected; components are not split",
                    u.len()
                ));
            }
        }
        classes.entry(canonical_subgroup(elements, h)).or_insert((h.clone(), u.clone()));
    }
    let strata: Vec<StratumDescriptor> = classes
        .into_iter()
        .map(|(canon, (h, u))| StratumDescriptor {
            id: 0,
            is_principal: h.len() == 1,
            stabilizer: StabilizerDescriptor::Finite { elements: canon },
            supports: vec![],
            fixed_planes: vec![],
            dimension: u.len(),
            fixed_basis: u,
        })
        .collect();
    let elements = elements.to_vec();
    let contained = move |a: &StratumDescriptor, b: &StratumDescriptor| {
        elements.iter().any(|g| {
            let moved: Vec<Vec<Q>> = b.fixed_basis.iter().map(|v| mat_vec(g, v)).collect();
            a.fixed_basis.iter().all(|v| span_contains(&moved, v))
        })
    };
    Stratification::from_parts(strata, contained, warnings)
}

/// Whether `point` lies on `Z`.
pub fn on_fibre(action: &LinearAction, point: &[Q]) -> bool {
    action.zero_fibre_quadrics().iter().all(|p| p.eval(point).is_zero())
}

/// Stratum containing `point`, if the point is on `Z`.
pub fn locate(strat: &Stratification, action: &LinearAction, point: &[Q]) -> Option<usize> {
    if !on_fibre(action, point) {
        return None;
    }
    let stab = orbit_type(action, point);
    strat.strata.iter().find(|s| s.stabilizer == stab).map(|s| s.id)
}

/// Tangent space of the stratum through `point`: kernel of the moment
/// differentials inside the stabilizer-fixed subspace.
pub fn tangent_basis(action: &LinearAction, point: &[Q]) -> Result<Vec<Vec<Q>>> {
    if !on_fibre(action, point) {
        return Err(Error::NotOnFibre("point does not satisfy the moment equations".into()));
    }
    let dim = 2 * action.n();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for phi in action.zero_fibre_quadrics() {
        rows.push((0..dim).map(|i| phi.diff_var(i).eval(point)).collect());
    }
    match &action.group {
        GroupDatum::Torus { weights } => {
            let StabilizerDescriptor::Torus { lattice, .. } = torus_lattice(weights, &support_of(point)) else {
                unreachable!()
            };
            let fixed = fixed_planes(weights, &lattice, action.n());
            for p in (0..action.n()).filter(|p| !fixed.contains(p)) {
                for c in [2 * p, 2 * p + 1] {
                    let mut r = vec![Q::zero(); dim];
                    r[c] = Q::one();
                    rows.push(r);
                }
            }
        }
        GroupDatum::Finite { elements, .. } => {
            for g in stabilizer_elements(elements, point) {
                for (i, row) in g.iter().enumerate() {
                    let mut r = row.clone();
                    r[i] -= Q::one();
                    rows.push(r);
                }
            }
        }
    }
    Ok(kernel(&rows, dim))
}

/// Integer `N` as `a² + b²`, searching up to a size limit.
pub(crate) fn two_squares(n: &num_bigint::BigInt) -> Option<(num_bigint::BigInt, num_bigint::BigInt)> {
    use num_bigint::BigInt;
    if n.is_negative() {
        return None;
    }
    let limit: BigInt = BigInt::from(1u64) << 44;
    if *n > limit {
        return None;
    }
    let nn: u64 = n.try_into().ok()?;
    let mut a: u64 = 0;
    while a * a <= nn {
        let rest = nn - a * a;
        let b = Roots::sqrt(&rest);
        if b * b == rest {
            return Some((BigInt::from(a), BigInt::from(b)));
        }
        a += 1;
    }
    None
}

/// Random point of a circle of radius² `rho` with rational coordinates.
pub(crate) fn rational_circle_point(rho: &Q, rng: &mut ChaCha8Rng) -> Option<(Q, Q)> {
    if rho.is_zero() {
        return Some((Q::zero(), Q::zero()));
    }
    let (p, d) = (rho.numer(), rho.denom());
    let (a, b) = two_squares(&(p * d))?;
    let x = Q::new(a, d.clone());
    let y = Q::new(b, d.clone());
    let t = Q::new(rng.gen_range(-40i64..=40).into(), rng.gen_range(1i64..=29).into());
    let den = Q::one() + &t * &t;
    let cs = (Q::one() - &t * &t) / &den;
    let sn = (q(2) * &t) / &den;
    Some((&x * &cs - &y * &sn, &x * &sn + &y * &cs))
}

const MAX_ATTEMPTS: usize = 20_000;

/// `count` exact rational points of a stratum, deterministic in `seed`.
pub fn sample_points(
    action: &LinearAction,
    strat: &Stratification,
    stratum: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<StratumSample>> {
    let s = strat
        .strata
        .get(stratum)
        .ok_or_else(|| Error::EmptyStratum(format!("no stratum {stratum}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((stratum as u64) << 40));
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * count.max(1) {
            return Err(Error::Sampling(format!("no rational parametrization found for stratum {stratum}")));
        }
        let point = match &action.group {
            GroupDatum::Torus { weights } => torus_point(action, weights, s, &mut rng),
            GroupDatum::Finite { .. } => Some(finite_point(2 * action.n(), s, &mut rng)),
        };
        let Some(point) = point else { continue };
        if orbit_type(action, &point) != s.stabilizer {
            continue;
        }
        let tangent_basis = tangent_basis(action, &point)?;
        out.push(StratumSample { point, stratum, tangent_basis });
        if s.dimension == 0 && !out.is_empty() {
            // a point stratum: repeat the single point
            while out.len() < count {
                out.push(out[0].clone());
            }
        }
    }
    Ok(out)
}

fn torus_point(action: &LinearAction, weights: &[Vec<i64>], s: &StratumDescriptor, rng: &mut ChaCha8Rng) -> Option<Vec<Q>> {
    let n = action.n();
    let smax = s.supports.last()?;
    let c: Vec<Q> = action.level.iter().map(|l| -q(2) * l).collect();
    let (vertices, rays) = polyhedron(weights, &c, n);
    let inside = |v: &Vec<Q>| supp(v).iter().all(|i| smax.contains(i));
    let vs: Vec<&Vec<Q>> = vertices.iter().filter(|v| inside(v)).collect();
    let rs: Vec<&Vec<Q>> = rays.iter().filter(|v| inside(v)).collect();
    let mut rho = vec![Q::zero(); n];
    let wts: Vec<i64> = vs.iter().map(|_| rng.gen_range(1..=60)).collect();
    let total: i64 = wts.iter().sum();
    for (v, w) in vs.iter().zip(&wts) {
        for (r, x) in rho.iter_mut().zip(v.iter()) {
            *r += x * Q::new((*w).into(), total.into());
        }
    }
    for ray in rs {
        let scale = Q::new(rng.gen_range(1i64..=60).into(), rng.gen_range(1i64..=13).into());
        for (r, x) in rho.iter_mut().zip(ray.iter()) {
            *r += x * &scale;
        }
    }
    if c.iter().all(Zero::is_zero) && rho.iter().any(|r| !r.is_zero()) {
        // cones scale freely; pick a scale making the radii small integers where possible
        let l = rho.iter().fold(num_bigint::BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let lq = Q::from_integer(l);
        for r in rho.iter_mut() {
            *r = &*r * &lq;
        }
    }
    let mut point = Vec::with_capacity(2 * n);
    for r in &rho {
        let (x, y) = rational_circle_point(r, rng)?;
        point.push(x);
        point.push(y);
    }
    Some(point)
}

fn finite_point(dim: usize, s: &StratumDescriptor, rng: &mut ChaCha8Rng) -> Vec<Q> {
    let mut p = vec![Q::zero(); dim];
    for b in &s.fixed_basis {
        let c = Q::new(rng.gen_range(-40i64..=40).into(), rng.gen_range(1i64..=9).into());
        for (x, y) in p.iter_mut().zip(b) {
            *x += &c * y;
        }
    }
    p
}

/// Principal samples, or an error when `Z` is empty.
pub fn principal_samples(action: &LinearAction, strat: &Stratification, count: usize, seed: u64) -> Result<Vec<StratumSample>> {
    let p = strat
        .principal()
        .ok_or_else(|| Error::EmptyStratum(format!("{} has an empty zero fibre", action.name)))?;
    sample_points(action, strat, p.id, count, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::builtin;

    fn z(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn stabilizers_of_points() {
        let cone = builtin("cone11", 0).unwrap();
        let origin = orbit_type(&cone, &z(&[0, 0, 0, 0]));
        assert!(matches!(origin, StabilizerDescriptor::Torus { continuous_dim: 1, .. }));
        assert!(orbit_type(&cone, &z(&[1, 0, 0, 1])).is_trivial());
        let tear = builtin("teardrop", 0).unwrap();
        let st = orbit_type(&tear, &z(&[0, 0, 1, 0]));
        assert!(matches!(st, StabilizerDescriptor::Torus { continuous_dim: 0, finite_order: 2, .. }));
        let z3 = builtin("zk-cone", 3).unwrap();
        assert!(matches!(orbit_type(&z3, &z(&[0, 0])), StabilizerDescriptor::Finite { ref elements } if elements.len() == 3));
    }

    #[test]
    fn builtin_strata() {
        let cone = strata_of_z(&builtin("cone11", 0).unwrap());
        assert_eq!(cone.strata.len(), 2);
        assert_eq!(cone.principal().unwrap().dimension, 3);
        assert_eq!(cone.strata[0].dimension, 0);
        assert_eq!(cone.hasse, vec![(0, 1)]);
        let cp1 = strata_of_z(&builtin("cp1", 0).unwrap());
        assert_eq!(cp1.strata.len(), 1);
        assert_eq!(cp1.strata[0].dimension, 3);
        let tear = strata_of_z(&builtin("teardrop", 0).unwrap());
        assert_eq!(tear.strata.len(), 2);
        assert_eq!(tear.strata[0].stabilizer.describe(), "Z2");
        assert_eq!(tear.strata[0].dimension, 1);
        assert!(tear.leq(0, 1) && !tear.leq(1, 0));
        let zk = strata_of_z(&builtin("zk-cone", 4).unwrap());
        assert_eq!(zk.strata.len(), 2);
        assert_eq!(zk.principal().unwrap().dimension, 2);
    }

    #[test]
    fn empty_fibre_warns() {
        let a = LinearAction::torus("e", 1, vec![vec![1]], vec![q(1)]).unwrap();
        let s = strata_of_z(&a);
        assert!(s.is_empty());
        assert_eq!(s.warnings.len(), 1);
        assert!(principal_samples(&a, &s, 1, 0).is_err());
    }

    #[test]
    fn samples_lie_on_strata() {
        for name in ["cone11", "cp1", "teardrop", "zk-cone"] {
            let a = builtin(name, 3).unwrap();
            let strat = strata_of_z(&a);
            for s in &strat.strata {
                let pts = sample_points(&a, &strat, s.id, 5, 7).unwrap();
                assert_eq!(pts.len(), 5);
                for p in &pts {
                    assert_eq!(locate(&strat, &a, &p.point), Some(s.id), "{name}");
                    assert_eq!(p.tangent_basis.len(), s.dimension, "{name}");
                }
            }
            assert!(sample_points(&a, &strat, 0, 0, 1).unwrap().is_empty());
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let a = builtin("cone11", 0).unwrap();
        let s = strata_of_z(&a);
        let p = s.principal().unwrap().id;
        assert_eq!(sample_points(&a, &s, p, 4, 3).unwrap(), sample_points(&a, &s, p, 4, 3).unwrap());
        assert_ne!(sample_points(&a, &s, p, 4, 3).unwrap(), sample_points(&a, &s, p, 4, 4).unwrap());
    }

    #[test]
    fn tangent_examples() {
        let tear = builtin("teardrop", 0).unwrap();
        let t = tangent_basis(&tear, &z(&[0, 0, 1, 0])).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t[0][0].is_zero() && t[0][1].is_zero());
        let cone = builtin("cone11", 0).unwrap();
        assert!(tangent_basis(&cone, &z(&[0, 0, 0, 0])).unwrap().is_empty());
        assert!(tangent_basis(&cone, &z(&[1, 0, 0, 0])).is_err());
    }

    #[test]
    fn two_square_search() {
        assert!(two_squares(&3.into()).is_none());
        assert_eq!(two_squares(&25.into()), Some((0.into(), 5.into())));
    }
}
