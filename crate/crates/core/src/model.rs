//! Hamiltonian models consumed by the quotient complex.
//!
//! A model supplies an ambient layout, the vector fields whose contractions
//! must vanish on the principal stratum, spanning sets of invariant forms
//! split into blocks that every later linear condition respects, and exact
//! sample frames (a point of the principal stratum with a tangent basis).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::actions::{GroupDatum, LinearAction};
use crate::error::{Error, Result};
use crate::form::{Form, PolyMap, VectorField};
use crate::linalg::{combinations, det, kernel, Echelon};
use crate::poly::{monomials_of_degree, Layout, Monomial, Poly, Q};
use crate::stratification::{principal_samples, strata_of_z};

/// How the infinite-dimensional complex is cut down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Filtration {
    /// Coefficient degree plus number of linear covectors (preserved by `d`).
    ScalingWeight,
    /// Coefficient degree alone (lowered by `d`).
    CoefficientDegree,
}

/// Block label: torus weight class (up to sign) and, for the scaling
/// filtration, the exact scaling weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BlockKey {
    pub weight: Vec<i64>,
    pub grade: Option<u32>,
}

/// Point of the principal stratum with ring-variable values and a tangent basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub values: Vec<Q>,
    pub tangent: Vec<Vec<Q>>,
}

pub const DEFAULT_BLOCK_CAP: usize = 6000;

pub trait Model: Sync {
    fn label(&self) -> String;
    fn layout(&self) -> Layout;
    /// Fields `ξ_M` whose contractions must vanish on principal tangents.
    fn horizontal_fields(&self) -> Vec<VectorField>;
    /// Functions vanishing on `Z`.
    fn moment(&self) -> Vec<Poly>;
    fn is_invariant(&self, a: &Form) -> bool;
    fn default_filtration(&self) -> Filtration;
    /// Independent invariant `k`-forms with filtration value `≤ max`, by block.
    fn candidate_blocks(&self, k: usize, filtration: Filtration, max: u32) -> Result<Vec<(BlockKey, Vec<Form>)>>;
    fn principal_samples(&self, count: usize, seed: u64) -> Result<Vec<Sample>>;
    fn principal_dim(&self) -> usize;
    /// Block of a single invariant form, if it lies in one.
    fn block_of(&self, a: &Form, filtration: Filtration) -> Option<BlockKey>;
}

/// Dense coordinates for a family of forms.
pub(crate) fn coordinates(forms: &[Form]) -> Vec<Vec<Q>> {
    let mut index: HashMap<(Vec<usize>, Monomial), usize> = HashMap::new();
    for f in forms {
        for (idx, c) in f.components() {
            for (m, _) in c.terms() {
                let n = index.len();
                index.entry((idx.clone(), m.clone())).or_insert(n);
            }
        }
    }
    forms
        .iter()
        .map(|f| {
            let mut v = vec![Q::zero(); index.len()];
            for (idx, c) in f.components() {
                for (m, x) in c.terms() {
                    v[index[&(idx.clone(), m.clone())]] = x.clone();
                }
            }
            v
        })
        .collect()
}

/// Linearly independent subfamily (first occurrences kept).
pub fn independent(forms: Vec<Form>) -> Vec<Form> {
    let coords = coordinates(&forms);
    let ncols = coords.first().map_or(0, Vec::len);
    let mut e = Echelon::new(ncols);
    forms
        .into_iter()
        .zip(coords)
        .filter_map(|(f, v)| e.insert(v).then_some(f))
        .collect()
}

pub fn combine(layout: Layout, degree: usize, forms: &[Form], coeffs: &[Q]) -> Form {
    let mut acc = Form::zero(layout, degree);
    for (f, c) in forms.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = acc.add(&f.scale(c));
        }
    }
    acc
}

/// Combinations of `forms` annihilated by a linear operator, as forms.
pub fn kernel_of_map(forms: &[Form], op: impl Fn(&Form) -> Form) -> Vec<Form> {
    let Some(first) = forms.first() else { return vec![] };
    let images: Vec<Form> = forms.iter().map(op).collect();
    let coords = coordinates(&images);
    let nrows = coords.first().map_or(0, Vec::len);
    let rows: Vec<Vec<Q>> = (0..nrows).map(|r| coords.iter().map(|c| c[r].clone()).collect()).collect();
    kernel(&rows, forms.len())
        .into_iter()
        .map(|c| combine(first.layout(), first.degree(), forms, &c))
        .collect()
}

#[derive(Clone)]
struct CForm {
    re: Form,
    im: Form,
}

impl CForm {
    fn wedge(&self, o: &CForm) -> CForm {
        CForm {
            re: self.re.wedge(&o.re).sub(&self.im.wedge(&o.im)),
            im: self.re.wedge(&o.im).add(&self.im.wedge(&o.re)),
        }
    }

    fn mul(&self, p: &(Poly, Poly)) -> CForm {
        CForm {
            re: self.re.mul_function(&p.0).sub(&self.im.mul_function(&p.1)),
            im: self.re.mul_function(&p.1).add(&self.im.mul_function(&p.0)),
        }
    }
}

fn cmul(a: &(Poly, Poly), b: &(Poly, Poly)) -> (Poly, Poly) {
    (&(&a.0 * &b.0) - &(&a.1 * &b.1), &(&a.0 * &b.1) + &(&a.1 * &b.0))
}

#[derive(Clone, Copy)]
struct PlaneChoice {
    a: u32,
    b: u32,
    cov: u8,
}

fn enumerate_planes(n: usize, k: usize, p: u32, out: &mut Vec<Vec<PlaneChoice>>) {
    fn rec(i: usize, n: usize, k: usize, p: u32, cur: &mut Vec<PlaneChoice>, out: &mut Vec<Vec<PlaneChoice>>) {
        if i == n {
            if k == 0 && p == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for cov in 0u8..4 {
            let used = cov.count_ones() as usize;
            if used > k {
                continue;
            }
            for a in 0..=p {
                for b in 0..=p - a {
                    cur.push(PlaneChoice { a, b, cov });
                    rec(i + 1, n, k - used, p - a - b, cur, out);
                    cur.pop();
                }
            }
        }
    }
    rec(0, n, k, p, &mut Vec::with_capacity(n), out);
}

fn canonical_weight(mu: Vec<i64>) -> Vec<i64> {
    let neg: Vec<i64> = mu.iter().map(|x| -x).collect();
    if neg > mu {
        neg
    } else {
        mu
    }
}

/// Real and imaginary parts of `z^a z̄^b dz_I ∧ dz̄_J` grouped by `±μ`.
fn torus_candidates(n: usize, weights: &[Vec<i64>], k: usize, p: u32, cap: usize) -> Result<BTreeMap<Vec<i64>, Vec<Form>>> {
    let l = Layout::linear(2 * n);
    let mut choices = Vec::new();
    enumerate_planes(n, k, p, &mut choices);
    let mut blocks: BTreeMap<Vec<i64>, Vec<Form>> = BTreeMap::new();
    let z = |i: usize| (Poly::var(l, 2 * i), Poly::var(l, 2 * i + 1));
    let zb = |i: usize| (Poly::var(l, 2 * i), -&Poly::var(l, 2 * i + 1));
    for ch in choices {
        let mu: Vec<i64> = ch
            .iter()
            .map(|c| c.a as i64 - c.b as i64 + (c.cov & 1) as i64 - ((c.cov >> 1) & 1) as i64)
            .collect();
        if weights.iter().any(|row| row.iter().zip(&mu).map(|(w, m)| w * m).sum::<i64>() != 0) {
            continue;
        }
        let mut coef = (Poly::one(l), Poly::zero(l));
        let mut form = CForm { re: Form::constant(l, Q::one()), im: Form::zero(l, 0) };
        for (i, c) in ch.iter().enumerate() {
            for _ in 0..c.a {
                coef = cmul(&coef, &z(i));
            }
            for _ in 0..c.b {
                coef = cmul(&coef, &zb(i));
            }
            let (dx, dy) = (Form::dx(l, 2 * i), Form::dx(l, 2 * i + 1));
            let cov = match c.cov {
                0 => None,
                1 => Some(CForm { re: dx, im: dy }),
                2 => Some(CForm { re: dx, im: dy.neg() }),
                _ => Some(CForm { re: dx.wedge(&dy), im: Form::zero(l, 2) }),
            };
            if let Some(cv) = cov {
                form = form.wedge(&cv);
            }
        }
        let f = form.mul(&coef);
        let entry = blocks.entry(canonical_weight(mu)).or_default();
        for part in [f.re, f.im] {
            if !part.is_zero() {
                entry.push(part);
            }
        }
        if entry.len() > 2 * cap {
            return Err(Error::ResourceCap(format!("more than {cap} candidate {k}-forms in one block")));
        }
    }
    Ok(blocks.into_iter().map(|(mu, fs)| (mu, independent(fs))).collect())
}

fn grades(k: usize, filtration: Filtration, max: u32) -> Vec<(Option<u32>, Vec<u32>)> {
    match filtration {
        Filtration::ScalingWeight => (k as u32..=max.max(k as u32))
            .filter(|&w| w <= max)
            .map(|w| (Some(w), vec![w - k as u32]))
            .collect(),
        Filtration::CoefficientDegree => vec![(None, (0..=max).collect())],
    }
}

fn check_cap(blocks: &[(BlockKey, Vec<Form>)], cap: usize) -> Result<()> {
    if let Some((key, b)) = blocks.iter().find(|(_, b)| b.len() > cap) {
        return Err(Error::ResourceCap(format!(
            "{} candidate forms in block {:?} exceed the cap of {cap}",
            b.len(),
            key
        )));
    }
    Ok(())
}

/// Invariant monomial-form span by group averaging and exact Lie-derivative kernels.
pub fn averaged_candidates(
    layout: Layout,
    group: &[PolyMap],
    invariance_fields: &[VectorField],
    k: usize,
    filtration: Filtration,
    max: u32,
) -> Vec<(BlockKey, Vec<Form>)> {
    let mut out = Vec::new();
    for (grade, ps) in grades(k, filtration, max) {
        let mut forms = Vec::new();
        for p in ps {
            for idx in combinations(layout.dim(), k) {
                let lin = idx.iter().filter(|&&i| i < layout.linear).count() as u32;
                if filtration == Filtration::ScalingWeight && grade != Some(p + lin) {
                    continue;
                }
                for m in monomials_of_degree(layout.linear, p) {
                    let mut e = m;
                    e.resize(layout.nvars(), 0);
                    let c = Poly::from_terms(layout, [(Monomial(e), Q::one())]);
                    let f = Form::from_components(layout, k, [(idx.clone(), c)]).expect("monomial");
                    let avg = if group.is_empty() {
                        f
                    } else {
                        let mut acc = Form::zero(layout, k);
                        for g in group {
                            acc = acc.add(&f.pullback(g));
                        }
                        acc.scale(&(Q::one() / crate::poly::q(group.len() as i64)))
                    };
                    if !avg.is_zero() {
                        forms.push(avg);
                    }
                }
            }
        }
        let mut forms = independent(forms);
        for v in invariance_fields {
            forms = independent(kernel_of_map(&forms, |f| f.lie(v)));
        }
        if !forms.is_empty() {
            out.push((BlockKey { weight: vec![], grade }, forms));
        }
    }
    out
}

impl Model for LinearAction {
    fn label(&self) -> String {
        self.name.clone()
    }

    fn layout(&self) -> Layout {
        LinearAction::layout(self)
    }

    fn horizontal_fields(&self) -> Vec<VectorField> {
        self.basis_fields()
    }

    fn moment(&self) -> Vec<Poly> {
        self.zero_fibre_quadrics()
    }

    fn is_invariant(&self, a: &Form) -> bool {
        LinearAction::is_invariant(self, a)
    }

    fn default_filtration(&self) -> Filtration {
        if self.level_is_zero() {
            Filtration::ScalingWeight
        } else {
            Filtration::CoefficientDegree
        }
    }

    fn candidate_blocks(&self, k: usize, filtration: Filtration, max: u32) -> Result<Vec<(BlockKey, Vec<Form>)>> {
        if k > 2 * self.n() {
            return Ok(vec![]);
        }
        let blocks = match &self.group {
            GroupDatum::Torus { weights } => {
                let mut acc: BTreeMap<BlockKey, Vec<Form>> = BTreeMap::new();
                for (grade, ps) in grades(k, filtration, max) {
                    for p in ps {
                        for (mu, fs) in torus_candidates(self.n(), weights, k, p, DEFAULT_BLOCK_CAP)? {
                            acc.entry(BlockKey { weight: mu, grade }).or_default().extend(fs);
                        }
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_empty()).collect()
            }
            GroupDatum::Finite { elements, .. } => {
                let maps: Vec<PolyMap> = elements.iter().map(|g| PolyMap::linear_map(2 * self.n(), g)).collect();
                averaged_candidates(LinearAction::layout(self), &maps, &[], k, filtration, max)
            }
        };
        check_cap(&blocks, DEFAULT_BLOCK_CAP)?;
        Ok(blocks)
    }

    fn principal_samples(&self, count: usize, seed: u64) -> Result<Vec<Sample>> {
        let strat = strata_of_z(self);
        Ok(principal_samples(self, &strat, count, seed)?
            .into_iter()
            .map(|s| Sample { values: s.point, tangent: s.tangent_basis })
            .collect())
    }

    fn principal_dim(&self) -> usize {
        strata_of_z(self).principal().map_or(0, |p| p.dimension)
    }

    fn block_of(&self, a: &Form, filtration: Filtration) -> Option<BlockKey> {
        let grade = match filtration {
            Filtration::ScalingWeight => {
                let w = a.scaling_weight().unwrap_or(a.degree() as u32);
                if a.scaling_part(w) != *a {
                    return None;
                }
                Some(w)
            }
            Filtration::CoefficientDegree => None,
        };
        let weight = match &self.group {
            GroupDatum::Torus { .. } => {
                let max = grade.unwrap_or_else(|| a.coefficient_degree().unwrap_or(0));
                let blocks = self.candidate_blocks(a.degree(), filtration, max).ok()?;
                blocks.into_iter().find_map(|(key, forms)| {
                    let mut fam = forms.clone();
                    fam.push(a.clone());
                    (key.grade == grade && independent(fam).len() == forms.len()).then_some(key.weight)
                })?
            }
            GroupDatum::Finite { .. } => vec![],
        };
        Some(BlockKey { weight, grade })
    }
}

/// Minor tables `det(V[J], I)` for one list of vectors and degree.
struct MinorTable {
    /// Rows `J` in order.
    rows: usize,
    by_index: HashMap<Vec<usize>, Vec<Q>>,
}

fn minor_table(vectors: &[Vec<Q>], dim: usize, subsets: &[Vec<usize>], k: usize) -> MinorTable {
    let mut by_index = HashMap::new();
    for idx in combinations(dim, k) {
        let col: Vec<Q> = subsets
            .iter()
            .map(|j| {
                let m: Vec<Vec<Q>> = j.iter().map(|&a| idx.iter().map(|&i| vectors[a][i].clone()).collect()).collect();
                det(m)
            })
            .collect();
        if col.iter().any(|x| !x.is_zero()) {
            by_index.insert(idx, col);
        }
    }
    MinorTable { rows: subsets.len(), by_index }
}

const POWER_CAP: usize = 32;

/// A sample together with cached powers and minors for fast evaluation.
pub struct Frame {
    pub sample: Sample,
    pub field_values: Vec<Vec<Q>>,
    dim: usize,
    powers: Vec<Vec<Q>>,
    restrict_cache: Mutex<HashMap<usize, Arc<MinorTable>>>,
    contract_cache: Mutex<HashMap<(usize, usize), Arc<MinorTable>>>,
}

impl Frame {
    pub fn new(sample: Sample, fields: &[VectorField], layout: Layout) -> Self {
        let powers = sample
            .values
            .iter()
            .map(|v| {
                let mut p = vec![Q::one()];
                for e in 1..=POWER_CAP {
                    let next = &p[e - 1] * v;
                    p.push(next);
                }
                p
            })
            .collect();
        let field_values = fields.iter().map(|f| f.eval(&sample.values)).collect();
        Frame {
            sample,
            field_values,
            dim: layout.dim(),
            powers,
            restrict_cache: Mutex::new(HashMap::new()),
            contract_cache: Mutex::new(HashMap::new()),
        }
    }

    fn eval_poly(&self, p: &Poly) -> Q {
        if p.degree().unwrap_or(0) as usize <= POWER_CAP {
            p.eval_with_powers(&self.powers)
        } else {
            p.eval(&self.sample.values)
        }
    }

    fn restrict_table(&self, k: usize) -> Arc<MinorTable> {
        let mut cache = self.restrict_cache.lock().expect("cache");
        cache
            .entry(k)
            .or_insert_with(|| {
                let subsets = combinations(self.sample.tangent.len(), k);
                Arc::new(minor_table(&self.sample.tangent, self.dim, &subsets, k))
            })
            .clone()
    }

    fn contract_table(&self, field: usize, k: usize) -> Arc<MinorTable> {
        let mut cache = self.contract_cache.lock().expect("cache");
        cache
            .entry((field, k))
            .or_insert_with(|| {
                let mut vectors = vec![self.field_values[field].clone()];
                vectors.extend(self.sample.tangent.iter().cloned());
                let subsets: Vec<Vec<usize>> = combinations(self.sample.tangent.len(), k - 1)
                    .into_iter()
                    .map(|j| std::iter::once(0).chain(j.into_iter().map(|x| x + 1)).collect())
                    .collect();
                Arc::new(minor_table(&vectors, self.dim, &subsets, k))
            })
            .clone()
    }

    fn apply(&self, a: &Form, table: &MinorTable) -> Vec<Q> {
        let mut out = vec![Q::zero(); table.rows];
        for (idx, c) in a.components() {
            let Some(col) = table.by_index.get(idx) else { continue };
            let cz = self.eval_poly(c);
            if cz.is_zero() {
                continue;
            }
            for (o, m) in out.iter_mut().zip(col) {
                if !m.is_zero() {
                    *o += &cz * m;
                }
            }
        }
        out
    }

    /// Values of the restriction of `a` on all `k`-subsets of the tangent basis.
    pub fn restrict(&self, a: &Form) -> Vec<Q> {
        let k = a.degree();
        if k == 0 {
            return a.component(&[]).map_or(vec![Q::zero()], |c| vec![self.eval_poly(c)]);
        }
        self.apply(a, &self.restrict_table(k))
    }

    /// Values of `a(ξ_f, T_J)` for every field and `(k−1)`-subset `J`.
    pub fn contract(&self, a: &Form) -> Vec<Q> {
        let k = a.degree();
        if k == 0 {
            return vec![];
        }
        let mut out = Vec::new();
        for f in 0..self.field_values.len() {
            out.extend(self.apply(a, &self.contract_table(f, k)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::builtin;
    use crate::poly::q;

    #[test]
    fn torus_blocks_are_invariant() {
        for name in ["cone11", "cp1", "teardrop"] {
            let a = builtin(name, 0).unwrap();
            for k in 0..=4 {
                for (_, forms) in a.candidate_blocks(k, a.default_filtration(), 4).unwrap() {
                    for f in forms {
                        assert!(a.is_invariant(&f), "{name} {k} {f}");
                    }
                }
            }
        }
    }

    #[test]
    fn cone_invariant_functions() {
        // invariants of weight (1,−1) in scaling weight 2: |z1|², |z2|², Re z1z2, Im z1z2
        let a = builtin("cone11", 0).unwrap();
        let blocks = a.candidate_blocks(0, Filtration::ScalingWeight, 2).unwrap();
        let total: usize = blocks.iter().filter(|(k, _)| k.grade == Some(2)).map(|(_, f)| f.len()).sum();
        assert_eq!(total, 4);
        let ones: usize = blocks.iter().filter(|(k, _)| k.grade == Some(0)).map(|(_, f)| f.len()).sum();
        assert_eq!(ones, 1);
    }

    #[test]
    fn finite_averaging_counts() {
        // ℤ2 = −I on ℂ: invariant functions are even polynomials; 3 of degree 2
        let a = builtin("zk-cone", 2).unwrap();
        let b = a.candidate_blocks(0, Filtration::ScalingWeight, 2).unwrap();
        assert_eq!(b.iter().map(|(_, f)| f.len()).sum::<usize>(), 1 + 3);
        let one_forms = a.candidate_blocks(1, Filtration::ScalingWeight, 2).unwrap();
        assert_eq!(one_forms.iter().map(|(_, f)| f.len()).sum::<usize>(), 4);
    }

    #[test]
    fn frame_evaluation() {
        let a = builtin("cp1", 0).unwrap();
        let s = Model::principal_samples(&a, 1, 3).unwrap().remove(0);
        let frame = Frame::new(s.clone(), &a.horizontal_fields(), Model::layout(&a));
        let omega = a.omega();
        let vals = frame.restrict(&omega);
        assert_eq!(vals.len(), 3);
        for (j, pair) in combinations(3, 2).into_iter().enumerate() {
            let vs: Vec<Vec<Q>> = pair.iter().map(|&i| s.tangent[i].clone()).collect();
            assert_eq!(vals[j], omega.evaluate(&s.values, &vs));
        }
        let c = frame.contract(&omega);
        assert_eq!(c.len(), 3);
        let xi = a.basis_fields()[0].eval(&s.values);
        for (j, t) in s.tangent.iter().enumerate() {
            assert_eq!(c[j], omega.evaluate(&s.values, &[xi.clone(), t.clone()]));
        }
        assert_eq!(frame.restrict(&Form::constant(Model::layout(&a), q(5))), vec![q(5)]);
    }

    #[test]
    fn kernel_of_map_finds_closed_forms() {
        let l = Layout::linear(2);
        let fs = vec![Form::dx(l, 0), Form::dx(l, 1).mul_function(&Poly::var(l, 0))];
        let closed = kernel_of_map(&fs, |f| f.d());
        assert_eq!(closed, vec![Form::dx(l, 0)]);
    }
}
