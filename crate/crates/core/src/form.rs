//! Differential forms with polynomial coefficients, vector fields and
//! polynomial maps.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{combinations, det};
use crate::poly::{coord_names, q, Layout, Monomial, Poly, Q};

/// Sign of the permutation that sorts the concatenation `a ++ b`, or `None`
/// when the two index sets overlap.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            if i < a.len() && a[i] == b[j] {
                return None;
            }
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    Some((out, inversions % 2 == 1))
}

/// Graded differential form `Σ_I c_I dx_I` with strictly increasing `I`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    layout: Layout,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Poly>,
}

impl Form {
    pub fn zero(layout: Layout, degree: usize) -> Self {
        Form { layout, degree, comps: BTreeMap::new() }
    }

    /// 0-form from a function.
    pub fn function(f: Poly) -> Self {
        let mut out = Form::zero(f.layout(), 0);
        out.add_component(vec![], f);
        out
    }

    pub fn constant(layout: Layout, c: Q) -> Self {
        Form::function(Poly::constant(layout, c))
    }

    /// Basis covector `dx_i`.
    pub fn dx(layout: Layout, i: usize) -> Self {
        let mut out = Form::zero(layout, 1);
        out.add_component(vec![i], Poly::one(layout));
        out
    }

    /// `c · dx_I` for any index list; sorted with the permutation sign, zero
    /// when an index repeats.
    pub fn monomial(layout: Layout, indices: &[usize], c: Poly) -> Result<Self> {
        let mut idx = indices.to_vec();
        for &i in &idx {
            if i >= layout.dim() {
                return Err(Error::Dimension(format!("index {i} out of range for dimension {}", layout.dim())));
            }
        }
        let mut out = Form::zero(layout, idx.len());
        let mut odd = false;
        for a in 0..idx.len() {
            for b in 0..idx.len() - 1 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    odd = !odd;
                }
            }
        }
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return Ok(out);
        }
        out.add_component(idx, if odd { -&c } else { c });
        Ok(out)
    }

    pub fn from_components<I: IntoIterator<Item = (Vec<usize>, Poly)>>(
        layout: Layout,
        degree: usize,
        comps: I,
    ) -> Result<Self> {
        if degree > layout.dim() {
            return Err(Error::Dimension(format!("degree {degree} exceeds dimension {}", layout.dim())));
        }
        let mut out = Form::zero(layout, degree);
        for (idx, c) in comps {
            if idx.len() != degree || idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= layout.dim()) {
                return Err(Error::Dimension(format!("bad index list {idx:?} for a {degree}-form")));
            }
            out.add_component(idx, c);
        }
        Ok(out)
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.comps.iter()
    }

    pub fn component(&self, idx: &[usize]) -> Option<&Poly> {
        self.comps.get(idx)
    }

    pub fn num_components(&self) -> usize {
        self.comps.len()
    }

    /// Largest linear degree among coefficients.
    pub fn coefficient_degree(&self) -> Option<u32> {
        self.comps.values().filter_map(Poly::linear_degree).max()
    }

    /// Coefficient degree plus the number of linear covectors, maximised over terms.
    pub fn scaling_weight(&self) -> Option<u32> {
        self.comps
            .iter()
            .filter_map(|(idx, c)| {
                let covs = idx.iter().filter(|&&i| i < self.layout.linear).count() as u32;
                c.linear_degree().map(|d| d + covs)
            })
            .max()
    }

    fn add_component(&mut self, idx: Vec<usize>, c: Poly) {
        if c.is_zero() {
            return;
        }
        match self.comps.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &Form) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::Dimension(format!(
                "ambient layouts differ: {:?} vs {:?}",
                self.layout, other.layout
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Form) -> Result<Form> {
        self.check_same(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(Error::Degree(format!("cannot add a {}-form and a {}-form", self.degree, other.degree)));
        }
        let mut out = self.clone();
        for (idx, c) in &other.comps {
            out.add_component(idx.clone(), c.clone());
        }
        Ok(out)
    }

    fn with_degree(mut self, k: usize) -> Form {
        debug_assert!(self.is_zero() || self.degree == k);
        self.degree = k;
        self
    }

    pub fn add(&self, other: &Form) -> Form {
        self.try_add(other).expect("form addition")
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.scale(&q(-1))
    }

    pub fn scale(&self, c: &Q) -> Form {
        if c.is_zero() {
            return Form::zero(self.layout, self.degree);
        }
        Form {
            layout: self.layout,
            degree: self.degree,
            comps: self.comps.iter().map(|(i, p)| (i.clone(), p.scale(c))).collect(),
        }
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_function(&self, f: &Poly) -> Form {
        let mut out = Form::zero(self.layout, self.degree);
        for (idx, c) in &self.comps {
            out.add_component(idx.clone(), c * f);
        }
        out
    }

    pub fn try_wedge(&self, other: &Form) -> Result<Form> {
        self.check_same(other)?;
        let degree = self.degree + other.degree;
        let mut out = Form::zero(self.layout, degree);
        if degree > self.layout.dim() {
            return Ok(out);
        }
        for (i1, c1) in &self.comps {
            for (i2, c2) in &other.comps {
                if let Some((idx, odd)) = merge_sign(i1, i2) {
                    let prod = c1 * c2;
                    out.add_component(idx, if odd { -&prod } else { prod });
                }
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Form {
        self.try_wedge(other).expect("wedge")
    }

    /// Exterior derivative.
    pub fn d(&self) -> Form {
        let dim = self.layout.dim();
        let mut out = Form::zero(self.layout, (self.degree + 1).min(dim));
        out.degree = self.degree + 1;
        if self.degree >= dim {
            return out;
        }
        for (idx, c) in &self.comps {
            for j in 0..dim {
                if idx.contains(&j) {
                    continue;
                }
                let dc = c.partial(j);
                if dc.is_zero() {
                    continue;
                }
                let (sorted, odd) = merge_sign(&[j], idx).unwrap();
                out.add_component(sorted, if odd { -&dc } else { dc });
            }
        }
        out
    }

    /// Contraction `i(v)a`; zero on 0-forms.
    pub fn try_interior(&self, v: &VectorField) -> Result<Form> {
        if v.layout != self.layout {
            return Err(Error::Dimension("vector field and form live on different spaces".into()));
        }
        if self.degree == 0 {
            return Ok(Form::zero(self.layout, 0));
        }
        let mut out = Form::zero(self.layout, self.degree - 1);
        for (idx, c) in &self.comps {
            for (pos, &i) in idx.iter().enumerate() {
                if v.comps[i].is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(pos);
                let t = c * &v.comps[i];
                out.add_component(rest, if pos % 2 == 1 { -&t } else { t });
            }
        }
        Ok(out)
    }

    pub fn interior(&self, v: &VectorField) -> Form {
        self.try_interior(v).expect("interior product")
    }

    /// Lie derivative by Cartan's formula `d i(v) + i(v) d`.
    pub fn lie(&self, v: &VectorField) -> Form {
        let a = self.interior(v).d();
        let b = self.d().interior(v);
        a.add(&b).with_degree(self.degree)
    }

    /// Algebra substitution: ring variable `v ↦ coeff_images[v]` and
    /// covector `dx_i ↦ covector_images[i]` (1-forms on `target`).
    pub fn substitute(&self, target: Layout, coeff_images: &[Poly], covector_images: &[Form]) -> Form {
        assert_eq!(covector_images.len(), self.layout.dim());
        let mut out = Form::zero(target, self.degree);
        for (idx, c) in &self.comps {
            let mut acc = Form::function(c.compose(target, coeff_images));
            for &i in idx {
                if acc.is_zero() {
                    break;
                }
                acc = acc.wedge(&covector_images[i]);
            }
            for (k, p) in acc.comps {
                out.add_component(k, p);
            }
        }
        out
    }

    /// Pullback `φ^* a`.
    pub fn try_pullback(&self, map: &PolyMap) -> Result<Form> {
        if map.target != self.layout {
            return Err(Error::Dimension(format!(
                "map target {:?} does not match form space {:?}",
                map.target, self.layout
            )));
        }
        if self.degree > map.source.dim() {
            return Ok(Form::zero(map.source, self.degree));
        }
        Ok(self.substitute(map.source, &map.coefficient_images(), &map.covector_images()))
    }

    pub fn pullback(&self, map: &PolyMap) -> Form {
        self.try_pullback(map).expect("pullback")
    }

    /// Value on `vectors` at a point given by every ring variable.
    pub fn try_evaluate(&self, values: &[Q], vectors: &[Vec<Q>]) -> Result<Q> {
        if vectors.len() != self.degree {
            return Err(Error::Arity(format!("{}-form evaluated on {} vectors", self.degree, vectors.len())));
        }
        if values.len() != self.layout.nvars() || vectors.iter().any(|v| v.len() != self.layout.dim()) {
            return Err(Error::Arity("point or vector length does not match the ambient space".into()));
        }
        let mut acc = Q::zero();
        for (idx, c) in &self.comps {
            let minor: Vec<Vec<Q>> = idx.iter().map(|&i| vectors.iter().map(|v| v[i].clone()).collect()).collect();
            let m = det(minor);
            if m.is_zero() {
                continue;
            }
            acc += c.eval(values) * m;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, values: &[Q], vectors: &[Vec<Q>]) -> Q {
        self.try_evaluate(values, vectors).expect("evaluate")
    }

    /// Coefficients evaluated at a point, keyed by index list.
    pub fn coefficients_at(&self, values: &[Q]) -> BTreeMap<Vec<usize>, Q> {
        self.comps.iter().map(|(i, c)| (i.clone(), c.eval(values))).collect()
    }

    /// Keeps only the terms of a given scaling weight.
    pub fn scaling_part(&self, w: u32) -> Form {
        let mut out = Form::zero(self.layout, self.degree);
        for (idx, c) in &self.comps {
            let covs = idx.iter().filter(|&&i| i < self.layout.linear).count() as u32;
            if w >= covs {
                out.add_component(idx.clone(), c.homogeneous_part(w - covs));
            }
        }
        out
    }

    /// Re-expresses the form on a larger layout (`coord_map`, `var_map` place
    /// old coordinates and ring variables).
    pub fn embed(&self, target: Layout, coord_map: &[usize], var_map: &[usize]) -> Form {
        let mut out = Form::zero(target, self.degree);
        for (idx, c) in &self.comps {
            let mapped: Vec<usize> = idx.iter().map(|&i| coord_map[i]).collect();
            let f = Form::monomial(target, &mapped, c.embed(target, var_map)).expect("embedding indices");
            for (k, p) in f.comps {
                out.add_component(k, p);
            }
        }
        out
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let names = coord_names(self.layout);
        let mut first = true;
        for (idx, c) in &self.comps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let covs: Vec<String> = idx.iter().map(|&i| format!("d{}", names[i])).collect();
            if idx.is_empty() {
                write!(f, "({})", c)?;
            } else if c.is_constant() && c.constant_term().is_one() {
                write!(f, "{}", covs.join(" /\\ "))?;
            } else {
                write!(f, "({})*{}", c, covs.join(" /\\ "))?;
            }
        }
        Ok(())
    }
}

/// Vector field with one polynomial component per coordinate.
#[derive(Clone, PartialEq, Eq)]
pub struct VectorField {
    layout: Layout,
    comps: Vec<Poly>,
}

impl VectorField {
    pub fn new(layout: Layout, comps: Vec<Poly>) -> Result<Self> {
        if comps.len() != layout.dim() {
            return Err(Error::Dimension(format!(
                "vector field needs {} components, got {}",
                layout.dim(),
                comps.len()
            )));
        }
        if comps.iter().any(|c| c.layout() != layout) {
            return Err(Error::Dimension("component on a different layout".into()));
        }
        Ok(VectorField { layout, comps })
    }

    pub fn zero(layout: Layout) -> Self {
        VectorField { layout, comps: vec![Poly::zero(layout); layout.dim()] }
    }

    /// Coordinate field `∂/∂x_i`.
    pub fn coordinate(layout: Layout, i: usize) -> Self {
        let mut v = VectorField::zero(layout);
        v.comps[i] = Poly::one(layout);
        v
    }

    /// Linear field `x ↦ A x` on a linear layout (`matrix` row-major).
    pub fn linear(layout: Layout, matrix: &[Vec<Q>]) -> Self {
        let n = layout.linear;
        let comps = (0..layout.dim())
            .map(|i| {
                let mut p = Poly::zero(layout);
                if i < n {
                    for j in 0..n {
                        p += &Poly::var(layout, j).scale(&matrix[i][j]);
                    }
                }
                p
            })
            .collect();
        VectorField { layout, comps }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            layout: self.layout,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> VectorField {
        VectorField { layout: self.layout, comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn eval(&self, values: &[Q]) -> Vec<Q> {
        self.comps.iter().map(|c| c.eval(values)).collect()
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.comps.iter()).finish()
    }
}

/// Image of a target angle coordinate under a [`PolyMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleImage {
    /// `θ_target = θ_source[j]`.
    Source(usize),
    /// `θ_target = 0`.
    Zero,
}

/// Polynomial map `source → target`. Linear target coordinates are
/// polynomials on the source; angle targets copy a source angle or vanish.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMap {
    source: Layout,
    target: Layout,
    linear: Vec<Poly>,
    angles: Vec<AngleImage>,
}

impl PolyMap {
    pub fn new(source: Layout, target: Layout, linear: Vec<Poly>, angles: Vec<AngleImage>) -> Result<Self> {
        if linear.len() != target.linear || angles.len() != target.angles {
            return Err(Error::Dimension(format!(
                "map to {:?} needs {} linear and {} angle images",
                target, target.linear, target.angles
            )));
        }
        if linear.iter().any(|p| p.layout() != source) {
            return Err(Error::Dimension("map component on a different layout".into()));
        }
        if angles.iter().any(|a| matches!(a, AngleImage::Source(j) if *j >= source.angles)) {
            return Err(Error::Dimension("angle image out of range".into()));
        }
        Ok(PolyMap { source, target, linear, angles })
    }

    pub fn identity(layout: Layout) -> Self {
        PolyMap {
            source: layout,
            target: layout,
            linear: (0..layout.linear).map(|i| Poly::var(layout, i)).collect(),
            angles: (0..layout.angles).map(AngleImage::Source).collect(),
        }
    }

    /// Linear map `x ↦ A x` of a vector space.
    pub fn linear_map(n: usize, matrix: &[Vec<Q>]) -> Self {
        let l = Layout::linear(n);
        let field = VectorField::linear(l, matrix);
        PolyMap { source: l, target: l, linear: field.comps, angles: vec![] }
    }

    pub fn source(&self) -> Layout {
        self.source
    }

    pub fn target(&self) -> Layout {
        self.target
    }

    pub fn linear_components(&self) -> &[Poly] {
        &self.linear
    }

    pub fn angle_images(&self) -> &[AngleImage] {
        &self.angles
    }

    /// Images of the target's ring variables.
    pub fn coefficient_images(&self) -> Vec<Poly> {
        let mut out = self.linear.clone();
        for a in &self.angles {
            match *a {
                AngleImage::Source(j) => {
                    out.push(Poly::cos(self.source, j));
                    out.push(Poly::sin(self.source, j));
                }
                AngleImage::Zero => {
                    out.push(Poly::one(self.source));
                    out.push(Poly::zero(self.source));
                }
            }
        }
        out
    }

    /// Pullbacks of the target's basis covectors.
    pub fn covector_images(&self) -> Vec<Form> {
        let mut out: Vec<Form> = self.linear.iter().map(|p| Form::function(p.clone()).d()).collect();
        for a in &self.angles {
            out.push(match *a {
                AngleImage::Source(j) => Form::dx(self.source, self.source.linear + j),
                AngleImage::Zero => Form::zero(self.source, 1),
            });
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        if inner.target != self.source {
            return Err(Error::Dimension("composition of incompatible maps".into()));
        }
        let images = inner.coefficient_images();
        let linear = self.linear.iter().map(|p| p.compose(inner.source, &images)).collect();
        let angles = self
            .angles
            .iter()
            .map(|a| match *a {
                AngleImage::Source(j) => inner.angles[j],
                AngleImage::Zero => AngleImage::Zero,
            })
            .collect();
        Ok(PolyMap { source: inner.source, target: self.target, linear, angles })
    }

    /// Jacobian of the linear components, `∂φ_i/∂x_j`.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.linear
            .iter()
            .map(|p| (0..self.source.dim()).map(|j| p.partial(j)).collect())
            .collect()
    }

    /// Linear components evaluated at a point.
    pub fn eval_linear(&self, values: &[Q]) -> Vec<Q> {
        self.linear.iter().map(|p| p.eval(values)).collect()
    }
}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolyMap")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("linear", &self.linear)
            .field("angles", &self.angles)
            .finish()
    }
}

/// Basis of `k`-forms with monomial coefficients of linear degree exactly `p`
/// on a linear layout.
pub fn monomial_forms(layout: Layout, k: usize, p: u32) -> Vec<Form> {
    let mut out = Vec::new();
    for idx in combinations(layout.dim(), k) {
        for m in crate::poly::monomials_of_degree(layout.linear, p) {
            let mut e = m;
            e.resize(layout.nvars(), 0);
            let c = Poly::from_terms(layout, [(crate::poly::Monomial(e), Q::one())]);
            out.push(Form::from_components(layout, k, [(idx.clone(), c)]).unwrap());
        }
    }
    out
}

/// Canonical JSON tree: components in index order, terms in graded-lex order,
/// coefficients as numerator/denominator strings.
impl Form {
    pub fn to_json(&self) -> serde_json::Value {
        let comps: Vec<serde_json::Value> = self
            .comps
            .iter()
            .map(|(idx, c)| {
                let terms: Vec<serde_json::Value> = c
                    .terms()
                    .map(|(m, v)| serde_json::json!({"exps": m.exps(), "num": v.numer().to_string(), "den": v.denom().to_string()}))
                    .collect();
                serde_json::json!({"indices": idx, "terms": terms})
            })
            .collect();
        serde_json::json!({
            "layout": {"linear": self.layout.linear, "angles": self.layout.angles},
            "degree": self.degree,
            "components": comps,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Form> {
        let bad = |what: &str| Error::Dimension(format!("malformed form tree: {what}"));
        let field = |o: &serde_json::Value, k: &str| o.get(k).and_then(serde_json::Value::as_u64).map(|n| n as usize).ok_or_else(|| bad(k));
        let lay = v.get("layout").ok_or_else(|| bad("layout"))?;
        let layout = Layout::with_angles(field(lay, "linear")?, field(lay, "angles")?);
        let degree = field(v, "degree")?;
        let mut out = Form::zero(layout, degree);
        for comp in v.get("components").and_then(serde_json::Value::as_array).ok_or_else(|| bad("components"))? {
            let idx: Vec<usize> = serde_json::from_value(comp.get("indices").cloned().ok_or_else(|| bad("indices"))?)?;
            let mut c = Poly::zero(layout);
            for t in comp.get("terms").and_then(serde_json::Value::as_array).ok_or_else(|| bad("terms"))? {
                let exps: Vec<u16> = serde_json::from_value(t.get("exps").cloned().ok_or_else(|| bad("exps"))?)?;
                if exps.len() != layout.nvars() {
                    return Err(bad("exponent length"));
                }
                let num = t.get("num").and_then(serde_json::Value::as_str).and_then(|s| s.parse().ok()).ok_or_else(|| bad("num"))?;
                let den: num_bigint::BigInt = t.get("den").and_then(serde_json::Value::as_str).and_then(|s| s.parse().ok()).ok_or_else(|| bad("den"))?;
                if den.is_zero() {
                    return Err(bad("zero denominator"));
                }
                c.add_term(Monomial(exps), Q::new(num, den));
            }
            let term = Form::monomial(layout, &idx, c)?;
            if term.degree() != degree {
                return Err(Error::Degree("component degree differs from the form degree".into()));
            }
            out = out.add(&term);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qr;

    fn l2() -> Layout {
        Layout::linear(2)
    }

    fn x(i: usize) -> Poly {
        Poly::var(l2(), i)
    }

    #[test]
    fn area_form_and_anticommutativity() {
        let dx = Form::dx(l2(), 0);
        let dy = Form::dx(l2(), 1);
        let area = dx.wedge(&dy);
        assert_eq!(area.component(&[0, 1]), Some(&Poly::one(l2())));
        assert_eq!(dy.wedge(&dx), area.neg());
        assert!(dx.wedge(&dx).is_zero());
    }

    #[test]
    fn wedge_of_weighted_covectors() {
        let a = Form::dx(l2(), 0).mul_function(&x(0));
        let b = Form::dx(l2(), 1).mul_function(&x(1));
        let w = a.wedge(&b);
        assert_eq!(w.component(&[0, 1]), Some(&(&x(0) * &x(1))));
    }

    #[test]
    fn derivative_examples() {
        let f = Form::dx(l2(), 1).mul_function(&x(0)); // x dy
        assert_eq!(f.d(), Form::dx(l2(), 0).wedge(&Form::dx(l2(), 1)));
        assert!(Form::constant(l2(), q(3)).d().is_zero());
        // ½(x dy − y dx)
        let radial = Form::dx(l2(), 1)
            .mul_function(&x(0))
            .sub(&Form::dx(l2(), 0).mul_function(&x(1)))
            .scale(&qr(1, 2));
        assert_eq!(radial.d(), Form::dx(l2(), 0).wedge(&Form::dx(l2(), 1)));
    }

    #[test]
    fn interior_examples() {
        let area = Form::dx(l2(), 0).wedge(&Form::dx(l2(), 1));
        assert_eq!(area.interior(&VectorField::coordinate(l2(), 0)), Form::dx(l2(), 1));
        let rot = VectorField::new(l2(), vec![-&x(1), x(0)]).unwrap();
        let expected = Form::dx(l2(), 1)
            .mul_function(&-&x(1))
            .sub(&Form::dx(l2(), 0).mul_function(&x(0)));
        assert_eq!(area.interior(&rot), expected);
        assert!(Form::function(x(0)).interior(&rot).is_zero());
        assert!(area.lie(&rot).is_zero());
    }

    #[test]
    fn pullback_by_dilation_with_parameter() {
        // v ↦ t v from ℝ²×ℝ_t to ℝ²
        let src = Layout::linear(3);
        let t = Poly::var(src, 2);
        let map = PolyMap::new(src, l2(), vec![&Poly::var(src, 0) * &t, &Poly::var(src, 1) * &t], vec![]).unwrap();
        let pulled = Form::dx(l2(), 0).pullback(&map);
        let expected = Form::dx(src, 0)
            .mul_function(&t)
            .add(&Form::dx(src, 2).mul_function(&Poly::var(src, 0)));
        assert_eq!(pulled, expected);
        assert!(Form::zero(l2(), 1).pullback(&map).is_zero());
        let id = PolyMap::identity(l2());
        let a = Form::dx(l2(), 1).mul_function(&x(0));
        assert_eq!(a.pullback(&id), a);
    }

    #[test]
    fn evaluation_examples() {
        let area = Form::dx(l2(), 0).wedge(&Form::dx(l2(), 1));
        let e1 = vec![q(1), q(0)];
        let e2 = vec![q(0), q(1)];
        let p = vec![q(5), q(7)];
        assert_eq!(area.evaluate(&p, &[e1.clone(), e2.clone()]), q(1));
        assert_eq!(area.evaluate(&p, &[e2.clone(), e1.clone()]), q(-1));
        let a = Form::dx(l2(), 0).mul_function(&x(0));
        assert_eq!(a.evaluate(&[q(2), q(0)], &[e1]), q(2));
        assert!(matches!(area.try_evaluate(&p, &[e2]), Err(Error::Arity(_))));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Form::dx(l2(), 0);
        let b = Form::dx(Layout::linear(4), 0);
        assert!(matches!(a.try_wedge(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn angle_coordinates_differentiate() {
        let l = Layout::with_angles(0, 1);
        let f = Form::function(Poly::cos(l, 0));
        assert_eq!(f.d(), Form::dx(l, 0).mul_function(&-&Poly::sin(l, 0)));
    }
}
