//! Linear Hamiltonian actions on `ℂⁿ = ℝ²ⁿ`.
//!
//! Coordinates are ordered `x₁, y₁, …, xₙ, yₙ` with `ω = Σ dxᵢ ∧ dyᵢ` and
//! `J(xᵢ, yᵢ) = (−yᵢ, xᵢ)`. A torus `T^r` acts through an integer weight
//! matrix `W` (plane `i` rotates with speed `Σ_j ξ_j W_{ji}`); a finite group
//! is given by rational symplectic generator matrices. The moment map obeys
//! `dΦ^ξ = i(ξ_M) ω`, which forces `Φ^ξ(v) = ½ ω(ξv, v) = −½ Σᵢ sᵢ |zᵢ|²`.

use std::collections::{HashSet, VecDeque};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{Form, PolyMap, VectorField};
use crate::poly::{q, Layout, Poly, Q};

/// Rational square matrix, row-major.
pub type Matrix = Vec<Vec<Q>>;

pub const DEFAULT_GROUP_CAP: usize = 10_000;

/// `ℝ²ⁿ` with its standard symplectic form and compatible complex structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticVectorSpace {
    pub n: usize,
}

impl SymplecticVectorSpace {
    pub fn new(n: usize) -> Self {
        SymplecticVectorSpace { n }
    }

    pub fn layout(&self) -> Layout {
        Layout::linear(2 * self.n)
    }

    pub fn omega(&self) -> Form {
        let l = self.layout();
        let mut acc = Form::zero(l, 2);
        for i in 0..self.n {
            acc = acc.add(&Form::dx(l, 2 * i).wedge(&Form::dx(l, 2 * i + 1)));
        }
        acc
    }

    /// Gram matrix `Ω_{ab} = ω(e_a, e_b)`.
    pub fn gram(&self) -> Matrix {
        let m = 2 * self.n;
        let mut g = vec![vec![Q::zero(); m]; m];
        for i in 0..self.n {
            g[2 * i][2 * i + 1] = Q::one();
            g[2 * i + 1][2 * i] = -Q::one();
        }
        g
    }

    pub fn complex_structure(&self) -> Matrix {
        let m = 2 * self.n;
        let mut j = vec![vec![Q::zero(); m]; m];
        for i in 0..self.n {
            // J e_x = e_y, J e_y = −e_x
            j[2 * i + 1][2 * i] = Q::one();
            j[2 * i][2 * i + 1] = -Q::one();
        }
        j
    }
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Q::zero();
                    for (k, bk) in b.iter().enumerate() {
                        if !a[i][k].is_zero() && !bk[j].is_zero() {
                            s += &a[i][k] * &bk[j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[Q]) -> Vec<Q> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Group acting linearly.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupDatum {
    /// `T^r` with an integer `r × n` weight matrix.
    Torus { weights: Vec<Vec<i64>> },
    /// Finite group generated by symplectic matrices; `elements` is the closure.
    Finite { generators: Vec<Matrix>, elements: Vec<Matrix> },
}

/// Symplectic vector space, group and reduction level.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearAction {
    pub name: String,
    pub space: SymplecticVectorSpace,
    pub group: GroupDatum,
    pub level: Vec<Q>,
}

/// Moment map components, one per Lie algebra basis vector, level subtracted.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMapData {
    pub components: Vec<Poly>,
}

/// Outcome of checking `dΦ^ξ = i(ξ_M)ω` per basis element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub per_component: Vec<bool>,
    pub holds: bool,
}

impl LinearAction {
    pub fn torus(name: impl Into<String>, n: usize, weights: Vec<Vec<i64>>, level: Vec<Q>) -> Result<Self> {
        if weights.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidAction(format!("weight rows must have {n} entries")));
        }
        if level.len() != weights.len() {
            return Err(Error::InvalidAction(format!(
                "level has {} entries but the torus has rank {}",
                level.len(),
                weights.len()
            )));
        }
        Ok(LinearAction {
            name: name.into(),
            space: SymplecticVectorSpace::new(n),
            group: GroupDatum::Torus { weights },
            level,
        })
    }

    pub fn finite(name: impl Into<String>, n: usize, generators: Vec<Matrix>) -> Result<Self> {
        Self::finite_with_cap(name, n, generators, DEFAULT_GROUP_CAP)
    }

    pub fn finite_with_cap(name: impl Into<String>, n: usize, generators: Vec<Matrix>, cap: usize) -> Result<Self> {
        let space = SymplecticVectorSpace::new(n);
        let omega = space.gram();
        for g in &generators {
            if g.len() != 2 * n || g.iter().any(|r| r.len() != 2 * n) {
                return Err(Error::InvalidAction(format!("generators must be {0}×{0}", 2 * n)));
            }
            if mat_mul(&mat_mul(&transpose(g), &omega), g) != omega {
                return Err(Error::InvalidAction("generator is not symplectic".into()));
            }
        }
        let elements = group_closure(2 * n, &generators, cap)?;
        Ok(LinearAction {
            name: name.into(),
            space,
            group: GroupDatum::Finite { generators, elements },
            level: vec![],
        })
    }

    pub fn layout(&self) -> Layout {
        self.space.layout()
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn rank(&self) -> usize {
        match &self.group {
            GroupDatum::Torus { weights } => weights.len(),
            GroupDatum::Finite { .. } => 0,
        }
    }

    pub fn weights(&self) -> Option<&[Vec<i64>]> {
        match &self.group {
            GroupDatum::Torus { weights } => Some(weights),
            GroupDatum::Finite { .. } => None,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.group, GroupDatum::Torus { .. })
    }

    pub fn level_is_zero(&self) -> bool {
        self.level.iter().all(Zero::is_zero)
    }

    pub fn omega(&self) -> Form {
        self.space.omega()
    }

    /// Finite group elements (empty for tori).
    pub fn elements(&self) -> &[Matrix] {
        match &self.group {
            GroupDatum::Finite { elements, .. } => elements,
            GroupDatum::Torus { .. } => &[],
        }
    }

    pub fn generators(&self) -> &[Matrix] {
        match &self.group {
            GroupDatum::Finite { generators, .. } => generators,
            GroupDatum::Torus { .. } => &[],
        }
    }

    /// Rotation speeds of the planes for `ξ ∈ ℚ^r`.
    pub fn plane_speeds(&self, xi: &[Q]) -> Result<Vec<Q>> {
        let GroupDatum::Torus { weights } = &self.group else {
            return Err(Error::UnsupportedGroup("finite groups have no Lie algebra".into()));
        };
        if xi.len() != weights.len() {
            return Err(Error::Dimension(format!("ξ needs {} entries", weights.len())));
        }
        Ok((0..self.n())
            .map(|i| weights.iter().zip(xi).map(|(row, x)| x * q(row[i])).sum())
            .collect())
    }

    /// The infinitesimal generator `ξ_M` as a linear field.
    pub fn induced_vector_field(&self, xi: &[Q]) -> Result<VectorField> {
        let speeds = self.plane_speeds(xi)?;
        let l = self.layout();
        let mut comps = Vec::with_capacity(l.dim());
        for (i, s) in speeds.iter().enumerate() {
            comps.push(Poly::var(l, 2 * i + 1).scale(&-s.clone()));
            comps.push(Poly::var(l, 2 * i).scale(s));
        }
        VectorField::new(l, comps)
    }

    /// Generators `(ξ_j)_M` for the standard basis of the Lie algebra.
    pub fn basis_fields(&self) -> Vec<VectorField> {
        let r = self.rank();
        (0..r)
            .map(|j| {
                let xi: Vec<Q> = (0..r).map(|k| if k == j { Q::one() } else { Q::zero() }).collect();
                self.induced_vector_field(&xi).expect("torus basis")
            })
            .collect()
    }

    /// Quadratic moment map with the level subtracted.
    pub fn moment_map(&self) -> Result<MomentMapData> {
        let GroupDatum::Torus { weights } = &self.group else {
            return Err(Error::UnsupportedGroup(
                "a finite group has a trivial moment map; its zero fibre is the whole space".into(),
            ));
        };
        let l = self.layout();
        let components = weights
            .iter()
            .zip(&self.level)
            .map(|(row, lam)| {
                let mut p = Poly::constant(l, -lam.clone());
                for (i, &w) in row.iter().enumerate() {
                    let rho = &Poly::var(l, 2 * i).pow(2) + &Poly::var(l, 2 * i + 1).pow(2);
                    p += &rho.scale(&crate::poly::qr(-w, 2));
                }
                p
            })
            .collect();
        Ok(MomentMapData { components })
    }

    /// Checks `dΦ^{ξ_j} = i((ξ_j)_M) ω` exactly.
    pub fn verify_moment_condition(&self) -> MomentReport {
        match self.moment_map() {
            Ok(m) => m.verify(self),
            Err(_) => MomentReport { per_component: vec![], holds: true },
        }
    }

    /// Zero-fibre equations (empty for finite groups, whose fibre is `V`).
    pub fn zero_fibre_quadrics(&self) -> Vec<Poly> {
        self.moment_map().map(|m| m.components).unwrap_or_default()
    }

    /// Invariance: vanishing Lie derivatives for tori, `g^*a = a` on generators otherwise.
    pub fn is_invariant(&self, a: &Form) -> bool {
        match &self.group {
            GroupDatum::Torus { .. } => self.basis_fields().iter().all(|v| a.lie(v).is_zero()),
            GroupDatum::Finite { generators, .. } => generators
                .iter()
                .all(|g| a.pullback(&PolyMap::linear_map(2 * self.n(), g)) == *a),
        }
    }

    /// Reynolds projection `(1/|G|) Σ_g g^*a`.
    pub fn average(&self, a: &Form) -> Result<Form> {
        let GroupDatum::Finite { elements, .. } = &self.group else {
            return Err(Error::UnsupportedGroup("averaging is implemented for finite groups only".into()));
        };
        let mut acc = Form::zero(a.layout(), a.degree());
        for g in elements {
            acc = acc.add(&a.pullback(&PolyMap::linear_map(2 * self.n(), g)));
        }
        Ok(acc.scale(&(Q::one() / q(elements.len() as i64))))
    }
}

impl MomentMapData {
    pub fn verify(&self, action: &LinearAction) -> MomentReport {
        let omega = action.omega();
        let fields = action.basis_fields();
        let per_component: Vec<bool> = self
            .components
            .iter()
            .zip(&fields)
            .map(|(phi, xi)| Form::function(phi.clone()).d() == omega.interior(xi))
            .collect();
        let holds = per_component.len() == fields.len() && per_component.iter().all(|&b| b);
        MomentReport { per_component, holds }
    }
}

/// Breadth-first closure under multiplication, failing past `cap` elements.
pub fn group_closure(dim: usize, generators: &[Matrix], cap: usize) -> Result<Vec<Matrix>> {
    let id = identity(dim);
    let mut seen: HashSet<Matrix> = HashSet::new();
    let mut order = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(m) = queue.pop_front() {
        for g in generators {
            let p = mat_mul(g, &m);
            if seen.insert(p.clone()) {
                if seen.len() > cap {
                    return Err(Error::GroupTooLarge(cap));
                }
                order.push(p.clone());
                queue.push_back(p);
            }
        }
    }
    order.sort();
    Ok(order)
}

/// Rational order-`k` element of `SL(2, ℚ) = Sp(2, ℚ)`; exists for `k ∈ {1,2,3,4,6}`.
pub fn cyclic_generator(k: u32) -> Result<Matrix> {
    let m = |a: i64, b: i64, c: i64, d: i64| vec![vec![q(a), q(b)], vec![q(c), q(d)]];
    match k {
        1 => Ok(m(1, 0, 0, 1)),
        2 => Ok(m(-1, 0, 0, -1)),
        3 => Ok(m(0, -1, 1, -1)),
        4 => Ok(m(0, -1, 1, 0)),
        6 => Ok(m(1, -1, 1, 0)),
        _ => Err(Error::InvalidAction(format!(
            "ℤ_{k} has no faithful rational symplectic action on ℂ (orders 1, 2, 3, 4, 6 only)"
        ))),
    }
}

/// Built-in examples: `cp1`, `teardrop`, `cone11`, `zk-cone` (with `k`).
///
/// The compact examples sit at the level where `½ Σ wᵢ|zᵢ|² = 1`; with the
/// sign fixed by `dΦ^ξ = i(ξ_M)ω` that is level `−1`.
pub fn builtin(name: &str, k: u32) -> Result<LinearAction> {
    match name {
        "cp1" => LinearAction::torus("cp1", 2, vec![vec![1, 1]], vec![q(-1)]),
        "teardrop" => LinearAction::torus("teardrop", 2, vec![vec![1, 2]], vec![q(-1)]),
        "cone11" => LinearAction::torus("cone11", 2, vec![vec![1, -1]], vec![q(0)]),
        "zk-cone" => LinearAction::finite(format!("z{k}-cone"), 1, vec![cyclic_generator(k)?]),
        other => {
            if let Some(k) = other.strip_prefix('z').and_then(|r| r.strip_suffix("-cone")).and_then(|d| d.parse().ok()) {
                return builtin("zk-cone", k);
            }
            Err(Error::UnknownExample(other.to_string()))
        }
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["cp1", "teardrop", "cone11", "zk-cone"];

/// Every built-in action, with `ℤ₃` for the cone family.
pub fn all_builtins() -> Vec<LinearAction> {
    BUILTIN_NAMES.iter().map(|n| builtin(n, 3).expect("built-in")).collect()
}

/// JSON action specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ActionSpec {
    Torus {
        n: usize,
        weights: Vec<Vec<i64>>,
        #[serde(default)]
        level: Vec<serde_json::Value>,
    },
    Finite {
        n: usize,
        generators: Vec<Vec<Vec<serde_json::Value>>>,
        #[serde(default)]
        level: Vec<serde_json::Value>,
    },
}

/// Reads a rational from a JSON number or a `"p/q"` string.
pub fn rational_from_json(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(q(i));
            }
            let f = n.as_f64().unwrap_or(f64::NAN);
            Q::from_float(f).ok_or_else(|| Error::InvalidAction(format!("not a rational: {n}")))
        }
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(Error::InvalidAction(format!("not a rational: {other}"))),
    }
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::InvalidAction(format!("not a rational: {s}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let n: num_bigint::BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl ActionSpec {
    pub fn into_action(self, name: &str) -> Result<LinearAction> {
        match self {
            ActionSpec::Torus { n, weights, level } => {
                let level = if level.is_empty() {
                    vec![Q::zero(); weights.len()]
                } else {
                    level.iter().map(rational_from_json).collect::<Result<_>>()?
                };
                LinearAction::torus(name, n, weights, level)
            }
            ActionSpec::Finite { n, generators, level } => {
                let level: Vec<Q> = level.iter().map(rational_from_json).collect::<Result<_>>()?;
                if level.iter().any(|x| !x.is_zero()) {
                    return Err(Error::InvalidAction("finite groups only reduce at level 0".into()));
                }
                let gens = generators
                    .iter()
                    .map(|g| g.iter().map(|r| r.iter().map(rational_from_json).collect()).collect())
                    .collect::<Result<Vec<Matrix>>>()?;
                LinearAction::finite(name, n, gens)
            }
        }
    }

    pub fn from_json(text: &str, name: &str) -> Result<LinearAction> {
        let spec: ActionSpec = serde_json::from_str(text)?;
        spec.into_action(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qr;

    #[test]
    fn rotation_fields() {
        let a = LinearAction::torus("c1", 1, vec![vec![1]], vec![q(0)]).unwrap();
        let l = a.layout();
        let v = a.induced_vector_field(&[q(1)]).unwrap();
        assert_eq!(v.components(), &[-&Poly::var(l, 1), Poly::var(l, 0)]);
        assert!(a.induced_vector_field(&[q(0)]).unwrap().is_zero());
        let b = builtin("cone11", 0).unwrap();
        let lb = b.layout();
        let w = b.induced_vector_field(&[q(1)]).unwrap();
        let expected = vec![-&Poly::var(lb, 1), Poly::var(lb, 0), Poly::var(lb, 3), -&Poly::var(lb, 2)];
        assert_eq!(w.components(), expected.as_slice());
    }

    #[test]
    fn moment_examples() {
        let a = LinearAction::torus("c1", 1, vec![vec![1]], vec![q(0)]).unwrap();
        let l = a.layout();
        let rho = &Poly::var(l, 0).pow(2) + &Poly::var(l, 1).pow(2);
        assert_eq!(a.moment_map().unwrap().components, vec![rho.scale(&qr(-1, 2))]);
        let shifted = LinearAction::torus("c1", 1, vec![vec![1]], vec![qr(3, 2)]).unwrap();
        assert_eq!(
            shifted.moment_map().unwrap().components[0],
            &rho.scale(&qr(-1, 2)) - &Poly::constant(l, qr(3, 2))
        );
        let b = builtin("cone11", 0).unwrap();
        let lb = b.layout();
        let r1 = &Poly::var(lb, 0).pow(2) + &Poly::var(lb, 1).pow(2);
        let r2 = &Poly::var(lb, 2).pow(2) + &Poly::var(lb, 3).pow(2);
        assert_eq!(b.moment_map().unwrap().components[0], (&r2 - &r1).scale(&qr(1, 2)));
    }

    #[test]
    fn moment_condition_and_negative_control() {
        for a in all_builtins().iter().filter(|a| a.is_torus()) {
            assert!(a.verify_moment_condition().holds, "{}", a.name);
            let mut bad = a.moment_map().unwrap();
            bad.components[0] = -&bad.components[0];
            assert!(!bad.verify(a).holds);
        }
        let rank0 = LinearAction::torus("pt", 2, vec![], vec![]).unwrap();
        assert!(rank0.verify_moment_condition().holds);
        assert!(rank0.zero_fibre_quadrics().is_empty());
    }

    #[test]
    fn invariance_and_averaging() {
        for a in all_builtins() {
            assert!(a.is_invariant(&a.omega()), "{}", a.name);
        }
        let c1 = LinearAction::torus("c1", 1, vec![vec![1]], vec![q(0)]).unwrap();
        assert!(!c1.is_invariant(&Form::dx(c1.layout(), 0)));
        let z2 = builtin("zk-cone", 2).unwrap();
        let dx = Form::dx(z2.layout(), 0);
        assert!(z2.average(&dx).unwrap().is_zero());
        let z3 = builtin("zk-cone", 3).unwrap();
        let l = z3.layout();
        let a = Form::dx(l, 1).mul_function(&Poly::var(l, 0).pow(2));
        let avg = z3.average(&a).unwrap();
        assert!(z3.is_invariant(&avg));
        assert_eq!(z3.average(&avg).unwrap(), avg);
        assert!(c1.average(&a).is_err());
    }

    #[test]
    fn finite_closure_and_caps() {
        assert_eq!(builtin("zk-cone", 6).unwrap().elements().len(), 6);
        assert_eq!(builtin("z4-cone", 0).unwrap().elements().len(), 4);
        assert!(builtin("zk-cone", 5).is_err());
        let g = cyclic_generator(6).unwrap();
        assert!(matches!(
            LinearAction::finite_with_cap("z6", 1, vec![g], 3),
            Err(Error::GroupTooLarge(3))
        ));
        let not_symplectic = vec![vec![q(2), q(0)], vec![q(0), q(1)]];
        assert!(LinearAction::finite("bad", 1, vec![not_symplectic]).is_err());
    }

    #[test]
    fn zero_fibre_equations() {
        let t = builtin("teardrop", 0).unwrap();
        let l = t.layout();
        let r1 = &Poly::var(l, 0).pow(2) + &Poly::var(l, 1).pow(2);
        let r2 = &Poly::var(l, 2).pow(2) + &Poly::var(l, 3).pow(2);
        let expected = &(&r1.scale(&qr(-1, 2)) - &r2) + &Poly::one(l);
        assert_eq!(t.zero_fibre_quadrics(), vec![expected]);
        assert!(builtin("zk-cone", 3).unwrap().zero_fibre_quadrics().is_empty());
    }

    #[test]
    fn json_specs() {
        let a = ActionSpec::from_json(r#"{"type":"torus","n":2,"weights":[[1,2]],"level":["-1"]}"#, "t").unwrap();
        assert_eq!(a.level, vec![q(-1)]);
        let f = ActionSpec::from_json(r#"{"type":"finite","n":1,"generators":[[[0,-1],[1,-1]]]}"#, "f").unwrap();
        assert_eq!(f.elements().len(), 3);
        assert!(ActionSpec::from_json(r#"{"type":"finite","n":1,"generators":[[[0,-1],[1,-1]]],"level":[1]}"#, "f").is_err());
        assert_eq!(parse_rational(" -3/6 ").unwrap(), qr(-1, 2));
    }
}
