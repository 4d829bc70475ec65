//! Exact multivariate polynomials over the rationals.
//!
//! A [`Poly`] lives on a [`Layout`]: `linear` real coordinates followed by
//! `angles` circle coordinates. Each angle θ contributes two ring variables,
//! `cos θ` and `sin θ`, subject to `cos² + sin² = 1`; the normal form keeps
//! the sine exponent at most one, so trigonometric polynomials have a unique
//! representation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational scalar used by every symbolic module.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Coordinate layout of an ambient space: `ℝ^linear × (S¹)^angles`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Layout {
    pub linear: usize,
    pub angles: usize,
}

impl Layout {
    pub const fn linear(n: usize) -> Self {
        Layout { linear: n, angles: 0 }
    }

    pub const fn with_angles(linear: usize, angles: usize) -> Self {
        Layout { linear, angles }
    }

    /// Number of coordinates (form indices range over `0..dim`).
    pub fn dim(&self) -> usize {
        self.linear + self.angles
    }

    /// Number of ring variables.
    pub fn nvars(&self) -> usize {
        self.linear + 2 * self.angles
    }

    pub fn cos_var(&self, angle: usize) -> usize {
        self.linear + 2 * angle
    }

    pub fn sin_var(&self, angle: usize) -> usize {
        self.linear + 2 * angle + 1
    }

    pub fn is_sin_var(&self, var: usize) -> bool {
        var >= self.linear && (var - self.linear) % 2 == 1
    }

    pub fn is_angle_coord(&self, coord: usize) -> bool {
        coord >= self.linear
    }
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial (trigonometric in the angle variables) with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    layout: Layout,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(layout: Layout) -> Self {
        Poly { layout, terms: BTreeMap::new() }
    }

    pub fn constant(layout: Layout, c: Q) -> Self {
        let mut p = Poly::zero(layout);
        p.add_term(Monomial::one(layout.nvars()), c);
        p
    }

    pub fn one(layout: Layout) -> Self {
        Poly::constant(layout, Q::one())
    }

    /// Ring variable `i` (linear coordinate, or a cos/sin variable).
    pub fn var(layout: Layout, i: usize) -> Self {
        assert!(i < layout.nvars(), "variable index out of range");
        let mut p = Poly::zero(layout);
        p.add_term(Monomial::var(layout.nvars(), i), Q::one());
        p
    }

    pub fn cos(layout: Layout, angle: usize) -> Self {
        Poly::var(layout, layout.cos_var(angle))
    }

    pub fn sin(layout: Layout, angle: usize) -> Self {
        Poly::var(layout, layout.sin_var(angle))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(layout: Layout, terms: I) -> Self {
        let mut p = Poly::zero(layout);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree (`None` for the zero polynomial).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Degree in the linear variables only.
    pub fn linear_degree(&self) -> Option<u32> {
        let n = self.layout.linear;
        self.terms
            .keys()
            .map(|m| m.0[..n].iter().map(|&e| e as u32).sum())
            .max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_term(&self) -> Q {
        self.terms
            .get(&Monomial::one(self.layout.nvars()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// True when no angle variable occurs.
    pub fn is_angle_free(&self) -> bool {
        let n = self.layout.linear;
        self.terms.keys().all(|m| m.0[n..].iter().all(|&e| e == 0))
    }

    /// Adds `c·m`, reducing `sin²` to `1 − cos²` where needed.
    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let layout = self.layout;
        if let Some(v) = (0..layout.angles)
            .map(|j| layout.sin_var(j))
            .find(|&v| m.0[v] >= 2)
        {
            let mut lowered = m.clone();
            lowered.0[v] -= 2;
            let mut with_cos = lowered.clone();
            with_cos.0[v - 1] += 2;
            self.add_term(lowered, c.clone());
            self.add_term(with_cos, -c);
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.layout);
        }
        Poly {
            layout: self.layout,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.layout);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to ring variable `v` (no trig chain rule).
    pub fn diff_var(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.layout);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[v] -= 1;
            out.add_term(m2, c * q(e as i64));
        }
        out
    }

    /// Partial derivative along ambient coordinate `coord`: `∂/∂x` for linear
    /// coordinates, `∂/∂θ = −sin·∂_cos + cos·∂_sin` for angles.
    pub fn partial(&self, coord: usize) -> Poly {
        let layout = self.layout;
        assert!(coord < layout.dim(), "coordinate index out of range");
        if coord < layout.linear {
            return self.diff_var(coord);
        }
        let a = coord - layout.linear;
        let c = layout.cos_var(a);
        let s = layout.sin_var(a);
        let dc = self.diff_var(c);
        let ds = self.diff_var(s);
        &(&ds * &Poly::var(layout, c)) - &(&dc * &Poly::var(layout, s))
    }

    /// Evaluates at an assignment of every ring variable.
    pub fn eval(&self, values: &[Q]) -> Q {
        assert_eq!(values.len(), self.layout.nvars(), "evaluation arity");
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in values.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(v.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluates using precomputed powers `powers[var][e] = value^e`.
    pub fn eval_with_powers(&self, powers: &[Vec<Q>]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= &powers[v][e as usize];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = to_f64(c);
            for (v, &e) in values.iter().zip(&m.0) {
                if e > 0 {
                    t *= v.powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `images[v]` (polynomials on `target`) for each ring variable.
    pub fn compose(&self, target: Layout, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.layout.nvars(), "composition arity");
        let mut cache: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target), p.clone()]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[v].len() <= e as usize {
                    let next = cache[v].last().unwrap() * &images[v];
                    cache[v].push(next);
                }
                t = &t * &cache[v][e as usize];
            }
            out += &t;
        }
        out
    }

    /// Moves variables into a larger layout: variable `v` becomes `var_map[v]`.
    pub fn embed(&self, target: Layout, var_map: &[usize]) -> Poly {
        assert_eq!(var_map.len(), self.layout.nvars());
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; target.nvars()];
            for (v, &x) in m.0.iter().enumerate() {
                e[var_map[v]] += x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// `∫₀¹ p dx_v`, removing the variable from the ring.
    pub fn integrate_unit(&self, v: usize, target: Layout) -> Poly {
        assert_eq!(target.nvars() + 1, self.layout.nvars());
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let e = m.0[v];
            let mut rest = m.0.clone();
            rest.remove(v);
            out.add_term(Monomial(rest), c / q(e as i64 + 1));
        }
        out
    }

    /// Splits off the part of total linear degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        let n = self.layout.linear;
        Poly::from_terms(
            self.layout,
            self.terms
                .iter()
                .filter(|(m, _)| m.0[..n].iter().map(|&e| e as u32).sum::<u32>() == d)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }
}

/// Exponent vectors of `n` variables with total degree `p`, in grlex order.
pub fn monomials_of_degree(n: usize, p: u32) -> Vec<Vec<u16>> {
    fn rec(i: usize, n: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i + 1 == n {
            cur.push(left as u16);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u16);
            rec(i + 1, n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if p == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, n, p, &mut Vec::with_capacity(n), &mut out);
    out
}

pub fn to_f64(c: &Q) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or_else(|| {
        // huge numerator/denominator: fall back to a scaled division
        let n = c.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = c.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = var_names(self.layout);
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].clone()),
                    _ => factors.push(format!("{}^{}", names[v], e)),
                }
            }
            let coeff = if a.is_integer() {
                format!("{}", a.numer())
            } else {
                format!("({}/{})", a.numer(), a.denom())
            };
            if factors.is_empty() {
                write!(f, "{}", coeff)?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", coeff, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Names of ring variables: `x1, y1, x2, y2, …` for even linear counts,
/// `u1, u2, …` otherwise, then `cth1, sth1, …`.
pub fn var_names(layout: Layout) -> Vec<String> {
    let mut names = coord_names(Layout::linear(layout.linear));
    for j in 0..layout.angles {
        names.push(format!("cth{}", j + 1));
        names.push(format!("sth{}", j + 1));
    }
    names
}

/// Names of ambient coordinates (form indices).
pub fn coord_names(layout: Layout) -> Vec<String> {
    let mut names = Vec::with_capacity(layout.dim());
    if layout.linear % 2 == 0 {
        for i in 0..layout.linear / 2 {
            names.push(format!("x{}", i + 1));
            names.push(format!("y{}", i + 1));
        }
    } else {
        for i in 0..layout.linear {
            names.push(format!("u{}", i + 1));
        }
    }
    for j in 0..layout.angles {
        names.push(format!("th{}", j + 1));
    }
    names
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> std::ops::AddAssign<&'a Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.layout, rhs.layout, "layout mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.layout, rhs.layout, "layout mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            layout: self.layout,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.layout, rhs.layout, "layout mismatch");
        let mut out = Poly::zero(self.layout);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(l: Layout, i: usize) -> Poly {
        Poly::var(l, i)
    }

    #[test]
    fn cancellation_removes_terms() {
        let l = Layout::linear(2);
        let p = &x(l, 0) - &x(l, 0);
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn grlex_orders_by_degree_first() {
        let a = Monomial(vec![0, 2]);
        let b = Monomial(vec![1, 0]);
        let c = Monomial(vec![2, 0]);
        assert!(b < a);
        assert!(c < a || c > a);
        assert!(a > b && c > b);
    }

    #[test]
    fn trig_normal_form() {
        let l = Layout::with_angles(0, 1);
        let c = Poly::cos(l, 0);
        let s = Poly::sin(l, 0);
        let pyth = &(&c * &c) + &(&s * &s);
        assert_eq!(pyth, Poly::one(l));
        // d/dθ cos = −sin, d/dθ sin = cos
        assert_eq!(c.partial(0), -&s);
        assert_eq!(s.partial(0), c);
        // d/dθ (sin²) = 2 sin cos, computed through the reduced form 1 − cos²
        assert_eq!((&s * &s).partial(0), (&s * &c).scale(&q(2)));
    }

    #[test]
    fn composition_and_unit_integral() {
        let l = Layout::linear(2);
        let p = &x(l, 0) * &x(l, 1); // x*y
        let t = Layout::linear(3);
        let images = vec![&x(t, 0) * &x(t, 2), &x(t, 1) * &x(t, 2)];
        let pulled = p.compose(t, &images); // t² x y
        let integrated = pulled.integrate_unit(2, l);
        assert_eq!(integrated, p.scale(&qr(1, 3)));
    }

    #[test]
    fn evaluation_matches_powers_route() {
        let l = Layout::linear(2);
        let p = &(&x(l, 0).pow(3) * &x(l, 1)) - &Poly::constant(l, qr(1, 2));
        let vals = vec![qr(2, 3), q(-5)];
        let powers: Vec<Vec<Q>> = vals
            .iter()
            .map(|v| (0..4).map(|e| num_traits::pow(v.clone(), e)).collect())
            .collect();
        assert_eq!(p.eval(&vals), p.eval_with_powers(&powers));
        assert_eq!(p.eval(&vals), qr(-40, 27) - qr(1, 2));
    }
}
