//! Seeded random polynomials, forms and maps for property batches.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::form::{Form, PolyMap, VectorField};
use crate::linalg::combinations;
use crate::poly::{Layout, Monomial, Poly, Q};

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(rng: &mut Rng64) -> Q {
    let n: i64 = rng.gen_range(-9..=9);
    let d: i64 = *[1i64, 1, 1, 2, 3].choose(rng).unwrap();
    Q::new(n.into(), d.into())
}

/// Random polynomial in the linear variables (and cos/sin when present).
pub fn poly(rng: &mut Rng64, layout: Layout, max_degree: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(layout);
    for _ in 0..terms {
        let mut e = vec![0u16; layout.nvars()];
        let deg = rng.gen_range(0..=max_degree);
        for _ in 0..deg {
            let v = rng.gen_range(0..layout.linear.max(1));
            if layout.linear > 0 {
                e[v] += 1;
            }
        }
        for a in 0..layout.angles {
            if rng.gen_bool(0.3) {
                e[layout.cos_var(a)] += 1;
            }
            if rng.gen_bool(0.3) {
                e[layout.sin_var(a)] += 1;
            }
        }
        p.add_term(Monomial(e), small_rational(rng));
    }
    p
}

/// Random `k`-form with a few terms.
pub fn form(rng: &mut Rng64, layout: Layout, k: usize, max_degree: u32, terms: usize) -> Form {
    let indices = combinations(layout.dim(), k);
    let mut acc = Form::zero(layout, k);
    if indices.is_empty() {
        return acc;
    }
    for _ in 0..terms {
        let idx = indices.choose(rng).unwrap().clone();
        let c = poly(rng, layout, max_degree, 1);
        acc = acc.add(&Form::monomial(layout, &idx, c).expect("valid indices"));
    }
    acc
}

pub fn vector_field(rng: &mut Rng64, layout: Layout, max_degree: u32, terms: usize) -> VectorField {
    let comps = (0..layout.dim()).map(|_| poly(rng, layout, max_degree, terms)).collect();
    VectorField::new(layout, comps).expect("layout")
}

/// Random polynomial map between linear layouts.
pub fn poly_map(rng: &mut Rng64, source: Layout, target: Layout, max_degree: u32, terms: usize) -> PolyMap {
    let linear = (0..target.linear).map(|_| poly(rng, source, max_degree, terms)).collect();
    PolyMap::new(source, target, linear, vec![]).expect("linear layouts")
}

/// Random rational combination.
pub fn combination(rng: &mut Rng64, layout: Layout, degree: usize, forms: &[Form]) -> Form {
    let coeffs: Vec<Q> = forms.iter().map(|_| small_rational(rng)).collect();
    crate::model::combine(layout, degree, forms, &coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_well_formed() {
        let l = Layout::linear(4);
        let a = form(&mut rng(3), l, 2, 3, 4);
        assert_eq!(a, form(&mut rng(3), l, 2, 3, 4));
        assert_eq!(a.degree(), 2);
        assert!(form(&mut rng(3), l, 5, 3, 4).is_zero());
        let m = poly_map(&mut rng(1), l, Layout::linear(2), 2, 2);
        assert_eq!(m.linear_components().len(), 2);
    }
}
