//! Exact linear algebra over ℚ plus a little integer lattice arithmetic.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::poly::Q;

/// Row echelon basis built one vector at a time.
///
/// Every stored row has a leading one at its pivot column and a zero at the
/// pivot of every row inserted before it.
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<(usize, Vec<Q>)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<Q>> {
        self.rows.iter().map(|(_, r)| r)
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&self, mut v: Vec<Q>) -> Vec<Q> {
        assert_eq!(v.len(), self.ncols);
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (a, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v.to_vec()).iter().all(Zero::is_zero)
    }

    /// Inserts `v`; returns `true` when the rank grew.
    pub fn insert(&mut self, v: Vec<Q>) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = Q::one() / &r[p];
        for x in r.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rows.push((p, r));
        true
    }
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<Q>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (a, b) in row.iter_mut().zip(&pivot_row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r.clone());
    }
    e.rank()
}

/// Basis of `{x : A x = 0}` for `A` given by rows with `ncols` columns.
pub fn kernel(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves `Σ_j x_j columns[j] = target`, if possible.
pub fn solve_columns(columns: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let n = columns.len();
    let m = target.len();
    let mut rows: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            let mut r: Vec<Q> = columns.iter().map(|c| c[i].clone()).collect();
            r.push(target[i].clone());
            r
        })
        .collect();
    let pivots = rref(&mut rows, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (row, &p) in rows.iter().zip(&pivots) {
        x[p] = row[n].clone();
    }
    Some(x)
}

/// Determinant of a small square matrix by elimination.
pub fn det(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut acc = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let piv = m[c][c].clone();
        acc *= &piv;
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &piv;
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    acc
}

pub fn det_f64(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut acc = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        acc *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    acc
}

/// Hermite normal form (row style) of an integer matrix; zero rows dropped.
pub fn hermite_rows(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        // gcd-combine the column below r into row r
        loop {
            let nonzero: Vec<usize> = (r..m.len()).filter(|&i| m[i][c] != 0).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            m.swap(r, best);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c] != 0 {
                    let f = Integer::div_floor(&m[i][c], &m[r][c]);
                    for j in 0..ncols {
                        m[i][j] -= f * m[r][j];
                    }
                    if m[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[r][c] == 0 {
            continue;
        }
        if m[r][c] < 0 {
            for x in m[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let f = Integer::div_floor(&m[i][c], &m[r][c]);
            if f != 0 {
                for j in 0..ncols {
                    m[i][j] -= f * m[r][j];
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m.into_iter()
        .filter(|row| row.iter().any(|&x| x != 0))
        .map(|row| row.into_iter().map(|x| x as i64).collect())
        .collect()
}

/// Whether `v` lies in the ℤ-span of the rows of a Hermite normal form.
pub fn in_lattice(hnf: &[Vec<i64>], v: &[i64]) -> bool {
    let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for row in hnf {
        let Some(p) = row.iter().position(|&x| x != 0) else { continue };
        let piv = row[p] as i128;
        if v[p] % piv != 0 {
            return false;
        }
        let f = v[p] / piv;
        for (a, &b) in v.iter_mut().zip(row) {
            *a -= f * b as i128;
        }
    }
    v.iter().all(|&x| x == 0)
}

/// Index of a full-row-rank integer lattice in its saturation: gcd of maximal minors.
pub fn saturation_index(hnf: &[Vec<i64>]) -> u64 {
    let k = hnf.len();
    if k == 0 {
        return 1;
    }
    let ncols = hnf[0].len();
    let mut g: i128 = 0;
    for cols in combinations(ncols, k) {
        let m: Vec<Vec<Q>> = hnf
            .iter()
            .map(|r| cols.iter().map(|&c| Q::from_integer(r[c].into())).collect())
            .collect();
        let d = det(m);
        let d: i128 = d.numer().try_into().unwrap_or(0);
        g = g.gcd(&d);
    }
    g.unsigned_abs() as u64
}

/// All increasing `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn kernel_is_annihilated() {
        let a = vec![qv(&[1, 2, 3, 4]), qv(&[2, 4, 6, 8]), qv(&[0, 1, 1, 0])];
        let k = kernel(&a, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &a {
                let s: Q = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(s.is_zero());
            }
        }
        assert_eq!(rank(&a, 4), 2);
    }

    #[test]
    fn echelon_tracks_rank() {
        let mut e = Echelon::new(3);
        assert!(e.insert(qv(&[0, 1, 2])));
        assert!(e.insert(qv(&[1, 1, 0])));
        assert!(!e.insert(qv(&[2, 3, 2])));
        assert!(e.contains(&qv(&[1, 2, 2])));
        assert!(e.insert(qv(&[0, 0, 1])));
        assert_eq!(e.rank(), 3);
    }

    #[test]
    fn solve_and_det() {
        let cols = vec![qv(&[1, 0, 1]), qv(&[0, 1, 1])];
        assert_eq!(solve_columns(&cols, &qv(&[2, 3, 5])), Some(qv(&[2, 3])));
        assert_eq!(solve_columns(&cols, &qv(&[2, 3, 4])), None);
        assert_eq!(det(vec![qv(&[0, 2]), qv(&[3, 1])]), q(-6));
    }

    #[test]
    fn lattice_membership() {
        let h = hermite_rows(&[vec![2, 4], vec![0, 6]]);
        assert!(in_lattice(&h, &[2, 10]));
        assert!(!in_lattice(&h, &[1, 0]));
        assert!(!in_lattice(&h, &[0, 2]));
        assert_eq!(saturation_index(&h), 12);
        assert_eq!(saturation_index(&hermite_rows(&[vec![1, 2]])), 1);
        assert_eq!(saturation_index(&hermite_rows(&[vec![2]])), 2);
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
