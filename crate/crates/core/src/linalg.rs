//! Dense exact linear algebra over a [`Field`].

use crate::field::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<K> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: Field> Matrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![K::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = K::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<K>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[K] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<K> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<K>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].add(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[K]) -> Vec<K> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(K::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: &K) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(s)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(K::is_zero)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    ///
    /// Among candidate pivot rows the entry with the smallest
    /// [`Field::pivot_weight`] wins, ties going to the lowest row index.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let best =
                (r..self.rows).filter(|&i| !self[(i, c)].is_zero()).min_by_key(|&i| (self[(i, c)].pivot_weight(), i));
            let Some(p) = best else { continue };
            self.swap_rows(r, p);
            let inv = self[(r, c)].inv().expect("nonzero pivot");
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].mul(&inv);
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if !self[(r, j)].is_zero() {
                        let t = self[(r, j)].mul(&f);
                        self[(i, j)] = self[(i, j)].sub(&t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place();
        (m, p)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Standard nullspace basis: one vector per free column, read off the RREF.
    pub fn nullspace(&self) -> Vec<Vec<K>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![K::zero(); self.cols];
                v[f] = K::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = r[(row, f)].neg();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = K::one();
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> K {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = K::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return K::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg();
            }
            det = det.mul(&m[(c, c)]);
            let inv = m[(c, c)].inv().expect("nonzero pivot");
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].mul(&inv);
                for j in c..n {
                    let t = m[(c, j)].mul(&f);
                    m[(i, j)] = m[(i, j)].sub(&t);
                }
            }
        }
        det
    }

    /// Solves `self * x = b`, returning one solution if the system is consistent.
    pub fn solve(&self, b: &[K]) -> Option<Vec<K>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![K::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = aug[(row, self.cols)].clone();
        }
        Some(x)
    }
}

impl<K> std::ops::Index<(usize, usize)> for Matrix<K> {
    type Output = K;
    fn index(&self, (i, j): (usize, usize)) -> &K {
        &self.data[i * self.cols + j]
    }
}

impl<K> std::ops::IndexMut<(usize, usize)> for Matrix<K> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut K {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<K: Field>(a: &[K], b: &[K]) -> K {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).fold(K::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// A complement of `span(sub)` inside `span(sup)` together with coordinate
/// functionals.
///
/// `sup` spans a space `Z` that contains `span(sub) = B`. The complement basis
/// `reps` is in canonical echelon form: each vector is reduced against the
/// echelon basis of `B` and against the other representatives, and its leading
/// entry is 1. The functionals `coords` (one row per representative) vanish on
/// `B` and satisfy `coords[i] . reps[j] = [i == j]`; applied to any vector of `Z`
/// they give its coordinates in `Z / B`.
#[derive(Clone, Debug)]
pub struct Quotient<K> {
    pub reps: Vec<Vec<K>>,
    pub coords: Matrix<K>,
    /// Echelon basis of `B`.
    pub sub_basis: Vec<Vec<K>>,
}

impl<K: Field> Quotient<K> {
    pub fn new(n: usize, sub: &[Vec<K>], sup: &[Vec<K>]) -> Self {
        let b_basis: Vec<Vec<K>> = if sub.is_empty() {
            Vec::new()
        } else {
            let (r, p) = Matrix::from_rows(sub.to_vec()).rref();
            (0..p.len()).map(|i| r.row(i).to_vec()).collect()
        };
        let lead = |v: &[K]| v.iter().position(|x| !x.is_zero());

        let mut echelon: Vec<(usize, Vec<K>)> =
            b_basis.iter().map(|v| (lead(v).expect("nonzero row"), v.clone())).collect();
        let mut reps: Vec<(usize, Vec<K>)> = Vec::new();
        for z in sup {
            let mut r = z.clone();
            for (p, e) in &echelon {
                if !r[*p].is_zero() {
                    let f = r[*p].mul(&e[*p].inv().expect("pivot"));
                    for (x, y) in r.iter_mut().zip(e) {
                        if !y.is_zero() {
                            *x = x.sub(&f.mul(y));
                        }
                    }
                }
            }
            if let Some(p) = lead(&r) {
                let inv = r[p].inv().expect("lead");
                for x in r.iter_mut() {
                    *x = x.mul(&inv);
                }
                echelon.push((p, r.clone()));
                reps.push((p, r));
            }
        }
        // Back-substitution: later representatives are already clear of earlier pivots.
        for i in (0..reps.len()).rev() {
            let (pi, vi) = reps[i].clone();
            for rep in reps[..i].iter_mut() {
                if !rep.1[pi].is_zero() {
                    let f = rep.1[pi].clone();
                    for (x, y) in rep.1.iter_mut().zip(&vi) {
                        if !y.is_zero() {
                            *x = x.sub(&f.mul(y));
                        }
                    }
                }
            }
        }

        // Left inverse of [B | H] built from the pivot coordinates.
        let all: Vec<(usize, &Vec<K>)> =
            b_basis.iter().map(|v| (lead(v).unwrap(), v)).chain(reps.iter().map(|(p, v)| (*p, v))).collect();
        let k = all.len();
        let mut wp = Matrix::zeros(k, k);
        for (col, (_, v)) in all.iter().enumerate() {
            for (row, (p, _)) in all.iter().enumerate() {
                wp[(row, col)] = v[*p].clone();
            }
        }
        let wp_inv = wp.inverse().expect("echelon basis with distinct pivots");
        let h = reps.len();
        let nb = b_basis.len();
        let mut coords = Matrix::zeros(h, n);
        for i in 0..h {
            for (row, (p, _)) in all.iter().enumerate() {
                coords[(i, *p)] = wp_inv[(nb + i, row)].clone();
            }
        }
        Quotient { reps: reps.into_iter().map(|(_, v)| v).collect(), coords, sub_basis: b_basis }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn coordinates(&self, v: &[K]) -> Vec<K> {
        self.coords.mul_vec(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, Q};

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn empty_matrix() {
        let m = Matrix::<Q>::zeros(0, 0);
        assert_eq!(m.inverse(), Some(Matrix::zeros(0, 0)));
        assert_eq!(m.determinant(), q(1));
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(|x| x == &q(0)));
    }

    #[test]
    fn inverse_and_determinant() {
        let a = m(&[&[2, 1], &[5, 3]]);
        assert_eq!(a.determinant(), q(1));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant(), q(-1));
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(a.solve(&[q(3), q(1)]).unwrap(), vec![q(2), q(1)]);
        let s = m(&[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[q(1), q(3)]).is_none());
    }

    #[test]
    fn quotient_functionals() {
        // Z = R^3, B = span(e0 + e1)
        let sub = vec![vec![q(1), q(1), q(0)]];
        let sup = vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]];
        let quo = Quotient::new(3, &sub, &sup);
        assert_eq!(quo.dim(), 2);
        for b in &sub {
            assert!(quo.coordinates(b).iter().all(|x| x == &q(0)));
        }
        for (i, r) in quo.reps.iter().enumerate() {
            let c = quo.coordinates(r);
            for (j, x) in c.iter().enumerate() {
                assert_eq!(x, &q((i == j) as i64));
            }
        }
    }
}
