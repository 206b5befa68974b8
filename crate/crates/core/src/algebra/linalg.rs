//! Exact linear algebra over cyclotomic fields and over polynomial rings.

use std::fmt;
use std::ops::{Mul, Sub};

use super::cyclotomic::CyclotomicNumber as Cyc;
use super::poly::{Polynomial, Vars};
use crate::error::{Error, Result};

/// Dense matrix with cyclotomic entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Cyc>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Cyc>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Cyc>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Cyc::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Cyc::one();
        }
        m
    }

    pub fn diagonal(entries: Vec<Cyc>) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.data[i * n + i] = e;
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

    pub fn get(&self, i: usize, j: usize) -> &Cyc {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cyc) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Cyc] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Cyc] {
        &self.data
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Reduced row echelon form; pivots are chosen as the first nonzero
    /// entry in column order. Returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inv().expect("nonzero pivot");
            for j in 0..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in 0..self.cols {
                    let v = self.get(i, j) - &(&f * self.get(r, j));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Cyc>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Cyc::zero(); self.cols];
                v[f] = Cyc::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Cyc::one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::DivisionByZero);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    pub fn apply(&self, v: &[Cyc]) -> Vec<Cyc> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Cyc::zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    /// Image of each coordinate function under `z ↦ M z`, i.e. the linear
    /// forms `Σ_j M_ij z_j`.
    pub fn linear_forms(&self, vars: &Vars) -> Vec<Polynomial> {
        (0..self.rows)
            .map(|i| {
                let mut p = Polynomial::zero(vars);
                for j in 0..self.cols {
                    let c = self.get(i, j);
                    if !c.is_zero() {
                        p = &p + &Polynomial::var_at(vars, j).scale(c);
                    }
                }
                p
            })
            .collect()
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Incrementally maintained reduced row echelon basis of a subspace of
/// `K^dim`. Each stored row remembers how it was combined from the
/// inserted vectors, so membership tests can also return coordinates.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    dim: usize,
    inserted: usize,
    rows: Vec<EchelonRow>,
}

#[derive(Clone, Debug)]
struct EchelonRow {
    pivot: usize,
    vector: Vec<Cyc>,
    combo: Vec<Cyc>,
}

impl EchelonBasis {
    pub fn new(dim: usize) -> Self {
        EchelonBasis {
            dim,
            inserted: 0,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis: returns `(residual, coeffs)` with
    /// `v = Σ coeffs[i] · inserted[i] + residual` and the residual zero at
    /// every pivot column.
    pub fn reduce(&self, v: &[Cyc]) -> (Vec<Cyc>, Vec<Cyc>) {
        assert_eq!(v.len(), self.dim);
        let mut res = v.to_vec();
        let mut combo = vec![Cyc::zero(); self.inserted];
        for row in &self.rows {
            let f = res[row.pivot].clone();
            if f.is_zero() {
                continue;
            }
            for (r, x) in res.iter_mut().zip(&row.vector) {
                if !x.is_zero() {
                    *r = &*r - &(&f * x);
                }
            }
            for (c, x) in combo.iter_mut().zip(&row.combo) {
                if !x.is_zero() {
                    *c = &*c + &(&f * x);
                }
            }
        }
        (res, combo)
    }

    pub fn contains(&self, v: &[Cyc]) -> bool {
        self.reduce(v).0.iter().all(Cyc::is_zero)
    }

    /// Inserts `v`; returns the reduced residual when `v` was independent.
    pub fn insert(&mut self, v: &[Cyc]) -> Option<Vec<Cyc>> {
        let (res, combo) = self.reduce(v);
        let index = self.inserted;
        self.inserted += 1;
        for row in &mut self.rows {
            row.combo.push(Cyc::zero());
        }
        let pivot = res.iter().position(|x| !x.is_zero())?;
        // residual = v - Σ combo_i inserted_i
        let mut rcombo: Vec<Cyc> = combo.iter().map(|c| -c).collect();
        rcombo.push(Cyc::one());
        let inv = res[pivot].inv().expect("nonzero pivot");
        let vector: Vec<Cyc> = res.iter().map(|x| x * &inv).collect();
        let rcombo: Vec<Cyc> = rcombo.iter().map(|x| x * &inv).collect();
        debug_assert_eq!(rcombo.len(), index + 1);
        for row in &mut self.rows {
            let f = row.vector[pivot].clone();
            if f.is_zero() {
                continue;
            }
            for (r, x) in row.vector.iter_mut().zip(&vector) {
                *r = &*r - &(&f * x);
            }
            for (c, x) in row.combo.iter_mut().zip(&rcombo) {
                *c = &*c - &(&f * x);
            }
        }
        self.rows.push(EchelonRow {
            pivot,
            vector,
            combo: rcombo,
        });
        Some(res)
    }
}

/// Square matrix of polynomials.
pub type PolyMatrix = Vec<Vec<Polynomial>>;

/// Determinant by fraction-free (Bareiss) elimination.
pub fn poly_det(m: &PolyMatrix, vars: &Vars) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one(vars);
    }
    let mut a: PolyMatrix = m.clone();
    let mut sign = false;
    let mut prev = Polynomial::one(vars);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = !sign;
                }
                None => return Polynomial::zero(vars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t
                    .exact_divide(&prev)
                    .expect("nonzero pivot")
                    .expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Adjugate (transposed cofactor matrix): `adj(M) · M = det(M) · I`.
pub fn poly_adjugate(m: &PolyMatrix, vars: &Vars) -> PolyMatrix {
    let n = m.len();
    if n == 1 {
        return vec![vec![Polynomial::one(vars)]];
    }
    let mut adj = vec![vec![Polynomial::zero(vars); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: PolyMatrix = (0..n)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let d = poly_det(&minor, vars);
            adj[j][i] = if (i + j) % 2 == 1 { -d } else { d };
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::vars;

    fn c(v: i64) -> Cyc {
        Cyc::from_int(v)
    }

    #[test]
    fn rank_and_kernel() {
        let m = Matrix::from_rows(vec![vec![c(1), c(-1)], vec![c(-1), c(1)]]).unwrap();
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(Cyc::is_zero));
    }

    #[test]
    fn inverse_over_cyclotomics() {
        let m = Matrix::from_rows(vec![
            vec![Cyc::zeta(3), c(1)],
            vec![c(0), Cyc::zeta(5)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
    }

    #[test]
    fn echelon_coordinates() {
        let mut b = EchelonBasis::new(3);
        let u = vec![c(1), c(2), c(1)];
        let v = vec![c(0), c(1), c(0)];
        assert!(b.insert(&u).is_some());
        assert!(b.insert(&v).is_some());
        assert!(b.insert(&[c(2), c(5), c(2)]).is_none());
        let (res, coeffs) = b.reduce(&[c(3), c(1), c(3)]);
        assert!(res.iter().all(Cyc::is_zero));
        assert_eq!(coeffs[0], c(3));
        assert_eq!(coeffs[1], c(-5));
    }

    #[test]
    fn det_and_adjugate() {
        let v = vars(&["z1", "z2"]);
        let z1 = Polynomial::var(&v, "z1").unwrap();
        let z2 = Polynomial::var(&v, "z2").unwrap();
        let one = Polynomial::one(&v);
        let j = vec![vec![one.clone(), one.clone()], vec![z2.clone(), z1.clone()]];
        let det = poly_det(&j, &v);
        assert_eq!(det, &z1 - &z2);
        let adj = poly_adjugate(&j, &v);
        for i in 0..2 {
            for k in 0..2 {
                let mut s = Polynomial::zero(&v);
                for l in 0..2 {
                    s = &s + &(&adj[i][l] * &j[l][k]);
                }
                let expect = if i == k { det.clone() } else { Polynomial::zero(&v) };
                assert_eq!(s, expect);
            }
        }
    }
}
