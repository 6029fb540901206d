//! Sparse symmetric kernels used for sections above the dense cap, and
//! series with nonnegative terms used to certify positivity.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric matrix in compressed row form, both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCsr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymCsr {
    /// From the diagonal and the strictly upper entries `(i, j, a_ij)`, `i < j`.
    pub fn from_parts(diag: &[f64], upper: &[(usize, usize, f64)]) -> Self {
        let n = diag.len();
        let mut rows: Vec<Vec<(usize, f64)>> = (0..n).map(|i| vec![(i, diag[i])]).collect();
        for &(i, j, a) in upper {
            rows[i].push((j, a));
            rows[j].push((i, a));
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (j, a) in r {
                cols.push(j);
                vals.push(a);
            }
            row_ptr.push(cols.len());
        }
        SymCsr { n, row_ptr, cols, vals }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, a)| a * x[j]).sum();
        }
    }

    /// Maximum absolute row sum, an upper bound for the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|e| e.1.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn shifted(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    out.vals[k] += s;
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, a) in self.row(i) {
                m[(i, j)] = a;
            }
        }
        m
    }
}

/// Sparse `A = P L D L^T P^T` for symmetric positive definite `A`, with a
/// minimum degree elimination order. Trees and paths factor without fill.
#[derive(Debug, Clone)]
pub struct Ldlt {
    order: Vec<usize>,
    /// For each eliminated vertex: `(i, L(i, k))` over later vertices `i`.
    columns: Vec<Vec<(usize, f64)>>,
    pivots: Vec<f64>,
}

impl Ldlt {
    pub fn factor(a: &SymCsr) -> Result<Self> {
        let n = a.len();
        let mut diag = vec![0.0; n];
        let mut rows: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if i == j {
                    diag[i] += v;
                } else if v != 0.0 {
                    rows[i].insert(j, v);
                }
            }
        }
        let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|i| (rows[i].len(), i)).collect();
        let mut order = Vec::with_capacity(n);
        let mut columns = vec![Vec::new(); n];
        let mut pivots = vec![0.0; n];
        while let Some((_, k)) = queue.pop_first() {
            let d = diag[k];
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Solver(format!("nonpositive pivot {d} in sparse factorization")));
            }
            let mut nb: Vec<(usize, f64)> = rows[k].drain().collect();
            nb.sort_unstable_by_key(|e| e.0);
            for &(i, _) in &nb {
                queue.remove(&(rows[i].len(), i));
                rows[i].remove(&k);
            }
            for (p, &(i, aik)) in nb.iter().enumerate() {
                diag[i] -= aik * aik / d;
                for &(j, ajk) in &nb[p + 1..] {
                    let upd = aik * ajk / d;
                    *rows[i].entry(j).or_insert(0.0) -= upd;
                    *rows[j].entry(i).or_insert(0.0) -= upd;
                }
            }
            for &(i, _) in &nb {
                queue.insert((rows[i].len(), i));
            }
            columns[k] = nb.into_iter().map(|(i, aik)| (i, aik / d)).collect();
            pivots[k] = d;
            order.push(k);
        }
        Ok(Ldlt { order, columns, pivots })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for &k in &self.order {
            let yk = y[k];
            for &(i, l) in &self.columns[k] {
                y[i] -= l * yk;
            }
        }
        for (yk, d) in y.iter_mut().zip(&self.pivots) {
            *yk /= d;
        }
        for &k in self.order.iter().rev() {
            let s: f64 = self.columns[k].iter().map(|&(i, l)| l * y[i]).sum();
            y[k] -= s;
        }
        y
    }
}

/// Upper limit on matrix-vector products spent in one exponential.
pub const EXPMV_BUDGET: f64 = 2e10;

/// `exp(-t A) x0 + int_0^t exp(-s A) h ds` by scaled Taylor steps on the
/// augmented system `(x, z)' = (-A x + z h, 0)`, `z(0) = 1`.
pub fn expmv(a: &SymCsr, t: f64, x0: &[f64], h: Option<&[f64]>) -> Result<Vec<f64>> {
    if t == 0.0 {
        return Ok(x0.to_vec());
    }
    let n = a.len();
    let hn = h.map_or(0.0, |h| h.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let norm = a.norm_inf() + hn;
    let steps = (t * norm).ceil().max(1.0);
    if steps * a.nnz().max(1) as f64 * 20.0 > EXPMV_BUDGET {
        return Err(Error::Solver(format!(
            "matrix exponential would need about {steps:.3e} scaling steps"
        )));
    }
    let steps = steps as usize;
    let dt = t / steps as f64;
    let mut x = x0.to_vec();
    let mut term = vec![0.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..steps {
        // Taylor series of exp(dt B) applied to (x, 1)
        term.copy_from_slice(&x);
        let mut tz = 1.0;
        let mut acc = x.clone();
        for k in 1..=60 {
            a.matvec(&term, &mut next);
            let f = dt / k as f64;
            for i in 0..n {
                let hz = h.map_or(0.0, |h| h[i] * tz);
                next[i] = f * (hz - next[i]);
            }
            tz = 0.0;
            std::mem::swap(&mut term, &mut next);
            let mut tmax = 0.0f64;
            let mut amax = 0.0f64;
            for i in 0..n {
                acc[i] += term[i];
                tmax = tmax.max(term[i].abs());
                amax = amax.max(acc[i].abs());
            }
            if k >= 2 && tmax <= 1e-18 * amax.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        x = acc;
    }
    Ok(x)
}

/// Smallest eigenvalue and a positive eigenvector of a symmetric positive
/// semidefinite matrix whose off-diagonal entries are nonpositive, by
/// inverse iteration with a tiny positive shift.
pub fn bottom_eigenpair(a: &SymCsr) -> Result<(f64, Vec<f64>)> {
    let n = a.len();
    let norm_a = a.norm_inf();
    let shift = 1e-13 * norm_a.max(1e-300);
    let f = Ldlt::factor(&a.shifted(shift))?;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut av = vec![0.0; n];
    let mut last = f64::INFINITY;
    for _ in 0..20_000 {
        let mut w = f.solve(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Solver("inverse iteration broke down".into()));
        }
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
        a.matvec(&v, &mut av);
        let rq: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
        // the Rayleigh quotient carries rounding noise of order eps * |A|
        if (rq - last).abs() <= (1e-15 * rq.abs()).max(10.0 * f64::EPSILON * norm_a) {
            return Ok((rq.max(0.0), v));
        }
        last = rq;
    }
    Err(Error::Solver("inverse iteration did not converge".into()))
}

/// Lower bound for `(L + alpha)^{-1}` by the Neumann series of
/// `(D - N)^{-1}` where `L = diag - N` and `N >= 0`. Every partial sum is
/// entrywise below the inverse, so positive entries certify positivity.
pub fn resolvent_lower_bound(l: &DMatrix<f64>, alpha: f64, terms: usize) -> DMatrix<f64> {
    let n = l.nrows();
    let dinv: Vec<f64> = (0..n).map(|i| 1.0 / (l[(i, i)] + alpha)).collect();
    // T = D^{-1} N, entrywise nonnegative
    let mut t = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                t[(i, j)] = (-l[(i, j)]).max(0.0) * dinv[i];
            }
        }
    }
    let mut power = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(dinv.clone()));
    let mut sum = power.clone();
    for _ in 0..terms {
        power = &t * &power;
        sum += &power;
    }
    sum
}

/// Lower bound for `exp(-t L)` from the uniformized series
/// `exp(-theta t) sum_k (theta t)^k / k! P^k` with `P = I - L / theta >= 0`.
pub fn semigroup_lower_bound(l: &DMatrix<f64>, t: f64, terms: usize) -> DMatrix<f64> {
    let n = l.nrows();
    let theta = (0..n).map(|i| l[(i, i)]).fold(0.0, f64::max).max(1e-300);
    let mut p = DMatrix::identity(n, n) - l / theta;
    p.iter_mut().for_each(|v| *v = v.max(0.0));
    let mut power = DMatrix::identity(n, n);
    let mut coef = (-theta * t).exp();
    let mut sum = &power * coef;
    for k in 1..=terms {
        power = &p * &power;
        coef *= theta * t / k as f64;
        sum += &power * coef;
    }
    sum
}
