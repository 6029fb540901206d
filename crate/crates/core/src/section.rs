//! Dirichlet sections `L_K` of a graph family and the resolvent and
//! semigroup acting on them.
//!
//! `L_K` keeps the full degree on the diagonal: `L_K(x,x) = n(x)/m(x)` and
//! `L_K(x,y) = -b(x,y)/m(x)`. All solves go through the symmetrized matrix
//! `S = D^{1/2} L_K D^{-1/2}` with `D = diag(m)`, which is dense up to
//! [`DENSE_CAP`] vertices and sparse above.

use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::GraphFamily;
use crate::linalg::{self, Ldlt, SymCsr};
use crate::DENSE_CAP;

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSection {
    vertices: Vec<usize>,
    position: HashMap<usize, usize>,
    measure: Vec<f64>,
    killing: Vec<f64>,
    degree: Vec<f64>,
    /// `sum_{y not in K} b(x, y)`
    flux: Vec<f64>,
    /// Edges inside `K` in local indices, `i < j`.
    edges: Vec<(usize, usize, f64)>,
}

/// Builds `L_K` for a finite vertex set `K` of the family.
pub fn section(fam: &GraphFamily, k: &[usize]) -> Result<DirichletSection> {
    if k.is_empty() {
        return Err(Error::InvalidArgument("section needs a nonempty vertex set".into()));
    }
    let mut keyed = Vec::with_capacity(k.len());
    for &x in k {
        fam.check(x)?;
        keyed.push((fam.distance_from_root(x)?.unwrap_or(usize::MAX), x));
    }
    keyed.sort_unstable();
    keyed.dedup();
    let vertices: Vec<usize> = keyed.into_iter().map(|e| e.1).collect();
    let position: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let n = vertices.len();
    let mut measure = Vec::with_capacity(n);
    let mut killing = Vec::with_capacity(n);
    let mut degree = Vec::with_capacity(n);
    let mut flux = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for (i, &x) in vertices.iter().enumerate() {
        measure.push(fam.measure(x)?);
        killing.push(fam.killing(x)?);
        degree.push(fam.full_degree(x)?);
        let mut out = 0.0;
        for (y, b) in fam.neighbors(x)? {
            match position.get(&y) {
                Some(&j) if j > i => edges.push((i, j, b)),
                Some(_) => {}
                None => out += b,
            }
        }
        flux.push(out);
    }
    Ok(DirichletSection { vertices, position, measure, killing, degree, flux, edges })
}

impl DirichletSection {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex ids of `K` in section order.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn position(&self, x: usize) -> Option<usize> {
        self.position.get(&x).copied()
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn killing(&self) -> &[f64] {
        &self.killing
    }

    /// Full degrees `n(x)`, including edges leaving `K` and killing.
    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Edge weight leaving `K` at each vertex.
    pub fn flux(&self) -> &[f64] {
        &self.flux
    }

    /// `g_K(x) = (1/m(x)) sum_{y not in K} b(x, y)`.
    pub fn boundary(&self) -> Vec<f64> {
        self.flux.iter().zip(&self.measure).map(|(f, m)| f / m).collect()
    }

    /// `c / m` on `K`.
    pub fn killing_ratio(&self) -> Vec<f64> {
        self.killing.iter().zip(&self.measure).map(|(c, m)| c / m).collect()
    }

    /// `d = n / m` on `K`.
    pub fn averaged_degree(&self) -> Vec<f64> {
        self.degree.iter().zip(&self.measure).map(|(n, m)| n / m).collect()
    }

    pub fn is_dense(&self) -> bool {
        self.len() <= DENSE_CAP
    }

    pub fn is_connected(&self) -> bool {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for &(i, j, _) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == n
    }

    /// The (non-symmetric) matrix `L_K`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut l = DMatrix::zeros(n, n);
        for i in 0..n {
            l[(i, i)] = self.degree[i] / self.measure[i];
        }
        for &(i, j, b) in &self.edges {
            l[(i, j)] = -b / self.measure[i];
            l[(j, i)] = -b / self.measure[j];
        }
        l
    }

    fn symmetric_parts(&self) -> (Vec<f64>, Vec<(usize, usize, f64)>) {
        let diag = self.averaged_degree();
        let off = self
            .edges
            .iter()
            .map(|&(i, j, b)| (i, j, -b / (self.measure[i] * self.measure[j]).sqrt()))
            .collect();
        (diag, off)
    }

    /// `S = D^{1/2} L_K D^{-1/2}`, dense.
    pub fn symmetric(&self) -> DMatrix<f64> {
        let (diag, off) = self.symmetric_parts();
        let mut s = DMatrix::from_diagonal(&DVector::from_vec(diag));
        for (i, j, v) in off {
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
        s
    }

    pub fn symmetric_sparse(&self) -> SymCsr {
        let (diag, off) = self.symmetric_parts();
        SymCsr::from_parts(&diag, &off)
    }

    fn sqrt_m(&self) -> Vec<f64> {
        self.measure.iter().map(|m| m.sqrt()).collect()
    }

    /// Dense eigendecomposition of `S`.
    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        if !self.is_dense() {
            return Err(Error::TooLarge { size: self.len(), cap: DENSE_CAP });
        }
        let eig = self.symmetric().symmetric_eigen();
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("eigendecomposition produced non-finite values".into()));
        }
        let vectors = eig.eigenvectors.select_columns(&idx);
        Ok(SpectralDecomposition { values, vectors, sqrt_m: self.sqrt_m() })
    }

    /// Smallest eigenvalue of `L_K`, unclamped.
    pub fn bottom_eigenvalue(&self) -> Result<f64> {
        if self.is_dense() {
            let eig = self.symmetric().symmetric_eigenvalues();
            Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
        } else {
            linalg::bottom_eigenpair(&self.symmetric_sparse()).map(|e| e.0)
        }
    }

    /// Factors `L_K + alpha` once for repeated solves.
    pub fn resolvent(&self, alpha: f64) -> Result<Resolvent> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        let factor = if self.is_dense() {
            let mut s = self.symmetric();
            for i in 0..self.len() {
                s[(i, i)] += alpha;
            }
            ResolventFactor::Dense(
                Cholesky::new(s).ok_or_else(|| Error::Solver("L_K + alpha is not positive definite".into()))?,
            )
        } else {
            ResolventFactor::Sparse(Ldlt::factor(&self.symmetric_sparse().shifted(alpha))?)
        };
        Ok(Resolvent { factor, sqrt_m: self.sqrt_m() })
    }

    /// `(L_K + alpha)^{-1} f`.
    pub fn resolvent_apply(&self, alpha: f64, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        Ok(self.resolvent(alpha)?.apply(f))
    }

    /// `exp(-t L_K) f`.
    pub fn semigroup_apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evolve(t, f, None)?.0)
    }

    /// `(exp(-t L_K) f, int_0^t exp(-s L_K) h ds)`; the second part is zero
    /// when `h` is absent.
    pub fn evolve(&self, t: f64, f: &[f64], h: Option<&[f64]>) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_len(f)?;
        if let Some(h) = h {
            self.check_len(h)?;
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
        }
        if self.is_dense() {
            let sd = self.spectral()?;
            let a = sd.semigroup(t, f);
            let b = h.map_or_else(|| vec![0.0; self.len()], |h| sd.source_integral(t, h));
            return Ok((a, b));
        }
        let (sm, s) = (self.sqrt_m(), self.symmetric_sparse());
        let a = linalg::expmv(&s, t, &scale(f, &sm, true), None)?;
        let b = match h {
            Some(h) => unscale(&linalg::expmv(&s, t, &vec![0.0; self.len()], Some(&scale(h, &sm, true)))?, &sm),
            None => vec![0.0; self.len()],
        };
        Ok((unscale(&a, &sm), b))
    }

    /// Indicator of `K`.
    pub fn ones(&self) -> Vec<f64> {
        vec![1.0; self.len()]
    }

    /// Section vector from values on vertex ids; missing ids are zero.
    pub fn vector(&self, f: impl Fn(usize) -> f64) -> Vec<f64> {
        self.vertices.iter().map(|&x| f(x)).collect()
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() == self.len() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "vector has length {} but the section has {} vertices",
                f.len(),
                self.len()
            )))
        }
    }

    /// Entrywise lower bounds for `(L_K + alpha)^{-1}` and `exp(-t L_K)`
    /// from series with nonnegative terms, for small sections.
    pub fn positivity_certificate(&self, alpha: f64, t: f64) -> PositivityCertificate {
        let l = self.laplacian();
        let terms = self.len() + 1;
        let r = linalg::resolvent_lower_bound(&l, alpha, terms);
        let s = linalg::semigroup_lower_bound(&l, t, terms.max(l.amax().ceil() as usize * 4));
        PositivityCertificate {
            resolvent_min: r.min(),
            semigroup_min: s.min(),
        }
    }
}

/// Minimum entries of rigorous lower bounds for resolvent and semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityCertificate {
    pub resolvent_min: f64,
    pub semigroup_min: f64,
}

impl PositivityCertificate {
    pub fn certified(&self) -> bool {
        self.resolvent_min > 0.0 && self.semigroup_min > 0.0
    }
}

fn scale(f: &[f64], sm: &[f64], up: bool) -> Vec<f64> {
    f.iter().zip(sm).map(|(v, s)| if up { v * s } else { v / s }).collect()
}

fn unscale(f: &[f64], sm: &[f64]) -> Vec<f64> {
    scale(f, sm, false)
}

enum ResolventFactor {
    Dense(Cholesky<f64, Dyn>),
    Sparse(Ldlt),
}

/// A factored `L_K + alpha`, shareable across threads.
pub struct Resolvent {
    factor: ResolventFactor,
    sqrt_m: Vec<f64>,
}

impl Resolvent {
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let rhs = scale(f, &self.sqrt_m, true);
        let y = match &self.factor {
            ResolventFactor::Dense(c) => c.solve(&DVector::from_vec(rhs)).as_slice().to_vec(),
            ResolventFactor::Sparse(l) => l.solve(&rhs),
        };
        unscale(&y, &self.sqrt_m)
    }

    /// The full matrix `(L_K + alpha)^{-1}`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.sqrt_m.len();
        let mut out = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.apply(&e);
            e[j] = 0.0;
            out.set_column(j, &DVector::from_vec(col));
        }
        out
    }
}

/// Eigenpairs of `S`, ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    sqrt_m: Vec<f64>,
}

/// `(1 - exp(-t l)) / l` with its limit `t` at `l = 0`.
pub fn phi(t: f64, l: f64) -> f64 {
    if l.abs() * t < 1e-300 {
        t
    } else {
        -(-t * l).exp_m1() / l
    }
}

impl SpectralDecomposition {
    /// Raw eigenvalues of `S`, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    fn coefficients(&self, f: &[f64]) -> DVector<f64> {
        self.vectors.tr_mul(&DVector::from_vec(scale(f, &self.sqrt_m, true)))
    }

    fn synthesize(&self, c: DVector<f64>) -> Vec<f64> {
        unscale((&self.vectors * c).as_slice(), &self.sqrt_m)
    }

    /// `exp(-t L_K) f`.
    pub fn semigroup(&self, t: f64, f: &[f64]) -> Vec<f64> {
        if t == 0.0 {
            return f.to_vec();
        }
        let mut c = self.coefficients(f);
        for (ci, l) in c.iter_mut().zip(&self.values) {
            *ci *= (-t * l.max(0.0)).exp();
        }
        self.synthesize(c)
    }

    /// `int_0^t exp(-s L_K) h ds`.
    pub fn source_integral(&self, t: f64, h: &[f64]) -> Vec<f64> {
        if t == 0.0 {
            return vec![0.0; h.len()];
        }
        let mut c = self.coefficients(h);
        for (ci, l) in c.iter_mut().zip(&self.values) {
            *ci *= phi(t, l.max(0.0));
        }
        self.synthesize(c)
    }

    /// Weights `w_k` with `(g(L_K) f)(x_i) = sum_k g(lambda_k) w_k` for any
    /// spectral function `g`, so point values cost `O(|K|)` per time.
    pub fn probe_weights(&self, i: usize, f: &[f64]) -> Vec<f64> {
        let c = self.coefficients(f);
        (0..self.values.len()).map(|k| self.vectors[(i, k)] * c[k] / self.sqrt_m[i]).collect()
    }

    /// The matrix `exp(-t L_K)`.
    pub fn semigroup_matrix(&self, t: f64) -> DMatrix<f64> {
        let n = self.values.len();
        let mut v = self.vectors.clone();
        for (k, l) in self.values.iter().enumerate() {
            let e = (-t * l.max(0.0)).exp();
            v.column_mut(k).scale_mut(e);
        }
        let mut m = v * self.vectors.transpose();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] *= self.sqrt_m[j] / self.sqrt_m[i];
            }
        }
        m
    }
}

/// Nested finite vertex sets grown as balls around a root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exhaustion {
    pub root: usize,
    pub radii: Vec<usize>,
    pub sets: Vec<Vec<usize>>,
}

pub fn ball_exhaustion(fam: &GraphFamily, root: usize, radii: &[usize]) -> Result<Exhaustion> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("at least one radius is required".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    let sets = radii
        .iter()
        .map(|&r| {
            let mut b = fam.ball(root, r)?;
            b.sort_unstable();
            Ok(b)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Exhaustion { root, radii: radii.to_vec(), sets })
}

impl Exhaustion {
    pub fn sections(&self, fam: &GraphFamily) -> Result<Vec<DirichletSection>> {
        self.sets.iter().map(|k| section(fam, k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_graph, random_nonnegative, CorpusConfig};
    use crate::family::{Law, MeasureLaw, RadialFamily};
    use crate::graph::WeightedGraph;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64;

    fn unit_ray() -> GraphFamily {
        GraphFamily::poly_ray(0.0)
    }

    fn path3() -> GraphFamily {
        GraphFamily::explicit(WeightedGraph::path(3))
    }

    #[test]
    fn ray_section() {
        let s = section(&unit_ray(), &[2, 0, 1]).unwrap();
        assert_eq!(s.vertices(), &[0, 1, 2]);
        let want = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        assert_eq!(s.laplacian(), want);
        assert_eq!(s.boundary(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn path_sections() {
        let s = section(&path3(), &[0, 1]).unwrap();
        assert_eq!(s.laplacian(), DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]));
        assert_eq!(s.boundary(), vec![0.0, 1.0]);
        let full = section(&path3(), &[0, 1, 2]).unwrap();
        assert!(full.boundary().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn exhaustions() {
        let e = ball_exhaustion(&unit_ray(), 0, &[1, 2, 3]).unwrap();
        assert_eq!(e.sets, vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3]]);
        let e = ball_exhaustion(&path3(), 1, &[1, 5]).unwrap();
        assert_eq!(e.sets, vec![vec![0, 1, 2], vec![0, 1, 2]]);
        let tree = GraphFamily::Radial(
            RadialFamily::tree(vec![2], Law::Const { value: 1.0 }, MeasureLaw::default(), Law::Const { value: 0.0 })
                .unwrap(),
        );
        assert_eq!(ball_exhaustion(&tree, 0, &[2]).unwrap().sets[0].len(), 7);
        assert!(ball_exhaustion(&path3(), 0, &[2, 2]).is_err());
    }

    #[test]
    fn resolvent_examples() {
        let s = section(&path3(), &[1]).unwrap();
        assert_relative_eq!(s.resolvent_apply(1.0, &[1.0]).unwrap()[0], 1.0 / 3.0, epsilon = 1e-15);
        let full = section(&path3(), &[0, 1, 2]).unwrap();
        // Cramer's rule on [[2,-1,0],[-1,3,-1],[0,-1,2]] u = e_1: u_1 = 4 / 8
        let u = full.resolvent_apply(1.0, &[0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(u[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn semigroup_examples() {
        let g = WeightedGraph::path(2);
        let s = section(&GraphFamily::explicit(g), &[0, 1]).unwrap();
        let f = [1.0, 0.0];
        assert_eq!(s.semigroup_apply(0.0, &f).unwrap(), f.to_vec());
        let u = s.semigroup_apply(0.5, &f).unwrap();
        assert_relative_eq!(u[0], 0.5 * (1.0 + (-1.0f64).exp()), epsilon = 1e-14);
        assert_relative_eq!(u[1], 0.5 * (1.0 - (-1.0f64).exp()), epsilon = 1e-14);
        let full = section(&path3(), &[0, 1, 2]).unwrap();
        for v in full.semigroup_apply(3.0, &full.ones()).unwrap() {
            assert_relative_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let fam = GraphFamily::Radial(
            RadialFamily::tree(
                vec![2, 1],
                Law::Poly { power: 1.0, scale: 0.5 },
                MeasureLaw::Poly { power: 0.5, scale: 1.0 },
                Law::Const { value: 0.1 },
            )
            .unwrap(),
        );
        let k = fam.ball(0, 9).unwrap();
        let s = section(&fam, &k).unwrap();
        let f: Vec<f64> = (0..s.len()).map(|i| ((i * 7) % 5) as f64).collect();
        let h = s.killing_ratio();
        let r_dense = s.resolvent(0.7).unwrap().apply(&f);
        let (e_dense, i_dense) = s.evolve(0.4, &f, Some(&h)).unwrap();
        let bottom_dense = s.bottom_eigenvalue().unwrap();
        let sp = s.symmetric_sparse();
        let sm = s.sqrt_m();
        let r_sparse = unscale(&Ldlt::factor(&sp.shifted(0.7)).unwrap().solve(&scale(&f, &sm, true)), &sm);
        let e_sparse = unscale(&linalg::expmv(&sp, 0.4, &scale(&f, &sm, true), None).unwrap(), &sm);
        let i_sparse =
            unscale(&linalg::expmv(&sp, 0.4, &vec![0.0; s.len()], Some(&scale(&h, &sm, true))).unwrap(), &sm);
        let bottom_sparse = linalg::bottom_eigenpair(&sp).unwrap().0;
        for i in 0..s.len() {
            assert_relative_eq!(r_dense[i], r_sparse[i], epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(e_dense[i], e_sparse[i], epsilon = 1e-11);
            assert_relative_eq!(i_dense[i], i_sparse[i], epsilon = 1e-11);
        }
        assert_relative_eq!(bottom_dense, bottom_sparse, max_relative = 1e-9);
    }

    fn random_nested(seed: u64) -> (GraphFamily, Vec<usize>, Vec<usize>, Vec<f64>) {
        let mut rng = Pcg64::seed_from_u64(seed);
        let g = random_graph(&mut rng, &CorpusConfig { min_vertices: 2, ..Default::default() });
        let n = g.len();
        let big: Vec<usize> = crate::corpus::random_subset(&mut rng, n);
        let small: Vec<usize> = big.iter().copied().filter(|_| rand::Rng::random::<bool>(&mut rng)).collect();
        let small = if small.is_empty() { vec![big[0]] } else { small };
        let f = random_nonnegative(&mut rng, small.len(), 3.0);
        (GraphFamily::explicit(g), small, big, f)
    }

    proptest! {
        #[test]
        fn symmetrized_matrix_is_psd(seed in any::<u64>()) {
            let (fam, _, big, _) = random_nested(seed);
            let s = section(&fam, &big).unwrap();
            let sym = s.symmetric();
            prop_assert!((sym.clone() - sym.transpose()).amax() == 0.0);
            prop_assert!(s.spectral().unwrap().values()[0] > -1e-10);
            // g_K equals the row deficit of L_K
            let l = s.laplacian();
            let g = s.boundary();
            let c = s.killing_ratio();
            for i in 0..s.len() {
                let row: f64 = l.row(i).sum();
                prop_assert!(g[i] >= 0.0);
                prop_assert!((row - c[i] - g[i]).abs() <= 1e-12 * (1.0 + l[(i, i)]));
            }
        }

        #[test]
        fn resolvent_identity(seed in any::<u64>(), alpha in 0.05f64..5.0) {
            let (fam, _, big, _) = random_nested(seed);
            let s = section(&fam, &big).unwrap();
            let r = s.resolvent(alpha).unwrap();
            let a = r.apply(&s.ones());
            let src: Vec<f64> = s.boundary().iter().zip(s.killing_ratio()).map(|(g, c)| g + c).collect();
            let b = r.apply(&src);
            for i in 0..s.len() {
                prop_assert!((alpha * a[i] + b[i] - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn domain_monotonicity(seed in any::<u64>(), alpha in 0.05f64..5.0, t in 0.0f64..3.0) {
            let (fam, small, big, f) = random_nested(seed);
            let s1 = section(&fam, &small).unwrap();
            let s2 = section(&fam, &big).unwrap();
            let f1 = s1.vector(|x| f[small.iter().position(|&y| y == x).unwrap()]);
            let f2 = s2.vector(|x| small.iter().position(|&y| y == x).map_or(0.0, |i| f[i]));
            let r1 = s1.resolvent_apply(alpha, &f1).unwrap();
            let r2 = s2.resolvent_apply(alpha, &f2).unwrap();
            let e1 = s1.semigroup_apply(t, &f1).unwrap();
            let e2 = s2.semigroup_apply(t, &f2).unwrap();
            for (i, &x) in s1.vertices().iter().enumerate() {
                let j = s2.position(x).unwrap();
                prop_assert!(r1[i] <= r2[j] + 1e-10);
                prop_assert!(e1[i] <= e2[j] + 1e-10);
            }
        }

        #[test]
        fn semigroup_property(seed in any::<u64>(), t in 0.0f64..2.0, s in 0.0f64..2.0) {
            let (fam, _, big, _) = random_nested(seed);
            let sec = section(&fam, &big).unwrap();
            let f = random_nonnegative(&mut Pcg64::seed_from_u64(seed ^ 1), sec.len(), 1.0);
            let once = sec.semigroup_apply(t + s, &f).unwrap();
            let twice = sec.semigroup_apply(t, &sec.semigroup_apply(s, &f).unwrap()).unwrap();
            let fmax = f.iter().copied().fold(0.0, f64::max);
            for i in 0..sec.len() {
                prop_assert!((once[i] - twice[i]).abs() < 1e-10);
                prop_assert!(once[i] >= -1e-12 && once[i] <= fmax + 1e-12);
            }
        }
    }
}
