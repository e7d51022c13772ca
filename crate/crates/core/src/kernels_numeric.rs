//! Numeric weighted Bergman kernels: the reproducing kernel of the span of
//! `((z - c) / s)^m, 0 <= m <= N` under a quadrature-discretized weighted
//! inner product.
//!
//! With `G[m][n] = <e_m, e_n>` the kernel is
//! `K(z, w) = sum_{m,n} Ginv[n][m] e_m(z) conj(e_n(w))`.

use crate::error::{Error, Result};
use crate::geometry::{AffineMap, Biholomorphism, ComplexPoint, Domain, MobiusMap};
use crate::kernels_closed::{transported_derivative, Kernel};
use crate::quadrature::{NodeSet, Quadrature};
use crate::weights::Weight;
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const CHUNK: usize = 2048;

/// Monomials `((z - center) / scale)^m` for `0 <= m <= degree`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    pub center: ComplexPoint,
    pub degree: usize,
    pub scale: f64,
}

impl BasisSpec {
    pub fn new(center: ComplexPoint, degree: usize) -> Self {
        Self {
            center,
            degree,
            scale: 1.0,
        }
    }

    pub fn with_scale(center: ComplexPoint, degree: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("basis scale {scale}")));
        }
        Ok(Self {
            center,
            degree,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    /// `(e_0(z), ..., e_N(z))`.
    pub fn values(&self, z: ComplexPoint) -> DVector<Complex64> {
        let u = (z - self.center) / self.scale;
        let mut out = DVector::zeros(self.dim());
        let mut p = Complex64::new(1.0, 0.0);
        for m in 0..self.dim() {
            out[m] = p;
            p *= u;
        }
        out
    }

    /// `k`-th complex derivatives of every basis function at `z`.
    pub fn derivatives(&self, k: usize, z: ComplexPoint) -> DVector<Complex64> {
        if k == 0 {
            return self.values(z);
        }
        let u = (z - self.center) / self.scale;
        let mut out = DVector::zeros(self.dim());
        let sk = self.scale.powi(-(k as i32));
        let mut p = Complex64::new(1.0, 0.0);
        for m in k..self.dim() {
            let ff: f64 = (0..k).map(|i| (m - i) as f64).product();
            out[m] = p * ff * sk;
            p *= u;
        }
        out
    }
}

/// Numeric parameters shared by all experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericConfig {
    pub basis_degree: usize,
    pub n_r: usize,
    pub n_theta: usize,
    pub pixel_resolution: usize,
    pub refine_depth: usize,
    pub spectral_cutoff: f64,
    /// Move each evaluation point to the centre of a disc model before solving.
    pub recenter: bool,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            basis_degree: 40,
            n_r: 64,
            n_theta: 128,
            pixel_resolution: 512,
            refine_depth: 2,
            spectral_cutoff: 1e-12,
            recenter: true,
        }
    }
}

impl NumericConfig {
    pub fn polar(&self, center: ComplexPoint, radius: f64) -> Quadrature {
        Quadrature::PolarGauss {
            n_r: self.n_r,
            n_theta: self.n_theta,
            center,
            radius,
        }
    }

    pub fn pixel(&self) -> Quadrature {
        Quadrature::PixelMidpoint {
            resolution: self.pixel_resolution,
            refine_depth: self.refine_depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spectral_cutoff > 0.0 && self.spectral_cutoff < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "spectral_cutoff {} must lie in (0, 1)",
                self.spectral_cutoff
            )));
        }
        if self.n_r == 0 || self.n_theta == 0 || self.pixel_resolution == 0 {
            return Err(Error::InvalidArgument("quadrature sizes must be positive".into()));
        }
        Ok(())
    }
}

fn weighted_nodes(dom: &Domain, mu: &Weight, quad: &Quadrature) -> Result<(NodeSet, Vec<f64>)> {
    let nodes = quad.nodes(dom)?;
    let vals: Vec<Result<f64>> = nodes
        .points
        .par_iter()
        .enumerate()
        .map(|(index, &point)| match mu.evaluate(point) {
            Ok(v) => Ok(v),
            Err(_) => Err(Error::NonpositiveWeightAtNode {
                index,
                point,
                value: mu.evaluate(point).unwrap_or(f64::NAN),
            }),
        })
        .collect();
    let mut mu_vals = Vec::with_capacity(vals.len());
    for v in vals {
        mu_vals.push(v?);
    }
    Ok((nodes, mu_vals))
}

fn gram_from_nodes(nodes: &NodeSet, mu: &[f64], basis: &BasisSpec) -> DMatrix<Complex64> {
    let n = basis.dim();
    let g = match &nodes.rings {
        Some(rings) if rings.center == basis.center => {
            // e_m conj(e_n) = rho^{m+n} exp(i (m - n) theta): reduce each ring to
            // its angular moments first.
            let nt = rings.n_theta;
            let dtheta = 2.0 * std::f64::consts::PI / nt as f64;
            let per_ring: Vec<DMatrix<Complex64>> = (0..rings.radii.len())
                .into_par_iter()
                .map(|i| {
                    let qmax = n as isize - 1;
                    let moments: Vec<Complex64> = (-qmax..=qmax)
                        .map(|q| {
                            (0..nt)
                                .map(|k| {
                                    Complex64::from_polar(mu[i * nt + k], dtheta * (q * k as isize) as f64)
                                })
                                .sum()
                        })
                        .collect();
                    let rho = rings.radii[i] / basis.scale;
                    let pw: Vec<f64> = (0..2 * n).map(|e| rho.powi(e as i32)).collect();
                    DMatrix::from_fn(n, n, |m, k| {
                        moments[(m as isize - k as isize + qmax) as usize] * (rings.ring_weights[i] * pw[m + k])
                    })
                })
                .collect();
            per_ring
                .into_iter()
                .fold(DMatrix::zeros(n, n), |acc, g| acc + g)
        }
        _ => {
            let chunks: Vec<DMatrix<Complex64>> = (0..nodes.len().div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let lo = c * CHUNK;
                    let hi = (lo + CHUNK).min(nodes.len());
                    let mut e = DMatrix::<Complex64>::zeros(n, hi - lo);
                    for k in lo..hi {
                        let s = (nodes.weights[k] * mu[k]).sqrt();
                        let v = basis.values(nodes.points[k]);
                        for m in 0..n {
                            e[(m, k - lo)] = v[m] * s;
                        }
                    }
                    &e * e.adjoint()
                })
                .collect();
            chunks
                .into_iter()
                .fold(DMatrix::zeros(n, n), |acc, g| acc + g)
        }
    };
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `G[m][n] = sum_k w_k mu(z_k) e_m(z_k) conj(e_n(z_k))`.
pub fn assemble_gram(
    dom: &Domain,
    mu: &Weight,
    basis: &BasisSpec,
    quad: &Quadrature,
) -> Result<DMatrix<Complex64>> {
    let (nodes, vals) = weighted_nodes(dom, mu, quad)?;
    Ok(gram_from_nodes(&nodes, &vals, basis))
}

/// Reproducing kernel of the truncated weighted space.
#[derive(Debug, Clone)]
pub struct NumericKernel {
    domain: Domain,
    weight: Weight,
    basis: BasisSpec,
    gram: DMatrix<Complex64>,
    inverse_gram: DMatrix<Complex64>,
    quadrature: Quadrature,
    spectral_cutoff: f64,
    discarded_modes: usize,
    nodes: NodeSet,
    mu_at_nodes: Vec<f64>,
}

/// Eigendecomposes the Gram matrix and inverts the eigenvalues above
/// `cutoff * lambda_max`.
pub fn build_kernel(
    dom: &Domain,
    mu: &Weight,
    basis: &BasisSpec,
    quad: &Quadrature,
    cutoff: f64,
) -> Result<NumericKernel> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} must lie in (0, 1)")));
    }
    if !dom.contains(basis.center) {
        return Err(Error::OutsideDomain(basis.center));
    }
    let (nodes, mu_at_nodes) = weighted_nodes(dom, mu, quad)?;
    let gram = gram_from_nodes(&nodes, &mu_at_nodes, basis);
    let eig = SymmetricEigen::new(gram.clone());
    let lmax = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lmax > 0.0 && lmax.is_finite()) {
        return Err(Error::DegenerateGram(format!("largest eigenvalue {lmax}")));
    }
    let n = basis.dim();
    let mut inv_diag = DVector::<Complex64>::zeros(n);
    let mut discarded = 0;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > cutoff * lmax {
            inv_diag[i] = Complex64::new(1.0 / l, 0.0);
        } else {
            discarded += 1;
        }
    }
    if discarded == n {
        return Err(Error::DegenerateGram("every eigenvalue fell below the cutoff".into()));
    }
    let u = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(n, n, |i, j| u[(i, j)] * inv_diag[j]);
    let inv = &scaled * u.adjoint();
    let inverse_gram = (&inv + inv.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(NumericKernel {
        domain: dom.clone(),
        weight: mu.clone(),
        basis: *basis,
        gram,
        inverse_gram,
        quadrature: quad.clone(),
        spectral_cutoff: cutoff,
        discarded_modes: discarded,
        nodes,
        mu_at_nodes,
    })
}

/// Minimizer of `||g||^2` over the basis span subject to `g(z0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSolution {
    /// `1 / min ||g||^2`, the kernel diagonal estimate at `z0`.
    pub value: f64,
    pub min_norm_sq: f64,
    /// Coefficients of the minimizer in the basis.
    pub coefficients: Vec<Complex64>,
}

/// Solves the constrained least-squares problem with one Lagrange multiplier,
/// factoring the Gram matrix directly rather than through its eigensystem.
pub fn extremal_value(
    dom: &Domain,
    mu: &Weight,
    basis: &BasisSpec,
    quad: &Quadrature,
    z0: ComplexPoint,
) -> Result<ExtremalSolution> {
    if !dom.contains(z0) {
        return Err(Error::OutsideDomain(z0));
    }
    let g = assemble_gram(dom, mu, basis, quad)?;
    extremal_from_gram(&g, basis, z0)
}

fn extremal_from_gram(g: &DMatrix<Complex64>, basis: &BasisSpec, z0: ComplexPoint) -> Result<ExtremalSolution> {
    let v = basis.values(z0);
    if v.iter().all(|x| x.norm() == 0.0) {
        return Err(Error::InvalidArgument(format!("every basis function vanishes at {z0}")));
    }
    // ||sum c_m e_m||^2 = c^* conj(G) c.
    let h = g.map(|x| x.conj());
    let rhs = v.map(|x| x.conj());
    let x = match Cholesky::new(h.clone()) {
        Some(ch) => ch.solve(&rhs),
        None => h
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::DegenerateGram("singular Gram matrix in extremal solve".into()))?,
    };
    let value = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<Complex64>().re;
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::DegenerateGram(format!("extremal value {value}")));
    }
    Ok(ExtremalSolution {
        value,
        min_norm_sq: 1.0 / value,
        coefficients: x.iter().map(|c| c / value).collect(),
    })
}

/// Relative defect `| ||K(., w)||^2 - K(w, w) | / K(w, w)` under the kernel's own quadrature.
pub fn reproducing_check(k: &NumericKernel, w: ComplexPoint) -> Result<f64> {
    let kww = k.eval(w, w)?.re;
    if kww == 0.0 {
        return Err(Error::InvalidArgument(format!("K(w, w) vanishes at {w}")));
    }
    let a = k.slice_coefficients(w);
    Ok((k.quadrature_norm_sq(a.as_slice()) - kww).abs() / kww)
}

impl NumericKernel {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<Complex64> {
        &self.gram
    }

    pub fn inverse_gram(&self) -> &DMatrix<Complex64> {
        &self.inverse_gram
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quadrature
    }

    pub fn spectral_cutoff(&self) -> f64 {
        self.spectral_cutoff
    }

    pub fn discarded_modes(&self) -> usize {
        self.discarded_modes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Coefficients `a` with `K(., w) = sum_m a_m e_m`.
    pub fn slice_coefficients(&self, w: ComplexPoint) -> DVector<Complex64> {
        let ew = self.basis.values(w).map(|x| x.conj());
        self.inverse_gram.transpose() * ew
    }

    /// `||sum c_m e_m||^2` through the Gram matrix.
    pub fn gram_norm_sq(&self, c: &[Complex64]) -> f64 {
        let c = DVector::from_column_slice(c);
        let gc = &self.gram * c.map(|x| x.conj());
        c.iter().zip(gc.iter()).map(|(a, b)| a * b).sum::<Complex64>().re
    }

    /// `||sum c_m e_m||^2` summed directly over the quadrature nodes.
    pub fn quadrature_norm_sq(&self, c: &[Complex64]) -> f64 {
        let n = self.nodes.len();
        let parts: Vec<f64> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|ci| {
                let lo = ci * CHUNK;
                let hi = (lo + CHUNK).min(n);
                (lo..hi)
                    .map(|k| {
                        let u = (self.nodes.points[k] - self.basis.center) / self.basis.scale;
                        let f = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * u + x);
                        self.nodes.weights[k] * self.mu_at_nodes[k] * f.norm_sqr()
                    })
                    .sum()
            })
            .collect();
        parts.into_iter().sum()
    }

    /// Value at `z` of `sum c_m e_m`.
    pub fn combination_value(&self, c: &[Complex64], z: ComplexPoint) -> Complex64 {
        let u = (z - self.basis.center) / self.basis.scale;
        c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * u + x)
    }

    /// Extremal solve on the stored Gram matrix.
    pub fn extremal(&self, z0: ComplexPoint) -> Result<ExtremalSolution> {
        self.check_point(z0)?;
        extremal_from_gram(&self.gram, &self.basis, z0)
    }

    fn check_point(&self, z: ComplexPoint) -> Result<()> {
        if !self.domain.contains(z) {
            return Err(Error::OutsideDomain(z));
        }
        if let (Domain::PixelRegion(_), Some(h)) = (&self.domain, self.nodes.pixel_size) {
            let d = self.domain.distance_to_boundary(z)?;
            if d < 2.0 * h {
                return Err(Error::InvalidArgument(format!(
                    "{z} lies within two pixels ({d} < {}) of the boundary",
                    2.0 * h
                )));
            }
        }
        Ok(())
    }
}

impl Kernel for NumericKernel {
    fn contains(&self, z: ComplexPoint) -> bool {
        self.domain.contains(z)
    }

    fn eval_derivative(
        &self,
        alpha: usize,
        beta: usize,
        z: ComplexPoint,
        w: ComplexPoint,
    ) -> Result<Complex64> {
        let bound = self.basis.degree;
        if alpha > bound || beta > bound {
            return Err(Error::DerivativeOrder { alpha, beta, bound });
        }
        self.check_point(z)?;
        self.check_point(w)?;
        let ez = self.basis.derivatives(alpha, z);
        let ew = self.basis.derivatives(beta, w);
        Ok(ew.dotc(&(&self.inverse_gram * ez)))
    }
}

/// A numeric kernel on a model domain pulled back through `map`:
/// `K(z, w) = map'(z)^p K_inner(map z, map w) conj(map'(w))^p`.
#[derive(Debug, Clone)]
pub struct TransportedKernel {
    pub inner: NumericKernel,
    pub map: Biholomorphism,
    pub power: usize,
    pub source: Domain,
}

impl Kernel for TransportedKernel {
    fn contains(&self, z: ComplexPoint) -> bool {
        self.source.contains(z)
    }

    fn eval_derivative(
        &self,
        alpha: usize,
        beta: usize,
        z: ComplexPoint,
        w: ComplexPoint,
    ) -> Result<Complex64> {
        for p in [z, w] {
            if !self.source.contains(p) {
                return Err(Error::OutsideDomain(p));
            }
        }
        transported_derivative(&self.inner, &self.map, self.power, alpha, beta, z, w)
    }
}

/// Either a kernel solved in place or one solved after recentring.
#[derive(Debug, Clone)]
pub enum FittedKernel {
    Direct(NumericKernel),
    Transported(TransportedKernel),
}

impl FittedKernel {
    pub fn inner(&self) -> &NumericKernel {
        match self {
            FittedKernel::Direct(k) => k,
            FittedKernel::Transported(t) => &t.inner,
        }
    }

    pub fn discarded_modes(&self) -> usize {
        self.inner().discarded_modes()
    }
}

impl Kernel for FittedKernel {
    fn contains(&self, z: ComplexPoint) -> bool {
        match self {
            FittedKernel::Direct(k) => k.contains(z),
            FittedKernel::Transported(t) => t.contains(z),
        }
    }

    fn eval_derivative(
        &self,
        alpha: usize,
        beta: usize,
        z: ComplexPoint,
        w: ComplexPoint,
    ) -> Result<Complex64> {
        match self {
            FittedKernel::Direct(k) => k.eval_derivative(alpha, beta, z, w),
            FittedKernel::Transported(t) => t.eval_derivative(alpha, beta, z, w),
        }
    }
}

/// How the image domain of a recentred solve is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageRule {
    /// Polar Gauss rule when the image is the whole unit disc, pixels otherwise.
    Auto,
    /// Pixels always.
    Pixel,
}

/// Möbius map `g` of the host disc of `dom` onto the unit disc with `g(z0) = 0`.
pub fn recentring_map(dom: &Domain, z0: ComplexPoint) -> Result<MobiusMap> {
    if !dom.contains(z0) {
        return Err(Error::OutsideDomain(z0));
    }
    let (c, r) = dom
        .enclosing_disc()
        .ok_or_else(|| Error::InvalidDomain("recentring needs a bounded host disc".into()))?;
    let to_unit = AffineMap::new(Complex64::new(1.0 / r, 0.0), -c / r)?;
    let a = to_unit.apply(z0);
    Ok(MobiusMap::disc_automorphism(a)?.compose(&to_unit.to_mobius()))
}

/// Kernel of `(dom, mu)` solved in the frame where `z0` sits at the centre of
/// the unit disc.
pub fn recentred_kernel(
    dom: &Domain,
    mu: &Weight,
    z0: ComplexPoint,
    cfg: &NumericConfig,
    rule: ImageRule,
) -> Result<TransportedKernel> {
    cfg.validate()?;
    let g = recentring_map(dom, z0)?;
    let whole_disc = dom.as_disc().is_some();
    let image = if whole_disc && rule == ImageRule::Auto {
        Domain::UnitDisc
    } else {
        Domain::mobius_image(dom.clone(), g)?
    };
    let map = Biholomorphism::Mobius(g);
    let (weight, power) = match mu {
        Weight::DPower { d, base } if whole_disc && base == dom => (
            Weight::DPower {
                d: *d,
                base: Domain::UnitDisc,
            },
            d + 1,
        ),
        _ => (Weight::pullback(map, mu.clone()), 1),
    };
    let quad = if matches!(image, Domain::UnitDisc) {
        cfg.polar(Complex64::new(0.0, 0.0), 1.0)
    } else {
        cfg.pixel()
    };
    let basis = BasisSpec::new(Complex64::new(0.0, 0.0), cfg.basis_degree);
    let inner = build_kernel(&image, &weight, &basis, &quad, cfg.spectral_cutoff)?;
    Ok(TransportedKernel {
        inner,
        map,
        power,
        source: dom.clone(),
    })
}

/// Kernel of `(dom, mu)` accurate near `z0`: recentred when `cfg.recenter`,
/// otherwise solved directly with a basis centred in the host disc.
pub fn fit_kernel(dom: &Domain, mu: &Weight, z0: ComplexPoint, cfg: &NumericConfig) -> Result<FittedKernel> {
    cfg.validate()?;
    if cfg.recenter && dom.enclosing_disc().is_some() {
        return Ok(FittedKernel::Transported(recentred_kernel(
            dom,
            mu,
            z0,
            cfg,
            ImageRule::Auto,
        )?));
    }
    let (quad, center, scale) = match dom.as_disc() {
        Some((c, r)) => (cfg.polar(c, r), c, r),
        None => {
            let (c, r) = dom
                .enclosing_disc()
                .ok_or_else(|| Error::InvalidDomain("numeric kernels need a bounded domain".into()))?;
            let center = if dom.contains(c) { c } else { z0 };
            (cfg.pixel(), center, r)
        }
    };
    let basis = BasisSpec::with_scale(center, cfg.basis_degree, scale)?;
    Ok(FittedKernel::Direct(build_kernel(
        dom,
        mu,
        &basis,
        &quad,
        cfg.spectral_cutoff,
    )?))
}
