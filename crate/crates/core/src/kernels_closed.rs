//! Exact kernel formulas on model domains.
//!
//! On the unit disc the weight `K^{-d}` has reproducing kernel
//! `(2d + 1) / pi^{d+1} * (1 - z conj(w))^{-(2d+2)}`; `d = 0` is the classical
//! Bergman kernel. The half-plane `Re z < 1/2` carries `1 / (pi (1 - z - conj(w))^2)`.
//! Kernels on other discs or half-planes are obtained by transport through
//! affine or Möbius maps, with Jacobian power `d + 1`.

use crate::error::{Error, Result};
use crate::geometry::{ensure_finite, AffineMap, Biholomorphism, ComplexPoint, Domain};
use crate::jet::Jet;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Highest total derivative order `alpha + beta` served by closed kernels.
pub const MAX_CLOSED_DERIVATIVE_ORDER: usize = 8;

/// Relative tail bound used when summing monomial series.
const SERIES_TAIL: f64 = 1e-14;
const SERIES_MAX_TERMS: usize = 20_000_000;

/// Common evaluation surface of closed-form and numeric kernels.
pub trait Kernel {
    fn contains(&self, z: ComplexPoint) -> bool;

    /// `K(z, w)`.
    fn eval(&self, z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
        self.eval_derivative(0, 0, z, w)
    }

    /// `d^{alpha+beta} / dz^alpha d conj(w)^beta K(z, w)`.
    fn eval_derivative(
        &self,
        alpha: usize,
        beta: usize,
        z: ComplexPoint,
        w: ComplexPoint,
    ) -> Result<Complex64>;

    /// Diagonal value `K(z, z)` (real part).
    fn diagonal(&self, z: ComplexPoint) -> Result<f64> {
        Ok(self.eval(z, z)?.re)
    }
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn contains(&self, z: ComplexPoint) -> bool {
        (**self).contains(z)
    }

    fn eval(&self, z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
        (**self).eval(z, w)
    }

    fn eval_derivative(
        &self,
        alpha: usize,
        beta: usize,
        z: ComplexPoint,
        w: ComplexPoint,
    ) -> Result<Complex64> {
        (**self).eval_derivative(alpha, beta, z, w)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn falling(m: usize, k: usize) -> f64 {
    (0..k).map(|i| (m - i) as f64).product()
}

/// Derivative of `f'(z)^p K_base(f(z), f(w)) conj(f'(w))^p` through Taylor jets of `f`.
pub fn transported_derivative<K: Kernel + ?Sized>(
    base: &K,
    map: &Biholomorphism,
    power: usize,
    alpha: usize,
    beta: usize,
    z: ComplexPoint,
    w: ComplexPoint,
) -> Result<Complex64> {
    let side = |p: ComplexPoint, order: usize| -> (ComplexPoint, Vec<Complex64>) {
        let (value, deriv) = map.taylor(p, order);
        let jac = deriv.powi(power);
        let shift = value.without_constant();
        let mut acc = Jet::constant(Complex64::new(1.0, 0.0), order);
        let mut out = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            out.push(jac.mul(&acc).coeff(order));
            acc = acc.mul(&shift);
        }
        (value.coeff(0), out)
    };
    let (zeta, u) = side(z, alpha);
    let (eta, v) = side(w, beta);
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, ui) in u.iter().enumerate() {
        if ui.norm() == 0.0 {
            continue;
        }
        for (j, vj) in v.iter().enumerate() {
            if vj.norm() == 0.0 {
                continue;
            }
            let t = base.eval_derivative(i, j, zeta, eta)? / (factorial(i) * factorial(j));
            sum += t * ui * vj.conj();
        }
    }
    Ok(sum * factorial(alpha) * factorial(beta))
}

/// Closed-form unweighted diagonal `K_D(z)` for discs, the half-plane and
/// their affine or Möbius images.
pub fn unweighted_diagonal(dom: &Domain, z: ComplexPoint) -> Result<f64> {
    if !dom.contains(z) {
        return Err(Error::OutsideDomain(z));
    }
    match dom {
        Domain::UnitDisc => Ok(1.0 / (PI * (1.0 - z.norm_sqr()).powi(2))),
        Domain::Disc { center, radius } => {
            let r2 = radius * radius;
            Ok(r2 / (PI * (r2 - (z - center).norm_sqr()).powi(2)))
        }
        Domain::HalfPlaneH => Ok(1.0 / (PI * (1.0 - 2.0 * z.re).powi(2))),
        Domain::AffineImage { base, map } => {
            Ok(unweighted_diagonal(base, map.inverse().apply(z))? / map.a.norm_sqr())
        }
        Domain::MobiusImage { base, map } => {
            let inv = map.inverse();
            Ok(inv.derivative(z).norm_sqr() * unweighted_diagonal(base, inv.apply(z))?)
        }
        _ => Err(Error::InvalidDomain(
            "no closed-form unweighted kernel for this domain".into(),
        )),
    }
}

/// A kernel given by an exact formula.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedKernel {
    /// `1 / (pi (1 - z conj(w))^2)` on the unit disc.
    DiscUnweighted,
    /// `1 / (pi (1 - z - conj(w))^2)` on `Re z < 1/2`.
    HalfPlaneUnweighted,
    /// Kernel of the weight `K_D^{-d}` on the unit disc.
    DiscDPower { d: usize },
    /// Kernel for the weight `c * mu`, i.e. `K / c`.
    ConstantScaled { c: f64, base: Box<ClosedKernel> },
    /// `f'(z)^{d+1} K_base(f(z), f(w)) conj(f'(w))^{d+1}`.
    Transported {
        map: Biholomorphism,
        base: Box<ClosedKernel>,
        d: usize,
    },
}

/// Returns the kernel of `K_D^{-d}` on the unit disc.
pub fn disc_dpower_kernel(d: usize) -> ClosedKernel {
    ClosedKernel::DiscDPower { d }
}

/// Divides every evaluation by `c`.
pub fn constant_weight_scale(k: ClosedKernel, c: f64) -> Result<ClosedKernel> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "constant weight must be positive, got {c}"
        )));
    }
    Ok(ClosedKernel::ConstantScaled {
        c,
        base: Box::new(k),
    })
}

/// Transports `k2` on `D2` back to `source = D1` through `f: D1 -> D2`.
///
/// Checks on sampled points that `f` maps `source` into the domain of `k2`
/// and its boundary onto the boundary.
pub fn transport(
    k2: ClosedKernel,
    f: Biholomorphism,
    d: usize,
    source: &Domain,
) -> Result<ClosedKernel> {
    if d > 0 && k2.dpower_order() != d {
        return Err(Error::InvalidMap(format!(
            "Jacobian power {} needs a d-power kernel with d = {d}",
            d + 1
        )));
    }
    let target = k2.domain();
    for z in interior_samples(source) {
        if !target.contains(f.apply(z)) {
            return Err(Error::InvalidMap(format!(
                "map sends interior point {z} outside the kernel's domain"
            )));
        }
    }
    if let Some(bdry) = boundary_samples(source, 16) {
        for b in bdry {
            let fb = f.apply(b);
            if !fb.re.is_finite() || !fb.im.is_finite() {
                continue;
            }
            let res = target.boundary_residual(fb);
            if !(res < 1e-9 * (1.0 + fb.norm())) {
                return Err(Error::InvalidMap(format!(
                    "map sends boundary point {b} to {fb}, off the target boundary"
                )));
            }
        }
    }
    Ok(ClosedKernel::Transported {
        map: f,
        base: Box::new(k2),
        d,
    })
}

fn interior_samples(dom: &Domain) -> Vec<ComplexPoint> {
    if let Some((c, r)) = dom.as_disc() {
        return (0..12)
            .map(|k| c + Complex64::from_polar(r * (0.1 + 0.07 * k as f64), 0.9 * k as f64))
            .collect();
    }
    match dom {
        Domain::HalfPlaneH => (0..12)
            .map(|k| Complex64::new(0.45 - 0.3 * k as f64, -2.0 + 0.4 * k as f64))
            .collect(),
        _ => Vec::new(),
    }
}

fn boundary_samples(dom: &Domain, n: usize) -> Option<Vec<ComplexPoint>> {
    if let Some(s) = dom.disc_boundary_samples(n) {
        return Some(s);
    }
    match dom {
        Domain::HalfPlaneH => Some(
            (0..n)
                .map(|k| Complex64::new(0.5, (k as f64 - n as f64 / 2.0) * 0.7))
                .collect(),
        ),
        _ => None,
    }
}

impl ClosedKernel {
    /// The unweighted kernel of a disc, the half-plane, or an affine/Möbius image of one.
    pub fn for_domain(dom: &Domain) -> Result<ClosedKernel> {
        match dom {
            Domain::UnitDisc => Ok(ClosedKernel::DiscUnweighted),
            Domain::HalfPlaneH => Ok(ClosedKernel::HalfPlaneUnweighted),
            Domain::Disc { center, radius } => Ok(ClosedKernel::Transported {
                map: Biholomorphism::Affine(AffineMap::new(
                    Complex64::new(1.0 / radius, 0.0),
                    -center / *radius,
                )?),
                base: Box::new(ClosedKernel::DiscUnweighted),
                d: 0,
            }),
            Domain::AffineImage { base, map } => Ok(ClosedKernel::Transported {
                map: Biholomorphism::Affine(map.inverse()),
                base: Box::new(ClosedKernel::for_domain(base)?),
                d: 0,
            }),
            Domain::MobiusImage { base, map } => Ok(ClosedKernel::Transported {
                map: Biholomorphism::Mobius(map.inverse()),
                base: Box::new(ClosedKernel::for_domain(base)?),
                d: 0,
            }),
            _ => Err(Error::InvalidDomain(
                "no closed-form kernel for this domain".into(),
            )),
        }
    }

    /// The `K^{-d}`-weighted kernel of a disc-shaped domain.
    pub fn dpower_for_domain(dom: &Domain, d: usize) -> Result<ClosedKernel> {
        let (c, r) = dom
            .as_disc()
            .ok_or_else(|| Error::InvalidDomain("d-power closed form needs a disc".into()))?;
        if matches!(dom, Domain::UnitDisc) {
            return Ok(ClosedKernel::DiscDPower { d });
        }
        Ok(ClosedKernel::Transported {
            map: Biholomorphism::Affine(AffineMap::new(Complex64::new(1.0 / r, 0.0), -c / r)?),
            base: Box::new(ClosedKernel::DiscDPower { d }),
            d,
        })
    }

    /// Domain on which the formula is the reproducing kernel.
    pub fn domain(&self) -> Domain {
        match self {
            ClosedKernel::DiscUnweighted | ClosedKernel::DiscDPower { .. } => Domain::UnitDisc,
            ClosedKernel::HalfPlaneUnweighted => Domain::HalfPlaneH,
            ClosedKernel::ConstantScaled { base, .. } => base.domain(),
            ClosedKernel::Transported { map, base, .. } => match map.inverse() {
                Biholomorphism::Affine(a) => Domain::affine_image(base.domain(), a),
                Biholomorphism::Mobius(m) => Domain::MobiusImage {
                    base: Box::new(base.domain()),
                    map: m,
                },
            },
        }
    }

    /// The `d` of the transformation rule this kernel obeys.
    pub fn dpower_order(&self) -> usize {
        match self {
            ClosedKernel::DiscUnweighted | ClosedKernel::HalfPlaneUnweighted => 0,
            ClosedKernel::DiscDPower { d } => *d,
            ClosedKernel::ConstantScaled { base, .. } => base.dpower_order(),
            ClosedKernel::Transported { d, .. } => *d,
        }
    }
}

/// `sum_m c_m d_z^alpha d_wbar^beta (z conj(w))^m` with
/// `c_m = (m + 2d + 1)! / (m! (2d)! pi^{d+1})`.
fn disc_series(d: usize, alpha: usize, beta: usize, z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
    let wb = w.conj();
    let c0 = (2 * d + 1) as f64 / PI.powi(d as i32 + 1);
    let coeff = |m: usize| -> f64 {
        // c_m = c_0 * prod_{k<m} (k + 2d + 2) / (k + 1)
        (0..m).fold(c0, |acc, k| acc * (k + 2 * d + 2) as f64 / (k + 1) as f64)
    };
    let m0 = alpha.max(beta);
    let zero = Complex64::new(0.0, 0.0);
    if z.norm() == 0.0 || w.norm() == 0.0 {
        // Only the term with z^0 (resp. wbar^0) survives.
        let m = match (z.norm() == 0.0, w.norm() == 0.0) {
            (true, true) if alpha == beta => alpha,
            (true, false) if alpha >= beta => alpha,
            (false, true) if beta >= alpha => beta,
            _ => return Ok(zero),
        };
        let term = coeff(m) * falling(m, alpha) * falling(m, beta);
        return Ok(Complex64::new(term, 0.0) * z.powu((m - alpha) as u32) * wb.powu((m - beta) as u32));
    }
    let q = z.norm() * w.norm();
    if q >= 1.0 {
        return Err(Error::OutsideDomain(if z.norm() >= w.norm() { z } else { w }));
    }
    let mut c = coeff(m0);
    let mut zp = z.powu((m0 - alpha) as u32);
    let mut wp = wb.powu((m0 - beta) as u32);
    let mut sum = zero;
    let mut m = m0;
    loop {
        sum += zp * wp * (c * falling(m, alpha) * falling(m, beta));
        // Successive term magnitudes shrink by a ratio that decreases toward q,
        // so the geometric bound on the remainder is conservative.
        let next = m + 1;
        let ratio = (next + 2 * d + 1) as f64 / next as f64
            * (next as f64 / (next - alpha) as f64)
            * (next as f64 / (next - beta) as f64)
            * q;
        let c_next = c * (next + 2 * d + 1) as f64 / next as f64;
        zp *= z;
        wp *= wb;
        let next_mag = c_next * falling(next, alpha) * falling(next, beta) * zp.norm() * wp.norm();
        if ratio < 1.0 && next_mag / (1.0 - ratio) <= SERIES_TAIL * sum.norm() {
            break;
        }
        c = c_next;
        m = next;
        if m - m0 > SERIES_MAX_TERMS {
            return Err(Error::SeriesTruncation(format!(
                "disc series at |z conj w| = {q} needs more than {SERIES_MAX_TERMS} terms"
            )));
        }
    }
    Ok(sum)
}

impl Kernel for ClosedKernel {
    fn contains(&self, z: ComplexPoint) -> bool {
        match self {
            ClosedKernel::DiscUnweighted | ClosedKernel::DiscDPower { .. } => {
                Domain::UnitDisc.contains(z)
            }
            ClosedKernel::HalfPlaneUnweighted => Domain::HalfPlaneH.contains(z),
            ClosedKernel::ConstantScaled { base, .. } => base.contains(z),
            ClosedKernel::Transported { map, base, .. } => base.contains(map.apply(z)),
        }
    }

    fn eval(&self, z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
        ensure_finite(z, "z")?;
        ensure_finite(w, "w")?;
        for p in [z, w] {
            if !self.contains(p) {
                return Err(Error::OutsideDomain(p));
            }
        }
        match self {
            ClosedKernel::DiscUnweighted => {
                let s = Complex64::new(1.0, 0.0) - z * w.conj();
                Ok((s * s * PI).inv())
            }
            ClosedKernel::HalfPlaneUnweighted => {
                let s = Complex64::new(1.0, 0.0) - z - w.conj();
                Ok((s * s * PI).inv())
            }
            ClosedKernel::DiscDPower { d } => {
                let s = Complex64::new(1.0, 0.0) - z * w.conj();
                let scale = (2 * d + 1) as f64 / PI.powi(*d as i32 + 1);
                Ok(s.powi(-(2 * *d as i32 + 2)) * scale)
            }
            ClosedKernel::ConstantScaled { c, base } => Ok(base.eval(z, w)? / *c),
            ClosedKernel::Transported { map, base, d } => {
                let jz = map.derivative(z).powu(*d as u32 + 1);
                let jw = map.derivative(w).powu(*d as u32 + 1);
                Ok(jz * base.eval(map.apply(z), map.apply(w))? * jw.conj())
            }
        }
    }

    fn eval_derivative(
        &self,
        alpha: usize,
        beta: usize,
        z: ComplexPoint,
        w: ComplexPoint,
    ) -> Result<Complex64> {
        if alpha + beta > MAX_CLOSED_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder {
                alpha,
                beta,
                bound: MAX_CLOSED_DERIVATIVE_ORDER,
            });
        }
        if alpha == 0 && beta == 0 {
            return self.eval(z, w);
        }
        ensure_finite(z, "z")?;
        ensure_finite(w, "w")?;
        for p in [z, w] {
            if !self.contains(p) {
                return Err(Error::OutsideDomain(p));
            }
        }
        match self {
            ClosedKernel::DiscUnweighted => disc_series(0, alpha, beta, z, w),
            ClosedKernel::DiscDPower { d } => disc_series(*d, alpha, beta, z, w),
            ClosedKernel::HalfPlaneUnweighted => {
                // d^n/ds^n (1 - s)^{-2} = (n + 1)! (1 - s)^{-(n+2)} with s = z + conj(w).
                let n = alpha + beta;
                let s = Complex64::new(1.0, 0.0) - z - w.conj();
                Ok(s.powi(-(n as i32 + 2)) * (factorial(n + 1) / PI))
            }
            ClosedKernel::ConstantScaled { c, base } => {
                Ok(base.eval_derivative(alpha, beta, z, w)? / *c)
            }
            ClosedKernel::Transported { map, base, d } => {
                transported_derivative(base.as_ref(), map, *d + 1, alpha, beta, z, w)
            }
        }
    }
}
