//! Weight descriptors: positive functions on a domain that define the
//! weighted `L^2` inner product, with boundary metadata and combinators.

use crate::error::{Error, Result};
use crate::geometry::{Biholomorphism, ComplexPoint, Domain};
use crate::kernels_closed::unweighted_diagonal;
use num_complex::Complex64;
use serde::Serialize;

/// Oscillation tolerance for the sampled admissibility test.
pub const ADMISSIBILITY_TOLERANCE: f64 = 1e-6;

/// Approach distances used by [`check_admissible_class`].
pub const APPROACH_DELTAS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Constant { c: f64 },
    /// `u Re z + v Im z + w0`.
    RealAffine { u: f64, v: f64, w0: f64 },
    /// `K_base^{-d}`, for a base with a closed-form unweighted kernel.
    DPower { d: usize, base: Domain },
    /// `sum alpha_i mu_i`.
    Sum { terms: Vec<(f64, Weight)> },
    Product { factors: Vec<Weight> },
    /// `zeta -> base(map^{-1}(zeta))`, the push-forward of `base` along `map`.
    Pullback { map: Biholomorphism, base: Box<Weight> },
}

impl Weight {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InadmissibleWeight(format!("constant {c} must be positive")));
        }
        Ok(Weight::Constant { c })
    }

    pub fn sum(terms: Vec<(f64, Weight)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Empty("sum of weights"));
        }
        if let Some((a, _)) = terms.iter().find(|(a, _)| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::InadmissibleWeight(format!(
                "sum coefficient {a} must be positive"
            )));
        }
        Ok(Weight::Sum { terms })
    }

    pub fn product(factors: Vec<Weight>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Empty("product of weights"));
        }
        Ok(Weight::Product { factors })
    }

    pub fn pullback(map: Biholomorphism, base: Weight) -> Self {
        Weight::Pullback {
            map,
            base: Box::new(base),
        }
    }

    /// `mu(z)`; errors when the value is not strictly positive.
    pub fn evaluate(&self, z: ComplexPoint) -> Result<f64> {
        let v = self.raw(z)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InadmissibleWeight(format!("value {v} at {z}")))
        }
    }

    fn raw(&self, z: ComplexPoint) -> Result<f64> {
        Ok(match self {
            Weight::Constant { c } => *c,
            Weight::RealAffine { u, v, w0 } => u * z.re + v * z.im + w0,
            Weight::DPower { d, base } => {
                if *d == 0 {
                    1.0
                } else {
                    unweighted_diagonal(base, z)?.powi(-(*d as i32))
                }
            }
            Weight::Sum { terms } => {
                let mut s = 0.0;
                for (a, w) in terms {
                    s += a * w.evaluate(z)?;
                }
                s
            }
            Weight::Product { factors } => {
                let mut p = 1.0;
                for w in factors {
                    p *= w.evaluate(z)?;
                }
                p
            }
            Weight::Pullback { map, base } => base.evaluate(map.inverse().apply(z))?,
        })
    }

    /// `mu(p)` when `mu` extends continuously to `p`.
    pub fn boundary_value_at(&self, p: ComplexPoint) -> Option<f64> {
        match self {
            Weight::Constant { c } => Some(*c),
            Weight::RealAffine { u, v, w0 } => Some(u * p.re + v * p.im + w0),
            Weight::DPower { d, base } => {
                if *d == 0 {
                    Some(1.0)
                } else if base.contains(p) {
                    unweighted_diagonal(base, p).ok().map(|k| k.powi(-(*d as i32)))
                } else if base.as_disc().is_some() && base.boundary_residual(p) < 1e-12 {
                    Some(0.0)
                } else {
                    None
                }
            }
            Weight::Sum { terms } => terms
                .iter()
                .map(|(a, w)| w.boundary_value_at(p).map(|v| a * v))
                .sum(),
            Weight::Product { factors } => factors.iter().map(|w| w.boundary_value_at(p)).product(),
            Weight::Pullback { map, base } => {
                let q = map.inverse().apply(p);
                if q.re.is_finite() && q.im.is_finite() {
                    base.boundary_value_at(q)
                } else {
                    None
                }
            }
        }
    }

    /// An upper bound of `mu` on `dom`, when one is known analytically.
    pub fn sup_bound(&self, dom: &Domain) -> Option<f64> {
        match self {
            Weight::Constant { c } => Some(*c),
            Weight::RealAffine { u, v, w0 } => {
                let (c, r) = dom.enclosing_disc()?;
                Some(u * c.re + v * c.im + w0 + r * u.hypot(*v))
            }
            Weight::DPower { d, base } => {
                let (_, r) = base.as_disc()?;
                Some((std::f64::consts::PI * r * r).powi(*d as i32))
            }
            Weight::Sum { terms } => terms
                .iter()
                .map(|(a, w)| w.sup_bound(dom).map(|s| a * s))
                .sum(),
            Weight::Product { factors } => factors.iter().map(|w| w.sup_bound(dom)).product(),
            Weight::Pullback { map, base } => base.sup_bound(&preimage(dom, map)?),
        }
    }

    /// A positive lower bound of `mu` on `dom ∩ D(p, radius)`, when one is known analytically.
    pub fn inf_bound_near(&self, dom: &Domain, p: ComplexPoint, radius: f64) -> Option<f64> {
        let v = match self {
            Weight::Constant { c } => *c,
            Weight::RealAffine { u, v, w0 } => u * p.re + v * p.im + w0 - radius * u.hypot(*v),
            Weight::DPower { d, .. } => {
                if *d == 0 {
                    1.0
                } else {
                    return None;
                }
            }
            Weight::Sum { terms } => terms
                .iter()
                .map(|(a, w)| w.inf_bound_near(dom, p, radius).map(|s| a * s))
                .sum::<Option<f64>>()?,
            Weight::Product { factors } => factors
                .iter()
                .map(|w| w.inf_bound_near(dom, p, radius))
                .product::<Option<f64>>()?,
            Weight::Pullback { base, .. } => match base.as_ref() {
                Weight::Constant { c } => *c,
                _ => return None,
            },
        };
        (v > 0.0).then_some(v)
    }
}

fn preimage(dom: &Domain, map: &Biholomorphism) -> Option<Domain> {
    match map.inverse() {
        Biholomorphism::Affine(a) => Some(Domain::affine_image(dom.clone(), a)),
        Biholomorphism::Mobius(m) => Domain::mobius_image(dom.clone(), m).ok(),
    }
}

/// Sampled evidence for membership in the class of bounded weights that
/// extend continuously and positively to a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    /// `mu(p)`, analytic when available, otherwise extrapolated.
    pub boundary_value: f64,
    pub analytic_boundary_value: bool,
    /// Spread of the extrapolated boundary values plus the worst linear-fit residual.
    pub oscillation: f64,
    pub sup_bound: f64,
    pub inf_bound_near_p: f64,
    pub member: bool,
}

/// Samples `mu` along three approach directions to `p` and on a coarse
/// `samples x samples` grid over `dom`.
pub fn check_admissible_class(
    mu: &Weight,
    dom: &Domain,
    p: ComplexPoint,
    samples: usize,
) -> Result<AdmissibilityReport> {
    let normal = dom.inner_normal(p)?;
    let tilt = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let mut intercepts = Vec::new();
    let mut residual: f64 = 0.0;
    let mut local_inf = f64::INFINITY;
    let mut sup: f64 = 0.0;
    for dir in [normal, normal * tilt, normal * tilt.conj()] {
        let mut pts = Vec::new();
        for &d in &APPROACH_DELTAS {
            let z = p + dir * d;
            if !dom.contains(z) {
                continue;
            }
            let v = mu.evaluate(z).unwrap_or(0.0);
            local_inf = local_inf.min(v);
            sup = sup.max(v);
            pts.push((d, v));
        }
        if pts.len() < 2 {
            continue;
        }
        let (slope, icpt) = least_squares_line(&pts);
        for &(d, v) in &pts {
            residual = residual.max((v - (slope * d + icpt)).abs());
        }
        intercepts.push(icpt);
    }
    if intercepts.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no interior approach to {p} along the sampled directions"
        )));
    }
    let lo = intercepts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = intercepts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let oscillation = (hi - lo) + residual;

    if let Some(bbox) = dom.bounding_box() {
        let n = samples.max(2);
        for z in bbox.grid(n, n) {
            if !dom.contains(z) {
                continue;
            }
            let v = mu.evaluate(z).unwrap_or(0.0);
            sup = sup.max(v);
            if (z - p).norm() < 0.1 {
                local_inf = local_inf.min(v);
            }
        }
    }
    let analytic = mu.boundary_value_at(p);
    let boundary_value = analytic.unwrap_or(0.5 * (lo + hi));
    let sup_bound = mu.sup_bound(dom).unwrap_or(sup).max(sup);
    let inf_bound = mu.inf_bound_near(dom, p, 0.1).unwrap_or(local_inf).min(local_inf);
    Ok(AdmissibilityReport {
        boundary_value,
        analytic_boundary_value: analytic.is_some(),
        oscillation,
        sup_bound,
        inf_bound_near_p: inf_bound,
        member: oscillation < ADMISSIBILITY_TOLERANCE
            && boundary_value > 0.0
            && inf_bound > 0.0
            && sup_bound.is_finite(),
    })
}

/// Ordinary least squares `y = slope x + intercept`.
pub(crate) fn least_squares_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (0.0, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `lambda = 1 / sum_{i,j} alpha_i alpha_j mu_i(p) / mu_j(p)`.
pub fn corollary_lambda(alphas: &[f64], mu_values_at_p: &[f64]) -> Result<f64> {
    if alphas.is_empty() {
        return Err(Error::Empty("coefficient list"));
    }
    if alphas.len() != mu_values_at_p.len() {
        return Err(Error::InvalidArgument(format!(
            "{} coefficients but {} boundary values",
            alphas.len(),
            mu_values_at_p.len()
        )));
    }
    if alphas.iter().chain(mu_values_at_p).any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument("entries must be positive".into()));
    }
    let mut s = 0.0;
    for (ai, mi) in alphas.iter().zip(mu_values_at_p) {
        for (aj, mj) in alphas.iter().zip(mu_values_at_p) {
            s += ai * aj * mi / mj;
        }
    }
    Ok(1.0 / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cpt, AffineMap, MobiusMap};

    fn affine() -> Weight {
        Weight::RealAffine {
            u: 0.5,
            v: 0.0,
            w0: 1.5,
        }
    }

    #[test]
    fn evaluation() {
        assert_eq!(Weight::constant(2.0).unwrap().evaluate(cpt(0.3, 0.1)).unwrap(), 2.0);
        assert_eq!(affine().evaluate(cpt(1.0, 0.0)).unwrap(), 2.0);
        let dp = Weight::DPower {
            d: 1,
            base: Domain::UnitDisc,
        };
        assert!((dp.evaluate(cpt(0.0, 0.0)).unwrap() - std::f64::consts::PI).abs() < 1e-14);
        let bad = Weight::RealAffine {
            u: 1.0,
            v: 0.0,
            w0: -0.5,
        };
        assert!(matches!(bad.evaluate(cpt(0.0, 0.0)), Err(Error::InadmissibleWeight(_))));
        assert!(Weight::constant(0.0).is_err());
        assert!(Weight::sum(vec![(-1.0, affine())]).is_err());
    }

    #[test]
    fn admissibility_reports() {
        let p = cpt(1.0, 0.0);
        let r = check_admissible_class(&affine(), &Domain::UnitDisc, p, 20).unwrap();
        assert!(r.member);
        assert_eq!(r.boundary_value, 2.0);
        let dp = Weight::DPower {
            d: 1,
            base: Domain::UnitDisc,
        };
        let r = check_admissible_class(&dp, &Domain::UnitDisc, p, 20).unwrap();
        assert!(!r.member);
        assert_eq!(r.boundary_value, 0.0);
        let c = Weight::constant(3.5).unwrap();
        let r = check_admissible_class(&c, &Domain::HalfPlaneH, cpt(0.5, 2.0), 10).unwrap();
        assert!(r.member);
        assert_eq!(r.boundary_value, 3.5);
    }

    #[test]
    fn lambda_values() {
        assert_eq!(corollary_lambda(&[1.0], &[5.0]).unwrap(), 1.0);
        assert!((corollary_lambda(&[1.0, 2.0], &[1.0, 2.0]).unwrap() - 0.1).abs() < 1e-15);
        assert!((corollary_lambda(&[1.0, 1.0], &[7.0, 7.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!(corollary_lambda(&[1.0], &[1.0, 2.0]).is_err());
        assert!(corollary_lambda(&[1.0, 0.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pullback_consistency() {
        let f = Biholomorphism::Mobius(MobiusMap::half_plane_to_disc());
        let w = Weight::pullback(f, affine());
        let g = Biholomorphism::Affine(AffineMap::new(cpt(2.0, 1.0), cpt(-0.3, 0.0)).unwrap());
        let w2 = Weight::pullback(g, affine());
        for z in [cpt(0.1, 0.2), cpt(-1.0, 1.0), cpt(0.4, -0.4)] {
            assert!((w.evaluate(f.apply(z)).unwrap() - affine().evaluate(z).unwrap()).abs() < 1e-14);
            assert_eq!(w2.evaluate(g.apply(z)).unwrap(), affine().evaluate(z).unwrap());
        }
    }

    #[test]
    fn combinators_and_metadata() {
        let s = Weight::sum(vec![(1.0, affine()), (2.0, Weight::constant(1.0).unwrap())]).unwrap();
        let p = cpt(1.0, 0.0);
        assert_eq!(s.boundary_value_at(p), Some(4.0));
        assert_eq!(s.evaluate(cpt(0.0, 0.0)).unwrap(), 3.5);
        let m = Weight::product(vec![affine(), Weight::constant(2.0).unwrap()]).unwrap();
        assert_eq!(m.boundary_value_at(p), Some(4.0));
        assert_eq!(m.sup_bound(&Domain::UnitDisc), Some(4.0));
        assert_eq!(affine().inf_bound_near(&Domain::UnitDisc, p, 0.1), Some(1.95));
    }
}
