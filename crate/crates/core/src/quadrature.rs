//! Planar quadrature rules for the weighted `L^2` inner product.

use crate::error::{Error, Result};
use crate::geometry::{cpt, ComplexPoint, Domain};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

/// A quadrature rule, resolved against a domain by [`Quadrature::nodes`].
#[derive(Debug, Clone, PartialEq)]
pub enum Quadrature {
    /// Gauss–Legendre in `r` (with the `r` Jacobian) times the trapezoid rule in `theta`.
    PolarGauss {
        n_r: usize,
        n_theta: usize,
        center: ComplexPoint,
        radius: f64,
    },
    /// Midpoint rule on a `resolution x resolution` grid over the bounding box;
    /// pixels straddling the boundary are split `refine_depth` times.
    PixelMidpoint { resolution: usize, refine_depth: usize },
}

/// Ring layout of a polar rule: node `i * n_theta + k` sits at
/// `center + radii[i] * exp(2 pi i k / n_theta)` with weight `ring_weights[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarRings {
    pub center: ComplexPoint,
    pub radii: Vec<f64>,
    pub ring_weights: Vec<f64>,
    pub n_theta: usize,
}

/// Quadrature nodes and positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub points: Vec<ComplexPoint>,
    pub weights: Vec<f64>,
    /// Side of a coarse pixel, for pixel rules.
    pub pixel_size: Option<f64>,
    pub rings: Option<PolarRings>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_k w_k f(z_k)`.
    pub fn integrate<F: Fn(ComplexPoint) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }
}

impl Quadrature {
    pub fn polar_for_disc(n_r: usize, n_theta: usize, dom: &Domain) -> Result<Self> {
        let (center, radius) = dom
            .as_disc()
            .ok_or_else(|| Error::InvalidDomain("polar rule needs a disc".into()))?;
        Ok(Quadrature::PolarGauss {
            n_r,
            n_theta,
            center,
            radius,
        })
    }

    /// Nodes of the rule on `dom`; every node lies inside `dom`.
    pub fn nodes(&self, dom: &Domain) -> Result<NodeSet> {
        match *self {
            Quadrature::PolarGauss {
                n_r,
                n_theta,
                center,
                radius,
            } => polar_nodes(dom, n_r, n_theta, center, radius),
            Quadrature::PixelMidpoint {
                resolution,
                refine_depth,
            } => pixel_nodes(dom, resolution, refine_depth),
        }
    }
}

fn polar_nodes(
    dom: &Domain,
    n_r: usize,
    n_theta: usize,
    center: ComplexPoint,
    radius: f64,
) -> Result<NodeSet> {
    let nr = NonZeroUsize::new(n_r).ok_or(Error::Empty("radial nodes"))?;
    if n_theta == 0 {
        return Err(Error::Empty("angular nodes"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("polar radius {radius}")));
    }
    let rule = GaussLegendre::new(nr);
    let dtheta = 2.0 * PI / n_theta as f64;
    let mut radii = Vec::with_capacity(n_r);
    let mut ring_weights = Vec::with_capacity(n_r);
    for &(x, w) in rule.as_node_weight_pairs() {
        let r = 0.5 * radius * (x + 1.0);
        radii.push(r);
        ring_weights.push(0.5 * radius * w * r * dtheta);
    }
    let mut points = Vec::with_capacity(n_r * n_theta);
    let mut weights = Vec::with_capacity(n_r * n_theta);
    for (&r, &w) in radii.iter().zip(&ring_weights) {
        for k in 0..n_theta {
            let z = center + Complex64::from_polar(r, dtheta * k as f64);
            if !dom.contains(z) {
                return Err(Error::InvalidArgument(format!(
                    "polar node {z} falls outside the domain"
                )));
            }
            points.push(z);
            weights.push(w);
        }
    }
    Ok(NodeSet {
        points,
        weights,
        pixel_size: None,
        rings: Some(PolarRings {
            center,
            radii,
            ring_weights,
            n_theta,
        }),
    })
}

fn pixel_nodes(dom: &Domain, resolution: usize, refine_depth: usize) -> Result<NodeSet> {
    if resolution == 0 {
        return Err(Error::Empty("pixel grid"));
    }
    if refine_depth > 6 {
        return Err(Error::InvalidArgument(format!(
            "refine_depth {refine_depth} exceeds 6"
        )));
    }
    let bbox = dom
        .bounding_box()
        .ok_or_else(|| Error::InvalidDomain("pixel rule needs a bounded domain".into()))?;
    let hx = bbox.width() / resolution as f64;
    let hy = bbox.height() / resolution as f64;
    let sub = 1usize << refine_depth;
    let (sx, sy) = (hx / sub as f64, hy / sub as f64);
    let rows: Vec<(Vec<ComplexPoint>, Vec<f64>)> = (0..resolution)
        .into_par_iter()
        .map(|j| {
            let mut pts = Vec::new();
            let mut wts = Vec::new();
            let mut inside = Vec::with_capacity(sub * sub);
            for i in 0..resolution {
                let x0 = bbox.x0 + hx * i as f64;
                let y0 = bbox.y0 + hy * j as f64;
                inside.clear();
                for b in 0..sub {
                    for a in 0..sub {
                        let z = cpt(x0 + sx * (a as f64 + 0.5), y0 + sy * (b as f64 + 0.5));
                        inside.push((z, dom.contains(z)));
                    }
                }
                let count = inside.iter().filter(|(_, c)| *c).count();
                let centre = cpt(x0 + 0.5 * hx, y0 + 0.5 * hy);
                if count == inside.len() && dom.contains(centre) {
                    pts.push(centre);
                    wts.push(hx * hy);
                } else {
                    for &(z, c) in &inside {
                        if c {
                            pts.push(z);
                            wts.push(sx * sy);
                        }
                    }
                }
            }
            (pts, wts)
        })
        .collect();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (p, w) in rows {
        points.extend(p);
        weights.extend(w);
    }
    if points.is_empty() {
        return Err(Error::Empty("pixel rule found no interior nodes"));
    }
    Ok(NodeSet {
        points,
        weights,
        pixel_size: Some(hx.max(hy)),
        rings: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cut;

    #[test]
    fn polar_integrates_monomials() {
        let q = Quadrature::PolarGauss {
            n_r: 64,
            n_theta: 128,
            center: cpt(0.0, 0.0),
            radius: 1.0,
        };
        let n = q.nodes(&Domain::UnitDisc).unwrap();
        for m in 0..20 {
            let v = n.integrate(|z| z.norm_sqr().powi(m));
            assert!((v - PI / (m as f64 + 1.0)).abs() < 1e-13);
        }
        assert!(n.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn pixel_area_of_disc_and_lens() {
        let q = Quadrature::PixelMidpoint {
            resolution: 256,
            refine_depth: 2,
        };
        let n = q.nodes(&Domain::UnitDisc).unwrap();
        assert!((n.total_weight() - PI).abs() < 2e-4);
        assert!(n.points.iter().all(|&z| Domain::UnitDisc.contains(z)));
        let lens = Domain::cut(
            Domain::UnitDisc,
            Cut::Disc {
                center: cpt(1.0, 0.0),
                radius: 0.8,
            },
        )
        .unwrap();
        let nl = q.nodes(&lens).unwrap();
        assert!(nl.total_weight() < n.total_weight());
        assert!(nl.total_weight() <= 4.0);
    }

    #[test]
    fn unbounded_domain_rejected() {
        let q = Quadrature::PixelMidpoint {
            resolution: 32,
            refine_depth: 0,
        };
        assert!(q.nodes(&Domain::HalfPlaneH).is_err());
    }
}
