//! Closed JSON grammar for domains and weights.

use bergman_core::{cpt, AffineMap, ComplexPoint, Cut, Domain, PixelRegion, Rect, Weight};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A point written as `[re, im]`.
pub type Point = [f64; 2];

pub(crate) fn point(p: Point) -> ComplexPoint {
    cpt(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    UnitDisc,
    Disc {
        center: Point,
        radius: f64,
    },
    HalfPlane,
    /// `base ∩ Disc{center, radius}`.
    Lens {
        base: Box<DomainSpec>,
        center: Point,
        radius: f64,
    },
    AffineImage {
        base: Box<DomainSpec>,
        a: Point,
        b: Point,
    },
    /// `source` rasterized over `bbox = [x0, x1, y0, y1]`.
    Pixel {
        source: Box<DomainSpec>,
        bbox: [f64; 4],
        resolution: usize,
    },
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain, CliError> {
        Ok(match self {
            DomainSpec::UnitDisc => Domain::UnitDisc,
            DomainSpec::Disc { center, radius } => Domain::disc(point(*center), *radius)?,
            DomainSpec::HalfPlane => Domain::HalfPlaneH,
            DomainSpec::Lens {
                base,
                center,
                radius,
            } => Domain::cut(
                base.build()?,
                Cut::Disc {
                    center: point(*center),
                    radius: *radius,
                },
            )?,
            DomainSpec::AffineImage { base, a, b } => {
                Domain::affine_image(base.build()?, AffineMap::new(point(*a), point(*b))?)
            }
            DomainSpec::Pixel {
                source,
                bbox,
                resolution,
            } => {
                let r = Rect::new(bbox[0], bbox[1], bbox[2], bbox[3])?;
                Domain::PixelRegion(PixelRegion::rasterize(&source.build()?, r, *resolution)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub alpha: f64,
    pub weight: WeightSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        c: f64,
    },
    /// `u Re z + v Im z + w0`.
    RealAffine {
        u: f64,
        v: f64,
        w0: f64,
    },
    /// `K_base(z, z)^{-d}`.
    DPower {
        d: usize,
        #[serde(default = "unit_disc")]
        base: DomainSpec,
    },
    Sum {
        terms: Vec<Term>,
    },
    Product {
        factors: Vec<WeightSpec>,
    },
}

fn unit_disc() -> DomainSpec {
    DomainSpec::UnitDisc
}

impl WeightSpec {
    pub fn build(&self) -> Result<Weight, CliError> {
        Ok(match self {
            WeightSpec::Constant { c } => Weight::constant(*c)?,
            WeightSpec::RealAffine { u, v, w0 } => Weight::RealAffine {
                u: *u,
                v: *v,
                w0: *w0,
            },
            WeightSpec::DPower { d, base } => Weight::DPower {
                d: *d,
                base: base.build()?,
            },
            WeightSpec::Sum { terms } => Weight::sum(
                terms
                    .iter()
                    .map(|t| Ok((t.alpha, t.weight.build()?)))
                    .collect::<Result<Vec<_>, CliError>>()?,
            )?,
            WeightSpec::Product { factors } => Weight::product(
                factors
                    .iter()
                    .map(WeightSpec::build)
                    .collect::<Result<Vec<_>, CliError>>()?,
            )?,
        })
    }
}
