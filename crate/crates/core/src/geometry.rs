//! Planar domains, affine and Möbius maps, the scaling maps that blow a
//! boundary neighbourhood up into the half-plane `Re z < 1/2`, and grid-based
//! convergence checks.
//!
//! All geometry values are immutable after construction.

use crate::error::{Error, Result};
use crate::jet::Jet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point of the complex plane.
pub type ComplexPoint = Complex64;

/// Shorthand constructor.
#[inline]
pub fn cpt(re: f64, im: f64) -> ComplexPoint {
    Complex64::new(re, im)
}

pub(crate) fn ensure_finite(z: ComplexPoint, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite, got {z}")))
    }
}

/// The defining function `|z|^2 - 1` of the unit disc. Its `d/dz` at a
/// boundary point `p` is `conj(p)`, which equals 1 at `p = 1`.
pub fn disc_defining_function(z: ComplexPoint) -> f64 {
    z.norm_sqr() - 1.0
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite())
            || x1 <= x0
            || y1 <= y0
        {
            return Err(Error::InvalidDomain(format!(
                "degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn square(center: ComplexPoint, half: f64) -> Self {
        Self {
            x0: center.re - half,
            x1: center.re + half,
            y0: center.im - half,
            y1: center.im + half,
        }
    }

    pub fn contains(&self, z: ComplexPoint) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    /// A `nx` by `ny` grid of points including the corners.
    pub fn grid(&self, nx: usize, ny: usize) -> Vec<ComplexPoint> {
        let step = |lo: f64, hi: f64, n: usize, i: usize| {
            if n <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut pts = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                pts.push(cpt(
                    step(self.x0, self.x1, nx, i),
                    step(self.y0, self.y1, ny, j),
                ));
            }
        }
        pts
    }
}

/// `z -> a z + b` with `a != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: ComplexPoint,
    pub b: ComplexPoint,
}

impl AffineMap {
    pub fn new(a: ComplexPoint, b: ComplexPoint) -> Result<Self> {
        ensure_finite(a, "affine coefficient a")?;
        ensure_finite(b, "affine coefficient b")?;
        if a.norm() == 0.0 {
            return Err(Error::InvalidMap("affine map with a = 0 is not invertible".into()));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    #[inline]
    pub fn apply(&self, z: ComplexPoint) -> ComplexPoint {
        self.a * z + self.b
    }

    #[inline]
    pub fn derivative(&self) -> ComplexPoint {
        self.a
    }

    pub fn inverse(&self) -> Self {
        let inv = self.a.inv();
        Self {
            a: inv,
            b: -self.b * inv,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> Self {
        Self {
            a: self.a * inner.a,
            b: self.a * inner.b + self.b,
        }
    }

    pub fn to_mobius(&self) -> MobiusMap {
        MobiusMap {
            a: self.a,
            b: self.b,
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }
}

/// `z -> (a z + b) / (c z + d)` with `ad - bc != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: ComplexPoint,
    pub b: ComplexPoint,
    pub c: ComplexPoint,
    pub d: ComplexPoint,
}

impl MobiusMap {
    pub fn new(a: ComplexPoint, b: ComplexPoint, c: ComplexPoint, d: ComplexPoint) -> Result<Self> {
        for (v, name) in [(a, "a"), (b, "b"), (c, "c"), (d, "d")] {
            ensure_finite(v, name)?;
        }
        let det = a * d - b * c;
        let scale = (a.norm() + b.norm()) * (c.norm() + d.norm());
        if det.norm() <= 1e-300 || det.norm() <= 1e-14 * scale {
            return Err(Error::InvalidMap(format!("Möbius determinant {det} vanishes")));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        AffineMap::identity().to_mobius()
    }

    /// The map `(2z + 1) / (-2z + 3)` of the half-plane `Re z < 1/2` onto the unit disc.
    pub fn half_plane_to_disc() -> Self {
        Self {
            a: cpt(2.0, 0.0),
            b: cpt(1.0, 0.0),
            c: cpt(-2.0, 0.0),
            d: cpt(3.0, 0.0),
        }
    }

    /// Disc automorphism `(z - a) / (1 - conj(a) z)` sending `a` to 0.
    pub fn disc_automorphism(a: ComplexPoint) -> Result<Self> {
        ensure_finite(a, "automorphism centre")?;
        if a.norm() >= 1.0 {
            return Err(Error::OutsideDomain(a));
        }
        Ok(Self {
            a: cpt(1.0, 0.0),
            b: -a,
            c: -a.conj(),
            d: cpt(1.0, 0.0),
        })
    }

    /// Rotation `z -> e^{i theta} z`.
    pub fn rotation(unit: ComplexPoint) -> Self {
        Self {
            a: unit / unit.norm(),
            b: cpt(0.0, 0.0),
            c: cpt(0.0, 0.0),
            d: cpt(1.0, 0.0),
        }
    }

    #[inline]
    pub fn determinant(&self) -> ComplexPoint {
        self.a * self.d - self.b * self.c
    }

    #[inline]
    pub fn apply(&self, z: ComplexPoint) -> ComplexPoint {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    #[inline]
    pub fn derivative(&self, z: ComplexPoint) -> ComplexPoint {
        let den = self.c * z + self.d;
        self.determinant() / (den * den)
    }

    /// The pole `-d / c`, if the map is not affine.
    pub fn pole(&self) -> Option<ComplexPoint> {
        if self.c.norm() == 0.0 {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ inner`, normalized so that the largest coefficient has modulus 1.
    pub fn compose(&self, inner: &MobiusMap) -> Self {
        let m = Self {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        };
        m.normalized()
    }

    fn normalized(&self) -> Self {
        let s = [self.a, self.b, self.c, self.d]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if s == 0.0 || !s.is_finite() {
            return *self;
        }
        Self {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }

    /// Taylor jets of the map and of its derivative at `z0`, truncated at `order`.
    pub fn taylor(&self, z0: ComplexPoint, order: usize) -> (Jet, Jet) {
        let u = self.c * z0 + self.d;
        let det = self.determinant();
        let ratio = -self.c / u;
        let mut value = vec![Complex64::new(0.0, 0.0); order + 1];
        let mut deriv = vec![Complex64::new(0.0, 0.0); order + 1];
        value[0] = self.apply(z0);
        // f(z0 + t) - f(z0) = det * t / (u (u + c t)) and f'(z0 + t) = det / (u + c t)^2.
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 0..=order {
            deriv[k] = det * (k as f64 + 1.0) * pow / (u * u);
            if k + 1 <= order {
                value[k + 1] = det * pow / (u * u);
            }
            pow *= ratio;
        }
        (Jet::from_coeffs(value), Jet::from_coeffs(deriv))
    }

    /// Image of the closed disc `|z - center| <= radius`, when the pole lies outside it.
    pub fn image_of_disc(&self, center: ComplexPoint, radius: f64) -> Option<(ComplexPoint, f64)> {
        if let Some(pole) = self.pole() {
            if (pole - center).norm() <= radius * (1.0 + 1e-12) {
                return None;
            }
        }
        let p1 = self.apply(center + radius);
        let p2 = self.apply(center + cpt(0.0, radius));
        let p3 = self.apply(center - radius);
        circumcircle(p1, p2, p3)
    }
}

fn circumcircle(p1: ComplexPoint, p2: ComplexPoint, p3: ComplexPoint) -> Option<(ComplexPoint, f64)> {
    let (ax, ay, bx, by, cx, cy) = (p1.re, p1.im, p2.re, p2.im, p3.re, p3.im);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if d.abs() < 1e-300 {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = cpt(ux, uy);
    Some((center, (p1 - center).norm()))
}

/// A biholomorphism used to transport kernels and weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Biholomorphism {
    Affine(AffineMap),
    Mobius(MobiusMap),
}

impl Biholomorphism {
    pub fn identity() -> Self {
        Self::Affine(AffineMap::identity())
    }

    pub fn apply(&self, z: ComplexPoint) -> ComplexPoint {
        match self {
            Self::Affine(m) => m.apply(z),
            Self::Mobius(m) => m.apply(z),
        }
    }

    pub fn derivative(&self, z: ComplexPoint) -> ComplexPoint {
        match self {
            Self::Affine(m) => m.derivative(),
            Self::Mobius(m) => m.derivative(z),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Self::Affine(m) => Self::Affine(m.inverse()),
            Self::Mobius(m) => Self::Mobius(m.inverse()),
        }
    }

    pub fn as_mobius(&self) -> MobiusMap {
        match self {
            Self::Affine(m) => m.to_mobius(),
            Self::Mobius(m) => *m,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Biholomorphism) -> Self {
        match (self, inner) {
            (Self::Affine(a), Self::Affine(b)) => Self::Affine(a.compose(b)),
            _ => Self::Mobius(self.as_mobius().compose(&inner.as_mobius())),
        }
    }

    pub fn taylor(&self, z0: ComplexPoint, order: usize) -> (Jet, Jet) {
        match self {
            Self::Affine(m) => {
                let mut v = vec![Complex64::new(0.0, 0.0); order + 1];
                let mut d = vec![Complex64::new(0.0, 0.0); order + 1];
                v[0] = m.apply(z0);
                if order >= 1 {
                    v[1] = m.a;
                }
                d[0] = m.a;
                (Jet::from_coeffs(v), Jet::from_coeffs(d))
            }
            Self::Mobius(m) => m.taylor(z0, order),
        }
    }
}

/// Raster description of a region: a `resolution x resolution` boolean grid
/// over `bbox`, row-major with row 0 at `y0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelRegion {
    pub bbox: Rect,
    pub resolution: usize,
    pub indicator: Vec<bool>,
}

impl PixelRegion {
    pub fn new(bbox: Rect, resolution: usize, indicator: Vec<bool>) -> Result<Self> {
        if resolution < 16 {
            return Err(Error::InvalidDomain(format!(
                "pixel resolution {resolution} is below the minimum of 16"
            )));
        }
        if indicator.len() != resolution * resolution {
            return Err(Error::InvalidDomain(format!(
                "indicator has {} cells, expected {}",
                indicator.len(),
                resolution * resolution
            )));
        }
        if !indicator.iter().any(|&b| b) {
            return Err(Error::InvalidDomain("pixel indicator is empty".into()));
        }
        Ok(Self {
            bbox,
            resolution,
            indicator,
        })
    }

    /// Rasterize `domain` over `bbox` by classifying pixel centres.
    pub fn rasterize(domain: &Domain, bbox: Rect, resolution: usize) -> Result<Self> {
        let mut indicator = vec![false; resolution * resolution];
        let (hx, hy) = (bbox.width() / resolution as f64, bbox.height() / resolution as f64);
        for j in 0..resolution {
            for i in 0..resolution {
                let z = cpt(
                    bbox.x0 + (i as f64 + 0.5) * hx,
                    bbox.y0 + (j as f64 + 0.5) * hy,
                );
                indicator[j * resolution + i] = domain.contains(z);
            }
        }
        Self::new(bbox, resolution, indicator)
    }

    /// Smallest disc about the centre of the set cells' bounding box that covers every set cell.
    pub fn occupied_disc(&self) -> (ComplexPoint, f64) {
        let n = self.resolution;
        let (mut i0, mut i1, mut j0, mut j1) = (n, 0, n, 0);
        for j in 0..n {
            for i in 0..n {
                if self.indicator[j * n + i] {
                    i0 = i0.min(i);
                    i1 = i1.max(i + 1);
                    j0 = j0.min(j);
                    j1 = j1.max(j + 1);
                }
            }
        }
        let (hx, hy) = self.pixel_size();
        let corner = |i: usize, j: usize| cpt(self.bbox.x0 + i as f64 * hx, self.bbox.y0 + j as f64 * hy);
        let c = (corner(i0, j0) + corner(i1, j1)) * 0.5;
        let mut r: f64 = 0.0;
        for j in j0..j1 {
            for i in i0..i1 {
                if self.indicator[j * n + i] {
                    for (a, b) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                        r = r.max((corner(a, b) - c).norm());
                    }
                }
            }
        }
        (c, r)
    }

    pub fn pixel_size(&self) -> (f64, f64) {
        (
            self.bbox.width() / self.resolution as f64,
            self.bbox.height() / self.resolution as f64,
        )
    }

    fn cell_of(&self, z: ComplexPoint) -> Option<(usize, usize)> {
        if !self.bbox.contains(z) {
            return None;
        }
        let (hx, hy) = self.pixel_size();
        let i = (((z.re - self.bbox.x0) / hx) as usize).min(self.resolution - 1);
        let j = (((z.im - self.bbox.y0) / hy) as usize).min(self.resolution - 1);
        Some((i, j))
    }

    pub fn is_set(&self, i: isize, j: isize) -> bool {
        let n = self.resolution as isize;
        i >= 0 && j >= 0 && i < n && j < n && self.indicator[(j * n + i) as usize]
    }

    pub fn contains(&self, z: ComplexPoint) -> bool {
        self.cell_of(z)
            .map(|(i, j)| self.indicator[j * self.resolution + i])
            .unwrap_or(false)
    }

    pub fn cell_center(&self, i: usize, j: usize) -> ComplexPoint {
        let (hx, hy) = self.pixel_size();
        cpt(
            self.bbox.x0 + (i as f64 + 0.5) * hx,
            self.bbox.y0 + (j as f64 + 0.5) * hy,
        )
    }

    /// Centres of set pixels with at least one unset 4-neighbour.
    pub fn boundary_centers(&self) -> Vec<ComplexPoint> {
        let n = self.resolution as isize;
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if !self.is_set(i, j) {
                    continue;
                }
                let mixed = [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|&(di, dj)| !self.is_set(i + di, j + dj));
                if mixed {
                    out.push(self.cell_center(i as usize, j as usize));
                }
            }
        }
        out
    }

    /// Indicator-gradient estimate of the inner normal at `p` from a 5-pixel stencil.
    pub fn inner_normal(&self, p: ComplexPoint) -> Result<ComplexPoint> {
        let (hx, hy) = self.pixel_size();
        let i0 = ((p.re - self.bbox.x0) / hx).floor() as isize;
        let j0 = ((p.im - self.bbox.y0) / hy).floor() as isize;
        let mut g = cpt(0.0, 0.0);
        for dj in -2isize..=2 {
            for di in -2isize..=2 {
                if self.is_set(i0 + di, j0 + dj) {
                    g += cpt(di as f64, dj as f64);
                }
            }
        }
        if g.norm() == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "no indicator gradient near {p}; is it a boundary point?"
            )));
        }
        Ok(g / g.norm())
    }
}

/// The cutting set of a [`Domain::CutDomain`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cut {
    Disc { center: ComplexPoint, radius: f64 },
    HalfPlaneH,
}

impl Cut {
    pub fn contains(&self, z: ComplexPoint) -> bool {
        match self {
            Cut::Disc { center, radius } => (z - center).norm() < *radius,
            Cut::HalfPlaneH => z.re < 0.5,
        }
    }

    fn distance(&self, z: ComplexPoint) -> f64 {
        match self {
            Cut::Disc { center, radius } => radius - (z - center).norm(),
            Cut::HalfPlaneH => 0.5 - z.re,
        }
    }

    fn as_domain(&self) -> Domain {
        match *self {
            Cut::Disc { center, radius } => Domain::Disc { center, radius },
            Cut::HalfPlaneH => Domain::HalfPlaneH,
        }
    }
}

/// A planar region.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    UnitDisc,
    Disc { center: ComplexPoint, radius: f64 },
    /// `{z : -1 + 2 Re z < 0}`.
    HalfPlaneH,
    /// Image of `base` under `z -> map.a z + map.b`.
    AffineImage { base: Box<Domain>, map: AffineMap },
    PixelRegion(PixelRegion),
    /// `base ∩ cut`.
    CutDomain { base: Box<Domain>, cut: Cut },
    /// Image of `base` under a Möbius map whose pole lies outside `base`.
    MobiusImage { base: Box<Domain>, map: MobiusMap },
}

impl Domain {
    pub fn disc(center: ComplexPoint, radius: f64) -> Result<Self> {
        ensure_finite(center, "disc centre")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("disc radius must be positive, got {radius}")));
        }
        Ok(Domain::Disc { center, radius })
    }

    pub fn affine_image(base: Domain, map: AffineMap) -> Self {
        Domain::AffineImage {
            base: Box::new(base),
            map,
        }
    }

    pub fn cut(base: Domain, cut: Cut) -> Result<Self> {
        if let Cut::Disc { radius, center } = cut {
            ensure_finite(center, "cut centre")?;
            if !(radius > 0.0) {
                return Err(Error::InvalidDomain("cut disc radius must be positive".into()));
            }
        }
        Ok(Domain::CutDomain {
            base: Box::new(base),
            cut,
        })
    }

    pub fn mobius_image(base: Domain, map: MobiusMap) -> Result<Self> {
        if let Some(pole) = map.pole() {
            if base.contains(pole) {
                return Err(Error::InvalidMap(format!("pole {pole} lies inside the base domain")));
            }
        }
        Ok(Domain::MobiusImage {
            base: Box::new(base),
            map,
        })
    }

    /// Membership test; total over all points (non-finite points are outside).
    pub fn contains(&self, z: ComplexPoint) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        match self {
            Domain::UnitDisc => z.norm_sqr() < 1.0,
            Domain::Disc { center, radius } => (z - center).norm() < *radius,
            Domain::HalfPlaneH => z.re < 0.5,
            Domain::AffineImage { base, map } => base.contains(map.inverse().apply(z)),
            Domain::PixelRegion(px) => px.contains(z),
            Domain::CutDomain { base, cut } => cut.contains(z) && base.contains(z),
            Domain::MobiusImage { base, map } => base.contains(map.inverse().apply(z)),
        }
    }

    /// `(center, radius)` when the domain is exactly a disc.
    pub fn as_disc(&self) -> Option<(ComplexPoint, f64)> {
        match self {
            Domain::UnitDisc => Some((cpt(0.0, 0.0), 1.0)),
            Domain::Disc { center, radius } => Some((*center, *radius)),
            Domain::AffineImage { base, map } => base
                .as_disc()
                .map(|(c, r)| (map.apply(c), r * map.a.norm())),
            Domain::MobiusImage { base, map } => {
                let (c, r) = base.as_disc()?;
                map.image_of_disc(c, r)
            }
            _ => None,
        }
    }

    /// A disc containing the domain.
    pub fn enclosing_disc(&self) -> Option<(ComplexPoint, f64)> {
        if let Some(d) = self.as_disc() {
            return Some(d);
        }
        match self {
            Domain::CutDomain { base, cut } => base.enclosing_disc().or(match cut {
                Cut::Disc { center, radius } => Some((*center, *radius)),
                Cut::HalfPlaneH => None,
            }),
            Domain::PixelRegion(px) => Some(px.occupied_disc()),
            Domain::AffineImage { base, map } => base
                .enclosing_disc()
                .map(|(c, r)| (map.apply(c), r * map.a.norm())),
            Domain::MobiusImage { base, map } => {
                let (c, r) = base.enclosing_disc()?;
                map.image_of_disc(c, r)
            }
            _ => None,
        }
    }

    /// Bounding rectangle, `None` for unbounded domains.
    pub fn bounding_box(&self) -> Option<Rect> {
        match self {
            Domain::PixelRegion(px) => Some(px.bbox),
            Domain::CutDomain { base, cut } => {
                let a = base.bounding_box();
                let b = match cut {
                    Cut::Disc { center, radius } => Some(Rect::square(*center, *radius)),
                    Cut::HalfPlaneH => None,
                };
                match (a, b) {
                    (Some(a), Some(b)) => Some(Rect {
                        x0: a.x0.max(b.x0),
                        x1: a.x1.min(b.x1),
                        y0: a.y0.max(b.y0),
                        y1: a.y1.min(b.y1),
                    }),
                    (Some(a), None) => Some(a),
                    (None, b) => b,
                }
            }
            _ => self.enclosing_disc().map(|(c, r)| Rect::square(c, r)),
        }
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, z: ComplexPoint) -> Result<f64> {
        if !self.contains(z) {
            return Err(Error::OutsideDomain(z));
        }
        Ok(self.distance_unchecked(z))
    }

    fn distance_unchecked(&self, z: ComplexPoint) -> f64 {
        match self {
            Domain::UnitDisc => 1.0 - z.norm(),
            Domain::Disc { center, radius } => radius - (z - center).norm(),
            Domain::HalfPlaneH => 0.5 - z.re,
            Domain::AffineImage { base, map } => {
                map.a.norm() * base.distance_unchecked(map.inverse().apply(z))
            }
            // dist(z, complement of A ∩ B) = min(dist(z, A^c), dist(z, B^c)).
            Domain::CutDomain { base, cut } => base.distance_unchecked(z).min(cut.distance(z)),
            Domain::PixelRegion(px) => px
                .boundary_centers()
                .iter()
                .map(|b| (b - z).norm())
                .fold(f64::INFINITY, f64::min),
            Domain::MobiusImage { .. } => match self.as_disc() {
                Some((c, r)) => r - (z - c).norm(),
                None => self.ray_sampled_distance(z, 360),
            },
        }
    }

    /// Minimum over `directions` rays of the first exit distance, located by bisection.
    fn ray_sampled_distance(&self, z: ComplexPoint, directions: usize) -> f64 {
        let reach = self
            .bounding_box()
            .map(|b| 2.0 * b.width().hypot(b.height()))
            .unwrap_or(1e6);
        let mut best = f64::INFINITY;
        for k in 0..directions {
            let dir = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / directions as f64);
            let step = reach / 1024.0;
            let mut lo = 0.0;
            let mut hi = None;
            let mut t = step;
            while t <= reach && t < best {
                if !self.contains(z + dir * t) {
                    hi = Some(t);
                    break;
                }
                lo = t;
                t += step;
            }
            let Some(mut hi) = hi else { continue };
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if self.contains(z + dir * mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.min(0.5 * (lo + hi));
        }
        best
    }

    /// Unit inner normal at a boundary point `p`.
    pub fn inner_normal(&self, p: ComplexPoint) -> Result<ComplexPoint> {
        match self {
            Domain::UnitDisc | Domain::Disc { .. } => {
                let (c, _) = self.as_disc().expect("disc");
                let v = c - p;
                if v.norm() == 0.0 {
                    return Err(Error::InvalidArgument("normal at the disc centre".into()));
                }
                Ok(v / v.norm())
            }
            Domain::HalfPlaneH => Ok(cpt(-1.0, 0.0)),
            Domain::AffineImage { base, map } => {
                let n = base.inner_normal(map.inverse().apply(p))?;
                Ok(n * map.a / map.a.norm())
            }
            Domain::CutDomain { base, cut } => {
                let on_cut = cut.distance(p).abs() < 1e-9;
                if on_cut && !(base.boundary_residual(p) < 1e-9) {
                    cut.as_domain().inner_normal(p)
                } else {
                    base.inner_normal(p)
                }
            }
            Domain::PixelRegion(px) => px.inner_normal(p),
            Domain::MobiusImage { base, map } => {
                let inv = map.inverse();
                let q = inv.apply(p);
                let n = base.inner_normal(q)?;
                let fp = map.derivative(q);
                Ok(n * fp / fp.norm())
            }
        }
    }

    /// Distance of `p` from the boundary curve (for closed-form-boundary domains).
    pub(crate) fn boundary_residual(&self, p: ComplexPoint) -> f64 {
        match self {
            Domain::UnitDisc => (p.norm() - 1.0).abs(),
            Domain::Disc { center, radius } => ((p - center).norm() - radius).abs(),
            Domain::HalfPlaneH => (p.re - 0.5).abs(),
            Domain::AffineImage { base, map } => {
                map.a.norm() * base.boundary_residual(map.inverse().apply(p))
            }
            Domain::MobiusImage { base, map } => {
                let inv = map.inverse();
                base.boundary_residual(inv.apply(p)) / inv.derivative(p).norm()
            }
            _ => f64::INFINITY,
        }
    }

    /// `n` equispaced boundary points of a disc-shaped domain.
    pub fn disc_boundary_samples(&self, n: usize) -> Option<Vec<ComplexPoint>> {
        let (c, r) = self.as_disc()?;
        Some(
            (0..n)
                .map(|k| c + Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.25) / n as f64))
                .collect(),
        )
    }
}

/// The scaling map `z -> (z - p_j) / (-psi(p_j))`.
pub fn scaling_map(p_j: ComplexPoint, psi_value: f64) -> Result<AffineMap> {
    ensure_finite(p_j, "p_j")?;
    if !(psi_value < 0.0) {
        return Err(Error::NotInterior(p_j, psi_value));
    }
    let s = -psi_value;
    AffineMap::new(cpt(1.0 / s, 0.0), -p_j / s)
}

/// The normalized map `phi = sigma ∘ f` of the half-plane onto the unit disc,
/// with `phi(0) = 0` and `phi'(0) = 1`.
pub fn half_plane_to_disc_normalized() -> MobiusMap {
    let f = MobiusMap::half_plane_to_disc();
    let sigma = MobiusMap::disc_automorphism(cpt(1.0 / 3.0, 0.0)).expect("1/3 is interior");
    sigma.compose(&f)
}

/// The Möbius map `F` of a disc containing 0 onto the half-plane `Re z < 1/2`
/// with `F(0) = 0` and `F'(0) > 0`.
pub fn riemann_map_to_h(dj: &Domain) -> Result<MobiusMap> {
    let (center, radius) = dj
        .as_disc()
        .ok_or_else(|| Error::InvalidDomain("Riemann map requires a disc".into()))?;
    let origin = cpt(0.0, 0.0);
    if !dj.contains(origin) {
        return Err(Error::OutsideDomain(origin));
    }
    let to_unit = AffineMap::new(cpt(1.0 / radius, 0.0), -center / radius)?.to_mobius();
    let a0 = to_unit.apply(origin);
    let sigma = MobiusMap::disc_automorphism(a0)?;
    let into_disc = sigma.compose(&to_unit);
    // phi^{-1} has derivative 1 at 0, so the rotation must cancel the phase of into_disc'(0).
    let s = into_disc.derivative(origin);
    let rot = MobiusMap::rotation(s.conj() / s.norm());
    let phi_inv = half_plane_to_disc_normalized().inverse();
    Ok(phi_inv.compose(&rot.compose(&into_disc)))
}

/// Fraction of grid points whose classification differs between each domain and `limit`.
pub fn hausdorff_convergence_check(
    seq: &[Domain],
    limit: &Domain,
    grid: &[ComplexPoint],
) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::Empty("hausdorff grid"));
    }
    for z in grid {
        ensure_finite(*z, "grid point")?;
    }
    let truth: Vec<bool> = grid.iter().map(|&z| limit.contains(z)).collect();
    Ok(seq
        .iter()
        .map(|d| {
            let mismatches = grid
                .iter()
                .zip(&truth)
                .filter(|(&z, &t)| d.contains(z) != t)
                .count();
            mismatches as f64 / grid.len() as f64
        })
        .collect())
}
