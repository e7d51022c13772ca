//! Boundary-sequence experiments: weighted/unweighted kernel ratios near a
//! boundary point, weight combinations, d-power asymptotics, the scaling
//! principle, Riemann-map and Ramadanov convergence, and localization.

use crate::error::{Error, Result};
use crate::geometry::{
    cpt, riemann_map_to_h, scaling_map, Biholomorphism, ComplexPoint, Cut, Domain, MobiusMap,
};
use crate::kernels_closed::{transported_derivative, ClosedKernel, Kernel};
use crate::kernels_numeric::{fit_kernel, recentred_kernel, FittedKernel, ImageRule, NumericConfig};
use crate::weights::{corollary_lambda, least_squares_line, Weight};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Default boundary distances.
pub const DEFAULT_DELTAS: [f64; 4] = [0.2, 0.1, 0.05, 0.02];

/// Number of trailing points used for the limit fit.
pub const FIT_POINTS: usize = 4;

/// Points `p + delta * nu_p` approaching `p` along the inner normal.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySequence {
    pub domain: Domain,
    pub p: ComplexPoint,
    pub deltas: Vec<f64>,
    pub points: Vec<ComplexPoint>,
}

impl BoundarySequence {
    pub fn new(domain: &Domain, p: ComplexPoint, deltas: &[f64]) -> Result<Self> {
        validate_deltas(deltas)?;
        let normal = domain.inner_normal(p)?;
        let points: Vec<ComplexPoint> = deltas.iter().map(|&d| p + normal * d).collect();
        let exact = domain.as_disc().is_some() || matches!(domain, Domain::HalfPlaneH);
        for (&z, &d) in points.iter().zip(deltas) {
            let dist = domain.distance_to_boundary(z)?;
            if exact && (dist - d).abs() > 1e-10 * d.max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "{p} is not a boundary point: distance {dist} from {z}, expected {d}"
                )));
            }
        }
        Ok(Self {
            domain: domain.clone(),
            p,
            deltas: deltas.to_vec(),
            points,
        })
    }
}

/// Checks that `deltas` is nonempty, positive and strictly decreasing.
pub fn validate_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(Error::Empty("deltas"));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidArgument("deltas must be positive".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("deltas must be strictly decreasing".into()));
    }
    Ok(())
}

/// One boundary-sequence experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub deltas: Vec<f64>,
    pub numerators: Vec<f64>,
    pub denominators: Vec<f64>,
    pub ratios: Vec<f64>,
    pub target: f64,
    pub final_relative_error: f64,
    /// `|ratio - target|` never increases along the sequence.
    pub trend_monotone: bool,
    /// Intercept at `delta = 0` of the least-squares line through the last four points.
    pub fitted_limit: f64,
    /// Ratios under the alternative constant `(prod mu_i(p))^{n-1}` (product experiment only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statement_ratios: Option<Vec<f64>>,
    /// Discarded Gram modes per point (numerator side).
    pub discarded_modes: Vec<usize>,
}

impl RatioReport {
    pub fn from_parts(
        deltas: Vec<f64>,
        numerators: Vec<f64>,
        denominators: Vec<f64>,
        target: f64,
    ) -> Result<Self> {
        let n = deltas.len();
        if n == 0 {
            return Err(Error::Empty("report rows"));
        }
        if numerators.len() != n || denominators.len() != n {
            return Err(Error::InvalidArgument("report columns differ in length".into()));
        }
        let ratios: Vec<f64> = numerators.iter().zip(&denominators).map(|(a, b)| a / b).collect();
        let slack = 1e-12 * target.abs().max(1.0);
        let trend_monotone = ratios
            .windows(2)
            .all(|w| (w[1] - target).abs() <= (w[0] - target).abs() + slack);
        let tail = n.saturating_sub(FIT_POINTS);
        let pts: Vec<(f64, f64)> = deltas[tail..]
            .iter()
            .copied()
            .zip(ratios[tail..].iter().copied())
            .collect();
        let fitted_limit = if pts.len() >= 2 {
            least_squares_line(&pts).1
        } else {
            pts[0].1
        };
        let last = ratios[n - 1];
        Ok(Self {
            final_relative_error: (last - target).abs() / target.abs(),
            deltas,
            numerators,
            denominators,
            ratios,
            target,
            trend_monotone,
            fitted_limit,
            statement_ratios: None,
            discarded_modes: vec![0; n],
        })
    }
}

/// Diagonal derivative: real for `alpha == beta`, modulus otherwise.
fn diag<K: Kernel + ?Sized>(k: &K, alpha: usize, beta: usize, z: ComplexPoint) -> Result<f64> {
    let v = k.eval_derivative(alpha, beta, z, z)?;
    Ok(if alpha == beta { v.re } else { v.norm() })
}

fn boundary_value(mu: &Weight, p: ComplexPoint) -> Result<f64> {
    match mu.boundary_value_at(p) {
        Some(v) if v > 0.0 => Ok(v),
        Some(v) => Err(Error::InadmissibleWeight(format!("boundary value {v} at {p}"))),
        None => Err(Error::InadmissibleWeight(format!("no boundary value at {p}"))),
    }
}

/// Unweighted reference derivative, closed form when available.
fn unweighted_derivative(
    dom: &Domain,
    alpha: usize,
    beta: usize,
    z: ComplexPoint,
    cfg: &NumericConfig,
) -> Result<f64> {
    match ClosedKernel::for_domain(dom) {
        Ok(k) => diag(&k, alpha, beta, z),
        Err(_) => diag(&fit_kernel(dom, &Weight::Constant { c: 1.0 }, z, cfg)?, alpha, beta, z),
    }
}

type Row = (f64, f64, usize);

fn collect_rows<F>(seq: &BoundarySequence, f: F) -> Result<Vec<Row>>
where
    F: Fn(ComplexPoint) -> Result<Row> + Sync,
{
    seq.points.par_iter().map(|&z| f(z)).collect()
}

fn report_from_rows(seq: &BoundarySequence, rows: Vec<Row>, target: f64) -> Result<RatioReport> {
    let mut r = RatioReport::from_parts(
        seq.deltas.clone(),
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
        target,
    )?;
    r.discarded_modes = rows.iter().map(|r| r.2).collect();
    Ok(r)
}

/// `K^{alpha,beta}_{D,mu}(z_j) / K^{alpha,beta}_D(z_j)` against `1 / mu(p)`.
pub fn thm11_ratio(
    dom: &Domain,
    mu: &Weight,
    p: ComplexPoint,
    deltas: &[f64],
    alpha: usize,
    beta: usize,
    cfg: &NumericConfig,
) -> Result<RatioReport> {
    let mu_p = boundary_value(mu, p)?;
    let seq = BoundarySequence::new(dom, p, deltas)?;
    let rows = collect_rows(&seq, |z| {
        let k = fit_kernel(dom, mu, z, cfg)?;
        Ok((
            diag(&k, alpha, beta, z)?,
            unweighted_derivative(dom, alpha, beta, z, cfg)?,
            k.discarded_modes(),
        ))
    })?;
    report_from_rows(&seq, rows, 1.0 / mu_p)
}

/// Products `delta^{alpha+beta+2} K^{alpha,beta}_{D,mu}(z_j)` checked against `bounds`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaPowerReport {
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub within_bounds: bool,
}

pub fn delta_power_bound(
    dom: &Domain,
    mu: &Weight,
    p: ComplexPoint,
    deltas: &[f64],
    alpha: usize,
    beta: usize,
    bounds: (f64, f64),
    cfg: &NumericConfig,
) -> Result<DeltaPowerReport> {
    let (lower, upper) = bounds;
    if !(lower > 0.0 && upper >= lower) {
        return Err(Error::InvalidArgument(format!(
            "bounds [{lower}, {upper}] must be positive and ordered"
        )));
    }
    let seq = BoundarySequence::new(dom, p, deltas)?;
    let e = (alpha + beta + 2) as i32;
    let values = seq
        .points
        .par_iter()
        .zip(&seq.deltas)
        .map(|(&z, &d)| {
            let k = fit_kernel(dom, mu, z, cfg)?;
            Ok(d.powi(e) * diag(&k, alpha, beta, z)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max_value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DeltaPowerReport {
        deltas: seq.deltas,
        within_bounds: min_value >= lower && max_value <= upper,
        values,
        lower,
        upper,
        min_value,
        max_value,
    })
}

/// `K_{D, sum alpha_i mu_i} / (lambda sum alpha_i K_{D,mu_i})` against 1.
pub fn cor12_sum(
    dom: &Domain,
    terms: &[(f64, Weight)],
    p: ComplexPoint,
    deltas: &[f64],
    cfg: &NumericConfig,
) -> Result<RatioReport> {
    let alphas: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let mus = terms
        .iter()
        .map(|t| boundary_value(&t.1, p))
        .collect::<Result<Vec<f64>>>()?;
    let lambda = corollary_lambda(&alphas, &mus)?;
    let total = Weight::sum(terms.to_vec())?;
    let seq = BoundarySequence::new(dom, p, deltas)?;
    let rows = collect_rows(&seq, |z| {
        let k = fit_kernel(dom, &total, z, cfg)?;
        let mut den = 0.0;
        for (a, w) in terms {
            den += a * diag(&fit_kernel(dom, w, z, cfg)?, 0, 0, z)?;
        }
        Ok((diag(&k, 0, 0, z)?, lambda * den, k.discarded_modes()))
    })?;
    report_from_rows(&seq, rows, 1.0)
}

/// `K_{D, prod mu_i}^n / ((prod mu_i(p))^{-(n-1)} prod K_{D,mu_i})` against 1.
///
/// `statement_ratios` uses the constant `(prod mu_i(p))^{n-1}` instead.
pub fn cor12_product(
    dom: &Domain,
    factors: &[Weight],
    p: ComplexPoint,
    deltas: &[f64],
    cfg: &NumericConfig,
) -> Result<RatioReport> {
    if factors.is_empty() {
        return Err(Error::Empty("product factors"));
    }
    let n = factors.len() as i32;
    let prod_p: f64 = factors
        .iter()
        .map(|w| boundary_value(w, p))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .product();
    let total = Weight::product(factors.to_vec())?;
    let seq = BoundarySequence::new(dom, p, deltas)?;
    let rows = collect_rows(&seq, |z| {
        let k = fit_kernel(dom, &total, z, cfg)?;
        let mut den = prod_p.powi(-(n - 1));
        for w in factors {
            den *= diag(&fit_kernel(dom, w, z, cfg)?, 0, 0, z)?;
        }
        Ok((diag(&k, 0, 0, z)?.powi(n), den, k.discarded_modes()))
    })?;
    let mut r = report_from_rows(&seq, rows, 1.0)?;
    let factor = prod_p.powi(-2 * (n - 1));
    r.statement_ratios = Some(r.ratios.iter().map(|x| x * factor).collect());
    Ok(r)
}

/// Which side computes the weighted kernel in [`dpower_asymptotic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelSource {
    Closed,
    Numeric,
}

/// `K_{D,d}(z_j) / ((2d + 1) K_D(z_j)^{d+1})` against 1.
pub fn dpower_asymptotic(
    dom: &Domain,
    d: usize,
    p: ComplexPoint,
    deltas: &[f64],
    source: KernelSource,
    cfg: &NumericConfig,
) -> Result<RatioReport> {
    let seq = BoundarySequence::new(dom, p, deltas)?;
    let rows = collect_rows(&seq, |z| {
        let kd = unweighted_derivative(dom, 0, 0, z, cfg)?;
        let den = (2 * d + 1) as f64 * kd.powi(d as i32 + 1);
        let (num, dropped) = match source {
            KernelSource::Closed => (diag(&ClosedKernel::dpower_for_domain(dom, d)?, 0, 0, z)?, 0),
            KernelSource::Numeric => {
                let w = Weight::DPower {
                    d,
                    base: dom.clone(),
                };
                let k = fit_kernel(dom, &w, z, cfg)?;
                (diag(&k, 0, 0, z)?, k.discarded_modes())
            }
        };
        Ok((num, den, dropped))
    })?;
    report_from_rows(&seq, rows, 1.0)
}

/// One row per `p_j` of the scaling experiment on the unit disc at `p = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub p_j: f64,
    pub minus_psi: f64,
    /// Numeric `K_{D_j, mu_j}(0, 0)`.
    pub scaled_diagonal: f64,
    /// Numeric `K_{D,mu}(p_j, p_j) psi(p_j)^2`.
    pub host_diagonal_scaled: f64,
    /// Relative gap between the two numeric sides of the transformation identity.
    pub identity_residual: f64,
    /// Worst relative residual of the identity with closed-form unweighted kernels, orders up to 2.
    pub closed_identity_residual: f64,
    /// Closed-form `K_{D_j}(0, 0)`.
    pub unweighted_scaled_diagonal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// `1 / (pi mu(1))`.
    pub target: f64,
    pub final_relative_error: f64,
}

/// Scaled disc `T_j(D)` for `p_j` on the positive real axis, with `psi = |z|^2 - 1`.
pub fn scaled_disc(p_j: f64) -> Result<(Domain, crate::geometry::AffineMap)> {
    if !(p_j > 0.0 && p_j < 1.0) {
        return Err(Error::InvalidArgument(format!("p_j = {p_j} must lie in (0, 1)")));
    }
    let eps = 1.0 - p_j * p_j;
    let t = scaling_map(cpt(p_j, 0.0), -eps)?;
    Ok((Domain::disc(t.apply(cpt(0.0, 0.0)), 1.0 / eps)?, t))
}

pub fn scaling_experiment(p_js: &[f64], mu: &Weight, cfg: &NumericConfig) -> Result<ScalingReport> {
    if p_js.is_empty() {
        return Err(Error::Empty("p_j sequence"));
    }
    let one = cpt(1.0, 0.0);
    let mu_p = boundary_value(mu, one)?;
    let o = cpt(0.0, 0.0);
    let rows = p_js
        .par_iter()
        .map(|&pj| {
            let (dj, t) = scaled_disc(pj)?;
            let eps = 1.0 - pj * pj;
            let z = cpt(pj, 0.0);
            let muj = Weight::pullback(Biholomorphism::Affine(t), mu.clone());
            let scaled = diag(&fit_kernel(&dj, &muj, o, cfg)?, 0, 0, o)?;
            let host = diag(&fit_kernel(&Domain::UnitDisc, mu, z, cfg)?, 0, 0, z)? * eps * eps;
            let kd = ClosedKernel::DiscUnweighted;
            let kj = ClosedKernel::for_domain(&dj)?;
            let mut worst: f64 = 0.0;
            for a in 0..=2usize {
                for b in 0..=(2 - a) {
                    let lhs = kd.eval_derivative(a, b, z, z)? * eps.powi((a + b + 2) as i32);
                    let rhs = kj.eval_derivative(a, b, o, o)?;
                    worst = worst.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()));
                }
            }
            Ok(ScalingRow {
                p_j: pj,
                minus_psi: eps,
                scaled_diagonal: scaled,
                host_diagonal_scaled: host,
                identity_residual: (scaled - host).abs() / scaled.abs(),
                closed_identity_residual: worst,
                unweighted_scaled_diagonal: diag(&kj, 0, 0, o)?,
            })
        })
        .collect::<Result<Vec<ScalingRow>>>()?;
    let target = 1.0 / (PI * mu_p);
    let last = rows.last().map(|r| r.scaled_diagonal).unwrap_or(f64::NAN);
    Ok(ScalingReport {
        rows,
        target,
        final_relative_error: (last - target).abs() / target,
    })
}

/// `p_j` for which `-psi(p_j) = 1 - p_j^2 = minus_psi`.
pub fn p_from_minus_psi(minus_psi: f64) -> Result<f64> {
    if !(minus_psi > 0.0 && minus_psi < 1.0) {
        return Err(Error::InvalidArgument(format!("-psi = {minus_psi} must lie in (0, 1)")));
    }
    Ok((1.0 - minus_psi).sqrt())
}

/// Sup over `grid` of `|F_j(z) - z|` for the normalized maps of the scaled discs onto the half-plane.
pub fn riemann_convergence(minus_psis: &[f64], grid: &[ComplexPoint], margin: f64) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::Empty("riemann grid"));
    }
    if let Some(z) = grid.iter().find(|z| !(z.re < 0.5 - margin)) {
        return Err(Error::InvalidArgument(format!(
            "grid point {z} is within {margin} of the half-plane boundary"
        )));
    }
    minus_psis
        .iter()
        .map(|&e| {
            let (dj, _) = scaled_disc(p_from_minus_psi(e)?)?;
            let f = riemann_map_to_h(&dj)?;
            Ok(grid
                .iter()
                .map(|&z| (f.apply(z) - z).norm())
                .fold(0.0, f64::max))
        })
        .collect()
}

/// The default Riemann-map grid `{|z| <= 0.4} ∩ {Re z <= 0.3}` sampled on a square lattice.
pub fn riemann_default_grid(n: usize) -> Vec<ComplexPoint> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = cpt(
                -0.4 + 0.8 * i as f64 / (n - 1) as f64,
                -0.4 + 0.8 * j as f64 / (n - 1) as f64,
            );
            if z.norm() <= 0.4 && z.re <= 0.3 {
                out.push(z);
            }
        }
    }
    out
}

/// Ramadanov convergence table on the half-plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamadanovReport {
    pub js: Vec<usize>,
    /// `K_{H, nu_j}(0, 0)`.
    pub values: Vec<f64>,
    /// `K_{H, nu_inf}(0, 0) = 1 / (pi nu_inf)`.
    pub target: f64,
    pub deviations: Vec<f64>,
    pub relative_deviations: Vec<f64>,
    pub decreasing: bool,
    /// Worst `|K(z, w) - conj(K(w, z))|` over the probe pairs, all `j`.
    pub hermitian_defect: f64,
    /// Worst relative deviation from `K_{H, nu_inf}` over the probe pairs at the last `j`.
    pub probe_relative_deviation: f64,
}

/// Disc-side weight `nu_inf + sigma / j`, with `sigma` real affine.
pub fn ramadanov_disc_weight(nu_inf: f64, sigma: (f64, f64, f64), j: usize) -> Weight {
    let s = 1.0 / j as f64;
    Weight::RealAffine {
        u: sigma.0 * s,
        v: sigma.1 * s,
        w0: nu_inf + sigma.2 * s,
    }
}

pub fn ramadanov_experiment(
    js: &[usize],
    nu_inf: f64,
    sigma: (f64, f64, f64),
    probes: &[(ComplexPoint, ComplexPoint)],
    cfg: &NumericConfig,
) -> Result<RamadanovReport> {
    if js.is_empty() || js.contains(&0) {
        return Err(Error::InvalidArgument("j values must be positive".into()));
    }
    if !(nu_inf > 0.0) {
        return Err(Error::InadmissibleWeight(format!("limit weight {nu_inf}")));
    }
    for &(z, w) in probes {
        for q in [z, w] {
            if !Domain::HalfPlaneH.contains(q) {
                return Err(Error::OutsideDomain(q));
            }
        }
    }
    let f = MobiusMap::half_plane_to_disc();
    let fb = Biholomorphism::Mobius(f);
    let o = cpt(0.0, 0.0);
    let limit = crate::kernels_closed::constant_weight_scale(ClosedKernel::HalfPlaneUnweighted, nu_inf)?;
    let target = 1.0 / (PI * nu_inf);
    let per_j = js
        .par_iter()
        .map(|&j| {
            let w = ramadanov_disc_weight(nu_inf, sigma, j);
            let kd: FittedKernel = fit_kernel(&Domain::UnitDisc, &w, f.apply(o), cfg)?;
            let kh = |z: ComplexPoint, w: ComplexPoint| transported_derivative(&kd, &fb, 1, 0, 0, z, w);
            let v = kh(o, o)?.re;
            let mut herm: f64 = 0.0;
            let mut probe_dev: f64 = 0.0;
            for &(z, w) in probes {
                let a = kh(z, w)?;
                let b = kh(w, z)?;
                herm = herm.max((a - b.conj()).norm());
                let l = limit.eval(z, w)?;
                probe_dev = probe_dev.max((a - l).norm() / l.norm());
            }
            Ok((v, herm, probe_dev))
        })
        .collect::<Result<Vec<(f64, f64, f64)>>>()?;
    let values: Vec<f64> = per_j.iter().map(|r| r.0).collect();
    let deviations: Vec<f64> = values.iter().map(|v| (v - target).abs()).collect();
    Ok(RamadanovReport {
        js: js.to_vec(),
        relative_deviations: deviations.iter().map(|d| d / target).collect(),
        decreasing: deviations.windows(2).all(|w| w[1] < w[0]),
        hermitian_defect: per_j.iter().map(|r| r.1).fold(0.0, f64::max),
        probe_relative_deviation: per_j.last().map(|r| r.2).unwrap_or(0.0),
        values,
        target,
        deviations,
    })
}

/// `K_{D,mu}(z_j) / K_{D ∩ U, mu}(z_j)` against 1, with `U = Disc{center, radius}`.
///
/// Both kernels are solved with the same pixel rule in the same recentred frame.
pub fn localization_experiment(
    dom: &Domain,
    u_center: ComplexPoint,
    u_radius: f64,
    mu: &Weight,
    p: ComplexPoint,
    deltas: &[f64],
    cfg: &NumericConfig,
) -> Result<RatioReport> {
    if (p - u_center).norm() >= u_radius {
        return Err(Error::InvalidArgument(format!("{p} is not interior to U")));
    }
    let lens = Domain::cut(
        dom.clone(),
        Cut::Disc {
            center: u_center,
            radius: u_radius,
        },
    )?;
    let seq = BoundarySequence::new(dom, p, deltas)?;
    for &z in &seq.points {
        if !lens.contains(z) {
            return Err(Error::OutsideDomain(z));
        }
    }
    let rows = collect_rows(&seq, |z| {
        let whole = recentred_kernel(dom, mu, z, cfg, ImageRule::Pixel)?;
        let local = recentred_kernel(&lens, mu, z, cfg, ImageRule::Pixel)?;
        Ok((
            diag(&whole, 0, 0, z)?,
            diag(&local, 0, 0, z)?,
            local.inner.discarded_modes(),
        ))
    })?;
    report_from_rows(&seq, rows, 1.0)
}
