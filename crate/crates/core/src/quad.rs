//! Quadrature on slice spheres and balls, and the integral formulas built on
//! it: Cauchy, Cauchy-Pompeiu, Laurent coefficients, and a maximum-modulus
//! scan.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::fueter::{FueterTable, Side};
use crate::kernel::{kernel_e, sigma, slice_cauchy_kernel_on, QKernelTable};
use crate::poly::{apply, MultiIndex, OperatorSpec};
use crate::slice::{compose, decompose, embed, Point, SliceContext, SliceUnit};
use crate::stem::StemPolynomial;
use crate::tolerances::{CIRCLE_NODES, INTERIOR_SPACINGS, RADIAL_NODES, SPHERE_PHI, SPHERE_THETA};

/// Node counts for the product rules and the Monte Carlo fallback.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolution {
    /// Trapezoid nodes on the circle (p = 0).
    pub circle: usize,
    /// Gauss-Legendre nodes in cos θ (p = 1).
    pub theta: usize,
    /// Trapezoid nodes in azimuth (p = 1).
    pub phi: usize,
    /// Radial Gauss-Legendre nodes for solid rules.
    pub radial: usize,
    /// Samples for p >= 2, used only when `allow_mc` is set.
    pub mc_samples: usize,
    pub allow_mc: bool,
    pub seed: u64,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            circle: CIRCLE_NODES,
            theta: SPHERE_THETA,
            phi: SPHERE_PHI,
            radial: RADIAL_NODES,
            mc_samples: 20_000,
            allow_mc: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RuleKind {
    /// Sphere of the given radius around a point of R^{p+1}.
    BoundarySphere { radius: f64, center: Vec<f64> },
    /// Ball of the given radius around a point of R^{p+1}.
    SolidBall { radius: f64, center: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadNode {
    /// Slice coordinates (y_0..y_p, ỹ); ỹ may be negative.
    pub y: Vec<f64>,
    /// Unit exterior normal (boundary rules) or radial direction.
    pub normal: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    p: usize,
    kind: RuleKind,
    nodes: Vec<QuadNode>,
    spacing: f64,
    monte_carlo: bool,
}

struct Directions {
    dirs: Vec<(Vec<f64>, f64)>,
    /// Node spacing on the unit sphere.
    spacing: f64,
    monte_carlo: bool,
}

fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(n).ok_or_else(|| Error::Domain("zero Gauss-Legendre nodes".into()))?;
    Ok(GaussLegendre::new(n).as_node_weight_pairs().to_vec())
}

fn unit_sphere(p: usize, res: &Resolution) -> Result<Directions> {
    match p {
        0 => {
            let n = res.circle.max(1);
            let w = 2.0 * PI / n as f64;
            let dirs = (0..n)
                .map(|j| {
                    let t = w * j as f64;
                    (vec![t.cos(), t.sin()], w)
                })
                .collect();
            Ok(Directions {
                dirs,
                spacing: w,
                monte_carlo: false,
            })
        }
        1 => {
            let m = res.phi.max(1);
            let dphi = 2.0 * PI / m as f64;
            let mut dirs = Vec::with_capacity(res.theta * m);
            for (u, wu) in gauss_legendre(res.theta)? {
                let s = (1.0 - u * u).max(0.0).sqrt();
                for j in 0..m {
                    let phi = dphi * j as f64;
                    dirs.push((vec![u, s * phi.cos(), s * phi.sin()], wu * dphi));
                }
            }
            Ok(Directions {
                dirs,
                spacing: (PI / res.theta.max(1) as f64).max(dphi),
                monte_carlo: false,
            })
        }
        _ if res.allow_mc => {
            let n = res.mc_samples.max(1);
            let area = sigma(p);
            let mut rng = ChaCha8Rng::seed_from_u64(res.seed);
            let mut dirs = Vec::with_capacity(n);
            while dirs.len() < n {
                let v: Vec<f64> = (0..p + 2).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 0.0 {
                    dirs.push((v.iter().map(|a| a / norm).collect(), area / n as f64));
                }
            }
            Ok(Directions {
                dirs,
                spacing: (area / n as f64).powf(1.0 / (p as f64 + 1.0)),
                monte_carlo: true,
            })
        }
        _ => Err(Error::Unsupported(format!(
            "deterministic sphere rules exist for p <= 1; p = {p} needs the Monte Carlo flag"
        ))),
    }
}

fn slice_center(center: &[f64]) -> Vec<f64> {
    let mut c = center.to_vec();
    c.push(0.0);
    c
}

pub fn build_rule(p: usize, kind: RuleKind, res: &Resolution) -> Result<QuadratureRule> {
    let (radius, center) = match &kind {
        RuleKind::BoundarySphere { radius, center } | RuleKind::SolidBall { radius, center } => {
            (*radius, center.clone())
        }
    };
    if center.len() != p + 1 {
        return Err(Error::Dimension(format!("rule center needs {} coordinates", p + 1)));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius {radius} must be positive")));
    }
    let dirs = unit_sphere(p, res)?;
    let c = slice_center(&center);
    let mut nodes = Vec::new();
    match kind {
        RuleKind::BoundarySphere { .. } => {
            let scale = radius.powi(p as i32 + 1);
            for (u, w) in &dirs.dirs {
                nodes.push(QuadNode {
                    y: c.iter().zip(u).map(|(ci, ui)| ci + radius * ui).collect(),
                    normal: u.clone(),
                    weight: w * scale,
                });
            }
        }
        RuleKind::SolidBall { .. } => {
            let radial = gauss_legendre(res.radial)?;
            for (u, w) in &dirs.dirs {
                for &(t, wt) in &radial {
                    let s = 0.5 * radius * (t + 1.0);
                    nodes.push(QuadNode {
                        y: c.iter().zip(u).map(|(ci, ui)| ci + s * ui).collect(),
                        normal: u.clone(),
                        weight: w * 0.5 * radius * wt * s.powi(p as i32 + 1),
                    });
                }
            }
        }
    }
    Ok(QuadratureRule {
        p,
        kind,
        nodes,
        spacing: dirs.spacing * radius,
        monte_carlo: dirs.monte_carlo,
    })
}

/// Ball rule in polar coordinates about an interior `pole`, so integrands
/// with a `|y - pole|^{-(p+1)}` singularity are smoothed by the Jacobian.
pub fn polar_ball_rule(
    p: usize,
    radius: f64,
    center: &[f64],
    pole: &[f64],
    res: &Resolution,
) -> Result<QuadratureRule> {
    let c = slice_center(center);
    if pole.len() != p + 2 || c.len() != p + 2 {
        return Err(Error::Dimension("pole and center must be slice points".into()));
    }
    let d: Vec<f64> = pole.iter().zip(&c).map(|(a, b)| a - b).collect();
    let d2: f64 = d.iter().map(|v| v * v).sum();
    if d2 >= radius * radius {
        return Err(Error::Domain("pole must lie inside the ball".into()));
    }
    let dirs = unit_sphere(p, res)?;
    let radial = gauss_legendre(res.radial)?;
    let mut nodes = Vec::with_capacity(dirs.dirs.len() * radial.len());
    for (u, w) in &dirs.dirs {
        let du: f64 = d.iter().zip(u).map(|(a, b)| a * b).sum();
        let smax = -du + (du * du - d2 + radius * radius).sqrt();
        for &(t, wt) in &radial {
            let s = 0.5 * smax * (t + 1.0);
            nodes.push(QuadNode {
                y: pole.iter().zip(u).map(|(a, b)| a + s * b).collect(),
                normal: u.clone(),
                weight: w * 0.5 * smax * wt * s.powi(p as i32 + 1),
            });
        }
    }
    Ok(QuadratureRule {
        p,
        kind: RuleKind::SolidBall {
            radius,
            center: center.to_vec(),
        },
        nodes,
        spacing: dirs.spacing * radius,
        monte_carlo: dirs.monte_carlo,
    })
}

impl QuadratureRule {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.monte_carlo
    }

    pub fn weight_sum(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Surface area or volume the weights should add up to.
    pub fn exact_measure(&self) -> f64 {
        let s = sigma(self.p);
        match &self.kind {
            RuleKind::BoundarySphere { radius, .. } => s * radius.powi(self.p as i32 + 1),
            RuleKind::SolidBall { radius, .. } => {
                s * radius.powi(self.p as i32 + 2) / (self.p as f64 + 2.0)
            }
        }
    }

    fn sphere(&self) -> (f64, &[f64]) {
        match &self.kind {
            RuleKind::BoundarySphere { radius, center } | RuleKind::SolidBall { radius, center } => {
                (*radius, center)
            }
        }
    }

    /// Distance from the slice point `xs` to the boundary must be at least
    /// three node spacings.
    pub fn check_interior(&self, xs: &[f64]) -> Result<()> {
        let (radius, center) = self.sphere();
        let d2: f64 = xs
            .iter()
            .enumerate()
            .map(|(i, v)| v - center.get(i).copied().unwrap_or(0.0))
            .map(|v| v * v)
            .sum();
        let gap = radius - d2.sqrt();
        if gap < INTERIOR_SPACINGS * self.spacing {
            return Err(Error::Conditioning(format!(
                "point is {gap:.3e} from the boundary, below {INTERIOR_SPACINGS} node spacings ({:.3e})",
                self.spacing
            )));
        }
        Ok(())
    }
}

/// Integral value plus a standard error for Monte Carlo rules.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralResult {
    pub value: Multivector,
    pub stderr: Option<f64>,
    pub nodes: usize,
}

fn slice_vector(ctx: SliceContext, v: &[f64], eta: &SliceUnit) -> Multivector {
    let mut m = Multivector::from_paravector(ctx.n(), &v[..=ctx.p()]);
    m += &eta.to_multivector().scale(v[ctx.p() + 1]);
    m
}

fn accumulate(
    rule: &QuadratureRule,
    mut integrand: impl FnMut(&QuadNode) -> Result<Multivector>,
    n: usize,
) -> Result<IntegralResult> {
    let mut sum = Multivector::zero(n);
    let mut sq = 0.0;
    let mut mean_terms = Vec::new();
    for node in &rule.nodes {
        let v = integrand(node)?.scale(node.weight);
        if rule.monte_carlo {
            mean_terms.push(v.clone());
        }
        sum += &v;
    }
    let stderr = if rule.monte_carlo {
        let m = mean_terms.len() as f64;
        let mean = sum.scale(1.0 / m);
        for t in &mean_terms {
            sq += t.dist(&mean).powi(2);
        }
        // each term is weight * f, so the spread of the sum is m times the
        // standard error of the mean of the terms
        Some((sq / (m - 1.0).max(1.0)).sqrt() * m.sqrt())
    } else {
        None
    };
    Ok(IntegralResult {
        value: sum,
        stderr,
        nodes: rule.nodes.len(),
    })
}

fn require_boundary(rule: &QuadratureRule) -> Result<()> {
    match rule.kind {
        RuleKind::BoundarySphere { .. } => Ok(()),
        RuleKind::SolidBall { .. } => Err(Error::Domain("a boundary rule is required".into())),
    }
}

/// `∫ ℰ_y(x) n(y) f(y) dS(y)` over the sphere of `rule` in the slice of η.
pub fn cauchy_integral_detailed(
    ctx: SliceContext,
    f: &dyn Fn(&Point) -> Result<Multivector>,
    rule: &QuadratureRule,
    eta: &SliceUnit,
    x: &Point,
) -> Result<IntegralResult> {
    require_boundary(rule)?;
    ctx.check_unit(eta)?;
    if rule.p != ctx.p() {
        return Err(Error::Dimension("rule built for a different p".into()));
    }
    let dx = decompose(ctx, x)?;
    rule.check_interior(&dx.slice_coords())?;
    accumulate(
        rule,
        |node| {
            let y = embed(ctx, &node.y, eta)?;
            let k = match &dx.omega {
                Some(w) => slice_cauchy_kernel_on(ctx, &node.y, eta, &dx.xp, dx.r, w, Side::Left)?,
                None => kernel_e(ctx, &y.sub(x))?,
            };
            Ok(&(&k * &slice_vector(ctx, &node.normal, eta)) * &f(&y)?)
        },
        ctx.n(),
    )
}

pub fn cauchy_integral(
    ctx: SliceContext,
    f: &dyn Fn(&Point) -> Result<Multivector>,
    rule: &QuadratureRule,
    eta: &SliceUnit,
    x: &Point,
) -> Result<Multivector> {
    Ok(cauchy_integral_detailed(ctx, f, rule, eta, x)?.value)
}

/// Boundary term minus `∫ ℰ_y(x) (D_η f)(y) dV(y)` for the function induced
/// by an arbitrary stem. The solid term uses polar rules centered at the
/// kernel poles x' and x'_⋄.
pub fn cauchy_pompeiu(
    ctx: SliceContext,
    s: &StemPolynomial,
    boundary: &QuadratureRule,
    solid: &Resolution,
    eta: &SliceUnit,
    x: &Point,
) -> Result<Multivector> {
    let bterm = cauchy_integral(ctx, &|y| s.induce(y), boundary, eta, x)?;
    let (radius, center) = boundary.sphere();
    let g = apply(&OperatorSpec::DOmega(eta.clone()), &s.slice_restriction(eta)?)?;
    let dx = decompose(ctx, x)?;
    let n = ctx.n();
    let one = Multivector::one(n);
    let mut poles: Vec<(Vec<f64>, Point, Multivector)> = Vec::new();
    match &dx.omega {
        None => poles.push((dx.slice_coords(), x.clone(), one)),
        Some(w) => {
            let we = &w.to_multivector() * &eta.to_multivector();
            poles.push((
                dx.slice_coords(),
                compose(ctx, &dx.xp, dx.r, eta)?,
                (&one - &we).scale(0.5),
            ));
            poles.push((
                dx.reflected_coords(),
                compose(ctx, &dx.xp, -dx.r, eta)?,
                (&one + &we).scale(0.5),
            ));
        }
    }
    let mut solid_term = Multivector::zero(n);
    for (pole, pi, factor) in poles {
        let rule = polar_ball_rule(ctx.p(), radius, center, &pole, solid)?;
        let part = accumulate(
            &rule,
            |node| {
                let y = embed(ctx, &node.y, eta)?;
                Ok(&kernel_e(ctx, &y.sub(&pi))? * &g.evaluate(&node.y)?)
            },
            n,
        )?;
        solid_term += &(&factor * &part.value);
    }
    Ok(&bterm - &solid_term)
}

#[derive(Debug, Clone, Serialize)]
pub struct LaurentCoefficients {
    pub rho: f64,
    pub max_k: u32,
    /// Regular part: `a_k = ∮ Q_{η,k} n f dS`.
    pub a: BTreeMap<MultiIndex, Multivector>,
    /// Principal part: `b_k = ∮ P^R_{η,k} n f dS`.
    pub b: BTreeMap<MultiIndex, Multivector>,
}

pub fn laurent_coefficients(
    ctx: SliceContext,
    f: &dyn Fn(&Point) -> Result<Multivector>,
    rho: f64,
    eta: &SliceUnit,
    max_k: u32,
    res: &Resolution,
) -> Result<LaurentCoefficients> {
    let rule = build_rule(
        ctx.p(),
        RuleKind::BoundarySphere {
            radius: rho,
            center: vec![0.0; ctx.p() + 1],
        },
        res,
    )?;
    let qt = QKernelTable::new(ctx, eta)?;
    let pr = FueterTable::with_cap(ctx, eta, Side::Right, max_k)?;
    let ks = MultiIndex::all_up_to(ctx.p() + 1, max_k);
    let qs = ks.iter().map(|k| qt.q(k)).collect::<Result<Vec<_>>>()?;
    let ps = ks.iter().map(|k| pr.get(k)).collect::<Result<Vec<_>>>()?;
    let n = ctx.n();
    let mut a = vec![Multivector::zero(n); ks.len()];
    let mut b = vec![Multivector::zero(n); ks.len()];
    for node in rule.nodes() {
        let y = embed(ctx, &node.y, eta)?;
        let nf = (&slice_vector(ctx, &node.normal, eta) * &f(&y)?).scale(node.weight);
        for i in 0..ks.len() {
            a[i] += &(&qs[i].evaluate(&node.y)? * &nf);
            b[i] += &(&ps[i].evaluate(&node.y)? * &nf);
        }
    }
    Ok(LaurentCoefficients {
        rho,
        max_k,
        a: ks.iter().cloned().zip(a).collect(),
        b: ks.into_iter().zip(b).collect(),
    })
}

/// `Σ_{|k|<=K} P_k(x) a_k + Q_k(x) b_k`.
pub fn laurent_eval(ctx: SliceContext, coeffs: &LaurentCoefficients, x: &Point, k_max: u32) -> Result<Multivector> {
    let eta = ctx.default_eta();
    let ft = FueterTable::with_cap(ctx, &eta, Side::Left, k_max)?;
    let qt = QKernelTable::new(ctx, &eta)?;
    let mut out = Multivector::zero(ctx.n());
    for (k, a) in coeffs.a.iter().filter(|(k, _)| k.order() <= k_max) {
        out += &(&ft.evaluate_full(k, x)? * a);
    }
    for (k, b) in coeffs.b.iter().filter(|(k, _)| k.order() <= k_max) {
        out += &(&qt.evaluate_full(k, x)? * b);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub region: &'static str,
    pub coords: Vec<f64>,
    pub modulus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxModulusReport {
    pub interior_max: f64,
    pub interior_argmax: Vec<f64>,
    pub boundary_max: f64,
    pub boundary_argmax: Vec<f64>,
    /// `boundary` when no interior sample exceeds the boundary maximum.
    pub classification: &'static str,
    pub rows: Vec<ScanRow>,
}

impl MaxModulusReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("region,coords,modulus\n");
        for r in &self.rows {
            let c: Vec<String> = r.coords.iter().map(|v| v.to_string()).collect();
            s.push_str(&format!("{},{},{}\n", r.region, c.join(" "), r.modulus));
        }
        s
    }
}

/// Samples |f| on an interior grid of the ball's slice disk (slice of η) and on
/// `boundary` points of its sphere.
pub fn max_modulus_scan(
    ctx: SliceContext,
    f: &dyn Fn(&Point) -> Result<Multivector>,
    center: &[f64],
    radius: f64,
    eta: &SliceUnit,
    grid: usize,
    boundary: &Resolution,
) -> Result<MaxModulusReport> {
    let d = ctx.slice_arity();
    let c = slice_center(center);
    let grid = grid.max(2);
    let mut rows = Vec::new();
    let (mut imax, mut iarg) = (f64::NEG_INFINITY, Vec::new());
    let total = grid.checked_pow(d as u32).unwrap_or(usize::MAX).min(1 << 20);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        let ys: Vec<f64> = idx
            .iter()
            .zip(&c)
            .map(|(&i, ci)| ci - radius + 2.0 * radius * (i as f64 + 0.5) / grid as f64)
            .collect();
        let dist: f64 = ys.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if dist < radius {
            let m = f(&embed(ctx, &ys, eta)?)?.norm();
            if m > imax {
                imax = m;
                iarg = ys.clone();
            }
            rows.push(ScanRow {
                region: "interior",
                coords: ys,
                modulus: m,
            });
        }
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < grid {
                break;
            }
            *slot = 0;
        }
    }
    let rule = build_rule(
        ctx.p(),
        RuleKind::BoundarySphere {
            radius,
            center: center.to_vec(),
        },
        boundary,
    )?;
    let (mut bmax, mut barg) = (f64::NEG_INFINITY, Vec::new());
    for node in rule.nodes() {
        let m = f(&embed(ctx, &node.y, eta)?)?.norm();
        if m > bmax {
            bmax = m;
            barg = node.y.clone();
        }
        rows.push(ScanRow {
            region: "boundary",
            coords: node.y.clone(),
            modulus: m,
        });
    }
    let classification = if bmax >= imax * (1.0 - 1e-12) { "boundary" } else { "interior" };
    Ok(MaxModulusReport {
        interior_max: imax,
        interior_argmax: iarg,
        boundary_max: bmax,
        boundary_argmax: barg,
        classification,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{CliffordPolynomial, PolyKind};

    fn ctx(p: usize, q: usize) -> SliceContext {
        SliceContext::new(p, q).unwrap()
    }

    fn sphere(p: usize, radius: f64) -> RuleKind {
        RuleKind::BoundarySphere {
            radius,
            center: vec![0.0; p + 1],
        }
    }

    #[test]
    fn rule_examples() {
        let r = build_rule(0, sphere(0, 1.0), &Resolution::default()).unwrap();
        assert_eq!(r.nodes().len(), 64);
        assert!(r.nodes().iter().all(|n| (n.weight - 2.0 * PI / 64.0).abs() < 1e-15));
        let r = build_rule(1, sphere(1, 1.3), &Resolution::default()).unwrap();
        assert_eq!(r.nodes().len(), 2048);
        assert!((r.weight_sum() - 4.0 * PI * 1.69).abs() < 1e-12 * r.exact_measure());
        assert!(matches!(
            build_rule(2, sphere(2, 1.0), &Resolution::default()),
            Err(Error::Unsupported(_))
        ));
        let res = Resolution {
            allow_mc: true,
            mc_samples: 1000,
            ..Resolution::default()
        };
        let r = build_rule(2, sphere(2, 1.0), &res).unwrap();
        assert!((r.weight_sum() - r.exact_measure()).abs() < 1e-10 * r.exact_measure());
    }

    #[test]
    fn solid_weights_sum_to_volume() {
        for p in [0, 1] {
            let r = build_rule(
                p,
                RuleKind::SolidBall {
                    radius: 0.7,
                    center: vec![0.1; p + 1],
                },
                &Resolution::default(),
            )
            .unwrap();
            assert!((r.weight_sum() - r.exact_measure()).abs() < 1e-10 * r.exact_measure());
            let polar = polar_ball_rule(p, 0.7, &vec![0.1; p + 1], &vec![0.2; p + 2], &Resolution::default()).unwrap();
            assert!((polar.weight_sum() - r.exact_measure()).abs() < 1e-10 * r.exact_measure());
        }
    }

    #[test]
    fn e_times_normal_is_constant_on_centered_spheres() {
        let c = ctx(1, 2);
        let eta = c.default_eta();
        let rho = 0.8;
        let r = build_rule(1, sphere(1, rho), &Resolution::default()).unwrap();
        let want = 1.0 / (sigma(1) * rho * rho);
        for node in r.nodes() {
            let y = embed(c, &node.y, &eta).unwrap();
            let v = &kernel_e(c, &y).unwrap() * &slice_vector(c, &node.normal, &eta);
            assert!(v.approx_eq(&Multivector::scalar(3, want), 1e-12 * want));
        }
    }

    #[test]
    fn constants_are_reproduced() {
        for (p, q) in [(0, 2), (1, 2)] {
            let c = ctx(p, q);
            let eta = c.default_eta();
            let r = build_rule(p, sphere(p, 1.0), &Resolution::default()).unwrap();
            let one = |_: &Point| Ok(Multivector::one(c.n()));
            let mut x = vec![0.1; c.full_arity()];
            x[c.n()] = 0.25;
            let v = cauchy_integral(c, &one, &r, &eta, &c.point(&x).unwrap()).unwrap();
            assert!(v.approx_eq(&Multivector::one(c.n()), 1e-10), "{v}");
        }
    }

    #[test]
    fn boundary_guard() {
        let c = ctx(0, 1);
        let r = build_rule(0, sphere(0, 1.0), &Resolution::default()).unwrap();
        let one = |_: &Point| Ok(Multivector::one(1));
        let x = c.point(&[0.0, 0.9]).unwrap();
        assert!(matches!(
            cauchy_integral(c, &one, &r, &c.default_eta(), &x),
            Err(Error::Conditioning(_))
        ));
    }

    #[test]
    fn pompeiu_on_z0() {
        let c = ctx(0, 1);
        let s = StemPolynomial::new(
            CliffordPolynomial::var(c, PolyKind::Slice, 0),
            CliffordPolynomial::var(c, PolyKind::Slice, 1),
        )
        .unwrap();
        let r = build_rule(0, sphere(0, 1.0), &Resolution::default()).unwrap();
        let x = c.point(&[0.3, 0.2]).unwrap();
        let v = cauchy_pompeiu(c, &s, &r, &Resolution::default(), &c.default_eta(), &x).unwrap();
        assert!(v.approx_eq(&s.induce(&x).unwrap(), 1e-10));
    }

    #[test]
    fn pompeiu_reproduces_non_monogenic_stems() {
        for (p, q) in [(0, 2), (1, 2)] {
            let c = ctx(p, q);
            let x0 = CliffordPolynomial::var(c, PolyKind::Slice, 0);
            let r = c.p() + 1;
            let rv = CliffordPolynomial::var(c, PolyKind::Slice, r);
            let f1 = &x0.mul(&x0) + &rv.mul(&rv).scale(0.5);
            let f2 = rv.mul(&x0).left_mul(&Multivector::basis(c.n(), 1));
            let s = StemPolynomial::new(f1, f2).unwrap();
            let rule = build_rule(p, sphere(p, 1.0), &Resolution::default()).unwrap();
            let mut x = vec![0.1; c.full_arity()];
            x[c.n()] = 0.2;
            let x = c.point(&x).unwrap();
            let v = cauchy_pompeiu(c, &s, &rule, &Resolution::default(), &c.default_eta(), &x).unwrap();
            let want = s.induce(&x).unwrap();
            assert!(v.approx_eq(&want, 1e-8), "p={p}: {v} vs {want}");
        }
    }

    #[test]
    fn max_modulus_examples() {
        let c = ctx(0, 1);
        let eta = c.default_eta();
        let res = Resolution::default();
        let k = |_: &Point| Ok(Multivector::scalar(1, 2.0));
        let rep = max_modulus_scan(c, &k, &[0.0], 1.0, &eta, 8, &res).unwrap();
        assert_eq!(rep.interior_max, rep.boundary_max);
        let z0 = |x: &Point| Ok(x.to_multivector());
        let rep = max_modulus_scan(c, &z0, &[0.0], 1.0, &eta, 8, &res).unwrap();
        assert_eq!(rep.classification, "boundary");
        assert!(rep.boundary_max > rep.interior_max);
        assert!(rep.to_csv().starts_with("region,coords,modulus\n"));
    }
}
