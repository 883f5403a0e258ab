//! The (p,q) splitting of R^{p+q+1}: x = x_p + r ω with ω on the unit sphere
//! of the trailing q coordinates.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::clifford::{Multivector, Paravector};
use crate::error::{Error, Result};
use crate::tolerances::{ALGEBRA_CAP, ORBIT_REL, UNIT_REL};

/// A point of R^{p+q+1}, stored as a paravector of R_{p+q}.
pub type Point = Paravector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SliceContext {
    p: usize,
    q: usize,
}

impl SliceContext {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::Dimension("q must be positive".into()));
        }
        if p + q > ALGEBRA_CAP {
            return Err(Error::Dimension(format!(
                "p + q = {} exceeds the algebra cap {ALGEBRA_CAP}",
                p + q
            )));
        }
        Ok(SliceContext { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of Clifford generators, p + q.
    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// Number of slice-plane coordinates (x_0..x_p, r).
    pub fn slice_arity(&self) -> usize {
        self.p + 2
    }

    /// Number of full coordinates x_0..x_{p+q}.
    pub fn full_arity(&self) -> usize {
        self.p + self.q + 1
    }

    /// e_{p+1}, the default slice direction.
    pub fn default_eta(&self) -> SliceUnit {
        SliceUnit::basis(*self, 1).expect("q >= 1")
    }

    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        self.check_arity(coords.len())?;
        Paravector::new(coords.to_vec())
    }

    fn check_arity(&self, len: usize) -> Result<()> {
        if len != self.full_arity() {
            return Err(Error::Dimension(format!(
                "point needs {} coordinates for (p,q)=({},{}), got {len}",
                self.full_arity(),
                self.p,
                self.q
            )));
        }
        Ok(())
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        self.check_arity(x.coords().len())
    }

    pub fn check_unit(&self, w: &SliceUnit) -> Result<()> {
        if w.p != self.p || w.w.len() != self.q {
            return Err(Error::Domain(format!(
                "unit vector belongs to (p,q)=({},{}), context is ({},{})",
                w.p,
                w.w.len(),
                self.p,
                self.q
            )));
        }
        Ok(())
    }
}

/// Unit 1-vector supported on e_{p+1}..e_{p+q}.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceUnit {
    p: usize,
    w: Vec<f64>,
}

impl SliceUnit {
    /// Components along e_{p+1}..e_{p+q}; must have unit length.
    pub fn new(ctx: SliceContext, comps: &[f64]) -> Result<Self> {
        if comps.len() != ctx.q() {
            return Err(Error::Domain(format!(
                "unit vector needs {} components, got {}",
                ctx.q(),
                comps.len()
            )));
        }
        let norm = comps.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_REL {
            return Err(Error::Domain(format!("|omega| = {norm}, expected 1")));
        }
        Ok(SliceUnit {
            p: ctx.p(),
            w: comps.iter().map(|v| v / norm).collect(),
        })
    }

    /// Normalizes any nonzero vector of q components.
    pub fn normalized(ctx: SliceContext, comps: &[f64]) -> Result<Self> {
        let norm = comps.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        let scaled: Vec<f64> = comps.iter().map(|v| v / norm).collect();
        Self::new(ctx, &scaled)
    }

    /// e_{p+j}, 1 <= j <= q.
    pub fn basis(ctx: SliceContext, j: usize) -> Result<Self> {
        if j == 0 || j > ctx.q() {
            return Err(Error::IndexOutOfRange(format!(
                "e_{{p+{j}}} with q = {}",
                ctx.q()
            )));
        }
        let mut w = vec![0.0; ctx.q()];
        w[j - 1] = 1.0;
        Ok(SliceUnit { p: ctx.p(), w })
    }

    pub fn from_multivector(ctx: SliceContext, m: &Multivector) -> Result<Self> {
        if m.n() != ctx.n() {
            return Err(Error::Dimension(format!(
                "unit vector in R_{}, context has n = {}",
                m.n(),
                ctx.n()
            )));
        }
        let mut rest = m.clone();
        let mut w = Vec::with_capacity(ctx.q());
        for j in 1..=ctx.q() {
            let b = 1u32 << (ctx.p() + j - 1);
            w.push(m.coeff(b));
            rest.set(b, 0.0);
        }
        if !rest.is_zero(UNIT_REL) {
            return Err(Error::Domain(format!(
                "{m} is not supported on e_{}..e_{}",
                ctx.p() + 1,
                ctx.n()
            )));
        }
        Self::new(ctx, &w)
    }

    /// Parses the multivector text form, e.g. `e2` or `0.6*e2 + 0.8*e3`.
    pub fn parse(ctx: SliceContext, s: &str) -> Result<Self> {
        let m = Multivector::parse(ctx.n(), s)?;
        Self::from_multivector(ctx, &m)
    }

    pub fn random<R: Rng + ?Sized>(ctx: SliceContext, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..ctx.q()).map(|_| StandardNormal.sample(rng)).collect();
            if let Ok(u) = Self::normalized(ctx, &v) {
                return u;
            }
        }
    }

    pub fn comps(&self) -> &[f64] {
        &self.w
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.w.len()
    }

    pub fn neg(&self) -> Self {
        SliceUnit {
            p: self.p,
            w: self.w.iter().map(|v| -v).collect(),
        }
    }

    pub fn to_multivector(&self) -> Multivector {
        let n = self.p + self.w.len();
        let mut m = Multivector::zero(n);
        for (j, &v) in self.w.iter().enumerate() {
            m.set(1 << (self.p + j), v);
        }
        m
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.w.iter().zip(&other.w).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for SliceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_multivector().fmt(f)
    }
}

/// `x = x_p + r ω`; ω is absent on R^{p+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceDecomposition {
    pub xp: Vec<f64>,
    pub r: f64,
    pub omega: Option<SliceUnit>,
}

impl SliceDecomposition {
    /// Slice coordinates x' = (x_0..x_p, r).
    pub fn slice_coords(&self) -> Vec<f64> {
        let mut v = self.xp.clone();
        v.push(self.r);
        v
    }

    /// x'_⋄ = (x_0..x_p, -r).
    pub fn reflected_coords(&self) -> Vec<f64> {
        reflect(&self.slice_coords())
    }
}

pub fn decompose(ctx: SliceContext, x: &Point) -> Result<SliceDecomposition> {
    ctx.check_point(x)?;
    let c = x.coords();
    let xp = c[..=ctx.p()].to_vec();
    let xq = &c[ctx.p() + 1..];
    let r = xq.iter().map(|v| v * v).sum::<f64>().sqrt();
    let omega = if r > 0.0 {
        let w: Vec<f64> = xq.iter().map(|v| v / r).collect();
        Some(SliceUnit {
            p: ctx.p(),
            w,
        })
    } else {
        None
    };
    Ok(SliceDecomposition { xp, r, omega })
}

pub fn compose(ctx: SliceContext, xp: &[f64], r: f64, omega: &SliceUnit) -> Result<Point> {
    ctx.check_unit(omega)?;
    if xp.len() != ctx.p() + 1 {
        return Err(Error::Dimension(format!(
            "x_p needs {} coordinates, got {}",
            ctx.p() + 1,
            xp.len()
        )));
    }
    let mut c = xp.to_vec();
    c.extend(omega.comps().iter().map(|w| r * w));
    Paravector::new(c)
}

/// Point with slice coordinates x' = (x_0..x_p, t) on the slice of ω; `t` may
/// be negative.
pub fn embed(ctx: SliceContext, xs: &[f64], omega: &SliceUnit) -> Result<Point> {
    if xs.len() != ctx.slice_arity() {
        return Err(Error::Dimension(format!(
            "slice point needs {} coordinates, got {}",
            ctx.slice_arity(),
            xs.len()
        )));
    }
    compose(ctx, &xs[..=ctx.p()], xs[ctx.p() + 1], omega)
}

/// (x_p, r) -> (x_p, -r).
pub fn reflect(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    if let Some(last) = v.last_mut() {
        *last = -*last;
    }
    v
}

/// `y ∈ [x]`: equal x_p parts and equal |x_q|, relative tolerance 1e-12.
pub fn orbit_contains(ctx: SliceContext, x: &Point, y: &Point) -> Result<bool> {
    orbit_contains_tol(ctx, x, y, ORBIT_REL)
}

pub fn orbit_contains_tol(ctx: SliceContext, x: &Point, y: &Point, tol: f64) -> Result<bool> {
    let dx = decompose(ctx, x)?;
    let dy = decompose(ctx, y)?;
    let scale = tol * (1.0 + x.norm().max(y.norm()));
    let xp_ok = dx
        .xp
        .iter()
        .zip(&dy.xp)
        .all(|(a, b)| (a - b).abs() <= scale);
    Ok(xp_ok && (dx.r - dy.r).abs() <= scale)
}

type Predicate = Arc<dyn Fn(&Point) -> bool + Send + Sync>;
type SlicePredicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum DomainKind {
    /// Open ball around a point of R^{p+1}.
    Ball { center: Vec<f64>, radius: f64 },
    /// rho1 < |x| < rho2.
    Annulus { rho1: f64, rho2: f64 },
    /// R^{p+q+1} minus R^{p+1}.
    ComplementOfRp1,
    /// The slice plane of ω: points x_p + t ω, t real.
    HalfSpaceUnion(SliceUnit),
    Custom(Predicate),
}

impl fmt::Debug for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Ball { center, radius } => {
                write!(f, "Ball {{ center: {center:?}, radius: {radius} }}")
            }
            DomainKind::Annulus { rho1, rho2 } => write!(f, "Annulus({rho1}, {rho2})"),
            DomainKind::ComplementOfRp1 => write!(f, "ComplementOfRp1"),
            DomainKind::HalfSpaceUnion(w) => write!(f, "HalfSpaceUnion({w})"),
            DomainKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A domain given by a membership predicate plus asserted metadata.
///
/// Connectedness of each slice Ω_ω is asserted, never verified.
#[derive(Debug, Clone)]
pub struct DomainDescriptor {
    ctx: SliceContext,
    kind: DomainKind,
    is_slice_domain: bool,
    is_p_symmetric: bool,
}

impl DomainDescriptor {
    pub fn ball(ctx: SliceContext, center: &[f64], radius: f64) -> Result<Self> {
        if center.len() != ctx.p() + 1 {
            return Err(Error::Domain(format!(
                "ball center must lie on R^{{p+1}} ({} coordinates)",
                ctx.p() + 1
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("radius {radius} must be positive")));
        }
        Ok(DomainDescriptor {
            ctx,
            kind: DomainKind::Ball {
                center: center.to_vec(),
                radius,
            },
            is_slice_domain: true,
            is_p_symmetric: true,
        })
    }

    pub fn annulus(ctx: SliceContext, rho1: f64, rho2: f64) -> Result<Self> {
        if !(rho1 >= 0.0 && rho2 > rho1) {
            return Err(Error::Domain(format!("annulus needs 0 <= {rho1} < {rho2}")));
        }
        Ok(DomainDescriptor {
            ctx,
            kind: DomainKind::Annulus { rho1, rho2 },
            is_slice_domain: true,
            is_p_symmetric: true,
        })
    }

    pub fn complement_of_rp1(ctx: SliceContext) -> Self {
        DomainDescriptor {
            ctx,
            kind: DomainKind::ComplementOfRp1,
            is_slice_domain: false,
            is_p_symmetric: true,
        }
    }

    pub fn half_space_union(ctx: SliceContext, omega: SliceUnit) -> Result<Self> {
        ctx.check_unit(&omega)?;
        Ok(DomainDescriptor {
            ctx,
            kind: DomainKind::HalfSpaceUnion(omega),
            is_slice_domain: false,
            is_p_symmetric: false,
        })
    }

    pub fn custom(
        ctx: SliceContext,
        pred: impl Fn(&Point) -> bool + Send + Sync + 'static,
        is_slice_domain: bool,
        is_p_symmetric: bool,
    ) -> Self {
        DomainDescriptor {
            ctx,
            kind: DomainKind::Custom(Arc::new(pred)),
            is_slice_domain,
            is_p_symmetric,
        }
    }

    pub fn ctx(&self) -> SliceContext {
        self.ctx
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn is_slice_domain(&self) -> bool {
        self.is_slice_domain
    }

    pub fn is_p_symmetric(&self) -> bool {
        self.is_p_symmetric
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        self.ctx.check_point(x)?;
        let c = x.coords();
        let p = self.ctx.p();
        Ok(match &self.kind {
            DomainKind::Ball { center, radius } => {
                let d2: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let ci = if i <= p { center[i] } else { 0.0 };
                        (v - ci) * (v - ci)
                    })
                    .sum();
                d2 < radius * radius
            }
            DomainKind::Annulus { rho1, rho2 } => {
                let n = x.norm();
                *rho1 < n && n < *rho2
            }
            DomainKind::ComplementOfRp1 => c[p + 1..].iter().any(|v| *v != 0.0),
            DomainKind::HalfSpaceUnion(w) => {
                let d = decompose(self.ctx, x)?;
                match d.omega {
                    None => true,
                    Some(o) => (o.dot(w).abs() - 1.0).abs() <= ORBIT_REL,
                }
            }
            DomainKind::Custom(f) => f(x),
        })
    }
}

/// A reflection-invariant set D in the slice plane R^{p+2}.
#[derive(Clone)]
pub enum SlicePlaneSet {
    Disk { center: Vec<f64>, radius: f64 },
    Annulus { rho1: f64, rho2: f64 },
    Custom { p: usize, pred: SlicePredicate },
}

impl fmt::Debug for SlicePlaneSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlicePlaneSet::Disk { center, radius } => {
                write!(f, "Disk {{ center: {center:?}, radius: {radius} }}")
            }
            SlicePlaneSet::Annulus { rho1, rho2 } => write!(f, "Annulus({rho1}, {rho2})"),
            SlicePlaneSet::Custom { p, .. } => write!(f, "Custom {{ p: {p} }}"),
        }
    }
}

impl SlicePlaneSet {
    /// Disk |x' - c| < radius with c on R^{p+1}.
    pub fn disk(center: &[f64], radius: f64) -> Self {
        SlicePlaneSet::Disk {
            center: center.to_vec(),
            radius,
        }
    }

    /// Custom predicate, checked for invariance under r -> -r on a grid of
    /// `samples` points per axis in [-extent, extent]^{p+2}.
    pub fn custom(
        p: usize,
        pred: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
        extent: f64,
        samples: usize,
    ) -> Result<Self> {
        let d = p + 2;
        let samples = samples.max(2);
        let total = samples.checked_pow(d as u32).unwrap_or(usize::MAX).min(1 << 20);
        let mut idx = vec![0usize; d];
        for _ in 0..total {
            let pt: Vec<f64> = idx
                .iter()
                .map(|&i| -extent + 2.0 * extent * i as f64 / (samples - 1) as f64)
                .collect();
            if pred(&pt) != pred(&reflect(&pt)) {
                return Err(Error::Domain(format!(
                    "set is not invariant under r -> -r at {pt:?}"
                )));
            }
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < samples {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(SlicePlaneSet::Custom {
            p,
            pred: Arc::new(pred),
        })
    }

    pub fn contains_slice(&self, xs: &[f64]) -> bool {
        match self {
            SlicePlaneSet::Disk { center, radius } => {
                let d2: f64 = xs
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let c = center.get(i).copied().unwrap_or(0.0);
                        (v - c) * (v - c)
                    })
                    .sum();
                d2 < radius * radius
            }
            SlicePlaneSet::Annulus { rho1, rho2 } => {
                let n = xs.iter().map(|v| v * v).sum::<f64>().sqrt();
                *rho1 < n && n < *rho2
            }
            SlicePlaneSet::Custom { pred, .. } => pred(xs),
        }
    }
}

/// `x ∈ Ω_D` iff (x_p, r) ∈ D.
pub fn p_symmetric_completion_contains(
    ctx: SliceContext,
    d: &SlicePlaneSet,
    x: &Point,
) -> Result<bool> {
    let dec = decompose(ctx, x)?;
    Ok(d.contains_slice(&dec.slice_coords()))
}
