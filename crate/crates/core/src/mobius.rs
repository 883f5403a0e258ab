//! Vahlen matrices, the generators of the p-symmetry preserving subgroup,
//! Möbius action, conformal weight and the conformal transform.

use std::fmt;

use rand::{Rng, RngExt};
use serde::Serialize;
use serde_json::{json, Value};

use crate::clifford::{Multivector, Paravector};
use crate::error::{Error, Result};
use crate::slice::{embed, Point, SliceContext, SliceUnit};
use crate::tolerances::{FD_STEP, MOBIUS_REL, POLE_REL};

/// One generator of the p-symmetry preserving group.
#[derive(Debug, Clone, PartialEq)]
pub enum GravGenerator {
    /// `(1, b; 0, 1)` with b in R^{p+1}; stored as p+1 coordinates.
    Translation(Vec<f64>),
    /// `(a, 0; 0, -a)` with a a unit vector on the last q generators.
    ModifiedRotation(SliceUnit),
    /// `(0, 1; -1, 0)`.
    Inversion,
    /// `(λ, 0; 0, 1/λ)`.
    Dilation(f64),
}

impl GravGenerator {
    pub fn kind_name(&self) -> &'static str {
        match self {
            GravGenerator::Translation(_) => "translation",
            GravGenerator::ModifiedRotation(_) => "modified_rotation",
            GravGenerator::Inversion => "inversion",
            GravGenerator::Dilation(_) => "dilation",
        }
    }

    /// Parses `translation:1,0`, `modified_rotation:e2` (also `rotation:`),
    /// `inversion`, `dilation:2`.
    pub fn parse(ctx: SliceContext, s: &str) -> Result<Self> {
        let (kind, param) = match s.split_once(':') {
            Some((k, v)) => (k.trim(), Some(v.trim())),
            None => (s.trim(), None),
        };
        let need = |what: &str| {
            param
                .filter(|v| !v.is_empty())
                .ok_or_else(|| Error::Parse(format!("{kind} needs {what}")))
        };
        let floats = |v: &str| -> Result<Vec<f64>> {
            v.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number {t:?} in {s:?}")))
                })
                .collect()
        };
        let g = match kind.to_ascii_lowercase().as_str() {
            "translation" | "t" => GravGenerator::Translation(floats(need("coordinates")?)?),
            "modified_rotation" | "rotation" | "r" => {
                let v = need("a unit vector")?;
                let a = match floats(v) {
                    Ok(c) => SliceUnit::new(ctx, &c)?,
                    Err(_) => SliceUnit::parse(ctx, v)?,
                };
                GravGenerator::ModifiedRotation(a)
            }
            "inversion" | "i" => {
                if param.is_some_and(|v| !v.is_empty()) {
                    return Err(Error::Parse("inversion takes no parameter".into()));
                }
                GravGenerator::Inversion
            }
            "dilation" | "d" => {
                let v = floats(need("a factor")?)?;
                if v.len() != 1 {
                    return Err(Error::Parse("dilation takes one factor".into()));
                }
                GravGenerator::Dilation(v[0])
            }
            other => return Err(Error::Parse(format!("unknown generator {other:?}"))),
        };
        g.validate(ctx)
    }

    /// Normalizes the parameter and rejects values outside the allowed set.
    pub fn validate(self, ctx: SliceContext) -> Result<Self> {
        match self {
            GravGenerator::Translation(b) => {
                let p1 = ctx.p() + 1;
                if b.len() == p1 {
                    Ok(GravGenerator::Translation(b))
                } else if b.len() == ctx.full_arity() {
                    if b[p1..].iter().any(|v| *v != 0.0) {
                        return Err(Error::Domain(
                            "translation vector must have zero x_q components".into(),
                        ));
                    }
                    Ok(GravGenerator::Translation(b[..p1].to_vec()))
                } else {
                    Err(Error::Domain(format!(
                        "translation needs {p1} coordinates, got {}",
                        b.len()
                    )))
                }
            }
            GravGenerator::ModifiedRotation(a) => {
                ctx.check_unit(&a)?;
                Ok(GravGenerator::ModifiedRotation(a))
            }
            GravGenerator::Dilation(l) => {
                if l == 0.0 || !l.is_finite() {
                    return Err(Error::Domain(format!("dilation factor {l} must be finite and nonzero")));
                }
                Ok(GravGenerator::Dilation(l))
            }
            GravGenerator::Inversion => Ok(GravGenerator::Inversion),
        }
    }

    fn entries(&self, ctx: SliceContext) -> [Multivector; 4] {
        let n = ctx.n();
        let z = Multivector::zero(n);
        let one = Multivector::one(n);
        match self {
            GravGenerator::Translation(b) => [one.clone(), Multivector::from_paravector(n, b), z, one],
            GravGenerator::ModifiedRotation(a) => {
                let a = a.to_multivector();
                [a.clone(), z.clone(), z, -a]
            }
            GravGenerator::Inversion => [z.clone(), one.clone(), -one, z],
            GravGenerator::Dilation(l) => [Multivector::scalar(n, *l), z.clone(), z, Multivector::scalar(n, 1.0 / l)],
        }
    }

    fn to_json(&self) -> Value {
        match self {
            GravGenerator::Translation(b) => json!({"kind": "translation", "parameter": b}),
            GravGenerator::ModifiedRotation(a) => json!({"kind": "modified_rotation", "parameter": a.comps()}),
            GravGenerator::Inversion => json!({"kind": "inversion"}),
            GravGenerator::Dilation(l) => json!({"kind": "dilation", "parameter": l}),
        }
    }

    fn from_json(ctx: SliceContext, v: &Value) -> Result<Self> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Json("generator needs a \"kind\"".into()))?;
        let param = v.get("parameter");
        let floats = || -> Result<Vec<f64>> {
            match param {
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| Error::Json("non-numeric parameter".into())))
                    .collect(),
                Some(Value::Number(x)) => Ok(vec![x.as_f64().unwrap_or(f64::NAN)]),
                _ => Err(Error::Json(format!("{kind} needs a numeric parameter"))),
            }
        };
        let g = match kind {
            "translation" => GravGenerator::Translation(floats()?),
            "modified_rotation" => GravGenerator::ModifiedRotation(SliceUnit::new(ctx, &floats()?)?),
            "inversion" => GravGenerator::Inversion,
            "dilation" => {
                let v = floats()?;
                if v.len() != 1 {
                    return Err(Error::Json("dilation takes one factor".into()));
                }
                GravGenerator::Dilation(v[0])
            }
            other => return Err(Error::Json(format!("unknown generator kind {other:?}"))),
        };
        g.validate(ctx)
    }
}

/// How the entries of a matrix are known to lie in the Clifford group.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Product `word[0] * word[1] * ...` of group generators.
    Grav { ctx: SliceContext, word: Vec<GravGenerator> },
    /// Each entry is the product of its paravector factors, in order; an
    /// empty list stands for a zero entry.
    Factored([Vec<Paravector>; 4]),
    /// Nothing known beyond the entries.
    Unverified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VahlenMatrix {
    n: usize,
    a: Multivector,
    b: Multivector,
    c: Multivector,
    d: Multivector,
    provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VahlenReport {
    pub ok: bool,
    /// "i", "ii", "iii" or "none".
    pub failed_condition: &'static str,
    /// Set when condition (i) was only checked through a necessary test.
    pub unverified: bool,
    /// Scalar `a rev(d) - b rev(c)` when condition (iii) was reached.
    pub pseudo_determinant: Option<f64>,
}

fn same_dim(ms: &[&Multivector]) -> Result<usize> {
    let n = ms[0].n();
    if ms.iter().any(|m| m.n() != n) {
        return Err(Error::Dimension("matrix entries live in different algebras".into()));
    }
    Ok(n)
}

fn factor_product(n: usize, fs: &[Paravector]) -> Result<Multivector> {
    if fs.is_empty() {
        return Ok(Multivector::zero(n));
    }
    let mut m = Multivector::one(n);
    for f in fs {
        if f.n() != n {
            return Err(Error::Dimension("factor in a different algebra".into()));
        }
        m = &m * &f.to_multivector();
    }
    Ok(m)
}

impl VahlenMatrix {
    /// Arbitrary entries; the Clifford-group condition stays unverified.
    pub fn new(a: Multivector, b: Multivector, c: Multivector, d: Multivector) -> Result<Self> {
        let n = same_dim(&[&a, &b, &c, &d])?;
        Ok(VahlenMatrix {
            n,
            a,
            b,
            c,
            d,
            provenance: Provenance::Unverified,
        })
    }

    /// Entries given as ordered products of paravectors.
    pub fn from_factors(n: usize, factors: [Vec<Paravector>; 4]) -> Result<Self> {
        let [a, b, c, d] = [0, 1, 2, 3].map(|i| factor_product(n, &factors[i]));
        Ok(VahlenMatrix {
            n,
            a: a?,
            b: b?,
            c: c?,
            d: d?,
            provenance: Provenance::Factored(factors),
        })
    }

    pub fn identity(ctx: SliceContext) -> Self {
        let n = ctx.n();
        VahlenMatrix {
            n,
            a: Multivector::one(n),
            b: Multivector::zero(n),
            c: Multivector::zero(n),
            d: Multivector::one(n),
            provenance: Provenance::Grav { ctx, word: Vec::new() },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &Multivector {
        &self.a
    }

    pub fn b(&self) -> &Multivector {
        &self.b
    }

    pub fn c(&self) -> &Multivector {
        &self.c
    }

    pub fn d(&self) -> &Multivector {
        &self.d
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_grav(&self) -> bool {
        matches!(self.provenance, Provenance::Grav { .. })
    }

    /// Matrix product `self * other`, acting as `self ∘ other`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::Dimension("matrices over different algebras".into()));
        }
        let a = &(&self.a * &o.a) + &(&self.b * &o.c);
        let b = &(&self.a * &o.b) + &(&self.b * &o.d);
        let c = &(&self.c * &o.a) + &(&self.d * &o.c);
        let d = &(&self.c * &o.b) + &(&self.d * &o.d);
        let provenance = match (&self.provenance, &o.provenance) {
            (Provenance::Grav { ctx, word: w1 }, Provenance::Grav { ctx: c2, word: w2 }) if ctx == c2 => {
                let mut word = w1.clone();
                word.extend(w2.iter().cloned());
                Provenance::Grav { ctx: *ctx, word }
            }
            _ => Provenance::Unverified,
        };
        Ok(VahlenMatrix { n: self.n, a, b, c, d, provenance })
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "c": self.c.to_json(),
            "d": self.d.to_json(),
        });
        match &self.provenance {
            Provenance::Grav { ctx, word } => {
                v["p"] = json!(ctx.p());
                v["q"] = json!(ctx.q());
                v["generators"] = Value::Array(word.iter().map(GravGenerator::to_json).collect());
            }
            Provenance::Factored(f) => {
                let list = |fs: &Vec<Paravector>| -> Value { fs.iter().map(|x| json!(x.coords())).collect() };
                v["factors"] = json!({"a": list(&f[0]), "b": list(&f[1]), "c": list(&f[2]), "d": list(&f[3])});
            }
            Provenance::Unverified => {}
        }
        v
    }

    /// Reads the matrix JSON. With `generators` (and p, q) the matrix is
    /// rebuilt from them; with `factors` each entry is rebuilt from its
    /// paravector factors. Listed entries must agree with the provenance.
    pub fn from_json(n: usize, v: &Value) -> Result<Self> {
        let entry = |k: &str| v.get(k).map(|e| Multivector::from_json(n, e)).transpose();
        let given = [entry("a")?, entry("b")?, entry("c")?, entry("d")?];
        let built = if let Some(gens) = v.get("generators") {
            let get = |k: &str| v.get(k).and_then(Value::as_u64).map(|x| x as usize);
            let (p, q) = match (get("p"), get("q")) {
                (Some(p), Some(q)) => (p, q),
                _ => return Err(Error::Json("generator provenance needs \"p\" and \"q\"".into())),
            };
            let ctx = SliceContext::new(p, q)?;
            if ctx.n() != n {
                return Err(Error::Dimension(format!("p + q = {} but n = {n}", ctx.n())));
            }
            let gens = gens
                .as_array()
                .ok_or_else(|| Error::Json("\"generators\" must be an array".into()))?;
            let mut m = VahlenMatrix::identity(ctx);
            for g in gens {
                m = m.mul(&grav_generator(ctx, GravGenerator::from_json(ctx, g)?)?)?;
            }
            Some(m)
        } else if let Some(f) = v.get("factors") {
            let list = |k: &str| -> Result<Vec<Paravector>> {
                match f.get(k) {
                    None => Ok(Vec::new()),
                    Some(Value::Array(xs)) => xs
                        .iter()
                        .map(|x| {
                            let c: Vec<f64> = serde_json::from_value(x.clone())?;
                            if c.len() != n + 1 {
                                return Err(Error::Dimension(format!("factor needs {} coordinates", n + 1)));
                            }
                            Paravector::new(c)
                        })
                        .collect(),
                    Some(_) => Err(Error::Json(format!("factors.{k} must be an array"))),
                }
            };
            Some(VahlenMatrix::from_factors(n, [list("a")?, list("b")?, list("c")?, list("d")?])?)
        } else {
            None
        };
        match built {
            Some(m) => {
                let have = [&m.a, &m.b, &m.c, &m.d];
                for (g, h) in given.iter().zip(have) {
                    if let Some(g) = g {
                        if !g.approx_eq(h, MOBIUS_REL * (1.0 + h.norm())) {
                            return Err(Error::Domain("matrix entries disagree with their provenance".into()));
                        }
                    }
                }
                Ok(m)
            }
            None => {
                let [a, b, c, d] = given;
                match (a, b, c, d) {
                    (Some(a), Some(b), Some(c), Some(d)) => VahlenMatrix::new(a, b, c, d),
                    _ => Err(Error::Json("matrix needs entries a, b, c, d".into())),
                }
            }
        }
    }
}

impl fmt::Display for VahlenMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

pub fn grav_generator(ctx: SliceContext, g: GravGenerator) -> Result<VahlenMatrix> {
    let g = g.validate(ctx)?;
    let [a, b, c, d] = g.entries(ctx);
    Ok(VahlenMatrix {
        n: ctx.n(),
        a,
        b,
        c,
        d,
        provenance: Provenance::Grav { ctx, word: vec![g] },
    })
}

/// Random generator of the given kind (0 translation, 1 modified rotation,
/// 2 inversion, 3 dilation) with parameters in the ranges used by the
/// invariance checks.
pub fn random_generator<R: Rng + ?Sized>(ctx: SliceContext, kind: usize, rng: &mut R) -> GravGenerator {
    match kind % 4 {
        0 => GravGenerator::Translation((0..=ctx.p()).map(|_| rng.random_range(-1.0..1.0) / ((ctx.p() + 1) as f64).sqrt()).collect()),
        1 => GravGenerator::ModifiedRotation(SliceUnit::random(ctx, rng)),
        2 => GravGenerator::Inversion,
        _ => {
            let l: f64 = rng.random_range(0.5..1.5);
            GravGenerator::Dilation(if rng.random_bool(0.5) { l } else { -l })
        }
    }
}

fn in_group_structurally(g: &Multivector, factors: Option<&Vec<Paravector>>, tol: f64) -> Result<bool> {
    if let Some(fs) = factors {
        if fs.iter().any(|f| f.norm() == 0.0) {
            return Ok(false);
        }
        return Ok(factor_product(g.n(), fs)?.approx_eq(g, tol * (1.0 + g.norm())));
    }
    Ok(g.is_zero(0.0) || (g.is_paravector(tol * g.norm()) && g.norm() > 0.0))
}

/// Ahlfors-Vahlen conditions. Generator products and factored entries are
/// checked structurally; other entries pass (i) only through the sufficient
/// test "zero or nonzero paravector", or else through the necessary test
/// "g conj(g) is a nonzero scalar", in which case the report is flagged
/// unverified.
pub fn check_vahlen(m: &VahlenMatrix) -> VahlenReport {
    let tol = MOBIUS_REL;
    let entries = [&m.a, &m.b, &m.c, &m.d];
    let mut unverified = false;
    let fail = |c, unverified| VahlenReport {
        ok: false,
        failed_condition: c,
        unverified,
        pseudo_determinant: None,
    };
    match &m.provenance {
        Provenance::Grav { .. } => {}
        Provenance::Factored(f) => {
            for (g, fs) in entries.iter().zip(f.iter()) {
                if !in_group_structurally(g, Some(fs), tol).unwrap_or(false) {
                    return fail("i", false);
                }
            }
        }
        Provenance::Unverified => {
            for g in entries {
                if in_group_structurally(g, None, tol).unwrap_or(false) {
                    continue;
                }
                if g.group_inverse().is_err() {
                    return fail("i", false);
                }
                unverified = true;
            }
        }
    }
    let para = |x: &Multivector, y: &Multivector, s: f64| (x * y).is_paravector(tol * s.max(1.0));
    let sc = |x: &Multivector, y: &Multivector| x.norm() * y.norm();
    if !(para(&m.a, &m.b.reverse(), sc(&m.a, &m.b))
        && para(&m.c, &m.d.reverse(), sc(&m.c, &m.d))
        && para(&m.c.reverse(), &m.a, sc(&m.c, &m.a))
        && para(&m.d.reverse(), &m.b, sc(&m.d, &m.b)))
    {
        return fail("ii", unverified);
    }
    let delta = &(&m.a * &m.d.reverse()) - &(&m.b * &m.c.reverse());
    let scale = (sc(&m.a, &m.d) + sc(&m.b, &m.c)).max(1.0);
    let det = delta.scalar_part();
    if !delta.is_scalar(tol * scale) || det.abs() <= tol * scale {
        return VahlenReport {
            pseudo_determinant: Some(det),
            ..fail("iii", unverified)
        };
    }
    VahlenReport {
        ok: true,
        failed_condition: "none",
        unverified,
        pseudo_determinant: Some(det),
    }
}

fn denominator(m: &VahlenMatrix, x: &Point) -> Result<Multivector> {
    if x.n() != m.n {
        return Err(Error::Dimension(format!("point in R^{} for a matrix over R_{}", x.n() + 1, m.n)));
    }
    let xm = x.to_multivector();
    let den = &(&m.c * &xm) + &m.d;
    let scale = m.c.norm() * x.norm() + m.d.norm();
    if den.norm() <= POLE_REL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Singularity("cx + d = 0: the image is the point at infinity".into()));
    }
    Ok(den)
}

/// `M<x> = (ax + b)(cx + d)^{-1}`.
pub fn mobius_apply(m: &VahlenMatrix, x: &Point) -> Result<Point> {
    let den = denominator(m, x)?;
    let inv = den.group_inverse()?;
    let num = &(&m.a * &x.to_multivector()) + &m.b;
    let y = &num * &inv;
    let tol = 1e3 * MOBIUS_REL * (num.norm() * inv.norm()).max(1.0);
    Paravector::from_multivector(&y, tol)
        .map_err(|_| Error::Domain(format!("image {y} is not a paravector; the matrix is not a Vahlen matrix")))
}

fn weight(m: &VahlenMatrix, x: &Point, exponent: i32) -> Result<Multivector> {
    let den = denominator(m, x)?;
    let nrm = den.norm();
    Ok(den.conjugate().scale(nrm.powi(-exponent)))
}

/// `J(M, x) = conj(cx + d) / |cx + d|^{p+2}`.
pub fn jacobian_weight(m: &VahlenMatrix, x: &Point, p: usize) -> Result<Multivector> {
    weight(m, x, p as i32 + 2)
}

/// `T_f(x) = J(M, x) f(M<x>)`, only for generator products.
pub fn conformal_transform(
    m: &VahlenMatrix,
    f: &dyn Fn(&Point) -> Result<Multivector>,
    x: &Point,
) -> Result<Multivector> {
    let ctx = match &m.provenance {
        Provenance::Grav { ctx, .. } => *ctx,
        _ => {
            return Err(Error::Refused(
                "conformal transform needs a product of group generators".into(),
            ))
        }
    };
    ctx.check_point(x)?;
    let y = mobius_apply(m, x)?;
    Ok(&jacobian_weight(m, x, ctx.p())? * &f(&y)?)
}

/// Classical weight `conj(cx + d)/|cx + d|^{n+1}` times `f(M<x>)`.
pub fn ryan_transform(
    m: &VahlenMatrix,
    f: &dyn Fn(&Point) -> Result<Multivector>,
    x: &Point,
    n: usize,
) -> Result<Multivector> {
    let y = mobius_apply(m, x)?;
    Ok(&weight(m, x, n as i32 + 1)? * &f(&y)?)
}

/// Finite-difference `(D_{x_p} + ω ∂_r) g` at slice coordinates `xs` of the
/// slice of ω: central differences with step h and one Richardson level.
pub fn fd_slice_dirac(
    ctx: SliceContext,
    g: &dyn Fn(&Point) -> Result<Multivector>,
    xs: &[f64],
    omega: &SliceUnit,
) -> Result<Multivector> {
    if xs.len() != ctx.slice_arity() {
        return Err(Error::Dimension(format!("need {} slice coordinates", ctx.slice_arity())));
    }
    let n = ctx.n();
    let central = |i: usize, h: f64| -> Result<Multivector> {
        let mut up = xs.to_vec();
        let mut dn = xs.to_vec();
        up[i] += h;
        dn[i] -= h;
        Ok((&g(&embed(ctx, &up, omega)?)? - &g(&embed(ctx, &dn, omega)?)?).scale(0.5 / h))
    };
    let mut out = Multivector::zero(n);
    for i in 0..xs.len() {
        let d = (&central(i, FD_STEP / 2.0)?.scale(4.0) - &central(i, FD_STEP)?).scale(1.0 / 3.0);
        let e = if i <= ctx.p() { Multivector::basis(n, i) } else { omega.to_multivector() };
        out += &(&e * &d);
    }
    Ok(out)
}
