//! Polynomials in real variables with Clifford coefficients, and exact
//! application of the differential operators that act on them.
//!
//! Coefficients sit to the left of the (real, commuting) monomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::slice::{SliceContext, SliceUnit};

/// Exponent vector (k_0, ..., k_p).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(k: Vec<u32>) -> Self {
        MultiIndex(k)
    }

    pub fn zero(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    /// ε_i.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut k = vec![0; len];
        k[i] = 1;
        MultiIndex(k)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// |k|.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// k! = Π k_i!.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// k - ε_i, absent when k_i = 0.
    pub fn minus(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut k = self.0.clone();
        k[i] -= 1;
        Some(MultiIndex(k))
    }

    pub fn plus(&self, i: usize) -> Self {
        let mut k = self.0.clone();
        k[i] += 1;
        MultiIndex(k)
    }

    /// All indices of length `len` and order `deg`, in lexicographic order.
    pub fn all_of_order(len: usize, deg: u32) -> Vec<Self> {
        fn rec(len: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if cur.len() + 1 == len {
                cur.push(left);
                out.push(MultiIndex(cur.clone()));
                cur.pop();
                return;
            }
            for k in (0..=left).rev() {
                cur.push(k);
                rec(len, left - k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if len == 0 {
            if deg == 0 {
                out.push(MultiIndex(vec![]));
            }
            return out;
        }
        rec(len, deg, &mut Vec::with_capacity(len), &mut out);
        out.sort();
        out
    }

    /// All indices with order 0..=deg, grouped by order.
    pub fn all_up_to(len: usize, deg: u32) -> Vec<Self> {
        (0..=deg).flat_map(|d| Self::all_of_order(len, d)).collect()
    }

    /// Parses `1,0,2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Err(Error::Parse("empty multi-index".into()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad multi-index entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Slice polynomials live in (x_0..x_p, r); full ones in x_0..x_{p+q}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyKind {
    Slice,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordPolynomial {
    ctx: SliceContext,
    kind: PolyKind,
    terms: BTreeMap<Vec<u32>, Multivector>,
}

fn arity(ctx: SliceContext, kind: PolyKind) -> usize {
    match kind {
        PolyKind::Slice => ctx.slice_arity(),
        PolyKind::Full => ctx.full_arity(),
    }
}

fn is_exact_zero(m: &Multivector) -> bool {
    m.coeffs().iter().all(|v| *v == 0.0)
}

impl CliffordPolynomial {
    pub fn zero(ctx: SliceContext, kind: PolyKind) -> Self {
        CliffordPolynomial {
            ctx,
            kind,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: SliceContext, kind: PolyKind, c: Multivector) -> Self {
        let mut p = Self::zero(ctx, kind);
        p.add_term(vec![0; arity(ctx, kind)], &c);
        p
    }

    pub fn one(ctx: SliceContext, kind: PolyKind) -> Self {
        Self::constant(ctx, kind, Multivector::one(ctx.n()))
    }

    /// The coordinate function of variable `i` (r is `p + 1` for slice kind).
    pub fn var(ctx: SliceContext, kind: PolyKind, i: usize) -> Self {
        let mut e = vec![0; arity(ctx, kind)];
        e[i] = 1;
        let mut p = Self::zero(ctx, kind);
        p.add_term(e, &Multivector::one(ctx.n()));
        p
    }

    pub fn monomial(ctx: SliceContext, kind: PolyKind, exps: &[u32], c: Multivector) -> Result<Self> {
        if exps.len() != arity(ctx, kind) {
            return Err(Error::Dimension(format!(
                "monomial needs {} exponents, got {}",
                arity(ctx, kind),
                exps.len()
            )));
        }
        if c.n() != ctx.n() {
            return Err(Error::Dimension(format!(
                "coefficient in R_{}, context has n = {}",
                c.n(),
                ctx.n()
            )));
        }
        let mut p = Self::zero(ctx, kind);
        p.add_term(exps.to_vec(), &c);
        Ok(p)
    }

    pub fn ctx(&self) -> SliceContext {
        self.ctx
    }

    pub fn kind(&self) -> PolyKind {
        self.kind
    }

    pub fn arity(&self) -> usize {
        arity(self.ctx, self.kind)
    }

    /// Index of r in a slice polynomial.
    pub fn r_var(&self) -> usize {
        self.ctx.p() + 1
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Multivector)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Option<&Multivector> {
        self.terms.get(exps)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * x^exps`, dropping the term if it cancels exactly.
    pub fn add_term(&mut self, exps: Vec<u32>, c: &Multivector) {
        debug_assert_eq!(exps.len(), self.arity());
        if is_exact_zero(c) {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                *v += c;
                if is_exact_zero(v) {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
    }

    fn same_space(&self, o: &Self) {
        assert!(
            self.ctx == o.ctx && self.kind == o.kind,
            "polynomials from different spaces"
        );
    }

    fn map_coeffs(&self, f: impl Fn(&Multivector) -> Multivector) -> Self {
        let mut out = Self::zero(self.ctx, self.kind);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    /// `a * P`.
    pub fn left_mul(&self, a: &Multivector) -> Self {
        self.map_coeffs(|c| a * c)
    }

    /// `P * a`.
    pub fn right_mul(&self, a: &Multivector) -> Self {
        self.map_coeffs(|c| c * a)
    }

    /// Multiplies by the real variable `x_i`.
    pub fn mul_var(&self, i: usize) -> Self {
        let mut out = Self::zero(self.ctx, self.kind);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e[i] += 1;
            out.terms.insert(e, c.clone());
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_space(o);
        let mut out = Self::zero(self.ctx, self.kind);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.ctx, self.kind);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Multivector> {
        if x.len() != self.arity() {
            return Err(Error::Dimension(format!(
                "evaluation needs {} coordinates, got {}",
                self.arity(),
                x.len()
            )));
        }
        let mut out = Multivector::zero(self.ctx.n());
        for (e, c) in &self.terms {
            let m: f64 = e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product();
            out += &c.scale(m);
        }
        Ok(out)
    }

    pub fn partial(&self, var: usize) -> Self {
        assert!(var < self.arity(), "variable {var} out of range");
        let mut out = Self::zero(self.ctx, self.kind);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, &c.scale(f64::from(k)));
        }
        out
    }

    /// ∂_k over x_0..x_p.
    pub fn partial_multi(&self, k: &MultiIndex) -> Result<Self> {
        if k.len() != self.ctx.p() + 1 {
            return Err(Error::Dimension(format!(
                "multi-index {k} needs {} entries",
                self.ctx.p() + 1
            )));
        }
        let mut out = self.clone();
        for (i, &ki) in k.as_slice().iter().enumerate() {
            for _ in 0..ki {
                out = out.partial(i);
            }
        }
        Ok(out)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0f64, |m, c| m.max(c.max_abs()))
    }

    /// Every blade coefficient of every term is at most `tol` in size.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs_coeff() <= tol
    }

    /// Largest coefficient difference, term by term.
    pub fn max_diff(&self, o: &Self) -> f64 {
        (self - o).max_abs_coeff()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    /// Drops blade coefficients with |c| <= tol.
    pub fn chop(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.ctx, self.kind);
        for (e, c) in &self.terms {
            let mut c = c.clone();
            for b in 0..c.coeffs().len() {
                if c.coeff(b as u32).abs() <= tol {
                    c.set(b as u32, 0.0);
                }
            }
            out.add_term(e.clone(), &c);
        }
        out
    }

    fn require_kind(&self, kind: PolyKind, what: &str) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch(format!(
                "{what} needs a {kind:?} polynomial, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    /// r -> -r on a slice polynomial.
    pub fn reflect_r(&self) -> Result<Self> {
        self.require_kind(PolyKind::Slice, "reflection")?;
        let r = self.r_var();
        let mut out = Self::zero(self.ctx, self.kind);
        for (e, c) in &self.terms {
            let s = if e[r] % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(e.clone(), &c.scale(s));
        }
        Ok(out)
    }

    fn r_parity_part(&self, odd: bool) -> Result<Self> {
        self.require_kind(PolyKind::Slice, "parity split")?;
        let r = self.r_var();
        let mut out = Self::zero(self.ctx, self.kind);
        for (e, c) in &self.terms {
            if (e[r] % 2 == 1) == odd {
                out.add_term(e.clone(), c);
            }
        }
        Ok(out)
    }

    pub fn even_in_r(&self) -> Result<Self> {
        self.r_parity_part(false)
    }

    pub fn odd_in_r(&self) -> Result<Self> {
        self.r_parity_part(true)
    }

    /// Exact division by r; every term must carry a factor r.
    pub fn div_r(&self) -> Result<Self> {
        self.require_kind(PolyKind::Slice, "division by r")?;
        let r = self.r_var();
        let mut out = Self::zero(self.ctx, self.kind);
        for (e, c) in &self.terms {
            if e[r] == 0 {
                return Err(Error::Domain("polynomial is not divisible by r".into()));
            }
            let mut e = e.clone();
            e[r] -= 1;
            out.add_term(e, c);
        }
        Ok(out)
    }

    /// Full polynomial obtained from a slice polynomial even in r by
    /// r^{2m} -> |x_q|^{2m}.
    pub fn lift_even(&self) -> Result<Self> {
        self.require_kind(PolyKind::Slice, "lift")?;
        let ctx = self.ctx;
        let p = ctx.p();
        let r = self.r_var();
        let mut xq2 = Self::zero(ctx, PolyKind::Full);
        for i in p + 1..=ctx.n() {
            let mut e = vec![0; ctx.full_arity()];
            e[i] = 2;
            xq2.add_term(e, &Multivector::one(ctx.n()));
        }
        let mut powers: Vec<Self> = vec![Self::one(ctx, PolyKind::Full)];
        let mut out = Self::zero(ctx, PolyKind::Full);
        for (e, c) in &self.terms {
            if e[r] % 2 == 1 {
                return Err(Error::Domain("lift needs a polynomial even in r".into()));
            }
            let m = (e[r] / 2) as usize;
            while powers.len() <= m {
                let next = powers.last().expect("nonempty").mul(&xq2);
                powers.push(next);
            }
            for (eq, cq) in &powers[m].terms {
                let mut ef = eq.clone();
                ef[..=p].copy_from_slice(&e[..=p]);
                out.add_term(ef, &(c * cq));
            }
        }
        Ok(out)
    }

    /// Substitutes x_{p+i} = r ω_i, giving a slice polynomial.
    pub fn restrict_to_slice(&self, omega: &SliceUnit) -> Result<Self> {
        self.require_kind(PolyKind::Full, "restriction")?;
        self.ctx.check_unit(omega)?;
        let p = self.ctx.p();
        let w = omega.comps();
        let mut out = Self::zero(self.ctx, PolyKind::Slice);
        for (e, c) in &self.terms {
            let mut s = 1.0;
            let mut deg = 0;
            for (j, &k) in e[p + 1..].iter().enumerate() {
                s *= w[j].powi(k as i32);
                deg += k;
            }
            let mut es = e[..=p].to_vec();
            es.push(deg);
            out.add_term(es, &c.scale(s));
        }
        Ok(out)
    }

    /// `x_i -> x_i + b_i` for the first `b.len()` variables.
    pub fn translate(&self, b: &[f64]) -> Result<Self> {
        if b.len() > self.arity() {
            return Err(Error::Dimension("translation has too many entries".into()));
        }
        let mut out = Self::zero(self.ctx, self.kind);
        for (e, c) in &self.terms {
            // expand Π (x_i + b_i)^{k_i} by the binomial theorem
            let mut parts: Vec<(Vec<u32>, f64)> = vec![(e.clone(), 1.0)];
            for (i, &bi) in b.iter().enumerate() {
                let k = e[i];
                if k == 0 || bi == 0.0 {
                    continue;
                }
                let mut next = Vec::new();
                for (pe, pc) in &parts {
                    for j in 0..=k {
                        let mut ne = pe.clone();
                        ne[i] = j;
                        let coef = binomial(k, j) * bi.powi((k - j) as i32);
                        next.push((ne, pc * coef));
                    }
                }
                parts = next;
            }
            for (pe, pc) in parts {
                out.add_term(pe, &c.scale(pc));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| json!({"exps": e, "coeff": c.to_json()}))
            .collect();
        json!({
            "kind": self.kind,
            "p": self.ctx.p(),
            "q": self.ctx.q(),
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Term {
            exps: Vec<u32>,
            coeff: Value,
        }
        #[derive(Deserialize)]
        struct Raw {
            kind: PolyKind,
            p: usize,
            q: usize,
            terms: Vec<Term>,
        }
        let raw: Raw = serde_json::from_value(v.clone())?;
        let ctx = SliceContext::new(raw.p, raw.q)?;
        let mut out = Self::zero(ctx, raw.kind);
        for t in raw.terms {
            let c = Multivector::from_json(ctx.n(), &t.coeff)?;
            let m = Self::monomial(ctx, raw.kind, &t.exps, c)?;
            out = &out + &m;
        }
        Ok(out)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

impl fmt::Display for CliffordPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = (0..self.arity())
            .map(|i| match self.kind {
                PolyKind::Slice if i == self.ctx.p() + 1 => "r".to_string(),
                _ => format!("x{i}"),
            })
            .collect();
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(i, k)| {
                    if *k == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{k}", names[i])
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &CliffordPolynomial {
    type Output = CliffordPolynomial;
    fn add(self, o: &CliffordPolynomial) -> CliffordPolynomial {
        self.same_space(o);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub for &CliffordPolynomial {
    type Output = CliffordPolynomial;
    fn sub(self, o: &CliffordPolynomial) -> CliffordPolynomial {
        self.same_space(o);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl Neg for &CliffordPolynomial {
    type Output = CliffordPolynomial;
    fn neg(self) -> CliffordPolynomial {
        self.scale(-1.0)
    }
}

/// Differential operators acting on polynomial models.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// Σ_{i<=p} e_i ∂_i.
    DXp,
    /// Σ_{i>p} e_i ∂_i (full polynomials).
    DXq,
    /// Σ_i e_i ∂_i over all coordinates (full polynomials).
    DFull,
    /// D_{x_p} + ω ∂_r (slice polynomials).
    DOmega(SliceUnit),
    /// Σ (∂_i P) e_i + (∂_r P) ω (slice polynomials).
    DOmegaRight(SliceUnit),
    /// Σ_{i>p} x_i ∂_i.
    EulerQ,
    /// Spherical Dirac operator in the x_q variables.
    Gamma,
    /// |x_q|^2 D_{x_p} + x_q 𝔼_{x_q}.
    GGlobal,
    /// ∂_k over x_0..x_p.
    Partial(MultiIndex),
    /// ∂_k of the restriction to the slice of ω.
    SlicePartial(SliceUnit, MultiIndex),
    /// x_i ∂_j - x_j ∂_i (full polynomials).
    L(usize, usize),
}

/// `x_q = Σ_{i>p} x_i e_i` as a full polynomial.
pub fn xq_poly(ctx: SliceContext) -> CliffordPolynomial {
    let mut out = CliffordPolynomial::zero(ctx, PolyKind::Full);
    for i in ctx.p() + 1..=ctx.n() {
        let mut e = vec![0; ctx.full_arity()];
        e[i] = 1;
        out.add_term(e, &Multivector::basis(ctx.n(), i));
    }
    out
}

/// `|x_q|^2` as a full polynomial.
pub fn xq_norm_sq_poly(ctx: SliceContext) -> CliffordPolynomial {
    let mut out = CliffordPolynomial::zero(ctx, PolyKind::Full);
    for i in ctx.p() + 1..=ctx.n() {
        let mut e = vec![0; ctx.full_arity()];
        e[i] = 2;
        out.add_term(e, &Multivector::one(ctx.n()));
    }
    out
}

fn dirac_over(p: &CliffordPolynomial, vars: std::ops::RangeInclusive<usize>) -> CliffordPolynomial {
    let n = p.ctx().n();
    let mut out = CliffordPolynomial::zero(p.ctx(), p.kind());
    for i in vars {
        out = &out + &p.partial(i).left_mul(&Multivector::basis(n, i));
    }
    out
}

fn euler_q(p: &CliffordPolynomial) -> CliffordPolynomial {
    let ctx = p.ctx();
    let mut out = CliffordPolynomial::zero(ctx, PolyKind::Full);
    for (e, c) in p.terms() {
        let k: u32 = e[ctx.p() + 1..].iter().sum();
        if k > 0 {
            out.add_term(e.clone(), &c.scale(f64::from(k)));
        }
    }
    out
}

fn angular(p: &CliffordPolynomial, i: usize, j: usize) -> CliffordPolynomial {
    &p.partial(j).mul_var(i) - &p.partial(i).mul_var(j)
}

pub fn apply(op: &OperatorSpec, p: &CliffordPolynomial) -> Result<CliffordPolynomial> {
    let ctx = p.ctx();
    let n = ctx.n();
    let pp = ctx.p();
    use OperatorSpec::*;
    match op {
        DXp => Ok(dirac_over(p, 0..=pp)),
        DXq => {
            p.require_kind(PolyKind::Full, "D_xq")?;
            Ok(dirac_over(p, pp + 1..=n))
        }
        DFull => {
            p.require_kind(PolyKind::Full, "D_x")?;
            Ok(dirac_over(p, 0..=n))
        }
        DOmega(w) => {
            p.require_kind(PolyKind::Slice, "D_omega")?;
            ctx.check_unit(w)?;
            let r = p.partial(pp + 1).left_mul(&w.to_multivector());
            Ok(&dirac_over(p, 0..=pp) + &r)
        }
        DOmegaRight(w) => {
            p.require_kind(PolyKind::Slice, "right D_omega")?;
            ctx.check_unit(w)?;
            let mut out = p.partial(pp + 1).right_mul(&w.to_multivector());
            for i in 0..=pp {
                out = &out + &p.partial(i).right_mul(&Multivector::basis(n, i));
            }
            Ok(out)
        }
        EulerQ => {
            p.require_kind(PolyKind::Full, "Euler_q")?;
            Ok(euler_q(p))
        }
        Gamma => {
            p.require_kind(PolyKind::Full, "Gamma")?;
            let mut out = CliffordPolynomial::zero(ctx, PolyKind::Full);
            for i in pp + 1..=n {
                for j in i + 1..=n {
                    let eij = &Multivector::basis(n, i) * &Multivector::basis(n, j);
                    out = &out - &angular(p, i, j).left_mul(&eij);
                }
            }
            Ok(out)
        }
        GGlobal => {
            p.require_kind(PolyKind::Full, "G_x")?;
            let a = xq_norm_sq_poly(ctx).mul(&dirac_over(p, 0..=pp));
            let b = xq_poly(ctx).mul(&euler_q(p));
            Ok(&a + &b)
        }
        Partial(k) => p.partial_multi(k),
        SlicePartial(w, k) => match p.kind() {
            PolyKind::Full => p.restrict_to_slice(w)?.partial_multi(k),
            PolyKind::Slice => p.partial_multi(k),
        },
        L(i, j) => {
            p.require_kind(PolyKind::Full, "L_ij")?;
            if *i > n || *j > n {
                return Err(Error::IndexOutOfRange(format!("L({i},{j}) with n = {n}")));
            }
            Ok(angular(p, *i, *j))
        }
    }
}
