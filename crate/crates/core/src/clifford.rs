//! Dense arithmetic in the real Clifford algebra R_n, generators squaring to -1.
//!
//! Blades are n-bit sets: bit `i - 1` stands for `e_i`. The empty set is the
//! scalar blade.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::tolerances::ALGEBRA_CAP;

pub type Blade = u32;

/// `e_A e_B = sign * e_C`, `C = A xor B`.
pub fn blade_product(a: Blade, b: Blade) -> (f64, Blade) {
    // merge transpositions: pairs (i in a, j in b) with j < i
    let mut swaps = 0u32;
    let mut s = a >> 1;
    while s != 0 {
        swaps += (s & b).count_ones();
        s >>= 1;
    }
    // every shared index contracts to e_i^2 = -1
    swaps += (a & b).count_ones();
    (if swaps & 1 == 0 { 1.0 } else { -1.0 }, a ^ b)
}

pub fn grade(b: Blade) -> u32 {
    b.count_ones()
}

/// Ascending 1-based generator indices of a blade.
pub fn blade_indices(b: Blade) -> Vec<usize> {
    (0..32).filter(|i| b >> i & 1 == 1).map(|i| i + 1).collect()
}

fn conj_sign(k: u32) -> f64 {
    // (-1)^{k(k+1)/2}
    if (k * (k + 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn rev_sign(k: u32) -> f64 {
    if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Number of generators of the algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraSignature {
    n: usize,
}

impl AlgebraSignature {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > ALGEBRA_CAP {
            return Err(Error::Dimension(format!(
                "algebra dimension {n} outside 1..={ALGEBRA_CAP}"
            )));
        }
        Ok(AlgebraSignature { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blade_count(&self) -> usize {
        1 << self.n
    }
}

/// Element of R_n stored as 2^n dense coefficients indexed by blade.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    n: usize,
    c: Vec<f64>,
}

impl Multivector {
    /// Zero of R_n. Panics when `n` exceeds the cap; use [`AlgebraSignature::new`]
    /// to validate untrusted dimensions first.
    pub fn zero(n: usize) -> Self {
        assert!(n <= ALGEBRA_CAP, "algebra dimension {n} exceeds cap");
        Multivector {
            n,
            c: vec![0.0; 1 << n],
        }
    }

    pub fn with_signature(sig: AlgebraSignature) -> Self {
        Self::zero(sig.n())
    }

    pub fn scalar(n: usize, s: f64) -> Self {
        let mut m = Self::zero(n);
        m.c[0] = s;
        m
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// `e_i`, with `e_0 = 1`.
    pub fn basis(n: usize, i: usize) -> Self {
        assert!(i <= n, "generator e{i} outside R_{n}");
        if i == 0 {
            Self::one(n)
        } else {
            Self::blade(n, 1 << (i - 1), 1.0)
        }
    }

    pub fn blade(n: usize, b: Blade, coeff: f64) -> Self {
        let mut m = Self::zero(n);
        m.c[b as usize] = coeff;
        m
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        AlgebraSignature::new(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "expected {} coefficients, got {}",
                1usize << n,
                coeffs.len()
            )));
        }
        Ok(Multivector { n, c: coeffs })
    }

    /// `x_0 + x_1 e_1 + ... + x_n e_n`.
    pub fn from_paravector(n: usize, x: &[f64]) -> Self {
        assert!(x.len() <= n + 1);
        let mut m = Self::zero(n);
        for (i, &v) in x.iter().enumerate() {
            if i == 0 {
                m.c[0] = v;
            } else {
                m.c[1 << (i - 1)] = v;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn signature(&self) -> AlgebraSignature {
        AlgebraSignature { n: self.n }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn coeff(&self, b: Blade) -> f64 {
        self.c[b as usize]
    }

    pub fn set(&mut self, b: Blade, v: f64) {
        self.c[b as usize] = v;
    }

    pub fn add_to(&mut self, b: Blade, v: f64) {
        self.c[b as usize] += v;
    }

    pub fn scalar_part(&self) -> f64 {
        self.c[0]
    }

    /// Coefficient of `e_i` (`i = 0` is the scalar part).
    pub fn vector_coeff(&self, i: usize) -> f64 {
        if i == 0 {
            self.c[0]
        } else {
            self.c[1 << (i - 1)]
        }
    }

    pub fn grade_part(&self, k: u32) -> Self {
        let mut m = Self::zero(self.n);
        for (b, &v) in self.c.iter().enumerate() {
            if grade(b as Blade) == k {
                m.c[b] = v;
            }
        }
        m
    }

    fn map_by_grade(&self, f: impl Fn(u32) -> f64) -> Self {
        Multivector {
            n: self.n,
            c: self
                .c
                .iter()
                .enumerate()
                .map(|(b, &v)| v * f(grade(b as Blade)))
                .collect(),
        }
    }

    /// Clifford conjugation: grade k picks up (-1)^{k(k+1)/2}.
    pub fn conjugate(&self) -> Self {
        self.map_by_grade(conj_sign)
    }

    /// Reversion: grade k picks up (-1)^{k(k-1)/2}.
    pub fn reverse(&self) -> Self {
        self.map_by_grade(rev_sign)
    }

    pub fn grade_involution(&self) -> Self {
        self.map_by_grade(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.c.iter().all(|v| v.abs() <= tol)
    }

    /// Max blade-wise difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "signature mismatch");
        self.c
            .iter()
            .zip(&other.c)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (self - other).norm()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n && self.max_diff(other) <= tol
    }

    pub fn is_scalar(&self, tol: f64) -> bool {
        self.c[1..].iter().all(|v| v.abs() <= tol)
    }

    /// Every blade of grade >= 2 is within `tol` of zero.
    pub fn is_paravector(&self, tol: f64) -> bool {
        self.c
            .iter()
            .enumerate()
            .all(|(b, v)| grade(b as Blade) <= 1 || v.abs() <= tol)
    }

    pub fn scale(&self, s: f64) -> Self {
        Multivector {
            n: self.n,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    /// Geometric product with a signature check.
    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "geometric product of R_{} and R_{} elements",
                self.n, other.n
            )));
        }
        Ok(self.gp(other))
    }

    fn gp(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "signature mismatch");
        let rhs: Vec<(Blade, f64)> = other
            .c
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(b, v)| (b as Blade, *v))
            .collect();
        let mut out = vec![0.0; self.c.len()];
        for (a, &x) in self.c.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for &(b, y) in &rhs {
                let (s, k) = blade_product(a as Blade, b);
                out[k as usize] += s * x * y;
            }
        }
        Multivector { n: self.n, c: out }
    }

    /// Inverse of a Clifford-group element: conj(g) / [g conj(g)]_0, after
    /// checking that g conj(g) is a nonzero scalar.
    pub fn group_inverse(&self) -> Result<Self> {
        let c = self.conjugate();
        let gc = self.gp(&c);
        let s = gc.scalar_part();
        let scale = self.norm_sq().max(f64::MIN_POSITIVE);
        if s.abs() <= 1e-300 || !gc.is_scalar(1e-12 * scale) {
            return Err(Error::Singularity(format!(
                "{self} has no Clifford-group inverse"
            )));
        }
        Ok(c.scale(1.0 / s))
    }

    /// Nonzero blades ordered by grade, then lexicographically by indices.
    pub fn terms(&self) -> Vec<(Blade, f64)> {
        let mut t: Vec<(Blade, f64)> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(b, v)| (b as Blade, *v))
            .collect();
        t.sort_by(|a, b| {
            grade(a.0)
                .cmp(&grade(b.0))
                .then_with(|| blade_indices(a.0).cmp(&blade_indices(b.0)))
        });
        t
    }

    /// Text form, e.g. `2 + 6*e2 - 3*e12`.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        AlgebraSignature::new(n)?;
        parse_text(n, s)
    }

    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (b, v) in self.terms() {
            map.insert(blade_key(b), serde_json::json!(v));
        }
        Value::Object(map)
    }

    pub fn from_json(n: usize, v: &Value) -> Result<Self> {
        AlgebraSignature::new(n)?;
        match v {
            Value::Number(x) => Ok(Self::scalar(n, x.as_f64().unwrap_or(0.0))),
            Value::String(s) => parse_text(n, s),
            Value::Object(map) => {
                let mut m = Self::zero(n);
                for (k, val) in map {
                    let x = val
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("blade {k:?}: not a number")))?;
                    let (s, b) = parse_blade_key(n, k)?;
                    m.c[b as usize] += s * x;
                }
                Ok(m)
            }
            _ => Err(Error::Parse("multivector must be an object, number or string".into())),
        }
    }
}

/// JSON key of a blade: `""`, `"12"`, or `"1,10"` once an index reaches 10.
pub fn blade_key(b: Blade) -> String {
    let idx = blade_indices(b);
    if idx.iter().any(|&i| i >= 10) {
        idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
    } else {
        idx.iter().map(|i| i.to_string()).collect()
    }
}

fn blade_from_indices(n: usize, idx: &[usize]) -> Result<(f64, Blade)> {
    let mut sign = 1.0;
    let mut b: Blade = 0;
    for &i in idx {
        if i == 0 {
            continue;
        }
        if i > n {
            return Err(Error::IndexOutOfRange(format!("e{i} in R_{n}")));
        }
        let (s, c) = blade_product(b, 1 << (i - 1));
        sign *= s;
        b = c;
    }
    Ok((sign, b))
}

fn parse_index_csv(n: usize, body: &str) -> Result<(f64, Blade)> {
    let idx: Vec<usize> = body
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad blade index {t:?}")))
        })
        .collect::<Result<_>>()?;
    blade_from_indices(n, &idx)
}

fn parse_index_list(n: usize, body: &str) -> Result<(f64, Blade)> {
    if body.contains(',') {
        return parse_index_csv(n, body);
    }
    let idx: Vec<usize> = {
        body.chars()
            .map(|ch| {
                ch.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::Parse(format!("bad blade index {ch:?}")))
            })
            .collect::<Result<_>>()?
    };
    blade_from_indices(n, &idx)
}

fn parse_blade_key(n: usize, key: &str) -> Result<(f64, Blade)> {
    let k = key.trim();
    let k = k.strip_prefix('e').unwrap_or(k);
    let k = k.trim_start_matches('{').trim_end_matches('}');
    parse_index_list(n, k)
}

fn fmt_coeff(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn fmt_blade(b: Blade) -> String {
    let idx = blade_indices(b);
    if idx.iter().any(|&i| i >= 10) {
        format!("e{{{}}}", blade_key(b))
    } else {
        format!("e{}", blade_key(b))
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, v)) in terms.iter().enumerate() {
            let body = if *b == 0 {
                fmt_coeff(v.abs())
            } else {
                format!("{}*{}", fmt_coeff(v.abs()), fmt_blade(*b))
            };
            let neg = v.is_sign_negative();
            match (i, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Multivector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self.terms();
        let mut map = serializer.serialize_map(Some(terms.len()))?;
        for (b, v) in terms {
            map.serialize_entry(&blade_key(b), &v)?;
        }
        map.end()
    }
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Lexer<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let after = self.s.get(self.pos + 1).copied();
            let after2 = self.s.get(self.pos + 2).copied();
            let is_exp = matches!(after, Some(c) if c.is_ascii_digit())
                || (matches!(after, Some(b'+' | b'-'))
                    && matches!(after2, Some(c) if c.is_ascii_digit()));
            if is_exp {
                self.pos += 2;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        text.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number {text:?} at offset {start}")))
    }

    fn blade(&mut self, n: usize) -> Result<(f64, Blade)> {
        if self.peek() != Some(b'e') {
            return Err(Error::Parse(format!("expected blade at offset {}", self.pos)));
        }
        self.pos += 1;
        if self.peek() == Some(b'{') {
            let start = self.pos + 1;
            while self.peek().is_some_and(|c| c != b'}') {
                self.pos += 1;
            }
            if self.peek() != Some(b'}') {
                return Err(Error::Parse("unterminated blade braces".into()));
            }
            let body = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
            self.pos += 1;
            return parse_index_csv(n, body);
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("blade without indices at offset {start}")));
        }
        let body = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        parse_index_list(n, body)
    }
}

fn parse_text(n: usize, s: &str) -> Result<Multivector> {
    let mut lx = Lexer {
        s: s.as_bytes(),
        pos: 0,
    };
    let mut out = Multivector::zero(n);
    let mut first = true;
    loop {
        lx.skip_ws();
        let Some(c) = lx.peek() else { break };
        let mut sign = 1.0;
        if c == b'+' || c == b'-' {
            if c == b'-' {
                sign = -1.0;
            }
            lx.pos += 1;
            lx.skip_ws();
        } else if !first {
            return Err(Error::Parse(format!("expected '+' or '-' at offset {}", lx.pos)));
        }
        let (coeff, (bs, b)) = if lx.peek() == Some(b'e') {
            (1.0, lx.blade(n)?)
        } else {
            let v = lx.number()?;
            lx.skip_ws();
            if lx.peek() == Some(b'*') {
                lx.pos += 1;
                lx.skip_ws();
                (v, lx.blade(n)?)
            } else {
                (v, (1.0, 0))
            }
        };
        out.c[b as usize] += sign * bs * coeff;
        first = false;
    }
    if first {
        return Err(Error::Parse("empty multivector".into()));
    }
    Ok(out)
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(mut self) -> Multivector {
        self.c.iter_mut().for_each(|v| *v = -*v);
        self
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        assert_eq!(self.n, rhs.n, "signature mismatch");
        self.c.iter_mut().zip(&rhs.c).for_each(|(a, b)| *a += b);
    }
}

impl SubAssign<&Multivector> for Multivector {
    fn sub_assign(&mut self, rhs: &Multivector) {
        assert_eq!(self.n, rhs.n, "signature mismatch");
        self.c.iter_mut().zip(&rhs.c).for_each(|(a, b)| *a -= b);
    }
}

impl AddAssign<Multivector> for Multivector {
    fn add_assign(&mut self, rhs: Multivector) {
        *self += &rhs;
    }
}

impl SubAssign<Multivector> for Multivector {
    fn sub_assign(&mut self, rhs: Multivector) {
        *self -= &rhs;
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Multivector> for &Multivector {
            type Output = Multivector;
            fn $m(self, rhs: &Multivector) -> Multivector {
                let f: fn(&Multivector, &Multivector) -> Multivector = $body;
                f(self, rhs)
            }
        }
        impl $tr<Multivector> for Multivector {
            type Output = Multivector;
            fn $m(self, rhs: Multivector) -> Multivector {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Multivector> for Multivector {
            type Output = Multivector;
            fn $m(self, rhs: &Multivector) -> Multivector {
                (&self).$m(rhs)
            }
        }
        impl $tr<Multivector> for &Multivector {
            type Output = Multivector;
            fn $m(self, rhs: Multivector) -> Multivector {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let mut o = a.clone();
    o += b;
    o
});
binop!(Sub, sub, |a, b| {
    let mut o = a.clone();
    o -= b;
    o
});
binop!(Mul, mul, |a, b| a.gp(b));

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, s: f64) -> Multivector {
        self.scale(s)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(self, s: f64) -> Multivector {
        self.scale(s)
    }
}

/// A point of R^{n+1}: grade-0 plus grade-1 part of R_n.
#[derive(Debug, Clone, PartialEq)]
pub struct Paravector {
    x: Vec<f64>,
}

impl Paravector {
    /// Coordinates `(x_0, ..., x_n)`, `n >= 1`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 || coords.len() > ALGEBRA_CAP + 1 {
            return Err(Error::Dimension(format!(
                "paravector needs 2..={} coordinates, got {}",
                ALGEBRA_CAP + 1,
                coords.len()
            )));
        }
        Ok(Paravector { x: coords })
    }

    pub fn zero(n: usize) -> Self {
        Paravector { x: vec![0.0; n + 1] }
    }

    pub fn from_multivector(m: &Multivector, tol: f64) -> Result<Self> {
        if !m.is_paravector(tol) {
            return Err(Error::Domain(format!("{m} is not a paravector")));
        }
        Ok(Paravector {
            x: (0..=m.n()).map(|i| m.vector_coeff(i)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.x.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.x
    }

    pub fn to_multivector(&self) -> Multivector {
        Multivector::from_paravector(self.n(), &self.x)
    }

    pub fn norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn conjugate(&self) -> Self {
        let mut x = self.x.clone();
        x[1..].iter_mut().for_each(|v| *v = -*v);
        Paravector { x }
    }

    /// `conj(x) / |x|^2`.
    pub fn inverse(&self) -> Result<Self> {
        let n2 = self.norm_sq();
        if n2 == 0.0 {
            return Err(Error::Singularity("inverse of the zero paravector".into()));
        }
        Ok(Paravector {
            x: self.conjugate().x.iter().map(|v| v / n2).collect(),
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Paravector {
            x: self.x.iter().zip(&o.x).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Paravector {
            x: self.x.iter().zip(&o.x).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Paravector {
            x: self.x.iter().map(|v| v * s).collect(),
        }
    }
}
