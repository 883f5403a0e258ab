//! Fueter variables and polynomials, their derivative identities, Taylor
//! coefficients and the CK-extension.
//!
//! Normalization: `P_k = (1/|k|!) Σ` over all `|k|!` orderings (with
//! multiplicity) of the multiset `{z_0^{k_0}, ..., z_p^{k_p}}`, i.e.
//! `|k| P_k = Σ_i k_i P_{k-ε_i} z_i`. With it `a_k = ∂_k f(0)/k!` and
//! `CK[x^k] = P_k`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::poly::{apply, CliffordPolynomial, MultiIndex, OperatorSpec, PolyKind};
use crate::slice::{decompose, Point, SliceContext, SliceUnit};
use crate::stem::StemPolynomial;
use crate::tolerances::FUETER_DEGREE_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `x_l + r (η e_l)` (left) or `x_l + r (e_l η)` (right), with `e_0 = 1`.
pub fn fueter_variable(
    ctx: SliceContext,
    l: usize,
    eta: &SliceUnit,
    side: Side,
) -> Result<CliffordPolynomial> {
    if l > ctx.p() {
        return Err(Error::IndexOutOfRange(format!(
            "Fueter variable z_{l} with p = {}",
            ctx.p()
        )));
    }
    ctx.check_unit(eta)?;
    let el = Multivector::basis(ctx.n(), l);
    let w = eta.to_multivector();
    let c = match side {
        Side::Left => &w * &el,
        Side::Right => &el * &w,
    };
    let mut e = vec![0; ctx.slice_arity()];
    e[ctx.p() + 1] = 1;
    let mut z = CliffordPolynomial::var(ctx, PolyKind::Slice, l);
    z.add_term(e, &c);
    Ok(z)
}

/// Left and right combination of two slice values:
/// left `½(1-ωη)a + ½(1+ωη)b`, right `½a(1-ηω) + ½b(1+ηω)`.
/// Without ω (a point of R^{p+1}) the two values coincide and `a` is returned.
pub fn slice_combine(
    omega: Option<&SliceUnit>,
    eta: &SliceUnit,
    plus: &Multivector,
    minus: &Multivector,
    side: Side,
) -> Multivector {
    let Some(w) = omega else {
        return plus.clone();
    };
    let n = plus.n();
    let one = Multivector::one(n);
    let (wm, em) = (w.to_multivector(), eta.to_multivector());
    match side {
        Side::Left => {
            let we = &wm * &em;
            (&(&one - &we) * plus + &(&one + &we) * minus).scale(0.5)
        }
        Side::Right => {
            let ew = &em * &wm;
            (plus * &(&one - &ew) + minus * &(&one + &ew)).scale(0.5)
        }
    }
}

#[derive(Debug, Clone)]
pub struct FueterBasisElement {
    pub k: MultiIndex,
    pub eta: SliceUnit,
    pub side: Side,
    pub poly: Arc<CliffordPolynomial>,
}

/// Memoized `P_{η,k}` for one (η, side). Reads share a lock; each new entry
/// is inserted under a short write lock.
#[derive(Debug)]
pub struct FueterTable {
    ctx: SliceContext,
    eta: SliceUnit,
    side: Side,
    cap: u32,
    z: Vec<CliffordPolynomial>,
    cache: RwLock<HashMap<MultiIndex, Arc<CliffordPolynomial>>>,
}

impl FueterTable {
    pub fn new(ctx: SliceContext, eta: &SliceUnit, side: Side) -> Result<Self> {
        Self::with_cap(ctx, eta, side, FUETER_DEGREE_CAP)
    }

    pub fn with_cap(ctx: SliceContext, eta: &SliceUnit, side: Side, cap: u32) -> Result<Self> {
        ctx.check_unit(eta)?;
        let z = (0..=ctx.p())
            .map(|l| fueter_variable(ctx, l, eta, side))
            .collect::<Result<Vec<_>>>()?;
        Ok(FueterTable {
            ctx,
            eta: eta.clone(),
            side,
            cap,
            z,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn ctx(&self) -> SliceContext {
        self.ctx
    }

    pub fn eta(&self) -> &SliceUnit {
        &self.eta
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn check_index(&self, k: &MultiIndex) -> Result<()> {
        if k.len() != self.ctx.p() + 1 {
            return Err(Error::Dimension(format!(
                "multi-index {k} needs {} entries",
                self.ctx.p() + 1
            )));
        }
        if k.order() > self.cap {
            return Err(Error::DegreeCap {
                degree: k.order(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Slice polynomial `P_{η,k}` in (x_0..x_p, r).
    pub fn get(&self, k: &MultiIndex) -> Result<Arc<CliffordPolynomial>> {
        self.check_index(k)?;
        if let Some(p) = self.cache.read().expect("poisoned cache").get(k) {
            return Ok(p.clone());
        }
        let poly = if k.order() == 0 {
            CliffordPolynomial::one(self.ctx, PolyKind::Slice)
        } else {
            let mut acc = CliffordPolynomial::zero(self.ctx, PolyKind::Slice);
            for i in 0..k.len() {
                let Some(prev) = k.minus(i) else { continue };
                let prev = self.get(&prev)?;
                let term = match self.side {
                    Side::Left => prev.mul(&self.z[i]),
                    Side::Right => self.z[i].mul(&prev),
                };
                acc = &acc + &term.scale(f64::from(k.get(i)));
            }
            acc.scale(1.0 / f64::from(k.order()))
        };
        let poly = Arc::new(poly);
        self.cache
            .write()
            .expect("poisoned cache")
            .entry(k.clone())
            .or_insert_with(|| poly.clone());
        Ok(poly)
    }

    pub fn element(&self, k: &MultiIndex) -> Result<FueterBasisElement> {
        Ok(FueterBasisElement {
            k: k.clone(),
            eta: self.eta.clone(),
            side: self.side,
            poly: self.get(k)?,
        })
    }

    /// `∂_{x_j} P_k - k_j P_{k-ε_j}`; identically zero.
    pub fn derivative_identity_residual(&self, k: &MultiIndex, j: usize) -> Result<CliffordPolynomial> {
        if j > self.ctx.p() {
            return Err(Error::IndexOutOfRange(format!("x_{j} with p = {}", self.ctx.p())));
        }
        let d = self.get(k)?.partial(j);
        Ok(match k.minus(j) {
            Some(prev) => &d - &self.get(&prev)?.scale(f64::from(k.get(j))),
            None => d,
        })
    }

    /// `∂_r P_k - Σ_j k_j (η e_j) P_{k-ε_j}` (left), mirrored on the right.
    pub fn radial_identity_residual(&self, k: &MultiIndex) -> Result<CliffordPolynomial> {
        let n = self.ctx.n();
        let w = self.eta.to_multivector();
        let mut out = self.get(k)?.partial(self.ctx.p() + 1);
        for j in 0..k.len() {
            let Some(prev) = k.minus(j) else { continue };
            let prev = self.get(&prev)?;
            let ej = Multivector::basis(n, j);
            let term = match self.side {
                Side::Left => prev.left_mul(&(&w * &ej)),
                Side::Right => prev.right_mul(&(&ej * &w)),
            };
            out = &out - &term.scale(f64::from(k.get(j)));
        }
        Ok(out)
    }

    /// Value of the full `P_k` at a point of R^{p+q+1}.
    pub fn evaluate_full(&self, k: &MultiIndex, x: &Point) -> Result<Multivector> {
        let d = decompose(self.ctx, x)?;
        let pk = self.get(k)?;
        let plus = pk.evaluate(&d.slice_coords())?;
        if d.omega.is_none() {
            return Ok(plus);
        }
        let minus = pk.evaluate(&d.reflected_coords())?;
        Ok(slice_combine(d.omega.as_ref(), &self.eta, &plus, &minus, self.side))
    }
}

pub fn fueter_polynomial(
    ctx: SliceContext,
    k: &MultiIndex,
    eta: &SliceUnit,
    side: Side,
) -> Result<FueterBasisElement> {
    let cap = k.order().max(FUETER_DEGREE_CAP);
    FueterTable::with_cap(ctx, eta, side, cap)?.element(k)
}

/// `∂_{x_j} P_k - k_j P_{k-ε_j}` for the default slice direction.
pub fn fueter_derivative_identity_check(
    ctx: SliceContext,
    k: &MultiIndex,
    j: usize,
) -> Result<CliffordPolynomial> {
    let cap = k.order().max(FUETER_DEGREE_CAP);
    FueterTable::with_cap(ctx, &ctx.default_eta(), Side::Left, cap)?.derivative_identity_residual(k, j)
}

/// Full `P_k(x)` via the default direction e_{p+1}.
pub fn full_fueter_evaluate(
    ctx: SliceContext,
    k: &MultiIndex,
    x: &Point,
    side: Side,
) -> Result<Multivector> {
    let cap = k.order().max(FUETER_DEGREE_CAP);
    FueterTable::with_cap(ctx, &ctx.default_eta(), side, cap)?.evaluate_full(k, x)
}

/// `a_k = ∂_k f(0) / k!` for every |k| <= max_degree with a nonzero value.
///
/// For a polynomial this is the coefficient of `x_0^{k_0}...x_p^{k_p}` with
/// no r (slice) or x_q (full) factor.
pub fn taylor_coefficients(
    f: &CliffordPolynomial,
    max_degree: u32,
) -> BTreeMap<MultiIndex, Multivector> {
    let p = f.ctx().p();
    let mut out = BTreeMap::new();
    for (e, c) in f.terms() {
        if e[p + 1..].iter().any(|&k| k != 0) {
            continue;
        }
        let k = MultiIndex::new(e[..=p].to_vec());
        if k.order() <= max_degree {
            out.insert(k, c.clone());
        }
    }
    out
}

/// `Σ_k P_{η,k} a_k` as a slice polynomial.
pub fn taylor_reconstruct(
    table: &FueterTable,
    coeffs: &BTreeMap<MultiIndex, Multivector>,
) -> Result<CliffordPolynomial> {
    let mut out = CliffordPolynomial::zero(table.ctx(), PolyKind::Slice);
    for (k, a) in coeffs {
        out = &out + &table.get(k)?.right_mul(a);
    }
    Ok(out)
}

/// `CK[f0] = Σ_k r^k/k! (ω D_{x_p})^k f0`, returned as its stem.
///
/// Since `(ω D)^2 = -Δ` on functions of x_p,
/// `F1 = Σ_m (-1)^m r^{2m}/(2m)! Δ^m f0` and
/// `F2 = Σ_m (-1)^m r^{2m+1}/(2m+1)! D Δ^m f0`.
pub fn ck_extension(f0: &CliffordPolynomial) -> Result<StemPolynomial> {
    let ctx = f0.ctx();
    let p = ctx.p();
    let base = match f0.kind() {
        PolyKind::Slice => {
            if f0.terms().any(|(e, _)| e[p + 1] != 0) {
                return Err(Error::Domain("CK input must not depend on r".into()));
            }
            f0.clone()
        }
        PolyKind::Full => {
            let mut s = CliffordPolynomial::zero(ctx, PolyKind::Slice);
            for (e, c) in f0.terms() {
                if e[p + 1..].iter().any(|&k| k != 0) {
                    return Err(Error::Domain("CK input must depend on x_0..x_p only".into()));
                }
                let mut es = e[..=p].to_vec();
                es.push(0);
                s.add_term(es, c);
            }
            s
        }
    };
    let r = p + 1;
    let mut f1 = CliffordPolynomial::zero(ctx, PolyKind::Slice);
    let mut f2 = CliffordPolynomial::zero(ctx, PolyKind::Slice);
    let mut lap = base;
    let mut m = 0u32;
    while !lap.is_empty() {
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut even = lap.scale(sign / crate::poly::factorial(2 * m));
        let mut odd = apply(&OperatorSpec::DXp, &lap)?.scale(sign / crate::poly::factorial(2 * m + 1));
        for _ in 0..2 * m {
            even = even.mul_var(r);
            odd = odd.mul_var(r);
        }
        f1 = &f1 + &even;
        f2 = &f2 + &odd.mul_var(r);
        let mut next = CliffordPolynomial::zero(ctx, PolyKind::Slice);
        for i in 0..=p {
            next = &next + &lap.partial(i).partial(i);
        }
        lap = next;
        m += 1;
    }
    StemPolynomial::new(f1, f2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::POLY_ZERO;

    fn ctx(p: usize, q: usize) -> SliceContext {
        SliceContext::new(p, q).unwrap()
    }

    fn mv(n: usize, s: &str) -> Multivector {
        Multivector::parse(n, s).unwrap()
    }

    fn k(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    /// All orderings of the multiset, multiplied out and averaged.
    fn permutation_sum(c: SliceContext, kk: &MultiIndex, eta: &SliceUnit, side: Side) -> CliffordPolynomial {
        let mut word = Vec::new();
        for (i, &ki) in kk.as_slice().iter().enumerate() {
            word.extend(std::iter::repeat_n(i, ki as usize));
        }
        let z: Vec<_> = (0..=c.p()).map(|l| fueter_variable(c, l, eta, side).unwrap()).collect();
        let mut total = CliffordPolynomial::zero(c, PolyKind::Slice);
        let mut count = 0.0;
        fn perms(w: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
            if i == w.len() {
                out.push(w.clone());
                return;
            }
            for j in i..w.len() {
                w.swap(i, j);
                perms(w, i + 1, out);
                w.swap(i, j);
            }
        }
        let mut all = Vec::new();
        perms(&mut word, 0, &mut all);
        for w in all {
            let mut prod = CliffordPolynomial::one(c, PolyKind::Slice);
            for l in w {
                prod = prod.mul(&z[l]);
            }
            total = &total + &prod;
            count += 1.0;
        }
        total.scale(1.0 / count)
    }

    #[test]
    fn variable_examples() {
        let c = ctx(1, 2);
        let e2 = SliceUnit::basis(c, 1).unwrap();
        let z0 = fueter_variable(c, 0, &e2, Side::Left).unwrap();
        assert_eq!(z0.evaluate(&[1.0, 0.0, 2.0]).unwrap(), mv(3, "1 + 2*e2"));
        let z1 = fueter_variable(c, 1, &e2, Side::Left).unwrap();
        assert_eq!(z1.evaluate(&[0.0, 1.0, 1.0]).unwrap(), mv(3, "1 + e21"));
        let z1r = fueter_variable(c, 1, &e2, Side::Right).unwrap();
        assert_eq!(z1r.evaluate(&[0.0, 1.0, 1.0]).unwrap(), mv(3, "1 + e12"));
        assert!(fueter_variable(c, 2, &e2, Side::Left).is_err());
    }

    #[test]
    fn polynomial_examples() {
        let c = ctx(1, 2);
        let e2 = SliceUnit::basis(c, 1).unwrap();
        let p0 = fueter_polynomial(c, &k(&[0, 0]), &e2, Side::Left).unwrap();
        assert_eq!(*p0.poly, CliffordPolynomial::one(c, PolyKind::Slice));
        let p11 = fueter_polynomial(c, &k(&[1, 1]), &e2, Side::Left).unwrap();
        assert_eq!(p11.poly.evaluate(&[1.0, 2.0, 3.0]).unwrap(), mv(3, "2 + 6*e2 - 3*e12"));

        let c0 = ctx(0, 1);
        let e1 = c0.default_eta();
        let p2 = fueter_polynomial(c0, &k(&[2]), &e1, Side::Left).unwrap();
        let mut expect = CliffordPolynomial::zero(c0, PolyKind::Slice);
        expect.add_term(vec![2, 0], &mv(1, "1"));
        expect.add_term(vec![0, 2], &mv(1, "-1"));
        expect.add_term(vec![1, 1], &mv(1, "2*e1"));
        assert_eq!(*p2.poly, expect);
    }

    #[test]
    fn recursion_matches_permutation_sum() {
        let c = ctx(2, 2);
        let eta = SliceUnit::normalized(c, &[1.0, -2.0]).unwrap();
        for side in [Side::Left, Side::Right] {
            let t = FueterTable::new(c, &eta, side).unwrap();
            for kk in MultiIndex::all_up_to(3, 4) {
                let oracle = permutation_sum(c, &kk, &eta, side);
                assert!(t.get(&kk).unwrap().max_diff(&oracle) < 1e-13, "{kk} {side:?}");
            }
        }
    }

    #[test]
    fn monogenic_and_identities() {
        let c = ctx(2, 3);
        let eta = SliceUnit::normalized(c, &[0.3, -1.0, 2.0]).unwrap();
        let l = FueterTable::new(c, &eta, Side::Left).unwrap();
        let r = FueterTable::new(c, &eta, Side::Right).unwrap();
        for kk in MultiIndex::all_up_to(3, 4) {
            let pl = l.get(&kk).unwrap();
            assert!(pl.is_homogeneous(kk.order()));
            assert!(apply(&OperatorSpec::DOmega(eta.clone()), &pl).unwrap().is_zero(POLY_ZERO));
            let pr = r.get(&kk).unwrap();
            assert!(apply(&OperatorSpec::DOmegaRight(eta.clone()), &pr).unwrap().is_zero(POLY_ZERO));
            for j in 0..3 {
                assert!(l.derivative_identity_residual(&kk, j).unwrap().is_zero(POLY_ZERO));
                assert!(r.derivative_identity_residual(&kk, j).unwrap().is_zero(POLY_ZERO));
            }
            assert!(l.radial_identity_residual(&kk).unwrap().is_zero(POLY_ZERO));
            assert!(r.radial_identity_residual(&kk).unwrap().is_zero(POLY_ZERO));
        }
    }

    #[test]
    fn derivative_identity_examples() {
        let c0 = ctx(0, 1);
        assert!(fueter_derivative_identity_check(c0, &k(&[2]), 0).unwrap().is_empty());
        assert!(fueter_derivative_identity_check(c0, &k(&[0]), 0).unwrap().is_empty());
        let c = ctx(1, 2);
        assert!(fueter_derivative_identity_check(c, &k(&[1, 1]), 1).unwrap().is_empty());
    }

    #[test]
    fn full_evaluation_examples() {
        let c = ctx(1, 2);
        let x = c.point(&[1.0, 2.0, 3.0, 0.0]).unwrap();
        let v = full_fueter_evaluate(c, &k(&[1, 1]), &x, Side::Left).unwrap();
        assert!(v.approx_eq(&mv(3, "2 + 6*e2 - 3*e12"), 1e-14));
        let x = c.point(&[1.0, 2.0, 0.0, 0.0]).unwrap();
        let v = full_fueter_evaluate(c, &k(&[1, 1]), &x, Side::Left).unwrap();
        assert_eq!(v, mv(3, "2"));

        let t2 = FueterTable::new(c, &SliceUnit::basis(c, 1).unwrap(), Side::Left).unwrap();
        let t3 = FueterTable::new(c, &SliceUnit::basis(c, 2).unwrap(), Side::Left).unwrap();
        for (i, kk) in MultiIndex::all_up_to(2, 3).iter().enumerate() {
            let f = i as f64;
            let x = c.point(&[0.3 - 0.1 * f, 0.2 * f, -0.5 + 0.07 * f, 0.4]).unwrap();
            let a = t2.evaluate_full(kk, &x).unwrap();
            let b = t3.evaluate_full(kk, &x).unwrap();
            assert!(a.approx_eq(&b, 1e-12), "{kk}");
        }
    }

    #[test]
    fn taylor_examples() {
        let c0 = ctx(0, 1);
        let t = FueterTable::new(c0, &c0.default_eta(), Side::Left).unwrap();
        let z2 = t.get(&k(&[2])).unwrap();
        let a = taylor_coefficients(&z2, 8);
        assert_eq!(a.len(), 1);
        assert_eq!(a[&k(&[2])], mv(1, "1"));
        assert_eq!(taylor_reconstruct(&t, &a).unwrap(), *z2);

        let one = CliffordPolynomial::one(c0, PolyKind::Slice);
        let a = taylor_coefficients(&one, 8);
        assert_eq!(a.len(), 1);
        assert_eq!(a[&k(&[0])], mv(1, "1"));

        let c = ctx(1, 2);
        let t = FueterTable::new(c, &c.default_eta(), Side::Left).unwrap();
        let a = taylor_coefficients(&t.get(&k(&[1, 1])).unwrap(), 8);
        assert_eq!(a.len(), 1);
        assert_eq!(a[&k(&[1, 1])], mv(3, "1"));
    }

    #[test]
    fn ck_examples() {
        let c0 = ctx(0, 2);
        let x0 = CliffordPolynomial::var(c0, PolyKind::Slice, 0);
        let s = ck_extension(&x0).unwrap();
        assert_eq!(*s.f1(), x0);
        assert_eq!(*s.f2(), CliffordPolynomial::var(c0, PolyKind::Slice, 1));

        let s = ck_extension(&x0.mul(&x0)).unwrap();
        let z = FueterTable::new(c0, &c0.default_eta(), Side::Left).unwrap();
        let p2 = z.get(&k(&[2])).unwrap();
        let restricted = s.slice_restriction(&c0.default_eta()).unwrap();
        assert_eq!(restricted, *p2);

        let s = ck_extension(&CliffordPolynomial::one(c0, PolyKind::Slice)).unwrap();
        assert_eq!(*s.f1(), CliffordPolynomial::one(c0, PolyKind::Slice));
        assert!(s.f2().is_empty());

        let r = CliffordPolynomial::var(c0, PolyKind::Slice, 1);
        assert!(ck_extension(&r).is_err());
    }

    #[test]
    fn degree_cap_is_enforced() {
        let c = ctx(0, 1);
        let t = FueterTable::with_cap(c, &c.default_eta(), Side::Left, 3).unwrap();
        assert!(matches!(t.get(&k(&[4])), Err(Error::DegreeCap { .. })));
    }
}
