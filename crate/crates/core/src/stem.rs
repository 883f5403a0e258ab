//! Stem functions `F1 + i F2` and the generalized partial-slice functions
//! they induce, `f(x_p + rω) = F1(x_p, r) + ω F2(x_p, r)`.

use serde_json::{json, Value};

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::poly::{apply, xq_poly, CliffordPolynomial, OperatorSpec, PolyKind};
use crate::slice::{decompose, Point, SliceContext, SliceUnit};

#[derive(Debug, Clone, PartialEq)]
pub struct StemPolynomial {
    f1: CliffordPolynomial,
    f2: CliffordPolynomial,
}

impl StemPolynomial {
    /// F1 must be even in r and F2 odd, term by term.
    pub fn new(f1: CliffordPolynomial, f2: CliffordPolynomial) -> Result<Self> {
        if f1.kind() != PolyKind::Slice || f2.kind() != PolyKind::Slice {
            return Err(Error::KindMismatch("stem components must be slice polynomials".into()));
        }
        if f1.ctx() != f2.ctx() {
            return Err(Error::Dimension("stem components from different contexts".into()));
        }
        if !f1.odd_in_r()?.is_empty() {
            return Err(Error::Domain("F1 is not even in r".into()));
        }
        if !f2.even_in_r()?.is_empty() {
            return Err(Error::Domain("F2 is not odd in r".into()));
        }
        Ok(StemPolynomial { f1, f2 })
    }

    pub fn ctx(&self) -> SliceContext {
        self.f1.ctx()
    }

    pub fn f1(&self) -> &CliffordPolynomial {
        &self.f1
    }

    pub fn f2(&self) -> &CliffordPolynomial {
        &self.f2
    }

    pub fn induce(&self, x: &Point) -> Result<Multivector> {
        let d = decompose(self.ctx(), x)?;
        let xs = d.slice_coords();
        let v1 = self.f1.evaluate(&xs)?;
        match d.omega {
            None => Ok(v1),
            Some(w) => Ok(&v1 + &(&w.to_multivector() * &self.f2.evaluate(&xs)?)),
        }
    }

    /// `f°_s = F1`.
    pub fn spherical_value_poly(&self) -> &CliffordPolynomial {
        &self.f1
    }

    /// `f'_s = F2 / r`, exact because F2 is odd.
    pub fn spherical_derivative_poly(&self) -> CliffordPolynomial {
        self.f2.div_r().expect("odd polynomial is divisible by r")
    }

    pub fn spherical_value(&self, x: &Point) -> Result<Multivector> {
        let d = decompose(self.ctx(), x)?;
        self.f1.evaluate(&d.slice_coords())
    }

    pub fn spherical_derivative(&self, x: &Point) -> Result<Multivector> {
        let d = decompose(self.ctx(), x)?;
        self.spherical_derivative_poly().evaluate(&d.slice_coords())
    }

    /// `(D_{x_p} F1 - ∂_r F2, conj(D_{x_p}) F2 + ∂_r F1)`.
    pub fn gsr_residual(&self) -> Result<(CliffordPolynomial, CliffordPolynomial)> {
        let ctx = self.ctx();
        let n = ctx.n();
        let r = ctx.p() + 1;
        let r1 = &apply(&OperatorSpec::DXp, &self.f1)? - &self.f2.partial(r);
        let mut r2 = self.f2.partial(0);
        for i in 1..=ctx.p() {
            r2 = &r2 - &self.f2.partial(i).left_mul(&Multivector::basis(n, i));
        }
        let r2 = &r2 + &self.f1.partial(r);
        Ok((r1, r2))
    }

    pub fn is_gsr(&self, tol: f64) -> Result<bool> {
        let (a, b) = self.gsr_residual()?;
        Ok(a.is_zero(tol) && b.is_zero(tol))
    }

    /// The induced function as a full polynomial:
    /// `F1(x_p, |x_q|) + x_q (F2/r)(x_p, |x_q|)`.
    pub fn induced_full(&self) -> Result<CliffordPolynomial> {
        let a = self.f1.lift_even()?;
        let b = self.spherical_derivative_poly().lift_even()?;
        Ok(&a + &xq_poly(self.ctx()).mul(&b))
    }

    /// `F1 + ω F2` on the slice of ω, with r allowed to be negative.
    pub fn slice_restriction(&self, omega: &SliceUnit) -> Result<CliffordPolynomial> {
        self.ctx().check_unit(omega)?;
        Ok(&self.f1 + &self.f2.left_mul(&omega.to_multivector()))
    }

    pub fn to_json(&self) -> Value {
        json!({"F1": self.f1.to_json(), "F2": self.f2.to_json()})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let f1 = v.get("F1").ok_or_else(|| Error::Parse("stem needs F1".into()))?;
        let f2 = v.get("F2").ok_or_else(|| Error::Parse("stem needs F2".into()))?;
        Self::new(CliffordPolynomial::from_json(f1)?, CliffordPolynomial::from_json(f2)?)
    }
}

/// Value at x_p + rω from samples at x_p + rω₁ and x_p + rω₂:
/// `(ω-ω₂)(ω₁-ω₂)^{-1} f₁ - (ω-ω₁)(ω₁-ω₂)^{-1} f₂`.
pub fn representation_formula(
    f1: &Multivector,
    f2: &Multivector,
    w1: &SliceUnit,
    w2: &SliceUnit,
    w: &SliceUnit,
) -> Result<Multivector> {
    let (a, b, t) = (w1.to_multivector(), w2.to_multivector(), w.to_multivector());
    let diff = &a - &b;
    let n2 = diff.norm_sq();
    if n2 <= 1e-28 {
        return Err(Error::Singularity("representation formula needs ω₁ ≠ ω₂".into()));
    }
    // a 1-vector v has inverse -v/|v|^2
    let inv = diff.scale(-1.0 / n2);
    Ok(&(&(&t - &b) * &inv) * f1 - &(&(&t - &a) * &inv) * f2)
}

/// Stem of the unique extension of `f_eta` (annihilated by D_OMEGA(η)):
/// `F1 = ½(f + f⋄)`, `F2 = -½ η (f - f⋄)`, with `f⋄(x') = f(x'_⋄)`.
pub fn extend_from_slice(f_eta: &CliffordPolynomial, eta: &SliceUnit, tol: f64) -> Result<StemPolynomial> {
    let res = apply(&OperatorSpec::DOmega(eta.clone()), f_eta)?;
    let residual = res.max_abs_coeff();
    if residual > tol {
        return Err(Error::NotMonogenic { residual });
    }
    let refl = f_eta.reflect_r()?;
    let f1 = (f_eta + &refl).scale(0.5);
    let f2 = (f_eta - &refl).left_mul(&eta.to_multivector()).scale(-0.5);
    StemPolynomial::new(f1, f2)
}

/// ϑ̄ f(x). Off R^{p+1}: `D_{x_p} f + (x_q/|x_q|^2) 𝔼_{x_q} f`; on R^{p+1}:
/// `D_x f + (q-1) f'_s`. Both use the full-polynomial form of f.
pub fn thetabar_on_stem(s: &StemPolynomial, x: &Point) -> Result<Multivector> {
    let ctx = s.ctx();
    ctx.check_point(x)?;
    let full = s.induced_full()?;
    let xs = x.coords();
    let d = decompose(ctx, x)?;
    if d.r > 0.0 {
        let dxp = apply(&OperatorSpec::DXp, &full)?.evaluate(xs)?;
        let eq = apply(&OperatorSpec::EulerQ, &full)?.evaluate(xs)?;
        let mut xq = Multivector::zero(ctx.n());
        for i in ctx.p() + 1..=ctx.n() {
            xq.set(1 << (i - 1), xs[i] / (d.r * d.r));
        }
        Ok(&dxp + &(&xq * &eq))
    } else {
        let dfull = apply(&OperatorSpec::DFull, &full)?.evaluate(xs)?;
        let fs = s.spherical_derivative(x)?;
        Ok(&dfull + &fs.scale((ctx.q() as f64) - 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fueter::{ck_extension, FueterTable, Side};
    use crate::poly::MultiIndex;
    use crate::slice::compose;

    fn ctx(p: usize, q: usize) -> SliceContext {
        SliceContext::new(p, q).unwrap()
    }

    fn mv(n: usize, s: &str) -> Multivector {
        Multivector::parse(n, s).unwrap()
    }

    fn mono(c: SliceContext, e: &[u32], s: &str) -> CliffordPolynomial {
        CliffordPolynomial::monomial(c, PolyKind::Slice, e, mv(c.n(), s)).unwrap()
    }

    fn z0_stem(c: SliceContext) -> StemPolynomial {
        let mut e0 = vec![0; c.slice_arity()];
        e0[0] = 1;
        let mut er = vec![0; c.slice_arity()];
        er[c.p() + 1] = 1;
        StemPolynomial::new(mono(c, &e0, "1"), mono(c, &er, "1")).unwrap()
    }

    #[test]
    fn parity_is_enforced() {
        let c = ctx(0, 1);
        assert!(StemPolynomial::new(mono(c, &[0, 1], "1"), mono(c, &[0, 1], "1")).is_err());
        assert!(StemPolynomial::new(mono(c, &[0, 0], "1"), mono(c, &[0, 2], "1")).is_err());
    }

    #[test]
    fn induce_examples() {
        let c = ctx(0, 2);
        let s = z0_stem(c);
        assert_eq!(s.induce(&c.point(&[1.0, 2.0, 0.0]).unwrap()).unwrap(), mv(2, "1 + 2*e1"));
        let c3 = ctx(0, 3);
        let sq = StemPolynomial::new(
            &mono(c3, &[2, 0], "1") + &mono(c3, &[0, 2], "-1"),
            mono(c3, &[1, 1], "2"),
        )
        .unwrap();
        assert_eq!(sq.induce(&c3.point(&[1.0, 0.0, 0.0, 1.0]).unwrap()).unwrap(), mv(3, "2*e3"));
        let one = StemPolynomial::new(mono(c, &[0, 0], "1"), CliffordPolynomial::zero(c, PolyKind::Slice)).unwrap();
        assert_eq!(one.induce(&c.point(&[0.3, -1.0, 4.0]).unwrap()).unwrap(), mv(2, "1"));
    }

    #[test]
    fn spherical_examples() {
        let c = ctx(0, 1);
        let s = z0_stem(c);
        assert_eq!(s.spherical_derivative_poly(), mono(c, &[0, 0], "1"));
        let sq = StemPolynomial::new(&mono(c, &[2, 0], "1") + &mono(c, &[0, 2], "-1"), mono(c, &[1, 1], "2")).unwrap();
        assert_eq!(sq.spherical_derivative_poly(), mono(c, &[1, 0], "2"));
        let one = StemPolynomial::new(mono(c, &[0, 0], "1"), CliffordPolynomial::zero(c, PolyKind::Slice)).unwrap();
        assert!(one.spherical_derivative_poly().is_empty());
    }

    #[test]
    fn gsr_examples() {
        let c = ctx(0, 1);
        let (a, b) = z0_stem(c).gsr_residual().unwrap();
        assert!(a.is_empty() && b.is_empty());
        let s = StemPolynomial::new(mono(c, &[2, 0], "1"), CliffordPolynomial::zero(c, PolyKind::Slice)).unwrap();
        let (a, b) = s.gsr_residual().unwrap();
        assert_eq!(a, mono(c, &[1, 0], "2"));
        assert!(b.is_empty());
        let c1 = ctx(1, 2);
        let s = ck_extension(&mono(c1, &[1, 1, 0], "1")).unwrap();
        assert!(s.is_gsr(0.0).unwrap());
    }

    #[test]
    fn representation_examples() {
        let c = ctx(0, 2);
        let s = z0_stem(c);
        let e2 = SliceUnit::basis(c, 1).unwrap();
        let e3 = SliceUnit::basis(c, 2).unwrap();
        let f1 = s.induce(&compose(c, &[1.0], 2.0, &e2).unwrap()).unwrap();
        let f2 = s.induce(&compose(c, &[1.0], 2.0, &e3).unwrap()).unwrap();
        let v = representation_formula(&f1, &f2, &e2, &e3, &e2).unwrap();
        assert!(v.approx_eq(&mv(2, "1 + 2*e1"), 1e-15));
        let mid = SliceUnit::normalized(c, &[1.0, 1.0]).unwrap();
        let v = representation_formula(&f1, &f2, &e2, &e3, &mid).unwrap();
        let h = 2.0 / 2f64.sqrt();
        assert!(v.approx_eq(&Multivector::from_paravector(2, &[1.0, h, h]), 1e-15));
        let k = mv(2, "3 - e12");
        assert!(representation_formula(&k, &k, &e2, &e3, &mid).unwrap().approx_eq(&k, 1e-15));
        assert!(representation_formula(&k, &k, &e2, &e2, &mid).is_err());
    }

    #[test]
    fn extension_examples() {
        let c = ctx(1, 2);
        let eta = c.default_eta();
        let z0 = crate::fueter::fueter_variable(c, 0, &eta, Side::Left).unwrap();
        let s = extend_from_slice(&z0, &eta, 1e-12).unwrap();
        assert_eq!(*s.f1(), mono(c, &[1, 0, 0], "1"));
        assert_eq!(*s.f2(), mono(c, &[0, 0, 1], "1"));

        let t = FueterTable::new(c, &eta, Side::Left).unwrap();
        let kk = MultiIndex::new(vec![1, 1]);
        let s = extend_from_slice(&t.get(&kk).unwrap(), &eta, 1e-12).unwrap();
        for x in [[0.2, -0.3, 0.5, 0.7], [1.0, 2.0, -1.0, 0.1]] {
            let x = c.point(&x).unwrap();
            assert!(s.induce(&x).unwrap().approx_eq(&t.evaluate_full(&kk, &x).unwrap(), 1e-13));
        }

        let one = CliffordPolynomial::one(c, PolyKind::Slice);
        let s = extend_from_slice(&one, &eta, 1e-12).unwrap();
        assert_eq!(*s.f1(), one);
        assert!(s.f2().is_empty());

        let bad = mono(c, &[2, 0, 0], "1");
        assert!(matches!(extend_from_slice(&bad, &eta, 1e-12), Err(Error::NotMonogenic { .. })));
    }

    #[test]
    fn thetabar_examples() {
        let c = ctx(1, 2);
        let x = c.point(&[0.4, -0.3, 0.5, 0.2]).unwrap();
        let gsr = ck_extension(&mono(c, &[1, 1, 0], "1")).unwrap();
        assert!(thetabar_on_stem(&gsr, &x).unwrap().is_zero(1e-14));

        let sq = StemPolynomial::new(mono(c, &[2, 0, 0], "1"), CliffordPolynomial::zero(c, PolyKind::Slice)).unwrap();
        assert!(thetabar_on_stem(&sq, &x).unwrap().approx_eq(&mv(3, "0.8"), 1e-14));

        let s = StemPolynomial::new(CliffordPolynomial::zero(c, PolyKind::Slice), mono(c, &[0, 0, 1], "1")).unwrap();
        assert!(thetabar_on_stem(&s, &x).unwrap().approx_eq(&mv(3, "-1"), 1e-14));
    }
}
