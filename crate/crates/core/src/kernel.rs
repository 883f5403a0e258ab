//! The Cauchy kernel E, the derivative kernels Q_k, and the slice Cauchy
//! kernel, built on expressions `Σ P(x') ρ^{-m}` with `ρ² = |x_p|² + r²`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::fueter::{slice_combine, Side};
use crate::poly::{CliffordPolynomial, MultiIndex, PolyKind};
use crate::slice::{compose, decompose, orbit_contains_tol, Point, SliceContext, SliceUnit};
use crate::tolerances::{CANCEL_REL, POLE_REL};

/// Γ(m/2) for a positive integer m.
fn gamma_half(m: u32) -> f64 {
    if m.is_multiple_of(2) {
        (1..m / 2).map(f64::from).product()
    } else {
        let mut g = PI.sqrt();
        let mut k = 1;
        while k < m {
            g *= f64::from(k) / 2.0;
            k += 2;
        }
        g
    }
}

/// σ_{p+1} = 2 Γ(1/2)^{p+2} / Γ((p+2)/2), the area of the unit sphere in R^{p+2}.
pub fn sigma(p: usize) -> f64 {
    let m = p as u32 + 2;
    2.0 * PI.sqrt().powi(m as i32) / gamma_half(m)
}

/// `E(x) = conj(x) / (σ_{p+1} |x|^{p+2})`.
pub fn kernel_e(ctx: SliceContext, x: &Point) -> Result<Multivector> {
    ctx.check_point(x)?;
    let n2 = x.norm_sq();
    if n2 == 0.0 {
        return Err(Error::Singularity("E is singular at 0".into()));
    }
    let scale = 1.0 / (sigma(ctx.p()) * n2.sqrt().powi(ctx.p() as i32 + 2));
    Ok(x.conjugate().to_multivector().scale(scale))
}

/// `Σ_m P_m ρ^{-m}` with slice polynomials P_m.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelExpr {
    ctx: SliceContext,
    terms: BTreeMap<u32, CliffordPolynomial>,
}

fn rho_sq(ctx: SliceContext) -> CliffordPolynomial {
    let mut out = CliffordPolynomial::zero(ctx, PolyKind::Slice);
    for i in 0..ctx.slice_arity() {
        let mut e = vec![0; ctx.slice_arity()];
        e[i] = 2;
        out.add_term(e, &Multivector::one(ctx.n()));
    }
    out
}

impl KernelExpr {
    pub fn zero(ctx: SliceContext) -> Self {
        KernelExpr {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(p: CliffordPolynomial, m: u32) -> Result<Self> {
        if p.kind() != PolyKind::Slice {
            return Err(Error::KindMismatch("kernel numerators are slice polynomials".into()));
        }
        let mut out = Self::zero(p.ctx());
        out.push(m, p);
        Ok(out)
    }

    /// E restricted to the slice of η, in slice coordinates:
    /// `(x_0 - Σ x_i e_i - r η) / (σ ρ^{p+2})`.
    pub fn e_slice(ctx: SliceContext, eta: &SliceUnit) -> Result<Self> {
        ctx.check_unit(eta)?;
        let n = ctx.n();
        let s = 1.0 / sigma(ctx.p());
        let mut num = CliffordPolynomial::zero(ctx, PolyKind::Slice);
        for i in 0..ctx.slice_arity() {
            let mut e = vec![0; ctx.slice_arity()];
            e[i] = 1;
            let c = if i == 0 {
                Multivector::scalar(n, s)
            } else if i <= ctx.p() {
                Multivector::basis(n, i).scale(-s)
            } else {
                eta.to_multivector().scale(-s)
            };
            num.add_term(e, &c);
        }
        Self::term(num, ctx.p() as u32 + 2)
    }

    fn push(&mut self, m: u32, p: CliffordPolynomial) {
        if p.is_empty() {
            return;
        }
        let next = match self.terms.remove(&m) {
            Some(old) => &old + &p,
            None => p,
        };
        if !next.is_empty() {
            self.terms.insert(m, next);
        }
    }

    pub fn ctx(&self) -> SliceContext {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &CliffordPolynomial)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, p) in &o.terms {
            out.push(*m, p.clone());
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|p| p.scale(s))
    }

    pub fn left_mul(&self, a: &Multivector) -> Self {
        self.map(|p| p.left_mul(a))
    }

    pub fn right_mul(&self, a: &Multivector) -> Self {
        self.map(|p| p.right_mul(a))
    }

    fn map(&self, f: impl Fn(&CliffordPolynomial) -> CliffordPolynomial) -> Self {
        let mut out = Self::zero(self.ctx);
        for (m, p) in &self.terms {
            out.push(*m, f(p));
        }
        out
    }

    /// `∂_i (P ρ^{-m}) = (∂_i P) ρ^{-m} - m x_i P ρ^{-m-2}`.
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.ctx);
        for (&m, p) in &self.terms {
            out.push(m, p.partial(var));
            out.push(m + 2, p.mul_var(var).scale(-f64::from(m)));
        }
        out
    }

    pub fn partial_multi(&self, k: &MultiIndex) -> Self {
        let mut out = self.clone();
        for (i, &ki) in k.as_slice().iter().enumerate() {
            for _ in 0..ki {
                out = out.partial(i);
            }
        }
        out
    }

    /// Single-term form `N ρ^{-M}` with M the largest exponent present.
    pub fn canonical(&self) -> Self {
        let Some(&top) = self.terms.keys().next_back() else {
            return self.clone();
        };
        let r2 = rho_sq(self.ctx);
        let mut num = CliffordPolynomial::zero(self.ctx, PolyKind::Slice);
        let mut scale = 0.0f64;
        for (&m, p) in &self.terms {
            assert_eq!((top - m) % 2, 0, "mixed parity of rho exponents");
            let t = p.mul(&r2.pow((top - m) / 2));
            scale = scale.max(t.max_abs_coeff());
            num = &num + &t;
        }
        // cancellation leaves rounding noise; drop it relative to the summands
        let mut out = Self::zero(self.ctx);
        out.push(top, num.chop(CANCEL_REL * scale));
        out
    }

    /// True when the canonical numerator vanishes to `tol` per coefficient.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.canonical().terms.values().all(|p| p.is_zero(tol))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, xs: &[f64]) -> Result<Multivector> {
        if xs.len() != self.ctx.slice_arity() {
            return Err(Error::Dimension(format!(
                "kernel evaluation needs {} slice coordinates",
                self.ctx.slice_arity()
            )));
        }
        let rho = xs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rho == 0.0 {
            return Err(Error::Singularity("kernel expression at the origin".into()));
        }
        let mut out = Multivector::zero(self.ctx.n());
        for (&m, p) in &self.terms {
            out += &p.evaluate(xs)?.scale(rho.powi(-(m as i32)));
        }
        Ok(out)
    }

    /// `D_{x_p} + η ∂_r` acting from the left.
    pub fn d_omega(&self, eta: &SliceUnit) -> Self {
        let n = self.ctx.n();
        let mut out = self.partial(self.ctx.p() + 1).left_mul(&eta.to_multivector());
        for i in 0..=self.ctx.p() {
            out = out.add(&self.partial(i).left_mul(&Multivector::basis(n, i)));
        }
        out
    }

    /// `Σ (∂_i ·) e_i + (∂_r ·) η` acting from the right.
    pub fn d_omega_right(&self, eta: &SliceUnit) -> Self {
        let n = self.ctx.n();
        let mut out = self.partial(self.ctx.p() + 1).right_mul(&eta.to_multivector());
        for i in 0..=self.ctx.p() {
            out = out.add(&self.partial(i).right_mul(&Multivector::basis(n, i)));
        }
        out
    }
}

/// Memoized `Q_{η,k} = ((-1)^{|k|}/k!) ∂_k E` on the slice of η.
#[derive(Debug)]
pub struct QKernelTable {
    ctx: SliceContext,
    eta: SliceUnit,
    e: KernelExpr,
    derivs: RwLock<HashMap<MultiIndex, Arc<KernelExpr>>>,
}

impl QKernelTable {
    pub fn new(ctx: SliceContext, eta: &SliceUnit) -> Result<Self> {
        let e = KernelExpr::e_slice(ctx, eta)?;
        Ok(QKernelTable {
            ctx,
            eta: eta.clone(),
            e,
            derivs: RwLock::new(HashMap::new()),
        })
    }

    pub fn eta(&self) -> &SliceUnit {
        &self.eta
    }

    /// `∂_k E` in canonical form.
    fn derivative(&self, k: &MultiIndex) -> Result<Arc<KernelExpr>> {
        if k.len() != self.ctx.p() + 1 {
            return Err(Error::Dimension(format!(
                "multi-index {k} needs {} entries",
                self.ctx.p() + 1
            )));
        }
        if let Some(d) = self.derivs.read().expect("poisoned cache").get(k) {
            return Ok(d.clone());
        }
        let d = match (0..k.len()).find(|&i| k.get(i) > 0) {
            None => self.e.clone(),
            Some(i) => {
                let prev = self.derivative(&k.minus(i).expect("k_i > 0"))?;
                prev.partial(i).canonical()
            }
        };
        let d = Arc::new(d);
        self.derivs
            .write()
            .expect("poisoned cache")
            .entry(k.clone())
            .or_insert_with(|| d.clone());
        Ok(d)
    }

    pub fn q(&self, k: &MultiIndex) -> Result<KernelExpr> {
        let sign = if k.order().is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(self.derivative(k)?.scale(sign / k.factorial()))
    }

    /// Full `Q_k(x)` via the left combination of the two slice values.
    pub fn evaluate_full(&self, k: &MultiIndex, x: &Point) -> Result<Multivector> {
        let d = decompose(self.ctx, x)?;
        let q = self.q(k)?;
        let plus = q.evaluate(&d.slice_coords())?;
        if d.omega.is_none() {
            return Ok(plus);
        }
        let minus = q.evaluate(&d.reflected_coords())?;
        Ok(slice_combine(d.omega.as_ref(), &self.eta, &plus, &minus, Side::Left))
    }
}

pub fn q_kernel(ctx: SliceContext, k: &MultiIndex, eta: &SliceUnit) -> Result<KernelExpr> {
    QKernelTable::new(ctx, eta)?.q(k)
}

/// Full `Q_k(x)` with η = e_{p+1}.
pub fn q_full(ctx: SliceContext, k: &MultiIndex, x: &Point) -> Result<Multivector> {
    QKernelTable::new(ctx, &ctx.default_eta())?.evaluate_full(k, x)
}

/// Whether x lies on the orbit [y] (pole set of the slice Cauchy kernel).
pub fn on_pole_orbit(ctx: SliceContext, y: &Point, x: &Point) -> Result<bool> {
    let tol = POLE_REL * (1.0 + y.norm()) / (1.0 + x.norm().max(y.norm()));
    orbit_contains_tol(ctx, x, y, tol)
}

/// Slice Cauchy kernel `ℰ_y(x)` (left) or `ℰ^R_y(x)` (right).
pub fn slice_cauchy_kernel(ctx: SliceContext, y: &Point, x: &Point, side: Side) -> Result<Multivector> {
    ctx.check_point(y)?;
    ctx.check_point(x)?;
    if on_pole_orbit(ctx, y, x)? {
        return Err(Error::Pole(format!("{:?} lies on the orbit of {:?}", x.coords(), y.coords())));
    }
    let dy = decompose(ctx, y)?;
    let dx = decompose(ctx, x)?;
    let (Some(eta), Some(omega)) = (dy.omega.as_ref(), dx.omega.as_ref()) else {
        return kernel_e(ctx, &y.sub(x));
    };
    slice_cauchy_kernel_on(ctx, &dy.slice_coords(), eta, &dx.xp, dx.r, omega, side)
}

/// `ℰ_y(x)` for y with slice coordinates `ys` on the slice of η (the last
/// coordinate may be negative) and x = x_p + r ω.
pub fn slice_cauchy_kernel_on(
    ctx: SliceContext,
    ys: &[f64],
    eta: &SliceUnit,
    xp: &[f64],
    r: f64,
    omega: &SliceUnit,
    side: Side,
) -> Result<Multivector> {
    let y = compose(ctx, &ys[..=ctx.p()], ys[ctx.p() + 1], eta)?;
    let pi = compose(ctx, xp, r, eta)?;
    let pi_d = compose(ctx, xp, -r, eta)?;
    let a = kernel_e(ctx, &y.sub(&pi))?;
    let b = kernel_e(ctx, &y.sub(&pi_d))?;
    Ok(slice_combine(Some(omega), eta, &a, &b, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fueter::FueterTable;
    use crate::tolerances::POLY_ZERO;

    fn ctx(p: usize, q: usize) -> SliceContext {
        SliceContext::new(p, q).unwrap()
    }

    fn k(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn sigma_values() {
        assert!((sigma(0) - 2.0 * PI).abs() < 1e-14);
        assert!((sigma(1) - 4.0 * PI).abs() < 1e-14);
        assert!((sigma(2) - 2.0 * PI * PI).abs() < 1e-13);
        // 8π²/3 for S^4
        assert!((sigma(3) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn kernel_e_examples() {
        let c = ctx(0, 1);
        let v = kernel_e(c, &c.point(&[1.0, 0.0]).unwrap()).unwrap();
        assert!((v.scalar_part() - 1.0 / (2.0 * PI)).abs() < 1e-16);
        let v = kernel_e(c, &c.point(&[0.0, 1.0]).unwrap()).unwrap();
        assert!(v.approx_eq(&Multivector::blade(1, 1, -1.0 / (2.0 * PI)), 1e-16));
        assert!(kernel_e(c, &c.point(&[0.0, 0.0]).unwrap()).is_err());
        let c = ctx(2, 2);
        let x = c.point(&[0.3, -0.2, 0.5, 0.1, -0.7]).unwrap();
        let a = kernel_e(c, &x.scale(2.0)).unwrap();
        let b = kernel_e(c, &x).unwrap().scale(2f64.powi(-3));
        assert!(a.approx_eq(&b, 1e-14));
    }

    #[test]
    fn e_slice_is_monogenic_both_sides() {
        for (p, q) in [(0, 1), (1, 2), (2, 3)] {
            let c = ctx(p, q);
            let eta = SliceUnit::normalized(c, &vec![1.0; q]).unwrap();
            let e = KernelExpr::e_slice(c, &eta).unwrap();
            assert!(e.d_omega(&eta).canonical().terms.values().all(|t| t.is_zero(POLY_ZERO)));
            assert!(e.d_omega_right(&eta).is_zero(POLY_ZERO));
        }
    }

    #[test]
    fn q_examples() {
        let c = ctx(0, 1);
        let eta = c.default_eta();
        let t = QKernelTable::new(c, &eta).unwrap();
        let e = KernelExpr::e_slice(c, &eta).unwrap();
        assert_eq!(t.q(&k(&[0])).unwrap(), e);
        let v = t.q(&k(&[1])).unwrap().evaluate(&[0.0, 1.0]).unwrap();
        assert!(v.approx_eq(&Multivector::scalar(1, -1.0 / (2.0 * PI)), 1e-16));
    }

    #[test]
    fn q_is_monogenic_and_homogeneous() {
        let c = ctx(1, 2);
        let eta = SliceUnit::normalized(c, &[2.0, -1.0]).unwrap();
        let t = QKernelTable::new(c, &eta).unwrap();
        let xs = [0.3, -0.4, 0.6];
        for kk in MultiIndex::all_up_to(2, 3) {
            let q = t.q(&kk).unwrap();
            assert!(q.d_omega(&eta).is_zero(1e-12), "{kk}");
            let base = q.evaluate(&xs).unwrap();
            for lam in [2.0f64, 3.0] {
                let scaled: Vec<f64> = xs.iter().map(|v| v * lam).collect();
                let got = q.evaluate(&scaled).unwrap();
                let want = base.scale(lam.powi(-(kk.order() as i32 + 2)));
                assert!(got.max_diff(&want) <= 1e-12 * want.max_abs().max(1e-300), "{kk}");
            }
        }
    }

    #[test]
    fn q_full_eta_independent() {
        let c = ctx(1, 2);
        let t2 = QKernelTable::new(c, &SliceUnit::basis(c, 1).unwrap()).unwrap();
        let t3 = QKernelTable::new(c, &SliceUnit::basis(c, 2).unwrap()).unwrap();
        let x = c.point(&[0.3, -0.2, 0.5, 0.4]).unwrap();
        for kk in MultiIndex::all_up_to(2, 3) {
            let a = t2.evaluate_full(&kk, &x).unwrap();
            let b = t3.evaluate_full(&kk, &x).unwrap();
            assert!(a.approx_eq(&b, 1e-12), "{kk}");
        }
        let on_slice = c.point(&[0.3, -0.2, 0.5, 0.0]).unwrap();
        let v = q_full(c, &k(&[0, 0]), &on_slice).unwrap();
        assert!(v.approx_eq(&kernel_e(c, &on_slice).unwrap(), 1e-15));
    }

    #[test]
    fn slice_cauchy_examples() {
        let c = ctx(1, 2);
        let eta = SliceUnit::normalized(c, &[1.0, 1.0]).unwrap();
        let y = compose(c, &[0.5, -1.0], 1.5, &eta).unwrap();
        let x = compose(c, &[0.1, 0.2], 0.3, &eta).unwrap();
        let v = slice_cauchy_kernel(c, &y, &x, Side::Left).unwrap();
        assert!(v.approx_eq(&kernel_e(c, &y.sub(&x)).unwrap(), 1e-15));
        let xr = c.point(&[0.1, 0.2, 0.0, 0.0]).unwrap();
        let v = slice_cauchy_kernel(c, &y, &xr, Side::Left).unwrap();
        assert!(v.approx_eq(&kernel_e(c, &y.sub(&xr)).unwrap(), 1e-15));
        let other = compose(c, &[0.5, -1.0], 1.5, &SliceUnit::basis(c, 1).unwrap()).unwrap();
        assert!(matches!(slice_cauchy_kernel(c, &y, &other, Side::Left), Err(Error::Pole(_))));
    }

    #[test]
    fn slice_cauchy_series() {
        let c = ctx(1, 2);
        let eta = c.default_eta();
        let ft = FueterTable::with_cap(c, &eta, Side::Left, 10).unwrap();
        let qt = QKernelTable::new(c, &eta).unwrap();
        let y = compose(c, &[0.6, -0.2], 0.77, &eta).unwrap();
        let w = SliceUnit::normalized(c, &[1.0, -3.0]).unwrap();
        let x = compose(c, &[0.1, 0.15], 0.2, &w).unwrap();
        let x = x.scale(0.3 * y.norm() / x.norm());
        let exact = slice_cauchy_kernel(c, &y, &x, Side::Left).unwrap();
        let mut partial = Multivector::zero(c.n());
        let mut errs = Vec::new();
        for d in 0..=8 {
            for kk in MultiIndex::all_of_order(2, d) {
                partial += &(&ft.evaluate_full(&kk, &x).unwrap() * &qt.evaluate_full(&kk, &y).unwrap());
            }
            errs.push(partial.dist(&exact));
        }
        assert!(errs[8] < 1e-4 * exact.norm(), "{errs:?}");
        for k in 0..7 {
            assert!(errs[k + 2] < errs[k], "{errs:?}");
        }
    }
}
