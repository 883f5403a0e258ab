//! Named batches of invariant checks driven by `psmono verify`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clifford::{Multivector, Paravector};
use crate::error::{Error, Result};
use crate::fueter::{ck_extension, FueterTable, Side};
use crate::kernel::{q_kernel, KernelExpr};
use crate::mobius::{
    conformal_transform, fd_slice_dirac, grav_generator, jacobian_weight, mobius_apply, random_generator,
};
use crate::poly::{apply, CliffordPolynomial, MultiIndex, OperatorSpec, PolyKind};
use crate::quad::{build_rule, cauchy_integral, Resolution, RuleKind};
use crate::slice::{compose, decompose, orbit_contains_tol, Point, SliceContext, SliceUnit};
use crate::tolerances::{CAUCHY_REL, FD_RESIDUAL, MOBIUS_REL, POLY_ZERO};

/// One recorded comparison: passes iff `value <= tol`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tol,
            pass: value <= tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub max_deg: u32,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            max_deg: 4,
            samples: 3,
            seed: 0,
        }
    }
}

pub const SUITES: &[&str] = &[
    "clifford",
    "fueter-monogenicity",
    "fueter-derivatives",
    "ck-consistency",
    "kernel-e",
    "cauchy-reproduction",
    "grav-invariance",
];

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    match name {
        "clifford" => clifford(opts, &mut rng),
        "fueter-monogenicity" => fueter_monogenicity(opts, &mut rng),
        "fueter-derivatives" => fueter_derivatives(opts),
        "ck-consistency" => ck_consistency(opts, &mut rng),
        "kernel-e" => kernel_e(opts, &mut rng),
        "cauchy-reproduction" => cauchy_reproduction(opts, &mut rng),
        "grav-invariance" => grav_invariance(opts, &mut rng),
        other => Err(Error::Parse(format!(
            "unknown suite {other:?}; known suites: {}",
            SUITES.join(", ")
        ))),
    }
}

fn contexts() -> Vec<SliceContext> {
    let mut v = Vec::new();
    for p in 0..=2 {
        for q in 1..=2 {
            v.push(SliceContext::new(p, q).expect("small context"));
        }
    }
    v
}

fn random_mv(n: usize, rng: &mut ChaCha8Rng) -> Multivector {
    let c = (0..1usize << n).map(|_| rng.random_range(-1.0..1.0)).collect();
    Multivector::from_coeffs(n, c).expect("sized")
}

fn random_int_mv(n: usize, rng: &mut ChaCha8Rng) -> Multivector {
    let c = (0..1usize << n).map(|_| rng.random_range(-3i32..=3) as f64).collect();
    Multivector::from_coeffs(n, c).expect("sized")
}

fn clifford(opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=6 {
        let mut rel = 0.0f64;
        for i in 1..=n {
            for j in 1..=n {
                let ei = Multivector::basis(n, i);
                let ej = Multivector::basis(n, j);
                let want = Multivector::scalar(n, if i == j { -2.0 } else { 0.0 });
                rel = rel.max((&(&ei * &ej) + &(&ej * &ei)).max_diff(&want));
            }
        }
        out.push(Check::new(format!("anticommutation n={n}"), rel, 0.0));
        let mut assoc = 0.0f64;
        let mut anti = 0.0f64;
        for _ in 0..opts.samples * 10 {
            let (a, b, c) = (random_int_mv(n, rng), random_int_mv(n, rng), random_int_mv(n, rng));
            assoc = assoc.max((&(&a * &b) * &c).max_diff(&(&a * &(&b * &c))));
            anti = anti.max((&a * &b).reverse().max_diff(&(&b.reverse() * &a.reverse())));
            anti = anti.max((&a * &b).conjugate().max_diff(&(&b.conjugate() * &a.conjugate())));
        }
        out.push(Check::new(format!("associativity n={n}"), assoc, 0.0));
        out.push(Check::new(format!("anti-automorphisms n={n}"), anti, 0.0));
        let mut inv = 0.0f64;
        for _ in 0..opts.samples * 10 {
            let x = Paravector::new((0..=n).map(|_| rng.random_range(-2.0..2.0)).collect())?;
            let xi = x.inverse()?;
            inv = inv.max((&x.to_multivector() * &xi.to_multivector()).max_diff(&Multivector::one(n)));
        }
        out.push(Check::new(format!("paravector inverse n={n}"), inv, 1e-12));
    }
    Ok(out)
}

fn fueter_monogenicity(opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for ctx in contexts() {
        let mut left = 0.0f64;
        let mut right = 0.0f64;
        for _ in 0..opts.samples {
            let eta = SliceUnit::random(ctx, rng);
            let lt = FueterTable::with_cap(ctx, &eta, Side::Left, opts.max_deg)?;
            let rt = FueterTable::with_cap(ctx, &eta, Side::Right, opts.max_deg)?;
            for k in MultiIndex::all_up_to(ctx.p() + 1, opts.max_deg) {
                left = left.max(apply(&OperatorSpec::DOmega(eta.clone()), &*lt.get(&k)?)?.max_abs_coeff());
                right = right.max(apply(&OperatorSpec::DOmegaRight(eta.clone()), &*rt.get(&k)?)?.max_abs_coeff());
            }
        }
        let tag = format!("p={} q={}", ctx.p(), ctx.q());
        out.push(Check::new(format!("left D_omega P_k, {tag}"), left, POLY_ZERO));
        out.push(Check::new(format!("right D_omega P^R_k, {tag}"), right, POLY_ZERO));
    }
    Ok(out)
}

fn fueter_derivatives(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for ctx in contexts() {
        let t = FueterTable::with_cap(ctx, &ctx.default_eta(), Side::Left, opts.max_deg)?;
        let mut d = 0.0f64;
        let mut r = 0.0f64;
        for k in MultiIndex::all_up_to(ctx.p() + 1, opts.max_deg) {
            for j in 0..=ctx.p() {
                d = d.max(t.derivative_identity_residual(&k, j)?.max_abs_coeff());
            }
            r = r.max(t.radial_identity_residual(&k)?.max_abs_coeff());
        }
        let tag = format!("p={} q={}", ctx.p(), ctx.q());
        out.push(Check::new(format!("partial identity, {tag}"), d, 0.0));
        out.push(Check::new(format!("radial identity, {tag}"), r, 0.0));
    }
    Ok(out)
}

fn random_point(ctx: SliceContext, scale: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
    ctx.point(&(0..ctx.full_arity()).map(|_| rng.random_range(-scale..scale)).collect::<Vec<_>>())
}

fn ck_consistency(opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for ctx in contexts() {
        let t = FueterTable::with_cap(ctx, &ctx.default_eta(), Side::Left, opts.max_deg)?;
        let mut worst = 0.0f64;
        for k in MultiIndex::all_up_to(ctx.p() + 1, opts.max_deg) {
            let mut e = k.as_slice().to_vec();
            e.push(0);
            let x_k = CliffordPolynomial::monomial(ctx, PolyKind::Slice, &e, Multivector::one(ctx.n()))?;
            let s = ck_extension(&x_k)?;
            for _ in 0..opts.samples {
                let x = random_point(ctx, 1.0, rng)?;
                let want = t.evaluate_full(&k, &x)?;
                worst = worst.max(s.induce(&x)?.dist(&want) / (1.0 + want.norm()));
            }
        }
        out.push(Check::new(format!("CK[x^k] = P_k, p={} q={}", ctx.p(), ctx.q()), worst, POLY_ZERO));
    }
    Ok(out)
}

fn kernel_e(opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for ctx in contexts() {
        let eta = SliceUnit::random(ctx, rng);
        let e = KernelExpr::e_slice(ctx, &eta)?;
        let res = e.d_omega(&eta).canonical();
        let worst = res.terms().map(|(_, p)| p.max_abs_coeff()).fold(0.0, f64::max);
        out.push(Check::new(format!("D_omega E, p={} q={}", ctx.p(), ctx.q()), worst, POLY_ZERO));
        let mut homog = 0.0f64;
        for k in MultiIndex::all_up_to(ctx.p() + 1, opts.max_deg.min(3)) {
            let qk = q_kernel(ctx, &k, &eta)?;
            let xs: Vec<f64> = (0..ctx.slice_arity()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let base = qk.evaluate(&xs)?;
            let lam = 2.0f64;
            let scaled = qk.evaluate(&xs.iter().map(|v| v * lam).collect::<Vec<_>>())?;
            let want = base.scale(lam.powi(-(k.order() as i32 + ctx.p() as i32 + 1)));
            homog = homog.max(scaled.dist(&want) / want.norm().max(f64::MIN_POSITIVE));
        }
        out.push(Check::new(format!("Q_k homogeneity, p={} q={}", ctx.p(), ctx.q()), homog, 1e-10));
    }
    Ok(out)
}

/// Random right-linear combination of P_k, |k| <= deg, as a closure on full points.
fn fueter_combo(
    ctx: SliceContext,
    deg: u32,
    rng: &mut ChaCha8Rng,
) -> Result<impl Fn(&Point) -> Result<Multivector>> {
    let t = FueterTable::with_cap(ctx, &ctx.default_eta(), Side::Left, deg)?;
    let ks = MultiIndex::all_up_to(ctx.p() + 1, deg);
    let coeffs: Vec<Multivector> = ks.iter().map(|_| random_mv(ctx.n(), rng)).collect();
    for k in &ks {
        t.get(k)?;
    }
    Ok(move |x: &Point| {
        let mut s = Multivector::zero(ctx.n());
        for (k, a) in ks.iter().zip(&coeffs) {
            s += &(&t.evaluate_full(k, x)? * a);
        }
        Ok(s)
    })
}

fn cauchy_reproduction(opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (p, tol) in [(0usize, 1e-10), (1, CAUCHY_REL)] {
        let ctx = SliceContext::new(p, 2)?;
        let f = fueter_combo(ctx, opts.max_deg.min(3), rng)?;
        let rule = build_rule(
            p,
            RuleKind::BoundarySphere {
                radius: 1.0,
                center: vec![0.0; p + 1],
            },
            &Resolution::default(),
        )?;
        let eta = SliceUnit::random(ctx, rng);
        let mut worst = 0.0f64;
        for _ in 0..opts.samples {
            let x = random_point(ctx, 0.35, rng)?;
            let want = f(&x)?;
            let got = cauchy_integral(ctx, &f, &rule, &eta, &x)?;
            worst = worst.max(got.dist(&want) / (1.0 + want.norm()));
        }
        out.push(Check::new(format!("Cauchy reproduction, p={p}"), worst, tol));
    }
    Ok(out)
}

fn grav_invariance(opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let ctx = SliceContext::new(1, 2)?;
    let f = fueter_combo(ctx, opts.max_deg.min(3), rng)?;
    let mut mats = Vec::new();
    for kind in 0..4 {
        mats.push(grav_generator(ctx, random_generator(ctx, kind, rng))?);
    }
    for _ in 0..5 {
        let a = grav_generator(ctx, random_generator(ctx, rng.random_range(0..4), rng))?;
        let b = grav_generator(ctx, random_generator(ctx, rng.random_range(0..4), rng))?;
        mats.push(a.mul(&b)?);
    }
    let mut cocycle = 0.0f64;
    let mut orbit = 0.0f64;
    let mut fd = 0.0f64;
    for (i, m) in mats.iter().enumerate() {
        let other = &mats[(i + 1) % mats.len()];
        let mn = m.mul(other)?;
        for _ in 0..opts.samples {
            // |x| in [0.5, 1.5] keeps clear of the inversion pole
            let x = loop {
                let x = random_point(ctx, 1.0, rng)?;
                if (0.5..1.5).contains(&x.norm()) {
                    break x;
                }
            };
            let lhs = &jacobian_weight(other, &x, 1)? * &jacobian_weight(m, &mobius_apply(other, &x)?, 1)?;
            let rhs = jacobian_weight(&mn, &x, 1)?;
            cocycle = cocycle.max(lhs.dist(&rhs) / (1.0 + rhs.norm()));
            let d = decompose(ctx, &x)?;
            let base = mobius_apply(m, &x)?;
            let y = compose(ctx, &d.xp, d.r, &SliceUnit::random(ctx, rng))?;
            if !orbit_contains_tol(ctx, &base, &mobius_apply(m, &y)?, MOBIUS_REL)? {
                orbit = f64::INFINITY;
            }
            let w = SliceUnit::random(ctx, rng);
            let t = |z: &Point| conformal_transform(m, &f, z);
            fd = fd.max(fd_slice_dirac(ctx, &t, &d.slice_coords(), &w)?.norm());
        }
    }
    Ok(vec![
        Check::new("cocycle", cocycle, MOBIUS_REL),
        Check::new("orbit preservation", orbit, MOBIUS_REL),
        Check::new("conformal invariance (finite differences)", fd, FD_RESIDUAL),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_at_small_size() {
        let opts = SuiteOptions {
            max_deg: 3,
            samples: 2,
            seed: 1,
        };
        for s in SUITES {
            let checks = run_suite(s, &opts).unwrap();
            assert!(!checks.is_empty());
            for c in checks {
                assert!(c.pass, "{s}: {} = {:e} > {:e}", c.name, c.value, c.tol);
            }
        }
        assert!(matches!(run_suite("nonexistent", &opts), Err(Error::Parse(_))));
    }
}
