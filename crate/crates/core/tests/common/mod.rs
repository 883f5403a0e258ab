//! Reference computations used by the integration tests. Nothing here calls
//! the library's products, derivatives or recursions; library values are
//! only read (coefficients, coordinates) and compared.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use psmono::{CliffordPolynomial, Multivector, SliceUnit};

/// Dense coefficients, index = blade bitmask.
pub type Coeffs = Vec<f64>;

/// Exponent vector -> coefficient.
pub type OPoly = BTreeMap<Vec<u32>, Coeffs>;

pub fn indices(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

/// e_{a...} e_{b...} by sorting the concatenated word: each swap of
/// distinct neighbours flips the sign, each adjacent pair e_i e_i is -1.
pub fn word_product(a: &[usize], b: &[usize]) -> (f64, usize) {
    let mut w: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut sign = 1.0;
    loop {
        let mut changed = false;
        let mut k = 0;
        while k + 1 < w.len() {
            if w[k] > w[k + 1] {
                w.swap(k, k + 1);
                sign = -sign;
                changed = true;
            } else if w[k] == w[k + 1] {
                w.drain(k..k + 2);
                sign = -sign;
                changed = true;
                continue;
            }
            k += 1;
        }
        if !changed {
            break;
        }
    }
    (sign, w.iter().map(|i| 1usize << (i - 1)).sum())
}

pub fn cmul(a: &[f64], b: &[f64]) -> Coeffs {
    let mut out = vec![0.0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let ia = indices(i);
        for (j, &y) in b.iter().enumerate() {
            if y == 0.0 {
                continue;
            }
            let (s, k) = word_product(&ia, &indices(j));
            out[k] += s * x * y;
        }
    }
    out
}

pub fn cadd(a: &[f64], b: &[f64]) -> Coeffs {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn cscale(a: &[f64], s: f64) -> Coeffs {
    a.iter().map(|x| x * s).collect()
}

pub fn cnorm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn cdist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn basis(n: usize, i: usize) -> Coeffs {
    let mut c = vec![0.0; 1 << n];
    if i == 0 {
        c[0] = 1.0;
    } else {
        c[1 << (i - 1)] = 1.0;
    }
    c
}

pub fn scalar(n: usize, s: f64) -> Coeffs {
    let mut c = vec![0.0; 1 << n];
    c[0] = s;
    c
}

/// Paravector x_0 + Σ x_i e_i.
pub fn para(n: usize, x: &[f64]) -> Coeffs {
    let mut c = vec![0.0; 1 << n];
    c[0] = x[0];
    for (i, v) in x.iter().enumerate().skip(1) {
        c[1 << (i - 1)] = *v;
    }
    c
}

pub fn unit_coeffs(n: usize, p: usize, w: &SliceUnit) -> Coeffs {
    let mut c = vec![0.0; 1 << n];
    for (j, v) in w.comps().iter().enumerate() {
        c[1 << (p + j)] = *v;
    }
    c
}

pub fn to_mv(n: usize, c: Coeffs) -> Multivector {
    Multivector::from_coeffs(n, c).unwrap()
}

pub fn of_mv(m: &Multivector) -> Coeffs {
    m.coeffs().to_vec()
}

/// Conjugation by blade grade: (-1)^{k(k+1)/2}.
pub fn conj(a: &[f64]) -> Coeffs {
    a.iter()
        .enumerate()
        .map(|(i, x)| {
            let k = i.count_ones();
            if (k * (k + 1) / 2) % 2 == 1 {
                -x
            } else {
                *x
            }
        })
        .collect()
}

pub fn reverse(a: &[f64]) -> Coeffs {
    a.iter()
        .enumerate()
        .map(|(i, x)| {
            let k = i.count_ones();
            if (k * k.saturating_sub(1) / 2) % 2 == 1 {
                -x
            } else {
                *x
            }
        })
        .collect()
}

// ---------- polynomials ----------

pub fn from_lib(p: &CliffordPolynomial) -> OPoly {
    p.terms().map(|(e, c)| (e.clone(), of_mv(c))).collect()
}

pub fn padd(a: &OPoly, b: &OPoly) -> OPoly {
    let mut out = a.clone();
    for (e, c) in b {
        let slot = out.entry(e.clone()).or_insert_with(|| vec![0.0; c.len()]);
        *slot = cadd(slot, c);
    }
    out
}

pub fn pscale(a: &OPoly, s: f64) -> OPoly {
    a.iter().map(|(e, c)| (e.clone(), cscale(c, s))).collect()
}

pub fn pmul(a: &OPoly, b: &OPoly) -> OPoly {
    let mut out = OPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let v = cmul(ca, cb);
            let slot = out.entry(e).or_insert_with(|| vec![0.0; v.len()]);
            *slot = cadd(slot, &v);
        }
    }
    out
}

pub fn pconst(arity: usize, c: Coeffs) -> OPoly {
    let mut out = OPoly::new();
    out.insert(vec![0; arity], c);
    out
}

/// c * x_i.
pub fn pvar(arity: usize, i: usize, c: Coeffs) -> OPoly {
    let mut e = vec![0; arity];
    e[i] = 1;
    let mut out = OPoly::new();
    out.insert(e, c);
    out
}

pub fn pleft(c: &[f64], a: &OPoly) -> OPoly {
    a.iter().map(|(e, v)| (e.clone(), cmul(c, v))).collect()
}

pub fn pright(a: &OPoly, c: &[f64]) -> OPoly {
    a.iter().map(|(e, v)| (e.clone(), cmul(v, c))).collect()
}

pub fn pderiv(a: &OPoly, i: usize) -> OPoly {
    let mut out = OPoly::new();
    for (e, c) in a {
        if e[i] == 0 {
            continue;
        }
        let mut f = e.clone();
        f[i] -= 1;
        let v = cscale(c, e[i] as f64);
        let slot = out.entry(f).or_insert_with(|| vec![0.0; v.len()]);
        *slot = cadd(slot, &v);
    }
    out
}

/// Largest coefficient difference over the union of supports.
pub fn pdiff(a: &OPoly, b: &OPoly) -> f64 {
    let mut worst = 0.0f64;
    for (e, c) in a {
        let d = match b.get(e) {
            Some(v) => c.iter().zip(v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
            None => c.iter().map(|x| x.abs()).fold(0.0, f64::max),
        };
        worst = worst.max(d);
    }
    for (e, c) in b {
        if !a.contains_key(e) {
            worst = worst.max(c.iter().map(|x| x.abs()).fold(0.0, f64::max));
        }
    }
    worst
}

pub fn pmax(a: &OPoly) -> f64 {
    a.values().flat_map(|c| c.iter()).map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn peval(a: &OPoly, x: &[f64]) -> Coeffs {
    let n = a.values().next().map(|c| c.len()).unwrap_or(1);
    let mut out = vec![0.0; n];
    for (e, c) in a {
        let m: f64 = e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product();
        out = cadd(&out, &cscale(c, m));
    }
    out
}

/// Slice Dirac operator on polynomials in (x_0..x_p, r): left
/// `Σ e_i ∂_i + η ∂_r`, right `Σ ∂_i e_i + ∂_r η`.
pub fn slice_dirac(n: usize, p: usize, eta: &[f64], a: &OPoly, right: bool) -> OPoly {
    let mut out = OPoly::new();
    for i in 0..=p + 1 {
        let e = if i <= p { basis(n, i) } else { eta.to_vec() };
        let d = pderiv(a, i);
        out = padd(&out, &if right { pright(&d, &e) } else { pleft(&e, &d) });
    }
    out
}

/// Permutations of `w` (positions distinct).
fn permutations(w: &[usize]) -> Vec<Vec<usize>> {
    if w.len() <= 1 {
        return vec![w.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..w.len() {
        let mut rest = w.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

pub fn factorial(m: usize) -> f64 {
    (1..=m).map(|v| v as f64).product()
}

fn word(k: &[u32]) -> Vec<usize> {
    k.iter().enumerate().flat_map(|(l, &c)| std::iter::repeat_n(l, c as usize)).collect()
}

/// Symmetrized product of z_l = x_l + r η e_l (left) or x_l + r e_l η
/// (right), as a polynomial in (x_0..x_p, r).
pub fn fueter_perm(n: usize, p: usize, k: &[u32], eta: &[f64], right: bool) -> OPoly {
    let arity = p + 2;
    let z: Vec<OPoly> = (0..=p)
        .map(|l| {
            let el = basis(n, l);
            let c = if right { cmul(&el, eta) } else { cmul(eta, &el) };
            padd(&pvar(arity, l, scalar(n, 1.0)), &pvar(arity, p + 1, c))
        })
        .collect();
    let w = word(k);
    let mut sum = OPoly::new();
    for perm in permutations(&w) {
        let mut prod = pconst(arity, scalar(n, 1.0));
        for &l in &perm {
            prod = pmul(&prod, &z[l]);
        }
        sum = padd(&sum, &prod);
    }
    pscale(&sum, 1.0 / factorial(w.len()))
}

/// Full P_k(x): symmetrized product of x_l + x_q e_l (left) or x_l + e_l x_q.
pub fn fueter_full(n: usize, p: usize, k: &[u32], x: &[f64], right: bool) -> Coeffs {
    let mut xq = vec![0.0; 1 << n];
    for i in p + 1..=n {
        xq[1 << (i - 1)] = x[i];
    }
    let z: Vec<Coeffs> = (0..=p)
        .map(|l| {
            let el = basis(n, l);
            let t = if right { cmul(&el, &xq) } else { cmul(&xq, &el) };
            cadd(&scalar(n, x[l]), &t)
        })
        .collect();
    let w = word(k);
    let mut sum = vec![0.0; 1 << n];
    for perm in permutations(&w) {
        let mut prod = scalar(n, 1.0);
        for &l in &perm {
            prod = cmul(&prod, &z[l]);
        }
        sum = cadd(&sum, &prod);
    }
    cscale(&sum, 1.0 / factorial(w.len()))
}

/// Σ_k P_k(x) a_k evaluated through `fueter_full`.
pub fn combo_full(n: usize, p: usize, terms: &[(Vec<u32>, Coeffs)], x: &[f64]) -> Coeffs {
    let mut s = vec![0.0; 1 << n];
    for (k, a) in terms {
        s = cadd(&s, &cmul(&fueter_full(n, p, k, x, false), a));
    }
    s
}

/// Area of the unit sphere in R^{p+2}: 2 π^{m} / Γ(m), m = (p+2)/2.
pub fn sphere_area(p: usize) -> f64 {
    let dim = p + 2;
    let gamma_half = |twice: usize| -> f64 {
        // Γ(twice/2)
        if twice.is_multiple_of(2) {
            factorial(twice / 2 - 1)
        } else {
            let m = (twice - 1) / 2;
            factorial(2 * m) * PI.sqrt() / (4f64.powi(m as i32) * factorial(m))
        }
    };
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half(dim)
}

/// E(x) = conj(x) / (σ |x|^{p+2}) for a paravector given by coordinates.
pub fn kernel_e(n: usize, p: usize, x: &[f64]) -> Coeffs {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let mut c = x.to_vec();
    for v in c.iter_mut().skip(1) {
        *v = -*v;
    }
    cscale(&para(n, &c), 1.0 / (sphere_area(p) * r2.powf((p as f64 + 2.0) / 2.0)))
}

/// Slice Cauchy kernel for y on the slice of η and x = x_p + rω:
/// ½(1-ωη)E(y - x') + ½(1+ωη)E(y - x'⋄), x' = x_p + rη, x'⋄ = x_p - rη.
pub fn slice_kernel(n: usize, p: usize, y: &[f64], x: &[f64], eta: &[f64]) -> Coeffs {
    let r = x[p + 1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    let at = |s: f64| -> Vec<f64> {
        let mut d = y.to_vec();
        for i in 0..=p {
            d[i] -= x[i];
        }
        for (j, v) in d.iter_mut().enumerate().skip(p + 1) {
            *v -= s * r * eta[1 << (j - 1)];
        }
        d
    };
    if r == 0.0 {
        return kernel_e(n, p, &at(0.0));
    }
    let mut om = vec![0.0; 1 << n];
    for i in p + 1..=n {
        om[1 << (i - 1)] = x[i] / r;
    }
    let we = cmul(&om, eta);
    let one = scalar(n, 1.0);
    let minus = cscale(&cadd(&one, &cscale(&we, -1.0)), 0.5);
    let plus = cscale(&cadd(&one, &we), 0.5);
    cadd(&cmul(&minus, &kernel_e(n, p, &at(1.0))), &cmul(&plus, &kernel_e(n, p, &at(-1.0))))
}

/// Spherical Dirac operator `-Σ_{p<i<j} e_i e_j (x_i ∂_j - x_j ∂_i)` on a
/// full polynomial.
pub fn gamma_op(n: usize, p: usize, a: &OPoly) -> OPoly {
    let arity = n + 1;
    let mut out = OPoly::new();
    for i in p + 1..=n {
        for j in i + 1..=n {
            let eij = cmul(&basis(n, i), &basis(n, j));
            let xi = pvar(arity, i, scalar(n, 1.0));
            let xj = pvar(arity, j, scalar(n, 1.0));
            let l = padd(&pmul(&xi, &pderiv(a, j)), &pscale(&pmul(&xj, &pderiv(a, i)), -1.0));
            out = padd(&out, &pscale(&pleft(&eij, &l), -1.0));
        }
    }
    out
}

/// `|x_q|^2 D_{x_p} + x_q Σ_{i>p} x_i ∂_i` on a full polynomial.
pub fn g_op(n: usize, p: usize, a: &OPoly) -> OPoly {
    let arity = n + 1;
    let mut dxp = OPoly::new();
    for i in 0..=p {
        dxp = padd(&dxp, &pleft(&basis(n, i), &pderiv(a, i)));
    }
    let mut r2 = OPoly::new();
    let mut xq = OPoly::new();
    let mut euler = OPoly::new();
    for i in p + 1..=n {
        let xi = pvar(arity, i, scalar(n, 1.0));
        r2 = padd(&r2, &pmul(&xi, &xi));
        xq = padd(&xq, &pvar(arity, i, basis(n, i)));
        euler = padd(&euler, &pmul(&xi, &pderiv(a, i)));
    }
    padd(&pmul(&r2, &dxp), &pmul(&xq, &euler))
}

// ---------- Möbius closed forms ----------

pub fn inverse_para(x: &[f64]) -> Vec<f64> {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    x.iter().enumerate().map(|(i, v)| if i == 0 { v / r2 } else { -v / r2 }).collect()
}

/// `a x a` for a unit 1-vector `a` (coefficients) and paravector `x`.
pub fn sandwich(n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    let c = cmul(&cmul(a, &para(n, x)), a);
    (0..=n).map(|i| if i == 0 { c[0] } else { c[1 << (i - 1)] }).collect()
}

/// Finite-difference slice Dirac `(D_{x_p} + ω ∂_r) g` at slice coordinates.
pub fn fd_dirac(
    n: usize,
    p: usize,
    g: &dyn Fn(&[f64]) -> Coeffs,
    xs: &[f64],
    omega: &[f64],
    h: f64,
) -> Coeffs {
    let embed = |ys: &[f64]| -> Vec<f64> {
        let mut x = ys[..=p].to_vec();
        for i in p + 1..=n {
            x.push(ys[p + 1] * omega[1 << (i - 1)]);
        }
        x
    };
    let central = |i: usize, h: f64| -> Coeffs {
        let mut up = xs.to_vec();
        let mut dn = xs.to_vec();
        up[i] += h;
        dn[i] -= h;
        cscale(&cadd(&g(&embed(&up)), &cscale(&g(&embed(&dn)), -1.0)), 0.5 / h)
    };
    let mut out = vec![0.0; 1 << n];
    for i in 0..=p + 1 {
        let d = cscale(&cadd(&cscale(&central(i, h / 2.0), 4.0), &cscale(&central(i, h), -1.0)), 1.0 / 3.0);
        let e = if i <= p { basis(n, i) } else { omega.to_vec() };
        out = cadd(&out, &cmul(&e, &d));
    }
    out
}
