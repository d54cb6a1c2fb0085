//! Weierstrass-type functions with half-periods `(ℓ, iδ)`.
//!
//! ```text
//! ℘₁(x) = Σ_n κ² / sin²(κ(x − 2niδ)),            κ = π/2ℓ
//! ζ₁(x) = lim_M Σ_{m=-M..M} κ cot(κ(x − 2imδ)),   ℘₁ = −ζ₁′
//! ```
//!
//! Both series are summed symmetrically in the image index after reducing the
//! argument to the fundamental cell `[−ℓ, ℓ) × [−δ, δ)`. Summands decay like
//! `p^|n|` with the nome `p = exp(−2πδ/ℓ)`, so every truncation carries an
//! a-posteriori geometric tail bound.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Pole exclusion radius in units of `min(ℓ, δ)`.
pub const POLE_EXCLUSION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct EllipticParams {
    ell: f64,
    delta: f64,
    nome: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    ell: f64,
    delta: f64,
}

impl TryFrom<RawParams> for EllipticParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        EllipticParams::new(raw.ell, raw.delta)
    }
}

impl From<EllipticParams> for RawParams {
    fn from(p: EllipticParams) -> Self {
        RawParams { ell: p.ell, delta: p.delta }
    }
}

impl EllipticParams {
    pub fn new(ell: f64, delta: f64) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidParameter(format!("ell must be positive and finite, got {ell}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be positive and finite, got {delta}")));
        }
        Ok(Self { ell, delta, nome: nome(ell, delta) })
    }

    /// Half-period along the real axis; the circle has circumference `2ℓ`.
    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `p = exp(−2πδ/ℓ)`.
    pub fn nome(&self) -> f64 {
        self.nome
    }

    /// `κ = π/2ℓ`.
    pub fn kappa(&self) -> f64 {
        PI / (2.0 * self.ell)
    }

    fn exclusion_radius(&self) -> f64 {
        POLE_EXCLUSION * self.ell.min(self.delta)
    }
}

fn nome(ell: f64, delta: f64) -> f64 {
    (-2.0 * PI * delta / ell).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_terms: 10_000 }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be at least 1".into()));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

/// `cot(z)` evaluated through `exp(±2iz)` so that large `|Im z|` neither
/// overflows nor produces `0·∞`.
pub(crate) fn cot(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        let q = (2.0 * I * z).exp();
        -I * (1.0 + q) / (1.0 - q)
    } else {
        let w = (-2.0 * I * z).exp();
        I * (1.0 + w) / (1.0 - w)
    }
}

/// `1/sin²(z)`, same branch choice as [`cot`].
pub(crate) fn csc2(z: Complex64) -> Complex64 {
    let q = if z.im >= 0.0 { (2.0 * I * z).exp() } else { (-2.0 * I * z).exp() };
    let d = 1.0 - q;
    -4.0 * q / (d * d)
}

/// Splits `x = x0 + 2aℓ + 2ijδ` with `x0` in the fundamental cell and returns `(x0, j)`.
fn reduce(x: Complex64, p: &EllipticParams) -> (Complex64, f64) {
    let a = (x.re / (2.0 * p.ell)).round();
    let j = (x.im / (2.0 * p.delta)).round();
    (Complex64::new(x.re - 2.0 * p.ell * a, x.im - 2.0 * p.delta * j), j)
}

fn check_pole(x0: Complex64, p: &EllipticParams, original: Complex64) -> Result<()> {
    let radius = p.exclusion_radius();
    if x0.norm() < radius {
        return Err(Error::PoleProximity { arg: format!("{original}"), radius });
    }
    Ok(())
}

/// Geometric tail bound shared by the ℘₁-type sums: the first omitted image
/// sits at least `(2m+1)δ` off the real axis and successive bounds shrink by `p`.
fn wp_tail_bound(m: usize, p: &EllipticParams) -> f64 {
    let k = p.kappa();
    let s = (k * (2 * m + 1) as f64 * p.delta).sinh();
    2.0 * k * k / (s * s) / (1.0 - p.nome)
}

fn sum_wp_images<F>(x: Complex64, p: &EllipticParams, ctl: &SeriesControl, what: &'static str, scale: f64, term: F) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let step = Complex64::new(0.0, 2.0 * p.delta);
    let mut sum = term(x);
    for m in 1..=ctl.max_terms {
        let shift = step * m as f64;
        sum += term(x - shift) + term(x + shift);
        if wp_tail_bound(m, p) <= ctl.rel_tol * sum.norm().max(scale) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what, terms: ctl.max_terms })
}

/// Elliptic pair potential ℘₁ at complex argument `x`.
pub fn wp1(x: Complex64, p: &EllipticParams, ctl: &SeriesControl) -> Result<Complex64> {
    let (x0, _) = reduce(x, p);
    check_pole(x0, p, x)?;
    let k = p.kappa();
    let mut v = sum_wp_images(x0, p, ctl, "wp1", k * k, |z| k * k * csc2(k * z))?;
    if x.im == 0.0 {
        v.im = 0.0;
    }
    Ok(v)
}

/// Real-argument convenience wrapper around [`wp1`].
pub fn wp1_real(x: f64, p: &EllipticParams, ctl: &SeriesControl) -> Result<f64> {
    wp1(Complex64::new(x, 0.0), p, ctl).map(|v| v.re)
}

/// Derivative `℘₁′(x)`.
pub fn wp1_prime(x: Complex64, p: &EllipticParams, ctl: &SeriesControl) -> Result<Complex64> {
    let (x0, _) = reduce(x, p);
    check_pole(x0, p, x)?;
    let k = p.kappa();
    let coth = 1.0 / (k * p.delta).tanh();
    // |cot| ≤ coth(κδ) on every omitted image, so rescale the tolerance accordingly.
    let ctl = SeriesControl { rel_tol: ctl.rel_tol / (2.0 * k * coth), ..*ctl };
    let mut v = sum_wp_images(x0, p, &ctl, "wp1_prime", k * k * k, |z| {
        -2.0 * k * k * k * cot(k * z) * csc2(k * z)
    })?;
    if x.im == 0.0 {
        v.im = 0.0;
    }
    Ok(v)
}

/// Quasi-periodic zeta function ζ₁ with `ζ₁(x + 2iδ) = ζ₁(x) − iπ/ℓ`.
pub fn zeta1(x: Complex64, p: &EllipticParams, ctl: &SeriesControl) -> Result<Complex64> {
    let (x0, j) = reduce(x, p);
    check_pole(x0, p, x)?;
    let k = p.kappa();
    let mut sum = k * cot(k * x0);
    let mut converged = false;
    for m in 1..=ctl.max_terms {
        let shift = 2.0 * m as f64 * p.delta;
        // cot → +i below the axis and −i above it; subtract the limits pairwise.
        let lo = k * (x0 - Complex64::new(0.0, shift));
        let hi = k * (x0 + Complex64::new(0.0, shift));
        let w = (-2.0 * I * lo).exp();
        let q = (2.0 * I * hi).exp();
        sum += k * (2.0 * I * w / (1.0 - w) - 2.0 * I * q / (1.0 - q));
        let e = (-2.0 * k * (2 * m + 1) as f64 * p.delta).exp();
        let tail = 4.0 * k * e / (1.0 - e) / (1.0 - p.nome);
        if tail <= ctl.rel_tol * sum.norm().max(k) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { what: "zeta1", terms: ctl.max_terms });
    }
    sum -= I * (j * PI / p.ell);
    if x.im == 0.0 {
        sum.im = 0.0;
    }
    Ok(sum)
}

/// `Re ℘₁(x + iδ)` for real `x`. The shifted line carries no poles.
pub fn wp1_shifted(x: f64, p: &EllipticParams, ctl: &SeriesControl) -> Result<f64> {
    let v = wp1(Complex64::new(x, p.delta), p, ctl)?;
    let scale = (PI / (2.0 * p.delta)).powi(2);
    if v.im.abs() >= 1e-10 * scale.max(v.re.abs()) {
        // The reflection symmetry about Im = δ only emerges once the series has converged.
        return Err(Error::NonConvergence { what: "wp1_shifted (realness)", terms: ctl.max_terms });
    }
    Ok(v.re)
}

/// `c_{N;g} = N g² κ² (1/3 − (1/8) Σ_{n≥1} n pⁿ/(1−pⁿ)) / 2`.
pub fn c_const(n_particles: usize, g: f64, p: &EllipticParams, ctl: &SeriesControl) -> Result<f64> {
    if n_particles == 0 {
        return Ok(0.0);
    }
    let s = lambert_series(p.nome, ctl)?;
    let k = p.kappa();
    Ok(n_particles as f64 * g * g * k * k * (1.0 / 3.0 - s / 8.0) / 2.0)
}

/// `Σ_{n≥1} n pⁿ/(1−pⁿ)`, truncated once `Σ_{m>n} m p^m/(1−p)` drops below tolerance.
pub(crate) fn lambert_series(p: f64, ctl: &SeriesControl) -> Result<f64> {
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut pn = 1.0;
    for n in 1..=ctl.max_terms {
        pn *= p;
        let nf = n as f64;
        sum += nf * pn / (1.0 - pn);
        let tail = pn * p * ((nf + 1.0) - nf * p) / (1.0 - p).powi(3);
        if tail <= ctl.rel_tol * sum {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what: "c_const", terms: ctl.max_terms })
}

/// `G = Π_{m≥1} (1 − p^m)`.
pub fn g_const(p: &EllipticParams, ctl: &SeriesControl) -> Result<f64> {
    euler_product(p.nome, ctl)
}

pub(crate) fn euler_product(p: f64, ctl: &SeriesControl) -> Result<f64> {
    if p == 0.0 {
        return Ok(1.0);
    }
    let mut prod = 1.0;
    let mut pm = 1.0;
    for _ in 1..=ctl.max_terms {
        pm *= p;
        prod *= 1.0 - pm;
        if pm * p / ((1.0 - p) * (1.0 - p)) <= ctl.rel_tol {
            return Ok(prod);
        }
    }
    Err(Error::NonConvergence { what: "g_const", terms: ctl.max_terms })
}

/// Brute-force references built from the textbook Weierstrass definitions.
#[cfg(test)]
pub(crate) mod oracle {
    use num_complex::Complex64;

    struct Lattice {
        w1: f64,
        w3: f64,
    }

    impl Lattice {
        /// Symmetric square cutoff `|m|, |n| ≤ k`; returns (℘, ζ).
        fn sums(&self, z: Complex64, k: i64) -> (Complex64, Complex64) {
            let mut wp = 1.0 / (z * z);
            let mut zeta = 1.0 / z;
            for m in -k..=k {
                for n in -k..=k {
                    if m == 0 && n == 0 {
                        continue;
                    }
                    let w = Complex64::new(2.0 * self.w1 * m as f64, 2.0 * self.w3 * n as f64);
                    let d = z - w;
                    wp += 1.0 / (d * d) - 1.0 / (w * w);
                    zeta += 1.0 / d + 1.0 / w + z / (w * w);
                }
            }
            (wp, zeta)
        }

        /// Richardson over cutoffs `k` and `2k`; the symmetric tail is `O(1/k²)`.
        fn extrapolated(&self, z: Complex64, k: i64) -> (Complex64, Complex64) {
            let (a1, b1) = self.sums(z, k);
            let (a2, b2) = self.sums(z, 2 * k);
            ((4.0 * a2 - a1) / 3.0, (4.0 * b2 - b1) / 3.0)
        }
    }

    /// ℘₁ = ℘ + η₁/ω₁ with η₁ = ζ(ω₁).
    pub fn wp1(z: Complex64, ell: f64, delta: f64, k: i64) -> Complex64 {
        let lat = Lattice { w1: ell, w3: delta };
        let (wp, _) = lat.extrapolated(z, k);
        let (_, eta1) = lat.extrapolated(Complex64::new(ell, 0.0), k);
        wp + eta1 / ell
    }

    /// ζ₁(z) = ζ(z) − η₁ z/ω₁.
    pub fn zeta1(z: Complex64, ell: f64, delta: f64, k: i64) -> Complex64 {
        let lat = Lattice { w1: ell, w3: delta };
        let (_, zeta) = lat.extrapolated(z, k);
        let (_, eta1) = lat.extrapolated(Complex64::new(ell, 0.0), k);
        zeta - eta1 * z / ell
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn params_validate() {
        assert!(EllipticParams::new(0.0, 1.0).is_err());
        assert!(EllipticParams::new(1.0, -1.0).is_err());
        assert!(EllipticParams::new(f64::NAN, 1.0).is_err());
        let p = EllipticParams::new(1.3, 0.7).unwrap();
        assert!(p.nome() > 0.0 && p.nome() < 1.0);
        assert_eq!(p.nome(), (-2.0 * PI * 0.7 / 1.3).exp());
    }

    #[test]
    fn wp1_even_and_periodic() {
        let p = EllipticParams::new(1.0, 0.4).unwrap();
        let x = 0.3;
        let a = wp1_real(x, &p, &ctl()).unwrap();
        let b = wp1_real(-x, &p, &ctl()).unwrap();
        assert!((a - b).abs() <= 1e-13 * a.abs());
        let x = 0.17;
        let a = wp1_real(x, &p, &ctl()).unwrap();
        let b = wp1_real(x + 2.0, &p, &ctl()).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn wp1_trigonometric_limit() {
        let ell = 1.0;
        let p = EllipticParams::new(ell, 8.0 * ell).unwrap();
        let k = p.kappa();
        let x = 0.4 * ell;
        let v = wp1_real(x, &p, &ctl()).unwrap();
        let trig = k * k / (k * x).sin().powi(2);
        assert!((v - trig).abs() < 1e-8 * k * k);
    }

    /// Hyperbolic images plus the constant π/(2ℓδ), which is what ℘₁
    /// approaches as ℓ grows; the constant decays only like 1/ℓ.
    fn hyperbolic_images(x: f64, ell: f64, delta: f64) -> f64 {
        let kd = PI / (2.0 * delta);
        let mut s = PI / (2.0 * ell * delta);
        for m in -40i32..=40 {
            let y = x - 2.0 * ell * m as f64;
            s += kd * kd / (kd * y).sinh().powi(2);
        }
        s
    }

    #[test]
    fn wp1_hyperbolic_limit() {
        let delta = 1.0;
        let kd = PI / (2.0 * delta);
        for ratio in [12.0, 100.0] {
            let ell = ratio * delta;
            let p = EllipticParams::new(ell, delta).unwrap();
            for &x in &[0.1, 0.5, 1.3, 3.0] {
                let v = wp1_real(x, &p, &ctl()).unwrap();
                let full = hyperbolic_images(x, ell, delta);
                assert!((v - full).abs() < 1e-10 * v.abs().max(1.0), "x = {x}: {v} vs {full}");
                // The bare 1/sinh² profile is off by exactly the 1/ℓ constant.
                let bare = kd * kd / (kd * x).sinh().powi(2);
                assert!((v - bare - PI / (2.0 * ell * delta)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn wp1_matches_lattice_oracle() {
        let p = EllipticParams::new(1.0, 1.0).unwrap();
        let v = wp1(c(0.25), &p, &ctl()).unwrap();
        let reference = oracle::wp1(c(0.25), 1.0, 1.0, 200);
        assert!((v - reference).norm() < 1e-8 * v.norm(), "{v} vs {reference}");
        // Frozen from the lattice oracle above.
        assert!((v.re - 16.822_354_849_5).abs() < 1e-8, "{}", v.re);
    }

    #[test]
    fn wp1_complex_argument_matches_oracle() {
        let p = EllipticParams::new(1.0, 0.6).unwrap();
        let z = Complex64::new(0.3, 0.45);
        let v = wp1(z, &p, &ctl()).unwrap();
        let reference = oracle::wp1(z, 1.0, 0.6, 150);
        assert!((v - reference).norm() < 1e-8 * v.norm(), "{v} vs {reference}");
    }

    #[test]
    fn wp1_rejects_lattice_points() {
        let p = EllipticParams::new(1.0, 0.5).unwrap();
        for z in [c(0.0), c(2.0), Complex64::new(0.0, 1.0), Complex64::new(-2.0, -1.0), c(1e-12)] {
            assert!(matches!(wp1(z, &p, &ctl()), Err(Error::PoleProximity { .. })), "{z}");
            assert!(matches!(zeta1(z, &p, &ctl()), Err(Error::PoleProximity { .. })), "{z}");
        }
    }

    #[test]
    fn wp1_non_convergence_reported() {
        let p = EllipticParams::new(1.0, 0.01).unwrap();
        let ctl = SeriesControl::new(1e-14, 3).unwrap();
        assert!(matches!(wp1(c(0.3), &p, &ctl), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn zeta1_odd_and_matches_oracle() {
        let p = EllipticParams::new(1.0, 1.0).unwrap();
        let a = zeta1(c(0.3), &p, &ctl()).unwrap();
        let b = zeta1(c(-0.3), &p, &ctl()).unwrap();
        assert!((a + b).norm() < 1e-14 * a.norm());

        let v = zeta1(c(0.25), &p, &ctl()).unwrap();
        let brute = oracle::zeta1(c(0.25), 1.0, 1.0, 200);
        assert!((v - brute).norm() < 1e-8 * v.norm(), "{v} vs {brute}");
        // Direct truncated m-sum at four times the production cutoff.
        let k = p.kappa();
        let mut direct = Complex64::new(0.0, 0.0);
        for m in -40i32..=40 {
            direct += k * cot(k * (c(0.25) - Complex64::new(0.0, 2.0 * m as f64)));
        }
        assert!((v - direct).norm() < 1e-13 * v.norm());
        assert!((v.re - 3.800_572_088_8).abs() < 1e-8, "{}", v.re);
    }

    #[test]
    fn zeta1_quasi_periodicity() {
        let p = EllipticParams::new(1.0, 0.7).unwrap();
        let z = Complex64::new(0.31, 0.2);
        let a = zeta1(z, &p, &ctl()).unwrap();
        let b = zeta1(z + Complex64::new(0.0, 1.4), &p, &ctl()).unwrap();
        assert!((b - (a - I * PI)).norm() < 1e-12);
        let c1 = zeta1(z + 2.0, &p, &ctl()).unwrap();
        assert!((c1 - a).norm() < 1e-12);
        // ζ₁(iδ) = −iκ by oddness plus quasi-periodicity.
        let mid = zeta1(Complex64::new(0.0, 0.7), &p, &ctl()).unwrap();
        assert!((mid + I * p.kappa()).norm() < 1e-12);
    }

    #[test]
    fn zeta1_derivative_is_minus_wp1() {
        let ell = 1.0;
        let p = EllipticParams::new(ell, 0.5).unwrap();
        let x = 0.2 * ell;
        let h = 1e-4 * ell;
        let d = (zeta1(c(x + h), &p, &ctl()).unwrap() - zeta1(c(x - h), &p, &ctl()).unwrap()) / (2.0 * h);
        let w = wp1(c(x), &p, &ctl()).unwrap();
        assert!((d + w).norm() < 1e-6 * w.norm());
    }

    #[test]
    fn wp1_prime_matches_central_difference() {
        let p = EllipticParams::new(1.0, 0.3).unwrap();
        for &x in &[0.15, 0.5, -0.8] {
            let h = 1e-5;
            let fd = (wp1_real(x + h, &p, &ctl()).unwrap() - wp1_real(x - h, &p, &ctl()).unwrap()) / (2.0 * h);
            let d = wp1_prime(c(x), &p, &ctl()).unwrap().re;
            assert!((fd - d).abs() < 1e-6 * d.abs().max(1.0), "x = {x}: {fd} vs {d}");
        }
    }

    #[test]
    fn shifted_is_real_and_hyperbolic_limit() {
        let ell = 1.0;
        let p = EllipticParams::new(ell, 0.4).unwrap();
        for &x in &[0.1, 0.5, 0.9] {
            let v = wp1(Complex64::new(x * ell, p.delta()), &p, &ctl()).unwrap();
            assert!(v.im.abs() < 1e-12 * v.norm().max(1.0));
        }

        let delta = 1.0;
        let p = EllipticParams::new(12.0 * delta, delta).unwrap();
        let kd = PI / (2.0 * delta);
        let x = 0.3 * delta;
        let v = wp1_shifted(x, &p, &ctl()).unwrap();
        let offset = PI / (2.0 * p.ell() * delta);
        let v_inf = v - offset;
        assert!((v_inf + kd * kd / (kd * x).cosh().powi(2)).abs() < 1e-6 * kd * kd);
        // Mean over a period is zero, so the shifted function changes sign.
        let far = wp1_shifted(p.ell() * 0.9, &p, &ctl()).unwrap();
        assert!(v < 0.0 && far > 0.0);
    }

    #[test]
    fn shifted_matches_oracle() {
        let p = EllipticParams::new(1.0, 0.5).unwrap();
        let v = wp1_shifted(0.4, &p, &ctl()).unwrap();
        // Positive here: at ℓ = 2δ the zero-mean compensation dominates at x = 0.4.
        assert!(v > 0.0);
        let brute = oracle::wp1(Complex64::new(0.4, 0.5), 1.0, 0.5, 200);
        assert!((v - brute.re).abs() < 1e-8 * v.abs(), "{v} vs {brute}");
        assert!((v - 0.403_320_695_5).abs() < 1e-8, "{v}");
    }

    #[test]
    fn c_const_cases() {
        let p = EllipticParams::new(1.0, 0.3).unwrap();
        assert_eq!(c_const(0, 2.0, &p, &ctl()).unwrap(), 0.0);

        let far = EllipticParams::new(1.0, 20.0).unwrap();
        let k = far.kappa();
        let v = c_const(3, 1.5, &far, &ctl()).unwrap();
        let limit = 3.0 * 1.5 * 1.5 * k * k / 6.0;
        assert!((v - limit).abs() < 1e-10 * limit);

        // Direct summation to 10⁶ terms.
        let q = p.nome();
        let mut s = 0.0;
        let mut qn = 1.0;
        for n in 1..=1_000_000u32 {
            qn *= q;
            if qn == 0.0 {
                break;
            }
            s += n as f64 * qn / (1.0 - qn);
        }
        let k = p.kappa();
        let direct = 2.0 * 4.0 * k * k * (1.0 / 3.0 - s / 8.0) / 2.0;
        let v = c_const(2, 2.0, &p, &ctl()).unwrap();
        assert!((v - direct).abs() < 1e-12 * direct);
        assert!((v - 2.994_555_527_7).abs() < 1e-9, "{v}");
    }

    #[test]
    fn c_const_linear_in_n_quadratic_in_g() {
        let p = EllipticParams::new(1.0, 0.2).unwrap();
        let base = c_const(1, 1.0, &p, &ctl()).unwrap();
        let v = c_const(3, 2.0, &p, &ctl()).unwrap();
        assert!((v - 12.0 * base).abs() < 1e-13 * v);
    }

    #[test]
    fn g_const_cases() {
        assert_eq!(euler_product(0.0, &ctl()).unwrap(), 1.0);
        let a = g_const(&EllipticParams::new(1.0, 0.3).unwrap(), &ctl()).unwrap();
        let b = g_const(&EllipticParams::new(1.0, 0.6).unwrap(), &ctl()).unwrap();
        assert!(a < b && b <= 1.0 && a > 0.0);

        let mut direct = 1.0;
        for m in 1..=200 {
            direct *= 1.0 - 0.5f64.powi(m);
        }
        let v = euler_product(0.5, &ctl()).unwrap();
        assert!((v - direct).abs() < 1e-12);
        assert!((v - 0.288_788_095_086_6).abs() < 1e-12, "{v}");
    }

    #[test]
    fn truncation_independent_of_cutoff() {
        let p = EllipticParams::new(1.0, 0.15).unwrap();
        let loose = SeriesControl::new(1e-12, 10_000).unwrap();
        let tight = SeriesControl::new(1e-12, 20_000).unwrap();
        for &x in &[0.1, 0.4, 0.77] {
            let a = wp1_real(x, &p, &loose).unwrap();
            let b = wp1_real(x, &p, &tight).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    proptest! {
        #[test]
        fn wp1_symmetries_random(x in -0.95f64..0.95, dr in 0.2f64..3.0) {
            prop_assume!(x.abs() > 1e-3);
            let p = EllipticParams::new(1.0, dr).unwrap();
            let a = wp1_real(x, &p, &ctl()).unwrap();
            let b = wp1_real(-x, &p, &ctl()).unwrap();
            let c2 = wp1_real(x + 2.0, &p, &ctl()).unwrap();
            prop_assert!((a - b).abs() <= 1e-11 * a.abs());
            prop_assert!((a - c2).abs() <= 1e-11 * a.abs());
        }

        #[test]
        fn zeta_derivative_identity_random(x in 0.05f64..0.95, dr in 0.2f64..2.0) {
            let p = EllipticParams::new(1.0, dr).unwrap();
            let h = 1e-3;
            let z = |t: f64| zeta1(c(t), &p, &ctl()).unwrap().re;
            // Fourth-order central difference.
            let d = (-z(x + 2.0 * h) + 8.0 * z(x + h) - 8.0 * z(x - h) + z(x - 2.0 * h)) / (12.0 * h);
            let w = wp1_real(x, &p, &ctl()).unwrap();
            prop_assert!((d + w).abs() < 1e-6 * w.abs());
        }
    }
}
