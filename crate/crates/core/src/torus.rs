//! Heights on the moduli space of once-punctured hyperbolic tori.
//!
//! Points are Fenchel-Nielsen pairs `(ℓ, θ)`. On the reduced wedge
//! `ℓ ∈ (0, ℓ_max]`, `θ ∈ [θ_min(ℓ), π]` the maximal height of a closed
//! geodesic is `log sinh(ℓ/2)`. [`torus_oracle`] checks that formula from a
//! matrix group built directly from `(ℓ, θ)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// Slack for boundary membership of the reduced wedge.
const WEDGE_TOL: f64 = 1e-9;

pub fn ell_min() -> f64 {
    2.0 * (1.0 + 2f64.sqrt()).ln()
}

pub fn ell_max() -> f64 {
    2.0 * ((3.0 + 5f64.sqrt()) / 2.0).ln()
}

pub fn theta_min(ell: f64) -> f64 {
    if ell < ell_min() {
        0.0
    } else {
        // clamp guards sinh(ℓ_min/2) landing a hair below 1
        4.0 * PI / ell * (ell / 2.0).sinh().max(1.0).acosh()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FnPoint {
    pub ell: f64,
    pub theta: f64,
}

impl FnPoint {
    pub fn new(ell: f64, theta: f64) -> Self {
        FnPoint { ell, theta }
    }

    /// The modular torus.
    pub fn modular() -> Self {
        FnPoint::new(ell_max(), PI)
    }

    fn twist(&self) -> f64 {
        self.theta * self.ell / (4.0 * PI)
    }
}

/// Applies the full twist and the elliptic reflection, then checks the wedge.
///
/// Reducing `ℓ` needs a change of curve, which is not implemented; points
/// still outside the wedge are rejected.
pub fn fn_reduce(p: FnPoint) -> Result<FnPoint> {
    if !(p.ell > 0.0 && p.ell.is_finite() && p.theta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need ell > 0 and finite theta, got ({}, {})",
            p.ell, p.theta
        )));
    }
    let mut theta = p.theta.rem_euclid(2.0 * PI);
    if 2.0 * PI - theta < 1e-12 {
        theta = 0.0;
    }
    if theta > PI {
        theta = 2.0 * PI - theta;
    }
    if p.ell > ell_max() + WEDGE_TOL || theta < theta_min(p.ell) - WEDGE_TOL {
        return Err(Error::RequiresCurveChange {
            ell: p.ell,
            theta: p.theta,
        });
    }
    Ok(FnPoint::new(p.ell, theta))
}

/// `h''` on the reduced wedge.
pub fn h2(p: FnPoint) -> f64 {
    (p.ell / 2.0).sinh().ln()
}

/// Hurwitz constant `1/(2 exp h'')`.
pub fn hurwitz_k(p: FnPoint) -> f64 {
    0.5 / (p.ell / 2.0).sinh()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PentagonData {
    /// Angle at the origin of the vertex `v`, `tan(α/2) = e^{-ℓ/2}`.
    pub alpha: f64,
    /// Length of the dual curve.
    pub ell_prime: f64,
    pub r_c: f64,
    pub r: f64,
    pub r_prime: f64,
    pub d_ac: f64,
    pub d_a_prime_c: f64,
    /// Lower bound on the diameter of a line crossing both outer gaps.
    pub f: f64,
    /// `d(A,C) − r − r_c`; positivity makes the tangent-circle bound applicable.
    pub t: f64,
    /// `t(ℓ, θ_min(ℓ))·sinh²(ℓ/2)`.
    pub t_numerator: f64,
}

pub fn pentagon(p: FnPoint) -> PentagonData {
    let l2 = p.ell / 2.0;
    let a = p.twist();
    let coth = 1.0 / l2.tanh();
    let r = 0.5 / a.cosh().powi(2);
    let r_prime = 0.5 / (l2 - a).cosh().powi(2);
    let d_ac = coth - a.tanh();
    let d_a_prime_c = coth - (l2 - a).tanh();
    let r_c = 0.5 / l2.sinh().powi(2);
    PentagonData {
        alpha: 2.0 * (-l2).exp().atan(),
        ell_prime: 2.0 * (1.0 / (p.ell / 4.0).tanh()).ln(),
        r_c,
        r,
        r_prime,
        d_ac,
        d_a_prime_c,
        f: r + d_ac + d_a_prime_c + r_prime,
        t: d_ac - r - r_c,
        t_numerator: t_numerator(p.ell),
    }
}

fn t_numerator(ell: f64) -> f64 {
    let (s, c) = ((ell / 2.0).sinh(), (ell / 2.0).cosh());
    s * (c - (c * c - 2.0).max(0.0).sqrt()) - 1.0
}

/// Local finite-difference signs, stepping into the wedge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Monotonicity {
    pub f_decreasing_in_ell: bool,
    pub f_decreasing_in_theta: bool,
    pub t_increasing_in_theta: bool,
}

pub fn monotonicity(p: FnPoint, step: f64) -> Monotonicity {
    let f = |q: FnPoint| pentagon(q).f;
    let t = |q: FnPoint| pentagon(q).t;
    // θ_min grows with ℓ, so shrinking ℓ keeps θ admissible
    let lo = FnPoint::new(p.ell - step, p.theta);
    let (th0, th1) = if p.theta + step <= PI {
        (p.theta, p.theta + step)
    } else {
        (p.theta - step, p.theta)
    };
    let (q0, q1) = (FnPoint::new(p.ell, th0), FnPoint::new(p.ell, th1));
    Monotonicity {
        f_decreasing_in_ell: f(lo) >= f(p),
        f_decreasing_in_theta: f(q0) >= f(q1),
        t_increasing_in_theta: t(q0) <= t(q1),
    }
}

/// Radii `(R, S)` of the circles through the tangency data `(r, s, t)`.
pub fn tangent_circle_radii(r: f64, s: f64, t: f64) -> Result<(f64, f64)> {
    if !(s >= 0.0 && r >= s && r + s > 0.0 && t > r + s) {
        return Err(Error::OutOfLemmaDomain);
    }
    let t2 = t * t;
    let a = t2 - (r + s) * (r + s);
    // positive root of a·X² + b·X − t²/4, in cancellation-free form
    let root = |b: f64| t2 / (2.0 * (b + (b * b + a * t2).sqrt()));
    Ok((root(t2 * (s - r)), root(t2 * (r - s))))
}

/// Residual of the defining quadratics, for checking.
pub fn tangent_residuals(r: f64, s: f64, t: f64, big_r: f64, big_s: f64) -> (f64, f64) {
    let t2 = t * t;
    let a = t2 - (r + s) * (r + s);
    (
        big_r * big_r * a + big_r * t2 * (s - r) - t2 / 4.0,
        big_s * big_s * a + big_s * t2 * (r - s) - t2 / 4.0,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct M2([f64; 4]);

impl M2 {
    const ID: M2 = M2([1.0, 0.0, 0.0, 1.0]);

    fn mul(&self, o: &M2) -> M2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        M2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    fn inv(&self) -> M2 {
        let [a, b, c, d] = self.0;
        M2([d, -b, -c, a])
    }

    fn trace(&self) -> f64 {
        self.0[0] + self.0[3]
    }

    fn c(&self) -> f64 {
        self.0[2]
    }
}

/// Generators `X, Y, X⁻¹, Y⁻¹` with the commutator parabolic at ∞.
fn generators(p: FnPoint) -> Result<[M2; 4]> {
    let l2 = p.ell / 2.0;
    let a = p.twist();
    let coth = 1.0 / l2.tanh();
    // traces of Y and XY from perpendicular-axis products
    let y = 2.0 * a.cosh() * coth;
    let z = 2.0 * (l2 - a).cosh() * coth;
    let lam = l2.exp();
    let x = M2([lam, 0.0, 0.0, 1.0 / lam]);
    let pp = (z - y / lam) / (lam - 1.0 / lam);
    let s = y - pp;
    let ym = M2([pp, 1.0, pp * s - 1.0, s]);
    let k = x.mul(&ym).mul(&x.inv()).mul(&ym.inv());
    if (k.trace() + 2.0).abs() > 1e-9 {
        return Err(Error::ConstructionFailure(format!(
            "tr[X,Y] = {} instead of -2",
            k.trace()
        )));
    }
    let [ka, _, kc, kd] = k.0;
    if kc.abs() < 1e-300 {
        return Err(Error::ConstructionFailure("commutator already fixes infinity".into()));
    }
    let z0 = (ka - kd) / (2.0 * kc);
    let m = M2([0.0, -1.0, 1.0, -z0]);
    let conj = |g: &M2| m.mul(g).mul(&m.inv());
    let (x, ym) = (conj(&x), conj(&ym));
    Ok([x, ym, x.inv(), ym.inv()])
}

/// Freely reduced words up to `len`, shortest first; letters index the
/// generator array and `g ^ 2` is the inverse of `g`.
fn reduced_words(len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(layer.len() * 3);
        for w in &layer {
            for g in 0..4u8 {
                if w.last().is_some_and(|&l| l ^ 2 == g) {
                    continue;
                }
                let mut v: Vec<u8> = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn word_matrix(gens: &[M2; 4], w: impl IntoIterator<Item = u8>) -> M2 {
    w.into_iter().fold(M2::ID, |m, g| m.mul(&gens[g as usize]))
}

/// Letters `X`, `Y`; lower case marks an inverse.
fn word_text(w: &[u8]) -> String {
    w.iter().map(|&g| ['X', 'Y', 'x', 'y'][g as usize]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusOracle {
    pub point: FnPoint,
    pub word_len: usize,
    pub min_height: f64,
    pub log_min_height: f64,
    pub witness: String,
    /// Smallest `|c|` over the ball, used as the unit of scale.
    pub c_scale: f64,
    /// The scale dropped when the ball grew by one letter.
    pub scale_refined: bool,
    pub classes: usize,
}

/// Minimum over conjugacy classes of the largest conjugate height, over
/// cyclically reduced words of length at most `word_len`.
pub fn torus_oracle(p: FnPoint, word_len: usize, exec: Exec) -> Result<TorusOracle> {
    if word_len == 0 {
        return Err(Error::InvalidArgument("word_len must be at least 1".into()));
    }
    let p = fn_reduce(p)?;
    let gens = generators(p)?;
    let words = reduced_words(word_len + 1);
    let cs = par::map(exec, &words, |w| word_matrix(&gens, w.iter().copied()).c().abs());
    let min_c = |v: &[f64]| v.iter().copied().filter(|&c| c > 1e-9).fold(f64::INFINITY, f64::min);
    let inner = words.iter().take_while(|w| w.len() <= word_len).count();
    let ball = min_c(&cs[..inner]);
    let c_scale = min_c(&cs);
    if !c_scale.is_finite() {
        return Err(Error::ConstructionFailure("every word fixes infinity".into()));
    }
    let classes: Vec<&Vec<u8>> = words[..inner]
        .iter()
        .filter(|w| !w.is_empty() && w[0] ^ 2 != *w.last().unwrap())
        .collect();
    let heights = par::map(exec, &classes, |w| {
        let tr = word_matrix(&gens, w.iter().copied()).trace().abs();
        if tr <= 2.0 + 1e-9 {
            return None;
        }
        let n = w.len();
        let c = (0..n)
            .map(|k| word_matrix(&gens, w[k..].iter().chain(&w[..k]).copied()).c().abs() / c_scale)
            .filter(|&c| c > 1e-9)
            .fold(f64::INFINITY, f64::min);
        Some((tr * tr - 4.0).sqrt() / (2.0 * c))
    });
    // first minimum in word order, so the shortest witness wins
    let (best, w) = heights
        .iter()
        .zip(&classes)
        .filter_map(|(h, w)| h.map(|h| (h, *w)))
        .fold(None, |acc: Option<(f64, &Vec<u8>)>, (h, w)| match acc {
            Some((b, _)) if b <= h => acc,
            _ => Some((h, w)),
        })
        .ok_or(Error::EmptySearch)?;
    Ok(TorusOracle {
        point: p,
        word_len,
        min_height: best,
        log_min_height: best.ln(),
        witness: word_text(w),
        c_scale,
        scale_refined: c_scale < ball,
        classes: classes.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRow {
    pub ell: f64,
    pub theta: f64,
    pub h2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub f: f64,
    pub t: f64,
}

/// `n × n` samples of the wedge: `ℓ_i = ℓ_max (i+1)/n`, `θ` evenly spaced on
/// `[θ_min(ℓ_i), π]`.
pub fn grid(n: usize, exec: Exec) -> Vec<FnPoint> {
    let pts: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    par::map(exec, &pts, |&(i, j)| {
        let ell = ell_max() * (i + 1) as f64 / n as f64;
        let lo = theta_min(ell).min(PI);
        let theta = if n == 1 {
            PI
        } else {
            lo + (PI - lo) * j as f64 / (n - 1) as f64
        };
        FnPoint::new(ell, theta)
    })
}

pub fn grid_rows(n: usize, exec: Exec) -> Vec<GridRow> {
    par::map(exec, &grid(n, exec), |&p| {
        let pd = pentagon(p);
        GridRow {
            ell: p.ell,
            theta: p.theta,
            h2: h2(p),
            k: hurwitz_k(p),
            f: pd.f,
            t: pd.t,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((ell_min() - 1.762747174039086).abs() < 1e-12);
        assert_eq!(theta_min(ell_min()), 0.0);
        assert!((theta_min(ell_max()) - PI).abs() < 1e-12);
        assert!(((ell_max() / 2.0).sinh() - 5f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_examples() {
        let p = fn_reduce(FnPoint::new(1.0, 1.5 * PI)).unwrap();
        assert!((p.theta - PI / 2.0).abs() < 1e-12);
        assert_eq!(fn_reduce(FnPoint::new(1.0, 2.0 * PI)).unwrap().theta, 0.0);
        assert_eq!(fn_reduce(FnPoint::modular()).unwrap(), FnPoint::modular());
        assert!(matches!(
            fn_reduce(FnPoint::new(2.0, 1.0)),
            Err(Error::RequiresCurveChange { .. })
        ));
        assert!(matches!(
            fn_reduce(FnPoint::new(1.9, 0.5)),
            Err(Error::RequiresCurveChange { .. })
        ));
        assert!(matches!(fn_reduce(FnPoint::new(0.0, 0.0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn h2_values() {
        assert!((h2(FnPoint::modular()) - (5f64.sqrt() / 2.0).ln()).abs() < 1e-12);
        assert!(h2(FnPoint::new(ell_min(), 0.0)).abs() < 1e-12);
        assert!((hurwitz_k(FnPoint::modular()) - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pentagon_values() {
        let pd = pentagon(FnPoint::modular());
        assert!((pd.f - 2.58885438).abs() < 1e-8);
        assert!((pd.t_numerator - 0.118).abs() < 1e-3);
        let l = ell_max();
        assert!(((pd.alpha / 2.0).tan() - (-l / 2.0).exp()).abs() < 1e-12);
        assert_eq!(pentagon(FnPoint::new(1.0, 0.0)).r, 0.5);
        // at θ_min the bound t equals numerator / sinh²
        let p = FnPoint::new(1.85, theta_min(1.85));
        let pd = pentagon(p);
        assert!((pd.t - pd.t_numerator / (0.925f64).sinh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn tangent_circles() {
        let (r, s) = tangent_circle_radii(0.25, 0.25, 1.0).unwrap();
        assert!((r - 1.0 / 3f64.sqrt()).abs() < 1e-15 && r == s);
        let (r, s) = tangent_circle_radii(0.3, 0.2, 1.0).unwrap();
        assert!(r >= s);
        let (e1, e2) = tangent_residuals(0.3, 0.2, 1.0, r, s);
        assert!(e1.abs() < 1e-12 && e2.abs() < 1e-12);
        assert_eq!(tangent_circle_radii(0.5, 0.5, 1.0), Err(Error::OutOfLemmaDomain));
        assert_eq!(tangent_circle_radii(0.1, 0.2, 1.0), Err(Error::OutOfLemmaDomain));
    }

    #[test]
    fn oracle_modular() {
        let o = torus_oracle(FnPoint::modular(), 6, Exec::Parallel).unwrap();
        assert!((o.min_height - 5f64.sqrt() / 2.0).abs() < 1e-9);
        let s = torus_oracle(FnPoint::modular(), 6, Exec::Sequential).unwrap();
        assert_eq!(o, s);
    }

    #[test]
    fn oracle_low_length() {
        for th in [0.0, 1.0, 2.5] {
            let o = torus_oracle(FnPoint::new(1.0, th), 6, Exec::Parallel).unwrap();
            assert!((o.log_min_height - (0.5f64).sinh().ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_shape() {
        let g = grid(4, Exec::Sequential);
        assert_eq!(g.len(), 16);
        assert!(g.iter().all(|&p| fn_reduce(p).is_ok()));
        assert_eq!(grid(4, Exec::Parallel), g);
    }
}
