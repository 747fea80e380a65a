//! Limit laws: free Poisson, Fuss-Catalan, products and poset laws.
//!
//! Entropies are `∫ −x ln x dμ(x)` in nats.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{count_poset_tuples, enumerate_nc, fuss_catalan, ConstraintPoset};
use crate::error::{Error, Result};
use crate::moments::DistributionId;
use crate::rational::{self, from_biguint, int, Rational};

/// Exact moments `m_1..m_P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentSequence {
    #[serde(with = "rational::serde_string_vec")]
    moments: Vec<Rational>,
}

impl MomentSequence {
    pub fn new(moments: Vec<Rational>) -> Result<Self> {
        if let Some(p) = moments.iter().position(|m| !m.is_positive()) {
            return Err(Error::InvalidParameter(format!("moment m_{} is not positive", p + 1)));
        }
        Ok(Self { moments })
    }

    pub fn from_fn(p_max: usize, f: impl Fn(usize) -> Rational) -> Result<Self> {
        Self::new((1..=p_max).map(f).collect())
    }

    pub fn moments(&self) -> &[Rational] {
        &self.moments
    }

    /// `m_p`, with `m_0 = 1`.
    pub fn get(&self, p: usize) -> Option<Rational> {
        if p == 0 {
            Some(Rational::one())
        } else {
            self.moments.get(p - 1).cloned()
        }
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    /// Checks that the Hankel determinants `det(m_{i+j})_{0≤i,j<r}` are
    /// positive for every `r ≤ window` the sequence is long enough for.
    pub fn hankel_positive(&self, window: usize) -> bool {
        let max_r = (self.len() / 2 + 1).min(window);
        (1..=max_r).all(|r| {
            let h: Vec<Vec<Rational>> = (0..r)
                .map(|i| (0..r).map(|j| self.get(i + j).unwrap()).collect())
                .collect();
            determinant(h).is_positive()
        })
    }
}

impl fmt::Display for MomentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moments.iter().map(rational::format).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn determinant(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            let factor = &a[r][col] / &p;
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// Probability measure `atom·δ_0 + density(x) dx` on `[lo, hi]`.
#[derive(Clone)]
pub struct DensityFn {
    pub support: (f64, f64),
    pub atom: f64,
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for DensityFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityFn")
            .field("support", &self.support)
            .field("atom", &self.atom)
            .finish_non_exhaustive()
    }
}

impl DensityFn {
    pub fn new(support: (f64, f64), atom: f64, density: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            support,
            atom,
            density: Arc::new(density),
        }
    }

    /// Density of the absolutely continuous part, zero off the support.
    pub fn density(&self, x: f64) -> f64 {
        if x <= self.support.0 || x > self.support.1 {
            0.0
        } else {
            (self.density)(x)
        }
    }

    /// `∫ f(x) density(x) dx` over the support (the atom is not included).
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let (lo, hi) = self.support;
        tanh_sinh(|x| f(x) * (self.density)(x), lo, hi, 1e-13)
    }

    pub fn total_mass(&self) -> f64 {
        self.atom + self.integrate(|_| 1.0)
    }

    /// `∫ x^p dμ` for `p ≥ 1`.
    pub fn moment(&self, p: u32) -> f64 {
        self.integrate(|x| x.powi(p as i32))
    }

    /// `∫ −x ln x dμ`.
    pub fn entropy(&self) -> f64 {
        self.integrate(|x| -x * x.ln())
    }

    /// Density sampled at `grid` evenly spaced points of `(lo, hi]`.
    pub fn grid(&self, grid: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support;
        (1..=grid)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / grid as f64;
                (x, self.density(x))
            })
            .collect()
    }
}

/// Tanh-sinh quadrature on `[a, b]`, tolerating integrable endpoint
/// singularities. Nodes are placed by their distance to the nearer
/// endpoint so that points next to `a = 0` keep full precision.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let len = b - a;
    if len <= 0.0 {
        return 0.0;
    }
    let node_sum = |h: f64, odd_only: bool| -> f64 {
        let mut sum = 0.0;
        let mut j = if odd_only { 1 } else { 0 };
        let step = if odd_only { 2 } else { 1 };
        loop {
            let t = j as f64 * h;
            if t > 6.5 {
                break;
            }
            let u = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u).exp();
            // distance to the nearer endpoint and the Jacobian
            let delta = len * e / (1.0 + e);
            let w = len * FRAC_PI_2 * t.cosh() * 2.0 * e / ((1.0 + e) * (1.0 + e));
            if delta <= 0.0 || w <= 0.0 || a + delta == a && a != 0.0 {
                break;
            }
            let lo = a + delta;
            let hi = b - delta;
            if j == 0 {
                sum += w * f(lo);
            } else {
                let (fl, fh) = (f(lo), if hi < b { f(hi) } else { 0.0 });
                let add = w * (fl + fh);
                if !add.is_finite() {
                    break;
                }
                sum += add;
            }
            j += step;
        }
        sum
    };
    // j = 0 contributes the midpoint once; the j ≥ 1 terms pair up nodes.
    let mut h = 1.0;
    let mut total = node_sum(h, false);
    let mut estimate = total * h;
    for _ in 0..12 {
        h /= 2.0;
        total += node_sum(h, true);
        let next = total * h;
        if (next - estimate).abs() <= tol * next.abs().max(1.0) {
            return next;
        }
        estimate = next;
    }
    estimate
}

fn check_c(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("free Poisson parameter must be positive, got {c}")))
    }
}

/// Free Poisson law `π_c`.
pub fn mp_density(c: f64) -> Result<DensityFn> {
    check_c(c)?;
    let root = c.sqrt();
    let (lo, hi) = ((1.0 - root).powi(2), (1.0 + root).powi(2));
    let atom = (1.0 - c).max(0.0);
    Ok(DensityFn::new((lo, hi), atom, move |x| {
        let q = (x - lo) * (hi - x);
        if q <= 0.0 {
            0.0
        } else {
            q.sqrt() / (2.0 * std::f64::consts::PI * x)
        }
    }))
}

/// `m_p(π_c) = Σ_{σ ∈ NC(p)} c^{#σ}`, evaluated through Narayana numbers.
pub fn mp_moment(c: &Rational, p: usize) -> Result<Rational> {
    if !c.is_positive() {
        return Err(Error::InvalidParameter("free Poisson parameter must be positive".into()));
    }
    if p == 0 {
        return Ok(Rational::one());
    }
    let mut sum = Rational::zero();
    let mut power = Rational::one();
    for blocks in 1..=p {
        power *= c;
        sum += from_biguint(&narayana(p, blocks)) * &power;
    }
    Ok(sum)
}

/// Number of `NC(p)` elements with `k` blocks.
pub fn narayana(p: usize, k: usize) -> BigUint {
    if k == 0 || k > p {
        return BigUint::zero();
    }
    let b = |n: usize, r: usize| num_integer::binomial(BigUint::from(n), BigUint::from(r));
    b(p, k) * b(p, k - 1) / BigUint::from(p)
}

pub fn mp_entropy(c: f64) -> Result<f64> {
    check_c(c)?;
    Ok(if c >= 1.0 { -0.5 - c * c.ln() } else { -c * c / 2.0 })
}

pub fn fc_moment(s: usize, p: usize) -> BigUint {
    fuss_catalan(s, p)
}

/// Right end `(s+1)^{s+1}/s^s` of the support of `π^{(s)}`.
pub fn fc_support(s: usize) -> Rational {
    let s = s.max(1) as i64;
    rational::pow(&int(s + 1), s + 1) / rational::pow(&int(s), s)
}

/// `−Σ_{j=2}^{s+1} 1/j`.
pub fn fc_entropy_exact(s: usize) -> Rational {
    -(2..=s as i64 + 1).map(|j| rational::ratio(1, j)).sum::<Rational>()
}

pub fn fc_entropy(s: usize) -> f64 {
    rational::to_f64(&fc_entropy_exact(s))
}

/// Density of `π^{(2)}` on `(0, 27/4]`.
pub fn fc2_density() -> DensityFn {
    let pref = 2f64.cbrt() * 3f64.sqrt() / (12.0 * std::f64::consts::PI);
    DensityFn::new((0.0, 6.75), 0.0, move |x| {
        let r = (81.0 - 12.0 * x).max(0.0).sqrt();
        let a = 27.0 + 3.0 * r;
        let num = 2f64.cbrt() * a.powf(2.0 / 3.0) - 6.0 * x.cbrt();
        (pref * num / (x.powf(2.0 / 3.0) * a.cbrt())).max(0.0)
    })
}

/// `π^{(1)}_c` on the grid when `s = 1`, `π^{(2)}` when `s = 2`.
pub fn law_density(s: usize) -> Result<DensityFn> {
    match s {
        1 => mp_density(1.0),
        2 => Ok(fc2_density()),
        _ => Err(Error::InvalidParameter(format!(
            "no closed-form density for Fuss-Catalan order {s}"
        ))),
    }
}

/// Moments of a classical product of independent laws.
pub fn product_moments(seqs: &[MomentSequence]) -> Result<MomentSequence> {
    let Some(first) = seqs.first() else {
        return Err(Error::InvalidParameter("empty product".into()));
    };
    let len = first.len();
    if let Some(bad) = seqs.iter().find(|s| s.len() != len) {
        return Err(Error::LengthMismatch(bad.len(), len));
    }
    MomentSequence::new(
        (0..len)
            .map(|i| seqs.iter().map(|s| s.moments[i].clone()).product())
            .collect(),
    )
}

/// `m_p = count_poset_tuples(poset, p)` for `p ≤ p_max`.
pub fn poset_law_moments(poset: &ConstraintPoset, p_max: usize) -> Result<MomentSequence> {
    MomentSequence::new(
        (1..=p_max)
            .map(|p| count_poset_tuples(poset, p).map(|c| from_biguint(&c)))
            .collect::<Result<_>>()?,
    )
}

/// Moments of `π^{(1)} ⊠ ν`: the free cumulants of the compression are the
/// moments of `ν`, so `m_p = Σ_{σ ∈ NC(p)} Π_{V ∈ σ} ν_{|V|}`.
pub fn free_poisson_compression(nu: &MomentSequence) -> Result<MomentSequence> {
    let mut out = Vec::with_capacity(nu.len());
    for p in 1..=nu.len() {
        let mut sum = Rational::zero();
        for sigma in enumerate_nc(p)?.iter() {
            sum += sigma
                .blocks()
                .iter()
                .map(|b| nu.moments[b.len() - 1].clone())
                .product::<Rational>();
        }
        out.push(sum);
    }
    MomentSequence::new(out)
}

/// `m_p` of a law at unit scale, if known.
pub fn law_moment(law: &DistributionId, p: usize) -> Option<Rational> {
    match law {
        DistributionId::MaximallyMixed { .. } | DistributionId::Dirac => Some(Rational::one()),
        DistributionId::FreePoisson { c } => mp_moment(c, p).ok(),
        DistributionId::FussCatalan { s } => Some(from_biguint(&fuss_catalan(*s, p))),
        DistributionId::ClassicalProduct { factors } => factors.iter().map(|f| law_moment(f, p)).product(),
        DistributionId::PosetLaw { poset } => count_poset_tuples(poset, p).ok().map(|c| from_biguint(&c)),
        DistributionId::Unknown { moments } => {
            if p == 0 {
                Some(Rational::one())
            } else {
                moments.get(p - 1).cloned()
            }
        }
    }
}

/// `∫ −x ln x dμ`, if known in closed form.
pub fn law_entropy(law: &DistributionId) -> Option<f64> {
    match law {
        DistributionId::MaximallyMixed { .. } | DistributionId::Dirac => Some(0.0),
        DistributionId::FreePoisson { c } => mp_entropy(rational::to_f64(c)).ok(),
        DistributionId::FussCatalan { s } => Some(fc_entropy(*s)),
        DistributionId::ClassicalProduct { factors } => {
            // E[−XY ln XY] = H(X) E[Y] + E[X] H(Y) for independent X, Y
            let means: Vec<f64> = factors
                .iter()
                .map(|f| law_moment(f, 1).map(|m| rational::to_f64(&m)))
                .collect::<Option<_>>()?;
            let hs: Vec<f64> = factors.iter().map(law_entropy).collect::<Option<_>>()?;
            Some(
                (0..factors.len())
                    .map(|i| hs[i] * (0..factors.len()).filter(|&j| j != i).map(|j| means[j]).product::<f64>())
                    .sum(),
            )
        }
        DistributionId::PosetLaw { .. } | DistributionId::Unknown { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn nc_sum(c: &Rational, p: usize) -> Rational {
        enumerate_nc(p)
            .unwrap()
            .iter()
            .map(|s| rational::pow(c, s.block_count() as i64))
            .sum()
    }

    #[test]
    fn mp_moments_match_nc_enumeration() {
        for c in [int(1), ratio(1, 2), int(3), ratio(7, 5)] {
            for p in 1..=8 {
                assert_eq!(mp_moment(&c, p).unwrap(), nc_sum(&c, p));
            }
            assert_eq!(mp_moment(&c, 2).unwrap(), &c * &c + &c);
            assert_eq!(mp_moment(&c, 1).unwrap(), c);
        }
        assert_eq!(mp_moment(&int(1), 3).unwrap(), int(5));
        assert!(mp_moment(&int(0), 2).is_err());
    }

    #[test]
    fn mp_density_shape() {
        let d = mp_density(1.0).unwrap();
        assert_eq!(d.support, (0.0, 4.0));
        assert_eq!(d.atom, 0.0);
        assert!((mp_density(0.25).unwrap().atom - 0.75).abs() < 1e-15);
        assert!(mp_density(0.0).is_err());
        assert!(mp_density(-1.0).is_err());
    }

    #[test]
    fn mp_quadrature() {
        for cr in [ratio(1, 2), int(1), int(2)] {
            let c = rational::to_f64(&cr);
            let d = mp_density(c).unwrap();
            assert!((d.total_mass() - 1.0).abs() < 1e-8, "c={c} mass={}", d.total_mass());
            for p in 1..=4 {
                let exact = rational::to_f64(&mp_moment(&cr, p).unwrap());
                assert!((d.moment(p as u32) - exact).abs() < 1e-6, "c={c} p={p}");
            }
            assert!((d.entropy() - mp_entropy(c).unwrap()).abs() < 1e-6, "c={c}");
        }
        assert_eq!(mp_entropy(1.0).unwrap(), -0.5);
        assert_eq!(mp_entropy(0.5).unwrap(), -0.125);
    }

    #[test]
    fn fc_values() {
        assert_eq!(fc_support(1), int(4));
        assert_eq!(fc_support(2), ratio(27, 4));
        assert_eq!(fc_entropy_exact(2), ratio(-5, 6));
        assert_eq!(fc_entropy_exact(3), ratio(-13, 12));
        assert_eq!(fc_entropy(1), mp_entropy(1.0).unwrap());
        for s in 1..8 {
            assert!(fc_entropy(s + 1) < fc_entropy(s));
        }
        for p in 1..=8 {
            assert_eq!(from_biguint(&fc_moment(1, p)), mp_moment(&int(1), p).unwrap());
        }
    }

    #[test]
    fn fc2_quadrature() {
        let d = fc2_density();
        assert!((d.total_mass() - 1.0).abs() < 1e-8, "mass {}", d.total_mass());
        for p in 1..=4u32 {
            let exact = rational::to_f64(&from_biguint(&fc_moment(2, p as usize)));
            assert!((d.moment(p) - exact).abs() < 1e-6, "p={p}");
        }
        assert!((d.entropy() + 5.0 / 6.0).abs() < 1e-5);
        // d ∼ x^{−2/3} at the origin
        let (x1, x2) = (1e-8, 1e-10);
        let slope = (d.density(x2).ln() - d.density(x1).ln()) / (x2.ln() - x1.ln());
        assert!((slope + 2.0 / 3.0).abs() < 1e-3, "slope {slope}");
        assert!(d.grid(64).iter().all(|&(_, y)| y >= 0.0));
    }

    #[test]
    fn products_and_posets() {
        let fc = |s, p_max| MomentSequence::from_fn(p_max, |p| from_biguint(&fc_moment(s, p))).unwrap();
        let prod = product_moments(&[fc(2, 4), fc(1, 4)]).unwrap();
        assert_eq!(prod.get(2), Some(int(6)));
        let ones = MomentSequence::from_fn(4, |_| int(1)).unwrap();
        assert_eq!(product_moments(&[fc(3, 4), ones]).unwrap(), fc(3, 4));
        assert!(product_moments(&[fc(3, 4), fc(3, 3)]).is_err());

        for s in 1..=4 {
            assert_eq!(poset_law_moments(&ConstraintPoset::chain(s), 5).unwrap(), fc(s, 5));
        }
        let union = ConstraintPoset::chain(3).disjoint_union(&ConstraintPoset::chain(2));
        assert_eq!(
            poset_law_moments(&union, 4).unwrap(),
            product_moments(&[fc(3, 4), fc(2, 4)]).unwrap()
        );

        let exotic = poset_law_moments(&ConstraintPoset::exotic(), 4).unwrap();
        let inner = product_moments(&[fc(1, 4), fc(1, 4)]).unwrap();
        assert_eq!(free_poisson_compression(&inner).unwrap(), exotic);
        assert_eq!(exotic.get(2), Some(int(5)));
        assert_eq!(exotic.get(3), Some(int(38)));
    }

    #[test]
    fn hankel_sanity() {
        let fc2 = MomentSequence::from_fn(8, |p| from_biguint(&fc_moment(2, p))).unwrap();
        assert!(fc2.hankel_positive(5));
        // H_3 has negative determinant
        let bad = MomentSequence::new(vec![int(1), ratio(1, 2), int(1), int(1)]).unwrap();
        assert!(!bad.hankel_positive(3));
    }

    #[test]
    fn product_entropy() {
        let law = DistributionId::ClassicalProduct {
            factors: vec![DistributionId::FussCatalan { s: 2 }, DistributionId::FreePoisson { c: int(1) }],
        };
        assert!((law_entropy(&law).unwrap() - (-5.0 / 6.0 - 0.5)).abs() < 1e-15);
        assert_eq!(law_moment(&law, 3), Some(int(12 * 5)));
        assert_eq!(law_entropy(&DistributionId::PosetLaw { poset: ConstraintPoset::exotic() }), None);
    }
}
