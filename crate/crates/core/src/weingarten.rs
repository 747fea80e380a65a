//! Unitary Weingarten function, exact at integer dimension and to first
//! order in `1/n`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::{mobius, Permutation};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::Rational;

/// Largest order accepted by [`wg_exact`].
pub const WG_MAX_ORDER: usize = 6;

/// `Wg(n, ·)` on `S_p` as a class function, indexed by cycle type.
#[derive(Clone, Debug, PartialEq)]
pub struct WeingartenTable {
    p: usize,
    n: u64,
    classes: Vec<Vec<usize>>,
    values: Vec<Rational>,
}

impl WeingartenTable {
    pub fn order(&self) -> usize {
        self.p
    }

    pub fn dimension(&self) -> u64 {
        self.n
    }

    /// Cycle types in decreasing lexicographic order, aligned with [`values`](Self::values).
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn class_index(&self, cycle_type: &[usize]) -> Option<usize> {
        self.classes.iter().position(|c| c == cycle_type)
    }

    pub fn get(&self, sigma: &Permutation) -> &Rational {
        let idx = self
            .class_index(&sigma.cycle_type())
            .expect("permutation order matches the table");
        &self.values[idx]
    }
}

/// Integer partitions of `p` in decreasing lexicographic order.
pub fn integer_partitions(p: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(p, p, &mut Vec::new(), &mut out);
    out
}

fn representative(cycle_type: &[usize]) -> Permutation {
    let p: usize = cycle_type.iter().sum();
    let mut map = vec![0; p];
    let mut start = 0;
    for &len in cycle_type {
        for i in 0..len {
            map[start + i] = start + (i + 1) % len;
        }
        start += len;
    }
    Permutation::from_map_unchecked(map)
}

type WgCache = RwLock<HashMap<(usize, u64), Arc<WeingartenTable>>>;

fn cache() -> &'static WgCache {
    static CACHE: OnceLock<WgCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Exact `Wg(n, ·)` on `S_p`, the convolution inverse of `σ ↦ n^{#σ}`.
///
/// Uses the class-function structure: for each class representative `σ_λ`,
/// `Σ_μ Wg_μ · Σ_{τ : σ_λ τ⁻¹ ∈ μ} n^{#τ} = δ_{λ, id}`.
pub fn wg_exact(p: usize, n: u64) -> Result<Arc<WeingartenTable>> {
    if p == 0 || p > WG_MAX_ORDER {
        return Err(Error::OrderTooLarge { p, cap: WG_MAX_ORDER });
    }
    if n < p as u64 {
        return Err(Error::WeingartenSingular { p, n });
    }
    if let Some(hit) = cache().read().unwrap().get(&(p, n)) {
        return Ok(hit.clone());
    }
    let classes = integer_partitions(p);
    let index: HashMap<Vec<usize>, usize> = classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let all = Permutation::all(p);
    let powers: Vec<Rational> = (0..=p)
        .map(|e| Rational::from_integer(num_traits::pow(BigInt::from(n), e)))
        .collect();
    let mut gram = vec![vec![Rational::zero(); classes.len()]; classes.len()];
    for (row, lambda) in classes.iter().enumerate() {
        let sigma = representative(lambda);
        for tau in &all {
            let mu = index[&sigma.compose(&tau.inverse()).cycle_type()];
            gram[row][mu] += &powers[tau.cycle_count()];
        }
    }
    let mut rhs = vec![Rational::zero(); classes.len()];
    let id_class = index[&vec![1; p]];
    rhs[id_class] = Rational::from_integer(BigInt::from(1));
    let values = linalg::solve(gram, rhs).ok_or(Error::WeingartenSingular { p, n })?;
    let table = Arc::new(WeingartenTable { p, n, classes, values });
    cache().write().unwrap().insert((p, n), table.clone());
    Ok(table)
}

/// Leading-order Weingarten value `n^{−(p+|σ|)} Mob(σ)`.
pub fn wg_asym(p: usize, n: f64, sigma: &Permutation) -> f64 {
    let mob = mobius(sigma).to_f64().unwrap_or(f64::NAN);
    mob * n.powi(-((p + sigma.length()) as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn order_one_and_two() {
        let t = wg_exact(1, 5).unwrap();
        assert_eq!(t.values(), &[ratio(1, 5)]);
        for n in 2..10i64 {
            let t = wg_exact(2, n as u64).unwrap();
            let id = Permutation::identity(2);
            let swap = Permutation::full_cycle(2);
            assert_eq!(*t.get(&id), ratio(1, n * n - 1));
            assert_eq!(*t.get(&swap), ratio(-1, n * (n * n - 1)));
        }
        let t = wg_exact(2, 2).unwrap();
        assert_eq!(*t.get(&Permutation::identity(2)), ratio(1, 3));
        assert_eq!(*t.get(&Permutation::full_cycle(2)), ratio(-1, 6));
    }

    #[test]
    fn convolution_identity() {
        for p in 1..=4 {
            for n in [p as u64, 8, 16] {
                let t = wg_exact(p, n).unwrap();
                let all = Permutation::all(p);
                for sigma in &all {
                    let mut sum = Rational::zero();
                    for tau in &all {
                        let w = t.get(&sigma.compose(&tau.inverse()));
                        sum += w * Rational::from_integer(num_traits::pow(BigInt::from(n), tau.cycle_count()));
                    }
                    let expected = if *sigma == Permutation::identity(p) { int(1) } else { int(0) };
                    assert_eq!(sum, expected, "p={p} n={n} σ={sigma}");
                }
            }
        }
    }

    #[test]
    fn singular_and_caps() {
        assert!(matches!(wg_exact(3, 2), Err(Error::WeingartenSingular { p: 3, n: 2 })));
        assert!(matches!(wg_exact(7, 100), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn asymptotic_agreement() {
        for p in 1..=4 {
            let mut previous = f64::INFINITY;
            for n in [8u64, 16, 32] {
                let t = wg_exact(p, n).unwrap();
                let mut worst: f64 = 0.0;
                for sigma in Permutation::all(p) {
                    let exact = crate::rational::to_f64(t.get(&sigma));
                    let approx = wg_asym(p, n as f64, &sigma);
                    worst = worst.max(((exact - approx) / exact).abs());
                }
                assert!(worst * (n * n) as f64 <= 40.0, "p={p} n={n} gap={worst}");
                assert!(worst < previous || worst == 0.0);
                previous = worst;
            }
        }
    }

    #[test]
    fn asym_examples() {
        assert_eq!(wg_asym(3, 2.0, &Permutation::identity(3)), 0.125);
        let gamma = Permutation::full_cycle(4);
        assert_eq!(wg_asym(4, 2.0, &gamma), -5.0 * 2f64.powi(-7));
    }

    #[test]
    fn class_partitions() {
        assert_eq!(integer_partitions(4).len(), 5);
        assert_eq!(integer_partitions(6).len(), 11);
    }
}
