//! Exact `E tr ρ_S^p` at finite `N` from the Weingarten sum.
//!
//! The sum over `(α, β) ∈ S_p^{2k}` factorizes: for each vertex,
//! `h_i(β) = Σ_α (d_{S_i}N^{|S_i|})^{#(γ⁻¹α)} (d_{T_i}N^{|T_i|})^{#α} Wg(d_{C_i}N^{|C_i|}, α⁻¹β)`,
//! after which only the `β`-tuples remain, coupled through the cross bonds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::graph::MarginalSpec;
use crate::rational::Rational;
use crate::weingarten::wg_exact;

use super::Budgets;

fn factorial(p: usize) -> u128 {
    (1..=p as u128).product()
}

/// Number of terms the factorized sum evaluates.
pub fn exact_cost(k: usize, p: usize) -> u128 {
    let f = factorial(p);
    (k as u128).saturating_mul(f.saturating_mul(f)).saturating_add(f.saturating_pow(k as u32))
}

fn scaled_dim(d: u64, n: u64, exponent: usize) -> Result<u64> {
    n.checked_pow(exponent as u32)
        .and_then(|x| x.checked_mul(d))
        .ok_or(Error::DimensionTooLarge {
            dim: (d as u128).saturating_mul((n as u128).saturating_pow(exponent as u32)),
            cap: u64::MAX as u128,
        })
}

fn powers(base: u64, max: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(max + 1);
    let mut cur = BigInt::one();
    for _ in 0..=max {
        out.push(cur.clone());
        cur *= base;
    }
    out
}

pub fn exact_moment(m: &MarginalSpec, p: usize, n: u64) -> Result<Rational> {
    exact_moment_with(m, p, n, &Budgets::default())
}

pub fn exact_moment_with(m: &MarginalSpec, p: usize, n: u64, budgets: &Budgets) -> Result<Rational> {
    exact_impl(m, p, n, budgets, Model::Haar)
}

/// `E tr ρ̃^p` when each vertex unitary is replaced by a Gaussian matrix
/// with entry variance `1/D_v` and `ρ̃` is left unnormalized (`E tr ρ̃ = 1`).
///
/// Wick's theorem replaces `Wg(α⁻¹β, D_v)` by `D_v^{−p} δ_{α,β}`.
pub fn exact_moment_gaussian(m: &MarginalSpec, p: usize, n: u64) -> Result<Rational> {
    exact_moment_gaussian_with(m, p, n, &Budgets::default())
}

pub fn exact_moment_gaussian_with(m: &MarginalSpec, p: usize, n: u64, budgets: &Budgets) -> Result<Rational> {
    exact_impl(m, p, n, budgets, Model::Gaussian)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Model {
    Haar,
    Gaussian,
}

fn exact_impl(m: &MarginalSpec, p: usize, n: u64, budgets: &Budgets, model: Model) -> Result<Rational> {
    if p == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let views = m.views();
    let k = views.k();
    let estimated = exact_cost(k, p);
    if estimated > budgets.terms {
        return Err(Error::BudgetExceeded {
            what: "exact Weingarten terms",
            estimated,
            budget: budgets.terms,
        });
    }
    let perms = Permutation::all(p);
    let size = perms.len();
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
    // cycles[a * size + b] = #(σ_a⁻¹ σ_b)
    let mut cycles = vec![0u8; size * size];
    cycles.par_chunks_mut(size).enumerate().for_each(|(a, row)| {
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = inverses[a].compose(&perms[b]).cycle_count() as u8;
        }
    });
    let gamma_inv = Permutation::full_cycle(p).inverse();
    let gamma_inv_cycles: Vec<usize> = perms.iter().map(|a| gamma_inv.compose(a).cycle_count()).collect();

    // Numerators of h_i over a common denominator per vertex.
    let mut numerators: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    let mut denominator = BigInt::one();
    for b in &views.blocks {
        let n_s = powers(scaled_dim(b.kept_dim, n, b.kept.len())?, p);
        let n_t = powers(scaled_dim(b.traced_dim, n, b.traced.len())?, p);
        let n_c = scaled_dim(b.block_dim, n, b.subsystems.len())?;
        let weights: Vec<BigInt> = (0..size)
            .map(|a| &n_s[gamma_inv_cycles[a]] * &n_t[perms[a].cycle_count()])
            .collect();
        let h: Vec<Rational> = match model {
            Model::Gaussian => {
                let scale = num_traits::pow(BigInt::from(n_c), p);
                weights.iter().map(|w| Rational::new(w.clone(), scale.clone())).collect()
            }
            Model::Haar => {
                let wg = wg_exact(p, n_c)?;
                let class_of: Vec<usize> = (0..size * size)
                    .map(|ab| {
                        let (a, b) = (ab / size, ab % size);
                        wg.class_index(&inverses[a].compose(&perms[b]).cycle_type()).unwrap()
                    })
                    .collect();
                (0..size)
                    .into_par_iter()
                    .map(|beta| {
                        let mut sum = Rational::zero();
                        for (alpha, w) in weights.iter().enumerate() {
                            sum += &wg.values()[class_of[alpha * size + beta]] * w;
                        }
                        sum
                    })
                    .collect()
            }
        };
        let lcm = h.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        numerators.push(h.iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
        denominator *= lcm;
    }

    // neighbours[i] = (j < i, powers of d_{E_ij} N^{|E_ij|})
    let mut neighbours: Vec<Vec<(usize, Vec<BigInt>)>> = vec![Vec::new(); k];
    for c in &views.cross {
        let base = scaled_dim(c.dim, n, c.count)?;
        neighbours[c.j].push((c.i, powers(base, p)));
    }

    let ctx = Contraction {
        size,
        cycles: &cycles,
        numerators: &numerators,
        neighbours: &neighbours,
    };
    let total: BigInt = (0..size)
        .into_par_iter()
        .map(|a| {
            let start = &numerators[0][a];
            if start.is_zero() {
                return BigInt::zero();
            }
            let mut labels = vec![a];
            ctx.sum(1, start.clone(), &mut labels)
        })
        .sum();

    // (d_[n] N^n)^{−p/2} = (Π_bonds d N)^{−p}; loops contribute (d_{E_ii} N^{|E_ii|})^p.
    let bonds = scaled_dim(m.graph().half_total_dim(), n, m.graph().m())?;
    let mut numer = total;
    let mut denom = denominator * num_traits::pow(BigInt::from(bonds), p);
    for b in &views.blocks {
        let loops = scaled_dim(b.loop_dim, n, b.loops)?;
        numer *= num_traits::pow(BigInt::from(loops), p);
    }
    if denom.is_zero() {
        denom = BigInt::one();
    }
    Ok(Rational::new(numer, denom))
}

struct Contraction<'a> {
    size: usize,
    cycles: &'a [u8],
    numerators: &'a [Vec<BigInt>],
    neighbours: &'a [Vec<(usize, Vec<BigInt>)>],
}

impl Contraction<'_> {
    fn sum(&self, vertex: usize, partial: BigInt, labels: &mut Vec<usize>) -> BigInt {
        if vertex == self.numerators.len() {
            return partial;
        }
        let mut total = BigInt::zero();
        for b in 0..self.size {
            let h = &self.numerators[vertex][b];
            if h.is_zero() {
                continue;
            }
            let mut term = &partial * h;
            for (j, pw) in &self.neighbours[vertex] {
                term *= &pw[self.cycles[labels[*j] * self.size + b] as usize];
            }
            labels.push(b);
            total += self.sum(vertex + 1, term, labels);
            labels.pop();
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::rational::{int, ratio};

    /// Direct evaluation of the full sum over `(α, β) ∈ S_p^{2k}`.
    fn naive(m: &MarginalSpec, p: usize, n: u64) -> Rational {
        let v = m.views();
        let k = v.k();
        let perms = Permutation::all(p);
        let gamma_inv = Permutation::full_cycle(p).inverse();
        let nn = |d: u64, e: usize| Rational::from_integer(BigInt::from(d * n.pow(e as u32)));
        let mut total = Rational::zero();
        let count = perms.len().pow(2 * k as u32);
        for code in 0..count {
            let mut c = code;
            let mut pick = Vec::with_capacity(2 * k);
            for _ in 0..2 * k {
                pick.push(&perms[c % perms.len()]);
                c /= perms.len();
            }
            let (alphas, betas) = pick.split_at(k);
            let mut term = Rational::one();
            for (i, b) in v.blocks.iter().enumerate() {
                let a = alphas[i];
                term *= crate::rational::pow(&nn(b.kept_dim, b.kept.len()), gamma_inv.compose(a).cycle_count() as i64);
                term *= crate::rational::pow(&nn(b.traced_dim, b.traced.len()), a.cycle_count() as i64);
                term *= crate::rational::pow(&nn(b.loop_dim, b.loops), p as i64);
                let wg = wg_exact(p, b.block_dim * n.pow(b.subsystems.len() as u32)).unwrap();
                term *= wg.get(&a.inverse().compose(betas[i]));
            }
            for cr in &v.cross {
                let e = betas[cr.i].inverse().compose(betas[cr.j]).cycle_count();
                term *= crate::rational::pow(&nn(cr.dim, cr.count), e as i64);
            }
            total += term;
        }
        let pref = nn(m.graph().half_total_dim(), m.graph().m());
        total * crate::rational::pow(&pref, -(p as i64))
    }

    #[test]
    fn one_loop_closed_form() {
        let m = families::one_loop();
        for n in [2i64, 3, 4, 8, 16] {
            assert_eq!(exact_moment(&m, 2, n as u64).unwrap(), ratio(2 * n, n * n + 1));
        }
    }

    #[test]
    fn trace_is_one() {
        for m in [families::one_loop(), families::pi2_template(), families::exotic(), families::star(2, 1, 1).unwrap()] {
            assert_eq!(exact_moment(&m, 1, 3).unwrap(), int(1));
        }
        let weighted = families::fc_template_with_dims(2, &[2, 1, 3]).unwrap();
        assert_eq!(exact_moment(&weighted, 1, 2).unwrap(), int(1));
    }

    #[test]
    fn factorized_matches_naive() {
        let cases = [
            (families::one_loop(), 3),
            (families::star(2, 1, 1).unwrap(), 2),
            (families::pi2_template(), 2),
            (families::fc_template_with_dims(2, &[2, 1, 3]).unwrap(), 2),
        ];
        for (m, p) in cases {
            for n in [2u64, 3] {
                assert_eq!(exact_moment(&m, p, n).unwrap(), naive(&m, p, n), "{m:?} p={p} n={n}");
            }
        }
    }

    #[test]
    fn pure_state_and_full_trace() {
        let g = families::one_loop().graph().clone();
        let pure = MarginalSpec::new(g.clone(), &[]).unwrap();
        assert_eq!(exact_moment(&pure, 3, 3).unwrap(), int(1));
        let scalar = MarginalSpec::new(g, &[1, 2]).unwrap();
        assert_eq!(exact_moment(&scalar, 3, 3).unwrap(), int(1));
    }

    #[test]
    fn star_s0_is_exactly_mixed() {
        let m = families::star(2, 0, 2).unwrap();
        assert_eq!(exact_moment(&m, 2, 3).unwrap(), ratio(1, 9));
        assert_eq!(exact_moment(&m, 3, 3).unwrap(), ratio(1, 81));
    }

    #[test]
    fn gaussian_model() {
        let one = families::one_loop();
        for n in [2u64, 3, 5] {
            let n_i = n as i64;
            // ρ̃ = M M* with M an N×N Gaussian of entry variance 1/N²
            assert_eq!(exact_moment_gaussian(&one, 2, n).unwrap(), ratio(2, n_i));
            assert_eq!(exact_moment_gaussian(&one, 1, n).unwrap(), int(1));
        }
        // a fully traced vertex is not pinned under Wick contraction
        let tsrr = families::cycle_tsrr();
        let e = exact_moment_gaussian(&tsrr, 2, 4).unwrap() * int(256);
        assert_eq!(e, ratio(22321, 4096));
    }

    #[test]
    fn budget_and_singular() {
        let m = families::exotic();
        let tight = Budgets { tuples: 1, terms: 100 };
        assert!(matches!(exact_moment_with(&m, 3, 2, &tight), Err(Error::BudgetExceeded { .. })));
        // one-loop block has dimension N², so N = 1 with p = 2 is singular
        assert!(matches!(exact_moment(&families::one_loop(), 2, 1), Err(Error::WeingartenSingular { .. })));
    }
}
