//! Direct sampling of random graph states at finite `N`.
//!
//! A vertex unitary only ever acts on the Bell vectors of its loops, so it
//! is sampled as an isometry `W_v = U_v (Φ_loops ⊗ I)` from the subsystems
//! of `v` bonded elsewhere to all subsystems of `v`. For Haar `U_v` this is
//! a Haar isometry (thin QR of a Gaussian matrix); in Ginibre mode it is a
//! Gaussian matrix and the state is renormalized afterwards.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphSpec, MarginalSpec};

/// Largest state vector the sampler will build.
pub const MAX_AMPLITUDES: usize = 1 << 22;
/// Largest density matrix side.
pub const MAX_MATRIX_SIDE: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    #[default]
    Haar,
    /// Vertex unitaries replaced by complex Gaussian matrices.
    Ginibre,
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(SamplingMode::Haar),
            "ginibre" => Ok(SamplingMode::Ginibre),
            other => Err(Error::InvalidParameter(format!("unknown sampling mode '{other}'"))),
        }
    }
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// The first `cols` columns of a Haar unitary of size `rows`.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<DMatrix<Complex64>> {
    if rows == 0 || cols > rows {
        return Err(Error::InvalidParameter(format!("no {rows}×{cols} isometry")));
    }
    if rows > MAX_AMPLITUDES || rows.saturating_mul(cols) > MAX_AMPLITUDES {
        return Err(Error::DimensionTooLarge {
            dim: (rows as u128) * (cols as u128),
            cap: MAX_AMPLITUDES as u128,
        });
    }
    let g = ginibre(rows, cols, rng);
    if cols == 1 {
        let norm = g.norm();
        return Ok(g / Complex64::from(norm));
    }
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DMatrix<Complex64>> {
    haar_isometry(dim, dim, rng)
}

/// Amplitudes over `⊗_x C^{d_x N}`, subsystem 1 most significant.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The state as a matrix with rows indexed by `rows` (in the given
    /// order) and columns by the remaining subsystems.
    fn bipartition(&self, rows: &[usize]) -> (usize, usize, Vec<Complex64>) {
        let n = self.dims.len();
        let mut order: Vec<usize> = rows.iter().map(|x| x - 1).collect();
        order.extend((0..n).filter(|i| !rows.contains(&(i + 1))));
        let d_rows: usize = rows.iter().map(|&x| self.dims[x - 1]).product();
        let data = permute_legs(&self.amplitudes, &self.dims, &order);
        (d_rows, self.amplitudes.len() / d_rows, data)
    }
}

/// Reorders a row-major tensor so that output leg `j` is input leg `order[j]`.
fn permute_legs(data: &[Complex64], dims: &[usize], order: &[usize]) -> Vec<Complex64> {
    if order.iter().enumerate().all(|(j, &o)| j == o) {
        return data.to_vec();
    }
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let new_strides: Vec<usize> = order.iter().map(|&o| strides[o]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut idx = vec![0usize; n];
    let mut src = 0usize;
    for _ in 0..data.len() {
        out.push(data[src]);
        for j in (0..n).rev() {
            idx[j] += 1;
            src += new_strides[j];
            if idx[j] < new_dims[j] {
                break;
            }
            src -= new_strides[j] * new_dims[j];
            idx[j] = 0;
        }
    }
    out
}

fn local_dims(graph: &GraphSpec, n: u64) -> Result<Vec<usize>> {
    let dims: Vec<usize> = graph.dims().iter().map(|&d| (d * n) as usize).collect();
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    match total {
        Some(t) if t <= MAX_AMPLITUDES => Ok(dims),
        _ => Err(Error::DimensionTooLarge {
            dim: dims.iter().map(|&d| d as u128).fold(1u128, |a, d| a.saturating_mul(d)),
            cap: MAX_AMPLITUDES as u128,
        }),
    }
}

/// Builds the graph state using `sample(v, rows, cols)` for the isometry of
/// vertex `v` (0-based), whose columns are indexed by the bonded-elsewhere
/// subsystems of `v` and rows by all subsystems of `v`, both in increasing
/// order.
pub fn assemble_state_with<F>(graph: &GraphSpec, n: u64, mut sample: F) -> Result<StateVector>
where
    F: FnMut(usize, usize, usize) -> Result<DMatrix<Complex64>>,
{
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let dims = local_dims(graph, n)?;
    let is_cross = |x: usize| graph.block_of(x) != graph.block_of(graph.partner(x));

    // Bell pairs on the cross bonds; legs in increasing subsystem order.
    let mut legs: Vec<usize> = (1..=graph.n()).filter(|&x| is_cross(x)).collect();
    let leg_dims: Vec<usize> = legs.iter().map(|&x| dims[x - 1]).collect();
    let size: usize = leg_dims.iter().product();
    let mut strides = vec![1usize; legs.len()];
    for i in (0..legs.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * leg_dims[i + 1];
    }
    let mut data = vec![Complex64::new(0.0, 0.0); size];
    let cross_bonds: Vec<(usize, usize)> = graph.bonds().iter().copied().filter(|&(a, _)| is_cross(a)).collect();
    let pos = |x: usize| legs.iter().position(|&l| l == x).unwrap();
    let bond_strides: Vec<(usize, usize)> = cross_bonds
        .iter()
        .map(|&(a, b)| (strides[pos(a)] + strides[pos(b)], dims[a - 1]))
        .collect();
    let amp = bond_strides.iter().map(|&(_, d)| d as f64).product::<f64>().sqrt().recip();
    let mut idx = vec![0usize; bond_strides.len()];
    let count: usize = bond_strides.iter().map(|&(_, d)| d).product();
    let mut at = 0usize;
    for _ in 0..count {
        data[at] = Complex64::new(amp, 0.0);
        for j in (0..bond_strides.len()).rev() {
            idx[j] += 1;
            at += bond_strides[j].0;
            if idx[j] < bond_strides[j].1 {
                break;
            }
            at -= bond_strides[j].0 * bond_strides[j].1;
            idx[j] = 0;
        }
    }

    for (v, block) in graph.vertices().iter().enumerate() {
        let inputs: Vec<usize> = block.iter().copied().filter(|&x| is_cross(x)).collect();
        let d_in: usize = inputs.iter().map(|&x| dims[x - 1]).product();
        let d_out: usize = block.iter().map(|&x| dims[x - 1]).product();
        let w = sample(v, d_out, d_in)?;
        debug_assert_eq!(w.shape(), (d_out, d_in));
        // move this vertex's input legs to the front
        let cur_dims: Vec<usize> = legs.iter().map(|&x| dims[x - 1]).collect();
        let mut order: Vec<usize> = inputs.iter().map(|x| legs.iter().position(|l| l == x).unwrap()).collect();
        order.extend((0..legs.len()).filter(|i| !inputs.contains(&legs[*i])));
        let permuted = permute_legs(&data, &cur_dims, &order);
        let rest = permuted.len() / d_in;
        // row-major (d_in × rest) is column-major (rest × d_in)
        let x = DMatrix::from_vec(rest, d_in, permuted);
        let y = x * w.transpose();
        data = y.data.into();
        let mut new_legs = block.clone();
        new_legs.extend(order[inputs.len()..].iter().map(|&i| legs[i]));
        legs = new_legs;
    }

    // back to subsystem order
    let cur_dims: Vec<usize> = legs.iter().map(|&x| dims[x - 1]).collect();
    let order: Vec<usize> = (1..=graph.n()).map(|x| legs.iter().position(|&l| l == x).unwrap()).collect();
    let amplitudes = permute_legs(&data, &cur_dims, &order);
    Ok(StateVector { dims, amplitudes })
}

pub fn assemble_state<R: Rng + ?Sized>(
    graph: &GraphSpec,
    n: u64,
    mode: SamplingMode,
    rng: &mut R,
) -> Result<StateVector> {
    let mut state = assemble_state_with(graph, n, |_, rows, cols| match mode {
        SamplingMode::Haar => haar_isometry(rows, cols, rng),
        SamplingMode::Ginibre => Ok(ginibre(rows, cols, rng)),
    })?;
    if mode == SamplingMode::Ginibre {
        let norm = state.norm();
        state.amplitudes.iter_mut().for_each(|a| *a /= norm);
    }
    Ok(state)
}

/// `ρ_S`, with rows and columns ordered by the kept subsystems.
#[derive(Clone, Debug)]
pub struct DensityMatrixSample {
    pub matrix: DMatrix<Complex64>,
}

impl DensityMatrixSample {
    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }
}

pub fn partial_trace(v: &StateVector, traced: &[usize]) -> Result<DensityMatrixSample> {
    let n = v.dims.len();
    if let Some(&bad) = traced.iter().find(|&&x| x == 0 || x > n) {
        return Err(Error::TraceOutOfRange(bad, n));
    }
    let kept: Vec<usize> = (1..=n).filter(|x| !traced.contains(x)).collect();
    let (rows, cols, data) = v.bipartition(&kept);
    if rows > MAX_MATRIX_SIDE {
        return Err(Error::DimensionTooLarge {
            dim: rows as u128,
            cap: MAX_MATRIX_SIDE as u128,
        });
    }
    // column-major (cols × rows) holds Ψ^T; ρ = Ψ Ψ† = (Ψ^T)^T conj(Ψ^T)
    let a = DMatrix::from_vec(cols, rows, data);
    let matrix = a.transpose() * a.map(|z| z.conj());
    Ok(DensityMatrixSample { matrix })
}

/// Spectrum of `ρ_S` (nonzero part, padded by zeros on the smaller side).
fn marginal_gram(state: &StateVector, kept: &[usize]) -> Result<DMatrix<Complex64>> {
    let (rows, cols, data) = state.bipartition(kept);
    if rows.min(cols) > MAX_MATRIX_SIDE {
        return Err(Error::DimensionTooLarge {
            dim: rows.min(cols) as u128,
            cap: MAX_MATRIX_SIDE as u128,
        });
    }
    let a = DMatrix::from_vec(cols, rows, data);
    // ρ_S and ρ_T share their nonzero spectrum
    Ok(if rows <= cols { a.ad_mul(&a) } else { &a * a.adjoint() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub trials: usize,
    pub seed: u64,
    pub p_list: Vec<usize>,
    pub mode: SamplingMode,
    /// Compute the von Neumann entropy (requires an eigendecomposition).
    pub entropy: bool,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            p_list: vec![1, 2, 3, 4],
            mode: SamplingMode::Haar,
            entropy: true,
        }
    }
}

/// Sample mean with standard error `stdev/√trials`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Self { mean, stderr: f64::NAN };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self {
            mean,
            stderr: (var / n).sqrt(),
        }
    }

    /// `(self − value)/stderr`.
    pub fn deviation(&self, value: f64) -> f64 {
        (self.mean - value) / self.stderr
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub p: usize,
    #[serde(flatten)]
    pub estimate: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n: u64,
    pub trials: usize,
    pub seed: u64,
    pub mode: SamplingMode,
    /// `E tr ρ^p`.
    pub moments: Vec<MomentEstimate>,
    pub purity: Estimate,
    /// `E H(ρ)` in nats.
    pub entropy: Option<Estimate>,
    pub entropy_bits: Option<Estimate>,
}

impl EstimateReport {
    pub fn moment(&self, p: usize) -> Option<Estimate> {
        self.moments.iter().find(|m| m.p == p).map(|m| m.estimate)
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// `Σ λ^p` for each requested `p`, then the purity and optionally `−Σ λ ln λ`.
fn trial_statistics(gram: DMatrix<Complex64>, p_list: &[usize], entropy: bool) -> (Vec<f64>, f64, Option<f64>) {
    let trace = gram.trace().re;
    let gram = gram / Complex64::from(trace);
    let needs_spectrum = entropy || p_list.iter().any(|&p| p > 2);
    if !needs_spectrum {
        let purity = gram.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let ms = p_list.iter().map(|&p| if p == 2 { purity } else { 1.0 }).collect();
        return (ms, purity, None);
    }
    let eig: Vec<f64> = gram.symmetric_eigenvalues().iter().map(|&l| l.max(0.0)).collect();
    let power_sum = |p: usize| eig.iter().map(|l| l.powi(p as i32)).sum::<f64>();
    let ms = p_list.iter().map(|&p| power_sum(p)).collect();
    let h = entropy.then(|| eig.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum());
    (ms, power_sum(2), h)
}

pub fn estimate(m: &MarginalSpec, n: u64, config: &EstimateConfig) -> Result<EstimateReport> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    if config.p_list.contains(&0) {
        return Err(Error::InvalidParameter("moment orders must be positive".into()));
    }
    local_dims(m.graph(), n)?;
    let kept = m.kept();
    let results: Vec<(Vec<f64>, f64, Option<f64>)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(config.seed, trial);
            let state = assemble_state(m.graph(), n, config.mode, &mut rng)?;
            let gram = marginal_gram(&state, &kept)?;
            Ok(trial_statistics(gram, &config.p_list, config.entropy))
        })
        .collect::<Result<_>>()?;
    let moments = config
        .p_list
        .iter()
        .enumerate()
        .map(|(i, &p)| MomentEstimate {
            p,
            estimate: Estimate::from_samples(&results.iter().map(|r| r.0[i]).collect::<Vec<_>>()),
        })
        .collect();
    let purity = Estimate::from_samples(&results.iter().map(|r| r.1).collect::<Vec<_>>());
    let entropy = config
        .entropy
        .then(|| Estimate::from_samples(&results.iter().map(|r| r.2.unwrap()).collect::<Vec<_>>()));
    let entropy_bits = entropy.map(|e| Estimate {
        mean: e.mean / std::f64::consts::LN_2,
        stderr: e.stderr / std::f64::consts::LN_2,
    });
    Ok(EstimateReport {
        n,
        trials: config.trials,
        seed: config.seed,
        mode: config.mode,
        moments,
        purity,
        entropy,
        entropy_bits,
    })
}

/// [`estimate`] with Ginibre vertex matrices.
pub fn ginibre_mode(m: &MarginalSpec, n: u64, config: &EstimateConfig) -> Result<EstimateReport> {
    estimate(
        m,
        n,
        &EstimateConfig {
            mode: SamplingMode::Ginibre,
            ..config.clone()
        },
    )
}

/// Empirical moments `(1/N) tr (GG*)^p`, `p = 1..=p_max`, of `G = G_1⋯G_s`
/// with i.i.d. `N × N` Gaussian factors of variance `1/N`.
pub fn ginibre_product_spectra(s: usize, n: usize, trials: usize, p_max: usize, seed: u64) -> Result<Vec<MomentEstimate>> {
    if s == 0 || s > 4 || n == 0 || n > 1024 || trials == 0 {
        return Err(Error::InvalidParameter(format!(
            "product spectra need 1 ≤ s ≤ 4, 1 ≤ N ≤ 1024 and trials > 0 (got s={s}, N={n}, trials={trials})"
        )));
    }
    let scale = Complex64::from((n as f64).sqrt().recip());
    let samples: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut g = ginibre(n, n, &mut rng) * scale;
            for _ in 1..s {
                g *= ginibre(n, n, &mut rng) * scale;
            }
            let eig = g.ad_mul(&g).symmetric_eigenvalues();
            (1..=p_max)
                .map(|p| eig.iter().map(|l| l.max(0.0).powi(p as i32)).sum::<f64>() / n as f64)
                .collect()
        })
        .collect();
    Ok((1..=p_max)
        .map(|p| MomentEstimate {
            p,
            estimate: Estimate::from_samples(&samples.iter().map(|x| x[p - 1]).collect::<Vec<_>>()),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn haar_isometry_is_orthonormal() {
        let mut r = rng(1);
        for (rows, cols) in [(1, 1), (5, 5), (12, 3), (9, 1)] {
            let w = haar_isometry(rows, cols, &mut r).unwrap();
            let gram = w.ad_mul(&w);
            let defect = (gram - DMatrix::<Complex64>::identity(cols, cols)).camax();
            assert!(defect < 1e-10, "{rows}×{cols}: {defect}");
        }
        let u = haar_unitary(1, &mut r).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(haar_isometry(2, 3, &mut r).is_err());
    }

    #[test]
    fn permute_roundtrip() {
        let dims = [2, 3, 4];
        let data: Vec<Complex64> = (0..24).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let out = permute_legs(&data, &dims, &[2, 0, 1]);
        // out[c, a, b] = data[a, b, c]
        assert_eq!(out[1 * 6 + 1 * 3 + 2], data[1 * 12 + 2 * 4 + 1]);
        let back = permute_legs(&out, &[4, 2, 3], &[1, 2, 0]);
        assert_eq!(back, data);
    }

    #[test]
    fn identity_loop_is_bell() {
        let g = families::one_loop().graph().clone();
        let n = 3;
        let state = assemble_state_with(&g, n, |_, rows, _| {
            let d = (rows as f64).sqrt() as usize;
            Ok(DMatrix::from_fn(rows, 1, |i, _| {
                if i / d == i % d {
                    Complex64::new((d as f64).sqrt().recip(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }))
        })
        .unwrap();
        let rho = partial_trace(&state, &[2]).unwrap();
        let expected = DMatrix::<Complex64>::identity(3, 3) / Complex64::from(3.0);
        assert!((rho.matrix - expected).camax() < 1e-14);
    }

    #[test]
    fn two_vertex_bell_state() {
        // one bond between two vertices: Ψ = (1/√D) Σ U_1 e_i ⊗ U_2 e_i
        let g = GraphSpec::new(vec![2, 2], vec![vec![1], vec![2]], vec![(1, 2)]).unwrap();
        let mut r = rng(3);
        let mut us = Vec::new();
        let state = assemble_state_with(&g, 2, |_, rows, cols| {
            let u = haar_isometry(rows, cols, &mut r)?;
            us.push(u.clone());
            Ok(u)
        })
        .unwrap();
        let d = 4;
        for a in 0..d {
            for b in 0..d {
                let expected: Complex64 =
                    (0..d).map(|i| us[0][(a, i)] * us[1][(b, i)]).sum::<Complex64>() / Complex64::from(2.0);
                assert!((state.amplitudes[a * d + b] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn samples_are_states() {
        use crate::families::random_marginal;
        let mut r = rng(11);
        for i in 0..40 {
            let m = random_marginal(&mut r, 6, 2);
            let n = 1 + (i % 3) as u64;
            if m.graph().dims().iter().map(|&d| d * n).product::<u64>() > 1 << 14 {
                continue;
            }
            for mode in [SamplingMode::Haar, SamplingMode::Ginibre] {
                let state = assemble_state(m.graph(), n, mode, &mut r).unwrap();
                assert!((state.norm() - 1.0).abs() < 1e-10);
                let rho = partial_trace(&state, m.traced()).unwrap();
                assert!(rho.hermiticity_defect() < 1e-10);
                assert!((rho.trace().re - 1.0).abs() < 1e-10);
                assert!(rho.eigenvalues().iter().all(|&l| l > -1e-10));
            }
        }
    }

    #[test]
    fn trivial_traces() {
        let g = families::pi2_template().graph().clone();
        let state = assemble_state(&g, 2, SamplingMode::Haar, &mut rng(5)).unwrap();
        let pure = partial_trace(&state, &[]).unwrap();
        assert_eq!(pure.matrix.shape(), (64, 64));
        let purity: f64 = pure.eigenvalues().iter().map(|l| l * l).sum();
        assert!((purity - 1.0).abs() < 1e-10);
        let all: Vec<usize> = (1..=6).collect();
        let scalar = partial_trace(&state, &all).unwrap();
        assert_eq!(scalar.matrix.shape(), (1, 1));
        assert!((scalar.matrix[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_entry_moments() {
        let dim = 8;
        let samples: Vec<(f64, f64)> = (0..10_000)
            .map(|t| {
                let u = haar_unitary(dim, &mut trial_rng(17, t)).unwrap();
                let x = u[(0, 0)].norm_sqr();
                (x, x * x)
            })
            .collect();
        let e2 = Estimate::from_samples(&samples.iter().map(|s| s.0).collect::<Vec<_>>());
        let e4 = Estimate::from_samples(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
        assert!(e2.deviation(1.0 / 8.0).abs() < 3.0, "{e2:?}");
        assert!(e4.deviation(2.0 / 72.0).abs() < 3.0, "{e4:?}");
    }

    #[test]
    fn seeded_determinism() {
        let m = families::star(2, 1, 1).unwrap();
        let cfg = EstimateConfig {
            trials: 8,
            seed: 42,
            ..Default::default()
        };
        let a = estimate(&m, 3, &cfg).unwrap();
        let b = estimate(&m, 3, &cfg).unwrap();
        assert_eq!(a, b);
        assert!((a.moment(1).unwrap().mean - 1.0).abs() < 1e-12);
        let g = ginibre_mode(&m, 3, &cfg).unwrap();
        assert!((g.moment(1).unwrap().mean - 1.0).abs() < 1e-12);
        assert_ne!(a, g);
    }

    #[test]
    fn moments_only_path_agrees() {
        let m = families::cycle_tsrr();
        let full = EstimateConfig {
            trials: 4,
            seed: 9,
            p_list: vec![1, 2],
            mode: SamplingMode::Haar,
            entropy: true,
        };
        let fast = EstimateConfig {
            entropy: false,
            ..full.clone()
        };
        let a = estimate(&m, 2, &full).unwrap();
        let b = estimate(&m, 2, &fast).unwrap();
        assert!((a.purity.mean - b.purity.mean).abs() < 1e-12);
        assert!(b.entropy.is_none());
    }

    #[test]
    fn budget_errors() {
        let m = families::exotic();
        assert!(matches!(
            estimate(&m, 100, &EstimateConfig::default()),
            Err(Error::DimensionTooLarge { .. })
        ));
        assert!(ginibre_product_spectra(5, 10, 1, 2, 0).is_err());
    }
}
