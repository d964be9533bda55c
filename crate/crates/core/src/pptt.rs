//! The unitary-operator quantization on the cylinder with θ ∈ [−π,π) and the
//! integer momentum lattice p = nℏ, together with its exact bridge to the
//! quantizer formalism of the `cylinder` module.
//!
//! The primary realization of the quantizer is the reflection form
//!
//! ```text
//! (Ω(θ,n)φ)(α) = e^{2in(α−θ)} φ(2θ−α),
//! ```
//!
//! whose matrix δ_{m+m',2n} e^{i2(m−n)θ} coincides entrywise with the
//! cylinder quantizer at (x, n') = (2θ, 2n): the integer momentum lattice
//! maps onto the even sublattice of the half-integer lattice. The
//! exponential-basis route exp{i(τp̂/ℏ + mθ̂)} is kept as a convergence check;
//! it inherits truncation artifacts from the θ̂ matrix.

use ndarray::Array2;
use num_complex::Complex64;

use crate::cylinder::{operator_from_symbol, quantizer_matrix, CircleOperator, QuantizerIndex, WeylSymbol};
use crate::error::{Error, Result};
use crate::numerics::{dft_circle, expm};
use crate::wbz::FiberParams;

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn fiber0(hbar: f64) -> FiberParams {
    FiberParams { a: TAU, k: 0.0, hbar }
}

/// Function on S¹×ℏℤ: samples f(θ_j, nℏ) at θ_j = −π + 2πj/M, n ∈ [−P, P].
#[derive(Debug, Clone)]
pub struct PpttFunction {
    pub hbar: f64,
    ang_band: i64,
    mom_band: i64,
    /// samples[j, n+P]
    samples: Array2<Complex64>,
    /// angular modes f̃_μ(n): modes[μ+B, n+P]
    modes: Array2<Complex64>,
}

impl PpttFunction {
    /// Sample a closure f(θ, p) on the grid with M = 2B+1 angular nodes.
    /// The closure must be band-limited to B in θ.
    pub fn from_fn(
        hbar: f64,
        ang_band: i64,
        mom_band: i64,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        if hbar <= 0.0 {
            return Err(Error::InvalidArgument("hbar must be positive".into()));
        }
        let m_grid = (2 * ang_band + 1) as usize;
        let mut samples = Array2::zeros((m_grid, (2 * mom_band + 1) as usize));
        for n in -mom_band..=mom_band {
            for j in 0..m_grid {
                let theta = -std::f64::consts::PI + TAU * j as f64 / m_grid as f64;
                samples[[j, (n + mom_band) as usize]] = f(theta, n as f64 * hbar);
            }
        }
        Self::from_samples(hbar, mom_band, samples)
    }

    /// Wrap existing samples (odd angular grid size, nodes −π + 2πj/M).
    pub fn from_samples(hbar: f64, mom_band: i64, samples: Array2<Complex64>) -> Result<Self> {
        let (m_grid, ncols) = samples.dim();
        if m_grid % 2 == 0 || m_grid < 1 {
            return Err(Error::InvalidArgument(format!(
                "angular grid size {m_grid} must be odd"
            )));
        }
        if ncols != (2 * mom_band + 1) as usize {
            return Err(Error::InvalidArgument(format!(
                "sample columns {ncols} do not match momentum band {mom_band}"
            )));
        }
        let ang_band = (m_grid as i64 - 1) / 2;
        let mut modes = Array2::zeros((m_grid, ncols));
        for n in 0..ncols {
            let col: Vec<Complex64> = (0..m_grid).map(|j| samples[[j, n]]).collect();
            let mm = dft_circle(&col)?;
            for mu in -ang_band..=ang_band {
                // nodes start at -pi, not 0: modes pick up (-1)^mu
                let sign = if mu.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                modes[[(mu + ang_band) as usize, n]] = mm.mode(mu) * sign;
            }
        }
        Ok(Self { hbar, ang_band, mom_band, samples, modes })
    }

    pub fn ang_band(&self) -> i64 {
        self.ang_band
    }

    pub fn mom_band(&self) -> i64 {
        self.mom_band
    }

    pub fn grid_size(&self) -> usize {
        (2 * self.ang_band + 1) as usize
    }

    pub fn theta_node(&self, j: usize) -> f64 {
        -std::f64::consts::PI + TAU * j as f64 / self.grid_size() as f64
    }

    pub fn sample(&self, j: usize, n: i64) -> Complex64 {
        self.samples[[j, (n + self.mom_band) as usize]]
    }

    /// Angular Fourier coefficient f̃_μ(n), f(θ, nℏ) = Σ_μ f̃_μ(n) e^{iμθ}.
    pub fn angular_mode(&self, mu: i64, n: i64) -> Complex64 {
        if mu.abs() > self.ang_band || n.abs() > self.mom_band {
            return Complex64::new(0.0, 0.0);
        }
        self.modes[[(mu + self.ang_band) as usize, (n + self.mom_band) as usize]]
    }

    /// Evaluate f(θ, nℏ) anywhere on the circle from the angular modes.
    pub fn eval(&self, theta: f64, n: i64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for mu in -self.ang_band..=self.ang_band {
            acc += self.angular_mode(mu, n) * Complex64::from_polar(1.0, mu as f64 * theta);
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &PpttFunction) -> f64 {
        let bb = self.ang_band.max(other.ang_band);
        let pb = self.mom_band.max(other.mom_band);
        let mut worst = 0.0f64;
        for mu in -bb..=bb {
            for n in -pb..=pb {
                worst = worst.max((self.angular_mode(mu, n) - other.angular_mode(mu, n)).norm());
            }
        }
        worst
    }
}

/// Quantizer label (θ, n) with θ ∈ [−π, π); maps onto the cylinder-module
/// index (x, n') = (2θ, 2n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpttQuantizerIndex {
    pub theta: f64,
    pub n: i64,
}

impl PpttQuantizerIndex {
    pub fn new(theta: f64, n: i64) -> Self {
        Self { theta, n }
    }

    pub fn to_wbz(&self) -> QuantizerIndex {
        QuantizerIndex::new(2.0 * self.theta, 2 * self.n)
    }
}

/// Apply Ω(θ,n): (Ω φ)(α) = e^{2in(α−θ)} φ(2θ−α) with periodic wrap, on the
/// [−π,π) grid of M equispaced nodes. 2θ must lie on the node lattice.
pub fn pptt_quantizer_apply(
    idx: &PpttQuantizerIndex,
    phi: &[Complex64],
) -> Result<Vec<Complex64>> {
    let m_grid = phi.len();
    if m_grid < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let h = TAU / m_grid as f64;
    let r_float = 2.0 * idx.theta / h;
    let r0 = r_float.round() as i64;
    if (2.0 * idx.theta - r0 as f64 * h).abs() > 1e-9 {
        return Err(Error::GridMismatch(format!(
            "2*theta = {} is not on the grid (step {h})",
            2.0 * idx.theta
        )));
    }
    let m = m_grid as i64;
    Ok((0..m_grid)
        .map(|j| {
            let alpha = -std::f64::consts::PI + j as f64 * h;
            let cell = (r0 - j as i64).rem_euclid(m) as usize;
            Complex64::from_polar(1.0, 2.0 * idx.n as f64 * (alpha - idx.theta)) * phi[cell]
        })
        .collect())
}

/// Matrix of Ω(θ,n) in the band-N basis (a = 2π, k = 0):
/// ⟨m'|Ω(θ,n)|m⟩ = δ_{m+m',2n} e^{i2(m−n)θ}. Trace is 1 for every in-band n.
pub fn pptt_quantizer_matrix(
    idx: &PpttQuantizerIndex,
    hbar: f64,
    band: i64,
) -> Result<CircleOperator> {
    if 2 * idx.n.abs() > 2 * band {
        return Err(Error::BandOverflow(format!(
            "index n = {} needs |2n| <= 2N = {}",
            idx.n,
            2 * band
        )));
    }
    let fp = fiber0(hbar);
    let mut op = CircleOperator::zeros(&fp, band);
    // phase written exactly as the cylinder quantizer computes it at
    // (x, n') = (2 theta, 2n), so the bridge is bit-identical
    let x = 2.0 * idx.theta;
    let nn = 2 * idx.n;
    for m in -band..=band {
        let mp = nn - m;
        if mp.abs() > band {
            continue;
        }
        let phase = std::f64::consts::PI * (2 * m - nn) as f64 * x / fp.a;
        op.set(mp, m, Complex64::from_polar(1.0, phase));
    }
    Ok(op)
}

/// Fourier data f̃(τ,m) = Σ_n ∫dθ f(θ,nℏ) e^{−i(τn+mθ)} on a τ-grid × modes.
#[derive(Debug, Clone)]
pub struct PpttFourier {
    pub tau_steps: usize,
    ang_band: i64,
    /// values[t, μ+B]
    values: Array2<Complex64>,
}

impl PpttFourier {
    pub fn tau_node(&self, t: usize) -> f64 {
        -std::f64::consts::PI + TAU * t as f64 / self.tau_steps as f64
    }

    pub fn value(&self, t: usize, mu: i64) -> Complex64 {
        self.values[[t, (mu + self.ang_band) as usize]]
    }

    pub fn ang_band(&self) -> i64 {
        self.ang_band
    }
}

/// Forward transform: the θ-integral is exact through the angular modes
/// (∫dθ f e^{−imθ} = 2π f̃_m), the n-sum is the finite lattice sum.
pub fn pptt_fourier(f: &PpttFunction, tau_steps: usize) -> Result<PpttFourier> {
    if tau_steps < (2 * f.mom_band() + 1) as usize {
        return Err(Error::InvalidArgument(format!(
            "tau grid of {tau_steps} nodes cannot resolve momentum band {}",
            f.mom_band()
        )));
    }
    let bb = f.ang_band();
    let mut values = Array2::zeros((tau_steps, (2 * bb + 1) as usize));
    for t in 0..tau_steps {
        let tau = -std::f64::consts::PI + TAU * t as f64 / tau_steps as f64;
        for mu in -bb..=bb {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in -f.mom_band()..=f.mom_band() {
                acc += f.angular_mode(mu, n) * Complex64::from_polar(1.0, -tau * n as f64);
            }
            values[[t, (mu + bb) as usize]] = acc * TAU;
        }
    }
    Ok(PpttFourier { tau_steps, ang_band: bb, values })
}

/// Inverse transform back to the lattice:
/// f(θ,nℏ) = (1/2π)² Σ_m ∫dτ f̃(τ,m) e^{i(τn+mθ)}, exact for band-limited
/// input when the τ-grid has at least 2P+1 nodes.
pub fn pptt_fourier_inverse(
    ff: &PpttFourier,
    hbar: f64,
    mom_band: i64,
) -> Result<PpttFunction> {
    if ff.tau_steps < (2 * mom_band + 1) as usize {
        return Err(Error::InvalidArgument("tau grid too coarse for the requested band".into()));
    }
    let bb = ff.ang_band();
    let m_grid = (2 * bb + 1) as usize;
    let mut samples = Array2::zeros((m_grid, (2 * mom_band + 1) as usize));
    for n in -mom_band..=mom_band {
        for j in 0..m_grid {
            let theta = -std::f64::consts::PI + TAU * j as f64 / m_grid as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..ff.tau_steps {
                let tau = ff.tau_node(t);
                for mu in -bb..=bb {
                    acc += ff.value(t, mu)
                        * Complex64::from_polar(1.0, tau * n as f64 + mu as f64 * theta);
                }
            }
            samples[[j, (n + mom_band) as usize]] =
                acc / (TAU * ff.tau_steps as f64);
        }
    }
    PpttFunction::from_samples(hbar, mom_band, samples)
}

/// Quantization f̂ = Σ_n ∫dθ/2π f(θ,nℏ) Ω(θ,n) as exact mode sums:
/// ⟨m'|f̂|m⟩ = f̃_{m'−m}((m+m')/2) on even anti-diagonals, zero on odd ones.
pub fn pptt_quantize(f: &PpttFunction, band: i64) -> Result<CircleOperator> {
    if f.ang_band() > 2 * band {
        return Err(Error::BandOverflow(format!(
            "angular band {} exceeds 2N = {}",
            f.ang_band(),
            2 * band
        )));
    }
    if f.mom_band() < band {
        return Err(Error::BandOverflow(format!(
            "momentum lattice band {} does not cover the anti-diagonal range N = {}",
            f.mom_band(),
            band
        )));
    }
    let fp = fiber0(f.hbar);
    let mut op = CircleOperator::zeros(&fp, band);
    for mp in -band..=band {
        for m in -band..=band {
            if (m + mp) % 2 != 0 {
                continue;
            }
            op.set(mp, m, f.angular_mode(mp - m, (m + mp) / 2));
        }
    }
    Ok(op)
}

/// Recover the lattice function from an operator, f(θ,nℏ) = tr{Ω(θ,n)f̂}.
/// Exact inverse of [`pptt_quantize`] on the lattice formalism's image (even
/// angular modes at their lattice points).
pub fn pptt_dequantize(op: &CircleOperator, mom_band: i64, m_grid: usize) -> Result<PpttFunction> {
    if mom_band > op.band() {
        return Err(Error::BandOverflow(format!(
            "momentum band {mom_band} exceeds the operator band {}",
            op.band()
        )));
    }
    if m_grid % 2 == 0 {
        return Err(Error::InvalidArgument("angular grid size must be odd".into()));
    }
    let band = op.band();
    let mut samples = Array2::zeros((m_grid, (2 * mom_band + 1) as usize));
    for n in -mom_band..=mom_band {
        for j in 0..m_grid {
            let theta = -std::f64::consts::PI + TAU * j as f64 / m_grid as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in -band..=band {
                let other = 2 * n - i;
                if other.abs() > band {
                    continue;
                }
                acc += Complex64::from_polar(1.0, 2.0 * (i - n) as f64 * theta)
                    * op.entry(i, other);
            }
            samples[[j, (n + mom_band) as usize]] = acc;
        }
    }
    PpttFunction::from_samples(op.hbar, mom_band, samples)
}

/// Pairwise max-norm differences between the three quantization routes.
#[derive(Debug, Clone, Copy)]
pub struct BridgeReport {
    /// lattice mode sums vs the doubled-range quadrature
    pub quantize_vs_doubled: f64,
    /// lattice mode sums vs the folded symbol route
    pub quantize_vs_fold: f64,
    /// doubled-range quadrature vs the folded symbol route
    pub doubled_vs_fold: f64,
}

impl BridgeReport {
    pub fn worst(&self) -> f64 {
        self.quantize_vs_doubled.max(self.quantize_vs_fold).max(self.doubled_vs_fold)
    }
}

/// Build f̂ three ways and compare:
///
/// 1. the lattice mode sums of [`pptt_quantize`];
/// 2. the doubled-range quadrature Σ_n ∫_{−2π}^{2π} (dx/4π) f(x/2,nℏ) Ω⁽⁰⁾(x,2n)
///    with the cylinder-module quantizer;
/// 3. the fold onto one period: the two-point symbol
///    F(x,2n) = (1/4π)[f(x/2,nℏ) + f(x/2+π,nℏ)] quantized through the
///    symbol-operator pairing.
pub fn bridge_equivalence(f: &PpttFunction, band: i64) -> Result<BridgeReport> {
    let route1 = pptt_quantize(f, band)?;
    let fp = fiber0(f.hbar);

    // route 2: x-quadrature over the doubled range, with enough nodes that
    // every frequency 2(m-n) + mu is below the alias limit
    let n_max = band.min(f.mom_band());
    let q_nodes = (2 * (2 * band + 2 * n_max) + 2 * f.ang_band() + 5) as usize;
    let dx = 2.0 * TAU / q_nodes as f64;
    let mut route2 = CircleOperator::zeros(&fp, band);
    for n in -n_max..=n_max {
        for s in 0..q_nodes {
            let x = -TAU + s as f64 * dx;
            let om = quantizer_matrix(&QuantizerIndex::new(x, 2 * n), &fp, band)?;
            let weight = f.eval(0.5 * x, n) * dx / (2.0 * TAU);
            route2 = route2.add(&om.scale(weight))?;
        }
    }

    // route 3: fold to the even-sublattice symbol, then quantize
    let sym_mom = 2 * band;
    let sym_ang = f.ang_band().min(2 * band);
    let mut sym = WeylSymbol::zeros(&fp, sym_ang, sym_mom);
    for n in -n_max..=n_max {
        for mu in -sym_ang..=sym_ang {
            if mu.rem_euclid(2) != 0 {
                continue;
            }
            if 2 * n.abs() + mu.abs() > 2 * band {
                continue;
            }
            let c = f.angular_mode(mu, n) / TAU;
            if c.norm_sqr() > 0.0 {
                sym.add_coeff(mu, 2 * n, c)?;
            }
        }
    }
    let route3 = operator_from_symbol(&sym, band)?;

    Ok(BridgeReport {
        quantize_vs_doubled: route1.max_abs_diff(&route2),
        quantize_vs_fold: route1.max_abs_diff(&route3),
        doubled_vs_fold: route2.max_abs_diff(&route3),
    })
}

/// The exponential basis element Û(τ,m) = exp{i(τ/ℏ·p̂ + m·θ̂)} in the
/// truncated basis. p̂ is diagonal (jℏ); θ̂ is the truncated Hermitian matrix
/// with entries i(−1)^{j−j'}/(j'−j) off the diagonal.
pub fn unitary_basis_matrix(tau: f64, m: i64, hbar: f64, band: i64) -> Result<CircleOperator> {
    let dim = (2 * band + 1) as usize;
    let mut h = Array2::<Complex64>::zeros((dim, dim));
    for jp in -band..=band {
        for j in -band..=band {
            let (r, c) = ((jp + band) as usize, (j + band) as usize);
            if jp == j {
                h[[r, c]] = Complex64::new(tau * j as f64, 0.0);
            } else {
                let sign = if (j - jp).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                h[[r, c]] = Complex64::new(0.0, m as f64 * sign / (jp - j) as f64);
            }
        }
    }
    let u = expm(&h.mapv(|v| v * Complex64::i()))?;
    CircleOperator::from_matrix(&fiber0(hbar), band, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::{pair_trace_formulas, weyl_quantize, CylinderFunction};
    use num_complex::Complex64 as C64;

    fn plane_wave(m: i64, m_grid: usize) -> Vec<C64> {
        (0..m_grid)
            .map(|j| {
                let alpha = -std::f64::consts::PI + TAU * j as f64 / m_grid as f64;
                C64::from_polar(1.0, m as f64 * alpha)
            })
            .collect()
    }

    #[test]
    fn apply_at_origin_is_parity() {
        let m_grid = 16;
        let phi: Vec<C64> = (0..m_grid)
            .map(|j| {
                let th = -std::f64::consts::PI + TAU * j as f64 / m_grid as f64;
                C64::new(th.cos() + 0.5 * (2.0 * th).sin(), (3.0 * th).cos())
            })
            .collect();
        let out = pptt_quantizer_apply(&PpttQuantizerIndex::new(0.0, 0), &phi).unwrap();
        // phi(-alpha): node -pi + jh maps to -pi + (M - j) h modulo wrap,
        // except alpha = -pi which reflects onto itself
        for j in 0..m_grid {
            let expect = phi[(m_grid - j) % m_grid];
            assert!((out[j] - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn apply_plane_wave_law() {
        // Omega(theta, n) e^{im alpha} = e^{i2(m-n)theta} e^{i(2n-m)alpha}
        let m_grid = 32;
        let h = TAU / m_grid as f64;
        for &(m, n, r0) in &[(3i64, 1i64, 4i64), (0, -2, 10), (-4, 3, 7)] {
            let theta = r0 as f64 * h / 2.0;
            let idx = PpttQuantizerIndex::new(theta, n);
            let out = pptt_quantizer_apply(&idx, &plane_wave(m, m_grid)).unwrap();
            let front = C64::from_polar(1.0, 2.0 * (m - n) as f64 * theta);
            for j in 0..m_grid {
                let alpha = -std::f64::consts::PI + TAU * j as f64 / m_grid as f64;
                let expect = front * C64::from_polar(1.0, (2 * n - m) as f64 * alpha);
                assert!((out[j] - expect).norm() < 1e-12, "m={m} n={n} j={j}");
            }
        }
    }

    #[test]
    fn apply_twice_is_identity() {
        let m_grid = 16;
        let phi: Vec<C64> = (0..m_grid)
            .map(|j| {
                let th = -std::f64::consts::PI + TAU * j as f64 / m_grid as f64;
                C64::new(1.0 + th.cos(), (2.0 * th).sin())
            })
            .collect();
        let idx = PpttQuantizerIndex::new(TAU / 16.0, 2);
        let once = pptt_quantizer_apply(&idx, &phi).unwrap();
        let twice = pptt_quantizer_apply(&idx, &once).unwrap();
        for j in 0..m_grid {
            assert!((twice[j] - phi[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn matrix_is_parity_antidiagonal_at_origin() {
        let op = pptt_quantizer_matrix(&PpttQuantizerIndex::new(0.0, 0), 1.0, 4).unwrap();
        for mp in -4i64..=4 {
            for m in -4i64..=4 {
                let expect = if m + mp == 0 { 1.0 } else { 0.0 };
                assert!((op.entry(mp, m) - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn matrix_equals_cylinder_quantizer_at_doubled_index() {
        let band = 8;
        let fp = fiber0(1.0);
        for &(theta, n) in &[(0.3, 2i64), (-1.2, -3), (2.9, 0), (1.0, 4)] {
            let idx = PpttQuantizerIndex::new(theta, n);
            let pm = pptt_quantizer_matrix(&idx, 1.0, band).unwrap();
            let cm = quantizer_matrix(&idx.to_wbz(), &fp, band).unwrap();
            assert!(pm.max_abs_diff(&cm) < 1e-14, "({theta},{n})");
        }
    }

    #[test]
    fn matrix_has_unit_trace() {
        for n in -6i64..=6 {
            let op = pptt_quantizer_matrix(&PpttQuantizerIndex::new(0.77, n), 1.0, 6).unwrap();
            assert!((op.trace() - C64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn fourier_of_unit_function_is_dirichlet() {
        let p = 5i64;
        let f = PpttFunction::from_fn(1.0, 2, p, |_, _| C64::new(1.0, 0.0)).unwrap();
        let ff = pptt_fourier(&f, 16).unwrap();
        for t in 0..16 {
            let tau = ff.tau_node(t);
            // 2 pi * Dirichlet_P(tau) at mu = 0, zero elsewhere
            let mut dirichlet = C64::new(0.0, 0.0);
            for n in -p..=p {
                dirichlet += C64::from_polar(1.0, -tau * n as f64);
            }
            assert!((ff.value(t, 0) - dirichlet * TAU).norm() < 1e-11);
            for mu in [-2i64, -1, 1, 2] {
                assert!(ff.value(t, mu).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn fourier_of_single_mode_is_supported_there() {
        let f = PpttFunction::from_fn(1.0, 2, 4, |th, _| C64::from_polar(1.0, th)).unwrap();
        let ff = pptt_fourier(&f, 12).unwrap();
        for t in 0..12 {
            for mu in -2i64..=2 {
                if mu == 1 {
                    continue;
                }
                assert!(ff.value(t, mu).norm() < 1e-11, "mu={mu}");
            }
        }
    }

    #[test]
    fn fourier_round_trip_is_exact_on_lattice() {
        let f = PpttFunction::from_fn(1.0, 3, 5, |th, p| {
            C64::new(th.cos() + 0.3 * p, (2.0 * th).sin() * p)
        })
        .unwrap();
        let ff = pptt_fourier(&f, 2 * 5 + 1).unwrap();
        let back = pptt_fourier_inverse(&ff, 1.0, 5).unwrap();
        assert!(f.max_abs_diff(&back) < 1e-11);
    }

    #[test]
    fn quantize_unit_function_is_identity() {
        let f = PpttFunction::from_fn(1.0, 0, 8, |_, _| C64::new(1.0, 0.0)).unwrap();
        let op = pptt_quantize(&f, 8).unwrap();
        assert!(op.max_abs_diff(&CircleOperator::identity(&fiber0(1.0), 8)) < 1e-14);
    }

    #[test]
    fn quantize_even_mode_matches_weyl_route() {
        // e^{2i theta} on the integer lattice and e^{2i 2pi q/a} on the
        // half-integer lattice quantize to the same operator (E^2)
        let band = 6;
        let f = PpttFunction::from_fn(1.0, 2, band, |th, _| C64::from_polar(1.0, 2.0 * th))
            .unwrap();
        let via_pptt = pptt_quantize(&f, band).unwrap();
        let g = CylinderFunction::from_fn(&fiber0(1.0), 2, 2 * band, |q, _| {
            C64::from_polar(1.0, 2.0 * q)
        })
        .unwrap();
        let via_weyl = weyl_quantize(&g, band).unwrap();
        assert!(via_pptt.max_abs_diff(&via_weyl) < 1e-13);
        let e = CircleOperator::shift(&fiber0(1.0), band);
        assert!(via_pptt.max_abs_diff(&e.dot(&e).unwrap()) < 1e-13);
    }

    #[test]
    fn quantize_rejects_band_overflow() {
        let f = PpttFunction::from_fn(1.0, 0, 3, |_, _| C64::new(1.0, 0.0)).unwrap();
        assert!(matches!(pptt_quantize(&f, 8), Err(Error::BandOverflow(_))));
    }

    #[test]
    fn pair_trace_consistency_with_symbol_pairing() {
        let band = 6;
        let f = PpttFunction::from_fn(1.0, 2, band, |th, p| {
            C64::new((2.0 * th).cos() * (1.0 + 0.2 * p), 0.0)
        })
        .unwrap();
        let g = PpttFunction::from_fn(1.0, 2, band, |th, p| {
            C64::new(0.4 * p + (2.0 * th).sin(), 0.0)
        })
        .unwrap();
        let fo = pptt_quantize(&f, band).unwrap();
        let go = pptt_quantize(&g, band).unwrap();
        let rep = pair_trace_formulas(&fo, &go).unwrap();
        assert!(rep.spread() < 1e-9, "spread {}", rep.spread());
    }

    #[test]
    fn dequantize_inverts_quantize_on_even_modes() {
        let band = 8;
        let f = PpttFunction::from_fn(1.0, 2, band, |th, p| {
            C64::new((2.0 * th).cos() * (1.0 + 0.1 * p * p), 0.3 * p)
        })
        .unwrap();
        let op = pptt_quantize(&f, band).unwrap();
        let back = pptt_dequantize(&op, band / 2, f.grid_size()).unwrap();
        // exact on the sub-band where the anti-diagonals are fully in band
        for n in -band / 2..=band / 2 {
            for mu in -2i64..=2 {
                assert!(
                    (back.angular_mode(mu, n) - f.angular_mode(mu, n)).norm() < 1e-12,
                    "mode ({mu},{n})"
                );
            }
        }
    }

    #[test]
    fn dequantize_projects_out_odd_modes() {
        // the integer lattice cannot address odd anti-diagonals: quantizing
        // cos(theta) and reading it back yields zero
        let band = 6;
        let f = PpttFunction::from_fn(1.0, 1, band, |th, _| C64::new(th.cos(), 0.0)).unwrap();
        let op = pptt_quantize(&f, band).unwrap();
        assert!(op.max_abs_diff(&CircleOperator::zeros(&fiber0(1.0), band)) < 1e-14);
        let back = pptt_dequantize(&op, 3, 5).unwrap();
        for n in -3i64..=3 {
            for mu in -1i64..=1 {
                assert!(back.angular_mode(mu, n).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn bridge_routes_agree() {
        let band = 6;
        let cases: Vec<PpttFunction> = vec![
            PpttFunction::from_fn(1.0, 0, band, |_, _| C64::new(1.0, 0.0)).unwrap(),
            PpttFunction::from_fn(1.0, 1, band, |th, p| C64::new(th.cos() * p, 0.0)).unwrap(),
            PpttFunction::from_fn(1.0, 3, band, |th, p| {
                C64::new((2.0 * th).cos() + 0.2 * p, (3.0 * th).sin() * (1.0 + p))
            })
            .unwrap(),
        ];
        for (i, f) in cases.iter().enumerate() {
            let rep = bridge_equivalence(f, band).unwrap();
            assert!(rep.worst() < 1e-10, "case {i}: {rep:?}");
        }
    }

    #[test]
    fn fold_sign_property_at_doubled_period() {
        // Omega^(0)(x +- 2pi, n) = (-1)^n Omega^(0)(x, n) at a = 2pi
        let fp = fiber0(1.0);
        for n in -5i64..=5 {
            let base = quantizer_matrix(&QuantizerIndex::new(0.9, n), &fp, 6).unwrap();
            let up = quantizer_matrix(&QuantizerIndex::new(0.9 + TAU, n), &fp, 6).unwrap();
            let down = quantizer_matrix(&QuantizerIndex::new(0.9 - TAU, n), &fp, 6).unwrap();
            let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let signed = base.scale(C64::new(sign, 0.0));
            assert!(up.max_abs_diff(&signed) < 1e-13);
            assert!(down.max_abs_diff(&signed) < 1e-13);
        }
    }

    #[test]
    fn unitary_basis_identity_and_diagonal() {
        let band = 6;
        let id = unitary_basis_matrix(0.0, 0, 1.0, band).unwrap();
        assert!(id.max_abs_diff(&CircleOperator::identity(&fiber0(1.0), band)) < 1e-13);
        let tau = 0.83;
        let diag = unitary_basis_matrix(tau, 0, 1.0, band).unwrap();
        for j in -band..=band {
            assert!((diag.entry(j, j) - C64::from_polar(1.0, tau * j as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn unitary_basis_is_unitary() {
        let band = 8;
        for &(tau, m) in &[(0.4, 1i64), (-2.0, 3), (3.0, -2)] {
            let u = unitary_basis_matrix(tau, m, 1.0, band).unwrap();
            let prod = u.dagger().dot(&u).unwrap();
            let defect = prod.max_abs_diff(&CircleOperator::identity(&fiber0(1.0), band));
            assert!(defect < 1e-10, "({tau},{m}): {defect}");
        }
    }

    #[test]
    fn unitary_pair_trace_concentrates_with_band() {
        // weak form of the orthogonality relation: pairing the U-overlap
        // against a smooth test function of tau' approaches g(tau), with the
        // truncation error shrinking as the band grows
        let tau = 0.5;
        let g = |t: f64| (2.0 * (t - 0.3)).cos();
        let mut errs = Vec::new();
        for &band in &[4i64, 8, 16] {
            let u0 = unitary_basis_matrix(tau, 1, 1.0, band).unwrap();
            let steps = 64;
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..steps {
                let tp = -std::f64::consts::PI + TAU * s as f64 / steps as f64;
                let u1 = unitary_basis_matrix(tp, 1, 1.0, band).unwrap();
                let overlap = u0.dagger().dot(&u1).unwrap().trace();
                acc += overlap * C64::new(g(tp), 0.0) * C64::new(TAU / steps as f64 / TAU, 0.0);
            }
            errs.push((acc - C64::new(g(tau), 0.0)).norm());
        }
        assert!(errs[2] < errs[0], "no improvement: {errs:?}");
    }
}
