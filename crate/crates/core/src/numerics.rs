//! Shared numerical substrate: circle grids, discrete Fourier analysis on S¹,
//! the Jacobi theta function θ₃, and small dense complex linear algebra.
//!
//! Quadrature over the circle is always the equispaced trapezoidal rule, which
//! is exact for trigonometric polynomials of band up to ⌊(M−1)/2⌋. All higher
//! modules rely on that exactness, so grids must satisfy `M >= 2N+1` for the
//! band limit `N` they are used with.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Equispaced grid on the circle [0, a) with nodes q_j = j·a/M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleGrid {
    /// Circumference of the circle (position units).
    pub a: f64,
    /// Number of nodes.
    pub m: usize,
}

impl CircleGrid {
    pub fn new(a: f64, m: usize) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidArgument(format!("circle length must be positive, got {a}")));
        }
        if m < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 nodes, got {m}")));
        }
        Ok(Self { a, m })
    }

    /// Node spacing a/M.
    pub fn step(&self) -> f64 {
        self.a / self.m as f64
    }

    /// The j-th node q_j = j·a/M.
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.a / self.m as f64
    }

    /// All nodes in order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.node(j)).collect()
    }

    /// Largest band limit N for which the grid resolves modes exactly.
    pub fn max_band(&self) -> usize {
        (self.m - 1) / 2
    }

    /// Sample a function of position on the grid.
    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..self.m).map(|j| f(self.node(j))).collect()
    }
}

/// Angular Fourier coefficients of samples on a [`CircleGrid`], indexed by the
/// signed mode m ∈ [−⌊M/2⌋, ⌈M/2⌉−1], with the convention
/// g(q_j) = Σ_m g̃_m e^{i2πm q_j/a}.
#[derive(Debug, Clone)]
pub struct CircleModes {
    coeffs: Vec<Complex64>,
}

impl CircleModes {
    /// Number of modes (equals the grid size the transform was taken on).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest representable mode index −⌊M/2⌋.
    pub fn min_mode(&self) -> i64 {
        -((self.coeffs.len() / 2) as i64)
    }

    /// Largest representable mode index ⌈M/2⌉−1.
    pub fn max_mode(&self) -> i64 {
        (self.coeffs.len() as i64 + 1) / 2 - 1
    }

    /// Coefficient g̃_m; zero outside the representable window.
    pub fn mode(&self, m: i64) -> Complex64 {
        if m < self.min_mode() || m > self.max_mode() {
            return Complex64::new(0.0, 0.0);
        }
        let mm = self.coeffs.len() as i64;
        let k = m.rem_euclid(mm) as usize;
        self.coeffs[k]
    }

    /// Build from explicit mode/coefficient pairs on a grid of size `m_grid`.
    pub fn from_pairs(m_grid: usize, pairs: &[(i64, Complex64)]) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m_grid];
        for &(m, c) in pairs {
            let lo = -((m_grid / 2) as i64);
            let hi = (m_grid as i64 + 1) / 2 - 1;
            if m < lo || m > hi {
                return Err(Error::BandOverflow(format!("mode {m} outside [{lo}, {hi}]")));
            }
            coeffs[m.rem_euclid(m_grid as i64) as usize] += c;
        }
        Ok(Self { coeffs })
    }
}

/// Forward DFT on the circle: samples at q_j = j·a/M to mode coefficients g̃_m
/// with g(q_j) = Σ_m g̃_m e^{i2πm q_j/a}.
pub fn dft_circle(samples: &[Complex64]) -> Result<CircleModes> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("dft_circle: empty input".into()));
    }
    let n = samples.len();
    let mut buf = samples.to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    Ok(CircleModes { coeffs: buf })
}

/// Inverse of [`dft_circle`]: reconstruct the samples from mode coefficients.
pub fn idft_circle(modes: &CircleModes) -> Result<Vec<Complex64>> {
    if modes.is_empty() {
        return Err(Error::InvalidArgument("idft_circle: empty input".into()));
    }
    let n = modes.len();
    let mut buf = modes.coeffs.clone();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut buf);
    Ok(buf)
}

/// Arguments of the Jacobi theta function θ(z; ρ) = Σ_n ρ^{n²} e^{2inz}.
#[derive(Debug, Clone, Copy)]
pub struct ThetaArgs {
    pub z: Complex64,
    pub rho: Complex64,
}

impl ThetaArgs {
    pub fn new(z: Complex64, rho: Complex64) -> Result<Self> {
        if rho.norm() >= 1.0 {
            return Err(Error::Domain(format!("theta nome |rho| = {} must be < 1", rho.norm())));
        }
        Ok(Self { z, rho })
    }
}

/// Jacobi θ₃: Σ_n ρ^{n²} e^{2inz}, truncated once the tail bound
/// |ρ|^{n²} e^{2n|Im z|} drops below tol·10⁻².
pub fn theta3(args: ThetaArgs, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("theta3 tolerance must be positive, got {tol}")));
    }
    let ThetaArgs { z, rho } = args;
    let r = rho.norm();
    if r >= 1.0 {
        return Err(Error::Domain(format!("theta nome |rho| = {r} must be < 1")));
    }
    if r == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let im = z.im.abs();
    let log_cutoff = (tol * 1e-2).ln();
    let ln_rho = rho.ln();
    let i = Complex64::i();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut n = 1u32;
    loop {
        let nf = n as f64;
        // terms assembled in log space: rho^{n^2} e^{+-2inz} = exp(n^2 ln(rho) +- 2inz),
        // so an underflowing factor never meets an overflowing one
        let base = ln_rho * nf * nf;
        sum += (base + 2.0 * nf * i * z).exp() + (base - 2.0 * nf * i * z).exp();
        // super-geometric decay: |rho|^{n^2} e^{2 n |Im z|}
        let log_bound = nf * nf * ln_rho.re + 2.0 * nf * im;
        if log_bound < log_cutoff {
            break;
        }
        n += 1;
        if n > 100_000 {
            return Err(Error::Domain("theta3 series failed to converge".into()));
        }
    }
    Ok(sum)
}

/// Matrix exponential of a dense complex matrix by scaling-and-squaring with a
/// Taylor expansion. Sized for the truncated bases used here (a few hundred
/// rows at most).
pub fn expm(h: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (r, c) = h.dim();
    if r != c {
        return Err(Error::InvalidArgument(format!("expm needs a square matrix, got {r}x{c}")));
    }
    // 1-norm to pick the scaling power.
    let norm1 = (0..c)
        .map(|j| (0..r).map(|i| h[[i, j]].norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let s = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = Complex64::new(1.0 / f64::powi(2.0, s as i32), 0.0);
    let t = h.mapv(|v| v * scale);

    let mut result = Array2::<Complex64>::eye(r);
    let mut term = Array2::<Complex64>::eye(r);
    for k in 1..=40u32 {
        term = term.dot(&t).mapv(|v| v / k as f64);
        result = &result + &term;
        let tnorm: f64 = term.iter().map(|v| v.norm()).sum();
        if tnorm < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    Ok(result)
}

/// Max-norm of the entrywise difference between two matrices.
pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Independent inverse transform: explicit O(M²) mode sum.
    fn idft_direct(modes: &CircleModes) -> Vec<C64> {
        let m_grid = modes.len();
        (0..m_grid)
            .map(|j| {
                let mut acc = c(0.0, 0.0);
                for m in modes.min_mode()..=modes.max_mode() {
                    let phase = 2.0 * std::f64::consts::PI * m as f64 * j as f64 / m_grid as f64;
                    acc += modes.mode(m) * C64::from_polar(1.0, phase);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn dft_constant_is_zero_mode() {
        let samples = vec![c(3.25, -1.5); 8];
        let modes = dft_circle(&samples).unwrap();
        assert!((modes.mode(0) - c(3.25, -1.5)).norm() < 1e-14);
        for m in modes.min_mode()..=modes.max_mode() {
            if m != 0 {
                assert!(modes.mode(m).norm() < 1e-14, "mode {m} leaked");
            }
        }
    }

    #[test]
    fn dft_cosine_splits_into_two_modes() {
        let grid = CircleGrid::new(2.0 * std::f64::consts::PI, 8).unwrap();
        let samples = grid.sample(|q| c(q.cos(), 0.0));
        let modes = dft_circle(&samples).unwrap();
        assert!((modes.mode(1) - c(0.5, 0.0)).norm() < 1e-14);
        assert!((modes.mode(-1) - c(0.5, 0.0)).norm() < 1e-14);
        for m in modes.min_mode()..=modes.max_mode() {
            if m != 1 && m != -1 {
                assert!(modes.mode(m).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dft_empty_input_errors() {
        assert!(matches!(dft_circle(&[]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dft_round_trip_matches_direct_inverse() {
        // fixed pseudo-random band-limited samples
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let samples: Vec<C64> = (0..16).map(|_| c(next(), next())).collect();
        let modes = dft_circle(&samples).unwrap();
        let back = idft_circle(&modes).unwrap();
        let direct = idft_direct(&modes);
        for j in 0..16 {
            assert!((back[j] - samples[j]).norm() < 1e-12);
            assert!((direct[j] - samples[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn theta3_rho_zero_is_one() {
        let args = ThetaArgs::new(c(0.73, -0.2), c(0.0, 0.0)).unwrap();
        assert_eq!(theta3(args, 1e-12).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn theta3_matches_direct_series() {
        // direct series oracle at (z = 0, rho = 0.1):
        // 1 + 2(0.1 + 0.1^4 + 0.1^9 + ...) = 1.2002000020000002
        let args = ThetaArgs::new(c(0.0, 0.0), c(0.1, 0.0)).unwrap();
        let got = theta3(args, 1e-13).unwrap();
        let mut oracle = 1.0;
        for n in 1..12 {
            oracle += 2.0 * 0.1f64.powi(n * n);
        }
        assert!((oracle - 1.200_200_002_000_000_2).abs() < 1e-15);
        assert!((got - c(oracle, 0.0)).norm() < 1e-12, "got {got}");
    }

    #[test]
    fn theta3_period_pi() {
        let rho = c(0.3, 0.0);
        for &zr in &[0.0, 0.4, 1.1, -2.3] {
            for &zi in &[0.0, 0.2, -0.5] {
                let z = c(zr, zi);
                let a = theta3(ThetaArgs::new(z, rho).unwrap(), 1e-13).unwrap();
                let b = theta3(
                    ThetaArgs::new(z + c(std::f64::consts::PI, 0.0), rho).unwrap(),
                    1e-13,
                )
                .unwrap();
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn theta3_rejects_bad_arguments() {
        assert!(matches!(ThetaArgs::new(c(0.0, 0.0), c(1.0, 0.0)), Err(Error::Domain(_))));
        let ok = ThetaArgs::new(c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(matches!(theta3(ok, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(theta3(ok, -1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn expm_diagonal_phases() {
        let mut h = Array2::<C64>::zeros((3, 3));
        for (j, lam) in [-1.0, 0.5, 2.0].iter().enumerate() {
            h[[j, j]] = c(0.0, *lam);
        }
        let e = expm(&h).unwrap();
        for (j, lam) in [-1.0, 0.5, 2.0].iter().enumerate() {
            assert!((e[[j, j]] - C64::from_polar(1.0, *lam)).norm() < 1e-14);
        }
    }

    #[test]
    fn expm_matches_2x2_rotation() {
        // exp(i t sigma_x) = cos t I + i sin t sigma_x
        let t = 0.813;
        let mut h = Array2::<C64>::zeros((2, 2));
        h[[0, 1]] = c(0.0, t);
        h[[1, 0]] = c(0.0, t);
        let e = expm(&h).unwrap();
        assert!((e[[0, 0]] - c(t.cos(), 0.0)).norm() < 1e-13);
        assert!((e[[0, 1]] - c(0.0, t.sin())).norm() < 1e-13);
        assert!((e[[1, 0]] - c(0.0, t.sin())).norm() < 1e-13);
        assert!((e[[1, 1]] - c(t.cos(), 0.0)).norm() < 1e-13);
    }

    proptest! {
        #[test]
        fn dft_idft_identity_on_mode_space(values in proptest::collection::vec(-1.0f64..1.0, 10)) {
            let m_grid = 10usize;
            let pairs: Vec<(i64, C64)> = values.chunks(2).enumerate()
                .map(|(idx, ch)| (idx as i64 - 2, c(ch[0], ch[1])))
                .collect();
            let modes = CircleModes::from_pairs(m_grid, &pairs).unwrap();
            let samples = idft_circle(&modes).unwrap();
            let back = dft_circle(&samples).unwrap();
            for m in modes.min_mode()..=modes.max_mode() {
                prop_assert!((back.mode(m) - modes.mode(m)).norm() < 1e-12);
            }
        }

        #[test]
        fn parseval_holds_for_band_limited_samples(values in proptest::collection::vec(-1.0f64..1.0, 12)) {
            let grid = CircleGrid::new(3.0, 16).unwrap();
            let pairs: Vec<(i64, C64)> = values.chunks(2).enumerate()
                .map(|(idx, ch)| (idx as i64 - 3, c(ch[0], ch[1])))
                .collect();
            let modes = CircleModes::from_pairs(grid.m, &pairs).unwrap();
            let samples = idft_circle(&modes).unwrap();
            let lhs: f64 = samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.step();
            let rhs: f64 = grid.a * (modes.min_mode()..=modes.max_mode())
                .map(|m| modes.mode(m).norm_sqr())
                .sum::<f64>();
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn theta3_even_in_z_for_real_rho(zr in -2.0f64..2.0, zi in -0.8f64..0.8) {
            let rho = c(0.35, 0.0);
            let z = c(zr, zi);
            let plus = theta3(ThetaArgs::new(z, rho).unwrap(), 1e-12).unwrap();
            let minus = theta3(ThetaArgs::new(-z, rho).unwrap(), 1e-12).unwrap();
            prop_assert!((plus - minus).norm() < 1e-11);
        }
    }
}
