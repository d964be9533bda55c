//! The Weil-Brezin-Zak transform between the line and the cylinder, fiber
//! analysis of decomposable operators, and the ℝ² Weyl machinery kept at desk
//! scale as a reference oracle for the circle formalism.
//!
//! Fourier convention, shared by every module: ψ̃(u) = ∫ψ(x)e^{−iux/ℏ}dx.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::CircleGrid;

/// Quasi-momentum fiber: k ∈ [0, 2π/a), the circle length a, and ℏ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    pub a: f64,
    pub k: f64,
    pub hbar: f64,
}

impl FiberParams {
    pub fn new(a: f64, k: f64, hbar: f64) -> Result<Self> {
        if !(a > 0.0) || !(hbar > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "fiber needs a > 0 and hbar > 0, got a = {a}, hbar = {hbar}"
            )));
        }
        if !(0.0..2.0 * std::f64::consts::PI / a).contains(&k) {
            return Err(Error::InvalidArgument(format!(
                "quasi-momentum k = {k} outside [0, 2pi/a = {})",
                2.0 * std::f64::consts::PI / a
            )));
        }
        Ok(Self { a, k, hbar })
    }

    /// Basis momentum (2πm/a + k)ℏ.
    pub fn basis_momentum(&self, m: i64) -> f64 {
        (2.0 * std::f64::consts::PI * m as f64 / self.a + self.k) * self.hbar
    }
}

/// Equispaced grid on the line, nodes x_i = x0 + i·dx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl LineGrid {
    /// Symmetric grid over [−half_width, half_width) with `n` nodes.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || n < 2 {
            return Err(Error::InvalidArgument("line grid needs positive extent and n >= 2".into()));
        }
        Ok(Self { x0: -half_width, dx: 2.0 * half_width / n as f64, n })
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    /// Index of an on-grid point, if x coincides with a node.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x - self.x0) / self.dx;
        let i = t.round();
        if (t - i).abs() > 1e-9 || i < 0.0 || i >= self.n as f64 {
            None
        } else {
            Some(i as usize)
        }
    }
}

/// Complex samples on a symmetric line grid with a declared effective
/// support radius: |ψ| stays below 1e−12 of its peak outside |x| > R.
#[derive(Debug, Clone)]
pub struct LineFunction {
    pub grid: LineGrid,
    values: Vec<Complex64>,
    support_radius: f64,
}

impl LineFunction {
    pub fn new(grid: LineGrid, values: Vec<Complex64>, support_radius: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidArgument(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.n
            )));
        }
        let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak > 0.0 {
            for (i, v) in values.iter().enumerate() {
                if grid.node(i).abs() > support_radius && v.norm() > 1e-12 * peak {
                    return Err(Error::InvalidArgument(format!(
                        "sample at x = {} exceeds the declared support radius {support_radius}",
                        grid.node(i)
                    )));
                }
            }
        }
        Ok(Self { grid, values, support_radius })
    }

    pub fn from_fn(grid: LineGrid, support_radius: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = (0..grid.n).map(|i| f(grid.node(i))).collect();
        Self::new(grid, values, support_radius)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// ψ at an arbitrary point: grid lookup, zero beyond the support radius,
    /// error for an off-grid point inside the support.
    pub fn value_at(&self, x: f64) -> Result<Complex64> {
        if let Some(i) = self.grid.index_of(x) {
            return Ok(self.values[i]);
        }
        if x.abs() >= self.support_radius {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Err(Error::GridMismatch(format!("point x = {x} is off-grid inside the support")))
    }

    /// ∫|ψ|²dx by the grid Riemann sum (endpoint values are negligible by
    /// the support invariant).
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// ψ̃(u) = ∫ψ(x)e^{−iux/ℏ}dx by grid quadrature.
    pub fn fourier_at(&self, u: f64, hbar: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            acc += v * Complex64::from_polar(1.0, -u * self.grid.node(i) / hbar);
        }
        acc * self.grid.dx
    }
}

/// One fiber of the WBZ transform: (Tψ)(q,k) = Σ_n e^{inak} ψ(q − na),
/// evaluated on a circle grid. Every translate the grid can see enters the
/// sum; beyond the support radius the translates are zero by construction.
pub fn wbz_transform(
    psi: &LineFunction,
    fp: &FiberParams,
    grid: &CircleGrid,
) -> Result<Vec<Complex64>> {
    if (grid.a - fp.a).abs() > 1e-12 * fp.a {
        return Err(Error::InvalidArgument(format!(
            "circle length {} does not match fiber length {}",
            grid.a, fp.a
        )));
    }
    let xmax = psi.grid.node(psi.grid.n - 1);
    let mut out = Vec::with_capacity(grid.m);
    for j in 0..grid.m {
        let q = grid.node(j);
        let n_min = ((q - xmax) / fp.a).ceil() as i64;
        let n_max = ((q - psi.grid.x0) / fp.a).floor() as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in n_min..=n_max {
            let v = psi.value_at(q - n as f64 * fp.a)?;
            if v.norm_sqr() == 0.0 {
                continue;
            }
            acc += Complex64::from_polar(1.0, n as f64 * fp.a * fp.k) * v;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Fourier coefficients of the fiber: α_n = (1/a)·ψ̃((2πn/a + k)ℏ) for
/// n ∈ [−N, N]. Fails when the requested band exceeds the alias-free band of
/// the line grid.
pub fn fiber_coefficients(
    psi: &LineFunction,
    fp: &FiberParams,
    band: i64,
) -> Result<Vec<Complex64>> {
    let nyquist = std::f64::consts::PI / psi.grid.dx;
    let max_freq = 2.0 * std::f64::consts::PI * band as f64 / fp.a + fp.k.abs();
    if max_freq >= nyquist {
        return Err(Error::InvalidArgument(format!(
            "band {band} needs spatial frequencies up to {max_freq}, beyond the grid Nyquist {nyquist}"
        )));
    }
    Ok((-band..=band)
        .map(|n| psi.fourier_at(fp.basis_momentum(n), fp.hbar) / fp.a)
        .collect())
}

/// Phase-space function sampled on a rectangular desk grid, for the ℝ²
/// reference machinery.
#[derive(Debug, Clone)]
pub struct DeskFunction {
    pub q0: f64,
    pub dq: f64,
    pub p0: f64,
    pub dp: f64,
    values: Array2<Complex64>,
}

impl DeskFunction {
    pub fn from_fn(
        q0: f64,
        dq: f64,
        nq: usize,
        p0: f64,
        dp: f64,
        np: usize,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let mut values = Array2::zeros((nq, np));
        for i in 0..nq {
            for j in 0..np {
                let v = f(q0 + i as f64 * dq, p0 + j as f64 * dp);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "non-finite sample at grid point ({i}, {j})"
                    )));
                }
                values[[i, j]] = v;
            }
        }
        Ok(Self { q0, dq, p0, dp, values })
    }

    fn q_index(&self, q: f64) -> Option<usize> {
        let t = (q - self.q0) / self.dq;
        let i = t.round();
        if (t - i).abs() > 1e-9 || i < 0.0 || i >= self.values.dim().0 as f64 {
            None
        } else {
            Some(i as usize)
        }
    }
}

/// Weyl kernel on the line: K_f(x,y) = (1/2πℏ)∫dp f((x+y)/2, p) e^{i(x−y)p/ℏ},
/// with the p-integral done by the desk-grid trapezoidal rule. The midpoints
/// (x+y)/2 must land on the desk q-grid (take dq = dx/2).
pub fn line_weyl_kernel(
    f: &DeskFunction,
    grid: &LineGrid,
    hbar: f64,
) -> Result<Array2<Complex64>> {
    let np = f.values.dim().1;
    let mut kernel = Array2::zeros((grid.n, grid.n));
    for i in 0..grid.n {
        for j in 0..grid.n {
            let x = grid.node(i);
            let y = grid.node(j);
            let mid = 0.5 * (x + y);
            let qi = f.q_index(mid).ok_or_else(|| {
                Error::GridMismatch(format!("midpoint {mid} is not on the desk q-grid"))
            })?;
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..np {
                let p = f.p0 + l as f64 * f.dp;
                let w = if l == 0 || l == np - 1 { 0.5 } else { 1.0 };
                acc += f.values[[qi, l]] * Complex64::from_polar(w, (x - y) * p / hbar);
            }
            kernel[[i, j]] = acc * f.dp / (2.0 * std::f64::consts::PI * hbar);
        }
    }
    Ok(kernel)
}

/// Grossmann-Royer reflection: (Ω(q₀,p₀)ψ)(x) = (1/πℏ)e^{i2p₀(x−q₀)/ℏ}ψ(2q₀−x).
/// Fails if a reflected point falls off the grid while still inside the
/// support radius.
pub fn grossmann_royer_apply(
    q0: f64,
    p0: f64,
    psi: &LineFunction,
    hbar: f64,
) -> Result<LineFunction> {
    let mut values = Vec::with_capacity(psi.grid.n);
    for i in 0..psi.grid.n {
        let x = psi.grid.node(i);
        let reflected = psi.value_at(2.0 * q0 - x).map_err(|_| {
            Error::InvalidArgument(format!(
                "reflection 2q0 - x = {} leaves the grid inside the support",
                2.0 * q0 - x
            ))
        })?;
        let phase = Complex64::from_polar(1.0 / (std::f64::consts::PI * hbar), 2.0 * p0 * (x - q0) / hbar);
        values.push(phase * reflected);
    }
    let radius = (psi.support_radius() + 2.0 * q0.abs())
        .min(psi.grid.node(psi.grid.n - 1).abs().max(psi.grid.x0.abs()));
    LineFunction::new(psi.grid, values, radius)
}

/// Whether a line operator given by its kernel matrix commutes with the
/// translation T_a, tested as ‖T_a·K·T_a⁻¹ − K‖_max < tol with T_a realized as
/// a grid shift. The shifted comparison runs over the overlapping index range.
pub fn is_decomposable(kernel: &Array2<Complex64>, grid: &LineGrid, a: f64, tol: f64) -> Result<bool> {
    let (rows, cols) = kernel.dim();
    if rows != cols || rows != grid.n {
        return Err(Error::InvalidArgument(format!(
            "kernel is {rows}x{cols}, expected {0}x{0}",
            grid.n
        )));
    }
    let steps = a / grid.dx;
    let s = steps.round();
    if (steps - s).abs() > 1e-9 || s <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "translation length {a} is not a positive multiple of the grid step {}",
            grid.dx
        )));
    }
    let s = s as usize;
    if s >= grid.n {
        return Err(Error::InvalidArgument("translation exceeds the grid extent".into()));
    }
    let mut worst = 0.0f64;
    for i in s..grid.n {
        for j in s..grid.n {
            worst = worst.max((kernel[[i - s, j - s]] - kernel[[i, j]]).norm());
        }
    }
    Ok(worst < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dft_circle, theta3, ThetaArgs};
    use num_complex::Complex64 as C64;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn gaussian_fiducial(omega: f64, hbar: f64) -> impl Fn(f64) -> C64 {
        move |x: f64| {
            let norm = (omega / (std::f64::consts::PI * hbar)).powf(0.25);
            C64::new(norm * (-omega * x * x / (2.0 * hbar)).exp(), 0.0)
        }
    }

    #[test]
    fn transform_of_compactly_supported_function_is_itself() {
        // psi supported inside [0, a): the n = 0 translate is the only one
        let a = TAU;
        let grid = LineGrid::symmetric(2.0 * a, 256).unwrap();
        let bump = |x: f64| {
            let t = (x - a / 2.0) / (a / 8.0);
            C64::new((-t * t * 4.0).exp() * (t * t < 16.0) as u8 as f64, 0.0)
        };
        let psi = LineFunction::from_fn(grid, a, bump).unwrap();
        let cg = CircleGrid::new(a, 64).unwrap();
        for &k in &[0.0, 0.3, 0.95] {
            let fp = FiberParams::new(a, k, 1.0).unwrap();
            let fiber = wbz_transform(&psi, &fp, &cg).unwrap();
            for j in 0..cg.m {
                let expect = psi.value_at(cg.node(j)).unwrap();
                assert!((fiber[j] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn transform_is_periodic_in_k() {
        let a = 3.0;
        let grid = LineGrid::symmetric(18.0, 576).unwrap();
        let psi = LineFunction::from_fn(grid, 4.0 * a, gaussian_fiducial(1.0, 1.0)).unwrap();
        let cg = CircleGrid::new(a, 24).unwrap();
        let k = 0.4;
        let f1 = wbz_transform(&psi, &FiberParams { a, k, hbar: 1.0 }, &cg).unwrap();
        let f2 = wbz_transform(
            &psi,
            &FiberParams { a, k: k + TAU / a, hbar: 1.0 },
            &cg,
        )
        .unwrap();
        for j in 0..cg.m {
            assert!((f1[j] - f2[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_fiber_matches_theta_closed_form() {
        // the fiber of the fiducial Gaussian at q = p = 0 in theta form
        let a = TAU;
        let omega = 1.0;
        let hbar = 1.0;
        let grid = LineGrid::symmetric(4.0 * a, 1024).unwrap();
        let psi = LineFunction::from_fn(grid, 3.0 * a, gaussian_fiducial(omega, hbar)).unwrap();
        let cg = CircleGrid::new(a, 32).unwrap();
        let rho1 = C64::new((-a * a * omega / (2.0 * hbar)).exp(), 0.0);
        for &k in &[0.0, 0.27] {
            let fp = FiberParams::new(a, k, hbar).unwrap();
            let fiber = wbz_transform(&psi, &fp, &cg).unwrap();
            for j in 0..cg.m {
                let qp = cg.node(j);
                let norm = (omega / (std::f64::consts::PI * hbar)).powf(0.25);
                // z* = 0 here: Gaussian factor exp(-(omega q')^2 / (2 omega hbar)),
                // theta argument i (a/2hbar)(-omega q' - i k hbar)
                let gauss = norm * (-omega * qp * qp / (2.0 * hbar)).exp();
                let theta_arg =
                    C64::i() * (a / (2.0 * hbar)) * C64::new(-omega * qp, -k * hbar);
                let th = theta3(ThetaArgs::new(theta_arg, rho1).unwrap(), 1e-14).unwrap();
                let expect = th * gauss;
                assert!(
                    (fiber[j] - expect).norm() < 1e-10,
                    "k={k}, node {j}: {} vs {expect}",
                    fiber[j]
                );
            }
        }
    }

    #[test]
    fn quasi_periodicity_in_q_on_wraparound() {
        // evaluating one period up in q multiplies the fiber by e^{iak}
        let a = 2.0;
        let grid = LineGrid::symmetric(12.0, 960).unwrap();
        let psi = LineFunction::from_fn(grid, 8.0, gaussian_fiducial(1.0, 1.0)).unwrap();
        let k = 0.9;
        let fp = FiberParams::new(a, k, 1.0).unwrap();
        let cg = CircleGrid::new(a, 16).unwrap();
        let fiber = wbz_transform(&psi, &fp, &cg).unwrap();
        // direct sum at q + a
        for j in 0..cg.m {
            let q = cg.node(j) + a;
            let mut acc = C64::new(0.0, 0.0);
            for n in -6i64..=6 {
                acc += C64::from_polar(1.0, n as f64 * a * k)
                    * psi.value_at(q - n as f64 * a).unwrap();
            }
            let expect = C64::from_polar(1.0, a * k) * fiber[j];
            assert!((acc - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn fiber_coefficients_of_gaussian_peak_at_zero() {
        let a = TAU;
        let grid = LineGrid::symmetric(4.0 * a, 1024).unwrap();
        let psi = LineFunction::from_fn(grid, 3.0 * a, gaussian_fiducial(1.0, 1.0)).unwrap();
        let fp = FiberParams::new(a, 0.0, 1.0).unwrap();
        let alphas = fiber_coefficients(&psi, &fp, 6).unwrap();
        let center = alphas[6];
        assert!(center.im.abs() < 1e-12);
        assert!(center.re > 0.0);
        for (i, alpha) in alphas.iter().enumerate() {
            if i != 6 {
                assert!(alpha.norm() < center.norm());
            }
        }
        // oracle: closed-form Gaussian transform, psi~(u) = (4 pi hbar / omega)^{1/4} e^{-u^2/(2 omega hbar)}
        for n in -6i64..=6 {
            let u = fp.basis_momentum(n);
            let expect = (4.0 * std::f64::consts::PI / 1.0).powf(0.25) * (-u * u / 2.0).exp() / a;
            assert!((alphas[(n + 6) as usize] - C64::new(expect, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn fiber_coefficients_match_dft_of_fiber() {
        let a = TAU;
        let grid = LineGrid::symmetric(4.0 * a, 2048).unwrap();
        let psi = LineFunction::from_fn(grid, 3.0 * a, |x| {
            C64::from_polar((-0.4 * x * x).exp(), 0.31 * x)
        })
        .unwrap();
        let k = 0.23;
        let fp = FiberParams::new(a, k, 1.0).unwrap();
        let cg = CircleGrid::new(a, 32).unwrap();
        let fiber = wbz_transform(&psi, &fp, &cg).unwrap();
        let periodic: Vec<C64> = (0..cg.m)
            .map(|j| C64::from_polar(1.0, -k * cg.node(j)) * fiber[j])
            .collect();
        let modes = dft_circle(&periodic).unwrap();
        let alphas = fiber_coefficients(&psi, &fp, 8).unwrap();
        for n in -8i64..=8 {
            assert!(
                (modes.mode(n) - alphas[(n + 8) as usize]).norm() < 1e-10,
                "mode {n}"
            );
        }
    }

    #[test]
    fn fiber_coefficients_blind_to_off_lattice_frequencies() {
        // two line functions differing only at frequencies off the lattice
        // (2 pi n / a + k) hbar produce identical coefficients: the added wave
        // is modulated to k + pi/a, half a lattice spacing away, under an
        // envelope wide enough that its transform is dead at the nodes
        let a = TAU;
        let k = 0.5;
        let fp = FiberParams::new(a, k, 1.0).unwrap();
        // envelope wide enough (sigma = 16) that its transform decays below
        // 1e-12 half a lattice spacing (pi/a = 0.5) away from a node
        let wide = |x: f64| (-x * x / (2.0 * 256.0)).exp();
        let grid = LineGrid::symmetric(135.0, 1080).unwrap();
        let p1 = LineFunction::from_fn(grid, 125.0, |x| C64::new(wide(x) * x.cos(), 0.0))
            .unwrap();
        let p2 = LineFunction::from_fn(grid, 125.0, |x| {
            C64::new(wide(x) * x.cos(), 0.0)
                + C64::from_polar(0.3 * wide(x), (k + std::f64::consts::PI / a) * x)
        })
        .unwrap();
        let b1 = fiber_coefficients(&p1, &fp, 4).unwrap();
        let b2 = fiber_coefficients(&p2, &fp, 4).unwrap();
        for n in 0..b1.len() {
            assert!((b1[n] - b2[n]).norm() < 1e-10, "coefficient {n} differs");
        }
    }

    #[test]
    fn fiber_coefficients_reject_aliased_band() {
        let grid = LineGrid::symmetric(10.0, 64).unwrap();
        let psi = LineFunction::from_fn(grid, 8.0, gaussian_fiducial(1.0, 1.0)).unwrap();
        let fp = FiberParams::new(TAU, 0.0, 1.0).unwrap();
        assert!(matches!(
            fiber_coefficients(&psi, &fp, 40),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn unitarity_over_fiber_average() {
        let a = TAU;
        let grid = LineGrid::symmetric(4.0 * a, 1024).unwrap();
        let psi = LineFunction::from_fn(grid, 3.0 * a, |x| {
            C64::from_polar((-0.6 * x * x).exp(), 0.4 * x)
        })
        .unwrap();
        let nk = 32;
        let mut total = 0.0;
        for t in 0..nk {
            let k = TAU / a * t as f64 / nk as f64;
            let fp = FiberParams::new(a, k, 1.0).unwrap();
            let alphas = fiber_coefficients(&psi, &fp, 10).unwrap();
            let fiber_norm: f64 = alphas.iter().map(|v| v.norm_sqr()).sum::<f64>() * a;
            total += fiber_norm * (a / TAU) * (TAU / a / nk as f64);
        }
        assert!(
            (total - psi.norm_sqr()).abs() < 1e-8,
            "direct-integral norm {} vs {}",
            total,
            psi.norm_sqr()
        );
    }

    #[test]
    fn line_kernel_of_unit_symbol_acts_as_identity() {
        let grid = LineGrid::symmetric(8.0, 128).unwrap();
        let hbar = 1.0;
        let desk = DeskFunction::from_fn(
            grid.x0,
            grid.dx / 2.0,
            2 * grid.n - 1,
            -12.0,
            0.1,
            241,
            |_, _| C64::new(1.0, 0.0),
        )
        .unwrap();
        let kernel = line_weyl_kernel(&desk, &grid, hbar).unwrap();
        let psi = LineFunction::from_fn(grid, 6.0, gaussian_fiducial(2.0, hbar)).unwrap();
        // (K psi)(x) ~= psi(x) up to the sinc cutoff of the truncated p-range
        for i in (0..grid.n).step_by(7) {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..grid.n {
                acc += kernel[[i, j]] * psi.values()[j];
            }
            acc *= grid.dx;
            assert!(
                (acc - psi.values()[i]).norm() < 1e-6,
                "node {i}: {acc} vs {}",
                psi.values()[i]
            );
        }
    }

    #[test]
    fn line_kernel_of_position_multiplies_by_x() {
        let grid = LineGrid::symmetric(8.0, 128).unwrap();
        let hbar = 1.0;
        let desk = DeskFunction::from_fn(
            grid.x0,
            grid.dx / 2.0,
            2 * grid.n - 1,
            -12.0,
            0.1,
            241,
            |q, _| C64::new(q, 0.0),
        )
        .unwrap();
        let kernel = line_weyl_kernel(&desk, &grid, hbar).unwrap();
        let psi = LineFunction::from_fn(grid, 6.0, gaussian_fiducial(2.0, hbar)).unwrap();
        for i in (8..grid.n - 8).step_by(11) {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..grid.n {
                acc += kernel[[i, j]] * psi.values()[j];
            }
            acc *= grid.dx;
            let expect = psi.values()[i] * grid.node(i);
            assert!((acc - expect).norm() < 1e-5, "node {i}: {acc} vs {expect}");
        }
    }

    #[test]
    fn line_kernel_of_real_symbol_is_hermitian() {
        let grid = LineGrid::symmetric(4.0, 32).unwrap();
        let desk = DeskFunction::from_fn(
            grid.x0,
            grid.dx / 2.0,
            2 * grid.n - 1,
            -6.0,
            0.25,
            49,
            |q, p| C64::new(q * p + 0.3 * q * q, 0.0),
        )
        .unwrap();
        let kernel = line_weyl_kernel(&desk, &grid, 1.0).unwrap();
        for i in 0..grid.n {
            for j in 0..grid.n {
                assert!((kernel[[i, j]] - kernel[[j, i]].conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn grossmann_royer_origin_is_scaled_parity() {
        let grid = LineGrid::symmetric(6.0, 120).unwrap();
        let hbar = 0.7;
        let psi = LineFunction::from_fn(grid, 4.5, |x| {
            C64::new(1.0 + 0.5 * x, 0.2 * x) * (-1.5 * x * x).exp()
        })
        .unwrap();
        let out = grossmann_royer_apply(0.0, 0.0, &psi, hbar).unwrap();
        let scale = 1.0 / (std::f64::consts::PI * hbar);
        for i in 1..grid.n {
            let x = grid.node(i);
            let expect = psi.value_at(-x).unwrap() * scale;
            assert!((out.values()[i] - expect).norm() < 1e-13);
        }
        // twice: (1/pi hbar)^2 * identity
        let twice = grossmann_royer_apply(0.0, 0.0, &out, hbar).unwrap();
        for i in 1..grid.n - 1 {
            let expect = psi.values()[i] * scale * scale;
            assert!((twice.values()[i] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn grossmann_royer_even_function_is_eigenvector() {
        let grid = LineGrid::symmetric(6.0, 96).unwrap();
        let hbar = 1.3;
        let psi = LineFunction::from_fn(grid, 4.0, gaussian_fiducial(4.0, 1.0)).unwrap();
        let out = grossmann_royer_apply(0.0, 0.0, &psi, hbar).unwrap();
        let scale = 1.0 / (std::f64::consts::PI * hbar);
        for i in 1..grid.n {
            assert!((out.values()[i] - psi.values()[i] * scale).norm() < 1e-12);
        }
    }

    #[test]
    fn grossmann_royer_rejects_reflections_off_the_support() {
        let grid = LineGrid::symmetric(4.0, 64).unwrap();
        // function still sizeable near the edge: support radius = extent
        let psi = LineFunction::from_fn(grid, 4.0, |x| C64::new(1.0 / (1.0 + x * x), 0.0)).unwrap();
        // 2 q0 off the node lattice: reflected points inside the support are off-grid
        assert!(matches!(
            grossmann_royer_apply(1.03, 0.0, &psi, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn decomposability_criterion() {
        let a = 2.0;
        let grid = LineGrid::symmetric(8.0, 160).unwrap();
        // kernel of a multiplication operator by an a-periodic function
        let mut periodic = Array2::<C64>::zeros((grid.n, grid.n));
        let mut position = Array2::<C64>::zeros((grid.n, grid.n));
        for i in 0..grid.n {
            let x = grid.node(i);
            periodic[[i, i]] = C64::new((TAU * x / a).cos(), 0.0);
            position[[i, i]] = C64::new(x, 0.0);
        }
        assert!(is_decomposable(&periodic, &grid, a, 1e-12).unwrap());
        assert!(!is_decomposable(&position, &grid, a, 1e-12).unwrap());
        let identity = Array2::<C64>::eye(grid.n);
        assert!(is_decomposable(&identity, &grid, a, 1e-12).unwrap());
        assert!(matches!(
            is_decomposable(&identity, &grid, 0.37, 1e-12),
            Err(Error::InvalidArgument(_))
        ));
    }
}
