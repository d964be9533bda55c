//! Coherent states on the circle: fibers of translated Weyl-Heisenberg
//! Gaussians, their theta-function closed form, resolution of unity, and the
//! semiclassical sweep.
//!
//! Two equal evaluation routes exist for the wavefunction: the theta series
//! and the periodized-Gaussian sum over translates. The theta route is the
//! primary one; the position sum takes over in the deep small-ℏ / large-ω
//! regime where the nome underflows and the series terms overflow.

use num_complex::Complex64;

use crate::cylinder::{weyl_quantize, CircleOperator, CylinderFunction};
use crate::error::{Error, Result};
use crate::numerics::{theta3, CircleGrid, ThetaArgs};
use crate::wbz::FiberParams;

/// Parameters (q, p, k, ω, ℏ, a) of a circle coherent state |q,p;k⟩.
#[derive(Debug, Clone, Copy)]
pub struct CoherentStateParams {
    pub q: f64,
    pub p: f64,
    pub k: f64,
    pub omega: f64,
    pub hbar: f64,
    pub a: f64,
}

impl CoherentStateParams {
    pub fn new(q: f64, p: f64, k: f64, omega: f64, hbar: f64, a: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::InvalidArgument(format!("Gaussian width omega = {omega} must be positive")));
        }
        if !(hbar > 0.0) || !(a > 0.0) {
            return Err(Error::InvalidArgument("hbar and a must be positive".into()));
        }
        Ok(Self { q, p, k, omega, hbar, a })
    }

    pub fn fiber(&self) -> FiberParams {
        FiberParams { a: self.a, k: self.k, hbar: self.hbar }
    }

    /// The theta nome ρ₁ = exp(−a²ω/2ℏ) ∈ (0,1).
    pub fn rho1(&self) -> f64 {
        (-self.a * self.a * self.omega / (2.0 * self.hbar)).exp()
    }

    /// Basis momentum (2πm/a + k)ℏ.
    fn basis_momentum(&self, m: i64) -> f64 {
        (2.0 * std::f64::consts::PI * m as f64 / self.a + self.k) * self.hbar
    }
}

/// Translated Weyl-Heisenberg Gaussian on the line,
/// η_{q,p}(x) = e^{(i/ℏ)p(x−q/2)} (ω/πℏ)^{1/4} e^{−ω(x−q)²/2ℏ}.
pub fn heisenberg_gaussian(csp: &CoherentStateParams, x: f64) -> Complex64 {
    let norm = (csp.omega / (std::f64::consts::PI * csp.hbar)).powf(0.25);
    let envelope = (-csp.omega * (x - csp.q) * (x - csp.q) / (2.0 * csp.hbar)).exp();
    Complex64::from_polar(norm * envelope, csp.p * (x - 0.5 * csp.q) / csp.hbar)
}

/// Evaluate the coherent state wavefunction on a circle grid.
pub fn cs_wavefunction(csp: &CoherentStateParams, grid: &CircleGrid) -> Result<Vec<Complex64>> {
    if (grid.a - csp.a).abs() > 1e-12 * csp.a {
        return Err(Error::GridMismatch(format!(
            "grid length {} does not match state length {}",
            grid.a, csp.a
        )));
    }
    let c = csp.a * csp.a * csp.omega / (2.0 * csp.hbar);
    let pw = csp.p * csp.p / (2.0 * csp.omega * csp.hbar);
    if c > 600.0 || pw > 600.0 {
        return Ok(position_sum(csp, grid));
    }
    let norm = (csp.omega / (std::f64::consts::PI * csp.hbar)).powf(0.25);
    let zstar = Complex64::new(csp.omega * csp.q, csp.p);
    let pref1 = (Complex64::i() * csp.p * zstar / (2.0 * csp.omega * csp.hbar)).exp();
    let rho = Complex64::new(csp.rho1(), 0.0);
    let mut out = Vec::with_capacity(grid.m);
    for j in 0..grid.m {
        let qp = grid.node(j);
        let w = zstar - Complex64::new(csp.omega * qp, 0.0);
        let pref2 = (-w * w / (2.0 * csp.omega * csp.hbar)).exp();
        let theta_arg = Complex64::i() * (csp.a / (2.0 * csp.hbar))
            * (w - Complex64::new(0.0, csp.k * csp.hbar));
        let th = theta3(ThetaArgs::new(theta_arg, rho)?, 1e-14)?;
        out.push(pref1 * pref2 * th * norm);
    }
    Ok(out)
}

/// Fallback route: the periodized Gaussian sum Σ_n e^{inak} η_{q,p}(q'−na).
fn position_sum(csp: &CoherentStateParams, grid: &CircleGrid) -> Vec<Complex64> {
    // translate radius where the Gaussian envelope drops below 1e-18
    let radius = (2.0 * csp.hbar * 42.0 / csp.omega).sqrt();
    (0..grid.m)
        .map(|j| {
            let qp = grid.node(j);
            let n_min = ((qp - csp.q - radius) / csp.a).floor() as i64;
            let n_max = ((qp - csp.q + radius) / csp.a).ceil() as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for n in n_min..=n_max {
                acc += Complex64::from_polar(1.0, n as f64 * csp.a * csp.k)
                    * heisenberg_gaussian(csp, qp - n as f64 * csp.a);
            }
            acc
        })
        .collect()
}

/// Closed-form coefficients ⟨m;k|q,p;k⟩, m ∈ [−N, N]: a Gaussian profile in
/// momentum times the Weyl-Heisenberg phase.
pub fn cs_coefficients(csp: &CoherentStateParams, band: i64) -> Vec<Complex64> {
    let scale = (csp.omega / (std::f64::consts::PI * csp.hbar)).powf(0.25)
        * (2.0 * std::f64::consts::PI * csp.hbar / csp.omega).sqrt()
        / csp.a.sqrt();
    (-band..=band)
        .map(|m| {
            let pm = csp.basis_momentum(m);
            let envelope = (-(pm - csp.p) * (pm - csp.p) / (2.0 * csp.omega * csp.hbar)).exp();
            Complex64::from_polar(scale * envelope, (0.5 * csp.p - pm) * csp.q / csp.hbar)
        })
        .collect()
}

/// Quadrature setup for the resolution-of-unity check.
#[derive(Debug, Clone, Copy)]
pub struct ResolutionParams {
    pub a: f64,
    pub k: f64,
    pub hbar: f64,
    pub omega: f64,
    /// half-width of the p-integration window around kℏ
    pub p_cutoff: f64,
    pub p_steps: usize,
    pub q_steps: usize,
}

/// Assemble (1/2πℏ)∫₀ᵃdq∫dp |q,p;k⟩⟨q,p;k| in the band-N basis and return
/// the max-norm deviation from the identity.
pub fn resolution_of_unity(rp: &ResolutionParams, band: i64) -> Result<f64> {
    if rp.p_steps < 2 || rp.q_steps < 2 {
        return Err(Error::InvalidArgument("resolution check needs at least 2 quadrature nodes".into()));
    }
    let dim = (2 * band + 1) as usize;
    let mut acc = ndarray::Array2::<Complex64>::zeros((dim, dim));
    let dq = rp.a / rp.q_steps as f64;
    let p_lo = rp.k * rp.hbar - rp.p_cutoff;
    let p_hi = rp.k * rp.hbar + rp.p_cutoff;
    let dp = (p_hi - p_lo) / (rp.p_steps - 1) as f64;
    for iq in 0..rp.q_steps {
        let q = iq as f64 * dq;
        for ip in 0..rp.p_steps {
            let p = p_lo + ip as f64 * dp;
            let wp = if ip == 0 || ip == rp.p_steps - 1 { 0.5 } else { 1.0 };
            let csp = CoherentStateParams { q, p, k: rp.k, omega: rp.omega, hbar: rp.hbar, a: rp.a };
            let alpha = cs_coefficients(&csp, band);
            let w = dq * dp * wp / (2.0 * std::f64::consts::PI * rp.hbar);
            for i in 0..dim {
                if alpha[i].norm_sqr() < 1e-60 {
                    continue;
                }
                for j in 0..dim {
                    acc[[i, j]] += alpha[i] * alpha[j].conj() * w;
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc[[i, j]] - Complex64::new(expect, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Translation action U⁽ᵏ⁾(x,n)|q,p;k⟩ = e^{iπnq/a} e^{ipx/2ℏ}
/// |q−x, p+2πℏn/a; k⟩: returns the translated parameters (with q reduced back
/// to [0,a), folding the reduction phase into the scalar) and the phase.
pub fn cs_translation(
    x: f64,
    n: i64,
    csp: &CoherentStateParams,
) -> (CoherentStateParams, Complex64) {
    let p_new = csp.p + 2.0 * std::f64::consts::PI * csp.hbar * n as f64 / csp.a;
    let raw_q = csp.q - x;
    let wraps = (raw_q / csp.a).floor();
    let q_new = raw_q - wraps * csp.a;
    // |q + a, p> = e^{i(p a / 2hbar - k a)} |q, p>, applied `wraps` times
    let wrap_phase = wraps * (p_new * csp.a / (2.0 * csp.hbar) - csp.k * csp.a);
    let phase = Complex64::from_polar(
        1.0,
        std::f64::consts::PI * n as f64 * csp.q / csp.a + csp.p * x / (2.0 * csp.hbar) + wrap_phase,
    );
    (
        CoherentStateParams { q: q_new, p: p_new, ..*csp },
        phase,
    )
}

/// One row of the semiclassical sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub hbar: f64,
    pub band: i64,
    pub norm_sqr: f64,
    pub e_exp: Complex64,
    pub p_exp: Complex64,
    pub f_exp: Complex64,
    pub bracket_exp: Complex64,
    pub err_norm: f64,
    pub err_e: f64,
    pub err_p: f64,
    pub err_f: f64,
    pub err_bracket: f64,
}

/// Sweep configuration: the phase-space point, fixed Gaussian width, and the
/// decreasing ℏ sequence.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub a: f64,
    pub k: f64,
    pub omega: f64,
    pub q: f64,
    pub p: f64,
    pub hbars: Vec<f64>,
}

/// Band needed to hold the coefficient Gaussian at this ℏ with a tail below
/// working precision.
fn sweep_band(cfg: &SweepConfig, hbar: f64, ang_band: i64) -> i64 {
    let center = ((cfg.p / hbar - cfg.k) * cfg.a / (2.0 * std::f64::consts::PI)).abs();
    let width = 9.0 * (cfg.omega * hbar).sqrt() * cfg.a / (2.0 * std::f64::consts::PI * hbar);
    (center + width).ceil() as i64 + ang_band + 2
}

/// Semiclassical expectation sweep: for each ℏ computes ⟨f̂⟩, ⟨E⟩, ⟨P̂⁽ᵏ⁾⟩ and
/// the scaled commutator (1/iℏ)⟨[f̂,ĝ]⟩ in the state |q,p;k⟩, and the
/// distances to the classical values f(q,p), e^{i2πq/a}, p and {f,g}(q,p).
pub fn semiclassical_sweep(
    cfg: &SweepConfig,
    observable: impl Fn(f64, f64) -> Complex64,
    obs_band: i64,
    partner: impl Fn(f64, f64) -> Complex64,
    partner_band: i64,
    poisson_ref: Complex64,
) -> Result<Vec<SweepRow>> {
    if cfg.hbars.is_empty() {
        return Err(Error::InvalidArgument("sweep needs a non-empty hbar sequence".into()));
    }
    let mut rows = Vec::with_capacity(cfg.hbars.len());
    for &hbar in &cfg.hbars {
        let band = sweep_band(cfg, hbar, obs_band.max(partner_band));
        let fp = FiberParams { a: cfg.a, k: cfg.k, hbar };
        let csp = CoherentStateParams {
            q: cfg.q,
            p: cfg.p,
            k: cfg.k,
            omega: cfg.omega,
            hbar,
            a: cfg.a,
        };
        let alpha = cs_coefficients(&csp, band);
        let norm_sqr: f64 = alpha.iter().map(|v| v.norm_sqr()).sum();

        let f_fn = CylinderFunction::from_fn(&fp, obs_band, 2 * band, &observable)?;
        let g_fn = CylinderFunction::from_fn(&fp, partner_band, 2 * band, &partner)?;
        let f_op = weyl_quantize(&f_fn, band)?;
        let g_op = weyl_quantize(&g_fn, band)?;
        let commutator = f_op
            .dot(&g_op)?
            .add(&g_op.dot(&f_op)?.scale(Complex64::new(-1.0, 0.0)))?;
        let bracket_op = commutator.scale(Complex64::new(0.0, -1.0 / hbar));

        let expect = |op: &CircleOperator| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for mp in -band..=band {
                let mut row = Complex64::new(0.0, 0.0);
                for m in -band..=band {
                    row += op.entry(mp, m) * alpha[(m + band) as usize];
                }
                acc += alpha[(mp + band) as usize].conj() * row;
            }
            acc / norm_sqr
        };

        let e_exp = {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in -band..band {
                acc += alpha[(m + 1 + band) as usize].conj() * alpha[(m + band) as usize];
            }
            acc / norm_sqr
        };
        let p_exp = {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in -band..=band {
                acc += Complex64::new(
                    csp.basis_momentum(m) * alpha[(m + band) as usize].norm_sqr(),
                    0.0,
                );
            }
            acc / norm_sqr
        };
        let f_exp = expect(&f_op);
        let bracket_exp = expect(&bracket_op);

        let e_classical = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * cfg.q / cfg.a);
        let f_classical = observable(cfg.q, cfg.p);

        rows.push(SweepRow {
            hbar,
            band,
            norm_sqr,
            e_exp,
            p_exp,
            f_exp,
            bracket_exp,
            err_norm: (norm_sqr - 1.0).abs(),
            err_e: (e_exp - e_classical).norm(),
            err_p: (p_exp - Complex64::new(cfg.p, 0.0)).norm(),
            err_f: (f_exp - f_classical).norm(),
            err_bracket: (bracket_exp - poisson_ref).norm(),
        });
    }
    Ok(rows)
}
