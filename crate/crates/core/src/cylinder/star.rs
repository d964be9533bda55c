//! Star products on the quantum phase space and the modified trace formulas.
//!
//! Two independent routes are provided. `star_trikernel` contracts two
//! symbols against the closed-form trace of three quantizers; the angular
//! integrals collapse to exact mode sums. `star_mode` is the lattice closed
//! form of the exponential bidifferential product,
//!
//! ```text
//! (e^{im₁θ}g₁) ⋆ (e^{im₂θ}g₂) = e^{i(m₁+m₂)θ} g₁(p + m₂ℏ/2) g₂(p − m₁ℏ/2),
//! ```
//!
//! which stays on the momentum lattice whenever the lattice is closed under
//! half-shifts (always the case at a = 2π).

use num_complex::Complex64;

use crate::error::{Error, Result};


use super::weyl::symbol_of_operator;
use super::{CircleOperator, CylinderFunction, WeylSymbol};

fn representable_at(sym: &WeylSymbol, band: i64) -> Result<()> {
    for r in -sym.ang_band()..=sym.ang_band() {
        for n in -sym.mom_band()..=sym.mom_band() {
            if sym.coeff(r, n).norm_sqr() > 0.0 && n.abs() + r.abs() > 2 * band {
                return Err(Error::MarginViolation(format!(
                    "symbol support (r={r}, n={n}) exceeds the band-{band} window"
                )));
            }
        }
    }
    Ok(())
}

/// Star product through the trikernel:
///
/// ```text
/// (F⋆G)(x,n) = (1/a) Σ_m Σ_l ∫dy∫dz F(y,m) G(z,l) tr{Ω(x,n)Ω(y,m)Ω(z,l)},
/// ```
///
/// with the integrals carried out as exact mode sums. Both factors must fit
/// inside the band-N representability window, which also guarantees equality
/// with `symbol_of_operator(f̂·ĝ)`.
pub fn star_trikernel(f: &WeylSymbol, g: &WeylSymbol, band: i64) -> Result<WeylSymbol> {
    if (f.a - g.a).abs() > 1e-12 * f.a || (f.k - g.k).abs() > 1e-12 || f.hbar != g.hbar {
        return Err(Error::GridMismatch("star product across different fibers".into()));
    }
    representable_at(f, band)?;
    representable_at(g, band)?;
    let fp = f.fiber();
    let ang_out = f.mom_band() + g.mom_band();
    let mom_out = f.ang_band() + g.mom_band();
    let mut out = WeylSymbol::zeros(&fp, ang_out, mom_out);
    for r1 in -f.ang_band()..=f.ang_band() {
        for m in -f.mom_band()..=f.mom_band() {
            let cf = f.coeff(r1, m);
            if cf.norm_sqr() == 0.0 {
                continue;
            }
            for l in -g.mom_band()..=g.mom_band() {
                // the y-integral forces r1 = n − l, the z-integral r2 = m − n
                let n = r1 + l;
                let r2 = m - n;
                let cg = g.coeff(r2, l);
                if cg.norm_sqr() == 0.0 {
                    continue;
                }
                out.add_coeff(m - l, n, cf * cg * Complex64::new(f.a, 0.0))?;
            }
        }
    }
    Ok(out)
}

/// Closed-form lattice star product of two cylinder functions. Output modes
/// live on the same lattice, restricted to the range where every half-shift
/// stays inside both inputs.
pub fn star_mode(f: &CylinderFunction, g: &CylinderFunction) -> Result<CylinderFunction> {
    if (f.a - g.a).abs() > 1e-12 * f.a || (f.k - g.k).abs() > 1e-12 || f.hbar != g.hbar {
        return Err(Error::GridMismatch("star product across different fibers".into()));
    }
    let shift_of = |mu: i64| -> Result<i64> {
        let t = mu as f64 * f.a / (2.0 * std::f64::consts::PI);
        let r = t.round();
        if (t - r).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "mode {mu} shifts off the momentum lattice (a = {} is incommensurate)",
                f.a
            )));
        }
        Ok(r as i64)
    };
    let max_shift_f = (0..=f.ang_band()).try_fold(0i64, |acc, mu| {
        Ok::<i64, Error>(acc.max(shift_of(mu)?.abs()))
    })?;
    let max_shift_g = (0..=g.ang_band()).try_fold(0i64, |acc, mu| {
        Ok::<i64, Error>(acc.max(shift_of(mu)?.abs()))
    })?;
    let mom_out = (f.mom_band() - max_shift_g).min(g.mom_band() - max_shift_f);
    if mom_out < 0 {
        return Err(Error::InvalidArgument(
            "momentum lattice too short for the half-shifted star product".into(),
        ));
    }
    let ang_out = f.ang_band() + g.ang_band();
    let fp = f.fiber();
    let mut modes =
        ndarray::Array2::<Complex64>::zeros(((2 * ang_out + 1) as usize, (2 * mom_out + 1) as usize));
    for mu1 in -f.ang_band()..=f.ang_band() {
        let t1 = shift_of(mu1)?;
        for mu2 in -g.ang_band()..=g.ang_band() {
            let t2 = shift_of(mu2)?;
            for n in -mom_out..=mom_out {
                let v = f.mode(mu1, n + t2) * g.mode(mu2, n - t1);
                if v.norm_sqr() > 0.0 {
                    modes[[(mu1 + mu2 + ang_out) as usize, (n + mom_out) as usize]] += v;
                }
            }
        }
    }
    CylinderFunction::from_modes(&fp, ang_out, mom_out, modes)
}

/// The three trace routes for a single band-limited operator:
/// the matrix trace, Σ_n ∫dq F(2q,n), and Σ_n ∫dq F(q,2n).
#[derive(Debug, Clone)]
pub struct TraceReport {
    pub direct: Complex64,
    pub half_argument: Complex64,
    pub even_lattice: Complex64,
}

impl TraceReport {
    /// Largest pairwise disagreement between the three routes.
    pub fn spread(&self) -> f64 {
        let d1 = (self.direct - self.half_argument).norm();
        let d2 = (self.direct - self.even_lattice).norm();
        let d3 = (self.half_argument - self.even_lattice).norm();
        d1.max(d2).max(d3)
    }
}

/// Evaluate the modified trace formulas for one operator. Both symbol routes
/// use explicit grid quadrature of the evaluated symbol, so they exercise a
/// different numerical path than the matrix trace.
pub fn trace_formulas(op: &CircleOperator) -> TraceReport {
    let sym = symbol_of_operator(op);
    let m_q = (2 * sym.ang_band() + 3) as usize;
    let w = op.a / m_q as f64;

    let mut half_argument = Complex64::new(0.0, 0.0);
    for n in -sym.mom_band()..=sym.mom_band() {
        for j in 0..m_q {
            let q = j as f64 * w;
            half_argument += sym.eval(2.0 * q, n) * w;
        }
    }

    let mut even_lattice = Complex64::new(0.0, 0.0);
    let half = sym.mom_band() / 2;
    for n in -half..=half {
        for j in 0..m_q {
            let q = j as f64 * w;
            even_lattice += sym.eval(q, 2 * n) * w;
        }
    }

    TraceReport { direct: op.trace(), half_argument, even_lattice }
}

/// The trace-pairing routes for a product of two operators: the matrix trace
/// of f̂ĝ, the symbol pairing a Σ_n ∫dq F G, and the star route
/// Σ_n ∫dq (F⋆G)(q,2n).
#[derive(Debug, Clone)]
pub struct PairTraceReport {
    pub direct: Complex64,
    pub symbol_pairing: Complex64,
    pub star_even_lattice: Complex64,
}

impl PairTraceReport {
    pub fn spread(&self) -> f64 {
        let d1 = (self.direct - self.symbol_pairing).norm();
        let d2 = (self.direct - self.star_even_lattice).norm();
        let d3 = (self.symbol_pairing - self.star_even_lattice).norm();
        d1.max(d2).max(d3)
    }
}

pub fn pair_trace_formulas(op1: &CircleOperator, op2: &CircleOperator) -> Result<PairTraceReport> {
    if !op1.same_frame(op2) {
        return Err(Error::GridMismatch("trace pairing across different frames".into()));
    }
    let direct = op1.dot(op2)?.trace();
    let f = symbol_of_operator(op1);
    let g = symbol_of_operator(op2);

    // tr{f g} = a sum_n int dq F(q,n) G(q,n), quadrature on a grid fine
    // enough for the combined half-integer bandwidth
    let m_q = (2 * (f.ang_band() + g.ang_band()) + 3) as usize;
    let w = op1.a / m_q as f64;
    let mut symbol_pairing = Complex64::new(0.0, 0.0);
    for n in -f.mom_band().max(g.mom_band())..=f.mom_band().max(g.mom_band()) {
        for j in 0..m_q {
            let q = j as f64 * w;
            symbol_pairing += f.eval(q, n) * g.eval(q, n) * w;
        }
    }
    symbol_pairing *= op1.a;

    let star = star_trikernel(&f, &g, op1.band())?;
    let m_q2 = (2 * star.ang_band() + 3) as usize;
    let w2 = op1.a / m_q2 as f64;
    let mut star_even_lattice = Complex64::new(0.0, 0.0);
    let half = star.mom_band() / 2;
    for n in -half..=half {
        for j in 0..m_q2 {
            let q = j as f64 * w2;
            star_even_lattice += star.eval(q, 2 * n) * w2;
        }
    }

    Ok(PairTraceReport { direct, symbol_pairing, star_even_lattice })
}
