//! The Weyl correspondence on the cylinder: lattice functions to operators,
//! operators to symbols, and the kernel-to-symbol inversion.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::CircleGrid;

use super::{CircleOperator, CylinderFunction, WeylSymbol};

/// Weyl quantization in mode form:
///
/// ```text
/// ⟨m'|f̂⁽ᵏ⁾|m⟩ = g̃_{m'−m}(p_{m+m'}),   p_j = (πj/a + k)ℏ,
/// ```
///
/// the (m'−m)-th angular mode of f evaluated at the midpoint momentum.
/// Requires the momentum lattice to cover every midpoint (P ≥ 2N) and the
/// angular band to be representable (B ≤ 2N).
pub fn weyl_quantize(f: &CylinderFunction, band: i64) -> Result<CircleOperator> {
    if f.ang_band() > 2 * band {
        return Err(Error::BandOverflow(format!(
            "angular band {} exceeds 2N = {}",
            f.ang_band(),
            2 * band
        )));
    }
    if f.mom_band() < 2 * band {
        return Err(Error::BandOverflow(format!(
            "momentum lattice band {} does not cover the midpoint range 2N = {}",
            f.mom_band(),
            2 * band
        )));
    }
    let fp = f.fiber();
    let mut op = CircleOperator::zeros(&fp, band);
    for mp in -band..=band {
        for m in -band..=band {
            op.set(mp, m, f.mode(mp - m, mp + m));
        }
    }
    Ok(op)
}

/// The Weyl symbol of a lattice function:
///
/// ```text
/// F(x,n) = (1/2a)[ f(x/2, p_n) + (−1)ⁿ f((x+a)/2, p_n) ],
/// ```
///
/// realized on modes: the half-angle substitution sends the angular mode μ of
/// f to the half-integer mode r = μ of F, and the two-point average keeps
/// exactly the modes with r ≡ n (mod 2).
pub fn symbol_of_function(f: &CylinderFunction) -> WeylSymbol {
    let fp = f.fiber();
    let mut sym = WeylSymbol::zeros(&fp, f.ang_band(), f.mom_band());
    for n in -f.mom_band()..=f.mom_band() {
        for r in -f.ang_band()..=f.ang_band() {
            let parity = ((n + r) % 2).rem_euclid(2);
            if parity != 0 {
                continue;
            }
            let c = f.mode(r, n) / f.a;
            if c.norm_sqr() > 0.0 {
                sym.add_coeff(r, n, c).expect("parity-matched coefficient");
            }
        }
    }
    sym
}

/// The Weyl symbol of an operator, F(q,n) = (1/a)·tr{Â Ω⁽ᵏ⁾(q,n)}, read off
/// the anti-diagonal structure: c_{r,n} = (1/a)·⟨(n+r)/2|Â|(n−r)/2⟩.
pub fn symbol_of_operator(op: &CircleOperator) -> WeylSymbol {
    let band = op.band();
    let fp = op.fiber();
    let mut sym = WeylSymbol::zeros(&fp, 2 * band, 2 * band);
    for n in -2 * band..=2 * band {
        for mp in -band..=band {
            let m = n - mp;
            if m.abs() > band {
                continue;
            }
            let r = mp - m;
            let c = op.entry(mp, m) / op.a;
            if c.norm_sqr() > 0.0 {
                sym.add_coeff(r, n, c).expect("anti-diagonal parity");
            }
        }
    }
    sym
}

/// Inverse of [`symbol_of_operator`]: Â = Σ_n ∫dq F(q,n) Ω⁽ᵏ⁾(q,n) as exact
/// mode sums, ⟨m'|Â|m⟩ = a·c_{m'−m, m+m'}.
pub fn operator_from_symbol(sym: &WeylSymbol, band: i64) -> Result<CircleOperator> {
    // every stored coefficient must be addressable by a band-N matrix entry
    for r in -sym.ang_band()..=sym.ang_band() {
        for n in -sym.mom_band()..=sym.mom_band() {
            if sym.coeff(r, n).norm_sqr() > 0.0 && (n.abs() + r.abs()) > 2 * band {
                return Err(Error::BandOverflow(format!(
                    "symbol coefficient (r={r}, n={n}) not representable at band {band}"
                )));
            }
        }
    }
    let fp = sym.fiber();
    let mut op = CircleOperator::zeros(&fp, band);
    for mp in -band..=band {
        for m in -band..=band {
            op.set(mp, m, sym.coeff(mp - m, mp + m) * sym.a);
        }
    }
    Ok(op)
}

/// Invert an integral kernel into symbol samples at fixed n:
///
/// ```text
/// F(x,n) = (1/a) ∫₀ᵃ dy e^{−i2(πn/a + k)y} K(x/2 + y, x/2 − y),
/// ```
///
/// evaluated by the exact grid rule at the doubled-period points x_i = 2q_i,
/// i = 0..M−1. The kernel is extended quasi-periodically,
/// K(q+a, q') = e^{iak} K(q,q').
pub fn kernel_to_symbol(
    kernel: &Array2<Complex64>,
    grid: &CircleGrid,
    fp: &crate::wbz::FiberParams,
    n: i64,
) -> Result<Vec<Complex64>> {
    let (rows, cols) = kernel.dim();
    if rows != cols {
        return Err(Error::InvalidArgument(format!("kernel must be square, got {rows}x{cols}")));
    }
    if rows != grid.m {
        return Err(Error::GridMismatch(format!(
            "kernel size {rows} does not match grid size {}",
            grid.m
        )));
    }
    let m_grid = grid.m as i64;
    let freq = 2.0 * (std::f64::consts::PI * n as f64 / fp.a + fp.k);
    let mut out = Vec::with_capacity(grid.m);
    for i in 0..m_grid {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m_grid {
            let y = grid.node(j as usize);
            // first argument x/2 + y = (i+j)h, second x/2 − y = (i−j)h
            let u = i + j;
            let v = i - j;
            let wu = u.div_euclid(m_grid);
            let wv = v.div_euclid(m_grid);
            let ku = u.rem_euclid(m_grid) as usize;
            let kv = v.rem_euclid(m_grid) as usize;
            let wrap = Complex64::from_polar(1.0, fp.a * fp.k * (wu - wv) as f64);
            acc += Complex64::from_polar(1.0, -freq * y) * wrap * kernel[[ku, kv]];
        }
        out.push(acc / m_grid as f64);
    }
    Ok(out)
}
