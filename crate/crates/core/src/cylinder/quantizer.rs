//! The Moyal quantizer Ω⁽ᵏ⁾(x,n) on the circle and its trace identities.
//!
//! In the basis |m;k⟩ the quantizer is purely anti-diagonal,
//!
//! ```text
//! ⟨m'|Ω⁽ᵏ⁾(x,n)|m⟩ = δ_{m+m',n} · e^{iπ(2m−n)x/a},
//! ```
//!
//! which makes every trace identity below exact in the truncated basis as
//! long as the participating indices stay inside the band. Operations reject
//! out-of-window requests instead of silently truncating.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::CircleGrid;
use crate::wbz::FiberParams;

use super::{CircleOperator, QuantizerIndex};

/// Apply Ω⁽ᵏ⁾(x,n) to samples of φ on a circle grid:
/// (Ω⁽ᵏ⁾(x,n)φ)(q) = e^{ik(2q−x)} e^{iπ(2q−x)n/a} φ_c(x−q), where φ_c is the
/// quasi-periodic extension φ_c(y) = e^{iak⌊y/a⌋} φ(y − a⌊y/a⌋).
///
/// The reflection point x must lie on the grid so that x − q_j is again a node.
pub fn quantizer_apply(
    idx: &QuantizerIndex,
    phi: &[Complex64],
    grid: &CircleGrid,
    fp: &FiberParams,
) -> Result<Vec<Complex64>> {
    if phi.len() != grid.m {
        return Err(Error::GridMismatch(format!(
            "sample count {} does not match grid size {}",
            phi.len(),
            grid.m
        )));
    }
    if (grid.a - fp.a).abs() > 1e-12 * fp.a.abs() {
        return Err(Error::GridMismatch(format!(
            "grid length {} does not match fiber length {}",
            grid.a, fp.a
        )));
    }
    let h = grid.step();
    let r_float = idx.x / h;
    let r = r_float.round() as i64;
    if (idx.x - r as f64 * h).abs() > 1e-9 * grid.a {
        return Err(Error::GridMismatch(format!(
            "reflection point x = {} is not a grid node (step {h})",
            idx.x
        )));
    }
    let m_grid = grid.m as i64;
    let out = (0..grid.m)
        .map(|j| {
            let q = grid.node(j);
            // phi_c(x - q_j): node r - j, with one winding phase per wrap
            let t = r - j as i64;
            let wraps = t.div_euclid(m_grid);
            let cell = t.rem_euclid(m_grid) as usize;
            let ext = Complex64::from_polar(1.0, fp.a * fp.k * wraps as f64) * phi[cell];
            let arg = (2.0 * q - idx.x) * (fp.k + std::f64::consts::PI * idx.n as f64 / fp.a);
            Complex64::from_polar(1.0, arg) * ext
        })
        .collect();
    Ok(out)
}

/// Matrix of Ω⁽ᵏ⁾(x,n) in the band-N basis. Requires |n| ≤ 2N so the full
/// anti-diagonal (including its trace contribution) is representable.
pub fn quantizer_matrix(
    idx: &QuantizerIndex,
    fp: &FiberParams,
    band: i64,
) -> Result<CircleOperator> {
    if idx.n.abs() > 2 * band {
        return Err(Error::BandOverflow(format!(
            "quantizer index n = {} needs |n| <= 2N = {}",
            idx.n,
            2 * band
        )));
    }
    let mut op = CircleOperator::zeros(fp, band);
    for m in -band..=band {
        let mp = idx.n - m;
        if mp.abs() > band {
            continue;
        }
        let phase = std::f64::consts::PI * (2 * m - idx.n) as f64 * idx.x / fp.a;
        op.set(mp, m, Complex64::from_polar(1.0, phase));
    }
    Ok(op)
}

/// tr Ω⁽ᵏ⁾(x,n) in the band-N basis: ½(1 + (−1)ⁿ), independent of x and k.
pub fn trace_quantizer(idx: &QuantizerIndex, _fp: &FiberParams, band: i64) -> Result<f64> {
    if idx.n.abs() > 2 * band {
        return Err(Error::BandOverflow(format!(
            "trace of quantizer needs |n| = {} <= 2N = {}",
            idx.n.abs(),
            2 * band
        )));
    }
    // the only diagonal hit is m = n/2, which exists iff n is even
    Ok(if idx.n % 2 == 0 { 1.0 } else { 0.0 })
}

/// tr{Ω(x,n)Ω(y,m)} in the band-N basis.
///
/// Zero exactly when n ≠ m. For n = m this is the truncated Dirichlet
/// regularization of a·δ(x−y): e^{−iπn(y−x)/a} Σ_j e^{i2πj(y−x)/a} with j
/// ranging over the in-band anti-diagonal hits.
pub fn pair_trace(
    idx1: &QuantizerIndex,
    idx2: &QuantizerIndex,
    fp: &FiberParams,
    band: i64,
) -> Complex64 {
    if idx1.n != idx2.n {
        return Complex64::new(0.0, 0.0);
    }
    let n = idx1.n;
    let d = idx2.x - idx1.x;
    let lo = (-band).max(n - band);
    let hi = band.min(n + band);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in lo..=hi {
        let arg = std::f64::consts::PI * (2 * j - n) as f64 * d / fp.a;
        acc += Complex64::from_polar(1.0, arg);
    }
    acc
}

/// Closed form of tr{Ω(x,n)Ω(y,m)Ω(z,l)}:
///
/// ```text
/// ½(1 + (−1)^{n−m+l}) e^{iπ(m−l)x/a} e^{iπ(l−n)y/a} e^{iπ(n−m)z/a}
/// ```
///
/// For even n−m+l the trace passes through the intermediate indices
/// j = (n−m+l)/2, l−j and m−l+j; all three must lie in band, otherwise the
/// truncated matrix product would disagree and the call fails.
pub fn trikernel(
    idx1: &QuantizerIndex,
    idx2: &QuantizerIndex,
    idx3: &QuantizerIndex,
    fp: &FiberParams,
    band: i64,
) -> Result<Complex64> {
    let (n, m, l) = (idx1.n, idx2.n, idx3.n);
    if (n - m + l) % 2 != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let j = (n - m + l) / 2;
    for (label, v) in [("(n-m+l)/2", j), ("l-j", l - j), ("m-l+j", m - l + j)] {
        if v.abs() > band {
            return Err(Error::MarginViolation(format!(
                "trikernel intermediate {label} = {v} outside band {band}"
            )));
        }
    }
    let pi_a = std::f64::consts::PI / fp.a;
    let arg = pi_a * ((m - l) as f64 * idx1.x + (l - n) as f64 * idx2.x + (n - m) as f64 * idx3.x);
    Ok(Complex64::from_polar(1.0, arg))
}
