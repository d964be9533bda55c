//! Quantum formalism on the cylinder S¹×ℝ in a truncated angular-momentum
//! basis: classical observables on the momentum lattice, Weyl symbols on the
//! quantum phase space S¹×ℤ, circle operators, and the Moyal quantizer
//! machinery connecting them.
//!
//! Conventions, used everywhere:
//!
//! - basis states ⟨q|m;k⟩ = a^{−1/2} e^{i(2πm/a + k)q}, m ∈ [−N, N];
//! - momentum lattice p_n = (πn/a + k)ℏ with half the basis spacing, so the
//!   midpoint momenta p_{m+m'} appearing in matrix elements always lie on it;
//! - symbols F(x,n) carry half-integer angular modes e^{iπrx/a} with the
//!   parity constraint r ≡ n (mod 2), which makes F(x+a,n) = (−1)ⁿF(x,n)
//!   structural.

mod quantizer;
mod star;
mod weyl;

pub use quantizer::{pair_trace, quantizer_apply, quantizer_matrix, trace_quantizer, trikernel};
pub use star::{
    pair_trace_formulas, star_mode, star_trikernel, trace_formulas, PairTraceReport, TraceReport,
};
pub use weyl::{kernel_to_symbol, operator_from_symbol, symbol_of_function, symbol_of_operator, weyl_quantize};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{dft_circle, CircleGrid};
use crate::wbz::FiberParams;

/// Classical observable f(q,p) on the cylinder, stored as angular Fourier
/// modes g̃_μ(p_n) on the discrete momentum lattice p_n = (πn/a + k)ℏ.
#[derive(Debug, Clone)]
pub struct CylinderFunction {
    pub a: f64,
    pub k: f64,
    pub hbar: f64,
    ang_band: i64,
    mom_band: i64,
    /// modes[(μ + ang_band), (n + mom_band)] = g̃_μ(p_n)
    modes: Array2<Complex64>,
}

impl CylinderFunction {
    pub fn from_modes(
        fp: &FiberParams,
        ang_band: i64,
        mom_band: i64,
        modes: Array2<Complex64>,
    ) -> Result<Self> {
        let want = (2 * ang_band + 1) as usize;
        let wantn = (2 * mom_band + 1) as usize;
        if modes.dim() != (want, wantn) {
            return Err(Error::InvalidArgument(format!(
                "mode array is {:?}, bands need ({want}, {wantn})",
                modes.dim()
            )));
        }
        Ok(Self { a: fp.a, k: fp.k, hbar: fp.hbar, ang_band, mom_band, modes })
    }

    /// Sample a closure f(q,p) on the lattice. The closure must be band-limited
    /// to `ang_band` in q; higher angular content aliases.
    pub fn from_fn(
        fp: &FiberParams,
        ang_band: i64,
        mom_band: i64,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let m_grid = (2 * ang_band + 1).max(3) as usize;
        let grid = CircleGrid::new(fp.a, m_grid)?;
        let mut modes = Array2::zeros(((2 * ang_band + 1) as usize, (2 * mom_band + 1) as usize));
        for n in -mom_band..=mom_band {
            let p = (std::f64::consts::PI * n as f64 / fp.a + fp.k) * fp.hbar;
            let samples = grid.sample(|q| f(q, p));
            let mm = dft_circle(&samples)?;
            for mu in -ang_band..=ang_band {
                modes[[(mu + ang_band) as usize, (n + mom_band) as usize]] = mm.mode(mu);
            }
        }
        Self::from_modes(fp, ang_band, mom_band, modes)
    }

    pub fn ang_band(&self) -> i64 {
        self.ang_band
    }

    pub fn mom_band(&self) -> i64 {
        self.mom_band
    }

    pub fn fiber(&self) -> FiberParams {
        FiberParams { a: self.a, k: self.k, hbar: self.hbar }
    }

    /// Lattice momentum p_n = (πn/a + k)ℏ.
    pub fn momentum(&self, n: i64) -> f64 {
        (std::f64::consts::PI * n as f64 / self.a + self.k) * self.hbar
    }

    /// Coefficient g̃_μ(p_n); zero outside the stored bands.
    pub fn mode(&self, mu: i64, n: i64) -> Complex64 {
        if mu.abs() > self.ang_band || n.abs() > self.mom_band {
            return Complex64::new(0.0, 0.0);
        }
        self.modes[[(mu + self.ang_band) as usize, (n + self.mom_band) as usize]]
    }

    /// Evaluate f(q, p_n) from the stored modes.
    pub fn eval(&self, q: f64, n: i64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for mu in -self.ang_band..=self.ang_band {
            let phase = 2.0 * std::f64::consts::PI * mu as f64 * q / self.a;
            acc += self.mode(mu, n) * Complex64::from_polar(1.0, phase);
        }
        acc
    }

    /// Whether the stored modes describe a real-valued observable:
    /// g̃_{−μ}(p_n) = conj(g̃_μ(p_n)).
    pub fn is_real(&self, tol: f64) -> bool {
        for mu in 0..=self.ang_band {
            for n in -self.mom_band..=self.mom_band {
                if (self.mode(-mu, n) - self.mode(mu, n).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Weyl symbol F(x,n) on the quantum phase space S¹×ℤ, stored as half-integer
/// angular modes: F(x,n) = Σ_r c_{r,n} e^{iπrx/a} with r ≡ n (mod 2).
#[derive(Debug, Clone)]
pub struct WeylSymbol {
    pub a: f64,
    pub k: f64,
    pub hbar: f64,
    ang_band: i64,
    mom_band: i64,
    /// coeffs[(r + ang_band), (n + mom_band)] = c_{r,n}; zero when r ≢ n (mod 2)
    coeffs: Array2<Complex64>,
}

impl WeylSymbol {
    pub fn from_coeffs(
        fp: &FiberParams,
        ang_band: i64,
        mom_band: i64,
        coeffs: Array2<Complex64>,
    ) -> Result<Self> {
        let want = ((2 * ang_band + 1) as usize, (2 * mom_band + 1) as usize);
        if coeffs.dim() != want {
            return Err(Error::InvalidArgument(format!(
                "coefficient array is {:?}, bands need {:?}",
                coeffs.dim(),
                want
            )));
        }
        for r in -ang_band..=ang_band {
            for n in -mom_band..=mom_band {
                if (r - n).rem_euclid(2) != 0
                    && coeffs[[(r + ang_band) as usize, (n + mom_band) as usize]].norm() > 0.0
                {
                    return Err(Error::InvalidArgument(format!(
                        "symbol coefficient at (r={r}, n={n}) violates the parity constraint"
                    )));
                }
            }
        }
        Ok(Self { a: fp.a, k: fp.k, hbar: fp.hbar, ang_band, mom_band, coeffs })
    }

    pub fn zeros(fp: &FiberParams, ang_band: i64, mom_band: i64) -> Self {
        Self {
            a: fp.a,
            k: fp.k,
            hbar: fp.hbar,
            ang_band,
            mom_band,
            coeffs: Array2::zeros(((2 * ang_band + 1) as usize, (2 * mom_band + 1) as usize)),
        }
    }

    pub fn ang_band(&self) -> i64 {
        self.ang_band
    }

    pub fn mom_band(&self) -> i64 {
        self.mom_band
    }

    pub fn fiber(&self) -> FiberParams {
        FiberParams { a: self.a, k: self.k, hbar: self.hbar }
    }

    pub fn coeff(&self, r: i64, n: i64) -> Complex64 {
        if r.abs() > self.ang_band || n.abs() > self.mom_band {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[[(r + self.ang_band) as usize, (n + self.mom_band) as usize]]
    }

    pub(crate) fn add_coeff(&mut self, r: i64, n: i64, v: Complex64) -> Result<()> {
        if (r - n).rem_euclid(2) != 0 {
            return Err(Error::InvalidArgument(format!(
                "coefficient (r={r}, n={n}) violates the parity constraint"
            )));
        }
        if r.abs() > self.ang_band || n.abs() > self.mom_band {
            return Err(Error::BandOverflow(format!(
                "coefficient (r={r}, n={n}) outside bands ({}, {})",
                self.ang_band, self.mom_band
            )));
        }
        self.coeffs[[(r + self.ang_band) as usize, (n + self.mom_band) as usize]] += v;
        Ok(())
    }

    /// Evaluate F(x,n). The stored parity makes F(x+a,n) = (−1)ⁿF(x,n) exact.
    pub fn eval(&self, x: f64, n: i64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in -self.ang_band..=self.ang_band {
            let c = self.coeff(r, n);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            acc += c * Complex64::from_polar(1.0, std::f64::consts::PI * r as f64 * x / self.a);
        }
        acc
    }

    /// Largest coefficient difference against another symbol, compared over
    /// the union of both supports.
    pub fn max_coeff_diff(&self, other: &WeylSymbol) -> f64 {
        let rb = self.ang_band.max(other.ang_band);
        let nb = self.mom_band.max(other.mom_band);
        let mut worst = 0.0f64;
        for r in -rb..=rb {
            for n in -nb..=nb {
                worst = worst.max((self.coeff(r, n) - other.coeff(r, n)).norm());
            }
        }
        worst
    }
}

/// A point (x, n) of the quantum phase space labelling one quantizer Ω⁽ᵏ⁾(x,n).
///
/// The induced operator is 2a-periodic in x and flips sign under x → x+a for
/// odd n, so x is conventionally reduced to [0, 2a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerIndex {
    pub x: f64,
    pub n: i64,
}

impl QuantizerIndex {
    pub fn new(x: f64, n: i64) -> Self {
        Self { x, n }
    }
}

/// Complex matrix ⟨m'|Â|m⟩ in the truncated basis |m;k⟩, m ∈ [−N, N].
#[derive(Debug, Clone)]
pub struct CircleOperator {
    pub a: f64,
    pub k: f64,
    pub hbar: f64,
    band: i64,
    mat: Array2<Complex64>,
}

impl CircleOperator {
    pub fn zeros(fp: &FiberParams, band: i64) -> Self {
        let dim = (2 * band + 1) as usize;
        Self { a: fp.a, k: fp.k, hbar: fp.hbar, band, mat: Array2::zeros((dim, dim)) }
    }

    pub fn identity(fp: &FiberParams, band: i64) -> Self {
        let dim = (2 * band + 1) as usize;
        Self { a: fp.a, k: fp.k, hbar: fp.hbar, band, mat: Array2::eye(dim) }
    }

    /// The shift operator E = e^{i2πQ̂/a}: ⟨m+1|E|m⟩ = 1.
    pub fn shift(fp: &FiberParams, band: i64) -> Self {
        let mut op = Self::zeros(fp, band);
        for m in -band..band {
            op.set(m + 1, m, Complex64::new(1.0, 0.0));
        }
        op
    }

    /// The fiber momentum operator P̂⁽ᵏ⁾: diagonal (2πm/a + k)ℏ.
    pub fn momentum(fp: &FiberParams, band: i64) -> Self {
        let mut op = Self::zeros(fp, band);
        for m in -band..=band {
            let p = (2.0 * std::f64::consts::PI * m as f64 / fp.a + fp.k) * fp.hbar;
            op.set(m, m, Complex64::new(p, 0.0));
        }
        op
    }

    pub fn from_matrix(fp: &FiberParams, band: i64, mat: Array2<Complex64>) -> Result<Self> {
        let dim = (2 * band + 1) as usize;
        if mat.dim() != (dim, dim) {
            return Err(Error::InvalidArgument(format!(
                "matrix is {:?}, band {band} needs ({dim}, {dim})",
                mat.dim()
            )));
        }
        Ok(Self { a: fp.a, k: fp.k, hbar: fp.hbar, band, mat })
    }

    pub fn band(&self) -> i64 {
        self.band
    }

    pub fn dim(&self) -> usize {
        (2 * self.band + 1) as usize
    }

    pub fn fiber(&self) -> FiberParams {
        FiberParams { a: self.a, k: self.k, hbar: self.hbar }
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    fn idx(&self, m: i64) -> usize {
        (m + self.band) as usize
    }

    /// Entry ⟨m'|Â|m⟩; indices must lie in [−N, N].
    pub fn entry(&self, m_row: i64, m_col: i64) -> Complex64 {
        self.mat[[self.idx(m_row), self.idx(m_col)]]
    }

    pub fn set(&mut self, m_row: i64, m_col: i64, v: Complex64) {
        let (i, j) = (self.idx(m_row), self.idx(m_col));
        self.mat[[i, j]] = v;
    }

    pub fn same_frame(&self, other: &CircleOperator) -> bool {
        self.band == other.band && self.a == other.a && self.k == other.k && self.hbar == other.hbar
    }

    /// Operator product (matrix product in the truncated basis).
    pub fn dot(&self, other: &CircleOperator) -> Result<CircleOperator> {
        if !self.same_frame(other) {
            return Err(Error::GridMismatch("operator product across different frames".into()));
        }
        Ok(Self {
            a: self.a,
            k: self.k,
            hbar: self.hbar,
            band: self.band,
            mat: self.mat.dot(&other.mat),
        })
    }

    pub fn dagger(&self) -> CircleOperator {
        let mut mat = self.mat.t().to_owned();
        mat.mapv_inplace(|v| v.conj());
        Self { a: self.a, k: self.k, hbar: self.hbar, band: self.band, mat }
    }

    pub fn trace(&self) -> Complex64 {
        (-self.band..=self.band).map(|m| self.entry(m, m)).sum()
    }

    pub fn scale(&self, s: Complex64) -> CircleOperator {
        Self {
            a: self.a,
            k: self.k,
            hbar: self.hbar,
            band: self.band,
            mat: self.mat.mapv(|v| v * s),
        }
    }

    pub fn add(&self, other: &CircleOperator) -> Result<CircleOperator> {
        if !self.same_frame(other) {
            return Err(Error::GridMismatch("operator sum across different frames".into()));
        }
        Ok(Self {
            a: self.a,
            k: self.k,
            hbar: self.hbar,
            band: self.band,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn max_abs_diff(&self, other: &CircleOperator) -> f64 {
        crate::numerics::max_abs_diff(&self.mat, &other.mat)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// Integral kernel K(q,q') = Σ A[m',m] ⟨q|m';k⟩⟨m;k|q'⟩ sampled on a grid.
    pub fn kernel_matrix(&self, grid: &CircleGrid) -> Result<Array2<Complex64>> {
        if (grid.a - self.a).abs() > 1e-12 * self.a {
            return Err(Error::GridMismatch(format!(
                "kernel grid length {} does not match operator length {}",
                grid.a, self.a
            )));
        }
        let m_grid = grid.m;
        let mut kernel = Array2::zeros((m_grid, m_grid));
        let basis: Vec<Vec<Complex64>> = (-self.band..=self.band)
            .map(|m| {
                (0..m_grid)
                    .map(|j| {
                        let q = grid.node(j);
                        Complex64::from_polar(
                            1.0 / self.a.sqrt(),
                            (2.0 * std::f64::consts::PI * m as f64 / self.a + self.k) * q,
                        )
                    })
                    .collect()
            })
            .collect();
        for mp in -self.band..=self.band {
            for m in -self.band..=self.band {
                let amp = self.entry(mp, m);
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let row = &basis[self.idx(mp)];
                let col = &basis[self.idx(m)];
                for i in 0..m_grid {
                    for j in 0..m_grid {
                        kernel[[i, j]] += amp * row[i] * col[j].conj();
                    }
                }
            }
        }
        Ok(kernel)
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<[f64; 2]> = self.mat.iter().map(|c| [c.re, c.im]).collect();
        let doc = OperatorJson {
            a: self.a,
            k: self.k,
            hbar: self.hbar,
            band: self.band,
            entries,
        };
        serde_json::to_string_pretty(&doc).expect("operator serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<CircleOperator> {
        let doc: OperatorJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("operator JSON: {e}")))?;
        let dim = (2 * doc.band + 1) as usize;
        if doc.entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "operator JSON has {} entries, band {} needs {}",
                doc.entries.len(),
                doc.band,
                dim * dim
            )));
        }
        let data: Vec<Complex64> =
            doc.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        let mat = Array2::from_shape_vec((dim, dim), data)
            .map_err(|e| Error::InvalidArgument(format!("operator JSON: {e}")))?;
        Ok(CircleOperator { a: doc.a, k: doc.k, hbar: doc.hbar, band: doc.band, mat })
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    a: f64,
    k: f64,
    hbar: f64,
    band: i64,
    entries: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    a: f64,
    k: f64,
    hbar: f64,
    ang_band: i64,
    mom_band: i64,
    coeffs: Vec<[f64; 2]>,
}

impl WeylSymbol {
    pub fn to_json(&self) -> String {
        let coeffs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        let doc = SymbolJson {
            a: self.a,
            k: self.k,
            hbar: self.hbar,
            ang_band: self.ang_band,
            mom_band: self.mom_band,
            coeffs,
        };
        serde_json::to_string_pretty(&doc).expect("symbol serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<WeylSymbol> {
        let doc: SymbolJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("symbol JSON: {e}")))?;
        let dim = ((2 * doc.ang_band + 1) as usize, (2 * doc.mom_band + 1) as usize);
        if doc.coeffs.len() != dim.0 * dim.1 {
            return Err(Error::InvalidArgument("symbol JSON has wrong coefficient count".into()));
        }
        let data: Vec<Complex64> =
            doc.coeffs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        let coeffs = Array2::from_shape_vec(dim, data)
            .map_err(|e| Error::InvalidArgument(format!("symbol JSON: {e}")))?;
        let fp = FiberParams { a: doc.a, k: doc.k, hbar: doc.hbar };
        WeylSymbol::from_coeffs(&fp, doc.ang_band, doc.mom_band, coeffs)
    }
}
