//! Two-rotor quantum state on the (xi, eta) torus: ground state, delta kicks,
//! and spectral propagation in the tensor Mathieu basis.
//!
//! Working coordinates are the half-angle pair xi = (theta1 + theta2)/2,
//! eta = (theta1 - theta2)/2. The map to physical angles is 2-to-1 on the
//! full torus [-pi, pi)^2, so physical states satisfy
//! psi(xi + pi, eta + pi) = psi(xi, eta); equivalently, only products
//! f_l g_l' with combined translation parity +1 are populated. Energies are
//! E = eps * E_K / 2 with E_K = hbar = 1, so the free propagator multiplies
//! coefficients by exp[-i (eps_l + eps_l') t / 2].

use ndarray::{Array1, Array2, ArrayView2, Zip};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::bessel::{jacobi_anger_tail, jn_array};
use crate::error::{Error, Result};
use crate::mathieu::{solve_basis, MathieuProblem, OneCoordinateBasis};

/// Captured-norm threshold below which `expand` reports truncation failure.
pub const TRUNCATION_TOLERANCE: f64 = 1e-6;

/// Bessel-sum tail mass above which `apply_kick_bessel` warns.
pub const KICK_TAIL_WARN: f64 = 1e-12;

/// Geometric arrangement of the rotor pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arrangement {
    /// (a): both rotors in one plane.
    Coplanar,
    /// (b): both rotors on a common axis.
    Coaxial,
}

impl Arrangement {
    pub fn label(self) -> &'static str {
        match self {
            Arrangement::Coplanar => "A",
            Arrangement::Coaxial => "B",
        }
    }

    /// Separation constants (c_xi, c_eta, xi0, eta0) of the coupling
    /// potential E_D [c_xi cos 2(xi + xi0) + c_eta cos 2(eta + eta0)].
    pub fn couplings(self) -> CouplingConstants {
        match self {
            Arrangement::Coplanar => CouplingConstants {
                c_xi: 1.5,
                c_eta: 0.5,
                xi0: 0.0,
                eta0: PI / 2.0,
            },
            Arrangement::Coaxial => CouplingConstants {
                c_xi: 0.0,
                c_eta: 1.0,
                xi0: 0.0,
                eta0: 0.0,
            },
        }
    }
}

impl std::fmt::Display for Arrangement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Arrangement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" | "coplanar" => Ok(Arrangement::Coplanar),
            "B" | "b" | "coaxial" => Ok(Arrangement::Coaxial),
            other => Err(Error::InvalidConfig(format!(
                "arrangement must be A or B, got {other:?}"
            ))),
        }
    }
}

/// Separation constants of one arrangement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstants {
    pub c_xi: f64,
    pub c_eta: f64,
    pub xi0: f64,
    pub eta0: f64,
}

/// Full configuration of a quantum run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorPairConfig {
    pub arrangement: Arrangement,
    /// Dimensionless dipolar coupling Gamma = E_D / E_K.
    pub gamma: f64,
    /// Kick strength P in units of hbar.
    pub kick_strength: f64,
    /// Fourier truncation order K of the one-coordinate bases.
    pub fourier_truncation: usize,
    /// Levels retained per coordinate.
    pub level_count: usize,
    /// Truncation of the Bessel kick expansion.
    pub bessel_cutoff: usize,
    /// Torus grid size N (N x N samples).
    pub grid_size: usize,
}

impl RotorPairConfig {
    /// Defaults sized so that the Gamma = 30, P = 10 runs keep the population
    /// above the retained levels below 1e-8 (checked at runtime by `expand`).
    pub fn new(arrangement: Arrangement, gamma: f64, kick_strength: f64) -> Result<Self> {
        let cfg = RotorPairConfig {
            arrangement,
            gamma,
            kick_strength,
            fourier_truncation: 48,
            level_count: 80,
            bessel_cutoff: (2.0 * kick_strength).ceil() as usize + 20,
            grid_size: 256,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma < 0.0 || !self.gamma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        if self.kick_strength < 0.0 || !self.kick_strength.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "kick_strength must be finite and >= 0, got {}",
                self.kick_strength
            )));
        }
        let n = self.grid_size;
        if n < 128 || !n.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "grid_size must be a power of two >= 128, got {n}"
            )));
        }
        let nc_min = (2.0 * self.kick_strength).ceil() as usize + 20;
        if self.bessel_cutoff < nc_min {
            return Err(Error::InvalidConfig(format!(
                "bessel_cutoff {} below 2P + 20 = {nc_min}",
                self.bessel_cutoff
            )));
        }
        // uniform quadrature must integrate basis x cos x basis products exactly
        if n <= 4 * self.fourier_truncation + 6 {
            return Err(Error::InvalidConfig(format!(
                "grid_size {n} too small for truncation K = {} (need N > 4K + 6)",
                self.fourier_truncation
            )));
        }
        if self.level_count > 2 * self.fourier_truncation {
            return Err(Error::InvalidConfig(format!(
                "level_count {} exceeds 2K = {}",
                self.level_count,
                2 * self.fourier_truncation
            )));
        }
        Ok(())
    }

    /// One-coordinate potential strengths (v_xi, v_eta) = Gamma (c_xi, c_eta).
    pub fn potential_strengths(&self) -> (f64, f64) {
        let c = self.arrangement.couplings();
        (c.c_xi * self.gamma, c.c_eta * self.gamma)
    }
}

/// Precomputed tensor-product machinery for one configuration: both
/// one-coordinate bases tabulated on the grid, eigenvalues, parities and the
/// cos-coupling matrices used by the orientation observable.
pub struct PairBasis {
    pub config: RotorPairConfig,
    xi: OneCoordinateBasis,
    eta: OneCoordinateBasis,
    grid: Vec<f64>,
    cos_grid: Vec<f64>,
    /// f_l(xi_i), one row per level.
    f_vals: Array2<f64>,
    /// g_l(eta_j), one row per level.
    g_vals: Array2<f64>,
    eps_xi: Vec<f64>,
    eps_eta: Vec<f64>,
    par_xi: Vec<i8>,
    par_eta: Vec<i8>,
    /// X_lk = <f_l, cos(xi) f_k>.
    x_mat: Array2<f64>,
    /// Y_lk = <g_l, cos(eta) g_k>.
    y_mat: Array2<f64>,
}

impl PairBasis {
    pub fn build(config: RotorPairConfig) -> Result<Self> {
        config.validate()?;
        let c = config.arrangement.couplings();
        let (v_xi, v_eta) = config.potential_strengths();
        let k = config.fourier_truncation;
        let xi = solve_basis(&MathieuProblem::new(v_xi, c.xi0, k)?, config.level_count)?;
        let eta = solve_basis(&MathieuProblem::new(v_eta, c.eta0, k)?, config.level_count)?;
        let n = config.grid_size;
        let grid: Vec<f64> = (0..n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect();
        let cos_grid: Vec<f64> = grid.iter().map(|a| a.cos()).collect();
        let f_vals = xi.values_on(&grid);
        let g_vals = eta.values_on(&grid);
        let w = 2.0 * PI / n as f64;
        let x_mat = cos_coupling(&f_vals, &cos_grid, w);
        let y_mat = cos_coupling(&g_vals, &cos_grid, w);
        Ok(PairBasis {
            config,
            eps_xi: xi.eigenvalues(),
            eps_eta: eta.eigenvalues(),
            par_xi: xi.parities(),
            par_eta: eta.parities(),
            xi,
            eta,
            grid,
            cos_grid,
            f_vals,
            g_vals,
            x_mat,
            y_mat,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn grid_weight(&self) -> f64 {
        2.0 * PI / self.config.grid_size as f64
    }

    pub fn xi_basis(&self) -> &OneCoordinateBasis {
        &self.xi
    }

    pub fn eta_basis(&self) -> &OneCoordinateBasis {
        &self.eta
    }

    pub fn level_count(&self) -> usize {
        self.eps_xi.len()
    }

    /// Pair energy E_ll' = (eps_l + eps_l') / 2 in units of E_K.
    pub fn pair_energy(&self, l: usize, lp: usize) -> f64 {
        0.5 * (self.eps_xi[l] + self.eps_eta[lp])
    }

    pub fn parity_allowed(&self, l: usize, lp: usize) -> bool {
        self.par_xi[l] * self.par_eta[lp] == 1
    }

    /// <cos xi cos eta> of the propagated coefficient matrix at time t.
    /// The observable never needs the grid field, only the two cos-coupling
    /// matrices, which keeps long traces cheap.
    pub fn cos_cos_expectation(&self, coeffs: &CoefficientMatrix, t: f64) -> f64 {
        let l = self.level_count();
        let mut dp = coeffs.d.clone();
        let ph_xi: Vec<Complex64> = self
            .eps_xi
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -0.5 * e * t))
            .collect();
        let ph_eta: Vec<Complex64> = self
            .eps_eta
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -0.5 * e * t))
            .collect();
        for i in 0..l {
            for j in 0..l {
                dp[[i, j]] *= ph_xi[i] * ph_eta[j];
            }
        }
        let xd = real_complex_dot(&self.x_mat, &dp.view()); // X Dp
        let m = complex_real_dot(&xd.view(), &self.y_mat.t().to_owned()); // (X Dp) Y^T
        let mut s = 0.0;
        Zip::from(&dp).and(&m).for_each(|d, v| {
            s += d.conj().re * v.re - d.conj().im * v.im;
        });
        s
    }
}

fn cos_coupling(vals: &Array2<f64>, cos_grid: &[f64], w: f64) -> Array2<f64> {
    let weighted = {
        let mut m = vals.clone();
        for (mut row, _) in m.outer_iter_mut().zip(0..) {
            for (x, c) in row.iter_mut().zip(cos_grid.iter()) {
                *x *= c;
            }
        }
        m
    };
    let mut x = vals.dot(&weighted.t());
    x.mapv_inplace(|v| v * w);
    // symmetrize away quadrature round-off
    let xt = x.t().to_owned();
    (&x + &xt) * 0.5
}

/// a (real, m x k) times b (complex, k x n) via two real GEMMs.
pub(crate) fn real_complex_dot(a: &Array2<f64>, b: &ArrayView2<Complex64>) -> Array2<Complex64> {
    let re = b.mapv(|z| z.re);
    let im = b.mapv(|z| z.im);
    let cre = a.dot(&re);
    let cim = a.dot(&im);
    let mut out = Array2::<Complex64>::zeros((cre.nrows(), cre.ncols()));
    Zip::from(&mut out).and(&cre).and(&cim).for_each(|o, &r, &i| {
        *o = Complex64::new(r, i);
    });
    out
}

/// a (complex, m x k) times b (real, k x n) via two real GEMMs.
pub(crate) fn complex_real_dot(a: &ArrayView2<Complex64>, b: &Array2<f64>) -> Array2<Complex64> {
    let re = a.mapv(|z| z.re);
    let im = a.mapv(|z| z.im);
    let cre = re.dot(b);
    let cim = im.dot(b);
    let mut out = Array2::<Complex64>::zeros((cre.nrows(), cre.ncols()));
    Zip::from(&mut out).and(&cre).and(&cim).for_each(|o, &r, &i| {
        *o = Complex64::new(r, i);
    });
    out
}

/// Wavefunction sampled on the uniform N x N (xi, eta) grid over [-pi, pi)^2.
#[derive(Debug, Clone)]
pub struct QuantumState {
    amps: Array2<Complex64>,
    grid_weight: f64,
}

impl QuantumState {
    pub fn from_grid(amps: Array2<Complex64>) -> Self {
        let n = amps.nrows();
        assert_eq!(n, amps.ncols(), "state grid must be square");
        QuantumState {
            amps,
            grid_weight: 2.0 * PI / n as f64,
        }
    }

    pub fn amplitudes(&self) -> &Array2<Complex64> {
        &self.amps
    }

    pub fn grid_size(&self) -> usize {
        self.amps.nrows()
    }

    /// Torus L2 norm: sum |psi|^2 (2pi/N)^2.
    pub fn norm(&self) -> f64 {
        let w2 = self.grid_weight * self.grid_weight;
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * w2
    }

    /// Max deviation from the physical identification
    /// psi(xi + pi, eta + pi) = psi(xi, eta).
    pub fn periodicity_defect(&self) -> f64 {
        let n = self.grid_size();
        let h = n / 2;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let d = self.amps[[i, j]] - self.amps[[(i + h) % n, (j + h) % n]];
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Probability density |psi|^2 on the grid.
    pub fn density(&self) -> Array2<f64> {
        self.amps.mapv(|z| z.norm_sqr())
    }
}

/// Coefficients D_ll' of the state against the tensor basis f_l(xi) g_l'(eta).
#[derive(Debug, Clone)]
pub struct CoefficientMatrix {
    pub d: Array2<Complex64>,
}

impl CoefficientMatrix {
    /// Total captured weight sum |D|^2.
    pub fn captured_norm(&self) -> f64 {
        self.d.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Lowest-energy parity-allowed product state f_l(xi) g_l'(eta).
pub fn ground_state(basis: &PairBasis) -> QuantumState {
    let l = basis.level_count();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..l {
        for j in 0..l {
            if !basis.parity_allowed(i, j) {
                continue;
            }
            let e = basis.eps_xi[i] + basis.eps_eta[j];
            if best.map_or(true, |(be, _, _)| e < be) {
                best = Some((e, i, j));
            }
        }
    }
    let (_, i, j) = best.expect("parity-allowed product always exists");
    let n = basis.config.grid_size;
    let mut amps = Array2::<Complex64>::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            amps[[a, b]] = Complex64::new(basis.f_vals[[i, a]] * basis.g_vals[[j, b]], 0.0);
        }
    }
    QuantumState::from_grid(amps)
}

/// Exact delta-kick: pointwise phase exp[i P (cos theta1 + cos theta2)]
/// = exp[i 2P cos xi cos eta]. Unitary, so norm and the physical
/// identification survive bit-for-bit.
pub fn apply_kick_grid(state: &QuantumState, kick_strength: f64) -> QuantumState {
    let n = state.grid_size();
    let grid: Vec<f64> = (0..n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect();
    let cosv: Vec<f64> = grid.iter().map(|a| a.cos()).collect();
    let mut amps = state.amps.clone();
    for i in 0..n {
        let zi = 2.0 * kick_strength * cosv[i];
        for j in 0..n {
            amps[[i, j]] *= Complex64::from_polar(1.0, zi * cosv[j]);
        }
    }
    QuantumState::from_grid(amps)
}

/// Truncated Bessel form of the same kick,
/// sum_{|n| <= n_c} i^n J_n(2P cos xi) e^{-i n eta}, evaluated as the
/// manifestly equivalent cosine sum J_0 + 2 sum_{n>=1} i^n J_n cos(n eta).
/// Returns the kicked state and the discarded tail mass at the worst grid
/// point; tails above [`KICK_TAIL_WARN`] are logged.
pub fn apply_kick_bessel(
    state: &QuantumState,
    kick_strength: f64,
    n_c: usize,
) -> (QuantumState, f64) {
    assert!(n_c >= 1, "bessel cutoff must be at least 1");
    let n = state.grid_size();
    let grid: Vec<f64> = (0..n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect();
    let cosv: Vec<f64> = grid.iter().map(|a| a.cos()).collect();
    // i^n cycle
    let ipow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    // cos(n eta_j) tables
    let mut cos_n = Array2::<f64>::zeros((n_c + 1, n));
    for j in 0..n {
        for nn in 0..=n_c {
            cos_n[[nn, j]] = (nn as f64 * grid[j]).cos();
        }
    }
    let mut amps = state.amps.clone();
    for i in 0..n {
        let z = 2.0 * kick_strength * cosv[i];
        let jn = jn_array(n_c, z);
        for j in 0..n {
            let mut op = Complex64::new(jn[0], 0.0);
            for nn in 1..=n_c {
                op += 2.0 * ipow[nn % 4] * jn[nn] * cos_n[[nn, j]];
            }
            amps[[i, j]] *= op;
        }
    }
    let tail = jacobi_anger_tail(n_c, 2.0 * kick_strength);
    if tail > KICK_TAIL_WARN {
        log::warn!(
            "bessel kick cutoff n_c = {n_c} discards tail mass {tail:.3e} at P = {kick_strength}"
        );
    }
    (QuantumState::from_grid(amps), tail)
}

/// Expansion coefficients D_ll' = <f_l g_l', psi> by uniform-grid quadrature,
/// D = w^2 F Psi G^T. Exact for band-limited integrands; the captured norm is
/// checked against [`TRUNCATION_TOLERANCE`].
pub fn expand(state: &QuantumState, basis: &PairBasis) -> Result<CoefficientMatrix> {
    let w = basis.grid_weight();
    let fd = real_complex_dot(&basis.f_vals, &state.amps.view()); // L x N
    let mut d = complex_real_dot(&fd.view(), &basis.g_vals.t().to_owned()); // L x L
    d.mapv_inplace(|z| z * (w * w));
    let coeffs = CoefficientMatrix { d };
    let captured = coeffs.captured_norm() / state.norm();
    if captured < 1.0 - TRUNCATION_TOLERANCE {
        return Err(Error::Truncation {
            captured,
            tolerance: TRUNCATION_TOLERANCE,
        });
    }
    Ok(coeffs)
}

/// Free evolution for time t >= 0 (units hbar/E_K) followed by grid synthesis:
/// psi(t) = sum D_ll' e^{-i (eps_l + eps_l') t / 2} f_l(xi) g_l'(eta).
pub fn propagate(coeffs: &CoefficientMatrix, basis: &PairBasis, t: f64) -> QuantumState {
    let dp = propagate_coefficients(coeffs, basis, t);
    synthesize(&dp, basis)
}

/// Phase evolution only, staying in the coefficient representation.
pub fn propagate_coefficients(
    coeffs: &CoefficientMatrix,
    basis: &PairBasis,
    t: f64,
) -> CoefficientMatrix {
    let l = basis.level_count();
    let mut d = coeffs.d.clone();
    let ph_xi: Vec<Complex64> = basis
        .eps_xi
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -0.5 * e * t))
        .collect();
    let ph_eta: Vec<Complex64> = basis
        .eps_eta
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -0.5 * e * t))
        .collect();
    for i in 0..l {
        for j in 0..l {
            d[[i, j]] *= ph_xi[i] * ph_eta[j];
        }
    }
    CoefficientMatrix { d }
}

/// Grid synthesis psi = F^T D G.
pub fn synthesize(coeffs: &CoefficientMatrix, basis: &PairBasis) -> QuantumState {
    let ft = basis.f_vals.t().to_owned(); // N x L
    let fd = real_complex_dot(&ft, &coeffs.d.view()); // N x L
    let amps = complex_real_dot(&fd.view(), &basis.g_vals); // N x N
    QuantumState::from_grid(amps)
}

/// Mean pair energy <H> = sum |D|^2 (eps_l + eps_l') / 2; conserved between
/// kicks.
pub fn mean_energy(coeffs: &CoefficientMatrix, basis: &PairBasis) -> f64 {
    let mut acc = 0.0;
    for l in 0..basis.level_count() {
        for lp in 0..basis.level_count() {
            acc += coeffs.d[[l, lp]].norm_sqr() * basis.pair_energy(l, lp);
        }
    }
    acc
}

/// Weight on parity-forbidden products (p_l p_l' = -1); zero for physical
/// states.
pub fn parity_forbidden_mass(coeffs: &CoefficientMatrix, basis: &PairBasis) -> f64 {
    let mut acc = 0.0;
    for l in 0..basis.level_count() {
        for lp in 0..basis.level_count() {
            if !basis.parity_allowed(l, lp) {
                acc += coeffs.d[[l, lp]].norm_sqr();
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn basis(gamma: f64, arr: Arrangement) -> PairBasis {
        PairBasis::build(RotorPairConfig::new(arr, gamma, 10.0).unwrap()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(RotorPairConfig::new(Arrangement::Coplanar, -1.0, 10.0).is_err());
        assert!(RotorPairConfig::new(Arrangement::Coplanar, 0.0, -2.0).is_err());
        let mut c = RotorPairConfig::new(Arrangement::Coplanar, 0.0, 10.0).unwrap();
        c.grid_size = 200; // not a power of two
        assert!(c.validate().is_err());
        c.grid_size = 64; // too small
        assert!(c.validate().is_err());
        c.grid_size = 256;
        c.bessel_cutoff = 10; // below 2P + 20
        assert!(c.validate().is_err());
    }

    #[test]
    fn coupling_constants_match_arrangements() {
        let a = Arrangement::Coplanar.couplings();
        assert_eq!((a.c_xi, a.c_eta, a.xi0), (1.5, 0.5, 0.0));
        assert_abs_diff_eq!(a.eta0, PI / 2.0);
        let b = Arrangement::Coaxial.couplings();
        assert_eq!((b.c_xi, b.c_eta, b.xi0, b.eta0), (0.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn free_ground_state_is_uniform() {
        let pb = basis(0.0, Arrangement::Coplanar);
        let g = ground_state(&pb);
        let want = 1.0 / (2.0 * PI);
        for z in g.amplitudes().iter() {
            assert_abs_diff_eq!(z.re, want, epsilon = 1e-12);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(g.norm(), 1.0, epsilon = 1e-12);
        assert!(g.periodicity_defect() < 1e-12);
    }

    #[test]
    fn strongly_coupled_ground_state_localization() {
        // Gamma = 30, arrangement A: density piles up at the two symmetric
        // wells (theta1, theta2) = (+-pi/2, +-pi/2), i.e. (xi, eta) =
        // (+-pi/2, 0) and (+-pi/2, pi); the origin stays dark.
        let pb = basis(30.0, Arrangement::Coplanar);
        let g = ground_state(&pb);
        let n = g.grid_size();
        let dens = g.density();
        let at = |xi_frac: f64, eta_frac: f64| {
            let i = ((xi_frac + 1.0) / 2.0 * n as f64) as usize % n;
            let j = ((eta_frac + 1.0) / 2.0 * n as f64) as usize % n;
            dens[[i, j]]
        };
        // well at xi = pi/2, eta = 0 vs origin
        assert!(at(1.5, 1.0) > 100.0 * at(1.0, 1.0));
        assert!(at(0.5, 1.0) > 100.0 * at(1.0, 1.0));
        assert!(g.periodicity_defect() < 1e-10);
        assert_abs_diff_eq!(g.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn weakly_coupled_ground_state_is_broad() {
        let pb = basis(1.0, Arrangement::Coplanar);
        let g = ground_state(&pb);
        let dens = g.density();
        let max = dens.iter().cloned().fold(0.0, f64::max);
        let min = dens.iter().cloned().fold(f64::INFINITY, f64::min);
        // broadly distributed: nowhere dark by more than ~an order of magnitude
        assert!(min > 0.05 * max, "min/max = {}", min / max);
    }

    #[test]
    fn kick_zero_strength_is_identity() {
        let pb = basis(0.0, Arrangement::Coplanar);
        let g = ground_state(&pb);
        let k = apply_kick_grid(&g, 0.0);
        for (a, b) in g.amplitudes().iter().zip(k.amplitudes().iter()) {
            assert_eq!(a, b);
        }
        let (kb, tail) = apply_kick_bessel(&g, 0.0, 1);
        assert!(tail < 1e-15);
        for (a, b) in g.amplitudes().iter().zip(kb.amplitudes().iter()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn bessel_kick_matches_grid_kick() {
        let pb = basis(3.0, Arrangement::Coplanar);
        let g = ground_state(&pb);
        for &p in &[1.0, 5.0, 10.0] {
            let exact = apply_kick_grid(&g, p);
            let nc = (2.0 * p) as usize + 20;
            let (approx_state, tail) = apply_kick_bessel(&g, p, nc);
            assert!(tail < 1e-12);
            let mut worst = 0.0_f64;
            for (a, b) in exact
                .amplitudes()
                .iter()
                .zip(approx_state.amplitudes().iter())
            {
                worst = worst.max((a - b).norm());
            }
            assert!(worst < 1e-8, "P = {p}: pointwise deviation {worst:e}");
        }
    }

    #[test]
    fn bessel_kick_short_cutoff_reports_tail() {
        let pb = basis(0.0, Arrangement::Coplanar);
        let g = ground_state(&pb);
        let (_, tail) = apply_kick_bessel(&g, 10.0, 5);
        assert!(tail > 1e-12, "tail {tail:e} should trip the warning");
        // the reported tail is the directly summed discarded weight
        let j = crate::bessel::jn_array(200, 20.0);
        let direct: f64 = j[6..].iter().map(|v| 2.0 * v * v).sum();
        assert_abs_diff_eq!(tail, direct, epsilon = 1e-10);
    }

    #[test]
    fn expand_free_ground_state_is_pure() {
        let pb = basis(0.0, Arrangement::Coplanar);
        let d = expand(&ground_state(&pb), &pb).unwrap();
        assert_abs_diff_eq!(d.d[[0, 0]].re, 1.0, epsilon = 1e-10);
        for (idx, z) in d.d.indexed_iter() {
            if idx != (0, 0) {
                assert!(z.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn expand_captures_kicked_state_with_64_levels() {
        let mut cfg = RotorPairConfig::new(Arrangement::Coplanar, 0.0, 10.0).unwrap();
        cfg.level_count = 64;
        let pb = PairBasis::build(cfg).unwrap();
        let kicked = apply_kick_grid(&ground_state(&pb), 10.0);
        let d = expand(&kicked, &pb).unwrap();
        assert_abs_diff_eq!(d.captured_norm(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn parity_forbidden_coefficients_stay_empty() {
        for gamma in [0.0, 30.0] {
            let pb = basis(gamma, Arrangement::Coplanar);
            let kicked = apply_kick_grid(&ground_state(&pb), 10.0);
            let d = expand(&kicked, &pb).unwrap();
            assert!(parity_forbidden_mass(&d, &pb) < 1e-20);
        }
    }

    #[test]
    fn propagate_zero_time_round_trips() {
        let pb = basis(30.0, Arrangement::Coplanar);
        let kicked = apply_kick_grid(&ground_state(&pb), 10.0);
        let d = expand(&kicked, &pb).unwrap();
        let back = propagate(&d, &pb, 0.0);
        let mut worst = 0.0_f64;
        for (a, b) in kicked.amplitudes().iter().zip(back.amplitudes().iter()) {
            worst = worst.max((a - b).norm());
        }
        assert!(worst < 1e-9, "grid <-> coefficient round trip {worst:e}");
    }

    #[test]
    fn free_rotor_dispersion_phases() {
        // cos(xi) cos(eta) / pi is the (l, l') = (1, 1) product at Gamma = 0;
        // it picks up exactly e^{-i t} (eps = 1 + 1).
        let pb = basis(0.0, Arrangement::Coplanar);
        let n = pb.config.grid_size;
        let mut amps = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                amps[[i, j]] = Complex64::new(pb.grid()[i].cos() * pb.grid()[j].cos() / PI, 0.0);
            }
        }
        let st = QuantumState::from_grid(amps);
        let d = expand(&st, &pb).unwrap();
        let t = 0.37;
        let evolved = propagate(&d, &pb, t);
        let phase = Complex64::from_polar(1.0, -t);
        for (a, b) in st.amplitudes().iter().zip(evolved.amplitudes().iter()) {
            assert_abs_diff_eq!((a * phase - b).norm(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn unitarity_and_energy_conservation() {
        let pb = basis(30.0, Arrangement::Coplanar);
        let g = ground_state(&pb);
        let kicked = apply_kick_grid(&g, 10.0);
        assert_abs_diff_eq!(kicked.norm(), g.norm(), epsilon = 1e-12);
        let d = expand(&kicked, &pb).unwrap();
        let e0 = mean_energy(&d, &pb);
        for &t in &[0.05, 1.0, 7.0] {
            let evolved = propagate(&d, &pb, t);
            assert_abs_diff_eq!(evolved.norm(), 1.0, epsilon = 1e-10);
            assert!(evolved.periodicity_defect() < 1e-9);
            let d2 = expand(&evolved, &pb).unwrap();
            assert_abs_diff_eq!(mean_energy(&d2, &pb), e0, epsilon = 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn kick_preserves_norm(p in 0.0_f64..12.0) {
            let pb = basis(1.0, Arrangement::Coplanar);
            let g = ground_state(&pb);
            let k = apply_kick_grid(&g, p);
            prop_assert!((k.norm() - g.norm()).abs() < 1e-12);
            prop_assert!(k.periodicity_defect() < 1e-10);
        }
    }
}
