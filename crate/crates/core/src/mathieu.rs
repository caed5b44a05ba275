//! Periodic Mathieu eigenbasis of the separated one-coordinate Hamiltonian.
//!
//! Each coordinate of the rotor pair obeys
//!
//! ```text
//! f'' + [eps - 2 v cos 2(alpha + alpha0)] f = 0
//! ```
//!
//! on [-pi, pi) with periodic boundary conditions. The 2pi-periodic solutions
//! split into four Fourier classes (even/odd harmonics x cosine/sine). In the
//! orthonormal trigonometric basis {1/sqrt(2pi), cos(m a)/sqrt(pi),
//! sin(m a)/sqrt(pi)} the three-term recurrence for the expansion coefficients
//! becomes a real symmetric tridiagonal matrix per class, so a dense symmetric
//! eigensolve yields unit-norm eigenfunctions directly. The phase shift
//! alpha0 = pi/2 is applied afterwards by exact quarter-turn re-expansion of
//! the harmonics, which leaves eigenvalues untouched.
//!
//! Eigenvalues are the dimensionless eps = 2E/E_K; energies in units of E_K
//! are eps/2.

use nalgebra::DMatrix;
use ndarray::Array2;
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};

/// Smallest admissible Fourier truncation order.
pub const MIN_TRUNCATION: usize = 8;

/// The four symmetry classes of periodic Mathieu functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MathieuClass {
    /// Even cosine harmonics 1, cos 2a, cos 4a, ...  (ce_2n)
    CosineEven,
    /// Odd cosine harmonics cos a, cos 3a, ...       (ce_2n+1)
    CosineOdd,
    /// Odd sine harmonics sin a, sin 3a, ...         (se_2n+1)
    SineOdd,
    /// Even sine harmonics sin 2a, sin 4a, ...       (se_2n+2)
    SineEven,
}

impl MathieuClass {
    pub const ALL: [MathieuClass; 4] = [
        MathieuClass::CosineEven,
        MathieuClass::CosineOdd,
        MathieuClass::SineOdd,
        MathieuClass::SineEven,
    ];

    /// Tag used in CSV output and error messages.
    pub fn label(self) -> &'static str {
        match self {
            MathieuClass::CosineEven => "ce-even",
            MathieuClass::CosineOdd => "ce-odd",
            MathieuClass::SineOdd => "se-odd",
            MathieuClass::SineEven => "se-even",
        }
    }

    /// Deterministic tie-break rank for degenerate eigenvalues.
    fn rank(self) -> usize {
        match self {
            MathieuClass::CosineEven => 0,
            MathieuClass::CosineOdd => 1,
            MathieuClass::SineOdd => 2,
            MathieuClass::SineEven => 3,
        }
    }

    /// Harmonic indices carried by this class at truncation order `k`.
    /// All four lists have length k + 1.
    fn harmonics(self, k: usize) -> Vec<usize> {
        match self {
            MathieuClass::CosineEven => (0..=k).map(|j| 2 * j).collect(),
            MathieuClass::CosineOdd | MathieuClass::SineOdd => {
                (0..=k).map(|j| 2 * j + 1).collect()
            }
            MathieuClass::SineEven => (1..=k + 1).map(|j| 2 * j).collect(),
        }
    }

    fn is_cosine(self) -> bool {
        matches!(self, MathieuClass::CosineEven | MathieuClass::CosineOdd)
    }

    /// Sign acquired under a -> a + pi: +1 for even harmonics, -1 for odd.
    pub fn translation_parity(self) -> i8 {
        match self {
            MathieuClass::CosineEven | MathieuClass::SineEven => 1,
            MathieuClass::CosineOdd | MathieuClass::SineOdd => -1,
        }
    }
}

impl std::fmt::Display for MathieuClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One separated coordinate problem: potential strength, shift, truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuProblem {
    /// Dimensionless potential strength v = c * Gamma.
    pub v: f64,
    /// Phase shift of the potential; 0 or pi/2.
    pub alpha0: f64,
    /// Fourier truncation order K (max harmonic index per class ~ 2K).
    pub truncation: usize,
}

impl MathieuProblem {
    pub fn new(v: f64, alpha0: f64, truncation: usize) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "potential strength v must be finite, got {v}"
            )));
        }
        let quarter = (alpha0 - PI / 2.0).abs() < 1e-14;
        if alpha0 != 0.0 && !quarter {
            return Err(Error::InvalidConfig(format!(
                "alpha0 must be 0 or pi/2, got {alpha0}"
            )));
        }
        if truncation < MIN_TRUNCATION {
            return Err(Error::InvalidConfig(format!(
                "truncation order K = {truncation} below minimum {MIN_TRUNCATION}"
            )));
        }
        Ok(MathieuProblem {
            v,
            alpha0: if quarter { PI / 2.0 } else { 0.0 },
            truncation,
        })
    }

    fn shifted(&self) -> bool {
        self.alpha0 != 0.0
    }
}

/// One eigenfunction: eigenvalue, class of origin, translation parity and
/// Fourier coefficients in the orthonormal convention
/// f(a) = cos[0]/sqrt(2pi) + sum_m { cos[m] cos(m a) + sin[m] sin(m a) } / sqrt(pi).
#[derive(Debug, Clone)]
pub struct BasisLevel {
    pub epsilon: f64,
    pub class: MathieuClass,
    pub parity: i8,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl BasisLevel {
    /// Orthonormal-basis coefficient of cos(m a) (m = 0 addresses the constant).
    pub fn cos_coeff(&self, m: usize) -> f64 {
        self.cos.get(m).copied().unwrap_or(0.0)
    }

    pub fn sin_coeff(&self, m: usize) -> f64 {
        self.sin.get(m).copied().unwrap_or(0.0)
    }

    /// Pointwise value by Fourier synthesis; 2pi-periodic by construction.
    pub fn eval(&self, alpha: f64) -> f64 {
        let mut f = self.cos[0] / (2.0 * PI).sqrt();
        let rt_pi = PI.sqrt();
        for m in 1..self.cos.len() {
            let (s, c) = (m as f64 * alpha).sin_cos();
            f += (self.cos[m] * c + self.sin[m] * s) / rt_pi;
        }
        f
    }

    /// Second derivative, exact in the Fourier representation.
    pub fn eval_second_derivative(&self, alpha: f64) -> f64 {
        let rt_pi = PI.sqrt();
        let mut f = 0.0;
        for m in 1..self.cos.len() {
            let (s, c) = (m as f64 * alpha).sin_cos();
            f -= (m * m) as f64 * (self.cos[m] * c + self.sin[m] * s) / rt_pi;
        }
        f
    }

    /// L2 inner product against another level (orthonormal coefficients).
    pub fn inner(&self, other: &BasisLevel) -> f64 {
        let n = self.cos.len().min(other.cos.len());
        let mut acc = 0.0;
        for m in 0..n {
            acc += self.cos[m] * other.cos[m];
            if m > 0 {
                acc += self.sin[m] * other.sin[m];
            }
        }
        acc
    }
}

/// Lowest eigenpairs of one coordinate, merged across the four classes.
#[derive(Debug, Clone)]
pub struct OneCoordinateBasis {
    pub problem: MathieuProblem,
    levels: Vec<BasisLevel>,
}

impl OneCoordinateBasis {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, l: usize) -> &BasisLevel {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[BasisLevel] {
        &self.levels
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.epsilon).collect()
    }

    pub fn parities(&self) -> Vec<i8> {
        self.levels.iter().map(|l| l.parity).collect()
    }

    /// Level values tabulated on a set of sample points, one row per level.
    pub fn values_on(&self, alphas: &[f64]) -> Array2<f64> {
        let mut out = Array2::zeros((self.levels.len(), alphas.len()));
        for (l, lev) in self.levels.iter().enumerate() {
            for (i, &a) in alphas.iter().enumerate() {
                out[[l, i]] = lev.eval(a);
            }
        }
        out
    }
}

/// Symmetric recurrence matrix of one class in the orthonormal trigonometric
/// basis. The m = 0 row of the even-cosine class carries the sqrt(2) rescaling
/// that symmetrizes the bare recurrence, so unit eigenvectors map to unit-norm
/// eigenfunctions.
pub fn assemble_recurrence_matrix(
    problem: &MathieuProblem,
    class: MathieuClass,
) -> Result<DMatrix<f64>> {
    let k = problem.truncation;
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "truncation order K = {k} too small for the recurrence"
        )));
    }
    let v = problem.v;
    let h = class.harmonics(k);
    let n = h.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (i, &mi) in h.iter().enumerate() {
        m[(i, i)] = (mi * mi) as f64;
    }
    // cos 2a couples harmonics m and m +/- 2; the m + m' = 2 term shifts the
    // first odd-harmonic diagonal by +v (cosine) or -v (sine).
    match class {
        MathieuClass::CosineOdd => m[(0, 0)] += v,
        MathieuClass::SineOdd => m[(0, 0)] -= v,
        _ => {}
    }
    for i in 0..n - 1 {
        let c = if class == MathieuClass::CosineEven && i == 0 {
            std::f64::consts::SQRT_2 * v
        } else {
            v
        };
        m[(i, i + 1)] = c;
        m[(i + 1, i)] = c;
    }
    Ok(m)
}

/// Quarter-turn re-expansion: f(a + pi/2) expressed back in cos/sin harmonics.
/// cos(m pi/2), sin(m pi/2) are taken exactly from m mod 4.
fn shift_quarter_turn(cos: &mut [f64], sin: &mut [f64]) {
    for m in 1..cos.len() {
        let (c, s) = match m % 4 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
        let (a, b) = (cos[m], sin[m]);
        cos[m] = a * c + b * s;
        sin[m] = -a * s + b * c;
    }
}

/// Solve for the `level_count` lowest eigenpairs, merged across all four
/// classes and sorted by eigenvalue (class order breaks exact ties).
pub fn solve_basis(problem: &MathieuProblem, level_count: usize) -> Result<OneCoordinateBasis> {
    let k = problem.truncation;
    if level_count > 2 * k {
        return Err(Error::InvalidConfig(format!(
            "level count {level_count} exceeds 2K = {} supported by truncation",
            2 * k
        )));
    }
    let mmax = 2 * k + 2;
    let mut all: Vec<BasisLevel> = Vec::with_capacity(4 * (k + 1));
    for class in MathieuClass::ALL {
        let mat = assemble_recurrence_matrix(problem, class)?;
        let eig = mat
            .try_symmetric_eigen(f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolver {
                class: class.label().to_string(),
                v: problem.v,
            })?;
        let h = class.harmonics(k);
        for j in 0..h.len() {
            let mut vec: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
            // deterministic sign: largest-magnitude coefficient positive
            let imax = vec
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            if vec[imax] < 0.0 {
                for x in vec.iter_mut() {
                    *x = -*x;
                }
            }
            let mut cos = vec![0.0; mmax + 1];
            let mut sin = vec![0.0; mmax + 1];
            for (idx, &m) in h.iter().enumerate() {
                if class.is_cosine() {
                    cos[m] = vec[idx];
                } else {
                    sin[m] = vec[idx];
                }
            }
            all.push(BasisLevel {
                epsilon: eig.eigenvalues[j],
                class,
                parity: class.translation_parity(),
                cos,
                sin,
            });
        }
    }
    all.sort_by(|a, b| {
        a.epsilon
            .partial_cmp(&b.epsilon)
            .unwrap()
            .then(a.class.rank().cmp(&b.class.rank()))
    });
    all.truncate(level_count);
    if problem.shifted() {
        for lev in all.iter_mut() {
            shift_quarter_turn(&mut lev.cos, &mut lev.sin);
        }
    }
    Ok(OneCoordinateBasis {
        problem: *problem,
        levels: all,
    })
}

/// Pointwise values of level `l` at the given sample points.
pub fn evaluate_basis(basis: &OneCoordinateBasis, l: usize, alphas: &[f64]) -> Result<Vec<f64>> {
    if l >= basis.len() {
        return Err(Error::LevelOutOfRange {
            index: l,
            count: basis.len(),
        });
    }
    Ok(alphas.iter().map(|&a| basis.level(l).eval(a)).collect())
}

/// Eigenpairs of the same operator discretized on a uniform periodic grid.
#[derive(Debug, Clone)]
pub struct GridEigenproblem {
    /// Grid points alpha_i = -pi + 2 pi i / N.
    pub alphas: Vec<f64>,
    /// Ascending eigenvalues (eps convention, i.e. 2E).
    pub epsilons: Vec<f64>,
    /// Column j holds the j-th eigenvector, normalized to unit L2 norm.
    pub vectors: Array2<f64>,
}

/// Independent check of the recurrence construction: diagonalize
/// -(1/2) d^2/da^2 + v cos 2(a + alpha0) in the plane-wave (Fourier grid)
/// representation on `n` uniform points and return eigenvalues as eps = 2E.
pub fn fourier_grid_oracle(problem: &MathieuProblem, n: usize) -> Result<GridEigenproblem> {
    if n < 8 * problem.truncation {
        return Err(Error::InvalidConfig(format!(
            "oracle grid size {n} below 8K = {}",
            8 * problem.truncation
        )));
    }
    let alphas: Vec<f64> = (0..n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect();
    // kinetic stencil t_d = (1/N) [ sum_{m<N/2} 2 m^2 cos(m theta_d)
    //                               + (N/2)^2 cos((N/2) theta_d) ]
    let mut stencil = vec![0.0_f64; n];
    for (d, t) in stencil.iter_mut().enumerate() {
        let theta = 2.0 * PI * d as f64 / n as f64;
        let mut acc = 0.0;
        for m in 1..n / 2 {
            acc += 2.0 * (m * m) as f64 * (m as f64 * theta).cos();
        }
        acc += ((n / 2) * (n / 2)) as f64 * ((n / 2) as f64 * theta).cos();
        *t = acc / n as f64;
    }
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = stencil[(n + i - j) % n];
        }
        h[(i, i)] += 2.0 * problem.v * (2.0 * (alphas[i] + problem.alpha0)).cos();
    }
    let eig = h
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigensolver {
            class: "fourier-grid".to_string(),
            v: problem.v,
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let epsilons: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let w = (2.0 * PI / n as f64).sqrt();
    let mut vectors = Array2::zeros((n, n));
    for (col, &j) in order.iter().enumerate() {
        let norm: f64 = eig.eigenvectors.column(j).iter().map(|x| x * x).sum::<f64>().sqrt();
        for i in 0..n {
            vectors[[i, col]] = eig.eigenvectors[(i, j)] / (norm * w);
        }
    }
    Ok(GridEigenproblem {
        alphas,
        epsilons,
        vectors,
    })
}

/// Dump the basis as CSV with columns (class, level, epsilon, m, cos_coeff,
/// sin_coeff). Coefficients are reported for the plain functions
/// {1, cos(m a), sin(m a)} so rows can be resynthesized directly.
pub fn write_basis_csv<W: Write>(basis: &OneCoordinateBasis, mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "# one-coordinate basis: v = {}, alpha0 = {}, K = {}",
        basis.problem.v, basis.problem.alpha0, basis.problem.truncation
    )?;
    writeln!(w, "class,level,epsilon,m,cos_coeff,sin_coeff")?;
    let rt_pi = PI.sqrt();
    let rt_2pi = (2.0 * PI).sqrt();
    for (l, lev) in basis.levels().iter().enumerate() {
        for m in 0..lev.cos.len() {
            let (c, s) = if m == 0 {
                (lev.cos[0] / rt_2pi, 0.0)
            } else {
                (lev.cos[m] / rt_pi, lev.sin[m] / rt_pi)
            };
            if c == 0.0 && s == 0.0 {
                continue;
            }
            writeln!(
                w,
                "{},{},{:.17e},{},{:.17e},{:.17e}",
                lev.class, l, lev.epsilon, m, c, s
            )?;
        }
    }
    Ok(())
}
