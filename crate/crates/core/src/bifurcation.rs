//! Cubic truncations `R = Σ αᵢ Eᵢ` restricted to `Fix(⟨QS⟩)`, their phase
//! vector fields on the sphere, and the equilibrium branch through `y₀`.
//!
//! On `Fix(⟨QS⟩) ≅ ℝ⁴` the distinguished direction is `y₀ = e₄`. For the
//! five-term truncation `R(y₀) = α y₀`, so `x = r y₀, λ = −α r²` solves
//! `λ x + R(x) = 0` exactly and the Jacobian of the phase field at `y₀` is
//! `diag(δ − α, γ − α, β − α, −2α)`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::equivariants::canonical_e;
use crate::error::{Error, Result};
use crate::isotropy::QS_FIXED_COORDS;
use crate::linalg::DenseMatrix;
use crate::poly::PolyMap;

/// Differences below this count as equalities in [`genericity_check`].
pub const GENERICITY_TOL: f64 = 1e-12;
/// Eigenvalues with `|Re| ≤` this are treated as non-hyperbolic.
pub const HYPERBOLICITY_TOL: f64 = 1e-8;

/// `y₀ = (0, 0, 0, 1)` in `Fix(⟨QS⟩)` coordinates.
pub const Y0: [f64; 4] = [0.0, 0.0, 0.0, 1.0];

/// `R = Σ αᵢ Eᵢ` with five coefficients `(α, β, γ, δ, ε)`, or eight when
/// `a = 5`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicTruncation {
    coeffs: Vec<f64>,
}

impl CubicTruncation {
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != 5 && coeffs.len() != 8 {
            return Err(Error::Domain(format!(
                "expected 5 or 8 coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("coefficients must be finite".into()));
        }
        Ok(Self {
            coeffs: coeffs.to_vec(),
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_eight_term(&self) -> bool {
        self.coeffs.len() == 8
    }

    pub fn alpha(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn beta(&self) -> f64 {
        self.coeffs[1]
    }

    pub fn gamma(&self) -> f64 {
        self.coeffs[2]
    }

    pub fn delta(&self) -> f64 {
        self.coeffs[3]
    }

    pub fn epsilon(&self) -> f64 {
        self.coeffs[4]
    }

    /// The map on ℝ⁸.
    pub fn to_polymap(&self) -> Result<PolyMap<f64>> {
        let maps = (1..=self.coeffs.len())
            .map(canonical_e::<f64>)
            .collect::<Result<Vec<_>>>()?;
        PolyMap::combination(&self.coeffs, &maps)
    }

    /// The map on `Fix(⟨QS⟩) ≅ ℝ⁴`.
    pub fn restricted(&self) -> Result<PolyMap<f64>> {
        restrict_to_fix(&self.to_polymap()?)
    }
}

/// Places `y` at coordinates 1, 3, 6, 8 of ℝ⁸.
pub fn fix_k_embed(y: &[f64]) -> [f64; 8] {
    assert_eq!(y.len(), 4);
    let mut x = [0.0; 8];
    for (k, &c) in QS_FIXED_COORDS.iter().enumerate() {
        x[c] = y[k];
    }
    x
}

/// Left inverse of [`fix_k_embed`].
pub fn fix_k_extract(x: &[f64]) -> [f64; 4] {
    assert_eq!(x.len(), 8);
    let mut y = [0.0; 4];
    for (k, &c) in QS_FIXED_COORDS.iter().enumerate() {
        y[k] = x[c];
    }
    y
}

/// Largest coordinate of `x` outside `Fix(⟨QS⟩)`.
pub fn off_fix_norm(x: &[f64]) -> f64 {
    (0..8)
        .filter(|i| !QS_FIXED_COORDS.contains(i))
        .map(|i| x[i].abs())
        .fold(0.0, f64::max)
}

/// `R|Fix(⟨QS⟩)`; fails if `R` does not map the fixed space into itself.
pub fn restrict_to_fix(r: &PolyMap<f64>) -> Result<PolyMap<f64>> {
    if r.n() != 8 {
        return Err(Error::Domain(format!(
            "expected a map on ℝ⁸, got ℝ^{}",
            r.n()
        )));
    }
    let (restricted, leak) = r.restrict(&QS_FIXED_COORDS)?;
    if leak > GENERICITY_TOL {
        let output = (0..8)
            .find(|o| !QS_FIXED_COORDS.contains(o))
            .unwrap_or_default();
        return Err(Error::RestrictionInconsistent {
            output,
            residue: leak,
        });
    }
    Ok(restricted)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `𝒫_R(y) = R(y) − ⟨R(y), y⟩ y`, the tangential part of `R` on the sphere.
#[derive(Debug, Clone)]
pub struct PhaseField {
    r: PolyMap<f64>,
}

impl PhaseField {
    pub fn new(r: PolyMap<f64>) -> Self {
        Self { r }
    }

    pub fn field(&self) -> &PolyMap<f64> {
        &self.r
    }

    pub fn dim(&self) -> usize {
        self.r.n()
    }

    /// Evaluation on the unit sphere.
    pub fn eval(&self, y: &[f64]) -> Result<Vec<f64>> {
        let n = norm(y);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitVector(n));
        }
        Ok(self.eval_ambient(y))
    }

    /// The same formula at any point of the ambient space.
    pub fn eval_ambient(&self, y: &[f64]) -> Vec<f64> {
        let r = self.r.evaluate(y);
        let s = dot(&r, y);
        r.iter().zip(y).map(|(ri, yi)| ri - s * yi).collect()
    }

    /// `DR − y (R + DRᵀ y)ᵀ − ⟨R, y⟩ I`.
    pub fn jacobian(&self, y: &[f64]) -> DenseMatrix<f64> {
        let n = y.len();
        let r = self.r.evaluate(y);
        let dr = self.r.jacobian(y);
        let s = dot(&r, y);
        let grad: Vec<f64> = (0..n)
            .map(|j| r[j] + (0..n).map(|i| dr[(i, j)] * y[i]).sum::<f64>())
            .collect();
        DenseMatrix::from_fn(n, |i, j| {
            dr[(i, j)] - y[i] * grad[j] - if i == j { s } else { 0.0 }
        })
    }

    /// Central differences of [`PhaseField::eval_ambient`].
    pub fn jacobian_fd(&self, y: &[f64], h: f64) -> DenseMatrix<f64> {
        let n = y.len();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut yp = y.to_vec();
                let mut ym = y.to_vec();
                yp[j] += h;
                ym[j] -= h;
                let (fp, fm) = (self.eval_ambient(&yp), self.eval_ambient(&ym));
                fp.iter()
                    .zip(&fm)
                    .map(|(a, b)| (a - b) / (2.0 * h))
                    .collect()
            })
            .collect();
        DenseMatrix::from_fn(n, |i, j| cols[j][i])
    }
}

const SCHUR_MAX_ITER: usize = 1000;

/// Eigenvalues `(re, im)` sorted by real part, then imaginary part.
///
/// The Schur iteration can stall on matrices with clustered eigenvalues, so
/// it is capped; on failure it is retried on a fixed orthogonal similarity of
/// the matrix, and symmetric matrices fall back to the symmetric solver.
pub fn eigenvalues(m: &DenseMatrix<f64>) -> Result<Vec<(f64, f64)>> {
    let a = m.to_nalgebra();
    let n = a.nrows();
    let schur = |x: DMatrix<f64>| nalgebra::Schur::try_new(x, f64::EPSILON, SCHUR_MAX_ITER);
    let ev: Vec<(f64, f64)> = if let Some(s) = schur(a.clone()) {
        s.complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect()
    } else if let Some(s) = {
        let q = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3 + 1) as f64).sin())
            .qr()
            .q();
        schur(q.transpose() * &a * &q)
    } {
        s.complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect()
    } else if (&a - a.transpose()).amax() <= 1e-10 * a.amax().max(1.0) {
        let sym = (&a + a.transpose()) * 0.5;
        sym.symmetric_eigenvalues()
            .iter()
            .map(|&v| (v, 0.0))
            .collect()
    } else {
        return Err(Error::NumericalInconsistency {
            context: "eigenvalue iteration did not converge",
            residue: f64::NAN,
        });
    };
    let mut ev = ev;
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(ev)
}

pub fn is_hyperbolic(ev: &[(f64, f64)]) -> bool {
    ev.iter().all(|&(re, _)| re.abs() > HYPERBOLICITY_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseFieldReport {
    pub zero: Vec<f64>,
    pub phase_residual: f64,
    pub jacobian: Vec<Vec<f64>>,
    /// Largest deviation between the analytic and finite-difference Jacobians.
    pub jacobian_fd_deviation: f64,
    pub eigenvalues: Vec<(f64, f64)>,
    pub hyperbolic: bool,
}

/// Step for the finite-difference cross-check.
pub const FD_STEP: f64 = 1e-5;

/// Spectrum of the ambient Jacobian of `𝒫_R` at `y₀`, analytic and checked
/// against central differences.
pub fn phase_jacobian_at_y0(t: &CubicTruncation) -> Result<PhaseFieldReport> {
    let pf = PhaseField::new(t.restricted()?);
    let phase = pf.eval(&Y0)?;
    let jac = pf.jacobian(&Y0);
    let deviation = jac.max_abs_diff(&pf.jacobian_fd(&Y0, FD_STEP));
    let scale = t.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
    if deviation > 1e-6 * scale {
        return Err(Error::NumericalInconsistency {
            context: "phase Jacobian (analytic vs finite differences)",
            residue: deviation,
        });
    }
    let ev = eigenvalues(&jac)?;
    Ok(PhaseFieldReport {
        zero: Y0.to_vec(),
        phase_residual: norm(&phase),
        jacobian: jac.rows(),
        jacobian_fd_deviation: deviation,
        hyperbolic: is_hyperbolic(&ev),
        eigenvalues: ev,
    })
}

/// `{δ − α, γ − α, β − α, −2α}`, the predicted spectrum at `y₀` for the
/// five-term truncation.
pub fn predicted_spectrum(t: &CubicTruncation) -> [f64; 4] {
    let a = t.alpha();
    [t.delta() - a, t.gamma() - a, t.beta() - a, -2.0 * a]
}

/// A failed strict inequality among the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Violation {
    AlphaZero,
    AlphaEqBeta,
    AlphaEqGamma,
    AlphaEqDelta,
    /// Eight-term case: the `(y₁, y₃)` block `[[α₄ − α₁, −α₇], [α₈, α₂ − α₁]]`
    /// is singular.
    BlockSingular,
    /// Eight-term case: that block has purely imaginary eigenvalues.
    BlockCenter,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::AlphaZero => "α = 0",
            Violation::AlphaEqBeta => "α = β",
            Violation::AlphaEqGamma => "α = γ",
            Violation::AlphaEqDelta => "α = δ",
            Violation::BlockSingular => "(α₄ − α₁)(α₂ − α₁) + α₇α₈ = 0",
            Violation::BlockCenter => "α₄ + α₂ = 2α₁ with (α₄ − α₁)(α₂ − α₁) + α₇α₈ > 0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericityReport {
    pub generic: bool,
    pub violations: Vec<Violation>,
}

/// Exact coefficient conditions for `y₀` to be a hyperbolic zero.
///
/// Five terms: `α ≠ 0, α ≠ β, α ≠ γ, α ≠ δ`. Eight terms: `α₁ ≠ 0`,
/// `α₃ ≠ α₁`, and the `(y₁, y₃)` block coupling through `α₇, α₈` must be
/// hyperbolic.
pub fn genericity_check(t: &CubicTruncation) -> GenericityReport {
    let c = t.coeffs();
    let zero = |x: f64| x.abs() <= GENERICITY_TOL;
    let mut v = Vec::new();
    if zero(c[0]) {
        v.push(Violation::AlphaZero);
    }
    if t.is_eight_term() {
        if zero(c[2] - c[0]) {
            v.push(Violation::AlphaEqGamma);
        }
        let (p, q) = (c[3] - c[0], c[1] - c[0]);
        let det = p * q + c[6] * c[7];
        if zero(det) {
            v.push(Violation::BlockSingular);
        } else if zero(p + q) && det > 0.0 {
            v.push(Violation::BlockCenter);
        }
    } else {
        for (k, viol) in [
            (1, Violation::AlphaEqBeta),
            (2, Violation::AlphaEqGamma),
            (3, Violation::AlphaEqDelta),
        ] {
            if zero(c[0] - c[k]) {
                v.push(viol);
            }
        }
    }
    GenericityReport {
        generic: v.is_empty(),
        violations: v,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPoint {
    pub r: f64,
    pub lambda: f64,
    pub x: Vec<f64>,
    /// `‖λ x + R(x)‖` evaluated on ℝ⁸.
    pub residual: f64,
}

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-14;

/// Solves `λ y + R(y) = 0, |y|² = r²` on `Fix(⟨QS⟩)` by Newton's method.
fn correct(r4: &PolyMap<f64>, r: f64, y: &mut [f64; 4], lambda: &mut f64) -> Result<f64> {
    let mut res = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let ry = r4.evaluate(y);
        let mut f = DVector::zeros(5);
        for i in 0..4 {
            f[i] = *lambda * y[i] + ry[i];
        }
        f[4] = dot(y, y) - r * r;
        // Scale-free test: the field is O(r³), the constraint O(r²).
        res = (0..4).map(|i| f[i] * f[i]).sum::<f64>().sqrt() / r.powi(3) + f[4].abs() / (r * r);
        if res < NEWTON_TOL {
            return Ok(res);
        }
        let dr = r4.jacobian(y);
        let mut j = DMatrix::zeros(5, 5);
        for i in 0..4 {
            for k in 0..4 {
                j[(i, k)] = dr[(i, k)] + if i == k { *lambda } else { 0.0 };
            }
            j[(i, 4)] = y[i];
            j[(4, i)] = 2.0 * y[i];
        }
        let Some(step) = j.lu().solve(&(-f)) else {
            return Err(Error::Continuation { r, residual: res });
        };
        for i in 0..4 {
            y[i] += step[i];
        }
        *lambda += step[4];
        if step.norm() <= 1e-15 * r.max(1.0) {
            return Ok(res);
        }
    }
    if res < 1e-10 {
        Ok(res)
    } else {
        Err(Error::Continuation { r, residual: res })
    }
}

/// Follows the branch leaving the trivial solution along `y₀`, on the grid
/// `r = k · r_max / steps, k = 1 … steps`.
pub fn branch_continuation(
    t: &CubicTruncation,
    r_max: f64,
    steps: usize,
) -> Result<Vec<BranchPoint>> {
    if r_max.is_nan() || r_max <= 0.0 || steps == 0 {
        return Err(Error::Domain(
            "r_max must be positive and steps at least 1".into(),
        ));
    }
    let g = genericity_check(t);
    if !g.generic {
        return Err(Error::NotGeneric(g.violations));
    }
    let full = t.to_polymap()?;
    let r4 = restrict_to_fix(&full)?;
    let mut out = Vec::with_capacity(steps);
    let mut prev: Option<(f64, [f64; 4], f64)> = None;
    for k in 1..=steps {
        let r = r_max * k as f64 / steps as f64;
        let (mut y, mut lambda) = match prev {
            Some((r0, y0, l0)) => {
                let s = r / r0;
                (y0.map(|v| v * s), l0 * s * s)
            }
            None => (Y0.map(|v| v * r), -t.alpha() * r * r),
        };
        correct(&r4, r, &mut y, &mut lambda)?;
        let x = fix_k_embed(&y);
        let rx = full.evaluate(&x);
        let residual = norm(
            &x.iter()
                .zip(&rx)
                .map(|(xi, ri)| lambda * xi + ri)
                .collect::<Vec<_>>(),
        );
        out.push(BranchPoint {
            r,
            lambda,
            x: x.to_vec(),
            residual,
        });
        prev = Some((r, y, lambda));
    }
    Ok(out)
}

/// Eigenvalues of `D(λ x + R(x))` restricted to `Fix(⟨QS⟩)` at a branch point.
pub fn branch_spectrum(t: &CubicTruncation, p: &BranchPoint) -> Result<Vec<(f64, f64)>> {
    let r4 = t.restricted()?;
    let y = fix_k_extract(&p.x);
    let j = &r4.jacobian(&y) + &DenseMatrix::identity(4).scale(p.lambda);
    eigenvalues(&j)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereZero {
    pub y: Vec<f64>,
    pub eigenvalues: Vec<(f64, f64)>,
    pub hyperbolic: bool,
}

/// Orthonormal basis of `y^⊥` (columns of a `n × (n−1)` matrix).
fn tangent_basis(y: &[f64]) -> DMatrix<f64> {
    let n = y.len();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        if vs.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for u in std::iter::once(y).chain(vs.iter().map(|u| u.as_slice())) {
            let d = dot(u, &v);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            vs.push(v.into_iter().map(|a| a / nv).collect());
        }
    }
    DMatrix::from_fn(n, n - 1, |i, j| vs[j][i])
}

fn newton_on_sphere(pf: &PhaseField, seed: &[f64]) -> Option<Vec<f64>> {
    let mut y: Vec<f64> = {
        let n = norm(seed);
        seed.iter().map(|v| v / n).collect()
    };
    for _ in 0..NEWTON_MAX_ITER {
        let p = pf.eval_ambient(&y);
        if !p.iter().all(|v| v.is_finite()) {
            return None;
        }
        if norm(&p) < 1e-13 {
            return Some(y);
        }
        let t = tangent_basis(&y);
        let j = pf.jacobian(&y).to_nalgebra() * &t;
        let rhs = -DVector::from_vec(p);
        let step = j
            .try_svd(true, true, f64::EPSILON, 200)?
            .solve(&rhs, 1e-12)
            .ok()?;
        let dy = &t * step;
        y.iter_mut().zip(dy.iter()).for_each(|(a, b)| *a += b);
        let n = norm(&y);
        y.iter_mut().for_each(|a| *a /= n);
    }
    (norm(&pf.eval_ambient(&y)) < 1e-10).then_some(y)
}

/// Seed for [`sphere_zero_search`].
pub const SPHERE_SEED: u64 = 0x5eed_5ea5;

/// Zeros of `𝒫_R` on `S^{n−1}` reached by Newton's method from
/// `seed_count` pseudo-random seeds plus `±eᵢ`; closed under `y ↦ −y`.
pub fn sphere_zero_search(r: &PolyMap<f64>, seed_count: usize) -> Result<Vec<SphereZero>> {
    let n = r.n();
    let pf = PhaseField::new(r.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(SPHERE_SEED);
    let mut seeds: Vec<Vec<f64>> = (0..seed_count)
        .map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            seeds.push(e);
        }
    }
    let mut zeros: Vec<Vec<f64>> = Vec::new();
    let mut push = |y: Vec<f64>| {
        let y: Vec<f64> = y
            .into_iter()
            .map(|v| if v == 0.0 { 0.0 } else { v })
            .collect();
        if zeros
            .iter()
            .all(|z| norm(&z.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>()) > 1e-6)
        {
            zeros.push(y);
        }
    };
    for s in &seeds {
        if let Some(y) = newton_on_sphere(&pf, s) {
            let neg: Vec<f64> = y.iter().map(|v| -v).collect();
            push(y);
            push(neg);
        }
    }
    zeros.sort_by(|a, b| a.partial_cmp(b).expect("finite zeros"));
    zeros
        .into_iter()
        .map(|y| {
            let ev = eigenvalues(&pf.jacobian(&y))?;
            Ok(SphereZero {
                hyperbolic: is_hyperbolic(&ev),
                y,
                eigenvalues: ev,
            })
        })
        .collect()
}
