//! Root-based engine: the pmf as a sum of powers of the roots of the
//! auxiliary polynomial `A(z) = z^k - q (z^{k-1} + p z^{k-2} + ... + p^{k-1})`.
//!
//! Covers overlapping runs (`0 <= l <= k-1`, Type III at `l = k-1`) and, by a
//! shift of the index, runs separated by a gap.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::model::{shift_factorial_by, shift_raw_by, IndexScheme, MomentKind, MomentSet, PmfTable, RunParams, VariantSpec};
use crate::moments::{central_moments, factorial_moments_partition, raw_moments_partition};
use crate::pmf::pmf_recurrence_pg;
use crate::scalar::Scalar;
use crate::special::{binom, BinomialConvention, EulerianTable, Hyp2F1Spec};

const ROOT_RESIDUAL_TOL: f64 = 1e-13;
const IDENTITY_TOL: f64 = 1e-12;
const MIN_SEPARATION: f64 = 1e-8;
const RECOVERY_TOL: f64 = 1e-10;
/// Working precisions tried for the coefficient solve, in bits.
const SOLVE_PRECISIONS: [u32; 4] = [128, 256, 512, 1024];
/// Bits the solution must keep after losing `log2(condition)` of them.
const SOLVE_MARGIN_BITS: f64 = 64.0;

/// Generating function of the waiting time for one run,
/// `p^k s^k (1 - ps) / (1 - s + q p^k s^{k+1})`.
///
/// The removable singularity at `s = 1/p` is evaluated through the reduced
/// form `p^k s^k / (1 - qs (1 + ps + ... + (ps)^{k-1}))`.
pub fn geometric_pgf(params: &RunParams<f64>, s: Complex64) -> Result<Complex64> {
    let (k, p, q) = (params.k(), *params.p(), *params.q());
    if s == Complex64::new(1.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let pk = params.pk();
    let num = s.powu(k) * pk * (1.0 - p * s);
    let den = 1.0 - s + q * pk * s.powu(k + 1);
    let scale = 1.0 + s.norm() + q * pk * s.norm().powi(k as i32 + 1);
    if den.norm() > 1e-14 * scale {
        return Ok(num / den);
    }
    if (1.0 - p * s).norm() > 1e-8 {
        return Err(Error::PoleAtS(format!("{s}")));
    }
    let geometric: Complex64 = (0..k).map(|i| (p * s).powu(i)).sum();
    let reduced = 1.0 - q * s * geometric;
    if reduced.norm() <= 1e-14 * scale {
        return Err(Error::PoleAtS(format!("{s}")));
    }
    Ok(s.powu(k) * pk / reduced)
}

/// Waiting time for a single run, Full indexing:
/// `f(n) = q f(n-1) + p q f(n-2) + ... + p^{k-1} q f(n-k)`, `f(k) = p^k`.
pub fn geometric_pmf_recurrence<S: Scalar>(params: &RunParams<S>, n_max: i64) -> PmfTable<S> {
    let k = params.k() as i64;
    let weights: Vec<S> = (0..k as u32).map(|i| params.p().powu(i) * params.q().clone()).collect();
    let mut values = vec![params.pk()];
    for n in k + 1..=n_max {
        let terms = (0..k)
            .filter(|i| n - 1 - i >= k)
            .map(|i| weights[i as usize].clone() * values[(n - 1 - i - k) as usize].clone());
        values.push(S::sum_terms(terms));
    }
    PmfTable {
        params: params.with_r(1).expect("valid"),
        scheme: IndexScheme::Full,
        variant: VariantSpec::type1(),
        n_min: k,
        values,
    }
}

/// `E_m(s) = 1 - qs (1 + ps + ... + (ps)^{m-1})`, the denominator of the
/// single-run generating function with the common factor `1 - ps` removed.
/// `E_0 = 1`.
fn reduced_denominator<S: Scalar>(params: &RunParams<S>, m: u32) -> Vec<S> {
    let mut poly = vec![S::one()];
    for i in 0..m {
        poly.push(-(params.q().clone() * params.p().powu(i)));
    }
    poly
}

/// Pmf values `f(0..=n_max)` of the `l`-overlap waiting time, by power-series
/// arithmetic on `phi(s, k)^r / phi(s, l)^{r-1}` with `phi(s, 0) = 1`.
pub fn overlap_series<S: Scalar>(params: &RunParams<S>, ell: u32, n_max: usize) -> Result<Vec<S>> {
    VariantSpec::overlap(ell).validate(params.k())?;
    let (k, r) = (params.k() as i64, params.r() as i64);
    let lead = (r * k - ell as i64 * (r - 1)) as usize;
    let mut series = vec![S::zero(); n_max + 1];
    if lead > n_max {
        return Ok(series);
    }
    // p^{rk - l(r-1)} s^{rk - l(r-1)} E_l^{r-1} / E_k^r
    series[lead] = params.p().powu(lead as u32);
    let e_ell = reduced_denominator(params, ell);
    for _ in 1..r {
        let mut next = vec![S::zero(); n_max + 1];
        for (t, c) in series.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, e) in e_ell.iter().enumerate().take(n_max + 1 - t) {
                next[t + i] = next[t + i].clone() + c.clone() * e.clone();
            }
        }
        series = next;
    }
    let e_k = reduced_denominator(params, params.k());
    for _ in 0..r {
        for t in 0..=n_max {
            let feedback = (1..e_k.len())
                .filter(|&i| i <= t)
                .map(|i| e_k[i].clone() * series[t - i].clone());
            series[t] = series[t].clone() - S::sum_terms(feedback);
        }
    }
    Ok(series)
}

/// The `k` roots of the auxiliary polynomial with their quality measures.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSystem {
    pub params: RunParams<f64>,
    pub roots: Vec<Complex64>,
    /// `max_j |A(lambda_j)|`.
    pub residual: f64,
    /// `max_j |lambda_j^k (1 - lambda_j) - p^k q|`.
    pub identity_residual: f64,
    pub min_separation: f64,
}

fn aux_poly(params: &RunParams<f64>, z: Complex64) -> (Complex64, Complex64) {
    // Horner on coefficients 1, -q, -qp, ..., -qp^{k-1}, tracking the derivative
    let (p, q) = (*params.p(), *params.q());
    let mut value = Complex64::new(1.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut coeff = q;
    for _ in 0..params.k() {
        deriv = deriv * z + value;
        value = value * z - coeff;
        coeff *= p;
    }
    (value, deriv)
}

/// Companion-matrix eigenvalues polished by Newton's method on `A(z)`.
pub fn solve_roots(params: &RunParams<f64>) -> Result<RootSystem> {
    let k = params.k() as usize;
    let (p, q) = (*params.p(), *params.q());
    let mut companion = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        companion[(0, i)] = q * p.powi(i as i32);
        if i + 1 < k {
            companion[(i + 1, i)] = 1.0;
        }
    }
    let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
    for z in roots.iter_mut() {
        for _ in 0..100 {
            let (value, deriv) = aux_poly(params, *z);
            if deriv.norm() == 0.0 {
                break;
            }
            let step = value / deriv;
            *z -= step;
            if step.norm() <= 1e-17 * z.norm().max(1e-300) {
                break;
            }
        }
    }
    roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.im.total_cmp(&a.im)));
    let target = q * params.pk();
    let residual = roots.iter().map(|&z| aux_poly(params, z).0.norm()).fold(0.0, f64::max);
    let identity_residual = roots
        .iter()
        .map(|&z| (z.powu(k as u32) * (1.0 - z) - target).norm())
        .fold(0.0, f64::max);
    let mut min_separation = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            min_separation = min_separation.min((a - b).norm());
        }
    }
    let system = RootSystem {
        params: params.clone(),
        roots,
        residual,
        identity_residual,
        min_separation,
    };
    system.check()?;
    Ok(system)
}

impl RootSystem {
    /// Checks distinctness, `|lambda| < 1`, the polynomial residual and the
    /// identity `lambda^k (1 - lambda) = p^k q`.
    pub fn check(&self) -> Result<()> {
        let fail = |what: String| Err(Error::RootToleranceExceeded(what));
        if self.residual > ROOT_RESIDUAL_TOL {
            return fail(format!("polynomial residual {:e}", self.residual));
        }
        if self.identity_residual > IDENTITY_TOL {
            return fail(format!("root identity residual {:e}", self.identity_residual));
        }
        if self.min_separation <= MIN_SEPARATION {
            return fail(format!("roots separated by only {:e}", self.min_separation));
        }
        if let Some(z) = self.roots.iter().find(|z| z.norm() >= 1.0) {
            return fail(format!("root {z} lies outside the unit disc"));
        }
        Ok(())
    }
}

/// Coefficients `a_{jm}` of `f(n) = sum_j sum_m C(n-1, m-1) a_{jm} lambda_j^{n-m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCoefficients {
    pub system: RootSystem,
    pub r: u32,
    pub ell: u32,
    /// `k x r`; entry `(j, m-1)` is `a_{jm}`.
    pub a: DMatrix<Complex64>,
    /// Largest deviation from the reference pmf over the fitting and
    /// validation windows.
    pub recovery_residual: f64,
    /// Largest imaginary part of a reconstructed value on those windows.
    pub imag_residual: f64,
    /// 1-norm condition number of the column-equilibrated system.
    pub condition: f64,
}

fn binom_f64(n: i64, m: i64) -> f64 {
    if m < 0 || n < m {
        return 0.0;
    }
    (0..m).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

fn basis(n: i64, m: i64, lambda: Complex64) -> Complex64 {
    let c = binom_f64(n - 1, m - 1);
    if c == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    c * lambda.powi((n - m) as i32)
}

/// Newton's method on `A(z)` in `prec`-bit complex arithmetic, from `z0`.
fn polish_root_mpfr(params: &RunParams<f64>, z0: Complex64, prec: u32) -> Complex {
    let p = Float::with_val(prec, *params.p());
    let q = Float::with_val(prec, 1) - &p;
    let mut z = Complex::with_val(prec, (z0.re, z0.im));
    for _ in 0..64 {
        let mut value = Complex::with_val(prec, 1);
        let mut deriv = Complex::with_val(prec, 0);
        let mut coeff = q.clone();
        for _ in 0..params.k() {
            deriv = deriv * &z + &value;
            value = value * &z - &coeff;
            coeff *= &p;
        }
        let step = value / deriv;
        z -= &step;
        match (mag_exp(&step), mag_exp(&z)) {
            (None, _) => break,
            (Some(s), Some(m)) if s < m - prec as i32 + 4 => break,
            _ => {}
        }
    }
    z
}

/// Binary exponent of the larger component, `None` at zero.
fn mag_exp(z: &Complex) -> Option<i32> {
    z.real().get_exp().max(z.imag().get_exp())
}

fn mag_f64(z: &Complex) -> f64 {
    z.real().to_f64().hypot(z.imag().to_f64())
}

/// LU factors with row permutation, in place.
struct Lu {
    a: Vec<Vec<Complex>>,
    perm: Vec<usize>,
}

impl Lu {
    fn new(mut a: Vec<Vec<Complex>>) -> Option<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| mag_f64(&a[x][col]).total_cmp(&mag_f64(&a[y][col])))?;
            if a[pivot][col].is_zero() {
                return None;
            }
            a.swap(col, pivot);
            perm.swap(col, pivot);
            let (top, bottom) = a.split_at_mut(col + 1);
            let pivot_row = &top[col];
            for row in bottom.iter_mut() {
                let factor = Complex::with_val(pivot_row[col].prec().0, &row[col] / &pivot_row[col]);
                for t in col + 1..n {
                    row[t] -= &factor * &pivot_row[t];
                }
                row[col] = factor;
            }
        }
        Some(Self { a, perm })
    }

    fn solve(&self, b: &[Complex]) -> Vec<Complex> {
        let n = self.a.len();
        let mut x: Vec<Complex> = self.perm.iter().map(|&i| b[i].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = Complex::with_val(x[i].prec().0, &self.a[i][j] * &x[j]);
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = Complex::with_val(x[i].prec().0, &self.a[i][j] * &x[j]);
                x[i] -= t;
            }
            x[i] /= &self.a[i][i];
        }
        x
    }
}

/// Solution of the fitting system at `prec` bits together with the 1-norm
/// condition number of its column-equilibrated matrix.
fn solve_fitting_system(system: &RootSystem, r: u32, reference: &[f64], prec: u32) -> Option<(Vec<Complex64>, f64)> {
    let kr = system.roots.len() * r as usize;
    let roots: Vec<Complex> = system
        .roots
        .iter()
        .map(|&z| polish_root_mpfr(&system.params, z, prec))
        .collect();
    let mut matrix = vec![vec![Complex::new(prec); kr]; kr];
    for (row, entries) in matrix.iter_mut().enumerate() {
        let n = row as i64 + 1;
        for (j, lambda) in roots.iter().enumerate() {
            for m in 1..=r as i64 {
                let c = binom(n - 1, m - 1, BinomialConvention::ZeroOnNegativeTop);
                if c != 0 {
                    let power = Complex::with_val(prec, lambda.pow((n - m) as u32));
                    entries[j * r as usize + m as usize - 1] = power * c;
                }
            }
        }
    }
    // columns scaled by powers of two to unit max-norm
    let scale: Vec<i32> = (0..kr)
        .map(|col| {
            let max = matrix.iter().map(|row| mag_f64(&row[col])).fold(0.0, f64::max);
            if max > 0.0 {
                -(max.log2().round() as i32)
            } else {
                0
            }
        })
        .collect();
    for row in matrix.iter_mut() {
        for (entry, &e) in row.iter_mut().zip(&scale) {
            *entry <<= e;
        }
    }
    let norm = (0..kr)
        .map(|col| matrix.iter().map(|row| mag_f64(&row[col])).sum::<f64>())
        .fold(0.0, f64::max);
    let lu = Lu::new(matrix)?;
    let mut inverse_norm = 0.0f64;
    for col in 0..kr {
        let unit: Vec<Complex> = (0..kr).map(|i| Complex::with_val(prec, (i == col) as u32)).collect();
        inverse_norm = inverse_norm.max(lu.solve(&unit).iter().map(mag_f64).sum());
    }
    let rhs: Vec<Complex> = (1..=kr).map(|n| Complex::with_val(prec, reference[n])).collect();
    let solution = lu
        .solve(&rhs)
        .into_iter()
        .zip(&scale)
        .map(|(mut x, &e)| {
            x <<= e;
            Complex64::new(x.real().to_f64(), x.imag().to_f64())
        })
        .collect();
    Some((solution, norm * inverse_norm))
}

/// Solves for `a_{jm}` on the first `kr` trials `n = 1..=kr` (values below the
/// support are genuine zeros of the representation) and validates on the
/// next `kr`.
///
/// `reference[n]` is `f(n)`; at least `2kr + 1` entries are required.
pub fn recover_coefficients(system: &RootSystem, r: u32, ell: u32, reference: &[f64]) -> Result<RootCoefficients> {
    let k = system.params.k();
    VariantSpec::overlap(ell).validate(k)?;
    let kr = (k * r) as usize;
    if reference.len() < 2 * kr + 1 {
        return Err(Error::Precondition(format!(
            "reference pmf has {} points, need {}",
            reference.len(),
            2 * kr + 1
        )));
    }
    let column = |j: usize, m: usize| j * r as usize + m - 1;
    let mut condition = f64::INFINITY;
    let mut solved = None;
    for prec in SOLVE_PRECISIONS {
        if let Some((solution, cond)) = solve_fitting_system(system, r, reference, prec) {
            condition = cond;
            if cond.is_finite() && cond.log2() + SOLVE_MARGIN_BITS <= prec as f64 {
                solved = Some(solution);
                break;
            }
        }
    }
    let solution = solved.ok_or(Error::IllConditionedSystem(condition))?;
    let a = DMatrix::from_fn(k as usize, r as usize, |j, m| solution[column(j, m + 1)]);
    let mut coeffs = RootCoefficients {
        system: system.clone(),
        r,
        ell,
        a,
        recovery_residual: 0.0,
        imag_residual: 0.0,
        condition,
    };
    for n in 1..=2 * kr as i64 {
        let eval = coeffs.eval_raw(n);
        coeffs.recovery_residual = coeffs.recovery_residual.max((eval.re - reference[n as usize]).abs());
        coeffs.imag_residual = coeffs.imag_residual.max(eval.im.abs());
    }
    let worst = coeffs.recovery_residual.max(coeffs.imag_residual);
    if worst > RECOVERY_TOL || !worst.is_finite() {
        return Err(Error::ValidationFailed {
            residual: worst,
            tolerance: RECOVERY_TOL,
        });
    }
    Ok(coeffs)
}

/// One root-based evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootEval {
    pub value: f64,
    pub imag: f64,
    /// Number of `(j, m)` terms summed.
    pub terms: u64,
}

impl RootCoefficients {
    /// First trial at which the `r`-th run can complete.
    pub fn support_start(&self) -> i64 {
        VariantSpec::overlap(self.ell).support_start(self.system.params.k(), self.r)
    }

    fn eval_raw(&self, n: i64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, &lambda) in self.system.roots.iter().enumerate() {
            for m in 1..=self.r as usize {
                sum += self.a[(j, m - 1)] * basis(n, m as i64, lambda);
            }
        }
        sum
    }
}

/// `f(n)` from the roots; exactly zero below the support.
pub fn pmf_root_based(coeffs: &RootCoefficients, n: i64) -> RootEval {
    if n < coeffs.support_start() {
        return RootEval {
            value: 0.0,
            imag: 0.0,
            terms: 0,
        };
    }
    let value = coeffs.eval_raw(n);
    RootEval {
        value: value.re,
        imag: value.im,
        terms: coeffs.system.roots.len() as u64 * coeffs.r as u64,
    }
}

/// Factorial moments, Full indexing, from
/// `M_(i) = i!/(qp^k)^i sum_j sum_m a_{jm} m lambda_j^{(i+m)k+i-1} / (qp^k)^m 2F1(1-m, 1-i; 2; 1/lambda_j)`.
pub fn factorial_moments_root(coeffs: &RootCoefficients, i_max: usize) -> Result<MomentSet<f64>> {
    if i_max == 0 {
        return Err(Error::Precondition("order must be at least 1".into()));
    }
    let params = &coeffs.system.params;
    let k = params.k() as i32;
    let x = params.qpk();
    let mut values = Vec::with_capacity(i_max);
    let mut factorial = 1.0;
    for i in 1..=i_max as i64 {
        factorial *= i as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, &lambda) in coeffs.system.roots.iter().enumerate() {
            let inv = lambda.inv();
            for m in 1..=coeffs.r as i64 {
                let hyp = Hyp2F1Spec::new(1 - m, 1 - i, 2)?.eval(&inv);
                let power = lambda.powi((i as i32 + m as i32) * k + i as i32 - 1);
                sum += coeffs.a[(j, m as usize - 1)] * (m as f64) * power / x.powi(m as i32) * hyp;
            }
        }
        values.push(factorial / x.powi(i as i32) * sum.re);
    }
    Ok(MomentSet::new(MomentKind::Factorial, IndexScheme::Full, values))
}

/// Roots plus coefficients for any variant other than Type II; a gap `g`
/// reuses the `l = 0` coefficients with the index shifted by `(r-1)g`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootModel {
    pub coeffs: RootCoefficients,
    pub shift: i64,
}

impl RootModel {
    pub fn new(params: &RunParams<f64>, overlap: i64) -> Result<Self> {
        VariantSpec {
            overlap,
            type2: false,
        }
        .validate(params.k())?;
        let system = solve_roots(params)?;
        let (ell, shift) = if overlap < 0 {
            (0, (params.r() as i64 - 1) * -overlap)
        } else {
            (overlap as u32, 0)
        };
        let window = 2 * params.rk() as usize;
        let reference = if ell == 0 {
            let table = pmf_recurrence_pg(params, window as i64);
            (0..=window as i64).map(|n| table.get_or_zero(n)).collect()
        } else {
            overlap_series(params, ell, window)?
        };
        let coeffs = recover_coefficients(&system, params.r(), ell, &reference)?;
        Ok(Self { coeffs, shift })
    }

    pub fn pmf(&self, n: i64) -> f64 {
        pmf_root_based(&self.coeffs, n - self.shift).value
    }

    /// Full-indexing factorial moments, including the gap shift.
    pub fn factorial_moments(&self, i_max: usize) -> Result<MomentSet<f64>> {
        let base = factorial_moments_root(&self.coeffs, i_max)?;
        Ok(MomentSet::new(
            MomentKind::Factorial,
            IndexScheme::Full,
            shift_factorial_by(&base.values, self.shift),
        ))
    }
}

/// `f_{r,k,-g}(n) = f_{r,k,0}(n - (r-1)g)` from a Full-indexing Type I table.
pub fn gap_pmf<S: Scalar>(params: &RunParams<S>, g: u32, n: i64, base: &PmfTable<S>) -> S {
    base.get_or_zero(n - (params.r() as i64 - 1) * g as i64)
}

/// Moments of the gap variant, Full indexing, by shifting the Type I
/// moments by `(r-1)g`. Central moments are unchanged by the shift.
pub fn gap_moments<S: Scalar>(params: &RunParams<S>, g: u32, order_max: usize, kind: MomentKind) -> Result<MomentSet<S>> {
    let shift = (params.r() as i64 - 1) * g as i64;
    match kind {
        MomentKind::Factorial => {
            let base = factorial_moments_partition(params, order_max, IndexScheme::Full)?;
            Ok(MomentSet::new(kind, IndexScheme::Full, shift_factorial_by(&base.values, shift)))
        }
        MomentKind::Raw => {
            let table = EulerianTable::new(order_max);
            let base = raw_moments_partition(params, order_max, IndexScheme::Full, &table)?;
            Ok(MomentSet::new(kind, IndexScheme::Full, shift_raw_by(&base.values, shift)))
        }
        MomentKind::Central => central_moments(params, order_max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn pgf_values() {
        let params = RunParams::new(3, 1, 0.4).unwrap();
        assert_eq!(geometric_pgf(&params, Complex64::new(1.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let near_one = geometric_pgf(&params, Complex64::new(1.0 - 1e-7, 0.0)).unwrap();
        assert!((near_one.re - 1.0).abs() < 1e-4);
        let geo = RunParams::new(1, 1, 0.3).unwrap();
        let s = Complex64::new(0.4, 0.2);
        let expected = 0.3 * s / (1.0 - 0.7 * s);
        assert!((geometric_pgf(&geo, s).unwrap() - expected).norm() < 1e-15);
        // removable singularity at s = 1/p
        let at = geometric_pgf(&geo, Complex64::new(1.0 / 0.3, 0.0)).unwrap();
        assert!((at.re - 1.0 / (1.0 - 0.7 / 0.3)).abs() < 1e-12);
        // genuine pole of ps/(1-qs) at s = 1/q
        assert!(matches!(geometric_pgf(&geo, Complex64::new(1.0 / 0.7, 0.0)), Err(Error::PoleAtS(_))));
    }

    #[test]
    fn pgf_series_matches_recurrence() {
        let params = RunParams::new(2, 1, Rational::from((1, 2))).unwrap();
        let table = geometric_pmf_recurrence(&params, 50);
        let half = |d: i64| Rational::from((1, d));
        assert_eq!(table.values[..4], [half(4), half(8), half(8), Rational::from((3, 32))]);
        let series = overlap_series(&params, 0, 50).unwrap();
        for n in 0..=50 {
            assert_eq!(series[n as usize], table.get_or_zero(n));
        }
    }

    #[test]
    fn series_matches_recurrence_for_several_runs() {
        for r in 1..=4 {
            let params = RunParams::new(3, r, Rational::from((2, 5))).unwrap();
            let series = overlap_series(&params, 0, 100).unwrap();
            let table = pmf_recurrence_pg(&params, 100);
            for n in 0..=100 {
                assert_eq!(series[n as usize], table.get_or_zero(n));
            }
        }
    }

    #[test]
    fn geometric_mass() {
        let params = RunParams::new(2, 1, 0.5).unwrap();
        assert!(geometric_pmf_recurrence(&params, 200).mass() >= 1.0 - 1e-9);
    }

    #[test]
    fn small_root_systems() {
        let params = RunParams::new(1, 1, 0.3).unwrap();
        let system = solve_roots(&params).unwrap();
        assert!((system.roots[0] - Complex64::new(0.7, 0.0)).norm() < 1e-15);
        let params = RunParams::new(2, 1, 0.5).unwrap();
        let system = solve_roots(&params).unwrap();
        let s5 = 5f64.sqrt();
        assert!((system.roots[0].re - (1.0 + s5) / 4.0).abs() < 1e-14);
        assert!((system.roots[1].re - (1.0 - s5) / 4.0).abs() < 1e-14);
        let params = RunParams::new(5, 1, 0.3).unwrap();
        assert!(solve_roots(&params).unwrap().residual <= 1e-13);
    }

    #[test]
    fn single_run_coefficients() {
        let params = RunParams::new(3, 1, 0.45).unwrap();
        let model = RootModel::new(&params, 0).unwrap();
        let table = geometric_pmf_recurrence(&params, 100);
        for n in 1..=100 {
            assert!((model.pmf(n) - table.get_or_zero(n)).abs() < 1e-10);
        }
        assert_eq!(pmf_root_based(&model.coeffs, 50).terms, 3);
    }

    #[test]
    fn long_range_spot_check() {
        let params = RunParams::new(2, 2, 0.5).unwrap();
        let model = RootModel::new(&params, 0).unwrap();
        let table = pmf_recurrence_pg(&params, 1000);
        assert!((model.pmf(1000) - table.get_or_zero(1000)).abs() < 1e-9);
    }

    #[test]
    fn single_run_moments() {
        // geometric law: mean 1/p
        let params = RunParams::new(1, 1, 0.5).unwrap();
        let model = RootModel::new(&params, 0).unwrap();
        let moments = model.factorial_moments(1).unwrap();
        assert!((moments.order(1) - 2.0).abs() < 1e-13);
        // r = 1 reduces to i!/(qp^k)^{i+1} f_k((i+1)k + i)
        let params = RunParams::new(3, 1, 0.6).unwrap();
        let model = RootModel::new(&params, 0).unwrap();
        let moments = model.factorial_moments(4).unwrap();
        let table = geometric_pmf_recurrence(&params, 40);
        let x = params.qpk();
        let mut fact = 1.0;
        for i in 1..=4i64 {
            fact *= i as f64;
            let expected = fact / x.powi(i as i32 + 1) * table.get_or_zero((i + 1) * 3 + i);
            assert!((moments.order(i as usize) / expected - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_shifts_pmf() {
        let params = RunParams::new(2, 3, 0.5).unwrap();
        let base = pmf_recurrence_pg(&params, 40);
        assert_eq!(gap_pmf(&params, 2, 10, &base), base.get_or_zero(6));
        let single = RunParams::new(2, 1, 0.5).unwrap();
        let base = pmf_recurrence_pg(&single, 40);
        assert_eq!(gap_pmf(&single, 5, 10, &base), base.get_or_zero(10));
    }

    #[test]
    fn gap_mean() {
        let params = RunParams::new(2, 3, Rational::from((1, 2))).unwrap();
        let moments = gap_moments(&params, 2, 2, MomentKind::Factorial).unwrap();
        assert_eq!(moments.order(1), 22);
        let plain = gap_moments(&params, 2, 2, MomentKind::Central).unwrap();
        assert_eq!(plain.order(2), Rational::from(66));
    }
}
