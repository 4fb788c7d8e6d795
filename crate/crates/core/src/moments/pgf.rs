//! Factorial moments as derivatives of the generating function at `s = 1`:
//!
//! `M_(n) = n! p^{rk} sum_{v >= 0} C(v+rk, n) sum_{j} (-1)^{v-j} p^{v-j} C(r, v-j) G_j`
//!
//! with `G_j = sum_{i <= j/(k+1)} (-1)^i (qp^k)^i C(r+i-1, r-1) C(r+j-ik-1, r+i-1)`
//! (Full indexing). The `v`-sum is infinite and `G_j` cancels by hundreds of
//! bits for small `p`, so the float route evaluates it in double-double when
//! the observed cancellation allows and in MPFR otherwise, with a precision
//! chosen per term.

use rug::ops::Pow;
use rug::{Float, Integer};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::model::{IndexScheme, MomentKind, MomentSet, RunParams};
use crate::pmf::sums::{pgf_expansion_at, SumContext};
use crate::scalar::{CompensatedSum, DoubleDouble, Field, Scalar};
use crate::special::{binom, factorial, BinomialConvention};

/// Hard cap on the number of `v` terms.
pub const MAX_TERMS: usize = 1_000_000;

/// Good bits demanded of every pmf term.
const TARGET_BITS: u32 = 64;

/// Result of [`factorial_moments_pgf`].
#[derive(Debug, Clone, PartialEq)]
pub struct PgfMoments {
    pub moments: MomentSet<f64>,
    /// Number of `v` terms summed.
    pub terms: usize,
    /// Geometric-envelope estimate of the neglected tail, relative to the
    /// partial sum, for the slowest-converging order.
    pub tail_estimate: f64,
}

/// The derivative sum, truncated after `v = v_max`, in the arithmetic of `S`.
///
/// Exact in rational mode for the truncated sum; meant for small cases and
/// tests, since the float path of [`factorial_moments_pgf`] is far more
/// accurate in double precision.
pub fn factorial_moments_pgf_partial<S: Scalar>(params: &RunParams<S>, order_max: usize, v_max: i64) -> Result<MomentSet<S>> {
    if order_max == 0 {
        return Err(Error::Precondition("order must be at least 1".into()));
    }
    let rk = params.rk();
    let ctx = SumContext::new(params, v_max + params.r() as i64 + 1);
    let mut sums: Vec<Vec<S>> = vec![Vec::new(); order_max];
    for v in 0..=v_max {
        let pv = pgf_expansion_at(&ctx, v);
        for (n, acc) in sums.iter_mut().enumerate() {
            let c = ctx.binom.get(v + rk, n as i64 + 1);
            if !c.is_zero() {
                acc.push(c * pv.clone());
            }
        }
    }
    let values = sums
        .into_iter()
        .enumerate()
        .map(|(n, terms)| S::from_integer(&factorial(n as u32 + 1)) * S::sum_terms(terms))
        .collect();
    Ok(MomentSet::new(MomentKind::Factorial, IndexScheme::Full, values))
}

/// Multiplies (or divides) `target` by the product of `factors`, batching
/// them into `u64` products to save MPFR operations.
fn scale_by(target: &mut Float, factors: impl Iterator<Item = u64>, divide: bool) {
    let mut acc: u64 = 1;
    let mut apply = |v: u64| {
        if divide {
            *target /= v;
        } else {
            *target *= v;
        }
    };
    for f in factors {
        match acc.checked_mul(f) {
            Some(v) => acc = v,
            None => {
                apply(acc);
                acc = f;
            }
        }
    }
    if acc != 1 {
        apply(acc);
    }
}

fn exponent(x: &Float) -> i64 {
    x.get_exp().map_or(i64::MIN / 4, i64::from)
}

/// `G_j` with `x = qp^k`, at `prec` bits; also returns the bits lost to
/// cancellation.
fn inner_sum(j: i64, k: i64, r: i64, x: &Float, prec: u32) -> (Float, u32) {
    let first = binom(r + j - 1, r - 1, BinomialConvention::ZeroOnNegativeTop);
    let mut term = Float::with_val(prec, &first);
    let mut sum = term.clone();
    let mut max_exp = exponent(&term);
    let x = Float::with_val(prec, x);
    for i in 0..j / (k + 1) {
        // ratio of consecutive terms:
        // -x prod_{t=0}^{k} (a-b-t) / ((i+1) prod_{t<k} (a-t)), a = r+j-ik-1, b = r+i-1
        let a = r + j - i * k - 1;
        let b = r + i - 1;
        scale_by(&mut term, (0..=k).map(|t| (a - b - t) as u64), false);
        scale_by(&mut term, std::iter::once((i + 1) as u64).chain((0..k).map(|t| (a - t) as u64)), true);
        term *= &x;
        term = -term;
        sum += &term;
        max_exp = max_exp.max(exponent(&term));
    }
    let loss = if sum.is_zero() {
        prec
    } else {
        (max_exp - exponent(&sum)).max(0) as u32
    };
    (sum, loss)
}

/// Bits carried by [`DoubleDouble`].
const DD_BITS: u32 = 104;

fn dd_from_u128(v: u128) -> DoubleDouble {
    let hi = v as f64;
    let lo = (v as i128 - hi as i128) as f64;
    DoubleDouble(TwoFloat::new_add(hi, lo))
}

/// [`inner_sum`] in double-double. `None` when a ratio factor overflows
/// `u128` or a term leaves the `f64` range.
fn inner_sum_dd(j: i64, k: i64, r: i64, x: DoubleDouble) -> Option<(DoubleDouble, u32)> {
    let first = binom(r + j - 1, r - 1, BinomialConvention::ZeroOnNegativeTop);
    let mut term = DoubleDouble::from_integer(&first);
    let mut sum = term;
    let mut max_abs = term.hi().abs();
    for i in 0..j / (k + 1) {
        let a = r + j - i * k - 1;
        let b = r + i - 1;
        let num = (0..=k).try_fold(1u128, |acc, t| acc.checked_mul((a - b - t) as u128))?;
        let den = (0..k).try_fold((i + 1) as u128, |acc, t| acc.checked_mul((a - t) as u128))?;
        term = -(term * dd_from_u128(num) / dd_from_u128(den) * x);
        sum = sum + term;
        max_abs = max_abs.max(term.hi().abs());
    }
    if !max_abs.is_finite() || max_abs > 1e300 {
        return None;
    }
    let loss = if sum.is_zero() {
        DD_BITS
    } else {
        (max_abs / sum.hi().abs()).log2().ceil().max(0.0) as u32
    };
    Some((sum, loss))
}

/// Memoised `G_j` with the number of bits known to be correct.
struct InnerTable {
    k: i64,
    r: i64,
    p: f64,
    /// `1 - p`, exact.
    q: Float,
    k_u: u32,
    entries: Vec<Option<(Float, u32)>>,
    last_loss: u32,
}

impl InnerTable {
    fn x_at(&self, prec: u32) -> Float {
        let p = Float::with_val(prec, self.p);
        Float::with_val(prec, &self.q) * p.pow(self.k_u)
    }

    fn get(&mut self, j: i64, good_bits: u32) -> (Float, u32) {
        let idx = j as usize;
        if self.entries.len() <= idx {
            self.entries.resize(idx + 1, None);
        }
        if let Some((value, good)) = &self.entries[idx] {
            if *good >= good_bits {
                return (value.clone(), *good);
            }
        }
        let rounding = 64 - ((j / (self.k + 1)) as u64 + 1).leading_zeros() + 2;
        if good_bits + self.last_loss + rounding + 8 < DD_BITS {
            let x = self.x_at(128);
            let x_dd = DoubleDouble(TwoFloat::new_add(x.to_f64(), Float::with_val(128, &x - x.to_f64()).to_f64()));
            if let Some((value, loss)) = inner_sum_dd(j, self.k, self.r, x_dd) {
                let good = DD_BITS.saturating_sub(loss + rounding);
                if good >= good_bits {
                    self.last_loss = loss;
                    let value = Float::with_val(128, value.hi()) + value.lo();
                    self.entries[idx] = Some((value.clone(), good));
                    return (value, good);
                }
            }
        }
        let mut prec = good_bits + self.last_loss + rounding + 16;
        loop {
            let x = self.x_at(prec);
            let (value, loss) = inner_sum(j, self.k, self.r, &x, prec);
            let good = prec.saturating_sub(loss + rounding);
            if good >= good_bits {
                self.last_loss = loss;
                self.entries[idx] = Some((value.clone(), good));
                return (value, good);
            }
            prec = good_bits + loss + rounding + 32;
        }
    }
}

/// `P_{v+rk} / p^{rk}` to at least [`TARGET_BITS`] correct bits.
fn scaled_pmf(table: &mut InnerTable, v: i64, p: f64, binom_r: &[Integer], middle_loss: &mut u32) -> f64 {
    let r = table.r;
    let lo = (v - r).max(0);
    loop {
        let want = TARGET_BITS + *middle_loss + 8;
        let gs: Vec<(Float, u32)> = (lo..=v).map(|j| table.get(j, want)).collect();
        let prec = gs.iter().map(|(g, _)| g.prec()).max().unwrap_or(128);
        let good = gs.iter().map(|&(_, g)| g).min().unwrap_or(prec);
        let neg_p = Float::with_val(prec, -p);
        let mut sum = Float::with_val(prec, 0);
        let mut max_exp = i64::MIN / 4;
        for (j, (g, _)) in (lo..=v).zip(gs.iter()) {
            let d = (v - j) as u32;
            let mut term = Float::with_val(prec, (&neg_p).pow(d));
            term *= &binom_r[d as usize];
            term *= g;
            max_exp = max_exp.max(exponent(&term));
            sum += &term;
        }
        let loss = if sum.is_zero() {
            good
        } else {
            (max_exp - exponent(&sum)).max(0) as u32
        };
        if good.saturating_sub(loss + 4) >= TARGET_BITS {
            return sum.to_f64();
        }
        *middle_loss = loss + 8;
    }
}

/// Factorial moments `M_(1..=order_max)` (Full indexing) by the derivative
/// sum, truncated once a geometric envelope fitted to the last ten terms
/// bounds the remaining tail by `tail_tol` times the partial sum.
///
/// `tail_tol` is relative. The envelope uses the largest of the last ten
/// term ratios, so it is an estimate rather than a proof; it is only
/// accepted after the terms have been decreasing for ten steps.
pub fn factorial_moments_pgf(params: &RunParams<f64>, order_max: usize, tail_tol: f64) -> Result<PgfMoments> {
    if order_max == 0 {
        return Err(Error::Precondition("order must be at least 1".into()));
    }
    if tail_tol.is_nan() || tail_tol <= 0.0 {
        return Err(Error::invalid("tail_tol", "must be positive"));
    }
    let (k, r, rk) = (params.k() as i64, params.r() as i64, params.rk());
    let p = *params.p();
    let q_exact = Float::with_val(1100, 1) - Float::with_val(1100, p);
    let mut table = InnerTable {
        k,
        r,
        p,
        q: q_exact,
        k_u: params.k(),
        entries: Vec::new(),
        last_loss: 0,
    };
    let binom_r: Vec<Integer> = (0..=r).map(|d| binom(r, d, BinomialConvention::ZeroOnNegativeTop)).collect();
    let p_rk = p.powi(rk as i32);
    let mut sums = vec![CompensatedSum::new(); order_max];
    let mut previous = vec![0.0f64; order_max];
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); order_max];
    let mut middle_loss = 0;
    for v in 0..MAX_TERMS as i64 {
        let pv = p_rk * scaled_pmf(&mut table, v, p, &binom_r, &mut middle_loss);
        // C(v+rk, n) for n = 1..=order_max
        let mut c = 1.0f64;
        let mut all_done = v > 0;
        let mut worst_tail = 0.0f64;
        for n in 1..=order_max {
            c *= (v + rk - n as i64 + 1) as f64 / n as f64;
            let term = c.max(0.0) * pv;
            sums[n - 1].add(term);
            let ratios_n = &mut ratios[n - 1];
            if previous[n - 1] > 0.0 {
                ratios_n.push(term / previous[n - 1]);
                if ratios_n.len() > 10 {
                    ratios_n.remove(0);
                }
            }
            previous[n - 1] = term;
            let rho = ratios_n.iter().copied().fold(0.0, f64::max);
            let partial = sums[n - 1].value();
            if ratios_n.len() < 10 || rho >= 1.0 || partial <= 0.0 {
                all_done = false;
                continue;
            }
            let tail = term * rho / (1.0 - rho) / partial;
            worst_tail = worst_tail.max(tail);
            if tail > tail_tol {
                all_done = false;
            }
        }
        if all_done {
            let mut fact = 1.0;
            let values = sums
                .iter()
                .enumerate()
                .map(|(n, s)| {
                    fact *= (n + 1) as f64;
                    fact * s.value()
                })
                .collect();
            return Ok(PgfMoments {
                moments: MomentSet::new(MomentKind::Factorial, IndexScheme::Full, values),
                terms: v as usize + 1,
                tail_estimate: worst_tail,
            });
        }
    }
    Err(Error::NonConvergentTail(MAX_TERMS))
}
