//! Type II engines: runs of length at least `k` separated by at least one
//! failure. Full indexing throughout.

use rug::Rational;

use crate::error::Result;
use crate::model::RunParams;
use crate::pmf::sums::{in_working_mode, SumContext};
use crate::scalar::{DoubleDouble, Scalar};
use crate::special::BinomialConvention;

/// Which of the two equivalent forms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MuselliForm {
    /// As originally published; its brackets contain `C(x, -1)` terms.
    Original,
    /// Rewritten with `C(i-1, j-1) = C(i, j) - C(i-1, j)` so that no lower
    /// argument is negative.
    Alt,
}

impl MuselliForm {
    /// Binomial convention each form is evaluated under.
    ///
    /// The original waiting-time form needs `C(-1, -1) = 1` at `r = 1`,
    /// `n = k`; every other form is exact with zero outside `0 <= b <= a`.
    pub fn convention(self, counts: bool) -> BinomialConvention {
        match (self, counts) {
            (MuselliForm::Original, false) => BinomialConvention::UnitDiagonal,
            _ => BinomialConvention::ZeroOnNegativeTop,
        }
    }
}

/// Probability that the `r`-th Type II run completes at trial `n`.
pub fn pmf_muselli<S: Scalar>(params: &RunParams<S>, n: i64, form: MuselliForm) -> S {
    let out: Result<S> = in_working_mode!(S, params, n + 1, |ctx| Ok(muselli_at(ctx, n, form)));
    out.expect("infallible")
}

pub(crate) fn muselli_at<T: Scalar>(ctx: &SumContext<T>, n: i64, form: MuselliForm) -> T {
    if n < 1 {
        return T::zero();
    }
    let (k, r) = (ctx.params.k() as i64, ctx.params.r() as i64);
    let conv = form.convention(false);
    let c = |a: i64, b: i64| ctx.binom.get_with(a, b, conv);
    let (p, q) = (ctx.params.p().clone(), ctx.params.q().clone());
    T::sum_terms((r..=(n + 1) / (k + 1)).map(|m| {
        let bracket = match form {
            MuselliForm::Original => c(n - m * k - 1, m - 2) + q.clone() * c(n - m * k - 1, m - 1),
            MuselliForm::Alt => c(n - m * k, m - 1) - p.clone() * c(n - m * k - 1, m - 1),
        };
        let term = c(m - 1, r - 1) * ctx.p_pow(m * k) * ctx.q_pow(m - 1) * bracket;
        if (m - r) % 2 == 0 {
            term
        } else {
            -term
        }
    }))
}

/// Probability of exactly `r_count` runs of length at least `k` in `n` trials.
/// Only `k` and `p` are taken from `params`; `r_count = 0` is allowed.
pub fn counts_muselli<S: Scalar>(params: &RunParams<S>, n: i64, r_count: u32, form: MuselliForm) -> S {
    let out: Result<S> = in_working_mode!(S, params, n + 1, |ctx| Ok(counts_at(ctx, n, r_count as i64, form)));
    out.expect("infallible")
}

pub(crate) fn counts_at<T: Scalar>(ctx: &SumContext<T>, n: i64, r: i64, form: MuselliForm) -> T {
    if n < 1 {
        return T::zero();
    }
    let k = ctx.params.k() as i64;
    let conv = form.convention(true);
    let c = |a: i64, b: i64| ctx.binom.get_with(a, b, conv);
    let (p, q) = (ctx.params.p().clone(), ctx.params.q().clone());
    T::sum_terms((r..=(n + 1) / (k + 1)).map(|m| {
        let bracket = match form {
            MuselliForm::Original => c(n - m * k, m - 1) + q.clone() * c(n - m * k, m),
            MuselliForm::Alt => c(n - m * k + 1, m) - p.clone() * c(n - m * k, m),
        };
        // q^{m-1} is 1/q at m = 0
        let q_factor = if m == 0 {
            T::one() / q.clone()
        } else {
            ctx.q_pow(m - 1)
        };
        let term = c(m, r) * ctx.p_pow(m * k) * q_factor * bracket;
        if (m - r) % 2 == 0 {
            term
        } else {
            -term
        }
    }))
}
