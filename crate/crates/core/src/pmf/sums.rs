//! Closed-form sum engines. Each evaluates a single `n` independently.
//!
//! The sums alternate in sign and cancel heavily, so in float mode they are
//! accumulated in double-double and rounded once at the end.

use rug::Rational;

use crate::error::Result;
use crate::model::{IndexScheme, RunParams};
use crate::scalar::{DoubleDouble, Scalar};
use crate::special::{Binomials, Hyp2F1Spec};

/// Powers of `p` and `q` plus a Pascal table, shared across the points of a range.
#[derive(Debug, Clone)]
pub(crate) struct SumContext<T> {
    pub params: RunParams<T>,
    pub binom: Binomials<T>,
    p_pow: Vec<T>,
    q_pow: Vec<T>,
}

impl<T: Scalar> SumContext<T> {
    pub fn new(params: &RunParams<T>, max_top: i64) -> Self {
        let max_top = max_top.max(1) as usize;
        let table_len = max_top + params.rk() as usize + params.k() as usize + 2;
        let powers = |x: &T| {
            let mut v = Vec::with_capacity(table_len);
            v.push(T::one());
            for i in 1..table_len {
                v.push(v[i - 1].clone() * x.clone());
            }
            v
        };
        Self {
            params: params.clone(),
            binom: Binomials::new(max_top + params.r() as usize + 1),
            p_pow: powers(params.p()),
            q_pow: powers(params.q()),
        }
    }

    pub fn p_pow(&self, e: i64) -> T {
        self.p_pow
            .get(e as usize)
            .cloned()
            .unwrap_or_else(|| self.params.p().powu(e as u32))
    }

    pub fn q_pow(&self, e: i64) -> T {
        self.q_pow
            .get(e as usize)
            .cloned()
            .unwrap_or_else(|| self.params.q().powu(e as u32))
    }

    pub fn c(&self, a: i64, b: i64) -> T {
        self.binom.get(a, b)
    }

    pub fn boundary(&self) -> T {
        self.p_pow(self.params.rk())
    }
}

/// Runs `$body` with `$ctx` bound to a [`SumContext`] in the working number
/// mode for `$S`: rationals when exact, double-double otherwise.
macro_rules! in_working_mode {
    ($S:ty, $params:expr, $top:expr, |$ctx:ident| $body:expr) => {{
        if <$S as Scalar>::EXACT {
            let $ctx = &SumContext::<Rational>::new(&$params.cast::<Rational>(), $top);
            $body.map(|v| v.cast::<$S>())
        } else {
            let $ctx = &SumContext::<DoubleDouble>::new(&$params.cast::<DoubleDouble>(), $top);
            $body.map(|v| v.cast::<$S>())
        }
    }};
}
pub(crate) use in_working_mode;

fn to_cut<T: Scalar>(params: &RunParams<T>, n: i64, scheme: IndexScheme) -> i64 {
    match scheme {
        IndexScheme::Cut => n,
        IndexScheme::Full => n - params.rk(),
    }
}

/// Alternating double sum over `i` and `j` (Cut indexing):
/// `P_n = sum_i C(r+i-1, r-1) q^i p^{n+rk-i} sum_j (-1)^j C(i, j) C(n-jk-1, i-1)`.
pub fn pmf_fullsum_ch<S: Scalar>(params: &RunParams<S>, n: i64) -> S {
    let out: Result<S> = in_working_mode!(S, params, n + params.r() as i64, |ctx| Ok(fullsum_at(ctx, n)));
    out.expect("infallible")
}

pub(crate) fn fullsum_at<T: Scalar>(ctx: &SumContext<T>, n: i64) -> T {
    if n < 0 {
        return T::zero();
    }
    if n == 0 {
        return ctx.boundary();
    }
    let (k, r, rk) = (ctx.params.k() as i64, ctx.params.r() as i64, ctx.params.rk());
    T::sum_terms((0..=n).map(|i| {
        let inner = T::sum_terms((0..=i).map(|j| {
            let term = ctx.c(i, j) * ctx.c(n - j * k - 1, i - 1);
            if j % 2 == 0 {
                term
            } else {
                -term
            }
        }));
        ctx.c(r + i - 1, r - 1) * ctx.q_pow(i) * ctx.p_pow(n + rk - i) * inner
    }))
}

/// Result of [`pmf_nested_sum_counted`].
#[derive(Debug, Clone, PartialEq)]
pub struct NestedEval<S> {
    pub value: S,
    /// Number of bracket terms `(j, i)` visited.
    pub terms: u64,
}

/// Nested sum with `j` outermost:
/// `P_n = p^{rk} sum_j (-1)^j p^{jk} q^j C(r+j-1, r-1) sum_{i=0}^{r} C(r,i) C(n-jk-1, j+i-1) q^i`
/// with `n` in Cut indexing; Full indexing substitutes `n - rk`.
pub fn pmf_nested_sum<S: Scalar>(params: &RunParams<S>, n: i64, scheme: IndexScheme) -> S {
    pmf_nested_sum_counted(params, n, scheme).value
}

pub fn pmf_nested_sum_counted<S: Scalar>(params: &RunParams<S>, n: i64, scheme: IndexScheme) -> NestedEval<S> {
    let m = to_cut(params, n, scheme);
    let mut terms = 0;
    let out: Result<S> = in_working_mode!(S, params, m + params.r() as i64, |ctx| Ok(nested_at(ctx, m, &mut terms)));
    NestedEval {
        value: out.expect("infallible"),
        terms,
    }
}

pub(crate) fn nested_at<T: Scalar>(ctx: &SumContext<T>, n: i64, terms: &mut u64) -> T {
    if n < 0 {
        return T::zero();
    }
    if n == 0 {
        return ctx.boundary();
    }
    let (k, r) = (ctx.params.k() as i64, ctx.params.r() as i64);
    let sum = T::sum_terms((0..=(n - 1) / k).map(|j| {
        let bracket = T::sum_terms((0..=r).map(|i| {
            *terms += 1;
            ctx.c(r, i) * ctx.c(n - j * k - 1, j + i - 1) * ctx.q_pow(i)
        }));
        let term = ctx.p_pow(j * k) * ctx.q_pow(j) * ctx.c(r + j - 1, r - 1) * bracket;
        if j % 2 == 0 {
            term
        } else {
            -term
        }
    }));
    ctx.boundary() * sum
}

/// Hypergeometric form of the nested sum. The `j = 0` term is
/// `q r 2F1(1-n, 1-r; 2; q)`; terms `j >= 1` carry
/// `C(n-jk-1, j-1) 2F1(jk+j-n, -r; j; q)`.
pub fn pmf_hyp<S: Scalar>(params: &RunParams<S>, n: i64, scheme: IndexScheme) -> Result<S> {
    let m = to_cut(params, n, scheme);
    in_working_mode!(S, params, m + params.r() as i64, |ctx| hyp_at(ctx, m))
}

pub(crate) fn hyp_at<T: Scalar>(ctx: &SumContext<T>, n: i64) -> Result<T> {
    if n < 0 {
        return Ok(T::zero());
    }
    if n == 0 {
        return Ok(ctx.boundary());
    }
    let (k, r) = (ctx.params.k() as i64, ctx.params.r() as i64);
    let q = ctx.params.q();
    let mut terms = Vec::with_capacity(((n - 1) / k + 1) as usize);
    terms.push(q.clone() * T::from_i64(r) * Hyp2F1Spec::new(1 - n, 1 - r, 2)?.eval(q));
    for j in 1..=(n - 1) / k {
        let c = ctx.c(n - j * k - 1, j - 1);
        if c.is_zero() {
            continue;
        }
        let f = Hyp2F1Spec::new(j * k + j - n, -r, j)?.eval(q);
        let term = ctx.p_pow(j * k) * ctx.q_pow(j) * ctx.c(r + j - 1, r - 1) * c * f;
        terms.push(if j % 2 == 0 { term } else { -term });
    }
    Ok(ctx.boundary() * T::sum_terms(terms))
}

/// Coefficient of `s^n` in the expanded generating function (Full indexing):
/// `P_n = p^{rk} sum_j (-1)^{v-j} p^{v-j} C(r, v-j) G_j`, `v = n - rk`, with
/// `G_j = sum_{i <= j/(k+1)} (-1)^i q^i p^{ik} C(r+i-1, r-1) C(r+j-ik-1, r+i-1)`.
pub fn pmf_pgf_expansion<S: Scalar>(params: &RunParams<S>, n: i64) -> S {
    let v = n - params.rk();
    let out: Result<S> = in_working_mode!(S, params, v + params.r() as i64, |ctx| Ok(pgf_expansion_at(ctx, v)));
    out.expect("infallible")
}

/// The inner sum `G_j`: the coefficient of `s^j` in `(1 - s + q p^k s^{k+1})^{-r}`.
pub(crate) fn pgf_inner<T: Scalar>(ctx: &SumContext<T>, j: i64) -> T {
    let (k, r) = (ctx.params.k() as i64, ctx.params.r() as i64);
    T::sum_terms((0..=j / (k + 1)).map(|i| {
        let term = ctx.q_pow(i) * ctx.p_pow(i * k) * ctx.c(r + i - 1, r - 1) * ctx.c(r + j - i * k - 1, r + i - 1);
        if i % 2 == 0 {
            term
        } else {
            -term
        }
    }))
}

pub(crate) fn pgf_expansion_at<T: Scalar>(ctx: &SumContext<T>, v: i64) -> T {
    if v < 0 {
        return T::zero();
    }
    if v == 0 {
        return ctx.boundary();
    }
    let r = ctx.params.r() as i64;
    let sum = T::sum_terms((0..=v).filter(|j| v - j <= r).map(|j| {
        let term = ctx.p_pow(v - j) * ctx.c(r, v - j) * pgf_inner(ctx, j);
        if (v - j) % 2 == 0 {
            term
        } else {
            -term
        }
    }));
    ctx.boundary() * sum
}
