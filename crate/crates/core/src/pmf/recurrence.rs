//! Recurrence engines. Both keep only the last `k` values in play, so a
//! range costs `O(k)` per point.

use crate::model::{IndexScheme, PmfTable, RunParams, VariantSpec};
use crate::scalar::Scalar;

/// Full-indexing table on `rk..=n_max` from
/// `P_n = (q/p)/(n - rk) * sum_{j=1}^{k} (n - rk + j(r-1)) p^j P_{n-j}`.
///
/// When `n_max < rk` the table holds the single boundary value `p^{rk}`.
pub fn pmf_recurrence_pg<S: Scalar>(params: &RunParams<S>, n_max: i64) -> PmfTable<S> {
    let (k, r, rk) = (params.k() as i64, params.r() as i64, params.rk());
    let ratio = params.q().clone() / params.p().clone();
    let p_pow: Vec<S> = (0..=k as u32).map(|j| params.p().powu(j)).collect();
    let mut values = vec![params.p().powu(params.rk() as u32)];
    for n in rk + 1..=n_max {
        let terms = (1..=k).filter(|&j| n - j >= rk).map(|j| {
            let weight = S::from_i64(n - rk + j * (r - 1));
            weight * p_pow[j as usize].clone() * values[(n - j - rk) as usize].clone()
        });
        let sum = S::sum_terms(terms);
        values.push(ratio.clone() * sum / S::from_i64(n - rk));
    }
    PmfTable {
        params: params.clone(),
        scheme: IndexScheme::Full,
        variant: VariantSpec::type1(),
        n_min: rk,
        values,
    }
}

/// Cut-indexing table on `0..=n_max` from `P_0 = p^{rk}` and
/// `P_n = (q/p)/n * sum_{j=1}^{min(n,k)} (n + rj - j) p^j P_{n-j}`.
pub fn pmf_recurrence_ch<S: Scalar>(params: &RunParams<S>, n_max: i64) -> PmfTable<S> {
    let (k, r) = (params.k() as i64, params.r() as i64);
    let ratio = params.q().clone() / params.p().clone();
    let p_pow: Vec<S> = (0..=k as u32).map(|j| params.p().powu(j)).collect();
    let mut values = vec![params.p().powu(params.rk() as u32)];
    for n in 1..=n_max {
        let terms = (1..=n.min(k)).map(|j| {
            S::from_i64(n + r * j - j) * p_pow[j as usize].clone() * values[(n - j) as usize].clone()
        });
        let sum = S::sum_terms(terms);
        values.push(ratio.clone() * sum / S::from_i64(n));
    }
    PmfTable {
        params: params.clone(),
        scheme: IndexScheme::Cut,
        variant: VariantSpec::type1(),
        n_min: 0,
        values,
    }
}
