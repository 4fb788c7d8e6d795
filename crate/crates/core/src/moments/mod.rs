//! Factorial, raw and central moments of Type I `NB(k, r)`.
//!
//! Independent routes: the factorial-moment recurrence, the partition sums
//! over the coefficient families `C_j`, `F_j` (factorial) and `~C_j`, `~F_j`
//! (raw), the generating-function derivative sum in [`pgf`], the root-based
//! sum in [`crate::roots`], and direct summation over a pmf table.

pub mod pgf;

pub use pgf::{factorial_moments_pgf, factorial_moments_pgf_partial, PgfMoments};

use rug::Integer;

use crate::error::{Error, Result};
use crate::model::{IndexScheme, MomentKind, MomentSet, PmfTable, RunParams};
use crate::scalar::Scalar;
use crate::special::{binom, factorial, falling, stirling2_table, BinomialConvention, EulerianTable, Hyp2F1Spec};

fn c_int<S: Scalar>(a: i64, b: i64) -> S {
    S::from_integer(&binom(a, b, BinomialConvention::ZeroOnNegativeTop))
}

fn fact<S: Scalar>(n: u32) -> S {
    S::from_integer(&factorial(n))
}

fn check_j(j: u32) -> Result<()> {
    if j == 0 {
        return Err(Error::Precondition("coefficient index starts at 1".into()));
    }
    Ok(())
}

/// `C_j`, the Cut-indexing factorial-moment coefficient:
/// `j!/(q^j p^k) [p^{j-1}(1-p^k) - p^k sum_{i=1}^{j-1} C(k,i) p^{j-i-1} q^i] - (k)_j`.
///
/// Well defined for every `j >= 1`; it vanishes for `j > k`.
pub fn coeff_c<S: Scalar>(params: &RunParams<S>, j: u32) -> Result<S> {
    check_j(j)?;
    let (p, q, pk) = (params.p(), params.q(), params.pk());
    let k = params.k() as i64;
    let tail = S::sum_terms((1..j).map(|i| c_int::<S>(k, i as i64) * p.powu(j - i - 1) * q.powu(i)));
    let bracket = p.powu(j - 1) * (S::one() - pk.clone()) - pk.clone() * tail;
    Ok(fact::<S>(j) / (q.powu(j) * pk) * bracket - falling(&S::from_i64(k), j))
}

/// `F_j`, the Full-indexing factorial-moment coefficient:
/// `j!/(q^j p^k) [p^{j-1}(1-p^k) + sum_{i=1}^{j-1} (-1)^i C(k+i-1, i) p^{j-i-1} q^i]`.
pub fn coeff_f<S: Scalar>(params: &RunParams<S>, j: u32) -> Result<S> {
    check_j(j)?;
    let (p, q, pk) = (params.p(), params.q(), params.pk());
    let k = params.k() as i64;
    let tail = S::sum_terms((1..j).map(|i| {
        let term = c_int::<S>(k + i as i64 - 1, i as i64) * p.powu(j - i - 1) * q.powu(i);
        if i % 2 == 0 {
            term
        } else {
            -term
        }
    }));
    let bracket = p.powu(j - 1) * (S::one() - pk.clone()) + tail;
    Ok(fact::<S>(j) / (q.powu(j) * pk) * bracket)
}

/// `C_j` through `2F1(1-j, 1; k-j+2; -p/q)`. The series has a vanishing
/// denominator for `j >= k + 2`, which is reported as an error.
pub fn coeff_c_hyp<S: Scalar>(params: &RunParams<S>, j: u32) -> Result<S> {
    check_j(j)?;
    let (p, q, pk) = (params.p(), params.q(), params.pk());
    let (k, ji) = (params.k() as i64, j as i64);
    let z = -(p.clone() / q.clone());
    let hyp = Hyp2F1Spec::new(1 - ji, 1, k - ji + 2)?.eval(&z);
    let bracket = p.powu(j - 1) - c_int::<S>(k, ji - 1) * pk.clone() * q.powu(j - 1) * hyp;
    Ok(fact::<S>(j) / (q.powu(j) * pk) * bracket - falling(&S::from_i64(k), j))
}

/// `F_j` through `2F1(1-j, 1; 2-j-k; -p/q)`.
pub fn coeff_f_hyp<S: Scalar>(params: &RunParams<S>, j: u32) -> Result<S> {
    check_j(j)?;
    let (p, q, pk) = (params.p(), params.q(), params.pk());
    let (k, ji) = (params.k() as i64, j as i64);
    let z = -(p.clone() / q.clone());
    let hyp = Hyp2F1Spec::new(1 - ji, 1, 2 - ji - k)?.eval(&z);
    let mut second = c_int::<S>(k + ji - 2, ji - 1) * q.powu(j - 1) * hyp;
    if (j - 1) % 2 == 1 {
        second = -second;
    }
    let bracket = second - p.powu(params.k() + j - 1);
    Ok(fact::<S>(j) / (q.powu(j) * pk) * bracket)
}

/// `mu_(j) = C_j p^k / (1 - p^k)`, the factorial moment of the truncated
/// geometric law that appears in the factorial-moment recurrence.
pub fn mu_falling<S: Scalar>(params: &RunParams<S>, j: u32) -> Result<S> {
    let pk = params.pk();
    Ok(coeff_c(params, j)? * pk.clone() / (S::one() - pk))
}

/// Raw-moment coefficients: `~C_j = xi_j / (q^j p^k)` (Cut) with
/// `xi_j = (1-p^k) A_j(p) - p^k sum_{i=1}^{j} C(j,i) (kq)^i A_{j-i}(p)`, and
/// `~F_j = chi_j / (q^j p^k)` (Full) with
/// `chi_j = (1-p^k) A_j(p) + sum_{i=1}^{j-1} (-1)^i C(j,i) (kq)^i A_{j-i}(p)`.
pub fn coeff_raw<S: Scalar>(params: &RunParams<S>, j: u32, scheme: IndexScheme, table: &EulerianTable) -> Result<S> {
    check_j(j)?;
    let (p, q, pk) = (params.p(), params.q(), params.pk());
    let kq = S::from_i64(params.k() as i64) * q.clone();
    let a = |i: u32| table.poly(i as usize, p);
    let ji = j as i64;
    let lead = (S::one() - pk.clone()) * a(j)?;
    let numerator = match scheme {
        IndexScheme::Cut => {
            let mut tail = Vec::with_capacity(j as usize);
            for i in 1..=j {
                tail.push(c_int::<S>(ji, i as i64) * kq.powu(i) * a(j - i)?);
            }
            lead - pk.clone() * S::sum_terms(tail)
        }
        IndexScheme::Full => {
            let mut tail = Vec::with_capacity(j as usize);
            for i in 1..j {
                let term = c_int::<S>(ji, i as i64) * kq.powu(i) * a(j - i)?;
                tail.push(if i % 2 == 0 { term } else { -term });
            }
            lead + S::sum_terms(tail)
        }
    };
    Ok(numerator / (q.powu(j) * pk))
}

/// The four coefficient families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientFamily {
    C,
    F,
    CTilde,
    FTilde,
}

impl CoefficientFamily {
    pub fn for_moments(kind: MomentKind, scheme: IndexScheme) -> Result<Self> {
        match (kind, scheme) {
            (MomentKind::Factorial, IndexScheme::Cut) => Ok(Self::C),
            (MomentKind::Factorial, IndexScheme::Full) => Ok(Self::F),
            (MomentKind::Raw, IndexScheme::Cut) => Ok(Self::CTilde),
            (MomentKind::Raw, IndexScheme::Full) => Ok(Self::FTilde),
            (MomentKind::Central, _) => Err(Error::OrderMismatch("central moments have no coefficient family".into())),
        }
    }
}

/// `X_1, ..., X_count` of `family`.
pub fn coefficients<S: Scalar>(params: &RunParams<S>, family: CoefficientFamily, count: usize) -> Result<Vec<S>> {
    let table = EulerianTable::new(count);
    (1..=count as u32)
        .map(|j| match family {
            CoefficientFamily::C => coeff_c(params, j),
            CoefficientFamily::F => coeff_f(params, j),
            CoefficientFamily::CTilde => coeff_raw(params, j, IndexScheme::Cut, &table),
            CoefficientFamily::FTilde => coeff_raw(params, j, IndexScheme::Full, &table),
        })
        .collect()
}

fn check_order(order_max: usize) -> Result<()> {
    if order_max == 0 {
        return Err(Error::Precondition("order must be at least 1".into()));
    }
    Ok(())
}

/// Cut-indexing factorial moments from
/// `M_(n) = (1/n) sum_{j=1}^{min(n,k)} C(n,j) (n + rj - j) C_j M_(n-j)`.
pub fn factorial_moments_recurrence<S: Scalar>(params: &RunParams<S>, order_max: usize) -> Result<MomentSet<S>> {
    check_order(order_max)?;
    let (k, r) = (params.k() as i64, params.r() as i64);
    let c = coefficients(params, CoefficientFamily::C, order_max.min(k as usize))?;
    let mut m = vec![S::one()];
    for n in 1..=order_max as i64 {
        let sum = S::sum_terms((1..=n.min(k)).map(|j| {
            c_int::<S>(n, j) * S::from_i64(n + r * j - j) * c[j as usize - 1].clone() * m[(n - j) as usize].clone()
        }));
        m.push(sum / S::from_i64(n));
    }
    m.remove(0);
    Ok(MomentSet::new(MomentKind::Factorial, IndexScheme::Cut, m))
}

/// `n! sum (r+s-1)_s prod_j (1/n_j!) (X_j/j!)^{n_j}` over
/// `n_1 + 2 n_2 + ... + n n_n = n`, `s = n_1 + ... + n_n`.
///
/// `x[j-1]` is `X_j`; parts larger than `x.len()` are not used.
pub fn partition_sum<S: Scalar>(r: u32, n: usize, x: &[S]) -> S {
    // scaled[j-1] = X_j / j!
    let scaled: Vec<S> = x.iter().enumerate().map(|(i, v)| v.clone() / fact::<S>(i as u32 + 1)).collect();
    let mut terms = Vec::new();
    let mut counts = vec![0u32; n + 1];
    descend(n, n.min(x.len()), &mut counts, &scaled, r, &mut terms);
    fact::<S>(n as u32) * S::sum_terms(terms)
}

/// Recursive descent over part sizes `largest, largest-1, ..., 1`.
fn descend<S: Scalar>(remaining: usize, largest: usize, counts: &mut [u32], scaled: &[S], r: u32, out: &mut Vec<S>) {
    if remaining == 0 {
        let s: u32 = counts.iter().sum();
        let mut term = S::from_integer(&rising_int(r, s));
        for (j, &nj) in counts.iter().enumerate().skip(1) {
            if nj > 0 {
                term = term * scaled[j - 1].powu(nj) / fact::<S>(nj);
            }
        }
        out.push(term);
        return;
    }
    if largest == 0 {
        return;
    }
    for nj in (0..=remaining / largest).rev() {
        counts[largest] = nj as u32;
        descend(remaining - nj * largest, largest - 1, counts, scaled, r, out);
    }
    counts[largest] = 0;
}

/// `(r+s-1)_s = r (r+1) ... (r+s-1)`.
fn rising_int(r: u32, s: u32) -> Integer {
    (0..s).fold(Integer::from(1), |acc, t| acc * (r + t))
}

/// Factorial moments from the partition sum with `X = C` (Cut) or `F` (Full).
///
/// The sum runs over parts `1..=n`: `C_j` vanishes for `j > k`, but `F_j`
/// does not, and dropping those parts would be wrong for `n > k`.
pub fn factorial_moments_partition<S: Scalar>(params: &RunParams<S>, order_max: usize, scheme: IndexScheme) -> Result<MomentSet<S>> {
    check_order(order_max)?;
    let family = CoefficientFamily::for_moments(MomentKind::Factorial, scheme)?;
    let x = coefficients(params, family, order_max)?;
    let values = (1..=order_max).map(|n| partition_sum(params.r(), n, &x)).collect();
    Ok(MomentSet::new(MomentKind::Factorial, scheme, values))
}

/// Raw moments from the partition sum with `X = ~C` (Cut) or `~F` (Full).
pub fn raw_moments_partition<S: Scalar>(
    params: &RunParams<S>,
    order_max: usize,
    scheme: IndexScheme,
    table: &EulerianTable,
) -> Result<MomentSet<S>> {
    check_order(order_max)?;
    if order_max > table.max_order() {
        return Err(Error::OrderExceedsTable {
            order: order_max,
            max: table.max_order(),
        });
    }
    let x = (1..=order_max as u32)
        .map(|j| coeff_raw(params, j, scheme, table))
        .collect::<Result<Vec<S>>>()?;
    let values = (1..=order_max).map(|n| partition_sum(params.r(), n, &x)).collect();
    Ok(MomentSet::new(MomentKind::Raw, scheme, values))
}

/// Factorial or raw moments by direct summation over `table` (in its own
/// indexing scheme).
pub fn moments_from_pmf<S: Scalar>(table: &PmfTable<S>, order_max: usize, kind: MomentKind) -> Result<MomentSet<S>> {
    check_order(order_max)?;
    let values = (1..=order_max as u32)
        .map(|i| {
            S::sum_terms(table.iter().map(|(n, v)| {
                let n = S::from_i64(n);
                let weight = match kind {
                    MomentKind::Factorial => falling(&n, i),
                    _ => n.powu(i),
                };
                weight * v.clone()
            }))
        })
        .collect::<Vec<S>>();
    match kind {
        MomentKind::Central => {
            let raw = MomentSet::new(MomentKind::Raw, table.scheme, values);
            Ok(central_from_raw(&raw))
        }
        _ => Ok(MomentSet::new(kind, table.scheme, values)),
    }
}

/// Raw moments from factorial ones: `M_n = sum_j S(n, j) M_(j)`.
pub fn raw_from_factorial<S: Scalar>(moments: &MomentSet<S>) -> Result<MomentSet<S>> {
    if moments.kind != MomentKind::Factorial {
        return Err(Error::OrderMismatch("expected factorial moments".into()));
    }
    let stirling = stirling2_table(moments.order_max());
    let values = (1..=moments.order_max())
        .map(|n| S::sum_terms((1..=n).map(|j| S::from_integer(&stirling[n][j]) * moments.order(j))))
        .collect();
    Ok(MomentSet::new(MomentKind::Raw, moments.scheme, values))
}

/// Central moments from raw ones (about the mean), binomial expansion.
pub fn central_from_raw<S: Scalar>(raw: &MomentSet<S>) -> MomentSet<S> {
    let mean = raw.order(1);
    let values = (1..=raw.order_max())
        .map(|n| {
            S::sum_terms((0..=n).map(|i| {
                let term = c_int::<S>(n as i64, i as i64) * raw.order(n - i) * mean.powu(i as u32);
                if i % 2 == 0 {
                    term
                } else {
                    -term
                }
            }))
        })
        .collect();
    MomentSet::new(MomentKind::Central, raw.scheme, values)
}

/// Central moments of orders `1..=order_max <= 4` from the raw coefficients:
/// `M_2 = r(X_1^2 + X_2)`, `M_3 = r(2X_1^3 + 3X_1X_2 + X_3)`,
/// `M_4 = 3 sigma^4 + r(6X_1^4 + 12X_1^2X_2 + 3X_2^2 + 4X_1X_3 + X_4)`.
///
/// `X = ~C`; the Cut and Full families give identical results.
pub fn central_moments<S: Scalar>(params: &RunParams<S>, order_max: usize) -> Result<MomentSet<S>> {
    central_moments_with(params, order_max, CoefficientFamily::CTilde)
}

/// [`central_moments`] from a chosen raw family.
pub fn central_moments_with<S: Scalar>(params: &RunParams<S>, order_max: usize, family: CoefficientFamily) -> Result<MomentSet<S>> {
    check_order(order_max)?;
    if order_max > 4 {
        return Err(Error::Precondition(format!("central moments are available up to order 4, not {order_max}")));
    }
    if !matches!(family, CoefficientFamily::CTilde | CoefficientFamily::FTilde) {
        return Err(Error::Precondition("central moments need a raw coefficient family".into()));
    }
    let x = coefficients(params, family, 4)?;
    let r = S::from_i64(params.r() as i64);
    let int = |v: i64| S::from_i64(v);
    let (x1, x2, x3, x4) = (x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone());
    let variance = r.clone() * (x1.powu(2) + x2.clone());
    let third = r.clone() * (int(2) * x1.powu(3) + int(3) * x1.clone() * x2.clone() + x3.clone());
    let fourth = int(3) * variance.powu(2)
        + r * (int(6) * x1.powu(4) + int(12) * x1.powu(2) * x2.clone() + int(3) * x2.powu(2) + int(4) * x1 * x3 + x4);
    let values = [S::zero(), variance, third, fourth];
    Ok(MomentSet::new(MomentKind::Central, IndexScheme::Full, values[..order_max].to_vec()))
}

/// Skewness `M_3 / sigma^3` and excess kurtosis `(M_4 - 3 sigma^4) / sigma^4`.
pub fn skewness_kurtosis<S: Scalar>(params: &RunParams<S>) -> Result<(f64, f64)> {
    let central = central_moments(params, 4)?;
    let (m2, m3, m4) = (central.order(2), central.order(3), central.order(4));
    let skew = m3.to_f64() / m2.to_f64().powf(1.5);
    let excess = ((m4 - S::from_i64(3) * m2.powu(2)) / m2.powu(2)).to_f64();
    Ok((skew, excess))
}

/// Closed-form mean: `r (1 - p^k)/(q p^k)` (Full), less `rk` under Cut.
pub fn mean_closed_form<S: Scalar>(params: &RunParams<S>, scheme: IndexScheme) -> S {
    let pk = params.pk();
    let full = S::from_i64(params.r() as i64) * (S::one() - pk) / params.qpk();
    match scheme {
        IndexScheme::Full => full,
        IndexScheme::Cut => full - S::from_i64(params.rk()),
    }
}

/// Closed-form variance: `r [1/(qp^k)^2 - (2k+1)/(qp^k) - p/q^2]`.
pub fn variance_closed_form<S: Scalar>(params: &RunParams<S>) -> S {
    let x = params.qpk();
    let k = params.k() as i64;
    let bracket = S::one() / x.powu(2) - S::from_i64(2 * k + 1) / x - params.p().clone() / params.q().powu(2);
    S::from_i64(params.r() as i64) * bracket
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::shift_factorial_moments;
    use crate::pmf::pmf_recurrence_pg;
    use rug::Rational;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn exact(k: u32, r: u32, n: i64, d: i64) -> RunParams<Rational> {
        RunParams::new(k, r, rat(n, d)).unwrap()
    }

    #[test]
    fn first_coefficients() {
        assert_eq!(coeff_c(&exact(1, 1, 1, 2), 1).unwrap(), 1);
        assert_eq!(coeff_f(&exact(2, 1, 1, 2), 1).unwrap(), 6);
        for (k, p) in [(1, rat(1, 3)), (3, rat(3, 4)), (5, rat(1, 10))] {
            let params = RunParams::new(k, 2, p).unwrap();
            let c1 = coeff_c(&params, 1).unwrap();
            let f1 = coeff_f(&params, 1).unwrap();
            let pk = params.pk();
            assert_eq!(f1.clone(), (Rational::from(1) - pk) / params.qpk());
            assert_eq!(f1.clone() - c1.clone(), Rational::from(k));
            let table = EulerianTable::new(4);
            assert_eq!(coeff_raw(&params, 1, IndexScheme::Cut, &table).unwrap(), c1);
            assert_eq!(coeff_raw(&params, 1, IndexScheme::Full, &table).unwrap(), f1);
        }
    }

    #[test]
    fn hypergeometric_coefficients_agree() {
        for k in 1..=6 {
            for p in [rat(1, 5), rat(1, 2), rat(7, 9)] {
                let params = RunParams::new(k, 1, p).unwrap();
                for j in 1..=k {
                    assert_eq!(coeff_c_hyp(&params, j).unwrap(), coeff_c(&params, j).unwrap());
                    assert_eq!(coeff_f_hyp(&params, j).unwrap(), coeff_f(&params, j).unwrap());
                }
                assert_eq!(coeff_f_hyp(&params, k + 3).unwrap(), coeff_f(&params, k + 3).unwrap());
                assert!(coeff_c_hyp(&params, k + 2).is_err());
            }
        }
    }

    #[test]
    fn c_vanishes_beyond_k() {
        let params = exact(3, 2, 2, 5);
        for j in 4..=8 {
            assert_eq!(coeff_c(&params, j).unwrap(), 0);
        }
    }

    #[test]
    fn low_order_recurrence() {
        let params = exact(3, 2, 2, 5);
        let m = factorial_moments_recurrence(&params, 2).unwrap();
        let (c1, c2) = (coeff_c(&params, 1).unwrap(), coeff_c(&params, 2).unwrap());
        assert_eq!(m.order(1), Rational::from(2) * c1.clone());
        assert_eq!(m.order(2), Rational::from(6) * c1.clone() * c1 + Rational::from(2) * c2);
    }

    #[test]
    fn mu_falling_matches_truncated_geometric() {
        // j = 1: mean number of leading successes in a failed run attempt
        let params = exact(2, 1, 1, 2);
        assert_eq!(mu_falling(&params, 1).unwrap(), coeff_c(&params, 1).unwrap() / Rational::from(3));
    }

    #[test]
    fn routes_agree_exactly() {
        for (k, r, n, d) in [(1, 1, 1, 2), (2, 3, 1, 3), (3, 2, 3, 4), (4, 1, 1, 5)] {
            let params = exact(k, r, n, d);
            let rec = factorial_moments_recurrence(&params, 6).unwrap();
            let part_c = factorial_moments_partition(&params, 6, IndexScheme::Cut).unwrap();
            assert_eq!(rec.values, part_c.values);
            let part_f = factorial_moments_partition(&params, 6, IndexScheme::Full).unwrap();
            assert_eq!(shift_factorial_moments(&rec, &params).unwrap().values, part_f.values);
            let table = EulerianTable::new(6);
            for scheme in [IndexScheme::Cut, IndexScheme::Full] {
                let raw = raw_moments_partition(&params, 6, scheme, &table).unwrap();
                let fac = factorial_moments_partition(&params, 6, scheme).unwrap();
                assert_eq!(raw.values, raw_from_factorial(&fac).unwrap().values);
            }
        }
    }

    #[test]
    fn pair_of_successes_desk_check() {
        let params = exact(2, 1, 1, 2);
        let table = EulerianTable::new(4);
        let raw = raw_moments_partition(&params, 2, IndexScheme::Full, &table).unwrap();
        assert_eq!(raw.values, vec![Rational::from(6), Rational::from(58)]);
        assert_eq!(central_moments(&params, 2).unwrap().order(2), 22);
        assert_eq!(variance_closed_form(&params), 22);
        assert_eq!(mean_closed_form(&params, IndexScheme::Full), 6);
        let part = factorial_moments_partition(&params, 1, IndexScheme::Full).unwrap();
        assert_eq!(part.order(1), 6);
    }

    #[test]
    fn central_families_agree() {
        for (k, r) in [(1, 1), (2, 3), (4, 2)] {
            let params = exact(k, r, 2, 7);
            assert_eq!(
                central_moments_with(&params, 4, CoefficientFamily::CTilde).unwrap(),
                central_moments_with(&params, 4, CoefficientFamily::FTilde).unwrap()
            );
            let table = EulerianTable::new(4);
            let raw = raw_moments_partition(&params, 4, IndexScheme::Cut, &table).unwrap();
            assert_eq!(central_from_raw(&raw).values, central_moments(&params, 4).unwrap().values);
        }
        assert!(central_moments(&exact(2, 1, 1, 2), 5).is_err());
    }

    #[test]
    fn geometric_skewness() {
        let params = RunParams::new(1, 1, 0.5).unwrap();
        let (skew, excess) = skewness_kurtosis(&params).unwrap();
        assert!((skew - 1.5 / 0.5f64.sqrt()).abs() < 1e-12);
        // geometric excess kurtosis 6 + p^2/q
        assert!((excess - 6.5).abs() < 1e-12);
    }

    #[test]
    fn summation_agrees_with_closed_forms() {
        let params = RunParams::new(2, 2, 0.5).unwrap();
        let table = pmf_recurrence_pg(&params, 2000);
        let sum = moments_from_pmf(&table, 3, MomentKind::Factorial).unwrap();
        let part = factorial_moments_partition(&params, 3, IndexScheme::Full).unwrap();
        for i in 1..=3 {
            assert!((sum.order(i) / part.order(i) - 1.0).abs() < 1e-12);
        }
        let central = moments_from_pmf(&table, 4, MomentKind::Central).unwrap();
        let closed = central_moments(&params, 4).unwrap();
        for i in 2..=4 {
            assert!((central.order(i) / closed.order(i) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn geometric_factorial_moments_by_summation() {
        let params = RunParams::new(1, 1, 0.5).unwrap();
        let table = pmf_recurrence_pg(&params, 200).reindexed(IndexScheme::Cut);
        let sum = moments_from_pmf(&table, 3, MomentKind::Factorial).unwrap();
        let rec = factorial_moments_recurrence(&params, 3).unwrap();
        for i in 1..=3 {
            assert!((sum.order(i) - rec.order(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn partition_sum_low_orders() {
        let x = vec![rat(2, 3), rat(5, 7), rat(1, 11)];
        assert_eq!(partition_sum(3, 1, &x), Rational::from(3) * x[0].clone());
        let expected = Rational::from(12) * x[0].clone() * x[0].clone() + Rational::from(3) * x[1].clone();
        assert_eq!(partition_sum(3, 2, &x), expected);
    }
}
