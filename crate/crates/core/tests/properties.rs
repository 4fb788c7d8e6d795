use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};

use runsdist::model::shift_factorial_moments;
use runsdist::moments::{
    central_moments, factorial_moments_partition, mean_closed_form, raw_from_factorial, raw_moments_partition,
    variance_closed_form,
};
use runsdist::oracle::{dp_waiting_time_pmf, monte_carlo, CountingSemantics};
use runsdist::pmf::{pmf_recurrence_pg, pmf_table, PmfEngineId};
use runsdist::roots::{overlap_series, RootModel};
use runsdist::special::{binom, factorial, hyp2f1_terminating, BinomialConvention, Binomials, EulerianTable};
use runsdist::{IndexScheme, RunParams, VariantSpec};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// The defining series summed term by term until a numerator factor vanishes.
fn naive_hyp(a: i64, b: i64, c: i64, z: &Rational) -> Rational {
    let mut sum = Rational::new();
    let mut t = 0i64;
    loop {
        let mut term = Rational::from(1);
        for s in 0..t {
            term *= Rational::from((a + s) * (b + s));
            term /= Rational::from((c + s) * (s + 1));
            term *= z;
        }
        if term == 0 {
            return sum;
        }
        sum += term;
        t += 1;
    }
}

#[test]
fn eulerian_rows() {
    let table = EulerianTable::new(12);
    assert_eq!(table, EulerianTable::by_recurrence(12));
    for i in 1..=12 {
        let row = table.row(i).unwrap();
        let total: Integer = row.iter().sum();
        assert_eq!(total, factorial(i as u32));
        assert!(row.iter().eq(row.iter().rev()));
    }
}

#[test]
fn difference_identity_for_positive_arguments() {
    let conv = BinomialConvention::ZeroOnNegativeTop;
    for i in 1..=50 {
        for j in 1..=50 {
            assert_eq!(binom(i - 1, j - 1, conv), binom(i, j, conv) - binom(i - 1, j, conv), "i={i} j={j}");
        }
    }
}

#[test]
fn pascal_table_matches_integer_binomials() {
    let table = Binomials::<Rational>::new(120);
    for a in 0..=120i64 {
        for b in 0..=a {
            let expected = Integer::from(a).binomial(b as u32);
            assert_eq!(table.get(a, b), Rational::from(expected));
        }
    }
}

#[test]
fn first_order_reduces_to_classic_negative_binomial() {
    for p in [Rational::from((1, 3)), Rational::from((7, 10))] {
        for r in 1..=4u32 {
            let params = RunParams::new(1, r, p.clone()).unwrap();
            let table = pmf_recurrence_pg(&params, 100);
            let q: Rational = 1 - p.clone();
            for n in r as i64..=100 {
                let expected = Rational::from(Integer::from(n - 1).binomial(r - 1))
                    * p.clone().pow(r as i32)
                    * q.clone().pow((n - r as i64) as i32);
                assert_eq!(table.get_or_zero(n), expected);
            }
        }
    }
}

#[test]
fn overlap_zero_series_is_the_type1_pmf() {
    for (k, p) in [(1, 0.3), (2, 0.5), (4, 0.7)] {
        for r in 1..=4 {
            let params = RunParams::new(k, r, p).unwrap();
            let series = overlap_series(&params, 0, 100).unwrap();
            let table = pmf_recurrence_pg(&params, 100);
            for (n, v) in series.iter().enumerate() {
                assert!((v - table.get_or_zero(n as i64)).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn overlapping_runs_give_distributions() {
    for (k, p) in [(2, 0.5), (3, 0.4), (4, 0.75)] {
        for ell in 1..k {
            for r in 1..=3 {
                let params = RunParams::new(k, r, p).unwrap();
                let model = RootModel::new(&params, ell as i64).unwrap();
                let fm = model.factorial_moments(2).unwrap();
                let mean = fm.order(1);
                let sd = (fm.order(2) + mean - mean * mean).sqrt();
                let n_max = (mean + 20.0 * sd).ceil() as usize;
                let series = overlap_series(&params, ell, n_max).unwrap();
                assert!(series.iter().all(|v| *v >= -1e-15));
                let mass: f64 = series.iter().sum();
                assert!(mass >= 1.0 - 1e-6, "k={k} l={ell} r={r}: {mass}");
            }
        }
    }
}

#[test]
fn dp_deficit_is_unabsorbed_mass() {
    let params = RunParams::new(3, 2, Rational::from((2, 5))).unwrap();
    for semantics in [CountingSemantics::NonOverlapping, CountingSemantics::Overlap(2), CountingSemantics::Gap(2)] {
        let dp = dp_waiting_time_pmf(&params, semantics, 40).unwrap();
        assert_eq!(dp.table.mass() + dp.deficit.clone(), 1);
        assert!(dp.table.values.iter().all(|v| *v >= 0));
    }
}

#[test]
fn simulation_histogram_counts_samples() {
    let params = RunParams::new(2, 2, 0.6).unwrap();
    let report = monte_carlo(&params, CountingSemantics::AtLeastOneFailureBetween, 12_345, 3).unwrap();
    assert_eq!(report.histogram.values().sum::<u64>(), 12_345);
    assert_eq!(report, monte_carlo(&params, CountingSemantics::AtLeastOneFailureBetween, 12_345, 3).unwrap());
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (1i64..100, 1i64..100).prop_map(|(n, d)| Rational::from((n, n + d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn hypergeometric_matches_naive_series(a in -15i64..=0, b in -15i64..=15, c in 1i64..=20, zn in -50i64..=50, zd in 1i64..=30) {
        let z = Rational::from((zn, zd));
        let fast: Rational = hyp2f1_terminating(a, b, c, &z).unwrap();
        prop_assert_eq!(fast, naive_hyp(a, b, c, &z));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pascal_rule(a in 1i64..300, frac in 0.0f64..=1.0) {
        let b = (frac * a as f64).round() as i64;
        let conv = BinomialConvention::ZeroOnNegativeTop;
        prop_assert_eq!(binom(a, b, conv), binom(a - 1, b - 1, conv) + binom(a - 1, b, conv));
    }

    #[test]
    fn pmf_is_a_distribution(k in 1u32..=5, r in 1u32..=4, p in 0.15f64..0.95) {
        let params = RunParams::new(k, r, p).unwrap();
        let mean = mean_closed_form(&params, IndexScheme::Full);
        let sd = variance_closed_form(&params).sqrt();
        let table = pmf_recurrence_pg(&params, (mean + 20.0 * sd).ceil() as i64);
        prop_assert!(table.values.iter().all(|v| *v >= -1e-15));
        prop_assert!((0..params.rk()).all(|n| table.get_or_zero(n) == 0.0));
        prop_assert!(table.mass() >= 1.0 - 1e-6);
        for engine in PmfEngineId::TYPE1 {
            let hi = params.rk() + 30;
            let t = pmf_table(engine, &params, IndexScheme::Full, VariantSpec::type1(), 0, hi).unwrap();
            prop_assert!(t.values.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn stirling_transform_of_factorial_moments(k in 1u32..=4, r in 1u32..=3, p in 0.2f64..0.9) {
        let params = RunParams::new(k, r, p).unwrap();
        let table = EulerianTable::new(5);
        let raw = raw_moments_partition(&params, 5, IndexScheme::Full, &table).unwrap();
        let via = raw_from_factorial(&factorial_moments_partition(&params, 5, IndexScheme::Full).unwrap()).unwrap();
        for n in 1..=5 {
            prop_assert!(rel(via.order(n), raw.order(n)) <= 1e-10);
        }
    }

    #[test]
    fn scheme_and_linearity_identities(k in 1u32..=4, r in 1u32..=4, p in small_rational()) {
        let params = RunParams::new(k, r, p.clone()).unwrap();
        let full = factorial_moments_partition(&params, 6, IndexScheme::Full).unwrap();
        let cut = factorial_moments_partition(&params, 6, IndexScheme::Cut).unwrap();
        prop_assert_eq!(&shift_factorial_moments(&cut, &params).unwrap().values, &full.values);

        let var = |m: &runsdist::MomentSet<Rational>| m.order(2) + m.order(1) - m.order(1).square();
        prop_assert_eq!(var(&full), var(&cut));

        let one = central_moments(&params.with_r(1).unwrap(), 4).unwrap();
        let many = central_moments(&params, 4).unwrap();
        let excess = |m: &runsdist::MomentSet<Rational>| m.order(4) - Rational::from(3) * m.order(2).square();
        prop_assert_eq!(excess(&many), Rational::from(r) * excess(&one));
        prop_assert_eq!(many.order(2), Rational::from(r) * one.order(2));
    }

    #[test]
    fn gap_pmf_is_a_shift(k in 1u32..=3, r in 1u32..=3, g in 1u32..=3, p in small_rational()) {
        let params = RunParams::new(k, r, p).unwrap();
        let base = dp_waiting_time_pmf(&params, CountingSemantics::NonOverlapping, 30).unwrap().table;
        let gap = pmf_table(PmfEngineId::RecurrencePG, &params, IndexScheme::Full, VariantSpec::gap(g), 0, 30).unwrap();
        let shift = (r as i64 - 1) * g as i64;
        for n in 0..=30 {
            prop_assert_eq!(gap.get_or_zero(n), base.get_or_zero(n - shift));
        }
    }
}

#[test]
fn float_tables_never_go_negative() {
    let params = RunParams::new(5, 4, 0.1).unwrap();
    for engine in PmfEngineId::TYPE1 {
        let t = pmf_table(engine, &params, IndexScheme::Cut, VariantSpec::type1(), 0, 60).unwrap();
        assert!(t.values.iter().all(|v| *v >= 0.0), "{engine}");
    }
}
