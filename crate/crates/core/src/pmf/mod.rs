//! Probability mass function engines.
//!
//! Every Type I engine is an independent route to the same numbers; they are
//! cross-checked against each other and against the enumeration oracle.

pub mod muselli;
pub mod recurrence;
pub mod sums;

use std::fmt;
use std::str::FromStr;

use rug::Rational;

pub use muselli::{counts_muselli, pmf_muselli, MuselliForm};
pub use recurrence::{pmf_recurrence_ch, pmf_recurrence_pg};
pub use sums::{pmf_fullsum_ch, pmf_hyp, pmf_nested_sum, pmf_nested_sum_counted, pmf_pgf_expansion, NestedEval};

use crate::error::{Error, Result};
use crate::model::{convert_index, IndexScheme, PmfTable, RunParams, VariantSpec};
use crate::oracle::{dp_waiting_time_pmf, CountingSemantics};
use crate::roots::RootModel;
use crate::scalar::{DoubleDouble, Scalar};
use sums::SumContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PmfEngineId {
    RecurrencePG,
    RecurrenceCh,
    FullSumCh,
    NestedSum,
    HypSum,
    PgfExpansion,
    RootBased,
    MuselliOriginal,
    MuselliAlt,
    MuselliCountsOriginal,
    MuselliCountsAlt,
    /// The dynamic-programming oracle, for comparisons.
    Oracle,
}

impl PmfEngineId {
    pub const ALL: [PmfEngineId; 12] = [
        PmfEngineId::RecurrencePG,
        PmfEngineId::RecurrenceCh,
        PmfEngineId::FullSumCh,
        PmfEngineId::NestedSum,
        PmfEngineId::HypSum,
        PmfEngineId::PgfExpansion,
        PmfEngineId::RootBased,
        PmfEngineId::MuselliOriginal,
        PmfEngineId::MuselliAlt,
        PmfEngineId::MuselliCountsOriginal,
        PmfEngineId::MuselliCountsAlt,
        PmfEngineId::Oracle,
    ];

    /// The seven Type I waiting-time engines.
    pub const TYPE1: [PmfEngineId; 7] = [
        PmfEngineId::RecurrencePG,
        PmfEngineId::RecurrenceCh,
        PmfEngineId::FullSumCh,
        PmfEngineId::NestedSum,
        PmfEngineId::HypSum,
        PmfEngineId::PgfExpansion,
        PmfEngineId::RootBased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PmfEngineId::RecurrencePG => "recurrence-pg",
            PmfEngineId::RecurrenceCh => "recurrence-ch",
            PmfEngineId::FullSumCh => "full-sum",
            PmfEngineId::NestedSum => "nested-sum",
            PmfEngineId::HypSum => "hyp",
            PmfEngineId::PgfExpansion => "pgf-expansion",
            PmfEngineId::RootBased => "root-based",
            PmfEngineId::MuselliOriginal => "muselli-original",
            PmfEngineId::MuselliAlt => "muselli-alt",
            PmfEngineId::MuselliCountsOriginal => "muselli-counts-original",
            PmfEngineId::MuselliCountsAlt => "muselli-counts-alt",
            PmfEngineId::Oracle => "dp-oracle",
        }
    }

    pub fn supports_exact(self) -> bool {
        self != PmfEngineId::RootBased
    }

    /// Whether the engine can produce values for `variant`.
    pub fn supports(self, variant: &VariantSpec) -> bool {
        use PmfEngineId::*;
        match self {
            Oracle => true,
            MuselliOriginal | MuselliAlt | MuselliCountsOriginal | MuselliCountsAlt => variant.type2,
            RootBased => !variant.type2,
            _ => !variant.type2 && variant.overlap <= 0,
        }
    }
}

impl fmt::Display for PmfEngineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PmfEngineId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PmfEngineId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = PmfEngineId::ALL.iter().map(|e| e.name()).collect();
                Error::invalid("engine", format!("unknown engine `{s}`; valid engines: {}", names.join(", ")))
            })
    }
}

/// Evaluates `engine` on `n_min..=n_max` (in `scheme`) for `variant`.
///
/// Gap variants are served by any Type I engine through the shift
/// `f_{r,k,-g}(n) = f_{r,k,0}(n - (r-1)g)`. The counts engines return
/// `P(M_n = r)`, the probability of exactly `r` runs in `n` trials.
pub fn pmf_table<S: Scalar>(
    engine: PmfEngineId,
    params: &RunParams<S>,
    scheme: IndexScheme,
    variant: VariantSpec,
    n_min: i64,
    n_max: i64,
) -> Result<PmfTable<S>> {
    variant.validate(params.k())?;
    if n_max < n_min {
        return Err(Error::invalid("n-max", format!("{n_max} is below n-min {n_min}")));
    }
    if !engine.supports(&variant) {
        return Err(Error::Unsupported {
            engine: engine.name().into(),
            what: format!("variant {variant}"),
        });
    }
    if S::EXACT && !engine.supports_exact() {
        return Err(Error::Unsupported {
            engine: engine.name().into(),
            what: "exact arithmetic".into(),
        });
    }
    let counts = matches!(engine, PmfEngineId::MuselliCountsOriginal | PmfEngineId::MuselliCountsAlt);
    if counts && scheme == IndexScheme::Cut {
        return Err(Error::Unsupported {
            engine: engine.name().into(),
            what: "cut indexing".into(),
        });
    }
    let lo = convert_index(n_min, scheme, IndexScheme::Full, params);
    let hi = convert_index(n_max, scheme, IndexScheme::Full, params);
    let values = match engine {
        PmfEngineId::Oracle => {
            let semantics = CountingSemantics::from_variant(&variant, params.k())?;
            let table = dp_waiting_time_pmf(params, semantics, hi.max(0))?.table;
            (lo..=hi).map(|n| table.get_or_zero(n)).collect()
        }
        PmfEngineId::RootBased => {
            let model = RootModel::new(&params.cast::<f64>(), variant.overlap)?;
            (lo..=hi).map(|n| S::from_rational(&rational_of(model.pmf(n)))).collect()
        }
        _ => {
            let shift = variant.gap_len().map_or(0, |g| (params.r() as i64 - 1) * g as i64);
            match engine {
                PmfEngineId::RecurrencePG => {
                    let table = pmf_recurrence_pg(params, hi - shift);
                    (lo..=hi).map(|n| table.get_or_zero(n - shift)).collect()
                }
                PmfEngineId::RecurrenceCh => {
                    let rk = params.rk();
                    let table = pmf_recurrence_ch(params, hi - shift - rk);
                    (lo..=hi).map(|n| table.get_or_zero(n - shift - rk)).collect()
                }
                _ => sum_engine_values(engine, params, lo - shift, hi - shift)?,
            }
        }
    };
    let values = if S::EXACT { values } else { values.into_iter().map(clamp_roundoff).collect() };
    Ok(PmfTable {
        params: params.clone(),
        scheme,
        variant,
        n_min,
        values,
    })
}

/// Float noise just below zero is reported as zero; anything larger is left
/// visible.
fn clamp_roundoff<S: Scalar>(v: S) -> S {
    let x = v.to_f64();
    if (-1e-15..0.0).contains(&x) {
        S::zero()
    } else {
        v
    }
}

fn rational_of(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite pmf value")
}

/// Sum-engine values at Full indices `lo..=hi`, computed in the working
/// number mode for `S`.
fn sum_engine_values<S: Scalar>(engine: PmfEngineId, params: &RunParams<S>, lo: i64, hi: i64) -> Result<Vec<S>> {
    let top = hi + params.r() as i64 + 1;
    if S::EXACT {
        let ctx = SumContext::<Rational>::new(&params.cast(), top);
        Ok(eval_sum_engine(engine, &ctx, lo, hi)?.iter().map(|v| v.cast()).collect())
    } else {
        let ctx = SumContext::<DoubleDouble>::new(&params.cast(), top);
        Ok(eval_sum_engine(engine, &ctx, lo, hi)?.iter().map(|v| v.cast()).collect())
    }
}

fn eval_sum_engine<T: Scalar>(engine: PmfEngineId, ctx: &SumContext<T>, lo: i64, hi: i64) -> Result<Vec<T>> {
    let rk = ctx.params.rk();
    let r = ctx.params.r() as i64;
    (lo..=hi)
        .map(|n| match engine {
            PmfEngineId::FullSumCh => Ok(sums::fullsum_at(ctx, n - rk)),
            PmfEngineId::NestedSum => Ok(sums::nested_at(ctx, n - rk, &mut 0)),
            PmfEngineId::HypSum => sums::hyp_at(ctx, n - rk),
            PmfEngineId::PgfExpansion => Ok(sums::pgf_expansion_at(ctx, n - rk)),
            PmfEngineId::MuselliOriginal => Ok(muselli::muselli_at(ctx, n, MuselliForm::Original)),
            PmfEngineId::MuselliAlt => Ok(muselli::muselli_at(ctx, n, MuselliForm::Alt)),
            PmfEngineId::MuselliCountsOriginal => Ok(muselli::counts_at(ctx, n, r, MuselliForm::Original)),
            PmfEngineId::MuselliCountsAlt => Ok(muselli::counts_at(ctx, n, r, MuselliForm::Alt)),
            other => unreachable!("{other} is not a sum engine"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_names_round_trip() {
        for engine in PmfEngineId::ALL {
            assert_eq!(engine.name().parse::<PmfEngineId>().unwrap(), engine);
        }
        let err = "bogus".parse::<PmfEngineId>().unwrap_err().to_string();
        assert!(err.contains("recurrence-pg"));
    }

    #[test]
    fn all_type1_engines_agree_on_a_range() {
        let params = RunParams::new(3, 2, 0.4).unwrap();
        let reference = pmf_table(PmfEngineId::RecurrencePG, &params, IndexScheme::Full, VariantSpec::type1(), 0, 60).unwrap();
        for engine in PmfEngineId::TYPE1 {
            let table = pmf_table(engine, &params, IndexScheme::Full, VariantSpec::type1(), 0, 60).unwrap();
            for (n, v) in table.iter() {
                assert!((v - reference.get_or_zero(n)).abs() < 1e-13, "{engine} n={n}");
            }
        }
    }

    #[test]
    fn cut_scheme_tables() {
        let params = RunParams::new(2, 1, Rational::from((1, 2))).unwrap();
        let table = pmf_table(PmfEngineId::HypSum, &params, IndexScheme::Cut, VariantSpec::type1(), 0, 3).unwrap();
        assert_eq!(table.values[3], Rational::from((3, 32)));
    }

    #[test]
    fn rejects_mismatched_variants() {
        let params = RunParams::new(2, 2, 0.5).unwrap();
        let err = pmf_table(PmfEngineId::NestedSum, &params, IndexScheme::Full, VariantSpec::type2(), 1, 5);
        assert!(matches!(err, Err(Error::Unsupported { .. })));
        let err = pmf_table(PmfEngineId::MuselliAlt, &params, IndexScheme::Full, VariantSpec::type1(), 1, 5);
        assert!(err.is_err());
        let err = pmf_table(PmfEngineId::RootBased, &params, IndexScheme::Full, VariantSpec::overlap(2), 1, 5);
        assert!(matches!(err, Err(Error::InvalidParameter { .. })));
        let exact = RunParams::new(2, 2, Rational::from((1, 2))).unwrap();
        let err = pmf_table(PmfEngineId::RootBased, &exact, IndexScheme::Full, VariantSpec::type1(), 1, 5);
        assert!(matches!(err, Err(Error::Unsupported { .. })));
    }

    #[test]
    fn gap_variant_is_a_shift() {
        let params = RunParams::new(2, 2, Rational::from((1, 2))).unwrap();
        let gap = pmf_table(PmfEngineId::NestedSum, &params, IndexScheme::Full, VariantSpec::gap(2), 0, 12).unwrap();
        let oracle = pmf_table(PmfEngineId::Oracle, &params, IndexScheme::Full, VariantSpec::gap(2), 0, 12).unwrap();
        assert_eq!(gap.values, oracle.values);
        assert_eq!(gap.get_or_zero(6), Rational::from((1, 16)));
    }
}
