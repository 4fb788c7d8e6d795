//! Parameters, indexing schemes and result containers.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::{binom, falling, BinomialConvention};

/// Run length `k`, number of runs `r` and success probability `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunParams<S> {
    k: u32,
    r: u32,
    p: S,
    q: S,
}

impl<S: Scalar> RunParams<S> {
    pub fn new(k: u32, r: u32, p: S) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "run length must be at least 1"));
        }
        if r == 0 {
            return Err(Error::invalid("r", "number of runs must be at least 1"));
        }
        if !(p > S::zero() && p < S::one()) {
            return Err(Error::invalid("p", format!("{p:?} is not in (0, 1)")));
        }
        let q = S::one() - p.clone();
        Ok(Self { k, r, p, q })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    /// `r k`, the first trial at which `r` runs can be complete.
    pub fn rk(&self) -> i64 {
        self.k as i64 * self.r as i64
    }

    /// `p^k`, the probability of a run in `k` given trials.
    pub fn pk(&self) -> S {
        self.p.powu(self.k)
    }

    /// `q p^k`.
    pub fn qpk(&self) -> S {
        self.q.clone() * self.pk()
    }

    /// Same `k` and `p`, different number of runs.
    pub fn with_r(&self, r: u32) -> Result<Self> {
        Self::new(self.k, r, self.p.clone())
    }

    /// Converts `p` to another number mode. `q` is recomputed as `1 - p`.
    pub fn cast<T: Scalar>(&self) -> RunParams<T> {
        let p: T = self.p.cast();
        let q = T::one() - p.clone();
        RunParams {
            k: self.k,
            r: self.r,
            p,
            q,
        }
    }
}

/// Trial indexing: `Full` counts every trial, `Cut` starts at the earliest
/// point at which `r` runs can be complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexScheme {
    Full,
    Cut,
}

impl IndexScheme {
    pub fn name(self) -> &'static str {
        match self {
            IndexScheme::Full => "full",
            IndexScheme::Cut => "cut",
        }
    }
}

impl fmt::Display for IndexScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Shifts `n` between schemes by `n_cut = n_full - r k`.
pub fn convert_index<S: Scalar>(n: i64, from: IndexScheme, to: IndexScheme, params: &RunParams<S>) -> i64 {
    match (from, to) {
        (IndexScheme::Full, IndexScheme::Cut) => n - params.rk(),
        (IndexScheme::Cut, IndexScheme::Full) => n + params.rk(),
        _ => n,
    }
}

/// Counting semantics for the runs.
///
/// `overlap` is the number of trials consecutive runs may share: `0` is Type I,
/// `k - 1` is Type III, and a negative value `-g` means the `g` trials after
/// each completed run are ignored. `type2` selects runs of length at least `k`
/// separated by at least one failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VariantSpec {
    pub overlap: i64,
    pub type2: bool,
}

impl VariantSpec {
    pub fn type1() -> Self {
        Self::default()
    }

    pub fn type2() -> Self {
        Self {
            overlap: 0,
            type2: true,
        }
    }

    pub fn overlap(ell: u32) -> Self {
        Self {
            overlap: ell as i64,
            type2: false,
        }
    }

    pub fn gap(g: u32) -> Self {
        Self {
            overlap: -(g as i64),
            type2: false,
        }
    }

    pub fn is_type1(&self) -> bool {
        self.overlap == 0 && !self.type2
    }

    /// The gap `g` when `overlap < 0`.
    pub fn gap_len(&self) -> Option<u32> {
        (self.overlap < 0).then(|| (-self.overlap) as u32)
    }

    pub fn validate(&self, k: u32) -> Result<()> {
        if self.overlap >= k as i64 {
            return Err(Error::invalid(
                "variant",
                format!("overlap {} must be below k = {k}", self.overlap),
            ));
        }
        if self.type2 && self.overlap != 0 {
            return Err(Error::invalid("variant", "type2 excludes overlap and gap"));
        }
        Ok(())
    }

    /// First trial (Full indexing) at which the `r`-th run can complete.
    pub fn support_start(&self, k: u32, r: u32) -> i64 {
        let (k, r) = (k as i64, r as i64);
        if self.type2 {
            r * k + r - 1
        } else {
            r * k - self.overlap * (r - 1)
        }
    }
}

impl fmt::Display for VariantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.type2 {
            f.write_str("type2")
        } else if self.overlap > 0 {
            write!(f, "overlap={}", self.overlap)
        } else if self.overlap < 0 {
            write!(f, "gap={}", -self.overlap)
        } else {
            f.write_str("type1")
        }
    }
}

/// Contiguous pmf values `P_n`, `n_min <= n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable<S> {
    pub params: RunParams<S>,
    pub scheme: IndexScheme,
    pub variant: VariantSpec,
    pub n_min: i64,
    pub values: Vec<S>,
}

impl<S: Scalar> PmfTable<S> {
    pub fn n_max(&self) -> i64 {
        self.n_min + self.values.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Option<&S> {
        if n < self.n_min {
            return None;
        }
        self.values.get((n - self.n_min) as usize)
    }

    /// `P_n`, or zero outside the stored range.
    pub fn get_or_zero(&self, n: i64) -> S {
        self.get(n).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &S)> + '_ {
        (self.n_min..).zip(self.values.iter())
    }

    /// Sum of the stored values.
    pub fn mass(&self) -> S {
        S::sum_terms(self.values.iter().cloned())
    }

    /// The same values under the other indexing scheme.
    pub fn reindexed(&self, to: IndexScheme) -> Self {
        Self {
            n_min: convert_index(self.n_min, self.scheme, to, &self.params),
            scheme: to,
            ..self.clone()
        }
    }

    /// Restriction to `lo..=hi`, padding with zeros outside the stored range.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        Self {
            n_min: lo,
            values: (lo..=hi).map(|n| self.get_or_zero(n)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentKind {
    Factorial,
    Raw,
    Central,
}

impl MomentKind {
    pub fn name(self) -> &'static str {
        match self {
            MomentKind::Factorial => "factorial",
            MomentKind::Raw => "raw",
            MomentKind::Central => "central",
        }
    }
}

/// Moments of orders `1..=order_max`; order zero is implicitly one.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet<S> {
    pub kind: MomentKind,
    pub scheme: IndexScheme,
    pub values: Vec<S>,
}

impl<S: Scalar> MomentSet<S> {
    pub fn new(kind: MomentKind, scheme: IndexScheme, values: Vec<S>) -> Self {
        Self { kind, scheme, values }
    }

    pub fn order_max(&self) -> usize {
        self.values.len()
    }

    /// Moment of order `n`, with `order(0) = 1`.
    pub fn order(&self, n: usize) -> S {
        if n == 0 {
            S::one()
        } else {
            self.values[n - 1].clone()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> + '_ {
        (1..).zip(self.values.iter())
    }
}

/// Factorial moments of `Y + d` from those of `Y`:
/// `sum_i C(n, i) M_(n-i) (d)_i`.
pub fn shift_factorial_by<S: Scalar>(values: &[S], offset: i64) -> Vec<S> {
    let d = S::from_i64(offset);
    shift_with(values, |i| falling(&d, i))
}

/// Raw moments of `Y + d` from those of `Y`: `sum_i C(n, i) M_(n-i) d^i`.
pub fn shift_raw_by<S: Scalar>(values: &[S], offset: i64) -> Vec<S> {
    let d = S::from_i64(offset);
    shift_with(values, |i| d.powu(i))
}

fn shift_with<S: Scalar>(values: &[S], weight: impl Fn(u32) -> S) -> Vec<S> {
    let at = |m: usize| if m == 0 { S::one() } else { values[m - 1].clone() };
    (1..=values.len())
        .map(|n| {
            S::sum_terms((0..=n).map(|i| {
                let c = S::from_integer(&binom(n as i64, i as i64, BinomialConvention::ZeroOnNegativeTop));
                c * at(n - i) * weight(i as u32)
            }))
        })
        .collect()
}

fn check_shift_input<S>(moments: &MomentSet<S>, kind: MomentKind) -> Result<()> {
    if moments.kind != kind {
        return Err(Error::OrderMismatch(format!(
            "expected {} moments, got {}",
            kind.name(),
            moments.kind.name()
        )));
    }
    if moments.scheme != IndexScheme::Cut {
        return Err(Error::OrderMismatch("input moments must use cut indexing".into()));
    }
    if moments.values.is_empty() {
        return Err(Error::OrderMismatch("no moment orders present".into()));
    }
    Ok(())
}

/// Full-indexing factorial moments from Cut-indexing ones.
pub fn shift_factorial_moments<S: Scalar>(cut: &MomentSet<S>, params: &RunParams<S>) -> Result<MomentSet<S>> {
    check_shift_input(cut, MomentKind::Factorial)?;
    Ok(MomentSet::new(
        MomentKind::Factorial,
        IndexScheme::Full,
        shift_factorial_by(&cut.values, params.rk()),
    ))
}

/// Full-indexing raw moments from Cut-indexing ones.
pub fn shift_raw_moments<S: Scalar>(cut: &MomentSet<S>, params: &RunParams<S>) -> Result<MomentSet<S>> {
    check_shift_input(cut, MomentKind::Raw)?;
    Ok(MomentSet::new(
        MomentKind::Raw,
        IndexScheme::Full,
        shift_raw_by(&cut.values, params.rk()),
    ))
}
