//! Integer combinatorics and special functions shared by every engine.

use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// How a binomial coefficient treats arguments outside `0 <= b <= a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinomialConvention {
    /// Zero whenever `b < 0`, `a < 0` or `b > a`.
    ZeroOnNegativeTop,
    /// `C(a, b) = (-1)^b C(b - a - 1, b)` for `a < 0 <= b`; otherwise as above.
    ExtendNegativeTop,
    /// As `ZeroOnNegativeTop`, except that `C(a, a) = 1` for every integer `a`.
    ///
    /// This is the only extension under which
    /// `C(i - 1, j - 1) = C(i, j) - C(i - 1, j)` also holds at `i = j = 0`,
    /// i.e. `C(-1, -1) = 1`.
    UnitDiagonal,
}

/// Exact binomial coefficient under `convention`.
pub fn binom(a: i64, b: i64, convention: BinomialConvention) -> Integer {
    match convention {
        BinomialConvention::UnitDiagonal if a == b => Integer::from(1),
        BinomialConvention::ExtendNegativeTop if a < 0 && b >= 0 => {
            let magnitude = binom(b - a - 1, b, BinomialConvention::ZeroOnNegativeTop);
            if b % 2 == 0 {
                magnitude
            } else {
                -magnitude
            }
        }
        _ => {
            if b < 0 || a < 0 || b > a {
                Integer::new()
            } else {
                let b = b.min(a - b);
                Integer::from(Integer::binomial_u(a as u32, b as u32))
            }
        }
    }
}

/// Pascal's triangle in the target scalar type, with convention-aware lookup.
///
/// Rows are built by addition, so entries are exact in rational mode and
/// correctly accumulated in float modes. Lookups beyond the table fall back to
/// [`binom`].
#[derive(Debug, Clone)]
pub struct Binomials<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> Binomials<S> {
    pub fn new(max_top: usize) -> Self {
        let mut rows: Vec<Vec<S>> = Vec::with_capacity(max_top + 1);
        rows.push(vec![S::one()]);
        for a in 1..=max_top {
            let prev = &rows[a - 1];
            let mut row = Vec::with_capacity(a + 1);
            row.push(S::one());
            for b in 1..a {
                row.push(prev[b - 1].clone() + prev[b].clone());
            }
            row.push(S::one());
            rows.push(row);
        }
        Self { rows }
    }

    pub fn max_top(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(a, b)` under [`BinomialConvention::ZeroOnNegativeTop`].
    pub fn get(&self, a: i64, b: i64) -> S {
        self.get_with(a, b, BinomialConvention::ZeroOnNegativeTop)
    }

    pub fn get_with(&self, a: i64, b: i64, convention: BinomialConvention) -> S {
        match convention {
            BinomialConvention::UnitDiagonal if a == b => S::one(),
            BinomialConvention::ExtendNegativeTop if a < 0 && b >= 0 => {
                let magnitude = self.get(b - a - 1, b);
                if b % 2 == 0 {
                    magnitude
                } else {
                    -magnitude
                }
            }
            _ => {
                if b < 0 || a < 0 || b > a {
                    S::zero()
                } else if (a as usize) < self.rows.len() {
                    self.rows[a as usize][b as usize].clone()
                } else {
                    S::from_integer(&binom(a, b, BinomialConvention::ZeroOnNegativeTop))
                }
            }
        }
    }
}

/// Falling factorial `a (a-1) ... (a-j+1)`; equals one for `j = 0`.
pub fn falling<T: Field>(a: &T, j: u32) -> T {
    let mut acc = T::one();
    let mut factor = a.clone();
    for _ in 0..j {
        acc = acc * factor.clone();
        factor = factor - T::one();
    }
    acc
}

/// Exact falling factorial of an integer.
pub fn falling_int(a: i64, j: u32) -> Integer {
    (0..j as i64).fold(Integer::from(1), |acc, t| acc * (a - t))
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Rising factorial (Pochhammer symbol) `(a)_j = a (a+1) ... (a+j-1)`.
pub fn rising<T: Field>(a: &T, j: u32) -> T {
    let mut acc = T::one();
    let mut factor = a.clone();
    for _ in 0..j {
        acc = acc * factor.clone();
        factor = factor + T::one();
    }
    acc
}

/// Triangle of Eulerian numbers `A_{ij}`, `0 <= j <= i - 1`, with `A_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerianTable {
    rows: Vec<Vec<Integer>>,
}

impl EulerianTable {
    /// Builds rows `0..=max_order` from the explicit alternating sum
    /// `A_{ij} = sum_{s=0}^{j} (-1)^s C(i+1, s) (j+1-s)^i`.
    pub fn new(max_order: usize) -> Self {
        let mut rows = Vec::with_capacity(max_order + 1);
        rows.push(vec![Integer::from(1)]);
        for i in 1..=max_order {
            let row = (0..i)
                .map(|j| {
                    (0..=j).fold(Integer::new(), |acc, s| {
                        let term = binom(i as i64 + 1, s as i64, BinomialConvention::ZeroOnNegativeTop)
                            * Integer::from(j + 1 - s).pow(i as u32);
                        if s % 2 == 0 {
                            acc + term
                        } else {
                            acc - term
                        }
                    })
                })
                .collect();
            rows.push(row);
        }
        Self { rows }
    }

    /// Builds the same triangle from `A_{ij} = (j+1) A_{i-1,j} + (i-j) A_{i-1,j-1}`.
    pub fn by_recurrence(max_order: usize) -> Self {
        let mut rows: Vec<Vec<Integer>> = Vec::with_capacity(max_order + 1);
        rows.push(vec![Integer::from(1)]);
        if max_order >= 1 {
            rows.push(vec![Integer::from(1)]);
        }
        for i in 2..=max_order {
            let prev = &rows[i - 1];
            let at = |j: usize| prev.get(j).cloned().unwrap_or_default();
            let row = (0..i)
                .map(|j| {
                    let left = if j == 0 { Integer::new() } else { at(j - 1) };
                    Integer::from(j + 1) * at(j) + Integer::from(i - j) * left
                })
                .collect();
            rows.push(row);
        }
        Self { rows }
    }

    pub fn max_order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, i: usize) -> Option<&[Integer]> {
        self.rows.get(i).map(Vec::as_slice)
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&Integer> {
        self.rows.get(i).and_then(|row| row.get(j))
    }

    /// Evaluates `A_i(t)` by Horner's rule.
    pub fn poly<S: Scalar>(&self, i: usize, t: &S) -> Result<S> {
        let row = self.row(i).ok_or(Error::OrderExceedsTable {
            order: i,
            max: self.max_order(),
        })?;
        Ok(row
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * t.clone() + S::from_integer(c)))
    }
}

/// Convenience wrapper around [`EulerianTable::poly`].
pub fn eulerian_poly<S: Scalar>(table: &EulerianTable, i: usize, t: &S) -> Result<S> {
    table.poly(i, t)
}

/// Stirling numbers of the second kind `S(n, j)` for `0 <= j <= n <= max`.
pub fn stirling2_table(max: usize) -> Vec<Vec<Integer>> {
    let mut rows: Vec<Vec<Integer>> = vec![vec![Integer::from(1)]];
    for n in 1..=max {
        let prev = &rows[n - 1];
        let row = (0..=n)
            .map(|j| {
                if j == 0 {
                    return Integer::new();
                }
                let stay = prev.get(j).cloned().unwrap_or_default() * Integer::from(j);
                stay + prev[j - 1].clone()
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// Parameters of a terminating Gauss series `2F1(a, b; c; z)` with integer
/// `a`, `b`, `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hyp2F1Spec {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    terms: u32,
}

impl Hyp2F1Spec {
    /// Validates termination and that no denominator Pochhammer factor
    /// `(c + t)`, `0 <= t < m`, vanishes before the last term `m`.
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let m = [a, b]
            .into_iter()
            .filter(|&x| x <= 0)
            .map(|x| -x)
            .min()
            .ok_or(Error::NonTerminating { a, b })?;
        if let Some(t) = (0..m).find(|t| c + t == 0) {
            return Err(Error::ZeroDenominatorPochhammer {
                c,
                index: t as u32 + 1,
            });
        }
        Ok(Self {
            a,
            b,
            c,
            terms: m as u32,
        })
    }

    /// Index of the last nonzero term.
    pub fn termination_index(&self) -> u32 {
        self.terms
    }

    /// Left-to-right accumulation: each term comes from the previous one by a
    /// single multiply and divide.
    pub fn eval<T: Field>(&self, z: &T) -> T {
        let mut term = T::one();
        let mut sum = T::one();
        for i in 0..self.terms as i64 {
            let num = T::from_i64(self.a + i) * T::from_i64(self.b + i);
            let den = T::from_i64(self.c + i) * T::from_i64(i + 1);
            term = term * num / den * z.clone();
            sum = sum + term.clone();
        }
        sum
    }
}

/// `2F1(a, b; c; z)` for a terminating series.
pub fn hyp2f1_terminating<T: Field>(a: i64, b: i64, c: i64, z: &T) -> Result<T> {
    Ok(Hyp2F1Spec::new(a, b, c)?.eval(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    use BinomialConvention::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn binomial_edge_conventions() {
        assert_eq!(binom(4, 2, ZeroOnNegativeTop), 6);
        assert_eq!(binom(-1, 0, ZeroOnNegativeTop), 0);
        assert_eq!(binom(7, -1, ZeroOnNegativeTop), 0);
        assert_eq!(binom(7, -1, ExtendNegativeTop), 0);
        assert_eq!(binom(3, 5, ZeroOnNegativeTop), 0);
        // (-1)^b C(b - a - 1, b): C(-1, b) = (-1)^b, C(-3, 2) = C(4, 2) = 6
        assert_eq!(binom(-1, 0, ExtendNegativeTop), 1);
        assert_eq!(binom(-1, 3, ExtendNegativeTop), -1);
        assert_eq!(binom(-3, 2, ExtendNegativeTop), 6);
        assert_eq!(binom(-1, -1, ZeroOnNegativeTop), 0);
        assert_eq!(binom(-1, -1, UnitDiagonal), 1);
        assert_eq!(binom(-1, 0, UnitDiagonal), 0);
    }

    #[test]
    fn table_lookup_matches_exact_binomials() {
        let table: Binomials<Rational> = Binomials::new(30);
        for a in -4..40 {
            for b in -3..42 {
                for conv in [ZeroOnNegativeTop, ExtendNegativeTop, UnitDiagonal] {
                    assert_eq!(table.get_with(a, b, conv), Rational::from(binom(a, b, conv)));
                }
            }
        }
    }

    #[test]
    fn falling_factorials() {
        assert_eq!(falling(&5.0f64, 2), 20.0);
        assert_eq!(falling(&3.0f64, 5), 0.0);
        assert_eq!(falling(&4.0f64, 0), 1.0);
        // (r + s - 1)_s with r = 2, s = 3
        assert_eq!(falling_int(4, 3), 24);
        assert_eq!(falling_int(6, 0), 1);
        assert_eq!(rising(&q(1, 2), 3), q(15, 8));
    }

    #[test]
    fn eulerian_polynomials() {
        let table = EulerianTable::new(12);
        let row = |i: usize| -> Vec<i64> { table.row(i).unwrap().iter().map(|c| c.to_i64().unwrap()).collect() };
        assert_eq!(row(0), vec![1]);
        assert_eq!(row(1), vec![1]);
        assert_eq!(row(2), vec![1, 1]);
        assert_eq!(row(3), vec![1, 4, 1]);
        assert_eq!(row(4), vec![1, 11, 11, 1]);
        assert_eq!(table, EulerianTable::by_recurrence(12));
        assert_eq!(table.poly(0, &q(7, 3)).unwrap(), Rational::from(1));
        assert_eq!(table.poly(2, &q(1, 2)).unwrap(), q(3, 2));
        assert!(matches!(
            table.poly(13, &0.5f64),
            Err(Error::OrderExceedsTable { order: 13, max: 12 })
        ));
    }

    #[test]
    fn eulerian_rows_sum_to_factorial_and_are_palindromic() {
        let table = EulerianTable::new(12);
        for i in 1..=12usize {
            let row = table.row(i).unwrap();
            let total: Integer = row.iter().sum();
            assert_eq!(total, factorial(i as u32));
            assert_eq!(row[0], 1);
            for j in 0..i {
                assert_eq!(row[j], row[i - 1 - j]);
            }
        }
    }

    #[test]
    fn stirling_second_kind() {
        let s = stirling2_table(5);
        assert_eq!(s[4][2], 7);
        assert_eq!(s[5][3], 25);
        assert_eq!(s[3][3], 1);
        assert_eq!(s[3][0], 0);
    }

    #[test]
    fn hypergeometric_small_cases() {
        // 2F1(0, b; c; z) = 1
        assert_eq!(hyp2f1_terminating(0, 7, 3, &q(5, 2)).unwrap(), Rational::from(1));
        // 2F1(-1, b; c; z) = 1 - b z / c
        let (b, c, z) = (5, 3, q(2, 7));
        assert_eq!(
            hyp2f1_terminating(-1, b, c, &z).unwrap(),
            Rational::from(1) - Rational::from(b) * z.clone() / Rational::from(c)
        );
        // 2F1(1-j, 1; 2-j-k; -p/q), j = 2, k = 2, p = 1/2
        assert_eq!(hyp2f1_terminating(-1, 1, -2, &q(-1, 1)).unwrap(), q(1, 2));
    }

    #[test]
    fn hypergeometric_rejects_invalid_instances() {
        assert_eq!(
            Hyp2F1Spec::new(-3, 2, -1).unwrap_err(),
            Error::ZeroDenominatorPochhammer { c: -1, index: 2 }
        );
        assert_eq!(Hyp2F1Spec::new(1, 2, 3).unwrap_err(), Error::NonTerminating { a: 1, b: 2 });
        // terminates through b before the zero in (c)_i is reached
        assert!(Hyp2F1Spec::new(-5, -1, -1).is_ok());
        assert_eq!(Hyp2F1Spec::new(-5, -2, 3).unwrap().termination_index(), 2);
    }
}
