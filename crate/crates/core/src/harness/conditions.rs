//! Exact-rational checkers for the local-existence parameter lists.
//!
//! Every clause is evaluated as printed, including the definitional ones
//! (`s' := …`, `2a = …`), and reported by name when violated.

use std::fmt;
use std::io::Write;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LansError, Result};
use crate::mild::csv_err;

type Q = Rational64;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// The symbols `(n, p, c, k, a, b, b', s')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalParamSet {
    pub n: Q,
    pub p: Q,
    pub c: Q,
    pub k: Q,
    pub a: Q,
    pub b: Q,
    pub b_prime: Q,
    pub s_prime: Q,
}

impl LocalParamSet {
    /// Continuous-in-time family: `s' = k − 2 − b + b'`, `a = (k − n/c − b)/2`.
    pub fn continuous(n: Q, p: Q, c: Q, k: Q, b: Q, b_prime: Q) -> Self {
        let two = Q::from_integer(2);
        Self { n, p, c, k, a: (k - n / c - b) / two, b, b_prime, s_prime: k - two - b + b_prime }
    }

    /// `L^a`-in-time family: `s' = k − 2 + b' − b`, `a = 2/(k − n/c − b)`.
    ///
    /// When `k − n/c − b = 0` the weight is undefined and `a` is set to 0,
    /// which the clause `0 < 2/a` then rejects.
    pub fn integrable(n: Q, p: Q, c: Q, k: Q, b: Q, b_prime: Q) -> Self {
        let two = Q::from_integer(2);
        let gap = k - n / c - b;
        let a = if gap.is_zero() { Q::zero() } else { two / gap };
        Self { n, p, c, k, a, b, b_prime, s_prime: k - two + b_prime - b }
    }

    /// Regularity `r = n/p + b` of the data space.
    pub fn r(&self) -> Q {
        self.n / self.p + self.b
    }
}

impl fmt::Display for LocalParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} p={} c={} k={} a={} b={} b'={} s'={}",
            self.n, self.p, self.c, self.k, self.a, self.b, self.b_prime, self.s_prime
        )
    }
}

/// Upper bound used in the `0 ≤ s' ≤ …` clause of the full continuous list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SPrimeBound {
    /// `s' ≤ k − 1`.
    #[default]
    Strict,
    /// `s' ≤ k`, as printed in the list.
    Printed,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConditionReport {
    pub passed: bool,
    pub violated: Vec<String>,
}

struct Clauses(Vec<String>);

impl Clauses {
    fn require(&mut self, ok: bool, name: &str) {
        if !ok {
            self.0.push(name.to_string());
        }
    }

    fn finish(self) -> ConditionReport {
        ConditionReport { passed: self.0.is_empty(), violated: self.0 }
    }
}

/// `nc/(2n − s'c)`, or `None` when the denominator vanishes.
fn critical_exponent(ps: &LocalParamSet) -> Option<Q> {
    let two = Q::from_integer(2);
    let den = two * ps.n - ps.s_prime * ps.c;
    (!den.is_zero()).then(|| ps.n * ps.c / den)
}

fn common_head(cl: &mut Clauses, ps: &LocalParamSet) {
    cl.require(ps.p > Q::one(), "1 < p");
    cl.require(ps.p <= ps.c, "p <= c");
}

/// Continuous-in-time list; `simplified` selects the `b' = 1` form.
pub fn check_conditions_ct(ps: &LocalParamSet, simplified: bool) -> ConditionReport {
    check_conditions_ct_with(ps, simplified, SPrimeBound::default())
}

pub fn check_conditions_ct_with(ps: &LocalParamSet, simplified: bool, bound: SPrimeBound) -> ConditionReport {
    let one = Q::one();
    let two = Q::from_integer(2);
    let zero = Q::zero();
    let mut cl = Clauses(Vec::new());
    let LocalParamSet { n, p, c, k, a, b, b_prime, s_prime } = *ps;
    common_head(&mut cl, ps);
    let gap = k - n / c - b;
    let crit = critical_exponent(ps);
    if simplified {
        cl.require(b >= zero, "b >= 0");
        cl.require(s_prime == k - one - b, "s' := k-1-b");
        cl.require(k >= one, "k >= 1");
        cl.require(s_prime * c < n, "s'c < n");
        cl.require(two * a == gap, "2a = k-n/c-b");
        cl.require(zero < gap && gap < one, "0 < 2a < 1");
        cl.require(crit.is_some_and(|x| one < x && x <= p), "1 < nc/(2n-s'c) <= p");
        cl.require(zero <= n / c - s_prime && n / c - s_prime < one, "0 <= n/c-s' < 1");
        cl.require(s_prime <= n / p && n / p <= one + s_prime, "s' <= n/p <= 1+s'");
    } else {
        cl.require(s_prime == k - two - b + b_prime, "s' := k-2-b+b'");
        cl.require(k >= zero, "k >= 0");
        cl.require(b_prime >= one, "b' >= 1");
        cl.require(s_prime * c < n, "s'c < n");
        cl.require(two * a == gap, "2a = k-n/c-b");
        cl.require(zero < gap && gap < one, "0 < 2a < 1");
        let upper = match bound {
            SPrimeBound::Strict => k - one,
            SPrimeBound::Printed => k,
        };
        cl.require(zero <= s_prime, "0 <= s'");
        cl.require(
            s_prime <= upper,
            match bound {
                SPrimeBound::Strict => "s' <= k-1",
                SPrimeBound::Printed => "s' <= k",
            },
        );
        cl.require(crit.is_some_and(|x| one < x && x <= p), "1 < nc/(2n-s'c) <= p");
        cl.require(one >= b_prime - b, "1 >= b'-b");
        let mid = b_prime + n / c - s_prime;
        cl.require(one <= mid && mid < two, "1 <= b'+n/c-s' < 2");
        cl.require(
            two - two * b_prime + s_prime <= n / p && n / p <= two - b_prime + s_prime,
            "2-2b'+s' <= n/p <= 2-b'+s'",
        );
    }
    cl.finish()
}

/// `L^a`-in-time list; `simplified` selects the `b' = 1` form.
pub fn check_conditions_la(ps: &LocalParamSet, simplified: bool) -> ConditionReport {
    let one = Q::one();
    let two = Q::from_integer(2);
    let zero = Q::zero();
    let mut cl = Clauses(Vec::new());
    let LocalParamSet { n, p, c, k, a, b, b_prime, s_prime } = *ps;
    common_head(&mut cl, ps);
    let gap = k - n / c - b;
    let weight_ok = !a.is_zero() && two / a == gap;
    let window = a / two <= p && p <= a;
    if simplified {
        cl.require(b >= zero, "b >= 0");
        cl.require(s_prime == k - one - b, "s' := k-1-b");
        cl.require(k >= one, "k >= 1");
        cl.require(s_prime * c < n, "s'c < n");
        cl.require(weight_ok, "2/a = k-n/c-b");
        cl.require(zero < gap && gap < one, "0 < 2/a < 1");
        cl.require(k - one <= n / p + b && n / p + b <= k, "k-1 <= n/p+b <= k");
        cl.require(window, "a/2 <= p <= a");
    } else {
        cl.require(s_prime == k - two + b_prime - b, "s' := k-2+b'-b");
        cl.require(k >= one, "k >= 1");
        cl.require(b_prime >= one, "b' >= 1");
        cl.require(s_prime * c < n, "s'c < n");
        cl.require(weight_ok, "2/a = k-n/c-b");
        cl.require(zero < gap && gap < one, "0 < 2/a < 1");
        cl.require(zero <= s_prime, "0 <= s'");
        cl.require(s_prime <= k - one, "s' <= k-1");
        // printed with a lower bound only
        cl.require(critical_exponent(ps).is_some_and(|x| one <= x), "1 <= nc/(2n-s'c)");
        cl.require(one >= b_prime - b, "1 >= b'-b");
        cl.require(k - b_prime <= n / p + b && n / p + b <= k, "k-b' <= n/p+b <= k");
        cl.require(window, "a/2 <= p <= a");
    }
    cl.finish()
}

/// Which parameter list a scan exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ListFamily {
    Continuous,
    Integrable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub params: LocalParamSet,
    pub full: ConditionReport,
    pub simplified: ConditionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub family: ListFamily,
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    pub fn disagreements(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.full.passed != r.simplified.passed)
    }

    /// Rows where either list passes with `b < 0`.
    pub fn negative_b_passes(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows
            .iter()
            .filter(|r| r.params.b < Q::zero() && (r.full.passed || r.simplified.passed))
    }

    pub fn passing(&self, simplified: bool) -> usize {
        self.rows.iter().filter(|r| if simplified { r.simplified.passed } else { r.full.passed }).count()
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "family", "n", "p", "c", "k", "a", "b", "b_prime", "s_prime", "full_pass", "simplified_pass",
            "full_violated", "simplified_violated",
        ])
        .map_err(csv_err)?;
        let family = match self.family {
            ListFamily::Continuous => "continuous",
            ListFamily::Integrable => "integrable",
        };
        for r in &self.rows {
            let ps = &r.params;
            w.write_record([
                family.to_string(),
                ps.n.to_string(),
                ps.p.to_string(),
                ps.c.to_string(),
                ps.k.to_string(),
                ps.a.to_string(),
                ps.b.to_string(),
                ps.b_prime.to_string(),
                ps.s_prime.to_string(),
                r.full.passed.to_string(),
                r.simplified.passed.to_string(),
                r.full.violated.join(";"),
                r.simplified.violated.join(";"),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(LansError::from)
    }
}

/// Axis values of the default scan grid (10 each, 10⁴ tuples).
pub fn default_axes() -> [Vec<Q>; 4] {
    let ints = |v: &[(i64, i64)]| v.iter().map(|&(a, b)| q(a, b)).collect::<Vec<_>>();
    let pc = ints(&[(6, 5), (3, 2), (2, 1), (12, 5), (3, 1), (7, 2), (4, 1), (5, 1), (6, 1), (8, 1)]);
    let k = ints(&[(0, 1), (1, 4), (1, 2), (3, 4), (1, 1), (5, 4), (3, 2), (7, 4), (2, 1), (5, 2)]);
    let b = ints(&[(-1, 2), (-1, 4), (0, 1), (1, 8), (1, 4), (3, 8), (1, 2), (3, 4), (1, 1), (3, 2)]);
    [pc.clone(), pc, k, b]
}

/// Full-vs-simplified comparison over `p × c × k × b` at `b' = 1`, with `a` derived.
pub fn scan(family: ListFamily, n: Q, axes: &[Vec<Q>; 4]) -> ScanResult {
    let one = Q::one();
    let mut rows = Vec::with_capacity(axes.iter().map(Vec::len).product());
    for &p in &axes[0] {
        for &c in &axes[1] {
            for &k in &axes[2] {
                for &b in &axes[3] {
                    let (params, full, simplified) = match family {
                        ListFamily::Continuous => {
                            let ps = LocalParamSet::continuous(n, p, c, k, b, one);
                            (ps, check_conditions_ct(&ps, false), check_conditions_ct(&ps, true))
                        }
                        ListFamily::Integrable => {
                            let ps = LocalParamSet::integrable(n, p, c, k, b, one);
                            (ps, check_conditions_la(&ps, false), check_conditions_la(&ps, true))
                        }
                    };
                    rows.push(ScanRow { params, full, simplified });
                }
            }
        }
    }
    ScanResult { family, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Q {
        Q::from_integer(v)
    }

    #[test]
    fn three_halves_tuple_passes_simplified_continuous_list() {
        let ps = LocalParamSet::continuous(int(3), int(2), int(3), q(3, 2), int(0), int(1));
        assert_eq!(ps.s_prime, q(1, 2));
        assert_eq!(ps.a, q(1, 4));
        let rep = check_conditions_ct(&ps, true);
        assert!(rep.passed, "{:?}", rep.violated);
        assert!(check_conditions_ct(&ps, false).passed);
    }

    #[test]
    fn three_quarters_regularity_fails_on_b() {
        // r = n/p + b = 3/4 with n = 3, p = 2
        let ps = LocalParamSet::continuous(int(3), int(2), int(3), q(3, 2), q(-3, 4), int(1));
        assert_eq!(ps.r(), q(3, 4));
        let rep = check_conditions_ct(&ps, true);
        assert!(rep.violated.iter().any(|c| c == "b >= 0"));
    }

    #[test]
    fn c_below_p_is_reported() {
        let ps = LocalParamSet::continuous(int(3), int(4), int(3), q(3, 2), int(0), int(1));
        for simplified in [false, true] {
            assert!(check_conditions_ct(&ps, simplified).violated.iter().any(|c| c == "p <= c"));
            let la = LocalParamSet::integrable(int(3), int(4), int(3), q(3, 2), int(0), int(1));
            assert!(check_conditions_la(&la, simplified).violated.iter().any(|c| c == "p <= c"));
        }
    }

    #[test]
    fn integrable_lists_on_the_three_halves_tuple() {
        let ps = LocalParamSet::integrable(int(3), int(2), int(3), q(3, 2), int(0), int(1));
        assert_eq!(ps.a, int(4));
        assert!(check_conditions_la(&ps, true).passed);
        assert!(check_conditions_la(&ps, false).passed);
        let wide = LocalParamSet { p: int(5), c: int(6), ..ps };
        assert!(check_conditions_la(&wide, true).violated.iter().any(|c| c == "a/2 <= p <= a"));
        let neg = LocalParamSet::integrable(int(3), int(2), int(3), q(3, 2), q(-1, 10), int(1));
        assert!(check_conditions_la(&neg, true).violated.iter().any(|c| c == "b >= 0"));
    }

    #[test]
    fn definitional_clauses_are_checked() {
        let mut ps = LocalParamSet::continuous(int(3), int(2), int(3), q(3, 2), int(0), int(1));
        ps.s_prime = q(1, 3);
        assert!(check_conditions_ct(&ps, true).violated.iter().any(|c| c == "s' := k-1-b"));
        ps = LocalParamSet::continuous(int(3), int(2), int(3), q(3, 2), int(0), int(1));
        ps.a = q(1, 3);
        assert!(check_conditions_ct(&ps, false).violated.iter().any(|c| c == "2a = k-n/c-b"));
    }

    #[test]
    fn printed_bound_accepts_more_than_strict_bound() {
        // b' = 2, b = 1: s' = k - 1 with b' - b = 1
        let ps = LocalParamSet::continuous(int(3), int(4), int(4), q(5, 2), int(1), int(2));
        let strict = check_conditions_ct_with(&ps, false, SPrimeBound::Strict);
        let printed = check_conditions_ct_with(&ps, false, SPrimeBound::Printed);
        assert!(printed.violated.len() <= strict.violated.len());
        assert!(!printed.violated.iter().any(|c| c.starts_with("s' <=")));
    }

    #[test]
    fn negative_s_prime_separates_the_continuous_lists() {
        // s' = -1/5: the simplified list has no s' >= 0 clause
        let ps = LocalParamSet::continuous(int(3), int(4), int(4), int(1), q(1, 5), int(1));
        assert_eq!(ps.s_prime, q(-1, 5));
        assert!(check_conditions_ct(&ps, true).passed);
        assert_eq!(check_conditions_ct(&ps, false).violated, vec!["0 <= s'".to_string()]);
    }

    #[test]
    fn default_scan_has_ten_thousand_rows_and_no_negative_b_passes() {
        let res = scan(ListFamily::Continuous, int(3), &default_axes());
        assert_eq!(res.rows.len(), 10_000);
        assert_eq!(res.negative_b_passes().count(), 0);
        assert!(res.passing(true) > 0);
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 10_001);
    }
}
