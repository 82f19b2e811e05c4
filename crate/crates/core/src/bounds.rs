//! Exact size bounds: schedules of `m(·)`, the ramification constants, the
//! headline threshold and some older bounds for comparison.
//!
//! Everything is integer or rational arithmetic. Tower values too large to
//! write down are kept as [`Tower`]s and compared exactly.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::combinatorics::{beth_tower, binom, Tower, DEFAULT_CAP_BITS};
use crate::error::{Error, Result};

/// Fractional bits used for certified `log2` bounds.
pub const LOG_BITS: u32 = 32;

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Smallest natural number `>= x`; zero for negative `x`.
pub fn ceil_nat(x: &BigRational) -> BigUint {
    let c = x.ceil().to_integer();
    c.to_biguint().unwrap_or_default()
}

/// Dyadic bound on `log2(x)` with [`LOG_BITS`] fractional bits: an upper
/// bound if `upper`, else a lower bound. Exact for powers of two.
pub fn log2_dyadic(x: &BigUint, upper: bool) -> BigRational {
    assert!(!x.is_zero(), "log2 of zero");
    let e = x.bits() - 1;
    if x.count_ones() == 1 {
        return rat(e);
    }
    // mantissa z = x / 2^e in (1, 2) as Z / 2^P, then squaring digit by digit
    const P: u64 = 96;
    let one = BigUint::one() << P;
    let two = &one << 1u32;
    let mut z = if P >= e {
        x << (P - e)
    } else {
        let (q, r) = x.div_rem(&(BigUint::one() << (e - P)));
        if upper && !r.is_zero() {
            q + 1u32
        } else {
            q
        }
    };
    let mut frac = BigUint::zero();
    let round = |v: BigUint, shift: u64| -> BigUint {
        let (q, r) = v.div_rem(&(BigUint::one() << shift));
        if upper && !r.is_zero() {
            q + 1u32
        } else {
            q
        }
    };
    for _ in 0..LOG_BITS {
        z = round(&z * &z, P);
        frac <<= 1u32;
        if z >= two {
            frac += 1u32;
            z = round(z, 1);
        }
    }
    if upper {
        frac += 1u32;
    }
    let denom = BigInt::one() << LOG_BITS;
    rat(e) + BigRational::new(BigInt::from(frac), denom)
}

/// `ceil(log2(x))` for a positive rational, exactly.
pub fn ceil_log2(x: &BigRational) -> i64 {
    assert!(x.is_positive(), "log2 of a non-positive number");
    let (n, d) = (x.numer().magnitude(), x.denom().magnitude());
    // smallest z with 2^z >= n/d
    let mut z = n.bits() as i64 - d.bits() as i64 - 1;
    loop {
        let ok = if z >= 0 {
            (d << z as u64) >= *n
        } else {
            *d >= (n << (-z) as u64)
        };
        if ok {
            return z;
        }
        z += 1;
    }
}

/// The constants of the ramification tree for `n*`-place colorings.
#[derive(Clone, Debug)]
pub struct BoundConstants {
    pub epsilon: BigRational,
    pub k: u64,
    pub n_star: u64,
    pub t: u64,
    /// Level at which the `log` term of `c0` is evaluated.
    pub ell_ref: u64,
}

impl BoundConstants {
    pub fn new(epsilon: BigRational, k: u64, n_star: u64, t: u64, ell_ref: u64) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        if n_star < 2 {
            return Err(Error::InvalidArgument(format!("ramification constants need n* > 1, got {n_star}")));
        }
        if k == 0 || t == 0 || ell_ref == 0 {
            return Err(Error::InvalidArgument("k, t and the reference level must be positive".into()));
        }
        Ok(BoundConstants {
            epsilon,
            k,
            n_star,
            t,
            ell_ref,
        })
    }

    /// `log2(ℓ^{n*-1} k) / ℓ^{n*-1}`, rounded up to a dyadic.
    pub fn log_term(&self, ell: u64) -> BigRational {
        let p = BigUint::from(ell).pow((self.n_star - 1) as u32);
        let l = log2_dyadic(&(&p * self.k), true);
        l / BigRational::from_integer(BigInt::from(p))
    }

    pub fn c0(&self) -> BigRational {
        let k = rat(self.k);
        let a = &k / BigRational::from_integer(factorial(self.n_star - 2).into());
        let b = &k / BigRational::from_integer(factorial(self.n_star - 1).into());
        a + b + self.log_term(self.ell_ref)
    }

    pub fn c1(&self) -> BigRational {
        self.c0() / rat(self.n_star)
    }

    pub fn c2(&self) -> BigRational {
        let v = (rat(1) + &self.epsilon) * self.c1();
        v.max(rat(2))
    }

    pub fn c3(&self, n_top: u64) -> BigRational {
        let c2 = self.c2();
        rat(n_top) * &c2 * &c2
    }

    /// `2^{(1+ε) c1 m*^{n*}}`, the ground-set size from which a tree of
    /// depth `m* + 1` is guaranteed.
    pub fn ramification_threshold(&self, m_star: u64) -> Tower {
        let e = (rat(1) + &self.epsilon) * self.c1() * rat(m_star).pow(self.n_star as i32);
        Tower {
            height: 1,
            top: ceil_nat(&e),
        }
        .normalized(DEFAULT_CAP_BITS)
    }
}

/// Free parameters of a schedule.
#[derive(Clone, Debug)]
pub struct ScheduleParams {
    pub epsilon: BigRational,
    pub k: u64,
    pub ell_ref: u64,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams {
            epsilon: rat(1),
            k: 1,
            ell_ref: 8,
        }
    }
}

impl ScheduleParams {
    /// `c1` valid for every ramification run of a step-down from `n_top`
    /// to `n_star`: the largest over the arities `n_star + 1 ..= n_top`.
    pub fn c1(&self, n_star: u64, n_top: u64) -> Result<BigRational> {
        let lo = (n_star + 1).max(2);
        let hi = n_top.max(lo);
        let mut best: Option<BigRational> = None;
        for r in lo..=hi {
            let c = BoundConstants::new(self.epsilon.clone(), self.k, r, 1, self.ell_ref)?.c1();
            if best.as_ref().is_none_or(|b| c > *b) {
                best = Some(c);
            }
        }
        Ok(best.unwrap())
    }

    pub fn c2(&self, n_star: u64, n_top: u64) -> Result<BigRational> {
        let v = (rat(1) + &self.epsilon) * self.c1(n_star, n_top)?;
        Ok(v.max(rat(2)))
    }

    pub fn c3(&self, n_star: u64, n_top: u64) -> Result<BigRational> {
        let c2 = self.c2(n_star, n_top)?;
        Ok(rat(n_top) * &c2 * &c2)
    }
}

/// One level `m(n) = beth_height(arg)` of a schedule.
#[derive(Clone, Debug)]
pub struct ScheduleLevel {
    pub n: u64,
    pub height: u32,
    pub arg: BigUint,
    pub value: Tower,
    /// Whether `m(n) >= 2^{(1+ε) c1 m(n-1)^n}` was proved; `None` at the bottom.
    pub step_ok: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct BoundSchedule {
    pub n_star: u64,
    pub n_top: u64,
    pub m: BigUint,
    pub c1: BigRational,
    pub c3: BigRational,
    pub levels: Vec<ScheduleLevel>,
    /// `m_0, ..., m_3` when built by [`schedule_18`].
    pub m_small: Option<[BigUint; 4]>,
}

impl BoundSchedule {
    pub fn level(&self, n: u64) -> Option<&ScheduleLevel> {
        self.levels.iter().find(|l| l.n == n)
    }

    pub fn all_steps_ok(&self) -> bool {
        self.levels.iter().all(|l| l.step_ok != Some(false))
    }
}

/// `m(n) = beth_{n-n*}(ceil(m^{n*+1} c3^{n-n*}))` for `n` in `(n*, n⊗]`,
/// `m(n*) = m`, each step checked exactly.
pub fn schedule_17(n_star: u64, n_top: u64, m: &BigUint, params: &ScheduleParams) -> Result<BoundSchedule> {
    if n_star == 0 || n_top < n_star {
        return Err(Error::InvalidArgument(format!("need n⊗ >= n* >= 1, got n*={n_star}, n⊗={n_top}")));
    }
    let c1 = params.c1(n_star, n_top)?;
    let c3 = params.c3(n_star, n_top)?;
    let base = BigRational::from_integer(BigInt::from(m.pow((n_star + 1) as u32)));
    let c3c = c3.clone();
    let mut s = build_schedule(n_star, n_top, m, c1, c3, |d| {
        if d == 0 {
            m.clone()
        } else {
            ceil_nat(&(&base * c3c.pow(d as i32)))
        }
    });
    check_steps(&mut s, &params.epsilon);
    Ok(s)
}

fn build_schedule(
    n_star: u64,
    n_top: u64,
    m: &BigUint,
    c1: BigRational,
    c3: BigRational,
    arg_at: impl Fn(u64) -> BigUint,
) -> BoundSchedule {
    let mut levels: Vec<ScheduleLevel> = Vec::new();
    for n in n_star..=n_top {
        let d = n - n_star;
        let arg = arg_at(d);
        let value = beth_tower(d as u32, &arg, DEFAULT_CAP_BITS);
        levels.push(ScheduleLevel {
            n,
            height: d as u32,
            arg,
            value,
            step_ok: None,
        });
    }
    BoundSchedule {
        n_star,
        n_top,
        m: m.clone(),
        c1,
        c3,
        levels,
        m_small: None,
    }
}

/// Fills in `step_ok` for every level above the bottom.
fn check_steps(s: &mut BoundSchedule, epsilon: &BigRational) {
    let c = (rat(1) + epsilon) * &s.c1;
    for i in 1..s.levels.len() {
        let (lo, hi) = s.levels.split_at_mut(i);
        let prev = &lo[i - 1];
        let cur = &mut hi[0];
        cur.step_ok = Some(step_holds(prev.height, &prev.arg, cur.height, &cur.arg, prev.n + 1, &c));
    }
}

/// `beth_{d+1}(x1) >= 2^{c beth_d(x0)^e}` where the left side is one level
/// higher than `beth_d(x0)`.
fn step_holds(d: u32, x0: &BigUint, d1: u32, x1: &BigUint, e: u64, c: &BigRational) -> bool {
    debug_assert_eq!(d1, d + 1);
    // take log2 of both sides: beth_d(x1) >= c * beth_d(x0)^e
    if d == 0 {
        let rhs = c * BigRational::from_integer(BigInt::from(x0.pow(e as u32)));
        return BigRational::from_integer(BigInt::from(x1.clone())) >= rhs;
    }
    // beth_{d-1}(x1) >= e * beth_{d-1}(x0) + log2 c, integer on the left
    tower_ge_affine(d - 1, x1, x0, e, ceil_log2(c))
}

/// Decides `beth_e(p) >= a * beth_e(q) + b` exactly (`a >= 1`).
pub fn tower_ge_affine(e: u32, p: &BigUint, q: &BigUint, a: u64, b: i64) -> bool {
    assert!(a >= 1);
    let tq = beth_tower(e, q, DEFAULT_CAP_BITS);
    let tp = Tower {
        height: e,
        top: p.clone(),
    };
    if let Some(qv) = tq.value() {
        let rhs = BigInt::from(qv.clone()) * a + b;
        return match rhs.to_biguint() {
            None => true,
            Some(r) => tp.cmp(&Tower::exact(r)) != Ordering::Less,
        };
    }
    // beth_e(q) = 2^Y with Y huge, so |b| is negligible next to 2^Y and
    // 2^P >= a 2^Y + b comes down to P >= Y + extra
    let log_a = 63 - a.leading_zeros() as i64;
    let extra = if a.is_power_of_two() {
        log_a + i64::from(b > 0)
    } else {
        log_a + 1
    };
    tower_ge_affine(e - 1, p, q, 1, extra)
}

/// The step-down schedule used by the assembly for `ER(n; m)`.
pub fn schedule_18(n: u64, m: u64, params: &ScheduleParams) -> Result<BoundSchedule> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidArgument(format!("schedule needs n >= 2 and m >= 2, got n={n}, m={m}")));
    }
    let m0 = BigUint::from(m);
    let m1 = BigUint::from(2 * n - 1) * binom(2 * n - 3, n - 1) * m0.pow((2 * n - 1) as u32);
    let m2 = &m1 * &m1;
    let m3 = &m2 * 2u32;
    let c1 = params.c1(1, n)?;
    let c3 = params.c3(1, n)?;
    let m3sq = BigRational::from_integer(BigInt::from(&m3 * &m3));
    let c3c = c3.clone();
    let m3c = m3.clone();
    let mut s = build_schedule(1, n, &m3, c1, c3, move |d| {
        if d == 0 {
            m3c.clone()
        } else {
            ceil_nat(&(&m3sq * c3c.pow(d as i32)))
        }
    });
    s.m_small = Some([m0, m1, m2, m3]);
    check_steps(&mut s, &params.epsilon);
    Ok(s)
}

/// `(beth_ℓ(kx) >= k beth_ℓ(x), beth_ℓ(kx) >= beth_ℓ(x)^k)`, exactly.
pub fn check_obs16(ell: u32, k: u64, x: u64) -> (bool, bool) {
    let kx = BigUint::from(k) * x;
    let xb = BigUint::from(x);
    let first = tower_ge_affine(ell, &kx, &xb, k, 0);
    let second = if ell == 0 {
        kx >= xb.pow(k as u32)
    } else {
        tower_ge_affine(ell - 1, &kx, &xb, k, 0)
    };
    (first, second)
}

#[derive(Clone, Debug)]
pub struct LemmaBound {
    pub n: u64,
    pub m: u64,
    /// `beth_{n-1}(c m^{8(2n-1)})`.
    pub threshold: Tower,
    pub lemma_exponent: u64,
    /// `ceil(c3^{n-1} m_3^2)`, the largest level content of the assembly
    /// schedule; `None` for `n < 2`.
    pub schedule_content: Option<BigUint>,
    /// Power of `m` that `m_3^2` grows like: `4(2n-1)`.
    pub schedule_exponent: u64,
}

impl LemmaBound {
    pub fn has_slack(&self) -> bool {
        self.lemma_exponent > self.schedule_exponent
    }
}

pub fn lemma_bound(n: u64, m: u64, c: &BigUint, params: &ScheduleParams) -> Result<LemmaBound> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let lemma_exponent = 8 * (2 * n - 1);
    let arg = c * BigUint::from(m).pow(lemma_exponent as u32);
    let threshold = beth_tower((n - 1) as u32, &arg, DEFAULT_CAP_BITS);
    let schedule_content = if n >= 2 && m >= 2 {
        let s = schedule_18(n, m, params)?;
        Some(s.levels.last().unwrap().arg.clone())
    } else {
        None
    };
    Ok(LemmaBound {
        n,
        m,
        threshold,
        lemma_exponent,
        schedule_content,
        schedule_exponent: 4 * (2 * n - 1),
    })
}

/// `(2^{C(ℓ,r-1)(r-1)})^k (2^{C(ℓ,r-1)})^k t^{C(ℓ,r-2)} (C(ℓ,r-2) k + 1)`:
/// the most successors a level-`ℓ` node of an arity-`r` tree can have.
pub fn successor_bound(ell: u64, r: u64, k: u64, t: u64) -> BigUint {
    assert!(r >= 2, "ramification arity must exceed 1");
    let a = binom(ell, r - 1).to_u64().expect("binomial too large");
    let b = binom(ell, r - 2).to_u64().expect("binomial too large");
    let two_exp = a * (r - 1) * k + a * k;
    (BigUint::one() << two_exp) * BigUint::from(t).pow(b as u32) * (BigUint::from(b) * k + 1u32)
}

/// The chance that one random `m`-subset fails the last repair step:
/// `m^{2n⊗-n*} k (2n⊗-n*) C(2(n⊗-n*)-1, n⊗-n*) / |A|`.
pub fn failure_prob_bound(n_top: u64, n_star: u64, k: u64, m: u64, a_size: u64) -> Result<BigRational> {
    if n_top <= n_star || a_size == 0 {
        return Err(Error::InvalidArgument("need n⊗ > n* and a nonempty set".into()));
    }
    let e = 2 * n_top - n_star;
    let num = BigUint::from(m).pow(e as u32) * k * e * binom(2 * (n_top - n_star) - 1, n_top - n_star);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(a_size)))
}

/// Whether the failure bound is strictly below one, so that a good subset
/// is guaranteed to exist.
pub fn failure_bound_strict(bound: &BigRational) -> bool {
    *bound < BigRational::one()
}

/// Constants left open by the older bounds; all default to one.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonConstants {
    pub c: u64,
    pub c1: u64,
    pub c2: u64,
    pub c2_star: u64,
    pub ck: u64,
    pub ck_star: u64,
    pub lemma_c: u64,
}

impl Default for ComparisonConstants {
    fn default() -> Self {
        ComparisonConstants {
            c: 1,
            c1: 1,
            c2: 1,
            c2_star: 1,
            ck: 1,
            ck_star: 1,
            lemma_c: 1,
        }
    }
}

/// One bound in a comparison row.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCell {
    pub name: String,
    pub kind: &'static str,
    pub height: u32,
    pub value: String,
    #[serde(skip)]
    pub tower: Tower,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub n: u64,
    pub m: u64,
    pub cells: Vec<BoundCell>,
}

fn cell(name: &str, kind: &'static str, height: u32, arg: BigUint) -> BoundCell {
    let tower = beth_tower(height, &arg, DEFAULT_CAP_BITS);
    BoundCell {
        name: name.into(),
        kind,
        height,
        value: render(height, &arg),
        tower,
    }
}

/// `beth_h(arg)`, keeping the argument visible.
pub fn render(height: u32, arg: &BigUint) -> String {
    let t = beth_tower(height, arg, DEFAULT_CAP_BITS);
    if let Some(v) = t.value() {
        return crate::combinatorics::short_decimal(v);
    }
    let a = crate::combinatorics::short_decimal(arg);
    match height {
        1 => format!("2^{a}"),
        h => format!("beth_{h}({a})"),
    }
}

/// Bounds on `ER(n; m)` side by side for each `m` in the range.
pub fn comparison_table(n: u64, ms: impl IntoIterator<Item = u64>, k: &ComparisonConstants) -> Result<Vec<ComparisonRow>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut rows = Vec::new();
    for m in ms {
        if m < 2 {
            return Err(Error::InvalidArgument("m must be at least 2".into()));
        }
        let mb = BigUint::from(m);
        let mut cells = Vec::new();
        if n == 2 {
            cells.push(cell("LR93 lower 2^{c m^2}", "lower", 1, &mb * &mb * k.c));
            // 2^{2^{c1^{m^3}}}
            let top = BigUint::from(k.c1).pow((m * m * m) as u32);
            cells.push(cell("LR93 upper 2^2^{c1^{m^3}}", "upper", 2, top));
            cells.push(cell("LR94(i) lower 2^{c2 m^2}", "lower", 1, &mb * &mb * k.c2));
            let log_m = log2_dyadic(&mb, true);
            let e = rat(k.c2_star) * rat(m * m) * log_m;
            cells.push(cell("LR94(i) upper 2^{c2* m^2 log m}", "upper", 1, ceil_nat(&e)));
        }
        if n >= 2 {
            // ER(n; m) is ER((n-1)+1; m), with k read as the arity n
            let h = (n - 1) as u32;
            cells.push(cell("LR94(ii) lower beth_{n-1}(ck m^2)", "lower", h, &mb * &mb * k.ck));
            let log_m = log2_dyadic(&mb, false);
            let e = rat(k.ck_star) * BigRational::from_integer(BigInt::from(mb.pow((2 * n - 1) as u32))) / log_m;
            cells.push(cell("LR94(ii) upper beth_n(ck* m^{2k-1}/log m)", "upper", n as u32, ceil_nat(&e)));
        }
        let lemma = BigUint::from(k.lemma_c) * mb.pow((8 * (2 * n - 1)) as u32);
        cells.push(cell("lemma beth_{n-1}(c m^{8(2n-1)})", "upper", (n - 1) as u32, lemma));
        rows.push(ComparisonRow { n, m, cells });
    }
    Ok(rows)
}

/// Aligned text rendering of a table.
pub fn render_table(rows: &[ComparisonRow]) -> String {
    let width = rows
        .iter()
        .flat_map(|r| r.cells.iter().map(|c| c.name.len()))
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!("ER({};{})\n", r.n, r.m));
        for c in &r.cells {
            out.push_str(&format!("  {:<width$}  {:<5}  h={}  {}\n", c.name, c.kind, c.height, c.value));
        }
    }
    out
}

/// Rational as `p/q`, or `p` when integral.
pub fn show_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q` or a decimal like `0.25` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{i}{f}").parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(f.len() as u32);
        return Ok(BigRational::new(digits, den));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    /// beth by repeated shifting, no caps.
    fn beth_direct(level: u32, x: u64) -> BigUint {
        let mut v = big(x);
        for _ in 0..level {
            v = BigUint::one() << v.to_u64().unwrap();
        }
        v
    }

    #[test]
    fn successor_bound_values() {
        assert_eq!(successor_bound(2, 2, 1, 1), big(32));
        assert_eq!(successor_bound(0, 2, 1, 1), big(2));
        // r = 3, ℓ = 3, k = 2, t = 3: C(3,2) = 3, C(3,1) = 3
        let want = (big(1) << (3 * 2 * 2 + 3 * 2)) * big(27) * big(3 * 2 + 1);
        assert_eq!(successor_bound(3, 3, 2, 3), want);
    }

    #[test]
    fn failure_bound_values() {
        assert_eq!(failure_prob_bound(2, 1, 1, 2, 48).unwrap(), q(1, 2));
        let at = failure_prob_bound(2, 1, 1, 2, 24).unwrap();
        assert_eq!(at, q(1, 1));
        assert!(!failure_bound_strict(&at));
        assert!(failure_bound_strict(&failure_prob_bound(2, 1, 1, 2, 25).unwrap()));
        // n⊗ = 3, n* = 1: 2^5 * 5 * C(3, 2) = 480
        assert_eq!(failure_prob_bound(3, 1, 1, 2, 1).unwrap(), q(480, 1));
        assert!(failure_prob_bound(1, 1, 1, 2, 10).is_err());
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(&q(1, 1)), 0);
        assert_eq!(ceil_log2(&q(3, 2)), 1);
        assert_eq!(ceil_log2(&q(2, 1)), 1);
        assert_eq!(ceil_log2(&q(5, 1)), 3);
        assert_eq!(ceil_log2(&q(1, 3)), -1);
        assert_eq!(ceil_log2(&q(1, 4)), -2);
        assert_eq!(ceil_log2(&q(19, 8)), 2);
    }

    #[test]
    fn log2_bounds_bracket_the_value() {
        for x in [3u64, 5, 6, 7, 10, 12, 100, 1000, 12345] {
            let lo = log2_dyadic(&big(x), false);
            let hi = log2_dyadic(&big(x), true);
            assert!(lo < hi);
            assert!(&hi - &lo <= q(1, 1 << 30));
            // 2^{lo} <= x <= 2^{hi} checked on 1024th powers
            let s = BigRational::from_integer(BigInt::from(1024));
            let lo_e = (&lo * &s).floor().to_integer().to_u64().unwrap();
            let hi_e = (&hi * &s).ceil().to_integer().to_u64().unwrap();
            let xp = big(x).pow(1024);
            assert!(BigUint::one() << lo_e <= xp);
            assert!(xp <= BigUint::one() << hi_e);
        }
        assert_eq!(log2_dyadic(&big(8), true), q(3, 1));
    }

    #[test]
    fn default_constants() {
        let c = BoundConstants::new(q(1, 1), 1, 2, 1, 8).unwrap();
        assert_eq!(c.log_term(8), q(3, 8));
        assert_eq!(c.c0(), q(19, 8));
        assert_eq!(c.c1(), q(19, 16));
        assert_eq!(c.c2(), q(19, 8));
        assert_eq!(c.c3(2), q(361, 32));
        assert!(BoundConstants::new(q(1, 1), 1, 1, 1, 8).is_err());
        assert!(BoundConstants::new(q(0, 1), 1, 2, 1, 8).is_err());
        // small c1 gets lifted to 2
        let c = BoundConstants::new(q(1, 100), 1, 5, 1, 8).unwrap();
        assert!(c.c1() < q(1, 1));
        assert_eq!(c.c2(), q(2, 1));
    }

    #[test]
    fn ramification_threshold_form() {
        let c = BoundConstants::new(q(1, 1), 1, 2, 1, 8).unwrap();
        // (1+1) * 19/16 * 3^2 = 171/8 -> 22
        assert_eq!(c.ramification_threshold(3), Tower::exact(big(1) << 22u32));
    }

    #[test]
    fn schedule_18_values() {
        let s = schedule_18(2, 2, &ScheduleParams::default()).unwrap();
        let [m0, m1, m2, m3] = s.m_small.clone().unwrap();
        assert_eq!((m0, m1, m2, m3), (big(2), big(24), big(576), big(1152)));
        assert_eq!(s.level(1).unwrap().value, Tower::exact(big(1152)));
        let top = s.level(2).unwrap();
        assert_eq!(top.height, 1);
        assert_eq!(top.arg, ceil_nat(&(&s.c3 * rat(1152 * 1152))));
        assert!(s.all_steps_ok());
        // m_1 = 3 * C(1,1) * 3^3
        let s = schedule_18(2, 3, &ScheduleParams::default()).unwrap();
        let [_, m1, m2, m3] = s.m_small.unwrap();
        assert_eq!(m1, big(81));
        assert_eq!(m2, big(81 * 81));
        assert_eq!(m3, big(2 * 81 * 81));
        // n = 3: m_1 = 5 * C(3,2) * m^5
        let s = schedule_18(3, 2, &ScheduleParams::default()).unwrap();
        assert_eq!(s.m_small.as_ref().unwrap()[1], big(5 * 3 * 32));
        assert_eq!(s.levels.len(), 3);
        assert!(s.all_steps_ok());
    }

    #[test]
    fn schedule_17_bottom_and_first_step() {
        let p = ScheduleParams::default();
        let s = schedule_17(1, 2, &big(3), &p).unwrap();
        assert_eq!(s.level(1).unwrap().value, Tower::exact(big(3)));
        let l2 = s.level(2).unwrap();
        assert_eq!(l2.height, 1);
        assert_eq!(l2.arg, ceil_nat(&(rat(9) * &s.c3)));
        assert_eq!(l2.step_ok, Some(true));
        let s = schedule_17(3, 3, &big(4), &p).unwrap();
        assert_eq!(s.levels.len(), 1);
        assert_eq!(s.levels[0].step_ok, None);
    }

    #[test]
    fn schedule_17_steps_hold_on_grid() {
        let p = ScheduleParams::default();
        for n_top in 1..=5 {
            for n_star in 1..=n_top {
                for m in 1..=6 {
                    let s = schedule_17(n_star, n_top, &big(m), &p).unwrap();
                    assert!(s.all_steps_ok(), "n*={n_star} n⊗={n_top} m={m}");
                }
            }
        }
    }

    #[test]
    fn tiny_c3_breaks_a_step() {
        // with c3 far below (1+ε) c1 the inequality must fail, proving the
        // checker can say no
        let mut s = schedule_17(1, 2, &big(4), &ScheduleParams::default()).unwrap();
        s.levels[1].arg = big(1);
        s.levels[1].value = beth_tower(1, &big(1), DEFAULT_CAP_BITS);
        check_steps(&mut s, &q(1, 1));
        assert_eq!(s.levels[1].step_ok, Some(false));
    }

    #[test]
    fn tower_affine_matches_direct_evaluation() {
        for e in 0..=2u32 {
            for p in 1..=4u64 {
                for qq in 1..=4u64 {
                    for a in 1..=5u64 {
                        for b in -5..=5i64 {
                            let lhs = BigInt::from(beth_direct(e, p));
                            let rhs = BigInt::from(beth_direct(e, qq)) * a + b;
                            assert_eq!(
                                tower_ge_affine(e, &big(p), &big(qq), a, b),
                                lhs >= rhs,
                                "e={e} p={p} q={qq} a={a} b={b}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tower_affine_symbolic_branch() {
        // beth_3(5) = 2^(2^32) is beyond the cap
        assert!(beth_tower(3, &big(5), DEFAULT_CAP_BITS).value().is_none());
        assert!(tower_ge_affine(3, &big(5), &big(5), 1, 0));
        assert!(!tower_ge_affine(3, &big(5), &big(5), 2, 0));
        assert!(!tower_ge_affine(3, &big(5), &big(5), 1, 1));
        assert!(tower_ge_affine(3, &big(5), &big(5), 1, -1));
        assert!(tower_ge_affine(3, &big(6), &big(5), 1000, 7));
        assert!(!tower_ge_affine(3, &big(5), &big(6), 1, 0));
    }

    #[test]
    fn obs16_examples_and_grid() {
        assert_eq!(check_obs16(1, 2, 2), (true, true));
        assert_eq!(check_obs16(2, 2, 2), (true, true));
        for ell in 1..=4 {
            for k in 2..=5 {
                for x in 2..=5 {
                    assert_eq!(check_obs16(ell, k, x), (true, true), "ℓ={ell} k={k} x={x}");
                }
            }
        }
        // outside the hypotheses the second inequality can fail: ℓ = 0
        assert_eq!(check_obs16(0, 2, 3), (true, false));
    }

    #[test]
    fn obs16_matches_direct_evaluation() {
        for ell in 1..=2u32 {
            for k in 2..=4u64 {
                for x in 2..=4u64 {
                    let lhs = beth_direct(ell, k * x);
                    let bx = beth_direct(ell, x);
                    let want = (lhs >= &bx * k, lhs >= bx.pow(k as u32));
                    assert_eq!(check_obs16(ell, k, x), want);
                }
            }
        }
    }

    #[test]
    fn lemma_bound_values() {
        let p = ScheduleParams::default();
        let l = lemma_bound(1, 3, &big(2), &p).unwrap();
        assert_eq!(l.threshold, Tower::exact(big(2 * 3u64.pow(8))));
        assert_eq!(l.schedule_content, None);
        let l = lemma_bound(2, 2, &big(1), &p).unwrap();
        assert_eq!(l.threshold.height, 1);
        assert_eq!(l.threshold.top, big(1) << 24u32);
        assert_eq!(l.lemma_exponent, 24);
        assert_eq!(l.schedule_exponent, 12);
        assert!(l.has_slack());
        assert!(l.schedule_content.is_some());
    }

    #[test]
    fn comparison_rows() {
        let rows = comparison_table(2, 2..=6, &ComparisonConstants::default()).unwrap();
        let r4 = rows.iter().find(|r| r.m == 4).unwrap();
        assert_eq!(r4.cells[0].value, "65536");
        let lemma = r4.cells.last().unwrap();
        assert_eq!(lemma.height, 1);
        assert_eq!(lemma.tower, Tower { height: 1, top: big(1) << 48u32 });
        for w in rows.windows(2) {
            for (a, b) in w[0].cells.iter().zip(&w[1].cells) {
                assert!(a.tower <= b.tower, "{} not monotone", a.name);
            }
        }
        for n in 1..=4 {
            let rows = comparison_table(n, [3], &ComparisonConstants::default()).unwrap();
            assert_eq!(rows[0].cells.last().unwrap().height, (n - 1) as u32);
        }
        assert!(render_table(&rows).contains("ER(2;4)"));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1").unwrap(), q(1, 1));
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(show_rational(&q(6, 4)), "3/2");
    }
}
