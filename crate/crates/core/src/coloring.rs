//! n-place colorings of `[N]^n`, the built-in generators, and the text file
//! format.
//!
//! ```text
//! CANON v1 <n> <N>
//! # one line per n-subset, any order
//! i1 i2 ... in c
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonicity::Pattern;
use crate::combinatorics::{binom_u64, for_each_subset, is_strictly_increasing, rank_unchecked, unrank};
use crate::error::{Error, Result};

/// Anything that assigns a color to increasing tuples of a fixed length.
///
/// Implemented by stored [`Coloring`]s and by the derived functions the
/// canonization pipeline builds on top of them.
pub trait NPlace {
    fn arity(&self) -> usize;

    /// Color of a strictly increasing tuple. Behavior outside the function's
    /// domain is unspecified.
    fn color(&self, tuple: &[u32]) -> u64;
}

impl<T: NPlace + ?Sized> NPlace for &T {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn color(&self, tuple: &[u32]) -> u64 {
        (**self).color(tuple)
    }
}

impl<T: NPlace + ?Sized> NPlace for Box<T> {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn color(&self, tuple: &[u32]) -> u64 {
        (**self).color(tuple)
    }
}

/// An n-place function given by a closure.
pub struct FnColoring<F> {
    arity: usize,
    f: F,
}

impl<F: Fn(&[u32]) -> u64> FnColoring<F> {
    pub fn new(arity: usize, f: F) -> Self {
        FnColoring { arity, f }
    }
}

impl<F: Fn(&[u32]) -> u64> NPlace for FnColoring<F> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn color(&self, tuple: &[u32]) -> u64 {
        (self.f)(tuple)
    }
}

/// A total coloring of `[N]^n`, stored densely by colex rank.
///
/// Colors are normalized to `0, 1, ...` in order of first appearance along
/// colex order, so two colorings that differ only by renaming colors compare
/// equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    arity: usize,
    domain: u32,
    values: Vec<u32>,
}

impl Coloring {
    /// Builds from raw colors indexed by colex rank; colors are normalized.
    pub fn from_values<C: Copy + Eq + std::hash::Hash>(arity: usize, domain: u32, raw: &[C]) -> Result<Self> {
        let expected = tuple_count(arity, domain)?;
        if raw.len() as u64 != expected {
            return Err(Error::InvalidArgument(format!(
                "coloring of [{domain}]^{arity} needs {expected} values, got {}",
                raw.len()
            )));
        }
        Ok(Coloring {
            arity,
            domain,
            values: normalize(raw),
        })
    }

    /// Tabulates `f` on every tuple of `[domain]^arity`.
    pub fn tabulate<F: FnMut(&[u32]) -> u64>(arity: usize, domain: u32, mut f: F) -> Result<Self> {
        let count = tuple_count(arity, domain)?;
        let mut raw = Vec::with_capacity(count as usize);
        let ground: Vec<u32> = (1..=domain).collect();
        for_each_subset(&ground, arity, |u| raw.push(f(u)));
        Self::from_values(arity, domain, &raw)
    }

    pub fn domain(&self) -> u32 {
        self.domain
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn color_count(&self) -> usize {
        self.values.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// Color of `u`, checking arity and domain.
    pub fn eval(&self, u: &[u32]) -> Result<u32> {
        if u.len() != self.arity {
            return Err(Error::WrongArity {
                expected: self.arity,
                got: u.len(),
            });
        }
        if !is_strictly_increasing(u) || u.first().is_some_and(|&x| x == 0) {
            return Err(Error::NotASortedSubset(u.to_vec()));
        }
        if u.last().is_some_and(|&x| x > self.domain) {
            return Err(Error::OutsideDomain {
                tuple: u.to_vec(),
                domain: self.domain,
            });
        }
        Ok(self.values[rank_unchecked(u) as usize])
    }

    /// Applies an injective renaming of colors and renormalizes.
    pub fn recolored<F: Fn(u32) -> u64>(&self, rename: F) -> Coloring {
        let raw: Vec<u64> = self.values.iter().map(|&c| rename(c)).collect();
        Coloring {
            arity: self.arity,
            domain: self.domain,
            values: normalize(&raw),
        }
    }

    /// Serializes in the text format, colex order, normalized colors.
    pub fn to_text(&self) -> String {
        let mut out = format!("CANON v1 {} {}\n", self.arity, self.domain);
        for (r, &c) in self.values.iter().enumerate() {
            let u = unrank(r as u64, self.arity);
            for x in u.as_slice() {
                write!(out, "{x} ").unwrap();
            }
            writeln!(out, "{c}").unwrap();
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Coloring> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    /// Parses the text format. `path` is only used in error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Coloring> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut header: Option<(usize, u32)> = None;
        let mut raw: Vec<Option<u64>> = Vec::new();
        let mut seen_on: Vec<usize> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let content = line.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let Some((n, domain)) = header else {
                if tokens.len() != 4 || tokens[0] != "CANON" || tokens[1] != "v1" {
                    return Err(err(lineno, "expected header `CANON v1 <n> <N>`".into()));
                }
                let n: usize = tokens[2].parse().map_err(|_| err(lineno, format!("bad arity `{}`", tokens[2])))?;
                let domain: u32 = tokens[3]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad domain size `{}`", tokens[3])))?;
                if n == 0 {
                    return Err(err(lineno, "arity must be at least 1".into()));
                }
                let count = tuple_count(n, domain).map_err(|e| err(lineno, e.to_string()))?;
                raw = vec![None; count as usize];
                seen_on = vec![0; count as usize];
                header = Some((n, domain));
                continue;
            };
            if tokens.len() != n + 1 {
                return Err(err(lineno, format!("expected {} numbers, found {}", n + 1, tokens.len())));
            }
            let mut tuple = Vec::with_capacity(n);
            for t in &tokens[..n] {
                let x: u32 = t.parse().map_err(|_| err(lineno, format!("bad element `{t}`")))?;
                if x == 0 || x > domain {
                    return Err(err(lineno, format!("element {x} outside [1, {domain}]")));
                }
                tuple.push(x);
            }
            if !is_strictly_increasing(&tuple) {
                return Err(err(lineno, format!("tuple {tuple:?} is not strictly increasing")));
            }
            let c: u64 = tokens[n]
                .parse()
                .map_err(|_| err(lineno, format!("bad color `{}`", tokens[n])))?;
            let r = rank_unchecked(&tuple) as usize;
            if raw[r].is_some() {
                return Err(err(
                    lineno,
                    format!("duplicate tuple {tuple:?} (first given on line {})", seen_on[r]),
                ));
            }
            raw[r] = Some(c);
            seen_on[r] = lineno;
        }
        let Some((n, domain)) = header else {
            return Err(err(1, "empty coloring file".into()));
        };
        let missing = raw.iter().filter(|c| c.is_none()).count() as u64;
        if missing > 0 {
            let first = raw.iter().position(|c| c.is_none()).unwrap();
            return Err(Error::IncompleteColoring {
                missing,
                expected: raw.len() as u64,
                first: unrank(first as u64, n).into_vec(),
            });
        }
        let raw: Vec<u64> = raw.into_iter().map(Option::unwrap).collect();
        Coloring::from_values(n, domain, &raw)
    }
}

impl NPlace for Coloring {
    fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    fn color(&self, tuple: &[u32]) -> u64 {
        u64::from(self.values[rank_unchecked(tuple) as usize])
    }
}

/// A function with at most `bound` distinct values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueMap {
    coloring: Coloring,
    bound: usize,
}

impl ValueMap {
    pub fn new(coloring: Coloring, bound: usize) -> Result<Self> {
        if coloring.color_count() > bound {
            return Err(Error::InvalidArgument(format!(
                "value map uses {} values but the bound is {bound}",
                coloring.color_count()
            )));
        }
        Ok(ValueMap { coloring, bound })
    }

    /// The constant function `0`.
    pub fn constant(arity: usize, domain: u32) -> Result<Self> {
        let raw = vec![0u8; tuple_count(arity, domain)? as usize];
        Self::new(Coloring::from_values(arity, domain, &raw)?, 1)
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }
}

impl NPlace for ValueMap {
    fn arity(&self) -> usize {
        self.coloring.arity
    }

    fn color(&self, tuple: &[u32]) -> u64 {
        self.coloring.color(tuple)
    }
}

/// Built-in coloring families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Independent uniform colors from `{0, ..., colors-1}`.
    Random { colors: u32 },
    /// Color = the projection of the tuple onto the positions of the pattern.
    Canonical { pattern: Pattern },
    Constant,
    Injective,
    /// Color = the element at 1-based position `position`.
    MinPosition { position: usize },
}

/// Generates a coloring of `[domain]^arity`; deterministic in all inputs.
pub fn generate(kind: &Generator, arity: usize, domain: u32, seed: u64) -> Result<Coloring> {
    match kind {
        Generator::Random { colors } => {
            if *colors == 0 {
                return Err(Error::InvalidArgument("random coloring needs at least one color".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Coloring::tabulate(arity, domain, |_| u64::from(rng.gen_range(0..*colors)))
        }
        Generator::Canonical { pattern } => {
            pattern.check_arity(arity)?;
            let positions = pattern.positions();
            let mut ids: HashMap<Vec<u32>, u64> = HashMap::new();
            Coloring::tabulate(arity, domain, |u| {
                let key: Vec<u32> = positions.iter().map(|&p| u[p - 1]).collect();
                let next = ids.len() as u64;
                *ids.entry(key).or_insert(next)
            })
        }
        Generator::Constant => Coloring::tabulate(arity, domain, |_| 0),
        Generator::Injective => {
            let mut next = 0u64;
            Coloring::tabulate(arity, domain, |_| {
                next += 1;
                next
            })
        }
        Generator::MinPosition { position } => {
            if *position == 0 || *position > arity {
                return Err(Error::InvalidArgument(format!(
                    "position {position} outside 1..={arity}"
                )));
            }
            Coloring::tabulate(arity, domain, |u| u64::from(u[position - 1]))
        }
    }
}

/// `C(domain, arity)`, refusing sizes that cannot be stored densely.
pub fn tuple_count(arity: usize, domain: u32) -> Result<u64> {
    match binom_u64(u64::from(domain), arity as u64) {
        Some(c) if c <= u64::from(u32::MAX) => Ok(c),
        _ => Err(Error::InvalidArgument(format!(
            "[{domain}]^{arity} is too large for dense storage"
        ))),
    }
}

fn normalize<C: Copy + Eq + std::hash::Hash>(raw: &[C]) -> Vec<u32> {
    let mut ids: HashMap<C, u32> = HashMap::new();
    raw.iter()
        .map(|c| {
            let next = ids.len() as u32;
            *ids.entry(*c).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonicity::{find_patterns, Pattern};
    use crate::combinatorics::SortedSubset;
    use std::path::PathBuf;

    fn p() -> PathBuf {
        PathBuf::from("test.canon")
    }

    #[test]
    fn eval_examples() {
        let c = generate(&Generator::Constant, 2, 5, 0).unwrap();
        assert_eq!(c.eval(&[2, 4]).unwrap(), 0);

        let inj = generate(&Generator::Injective, 2, 5, 0).unwrap();
        for r in 0..10u64 {
            let u = unrank(r, 2);
            assert_eq!(u64::from(inj.eval(u.as_slice()).unwrap()), r);
        }

        let min = generate(&Generator::MinPosition { position: 1 }, 2, 6, 0).unwrap();
        assert_eq!(min.eval(&[2, 5]).unwrap(), min.eval(&[2, 3]).unwrap());
        assert_ne!(min.eval(&[2, 5]).unwrap(), min.eval(&[1, 5]).unwrap());

        assert!(matches!(c.eval(&[1]), Err(Error::WrongArity { .. })));
        assert!(matches!(c.eval(&[1, 6]), Err(Error::OutsideDomain { .. })));
        assert!(c.eval(&[3, 3]).is_err());
    }

    #[test]
    fn canonical_generator_extremes() {
        let empty = generate(&Generator::Canonical { pattern: Pattern::EMPTY }, 3, 6, 0).unwrap();
        assert_eq!(empty, generate(&Generator::Constant, 3, 6, 0).unwrap());
        let full = generate(&Generator::Canonical { pattern: Pattern::full(3) }, 3, 6, 0).unwrap();
        assert_eq!(full, generate(&Generator::Injective, 3, 6, 0).unwrap());
    }

    #[test]
    fn canonical_generator_is_canonical() {
        for bits in 0..4u32 {
            let v = Pattern::from_bits(bits);
            for domain in 2..=10 {
                let f = generate(&Generator::Canonical { pattern: v }, 2, domain, 0).unwrap();
                let pats = find_patterns(&f, &SortedSubset::interval(domain)).unwrap();
                assert!(pats.contains(&v), "v={v} N={domain}");
            }
        }
    }

    #[test]
    fn random_is_deterministic() {
        let a = generate(&Generator::Random { colors: 2 }, 2, 4, 7).unwrap();
        let b = generate(&Generator::Random { colors: 2 }, 2, 4, 7).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        let c = generate(&Generator::Random { colors: 3 }, 2, 12, 1).unwrap();
        assert!(c.color_count() <= 3);
    }

    #[test]
    fn normalization_forgets_names() {
        let a = Coloring::from_values(1, 4, &[7u64, 7, 3, 9]).unwrap();
        let b = Coloring::from_values(1, 4, &[0u64, 0, 1, 2]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.recolored(|c| u64::from(c) * 31 + 5), a);
    }

    #[test]
    fn text_round_trip() {
        let f = generate(&Generator::Random { colors: 3 }, 3, 7, 11).unwrap();
        let text = f.to_text();
        let g = Coloring::parse(&text, &p()).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.to_text(), text);
    }

    #[test]
    fn parse_accepts_any_line_order_and_comments() {
        let text = "# a comment\nCANON v1 2 3\n2 3 5 # trailing\n1 3 9\n\n1 2 9\n";
        let f = Coloring::parse(text, &p()).unwrap();
        assert_eq!(f.values(), &[0, 0, 1]);
    }

    #[test]
    fn parse_errors() {
        let dup = "CANON v1 1 2\n1 0\n2 0\n1 1\n";
        match Coloring::parse(dup, &p()) {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("{other:?}"),
        }
        let missing = "CANON v1 2 3\n1 2 0\n1 3 0\n";
        match Coloring::parse(missing, &p()) {
            Err(e @ Error::IncompleteColoring { .. }) => {
                assert!(e.to_string().contains("incomplete coloring"));
            }
            other => panic!("{other:?}"),
        }
        let decreasing = "CANON v1 2 3\n2 1 0\n";
        assert!(matches!(Coloring::parse(decreasing, &p()), Err(Error::Parse { line: 2, .. })));
        let header = "CANON v2 2 3\n";
        assert!(matches!(Coloring::parse(header, &p()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn value_map_bound() {
        let f = generate(&Generator::Random { colors: 3 }, 2, 8, 2).unwrap();
        assert!(ValueMap::new(f.clone(), 1).is_err());
        assert!(ValueMap::new(f, 3).is_ok());
        let g = ValueMap::constant(2, 5).unwrap();
        assert_eq!(g.color(&[1, 4]), 0);
    }
}
