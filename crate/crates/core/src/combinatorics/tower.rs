use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Values wider than this many bits are kept in symbolic tower form.
pub const DEFAULT_CAP_BITS: u64 = 1 << 24;

/// `beth_height(top)`: a tower of `height` twos with `top` on the top.
///
/// Kept normalized so that `top` is never small enough to be expanded under
/// the size cap it was built with. Comparison is exact regardless of how
/// two towers were normalized.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tower {
    pub height: u32,
    pub top: BigUint,
}

impl Tower {
    pub fn exact(value: BigUint) -> Self {
        Tower {
            height: 0,
            top: value,
        }
    }

    /// Expands levels while the next value would fit in `cap_bits` bits.
    pub fn normalized(mut self, cap_bits: u64) -> Self {
        while self.height > 0 {
            match self.top.to_u64() {
                Some(e) if e < cap_bits => {
                    self.top = BigUint::one() << e;
                    self.height -= 1;
                }
                _ => break,
            }
        }
        self
    }

    pub fn value(&self) -> Option<&BigUint> {
        (self.height == 0).then_some(&self.top)
    }

    /// `log2` of the tower when it is exactly a power of two of a tower.
    pub fn log2(&self) -> Option<Tower> {
        (self.height > 0).then(|| Tower {
            height: self.height - 1,
            top: self.top.clone(),
        })
    }

    /// `2^self`.
    pub fn exp2(&self) -> Tower {
        Tower {
            height: self.height + 1,
            top: self.top.clone(),
        }
    }
}

/// `beth_level(m)` as a normalized [`Tower`] under the given cap.
pub fn beth_tower(level: u32, m: &BigUint, cap_bits: u64) -> Tower {
    Tower {
        height: level,
        top: m.clone(),
    }
    .normalized(cap_bits)
}

/// Exact `beth_level(m)`, or the symbolic tower when the value would exceed
/// [`DEFAULT_CAP_BITS`].
pub fn beth(level: u32, m: &BigUint) -> Result<BigUint, Tower> {
    let t = beth_tower(level, m, DEFAULT_CAP_BITS);
    if t.height == 0 {
        Ok(t.top)
    } else {
        Err(t)
    }
}

/// Compares `beth_d(x)` with `y` for `d >= 1`, exactly.
fn cmp_raised(mut d: u32, mut x: BigUint, y: &BigUint) -> Ordering {
    let y_bits = BigUint::from(y.bits());
    while d > 0 {
        // beth_d(x) >= 2^x, and 2^x > y once x >= bits(y)
        if x >= y_bits {
            return Ordering::Greater;
        }
        let e = x.to_u64().expect("bounded by the bit length of y");
        x = BigUint::one() << e;
        d -= 1;
    }
    x.cmp(y)
}

impl Ord for Tower {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.height.cmp(&other.height) {
            Ordering::Equal => self.top.cmp(&other.top),
            Ordering::Greater => cmp_raised(self.height - other.height, self.top.clone(), &other.top),
            Ordering::Less => cmp_raised(other.height - self.height, other.top.clone(), &self.top).reverse(),
        }
    }
}

impl PartialOrd for Tower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Tower {}

/// Decimal for modest numbers, bit length otherwise.
pub fn short_decimal(x: &BigUint) -> String {
    if x.bits() <= 200 {
        x.to_string()
    } else if x.is_zero() {
        "0".into()
    } else {
        format!("<{}-bit number>", x.bits())
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.height {
            0 => f.write_str(&short_decimal(&self.top)),
            1 => write!(f, "2^{}", short_decimal(&self.top)),
            h => write!(f, "beth_{}({})", h, short_decimal(&self.top)),
        }
    }
}
