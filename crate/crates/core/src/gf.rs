//! Arithmetic over GF(2^ν) using log/antilog tables.

use crate::error::{Error, Result};

/// Smallest supported extension degree.
pub const MIN_NU: u32 = 3;
/// Largest supported extension degree.
pub const MAX_NU: u32 = 16;

/// Conventional primitive polynomials for ν = 3..=16, bit `i` holding the
/// coefficient of `x^i`.
const PRIMITIVE_POLYS: [u32; 14] = [
    0x0000b, // x^3 + x + 1
    0x00013, // x^4 + x + 1
    0x00025, // x^5 + x^2 + 1
    0x00043, // x^6 + x + 1
    0x00089, // x^7 + x^3 + 1
    0x0011d, // x^8 + x^4 + x^3 + x^2 + 1
    0x00211, // x^9 + x^4 + 1
    0x00409, // x^10 + x^3 + 1
    0x00805, // x^11 + x^2 + 1
    0x01053, // x^12 + x^6 + x^4 + x + 1
    0x0201b, // x^13 + x^4 + x^3 + x + 1
    0x04443, // x^14 + x^10 + x^6 + x + 1
    0x08003, // x^15 + x + 1
    0x1100b, // x^16 + x^12 + x^3 + x + 1
];

/// Returns the fixed primitive polynomial used for degree `nu`.
pub fn primitive_poly(nu: u32) -> Result<u32> {
    if !(MIN_NU..=MAX_NU).contains(&nu) {
        return Err(Error::UnsupportedFieldDegree(nu));
    }
    Ok(PRIMITIVE_POLYS[(nu - MIN_NU) as usize])
}

/// Log/antilog tables for GF(2^ν). Elements are stored as `u16` bitmasks in
/// the polynomial basis; `alpha` is the class of `x`.
#[derive(Clone, Debug)]
pub struct FieldTables {
    nu: u32,
    primitive_poly: u32,
    /// `exp[i] = α^i` for `i` in `0..2·order`, doubled so products of two
    /// logs index without a reduction.
    exp: Vec<u16>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
}

impl FieldTables {
    /// Builds the tables from the conventional primitive polynomial for `nu`.
    pub fn new(nu: u32) -> Result<Self> {
        let poly = primitive_poly(nu)?;
        Self::with_poly(nu, poly)
    }

    /// Builds tables for an explicit degree-`nu` polynomial, rejecting it if
    /// `x` does not generate the full multiplicative group.
    pub fn with_poly(nu: u32, poly: u32) -> Result<Self> {
        if !(MIN_NU..=MAX_NU).contains(&nu) {
            return Err(Error::UnsupportedFieldDegree(nu));
        }
        if poly >> nu != 1 {
            return Err(Error::NotPrimitive { nu, poly });
        }
        let size = 1usize << nu;
        let order = size - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![u32::MAX; size];
        let mut x: u32 = 1;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            if log[x as usize] != u32::MAX {
                return Err(Error::NotPrimitive { nu, poly });
            }
            *slot = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << nu) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::NotPrimitive { nu, poly });
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        log[0] = 0;
        Ok(Self { nu, primitive_poly: poly, exp, log })
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Multiplicative group order `2^ν − 1`.
    pub fn order(&self) -> usize {
        (1usize << self.nu) - 1
    }

    /// `α^power` for any nonnegative power.
    #[inline]
    pub fn alpha_pow(&self, power: usize) -> u16 {
        self.exp[power % self.order()]
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log(&self, x: u16) -> usize {
        debug_assert!(x != 0, "log of zero");
        self.log[x as usize] as usize
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        debug_assert!(a != 0, "inverse of zero");
        let order = self.order();
        self.exp[(order - self.log[a as usize] as usize) % order]
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        if a == 0 {
            0
        } else {
            let order = self.order();
            self.exp[self.log[a as usize] as usize + order - self.log[b as usize] as usize]
        }
    }

    /// Multiplies `a` by `α^power`.
    #[inline]
    pub fn mul_alpha_pow(&self, a: u16, power: usize) -> u16 {
        if a == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + power % self.order()]
        }
    }
}

/// Cyclotomic coset of `start` modulo `2^ν − 1` under doubling.
pub fn cyclotomic_coset(start: usize, order: usize) -> Vec<usize> {
    let mut coset = vec![start % order];
    let mut x = (2 * start) % order;
    while x != coset[0] {
        coset.push(x);
        x = (2 * x) % order;
    }
    coset
}
