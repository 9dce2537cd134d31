//! Exact arithmetic in F_q, q = p^e, p an odd prime.
//!
//! Elements are canonical integers in `[0, q)`: the residue itself for
//! e = 1, and for e > 1 the base-p digit expansion of the polynomial-basis
//! coefficient vector, lowest degree in the least significant digit. The
//! modulus for e > 1 is the lexicographically smallest monic irreducible
//! of degree e over F_p, coefficients compared low-degree-first, so the
//! encoding is reproducible without external polynomial tables.
//!
//! For q up to [`TABLE_MAX_Q`] the constructor builds full q×q addition
//! and multiplication tables plus negation/inversion tables; the census
//! and search loops downstream are lookup-bound. Larger fields fall back
//! to digit arithmetic.

use crate::{Error, Result};

/// Largest field order for which dense q×q op tables are materialized.
/// 2048² u16 entries per table keeps construction under a few MB.
pub const TABLE_MAX_Q: u32 = 2048;

/// A field element, encoded as a canonical integer in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn value(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for Elem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// The finite field F_q with its canonical element encoding.
///
/// Immutable after construction; concurrent reads are safe.
#[derive(Debug, Clone)]
pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    /// Monic irreducible of degree e over F_p, coefficients low-degree
    /// first (length e + 1). Empty when e = 1.
    modulus: Vec<u32>,
    add_t: Vec<u16>,
    mul_t: Vec<u16>,
    neg_t: Vec<u32>,
    inv_t: Vec<u32>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Field {
    /// Constructs F_{p^e}. Errors on non-prime or even p, e = 0, or when
    /// p^e does not fit the supported width.
    pub fn new(p: u32, e: u32) -> Result<Field> {
        if !is_prime(p as u64) || p == 2 {
            return Err(Error::NotOddPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::BadExtensionDegree);
        }
        let q = (p as u64).checked_pow(e).filter(|&q| q <= u32::MAX as u64);
        let q = match q {
            Some(q) => q as u32,
            None => return Err(Error::FieldTooLarge { p: p as u64, e }),
        };
        let modulus = if e == 1 {
            Vec::new()
        } else {
            smallest_irreducible(p, e)
        };
        let mut field = Field {
            p,
            e,
            q,
            modulus,
            add_t: Vec::new(),
            mul_t: Vec::new(),
            neg_t: Vec::new(),
            inv_t: Vec::new(),
        };
        field.neg_t = (0..q).map(|a| field.neg_raw(a)).collect();
        if q <= TABLE_MAX_Q {
            let n = (q as usize) * (q as usize);
            let mut add_t = vec![0u16; n];
            let mut mul_t = vec![0u16; n];
            for a in 0..q {
                for b in 0..q {
                    let i = (a as usize) * (q as usize) + b as usize;
                    add_t[i] = field.add_raw(a, b) as u16;
                    mul_t[i] = field.mul_raw(a, b) as u16;
                }
            }
            field.add_t = add_t;
            field.mul_t = mul_t;
        }
        // a^{q-2} = a^{-1} for a != 0; entry 0 is unused
        field.inv_t = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    field.pow_raw(a, field.q as u64 - 2)
                }
            })
            .collect();
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The modulus coefficient vector, low degree first; empty when e = 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Checked conversion of a canonical encoding into an element.
    pub fn elem(&self, value: u32) -> Result<Elem> {
        if value < self.q {
            Ok(Elem(value))
        } else {
            Err(Error::ElemOutOfRange {
                value: value as u64,
                q: self.q,
            })
        }
    }

    /// Embeds an integer via the prime subfield (k ↦ k·1).
    pub fn from_int(&self, k: i64) -> Elem {
        Elem((k.rem_euclid(self.p as i64)) as u32)
    }

    /// All q elements in canonical-integer order, 0 first.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if !self.add_t.is_empty() {
            Elem(self.add_t[(a.0 as usize) * (self.q as usize) + b.0 as usize] as u32)
        } else {
            Elem(self.add_raw(a.0, b.0))
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if !self.mul_t.is_empty() {
            Elem(self.mul_t[(a.0 as usize) * (self.q as usize) + b.0 as usize] as u32)
        } else {
            Elem(self.mul_raw(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        debug_assert!(a.0 < self.q);
        Elem(self.neg_t[a.0 as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero { q: self.q });
        }
        Ok(Elem(self.inv_t[a.0 as usize]))
    }

    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        Elem(self.pow_raw(a.0, k))
    }

    /// The Frobenius map x ↦ x^p; applying it e times is the identity.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p as u64)
    }

    // ---- raw (table-free) arithmetic on encodings ----

    fn decode(&self, v: u32) -> Vec<u32> {
        let mut digits = vec![0u32; self.e as usize];
        let mut v = v;
        for d in digits.iter_mut() {
            *d = v % self.p;
            v /= self.p;
        }
        digits
    }

    fn encode(&self, digits: &[u32]) -> u32 {
        let mut v = 0u64;
        for &d in digits.iter().rev() {
            v = v * self.p as u64 + d as u64;
        }
        v as u32
    }

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return ((a as u64 + b as u64) % self.p as u64) as u32;
        }
        let da = self.decode(a);
        let db = self.decode(b);
        let sum: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % self.p).collect();
        self.encode(&sum)
    }

    fn neg_raw(&self, a: u32) -> u32 {
        if self.e == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let da = self.decode(a);
        let neg: Vec<u32> = da.iter().map(|&x| (self.p - x) % self.p).collect();
        self.encode(&neg)
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let da = self.decode(a);
        let db = self.decode(b);
        let e = self.e as usize;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] += x as u64 * y as u64;
            }
        }
        let mut prod: Vec<u32> = prod.iter().map(|&c| (c % self.p as u64) as u32).collect();
        // reduce by the monic modulus
        for i in (e..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &m) in self.modulus.iter().enumerate().take(e) {
                let idx = i - e + j;
                let t = (prod[idx] as u64 + (self.p as u64 - m as u64) * c as u64) % self.p as u64;
                prod[idx] = t as u32;
            }
        }
        self.encode(&prod[..e])
    }

    fn pow_raw(&self, a: u32, mut k: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            k >>= 1;
        }
        acc
    }
}

/// Lexicographically smallest (low-degree-first) monic irreducible of
/// degree e over F_p, found by exhaustive trial division against every
/// monic polynomial of degree at most e/2.
fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let e = e as usize;
    let q = (p as u64).pow(e as u32);
    for k in 0..q {
        // digit i of k (counting from the most significant) is the
        // coefficient of X^i, so increasing k scans in low-first lex order
        let mut coeffs = vec![0u32; e + 1];
        coeffs[e] = 1;
        let mut rest = k;
        for i in (0..e).rev() {
            coeffs[e - 1 - i] = (rest / (p as u64).pow(i as u32) % p as u64) as u32;
            rest %= (p as u64).pow(i as u32);
        }
        let _ = rest;
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible of every degree exists over F_p");
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        // all monic divisor candidates of degree d
        let count = (p as u64).pow(d as u32);
        for k in 0..count {
            let mut g = vec![0u32; d + 1];
            g[d] = 1;
            let mut rest = k;
            for c in g.iter_mut().take(d) {
                *c = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            if poly_rem_is_zero(f, &g, p) {
                return false;
            }
        }
    }
    true
}

/// True iff the monic divisor g divides f over F_p.
fn poly_rem_is_zero(f: &[u32], g: &[u32], p: u32) -> bool {
    let mut r: Vec<u32> = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - 1 - dg;
            for (j, &gc) in g.iter().enumerate() {
                let idx = shift + j;
                let t = (r[idx] as u64 + (p as u64 - gc as u64) * lead as u64) % p as u64;
                r[idx] = t as u32;
            }
        }
        r.pop();
    }
    r.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Field::new(4, 1), Err(Error::NotOddPrime(4))));
        assert!(matches!(Field::new(2, 3), Err(Error::NotOddPrime(2))));
        assert!(matches!(Field::new(9, 1), Err(Error::NotOddPrime(9))));
        assert!(matches!(Field::new(3, 0), Err(Error::BadExtensionDegree)));
        assert!(matches!(
            Field::new(3, 64),
            Err(Error::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn f7_basics() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(f.q(), 7);
        assert!(f.modulus().is_empty());
        assert_eq!(f.mul(Elem(3), Elem(5)), Elem(1));
        assert_eq!(f.inv(Elem(3)).unwrap(), Elem(5));
        assert!(matches!(
            f.inv(Elem(0)),
            Err(Error::DivisionByZero { q: 7 })
        ));
        assert_eq!(f.frobenius(Elem(3)), Elem(3));
    }

    #[test]
    fn f9_modulus_is_x2_plus_1() {
        // exhaustive scan of monic quadratics over F_3: X² and X²+X and
        // X²+2X have roots; X²+1 is the first root-free one
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn f9_arithmetic_through_the_modulus() {
        let f = Field::new(3, 2).unwrap();
        // x has encoding 3 (digits (0,1)); x·x = X² ≡ −1 ≡ 2
        let x = Elem(3);
        assert_eq!(f.mul(x, x), Elem(2));
        // x³ = −x = 2x, encoding (0,2) = 6
        assert_eq!(f.frobenius(x), Elem(6));
        for y in f.elements() {
            assert_eq!(f.frobenius(f.frobenius(y)), y);
        }
    }

    #[test]
    fn enumeration_is_canonical() {
        let f5 = Field::new(5, 1).unwrap();
        let all: Vec<u32> = f5.elements().map(|e| e.value()).collect();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.elements().count(), 9);
        let f49 = Field::new(7, 2).unwrap();
        assert_eq!(f49.elements().count(), 49);
    }

    fn check_axioms(f: &Field) {
        let els: Vec<Elem> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, Elem::ZERO), a);
            assert_eq!(f.mul(a, Elem::ONE), a);
            assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
            if a != Elem::ZERO {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
            }
            // Fermat / reduction identity x^q = x
            assert_eq!(f.pow(a, f.q() as u64), a);
        }
        for &a in &els {
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &els {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(
                        f.mul(a, f.add(b, c)),
                        f.add(f.mul(a, b), f.mul(a, c))
                    );
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_q() {
        for (p, e) in [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (3, 3), (7, 2)] {
            let f = Field::new(p, e).unwrap();
            assert!(f.q() <= 49);
            check_axioms(&f);
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for (p, e) in [(3, 1), (7, 1), (3, 2), (5, 2), (7, 2)] {
            let f = Field::new(p, e).unwrap();
            let target = f.q() as u64 - 1;
            let found = f.elements().skip(1).any(|a| {
                let mut ord = 1u64;
                let mut x = a;
                while x != Elem::ONE {
                    x = f.mul(x, a);
                    ord += 1;
                }
                ord == target
            });
            assert!(found, "no generator found in F_{}", f.q());
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism() {
        for (p, e) in [(3, 1), (5, 1), (3, 2), (5, 2), (3, 3)] {
            let f = Field::new(p, e).unwrap();
            assert!(f.q() <= 27);
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(
                        f.frobenius(f.mul(a, b)),
                        f.mul(f.frobenius(a), f.frobenius(b))
                    );
                    assert_eq!(
                        f.frobenius(f.add(a, b)),
                        f.add(f.frobenius(a), f.frobenius(b))
                    );
                }
            }
        }
    }

    #[test]
    fn table_and_raw_arithmetic_agree() {
        // F_121 has tables; recompute everything through the raw path
        let f = Field::new(11, 2).unwrap();
        assert!(!f.mul_t.is_empty());
        for a in 0..f.q() {
            for b in 0..f.q() {
                assert_eq!(f.mul(Elem(a), Elem(b)).0, f.mul_raw(a, b));
                assert_eq!(f.add(Elem(a), Elem(b)).0, f.add_raw(a, b));
            }
        }
    }

    #[test]
    fn from_int_embeds_through_prime_subfield() {
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.from_int(-1), Elem(2));
        assert_eq!(f.from_int(3), Elem(0));
        assert_eq!(f.from_int(5), Elem(2));
    }
}
