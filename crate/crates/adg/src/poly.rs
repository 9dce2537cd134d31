//! Multivariate polynomials over a [`Field`], reduction mod X^q − X,
//! permutation-polynomial testing and value-set analysis.
//!
//! Terms are stored sparsely as a map from exponent tuple to nonzero
//! coefficient. Reduction mod X^q − X never materializes dense degree-q^t
//! intermediates: exponents are rewritten k ↦ ((k − 1) mod (q − 1)) + 1
//! for k ≥ q, with k = 0 untouched.

use std::collections::BTreeMap;

use crate::ff::{Elem, Field};
use crate::{Error, Result};

/// A sparse multivariate polynomial. Invariants: no stored zero
/// coefficients, and every exponent tuple has length `arity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, Elem>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> MultiPoly {
        MultiPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Elem) -> MultiPoly {
        let mut p = MultiPoly::zero(arity);
        if c != Elem::ZERO {
            p.terms.insert(vec![0; arity], c);
        }
        p
    }

    /// The monomial c · Πᵢ Xᵢ^{exps[i]}.
    pub fn monomial(exps: Vec<u32>, c: Elem) -> MultiPoly {
        let mut p = MultiPoly::zero(exps.len());
        if c != Elem::ZERO {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a univariate polynomial from dense coefficients, low degree
    /// first.
    pub fn from_coeffs(coeffs: &[Elem]) -> MultiPoly {
        let mut terms = BTreeMap::new();
        for (i, &c) in coeffs.iter().enumerate() {
            if c != Elem::ZERO {
                terms.insert(vec![i as u32], c);
            }
        }
        MultiPoly { arity: 1, terms }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Elem)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max()
    }

    /// Coefficient of the given exponent tuple (zero if absent).
    pub fn coeff(&self, exps: &[u32]) -> Elem {
        self.terms.get(exps).copied().unwrap_or(Elem::ZERO)
    }

    /// True iff the variable at `index` appears in no term.
    pub fn ignores_var(&self, index: usize) -> bool {
        self.terms.keys().all(|e| e[index] == 0)
    }

    fn insert_add(&mut self, field: &Field, exps: Vec<u32>, c: Elem) {
        if c == Elem::ZERO {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(*o.get(), c);
                if s == Elem::ZERO {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, field: &Field, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.insert_add(field, e.clone(), c);
        }
        out
    }

    pub fn sub(&self, field: &Field, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.insert_add(field, e.clone(), field.neg(c));
        }
        out
    }

    pub fn mul(&self, field: &Field, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = MultiPoly::zero(self.arity);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let c = field.mul(ca, cb);
                if c == Elem::ZERO {
                    continue;
                }
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
                out.insert_add(field, exps, c);
            }
        }
        out
    }

    pub fn pow(&self, field: &Field, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.arity, Elem::ONE);
        for _ in 0..k {
            acc = acc.mul(field, self);
        }
        acc
    }

    /// Value of the polynomial function at `point`.
    pub fn eval(&self, field: &Field, point: &[Elem]) -> Result<Elem> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        let mut acc = Elem::ZERO;
        for (exps, &c) in &self.terms {
            let mut term = c;
            for (i, &k) in exps.iter().enumerate() {
                if k > 0 {
                    term = field.mul(term, field.pow(point[i], k as u64));
                }
            }
            acc = field.add(acc, term);
        }
        Ok(acc)
    }
}

/// Reduces a univariate polynomial mod X^q − X by exponent rewrite;
/// the result has degree ≤ q − 1 and agrees with the input as a function
/// on F_q at every point.
pub fn reduce_mod_xq(field: &Field, poly: &MultiPoly) -> Result<MultiPoly> {
    if poly.arity != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: poly.arity,
        });
    }
    let q = field.q();
    let mut out = MultiPoly::zero(1);
    for (exps, &c) in &poly.terms {
        let k = exps[0];
        let k = if k >= q { ((k - 1) % (q - 1)) + 1 } else { k };
        out.insert_add(field, vec![k], c);
    }
    Ok(out)
}

/// (poly)^t reduced mod X^q − X, computed incrementally so every
/// intermediate stays at degree < 2q.
pub fn pow_reduced(field: &Field, poly: &MultiPoly, t: u32) -> Result<MultiPoly> {
    if poly.arity != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: poly.arity,
        });
    }
    let base = reduce_mod_xq(field, poly)?;
    let mut acc = MultiPoly::constant(1, Elem::ONE);
    for _ in 0..t {
        acc = reduce_mod_xq(field, &acc.mul(field, &base))?;
    }
    Ok(acc)
}

/// Value set of a univariate polynomial by exhaustive evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSetReport {
    pub size: usize,
    pub values: Vec<Elem>,
    pub is_pp: bool,
}

pub fn value_set(field: &Field, poly: &MultiPoly) -> Result<ValueSetReport> {
    if poly.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: poly.arity(),
        });
    }
    let q = field.q() as usize;
    let mut seen = vec![false; q];
    for x in field.elements() {
        seen[poly.eval(field, &[x])?.value() as usize] = true;
    }
    let values: Vec<Elem> = (0..q as u32)
        .map(Elem)
        .filter(|&v| seen[v.0 as usize])
        .collect();
    let size = values.len();
    Ok(ValueSetReport {
        size,
        values,
        is_pp: size == q,
    })
}

/// True iff the induced function F_q → F_q is a bijection, by exhaustive
/// evaluation.
pub fn is_pp_bruteforce(field: &Field, poly: &MultiPoly) -> Result<bool> {
    Ok(value_set(field, poly)?.is_pp)
}

/// Permutation-polynomial test: (i) exactly one root in F_q and (ii) for
/// each t with 1 ≤ t ≤ q − 2 and t ≢ 0 mod p, the reduction of (f)^t mod
/// X^q − X has degree at most q − 2.
pub fn is_pp_hermite_dickson(field: &Field, poly: &MultiPoly) -> Result<bool> {
    if poly.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: poly.arity(),
        });
    }
    let q = field.q();
    let p = field.p();
    let mut roots = 0usize;
    for x in field.elements() {
        if poly.eval(field, &[x])? == Elem::ZERO {
            roots += 1;
        }
    }
    if roots != 1 {
        return Ok(false);
    }
    let base = reduce_mod_xq(field, poly)?;
    let mut acc = MultiPoly::constant(1, Elem::ONE);
    for t in 1..=q - 2 {
        acc = reduce_mod_xq(field, &acc.mul(field, &base))?;
        if t % p != 0 && acc.coeff(&[q - 1]) != Elem::ZERO {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Value-set cap for non-PPs of degree n: q − ⌈(q−1)/n⌉.
pub fn wan_bound(field: &Field, n: u32) -> u32 {
    assert!(n >= 1);
    let q = field.q();
    q - (q - 1).div_ceil(n)
}

/// The polynomial J = X³ + c₂X² + c₁X + c₋₁X^{q−2}, with J(0) = 0.
///
/// With c₋₁ = 0 this is the cubic X³ + c₂X² + c₁X of degree 3, not q − 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JPoly {
    pub c2: Elem,
    pub c1: Elem,
    pub cm1: Elem,
}

impl JPoly {
    /// Expansion as a univariate polynomial of degree ≤ q − 2 containing
    /// only the monomials X³, X², X, X^{q−2}.
    pub fn expand(&self, field: &Field) -> MultiPoly {
        let q = field.q();
        let mut p = MultiPoly::monomial(vec![3], Elem::ONE);
        p = p.add(field, &MultiPoly::monomial(vec![2], self.c2));
        p = p.add(field, &MultiPoly::monomial(vec![1], self.c1));
        p = p.add(field, &MultiPoly::monomial(vec![q - 2], self.cm1));
        p
    }

    /// J(x): x³ + c₂x² + c₁x + c₋₁/x on F^×, and 0 at 0.
    pub fn eval(&self, field: &Field, x: Elem) -> Elem {
        if x == Elem::ZERO {
            return Elem::ZERO;
        }
        let x2 = field.mul(x, x);
        let x3 = field.mul(x2, x);
        let mut v = field.add(x3, field.mul(self.c2, x2));
        v = field.add(v, field.mul(self.c1, x));
        let xinv = field.inv(x).expect("nonzero");
        field.add(v, field.mul(self.cm1, xinv))
    }
}

/// Number of distinct values of j on F^× (`exclude_zero_input`) or of J
/// on all of F, where J(0) = 0.
pub fn j_value_count(field: &Field, j: &JPoly, exclude_zero_input: bool) -> usize {
    let q = field.q() as usize;
    let mut seen = vec![false; q];
    for x in 1..q as u32 {
        seen[j.eval(field, Elem(x)).value() as usize] = true;
    }
    if !exclude_zero_input {
        seen[0] = true; // J(0) = 0
    }
    seen.iter().filter(|&&s| s).count()
}

// ---- text format -------------------------------------------------------

/// Variable-name binding for the polynomial text format: `names[i]` lists
/// the accepted spellings of variable i.
pub struct VarSet<'a> {
    pub names: &'a [&'a [&'a str]],
}

/// Variables of a two-place graph polynomial f(p₁, ℓ₁).
pub const F_VARS: VarSet<'static> = VarSet {
    names: &[&["p1", "x"], &["l1", "y"]],
};

/// Variables of a three-place graph polynomial g(p₁, p₂, ℓ₁).
pub const G_VARS: VarSet<'static> = VarSet {
    names: &[&["p1", "x"], &["p2", "y"], &["l1", "z"]],
};

/// Single variable for univariate polynomials.
pub const X_VAR: VarSet<'static> = VarSet { names: &[&["x"]] };

/// Parses the CLI polynomial format: integer coefficients, operators
/// `+ - * ^`, parentheses, e.g. `p1*p2*l1*(p1+p2+p1*p2)`. Coefficients
/// are reduced into the field through the prime subfield.
pub fn parse_poly(field: &Field, text: &str, vars: &VarSet) -> Result<MultiPoly> {
    Parser {
        field,
        vars,
        bytes: text.as_bytes(),
        pos: 0,
        arity: vars.names.len(),
    }
    .parse()
}

struct Parser<'a> {
    field: &'a Field,
    vars: &'a VarSet<'a>,
    bytes: &'a [u8],
    pos: usize,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn parse(mut self) -> Result<MultiPoly> {
        let e = self.expr()?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(Error::Parse(format!(
                "unexpected input at byte {}",
                self.pos
            )));
        }
        Ok(e)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(self.field, &t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(self.field, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(self.field, &f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let f = self.factor()?;
            return Ok(MultiPoly::zero(self.arity).sub(self.field, &f));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(Error::Parse("expected exponent after '^'".into()));
            }
            let k: u32 = std::str::from_utf8(&self.bytes[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse("exponent too large".into()))?;
            return Ok(base.pow(self.field, k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Parse("expected ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: i64 = std::str::from_utf8(&self.bytes[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| Error::Parse("integer literal too large".into()))?;
                Ok(MultiPoly::constant(self.arity, self.field.from_int(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                for (i, spellings) in self.vars.names.iter().enumerate() {
                    if spellings.contains(&name) {
                        let mut exps = vec![0u32; self.arity];
                        exps[i] = 1;
                        return Ok(MultiPoly::monomial(exps, Elem::ONE));
                    }
                }
                Err(Error::Parse(format!("unknown variable '{name}'")))
            }
            other => Err(Error::Parse(format!("unexpected token: {other:?}"))),
        }
    }
}
