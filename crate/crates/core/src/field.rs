//! Exact arithmetic in GF(p^h).
//!
//! A [`Field`] is a cheaply clonable handle to the field parameters and
//! (for small extension fields) exp/log tables. Elements are [`Elem`]
//! values holding the canonical integer encoding: the base-p digits of the
//! coefficient vector, constant term least significant. Arithmetic goes
//! through the owning field, so matrices and polynomials can store bare
//! `Elem`s. [`FieldElement`] pairs an element with its field and checks
//! ownership on every operation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 31;

const TABLE_LIMIT: u64 = 1 << 16;

/// Canonical integer encoding of a field element, in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    p: u32,
    h: u32,
    q: u32,
    modulus: Vec<u32>,
    default_modulus: bool,
    tables: Option<Tables>,
}

/// A finite field GF(p^h) with an explicit monic irreducible modulus.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.h == other.0.h && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.h.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.0.p, self.0.h)?;
        if !self.0.default_modulus {
            let coeffs: Vec<String> = self.0.modulus.iter().map(|c| c.to_string()).collect();
            write!(f, ":modulus={}", coeffs.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `p`, `p^h` and `p^h:modulus=c0,c1,...,1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, modulus) = match s.split_once(':') {
            Some((head, rest)) => {
                let list = rest.strip_prefix("modulus=").ok_or_else(|| {
                    Error::Parse(format!("expected `modulus=` in field spec `{s}`"))
                })?;
                let coeffs = list
                    .split(',')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Parse(format!("bad modulus coefficient in `{s}`: {e}")))?;
                (head, Some(coeffs))
            }
            None => (s, None),
        };
        let (p, h) = match head.split_once('^') {
            Some((p, h)) => (p, h),
            None => (head, "1"),
        };
        let p = p
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("bad characteristic in `{s}`: {e}")))?;
        let h = h
            .trim()
            .parse::<u32>()
            .map_err(|e| Error::Parse(format!("bad extension degree in `{s}`: {e}")))?;
        make_field(p, h, modulus)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over GF(p) as coefficient vectors, constant term first.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap() as u64;
        let shift = r.len() - 1 - dm;
        for (j, &c) in m.iter().enumerate() {
            let sub = lead * c as u64 % p64;
            let idx = shift + j;
            r[idx] = ((r[idx] as u64 + p64 - sub) % p64) as u32;
        }
        r = trim(r);
    }
    r
}

fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let h = modulus.len() - 1;
    if h <= 1 {
        return true;
    }
    for deg in 1..=h / 2 {
        let count = (p as u64).pow(deg as u32);
        for idx in 0..count {
            let mut f = Vec::with_capacity(deg + 1);
            let mut x = idx;
            for _ in 0..deg {
                f.push((x % p as u64) as u32);
                x /= p as u64;
            }
            f.push(1);
            if poly_rem(modulus, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree `h`, comparing
/// coefficient tuples `(c0, c1, ..., c_{h-1})` from the constant term.
fn least_irreducible(p: u32, h: u32) -> Vec<u32> {
    if h == 1 {
        return vec![0, 1];
    }
    let hu = h as usize;
    let count = (p as u64).pow(h);
    for idx in 0..count {
        // c0 is the most significant digit of idx.
        let mut coeffs = vec![0u32; hu + 1];
        let mut x = idx;
        for j in (0..hu).rev() {
            coeffs[j] = (x % p as u64) as u32;
            x /= p as u64;
        }
        coeffs[hu] = 1;
        if coeffs[0] != 0 && is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Builds GF(p^h). Without an explicit modulus the lexicographically least
/// monic irreducible polynomial is used.
pub fn make_field(p: u64, h: u32, modulus: Option<Vec<u32>>) -> Result<Field> {
    if !is_prime(p) {
        return Err(Error::NonPrimeCharacteristic(p));
    }
    if h == 0 {
        return Err(Error::ParameterOutOfRange(
            "extension degree must be at least 1".into(),
        ));
    }
    let q = (p as u128).checked_pow(h).unwrap_or(u128::MAX);
    if q > MAX_ORDER as u128 {
        return Err(Error::FieldTooLarge(q));
    }
    let p = p as u32;
    let q = q as u32;
    let default = least_irreducible(p, h);
    let modulus = match modulus {
        None => default.clone(),
        Some(m) => {
            if m.len() != h as usize + 1 {
                return Err(Error::InvalidModulus(format!(
                    "expected {} coefficients, got {}",
                    h + 1,
                    m.len()
                )));
            }
            if *m.last().unwrap() != 1 {
                return Err(Error::InvalidModulus("modulus must be monic".into()));
            }
            if m.iter().any(|&c| c >= p) {
                return Err(Error::InvalidModulus(format!(
                    "coefficients must be below {p}"
                )));
            }
            if h == 1 {
                // Every prime field has the same encoding regardless of modulus.
                default.clone()
            } else if !is_irreducible(&m, p) {
                return Err(Error::ReducibleModulus { p });
            } else {
                m
            }
        }
    };
    let default_modulus = modulus == default;
    let mut inner = Inner {
        p,
        h,
        q,
        modulus,
        default_modulus,
        tables: None,
    };
    if h > 1 && (q as u64) <= TABLE_LIMIT {
        inner.tables = Some(build_tables(&inner));
    }
    Ok(Field(Arc::new(inner)))
}

fn build_tables(inner: &Inner) -> Tables {
    let order = inner.q as u64 - 1;
    let factors = prime_factors(order);
    let generator = (1..inner.q)
        .find(|&g| factors.iter().all(|&f| slow_pow(inner, g, order / f) != 1))
        .expect("multiplicative group is cyclic");
    let n = order as usize;
    let mut exp = vec![0u32; 2 * n];
    let mut log = vec![0u32; inner.q as usize];
    let mut x = 1u32;
    for i in 0..n {
        exp[i] = x;
        exp[i + n] = x;
        log[x as usize] = i as u32;
        x = slow_mul(inner, x, generator);
    }
    Tables { exp, log }
}

fn digits(inner: &Inner, mut x: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(inner.h as usize);
    for _ in 0..inner.h {
        out.push(x % inner.p);
        x /= inner.p;
    }
    out
}

fn from_digits(inner: &Inner, d: &[u32]) -> u32 {
    d.iter().rev().fold(0u32, |acc, &c| acc * inner.p + c)
}

fn slow_mul(inner: &Inner, a: u32, b: u32) -> u32 {
    if inner.h == 1 {
        return ((a as u64 * b as u64) % inner.p as u64) as u32;
    }
    let p = inner.p as u64;
    let da = digits(inner, a);
    let db = digits(inner, b);
    let mut prod = vec![0u32; da.len() + db.len() - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p) as u32;
        }
    }
    let mut r = poly_rem(&prod, &inner.modulus, inner.p);
    r.resize(inner.h as usize, 0);
    from_digits(inner, &r)
}

fn slow_pow(inner: &Inner, mut base: u32, mut e: u64) -> u32 {
    let mut acc = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = slow_mul(inner, acc, base);
        }
        base = slow_mul(inner, base, base);
        e >>= 1;
    }
    acc
}

impl Field {
    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.h
    }

    pub fn order(&self) -> u64 {
        self.0.q as u64
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// Element with canonical encoding `index`.
    pub fn element(&self, index: u64) -> Result<Elem> {
        if index >= self.order() {
            return Err(Error::ParameterOutOfRange(format!(
                "element {index} not below field order {}",
                self.order()
            )));
        }
        Ok(Elem(index as u32))
    }

    /// All elements in canonical encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.0.q).map(Elem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.0.q).map(Elem)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// Coefficient vector (constant first) of an element.
    pub fn coefficients(&self, a: Elem) -> Vec<u32> {
        digits(&self.0, a.0)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let inner = &*self.0;
        if inner.h == 1 {
            let s = a.0 as u64 + b.0 as u64;
            return Elem((s % inner.p as u64) as u32);
        }
        if inner.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..inner.h {
            let d = (x % inner.p + y % inner.p) % inner.p;
            out += d * place;
            x /= inner.p;
            y /= inner.p;
            place = place.wrapping_mul(inner.p);
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let inner = &*self.0;
        if inner.h == 1 {
            return Elem(if a.0 == 0 { 0 } else { inner.p - a.0 });
        }
        if inner.p == 2 {
            return a;
        }
        let d: Vec<u32> = digits(inner, a.0)
            .into_iter()
            .map(|c| if c == 0 { 0 } else { inner.p - c })
            .collect();
        Elem(from_digits(inner, &d))
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        match &self.0.tables {
            Some(t) => Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => Elem(slow_mul(&self.0, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.0.q - 1;
        Ok(match &self.0.tables {
            Some(t) => Elem(t.exp[((n - t.log[a.0 as usize]) % n) as usize]),
            None => Elem(slow_pow(&self.0, a.0, n as u64 - 1)),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if a.0 == 0 {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        match &self.0.tables {
            Some(t) => {
                let n = (self.0.q - 1) as u64;
                let l = t.log[a.0 as usize] as u64 * (e % n) % n;
                Elem(t.exp[l as usize])
            }
            None => Elem(slow_pow(&self.0, a.0, e)),
        }
    }

    /// Power with a possibly negative exponent; `0^0 = 1`.
    pub fn pow_signed(&self, a: Elem, e: i64) -> Result<Elem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// Least `n >= 1` with `a^n = 1`.
    pub fn element_order(&self, a: Elem) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let mut n = self.order() - 1;
        for f in prime_factors(n) {
            while n.is_multiple_of(f) && self.pow(a, n / f) == Elem::ONE {
                n /= f;
            }
        }
        Ok(n)
    }

    /// First element in encoding order whose multiplicative order is at least `n`.
    pub fn find_element_of_order_at_least(&self, n: u64) -> Option<Elem> {
        if self.order() - 1 < n {
            return None;
        }
        self.nonzero_elements()
            .find(|&a| self.element_order(a).is_ok_and(|o| o >= n))
    }

    pub fn wrap(&self, a: Elem) -> FieldElement {
        FieldElement {
            field: self.clone(),
            elem: a,
        }
    }
}

/// An element bundled with its field; binary operations check that both
/// operands come from the same field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: Field,
    elem: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.elem.0, self.field)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.elem.0)
    }
}

impl FieldElement {
    pub fn new(field: &Field, index: u64) -> Result<Self> {
        Ok(field.wrap(field.element(index)?))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn elem(&self) -> Elem {
        self.elem
    }

    pub fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.field.wrap(self.field.add(self.elem, other.elem)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.field.wrap(self.field.sub(self.elem, other.elem)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.field.wrap(self.field.mul(self.elem, other.elem)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.field.wrap(self.field.div(self.elem, other.elem)?))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.field.wrap(self.field.inv(self.elem)?))
    }

    pub fn neg(&self) -> Self {
        self.field.wrap(self.field.neg(self.elem))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.field.wrap(self.field.pow(self.elem, e))
    }

    pub fn order(&self) -> Result<u64> {
        self.field.element_order(self.elem)
    }
}
