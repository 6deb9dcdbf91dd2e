//! Plücker coordinates of subspaces and the quadratic Plücker relations.
//!
//! Dual coordinates pair with primal ones to detect nontrivial intersections.
//!
//! Coordinate vectors are indexed by strictly increasing `r`-tuples of column
//! indices in lexicographic order. A vector is normalized so that its first
//! nonzero coordinate equals one, which makes equality of projective points
//! structural.

use std::fmt;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::linalg::{Matrix, Subspace};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// A strictly increasing tuple of column indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple(Vec<usize>);

impl fmt::Debug for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl IndexTuple {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTuple(format!(
                "{indices:?} is not strictly increasing"
            )));
        }
        Ok(IndexTuple(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Position of this tuple in the lexicographic list of all `r`-subsets of `0..m`.
    pub fn lex_rank(&self, m: usize) -> usize {
        let r = self.0.len();
        let below: usize = self
            .0
            .iter()
            .enumerate()
            .map(|(i, &c)| binomial(m - 1 - c, r - i))
            .sum();
        binomial(m, r) - 1 - below
    }
}

/// All strictly increasing `r`-tuples from `0..m`, lexicographically.
pub fn index_tuples(m: usize, r: usize) -> Vec<IndexTuple> {
    let mut out = Vec::with_capacity(binomial(m, r));
    if r > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..r).collect();
    loop {
        out.push(IndexTuple(cur.clone()));
        let Some(i) = (0..r).rev().find(|&i| cur[i] < m - r + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Sorts `indices` in place and returns the sign of the sorting permutation,
/// or `None` when an index repeats.
fn sort_with_sign(indices: &mut [usize]) -> Option<bool> {
    let mut negative = false;
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(negative)
    }
}

/// A nonzero vector in the `r`-th exterior power of `F^m`, normalized.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlueckerVector {
    field: Field,
    m: usize,
    r: usize,
    coords: Vec<Elem>,
}

impl fmt::Debug for PlueckerVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = index_tuples(self.m, self.r)
            .iter()
            .zip(&self.coords)
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| format!("({t})->{c}"))
            .collect();
        write!(
            f,
            "Pluecker[m={}, r={}]{{{}}}",
            self.m,
            self.r,
            parts.join(" ")
        )
    }
}

impl PlueckerVector {
    /// Normalizes raw coordinates listed in lexicographic tuple order.
    pub fn from_coords(field: &Field, m: usize, r: usize, mut coords: Vec<Elem>) -> Result<Self> {
        if coords.len() != binomial(m, r) {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for C({m},{r}) = {}",
                coords.len(),
                binomial(m, r)
            )));
        }
        let Some(&lead) = coords.iter().find(|c| !c.is_zero()) else {
            return Err(Error::ShapeMismatch("all-zero coordinate vector".into()));
        };
        let inv = field.inv(lead)?;
        for c in coords.iter_mut() {
            *c = field.mul(*c, inv);
        }
        Ok(PlueckerVector {
            field: field.clone(),
            m,
            r,
            coords,
        })
    }

    /// Builds a vector from `(tuple, value)` pairs; unlisted coordinates are zero.
    pub fn from_entries(
        field: &Field,
        m: usize,
        r: usize,
        entries: &[(Vec<usize>, Elem)],
    ) -> Result<Self> {
        let mut coords = vec![Elem::ZERO; binomial(m, r)];
        for (t, v) in entries {
            let tuple = IndexTuple::new(t.clone())?;
            if tuple.len() != r || t.iter().any(|&i| i >= m) {
                return Err(Error::InvalidTuple(format!("{tuple} for m={m}, r={r}")));
            }
            coords[tuple.lex_rank(m)] = *v;
        }
        Self::from_coords(field, m, r, coords)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn get(&self, tuple: &IndexTuple) -> Elem {
        self.coords[tuple.lex_rank(self.m)]
    }

    /// Coordinate at an arbitrary index list, extended antisymmetrically.
    pub fn signed(&self, indices: &[usize]) -> Elem {
        let mut idx = indices.to_vec();
        match sort_with_sign(&mut idx) {
            None => Elem::ZERO,
            Some(neg) => {
                let v = self.coords[IndexTuple(idx).lex_rank(self.m)];
                if neg {
                    self.field.neg(v)
                } else {
                    v
                }
            }
        }
    }

    /// Evaluates the relation (P1) for a prefix of `r-1` indices and a tail of `r+1` indices.
    pub fn relation_value(&self, prefix: &[usize], tail: &[usize]) -> Elem {
        let f = &self.field;
        let mut acc = Elem::ZERO;
        let mut left = prefix.to_vec();
        left.push(0);
        for n in 0..tail.len() {
            *left.last_mut().unwrap() = tail[n];
            let right: Vec<usize> = tail
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != n)
                .map(|(_, &x)| x)
                .collect();
            let term = f.mul(self.signed(&left), self.signed(&right));
            acc = if n % 2 == 0 {
                f.add(acc, term)
            } else {
                f.sub(acc, term)
            };
        }
        acc
    }

    /// First violated relation (P1), if any. Prefixes run over increasing
    /// `(r-1)`-tuples and tails over increasing `(r+1)`-tuples; other index
    /// lists only permute or negate these relations.
    pub fn first_violation(&self) -> Option<RelationViolation> {
        if self.r == 0 || self.r + 1 > self.m {
            return None;
        }
        let prefixes = index_tuples(self.m, self.r - 1);
        let tails = index_tuples(self.m, self.r + 1);
        for p in &prefixes {
            for t in &tails {
                let v = self.relation_value(&p.0, &t.0);
                if !v.is_zero() {
                    return Some(RelationViolation {
                        prefix: p.clone(),
                        tail: t.clone(),
                        value: v,
                    });
                }
            }
        }
        None
    }

    /// True iff every Plücker relation vanishes, i.e. the vector is decomposable.
    pub fn relations_check(&self) -> bool {
        self.first_violation().is_none()
    }

    /// JSON form `{"m":..,"r":..,"coords":{"0,1":1,...}}`, zeros omitted.
    pub fn to_json(&self) -> Value {
        let mut coords = Map::new();
        for (t, c) in index_tuples(self.m, self.r).iter().zip(&self.coords) {
            if !c.is_zero() {
                coords.insert(t.to_string(), Value::from(c.index()));
            }
        }
        let mut obj = Map::new();
        obj.insert("m".into(), Value::from(self.m));
        obj.insert("r".into(), Value::from(self.r));
        obj.insert("coords".into(), Value::Object(coords));
        Value::Object(obj)
    }

    pub fn from_json(field: &Field, value: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("Pluecker JSON: {what}"));
        let m = value
            .get("m")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing m"))? as usize;
        let r = value
            .get("r")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing r"))? as usize;
        let coords = value
            .get("coords")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing coords"))?;
        let mut entries = Vec::new();
        for (k, v) in coords {
            let tuple = k
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(&format!("bad tuple `{k}`: {e}")))?;
            let v = v
                .as_u64()
                .ok_or_else(|| bad("coordinate is not an integer"))?;
            entries.push((tuple, field.element(v)?));
        }
        Self::from_entries(field, m, r, &entries)
    }
}

/// A violated instance of (P1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationViolation {
    pub prefix: IndexTuple,
    pub tail: IndexTuple,
    pub value: Elem,
}

fn minor(basis: &Matrix, cols: &[usize]) -> Elem {
    basis.select_columns(cols).det().expect("square minor")
}

/// Plücker coordinates of a subspace: its maximal minors, normalized.
pub fn pluecker(h: &Subspace) -> Result<PlueckerVector> {
    let r = h.rank();
    if r == 0 {
        return Err(Error::ZeroRankSubspace);
    }
    let m = h.ambient();
    let coords = index_tuples(m, r)
        .iter()
        .map(|t| minor(h.basis(), &t.0))
        .collect();
    PlueckerVector::from_coords(h.field(), m, r, coords)
}

/// Unnormalized maximal minors of an arbitrary full-row-rank matrix.
pub fn raw_minors(mat: &Matrix) -> Vec<Elem> {
    index_tuples(mat.cols(), mat.rows())
        .iter()
        .map(|t| minor(mat, &t.0))
        .collect()
}

/// Dual Plücker coordinates of `W`: the coordinates of `W^⊥`.
pub fn dual_pluecker(w: &Subspace) -> Result<PlueckerVector> {
    if w.rank() == 0 {
        return Err(Error::ZeroRankSubspace);
    }
    pluecker(&w.orthogonal_complement())
}

/// The standard scalar product on the exterior power.
pub fn pairing(a: &PlueckerVector, b: &PlueckerVector) -> Result<Elem> {
    if a.field != b.field || a.m != b.m || a.r != b.r {
        return Err(Error::ShapeMismatch(format!(
            "pairing (m={}, r={}) with (m={}, r={})",
            a.m, a.r, b.m, b.r
        )));
    }
    let f = &a.field;
    Ok(a.coords
        .iter()
        .zip(&b.coords)
        .fold(Elem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y))))
}

/// Whether `H` and `W` (with complementary ranks) meet nontrivially, decided
/// by the pairing of `W`'s dual coordinates with `H`'s coordinates.
pub fn meets(h: &Subspace, w: &Subspace) -> Result<bool> {
    if h.ambient() != w.ambient() || h.rank() + w.rank() != h.ambient() {
        return Err(Error::ShapeMismatch(format!(
            "ranks {} + {} do not sum to ambient {}",
            h.rank(),
            w.rank(),
            h.ambient()
        )));
    }
    if h.rank() == 0 || w.rank() == 0 {
        return Err(Error::ZeroRankSubspace);
    }
    let verdict = pairing(&dual_pluecker(w)?, &pluecker(h)?)?.is_zero();
    debug_assert_eq!(
        verdict,
        h.meet_rank(w)? > 0,
        "pairing disagrees with intersection"
    );
    Ok(verdict)
}

/// One summand `±H_left·H_right` of a quadratic relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTerm {
    pub negated: bool,
    pub left: IndexTuple,
    pub right: IndexTuple,
}

/// A Plücker relation written as `H_i·H_j + Σ = 0`, with the leading product first.
///
/// Every term after the first pairs a tuple with index sum below `N` (stored
/// as `left`) with one whose sum exceeds `N` (stored as `right`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<RelationTerm>,
}

impl Relation {
    pub fn leading(&self) -> &RelationTerm {
        &self.terms[0]
    }

    pub fn evaluate(&self, v: &PlueckerVector) -> Elem {
        let f = v.field();
        self.terms.iter().fold(Elem::ZERO, |acc, t| {
            let prod = f.mul(v.get(&t.left), v.get(&t.right));
            if t.negated {
                f.sub(acc, prod)
            } else {
                f.add(acc, prod)
            }
        })
    }
}

/// The relation isolating `H_i·H_j` for two distinct tuples with equal index sums.
///
/// Picks the first position `ℓ` with `i_ℓ ∉ j`, moves `i_ℓ` to the end of
/// `i` by a cyclic shift, and expands (P1) for the prefix `i \ i_ℓ` and the
/// tail `(i_ℓ, j_1, …, j_r)`. When the shift is odd the whole relation is
/// negated so the leading product keeps coefficient `+1`.
pub fn relation_for_pair(i: &IndexTuple, j: &IndexTuple) -> Result<Relation> {
    if i.len() != j.len() || i.is_empty() {
        return Err(Error::ShapeMismatch(format!("tuples {i} and {j}")));
    }
    if i.sum() != j.sum() {
        return Err(Error::UnequalIndexSums(i.sum(), j.sum()));
    }
    if i == j {
        return Err(Error::IdenticalTuples);
    }
    let r = i.len();
    let n_sum = i.sum();
    let ell =
        i.0.iter()
            .position(|x| !j.0.contains(x))
            .expect("distinct equal-length tuples");
    let flip = (r - 1 - ell) % 2 == 1;
    let prefix: Vec<usize> =
        i.0.iter()
            .enumerate()
            .filter(|&(k, _)| k != ell)
            .map(|(_, &x)| x)
            .collect();
    let mut tail = vec![i.0[ell]];
    tail.extend_from_slice(&j.0);

    let mut terms = vec![RelationTerm {
        negated: false,
        left: i.clone(),
        right: j.clone(),
    }];
    for n in 1..=r {
        let mut a = prefix.clone();
        a.push(tail[n]);
        let mut b: Vec<usize> = tail
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != n)
            .map(|(_, &x)| x)
            .collect();
        let (Some(sa), Some(sb)) = (sort_with_sign(&mut a), sort_with_sign(&mut b)) else {
            continue;
        };
        let negated = (n % 2 == 1) ^ flip ^ sa ^ sb;
        let (a, b) = (IndexTuple(a), IndexTuple(b));
        let (left, right) = if a.sum() < n_sum { (a, b) } else { (b, a) };
        debug_assert!(left.sum() < n_sum && n_sum < right.sum());
        terms.push(RelationTerm {
            negated,
            left,
            right,
        });
    }
    Ok(Relation { terms })
}
