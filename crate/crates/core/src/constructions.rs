//! Moment-curve families of rank-`r` subspaces of `F^{r+s}`.
//!
//! Each family is given by a coefficient table `h(i, n)`: the member at
//! `t` is spanned by the vectors `a^[n](t)`, `n = 0..r-1`, whose `i`-th
//! coordinate is `h(i, n)·t^(i-n)`. Its Plücker coordinate at `(i_1..i_r)`
//! is `h(i_1..i_r)·t^(i_1+…+i_r-C(r,2))`, where `h(i_1..i_r)` is the
//! `r × r` determinant of the table columns `i_1..i_r`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{binomial, index_tuples, pluecker, IndexTuple, PlueckerVector};
use crate::field::{Elem, Field};
use crate::linalg::{Matrix, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Osculating subspaces: `h(i,n) = i!/(i-n)!`.
    Tangent,
    /// `h(i,n) = ω^(n(i-r))` for `i >= r` or `i = n < r`, zero otherwise.
    Diverted,
    /// Spans of `a(t), a(ωt), …, a(ω^(r-1) t)`: `h(i,n) = ω^(ni)`.
    Secant,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Tangent => "tangent",
            Family::Diverted => "diverted",
            Family::Secant => "secant",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tangent" => Ok(Family::Tangent),
            "diverted" => Ok(Family::Diverted),
            "secant" => Ok(Family::Secant),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

/// A coefficient table `h(i, n)` for `0 <= i <= d = r+s-1`, `0 <= n < r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientScheme {
    field: Field,
    family: Family,
    r: usize,
    s: usize,
    omega: Option<Elem>,
    table: Vec<Vec<Elem>>,
}

impl CoefficientScheme {
    /// Builds the table without checking the family's validity conditions;
    /// see [`CoefficientScheme::validate`].
    pub fn new(
        field: &Field,
        family: Family,
        r: usize,
        s: usize,
        omega: Option<Elem>,
    ) -> Result<Self> {
        if r == 0 || s == 0 {
            return Err(Error::ParameterOutOfRange(format!(
                "r = {r} and s = {s} must be positive"
            )));
        }
        let d = r + s - 1;
        let omega = match family {
            Family::Tangent => None,
            _ => {
                let w = omega
                    .ok_or_else(|| Error::InvalidScheme(format!("{family} family needs omega")))?;
                if w.is_zero() {
                    return Err(Error::InvalidScheme("omega must be nonzero".into()));
                }
                Some(w)
            }
        };
        let f = field;
        let mut table = vec![vec![Elem::ZERO; d + 1]; r];
        for (n, row) in table.iter_mut().enumerate() {
            for (i, cell) in row.iter_mut().enumerate() {
                *cell = match family {
                    Family::Tangent => {
                        if i >= n {
                            // falling factorial i(i-1)…(i-n+1), reduced mod p
                            (0..n).fold(Elem::ONE, |acc, k| f.mul(acc, f.from_int((i - k) as i64)))
                        } else {
                            Elem::ZERO
                        }
                    }
                    Family::Diverted => {
                        if i >= r || i == n {
                            let w = omega.unwrap();
                            f.pow_signed(w, n as i64 * (i as i64 - r as i64))?
                        } else {
                            Elem::ZERO
                        }
                    }
                    Family::Secant => f.pow(omega.unwrap(), (n * i) as u64),
                };
            }
        }
        Ok(CoefficientScheme {
            field: field.clone(),
            family,
            r,
            s,
            omega,
            table,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Ambient rank `m = r + s`.
    pub fn m(&self) -> usize {
        self.r + self.s
    }

    /// Degree of the moment curve, `d = r + s - 1`.
    pub fn d(&self) -> usize {
        self.r + self.s - 1
    }

    pub fn omega(&self) -> Option<Elem> {
        self.omega
    }

    pub fn h(&self, i: usize, n: usize) -> Elem {
        self.table[n][i]
    }

    /// True when `h(i, n) = 0` for all `i < n`, so the covector operators are polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.first_subdiagonal_nonzero().is_none()
    }

    pub(crate) fn first_subdiagonal_nonzero(&self) -> Option<(usize, usize)> {
        (0..self.r)
            .flat_map(|n| (0..n).map(move |i| (i, n)))
            .find(|&(i, n)| !self.h(i, n).is_zero())
    }

    /// The coefficient `h(i_1, …, i_r)`.
    pub fn scheme_coeff(&self, tuple: &IndexTuple) -> Elem {
        let cols = self.coeff_matrix().select_columns(tuple.indices());
        cols.det().expect("square")
    }

    fn coeff_matrix(&self) -> Matrix {
        Matrix::from_rows(&self.field, self.d() + 1, &self.table).expect("rectangular table")
    }

    /// First tuple whose coefficient vanishes, in lexicographic order.
    pub fn first_vanishing_coeff(&self) -> Option<IndexTuple> {
        index_tuples(self.m(), self.r)
            .into_iter()
            .find(|t| self.scheme_coeff(t).is_zero())
    }

    /// True iff `h(i_1..i_r) != 0` for every `r`-tuple.
    pub fn check_coeffs_nonzero(&self) -> bool {
        self.first_vanishing_coeff().is_none()
    }

    /// Checks the family-specific preconditions for building a design.
    pub fn validate(&self) -> Result<()> {
        let m = self.m() as u64;
        match self.family {
            Family::Tangent => {
                if (self.field.characteristic() as u64) <= m {
                    return Err(Error::InvalidScheme(format!(
                        "tangent family needs characteristic > r+s = {m}, field has {}",
                        self.field.characteristic()
                    )));
                }
            }
            Family::Secant => {
                let w = self.omega.expect("secant has omega");
                let ord = self.field.element_order(w)?;
                if ord < m {
                    return Err(Error::InvalidScheme(format!(
                        "omega = {w} has order {ord} < r+s = {m}"
                    )));
                }
            }
            Family::Diverted => {}
        }
        if let Some(t) = self.first_vanishing_coeff() {
            return Err(Error::InvalidScheme(format!("h({t}) vanishes")));
        }
        Ok(())
    }

    /// Unnormalized closed-form Plücker coordinates of the member at `t`.
    pub fn closed_form(&self, t: Elem) -> Vec<Elem> {
        let f = &self.field;
        let shift = binomial(self.r, 2);
        index_tuples(self.m(), self.r)
            .iter()
            .map(|tup| f.mul(self.scheme_coeff(tup), f.pow(t, (tup.sum() - shift) as u64)))
            .collect()
    }

    /// Spanning matrix with rows `a^[n](t)`; requires `t != 0` unless the
    /// scheme is polynomial.
    pub fn spanning_matrix(&self, t: Elem) -> Result<Matrix> {
        let f = &self.field;
        let d = self.d();
        let mut mat = Matrix::zeros(f, self.r, d + 1);
        for n in 0..self.r {
            for i in 0..=d {
                let h = self.h(i, n);
                if h.is_zero() {
                    continue;
                }
                let v = f.mul(h, f.pow_signed(t, i as i64 - n as i64)?);
                mat.set(n, i, v);
            }
        }
        Ok(mat)
    }
}

/// `a(t) = (1, t, t^2, …, t^d)`.
pub fn moment_point(field: &Field, t: Elem, d: usize) -> Vec<Elem> {
    (0..=d).map(|i| field.pow(t, i as u64)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub t: Elem,
    pub subspace: Subspace,
    pub pluecker: PlueckerVector,
}

/// The family `{H(t) | t ∈ F}` of a validated scheme, ordered by `t`.
#[derive(Clone, Debug)]
pub struct Design {
    scheme: CoefficientScheme,
    members: Vec<Member>,
}

impl Design {
    pub fn scheme(&self) -> &CoefficientScheme {
        &self.scheme
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn subspaces(&self) -> Vec<Subspace> {
        self.members.iter().map(|m| m.subspace.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Builds every member `H(t)`. The member at `t = 0` comes from the closed
/// form (with `0^0 = 1`), which must reduce to `span{e_0, …, e_{r-1}}`.
pub fn build_design(scheme: &CoefficientScheme) -> Result<Design> {
    scheme.validate()?;
    let f = scheme.field();
    let (m, r) = (scheme.m(), scheme.r());
    let mut members = Vec::with_capacity(f.order() as usize);
    for t in f.elements() {
        let subspace = if t.is_zero() {
            let coords = scheme.closed_form(t);
            let lead = IndexTuple::new((0..r).collect())?.lex_rank(m);
            if coords[lead].is_zero()
                || coords
                    .iter()
                    .enumerate()
                    .any(|(k, c)| k != lead && !c.is_zero())
            {
                return Err(Error::InvalidScheme(
                    "closed form at t = 0 is not e_0 ∧ … ∧ e_{r-1}".into(),
                ));
            }
            Subspace::coordinate(f, m, &(0..r).collect::<Vec<_>>())?
        } else {
            Subspace::from_rows(&scheme.spanning_matrix(t)?)
        };
        if subspace.rank() != r {
            return Err(Error::InvalidScheme(format!(
                "member at t = {t} has rank {}",
                subspace.rank()
            )));
        }
        let pv = pluecker(&subspace)?;
        let expected = PlueckerVector::from_coords(f, m, r, scheme.closed_form(t))?;
        if pv != expected {
            return Err(Error::Inconsistent(format!(
                "member at t = {t} disagrees with its closed form"
            )));
        }
        members.push(Member {
            t,
            subspace,
            pluecker: pv,
        });
    }
    Ok(Design {
        scheme: scheme.clone(),
        members,
    })
}

/// First `ω` (in encoding order) for which every coefficient is nonzero.
pub fn find_omega(field: &Field, r: usize, s: usize, family: Family) -> Result<Option<Elem>> {
    if family == Family::Tangent {
        return Err(Error::InvalidScheme("tangent family has no omega".into()));
    }
    for w in field.nonzero_elements() {
        let scheme = CoefficientScheme::new(field, family, r, s, Some(w))?;
        if scheme.validate().is_ok() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// All `ω` with their verdicts, for exploring small fields.
pub fn explore_omegas(
    field: &Field,
    r: usize,
    s: usize,
    family: Family,
) -> Result<Vec<(Elem, Option<IndexTuple>)>> {
    if family == Family::Tangent {
        return Err(Error::InvalidScheme("tangent family has no omega".into()));
    }
    field
        .nonzero_elements()
        .map(|w| {
            let scheme = CoefficientScheme::new(field, family, r, s, Some(w))?;
            Ok((w, scheme.first_vanishing_coeff()))
        })
        .collect()
}

/// `det(a_k^{j_ℓ})` for strictly increasing exponents.
pub fn generalized_vandermonde(
    field: &Field,
    exponents: &[u64],
    elements: &[Elem],
) -> Result<Elem> {
    if exponents.len() != elements.len() {
        return Err(Error::LengthMismatch(exponents.len(), elements.len()));
    }
    if exponents.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::MonotonicityViolation(format!("{exponents:?}")));
    }
    let rows: Vec<Vec<Elem>> = elements
        .iter()
        .map(|&a| exponents.iter().map(|&j| field.pow(a, j)).collect())
        .collect();
    Matrix::from_rows(field, exponents.len(), &rows)?.det()
}

/// Exponent sums `Σ(σ) = Σ_k b_k·j_{σ(k)}` and the bounds on them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaBounds {
    pub sigma_ident: i64,
    pub sigma_opp: i64,
    /// `N(d-r)(r-1)/2`, bounding `max Σ - min Σ`.
    #[serde(serialize_with = "ratio_str")]
    pub max_minus_min_bound: Ratio<i64>,
    /// `N(d-r)(r-1) - C(N,2)·d/3`, bounding the leading exponent `Σ(ident)`.
    #[serde(serialize_with = "ratio_str")]
    pub leading_degree_bound: Ratio<i64>,
    /// `C(r,2)(d-r)`, bounding the number of nonzero roots in `ω`.
    pub root_count_bound: i64,
}

fn ratio_str<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

pub fn sigma_bounds(j: &[i64], b: &[i64], d: i64, r: i64) -> Result<SigmaBounds> {
    if j.len() != b.len() {
        return Err(Error::LengthMismatch(j.len(), b.len()));
    }
    let inc = |v: &[i64]| v.windows(2).all(|w| w[0] < w[1]);
    if !inc(j) || j.first().is_some_and(|&x| x < 0) || j.last().is_some_and(|&x| x > r - 1) {
        return Err(Error::MonotonicityViolation(format!(
            "j = {j:?} must increase within 0..={}",
            r - 1
        )));
    }
    if !inc(b) || b.first().is_some_and(|&x| x < 0) || b.last().is_some_and(|&x| x > d - r) {
        return Err(Error::MonotonicityViolation(format!(
            "b = {b:?} must increase within 0..={}",
            d - r
        )));
    }
    let n = j.len() as i64;
    let sigma_ident = b.iter().zip(j).map(|(x, y)| x * y).sum();
    let sigma_opp = b.iter().zip(j.iter().rev()).map(|(x, y)| x * y).sum();
    let base = n * (d - r) * (r - 1);
    Ok(SigmaBounds {
        sigma_ident,
        sigma_opp,
        max_minus_min_bound: Ratio::new(base, 2),
        leading_degree_bound: Ratio::from_integer(base) - Ratio::new(n * (n - 1) / 2 * d, 3),
        root_count_bound: r * (r - 1) / 2 * (d - r),
    })
}

/// Which sufficient conditions for strong `(s, r·s)` designs in `F^{r+s}` hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExistenceConditions {
    pub r: usize,
    pub s: usize,
    pub field: String,
    pub characteristic_zero: bool,
    pub characteristic_exceeds_m: bool,
    pub order_exceeds_count_bound: bool,
    pub order_exceeds_power_bound: bool,
    pub count_bound: String,
    pub power_bound: String,
    pub any: bool,
}

pub fn existence_conditions(r: usize, s: usize, field: &Field) -> Result<ExistenceConditions> {
    if r < 2 || s < 2 {
        return Err(Error::ParameterOutOfRange(format!(
            "need r, s >= 2, got r = {r}, s = {s}"
        )));
    }
    let q = BigUint::from(field.order());
    let p = field.characteristic() as usize;
    let c2 = binomial(r, 2);
    let count_bound = BigUint::from(binomial(r + s, r)) * BigUint::from(c2) * BigUint::from(s - 1);
    let power_bound = BigUint::from(p).pow((c2 * (s - 1)) as u32);
    let characteristic_exceeds_m = p > r + s;
    let order_exceeds_count_bound = q > count_bound;
    let order_exceeds_power_bound = q > power_bound;
    Ok(ExistenceConditions {
        r,
        s,
        field: field.to_string(),
        characteristic_zero: false,
        characteristic_exceeds_m,
        order_exceeds_count_bound,
        order_exceeds_power_bound,
        count_bound: count_bound.to_string(),
        power_bound: power_bound.to_string(),
        any: characteristic_exceeds_m || order_exceeds_count_bound || order_exceeds_power_bound,
    })
}
