//! Univariate polynomials over a finite field and the covector operators
//! `P_z^[n]`.
//!
//! Square polynomial matrices get exact determinants.

use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::constructions::CoefficientScheme;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::linalg::{Matrix, Subspace};

/// A polynomial with coefficients stored constant term first, trailing
/// zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Poly{:?}",
            self.coeffs.iter().map(|c| c.index()).collect::<Vec<_>>()
        )
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (e, c.index()) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => f.write_str("X")?,
                (1, _) => write!(f, "{c}X")?,
                (_, 1) => write!(f, "X^{e}")?,
                _ => write!(f, "{c}X^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&c.index())?;
        }
        seq.end()
    }
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_ints(field: &Field, coeffs: &[i64]) -> Self {
        Poly::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Field) -> Self {
        Poly::new(field, Vec::new())
    }

    pub fn constant(field: &Field, c: Elem) -> Self {
        Poly::new(field, vec![c])
    }

    pub fn one(field: &Field) -> Self {
        Poly::constant(field, Elem::ONE)
    }

    /// `c·X^e`.
    pub fn monomial(field: &Field, c: Elem, e: usize) -> Self {
        let mut coeffs = vec![Elem::ZERO; e + 1];
        coeffs[e] = c;
        Poly::new(field, coeffs)
    }

    /// The monic linear factor `X - t`.
    pub fn linear(field: &Field, t: Elem) -> Self {
        Poly::new(field, vec![field.neg(t), Elem::ONE])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, e: usize) -> Elem {
        self.coeffs.get(e).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            f,
            (0..n)
                .map(|e| f.add(self.coeff(e), other.coeff(e)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            f,
            (0..n)
                .map(|e| f.sub(self.coeff(e), other.coeff(e)))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly::new(
            &self.field,
            self.coeffs.iter().map(|&c| self.field.neg(c)).collect(),
        )
    }

    pub fn scale(&self, c: Elem) -> Poly {
        Poly::new(
            &self.field,
            self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    /// Horner evaluation.
    pub fn eval(&self, t: Elem) -> Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, t), c))
    }

    /// Quotient and remainder of Euclidean division.
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let f = &self.field;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = f.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut quot = vec![Elem::ZERO; rem.len() - dd];
        for e in (dd..rem.len()).rev() {
            let c = f.mul(rem[e], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[e - dd] = c;
            for (k, &b) in divisor.coeffs.iter().enumerate() {
                let idx = e - dd + k;
                rem[idx] = f.sub(rem[idx], f.mul(c, b));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(f, quot), Poly::new(f, rem)))
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Inconsistent(format!(
                "{divisor} does not divide {self}"
            )));
        }
        Ok(q)
    }
}

/// Largest `e` with `(X - t)^e` dividing `p`, by repeated synthetic division.
pub fn root_multiplicity(p: &Poly, t: Elem) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let f = p.field();
    let mut cur = p.coeffs.clone();
    let mut mult = 0;
    loop {
        // synthetic division by (X - t): quotient in cur[1..], remainder in cur[0]
        let n = cur.len();
        for e in (0..n - 1).rev() {
            cur[e] = f.add(cur[e], f.mul(t, cur[e + 1]));
        }
        if !cur[0].is_zero() {
            return Ok(mult);
        }
        mult += 1;
        cur.remove(0);
    }
}

/// `P_z^[n](X) = Σ_{i>=n} z_i·h(i,n)·X^(i-n)`.
pub fn covector_poly(z: &[Elem], scheme: &CoefficientScheme, n: usize) -> Result<Poly> {
    let d = scheme.d();
    if z.len() != d + 1 {
        return Err(Error::LengthMismatch(z.len(), d + 1));
    }
    if n >= scheme.r() {
        return Err(Error::ParameterOutOfRange(format!(
            "operator index {n} >= r = {}",
            scheme.r()
        )));
    }
    if let Some(i) = (0..n).find(|&i| !scheme.h(i, n).is_zero()) {
        return Err(Error::NonPolynomialScheme { i, n });
    }
    let f = scheme.field();
    Ok(Poly::new(
        f,
        (n..=d).map(|i| f.mul(z[i], scheme.h(i, n))).collect(),
    ))
}

/// Basis of `W^⊥` with the last `j` coordinates of row `j` equal to zero.
pub fn reduced_perp_basis(w: &Subspace) -> Matrix {
    let perp = w.orthogonal_complement();
    let m = w.ambient();
    let rev: Vec<usize> = (0..m).rev().collect();
    let reduced = perp.basis().select_columns(&rev).rref().matrix;
    reduced.select_columns(&rev)
}

/// The square matrix whose entry `(n, j)` is `P^[n]_{b(j)}`.
pub fn build_m(basis: &Matrix, scheme: &CoefficientScheme) -> Result<PolyMatrix> {
    let r = scheme.r();
    let d = scheme.d();
    if basis.rows() != r || basis.cols() != d + 1 {
        return Err(Error::ShapeMismatch(format!(
            "need {r} covectors of length {}, got {}x{}",
            d + 1,
            basis.rows(),
            basis.cols()
        )));
    }
    for j in 0..r {
        if basis.row(j)[d + 1 - j..].iter().any(|c| !c.is_zero()) {
            return Err(Error::UnreducedBasis(format!(
                "b({}) has a nonzero among its last {j} coordinates",
                j + 1
            )));
        }
    }
    let entries = (0..r)
        .map(|n| {
            (0..r)
                .map(|j| covector_poly(basis.row(j), scheme, n))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PolyMatrix::new(scheme.field(), entries)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    field: Field,
    entries: Vec<Vec<Poly>>,
}

impl PolyMatrix {
    pub fn new(field: &Field, entries: Vec<Vec<Poly>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch(
                "polynomial matrix must be square".into(),
            ));
        }
        if entries.iter().flatten().any(|p| p.field() != field) {
            return Err(Error::FieldMismatch);
        }
        Ok(PolyMatrix {
            field: field.clone(),
            entries,
        })
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Poly::one(field)
                        } else {
                            Poly::zero(field)
                        }
                    })
                    .collect()
            })
            .collect();
        PolyMatrix {
            field: field.clone(),
            entries,
        }
    }

    /// Constant matrix.
    pub fn from_matrix(mat: &Matrix) -> Result<Self> {
        let f = mat.field();
        let entries = (0..mat.rows())
            .map(|i| {
                (0..mat.cols())
                    .map(|j| Poly::constant(f, mat.get(i, j)))
                    .collect()
            })
            .collect();
        PolyMatrix::new(f, entries)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i][j]
    }

    pub fn eval_at(&self, t: Elem) -> Matrix {
        let n = self.size();
        let rows: Vec<Vec<Elem>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|p| p.eval(t)).collect())
            .collect();
        Matrix::from_rows(&self.field, n, &rows).expect("square")
    }

    /// Leibniz expansion for sizes up to 3, fraction-free elimination beyond.
    pub fn det(&self) -> Poly {
        if self.size() <= 3 {
            self.det_leibniz()
        } else {
            self.det_bareiss()
        }
    }

    pub fn det_leibniz(&self) -> Poly {
        let n = self.size();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = Poly::zero(&self.field);
        permute(&mut perm, 0, false, &mut |p, odd| {
            let term = p
                .iter()
                .enumerate()
                .fold(Poly::one(&self.field), |acc, (i, &j)| {
                    acc.mul(&self.entries[i][j])
                });
            total = if odd {
                total.sub(&term)
            } else {
                total.add(&term)
            };
        });
        total
    }

    pub fn det_bareiss(&self) -> Poly {
        let n = self.size();
        let f = &self.field;
        if n == 0 {
            return Poly::one(f);
        }
        let mut a = self.entries.clone();
        let mut negate = false;
        let mut prev = Poly::one(f);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        negate = !negate;
                    }
                    None => return Poly::zero(f),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                    a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        if negate {
            det.neg()
        } else {
            det
        }
    }
}

/// Heap-free permutation walk tracking parity via transpositions.
fn permute(p: &mut Vec<usize>, k: usize, odd: bool, visit: &mut impl FnMut(&[usize], bool)) {
    if k == p.len() {
        visit(p, odd);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, odd ^ (i != k), visit);
        p.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::Family;
    use crate::field::make_field;
    use crate::grassmann::random_subspace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> Field {
        make_field(p, 1, None).unwrap()
    }

    fn ints(p: &Poly) -> Vec<u32> {
        p.coeffs().iter().map(|c| c.index()).collect()
    }

    fn random_poly(f: &Field, max_deg: usize, rng: &mut ChaCha8Rng) -> Poly {
        Poly::new(
            f,
            (0..=max_deg)
                .map(|_| f.element(rng.gen_range(0..f.order())).unwrap())
                .collect(),
        )
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let f = gf(5);
        assert_eq!(Poly::zero(&f).degree(), None);
        assert_eq!(Poly::from_ints(&f, &[3, 0, 5]).degree(), Some(0));
        assert!(Poly::from_ints(&f, &[5, 10]).is_zero());
    }

    #[test]
    fn divrem_roundtrip() {
        let f = gf(7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_poly(&f, 6, &mut rng);
            let b = random_poly(&f, 3, &mut rng);
            if b.is_zero() {
                continue;
            }
            let (q, r) = a.divrem(&b).unwrap();
            assert_eq!(q.mul(&b).add(&r), a);
            assert!(r.degree() < b.degree());
        }
        assert_eq!(
            Poly::one(&f).divrem(&Poly::zero(&f)).unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn multiplicity_examples() {
        let f = gf(5);
        let one = f.from_int(1);
        let two = f.from_int(2);
        let p = Poly::linear(&f, one)
            .mul(&Poly::linear(&f, one))
            .mul(&Poly::linear(&f, two));
        assert_eq!(root_multiplicity(&p, one).unwrap(), 2);
        assert_eq!(root_multiplicity(&p, two).unwrap(), 1);
        assert_eq!(root_multiplicity(&p, f.from_int(3)).unwrap(), 0);
        assert_eq!(
            root_multiplicity(&Poly::zero(&f), one).unwrap_err(),
            Error::ZeroPolynomial
        );
    }

    #[test]
    fn multiplicities_bounded_by_degree() {
        let f = gf(7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = random_poly(&f, 8, &mut rng);
            if p.is_zero() {
                continue;
            }
            let total: usize = f
                .elements()
                .map(|t| root_multiplicity(&p, t).unwrap())
                .sum();
            assert!(total <= p.degree().unwrap());
        }
    }

    #[test]
    fn covector_operator_examples() {
        let f = gf(7);
        let tangent = CoefficientScheme::new(&f, Family::Tangent, 2, 2, None).unwrap();
        let e3: Vec<Elem> = [0, 0, 0, 1].iter().map(|&c| f.from_int(c)).collect();
        assert_eq!(
            covector_poly(&e3, &tangent, 1).unwrap(),
            Poly::monomial(&f, f.from_int(3), 2)
        );
        let z: Vec<Elem> = [4, 1, 0, 6].iter().map(|&c| f.from_int(c)).collect();
        assert_eq!(
            covector_poly(&z, &tangent, 0).unwrap(),
            Poly::new(&f, z.clone())
        );
        let secant = CoefficientScheme::new(&f, Family::Secant, 2, 2, Some(f.from_int(3))).unwrap();
        assert_eq!(
            covector_poly(&z, &secant, 1).unwrap_err(),
            Error::NonPolynomialScheme { i: 0, n: 1 }
        );
    }

    #[test]
    fn build_m_example() {
        let f = gf(7);
        let tangent = CoefficientScheme::new(&f, Family::Tangent, 2, 2, None).unwrap();
        let b = Matrix::from_ints(&f, 4, &[vec![1, 0, 0, 1], vec![0, 1, 0, 0]]).unwrap();
        let m = build_m(&b, &tangent).unwrap();
        assert_eq!(ints(m.get(0, 0)), vec![1, 0, 0, 1]);
        assert_eq!(ints(m.get(0, 1)), vec![0, 1]);
        assert_eq!(ints(m.get(1, 0)), vec![0, 0, 3]);
        assert_eq!(ints(m.get(1, 1)), vec![1]);
        // 1 + X^3 - 3X^3 = 1 - 2X^3
        assert_eq!(m.det(), Poly::from_ints(&f, &[1, 0, 0, -2]));

        let unreduced = Matrix::from_ints(&f, 4, &[vec![1, 0, 0, 1], vec![0, 1, 0, 1]]).unwrap();
        assert!(matches!(
            build_m(&unreduced, &tangent),
            Err(Error::UnreducedBasis(_))
        ));
    }

    #[test]
    fn small_determinants() {
        let f = gf(5);
        assert_eq!(PolyMatrix::identity(&f, 4).det(), Poly::one(&f));
        let singular =
            Matrix::from_ints(&f, 3, &[vec![1, 2, 3], vec![2, 4, 1], vec![3, 1, 4]]).unwrap();
        assert!(PolyMatrix::from_matrix(&singular).unwrap().det().is_zero());
    }

    #[test]
    fn bareiss_agrees_with_leibniz() {
        let f = gf(7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=5 {
            for _ in 0..10 {
                let entries = (0..n)
                    .map(|_| (0..n).map(|_| random_poly(&f, 2, &mut rng)).collect())
                    .collect();
                let m = PolyMatrix::new(&f, entries).unwrap();
                assert_eq!(m.det_bareiss(), m.det_leibniz());
            }
        }
        // forces a row swap at the first pivot
        let x = Poly::from_ints(&f, &[0, 1]);
        let z = Poly::zero(&f);
        let o = Poly::one(&f);
        let m = PolyMatrix::new(
            &f,
            vec![
                vec![z.clone(), o.clone(), x.clone()],
                vec![x.clone(), z.clone(), o.clone()],
                vec![o.clone(), x.clone(), z],
            ],
        )
        .unwrap();
        assert_eq!(m.det_bareiss(), m.det_leibniz());
    }

    #[test]
    fn determinant_commutes_with_evaluation() {
        let f = gf(7);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=4 {
            let entries = (0..n)
                .map(|_| (0..n).map(|_| random_poly(&f, 3, &mut rng)).collect())
                .collect();
            let m = PolyMatrix::new(&f, entries).unwrap();
            let det = m.det();
            for t in f.elements() {
                assert_eq!(det.eval(t), m.eval_at(t).det().unwrap());
            }
        }
    }

    #[test]
    fn multiplicity_dominates_kernel_rank() {
        let f = gf(7);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 50 {
            let n = rng.gen_range(1..=3);
            // a common linear factor in one column forces a kernel at its root
            let t0 = f.element(rng.gen_range(0..7)).unwrap();
            let entries: Vec<Vec<Poly>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|j| {
                            let p = random_poly(&f, 2, &mut rng);
                            if j == 0 {
                                p.mul(&Poly::linear(&f, t0))
                            } else {
                                p
                            }
                        })
                        .collect()
                })
                .collect();
            let m = PolyMatrix::new(&f, entries).unwrap();
            let det = m.det();
            if det.is_zero() {
                continue;
            }
            for t in f.elements() {
                let kernel_rank = m.eval_at(t).kernel().rows();
                assert!(root_multiplicity(&det, t).unwrap() >= kernel_rank);
            }
            checked += 1;
        }
    }

    #[test]
    fn kernel_of_m_tracks_perp_intersection() {
        let f = gf(7);
        let tangent = CoefficientScheme::new(&f, Family::Tangent, 2, 2, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w = random_subspace(&f, 4, 2, &mut rng).unwrap();
            let t = f.element(rng.gen_range(0..7)).unwrap();
            let b = reduced_perp_basis(&w);
            let m = build_m(&b, &tangent).unwrap();
            let h = if t.is_zero() {
                Subspace::coordinate(&f, 4, &[0, 1]).unwrap()
            } else {
                Subspace::from_rows(&tangent.spanning_matrix(t).unwrap())
            };
            let oracle = h
                .orthogonal_complement()
                .intersect(&w.orthogonal_complement())
                .unwrap()
                .rank();
            assert_eq!(m.eval_at(t).kernel().rows(), oracle);
        }
    }
}
