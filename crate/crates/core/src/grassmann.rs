//! Enumeration of the Grassmannian of rank-`r` subspaces of `F_q^m`, with
//! the counting and degree formulas used as oracles.

use std::ops::Range;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::linalg::{Matrix, Subspace};

/// Number of rank-`r` subspaces of `F_q^m`.
pub fn gaussian_binomial(m: usize, r: usize, q: u64) -> Result<BigUint> {
    if r > m {
        return Err(Error::RankOutOfRange { m, r });
    }
    if q < 2 {
        return Err(Error::ParameterOutOfRange(format!(
            "q = {q} must be at least 2"
        )));
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r {
        num *= q.pow((m - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    Ok(num / den)
}

/// Dimension of the Grassmannian of rank-`r` subspaces of `F^{r+s}`.
pub fn grass_dim(r: usize, s: usize) -> usize {
    r * s
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Degree of the Grassmannian `G(r, s)` in its Plücker embedding:
/// `0!1!…(s-1)! · (rs)! / (r!(r+1)!…(r+s-1)!)`.
pub fn grass_degree(r: usize, s: usize) -> BigUint {
    let mut num = factorial(r * s);
    let mut den = BigUint::one();
    for i in 0..s {
        num *= factorial(i);
        den *= factorial(r + i);
    }
    debug_assert!((&num % &den) == BigUint::from(0u32));
    num / den
}

/// Pivot sets of size `r` in `0..m`, colexicographically ordered.
fn colex_pivot_sets(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = crate::exterior::index_tuples(m, r)
        .into_iter()
        .map(|t| t.indices().to_vec())
        .collect();
    sets.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    sets
}

/// The set of all rank-`r` subspaces of `F_q^m` in a fixed order.
///
/// Position `k` is decoded by locating its pivot set (colexicographic
/// order) and reading the free RREF entries, in row-major order, as base-`q`
/// digits with the first free entry least significant.
#[derive(Clone, Debug)]
pub struct Grassmannian {
    field: Field,
    m: usize,
    r: usize,
    pivot_sets: Vec<Vec<usize>>,
    free: Vec<Vec<(usize, usize)>>,
    offsets: Vec<u64>,
    total: u64,
}

impl Grassmannian {
    pub fn new(field: &Field, m: usize, r: usize) -> Result<Self> {
        if r > m {
            return Err(Error::RankOutOfRange { m, r });
        }
        let q = field.order();
        let pivot_sets = colex_pivot_sets(m, r);
        let mut free = Vec::with_capacity(pivot_sets.len());
        let mut offsets = Vec::with_capacity(pivot_sets.len());
        let mut total: u64 = 0;
        for set in &pivot_sets {
            let positions: Vec<(usize, usize)> = set
                .iter()
                .enumerate()
                .flat_map(|(i, &p)| (p + 1..m).filter(|j| !set.contains(j)).map(move |j| (i, j)))
                .collect();
            let count = q.checked_pow(positions.len() as u32).ok_or_else(|| {
                Error::ParameterOutOfRange("Grassmannian too large to index".into())
            })?;
            offsets.push(total);
            total = total.checked_add(count).ok_or_else(|| {
                Error::ParameterOutOfRange("Grassmannian too large to index".into())
            })?;
            free.push(positions);
        }
        Ok(Grassmannian {
            field: field.clone(),
            m,
            r,
            pivot_sets,
            free,
            offsets,
            total,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// The subspace at enumeration position `index < len()`.
    pub fn subspace_at(&self, index: u64) -> Subspace {
        assert!(
            index < self.total,
            "index {index} out of range {}",
            self.total
        );
        let set_idx = self.offsets.partition_point(|&o| o <= index) - 1;
        let mut local = index - self.offsets[set_idx];
        let q = self.field.order();
        let pivots = &self.pivot_sets[set_idx];
        let mut basis = Matrix::zeros(&self.field, self.r, self.m);
        for (i, &p) in pivots.iter().enumerate() {
            basis.set(i, p, Elem::ONE);
        }
        for &(i, j) in &self.free[set_idx] {
            basis.set(i, j, self.field.element(local % q).expect("digit below q"));
            local /= q;
        }
        Subspace::from_rref_unchecked(basis, pivots.clone())
    }

    pub fn iter(&self) -> GrassmannIter<'_> {
        self.range(0..self.total)
    }

    /// Iterator over positions `lo..hi`; independent ranges can be scanned in parallel.
    pub fn range(&self, range: Range<u64>) -> GrassmannIter<'_> {
        let end = range.end.min(self.total);
        GrassmannIter {
            grass: self,
            pos: range.start.min(end),
            end,
        }
    }

    /// Splits `0..len()` into at most `parts` contiguous ranges.
    pub fn split(&self, parts: u64) -> Vec<Range<u64>> {
        let parts = parts.max(1);
        let chunk = self.total.div_ceil(parts).max(1);
        (0..self.total)
            .step_by(chunk as usize)
            .map(|lo| lo..(lo + chunk).min(self.total))
            .collect()
    }
}

pub struct GrassmannIter<'a> {
    grass: &'a Grassmannian,
    pos: u64,
    end: u64,
}

impl Iterator for GrassmannIter<'_> {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.pos >= self.end {
            return None;
        }
        let s = self.grass.subspace_at(self.pos);
        self.pos += 1;
        Some(s)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.pos) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for GrassmannIter<'_> {}

/// All rank-`r` subspaces of `F^m` in enumeration order.
pub fn enumerate_subspaces(field: &Field, m: usize, r: usize) -> Result<Grassmannian> {
    Grassmannian::new(field, m, r)
}

/// Uniformly random rank-`r` subspace: a random `r × m` matrix, resampled
/// until it has full rank, then canonicalized.
pub fn random_subspace<R: Rng + ?Sized>(
    field: &Field,
    m: usize,
    r: usize,
    rng: &mut R,
) -> Result<Subspace> {
    if r > m {
        return Err(Error::RankOutOfRange { m, r });
    }
    let q = field.order();
    loop {
        let rows: Vec<Vec<Elem>> = (0..r)
            .map(|_| {
                (0..m)
                    .map(|_| field.element(rng.gen_range(0..q)).unwrap())
                    .collect()
            })
            .collect();
        let s = Subspace::from_rows(&Matrix::from_rows(field, m, &rows)?);
        if s.rank() == r {
            return Ok(s);
        }
    }
}

/// Count as `u64` when it fits.
pub fn count_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}
