//! Measuring weak and strong design parameters. Also blocking subspaces,
//! generator-set verdicts and the lower bounds.
//!
//! Every scan over the Grassmannian splits the enumeration into contiguous
//! ranges processed in parallel; partial results are reduced in range order
//! so witnesses are always the first optimum in enumeration order.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::constructions::Design;
use crate::error::{Error, Result};
use crate::exterior::{dual_pluecker, pairing, pluecker, PlueckerVector};
use crate::field::Field;
use crate::grassmann::{gaussian_binomial, random_subspace, Grassmannian};
use crate::linalg::Subspace;
use crate::polyalg::{build_m, reduced_perp_basis, root_multiplicity};

/// Default cap on the number of candidate subspaces in a scan.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerifyMode {
    Exhaustive,
    /// `count` uniform samples from a ChaCha stream seeded with `seed`.
    Sampled {
        count: u64,
        seed: u64,
    },
}

impl VerifyMode {
    pub fn is_exhaustive(&self) -> bool {
        matches!(self, VerifyMode::Exhaustive)
    }
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyMode::Exhaustive => f.write_str("exhaustive"),
            VerifyMode::Sampled { count, seed } => write!(f, "sampled:{count}:{seed}"),
        }
    }
}

impl FromStr for VerifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exhaustive" {
            return Ok(VerifyMode::Exhaustive);
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["sampled", n, seed] => {
                let count = n
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad sample count `{n}`")))?;
                let seed = seed
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad seed `{seed}`")))?;
                Ok(VerifyMode::Sampled { count, seed })
            }
            _ => Err(Error::Parse(format!(
                "mode must be `exhaustive` or `sampled:N:SEED`, got `{s}`"
            ))),
        }
    }
}

/// How a scan chooses its candidates and how many it may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scan {
    pub mode: VerifyMode,
    pub budget: u64,
}

impl Default for Scan {
    fn default() -> Self {
        Scan {
            mode: VerifyMode::Exhaustive,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl Scan {
    pub fn exhaustive() -> Self {
        Scan::default()
    }

    pub fn sampled(count: u64, seed: u64) -> Self {
        Scan {
            mode: VerifyMode::Sampled { count, seed },
            ..Scan::default()
        }
    }

    pub fn with_budget(self, budget: u64) -> Self {
        Scan { budget, ..self }
    }
}

enum Candidates {
    All(Grassmannian),
    Sample(Vec<Subspace>),
}

impl Candidates {
    fn new(field: &Field, m: usize, rank: usize, scan: &Scan) -> Result<Self> {
        match scan.mode {
            VerifyMode::Exhaustive => {
                let total = gaussian_binomial(m, rank, field.order())?;
                if total.to_u64().is_none_or(|n| n > scan.budget) {
                    return Err(Error::BudgetExceeded {
                        needed: total.to_string(),
                        budget: scan.budget,
                    });
                }
                Ok(Candidates::All(Grassmannian::new(field, m, rank)?))
            }
            VerifyMode::Sampled { count, seed } => {
                if count > scan.budget {
                    return Err(Error::BudgetExceeded {
                        needed: count.to_string(),
                        budget: scan.budget,
                    });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sample = (0..count)
                    .map(|_| random_subspace(field, m, rank, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Candidates::Sample(sample))
            }
        }
    }

    fn len(&self) -> u64 {
        match self {
            Candidates::All(g) => g.len(),
            Candidates::Sample(v) => v.len() as u64,
        }
    }

    fn get(&self, i: u64) -> Subspace {
        match self {
            Candidates::All(g) => g.subspace_at(i),
            Candidates::Sample(v) => v[i as usize].clone(),
        }
    }

    fn ranges(&self) -> Vec<Range<u64>> {
        let len = self.len();
        let parts = (rayon::current_num_threads() as u64 * 8).max(1);
        let chunk = len.div_ceil(parts).max(1);
        (0..len)
            .step_by(chunk as usize)
            .map(|lo| lo..(lo + chunk).min(len))
            .collect()
    }

    /// First position (in enumeration order) satisfying `pred`.
    fn find_first<F>(&self, pred: F) -> Result<Option<(u64, Subspace)>>
    where
        F: Fn(&Subspace) -> Result<bool> + Sync,
    {
        let hit = self.ranges().into_par_iter().find_map_first(|range| {
            for i in range {
                let w = self.get(i);
                match pred(&w) {
                    Ok(true) => return Some(Ok((i, w))),
                    Ok(false) => {}
                    Err(e) => return Some(Err(e)),
                }
            }
            None
        });
        hit.transpose()
    }
}

/// Rank-`r` members sharing a field and ambient space, with Plücker vectors
/// when the pairing applies.
struct Members<'a> {
    field: Field,
    m: usize,
    subs: &'a [Subspace],
    uniform_rank: Option<usize>,
    pluecker: Vec<PlueckerVector>,
}

impl<'a> Members<'a> {
    fn new(subs: &'a [Subspace]) -> Result<Self> {
        let first = subs
            .first()
            .ok_or_else(|| Error::ParameterOutOfRange("no members given".into()))?;
        let (field, m) = (first.field().clone(), first.ambient());
        for h in subs {
            if h.field() != &field {
                return Err(Error::FieldMismatch);
            }
            if h.ambient() != m {
                return Err(Error::AmbientMismatch(format!(
                    "member in F^{} among members in F^{m}",
                    h.ambient()
                )));
            }
        }
        let r = first.rank();
        let uniform_rank = subs.iter().all(|h| h.rank() == r).then_some(r);
        let pluecker = match uniform_rank {
            Some(r) if r > 0 => subs.iter().map(pluecker).collect::<Result<Vec<_>>>()?,
            _ => Vec::new(),
        };
        Ok(Members {
            field,
            m,
            subs,
            uniform_rank,
            pluecker,
        })
    }

    fn rank(&self) -> Result<usize> {
        self.uniform_rank
            .ok_or_else(|| Error::ShapeMismatch("members have different ranks".into()))
    }

    /// Whether the pairing decides meets against rank-`s` subspaces.
    fn pairing_applies(&self, s: usize) -> bool {
        !self.pluecker.is_empty() && s > 0 && self.uniform_rank.map(|r| r + s) == Some(self.m)
    }

    /// `(#members meeting w, Σ rank(H_i ∩ w))`, with the pairing and the
    /// modular-law rank checked against each other.
    fn counts(&self, w: &Subspace) -> Result<(usize, usize)> {
        let star = if self.pairing_applies(w.rank()) {
            Some(dual_pluecker(w)?)
        } else {
            None
        };
        let mut weak = 0;
        let mut strong = 0;
        for (i, h) in self.subs.iter().enumerate() {
            let rank = h.meet_rank(w)?;
            if let Some(star) = &star {
                let met = pairing(star, &self.pluecker[i])?.is_zero();
                if met != (rank > 0) {
                    return Err(Error::Inconsistent(format!(
                        "pairing and rank disagree on member {i}"
                    )));
                }
            }
            weak += usize::from(rank > 0);
            strong += rank;
        }
        Ok((weak, strong))
    }

    /// Counts recomputed from explicit intersections.
    fn counts_by_intersection(&self, w: &Subspace) -> Result<(usize, usize)> {
        let mut weak = 0;
        let mut strong = 0;
        for h in self.subs {
            let rank = h.intersect(w)?.rank();
            weak += usize::from(rank > 0);
            strong += rank;
        }
        Ok((weak, strong))
    }

    fn meets_all(&self, w: &Subspace) -> Result<bool> {
        if self.pairing_applies(w.rank()) {
            let star = dual_pluecker(w)?;
            for p in &self.pluecker {
                if !pairing(&star, p)?.is_zero() {
                    return Ok(false);
                }
            }
            Ok(true)
        } else {
            for h in self.subs {
                if h.meet_rank(w)? == 0 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// A maximum over scanned subspaces with the first subspace attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub value: usize,
    pub witness: Subspace,
}

/// Weak and strong parameters from one scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurements {
    pub weak: Measurement,
    pub strong: Measurement,
    pub mode: VerifyMode,
}

impl Measurements {
    /// `A_weak <= A_strong <= min(r, s)·A_weak`.
    pub fn sandwich_holds(&self, r: usize, s: usize) -> bool {
        let (w, st) = (self.weak.value, self.strong.value);
        w <= st && st <= r.min(s) * w
    }
}

#[derive(Clone, Copy)]
struct Best {
    weak: (usize, u64),
    strong: (usize, u64),
}

/// Measures both parameters against rank-`s` subspaces in one pass.
pub fn measure(members: &[Subspace], s: usize, scan: &Scan) -> Result<Measurements> {
    let mem = Members::new(members)?;
    if s > mem.m {
        return Err(Error::RankOutOfRange { m: mem.m, r: s });
    }
    let cands = Candidates::new(&mem.field, mem.m, s, scan)?;
    if cands.len() == 0 {
        return Err(Error::ParameterOutOfRange("empty sample".into()));
    }
    let partial: Vec<Result<Best>> = cands
        .ranges()
        .into_par_iter()
        .map(|range| {
            let mut best = Best {
                weak: (0, range.start),
                strong: (0, range.start),
            };
            for i in range {
                let (weak, strong) = mem.counts(&cands.get(i))?;
                if weak > best.weak.0 {
                    best.weak = (weak, i);
                }
                if strong > best.strong.0 {
                    best.strong = (strong, i);
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<Best> = None;
    for p in partial {
        let p = p?;
        best = Some(match best {
            None => p,
            Some(b) => Best {
                weak: if p.weak.0 > b.weak.0 { p.weak } else { b.weak },
                strong: if p.strong.0 > b.strong.0 {
                    p.strong
                } else {
                    b.strong
                },
            },
        });
    }
    let best = best.expect("at least one range");
    let weak = Measurement {
        value: best.weak.0,
        witness: cands.get(best.weak.1),
    };
    let strong = Measurement {
        value: best.strong.0,
        witness: cands.get(best.strong.1),
    };
    if mem.counts_by_intersection(&weak.witness)?.0 != weak.value
        || mem.counts_by_intersection(&strong.witness)?.1 != strong.value
    {
        return Err(Error::Inconsistent(
            "witness does not reproduce its count".into(),
        ));
    }
    Ok(Measurements {
        weak,
        strong,
        mode: scan.mode,
    })
}

/// `max_W #{i : rank(H_i ∩ W) > 0}` over rank-`s` subspaces `W`.
pub fn measure_weak(members: &[Subspace], s: usize, scan: &Scan) -> Result<Measurement> {
    measure(members, s, scan).map(|m| m.weak)
}

/// `max_W Σ_i rank(H_i ∩ W)` over rank-`s` subspaces `W`.
pub fn measure_strong(members: &[Subspace], s: usize, scan: &Scan) -> Result<Measurement> {
    measure(members, s, scan).map(|m| m.strong)
}

/// `(#members meeting w, Σ rank(H_i ∩ w))` for a single subspace.
pub fn counts_at(members: &[Subspace], w: &Subspace) -> Result<(usize, usize)> {
    Members::new(members)?.counts_by_intersection(w)
}

/// First subspace of rank `m - r` (projective co-dimension `r`) meeting every
/// rank-`r` member. `codim` is the projective co-dimension and must equal `r`.
pub fn find_blocker_exhaustive(
    members: &[Subspace],
    codim: usize,
    budget: u64,
) -> Result<Option<Subspace>> {
    let mem = Members::new(members)?;
    let r = mem.rank()?;
    if codim != r {
        return Err(Error::ParameterOutOfRange(format!(
            "blocker co-dimension {codim} must equal member rank {r}"
        )));
    }
    if r == 0 || r >= mem.m {
        return Err(Error::ParameterOutOfRange(format!(
            "member rank {r} must lie in 1..{}",
            mem.m
        )));
    }
    let cands = Candidates::new(
        &mem.field,
        mem.m,
        mem.m - r,
        &Scan::exhaustive().with_budget(budget),
    )?;
    let found = cands.find_first(|w| mem.meets_all(w))?;
    match found {
        Some((_, w)) => {
            for h in members {
                if h.meet_rank(&w)? == 0 {
                    return Err(Error::Inconsistent("blocker misses a member".into()));
                }
            }
            Ok(Some(w))
        }
        None => Ok(None),
    }
}

/// `Σ_{i=0}^{k} ⌊(d-k+i)/(i+1)⌋`.
pub fn counting_bound(d: usize, k: usize) -> usize {
    (0..=k).map(|i| (d - k + i) / (i + 1)).sum()
}

/// Blocker built along the induction on `k`: the first `⌊d/(k+1)⌋` members
/// go into a hyperplane `Π`, the others are cut down to rank-`k` traces in
/// `Π`, and the problem recurses inside `Π`.
pub fn find_blocker_greedy(members: &[Subspace], budget: u64) -> Result<Option<Subspace>> {
    let mem = Members::new(members)?;
    let r = mem.rank()?;
    if r == 0 || r >= mem.m {
        return Err(Error::ParameterOutOfRange(format!(
            "member rank {r} must lie in 1..{}",
            mem.m
        )));
    }
    let (d, k) = (mem.m - 1, r - 1);
    let bound = counting_bound(d, k);
    if members.len() > bound {
        return Err(Error::HypothesisViolated {
            members: members.len(),
            bound,
        });
    }
    let w = greedy(&mem.field, members.to_vec(), d, k, budget)?;
    if let Some(w) = &w {
        debug_assert_eq!(w.rank(), d - k);
        for h in members {
            if h.meet_rank(w)? == 0 {
                return Err(Error::Inconsistent("greedy blocker misses a member".into()));
            }
        }
    }
    Ok(w)
}

fn greedy(
    field: &Field,
    members: Vec<Subspace>,
    d: usize,
    k: usize,
    budget: u64,
) -> Result<Option<Subspace>> {
    let m = d + 1;
    if k == 0 {
        let mut span = Subspace::zero(field, m);
        for p in &members {
            span = span.join(p)?;
        }
        return Ok(Some(extend_to_rank(&span, d)?));
    }
    if k == 1 {
        let total = gaussian_binomial(m, d - 1, field.order())?;
        if total.to_u64().is_none_or(|n| n > budget) {
            return Err(Error::BaseCaseBudgetExceeded {
                needed: total.to_string(),
                budget,
            });
        }
        let cands = Candidates::All(Grassmannian::new(field, m, d - 1)?);
        let mem = Members::new(&members)?;
        return Ok(cands.find_first(|w| mem.meets_all(w))?.map(|(_, w)| w));
    }
    let head = (d / (k + 1)).min(members.len());
    let mut join = Subspace::zero(field, m);
    for h in &members[..head] {
        join = join.join(h)?;
    }
    let pi = extend_to_rank(&join, d)?;
    let traces = members[head..]
        .iter()
        .map(|h| {
            let meet = h.intersect(&pi)?;
            let rows: Vec<Vec<_>> = meet
                .basis()
                .row_vecs()
                .into_iter()
                .take(k)
                .map(|v| pi.pivots().iter().map(|&c| v[c]).collect())
                .collect();
            Subspace::span(field, d, &rows)
        })
        .collect::<Result<Vec<_>>>()?;
    match greedy(field, traces, d - 1, k - 1, budget)? {
        Some(inner) => {
            let lifted = inner.basis().mul(pi.basis())?;
            Ok(Some(Subspace::from_rows(&lifted)))
        }
        None => Ok(None),
    }
}

/// Adds standard basis vectors, in index order, until the rank is `target`.
fn extend_to_rank(sub: &Subspace, target: usize) -> Result<Subspace> {
    let m = sub.ambient();
    let mut cur = sub.clone();
    for j in 0..m {
        if cur.rank() >= target {
            break;
        }
        let e = Subspace::coordinate(sub.field(), m, &[j])?;
        if !cur.contains(&e)? {
            cur = cur.join(&e)?;
        }
    }
    if cur.rank() != target {
        return Err(Error::RankOutOfRange { m, r: target });
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorVerdict {
    pub is_generator: bool,
    /// A co-`k` subspace `Π` whose points on the members do not span it.
    pub failing: Option<Subspace>,
    pub mode: VerifyMode,
}

/// Checks that every subspace `Π` of rank `m - k` is spanned by its
/// intersections with the rank-`(k+1)` members.
pub fn is_generator_set(members: &[Subspace], k: usize, scan: &Scan) -> Result<GeneratorVerdict> {
    let mem = Members::new(members)?;
    let r = mem.rank()?;
    if r != k + 1 {
        return Err(Error::ParameterOutOfRange(format!(
            "members have rank {r}, expected k+1 = {}",
            k + 1
        )));
    }
    if k >= mem.m {
        return Err(Error::RankOutOfRange { m: mem.m, r: k });
    }
    let cands = Candidates::new(&mem.field, mem.m, mem.m - k, scan)?;
    let failing = cands.find_first(|pi| {
        let mut span = Subspace::zero(&mem.field, mem.m);
        for h in members {
            span = span.join(&h.intersect(pi)?)?;
        }
        Ok(span.rank() != pi.rank())
    })?;
    Ok(GeneratorVerdict {
        is_generator: failing.is_none(),
        failing: failing.map(|(_, pi)| pi),
        mode: scan.mode,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpVerdict {
    pub is_generator: bool,
    pub blocker: Option<Subspace>,
    /// A co-`k` subspace failing the generator condition, when one was scanned for.
    pub failing: Option<Subspace>,
    /// Set when there are more members than field elements, so a blocker no
    /// longer rules out the generator property.
    pub equivalence_hypothesis_failed: bool,
}

/// Higgledy-piggledy verdict. Up to `|F|` members this is the absence of a
/// blocker; beyond that the generator condition is scanned directly.
pub fn hp_check(members: &[Subspace], budget: u64) -> Result<HpVerdict> {
    let mem = Members::new(members)?;
    let r = mem.rank()?;
    let blocker = find_blocker_exhaustive(members, r, budget)?;
    if (members.len() as u64) <= mem.field.order() {
        return Ok(HpVerdict {
            is_generator: blocker.is_none(),
            blocker,
            failing: None,
            equivalence_hypothesis_failed: false,
        });
    }
    let g = is_generator_set(members, r - 1, &Scan::exhaustive().with_budget(budget))?;
    Ok(HpVerdict {
        is_generator: g.is_generator,
        blocker,
        failing: g.failing,
        equivalence_hypothesis_failed: true,
    })
}

/// Orthogonal complements of all members.
pub fn dualize(members: &[Subspace]) -> Vec<Subspace> {
    members
        .iter()
        .map(Subspace::orthogonal_complement)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    #[serde(skip)]
    pub sum: u64,
    pub finite_bound: u64,
    pub closed_field_bound: u64,
}

/// Minimum size of a `k`-generator set of `k`-subspaces in `PG(d, F)`:
/// `min{|F|, Σ_{i=0}^{k} ⌊(d-k+i)/(i+1)⌋} + 1`, with `|F| = q` (or the sum
/// alone when `q` is `None`), next to the closed-field value `(k+1)(d-k)+1`.
pub fn lower_bound(d: u64, k: u64, q: Option<u64>) -> Result<LowerBound> {
    if k >= d {
        return Err(Error::ParameterOutOfRange(format!(
            "need 0 <= k < d, got d = {d}, k = {k}"
        )));
    }
    let sum: u64 = (0..=k).map(|i| (d - k + i) / (i + 1)).sum();
    if k == 1 && sum != d / 2 + d - 1 {
        return Err(Error::Inconsistent(format!(
            "line bound mismatch: {sum} vs {}",
            d / 2 + d - 1
        )));
    }
    let finite_bound = q.map_or(sum, |q| q.min(sum)) + 1;
    Ok(LowerBound {
        sum,
        finite_bound,
        closed_field_bound: (k + 1) * (d - k) + 1,
    })
}

/// The three quantities of the polynomial argument for one `W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyCrosscheck {
    /// `Σ_t rank(H(t)^⊥ ∩ W^⊥)`.
    pub rank_sum: usize,
    /// `deg det M(X)`, absent when the determinant vanishes identically.
    pub det_degree: Option<usize>,
    /// `Σ_t mult(det M, t)`, zero when the determinant vanishes identically.
    pub multiplicity_sum: usize,
    /// `s·(d-s+1)`.
    pub degree_bound: usize,
    pub zero_determinant: bool,
}

impl PolyCrosscheck {
    pub fn chain_holds(&self) -> bool {
        match self.det_degree {
            Some(deg) => {
                self.rank_sum <= self.multiplicity_sum
                    && self.multiplicity_sum <= deg
                    && deg <= self.degree_bound
            }
            None => false,
        }
    }
}

pub fn crosscheck_strong_poly(design: &Design, w: &Subspace) -> Result<PolyCrosscheck> {
    let scheme = design.scheme();
    if let Some((i, n)) = scheme.first_subdiagonal_nonzero() {
        return Err(Error::NonPolynomialScheme { i, n });
    }
    let (s, d) = (scheme.s(), scheme.d());
    if w.ambient() != scheme.m() || w.rank() != s {
        return Err(Error::ShapeMismatch(format!(
            "W must have rank {s} in F^{}",
            scheme.m()
        )));
    }
    let m_x = build_m(&reduced_perp_basis(w), scheme)?;
    let det = m_x.det();
    let w_perp = w.orthogonal_complement();
    let rank_sum = design
        .members()
        .iter()
        .map(|mem| mem.subspace.orthogonal_complement().meet_rank(&w_perp))
        .sum::<Result<usize>>()?;
    let degree_bound = s * (d + 1 - s);
    if det.is_zero() {
        return Ok(PolyCrosscheck {
            rank_sum,
            det_degree: None,
            multiplicity_sum: 0,
            degree_bound,
            zero_determinant: true,
        });
    }
    let multiplicity_sum = design
        .members()
        .iter()
        .map(|mem| root_multiplicity(&det, mem.t))
        .sum::<Result<usize>>()?;
    let check = PolyCrosscheck {
        rank_sum,
        det_degree: det.degree(),
        multiplicity_sum,
        degree_bound,
        zero_determinant: false,
    };
    if !check.chain_holds() {
        return Err(Error::Inconsistent(format!(
            "polynomial inequality chain fails: {check:?}"
        )));
    }
    Ok(check)
}

/// The output of `verify`, carrying the inputs needed to recheck it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignReport {
    pub field: Field,
    pub s: usize,
    pub members: Vec<Subspace>,
    pub mode: VerifyMode,
    pub weak: Option<Measurement>,
    pub strong: Option<Measurement>,
    pub hp: Option<HpVerdict>,
}

fn opt_json(s: &Option<Subspace>) -> Value {
    s.as_ref().map_or(Value::Null, Subspace::to_json)
}

impl DesignReport {
    pub fn r(&self) -> usize {
        self.members.first().map_or(0, Subspace::rank)
    }

    pub fn to_json(&self) -> Value {
        let mut o = Map::new();
        o.insert("n_members".into(), json!(self.members.len()));
        if let Some(w) = &self.weak {
            o.insert("A_weak".into(), json!(w.value));
            o.insert("witness_weak".into(), w.witness.to_json());
        }
        if let Some(st) = &self.strong {
            o.insert("A_strong".into(), json!(st.value));
            o.insert("witness_strong".into(), st.witness.to_json());
        }
        if let Some(hp) = &self.hp {
            let mut h = Map::new();
            h.insert("is_generator".into(), json!(hp.is_generator));
            h.insert("blocker".into(), opt_json(&hp.blocker));
            if hp.failing.is_some() {
                h.insert("failing".into(), opt_json(&hp.failing));
            }
            h.insert(
                "equivalence_hypothesis_failed".into(),
                json!(hp.equivalence_hypothesis_failed),
            );
            o.insert("hp".into(), Value::Object(h));
        }
        o.insert("mode".into(), json!(self.mode.to_string()));
        if !self.mode.is_exhaustive() && (self.weak.is_some() || self.strong.is_some()) {
            o.insert("A_is_lower_bound".into(), json!(true));
        }
        o.insert("field".into(), json!(self.field.to_string()));
        o.insert("r".into(), json!(self.r()));
        o.insert("s".into(), json!(self.s));
        o.insert(
            "members".into(),
            Value::Array(self.members.iter().map(Subspace::to_json).collect()),
        );
        Value::Object(o)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let field: Field = value
            .get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("report needs `field`".into()))?
            .parse()?;
        let s = value
            .get("s")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("report needs `s`".into()))? as usize;
        let members = value
            .get("members")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("report needs `members`".into()))?
            .iter()
            .map(|v| Subspace::from_json(&field, v))
            .collect::<Result<Vec<_>>>()?;
        let mode: VerifyMode = value
            .get("mode")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("report needs `mode`".into()))?
            .parse()?;
        let measurement = |key: &str, wkey: &str| -> Result<Option<Measurement>> {
            match value.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(v) => {
                    let val = v
                        .as_u64()
                        .ok_or_else(|| Error::Parse(format!("`{key}` must be an integer")))?
                        as usize;
                    let wit = value
                        .get(wkey)
                        .ok_or_else(|| Error::Parse(format!("missing `{wkey}`")))?;
                    Ok(Some(Measurement {
                        value: val,
                        witness: Subspace::from_json(&field, wit)?,
                    }))
                }
            }
        };
        let weak = measurement("A_weak", "witness_weak")?;
        let strong = measurement("A_strong", "witness_strong")?;
        let hp = match value.get("hp") {
            None | Some(Value::Null) => None,
            Some(h) => {
                let sub = |key: &str| -> Result<Option<Subspace>> {
                    match h.get(key) {
                        None | Some(Value::Null) => Ok(None),
                        Some(v) => Subspace::from_json(&field, v).map(Some),
                    }
                };
                Some(HpVerdict {
                    is_generator: h
                        .get("is_generator")
                        .and_then(Value::as_bool)
                        .ok_or_else(|| Error::Parse("hp needs `is_generator`".into()))?,
                    blocker: sub("blocker")?,
                    failing: sub("failing")?,
                    equivalence_hypothesis_failed: h
                        .get("equivalence_hypothesis_failed")
                        .and_then(Value::as_bool)
                        .unwrap_or(false),
                })
            }
        };
        Ok(DesignReport {
            field,
            s,
            members,
            mode,
            weak,
            strong,
            hp,
        })
    }

    /// Re-verifies every certificate in the report. Exhaustive reports are
    /// also re-measured from scratch when within `budget`.
    pub fn recheck(&self, budget: u64) -> Result<Vec<(String, bool)>> {
        let mut checks = Vec::new();
        if let Some(w) = &self.weak {
            let (weak, _) = counts_at(&self.members, &w.witness)?;
            checks.push((
                format!("witness_weak meets {weak} members (reported {})", w.value),
                weak == w.value,
            ));
        }
        if let Some(st) = &self.strong {
            let (_, strong) = counts_at(&self.members, &st.witness)?;
            checks.push((
                format!("witness_strong rank sum {strong} (reported {})", st.value),
                strong == st.value,
            ));
        }
        if let Some(hp) = &self.hp {
            if let Some(b) = &hp.blocker {
                let meets = self
                    .members
                    .iter()
                    .map(|h| h.meet_rank(b))
                    .collect::<Result<Vec<_>>>()?;
                let ok = meets.iter().all(|&k| k > 0) && b.rank() + self.r() == b.ambient();
                checks.push(("blocker meets every member".into(), ok));
            }
            if let Some(pi) = &hp.failing {
                let mut span = Subspace::zero(&self.field, pi.ambient());
                for h in &self.members {
                    span = span.join(&h.intersect(pi)?)?;
                }
                checks.push((
                    "failing subspace is not spanned by the members".into(),
                    span.rank() < pi.rank(),
                ));
            }
            if !hp.equivalence_hypothesis_failed {
                checks.push((
                    "verdict agrees with blocker".into(),
                    hp.is_generator == hp.blocker.is_none(),
                ));
            }
        }
        if self.mode.is_exhaustive() {
            if self.weak.is_some() || self.strong.is_some() {
                let fresh = measure(
                    &self.members,
                    self.s,
                    &Scan::exhaustive().with_budget(budget),
                )?;
                if let Some(w) = &self.weak {
                    checks.push((
                        format!("rescan A_weak = {}", fresh.weak.value),
                        fresh.weak.value == w.value,
                    ));
                }
                if let Some(st) = &self.strong {
                    checks.push((
                        format!("rescan A_strong = {}", fresh.strong.value),
                        fresh.strong.value == st.value,
                    ));
                }
            }
            if let Some(hp) = &self.hp {
                let fresh = hp_check(&self.members, budget)?;
                checks.push((
                    "rescan hp verdict".into(),
                    fresh.is_generator == hp.is_generator,
                ));
            }
        }
        Ok(checks)
    }
}

/// Builds a report for `members` against rank-`s` subspaces.
pub fn verify(
    members: &[Subspace],
    s: usize,
    scan: &Scan,
    weak: bool,
    strong: bool,
    hp: bool,
) -> Result<DesignReport> {
    let mem = Members::new(members)?;
    let measured = if weak || strong {
        Some(measure(members, s, scan)?)
    } else {
        None
    };
    let hp = if hp {
        Some(hp_check(members, scan.budget)?)
    } else {
        None
    };
    Ok(DesignReport {
        field: mem.field.clone(),
        s,
        members: members.to_vec(),
        mode: scan.mode,
        weak: measured.as_ref().filter(|_| weak).map(|m| m.weak.clone()),
        strong: measured.filter(|_| strong).map(|m| m.strong),
        hp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_design, CoefficientScheme, Family};
    use crate::field::make_field;
    use crate::linalg::Matrix;

    fn gf(p: u64) -> Field {
        make_field(p, 1, None).unwrap()
    }

    fn sub(f: &Field, m: usize, rows: &[Vec<u64>]) -> Subspace {
        Subspace::from_rows(&Matrix::from_ints(f, m, rows).unwrap())
    }

    fn secant5() -> Vec<Subspace> {
        let f = gf(5);
        let sch = CoefficientScheme::new(&f, Family::Secant, 2, 2, Some(f.from_int(2))).unwrap();
        build_design(&sch).unwrap().subspaces()
    }

    #[test]
    fn mode_strings() {
        assert_eq!(
            "exhaustive".parse::<VerifyMode>().unwrap(),
            VerifyMode::Exhaustive
        );
        let m: VerifyMode = "sampled:100:7".parse().unwrap();
        assert_eq!(
            m,
            VerifyMode::Sampled {
                count: 100,
                seed: 7
            }
        );
        assert_eq!(m.to_string(), "sampled:100:7");
        assert!("sampled:x:1".parse::<VerifyMode>().is_err());
    }

    #[test]
    fn single_member() {
        let f = gf(3);
        let h = sub(&f, 4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        let m = measure(std::slice::from_ref(&h), 2, &Scan::exhaustive()).unwrap();
        assert_eq!(m.weak.value, 1);
        assert!(h.meet_rank(&m.weak.witness).unwrap() > 0);
        assert_eq!(m.strong.value, 2);
    }

    #[test]
    fn common_point_blocks_everything() {
        let f = gf(3);
        let members: Vec<Subspace> = (0..3u64)
            .map(|a| sub(&f, 4, &[vec![1, 0, 0, 0], vec![0, 1, a, a * a % 3]]))
            .collect();
        let m = measure_weak(&members, 2, &Scan::exhaustive()).unwrap();
        assert_eq!(m.value, 3);
        let blocker = find_blocker_exhaustive(&members, 2, DEFAULT_BUDGET)
            .unwrap()
            .unwrap();
        assert!(members.iter().all(|h| h.meet_rank(&blocker).unwrap() > 0));
    }

    #[test]
    fn secant_gf5_parameters() {
        let members = secant5();
        let m = measure(&members, 2, &Scan::exhaustive()).unwrap();
        assert_eq!(m.weak.value, 4);
        assert!(m.strong.value <= 5);
        assert!(m.sandwich_holds(2, 2));
        assert_eq!(
            find_blocker_exhaustive(&members, 2, DEFAULT_BUDGET).unwrap(),
            None
        );
    }

    #[test]
    fn sampled_never_exceeds_exhaustive() {
        let members = secant5();
        let full = measure(&members, 2, &Scan::exhaustive()).unwrap();
        let part = measure(&members, 2, &Scan::sampled(40, 3)).unwrap();
        assert!(part.weak.value <= full.weak.value);
        assert!(part.strong.value <= full.strong.value);
        assert_eq!(part, measure(&members, 2, &Scan::sampled(40, 3)).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let members = secant5();
        let err = measure(&members, 2, &Scan::exhaustive().with_budget(100)).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                needed: "806".into(),
                budget: 100
            }
        );
    }

    #[test]
    fn two_lines_are_not_hp() {
        let f = gf(2);
        let members = vec![
            sub(&f, 4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]),
            sub(&f, 4, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]),
        ];
        let v = hp_check(&members, DEFAULT_BUDGET).unwrap();
        assert!(!v.is_generator);
        let b = v.blocker.unwrap();
        assert!(members.iter().all(|h| h.meet_rank(&b).unwrap() > 0));
        assert!(
            !is_generator_set(&members, 1, &Scan::exhaustive())
                .unwrap()
                .is_generator
        );
    }

    #[test]
    fn greedy_on_planes_in_pg5_2() {
        let f = gf(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let members: Vec<Subspace> = (0..6)
                .map(|_| random_subspace(&f, 6, 3, &mut rng).unwrap())
                .collect();
            let w = find_blocker_greedy(&members, DEFAULT_BUDGET)
                .unwrap()
                .unwrap();
            assert_eq!(w.rank(), 3);
            assert!(members.iter().all(|h| h.meet_rank(&w).unwrap() > 0));
        }
    }

    #[test]
    fn greedy_hypothesis_and_points() {
        let f = gf(3);
        let members = secant5();
        assert_eq!(
            find_blocker_greedy(&members, DEFAULT_BUDGET).unwrap_err(),
            Error::HypothesisViolated {
                members: 5,
                bound: 3
            }
        );
        let pts = vec![
            sub(&f, 4, &[vec![1, 1, 0, 0]]),
            sub(&f, 4, &[vec![0, 1, 2, 0]]),
        ];
        let w = find_blocker_greedy(&pts, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(w.rank(), 3);
        assert!(pts.iter().all(|p| w.contains(p).unwrap()));
    }

    #[test]
    fn greedy_base_budget() {
        let members = secant5()[..3].to_vec();
        assert!(matches!(
            find_blocker_greedy(&members, 10),
            Err(Error::BaseCaseBudgetExceeded { .. })
        ));
    }

    #[test]
    fn lower_bound_examples() {
        let b = lower_bound(4, 1, None).unwrap();
        assert_eq!((b.sum, b.finite_bound), (5, 6));
        assert_eq!(lower_bound(3, 1, Some(5)).unwrap().finite_bound, 4);
        assert_eq!(lower_bound(3, 1, Some(5)).unwrap().closed_field_bound, 5);
        assert_eq!(
            serde_json::to_string(&lower_bound(4, 1, Some(9)).unwrap()).unwrap(),
            r#"{"finite_bound":6,"closed_field_bound":7}"#
        );
        assert!(lower_bound(3, 3, None).is_err());
        for d in 2..40 {
            assert_eq!(counting_bound(d, 1), d / 2 + d - 1);
        }
    }

    #[test]
    fn dualize_is_involution() {
        let members = secant5();
        assert_eq!(dualize(&dualize(&members)), members);
    }

    #[test]
    fn crosscheck_tangent_gf7() {
        let f = gf(7);
        let sch = CoefficientScheme::new(&f, Family::Tangent, 2, 2, None).unwrap();
        let design = build_design(&sch).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let w = random_subspace(&f, 4, 2, &mut rng).unwrap();
            let c = crosscheck_strong_poly(&design, &w).unwrap();
            assert!(c.chain_holds());
            assert_eq!(c.degree_bound, 4);
        }
        // W meeting H(t0) in all of H(t0)
        let h3 = design.members()[3].subspace.clone();
        let c = crosscheck_strong_poly(&design, &h3).unwrap();
        assert!(c.rank_sum >= 2 && c.chain_holds());

        let f5 = gf(5);
        let sec = build_design(
            &CoefficientScheme::new(&f5, Family::Secant, 2, 2, Some(f5.from_int(2))).unwrap(),
        )
        .unwrap();
        let w = Subspace::coordinate(&f5, 4, &[1, 2]).unwrap();
        assert!(matches!(
            crosscheck_strong_poly(&sec, &w),
            Err(Error::NonPolynomialScheme { .. })
        ));
    }

    #[test]
    fn report_roundtrip_and_recheck() {
        let members = secant5();
        let report = verify(&members, 2, &Scan::exhaustive(), true, true, true).unwrap();
        let j = report.to_json();
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        assert_eq!(
            &keys[..4],
            ["n_members", "A_weak", "witness_weak", "A_strong"]
        );
        assert_eq!(j["hp"]["is_generator"], json!(true));
        assert_eq!(j["hp"]["blocker"], Value::Null);
        let back = DesignReport::from_json(&j).unwrap();
        assert_eq!(back, report);
        assert!(back
            .recheck(DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .all(|(_, ok)| *ok));

        let mut tampered = j.clone();
        tampered["A_weak"] = json!(3);
        let bad = DesignReport::from_json(&tampered).unwrap();
        assert!(bad
            .recheck(DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .any(|(_, ok)| !*ok));
    }
}
