//! The quotient complex `Ω_Φ(M) / I_Φ(M)` truncated by a filtration.
//!
//! Vanishing on the principal stratum is decided by exact evaluation at
//! rational sample frames: a form is horizontal when its contractions with
//! the fields vanish on every tangent frame, and lies in the ideal when its
//! restriction vanishes. Linear conditions from successive samples are
//! accumulated until their rank stops growing.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::actions::LinearAction;
use crate::error::{Error, Result};
use crate::form::Form;
use crate::linalg::{kernel, rank, solve_columns, Echelon};
use crate::model::{combine, BlockKey, Filtration, Frame, Model};
use crate::poly::Q;
use crate::stratification::{sample_points, strata_of_z};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Seed from `SYMPQ_SEED`, else the default.
pub fn default_seed() -> u64 {
    std::env::var("SYMPQ_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// How many sample frames are drawn and when accumulation stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingPolicy {
    pub seed: u64,
    /// Largest number of frames ever drawn.
    pub cap: usize,
    /// Consecutive frames without rank growth before stopping.
    pub patience: usize,
    pub min_samples: usize,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy { seed: default_seed(), cap: 200, patience: 12, min_samples: 16 }
    }
}

impl SamplingPolicy {
    pub fn with_seed(seed: u64) -> Self {
        SamplingPolicy { seed, ..Default::default() }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap.max(1);
        self
    }
}

/// Number of points that interpolation of degree `d` in `m` variables needs, plus one.
pub fn interpolation_count(d: u32, m: usize) -> usize {
    let mut c: u128 = 1;
    for i in 1..=m as u128 {
        c = c * (d as u128 + i) / i;
        if c > 1 << 40 {
            return usize::MAX;
        }
    }
    c as usize + 1
}

/// Frames on the principal stratum of a model.
pub struct SamplePool {
    pub frames: Vec<Frame>,
    pub seed: u64,
}

impl SamplePool {
    pub fn new<M: Model + ?Sized>(model: &M, count: usize, seed: u64) -> Result<Self> {
        let fields = model.horizontal_fields();
        let layout = model.layout();
        let frames = model
            .principal_samples(count, seed)?
            .into_iter()
            .map(|s| Frame::new(s, &fields, layout))
            .collect();
        Ok(SamplePool { frames, seed })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// One exact evaluation at a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub point: Vec<Q>,
    pub values: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCertificate {
    pub member: bool,
    /// Witnesses for a non-member, or the first evaluations for a member.
    pub evidence: Vec<Evidence>,
    pub samples: usize,
    pub degree_bound: u32,
    /// Interpolation count for the degree bound on the principal stratum.
    pub required_samples: usize,
    /// True when the cap kept the sample count below `required_samples`.
    pub randomized: bool,
    pub note: Option<String>,
}

fn qs(v: &[Q]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

impl MembershipCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "member": self.member,
            "samples": self.samples,
            "degree_bound": self.degree_bound,
            "required_samples": self.required_samples,
            "randomized": self.randomized,
            "note": self.note,
            "evidence": self.evidence.iter().map(|e| serde_json::json!({
                "point": qs(&e.point),
                "values": qs(&e.values),
            })).collect::<Vec<_>>(),
        })
    }
}

fn degree_bound(a: &Form) -> u32 {
    a.scaling_weight().unwrap_or(0) + a.degree() as u32
}

fn vanishing_certificate<M: Model + ?Sized>(
    model: &M,
    a: &Form,
    policy: &SamplingPolicy,
    eval: impl Fn(&Frame, &Form) -> Vec<Q> + Sync,
) -> Result<MembershipCertificate> {
    let d = degree_bound(a);
    let required = interpolation_count(d, model.principal_dim());
    let count = required.min(policy.cap);
    let pool = SamplePool::new(model, count, policy.seed)?;
    let values: Vec<Vec<Q>> = pool.frames.par_iter().map(|f| eval(f, a)).collect();
    let mut evidence = Vec::new();
    let mut member = true;
    for (f, v) in pool.frames.iter().zip(values) {
        let nonzero = v.iter().any(|x| !x.is_zero());
        if nonzero {
            if member {
                evidence.clear();
            }
            member = false;
        }
        if (nonzero || member) && evidence.len() < 3 {
            evidence.push(Evidence { point: f.sample.values.clone(), values: v });
        }
    }
    Ok(MembershipCertificate {
        member,
        evidence,
        samples: pool.len(),
        degree_bound: d,
        required_samples: required,
        randomized: count < required,
        note: None,
    })
}

/// `i(ξ_M) a` vanishes on principal tangents for every basis `ξ`.
pub fn is_horizontal_on_principal<M: Model + ?Sized>(model: &M, a: &Form, policy: &SamplingPolicy) -> Result<MembershipCertificate> {
    vanishing_certificate(model, a, policy, |f, a| f.contract(a))
}

/// Invariant and horizontal.
pub fn is_phi_basic<M: Model + ?Sized>(model: &M, a: &Form, policy: &SamplingPolicy) -> Result<MembershipCertificate> {
    if !model.is_invariant(a) {
        return Ok(MembershipCertificate {
            member: false,
            evidence: vec![],
            samples: 0,
            degree_bound: degree_bound(a),
            required_samples: 0,
            randomized: false,
            note: Some("not invariant: a Lie derivative or group pullback differs".into()),
        });
    }
    is_horizontal_on_principal(model, a, policy)
}

/// Restriction to the principal stratum vanishes; the input must be invariant.
pub fn in_ideal<M: Model + ?Sized>(model: &M, a: &Form, policy: &SamplingPolicy) -> Result<MembershipCertificate> {
    if !model.is_invariant(a) {
        return Err(Error::NotInvariant("the ideal lives inside the invariant forms".into()));
    }
    vanishing_certificate(model, a, policy, |f, a| f.restrict(a))
}

/// Quotient basis of one block in one degree.
#[derive(Debug, Clone)]
pub struct QuotientBlock {
    pub key: BlockKey,
    pub degree: usize,
    pub candidates: usize,
    pub horizontal: usize,
    pub ideal: usize,
    pub reps: Vec<Form>,
    /// `(frame, tangent subset)` functionals separating the representatives.
    key_rows: Vec<(usize, usize)>,
    /// Columns of the representatives on the key rows.
    key_columns: Vec<Vec<Q>>,
    pub samples_used: usize,
    pub stabilized: bool,
}

impl QuotientBlock {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the class of a Φ-basic form of this block.
    pub fn coordinates(&self, pool: &SamplePool, g: &Form) -> Option<Vec<Q>> {
        if self.reps.is_empty() {
            return Some(vec![]);
        }
        let mut cache: BTreeMap<usize, Vec<Q>> = BTreeMap::new();
        let b: Vec<Q> = self
            .key_rows
            .iter()
            .map(|&(s, j)| cache.entry(s).or_insert_with(|| pool.frames[s].restrict(g))[j].clone())
            .collect();
        solve_columns(&self.key_columns, &b)
    }
}

struct Accumulated {
    echelon: Echelon,
    key_rows: Vec<(usize, usize)>,
    raw: Vec<Vec<Q>>,
    used: usize,
    stabilized: bool,
}

/// Feeds per-frame condition rows (one vector per form, transposed) until the rank settles.
fn accumulate(pool: &SamplePool, n: usize, policy: &SamplingPolicy, eval: impl Fn(&Frame) -> Vec<Vec<Q>> + Sync) -> Accumulated {
    let mut acc = Accumulated { echelon: Echelon::new(n), key_rows: vec![], raw: vec![], used: 0, stabilized: false };
    if n == 0 {
        acc.stabilized = true;
        return acc;
    }
    let mut stale = 0;
    let batch = policy.patience.max(1);
    let mut start = 0;
    while start < pool.len() {
        let end = (start + batch).min(pool.len());
        let per_frame: Vec<Vec<Vec<Q>>> = pool.frames[start..end].par_iter().map(&eval).collect();
        for (offset, cols) in per_frame.into_iter().enumerate() {
            let s = start + offset;
            acc.used = s + 1;
            let nrows = cols.first().map_or(0, Vec::len);
            let mut grew = false;
            for r in 0..nrows {
                let row: Vec<Q> = cols.iter().map(|c| c[r].clone()).collect();
                if row.iter().all(Zero::is_zero) {
                    continue;
                }
                if acc.echelon.insert(row.clone()) {
                    acc.key_rows.push((s, r));
                    acc.raw.push(row);
                    grew = true;
                }
            }
            stale = if grew { 0 } else { stale + 1 };
            if acc.echelon.rank() == n || (stale >= policy.patience && acc.used >= policy.min_samples) {
                acc.stabilized = true;
                return acc;
            }
        }
        start = end;
    }
    acc
}

fn build_block(pool: &SamplePool, nfields: usize, k: usize, key: BlockKey, cands: Vec<Form>, policy: &SamplingPolicy) -> QuotientBlock {
    let layout = cands[0].layout();
    let candidates = cands.len();
    let mut stabilized = true;
    let mut used = 0;
    let horizontal: Vec<Form> = if k == 0 || nfields == 0 {
        cands
    } else {
        let acc = accumulate(pool, cands.len(), policy, |f| cands.iter().map(|c| f.contract(c)).collect());
        stabilized &= acc.stabilized;
        used = used.max(acc.used);
        let rows: Vec<Vec<Q>> = acc.echelon.rows().cloned().collect();
        kernel(&rows, cands.len()).iter().map(|c| combine(layout, k, &cands, c)).collect()
    };
    let acc = accumulate(pool, horizontal.len(), policy, |f| horizontal.iter().map(|h| f.restrict(h)).collect());
    stabilized &= acc.stabilized;
    used = used.max(acc.used);
    let mut pivots = acc.echelon.pivots();
    pivots.sort_unstable();
    let reps: Vec<Form> = pivots.iter().map(|&p| horizontal[p].clone()).collect();
    let key_columns: Vec<Vec<Q>> = pivots.iter().map(|&p| acc.raw.iter().map(|r| r[p].clone()).collect()).collect();
    QuotientBlock {
        key,
        degree: k,
        candidates,
        horizontal: horizontal.len(),
        ideal: horizontal.len() - reps.len(),
        reps,
        key_rows: acc.key_rows,
        key_columns,
        samples_used: used,
        stabilized,
    }
}

/// Quotient bases of every block in form degree `k` with filtration `≤ max`.
pub fn quotient_basis_with<M: Model + ?Sized>(
    model: &M,
    pool: &SamplePool,
    k: usize,
    filtration: Filtration,
    max: u32,
    policy: &SamplingPolicy,
) -> Result<Vec<QuotientBlock>> {
    if k > model.layout().dim() {
        return Ok(vec![]);
    }
    let nfields = model.horizontal_fields().len();
    let blocks = model.candidate_blocks(k, filtration, max)?;
    Ok(blocks
        .into_iter()
        .map(|(key, cands)| build_block(pool, nfields, k, key, cands, policy))
        .collect())
}

pub fn quotient_basis<M: Model + ?Sized>(model: &M, k: usize, max: u32, policy: &SamplingPolicy) -> Result<Vec<QuotientBlock>> {
    let pool = SamplePool::new(model, policy.cap, policy.seed)?;
    quotient_basis_with(model, &pool, k, model.default_filtration(), max, policy)
}

/// All degrees of the truncated complex and the matrices of `d`.
pub struct TruncatedComplex {
    pub label: String,
    pub filtration: Filtration,
    pub max: u32,
    /// `blocks[k]` lists the nonempty blocks in degree `k`.
    pub blocks: Vec<Vec<QuotientBlock>>,
    /// `d` from degree `k` in a block, rows indexed by the degree `k+1` representatives.
    pub differentials: BTreeMap<(usize, BlockKey), Vec<Vec<Q>>>,
    pub pool: SamplePool,
    pub policy: SamplingPolicy,
}

impl TruncatedComplex {
    pub fn build<M: Model + ?Sized>(model: &M, filtration: Filtration, max: u32, policy: &SamplingPolicy) -> Result<Self> {
        let pool = SamplePool::new(model, policy.cap, policy.seed)?;
        let top = model.layout().dim();
        let mut blocks = Vec::with_capacity(top + 1);
        for k in 0..=top {
            blocks.push(quotient_basis_with(model, &pool, k, filtration, max, policy)?);
        }
        let mut differentials = BTreeMap::new();
        for k in 0..top {
            for b in &blocks[k] {
                let target = blocks[k + 1].iter().find(|t| t.key == b.key);
                let cols: Vec<Vec<Q>> = b
                    .reps
                    .iter()
                    .map(|r| {
                        let dr = r.d();
                        match target {
                            None => {
                                if dr.is_zero() || pool.frames.iter().take(4).all(|f| f.restrict(&dr).iter().all(Zero::is_zero)) {
                                    Ok(vec![])
                                } else {
                                    Err(Error::Sampling(format!("d leaves block {:?} in degree {k}", b.key)))
                                }
                            }
                            Some(t) => t.coordinates(&pool, &dr).ok_or_else(|| {
                                Error::Sampling(format!(
                                    "class of d(rep) not in the span of degree-{} representatives; raise the sample cap",
                                    k + 1
                                ))
                            }),
                        }
                    })
                    .collect::<Result<_>>()?;
                let nrows = target.map_or(0, QuotientBlock::dim);
                let matrix: Vec<Vec<Q>> = (0..nrows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
                differentials.insert((k, b.key.clone()), matrix);
            }
        }
        Ok(TruncatedComplex { label: model.label(), filtration, max, blocks, differentials, pool, policy: *policy })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|bs| bs.iter().map(QuotientBlock::dim).sum()).collect()
    }

    fn d_rank(&self, k: usize, key: &BlockKey) -> usize {
        match self.differentials.get(&(k, key.clone())) {
            Some(m) if !m.is_empty() => rank(m, m[0].len()),
            _ => 0,
        }
    }

    pub fn ranks(&self) -> Vec<usize> {
        (0..self.blocks.len())
            .map(|k| self.blocks[k].iter().map(|b| self.d_rank(k, &b.key)).sum())
            .collect()
    }

    pub fn betti(&self) -> Vec<usize> {
        let dims = self.dims();
        let ranks = self.ranks();
        (0..dims.len())
            .map(|k| dims[k] - ranks[k] - if k > 0 { ranks[k - 1] } else { 0 })
            .collect()
    }

    /// `d_{k+1} ∘ d_k = 0` for every block.
    pub fn d_squared_vanishes(&self) -> bool {
        for ((k, key), m1) in &self.differentials {
            let Some(m2) = self.differentials.get(&(k + 1, key.clone())) else { continue };
            if m1.is_empty() || m2.is_empty() {
                continue;
            }
            for row in m2 {
                for j in 0..m1[0].len() {
                    let s: Q = row.iter().zip(m1).map(|(a, r)| a * &r[j]).sum();
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn stabilized(&self) -> bool {
        self.blocks.iter().flatten().all(|b| b.stabilized)
    }

    /// Closed classes in degree `k`, by block.
    pub fn closed_classes(&self, k: usize) -> Vec<(BlockKey, Form)> {
        let mut out = Vec::new();
        for b in &self.blocks[k] {
            let m = self.differentials.get(&(k, b.key.clone())).cloned().unwrap_or_default();
            let ker = if m.is_empty() {
                (0..b.dim())
                    .map(|i| (0..b.dim()).map(|j| if i == j { Q::from_integer(1.into()) } else { Q::zero() }).collect())
                    .collect()
            } else {
                kernel(&m, b.dim())
            };
            for c in ker {
                out.push((b.key.clone(), combine(b.reps[0].layout(), k, &b.reps, &c)));
            }
        }
        out
    }

    /// Block holding a Φ-basic form, if the form is in some block.
    pub fn block_for(&self, k: usize, g: &Form) -> Option<&QuotientBlock> {
        self.blocks.get(k)?.iter().find(|b| {
            let mut fam = b.reps.clone();
            fam.push(g.clone());
            b.coordinates(&self.pool, g).is_some_and(|x| {
                let lhs = combine(g.layout(), k, &b.reps, &x);
                self.pool.frames.iter().take(6).all(|f| f.restrict(&lhs.sub(g)).iter().all(Zero::is_zero))
            })
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomologyReport {
    pub action: String,
    pub truncation: u32,
    pub filtration: Filtration,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub betti: Vec<usize>,
    pub label: String,
    pub samples_cap: usize,
    pub seed: u64,
    pub stabilized: bool,
    pub d_squared_zero: bool,
    /// Betti numbers at `truncation + 2`, when requested.
    pub betti_next: Option<Vec<usize>>,
    pub monotone: Option<bool>,
}

pub fn cohomology<M: Model + ?Sized>(model: &M, max: u32, policy: &SamplingPolicy) -> Result<CohomologyReport> {
    cohomology_with(model, model.default_filtration(), max, policy, false)
}

pub fn cohomology_with<M: Model + ?Sized>(
    model: &M,
    filtration: Filtration,
    max: u32,
    policy: &SamplingPolicy,
    stability: bool,
) -> Result<CohomologyReport> {
    let c = TruncatedComplex::build(model, filtration, max, policy)?;
    let betti = c.betti();
    let (betti_next, monotone) = if stability {
        let next = TruncatedComplex::build(model, filtration, max + 2, policy)?.betti();
        let same = next == betti;
        (Some(next), Some(same))
    } else {
        (None, None)
    };
    Ok(CohomologyReport {
        action: model.label(),
        truncation: max,
        filtration,
        dims: c.dims(),
        ranks: c.ranks(),
        label: match filtration {
            Filtration::ScalingWeight => format!("truncated cohomology at scaling weight {max}"),
            Filtration::CoefficientDegree => format!("model cohomology at truncation {max}"),
        },
        betti,
        samples_cap: policy.cap,
        seed: policy.seed,
        stabilized: c.stabilized(),
        d_squared_zero: c.d_squared_vanishes(),
        betti_next,
        monotone,
    })
}

/// Ranks of `H^k(≤ max) → H^k(≤ max + extra)`: classes at truncation `max`
/// that stay non-exact once primitives of filtration `max + extra` are allowed.
pub fn persistent_betti<M: Model + ?Sized>(
    model: &M,
    filtration: Filtration,
    max: u32,
    extra: u32,
    policy: &SamplingPolicy,
) -> Result<Vec<usize>> {
    let lo = TruncatedComplex::build(model, filtration, max, policy)?;
    let hi = TruncatedComplex::build(model, filtration, max + extra, policy)?;
    let mut out = Vec::with_capacity(lo.blocks.len());
    for k in 0..lo.blocks.len() {
        let closed = lo.closed_classes(k);
        let mut total = 0;
        for b in &hi.blocks[k] {
            let mut cols: Vec<Vec<Q>> = Vec::new();
            if k > 0 {
                if let Some(m) = hi.differentials.get(&(k - 1, b.key.clone())) {
                    if let Some(first) = m.first() {
                        cols.extend((0..first.len()).map(|j| m.iter().map(|r| r[j].clone()).collect::<Vec<Q>>()));
                    }
                }
            }
            let boundary_rank = rank(&cols, b.dim());
            for (key, z) in &closed {
                if *key == b.key || filtration == Filtration::ScalingWeight && key.weight == b.key.weight && key.grade == b.key.grade {
                    let c = b.coordinates(&hi.pool, z).ok_or_else(|| {
                        Error::Sampling("closed class not representable at the larger truncation".into())
                    })?;
                    cols.push(c);
                }
            }
            total += rank(&cols, b.dim()) - boundary_rank;
        }
        out.push(total);
    }
    Ok(out)
}

/// Invariant, with contractions vanishing at every frame of the pool.
pub fn basic_on_pool<M: Model + ?Sized>(model: &M, pool: &SamplePool, a: &Form) -> bool {
    model.is_invariant(a) && pool.frames.par_iter().all(|f| f.contract(a).iter().all(Zero::is_zero))
}

/// Restriction vanishes at every frame of the pool.
pub fn ideal_on_pool(pool: &SamplePool, a: &Form) -> bool {
    pool.frames.par_iter().all(|f| f.restrict(a).iter().all(Zero::is_zero))
}

/// `d a` is Φ-basic whenever `a` is, and in the ideal whenever `a` is.
pub fn differential(a: &Form) -> Form {
    a.d()
}

/// Evaluations of a form on the tangent frames of one stratum.
#[derive(Debug, Clone)]
pub struct StratumEvaluation {
    pub stratum: usize,
    pub points: Vec<Vec<Q>>,
    pub restricted: Vec<Vec<Q>>,
    pub contracted: Vec<Vec<Q>>,
}

impl StratumEvaluation {
    pub fn contractions_vanish(&self) -> bool {
        self.contracted.iter().flatten().all(Zero::is_zero)
    }

    pub fn restriction_vanishes(&self) -> bool {
        self.restricted.iter().flatten().all(Zero::is_zero)
    }
}

/// Restriction of a representative to a stratum, evaluated at exact samples.
pub fn restrict_to_stratum(action: &LinearAction, a: &Form, stratum: usize, count: usize, seed: u64) -> Result<StratumEvaluation> {
    let strat = strata_of_z(action);
    let samples = sample_points(action, &strat, stratum, count, seed)?;
    let fields = action.basis_fields();
    let frames: Vec<Frame> = samples
        .into_iter()
        .map(|s| Frame::new(crate::model::Sample { values: s.point, tangent: s.tangent_basis }, &fields, action.layout()))
        .collect();
    let evals: Vec<(Vec<Q>, Vec<Q>)> = frames.par_iter().map(|f| (f.restrict(a), f.contract(a))).collect();
    let (restricted, contracted) = evals.into_iter().unzip();
    Ok(StratumEvaluation {
        stratum,
        points: frames.iter().map(|f| f.sample.values.clone()).collect(),
        restricted,
        contracted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::builtin;
    use crate::poly::{q, Layout, Poly};

    fn policy() -> SamplingPolicy {
        SamplingPolicy::with_seed(11).with_cap(40)
    }

    #[test]
    fn omega_is_basic_but_not_ideal_on_cp1() {
        let a = builtin("cp1", 0).unwrap();
        let w = a.omega();
        assert!(is_phi_basic(&a, &w, &policy()).unwrap().member);
        let cert = in_ideal(&a, &w, &policy()).unwrap();
        assert!(!cert.member);
        assert!(cert.evidence[0].values.iter().any(|v| !v.is_zero()));
    }

    #[test]
    fn moment_terms_are_in_the_ideal() {
        let a = builtin("cone11", 0).unwrap();
        let phi = a.moment_map().unwrap().components[0].clone();
        let dphi = Form::function(phi.clone()).d();
        assert!(in_ideal(&a, &dphi, &policy()).unwrap().member);
        assert!(in_ideal(&a, &a.omega().mul_function(&phi), &policy()).unwrap().member);
        assert!(is_phi_basic(&a, &a.omega().mul_function(&phi), &policy()).unwrap().member);
    }

    #[test]
    fn non_members_have_witnesses() {
        let a = builtin("cone11", 0).unwrap();
        let l = Layout::linear(4);
        let dx1 = Form::dx(l, 0);
        let h = is_horizontal_on_principal(&a, &dx1, &policy()).unwrap();
        assert!(!h.member && !h.evidence.is_empty());
        let x1dx1 = dx1.mul_function(&Poly::var(l, 0));
        let b = is_phi_basic(&a, &x1dx1, &policy()).unwrap();
        assert!(!b.member && b.note.is_some());
        assert!(in_ideal(&a, &x1dx1, &policy()).is_err());
    }

    #[test]
    fn constants_in_degree_zero() {
        for a in crate::actions::all_builtins() {
            let b = quotient_basis(&a, 0, 0, &policy()).unwrap();
            assert_eq!(b.iter().map(QuotientBlock::dim).sum::<usize>(), 1, "{}", a.name);
            assert!(quotient_basis(&a, 2 * a.n() + 1, 4, &policy()).unwrap().is_empty());
        }
    }

    #[test]
    fn cone_cohomology_is_trivial() {
        let a = builtin("cone11", 0).unwrap();
        let r = cohomology(&a, 4, &policy()).unwrap();
        assert!(r.d_squared_zero);
        assert_eq!(r.betti, vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn zk_cohomology_is_trivial() {
        let a = builtin("zk-cone", 3).unwrap();
        let r = cohomology(&a, 6, &policy()).unwrap();
        assert_eq!(r.betti, vec![1, 0, 0]);
    }

    #[test]
    fn lower_strata_see_horizontal_restrictions() {
        let a = builtin("teardrop", 0).unwrap();
        let strat = strata_of_z(&a);
        let low = strat.lower_strata().next().unwrap().id;
        let w = a.omega();
        let ev = restrict_to_stratum(&a, &w, low, 5, 1).unwrap();
        assert!(ev.contractions_vanish());
        // the ℤ2 stratum is a circle, so 2-forms restrict to zero there
        assert!(ev.restriction_vanishes());
        let f = Form::function(&Poly::var(a.layout(), 2).pow(2) + &Poly::var(a.layout(), 3).pow(2));
        let ev0 = restrict_to_stratum(&a, &f, low, 5, 1).unwrap();
        assert!(ev0.restricted.iter().all(|v| v == &vec![q(1)]));
    }

    #[test]
    fn interpolation_counts() {
        assert_eq!(interpolation_count(0, 3), 2);
        assert_eq!(interpolation_count(2, 1), 4);
        assert_eq!(interpolation_count(8, 3), 166);
    }
}
