//! Homogeneous bundles `E = (G × F)/H`, the extension homomorphism, and
//! induced Hamiltonian spaces for abelian `G`.
//!
//! Forms on `E` are modelled as `H`-basic forms on `G × F`, with `G` a torus
//! in angle coordinates. A form is `G`-invariant exactly when its coefficients
//! do not involve the angles. A projection `pr : 𝔤 → 𝔥` gives the connection
//! `θ = Σⱼ prⱼ dθⱼ`, and the vertical projection is `θ_E(v) = v_F + θ(v_G)·ξ_F(p)`,
//! so the extension is the substitution `dpᵢ ↦ dpᵢ + ξ_F(p)ᵢ θ`.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::actions::{identity, mat_mul, GroupDatum, LinearAction, Matrix};
use crate::error::{Error, Result};
use crate::form::{AngleImage, Form, PolyMap, VectorField};
use crate::linalg::{rank, solve_columns};
use crate::model::{averaged_candidates, combine, kernel_of_map, BlockKey, Filtration, Model, Sample};
use crate::poly::{Layout, Poly, Q};
use crate::quotient::{SamplePool, SamplingPolicy, TruncatedComplex};
use crate::random::{small_rational, Rng64};
use crate::stratification::{principal_samples, strata_of_z};

/// The closed subgroup `H ⊂ G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Subgroup {
    /// `ℤ_k` inside the first circle factor; `𝔥 = 0`.
    Cyclic { k: u32 },
    /// The coordinate circle `factor` of the torus.
    Circle { factor: usize },
}

#[derive(Debug, Clone)]
pub struct BundleSpec {
    pub g_rank: usize,
    pub subgroup: Subgroup,
    /// `F` as an `H`-module: for `ℤ_k` the generator image, for a circle the weights.
    pub fibre: LinearAction,
    /// `pr : 𝔤 → 𝔥` as a row; empty when `𝔥 = 0`.
    pub projection: Vec<Q>,
}

fn mat_pow(g: &Matrix, e: u32) -> Matrix {
    (0..e).fold(identity(g.len()), |acc, _| mat_mul(&acc, g))
}

impl BundleSpec {
    pub fn new(g_rank: usize, subgroup: Subgroup, fibre: LinearAction, projection: Vec<Q>) -> Result<Self> {
        if !(1..=2).contains(&g_rank) {
            return Err(Error::Bundle("G must be a torus of rank 1 or 2".into()));
        }
        match &subgroup {
            Subgroup::Cyclic { k } => {
                let GroupDatum::Finite { generators, .. } = &fibre.group else {
                    return Err(Error::Bundle("a cyclic H needs a finite fibre action".into()));
                };
                if generators.len() != 1 || mat_pow(&generators[0], *k) != identity(2 * fibre.n()) {
                    return Err(Error::Bundle(format!("fibre generator must satisfy g^{k} = 1")));
                }
                if !projection.is_empty() {
                    return Err(Error::Bundle("𝔥 = 0 for a finite H; the projection must be empty".into()));
                }
            }
            Subgroup::Circle { factor } => {
                if *factor >= g_rank {
                    return Err(Error::Bundle("circle factor out of range".into()));
                }
                if fibre.rank() != 1 || !fibre.is_torus() {
                    return Err(Error::Bundle("a circle H needs a rank-one torus fibre action".into()));
                }
                if projection.len() != g_rank || !projection[*factor].is_one() {
                    return Err(Error::Bundle("the projection must restrict to the identity on 𝔥".into()));
                }
            }
        }
        Ok(BundleSpec { g_rank, subgroup, fibre, projection })
    }

    /// Same `G`, `H` and fibre, another projection.
    pub fn with_projection(&self, projection: Vec<Q>) -> Result<Self> {
        BundleSpec::new(self.g_rank, self.subgroup.clone(), self.fibre.clone(), projection)
    }

    pub fn fibre_dim(&self) -> usize {
        2 * self.fibre.n()
    }

    pub fn fibre_layout(&self) -> Layout {
        Layout::linear(self.fibre_dim())
    }

    /// `G × F`: fibre coordinates first, then the angles.
    pub fn layout(&self) -> Layout {
        Layout::with_angles(self.fibre_dim(), self.g_rank)
    }

    fn same_structure(&self, other: &BundleSpec) -> bool {
        self.g_rank == other.g_rank && self.subgroup == other.subgroup && self.projection == other.projection
    }

    /// Infinitesimal `H`-action on `F` (circle case).
    pub fn fibre_field(&self) -> Option<VectorField> {
        match self.subgroup {
            Subgroup::Circle { .. } => self.fibre.basis_fields().into_iter().next(),
            Subgroup::Cyclic { .. } => None,
        }
    }

    /// Generator of the diagonal `H`-orbits on `G × F`: `−∂θ_h + ξ_F`.
    pub fn orbit_field(&self) -> Option<VectorField> {
        orbit_field_on(self, self.layout())
    }

    /// `θ = Σⱼ prⱼ dθⱼ`.
    pub fn connection(&self) -> Form {
        let l = self.layout();
        self.projection
            .iter()
            .enumerate()
            .fold(Form::zero(l, 1), |acc, (j, p)| acc.add(&Form::dx(l, l.linear + j).scale(p)))
    }

    /// `f(p) = [1, p]`.
    pub fn fibre_inclusion(&self) -> PolyMap {
        let src = self.fibre_layout();
        let linear = (0..src.linear).map(|i| Poly::var(src, i)).collect();
        PolyMap::new(src, self.layout(), linear, vec![AngleImage::Zero; self.g_rank]).expect("inclusion")
    }

    /// `H`-generator acting on `G × F`; the angle shift is invisible on angle-free forms.
    fn generator_maps(&self, layout: Layout) -> Vec<PolyMap> {
        match &self.fibre.group {
            GroupDatum::Finite { elements, .. } => elements.iter().map(|g| lift_linear(g, layout)).collect(),
            GroupDatum::Torus { .. } => vec![],
        }
    }

    /// The extension homomorphism `e : Ω(F)^H → Ω(E)^G`.
    pub fn extension(&self, gamma: &Form) -> Result<Form> {
        if gamma.layout() != self.fibre_layout() {
            return Err(Error::Dimension("γ must live on the fibre".into()));
        }
        if !self.fibre.is_invariant(gamma) {
            return Err(Error::NotInvariant("the extension needs an H-invariant form on F".into()));
        }
        let l = self.layout();
        let coeffs: Vec<Poly> = (0..self.fibre_dim()).map(|i| Poly::var(l, i)).collect();
        let theta = self.connection();
        let field = self.fibre_field();
        let covectors: Vec<Form> = (0..self.fibre_dim())
            .map(|i| {
                let dp = Form::dx(l, i);
                match &field {
                    Some(xi) => dp.add(&theta.mul_function(&xi.components()[i].compose(l, &coeffs))),
                    None => dp,
                }
            })
            .collect();
        Ok(gamma.substitute(l, &coeffs, &covectors))
    }

    /// `f^*`.
    pub fn restrict_to_fibre(&self, beta: &Form) -> Form {
        beta.pullback(&self.fibre_inclusion())
    }

    pub fn is_g_invariant(&self, beta: &Form) -> bool {
        beta.components().all(|(_, c)| c.is_angle_free())
    }

    /// `H`-basic on `G × F`, i.e. a form on `E`.
    pub fn descends(&self, beta: &Form) -> bool {
        if !self.is_g_invariant(beta) {
            return false;
        }
        match self.orbit_field() {
            Some(z) => beta.lie(&z).is_zero() && beta.interior(&z).is_zero(),
            None => self.generator_maps(self.layout()).iter().all(|g| beta.pullback(g) == *beta),
        }
    }

    /// `G`-basic on `E`.
    pub fn is_g_basic(&self, beta: &Form) -> bool {
        let l = self.layout();
        self.descends(beta) && (0..self.g_rank).all(|j| beta.interior(&VectorField::coordinate(l, l.linear + j)).is_zero())
    }

    /// `H`-basic on `F`.
    pub fn is_h_basic_on_fibre(&self, gamma: &Form) -> bool {
        self.fibre.is_invariant(gamma) && self.fibre_field().is_none_or(|xi| gamma.interior(&xi).is_zero())
    }

    /// `ȷ̄ : E → E′` for an `H`-equivariant `j : F → F′`.
    pub fn bar(&self, j: &PolyMap, target: &BundleSpec) -> Result<PolyMap> {
        if j.source() != self.fibre_layout() || j.target() != target.fibre_layout() {
            return Err(Error::Dimension("j must map F to F′".into()));
        }
        let l = self.layout();
        let var_map: Vec<usize> = (0..self.fibre_dim()).collect();
        let linear = j.linear_components().iter().map(|p| p.embed(l, &var_map)).collect();
        PolyMap::new(l, target.layout(), linear, (0..self.g_rank).map(AngleImage::Source).collect())
    }

    /// `j ∘ h = h′ ∘ j` for the generator (finite) or the infinitesimal generator (circle).
    pub fn is_h_equivariant(&self, j: &PolyMap, target: &BundleSpec) -> bool {
        match (&self.fibre.group, &target.fibre.group) {
            (GroupDatum::Finite { generators: a, .. }, GroupDatum::Finite { generators: b, .. }) => {
                let lhs = j.compose(&PolyMap::linear_map(self.fibre_dim(), &a[0])).expect("dims");
                let rhs = PolyMap::linear_map(target.fibre_dim(), &b[0]).compose(j).expect("dims");
                lhs == rhs
            }
            (GroupDatum::Torus { .. }, GroupDatum::Torus { .. }) => {
                let (x, y) = (self.fibre_field().unwrap(), target.fibre_field().unwrap());
                let images = j.coefficient_images();
                j.jacobian().iter().zip(y.components()).all(|(row, yi)| {
                    let mut lhs = Poly::zero(j.source());
                    for (dj, xj) in row.iter().zip(x.components()) {
                        lhs += &(dj * xj);
                    }
                    lhs == yi.compose(j.source(), &images)
                })
            }
            _ => false,
        }
    }

    /// Spanning family of `H`-invariant `k`-forms on `F` of coefficient degree `≤ max`.
    pub fn invariant_family(&self, k: usize, max: u32) -> Result<Vec<Form>> {
        Ok(self
            .fibre
            .candidate_blocks(k, Filtration::CoefficientDegree, max)?
            .into_iter()
            .flat_map(|(_, f)| f)
            .collect())
    }

    pub fn h_basic_family(&self, k: usize, max: u32) -> Result<Vec<Form>> {
        let inv = self.invariant_family(k, max)?;
        Ok(match self.fibre_field() {
            Some(xi) => kernel_of_map(&inv, |f| f.interior(&xi)),
            None => inv,
        })
    }

    /// Spanning family of `G`-basic `k`-forms on `E`, built on `G × F` directly.
    pub fn g_basic_family(&self, k: usize, max: u32) -> Vec<Form> {
        let l = self.layout();
        let z = self.orbit_field();
        let lie: Vec<VectorField> = z.iter().cloned().collect();
        let mut fam: Vec<Form> = averaged_candidates(l, &self.generator_maps(l), &lie, k, Filtration::CoefficientDegree, max)
            .into_iter()
            .flat_map(|(_, f)| f)
            .collect();
        let mut fields: Vec<VectorField> = z.into_iter().collect();
        fields.extend((0..self.g_rank).map(|j| VectorField::coordinate(l, l.linear + j)));
        for v in fields {
            fam = kernel_of_map(&fam, |f| f.interior(&v));
        }
        fam
    }
}

fn orbit_field_on(spec: &BundleSpec, l: Layout) -> Option<VectorField> {
    let Subgroup::Circle { factor } = spec.subgroup else { return None };
    let xi = spec.fibre_field()?;
    let var_map: Vec<usize> = (0..spec.fibre_dim()).collect();
    let mut comps: Vec<Poly> = xi.components().iter().map(|p| p.embed(l, &var_map)).collect();
    comps.resize(l.dim(), Poly::zero(l));
    comps[l.linear + factor] = Poly::constant(l, -Q::one());
    Some(VectorField::new(l, comps).expect("orbit field"))
}

/// `p ↦ g p` on the leading fibre coordinates, identity elsewhere.
fn lift_linear(g: &Matrix, l: Layout) -> PolyMap {
    let m = g.len();
    let linear = (0..l.linear)
        .map(|i| {
            if i < m {
                g[i].iter().enumerate().fold(Poly::zero(l), |acc, (j, c)| &acc + &Poly::var(l, j).scale(c))
            } else {
                Poly::var(l, i)
            }
        })
        .collect();
    PolyMap::new(l, l, linear, (0..l.angles).map(AngleImage::Source).collect()).expect("lift")
}

fn random_member(rng: &mut Rng64, fam: &[Form], layout: Layout, k: usize) -> Form {
    if fam.is_empty() {
        return Form::zero(layout, k);
    }
    let coeffs: Vec<Q> = fam.iter().map(|_| if rng.gen_bool(0.5) { small_rational(rng) } else { Q::zero() }).collect();
    combine(layout, k, fam, &coeffs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionReport {
    pub cases: usize,
    /// `f^* e(γ) = γ` on invariant `γ`.
    pub restriction_inverts: bool,
    /// `e` maps `H`-basic forms on `F` to `G`-basic forms on `E`.
    pub basic_to_basic: bool,
    /// `e(f^* β) = β` on `G`-basic `β`.
    pub extension_inverts: bool,
    /// `e(γ)` descends to `E` for every invariant `γ`.
    pub descends: bool,
    /// `e ∘ f^*` differs from the identity on a non-basic invariant form.
    pub negative_control: bool,
    pub passed: bool,
}

/// Random batches for the three extension identities.
pub fn verify_extension_lemma(spec: &BundleSpec, cases: usize, max: u32, rng: &mut Rng64) -> Result<ExtensionReport> {
    let fl = spec.fibre_layout();
    let l = spec.layout();
    let inv: Vec<Vec<Form>> = (0..=spec.fibre_dim()).map(|k| spec.invariant_family(k, max)).collect::<Result<_>>()?;
    let bas: Vec<Vec<Form>> = (0..=spec.fibre_dim()).map(|k| spec.h_basic_family(k, max)).collect::<Result<_>>()?;
    let gbas: Vec<Vec<Form>> = (0..=spec.fibre_dim()).map(|k| spec.g_basic_family(k, max)).collect();
    let (mut right, mut basic, mut left, mut desc) = (true, true, true, true);
    for _ in 0..cases {
        let k = rng.gen_range(0..=spec.fibre_dim());
        let g = random_member(rng, &inv[k], fl, k);
        let eg = spec.extension(&g)?;
        right &= spec.restrict_to_fibre(&eg) == g;
        desc &= spec.descends(&eg);
        let hb = random_member(rng, &bas[k], fl, k);
        basic &= spec.is_g_basic(&spec.extension(&hb)?);
        let b = random_member(rng, &gbas[k], l, k);
        left &= spec.extension(&spec.restrict_to_fibre(&b))? == b;
    }
    // dθⱼ for a direction outside 𝔥 is invariant and descends, but is not basic
    let j = match spec.subgroup {
        Subgroup::Circle { factor } => (factor + 1) % spec.g_rank,
        Subgroup::Cyclic { .. } => 0,
    };
    let probe = Form::dx(l, l.linear + j);
    let negative_control = spec.descends(&probe) && !spec.is_g_basic(&probe) && spec.extension(&spec.restrict_to_fibre(&probe))? != probe;
    Ok(ExtensionReport {
        cases,
        restriction_inverts: right,
        basic_to_basic: basic,
        extension_inverts: left,
        descends: desc,
        negative_control,
        passed: right && basic && left && desc && negative_control,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctorReport {
    pub cases: usize,
    pub holds: bool,
}

/// `e ∘ j^* = ȷ̄^* ∘ e′` on random invariant forms on `F′`.
pub fn verify_functoriality(spec: &BundleSpec, target: &BundleSpec, j: &PolyMap, cases: usize, max: u32, rng: &mut Rng64) -> Result<FunctorReport> {
    if !spec.same_structure(target) {
        return Err(Error::Bundle("both bundles need the same G, H and projection".into()));
    }
    if !spec.is_h_equivariant(j, target) {
        return Err(Error::Bundle("j is not H-equivariant".into()));
    }
    let bar = spec.bar(j, target)?;
    let fams: Vec<Vec<Form>> = (0..=target.fibre_dim()).map(|k| target.invariant_family(k, max)).collect::<Result<_>>()?;
    let mut holds = true;
    for _ in 0..cases {
        let k = rng.gen_range(0..=target.fibre_dim());
        let g = random_member(rng, &fams[k], target.fibre_layout(), k);
        let lhs = spec.extension(&g.pullback(j))?;
        let rhs = target.extension(&g)?.pullback(&bar);
        holds &= lhs == rhs;
    }
    Ok(FunctorReport { cases, holds })
}

/// `M = (G × 𝔪^* × F)/H` with `Φ([g, α, p]) = α + pr^*Ψ(p)`, as a model whose
/// forms are `H`-basic forms on `G × 𝔪^* × F`.
#[derive(Debug, Clone)]
pub struct InducedModel {
    pub spec: BundleSpec,
    /// Index of the `𝔤`-basis vector dual to the `𝔪^*` coordinate.
    m_direction: usize,
}

/// Induced Hamiltonian space from an `H`-module with its quadratic moment map.
pub fn induced_space(spec: &BundleSpec) -> Result<InducedModel> {
    let m_direction = match spec.subgroup {
        Subgroup::Cyclic { .. } if spec.g_rank == 1 => 0,
        Subgroup::Circle { factor } if spec.g_rank == 2 => 1 - factor,
        _ => return Err(Error::Bundle("induced spaces need dim 𝔪 = 1 (G = S¹ ⊃ ℤ_k or T² ⊃ S¹)".into())),
    };
    if !spec.fibre.level_is_zero() {
        return Err(Error::Bundle("the fibre moment map must be the quadratic one (level 0)".into()));
    }
    Ok(InducedModel { spec: spec.clone(), m_direction })
}

impl InducedModel {
    /// Index of the `𝔪^*` coordinate `α`.
    pub fn alpha(&self) -> usize {
        self.spec.fibre_dim()
    }

    /// Fibre moment map `Ψ` (zero for finite `H`).
    pub fn psi(&self) -> Option<Poly> {
        self.spec.fibre.moment_map().ok().map(|m| m.components[0].clone())
    }

    /// Components `Φ_j = α δ_{j,m} + prⱼ Ψ`.
    pub fn moment_components(&self) -> Vec<Poly> {
        let l = Model::layout(self);
        let var_map: Vec<usize> = (0..self.spec.fibre_dim()).collect();
        let psi = self.psi().map(|p| p.embed(l, &var_map));
        (0..self.spec.g_rank)
            .map(|j| {
                let mut phi = if j == self.m_direction { Poly::var(l, self.alpha()) } else { Poly::zero(l) };
                if let (Some(psi), Some(pj)) = (&psi, self.spec.projection.get(j)) {
                    phi += &psi.scale(pj);
                }
                phi
            })
            .collect()
    }

    /// `f : F → M`, `p ↦ [1, 0, p]`.
    pub fn fibre_inclusion(&self) -> PolyMap {
        let src = self.spec.fibre_layout();
        let l = Model::layout(self);
        let mut linear: Vec<Poly> = (0..src.linear).map(|i| Poly::var(src, i)).collect();
        linear.push(Poly::zero(src));
        PolyMap::new(src, l, linear, vec![AngleImage::Zero; l.angles]).expect("inclusion")
    }

    /// `Φ ∘ f = pr^* ∘ Ψ`, exactly.
    pub fn moment_compatible(&self) -> bool {
        let f = self.fibre_inclusion();
        let images = f.coefficient_images();
        let src = self.spec.fibre_layout();
        let psi = self.psi();
        self.moment_components().iter().enumerate().all(|(j, phi)| {
            let expected = match (&psi, self.spec.projection.get(j)) {
                (Some(p), Some(pj)) => p.scale(pj),
                _ => Poly::zero(src),
            };
            phi.compose(src, &images) == expected
        })
    }
}

impl Model for InducedModel {
    fn label(&self) -> String {
        format!("induced({})", self.spec.fibre.name)
    }

    fn layout(&self) -> Layout {
        Layout::with_angles(self.spec.fibre_dim() + 1, self.spec.g_rank)
    }

    fn horizontal_fields(&self) -> Vec<VectorField> {
        let l = Model::layout(self);
        (0..self.spec.g_rank).map(|j| VectorField::coordinate(l, l.linear + j)).collect()
    }

    fn moment(&self) -> Vec<Poly> {
        self.moment_components()
    }

    fn is_invariant(&self, a: &Form) -> bool {
        let l = Model::layout(self);
        a.components().all(|(_, c)| c.is_angle_free())
            && match orbit_field_on(&self.spec, l) {
                Some(z) => a.lie(&z).is_zero(),
                None => self.spec.generator_maps(l).iter().all(|g| a.pullback(g) == *a),
            }
    }

    fn default_filtration(&self) -> Filtration {
        Filtration::CoefficientDegree
    }

    fn candidate_blocks(&self, k: usize, filtration: Filtration, max: u32) -> Result<Vec<(BlockKey, Vec<Form>)>> {
        let l = Model::layout(self);
        let z = orbit_field_on(&self.spec, l);
        let lie: Vec<VectorField> = z.iter().cloned().collect();
        let blocks = averaged_candidates(l, &self.spec.generator_maps(l), &lie, k, filtration, max);
        Ok(blocks
            .into_iter()
            .map(|(key, fam)| {
                let fam = match &z {
                    Some(z) => kernel_of_map(&fam, |f| f.interior(z)),
                    None => fam,
                };
                (key, fam)
            })
            .filter(|(_, f)| !f.is_empty())
            .collect())
    }

    /// `(θ, 0, p)` with `p` on the fibre's principal stratum.
    fn principal_samples(&self, count: usize, seed: u64) -> Result<Vec<Sample>> {
        let fibre = &self.spec.fibre;
        let strat = strata_of_z(fibre);
        let base = principal_samples(fibre, &strat, count, seed)?;
        let l = Model::layout(self);
        let mut r = crate::random::rng(seed ^ 0xa5a5);
        Ok(base
            .into_iter()
            .map(|s| {
                let mut values = s.point.clone();
                values.push(Q::zero());
                for _ in 0..l.angles {
                    let t = Q::new(r.gen_range(-40i64..=40).into(), r.gen_range(1i64..=29).into());
                    let den = Q::one() + &t * &t;
                    values.push((Q::one() - &t * &t) / &den);
                    values.push((&t + &t) / &den);
                }
                let mut tangent: Vec<Vec<Q>> = s
                    .tangent_basis
                    .iter()
                    .map(|v| {
                        let mut w = v.clone();
                        w.resize(l.dim(), Q::zero());
                        w
                    })
                    .collect();
                for j in 0..l.angles {
                    let mut e = vec![Q::zero(); l.dim()];
                    e[l.linear + j] = Q::one();
                    tangent.push(e);
                }
                Sample { values, tangent }
            })
            .collect())
    }

    fn principal_dim(&self) -> usize {
        self.spec.fibre.principal_dim() + self.spec.g_rank
    }

    fn block_of(&self, _a: &Form, filtration: Filtration) -> Option<BlockKey> {
        (filtration == Filtration::CoefficientDegree).then(|| BlockKey { weight: vec![], grade: None })
    }
}

/// Restriction values of every representative across a pool, as columns.
fn class_columns(pool: &SamplePool, reps: &[Form]) -> Vec<Vec<Q>> {
    reps.iter().map(|r| pool.frames.iter().flat_map(|f| f.restrict(r)).collect()).collect()
}

fn class_coordinates(pool: &SamplePool, columns: &[Vec<Q>], g: &Form) -> Option<Vec<Q>> {
    if columns.is_empty() {
        let zero = pool.frames.iter().all(|f| f.restrict(g).iter().all(Zero::is_zero));
        return zero.then(Vec::new);
    }
    let target: Vec<Q> = pool.frames.iter().flat_map(|f| f.restrict(g)).collect();
    solve_columns(columns, &target)
}

#[derive(Debug, Clone, Serialize)]
pub struct StagesReport {
    pub truncation: u32,
    pub dims_x: Vec<usize>,
    pub dims_y: Vec<usize>,
    pub rank_r: Vec<usize>,
    pub bijective: bool,
    pub chain_map: bool,
    pub moment_compatible: bool,
    pub d_squared_zero: bool,
    /// Agreement at a finite truncation is evidence, not proof.
    pub note: String,
}

/// `r = f^* : Ω(X) → Ω(Y)` on truncated bases: rank per degree and commutation with `d`.
pub fn verify_reduction_in_stages(model: &InducedModel, max: u32, policy: &SamplingPolicy) -> Result<StagesReport> {
    let filt = Filtration::CoefficientDegree;
    let cx = TruncatedComplex::build(model, filt, max, policy)?;
    let cy = TruncatedComplex::build(&model.spec.fibre, filt, max, policy)?;
    let f = model.fibre_inclusion();
    let reps = |c: &TruncatedComplex, k: usize| -> Vec<Form> { c.blocks.get(k).map_or(vec![], |bs| bs.iter().flat_map(|b| b.reps.clone()).collect()) };
    let top = cx.blocks.len().max(cy.blocks.len());
    let ycols: Vec<Vec<Vec<Q>>> = (0..=top).map(|k| class_columns(&cy.pool, &reps(&cy, k))).collect();
    let xcols: Vec<Vec<Vec<Q>>> = (0..=top).map(|k| class_columns(&cx.pool, &reps(&cx, k))).collect();
    let unrepresentable = || Error::Sampling("restricted class outside the truncated basis".into());
    let mut r_mats: Vec<Vec<Vec<Q>>> = Vec::new();
    let mut rank_r = Vec::new();
    for k in 0..top {
        let cols: Vec<Vec<Q>> = reps(&cx, k)
            .iter()
            .map(|b| class_coordinates(&cy.pool, &ycols[k], &b.pullback(&f)).ok_or_else(unrepresentable))
            .collect::<Result<_>>()?;
        rank_r.push(rank(&cols, ycols[k].len()));
        r_mats.push(cols);
    }
    let dims_x: Vec<usize> = (0..top).map(|k| reps(&cx, k).len()).collect();
    let dims_y: Vec<usize> = (0..top).map(|k| reps(&cy, k).len()).collect();
    let bijective = (0..top).all(|k| rank_r[k] == dims_x[k] && rank_r[k] == dims_y[k]);
    // r_{k+1} ∘ d_X = d_Y ∘ r_k on class coordinates
    let mut chain_map = true;
    for k in 0..top.saturating_sub(1) {
        let ry = reps(&cy, k);
        let dy: Vec<Vec<Q>> = ry
            .iter()
            .map(|g| class_coordinates(&cy.pool, &ycols[k + 1], &g.d()).ok_or_else(unrepresentable))
            .collect::<Result<_>>()?;
        for (i, b) in reps(&cx, k).iter().enumerate() {
            let dx = class_coordinates(&cx.pool, &xcols[k + 1], &b.d()).ok_or_else(unrepresentable)?;
            let n = ycols[k + 1].len();
            let mut lhs = vec![Q::zero(); n];
            for (c, col) in dx.iter().zip(&r_mats[k + 1]) {
                for (acc, v) in lhs.iter_mut().zip(col) {
                    *acc += c * v;
                }
            }
            let mut rhs = vec![Q::zero(); n];
            for (c, col) in r_mats[k][i].iter().zip(&dy) {
                for (acc, v) in rhs.iter_mut().zip(col) {
                    *acc += c * v;
                }
            }
            chain_map &= lhs == rhs;
        }
    }
    Ok(StagesReport {
        truncation: max,
        dims_x,
        dims_y,
        rank_r,
        bijective,
        chain_map,
        moment_compatible: model.moment_compatible(),
        d_squared_zero: cx.d_squared_vanishes() && cy.d_squared_vanishes(),
        note: format!("verified at coefficient degree ≤ {max}; agreement at a truncation is evidence, not proof"),
    })
}

/// `(G = S¹, H = ℤ_k, F = ℂ)`.
pub fn cyclic_bundle(k: u32) -> Result<BundleSpec> {
    let fibre = crate::actions::builtin("zk-cone", k)?;
    BundleSpec::new(1, Subgroup::Cyclic { k }, fibre, vec![])
}

/// `(G = T², H = S¹ × 1, F = ℂ^m)` with the given weights and projection `(1, c)`.
pub fn circle_bundle(weights: Vec<i64>, c: Q) -> Result<BundleSpec> {
    let n = weights.len();
    let fibre = LinearAction::torus(format!("S1{weights:?}"), n, vec![weights], vec![Q::zero()])?;
    BundleSpec::new(2, Subgroup::Circle { factor: 0 }, fibre, vec![Q::one(), c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qr};
    use crate::random::rng;

    #[test]
    fn cyclic_extension_is_constant_along_g() {
        let s = cyclic_bundle(3).unwrap();
        let l = s.layout();
        let omega = s.fibre.omega();
        let e = s.extension(&omega).unwrap();
        assert_eq!(e, Form::dx(l, 0).wedge(&Form::dx(l, 1)));
        assert_eq!(s.extension(&Form::constant(s.fibre_layout(), q(2))).unwrap(), Form::constant(l, q(2)));
        assert!(s.extension(&Form::dx(s.fibre_layout(), 0)).is_err());
    }

    #[test]
    fn circle_extension_shows_the_connection() {
        let s = circle_bundle(vec![1], qr(1, 2)).unwrap();
        let l = s.layout();
        let r2 = &Poly::var(s.fibre_layout(), 0).pow(2) + &Poly::var(s.fibre_layout(), 1).pow(2);
        // d|p|² is invariant; i(ξ) d|p|² = 0 so no connection term survives
        let g = Form::function(r2).d();
        let e = s.extension(&g).unwrap();
        assert!(s.is_g_basic(&e));
        // x dy − y dx has i(ξ) = |p|², so e adds |p|² θ
        let fl = s.fibre_layout();
        let a = Form::dx(fl, 1).mul_function(&Poly::var(fl, 0)).sub(&Form::dx(fl, 0).mul_function(&Poly::var(fl, 1)));
        let ea = s.extension(&a).unwrap();
        let rho = &Poly::var(l, 0).pow(2) + &Poly::var(l, 1).pow(2);
        let theta = Form::dx(l, 2).add(&Form::dx(l, 3).scale(&qr(1, 2)));
        let expected = a.embed(l, &[0, 1], &[0, 1]).add(&theta.mul_function(&rho));
        assert_eq!(ea, expected);
        assert!(s.descends(&ea) && !s.is_g_basic(&ea));
        let other = s.with_projection(vec![q(1), q(0)]).unwrap();
        assert_ne!(other.extension(&a).unwrap(), ea);
    }

    #[test]
    fn extension_lemma_batches() {
        let mut r = rng(11);
        for s in [cyclic_bundle(3).unwrap(), circle_bundle(vec![1], qr(1, 2)).unwrap(), circle_bundle(vec![1], q(0)).unwrap()] {
            let rep = verify_extension_lemma(&s, 20, 3, &mut r).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn functoriality() {
        let mut r = rng(5);
        let s = circle_bundle(vec![1], qr(1, 2)).unwrap();
        let id = PolyMap::identity(s.fibre_layout());
        assert!(verify_functoriality(&s, &s, &id, 5, 2, &mut r).unwrap().holds);
        // p ↦ (p, |p|²) into weights (1, 0)
        let t = circle_bundle(vec![1, 0], qr(1, 2)).unwrap();
        let fl = s.fibre_layout();
        let rho = &Poly::var(fl, 0).pow(2) + &Poly::var(fl, 1).pow(2);
        let j = PolyMap::new(fl, t.fibre_layout(), vec![Poly::var(fl, 0), Poly::var(fl, 1), rho, Poly::zero(fl)], vec![]).unwrap();
        assert!(verify_functoriality(&s, &t, &j, 10, 2, &mut r).unwrap().holds);
        let bad = s.with_projection(vec![q(1), q(3)]).unwrap();
        assert!(verify_functoriality(&bad, &t, &j, 1, 1, &mut r).is_err());
    }

    #[test]
    fn induced_moment_map() {
        let m = induced_space(&cyclic_bundle(3).unwrap()).unwrap();
        assert_eq!(m.moment_components(), vec![Poly::var(Model::layout(&m), 2)]);
        assert!(m.moment_compatible());
        let t = induced_space(&circle_bundle(vec![1], qr(1, 2)).unwrap()).unwrap();
        assert_eq!(t.moment_components().len(), 2);
        assert!(t.moment_compatible());
    }

    #[test]
    fn stages_small_truncation() {
        let m = induced_space(&cyclic_bundle(3).unwrap()).unwrap();
        let rep = verify_reduction_in_stages(&m, 3, &SamplingPolicy::with_seed(3).with_cap(80)).unwrap();
        assert!(rep.bijective && rep.chain_map, "{rep:?}");
    }
}
