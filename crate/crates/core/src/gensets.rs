//! Explicit generating sets: the standard `SL_2` pair, non-split tori and
//! their conjugate sets, restriction of scalars, elementary matrices, cube
//! embeddings into alternating groups and `EL_3` over matrix-ring powers.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{build_cayley, GraphError};
use crate::ffield::{
    irreducible_polys, regular_matrix_with, Field, FieldError, SubfieldEmbedding,
};
use crate::groups::{
    act_on_points, enumerate_group, random_special_linear, sl_order, CanonicalKey, GroupElement, GroupError,
    GroupHandle, GroupKind, Perm, PointDomain, DEFAULT_CAP,
};
use crate::matrix::Matrix;
use crate::spectral::{lambda2_auto, LanczosOptions, SpectralError, SpectralReport};

/// Largest cube handled by [`cube_embeddings`].
pub const CUBE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum GensetError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("element {label} is not in the ambient group")]
    NotInAmbient { label: String },
    #[error("TooLarge({0})")]
    TooLarge(u128),
    #[error("OddAction")]
    OddAction,
    #[error("base action is not transitive")]
    NotTransitive,
    #[error("CubeTooLarge({0})")]
    CubeTooLarge(u128),
    #[error("SeparabilityViolated({0})")]
    SeparabilityViolated(usize),
    #[error("embedding check failed: {0}")]
    NotAnEmbedding(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, GensetError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    pub element: GroupElement,
}

/// Ordered, duplicate-free list of labelled elements of an ambient group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingSet {
    ambient: GroupHandle,
    generators: Vec<Generator>,
    symmetric: bool,
}

/// Whether `g` lies in the named group (determinant one, even, or
/// componentwise).
pub fn in_ambient(ambient: &GroupHandle, g: &GroupElement) -> bool {
    match (&ambient.kind, g) {
        (GroupKind::SL { d, field }, GroupElement::Matrix(m))
        | (GroupKind::PSL { d, field }, GroupElement::Matrix(m)) => {
            m.n() == *d && m.field().spec() == field && m.det() == 1
        }
        (GroupKind::Alt { n }, GroupElement::Perm(p)) => p.len() == *n && p.is_even(),
        (GroupKind::Sym { n }, GroupElement::Perm(p)) => p.len() == *n,
        (GroupKind::DirectPower { base, s }, GroupElement::Tuple(t)) => {
            t.len() == *s && t.iter().all(|c| in_ambient(base, c))
        }
        _ => false,
    }
}

impl GeneratingSet {
    /// Checks membership of every element and drops later duplicates.
    pub fn new(ambient: GroupHandle, items: Vec<(String, GroupElement)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut generators = Vec::with_capacity(items.len());
        for (label, element) in items {
            if !in_ambient(&ambient, &element) {
                return Err(GensetError::NotInAmbient { label });
            }
            if seen.insert(element.key()) {
                generators.push(Generator { label, element });
            }
        }
        let symmetric = generators
            .iter()
            .all(|g| seen.contains(&g.element.inverse().key()));
        Ok(GeneratingSet {
            ambient,
            generators,
            symmetric,
        })
    }

    /// Appends the missing inverses, labelled `X^-1`.
    pub fn symmetrized(mut self) -> Self {
        let mut seen: HashSet<CanonicalKey> =
            self.generators.iter().map(|g| g.element.key()).collect();
        let mut extra = Vec::new();
        for g in &self.generators {
            let inv = g.element.inverse();
            if seen.insert(inv.key()) {
                extra.push(Generator {
                    label: format!("{}^-1", g.label),
                    element: inv,
                });
            }
        }
        self.generators.extend(extra);
        self.symmetric = true;
        self
    }

    pub fn ambient(&self) -> &GroupHandle {
        &self.ambient
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn labels(&self) -> Vec<&str> {
        self.generators.iter().map(|g| g.label.as_str()).collect()
    }

    pub fn group_elements(&self) -> Vec<GroupElement> {
        self.generators.iter().map(|g| g.element.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn has_identity(&self) -> bool {
        self.generators.iter().any(|g| g.element.is_identity())
    }
}

fn matrix(field: &Field, rows: &[&[i64]]) -> GroupElement {
    GroupElement::Matrix(Matrix::from_ints(field, rows))
}

/// `{A, B}` with `A = [[1,1],[0,1]]`, `B = [[0,1],[-1,0]]`, closed under inverses.
pub fn sl2_standard(field: &Field) -> GeneratingSet {
    GeneratingSet::new(
        GroupHandle::sl(2, field.spec()),
        vec![
            ("A".into(), matrix(field, &[&[1, 1], &[0, 1]])),
            ("B".into(), matrix(field, &[&[0, 1], &[-1, 0]])),
        ],
    )
    .expect("A and B have determinant 1")
    .symmetrized()
}

/// A cyclic subgroup of `SL_d(F_q)` given by its elements in power order
/// (`elements[i] = generator^i`).
#[derive(Debug, Clone)]
pub struct Torus {
    field: Field,
    d: usize,
    elements: Vec<GroupElement>,
}

impl Torus {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generator(&self) -> &GroupElement {
        &self.elements[1.min(self.elements.len() - 1)]
    }

    /// The same subgroup viewed inside `SL_d` of an extension field.
    pub fn embed(&self, ext: &Field) -> Result<Torus> {
        if ext == &self.field {
            return Ok(self.clone());
        }
        let emb = SubfieldEmbedding::new(&self.field, ext)?;
        let elements = self
            .elements
            .iter()
            .map(|g| GroupElement::Matrix(g.as_matrix().expect("torus of matrices").embed(&emb)))
            .collect();
        Ok(Torus {
            field: ext.clone(),
            d: self.d,
            elements,
        })
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest-code generator of the multiplicative group.
pub fn primitive_element(field: &Field) -> u64 {
    let m = field.order() - 1;
    let factors = prime_factors(m);
    (1..field.order())
        .find(|&x| factors.iter().all(|&r| field.pow(x, m / r) != 1))
        .expect("multiplicative group of a finite field is cyclic")
}

/// Norm-one elements of `F_{q^d}` acting on `F_{q^d} ≅ F_q^d` by
/// multiplication (power basis). The group is cyclic of order
/// `(q^d-1)/(q-1)`, generated by `g^{q-1}` for a primitive `g`.
pub fn nonsplit_torus(field: &Field, d: usize, cap: usize) -> Result<Torus> {
    if d < 2 {
        return Err(GensetError::InvalidParameter(format!("torus needs d >= 2, got {d}")));
    }
    let q = field.order() as u128;
    let qd = (0..d).try_fold(1u128, |acc, _| acc.checked_mul(q));
    let order = qd.map(|v| (v - 1) / (q - 1));
    match order {
        Some(o) if o <= cap as u128 && qd.unwrap() <= u64::MAX as u128 => {}
        other => return Err(GensetError::TooLarge(other.unwrap_or(u128::MAX))),
    }
    let order = order.unwrap() as usize;
    let ext = Field::with_degree(field.p(), field.k() * d)?;
    let emb = SubfieldEmbedding::new(field, &ext)?;
    let g = primitive_element(&ext);
    let h = ext.pow(g, field.order() - 1);
    let mut elements = Vec::with_capacity(order);
    let mut x = 1u64;
    for _ in 0..order {
        let m = regular_matrix_with(&ext.element(x), &emb, None)?;
        elements.push(GroupElement::Matrix(m));
        x = ext.mul(x, h);
    }
    Ok(Torus {
        field: field.clone(),
        d,
        elements,
    })
}

/// The non-split torus of `SL_{2m}(F_q)` realised through
/// `F_{q^{2m}}^* → GL_2(F_{q^m}) → GL_{2m}(F_q)`: norm-one elements of
/// `F_{q^{2m}}` act on `F_{q^{2m}} ≅ F_{q^m}^2`, then scalars are restricted
/// to `F_q`. Same order as [`nonsplit_torus`]`(q, 2m)`, but it lies in the
/// image of `GL_2(F_{q^m})`.
pub fn factored_torus(base: &Field, m: usize, cap: usize) -> Result<Torus> {
    if m < 1 {
        return Err(GensetError::InvalidParameter("m must be >= 1".into()));
    }
    let q = base.order() as u128;
    let order = q
        .checked_pow(2 * m as u32)
        .filter(|&v| v <= u64::MAX as u128)
        .map(|v| (v - 1) / (q - 1));
    match order {
        Some(o) if o <= cap as u128 => {}
        other => return Err(GensetError::TooLarge(other.unwrap_or(u128::MAX))),
    }
    let mid = Field::with_degree(base.p(), base.k() * m)?;
    let top = Field::with_degree(base.p(), base.k() * 2 * m)?;
    let emb = SubfieldEmbedding::new(&mid, &top)?;
    let rho = ScalarRestriction::new(base, &mid)?;
    let h = top.pow(primitive_element(&top), base.order() - 1);
    let mut elements = Vec::with_capacity(order.unwrap() as usize);
    let mut x = 1u64;
    for _ in 0..order.unwrap() {
        let over_mid = regular_matrix_with(&top.element(x), &emb, None)?;
        elements.push(GroupElement::Matrix(rho.apply(&over_mid)?));
        x = top.mul(x, h);
    }
    Ok(Torus {
        field: base.clone(),
        d: 2 * m,
        elements,
    })
}

/// `{h^-1 C^{±1} h : h ∈ H}`, deduplicated.
pub fn torus_conjugate_set(torus: &Torus, c: &GroupElement) -> Result<GeneratingSet> {
    let ambient = GroupHandle::sl(torus.d, torus.field.spec());
    let c_inv = c.inverse();
    let mut items = Vec::with_capacity(2 * torus.order());
    for (i, h) in torus.elements.iter().enumerate() {
        items.push((format!("h{i}^-1 C h{i}"), c.conjugate_by(h)));
        items.push((format!("h{i}^-1 C^-1 h{i}"), c_inv.conjugate_by(h)));
    }
    GeneratingSet::new(ambient, items)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub trials: usize,
    pub seed: u64,
    pub cap: usize,
    pub lanczos: LanczosOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            trials: 16,
            seed: 0,
            cap: DEFAULT_CAP,
            lanczos: LanczosOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConjugatorSearch {
    pub conjugator: GroupElement,
    pub set: GeneratingSet,
    pub lambda2: f64,
    /// Spectral report of the winning set; `None` when it does not generate.
    pub report: Option<SpectralReport>,
    pub best_trial: usize,
    /// `λ` of every trial, in trial order.
    pub lambdas: Vec<f64>,
    pub ramanujan_bound: f64,
    pub below_ramanujan: bool,
    pub below_19_20: bool,
}

/// Ramanujan-type bound for conjugate sets of a torus of `SL_d(F_q)`:
/// `2√q/(q+1)` for `d = 2`, `2d q^{(d-1)/2} (q-1)/(q^d-1)` otherwise.
pub fn ramanujan_bound(q: u64, d: usize) -> f64 {
    let q = q as f64;
    if d == 2 {
        2.0 * q.sqrt() / (q + 1.0)
    } else {
        let size = (q.powi(d as i32) - 1.0) / (q - 1.0);
        2.0 * d as f64 * q.powf((d as f64 - 1.0) / 2.0) / size
    }
}

/// Per-trial generator: stream `trial` of the ChaCha8 generator seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Random search for `C ∈ SL_d(F_Q)` minimizing `λ₂` of the Cayley graph of
/// `SL_d(F_Q)` with respect to the conjugates of `C` by the torus. Candidates
/// are uniform in `SL_d(F_Q)`; a set that fails to generate scores `λ = 1`.
/// Ties go to the smaller canonical key of `C`.
pub fn search_conjugator(
    torus: &Torus,
    ambient_field: &Field,
    opts: &SearchOptions,
) -> Result<ConjugatorSearch> {
    search_conjugator_with(torus, ambient_field, opts, &[])
}

/// [`search_conjugator`] where a candidate `C` must in addition generate the
/// ambient group together with `companions`, or it scores `λ = 1`.
pub fn search_conjugator_with(
    torus: &Torus,
    ambient_field: &Field,
    opts: &SearchOptions,
    companions: &[GroupElement],
) -> Result<ConjugatorSearch> {
    if opts.trials == 0 {
        return Err(GensetError::InvalidParameter("trials must be >= 1".into()));
    }
    let h = torus.embed(ambient_field)?;
    let d = h.d;
    let ambient_order = sl_order(d, ambient_field.order())
        .filter(|&o| o <= opts.cap as u128)
        .ok_or(GensetError::TooLarge(sl_order(d, ambient_field.order()).unwrap_or(u128::MAX)))?;

    let outcomes: Vec<(f64, GroupElement, GeneratingSet, Option<SpectralReport>)> = (0..opts
        .trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(opts.seed, t as u64);
            let c = GroupElement::Matrix(random_special_linear(ambient_field, d, &mut rng));
            let set = torus_conjugate_set(&h, &c)?;
            let cay = build_cayley(&set, opts.cap)?;
            if cay.table.order() as u128 != ambient_order {
                return Ok((1.0, c, set, None));
            }
            if !companions.is_empty() {
                let mut gens = companions.to_vec();
                gens.push(c.clone());
                if enumerate_group(&gens, opts.cap)?.order() as u128 != ambient_order {
                    return Ok((1.0, c, set, None));
                }
            }
            let report = lambda2_auto(&cay.graph, &opts.lanczos)?;
            Ok((report.lambda2, c, set, Some(report)))
        })
        .collect::<Result<_>>()?;

    let lambdas: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let best_trial = (0..outcomes.len())
        .min_by(|&a, &b| {
            outcomes[a]
                .0
                .total_cmp(&outcomes[b].0)
                .then_with(|| outcomes[a].1.key().cmp(&outcomes[b].1.key()))
        })
        .expect("at least one trial");
    let (lambda2, conjugator, set, report) = outcomes.into_iter().nth(best_trial).unwrap();
    let bound = ramanujan_bound(torus.field.order(), d);
    Ok(ConjugatorSearch {
        conjugator,
        set,
        lambda2,
        report,
        best_trial,
        lambdas,
        ramanujan_bound: bound,
        below_ramanujan: lambda2 <= bound,
        below_19_20: lambda2 < 19.0 / 20.0,
    })
}

/// Restriction of scalars from `F_{q^m}` to `F_q`: each entry becomes its
/// `m × m` multiplication matrix.
#[derive(Debug, Clone)]
pub struct ScalarRestriction {
    emb: SubfieldEmbedding,
}

impl ScalarRestriction {
    pub fn new(base: &Field, ext: &Field) -> Result<Self> {
        Ok(ScalarRestriction {
            emb: SubfieldEmbedding::new(base, ext)?,
        })
    }

    pub fn base(&self) -> &Field {
        self.emb.base()
    }

    pub fn apply(&self, g: &Matrix) -> Result<Matrix> {
        if g.field() != self.emb.ext() {
            return Err(FieldError::NotASubfield.into());
        }
        let m = self.emb.degree();
        let n = g.n();
        let mut out = Matrix::zero(self.emb.base(), n * m);
        for i in 0..n {
            for j in 0..n {
                let block = regular_matrix_with(&self.emb.ext().element(g.get(i, j)), &self.emb, None)?;
                for a in 0..m {
                    for b in 0..m {
                        out.set(i * m + a, j * m + b, block.get(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply_element(&self, g: &GroupElement) -> Result<GroupElement> {
        let m = g
            .as_matrix()
            .ok_or_else(|| GensetError::InvalidParameter("expected a matrix".into()))?;
        Ok(GroupElement::Matrix(self.apply(m)?))
    }
}

pub fn restriction_of_scalars(g: &GroupElement, base: &Field) -> Result<GroupElement> {
    let m = g
        .as_matrix()
        .ok_or_else(|| GensetError::InvalidParameter("expected a matrix".into()))?;
    ScalarRestriction::new(base, m.field())?.apply_element(g)
}

#[derive(Debug, Clone)]
pub struct ExtensionGenerators {
    pub set: GeneratingSet,
    /// Search for `C` in `SL_2(F_{q^m})` against the torus of `SL_2(F_p)`.
    pub c_search: ConjugatorSearch,
    /// Search for `D` in `SL_{2m}(F_q)` against its own non-split torus;
    /// absent when `m = 1`.
    pub d_search: Option<ConjugatorSearch>,
}

/// `{ρ(A), ρ(B), ρ(C), D}` in `SL_{2m}(F_q)`, closed under inverses, where
/// `ρ` is restriction of scalars from `F_{q^m}`.
pub fn sl2_over_extension_plus_conjugator(
    base: &Field,
    m: usize,
    opts: &SearchOptions,
) -> Result<ExtensionGenerators> {
    if m == 0 {
        return Err(GensetError::InvalidParameter("m must be >= 1".into()));
    }
    let ext = if m == 1 {
        base.clone()
    } else {
        Field::with_degree(base.p(), base.k() * m)?
    };
    let prime = Field::prime(base.p())?;
    let small_torus = nonsplit_torus(&prime, 2, opts.cap)?;
    let c_search = search_conjugator(&small_torus, &ext, opts)?;
    let std = sl2_standard(&ext);
    let a = std.generators()[0].element.clone();
    let b = std.generators()[1].element.clone();
    let c = c_search.conjugator.clone();
    if m == 1 {
        let set = GeneratingSet::new(
            GroupHandle::sl(2, base.spec()),
            vec![("A".into(), a), ("B".into(), b), ("C".into(), c)],
        )?
        .symmetrized();
        return Ok(ExtensionGenerators {
            set,
            c_search,
            d_search: None,
        });
    }
    let rho = ScalarRestriction::new(base, &ext)?;
    let images = [
        rho.apply_element(&a)?,
        rho.apply_element(&b)?,
        rho.apply_element(&c)?,
    ];
    let big_torus = factored_torus(base, m, opts.cap)?;
    let d_opts = SearchOptions {
        seed: opts.seed.wrapping_add(1),
        ..*opts
    };
    let d_search = search_conjugator_with(&big_torus, base, &d_opts, &images)?;
    let [ra, rb, rc] = images;
    let set = GeneratingSet::new(
        GroupHandle::sl(2 * m, base.spec()),
        vec![
            ("rho(A)".into(), ra),
            ("rho(B)".into(), rb),
            ("rho(C)".into(), rc),
            ("D".into(), d_search.conjugator.clone()),
        ],
    )?
    .symmetrized();
    Ok(ExtensionGenerators {
        set,
        c_search,
        d_search: Some(d_search),
    })
}

fn additive_label(a: usize) -> String {
    match a {
        0 => "1".into(),
        1 => "t".into(),
        _ => format!("t^{a}"),
    }
}

/// `E_ij(t^a)` for all `i ≠ j` and the power basis `t^a` of the field over
/// its prime field, closed under inverses. Labels are 1-based (`E12(t)`).
pub fn elementary_set(d: usize, field: &Field) -> GeneratingSet {
    let mut items = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let mut alpha = 1u64;
            for a in 0..field.k() {
                items.push((
                    format!("E{}{}({})", i + 1, j + 1, additive_label(a)),
                    GroupElement::Matrix(Matrix::elementary(field, d, i, j, alpha)),
                ));
                alpha = field.mul(alpha, field.generator());
            }
        }
    }
    GeneratingSet::new(GroupHandle::sl(d, field.spec()), items)
        .expect("elementary matrices have determinant 1")
        .symmetrized()
}

fn perm_set(n: usize, ambient: GroupHandle, cycles: Vec<(String, Vec<u32>)>) -> GeneratingSet {
    let items = cycles
        .into_iter()
        .map(|(l, c)| (l, Perm::from_cycles(n, &[&c]).expect("valid cycle").into()))
        .collect();
    GeneratingSet::new(ambient, items).expect("permutations of the right parity")
}

/// 3-cycles `(0 1 i)`, `2 ≤ i < n`, generating `Alt(n)`.
pub fn alt_generators(n: usize) -> GeneratingSet {
    let cycles = (2..n as u32)
        .map(|i| (format!("(0 1 {i})"), vec![0, 1, i]))
        .collect();
    perm_set(n, GroupHandle::alt(n), cycles).symmetrized()
}

/// A transposition and an `n`-cycle, generating `Sym(n)`.
pub fn sym_generators(n: usize) -> GeneratingSet {
    let cycles = vec![
        ("(0 1)".into(), vec![0, 1]),
        ("n-cycle".into(), (0..n as u32).collect()),
    ];
    perm_set(n, GroupHandle::sym(n), cycles).symmetrized()
}

/// Action of `elementary_set(3k, F_2)` on the `2^{3k} - 1` nonzero vectors.
pub fn sl3k_point_action(k: usize) -> Result<GeneratingSet> {
    let f2 = Field::prime(2)?;
    let d = 3 * k;
    let set = elementary_set(d, &f2);
    let domain = PointDomain::NonzeroVectors { field: f2, d };
    let n = domain.size();
    let items = set
        .generators()
        .iter()
        .map(|g| Ok((g.label.clone(), act_on_points(&g.element, &domain)?.into())))
        .collect::<Result<Vec<_>>>()?;
    GeneratingSet::new(GroupHandle::alt(n), items)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeSpec {
    pub k: Option<usize>,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub reduced: bool,
}

impl CubeSpec {
    /// `d = 2^{3k} - 1`, `m = 6`.
    pub fn paper(k: usize) -> Result<Self> {
        if k == 0 || 3 * k >= 64 {
            return Err(GensetError::InvalidParameter(format!("bad k = {k}")));
        }
        let d = (1u128 << (3 * k)) - 1;
        let n = d.checked_pow(6).unwrap_or(u128::MAX);
        if n > CUBE_LIMIT {
            return Err(GensetError::CubeTooLarge(n));
        }
        Ok(CubeSpec {
            k: Some(k),
            d: d as usize,
            m: 6,
            n: n as usize,
            reduced: false,
        })
    }

    pub fn reduced(d: usize, m: usize) -> Result<Self> {
        if d < 2 || m < 1 {
            return Err(GensetError::InvalidParameter(format!("bad cube {d}^{m}")));
        }
        let n = (d as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if n > CUBE_LIMIT {
            return Err(GensetError::CubeTooLarge(n));
        }
        Ok(CubeSpec {
            k: None,
            d,
            m,
            n: n as usize,
            reduced: true,
        })
    }

    pub fn lines_per_axis(&self) -> usize {
        self.n / self.d
    }

    /// Line index and position along the line of point `x` for `axis`.
    pub fn line_of(&self, axis: usize, x: usize) -> (usize, usize) {
        let stride = self.d.pow(axis as u32);
        let line = x % stride + x / (stride * self.d) * stride;
        (line, x / stride % self.d)
    }

    pub fn point(&self, axis: usize, line: usize, pos: usize) -> usize {
        let stride = self.d.pow(axis as u32);
        line % stride + pos * stride + line / stride * stride * self.d
    }
}

#[derive(Debug, Clone)]
pub struct CubeSet {
    pub spec: CubeSpec,
    /// Union of the axis images, ambient `Alt(n)`.
    pub set: GeneratingSet,
    /// Axis of each generator of `set`.
    pub axes: Vec<usize>,
}

fn line_components<'a>(g: &'a GroupElement, spec: &CubeSpec) -> Result<Vec<&'a Perm>> {
    let lines = spec.lines_per_axis();
    match g {
        GroupElement::Perm(p) if p.len() == spec.d => Ok(vec![p; lines]),
        GroupElement::Tuple(t) if t.len() == lines => t
            .iter()
            .map(|c| match c {
                GroupElement::Perm(p) if p.len() == spec.d => Ok(p),
                _ => Err(GensetError::InvalidParameter("tuple component is not a perm of d points".into())),
            })
            .collect(),
        _ => Err(GensetError::InvalidParameter(
            "base generator must be a perm of d points or a tuple over the lines".into(),
        )),
    }
}

/// `π_axis(g)`: component `ℓ` of `g` acts on the `ℓ`-th line parallel to `axis`.
pub fn cube_embed(spec: &CubeSpec, axis: usize, g: &GroupElement) -> Result<Perm> {
    let comps = line_components(g, spec)?;
    let stride = spec.d.pow(axis as u32);
    let images: Vec<u32> = (0..spec.n)
        .into_par_iter()
        .map(|x| {
            let (line, pos) = spec.line_of(axis, x);
            let to = comps[line].apply(pos);
            (x + to * stride - pos * stride) as u32
        })
        .collect();
    Ok(Perm::new(images)?)
}

fn is_transitive(perms: &[&Perm], n: usize) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for p in perms {
            let y = p.apply(x);
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// `S_n = ∪_i π_i(F)` for the `m` axis embeddings of the base generators.
/// Each `π_i` is checked to be multiplicative and injective on the
/// generators and to preserve every line parallel to axis `i`.
pub fn cube_embeddings(spec: &CubeSpec, base: &GeneratingSet) -> Result<CubeSet> {
    if base.is_empty() {
        return Err(GroupError::EmptyGenerators.into());
    }
    let base_perms: Vec<Vec<&Perm>> = base
        .generators()
        .iter()
        .map(|g| line_components(&g.element, spec))
        .collect::<Result<_>>()?;
    if base_perms.iter().flatten().any(|p| !p.is_even()) {
        return Err(GensetError::OddAction);
    }
    for line in 0..spec.lines_per_axis() {
        let on_line: Vec<&Perm> = base_perms.iter().map(|c| c[line]).collect();
        if !is_transitive(&on_line, spec.d) {
            return Err(GensetError::NotTransitive);
        }
    }

    let mut items = Vec::new();
    let mut axes_of = Vec::new();
    for axis in 0..spec.m {
        let images: Vec<Perm> = base
            .generators()
            .iter()
            .map(|g| cube_embed(spec, axis, &g.element))
            .collect::<Result<_>>()?;
        verify_axis(spec, axis, base, &images)?;
        for (g, img) in base.generators().iter().zip(images) {
            items.push((format!("pi{axis}({})", g.label), GroupElement::Perm(img)));
            axes_of.push(axis);
        }
    }
    // GeneratingSet::new drops duplicates; keep axes aligned with survivors
    let mut seen = HashSet::new();
    let axes = items
        .iter()
        .zip(&axes_of)
        .filter(|(item, _)| seen.insert(item.1.key()))
        .map(|(_, &a)| a)
        .collect();
    let set = GeneratingSet::new(GroupHandle::alt(spec.n), items)?;
    let set = if base.is_symmetric() { set } else { set.symmetrized() };
    Ok(CubeSet { spec: *spec, set, axes })
}

fn verify_axis(spec: &CubeSpec, axis: usize, base: &GeneratingSet, images: &[Perm]) -> Result<()> {
    let gens = base.generators();
    for (g, img) in gens.iter().zip(images) {
        if g.element.is_identity() != img.is_identity() {
            return Err(GensetError::NotAnEmbedding(format!("axis {axis}: kernel at {}", g.label)));
        }
        let moves_off_line = (0..spec.n)
            .into_par_iter()
            .any(|x| spec.line_of(axis, x).0 != spec.line_of(axis, img.apply(x)).0);
        if moves_off_line {
            return Err(GensetError::NotAnEmbedding(format!(
                "axis {axis}: {} leaves a line",
                g.label
            )));
        }
    }
    for (g, gi) in gens.iter().zip(images) {
        for (h, hi) in gens.iter().zip(images) {
            let direct = cube_embed(spec, axis, &g.element.mul(&h.element))?;
            if direct != gi.compose(hi) {
                return Err(GensetError::NotAnEmbedding(format!(
                    "axis {axis}: not multiplicative on ({}, {})",
                    g.label, h.label
                )));
            }
        }
    }
    Ok(())
}

/// Element of `R̄ = Mat_{k'}(F_2)^{×s}`: one `k' × k'` matrix per factor.
pub type RingElement = Vec<Matrix>;

/// Generators of `EL_3(R̄)` together with the data to write any elementary
/// matrix over `R̄` as a word in them.
#[derive(Debug, Clone)]
pub struct El3Presentation {
    pub k: usize,
    pub s: usize,
    pub set: GeneratingSet,
    /// `r1, r2, r3`.
    pub ring_generators: [RingElement; 3],
    /// Basis of `R̄` over `F_2` as monomials in the ring generators (indices
    /// into `ring_generators`; empty = 1).
    basis: Vec<(Vec<u8>, Vec<u8>)>,
    /// Generator index for `E_ij(1)` and `E_ij(r_t)` (`t = 1..=3`), by
    /// position `3i + j`.
    index: Vec<[Option<usize>; 4]>,
}

/// Companion matrix of a monic polynomial (coefficients low to high,
/// leading 1 included).
fn companion(field: &Field, poly: &[u64]) -> Matrix {
    let k = poly.len() - 1;
    let mut m = Matrix::zero(field, k);
    for i in 1..k {
        m.set(i, i - 1, 1);
    }
    for i in 0..k {
        m.set(i, k - 1, field.neg(poly[i]));
    }
    m
}

fn ring_mul(a: &RingElement, b: &RingElement) -> RingElement {
    a.iter().zip(b).map(|(x, y)| x.mul(y)).collect()
}

fn ring_bits(a: &RingElement) -> Vec<u8> {
    a.iter().flat_map(|m| m.entries().iter().map(|&c| c as u8)).collect()
}

/// Block `3k × 3k` matrix: identity plus `x` in block `(i, j)`.
fn block_elementary(f2: &Field, k: usize, i: usize, j: usize, x: &Matrix) -> Matrix {
    let mut m = Matrix::identity(f2, 3 * k);
    for a in 0..k {
        for b in 0..k {
            m.set(i * k + a, j * k + b, x.get(a, b));
        }
    }
    m
}

/// Reduced row-echelon insertion over F_2; returns the combination of
/// existing basis indices plus the new vector when `v` was dependent.
struct F2Span {
    rows: Vec<(Vec<u8>, Vec<bool>)>,
    pivots: Vec<usize>,
}

impl F2Span {
    fn new() -> Self {
        F2Span {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v`; returns the residual and which basis vectors were used.
    fn reduce(&self, v: &[u8], nbasis: usize) -> (Vec<u8>, Vec<bool>) {
        let mut v = v.to_vec();
        let mut comb = vec![false; nbasis];
        for ((row, rc), &p) in self.rows.iter().zip(&self.pivots) {
            if v[p] == 1 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x ^= y;
                }
                for (x, &y) in comb.iter_mut().zip(rc) {
                    *x ^= y;
                }
            }
        }
        (v, comb)
    }

    /// Inserts `v` as basis vector number `self.dim()` if independent.
    fn insert(&mut self, v: &[u8], total: usize) -> bool {
        let (r, mut comb) = self.reduce(v, total);
        let Some(p) = r.iter().position(|&x| x == 1) else {
            return false;
        };
        comb[self.rows.len()] = true;
        self.rows.push((r, comb));
        self.pivots.push(p);
        true
    }
}

/// `EL_3` over `Mat_k(F_2)^{×s}` with ring generators `r1` (companion
/// matrices of distinct degree-`k` irreducibles, one per factor), `r2`
/// (matrix unit at `(0, k-1)`) and `r3` (`diag(1, 0, ..)`). The set is
/// `E_ij(1)` for all six positions plus `E_ij(r_t)` at `(0,1), (1,2),
/// (2,0)`, with identities dropped (at most 15 elements).
pub fn power_generators(k: usize, s: usize) -> Result<El3Presentation> {
    if k == 0 || s == 0 {
        return Err(GensetError::InvalidParameter("k and s must be >= 1".into()));
    }
    let f2 = Field::prime(2)?;
    let polys: Vec<Vec<u64>> = irreducible_polys(2, k).take(s).collect();
    if polys.len() < s {
        return Err(GensetError::SeparabilityViolated(s));
    }
    let r1: RingElement = polys.iter().map(|p| companion(&f2, p)).collect();
    let mut unit = Matrix::zero(&f2, k);
    unit.set(0, k - 1, 1);
    let mut idem = Matrix::zero(&f2, k);
    idem.set(0, 0, 1);
    let r2: RingElement = vec![unit; s];
    let r3: RingElement = vec![idem; s];
    let ring_generators = [r1, r2, r3];

    // spanning set of monomials by breadth-first multiplication
    let dim = s * k * k;
    let one: RingElement = vec![Matrix::identity(&f2, k); s];
    let mut span = F2Span::new();
    let mut basis: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    let mut frontier = vec![(Vec::<u8>::new(), one)];
    span.insert(&ring_bits(&frontier[0].1), dim);
    basis.push((Vec::new(), ring_bits(&frontier[0].1)));
    while !frontier.is_empty() && span.dim() < dim {
        let mut next = Vec::new();
        for (word, x) in &frontier {
            for (t, r) in ring_generators.iter().enumerate() {
                let y = ring_mul(r, x);
                let bits = ring_bits(&y);
                if span.insert(&bits, dim) {
                    let mut w = vec![t as u8];
                    w.extend_from_slice(word);
                    basis.push((w.clone(), bits));
                    next.push((w, y));
                }
            }
        }
        frontier = next;
    }
    if span.dim() < dim {
        return Err(GensetError::SeparabilityViolated(s));
    }

    let ambient = if s == 1 {
        GroupHandle::sl(3 * k, f2.spec())
    } else {
        GroupHandle::power(GroupHandle::sl(3 * k, f2.spec()), s)
    };
    let wrap = |comps: Vec<Matrix>| -> GroupElement {
        if s == 1 {
            GroupElement::Matrix(comps.into_iter().next().unwrap())
        } else {
            GroupElement::Tuple(comps.into_iter().map(GroupElement::Matrix).collect())
        }
    };
    let one_ring: RingElement = vec![Matrix::identity(&f2, k); s];
    let mut items: Vec<(String, GroupElement, usize, usize)> = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let e = wrap(one_ring.iter().map(|x| block_elementary(&f2, k, i, j, x)).collect());
                items.push((format!("E{}{}(1)", i + 1, j + 1), e, 3 * i + j, 0));
            }
        }
    }
    for (t, r) in ring_generators.iter().enumerate() {
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            let e = wrap(r.iter().map(|x| block_elementary(&f2, k, i, j, x)).collect());
            items.push((format!("E{}{}(r{})", i + 1, j + 1, t + 1), e, 3 * i + j, t + 1));
        }
    }
    let mut index = vec![[None; 4]; 9];
    let mut kept = Vec::new();
    let mut keys: Vec<CanonicalKey> = Vec::new();
    for (label, e, pos, slot) in items {
        if e.is_identity() {
            continue;
        }
        let key = e.key();
        let idx = match keys.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                keys.push(key);
                kept.push((label, e));
                kept.len() - 1
            }
        };
        index[pos][slot] = Some(idx);
    }
    let set = GeneratingSet::new(ambient, kept)?;
    Ok(El3Presentation {
        k,
        s,
        set,
        ring_generators,
        basis,
        index,
    })
}

impl El3Presentation {
    fn f2(&self) -> Field {
        self.ring_generators[0][0].field().clone()
    }

    /// The elementary matrix `E_ij(x)` built directly.
    pub fn elementary(&self, i: usize, j: usize, x: &RingElement) -> GroupElement {
        let f2 = self.f2();
        let comps: Vec<Matrix> = x.iter().map(|c| block_elementary(&f2, self.k, i, j, c)).collect();
        if self.s == 1 {
            GroupElement::Matrix(comps.into_iter().next().unwrap())
        } else {
            GroupElement::Tuple(comps.into_iter().map(GroupElement::Matrix).collect())
        }
    }

    /// Word for `E_ij(r)` with `r ∈ {1, r1, r2, r3}` (`slot` 0..=3). Every
    /// generator is an involution, so inverses are the letters themselves.
    fn atom(&self, i: usize, j: usize, slot: usize) -> Option<Vec<usize>> {
        if slot > 0 && self.is_zero_generator(slot - 1) {
            return Some(Vec::new());
        }
        if let Some(g) = self.index[3 * i + j][slot] {
            return Some(vec![g]);
        }
        if slot == 0 {
            return None;
        }
        // E_ij(r) = [E_il(r), E_lj(1)] with l the remaining index
        let l = 3 - i - j;
        let a = self.atom(i, l, slot)?;
        let b = self.atom(l, j, 0)?;
        Some(commutator(&a, &b))
    }

    fn is_zero_generator(&self, t: usize) -> bool {
        self.ring_generators[t]
            .iter()
            .all(|m| m.entries().iter().all(|&c| c == 0))
    }

    /// Word for `E_ij(g_1 g_2 … g_L)` by iterated commutators.
    fn monomial_word(&self, i: usize, j: usize, word: &[u8]) -> Option<Vec<usize>> {
        match word {
            [] => self.atom(i, j, 0),
            [g] => self.atom(i, j, *g as usize + 1),
            [g, rest @ ..] => {
                let l = 3 - i - j;
                let a = self.atom(i, l, *g as usize + 1)?;
                let b = self.monomial_word(l, j, rest)?;
                Some(commutator(&a, &b))
            }
        }
    }

    /// A word in the generators (indices into `set`) equal to `E_ij(x)`.
    pub fn word_for(&self, i: usize, j: usize, x: &RingElement) -> Result<Vec<usize>> {
        if i == j || i > 2 || j > 2 {
            return Err(GensetError::InvalidParameter(format!("bad position ({i},{j})")));
        }
        let dim = self.s * self.k * self.k;
        let mut span = F2Span::new();
        for (_, bits) in &self.basis {
            span.insert(bits, dim);
        }
        let (residual, comb) = span.reduce(&ring_bits(x), dim);
        if residual.contains(&1) {
            return Err(GensetError::InvalidParameter("element outside the ring".into()));
        }
        let mut out = Vec::new();
        for (b, used) in comb.iter().enumerate() {
            if *used {
                let w = self
                    .monomial_word(i, j, &self.basis[b].0)
                    .ok_or_else(|| GensetError::InvalidParameter("missing generator".into()))?;
                out.extend(w);
            }
        }
        Ok(out)
    }

    /// Product of the generators named by `word`, left to right.
    pub fn evaluate(&self, word: &[usize]) -> GroupElement {
        let gens = self.set.generators();
        let start = gens[0].element.identity_like();
        word.iter().fold(start, |acc, &g| acc.mul(&gens[g].element))
    }
}

/// `[a, b] = a b a^-1 b^-1` for words of involutions.
fn commutator(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(2 * (a.len() + b.len()));
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.extend(a.iter().rev());
    out.extend(b.iter().rev());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::norm;
    use crate::groups::{enumerate_group, GroupElement};
    use rand::Rng;

    fn order_of(set: &GeneratingSet) -> usize {
        enumerate_group(&set.group_elements(), DEFAULT_CAP).unwrap().order()
    }

    #[test]
    fn standard_pair() {
        let f2 = Field::prime(2).unwrap();
        let s2 = sl2_standard(&f2);
        // over F_2 both A and B are involutions
        assert_eq!(s2.len(), 2);
        assert!(s2.is_symmetric());
        let f5 = Field::prime(5).unwrap();
        assert_eq!(sl2_standard(&f5).len(), 4);
        for p in [2u64, 3, 5, 7] {
            let f = Field::prime(p).unwrap();
            assert_eq!(order_of(&sl2_standard(&f)) as u128, sl_order(2, p).unwrap());
        }
    }

    #[test]
    fn torus_orders_and_norms() {
        for (p, k, d) in [(2u64, 1usize, 2usize), (3, 1, 2), (2, 2, 2), (5, 1, 2), (2, 1, 3)] {
            let f = Field::with_degree(p, k).unwrap();
            let q = f.order();
            let t = nonsplit_torus(&f, d, DEFAULT_CAP).unwrap();
            assert_eq!(t.order() as u64, (q.pow(d as u32) - 1) / (q - 1));
            let keys: HashSet<_> = t.elements().iter().map(|g| g.key()).collect();
            assert_eq!(keys.len(), t.order());
            for g in t.elements() {
                assert_eq!(g.as_matrix().unwrap().det(), 1);
            }
            // cyclic: generated by its generator
            assert_eq!(t.generator().order() as usize, t.order());
        }
        // independent oracle: count norm-one elements of F_9 over F_3
        let f3 = Field::prime(3).unwrap();
        let f9 = Field::with_degree(3, 2).unwrap();
        let count = (1..9)
            .filter(|&c| norm(&f9.element(c), &f3).unwrap().code() == 1)
            .count();
        assert_eq!(count, nonsplit_torus(&f3, 2, DEFAULT_CAP).unwrap().order());
        assert!(matches!(
            nonsplit_torus(&f3, 2, 3),
            Err(GensetError::TooLarge(4))
        ));
    }

    #[test]
    fn torus_conjugates() {
        let f3 = Field::prime(3).unwrap();
        let t = nonsplit_torus(&f3, 2, DEFAULT_CAP).unwrap();
        let id = GroupElement::Matrix(Matrix::identity(&f3, 2));
        assert_eq!(torus_conjugate_set(&t, &id).unwrap().len(), 1);
        let minus = GroupElement::Matrix(Matrix::from_ints(&f3, &[&[-1, 0], &[0, -1]]));
        assert_eq!(torus_conjugate_set(&t, &minus).unwrap().len(), 1);
        let a = sl2_standard(&f3).generators()[0].element.clone();
        let s = torus_conjugate_set(&t, &a).unwrap();
        // -I lies in the torus, so h and -h give the same conjugate: p+1 elements
        assert_eq!(s.len(), 4);
        assert!(s.is_symmetric());
        assert_eq!(order_of(&s), 24);
    }

    #[test]
    fn search_is_reproducible() {
        let f3 = Field::prime(3).unwrap();
        let t = nonsplit_torus(&f3, 2, DEFAULT_CAP).unwrap();
        let opts = SearchOptions {
            trials: 4,
            seed: 9,
            ..Default::default()
        };
        let a = search_conjugator(&t, &f3, &opts).unwrap();
        let b = search_conjugator(&t, &f3, &opts).unwrap();
        assert_eq!(a.conjugator, b.conjugator);
        assert_eq!(a.lambdas, b.lambdas);
        assert_eq!(a.lambdas.len(), 4);
        assert_eq!(a.lambda2, a.lambdas.iter().cloned().fold(f64::INFINITY, f64::min));
        let one = SearchOptions { trials: 1, ..opts };
        let c = search_conjugator(&t, &f3, &one).unwrap();
        assert_eq!(c.conjugator, search_conjugator(&t, &f3, &one).unwrap().conjugator);
    }

    #[test]
    fn scalar_restriction() {
        let f2 = Field::prime(2).unwrap();
        let f4 = Field::with_degree(2, 2).unwrap();
        let rho = ScalarRestriction::new(&f2, &f4).unwrap();
        assert!(rho.apply(&Matrix::identity(&f4, 2)).unwrap().is_identity());
        let t = f4.generator();
        let scalar = Matrix::from_codes(&f4, 2, vec![t, 0, 0, t]).unwrap();
        let comp = [[0u64, 1], [1, 1]];
        let img = rho.apply(&scalar).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i / 2 == j / 2 { comp[i % 2][j % 2] } else { 0 };
                assert_eq!(img.get(i, j), expected, "({i},{j})");
            }
        }
        let g = enumerate_group(&sl2_standard(&f4).group_elements(), DEFAULT_CAP);
        // A and B only reach SL_2(F_2) inside SL_2(F_4)
        assert_eq!(g.unwrap().order(), 6);
    }

    #[test]
    fn factored_torus_is_f4_linear() {
        let f2 = Field::prime(2).unwrap();
        let f4 = Field::with_degree(2, 2).unwrap();
        let t = factored_torus(&f2, 2, DEFAULT_CAP).unwrap();
        assert_eq!(t.order(), 15);
        let rho = ScalarRestriction::new(&f2, &f4).unwrap();
        let scalar = rho
            .apply(&Matrix::from_codes(&f4, 2, vec![2, 0, 0, 2]).unwrap())
            .unwrap();
        let keys: HashSet<_> = t.elements().iter().map(|g| g.key()).collect();
        assert_eq!(keys.len(), 15);
        for h in t.elements() {
            let h = h.as_matrix().unwrap();
            assert_eq!(h.det(), 1);
            assert_eq!(h.mul(&scalar), scalar.mul(h));
        }
    }

    #[test]
    fn extension_set_generates_sl4_f2() {
        let f2 = Field::prime(2).unwrap();
        let opts = SearchOptions {
            trials: 4,
            seed: 3,
            ..Default::default()
        };
        let g = sl2_over_extension_plus_conjugator(&f2, 2, &opts).unwrap();
        assert!(g.set.len() <= 8);
        assert_eq!(order_of(&g.set), 20160);
        assert!(g.d_search.unwrap().lambda2 < 1.0);
    }

    #[test]
    fn elementary_sets() {
        let f2 = Field::prime(2).unwrap();
        let e = elementary_set(2, &f2);
        assert_eq!(e.labels(), vec!["E12(1)", "E21(1)"]);
        let f3 = Field::prime(3).unwrap();
        assert_eq!(elementary_set(3, &f3).len(), 12);
        for (d, q) in [(2usize, 2u64), (2, 3), (3, 2), (3, 3)] {
            let f = Field::prime(q).unwrap();
            assert_eq!(order_of(&elementary_set(d, &f)) as u128, sl_order(d, q).unwrap());
        }
        let f4 = Field::with_degree(2, 2).unwrap();
        let e4 = elementary_set(2, &f4);
        assert_eq!(e4.len(), 4);
        assert_eq!(order_of(&e4), 60);
    }

    #[test]
    fn membership_is_checked() {
        let f3 = Field::prime(3).unwrap();
        let bad = GroupElement::Matrix(Matrix::from_ints(&f3, &[&[2, 0], &[0, 1]]));
        let err = GeneratingSet::new(GroupHandle::sl(2, f3.spec()), vec![("x".into(), bad)]);
        assert!(matches!(err, Err(GensetError::NotInAmbient { .. })));
        let odd: GroupElement = Perm::from_cycles(3, &[&[0, 1]]).unwrap().into();
        assert!(GeneratingSet::new(GroupHandle::alt(3), vec![("t".into(), odd)]).is_err());
    }

    #[test]
    fn alt_and_sym_generate() {
        assert_eq!(order_of(&alt_generators(5)), 60);
        assert_eq!(order_of(&sym_generators(5)), 120);
    }

    #[test]
    fn cube_indexing_round_trip() {
        let spec = CubeSpec::reduced(5, 3).unwrap();
        for axis in 0..3 {
            let mut seen = HashSet::new();
            for x in 0..spec.n {
                let (l, pos) = spec.line_of(axis, x);
                assert!(l < spec.lines_per_axis());
                assert_eq!(spec.point(axis, l, pos), x);
                seen.insert((l, pos));
            }
            assert_eq!(seen.len(), spec.n);
        }
    }

    #[test]
    fn cube_small() {
        let base = sl3k_point_action(1).unwrap();
        assert!(!base.is_empty());
        let one = cube_embeddings(&CubeSpec::reduced(7, 1).unwrap(), &base).unwrap();
        assert_eq!(one.set.group_elements(), base.group_elements());

        let spec = CubeSpec::reduced(7, 2).unwrap();
        let cube = cube_embeddings(&spec, &base).unwrap();
        assert_eq!(cube.set.len(), 2 * base.len());
        assert_eq!(cube.axes.len(), cube.set.len());
        let perms: Vec<&Perm> = cube.set.generators().iter().map(|g| g.element.as_perm().unwrap()).collect();
        assert!(is_transitive(&perms, 49));
        assert!(cube.set.generators().iter().all(|g| g.element.as_perm().unwrap().is_even()));

        assert!(matches!(CubeSpec::paper(2), Err(GensetError::CubeTooLarge(_))));
        assert_eq!(CubeSpec::paper(1).unwrap().n, 117_649);

        let odd = GeneratingSet::new(
            GroupHandle::sym(3),
            vec![("t".into(), Perm::from_cycles(3, &[&[0, 1]]).unwrap().into())],
        )
        .unwrap();
        assert!(matches!(
            cube_embeddings(&CubeSpec::reduced(3, 2).unwrap(), &odd),
            Err(GensetError::OddAction)
        ));
    }

    #[test]
    fn cube_tuple_generators_act_per_line() {
        let spec = CubeSpec::reduced(3, 2).unwrap();
        let c: GroupElement = Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap().into();
        let id: GroupElement = Perm::identity(3).into();
        let g = GroupElement::Tuple(vec![c.clone(), id.clone(), c.clone()]);
        let p = cube_embed(&spec, 1, &g).unwrap();
        // axis 1 lines are {l, l+3, l+6}; line 1 is fixed
        assert_eq!(p.apply(1), 1);
        assert_eq!(p.apply(0), 3);
        assert_eq!(p.apply(2), 5);
    }

    #[test]
    fn power_generators_small() {
        let e = power_generators(1, 1).unwrap();
        let f2 = Field::prime(2).unwrap();
        let mut a: Vec<_> = e.set.group_elements().iter().map(|g| g.key()).collect();
        let mut b: Vec<_> = elementary_set(3, &f2).group_elements().iter().map(|g| g.key()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);

        let e2 = power_generators(1, 2).unwrap();
        assert!(e2.set.len() <= 20);
        assert_eq!(order_of(&e2.set), 168 * 168);

        assert!(matches!(
            power_generators(1, 3),
            Err(GensetError::SeparabilityViolated(3))
        ));
    }

    #[test]
    fn power_generator_words() {
        let e = power_generators(2, 1).unwrap();
        assert!(e.set.len() <= 20);
        let f2 = Field::prime(2).unwrap();
        let mut rng = trial_rng(5, 0);
        for _ in 0..100 {
            let x: RingElement = vec![Matrix::from_codes(&f2, 2, (0..4).map(|_| rng.gen_range(0..2)).collect()).unwrap()];
            let i = rng.gen_range(0..3);
            let j = (i + rng.gen_range(1..3)) % 3;
            let w = e.word_for(i, j, &x).unwrap();
            assert!(w.len() <= 2000);
            assert_eq!(e.evaluate(&w), e.elementary(i, j, &x));
        }
    }
}
