//! Group elements (matrices, permutations, direct-power tuples), canonical
//! keys, BFS enumeration, central quotients and point actions.
//!
//! Composition convention, used everywhere: `a.compose(b)` is the product
//! `a * b`. For matrices that is the matrix product; for permutations it is
//! `(a ∘ b)(x) = a(b(x))`; tuples multiply componentwise. Matrices act on
//! column vectors, so `act(a * b) = act(a) ∘ act(b)`.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::{Field, FieldError, FieldSpec};
use crate::matrix::Matrix;

/// Default enumeration cap (2^24 elements).
pub const DEFAULT_CAP: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("AmbientMismatch")]
    AmbientMismatch,
    #[error("CapExceeded({0})")]
    CapExceeded(usize),
    #[error("image array is not a permutation")]
    NotAPermutation,
    #[error("NotAnAction: {0}")]
    NotAnAction(String),
    #[error("generating set is empty")]
    EmptyGenerators,
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, GroupError>;

/// Permutation of `{0, .., n-1}` stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Perm(Vec<u32>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

impl TryFrom<Vec<u32>> for Perm {
    type Error = GroupError;

    fn try_from(images: Vec<u32>) -> Result<Self> {
        Perm::new(images)
    }
}

impl From<Perm> for Vec<u32> {
    fn from(p: Perm) -> Self {
        p.0
    }
}

impl Perm {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(GroupError::NotAPermutation);
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Product of the given cycles on `n` points.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        for cycle in cycles {
            let mut next = images.clone();
            for (i, &x) in cycle.iter().enumerate() {
                let y = cycle[(i + 1) % cycle.len()];
                if x as usize >= n || y as usize >= n {
                    return Err(GroupError::NotAPermutation);
                }
                next[x as usize] = y;
            }
            // apply this cycle after the ones already accumulated
            images = images.iter().map(|&v| next[v as usize]).collect();
        }
        Perm::new(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn is_even(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
            }
        }
        (n - cycles).is_multiple_of(2)
    }

    fn write_key(&self, out: &mut Vec<u8>) {
        let width = perm_width(self.len());
        for &x in &self.0 {
            out.extend_from_slice(&x.to_be_bytes()[4 - width..]);
        }
    }
}

fn perm_width(n: usize) -> usize {
    match n {
        0..=256 => 1,
        257..=65_536 => 2,
        _ => 4,
    }
}

/// Byte string identifying an element within its ambient group. Byte order
/// is the global element order used to sort BFS frontiers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalKey(pub Vec<u8>);

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Matrix(Matrix),
    Perm(Perm),
    Tuple(Vec<GroupElement>),
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Matrix(m) => write!(f, "{m:?}"),
            GroupElement::Perm(p) => write!(f, "{p:?}"),
            GroupElement::Tuple(t) => f.debug_list().entries(t).finish(),
        }
    }
}

impl From<Matrix> for GroupElement {
    fn from(m: Matrix) -> Self {
        GroupElement::Matrix(m)
    }
}

impl From<Perm> for GroupElement {
    fn from(p: Perm) -> Self {
        GroupElement::Perm(p)
    }
}

impl GroupElement {
    pub fn as_matrix(&self) -> Option<&Matrix> {
        match self {
            GroupElement::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_perm(&self) -> Option<&Perm> {
        match self {
            GroupElement::Perm(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[GroupElement]> {
        match self {
            GroupElement::Tuple(t) => Some(t),
            _ => None,
        }
    }

    /// True when both elements live in the same ambient group shape.
    pub fn same_ambient(&self, other: &GroupElement) -> bool {
        match (self, other) {
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) => a.same_shape(b),
            (GroupElement::Perm(a), GroupElement::Perm(b)) => a.len() == b.len(),
            (GroupElement::Tuple(a), GroupElement::Tuple(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_ambient(y))
            }
            _ => false,
        }
    }

    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if !self.same_ambient(other) {
            return Err(GroupError::AmbientMismatch);
        }
        Ok(self.mul(other))
    }

    /// Unchecked product; callers guarantee a shared ambient group.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) => GroupElement::Matrix(a.mul(b)),
            (GroupElement::Perm(a), GroupElement::Perm(b)) => GroupElement::Perm(a.compose(b)),
            (GroupElement::Tuple(a), GroupElement::Tuple(b)) => {
                GroupElement::Tuple(a.iter().zip(b).map(|(x, y)| x.mul(y)).collect())
            }
            _ => panic!("product of elements from different ambient groups"),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Matrix(m) => {
                GroupElement::Matrix(m.inverse().expect("group elements are invertible"))
            }
            GroupElement::Perm(p) => GroupElement::Perm(p.inverse()),
            GroupElement::Tuple(t) => GroupElement::Tuple(t.iter().map(|x| x.inverse()).collect()),
        }
    }

    pub fn identity_like(&self) -> GroupElement {
        match self {
            GroupElement::Matrix(m) => GroupElement::Matrix(Matrix::identity(m.field(), m.n())),
            GroupElement::Perm(p) => GroupElement::Perm(Perm::identity(p.len())),
            GroupElement::Tuple(t) => {
                GroupElement::Tuple(t.iter().map(|x| x.identity_like()).collect())
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Matrix(m) => m.is_identity(),
            GroupElement::Perm(p) => p.is_identity(),
            GroupElement::Tuple(t) => t.iter().all(|x| x.is_identity()),
        }
    }

    /// `g^{-1} self g`.
    pub fn conjugate_by(&self, g: &GroupElement) -> GroupElement {
        g.inverse().mul(self).mul(g)
    }

    pub fn pow(&self, e: u64) -> GroupElement {
        let mut acc = self.identity_like();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Element order (smallest `e >= 1` with `g^e = 1`).
    pub fn order(&self) -> u64 {
        let mut acc = self.clone();
        let mut e = 1;
        while !acc.is_identity() {
            acc = acc.mul(self);
            e += 1;
        }
        e
    }

    pub fn key(&self) -> CanonicalKey {
        let mut out = Vec::new();
        self.write_key(&mut out);
        CanonicalKey(out)
    }

    fn write_key(&self, out: &mut Vec<u8>) {
        match self {
            GroupElement::Matrix(m) => m.write_key(out),
            GroupElement::Perm(p) => p.write_key(out),
            GroupElement::Tuple(t) => {
                for x in t {
                    let mut inner = Vec::new();
                    x.write_key(&mut inner);
                    out.extend_from_slice(&(inner.len() as u32).to_be_bytes());
                    out.extend_from_slice(&inner);
                }
            }
        }
    }

    /// Checks the special-linear / even-permutation condition componentwise.
    pub fn is_special(&self) -> bool {
        match self {
            GroupElement::Matrix(m) => m.det() == 1,
            GroupElement::Perm(p) => p.is_even(),
            GroupElement::Tuple(t) => t.iter().all(|x| x.is_special()),
        }
    }
}

/// JSON literal for an element. Matrix entries are listed row-major, each as
/// its little-endian coefficient array.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ElementRepr {
    Matrix {
        field: FieldSpec,
        n: usize,
        entries: Vec<Vec<u64>>,
    },
    Perm {
        images: Vec<u32>,
    },
    Tuple {
        components: Vec<GroupElement>,
    },
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            GroupElement::Matrix(m) => ElementRepr::Matrix {
                field: m.field().spec().clone(),
                n: m.n(),
                entries: m.entries().iter().map(|&c| m.field().coeffs(c)).collect(),
            },
            GroupElement::Perm(p) => ElementRepr::Perm {
                images: p.images().to_vec(),
            },
            GroupElement::Tuple(t) => ElementRepr::Tuple {
                components: t.clone(),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        match ElementRepr::deserialize(d)? {
            ElementRepr::Matrix { field, n, entries } => {
                let field = Field::new(field);
                let codes = entries.iter().map(|c| field.code(c)).collect();
                Matrix::from_codes(&field, n, codes)
                    .map(GroupElement::Matrix)
                    .map_err(D::Error::custom)
            }
            ElementRepr::Perm { images } => Perm::new(images)
                .map(GroupElement::Perm)
                .map_err(D::Error::custom),
            ElementRepr::Tuple { components } => {
                if components
                    .windows(2)
                    .any(|w| !w[0].same_ambient(&w[1]))
                {
                    return Err(D::Error::custom("tuple components differ in shape"));
                }
                Ok(GroupElement::Tuple(components))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    #[serde(rename = "sl")]
    SL { d: usize, field: FieldSpec },
    #[serde(rename = "psl")]
    PSL { d: usize, field: FieldSpec },
    Alt { n: usize },
    Sym { n: usize },
    DirectPower { base: Box<GroupHandle>, s: usize },
}

/// Names an ambient group; `order` is filled from the closed form when it
/// fits, or after enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHandle {
    #[serde(flatten)]
    pub kind: GroupKind,
    pub order: Option<u128>,
}

impl GroupHandle {
    fn with_closed_form(kind: GroupKind) -> Self {
        let mut h = GroupHandle { kind, order: None };
        h.order = h.closed_form_order();
        h
    }

    pub fn sl(d: usize, field: &FieldSpec) -> Self {
        Self::with_closed_form(GroupKind::SL {
            d,
            field: field.clone(),
        })
    }

    pub fn psl(d: usize, field: &FieldSpec) -> Self {
        Self::with_closed_form(GroupKind::PSL {
            d,
            field: field.clone(),
        })
    }

    pub fn alt(n: usize) -> Self {
        Self::with_closed_form(GroupKind::Alt { n })
    }

    pub fn sym(n: usize) -> Self {
        Self::with_closed_form(GroupKind::Sym { n })
    }

    pub fn power(base: GroupHandle, s: usize) -> Self {
        Self::with_closed_form(GroupKind::DirectPower {
            base: Box::new(base),
            s,
        })
    }

    /// Order from the standard formulas, `None` on overflow.
    pub fn closed_form_order(&self) -> Option<u128> {
        match &self.kind {
            GroupKind::SL { d, field } => sl_order(*d, field.order()),
            GroupKind::PSL { d, field } => {
                let q = field.order() as u128;
                let z = gcd_u128(*d as u128, q - 1);
                sl_order(*d, field.order()).map(|o| o / z)
            }
            GroupKind::Alt { n } => factorial(*n).map(|f| if *n >= 2 { f / 2 } else { f }),
            GroupKind::Sym { n } => factorial(*n),
            GroupKind::DirectPower { base, s } => {
                let b = base.closed_form_order()?;
                (0..*s).try_fold(1u128, |acc, _| acc.checked_mul(b))
            }
        }
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

/// `|SL_d(F_q)| = q^{d(d-1)/2} prod_{i=2}^{d} (q^i - 1)`.
pub fn sl_order(d: usize, q: u64) -> Option<u128> {
    let q = q as u128;
    let mut acc: u128 = 1;
    for _ in 0..d * (d - 1) / 2 {
        acc = acc.checked_mul(q)?;
    }
    let mut qi = q;
    for _ in 2..=d {
        qi = qi.checked_mul(q)?;
        acc = acc.checked_mul(qi - 1)?;
    }
    Some(acc)
}

fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// Elements of a finite group in canonical BFS order: the identity first,
/// then each BFS level sorted by [`CanonicalKey`].
#[derive(Clone, Debug)]
pub struct GroupTable {
    elements: Vec<GroupElement>,
    keys: Vec<CanonicalKey>,
    index: HashMap<CanonicalKey, u32>,
    level_starts: Vec<usize>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn key(&self, i: usize) -> &CanonicalKey {
        &self.keys[i]
    }

    pub fn index_of_key(&self, key: &CanonicalKey) -> Option<usize> {
        self.index.get(key).map(|&i| i as usize)
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index_of_key(&g.key())
    }

    /// Start offsets of each BFS level; level `r` holds the elements at word
    /// distance `r` from the identity over the enumeration moves.
    pub fn level_starts(&self) -> &[usize] {
        &self.level_starts
    }

    /// Largest word distance from the identity over the enumeration moves.
    pub fn radius(&self) -> usize {
        self.level_starts.len() - 1
    }

    pub fn distance(&self, i: usize) -> usize {
        self.level_starts.partition_point(|&s| s <= i) - 1
    }
}

/// BFS closure of `generators` under left multiplication by the generators
/// and their inverses.
pub fn enumerate_group(generators: &[GroupElement], cap: usize) -> Result<GroupTable> {
    enumerate_with(generators, cap, |g| g)
}

/// [`enumerate_group`] where every element is first mapped to a canonical
/// representative (used for central quotients).
pub fn enumerate_with<F>(generators: &[GroupElement], cap: usize, normalize: F) -> Result<GroupTable>
where
    F: Fn(GroupElement) -> GroupElement + Sync + Send,
{
    let first = generators.first().ok_or(GroupError::EmptyGenerators)?;
    if generators.iter().any(|g| !g.same_ambient(first)) {
        return Err(GroupError::AmbientMismatch);
    }
    let mut moves: Vec<GroupElement> = Vec::new();
    let mut move_keys: HashMap<CanonicalKey, ()> = HashMap::new();
    for g in generators {
        for h in [g.clone(), g.inverse()] {
            let h = normalize(h);
            if move_keys.insert(h.key(), ()).is_none() {
                moves.push(h);
            }
        }
    }
    let identity = normalize(first.identity_like());
    let id_key = identity.key();
    let mut elements = vec![identity];
    let mut keys = vec![id_key.clone()];
    let mut index: HashMap<CanonicalKey, u32> = HashMap::new();
    index.insert(id_key, 0);
    let mut level_starts = vec![0usize];
    if cap == 0 {
        return Err(GroupError::CapExceeded(cap));
    }
    let normalize = &normalize;
    let mut frontier = 0..1usize;
    const CHUNK: usize = 2048;
    while !frontier.is_empty() {
        let mut level: HashMap<CanonicalKey, GroupElement> = HashMap::new();
        let mut start = frontier.start;
        while start < frontier.end {
            let end = (start + CHUNK).min(frontier.end);
            let products: Vec<(CanonicalKey, GroupElement)> = elements[start..end]
                .par_iter()
                .flat_map_iter(|f| {
                    moves.iter().map(move |s| {
                        let h = normalize(s.mul(f));
                        (h.key(), h)
                    })
                })
                .collect();
            for (k, h) in products {
                if !index.contains_key(&k) {
                    level.entry(k).or_insert(h);
                }
            }
            if elements.len() + level.len() > cap {
                return Err(GroupError::CapExceeded(cap));
            }
            start = end;
        }
        if level.is_empty() {
            break;
        }
        let mut fresh: Vec<(CanonicalKey, GroupElement)> = level.into_iter().collect();
        fresh.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let begin = elements.len();
        level_starts.push(begin);
        for (k, h) in fresh {
            index.insert(k.clone(), elements.len() as u32);
            keys.push(k);
            elements.push(h);
        }
        frontier = begin..elements.len();
    }
    Ok(GroupTable {
        elements,
        keys,
        index,
        level_starts,
    })
}

/// Canonical representatives of `SL_d(F_q) / Z`, `Z = {λI : λ^d = 1}`.
#[derive(Clone, Debug)]
pub struct PslReducer {
    scalars: Vec<u64>,
}

impl PslReducer {
    pub fn new(field: &Field, d: usize) -> Self {
        let q = field.order();
        let scalars = (1..q).filter(|&l| field.pow(l, d as u64) == 1).collect();
        PslReducer { scalars }
    }

    pub fn center_size(&self) -> usize {
        self.scalars.len()
    }

    /// Smallest-key member of the coset `{λa}`.
    pub fn reduce(&self, a: &GroupElement) -> GroupElement {
        let GroupElement::Matrix(m) = a else {
            return a.clone();
        };
        self.scalars
            .iter()
            .map(|&l| GroupElement::Matrix(m.scale(l)))
            .min_by_key(|g| g.key())
            .expect("1 is always a scalar")
    }
}

pub fn psl_reduce(a: &GroupElement) -> GroupElement {
    match a {
        GroupElement::Matrix(m) => PslReducer::new(m.field(), m.n()).reduce(a),
        _ => a.clone(),
    }
}

/// A set of points acted on by group elements.
#[derive(Clone, Debug, PartialEq)]
pub enum PointDomain {
    /// Nonzero column vectors of `F_q^d`; vector `v` has index
    /// `sum v_i q^i - 1`, so index 0 is the first basis vector.
    NonzeroVectors { field: Field, d: usize },
    /// `{0, .., n-1}` under the natural permutation action.
    Points { n: usize },
    /// Points of the cube `{0..d}^m`; point index is the base-`d` number
    /// with coordinate 0 least significant.
    Cube { d: usize, m: usize },
}

impl PointDomain {
    pub fn size(&self) -> usize {
        match self {
            PointDomain::NonzeroVectors { field, d } => {
                (field.order() as usize).pow(*d as u32) - 1
            }
            PointDomain::Points { n } => *n,
            PointDomain::Cube { d, m } => d.pow(*m as u32),
        }
    }

    pub fn vector(&self, index: usize) -> Option<Vec<u64>> {
        let PointDomain::NonzeroVectors { field, d } = self else {
            return None;
        };
        let q = field.order();
        let mut code = index as u64 + 1;
        Some(
            (0..*d)
                .map(|_| {
                    let c = code % q;
                    code /= q;
                    c
                })
                .collect(),
        )
    }

    pub fn vector_index(&self, v: &[u64]) -> Option<usize> {
        let PointDomain::NonzeroVectors { field, .. } = self else {
            return None;
        };
        let q = field.order();
        let code = v.iter().rev().fold(0u64, |acc, &c| acc * q + c);
        (code != 0).then(|| code as usize - 1)
    }
}

/// Permutation of the domain induced by `g`.
pub fn act_on_points(g: &GroupElement, domain: &PointDomain) -> Result<Perm> {
    match (g, domain) {
        (GroupElement::Matrix(m), PointDomain::NonzeroVectors { field, d }) => {
            if m.field() != field || m.n() != *d {
                return Err(GroupError::NotAnAction(format!(
                    "{}x{} matrix over {} on vectors of length {} over {}",
                    m.n(),
                    m.n(),
                    m.field().spec(),
                    d,
                    field.spec()
                )));
            }
            let size = domain.size();
            if size > u32::MAX as usize {
                return Err(GroupError::NotAnAction("domain too large".into()));
            }
            let images: Vec<u32> = (0..size)
                .into_par_iter()
                .map(|i| {
                    let v = domain.vector(i).expect("vector domain");
                    let w = m.mul_vec(&v);
                    domain.vector_index(&w).map(|j| j as u32)
                })
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| GroupError::NotAnAction("matrix sends a vector to zero".into()))?;
            Perm::new(images)
        }
        (GroupElement::Perm(p), PointDomain::Points { n }) if p.len() == *n => Ok(p.clone()),
        (GroupElement::Perm(p), PointDomain::Cube { .. }) if p.len() == domain.size() => {
            Ok(p.clone())
        }
        _ => Err(GroupError::NotAnAction(format!(
            "element {:?} does not act on {:?}",
            ElementShape::of(g),
            domain
        ))),
    }
}

#[derive(Debug)]
#[allow(dead_code)]
enum ElementShape {
    Matrix(usize),
    Perm(usize),
    Tuple(usize),
}

impl ElementShape {
    fn of(g: &GroupElement) -> Self {
        match g {
            GroupElement::Matrix(m) => ElementShape::Matrix(m.n()),
            GroupElement::Perm(p) => ElementShape::Perm(p.len()),
            GroupElement::Tuple(t) => ElementShape::Tuple(t.len()),
        }
    }
}

/// Uniformly random element of `SL_d(F_q)`: a uniform invertible matrix with
/// its first row rescaled by the inverse determinant.
pub fn random_special_linear<R: Rng + ?Sized>(field: &Field, d: usize, rng: &mut R) -> Matrix {
    let q = field.order();
    loop {
        let entries: Vec<u64> = (0..d * d).map(|_| rng.gen_range(0..q)).collect();
        let mut m = Matrix::from_codes(field, d, entries).expect("codes in range");
        let det = m.det();
        if det == 0 {
            continue;
        }
        let inv = field.inv(det).expect("nonzero");
        for j in 0..d {
            let v = field.mul(m.get(0, j), inv);
            m.set(0, j, v);
        }
        return m;
    }
}
