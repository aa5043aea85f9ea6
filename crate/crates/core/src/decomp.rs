//! Bounded products of subgroups and bounded elementary generation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::Field;
use crate::gensets::{alt_generators, elementary_set};
use crate::groups::{enumerate_group, GroupElement, GroupError, GroupHandle, GroupTable, Perm};
use crate::matrix::Matrix;

/// Largest group handled by the exact product-set computation.
pub const PRODUCT_LIMIT: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum DecompError {
    #[error(transparent)]
    Group(GroupError),
    #[error("CapExceeded({0})")]
    CapExceeded(usize),
    #[error("NotCovered({0})")]
    NotCovered(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl From<GroupError> for DecompError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::CapExceeded(c) => DecompError::CapExceeded(c),
            other => DecompError::Group(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, DecompError>;

/// A subgroup given by generators; its elements are enumerated on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub generators: Vec<GroupElement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorInfo {
    pub label: String,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub target: GroupHandle,
    pub target_order: usize,
    pub factors: Vec<FactorInfo>,
    /// Number of factors in the shortest covering product, cycling through
    /// the factor list.
    pub depth: Option<usize>,
    /// `|K_1 ⋯ K_t| / |G|` for `t = 1, 2, ..`.
    pub coverage_by_round: Vec<f64>,
    /// Maximum root-subgroup word length (elementary mode).
    pub max_word_length: Option<usize>,
    /// Maximum word length in single elementary matrices `E_ij(±1)`, for
    /// prime fields.
    pub max_single_word_length: Option<usize>,
    pub exact: bool,
}

/// Smallest `t` with `K_1 K_2 ⋯ K_t = G`, cycling the factor list. Each
/// round multiplies the current product set on the right by the next factor,
/// skipping elements whose coset is already covered. Fails with
/// `NotCovered` once a full cycle of factors adds nothing or `max_rounds`
/// is reached.
pub fn product_cover_depth(
    table: &GroupTable,
    target: &GroupHandle,
    factors: &[Factor],
    max_rounds: usize,
    cap: usize,
) -> Result<DecompositionReport> {
    if factors.is_empty() {
        return Err(DecompError::InvalidParameter("no factors".into()));
    }
    let n = table.order();
    if n > PRODUCT_LIMIT {
        return Err(DecompError::CapExceeded(PRODUCT_LIMIT));
    }
    let mut factor_elems: Vec<Vec<GroupElement>> = Vec::with_capacity(factors.len());
    let mut infos = Vec::with_capacity(factors.len());
    for f in factors {
        let t = enumerate_group(&f.generators, cap)?;
        for g in t.elements() {
            if table.index_of(g).is_none() {
                return Err(DecompError::InvalidParameter(format!(
                    "factor {} is not contained in the target",
                    f.label
                )));
            }
        }
        infos.push(FactorInfo {
            label: f.label.clone(),
            order: t.order(),
        });
        factor_elems.push(t.elements().to_vec());
    }

    let mut covered = vec![false; n];
    let mut count = 0usize;
    for g in &factor_elems[0] {
        let i = table.index_of(g).expect("checked above");
        if !covered[i] {
            covered[i] = true;
            count += 1;
        }
    }
    let mut coverage = vec![count as f64 / n as f64];
    let mut flat = 0usize;
    let mut round = 1usize;
    while count < n {
        if round >= max_rounds || flat >= factors.len() {
            return Err(DecompError::NotCovered(round));
        }
        let k = &factor_elems[round % factors.len()];
        let mut next = vec![false; n];
        let mut done = vec![false; n];
        let mut next_count = 0usize;
        for x in 0..n {
            if !covered[x] || done[x] {
                continue;
            }
            let gx = table.element(x);
            for h in k {
                let y = table.index_of(&gx.mul(h)).expect("closed under the target");
                // y K = x K, so y need not be expanded again
                done[y] = true;
                if !next[y] {
                    next[y] = true;
                    next_count += 1;
                }
            }
        }
        flat = if next_count == count { flat + 1 } else { 0 };
        covered = next;
        count = next_count;
        coverage.push(count as f64 / n as f64);
        round += 1;
    }
    Ok(DecompositionReport {
        target: target.clone(),
        target_order: n,
        factors: infos,
        depth: Some(coverage.len()),
        coverage_by_round: coverage,
        max_word_length: None,
        max_single_word_length: None,
        exact: true,
    })
}

/// Root subgroup `{E_ij(α)}` of `SL_d(F_q)` minus the identity.
pub fn root_subgroup(field: &Field, d: usize, i: usize, j: usize) -> Vec<GroupElement> {
    (1..field.order())
        .map(|a| GroupElement::Matrix(Matrix::elementary(field, d, i, j, a)))
        .collect()
}

/// Copies of `SL_b(F_q)` on every `b`-subset of coordinates, in lexicographic
/// order of the subsets.
pub fn subset_factors(field: &Field, d: usize, b: usize) -> Vec<Factor> {
    let gens = elementary_set(b, field).group_elements();
    combinations(d, b)
        .into_iter()
        .map(|pos| Factor {
            label: format!("SL{b}{:?}", pos.iter().map(|p| p + 1).collect::<Vec<_>>()),
            generators: gens
                .iter()
                .map(|g| GroupElement::Matrix(g.as_matrix().unwrap().place(d, &pos)))
                .collect(),
        })
        .collect()
}

/// The top-left and bottom-right diagonal copies of `SL_b(F_q)`.
pub fn block_factors(field: &Field, d: usize, b: usize) -> Vec<Factor> {
    let gens = elementary_set(b, field).group_elements();
    let mut out = Vec::new();
    for (name, start) in [("top-left", 0), ("bottom-right", d - b)] {
        let pos: Vec<usize> = (start..start + b).collect();
        if out.iter().any(|f: &Factor| f.label.ends_with(&format!("{pos:?}"))) {
            continue;
        }
        out.push(Factor {
            label: format!("SL{b} {name} {pos:?}"),
            generators: gens
                .iter()
                .map(|g| GroupElement::Matrix(g.as_matrix().unwrap().place(d, &pos)))
                .collect(),
        });
    }
    out
}

/// All root subgroups `U_ij`, positions in lexicographic order.
pub fn root_factors(field: &Field, d: usize) -> Vec<Factor> {
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                out.push(Factor {
                    label: format!("U{}{}", i + 1, j + 1),
                    generators: root_subgroup(field, d, i, j),
                });
            }
        }
    }
    out
}

/// Conjugate of a factor by `g`: generators `g^-1 x g`.
pub fn conjugate_factor(f: &Factor, g: &GroupElement, label: &str) -> Factor {
    Factor {
        label: label.to_string(),
        generators: f.generators.iter().map(|x| x.conjugate_by(g)).collect(),
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Maximum over `SL_d(F_q)` of the shortest word length when each step is an
/// arbitrary element of one root subgroup. For prime `q` the length in
/// single elementary matrices `E_ij(±1)` is reported too.
pub fn elementary_word_length_max(d: usize, field: &Field, cap: usize) -> Result<DecompositionReport> {
    let cap = cap.min(PRODUCT_LIMIT);
    let roots: Vec<GroupElement> = (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .flat_map(|(i, j)| root_subgroup(field, d, i, j))
        .collect();
    let table = enumerate_group(&roots, cap)?;
    let single = if field.is_prime_field() {
        let t = enumerate_group(&elementary_set(d, field).group_elements(), cap)?;
        Some(t.radius())
    } else {
        None
    };
    Ok(DecompositionReport {
        target: GroupHandle::sl(d, field.spec()),
        target_order: table.order(),
        factors: root_factors(field, d)
            .into_iter()
            .map(|f| FactorInfo {
                label: f.label,
                order: field.order() as usize,
            })
            .collect(),
        depth: None,
        coverage_by_round: Vec::new(),
        max_word_length: Some(table.radius()),
        max_single_word_length: single,
        exact: true,
    })
}

/// One root-subgroup letter `E_ij(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootStep {
    pub i: usize,
    pub j: usize,
    pub alpha: u64,
}

/// Upper bound on [`reduction_writer`] word length for `d × d` input.
pub fn reduction_bound(d: usize) -> usize {
    d * d + 4 * d
}

/// Writes a determinant-one matrix as a product of elementary matrices by
/// row reduction to the identity. Each column takes at most two steps to
/// make the pivot 1 and `d - 1` to clear, so the length is at most
/// `(d-1)(d+2)`.
pub fn reduction_writer(g: &Matrix) -> Result<Vec<RootStep>> {
    let f = g.field().clone();
    let d = g.n();
    if g.det() != 1 {
        return Err(DecompError::InvalidParameter("determinant is not 1".into()));
    }
    let mut m = g.clone();
    let mut ops: Vec<RootStep> = Vec::new();
    // row_i += alpha * row_j, recorded
    let mut add_row = |m: &mut Matrix, i: usize, j: usize, alpha: u64| {
        for c in 0..d {
            let v = f.add(m.get(i, c), f.mul(alpha, m.get(j, c)));
            m.set(i, c, v);
        }
        ops.push(RootStep { i, j, alpha });
    };
    for c in 0..d {
        if c + 1 < d {
            if m.get(c, c) == 0 {
                let r = (c + 1..d)
                    .find(|&r| m.get(r, c) != 0)
                    .expect("invertible matrix has a pivot");
                add_row(&mut m, c, r, 1);
            }
            let a = m.get(c, c);
            if a != 1 {
                let r = match (c + 1..d).find(|&r| m.get(r, c) != 0) {
                    Some(r) => r,
                    None => {
                        add_row(&mut m, c + 1, c, 1);
                        c + 1
                    }
                };
                let alpha = f.div(f.sub(1, a), m.get(r, c)).expect("nonzero");
                add_row(&mut m, c, r, alpha);
            }
        }
        debug_assert_eq!(m.get(c, c), 1);
        for i in 0..d {
            let v = m.get(i, c);
            if i != c && v != 0 {
                add_row(&mut m, i, c, f.neg(v));
            }
        }
    }
    debug_assert!(m.is_identity());
    // L_t ⋯ L_1 g = I, so g = L_1^-1 ⋯ L_t^-1
    Ok(ops
        .into_iter()
        .map(|s| RootStep {
            alpha: g.field().neg(s.alpha),
            ..s
        })
        .collect())
}

/// Product of the letters, left to right.
pub fn recompose(field: &Field, d: usize, word: &[RootStep]) -> Matrix {
    word.iter().fold(Matrix::identity(field, d), |acc, s| {
        acc.mul(&Matrix::elementary(field, d, s.i, s.j, s.alpha))
    })
}

/// Windows `[0, n_k)`, `[n - n_k, n)` and the centred one, deduplicated.
pub fn default_windows(n: usize, n_k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mid = (n - n_k) / 2;
    for start in [0, n - n_k, mid] {
        let w: Vec<usize> = (start..start + n_k).collect();
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// `Alt(n_k)` acting on the given points of `{0..n}`.
pub fn alt_window_factor(n: usize, window: &[usize]) -> Factor {
    let local = alt_generators(window.len());
    let generators = local
        .group_elements()
        .iter()
        .map(|g| {
            let p = g.as_perm().unwrap();
            let mut images: Vec<u32> = (0..n as u32).collect();
            for (a, &pt) in window.iter().enumerate() {
                images[pt] = window[p.apply(a)] as u32;
            }
            GroupElement::Perm(Perm::new(images).expect("window permutation"))
        })
        .collect();
    Factor {
        label: format!("Alt{window:?}"),
        generators,
    }
}

/// Cover depth of `Alt(n)` by copies of `Alt(n_k)` on overlapping windows.
/// Exact only: `Alt(n)` must be enumerable within `cap`.
pub fn alt_product_cover(
    n: usize,
    windows: &[Vec<usize>],
    max_rounds: usize,
    cap: usize,
) -> Result<DecompositionReport> {
    if windows.iter().flatten().any(|&p| p >= n) {
        return Err(DecompError::InvalidParameter("window point out of range".into()));
    }
    let target = GroupHandle::alt(n);
    let order = target.closed_form_order().unwrap_or(u128::MAX);
    if order > cap.min(PRODUCT_LIMIT) as u128 {
        return Err(DecompError::CapExceeded(cap.min(PRODUCT_LIMIT)));
    }
    let table = if n < 3 {
        enumerate_group(&[GroupElement::Perm(Perm::identity(n))], cap)?
    } else {
        enumerate_group(&alt_generators(n).group_elements(), cap)?
    };
    let factors: Vec<Factor> = windows
        .iter()
        .map(|w| {
            let mut f = alt_window_factor(n, w);
            if f.generators.is_empty() {
                f.generators.push(GroupElement::Perm(Perm::identity(n)));
            }
            f
        })
        .collect();
    product_cover_depth(&table, &target, &factors, max_rounds, cap)
}
