//! Spectral and combinatorial expansion certificates for regular graphs.
//!
//! All spectra are of the normalized adjacency operator `Δ = A / degree`.
//! `lambda2` is the second-largest eigenvalue (signed).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{GraphKind, SparseGraph};
use crate::groups::{GroupElement, GroupTable};

/// Largest graph handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 6000;
/// Below this size [`lambda2_auto`] uses the dense solver.
pub const DENSE_AUTO_LIMIT: usize = 1500;
/// Largest graph for exhaustive subset scans.
pub const EXACT_LIMIT: usize = 24;
/// Largest graph whose diameter is computed from every source.
pub const ALL_SOURCES_LIMIT: usize = 100_000;
pub const DIAMETER_SAMPLES: usize = 64;
/// Largest group for the dense regular representation.
pub const CLASS_AVERAGE_LIMIT: usize = 2000;

const CHUNK: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("TooLargeForDense({0})")]
    TooLargeForDense(usize),
    #[error("TooLargeForExact({0})")]
    TooLargeForExact(usize),
    #[error("TooLarge({0})")]
    TooLarge(usize),
    #[error("Disconnected")]
    Disconnected,
    #[error("NoConvergence({0})")]
    NoConvergence(usize),
    #[error("element is not in the group table")]
    NotInGroup,
}

pub type Result<T> = std::result::Result<T, SpectralError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Lanczos,
    /// Disconnected graph detected by BFS; `lambda2 = 1` without a solve.
    Bfs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub n: usize,
    pub degree: usize,
    pub lambda2: f64,
    pub lambda_min: f64,
    pub gap: f64,
    pub method: Method,
    pub tol: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Explicit `‖Δx − λ₂x‖` for the returned Ritz vector; 0 for dense.
    pub residual: f64,
    pub connected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    pub tol: f64,
    /// Budget of operator applications.
    pub max_iter: usize,
    pub seed: u64,
    /// Maximum Krylov basis size between restarts.
    pub basis: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-10,
            max_iter: 20_000,
            seed: 0,
            basis: 48,
        }
    }
}

/// `y = Δx`; each row is summed sequentially so the result does not depend
/// on the thread count.
pub fn matvec(g: &SparseGraph, x: &[f64], y: &mut [f64]) {
    let deg = g.degree();
    let scale = 1.0 / deg as f64;
    let targets = g.targets();
    y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
        let base = c * CHUNK;
        for (i, yi) in out.iter_mut().enumerate() {
            let v = base + i;
            let row = &targets[v * deg..(v + 1) * deg];
            let s: f64 = row.iter().map(|&w| x[w as usize]).sum();
            *yi = s * scale;
        }
    });
}

/// Dot product with fixed-size chunk partial sums combined in order.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partial.into_iter().sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(y, x)| {
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi += alpha * xi;
            }
        });
}

fn scale(alpha: f64, x: &mut [f64]) {
    x.par_chunks_mut(CHUNK).for_each(|x| {
        for v in x {
            *v *= alpha;
        }
    });
}

fn remove_mean(x: &mut [f64]) {
    let n = x.len() as f64;
    let ones = vec![1.0; x.len()];
    let m = dot(x, &ones) / n;
    x.par_chunks_mut(CHUNK).for_each(|x| {
        for v in x {
            *v -= m;
        }
    });
}

/// Normalized adjacency as a dense matrix.
fn dense_operator(g: &SparseGraph) -> DMatrix<f64> {
    let n = g.n();
    let w = 1.0 / g.degree() as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        for &t in g.neighbors(v) {
            m[(v, t as usize)] += w;
        }
    }
    m
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// All eigenvalues of `Δ`, descending.
pub fn dense_spectrum(g: &SparseGraph) -> Result<Vec<f64>> {
    if g.n() > DENSE_LIMIT {
        return Err(SpectralError::TooLargeForDense(g.n()));
    }
    if g.n() == 0 {
        return Ok(Vec::new());
    }
    let m = dense_operator(g);
    Ok(sorted_desc(m.symmetric_eigenvalues().iter().copied().collect()))
}

/// Dense report; a one-vertex graph reports its single eigenvalue as both
/// `lambda2` and `lambda_min`.
pub fn dense_report(g: &SparseGraph) -> Result<SpectralReport> {
    let eig = dense_spectrum(g)?;
    let lambda2 = *eig.get(1).or(eig.first()).unwrap_or(&1.0);
    let lambda_min = *eig.last().unwrap_or(&1.0);
    Ok(SpectralReport {
        n: g.n(),
        degree: g.degree(),
        lambda2,
        lambda_min,
        gap: 1.0 - lambda2,
        method: Method::Dense,
        tol: 0.0,
        iterations: 0,
        seed: 0,
        residual: 0.0,
        connected: g.is_connected(),
    })
}

struct Extreme {
    value: f64,
    residual: f64,
    iterations: usize,
}

/// Largest eigenvalue of `sign·Δ` restricted to the complement of the
/// constant vector, by thick-restart Lanczos with full reorthogonalization.
fn lanczos_extreme(g: &SparseGraph, sign: f64, opts: &LanczosOptions) -> Result<Extreme> {
    let n = g.n();
    let dim = n - 1;
    let m = opts.basis.clamp(4, 1000).min(dim);
    let keep = (m / 2).max(1).min(m - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    remove_mean(&mut start);
    let nrm = dot(&start, &start).sqrt();
    scale(1.0 / nrm, &mut start);

    let apply = |x: &[f64], y: &mut [f64]| {
        matvec(g, x, y);
        if sign < 0.0 {
            scale(-1.0, y);
        }
        remove_mean(y);
    };

    let mut basis: Vec<Vec<f64>> = vec![start];
    // projected operator V^T M V, dense and symmetric
    let mut h = DMatrix::<f64>::zeros(m, m);
    let mut matvecs = 0usize;
    let mut w = vec![0.0; n];
    loop {
        let j0 = basis.len() - 1;
        let mut beta = 0.0;
        let mut size = m;
        for j in j0..m {
            apply(&basis[j], &mut w);
            matvecs += 1;
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    h[(i, j)] += c;
                    axpy(-c, v, &mut w);
                }
            }
            for i in 0..j {
                h[(j, i)] = h[(i, j)];
            }
            beta = dot(&w, &w).sqrt();
            if beta <= f64::EPSILON * 16.0 || j + 1 == m {
                size = j + 1;
                break;
            }
            let mut next = w.clone();
            scale(1.0 / beta, &mut next);
            basis.push(next);
        }

        let hs = h.view((0, 0), (size, size)).clone_owned();
        let eig = hs.symmetric_eigen();
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let top = order[0];
        let theta = eig.eigenvalues[top];
        let ritz_res = (beta * eig.eigenvectors[(size - 1, top)]).abs();
        let exhausted = beta <= f64::EPSILON * 16.0;

        if ritz_res <= opts.tol || exhausted {
            let mut x = vec![0.0; n];
            for (i, v) in basis.iter().take(size).enumerate() {
                axpy(eig.eigenvectors[(i, top)], v, &mut x);
            }
            let xn = dot(&x, &x).sqrt();
            scale(1.0 / xn, &mut x);
            let mut y = vec![0.0; n];
            apply(&x, &mut y);
            axpy(-theta, &x, &mut y);
            return Ok(Extreme {
                value: theta,
                residual: dot(&y, &y).sqrt(),
                iterations: matvecs,
            });
        }
        if matvecs >= opts.max_iter {
            return Err(SpectralError::NoConvergence(opts.max_iter));
        }

        // thick restart: keep the leading Ritz vectors plus the residual direction
        let mut residual_dir = w.clone();
        scale(1.0 / beta, &mut residual_dir);
        let mut kept: Vec<Vec<f64>> = Vec::with_capacity(keep + 1);
        let mut newh = DMatrix::<f64>::zeros(m, m);
        for (r, &idx) in order.iter().take(keep).enumerate() {
            let mut y = vec![0.0; n];
            for (i, v) in basis.iter().take(size).enumerate() {
                axpy(eig.eigenvectors[(i, idx)], v, &mut y);
            }
            newh[(r, r)] = eig.eigenvalues[idx];
            kept.push(y);
        }
        // couplings to the kept vectors are recomputed by the next column's
        // Gram-Schmidt coefficients
        for v in &kept {
            let c = dot(v, &residual_dir);
            axpy(-c, v, &mut residual_dir);
        }
        let rn = dot(&residual_dir, &residual_dir).sqrt();
        scale(1.0 / rn, &mut residual_dir);
        kept.push(residual_dir);
        basis = kept;
        h = newh;
    }
}

/// `λ₂` and `λ_min` by restarted Lanczos on `Δ` with the constant vector
/// projected out. Fails with `Disconnected` before any solve.
pub fn lanczos_lambda2(g: &SparseGraph, opts: &LanczosOptions) -> Result<SpectralReport> {
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    let n = g.n();
    if n <= 2 {
        let mut r = dense_report(g)?;
        r.method = Method::Lanczos;
        r.tol = opts.tol;
        r.seed = opts.seed;
        return Ok(r);
    }
    let top = lanczos_extreme(g, 1.0, opts)?;
    let bottom = lanczos_extreme(g, -1.0, opts)?;
    Ok(SpectralReport {
        n,
        degree: g.degree(),
        lambda2: top.value,
        lambda_min: -bottom.value,
        gap: 1.0 - top.value,
        method: Method::Lanczos,
        tol: opts.tol,
        iterations: top.iterations + bottom.iterations,
        seed: opts.seed,
        residual: top.residual,
        connected: true,
    })
}

/// Dense solve for small graphs, Lanczos otherwise. Disconnected graphs
/// report `lambda2 = 1` instead of failing.
pub fn lambda2_auto(g: &SparseGraph, opts: &LanczosOptions) -> Result<SpectralReport> {
    if g.n() <= DENSE_AUTO_LIMIT {
        let mut r = dense_report(g)?;
        r.seed = opts.seed;
        return Ok(r);
    }
    match lanczos_lambda2(g, opts) {
        Err(SpectralError::Disconnected) => Ok(SpectralReport {
            n: g.n(),
            degree: g.degree(),
            lambda2: 1.0,
            lambda_min: f64::NAN,
            gap: 0.0,
            method: Method::Bfs,
            tol: opts.tol,
            iterations: 0,
            seed: opts.seed,
            residual: 0.0,
            connected: false,
        }),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub epsilon_vertex: f64,
    pub h_edge: f64,
    /// Minimizer for `epsilon_vertex`.
    pub vertex_witness: Vec<usize>,
    /// Minimizer for `h_edge`.
    pub edge_witness: Vec<usize>,
    pub exact: bool,
    pub note: Option<String>,
}

/// Lexicographic order of the sorted member lists of two bitmasks.
fn lex_less(a: u32, b: u32) -> bool {
    let x = a ^ b;
    if x == 0 {
        return false;
    }
    let t = x.trailing_zeros();
    let above = |m: u32| t < 31 && (m >> (t + 1)) != 0;
    if a & (1 << t) != 0 {
        above(b)
    } else {
        !above(a)
    }
}

fn mask_members(m: u32) -> Vec<usize> {
    (0..32).filter(|&i| m & (1 << i) != 0).collect()
}

#[derive(Clone, Copy)]
struct Best {
    num: u64,
    den: u64,
    mask: u32,
}

impl Best {
    fn better(self, other: Best) -> Best {
        // compare num/den exactly
        let l = self.num as u128 * other.den as u128;
        let r = other.num as u128 * self.den as u128;
        if l < r || (l == r && lex_less(self.mask, other.mask)) {
            self
        } else {
            other
        }
    }
}

/// Exhaustive scan over all nonempty `A` with `|A| ≤ n/2`, computing the
/// vertex boundary ratio and the normalized edge boundary.
fn exhaustive(g: &SparseGraph) -> Result<(Best, Best)> {
    let n = g.n();
    if n > EXACT_LIMIT {
        return Err(SpectralError::TooLargeForExact(n));
    }
    if n < 2 {
        let b = Best { num: 0, den: 1, mask: 0 };
        return Ok((b, b));
    }
    let deg = g.degree() as u64;
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    // layers[v][c] holds the targets reached by at least c+1 parallel edges
    let layers: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            let mut count = [0u32; 32];
            for &w in g.neighbors(v) {
                count[w as usize] += 1;
            }
            let top = *count.iter().max().unwrap_or(&0);
            (1..=top)
                .map(|c| (0..n).fold(0u32, |m, w| if count[w] >= c { m | (1 << w) } else { m }))
                .collect()
        })
        .collect();
    let half = n / 2;
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let total = 1u64 << n;
    let chunk = 1u64 << 16;
    let worst = Best {
        num: u64::MAX / 2,
        den: 1,
        mask: full,
    };
    let results: Vec<(Best, Best)> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut bv = worst;
            let mut be = worst;
            for a in (c * chunk).max(1)..((c + 1) * chunk).min(total) {
                let a = a as u32;
                let size = a.count_ones() as u64;
                if size as usize > half {
                    continue;
                }
                let mut reach = 0u32;
                let mut internal = 0u64;
                let mut rest = a;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    reach |= nbr[v];
                    for layer in &layers[v] {
                        internal += (layer & a).count_ones() as u64;
                    }
                }
                let boundary = (reach & !a & full).count_ones() as u64;
                bv = bv.better(Best {
                    num: boundary,
                    den: size,
                    mask: a,
                });
                be = be.better(Best {
                    num: size * deg - internal,
                    den: size * deg,
                    mask: a,
                });
            }
            (bv, be)
        })
        .collect();
    Ok(results
        .into_iter()
        .fold((worst, worst), |(v, e), (bv, be)| (v.better(bv), e.better(be))))
}

/// Exact `ε` and `h` together, from one scan.
pub fn expansion_exact(g: &SparseGraph) -> Result<ExpansionReport> {
    let (v, e) = exhaustive(g)?;
    let note = (g.kind() == GraphKind::Cayley)
        .then(|| "Cayley graph: vertex-transitive, any singleton is equivalent".to_string());
    Ok(ExpansionReport {
        epsilon_vertex: v.num as f64 / v.den as f64,
        h_edge: e.num as f64 / e.den as f64,
        vertex_witness: mask_members(v.mask),
        edge_witness: mask_members(e.mask),
        exact: true,
        note,
    })
}

pub fn vertex_expansion_exact(g: &SparseGraph) -> Result<ExpansionReport> {
    expansion_exact(g)
}

pub fn edge_expansion_exact(g: &SparseGraph) -> Result<ExpansionReport> {
    expansion_exact(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub diameter: usize,
    /// False when only sampled sources were used (a lower bound).
    pub exact: bool,
    pub sources: usize,
}

fn eccentricity(g: &SparseGraph, s: usize) -> Result<usize> {
    let d = g.bfs(s);
    if d.contains(&u32::MAX) {
        return Err(SpectralError::Disconnected);
    }
    Ok(d.into_iter().max().unwrap_or(0) as usize)
}

/// Graph diameter. Cayley graphs are vertex-transitive, so one BFS from
/// vertex 0 is exact; other graphs use every source up to
/// [`ALL_SOURCES_LIMIT`] vertices and [`DIAMETER_SAMPLES`] seeded random
/// sources beyond it.
pub fn diameter(g: &SparseGraph, seed: u64) -> Result<DiameterReport> {
    if g.n() == 0 {
        return Ok(DiameterReport {
            diameter: 0,
            exact: true,
            sources: 0,
        });
    }
    let first = eccentricity(g, 0)?;
    if g.kind() == GraphKind::Cayley {
        return Ok(DiameterReport {
            diameter: first,
            exact: true,
            sources: 1,
        });
    }
    let n = g.n();
    let (sources, exact): (Vec<usize>, bool) = if n <= ALL_SOURCES_LIMIT {
        ((1..n).collect(), true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (
            (1..DIAMETER_SAMPLES).map(|_| rng.gen_range(0..n)).collect(),
            false,
        )
    };
    let rest = sources
        .par_iter()
        .map(|&s| eccentricity(g, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiameterReport {
        diameter: rest.into_iter().fold(first, usize::max),
        exact,
        sources: sources.len() + 1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAverageReport {
    pub group_order: usize,
    pub class_size: usize,
    /// True when the class is not closed under inverses and the average
    /// with the inverse class was used.
    pub symmetrized: bool,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// `(value, multiplicity)` after merging eigenvalues within 1e-8.
    pub distinct: Vec<(f64, usize)>,
}

/// Conjugacy class of `rep` in the enumerated group, as table indices.
pub fn conjugacy_class(table: &GroupTable, rep: &GroupElement) -> Result<Vec<usize>> {
    table.index_of(rep).ok_or(SpectralError::NotInGroup)?;
    let mut class: Vec<usize> = table
        .elements()
        .par_iter()
        .map(|g| table.index_of(&rep.conjugate_by(g)).ok_or(SpectralError::NotInGroup))
        .collect::<Result<_>>()?;
    class.sort_unstable();
    class.dedup();
    Ok(class)
}

/// Spectrum of the class average `L = (1/|C|) Σ_{s∈C} s` on the regular
/// representation of the enumerated group.
pub fn class_average_spectrum(table: &GroupTable, rep: &GroupElement) -> Result<ClassAverageReport> {
    let n = table.order();
    if n > CLASS_AVERAGE_LIMIT {
        return Err(SpectralError::TooLarge(n));
    }
    let class = conjugacy_class(table, rep)?;
    let inv_class = conjugacy_class(table, &rep.inverse())?;
    let symmetrized = class != inv_class;
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut add_class = |cls: &[usize], w: f64| -> Result<()> {
        for &s in cls {
            let s = table.element(s);
            for x in 0..n {
                let y = table
                    .index_of(&s.mul(table.element(x)))
                    .ok_or(SpectralError::NotInGroup)?;
                m[(y, x)] += w;
            }
        }
        Ok(())
    };
    if symmetrized {
        let w = 0.5 / class.len() as f64;
        add_class(&class, w)?;
        add_class(&inv_class, w)?;
    } else {
        add_class(&class, 1.0 / class.len() as f64)?;
    }
    let eigenvalues = sorted_desc(m.symmetric_eigenvalues().iter().copied().collect());
    let mut distinct: Vec<(f64, usize)> = Vec::new();
    for &e in &eigenvalues {
        match distinct.last_mut() {
            Some((v, c)) if (*v - e).abs() <= 1e-8 => *c += 1,
            _ => distinct.push((e, 1)),
        }
    }
    Ok(ClassAverageReport {
        group_order: n,
        class_size: class.len(),
        symmetrized,
        eigenvalues,
        distinct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{build_cayley, GraphKind, SparseGraph};
    use crate::ffield::Field;
    use crate::gensets::{self, GeneratingSet};
    use crate::groups::{enumerate_group, GroupHandle, Perm, DEFAULT_CAP};

    fn k3() -> SparseGraph {
        SparseGraph::from_rows(
            vec![vec![(1, 0), (2, 1)], vec![(2, 0), (0, 1)], vec![(0, 0), (1, 1)]],
            2,
            GraphKind::Cayley,
        )
        .unwrap()
    }

    fn cycle(n: usize) -> SparseGraph {
        let rows = (0..n)
            .map(|v| vec![(((v + 1) % n) as u32, 0), (((v + n - 1) % n) as u32, 1)])
            .collect();
        SparseGraph::from_rows(rows, 2, GraphKind::Schreier).unwrap()
    }

    fn two_triangles() -> SparseGraph {
        let rows = (0..6)
            .map(|v| {
                let b = v / 3 * 3;
                vec![((b + (v + 1) % 3) as u32, 0), ((b + (v + 2) % 3) as u32, 1)]
            })
            .collect();
        SparseGraph::from_rows(rows, 2, GraphKind::Schreier).unwrap()
    }

    fn sl2(p: u64) -> SparseGraph {
        let f = Field::prime(p).unwrap();
        build_cayley(&gensets::sl2_standard(&f), DEFAULT_CAP).unwrap().graph
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dense_small_spectra() {
        let e = dense_spectrum(&k3()).unwrap();
        assert!(close(e[0], 1.0, 1e-12) && close(e[1], -0.5, 1e-12) && close(e[2], -0.5, 1e-12));

        let set = GeneratingSet::new(
            GroupHandle::sym(3),
            [&[0u32, 1][..], &[1, 2], &[0, 2]]
                .iter()
                .enumerate()
                .map(|(i, c)| (format!("t{i}"), Perm::from_cycles(3, &[c]).unwrap().into()))
                .collect(),
        )
        .unwrap();
        let k33 = build_cayley(&set, DEFAULT_CAP).unwrap().graph;
        let e = dense_spectrum(&k33).unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0, 0.0, -1.0];
        for (a, b) in e.iter().zip(expected) {
            assert!(close(*a, b, 1e-12), "{e:?}");
        }

        let lone = SparseGraph::from_rows(vec![vec![(0, 0)]], 1, GraphKind::Cayley).unwrap();
        assert_eq!(dense_spectrum(&lone).unwrap(), vec![1.0]);
    }

    #[test]
    fn cycle_spectrum_matches_cosines() {
        let n = 10;
        let e = dense_spectrum(&cycle(n)).unwrap();
        let mut oracle: Vec<f64> = (0..n)
            .map(|j| (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in e.iter().zip(&oracle) {
            assert!(close(*a, *b, 1e-12));
        }
        let r = lanczos_lambda2(&cycle(n), &LanczosOptions::default()).unwrap();
        assert!(close(r.lambda2, oracle[1], 1e-10));
        assert!(close(r.lambda_min, -1.0, 1e-10));
    }

    #[test]
    fn lanczos_matches_dense() {
        let g = sl2(5);
        let dense = dense_report(&g).unwrap();
        let lz = lanczos_lambda2(&g, &LanczosOptions::default()).unwrap();
        assert!(close(dense.lambda2, lz.lambda2, 1e-8), "{dense:?} {lz:?}");
        assert!(close(dense.lambda_min, lz.lambda_min, 1e-8));
        assert!(lz.residual <= 1e-8);
        let k = lanczos_lambda2(&k3(), &LanczosOptions::default()).unwrap();
        assert!(close(k.lambda2, -0.5, 1e-10));
    }

    #[test]
    fn lanczos_is_deterministic() {
        let g = sl2(7);
        let opts = LanczosOptions {
            seed: 11,
            ..Default::default()
        };
        let a = lanczos_lambda2(&g, &opts).unwrap();
        let b = lanczos_lambda2(&g, &opts).unwrap();
        assert_eq!(a.lambda2.to_bits(), b.lambda2.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn lanczos_small_restart_budget_still_converges() {
        let g = sl2(7);
        let opts = LanczosOptions {
            basis: 6,
            ..Default::default()
        };
        let lz = lanczos_lambda2(&g, &opts).unwrap();
        let dense = dense_report(&g).unwrap();
        assert!(close(dense.lambda2, lz.lambda2, 1e-8));
    }

    #[test]
    fn lanczos_reports_failure_modes() {
        assert_eq!(
            lanczos_lambda2(&two_triangles(), &LanczosOptions::default()).unwrap_err(),
            SpectralError::Disconnected
        );
        let opts = LanczosOptions {
            max_iter: 3,
            basis: 4,
            tol: 1e-14,
            ..Default::default()
        };
        assert_eq!(
            lanczos_lambda2(&cycle(200), &opts).unwrap_err(),
            SpectralError::NoConvergence(3)
        );
        let r = lambda2_auto(&two_triangles(), &LanczosOptions::default()).unwrap();
        assert!(!r.connected);
        assert!(close(r.lambda2, 1.0, 1e-12));
    }

    #[test]
    fn expansion_examples() {
        let r = expansion_exact(&k3()).unwrap();
        assert_eq!(r.epsilon_vertex, 2.0);
        assert_eq!(r.h_edge, 1.0);
        assert_eq!(r.vertex_witness, vec![0]);

        let r = expansion_exact(&two_triangles()).unwrap();
        assert_eq!(r.epsilon_vertex, 0.0);
        assert_eq!(r.h_edge, 0.0);
        assert_eq!(r.vertex_witness, vec![0, 1, 2]);

        let r = expansion_exact(&cycle(8)).unwrap();
        // arc of 4 vertices has 2 boundary vertices and 2 cut edges
        assert_eq!(r.epsilon_vertex, 0.5);
        assert_eq!(r.h_edge, 0.25);
        assert_eq!(r.vertex_witness, vec![0, 1, 2, 3]);

        assert_eq!(
            expansion_exact(&cycle(25)).unwrap_err(),
            SpectralError::TooLargeForExact(25)
        );
    }

    /// Independent brute force over explicit vertex lists.
    fn brute_h(g: &SparseGraph) -> f64 {
        let n = g.n();
        let mut best = f64::INFINITY;
        for a in 1u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|&i| a & (1 << i) != 0).collect();
            if members.len() > n / 2 {
                continue;
            }
            let cut = members
                .iter()
                .flat_map(|&v| g.neighbors(v).iter())
                .filter(|&&w| a & (1 << w) == 0)
                .count();
            best = best.min(cut as f64 / (g.degree() * members.len()) as f64);
        }
        best
    }

    #[test]
    fn cheeger_sl2_f2() {
        let g = sl2(2);
        assert_eq!(g.n(), 6);
        let lambda2 = dense_report(&g).unwrap().lambda2;
        let h = expansion_exact(&g).unwrap().h_edge;
        assert!(close(h, brute_h(&g), 1e-15));
        assert!((1.0 - lambda2) / 2.0 <= h + 1e-12);
        assert!(h <= (2.0 * (1.0 - lambda2)).sqrt() + 1e-12);
    }

    #[test]
    fn lex_order_of_masks() {
        let all: Vec<u32> = (1..64).collect();
        for &a in &all {
            for &b in &all {
                assert_eq!(lex_less(a, b), mask_members(a) < mask_members(b), "{a} {b}");
            }
        }
    }

    #[test]
    fn diameters() {
        assert_eq!(diameter(&k3(), 0).unwrap().diameter, 1);
        assert_eq!(diameter(&cycle(9), 0).unwrap().diameter, 4);
        let d = diameter(&sl2(5), 0).unwrap();
        assert!(d.exact);
        assert!((d.diameter as f64) <= 3.0 * 120f64.log2());
        // vertex-transitivity: every source has the same eccentricity
        let g = sl2(5);
        for s in [1, 17, 119] {
            assert_eq!(eccentricity(&g, s).unwrap(), d.diameter);
        }
        assert_eq!(
            diameter(&two_triangles(), 0).unwrap_err(),
            SpectralError::Disconnected
        );
    }

    fn perm_group(n: usize, gens: &[&[&[u32]]]) -> GroupTable {
        let gens: Vec<GroupElement> = gens
            .iter()
            .map(|c| Perm::from_cycles(n, c).unwrap().into())
            .collect();
        enumerate_group(&gens, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn class_average_sym3() {
        let t = perm_group(3, &[&[&[0, 1]], &[&[0, 1, 2]]]);
        let r = class_average_spectrum(&t, &Perm::from_cycles(3, &[&[0, 1]]).unwrap().into())
            .unwrap();
        assert_eq!(r.class_size, 3);
        assert!(!r.symmetrized);
        let values: Vec<(i64, usize)> = r
            .distinct
            .iter()
            .map(|&(v, c)| ((v * 1e6).round() as i64, c))
            .collect();
        assert_eq!(values, vec![(1_000_000, 1), (0, 4), (-1_000_000, 1)]);

        let id = class_average_spectrum(&t, &Perm::identity(3).into()).unwrap();
        assert!(id.eigenvalues.iter().all(|&e| close(e, 1.0, 1e-12)));
    }

    #[test]
    fn class_average_alt5() {
        let t = perm_group(5, &[&[&[0, 1, 2]], &[&[0, 1, 2, 3, 4]]]);
        assert_eq!(t.order(), 60);
        let r = class_average_spectrum(&t, &Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap().into())
            .unwrap();
        assert_eq!(r.class_size, 12);
        assert!(r.distinct.len() <= 5);
        // multiplicities are sums of squares of irreducible degrees 1,3,3,4,5
        let total: usize = r.distinct.iter().map(|d| d.1).sum();
        assert_eq!(total, 60);
        for &(v, _) in &r.distinct {
            assert!((-1.0 - 1e-10..=1.0 + 1e-10).contains(&v));
        }
    }

    #[test]
    fn class_average_nonself_inverse_class() {
        // in Alt(4) the 3-cycles split into two classes swapped by inversion
        let t = perm_group(4, &[&[&[0, 1, 2]], &[&[1, 2, 3]]]);
        assert_eq!(t.order(), 12);
        let r = class_average_spectrum(&t, &Perm::from_cycles(4, &[&[0, 1, 2]]).unwrap().into())
            .unwrap();
        assert!(r.symmetrized);
        assert_eq!(r.class_size, 4);
        assert!(close(r.eigenvalues[0], 1.0, 1e-10));
    }
}
