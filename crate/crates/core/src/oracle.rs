//! Brute-force ground truth for the counting formulas.
//!
//! The gauge group `H(Λ) × H(Γ)` acts on σ-tuples by `σ_c ↦ η_c ∘ σ_c ∘ π_c`,
//! where `π_c` is `π` restricted to the colored section `V|c` (and likewise for
//! `η`). Orbits are counted twice: by explicit union-find over the whole
//! σ-space, and by Burnside's lemma over the group.

use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::colored::{
    materialize, Color, ColorType, ColoredBipartiteGraph, ContractionSpec, Edge, SigmaTuple,
    Skeleton, VertexLayout,
};
use crate::counting::{sigma_space_size, symmetry_group_order};
use crate::error::{Error, Result};

/// Default cap on the number of σ-tuples or group elements the oracle visits.
pub const DEFAULT_BOUND: u64 = 1_000_000;

/// Size guards for the exhaustive computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum `Π_c m_c!` for [`count_orbits_bruteforce`].
    pub sigma_space: u64,
    /// Maximum group order for [`enumerate_symmetry_group`] and Burnside.
    pub group: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            sigma_space: DEFAULT_BOUND,
            group: DEFAULT_BOUND,
        }
    }
}

impl Limits {
    pub fn uniform(bound: u64) -> Self {
        Self {
            sigma_space: bound,
            group: bound,
        }
    }
}

fn guard(size: BigUint, bound: u64) -> Result<u64> {
    match size.to_u64() {
        Some(s) if s <= bound => Ok(s),
        _ => Err(Error::TooLarge {
            size: size.to_string(),
            bound,
        }),
    }
}

/// A permutation of one side's vertex ids that maps every type class to itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetryGroupElement {
    perm: Vec<usize>,
}

impl SymmetryGroupElement {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    /// Checks that `perm` is a permutation preserving the type classes of `layout`.
    pub fn new(layout: &VertexLayout, perm: Vec<usize>) -> Result<Self> {
        let bad = Error::BadGroupElement;
        if perm.len() != layout.len() {
            return Err(bad(format!(
                "group element has {} entries for {} vertices",
                perm.len(),
                layout.len()
            )));
        }
        let mut seen = vec![false; perm.len()];
        for (v, &w) in perm.iter().enumerate() {
            if w >= perm.len() || std::mem::replace(&mut seen[w], true) {
                return Err(bad(format!("entry {w} repeated or out of range")));
            }
            if layout.type_of(v) != layout.type_of(w) {
                return Err(bad(format!(
                    "vertex {v} of type {} sent to vertex {w} of type {}",
                    layout.type_of(v),
                    layout.type_of(w)
                )));
            }
        }
        Ok(Self { perm })
    }

    /// A uniformly random element of the group of `layout`.
    pub fn random<R: Rng + ?Sized>(layout: &VertexLayout, rng: &mut R) -> Self {
        let mut g = Self::identity(layout.len());
        for (_, r) in layout.blocks() {
            g.perm[r.clone()].shuffle(rng);
        }
        g
    }

    /// Image of every vertex id.
    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            perm: other.perm.iter().map(|&v| self.perm[v]).collect(),
        }
    }

    /// Restriction to the section `V|c`, in section coordinates.
    pub fn restrict(&self, layout: &VertexLayout, c: Color) -> Vec<usize> {
        layout
            .section(c)
            .iter()
            .map(|&v| layout.position(self.perm[v], c).expect("type preserved"))
            .collect()
    }
}

/// All permutations of `0..n` in lexicographic order.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Every element of `H` for one side, as a product of symmetric groups on the
/// type classes. The first class varies slowest.
pub fn enumerate_symmetry_group(layout: &VertexLayout, bound: u64) -> Result<Vec<SymmetryGroupElement>> {
    let order: BigUint = layout
        .blocks()
        .iter()
        .map(|(_, r)| crate::partitions::factorial(r.len() as u64))
        .product();
    guard(order, bound)?;
    let mut out = vec![SymmetryGroupElement::identity(layout.len())];
    for (_, range) in layout.blocks() {
        let local = all_permutations(range.len());
        out = out
            .into_iter()
            .flat_map(|g| {
                local.iter().map(move |p| {
                    let mut perm = g.perm.clone();
                    for (i, &j) in p.iter().enumerate() {
                        perm[range.start + i] = range.start + j;
                    }
                    SymmetryGroupElement { perm }
                })
            })
            .collect();
    }
    Ok(out)
}

/// `(π, η) · σ`, with `π ∈ H(Λ)` and `η ∈ H(Γ)`.
pub fn act(
    skeleton: &Skeleton,
    pi: &SymmetryGroupElement,
    eta: &SymmetryGroupElement,
    sigma: &SigmaTuple,
) -> SigmaTuple {
    let maps = skeleton
        .colors()
        .map(|c| {
            let p = pi.restrict(skeleton.white(), c);
            let e = eta.restrict(skeleton.black(), c);
            compose_section(&e, sigma.color(c), &p)
        })
        .collect();
    SigmaTuple::from_arrays(maps)
}

// e ∘ s ∘ p on section coordinates
fn compose_section(e: &[usize], s: &[usize], p: &[usize]) -> Vec<usize> {
    p.iter().map(|&k| e[s[k]]).collect()
}

/// Lexicographic rank of a permutation of `0..n`.
fn lehmer_rank(p: &[usize]) -> u64 {
    let n = p.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count() as u64;
        rank = rank * (n - i) as u64 + smaller;
    }
    rank
}

fn lehmer_unrank(mut rank: u64, n: usize) -> Vec<usize> {
    let mut digits = vec![0usize; n];
    for i in (0..n).rev() {
        let base = (n - i) as u64;
        digits[i] = (rank % base) as usize;
        rank /= base;
    }
    let mut pool: Vec<usize> = (0..n).collect();
    digits.into_iter().map(|k| pool.remove(k)).collect()
}

/// Mixed-radix indexing of the σ-space with color 1 most significant, so that
/// rank order equals the lexicographic order on [`SigmaTuple`].
struct SigmaIndex {
    sizes: Vec<usize>,
    radix: Vec<u64>,
}

impl SigmaIndex {
    fn new(skeleton: &Skeleton) -> Self {
        let sizes: Vec<usize> = skeleton.colors().map(|c| skeleton.multiplicity(c)).collect();
        let radix = sizes
            .iter()
            .map(|&m| (1..=m as u64).product::<u64>())
            .collect();
        Self { sizes, radix }
    }

    fn rank(&self, sigma: &SigmaTuple) -> u64 {
        sigma
            .arrays()
            .iter()
            .zip(&self.radix)
            .fold(0, |acc, (m, &r)| acc * r + lehmer_rank(m))
    }

    fn unrank(&self, mut rank: u64) -> SigmaTuple {
        let mut maps = vec![Vec::new(); self.sizes.len()];
        for i in (0..self.sizes.len()).rev() {
            maps[i] = lehmer_unrank(rank % self.radix[i], self.sizes[i]);
            rank /= self.radix[i];
        }
        SigmaTuple::from_arrays(maps)
    }
}

/// The orbits of the gauge action, each with its canonical representative.
#[derive(Clone, Debug)]
pub struct OrbitCatalog {
    skeleton: Arc<Skeleton>,
    /// Lexicographically smallest tuple of each orbit, in increasing order.
    pub representatives: Vec<SigmaTuple>,
    /// Number of tuples in each orbit, aligned with `representatives`.
    pub sizes: Vec<u64>,
}

impl OrbitCatalog {
    pub fn count(&self) -> BigUint {
        BigUint::from(self.representatives.len())
    }

    pub fn skeleton(&self) -> &Arc<Skeleton> {
        &self.skeleton
    }

    pub fn spec(&self) -> &ContractionSpec {
        self.skeleton.spec()
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

// Restrictions of a group element to every color, one entry per color.
type Restricted = Vec<Vec<usize>>;

fn restrict_all(skeleton: &Skeleton, layout: &VertexLayout, g: &SymmetryGroupElement) -> Restricted {
    skeleton.colors().map(|c| g.restrict(layout, c)).collect()
}

// Adjacent transpositions inside each type class generate H for one side.
fn generators(skeleton: &Skeleton, layout: &VertexLayout) -> Vec<Restricted> {
    let mut out = Vec::new();
    for (_, range) in layout.blocks() {
        for v in range.start..range.end.saturating_sub(1) {
            let mut g = SymmetryGroupElement::identity(layout.len());
            g.perm.swap(v, v + 1);
            out.push(restrict_all(skeleton, layout, &g));
        }
    }
    out
}

/// Partitions the full σ-space into orbits.
///
/// Orbits are the connected components of the graph linking `σ` to its images
/// under the generators of `H(Λ) × H(Γ)`; edges are produced in parallel and
/// merged serially.
pub fn count_orbits_bruteforce(spec: &ContractionSpec, limits: Limits) -> Result<OrbitCatalog> {
    let total = guard(sigma_space_size(spec), limits.sigma_space)?;
    let skeleton = Arc::new(materialize(spec));
    let index = SigmaIndex::new(&skeleton);
    let d = skeleton.d() as usize;
    let ident: Vec<Vec<usize>> = (0..d).map(|i| (0..index.sizes[i]).collect()).collect();
    // (white restriction, black restriction) per generator
    let gens: Vec<(Restricted, Restricted)> = generators(&skeleton, skeleton.white())
        .into_iter()
        .map(|p| (p, ident.clone()))
        .chain(
            generators(&skeleton, skeleton.black())
                .into_iter()
                .map(|e| (ident.clone(), e)),
        )
        .collect();

    let mut uf = UnionFind::<usize>::new(total as usize);
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<u64> = (0..total).step_by(CHUNK as usize).collect();
    for batch in chunks.chunks(64) {
        let edges: Vec<Vec<(usize, usize)>> = batch
            .par_iter()
            .map(|&start| {
                let mut local = Vec::new();
                for r in start..(start + CHUNK).min(total) {
                    let sigma = index.unrank(r);
                    for (p, e) in &gens {
                        let maps = (0..d)
                            .map(|i| compose_section(&e[i], &sigma.arrays()[i], &p[i]))
                            .collect();
                        let image = index.rank(&SigmaTuple::from_arrays(maps));
                        if image != r {
                            local.push((r as usize, image as usize));
                        }
                    }
                }
                local
            })
            .collect();
        for (a, b) in edges.into_iter().flatten() {
            uf.union(a, b);
        }
    }

    // ranks are visited in increasing order, so the first rank seen in an
    // orbit is its lexicographic minimum
    let mut slot = vec![usize::MAX; total as usize];
    let mut representatives = Vec::new();
    let mut sizes = Vec::new();
    for r in 0..total as usize {
        let root = uf.find_mut(r);
        if slot[root] == usize::MAX {
            slot[root] = representatives.len();
            representatives.push(index.unrank(r as u64));
            sizes.push(0);
        }
        sizes[slot[root]] += 1;
    }
    Ok(OrbitCatalog {
        skeleton,
        representatives,
        sizes,
    })
}

/// Number of bijections `s` on a section with `s = e ∘ s ∘ p`.
///
/// Along a cycle `k, p(k), p²(k), …` of `p` the values are forced by
/// `s(p(k)) = e⁻¹(s(k))`, so only one image per cycle is chosen.
fn fixed_bijections(p: &[usize], e_inv: &[usize]) -> u64 {
    let m = p.len();
    let mut cycles = Vec::new();
    let mut seen = vec![false; m];
    for k in 0..m {
        if !seen[k] {
            let mut len = 0;
            let mut x = k;
            while !seen[x] {
                seen[x] = true;
                x = p[x];
                len += 1;
            }
            cycles.push((k, len));
        }
    }
    fn walk(cycles: &[(usize, usize)], e_inv: &[usize], used: &mut [bool]) -> u64 {
        let Some(&(_, len)) = cycles.first() else {
            return 1;
        };
        let mut total = 0;
        for j in 0..used.len() {
            if used[j] {
                continue;
            }
            // images along the cycle: j, e⁻¹(j), e⁻²(j), …; must close after len steps
            let mut orbit = Vec::with_capacity(len);
            let mut y = j;
            let mut ok = true;
            for _ in 0..len {
                if used[y] || orbit.contains(&y) {
                    ok = false;
                    break;
                }
                orbit.push(y);
                y = e_inv[y];
            }
            if !ok || y != j {
                continue;
            }
            for &y in &orbit {
                used[y] = true;
            }
            total += walk(&cycles[1..], e_inv, used);
            for &y in &orbit {
                used[y] = false;
            }
        }
        total
    }
    walk(&cycles, e_inv, &mut vec![false; m])
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Orbit count via Burnside's lemma: the average over `(π, η)` of the number of
/// σ-tuples it fixes. The fixed-point count factorizes over colors; a color
/// with no fixed bijection ends the inner loop early.
pub fn count_orbits_burnside(spec: &ContractionSpec, limits: Limits) -> Result<BigUint> {
    let order = symmetry_group_order(spec);
    guard(order.clone(), limits.group)?;
    let skeleton = materialize(spec);
    let whites: Vec<Restricted> = enumerate_symmetry_group(skeleton.white(), limits.group)?
        .iter()
        .map(|g| restrict_all(&skeleton, skeleton.white(), g))
        .collect();
    let blacks_inv: Vec<Restricted> = enumerate_symmetry_group(skeleton.black(), limits.group)?
        .iter()
        .map(|g| {
            restrict_all(&skeleton, skeleton.black(), g)
                .iter()
                .map(|r| invert(r))
                .collect()
        })
        .collect();
    let fixed: BigUint = whites
        .par_iter()
        .map(|p| {
            let mut sum = BigUint::zero();
            for e_inv in &blacks_inv {
                let mut prod = BigUint::from(1u32);
                for (pc, ec) in p.iter().zip(e_inv) {
                    let f = fixed_bijections(pc, ec);
                    if f == 0 {
                        prod = BigUint::zero();
                        break;
                    }
                    prod *= f;
                }
                sum += prod;
            }
            sum
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let (q, r) = fixed.div_rem(&order);
    if !r.is_zero() {
        return Err(Error::NonIntegral {
            numer: fixed.to_string(),
            denom: order.to_string(),
        });
    }
    Ok(q)
}

/// A catalog entry as a graph, annotated with its connectivity.
#[derive(Clone, Debug)]
pub struct CatalogGraph {
    pub graph: ColoredBipartiteGraph,
    pub orbit_size: u64,
    pub components: usize,
    /// No connected component mixes full-type vertices with lower-order ones.
    pub sectors_separated: bool,
    /// Every lower-order vertex is adjacent only to full-type vertices.
    pub leaves_on_full: bool,
}

/// Materializes every representative of `catalog` as a validated graph.
pub fn catalog_to_graphs(catalog: &OrbitCatalog) -> Result<Vec<CatalogGraph>> {
    let skeleton = catalog.skeleton();
    let full = ColorType::full(skeleton.d());
    let w_full = |v: usize| skeleton.white().type_of(v) == full;
    let b_full = |w: usize| skeleton.black().type_of(w) == full;
    catalog
        .representatives
        .iter()
        .zip(&catalog.sizes)
        .map(|(sigma, &orbit_size)| {
            let graph = ColoredBipartiteGraph::new(Arc::clone(skeleton), sigma.clone())?;
            graph.validate()?;
            let comps = graph.components();
            let sectors_separated = comps.iter().all(|comp| {
                let fulls = comp.white.iter().filter(|&&v| w_full(v)).count()
                    + comp.black.iter().filter(|&&w| b_full(w)).count();
                fulls == 0 || fulls == comp.white.len() + comp.black.len()
            });
            let edges = graph.edges()?;
            let leaves_on_full = edges
                .iter()
                .all(|e| w_full(e.white) || b_full(e.black));
            Ok(CatalogGraph {
                components: comps.len(),
                graph,
                orbit_size,
                sectors_separated,
                leaves_on_full,
            })
        })
        .collect()
}

/// Serializable form of one orbit.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub index: usize,
    pub representative: Vec<Vec<usize>>,
    pub orbit_size: u64,
    pub edges: Vec<EdgeRecord>,
    pub components: usize,
    pub sectors_separated: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EdgeRecord {
    pub color: Color,
    pub white: usize,
    pub black: usize,
}

impl From<Edge> for EdgeRecord {
    fn from(e: Edge) -> Self {
        Self {
            color: e.color,
            white: e.white,
            black: e.black,
        }
    }
}

impl OrbitRecord {
    pub fn new(index: usize, entry: &CatalogGraph) -> Result<Self> {
        Ok(Self {
            index,
            representative: entry.graph.sigma().arrays().to_vec(),
            orbit_size: entry.orbit_size,
            edges: entry.graph.edges()?.into_iter().map(Into::into).collect(),
            components: entry.components,
            sectors_separated: entry.sectors_separated,
        })
    }
}

/// Counts of representatives by sector connectivity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SectorHistogram {
    pub disconnected_sector: usize,
    pub connected_sector: usize,
}

impl SectorHistogram {
    pub fn of(entries: &[CatalogGraph]) -> Self {
        let disconnected_sector = entries.iter().filter(|e| e.sectors_separated).count();
        Self {
            disconnected_sector,
            connected_sector: entries.len() - disconnected_sector,
        }
    }
}
