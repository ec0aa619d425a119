//! Color types, colored vertex sets and edge-colored bipartite graphs.
//!
//! A [`ColoredVertexSet`] only records how many vertices carry each
//! [`ColorType`]; that is all the counting formulas need. [`Skeleton`]
//! materializes a [`ContractionSpec`] into concrete vertex ids, and a
//! [`ColoredBipartiteGraph`] adds one bijection per color between the white and
//! black colored sections.
//!
//! Vertex ids are 0-based and local to each side. Vertices are grouped by type,
//! with types in canonical order: smaller types first, ties broken by the
//! lexicographic order of their sorted color lists.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::ops::Range;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result, Side};

/// Colors are the integers `1..=d`.
pub type Color = u32;

/// Largest supported number of colors.
pub const MAX_COLORS: u32 = 64;

/// A nonempty set of colors, stored as a bit mask (bit `c - 1` for color `c`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColorType(u64);

impl ColorType {
    /// Builds a type from a list of colors. Repeated colors collapse.
    pub fn new(colors: &[Color]) -> Result<Self> {
        let mut mask = 0u64;
        for &c in colors {
            if c == 0 || c > MAX_COLORS {
                return Err(Error::ColorOutOfRange {
                    color: c,
                    d: MAX_COLORS,
                });
            }
            mask |= 1 << (c - 1);
        }
        if mask == 0 {
            return Err(Error::EmptyColorType);
        }
        Ok(Self(mask))
    }

    /// The type `{1, ..., d}` carried by an order-`d` tensor.
    pub fn full(d: u32) -> Self {
        assert!((1..=MAX_COLORS).contains(&d), "d = {d} out of range");
        if d == 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << d) - 1)
        }
    }

    pub fn contains(&self, c: Color) -> bool {
        (1..=MAX_COLORS).contains(&c) && self.0 & (1 << (c - 1)) != 0
    }

    /// Number of colors, i.e. the valence of a vertex of this type.
    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn max_color(&self) -> Color {
        64 - self.0.leading_zeros()
    }

    /// Colors in increasing order.
    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        (1..=MAX_COLORS).filter(move |&c| self.contains(c))
    }

    pub fn to_vec(&self) -> Vec<Color> {
        self.colors().collect()
    }

    /// Position of `c` among this type's colors, i.e. the tensor axis carrying it.
    pub fn axis_of(&self, c: Color) -> Option<usize> {
        self.contains(c)
            .then(|| (self.0 & ((1u64 << (c - 1)) - 1)).count_ones() as usize)
    }
}

impl Ord for ColorType {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.to_vec().cmp(&other.to_vec()))
    }
}

impl PartialOrd for ColorType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ColorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ColorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.colors().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// A colored set of vertices described by its cardinality function
/// `ColorType -> count`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredVertexSet {
    d: u32,
    cardinality: BTreeMap<ColorType, usize>,
}

/// Result of [`ColoredVertexSet::chromatic_index`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChromaticIndex {
    /// Largest color carried by any vertex.
    pub index: Color,
    /// Colors in `1..index` that no vertex carries.
    pub unused: Vec<Color>,
}

impl ChromaticIndex {
    pub fn all_used(&self) -> bool {
        self.unused.is_empty()
    }
}

impl ColoredVertexSet {
    /// An empty set whose types may use colors `1..=d`.
    pub fn new(d: u32) -> Self {
        assert!((1..=MAX_COLORS).contains(&d), "d = {d} out of range");
        Self {
            d,
            cardinality: BTreeMap::new(),
        }
    }

    /// Sets the number of vertices of type `ty`. A zero count removes the type.
    pub fn set(&mut self, ty: ColorType, count: usize) -> Result<()> {
        if ty.max_color() > self.d {
            return Err(Error::ColorOutOfRange {
                color: ty.max_color(),
                d: self.d,
            });
        }
        if count == 0 {
            self.cardinality.remove(&ty);
        } else {
            self.cardinality.insert(ty, count);
        }
        Ok(())
    }

    /// Builder form of [`set`](Self::set) taking a color list.
    pub fn with(mut self, colors: &[Color], count: usize) -> Result<Self> {
        self.set(ColorType::new(colors)?, count)?;
        Ok(self)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn count(&self, ty: ColorType) -> usize {
        self.cardinality.get(&ty).copied().unwrap_or(0)
    }

    /// Used types with their counts, in canonical type order.
    pub fn types(&self) -> impl Iterator<Item = (ColorType, usize)> + '_ {
        self.cardinality.iter().map(|(&t, &n)| (t, n))
    }

    pub fn num_types(&self) -> usize {
        self.cardinality.len()
    }

    /// Total number of vertices.
    pub fn total(&self) -> usize {
        self.cardinality.values().sum()
    }

    /// Number of vertices whose type contains color `c`.
    pub fn color_multiplicity(&self, c: Color) -> Result<usize> {
        if c == 0 || c > self.d {
            return Err(Error::ColorOutOfRange { color: c, d: self.d });
        }
        Ok(self
            .cardinality
            .iter()
            .filter(|(t, _)| t.contains(c))
            .map(|(_, &n)| n)
            .sum())
    }

    /// Number of edges incident to this side, `Σ_A |A| n(A)`.
    pub fn half_edges(&self) -> usize {
        self.cardinality.iter().map(|(t, &n)| t.len() * n).sum()
    }

    pub fn chromatic_index(&self) -> Result<ChromaticIndex> {
        let index = self
            .cardinality
            .keys()
            .map(|t| t.max_color())
            .max()
            .ok_or(Error::EmptyVertexSet)?;
        let unused = (1..index)
            .filter(|&c| !self.cardinality.keys().any(|t| t.contains(c)))
            .collect();
        Ok(ChromaticIndex { index, unused })
    }

    fn redeclare(&self, d: u32) -> Self {
        Self {
            d,
            cardinality: self.cardinality.clone(),
        }
    }
}

/// Checks that two colored vertex sets can be contracted: both nonempty, the
/// same multiplicity for each color, and every color `1..=d` in use, where `d`
/// is the larger of the two declared bounds.
///
/// Colors are checked in increasing order and the first failure is reported.
pub fn check_compatible(lambda: &ColoredVertexSet, gamma: &ColoredVertexSet) -> Result<()> {
    if lambda.total() == 0 || gamma.total() == 0 {
        return Err(Error::EmptyVertexSet);
    }
    let d = lambda.d.max(gamma.d);
    for c in 1..=d {
        let left = lambda.redeclare(d).color_multiplicity(c)?;
        let right = gamma.redeclare(d).color_multiplicity(c)?;
        if left != right {
            return Err(Error::Incompatible { color: c, left, right });
        }
        if left == 0 {
            return Err(Error::UnusedColor { color: c });
        }
    }
    Ok(())
}

/// A validated compatible pair `(Λ, Γ)` of chromatic index `d`: white vertices
/// carry the tensors, black vertices the conjugated ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContractionSpec {
    d: u32,
    lambda: ColoredVertexSet,
    gamma: ColoredVertexSet,
}

impl ContractionSpec {
    pub fn new(lambda: ColoredVertexSet, gamma: ColoredVertexSet) -> Result<Self> {
        check_compatible(&lambda, &gamma)?;
        let d = lambda.d.max(gamma.d);
        Ok(Self {
            d,
            lambda: lambda.redeclare(d),
            gamma: gamma.redeclare(d),
        })
    }

    /// `n` tensors of order `d` against `n` conjugates: the fixed-order setting.
    pub fn fixed_order(d: u32, n: usize) -> Result<Self> {
        let mut side = ColoredVertexSet::new(d);
        side.set(ColorType::full(d), n)?;
        Self::new(side.clone(), side)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn lambda(&self) -> &ColoredVertexSet {
        &self.lambda
    }

    pub fn gamma(&self) -> &ColoredVertexSet {
        &self.gamma
    }

    pub fn side(&self, side: Side) -> &ColoredVertexSet {
        match side {
            Side::White => &self.lambda,
            Side::Black => &self.gamma,
        }
    }

    /// The same spec with the white and black sides exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            d: self.d,
            lambda: self.gamma.clone(),
            gamma: self.lambda.clone(),
        }
    }

    /// Shared color multiplicity `m_c`.
    pub fn multiplicity(&self, c: Color) -> usize {
        self.lambda
            .color_multiplicity(c)
            .expect("color within 1..=d")
    }

    /// True when every vertex on both sides carries all `d` colors.
    pub fn is_single_full_type(&self) -> bool {
        let full = ColorType::full(self.d);
        self.lambda.types().all(|(t, _)| t == full) && self.gamma.types().all(|(t, _)| t == full)
    }
}

/// Concrete vertices of one side, grouped by type in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexLayout {
    types: Vec<ColorType>,
    blocks: Vec<(ColorType, Range<usize>)>,
    sections: Vec<Vec<usize>>,
    positions: Vec<Vec<Option<usize>>>,
}

impl VertexLayout {
    fn new(set: &ColoredVertexSet, d: u32) -> Self {
        let mut types = Vec::with_capacity(set.total());
        let mut blocks = Vec::new();
        for (ty, count) in set.types() {
            let start = types.len();
            types.extend(std::iter::repeat(ty).take(count));
            blocks.push((ty, start..types.len()));
        }
        let mut sections = vec![Vec::new(); d as usize];
        let mut positions = vec![vec![None; d as usize]; types.len()];
        for (v, ty) in types.iter().enumerate() {
            for c in ty.colors() {
                let sec = &mut sections[c as usize - 1];
                positions[v][c as usize - 1] = Some(sec.len());
                sec.push(v);
            }
        }
        Self {
            types,
            blocks,
            sections,
            positions,
        }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn type_of(&self, v: usize) -> ColorType {
        self.types[v]
    }

    pub fn types(&self) -> &[ColorType] {
        &self.types
    }

    /// Type classes `φ⁻¹(A)` as contiguous id ranges.
    pub fn blocks(&self) -> &[(ColorType, Range<usize>)] {
        &self.blocks
    }

    /// Colored section `V|c` in increasing id order.
    pub fn section(&self, c: Color) -> &[usize] {
        &self.sections[c as usize - 1]
    }

    /// Index of `v` inside `V|c`, if `v` carries `c`.
    pub fn position(&self, v: usize, c: Color) -> Option<usize> {
        self.positions[v][c as usize - 1]
    }
}

/// The vertices of a spec with no edges yet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    spec: ContractionSpec,
    white: VertexLayout,
    black: VertexLayout,
}

impl Skeleton {
    pub fn spec(&self) -> &ContractionSpec {
        &self.spec
    }

    pub fn d(&self) -> u32 {
        self.spec.d
    }

    pub fn white(&self) -> &VertexLayout {
        &self.white
    }

    pub fn black(&self) -> &VertexLayout {
        &self.black
    }

    pub fn layout(&self, side: Side) -> &VertexLayout {
        match side {
            Side::White => &self.white,
            Side::Black => &self.black,
        }
    }

    pub fn multiplicity(&self, c: Color) -> usize {
        self.white.section(c).len()
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> {
        1..=self.spec.d
    }
}

/// Assigns vertex ids to both sides of a spec and caches the colored sections.
pub fn materialize(spec: &ContractionSpec) -> Skeleton {
    Skeleton {
        white: VertexLayout::new(&spec.lambda, spec.d),
        black: VertexLayout::new(&spec.gamma, spec.d),
        spec: spec.clone(),
    }
}

/// One bijection `V|c -> W|c` per color, in section coordinates: entry `k` of
/// color `c` is the position in `W|c` of the image of the `k`-th vertex of `V|c`.
///
/// The derived ordering compares color 1 first, so the minimum of a set of
/// tuples is its lexicographically smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigmaTuple {
    maps: Vec<Vec<usize>>,
}

impl SigmaTuple {
    /// Wraps raw arrays without checking them; see [`SigmaTuple::check`].
    pub fn from_arrays(maps: Vec<Vec<usize>>) -> Self {
        Self { maps }
    }

    /// The tuple pairing the `k`-th vertex of `V|c` with the `k`-th of `W|c`.
    pub fn identity(skeleton: &Skeleton) -> Self {
        Self {
            maps: skeleton
                .colors()
                .map(|c| (0..skeleton.multiplicity(c)).collect())
                .collect(),
        }
    }

    /// A uniformly random tuple.
    pub fn random<R: Rng + ?Sized>(skeleton: &Skeleton, rng: &mut R) -> Self {
        let mut s = Self::identity(skeleton);
        for m in &mut s.maps {
            m.shuffle(rng);
        }
        s
    }

    pub fn color(&self, c: Color) -> &[usize] {
        &self.maps[c as usize - 1]
    }

    pub fn arrays(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn into_arrays(self) -> Vec<Vec<usize>> {
        self.maps
    }

    /// Checks that each array is a permutation of its section.
    pub fn check(&self, skeleton: &Skeleton) -> Result<()> {
        let d = skeleton.d() as usize;
        if self.maps.len() != d {
            return Err(Error::BadSigma {
                color: self.maps.len().min(d) as Color + 1,
                reason: format!("expected {d} colors, found {}", self.maps.len()),
            });
        }
        for c in skeleton.colors() {
            let m = skeleton.multiplicity(c);
            let map = self.color(c);
            if map.len() != m {
                return Err(Error::BadSigma {
                    color: c,
                    reason: format!("section has {m} vertices, map has {}", map.len()),
                });
            }
            let mut hit = vec![false; m];
            for &j in map {
                if j >= m {
                    return Err(Error::BadSigma {
                        color: c,
                        reason: format!("image {j} outside the black section of size {m}"),
                    });
                }
                if std::mem::replace(&mut hit[j], true) {
                    return Err(Error::BadSigma {
                        color: c,
                        reason: format!("black section vertex {j} is hit twice"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// An edge of color `color` between white vertex `white` and black vertex `black`.
/// Field order gives the export ordering (color, then white id).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub color: Color,
    pub white: usize,
    pub black: usize,
}

/// A connected component, as sorted white and black id lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub white: Vec<usize>,
    pub black: Vec<usize>,
}

/// A skeleton together with a σ-tuple: one concrete invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredBipartiteGraph {
    skeleton: Arc<Skeleton>,
    sigma: SigmaTuple,
}

impl ColoredBipartiteGraph {
    pub fn new(skeleton: Arc<Skeleton>, sigma: SigmaTuple) -> Result<Self> {
        sigma.check(&skeleton)?;
        Ok(Self { skeleton, sigma })
    }

    /// Skips the bijection check. Edge construction and [`validate`](Self::validate)
    /// still report a malformed tuple.
    pub fn new_unchecked(skeleton: Arc<Skeleton>, sigma: SigmaTuple) -> Self {
        Self { skeleton, sigma }
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn skeleton_arc(&self) -> &Arc<Skeleton> {
        &self.skeleton
    }

    pub fn spec(&self) -> &ContractionSpec {
        self.skeleton.spec()
    }

    pub fn sigma(&self) -> &SigmaTuple {
        &self.sigma
    }

    /// White-to-black image of `v` under `σ_c`.
    pub fn image(&self, c: Color, v: usize) -> Option<usize> {
        let k = self.skeleton.white.position(v, c)?;
        let j = *self.sigma.color(c).get(k)?;
        self.skeleton.black.section(c).get(j).copied()
    }

    /// `E = {(v, σ_c(v)) | c ∈ [d], v ∈ V|c}`, sorted by color then white id.
    pub fn edges(&self) -> Result<Vec<Edge>> {
        self.sigma.check(&self.skeleton)?;
        let mut edges = Vec::new();
        for c in self.skeleton.colors() {
            let white = self.skeleton.white.section(c);
            let black = self.skeleton.black.section(c);
            for (k, &v) in white.iter().enumerate() {
                edges.push(Edge {
                    color: c,
                    white: v,
                    black: black[self.sigma.color(c)[k]],
                });
            }
        }
        edges.sort_unstable();
        Ok(edges)
    }

    /// Same edge set, built vertex by vertex from the white side.
    pub fn edges_by_white(&self) -> Result<Vec<Edge>> {
        self.sigma.check(&self.skeleton)?;
        let mut edges = Vec::new();
        for v in 0..self.skeleton.white.len() {
            for c in self.skeleton.white.type_of(v).colors() {
                let black = self.image(c, v).expect("checked tuple");
                edges.push(Edge { color: c, white: v, black });
            }
        }
        edges.sort_unstable();
        Ok(edges)
    }

    /// Same edge set, built from the black side through `σ_c⁻¹`.
    pub fn edges_by_black(&self) -> Result<Vec<Edge>> {
        self.sigma.check(&self.skeleton)?;
        let mut edges = Vec::new();
        for c in self.skeleton.colors() {
            let map = self.sigma.color(c);
            let mut inverse = vec![0; map.len()];
            for (k, &j) in map.iter().enumerate() {
                inverse[j] = k;
            }
            let white = self.skeleton.white.section(c);
            for (j, &w) in self.skeleton.black.section(c).iter().enumerate() {
                edges.push(Edge {
                    color: c,
                    white: white[inverse[j]],
                    black: w,
                });
            }
        }
        edges.sort_unstable();
        Ok(edges)
    }

    /// Checks that the graph is a proper edge-colored bipartite graph whose
    /// incident color sets reproduce the vertex types.
    pub fn validate(&self) -> Result<()> {
        let edges = self.edges()?;
        for (side, layout) in [
            (Side::White, &self.skeleton.white),
            (Side::Black, &self.skeleton.black),
        ] {
            let mut seen: Vec<u64> = vec![0; layout.len()];
            for e in &edges {
                let v = match side {
                    Side::White => e.white,
                    Side::Black => e.black,
                };
                let bit = 1u64 << (e.color - 1);
                if seen[v] & bit != 0 {
                    return Err(Error::BadIncidence {
                        side,
                        vertex: v,
                        reason: format!("two edges of color {}", e.color),
                    });
                }
                seen[v] |= bit;
            }
            for (v, &mask) in seen.iter().enumerate() {
                let ty = layout.type_of(v);
                if mask != ty.0 {
                    return Err(Error::BadIncidence {
                        side,
                        vertex: v,
                        reason: format!("incident colors differ from type {ty}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Colors of the edges at a vertex, in increasing order.
    pub fn incident_colors(&self, side: Side, v: usize) -> Result<Vec<Color>> {
        let mut colors: Vec<Color> = self
            .edges()?
            .into_iter()
            .filter(|e| match side {
                Side::White => e.white == v,
                Side::Black => e.black == v,
            })
            .map(|e| e.color)
            .collect();
        colors.sort_unstable();
        Ok(colors)
    }

    /// Connected components, ordered by their smallest white id (components
    /// without white vertices cannot occur).
    pub fn components(&self) -> Vec<Component> {
        let nw = self.skeleton.white.len();
        let nb = self.skeleton.black.len();
        let mut uf = UnionFind::<usize>::new(nw + nb);
        for e in self.edges().expect("graph built from a checked tuple") {
            uf.union(e.white, nw + e.black);
        }
        let mut by_root: BTreeMap<usize, Component> = BTreeMap::new();
        let mut order = Vec::new();
        for x in 0..nw + nb {
            let root = uf.find_mut(x);
            let comp = by_root.entry(root).or_insert_with(|| {
                order.push(root);
                Component {
                    white: Vec::new(),
                    black: Vec::new(),
                }
            });
            if x < nw {
                comp.white.push(x);
            } else {
                comp.black.push(x - nw);
            }
        }
        order
            .into_iter()
            .map(|r| by_root.remove(&r).expect("root registered"))
            .collect()
    }

    /// Graphviz rendering: white vertices as open circles, black as filled
    /// circles, edges colored by [`edge_color_name`].
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n  node [shape=circle, label=\"\", width=0.3];\n");
        for v in 0..self.skeleton.white.len() {
            let _ = writeln!(
                out,
                "  w{v} [style=solid, xlabel=\"{}\"];",
                self.skeleton.white.type_of(v)
            );
        }
        for w in 0..self.skeleton.black.len() {
            let _ = writeln!(
                out,
                "  b{w} [style=filled, fillcolor=black, xlabel=\"{}\"];",
                self.skeleton.black.type_of(w)
            );
        }
        for e in self.edges().expect("graph built from a checked tuple") {
            let _ = writeln!(
                out,
                "  w{} -- b{} [color={}, label=\"{}\"];",
                e.white,
                e.black,
                edge_color_name(e.color),
                e.color
            );
        }
        out.push_str("}\n");
        out
    }
}

const PALETTE: [&str; 10] = [
    "red", "green", "blue", "orange", "purple", "brown", "magenta", "cyan", "gold", "gray",
];

/// Graphviz color for an edge color: 1 red, 2 green, 3 blue, 4 orange,
/// 5 purple, 6 brown, 7 magenta, 8 cyan, 9 gold, 10 gray, then repeating.
pub fn edge_color_name(c: Color) -> &'static str {
    PALETTE[(c as usize - 1) % PALETTE.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn mixed_example() -> ContractionSpec {
        let lambda = ColoredVertexSet::new(3)
            .with(&[1, 2, 3], 2)
            .unwrap()
            .with(&[1, 3], 1)
            .unwrap();
        let gamma = ColoredVertexSet::new(3)
            .with(&[1, 2, 3], 2)
            .unwrap()
            .with(&[1], 1)
            .unwrap()
            .with(&[3], 1)
            .unwrap();
        ContractionSpec::new(lambda, gamma).unwrap()
    }

    #[test]
    fn type_order_is_size_then_lex() {
        let mut types: Vec<ColorType> = [&[1, 2, 3][..], &[3], &[1, 3], &[1], &[2, 3], &[1, 2]]
            .iter()
            .map(|c| ColorType::new(c).unwrap())
            .collect();
        types.sort();
        let lists: Vec<Vec<Color>> = types.iter().map(|t| t.to_vec()).collect();
        assert_eq!(
            lists,
            vec![vec![1], vec![3], vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]]
        );
        assert_eq!(ColorType::new(&[]), Err(Error::EmptyColorType));
        assert_eq!(ColorType::new(&[2, 5]).unwrap().axis_of(5), Some(1));
    }

    #[test]
    fn multiplicities_of_mixed_example() {
        let spec = mixed_example();
        assert_eq!(spec.lambda().color_multiplicity(1), Ok(3));
        assert_eq!(spec.lambda().color_multiplicity(2), Ok(2));
        assert_eq!(spec.gamma().color_multiplicity(3), Ok(3));
        assert_eq!(
            spec.lambda().color_multiplicity(4),
            Err(Error::ColorOutOfRange { color: 4, d: 3 })
        );
        assert_eq!(
            spec.lambda().color_multiplicity(0),
            Err(Error::ColorOutOfRange { color: 0, d: 3 })
        );
    }

    #[test]
    fn chromatic_index_examples() {
        let spec = mixed_example();
        let ci = spec.lambda().chromatic_index().unwrap();
        assert_eq!(ci.index, 3);
        assert!(ci.all_used());

        let gap = ColoredVertexSet::new(3).with(&[1, 3], 1).unwrap();
        let ci = gap.chromatic_index().unwrap();
        assert_eq!((ci.index, ci.unused), (3, vec![2]));

        let single = ColoredVertexSet::new(1).with(&[1], 4).unwrap();
        assert_eq!(single.chromatic_index().unwrap().index, 1);
        assert!(single.chromatic_index().unwrap().all_used());

        assert_eq!(
            ColoredVertexSet::new(2).chromatic_index(),
            Err(Error::EmptyVertexSet)
        );
    }

    #[test]
    fn compatibility() {
        let spec = mixed_example();
        assert!(check_compatible(spec.lambda(), spec.gamma()).is_ok());

        let l = ColoredVertexSet::new(2).with(&[1, 2], 1).unwrap();
        let g = ColoredVertexSet::new(2).with(&[1], 1).unwrap();
        assert_eq!(
            check_compatible(&l, &g),
            Err(Error::Incompatible {
                color: 2,
                left: 1,
                right: 0
            })
        );

        for n in 1..4 {
            assert!(ContractionSpec::fixed_order(3, n).is_ok());
        }

        let l = ColoredVertexSet::new(3).with(&[1, 3], 2).unwrap();
        assert_eq!(
            check_compatible(&l, &l),
            Err(Error::UnusedColor { color: 2 })
        );
        let set_too_wide = ColoredVertexSet::new(2).set(ColorType::new(&[3]).unwrap(), 1);
        assert_eq!(
            set_too_wide,
            Err(Error::ColorOutOfRange { color: 3, d: 2 })
        );
    }

    #[test]
    fn materialize_counts_vertices() {
        let sk = materialize(&mixed_example());
        assert_eq!((sk.white().len(), sk.black().len()), (3, 4));
        // canonical order: smaller types first
        assert_eq!(sk.white().type_of(0).to_vec(), vec![1, 3]);
        assert_eq!(sk.black().type_of(0).to_vec(), vec![1]);
        assert_eq!(sk.black().type_of(1).to_vec(), vec![3]);
        assert_eq!(sk.white().section(2), &[1, 2]);
        assert_eq!(sk.black().section(1), &[0, 2, 3]);
        assert_eq!(sk.black().position(3, 3), Some(2));

        let sk = materialize(&ContractionSpec::fixed_order(3, 2).unwrap());
        assert_eq!((sk.white().len(), sk.black().len()), (2, 2));
        let sk = materialize(&ContractionSpec::fixed_order(1, 5).unwrap());
        assert_eq!((sk.white().len(), sk.black().len()), (5, 5));
        assert!(sk.white().types().iter().all(|t| t.len() == 1));
    }

    #[test]
    fn matrix_edges() {
        let sk = Arc::new(materialize(&ContractionSpec::fixed_order(2, 2).unwrap()));
        let g = ColoredBipartiteGraph::new(
            sk,
            SigmaTuple::from_arrays(vec![vec![0, 1], vec![1, 0]]),
        )
        .unwrap();
        let e: Vec<(Color, usize, usize)> = g
            .edges()
            .unwrap()
            .iter()
            .map(|e| (e.color, e.white, e.black))
            .collect();
        assert_eq!(e, vec![(1, 0, 0), (1, 1, 1), (2, 0, 1), (2, 1, 0)]);
    }

    #[test]
    fn vector_edges() {
        let sk = Arc::new(materialize(&ContractionSpec::fixed_order(1, 3).unwrap()));
        let g = ColoredBipartiteGraph::new(sk.clone(), SigmaTuple::identity(&sk)).unwrap();
        let e: Vec<(usize, usize)> = g.edges().unwrap().iter().map(|e| (e.white, e.black)).collect();
        assert_eq!(e, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(g.components().len(), 3);
    }

    #[test]
    fn mixed_example_identity_graph() {
        let sk = Arc::new(materialize(&mixed_example()));
        let g = ColoredBipartiteGraph::new(sk.clone(), SigmaTuple::identity(&sk)).unwrap();
        let edges = g.edges().unwrap();
        assert_eq!(edges.len(), 8);
        let per_color: Vec<usize> = (1..=3)
            .map(|c| edges.iter().filter(|e| e.color == c).count())
            .collect();
        assert_eq!(per_color, vec![3, 2, 3]);
        g.validate().unwrap();
        // the {1,3} matrix is white vertex 0
        assert_eq!(g.incident_colors(Side::White, 0).unwrap(), vec![1, 3]);
    }

    #[test]
    fn corrupted_sigma_is_rejected() {
        let sk = Arc::new(materialize(&mixed_example()));
        let bad = SigmaTuple::from_arrays(vec![vec![0, 0, 2], vec![0, 1], vec![0, 1, 2]]);
        assert!(matches!(
            ColoredBipartiteGraph::new(sk.clone(), bad.clone()),
            Err(Error::BadSigma { color: 1, .. })
        ));
        let g = ColoredBipartiteGraph::new_unchecked(sk, bad);
        assert!(matches!(g.validate(), Err(Error::BadSigma { color: 1, .. })));
        assert!(matches!(g.edges(), Err(Error::BadSigma { .. })));
    }

    #[test]
    fn dot_export_uses_palette() {
        let sk = Arc::new(materialize(&mixed_example()));
        let g = ColoredBipartiteGraph::new(sk.clone(), SigmaTuple::identity(&sk)).unwrap();
        let dot = g.to_dot();
        assert!(dot.starts_with("graph G {"));
        assert_eq!(dot.matches("color=red").count(), 3);
        assert_eq!(dot.matches("color=green").count(), 2);
        assert_eq!(dot.matches("color=blue").count(), 3);
        assert_eq!(dot.matches("style=filled").count(), 4);
        assert_eq!(edge_color_name(11), "red");
    }

    fn arb_spec() -> impl Strategy<Value = ContractionSpec> {
        // white side: random types; black side: one vertex per color slot
        // rearranged into random types with the same multiplicities.
        (1u32..=3, proptest::collection::vec((1u64..8, 1usize..3), 1..4), any::<u64>()).prop_filter_map(
            "needs every color and at most 6 vertices",
            |(d, raw, seed)| {
                let mut lambda = ColoredVertexSet::new(d);
                for (mask, n) in raw {
                    let mask = mask & ((1 << d) - 1);
                    if mask == 0 {
                        continue;
                    }
                    let ty = ColorType(mask);
                    let prev = lambda.count(ty);
                    lambda.set(ty, prev + n).unwrap();
                }
                if lambda.total() > 6 {
                    return None;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let gamma = crate::sample::random_partner(&lambda, &mut rng);
                ContractionSpec::new(lambda, gamma).ok()
            },
        )
    }

    proptest! {
        #[test]
        fn every_sigma_gives_a_valid_graph(spec in arb_spec(), seed in any::<u64>()) {
            let sk = Arc::new(materialize(&spec));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sigma = SigmaTuple::random(&sk, &mut rng);
            let g = ColoredBipartiteGraph::new(sk, sigma).unwrap();
            prop_assert!(g.validate().is_ok());
            let by_color = g.edges().unwrap();
            prop_assert_eq!(&by_color, &g.edges_by_white().unwrap());
            prop_assert_eq!(&by_color, &g.edges_by_black().unwrap());
            prop_assert_eq!(by_color.len(), spec.lambda().half_edges());
            prop_assert_eq!(spec.lambda().half_edges(), spec.gamma().half_edges());
        }
    }
}
