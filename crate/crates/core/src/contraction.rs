//! Numeric evaluation of multiple-order contractions and randomized checks of
//! their unitary and gauge invariance.
//!
//! White vertices carry tensors `T`, black vertices carry the complex
//! conjugates of tensors `R`. A [`TensorFamily`] stores `R` itself; the
//! conjugation happens inside [`evaluate`]. Consequently the invariance check
//! rotates both families with the same unitary `U` (the conjugate family `R̄`
//! then picks up `Ū`, which is exactly the required transformation).

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::colored::{
    materialize, Color, ColorType, ColoredBipartiteGraph, ColoredVertexSet, ContractionSpec,
    SigmaTuple, Skeleton,
};
use crate::error::{Error, Result};
use crate::oracle::{act, SymmetryGroupElement};
use crate::specfile::spec_digest;

/// Default relative tolerance of the invariance checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Tolerance on `|U†U - 1|` for accepting a matrix as unitary.
pub const UNITARY_TOL: f64 = 1e-12;

/// One tensor per color type, shared by all vertices of that type.
///
/// A type-`A` tensor has `|A|` indices in `0..dim`, one per color, stored
/// row-major with axes in increasing color order.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorFamily {
    dim: usize,
    tensors: BTreeMap<ColorType, Vec<Complex64>>,
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

impl TensorFamily {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            dim,
            tensors: BTreeMap::new(),
        }
    }

    /// Gaussian tensors for every type used by `set`.
    pub fn random<R: Rng + ?Sized>(set: &ColoredVertexSet, dim: usize, rng: &mut R) -> Self {
        let mut family = Self::new(dim);
        for (ty, _) in set.types() {
            let data = (0..dim.pow(ty.len() as u32))
                .map(|_| complex_gaussian(rng))
                .collect();
            family.tensors.insert(ty, data);
        }
        family
    }

    pub fn insert(&mut self, ty: ColorType, data: Vec<Complex64>) -> Result<()> {
        let expected = self.dim.pow(ty.len() as u32);
        if data.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: data.len(),
            });
        }
        self.tensors.insert(ty, data);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, ty: ColorType) -> Option<&[Complex64]> {
        self.tensors.get(&ty).map(Vec::as_slice)
    }

    /// Entry-wise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            tensors: self
                .tensors
                .iter()
                .map(|(&t, v)| (t, v.iter().map(|z| z.conj()).collect()))
                .collect(),
        }
    }

    fn require(&self, ty: ColorType) -> Result<&[Complex64]> {
        self.get(ty)
            .ok_or_else(|| Error::MissingTensor(ty.to_string()))
    }
}

/// One `N × N` matrix per color, indexed by color `1..=d`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryAssignment {
    mats: Vec<DMatrix<Complex64>>,
}

impl UnitaryAssignment {
    /// Accepts the matrices only if each is unitary within [`UNITARY_TOL`].
    pub fn new(mats: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let u = Self::from_matrices_unchecked(mats)?;
        for (i, m) in u.mats.iter().enumerate() {
            let defect = unitarity_defect(m);
            if defect > UNITARY_TOL {
                return Err(Error::NotUnitary {
                    color: i as Color + 1,
                    defect: format!("{defect:e}"),
                });
            }
        }
        Ok(u)
    }

    /// Square matrices of a common size, with no unitarity check; used for
    /// negative controls.
    pub fn from_matrices_unchecked(mats: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let n = mats.first().map_or(0, |m| m.nrows());
        for m in &mats {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: if m.nrows() != n { m.nrows() } else { m.ncols() },
                });
            }
        }
        Ok(Self { mats })
    }

    pub fn identity(d: u32, dim: usize) -> Self {
        Self {
            mats: (0..d).map(|_| DMatrix::identity(dim, dim)).collect(),
        }
    }

    /// `N = 1` assignment multiplying color `c` by `e^{iθ_c}`.
    pub fn phases(thetas: &[f64]) -> Self {
        Self {
            mats: thetas
                .iter()
                .map(|&t| DMatrix::from_element(1, 1, Complex64::from_polar(1.0, t)))
                .collect(),
        }
    }

    /// Independent random unitaries, from the QR factorization of complex
    /// Gaussian matrices (phases of `R`'s diagonal moved into `Q`).
    pub fn random<R: Rng + ?Sized>(d: u32, dim: usize, rng: &mut R) -> Self {
        Self {
            mats: (0..d).map(|_| random_unitary(dim, rng)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mats.first().map_or(0, |m| m.nrows())
    }

    pub fn color(&self, c: Color) -> &DMatrix<Complex64> {
        &self.mats[c as usize - 1]
    }

    pub fn set_color(&mut self, c: Color, m: DMatrix<Complex64>) {
        self.mats[c as usize - 1] = m;
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.mats.iter().map(unitarity_defect).fold(0.0, f64::max)
    }
}

fn random_gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng))
}

fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let qr = random_gaussian_matrix(dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let prod = m.adjoint() * m;
    let id = DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Rotates the color-`c` index of every tensor by `u_c`, or by its entry-wise
/// conjugate when `conjugated` is set (for families stored as `R̄`).
pub fn transform(family: &TensorFamily, u: &UnitaryAssignment, conjugated: bool) -> Result<TensorFamily> {
    if u.dim() != family.dim {
        return Err(Error::Dimension {
            expected: family.dim,
            found: u.dim(),
        });
    }
    let n = family.dim;
    let mut out = family.clone();
    for (ty, data) in out.tensors.iter_mut() {
        let rank = ty.len();
        for (axis, c) in ty.colors().enumerate() {
            if c as usize > u.mats.len() {
                return Err(Error::ColorOutOfRange {
                    color: c,
                    d: u.mats.len() as u32,
                });
            }
            let mut m = u.color(c).clone();
            if conjugated {
                m.iter_mut().for_each(|z| *z = z.conj());
            }
            let stride = n.pow((rank - 1 - axis) as u32);
            let old = std::mem::take(data);
            *data = (0..old.len())
                .map(|flat| {
                    let i = (flat / stride) % n;
                    let base = flat - i * stride;
                    (0..n).map(|j| m[(i, j)] * old[base + j * stride]).sum()
                })
                .collect();
        }
    }
    Ok(out)
}

// A vertex inside a component: its tensor and the edge slots of its axes.
struct Factor<'a> {
    data: &'a [Complex64],
    slots: Vec<usize>,
    conj: bool,
}

/// Value of the contraction: the sum over all index assignments allowed by the
/// kernel of `Π_v T_{φ(v)} · Π_w conj(R_{ψ(w)})`, computed component by
/// component with one summation index per edge.
pub fn evaluate(g: &ColoredBipartiteGraph, white: &TensorFamily, black: &TensorFamily) -> Result<Complex64> {
    if white.dim != black.dim {
        return Err(Error::Dimension {
            expected: white.dim,
            found: black.dim,
        });
    }
    let n = white.dim;
    let sk = g.skeleton();
    let edges = g.edges()?;
    let mut value = Complex64::new(1.0, 0.0);
    for comp in g.components() {
        // edges of this component, grouped by vertex so factors close early
        let mut slot_of = BTreeMap::new();
        let mut factors = Vec::new();
        for (&v, is_white) in comp
            .white
            .iter()
            .map(|v| (v, true))
            .chain(comp.black.iter().map(|w| (w, false)))
        {
            let ty = if is_white {
                sk.white().type_of(v)
            } else {
                sk.black().type_of(v)
            };
            let data = if is_white {
                white.require(ty)?
            } else {
                black.require(ty)?
            };
            let slots = ty
                .colors()
                .map(|c| {
                    let e = edges
                        .iter()
                        .find(|e| e.color == c && if is_white { e.white == v } else { e.black == v })
                        .expect("validated graph has every incident edge");
                    let next = slot_of.len();
                    *slot_of.entry(*e).or_insert(next)
                })
                .collect();
            factors.push(Factor {
                data,
                slots,
                conj: !is_white,
            });
        }
        value *= contract_component(&factors, slot_of.len(), n);
    }
    Ok(value)
}

fn contract_component(factors: &[Factor<'_>], slots: usize, n: usize) -> Complex64 {
    // factor i can be evaluated once every slot up to ready[i] is assigned
    let mut closes: Vec<Vec<usize>> = vec![Vec::new(); slots];
    for (i, f) in factors.iter().enumerate() {
        let last = *f.slots.iter().max().expect("vertices have at least one color");
        closes[last].push(i);
    }
    let mut idx = vec![0usize; slots];
    fn rec(
        depth: usize,
        acc: Complex64,
        idx: &mut [usize],
        factors: &[Factor<'_>],
        closes: &[Vec<usize>],
        n: usize,
    ) -> Complex64 {
        if depth == idx.len() {
            return acc;
        }
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..n {
            idx[depth] = i;
            let mut term = acc;
            for &f in &closes[depth] {
                let fac = &factors[f];
                let flat = fac.slots.iter().fold(0, |a, &s| a * n + idx[s]);
                let z = fac.data[flat];
                term *= if fac.conj { z.conj() } else { z };
            }
            total += rec(depth + 1, term, idx, factors, closes, n);
        }
        total
    }
    rec(0, Complex64::new(1.0, 0.0), &mut idx, factors, &closes, n)
}

/// Settings shared by the randomized checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            dim: 2,
            trials: 20,
            seed: 0,
            tol: DEFAULT_TOL,
        }
    }
}

/// Outcome of a randomized invariance check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub check: String,
    pub spec_digest: String,
    #[serde(rename = "N")]
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_deviation: f64,
    pub worst_trial: usize,
    pub pass: bool,
}

/// Which transformation the unitary check applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitaryMode {
    /// An independent random unitary for every color.
    AllColors,
    /// A random unitary on one color, identity elsewhere.
    OneColor(Color),
    /// Negative control: color 1 gets a random non-unitary matrix.
    NonUnitary,
}

/// Which relabeling the gauge check applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeMode {
    /// A random element of `H(Λ) × H(Γ)`.
    Symmetry,
    /// Negative control: two white vertices of different types trade places in
    /// every section they share, which is not a gauge transformation.
    CrossType,
}

/// Random stream for trial `trial`: same seed, one ChaCha stream per trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn relative_deviation(reference: Complex64, other: Complex64) -> f64 {
    (other - reference).norm() / (1.0 + reference.norm())
}

fn run_trials<F>(spec: &ContractionSpec, check: &str, opts: CheckOptions, trial: F) -> Result<InvarianceReport>
where
    F: Fn(&Arc<Skeleton>, &mut ChaCha8Rng) -> Result<f64> + Sync,
{
    assert!(opts.dim >= 1 && opts.trials >= 1, "need N >= 1 and trials >= 1");
    let skeleton = Arc::new(materialize(spec));
    let devs = (0..opts.trials)
        .into_par_iter()
        .map(|t| trial(&skeleton, &mut trial_rng(opts.seed, t)))
        .collect::<Result<Vec<f64>>>()?;
    let (worst_trial, max_deviation) = devs
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, d)| if d > best.1 { (i, d) } else { best });
    Ok(InvarianceReport {
        check: check.to_string(),
        spec_digest: spec_digest(spec),
        dim: opts.dim,
        trials: opts.trials,
        seed: opts.seed,
        tol: opts.tol,
        max_deviation,
        worst_trial,
        pass: max_deviation <= opts.tol,
    })
}

/// Draws random tensors, a random σ and random unitaries, and compares the
/// contraction before and after rotating every tensor index.
pub fn check_unitary_invariance(spec: &ContractionSpec, opts: CheckOptions, mode: UnitaryMode) -> Result<InvarianceReport> {
    let d = spec.d();
    if let UnitaryMode::OneColor(c) = mode {
        if c == 0 || c > d {
            return Err(Error::ColorOutOfRange { color: c, d });
        }
    }
    let name = match mode {
        UnitaryMode::AllColors => "unitary".to_string(),
        UnitaryMode::OneColor(c) => format!("unitary[color {c}]"),
        UnitaryMode::NonUnitary => "unitary[non-unitary control]".to_string(),
    };
    run_trials(spec, &name, opts, |sk, rng| {
        let n = opts.dim;
        let graph = ColoredBipartiteGraph::new(Arc::clone(sk), SigmaTuple::random(sk, rng))?;
        let white = TensorFamily::random(spec.lambda(), n, rng);
        let black = TensorFamily::random(spec.gamma(), n, rng);
        let u = match mode {
            UnitaryMode::AllColors => UnitaryAssignment::random(d, n, rng),
            UnitaryMode::OneColor(c) => {
                let mut u = UnitaryAssignment::identity(d, n);
                u.set_color(c, random_unitary(n, rng));
                u
            }
            UnitaryMode::NonUnitary => {
                let mut u = UnitaryAssignment::random(d, n, rng);
                u.set_color(1, random_gaussian_matrix(n, rng));
                u
            }
        };
        let before = evaluate(&graph, &white, &black)?;
        let after = evaluate(
            &graph,
            &transform(&white, &u, false)?,
            &transform(&black, &u, false)?,
        )?;
        Ok(relative_deviation(before, after))
    })
}

/// The white vertices swapped by the cross-type control: the first pair of
/// different types that share a color.
fn cross_type_pair(sk: &Skeleton) -> Option<(usize, usize)> {
    let blocks = sk.white().blocks();
    for (i, (a, ra)) in blocks.iter().enumerate() {
        for (b, rb) in &blocks[i + 1..] {
            if a.colors().any(|c| b.contains(c)) {
                return Some((ra.start, rb.start));
            }
        }
    }
    None
}

/// σ with white vertices `v` and `w` exchanged in every section containing both.
fn swap_white(sk: &Skeleton, sigma: &SigmaTuple, v: usize, w: usize) -> SigmaTuple {
    let maps = sk
        .colors()
        .map(|c| {
            let mut m = sigma.color(c).to_vec();
            if let (Some(i), Some(j)) = (sk.white().position(v, c), sk.white().position(w, c)) {
                m.swap(i, j);
            }
            m
        })
        .collect();
    SigmaTuple::from_arrays(maps)
}

/// Compares the contraction at σ and at `(π, η)·σ` for random gauge elements.
pub fn check_gauge_invariance(spec: &ContractionSpec, opts: CheckOptions, mode: GaugeMode) -> Result<InvarianceReport> {
    let pair = match mode {
        GaugeMode::Symmetry => None,
        GaugeMode::CrossType => Some(cross_type_pair(&materialize(spec)).ok_or_else(|| {
            Error::BadGroupElement("no two white vertices of different types share a color".into())
        })?),
    };
    let name = match mode {
        GaugeMode::Symmetry => "gauge",
        GaugeMode::CrossType => "gauge[cross-type control]",
    };
    run_trials(spec, name, opts, |sk, rng| {
        let sigma = SigmaTuple::random(sk, rng);
        let white = TensorFamily::random(spec.lambda(), opts.dim, rng);
        let black = TensorFamily::random(spec.gamma(), opts.dim, rng);
        let moved = match pair {
            None => {
                let pi = SymmetryGroupElement::random(sk.white(), rng);
                let eta = SymmetryGroupElement::random(sk.black(), rng);
                act(sk, &pi, &eta, &sigma)
            }
            Some((v, w)) => swap_white(sk, &sigma, v, w),
        };
        let before = evaluate(&ColoredBipartiteGraph::new(Arc::clone(sk), sigma)?, &white, &black)?;
        let after = evaluate(&ColoredBipartiteGraph::new(Arc::clone(sk), moved)?, &white, &black)?;
        Ok(relative_deviation(before, after))
    })
}

/// Comparison of the multiple-order and fixed-order readings of one σ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReport {
    pub kernel_equal: bool,
    pub multi_order: [f64; 2],
    pub fixed_order: [f64; 2],
    pub deviation: f64,
    pub pass: bool,
}

/// Largest number of index assignments the direct fixed-order sum may visit.
pub const DIRECT_SUM_BOUND: u64 = 10_000_000;

/// Direct fixed-order contraction of `n` copies of `t` against `n` copies of
/// `conj(r)`: sum over the white indices `a^i_c` with the black indices set by
/// the kernel, `b^{σ_c(i)}_c = a^i_c`.
pub fn fixed_order_value(d: u32, sigma: &SigmaTuple, t: &[Complex64], r: &[Complex64], dim: usize) -> Result<Complex64> {
    let n_t = sigma.color(1).len();
    let d = d as usize;
    let vars = n_t * d;
    let size = (dim as u64).checked_pow(vars as u32).filter(|&s| s <= DIRECT_SUM_BOUND);
    if size.is_none() {
        return Err(Error::TooLarge {
            size: format!("{dim}^{vars}"),
            bound: DIRECT_SUM_BOUND,
        });
    }
    let mut a = vec![0usize; vars];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut term = Complex64::new(1.0, 0.0);
        for i in 0..n_t {
            term *= t[(0..d).fold(0, |acc, c| acc * dim + a[i * d + c])];
        }
        let mut b = vec![0usize; vars];
        for c in 0..d {
            for (i, &j) in sigma.arrays()[c].iter().enumerate() {
                b[j * d + c] = a[i * d + c];
            }
        }
        for j in 0..n_t {
            term *= r[(0..d).fold(0, |acc, c| acc * dim + b[j * d + c])].conj();
        }
        total += term;
        // odometer
        let mut k = vars;
        loop {
            if k == 0 {
                return Ok(total);
            }
            k -= 1;
            a[k] += 1;
            if a[k] < dim {
                break;
            }
            a[k] = 0;
        }
    }
}

/// For a spec whose vertices all carry every color, checks that the
/// multiple-order kernel coincides with the fixed-order one and that both
/// evaluations agree on random tensors.
pub fn fixed_order_reduction_check(
    spec: &ContractionSpec,
    sigma: &SigmaTuple,
    dim: usize,
    seed: u64,
    tol: f64,
) -> Result<ReductionReport> {
    if !spec.is_single_full_type() {
        return Err(Error::NotFullType { d: spec.d() });
    }
    let sk = Arc::new(materialize(spec));
    let graph = ColoredBipartiteGraph::new(Arc::clone(&sk), sigma.clone())?;
    let mut fixed_kernel: Vec<(Color, usize, usize)> = sk
        .colors()
        .flat_map(|c| {
            sigma
                .color(c)
                .iter()
                .enumerate()
                .map(move |(i, &j)| (c, i, j))
        })
        .collect();
    fixed_kernel.sort_unstable();
    let multi_kernel: Vec<(Color, usize, usize)> = graph
        .edges()?
        .into_iter()
        .map(|e| (e.color, e.white, e.black))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let white = TensorFamily::random(spec.lambda(), dim, &mut rng);
    let black = TensorFamily::random(spec.gamma(), dim, &mut rng);
    let full = ColorType::full(spec.d());
    let multi = evaluate(&graph, &white, &black)?;
    let fixed = fixed_order_value(
        spec.d(),
        sigma,
        white.require(full)?,
        black.require(full)?,
        dim,
    )?;
    let deviation = relative_deviation(fixed, multi);
    let kernel_equal = fixed_kernel == multi_kernel;
    Ok(ReductionReport {
        kernel_equal,
        multi_order: [multi.re, multi.im],
        fixed_order: [fixed.re, fixed.im],
        deviation,
        pass: kernel_equal && deviation <= tol,
    })
}
