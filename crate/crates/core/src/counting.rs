//! Closed-form orbit counts in exact arithmetic.
//!
//! [`count_fixed`] evaluates `Z^d_n = Σ_{μ ⊢ n} Sym(μ)^{d-2}`. [`count_multi`]
//! evaluates the mixed-order formula: a sum over one partition per used color
//! type on each side, keeping only assignments whose per-color partition sums
//! agree, of `Π_c Sym(μ_c) / Π_A Sym(μ_A) Sym(ν_A)`.
//!
//! The mixed-order sum is accumulated as an integer numerator over the common
//! denominator `Π_A n(A)! Π_B m(B)!`: multiplying a summand by that constant
//! turns each `1/Sym(μ_A)` into the conjugacy class size `n(A)!/Sym(μ_A)`.
//! The final division must be exact; a remainder means a bug and is reported
//! as [`Error::NonIntegral`].

use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::colored::{Color, ColorType, ColoredVertexSet, ContractionSpec};
use crate::error::{Error, Result};
use crate::partitions::{factorial, partitions_of, Partition};

/// Exact value of the fixed-order sum, before any integrality check.
pub fn fixed_sum(d: u32, n: u32) -> BigRational {
    let mut acc = BigRational::zero();
    for mu in partitions_of(n) {
        let sym = mu.sym_factor();
        acc += if d >= 2 {
            BigRational::from_integer(sym.pow(d - 2).into())
        } else {
            BigRational::new(1.into(), sym.into())
        };
    }
    acc
}

/// Number of orbits `Z^d_n` for `n` tensors of order `d` against `n` conjugates.
pub fn count_fixed(d: u32, n: u32) -> Result<BigUint> {
    assert!(d >= 1 && n >= 1, "count_fixed needs d >= 1 and n >= 1");
    into_count(fixed_sum(d, n))
}

fn into_count(r: BigRational) -> Result<BigUint> {
    if !r.is_integer() {
        return Err(Error::NonIntegral {
            numer: r.numer().to_string(),
            denom: r.denom().to_string(),
        });
    }
    Ok(r.to_integer()
        .to_biguint()
        .expect("orbit sums are nonnegative"))
}

/// The mixed-order sum as `scaled / scale`, with `scale = Π n(A)! Π m(B)!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSum {
    pub scaled: BigUint,
    pub scale: BigUint,
}

impl OrbitSum {
    /// Reduced exact value.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.scaled.clone().into(), self.scale.clone().into())
    }

    pub fn into_count(self) -> Result<BigUint> {
        let (q, r) = self.scaled.div_rem(&self.scale);
        if !r.is_zero() {
            let red = self.to_rational();
            return Err(Error::NonIntegral {
                numer: red.numer().to_string(),
                denom: red.denom().to_string(),
            });
        }
        Ok(q)
    }
}

struct Slot {
    white: bool,
    ty: ColorType,
    // (partition, class size n!/Sym)
    choices: Vec<(Partition, BigUint)>,
}

struct Plan {
    slots: Vec<Slot>,
    // colors whose last participating slot is at this depth
    completes: Vec<Vec<Color>>,
}

impl Plan {
    fn new(spec: &ContractionSpec) -> Self {
        let mut slots: Vec<Slot> = Vec::new();
        for (white, set) in [(true, spec.lambda()), (false, spec.gamma())] {
            slots.extend(set.types().map(|(ty, n)| Slot {
                white,
                ty,
                choices: partitions_of(n as u32)
                    .into_iter()
                    .map(|mu| {
                        let size = mu.class_size();
                        (mu, size)
                    })
                    .collect(),
            }));
        }
        // cheap slots first so that colors close early and prune the product
        slots.sort_by_key(|s| s.choices.len());
        let mut completes = vec![Vec::new(); slots.len()];
        for c in 1..=spec.d() {
            let last = slots
                .iter()
                .rposition(|s| s.ty.contains(c))
                .expect("every color is used");
            completes[last].push(c);
        }
        Self { slots, completes }
    }

    fn scale(&self) -> BigUint {
        self.slots
            .iter()
            .map(|s| factorial(s.choices[0].0.weight()))
            .product()
    }

    // Sum of scaled summands over all completions of `chosen`.
    fn sum_from(&self, chosen: &mut Vec<usize>, acc: &BigUint) -> BigUint {
        let depth = chosen.len();
        if depth == self.slots.len() {
            return acc.clone();
        }
        let mut total = BigUint::zero();
        for (i, (_, size)) in self.slots[depth].choices.iter().enumerate() {
            chosen.push(i);
            if let Some(factor) = self.close_colors(chosen) {
                let next = acc * size * factor;
                total += self.sum_from(chosen, &next);
            }
            chosen.pop();
        }
        total
    }

    // Applies the δ test to the colors completed at the newest slot, returning
    // Π Sym(μ_c) over them, or None when some color's sums disagree.
    fn close_colors(&self, chosen: &[usize]) -> Option<BigUint> {
        let depth = chosen.len() - 1;
        let mut factor = BigUint::one();
        for &c in &self.completes[depth] {
            let mut white = Partition::empty();
            let mut black = Partition::empty();
            for (slot, &i) in self.slots.iter().zip(chosen) {
                if slot.ty.contains(c) {
                    let target = if slot.white { &mut white } else { &mut black };
                    target.absorb(&slot.choices[i].0);
                }
            }
            if white != black {
                return None;
            }
            factor *= white.sym_factor();
        }
        Some(factor)
    }
}

/// Exact mixed-order orbit sum, before the integrality check.
pub fn orbit_sum(spec: &ContractionSpec) -> OrbitSum {
    let plan = Plan::new(spec);
    let scale = plan.scale();
    // the first slot's choices are summed in parallel; integer addition makes
    // the result independent of scheduling
    let scaled = (0..plan.slots[0].choices.len())
        .into_par_iter()
        .map(|i| {
            let mut chosen = vec![i];
            match plan.close_colors(&chosen) {
                Some(factor) => {
                    let acc = &plan.slots[0].choices[i].1 * factor;
                    plan.sum_from(&mut chosen, &acc)
                }
                None => BigUint::zero(),
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    OrbitSum { scaled, scale }
}

/// Number of orbits `Z(Λ, Γ)` of the relabeling action on σ-tuples.
pub fn count_multi(spec: &ContractionSpec) -> Result<BigUint> {
    orbit_sum(spec).into_count()
}

/// A grid of counts; `cells[i][j]` belongs to `rows[i]` and `columns[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    /// Name of the row parameter (`"n"` or `"s"`); columns are always `d`.
    pub row_label: String,
    pub rows: Vec<u32>,
    pub columns: Vec<u32>,
    pub cells: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn get(&self, row: u32, column: u32) -> Option<&BigUint> {
        let i = self.rows.iter().position(|&r| r == row)?;
        let j = self.columns.iter().position(|&c| c == column)?;
        Some(&self.cells[i][j])
    }
}

fn nonempty(r: &RangeInclusive<u32>, what: &str) -> Result<()> {
    if r.is_empty() {
        return Err(Error::EmptyRange(format!(
            "{what} = {}..={}",
            r.start(),
            r.end()
        )));
    }
    Ok(())
}

/// `Z^d_n` for every `d` in `orders` (columns) and `n` in `sizes` (rows).
pub fn count_table_fixed(orders: RangeInclusive<u32>, sizes: RangeInclusive<u32>) -> Result<CountTable> {
    nonempty(&orders, "d")?;
    nonempty(&sizes, "n")?;
    if *orders.start() == 0 || *sizes.start() == 0 {
        return Err(Error::EmptyRange("d and n start at 1".into()));
    }
    let columns: Vec<u32> = orders.collect();
    let rows: Vec<u32> = sizes.collect();
    let cells = rows
        .iter()
        .map(|&n| columns.iter().map(|&d| count_fixed(d, n)).collect())
        .collect::<Result<_>>()?;
    Ok(CountTable {
        row_label: "n".into(),
        rows,
        columns,
        cells,
    })
}

/// Counts for a one-parameter family of specs, `s` ranging over `params`.
pub fn count_sequence_multi<F>(family: F, params: RangeInclusive<u32>) -> Result<Vec<BigUint>>
where
    F: Fn(u32) -> Result<ContractionSpec>,
{
    nonempty(&params, "s")?;
    params
        .map(|s| {
            let spec = family(s).map_err(|e| Error::Family {
                s,
                source: Box::new(e),
            })?;
            count_multi(&spec)
        })
        .collect()
}

/// `s` order-`d` tensors against `s - 1` conjugate order-`d` tensors plus a
/// fixed set of lower-order conjugate tensors (one of each listed type) that
/// restore compatibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationFamily {
    d: u32,
    extra: Vec<ColorType>,
}

impl ClassificationFamily {
    /// Family with the given lower-order black types. The types must cover
    /// each color exactly once for the family to be compatible.
    pub fn new(d: u32, extra: &[&[Color]]) -> Result<Self> {
        let extra = extra
            .iter()
            .map(|c| ColorType::new(c))
            .collect::<Result<_>>()?;
        Ok(Self { d, extra })
    }

    /// The built-in families for `d = 3..=9`, matching the published
    /// classification tables (matrices and vectors completing the colors).
    pub fn standard(d: u32) -> Option<Self> {
        let extra: &[&[Color]] = match d {
            3 => &[&[1, 2], &[3]],
            4 => &[&[1, 2], &[3], &[4]],
            5 => &[&[1, 2], &[3, 4], &[5]],
            6 => &[&[1, 2], &[3, 4], &[5], &[6]],
            7 => &[&[1, 2], &[3, 6], &[5, 7], &[4]],
            8 => &[&[1, 2], &[3, 6], &[5, 7], &[4, 8]],
            9 => &[&[1, 2], &[3, 6], &[5, 7], &[4, 8], &[9]],
            _ => return None,
        };
        Some(Self::new(d, extra).expect("valid built-in types"))
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn spec(&self, s: u32) -> Result<ContractionSpec> {
        let full = ColorType::full(self.d);
        let mut lambda = ColoredVertexSet::new(self.d);
        lambda.set(full, s as usize)?;
        let mut gamma = ColoredVertexSet::new(self.d);
        gamma.set(full, s.saturating_sub(1) as usize)?;
        for &ty in &self.extra {
            let n = gamma.count(ty);
            gamma.set(ty, n + 1)?;
        }
        ContractionSpec::new(lambda, gamma)
    }
}

/// Counts of the standard families for `d` in `orders` (columns) and `s` in
/// `params` (rows).
pub fn count_table_family(orders: RangeInclusive<u32>, params: RangeInclusive<u32>) -> Result<CountTable> {
    nonempty(&orders, "d")?;
    nonempty(&params, "s")?;
    let columns: Vec<u32> = orders.collect();
    let families = columns
        .iter()
        .map(|&d| {
            ClassificationFamily::standard(d)
                .ok_or_else(|| Error::EmptyRange(format!("no standard family for d = {d}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<u32> = params.clone().collect();
    let by_column = families
        .iter()
        .map(|f| count_sequence_multi(|s| f.spec(s), params.clone()))
        .collect::<Result<Vec<_>>>()?;
    let cells = (0..rows.len())
        .map(|i| by_column.iter().map(|col| col[i].clone()).collect())
        .collect();
    Ok(CountTable {
        row_label: "s".into(),
        rows,
        columns,
        cells,
    })
}

/// Decimal scientific notation with `sig` significant digits, rounding half up:
/// `191374041 -> "1.91e+08"`. The exponent has at least two digits.
pub fn scientific(value: &BigUint, sig: usize) -> String {
    assert!(sig >= 1);
    let digits = value.to_str_radix(10);
    let mut exp = digits.len() - 1;
    let mut mantissa: Vec<u8> = digits.bytes().map(|b| b - b'0').collect();
    if mantissa.len() > sig {
        let round_up = mantissa[sig] >= 5;
        mantissa.truncate(sig);
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    mantissa.insert(0, 1);
                    mantissa.truncate(sig);
                    exp += 1;
                    break;
                }
                i -= 1;
                if mantissa[i] == 9 {
                    mantissa[i] = 0;
                } else {
                    mantissa[i] += 1;
                    break;
                }
            }
        }
    }
    mantissa.resize(sig, 0);
    let mut out = mantissa[0].to_string();
    if sig > 1 {
        out.push('.');
        out.extend(mantissa[1..].iter().map(|d| char::from(b'0' + d)));
    }
    format!("{out}e+{exp:02}")
}

/// Number of σ-tuples, `Π_c m_c!`.
pub fn sigma_space_size(spec: &ContractionSpec) -> BigUint {
    (1..=spec.d())
        .map(|c| factorial(spec.multiplicity(c) as u64))
        .product()
}

/// Order of `H(Λ) × H(Γ)`, `Π_A n(A)! Π_B m(B)!`.
pub fn symmetry_group_order(spec: &ContractionSpec) -> BigUint {
    spec.lambda()
        .types()
        .chain(spec.gamma().types())
        .map(|(_, n)| factorial(n as u64))
        .product()
}

/// Lossy conversion for quick comparisons in reports.
pub fn approx_f64(value: &BigUint) -> f64 {
    value.to_f64().unwrap_or(f64::INFINITY)
}
