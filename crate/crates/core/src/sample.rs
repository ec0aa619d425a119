//! Random compatible specs, used by the oracle sweeps and property tests.

use rand::Rng;

use crate::colored::{Color, ColorType, ColoredVertexSet, ContractionSpec};

/// Draws a colored vertex set with the same color multiplicities as `lambda`.
///
/// Black vertices are peeled off one at a time, each taking a random nonempty
/// subset of the colors that still have unmatched multiplicity.
pub fn random_partner<R: Rng + ?Sized>(lambda: &ColoredVertexSet, rng: &mut R) -> ColoredVertexSet {
    let d = lambda.d();
    let mut remaining: Vec<usize> = (1..=d)
        .map(|c| lambda.color_multiplicity(c).expect("color in range"))
        .collect();
    let mut gamma = ColoredVertexSet::new(d);
    loop {
        let open: Vec<Color> = (1..=d).filter(|&c| remaining[c as usize - 1] > 0).collect();
        if open.is_empty() {
            break;
        }
        let mut picked: Vec<Color> = open.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if picked.is_empty() {
            picked.push(open[rng.gen_range(0..open.len())]);
        }
        for &c in &picked {
            remaining[c as usize - 1] -= 1;
        }
        let ty = ColorType::new(&picked).expect("nonempty");
        let n = gamma.count(ty);
        gamma.set(ty, n + 1).expect("colors within d");
    }
    gamma
}

/// Draws a random compatible spec with chromatic index `d`.
///
/// The white side gets between 1 and `max_types` distinct types with counts in
/// `1..=max_count`; colors missing from those types are covered by an extra
/// singleton type so that every color is in use.
pub fn random_spec<R: Rng + ?Sized>(
    rng: &mut R,
    d: u32,
    max_types: usize,
    max_count: usize,
) -> ContractionSpec {
    let full_mask = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
    let mut lambda = ColoredVertexSet::new(d);
    let types = rng.gen_range(1..=max_types.max(1));
    let mut covered = 0u64;
    for _ in 0..types {
        let mask = loop {
            let m = rng.gen::<u64>() & full_mask;
            if m != 0 {
                break m;
            }
        };
        let colors: Vec<Color> = (1..=d).filter(|c| mask & (1 << (c - 1)) != 0).collect();
        let ty = ColorType::new(&colors).expect("nonempty");
        lambda
            .set(ty, rng.gen_range(1..=max_count.max(1)))
            .expect("colors within d");
        covered |= mask;
    }
    let missing: Vec<Color> = (1..=d).filter(|c| covered & (1 << (c - 1)) == 0).collect();
    if !missing.is_empty() {
        let ty = ColorType::new(&missing).expect("nonempty");
        lambda.set(ty, 1).expect("colors within d");
    }
    let gamma = random_partner(&lambda, rng);
    ContractionSpec::new(lambda, gamma).expect("partner is compatible by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_specs_are_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let d = rng.gen_range(1..=5);
            let spec = random_spec(&mut rng, d, 3, 3);
            for c in 1..=d {
                assert_eq!(
                    spec.lambda().color_multiplicity(c),
                    spec.gamma().color_multiplicity(c)
                );
                assert!(spec.multiplicity(c) > 0);
            }
        }
    }
}
