//! Quasimorphisms on pure braid groups.
//!
//! The shipped evaluators are homomorphisms (linking numbers, their integer
//! combinations and the exponent sum); anything else plugs in through the
//! [`Quasimorphism`] trait and can declare its defect.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::braid::{BraidError, BraidWord, PureBraid};
use crate::mc::{self, Seed};
use crate::scalar::binomial;

pub trait Quasimorphism: Sync {
    fn name(&self) -> String;

    fn evaluate(&self, b: &PureBraid) -> f64;

    /// `delta(r) = sup |r(xy) - r(x) - r(y)|`, when known.
    fn declared_defect(&self) -> Option<f64>;

    fn is_homomorphism(&self) -> bool {
        self.declared_defect() == Some(0.0)
    }

    /// `max |r(A_ij)|` over the band generators of `P_n`.
    fn generator_max(&self, n_strands: usize) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..n_strands {
            for j in (i + 1)..n_strands {
                m = m.max(self.evaluate(&PureBraid::band_generator(n_strands, i, j)).abs());
            }
        }
        m
    }
}

/// `lk_ij` for strands `i < j` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkingNumber {
    pub i: usize,
    pub j: usize,
}

impl Quasimorphism for LinkingNumber {
    fn name(&self) -> String {
        format!("lk_{}{}", self.i + 1, self.j + 1)
    }

    fn evaluate(&self, b: &PureBraid) -> f64 {
        b.lk(self.i, self.j) as f64
    }

    fn declared_defect(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Signed letter count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentSum;

impl Quasimorphism for ExponentSum {
    fn name(&self) -> String {
        "exponent_sum".into()
    }

    fn evaluate(&self, b: &PureBraid) -> f64 {
        b.word().exponent_sum() as f64
    }

    fn declared_defect(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `sum c_ij lk_ij` with integer coefficients in lexicographic pair order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LkCombination {
    pub n_strands: usize,
    pub coefficients: Vec<i64>,
}

impl LkCombination {
    pub fn new(n_strands: usize, coefficients: Vec<i64>) -> Self {
        assert_eq!(coefficients.len(), binomial(n_strands, 2), "one coefficient per strand pair");
        LkCombination { n_strands, coefficients }
    }

    /// Sum of all pairwise linking numbers.
    pub fn total(n_strands: usize) -> Self {
        Self::new(n_strands, vec![1; binomial(n_strands, 2)])
    }

    pub fn l1_norm(&self) -> i64 {
        self.coefficients.iter().map(|c| c.abs()).sum()
    }
}

impl Quasimorphism for LkCombination {
    fn name(&self) -> String {
        let parts: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        format!("lk_combination[{}]", parts.join(","))
    }

    fn evaluate(&self, b: &PureBraid) -> f64 {
        assert_eq!(b.n_strands(), self.n_strands, "strand count of the combination");
        b.linking_numbers().iter().zip(&self.coefficients).map(|(l, c)| (l * c) as f64).sum()
    }

    fn declared_defect(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Evaluates on a word, rejecting non-pure input.
pub fn evaluate_word<Q: Quasimorphism + ?Sized>(qm: &Q, word: &BraidWord) -> Result<f64, BraidError> {
    Ok(qm.evaluate(&PureBraid::new(word.clone())?))
}

/// A uniformly random word of `len` band letters, freely reduced.
pub fn random_pure_braid<R: Rng + ?Sized>(n_strands: usize, len: usize, rng: &mut R) -> PureBraid {
    let mut b = PureBraid::identity(n_strands);
    if n_strands < 2 {
        return b;
    }
    for _ in 0..len {
        let i = rng.gen_range(0..n_strands - 1);
        let j = rng.gen_range(i + 1..n_strands);
        let a = PureBraid::band_generator(n_strands, i, j);
        let a = if rng.gen::<bool>() { a } else { a.inverse() };
        b = b.concat(&a).expect("same strand count");
    }
    b
}

/// `max |r(xy) - r(x) - r(y)|` over `n_pairs` random pairs: a lower bound
/// for the defect.
pub fn empirical_defect<Q: Quasimorphism + ?Sized>(
    qm: &Q,
    n_strands: usize,
    n_pairs: usize,
    word_length: usize,
    seed: Seed,
) -> f64 {
    mc::sample_map(seed, n_pairs, |rng, _| {
        let x = random_pure_braid(n_strands, word_length, rng);
        let y = random_pure_braid(n_strands, word_length, rng);
        let xy = x.concat(&y).expect("same strand count");
        (qm.evaluate(&xy) - qm.evaluate(&x) - qm.evaluate(&y)).abs()
    })
    .into_iter()
    .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Homogenized {
    pub value: f64,
    /// `delta(r) / k`; infinite when no defect is declared.
    pub error: f64,
}

/// `r(x^k) / k`, within `delta(r) / k` of the homogenization.
pub fn homogenize_value<Q: Quasimorphism + ?Sized>(qm: &Q, b: &PureBraid, k_max: usize) -> Homogenized {
    assert!(k_max >= 1, "power must be positive");
    if qm.is_homomorphism() {
        return Homogenized { value: qm.evaluate(b), error: 0.0 };
    }
    let k = k_max as f64;
    let value = qm.evaluate(&b.pow(k_max as i64)) / k;
    Homogenized { value, error: qm.declared_defect().unwrap_or(f64::INFINITY) / k }
}

/// `ceil(|r(g)| / (delta(r) + max_s |r(s)|))`, a lower bound for the band
/// word norm. `None` without a declared defect.
pub fn qm_lower_bound_word_norm<Q: Quasimorphism + ?Sized>(qm: &Q, b: &PureBraid, generator_max: f64) -> Option<u64> {
    let delta = qm.declared_defect()?;
    let r = qm.evaluate(b).abs();
    let denom = delta + generator_max;
    if r == 0.0 {
        return Some(0);
    }
    if denom <= 0.0 {
        return None;
    }
    // absorb rounding in exact integer ratios
    Some((r / denom - 1e-9).ceil().max(0.0) as u64)
}
