use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eval::{eval_numeric, Assignment, EvalError};
use super::Expr;

/// Parameters of the randomized identity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroTest {
    pub trials: u32,
    /// Relative tolerance for floating-point evaluations; exact ones compare exactly.
    pub tolerance: f64,
    pub seed: u64,
    /// Bit length of sampled numerators and denominators.
    pub bits: u32,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            trials: 8,
            tolerance: 1e-9,
            seed: 0,
            bits: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Zero,
    NonZero,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroCheck {
    pub verdict: Verdict,
    /// Samples actually evaluated (poles excluded).
    pub samples: u32,
}

impl ZeroCheck {
    pub fn is_zero(&self) -> bool {
        self.verdict == Verdict::Zero
    }
}

const REDRAWS: u32 = 16;

/// Uniform rational with numerator in `±(2^bits − 1)` and denominator in
/// `1..2^bits`.
pub fn sample_rational<R: Rng>(rng: &mut R, bits: u32) -> BigRational {
    let bound = (1i64 << bits.min(62)) - 1;
    let p = rng.gen_range(-bound..=bound);
    let q = rng.gen_range(1..=bound);
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Randomized identity test.
///
/// The canonical form is checked first; otherwise the expression is
/// evaluated at independent random rational points with every symbol,
/// opaque derivatives included, treated as a free variable. The sampler is
/// seeded from the test seed and the expression's structural hash, so a
/// verdict does not depend on what else was tested before.
pub fn is_zero(e: &Expr, test: &ZeroTest) -> ZeroCheck {
    if e.is_literal_zero() {
        return ZeroCheck {
            verdict: Verdict::Zero,
            samples: 0,
        };
    }
    if e.as_rational().is_some() {
        return ZeroCheck {
            verdict: Verdict::NonZero,
            samples: 0,
        };
    }
    let symbols: Vec<_> = e.symbols().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(test.seed ^ e.structural_hash());
    let mut samples = 0;
    for _ in 0..test.trials.max(1) {
        for _ in 0..REDRAWS {
            let assignment: Assignment = symbols
                .iter()
                .map(|s| (s.clone(), sample_rational(&mut rng, test.bits)))
                .collect();
            match eval_numeric(e, &assignment) {
                Ok(v) => {
                    samples += 1;
                    if !v.is_negligible(test.tolerance) {
                        return ZeroCheck {
                            verdict: Verdict::NonZero,
                            samples,
                        };
                    }
                    break;
                }
                Err(EvalError::DivisionByZero) | Err(EvalError::Domain(_)) => continue,
                Err(EvalError::Unassigned(_)) => unreachable!("every symbol is sampled"),
            }
        }
    }
    ZeroCheck {
        verdict: if samples == 0 {
            Verdict::Indeterminate
        } else {
            Verdict::Zero
        },
        samples,
    }
}
