//! Seeded sample webs for tests, the acceptance suite and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::expr::ZeroTest;

use super::VeroneseWeb;

/// A web together with the text it was parsed from.
#[derive(Debug, Clone)]
pub struct Sample {
    pub label: String,
    pub text: String,
    pub web: VeroneseWeb,
}

fn build(k: usize, label: String, text: String, test: &ZeroTest) -> Result<Sample> {
    let web = VeroneseWeb::parse(k, &text, VeroneseWeb::default_parameters(k), test)?;
    Ok(Sample { label, text, web })
}

/// `Σ s_i x_i − R(Σ x_i)` with `s_i = 1/(t_{k+1} − t_i)` for the default
/// parameters. `r` is written in terms of `u`.
pub fn hirota_family_text(k: usize, r: &str) -> String {
    let linear: Vec<String> = (0..=k).map(|i| format!("x{i}/{}", k + 1 - i)).collect();
    let sum: Vec<String> = (0..=k).map(|i| format!("x{i}")).collect();
    format!("{} - ({})", linear.join(" + "), r.replace('u', &format!("({})", sum.join(" + "))))
}

/// `Σ c_i x_i^{p_i}` with small random coefficients and powers.
pub fn separable_text<R: Rng>(rng: &mut R, k: usize) -> String {
    (0..=k)
        .map(|i| {
            let c = rng.gen_range(1..=4);
            let p = rng.gen_range(1..=3);
            if p == 1 {
                format!("{c}*x{i}")
            } else {
                format!("{c}*x{i}^{p}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// `Σ x_i` plus one or two random monomials of degree two or three.
pub fn random_polynomial_text<R: Rng>(rng: &mut R, k: usize) -> String {
    let mut terms: Vec<String> = (0..=k).map(|i| format!("x{i}")).collect();
    for _ in 0..rng.gen_range(1..=2) {
        let c = rng.gen_range(1..=3);
        let deg = rng.gen_range(2..=3);
        let factors: Vec<String> = (0..deg).map(|_| format!("x{}", rng.gen_range(0..=k))).collect();
        terms.push(format!("{c}*{}", factors.join("*")));
    }
    terms.join(" + ")
}

/// Mixed corpus over `k ∈ ks`: per `k`, `separable` separable webs,
/// `random` random polynomial webs and the non-flat Hirota solutions with
/// `R = u²` and `R = u³`.
pub fn mixed(ks: &[usize], separable: usize, random: usize, seed: u64, test: &ZeroTest) -> Result<Vec<Sample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &k in ks {
        for n in 0..separable {
            out.push(build(k, format!("separable k={k} #{n}"), separable_text(&mut rng, k), test)?);
        }
        for n in 0..random {
            out.push(build(k, format!("random k={k} #{n}"), random_polynomial_text(&mut rng, k), test)?);
        }
        for r in ["u^2", "u^3"] {
            out.push(build(k, format!("hirota k={k} R={r}"), hirota_family_text(k, r), test)?);
        }
    }
    Ok(out)
}

/// Random polynomial webs only, `count` in total, cycling through `ks`.
pub fn random_polynomials(ks: &[usize], count: usize, seed: u64, test: &ZeroTest) -> Result<Vec<Sample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|n| {
            let k = ks[n % ks.len()];
            build(k, format!("random k={k} #{n}"), random_polynomial_text(&mut rng, k), test)
        })
        .collect()
}
