use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Compiled, Expr, ExprError};

/// Seed for every sampled verdict, so certificates are reproducible.
pub const DEFAULT_SEED: u64 = 0x5CA7_7E12;

/// Axis-aligned sampling box, one closed interval per variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub axes: Vec<(String, f64, f64)>,
}

impl BoxDomain {
    pub fn new(axes: Vec<(String, f64, f64)>) -> BoxDomain {
        BoxDomain { axes }
    }

    pub fn cube(vars: &[&str], lo: f64, hi: f64) -> BoxDomain {
        BoxDomain { axes: vars.iter().map(|v| (v.to_string(), lo, hi)).collect() }
    }

    pub fn names(&self) -> Vec<String> {
        self.axes.iter().map(|a| a.0.clone()).collect()
    }

    fn check(&self) -> Result<(), ExprError> {
        for (name, lo, hi) in &self.axes {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(ExprError::EmptyDomain(format!("{name} in [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Deterministic low-discrepancy points: a Halton sequence shifted by a
    /// seeded random offset (Cranley-Patterson rotation).
    pub fn samples(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let d = self.axes.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let primes = first_primes(d);
        (1..=n)
            .map(|i| {
                (0..d)
                    .map(|k| {
                        let u = (radical_inverse(i as u64, primes[k]) + shift[k]).fract();
                        let (_, lo, hi) = &self.axes[k];
                        lo + (hi - lo) * u
                    })
                    .collect()
            })
            .collect()
    }
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Multiplier on the first-order rounding bound, covering the neglected
/// higher-order terms.
pub const ROUNDING_SAFETY: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ZeroVerdict {
    ProvenZero,
    /// `margin` is the smallest `tolerance + rounding bound - |value|` over
    /// the samples.
    NumericallyZero { max_abs: f64, tolerance: f64, samples: usize, margin: f64 },
    Nonzero { point: Vec<(String, f64)>, value: f64 },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::Nonzero { .. })
    }
}

impl Expr {
    /// Two-tier zero test: symbolic expansion first, then seeded sampling.
    pub fn is_zero(&self, domain: &BoxDomain, n_samples: usize, tol: f64) -> Result<ZeroVerdict, ExprError> {
        self.is_zero_seeded(domain, n_samples, tol, DEFAULT_SEED)
    }

    pub fn is_zero_seeded(
        &self,
        domain: &BoxDomain,
        n_samples: usize,
        tol: f64,
        seed: u64,
    ) -> Result<ZeroVerdict, ExprError> {
        domain.check()?;
        if n_samples == 0 {
            return Err(ExprError::EmptyDomain("no samples requested".into()));
        }
        if self.is_const_zero() || self.expand().is_const_zero() {
            return Ok(ZeroVerdict::ProvenZero);
        }
        let names = domain.names();
        for v in self.free_vars() {
            if !names.contains(&v) {
                return Err(ExprError::UnboundVariable(v));
            }
        }
        let compiled = Compiled::new(self, &names)?;
        let mut max_abs: f64 = 0.0;
        let mut margin = f64::INFINITY;
        for p in domain.samples(n_samples, seed) {
            let (v, err) = compiled.eval_with_error(&p);
            if !v.is_finite() {
                let at: Vec<String> = names.iter().zip(&p).map(|(n, x)| format!("{n}={x}")).collect();
                return Err(ExprError::Domain {
                    subtree: "sampled expression".into(),
                    reason: format!("non-finite value at {}", at.join(", ")),
                });
            }
            // Cancellation inside a large expression can leave a residual
            // that f64 cannot resolve; only what exceeds the bound counts.
            let allowance = tol + ROUNDING_SAFETY * err;
            if v.abs() > allowance {
                return Ok(ZeroVerdict::Nonzero { point: names.iter().cloned().zip(p).collect(), value: v });
            }
            max_abs = max_abs.max(v.abs());
            margin = margin.min(allowance - v.abs());
        }
        Ok(ZeroVerdict::NumericallyZero { max_abs, tolerance: tol, samples: n_samples, margin })
    }
}
