//! Job configuration: structured text (JSON) with exact rationals as
//! `"num/den"` strings, validated against the fan before any computation.

use num::{BigInt, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{check_nice_family, NiceFamily};
use crate::error::{Error, Result};
use crate::fano::FanData;
use crate::linalg::{Q, Z};
use crate::tropical::TropicalPolynomial;

/// Parse a rational from `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let parse_int = |x: &str| -> Result<Z> {
        x.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {x:?}: {e}")))
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let den = parse_int(b)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(parse_int(a)?, den))
        }
        None => Ok(Q::from_integer(parse_int(s)?)),
    }
}

/// Format a rational as `"a/b"` (or `"a"` when integral).
pub fn format_rational(q: &Q) -> String {
    if q.denom() == &Z::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational_vec(v: &[String]) -> Result<Vec<Q>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

pub fn format_rational_vec(v: &[Q]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FanConfig {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyMemberConfig {
    /// Divisor coefficient vector, one rational per ray.
    pub divisor: Vec<String>,
    /// Explicit tropical coefficients (exponent vector, value); when
    /// absent, random small integers are drawn from the seeded generator
    /// over the full lattice-point support, re-drawing on transversality
    /// failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<(Vec<i64>, String)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmoebaJobConfig {
    pub t_sequence: Vec<f64>,
    pub resolution: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputConfig {
    pub report: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

fn default_order() -> u32 {
    6
}

fn default_shrink() -> String {
    "1/4".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobConfig {
    pub fan: FanConfig,
    /// Region coefficients, one rational per ray.
    pub lambda: Vec<String>,
    pub family: Vec<FamilyMemberConfig>,
    #[serde(default = "default_order")]
    pub truncation_order: u32,
    #[serde(default = "default_shrink")]
    pub shrink: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amoeba: Option<AmoebaJobConfig>,
    pub outputs: OutputConfig,
}

impl JobConfig {
    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::ConfigInvalid(format!("{path}: {e}")))
    }

    pub fn fan_data(&self) -> Result<FanData> {
        let rays: Vec<Vec<Z>> = self
            .fan
            .rays
            .iter()
            .map(|r| r.iter().map(|&x| Z::from(x)).collect())
            .collect();
        let fan = FanData::new(self.fan.dim, rays);
        fan.validate()
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        Ok(fan)
    }

    pub fn shrink_value(&self) -> Result<Q> {
        parse_rational(&self.shrink)
    }
}

/// Bounded number of random re-draws before giving up on transversality.
pub const MAX_REDRAWS: usize = 64;

/// Absolute bound for randomly drawn integer tropical coefficients.
pub const COEFFICIENT_RANGE: i64 = 4;

/// Build the validated nice family from the configuration, drawing any
/// missing tropical coefficients from the seeded generator.  Returns the
/// family together with the coefficients actually used (for the report).
pub fn build_family(cfg: &JobConfig) -> Result<(NiceFamily, Vec<Vec<(Vec<i64>, String)>>)> {
    let fan = cfg.fan_data()?;
    let n = fan.dim;
    if cfg.lambda.len() != fan.p() {
        return Err(Error::ConfigInvalid(format!(
            "lambda has {} entries for {} rays",
            cfg.lambda.len(),
            fan.p()
        )));
    }
    if cfg.family.len() != n - 1 {
        return Err(Error::ConfigInvalid(format!(
            "family has {} members; dimension {n} needs {}",
            cfg.family.len(),
            n - 1
        )));
    }
    let lambda = parse_rational_vec(&cfg.lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut divisors = Vec::new();
    let mut supports = Vec::new();
    for member in &cfg.family {
        if member.divisor.len() != fan.p() {
            return Err(Error::ConfigInvalid("divisor vector length".into()));
        }
        let a = parse_rational_vec(&member.divisor)?;
        let polytope = fan
            .divisor_polytope(&a)
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        supports.push(polytope.lattice_points());
        divisors.push(a);
    }

    let explicit: Vec<Option<Vec<(Vec<Z>, Q)>>> = cfg
        .family
        .iter()
        .map(|m| {
            m.coefficients.as_ref().map(|cs| {
                cs.iter()
                    .map(|(e, v)| {
                        Ok((
                            e.iter().map(|&x| Z::from(x)).collect::<Vec<Z>>(),
                            parse_rational(v)?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()
            })
        })
        .map(|o| o.transpose())
        .collect::<Result<_>>()?;

    for _attempt in 0..MAX_REDRAWS {
        let mut polys = Vec::new();
        let mut used: Vec<Vec<(Vec<i64>, String)>> = Vec::new();
        for (k, support) in supports.iter().enumerate() {
            let terms: Vec<(Vec<Z>, Q)> = match &explicit[k] {
                Some(cs) => cs.clone(),
                None => support
                    .iter()
                    .map(|point| {
                        let c = rng.gen_range(-COEFFICIENT_RANGE..=COEFFICIENT_RANGE);
                        (point.clone(), Q::from_integer(Z::from(c)))
                    })
                    .collect(),
            };
            used.push(
                terms
                    .iter()
                    .map(|(e, c)| {
                        use num::ToPrimitive;
                        (
                            e.iter().map(|x| x.to_i64().unwrap()).collect(),
                            format_rational(c),
                        )
                    })
                    .collect(),
            );
            polys.push(TropicalPolynomial::new(n, terms)?);
        }
        let family = NiceFamily {
            fan: fan.clone(),
            lambda: lambda.clone(),
            divisors: divisors.clone(),
            polys,
        };
        match check_nice_family(&family) {
            Ok(_) => return Ok((family, used)),
            Err(Error::NotTransverse(_)) if explicit.iter().any(|e| e.is_none()) => {
                continue;
            }
            Err(e) => return Err(Error::ConfigInvalid(e.to_string())),
        }
    }
    Err(Error::ConfigInvalid(format!(
        "no transverse coefficient draw found in {MAX_REDRAWS} attempts"
    )))
}
