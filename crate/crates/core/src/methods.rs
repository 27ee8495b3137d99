//! Named constructions with their parameters, as used by documents and the command line.

use std::fmt;
use std::str::FromStr;

use crate::composite::{three_qubit_set, two_qubit_complete_set, two_qudit_complete_set};
use crate::error::{invalid, unsupported, MubError, Result};
use crate::field::is_prime;
use crate::matrix::{MubSet, Provenance};
use crate::prime::complete_prime_set;
use crate::product::{blocking_pair, product_mub_set};
use crate::wocjan_beth::wocjan_beth_mubs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Prime,
    PrimeSquared,
    TwoQubit,
    ThreeQubit,
    WocjanBeth,
    Product,
    BlockingPair,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Prime,
        Method::PrimeSquared,
        Method::TwoQubit,
        Method::ThreeQubit,
        Method::WocjanBeth,
        Method::Product,
        Method::BlockingPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Prime => "prime",
            Method::PrimeSquared => "prime-squared",
            Method::TwoQubit => "two-qubit",
            Method::ThreeQubit => "three-qubit",
            Method::WocjanBeth => "wocjan-beth",
            Method::Product => "product",
            Method::BlockingPair => "blocking-pair",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = MubError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| invalid(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Params {
    pub p: Option<u64>,
    pub theta: Option<u64>,
    pub d_a: Option<u64>,
    pub d_b: Option<u64>,
    pub r: Option<u64>,
}

impl From<&Provenance> for Params {
    fn from(p: &Provenance) -> Self {
        Params {
            p: p.p,
            theta: p.theta,
            d_a: p.d_a,
            d_b: p.d_b,
            r: p.r,
        }
    }
}

fn need(value: Option<u64>, flag: &str, method: Method) -> Result<u64> {
    value.ok_or_else(|| invalid(format!("method {method} needs --{flag}")))
}

fn need_prime(value: Option<u64>, flag: &str, method: Method) -> Result<u64> {
    let v = need(value, flag, method)?;
    if !is_prime(v) {
        return Err(unsupported(format!("{flag} = {v} is not prime")));
    }
    Ok(v)
}

/// Runs one construction. Non-prime dimensions are reported as unsupported.
pub fn generate(method: Method, params: &Params) -> Result<MubSet> {
    match method {
        Method::Prime => complete_prime_set(need_prime(params.p, "p", method)?),
        Method::PrimeSquared => {
            let p = need_prime(params.p, "p", method)?;
            if p == 2 {
                if params.theta.is_some() {
                    return Err(invalid("theta does not apply to p = 2"));
                }
                Ok(two_qubit_complete_set())
            } else {
                two_qudit_complete_set(p, params.theta)
            }
        }
        Method::TwoQubit => Ok(two_qubit_complete_set()),
        Method::ThreeQubit => Ok(three_qubit_set()),
        Method::WocjanBeth => wocjan_beth_mubs(need_prime(params.p, "p", method)? as usize, None),
        Method::Product => product_mub_set(need_prime(params.d_a, "dA", method)?, need_prime(params.d_b, "dB", method)?),
        Method::BlockingPair => {
            let r = params.r.unwrap_or(2);
            let r = u32::try_from(r).map_err(|_| invalid(format!("r = {r} is too large")))?;
            blocking_pair(need_prime(params.p, "p", method)?, r)
        }
    }
}

/// Rebuilds a set from a recorded provenance.
pub fn regenerate(provenance: &Provenance) -> Result<MubSet> {
    generate(provenance.method.parse()?, &Params::from(provenance))
}
