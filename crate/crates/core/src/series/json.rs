//! JSON literal forms:
//! `{"dim":2,"cap":12,"coeffs":[{"alpha":[1,0],"beta":[1,0],"re":1.0,"im":0.0}]}`
//! for sesqui series and the same without `beta` for holomorphic ones.
//! Only nonzero coefficients are written.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::MultiIndex;
use super::holo::HoloSeries;
use super::sesqui::SesquiSeries;
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SesquiTerm {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SesquiJson {
    pub dim: usize,
    pub cap: usize,
    pub coeffs: Vec<SesquiTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloTerm {
    pub alpha: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HoloJson {
    pub dim: usize,
    pub cap: usize,
    pub coeffs: Vec<HoloTerm>,
}

fn check_unique<K: Ord + Clone + std::fmt::Debug>(keys: impl Iterator<Item = K>) -> Result<(), Error> {
    let mut seen = std::collections::BTreeSet::new();
    for k in keys {
        if !seen.insert(k.clone()) {
            return Err(Error::InvalidOperand(format!("duplicate coefficient entry {k:?}")));
        }
    }
    Ok(())
}

impl TryFrom<SesquiJson> for SesquiSeries {
    type Error = Error;

    fn try_from(j: SesquiJson) -> Result<Self, Error> {
        check_unique(j.coeffs.iter().map(|t| (t.alpha.clone(), t.beta.clone())))?;
        SesquiSeries::from_terms(
            j.dim,
            j.cap,
            j.coeffs.into_iter().map(|t| {
                (
                    MultiIndex::new(t.alpha),
                    MultiIndex::new(t.beta),
                    Complex64::new(t.re, t.im),
                )
            }),
        )
    }
}

impl From<SesquiSeries> for SesquiJson {
    fn from(s: SesquiSeries) -> Self {
        SesquiJson {
            dim: s.dim(),
            cap: s.cap(),
            coeffs: s
                .terms()
                .map(|(a, b, c)| SesquiTerm {
                    alpha: a.entries().to_vec(),
                    beta: b.entries().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<HoloJson> for HoloSeries {
    type Error = Error;

    fn try_from(j: HoloJson) -> Result<Self, Error> {
        check_unique(j.coeffs.iter().map(|t| t.alpha.clone()))?;
        HoloSeries::from_terms(
            j.dim,
            j.cap,
            j.coeffs
                .into_iter()
                .map(|t| (MultiIndex::new(t.alpha), Complex64::new(t.re, t.im))),
        )
    }
}

impl From<HoloSeries> for HoloJson {
    fn from(s: HoloSeries) -> Self {
        HoloJson {
            dim: s.dim(),
            cap: s.cap(),
            coeffs: s
                .terms()
                .map(|(a, c)| HoloTerm {
                    alpha: a.entries().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl Serialize for HoloSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HoloJson::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HoloSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = HoloJson::deserialize(d)?;
        HoloSeries::try_from(j).map_err(serde::de::Error::custom)
    }
}
