//! JSON family description, so encodings can be shared with other tools.
//!
//! ```json
//! {
//!   "name": "DISKS", "d": 3, "lambda": ["edge", "non-edge"],
//!   "preds": [[{"exponents": [2,0,0,0,0,0], "coeff": "1/1"}, ...]],
//!   "phi": {"entries": {"-": "edge"}, "default": "non-edge"},
//!   "domain": {"polys": [[{"exponents": [0,0,1], "coeff": "1/1"}]], "accept": ["+"]}
//! }
//! ```
//!
//! Predicate indices in `seed_hint` are 1-based.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::framework::{DomainSpec, Family, FrameworkError, LabelSet, PhiTable, Predicate, SeedHint};
use crate::poly::{parse_rat, parse_signs, rat_to_string, signs_to_string, Point, PolyError, Polynomial, Rat, TermList};

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("malformed family file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
    #[error("bad sign string {0:?}")]
    BadSigns(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiSpec {
    pub entries: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainFileSpec {
    pub polys: Vec<TermList>,
    pub accept: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HintPair {
    pub b: Vec<String>,
    pub pred: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HintSpec {
    pub a_star: Vec<String>,
    pub pairs: Vec<HintPair>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub d: usize,
    pub lambda: Vec<String>,
    pub preds: Vec<TermList>,
    pub phi: PhiSpec,
    pub domain: DomainFileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_hint: Option<HintSpec>,
}

fn point_strings(p: &[Rat]) -> Vec<String> {
    p.iter().map(rat_to_string).collect()
}

fn parse_point(v: &[String]) -> Result<Point, PolyError> {
    v.iter().map(|s| parse_rat(s)).collect()
}

fn signs(s: &str) -> Result<Vec<crate::poly::Sign>, SpecFileError> {
    parse_signs(s).ok_or_else(|| SpecFileError::BadSigns(s.to_string()))
}

impl FamilySpec {
    /// Exports a family. Kernel predicates are expanded, which can be slow
    /// for large encodings.
    pub fn from_family(fam: &Family) -> Self {
        let preds = fam.preds.iter().map(|p| p.polynomial().to_term_list()).collect();
        let defaulted: BTreeSet<usize> = fam.phi.rows().filter(|r| r.2).map(|r| r.1).collect();
        let default = if defaulted.len() == 1 {
            defaulted.iter().next().map(|&l| fam.label_name(l).to_string())
        } else {
            None
        };
        let entries = fam
            .phi
            .rows()
            .filter(|(_, _, dflt)| !dflt || default.is_none())
            .map(|(s, l, _)| (signs_to_string(&s), fam.label_name(l).to_string()))
            .collect();
        FamilySpec {
            name: fam.name.clone(),
            d: fam.d,
            lambda: fam.lambda.names().to_vec(),
            preds,
            phi: PhiSpec { entries, default },
            domain: DomainFileSpec {
                polys: fam.domain.polys.iter().map(Polynomial::to_term_list).collect(),
                accept: fam.domain.accept.iter().map(|v| signs_to_string(v)).collect(),
            },
            seed_hint: fam.seed_hint.as_ref().map(|h| HintSpec {
                a_star: point_strings(&h.a_star),
                pairs: h
                    .pairs
                    .iter()
                    .map(|(b, s)| HintPair {
                        b: point_strings(b),
                        pred: s + 1,
                    })
                    .collect(),
            }),
        }
    }

    pub fn to_family(&self) -> Result<Family, SpecFileError> {
        let lambda = LabelSet::new(self.lambda.clone())?;
        let preds = self
            .preds
            .iter()
            .map(|t| Polynomial::from_term_list(2 * self.d, t).map(Predicate::from))
            .collect::<Result<Vec<_>, _>>()?;
        let mut entries = BTreeMap::new();
        for (s, l) in &self.phi.entries {
            entries.insert(signs(s)?, lambda.index_of(l)?);
        }
        let default = self.phi.default.as_deref().map(|l| lambda.index_of(l)).transpose()?;
        let phi = PhiTable::from_entries(preds.len(), &entries, default)?;
        let polys = self
            .domain
            .polys
            .iter()
            .map(|t| Polynomial::from_term_list(self.d, t))
            .collect::<Result<Vec<_>, _>>()?;
        let accept = self.domain.accept.iter().map(|s| signs(s)).collect::<Result<BTreeSet<_>, _>>()?;
        let domain = DomainSpec::new(self.d, polys, accept)?;
        let mut fam = Family::new(self.name.clone(), self.d, lambda, preds, phi, domain)?;
        if let Some(h) = &self.seed_hint {
            let pairs = h
                .pairs
                .iter()
                .map(|p| {
                    if p.pred == 0 || p.pred > fam.k() {
                        return Err(FrameworkError::InvalidFamily(format!("seed hint predicate {} out of range", p.pred)).into());
                    }
                    Ok((parse_point(&p.b)?, p.pred - 1))
                })
                .collect::<Result<Vec<_>, SpecFileError>>()?;
            fam = fam.with_seed_hint(SeedHint {
                a_star: parse_point(&h.a_star)?,
                pairs,
            });
        }
        Ok(fam)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SpecFileError> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, BuiltinFamilyId};
    use crate::poly::point;

    #[test]
    fn builtins_round_trip_through_json() {
        for id in [
            BuiltinFamilyId::Disks,
            BuiltinFamilyId::Segments,
            BuiltinFamilyId::CircleOrders,
            BuiltinFamilyId::PosetDim(3),
            BuiltinFamilyId::Boxes(2),
        ] {
            let fam = builtin(id);
            let spec = FamilySpec::from_family(&fam);
            let back = FamilySpec::from_json(&spec.to_json()).unwrap().to_family().unwrap();
            assert_eq!(back.name, fam.name);
            assert_eq!(back.preds, fam.preds);
            assert_eq!(back.phi, fam.phi);
            assert_eq!(back.domain, fam.domain);
            assert_eq!(back.seed_hint, fam.seed_hint);
        }
    }

    #[test]
    fn defaulted_entries_are_recorded() {
        let fam = builtin(BuiltinFamilyId::CircleOrders);
        let spec = FamilySpec::from_family(&fam);
        assert_eq!(spec.phi.default.as_deref(), Some("incomparable"));
        assert!(!spec.phi.entries.contains_key("+0"));
        let back = spec.to_family().unwrap();
        assert!(back.phi.is_defaulted(&parse_signs("+0").unwrap()));
        assert!(!back.phi.is_defaulted(&parse_signs("+-").unwrap()));
    }

    #[test]
    fn hand_written_file() {
        let text = r#"{
            "name": "half-lines", "d": 1, "lambda": ["before", "after", "tie"],
            "preds": [[{"exponents": [0, 1], "coeff": "1/1"}, {"exponents": [1, 0], "coeff": "-1/1"}]],
            "phi": {"entries": {"+": "before", "-": "after"}, "default": "tie"},
            "domain": {"polys": [], "accept": [""]}
        }"#;
        let fam = FamilySpec::from_json(text).unwrap().to_family().unwrap();
        assert_eq!(fam.label_name(fam.pair_label(&point(&[1]), &point(&[2])).unwrap()), "before");
        assert_eq!(fam.label_name(fam.pair_label(&point(&[2]), &point(&[2])).unwrap()), "tie");
    }

    #[test]
    fn rejects_bad_files() {
        assert!(FamilySpec::from_json("{").is_err());
        let missing = r#"{"name": "x", "d": 1, "lambda": ["a"],
            "preds": [[{"exponents": [0, 1], "coeff": "1/1"}]],
            "phi": {"entries": {"+": "a"}}, "domain": {"polys": [], "accept": [""]}}"#;
        assert!(FamilySpec::from_json(missing).unwrap().to_family().is_err());
        let bad_label = r#"{"name": "x", "d": 1, "lambda": ["a"],
            "preds": [[{"exponents": [0, 1], "coeff": "1/1"}]],
            "phi": {"entries": {}, "default": "zzz"}, "domain": {"polys": [], "accept": [""]}}"#;
        assert!(FamilySpec::from_json(bad_label).unwrap().to_family().is_err());
    }
}
