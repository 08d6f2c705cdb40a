use serde::{Deserialize, Serialize};

use super::{ClusterError, Coefficient, CoefficientMode, ExchangeMatrix, GenSeed};
use crate::laurent::{is_reserved_name, LaurentPoly, ParseError, PolyRing};
use crate::ring::{CyclotomicField, RingError};

#[derive(Debug, thiserror::Error)]
pub enum SeedFileError {
    #[error("seed file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("seed file: expression {text:?}: {source}")]
    Parse { text: String, source: ParseError },
    #[error("seed file: n = {n} but {what} has length {got}")]
    Length { n: usize, what: &'static str, got: usize },
    #[error("seed file: name {0:?} is reserved for field elements")]
    ReservedName(String),
    #[error("seed file: theta entry {0:?} is not a coefficient monomial")]
    NotMonomial(String),
    #[error("seed file: {0}")]
    Cluster(#[from] ClusterError),
    #[error("seed file: {0}")]
    Ring(#[from] RingError),
}

/// JSON seed description.
///
/// `theta[i]` lists `p_{i;0} .. p_{i;d_i}` as expressions in `w` (or `w{p}`)
/// and, in tracked mode, the declared generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFile {
    pub n: usize,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    pub d: Vec<u32>,
    pub theta: Vec<Vec<String>>,
    pub mode: CoefficientMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orders: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
    /// Current cluster in the initial variables; omitted for an initial seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<Vec<String>>,
}

fn default_names(n: usize) -> Vec<String> {
    match n {
        2 => vec!["x".into(), "y".into()],
        _ => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

impl SeedFile {
    pub fn from_json(text: &str) -> Result<Self, SeedFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("seed file serializes")
    }

    pub fn to_seed(&self) -> Result<GenSeed, SeedFileError> {
        let n = self.n;
        for (what, got) in [("B", self.b.len()), ("d", self.d.len()), ("theta", self.theta.len())] {
            if got != n {
                return Err(SeedFileError::Length { n, what, got });
            }
        }
        let names = self.variables.clone().unwrap_or_else(|| default_names(n));
        if names.len() != n {
            return Err(SeedFileError::Length {
                n,
                what: "variables",
                got: names.len(),
            });
        }
        let field = CyclotomicField::for_orders(&self.orders)?;
        let all_names: Vec<String> = names.iter().chain(&self.generators).cloned().collect();
        if let Some(bad) = all_names.iter().find(|n| is_reserved_name(n)) {
            return Err(SeedFileError::ReservedName(bad.clone()));
        }
        let ring = PolyRing::new(field, all_names);
        let parse = |text: &String| {
            LaurentPoly::parse(&ring, text).map_err(|source| SeedFileError::Parse {
                text: text.clone(),
                source,
            })
        };
        let mut coeffs = Vec::with_capacity(n);
        for tuple in &self.theta {
            let mut t = Vec::with_capacity(tuple.len());
            for text in tuple {
                let poly = parse(text)?;
                let c = if poly.is_zero() {
                    Coefficient::scalar(ring.field().zero(), self.generators.len())
                } else {
                    let (m, s) = poly.as_monomial().ok_or_else(|| SeedFileError::NotMonomial(text.clone()))?;
                    if m.0[..n].iter().any(|&e| e != 0) {
                        return Err(SeedFileError::NotMonomial(text.clone()));
                    }
                    Coefficient {
                        scalar: s.clone(),
                        exps: m.0[n..].to_vec(),
                    }
                };
                t.push(c);
            }
            coeffs.push(t);
        }
        let matrix = ExchangeMatrix::new(self.b.clone(), self.d.clone())?;
        let seed = match &self.cluster {
            None => GenSeed::new(ring, matrix, coeffs, self.mode)?,
            Some(texts) => {
                if texts.len() != n {
                    return Err(SeedFileError::Length {
                        n,
                        what: "cluster",
                        got: texts.len(),
                    });
                }
                let cluster = texts.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
                GenSeed::with_cluster(ring, cluster, matrix, coeffs, self.mode)?
            }
        };
        Ok(seed)
    }

    pub fn from_seed(seed: &GenSeed) -> SeedFile {
        let n = seed.rank();
        let ring = seed.ring();
        let names = ring.names()[..n].to_vec();
        let initial = (0..n).all(|i| seed.cluster()[i] == LaurentPoly::var(ring, i));
        SeedFile {
            n,
            b: seed.matrix().rows(),
            d: seed.matrix().d().to_vec(),
            theta: (0..n)
                .map(|i| seed.coefficient_polys(i).iter().map(ToString::to_string).collect())
                .collect(),
            mode: seed.mode(),
            orders: ring.field().orders().to_vec(),
            variables: (names != default_names(n)).then_some(names),
            generators: ring.names()[n..].to_vec(),
            cluster: (!initial).then(|| seed.cluster().iter().map(ToString::to_string).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::golden::{golden_seed, Rank2Type};

    #[test]
    fn seed_file_round_trip() {
        let text = r#"{"n": 2, "B": [[0, 2], [-1, 0]], "d": [2, 1],
            "theta": [["1", "w", "1"], ["1", "1"]], "mode": "fixed", "orders": [5]}"#;
        let file = SeedFile::from_json(text).unwrap();
        let seed = file.to_seed().unwrap();
        assert_eq!(SeedFile::from_seed(&seed), file);
        let mutated = seed.mutate(0).unwrap();
        let back = SeedFile::from_seed(&mutated).to_seed().unwrap();
        assert_eq!(back, mutated);
        let json = SeedFile::from_seed(&mutated).to_json();
        assert_eq!(SeedFile::from_json(&json).unwrap().to_json(), json);
    }

    #[test]
    fn tracked_seed_round_trip() {
        let seed = golden_seed(Rank2Type::G2);
        let seeds = crate::cluster::mutation_sequence(&seed, &[0, 1, 0]).unwrap();
        for s in seeds {
            assert_eq!(SeedFile::from_seed(&s).to_seed().unwrap(), s);
        }
    }

    #[test]
    fn rejects_bad_files() {
        let bad = r#"{"n": 2, "B": [[0, 2], [-1, 0]], "d": [2, 1],
            "theta": [["1", "2", "1"], ["1", "x"]], "mode": "fixed"}"#;
        assert!(matches!(
            SeedFile::from_json(bad).unwrap().to_seed(),
            Err(SeedFileError::NotMonomial(_))
        ));
        let not_reciprocal = r#"{"n": 2, "B": [[0, 2], [-1, 0]], "d": [2, 1],
            "theta": [["1", "2", "3"], ["1", "1"]], "mode": "fixed"}"#;
        assert!(SeedFile::from_json(not_reciprocal).unwrap().to_seed().is_err());
    }
}
