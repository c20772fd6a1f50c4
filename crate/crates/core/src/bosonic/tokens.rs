//! Token encoding with one rotation-then-ECD block per token, and learning the
//! per-token parameters so that encoded strings are far apart.

use super::{HybridState, QumodeConfig, RecdBlock};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::rng::rng_from_seed;
use crate::variational::TrainConfig;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenParams {
    pub theta: f64,
    pub phi: f64,
    pub beta: C64,
    pub learnable: bool,
}

impl TokenParams {
    pub fn new(theta: f64, phi: f64, beta: C64) -> Self {
        Self {
            theta,
            phi,
            beta,
            learnable: true,
        }
    }

    fn is_finite(&self) -> bool {
        self.theta.is_finite()
            && self.phi.is_finite()
            && self.beta.re.is_finite()
            && self.beta.im.is_finite()
    }

    fn to_vec(self) -> [f64; 4] {
        [self.theta, self.phi, self.beta.re, self.beta.im]
    }

    fn set_from(&mut self, v: &[f64]) {
        self.theta = v[0];
        self.phi = v[1];
        self.beta = C64::new(v[2], v[3]);
    }
}

fn is_true(b: &bool) -> bool {
    *b
}

fn yes() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenDoc {
    theta: f64,
    phi: f64,
    beta: [f64; 2],
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    learnable: bool,
}

/// Per-token block parameters, serialized as a JSON object keyed by token.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "BTreeMap<String, TokenDoc>",
    into = "BTreeMap<String, TokenDoc>"
)]
pub struct TokenDictionary {
    entries: BTreeMap<String, TokenParams>,
}

impl TryFrom<BTreeMap<String, TokenDoc>> for TokenDictionary {
    type Error = Error;

    fn try_from(docs: BTreeMap<String, TokenDoc>) -> Result<Self> {
        let mut dict = TokenDictionary::default();
        for (token, d) in docs {
            dict.insert(
                token,
                TokenParams {
                    theta: d.theta,
                    phi: d.phi,
                    beta: C64::new(d.beta[0], d.beta[1]),
                    learnable: d.learnable,
                },
            )?;
        }
        Ok(dict)
    }
}

impl From<TokenDictionary> for BTreeMap<String, TokenDoc> {
    fn from(dict: TokenDictionary) -> Self {
        dict.entries
            .into_iter()
            .map(|(k, p)| {
                (
                    k,
                    TokenDoc {
                        theta: p.theta,
                        phi: p.phi,
                        beta: [p.beta.re, p.beta.im],
                        learnable: p.learnable,
                    },
                )
            })
            .collect()
    }
}

impl TokenDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a token; duplicates, empty tokens and non-finite values are rejected.
    pub fn insert(&mut self, token: impl Into<String>, params: TokenParams) -> Result<()> {
        let token = token.into();
        if token.is_empty() {
            return Err(Error::validation("token must not be empty"));
        }
        if !params.is_finite() {
            return Err(Error::validation(format!(
                "token '{token}' has non-finite parameters"
            )));
        }
        if self.entries.contains_key(&token) {
            return Err(Error::validation(format!("duplicate token '{token}'")));
        }
        self.entries.insert(token, params);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Result<&TokenParams> {
        self.entries
            .get(token)
            .ok_or_else(|| Error::UnknownToken(token.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &TokenParams)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(format!("token dictionary: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dictionary serializes")
    }
}

/// Applies one block per token to the vacuum, in order.
pub fn encode_tokens<S: AsRef<str>>(
    tokens: &[S],
    dict: &TokenDictionary,
    config: QumodeConfig,
) -> Result<HybridState> {
    Ok(encode_tokens_traced(tokens, dict, config)?.0)
}

/// Like [`encode_tokens`], also returning the token of each block in application order.
pub fn encode_tokens_traced<S: AsRef<str>>(
    tokens: &[S],
    dict: &TokenDictionary,
    config: QumodeConfig,
) -> Result<(HybridState, Vec<String>)> {
    let mut cache: BTreeMap<&str, RecdBlock> = BTreeMap::new();
    for t in tokens {
        let t = t.as_ref();
        if !cache.contains_key(t) {
            let p = dict.get(t)?;
            cache.insert(t, RecdBlock::new(p.theta, p.phi, p.beta, config));
        }
    }
    let mut state = HybridState::vacuum(config);
    let mut trace = Vec::with_capacity(tokens.len());
    for t in tokens {
        cache[t.as_ref()].apply(&mut state);
        trace.push(t.as_ref().to_string());
    }
    Ok((state, trace))
}

/// Splits a token stream on whitespace.
pub fn tokenize_whitespace(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

/// One token per character, or greedy longest match against `vocabulary` when given.
pub fn tokenize_smiles(smiles: &str, vocabulary: Option<&[String]>) -> Result<Vec<String>> {
    let Some(vocab) = vocabulary else {
        return Ok(smiles
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(String::from)
            .collect());
    };
    let mut out = Vec::new();
    let mut rest = smiles.trim();
    while !rest.is_empty() {
        let best = vocab
            .iter()
            .filter(|t| !t.is_empty() && rest.starts_with(t.as_str()))
            .max_by_key(|t| t.len())
            .ok_or_else(|| {
                Error::UnknownToken(rest.chars().next().map(String::from).unwrap_or_default())
            })?;
        out.push(best.clone());
        rest = rest[best.len()..].trim_start();
    }
    Ok(out)
}

const FD_STEP: f64 = 1e-4;
const MAX_HALVINGS: usize = 30;
const JITTER_TRIES: usize = 16;
const FLAT_GRADIENT: f64 = 1e-9;

struct Problem<'a> {
    base: &'a TokenDictionary,
    corpus: &'a [Vec<String>],
    learnable: Vec<String>,
    config: QumodeConfig,
}

impl Problem<'_> {
    fn dictionary(&self, x: &[f64]) -> TokenDictionary {
        let mut dict = self.base.clone();
        for (i, t) in self.learnable.iter().enumerate() {
            dict.entries
                .get_mut(t)
                .expect("learnable token is in the dictionary")
                .set_from(&x[4 * i..4 * i + 4]);
        }
        dict
    }

    /// Mean pairwise `|⟨enc(a)|enc(b)⟩|²` over distinct corpus entries.
    fn loss(&self, x: &[f64]) -> f64 {
        let dict = self.dictionary(x);
        let states: Vec<HybridState> = self
            .corpus
            .iter()
            .map(|s| encode_tokens(s, &dict, self.config).expect("tokens were checked"))
            .collect();
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                total += super::state_overlap(&states[i], &states[j])
                    .expect("same cutoff")
                    .norm_sqr();
                pairs += 1;
            }
        }
        total / pairs as f64
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .into_par_iter()
            .map(|k| {
                let mut up = x.to_vec();
                let mut dn = x.to_vec();
                up[k] += FD_STEP;
                dn[k] -= FD_STEP;
                (self.loss(&up) - self.loss(&dn)) / (2.0 * FD_STEP)
            })
            .collect()
    }
}

/// Minimizes mean pairwise squared overlap of the corpus encodings.
///
/// Only learnable tokens that occur in the corpus move. Each step is a central
/// finite-difference gradient step of size `learning_rate`, halved until the loss
/// does not increase. At a flat point, where identical tokens make every gradient
/// vanish, a seeded random perturbation is tried instead and kept only if it lowers
/// the loss. Runs `train.epochs` steps.
pub fn optimize_token_params(
    dict: &TokenDictionary,
    corpus: &[Vec<String>],
    config: QumodeConfig,
    train: &TrainConfig,
) -> Result<TokenDictionary> {
    Ok(optimize_token_params_traced(dict, corpus, config, train)?.0)
}

/// Like [`optimize_token_params`], also returning the loss before the first step and
/// after every step.
pub fn optimize_token_params_traced(
    dict: &TokenDictionary,
    corpus: &[Vec<String>],
    config: QumodeConfig,
    train: &TrainConfig,
) -> Result<(TokenDictionary, Vec<f64>)> {
    train.validate()?;
    if corpus.len() < 2 {
        return Err(Error::validation(format!(
            "token optimization needs at least 2 corpus strings, got {}",
            corpus.len()
        )));
    }
    let mut used = std::collections::BTreeSet::new();
    for s in corpus {
        for t in s {
            dict.get(t)?;
            used.insert(t.clone());
        }
    }
    let learnable: Vec<String> = used
        .into_iter()
        .filter(|t| dict.entries[t].learnable)
        .collect();
    if learnable.is_empty() {
        return Err(Error::validation("no learnable token occurs in the corpus"));
    }

    let problem = Problem {
        base: dict,
        corpus,
        learnable,
        config,
    };
    let mut x: Vec<f64> = problem
        .learnable
        .iter()
        .flat_map(|t| dict.entries[t].to_vec())
        .collect();
    let mut loss = problem.loss(&x);
    let mut trace = vec![loss];
    let mut rng = rng_from_seed(train.seed);
    let lr = train.learning_rate;

    for _ in 0..train.epochs {
        let g = problem.gradient(&x);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm > FLAT_GRADIENT {
            let mut step = lr;
            for _ in 0..MAX_HALVINGS {
                let cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
                let l = problem.loss(&cand);
                if l <= loss {
                    x = cand;
                    loss = l;
                    break;
                }
                step /= 2.0;
            }
        } else {
            for _ in 0..JITTER_TRIES {
                let cand: Vec<f64> = x.iter().map(|xi| xi + rng.gen_range(-lr..lr)).collect();
                let l = problem.loss(&cand);
                if l < loss {
                    x = cand;
                    loss = l;
                    break;
                }
            }
        }
        trace.push(loss);
    }
    Ok((problem.dictionary(&x), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bosonic::state_overlap;
    use crate::linalg::ZERO;

    fn generic_dict() -> TokenDictionary {
        let mut d = TokenDictionary::new();
        d.insert("N", TokenParams::new(0.7, 0.2, C64::new(0.5, 0.1)))
            .unwrap();
        d.insert("C", TokenParams::new(1.3, -0.4, C64::new(-0.2, 0.6)))
            .unwrap();
        d.insert("O", TokenParams::new(2.1, 0.9, C64::new(0.3, -0.3)))
            .unwrap();
        d
    }

    fn strings(items: &[&str]) -> Vec<Vec<String>> {
        items
            .iter()
            .map(|s| tokenize_smiles(s, None).unwrap())
            .collect()
    }

    #[test]
    fn trace_follows_token_order() {
        let (_, trace) =
            encode_tokens_traced(&["N", "C", "C"], &generic_dict(), QumodeConfig::default())
                .unwrap();
        assert_eq!(trace, vec!["N", "C", "C"]);
    }

    #[test]
    fn empty_and_unknown() {
        let c = QumodeConfig::default();
        let empty: [&str; 0] = [];
        assert_eq!(
            encode_tokens(&empty, &generic_dict(), c).unwrap(),
            HybridState::vacuum(c)
        );
        assert_eq!(
            encode_tokens(&["N", "S"], &generic_dict(), c).unwrap_err(),
            Error::UnknownToken("S".into())
        );
    }

    #[test]
    fn order_matters() {
        let c = QumodeConfig::default();
        let a = encode_tokens(&["N", "C"], &generic_dict(), c).unwrap();
        let b = encode_tokens(&["C", "N"], &generic_dict(), c).unwrap();
        assert!(state_overlap(&a, &b).unwrap().norm() < 1.0 - 1e-6);
        assert_eq!(a, encode_tokens(&["N", "C"], &generic_dict(), c).unwrap());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let d = generic_dict();
        let back = TokenDictionary::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let text = r#"{"C": {"theta": 1, "phi": 0, "beta": [0.5, 0]}, "N": {"theta": 0, "phi": 0, "beta": [0, 0], "learnable": false}}"#;
        let d = TokenDictionary::from_json(text).unwrap();
        assert!(d.get("C").unwrap().learnable);
        assert!(!d.get("N").unwrap().learnable);
        assert!(TokenDictionary::from_json(r#"{"C": {"theta": 1, "phi": 0}}"#).is_err());
        assert!(
            TokenDictionary::from_json(r#"{"": {"theta": 1, "phi": 0, "beta": [0, 0]}}"#).is_err()
        );
    }

    #[test]
    fn smiles_tokenizers() {
        assert_eq!(tokenize_smiles("NCC", None).unwrap(), vec!["N", "C", "C"]);
        let vocab: Vec<String> = ["C", "Cl", "N", "O", "="]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            tokenize_smiles("ClC=O", Some(&vocab)).unwrap(),
            vec!["Cl", "C", "=", "O"]
        );
        assert_eq!(
            tokenize_smiles("CX", Some(&vocab)).unwrap_err(),
            Error::UnknownToken("X".into())
        );
        assert_eq!(tokenize_whitespace(" Cl  C\tO "), vec!["Cl", "C", "O"]);
    }

    #[test]
    fn degenerate_pair_separates() {
        let mut d = TokenDictionary::new();
        for t in ["A", "B"] {
            d.insert(t, TokenParams::new(0.5, 0.0, C64::new(0.3, 0.0)))
                .unwrap();
        }
        let c = QumodeConfig::new(8).unwrap();
        let corpus = vec![vec!["A".to_string()], vec!["B".to_string()]];
        let cfg = TrainConfig {
            learning_rate: 0.2,
            epochs: 20,
            ..TrainConfig::default()
        };
        let (out, trace) = optimize_token_params_traced(&d, &corpus, c, &cfg).unwrap();
        assert!((trace[0] - 1.0).abs() < 1e-12);
        for w in trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let a = encode_tokens(&corpus[0], &out, c).unwrap();
        let b = encode_tokens(&corpus[1], &out, c).unwrap();
        assert!(state_overlap(&a, &b).unwrap().norm() < 1.0);
    }

    #[test]
    fn orthogonal_pair_stays_put() {
        let mut d = TokenDictionary::new();
        d.insert("A", TokenParams::new(0.0, 0.0, ZERO)).unwrap();
        d.insert("B", TokenParams::new(std::f64::consts::PI, 0.0, ZERO))
            .unwrap();
        let c = QumodeConfig::new(4).unwrap();
        let corpus = strings(&["A", "B"]);
        let (_, trace) =
            optimize_token_params_traced(&d, &corpus, c, &TrainConfig::default()).unwrap();
        assert!(trace.iter().all(|l| l.abs() < 1e-6));
    }

    #[test]
    fn corpus_must_have_two_strings() {
        let c = QumodeConfig::default();
        let r = optimize_token_params(
            &generic_dict(),
            &strings(&["NC"]),
            c,
            &TrainConfig::default(),
        );
        assert!(matches!(r, Err(Error::Validation(_))));
    }
}
