use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::render::{Caption, CaptionPair, Renderer};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecoratorError {
    #[error("invalid decorator config: {0}")]
    InvalidConfig(String),
    #[error("environment variable {0} holding the decorator API key is not set")]
    MissingApiKey(String),
    #[error("decorator unavailable: {0}")]
    Unavailable(String),
}

fn default_temperature() -> f64 {
    0.2
}

fn default_timeout() -> f64 {
    30.0
}

fn default_max_candidates() -> usize {
    10
}

fn default_in_flight() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoratorConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model_name: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    /// Name of the environment variable holding the API key. The key itself never appears
    /// in any config or output file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    #[serde(default = "default_max_candidates")]
    pub max_candidates: usize,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
}

impl Default for DecoratorConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            endpoint: None,
            model_name: String::new(),
            temperature: default_temperature(),
            api_key_env: None,
            timeout_s: default_timeout(),
            max_candidates: default_max_candidates(),
            max_in_flight: default_in_flight(),
        }
    }
}

impl DecoratorConfig {
    pub fn validate(&self) -> Result<(), DecoratorError> {
        let bad = |m: &str| Err(DecoratorError::InvalidConfig(m.to_string()));
        if !(0.0..=2.0).contains(&self.temperature) {
            return bad("temperature must lie in [0, 2]");
        }
        if !(self.timeout_s.is_finite() && self.timeout_s > 0.0) {
            return bad("timeout_s must be positive");
        }
        if self.max_candidates == 0 || self.max_in_flight == 0 {
            return bad("max_candidates and max_in_flight must be at least 1");
        }
        if self.enabled && (self.endpoint.is_none() || self.api_key_env.is_none()) {
            return bad("an enabled decorator needs endpoint and api_key_env");
        }
        Ok(())
    }
}

/// Source of rewritten captions.
pub trait Naturalizer: Sync {
    fn candidates(&self, prompt: &str) -> Result<Vec<String>, DecoratorError>;
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    temperature: f64,
    prompt: &'a str,
}

#[derive(Deserialize)]
struct WireResponse {
    candidates: Vec<String>,
}

/// Blocking HTTP client for the decorator service.
pub struct HttpNaturalizer {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    temperature: f64,
    api_key: String,
}

impl std::fmt::Debug for HttpNaturalizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpNaturalizer")
            .field("endpoint", &self.endpoint)
            .field("model", &self.model)
            .finish_non_exhaustive()
    }
}

impl HttpNaturalizer {
    pub fn from_config(config: &DecoratorConfig) -> Result<Self, DecoratorError> {
        config.validate()?;
        let (Some(endpoint), Some(var)) = (&config.endpoint, &config.api_key_env) else {
            return Err(DecoratorError::InvalidConfig("endpoint and api_key_env are required".into()));
        };
        let api_key = std::env::var(var).map_err(|_| DecoratorError::MissingApiKey(var.clone()))?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_s)))
            .build()
            .into();
        Ok(Self {
            agent,
            endpoint: endpoint.clone(),
            model: config.model_name.clone(),
            temperature: config.temperature,
            api_key,
        })
    }
}

impl Naturalizer for HttpNaturalizer {
    fn candidates(&self, prompt: &str) -> Result<Vec<String>, DecoratorError> {
        let body = WireRequest {
            model: &self.model,
            temperature: self.temperature,
            prompt,
        };
        let unavailable = |e: ureq::Error| DecoratorError::Unavailable(e.to_string());
        let response = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(unavailable)?;
        let parsed: WireResponse = response.into_body().read_json().map_err(unavailable)?;
        Ok(parsed.candidates)
    }
}

fn prompt(caption: &Caption, n: usize) -> String {
    let keep: Vec<String> = caption.anchors.iter().map(|a| format!("\"{a}\"")).collect();
    format!(
        "Write {n} alternative versions of the following video caption as fluent English \
         sentences, one per candidate. Do not add or remove facts. Keep these words exactly as \
         written: {}.\nCaption: {}",
        keep.join(", "),
        caption.text
    )
}

/// First candidate that keeps every anchor verbatim.
fn pick(caption: &Caption, candidates: &[String], max: usize) -> Option<String> {
    candidates
        .iter()
        .take(max)
        .map(|c| c.trim())
        .find(|c| !c.is_empty() && caption.anchors.iter().all(|a| c.contains(a.as_str())))
        .map(str::to_string)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecorateOutcome {
    Disabled,
    Decorated,
    /// Some caption had no candidate that kept its anchors; the template pair is kept.
    Filtered,
    /// The remote call failed; the template pair is kept.
    Unavailable(String),
}

/// Rewrites both captions of a pair, or neither.
///
/// The first surviving candidate is taken, so no randomness is involved beyond the service's
/// own sampling.
pub fn decorate(
    pair: &CaptionPair,
    config: &DecoratorConfig,
    naturalizer: &dyn Naturalizer,
) -> (CaptionPair, DecorateOutcome) {
    if !config.enabled {
        return (pair.clone(), DecorateOutcome::Disabled);
    }
    let rewrite = |c: &Caption| -> Result<Option<Caption>, DecoratorError> {
        let candidates = naturalizer.candidates(&prompt(c, config.max_candidates))?;
        Ok(pick(c, &candidates, config.max_candidates).map(|text| Caption {
            text,
            renderer: Renderer::Llm,
            ..c.clone()
        }))
    };
    let result = rewrite(&pair.positive).and_then(|p| Ok((p, rewrite(&pair.negative)?)));
    match result {
        Ok((Some(positive), Some(negative))) if positive.text != negative.text => (
            CaptionPair {
                positive,
                negative,
                ..pair.clone()
            },
            DecorateOutcome::Decorated,
        ),
        Ok(_) => (pair.clone(), DecorateOutcome::Filtered),
        Err(e) => {
            log::warn!("decorator failed for {}: {e}", pair.pair_id);
            (pair.clone(), DecorateOutcome::Unavailable(e.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecorateStats {
    pub decorated: usize,
    pub filtered: usize,
    pub unavailable: usize,
}

/// Decorates every pair with at most `max_in_flight` requests outstanding. Output order
/// matches input order.
pub fn decorate_all(
    pairs: &[CaptionPair],
    config: &DecoratorConfig,
    naturalizer: &dyn Naturalizer,
) -> (Vec<CaptionPair>, DecorateStats) {
    if !config.enabled {
        return (pairs.to_vec(), DecorateStats::default());
    }
    let next = AtomicUsize::new(0);
    let workers = config.max_in_flight.min(pairs.len()).max(1);
    let mut results: Vec<(usize, CaptionPair, DecorateOutcome)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(pair) = pairs.get(i) else { break };
                        let (p, o) = decorate(pair, config, naturalizer);
                        out.push((i, p, o));
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("decorator worker panicked"))
            .collect()
    });
    results.sort_by_key(|(i, _, _)| *i);
    let mut stats = DecorateStats::default();
    let out = results
        .into_iter()
        .map(|(_, p, o)| {
            match o {
                DecorateOutcome::Decorated => stats.decorated += 1,
                DecorateOutcome::Filtered => stats.filtered += 1,
                DecorateOutcome::Unavailable(_) => stats.unavailable += 1,
                DecorateOutcome::Disabled => {}
            }
            p
        })
        .collect();
    (out, stats)
}
