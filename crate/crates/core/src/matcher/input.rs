//! Input assembly and encoding for the uni- and bi-encoder configurations.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use ndarray::{s, Array1, Array2};

use super::{EntityTypeSet, MatcherError, TokenEncoder};
use crate::corpus::tokenize;
use crate::hash::{fnv1a64, fnv1a64_extend};

/// Marker token that precedes each label in the uni-encoder prompt.
pub const ENT_MARKER: &str = "<<ENT>>";
/// Marker token separating the label prompt from the text.
pub const SEP_MARKER: &str = "<<SEP>>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderMode {
    Uni,
    Bi,
}

impl EncoderMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uni" => Some(Self::Uni),
            "bi" => Some(Self::Bi),
            _ => None,
        }
    }
}

/// The sequence handed to the encoder(s).
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderInput {
    pub mode: EncoderMode,
    /// Serialized label prompt (uni mode only).
    pub prompt_tokens: Vec<String>,
    pub text_tokens: Vec<String>,
    /// Positions of the `k` label markers inside `prompt_tokens`.
    pub marker_positions: Vec<usize>,
}

impl EncoderInput {
    /// Uni mode: `[<<ENT>> label_1 ... <<ENT>> label_k <<SEP>>] ++ text`.
    pub fn uni(labels: &EntityTypeSet, text_tokens: Vec<String>) -> Self {
        let mut prompt = Vec::new();
        let mut markers = Vec::with_capacity(labels.len());
        for label in labels.labels() {
            markers.push(prompt.len());
            prompt.push(ENT_MARKER.to_string());
            prompt.extend(tokenize(label).tokens);
        }
        prompt.push(SEP_MARKER.to_string());
        Self { mode: EncoderMode::Uni, prompt_tokens: prompt, text_tokens, marker_positions: markers }
    }

    pub fn bi(text_tokens: Vec<String>) -> Self {
        Self { mode: EncoderMode::Bi, prompt_tokens: Vec::new(), text_tokens, marker_positions: Vec::new() }
    }

    pub fn new(mode: EncoderMode, labels: &EntityTypeSet, text_tokens: Vec<String>) -> Self {
        match mode {
            EncoderMode::Uni => Self::uni(labels, text_tokens),
            EncoderMode::Bi => Self::bi(text_tokens),
        }
    }

    /// Length of the joint sequence in uni mode, of the text alone in bi mode.
    pub fn joint_len(&self) -> usize {
        self.prompt_tokens.len() + self.text_tokens.len()
    }
}

/// Contextual embeddings of the text tokens (`H_T`).
#[derive(Debug, Clone, PartialEq)]
pub struct TokenEmbeddings {
    pub vectors: Array2<f64>,
}

impl TokenEmbeddings {
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }
    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }
    pub fn is_empty(&self) -> bool {
        self.vectors.nrows() == 0
    }
}

/// One row per label (`H_E`).
#[derive(Debug, Clone, PartialEq)]
pub struct LabelEmbeddings {
    pub vectors: Array2<f64>,
    pub cache_key: u64,
}

/// Hash of an encoder identity and an ordered label list.
pub fn label_cache_key(encoder_id: &str, labels: &EntityTypeSet) -> u64 {
    let mut h = fnv1a64(encoder_id.as_bytes());
    for l in labels.labels() {
        h = fnv1a64_extend(h, &[0x1f]);
        h = fnv1a64_extend(h, l.as_bytes());
    }
    h
}

/// Pre-computed label matrices keyed by encoder identity and label list.
/// Encoder id plus ordered label list.
type CacheKey = (String, Vec<String>);

#[derive(Debug, Default)]
pub struct LabelCache {
    entries: RwLock<HashMap<CacheKey, Arc<LabelEmbeddings>>>,
}

impl LabelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("label cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or_try_insert(
        &self,
        key: CacheKey,
        fill: impl FnOnce() -> Result<LabelEmbeddings, MatcherError>,
    ) -> Result<Arc<LabelEmbeddings>, MatcherError> {
        if let Some(hit) = self.entries.read().expect("label cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let mut entries = self.entries.write().expect("label cache poisoned");
        if let Some(hit) = entries.get(&key) {
            return Ok(Arc::clone(hit));
        }
        let value = Arc::new(fill()?);
        entries.insert(key, Arc::clone(&value));
        Ok(value)
    }
}

/// Encoder configuration producing `H_T` and `H_E`.
#[derive(Clone)]
pub enum Backbone {
    /// One encoder over the joint label prompt and text.
    Uni { encoder: Arc<dyn TokenEncoder> },
    /// Separate text and label encoders. When `projection` is set it maps
    /// pooled label vectors (label width) onto the text width; it has shape
    /// `text_dim x label_dim`.
    Bi {
        text: Arc<dyn TokenEncoder>,
        labels: Arc<dyn TokenEncoder>,
        projection: Option<Array2<f64>>,
        cache: Option<Arc<LabelCache>>,
    },
}

impl std::fmt::Debug for Backbone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Uni { encoder } => f.debug_struct("Uni").field("encoder", &encoder.id()).finish(),
            Self::Bi { text, labels, projection, cache } => f
                .debug_struct("Bi")
                .field("text", &text.id())
                .field("labels", &labels.id())
                .field("projection", &projection.as_ref().map(|p| p.dim()))
                .field("cached", &cache.is_some())
                .finish(),
        }
    }
}

impl Backbone {
    pub fn uni(encoder: Arc<dyn TokenEncoder>) -> Self {
        Self::Uni { encoder }
    }

    /// Bi-encoder with a label cache and no projection.
    pub fn bi(text: Arc<dyn TokenEncoder>, labels: Arc<dyn TokenEncoder>) -> Self {
        Self::Bi { text, labels, projection: None, cache: Some(Arc::new(LabelCache::new())) }
    }

    pub fn mode(&self) -> EncoderMode {
        match self {
            Self::Uni { .. } => EncoderMode::Uni,
            Self::Bi { .. } => EncoderMode::Bi,
        }
    }

    /// Width of `H_T` and `H_E`.
    pub fn dim(&self) -> usize {
        match self {
            Self::Uni { encoder } => encoder.dim(),
            Self::Bi { text, .. } => text.dim(),
        }
    }

    pub fn label_cache(&self) -> Option<&LabelCache> {
        match self {
            Self::Bi { cache: Some(c), .. } => Some(c),
            _ => None,
        }
    }

    /// Runs the encoder(s) over `input` and returns `(H_T, H_E)`.
    pub fn encode(
        &self,
        input: &EncoderInput,
        labels: &EntityTypeSet,
    ) -> Result<(TokenEmbeddings, Arc<LabelEmbeddings>), MatcherError> {
        if input.mode != self.mode() {
            return Err(MatcherError::InvalidInput(format!(
                "{:?} input given to a {:?} backbone",
                input.mode,
                self.mode()
            )));
        }
        match self {
            Self::Uni { encoder } => encode_uni(encoder.as_ref(), input, labels),
            Self::Bi { text, labels: label_encoder, projection, cache } => {
                let (text_dim, label_dim) = (text.dim(), label_encoder.dim());
                match projection {
                    None if text_dim != label_dim => {
                        return Err(MatcherError::DimensionMismatch { text: text_dim, labels: label_dim })
                    }
                    Some(p) if p.dim() != (text_dim, label_dim) => {
                        return Err(MatcherError::DimensionMismatch { text: p.nrows(), labels: p.ncols() })
                    }
                    _ => {}
                }
                let h_t = checked(text.encode(&input.text_tokens)?, input.text_tokens.len(), text_dim)?;
                let fill = || pooled_labels(label_encoder.as_ref(), projection.as_ref(), labels);
                let h_e = match cache {
                    Some(cache) => {
                        let key = (label_encoder.id(), labels.labels().to_vec());
                        cache.get_or_try_insert(key, fill)?
                    }
                    None => Arc::new(fill()?),
                };
                Ok((TokenEmbeddings { vectors: h_t }, h_e))
            }
        }
    }

    /// Convenience wrapper that assembles the input for this backbone's mode.
    pub fn encode_text(
        &self,
        text_tokens: &[String],
        labels: &EntityTypeSet,
    ) -> Result<(TokenEmbeddings, Arc<LabelEmbeddings>), MatcherError> {
        let input = EncoderInput::new(self.mode(), labels, text_tokens.to_vec());
        self.encode(&input, labels)
    }
}

fn encode_uni(
    encoder: &dyn TokenEncoder,
    input: &EncoderInput,
    labels: &EntityTypeSet,
) -> Result<(TokenEmbeddings, Arc<LabelEmbeddings>), MatcherError> {
    if input.marker_positions.len() != labels.len() {
        return Err(MatcherError::InvalidInput(format!(
            "{} markers for {} labels",
            input.marker_positions.len(),
            labels.len()
        )));
    }
    let joint: Vec<String> = input.prompt_tokens.iter().chain(&input.text_tokens).cloned().collect();
    let h = checked(encoder.encode(&joint)?, joint.len(), encoder.dim())?;
    let p = input.prompt_tokens.len();
    let h_t = h.slice(s![p.., ..]).to_owned();
    let h_e = h.select(ndarray::Axis(0), &input.marker_positions);
    let cache_key = label_cache_key(&encoder.id(), labels);
    Ok((TokenEmbeddings { vectors: h_t }, Arc::new(LabelEmbeddings { vectors: h_e, cache_key })))
}

fn pooled_labels(
    encoder: &dyn TokenEncoder,
    projection: Option<&Array2<f64>>,
    labels: &EntityTypeSet,
) -> Result<LabelEmbeddings, MatcherError> {
    let width = projection.map_or(encoder.dim(), |p| p.nrows());
    let mut out = Array2::zeros((labels.len(), width));
    for (i, label) in labels.labels().iter().enumerate() {
        let tokens = tokenize(label).tokens;
        let rows = checked(encoder.encode(&tokens)?, tokens.len(), encoder.dim())?;
        let pooled: Array1<f64> = rows.mean_axis(ndarray::Axis(0)).expect("labels have tokens");
        let v = match projection {
            Some(p) => p.dot(&pooled),
            None => pooled,
        };
        out.row_mut(i).assign(&v);
    }
    Ok(LabelEmbeddings { vectors: out, cache_key: label_cache_key(&encoder.id(), labels) })
}

fn checked(m: Array2<f64>, rows: usize, cols: usize) -> Result<Array2<f64>, MatcherError> {
    if m.dim() != (rows, cols) {
        return Err(MatcherError::EncoderFailure(format!(
            "expected a {rows}x{cols} matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(MatcherError::EncoderFailure("non-finite embedding".into()));
    }
    Ok(m)
}
