//! Chat-completion clients: an OpenAI-compatible HTTP client and test doubles.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde_json::{json, Value};

use super::prompt::{candidates_in_prompt, ChatMessage};
use super::schema::{entities_json, schema, Entity};
use crate::hash::fnv1a64;

/// A schema-constrained chat completion request.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest {
    pub messages: Vec<ChatMessage>,
    pub schema_id: String,
    pub schema: Value,
}

impl ChatRequest {
    pub fn new(messages: Vec<ChatMessage>, schema_id: &str) -> Self {
        let schema = schema(schema_id).unwrap_or_else(|| panic!("unregistered schema {schema_id:?}"));
        Self { messages, schema_id: schema_id.to_string(), schema }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClientError {
    #[error("endpoint returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed completion: {0}")]
    Protocol(String),
}

/// Anything that can answer a chat request with the assistant's raw text.
pub trait LlmClient: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, ClientError>;
}

impl<C: LlmClient + ?Sized> LlmClient for &C {
    fn complete(&self, request: &ChatRequest) -> Result<String, ClientError> {
        (**self).complete(request)
    }
}

/// Client for OpenAI-compatible `/chat/completions` endpoints.
pub struct HttpChatClient {
    base_url: String,
    model: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpChatClient {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(300)))
            .build()
            .into();
        Self { base_url: base_url.into().trim_end_matches('/').to_string(), model: model.into(), api_key, agent }
    }

    /// Reads the API key from `key_var`; a missing variable means no
    /// `Authorization` header is sent.
    pub fn from_env(base_url: impl Into<String>, model: impl Into<String>, key_var: &str) -> Self {
        Self::new(base_url, model, std::env::var(key_var).ok().filter(|k| !k.is_empty()))
    }

    /// Request body sent for `request`.
    pub fn body(&self, request: &ChatRequest) -> Value {
        json!({
            "model": self.model,
            "messages": request.messages,
            "temperature": 0,
            "response_format": {
                "type": "json_schema",
                "json_schema": { "name": request.schema_id, "schema": request.schema, "strict": true }
            }
        })
    }
}

impl LlmClient for HttpChatClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, ClientError> {
        let url = format!("{}/chat/completions", self.base_url);
        let mut call = self.agent.post(&url).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            call = call.header("Authorization", format!("Bearer {key}"));
        }
        let mut response = call.send_json(self.body(request)).map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response.body_mut().read_to_string().map_err(|e| ClientError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(ClientError::Status { status, body: text });
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| ClientError::Protocol(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| ClientError::Protocol("missing choices[0].message.content".into()))
    }
}

/// Replays a fixed sequence of outcomes, one per call.
#[derive(Debug, Default)]
pub struct ScriptedClient {
    script: Mutex<VecDeque<Result<String, ClientError>>>,
    calls: AtomicUsize,
}

impl ScriptedClient {
    pub fn new(script: impl IntoIterator<Item = Result<String, ClientError>>) -> Self {
        Self { script: Mutex::new(script.into_iter().collect()), calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmClient for ScriptedClient {
    fn complete(&self, _request: &ChatRequest) -> Result<String, ClientError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.script
            .lock()
            .expect("script lock")
            .pop_front()
            .unwrap_or_else(|| Err(ClientError::Transport("script exhausted".into())))
    }
}

/// Wraps a closure as a client.
pub struct FnClient<F>(pub F);

impl<F> LlmClient for FnClient<F>
where
    F: Fn(&ChatRequest) -> Result<String, ClientError> + Send + Sync,
{
    fn complete(&self, request: &ChatRequest) -> Result<String, ClientError> {
        (self.0)(request)
    }
}

/// Deterministic offline annotator: labels every candidate found in the last
/// user turn with a type chosen by hashing the candidate text.
#[derive(Debug)]
pub struct CandidateEchoClient {
    types: Vec<String>,
    calls: AtomicUsize,
}

impl CandidateEchoClient {
    pub fn new<S: Into<String>>(types: impl IntoIterator<Item = S>) -> Self {
        let types: Vec<String> = types.into_iter().map(Into::into).collect();
        assert!(!types.is_empty(), "at least one type is required");
        Self { types, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Default for CandidateEchoClient {
    fn default() -> Self {
        Self::new(["chemical", "disease", "gene"])
    }
}

impl LlmClient for CandidateEchoClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, ClientError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let turn = request
            .messages
            .iter()
            .rev()
            .find(|m| m.role == "user")
            .ok_or_else(|| ClientError::Protocol("no user turn".into()))?;
        let candidates = candidates_in_prompt(&turn.content).unwrap_or_default();
        let entities: Vec<Entity> = candidates
            .into_iter()
            .map(|text| {
                let ty = &self.types[(fnv1a64(text.as_bytes()) % self.types.len() as u64) as usize];
                Entity { text, entity_type: ty.clone() }
            })
            .collect();
        Ok(entities_json(&entities))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::schema::ENTITY_LIST_SCHEMA;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    /// Serves one canned HTTP response and returns the raw request it saw.
    fn one_shot_server(status: &str, body: &str) -> (String, std::thread::JoinHandle<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let response = format!(
            "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        );
        let handle = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut head = String::new();
            let mut content_length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    content_length = v.trim().parse().unwrap();
                }
                head.push_str(&line);
                if line == "\r\n" {
                    break;
                }
            }
            let mut body = vec![0; content_length];
            reader.read_exact(&mut body).unwrap();
            (&stream).write_all(response.as_bytes()).unwrap();
            head + &String::from_utf8(body).unwrap()
        });
        (format!("http://{addr}/v1"), handle)
    }

    fn request() -> ChatRequest {
        ChatRequest::new(vec![ChatMessage::new("user", "Passage: x\nCandidates: [\"x\"]")], ENTITY_LIST_SCHEMA)
    }

    #[test]
    fn http_client_posts_schema_constrained_request() {
        let completion = r#"{"choices":[{"message":{"role":"assistant","content":"{\"entities\":[]}"}}]}"#;
        let (url, server) = one_shot_server("200 OK", completion);
        let client = HttpChatClient::new(url, "teacher-8b", Some("secret".into()));
        assert_eq!(client.complete(&request()).unwrap(), "{\"entities\":[]}");
        let seen = server.join().unwrap();
        assert!(seen.starts_with("POST /v1/chat/completions"));
        assert!(seen.to_ascii_lowercase().contains("authorization: bearer secret"));
        assert!(seen.contains("\"json_schema\"") && seen.contains("\"teacher-8b\""));
    }

    #[test]
    fn http_status_errors_carry_the_code() {
        let (url, server) = one_shot_server("503 Service Unavailable", "{\"error\":\"overloaded\"}");
        let client = HttpChatClient::new(url, "m", None);
        match client.complete(&request()) {
            Err(ClientError::Status { status, body }) => {
                assert_eq!(status, 503);
                assert!(body.contains("overloaded"));
            }
            other => panic!("unexpected {other:?}"),
        }
        server.join().unwrap();
    }

    #[test]
    fn unreachable_endpoint_is_a_transport_error() {
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let client = HttpChatClient::new(format!("http://127.0.0.1:{port}"), "m", None);
        assert!(matches!(client.complete(&request()), Err(ClientError::Transport(_))));
    }

    #[test]
    fn echo_client_labels_candidates_deterministically() {
        let client = CandidateEchoClient::default();
        let a = client.complete(&request()).unwrap();
        assert_eq!(a, client.complete(&request()).unwrap());
        assert!(a.contains("\"text\":\"x\""));
        assert_eq!(client.calls(), 2);
    }

    #[test]
    fn scripted_client_replays_then_fails() {
        let client = ScriptedClient::new([Ok("a".to_string())]);
        assert_eq!(client.complete(&request()).unwrap(), "a");
        assert!(client.complete(&request()).is_err());
        assert_eq!(client.calls(), 2);
    }
}
