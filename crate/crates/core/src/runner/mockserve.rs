//! A small HTTP server replaying a mock script, for exercising the real
//! HTTP client paths without any model host.
//!
//! Chat and generate requests are answered from the script (matched by
//! prompt hash, then default); embedding requests get deterministic mock
//! vectors.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::llm::{prompt_hash, MockScript};
use crate::retrieval::dense::MockEmbeddingClient;

use super::RunError;

pub struct MockServer {
    listener: TcpListener,
    script: Arc<MockScript>,
    embedder: Arc<MockEmbeddingClient>,
}

impl MockServer {
    pub fn bind(addr: &str, script: MockScript, embedding_dim: usize) -> Result<Self, RunError> {
        let listener = TcpListener::bind(addr)
            .map_err(|e| RunError::Config(format!("cannot bind {addr}: {e}")))?;
        Ok(MockServer {
            listener,
            script: Arc::new(script),
            embedder: Arc::new(MockEmbeddingClient::new(embedding_dim)),
        })
    }

    pub fn local_addr(&self) -> std::io::Result<std::net::SocketAddr> {
        self.listener.local_addr()
    }

    /// Serve forever, one thread per connection.
    pub fn serve(&self) -> Result<(), RunError> {
        for stream in self.listener.incoming() {
            let stream = match stream {
                Ok(s) => s,
                Err(_) => continue,
            };
            let script = self.script.clone();
            let embedder = self.embedder.clone();
            std::thread::spawn(move || {
                let _ = handle_connection(stream, &script, &embedder);
            });
        }
        Ok(())
    }

    /// Serve exactly `n` requests, then return. Test hook.
    pub fn serve_n(&self, n: usize) -> Result<(), RunError> {
        for _ in 0..n {
            let (stream, _) = self
                .listener
                .accept()
                .map_err(|e| RunError::Config(e.to_string()))?;
            let _ = handle_connection(stream, &self.script, &self.embedder);
        }
        Ok(())
    }
}

fn handle_connection(
    mut stream: TcpStream,
    script: &MockScript,
    embedder: &MockEmbeddingClient,
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some(v) = line
            .to_ascii_lowercase()
            .strip_prefix("content-length:")
            .map(str::trim)
            .and_then(|v| v.parse::<usize>().ok())
        {
            content_length = v;
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    let body: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);

    let (status, response) = respond(&body, script, embedder);
    let response_text = response.to_string();
    let reply = format!(
        "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{response_text}",
        response_text.len()
    );
    stream.write_all(reply.as_bytes())
}

fn respond(
    body: &Value,
    script: &MockScript,
    embedder: &MockEmbeddingClient,
) -> (&'static str, Value) {
    // embeddings: {model, input: [..]}
    if let Some(inputs) = body.get("input").and_then(|v| v.as_array()) {
        let data: Vec<Value> = inputs
            .iter()
            .enumerate()
            .map(|(index, text)| {
                let text = text.as_str().unwrap_or_default();
                json!({"index": index, "embedding": embedder.vector_for(text)})
            })
            .collect();
        return ("200 OK", json!({"object": "list", "data": data}));
    }

    // chat: {messages: [{content}]}; generate: {prompt}
    let prompt = body
        .get("messages")
        .and_then(|m| m.as_array())
        .and_then(|m| m.last())
        .and_then(|m| m.get("content"))
        .and_then(|c| c.as_str())
        .or_else(|| body.get("prompt").and_then(|p| p.as_str()));

    let Some(prompt) = prompt else {
        return ("400 Bad Request", json!({"error": "unrecognized request shape"}));
    };
    let Some(content) = script
        .by_hash
        .get(&prompt_hash(prompt))
        .or(script.default.as_ref())
    else {
        return ("404 Not Found", json!({"error": "no scripted response"}));
    };

    if body.get("messages").is_some() {
        (
            "200 OK",
            json!({"choices": [{"message": {"role": "assistant", "content": content}}]}),
        )
    } else {
        ("200 OK", json!({"response": content}))
    }
}
