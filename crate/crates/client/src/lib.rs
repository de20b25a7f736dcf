//! Clients for a running wandercode service.
//!
//! [`HttpClient`] talks to the HTTP API; [`LineSession`] drives the
//! newline-delimited protocol over any stream, typically TCP.

use serde::de::DeserializeOwned;
use serde_json::Value;
use tokio::io::{AsyncBufRead, AsyncBufReadExt, AsyncWrite, AsyncWriteExt, BufReader};
use tokio::net::tcp::{OwnedReadHalf, OwnedWriteHalf};
use tokio::net::TcpStream;
use wandercode_core::protocol::{Kind, Message, RecommendationsPayload};
use wandercode_core::MethodId;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("transport: {0}")]
    Http(#[from] reqwest::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad response: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{code}: {message}")]
    Api {
        status: u16,
        code: String,
        message: String,
        near_misses: Vec<MethodId>,
    },
    #[error("connection closed before reply to seq {0}")]
    Closed(u64),
}

pub type Result<T> = std::result::Result<T, ClientError>;

#[derive(Debug, Clone)]
pub struct HttpClient {
    base: String,
    http: reqwest::Client,
}

impl HttpClient {
    pub fn new(base: impl Into<String>) -> Self {
        let base = base.into().trim_end_matches('/').to_string();
        HttpClient {
            base,
            http: reqwest::Client::new(),
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    async fn check(resp: reqwest::Response) -> Result<reqwest::Response> {
        let status = resp.status();
        if status.is_success() {
            return Ok(resp);
        }
        let body: Value = resp.json().await.unwrap_or(Value::Null);
        let field = |k: &str| body.get(k).and_then(Value::as_str).unwrap_or_default().to_string();
        let near_misses = body
            .get("nearMisses")
            .and_then(|v| serde_json::from_value(v.clone()).ok())
            .unwrap_or_default();
        Err(ClientError::Api {
            status: status.as_u16(),
            code: field("code"),
            message: field("message"),
            near_misses,
        })
    }

    async fn get_json<T: DeserializeOwned>(&self, path: &str) -> Result<T> {
        let resp = Self::check(self.http.get(self.url(path)).send().await?).await?;
        Ok(resp.json().await?)
    }

    async fn get_text(&self, path: &str) -> Result<String> {
        let resp = Self::check(self.http.get(self.url(path)).send().await?).await?;
        Ok(resp.text().await?)
    }

    pub async fn hello(&self) -> Result<Value> {
        self.get_json("/api/hello").await
    }

    pub async fn recommendations(&self, method: &str, expanded: bool, list: bool) -> Result<RecommendationsPayload> {
        self.get_json(&format!(
            "/api/methods/{}/recommendations?expanded={expanded}&list={list}",
            encode(method)
        ))
        .await
    }

    pub async fn callers(&self, method: &str) -> Result<Vec<MethodId>> {
        self.get_json(&format!("/api/methods/{}/callers", encode(method))).await
    }

    pub async fn callees(&self, method: &str) -> Result<Vec<MethodId>> {
        self.get_json(&format!("/api/methods/{}/callees", encode(method))).await
    }

    pub async fn dot(&self, method: &str, depth: usize) -> Result<String> {
        self.get_text(&format!("/api/methods/{}/dot?depth={depth}", encode(method))).await
    }

    pub async fn lookup(&self, query: &str) -> Result<MethodId> {
        let v: Value = self.get_json(&format!("/api/lookup?q={}", encode(query))).await?;
        Ok(serde_json::from_value(v["id"].clone())?)
    }

    pub async fn file(&self, path: &str) -> Result<String> {
        let encoded: Vec<String> = path.split('/').map(encode).collect();
        self.get_text(&format!("/api/files/{}", encoded.join("/"))).await
    }

    pub async fn degree_report(&self) -> Result<Value> {
        self.get_json("/api/report/degree").await
    }

    pub async fn create_session(&self) -> Result<HttpSession> {
        let resp = Self::check(self.http.post(self.url("/api/sessions")).send().await?).await?;
        let v: Value = resp.json().await?;
        let id = v["sessionId"].as_u64().ok_or_else(|| ClientError::Api {
            status: 200,
            code: "badResponse".into(),
            message: "missing sessionId".into(),
            near_misses: Vec::new(),
        })?;
        Ok(HttpSession {
            client: self.clone(),
            id,
            seq: 0,
        })
    }
}

impl HttpClient {
    /// Reattaches to an existing server session; sequence numbers restart at 1.
    pub fn session(&self, id: u64) -> HttpSession {
        HttpSession {
            client: self.clone(),
            id,
            seq: 0,
        }
    }
}

/// A protocol session hosted by the HTTP server.
#[derive(Debug)]
pub struct HttpSession {
    client: HttpClient,
    id: u64,
    seq: u64,
}

impl HttpSession {
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Sends a request with the next sequence number; returns events and the reply.
    pub async fn send(&mut self, kind: Kind, payload: Value) -> Result<Vec<Message>> {
        self.seq += 1;
        self.send_raw(&Message::new(kind, self.seq, payload).to_line()).await
    }

    pub async fn send_raw(&mut self, line: &str) -> Result<Vec<Message>> {
        let url = self.client.url(&format!("/api/sessions/{}/messages", self.id));
        let resp = self.client.http.post(url).body(line.to_string()).send().await?;
        Ok(HttpClient::check(resp).await?.json().await?)
    }

    pub async fn close(self) -> Result<()> {
        let url = self.client.url(&format!("/api/sessions/{}", self.id));
        HttpClient::check(self.client.http.delete(url).send().await?).await?;
        Ok(())
    }
}

/// A protocol session over a byte stream.
pub struct LineSession<R, W> {
    reader: R,
    writer: W,
    seq: u64,
}

pub type TcpSession = LineSession<BufReader<OwnedReadHalf>, OwnedWriteHalf>;

impl TcpSession {
    pub async fn connect(addr: &str) -> Result<Self> {
        let (read, write) = TcpStream::connect(addr).await?.into_split();
        Ok(LineSession::new(BufReader::new(read), write))
    }
}

impl<R: AsyncBufRead + Unpin, W: AsyncWrite + Unpin> LineSession<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        LineSession { reader, writer, seq: 0 }
    }

    /// Sends a request and collects messages up to and including its reply.
    pub async fn send(&mut self, kind: Kind, payload: Value) -> Result<Vec<Message>> {
        self.seq += 1;
        let seq = self.seq;
        let mut line = Message::new(kind, seq, payload).to_line();
        line.push('\n');
        self.writer.write_all(line.as_bytes()).await?;
        self.writer.flush().await?;
        let mut out = Vec::new();
        loop {
            let mut buf = String::new();
            if self.reader.read_line(&mut buf).await? == 0 {
                return Err(ClientError::Closed(seq));
            }
            if buf.trim().is_empty() {
                continue;
            }
            let msg: Message = serde_json::from_str(&buf)?;
            let done = msg.seq == seq;
            out.push(msg);
            if done {
                return Ok(out);
            }
        }
    }
}

fn encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'.' | b'_' | b'~' => out.push(b as char),
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}
