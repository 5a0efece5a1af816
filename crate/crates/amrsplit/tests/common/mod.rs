//! Minimal OpenAI-compatible stub server for integration tests.
//!
//! Listens on an ephemeral localhost port, answers `/chat/completions`, and
//! records every request so tests can assert on bodies, headers, ordering,
//! and concurrency. Deterministic by construction: echo responses depend only
//! on the request body, never on arrival order.

#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

/// How the stub answers.
#[derive(Debug, Clone, Copy)]
pub enum Mode {
    /// 200 with `ECHO: {last message content}`.
    Echo,
    /// Like `Echo` but each request holds the connection open briefly, so
    /// parallel clients overlap measurably.
    EchoSlow(Duration),
    /// 429 for the first two requests, then echo.
    RateLimitTwiceThenEcho,
    /// Always 401.
    AuthReject,
    /// Always 500.
    AlwaysServerError,
}

#[derive(Debug, Clone)]
pub struct RecordedRequest {
    pub path: String,
    pub body: String,
    pub authorization: Option<String>,
}

#[derive(Debug, Default)]
pub struct ServerState {
    pub requests: Mutex<Vec<RecordedRequest>>,
    pub hits: AtomicUsize,
    pub inflight: AtomicUsize,
    pub max_inflight: AtomicUsize,
}

pub struct StubServer {
    addr: SocketAddr,
    shutdown: Arc<AtomicBool>,
    pub state: Arc<ServerState>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn start(mode: Mode) -> StubServer {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
        let addr = listener.local_addr().expect("local addr");
        let shutdown = Arc::new(AtomicBool::new(false));
        let state = Arc::new(ServerState::default());
        let accept_shutdown = Arc::clone(&shutdown);
        let accept_state = Arc::clone(&state);
        let handle = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if accept_shutdown.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let state = Arc::clone(&accept_state);
                std::thread::spawn(move || handle_connection(stream, mode, &state));
            }
        });
        StubServer { addr, shutdown, state, handle: Some(handle) }
    }

    /// Base URL to use as the client's endpoint.
    pub fn endpoint(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    pub fn hits(&self) -> usize {
        self.state.hits.load(Ordering::SeqCst)
    }

    pub fn max_inflight(&self) -> usize {
        self.state.max_inflight.load(Ordering::SeqCst)
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.state.requests.lock().expect("requests lock").clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        // unblock the accept loop
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(stream: TcpStream, mode: Mode, state: &ServerState) {
    let inflight = state.inflight.fetch_add(1, Ordering::SeqCst) + 1;
    state.max_inflight.fetch_max(inflight, Ordering::SeqCst);
    let result = serve_one(stream, mode, state);
    state.inflight.fetch_sub(1, Ordering::SeqCst);
    let _ = result;
}

fn serve_one(mut stream: TcpStream, mode: Mode, state: &ServerState) -> std::io::Result<()> {
    stream.set_read_timeout(Some(Duration::from_secs(5)))?;
    let mut reader = BufReader::new(stream.try_clone()?);

    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let path = request_line.split_whitespace().nth(1).unwrap_or("").to_owned();

    let mut content_length = 0usize;
    let mut authorization = None;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((key, value)) = line.split_once(':') {
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            if key == "content-length" {
                content_length = value.parse().unwrap_or(0);
            } else if key == "authorization" {
                authorization = Some(value.to_owned());
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    let body = String::from_utf8_lossy(&body).into_owned();

    let hit = state.hits.fetch_add(1, Ordering::SeqCst);
    state
        .requests
        .lock()
        .expect("requests lock")
        .push(RecordedRequest { path, body: body.clone(), authorization });

    let (status, response_body) = match mode {
        Mode::Echo => (200, echo_body(&body)),
        Mode::EchoSlow(delay) => {
            std::thread::sleep(delay);
            (200, echo_body(&body))
        }
        Mode::RateLimitTwiceThenEcho => {
            if hit < 2 {
                (429, "{\"error\":{\"message\":\"rate limited\"}}".to_owned())
            } else {
                (200, echo_body(&body))
            }
        }
        Mode::AuthReject => (401, "{\"error\":{\"message\":\"bad key\"}}".to_owned()),
        Mode::AlwaysServerError => (500, "{\"error\":{\"message\":\"boom\"}}".to_owned()),
    };

    let reason = match status {
        200 => "OK",
        401 => "Unauthorized",
        429 => "Too Many Requests",
        _ => "Internal Server Error",
    };
    let response = format!(
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{response_body}",
        response_body.len()
    );
    stream.write_all(response.as_bytes())?;
    stream.flush()
}

/// 200 body echoing the last chat message's content.
fn echo_body(request_body: &str) -> String {
    let content = serde_json::from_str::<serde_json::Value>(request_body)
        .ok()
        .and_then(|v| {
            let messages = v.get("messages")?.as_array()?.clone();
            let last = messages.last()?;
            Some(last.get("content")?.as_str()?.to_owned())
        })
        .unwrap_or_else(|| "<no content>".to_owned());
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": format!("ECHO: {content}")}}]
    })
    .to_string()
}
