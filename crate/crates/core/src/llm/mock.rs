//! In-process HTTP server answering chat-completions requests, for tests and
//! offline runs. Counts concurrent requests and records every request body.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

/// A request as seen by the responder.
#[derive(Debug, Clone, PartialEq)]
pub struct MockRequest {
    /// Arrival order, from 0.
    pub index: usize,
    pub path: String,
    pub authorization: Option<String>,
    pub body: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MockReply {
    /// Wrapped as `{"choices":[{"message":{"role":"assistant","content":...}}]}`.
    Chat(String),
    Json(serde_json::Value),
    Status(u16, String),
}

impl MockReply {
    pub fn chat(content: impl Into<String>) -> Self {
        MockReply::Chat(content.into())
    }

    pub fn status(code: u16, body: impl Into<String>) -> Self {
        MockReply::Status(code, body.into())
    }
}

type Responder = dyn Fn(&MockRequest) -> MockReply + Send + Sync;

struct State {
    responder: Box<Responder>,
    delay: Duration,
    arrivals: AtomicUsize,
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
    requests: Mutex<Vec<MockRequest>>,
    shutdown: AtomicBool,
}

pub struct MockChatServer {
    addr: SocketAddr,
    state: Arc<State>,
    handle: Option<JoinHandle<()>>,
}

impl MockChatServer {
    pub fn start<F>(responder: F) -> io::Result<Self>
    where
        F: Fn(&MockRequest) -> MockReply + Send + Sync + 'static,
    {
        Self::start_with_delay(Duration::ZERO, responder)
    }

    /// Holds every request for `delay` before answering, so that concurrent
    /// requests overlap.
    pub fn start_with_delay<F>(delay: Duration, responder: F) -> io::Result<Self>
    where
        F: Fn(&MockRequest) -> MockReply + Send + Sync + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let state = Arc::new(State {
            responder: Box::new(responder),
            delay,
            arrivals: AtomicUsize::new(0),
            in_flight: AtomicUsize::new(0),
            max_in_flight: AtomicUsize::new(0),
            requests: Mutex::new(Vec::new()),
            shutdown: AtomicBool::new(false),
        });
        let st = state.clone();
        let handle = thread::spawn(move || {
            for stream in listener.incoming() {
                if st.shutdown.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let st = st.clone();
                thread::spawn(move || {
                    let _ = serve(stream, &st);
                });
            }
        });
        Ok(MockChatServer {
            addr,
            state,
            handle: Some(handle),
        })
    }

    /// Base URL to use as the chat endpoint.
    pub fn endpoint(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn max_in_flight(&self) -> usize {
        self.state.max_in_flight.load(Ordering::SeqCst)
    }

    pub fn request_count(&self) -> usize {
        self.state.requests.lock().unwrap().len()
    }

    /// Recorded requests in arrival order.
    pub fn requests(&self) -> Vec<MockRequest> {
        let mut r = self.state.requests.lock().unwrap().clone();
        r.sort_by_key(|q| q.index);
        r
    }
}

impl Drop for MockChatServer {
    fn drop(&mut self) {
        self.state.shutdown.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn serve(stream: TcpStream, st: &State) -> io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    if reader.read_line(&mut request_line)? == 0 {
        return Ok(());
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut content_length = 0usize;
    let mut authorization = None;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            match name.trim().to_ascii_lowercase().as_str() {
                "content-length" => content_length = value.trim().parse().unwrap_or(0),
                "authorization" => authorization = Some(value.trim().to_string()),
                _ => {}
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    let body: serde_json::Value = serde_json::from_slice(&body).unwrap_or(serde_json::Value::Null);

    let now = st.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    st.max_in_flight.fetch_max(now, Ordering::SeqCst);
    let request = MockRequest {
        index: st.arrivals.fetch_add(1, Ordering::SeqCst),
        path,
        authorization,
        body,
    };
    st.requests.lock().unwrap().push(request.clone());
    if !st.delay.is_zero() {
        thread::sleep(st.delay);
    }
    let reply = (st.responder)(&request);
    st.in_flight.fetch_sub(1, Ordering::SeqCst);

    let (code, payload) = match reply {
        MockReply::Chat(content) => (
            200,
            serde_json::json!({
                "object": "chat.completion",
                "choices": [{"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}]
            })
            .to_string(),
        ),
        MockReply::Json(v) => (200, v.to_string()),
        MockReply::Status(code, body) => (code, body),
    };
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {code} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        if code < 400 { "OK" } else { "Error" },
        payload.len()
    )?;
    stream.flush()
}
