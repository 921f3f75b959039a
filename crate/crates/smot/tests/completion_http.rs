//! End-to-end checks of the completion client over real HTTP sockets,
//! served by a minimal in-process responder.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use smot::backend::BackendError;
use smot::client::{completion_client, default_templates, AdapterConfig};
use smot::search::{EvaluatorBackend, ProposerBackend, Verdict};
use smot::sm::StateKey;

/// Accept `responses.len()` connections, answering each with the paired
/// status and body; returns the raw requests seen.
fn serve(listener: TcpListener, responses: Vec<(&'static str, String)>) -> JoinHandle<Vec<String>> {
    thread::spawn(move || {
        let mut seen = Vec::new();
        for (status, body) in responses {
            let (mut stream, _) = listener.accept().expect("accept");
            let mut reader = BufReader::new(stream.try_clone().expect("clone"));
            let mut request = String::new();
            let mut content_length = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).expect("read header");
                if let Some(rest) = line
                    .to_ascii_lowercase()
                    .strip_prefix("content-length:")
                {
                    content_length = rest.trim().parse().expect("length");
                }
                let done = line == "\r\n";
                request.push_str(&line);
                if done {
                    break;
                }
            }
            let mut body_buf = vec![0u8; content_length];
            reader.read_exact(&mut body_buf).expect("read body");
            request.push_str(&String::from_utf8_lossy(&body_buf));
            seen.push(request);
            let response = format!(
                "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(response.as_bytes()).expect("write");
        }
        seen
    })
}

fn chat_reply(content: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": content}}]
    })
    .to_string()
}

fn config(addr: std::net::SocketAddr) -> AdapterConfig {
    let mut cfg = AdapterConfig::new(format!("http://{addr}/v1/chat/completions"), "test-model");
    cfg.timeout = Duration::from_secs(5);
    cfg.budget = 10;
    cfg.max_retries = 1;
    cfg
}

#[test]
fn proposals_round_trip_over_http() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = serve(
        listener,
        vec![("200 OK", chat_reply("6/2=3 -> 2 3 6\n6-2=4 -> 2 4 6"))],
    );

    let (mut proposer, _) = completion_client(config(addr), default_templates("game24")).unwrap();
    let sols = proposer.propose(&StateKey::new("2 2 6 6"), 20).unwrap();
    assert_eq!(sols.len(), 2);
    assert_eq!(sols[0].label, "6/2=3");
    assert_eq!(sols[0].target.as_str(), "2 3 6");

    let requests = handle.join().unwrap();
    assert!(requests[0].contains("\"model\":\"test-model\""));
    assert!(requests[0].contains("2 2 6 6"));
    assert!(requests[0].contains("\"temperature\":0.7"));
}

#[test]
fn verdicts_and_server_retries() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    // First attempt fails server-side; the retry succeeds.
    let handle = serve(
        listener,
        vec![
            ("500 Internal Server Error", "{}".to_string()),
            ("200 OK", chat_reply("Impossible")),
        ],
    );

    let (_, mut evaluator) = completion_client(config(addr), default_templates("game24")).unwrap();
    let verdict = evaluator.evaluate(&StateKey::new("1 1 1 1")).unwrap();
    assert_eq!(verdict, Verdict::Impossible);
    assert_eq!(handle.join().unwrap().len(), 2);
}

#[test]
fn client_errors_do_not_retry() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = serve(listener, vec![("404 Not Found", "{}".to_string())]);

    let (_, mut evaluator) = completion_client(config(addr), default_templates("game24")).unwrap();
    let err = evaluator.evaluate(&StateKey::new("1 1 1 1")).unwrap_err();
    assert!(matches!(err, BackendError::Transport(_)));
    assert_eq!(handle.join().unwrap().len(), 1);
}

#[test]
fn unparseable_content_is_a_distinct_error() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = serve(listener, vec![("200 OK", chat_reply("I am not sure."))]);

    let (_, mut evaluator) = completion_client(config(addr), default_templates("game24")).unwrap();
    let err = evaluator.evaluate(&StateKey::new("1 1 1 1")).unwrap_err();
    assert!(matches!(err, BackendError::EmptyReply));
    handle.join().unwrap();
}
