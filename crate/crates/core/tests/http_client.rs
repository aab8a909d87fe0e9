use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use panav::select::{ChatClient, HttpChatClient, PromptImage, VlmRequest};
use panav::Error;

/// Serves one request with `status` and `body`; returns the raw request.
fn serve_once(status: &'static str, body: &'static str) -> (String, thread::JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
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
        let mut payload = vec![0; content_length];
        reader.read_exact(&mut payload).unwrap();
        let mut stream = stream;
        write!(
            stream,
            "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        head + &String::from_utf8(payload).unwrap()
    });
    (url, handle)
}

fn request() -> VlmRequest {
    VlmRequest {
        model: "test-model".into(),
        temperature: 0.5,
        system: "sys".into(),
        user: "pick a route".into(),
        images: vec![PromptImage { label: "path_0".into(), png: vec![137, 80, 78, 71] }],
    }
}

#[test]
fn posts_chat_completion_and_reads_reply() {
    let (url, server) = serve_once("200 OK", r#"{"choices":[{"message":{"role":"assistant","content":"FINAL: path_0"}}]}"#);
    let client = HttpChatClient::new(url, Some("secret".into()), Duration::from_secs(10)).unwrap();
    assert_eq!(client.complete(&request()).unwrap(), "FINAL: path_0");
    let raw = server.join().unwrap();
    assert!(raw.starts_with("POST /v1/chat/completions"));
    assert!(raw.to_ascii_lowercase().contains("authorization: bearer secret"));
    assert!(raw.contains("\"model\":\"test-model\""));
    assert!(raw.contains("data:image/png;base64,iVBORw=="));
}

#[test]
fn rejected_key_is_unauthorized() {
    let (url, server) = serve_once("401 Unauthorized", r#"{"error":"bad key"}"#);
    let client = HttpChatClient::new(url, Some("wrong".into()), Duration::from_secs(10)).unwrap();
    assert!(matches!(client.complete(&request()), Err(Error::Unauthorized(_))));
    server.join().unwrap();
}

#[test]
fn server_error_is_transport() {
    let (url, server) = serve_once("500 Internal Server Error", r#"{"error":"boom"}"#);
    let client = HttpChatClient::new(url, None, Duration::from_secs(10)).unwrap();
    assert!(matches!(client.complete(&request()), Err(Error::Transport(_))));
    server.join().unwrap();
}
