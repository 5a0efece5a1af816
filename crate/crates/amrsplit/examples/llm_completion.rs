//! Send prompts to an OpenAI-compatible chat endpoint. The example starts a
//! tiny local echo server so it runs offline; point the config at a real
//! endpoint (and set the API key environment variable) for real completions.
//!
//! Run with: cargo run -p amrsplit --example llm_completion

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;

use amrsplit::{build, complete, complete_batch, LlmConfig, PromptInputs, Strategy};

/// Serve `n` chat-completion requests, echoing the last message back.
fn spawn_echo_server(n: usize) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind echo server");
    let endpoint = format!("http://{}/v1", listener.local_addr().unwrap());
    std::thread::spawn(move || {
        for _ in 0..n {
            let Ok((mut stream, _)) = listener.accept() else { return };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            let mut content_length = 0usize;
            reader.read_line(&mut line).unwrap(); // request line
            loop {
                let mut header = String::new();
                reader.read_line(&mut header).unwrap();
                if header.trim().is_empty() {
                    break;
                }
                if let Some(value) = header.to_ascii_lowercase().strip_prefix("content-length:") {
                    content_length = value.trim().parse().unwrap_or(0);
                }
            }
            let mut body = vec![0u8; content_length];
            reader.read_exact(&mut body).unwrap();
            let request: serde_json::Value = serde_json::from_slice(&body).unwrap();
            let echoed = request["messages"]
                .as_array()
                .and_then(|m| m.last())
                .and_then(|m| m["content"].as_str())
                .unwrap_or("");
            let reply = serde_json::json!({
                "choices": [{"message": {"role": "assistant", "content": format!("ECHO: {echoed}")}}]
            })
            .to_string();
            let response = format!(
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                reply.len()
            );
            stream.write_all(response.as_bytes()).unwrap();
        }
    });
    endpoint
}

fn main() {
    let endpoint = spawn_echo_server(4);

    let config = LlmConfig {
        endpoint,
        model: "echo-model".to_owned(),
        // The key is read from this environment variable when it is set.
        // Configs never hold the key itself, so they are safe to log.
        api_key_env: "AMRSPLIT_API_KEY".to_owned(),
        timeout_secs: 10,
        max_parallel: 2,
        temperature: 0.0,
    };

    let payload = build(
        Strategy::Vanilla,
        "Although it was raining, the match, which had been delayed twice, went ahead.",
        &PromptInputs::default(),
    )
    .unwrap();
    let completion = complete(&config, &payload).expect("echo server answers");
    println!("single completion:\n{completion}\n");

    // Batches keep results in input order no matter which request finishes
    // first, and never exceed `max_parallel` requests in flight.
    let payloads: Vec<_> = ["First sentence.", "Second sentence.", "Third sentence."]
        .iter()
        .map(|s| build(Strategy::Vanilla, s, &PromptInputs::default()).unwrap())
        .collect();
    let results = complete_batch(&config, &payloads).expect("config is valid");
    for (i, result) in results.iter().enumerate() {
        println!("batch slot {i}: {}", result.as_ref().expect("echo server answers"));
    }
}
