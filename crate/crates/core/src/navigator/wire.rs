//! External selector protocol.
//!
//! A request is one JSON object `{intent, query, candidates: [{node_id, rank,
//! score, rendering}]}`; the reply is `{target_page, reasoning}` where
//! `target_page` is a candidate's node id or the string `"None"`. The same
//! payload travels either as one line over a child process's stdin/stdout or
//! as the body of an HTTP POST.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::selector::{CandidateView, SelectionDecision, Selector};
use super::NavigateError;
use crate::graph::NodeId;

/// Environment variable holding an HTTP endpoint for [`ExternalSelector::from_env`].
pub const SELECTOR_URL_ENV: &str = "NAVGRAPH_SELECTOR_URL";
/// Environment variable holding a shell command for [`ExternalSelector::from_env`].
pub const SELECTOR_CMD_ENV: &str = "NAVGRAPH_SELECTOR_CMD";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireCandidate {
    pub node_id: NodeId,
    pub rank: usize,
    pub score: f64,
    pub rendering: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorRequest {
    pub intent: String,
    pub query: String,
    pub candidates: Vec<WireCandidate>,
}

impl SelectorRequest {
    pub fn new(intent: &str, query: &str, candidates: &[CandidateView<'_>]) -> Self {
        Self {
            intent: intent.to_owned(),
            query: query.to_owned(),
            candidates: candidates
                .iter()
                .map(|c| WireCandidate {
                    node_id: c.candidate.node_id.clone(),
                    rank: c.candidate.rank,
                    score: c.candidate.score,
                    rendering: c.rendering.to_owned(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectorReply {
    pub target_page: String,
    #[serde(default)]
    pub reasoning: String,
}

impl SelectorReply {
    /// Parses a reply and checks the choice against the request.
    pub fn parse(text: &str, request: &SelectorRequest) -> Result<SelectionDecision, NavigateError> {
        let reply: SelectorReply = serde_json::from_str(text.trim())
            .map_err(|e| NavigateError::MalformedDecision(format!("bad reply {text:?}: {e}")))?;
        if reply.target_page == "None" {
            return Ok(SelectionDecision {
                chosen: None,
                rationale: reply.reasoning,
            });
        }
        let id = NodeId::parse(&reply.target_page).map_err(|_| {
            NavigateError::MalformedDecision(format!(
                "target_page {:?} is neither a node id nor \"None\"",
                reply.target_page
            ))
        })?;
        if !request.candidates.iter().any(|c| c.node_id == id) {
            return Err(NavigateError::MalformedDecision(format!(
                "target_page {id} was not among the candidates"
            )));
        }
        Ok(SelectionDecision {
            chosen: Some(id),
            rationale: reply.reasoning,
        })
    }
}

/// Carries one serialized request and returns the raw reply.
pub trait Transport {
    fn exchange(&mut self, request: &str) -> Result<String, NavigateError>;
}

/// Line-delimited JSON over a long-lived child process.
pub struct ProcessTransport {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl ProcessTransport {
    pub fn spawn(mut command: Command) -> Result<Self, NavigateError> {
        let mut child = command
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| NavigateError::SelectorUnavailable(e.to_string()))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = BufReader::new(child.stdout.take().expect("stdout is piped"));
        Ok(Self {
            child,
            stdin,
            stdout,
        })
    }

    /// Runs `command_line` through `sh -c`.
    pub fn shell(command_line: &str) -> Result<Self, NavigateError> {
        let mut cmd = Command::new("sh");
        cmd.arg("-c").arg(command_line);
        Self::spawn(cmd)
    }
}

impl Transport for ProcessTransport {
    fn exchange(&mut self, request: &str) -> Result<String, NavigateError> {
        let unavailable = |e: std::io::Error| NavigateError::SelectorUnavailable(e.to_string());
        self.stdin.write_all(request.as_bytes()).map_err(unavailable)?;
        self.stdin.write_all(b"\n").map_err(unavailable)?;
        self.stdin.flush().map_err(unavailable)?;
        let mut line = String::new();
        let n = self.stdout.read_line(&mut line).map_err(unavailable)?;
        if n == 0 {
            return Err(NavigateError::SelectorUnavailable(
                "selector process closed its output".into(),
            ));
        }
        Ok(line)
    }
}

impl Drop for ProcessTransport {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// One HTTP POST per request.
pub struct HttpTransport {
    url: String,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(true)
            .build()
            .into();
        Self {
            url: url.into(),
            agent,
        }
    }
}

impl Transport for HttpTransport {
    fn exchange(&mut self, request: &str) -> Result<String, NavigateError> {
        let mut response = self
            .agent
            .post(&self.url)
            .header("Content-Type", "application/json")
            .send(request)
            .map_err(|e| NavigateError::SelectorUnavailable(e.to_string()))?;
        response
            .body_mut()
            .read_to_string()
            .map_err(|e| NavigateError::SelectorUnavailable(e.to_string()))
    }
}

/// Delegates selection to another program through a [`Transport`].
pub struct ExternalSelector {
    transport: Box<dyn Transport + Send>,
}

impl ExternalSelector {
    pub fn new(transport: impl Transport + Send + 'static) -> Self {
        Self {
            transport: Box::new(transport),
        }
    }

    /// Uses [`SELECTOR_URL_ENV`] if set, else [`SELECTOR_CMD_ENV`].
    pub fn from_env() -> Result<Self, NavigateError> {
        if let Ok(url) = std::env::var(SELECTOR_URL_ENV) {
            return Ok(Self::new(HttpTransport::new(url, Duration::from_secs(60))));
        }
        if let Ok(cmd) = std::env::var(SELECTOR_CMD_ENV) {
            return Ok(Self::new(ProcessTransport::shell(&cmd)?));
        }
        Err(NavigateError::SelectorUnavailable(format!(
            "neither {SELECTOR_URL_ENV} nor {SELECTOR_CMD_ENV} is set"
        )))
    }
}

impl Selector for ExternalSelector {
    fn select(
        &mut self,
        intent: &str,
        query: &str,
        candidates: &[CandidateView<'_>],
    ) -> Result<SelectionDecision, NavigateError> {
        let request = SelectorRequest::new(intent, query, candidates);
        let line = serde_json::to_string(&request).expect("requests always serialize");
        let reply = self.transport.exchange(&line)?;
        SelectorReply::parse(&reply, &request)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::Candidate;

    fn request() -> SelectorRequest {
        let c = Candidate {
            node_id: NodeId::parse("0123456789abcdef0123456789abcdef").unwrap(),
            score: 0.75,
            rank: 1,
        };
        SelectorRequest::new("i", "q", &[CandidateView { candidate: &c, rendering: "Home" }])
    }

    #[test]
    fn reply_none_declines() {
        let d = SelectorReply::parse(r#"{"target_page":"None","reasoning":"nope"}"#, &request()).unwrap();
        assert_eq!(d.chosen, None);
        assert_eq!(d.rationale, "nope");
    }

    #[test]
    fn reply_with_candidate_id() {
        let d = SelectorReply::parse(
            r#"{"target_page":"0123456789abcdef0123456789abcdef","reasoning":"r"}"#,
            &request(),
        )
        .unwrap();
        assert!(d.chosen.is_some());
    }

    #[test]
    fn malformed_replies() {
        for bad in [
            "not json",
            r#"{"reasoning":"x"}"#,
            r#"{"target_page":"page_3.png"}"#,
            r#"{"target_page":"ffffffffffffffffffffffffffffffff"}"#,
        ] {
            assert!(
                matches!(SelectorReply::parse(bad, &request()), Err(NavigateError::MalformedDecision(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn request_wire_shape() {
        let v = serde_json::to_value(request()).unwrap();
        assert_eq!(v["candidates"][0]["rank"], 1);
        assert_eq!(v["candidates"][0]["rendering"], "Home");
        assert_eq!(v["candidates"][0]["score"], 0.75);
    }
}
