//! Environment contract and the simulated-site implementation.
//!
//! An [`Environment`] restricts a browser to what exploration and teleport
//! need: load a URL, perform an [`Action`], and report the current
//! [`Observation`].

mod blocklist;
mod site;

use std::collections::BTreeSet;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ElementRef, GraphError, PageNode, Role};
use crate::graph::Action;

pub use blocklist::{BlockList, BlockListError};
pub use site::{open_session, ElementSpec, SimSession, SimulatedSite, SiteSpec, StateSpec};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid site spec: {0}")]
    InvalidSpec(String),
    #[error("no URL-addressable state at {0:?}")]
    UnknownUrl(String),
    #[error("no element at {0:?} in the current observation")]
    UnknownLocator(String),
    #[error("element {0:?} is an external link")]
    ExternalBlocked(String),
    #[error("session is not positioned; reset it first")]
    NotPositioned,
    #[error("environment failure: {0}")]
    Backend(String),
}

/// An element as reported by the environment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedElement {
    #[serde(flatten)]
    pub element: ElementRef,
    #[serde(default)]
    pub hazard: bool,
    #[serde(default)]
    pub external: bool,
    /// URL the element leads to, when the environment can tell.
    #[serde(default)]
    pub target_url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub url: String,
    pub url_addressable: bool,
    pub title: String,
    pub elements: Vec<ObservedElement>,
    pub rendering: String,
}

impl Observation {
    /// Builds an observation, deriving the rendering from title and elements.
    pub fn new(url: String, title: String, elements: Vec<ObservedElement>) -> Self {
        let rendering = render(&title, elements.iter().map(|e| &e.element));
        Self {
            url_addressable: !url.is_empty(),
            url,
            title,
            elements,
            rendering,
        }
    }

    pub fn element(&self, xpath: &str) -> Option<&ObservedElement> {
        self.elements.iter().find(|e| e.element.xpath == xpath)
    }

    /// Converts to a graph node; `depth` is left for the caller to set.
    pub fn to_node(&self, depth: u32) -> Result<PageNode, GraphError> {
        PageNode::new(
            &self.url,
            self.title.clone(),
            self.elements.iter().map(|e| e.element.clone()).collect(),
            self.rendering.clone(),
            depth,
        )
    }
}

/// Text stand-in for a screenshot: the title, then one `role: name` line per
/// element in document order.
pub fn render<'a>(title: &str, elements: impl IntoIterator<Item = &'a ElementRef>) -> String {
    let mut out = String::from(title);
    for e in elements {
        out.push('\n');
        out.push_str(e.role.as_str());
        if !e.name.is_empty() {
            out.push_str(": ");
            out.push_str(&e.name);
        }
    }
    out
}

/// Elements whose role is in `roles`, in document order.
pub fn interactive_elements<'a>(
    obs: &'a Observation,
    roles: &BTreeSet<Role>,
) -> Vec<&'a ObservedElement> {
    obs.elements
        .iter()
        .filter(|e| roles.contains(&e.element.role))
        .collect()
}

/// A single-focus browsing session.
pub trait Environment: Send {
    /// Loads `url` and returns the resulting observation.
    fn reset(&mut self, url: &str) -> Result<Observation, EnvError>;

    /// Performs `action` in the current page. A goto behaves like [`reset`].
    ///
    /// [`reset`]: Environment::reset
    fn perform(&mut self, action: &Action) -> Result<Observation, EnvError>;

    /// Current observation without acting.
    fn observe(&self) -> Result<Observation, EnvError>;

    /// Time spent in this session so far; simulated sessions report virtual
    /// time.
    fn elapsed(&self) -> Duration;
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn reset(&mut self, url: &str) -> Result<Observation, EnvError> {
        (**self).reset(url)
    }

    fn perform(&mut self, action: &Action) -> Result<Observation, EnvError> {
        (**self).perform(action)
    }

    fn observe(&self) -> Result<Observation, EnvError> {
        (**self).observe()
    }

    fn elapsed(&self) -> Duration {
        (**self).elapsed()
    }
}
