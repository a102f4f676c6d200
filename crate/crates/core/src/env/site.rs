//! Declarative simulated websites.
//!
//! A [`SiteSpec`] lists page states, their elements and a transition table
//! (`leads_to`). States without a URL can only be reached through clicks,
//! which is how interaction-triggered pages such as opened menus are modeled.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EnvError, Environment, Observation, ObservedElement};
use crate::graph::{normalize_url, validate_xpath, Action, ElementRef, Role};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub xpath: String,
    pub role: Role,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub hazard: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leads_to: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub external: bool,
    /// Explicit link target, used for external links.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub href: Option<String>,
}

impl ElementSpec {
    pub fn new(xpath: impl Into<String>, role: Role, name: impl Into<String>) -> Self {
        Self {
            xpath: xpath.into(),
            role,
            name: name.into(),
            hazard: false,
            leads_to: None,
            external: false,
            href: None,
        }
    }

    pub fn leading_to(mut self, state: impl Into<String>) -> Self {
        self.leads_to = Some(state.into());
        self
    }

    pub fn hazardous(mut self) -> Self {
        self.hazard = true;
        self
    }

    pub fn external_link(mut self, href: impl Into<String>) -> Self {
        self.external = true;
        self.href = Some(href.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpec {
    #[serde(alias = "state_id")]
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    pub title: String,
    #[serde(default)]
    pub elements: Vec<ElementSpec>,
}

impl StateSpec {
    pub fn new(id: impl Into<String>, url: Option<&str>, title: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            url: url.map(str::to_owned),
            title: title.into(),
            elements: Vec::new(),
        }
    }

    pub fn with(mut self, element: ElementSpec) -> Self {
        self.elements.push(element);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteSpec {
    pub domain: String,
    pub start: String,
    pub states: Vec<StateSpec>,
}

impl SiteSpec {
    pub fn from_json(bytes: &[u8]) -> Result<Self, EnvError> {
        serde_json::from_slice(bytes).map_err(|e| EnvError::InvalidSpec(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, EnvError> {
        let bytes = std::fs::read(path)
            .map_err(|e| EnvError::InvalidSpec(format!("{}: {e}", path.display())))?;
        Self::from_json(&bytes)
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("site specs always serialize");
        out.push(b'\n');
        out
    }

    pub fn state(&self, id: &str) -> Option<&StateSpec> {
        self.states.iter().find(|s| s.id == id)
    }

    pub fn state_mut(&mut self, id: &str) -> Option<&mut StateSpec> {
        self.states.iter_mut().find(|s| s.id == id)
    }

    /// Normalized URL of the start state, if it has one.
    pub fn start_url(&self) -> Option<String> {
        self.state(&self.start)?.url.as_deref().map(normalize_url)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |msg: String| Err(EnvError::InvalidSpec(msg));
        let mut ids = HashSet::new();
        for s in &self.states {
            if !ids.insert(s.id.as_str()) {
                return bad(format!("duplicate state id {:?}", s.id));
            }
        }
        if !ids.contains(self.start.as_str()) {
            return bad(format!("start state {:?} does not exist", self.start));
        }
        let mut urls = HashMap::new();
        for s in &self.states {
            if let Some(url) = &s.url {
                let norm = normalize_url(url);
                if norm.is_empty() {
                    return bad(format!("state {:?} has an empty url", s.id));
                }
                if let Some(other) = urls.insert(norm.clone(), s.id.as_str()) {
                    return bad(format!("states {other:?} and {:?} share url {norm}", s.id));
                }
            }
            let mut xpaths = HashSet::new();
            for e in &s.elements {
                validate_xpath(&e.xpath)
                    .map_err(|err| EnvError::InvalidSpec(format!("state {:?}: {err}", s.id)))?;
                if !xpaths.insert(e.xpath.as_str()) {
                    return bad(format!("state {:?} repeats xpath {}", s.id, e.xpath));
                }
                if let Some(t) = &e.leads_to {
                    if !ids.contains(t.as_str()) {
                        return bad(format!(
                            "state {:?}: element {} leads to unknown state {t:?}",
                            s.id, e.xpath
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

struct CompiledState {
    observation: Observation,
    /// xpath -> (leads_to state index, external)
    transitions: HashMap<String, (Option<usize>, bool)>,
}

struct SiteInner {
    spec: SiteSpec,
    states: Vec<CompiledState>,
    by_url: HashMap<String, usize>,
    by_id: HashMap<String, usize>,
}

/// A validated, shareable [`SiteSpec`].
#[derive(Clone)]
pub struct SimulatedSite {
    inner: Arc<SiteInner>,
}

impl SimulatedSite {
    pub fn new(spec: SiteSpec) -> Result<Self, EnvError> {
        spec.validate()?;
        let by_id: HashMap<String, usize> = spec
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.clone(), i))
            .collect();
        let url_of = |i: usize| spec.states[i].url.as_deref().map(normalize_url);
        let mut states = Vec::with_capacity(spec.states.len());
        let mut by_url = HashMap::new();
        for (i, s) in spec.states.iter().enumerate() {
            let url = url_of(i).unwrap_or_default();
            if !url.is_empty() {
                by_url.insert(url.clone(), i);
            }
            let mut elements = Vec::with_capacity(s.elements.len());
            let mut transitions = HashMap::with_capacity(s.elements.len());
            for e in &s.elements {
                let target = e.leads_to.as_ref().map(|t| by_id[t]);
                let target_url = match (&e.href, target) {
                    (Some(href), _) => Some(normalize_url(href)),
                    (None, Some(t)) => url_of(t),
                    (None, None) => None,
                };
                elements.push(ObservedElement {
                    element: ElementRef::new(e.xpath.clone(), e.role, e.name.clone())
                        .map_err(|err| EnvError::InvalidSpec(err.to_string()))?,
                    hazard: e.hazard,
                    external: e.external,
                    target_url,
                });
                transitions.insert(e.xpath.clone(), (target, e.external));
            }
            states.push(CompiledState {
                observation: Observation::new(url, s.title.clone(), elements),
                transitions,
            });
        }
        Ok(Self {
            inner: Arc::new(SiteInner {
                spec,
                states,
                by_url,
                by_id,
            }),
        })
    }

    pub fn spec(&self) -> &SiteSpec {
        &self.inner.spec
    }

    pub fn start_url(&self) -> Option<String> {
        self.inner.spec.start_url()
    }

    /// Observation of the state `id`, independent of any session.
    pub fn observation_of(&self, id: &str) -> Option<&Observation> {
        self.inner.by_id.get(id).map(|&i| &self.inner.states[i].observation)
    }

    /// A fresh session with one virtual second per action.
    pub fn session(&self) -> SimSession {
        self.session_with_latency(Duration::from_secs(1))
    }

    pub fn session_with_latency(&self, latency: Duration) -> SimSession {
        SimSession {
            site: self.clone(),
            current: None,
            latency,
            clock: Duration::ZERO,
            log: Vec::new(),
        }
    }
}

/// Validates `spec` and opens an unpositioned session on it.
pub fn open_session(spec: SiteSpec) -> Result<SimSession, EnvError> {
    Ok(SimulatedSite::new(spec)?.session())
}

/// One browsing session over a [`SimulatedSite`].
pub struct SimSession {
    site: SimulatedSite,
    current: Option<usize>,
    latency: Duration,
    clock: Duration,
    log: Vec<Action>,
}

impl SimSession {
    pub fn site(&self) -> &SimulatedSite {
        &self.site
    }

    /// Spec id of the current state.
    pub fn current_state(&self) -> Option<&str> {
        self.current.map(|i| self.site.inner.spec.states[i].id.as_str())
    }

    /// Every action performed so far, resets recorded as gotos.
    pub fn action_log(&self) -> &[Action] {
        &self.log
    }

    fn goto(&mut self, url: &str) -> Result<Observation, EnvError> {
        let norm = normalize_url(url);
        self.log.push(Action::Goto {
            target_url: norm.clone(),
        });
        self.clock += self.latency;
        let &i = self
            .site
            .inner
            .by_url
            .get(&norm)
            .ok_or(EnvError::UnknownUrl(norm))?;
        self.current = Some(i);
        Ok(self.site.inner.states[i].observation.clone())
    }

    fn click(&mut self, locator: &str) -> Result<Observation, EnvError> {
        let cur = self.current.ok_or(EnvError::NotPositioned)?;
        let state = &self.site.inner.states[cur];
        let &(target, external) = state
            .transitions
            .get(locator)
            .ok_or_else(|| EnvError::UnknownLocator(locator.to_owned()))?;
        if external {
            return Err(EnvError::ExternalBlocked(locator.to_owned()));
        }
        self.log.push(Action::click(locator));
        self.clock += self.latency;
        let next = target.unwrap_or(cur);
        self.current = Some(next);
        Ok(self.site.inner.states[next].observation.clone())
    }
}

impl Environment for SimSession {
    fn reset(&mut self, url: &str) -> Result<Observation, EnvError> {
        self.goto(url)
    }

    fn perform(&mut self, action: &Action) -> Result<Observation, EnvError> {
        match action {
            Action::Goto { target_url } => self.goto(target_url),
            Action::Click { locator } => self.click(locator),
        }
    }

    fn observe(&self) -> Result<Observation, EnvError> {
        let cur = self.current.ok_or(EnvError::NotPositioned)?;
        Ok(self.site.inner.states[cur].observation.clone())
    }

    fn elapsed(&self) -> Duration {
        self.clock
    }
}
