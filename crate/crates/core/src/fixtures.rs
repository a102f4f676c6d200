//! Generated site specs for examples, tests and benchmarks.
//!
//! Every generator keeps one rule that exploration relies on: an xpath means
//! the same element (role, name, destination) on every page that carries it.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{ElementSpec, EnvError, SimulatedSite, SiteSpec, StateSpec};
use crate::graph::{NodeId, Role};
use crate::navigator::{Task, TaskFixture, TaskStep};

fn link(xpath: impl Into<String>, name: impl Into<String>, to: impl Into<String>) -> ElementSpec {
    ElementSpec::new(xpath, Role::Link, name).leading_to(to)
}

fn button(xpath: impl Into<String>, name: impl Into<String>) -> ElementSpec {
    ElementSpec::new(xpath, Role::Button, name)
}

fn heading(xpath: impl Into<String>, name: impl Into<String>) -> ElementSpec {
    ElementSpec::new(xpath, Role::Heading, name)
}

fn state(id: impl Into<String>, url: Option<String>, title: impl Into<String>) -> StateSpec {
    StateSpec::new(id, url.as_deref(), title)
}

fn with_all(mut s: StateSpec, elements: impl IntoIterator<Item = ElementSpec>) -> StateSpec {
    s.elements.extend(elements);
    s
}

/// Node id the explorer will assign to state `id` of `spec`.
pub fn state_node_id(spec: &SiteSpec, id: &str) -> Result<NodeId, EnvError> {
    let site = SimulatedSite::new(spec.clone())?;
    let obs = site
        .observation_of(id)
        .ok_or_else(|| EnvError::InvalidSpec(format!("no state {id:?}")))?;
    let node = obs
        .to_node(0)
        .map_err(|e| EnvError::InvalidSpec(e.to_string()))?;
    Ok(node.id().clone())
}

const FORUM_WORDS: [&str; 12] = [
    "askscience", "books", "cooking", "diy", "earth", "fitness", "gaming", "history", "jazz",
    "linux", "movies", "travel",
];

/// A forum site: wide and shallow.
///
/// Home and an all-forums index share a header; every forum lists `posts`
/// posts, and every post opens an inline reply form. Deleting a post is
/// marked hazardous.
pub fn reddit_like(forums: usize, posts: usize) -> SiteSpec {
    let base = "http://reddit.local";
    let nav = || {
        [
            link("/html/body/header/nav/a[1]", "Postmill", "home"),
            link("/html/body/header/nav/a[2]", "Forums", "forums"),
        ]
    };
    let name = |i: usize| format!("{}{}", FORUM_WORDS[i % FORUM_WORDS.len()], i);
    let mut states = Vec::new();

    let mut home = with_all(state("home", Some(format!("{base}/")), "Postmill"), nav());
    home = home.with(heading("/html/body/main/h1", "Hot posts"));
    for i in 0..forums.min(5) {
        home = home.with(link(
            format!("/html/body/main/ul[@class='featured']/li[{}]/a", i + 1),
            name(i),
            format!("forum{i}"),
        ));
    }
    states.push(home);

    let mut index = with_all(state("forums", Some(format!("{base}/forums")), "All forums"), nav());
    index = index.with(heading("/html/body/main/h1[@class='index']", "List of forums"));
    for i in 0..forums {
        index = index.with(link(
            format!("/html/body/main/table/tbody/tr[{}]/td[1]/a", i + 1),
            name(i),
            format!("forum{i}"),
        ));
    }
    states.push(index);

    for i in 0..forums {
        let f = format!("/html/body/main/div[@id='forum-{i}']");
        let mut forum = with_all(
            state(format!("forum{i}"), Some(format!("{base}/f/{}", name(i))), format!("/f/{}", name(i))),
            nav(),
        );
        forum = forum
            .with(heading(format!("{f}/h1"), name(i)))
            .with(button(format!("{f}/button[@name='subscribe']"), "Subscribe"))
            .with(link(format!("{f}/a[@rel='submit']"), "Submit a post", format!("submit{i}")));
        for j in 0..posts {
            forum = forum.with(link(
                format!("{f}/article[{}]/h2/a", j + 1),
                format!("Post {j} in {}", name(i)),
                format!("post{i}_{j}"),
            ));
        }
        states.push(forum);

        states.push(with_all(
            state(format!("submit{i}"), None, format!("Submit to /f/{}", name(i))),
            nav().into_iter().chain([
                ElementSpec::new(format!("{f}/form/input[@name='title']"), Role::Textbox, "Title"),
                link(format!("{f}/form/button[@name='cancel']"), "Cancel", format!("forum{i}")),
            ]),
        ));

        for j in 0..posts {
            let p = format!("/html/body/main/div[@id='post-{i}-{j}']");
            let mut post = with_all(
                state(
                    format!("post{i}_{j}"),
                    Some(format!("{base}/f/{}/{j}", name(i))),
                    format!("Post {j} in {}", name(i)),
                ),
                nav(),
            );
            post = post
                .with(heading(format!("{p}/h1"), format!("Post {j} in {}", name(i))))
                .with(link(format!("{p}/a[@rel='up']"), format!("Back to {}", name(i)), format!("forum{i}")))
                .with(button(format!("{p}/button[@name='reply']"), "Reply").leading_to(format!("reply{i}_{j}")))
                .with(button(format!("{p}/button[@name='delete']"), "Delete").hazardous());
            if j == 0 {
                post = post.with(
                    ElementSpec::new(format!("{p}/a[@rel='external']"), Role::Link, "Source")
                        .external_link(format!("https://news.example/{i}/{j}")),
                );
            }
            states.push(post);

            states.push(with_all(
                state(format!("reply{i}_{j}"), None, format!("Reply to post {j} in {}", name(i))),
                nav().into_iter().chain([
                    heading(format!("{p}/h1"), format!("Post {j} in {}", name(i))),
                    ElementSpec::new(format!("{p}/form/textarea"), Role::Textbox, "Comment"),
                    button(format!("{p}/form/button[@name='cancel']"), "Cancel")
                        .leading_to(format!("post{i}_{j}")),
                ]),
            ));
        }
    }
    SiteSpec {
        domain: "reddit".into(),
        start: "home".into(),
        states,
    }
}

/// A code-hosting site: narrow and deep.
///
/// Every project has a repository tree `levels` directories deep with two
/// subdirectories and one file per directory, an issue tracker, and a
/// settings menu that only opens by click.
pub fn gitlab_like(projects: usize, levels: usize) -> SiteSpec {
    let base = "http://gitlab.local";
    let nav = || {
        [
            link("/html/body/header/a[@class='logo']", "GitLab", "home"),
            link("/html/body/header/nav/a[1]", "Projects", "projects"),
        ]
    };
    let mut states = vec![
        with_all(state("home", Some(format!("{base}/")), "Dashboard"), nav())
            .with(heading("/html/body/main/h1", "Welcome to GitLab")),
    ];
    let mut index = with_all(state("projects", Some(format!("{base}/explore")), "Explore projects"), nav());
    for p in 0..projects {
        index = index.with(link(
            format!("/html/body/main/ul[@class='projects']/li[{}]/a", p + 1),
            format!("Project {p}"),
            format!("proj{p}"),
        ));
    }
    states.push(index);

    for p in 0..projects {
        let slug = format!("{base}/group/project-{p}");
        let side = |p: usize| {
            let a = format!("/html/body/aside[@id='proj-{p}']");
            [
                link(format!("{a}/a[1]"), "Project overview", format!("proj{p}")),
                link(format!("{a}/a[2]"), "Repository", format!("tree{p}_0")),
                link(format!("{a}/a[3]"), "Issues", format!("issues{p}")),
                button(format!("{a}/button[@name='settings']"), "Settings").leading_to(format!("settings{p}")),
            ]
        };
        let page = |id: String, url: Option<String>, title: String| {
            with_all(state(id, url, title), nav().into_iter().chain(side(p)))
        };
        states.push(
            page(format!("proj{p}"), Some(slug.clone()), format!("Project {p}"))
                .with(heading(format!("/html/body/main/div[@id='proj-{p}']/h1"), format!("Project {p}"))),
        );
        let menu = format!("/html/body/aside[@id='proj-{p}']/ul[@class='settings']");
        states.push(
            page(format!("settings{p}"), None, format!("Project {p} settings menu"))
                .with(ElementSpec::new(format!("{menu}/li[1]/a"), Role::Menuitem, "General").leading_to(format!("general{p}")))
                .with(ElementSpec::new(format!("{menu}/li[2]/a"), Role::Menuitem, "Delete project").hazardous()),
        );
        states.push(
            page(format!("general{p}"), Some(format!("{slug}/edit")), format!("Project {p} general settings"))
                .with(ElementSpec::new(format!("/html/body/main/form[@id='edit-{p}']/input"), Role::Textbox, "Project name")),
        );
        let mut issues = page(format!("issues{p}"), Some(format!("{slug}/issues")), format!("Project {p} issues"));
        for i in 0..3 {
            issues = issues.with(link(
                format!("/html/body/main/ul[@id='issues-{p}']/li[{}]/a", i + 1),
                format!("Issue {i} of project {p}"),
                format!("issue{p}_{i}"),
            ));
            states.push(
                page(format!("issue{p}_{i}"), Some(format!("{slug}/issues/{i}")), format!("Issue {i} of project {p}"))
                    .with(heading(format!("/html/body/main/div[@id='issue-{p}-{i}']/h1"), format!("Issue {i}")))
                    .with(button(format!("/html/body/main/div[@id='issue-{p}-{i}']/button[@name='close']"), "Close issue").hazardous()),
            );
        }
        states.push(issues);

        // directories are named by their index path, "0", "0-1", "0-1-0", ...
        let mut stack = vec![("0".to_string(), 0usize)];
        while let Some((path, level)) = stack.pop() {
            let dir = format!("tree{p}_{path}");
            let t = format!("/html/body/main/table[@id='tree-{p}-{path}']");
            let shown = path.replace('-', "/");
            let mut tree = page(dir.clone(), Some(format!("{slug}/tree/{shown}")), format!("Project {p} tree {shown}"));
            if level < levels {
                for k in 0..2 {
                    let child = format!("{path}-{k}");
                    tree = tree.with(link(format!("{t}/tr[{}]/a", k + 1), format!("dir {k}"), format!("tree{p}_{child}")));
                    stack.push((child, level + 1));
                }
            }
            let blob = format!("blob{p}_{path}");
            tree = tree.with(link(format!("{t}/tr[3]/a"), "README.md", blob.clone()));
            states.push(tree);

            let b = format!("/html/body/main/div[@id='blob-{p}-{path}']");
            let tabs = |p: &str| {
                [
                    ElementSpec::new(format!("{b}/ul/li[1]/a"), Role::Tab, "Preview").leading_to(format!("blob{p}")),
                    ElementSpec::new(format!("{b}/ul/li[2]/a"), Role::Tab, "Blame").leading_to(format!("blame{p}")),
                ]
            };
            let key = format!("{p}_{path}");
            states.push(
                page(blob.clone(), Some(format!("{slug}/blob/{shown}/README.md")), format!("README.md in {shown}"))
                    .with(heading(format!("{b}/h1"), format!("README.md in {shown}")))
                    .with_all_from(tabs(&key))
                    .with(ElementSpec::new(format!("{b}/a[@rel='raw']"), Role::Link, "Open raw").external_link(format!("https://cdn.example/{p}/{path}"))),
            );
            states.push(
                page(format!("blame{key}"), None, format!("Blame README.md in {shown}"))
                    .with(heading(format!("{b}/h1"), format!("README.md in {shown}")))
                    .with_all_from(tabs(&key))
                    .with(ElementSpec::new(format!("{b}/table[@class='blame']"), Role::Text, "blame annotations")),
            );
        }
    }
    SiteSpec {
        domain: "gitlab".into(),
        start: "home".into(),
        states,
    }
}

trait WithAll {
    fn with_all_from(self, elements: impl IntoIterator<Item = ElementSpec>) -> Self;
}

impl WithAll for StateSpec {
    fn with_all_from(self, elements: impl IntoIterator<Item = ElementSpec>) -> Self {
        with_all(self, elements)
    }
}

const MAP_KINDS: [&str; 3] = ["Search", "Directions", "Layers"];
const PLACES: [&str; 10] = [
    "Oakland", "Shadyside", "Squirrel Hill", "Bloomfield", "Lawrenceville", "Downtown",
    "Strip District", "Polish Hill", "Greenfield", "Hazelwood",
];

/// A layered map site.
///
/// Layer `d` has `layers[d]` states (layer 0 must have exactly one, the
/// home map). State `j` of layer `d+1` is opened from state `j mod
/// layers[d]` of layer `d`, so the explorer discovers exactly `layers[d]`
/// new pages at depth `d` and nothing after the last layer. Every page is
/// URL-addressable; the last layer's pages carry a zoom button that keeps
/// the page unchanged.
pub fn map_like(layers: &[usize]) -> SiteSpec {
    assert_eq!(layers.first(), Some(&1), "the first layer is the home page alone");
    let base = "http://map.local";
    // (state id, kind, layer)
    let mut ids: Vec<Vec<(String, usize)>> = vec![vec![("map0".into(), 0)]];
    let mut next = 1;
    for (d, &size) in layers.iter().enumerate().skip(1) {
        let prev = &ids[d - 1];
        let layer = (0..size)
            .map(|j| {
                let kind = if d == 1 { j % MAP_KINDS.len() } else { prev[j % prev.len()].1 };
                let id = format!("map{next}");
                next += 1;
                (id, kind)
            })
            .collect();
        ids.push(layer);
    }
    let title = |d: usize, k: usize, kind: usize| -> String {
        let num: usize = k;
        match d {
            0 => "OpenStreetMap".into(),
            1 => MAP_KINDS[kind].into(),
            _ => format!("{} {} {num}", MAP_KINDS[kind], PLACES[num % PLACES.len()]),
        }
    };
    let mut states = Vec::new();
    for (d, layer) in ids.iter().enumerate() {
        for (j, (id, kind)) in layer.iter().enumerate() {
            let k: usize = id[3..].parse().expect("ids are map<k>");
            let url = if d == 0 { format!("{base}/") } else { format!("{base}/{}/{k}", MAP_KINDS[*kind].to_lowercase()) };
            let t = title(d, k, *kind);
            let root = format!("/html/body/div[@id='panel-{k}']");
            let mut s = state(id.clone(), Some(url), t.clone())
                .with(heading(format!("{root}/h1"), t))
                .with(ElementSpec::new("/html/body/form/input[@name='query']", Role::Textbox, "Search the map"));
            if let Some(children) = ids.get(d + 1) {
                for (c, (cid, ckind)) in children.iter().enumerate() {
                    if c % layer.len() == j {
                        let ck: usize = cid[3..].parse().expect("ids are map<k>");
                        s = s.with(link(
                            format!("{root}/ul/li[@data-k='{ck}']/a"),
                            title(d + 1, ck, *ckind),
                            cid.clone(),
                        ));
                    }
                }
            } else {
                s = s.with(button("/html/body/div[@id='map']/button[@title='Zoom in']", "Zoom in"));
            }
            states.push(s);
        }
    }
    SiteSpec {
        domain: "map".into(),
        start: "map0".into(),
        states,
    }
}

/// The 29-page map whose discovery saturates at depth 5: cumulative node
/// counts per depth are 1, 4, 10, 19, 29, 29.
pub fn saturating_map() -> SiteSpec {
    map_like(&[1, 3, 6, 9, 10])
}

/// `pages` pages that all carry the same `nav` navigation links (to pages
/// `0..nav`), plus one content link from page `i` to page `i + nav/3`
/// (wrapping), which is how the remaining pages are found.
pub fn shared_navbar(pages: usize, nav: usize) -> SiteSpec {
    assert!(nav <= pages && nav > 0);
    let base = "http://navbar.local";
    let step = (nav / 3).max(1);
    let states = (0..pages)
        .map(|i| {
            let mut s = state(format!("page{i}"), Some(format!("{base}/p/{i}")), format!("Page {i}"));
            for n in 0..nav {
                s = s.with(link(format!("/html/body/nav/ul/li[{}]/a", n + 1), format!("Section {n}"), format!("page{n}")));
            }
            s.with(heading(format!("/html/body/main/article[@id='p{i}']/h1"), format!("Page {i}")))
                .with(link(
                    format!("/html/body/main/article[@id='p{i}']/a[@rel='next']"),
                    format!("Read on: page {}", (i + step) % pages),
                    format!("page{}", (i + step) % pages),
                ))
        })
        .collect();
    SiteSpec {
        domain: "navbar".into(),
        start: "page0".into(),
        states,
    }
}

/// Home page with a menu that opens by click and holds a dialog, an
/// addressable billing page and a hazardous sign-out item.
pub fn menu_site() -> SiteSpec {
    let base = "http://menu.local";
    let header = || {
        [
            link("/html/body/header/a[@rel='help']", "Help", "help"),
            button("/html/body/header/button[@aria-label='Menu']", "Menu").leading_to("menu"),
        ]
    };
    let item = |k: usize, name: &str| {
        ElementSpec::new(format!("/html/body/header/ul[@role='menu']/li[{k}]/a"), Role::Menuitem, name)
    };
    SiteSpec {
        domain: "menu".into(),
        start: "home".into(),
        states: vec![
            with_all(state("home", Some(format!("{base}/")), "Home"), header())
                .with(heading("/html/body/main/h1", "Welcome")),
            with_all(state("help", Some(format!("{base}/help")), "Help"), header())
                .with(heading("/html/body/main/h1[@id='help']", "Help center")),
            with_all(state("menu", None, "Home with open menu"), header())
                .with(heading("/html/body/main/h1", "Welcome"))
                .with(item(1, "Profile").leading_to("profile"))
                .with(item(2, "Billing").leading_to("billing"))
                .with(item(3, "Sign out").hazardous()),
            with_all(state("profile", None, "Edit profile dialog"), header())
                .with(ElementSpec::new("/html/body/dialog/input[@name='display']", Role::Textbox, "Display name"))
                .with(button("/html/body/dialog/button[@name='close']", "Close").leading_to("home")),
            with_all(state("billing", Some(format!("{base}/billing")), "Billing"), header())
                .with(heading("/html/body/main/h1[@id='billing']", "Billing and invoices")),
        ],
    }
}

/// A random site of `n` states.
///
/// States may be addressable or click-only, carry global navigation links,
/// local links (some of them self-loops), hazardous buttons and external
/// links. Not every state need be reachable from the start.
pub fn random_site(seed: u64, n: usize, max_links: usize) -> SiteSpec {
    assert!(n > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = format!("http://rand{seed}.local");
    let nav_targets: Vec<usize> = (0..rng.random_range(0..=3)).map(|_| rng.random_range(0..n)).collect();
    let roles = [Role::Link, Role::Button, Role::Tab, Role::Menuitem, Role::Checkbox];
    let mut states = Vec::with_capacity(n);
    for k in 0..n {
        let url = (k == 0 || rng.random_bool(0.6)).then(|| format!("{base}/s/{k}"));
        let mut s = state(format!("s{k}"), url, format!("State {k}"));
        for (i, t) in nav_targets.iter().enumerate() {
            if rng.random_bool(0.5) {
                s = s.with(link(format!("/html/body/nav/a[{}]", i + 1), format!("Nav {i}"), format!("s{t}")));
            }
        }
        let sec = format!("/html/body/main/section[@id='s{k}']");
        s = s.with(heading(format!("{sec}/h1"), format!("State {k}")));
        for j in 0..rng.random_range(0..=max_links) {
            let role = *roles.choose(&mut rng).expect("non-empty");
            let mut e = ElementSpec::new(format!("{sec}/a[{}]", j + 1), role, format!("Go {k} {j}"));
            if !rng.random_bool(0.15) {
                e = e.leading_to(format!("s{}", rng.random_range(0..n)));
            }
            s = s.with(e);
        }
        if rng.random_bool(0.1) {
            s = s.with(button(format!("{sec}/button[@name='delete']"), format!("Delete {k}")).hazardous());
        }
        if rng.random_bool(0.1) {
            s = s.with(
                ElementSpec::new(format!("{sec}/a[@rel='external']"), Role::Link, "Elsewhere")
                    .external_link(format!("https://elsewhere.example/{k}")),
            );
        }
        states.push(s);
    }
    SiteSpec {
        domain: format!("rand{seed}"),
        start: "s0".into(),
        states,
    }
}

/// A scripted change to a site.
#[derive(Debug, Clone, PartialEq)]
pub enum Mutation {
    /// New state `id`, linked from `from` through a new element.
    AddPage {
        from: String,
        id: String,
        url: Option<String>,
        title: String,
    },
    /// Removes a state and every element leading to it.
    DeletePage { id: String },
    AddElement { state: String, element: ElementSpec },
    RemoveElement { state: String, xpath: String },
}

impl Mutation {
    pub fn apply(&self, spec: &mut SiteSpec) -> Result<(), EnvError> {
        let missing = |id: &str| EnvError::InvalidSpec(format!("no state {id:?}"));
        match self {
            Mutation::AddPage { from, id, url, title } => {
                let page = state(id.clone(), url.clone(), title.clone())
                    .with(heading(format!("/html/body/main/section[@id='new-{id}']/h1"), title.clone()));
                spec.state_mut(from)
                    .ok_or_else(|| missing(from))?
                    .elements
                    .push(link(format!("/html/body/main/a[@data-new='{id}']"), title.clone(), id.clone()));
                spec.states.push(page);
            }
            Mutation::DeletePage { id } => {
                if *id == spec.start {
                    return Err(EnvError::InvalidSpec("cannot delete the start state".into()));
                }
                let before = spec.states.len();
                spec.states.retain(|s| s.id != *id);
                if spec.states.len() == before {
                    return Err(missing(id));
                }
                for s in &mut spec.states {
                    s.elements.retain(|e| e.leads_to.as_deref() != Some(id));
                }
            }
            Mutation::AddElement { state, element } => {
                spec.state_mut(state).ok_or_else(|| missing(state))?.elements.push(element.clone());
            }
            Mutation::RemoveElement { state, xpath } => {
                spec.state_mut(state)
                    .ok_or_else(|| missing(state))?
                    .elements
                    .retain(|e| e.xpath != *xpath);
            }
        }
        spec.validate()
    }
}

const PRODUCTS: [&str; 8] = [
    "Aurora Backpack", "Borealis Tent", "Cascade Jacket", "Dune Sandals", "Ember Stove",
    "Fjord Kayak", "Glacier Bottle", "Harbor Lantern",
];
const CUSTOMERS: [&str; 6] = [
    "Ava Chen", "Bruno Diaz", "Chloe Evans", "Dmitri Fox", "Elena Garcia", "Farah Hassan",
];
const REPORTS: [&str; 3] = ["Bestsellers", "Low stock", "Abandoned carts"];

fn order_number(k: usize) -> String {
    format!("{:09}", 101 + k)
}

/// An admin panel of an online store.
///
/// `addresses[c]` is the address printed on customer `c`'s page and on
/// their orders; order `k` belongs to customer `k mod 6`.
pub fn cms_site(addresses: &[String; 6]) -> SiteSpec {
    let base = "http://cms.local/admin";
    let menu = "/html/body/nav[@id='menu']/ul";
    let sidebar = || {
        [
            link(format!("{menu}/li[1]/a"), "Dashboard", "dashboard"),
            link(format!("{menu}/li[2]/a"), "Catalog", "products"),
            link(format!("{menu}/li[3]/a"), "Sales", "orders"),
            link(format!("{menu}/li[4]/a"), "Customers", "customers"),
            button(format!("{menu}/li[5]/button"), "Reports").leading_to("reports"),
        ]
    };
    let page = |id: &str, url: Option<String>, title: &str| with_all(state(id, url, title), sidebar());
    let mut states = vec![page("dashboard", Some(format!("{base}/")), "Dashboard").with(heading("/html/body/main/h1", "Lifetime sales"))];

    let mut reports = page("reports", None, "Dashboard with reports menu").with(heading("/html/body/main/h1", "Lifetime sales"));
    for (r, name) in REPORTS.iter().enumerate() {
        reports = reports.with(
            ElementSpec::new(format!("/html/body/nav[@id='menu']/div[@id='reports']/ul/li[{}]/a", r + 1), Role::Menuitem, *name)
                .leading_to(format!("report{r}")),
        );
        let slug = name.to_lowercase().replace(' ', "_");
        states.push(
            page(&format!("report{r}"), Some(format!("{base}/reports/{slug}")), &format!("{name} report"))
                .with(heading(format!("/html/body/main/div[@id='report-{r}']/h1"), format!("{name} report"))),
        );
    }
    states.push(reports);

    let mut grid = page("products", Some(format!("{base}/catalog/product")), "Products").with(heading("/html/body/main/h1[@id='products']", "Products"));
    for (k, name) in PRODUCTS.iter().enumerate() {
        grid = grid.with(link(format!("/html/body/main/table[@id='products']/tbody/tr[{}]/td/a", k + 1), *name, format!("product{k}")));
        let p = format!("/html/body/main/div[@id='product-{k}']");
        let tabs = || {
            [
                ElementSpec::new(format!("{p}/ul/li[1]/a"), Role::Tab, "Images and videos").leading_to(format!("product{k}_images")),
                ElementSpec::new(format!("{p}/ul/li[2]/a"), Role::Tab, "Search engine optimization").leading_to(format!("product{k}_seo")),
            ]
        };
        states.push(
            page(&format!("product{k}"), Some(format!("{base}/catalog/product/edit/id/{}", k + 1)), &format!("Edit product {name}"))
                .with(heading(format!("{p}/h1"), *name))
                .with_all_from(tabs())
                .with(button(format!("{p}/button[@name='save']"), "Save"))
                .with(button(format!("{p}/button[@name='delete']"), "Delete product").hazardous()),
        );
        states.push(
            page(&format!("product{k}_images"), None, &format!("{name} images and videos"))
                .with(heading(format!("{p}/h1"), *name))
                .with_all_from(tabs())
                .with(button(format!("{p}/div[@class='images']/button"), "Upload image")),
        );
        states.push(
            page(&format!("product{k}_seo"), None, &format!("{name} search engine optimization"))
                .with(heading(format!("{p}/h1"), *name))
                .with_all_from(tabs())
                .with(ElementSpec::new(format!("{p}/div[@class='seo']/input"), Role::Textbox, "URL key")),
        );
    }
    states.push(grid);

    let mut orders = page("orders", Some(format!("{base}/sales/order")), "Orders").with(heading("/html/body/main/h1[@id='orders']", "Orders"));
    for k in 0..8 {
        let num = order_number(k);
        let c = k % CUSTOMERS.len();
        orders = orders.with(link(format!("/html/body/main/table[@id='orders']/tbody/tr[{}]/td/a", k + 1), format!("Order {num}"), format!("order{k}")));
        let o = format!("/html/body/main/div[@id='order-{k}']");
        states.push(
            page(&format!("order{k}"), Some(format!("{base}/sales/order/view/{num}")), &format!("Order {num}"))
                .with(heading(format!("{o}/h1"), format!("Order {num}")))
                .with(link(format!("{o}/a[@rel='customer']"), format!("Customer {}", CUSTOMERS[c]), format!("customer{c}")))
                .with(ElementSpec::new(format!("{o}/address"), Role::Text, format!("Ship to {}", addresses[c])))
                .with(button(format!("{o}/button[@name='invoice']"), "Invoice"))
                .with(button(format!("{o}/button[@name='ship']"), "Ship").hazardous()),
        );
    }
    states.push(orders);

    let mut customers = page("customers", Some(format!("{base}/customer")), "Customers").with(heading("/html/body/main/h1[@id='customers']", "Customers"));
    for (c, name) in CUSTOMERS.iter().enumerate() {
        customers = customers.with(link(format!("/html/body/main/table[@id='customers']/tbody/tr[{}]/td/a", c + 1), *name, format!("customer{c}")));
        let d = format!("/html/body/main/div[@id='customer-{c}']");
        states.push(
            page(&format!("customer{c}"), Some(format!("{base}/customer/edit/{}", c + 1)), &format!("Customer {name}"))
                .with(heading(format!("{d}/h1"), *name))
                .with(ElementSpec::new(format!("{d}/address"), Role::Text, format!("Address {}", addresses[c]))),
        );
    }
    states.push(customers);
    SiteSpec {
        domain: "cms".into(),
        start: "dashboard".into(),
        states,
    }
}

/// Two sites plus 25 ground-truth tasks: 12 on the store admin, 8 on the
/// map, and 5 that look up an order's shipping address in the admin and then
/// open the matching directions page on the map.
#[derive(Debug, Clone)]
pub struct DualDomain {
    pub cms: SiteSpec,
    pub map: SiteSpec,
    pub tasks: TaskFixture,
}

pub fn dual_domain() -> Result<DualDomain, EnvError> {
    let map = saturating_map();
    let title = |id: &str| map.state(id).expect("map state").title.clone();
    // deep directions pages; their place names become customer addresses
    let directions: Vec<String> = map
        .states
        .iter()
        .filter(|s| s.title.starts_with("Directions "))
        .map(|s| s.id.clone())
        .collect();
    assert!(directions.len() >= 5, "the map has enough directions pages");
    let addresses: [String; 6] = std::array::from_fn(|c| title(&directions[c % directions.len()]).trim_start_matches("Directions ").to_owned());
    let cms = cms_site(&addresses);

    let cms_step = |id: &str, query: String| -> Result<TaskStep, EnvError> {
        Ok(TaskStep {
            domain: "cms".into(),
            query,
            target: state_node_id(&cms, id)?,
        })
    };
    let map_step = |id: &str, query: String| -> Result<TaskStep, EnvError> {
        Ok(TaskStep {
            domain: "map".into(),
            query,
            target: state_node_id(&map, id)?,
        })
    };
    let mut tasks = Vec::new();
    let mut push = |intent: String, steps: Vec<TaskStep>| {
        tasks.push(Task {
            id: format!("task{:02}", tasks.len() + 1),
            intent,
            steps,
        })
    };

    for k in [0, 1, 2, 3, 5, 7] {
        let name = PRODUCTS[k];
        push(format!("Change the price of {name}"), vec![cms_step(&format!("product{k}"), format!("edit product {name}"))?]);
    }
    for k in [4, 6] {
        let name = PRODUCTS[k];
        push(
            format!("Replace the main photo of {name}"),
            vec![cms_step(&format!("product{k}_images"), format!("{name} images and videos"))?],
        );
    }
    for k in [1, 6] {
        let num = order_number(k);
        push(format!("Issue an invoice for order {num}"), vec![cms_step(&format!("order{k}"), format!("order {num}"))?]);
    }
    push(format!("Update the address of {}", CUSTOMERS[3]), vec![cms_step("customer3", format!("customer {}", CUSTOMERS[3]))?]);
    push("Which products sell best this month".into(), vec![cms_step("report0", "bestsellers report".into())?]);

    let singles: Vec<&StateSpec> = map
        .states
        .iter()
        .filter(|s| !s.title.starts_with("Directions"))
        .skip(4)
        .step_by(2)
        .take(8)
        .collect();
    for s in singles {
        push(format!("Show me {} on the map", s.title), vec![map_step(&s.id, s.title.to_lowercase())?]);
    }

    for (n, k) in [0usize, 2, 3, 4, 5].into_iter().enumerate() {
        let num = order_number(k);
        let c = k % CUSTOMERS.len();
        let dir = &directions[c % directions.len()];
        push(
            format!("Get directions from our store to the shipping address of order {num}"),
            vec![
                cms_step(&format!("order{k}"), format!("order {num} shipping address"))?,
                map_step(dir, format!("directions to {}", addresses[c]))?,
            ],
        );
        debug_assert!(n < 5);
    }
    Ok(DualDomain {
        cms,
        map,
        tasks: TaskFixture { tasks },
    })
}
