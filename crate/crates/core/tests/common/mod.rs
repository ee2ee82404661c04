//! Shared helpers and brute-force models used as oracles. The models are
//! written from the family descriptions directly and share no code with
//! the library.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use horobundle::families::FamilySpec;
use horobundle::graph::{labels, parse_vertex, VertexId};
use horobundle::rays::Horizon;
use horobundle::space::Space;

pub fn space(spec: &FamilySpec, h: &Horizon, reach: u32) -> Space {
    Space::for_family(spec, h, reach).expect("family builds")
}

pub fn v(space: &Space, label: &str) -> VertexId {
    parse_vertex(space.oracle(), label).expect("known vertex")
}

pub fn names(space: &Space, vertices: &[VertexId]) -> BTreeSet<String> {
    labels(space.oracle(), vertices).into_iter().collect()
}

pub fn set<I, S>(items: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

/// `{p_lo, ..., p_hi}` for a rail letter `p`.
pub fn rail(letter: char, indices: impl IntoIterator<Item = i64>) -> BTreeSet<String> {
    indices
        .into_iter()
        .map(|n| format!("{letter}{n}"))
        .collect()
}

/// Undirected graph on string labels, explored by BFS.
#[derive(Default)]
pub struct Model {
    adj: HashMap<String, HashSet<String>>,
}

impl Model {
    pub fn edge(&mut self, a: &str, b: &str) {
        self.adj.entry(a.into()).or_default().insert(b.into());
        self.adj.entry(b.into()).or_default().insert(a.into());
    }

    pub fn distances(&self, from: &str) -> HashMap<String, u32> {
        let mut dist = HashMap::from([(from.to_string(), 0)]);
        let mut queue = VecDeque::from([from.to_string()]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            for w in self.adj.get(&u).into_iter().flatten() {
                if !dist.contains_key(w) {
                    dist.insert(w.clone(), d + 1);
                    queue.push_back(w.clone());
                }
            }
        }
        dist
    }

    pub fn dist(&self, a: &str, b: &str) -> u32 {
        self.distances(a)[b]
    }

    pub fn ball(&self, center: &str, r: u32) -> BTreeSet<String> {
        self.distances(center)
            .into_iter()
            .filter(|(_, d)| *d <= r)
            .map(|(v, _)| v)
            .collect()
    }

    /// Brute-force interval: every `z` with `d(x,z) + d(z,y) = d(x,y)`.
    pub fn interval(&self, x: &str, y: &str) -> BTreeSet<String> {
        let dx = self.distances(x);
        let dy = self.distances(y);
        let total = dx[y];
        dx.keys()
            .filter(|z| dy.get(*z).is_some_and(|d| dx[*z] + d == total))
            .cloned()
            .collect()
    }
}

/// Three-rail ladder truncated at index `len`: rails along x and y, the
/// middle vertex `z_m` joined to `x_m` and `y_m`.
pub fn bad_ladder_one_model(len: i64) -> Model {
    let mut m = Model::default();
    for n in 1..=len {
        if n < len {
            m.edge(&format!("x{n}"), &format!("x{}", n + 1));
            m.edge(&format!("y{n}"), &format!("y{}", n + 1));
        }
        m.edge(&format!("z{n}"), &format!("x{n}"));
        m.edge(&format!("z{n}"), &format!("y{n}"));
    }
    m
}

/// `Z x {0,1}` on `-len..=len`.
pub fn z_ladder_model(len: i64) -> Model {
    let mut m = Model::default();
    for k in -len..=len {
        m.edge(&format!("({k},0)"), &format!("({k},1)"));
        if k < len {
            for i in 0..2 {
                m.edge(&format!("({k},{i})"), &format!("({},{i})", k + 1));
            }
        }
    }
    m
}

/// Reduced words of length at most `len` over `a A b B`.
pub fn reduced_words(len: usize) -> Vec<String> {
    let inverse = |c: char| {
        if c.is_lowercase() {
            c.to_ascii_uppercase()
        } else {
            c.to_ascii_lowercase()
        }
    };
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for c in ['a', 'A', 'b', 'B'] {
                if w.chars().last().is_some_and(|l| l == inverse(c)) {
                    continue;
                }
                next.push(format!("{w}{c}"));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Free reduction of a word over `a A b B`.
pub fn free_reduce(word: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in word.chars() {
        match out.last() {
            Some(&l) if l != c && l.eq_ignore_ascii_case(&c) => {
                out.pop();
            }
            _ => out.push(c),
        }
    }
    out.into_iter().collect()
}

/// `e` for the empty word.
pub fn word_label(word: &str) -> String {
    if word.is_empty() {
        "e".into()
    } else {
        word.into()
    }
}

/// The first `len + 1` vertices of the ray `period^∞` from `e`
/// (assumes a cyclically reduced period).
pub fn periodic_ray(period: &str, len: usize) -> Vec<String> {
    let letters: Vec<char> = period.chars().cycle().take(len).collect();
    (0..=len)
        .map(|k| word_label(&letters[..k].iter().collect::<String>()))
        .collect()
}
