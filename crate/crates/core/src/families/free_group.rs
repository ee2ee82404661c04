use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::RwLock;

use crate::graph::{AdjacencyOracle, CayleyStructure, GeneratorOrder, VertexId};

/// Letter `2i` is generator `i`, letter `2i + 1` its inverse.
pub type Letter = u8;

fn inverse_letter(l: Letter) -> Letter {
    l ^ 1
}

#[derive(Default)]
struct Interner {
    words: Vec<Box<[Letter]>>,
    ids: HashMap<Box<[Letter]>, u64>,
}

/// Cayley graph of the free group of the given rank on its standard
/// generators: the `2k`-regular tree. Vertices are reduced words interned on
/// first sight; the identity always has handle 0.
pub struct FreeGroup {
    rank: usize,
    labels: Vec<String>,
    table: RwLock<Interner>,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        assert!((1..=12).contains(&rank), "free group rank must be 1..=12");
        // `e` is reserved for the identity.
        let names: Vec<char> = "abcdfghijklm".chars().take(rank).collect();
        let labels = names
            .iter()
            .flat_map(|c| [c.to_string(), c.to_ascii_uppercase().to_string()])
            .collect();
        let group = Self {
            rank,
            labels,
            table: RwLock::new(Interner::default()),
        };
        group.intern(&[]);
        group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letter_count(&self) -> usize {
        2 * self.rank
    }

    /// Handle of the reduced form of `word`.
    pub fn element(&self, word: &[Letter]) -> VertexId {
        self.intern(&reduce(word))
    }

    /// The reduced word of `g`.
    pub fn word(&self, g: VertexId) -> Vec<Letter> {
        let table = self.table.read().expect("interner poisoned");
        table.words[g.0 as usize].to_vec()
    }

    pub fn word_len(&self, g: VertexId) -> usize {
        let table = self.table.read().expect("interner poisoned");
        table.words[g.0 as usize].len()
    }

    fn intern(&self, reduced: &[Letter]) -> VertexId {
        if let Some(&id) = self
            .table
            .read()
            .expect("interner poisoned")
            .ids
            .get(reduced)
        {
            return VertexId(id);
        }
        let mut table = self.table.write().expect("interner poisoned");
        if let Some(&id) = table.ids.get(reduced) {
            return VertexId(id);
        }
        let id = table.words.len() as u64;
        let boxed: Box<[Letter]> = reduced.into();
        table.words.push(boxed.clone());
        table.ids.insert(boxed, id);
        VertexId(id)
    }

    fn parse_word(&self, text: &str) -> Option<Vec<Letter>> {
        if text == "e" || text.is_empty() {
            return Some(Vec::new());
        }
        text.chars()
            .map(|c| {
                self.labels
                    .iter()
                    .position(|l| l.len() == c.len_utf8() && l.starts_with(c))
                    .map(|p| p as Letter)
            })
            .collect()
    }
}

/// Free reduction of a word.
pub fn reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&inverse_letter(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn common_prefix(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl AdjacencyOracle for FreeGroup {
    fn base_point(&self) -> VertexId {
        VertexId(0)
    }

    fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let word = self.word(v);
        (0..self.letter_count() as Letter)
            .map(|l| {
                let mut w = word.clone();
                if w.last() == Some(&inverse_letter(l)) {
                    w.pop();
                } else {
                    w.push(l);
                }
                self.intern(&w)
            })
            .collect()
    }

    fn degree_bound(&self) -> usize {
        self.letter_count()
    }

    fn vertex_label(&self, v: VertexId) -> String {
        let word = self.word(v);
        if word.is_empty() {
            return "e".to_string();
        }
        word.iter()
            .map(|&l| self.labels[l as usize].as_str())
            .collect()
    }

    fn parse_vertex(&self, label: &str) -> Option<VertexId> {
        self.parse_word(label).map(|w| self.element(&w))
    }

    fn canonical_cmp(&self, a: VertexId, b: VertexId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let table = self.table.read().expect("interner poisoned");
        let (x, y) = (&table.words[a.0 as usize], &table.words[b.0 as usize]);
        x.len().cmp(&y.len()).then_with(|| x.cmp(y))
    }

    fn generator_labels(&self) -> Option<&[String]> {
        Some(&self.labels)
    }

    fn edge_label(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let (a, b) = (self.word(u), self.word(v));
        if b.len() == a.len() + 1 && b.starts_with(&a) {
            Some(b[a.len()] as usize)
        } else if a.len() == b.len() + 1 && a.starts_with(&b) {
            Some(inverse_letter(a[b.len()]) as usize)
        } else {
            None
        }
    }

    fn exact_distance(&self, u: VertexId, v: VertexId) -> Option<u32> {
        let table = self.table.read().expect("interner poisoned");
        let (a, b) = (&table.words[u.0 as usize], &table.words[v.0 as usize]);
        Some((a.len() + b.len() - 2 * common_prefix(a, b)) as u32)
    }

    fn cayley(&self) -> Option<&dyn CayleyStructure> {
        Some(self)
    }
}

impl CayleyStructure for FreeGroup {
    fn identity(&self) -> VertexId {
        VertexId(0)
    }

    fn multiply(&self, g: VertexId, h: VertexId) -> VertexId {
        let mut w = self.word(g);
        w.extend(self.word(h));
        self.element(&w)
    }

    fn inverse(&self, g: VertexId) -> VertexId {
        let w: Vec<Letter> = self
            .word(g)
            .iter()
            .rev()
            .map(|&l| inverse_letter(l))
            .collect();
        self.intern(&w)
    }

    fn generator(&self, s: usize) -> VertexId {
        self.intern(&[s as Letter])
    }

    fn generator_count(&self) -> usize {
        self.letter_count()
    }

    fn normal_form(&self, g: VertexId, _order: &GeneratorOrder) -> Vec<usize> {
        // Reduced words are the only geodesic words in a free group.
        self.word(g).iter().map(|&l| l as usize).collect()
    }
}
