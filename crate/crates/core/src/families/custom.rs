use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::graph::{AdjacencyOracle, CayleyStructure, GeneratorOrder, VertexId};
use crate::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn check_connected(adjacency: &[Vec<VertexId>]) -> Result<()> {
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for w in &adjacency[v] {
            let w = w.0 as usize;
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    if seen.iter().all(|&s| s) {
        Ok(())
    } else {
        Err(Error::Parse("graph is not connected".into()))
    }
}

/// Finite graph given as an edge list over string names. Handles are
/// positions in the sorted name list.
pub struct EdgeListGraph {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    adjacency: Vec<Vec<VertexId>>,
    base: VertexId,
}

impl EdgeListGraph {
    /// Lines are `u v` edges and one `base NAME` line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut base = None;
        let mut edges = Vec::new();
        let mut names = BTreeSet::new();
        for (line_no, line) in content_lines(text) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["base", name] => {
                    if base.replace(name.to_string()).is_some() {
                        return Err(Error::Parse(format!("line {line_no}: second base line")));
                    }
                    names.insert(name.to_string());
                }
                [u, v] => {
                    if u == v {
                        return Err(Error::NotSimple(u.to_string()));
                    }
                    names.insert(u.to_string());
                    names.insert(v.to_string());
                    edges.push((u.to_string(), v.to_string()));
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "line {line_no}: expected `u v` or `base NAME`"
                    )))
                }
            }
        }
        let base = base.ok_or_else(|| Error::Parse("missing `base` line".into()))?;
        let names: Vec<String> = names.into_iter().collect();
        let index: HashMap<String, VertexId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), VertexId(i as u64)))
            .collect();
        let mut adjacency = vec![Vec::new(); names.len()];
        for (u, v) in &edges {
            let (iu, iv) = (index[u], index[v]);
            if adjacency[iu.0 as usize].contains(&iv) {
                return Err(Error::NotSimple(format!("{u} {v}")));
            }
            adjacency[iu.0 as usize].push(iv);
            adjacency[iv.0 as usize].push(iu);
        }
        for list in &mut adjacency {
            list.sort();
        }
        check_connected(&adjacency)?;
        Ok(Self {
            base: index[&base],
            names,
            index,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }
}

impl AdjacencyOracle for EdgeListGraph {
    fn base_point(&self) -> VertexId {
        self.base
    }

    fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.adjacency[v.0 as usize].clone()
    }

    fn degree_bound(&self) -> usize {
        self.adjacency
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .max(1)
    }

    fn vertex_label(&self, v: VertexId) -> String {
        self.names[v.0 as usize].clone()
    }

    fn parse_vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }
}

/// Finite group given by its multiplication table, with the Cayley graph of
/// a symmetric generating set.
pub struct TableGroup {
    names: Vec<String>,
    index: HashMap<String, usize>,
    table: Vec<Vec<usize>>,
    identity: usize,
    generators: Vec<usize>,
    labels: Vec<String>,
    inverses: Vec<usize>,
    /// Shortlex normal forms for the natural generator order.
    forms: Vec<Vec<usize>>,
}

impl TableGroup {
    /// Format: `elements g1 g2 ...`, `generators s1 s2 ...`, then one
    /// `row g : g*g1 g*g2 ...` line per element.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut generator_names: Vec<String> = Vec::new();
        let mut rows: HashMap<String, Vec<String>> = HashMap::new();
        for (line_no, line) in content_lines(text) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.first() {
                Some(&"elements") => names = fields[1..].iter().map(|s| s.to_string()).collect(),
                Some(&"generators") => {
                    generator_names = fields[1..].iter().map(|s| s.to_string()).collect()
                }
                Some(&"row") if fields.len() >= 3 && fields[2] == ":" => {
                    rows.insert(
                        fields[1].to_string(),
                        fields[3..].iter().map(|s| s.to_string()).collect(),
                    );
                }
                _ => return Err(Error::Parse(format!("line {line_no}: unrecognised line"))),
            }
        }
        if names.is_empty() {
            return Err(Error::Parse("missing `elements` line".into()));
        }
        let index: HashMap<String, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        if index.len() != names.len() {
            return Err(Error::Parse("repeated element name".into()));
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Parse(format!("unknown element `{name}`")))
        };
        let mut table = Vec::with_capacity(names.len());
        for name in &names {
            let row = rows
                .get(name)
                .ok_or_else(|| Error::Parse(format!("missing row for `{name}`")))?;
            if row.len() != names.len() {
                return Err(Error::Parse(format!("row `{name}` has wrong length")));
            }
            table.push(row.iter().map(|s| lookup(s)).collect::<Result<Vec<_>>>()?);
        }
        let n = names.len();
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::Parse("table has no identity".into()))?;
        let inverses = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table[g][h] == identity)
                    .ok_or_else(|| Error::Parse(format!("`{}` has no inverse", names[g])))
            })
            .collect::<Result<Vec<_>>>()?;
        let generators = generator_names
            .iter()
            .map(|s| lookup(s))
            .collect::<Result<Vec<_>>>()?;
        for &s in &generators {
            if s == identity {
                return Err(Error::NotSimple("identity used as a generator".into()));
            }
            if !generators.contains(&inverses[s]) {
                return Err(Error::Parse(format!(
                    "generating set is not symmetric: inverse of `{}` missing",
                    names[s]
                )));
            }
        }
        let mut group = Self {
            labels: generator_names,
            names,
            index,
            table,
            identity,
            generators,
            inverses,
            forms: Vec::new(),
        };
        group.forms = group.shortlex_forms(&GeneratorOrder::natural(group.generators.len()));
        if group
            .forms
            .iter()
            .enumerate()
            .any(|(g, f)| f.is_empty() && g != identity)
        {
            return Err(Error::Parse("generators do not generate the group".into()));
        }
        Ok(group)
    }

    fn shortlex_forms(&self, order: &GeneratorOrder) -> Vec<Vec<usize>> {
        let mut forms: Vec<Option<Vec<usize>>> = vec![None; self.names.len()];
        forms[self.identity] = Some(Vec::new());
        let mut queue = VecDeque::from([self.identity]);
        let ranked = order.sorted();
        while let Some(g) = queue.pop_front() {
            for &s in &ranked {
                let h = self.table[g][self.generators[s]];
                if forms[h].is_none() {
                    let mut w = forms[g].clone().expect("visited");
                    w.push(s);
                    forms[h] = Some(w);
                    queue.push_back(h);
                }
            }
        }
        forms.into_iter().map(Option::unwrap_or_default).collect()
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }
}

impl AdjacencyOracle for TableGroup {
    fn base_point(&self) -> VertexId {
        VertexId(self.identity as u64)
    }

    fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .generators
            .iter()
            .map(|&s| VertexId(self.table[v.0 as usize][s] as u64))
            .collect();
        out.dedup();
        out
    }

    fn degree_bound(&self) -> usize {
        self.generators.len()
    }

    fn vertex_label(&self, v: VertexId) -> String {
        self.names[v.0 as usize].clone()
    }

    fn parse_vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).map(|&i| VertexId(i as u64))
    }

    fn canonical_cmp(&self, a: VertexId, b: VertexId) -> Ordering {
        let (x, y) = (&self.forms[a.0 as usize], &self.forms[b.0 as usize]);
        x.len().cmp(&y.len()).then_with(|| x.cmp(y))
    }

    fn generator_labels(&self) -> Option<&[String]> {
        Some(&self.labels)
    }

    fn edge_label(&self, u: VertexId, v: VertexId) -> Option<usize> {
        self.generators
            .iter()
            .position(|&s| self.table[u.0 as usize][s] == v.0 as usize)
    }

    fn exact_distance(&self, u: VertexId, v: VertexId) -> Option<u32> {
        let q = self.table[self.inverses[u.0 as usize]][v.0 as usize];
        Some(self.forms[q].len() as u32)
    }

    fn cayley(&self) -> Option<&dyn CayleyStructure> {
        Some(self)
    }
}

impl CayleyStructure for TableGroup {
    fn identity(&self) -> VertexId {
        VertexId(self.identity as u64)
    }

    fn multiply(&self, g: VertexId, h: VertexId) -> VertexId {
        VertexId(self.table[g.0 as usize][h.0 as usize] as u64)
    }

    fn inverse(&self, g: VertexId) -> VertexId {
        VertexId(self.inverses[g.0 as usize] as u64)
    }

    fn generator(&self, s: usize) -> VertexId {
        VertexId(self.generators[s] as u64)
    }

    fn generator_count(&self) -> usize {
        self.generators.len()
    }

    fn normal_form(&self, g: VertexId, order: &GeneratorOrder) -> Vec<usize> {
        if *order == GeneratorOrder::natural(self.generators.len()) {
            return self.forms[g.0 as usize].clone();
        }
        self.shortlex_forms(order).swap_remove(g.0 as usize)
    }
}
