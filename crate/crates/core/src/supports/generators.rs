//! Instance generators: perfect matchings and vertex covers.

use crate::error::{Error, Result};
use crate::model::{Constant, Fact, PartitionedDatabase, RelationName};
use crate::query::{Atom, ConjunctiveQuery, Term};
use std::collections::VecDeque;

/// Undirected simple graph on vertices `0..vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices || u == v {
                return Err(Error::Invalid(format!("bad edge ({u},{v})")));
            }
        }
        Ok(Graph { vertices, edges })
    }

    pub fn complete_bipartite(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (0..n).map(move |j| (i, n + j))).collect();
        Graph { vertices: 2 * n, edges }
    }

    /// Two-colouring; the lowest vertex of each component goes left.
    pub fn bipartition(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut side: Vec<Option<bool>> = vec![None; self.vertices];
        let mut adj = vec![Vec::new(); self.vertices];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for s in 0..self.vertices {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    match side[v] {
                        None => {
                            side[v] = Some(!side[u].unwrap());
                            queue.push_back(v);
                        }
                        Some(x) if x == side[u].unwrap() => return Err(Error::NotBipartite),
                        Some(_) => {}
                    }
                }
            }
        }
        let left = (0..self.vertices).filter(|&v| side[v] == Some(false)).collect();
        let right = (0..self.vertices).filter(|&v| side[v] == Some(true)).collect();
        Ok((left, right))
    }
}

fn constant(name: String) -> Constant {
    Constant::new(&name).expect("generated names are identifiers")
}

fn fact(rel: &RelationName, a: &Constant, b: &Constant) -> Fact {
    Fact {
        relation: rel.clone(),
        args: vec![a.clone(), b.clone()],
    }
}

/// A path `from -l1-> m1 -l2-> ... -ln-> to` through fresh middle terms.
fn path<T: Clone>(labels: &[&RelationName], from: T, to: T, fresh: impl Fn(usize) -> T) -> Vec<(RelationName, T, T)> {
    let mut out = Vec::new();
    let mut cur = from;
    for (k, l) in labels.iter().enumerate() {
        let next = if k + 1 == labels.len() { to.clone() } else { fresh(k + 1) };
        out.push(((*l).clone(), cur, next.clone()));
        cur = next;
    }
    out
}

/// Bipartite graph with sides `0..left` and `0..right`; edges go left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= left || j >= right) {
            return Err(Error::Invalid(format!("bad edge ({i},{j})")));
        }
        Ok(BipartiteGraph { left, right, edges })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        BipartiteGraph { left: n, right: n, edges }
    }

    /// Sides from a two-colouring of an undirected graph.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let (left, right) = g.bipartition()?;
        let lpos = |v: usize| left.iter().position(|&x| x == v);
        let rpos = |v: usize| right.iter().position(|&x| x == v);
        let edges = g
            .edges
            .iter()
            .map(|&(u, v)| match lpos(u) {
                Some(i) => (i, rpos(v).unwrap()),
                None => (lpos(v).unwrap(), rpos(u).unwrap()),
            })
            .collect();
        Ok(BipartiteGraph {
            left: left.len(),
            right: right.len(),
            edges,
        })
    }
}

/// (D_G, q_G) over relations R1..Rn with countMS(q_G, D_G) = #PM(G) + n.
pub fn generate_matching_instance(g: &BipartiteGraph) -> Result<(PartitionedDatabase, ConjunctiveQuery)> {
    if g.left != g.right || g.left == 0 {
        return Err(Error::Invalid("the two sides must be nonempty and of equal size".into()));
    }
    let n = g.left;
    let rels: Vec<RelationName> = (1..=n).map(|i| RelationName::new(&format!("R{i}"), 2).unwrap()).collect();
    let forward: Vec<&RelationName> = rels.iter().collect();
    let backward: Vec<&RelationName> = rels.iter().rev().collect();
    let a: Vec<Constant> = (1..=n).map(|i| constant(format!("a{i}"))).collect();
    let b: Vec<Constant> = (1..=n).map(|j| constant(format!("b{j}"))).collect();

    let mut facts = Vec::new();
    for bj in &b {
        for r in &rels {
            facts.push(fact(r, bj, bj));
        }
    }
    for i in 0..n.saturating_sub(1) {
        for (r, s, t) in path(&backward, a[i].clone(), a[i + 1].clone(), |k| constant(format!("s{}_{k}", i + 1))) {
            facts.push(fact(&r, &s, &t));
        }
    }
    for &(i, j) in &g.edges {
        for (r, s, t) in path(&forward, a[i].clone(), b[j].clone(), |k| constant(format!("e{}_{}_{k}", i + 1, j + 1))) {
            facts.push(fact(&r, &s, &t));
        }
    }

    let x: Vec<Term> = (1..=n).map(|i| Term::var(&format!("x{i}"))).collect();
    let y: Vec<Term> = (1..=n).map(|i| Term::var(&format!("y{i}"))).collect();
    let mut atoms = Vec::new();
    let atom = |r: RelationName, s: Term, t: Term| Atom {
        relation: r,
        args: vec![s, t],
    };
    for i in 0..n.saturating_sub(1) {
        for (r, s, t) in path(&backward, x[i].clone(), x[i + 1].clone(), |k| Term::var(&format!("u{}_{k}", i + 1))) {
            atoms.push(atom(r, s, t));
        }
    }
    for i in 0..n {
        for (r, s, t) in path(&forward, x[i].clone(), y[i].clone(), |k| Term::var(&format!("w{}_{k}", i + 1))) {
            atoms.push(atom(r, s, t));
        }
        // loops on y_i for every relation except R_i
        for (k, r) in rels.iter().enumerate() {
            if k != i {
                atoms.push(atom(r.clone(), y[i].clone(), y[i].clone()));
            }
        }
    }
    let db = PartitionedDatabase::endogenous_only(facts)?;
    Ok((db, ConjunctiveQuery::from_atoms(atoms)?))
}

/// Dn = {R(v)}, Dx = {S(u,v) : uv ∈ E}, q = R(x) ∧ S(x,y) ∧ R(y).
pub fn generate_vertex_cover_instance(g: &Graph) -> Result<(PartitionedDatabase, ConjunctiveQuery)> {
    let v: Vec<String> = (0..g.vertices).map(|i| format!("v{i}")).collect();
    let endo = v.iter().map(|c| Fact::new("R", &[c])).collect::<Result<Vec<_>>>()?;
    let exo = g
        .edges
        .iter()
        .map(|&(a, b)| Fact::new("S", &[&v[a], &v[b]]))
        .collect::<Result<Vec<_>>>()?;
    let q = ConjunctiveQuery::from_atoms(vec![
        Atom::parse_terms("R", &["x"])?,
        Atom::parse_terms("S", &["x", "y"])?,
        Atom::parse_terms("R", &["y"])?,
    ])?;
    Ok((PartitionedDatabase::new(endo, exo)?, q))
}
