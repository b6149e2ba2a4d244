//! Relations, constants, facts and partitioned databases.

use crate::error::{Error, Result};
use crate::lex::{is_identifier, Cursor};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constant(Arc<str>);

impl Constant {
    pub fn new(name: &str) -> Result<Self> {
        if !is_identifier(name) {
            return Err(Error::Invalid(format!("bad constant name {name:?}")));
        }
        Ok(Constant(name.into()))
    }

    /// Names outside the identifier syntax, used for frozen query variables.
    pub(crate) fn raw(name: &str) -> Self {
        Constant(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RelationName {
    name: Arc<str>,
    arity: usize,
}

impl RelationName {
    pub fn new(name: &str, arity: usize) -> Result<Self> {
        if !is_identifier(name) {
            return Err(Error::Invalid(format!("bad relation name {name:?}")));
        }
        if arity == 0 {
            return Err(Error::Invalid(format!("relation {name} has arity 0")));
        }
        Ok(RelationName {
            name: name.into(),
            arity,
        })
    }

    /// Unchecked name; used for internal relations that must not clash with user ones.
    pub(crate) fn raw(name: &str, arity: usize) -> Self {
        RelationName {
            name: name.into(),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for RelationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub relation: RelationName,
    pub args: Vec<Constant>,
}

impl Fact {
    pub fn new(relation: &str, args: &[&str]) -> Result<Self> {
        let relation = RelationName::new(relation, args.len())?;
        let args = args.iter().map(|a| Constant::new(a)).collect::<Result<_>>()?;
        Ok(Fact { relation, args })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cur = Cursor::new(text);
        let fact = parse_fact(&mut cur).map_err(|msg| Error::syntax(1, msg))?;
        if !cur.at_end() {
            return Err(Error::syntax(1, format!("trailing input {:?}", cur.rest())));
        }
        Ok(fact)
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn parse_fact(cur: &mut Cursor) -> std::result::Result<Fact, String> {
    let name = cur.ident().ok_or("expected relation name")?;
    if !cur.eat("(") {
        return Err(format!("expected '(' after {name}"));
    }
    let mut args = Vec::new();
    loop {
        let c = cur.ident().ok_or("expected constant")?;
        args.push(Constant(c.into()));
        if cur.eat(")") {
            break;
        }
        if !cur.eat(",") {
            return Err("expected ',' or ')'".into());
        }
    }
    let relation = RelationName {
        name: name.into(),
        arity: args.len(),
    };
    Ok(Fact { relation, args })
}

/// Relation name to arity, enforcing one arity per name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schema {
    arities: BTreeMap<String, usize>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, rel: &RelationName) -> Result<()> {
        match self.arities.get(rel.name()) {
            Some(&a) if a != rel.arity() => Err(Error::ArityMismatch {
                name: rel.name().to_string(),
                expected: a,
                found: rel.arity(),
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(rel.name().to_string(), rel.arity());
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arities.iter().map(|(n, a)| (n.as_str(), *a))
    }

    /// Lines of the form `R/2`; `#` comments allowed.
    pub fn parse(text: &str) -> Result<Self> {
        let mut schema = Schema::new();
        for (i, line) in text.lines().enumerate() {
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            let (name, arity) = line
                .split_once('/')
                .ok_or_else(|| Error::syntax(i + 1, "expected NAME/ARITY"))?;
            let arity: usize = arity
                .trim()
                .parse()
                .map_err(|_| Error::syntax(i + 1, "bad arity"))?;
            let rel = RelationName::new(name.trim(), arity).map_err(|e| Error::syntax(i + 1, e.to_string()))?;
            schema.observe(&rel).map_err(|e| Error::syntax(i + 1, e.to_string()))?;
        }
        Ok(schema)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartitionedDatabase {
    endogenous: BTreeSet<Fact>,
    exogenous: BTreeSet<Fact>,
}

impl PartitionedDatabase {
    pub fn new(
        endogenous: impl IntoIterator<Item = Fact>,
        exogenous: impl IntoIterator<Item = Fact>,
    ) -> Result<Self> {
        let endogenous: BTreeSet<Fact> = endogenous.into_iter().collect();
        let exogenous: BTreeSet<Fact> = exogenous.into_iter().collect();
        if let Some(f) = endogenous.intersection(&exogenous).next() {
            return Err(Error::DuplicateFact(f.to_string()));
        }
        let mut schema = Schema::new();
        for f in endogenous.iter().chain(&exogenous) {
            schema.observe(&f.relation)?;
        }
        Ok(PartitionedDatabase { endogenous, exogenous })
    }

    pub fn endogenous_only(facts: impl IntoIterator<Item = Fact>) -> Result<Self> {
        Self::new(facts, [])
    }

    pub fn endogenous(&self) -> &BTreeSet<Fact> {
        &self.endogenous
    }

    pub fn exogenous(&self) -> &BTreeSet<Fact> {
        &self.exogenous
    }

    pub fn is_endogenous(&self, f: &Fact) -> bool {
        self.endogenous.contains(f)
    }

    pub fn contains(&self, f: &Fact) -> bool {
        self.endogenous.contains(f) || self.exogenous.contains(f)
    }

    /// D = Dn ⊎ Dx in lexicographic order.
    pub fn all_facts(&self) -> Vec<Fact> {
        let mut v: Vec<Fact> = self.endogenous.iter().chain(&self.exogenous).cloned().collect();
        v.sort();
        v
    }

    pub fn size(&self) -> (usize, usize, usize) {
        let n = self.endogenous.len();
        let x = self.exogenous.len();
        (n, x, n + x)
    }

    pub fn schema(&self) -> Schema {
        let mut s = Schema::new();
        for f in self.endogenous.iter().chain(&self.exogenous) {
            s.observe(&f.relation).expect("checked at construction");
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in self.all_facts() {
            if self.exogenous.contains(&f) {
                out.push('*');
            }
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn database_size(db: &PartitionedDatabase) -> (usize, usize, usize) {
    db.size()
}

pub fn parse_database(text: &str) -> Result<PartitionedDatabase> {
    let mut endo = BTreeSet::new();
    let mut exo = BTreeSet::new();
    let mut schema = Schema::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(line).trim();
        if line.is_empty() {
            continue;
        }
        let (exogenous, body) = match line.strip_prefix('*') {
            Some(rest) => (true, rest),
            None => (false, line),
        };
        let mut cur = Cursor::new(body);
        let fact = parse_fact(&mut cur).map_err(|m| Error::syntax(lineno, m))?;
        if !cur.at_end() {
            return Err(Error::syntax(lineno, format!("trailing input {:?}", cur.rest())));
        }
        schema.observe(&fact.relation).map_err(|e| Error::syntax(lineno, e.to_string()))?;
        let (mine, other) = if exogenous {
            (&mut exo, &endo)
        } else {
            (&mut endo, &exo)
        };
        if other.contains(&fact) {
            return Err(Error::DuplicateFact(fact.to_string()));
        }
        mine.insert(fact);
    }
    Ok(PartitionedDatabase {
        endogenous: endo,
        exogenous: exo,
    })
}
