use super::{Atom, ConjunctiveQuery, ExplicitMonotoneQuery, Query, Regex, RegularPathQuery, Term, UnionQuery};
use crate::error::{Error, Result};
use crate::lex::{is_identifier, Cursor};
use crate::model::{Constant, Fact, RelationName};
use std::collections::BTreeSet;

/// Parses a query file: CQ rules, an `rpq` line, or a JSON generator list.
pub fn parse_query(text: &str) -> Result<Query> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return parse_explicit(trimmed);
    }
    let stripped: String = text
        .lines()
        .map(|l| match l.find('#') {
            Some(i) => &l[..i],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n");
    let body = stripped.trim_start();
    if body.starts_with("rpq")
        && body[3..].starts_with(char::is_whitespace)
        && !body[3..].trim_start().starts_with(":-")
    {
        return parse_rpq(&stripped).map(Query::Rpq);
    }
    let mut cur = Cursor::new(&stripped);
    let mut rules = Vec::new();
    while !cur.at_end() {
        rules.push(parse_rule(&mut cur)?);
    }
    match rules.len() {
        0 => Err(Error::syntax(1, "no query rule found")),
        1 => Ok(Query::Cq(rules.pop().unwrap())),
        _ => UnionQuery::new(rules).map(Query::Ucq),
    }
}

fn parse_explicit(text: &str) -> Result<Query> {
    let gens: Vec<Vec<String>> =
        serde_json::from_str(text).map_err(|e| Error::syntax(e.line(), e.to_string()))?;
    let mut out = Vec::new();
    for g in gens {
        let set: BTreeSet<Fact> = g.iter().map(|s| Fact::parse(s)).collect::<Result<_>>()?;
        out.push(set);
    }
    let q = ExplicitMonotoneQuery::new(out);
    Query::Explicit(q.clone()).schema()?;
    Ok(Query::Explicit(q))
}

fn parse_term(cur: &mut Cursor) -> std::result::Result<Term, String> {
    if let Some(c) = cur.quoted() {
        if !is_identifier(c) {
            return Err(format!("bad constant {c:?}"));
        }
        return Ok(Term::Const(Constant::new(c).unwrap()));
    }
    cur.ident().map(Term::var).ok_or_else(|| "expected a term".to_string())
}

enum Literal {
    Atom(Atom),
    Neq(Term, Term),
    Eq(Term, Term),
}

fn parse_literal(cur: &mut Cursor) -> std::result::Result<Literal, String> {
    if cur.peek() == Some('\'') || cur.peek() == Some('"') {
        let s = parse_term(cur)?;
        return parse_comparison(cur, s);
    }
    let name = cur.ident().ok_or("expected an atom or comparison")?;
    if cur.eat("(") {
        let mut args = Vec::new();
        loop {
            args.push(parse_term(cur)?);
            if cur.eat(")") {
                break;
            }
            if !cur.eat(",") {
                return Err("expected ',' or ')'".into());
            }
        }
        let relation = RelationName::new(name, args.len()).map_err(|e| e.to_string())?;
        Ok(Literal::Atom(Atom { relation, args }))
    } else {
        parse_comparison(cur, Term::var(name))
    }
}

fn parse_comparison(cur: &mut Cursor, s: Term) -> std::result::Result<Literal, String> {
    if cur.eat("!=") {
        Ok(Literal::Neq(s, parse_term(cur)?))
    } else if cur.eat("=") {
        Ok(Literal::Eq(s, parse_term(cur)?))
    } else {
        Err("expected '(' , '!=' or '='".into())
    }
}

fn parse_rule(cur: &mut Cursor) -> Result<ConjunctiveQuery> {
    let err = |cur: &Cursor, m: String| Error::syntax(cur.line(), m);
    cur.ident().ok_or_else(|| err(cur, "expected rule head".into()))?;
    if cur.eat("(") && !cur.eat(")") {
        return Err(err(cur, "Boolean queries have an empty head".into()));
    }
    if !cur.eat(":-") {
        return Err(err(cur, "expected ':-'".into()));
    }
    let (mut atoms, mut neqs, mut eqs) = (Vec::new(), Vec::new(), Vec::new());
    loop {
        match parse_literal(cur).map_err(|m| err(cur, m))? {
            Literal::Atom(a) => atoms.push(a),
            Literal::Neq(s, t) => neqs.push((s, t)),
            Literal::Eq(s, t) => eqs.push((s, t)),
        }
        if cur.eat(".") {
            break;
        }
        if !cur.eat(",") {
            return Err(err(cur, "expected ',' or '.'".into()));
        }
    }
    let line = cur.line();
    ConjunctiveQuery::with_equalities(atoms, neqs, &eqs).map_err(|e| match e {
        Error::ArityMismatch { .. } | Error::Invalid(_) => Error::syntax(line, e.to_string()),
        other => other,
    })
}

fn parse_rpq(text: &str) -> Result<RegularPathQuery> {
    let mut cur = Cursor::new(text);
    cur.eat("rpq");
    let err = |cur: &Cursor, m: &str| Error::syntax(cur.line(), m);
    let src = cur.ident().ok_or_else(|| err(&cur, "expected source constant"))?;
    let dst = cur.ident().ok_or_else(|| err(&cur, "expected target constant"))?;
    if !cur.eat(":") {
        return Err(err(&cur, "expected ':'"));
    }
    let regex = regex_union(&mut cur).map_err(|m| err(&cur, &m))?;
    if !cur.at_end() {
        return Err(err(&cur, "trailing input after regex"));
    }
    Ok(RegularPathQuery {
        regex,
        source: Constant::new(src)?,
        target: Constant::new(dst)?,
    })
}

pub fn parse_regex(text: &str) -> Result<Regex> {
    let mut cur = Cursor::new(text);
    let r = regex_union(&mut cur).map_err(|m| Error::syntax(1, m))?;
    if !cur.at_end() {
        return Err(Error::syntax(1, "trailing input after regex"));
    }
    Ok(r)
}

fn regex_union(cur: &mut Cursor) -> std::result::Result<Regex, String> {
    let mut r = regex_concat(cur)?;
    while cur.eat("|") {
        r = Regex::union(r, regex_concat(cur)?);
    }
    Ok(r)
}

fn regex_concat(cur: &mut Cursor) -> std::result::Result<Regex, String> {
    let mut r = regex_postfix(cur)?;
    while cur.eat(".") {
        r = Regex::concat(r, regex_postfix(cur)?);
    }
    Ok(r)
}

fn regex_postfix(cur: &mut Cursor) -> std::result::Result<Regex, String> {
    let mut r = if cur.eat("(") {
        let inner = regex_union(cur)?;
        if !cur.eat(")") {
            return Err("expected ')'".into());
        }
        inner
    } else {
        match cur.ident() {
            Some("eps") => Regex::Eps,
            Some(name) => Regex::sym(name),
            None => return Err("expected symbol, 'eps' or '('".into()),
        }
    };
    loop {
        if cur.eat("*") {
            r = Regex::star(r);
        } else if cur.eat("+") {
            r = Regex::plus(r);
        } else if cur.eat("?") {
            r = Regex::optional(r);
        } else {
            return Ok(r);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cq_and_ucq() {
        match parse_query("q :- R(x,y), R(y,z).").unwrap() {
            Query::Cq(q) => assert_eq!(q.len(), 2),
            other => panic!("{other:?}"),
        }
        match parse_query("q :- R(x,y).\nq :- S(x).").unwrap() {
            Query::Ucq(u) => assert_eq!(u.disjuncts().len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparisons_and_constants() {
        let q = parse_query("q() :- R(x,'a'), S(x, y), x != y, y = 'b'.").unwrap();
        let Query::Cq(q) = q else { panic!() };
        assert_eq!(q.variables().len(), 1);
        assert_eq!(q.inequalities().len(), 1);
        assert_eq!(q.constants().len(), 2);
    }

    #[test]
    fn rpq_line() {
        let Query::Rpq(r) = parse_query("rpq a d : R.(S)*").unwrap() else { panic!() };
        assert_eq!(r.regex, Regex::concat(Regex::sym("R"), Regex::star(Regex::sym("S"))));
        assert_eq!(r.source.name(), "a");
        assert_eq!(r.target.name(), "d");
        let Query::Rpq(r) = parse_query("rpq a a : (R|eps).S+ | T?").unwrap() else { panic!() };
        assert_eq!(r.regex.alphabet().len(), 3);
    }

    #[test]
    fn explicit_generators() {
        let Query::Explicit(e) = parse_query(r#"[["F(f1)"], ["F(f1)", "F(f2)"]]"#).unwrap() else {
            panic!()
        };
        assert_eq!(e.generators().len(), 2);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_query("q :- R(x,y), R(x)."), Err(Error::Syntax { .. })));
        assert!(matches!(parse_query("q :- R(x,y)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_query("q :- R(x,y).\nq :- R(x)."), Err(Error::ArityMismatch { .. })));
        assert!(matches!(parse_query("rpq a : R"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_query(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse_query("q :- R(x,y), 'a' = 'b'."), Err(Error::Syntax { .. })));
    }

    #[test]
    fn display_round_trips() {
        for text in ["q :- R(x,'a'), S(x,y), x != y.", "q :- A(x).\nq :- B(x,y)."] {
            let q = parse_query(text).unwrap();
            assert_eq!(parse_query(&q.to_string()).unwrap(), q);
        }
    }
}
