use std::fmt;

use super::lexer::{Cursor, Tok};
use super::DslError;
use crate::model::LimitTargets;

/// Parsed deployment specification. Names are not resolved here.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DspecFile {
    pub app_name: String,
    /// `<Actor> copies <n>;` in source order.
    pub copies_overrides: Vec<(String, u32)>,
    pub colocate_sets: Vec<Vec<String>>,
    pub separate_sets: Vec<Vec<String>>,
    pub deploys: Vec<DeployStmt>,
    /// `use limits for <key> on ...;` statements. The common case has at
    /// most one; repeating it per key describes heterogeneous hardware.
    pub limits: Vec<LimitsDirective>,
}

/// `deploy (<actors>) on (<nodes>);`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeployStmt {
    pub actors: Vec<String>,
    pub nodes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitsDirective {
    pub hardware_key: String,
    pub targets: LimitTargets,
}

impl DspecFile {
    pub fn copies_of(&self, actor: &str) -> Option<u32> {
        self.copies_overrides.iter().find(|(a, _)| a == actor).map(|(_, c)| *c)
    }

    /// Nodes an actor is pinned to by a deploy statement.
    pub fn pins_of(&self, actor: &str) -> Option<&[String]> {
        self.deploys.iter().find(|d| d.actors.iter().any(|a| a == actor)).map(|d| d.nodes.as_slice())
    }
}

/// Parses `app <Name> { <stmt>* }`.
pub fn parse_dspec(text: &str) -> Result<DspecFile, DslError> {
    let mut cur = Cursor::new(text)?;
    cur.expect_keyword("app")?;
    let mut spec = DspecFile { app_name: cur.expect_ident()?.0, ..Default::default() };
    cur.expect_punct('{')?;
    loop {
        if cur.eat_punct('}') {
            break;
        }
        if cur.at_eof() {
            return Err(cur.error("missing `}` closing the app block"));
        }
        statement(&mut cur, &mut spec)?;
    }
    cur.eat_punct(';');
    if !cur.at_eof() {
        return Err(cur.error("unexpected content after the app block"));
    }
    Ok(spec)
}

fn group(cur: &mut Cursor, directive: &str) -> Result<Vec<String>, DslError> {
    let start = cur.next();
    let members = cur.ident_list()?;
    if members.len() < 2 {
        return Err(DslError::EmptyGroup { directive: directive.into(), line: start.line, col: start.col });
    }
    cur.expect_punct(';')?;
    Ok(members)
}

fn statement(cur: &mut Cursor, spec: &mut DspecFile) -> Result<(), DslError> {
    let head = cur.peek().clone();
    let word = match &head.tok {
        Tok::Ident(w) => w.clone(),
        _ => return Err(cur.error("expected a directive")),
    };
    match word.as_str() {
        "colocate" if *cur.peek_at(1) == Tok::Punct('(') => {
            let g = group(cur, "colocate")?;
            spec.colocate_sets.push(g);
        }
        "separate" if *cur.peek_at(1) == Tok::Punct('(') => {
            let g = group(cur, "separate")?;
            spec.separate_sets.push(g);
        }
        "deploy" if *cur.peek_at(1) == Tok::Punct('(') => {
            cur.next();
            let actors = cur.ident_list()?;
            if actors.is_empty() {
                return Err(DslError::EmptyGroup { directive: "deploy".into(), line: head.line, col: head.col });
            }
            cur.expect_keyword("on")?;
            let nodes = cur.ident_list()?;
            if nodes.is_empty() {
                return Err(cur.error("deploy needs at least one node"));
            }
            cur.expect_punct(';')?;
            for a in &actors {
                if spec.pins_of(a).is_some() || actors.iter().filter(|x| *x == a).count() > 1 {
                    return Err(DslError::DuplicateDeploy { actor: a.clone(), line: head.line, col: head.col });
                }
            }
            spec.deploys.push(DeployStmt { actors, nodes });
        }
        "use" => {
            cur.next();
            cur.expect_keyword("limits")?;
            cur.expect_keyword("for")?;
            let (hardware_key, _) = cur.expect_ident()?;
            cur.expect_keyword("on")?;
            let targets = if cur.is_keyword("all") {
                cur.next();
                LimitTargets::All
            } else if cur.is_punct('(')
                && matches!(cur.peek_at(1), Tok::Ident(s) if s == "all")
                && *cur.peek_at(2) == Tok::Punct(')')
            {
                cur.next();
                cur.next();
                cur.next();
                LimitTargets::All
            } else {
                let nodes = cur.ident_list()?;
                if nodes.is_empty() {
                    return Err(cur.error("limits need `all` or at least one node"));
                }
                LimitTargets::Nodes(nodes)
            };
            cur.expect_punct(';')?;
            spec.limits.push(LimitsDirective { hardware_key, targets });
        }
        _ => {
            // <Actor> copies <n>;
            cur.next();
            cur.expect_keyword("copies").map_err(|_| DslError::Syntax {
                line: head.line,
                col: head.col,
                msg: format!("unknown directive starting with `{word}`"),
            })?;
            let (n, tok) = cur.expect_number()?;
            if n < 1.0 || n.fract() != 0.0 || n > f64::from(u32::MAX) {
                return Err(DslError::Syntax {
                    line: tok.line,
                    col: tok.col,
                    msg: format!("copies must be a positive integer, got {n}"),
                });
            }
            cur.expect_punct(';')?;
            if spec.copies_of(&word).is_some() {
                return Err(DslError::DuplicateCopiesOverride { actor: word, line: head.line, col: head.col });
            }
            spec.copies_overrides.push((word, n as u32));
        }
    }
    Ok(())
}

impl fmt::Display for DspecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "app {} {{", self.app_name)?;
        for (a, n) in &self.copies_overrides {
            writeln!(f, "    {a} copies {n};")?;
        }
        for s in &self.colocate_sets {
            writeln!(f, "    colocate ({});", s.join(", "))?;
        }
        for s in &self.separate_sets {
            writeln!(f, "    separate ({});", s.join(", "))?;
        }
        for d in &self.deploys {
            writeln!(f, "    deploy ({}) on ({});", d.actors.join(", "), d.nodes.join(", "))?;
        }
        for l in &self.limits {
            match &l.targets {
                LimitTargets::All => writeln!(f, "    use limits for {} on all;", l.hardware_key)?,
                LimitTargets::Nodes(ns) => {
                    writeln!(f, "    use limits for {} on ({});", l.hardware_key, ns.join(", "))?
                }
            }
        }
        writeln!(f, "}}")
    }
}
