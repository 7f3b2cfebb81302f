use std::fmt;

use super::lexer::{Cursor, Tok};
use super::{fmt_num, DslError};
use crate::model::ResourceEnvelope;

/// Actor-level view of an application model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AppModel {
    /// Name from the enclosing `app <Name> { ... }`, if the file has one.
    pub app_name: Option<String>,
    pub actors: Vec<AppActor>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AppActor {
    pub name: String,
    pub params: Vec<String>,
    pub uses: ResourceEnvelope,
}

impl AppModel {
    pub fn actor(&self, name: &str) -> Option<&AppActor> {
        self.actors.iter().find(|a| a.name == name)
    }
}

/// Parses the actor subset of an application model.
///
/// Accepts either a full `app Name { ... }` file or bare top-level items.
/// Non-actor items and non-`uses` actor content are skipped by balanced
/// brace matching.
pub fn parse_app_model(text: &str) -> Result<AppModel, DslError> {
    let mut cur = Cursor::new(text)?;
    let mut model = AppModel::default();
    let wrapped =
        cur.is_keyword("app") && matches!(cur.peek_at(1), Tok::Ident(_)) && *cur.peek_at(2) == Tok::Punct('{');
    if wrapped {
        cur.next();
        model.app_name = Some(cur.expect_ident()?.0);
        cur.expect_punct('{')?;
    }
    loop {
        if cur.at_eof() {
            if wrapped {
                return Err(cur.error("missing `}` closing the app block"));
            }
            break;
        }
        if cur.is_punct('}') {
            if !wrapped {
                return Err(cur.error("unexpected `}`"));
            }
            cur.next();
            cur.eat_punct(';');
            if !cur.at_eof() {
                return Err(cur.error("unexpected content after the app block"));
            }
            break;
        }
        if cur.is_keyword("actor") {
            let start = cur.peek().clone();
            let actor = parse_actor(&mut cur)?;
            if model.actor(&actor.name).is_some() {
                return Err(DslError::DuplicateActor { name: actor.name, line: start.line, col: start.col });
            }
            model.actors.push(actor);
        } else {
            cur.skip_item()?;
        }
    }
    Ok(model)
}

fn parse_actor(cur: &mut Cursor) -> Result<AppActor, DslError> {
    cur.expect_keyword("actor")?;
    let (name, _) = cur.expect_ident()?;
    let mut actor = AppActor { name, ..Default::default() };
    if cur.is_punct('(') {
        actor.params = parse_params(cur)?;
    }
    cur.expect_punct('{')?;
    let mut seen_uses = false;
    loop {
        if cur.at_eof() {
            return Err(cur.error(format!("missing `}}` closing actor `{}`", actor.name)));
        }
        if cur.eat_punct('}') {
            break;
        }
        if cur.is_keyword("uses") && *cur.peek_at(1) == Tok::Punct('{') {
            if seen_uses {
                let t = cur.peek();
                return Err(DslError::MalformedUsesEntry {
                    line: t.line,
                    col: t.col,
                    msg: "second `uses` block".into(),
                });
            }
            seen_uses = true;
            actor.uses = parse_uses(cur)?;
        } else {
            cur.skip_item()?;
        }
    }
    Ok(actor)
}

/// `(a, b = <default>, c)` - keeps the parameter names only.
fn parse_params(cur: &mut Cursor) -> Result<Vec<String>, DslError> {
    cur.expect_punct('(')?;
    let mut names = Vec::new();
    if cur.eat_punct(')') {
        return Ok(names);
    }
    loop {
        names.push(cur.expect_ident()?.0);
        if cur.eat_punct('=') {
            let mut depth = 0usize;
            loop {
                match cur.peek().tok {
                    Tok::Eof => return Err(cur.error("unterminated parameter list")),
                    Tok::Punct('(') => depth += 1,
                    Tok::Punct(')') if depth > 0 => depth -= 1,
                    Tok::Punct(')') | Tok::Punct(',') if depth == 0 => break,
                    _ => {}
                }
                cur.next();
            }
        }
        if cur.eat_punct(')') {
            return Ok(names);
        }
        cur.expect_punct(',')?;
    }
}

fn malformed(cur: &Cursor, msg: impl Into<String>) -> DslError {
    let t = cur.peek();
    DslError::MalformedUsesEntry { line: t.line, col: t.col, msg: msg.into() }
}

fn expect_unit(cur: &mut Cursor, unit: &str) -> Result<(), DslError> {
    match &cur.peek().tok {
        Tok::Ident(s) if s.eq_ignore_ascii_case(unit) => {
            cur.next();
            Ok(())
        }
        _ => Err(malformed(cur, format!("expected unit `{unit}`"))),
    }
}

fn uses_number(cur: &mut Cursor) -> Result<f64, DslError> {
    match cur.peek().tok {
        Tok::Number(v) if v.is_finite() => {
            cur.next();
            Ok(v)
        }
        _ => Err(malformed(cur, "expected a non-negative number")),
    }
}

/// `uses { cpu [max] P [%]; mem M mb; space S mb; net rate R kbps [ceil C kbps]; }`
/// Semicolons between entries are optional.
fn parse_uses(cur: &mut Cursor) -> Result<ResourceEnvelope, DslError> {
    cur.expect_keyword("uses")?;
    cur.expect_punct('{')?;
    let mut env = ResourceEnvelope::default();
    let mut seen: Vec<String> = Vec::new();
    loop {
        if cur.eat_punct(';') {
            continue;
        }
        if cur.eat_punct('}') {
            return Ok(env);
        }
        let key = match &cur.peek().tok {
            Tok::Ident(s) => s.clone(),
            Tok::Eof => return Err(cur.error("missing `}` closing the uses block")),
            _ => return Err(malformed(cur, "expected a resource keyword")),
        };
        if seen.contains(&key) {
            return Err(malformed(cur, format!("`{key}` given twice")));
        }
        match key.as_str() {
            "cpu" => {
                cur.next();
                if cur.is_keyword("max") {
                    cur.next();
                }
                env.cpu_pct = uses_number(cur)?;
                cur.eat_punct('%');
            }
            "mem" => {
                cur.next();
                env.mem_mb = uses_number(cur)?;
                expect_unit(cur, "mb")?;
            }
            "space" => {
                cur.next();
                env.spc_mb = uses_number(cur)?;
                expect_unit(cur, "mb")?;
            }
            "net" => {
                cur.next();
                if !cur.is_keyword("rate") {
                    return Err(malformed(cur, "expected `rate` after `net`"));
                }
                cur.next();
                env.net_rate_kbps = uses_number(cur)?;
                expect_unit(cur, "kbps")?;
                env.net_ceil_kbps = env.net_rate_kbps;
                if cur.is_keyword("ceil") {
                    cur.next();
                    env.net_ceil_kbps = uses_number(cur)?;
                    expect_unit(cur, "kbps")?;
                }
            }
            other => return Err(malformed(cur, format!("unknown resource `{other}`"))),
        }
        seen.push(key);
    }
}

impl fmt::Display for AppModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let indent = if self.app_name.is_some() { "    " } else { "" };
        if let Some(name) = &self.app_name {
            writeln!(f, "app {name} {{")?;
        }
        for a in &self.actors {
            let u = &a.uses;
            writeln!(f, "{indent}actor {}({}) {{", a.name, a.params.join(", "))?;
            writeln!(f, "{indent}    uses {{")?;
            writeln!(f, "{indent}        cpu max {};", fmt_num(u.cpu_pct))?;
            writeln!(f, "{indent}        mem {} mb;", fmt_num(u.mem_mb))?;
            writeln!(f, "{indent}        space {} mb;", fmt_num(u.spc_mb))?;
            writeln!(
                f,
                "{indent}        net rate {} kbps ceil {} kbps;",
                fmt_num(u.net_rate_kbps),
                fmt_num(u.net_ceil_kbps)
            )?;
            writeln!(f, "{indent}    }}")?;
            writeln!(f, "{indent}}}")?;
        }
        if self.app_name.is_some() {
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}
