use std::fmt::Write as _;

use super::lexer::{Cursor, Tok};
use super::DslError;
use crate::model::{check_deployment, DeploymentMatrix, ValidProblem};

/// Parsed deployment file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeplFile {
    pub app_name: String,
    pub entries: Vec<DeplEntry>,
}

/// One placed copy, with the position of its `on` statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeplEntry {
    pub node: String,
    pub actor: String,
    pub line: usize,
    pub col: usize,
}

impl DeplFile {
    /// `(node, actor)` pairs in file order.
    pub fn assignments(&self) -> Vec<(&str, &str)> {
        self.entries.iter().map(|e| (e.node.as_str(), e.actor.as_str())).collect()
    }

    /// Rebuilds the assignment matrix against `problem`'s node and actor order.
    pub fn to_matrix(&self, problem: &ValidProblem) -> Result<DeploymentMatrix, DslError> {
        if self.app_name != problem.name {
            return Err(DslError::AppNameMismatch { model: problem.name.clone(), dspec: self.app_name.clone() });
        }
        let mut m = DeploymentMatrix::zeros(problem.num_nodes(), problem.num_actors());
        for e in &self.entries {
            let i = problem.node_index(&e.node).ok_or_else(|| DslError::UnknownNode {
                name: e.node.clone(),
                line: e.line,
                col: e.col,
            })?;
            let j = problem.actor_index(&e.actor).ok_or_else(|| DslError::UnknownDeplActor {
                name: e.actor.clone(),
                line: e.line,
                col: e.col,
            })?;
            if m.get(i, j) {
                return Err(DslError::DuplicateAssignment {
                    node: e.node.clone(),
                    actor: e.actor.clone(),
                    line: e.line,
                    col: e.col,
                });
            }
            m.set(i, j, true);
        }
        Ok(m)
    }
}

/// Parses `app <Name> { on (<node>[, ...]) <Actor>; ... }`.
pub fn parse_depl(text: &str) -> Result<DeplFile, DslError> {
    let mut cur = Cursor::new(text)?;
    cur.expect_keyword("app")?;
    let mut out = DeplFile { app_name: cur.expect_ident()?.0, entries: Vec::new() };
    cur.expect_punct('{')?;
    loop {
        if cur.eat_punct('}') {
            break;
        }
        if cur.at_eof() {
            return Err(cur.error("missing `}` closing the app block"));
        }
        let on = cur.expect_keyword("on")?;
        let nodes = cur.ident_list()?;
        if nodes.is_empty() {
            return Err(cur.error("`on` needs at least one node"));
        }
        let (actor, _) = cur.expect_ident()?;
        // tolerate an argument list after the actor name
        if cur.is_punct('(') {
            let mut depth = 0usize;
            loop {
                match cur.next().tok {
                    Tok::Punct('(') => depth += 1,
                    Tok::Punct(')') => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    Tok::Eof => return Err(cur.error("unterminated argument list")),
                    _ => {}
                }
            }
        }
        cur.expect_punct(';')?;
        for node in nodes {
            out.entries.push(DeplEntry { node, actor: actor.clone(), line: on.line, col: on.col });
        }
    }
    cur.eat_punct(';');
    if !cur.at_eof() {
        return Err(cur.error("unexpected content after the app block"));
    }
    Ok(out)
}

/// Serializes a feasible matrix: one `on (<node>) <Actor>;` line per copy,
/// ordered by node index then actor index.
pub fn emit_depl(problem: &ValidProblem, m: &DeploymentMatrix) -> Result<String, DslError> {
    let report = check_deployment(problem, m)?;
    if !report.is_empty() {
        return Err(DslError::InfeasibleMatrix(report.len()));
    }
    let mut out = format!("app {} {{\n", problem.name);
    for (i, node) in problem.nodes.iter().enumerate() {
        for (j, actor) in problem.actors.iter().enumerate() {
            if m.get(i, j) {
                let _ = writeln!(out, "    on ({}) {};", node.id, actor.id);
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{ft_test_problem, nine_node_table};
    use crate::model::{validate_problem, ActorSpec, DeploymentProblem, NodeSpec};

    #[test]
    fn nine_node_table_emits_thirteen_lines() {
        let p = validate_problem(ft_test_problem(9)).unwrap();
        let m = nine_node_table();
        let text = emit_depl(&p, &m).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "app REMApp {");
        assert_eq!(lines.last(), Some(&"}"));
        let on: Vec<&str> = lines.iter().filter(|l| l.trim_start().starts_with("on ")).map(|l| l.trim()).collect();
        assert_eq!(on.len(), 13);
        assert_eq!(on[0], "on (h1) BuildingActor;");
        let parsed = parse_depl(&text).unwrap();
        assert_eq!(parsed.to_matrix(&p).unwrap(), m);
    }

    #[test]
    fn refuses_infeasible_matrix() {
        let p = validate_problem(ft_test_problem(9)).unwrap();
        let m = DeploymentMatrix::zeros(9, 6);
        assert!(matches!(emit_depl(&p, &m), Err(DslError::InfeasibleMatrix(6))));
    }

    #[test]
    fn single_assignment() {
        let p = validate_problem(DeploymentProblem {
            name: "X".into(),
            actors: vec![ActorSpec::new("A", 1)],
            nodes: vec![NodeSpec::unconstrained("n1")],
            rules: Default::default(),
        })
        .unwrap();
        let m = DeploymentMatrix::from_rows(&[vec![1]]).unwrap();
        assert_eq!(emit_depl(&p, &m).unwrap(), "app X {\n    on (n1) A;\n}\n");
    }

    #[test]
    fn unknown_node_and_duplicates() {
        let p = validate_problem(ft_test_problem(9)).unwrap();
        let d = parse_depl("app REMApp {\n  on (h1) UtilityGrid;\n  on (h42) BESSActor;\n}").unwrap();
        assert_eq!(d.to_matrix(&p), Err(DslError::UnknownNode { name: "h42".into(), line: 3, col: 3 }));
        let d = parse_depl("app REMApp { on (h1, h1) UtilityGrid; }").unwrap();
        assert!(matches!(d.to_matrix(&p), Err(DslError::DuplicateAssignment { .. })));
        let d = parse_depl("app REMApp { on (h1) Nope(1, 2); }").unwrap();
        assert!(matches!(d.to_matrix(&p), Err(DslError::UnknownDeplActor { .. })));
    }
}
