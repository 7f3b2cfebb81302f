use std::fmt;

use super::FtError;

/// Which member a fault hits.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Member(String),
    /// Whoever leads when the fault fires (`@leader`).
    Leader,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Member(id) => f.write_str(id),
            Target::Leader => f.write_str("@leader"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FaultAction {
    DropNode(Target),
    RestoreNode(Target),
    /// Member reports its value shifted by the offset.
    StartFdia(Target, f64),
    StopFdia(Target),
}

impl FaultAction {
    pub fn target(&self) -> &Target {
        match self {
            FaultAction::DropNode(t)
            | FaultAction::RestoreNode(t)
            | FaultAction::StartFdia(t, _)
            | FaultAction::StopFdia(t) => t,
        }
    }
}

impl fmt::Display for FaultAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultAction::DropNode(t) => write!(f, "DROP {t}"),
            FaultAction::RestoreNode(t) => write!(f, "RESTORE {t}"),
            FaultAction::StartFdia(t, off) => write!(f, "FDIA {t} {off:+}"),
            FaultAction::StopFdia(t) => write!(f, "STOPFDIA {t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FaultScript {
    /// Sorted by time.
    pub events: Vec<(u64, FaultAction)>,
    /// Time given by an `END` record, if any.
    pub end_ms: Option<u64>,
}

impl FaultScript {
    pub fn new(events: Vec<(u64, FaultAction)>) -> Self {
        FaultScript { events, end_ms: None }
    }

    /// Parses `time_ms ACTION args` records, one per line; `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self, FtError> {
        let mut script = FaultScript::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("");
            let words: Vec<(usize, &str)> = words(body);
            if words.is_empty() {
                continue;
            }
            let err = |col: usize, message: String| FtError::Parse { line, col, message };
            if script.end_ms.is_some() {
                return Err(err(words[0].0, "record after END".into()));
            }
            let (tcol, tword) = words[0];
            let time: u64 = tword.parse().map_err(|_| err(tcol, format!("`{tword}` is not a time in ms")))?;
            if let Some((last, _)) = script.events.last() {
                if time < *last {
                    return Err(err(tcol, format!("time {time} is before the previous record at {last}")));
                }
            }
            let Some(&(acol, action)) = words.get(1) else {
                return Err(err(tcol + tword.len(), "missing action".into()));
            };
            let want = match action {
                "END" => 0,
                "DROP" | "RESTORE" | "STOPFDIA" => 1,
                "FDIA" => 2,
                other => return Err(err(acol, format!("unknown action `{other}`"))),
            };
            if words.len() != 2 + want {
                return Err(err(acol, format!("{action} takes {want} argument(s)")));
            }
            if action == "END" {
                script.end_ms = Some(time);
                continue;
            }
            let target = match words[2].1 {
                "@leader" => Target::Leader,
                id => Target::Member(id.to_string()),
            };
            let fault = match action {
                "DROP" => FaultAction::DropNode(target),
                "RESTORE" => FaultAction::RestoreNode(target),
                "STOPFDIA" => FaultAction::StopFdia(target),
                _ => {
                    let (ocol, oword) = words[3];
                    let offset: f64 = oword
                        .parse()
                        .ok()
                        .filter(|v: &f64| v.is_finite())
                        .ok_or_else(|| err(ocol, format!("`{oword}` is not an offset")))?;
                    FaultAction::StartFdia(target, offset)
                }
            };
            script.events.push((time, fault));
        }
        Ok(script)
    }

    /// Rejects unknown member ids and records past `duration_ms`.
    pub fn check(&self, members: &[String], duration_ms: u64) -> Result<(), FtError> {
        let mut last = 0;
        for (t, action) in &self.events {
            if *t < last {
                return Err(FtError::BadScript(format!("record at {t} ms is out of order")));
            }
            last = *t;
            if *t > duration_ms {
                return Err(FtError::BadScript(format!("record at {t} ms is past the end at {duration_ms} ms")));
            }
            if let Target::Member(id) = action.target() {
                if !members.contains(id) {
                    return Err(FtError::BadScript(format!("unknown member `{id}`")));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for FaultScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, a) in &self.events {
            writeln!(f, "{t} {a}")?;
        }
        if let Some(end) = self.end_ms {
            writeln!(f, "{end} END")?;
        }
        Ok(())
    }
}

fn words(body: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &body[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_records() {
        let s = FaultScript::parse("# scenario\n20000 DROP m2\n40000 FDIA m3 +500\n55000 STOPFDIA m3\n60000 END\n")
            .unwrap();
        assert_eq!(s.events.len(), 3);
        assert_eq!(s.events[1], (40000, FaultAction::StartFdia(Target::Member("m3".into()), 500.0)));
        assert_eq!(s.end_ms, Some(60000));
        assert_eq!(FaultScript::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn leader_target() {
        let s = FaultScript::parse("10 DROP @leader").unwrap();
        assert_eq!(s.events[0].1, FaultAction::DropNode(Target::Leader));
    }

    #[test]
    fn reports_positions() {
        let e = FaultScript::parse("10 DROP m1\n5 DROP m2").unwrap_err();
        assert!(matches!(e, FtError::Parse { line: 2, col: 1, .. }));
        let e = FaultScript::parse("10 FDIA m1 lots").unwrap_err();
        assert!(matches!(e, FtError::Parse { line: 1, col: 12, .. }));
        let e = FaultScript::parse("10 EXPLODE m1").unwrap_err();
        assert!(matches!(e, FtError::Parse { line: 1, col: 4, .. }));
    }

    #[test]
    fn check_rejects_unknown_and_late() {
        let members = vec!["m1".to_string()];
        let s = FaultScript::parse("10 DROP m9").unwrap();
        assert!(matches!(s.check(&members, 100), Err(FtError::BadScript(_))));
        let s = FaultScript::parse("1000 DROP m1").unwrap();
        assert!(matches!(s.check(&members, 100), Err(FtError::BadScript(_))));
    }
}
