use std::collections::BTreeMap;
use std::fmt;

use super::assemble::NetworkConfig;
use super::{fmt_num, DslError};

/// Raw capacities of one hardware type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardwareRecord {
    pub cores: u32,
    pub max_cpu: f64,
    pub mem_mb: f64,
    pub max_mem: f64,
    pub spc_mb: f64,
    pub max_spc: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HardwareSpecFile {
    pub hardware: BTreeMap<String, HardwareRecord>,
    /// Optional `[network]` section with NIC rate/ceil in kbps.
    pub network: Option<NetworkConfig>,
}

const FIELDS: [&str; 6] = ["cores", "max_cpu", "mem", "max_mem", "spc", "max_spc"];
const NETWORK_SECTION: &str = "network";

/// Section name with its `key -> (raw value, line)` entries.
type Section = (String, BTreeMap<String, (String, usize)>);

/// Parses an INI hardware specification. `#` and `;` start comments, also
/// after a value.
pub fn parse_hwspec(text: &str) -> Result<HardwareSpecFile, DslError> {
    // section -> field -> (value text, line)
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.find(['#', ';']).map_or(raw, |p| &raw[..p]).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| DslError::Syntax { line: line_no, col: 1, msg: "malformed section header".into() })?;
            if sections.iter().any(|(s, _)| s == name) {
                return Err(DslError::DuplicateSection { section: name.into(), line: line_no });
            }
            sections.push((name.to_string(), BTreeMap::new()));
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| DslError::Syntax {
            line: line_no,
            col: 1,
            msg: "expected `name = value`".into(),
        })?;
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
        if key.is_empty() {
            return Err(DslError::Syntax { line: line_no, col: 1, msg: "empty key".into() });
        }
        let Some((section, fields)) = sections.last_mut() else {
            return Err(DslError::Syntax { line: line_no, col: 1, msg: "key outside of any section".into() });
        };
        if fields.insert(key.clone(), (value.to_string(), line_no)).is_some() {
            return Err(DslError::DuplicateField { section: section.clone(), field: key, line: line_no });
        }
    }

    let mut out = HardwareSpecFile::default();
    for (name, fields) in sections {
        let get = |field: &str| -> Result<f64, DslError> {
            let (v, line) = fields
                .get(field)
                .ok_or_else(|| DslError::MissingField { section: name.clone(), field: field.into() })?;
            positive(v).ok_or_else(|| DslError::BadNumber { line: *line, field: field.into(), value: v.clone() })
        };
        if name == NETWORK_SECTION {
            let net = NetworkConfig { nic_rate_kbps: get("nic_rate")?, nic_ceil_kbps: get("nic_ceil")? };
            out.network = Some(net);
            continue;
        }
        let cores_text = fields
            .get("cores")
            .ok_or_else(|| DslError::MissingField { section: name.clone(), field: "cores".into() })?;
        let cores = cores_text.0.parse::<u32>().ok().filter(|c| *c > 0).ok_or_else(|| DslError::BadNumber {
            line: cores_text.1,
            field: "cores".into(),
            value: cores_text.0.clone(),
        })?;
        let rec = HardwareRecord {
            cores,
            max_cpu: get("max_cpu")?,
            mem_mb: get("mem")?,
            max_mem: get("max_mem")?,
            spc_mb: get("spc")?,
            max_spc: get("max_spc")?,
        };
        out.hardware.insert(name, rec);
    }
    Ok(out)
}

fn positive(text: &str) -> Option<f64> {
    let v: f64 = text.parse().ok()?;
    (v.is_finite() && v > 0.0).then_some(v)
}

impl fmt::Display for HardwareSpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (key, r) in &self.hardware {
            if !first {
                writeln!(f)?;
            }
            first = false;
            writeln!(f, "[{key}]")?;
            let values = [
                r.cores.to_string(),
                fmt_num(r.max_cpu),
                fmt_num(r.mem_mb),
                fmt_num(r.max_mem),
                fmt_num(r.spc_mb),
                fmt_num(r.max_spc),
            ];
            for (name, v) in FIELDS.iter().zip(values) {
                writeln!(f, "{name} = {v}")?;
            }
        }
        if let Some(net) = &self.network {
            if !first {
                writeln!(f)?;
            }
            writeln!(f, "[{NETWORK_SECTION}]")?;
            writeln!(f, "nic_rate = {}", fmt_num(net.nic_rate_kbps))?;
            writeln!(f, "nic_ceil = {}", fmt_num(net.nic_ceil_kbps))?;
        }
        Ok(())
    }
}
