//! Human-readable table and JSON lines for check reports.

use std::fmt::Write;

use nscap::propcheck::{CheckReport, Verdict};

pub struct Summary {
    pub table: String,
    pub json_lines: Vec<String>,
    pub any_violated: bool,
}

fn side(s: &Option<nscap::propcheck::Side>) -> String {
    s.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn summarize(reports: &[CheckReport]) -> Summary {
    let mut table = String::new();
    writeln!(
        table,
        "   {:<18} {:<48} {:>20} {:>20} {:>9}  verdict",
        "name", "inputs", "lhs", "rhs", "tolerance"
    )
    .unwrap();
    let mut holds = 0;
    let mut violated = 0;
    for r in reports {
        let mark = match r.verdict {
            Verdict::Holds => {
                holds += 1;
                "  "
            }
            Verdict::Violated => {
                violated += 1;
                "!!"
            }
            Verdict::Inconclusive => " ?",
        };
        let verdict = serde_json::to_value(r.verdict).unwrap();
        writeln!(
            table,
            "{mark} {:<18} {:<48} {:>20} {:>20} {:>9}  {}",
            r.name,
            r.inputs,
            side(&r.lhs),
            side(&r.rhs),
            r.tolerance,
            verdict.as_str().unwrap_or_default()
        )
        .unwrap();
        for note in &r.notes {
            writeln!(table, "     {note}").unwrap();
        }
    }
    if reports.is_empty() {
        table.push_str("0 checks\n");
    } else {
        write!(table, "{holds}/{} holds", reports.len()).unwrap();
        if violated > 0 {
            write!(table, ", {violated} VIOLATED").unwrap();
        }
        table.push('\n');
    }
    Summary {
        table,
        json_lines: reports.iter().map(|r| serde_json::to_string(r).unwrap()).collect(),
        any_violated: violated > 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nscap::propcheck::Side;
    use nscap::CapacityValue;

    fn report(verdict: Verdict) -> CheckReport {
        CheckReport {
            name: "direct_sum".into(),
            inputs: "[z-1] + [z-1]".into(),
            lhs: Some(Side::Capacity(CapacityValue::Finite(1.0))),
            rhs: Some(Side::Capacity(CapacityValue::ZeroMinus)),
            tolerance: 0.1,
            verdict,
            notes: vec![],
        }
    }

    #[test]
    fn empty() {
        let s = summarize(&[]);
        assert!(s.table.lines().next().unwrap().contains("verdict"));
        assert!(s.table.ends_with("0 checks\n"));
        assert!(s.json_lines.is_empty() && !s.any_violated);
    }

    #[test]
    fn one_holds() {
        let s = summarize(&[report(Verdict::Holds)]);
        assert!(s.table.contains("1/1 holds"));
        assert!(!s.any_violated);
        let v: serde_json::Value = serde_json::from_str(&s.json_lines[0]).unwrap();
        assert_eq!(v["verdict"], "holds");
        assert_eq!(v["rhs"], "0-");
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 6);
    }

    #[test]
    fn violated_row_is_flagged() {
        let s = summarize(&[report(Verdict::Holds), report(Verdict::Violated)]);
        assert!(s.any_violated);
        let flagged: Vec<_> = s.table.lines().filter(|l| l.starts_with("!!")).collect();
        assert_eq!(flagged.len(), 1);
        assert!(s.table.contains("1/2 holds, 1 VIOLATED"));
    }
}
