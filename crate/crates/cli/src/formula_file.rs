//! Formula files: either one formula, or named sections introduced by a
//! `[name]` header line. `#` starts a comment.

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedFormula {
    pub name: String,
    pub text: String,
}

pub fn parse_formula_file(content: &str) -> Result<Vec<NamedFormula>, CliError> {
    let mut out: Vec<NamedFormula> = Vec::new();
    let mut current: Option<NamedFormula> = None;
    let mut loose = String::new();
    for (i, line) in content.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(name) = trimmed.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                if current.is_none() && !is_blank(&loose) {
                    return Err(CliError::Parse(format!(
                        "line {}: formula text before the first section header",
                        i + 1
                    )));
                }
                if let Some(done) = current.take() {
                    out.push(done);
                }
                if out.iter().any(|f| f.name == name) {
                    return Err(CliError::Parse(format!("line {}: duplicate section `{name}`", i + 1)));
                }
                current = Some(NamedFormula {
                    name: name.to_string(),
                    text: String::new(),
                });
                continue;
            }
        }
        let target = match current.as_mut() {
            Some(f) => &mut f.text,
            None => &mut loose,
        };
        target.push_str(line);
        target.push('\n');
    }
    match current {
        Some(done) => out.push(done),
        None => out.push(NamedFormula {
            name: "formula".to_string(),
            text: loose,
        }),
    }
    for f in &out {
        if is_blank(&f.text) {
            return Err(CliError::Parse(format!("formula `{}` is empty", f.name)));
        }
    }
    Ok(out)
}

fn is_blank(text: &str) -> bool {
    text.lines().all(|l| {
        let l = l.trim();
        l.is_empty() || l.starts_with('#')
    })
}
