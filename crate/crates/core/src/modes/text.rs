//! Mode file dialects.
//!
//! The generic dialect is one `mode: pred(args).` declaration per line, target
//! first, then body modes in canonical order, LF line endings and a single
//! trailing newline. It is the only dialect that can be parsed back.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ArgMode, Direction, ModeSet, ModeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    #[default]
    Generic,
    Aleph,
    Boostsrl,
}

impl Dialect {
    pub fn as_str(self) -> &'static str {
        match self {
            Dialect::Generic => "generic",
            Dialect::Aleph => "aleph",
            Dialect::Boostsrl => "boostsrl",
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generic" => Ok(Dialect::Generic),
            "aleph" => Ok(Dialect::Aleph),
            "boostsrl" => Ok(Dialect::Boostsrl),
            other => Err(format!("unknown dialect {other:?}")),
        }
    }
}

// Fixed learner settings written ahead of BoostSRL modes.
const BOOSTSRL_HEADER: &str = "\
setParam: maxTreeDepth=3.
setParam: nodeSize=2.
setParam: numOfClauses=8.
";

pub fn emit_modes(m: &ModeSet, dialect: Dialect) -> String {
    let mut out = String::new();
    match dialect {
        Dialect::Generic => {
            for spec in std::iter::once(m.target_mode()).chain(m.body_modes()) {
                writeln!(out, "mode: {spec}.").unwrap();
            }
        }
        Dialect::Aleph => {
            writeln!(out, ":- modeh(1, {}).", m.target_mode()).unwrap();
            for spec in m.body_modes() {
                writeln!(out, ":- modeb(*, {spec}).").unwrap();
            }
        }
        Dialect::Boostsrl => {
            out.push_str(BOOSTSRL_HEADER);
            for spec in std::iter::once(m.target_mode()).chain(m.body_modes()) {
                writeln!(out, "mode: {spec}.").unwrap();
            }
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModeParseError {
    #[error("line {line}, column {column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: &'static str,
        found: String,
    },
    #[error("no mode declarations found")]
    Empty,
    #[error("line {line}: target mode {mode} must have only input arguments")]
    TargetNotInput { line: usize, mode: String },
}

/// Parses a generic-dialect mode file. The first declaration is the target.
///
/// Blank lines and lines starting with `%` are skipped.
pub fn parse_modes(text: &str) -> Result<ModeSet, ModeParseError> {
    let mut target = None;
    let mut body = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_start();
        if trimmed.trim_end().is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let spec = Cursor::new(raw, line).declaration()?;
        if target.is_none() {
            if !spec.is_all_input() {
                return Err(ModeParseError::TargetNotInput {
                    line,
                    mode: spec.to_string(),
                });
            }
            target = Some(spec);
        } else {
            body.push(spec);
        }
    }
    let target = target.ok_or(ModeParseError::Empty)?;
    Ok(ModeSet::new(target, body).expect("target checked above"))
}

/// Parses a bare `pred(args)` without the `mode:` prefix or period.
#[cfg(test)]
pub(crate) fn parse_mode_line(s: &str) -> Result<ModeSpec, ModeParseError> {
    let mut c = Cursor::new(s, 1);
    let spec = c.spec()?;
    c.skip_ws();
    c.end()?;
    Ok(spec)
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(s: &str, line: usize) -> Self {
        Self {
            chars: s.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error<T>(&self, expected: &'static str) -> Result<T, ModeParseError> {
        Err(ModeParseError::Syntax {
            line: self.line,
            column: self.pos + 1,
            expected,
            found: match self.peek() {
                Some(c) => format!("{c:?}"),
                None => "end of line".to_string(),
            },
        })
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t' || c == '\r') {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char, expected: &'static str) -> Result<(), ModeParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(expected)
        }
    }

    fn end(&self) -> Result<(), ModeParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => self.error("end of line"),
        }
    }

    fn ident(&mut self) -> Result<String, ModeParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return self.error("identifier"),
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn arg(&mut self) -> Result<ArgMode, ModeParseError> {
        let direction = match self.peek().and_then(Direction::from_marker) {
            Some(d) => d,
            None => return self.error("direction marker '+', '-' or '#'"),
        };
        self.pos += 1;
        Ok(ArgMode::new(direction, self.ident()?))
    }

    fn spec(&mut self) -> Result<ModeSpec, ModeParseError> {
        self.skip_ws();
        let predicate = self.ident()?;
        self.skip_ws();
        self.expect('(', "'('")?;
        let mut args = Vec::new();
        loop {
            self.skip_ws();
            args.push(self.arg()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                _ => return self.error("',' or ')'"),
            }
        }
        Ok(ModeSpec::new(predicate, args))
    }

    fn declaration(&mut self) -> Result<ModeSpec, ModeParseError> {
        self.skip_ws();
        for c in "mode".chars() {
            self.expect(c, "'mode:'")?;
        }
        self.expect(':', "':'")?;
        let spec = self.spec()?;
        self.skip_ws();
        self.expect('.', "'.'")?;
        self.skip_ws();
        self.end()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn university_modes() -> ModeSet {
        parse_modes(
            "mode: tenure(+professor).\n\
             mode: takes(+student, -course, #grade).\n\
             mode: advises(+professor, -student).\n",
        )
        .unwrap()
    }

    #[test]
    fn generic_layout() {
        assert_eq!(
            emit_modes(&university_modes(), Dialect::Generic),
            "mode: tenure(+professor).\n\
             mode: advises(+professor, -student).\n\
             mode: takes(+student, -course, #grade).\n"
        );
    }

    #[test]
    fn aleph_layout() {
        assert_eq!(
            emit_modes(&university_modes(), Dialect::Aleph),
            ":- modeh(1, tenure(+professor)).\n\
             :- modeb(*, advises(+professor, -student)).\n\
             :- modeb(*, takes(+student, -course, #grade)).\n"
        );
    }

    #[test]
    fn boostsrl_has_header() {
        let out = emit_modes(&university_modes(), Dialect::Boostsrl);
        assert!(out.starts_with("setParam: maxTreeDepth=3.\n"));
        assert!(out.ends_with("mode: takes(+student, -course, #grade).\n"));
    }

    #[test]
    fn empty_body_is_target_only() {
        let m = university_modes().with_body([]);
        assert_eq!(emit_modes(&m, Dialect::Generic), "mode: tenure(+professor).\n");
    }

    #[test]
    fn round_trip_and_determinism() {
        let m = university_modes();
        let once = emit_modes(&m, Dialect::Generic);
        assert_eq!(once, emit_modes(&m, Dialect::Generic));
        assert_eq!(parse_modes(&once).unwrap(), m);
    }

    #[test]
    fn bad_marker() {
        let err = parse_modes("mode: tenure(*professor).\n").unwrap_err();
        assert_eq!(
            err,
            ModeParseError::Syntax {
                line: 1,
                column: 14,
                expected: "direction marker '+', '-' or '#'",
                found: "'*'".into(),
            }
        );
    }

    #[test]
    fn other_syntax_errors() {
        assert!(matches!(
            parse_modes("mode: t(+a)\n"),
            Err(ModeParseError::Syntax { expected: "'.'", .. })
        ));
        assert!(matches!(
            parse_modes("modeb: t(+a).\n"),
            Err(ModeParseError::Syntax { column: 5, .. })
        ));
        assert!(matches!(
            parse_modes("mode: t(+a).\nmode: u(+a -b).\n"),
            Err(ModeParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_modes("mode: t().\n"),
            Err(ModeParseError::Syntax { .. })
        ));
    }

    #[test]
    fn semantic_errors() {
        assert_eq!(parse_modes("% nothing\n\n"), Err(ModeParseError::Empty));
        assert!(matches!(
            parse_modes("mode: t(+a, -b).\n"),
            Err(ModeParseError::TargetNotInput { line: 1, .. })
        ));
    }

    #[test]
    fn comments_whitespace_and_duplicates() {
        let m = parse_modes(
            "% expert modes\n  mode:tenure( +professor ) .\r\nmode: a(+professor).\nmode: a(+professor).\n",
        )
        .unwrap();
        assert_eq!(m.target_mode().to_string(), "tenure(+professor)");
        assert_eq!(m.body_modes().len(), 1);
    }

    #[test]
    fn dialect_names() {
        for d in [Dialect::Generic, Dialect::Aleph, Dialect::Boostsrl] {
            assert_eq!(d.as_str().parse::<Dialect>().unwrap(), d);
        }
    }
}
