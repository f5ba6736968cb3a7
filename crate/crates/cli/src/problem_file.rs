//! Problem files: `key = value` lines with `#` comments.
//!
//! ```text
//! # radial fibers with one prescribed zero
//! grid   = 1024
//! arc    = standard            # or (plus_deg, minus_deg)
//! symbol = standard            # or [(theta_deg, re, im), ...] on L
//! fibers = radial-cos:0.1:1    # preset, or a path to a fiber CSV
//! zeros  = [
//!     (0.0, 0.3, 1),
//! ]
//! steps  = 16
//! ```
//!
//! Lists may span several lines; everything else ends at the newline.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use mrh_core::fibers::{FiberPreset, RadialFiberFamily};
use mrh_core::problem::{ArcSpec, Problem, SymbolSample, SymbolSpec, ZeroPrescription, DEFAULT_GRID, DEFAULT_STEPS};
use num_complex::Complex64;

use crate::error::CliError;
use crate::tables::read_fiber_csv;

/// Environment variable that replaces the default grid size.
pub const GRID_ENV: &str = "MRH_GRID";

const KEYS: [&str; 6] = ["grid", "arc", "symbol", "fibers", "zeros", "steps"];
const PRESET_PREFIXES: [&str; 3] = ["circle:", "radial-cos:", "radial-theta:"];

#[derive(Debug, Clone, PartialEq)]
pub enum FiberSource {
    Preset { spec: String, preset: FiberPreset },
    Csv(PathBuf),
}

impl FiberSource {
    pub fn load(&self) -> Result<RadialFiberFamily, CliError> {
        match self {
            FiberSource::Preset { preset, .. } => Ok(preset.build()?),
            FiberSource::Csv(path) => read_fiber_csv(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub grid: usize,
    pub arc: ArcSpec,
    pub symbol: SymbolSpec,
    pub fibers: FiberSource,
    pub zeros: ZeroPrescription,
    pub steps: usize,
}

impl ProblemFile {
    /// Loads the fibers and validates the assembled problem.
    pub fn to_problem(&self) -> Result<Problem, CliError> {
        let problem = Problem {
            grid: self.grid,
            arc: self.arc,
            symbol: self.symbol.clone(),
            fibers: self.fibers.load()?,
            zeros: self.zeros.clone(),
            steps: self.steps,
        };
        problem.validate()?;
        Ok(problem)
    }
}

/// Reads and parses a problem file. Relative fiber paths resolve against
/// the file's directory; `MRH_GRID` supplies the grid when the file has none.
pub fn parse_problem(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let env_grid = std::env::var(GRID_ENV).ok();
    parse_problem_str(&text, &path.display().to_string(), base, env_grid.as_deref())
}

pub fn parse_problem_str(
    text: &str,
    origin: &str,
    base_dir: &Path,
    env_grid: Option<&str>,
) -> Result<ProblemFile, CliError> {
    let fail = |pos: Pos, message: String| CliError::Parse {
        origin: origin.to_string(),
        line: pos.line,
        column: pos.column,
        message,
    };
    let tokens = lex(text).map_err(|(pos, msg)| fail(pos, msg))?;
    let entries = Parser { tokens: &tokens, at: 0 }.entries().map_err(|(pos, msg)| fail(pos, msg))?;

    let mut seen: Vec<(&str, Pos)> = Vec::new();
    for entry in &entries {
        if !KEYS.contains(&entry.key.as_str()) {
            return Err(fail(entry.key_pos, format!("unknown key `{}`", entry.key)));
        }
        if let Some((_, first)) = seen.iter().find(|(k, _)| *k == entry.key) {
            return Err(fail(
                entry.key_pos,
                format!("duplicate key `{}` (first set at line {})", entry.key, first.line),
            ));
        }
        seen.push((&entry.key, entry.key_pos));
    }
    let find = |key: &str| entries.iter().find(|e| e.key == key);

    let grid = match (find("grid"), env_grid) {
        (Some(e), _) => integer(&e.value).map_err(|(p, m)| fail(p, m))?,
        (None, Some(raw)) => raw
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{GRID_ENV} must be a positive integer, got `{raw}`")))?,
        (None, None) => DEFAULT_GRID,
    };
    let steps = match find("steps") {
        Some(e) => integer(&e.value).map_err(|(p, m)| fail(p, m))?,
        None => DEFAULT_STEPS,
    };
    let arc = match find("arc") {
        Some(e) => arc(&e.value).map_err(|(p, m)| fail(p, m))?,
        None => ArcSpec::Standard,
    };
    let symbol = match find("symbol") {
        Some(e) => symbol(&e.value).map_err(|(p, m)| fail(p, m))?,
        None => SymbolSpec::Standard,
    };
    let zeros = match find("zeros") {
        Some(e) => zeros(&e.value).map_err(|(p, m)| fail(p, m))?,
        None => ZeroPrescription::empty(),
    };
    let fibers = match find("fibers") {
        Some(e) => fibers(&e.value, base_dir).map_err(|(p, m)| fail(p, m))?,
        None => {
            let end = tokens.last().map_or(Pos { line: 1, column: 1 }, |t| t.pos);
            return Err(fail(end, "missing required key `fibers`".into()));
        }
    };
    Ok(ProblemFile { grid, arc, symbol, fibers, zeros, steps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

type Located<T> = Result<T, (Pos, String)>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Equals,
    Comma,
    Open(char),
    Close(char),
    Newline,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
}

fn lex(text: &str) -> Located<Vec<Token>> {
    let mut out = Vec::new();
    for (row, line) in text.lines().enumerate() {
        let mut chars = line.char_indices().peekable();
        while let Some((byte, ch)) = chars.next() {
            let pos = Pos { line: row + 1, column: line[..byte].chars().count() + 1 };
            let tok = match ch {
                '#' => break,
                c if c.is_whitespace() => continue,
                '=' => Tok::Equals,
                ',' => Tok::Comma,
                '[' | '(' => Tok::Open(ch),
                ']' | ')' => Tok::Close(ch),
                '"' => {
                    let mut word = String::new();
                    loop {
                        match chars.next() {
                            Some((_, '"')) => break,
                            Some((_, c)) => word.push(c),
                            None => return Err((pos, "unterminated string".into())),
                        }
                    }
                    Tok::Word(word)
                }
                _ => {
                    let mut word = ch.to_string();
                    while let Some(&(_, c)) = chars.peek() {
                        if c.is_whitespace() || "=,[]()#\"".contains(c) {
                            break;
                        }
                        word.push(c);
                        chars.next();
                    }
                    Tok::Word(word)
                }
            };
            out.push(Token { tok, pos });
        }
        out.push(Token { tok: Tok::Newline, pos: Pos { line: row + 1, column: line.chars().count() + 1 } });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Scalar(String, Pos),
    Group { open: char, items: Vec<Value>, pos: Pos },
}

impl Value {
    fn pos(&self) -> Pos {
        match self {
            Value::Scalar(_, p) | Value::Group { pos: p, .. } => *p,
        }
    }
}

struct Entry {
    key: String,
    key_pos: Pos,
    value: Value,
}

struct Parser<'a> {
    tokens: &'a [Token],
    at: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn end_pos(&self) -> Pos {
        self.tokens.last().map_or(Pos { line: 1, column: 1 }, |t| t.pos)
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek(), Some(Token { tok: Tok::Newline, .. })) {
            self.at += 1;
        }
    }

    fn entries(mut self) -> Located<Vec<Entry>> {
        let mut entries = Vec::new();
        loop {
            self.skip_newlines();
            let Some(token) = self.next() else { return Ok(entries) };
            let Tok::Word(key) = token.tok else {
                return Err((token.pos, "expected a key".into()));
            };
            match self.next() {
                Some(Token { tok: Tok::Equals, .. }) => {}
                Some(t) => return Err((t.pos, format!("expected `=` after `{key}`"))),
                None => return Err((self.end_pos(), format!("expected `=` after `{key}`"))),
            }
            let value = self.value()?;
            match self.next() {
                None | Some(Token { tok: Tok::Newline, .. }) => {}
                Some(t) => return Err((t.pos, "expected the end of the line".into())),
            }
            entries.push(Entry { key, key_pos: token.pos, value });
        }
    }

    fn value(&mut self) -> Located<Value> {
        match self.next() {
            Some(Token { tok: Tok::Word(w), pos }) => Ok(Value::Scalar(w, pos)),
            Some(Token { tok: Tok::Open(open), pos }) => {
                let close = if open == '[' { ']' } else { ')' };
                let mut items = Vec::new();
                loop {
                    self.skip_newlines();
                    if self.peek().is_none() {
                        return Err((pos, format!("unclosed `{open}`")));
                    }
                    if let Some(Token { tok: Tok::Close(c), pos: p }) = self.peek().cloned() {
                        self.at += 1;
                        if c != close {
                            return Err((p, format!("expected `{close}`, found `{c}`")));
                        }
                        return Ok(Value::Group { open, items, pos });
                    }
                    items.push(self.value()?);
                    self.skip_newlines();
                    match self.peek().cloned() {
                        Some(Token { tok: Tok::Comma, .. }) => self.at += 1,
                        Some(Token { tok: Tok::Close(_), .. }) => {}
                        Some(t) => return Err((t.pos, format!("expected `,` or `{close}`"))),
                        None => return Err((pos, format!("unclosed `{open}`"))),
                    }
                }
            }
            Some(t) => Err((t.pos, "expected a value".into())),
            None => Err((self.end_pos(), "expected a value".into())),
        }
    }
}

fn scalar(v: &Value) -> Located<(&str, Pos)> {
    match v {
        Value::Scalar(s, p) => Ok((s, *p)),
        Value::Group { pos, .. } => Err((*pos, "expected a single value".into())),
    }
}

fn integer(v: &Value) -> Located<usize> {
    let (s, p) = scalar(v)?;
    s.parse().map_err(|_| (p, format!("expected a nonnegative integer, found `{s}`")))
}

fn number(v: &Value) -> Located<f64> {
    let (s, p) = scalar(v)?;
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err((p, format!("expected a number, found `{s}`"))),
    }
}

fn numbers(v: &Value, len: usize) -> Located<Vec<f64>> {
    match v {
        Value::Group { items, pos, .. } if items.len() == len => items.iter().map(number).collect(),
        other => Err((other.pos(), format!("expected a tuple of {len} numbers"))),
    }
}

fn list(v: &Value) -> Located<&[Value]> {
    match v {
        Value::Group { open: '[', items, .. } => Ok(items),
        other => Err((other.pos(), "expected a list `[...]`".into())),
    }
}

fn is_standard(v: &Value) -> bool {
    matches!(v, Value::Scalar(s, _) if s == "standard")
}

fn arc(v: &Value) -> Located<ArcSpec> {
    if is_standard(v) {
        return Ok(ArcSpec::Standard);
    }
    let e = numbers(v, 2).map_err(|(p, _)| (p, "expected `standard` or (plus_deg, minus_deg)".into()))?;
    Ok(ArcSpec::Endpoints { plus: e[0].to_radians(), minus: e[1].to_radians() })
}

fn symbol(v: &Value) -> Located<SymbolSpec> {
    if is_standard(v) {
        return Ok(SymbolSpec::Standard);
    }
    let items = list(v).map_err(|(p, _)| (p, "expected `standard` or [(theta_deg, re, im), ...]".into()))?;
    if items.is_empty() {
        return Err((v.pos(), "symbol table is empty".into()));
    }
    let samples = items
        .iter()
        .map(|item| {
            let t = numbers(item, 3)?;
            Ok(SymbolSample { theta: t[0].to_radians(), value: Complex64::new(t[1], t[2]) })
        })
        .collect::<Located<_>>()?;
    Ok(SymbolSpec::Table(samples))
}

fn zeros(v: &Value) -> Located<ZeroPrescription> {
    let items = list(v)?;
    let mut points = Vec::with_capacity(items.len());
    for item in items {
        let t = numbers(item, 3)?;
        let multiplicity = t[2];
        if multiplicity.fract() != 0.0 || !(1.0..=u32::MAX as f64).contains(&multiplicity) {
            return Err((item.pos(), format!("multiplicity must be a positive integer, found {multiplicity}")));
        }
        points.push((Complex64::new(t[0], t[1]), multiplicity as u32));
    }
    ZeroPrescription::new(points).map_err(|e| (v.pos(), e.to_string()))
}

fn fibers(v: &Value, base_dir: &Path) -> Located<FiberSource> {
    let (s, p) = scalar(v)?;
    if PRESET_PREFIXES.iter().any(|prefix| s.starts_with(prefix)) {
        let preset = FiberPreset::from_str(s).map_err(|e| (p, e.to_string()))?;
        Ok(FiberSource::Preset { spec: s.to_string(), preset })
    } else {
        Ok(FiberSource::Csv(base_dir.join(s)))
    }
}
