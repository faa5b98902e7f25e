//! The `.hb` bundle description format.
//!
//! ```text
//! # comments run to the end of the line
//! context g=2 labels=1
//! label L = (1)
//! summand L * jordan(2)
//! summand O * monomial(2,0;1,1;0,2)
//! summand L * matrices { N1=[[0,1],[0,0]]; N2=[[0,0],[0,0]] }
//! ```
//!
//! One statement per line; a `matrices { ... }` block may continue over several lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bundles::{BaseContext, HomogeneousBundle, Label};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Matrix;
use crate::module_rep::UnipotentModule;

pub fn parse_bundle(text: &str, field: Field) -> Result<HomogeneousBundle> {
    Parser::new(text, field).file()
}

/// Canonical text for a bundle: labels named `L1, L2, ...` in order, every module
/// written out as matrices. Prime-field entries appear as plain residues.
pub fn serialize_bundle(bundle: &HomogeneousBundle) -> String {
    let ctx = bundle.context();
    let mut out = format!("context g={} labels={}\n", ctx.g, ctx.label_rank);
    let mut names = BTreeMap::new();
    for label in bundle.labels() {
        if label.is_trivial() {
            continue;
        }
        let name = format!("L{}", names.len() + 1);
        let coords: Vec<String> = label.coords().iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "label {name} = ({})", coords.join(","));
        names.insert(label.clone(), name);
    }
    for (label, module) in bundle.summands() {
        let name = names.get(label).map_or("O", String::as_str);
        let ops: Vec<String> =
            module.operators().iter().enumerate().map(|(i, n)| format!("N{}={}", i + 1, matrix_text(n))).collect();
        let _ = writeln!(out, "summand {name} * matrices {{ {} }}", ops.join("; "));
    }
    out
}

fn matrix_text(m: &Matrix) -> String {
    let entry = |x: &Scalar| match x {
        Scalar::Mod(r) => r.value().to_string(),
        other => other.to_string(),
    };
    let rows: Vec<String> =
        (0..m.rows()).map(|r| format!("[{}]", m.row(r).iter().map(entry).collect::<Vec<_>>().join(","))).collect();
    format!("[{}]", rows.join(","))
}

fn describe(c: Option<char>) -> String {
    match c {
        None => "end of input".into(),
        Some('\n') => "end of line".into(),
        Some(c) => format!("`{c}`"),
    }
}

enum Source {
    Jordan(usize),
    Monomial(Vec<Vec<u32>>),
    Matrices(Vec<(usize, Vec<Vec<String>>)>),
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    field: Field,
}

impl Parser {
    fn new(text: &str, field: Field) -> Parser {
        Parser { chars: text.chars().collect(), pos: 0, line: 1, column: 1, field }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { line: self.line, column: self.column, message: message.into() })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Skips spaces and tabs, plus newlines and comments when `newlines` is set.
    fn skip(&mut self, newlines: bool) {
        while let Some(c) = self.peek() {
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '\n' if newlines => {
                    self.bump();
                }
                '#' if newlines => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, want: char, newlines: bool) -> Result<()> {
        self.skip(newlines);
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            found => self.error(format!("expected `{want}`, found {}", describe(found))),
        }
    }

    fn word(&mut self) -> Result<String> {
        self.skip(false);
        let mut w = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
            w.push(c);
            self.bump();
        }
        if w.is_empty() {
            return self.error(format!("expected a name, found {}", describe(self.peek())));
        }
        Ok(w)
    }

    fn keyword(&mut self, want: &str) -> Result<()> {
        let (line, column) = (self.line, self.column);
        let w = self.word()?;
        if w != want {
            return Err(Error::Syntax { line, column, message: format!("expected `{want}`, found `{w}`") });
        }
        Ok(())
    }

    fn token(&mut self, newlines: bool) -> Result<String> {
        self.skip(newlines);
        let mut t = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '/')) {
            t.push(c);
            self.bump();
        }
        if t.is_empty() {
            return self.error(format!("expected a number, found {}", describe(self.peek())));
        }
        Ok(t)
    }

    fn integer<T: std::str::FromStr>(&mut self, newlines: bool) -> Result<T> {
        self.skip(newlines);
        let (line, column) = (self.line, self.column);
        let t = self.token(newlines)?;
        t.parse().map_err(|_| Error::Syntax { line, column, message: format!("invalid integer `{t}`") })
    }

    fn end_of_statement(&mut self) -> Result<()> {
        self.skip(false);
        match self.peek() {
            None | Some('\n') | Some('#') => Ok(()),
            Some(c) => self.error(format!("unexpected `{c}` after statement")),
        }
    }

    fn file(mut self) -> Result<HomogeneousBundle> {
        let mut context: Option<BaseContext> = None;
        let mut labels: BTreeMap<String, Label> = BTreeMap::new();
        let mut summands: Vec<(usize, String, Source)> = Vec::new();
        loop {
            self.skip(true);
            if self.peek().is_none() {
                break;
            }
            let (line, column) = (self.line, self.column);
            let at = |message: String| Error::Syntax { line, column, message };
            match self.word()?.as_str() {
                "context" => {
                    if context.is_some() {
                        return Err(at("duplicate context declaration".into()));
                    }
                    self.keyword("g")?;
                    self.expect('=', false)?;
                    let g: usize = self.integer(false)?;
                    self.keyword("labels")?;
                    self.expect('=', false)?;
                    let label_rank: usize = self.integer(false)?;
                    context = Some(BaseContext::new(g, label_rank, self.field).map_err(|e| at(e.to_string()))?);
                }
                "label" => {
                    let ctx = context.ok_or_else(|| at("label before context declaration".into()))?;
                    let name = self.word()?;
                    if name == "O" || labels.contains_key(&name) {
                        return Err(at(format!("label name `{name}` is reserved or already bound")));
                    }
                    self.expect('=', false)?;
                    let coords = self.tuple()?;
                    if coords.len() != ctx.label_rank {
                        return Err(at(format!(
                            "label `{name}` has {} coordinates, context declares {}",
                            coords.len(),
                            ctx.label_rank
                        )));
                    }
                    labels.insert(name, Label::new(coords));
                }
                "summand" => {
                    if context.is_none() {
                        return Err(at("summand before context declaration".into()));
                    }
                    let name = self.word()?;
                    self.expect('*', false)?;
                    let source = self.source()?;
                    summands.push((summands.len() + 1, name, source));
                }
                other => return Err(at(format!("unknown statement `{other}`"))),
            }
            self.end_of_statement()?;
        }
        let ctx = context.ok_or(Error::Syntax { line: 1, column: 1, message: "missing context declaration".into() })?;
        let mut built = Vec::with_capacity(summands.len());
        for (index, name, source) in summands {
            let semantic = |message: String| Error::Semantic { summand: index, message };
            let label = if name == "O" {
                ctx.trivial_label()
            } else {
                labels.get(&name).cloned().ok_or_else(|| semantic(format!("unknown label `{name}`")))?
            };
            let module = self.build(ctx, source).map_err(|e| semantic(e.to_string()))?;
            built.push((label, module));
        }
        HomogeneousBundle::normalize(ctx, built)
    }

    fn tuple(&mut self) -> Result<Vec<i64>> {
        self.expect('(', false)?;
        let mut out = Vec::new();
        self.skip(false);
        if self.peek() == Some(')') {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.integer(false)?);
            self.skip(false);
            match self.bump() {
                Some(',') => continue,
                Some(')') => return Ok(out),
                _ => return self.error("expected `,` or `)`"),
            }
        }
    }

    fn source(&mut self) -> Result<Source> {
        let (line, column) = (self.line, self.column);
        match self.word()?.as_str() {
            "jordan" => {
                self.expect('(', false)?;
                let r = self.integer(false)?;
                self.expect(')', false)?;
                Ok(Source::Jordan(r))
            }
            "monomial" => {
                self.expect('(', false)?;
                let mut gens = vec![Vec::new()];
                loop {
                    gens.last_mut().expect("nonempty").push(self.integer(false)?);
                    self.skip(false);
                    match self.bump() {
                        Some(',') => {}
                        Some(';') => gens.push(Vec::new()),
                        Some(')') => return Ok(Source::Monomial(gens)),
                        _ => return self.error("expected `,`, `;` or `)`"),
                    }
                }
            }
            "matrices" => {
                self.expect('{', false)?;
                let mut ops = Vec::new();
                loop {
                    self.skip(true);
                    if self.peek() == Some('}') {
                        self.bump();
                        return Ok(Source::Matrices(ops));
                    }
                    let (line, column) = (self.line, self.column);
                    let name = self.word()?;
                    let index =
                        name.strip_prefix('N').and_then(|i| i.parse::<usize>().ok()).filter(|&i| i >= 1).ok_or(
                            Error::Syntax { line, column, message: format!("expected `N<i>`, found `{name}`") },
                        )?;
                    self.expect('=', true)?;
                    ops.push((index, self.matrix()?));
                    self.skip(true);
                    match self.peek() {
                        Some(';') => {
                            self.bump();
                        }
                        Some('}') => {}
                        _ => return self.error("expected `;` or `}`"),
                    }
                }
            }
            other => Err(Error::Syntax { line, column, message: format!("unknown module constructor `{other}`") }),
        }
    }

    fn matrix(&mut self) -> Result<Vec<Vec<String>>> {
        self.expect('[', true)?;
        let mut rows = Vec::new();
        loop {
            self.expect('[', true)?;
            let mut row = Vec::new();
            loop {
                row.push(self.token(true)?);
                self.skip(true);
                match self.bump() {
                    Some(',') => {}
                    Some(']') => break,
                    _ => return self.error("expected `,` or `]`"),
                }
            }
            rows.push(row);
            self.skip(true);
            match self.bump() {
                Some(',') => {}
                Some(']') => return Ok(rows),
                _ => return self.error("expected `,` or `]`"),
            }
        }
    }

    fn build(&self, ctx: BaseContext, source: Source) -> Result<UnipotentModule> {
        match source {
            Source::Jordan(r) => UnipotentModule::jordan_in(ctx.g, r, self.field),
            Source::Monomial(gens) => UnipotentModule::from_monomial_ideal(ctx.g, &gens, self.field),
            Source::Matrices(ops) => {
                let mut slots: Vec<Option<Matrix>> = vec![None; ctx.g];
                for (index, rows) in ops {
                    let slot = slots.get_mut(index - 1).ok_or_else(|| {
                        Error::InvalidArgument(format!("N{index} given but the context has g = {}", ctx.g))
                    })?;
                    if slot.is_some() {
                        return Err(Error::InvalidArgument(format!("N{index} given twice")));
                    }
                    let cols = rows.first().map_or(0, Vec::len);
                    let parsed = rows
                        .iter()
                        .map(|r| r.iter().map(|t| self.field.parse(t)).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?;
                    *slot = Some(Matrix::from_rows(self.field, parsed, cols)?);
                }
                let operators = slots
                    .into_iter()
                    .enumerate()
                    .map(|(i, m)| m.ok_or_else(|| Error::InvalidArgument(format!("N{} missing", i + 1))))
                    .collect::<Result<Vec<_>>>()?;
                UnipotentModule::new(ctx.g, operators)
            }
        }
    }
}
