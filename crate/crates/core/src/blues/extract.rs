//! Reference statement extractor for a Java-like brace language.
//!
//! A recursive descent over a token stream that recognizes declarations,
//! statements, anonymous class bodies and lambda blocks. It is deliberately
//! forgiving: a region it cannot make sense of is skipped up to the next `;`
//! or balanced `}` and reported as a diagnostic, and extraction carries on.
//!
//! Emitted records, in pre-order:
//! * every statement except plain blocks, with its full (possibly multi-line) span;
//! * `SingleVariableDeclaration` for method, constructor and catch parameters;
//! * `Annotation` for annotations on types and members;
//! * `AnonymousClassDeclaration` for `new T(..) { .. }` bodies;
//! * one expression record (classified by its top-level shape) per field initializer.

use super::lexer::{lex, Comment, TokKind, Token};
use crate::corpus::StatementRecord;
use crate::textkit::Tokenizer;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub file_path: String,
    pub line: u32,
    pub message: String,
}

/// Identifiers and comments gathered for file-level retrieval.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileSummary {
    pub class_names: Vec<String>,
    pub method_names: Vec<String>,
    pub variable_names: Vec<String>,
    pub comments: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub statements: Vec<StatementRecord>,
    pub diagnostics: Vec<Diagnostic>,
    pub summary: FileSummary,
}

/// Extracts statement records from one source file.
pub fn extract_statements(file_path: &str, source: &str) -> Extraction {
    extract_with(file_path, source, &Tokenizer::default())
}

pub fn extract_with(file_path: &str, source: &str, tokenizer: &Tokenizer) -> Extraction {
    let lexed = lex(source);
    let mut p = Parser {
        toks: &lexed.tokens,
        pos: 0,
        file: file_path,
        raw: Vec::new(),
        diags: lexed
            .errors
            .iter()
            .map(|&line| Diagnostic {
                file_path: file_path.to_string(),
                line,
                message: "unterminated literal or comment".into(),
            })
            .collect(),
        summary: FileSummary {
            comments: lexed.comments.iter().map(|c: &Comment| c.text.clone()).collect(),
            ..Default::default()
        },
    };
    p.compilation_unit();

    let mut ordinals: HashMap<u32, usize> = HashMap::new();
    let statements = p
        .raw
        .iter()
        .map(|r| {
            let first = &p.toks[r.first];
            let last = &p.toks[r.last];
            let ordinal = ordinals.entry(first.line).or_insert(0);
            let id = format!("{file_path}:{}:{}", first.line, ordinal);
            *ordinal += 1;
            let raw_text = source[first.start..last.end].to_string();
            StatementRecord {
                statement_id: id,
                file_path: file_path.to_string(),
                kind: r.kind.to_string(),
                start_line: first.line,
                end_line: last.end_line,
                tokens: tokenizer.tokenize(&raw_text, true),
                raw_text,
            }
        })
        .collect();
    Extraction {
        statements,
        diagnostics: p.diags,
        summary: p.summary,
    }
}

struct RawRecord {
    kind: &'static str,
    first: usize,
    last: usize,
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
    "sealed",
];

const TYPE_KEYWORDS: &[&str] = &["class", "interface", "enum", "record"];

/// Identifiers that cannot start a local variable type.
const NOT_A_TYPE: &[&str] = &[
    "new",
    "return",
    "throw",
    "this",
    "super",
    "null",
    "true",
    "false",
    "instanceof",
    "yield",
    "assert",
    "case",
    "default",
    "else",
    "break",
    "continue",
];

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    file: &'a str,
    raw: Vec<RawRecord>,
    diags: Vec<Diagnostic>,
    summary: FileSummary,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, off: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + off)
    }

    fn at(&self, s: &str) -> bool {
        self.peek().is_some_and(|t| t.is(s))
    }

    fn at_ident(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokKind::Ident)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.at(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn line(&self) -> u32 {
        self.peek().or_else(|| self.toks.last()).map_or(1, |t| t.line)
    }

    fn diag(&mut self, message: impl Into<String>) {
        let line = self.line();
        self.diags.push(Diagnostic {
            file_path: self.file.to_string(),
            line,
            message: message.into(),
        });
    }

    fn open(&mut self, kind: &'static str) -> usize {
        self.raw.push(RawRecord {
            kind,
            first: self.pos,
            last: self.pos,
        });
        self.raw.len() - 1
    }

    fn close(&mut self, rec: usize) {
        let last = self.pos.saturating_sub(1).max(self.raw[rec].first);
        self.raw[rec].last = last;
    }

    fn record(&mut self, kind: &'static str, first: usize, last: usize) {
        self.raw.push(RawRecord { kind, first, last });
    }

    /// Skips a balanced group starting at an opening bracket.
    fn skip_group(&mut self) {
        let (open, close) = match self.peek().map(|t| t.text.as_str()) {
            Some("(") => ("(", ")"),
            Some("[") => ("[", "]"),
            Some("{") => ("{", "}"),
            _ => return,
        };
        let mut depth = 0;
        while let Some(t) = self.peek() {
            self.pos += 1;
            if t.is(open) {
                depth += 1;
            } else if t.is(close) {
                depth -= 1;
                if depth == 0 {
                    return;
                }
            }
        }
        self.diag(format!("unbalanced `{open}`"));
    }

    /// Skips to just past the next `;` at depth zero, or stops before an
    /// unmatched `}`.
    fn recover(&mut self) {
        while let Some(t) = self.peek() {
            if t.is(";") {
                self.pos += 1;
                return;
            }
            if t.is("}") {
                return;
            }
            if t.is("(") || t.is("[") || t.is("{") {
                self.skip_group();
            } else {
                self.pos += 1;
            }
        }
    }

    fn compilation_unit(&mut self) {
        while !self.eof() {
            if self.at("package") || self.at("import") {
                self.recover();
            } else if self.eat(";") {
            } else if !self.type_declaration() {
                self.diag(format!(
                    "unexpected `{}` at top level",
                    self.peek().map_or("", |t| t.text.as_str())
                ));
                self.recover();
                self.eat("}");
            }
        }
    }

    /// Modifiers and annotations; annotations become records.
    fn modifiers(&mut self) {
        loop {
            if self.at("@") && !self.peek_at(1).is_some_and(|t| t.is("interface")) {
                self.annotation();
            } else if self.peek().is_some_and(|t| MODIFIERS.contains(&t.text.as_str()))
                && !self.peek_at(1).is_some_and(|t| t.is("(") || t.is(":") || t.is("->"))
            {
                self.pos += 1;
            } else {
                return;
            }
        }
    }

    fn annotation(&mut self) {
        let rec = self.open("Annotation");
        self.pos += 1; // @
        if self.at_ident() {
            self.pos += 1;
        }
        while self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokKind::Ident) {
            self.pos += 2;
        }
        if self.at("(") {
            self.skip_group();
        }
        self.close(rec);
    }

    fn at_type_keyword(&self) -> bool {
        self.peek().is_some_and(|t| TYPE_KEYWORDS.contains(&t.text.as_str()))
            && self.peek_at(1).is_some_and(|t| t.kind == TokKind::Ident)
            || (self.at("@") && self.peek_at(1).is_some_and(|t| t.is("interface")))
    }

    /// Parses `[modifiers] class|interface|enum|record Name ... { body }`.
    /// Returns false (consuming only modifiers) if no type declaration follows.
    fn type_declaration(&mut self) -> bool {
        self.modifiers();
        if !self.at_type_keyword() {
            return false;
        }
        if self.eat("@") {
            self.pos += 1; // interface
        } else {
            self.pos += 1;
        }
        let kind = self.toks[self.pos - 1].text.clone();
        if let Some(name) = self.peek().filter(|t| t.kind == TokKind::Ident) {
            self.summary.class_names.push(name.text.clone());
            self.pos += 1;
        }
        // header: type parameters, record components, extends/implements
        while !self.eof() && !self.at("{") && !self.at(";") {
            if self.at("(") && kind == "record" {
                self.parameters();
            } else if self.at("(") || self.at("[") {
                self.skip_group();
            } else {
                self.pos += 1;
            }
        }
        if self.at("{") {
            self.class_body(kind == "enum");
        } else {
            self.diag("type declaration without a body");
            self.eat(";");
        }
        true
    }

    fn class_body(&mut self, is_enum: bool) {
        self.pos += 1; // {
        if is_enum {
            self.enum_constants();
        }
        while !self.eof() && !self.at("}") {
            self.member();
        }
        if !self.eat("}") {
            self.diag("unterminated class body");
        }
    }

    fn enum_constants(&mut self) {
        loop {
            self.modifiers();
            if self.at_ident() {
                self.pos += 1;
                if self.at("(") {
                    self.skip_group();
                }
                if self.at("{") {
                    self.class_body(false);
                }
            }
            if self.eat(",") {
                continue;
            }
            self.eat(";");
            return;
        }
    }

    fn member(&mut self) {
        if self.eat(";") {
            return;
        }
        self.modifiers();
        if self.at("{") {
            self.block_body();
            return;
        }
        if self.at_type_keyword() {
            self.type_declaration();
            return;
        }
        if self.at("<") {
            self.type_arguments();
        }
        // constructor: Name (
        if self.at_ident() && self.peek_at(1).is_some_and(|t| t.is("(")) {
            let name = self.toks[self.pos].text.clone();
            self.summary.method_names.push(name);
            self.pos += 1;
            self.method_rest();
            return;
        }
        if !self.skip_type() {
            self.diag(format!(
                "unsupported member starting with `{}`",
                self.peek().map_or("", |t| t.text.as_str())
            ));
            self.recover();
            return;
        }
        let Some(name) = self.peek().filter(|t| t.kind == TokKind::Ident) else {
            self.diag("expected a member name");
            self.recover();
            return;
        };
        self.pos += 1;
        if self.at("(") {
            self.summary.method_names.push(name.text.clone());
            self.method_rest();
        } else {
            self.summary.variable_names.push(name.text.clone());
            self.field_rest();
        }
    }

    /// Parameters, throws clause and body (or `;`) of a method.
    fn method_rest(&mut self) {
        self.parameters();
        while !self.eof() && !self.at("{") && !self.at(";") {
            if self.at("(") {
                self.skip_group();
            } else {
                self.pos += 1;
            }
        }
        if self.at("{") {
            self.block_body();
        } else {
            self.eat(";");
        }
    }

    /// `( p1, p2 )`: each parameter becomes a SingleVariableDeclaration.
    fn parameters(&mut self) {
        if !self.eat("(") {
            return;
        }
        loop {
            if self.eof() {
                self.diag("unterminated parameter list");
                return;
            }
            if self.eat(")") {
                return;
            }
            let first = self.pos;
            let mut angle = 0i32;
            let mut last_ident = None;
            while let Some(t) = self.peek() {
                if angle == 0 && (t.is(",") || t.is(")")) {
                    break;
                }
                if t.is("<") {
                    angle += 1;
                } else if t.is(">") {
                    angle -= 1;
                } else if t.is("(") || t.is("[") {
                    self.skip_group();
                    continue;
                } else if t.kind == TokKind::Ident {
                    last_ident = Some(t.text.clone());
                }
                self.pos += 1;
            }
            if self.pos > first {
                self.record("SingleVariableDeclaration", first, self.pos - 1);
                if let Some(n) = last_ident {
                    self.summary.variable_names.push(n);
                }
            }
            self.eat(",");
        }
    }

    /// Declarators after a field name: `[= init] {, name [= init]} ;`
    fn field_rest(&mut self) {
        loop {
            while self.at("[") {
                self.skip_group();
            }
            if self.eat("=") {
                let first = self.pos;
                self.expression(&[",", ";"]);
                if self.pos > first {
                    let kind = classify_expression(&self.toks[first..self.pos]);
                    self.record(kind, first, self.pos - 1);
                }
            }
            if self.eat(",") {
                if let Some(t) = self.peek().filter(|t| t.kind == TokKind::Ident) {
                    self.summary.variable_names.push(t.text.clone());
                    self.pos += 1;
                }
                continue;
            }
            if !self.eat(";") {
                self.diag("expected `;` after field declaration");
                self.recover();
            }
            return;
        }
    }

    /// Skips `<...>` type arguments, tracking nesting.
    fn type_arguments(&mut self) {
        let mut depth = 0;
        while let Some(t) = self.peek() {
            if t.is("<") {
                depth += 1;
            } else if t.is(">") {
                depth -= 1;
            } else if t.is(";") || t.is("{") || t.is("}") {
                return;
            }
            self.pos += 1;
            if depth == 0 {
                return;
            }
        }
    }

    /// Skips a type: `Ident(.Ident)*[<..>]([])*[...]`. Returns false if none.
    fn skip_type(&mut self) -> bool {
        while self.at("@") {
            self.annotation();
        }
        if !self.at_ident() || self.peek().is_some_and(|t| NOT_A_TYPE.contains(&t.text.as_str())) {
            return false;
        }
        self.pos += 1;
        loop {
            if self.at("<") {
                self.type_arguments();
            } else if (self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokKind::Ident))
                || (self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")))
            {
                // `.Name` qualifier or `[]` dimension
                self.pos += 2;
            } else if self.at("...") {
                self.pos += 1;
            } else {
                return true;
            }
        }
    }

    /// `{ statements }` without emitting a record for the block itself.
    fn block_body(&mut self) {
        self.pos += 1; // {
        while !self.eof() && !self.at("}") {
            self.statement();
        }
        if !self.eat("}") {
            self.diag("unterminated block");
        }
    }

    fn paren_expression(&mut self) {
        if self.at("(") {
            self.pos += 1;
            self.expression(&[")"]);
            self.eat(")");
        } else {
            self.diag("expected `(`");
        }
    }

    fn statement(&mut self) {
        let Some(t) = self.peek() else { return };
        let text = t.text.as_str();
        if t.kind == TokKind::Punct {
            match text {
                "{" => return self.block_body(),
                ";" => {
                    let r = self.open("EmptyStatement");
                    self.pos += 1;
                    return self.close(r);
                }
                "}" => {
                    self.diag("unexpected `}`");
                    self.pos += 1;
                    return;
                }
                "@" => {}
                _ => return self.simple_statement(),
            }
        }
        if t.kind != TokKind::Ident && t.kind != TokKind::Punct {
            return self.simple_statement();
        }
        let next_is = |s: &str| self.peek_at(1).is_some_and(|n| n.is(s));
        match text {
            "if" => {
                let r = self.open("IfStatement");
                self.pos += 1;
                self.paren_expression();
                self.statement();
                if self.eat("else") {
                    self.statement();
                }
                self.close(r);
            }
            "for" => {
                let enhanced = self.for_header_is_enhanced();
                let r = self.open(if enhanced {
                    "EnhancedForStatement"
                } else {
                    "ForStatement"
                });
                self.pos += 1;
                self.paren_expression();
                self.statement();
                self.close(r);
            }
            "while" => {
                let r = self.open("WhileStatement");
                self.pos += 1;
                self.paren_expression();
                self.statement();
                self.close(r);
            }
            "do" => {
                let r = self.open("DoStatement");
                self.pos += 1;
                self.statement();
                if self.eat("while") {
                    self.paren_expression();
                } else {
                    self.diag("expected `while` after do body");
                }
                self.eat(";");
                self.close(r);
            }
            "try" => self.try_statement(),
            "switch" => self.switch_statement(),
            "synchronized" if next_is("(") => {
                let r = self.open("SynchronizedStatement");
                self.pos += 1;
                self.paren_expression();
                if self.at("{") {
                    self.block_body();
                }
                self.close(r);
            }
            "return" => self.keyword_statement("ReturnStatement"),
            "throw" => self.keyword_statement("ThrowStatement"),
            "break" => self.keyword_statement("BreakStatement"),
            "continue" => self.keyword_statement("ContinueStatement"),
            "assert" => self.keyword_statement("AssertStatement"),
            "this" if next_is("(") => self.keyword_statement("ConstructorInvocation"),
            "super" if next_is("(") => self.keyword_statement("SuperConstructorInvocation"),
            "else" | "catch" | "finally" | "case" => {
                self.diag(format!("dangling `{text}`"));
                self.pos += 1;
            }
            _ if t.kind == TokKind::Ident && next_is(":") && !NOT_A_TYPE.contains(&text) => {
                let r = self.open("LabeledStatement");
                self.pos += 2;
                self.statement();
                self.close(r);
            }
            _ => {
                if self.local_type_ahead() {
                    let r = self.open("TypeDeclarationStatement");
                    self.type_declaration();
                    self.close(r);
                } else {
                    self.simple_statement();
                }
            }
        }
    }

    fn keyword_statement(&mut self, kind: &'static str) {
        let r = self.open(kind);
        self.pos += 1;
        self.expression(&[";"]);
        if !self.eat(";") {
            self.diag(format!("expected `;` to end {kind}"));
        }
        self.close(r);
    }

    fn local_type_ahead(&self) -> bool {
        let mut i = self.pos;
        while let Some(t) = self.toks.get(i) {
            if MODIFIERS.contains(&t.text.as_str()) {
                i += 1;
            } else if t.is("@") {
                // annotation name (and arguments are not scanned here)
                i += 2;
            } else {
                return TYPE_KEYWORDS.contains(&t.text.as_str())
                    && self.toks.get(i + 1).is_some_and(|n| n.kind == TokKind::Ident);
            }
        }
        false
    }

    fn for_header_is_enhanced(&self) -> bool {
        let mut i = self.pos + 1;
        if !self.toks.get(i).is_some_and(|t| t.is("(")) {
            return false;
        }
        let mut depth = 0;
        while let Some(t) = self.toks.get(i) {
            if t.is("(") || t.is("[") || t.is("{") {
                depth += 1;
            } else if t.is(")") || t.is("]") || t.is("}") {
                depth -= 1;
                if depth == 0 {
                    return false;
                }
            } else if depth == 1 && t.is(";") {
                return false;
            } else if depth == 1 && t.is(":") {
                return true;
            }
            i += 1;
        }
        false
    }

    fn try_statement(&mut self) {
        let r = self.open("TryStatement");
        self.pos += 1;
        if self.at("(") {
            self.skip_group();
        }
        if self.at("{") {
            self.block_body();
        } else {
            self.diag("expected `{` after try");
        }
        while self.eat("catch") {
            self.parameters();
            if self.at("{") {
                self.block_body();
            }
        }
        if self.eat("finally") && self.at("{") {
            self.block_body();
        }
        self.close(r);
    }

    fn switch_statement(&mut self) {
        let r = self.open("SwitchStatement");
        self.pos += 1;
        self.paren_expression();
        if !self.at("{") {
            self.diag("expected `{` after switch");
            self.close(r);
            return;
        }
        self.pos += 1;
        while !self.eof() && !self.at("}") {
            if self.at("case") || self.at("default") {
                let c = self.open("SwitchCase");
                self.pos += 1;
                self.expression(&[":", "->"]);
                let arrow = self.at("->");
                self.close(c);
                self.pos += 1;
                if arrow {
                    self.statement();
                }
            } else {
                self.statement();
            }
        }
        self.eat("}");
        self.close(r);
    }

    /// Expression or local variable declaration statement.
    fn simple_statement(&mut self) {
        let kind = if self.local_variable_ahead() {
            "VariableDeclarationStatement"
        } else {
            "ExpressionStatement"
        };
        let r = self.open(kind);
        if kind == "VariableDeclarationStatement" {
            self.collect_local_names();
        }
        let before = self.pos;
        self.expression(&[";"]);
        if !self.eat(";") {
            self.diag("expected `;`");
            if self.pos == before {
                self.pos += 1;
            }
        }
        self.close(r);
    }

    fn local_variable_ahead(&self) -> bool {
        let mut probe = Parser {
            toks: self.toks,
            pos: self.pos,
            file: self.file,
            raw: Vec::new(),
            diags: Vec::new(),
            summary: FileSummary::default(),
        };
        while probe.at("final") || probe.at("@") {
            if probe.at("@") {
                probe.annotation();
            } else {
                probe.pos += 1;
            }
        }
        if !probe.skip_type() {
            return false;
        }
        probe.at_ident()
            && probe
                .peek_at(1)
                .is_some_and(|t| t.is("=") || t.is(";") || t.is(",") || t.is("[") || t.is(":"))
    }

    fn collect_local_names(&mut self) {
        let mut i = self.pos;
        let mut depth = 0;
        while let Some(t) = self.toks.get(i) {
            if t.is("(") || t.is("[") || t.is("{") {
                depth += 1;
            } else if t.is(")") || t.is("]") || t.is("}") {
                depth -= 1;
            } else if depth == 0 && t.is(";") {
                break;
            } else if depth == 0
                && t.kind == TokKind::Ident
                && self
                    .toks
                    .get(i + 1)
                    .is_some_and(|n| n.is("=") || n.is(";") || n.is(","))
            {
                self.summary.variable_names.push(t.text.clone());
            }
            i += 1;
        }
    }

    /// Consumes an expression up to (not including) a terminator at depth
    /// zero, descending into anonymous class bodies and lambda blocks.
    fn expression(&mut self, terminators: &[&str]) {
        let mut depth = 0i32;
        let mut angle = 0i32;
        while let Some(t) = self.peek() {
            // a stray `<` (e.g. `MAX < n`) must not swallow the statement end
            if depth == 0 && (angle == 0 || t.is(";")) && terminators.iter().any(|s| t.is(s)) {
                return;
            }
            if t.is("}") && depth == 0 {
                return;
            }
            match t.text.as_str() {
                "(" | "[" if t.kind == TokKind::Punct => depth += 1,
                ")" | "]" if t.kind == TokKind::Punct => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                "<" if t.kind == TokKind::Punct && self.looks_generic() => angle += 1,
                ">" if t.kind == TokKind::Punct && angle > 0 => angle -= 1,
                "{" if t.kind == TokKind::Punct => {
                    let prev = self.pos.checked_sub(1).map(|i| &self.toks[i]);
                    if prev.is_some_and(|p| p.is("->")) {
                        self.block_body();
                    } else if prev.is_some_and(|p| p.is(")")) && self.follows_new() {
                        let r = self.open("AnonymousClassDeclaration");
                        self.class_body(false);
                        self.close(r);
                    } else {
                        self.skip_group();
                    }
                    continue;
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    /// `<` directly after a capitalized identifier or `.` opens type arguments.
    fn looks_generic(&self) -> bool {
        let Some(prev) = self.pos.checked_sub(1).map(|i| &self.toks[i]) else {
            return false;
        };
        prev.is(".")
            || (prev.kind == TokKind::Ident
                && prev.text.chars().next().is_some_and(char::is_uppercase)
                && !self.peek_at(1).is_some_and(|t| t.kind == TokKind::Number))
    }

    /// Whether the `)` before the current `{` closes the arguments of a `new` expression.
    fn follows_new(&self) -> bool {
        let mut i = self.pos - 1; // the `)`
        let mut depth = 0;
        loop {
            let t = &self.toks[i];
            if t.is(")") {
                depth += 1;
            } else if t.is("(") {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            if i == 0 {
                return false;
            }
            i -= 1;
        }
        // walk back over the type name: Ident(.Ident)*<...>
        let mut j = i;
        let mut angle = 0;
        while j > 0 {
            j -= 1;
            let t = &self.toks[j];
            if t.is("new") {
                return angle == 0;
            }
            if t.is(">") {
                angle += 1;
            } else if t.is("<") {
                angle -= 1;
            } else if !(t.kind == TokKind::Ident || t.is(".") || t.is(",") || angle > 0) {
                return false;
            }
        }
        false
    }
}

/// Names the top-level shape of an expression with a catalog kind.
pub(crate) fn classify_expression(toks: &[Token]) -> &'static str {
    if toks.is_empty() {
        return "SimpleName";
    }
    if toks.len() == 1 {
        let t = &toks[0];
        return match t.kind {
            TokKind::Number => "NumberLiteral",
            TokKind::Str => "StringLiteral",
            TokKind::Char => "CharacterLiteral",
            _ => match t.text.as_str() {
                "true" | "false" => "BooleanLiteral",
                "null" => "NullLiteral",
                "this" => "ThisExpression",
                _ => "SimpleName",
            },
        };
    }

    // operators at nesting depth zero
    let mut depth = 0;
    let mut top: Vec<(usize, &str)> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        match t.text.as_str() {
            "(" | "[" | "{" if t.kind == TokKind::Punct => depth += 1,
            ")" | "]" | "}" if t.kind == TokKind::Punct => depth -= 1,
            _ if depth == 0 && (t.kind == TokKind::Punct || t.is("instanceof")) => top.push((i, t.text.as_str())),
            _ => {}
        }
    }
    let has = |op: &str| top.iter().any(|(_, o)| *o == op);
    const ASSIGN: &[&str] = &[
        "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=",
    ];
    const INFIX: &[&str] = &[
        "+", "-", "*", "/", "%", "&&", "||", "==", "!=", "<=", ">=", "&", "|", "^", "<", ">",
    ];

    if has("->") {
        return "LambdaExpression";
    }
    if top.iter().any(|(_, o)| ASSIGN.contains(o)) {
        return "Assignment";
    }
    if has("?") {
        return "ConditionalExpression";
    }
    let first = &toks[0];
    let last = &toks[toks.len() - 1];
    if first.is("new") {
        let generic_only = top.iter().all(|(_, o)| matches!(*o, "." | "<" | ">" | ","));
        if generic_only {
            let bracket = toks.iter().position(|t| t.is("["));
            let paren = toks.iter().position(|t| t.is("("));
            return match (bracket, paren) {
                (Some(b), Some(p)) if b < p => "ArrayCreation",
                (Some(_), None) => "ArrayCreation",
                _ => "ClassInstanceCreation",
            };
        }
    }
    if has("instanceof") {
        return "InstanceofExpression";
    }
    if top.iter().any(|(i, o)| *i > 0 && INFIX.contains(o)) && !(first.is("new")) {
        return "InfixExpression";
    }
    if first.is("{") {
        return "ArrayInitializer";
    }
    if has("::") {
        return if first.is("super") {
            "SuperMethodReference"
        } else if toks.last().is_some_and(|t| t.is("new")) {
            "CreationReference"
        } else {
            "ExpressionMethodReference"
        };
    }
    if matches!(first.text.as_str(), "!" | "-" | "+" | "~" | "++" | "--") && first.kind == TokKind::Punct {
        return "PrefixExpression";
    }
    if last.is("++") || last.is("--") {
        return "PostfixExpression";
    }
    if first.is("(") {
        let close = matching(toks, 0);
        return if close == Some(toks.len() - 1) {
            "ParenthesizedExpression"
        } else {
            "CastExpression"
        };
    }
    if last.is(")") {
        return if first.is("super") {
            "SuperMethodInvocation"
        } else if first.is("new") {
            "ClassInstanceCreation"
        } else {
            "MethodInvocation"
        };
    }
    if last.is("]") {
        return if first.is("new") {
            "ArrayCreation"
        } else {
            "ArrayAccess"
        };
    }
    if last.is("class") {
        return "TypeLiteral";
    }
    if first.is("this") {
        return "FieldAccess";
    }
    if first.is("super") {
        return "SuperFieldAccess";
    }
    if toks.iter().all(|t| t.kind == TokKind::Ident || t.is(".")) {
        return "QualifiedName";
    }
    "MethodInvocation"
}

fn matching(toks: &[Token], open: usize) -> Option<usize> {
    let mut depth = 0;
    for (i, t) in toks.iter().enumerate().skip(open) {
        if t.is("(") {
            depth += 1;
        } else if t.is(")") {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}
