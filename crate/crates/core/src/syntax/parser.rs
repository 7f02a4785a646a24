use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Declarations, Label, Name, NameClass, Process, Relabelling};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    UnknownIdentifier,
    NameClassClash,
    IllTypedRestriction,
    IllTypedAction,
    DuplicateDefinition,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnknownIdentifier => "unknown identifier",
            ParseErrorKind::NameClassClash => "name class clash",
            ParseErrorKind::IllTypedRestriction => "ill-typed restriction",
            ParseErrorKind::IllTypedAction => "ill-typed action",
            ParseErrorKind::DuplicateDefinition => "duplicate definition",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

/// A parsed input file.
#[derive(Clone, Debug, Default)]
pub struct Document {
    pub decls: Declarations,
    /// Definitions in file order.
    pub terms: Vec<(Name, Process)>,
}

impl Document {
    pub fn term(&self, name: &str) -> Option<&Process> {
        self.terms
            .iter()
            .find(|(n, _)| n.as_str() == name)
            .map(|(_, p)| p)
    }

    /// The state a definition denotes: the agent identifier itself when the
    /// definition is used recursively, its body otherwise.
    pub fn state(&self, name: &str) -> Option<Process> {
        let body = self.term(name)?;
        let n = Name::new(name);
        if self.decls.referenced_agents().contains(&n) {
            Some(Process::agent(n))
        } else {
            Some(body.clone())
        }
    }

    /// Parses a single process expression against this document's
    /// declarations, e.g. a term given on the command line.
    pub fn parse_process(&self, text: &str) -> Result<Process, ParseError> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let raw = p.choice()?;
        p.expect_end()?;
        let known: BTreeSet<Name> = self.decls.agents.keys().cloned().collect();
        resolve(&raw, &self.decls, &known)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Zero,
    Semi,
    Define,
    Dot,
    Plus,
    Bar,
    Backslash,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Arrow,
    Comma,
    Caret,
    Quote,
    Bang,
    Question,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Define => f.write_str("`:=`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::Quote => f.write_str("`'`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Question => f.write_str("`?`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

fn err(pos: Pos, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        col: pos.col,
        kind,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        bump(&mut chars);
        let tok = match c {
            '0' => {
                if chars.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                    return Err(err(
                        pos,
                        ParseErrorKind::Lexical,
                        "identifiers cannot start with a digit",
                    ));
                }
                Tok::Zero
            }
            ';' => Tok::Semi,
            ':' => {
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    Tok::Define
                } else {
                    return Err(err(pos, ParseErrorKind::Lexical, "expected `:=`"));
                }
            }
            '-' => {
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Arrow
                } else {
                    return Err(err(pos, ParseErrorKind::Lexical, "expected `->`"));
                }
            }
            '.' => Tok::Dot,
            '+' => Tok::Plus,
            '|' => Tok::Bar,
            '\\' => Tok::Backslash,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '^' => Tok::Caret,
            '\'' => Tok::Quote,
            '!' => Tok::Bang,
            '?' => Tok::Question,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(err(
                    pos,
                    ParseErrorKind::Lexical,
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        out.push((tok, pos));
    }
    out.push((Tok::End, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RawAct {
    Plain,
    Co,
    Send,
    Receive,
}

#[derive(Clone, Debug)]
enum Raw {
    Nil,
    Tau(Box<Raw>),
    Prefix(RawAct, String, Pos, Box<Raw>),
    Choice(Box<Raw>, Box<Raw>),
    Par(Box<Raw>, Box<Raw>),
    Restrict(Box<Raw>, Vec<(String, Pos)>),
    Relabel(Box<Raw>, Vec<((String, Pos), (String, Pos))>),
    Signal(Box<Raw>, String, Pos),
    Agent(String, Pos),
}

enum Stmt {
    Decl(NameClass, Vec<(String, Pos)>),
    Def(String, Pos, Raw),
}

struct Parser {
    tokens: Vec<(Tok, Pos)>,
    pos: usize,
}

fn is_agent_ident(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> Pos {
        self.tokens[self.pos].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.tokens[self.pos].clone();
        if t.0 != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, what: &str) -> ParseError {
        err(
            self.here(),
            ParseErrorKind::Syntax,
            format!("expected {what}, found {}", self.peek()),
        )
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Pos, ParseError> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn name(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_agent_ident(&s) && s != "tau" => {
                let p = self.next().1;
                Ok((s, p))
            }
            _ => Err(self.unexpected("a lowercase name")),
        }
    }

    fn name_list(&mut self, close: Option<Tok>) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut names = Vec::new();
        if close.as_ref() == Some(self.peek()) {
            return Ok(names);
        }
        names.push(self.name()?);
        while *self.peek() == Tok::Comma {
            self.next();
            names.push(self.name()?);
        }
        Ok(names)
    }

    fn document(&mut self) -> Result<Vec<Stmt>, ParseError> {
        let mut stmts = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::End => return Ok(stmts),
                Tok::Semi => {
                    self.next();
                }
                Tok::Ident(s) => {
                    let class = match s.as_str() {
                        "handshake" => Some(NameClass::Handshake),
                        "broadcast" => Some(NameClass::Broadcast),
                        "signal" => Some(NameClass::Signal),
                        _ => None,
                    };
                    if let Some(class) = class {
                        self.next();
                        let names = self.name_list(None)?;
                        stmts.push(Stmt::Decl(class, names));
                    } else if is_agent_ident(&s) {
                        let pos = self.next().1;
                        self.expect(Tok::Define, "`:=`")?;
                        let body = self.choice()?;
                        stmts.push(Stmt::Def(s, pos, body));
                    } else {
                        return Err(
                            self.unexpected("a declaration or an uppercase definition name")
                        );
                    }
                    if *self.peek() != Tok::End {
                        self.expect(Tok::Semi, "`;`")?;
                    }
                }
                _ => return Err(self.unexpected("a declaration or definition")),
            }
        }
    }

    fn choice(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.par()?;
        while *self.peek() == Tok::Plus {
            self.next();
            let right = self.par()?;
            left = Raw::Choice(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn par(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.postfix()?;
        while *self.peek() == Tok::Bar {
            self.next();
            let right = self.postfix()?;
            left = Raw::Par(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Raw, ParseError> {
        let mut p = self.prefixed()?;
        loop {
            match self.peek() {
                Tok::Backslash => {
                    self.next();
                    self.expect(Tok::LBrace, "`{`")?;
                    let names = self.name_list(Some(Tok::RBrace))?;
                    self.expect(Tok::RBrace, "`}`")?;
                    p = Raw::Restrict(Box::new(p), names);
                }
                Tok::LBracket => {
                    self.next();
                    let mut renames = Vec::new();
                    if *self.peek() != Tok::RBracket {
                        loop {
                            let from = self.name()?;
                            self.expect(Tok::Arrow, "`->`")?;
                            let to = self.name()?;
                            renames.push((from, to));
                            if *self.peek() == Tok::Comma {
                                self.next();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                    p = Raw::Relabel(Box::new(p), renames);
                }
                Tok::Caret => {
                    self.next();
                    let (s, pos) = self.name()?;
                    p = Raw::Signal(Box::new(p), s, pos);
                }
                _ => return Ok(p),
            }
        }
    }

    fn prefixed(&mut self) -> Result<Raw, ParseError> {
        match self.peek().clone() {
            Tok::Zero => {
                self.next();
                Ok(Raw::Nil)
            }
            Tok::LParen => {
                self.next();
                let p = self.choice()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            Tok::Quote => {
                self.next();
                let (n, pos) = self.name()?;
                self.expect(Tok::Dot, "`.` after an action")?;
                let body = self.prefixed()?;
                Ok(Raw::Prefix(RawAct::Co, n, pos, Box::new(body)))
            }
            Tok::Ident(s) if s == "tau" => {
                self.next();
                self.expect(Tok::Dot, "`.` after an action")?;
                let body = self.prefixed()?;
                Ok(Raw::Tau(Box::new(body)))
            }
            Tok::Ident(s) if is_agent_ident(&s) => {
                let pos = self.next().1;
                Ok(Raw::Agent(s, pos))
            }
            Tok::Ident(_) => {
                let (n, pos) = self.name()?;
                let kind = match self.peek() {
                    Tok::Bang => {
                        self.next();
                        RawAct::Send
                    }
                    Tok::Question => {
                        self.next();
                        RawAct::Receive
                    }
                    _ => RawAct::Plain,
                };
                self.expect(Tok::Dot, "`.` after an action")?;
                let body = self.prefixed()?;
                Ok(Raw::Prefix(kind, n, pos, Box::new(body)))
            }
            _ => Err(self.unexpected("a process")),
        }
    }
}

fn lookup_class(decls: &Declarations, n: &str, pos: Pos) -> Result<(Name, NameClass), ParseError> {
    let name = Name::new(n);
    match decls.class_of(&name) {
        Some(c) => Ok((name, c)),
        None => Err(err(
            pos,
            ParseErrorKind::UnknownIdentifier,
            format!("name `{n}` is not declared"),
        )),
    }
}

fn resolve(
    raw: &Raw,
    decls: &Declarations,
    agents: &BTreeSet<Name>,
) -> Result<Process, ParseError> {
    Ok(match raw {
        Raw::Nil => Process::nil(),
        Raw::Tau(body) => Process::prefix(Label::Tau, resolve(body, decls, agents)?),
        Raw::Prefix(kind, n, pos, body) => {
            let (name, class) = lookup_class(decls, n, *pos)?;
            let label = match (kind, class) {
                (RawAct::Plain, NameClass::Handshake) => Label::Hand(name),
                (RawAct::Co, NameClass::Handshake) => Label::CoHand(name),
                (RawAct::Plain, NameClass::Signal) => Label::Read(name),
                (RawAct::Send, NameClass::Broadcast) => Label::Send(name),
                (RawAct::Receive, NameClass::Broadcast) => Label::Receive(name),
                (RawAct::Co, NameClass::Signal) => {
                    return Err(err(
                        *pos,
                        ParseErrorKind::IllTypedAction,
                        format!("signal emission '{n} cannot be used as a prefix; use `^ {n}`"),
                    ))
                }
                (k, c) => {
                    return Err(err(
                        *pos,
                        ParseErrorKind::IllTypedAction,
                        format!(
                            "{c} name `{n}` cannot be used as {}",
                            match k {
                                RawAct::Plain => "a plain action",
                                RawAct::Co => "a co-action",
                                RawAct::Send => "a broadcast send",
                                RawAct::Receive => "a broadcast receive",
                            }
                        ),
                    ))
                }
            };
            Process::prefix(label, resolve(body, decls, agents)?)
        }
        Raw::Choice(l, r) => {
            Process::choice(resolve(l, decls, agents)?, resolve(r, decls, agents)?)
        }
        Raw::Par(l, r) => Process::par(resolve(l, decls, agents)?, resolve(r, decls, agents)?),
        Raw::Restrict(p, names) => {
            let mut set = BTreeSet::new();
            for (n, pos) in names {
                let (name, class) = lookup_class(decls, n, *pos)?;
                if class == NameClass::Broadcast {
                    return Err(err(
                        *pos,
                        ParseErrorKind::IllTypedRestriction,
                        format!("broadcast name `{n}` cannot be restricted"),
                    ));
                }
                set.insert(name);
            }
            Process::restrict(resolve(p, decls, agents)?, set)
        }
        Raw::Relabel(p, renames) => {
            let mut f = Relabelling::identity();
            for ((from, fpos), (to, tpos)) in renames {
                let (a, ca) = lookup_class(decls, from, *fpos)?;
                let (b, cb) = lookup_class(decls, to, *tpos)?;
                if ca != cb {
                    return Err(err(
                        *tpos,
                        ParseErrorKind::NameClassClash,
                        format!("cannot rename {ca} name `{from}` to {cb} name `{to}`"),
                    ));
                }
                let map = match ca {
                    NameClass::Handshake => &mut f.handshake,
                    NameClass::Broadcast => &mut f.broadcast,
                    NameClass::Signal => &mut f.signal,
                };
                if map.insert(a, b).is_some() {
                    return Err(err(
                        *fpos,
                        ParseErrorKind::Syntax,
                        format!("`{from}` is renamed twice"),
                    ));
                }
            }
            Process::relabel(resolve(p, decls, agents)?, f)
        }
        Raw::Signal(p, s, pos) => {
            let (name, class) = lookup_class(decls, s, *pos)?;
            if class != NameClass::Signal {
                return Err(err(
                    *pos,
                    ParseErrorKind::NameClassClash,
                    format!("`{s}` is a {class} name, not a signal"),
                ));
            }
            Process::signal(resolve(p, decls, agents)?, name)
        }
        Raw::Agent(a, pos) => {
            let name = Name::new(a);
            if !agents.contains(&name) {
                return Err(err(
                    *pos,
                    ParseErrorKind::UnknownIdentifier,
                    format!("agent `{a}` is not defined"),
                ));
            }
            Process::agent(name)
        }
    })
}

/// Parses a document of declarations and definitions.
pub fn parse(text: &str) -> Result<Document, ParseError> {
    let tokens = lex(text)?;
    let stmts = Parser { tokens, pos: 0 }.document()?;

    let mut decls = Declarations::default();
    let mut seen: BTreeMap<String, NameClass> = BTreeMap::new();
    let mut defs: Vec<(Name, Pos, &Raw)> = Vec::new();
    let mut agents = BTreeSet::new();
    for stmt in &stmts {
        match stmt {
            Stmt::Decl(class, names) => {
                for (n, pos) in names {
                    if let Some(prev) = seen.get(n) {
                        let kind = if prev == class {
                            ParseErrorKind::DuplicateDefinition
                        } else {
                            ParseErrorKind::NameClassClash
                        };
                        return Err(err(
                            *pos,
                            kind,
                            format!("`{n}` is already declared as a {prev} name"),
                        ));
                    }
                    seen.insert(n.clone(), *class);
                    let set = match class {
                        NameClass::Handshake => &mut decls.handshake,
                        NameClass::Broadcast => &mut decls.broadcast,
                        NameClass::Signal => &mut decls.signal,
                    };
                    set.insert(Name::new(n));
                }
            }
            Stmt::Def(n, pos, body) => {
                let name = Name::new(n);
                if !agents.insert(name.clone()) {
                    return Err(err(
                        *pos,
                        ParseErrorKind::DuplicateDefinition,
                        format!("`{n}` is defined twice"),
                    ));
                }
                defs.push((name, *pos, body));
            }
        }
    }

    let mut terms = Vec::new();
    for (name, _, raw) in defs {
        let p = resolve(raw, &decls, &agents)?;
        decls.agents.insert(name.clone(), p.clone());
        terms.push((name, p));
    }
    Ok(Document { decls, terms })
}
