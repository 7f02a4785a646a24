//! Canonical concrete syntax, printed with the fewest parentheses the
//! parser needs to read the term back.

use std::fmt::{self, Display, Formatter, Write};

use super::{Label, Process, Relabelling, Term};

/// Binding strength of the outermost operator.
pub(crate) const CHOICE: u8 = 0;
pub(crate) const PAR: u8 = 1;
pub(crate) const POSTFIX: u8 = 2;
pub(crate) const PREFIX: u8 = 3;
pub(crate) const ATOM: u8 = 4;

impl Display for Label {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Label::Hand(c) => write!(f, "{c}"),
            Label::CoHand(c) => write!(f, "'{c}"),
            Label::Tau => f.write_str("tau"),
            Label::Send(b) => write!(f, "{b}!"),
            Label::Receive(b) => write!(f, "{b}?"),
            Label::Discard(b) => write!(f, "{b}:"),
            Label::Read(s) => write!(f, "{s}"),
            Label::Emit(s) => write!(f, "'{s}"),
        }
    }
}

impl Display for Relabelling {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('[')?;
        for (i, (a, b)) in self.entries().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        f.write_char(']')
    }
}

pub(crate) fn write_name_set<'a>(
    f: &mut Formatter<'_>,
    names: impl IntoIterator<Item = &'a super::Name>,
) -> fmt::Result {
    f.write_str("\\{")?;
    for (i, n) in names.into_iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{n}")?;
    }
    f.write_char('}')
}

impl Process {
    pub(crate) fn precedence(&self) -> u8 {
        match self.term() {
            Term::Nil | Term::Agent(_) => ATOM,
            Term::Prefix(..) => PREFIX,
            Term::Restrict(..) | Term::Relabel(..) | Term::Signal(..) => POSTFIX,
            Term::Par(..) => PAR,
            Term::Choice(..) => CHOICE,
        }
    }

    pub(crate) fn write_at(&self, f: &mut Formatter<'_>, level: u8) -> fmt::Result {
        if self.precedence() < level {
            f.write_char('(')?;
            self.write_at(f, CHOICE)?;
            return f.write_char(')');
        }
        match self.term() {
            Term::Nil => f.write_char('0'),
            Term::Agent(a) => write!(f, "{a}"),
            Term::Prefix(l, p) => {
                write!(f, "{l}.")?;
                p.write_at(f, PREFIX)
            }
            Term::Choice(l, r) => {
                l.write_at(f, CHOICE)?;
                f.write_str(" + ")?;
                r.write_at(f, PAR)
            }
            Term::Par(l, r) => {
                l.write_at(f, PAR)?;
                f.write_str(" | ")?;
                r.write_at(f, POSTFIX)
            }
            Term::Restrict(p, set) => {
                p.write_at(f, POSTFIX)?;
                write_name_set(f, set)
            }
            Term::Relabel(p, rel) => {
                p.write_at(f, POSTFIX)?;
                write!(f, "{rel}")
            }
            Term::Signal(p, s) => {
                p.write_at(f, POSTFIX)?;
                write!(f, " ^ {s}")
            }
        }
    }
}

impl Display for Process {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        self.write_at(f, CHOICE)
    }
}
