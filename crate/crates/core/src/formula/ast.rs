use std::fmt;

use serde::Serialize;

/// Which operator a `K` refers to: the model's only operator, or stage `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Default,
    Index(u8),
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Default => f.write_str("K"),
            Stage::Index(i) => write!(f, "K{i}"),
        }
    }
}

impl Serialize for Stage {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.as_bytes() {
            b"K" => Ok(Stage::Default),
            [b'K', d @ b'0'..=b'9'] => Ok(Stage::Index(d - b'0')),
            _ => Err(format!("invalid stage tag {s:?}; expected K or K0..K9")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Name(String),
    Omega,
    Empty,
    /// `{a,b}`; never empty (`{}` parses as [`Expr::Empty`]).
    Literal(Vec<String>),
    Know(Stage, Box<Expr>),
    Not(Box<Expr>),
    Diff(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn name(s: &str) -> Expr {
        Expr::Name(s.to_owned())
    }

    pub fn know(self) -> Expr {
        Expr::Know(Stage::Default, Box::new(self))
    }

    pub fn know_at(self, stage: u8) -> Expr {
        Expr::Know(Stage::Index(stage), Box::new(self))
    }

    pub fn diff(self, rhs: Expr) -> Expr {
        Expr::Diff(Box::new(self), Box::new(rhs))
    }

    pub fn and(self, rhs: Expr) -> Expr {
        Expr::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Expr) -> Expr {
        Expr::Or(Box::new(self), Box::new(rhs))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            Expr::Diff(..) => 3,
            Expr::Know(..) | Expr::Not(..) => 4,
            _ => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Name(n) => f.write_str(n)?,
            Expr::Omega => f.write_str("Omega")?,
            Expr::Empty => f.write_str("{}")?,
            Expr::Literal(labels) => write!(f, "{{{}}}", labels.join(","))?,
            Expr::Know(stage, child) => {
                write!(f, "{stage} ")?;
                child.write(f, 4)?;
            }
            Expr::Not(child) => {
                f.write_str("~")?;
                child.write(f, 4)?;
            }
            Expr::Diff(l, r) => binary(f, l, " \\ ", r, 3)?,
            Expr::And(l, r) => binary(f, l, " & ", r, 2)?,
            Expr::Or(l, r) => binary(f, l, " | ", r, 1)?,
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Binary operators are left-associative: the right operand needs
/// parentheses at equal precedence, the left does not.
fn binary(f: &mut fmt::Formatter<'_>, l: &Expr, op: &str, r: &Expr, prec: u8) -> fmt::Result {
    l.write(f, prec)?;
    f.write_str(op)?;
    r.write(f, prec + 1)
}

/// Minimal-parentheses rendering that parses back to the same tree.
impl std::ops::Not for Expr {
    type Output = Expr;

    fn not(self) -> Expr {
        Expr::Not(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryRel {
    Subseteq,
    NotSubseteq,
    Equals,
    ProperSubset,
    Disjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnaryRel {
    Empty,
    Nonempty,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Assertion {
    Binary(BinaryRel, Expr, Expr),
    Unary(UnaryRel, Expr),
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Binary(BinaryRel::Disjoint, l, r) => write!(f, "disjoint({l}, {r})"),
            Assertion::Binary(rel, l, r) => {
                let op = match rel {
                    BinaryRel::Subseteq => "<=",
                    BinaryRel::NotSubseteq => "!<=",
                    BinaryRel::Equals => "==",
                    BinaryRel::ProperSubset => "<",
                    BinaryRel::Disjoint => unreachable!(),
                };
                write!(f, "{l} {op} {r}")
            }
            Assertion::Unary(UnaryRel::Empty, e) => write!(f, "empty({e})"),
            Assertion::Unary(UnaryRel::Nonempty, e) => write!(f, "nonempty({e})"),
        }
    }
}
