use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Atom, Expr};

/// Output format for [`render`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// The text grammar, minimally parenthesized.
    Ascii,
    /// `{"atom": NAME} | {"arrow": [E, E]} | {"meet": [E, E]}`.
    Json,
}

pub fn render(e: &Expr, format: Format) -> String {
    match format {
        Format::Ascii => {
            let mut out = String::new();
            write_arrow(e, &mut out);
            out
        }
        Format::Json => serde_json::to_string(e).expect("expression serialization is infallible"),
    }
}

// Parenthesization mirrors the grammar levels: `arrow` accepts anything,
// `meet` operands must not be arrows, and right meet operands must not be
// meets either so the left-nested parse is reproduced.
fn write_arrow(e: &Expr, out: &mut String) {
    match e {
        Expr::Arrow(a, b) => {
            if a.is_arrow() {
                write_parens(a, out);
            } else {
                write_arrow(a, out);
            }
            out.push_str(" -> ");
            write_arrow(b, out);
        }
        _ => write_meet(e, out),
    }
}

fn write_meet(e: &Expr, out: &mut String) {
    match e {
        Expr::Meet(a, b) => {
            if a.is_arrow() {
                write_parens(a, out);
            } else {
                write_meet(a, out);
            }
            out.push_str(" & ");
            if b.is_atom() {
                write_meet(b, out);
            } else {
                write_parens(b, out);
            }
        }
        Expr::Atom(atom) => out.push_str(atom.name()),
        Expr::Arrow(..) => write_parens(e, out),
    }
}

fn write_parens(e: &Expr, out: &mut String) {
    out.push('(');
    write_arrow(e, out);
    out.push(')');
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Repr {
    Atom(String),
    Arrow(Box<Repr>, Box<Repr>),
    Meet(Box<Repr>, Box<Repr>),
}

impl From<&Expr> for Repr {
    fn from(e: &Expr) -> Self {
        match e {
            Expr::Atom(a) => Repr::Atom(a.name().to_string()),
            Expr::Arrow(a, b) => Repr::Arrow(Box::new((&**a).into()), Box::new((&**b).into())),
            Expr::Meet(a, b) => Repr::Meet(Box::new((&**a).into()), Box::new((&**b).into())),
        }
    }
}

impl TryFrom<Repr> for Expr {
    type Error = String;

    fn try_from(r: Repr) -> Result<Self, Self::Error> {
        Ok(match r {
            Repr::Atom(name) => {
                Expr::Atom(Atom::new(&name).map_err(|_| format!("invalid atom name `{name}`"))?)
            }
            Repr::Arrow(a, b) => Expr::arrow((*a).try_into()?, (*b).try_into()?),
            Repr::Meet(a, b) => Expr::meet((*a).try_into()?, (*b).try_into()?),
        })
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Repr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Repr::deserialize(deserializer)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        Atom::new(&name).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn a(n: &str) -> Expr {
        Expr::atom(n)
    }

    #[test]
    fn ascii_examples() {
        assert_eq!(render(&Expr::at(), Format::Ascii), "@");
        assert_eq!(
            render(&Expr::arrow(a("a"), Expr::meet(a("b"), a("c"))), Format::Ascii),
            "a -> b & c"
        );
        assert_eq!(
            render(
                &Expr::meet(Expr::arrow(a("c"), a("a")), Expr::arrow(a("c"), a("b"))),
                Format::Ascii
            ),
            "(c -> a) & (c -> b)"
        );
        assert_eq!(
            render(&Expr::meet(a("a"), Expr::meet(a("b"), a("c"))), Format::Ascii),
            "a & (b & c)"
        );
        assert_eq!(
            render(&Expr::arrow(Expr::arrow(a("a"), a("b")), a("c")), Format::Ascii),
            "(a -> b) -> c"
        );
    }

    #[test]
    fn json_shape() {
        let x = parse("a -> b & @").unwrap();
        let json = render(&x, Format::Json);
        assert_eq!(
            json,
            r#"{"arrow":[{"atom":"a"},{"meet":[{"atom":"b"},{"atom":"@"}]}]}"#
        );
        let back: Expr = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<Expr>(r#"{"atom":"Bad"}"#).is_err());
        assert!(serde_json::from_str::<Expr>(r#"{"arrow":[{"atom":"a"}]}"#).is_err());
    }
}
