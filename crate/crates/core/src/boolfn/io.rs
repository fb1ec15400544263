//! Function spec files.
//!
//! JSON: `{"n": 2, "entries": [["01", 0], ["10", 1]]}`.
//! Text: a first line `n=<int>`, then one `<bits> <value>` per line; `#`
//! starts a comment. Index 1 is the leftmost character in both formats.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_bits, parse_bits, PartialFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseFormat {
    Json,
    Text,
}

/// Wire form of a function; entries are emitted in lexicographic order of
/// their bit strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub n: usize,
    pub entries: Vec<(String, u8)>,
}

impl From<&PartialFunction> for FunctionSpec {
    fn from(f: &PartialFunction) -> Self {
        let mut entries: Vec<(String, u8)> = f
            .entries()
            .iter()
            .map(|&(x, v)| (format_bits(x, f.arity()), v as u8))
            .collect();
        entries.sort();
        FunctionSpec { n: f.arity(), entries }
    }
}

impl TryFrom<FunctionSpec> for PartialFunction {
    type Error = Error;

    fn try_from(spec: FunctionSpec) -> Result<Self> {
        let mut table = Vec::with_capacity(spec.entries.len());
        for (s, v) in spec.entries {
            let v = match v {
                0 => false,
                1 => true,
                other => return Err(Error::invalid(format!("value {other} for `{s}` is not 0 or 1"))),
            };
            table.push((s, v));
        }
        PartialFunction::from_strings(spec.n, table)
    }
}

impl Serialize for PartialFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionSpec::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PartialFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = FunctionSpec::deserialize(deserializer)?;
        PartialFunction::try_from(spec).map_err(serde::de::Error::custom)
    }
}

impl PartialFunction {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&FunctionSpec::from(self)).expect("function spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: FunctionSpec = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        PartialFunction::try_from(spec).map_err(|e| Error::Parse {
            line: 1,
            column: 1,
            message: e.to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        let spec = FunctionSpec::from(self);
        let mut out = format!("n={}\n", spec.n);
        for (s, v) in spec.entries {
            out.push_str(&format!("{s} {v}\n"));
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let err = |line: usize, column: usize, message: String| Error::Parse { line, column, message };
        let mut n: Option<usize> = None;
        let mut entries = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("");
            let indent = content.len() - content.trim_start().len();
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some(arity) = n else {
                let value = content
                    .strip_prefix("n=")
                    .ok_or_else(|| err(line, indent + 1, "expected header `n=<int>`".into()))?;
                let parsed = value
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| err(line, indent + 3, format!("invalid arity `{}`", value.trim())))?;
                n = Some(parsed);
                continue;
            };
            let mut parts = content.split_whitespace();
            let bits = parts.next().unwrap_or("");
            let value = parts
                .next()
                .ok_or_else(|| err(line, indent + bits.len() + 1, "missing value".into()))?;
            let value_col = indent + content.find(value).unwrap_or(0) + 1;
            if let Some(extra) = parts.next() {
                let col = indent + content.rfind(extra).unwrap_or(0) + 1;
                return Err(err(line, col, format!("unexpected token `{extra}`")));
            }
            if bits.len() != arity {
                return Err(err(line, indent + 1, format!("`{bits}` does not have length {arity}")));
            }
            let x = parse_bits(bits).map_err(|e| err(line, indent + 1, e.to_string()))?;
            let v = match value {
                "0" => false,
                "1" => true,
                _ => return Err(err(line, value_col, format!("value `{value}` is not 0 or 1"))),
            };
            entries.push((x, v, line));
        }
        let n = n.ok_or_else(|| err(1, 1, "missing header `n=<int>`".into()))?;
        let mut sorted: Vec<_> = entries.iter().map(|&(x, _, l)| (x, l)).collect();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(err(w[0].1.max(w[1].1), 1, format!("duplicate entry `{}`", format_bits(w[0].0, n))));
        }
        PartialFunction::new(n, entries.into_iter().map(|(x, v, _)| (x, v))).map_err(|e| err(1, 1, e.to_string()))
    }

    /// Parses either format, choosing JSON when the document starts with `{`.
    pub fn parse_spec(s: &str) -> Result<Self> {
        match detect_format(s) {
            ParseFormat::Json => Self::from_json(s),
            ParseFormat::Text => Self::from_text(s),
        }
    }
}

pub(crate) fn detect_format(s: &str) -> ParseFormat {
    if s.trim_start().starts_with('{') {
        ParseFormat::Json
    } else {
        ParseFormat::Text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{maj3, pror, switch};
    use proptest::prelude::*;

    #[test]
    fn json_shape() {
        let s = switch();
        assert_eq!(s.to_json(), r#"{"n":2,"entries":[["01",0],["10",1]]}"#);
        assert_eq!(PartialFunction::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn text_format_with_comments() {
        let text = "# the switch function\nn=2\n01 0  # S(01)\n\n10 1\n";
        assert_eq!(PartialFunction::from_text(text).unwrap(), switch());
        assert_eq!(PartialFunction::parse_spec(&pror(3).to_text()).unwrap(), pror(3));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match PartialFunction::from_text("n=2\n01 0\n10 7\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 4)),
            other => panic!("unexpected {other:?}"),
        }
        match PartialFunction::from_text("n=2\n01 0\n01 1\n") {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match PartialFunction::from_text("n=3\n0a1 0\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            PartialFunction::from_json("{\"n\": 2, \"entries\": [[\"01\", 0], [\"01\", 1]]}"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(PartialFunction::from_json("{\"n\": 2,\n \"entries\": ["), Err(Error::Parse { line: 2, .. })));
    }

    fn arb_function() -> impl Strategy<Value = PartialFunction> {
        (1usize..=5)
            .prop_flat_map(|n| (Just(n), proptest::collection::btree_map(0..(1u64 << n), any::<bool>(), 1..=(1usize << n))))
            .prop_map(|(n, table)| PartialFunction::new(n, table).unwrap())
    }

    proptest! {
        #[test]
        fn spec_round_trips(f in arb_function()) {
            prop_assert_eq!(PartialFunction::from_json(&f.to_json()).unwrap(), f.clone());
            prop_assert_eq!(PartialFunction::from_text(&f.to_text()).unwrap(), f);
        }
    }

    #[test]
    fn serde_integration() {
        let f = maj3();
        let v = serde_json::to_value(&f).unwrap();
        let back: PartialFunction = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
