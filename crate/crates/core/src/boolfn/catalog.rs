use std::fmt;
use std::str::FromStr;

use super::PartialFunction;
use crate::error::{Error, Result};

/// Named functions available from the command line and the bindings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Catalog {
    Identity,
    Switch,
    Nand2,
    Maj3,
    PrOr(usize),
    And(usize),
    Or(usize),
    Parity(usize),
    Const0(usize),
    Const1(usize),
}

impl Catalog {
    pub fn arity(self) -> usize {
        use Catalog::*;
        match self {
            Identity => 1,
            Switch | Nand2 => 2,
            Maj3 => 3,
            PrOr(n) | And(n) | Or(n) | Parity(n) | Const0(n) | Const1(n) => n,
        }
    }

    pub fn build(self) -> Result<PartialFunction> {
        use Catalog::*;
        let sized = |n: usize| {
            if n == 0 {
                Err(Error::invalid("catalog size must be positive"))
            } else {
                Ok(n)
            }
        };
        match self {
            Identity => Ok(identity()),
            Switch => Ok(switch()),
            Nand2 => Ok(nand2()),
            Maj3 => Ok(maj3()),
            PrOr(n) => Ok(pror(sized(n)?)),
            And(n) => PartialFunction::total(sized(n)?, move |x| x.count_ones() as usize == n),
            Or(n) => PartialFunction::total(sized(n)?, |x| x != 0),
            Parity(n) => PartialFunction::total(sized(n)?, |x| x.count_ones() % 2 == 1),
            Const0(n) => constant(sized(n)?, false),
            Const1(n) => constant(sized(n)?, true),
        }
    }
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Catalog::*;
        match self {
            Identity => write!(f, "I"),
            Switch => write!(f, "S"),
            Nand2 => write!(f, "NAND2"),
            Maj3 => write!(f, "MAJ3"),
            PrOr(n) => write!(f, "PrOR{n}"),
            And(n) => write!(f, "AND{n}"),
            Or(n) => write!(f, "OR{n}"),
            Parity(n) => write!(f, "PARITY{n}"),
            Const0(n) => write!(f, "CONST0_{n}"),
            Const1(n) => write!(f, "CONST1_{n}"),
        }
    }
}

impl FromStr for Catalog {
    type Err = Error;

    /// Accepts `NAME`, `NAME<size>`, `NAME:<size>` and `NAME_<size>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, size) = match s.split_once([':', '_']) {
            Some((a, b)) => (a, Some(b)),
            None => {
                let split = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
                let (a, b) = s.split_at(split);
                (a, (!b.is_empty()).then_some(b))
            }
        };
        let size = size
            .map(|t| t.parse::<usize>().map_err(|_| Error::UnknownName(s.to_string())))
            .transpose()?;
        lookup(name, size).ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

fn lookup(name: &str, size: Option<usize>) -> Option<Catalog> {
    use Catalog::*;
    let upper = name.to_ascii_uppercase();
    let fixed = |c: Catalog, natural: usize| match size {
        None => Some(c),
        Some(n) if n == natural => Some(c),
        Some(_) => None,
    };
    match upper.as_str() {
        "I" | "ID" => fixed(Identity, 1),
        "S" => fixed(Switch, 2),
        "NAND" => fixed(Nand2, 2).filter(|_| size.is_some()),
        "MAJ" => fixed(Maj3, 3).filter(|_| size.is_some()),
        "PROR" => size.map(PrOr),
        "AND" => size.map(And),
        "OR" => size.map(Or),
        "PARITY" | "XOR" => size.map(Parity),
        "CONST" => None,
        "CONST0" => size.map(Const0),
        "CONST1" => size.map(Const1),
        _ => None,
    }
}

/// Looks up a catalog function by name; `size` parameterizes the families.
pub fn catalog(name: &str, size: Option<usize>) -> Result<PartialFunction> {
    let entry = match size {
        Some(n) => lookup(name, Some(n))
            .or_else(|| name.parse::<Catalog>().ok().filter(|c| c.arity() == n))
            .ok_or_else(|| Error::UnknownName(format!("{name} (size {n})")))?,
        None => name.parse()?,
    };
    entry.build()
}

/// The one-bit identity `I`.
pub fn identity() -> PartialFunction {
    PartialFunction::from_sorted_unchecked(1, vec![(0, false), (1, true)])
}

/// The switch function: `S(01) = 0`, `S(10) = 1`.
pub fn switch() -> PartialFunction {
    // "10" packs to 1 and "01" to 2
    PartialFunction::from_sorted_unchecked(2, vec![(1, true), (2, false)])
}

pub fn nand2() -> PartialFunction {
    PartialFunction::from_sorted_unchecked(2, (0..4).map(|x| (x, x != 3)).collect())
}

pub fn maj3() -> PartialFunction {
    PartialFunction::from_sorted_unchecked(3, (0..8u64).map(|x| (x, x.count_ones() >= 2)).collect())
}

/// Promise-OR: `0ⁿ ↦ 0` and every weight-one string `↦ 1`.
pub fn pror(n: usize) -> PartialFunction {
    assert!((1..=64).contains(&n));
    let mut entries = vec![(0u64, false)];
    entries.extend((0..n).map(|i| (1u64 << i, true)));
    PartialFunction::from_distinct(n, entries)
}

pub fn constant(n: usize, value: bool) -> Result<PartialFunction> {
    PartialFunction::total(n, |_| value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::parse_bits;

    #[test]
    fn switch_table() {
        let s = catalog("S", None).unwrap();
        assert_eq!(s.domain_size(), 2);
        assert_eq!(s.get(parse_bits("01").unwrap()), Some(false));
        assert_eq!(s.get(parse_bits("10").unwrap()), Some(true));
    }

    #[test]
    fn pror3_table() {
        let f = catalog("PrOR", Some(3)).unwrap();
        let expect = [("000", false), ("100", true), ("010", true), ("001", true)];
        assert_eq!(f, PartialFunction::from_strings(3, expect).unwrap());
    }

    #[test]
    fn identity_table() {
        let i = catalog("I", None).unwrap();
        assert_eq!(i.arity(), 1);
        assert!(i.is_total());
        assert_eq!(i.get(1), Some(true));
    }

    #[test]
    fn name_forms() {
        assert_eq!("PrOR3".parse::<Catalog>().unwrap(), Catalog::PrOr(3));
        assert_eq!("pror:4".parse::<Catalog>().unwrap(), Catalog::PrOr(4));
        assert_eq!("CONST0_2".parse::<Catalog>().unwrap(), Catalog::Const0(2));
        assert_eq!("NAND2".parse::<Catalog>().unwrap(), Catalog::Nand2);
        assert!("NAND3".parse::<Catalog>().is_err());
        assert!(matches!(catalog("FOO", None), Err(Error::UnknownName(_))));
        for c in [Catalog::Maj3, Catalog::Parity(2), Catalog::Switch, Catalog::Const1(3)] {
            assert_eq!(c.to_string().parse::<Catalog>().unwrap(), c);
        }
    }

    #[test]
    fn families() {
        let and3 = catalog("AND", Some(3)).unwrap();
        assert_eq!(and3.preimage(true), vec![7]);
        let p = catalog("PARITY", Some(2)).unwrap();
        assert_eq!(p.preimage(true), vec![1, 2]);
        assert!(catalog("CONST1", Some(2)).unwrap().is_constant());
    }
}
