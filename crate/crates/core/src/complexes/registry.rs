//! Named space generators selected at runtime by spec strings.
//!
//! Grammar: `name[:arg]*` for leaves (`em2:2:6`, `moore:3`, `torus`), and
//! `name(spec,…[;key=value]*)` for constructions
//! (`suspension(moore:3)`, `product(em2:2:6,torus;dmax=5)`,
//! `skeleton(em2:2:7;dim=6)`). `file:path` loads an `sset v1` file.

use std::collections::BTreeMap;

use super::generators as gen;
use super::model::Budget;
use super::product::product;
use super::sset::SimplicialSet;
use crate::error::{Error, Result};

/// Parsed form of a space spec string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceSpec {
    pub name: String,
    pub args: Vec<String>,
    pub children: Vec<SpaceSpec>,
    pub options: BTreeMap<String, String>,
}

impl SpaceSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let spec = p.spec()?;
        if p.pos != p.s.len() {
            return Err(Error::Parse(format!("trailing input in space spec '{text}'")));
        }
        Ok(spec)
    }

    pub fn arg<T: std::str::FromStr>(&self, i: usize, what: &str) -> Result<T> {
        let raw = self.args.get(i).ok_or_else(|| Error::Parse(format!("{}: missing {what}", self.name)))?;
        raw.parse().map_err(|_| Error::Parse(format!("{}: bad {what} '{raw}'", self.name)))
    }

    pub fn option<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.options
            .get(key)
            .map(|v| v.parse().map_err(|_| Error::Parse(format!("{}: bad value for {key}: '{v}'", self.name))))
            .transpose()
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn word(&mut self, stop: &[u8]) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| !stop.contains(&c)) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).trim().to_string()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() != Some(c) {
            return Err(Error::Parse(format!("expected '{}' at offset {} of space spec", c as char, self.pos)));
        }
        self.pos += 1;
        Ok(())
    }

    fn spec(&mut self) -> Result<SpaceSpec> {
        let name = self.word(b":(),;");
        if name.is_empty() {
            return Err(Error::Parse(format!("empty space name at offset {}", self.pos)));
        }
        let mut spec = SpaceSpec { name, args: vec![], children: vec![], options: BTreeMap::new() };
        if spec.name == "file" {
            self.expect(b':')?;
            spec.args.push(self.word(b"),;"));
            return Ok(spec);
        }
        while self.peek() == Some(b':') {
            self.pos += 1;
            spec.args.push(self.word(b":(),;"));
        }
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                spec.children.push(self.spec()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    _ => break,
                }
            }
            while self.peek() == Some(b';') {
                self.pos += 1;
                let key = self.word(b"=),;");
                self.expect(b'=')?;
                let value = self.word(b"),;");
                spec.options.insert(key, value);
            }
            self.expect(b')')?;
        }
        Ok(spec)
    }
}

/// A named way of producing a space.
pub trait SpaceGenerator: Send + Sync {
    fn name(&self) -> &'static str;
    fn usage(&self) -> &'static str;
    fn build(&self, spec: &SpaceSpec, children: Vec<SimplicialSet>, budget: Budget) -> Result<SimplicialSet>;
}

struct Leaf {
    name: &'static str,
    usage: &'static str,
    make: fn(&SpaceSpec, Budget) -> Result<SimplicialSet>,
}

impl SpaceGenerator for Leaf {
    fn name(&self) -> &'static str {
        self.name
    }

    fn usage(&self) -> &'static str {
        self.usage
    }

    fn build(&self, spec: &SpaceSpec, children: Vec<SimplicialSet>, budget: Budget) -> Result<SimplicialSet> {
        if !children.is_empty() {
            return Err(Error::Parse(format!("{} takes no subspaces", self.name)));
        }
        (self.make)(spec, budget)
    }
}

struct Suspension;

impl SpaceGenerator for Suspension {
    fn name(&self) -> &'static str {
        "suspension"
    }

    fn usage(&self) -> &'static str {
        "suspension(X)"
    }

    fn build(&self, _: &SpaceSpec, children: Vec<SimplicialSet>, _: Budget) -> Result<SimplicialSet> {
        match children.as_slice() {
            [x] => gen::suspension(x),
            _ => Err(Error::Parse("suspension takes exactly one space".into())),
        }
    }
}

struct Product;

impl SpaceGenerator for Product {
    fn name(&self) -> &'static str {
        "product"
    }

    fn usage(&self) -> &'static str {
        "product(X,Y,…[;dmax=d])"
    }

    fn build(&self, spec: &SpaceSpec, children: Vec<SimplicialSet>, budget: Budget) -> Result<SimplicialSet> {
        if children.is_empty() {
            return Err(Error::Parse("product needs at least one space".into()));
        }
        let refs: Vec<&SimplicialSet> = children.iter().collect();
        product(&refs, spec.option("dmax")?, budget)
    }
}

struct Skeleton;

impl SpaceGenerator for Skeleton {
    fn name(&self) -> &'static str {
        "skeleton"
    }

    fn usage(&self) -> &'static str {
        "skeleton(X;dim=d)"
    }

    fn build(&self, spec: &SpaceSpec, children: Vec<SimplicialSet>, _: Budget) -> Result<SimplicialSet> {
        let d: usize = spec.option("dim")?.ok_or_else(|| Error::Parse("skeleton needs dim=d".into()))?;
        match children.as_slice() {
            [x] => Ok(x.skeleton(d)),
            _ => Err(Error::Parse("skeleton takes exactly one space".into())),
        }
    }
}

struct FileSource;

impl SpaceGenerator for FileSource {
    fn name(&self) -> &'static str {
        "file"
    }

    fn usage(&self) -> &'static str {
        "file:path"
    }

    fn build(&self, spec: &SpaceSpec, _: Vec<SimplicialSet>, _: Budget) -> Result<SimplicialSet> {
        let path: String = spec.arg(0, "path")?;
        let text = std::fs::read_to_string(&path)?;
        SimplicialSet::from_text(&text, format!("file:{path}"))
    }
}

pub struct SpaceRegistry {
    generators: BTreeMap<&'static str, Box<dyn SpaceGenerator>>,
}

impl SpaceRegistry {
    pub fn empty() -> Self {
        SpaceRegistry { generators: BTreeMap::new() }
    }

    /// All shipped generators.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        let leaves: [Leaf; 8] = [
            Leaf { name: "point", usage: "point", make: |_, _| Ok(gen::point()) },
            Leaf { name: "points", usage: "points:k", make: |s, _| gen::points(s.arg(0, "count")?) },
            Leaf { name: "circle", usage: "circle", make: |_, _| Ok(gen::circle()) },
            Leaf { name: "circle-min", usage: "circle-min", make: |_, _| Ok(gen::circle_min()) },
            Leaf { name: "torus", usage: "torus", make: |_, _| Ok(gen::torus()) },
            Leaf { name: "moore", usage: "moore:n", make: |s, _| gen::moore_polygon(s.arg(0, "n")?) },
            Leaf {
                name: "wbar",
                usage: "wbar:n:dmax",
                make: |s, b| gen::wbar_cyclic_with(s.arg(0, "n")?, s.arg(1, "dmax")?, b),
            },
            Leaf {
                name: "em2",
                usage: "em2:n:dmax",
                make: |s, b| gen::em_space_2_with(s.arg(0, "n")?, s.arg(1, "dmax")?, b),
            },
        ];
        for leaf in leaves {
            r.register(Box::new(leaf));
        }
        r.register(Box::new(Suspension));
        r.register(Box::new(Product));
        r.register(Box::new(Skeleton));
        r.register(Box::new(FileSource));
        r
    }

    pub fn register(&mut self, g: Box<dyn SpaceGenerator>) {
        self.generators.insert(g.name(), g);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.generators.keys().copied()
    }

    pub fn usage(&self) -> Vec<&'static str> {
        self.generators.values().map(|g| g.usage()).collect()
    }

    pub fn build_spec(&self, spec: &SpaceSpec, budget: Budget) -> Result<SimplicialSet> {
        let g = self
            .generators
            .get(spec.name.as_str())
            .ok_or_else(|| Error::Parse(format!("unknown space generator '{}'", spec.name)))?;
        let children = spec.children.iter().map(|c| self.build_spec(c, budget)).collect::<Result<Vec<_>>>()?;
        g.build(spec, children, budget)
    }

    pub fn build(&self, text: &str, budget: Budget) -> Result<SimplicialSet> {
        let space = self.build_spec(&SpaceSpec::parse(text)?, budget)?;
        Ok(if space.label().starts_with("file:") { space } else { space.with_label(text) })
    }
}

/// Builds a space from a spec string with the standard generators.
pub fn build_space(text: &str) -> Result<SimplicialSet> {
    SpaceRegistry::standard().build(text, Budget::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_specs() {
        let s = SpaceSpec::parse("product(em2:2:6,suspension(moore:3);dmax=5)").unwrap();
        assert_eq!(s.name, "product");
        assert_eq!(s.children.len(), 2);
        assert_eq!(s.children[0].args, vec!["2", "6"]);
        assert_eq!(s.children[1].children[0].name, "moore");
        assert_eq!(s.options["dmax"], "5");
        assert!(SpaceSpec::parse("product(point").is_err());
        assert!(SpaceSpec::parse("").is_err());
    }

    #[test]
    fn unknown_names_are_parse_errors() {
        assert_eq!(build_space("klein").unwrap_err().kind(), "parse");
    }
}
