use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

const DEFAULT_CATALOG: &str = include_str!("../../data/statement_kinds.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KindCategory {
    Expression,
    Node,
    Statement,
}

impl FromStr for KindCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "expression" => Ok(Self::Expression),
            "node" => Ok(Self::Node),
            "statement" => Ok(Self::Statement),
            other => Err(format!("unknown kind category `{other}`")),
        }
    }
}

impl fmt::Display for KindCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Expression => "expression",
            Self::Node => "node",
            Self::Statement => "statement",
        })
    }
}

/// The set of statement kinds a bundle may use.
///
/// The default catalog mirrors the Java AST: 32 expression kinds, 3 node kinds
/// and 22 statement kinds. Front ends for other languages can ship their own
/// tab-separated `kind<TAB>category` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindCatalog {
    kinds: BTreeMap<String, KindCategory>,
}

impl KindCatalog {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut kinds = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let (Some(name), Some(cat), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(format!("line {}: expected `kind category`", lineno + 1));
            };
            let cat = cat.parse().map_err(|e| format!("line {}: {e}", lineno + 1))?;
            if kinds.insert(name.to_string(), cat).is_some() {
                return Err(format!("line {}: duplicate kind `{name}`", lineno + 1));
            }
        }
        Ok(Self { kinds })
    }

    pub fn contains(&self, kind: &str) -> bool {
        self.kinds.contains_key(kind)
    }

    pub fn category(&self, kind: &str) -> Option<KindCategory> {
        self.kinds.get(kind).copied()
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn count(&self, category: KindCategory) -> usize {
        self.kinds.values().filter(|c| **c == category).count()
    }
}

impl Default for KindCatalog {
    fn default() -> Self {
        Self::parse(DEFAULT_CATALOG).expect("bundled kind catalog is well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_shape() {
        let c = KindCatalog::default();
        assert_eq!(c.len(), 57);
        assert_eq!(c.count(KindCategory::Expression), 32);
        assert_eq!(c.count(KindCategory::Node), 3);
        assert_eq!(c.count(KindCategory::Statement), 22);
        for k in [
            "ForStatement",
            "WhileStatement",
            "DoStatement",
            "Annotation",
            "SimpleName",
        ] {
            assert!(c.contains(k), "{k}");
        }
        assert!(!c.contains("MethodDeclaration"));
    }

    #[test]
    fn custom_catalog_errors() {
        assert!(KindCatalog::parse("Foo statement\nFoo node").is_err());
        assert!(KindCatalog::parse("Foo weird").is_err());
        assert!(KindCatalog::parse("Foo").is_err());
        let c = KindCatalog::parse("# py\nIf statement\nCall expression\n").unwrap();
        assert_eq!(c.len(), 2);
    }
}
