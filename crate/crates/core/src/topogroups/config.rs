//! Group configuration files and finite multiplication tables.
//!
//! A configuration is a TOML document with a leading `version` and one
//! `[[group]]` record per group:
//!
//! ```toml
//! version = 1
//!
//! [[group]]
//! id = "z2"
//! kind = "finite_table"
//! elements = ["1", "s"]
//! table = [["1", "s"], ["s", "1"]]
//!
//! [[group]]
//! id = "q2"
//! kind = "rational_padic"
//! p = 2
//! ```

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::{Group, GroupKind, Groups};
use crate::error::{Error, Result};
use crate::rational::is_prime;

pub const CONFIG_VERSION: u32 = 1;

/// The configuration used when none is given: z2, z3, s3, q (Euclidean) and q2 (2-adic).
pub const STANDARD_CONFIG: &str = include_str!("../../configs/standard.toml");

/// A finite group given by its Cayley table. Indices refer to `names`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteTable {
    /// Validates closure, identity, inverses and associativity, reporting the
    /// first violation with its coordinates.
    pub fn new(names: Vec<String>, table: Vec<Vec<String>>) -> Result<FiniteTable> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Config("finite table has no elements".into()));
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            check_token(name, "element name")?;
            if index.insert(name.as_str(), i).is_some() {
                return Err(Error::Config(format!("duplicate element name {name:?}")));
            }
        }
        if table.len() != n {
            return Err(Error::Config(format!(
                "table has {} rows, expected {n}",
                table.len()
            )));
        }
        let mut cells = vec![vec![0; n]; n];
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != n {
                return Err(Error::Config(format!(
                    "row {row} has {} entries, expected {n}",
                    entries.len()
                )));
            }
            for (col, entry) in entries.iter().enumerate() {
                cells[row][col] = *index.get(entry.as_str()).ok_or_else(|| {
                    Error::Config(format!(
                        "closure violated at row {row}, column {col}: {entry:?} is not an element"
                    ))
                })?;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| cells[e][x] == x && cells[x][e] == x))
            .ok_or_else(|| Error::Config("no two-sided identity element".into()))?;
        let mut inverses = vec![0; n];
        for x in 0..n {
            inverses[x] = (0..n)
                .find(|&y| cells[x][y] == identity && cells[y][x] == identity)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "element {:?} (row {x}) has no inverse",
                        names[x]
                    ))
                })?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if cells[cells[a][b]][c] != cells[a][cells[b][c]] {
                        return Err(Error::Config(format!(
                            "associativity fails for rows/columns ({a}, {b}, {c}): ({0}{1}){2} != {0}({1}{2})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteTable {
            names,
            table: cells,
            identity,
            inverses,
        })
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn product(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn check_token(text: &str, what: &str) -> Result<()> {
    if text.is_empty() || text.chars().any(|c| c.is_whitespace() || c == ':' || c == '"') {
        return Err(Error::Config(format!(
            "{what} {text:?} must be nonempty without whitespace, ':' or quotes"
        )));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    version: u32,
    #[serde(default)]
    group: Vec<GroupRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupRecord {
    id: String,
    kind: String,
    elements: Option<Vec<String>>,
    table: Option<Vec<Vec<String>>>,
    p: Option<u64>,
}

impl GroupRecord {
    fn into_group(self) -> Result<Group> {
        check_token(&self.id, "group id")?;
        let context = |msg: &str| Error::Config(format!("group {:?}: {msg}", self.id));
        let kind = match self.kind.as_str() {
            "finite_table" => {
                let (Some(elements), Some(table)) = (self.elements.clone(), self.table.clone())
                else {
                    return Err(context("finite_table needs `elements` and `table`"));
                };
                if self.p.is_some() {
                    return Err(context("`p` is only valid for rational_padic"));
                }
                let t = FiniteTable::new(elements, table)
                    .map_err(|e| context(&e.to_string()))?;
                GroupKind::FiniteTable(t)
            }
            "rational_euclidean" => {
                if self.elements.is_some() || self.table.is_some() || self.p.is_some() {
                    return Err(context("rational_euclidean takes no parameters"));
                }
                GroupKind::RationalEuclidean
            }
            "rational_padic" => {
                if self.elements.is_some() || self.table.is_some() {
                    return Err(context("rational_padic takes only `p`"));
                }
                let p = self.p.ok_or_else(|| context("rational_padic needs `p`"))?;
                if !is_prime(p) {
                    return Err(context(&format!("p = {p} is not prime")));
                }
                GroupKind::RationalPadic { p }
            }
            other => return Err(context(&format!("unknown kind {other:?}"))),
        };
        Ok(Group {
            name: self.id,
            kind,
        })
    }
}

impl Groups {
    pub fn new(groups: Vec<Group>) -> Result<Groups> {
        if groups.is_empty() {
            return Err(Error::Config("configuration has no groups".into()));
        }
        for (i, g) in groups.iter().enumerate() {
            check_token(&g.name, "group id")?;
            if groups[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::Config(format!("duplicate group id {:?}", g.name)));
            }
            if let GroupKind::RationalPadic { p } = g.kind {
                if !is_prime(p) {
                    return Err(Error::Config(format!("group {:?}: p = {p} is not prime", g.name)));
                }
            }
        }
        let digest = hex::encode(Sha256::digest(canonical_form(&groups).as_bytes()));
        Ok(Groups { groups, digest })
    }

    pub fn from_toml_str(text: &str) -> Result<Groups> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        if file.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported configuration version {}",
                file.version
            )));
        }
        let groups = file
            .group
            .into_iter()
            .map(GroupRecord::into_group)
            .collect::<Result<Vec<_>>>()?;
        Groups::new(groups)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Groups> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Groups::from_toml_str(&text)
    }

    pub fn standard() -> Groups {
        Groups::from_toml_str(STANDARD_CONFIG).expect("bundled configuration is valid")
    }
}

fn canonical_form(groups: &[Group]) -> String {
    let mut out = format!("v{CONFIG_VERSION}\n");
    for g in groups {
        out.push_str(&g.name);
        out.push(' ');
        out.push_str(g.kind.label());
        match &g.kind {
            GroupKind::FiniteTable(t) => {
                out.push(' ');
                out.push_str(&t.names.join(","));
                for row in &t.table {
                    out.push(' ');
                    let row: Vec<String> = row.iter().map(|c| c.to_string()).collect();
                    out.push_str(&row.join(","));
                }
            }
            GroupKind::RationalEuclidean => {}
            GroupKind::RationalPadic { p } => out.push_str(&format!(" p={p}")),
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn standard_loads() {
        let g = Groups::standard();
        assert_eq!(g.len(), 5);
        assert_eq!(g.digest().len(), 64);
        assert_eq!(g.lookup("s3").unwrap().0, 2);
    }

    #[test]
    fn digest_ignores_formatting() {
        let a = Groups::from_toml_str(
            "version = 1\n[[group]]\nid = \"q\"\nkind = \"rational_euclidean\"\n",
        )
        .unwrap();
        let b = Groups::from_toml_str(
            "version=1\n\n# comment\n[[group]]\nkind=\"rational_euclidean\"\nid=\"q\"",
        )
        .unwrap();
        assert_eq!(a.digest(), b.digest());
    }

    #[test]
    fn closure_violation_names_the_cell() {
        let err = FiniteTable::new(
            strings(&["1", "s"]),
            vec![strings(&["1", "s"]), strings(&["s", "x"])],
        )
        .unwrap_err();
        assert!(err.to_string().contains("row 1, column 1"), "{err}");
    }

    #[test]
    fn associativity_violation_is_reported() {
        // A Latin square with identity that is not associative.
        let names = strings(&["e", "a", "b", "c", "d"]);
        let table = vec![
            strings(&["e", "a", "b", "c", "d"]),
            strings(&["a", "e", "c", "d", "b"]),
            strings(&["b", "d", "e", "a", "c"]),
            strings(&["c", "b", "d", "e", "a"]),
            strings(&["d", "c", "a", "b", "e"]),
        ];
        let err = FiniteTable::new(names, table).unwrap_err();
        assert!(err.to_string().contains("associativity"), "{err}");
    }

    #[test]
    fn missing_identity_and_inverses() {
        let err = FiniteTable::new(
            strings(&["a", "b"]),
            vec![strings(&["a", "a"]), strings(&["a", "b"])],
        )
        .unwrap_err();
        // b is an identity here; a has no inverse.
        assert!(err.to_string().contains("no inverse"), "{err}");
        let err = FiniteTable::new(
            strings(&["a", "b"]),
            vec![strings(&["a", "a"]), strings(&["a", "a"])],
        )
        .unwrap_err();
        assert!(err.to_string().contains("identity"), "{err}");
    }

    #[test]
    fn rejects_bad_records() {
        let bad = [
            "version = 2\n[[group]]\nid=\"q\"\nkind=\"rational_euclidean\"",
            "version = 1\n[[group]]\nid=\"q\"\nkind=\"rational_padic\"\np=4",
            "version = 1\n[[group]]\nid=\"q\"\nkind=\"rational_euclidean\"\n[[group]]\nid=\"q\"\nkind=\"rational_euclidean\"",
            "version = 1\n[[group]]\nid=\"q\"\nkind=\"lie\"",
            "version = 1",
        ];
        for text in bad {
            assert!(Groups::from_toml_str(text).is_err(), "{text}");
        }
    }
}
