//! The line-oriented groupoid file format (`.grpd`).
//!
//! ```text
//! kind: finite | pair | group | snake
//! # pair:   units: u v w
//! # finite: unit u; arrow a src=u rng=v; compose a b = c; inverse a = b
//! # group:  elements: e g; row e: e g; row g: g e
//! # snake:  heads: 2 | Z
//! ```
//!
//! `#` starts a comment and `;` separates statements on one line. Parsing
//! and validation are separate steps so that a malformed table can still be
//! inspected by the axiom checker.

use std::collections::BTreeMap;
use std::path::Path;

use super::finite::{pair_table, FiniteGroupoid, GroupoidTable};
use super::snake::SnakeGroupoid;
use crate::error::{Error, Result};

/// A parsed but not yet validated groupoid file.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupoidSource {
    Finite(GroupoidTable),
    Snake(SnakeGroupoid),
}

/// A validated groupoid.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedGroupoid {
    Finite(FiniteGroupoid),
    Snake(SnakeGroupoid),
}

impl GroupoidSource {
    pub fn validate(self) -> Result<LoadedGroupoid> {
        match self {
            GroupoidSource::Finite(table) => FiniteGroupoid::from_table(table).map(LoadedGroupoid::Finite),
            GroupoidSource::Snake(snake) => Ok(LoadedGroupoid::Snake(snake)),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Reads, parses and validates a `.grpd` file.
pub fn load_groupoid(path: impl AsRef<Path>) -> Result<LoadedGroupoid> {
    let text = read_file(path.as_ref())?;
    parse_groupoid(&text)?.validate()
}

/// Splits text into `(line number, statement)` pairs.
pub(crate) fn statements(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .flat_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("");
            line.split(';').map(move |s| (i + 1, s.trim()))
        })
        .filter(|(_, s)| !s.is_empty())
        .collect()
}

pub fn parse_groupoid(text: &str) -> Result<GroupoidSource> {
    let stmts = statements(text);
    let Some(&(line, first)) = stmts.first() else {
        return Err(Error::parse(0, "empty groupoid file"));
    };
    let kind = first
        .strip_prefix("kind:")
        .ok_or_else(|| Error::parse(line, "the first statement must be `kind: <finite|pair|group|snake>`"))?
        .trim();
    let rest = &stmts[1..];
    match kind {
        "pair" => parse_pair(rest),
        "group" => parse_group(rest),
        "finite" => parse_finite(rest),
        "snake" => parse_snake(rest),
        other => Err(Error::parse(line, format!("unknown kind `{other}`"))),
    }
}

fn key_value(line: usize, stmt: &str) -> Result<(&str, &str)> {
    if let Some((key, value)) = stmt.split_once(':') {
        if !key.contains(char::is_whitespace) || key.starts_with("row ") {
            return Ok((key.trim(), value.trim()));
        }
    }
    Err(Error::parse(line, format!("expected `key: value`, found `{stmt}`")))
}

fn parse_pair(stmts: &[(usize, &str)]) -> Result<GroupoidSource> {
    let mut units: Option<Vec<String>> = None;
    for &(line, stmt) in stmts {
        match key_value(line, stmt)? {
            ("units", value) if units.is_none() => {
                let names: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                check_distinct(line, &names)?;
                units = Some(names);
            }
            ("units", _) => return Err(Error::parse(line, "`units` given twice")),
            (key, _) => return Err(Error::parse(line, format!("unknown key `{key}` for kind pair"))),
        }
    }
    let units = units.filter(|u| !u.is_empty()).ok_or_else(|| Error::parse(0, "pair groupoid needs `units:`"))?;
    Ok(GroupoidSource::Finite(pair_table(&units)))
}

fn check_distinct(line: usize, names: &[String]) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::parse(line, format!("duplicate name `{n}`")));
        }
    }
    Ok(())
}

fn parse_group(stmts: &[(usize, &str)]) -> Result<GroupoidSource> {
    let mut elements: Option<Vec<String>> = None;
    let mut products = BTreeMap::new();
    let mut rows_seen = std::collections::BTreeSet::new();
    for &(line, stmt) in stmts {
        let (key, value) = key_value(line, stmt)?;
        if key == "elements" {
            if elements.is_some() {
                return Err(Error::parse(line, "`elements` given twice"));
            }
            let names: Vec<String> = value.split_whitespace().map(str::to_string).collect();
            check_distinct(line, &names)?;
            if names.is_empty() {
                return Err(Error::parse(line, "a group needs at least one element"));
            }
            elements = Some(names);
        } else if let Some(g) = key.strip_prefix("row ") {
            let els = elements.as_ref().ok_or_else(|| Error::parse(line, "`row` before `elements`"))?;
            let index = |name: &str| {
                els.iter()
                    .position(|e| e == name)
                    .ok_or_else(|| Error::parse(line, format!("unknown element `{name}`")))
            };
            let gi = index(g.trim())?;
            if !rows_seen.insert(gi) {
                return Err(Error::parse(line, format!("row `{}` given twice", g.trim())));
            }
            let entries: Vec<&str> = value.split_whitespace().collect();
            if entries.len() != els.len() {
                return Err(Error::parse(
                    line,
                    format!("row `{}` has {} entries, expected {}", g.trim(), entries.len(), els.len()),
                ));
            }
            for (h, name) in entries.into_iter().enumerate() {
                products.insert((gi, h), index(name)?);
            }
        } else {
            return Err(Error::parse(line, format!("unknown key `{key}` for kind group")));
        }
    }
    let elements = elements.ok_or_else(|| Error::parse(0, "group needs `elements:`"))?;
    Ok(GroupoidSource::Finite(GroupoidTable::from_group(elements, products)?))
}

fn parse_finite(stmts: &[(usize, &str)]) -> Result<GroupoidSource> {
    let mut table = GroupoidTable::default();
    let mut pending_arrows: Vec<(usize, String, String, String)> = Vec::new();
    let mut relations: Vec<(usize, &str)> = Vec::new();

    for &(line, stmt) in stmts {
        let mut words = stmt.split_whitespace();
        match words.next() {
            Some("unit") => {
                let names: Vec<&str> = words.collect();
                if names.is_empty() {
                    return Err(Error::parse(line, "`unit` needs a name"));
                }
                for name in names {
                    if table.index_of(name).is_some() {
                        return Err(Error::parse(line, format!("duplicate name `{name}`")));
                    }
                    table.add_unit(name);
                }
            }
            Some("arrow") => {
                let name = words.next().ok_or_else(|| Error::parse(line, "`arrow` needs a name"))?;
                let (mut src, mut rng) = (None, None);
                for w in words {
                    match w.split_once('=') {
                        Some(("src", u)) if src.is_none() => src = Some(u.to_string()),
                        Some(("rng", u)) if rng.is_none() => rng = Some(u.to_string()),
                        _ => return Err(Error::parse(line, format!("unexpected `{w}` in arrow declaration"))),
                    }
                }
                let (Some(src), Some(rng)) = (src, rng) else {
                    return Err(Error::parse(line, format!("arrow `{name}` needs src= and rng=")));
                };
                pending_arrows.push((line, name.to_string(), src, rng));
            }
            Some("compose") | Some("inverse") => relations.push((line, stmt)),
            Some(other) => return Err(Error::parse(line, format!("unknown key `{other}` for kind finite"))),
            None => {}
        }
    }

    for (line, name, _, _) in &pending_arrows {
        if table.index_of(name).is_some() {
            return Err(Error::parse(*line, format!("duplicate name `{name}`")));
        }
        table.add_arrow(name.clone(), usize::MAX, usize::MAX);
    }
    let lookup = |table: &GroupoidTable, line: usize, name: &str| {
        table.index_of(name).ok_or_else(|| Error::parse(line, format!("unknown name `{name}`")))
    };
    for (line, name, src, rng) in &pending_arrows {
        let id = lookup(&table, *line, name)?;
        table.src[id] = lookup(&table, *line, src)?;
        table.rng[id] = lookup(&table, *line, rng)?;
    }

    for (line, stmt) in relations {
        let tokens: Vec<&str> = stmt.split_whitespace().collect();
        match tokens.as_slice() {
            ["compose", a, b, "=", c] => {
                let key = (lookup(&table, line, a)?, lookup(&table, line, b)?);
                let value = lookup(&table, line, c)?;
                if table.compose.insert(key, value).is_some_and(|old| old != value) {
                    return Err(Error::parse(line, format!("conflicting entries for compose {a} {b}")));
                }
            }
            ["inverse", a, "=", b] => {
                let key = lookup(&table, line, a)?;
                let value = lookup(&table, line, b)?;
                if table.inverse.insert(key, value).is_some_and(|old| old != value) {
                    return Err(Error::parse(line, format!("conflicting inverses for {a}")));
                }
            }
            _ => return Err(Error::parse(line, format!("malformed statement `{stmt}`"))),
        }
    }
    if table.names.is_empty() {
        return Err(Error::parse(0, "finite groupoid declares no units"));
    }
    table.fill_unit_laws();
    Ok(GroupoidSource::Finite(table))
}

fn parse_snake(stmts: &[(usize, &str)]) -> Result<GroupoidSource> {
    let mut snake = None;
    for &(line, stmt) in stmts {
        match key_value(line, stmt)? {
            ("heads", _) if snake.is_some() => return Err(Error::parse(line, "`heads` given twice")),
            ("heads", "Z") => snake = Some(SnakeGroupoid::integers()),
            ("heads", n) => match n.parse::<u32>() {
                Ok(n) if n >= 2 => snake = Some(SnakeGroupoid::cyclic(n)),
                _ => return Err(Error::parse(line, format!("heads must be an integer >= 2 or Z, found `{n}`"))),
            },
            (key, _) => return Err(Error::parse(line, format!("unknown key `{key}` for kind snake"))),
        }
    }
    snake.map(GroupoidSource::Snake).ok_or_else(|| Error::parse(0, "snake needs `heads:`"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{AmpleGroupoid, HeadGroup};

    fn load(text: &str) -> Result<LoadedGroupoid> {
        parse_groupoid(text)?.validate()
    }

    #[test]
    fn pair_file() {
        let g = load("kind: pair\nunits: u v # two points\n").unwrap();
        let LoadedGroupoid::Finite(g) = g else { panic!() };
        assert_eq!(g.arrow_count(), 4);
    }

    #[test]
    fn finite_file_with_implicit_unit_laws() {
        let text = "kind: finite
unit u; unit v
arrow a src=u rng=v
arrow b src=v rng=u
compose a b = v; compose b a = u
inverse a = b; inverse b = a
";
        let LoadedGroupoid::Finite(g) = load(text).unwrap() else { panic!() };
        assert_eq!(g.arrow_count(), 4);
        assert!(g.table().violations().is_empty());
    }

    #[test]
    fn composition_of_non_composable_pair_is_an_axiom_violation() {
        let text = "kind: finite
unit u; unit v
arrow a src=u rng=v
arrow b src=v rng=u
compose a b = v; compose b a = u; compose a a = v
inverse a = b; inverse b = a
";
        let err = load(text).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(matches!(err, Error::Axiom { property: "composability", .. }), "{err}");
    }

    #[test]
    fn missing_inverse_names_the_arrow() {
        let text = "kind: finite
unit u; unit v
arrow a src=u rng=v
arrow b src=v rng=u
compose a b = v; compose b a = u
inverse a = b
";
        let err = load(text).unwrap_err();
        assert!(err.to_string().contains("arrow b has no inverse"), "{err}");
    }

    #[test]
    fn group_file() {
        let text = "kind: group\nelements: e g\nrow e: e g\nrow g: g e\n";
        let LoadedGroupoid::Finite(g) = load(text).unwrap() else { panic!() };
        assert_eq!(g.units().count(), 1);
        assert_eq!(g.arrow_count(), 2);
        let err = load("kind: group\nelements: e g\nrow e: e g\n").unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let err = load("kind: group\nelements: e g\nrow e: e\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn snake_file() {
        let LoadedGroupoid::Snake(s) = load("kind: snake\nheads: 2\n").unwrap() else { panic!() };
        assert_eq!(s.heads(), HeadGroup::Cyclic(2));
        // one non-unit arrow over the base point
        let fiber = s.fiber(&crate::groupoid::SnakePoint::Base).unwrap().into_finite().unwrap();
        assert_eq!(fiber.len(), 2);
        let LoadedGroupoid::Snake(s) = load("kind: snake\nheads: Z").unwrap() else { panic!() };
        assert_eq!(s.heads(), HeadGroup::Integers);
        assert_eq!(load("kind: snake\nheads: 1").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn strict_keys() {
        assert_eq!(load("kind: pair\nunits: u\ncolour: red").unwrap_err().exit_code(), 2);
        assert_eq!(load("kind: torus").unwrap_err().exit_code(), 2);
        assert_eq!(load("units: u").unwrap_err().exit_code(), 2);
        assert_eq!(load("kind: finite\nunit u\narrow a src=u rng=w").unwrap_err().exit_code(), 2);
    }
}
