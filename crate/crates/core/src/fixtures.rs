//! Named example data shipped as JSON under `fixtures/`.
//!
//! The directory defaults to the crate's own `fixtures/` and can be moved
//! with the `LAGSURG_FIXTURES` environment variable.

use std::path::PathBuf;

use crate::fibre::FibrationSketch;
use crate::monodromy::TwistWord;
use crate::profile::{FanoTable, InvariantProfile};
use crate::{Error, Result};

pub const FIXTURES_ENV: &str = "LAGSURG_FIXTURES";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    Profile,
    Word,
    Sketch,
    FanoTable,
}

/// `(name, kind)` of every registered fixture; the file is `<name>.json`.
pub const REGISTRY: &[(&str, FixtureKind)] = &[
    ("p2xp1", FixtureKind::Profile),
    ("quintic", FixtureKind::Profile),
    ("e1_four_I3", FixtureKind::Word),
    ("e1_sketch", FixtureKind::Sketch),
    ("triple_point", FixtureKind::Sketch),
    ("mori_mukai", FixtureKind::FanoTable),
];

#[derive(Clone, Debug, PartialEq)]
pub enum Fixture {
    Profile(InvariantProfile),
    Word(TwistWord),
    Sketch(FibrationSketch),
    FanoTable(FanoTable),
}

pub fn fixtures_dir() -> PathBuf {
    std::env::var_os(FIXTURES_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures")))
}

pub fn fixture_path(name: &str) -> Result<PathBuf> {
    kind_of(name)?;
    Ok(fixtures_dir().join(format!("{name}.json")))
}

pub fn kind_of(name: &str) -> Result<FixtureKind> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, k)| k)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

pub fn read_fixture_text(name: &str) -> Result<String> {
    let path = fixture_path(name)?;
    std::fs::read_to_string(&path).map_err(|source| Error::Io { path, source })
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    let text = read_fixture_text(name)?;
    Ok(match kind_of(name)? {
        FixtureKind::Profile => Fixture::Profile(InvariantProfile::from_json_str(&text)?),
        FixtureKind::Word => Fixture::Word(TwistWord::from_json_str(&text)?),
        FixtureKind::Sketch => Fixture::Sketch(FibrationSketch::from_json_str(&text)?),
        FixtureKind::FanoTable => Fixture::FanoTable(FanoTable::from_json_str(&text)?),
    })
}

fn wrong_kind(name: &str, want: &str) -> Error {
    Error::Invalid(format!("fixture {name:?} is not a {want}"))
}

pub fn load_profile(name: &str) -> Result<InvariantProfile> {
    match load_fixture(name)? {
        Fixture::Profile(p) => Ok(p),
        _ => Err(wrong_kind(name, "profile")),
    }
}

pub fn load_word(name: &str) -> Result<TwistWord> {
    match load_fixture(name)? {
        Fixture::Word(w) => Ok(w),
        _ => Err(wrong_kind(name, "twist word")),
    }
}

pub fn load_sketch(name: &str) -> Result<FibrationSketch> {
    match load_fixture(name)? {
        Fixture::Sketch(s) => Ok(s),
        _ => Err(wrong_kind(name, "fibration sketch")),
    }
}

pub fn load_fano_table() -> Result<FanoTable> {
    match load_fixture("mori_mukai")? {
        Fixture::FanoTable(t) => Ok(t),
        _ => Err(wrong_kind("mori_mukai", "Fano table")),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixtureSet {
    pub profiles: Vec<InvariantProfile>,
    pub fibrations: Vec<FibrationSketch>,
    pub words: Vec<TwistWord>,
    pub fano_table: FanoTable,
}

/// Loads and validates every registered fixture.
pub fn load_all() -> Result<FixtureSet> {
    let (mut profiles, mut fibrations, mut words, mut fano_table) = (vec![], vec![], vec![], None);
    for (name, _) in REGISTRY {
        match load_fixture(name)? {
            Fixture::Profile(p) => profiles.push(p),
            Fixture::Word(w) => words.push(w),
            Fixture::Sketch(s) => fibrations.push(s),
            Fixture::FanoTable(t) => fano_table = Some(t),
        }
    }
    Ok(FixtureSet {
        profiles,
        fibrations,
        words,
        fano_table: fano_table.ok_or(Error::Missing("mori_mukai"))?,
    })
}
