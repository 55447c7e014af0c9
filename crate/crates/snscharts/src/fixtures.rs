//! Embedded CSV fixtures: the validation datasets and their golden
//! expectation series, plus a checksum manifest guarding against drift.

use sha2::{Digest, Sha256};

macro_rules! fixture_list {
    ($($name:literal),* $(,)?) => {
        /// Every embedded fixture as (file name, contents).
        pub static FIXTURES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../fixtures/", $name)))),*
        ];
    };
}

fixture_list![
    "golden_3_2.csv",
    "golden_3_3.csv",
    "golden_4_1.csv",
    "golden_4_2.csv",
    "golden_4_3.csv",
    "golden_5_1.csv",
    "golden_5_2.csv",
    "golden_5_3.csv",
    "golden_5_4.csv",
    "golden_5_5.csv",
    "golden_5_6.csv",
    "golden_6_10.csv",
    "golden_6_11.csv",
    "golden_6_12.csv",
    "golden_6_4.csv",
    "golden_6_5.csv",
    "golden_6_6.csv",
    "golden_6_7.csv",
    "golden_6_8.csv",
    "golden_6_9.csv",
    "table_3_1.csv",
    "table_3_4.csv",
    "table_4_1_x.csv",
    "table_4_2.csv",
    "table_4_3.csv",
    "table_5_1.csv",
    "table_5_5.csv",
    "table_5_6.csv",
    "table_6_1.csv",
    "table_6_11.csv",
    "table_6_2.csv",
    "table_6_3.csv",
    "table_6_4.csv",
    "table_6_5.csv",
    "table_6_6.csv",
    "table_6_7.csv",
];

/// Checksum manifest for the fixture set.
pub const SHA256SUMS: &str = include_str!("../fixtures/SHA256SUMS");

/// Look up an embedded fixture by file name.
pub fn fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

/// Verify every fixture against the checksum manifest. Returns the list of
/// problems (empty when everything matches).
pub fn verify_checksums() -> Vec<String> {
    let mut problems = Vec::new();
    let mut listed = std::collections::BTreeMap::new();
    for line in SHA256SUMS.lines() {
        if let Some((hash, name)) = line.split_once("  ") {
            listed.insert(name.trim().to_string(), hash.to_string());
        }
    }
    for (name, content) in FIXTURES {
        let digest = format!("{:x}", Sha256::digest(content.as_bytes()));
        match listed.remove(*name) {
            Some(expect) if expect == digest => {}
            Some(expect) => problems.push(format!(
                "{name}: checksum mismatch (manifest {expect}, embedded {digest})"
            )),
            None => problems.push(format!("{name}: missing from the checksum manifest")),
        }
    }
    for (name, _) in listed {
        problems.push(format!("{name}: listed in the manifest but not embedded"));
    }
    problems
}

/// Parse an embedded fixture into (header, numeric rows); empty cells become
/// None. Fixtures are plain comma-separated files without quoting.
pub fn numeric_rows(name: &str) -> Option<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let content = fixture(name)?;
    let mut lines = content.lines();
    let header: Vec<String> = lines.next()?.split(',').map(|s| s.to_string()).collect();
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .map(|c| {
                    let c = c.trim();
                    if c.is_empty() {
                        None
                    } else {
                        c.parse::<f64>().ok()
                    }
                })
                .collect()
        })
        .collect();
    Some((header, rows))
}
