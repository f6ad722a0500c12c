//! The 12-object fraud toy table (one labeled outlier, object 1). Used as the
//! reference fixture throughout the test suites.

use crate::dataset::CategoricalDataset;

pub const FEATURES: [&str; 4] = ["Gender", "Education", "Marriage", "Income"];

/// Value domains in presentation order; global ids follow this order.
pub const DOMAINS: [&[&str]; 4] = [
    &["male", "female"],
    &["bachelor", "master", "PhD"],
    &["married", "single", "divorced"],
    &["low", "medium", "high"],
];

pub const ROWS: [([&str; 4], bool); 12] = [
    (["male", "master", "divorced", "low"], true),
    (["female", "master", "married", "medium"], false),
    (["male", "master", "single", "high"], false),
    (["male", "bachelor", "married", "medium"], false),
    (["female", "master", "divorced", "medium"], false),
    (["male", "PhD", "married", "high"], false),
    (["male", "master", "single", "high"], false),
    (["female", "PhD", "single", "medium"], false),
    (["male", "PhD", "married", "medium"], false),
    (["male", "bachelor", "single", "low"], false),
    (["female", "PhD", "married", "medium"], false),
    (["male", "master", "single", "low"], false),
];

/// Value names in global id order.
pub fn value_order() -> Vec<&'static str> {
    DOMAINS.iter().flat_map(|d| d.iter().copied()).collect()
}

pub fn dataset() -> CategoricalDataset {
    let mut codes = Vec::with_capacity(ROWS.len() * 4);
    for (row, _) in ROWS.iter() {
        for (f, cell) in row.iter().enumerate() {
            codes.push(DOMAINS[f].iter().position(|v| v == cell).unwrap() as u32);
        }
    }
    CategoricalDataset::from_local_codes(
        FEATURES.iter().map(|s| s.to_string()).collect(),
        DOMAINS.iter().map(|d| d.iter().map(|s| s.to_string()).collect()).collect(),
        ROWS.len(),
        codes,
        Some(ROWS.iter().map(|r| r.1).collect()),
    )
    .expect("toy table is well formed")
}

/// Global id of a toy value by name (names are unique across features).
pub fn value(ds: &CategoricalDataset, name: &str) -> usize {
    ds.value_names()
        .iter()
        .position(|v| v == name)
        .unwrap_or_else(|| panic!("no toy value {name}"))
}

/// The table as CSV text with a `Cheat` label column.
pub fn csv() -> String {
    let mut s = format!("{},Cheat\n", FEATURES.join(","));
    for (row, label) in ROWS.iter() {
        s.push_str(&format!("{},{}\n", row.join(","), if *label { "yes" } else { "no" }));
    }
    s
}
