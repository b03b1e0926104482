//! Desk-scale sample models shipped with the crate.

pub const CHILLY_PATH: &str = include_str!("../models/chilly_path.model");
pub const COLD_PAIR: &str = include_str!("../models/cold_pair.model");
pub const MIXED: &str = include_str!("../models/mixed.model");
pub const HOT: &str = include_str!("../models/hot.model");
pub const TRIANGLE: &str = include_str!("../models/triangle.model");
pub const COOL: &str = include_str!("../models/cool.model");

/// `(name, text)` for every bundled model.
pub const ALL: [(&str, &str); 6] = [
    ("chilly_path", CHILLY_PATH),
    ("cold_pair", COLD_PAIR),
    ("mixed", MIXED),
    ("hot", HOT),
    ("triangle", TRIANGLE),
    ("cool", COOL),
];

/// Text of a bundled model by name.
pub fn by_name(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
