use std::fmt;

use serde::{Deserialize, Serialize};

/// Cartan–Altland–Zirnbauer symmetry class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryClass {
    A,
    AIII,
    AI,
    BDI,
    D,
    DIII,
    AII,
    CII,
    C,
    CI,
}

impl SymmetryClass {
    pub const ALL: [SymmetryClass; 10] = [
        SymmetryClass::A,
        SymmetryClass::AIII,
        SymmetryClass::AI,
        SymmetryClass::BDI,
        SymmetryClass::D,
        SymmetryClass::DIII,
        SymmetryClass::AII,
        SymmetryClass::CII,
        SymmetryClass::C,
        SymmetryClass::CI,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| format!("{c:?}") == s)
    }
}

/// Group of strong invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupTag {
    Z,
    Z2,
    TwoZ,
    Zero,
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupTag::Z => "Z",
            GroupTag::Z2 => "Z2",
            GroupTag::TwoZ => "2Z",
            GroupTag::Zero => "0",
        })
    }
}

use GroupTag::{TwoZ as Z2x, Z, Z2, Zero as O};

/// Periodic table of strong invariants; columns are `d mod 8 = 0, 1, …, 7`.
pub const TABLE: [(SymmetryClass, [GroupTag; 8]); 10] = [
    (SymmetryClass::A, [Z, O, Z, O, Z, O, Z, O]),
    (SymmetryClass::AIII, [O, Z, O, Z, O, Z, O, Z]),
    (SymmetryClass::AI, [Z, O, O, O, Z2x, O, Z2, Z2]),
    (SymmetryClass::BDI, [Z2, Z, O, O, O, Z2x, O, Z2]),
    (SymmetryClass::D, [Z2, Z2, Z, O, O, O, Z2x, O]),
    (SymmetryClass::DIII, [O, Z2, Z2, Z, O, O, O, Z2x]),
    (SymmetryClass::AII, [Z2x, O, Z2, Z2, Z, O, O, O]),
    (SymmetryClass::CII, [O, Z2x, O, Z2, Z2, Z, O, O]),
    (SymmetryClass::C, [O, O, Z2x, O, Z2, Z2, Z, O]),
    (SymmetryClass::CI, [O, O, O, Z2x, O, Z2, Z2, Z]),
];

/// Group of strong invariants of class `caz` in dimension `d` (any `d ≥ 0`, 8-periodic).
pub fn classification_lookup(caz: SymmetryClass, d: usize) -> GroupTag {
    let row = TABLE.iter().find(|(c, _)| *c == caz).expect("every class is tabulated");
    row.1[d % 8]
}
