//! Published reference data: the leading ODE coefficients of the matching
//! generating functions with their nonzero roots, and the six-decimal
//! central-limit parameters for every (kind, k, τ) with 2 ≤ k ≤ 7, 1 ≤ τ ≤ 4.
//!
//! The ODE coefficients were obtained by guessing from exact data and are not
//! re-derived here; they are embedded only to be validated.

use crate::loopgf::LoopKind;

/// Leading coefficient `q0` (ascending integer coefficients) and its nonzero
/// roots `(numerator, denominator)`, indexed by `k - 2`.
pub const Q0_TABLE: [(&[i64], &[(i64, i64)]); 6] = [
    // (4z - 1) z
    (&[0, -1, 4], &[(1, 4)]),
    // (16z - 1) z^2
    (&[0, 0, -1, 16], &[(1, 16)]),
    // (144z^2 - 40z + 1) z^3
    (&[0, 0, 0, 1, -40, 144], &[(1, 4), (1, 36)]),
    // (1024z^2 - 80z + 1) z^4
    (&[0, 0, 0, 0, 1, -80, 1024], &[(1, 16), (1, 64)]),
    // (14400z^3 - 4144z^2 + 140z - 1) z^5
    (
        &[0, 0, 0, 0, 0, -1, 140, -4144, 14400],
        &[(1, 4), (1, 36), (1, 100)],
    ),
    // (147456z^3 - 12544z^2 + 224z - 1) z^6
    (
        &[0, 0, 0, 0, 0, 0, -1, 224, -12544, 147456],
        &[(1, 16), (1, 64), (1, 144)],
    ),
];

/// One published cell: `(mu, sigma^2)` as six-decimal strings.
pub type Cell = (&'static str, &'static str);

/// Rows τ = 1..4, columns k = 2..7.
pub type Grid = [[Cell; 6]; 4];

pub const HAIRPIN: Grid = [
    [
        ("0.105573", "0.032260"),
        ("0.012013", "0.011202"),
        ("0.003715", "0.003641"),
        ("0.001626", "0.001612"),
        ("0.000855", "0.000852"),
        ("0.000505", "0.000504"),
    ],
    [
        ("0.061281", "0.018116"),
        ("0.009845", "0.008879"),
        ("0.003734", "0.003602"),
        ("0.001897", "0.001864"),
        ("0.001123", "0.001111"),
        ("0.000731", "0.000726"),
    ],
    [
        ("0.043900", "0.012752"),
        ("0.007966", "0.007060"),
        ("0.003200", "0.003060"),
        ("0.001693", "0.001655"),
        ("0.001035", "0.001021"),
        ("0.000692", "0.000686"),
    ],
    [
        ("0.034477", "0.009896"),
        ("0.006680", "0.005854"),
        ("0.002757", "0.002622"),
        ("0.001486", "0.001448"),
        ("0.000922", "0.000907"),
        ("0.000624", "0.000618"),
    ],
];

pub const INTERIOR: Grid = [
    [
        ("0.015403", "0.013916"),
        ("0.001185", "0.001176"),
        ("0.000264", "0.000264"),
        ("0.000090", "0.000090"),
        ("0.000039", "0.000039"),
        ("0.000019", "0.000019"),
    ],
    [
        ("0.012959", "0.011395"),
        ("0.001823", "0.001793"),
        ("0.000603", "0.000599"),
        ("0.000275", "0.000274"),
        ("0.000149", "0.000149"),
        ("0.000090", "0.000090"),
    ],
    [
        ("0.011075", "0.009570"),
        ("0.001878", "0.001837"),
        ("0.000693", "0.000688"),
        ("0.000343", "0.000341"),
        ("0.000198", "0.000198"),
        ("0.000126", "0.000126"),
    ],
    [
        ("0.009682", "0.008261"),
        ("0.001803", "0.001755"),
        ("0.000700", "0.000693"),
        ("0.000359", "0.000357"),
        ("0.000214", "0.000213"),
        ("0.000140", "0.000140"),
    ],
];

pub const BULGE: Grid = [
    [
        ("0.049845", "0.042310"),
        ("0.008982", "0.008684"),
        ("0.003094", "0.003058"),
        ("0.001422", "0.001414"),
        ("0.000770", "0.000767"),
        ("0.000463", "0.000462"),
    ],
    [
        ("0.025088", "0.021785"),
        ("0.005789", "0.005597"),
        ("0.002457", "0.002422"),
        ("0.001326", "0.001316"),
        ("0.000817", "0.000813"),
        ("0.000547", "0.000546"),
    ],
    [
        ("0.015859", "0.013979"),
        ("0.003936", "0.003814"),
        ("0.001762", "0.001737"),
        ("0.000991", "0.000984"),
        ("0.000632", "0.000629"),
        ("0.000436", "0.000435"),
    ],
    [
        ("0.011197", "0.009980"),
        ("0.002878", "0.002795"),
        ("0.001318", "0.001301"),
        ("0.000755", "0.000750"),
        ("0.000489", "0.000486"),
        ("0.000342", "0.000341"),
    ],
];

pub fn grid(kind: LoopKind) -> &'static Grid {
    match kind {
        LoopKind::Hairpin => &HAIRPIN,
        LoopKind::Interior => &INTERIOR,
        LoopKind::Bulge => &BULGE,
    }
}

/// Published `(mu, sigma^2)` for a cell, if the cell is tabulated.
pub fn published(kind: LoopKind, k: usize, tau: usize) -> Option<Cell> {
    if !(2..=7).contains(&k) || !(1..=4).contains(&tau) {
        return None;
    }
    Some(grid(kind)[tau - 1][k - 2])
}
