// Generated by scripts/gen_rkn10.py. Do not edit by hand.
//
// Extrapolated midpoint rule (substeps 2, 4, 6, 8, 10) in Nystrom form.

#![allow(clippy::excessive_precision)]

pub(super) const STAGES: usize = 26;

pub(super) const C: [f64; STAGES] = [
    0.0,
    5.000000000000000000000000e-1,
    2.500000000000000000000000e-1,
    5.000000000000000000000000e-1,
    7.500000000000000000000000e-1,
    1.666666666666666666666667e-1,
    3.333333333333333333333333e-1,
    5.000000000000000000000000e-1,
    6.666666666666666666666667e-1,
    8.333333333333333333333333e-1,
    1.250000000000000000000000e-1,
    2.500000000000000000000000e-1,
    3.750000000000000000000000e-1,
    5.000000000000000000000000e-1,
    6.250000000000000000000000e-1,
    7.500000000000000000000000e-1,
    8.750000000000000000000000e-1,
    1.000000000000000000000000e-1,
    2.000000000000000000000000e-1,
    3.000000000000000000000000e-1,
    4.000000000000000000000000e-1,
    5.000000000000000000000000e-1,
    6.000000000000000000000000e-1,
    7.000000000000000000000000e-1,
    8.000000000000000000000000e-1,
    9.000000000000000000000000e-1,
];

/// Strictly lower triangle, row-major: row p holds a[p][0..p].
pub(super) const A_LOWER: [f64; 325] = [
    // row 1
    0.0,
    // row 2
    0.0,
    0.0,
    // row 3
    1.250000000000000000000000e-1,
    0.0,
    0.0,
    // row 4
    0.0,
    0.0,
    2.500000000000000000000000e-1,
    0.0,
    // row 5
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    // row 6
    5.555555555555555555555556e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    // row 7
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    1.111111111111111111111111e-1,
    0.0,
    // row 8
    1.111111111111111111111111e-1,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    1.111111111111111111111111e-1,
    0.0,
    // row 9
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    2.222222222222222222222222e-1,
    0.0,
    1.111111111111111111111111e-1,
    0.0,
    // row 10
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    // row 11
    3.125000000000000000000000e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    // row 12
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    6.250000000000000000000000e-2,
    0.0,
    // row 13
    6.250000000000000000000000e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    6.250000000000000000000000e-2,
    0.0,
    // row 14
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    1.250000000000000000000000e-1,
    0.0,
    6.250000000000000000000000e-2,
    0.0,
    // row 15
    9.375000000000000000000000e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    1.250000000000000000000000e-1,
    0.0,
    6.250000000000000000000000e-2,
    0.0,
    // row 16
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    1.875000000000000000000000e-1,
    0.0,
    1.250000000000000000000000e-1,
    0.0,
    6.250000000000000000000000e-2,
    0.0,
    // row 17
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    // row 18
    2.000000000000000000000000e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    // row 19
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    4.000000000000000000000000e-2,
    0.0,
    // row 20
    4.000000000000000000000000e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    4.000000000000000000000000e-2,
    0.0,
    // row 21
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    8.000000000000000000000000e-2,
    0.0,
    4.000000000000000000000000e-2,
    0.0,
    // row 22
    6.000000000000000000000000e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    8.000000000000000000000000e-2,
    0.0,
    4.000000000000000000000000e-2,
    0.0,
    // row 23
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    1.200000000000000000000000e-1,
    0.0,
    8.000000000000000000000000e-2,
    0.0,
    4.000000000000000000000000e-2,
    0.0,
    // row 24
    8.000000000000000000000000e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    1.200000000000000000000000e-1,
    0.0,
    8.000000000000000000000000e-2,
    0.0,
    4.000000000000000000000000e-2,
    0.0,
    // row 25
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    1.600000000000000000000000e-1,
    0.0,
    1.200000000000000000000000e-1,
    0.0,
    8.000000000000000000000000e-2,
    0.0,
    4.000000000000000000000000e-2,
    0.0,
];

pub(super) const B: [f64; STAGES] = [
    4.304177689594356261022928e-2,
    0.0,
    0.0,
    -1.693121693121693121693122e-2,
    0.0,
    0.0,
    3.254464285714285714285714e-1,
    0.0,
    1.627232142857142857142857e-1,
    0.0,
    0.0,
    -1.083597883597883597883598e0,
    0.0,
    -7.223985890652557319223986e-1,
    0.0,
    -3.611992945326278659611993e-1,
    0.0,
    0.0,
    8.611662257495590828924162e-1,
    0.0,
    6.458746693121693121693122e-1,
    0.0,
    4.305831128747795414462081e-1,
    0.0,
    2.152915564373897707231041e-1,
    0.0,
];

pub(super) const BHAT: [f64; STAGES] = [
    0.0,
    1.157407407407407407407407e-4,
    -3.386243386243386243386243e-2,
    0.0,
    -3.386243386243386243386243e-2,
    4.881696428571428571428571e-1,
    0.0,
    4.881696428571428571428571e-1,
    0.0,
    4.881696428571428571428571e-1,
    -1.444797178130511463844797e0,
    0.0,
    -1.444797178130511463844797e0,
    0.0,
    -1.444797178130511463844797e0,
    0.0,
    -1.444797178130511463844797e0,
    1.076457782186948853615520e0,
    0.0,
    1.076457782186948853615520e0,
    0.0,
    1.076457782186948853615520e0,
    0.0,
    1.076457782186948853615520e0,
    0.0,
    1.076457782186948853615520e0,
];
