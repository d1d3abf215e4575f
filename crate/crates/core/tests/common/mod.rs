#![allow(dead_code)]

use gamow_core::{make_shell, Complex64, PhysicalScale, Potential, SearchRegion};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn unit() -> PhysicalScale {
    PhysicalScale::default()
}

pub fn shell(v0: f64) -> Potential {
    make_shell(v0, 1.0, 2.0).unwrap()
}

pub fn free() -> Potential {
    make_shell(0.0, 1.0, 2.0).unwrap()
}

pub fn shell_region() -> SearchRegion {
    SearchRegion::new(0.0, 6.0, -2.0, 0.0).unwrap()
}

/// Poles of `𝒥₊` for the `V0 = 8, a = 1, b = 2` shell in `(0, 6] × [−2, 0)`,
/// from a 40-digit mpmath root polish of the closed-form Jost function.
pub const SHELL_POLES: [(f64, f64); 3] = [
    (2.236_099_733_385_890_6, -0.019_272_048_320_322_789),
    (3.805_304_510_274_176_8, -0.333_521_122_440_184_54),
    (5.019_899_915_747_419_4, -0.508_421_223_266_053_87),
];

/// `N₁²` for the first shell pole, same source.
pub const SHELL_N1_SQ: (f64, f64) = (0.021_810_489_190_673_027, -0.029_123_771_030_492_793);
