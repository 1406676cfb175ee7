//! Small worked matrices with known inverses, shared by tests and examples.

use crate::numkernel::CMatrix;

/// Index 2, not core-EP. `A^d = [[1/2,0,1/4],[0,0,0],[0,0,0]]`.
pub fn a1() -> CMatrix {
    CMatrix::from_real_rows(&[[2.0, 0.0, 1.0], [0.0, 0.0, 2.0], [0.0, 0.0, 0.0]])
}

/// Index 2, not core-EP, but its MPDMP matrix equals its MPD inverse.
pub fn a2() -> CMatrix {
    CMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [1.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
}

/// Index 2. Lies below [`b3`] in the Drazin and DMP relations only.
pub fn a3() -> CMatrix {
    CMatrix::from_real_rows(&[[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [2.0, 2.0, 0.0]])
}

pub fn b3() -> CMatrix {
    CMatrix::from_real_rows(&[[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 1.0]])
}
