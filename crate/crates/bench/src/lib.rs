//! Fixed instances shared by the benchmarks.

use robustflow_core::instances::{gen_p2, gen_p3, gen_rmat, RmatParams};
use robustflow_core::FlowNetwork;

/// A named instance and the k it is solved with.
pub struct Fixture {
    pub name: &'static str,
    pub net: FlowNetwork,
    pub k: usize,
}

/// Small members of each generated family, sized to finish in well under a
/// second each.
pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "p2_n4_m0_6",
            net: gen_p2(4, 6, 1).expect("valid parameters"),
            k: 3,
        },
        Fixture {
            name: "p3_n2_m1_M2",
            net: gen_p3(2, 1, 2).expect("valid parameters"),
            k: 2,
        },
        Fixture {
            name: "rmat_64x200",
            net: gen_rmat(64, 200, RmatParams::RMAT_A, 1).expect("valid parameters"),
            k: 2,
        },
    ]
}
