//! Built-in fixture data: the three worked example codes and the reference
//! cycles, stored verbatim so tests and the CLI do not depend on the
//! ordering conventions of the general constructors.
//!
//! Field encoding reminder for GF(4) = GF(2)[α]/(α²+α+1): index 0 = 0,
//! 1 = 1, 2 = α, 3 = α² = α+1.

use crate::cayley::Cycle;
use crate::codes::LinearCode;
use crate::gf::field_create;

/// The [7,3]₂ code (dual of the binary Hamming code) used by the pedagogical
/// 7-qubit example: rows are all nonzero vectors of F_2³ in ascending binary
/// order.
pub fn example_code_7_3_2() -> LinearCode {
    let f = field_create(2, 1).expect("GF(2)");
    let rows = vec![
        vec![1, 0, 0],
        vec![0, 1, 0],
        vec![1, 1, 0],
        vec![0, 0, 1],
        vec![1, 0, 1],
        vec![0, 1, 1],
        vec![1, 1, 1],
    ];
    LinearCode::new(f, &rows, "example1").expect("fixture generator is valid")
}

/// The [5,2]₄ code (dual of the [5,3,3]₄ Hamming code) for 2-local
/// decoupling on 5 qudits of dimension 2 via the pair representation.
pub fn example_code_5_2_4() -> LinearCode {
    let f = field_create(2, 2).expect("GF(4)");
    let rows = vec![
        vec![1, 0],
        vec![0, 1],
        vec![1, 3],
        vec![3, 3],
        vec![3, 1],
    ];
    LinearCode::new(f, &rows, "example2").expect("fixture generator is valid")
}

/// The [16,9]₂ code (dual of the [16,7,6]₂ extended BCH code) for diagonal
/// 5-local decoupling on 16 qubits: the identity on top of seven parity
/// rows.
pub fn example_code_16_9_2() -> LinearCode {
    let f = field_create(2, 1).expect("GF(2)");
    let mut rows: Vec<Vec<u32>> = (0..9)
        .map(|i| (0..9).map(|j| u32::from(i == j)).collect())
        .collect();
    rows.push(vec![1, 1, 0, 0, 1, 1, 1, 0, 0]);
    rows.push(vec![0, 1, 1, 0, 0, 1, 1, 1, 0]);
    rows.push(vec![0, 0, 1, 1, 0, 0, 1, 1, 1]);
    rows.push(vec![1, 1, 0, 1, 0, 1, 1, 1, 1]);
    rows.push(vec![1, 0, 1, 0, 0, 1, 0, 1, 1]);
    rows.push(vec![1, 0, 0, 1, 1, 1, 0, 0, 1]);
    rows.push(vec![1, 0, 0, 0, 1, 0, 1, 1, 1]);
    LinearCode::new(f, &rows, "example3").expect("fixture generator is valid")
}

/// The reference Eulerian cycle on Γ(Z_2³, {e₁,e₂,e₃}) that the worked
/// 7-qubit example is built from. Length 24; shipping it verbatim keeps the
/// derived array, transition schedule, and restriction fixtures stable.
pub fn example_cycle_z2_3() -> Cycle {
    let vertices: Vec<Vec<u32>> = vec![
        vec![0, 0, 0],
        vec![1, 0, 0],
        vec![1, 1, 0],
        vec![0, 1, 0],
        vec![0, 0, 0],
        vec![0, 1, 0],
        vec![1, 1, 0],
        vec![1, 0, 0],
        vec![0, 0, 0],
        vec![0, 0, 1],
        vec![1, 0, 1],
        vec![1, 0, 0],
        vec![1, 0, 1],
        vec![1, 1, 1],
        vec![1, 1, 0],
        vec![1, 1, 1],
        vec![0, 1, 1],
        vec![0, 1, 0],
        vec![0, 1, 1],
        vec![0, 0, 1],
        vec![0, 1, 1],
        vec![1, 1, 1],
        vec![1, 0, 1],
        vec![0, 0, 1],
    ];
    Cycle::new(2, 3, vertices).expect("fixture cycle is valid")
}

/// The balanced (non-Eulerian) reference cycle on Z_2² with labels (0,1) and
/// (1,1): exactly the rows-{5,7} restriction of the array built from
/// [`example_code_7_3_2`] and [`example_cycle_z2_3`], with μ_{(0,1)} = 2 and
/// μ_{(1,1)} = 4.
pub fn example_cycle_z2_2() -> Cycle {
    let vertices: Vec<Vec<u32>> = vec![
        vec![0, 0],
        vec![1, 1],
        vec![1, 0],
        vec![0, 1],
        vec![0, 0],
        vec![0, 1],
        vec![1, 0],
        vec![1, 1],
        vec![0, 0],
        vec![1, 1],
        vec![0, 0],
        vec![1, 1],
        vec![0, 0],
        vec![0, 1],
        vec![1, 0],
        vec![0, 1],
        vec![1, 0],
        vec![0, 1],
        vec![1, 0],
        vec![1, 1],
        vec![1, 0],
        vec![0, 1],
        vec![0, 0],
        vec![1, 1],
    ];
    Cycle::new(2, 2, vertices).expect("fixture cycle is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_dimensions() {
        let c1 = example_code_7_3_2();
        assert_eq!((c1.q(), c1.n(), c1.k()), (2, 7, 3));
        let c2 = example_code_5_2_4();
        assert_eq!((c2.q(), c2.n(), c2.k()), (4, 5, 2));
        let c3 = example_code_16_9_2();
        assert_eq!((c3.q(), c3.n(), c3.k()), (2, 16, 9));
        assert_eq!(example_cycle_z2_3().len(), 24);
        assert_eq!(example_cycle_z2_2().len(), 24);
    }

    #[test]
    fn reference_cycle_transitions_stay_in_the_standard_set() {
        let c = example_cycle_z2_3();
        for t in c.transitions() {
            assert_eq!(t.iter().filter(|&&x| x != 0).count(), 1);
        }
    }

    #[test]
    fn restriction_fixture_matches_the_big_cycle() {
        // rows 5 and 7 (1-based) of the example-1 array trace exactly the
        // small fixture cycle
        let code = example_code_7_3_2();
        let cycle = example_cycle_z2_3();
        let restricted: Vec<Vec<u32>> = cycle
            .vertices()
            .iter()
            .map(|m| {
                let w = code.encode(m).unwrap();
                vec![w[4], w[6]]
            })
            .collect();
        assert_eq!(restricted, example_cycle_z2_2().vertices());
    }

    #[test]
    fn example3_is_dual_to_the_extended_bch_code() {
        let code = example_code_16_9_2();
        let bch = crate::codes::bch_ext_code(2, 4, 6).unwrap().code;
        let f = code.field();
        for m1 in 0..512u64 {
            let c = code.encode_index(m1);
            for m2 in 0..128u64 {
                let d = bch.encode_index(m2);
                let mut dot = 0u32;
                for (a, b) in c.iter().zip(&d) {
                    dot = f.add_idx(dot, f.mul_idx(*a, *b));
                }
                assert_eq!(dot, 0);
            }
        }
        // dimensions complement: 9 + 7 = 16, so they are exact duals
        assert_eq!(code.k() + bch.k(), code.n());
    }
}
