//! Shared fixtures for the benchmarks.

use bdl_core::julg_valette::op_b;
use bdl_core::operator::TruncatedOperator;
use bdl_core::FreeGroup;

pub fn rank_two() -> FreeGroup {
    FreeGroup::new(2).expect("rank 2")
}

/// `b` on `B_R`, the operator whose index the benchmarks time.
pub fn julg_valette(radius: usize) -> TruncatedOperator {
    op_b(rank_two(), radius).expect("radius within limits")
}
