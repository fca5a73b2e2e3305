//! Fixtures shared by the benchmarks.

use ordo::{braid_delta_sq, Cone, Element, FlagOrdering, RealConstant, RhoContext};

pub fn sqrt2_flag() -> Cone {
    Cone::Flag(FlagOrdering::new(vec![vec![RealConstant::integer(1), RealConstant::sqrt(2)]]).expect("total"))
}

pub fn delta_sq_context(strands: usize) -> RhoContext {
    let x = Element::Braid(braid_delta_sq(strands).expect("strands ≥ 2"));
    RhoContext::whole_group(Cone::dehornoy(strands), x, 1 << 20).expect("valid anchor")
}

/// A fixed freely reduced word of the given length alternating over all
/// generators with mixed signs.
pub fn mixed_word(strands: usize, len: usize) -> Element {
    let letters: Vec<i32> = (0..len)
        .map(|i| {
            let g = (i % (strands - 1)) as i32 + 1;
            if (i / (strands - 1)) % 3 == 2 { -g } else { g }
        })
        .collect();
    Element::braid(strands, &letters).expect("valid letters")
}
