//! Configurations shipped with the binary.

/// A configuration compiled into the binary.
#[derive(Debug, Clone, Copy)]
pub struct Bundled {
    pub name: &'static str,
    /// The numerical experiment it reproduces.
    pub reproduces: &'static str,
    pub text: &'static str,
}

macro_rules! bundled {
    ($name:literal, $what:literal) => {
        Bundled {
            name: $name,
            reproduces: $what,
            text: include_str!(concat!("../../../configs/", $name, ".cfg")),
        }
    };
}

pub const ALL: &[Bundled] = &[
    bundled!("ex1_case1", "Example 1, Case I"),
    bundled!("ex1_case1_desk", "Example 1, Case I (desk scale)"),
    bundled!("ex1_case2", "Example 1, Case II"),
    bundled!("ex1_case2_desk", "Example 1, Case II (desk scale)"),
    bundled!("ex2_case1", "Example 2, Case I"),
    bundled!("ex2_case1_desk", "Example 2, Case I (desk scale)"),
    bundled!("ex2_case2", "Example 2, Case II"),
    bundled!("ex2_case2_desk", "Example 2, Case II (desk scale)"),
    bundled!("ex2_mixed", "Example 2, mixed law"),
    bundled!("ex2_mixed_desk", "Example 2, mixed law (desk scale)"),
    bundled!("ex3_case1", "Example 3, Case I"),
    bundled!("ex3_case1_desk", "Example 3, Case I (desk scale)"),
    bundled!("ex3_case2", "Example 3, Case II"),
    bundled!("ex3_case2_desk", "Example 3, Case II (desk scale)"),
    bundled!("ex4_case1", "Example 4, Case I"),
    bundled!("ex4_case1_desk", "Example 4, Case I (desk scale)"),
    bundled!("ex4_case2", "Example 4, Case II"),
    bundled!("ex4_case2_desk", "Example 4, Case II (desk scale)"),
    bundled!("ex5_case1", "Example 5, Case I"),
    bundled!("ex5_case1_desk", "Example 5, Case I (desk scale)"),
    bundled!("ex5_case2", "Example 5, Case II"),
    bundled!("ex5_case2_desk", "Example 5, Case II (desk scale)"),
    bundled!("ex6_case1", "Example 6, Case I"),
    bundled!("ex6_case1_desk", "Example 6, Case I (desk scale)"),
    bundled!("ex6_case2", "Example 6, Case II"),
    bundled!("ex6_case2_desk", "Example 6, Case II (desk scale)"),
    bundled!("ex7_case1", "Example 7, Case I"),
    bundled!("ex7_case1_desk", "Example 7, Case I (desk scale)"),
    bundled!("ex7_case2", "Example 7, Case II"),
    bundled!("ex7_case2_desk", "Example 7, Case II (desk scale)"),
    bundled!("ex8_case1", "Example 8, Case I"),
    bundled!("ex8_case1_desk", "Example 8, Case I (desk scale)"),
    bundled!("ex8_case2", "Example 8, Case II"),
    bundled!("ex8_case2_desk", "Example 8, Case II (desk scale)"),
    bundled!("ex9_case1", "Example 9, Case I"),
    bundled!("ex9_case1_desk", "Example 9, Case I (desk scale)"),
    bundled!("ex9_case2", "Example 9, Case II"),
    bundled!("ex9_case2_desk", "Example 9, Case II (desk scale)"),
    bundled!("kappa_alpha_demo", "joint gain and damping demonstration"),
    bundled!("two_param_demo", "two-gain wave demonstration"),
];

pub fn find(name: &str) -> Option<Bundled> {
    ALL.iter().copied().find(|b| b.name == name)
}
