//! Exact linear algebra over `Q`, `F_p` and `Z`.

pub mod field;
pub mod integer;
pub mod matrix;

pub use field::{is_prime, Field, Scalar, MAX_PRIME};
pub use integer::{
    dot, elementary_divisors, format_vector, gcd_all, int_determinant, int_rank, is_primitive,
    primitive, smith_normal_form, solve_integer, to_big, IntMatrix, SmithForm,
};
pub use matrix::ExactMatrix;
