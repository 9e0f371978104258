//! Function-field laboratory: the family E_D : y² = x³ + x + D(t) over
//! F_q(t) for monic squarefree cubics D.
//!
//! The pipeline enumerates the family, recovers each curve's unitized
//! L-polynomial from exact character-sum power sums, factors it over the
//! cyclotomic menu, analyzes bad fibers (Kodaira type, split/non-split,
//! Tamagawa numbers), evaluates |Ш| from the leading L-value, and
//! aggregates a full type census with quasi-polynomial structure checks
//! and murmuration densities. An independent Euler-product oracle
//! cross-validates every convention on random curves.

pub mod census;
pub mod curve;
pub mod field;
pub mod lpoly;
pub mod oracle;
pub mod poly;
pub mod quasi;
pub mod tables;

pub use census::{type_census, CensusResult, TypeStats};
pub use curve::{
    bad_fiber_analysis, c_infinity_for, curve_record, enumerate_family, family_warning,
    functional_sign, l_polynomial, sha_of_curve, verify_p4, BadFiberData, BadPlace, CensusTables,
    FFCurveRecord, ShaValue,
};
pub use field::{FieldCtx, PowerCoords};
pub use lpoly::{
    cyclotomic_factor, cyclotomic_poly, five_named_types, ramanujan_sum, CyclotomicType,
    UnitizedLPolynomial, CYCLOTOMIC_MENU,
};
pub use oracle::OracleCtx;
pub use quasi::{
    census_row, murmuration_density, quasi_polynomial_check, reference_rows, CensusRow, ClassFit,
    QuasiReport, Rational,
};
pub use tables::{char_sum_table, CharSumTable};
