//! Cores, eigencones and orbit structure of nonnegative matrices, in
//! max-times algebra and in classical nonnegative algebra.
//!
//! The core of `A` is the intersection of the column spans of its powers.
//! It is generated by the eigencones of a suitable power of `A`, and `A`
//! permutes its extremal rays. [`compute_core`] returns those rays together
//! with the permutation; [`oracle`] checks the result by brute force.

pub mod algebra;
pub mod cores;
pub mod dot;
pub mod eigencones;
pub mod error;
pub mod graphs;
pub mod io;
pub mod oracle;
pub mod report;
pub mod spectral;

pub use algebra::{membership, Matrix, Membership, Semiring, Tolerance, Vector};
pub use cores::{act, classify_periodicity, compute_core, CoreDescription, PeriodicityClass, PeriodicityReport};
pub use eigencones::{analyze_spectrum, eigencone_of_power, periods, sum_eigencone, Eigencone, PeriodReport};
pub use error::{Error, Result};
pub use graphs::{frobenius_form, Digraph, FrobeniusForm};
pub use io::{parse_matrix, read_matrix, MatrixFile};
pub use oracle::{verify_bundle, OracleReport, VerifyConfig};
pub use report::{build_report, Report, ReportOptions};
pub use spectral::{critical_graph, kleene_star, max_cycle_mean, spectrum, visualize_strict, CriticalGraph};
