//! Session-file front end for `orbilift`: a small text format for groups,
//! tensors, forms, connections and maps, and the commands that run the
//! decision procedures on them.
//!
//! ```
//! let src = "group Z2 = cyclic(2)\nlift d(y) over Z2\n";
//! let session = orbilift_cli::parse(src).unwrap();
//! let report = orbilift_cli::run(&session, &Default::default()).unwrap();
//! let result = &report.records[0].to_json()["result"];
//! assert_eq!(result["verdict"], "lifts");
//! assert_eq!(result["lifted"], "2*z*d(z)");
//! ```

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod session;

pub use parser::{parse, parse_expr, ParseError};
pub use session::{check, run, validate_thm37, CommandError, Record, Report, ResolveError, RunOptions};
