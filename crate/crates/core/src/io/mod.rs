//! Edge-list files, scenario execution and report emission.

pub mod edge_list;
pub mod report;
pub mod scenario;

pub use edge_list::{parse_edge_list, serialize_edge_list};
pub use report::{emit_report, Format, Outputs, Report};
pub use scenario::{load_graph, run_command, run_scenario, Command, Params, Scenario};
