//! Stick-and-ball renderings of complexes: a spring embedding in 3D plus
//! XYZ, Graphviz and JSON writers.

pub mod export;
pub mod layout;
pub mod style;

pub use export::{export_dot, export_json, export_xyz, import_json, ComplexDocument, Coordinate};
pub use layout::{embed, Layout, LayoutNode, DEFAULT_ITERATIONS};
pub use style::StyleMap;
