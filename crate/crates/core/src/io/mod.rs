//! Configuration, command dispatch and file formats.

mod config;
mod files;
mod run;

pub use config::{
    emit_config, parse_config, AtomConfig, BrownianConfig, Cx, DirectionConfig, FieldConfig, GridConfig, McConfig,
    MeasureConfig, ModulatorConfig, PhiConfig, ProbeConfig, PsiConfig, RunConfig, SymbolConfig, SymbolForm,
    XRuleConfig,
};
pub use files::{
    fmt17, read_field, read_grid, write_field, write_field_csv, write_grid, write_grid_csv, write_probe_csv,
    FIELD_MAGIC, GRID_MAGIC,
};
pub use run::{run_command, Command, Outcome};
