//! Small CSV/Markdown table writers shared by the CLI.
