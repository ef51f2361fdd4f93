//! Prints the built-in pattern set as TOML; redirect into a file to get a
//! starting point for per-parliament customization.

fn main() {
    print!(
        "{}",
        plenum::patterns::PatternConfig::default().to_toml_string()
    );
}
