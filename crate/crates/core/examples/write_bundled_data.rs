//! Regenerates the files in `data/`.

use std::path::Path;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::create_dir_all(&dir)?;
    for (name, text) in thermoforce::cli::bundled_files()? {
        std::fs::write(dir.join(name), text)?;
        println!("wrote data/{name}");
    }
    Ok(())
}
