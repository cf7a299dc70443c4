//! Writes every figure's data series to `target/figures`.

use std::path::Path;

use noisyodds::figures::{write_figure, FigureGrid, FIGURE_IDS};
use noisyodds::Result;

fn main() -> Result<()> {
    let dir = Path::new("target/figures");
    for id in FIGURE_IDS {
        for path in write_figure(id, &FigureGrid::default(), dir)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}
