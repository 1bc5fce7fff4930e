//! Build a random nearest-neighbour chain, split it in half and print the
//! interaction constants and the three term buckets.

use effham::corpus::random_nearest_neighbour;
use effham::lattice::{decompose, RegionSplit};

fn main() -> effham::Result<()> {
    let model = random_nearest_neighbour(8, 42, None)?;
    let c = model.constants()?;
    println!("{}: range {}  strength {:.4}  locality {}", model.id, c.range_r, c.strength_j, c.locality_n);

    let region = (0..4).collect();
    let split = RegionSplit::minimal(&model.lattice, region, c.range_r)?;
    println!("L = {:?}  boundary = {:?}", split.region(), split.boundary());

    let d = decompose(&model.interaction, &split)?;
    println!("inner L terms {:?}", d.inner_l);
    println!("boundary terms {:?}", d.boundary);
    println!("inner complement terms {:?}", d.inner_lc);
    Ok(())
}
