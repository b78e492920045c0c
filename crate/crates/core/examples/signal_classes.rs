//! Lattice cube classes, separated subcollections and the class file format.

use ising_scan::signals::{disjoint_subcollection, make_lattice_cube_class, read_class, validate_class, write_class};

fn main() -> ising_scan::Result<()> {
    let class = make_lattice_cube_class(2, 12, 9)?;
    let geom = class.geometry().expect("cube class");
    println!("{} cubes of edge {} (size {})", class.len(), geom.edge, class.set_size());
    let sub = disjoint_subcollection(&class, 4)?;
    println!("{} cubes at distance >= 4", sub.len());
    println!("{:?}", validate_class(&class, Some(&sub)));

    let mut buf = Vec::new();
    write_class(&sub, &mut buf)?;
    assert_eq!(read_class(buf.as_slice())?.sets(), sub.sets());
    print!("{}", String::from_utf8_lossy(&buf).lines().take(3).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
