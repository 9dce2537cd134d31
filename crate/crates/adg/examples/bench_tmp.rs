use std::time::Instant;
use adg::adgraph::{build_alias, build_r};
use adg::symmetry::{aut_group, aut_group_oracle, debug_phases};

fn main() {
    for q in [9u32, 25] {
        let g = build_r(q).unwrap();
        debug_phases(&g, q);
    }
    let t = Instant::now();
    let g = build_r(7).unwrap();
    let n = aut_group_oracle(&g).unwrap();
    println!("oracle R q=7: {n} in {:?}", t.elapsed());
    let t = Instant::now();
    let g = build_alias("GQ", 5).unwrap();
    let rep = aut_group(&g).unwrap();
    println!("aut GQ q=5: order={} in {:?}", rep.order, t.elapsed());
    let t = Instant::now();
    let n = aut_group_oracle(&g).unwrap();
    println!("oracle GQ q=5: {n} in {:?}", t.elapsed());
}
