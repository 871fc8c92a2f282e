use navhist::verify::{enumerate_reachable, FrameSchema};
use navhist::semantics::Preset;

fn main() {
    let schema = FrameSchema::new(1, 1, 1, 2);
    let states = enumerate_reachable(&schema, &Preset::Patched.mode());
    println!("(1,1,1,2): {} states", states.len());
    for s in &states { println!("  {s}"); }
    let schema = FrameSchema::new(1, 1, 2, 4);
    let states = enumerate_reachable(&schema, &Preset::Patched.mode());
    println!("(1,1,2,4): {} states", states.len());
    for s in &states { println!("  {s}"); }
}
