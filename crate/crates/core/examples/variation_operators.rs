//! Crossover and the three mutations on a small tree, seeded.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zc_evolve::expr::{parse, print_canonical};
use zc_evolve::gp::{crossover, hoist_mutation, point_mutation, subtree_mutation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let names: Vec<String> = ["snip", "meco", "zen"].iter().map(|s| s.to_string()).collect();
    let a = parse("(mul snip (add snip meco))", &names)?;
    let b = parse("(neg zen)", &names)?;
    let deep = parse("(mul snip (add (sqrt (div zen meco)) (neg meco)))", &names)?;
    let show = |t: &zc_evolve::ExpressionTree| print_canonical(t, &names);
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    for _ in 0..3 {
        let (c1, c2) = crossover(&a, &b, &mut rng);
        println!("crossover  {}  |  {}", show(&c1), show(&c2));
    }
    for _ in 0..3 {
        println!("subtree    {}", show(&subtree_mutation(&a, names.len(), &mut rng)));
    }
    for _ in 0..3 {
        println!("hoist      {}", show(&hoist_mutation(&deep, &mut rng)));
    }
    for _ in 0..3 {
        println!("point      {}", show(&point_mutation(&a, names.len(), &mut rng)));
    }
    Ok(())
}
