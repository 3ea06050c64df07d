//! Parse an s-expression, print it both ways and evaluate it on a row and
//! on a column-major batch, including the protected operators.

use zc_evolve::expr::{evaluate, evaluate_batch, parse, print_canonical, print_infix};
use zc_evolve::FeatureMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let names: Vec<String> = ["zico", "l2_norm", "meco"].iter().map(|s| s.to_string()).collect();
    let tree = parse("(mul (div zico l2_norm) (sqrt meco))", &names)?;
    println!("canonical: {}", print_canonical(&tree, &names));
    println!("infix:     {}", print_infix(tree.root(), &names));
    println!("depth {} size {}", tree.depth(), tree.size());

    println!("row [2, 4, 9] -> {}", evaluate(&tree, &[2.0, 4.0, 9.0])?);
    // l2_norm = 0 trips the protected division, negative meco the |x| in sqrt
    println!("row [2, 0, -9] -> {}", evaluate(&tree, &[2.0, 0.0, -9.0])?);

    let batch = FeatureMatrix::from_rows(&[vec![1.0, 1.0, 1.0], vec![3.0, 2.0, 4.0], vec![5.0, 1e-9, 16.0]])
        .expect("rectangular rows");
    println!("batch -> {:?}", evaluate_batch(&tree, &batch)?);

    for bad in ["(add zico 2)", "(sqrt zico meco)", "zico", "(mul zico foo)"] {
        println!("{bad:<20} -> {}", parse(bad, &names).unwrap_err());
    }
    Ok(())
}
