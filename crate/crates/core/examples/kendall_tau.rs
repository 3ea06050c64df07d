//! Kendall tau-b and the normalized multi-problem score.

use zc_evolve::fitness::{kendall_tau, normalized_score, ScoreBounds, TauVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = [1.0, 2.0, 3.0, 4.0];
    println!("identical order  {}", kendall_tau(&x, &x)?);
    println!("one swap         {}", kendall_tau(&x, &[1.0, 3.0, 2.0, 4.0])?);
    println!("reversed         {}", kendall_tau(&x, &[4.0, 3.0, 2.0, 1.0])?);
    println!("with ties        {:.6}", kendall_tau(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0])?);
    println!("constant proxy   {}", kendall_tau(&[5.0; 4], &x)?);

    // per-problem running min/max of tau, then the sum of min-max terms
    let population = [
        TauVector(vec![0.2, 0.5, -0.1]),
        TauVector(vec![0.6, 0.1, 0.3]),
        TauVector(vec![0.4, 0.4, 0.4]),
    ];
    let mut bounds = ScoreBounds::empty(3);
    for t in &population {
        bounds.update(t);
    }
    for t in &population {
        println!("{:?} -> score {:.4}", t.0, normalized_score(t, &bounds)?.0);
    }
    Ok(())
}
