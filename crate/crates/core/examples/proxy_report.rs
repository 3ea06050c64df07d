//! Leaderboard of the planted dataset's columns against the planted formula,
//! plus a feature substitution on the evolved fixture proxy.

use std::path::Path;

use zc_evolve::dataset::load_manifest;
use zc_evolve::expr::{parse, print_canonical};
use zc_evolve::synthetic::PLANTED_EXPR;
use zc_evolve::zoo::{evaluate_report, resolve_proxy, substitute_feature, NamedProxy, ReportFormat, BASELINE_FEATURES, EQ2_EXPR};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dataset = load_manifest(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/planted/manifest.json"))?;
    let names = dataset.feature_names();
    let mut proxies = names
        .iter()
        .map(|n| resolve_proxy(n, names))
        .collect::<Result<Vec<_>, _>>()?;
    proxies.push(NamedProxy::tree("planted", parse(PLANTED_EXPR, names)?));
    let table = evaluate_report(&proxies, &dataset.full_view().matrices())?;
    print!("{}", table.render(ReportFormat::Markdown));

    let suite: Vec<String> = BASELINE_FEATURES.iter().map(|s| s.to_string()).collect();
    let eq2 = parse(EQ2_EXPR, &suite)?;
    let swapped = substitute_feature(&eq2, "meco", "swap", &suite)?;
    println!("\nmeco -> swap: {}", print_canonical(&swapped, &suite));
    Ok(())
}
