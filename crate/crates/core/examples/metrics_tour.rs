//! Distances between coalescing pairs: path distance, pair distance, pod distance
//! and the Hausdorff distance between sets of pairs.
//!
//! cargo run --release --example metrics_tour

use pairweb::metrics::{bar_d, d_prime, hausdorff_distance, metric_table, tilde_d, MetricParams};
use pairweb::pods::{build_pod, build_standard_pod, phi_bound, PodConventions};
use pairweb::{make_pair, PairSet, Path};

fn main() -> pairweb::Result<()> {
    let step = 0.1;
    let flat = Path::frozen(0.0, step, vec![0.0; 11])?;
    let bump = Path::frozen(0.0, step, vec![0.4, 0.35, 0.3, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])?;
    let late = Path::frozen(0.3, step, vec![0.5, 0.4, 0.4, 0.3, 0.2, 0.1, 0.0, 0.0])?;
    let apart = Path::frozen(0.0, step, vec![0.6; 11])?;

    println!("d'(flat, bump)  = {:.6}", d_prime(&flat, &bump, 24)?);
    println!("d'(flat, late)  = {:.6}", d_prime(&flat, &late, 24)?);

    let a = make_pair(flat.clone(), bump)?;
    let b = make_pair(flat.clone(), late)?;
    let c = make_pair(flat.clone(), apart)?;
    for (name, p) in [("a", &a), ("b", &b), ("c", &c)] {
        println!("pair {name}: t+ = {:.2}, t_coal = {}", p.t_plus(), p.t_coal());
    }

    let params = MetricParams::default();
    println!("bar_d(a, b)   = {:.6}", bar_d(&a, &b, params.n_max)?);
    println!("tilde_d(a, b) = {:.6}", tilde_d(&a, &b, &params)?);
    println!("tilde_d(a, c) = {:.6}  (c never coalesces)", tilde_d(&a, &c, &params)?);

    let pod = build_pod(&a);
    let standard = build_standard_pod(&pod, PodConventions::default());
    println!(
        "pod of a: length {:.2}, diameter {:.2}, standard mid value {:.4} at {:.4}",
        pod.length(),
        pod.diameter(),
        standard.mid_value(),
        standard.t_mid_tilde()
    );
    println!("phi_bound(0.125) = {:.6}", phi_bound(0.125)?);

    let named = vec![("a".to_owned(), a.clone()), ("b".to_owned(), b.clone()), ("c".to_owned(), c.clone())];
    println!("\n{}", pairweb::metrics::MetricRecord::CSV_HEADER);
    for r in metric_table(&named, &params)? {
        println!("{}", r.csv_row());
    }

    let left = PairSet::from_pairs([a, b.clone()]);
    let right = PairSet::from_pairs([b, c]);
    println!("\nd_H({{a, b}}, {{b, c}}) = {:.6}", hausdorff_distance(&left, &right, &params)?);
    Ok(())
}
