use netmend::generators::{gen_er, gen_power_law, power_law_cutoff, GeneratorSpec};
use netmend::graph::Graph;
use std::collections::BTreeMap;

#[test]
fn er_edge_count_is_binomial() {
    let (n, p) = (500usize, 0.01);
    let pairs = (n * (n - 1) / 2) as f64;
    let mean = pairs * p;
    let sigma = (pairs * p * (1.0 - p)).sqrt();
    let seeds = 200;
    let total: usize = (0..seeds)
        .map(|s| gen_er::<f64>(n, p, s).unwrap().edge_count())
        .sum();
    let observed = total as f64 / seeds as f64;
    // the mean of 200 draws has standard error sigma / sqrt(200)
    let se = sigma / (seeds as f64).sqrt();
    assert!(
        (observed - mean).abs() <= 3.0 * se,
        "mean {observed} vs {mean} (se {se})"
    );
    for s in 0..seeds {
        let m = gen_er::<f64>(n, p, s).unwrap().edge_count() as f64;
        assert!((m - mean).abs() <= 5.0 * sigma, "seed {s}: m = {m}");
    }
}

fn loglog_slope(g: &Graph<f64>) -> f64 {
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for k in g.degrees() {
        if k > 0 {
            *hist.entry(k).or_default() += 1;
        }
    }
    let pts: Vec<(f64, f64)> = hist
        .iter()
        .map(|(&k, &c)| ((k as f64).ln(), (c as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn power_law_slope_in_range() {
    let slopes: Vec<f64> = (0..20)
        .map(|s| loglog_slope(&gen_power_law(500, 2.1, s).unwrap()))
        .collect();
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    assert!(
        (-2.6..=-1.6).contains(&mean),
        "mean slope {mean}, slopes {slopes:?}"
    );
}

#[test]
fn steep_exponent_gives_a_matching() {
    let g: Graph<f64> = gen_power_law(500, 50.0, 1).unwrap();
    let ones = g.degrees().iter().filter(|&&k| k == 1).count();
    assert!(ones as f64 >= 0.95 * 500.0, "{ones} degree-one nodes");
    assert!(
        (g.edge_count() as f64 - 250.0).abs() <= 15.0,
        "m = {}",
        g.edge_count()
    );
}

#[test]
fn generators_are_simple_and_deterministic() {
    for spec in [
        GeneratorSpec::ErdosRenyi {
            n: 120,
            p: 0.05,
            seed: 4,
        },
        GeneratorSpec::PowerLaw {
            n: 300,
            gamma: 2.1,
            seed: 4,
        },
        GeneratorSpec::PowerLaw {
            n: 3,
            gamma: 2.5,
            seed: 9,
        },
    ] {
        let a: Graph<f64> = spec.generate().unwrap();
        let b: Graph<f64> = spec.generate().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.node_count(), spec.node_count());
        for e in a.edges() {
            assert!(e.u < e.v);
        }
        let degree_sum: usize = a.degrees().iter().sum();
        assert_eq!(degree_sum, 2 * a.edge_count());
    }
    assert_eq!(power_law_cutoff(500), 22);
}

#[test]
fn er_parameters_validated() {
    assert!(gen_er::<f64>(1, 0.5, 0).is_err());
    assert!(gen_er::<f64>(10, 1.5, 0).is_err());
    assert!(gen_power_law::<f64>(10, 2.0, 0).is_err());
}
