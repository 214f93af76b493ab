//! Benchmarks for the hot construction paths: axiom validation, state
//! enumeration, and function-space materialisation.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use isw_core::axioms::check_axioms;
use isw_core::expspace::{materialize, ExpBudget};
use isw_core::fixtures::{bfly, flat2, term};
use isw_core::product::product;
use isw_core::state::enumerate_states;

fn bench_axioms(c: &mut Criterion) {
    let b = bfly();
    c.bench_function("axioms_bfly", |bench| {
        bench.iter(|| {
            let report = check_axioms(std::hint::black_box(&b));
            assert!(report.passed());
        })
    });
}

fn bench_states(c: &mut Criterion) {
    let f = Arc::new(flat2());
    let p = product(&f, &f, 16).unwrap();
    c.bench_function("states_flat2_squared", |bench| {
        bench.iter(|| {
            let sp = enumerate_states(std::hint::black_box(&p.sys), 16).unwrap();
            assert_eq!(sp.len(), 9);
        })
    });
}

fn bench_expo(c: &mut Criterion) {
    let t = Arc::new(term());
    let f = Arc::new(flat2());
    c.bench_function("expo_term_flat2", |bench| {
        bench.iter(|| {
            let space = materialize(&t, &f, &ExpBudget::default()).unwrap();
            assert_eq!(space.token_count(), 40);
        })
    });
}

criterion_group!(benches, bench_axioms, bench_states, bench_expo);
criterion_main!(benches);
