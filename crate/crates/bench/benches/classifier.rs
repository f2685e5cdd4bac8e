use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ssys_core::{c_vector, case_gallery, classify, robust_permanence, three_cycle_scenario};

fn bench_classifier(c: &mut Criterion) {
    let gallery: Vec<_> = case_gallery().into_iter().map(|s| s.params).collect();
    let baseline = three_cycle_scenario(0.1, 1e-3).unwrap();
    let exact = baseline.to_exact().unwrap();

    c.bench_function("c_vector/f64", |b| b.iter(|| c_vector(black_box(&baseline))));
    c.bench_function("c_vector/rational", |b| b.iter(|| c_vector(black_box(&exact))));
    c.bench_function("classify/f64", |b| b.iter(|| classify(black_box(&baseline)).unwrap()));
    c.bench_function("classify/rational", |b| b.iter(|| classify(black_box(&exact)).unwrap()));
    c.bench_function("classify/gallery", |b| {
        b.iter(|| {
            for p in &gallery {
                black_box(classify(p).unwrap());
            }
        })
    });
    c.bench_function("robust_permanence/gallery", |b| {
        b.iter(|| {
            for p in &gallery {
                black_box(robust_permanence(p).unwrap());
            }
        })
    });
}

criterion_group!(benches, bench_classifier);
criterion_main!(benches);
