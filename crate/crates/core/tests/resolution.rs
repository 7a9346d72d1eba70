//! Minimal resolutions: chain-complex invariants and the bundled charts.

use plcob::chart::{chart_compare, ExtChart, HOp, Window, TRUNCATION_FLAG};
use plcob::cli::{reference_chart, A2_UNIT_CHART_JSON, CPL_COKERNEL_JSON};
use plcob::cpl::{cpl_module, CPL_MAX_DEGREE};
use plcob::ext::{ext_chart, minimal_resolution, mpl8_chart, Naming, Resolution};
use plcob::module::FPModule;
use plcob::steenrod::{FiniteSubalgebra, SubalgebraId};

fn f2(n: u32) -> FPModule {
    FPModule::trivial(SubalgebraId::Level(n)).unwrap()
}

fn resolutions() -> Vec<(&'static str, Resolution)> {
    vec![
        ("F2@A1", minimal_resolution(&f2(1), 8, 16).unwrap()),
        ("F2@A2", minimal_resolution(&f2(2), 8, 20).unwrap()),
        (
            "cpl",
            minimal_resolution(&cpl_module(CPL_MAX_DEGREE).unwrap(), 5, 18).unwrap(),
        ),
    ]
}

#[test]
fn hopf_classes_in_filtration_one() {
    let r = minimal_resolution(&f2(2), 2, 9).unwrap();
    let dims: Vec<usize> = (1..=9).map(|t| r.ext_dim(1, t)).collect();
    assert_eq!(dims, vec![1, 1, 0, 1, 0, 0, 0, 0, 0]);
    assert_eq!(r.ext_dim(0, 0), 1);
}

#[test]
fn boundaries_compose_to_zero() {
    for (name, r) in resolutions() {
        for s in 1..=r.max_s() {
            for t in 0..=r.max_t() {
                let lower = r.differential_matrix(s - 1, t);
                let upper = r.differential_matrix(s, t);
                if lower.num_cols() == 0 || upper.num_cols() == 0 || lower.num_rows() == 0 {
                    continue;
                }
                let composite = lower.mul(&upper);
                assert_eq!(composite.rank(), 0, "{name}: ∂∂ ≠ 0 at s = {s}, t = {t}");
            }
        }
    }
}

#[test]
fn resolution_is_exact() {
    for (name, r) in resolutions() {
        for t in 0..=r.max_t() {
            let module_dim = r.module().indices_in_degree(t).len();
            assert_eq!(
                r.differential_matrix(0, t).rank(),
                module_dim,
                "{name}: ∂0 onto M at t = {t}"
            );
            for s in 0..r.max_s() {
                let rank_in = r.differential_matrix(s + 1, t).rank();
                let rank_out = r.differential_matrix(s, t).rank();
                assert_eq!(
                    rank_in + rank_out,
                    r.free_dim(s, t),
                    "{name}: homology at s = {s}, t = {t}"
                );
            }
        }
    }
}

/// The unit coefficients of `∂(y)` on generators of the same degree vanish.
#[test]
fn resolution_is_minimal() {
    for (name, r) in resolutions() {
        for s in 0..r.max_s() {
            for t in 0..=r.max_t() {
                let upper = r.generators(s + 1).iter().filter(|&&d| d == t).count();
                let lower = r.generators(s).iter().filter(|&&d| d == t).count();
                if upper == 0 || lower == 0 {
                    continue;
                }
                let rows = r.differential_rows(s + 1, t);
                let width = r.free_dim(s, t);
                // Generators are sorted by degree, so degree-t generators and
                // their unit blocks come last.
                for row in &rows[rows.len() - upper..] {
                    for k in width - lower..width {
                        assert!(!row.get(k), "{name}: unit coefficient at s = {s}, t = {t}");
                    }
                }
                assert_eq!(r.ext_dim(s + 1, t), upper);
            }
        }
    }
}

#[test]
fn euler_characteristic_matches_free_ranks() {
    for (name, r) in resolutions() {
        let alg = FiniteSubalgebra::get(r.module().level());
        let bottom = r.module().min_degree().unwrap();
        // F_{s,t} = 0 once s > t - bottom, so the alternating sum is exact.
        for t in bottom..=(bottom + r.max_s()).min(r.max_t()) {
            let mut chi: i64 = 0;
            for s in 0..=r.max_s() {
                let predicted: usize = r
                    .generators(s)
                    .iter()
                    .filter(|&&d| d <= t)
                    .map(|&d| alg.dimension(t - d))
                    .sum();
                assert_eq!(predicted, r.free_dim(s, t));
                chi += if s % 2 == 0 {
                    predicted as i64
                } else {
                    -(predicted as i64)
                };
            }
            let module_dim = r.module().indices_in_degree(t).len() as i64;
            assert_eq!(chi, module_dim, "{name}: Euler characteristic at t = {t}");
        }
    }
}

fn assert_products_commute(chart: &ExtChart) {
    for c in &chart.classes {
        let x = [chart.index_of(&c.name).unwrap()].into_iter().collect();
        for a in HOp::ALL {
            for b in HOp::ALL {
                let ab = chart.multiply(a, &chart.multiply(b, &x));
                let ba = chart.multiply(b, &chart.multiply(a, &x));
                let window = chart.window.unwrap();
                if c.stem() + a.stem_shift() + b.stem_shift() <= window.max_stem
                    && c.s + 2 <= window.max_s
                {
                    assert_eq!(ab, ba, "{a} {b} {} in {:?}", c.name, window);
                }
            }
        }
    }
}

#[test]
fn h_products_commute() {
    let r = minimal_resolution(&f2(2), 8, 25).unwrap();
    assert_products_commute(&ext_chart(&r, 17, &Naming::bundled("F2@A2")));
    let m = cpl_module(CPL_MAX_DEGREE).unwrap();
    let r = minimal_resolution(&m, 6, 28).unwrap();
    assert_products_commute(&ext_chart(&r, 14, &Naming::bundled("cpl")));
}

#[test]
fn a1_chart_has_the_ko_pattern() {
    let r = minimal_resolution(&f2(1), 8, 20).unwrap();
    let chart = ext_chart(&r, 12, &Naming::bundled("F2@A1"));
    let dims = |stem: u32| -> Vec<usize> { (0..=8).map(|s| chart.dim(stem, s)).collect() };
    assert_eq!(dims(0), vec![1; 9]);
    assert_eq!(dims(1), vec![0, 1, 0, 0, 0, 0, 0, 0, 0]);
    assert_eq!(dims(2), vec![0, 0, 1, 0, 0, 0, 0, 0, 0]);
    assert_eq!(dims(3), vec![0; 9]);
    assert_eq!(dims(4), vec![0, 0, 0, 1, 1, 1, 1, 1, 1]);
    for stem in 5..=7 {
        assert_eq!(dims(stem), vec![0; 9], "stem {stem}");
    }
    assert_eq!(dims(8), vec![0, 0, 0, 0, 1, 1, 1, 1, 1]);
    assert_eq!(dims(9), vec![0, 0, 0, 0, 0, 1, 0, 0, 0]);
    assert_eq!(dims(10), vec![0, 0, 0, 0, 0, 0, 1, 0, 0]);
    assert_eq!(dims(11), vec![0; 9]);
    assert_eq!(dims(12), vec![0, 0, 0, 0, 0, 0, 0, 1, 1]);
    let named = |e: &str| chart.evaluate(e).unwrap();
    assert!(!named("a").is_empty() && !named("b").is_empty());
    assert_eq!(chart.multiply(HOp::H1, &named("h1^2")), named("0"));
}

#[test]
fn a2_unit_reference_matches_the_computed_chart() {
    let reference = ExtChart::from_json(A2_UNIT_CHART_JSON).unwrap();
    let window = reference.window.unwrap();
    assert_eq!((window.max_stem, window.max_s), (17, 8));
    let r = minimal_resolution(&f2(2), 8, 25).unwrap();
    let chart = ext_chart(&r, 17, &Naming::bundled("F2@A2"));
    let report = chart_compare(&chart, &reference, window);
    assert!(report.failures.is_empty(), "{:#?}", report.failures);
    assert!(
        report.warnings.iter().all(|w| w.stem >= 16),
        "{:#?}",
        report.warnings
    );
    for (lhs, rhs) in [
        ("h1^3", "h0^2 h2"),
        ("h2^2 omega", "h0^2 d0"),
        ("h0^2 kappa", "h1 d0"),
    ] {
        let (l, r) = (chart.evaluate(lhs).unwrap(), chart.evaluate(rhs).unwrap());
        assert!(!l.is_empty(), "{lhs} vanishes");
        assert_eq!(l, r, "{lhs} = {rhs}");
    }
}

#[test]
fn comparison_detects_a_missing_class() {
    let mut reference = reference_chart("a2-unit").unwrap();
    reference.classes.retain(|c| c.name != "c0");
    reference
        .products
        .retain(|p| p.from != "c0" && p.to != "c0");
    let r = minimal_resolution(&f2(2), 8, 25).unwrap();
    let chart = ext_chart(&r, 17, &Naming::bundled("F2@A2"));
    let report = chart_compare(&chart, &reference, reference.window.unwrap());
    assert!(report.failures.iter().any(|f| (f.stem, f.s) == (8, 3)));
}

#[test]
fn cokernel_table_matches_the_cpl_chart() {
    let reference = ExtChart::from_json(CPL_COKERNEL_JSON).unwrap();
    let window = reference.window.unwrap();
    let m = cpl_module(CPL_MAX_DEGREE).unwrap();
    let r = minimal_resolution(
        &m,
        window.max_s,
        window.max_stem + window.max_s + CPL_MAX_DEGREE,
    )
    .unwrap();
    let chart = ext_chart(&r, window.max_stem, &Naming::bundled("cpl"));
    let report = chart_compare(&chart, &reference, window);
    assert!(report.failures.is_empty(), "{:#?}", report.failures);
    assert!(
        report.warnings.iter().all(|w| w.stem == 11),
        "{:#?}",
        report.warnings
    );
    // Stem 8 is a single h0-tower on p8; stem 9 adds p9_2 to the p9_1 tower.
    for s in 0..=window.max_s {
        assert_eq!(chart.dim(8, s), 1);
        assert_eq!(chart.dim(9, s), if s == 0 { 2 } else { 1 });
    }
    assert_eq!(chart.dim(10, 0), 1);
    assert_eq!(chart.dim(10, 1), 2);
    assert_eq!(chart.dim(11, 2), 2);
    assert!(chart
        .at(11, 2)
        .iter()
        .all(|&i| chart.classes[i].has_flag(TRUNCATION_FLAG)));
}

#[test]
fn mpl8_chart_is_the_direct_sum() {
    let chart = mpl8_chart(6, 11).unwrap();
    let r = minimal_resolution(&f2(2), 6, 17).unwrap();
    let base = ext_chart(&r, 11, &Naming::bundled("F2@A2"));
    let m = cpl_module(CPL_MAX_DEGREE).unwrap();
    let r = minimal_resolution(&m, 6, 28).unwrap();
    let positive = ext_chart(&r, 11, &Naming::bundled("cpl"));
    let window = Window {
        max_stem: 11,
        max_s: 6,
    };
    for stem in 0..=11 {
        for s in 0..=6 {
            assert!(window.contains(stem, s));
            assert_eq!(
                chart.dim(stem, s),
                base.dim(stem, s) + positive.dim(stem, s),
                "({stem}, {s})"
            );
        }
    }
}
