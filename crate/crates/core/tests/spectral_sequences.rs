//! Adams deductions, the algebraic AHSS cross-check and AHSS vanishing lines.

use plcob::chart::{ChartClass, ChartProduct, ExtChart, HOp, Window};
use plcob::cli::{coefficient_table, CliError, MPL8_SCRIPT_TOML};
use plcob::cpl::{cpl_module, CPL_MAX_DEGREE};
use plcob::ext::{ext_chart, minimal_resolution, mpl8_chart, Naming};
use plcob::module::FPModule;
use plcob::specseq::{
    aahss_crosscheck, aahss_e1, adams_run, ahss_e2, thom_homology, AbelianGroupExpr, AhssError,
    CoefficientTable, DeductionScript, GradedGroups, SSError, ThomShift,
};
use plcob::steenrod::SubalgebraId;

fn group(s: &str) -> AbelianGroupExpr {
    s.parse().unwrap()
}

/// The 2-primary part of a group.
fn two_primary(g: &AbelianGroupExpr) -> AbelianGroupExpr {
    let mut out = AbelianGroupExpr::free(g.free);
    for &n in &g.torsion {
        let p = n & n.wrapping_neg();
        if p > 1 {
            out = out.direct_sum(&AbelianGroupExpr::cyclic(p));
        }
    }
    out
}

#[test]
fn mpl8_deduction_reads_off_the_stated_groups() {
    let chart = mpl8_chart(8, 11).unwrap();
    let script = DeductionScript::from_toml(MPL8_SCRIPT_TOML).unwrap();
    let run = adams_run(&chart, &script).unwrap();
    let by_stem = |n: u32| run.stems.iter().find(|g| g.stem == n).unwrap();
    assert_eq!(by_stem(8).group, group("Z⊕Z4"));
    assert_eq!(by_stem(9).group, group("0"));
    assert_eq!(by_stem(10).group, group("Z2"));
    assert!(by_stem(8).up_to_extension);
    assert!(by_stem(11).flagged);
    // Below stem 11 the readout is the 2-primary part of the bundled table.
    let table = coefficient_table("mpl8").unwrap();
    for n in 0..=10 {
        let stated = table.get(n).unwrap_or_else(|| panic!("table entry {n}"));
        assert_eq!(by_stem(n).group, two_primary(stated), "stem {n}");
    }
    // d4(h1^2 p9_1) = h1^2 omega arrives by h1-linearity, not by assertion.
    assert!(
        run.e_infinity
            .log()
            .iter()
            .any(|e| e.page == 4 && e.message.contains("by h1-linearity")),
        "{:#?}",
        run.e_infinity.log()
    );
}

#[test]
fn empty_script_reads_off_e2() {
    let chart = mpl8_chart(8, 11).unwrap();
    let run = adams_run(&chart, &DeductionScript::default()).unwrap();
    let by_stem = |n: u32| &run.stems.iter().find(|g| g.stem == n).unwrap().group;
    assert_eq!(*by_stem(0), group("Z"));
    assert_eq!(*by_stem(3), group("Z8"));
    // E2 stem 8 keeps c0, the omega tower and the p8 tower.
    assert_eq!(by_stem(8).free, 2);
    assert_eq!(run.e_infinity.page(), 2);
}

#[test]
fn bidegree_errors_cite_the_script_line() {
    let chart = mpl8_chart(4, 11).unwrap();
    let text = "propagate = true\n\n[[differential]]\npage = 2\nsource = \"p9_1\"\ntarget = \"p8\"\nprovenance = \"test\"\n";
    let script = DeductionScript::from_toml(text).unwrap();
    let err = adams_run(&chart, &script).unwrap_err();
    assert!(
        matches!(err, SSError::BadShift { line: Some(3), .. }),
        "{err}"
    );
    assert!(err.to_string().starts_with("line 3: "));
    assert_eq!(CliError::from(err).exit_code(), 2);
}

#[test]
fn empty_provenance_is_rejected() {
    let text = "[[differential]]\npage = 2\nsource = \"a\"\ntarget = \"b\"\nprovenance = \"\"\n";
    let err = DeductionScript::from_toml(text).unwrap_err();
    assert!(err.to_string().contains("line 1"), "{err}");
}

/// `x → y → z` along `d2`: a tiny chart in which `d∘d` can be asserted.
fn chain_chart() -> ExtChart {
    let class = |name: &str, stem: u32, s: u32| ChartClass {
        name: name.into(),
        s,
        t: stem + s,
        flags: vec![],
        citation: None,
    };
    ExtChart {
        classes: vec![class("x", 2, 0), class("y", 1, 2), class("z", 0, 4)],
        products: Vec::<ChartProduct>::new(),
        window: Some(Window {
            max_stem: 2,
            max_s: 4,
        }),
        ..ExtChart::default()
    }
}

#[test]
fn composite_differentials_are_invariant_violations() {
    let text = "[[differential]]\npage = 2\nsource = \"x\"\ntarget = \"y\"\nprovenance = \"t\"\n\n\
                [[differential]]\npage = 2\nsource = \"y\"\ntarget = \"z\"\nprovenance = \"t\"\n";
    let script = DeductionScript::from_toml(text).unwrap();
    let err = adams_run(&chain_chart(), &script).unwrap_err();
    assert!(
        matches!(
            err,
            SSError::NotAComplex { .. } | SSError::Inconsistent { .. }
        ),
        "{err}"
    );
    assert_eq!(CliError::from(err).exit_code(), 3);
}

#[test]
fn a_differential_kills_both_ends() {
    let text = "[[differential]]\npage = 2\nsource = \"y\"\ntarget = \"z\"\nprovenance = \"t\"\n";
    let script = DeductionScript::from_toml(text).unwrap();
    let run = adams_run(&chain_chart(), &script).unwrap();
    assert_eq!(run.e_infinity.dim(1, 2), 0);
    assert_eq!(run.e_infinity.dim(0, 4), 0);
    assert_eq!(run.e_infinity.dim(2, 0), 1);
}

fn cp4() -> GradedGroups {
    thom_homology(
        &GradedGroups::free_in(&[0, 2, 4, 6, 8]),
        ThomShift::Normalized,
    )
}

#[test]
fn ahss_line_thirteen_vanishes() {
    let table = coefficient_table("mpl8").unwrap();
    assert_eq!(table.gaps(), vec![12]);
    let cells = ahss_e2(&cp4(), &table, 13).unwrap();
    assert_eq!(cells.len(), 14);
    assert!(cells.iter().all(|c| c.group.is_zero()), "{cells:?}");
}

#[test]
fn ahss_stops_at_a_gap_it_needs() {
    let table = coefficient_table("mpl8").unwrap();
    let err = ahss_e2(&cp4(), &table, 12).unwrap_err();
    assert_eq!(
        err,
        AhssError::Gap {
            table: table.name.clone(),
            degree: 12
        }
    );
    // Line 14 pairs H_2 with pi_12 too.
    assert!(ahss_e2(&cp4(), &table, 14).is_err());
}

#[test]
fn ahss_is_additive_in_coefficients() {
    let a = coefficient_table("mo8").unwrap();
    let b = coefficient_table("sphere").unwrap();
    let sum: CoefficientTable = a.direct_sum(&b);
    let homology = thom_homology(&GradedGroups::free_in(&[0, 2, 4]), ThomShift::Rank(2));
    for total in 2..=11 {
        let (ea, eb, es) = (
            ahss_e2(&homology, &a, total).unwrap(),
            ahss_e2(&homology, &b, total).unwrap(),
            ahss_e2(&homology, &sum, total).unwrap(),
        );
        for ((x, y), z) in ea.iter().zip(&eb).zip(&es) {
            assert_eq!(
                x.group.direct_sum(&y.group),
                z.group,
                "total {total}, p = {}",
                z.p
            );
        }
    }
}

#[test]
fn ahss_torsion_homology_uses_tor() {
    let table = coefficient_table("sphere").unwrap();
    let mut homology = GradedGroups::free_in(&[0]);
    homology.groups.insert(1, group("Z2"));
    let cells = ahss_e2(&homology, &table, 4).unwrap();
    // E2^{2,2} = Tor(H_1, pi_2) = Z2 and E2^{1,3} = Z2 ⊗ Z24 = Z2.
    let at = |p: u32| &cells.iter().find(|c| c.p == p).unwrap().group;
    assert_eq!(*at(2), group("Z2"));
    assert_eq!(*at(1), group("Z2"));
}

fn base_chart(max_stem: u32, max_s: u32) -> ExtChart {
    let f2 = FPModule::trivial(SubalgebraId::Level(2)).unwrap();
    let r = minimal_resolution(&f2, max_s, max_stem + max_s + 1).unwrap();
    ext_chart(&r, max_stem, &Naming::bundled("F2@A2"))
}

#[test]
fn aahss_of_the_unit_module_is_exact() {
    let base = base_chart(12, 6);
    let f2 = FPModule::trivial(SubalgebraId::Level(2)).unwrap();
    let state = aahss_e1(&base, &f2).unwrap();
    let report = aahss_crosscheck(
        &state,
        &base,
        Window {
            max_stem: 12,
            max_s: 6,
        },
    );
    assert!(report.is_empty(), "{report:?}");
}

#[test]
fn cpl_aahss_needs_one_d2_beyond_d1() {
    let window = Window {
        max_stem: 10,
        max_s: 5,
    };
    let base = base_chart(10, 7);
    let m = cpl_module(CPL_MAX_DEGREE).unwrap();
    let r = minimal_resolution(&m, 5, 10 + 5 + CPL_MAX_DEGREE).unwrap();
    let direct = ext_chart(&r, 10, &Naming::bundled("cpl"));

    let mut state = aahss_e1(&base, &m).unwrap();
    let after_d1 = aahss_crosscheck(&state, &direct, window);
    let cells: Vec<(u32, u32)> = after_d1.warnings.iter().map(|w| (w.stem, w.s)).collect();
    assert_eq!(cells, vec![(9, 1), (10, 0), (10, 2)], "{after_d1:?}");

    let text = "propagate = true\n\n[[differential]]\npage = 2\nsource = \"1⊗p10_1\"\n\
                target = \"h1⊗p8\"\nprovenance = \"forced by the resolved chart\"\n";
    state
        .run(&DeductionScript::from_toml(text).unwrap())
        .unwrap();
    let after_d2 = aahss_crosscheck(&state, &direct, window);
    assert!(after_d2.is_empty(), "{after_d2:?}");
}

#[test]
fn h_operators_shift_as_documented() {
    assert_eq!(HOp::H0.stem_shift(), 0);
    assert_eq!(HOp::H1.stem_shift(), 1);
    assert_eq!(HOp::H2.stem_shift(), 3);
}
