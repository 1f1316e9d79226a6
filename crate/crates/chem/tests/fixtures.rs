//! Tests over the mechanism files shipped in `fixtures/`.

use std::fs;
use std::path::PathBuf;

use carleman_chem::{
    element_totals, nasa7_props, net_production_rates, parse_mechanism,
    parse_mechanism_with_thermo, rate_constant, to_polynomial, write_mechanism, Mechanism,
    ReverseRate, Severity, R_CAL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn load(rel: &str) -> String {
    let path = fixture_dir().join(rel);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn parse_fixture(rel: &str) -> Mechanism {
    match parse_mechanism(&load(rel)) {
        Ok(m) => m,
        Err(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            panic!("{rel} failed to parse");
        }
    }
}

#[test]
fn toy_mechanism_parses() {
    let m = parse_fixture("mechanisms/toy_decay.ck");
    assert_eq!(m.n_species(), 2);
    assert_eq!(m.reactions().len(), 1);
    assert!(matches!(m.reactions()[0].reverse, ReverseRate::None));
}

#[test]
fn h2_mechanism_has_expected_contents() {
    let m = parse_fixture("mechanisms/h2_air_9sp.ck");
    assert_eq!(m.n_species(), 9);
    let names: Vec<&str> = m.species().iter().map(|s| s.name.as_str()).collect();
    for want in ["H2", "O2", "H", "O", "OH", "HO2", "H2O2", "H2O", "N2"] {
        assert!(names.contains(&want), "missing {want}");
    }
    assert_eq!(m.reactions().len(), 19);
    assert_eq!(m.max_molecularity(), 3);
    assert!(m
        .reactions()
        .iter()
        .all(|r| matches!(r.reverse, ReverseRate::FromEquilibrium)));
    assert_eq!(m.reactions().iter().filter(|r| r.duplicate).count(), 2);
    assert!(m.species().iter().all(|s| s.thermo.is_some()));
}

#[test]
fn ch4_mechanism_has_expected_contents() {
    let m = parse_fixture("mechanisms/ch4_air_21sp.ck");
    assert_eq!(m.n_species(), 21);
    assert!(m.species_index("CH2(S)").is_some());
    assert!(m.species_index("CH3OH").is_some());
    assert_eq!(m.max_molecularity(), 3);
    let explicit_rev = m
        .reactions()
        .iter()
        .filter(|r| matches!(r.reverse, ReverseRate::Explicit(_)))
        .count();
    assert_eq!(explicit_rev, 1);
    let irreversible = m
        .reactions()
        .iter()
        .filter(|r| matches!(r.reverse, ReverseRate::None))
        .count();
    assert_eq!(irreversible, 2);
}

#[test]
fn external_thermo_file_matches_inline_block() {
    let inline = parse_fixture("mechanisms/h2_air_9sp.ck");
    let split = parse_mechanism_with_thermo(
        &load("mechanisms/h2_air_9sp_nothermo.ck"),
        &load("thermo/h2_air.therm"),
    )
    .expect("split parse");
    assert_eq!(inline, split);
}

#[test]
fn curated_fixtures_round_trip() {
    for rel in [
        "mechanisms/toy_decay.ck",
        "mechanisms/h2_air_9sp.ck",
        "mechanisms/ch4_air_21sp.ck",
    ] {
        let m = parse_fixture(rel);
        let text = write_mechanism(&m);
        let back = parse_mechanism(&text).unwrap_or_else(|d| {
            for diag in &d {
                eprintln!("{diag}");
            }
            panic!("{rel} serialized form failed to parse")
        });
        assert_eq!(m, back, "{rel} round trip changed the mechanism");
        assert_eq!(text, write_mechanism(&back), "{rel} serializer not a fixed point");
    }
}

#[test]
fn thermo_fits_are_continuous_at_breakpoint() {
    for rel in ["mechanisms/h2_air_9sp.ck", "mechanisms/ch4_air_21sp.ck"] {
        let m = parse_fixture(rel);
        for s in m.species() {
            let fit = s.thermo.as_ref().unwrap();
            let below = nasa7_props(&s.name, fit, fit.t_common - 1e-6).unwrap();
            let above = nasa7_props(&s.name, fit, fit.t_common + 1e-6).unwrap();
            // Vintage fits (notably N2) carry a cp mismatch of up to ~1.6%
            // at the range joint; anything worse indicates mangled data.
            let rel_cp = (below.cp_over_r - above.cp_over_r).abs() / above.cp_over_r.abs();
            assert!(rel_cp < 2e-2, "{}: cp jump {rel_cp:.2e}", s.name);
            let rel_h = (below.h_over_rt - above.h_over_rt).abs()
                / above.h_over_rt.abs().max(1.0);
            assert!(rel_h < 2e-2, "{}: h jump {rel_h:.2e}", s.name);
            let rel_s = (below.s_over_r - above.s_over_r).abs() / above.s_over_r.abs();
            assert!(rel_s < 2e-2, "{}: s jump {rel_s:.2e}", s.name);
        }
    }
}

#[test]
fn formation_enthalpies_match_literature_windows() {
    // h/(RT) at 300 K against standard formation enthalpies, wide windows.
    let windows = [
        ("H2", -0.5, 0.5),
        ("O2", -0.5, 0.5),
        ("N2", -0.5, 0.5),
        ("H", 85.0, 90.0),
        ("O", 96.0, 104.0),
        ("OH", 11.0, 19.0),
        ("H2O", -101.0, -93.0),
        ("HO2", -1.0, 11.0),
        ("H2O2", -59.0, -50.0),
        ("CO", -48.0, -41.0),
        ("CO2", -163.0, -153.0),
        ("CH4", -34.0, -26.0),
    ];
    let h2 = parse_fixture("mechanisms/h2_air_9sp.ck");
    let ch4 = parse_fixture("mechanisms/ch4_air_21sp.ck");
    for (name, lo, hi) in windows {
        let m = if h2.species_index(name).is_some() { &h2 } else { &ch4 };
        let idx = m.species_index(name).unwrap();
        let s = &m.species()[idx];
        let props = nasa7_props(name, s.thermo.as_ref().unwrap(), 300.0).unwrap();
        assert!(
            props.h_over_rt > lo && props.h_over_rt < hi,
            "{name}: h/RT = {:.2} outside [{lo}, {hi}]",
            props.h_over_rt
        );
    }
}

#[test]
fn corrupt_fixtures_fail_with_recorded_line_numbers() {
    let manifest: serde_json::Value =
        serde_json::from_str(&load("corrupt/expected.json")).expect("expected.json");
    let entries = manifest.as_object().expect("object manifest");
    assert!(entries.len() >= 9);
    for (file, want) in entries {
        let line = want["line"].as_u64().expect("line") as usize;
        let needle = want["contains"].as_str().expect("contains");
        let diags = match parse_mechanism(&load(&format!("corrupt/{file}"))) {
            Ok(_) => panic!("{file} parsed but should fail"),
            Err(d) => d,
        };
        let hit = diags
            .iter()
            .find(|d| d.severity == Severity::Error && d.line == line && d.message.contains(needle));
        assert!(
            hit.is_some(),
            "{file}: no error at line {line} containing `{needle}`; got: {:?}",
            diags.iter().map(|d| d.to_string()).collect::<Vec<_>>()
        );
    }
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(1e-9..1e-5)).collect()
}

#[test]
fn compiled_system_matches_direct_rates() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a11);
    for rel in ["mechanisms/h2_air_9sp.ck", "mechanisms/ch4_air_21sp.ck"] {
        let m = parse_fixture(rel);
        let sys = to_polynomial(&m, 2000.0).expect("compile");
        assert_eq!(sys.degree(), 3);
        for _ in 0..20 {
            let c = random_state(&mut rng, m.n_species());
            let direct = net_production_rates(&m, 2000.0, &c).unwrap();
            let via_matrix = sys.eval_rhs(&c).unwrap();
            let scale = direct.iter().fold(1e-30_f64, |a, w| a.max(w.abs()));
            for (s, (d, v)) in direct.iter().zip(&via_matrix).enumerate() {
                assert!(
                    (d - v).abs() <= 1e-12 * scale,
                    "{rel} species {s}: direct {d:.6e} vs matrix {v:.6e}"
                );
            }
        }
    }
}

#[test]
fn compiled_system_conserves_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a12);
    for rel in ["mechanisms/h2_air_9sp.ck", "mechanisms/ch4_air_21sp.ck"] {
        let m = parse_fixture(rel);
        let sys = to_polynomial(&m, 2000.0).expect("compile");
        for _ in 0..10 {
            let c = random_state(&mut rng, m.n_species());
            let rates = sys.eval_rhs(&c).unwrap();
            for element in m.elements() {
                let mut net = 0.0;
                let mut gross = 1e-30;
                for (s, w) in m.species().iter().zip(&rates) {
                    let count = *s.composition.get(element).unwrap_or(&0) as f64;
                    net += count * w;
                    gross += count * w.abs();
                }
                assert!(
                    net.abs() <= 1e-10 * gross,
                    "{rel}: element {element} drifts at rate {net:.3e}"
                );
            }
        }
    }
}

#[test]
fn element_totals_track_composition() {
    let m = parse_fixture("mechanisms/h2_air_9sp.ck");
    let c = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.5];
    let totals = element_totals(&m, &c);
    // H2 gives 2, H2O gives 4, so 6 total hydrogen.
    assert!((totals["H"] - 6.0).abs() < 1e-12);
    assert!((totals["O"] - 2.0).abs() < 1e-12);
    assert!((totals["N"] - 1.0).abs() < 1e-12);
}

#[test]
fn cold_radical_free_mixture_still_ignites() {
    // With no radicals present every forward chain reaction is dormant, so
    // radical production must come from reverse rates. If that path were
    // missing the state would be a spurious fixed point.
    let m = parse_fixture("mechanisms/h2_air_9sp.ck");
    let mut c = vec![0.0; 9];
    c[m.species_index("H2").unwrap()] = 4.72e-7;
    c[m.species_index("O2").unwrap()] = 1.18e-6;
    c[m.species_index("N2").unwrap()] = 4.44e-6;
    let w = net_production_rates(&m, 2000.0, &c).unwrap();
    assert!(w[m.species_index("H").unwrap()] > 0.0);
    assert!(w[m.species_index("HO2").unwrap()] > 0.0);
    assert!(w[m.species_index("H2").unwrap()] < 0.0);
}

#[test]
fn singlet_quench_sets_the_fast_timescale() {
    // CH2(S)+M quenching is the stiffest linear-in-radical channel at 2000 K
    // and 1 atm; its rate fixes the explicit stability limit for the C1 set.
    let m = parse_fixture("mechanisms/ch4_air_21sp.ck");
    let singlet = m.species_index("CH2(S)").unwrap();
    let quench = m
        .reactions()
        .iter()
        .find(|r| {
            r.third_body.is_some()
                && r.reactants.len() == 1
                && r.reactants[0] == (singlet, 1)
        })
        .expect("quench reaction");
    let k = rate_constant(&quench.forward, 2000.0).unwrap();
    let c_total = 6.09e-6;
    let lambda = k * c_total;
    assert!((5e7..1.5e8).contains(&lambda), "quench rate {lambda:.3e}");
    assert!((quench.forward.e_a / R_CAL) < 2000.0 * 2.0);
}
