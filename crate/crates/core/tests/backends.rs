use rabi2p_core::chen::{residue_probe, PoleKind};
use rabi2p_core::oracle::{self, LevelSelection};
use rabi2p_core::solver::{assemble_spectrum, find_zeros, Backend, LevelKind, RootFindConfig};
use rabi2p_core::zhang::ZhangG;
use rabi2p_core::{ModelParams, Phase, SymmetrySector};

fn zhang_lowest(p: &ModelParams, s: SymmetrySector, count: usize) -> Vec<f64> {
    let g = ZhangG::new(*p, s).unwrap();
    let e_max = oracle_lowest(p, s, count)[count - 1] + 1.0;
    let config = RootFindConfig::for_params(p, e_max).unwrap();
    let zeros = find_zeros(&g, p.omega(), &config).unwrap().zeros;
    zeros.iter().take(count).map(|z| z.energy).collect()
}

fn oracle_lowest(p: &ModelParams, s: SymmetrySector, count: usize) -> Vec<f64> {
    oracle::eigenvalues(p, s, LevelSelection::Lowest(count), 1e-12)
        .unwrap()
        .energies
}

#[test]
fn exactly_one_sector_labelling_matches_the_oracle() {
    for (omega, delta) in [(2.5, 0.7), (3.2, 1.3)] {
        let p = ModelParams::new(omega, delta).unwrap();
        for a in SymmetrySector::ALL {
            let zeros = zhang_lowest(&p, a, 3);
            assert_eq!(zeros.len(), 3);
            for b in SymmetrySector::ALL {
                let levels = oracle_lowest(&p, b, 3);
                let same = zeros.iter().zip(&levels).all(|(z, l)| (z - l).abs() < 1e-7);
                assert_eq!(same, a == b, "omega {omega} delta {delta}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn both_even_backends_agree_in_each_phase() {
    let p = ModelParams::new(3.0, 0.9).unwrap();
    for (phase, sector) in [
        (Phase::Plus, SymmetrySector::EVEN_PLUS),
        (Phase::Minus, SymmetrySector::EVEN_MINUS),
    ] {
        let chen = rabi2p_core::solver::lowest_chen_zeros(&p, phase, 4).unwrap();
        let zhang = zhang_lowest(&p, sector, 4);
        let levels = oracle_lowest(&p, sector, 4);
        for k in 0..4 {
            assert!((chen[k].energy - levels[k]).abs() < 1e-8, "{phase:?} {k}");
            assert!((zhang[k] - levels[k]).abs() < 1e-8, "{phase:?} {k}");
        }
    }
}

#[test]
fn assembled_spectrum_uses_oracle_as_reference() {
    let p = ModelParams::new(2.5, 0.7).unwrap();
    for sector in SymmetrySector::ALL {
        let s = assemble_spectrum(&p, sector, 10.0).unwrap();
        assert_eq!(s.backend, Backend::preferred(&p, sector));
        assert!(!s.levels.is_empty());
        assert!(s
            .levels
            .iter()
            .all(|l| !l.suspect && l.kind == LevelKind::Regular));
        assert!(s
            .levels
            .iter()
            .all(|l| l.oracle_delta.is_some_and(|d| d < 1e-8)));
    }
}

#[test]
fn lifted_pole_at_unit_coupling() {
    let lifted = residue_probe(&ModelParams::new(2.5, 1.0).unwrap(), 1).unwrap();
    assert_eq!(lifted.kind, PoleKind::Lifted);
    let regular = residue_probe(&ModelParams::new(2.5, 0.7).unwrap(), 1).unwrap();
    assert_eq!(regular.kind, PoleKind::Pole);
    let sectors = oracle::sectors_at(&ModelParams::new(2.5, 1.0).unwrap(), 2.5, 1e-8).unwrap();
    assert!(sectors.contains(&SymmetrySector::EVEN_PLUS));
    assert!(sectors.contains(&SymmetrySector::EVEN_MINUS));
}

#[test]
fn sub_critical_frequency_is_rejected_by_every_backend() {
    let p = ModelParams::new(1.5, 0.7).unwrap();
    for s in SymmetrySector::ALL {
        assert!(ZhangG::new(p, s).is_err());
        assert!(oracle::eigenvalues(&p, s, LevelSelection::Lowest(1), 1e-9).is_err());
    }
    assert!(rabi2p_core::chen::g_chen(&p, 0.0, Phase::Plus).is_err());
}
