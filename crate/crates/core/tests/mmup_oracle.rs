mod common;

use common::*;
use dmt_core::gadget::{reduce_mmup_to_pop, EdgeKind, GadgetMode, Prescriptions};
use dmt_core::pipeline::{morse_matching, MorseConfig};
use dmt_core::pop::{PopConfig, SolverKind};
use dmt_core::prune::morse_with_pruning;

fn exact_cfg(gadget: GadgetMode) -> MorseConfig {
    MorseConfig {
        gadget,
        pop: PopConfig {
            solver: SolverKind::Exact,
            max_exact_size: 1000,
            exact_budget: u64::MAX,
            ..PopConfig::default()
        },
        cancel: false,
    }
}

#[test]
fn brute_force_optima_frozen() {
    let got: Vec<(&str, usize)> = small_corpus().iter().map(|(n, k)| (*n, brute_force_optimum(k))).collect();
    assert_eq!(
        got,
        vec![
            ("solid_tri", 1),
            ("tri_boundary", 2),
            ("path3", 1),
            ("path4", 1),
            ("strip", 1),
            ("tet_boundary", 2),
            ("fig_x", 2),
        ]
    );
}

#[test]
fn exact_pipeline_reaches_brute_force_optimum() {
    for (name, k) in small_corpus().into_iter().chain(tiny_corpus()) {
        let opt = brute_force_optimum(&k);
        for gadget in [GadgetMode::MatchingGadget, GadgetMode::PseudoFft, GadgetMode::PseudoFftEverywhere] {
            let run = morse_matching(&k, &exact_cfg(gadget), &Prescriptions::default()).unwrap();
            assert!(is_acyclic(&k, run.dgvf.pairs()), "{name}");
            assert_eq!(run.dgvf.critical_total(), opt, "{name} {gadget:?}");
        }
    }
}

#[test]
fn default_pipeline_reaches_optimum_on_corpus() {
    for (name, k) in small_corpus() {
        let run = morse_matching(&k, &MorseConfig::default(), &Prescriptions::default()).unwrap();
        assert_eq!(run.dgvf.critical_total(), brute_force_optimum(&k), "{name}");
    }
}

#[test]
fn gadgets_agree_with_enumeration() {
    for (name, k) in tiny_corpus() {
        let inst = reduce_mmup_to_pop(&k, GadgetMode::PseudoFft, &Prescriptions::default()).unwrap();
        assert!(inst.hasse_edge_count() <= 20, "{name}");
        assert!(inst.count_kind(EdgeKind::UpNormal) == inst.hasse_edge_count());
        let mr = enumerate_min_pop(&k, GadgetMode::MatchingGadget);
        let fft = enumerate_min_pop(&k, GadgetMode::PseudoFft);
        let fft_all = enumerate_min_pop(&k, GadgetMode::PseudoFftEverywhere);
        assert_eq!(mr, fft, "{name}");
        assert_eq!(mr, fft_all, "{name}");
        assert_eq!(mr, brute_force_optimum(&k), "{name}");
    }
}

#[test]
fn pruning_then_solving_is_optimal() {
    for (name, k) in small_corpus().into_iter().chain(tiny_corpus()) {
        let (v, _) = morse_with_pruning(&k, &exact_cfg(GadgetMode::PseudoFft)).unwrap();
        assert!(is_acyclic(&k, v.pairs()), "{name}");
        assert_eq!(v.critical_total(), brute_force_optimum(&k), "{name}");
    }
}
