//! Chains checked against exhaustive enumeration through their public API.

use codesw::analysis::{self, ChainSpec};
use codesw::code::{Direction, Graph, ParityCheckCode};
use codesw::dynamics::{ChainParams, KernelId, LiftParams};
use codesw::oracle;
use codesw::par::Execution;
use codesw::worm::{self, WormSpace};
use codesw::{rng_for, BitMatrix};

fn k3() -> ParityCheckCode {
    ParityCheckCode::ising(&Graph::complete(3).unwrap()).unwrap()
}

#[test]
fn sw_on_k3_matches_gibbs() {
    let code = k3();
    let spec = ChainSpec {
        code: &code,
        kernel: KernelId::Sw,
        params: ChainParams::from_beta(1.0).unwrap(),
        worm: None,
    };
    let samples = spec.sample_states(1000, 100_000, 3, 0).unwrap();
    let tv = analysis::empirical_tv(&samples, &oracle::enumerate_gibbs(&code, 1.0).unwrap()).unwrap();
    assert!(tv <= 0.02, "{tv}");
}

#[test]
fn rc_chains_match_phi() {
    let code = ParityCheckCode::new(BitMatrix::from_bit_rows(&["110", "011", "101", "111"]).unwrap()).unwrap();
    let phi = oracle::enumerate_rc(&code, 0.4).unwrap();
    for kernel in [KernelId::SwRc, KernelId::MetropolisRc, KernelId::SingleCheck] {
        let spec = ChainSpec {
            code: &code,
            kernel,
            params: ChainParams::from_p(0.4).unwrap(),
            worm: None,
        };
        let samples = spec.sample_states(1000, 100_000, 5, 1).unwrap();
        let tv = analysis::empirical_tv(&samples, &phi).unwrap();
        assert!(tv <= 0.02, "{kernel}: {tv}");
    }
}

#[test]
fn worm_chain_matches_worm_law() {
    let g = Graph::complete(4).unwrap();
    let code = ParityCheckCode::ising(&g).unwrap();
    let lift = LiftParams::new(Direction::Primal, 0.5).unwrap();
    let space = WormSpace::new(g, lift.weight).unwrap();
    let spec = ChainSpec {
        code: &code,
        kernel: KernelId::Worm,
        params: ChainParams::from_p(0.5).unwrap(),
        worm: Some(&space),
    };
    let samples = spec.sample_states(1000, 200_000, 9, 0).unwrap();
    let tv = analysis::empirical_tv(&samples, &worm::enumerate_worm(&space).unwrap()).unwrap();
    assert!(tv <= 0.02, "{tv}");
}

#[test]
fn empirical_tv_concentrates_on_oracle_draws() {
    let pi = oracle::enumerate_gibbs(&k3(), 0.5).unwrap();
    let mut rng = rng_for(1, 0);
    let small = analysis::draw_from(&pi, 1_000, &mut rng);
    let large = analysis::draw_from(&pi, 100_000, &mut rng);
    let (a, b) = (
        analysis::empirical_tv(&small, &pi).unwrap(),
        analysis::empirical_tv(&large, &pi).unwrap(),
    );
    assert!(b < a && b < 0.01, "{a} {b}");
}

#[test]
fn replicas_are_independent_of_thread_count() {
    let code = k3();
    let spec = ChainSpec {
        code: &code,
        kernel: KernelId::Glauber,
        params: ChainParams::from_beta(0.8).unwrap(),
        worm: None,
    };
    let seq = spec.replicas(5_000, 4, 3, Execution::Sequential).unwrap();
    let par = spec.replicas(5_000, 4, 3, Execution::best()).unwrap();
    assert_eq!(seq, par);
    assert_ne!(seq[0].columns, seq[1].columns);
}
