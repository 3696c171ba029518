use super::*;
use crate::linops::{c, max_entry, support_projector};
use crate::random::{random_isometry, random_state_factor};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn basis_col(dim: usize, i: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, 1);
    m[(i, 0)] = c(1.0, 0.0);
    m
}

/// Words `e_0 … e_{N−1}` in dimension `dim` with their own projectors.
fn orthogonal_code(dim: usize, n: usize) -> CodeInstance {
    let cols: Vec<CMatrix> = (0..n).map(|i| basis_col(dim, i)).collect();
    CodeInstance::from_parts(cols.clone(), cols).unwrap()
}

fn random_code(seed: u64, dim: usize, n: usize, rank: usize) -> CodeInstance {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let iso = (0..n).map(|_| random_isometry(&mut rng, dim, rank)).collect();
    let fac = (0..n).map(|_| random_state_factor(&mut rng, dim, 2)).collect();
    CodeInstance::from_parts(iso, fac).unwrap()
}

fn sum_ops(ops: &[HermitianOperator]) -> HermitianOperator {
    ops.iter().fold(HermitianOperator::zeros(ops[0].dim()), |a, b| a.add(b))
}

#[test]
fn sequential_first_element_is_projector() {
    let code = random_code(1, 4, 1, 2);
    let (e, e0) = sequential_elements(&code);
    assert!(e[0].max_entry_diff(&code.projector(0)) < 1e-14);
    assert!(e0.max_entry_diff(&HermitianOperator::identity(4).sub(&code.projector(0))) < 1e-14);
}

#[test]
fn sequential_orthogonal_elements_are_projectors() {
    let code = orthogonal_code(5, 4);
    let (e, _) = sequential_elements(&code);
    for (l, el) in e.iter().enumerate() {
        assert_eq!(el.max_entry_diff(&code.projector(l)), 0.0);
    }
}

#[test]
fn sequential_elements_sum_within_unit_interval() {
    for seed in 0..5 {
        let code = random_code(seed, 6, 4, 2);
        let (e, e0) = sequential_elements(&code);
        for el in &e {
            assert!(el.min_eigenvalue() > -1e-12 && el.max_eigenvalue() < 1.0 + 1e-12);
        }
        let s = sum_ops(&e);
        assert!(s.min_eigenvalue() > -1e-12 && s.max_eigenvalue() < 1.0 + 1e-12);
        assert!(e0.min_eigenvalue() > -1e-12);
    }
}

#[test]
fn pgm_cases() {
    let code = orthogonal_code(6, 4);
    for (l, lam) in pgm_full(&code, 1e-9).iter().enumerate() {
        assert!(lam.max_entry_diff(&code.projector(l)) < 1e-14);
    }
    let single = random_code(2, 4, 1, 2);
    assert!(pgm_full(&single, 1e-9)[0].max_entry_diff(&single.projector(0)) < 1e-12);

    let code = random_code(3, 8, 4, 2);
    let lam = pgm_full(&code, 1e-9);
    let projs: Vec<_> = (0..4).map(|l| code.projector(l)).collect();
    let s = sum_ops(&projs);
    assert!(sum_ops(&lam).max_entry_diff(&support_projector(&s, 1e-9)) < 1e-8);
    // factor route against the dense inverse square root
    let dense = pgm_from_projectors(&projs, 1e-9);
    for (a, b) in lam.iter().zip(&dense) {
        assert!(a.max_entry_diff(b) < 1e-10);
    }
}

#[test]
fn hayashi_nagaoka_margins() {
    let single = random_code(4, 4, 1, 2);
    let projs = vec![single.projector(0)];
    assert!(hayashi_nagaoka_check(&pgm_from_projectors(&projs, 1e-9), &projs, 0) >= -1e-12);

    let code = orthogonal_code(6, 4);
    let projs: Vec<_> = (0..4).map(|l| code.projector(l)).collect();
    let lam = pgm_from_projectors(&projs, 1e-9);
    for l in 0..4 {
        assert!(hayashi_nagaoka_check(&lam, &projs, l) >= -1e-12);
    }
    for seed in 0..10 {
        let code = random_code(100 + seed, 6, 4, 3);
        let projs: Vec<_> = (0..4).map(|l| code.projector(l)).collect();
        let lam = pgm_from_projectors(&projs, 1e-9);
        for l in 0..4 {
            assert!(hayashi_nagaoka_check(&lam, &projs, l) >= -1e-8);
        }
    }
}

#[test]
fn orthogonal_node_full_span_and_disjoint() {
    // 0-branch spans everything
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let iso = vec![random_isometry(&mut rng, 4, 4), random_isometry(&mut rng, 4, 1)];
    let fac = vec![random_state_factor(&mut rng, 4, 1), random_state_factor(&mut rng, 4, 1)];
    let code = CodeInstance::from_parts(iso, fac).unwrap();
    let node = node_povm_orthogonal(&code, &[], 1e-9);
    assert!(node.dense(Outcome::Zero).max_entry_diff(&HermitianOperator::identity(4)) < 1e-12);
    assert!(node.dense(Outcome::One).max_entry() < 1e-12);

    let code = orthogonal_code(6, 4);
    let node = node_povm_orthogonal(&code, &[], 1e-9);
    let expected = code.projector(0).add(&code.projector(1));
    assert!(node.dense(Outcome::Zero).max_entry_diff(&expected) < 1e-14);
    assert_eq!(node.dense(Outcome::Null).max_entry(), 0.0);
}

#[test]
fn orthogonal_node_matches_gram_support() {
    let code = random_code(6, 8, 4, 2);
    for prefix in [vec![], vec![0u8], vec![1]] {
        let node = node_povm_orthogonal(&code, &prefix, 1e-9);
        let mut pre0 = prefix.clone();
        pre0.push(0);
        let s = sum_ops(&code.subset(&pre0).map(|l| code.projector(l)).collect::<Vec<_>>());
        assert!(node.dense(Outcome::Zero).max_entry_diff(&support_projector(&s, 1e-9)) < 1e-8);
        let (above, _) = orthogonal_node_margins(&code, &node);
        assert!(above >= -1e-9);
    }
}

#[test]
fn span_projector_can_exceed_sum_of_overlapping_projectors() {
    // two lines at angle θ in the plane: P1 + P2 has eigenvalues 1 ± cos θ,
    // while the span projector is the identity
    let theta: f64 = 0.4;
    let mut a = CMatrix::zeros(2, 1);
    a[(0, 0)] = c(1.0, 0.0);
    let mut b = CMatrix::zeros(2, 1);
    b[(0, 0)] = c(theta.cos(), 0.0);
    b[(1, 0)] = c(theta.sin(), 0.0);
    let pad = vec![basis_col(2, 1), basis_col(2, 1)];
    let code = CodeInstance::from_parts(vec![a.clone(), b.clone(), pad[0].clone(), pad[1].clone()], vec![a, b, pad[0].clone(), pad[1].clone()]).unwrap();
    let node = node_povm_orthogonal(&code, &[], 1e-9);
    let (above, below) = orthogonal_node_margins(&code, &node);
    assert!(above >= -1e-12);
    assert!((below + theta.cos()).abs() < 1e-12);
}

#[test]
fn pgm_node_cases() {
    let code = orthogonal_code(6, 4);
    let node = node_povm_pgm(&code, &[], 1e-9);
    let p01 = code.projector(0).add(&code.projector(1));
    let p23 = code.projector(2).add(&code.projector(3));
    assert!(node.dense(Outcome::Zero).max_entry_diff(&p01) < 1e-12);
    assert!(node.dense(Outcome::One).max_entry_diff(&p23) < 1e-12);

    let code = orthogonal_code(4, 2);
    let node = node_povm_pgm(&code, &[], 1e-9);
    assert!((node.dense(Outcome::Zero).trace() - 1.0).abs() < 1e-12);
    assert!((node.dense(Outcome::One).trace() - 1.0).abs() < 1e-12);

    for seed in 0..5 {
        let code = random_code(20 + seed, 6, 4, 2);
        let node = node_povm_pgm(&code, &[], 1e-9);
        let sum = node.dense(Outcome::Zero).add(&node.dense(Outcome::One));
        assert!(sum.min_eigenvalue() > -1e-10 && sum.max_eigenvalue() < 1.0 + 1e-10);
        assert!(node.interval_violation() < 1e-10);
        assert!(node.dense_completeness_defect() < 1e-9);
        let (full, support) = node.sum_operator_margin.unwrap();
        assert!(full <= support);
    }
}

#[test]
fn sequential_node_cases() {
    let code = orthogonal_code(5, 4);
    let node = node_povm_sequential(&code, &[], SequentialScope::Global, 1e-9);
    let p01 = code.projector(0).add(&code.projector(1));
    assert!(node.dense(Outcome::Zero).max_entry_diff(&p01) < 1e-14);

    let code = random_code(30, 6, 4, 2);
    let (e, e0) = sequential_elements(&code);
    let node = node_povm_sequential(&code, &[], SequentialScope::Global, 1e-9);
    let root_sum = node.dense(Outcome::Zero).add(&node.dense(Outcome::One));
    assert!(root_sum.max_entry_diff(&HermitianOperator::identity(6).sub(&e0)) < 1e-12);
    assert!(node.dense(Outcome::Zero).max_entry_diff(&e[0].add(&e[1])) < 1e-12);
    for prefix in [vec![0u8], vec![1]] {
        for scope in [SequentialScope::Global, SequentialScope::PerNode] {
            let node = node_povm_sequential(&code, &prefix, scope, 1e-9);
            assert!(node.interval_violation() < 1e-10);
            assert!(node.dense_completeness_defect() < 1e-9);
        }
    }
    // per-node scope restarts the ordering at the parent set
    let per = node_povm_sequential(&code, &[1], SequentialScope::PerNode, 1e-9);
    assert!(per.dense(Outcome::Zero).max_entry_diff(&code.projector(2)) < 1e-12);
}

fn identity_node(dim: usize, prefix: Vec<u8>) -> NodePovm {
    NodePovm::from_dense(
        prefix,
        &HermitianOperator::identity(dim),
        &HermitianOperator::zeros(dim),
        &HermitianOperator::zeros(dim),
    )
}

#[test]
fn identity_path_gives_identity_operator() {
    let nodes = vec![identity_node(3, vec![]), identity_node(3, vec![0]), identity_node(3, vec![1])];
    let dec = BisectionDecoder::from_nodes(3, nodes).unwrap();
    assert!(dec.bisection_operator(&[0, 0]).max_entry_diff(&HermitianOperator::identity(3)) < 1e-14);
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let rho = SubnormalizedState::from_operator_unchecked(HermitianOperator::from_factor(&random_state_factor(
        &mut rng, 3, 2,
    )));
    let out = dec.simulate_cascade(&rho);
    assert!((out.leaf(&[0, 0]) - 1.0).abs() < 1e-12);
    assert!(out.null.abs() < 1e-14);
}

#[test]
fn commuting_projector_path_gives_intersection() {
    let diag = |v: &[f64]| HermitianOperator::from_real_diagonal(v);
    let root = NodePovm::from_dense(vec![], &diag(&[1.0, 1.0, 0.0, 0.0]), &diag(&[0.0, 0.0, 1.0, 1.0]), &diag(&[0.0; 4]));
    let left = NodePovm::from_dense(vec![0], &diag(&[1.0, 0.0, 1.0, 0.0]), &diag(&[0.0, 1.0, 0.0, 1.0]), &diag(&[0.0; 4]));
    let right = identity_node(4, vec![1]);
    let dec = BisectionDecoder::from_nodes(4, vec![root, left, right]).unwrap();
    assert!(dec.bisection_operator(&[0, 0]).max_entry_diff(&diag(&[1.0, 0.0, 0.0, 0.0])) < 1e-14);
    assert!(dec.bisection_operator(&[0, 1]).max_entry_diff(&diag(&[0.0, 1.0, 0.0, 0.0])) < 1e-14);
}

#[test]
fn orthogonal_code_is_decoded_perfectly() {
    let code = orthogonal_code(8, 8);
    for m in [Method::Orthogonal, Method::Pgm, Method::Sequential] {
        let dec = BisectionDecoder::build(&code, m, &DecoderOptions::default());
        for l in 0..8 {
            assert!((dec.success_probability(&code, l) - 1.0).abs() < 1e-12);
        }
        assert!(dec.error_probability(&code) < 1e-12);
    }
    assert!(error_from_success(&full_pgm_success(&code, 1e-9)) < 1e-12);
    assert!(error_from_success(&full_sequential_success(&code)) < 1e-12);
}

#[test]
fn two_word_code_matches_direct_projector() {
    let code = orthogonal_code(3, 2);
    let dec = BisectionDecoder::build(&code, Method::Orthogonal, &DecoderOptions::default());
    assert!((dec.success_probability(&code, 1) - code.projector(1).trace_product(code.state(1).operator())).abs() < 1e-14);
}

#[test]
fn uniform_guessing_gives_one_minus_inverse_n() {
    let half = HermitianOperator::identity(2).scale(0.5);
    let zero = HermitianOperator::zeros(2);
    let nodes = (0..3)
        .map(|i| NodePovm::from_dense(if i == 0 { vec![] } else { vec![(i - 1) as u8] }, &half, &half, &zero))
        .collect();
    let dec = BisectionDecoder::from_nodes(2, nodes).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let fac = (0..4).map(|_| random_state_factor(&mut rng, 2, 1)).collect();
    let iso = (0..4).map(|_| random_isometry(&mut rng, 2, 1)).collect();
    let code = CodeInstance::from_parts(iso, fac).unwrap();
    assert!((dec.error_probability(&code) - 0.75).abs() < 1e-12);
}

#[test]
fn cascade_depth_one_reports_element_traces() {
    let code = random_code(9, 4, 2, 2);
    let dec = BisectionDecoder::build(&code, Method::Pgm, &DecoderOptions::default());
    let rho = code.state(0);
    let out = dec.simulate_cascade(&rho);
    let root = dec.node(&[]);
    assert!((out.leaf(&[0]) - root.dense(Outcome::Zero).trace_product(rho.operator())).abs() < 1e-12);
    assert!((out.leaf(&[1]) - root.dense(Outcome::One).trace_product(rho.operator())).abs() < 1e-12);
    assert!((out.null - root.dense(Outcome::Null).trace_product(rho.operator())).abs() < 1e-12);
    assert!((out.total() - 1.0).abs() < 1e-12);
}

#[test]
fn cascade_agrees_with_operator_and_factor_paths() {
    let opts = DecoderOptions::default();
    for (seed, m) in [(10, Method::Orthogonal), (11, Method::Pgm), (12, Method::Sequential)] {
        let code = random_code(seed, 8, 8, 2);
        let dec = BisectionDecoder::build(&code, m, &opts);
        let mut total_leaf = 0.0;
        for l in 0..8 {
            let rho = code.state(l);
            let out = dec.simulate_cascade(&rho);
            assert!((out.total() - 1.0).abs() < 1e-9);
            for v in 0..8 {
                let k = crate::ensembles::label_bits_of(v, 3);
                let f = dec.bisection_operator(&k);
                assert!((out.leaf(&k) - f.trace_product(rho.operator())).abs() < 1e-9, "{m:?} {l} {k:?} {} {}", out.leaf(&k), f.trace_product(rho.operator()));
                total_leaf += f.trace_product(rho.operator());
            }
            assert!((out.leaf(&code.label(l)) - dec.success_probability(&code, l)).abs() < 1e-9);
        }
        assert!(total_leaf <= 8.0 + 1e-9);
        for node in dec.nodes() {
            assert!(node.completeness_defect() < 1e-9);
            assert!(node.dense_completeness_defect() < 1e-9);
            assert!(node.interval_violation() < 1e-10);
        }
    }
}

#[test]
fn decoder_kind_parsing() {
    assert_eq!("pgm".parse::<DecoderKind>().unwrap(), DecoderKind::Pgm);
    assert_eq!("full-sequential-baseline".parse::<DecoderKind>().unwrap(), DecoderKind::FullSequential);
    assert!("helstrom".parse::<DecoderKind>().is_err());
}

#[test]
fn bad_sizes_rejected() {
    assert!(matches!(
        CodeInstance::from_parts(vec![basis_col(2, 0); 3], vec![basis_col(2, 0); 3]),
        Err(Error::InvalidCodeSize(3))
    ));
    assert!(BisectionDecoder::from_nodes(2, vec![identity_node(2, vec![]); 2]).is_err());
    let _ = max_entry(&CMatrix::zeros(1, 1));
}
