//! Randomized invariants over exact-rational inputs: coupling marginals,
//! the entropy sandwich, majorization dominance, prefix-code optimality, and
//! factorization checks.

use proptest::prelude::*;

use privcache_core::bounds::{GENERAL_GAP, LOG2E_OVER_E};
use privcache_core::codec::PrefixCode;
use privcache_core::coupling::{functional_representation, greedy_coupling, greedy_qstar, verify_u_constraints};
use privcache_core::prob::{
    ConditionalKernel, FiniteDistribution, JointTable, majorization_glb, majorized_by,
};
use privcache_core::rational::{Ratio, to_f64};

fn weights(len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..9, len).prop_filter("positive total", |w| w.iter().sum::<u64>() > 0)
}

fn distribution(max_len: usize) -> impl Strategy<Value = FiniteDistribution> {
    (1..=max_len)
        .prop_flat_map(weights)
        .prop_map(|w| FiniteDistribution::from_weights(&w).unwrap())
}

fn kernel() -> impl Strategy<Value = ConditionalKernel> {
    (1usize..=6, 1usize..=4)
        .prop_flat_map(|(rows, cols)| prop::collection::vec(weights(rows), cols))
        .prop_map(|columns| {
            ConditionalKernel::new(
                columns
                    .into_iter()
                    .map(|w| FiniteDistribution::from_weights(&w).unwrap())
                    .collect(),
            )
            .unwrap()
        })
}

fn joint() -> impl Strategy<Value = JointTable> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(rows, cols)| (Just(rows), Just(cols), weights(rows * cols)))
        .prop_map(|(rows, cols, w)| {
            let total: u64 = w.iter().sum();
            let mass = w
                .iter()
                .map(|&v| Ratio::new(v.into(), total.into()))
                .collect();
            JointTable::new(rows, cols, mass).unwrap()
        })
}

proptest! {
    #[test]
    fn coupling_marginals_are_exact_for_random_kernels(k in kernel()) {
        let table = greedy_coupling(&k).unwrap();
        for x in 0..k.num_conditions() {
            for c in 0..k.num_outcomes() {
                let got: Ratio = table
                    .atoms()
                    .iter()
                    .filter(|a| a.outcome_per_x[x] == c)
                    .map(|a| a.mass.ratio().clone())
                    .sum();
                prop_assert_eq!(&got, k.column(x).mass(c));
            }
        }
    }

    #[test]
    fn coupling_masses_equal_the_extraction_sequence(k in kernel()) {
        let masses = greedy_coupling(&k).unwrap().mass_distribution();
        prop_assert_eq!(masses, greedy_qstar(&k).unwrap());
    }

    #[test]
    fn entropy_sandwich_holds(k in kernel()) {
        let q = greedy_qstar(&k).unwrap();
        let coupled = greedy_coupling(&k).unwrap().mass_distribution();
        let gap = if k.num_conditions() == 2 { LOG2E_OVER_E } else { GENERAL_GAP };
        prop_assert!(q.entropy_bits() <= coupled.entropy_bits() + 1e-9);
        prop_assert!(coupled.entropy_bits() <= q.entropy_bits() + gap + 1e-9);
    }

    #[test]
    fn majorization_glb_sits_below_the_extraction_sequence(k in kernel()) {
        let glb = majorization_glb(k.columns()).unwrap();
        for column in k.columns() {
            prop_assert!(majorized_by(&glb, column));
        }
        let q = greedy_qstar(&k).unwrap();
        prop_assert!(glb.entropy_bits() <= q.entropy_bits() + 1e-9);
    }

    #[test]
    fn greedy_output_satisfies_both_constraints(k in kernel()) {
        let frep = functional_representation(&greedy_coupling(&k).unwrap()).unwrap();
        let report = verify_u_constraints(&k, &frep).unwrap();
        prop_assert!(report.message_determined);
        prop_assert!(report.atom_independent);
    }

    #[test]
    fn zero_information_means_product_form(j in joint()) {
        let mi = j.mutual_information_bits();
        if j.is_product() {
            prop_assert!(mi.abs() < 1e-12);
        } else {
            prop_assert!(mi > 1e-12);
        }
    }

    #[test]
    fn products_built_from_marginals_carry_no_information(
        row in distribution(4),
        col in distribution(5),
    ) {
        let kernel = ConditionalKernel::new(vec![col.clone(); row.len()]).unwrap();
        let j = JointTable::from_kernel_rows(&kernel, &row).unwrap();
        prop_assert!(j.is_product());
        prop_assert!(j.mutual_information_bits().abs() < 1e-12);
    }

    #[test]
    fn push_forward_preserves_the_row_marginal(j in joint(), merge in 1usize..=3) {
        let pushed = j.push_forward(merge, |c| Some(c % merge)).unwrap();
        prop_assert_eq!(pushed.row_marginal(), j.row_marginal());
    }

    #[test]
    fn prefix_codes_satisfy_kraft_and_the_one_bit_law(d in distribution(8)) {
        let code = PrefixCode::build(&d).unwrap();
        let one = Ratio::new(1.into(), 1.into());
        prop_assert!(code.kraft_sum() <= one);
        // Huffman codes are complete on their support
        prop_assert_eq!(code.kraft_sum(), one);
        let expected = to_f64(&code.expected_length(&d).unwrap());
        let entropy = d.entropy_bits();
        prop_assert!(expected <= entropy + 1.0 + 1e-9);
        prop_assert!(expected >= entropy - 1e-9);
    }

    #[test]
    fn sorting_and_pruning_preserve_total_mass(d in distribution(8)) {
        let sorted = d.sorted_descending();
        // same multiset of masses; entropy may differ by summation order only
        prop_assert!((sorted.entropy_bits() - d.entropy_bits()).abs() < 1e-12);
        let (pruned, kept) = d.prune_zeros();
        prop_assert_eq!(pruned.len(), kept.len());
        prop_assert_eq!(pruned.support_size(), d.support_size());
    }
}
