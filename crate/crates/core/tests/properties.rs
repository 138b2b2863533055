mod common;

use std::collections::BTreeSet;

use common::*;
use ifp::calculus::{
    apply_rule_backward, apply_rule_forward, check_proof, match_step, Annotation, ProofEntry,
    ProofScript, RuleApp, RuleKind,
};
use ifp::cirquent::{Cirquent, Dir, Path};
use ifp::prover::{decide, reduce_to_classical, resolve_cluster, Decision};
use ifp::semantics::{classical_tautology, metatrue, true_under, valid};
use ifp::syntax::{parse, print};
use proptest::prelude::*;
use rand::Rng;

fn atoms_of(cs: &[&Cirquent]) -> BTreeSet<String> {
    cs.iter().flat_map(|c| c.atoms()).collect()
}

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rules_preserve_truth_both_ways(seed in seeds(), rule_index in 0usize..5, kind_index in 0usize..3) {
        let mut rng = seeded(seed);
        let rule = RuleKind::ALL[rule_index];
        let inst = random_rule_instance(&mut rng, rule, CIRC_KINDS[kind_index]);
        let conclusion = apply_rule_forward(&inst.premise, &inst.app).unwrap();
        for i in all_interpretations(&atoms_of(&[&inst.premise, &conclusion])) {
            prop_assert_eq!(oracle_true(&inst.premise, &i), oracle_true(&conclusion, &i));
        }
    }

    #[test]
    fn backward_steps_are_undone_by_forward_steps(seed in seeds(), rule_index in 0usize..5, kind_index in 0usize..3) {
        let mut rng = seeded(seed);
        let rule = RuleKind::ALL[rule_index];
        let inst = random_rule_instance(&mut rng, rule, CIRC_KINDS[kind_index]);
        let conclusion = apply_rule_forward(&inst.premise, &inst.app).unwrap();
        let premise = apply_rule_backward(&conclusion, &inst.app).unwrap();
        for i in all_interpretations(&atoms_of(&[&premise, &conclusion])) {
            prop_assert_eq!(true_under(&premise, &i).unwrap(), true_under(&conclusion, &i).unwrap());
        }
        let mut app = inst.app.clone();
        if rule.is_rule_one() {
            let at = app.hole.child(if rule == RuleKind::ILeft { Dir::L } else { Dir::R }).join(&app.inner);
            let (l, r) = conclusion.subcirquent_at(&at).unwrap().children().unwrap();
            app.new_subcirquent = Some(if rule == RuleKind::ILeft { r.clone() } else { l.clone() });
        }
        let again = apply_rule_forward(&premise, &app).unwrap();
        prop_assert!(again.matches_modulo_singletons(&conclusion));
        prop_assert!(match_step(&premise, &conclusion, None).unwrap().is_some());
    }

    #[test]
    fn substitution_into_a_clustered_hole(seed in seeds()) {
        let mut rng = seeded(seed);
        let context = { let n = rng.gen_range(0..4); random_cirquent(&mut rng, 5, n, 3) };
        let hole = random_path(&mut rng, &context);
        let a = { let n = rng.gen_range(0..3); random_cirquent(&mut rng, 5, n, 3) };
        let b = { let n = rng.gen_range(0..3); random_cirquent(&mut rng, 5, n, 3) };
        let k = id(rng.gen_range(1..=3));
        let whole = context.replace_at(&hole, Cirquent::Or(k, Box::new(a.clone()), Box::new(b.clone()))).unwrap();
        let with_a = context.replace_at(&hole, a).unwrap();
        let with_b = context.replace_at(&hole, b).unwrap();
        let interpretations = all_interpretations(&whole.atoms());
        let i = &interpretations[rng.gen_range(0..interpretations.len())];
        for f in all_metaselections(&whole.cluster_ids()) {
            let left = f.get(k) == Some(ifp::Side::Left);
            let expected = if left {
                metatrue(&with_a, i, &f).unwrap()
            } else {
                metatrue(&with_b, i, &f).unwrap()
            };
            prop_assert_eq!(metatrue(&whole, i, &f).unwrap(), expected);
        }
    }

    #[test]
    fn printing_round_trips(seed in seeds(), show_ids in any::<bool>()) {
        let mut rng = seeded(seed);
        let c = { let n = rng.gen_range(0..12); random_cirquent(&mut rng, 5, n, 4) };
        let back = parse(&print(&c, show_ids)).unwrap();
        prop_assert!(back.cluster_iso(&c));
        if show_ids {
            prop_assert_eq!(back, c);
        }
    }

    #[test]
    fn canonicalization_is_idempotent_and_iso(seed in seeds()) {
        let mut rng = seeded(seed);
        let c = { let n = rng.gen_range(0..12); random_cirquent(&mut rng, 5, n, 5) };
        let canon = c.canonicalize_ids();
        prop_assert!(canon.cluster_iso(&c));
        prop_assert_eq!(canon.canonicalize_ids(), canon.clone());
        let renamed = c.map_ids(&mut |k| id(k.get() * 7 + 3));
        prop_assert_eq!(renamed.canonicalize_ids(), canon);
    }

    #[test]
    fn clusters_partition_the_disjunctions(seed in seeds()) {
        let mut rng = seeded(seed);
        let c = { let n = rng.gen_range(0..12); random_cirquent(&mut rng, 5, n, 4) };
        let table = c.clusters();
        let members: Vec<Path> = table.iter().flat_map(|(_, ms)| ms.iter().cloned()).collect();
        let disjunctions: Vec<Path> = c.or_nodes().into_iter().map(|(p, _)| p).collect();
        prop_assert_eq!(members.len(), disjunctions.len());
        let as_set: BTreeSet<Path> = members.into_iter().collect();
        prop_assert_eq!(as_set, disjunctions.into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn common_ancestor_is_no_deeper_than_either(seed in seeds()) {
        let mut rng = seeded(seed);
        let c = { let n = rng.gen_range(1..12); random_cirquent(&mut rng, 5, n, 4) };
        let a = random_path(&mut rng, &c);
        let b = random_path(&mut rng, &c);
        let nca = c.nearest_common_ancestor(&a, &b).unwrap();
        let level = c.level(&nca).unwrap();
        prop_assert!(level <= c.level(&a).unwrap().min(c.level(&b).unwrap()));
        prop_assert!(nca.is_prefix_of(&a) && nca.is_prefix_of(&b));
    }

    #[test]
    fn classical_cirquents_are_conservative(seed in seeds()) {
        let mut rng = seeded(seed);
        let c = { let n = rng.gen_range(0..10); random_classical(&mut rng, 4, n) };
        let tautology = all_interpretations(&c.atoms()).iter().all(|i| oracle_classical(&c, i));
        prop_assert_eq!(valid(&c).unwrap(), tautology);
        prop_assert_eq!(classical_tautology(&c).unwrap(), tautology);
    }

    #[test]
    fn reduction_preserves_truth_everywhere(seed in seeds()) {
        let mut rng = seeded(seed);
        let c = { let n = rng.gen_range(0..9); random_cirquent(&mut rng, 4, n, 3) };
        let d = reduce_to_classical(&c).unwrap();
        prop_assert!(d.result().is_classical());
        prop_assert!(d.replays());
        for i in all_interpretations(&c.atoms()) {
            let mut padded = i.clone();
            for atom in d.result().atoms() {
                if padded.get(&atom).is_none() {
                    padded.set(atom, false);
                }
            }
            prop_assert_eq!(true_under(&c, &i).unwrap(), true_under(d.result(), &padded).unwrap());
        }
    }

    #[test]
    fn decisions_agree_with_brute_force(seed in seeds()) {
        let mut rng = seeded(seed);
        let c = { let n = rng.gen_range(0..9); random_cirquent(&mut rng, 4, n, 3) };
        match decide(&c).unwrap() {
            Decision::Valid(ps) => {
                prop_assert!(oracle_valid(&c));
                prop_assert!(check_proof(&ps).is_ok());
                prop_assert!(ps.last().matches_modulo_singletons(&c));
            }
            Decision::Invalid(i) => {
                prop_assert!(!oracle_valid(&c));
                prop_assert!(!oracle_true(&c, &i));
            }
        }
    }

    #[test]
    fn cluster_resolution_terminates_with_a_decreasing_measure(seed in seeds()) {
        let mut rng = seeded(seed);
        let c = { let n = rng.gen_range(2..10); random_unnested(&mut rng, 4, n, 2) };
        let Some(k) = c.clusters().non_singleton_ids().next() else {
            return Ok(());
        };
        let d = resolve_cluster(&c, k).unwrap();
        prop_assert!(d.result().clusters().is_singleton(k));
        for pair in d.runs[0].trace.windows(2) {
            prop_assert!(pair[1].measure() < pair[0].measure());
        }
        for cirquent in d.cirquents() {
            prop_assert!(cirquent.nested_same_cluster_pairs().is_empty());
        }
    }
}

#[test]
fn rule_sizes_account_for_the_key_cluster() {
    // Backward Rule III merges two key disjunctions; backward Rule II keeps
    // the count when the copied part holds no key disjunction.
    let mut rng = seeded(7);
    let mut checked = 0;
    while checked < 200 {
        let rule = [RuleKind::IILeft, RuleKind::IIRight, RuleKind::III][rng.gen_range(0..3)];
        let kind = CIRC_KINDS[rng.gen_range(0..3)];
        let inst = random_rule_instance(&mut rng, rule, kind);
        let conclusion = apply_rule_forward(&inst.premise, &inst.app).unwrap();
        let k = inst.app.k;
        let node = conclusion.subcirquent_at(&inst.app.hole).unwrap();
        if node.cluster_id() == Some(k) {
            continue;
        }
        let copied = match rule {
            RuleKind::IILeft => node.child(Dir::R).unwrap(),
            RuleKind::IIRight => node.child(Dir::L).unwrap(),
            _ => node,
        };
        if rule != RuleKind::III && copied.cluster_ids().contains(&k) {
            continue;
        }
        let premise = apply_rule_backward(&conclusion, &inst.app).unwrap();
        let before = conclusion.clusters().size(k);
        let after = premise.clusters().size(k);
        let expected = if rule == RuleKind::III {
            before - 1
        } else {
            before
        };
        assert_eq!(after, expected, "{rule} on {conclusion}");
        checked += 1;
    }
}

#[test]
fn rule_one_backward_shrinks_the_key_cluster() {
    let mut rng = seeded(8);
    for _ in 0..200 {
        let rule = [RuleKind::ILeft, RuleKind::IRight][rng.gen_range(0..2)];
        let inst = random_rule_instance(&mut rng, rule, CircKind::And);
        let conclusion = apply_rule_forward(&inst.premise, &inst.app).unwrap();
        let premise = apply_rule_backward(&conclusion, &inst.app).unwrap();
        let k = inst.app.k;
        assert!(premise.clusters().size(k) < conclusion.clusters().size(k));
    }
}

/// Tries every rule at every disjunction and returns a random successful
/// forward step.
fn random_forward_step(rng: &mut impl Rng, c: &Cirquent) -> Option<Cirquent> {
    let mut results = Vec::new();
    for (hole, k) in c.or_nodes() {
        for rule in RuleKind::ALL {
            let mut app = RuleApp::new(rule, hole.clone(), k);
            if rule.is_rule_one() {
                let side = if rule == RuleKind::ILeft {
                    Dir::L
                } else {
                    Dir::R
                };
                let disjunct = c.subcirquent_at(&hole.child(side)).unwrap();
                let n = rng.gen_range(0..3);
                let b = random_cirquent(rng, 3, n, 3);
                app = app
                    .with_inner(random_path(rng, disjunct))
                    .with_new_subcirquent(b);
            }
            if let Ok(next) = apply_rule_forward(c, &app) {
                results.push(next);
            }
        }
    }
    (!results.is_empty()).then(|| results.swap_remove(rng.gen_range(0..results.len())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn checked_proofs_end_in_valid_cirquents(seed in seeds()) {
        let mut rng = seeded(seed);
        // A classical tautology: some formula or its dual negation.
        let n = rng.gen_range(0..4);
        let f = random_classical(&mut rng, 3, n);
        let axiom = make_classical(&Cirquent::Or(id(1), Box::new(f.clone()), Box::new(negate(&f))));
        let mut lines = vec![axiom];
        for _ in 0..rng.gen_range(1..5) {
            match random_forward_step(&mut rng, lines.last().unwrap()) {
                Some(next) if next.size() < 60 => lines.push(next),
                _ => break,
            }
        }
        let entries = lines
            .iter()
            .map(|c| ProofEntry { cirquent: c.clone(), annotation: Annotation::None })
            .collect();
        let ps = ProofScript::new(entries).unwrap();
        prop_assert!(check_proof(&ps).is_ok());
        prop_assert!(oracle_valid(ps.last()));
    }
}

fn negate(c: &Cirquent) -> Cirquent {
    match c {
        Cirquent::Lit { atom, positive } => Cirquent::lit(atom.clone(), !positive),
        Cirquent::And(l, r) => Cirquent::Or(id(1), Box::new(negate(l)), Box::new(negate(r))),
        Cirquent::Or(_, l, r) => Cirquent::and(negate(l), negate(r)),
    }
}
