//! Acceptance gate: one test per criterion, each printing a PASS line with its
//! measured numbers (visible under `cargo test -- --nocapture`). Every bound
//! asserted here is the stated tolerance, not a loosened stand-in.

mod common;

use std::time::Instant;

use cpkw_core::bench::{run_bench, BenchConfig, BenchProtocol, InputClass};
use cpkw_core::bits::BitString;
use cpkw_core::coins::{CoinStream, ExplicitCoins};
use cpkw_core::cp::{parse_proof, verify_proof, Rule, VerifyOptions};
use cpkw_core::eq::{eq_protocol, EqParams};
use cpkw_core::kw::{build_search_tree, derivation_size, eval_search_tree, kw_bound, kw_play};
use cpkw_core::threshold::{
    bit_width, eval_threshold, threshold_deterministic, threshold_protocol, Partition,
    ThresholdFunction,
};
use cpkw_core::walk::{gt_walk, gt_walk_bound, WalkParams};
use common::{alpha_bits, bundled, project, BUNDLED};
use num_bigint::BigInt;

/// Criterion 1: the EQ fingerprint error is exactly 2^-k. For every n <= 3,
/// k <= 3 and every input pair, enumerating the full k*n-bit coin space gives
/// acceptance frequency exactly 1 for equal pairs and exactly 2^-k for unequal
/// pairs, with every transcript exactly k bits.
#[test]
fn criterion_1_eq_exact_error() {
    let t0 = Instant::now();
    let mut runs = 0u64;
    for n in 1usize..=3 {
        for k in 1u32..=3 {
            let coin_bits = k as usize * n;
            let outcomes = 1u64 << coin_bits;
            for xm in 0..(1u64 << n) {
                let x = BitString::from_u64(xm, n);
                for ym in 0..(1u64 << n) {
                    let y = BitString::from_u64(ym, n);
                    let mut accepts = 0u64;
                    for idx in 0..outcomes {
                        let mut coins = ExplicitCoins::from_index(idx, coin_bits);
                        let r = eq_protocol(&x, &y, EqParams::new(k).unwrap(), &mut coins)
                            .unwrap();
                        assert_eq!(
                            r.transcript.total_bits(),
                            u64::from(k),
                            "criterion 1: FAIL — transcript must be exactly k bits"
                        );
                        assert_eq!(coins.remaining(), 0, "criterion 1: FAIL — coin budget");
                        accepts += u64::from(r.output);
                        runs += 1;
                    }
                    let expect = if xm == ym { outcomes } else { outcomes >> k };
                    assert_eq!(
                        accepts, expect,
                        "criterion 1: FAIL — n={n} k={k} x={xm:b} y={ym:b}: \
                         {accepts}/{outcomes} accepts, expected {expect}"
                    );
                }
            }
        }
    }
    println!(
        "criterion 1: PASS — eq error exactly 2^-k over full coin space \
         (n,k <= 3; {runs} runs, {:.2?})",
        t0.elapsed()
    );
}

/// Criterion 2: both GT protocols stay within their error budget empirically.
/// For n in {4, 8, 16}, epsilon in {2^-3, 2^-6}, adversarial (x = y + 1) and
/// uniform inputs: over 10^5 seeded trials, empirical error
/// <= epsilon + 3*sqrt(epsilon/trials).
#[test]
fn criterion_2_gt_error_sweep() {
    let t0 = Instant::now();
    let trials = 100_000u64;
    let mut configs = 0;
    for protocol in [BenchProtocol::GtBaseline, BenchProtocol::GtWalk] {
        for n in [4usize, 8, 16] {
            for epsilon in [0.125f64, 0.015625] {
                for class in [InputClass::Adversarial, InputClass::Uniform] {
                    let cfg = BenchConfig { protocol, n, epsilon, trials, seed: 1002, class };
                    let row = run_bench(&cfg).unwrap();
                    let budget = epsilon + 3.0 * (epsilon / trials as f64).sqrt();
                    assert!(
                        row.empirical_error <= budget,
                        "criterion 2: FAIL — {} n={n} eps={epsilon} {}: error {} > {budget}",
                        protocol.name(),
                        class.name(),
                        row.empirical_error
                    );
                    assert!(
                        row.max_bits <= row.bound_bits,
                        "criterion 2: FAIL — {} n={n} eps={epsilon}: {} bits over bound {}",
                        protocol.name(),
                        row.max_bits,
                        row.bound_bits
                    );
                    configs += 1;
                }
            }
        }
    }
    println!(
        "criterion 2: PASS — empirical error within eps + 3*sqrt(eps/T) on {configs} configs \
         x {trials} trials ({:.2?})",
        t0.elapsed()
    );
}

/// Criterion 3: the walk transcript obeys the hard bound B*m + 2 on every
/// trial, and the bound's growth is logarithmic in n: at epsilon = 2^-6,
/// bound(256)/bound(16) <= (log2(256) + 6)/(log2(16) + 6) + 0.01.
#[test]
fn criterion_3_walk_bound_hard_and_logarithmic() {
    let t0 = Instant::now();
    let eps = 0.015625;
    let mut checked = 0u64;
    for n in [16usize, 256] {
        let params = WalkParams::for_inputs(n, eps).unwrap();
        let bound = params.transcript_bound();
        assert_eq!(bound, u64::from(params.per_step_bound()) * params.m as u64 + 2);
        for trial in 0..500 {
            let mut input = CoinStream::for_trial(77, 2 * trial);
            let x = BitString::random(n, &mut input);
            let y = BitString::random(n, &mut input);
            let mut coins = CoinStream::for_trial(77, 2 * trial + 1);
            let r = gt_walk(&x, &y, &params, &mut coins).unwrap();
            assert!(
                r.transcript.total_bits() <= bound,
                "criterion 3: FAIL — n={n} trial {trial}: {} bits over B*m+2 = {bound}",
                r.transcript.total_bits()
            );
            checked += 1;
        }
    }
    let b16 = gt_walk_bound(16, eps).unwrap() as f64;
    let b256 = gt_walk_bound(256, eps).unwrap() as f64;
    let limit = (8.0 + 6.0) / (4.0 + 6.0) + 0.01;
    assert!(
        b256 / b16 <= limit,
        "criterion 3: FAIL — bound(256)/bound(16) = {:.4} > {limit:.4}",
        b256 / b16
    );
    println!(
        "criterion 3: PASS — B*m+2 held on {checked} trials; bound(256)/bound(16) = \
         {b256}/{b16} = {:.4} <= {limit:.4} ({:.2?})",
        b256 / b16,
        t0.elapsed()
    );
}

/// Criterion 4: the walk never reports x > x. 10^4 random 32-bit inputs, zero
/// exceptions (the equal case is one-sided by construction).
#[test]
fn criterion_4_walk_equal_inputs_never_err() {
    let t0 = Instant::now();
    let n = 32;
    let params = WalkParams::for_inputs(n, 0.015625).unwrap();
    for trial in 0..10_000u64 {
        let mut input = CoinStream::for_trial(31, 2 * trial);
        let x = BitString::random(n, &mut input);
        let mut coins = CoinStream::for_trial(31, 2 * trial + 1);
        let r = gt_walk(&x, &x, &params, &mut coins).unwrap();
        assert!(
            !r.output,
            "criterion 4: FAIL — trial {trial}: gt_walk(x, x) returned true for x = {x}"
        );
    }
    println!(
        "criterion 4: PASS — gt_walk(x, x) = false on 10^4 random 32-bit inputs ({:.2?})",
        t0.elapsed()
    );
}

/// Renders a proof back to its file syntax (for mutation testing).
fn render_rule(rule: &Rule) -> String {
    match rule {
        Rule::Axiom(j) => format!("axiom {j}"),
        Rule::Add(p, q) => format!("add L{p} L{q}"),
        Rule::Mul(d, p) => format!("mul {d} L{p}"),
        Rule::Div(c, p) => format!("div {c} L{p}"),
    }
}

fn render_proof(proof: &cpkw_core::cp::Proof) -> String {
    proof
        .lines
        .iter()
        .map(|l| format!("L{}: {} ; {}\n", l.id, render_rule(&l.rule), l.stated.to_tokens()))
        .collect()
}

/// Criterion 5: the verifier accepts exactly the bundled refutations. All
/// bundled proofs verify; every single-token semantic mutation (any stated
/// integer shifted, any scalar shifted, any axiom index or premise reference
/// redirected, mul/div rule tag swapped) is rejected; and for every bundled
/// system, brute force over all 2^n assignments confirms unsatisfiability and
/// line-by-line rule soundness — the semantic fact the verifier certifies.
///
/// Not counted as mutations: token changes that are semantic no-ops by
/// design (renaming an unreferenced line label, swapping add's premises,
/// negating a mul scalar — all provably derive the identical line).
#[test]
fn criterion_5_verifier_accepts_only_valid_proofs() {
    let t0 = Instant::now();
    let opts = VerifyOptions::default();
    let mut mutations = 0u64;

    for stem in BUNDLED {
        let (sys, proof) = bundled(stem);
        let summary = verify_proof(&proof, &sys, &opts)
            .unwrap_or_else(|e| panic!("criterion 5: FAIL — {stem} does not verify: {e}"));
        assert!(summary.tree_like);

        // round-trip sanity: the renderer reproduces an equivalent proof
        assert_eq!(parse_proof(&render_proof(&proof)).unwrap(), proof);

        // exhaustive semantics, n <= 12: the system is really unsatisfiable
        let n = sys.n();
        assert!(n <= 12);
        for mask in 0..(1u32 << n) {
            let alpha = alpha_bits(mask, n);
            assert!(
                !sys.satisfied_by(&alpha),
                "criterion 5: FAIL — {stem}: alpha {alpha:?} satisfies every axiom"
            );
            // rule soundness oracle: satisfied premises force a satisfied line
            let stated: std::collections::HashMap<usize, _> =
                proof.lines.iter().map(|l| (l.id, &l.stated)).collect();
            for line in &proof.lines {
                let premises_ok = match &line.rule {
                    Rule::Axiom(j) => {
                        sys.resolve_axiom(*j, true).unwrap().satisfied_by(&alpha)
                    }
                    rule => rule
                        .premises()
                        .iter()
                        .all(|p| stated[p].satisfied_by(&alpha)),
                };
                if premises_ok {
                    assert!(
                        line.stated.satisfied_by(&alpha),
                        "criterion 5: FAIL — {stem} L{}: unsound under alpha {alpha:?}",
                        line.id
                    );
                }
            }
        }

        // single-token mutations, each of which must be rejected
        let max_axiom = sys.max_axiom_index(true);
        for (idx, line) in proof.lines.iter().enumerate() {
            let mut variants: Vec<(String, cpkw_core::cp::Proof)> = Vec::new();
            let mut push = |desc: String, mutant: cpkw_core::cp::ProofLine| {
                let mut lines = proof.lines.clone();
                lines[idx] = mutant;
                variants.push((desc, cpkw_core::cp::Proof { lines }));
            };
            for c in 0..line.stated.n() {
                let mut m = line.clone();
                m.stated.coeffs[c] += 1;
                push(format!("L{} coeff {} + 1", line.id, c + 1), m);
            }
            for delta in [1, -1] {
                let mut m = line.clone();
                m.stated.bound += delta;
                push(format!("L{} bound {delta:+}", line.id), m);
            }
            let earlier: Vec<usize> = proof.lines[..idx].iter().map(|l| l.id).collect();
            match &line.rule {
                Rule::Axiom(j) => {
                    for j2 in (1..=max_axiom).filter(|j2| j2 != j) {
                        let mut m = line.clone();
                        m.rule = Rule::Axiom(j2);
                        push(format!("L{} axiom {j} -> {j2}", line.id), m);
                    }
                }
                Rule::Add(p, q) => {
                    for &p2 in earlier.iter().filter(|&&e| e != *p) {
                        let mut m = line.clone();
                        m.rule = Rule::Add(p2, *q);
                        push(format!("L{} premise L{p} -> L{p2}", line.id), m);
                    }
                    for &q2 in earlier.iter().filter(|&&e| e != *q) {
                        let mut m = line.clone();
                        m.rule = Rule::Add(*p, q2);
                        push(format!("L{} premise L{q} -> L{q2}", line.id), m);
                    }
                }
                Rule::Mul(d, p) => {
                    let mut m = line.clone();
                    m.rule = Rule::Mul(d + 1, *p);
                    push(format!("L{} scalar {d} + 1", line.id), m);
                    let mut m = line.clone();
                    m.rule = Rule::Div(d.clone(), *p);
                    push(format!("L{} mul -> div", line.id), m);
                    for &p2 in earlier.iter().filter(|&&e| e != *p) {
                        let mut m = line.clone();
                        m.rule = Rule::Mul(d.clone(), p2);
                        push(format!("L{} premise L{p} -> L{p2}", line.id), m);
                    }
                }
                Rule::Div(c, p) => {
                    let mut m = line.clone();
                    m.rule = Rule::Div(c + 1, *p);
                    push(format!("L{} divisor {c} + 1", line.id), m);
                    let mut m = line.clone();
                    m.rule = Rule::Mul(c.clone(), *p);
                    push(format!("L{} div -> mul", line.id), m);
                    for &p2 in earlier.iter().filter(|&&e| e != *p) {
                        let mut m = line.clone();
                        m.rule = Rule::Div(c.clone(), p2);
                        push(format!("L{} premise L{p} -> L{p2}", line.id), m);
                    }
                }
            }
            for (desc, mutant) in variants {
                // the mutated text must also fail when re-parsed from disk form
                let reparsed = parse_proof(&render_proof(&mutant)).expect("mutants stay parseable");
                assert!(
                    verify_proof(&reparsed, &sys, &opts).is_err(),
                    "criterion 5: FAIL — {stem}: mutation \"{desc}\" still verifies"
                );
                mutations += 1;
            }
        }
    }
    println!(
        "criterion 5: PASS — {} proofs verified, {mutations} single-token mutations all \
         rejected, exhaustive unsat + soundness confirmed ({:.2?})",
        BUNDLED.len(),
        t0.elapsed()
    );
}

/// Criterion 6: search trees are shallow and total. For every bundled proof,
/// depth <= ceil(log_{3/2} S) + 1 where S is the derivation size, and for all
/// 2^n assignments the tree's answer is an axiom the assignment falsifies.
#[test]
fn criterion_6_search_tree_depth_and_totality() {
    let t0 = Instant::now();
    for stem in BUNDLED {
        let (sys, proof) = bundled(stem);
        let tree = build_search_tree(&proof, &sys, &VerifyOptions::default()).unwrap();
        let s = derivation_size(&proof);
        let depth_cap = (s as f64).log(1.5).ceil() as usize + 1;
        assert!(
            tree.depth() <= depth_cap,
            "criterion 6: FAIL — {stem}: depth {} > ceil(log_1.5 {s}) + 1 = {depth_cap}",
            tree.depth()
        );
        let n = sys.n();
        for mask in 0..(1u32 << n) {
            let alpha = alpha_bits(mask, n);
            let axiom = eval_search_tree(&tree, &alpha).unwrap();
            let ineq = sys.resolve_axiom(axiom, true).unwrap_or_else(|| {
                panic!("criterion 6: FAIL — {stem}: leaf names unknown axiom {axiom}")
            });
            assert!(
                !ineq.satisfied_by(&alpha),
                "criterion 6: FAIL — {stem}: alpha {alpha:?} satisfies returned axiom {axiom}"
            );
        }
    }
    println!(
        "criterion 6: PASS — all {} trees within depth cap and exhaustively correct ({:.2?})",
        BUNDLED.len(),
        t0.elapsed()
    );
}

/// Criterion 7: the randomized game solves the bundled 5-line example. With
/// partition 1;2 and epsilon_total = 0.05, over 10^4 trials cycling through
/// all four assignments, a falsified axiom is returned in >= 94% of runs and
/// every transcript obeys depth * (per-node bound + 2).
#[test]
fn criterion_7_kw_game_on_bundled_example() {
    let t0 = Instant::now();
    let (sys, proof) = bundled("sum");
    let tree = build_search_tree(&proof, &sys, &VerifyOptions::default()).unwrap();
    let part = Partition::parse("1;2", sys.n()).unwrap();
    let eps_total = 0.05;
    let bound = kw_bound(&tree, eps_total).unwrap();
    let trials = 10_000u64;
    let mut correct = 0u64;
    for trial in 0..trials {
        let alpha = alpha_bits((trial % 4) as u32, 2);
        let mut coins = CoinStream::for_trial(404, trial);
        let r = kw_play(
            &tree,
            &part,
            &project(&alpha, part.part_a()),
            &project(&alpha, part.part_b()),
            eps_total,
            &mut coins,
        )
        .unwrap();
        assert!(
            r.transcript.total_bits() <= bound,
            "criterion 7: FAIL — trial {trial}: {} bits over depth*(node bound + 2) = {bound}",
            r.transcript.total_bits()
        );
        let answered = sys.resolve_axiom(r.output, true).expect("tree answers are axioms");
        correct += u64::from(!answered.satisfied_by(&alpha));
    }
    assert!(
        correct * 100 >= trials * 94,
        "criterion 7: FAIL — only {correct}/{trials} correct (< 94%)"
    );
    println!(
        "criterion 7: PASS — {correct}/{trials} correct answers (>= 94%), all transcripts \
         <= {bound} bits ({:.2?})",
        t0.elapsed()
    );
}

/// Criterion 8: coefficient magnitude does not reach the wire. For the
/// threshold function with +-2^100 coefficients on 4 variables, across all 16
/// partitions x all 16 assignments (10^4 trials round-robin), the protocol
/// agrees with exact evaluation with frequency >= 1 - eps - 3*sqrt(eps/T) at
/// eps = 1/16, while the deterministic exchange costs > 100 bits.
#[test]
fn criterion_8_threshold_beats_coefficient_width() {
    let t0 = Instant::now();
    let big = BigInt::from(2).pow(100);
    let f = ThresholdFunction::new(
        vec![big.clone(), -big.clone(), big.clone(), -big],
        BigInt::ZERO,
    )
    .unwrap();
    assert!(bit_width(&f) > 100);
    let eps = 0.0625;
    let partitions: Vec<Partition> = (0..16u32)
        .map(|mask| {
            let part_a: Vec<usize> = (1..=4).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            let part_b: Vec<usize> = (1..=4).filter(|i| mask >> (i - 1) & 1 == 0).collect();
            Partition::new(part_a, part_b, 4).unwrap()
        })
        .collect();

    let trials = 10_000u64;
    let mut agree = 0u64;
    for trial in 0..trials {
        let combo = (trial % 256) as u32;
        let part = &partitions[(combo / 16) as usize];
        let alpha = alpha_bits(combo % 16, 4);
        let expected = eval_threshold(&f, &alpha).unwrap();
        let mut coins = CoinStream::for_trial(888, trial);
        let r = threshold_protocol(
            &f,
            part,
            &project(&alpha, part.part_a()),
            &project(&alpha, part.part_b()),
            eps,
            &mut coins,
        )
        .unwrap();
        agree += u64::from(r.output == expected);

        // the deterministic exchange pays for the coefficient width every time
        let det = threshold_deterministic(
            &f,
            part,
            &project(&alpha, part.part_a()),
            &project(&alpha, part.part_b()),
        )
        .unwrap();
        assert_eq!(det.output, expected);
        assert!(
            det.transcript.total_bits() > 100,
            "criterion 8: FAIL — deterministic exchange under 100 bits"
        );
    }
    let needed = ((1.0 - eps - 3.0 * (eps / trials as f64).sqrt()) * trials as f64).ceil() as u64;
    assert!(
        agree >= needed,
        "criterion 8: FAIL — agreement {agree}/{trials} below {needed}"
    );
    println!(
        "criterion 8: PASS — agreement {agree}/{trials} (needed {needed}), deterministic cost \
         {} bits > 100 ({:.2?})",
        bit_width(&f) + 1,
        t0.elapsed()
    );
}
