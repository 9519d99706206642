//! Acceptance gate for the crate. Each test covers one numbered
//! criterion and prints a single `criterion NN: PASS|FAIL` line; run
//! with `--nocapture` to see the lines. Failures also panic with the
//! offending cases listed.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use linkstab::entanglement::{
    flat_entropy, ghz_count, reduced_density_matrix, replica_z,
};
use linkstab::gates::{self, GateMatrix};
use linkstab::so3::{dimension_inequality, fusion_rules, so3_s_matrix, verlinde_dim};
use linkstab::stabilizer::is_stabilizer;
use linkstab::surgery::{state_from_presentation, tableau_from_presentation};
use linkstab::tensornet::{clifford_word, stabilizer_state_from_word, CliffordLetter};
use linkstab::{
    CycScalar, DenseState, Level, NodeKind, Perm, ReplicaSpec, Site,
    SurgeryPresentation, TensorNetwork,
};

macro_rules! check {
    ($fails:expr, $cond:expr, $($msg:tt)+) => {
        if !$cond {
            $fails.push(format!($($msg)+));
        }
    };
}

fn report(number: u32, what: &str, fails: Vec<String>) {
    if fails.is_empty() {
        println!("criterion {number:02}: PASS - {what}");
    } else {
        println!("criterion {number:02}: FAIL - {what}");
        panic!("criterion {number:02} failed:\n  {}", fails.join("\n  "));
    }
}

fn lv(k: u64) -> Level {
    Level::new(k).unwrap()
}

fn within(fails: &mut Vec<String>, elapsed: Duration, budget_s: u64) {
    check!(
        fails,
        elapsed < Duration::from_secs(budget_s),
        "runtime {elapsed:?} exceeds the {budget_s} s budget"
    );
}

/// Two cups feeding a fusion vertex: the three-leg state
/// `Σ |a, b, a+b⟩`, contracted from its network and renamed to
/// `q0 q1 q2`.
fn fusion_network_state(level: Level) -> DenseState {
    let mut net = TensorNetwork::new(level);
    net.add_node("c1", NodeKind::Cup).unwrap();
    net.add_node("c2", NodeKind::Cup).unwrap();
    net.add_node("f", NodeKind::Fusion).unwrap();
    net.wire("c1.out2", "f.in1").unwrap();
    net.wire("c2.out2", "f.in2").unwrap();
    net.open_leg("c1.out1").unwrap();
    net.open_leg("c2.out1").unwrap();
    net.open_leg("f.out").unwrap();
    let s = net.contract().unwrap();
    let s = s.renamed("c1.out1", "q0").unwrap();
    let s = s.renamed("c2.out1", "q1").unwrap();
    s.renamed("f.out", "q2").unwrap()
}

#[test]
fn criterion_01_fusion_state_partition_values() {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    for k in [3u64, 5, 7] {
        let level = lv(k);
        let s = fusion_network_state(level);
        let ki = k as i64;

        let z1 = replica_z(&s, &ReplicaSpec::new(1).unwrap()).unwrap();
        check!(fails, z1.is_int(ki * ki), "k={k}: Z1 != k^2");

        let mut swap = ReplicaSpec::new(2).unwrap();
        swap.add_region(&["q0"], Perm::Swap).unwrap();
        let z2 = replica_z(&s, &swap).unwrap();
        check!(fails, z2.is_int(ki * ki * ki), "k={k}: Z2 != k^3");

        let mut cyc = ReplicaSpec::new(3).unwrap();
        cyc.add_region(&["q0"], Perm::Cycle).unwrap();
        cyc.add_region(&["q1"], Perm::CycleInv).unwrap();
        cyc.add_region(&["q2"], Perm::Id).unwrap();
        let z3 = replica_z(&s, &cyc).unwrap();
        check!(fails, z3.is_int(ki * ki * ki * ki), "k={k}: Z3 != k^4");

        for region in ["q0", "q1", "q2"] {
            let e = flat_entropy(&s, &[region]).unwrap();
            check!(
                fails,
                e.exact_dits == Some(1),
                "k={k}: S({region}) = {:?}, want exactly 1 dit",
                e.exact_dits
            );
        }
        let g = ghz_count(&s, &["q0"], &["q1"], &["q2"]).unwrap();
        check!(fails, g == 1, "k={k}: g = {g}, want 1");
    }
    within(&mut fails, t0.elapsed(), 1);
    report(1, "fusion state replica values, entropies, and GHZ count", fails);
}

#[test]
fn criterion_02_random_clifford_words_are_stabilizer() {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    let level = lv(5);
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for trial in 0..200 {
        let n = rng.gen_range(1..=3usize);
        let mut word = Vec::with_capacity(10);
        for _ in 0..10 {
            let pick = if n == 1 {
                rng.gen_range(0..4u8)
            } else {
                rng.gen_range(0..5u8)
            };
            word.push(match pick {
                0 => CliffordLetter::S(rng.gen_range(0..n)),
                1 => CliffordLetter::P(rng.gen_range(0..n)),
                2 => CliffordLetter::X(rng.gen_range(0..n)),
                3 => CliffordLetter::Z(rng.gen_range(0..n)),
                _ => {
                    let c = rng.gen_range(0..n);
                    let mut t = rng.gen_range(0..n - 1);
                    if t >= c {
                        t += 1;
                    }
                    CliffordLetter::CAdd(c, t)
                }
            });
        }
        let s = stabilizer_state_from_word(level, n, &word).unwrap();
        match is_stabilizer(&s) {
            Ok(true) => {}
            Ok(false) => {
                check!(fails, false, "trial {trial}: word {word:?} on {n} sites failed the Wigner test")
            }
            Err(e) => check!(fails, false, "trial {trial}: {e}"),
        }
    }
    within(&mut fails, t0.elapsed(), 30);
    report(2, "200 random ten-letter Clifford words pass the Wigner test", fails);
}

struct RawPresentation {
    boundaries: usize,
    surgeries: usize,
    entries: Vec<(usize, usize, i64)>,
}

fn sample_presentation(rng: &mut StdRng) -> RawPresentation {
    let boundaries = rng.gen_range(1..=3usize);
    let surgeries = rng.gen_range(0..=3usize);
    let total = boundaries + surgeries;
    let mut entries = Vec::new();
    for a in 0..total {
        for b in a..total {
            entries.push((a, b, rng.gen_range(-3..=3i64)));
        }
    }
    RawPresentation {
        boundaries,
        surgeries,
        entries,
    }
}

fn materialize(raw: &RawPresentation, level: Level) -> SurgeryPresentation {
    let mut p = SurgeryPresentation::new(level);
    let mut names = Vec::new();
    for i in 0..raw.boundaries {
        let name = format!("b{i}");
        p.add_boundary(&name).unwrap();
        names.push(name);
    }
    for i in 0..raw.surgeries {
        let name = format!("s{i}");
        p.add_surgery(&name).unwrap();
        names.push(name);
    }
    for &(a, b, v) in &raw.entries {
        if a == b {
            p.set_framing(&names[a], v).unwrap();
        } else {
            p.set_link(&names[a], &names[b], v).unwrap();
        }
    }
    p
}

#[test]
fn criterion_03_random_presentations_round_trip() {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let levels = [lv(5), lv(13)];
    let mut accepted = 0;
    let mut resampled = 0;
    while accepted < 100 {
        // Presentations whose surgery sums annihilate every amplitude
        // describe no state at all; they are resampled rather than
        // counted.
        if resampled > 400 {
            check!(fails, false, "resample budget exhausted");
            break;
        }
        let raw = sample_presentation(&mut rng);
        let mut prepared = Vec::new();
        for &level in &levels {
            let p = materialize(&raw, level);
            let s = state_from_presentation(&p, false).unwrap();
            if s.is_zero() {
                prepared.clear();
                break;
            }
            prepared.push((p, s));
        }
        if prepared.is_empty() {
            resampled += 1;
            continue;
        }
        for (p, s) in &prepared {
            let k = p.level().k();
            match is_stabilizer(s) {
                Ok(true) => {}
                Ok(false) => check!(
                    fails,
                    false,
                    "presentation {accepted} at k={k}: Wigner test failed"
                ),
                Err(e) => check!(fails, false, "presentation {accepted} at k={k}: {e}"),
            }
            let tableau = tableau_from_presentation(p, false).unwrap();
            let sites = p.boundary_sites();
            let dense = tableau.dense_state(&sites).unwrap();
            let same = dense.proportional_to(s).unwrap();
            check!(
                fails,
                same,
                "presentation {accepted} at k={k}: tableau state differs from the dense state"
            );
        }
        accepted += 1;
    }
    within(&mut fails, t0.elapsed(), 60);
    report(
        3,
        "100 random surgery presentations are stabilizer and round-trip through tableaux",
        fails,
    );
}

fn word_as_state(level: Level, n: usize, word: &[CliffordLetter]) -> (DenseState, Vec<String>) {
    let net = clifford_word(level, n, word).unwrap();
    let legs = net.open_legs();
    let got = net.contract().unwrap();
    (got, legs)
}

#[test]
fn criterion_04_gate_identities_and_network_closed_forms() {
    let mut fails = Vec::new();
    for k in [3u64, 5, 7] {
        let level = lv(k);
        let id = GateMatrix::identity(level, 1);
        let s = gates::s_gate(level);
        let t = gates::t_gate(level);
        let p = gates::p_gate(level);
        let x = gates::x_gate(level);
        let z = gates::z_gate(level);

        let mut zpow = GateMatrix::identity(level, 1);
        for _ in 0..(k - 1) / 2 {
            zpow = zpow.compose(&z).unwrap();
        }
        check!(
            fails,
            zpow.compose(&t).unwrap() == p,
            "k={k}: P != Z^((k-1)/2) T"
        );
        check!(
            fails,
            s.compose(&x).unwrap().compose(&s.dagger()).unwrap() == z,
            "k={k}: Z != S X Sdag"
        );
        check!(
            fails,
            s.compose(&s.dagger()).unwrap() == id && s.dagger().compose(&s).unwrap() == id,
            "k={k}: S is not unitary"
        );
        check!(
            fails,
            t.compose(&t.dagger()).unwrap() == id && t.dagger().compose(&t).unwrap() == id,
            "k={k}: T is not unitary"
        );

        let cadd_closed = GateMatrix::from_fn(level, 2, 2, |o, i| {
            if o[0] == i[0] && o[1] == (i[0] + i[1]) % k {
                CycScalar::one(level)
            } else {
                CycScalar::zero(level)
            }
        });
        let (got, legs) = word_as_state(level, 2, &[CliffordLetter::CAdd(0, 1)]);
        let want = cadd_closed
            .as_state(&[&legs[0], &legs[1]], &[&legs[2], &legs[3]])
            .unwrap();
        let order: Vec<&str> = want.sites().iter().map(|site| site.name.as_str()).collect();
        let got = got.permuted(&order).unwrap();
        check!(
            fails,
            got.proportional_to(&want).unwrap(),
            "k={k}: controlled-add gadget is not proportional to its closed form"
        );

        let perfect_closed = GateMatrix::from_fn(level, 2, 2, |o, i| {
            if o[0] == (i[0] + i[1]) % k && o[1] == (i[0] + 2 * i[1]) % k {
                CycScalar::one(level)
            } else {
                CycScalar::zero(level)
            }
        });
        let (got, legs) = word_as_state(
            level,
            2,
            &[CliffordLetter::CAdd(1, 0), CliffordLetter::CAdd(0, 1)],
        );
        let want = perfect_closed
            .as_state(&[&legs[0], &legs[1]], &[&legs[2], &legs[3]])
            .unwrap();
        let order: Vec<&str> = want.sites().iter().map(|site| site.name.as_str()).collect();
        let got = got.permuted(&order).unwrap();
        check!(
            fails,
            got.proportional_to(&want).unwrap(),
            "k={k}: chained-gadget contraction is not proportional to the perfect tensor"
        );
    }
    report(4, "gate identities and gadget contractions match closed forms", fails);
}

#[test]
fn criterion_05_perfect_tensor_bipartitions() {
    let mut fails = Vec::new();
    let legs = ["o0", "o1", "i0", "i1"];
    for k in [3u64, 5, 7] {
        let level = lv(k);
        let s = gates::perfect_tensor(level)
            .as_state(&["o0", "o1"], &["i0", "i1"])
            .unwrap();
        for mask in 1usize..16 {
            let region: Vec<&str> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| legs[i]).collect();
            if region.len() > 2 {
                continue;
            }
            let rho = reduced_density_matrix(&s, &region).unwrap();
            let id = GateMatrix::identity(level, region.len());
            check!(
                fails,
                rho.proportional_to(&id).unwrap(),
                "k={k}: reduced state on {region:?} is not proportional to the identity"
            );
        }
    }
    report(5, "perfect tensor is unitary or isometric across every bipartition", fails);
}

#[test]
fn criterion_06_corpus_entropies_agree_with_tableaux() {
    let mut fails = Vec::new();
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let mut states_checked = 0;
    for name in names {
        let path = format!("{dir}/{name}");
        let text = std::fs::read_to_string(&path).unwrap();
        let (state, tableau) = if name.ends_with(".manifold") {
            let p = linkstab::parse_manifold(&text).unwrap();
            let s = state_from_presentation(&p, false).unwrap();
            if s.is_zero() {
                continue;
            }
            let tab = tableau_from_presentation(&p, false).unwrap();
            (s, tab)
        } else {
            let net = linkstab::parse_network(&text).unwrap();
            let s = net.contract().unwrap();
            if s.is_zero() || s.site_count() > 3 {
                continue;
            }
            let tab = linkstab::stabilizer::stabilizer_group_search(&s).unwrap();
            (s, tab)
        };
        let n = state.site_count();
        let site_names: Vec<&str> =
            state.sites().iter().map(|site| site.name.as_str()).collect();
        for mask in 1usize..1 << n {
            let positions: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let region: Vec<&str> = positions.iter().map(|&i| site_names[i]).collect();
            let flat = flat_entropy(&state, &region).unwrap();
            let from_tableau = tableau.entropy_dits(&positions).unwrap();
            check!(
                fails,
                flat.exact_dits == Some(from_tableau as i64),
                "{name}: region {region:?} gives {:?} dits from replicas, {from_tableau} from the tableau",
                flat.exact_dits
            );
        }
        states_checked += 1;
    }
    check!(
        fails,
        states_checked >= 6,
        "only {states_checked} corpus states were checked"
    );
    report(6, "replica entropies equal tableau entropies on the corpus", fails);
}

#[test]
fn criterion_07_gauss_sum_closed_form() {
    let mut fails = Vec::new();
    for k in [3u64, 5, 7, 11, 13] {
        let level = lv(k);
        for a in 0..k as i64 {
            for b in 0..k as i64 {
                let closed = CycScalar::quadratic_gauss_sum(level, a, b);
                let mut brute = CycScalar::zero(level);
                for j in 0..k as i64 {
                    brute += &CycScalar::omega_power(level, a * j * j + b * j);
                }
                check!(
                    fails,
                    closed == brute,
                    "k={k}, a={a}, b={b}: closed form {closed:?} != brute force {brute:?}"
                );
            }
        }
        let g = CycScalar::gauss_sum(level);
        let norm = &g * &g.conj();
        check!(fails, norm.is_int(k as i64), "k={k}: G conj(G) != k");
    }
    report(7, "quadratic Gauss sums match brute force and have norm k", fails);
}

fn bell(level: Level, a: &str, b: &str) -> DenseState {
    let k = level.k();
    let sites = vec![Site::ket(a), Site::ket(b)];
    let mut amps = Vec::new();
    for i in 0..k {
        for j in 0..k {
            amps.push(if i == j {
                CycScalar::one(level)
            } else {
                CycScalar::zero(level)
            });
        }
    }
    DenseState::new(level, sites, amps).unwrap()
}

#[test]
fn criterion_08_ghz_count_sanity() {
    let mut fails = Vec::new();
    let level = lv(5);
    let small = lv(3);

    let triangle = bell(small, "a1", "b0")
        .tensor_product(&bell(small, "b1", "c0"))
        .unwrap()
        .tensor_product(&bell(small, "c1", "a0"))
        .unwrap();
    let g = ghz_count(&triangle, &["a0", "a1"], &["b0", "b1"], &["c0", "c1"]).unwrap();
    check!(fails, g == 0, "Bell triangle: g = {g}, want 0");

    let chain = bell(level, "a0", "b0")
        .tensor_product(&bell(level, "b1", "c0"))
        .unwrap()
        .tensor_product(&DenseState::basis(level, &["c1"], &[0]).unwrap())
        .unwrap();
    let g = ghz_count(&chain, &["a0"], &["b0", "b1"], &["c0", "c1"]).unwrap();
    check!(fails, g == 0, "Bell chain: g = {g}, want 0");

    let zeros = DenseState::basis(level, &["q0", "q1", "q2"], &[0, 0, 0]).unwrap();
    let g = ghz_count(&zeros, &["q0"], &["q1"], &["q2"]).unwrap();
    check!(fails, g == 0, "|000>: g = {g}, want 0");

    let f1 = fusion_network_state(small);
    let f2 = {
        let f = fusion_network_state(small);
        let f = f.renamed("q0", "r0").unwrap();
        let f = f.renamed("q1", "r1").unwrap();
        f.renamed("q2", "r2").unwrap()
    };
    let pair = f1.tensor_product(&f2).unwrap();
    let g = ghz_count(&pair, &["q0", "r0"], &["q1", "r1"], &["q2", "r2"]).unwrap();
    check!(fails, g == 2, "two disjoint fusion states: g = {g}, want 2");

    let padded = fusion_network_state(level)
        .tensor_product(&DenseState::basis(level, &["p0"], &[0]).unwrap())
        .unwrap();
    let g = ghz_count(&padded, &["q0", "p0"], &["q1"], &["q2"]).unwrap();
    check!(fails, g == 1, "fusion state with a |0> factor: g = {g}, want 1");

    let fusion = fusion_network_state(small);
    let single = [
        gates::s_gate(small),
        gates::p_gate(small),
        gates::x_gate(small),
        gates::z_gate(small),
    ];
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    for trial in 0..20 {
        let site = ["q0", "q1", "q2"][rng.gen_range(0..3usize)];
        let mut word = GateMatrix::identity(small, 1);
        for _ in 0..10 {
            word = single[rng.gen_range(0..4usize)].compose(&word).unwrap();
        }
        let moved = word.apply(&fusion, &[site]).unwrap();
        let g = ghz_count(&moved, &["q0"], &["q1"], &["q2"]).unwrap();
        check!(
            fails,
            g == 1,
            "trial {trial}: g = {g} after a Clifford word on {site}, want 1"
        );
    }
    report(8, "GHZ count vanishes on Bell arrangements, adds, and is invariant", fails);
}

#[test]
fn criterion_09_so3_genus_two_dimensions() {
    let mut fails = Vec::new();
    for r in [5u64, 7, 11, 13] {
        let table = fusion_rules(r).unwrap();
        let anyons = (r + 1) / 2;
        check!(
            fails,
            table.anyon_count() as u64 == anyons,
            "r={r}: anyon count {} != (r+1)/2",
            table.anyon_count()
        );
        let dim = verlinde_dim(r, 2).unwrap();
        check!(
            fails,
            dim == table.squared_entry_sum(),
            "r={r}: genus-2 dimension {dim} != fusion-table count {}",
            table.squared_entry_sum()
        );
        check!(
            fails,
            anyons * anyons <= dim && dimension_inequality(r).unwrap(),
            "r={r}: anyon-count inequality fails ({anyons}^2 vs {dim})"
        );
        let smat = so3_s_matrix(r).unwrap();
        let float_dim: f64 = (0..smat.len()).map(|i| smat[0][i].powi(-2)).sum();
        let residue = (float_dim - float_dim.round()).abs();
        check!(
            fails,
            residue < 1e-6 && float_dim.round() as u64 == dim,
            "r={r}: S-matrix dimension {float_dim} does not round to {dim}"
        );
        if r == 5 {
            check!(fails, dim == 14, "r=5: genus-2 dimension {dim} != 14");
        }
    }
    report(9, "Verlinde genus-two dimensions match fusion-table counts", fails);
}

#[test]
fn criterion_10_universality_scope_is_documented() {
    let mut fails = Vec::new();
    let readme = include_str!("../../../README.md");
    check!(
        fails,
        readme.contains("not desk-reproducible"),
        "README does not state that the universality conclusion is not desk-reproducible"
    );
    check!(
        fails,
        readme.contains("universality"),
        "README does not mention the universality conclusion"
    );
    report(10, "documentation states the limits of the nonabelian checks", fails);
}

#[test]
fn corpus_directory_only_holds_parseable_documents() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let mut seen = BTreeSet::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        let text = std::fs::read_to_string(format!("{dir}/{name}")).unwrap();
        if name.ends_with(".manifold") {
            linkstab::parse_manifold(&text).unwrap();
        } else if name.ends_with(".network") {
            linkstab::parse_network(&text).unwrap();
        } else {
            panic!("unexpected corpus file {name}");
        }
        seen.insert(name);
    }
    assert!(seen.len() >= 8, "corpus shrank to {} files", seen.len());
}
