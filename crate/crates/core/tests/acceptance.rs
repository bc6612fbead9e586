//! Acceptance suite: one PASS or FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use suspension_adg::extraction::{
    adg_exists_oracle, check_post_contract, comp_dg, extract_report, stats_table, OracleOutcome,
    StatsRow, STATS_COLUMNS,
};
use suspension_adg::fixtures::{
    gen_random, gen_random_automaton, gen_sn, FixtureName, RandomParams,
};
use suspension_adg::game::{compute_invalid, naive_invalid_states};
use suspension_adg::splitting::{
    build_splitting_graph, check_splitting_graph, is_complete, Injectivity, InputChildren,
    LcaChoice, SplitError, SplitPolicy, SplittingGraph,
};
use suspension_adg::testcase::{adg_check, distinguishes, is_test_case_for};
use suspension_adg::{
    check_suspension, pairwise_distinguisher, parse_automaton, CcsTerm, CompatibilityTable,
    SuspensionAutomaton,
};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn load(name: FixtureName) -> Result<SuspensionAutomaton, String> {
    let path = common::fixtures_dir().join(name.file_name());
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let a = parse_automaton(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    check_suspension(a).map_err(|b| format!("{}: blocking states {b:?}", path.display()))
}

fn fixture_files() -> Result<Vec<(FixtureName, SuspensionAutomaton)>, String> {
    FixtureName::ALL
        .into_iter()
        .filter(|&f| f != FixtureName::CcsExample)
        .map(|f| load(f).map(|s| (f, s)))
        .collect()
}

fn pair_names(
    s: &SuspensionAutomaton,
    pairs: &[(suspension_adg::StateId, suspension_adg::StateId)],
) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|&(q, r)| (s.state_name(q).to_string(), s.state_name(r).to_string()))
        .collect()
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure!(took < limit, "{what} took {took:.2?}, limit {limit:?}");
    Ok(())
}

fn running_example() -> Verdict {
    let start = Instant::now();
    let s = load(FixtureName::RunningExample)?;
    let table = CompatibilityTable::new(&s);
    let compat = pair_names(&s, &table.compatible_pairs());
    ensure!(
        compat == [("2".into(), "3".into())],
        "compatible pairs {compat:?}"
    );
    let y = build_splitting_graph(&s, &table, SplitPolicy::default()).map_err(|e| e.to_string())?;
    let mut nodes: Vec<String> = y
        .node_sets()
        .iter()
        .map(|p| p.display(&s).to_string())
        .collect();
    nodes.sort();
    let mut expected = [
        "{1,2,3,4}",
        "{1,2,3}",
        "{1,4}",
        "{1,3}",
        "{2,3}",
        "{1}",
        "{3}",
        "{4}",
    ];
    expected.sort();
    ensure!(nodes == expected, "node set {nodes:?}");
    let r =
        extract_report(&s, &table, &y, LcaChoice::default(), 100_000).map_err(|e| e.to_string())?;
    ensure!(
        r.incompatible_pairs == 5,
        "{} incompatible pairs",
        r.incompatible_pairs
    );
    ensure!(
        r.missed.is_empty(),
        "missed {:?}",
        pair_names(&s, &r.missed)
    );
    within(start, Duration::from_secs(1), "pipeline")?;
    Ok(format!("8 nodes, 5/5 pairs distinguished by {}", r.term))
}

fn exponential_family() -> Verdict {
    let mut counts = Vec::new();
    let mut last = Duration::ZERO;
    for n in 3..=8 {
        let start = Instant::now();
        let s = gen_sn(n).map_err(|e| e.to_string())?;
        let table = CompatibilityTable::new(&s);
        let y =
            build_splitting_graph(&s, &table, SplitPolicy::default()).map_err(|e| e.to_string())?;
        last = start.elapsed();
        ensure!(y.len() == 1 << (n - 1), "S_{n} has {} nodes", y.len());
        counts.push(y.len().to_string());
    }
    ensure!(last < Duration::from_secs(10), "S_8 took {last:.2?}");
    Ok(format!(
        "node counts {} (S_8 in {last:.2?})",
        counts.join(", ")
    ))
}

fn game_oracle() -> Verdict {
    let start = Instant::now();
    let mut instances = 0;
    for states in 1..=8 {
        for inputs in 0..=3 {
            for outputs in 1..=3 {
                for k in 0..6u64 {
                    let p = RandomParams {
                        states,
                        inputs,
                        outputs,
                        density: [0.2, 0.4, 0.6][k as usize % 3],
                        seed: (states * 100 + inputs * 10 + outputs) as u64 * 16 + k,
                    };
                    let a = gen_random_automaton(&p).map_err(|e| e.to_string())?;
                    let fast = compute_invalid(&a).invalid;
                    let naive = naive_invalid_states(&a);
                    ensure!(fast == naive, "discrepancy on {p:?}");
                    instances += 1;
                }
            }
        }
    }
    ensure!(instances >= 500, "only {instances} instances");
    within(start, Duration::from_secs(30), "oracle comparison")?;
    Ok(format!("{instances} automata, 0 discrepancies"))
}

fn compatibility_facts() -> Verdict {
    let start = Instant::now();
    let s = load(FixtureName::CompatFailure)?;
    let table = CompatibilityTable::new(&s);
    let compat = pair_names(&s, &table.compatible_pairs());
    let expected: Vec<(String, String)> = vec![("2".into(), "3".into()), ("6".into(), "7".into())];
    ensure!(
        compat == expected,
        "compat_failure compatible pairs {compat:?}"
    );

    let no_adg = load(FixtureName::NoAdg)?;
    let no_table = CompatibilityTable::new(&no_adg);
    match adg_exists_oracle(&no_adg, &no_table, &no_adg.all_states(), 1024)
        .map_err(|e| e.to_string())?
    {
        OracleOutcome::NoneExists => {}
        OracleOutcome::Found(t) => return Err(format!("oracle found {t} on no_adg")),
        OracleOutcome::Inconclusive => return Err("oracle inconclusive on no_adg".into()),
    }

    let text = "x.a.b.(z.0 + t.0) + y.a.b.(z.0 + t.0) + z.0 + t.0";
    let t = CcsTerm::parse(s.alphabet().clone(), text).map_err(|e| e.to_string())?;
    let check =
        adg_check(&t.arena, t.root, &s, &s.all_states(), &table).map_err(|e| e.to_string())?;
    ensure!(
        check.is_adg(),
        "hand-written term misses {:?}",
        pair_names(&s, &check.missed)
    );
    within(start, Duration::from_secs(5), "compatibility facts")?;
    Ok(format!(
        "compatible {{(2,3),(6,7)}}, no_adg has none, hand-written term separates {} pairs",
        check.distinguished.len()
    ))
}

fn post_contract() -> Verdict {
    let corpus = common::small_corpus(300);
    for (i, s) in corpus.iter().enumerate() {
        let table = CompatibilityTable::new(s);
        let y =
            build_splitting_graph(s, &table, SplitPolicy::default()).map_err(|e| e.to_string())?;
        let ex = comp_dg(s, &table, &y, LcaChoice::default()).map_err(|e| e.to_string())?;
        if let Err(trace) = check_post_contract(s, &table, &ex.term) {
            return Err(format!(
                "automaton {i}: trace {} ends incompatible",
                s.alphabet().display_word(&trace)
            ));
        }
    }
    Ok(format!("{} automata, 0 violations", corpus.len()))
}

fn injective_completeness() -> Verdict {
    let strict = SplitPolicy {
        injectivity: Injectivity::Require,
        ..SplitPolicy::default()
    };
    let mut corpus = Vec::new();
    for i in 0..3000 {
        let s = gen_random(&common::small_params(i)).map_err(|e| e.to_string())?;
        corpus.push((format!("random {i}"), s));
    }
    for n in 3..=6 {
        corpus.push((format!("S_{n}"), gen_sn(n).map_err(|e| e.to_string())?));
    }
    let mut instances = 0;
    for (name, s) in &corpus {
        let table = CompatibilityTable::new(s);
        if !table.compatible_pairs().is_empty() {
            continue;
        }
        let y = match build_splitting_graph(s, &table, strict) {
            Ok(y) => y,
            Err(SplitError::NoInjectiveSplit { .. }) if !name.starts_with('S') => continue,
            Err(e) => return Err(format!("{name}: {e}")),
        };
        instances += 1;
        let ex = comp_dg(s, &table, &y, LcaChoice::default()).map_err(|e| e.to_string())?;
        let all = s.all_states();
        is_test_case_for(&ex.term.arena, ex.term.root, s, &all)
            .map_err(|e| format!("{name}: {e}"))?;
        let check =
            adg_check(&ex.term.arena, ex.term.root, s, &all, &table).map_err(|e| e.to_string())?;
        ensure!(
            check.is_adg(),
            "{name}: missed {:?}",
            pair_names(s, &check.missed)
        );
    }
    ensure!(instances > 4, "only {instances} instances");
    Ok(format!(
        "{instances} strict instances (including S_3..S_6), 0 missed"
    ))
}

fn validate_graph(
    name: &str,
    s: &SuspensionAutomaton,
    table: &CompatibilityTable,
    policy: SplitPolicy,
) -> Result<SplittingGraph, String> {
    let y = build_splitting_graph(s, table, policy).map_err(|e| format!("{name}: {e}"))?;
    let report = check_splitting_graph(s, &y);
    ensure!(report.is_valid(), "{name}: {:?}", report.violations);
    ensure!(is_complete(&y, table), "{name}: graph incomplete");
    Ok(y)
}

fn structural_validators() -> Verdict {
    let policies = [
        SplitPolicy::default(),
        SplitPolicy {
            injectivity: Injectivity::Prefer,
            ..SplitPolicy::default()
        },
    ];
    let mut corpus: Vec<(String, SuspensionAutomaton)> = fixture_files()?
        .into_iter()
        .map(|(f, s)| (f.to_string(), s))
        .collect();
    for n in 3..=8 {
        corpus.push((format!("S_{n}"), gen_sn(n).map_err(|e| e.to_string())?));
    }
    for (i, s) in common::small_corpus(300).into_iter().enumerate() {
        corpus.push((format!("random {i}"), s));
    }
    for seed in 0..20 {
        corpus.push((
            format!("large {seed}"),
            gen_random(&common::large_params(seed)).map_err(|e| e.to_string())?,
        ));
    }
    let mut graphs = 0;
    for (name, s) in &corpus {
        let table = CompatibilityTable::new(s);
        for policy in policies {
            validate_graph(name, s, &table, policy)?;
            graphs += 1;
        }
    }

    let trap = load(FixtureName::InducedSplitTrap)?;
    let table = CompatibilityTable::new(&trap);
    let broken = SplitPolicy {
        input_children: InputChildren::InducedOnly,
        ..SplitPolicy::default()
    };
    match build_splitting_graph(&trap, &table, broken) {
        Err(e @ (SplitError::EmptyChildren { .. } | SplitError::UnionViolation { .. })) => Ok(
            format!("{graphs} graphs valid; induced-only input split rejected: {e}"),
        ),
        Err(e) => Err(format!("induced-only variant failed differently: {e}")),
        Ok(_) => Err("induced-only variant built a graph on the trap".into()),
    }
}

fn statistics() -> Verdict {
    let mut rows = Vec::new();
    for (f, s) in fixture_files()? {
        let table = CompatibilityTable::new(&s);
        let y =
            build_splitting_graph(&s, &table, SplitPolicy::default()).map_err(|e| e.to_string())?;
        let r = extract_report(&s, &table, &y, LcaChoice::default(), 100_000)
            .map_err(|e| e.to_string())?;
        rows.push(StatsRow::new(f.file_name(), &r));
    }
    let table = stats_table(&rows);
    let header = table.lines().next().unwrap_or_default();
    ensure!(header == STATS_COLUMNS.join("\t"), "header {header:?}");
    for line in table.lines().skip(1) {
        ensure!(
            line.split('\t').count() == STATS_COLUMNS.len(),
            "row {line:?}"
        );
    }
    for row in &rows {
        let keys: Vec<String> = row
            .to_json()
            .as_object()
            .map(|o| o.keys().cloned().collect())
            .unwrap_or_default();
        let mut columns: Vec<String> = STATS_COLUMNS.iter().map(|c| c.to_string()).collect();
        columns.sort();
        ensure!(keys == columns, "json keys {keys:?}");
    }

    let prefer = SplitPolicy {
        injectivity: Injectivity::Prefer,
        ..SplitPolicy::default()
    };
    let (mut pairs, mut ignore, mut preferred) = (0usize, (0usize, 0usize), (0usize, 0usize));
    for seed in 0..20 {
        let s = gen_random(&common::large_params(seed)).map_err(|e| e.to_string())?;
        let table = CompatibilityTable::new(&s);
        let run = |policy: SplitPolicy| -> Result<(usize, usize), String> {
            let y = build_splitting_graph(&s, &table, policy)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            let r = extract_report(&s, &table, &y, LcaChoice::default(), 0)
                .map_err(|e| e.to_string())?;
            Ok((r.distinguished, r.missed.len()))
        };
        let (a, b) = (run(SplitPolicy::default())?, run(prefer)?);
        pairs += s.num_states() * (s.num_states() - 1) / 2;
        ignore = (ignore.0 + a.0, ignore.1 + a.1);
        preferred = (preferred.0 + b.0, preferred.1 + b.1);
    }
    let pct = |missed: usize| 100.0 * missed as f64 / pairs as f64;
    ensure!(
        pct(ignore.1) < 100.0 && pct(preferred.1) < 100.0,
        "every pair undistinguished"
    );
    ensure!(
        preferred.0 >= ignore.0,
        "preferring injective splits lost pairs: {} < {}",
        preferred.0,
        ignore.0
    );
    Ok(format!(
        "schema of {} columns; 200-state corpus, seeds 0..20: undistinguished {:.3}% (any split) vs {:.3}% (injective preferred), distinguished {} -> {}",
        STATS_COLUMNS.len(),
        pct(ignore.1),
        pct(preferred.1),
        ignore.0,
        preferred.0
    ))
}

fn pairwise() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    for (f, s) in fixture_files()? {
        let table = CompatibilityTable::new(&s);
        for q in s.states() {
            for r in s.states().filter(|&r| r > q) {
                if table.compatible(q, r) {
                    continue;
                }
                let t =
                    pairwise_distinguisher(&s, &table, q, r).map_err(|e| format!("{f}: {e:?}"))?;
                let both = [q, r].into_iter().collect();
                is_test_case_for(&t.arena, t.root, &s, &both).map_err(|e| format!("{f}: {e}"))?;
                let d =
                    distinguishes(&t.arena, t.root, &s, q, r).map_err(|e| format!("{f}: {e}"))?;
                ensure!(
                    d,
                    "{f}: {t} does not separate {} and {}",
                    s.state_name(q),
                    s.state_name(r)
                );
                checked += 1;
            }
        }
    }
    within(start, Duration::from_secs(10), "pairwise distinguishers")?;
    Ok(format!("{checked} incompatible pairs across all fixtures"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1 running-example pipeline", running_example),
        ("AC2 exponential family", exponential_family),
        ("AC3 game oracle equivalence", game_oracle),
        ("AC4 compatibility facts", compatibility_facts),
        ("AC5 extraction post-contract", post_contract),
        ("AC6 injective construction completeness", injective_completeness),
        ("AC7 structural validators", structural_validators),
        ("AC8 statistics schema and injective A/B", statistics),
        ("AC9 pairwise distinguisher", pairwise),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let verdict = check();
        let took = start.elapsed();
        match verdict {
            Ok(detail) => println!("PASS {name} ({took:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({took:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
