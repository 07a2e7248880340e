use fogsec::costmodel::{compare, params, Measurement, Params, RowStatus, Table};
use fogsec::fogsim::{run_builtin, EntryKind, Scenario, SimReport, Simulation, BUILTIN_SCENARIOS};
use fogsec::pairing::{Backend, OpCounter};

#[test]
fn bundled_scenarios_pass_on_curve() {
    for (name, _) in BUILTIN_SCENARIOS {
        let sc = Scenario::builtin(name).unwrap();
        assert_eq!(sc.backend, Backend::Curve);
        let report = Simulation::build(sc).unwrap().run();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn curve_reruns_are_byte_identical() {
    for (name, _) in BUILTIN_SCENARIOS {
        let a = run_builtin(name, Some(99)).unwrap();
        let b = run_builtin(name, Some(99)).unwrap();
        assert_eq!(a.transcript_jsonl(), b.transcript_jsonl(), "{name}");
        assert_eq!(a.ledger.to_csv(), b.ledger.to_csv(), "{name}");
        assert_eq!(a.counters_json(), b.counters_json(), "{name}");
    }
}

#[test]
fn aggregation_ledger_reproduces_frame_sizes() {
    let report = run_builtin("secure-data-aggregation", None).unwrap();
    for (device, bytes) in [("press-1", 796), ("press-2", 1372)] {
        let frames: Vec<_> = report
            .ledger
            .link(device, "fog-1")
            .filter(|e| e.payload == "signed-frame")
            .collect();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].bytes, bytes);
        assert_eq!(frames[0].framing, 4 + 4 * 7);
    }
}

fn measurement(table: Table, task: &str, params: Params, counts: OpCounter, bytes: Option<usize>) -> Measurement {
    Measurement { table, task: task.into(), params, counts, bytes: bytes.map(|b| b as u64) }
}

fn only(ops: Vec<OpCounter>) -> OpCounter {
    assert_eq!(ops.len(), 1, "{ops:?}");
    ops[0]
}

fn setup_ops(report: &SimReport, entity: &str, id: &str) -> OpCounter {
    let ops: Vec<OpCounter> = report
        .transcript
        .iter()
        .filter(|e| e.kind == EntryKind::Setup && e.entity == entity && e.step == id)
        .filter_map(|e| e.ops.as_deref()?.parse().ok())
        .collect();
    only(ops)
}

#[test]
fn scenario_transcripts_agree_with_the_cost_tables() {
    let n7 = params(&[("n", 7), ("m", 100)]);
    let agg = run_builtin("secure-data-aggregation", None).unwrap();
    let verifies = agg.step_ops("fog-1", "verify");
    let share = run_builtin("secure-data-sharing", None).unwrap();
    let comp = run_builtin("secure-computation", None).unwrap();
    let none = Params::new();

    let rows = vec![
        measurement(Table::II, "agg-sign", n7.clone(), only(agg.step_ops("press-1", "sign")), None),
        measurement(Table::II, "aggregate", n7.clone(), only(agg.step_ops("press-1", "aggregate")), None),
        measurement(Table::II, "verify-aggregate", n7.clone(), verifies[0], None),
        measurement(Table::II, "bls-sign", n7.clone(), only(agg.step_ops("press-2", "sign")), None),
        measurement(Table::II, "bls-verify", n7.clone(), verifies[1], None),
        measurement(Table::II, "agg-device-bytes", n7.clone(), OpCounter::default(), Some(agg.ledger.sent_by("press-1"))),
        measurement(Table::II, "bls-device-bytes", n7, OpCounter::default(), Some(agg.ledger.sent_by("press-2"))),
        measurement(Table::III, "sender-encrypt", none.clone(), only(share.step_ops("line-sensor", "encrypt")), None),
        measurement(Table::III, "fog-reencrypt", none.clone(), share.step_ops("fog-proxy", "reencrypt")[0], None),
        measurement(Table::V, "pf1-keygen", none.clone(), setup_ops(&comp, "pf1", "keygen"), None),
        measurement(Table::V, "pf2-keygen", none.clone(), setup_ops(&comp, "pf2", "keygen"), None),
        measurement(Table::V, "pf1-encrypt", none.clone(), only(comp.step_ops("pf1", "upload")), None),
        measurement(Table::V, "pf1-eval", none.clone(), only(comp.step_ops("pf1", "eval")), None),
        measurement(Table::V, "pf1-bytes", none, OpCounter::default(), Some(comp.ledger.sent_by("pf1"))),
    ];
    let report = compare(&rows).unwrap();
    for row in &report.rows {
        assert_eq!(row.status, RowStatus::Exact, "{}/{}: {:?}", row.table, row.task, row.delta);
    }
}
