use proptest::prelude::*;
use xorlab_cli::manifest::RunManifest;
use xorlab_cli::plot::render;
use xorlab_cli::records::{
    parse_table, read_records, to_csv_bytes, SweepRecord, TrialRow, TrialTable,
};

const SEEDS: &[&[u8]] = &[
    include_bytes!("../../../fuzz/corpus/parse_table/s_sweep.csv"),
    include_bytes!("../../../fuzz/corpus/parse_table/l_landscape.csv"),
    include_bytes!("../../../fuzz/corpus/parse_table/t_trial.csv"),
    include_bytes!("../../../fuzz/corpus/parse_table/x_bench.csv"),
    include_bytes!("../../../fuzz/corpus/parse_table/b_boundary_prelu.csv"),
];

fn exercise(bytes: &[u8]) {
    if let Ok(t) = parse_table(bytes) {
        let _ = render(&t, None);
    }
    let _ = TrialTable::read(bytes);
    let _ = RunManifest::from_json(bytes);
}

proptest! {
    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        exercise(&bytes);
    }

    #[test]
    fn mutated_seeds_never_panic(
        seed in 0..SEEDS.len(),
        edits in proptest::collection::vec((any::<usize>(), any::<u8>()), 1..8),
        cut in any::<usize>(),
    ) {
        let mut bytes = SEEDS[seed].to_vec();
        for (pos, b) in edits {
            let i = pos % bytes.len();
            bytes[i] = b;
        }
        bytes.truncate(cut % (bytes.len() + 1));
        exercise(&bytes);
    }

    #[test]
    fn sweep_records_round_trip(rows in proptest::collection::vec(
        ("[a-z@0-9-]{1,12}", any::<f64>(), 0usize..1000, 0usize..1000, any::<f64>()), 0..20)) {
        let rows: Vec<SweepRecord> = rows
            .into_iter()
            .map(|(model, lr, trials, successes, success_rate)| SweepRecord { model, lr, trials, successes, success_rate })
            .collect();
        let bytes = to_csv_bytes(&rows).unwrap();
        let back: Vec<SweepRecord> = read_records(&bytes[..]).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            prop_assert_eq!(&a.model, &b.model);
            prop_assert_eq!(a.lr.to_bits(), b.lr.to_bits());
            prop_assert_eq!(a.success_rate.to_bits(), b.success_rate.to_bits());
        }
    }

    #[test]
    fn trial_tables_round_trip(params in proptest::collection::vec(proptest::num::f64::NORMAL, 1..9), mse in 0.0..10.0f64) {
        let t = TrialTable {
            param_names: (0..params.len()).map(|i| format!("p{i}")).collect(),
            rows: vec![TrialRow { epoch: 3, mse, correct_count: 2, params: params.clone() }],
        };
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        prop_assert_eq!(TrialTable::read(&buf[..]).unwrap(), t);
    }
}

#[test]
fn corpus_seeds_parse() {
    for s in SEEDS {
        let t = parse_table(s).unwrap();
        render(&t, None).unwrap();
    }
    let m = include_bytes!("../../../fuzz/corpus/manifest/sweep.json");
    RunManifest::from_json(m).unwrap();
}
