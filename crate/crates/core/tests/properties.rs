use proptest::prelude::*;

use sonowork_core::ingest::{parse_events, parse_table, Column, ParseOptions, Series, Table};
use sonowork_core::synth::{
    map_value_to_freq, render_note, sample_count, sonify_events, sonify_series, write_wav, Event, EventList, Mapping,
    SonifyConfig,
};
use sonowork_core::transform::{
    apply_pipeline, invert, log_scale, normalize, smooth, square, square_root, TransformSpec, TransformStep,
};

fn cell() -> impl Strategy<Value = f64> {
    prop_oneof![
        9 => -1e6..1e6f64,
        1 => Just(f64::NAN),
    ]
}

fn table_strategy() -> impl Strategy<Value = Table> {
    (2usize..6, 1usize..20).prop_flat_map(|(cols, rows)| {
        prop::collection::vec(prop::collection::vec(cell(), rows), cols).prop_map(|columns| {
            Table::new(
                columns
                    .into_iter()
                    .enumerate()
                    .map(|(i, values)| Column {
                        name: format!("c{i}"),
                        values,
                    })
                    .collect(),
            )
            .unwrap()
        })
    })
}

fn series_strategy(max_len: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(cell(), 1..=max_len)
        .prop_filter("needs a finite value", |y| y.iter().any(|v| v.is_finite()))
        .prop_map(|y| Series::from_values(y, "y").unwrap())
}

fn unit_series(max_len: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(prop_oneof![9 => 0.0..=1.0f64, 1 => Just(f64::NAN)], 1..=max_len)
        .prop_map(|y| Series::from_values(y, "y").unwrap())
}

fn step_strategy() -> impl Strategy<Value = TransformStep> {
    prop_oneof![
        Just(TransformStep::Normalize),
        Just(TransformStep::Invert),
        Just(TransformStep::Log),
        Just(TransformStep::Square),
        Just(TransformStep::SquareRoot),
        (0usize..4).prop_map(|k| TransformStep::Smooth { window: 2 * k + 1 }),
        (0usize..8, 0usize..8).prop_map(|(lo, extra)| TransformStep::Cut { lo, hi: lo + extra }),
    ]
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(u, v)| u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan()))
}

proptest! {
    #[test]
    fn csv_round_trip(table in table_strategy()) {
        let opts = ParseOptions { has_header: Some(true), ..Default::default() };
        let back = parse_table(table.to_csv().as_bytes(), &opts).unwrap();
        prop_assert_eq!(back, table);
    }

    #[test]
    fn parsed_columns_have_row_count(rows in prop::collection::vec(prop::collection::vec(-1e3..1e3f64, 3), 1..30),
                                     sep in prop::sample::select(vec![",", "\t", ";", " "])) {
        let text: String = rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(sep) + "\n")
            .collect();
        let table = parse_table(text.as_bytes(), &ParseOptions::default()).unwrap();
        prop_assert_eq!(table.row_count(), rows.len());
        prop_assert_eq!(table.columns().len(), 3);
        for c in table.columns() {
            prop_assert_eq!(c.values.len(), table.row_count());
        }
    }

    #[test]
    fn implicit_x_strictly_increases(s in series_strategy(50)) {
        prop_assert!(s.x().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn parsed_event_times_are_sorted(events in prop::collection::vec((-100.0..100.0f64, 0.0..10.0f64), 1..40)) {
        let text: String = events.iter().map(|(t, w)| format!("{t},{w}\n")).collect();
        let list = parse_events(text.as_bytes()).unwrap();
        prop_assert_eq!(list.len(), events.len());
        prop_assert!(list.times().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn transforms_keep_length_and_x(s in series_strategy(64)) {
        let n = normalize(&s).unwrap();
        let i = invert(&s).unwrap();
        for out in [&n, &i] {
            prop_assert_eq!(out.len(), s.len());
            prop_assert!(same(out.x(), s.x()));
        }
        prop_assert!(n.y().iter().filter(|v| !v.is_nan()).all(|v| (0.0..=1.0).contains(v)));
        for (a, b) in n.y().iter().zip(s.y()) {
            prop_assert_eq!(a.is_nan(), b.is_nan());
        }
    }

    #[test]
    fn normalize_hits_both_ends(s in series_strategy(64)) {
        let finite: Vec<f64> = s.y().iter().copied().filter(|v| v.is_finite()).collect();
        let (lo, hi) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        prop_assume!(lo != hi);
        let n = normalize(&s).unwrap();
        for (out, orig) in n.y().iter().zip(s.y()) {
            if *orig == lo { prop_assert_eq!(*out, 0.0); }
            if *orig == hi { prop_assert_eq!(*out, 1.0); }
        }
    }

    /// Values on a dyadic grid make every sum exact, so the involution is bit-exact.
    #[test]
    fn invert_is_an_involution_on_grid(y in prop::collection::vec(-4096i32..4096, 1..64)) {
        let s = Series::from_values(y.iter().map(|&k| f64::from(k) / 64.0).collect(), "y").unwrap();
        prop_assert_eq!(invert(&invert(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn invert_twice_is_within_rounding(s in series_strategy(64)) {
        let back = invert(&invert(&s).unwrap()).unwrap();
        let scale = s.y().iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in back.y().iter().zip(s.y()) {
            if b.is_nan() {
                prop_assert!(a.is_nan());
            } else {
                prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * scale, "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn nonlinear_ops_strictly_monotonic(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        prop_assume!(a < b);
        let s = Series::from_values(vec![a, b], "y").unwrap();
        for op in [log_scale, square, square_root] {
            let out = op(&s).unwrap();
            prop_assert!(out.y()[0] <= out.y()[1]);
            if b - a > 1e-9 {
                prop_assert!(out.y()[0] < out.y()[1]);
            }
        }
    }

    #[test]
    fn smooth_window_one_is_identity(s in series_strategy(64)) {
        prop_assert_eq!(smooth(&s, 1).unwrap(), s);
    }

    #[test]
    fn smooth_keeps_constants(c in -1e3..1e3f64, len in 1usize..64, k in 0usize..32) {
        let window = (2 * k + 1).min(if len % 2 == 0 { len - 1 } else { len });
        let s = Series::from_values(vec![c; len], "y").unwrap();
        let out = smooth(&s, window).unwrap();
        prop_assert!(out.y().iter().all(|&v| v == c));
    }

    #[test]
    fn pipeline_equals_sequential_application(s in unit_series(64), steps in prop::collection::vec(step_strategy(), 0..6)) {
        let spec = TransformSpec::new(steps.clone());
        let mut manual = Ok(s.clone());
        for (i, step) in steps.iter().enumerate() {
            manual = match manual {
                Ok(cur) => step.apply(&cur).map_err(|e| (i, e)),
                err => err,
            };
        }
        match (apply_pipeline(&s, &spec), manual) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(e), Err((i, source))) => {
                prop_assert_eq!(e.step, i);
                prop_assert_eq!(e.source, source);
            }
            (a, b) => prop_assert!(false, "pipeline {:?} vs manual {:?}", a, b),
        }
    }

    #[test]
    fn pitch_mapping_strictly_increasing(a in 0.0..=1.0f64, b in 0.0..=1.0f64, log in any::<bool>()) {
        prop_assume!(b - a > 1e-12);
        let config = SonifyConfig {
            mapping: if log { Mapping::Logarithmic } else { Mapping::Linear },
            ..SonifyConfig::default()
        };
        prop_assert!(map_value_to_freq(a, &config).unwrap() < map_value_to_freq(b, &config).unwrap());
    }

    #[test]
    fn note_length_formula(duration in 0.0..0.5f64, freq in 20.0..2000.0f64) {
        let note = render_note(freq, &SonifyConfig::default(), duration).unwrap();
        prop_assert_eq!(note.len(), (duration * 44_100.0).round() as usize);
        prop_assert!(note.samples.iter().all(|s| (-1.0..=1.0).contains(s)));
    }

    #[test]
    fn series_audio_length_and_range(s in unit_series(20), note in 0.01..0.05f64) {
        let config = SonifyConfig { note_duration: note, sample_rate: 8000, f_max: 3000.0, ..SonifyConfig::default() };
        let buf = sonify_series(&s, &config).unwrap();
        prop_assert_eq!(buf.len(), s.len() * sample_count(note, 8000));
        prop_assert!(buf.samples.iter().all(|v| (-1.0..=1.0).contains(v)));
        prop_assert_eq!(write_wav(&buf), write_wav(&sonify_series(&s, &config).unwrap()));
    }

    #[test]
    fn event_audio_is_clipped(events in prop::collection::vec((0.0..1.0f64, 0.0..5.0f64), 0..30), amp in 0.1..=1.0f64) {
        let list = EventList::from_events(events.into_iter().map(|(time, weight)| Event { time, weight }).collect()).unwrap();
        let config = SonifyConfig { amplitude: amp, sample_rate: 8000, f_max: 3000.0, ..SonifyConfig::default() };
        let buf = sonify_events(&list, 0.5, &config).unwrap();
        prop_assert_eq!(buf.len(), 4000);
        prop_assert!(buf.samples.iter().all(|v| (-1.0..=1.0).contains(v)));
    }
}
