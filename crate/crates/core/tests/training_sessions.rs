use proptest::prelude::*;

use sonowork_core::synth::SonifyConfig;
use sonowork_core::training::{
    expected_key, generate_block, score_session, Key, Phase, SessionEvent, SessionOptions, SessionState, StimulusClass,
    TrainingError,
};

fn quick_config() -> SonifyConfig {
    SonifyConfig {
        sample_rate: 8000,
        note_duration: 0.02,
        ..SonifyConfig::default()
    }
}

fn new_session(per_class: usize, seed: u64, options: SessionOptions) -> SessionState {
    SessionState::new(generate_block(1, per_class, seed, &quick_config()).unwrap(), options).unwrap()
}

fn event_strategy() -> impl Strategy<Value = SessionEvent> {
    let key = prop::sample::select(Key::ALL.to_vec());
    prop_oneof![
        Just(SessionEvent::Begin),
        Just(SessionEvent::SkipIntro),
        Just(SessionEvent::PresentationDone),
        (key, 0u64..5000).prop_map(|(key, latency)| SessionEvent::KeyPress { key, latency }),
        Just(SessionEvent::Replay),
        Just(SessionEvent::FeedbackDone),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Random event streams: rejected events leave the state untouched, and the
    /// machine never records an answer for a stimulus that was not presented.
    #[test]
    fn machine_safety(events in prop::collection::vec(event_strategy(), 0..200),
                      skip in any::<bool>(), replay in any::<bool>()) {
        let options = SessionOptions { allow_skip_intro: skip, allow_replay: replay };
        let mut state = new_session(1, 3, options);
        let mut presented: Vec<u32> = Vec::new();
        for event in events {
            match state.advance(event) {
                Ok(next) => {
                    if next.phase == Phase::Presenting {
                        presented.push(next.current().unwrap().id());
                    }
                    if matches!(event, SessionEvent::Replay) {
                        prop_assert_eq!(next.cursor, state.cursor);
                        prop_assert_eq!(&next.responses, &state.responses);
                    }
                    state = next;
                }
                Err(e) => {
                    let expected = matches!(
                        e,
                        TrainingError::IllegalEvent { .. } | TrainingError::SkipDisabled | TrainingError::ReplayDisabled
                    );
                    prop_assert!(expected, "unexpected error {:?}", e);
                }
            }
            prop_assert!(state.responses.len() <= state.cursor + 1);
            for r in &state.responses {
                prop_assert!(presented.contains(&r.stimulus_id));
            }
            // every stimulus answered exactly when completed, or showing the last feedback
            let all_answered = state.responses.len() == state.stimuli.len();
            prop_assert_eq!(
                all_answered,
                state.phase == Phase::Completed
                    || (state.phase == Phase::Feedback && state.cursor + 1 == state.stimuli.len())
            );
        }
    }

    #[test]
    fn records_match_expected_key(answers in prop::collection::vec(prop::sample::select(Key::ALL.to_vec()), 8)) {
        let mut state = new_session(2, 17, SessionOptions::default()).advance(SessionEvent::Begin).unwrap();
        for key in answers {
            state = state.advance(SessionEvent::PresentationDone).unwrap();
            let class = state.current().unwrap().class();
            state = state.advance(SessionEvent::KeyPress { key, latency: 10 }).unwrap();
            prop_assert_eq!(state.last_response().unwrap().correct, key == expected_key(class));
            state = state.advance(SessionEvent::FeedbackDone).unwrap();
        }
        prop_assert_eq!(state.phase, Phase::Completed);

        let report = score_session(&state).unwrap();
        // recount from the raw responses
        let mut n = [0usize; 4];
        let mut ok = [0usize; 4];
        for r in &state.responses {
            let class = state.stimuli.iter().find(|s| s.id() == r.stimulus_id).unwrap().class();
            let idx = StimulusClass::ALL.iter().position(|&c| c == class).unwrap();
            n[idx] += 1;
            ok[idx] += usize::from(r.correct);
        }
        for (idx, class) in StimulusClass::ALL.iter().enumerate() {
            let score = report.per_class[class];
            prop_assert_eq!((score.n, score.correct), (n[idx], ok[idx]));
        }
        // overall accuracy is the n-weighted mean of class accuracies, checked as
        // exact fractions: correct / total == Σ correct_c / Σ n_c
        let num: usize = report.per_class.values().map(|c| c.correct).sum();
        let den: usize = report.per_class.values().map(|c| c.n).sum();
        prop_assert_eq!(num * report.total, report.correct * den);
        prop_assert_eq!(report.overall_pct, 100.0 * report.correct as f64 / report.total as f64);
    }
}

#[test]
fn equal_arguments_give_identical_audio() {
    let a = generate_block(3, 2, 99, &quick_config()).unwrap();
    let b = generate_block(3, 2, 99, &quick_config()).unwrap();
    for (x, y) in a.iter().zip(&b) {
        let bits = |s: &[f64]| s.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&x.audio().samples), bits(&y.audio().samples));
    }
}
