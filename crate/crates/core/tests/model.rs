mod common;

use common::*;
use guesslab::model::{load_source, PairSource};
use guesslab::Error;
use proptest::prelude::*;
use serde_json::json;

fn config(s: &PairSource<f64>) -> String {
    json!({
        "x_symbols": s.x_alphabet().symbols(),
        "y_symbols": s.y_alphabet().symbols(),
        "joint": s.joint_matrix(),
    })
    .to_string()
}

proptest! {
    #[test]
    fn mass_and_reconstruction(seed in 0u64..500) {
        let s = random_source(seed);
        let total: f64 = s.joint_matrix().iter().flatten().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        for (yi, y) in s.y_alphabet().symbols().iter().enumerate() {
            let cond = s.conditional_x_given_y(y).unwrap();
            for x in 0..s.x_size() {
                let rebuilt = cond.pmf()[x] * s.marginal_y_pmf()[yi];
                prop_assert!((rebuilt - s.joint(x, yi)).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn loading_is_deterministic(seed in 0u64..500) {
        let text = config(&random_source(seed));
        let a: PairSource<f64> = load_source(&text).unwrap();
        let b: PairSource<f64> = load_source(&text).unwrap();
        prop_assert_eq!(a.joint_matrix(), b.joint_matrix());
        prop_assert_eq!(a.x_alphabet().symbols(), b.x_alphabet().symbols());
        let again = random_source(seed);
        prop_assert_eq!(a.joint_matrix(), again.joint_matrix());
    }
}

#[test]
fn rejects_bad_configs() {
    let cases = [
        (r#"{"x_symbols":["a","b"],"y_symbols":["u"],"joint":[[0.5],[0.6]]}"#, "invalid_source"),
        (r#"{"x_symbols":["a","b"],"y_symbols":["u","v"],"joint":[[0.5,0.0],[0.5,0.0]]}"#, "invalid_source"),
        (r#"{"x_symbols":["a","a"],"y_symbols":["u"],"joint":[[0.5],[0.5]]}"#, "invalid_source"),
        (r#"{"x_symbols":["a","b"],"y_symbols":["u"],"joint":[[0.5],[-0.5]]}"#, "invalid_source"),
        (r#"{"x_symbols":["a","b"],"y_symbols":["u"],"joint":[[0.5,0.5]]}"#, "invalid_source"),
        (r#"{"x_symbols":[],"y_symbols":["u"],"joint":[]}"#, "invalid_source"),
        (r#"{"x_symbols":["a"],"y_symbols":["u"],"joint":[[1.0]],"extra":1}"#, "malformed_json"),
        ("{", "malformed_json"),
    ];
    for (text, code) in cases {
        let err: Error = load_source::<f64>(text).unwrap_err();
        assert_eq!(err.code(), code, "{text}");
    }
}

#[test]
fn f32_sources_load() {
    let s: PairSource<f32> = load_source(&config(&bsc())).unwrap();
    assert_eq!(s.joint(0, 0), 0.45f32);
}
