//! Scores frozen from `oracles/codebleu_oracle.py`, an independent
//! implementation built on Python's own parser.

use sartco_core::metrics::{codebleu, CodeBleuWeights};

const WN: &str = "def wn(board, colors, x, y):
    shapes = ['washer', 'nut']
    for shape, color in zip(shapes, colors):
        put(board, shape, color, x, y)

wn(board, colors=['red', 'green'], x=X, y=Y)";

const FIRST: &str = "put(board, 'washer', 'red', X, Y)\nput(board, 'nut', 'green', X, Y)";

const WWBH: &str = "def wwbh(board, colors, x, y):
    shapes = ['washer', 'washer', 'bridge-h']
    for shape, color, dx, dy in zip(shapes, colors, [0, 0, 0], [0, 1, 0]):
        put(board, shape, color, x + dx, y + dy)

for row, col in zip(range(0, 4, 1), range(0, 3, 2)):
    wwbh(board, colors=['red', 'red', 'green'], x=row + 4, y=col + 4)";

const WWBH_NO_DEF: &str = "for row, col in zip(range(0, 4, 1), range(0, 3, 2)):
    wwbh(board, colors=['red', 'red', 'green'], x=row + 4, y=col + 4)";

fn at(template: &str, x: u8, y: u8) -> String {
    template.replace('X', &x.to_string()).replace('Y', &y.to_string())
}

fn check(hyp: &str, gold: &str, expected: [f64; 4], dataflow: Option<f64>) {
    let s = codebleu(hyp, gold, CodeBleuWeights::default());
    let got = [s.score, s.ngram, s.weighted_ngram, s.ast];
    for (g, e) in got.iter().zip(expected) {
        assert!((g - e).abs() < 1e-9, "got {got:?}, expected {expected:?}");
    }
    match (s.dataflow, dataflow) {
        (Some(g), Some(e)) => assert!((g - e).abs() < 1e-9, "dataflow {g} vs {e}"),
        (g, e) => assert_eq!(g, e),
    }
}

#[test]
fn optimal_code_with_other_coordinates() {
    check(&at(WN, 5, 6), &at(WN, 1, 2), [0.965509975864, 0.930104129914, 0.931935773542, 1.0], Some(1.0));
}

#[test]
fn first_order_code_with_other_coordinates() {
    check(&at(FIRST, 5, 6), &at(FIRST, 1, 2), [0.762903922840, 0.640426154309, 0.648285614209, 1.0], None);
}

#[test]
fn loop_without_function_definition() {
    check(WWBH_NO_DEF, WWBH, [0.269009781732, 0.265292290737, 0.265292290737, 0.545454545455], Some(0.0));
}
