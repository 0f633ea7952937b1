use std::collections::HashMap;

use proptest::prelude::*;
use sartco_core::grid::{COLS, ROWS};
use sartco_core::{boards_equal, Board, Color, Shape};

#[derive(Debug, Clone)]
struct Put {
    shape: Shape,
    color: Color,
    row: i64,
    col: i64,
}

fn put_strategy() -> impl Strategy<Value = Put> {
    (0..Shape::ALL.len(), 0..Color::ALL.len(), -1i64..=8, -1i64..=8).prop_map(|(s, c, row, col)| Put {
        shape: Shape::ALL[s],
        color: Color::ALL[c],
        row,
        col,
    })
}

/// Puts confined to a 3x3 corner so that stacks actually build up.
fn dense_put_strategy() -> impl Strategy<Value = Put> {
    (0..Shape::ALL.len(), 0..Color::ALL.len(), 0i64..3, 0i64..3).prop_map(|(s, c, row, col)| Put {
        shape: Shape::ALL[s],
        color: Color::ALL[c],
        row,
        col,
    })
}

fn apply(puts: &[Put]) -> Board {
    let mut b = Board::new();
    for p in puts {
        let _ = b.place(p.shape, p.color, p.row, p.col);
    }
    b
}

fn heights(b: &Board) -> Vec<usize> {
    (0..ROWS).flat_map(|r| (0..COLS).map(move |c| (r, c))).map(|(r, c)| b.height(r, c)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn failed_put_leaves_board_identical(puts in prop::collection::vec(dense_put_strategy(), 0..20), last in put_strategy()) {
        let mut b = apply(&puts);
        let before = b.clone();
        let before_json = b.to_json();
        if b.place(last.shape, last.color, last.row, last.col).is_err() {
            prop_assert!(boards_equal(&b, &before));
            prop_assert_eq!(b.to_json(), before_json);
        }
    }

    #[test]
    fn successful_put_raises_exactly_its_cells(puts in prop::collection::vec(dense_put_strategy(), 0..20), last in dense_put_strategy()) {
        let mut b = apply(&puts);
        let before = heights(&b);
        if b.place(last.shape, last.color, last.row, last.col).is_ok() {
            let after = heights(&b);
            let (r, c) = (last.row as usize, last.col as usize);
            let mut cells = vec![(r, c)];
            if let Some((dr, dc)) = last.shape.second_cell_offset() {
                cells.push((r + dr, c + dc));
            }
            for i in 0..ROWS * COLS {
                let cell = (i / COLS, i % COLS);
                let expected = before[i] + usize::from(cells.contains(&cell));
                prop_assert_eq!(after[i], expected, "cell {:?}", cell);
            }
        }
    }

    #[test]
    fn nothing_rests_on_a_screw(puts in prop::collection::vec(dense_put_strategy(), 0..40)) {
        let b = apply(&puts);
        for (_, _, stack) in b.occupied() {
            if let Some(i) = stack.iter().position(|c| c.shape == Shape::Screw) {
                prop_assert_eq!(i, stack.len() - 1);
            }
        }
    }

    #[test]
    fn bridges_span_two_adjacent_cells_at_one_level(puts in prop::collection::vec(dense_put_strategy(), 0..40)) {
        let b = apply(&puts);
        let mut seen: HashMap<u32, Vec<(usize, usize, usize, Shape)>> = HashMap::new();
        for (r, c, stack) in b.occupied() {
            for (level, comp) in stack.iter().enumerate() {
                match comp.bridge_id {
                    Some(id) => seen.entry(id).or_default().push((r, c, level, comp.shape)),
                    None => prop_assert!(!comp.shape.is_bridge()),
                }
            }
        }
        for entries in seen.values() {
            prop_assert_eq!(entries.len(), 2);
            let (a, z) = (entries[0], entries[1]);
            prop_assert_eq!(a.2, z.2);
            let (dr, dc) = a.3.second_cell_offset().expect("bridge shape");
            prop_assert_eq!((a.0 + dr, a.1 + dc), (z.0, z.1));
        }
    }

    #[test]
    fn board_equality_is_an_equivalence(
        a in prop::collection::vec(dense_put_strategy(), 0..8),
        b in prop::collection::vec(dense_put_strategy(), 0..8),
        c in prop::collection::vec(dense_put_strategy(), 0..8),
    ) {
        let (x, y, z) = (apply(&a), apply(&b), apply(&c));
        prop_assert!(boards_equal(&x, &x));
        prop_assert_eq!(boards_equal(&x, &y), boards_equal(&y, &x));
        if boards_equal(&x, &y) && boards_equal(&y, &z) {
            prop_assert!(boards_equal(&x, &z));
        }
        // a replay is always equal, which exercises the transitive branch
        prop_assert!(boards_equal(&x, &apply(&a)));
    }

    #[test]
    fn json_round_trip(puts in prop::collection::vec(dense_put_strategy(), 0..30)) {
        let b = apply(&puts);
        let back = Board::from_json(&b.to_json()).unwrap();
        prop_assert!(boards_equal(&b, &back));
    }
}
