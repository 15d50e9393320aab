use xorlab::lab::{default_landscape_grid, local_minima, loss_landscape};
use xorlab::InputRange;

#[test]
fn pm1_surface_symmetries_are_exact() {
    let (x, y) = default_landscape_grid();
    let s = loss_landscape(InputRange::PlusMinusOne, -1.0, x, y, &[]).unwrap();
    let n = s.values.len();
    for iy in 0..n {
        for ix in 0..n {
            let v = s.values[iy][ix];
            // L(w1, w2) = L(w2, w1) = L(-w1, -w2)
            assert_eq!(v, s.values[ix][iy]);
            assert_eq!(v, s.values[n - 1 - iy][n - 1 - ix]);
        }
    }
}

#[test]
fn pm1_has_two_zero_cells_and_no_other_minima() {
    let (x, y) = default_landscape_grid();
    let s = loss_landscape(InputRange::PlusMinusOne, -1.0, x, y, &[]).unwrap();
    let zeros: Vec<(f64, f64)> = s
        .cells()
        .filter(|c| c.value == 0.0)
        .map(|c| (c.x, c.y))
        .collect();
    assert_eq!(zeros, vec![(0.5, -0.5), (-0.5, 0.5)]);
    let minima = local_minima(&s);
    assert_eq!(minima.len(), 2);
    assert!(minima.iter().all(|m| m.value == 0.0 && m.cells.len() == 1));
}

#[test]
fn zero_one_surface_has_and_minima_off_the_diagonal_solutions() {
    let (x, y) = default_landscape_grid();
    let s = loss_landscape(InputRange::ZeroOne, -1.0, x, y, &[]).unwrap();
    let minima = local_minima(&s);
    let positive: Vec<_> = minima.iter().filter(|m| m.value > 0.0).collect();
    assert_eq!(positive.len(), 2);
    assert!(positive.iter().any(|m| m.x > 0.0 && m.y > 0.0));
    assert!(positive.iter().any(|m| m.x < 0.0 && m.y < 0.0));
}
