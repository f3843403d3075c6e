use sepfront_web::{entangled_map, entropy_curve, frontier_curve, ENTANGLED, OUTSIDE, SEPARABLE};

#[test]
fn singlet_curve_is_negative_everywhere() {
    let curve = entropy_curve(0.0, 1.0, 0.0, 1.0, 0.5, 50.0, 12).unwrap();
    assert_eq!(curve.len(), 12);
    assert_eq!(curve[0].0, 0.5);
    assert_eq!(curve[11].0, 50.0);
    assert!(curve.iter().all(|&(_, s)| s < 0.0));
    let at2 = entropy_curve(0.0, 1.0, 0.0, 1.0, 2.0, 4.0, 2).unwrap()[0].1;
    assert!((at2 + 1.0).abs() < 1e-12);
}

#[test]
fn curve_rejects_bad_input() {
    assert!(entropy_curve(0.5, 0.6, 0.0, 1.0, 0.5, 5.0, 10).is_err());
    assert!(entropy_curve(0.0, 0.0, 0.0, 1.0, 5.0, 0.5, 10).is_err());
    assert!(entropy_curve(0.0, 0.0, 0.0, 1.0, 0.5, 5.0, 1).is_err());
    assert!(frontier_curve(0.5, 1.0, 10_000).is_err());
}

#[test]
fn zero_temperature_frontier_matches_the_linear_law() {
    for (x, y) in frontier_curve(0.0, 1.0, 6).unwrap() {
        if x < 1.0 {
            assert!((y - (1.0 - x) / 3.0).abs() < 1e-5, "x={x}: {y}");
        }
    }
}

#[test]
fn hot_frontier_has_no_region() {
    assert!(frontier_curve(2.0, 1.0, 4)
        .unwrap()
        .iter()
        .all(|&(_, y)| y.is_nan()));
}

#[test]
fn map_codes_cover_the_triangle() {
    let n = 10;
    let cells = entangled_map(0.0, 1.0, n).unwrap();
    assert_eq!(cells.len(), n * n);
    let outside = cells.iter().filter(|&&c| c == OUTSIDE).count();
    assert_eq!(outside, n * (n - 1) / 2);
    // bottom row (y = 0.05) is separable, the cell at x = 0.05, y = 0.95 is entangled
    assert!(cells[..n - 1].iter().all(|&c| c == SEPARABLE));
    assert_eq!(cells[(n - 1) * n], ENTANGLED);
}
