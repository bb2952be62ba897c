use std::time::Instant;

use qrf_core::grid::Grid1D;
use qrf_core::wigner::{route_deviation, switched_marginals, Keep};

#[test]
fn ground_ground_routes_agree_at_broad_frame() {
    let start = Instant::now();
    let grid = Grid1D::new(256, 48.0).unwrap();
    let m = switched_marginals(grid, 0, 0, 0.1, 1.0).unwrap();
    for (w, keep) in [(&m.b, Keep::B), (&m.c, Keep::C)] {
        assert!((w.integral() - 1.0).abs() < 1e-6);
        let d = route_deviation(w, 0, 0, 0.1, 1.0, keep).unwrap();
        println!("{keep:?}: {d:e}");
        assert!(d <= 1e-3);
    }
    println!("{:?}", start.elapsed());
}

#[test]
fn excited_routes_agree() {
    let grid = Grid1D::new(256, 48.0).unwrap();
    for (la, lb) in [(0, 1), (1, 0), (1, 1)] {
        let m = switched_marginals(grid, la, lb, 1.0, 1.0).unwrap();
        for (w, keep) in [(&m.b, Keep::B), (&m.c, Keep::C)] {
            let d = route_deviation(w, la, lb, 1.0, 1.0, keep).unwrap();
            println!("{la}{lb} {keep:?}: {d:e}");
            assert!(d <= 1e-3);
        }
    }
}
