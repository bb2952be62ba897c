use proptest::prelude::*;
use qrf_core::classical::{classical_frame_switch, FrameLabel, ReducedPhasePoint};
use qrf_core::dirac::{physical_inner_product_in, PhysicalState};
use qrf_core::grid::random::random_state;
use qrf_core::grid::{fidelity, Grid1D};
use qrf_core::switch::{switch_frame, FrameSwitch, SwitchBackend};

const A: FrameLabel = FrameLabel::A;
const B: FrameLabel = FrameLabel::B;
const C: FrameLabel = FrameLabel::C;

fn frames() -> impl Strategy<Value = (FrameLabel, FrameLabel)> {
    (0usize..3, 1usize..3).prop_map(|(f, d)| (FrameLabel(f), FrameLabel((f + d) % 3)))
}

fn others(f: FrameLabel) -> [FrameLabel; 2] {
    let v: Vec<FrameLabel> = [A, B, C].into_iter().filter(|l| *l != f).collect();
    [v[0], v[1]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classical_switch_round_trips(
        (from, to) in frames(),
        q in prop::collection::vec(-50.0..50.0f64, 2),
        p in prop::collection::vec(-50.0..50.0f64, 2),
    ) {
        let rp = ReducedPhasePoint::new(from, 3, q, p).unwrap();
        let there = classical_frame_switch(&rp, to).unwrap();
        prop_assert_eq!(there.position(from).unwrap(), -rp.position(to).unwrap());
        let back = classical_frame_switch(&there, from).unwrap();
        for k in 0..2 {
            prop_assert!((back.q()[k] - rp.q()[k]).abs() <= 1e-12 * (1.0 + rp.q()[k].abs()));
            prop_assert!((back.p()[k] - rp.p()[k]).abs() <= 1e-12 * (1.0 + rp.p()[k].abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quantum_switch_is_unitary_and_backend_independent((from, to) in frames(), seed in any::<u64>()) {
        let g = Grid1D::new(32, 12.0).unwrap();
        let [a, b] = others(from);
        let psi = random_state(&[(a, g), (b, g)], from, seed);
        let sw = FrameSwitch::new(from, to).unwrap();
        let shear = switch_frame(&psi, &sw).unwrap();
        let composed = switch_frame(&psi, &sw.with_backend(SwitchBackend::Compositional)).unwrap();
        prop_assert!((shear.norm() - 1.0).abs() < 1e-10);
        prop_assert_eq!(shear.frame(), to);
        prop_assert!(fidelity(&shear, &composed).unwrap() > 1.0 - 1e-10);
        let back = switch_frame(&shear, &sw.inverse()).unwrap();
        prop_assert!(fidelity(&back, &psi).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn physical_inner_product_is_frame_independent(s1 in any::<u64>(), s2 in any::<u64>()) {
        let g = Grid1D::new(32, 12.0).unwrap();
        let x = PhysicalState::new(random_state(&[(B, g), (C, g)], A, s1)).unwrap();
        let y = PhysicalState::new(random_state(&[(B, g), (C, g)], A, s2)).unwrap();
        let reference = physical_inner_product_in(&x, &y, A).unwrap();
        for f in [B, C] {
            prop_assert!((physical_inner_product_in(&x, &y, f).unwrap() - reference).norm() < 1e-10);
        }
    }
}
