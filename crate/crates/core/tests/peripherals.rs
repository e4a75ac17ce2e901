use proptest::prelude::*;
use wiperbench::peripherals::{comparator, decode_angle, slew_toward, RainSensor, Servo};
use wiperbench::sim::{Logic, SimTime};

fn sig4(x: f64) -> String {
    format!("{x:.3e}")
}

#[test]
fn divider_examples_to_four_figures() {
    let s = RainSensor::default();
    // 5 V * 1 MOhm / (1 MOhm + 10 kOhm)
    assert_eq!(sig4(s.analog_out(0.0).unwrap()), sig4(5.0 * 1.0e6 / 1.01e6));
    assert_eq!(sig4(s.analog_out(0.0).unwrap()), "4.950e0");
    // 5 V * 1 kOhm / 11 kOhm
    assert_eq!(sig4(s.analog_out(1.0).unwrap()), "4.545e-1");
    let equal = RainSensor {
        r_fixed: 1.0e3,
        ..s
    };
    assert_eq!(equal.analog_out(1.0).unwrap(), 2.5);
}

#[test]
fn half_wet_resistance() {
    // 1e6 * 1e3 / (0.5e6 + 0.5e3)
    let r = RainSensor::default().resistance(0.5).unwrap();
    assert_eq!(sig4(r), sig4(1.0e9 / 500_500.0));
    assert!((r - 1998.002).abs() < 1e-3);
}

#[test]
fn reference_wetness_levels_classify() {
    let s = RainSensor::default();
    let light = s.outputs(0.3).unwrap();
    assert_eq!((light.rain, light.heavy), (Logic::Low, Logic::High));
    let heavy = s.outputs(0.9).unwrap();
    assert_eq!((heavy.rain, heavy.heavy), (Logic::Low, Logic::Low));
    let dry = s.outputs(0.0).unwrap();
    assert_eq!((dry.rain, dry.heavy), (Logic::High, Logic::High));
}

#[test]
fn reference_pulse_angles() {
    assert_eq!(decode_angle(SimTime::from_us(1000)), Some(0.0));
    assert_eq!(decode_angle(SimTime::from_us(1500)), Some(90.0));
    assert_eq!(decode_angle(SimTime::from_us(2000)), Some(180.0));
}

#[test]
fn pulse_angle_map_is_linear() {
    for k in 0..=200u64 {
        let a = decode_angle(SimTime::from_ns(1_000_000 + k * 5_000)).unwrap();
        assert!((a - k as f64 * 0.9).abs() < 1e-9, "k={k}: {a}");
    }
}

#[test]
fn servo_holds_without_pulses() {
    let mut s = Servo::default();
    let mut t = SimTime::ZERO;
    for _ in 0..10 {
        s.on_edge(t, Logic::High);
        s.on_edge(t + SimTime::from_us(1700), Logic::Low);
        t = t + SimTime::from_ms(20);
    }
    let settled = s.advance(t + SimTime::from_ms(500));
    let commanded = s.commanded();
    assert_eq!(settled, commanded);
    for ms in (0..=1000).step_by(10) {
        let a = s.advance(t + SimTime::from_ms(500 + ms));
        assert_eq!(a, settled);
        assert_eq!(s.commanded(), commanded);
    }
}

#[test]
fn retarget_mid_motion_is_continuous() {
    let mut s = Servo::default();
    s.accept(SimTime::ZERO, SimTime::from_us(2000));
    let mid = s.advance(SimTime::from_ms(100));
    assert!((mid - 60.0).abs() < 1e-9);
    s.accept(SimTime::from_ms(100), SimTime::from_us(1000));
    let next = s.advance(SimTime::from_ms(101));
    assert!((next - (mid - 0.6)).abs() < 1e-9);
}

fn sensor() -> impl Strategy<Value = RainSensor> {
    (
        3.0f64..12.0,
        1.0e5f64..1.0e7,
        1.0e2f64..5.0e3,
        1.0e3f64..1.0e5,
        0.05f64..0.95,
        0.05f64..0.95,
    )
        .prop_map(|(vcc, r_dry, r_wet, r_fixed, hi, lo)| RainSensor {
            vcc,
            r_dry,
            r_wet,
            r_fixed,
            pot_light: vcc * hi.max(lo),
            pot_heavy: vcc * hi.min(lo) * 0.99,
            hysteresis: 0.0,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn analog_out_strictly_decreasing(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        prop_assume!(a != b);
        let (w1, w2) = if a < b { (a, b) } else { (b, a) };
        let s = RainSensor::default();
        prop_assert!(s.resistance(w1).unwrap() > s.resistance(w2).unwrap());
        prop_assert!(s.analog_out(w1).unwrap() > s.analog_out(w2).unwrap());
    }

    #[test]
    fn comparator_agrees_with_divider(s in sensor(), w in 0.0f64..=1.0) {
        prop_assume!(s.validate().is_ok());
        let out = s.outputs(w).unwrap();
        prop_assert_eq!(out.rain == Logic::Low, out.ao < s.pot_light);
        prop_assert_eq!(out.heavy == Logic::Low, out.ao < s.pot_heavy);
        prop_assert_eq!(comparator(out.ao, s.pot_light), out.rain);
    }

    #[test]
    fn angle_is_slew_lipschitz(
        widths in proptest::collection::vec(400u64..2600, 1..40),
        probes in proptest::collection::vec(0u64..1_000_000_000, 2..30),
    ) {
        let mut s = Servo::default();
        let mut samples = Vec::new();
        let mut probes = probes;
        probes.sort_unstable();
        let mut pi = 0;
        // the servo cannot look back before its last edge
        let mut last_edge = 0;
        for (i, w) in widths.iter().enumerate() {
            let rise = SimTime::from_ms(20 * i as u64);
            while pi < probes.len() && probes[pi] < rise.ns() {
                let t = probes[pi].max(last_edge);
                samples.push((t, s.advance(SimTime(t))));
                pi += 1;
            }
            let fall = rise + SimTime::from_us(*w);
            s.on_edge(rise, Logic::High);
            s.on_edge(fall, Logic::Low);
            last_edge = fall.ns();
        }
        for p in &probes[pi..] {
            let t = (*p).max(last_edge);
            samples.push((t, s.advance(SimTime(t))));
        }
        for pair in samples.windows(2) {
            let (t1, a1) = pair[0];
            let (t2, a2) = pair[1];
            let bound = 600.0 * (t2 - t1) as f64 / 1e9;
            prop_assert!((a2 - a1).abs() <= bound + 1e-9);
        }
    }

    #[test]
    fn slew_never_overshoots(cur in 0.0f64..180.0, target in 0.0f64..180.0, dt in 0u64..500_000_000) {
        let next = slew_toward(cur, target, 600.0, SimTime(dt));
        prop_assert!((next - cur).abs() <= 600.0 * dt as f64 / 1e9 + 1e-9);
        prop_assert!((next - target).abs() <= (cur - target).abs());
    }
}
