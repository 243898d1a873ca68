//! Property suites shared by the `properties` and `acceptance` targets.
//!
//! Each suite runs `CASES` randomized cases through a proptest runner and
//! returns the number of cases executed or the shrunk failure.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use safegap::kinematics::{
    constant_decel_distance, follower_stop_distance_range, ramp_phase_distance, reaction_distance,
};
use safegap::report::{render_sweep, OutputFormat};
use safegap::rules::{classify, SafetyClass};
use safegap::scenarios::{
    safe_distance, safe_distance_constant_speed, safe_distance_sudden_equal,
    safe_distance_sudden_faster, safe_distance_sudden_slower,
};
use safegap::sweep::{run_sweep, SweepSpec};
use safegap::{DistanceRange, ScenarioKind, SpeedMs, VehicleParams};

pub const CASES: u32 = 256;

pub fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

pub fn params() -> impl Strategy<Value = VehicleParams> {
    (
        0.5f64..1.5,
        0.0f64..1.0,
        0.0f64..0.3,
        4.0f64..10.0,
        0.0f64..0.1,
        0.0f64..5.0,
        3.0f64..6.0,
    )
        .prop_map(
            |(t_min, spread, ramp, decel, tr_a, dm, len)| VehicleParams {
                follower_response_min: t_min,
                follower_response_max: t_min + spread,
                ramp_time: ramp.min(0.9 * t_min),
                max_decel: decel,
                leader_reaction: tr_a,
                critical_distance: dm,
                vehicle_length: len,
            },
        )
}

fn ms(v: f64) -> SpeedMs {
    SpeedMs::new(v).unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn run<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    runner()
        .run(&strategy, test)
        .map(|()| CASES)
        .map_err(|e| e.to_string())
}

/// Every distance primitive and scenario formula is nondecreasing in speed
/// and in response time; sudden-brake formulas strictly increase in follower
/// speed.
pub fn monotonicity() -> Result<u32, String> {
    run(
        (
            params(),
            0.0f64..40.0,
            0.0f64..40.0,
            0.0f64..2.0,
            0.0f64..2.0,
            0.0f64..40.0,
        ),
        |(p, v1, dv, t1, dt, lead)| {
            let (lo, hi) = (ms(v1), ms(v1 + dv));
            let (ta, tb) = (t1, t1 + dt);
            let a = p.max_decel;

            check(
                reaction_distance(lo, ta).unwrap() <= reaction_distance(hi, ta).unwrap()
                    && reaction_distance(lo, ta).unwrap() <= reaction_distance(lo, tb).unwrap(),
                || "reaction distance not monotone".into(),
            )?;
            check(
                constant_decel_distance(lo, a).unwrap() <= constant_decel_distance(hi, a).unwrap(),
                || "braking distance not monotone".into(),
            )?;
            if v1 >= a * p.ramp_time / 2.0 {
                check(
                    ramp_phase_distance(lo, p.ramp_time, a).unwrap()
                        <= ramp_phase_distance(hi, p.ramp_time, a).unwrap(),
                    || "ramp distance not monotone in speed".into(),
                )?;
            }
            let r_lo = follower_stop_distance_range(lo, &p).unwrap();
            let r_hi = follower_stop_distance_range(hi, &p).unwrap();
            check(
                r_lo.d_min() <= r_hi.d_min() && r_lo.d_max() <= r_hi.d_max(),
                || "stop range not monotone".into(),
            )?;

            // response time: longer T_max never shrinks d_max
            let slower_driver = VehicleParams {
                follower_response_max: p.follower_response_max + dt,
                ..p
            };
            let eq = safe_distance_sudden_equal(lo, &p).unwrap();
            let eq_slow = safe_distance_sudden_equal(lo, &slower_driver).unwrap();
            check(eq.d_max() <= eq_slow.d_max(), || {
                "equal: not monotone in T".into()
            })?;

            if dv > 1e-6 {
                let e_lo = safe_distance_sudden_equal(lo, &p).unwrap();
                let e_hi = safe_distance_sudden_equal(hi, &p).unwrap();
                check(e_lo.d_min() < e_hi.d_min(), || {
                    format!("equal: {e_lo:?} !< {e_hi:?}")
                })?;

                let leader = ms(lead.min(v1 * 0.999));
                if leader.get() < v1 {
                    let f_lo = safe_distance_sudden_faster(lo, leader, &p).unwrap();
                    let f_hi = safe_distance_sudden_faster(hi, leader, &p).unwrap();
                    check(f_lo.d_min() < f_hi.d_min(), || {
                        "faster: not increasing".into()
                    })?;
                    let c_lo = safe_distance_constant_speed(lo, leader, &p).unwrap();
                    let c_hi = safe_distance_constant_speed(hi, leader, &p).unwrap();
                    check(c_lo.d_min() <= c_hi.d_min(), || {
                        "constant: not monotone".into()
                    })?;
                    let f_slow = safe_distance_sudden_faster(lo, leader, &slower_driver).unwrap();
                    check(f_lo.d_max() <= f_slow.d_max(), || {
                        "faster: not monotone in T".into()
                    })?;
                }

                let fast_leader = ms(v1 + dv + lead + 0.1);
                let s_lo = safe_distance_sudden_slower(lo, fast_leader, &p).unwrap();
                let s_hi = safe_distance_sudden_slower(hi, fast_leader, &p).unwrap();
                check(s_lo.d_min() < s_hi.d_min(), || {
                    "slower: not increasing".into()
                })?;
            }
            Ok(())
        },
    )
}

/// `d_max - d_min` equals the speed coefficient of `T` times the response
/// spread, to 1e-9 m.
pub fn range_width() -> Result<u32, String> {
    run((params(), 0.0f64..45.0, 0.01f64..45.0), |(p, v, gap)| {
        let spread = p.follower_response_max - p.follower_response_min;
        let close = |r: DistanceRange, coeff: f64| (r.width() - coeff * spread).abs() <= 1e-9;

        let leader = ms(v);
        let faster = ms(v + gap);
        let r = safe_distance_constant_speed(faster, leader, &p).unwrap();
        check(close(r, gap), || format!("constant width {r:?}"))?;
        check(r.d_min() <= r.d_max(), || "constant order".into())?;

        let r = safe_distance_sudden_faster(faster, leader, &p).unwrap();
        check(close(r, v + gap), || format!("faster width {r:?}"))?;

        let r = safe_distance_sudden_equal(leader, &p).unwrap();
        check(close(r, v), || format!("equal width {r:?}"))?;

        let r = safe_distance_sudden_slower(leader, faster, &p).unwrap();
        check(close(r, v), || format!("slower width {r:?}"))?;

        let r = follower_stop_distance_range(leader, &p).unwrap();
        check(close(r, v), || format!("stop range width {r:?}"))?;
        Ok(())
    })
}

/// Raising the rule distance never lowers the class.
pub fn classify_monotone() -> Result<u32, String> {
    run(
        (-5.0f64..80.0, 0.0f64..30.0, 0.0f64..100.0, 0.0f64..20.0),
        |(lo, width, rule, bump)| {
            let range = DistanceRange::new(lo, lo + width).unwrap();
            let a = classify(rule, &range);
            let b = classify(rule + bump, &range);
            check(a <= b, || format!("{rule} -> {a}, {} -> {b}", rule + bump))?;
            // boundary ties
            check(classify(range.d_max(), &range) == SafetyClass::Safe, || {
                "tie at d_max".into()
            })?;
            if width > 0.0 {
                check(
                    classify(range.d_min(), &range) == SafetyClass::DriverDependent,
                    || "tie at d_min".into(),
                )?;
            }
            Ok(())
        },
    )
}

fn sweep_spec() -> impl Strategy<Value = (SweepSpec, usize)> {
    let kind = prop_oneof![
        Just(ScenarioKind::ConstantSpeed),
        Just(ScenarioKind::SuddenBrakeFaster),
        Just(ScenarioKind::SuddenBrakeEqual),
        Just(ScenarioKind::SuddenBrakeSlower),
    ];
    (
        kind,
        10.0f64..60.0,
        proptest::collection::btree_set(1u32..1000, 1..12),
        proptest::collection::vec(0.5f64..4.0, 1..4),
        params(),
        0usize..=6,
    )
        .prop_map(|(kind, fixed, ticks, rules, p, precision)| {
            let grid: Vec<f64> = ticks.into_iter().map(|t| t as f64 * 0.1).collect();
            let (fixed, grid) = match kind {
                ScenarioKind::SuddenBrakeFaster => {
                    (fixed, grid.iter().map(|g| fixed + g).collect())
                }
                ScenarioKind::SuddenBrakeSlower => (100.5 + fixed, grid),
                _ => (fixed, grid),
            };
            let spec = SweepSpec::new(kind, fixed, grid)
                .unwrap()
                .with_rules(rules)
                .with_params(p);
            (spec, precision)
        })
}

/// Re-parsing emitted sweep CSV yields the in-memory rows at the emitted
/// precision.
pub fn csv_round_trip() -> Result<u32, String> {
    run(sweep_spec(), |(spec, precision)| {
        let outcome = run_sweep(&spec);
        check(outcome.is_complete(), || format!("{:?}", outcome.rejected))?;
        let text = render_sweep(&spec, &outcome, &[], OutputFormat::Csv, precision);
        check(!text.contains('\r') && text.ends_with('\n'), || {
            "line endings".into()
        })?;

        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header = reader.headers().unwrap().clone();
        check(header.len() == 5 + 2 * spec.rules.len(), || {
            format!("header {header:?}")
        })?;
        let half_ulp = 0.5 * 10f64.powi(-(precision as i32)) + 1e-9;
        let mut n = 0;
        for (rec, row) in reader.records().zip(&outcome.rows) {
            let rec = rec.unwrap();
            let f = |i: usize| rec[i].parse::<f64>().unwrap();
            check(f(0) == row.speed, || {
                format!("grid {} vs {}", &rec[0], row.speed)
            })?;
            for (i, want) in [
                (1, row.follower_speed),
                (2, row.leader_speed),
                (3, row.d_min),
                (4, row.d_max),
            ] {
                check((f(i) - want).abs() <= half_ulp, || {
                    format!("col {i}: {} vs {want}", &rec[i])
                })?;
            }
            for (j, rule) in row.rules.iter().enumerate() {
                let col = 5 + 2 * j;
                check((f(col) - rule.distance).abs() <= half_ulp, || {
                    "rule distance".into()
                })?;
                let class: SafetyClass = rec[col + 1].parse().unwrap();
                check(class == rule.class, || "class".into())?;
            }
            n += 1;
        }
        check(n == outcome.rows.len(), || "row count".into())?;
        Ok(())
    })
}

/// Constant-speed balance: follower adaptation travel plus the critical
/// distance minus leader travel equals the closed form, to 1e-9 m.
pub fn constant_speed_balance() -> Result<u32, String> {
    use safegap::kinematics::{follower_adaptation_distance, leader_travel_during_adaptation};
    run((params(), 0.0f64..40.0, 0.01f64..40.0), |(p, va, dv)| {
        let (v_a, v_h) = (ms(va), ms(va + dv));
        let v_rel = ms(v_h.get() - v_a.get());
        let r = safe_distance_constant_speed(v_h, v_a, &p).unwrap();
        for (t, d) in [
            (p.follower_response_min, r.d_min()),
            (p.follower_response_max, r.d_max()),
        ] {
            let balance = follower_adaptation_distance(v_h, v_a, t, p.max_decel).unwrap()
                + p.critical_distance
                - leader_travel_during_adaptation(v_a, v_rel, t, p.max_decel).unwrap();
            check((balance - d).abs() <= 1e-9, || {
                format!("balance {balance} vs {d}")
            })?;
        }
        Ok(())
    })
}

/// Doubling speed quadruples the constant-deceleration distance.
pub fn quadratic_braking() -> Result<u32, String> {
    run((0.0f64..50.0, 1.0f64..12.0), |(v, a)| {
        let d1 = constant_decel_distance(ms(v), a).unwrap();
        let d2 = constant_decel_distance(ms(2.0 * v), a).unwrap();
        check((d2 - 4.0 * d1).abs() <= 1e-12 * d2.max(1.0), || {
            format!("{d2} vs 4*{d1}")
        })
    })
}

/// Dispatcher agrees bit-for-bit with the direct formula for each variant.
pub fn dispatcher_consistency() -> Result<u32, String> {
    run((params(), 0.0f64..40.0, 0.01f64..30.0), |(p, v, dv)| {
        use safegap::Scenario;
        let (slow, fast) = (ms(v), ms(v + dv));
        let cases = [
            (
                Scenario::new(ScenarioKind::ConstantSpeed, fast, slow).unwrap(),
                safe_distance_constant_speed(fast, slow, &p).unwrap(),
            ),
            (
                Scenario::new(ScenarioKind::SuddenBrakeFaster, fast, slow).unwrap(),
                safe_distance_sudden_faster(fast, slow, &p).unwrap(),
            ),
            (
                Scenario::equal(slow),
                safe_distance_sudden_equal(slow, &p).unwrap(),
            ),
            (
                Scenario::new(ScenarioKind::SuddenBrakeSlower, slow, fast).unwrap(),
                safe_distance_sudden_slower(slow, fast, &p).unwrap(),
            ),
        ];
        for (s, direct) in cases {
            check(safe_distance(&s, &p).unwrap() == direct, || {
                format!("{s:?}")
            })?;
        }
        Ok(())
    })
}
